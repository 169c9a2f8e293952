//! Gauss–Legendre panels, graded breakpoints and spectral cumulative integration.

use std::sync::OnceLock;

use num_complex::Complex64;

/// Nodes per panel.
pub const GL_NODES: usize = 16;

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_m`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[m - 1 - i] = z;
        w[m - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
    /// Barycentric weights of the nodes.
    bary: Vec<f64>,
    /// `S[i][j] = int_{-1}^{x_i} l_j`.
    integ: Vec<Vec<f64>>,
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let (x, w) = gauss_legendre(GL_NODES);
        let m = x.len();
        let bary: Vec<f64> = (0..m)
            .map(|j| 1.0 / (0..m).filter(|&k| k != j).map(|k| x[j] - x[k]).product::<f64>())
            .collect();
        let mut integ = vec![vec![0.0; m]; m];
        for (i, row) in integ.iter_mut().enumerate() {
            let half = 0.5 * (x[i] + 1.0);
            for q in 0..m {
                let t = -1.0 + half * (x[q] + 1.0);
                let l = lagrange_row(&x, &bary, t);
                for j in 0..m {
                    row[j] += w[q] * half * l[j];
                }
            }
        }
        Rule { x, w, bary, integ }
    })
}

fn lagrange_row(x: &[f64], bary: &[f64], t: f64) -> Vec<f64> {
    if let Some(k) = x.iter().position(|&xk| xk == t) {
        let mut out = vec![0.0; x.len()];
        out[k] = 1.0;
        return out;
    }
    let terms: Vec<f64> = x.iter().zip(bary).map(|(&xk, &bk)| bk / (t - xk)).collect();
    let s: f64 = terms.iter().sum();
    terms.iter().map(|v| v / s).collect()
}

/// Breakpoints on `[lo, hi]` refined geometrically toward each focus point.
///
/// Panels adjacent to a focus have width `min_width`; widths grow by `ratio`
/// away from it, capped at `max_width`.
pub fn graded_breakpoints(lo: f64, hi: f64, focus: &[f64], min_width: f64, ratio: f64, max_width: f64) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    for &f in focus {
        if f > lo && f < hi {
            pts.push(f);
        }
        for dir in [-1.0, 1.0] {
            let mut w = min_width;
            let mut x = f;
            loop {
                x += dir * w;
                if x <= lo || x >= hi {
                    break;
                }
                pts.push(x);
                w = (w * ratio).min(max_width);
            }
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-3 * min_width);
    // Split anything still wider than max_width.
    let mut out = vec![pts[0]];
    for w in pts.windows(2) {
        let k = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
        for j in 1..=k {
            out.push(w[0] + (w[1] - w[0]) * j as f64 / k as f64);
        }
    }
    out
}

/// Nodes of a panel mesh.
#[derive(Debug, Clone)]
pub struct PanelGrid {
    pub breaks: Vec<f64>,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl PanelGrid {
    pub fn new(breaks: Vec<f64>) -> Self {
        let r = rule();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in breaks.windows(2) {
            let (c, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            for (x, wt) in r.x.iter().zip(&r.w) {
                nodes.push(c + h * x);
                weights.push(h * wt);
            }
        }
        Self { breaks, nodes, weights }
    }

    pub fn panels(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `int_{lo}^{x_i} f` at every node, from values of `f` at the nodes.
    pub fn cumulative(&self, f: &[Complex64]) -> Vec<Complex64> {
        let r = rule();
        let m = GL_NODES;
        let mut out = vec![Complex64::new(0.0, 0.0); f.len()];
        let mut base = Complex64::new(0.0, 0.0);
        for p in 0..self.panels() {
            let h = 0.5 * (self.breaks[p + 1] - self.breaks[p]);
            let fp = &f[p * m..(p + 1) * m];
            for i in 0..m {
                let s: Complex64 = r.integ[i].iter().zip(fp).map(|(a, b)| b * *a).sum();
                out[p * m + i] = base + s * h;
            }
            let total: Complex64 = r.w.iter().zip(fp).map(|(a, b)| b * *a).sum();
            base += total * h;
        }
        out
    }

    /// `int_{x_i}^{hi} f` at every node, summed from the right end.
    pub fn cumulative_from_right(&self, f: &[Complex64]) -> Vec<Complex64> {
        let r = rule();
        let m = GL_NODES;
        let mut out = vec![Complex64::new(0.0, 0.0); f.len()];
        let mut base = Complex64::new(0.0, 0.0);
        for p in (0..self.panels()).rev() {
            let h = 0.5 * (self.breaks[p + 1] - self.breaks[p]);
            let fp = &f[p * m..(p + 1) * m];
            let total: Complex64 = r.w.iter().zip(fp).map(|(a, b)| b * *a).sum();
            for i in 0..m {
                let s: Complex64 = r.integ[i].iter().zip(fp).map(|(a, b)| b * *a).sum();
                out[p * m + i] = base + (total - s) * h;
            }
            base += total * h;
        }
        out
    }

    /// `int_{lo}^{hi} f`.
    pub fn integrate(&self, f: &[Complex64]) -> Complex64 {
        self.weights.iter().zip(f).map(|(w, v)| v * *w).sum()
    }

    /// Interpolate node values at `x` with the panel polynomial.
    pub fn interpolate(&self, f: &[Complex64], x: f64) -> Complex64 {
        let p = self.panel_of(x);
        let (c, h) = (0.5 * (self.breaks[p] + self.breaks[p + 1]), 0.5 * (self.breaks[p + 1] - self.breaks[p]));
        let r = rule();
        let l = lagrange_row(&r.x, &r.bary, (x - c) / h);
        l.iter().zip(&f[p * GL_NODES..(p + 1) * GL_NODES]).map(|(a, b)| b * *a).sum()
    }

    pub fn panel_of(&self, x: f64) -> usize {
        let idx = self.breaks.partition_point(|&b| b <= x);
        idx.saturating_sub(1).min(self.panels() - 1)
    }
}

/// `int_{-1}^{t} l_j` for every Lagrange basis polynomial of the panel rule.
fn lagrange_integrals(t: f64) -> Vec<f64> {
    let r = rule();
    let half = 0.5 * (t + 1.0);
    let mut out = vec![0.0; GL_NODES];
    for q in 0..GL_NODES {
        let u = -1.0 + half * (r.x[q] + 1.0);
        let l = lagrange_row(&r.x, &r.bary, u);
        for j in 0..GL_NODES {
            out[j] += r.w[q] * half * l[j];
        }
    }
    out
}

/// Running integral of the panel interpolant of node values.
#[derive(Debug, Clone)]
pub struct NodeIntegral {
    breaks: Vec<f64>,
    f: Vec<Complex64>,
    /// `int_{lo}^{b_p}` for every breakpoint.
    prefix: Vec<Complex64>,
    /// `int_{b_p}^{hi}` for every breakpoint.
    suffix: Vec<Complex64>,
    totals: Vec<Complex64>,
}

impl NodeIntegral {
    pub fn new(grid: &PanelGrid, f: Vec<Complex64>) -> Self {
        let r = rule();
        let totals: Vec<Complex64> = (0..grid.panels())
            .map(|p| {
                let h = 0.5 * (grid.breaks[p + 1] - grid.breaks[p]);
                r.w.iter().zip(&f[p * GL_NODES..(p + 1) * GL_NODES]).map(|(w, v)| v * *w).sum::<Complex64>() * h
            })
            .collect();
        let zero = Complex64::new(0.0, 0.0);
        let mut prefix = vec![zero];
        for t in &totals {
            let last = prefix[prefix.len() - 1];
            prefix.push(last + t);
        }
        let mut suffix = vec![zero; totals.len() + 1];
        for p in (0..totals.len()).rev() {
            suffix[p] = suffix[p + 1] + totals[p];
        }
        Self { breaks: grid.breaks.clone(), f, prefix, suffix, totals }
    }

    pub fn total(&self) -> Complex64 {
        self.prefix[self.prefix.len() - 1]
    }

    /// `int_{y}^{hi}`, accurate when the left part dominates.
    pub fn tail(&self, y: f64) -> Complex64 {
        let (p, part) = self.partial(y);
        self.suffix[p + 1] + (self.totals[p] - part)
    }

    /// `int_{lo}^{y}`.
    pub fn at(&self, y: f64) -> Complex64 {
        let (p, part) = self.partial(y);
        self.prefix[p] + part
    }

    fn partial(&self, y: f64) -> (usize, Complex64) {
        let np = self.breaks.len() - 1;
        let p = self.breaks.partition_point(|&b| b <= y).saturating_sub(1).min(np - 1);
        let (c, h) = (0.5 * (self.breaks[p] + self.breaks[p + 1]), 0.5 * (self.breaks[p + 1] - self.breaks[p]));
        let li = lagrange_integrals((y - c) / h);
        let part: Complex64 = li.iter().zip(&self.f[p * GL_NODES..(p + 1) * GL_NODES]).map(|(a, v)| v * *a).sum();
        (p, part * h)
    }
}

/// `int_a^b f` by one Gauss–Legendre panel.
pub fn gl_panel<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64) -> Complex64 {
    let r = rule();
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    r.x.iter().zip(&r.w).map(|(x, w)| f(c + h * x) * *w).sum::<Complex64>() * h
}

/// Running integral `x -> int_{anchor}^x f` tabulated at panel breakpoints.
#[derive(Debug, Clone)]
pub struct Cumulative {
    breaks: Vec<f64>,
    values: Vec<Complex64>,
    anchor_index: usize,
}

impl Cumulative {
    /// `breaks` must contain `anchor`.
    pub fn new<F: FnMut(f64) -> Complex64>(mut f: F, breaks: Vec<f64>, anchor: f64) -> Self {
        let anchor_index = breaks
            .iter()
            .position(|&b| b == anchor)
            .expect("anchor must be a breakpoint");
        let mut values = vec![Complex64::new(0.0, 0.0); breaks.len()];
        for i in (anchor_index + 1)..breaks.len() {
            values[i] = values[i - 1] + gl_panel(&mut f, breaks[i - 1], breaks[i]);
        }
        for i in (0..anchor_index).rev() {
            values[i] = values[i + 1] - gl_panel(&mut f, breaks[i], breaks[i + 1]);
        }
        Self { breaks, values, anchor_index }
    }

    pub fn range(&self) -> (f64, f64) {
        (self.breaks[0], self.breaks[self.breaks.len() - 1])
    }

    pub fn anchor(&self) -> f64 {
        self.breaks[self.anchor_index]
    }

    /// `int_{anchor}^x f`; `f` must be the integrand used at construction.
    pub fn eval<F: FnMut(f64) -> Complex64>(&self, f: F, x: f64) -> Complex64 {
        let idx = self.breaks.partition_point(|&b| b <= x).saturating_sub(1).min(self.breaks.len() - 2);
        let (b0, b1) = (self.breaks[idx], self.breaks[idx + 1]);
        // Integrate from the nearer breakpoint.
        if x - b0 <= b1 - x {
            self.values[idx] + gl_panel(f, b0, x)
        } else {
            self.values[idx + 1] - gl_panel(f, x, b1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        let (x, w) = gauss_legendre(GL_NODES);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cumulative_matches_antiderivative() {
        let g = PanelGrid::new(graded_breakpoints(-1.0, 2.0, &[0.0], 0.01, 2.0, 0.5));
        let f: Vec<Complex64> = g.nodes.iter().map(|&x| c(x.cos())).collect();
        let cum = g.cumulative(&f);
        for (x, v) in g.nodes.iter().zip(&cum) {
            assert!((v.re - (x.sin() - (-1.0f64).sin())).abs() < 1e-13);
        }
        assert!((g.integrate(&f).re - (2.0f64.sin() + 1.0f64.sin())).abs() < 1e-13);
        assert!((g.interpolate(&f, 0.123).re - 0.123f64.cos()).abs() < 1e-13);
    }

    #[test]
    fn node_integral_at_arbitrary_points() {
        let g = PanelGrid::new(graded_breakpoints(-1.0, 1.0, &[0.0], 0.05, 2.0, 0.5));
        let f: Vec<Complex64> = g.nodes.iter().map(|&x| c(x.exp())).collect();
        let ni = NodeIntegral::new(&g, f);
        for y in [-1.0, -0.31, 0.0, 0.4, 1.0] {
            assert!((ni.at(y).re - (y.exp() - (-1.0f64).exp())).abs() < 1e-14);
            assert!((ni.tail(y).re - (1.0f64.exp() - y.exp())).abs() < 1e-14);
        }
        let right = g.cumulative_from_right(&g.nodes.iter().map(|&x| c(x.exp())).collect::<Vec<_>>());
        for (x, v) in g.nodes.iter().zip(&right) {
            assert!((v.re - (1.0f64.exp() - x.exp())).abs() < 1e-14);
        }
    }

    #[test]
    fn running_integral_both_sides_of_anchor() {
        let br = graded_breakpoints(-1.0, 1.0, &[0.5], 0.05, 2.0, 0.25);
        let f = |x: f64| c(x.exp());
        let cu = Cumulative::new(f, br, 0.5);
        for x in [-0.9, -0.2, 0.5, 0.77, 1.0] {
            assert!((cu.eval(f, x).re - (x.exp() - 0.5f64.exp())).abs() < 1e-14);
        }
    }
}
