use super::*;
use crate::global::{dispersion_ratio, interval_expansion, interval_omega, leading_integral, ratio_expansion, RiccatiState};

/// Checks that consecutive rows with `alpha` halving have a remainder ratio in `[lo, hi]`.
fn halving_checks(rep: &mut StudyReport, id: &str, what: &str, lo: f64, hi: f64, alpha_col: usize, err_col: usize) {
    let rows = rep.table.rows.clone();
    for w in rows.windows(2) {
        let (a0, a1) = (w[0][alpha_col], w[1][alpha_col]);
        if (a0 / a1 - 2.0).abs() > 1e-12 {
            continue;
        }
        let ratio = w[0][err_col] / w[1][err_col];
        rep.values.insert(format!("ratio_{a0}_{a1}"), ratio);
        rep.checks.push(Check::within(&format!("{id}.{a0}"), &format!("{what} ratio from alpha = {a0} to {a1}"), ratio, lo, hi));
    }
}

/// Dispersion ratio against its small-alpha expansion.
pub(super) fn dispersion(cfg: &StudyConfig) -> Result<StudyReport> {
    let p = cfg.profile_or("exp_decay")?;
    let c = cfg.c_or(0.3, 0.2);
    let alphas = cfg.grid.alpha.clone().unwrap_or_else(|| vec![0.1, 0.05]);
    let mut cols = vec![col("alpha", "wavenumber")];
    cols.extend(complex_cols("ratio", "psi_-'(0)/psi_-(0)"));
    cols.extend(complex_cols("expansion", "two-term expansion of the ratio"));
    cols.push(col("remainder", "|ratio - expansion|"));
    let mut table = Table::new(cols);
    table.rows = par_map(&alphas, |&a| {
        let r = dispersion_ratio(&p, a, c, None)?;
        let e = ratio_expansion(&p, a, c)?;
        Ok(vec![a, r.re, r.im, e.re, e.im, (r - e).norm()])
    })?;
    let mut rep = StudyReport::new(StudyKind::Dispersion, table);
    halving_checks(&mut rep, "A3", "remainder", 4.0, 16.0, 0, 5);
    Ok(rep)
}

/// Riccati residual of the Miles variable along `psi_-` and its limit at `y_max`.
pub(super) fn riccati(cfg: &StudyConfig) -> Result<StudyReport> {
    let p = cfg.profile_or("exp_decay")?;
    let c = cfg.c_or(0.3, 0.2);
    let alphas = cfg.grid.alpha.clone().unwrap_or_else(|| vec![0.1]);
    let h = 1e-4;
    let ys = linspace(1.0, 10.0, 90);
    let mut cols = vec![col("alpha", "wavenumber"), col("y", "position")];
    cols.extend(complex_cols("omega", "Miles variable"));
    cols.push(col("riccati_residual", "|Omega' - alpha^2 Y Omega^2 + 1/Y|, central difference with h = 1e-4"));
    let mut table = Table::new(cols);
    let per = par_map(&alphas, |&a| {
        let rs = RiccatiState::new(&p, a, c, None)?;
        let mut rows = Vec::new();
        for &y in &ys {
            let o = rs.omega_big(y)?;
            rows.push(vec![a, y, o.re, o.im, rs.riccati_residual(y, h)?]);
        }
        let lim = (rs.omega_big(rs.y_max())? - rs.omega_limit()).norm();
        Ok((rows, lim))
    })?;
    let mut lim_worst = 0.0f64;
    for (rows, lim) in per {
        table.rows.extend(rows);
        lim_worst = lim_worst.max(lim);
    }
    let worst = table.rows.iter().map(|r| r[4]).fold(0.0, f64::max);
    let mut rep = StudyReport::new(StudyKind::Riccati, table);
    rep.values.insert("max_riccati_residual".into(), worst);
    rep.values.insert("limit_error".into(), lim_worst);
    rep.checks.push(Check::at_most("A4.residual", "max Riccati residual on [1, 10]", worst, 1e-6));
    rep.checks.push(Check::at_most("A4.limit", "|Omega(y_max) - 1/(alpha (U+ - c)^2)|", lim_worst, 1e-6));
    Ok(rep)
}

/// Even solution on `[-1, 1]`: Riccati value at 1 against the two-term expansion.
pub(super) fn interval(cfg: &StudyConfig) -> Result<StudyReport> {
    let p = cfg.profile_or("even_poly:1,-1")?;
    let c = cfg.c_or(2.0, 0.5);
    let alphas = cfg.grid.alpha.clone().unwrap_or_else(|| vec![0.1, 0.05]);
    let mut cols = vec![col("alpha", "wavenumber")];
    cols.extend(complex_cols("omega", "omega(1) from the Riccati integration"));
    cols.extend(complex_cols("expansion", "-alpha^2 int Y + alpha^4 int omega_2^2 / Y"));
    cols.push(col("difference", "|omega - expansion|"));
    let mut table = Table::new(cols);
    table.rows = par_map(&alphas, |&a| {
        let o = interval_omega(&p, a, c)?;
        let e = interval_expansion(&p, a, c)?;
        Ok(vec![a, o.re, o.im, e.re, e.im, (o - e).norm()])
    })?;
    let mut rep = StudyReport::new(StudyKind::Interval, table);
    halving_checks(&mut rep, "A6", "difference", 32.0, 128.0, 0, 5);
    if let (Some(&a), true) = (alphas.first(), !rep.table.rows.is_empty()) {
        // Leading term at the real part of c against the exact integral for U = 1 - y^2.
        let real = cplx(c.re, 0.0);
        let lead = leading_integral(&p, real)? * (-a * a);
        rep.values.insert("leading_term".into(), lead.re);
        if cfg.profile.is_none() && c.re == 2.0 {
            let err = (lead - cplx(-a * a * 28.0 / 15.0, 0.0)).norm();
            rep.checks.push(Check::at_most("A6.leading", "|leading term + alpha^2 28/15| at c = 2", err, 1e-8));
        }
    }
    Ok(rep)
}
