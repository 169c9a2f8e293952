use rayleigh::studies::{run_study, StudyConfig, StudyKind};

fn criterion(kind: StudyKind) {
    let rep = run_study(&StudyConfig::new(kind)).unwrap_or_else(|e| panic!("{} FAIL: study error: {e}", kind.criterion()));
    let tag = if rep.passed() { "PASS" } else { "FAIL" };
    let detail: Vec<String> = rep
        .checks
        .iter()
        .map(|c| format!("{}{} {:.4e} {}", if c.passed { "" } else { "!" }, c.id, c.measured, c.bound))
        .collect();
    println!("{} {tag} [{}] {}", kind.criterion(), kind, detail.join("; "));
    assert!(rep.passed(), "{} failed", kind.criterion());
}

#[test]
fn a1_oracle_equivalence() {
    criterion(StudyKind::OracleVerify);
}

#[test]
fn a2_local_scalings() {
    criterion(StudyKind::LocalScaling);
}

#[test]
fn a3_dispersion_remainder() {
    criterion(StudyKind::Dispersion);
}

#[test]
fn a4_riccati_consistency() {
    criterion(StudyKind::Riccati);
}

#[test]
fn a5_green_function() {
    criterion(StudyKind::GreenResidual);
}

#[test]
fn a6_interval_expansion() {
    criterion(StudyKind::Interval);
}

#[test]
fn a7_wkbj_amplification() {
    criterion(StudyKind::Amplification);
}

#[test]
fn a8_algebraic_identities() {
    criterion(StudyKind::Identities);
}
