mod common;

fn check(name: &str) {
    let prop = common::suite()
        .into_iter()
        .find(|p| p.name == name)
        .expect("known property");
    if let Err(e) = prop.check() {
        panic!("{name}: {e}");
    }
}

#[test]
fn localization_and_odd_closed_forms() {
    check("localization-and-odd-closed-forms");
}

#[test]
fn trace_identity() {
    check("trace-identity");
}

#[test]
fn eta_involution_equivalence_monotone() {
    check("eta-involution-equivalence-monotone");
}

#[test]
fn eta_derivative_bounds() {
    check("eta-derivative-bounds");
}

#[test]
fn certified_error_soundness() {
    check("certified-error-soundness");
}

#[test]
fn half_weight_collapse() {
    check("half-weight-collapse");
}

#[test]
fn complex_alpha_charpoly_invariance() {
    check("complex-alpha-charpoly-invariance");
}

#[test]
fn charpoly_factorization() {
    check("charpoly-factorization");
}

#[test]
fn determinant_equivalence() {
    check("determinant-equivalence");
}

#[test]
fn alpha_monotonicity() {
    check("alpha-monotonicity");
}

#[test]
fn eigenvector_residual_and_norm() {
    check("eigenvector-residual-and-norm");
}
