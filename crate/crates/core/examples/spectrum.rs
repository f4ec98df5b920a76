//! Closed-form and numeric spectrum of M, and the feasibility margin.
//!
//! `cargo run --example spectrum`

use bispinor::clifford::DiracRep;
use bispinor::frames::{AntisymmetricTensor, LorentzTransform, TensorQuintuple, apply_lorentz};
use bispinor::spectrum::{build_m, closed_form_spectrum, feasibility, kappa, numeric_spectrum, to_rest_frame};

fn show(label: &str, q: &TensorQuintuple, rep: &DiracRep) {
    let numeric = numeric_spectrum(&build_m(q, rep).unwrap()).unwrap();
    let f = feasibility(q, rep).unwrap();
    println!("{label}");
    println!("  numeric                {numeric:+.6?}");
    if let Ok(cf) = closed_form_spectrum(q) {
        println!("  rest-frame closed form {:+.6?}", cf.lambda);
        println!("  |j| = {:.4}, u² = {:.4}, v² = {:.4}, w = {:.4}", cf.invariants.j, cf.invariants.u2, cf.invariants.v2, cf.invariants.w);
    }
    println!("  feasible {} margin {:+.6} rank {} ({:?})", f.feasible, f.margin, f.rank, f.reason);
}

fn main() {
    let rep = DiracRep::majorana();
    println!("κ = {}", kappa());

    let mut h = AntisymmetricTensor::zero();
    h.set(0, 1, 0.4);
    h.set(2, 3, 0.3);
    let q = TensorQuintuple::real_sector([1.0, 0.0, 0.0, 0.0], h);
    show("rest frame, small H", &q, rep);

    let mut big = h;
    big.set(1, 2, 1.5);
    show("rest frame, H dominates", &TensorQuintuple::real_sector([1.0, 0.0, 0.0, 0.0], big), rep);

    // a boost keeps the margin and the inertia but not the eigenvalues
    let moving = apply_lorentz(&q, &LorentzTransform::boost(3, 0.8)).unwrap();
    show("boosted along z", &moving, rep);
    show("boosted back to rest", &to_rest_frame(&moving).unwrap(), rep);
}
