//! Real Majorana fields: Dirac-basis expansion of a symmetric Z and the
//! normalized quadratic system for the current and H.
//!
//! `cargo run --example reduction`

use bispinor::clifford::DiracRep;
use bispinor::factorization::bilinears;
use bispinor::frames::{AntisymmetricTensor, TensorQuintuple};
use bispinor::linalg::random_hermitian;
use bispinor::reduction::{compose_zzplus, expand_z, normalize_system, solve_normalized};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let rep = DiracRep::majorana();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let z = random_hermitian(&mut rng, true);
    let e = expand_z(&z, rep).unwrap();
    println!("expansion: a {:+.4}, a0 {:+.4}, a_k {:+.4?}, c_k {:+.4?}", e.a, e.a0, e.a_k, e.c_k);
    let composed = compose_zzplus(&e);
    println!("composed vs direct bilinears: {:.2e}", composed.real_part().max_abs_diff(&bilinears(&z, rep).real_part()));

    let mut h = AntisymmetricTensor::zero();
    h.set(0, 2, 0.3);
    h.set(1, 3, 0.2);
    for (label, j0) in [("feasible", 2.0), ("infeasible", 0.3)] {
        let q = TensorQuintuple::real_sector([j0, 0.2, 0.0, 0.1], h);
        let s = normalize_system(&q).unwrap();
        match solve_normalized(&s) {
            Ok(sol) => println!("{label}: a {:+.4} x {:+.4?} ({:?}, residual {:.2e})", sol.a, sol.x, sol.method, sol.max_residual()),
            Err(e) => println!("{label}: {e}"),
        }
    }
}
