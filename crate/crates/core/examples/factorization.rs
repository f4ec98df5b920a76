//! Solving ZZ⁺ = M, the gauge freedom Z → ZU, and the discrete root family.
//!
//! `cargo run --example factorization`

use bispinor::clifford::DiracRep;
use bispinor::factorization::{bilinears, enumerate_hermitian_factors, solve_z, split_bispinors};
use bispinor::frames::{AntisymmetricTensor, TensorQuintuple};
use bispinor::linalg::{max_abs, random_unitary};
use bispinor::spectrum::{build_m, Tolerances};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let rep = DiracRep::dirac();
    let mut h = AntisymmetricTensor::zero();
    h.set(0, 1, 0.3);
    h.set(1, 3, -0.2);
    let q = TensorQuintuple { m: 0.2, n: -0.1, s: [0.0, 0.1, 0.2, 0.0], ..TensorQuintuple::real_sector([1.2, 0.1, 0.0, 0.3], h) };

    let z = solve_z(&q, rep, None).expect("feasible input");
    println!("round trip residual {:.2e}", bilinears(&z.z, rep).max_abs_diff(&q));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u = random_unitary(&mut rng, false);
    let gauged = solve_z(&q, rep, Some(&u)).unwrap();
    println!("gauge: |Z - ZU| = {:.3}, bilinears differ by {:.2e}", max_abs(&(gauged.z - z.z)), bilinears(&gauged.z, rep).max_abs_diff(&q));

    let m = build_m(&q, rep).unwrap();
    let set = enumerate_hermitian_factors(&m, &Tolerances::default()).unwrap();
    println!("rank {}: {} Hermitian roots in {} classes", set.rank, set.factors.len(), set.nonequivalent_count());
    for (signs, class) in set.sign_vectors.iter().zip(&set.class_of) {
        println!("  signs {signs:?} -> class {class}");
    }
    println!("max |F² - M| {:.2e}", set.max_residual(&m.m));

    let split = split_bispinors(&z.z, rep).unwrap();
    println!("four bispinor columns, projector residual {:.2e}, |ΣΨ - Z| {:.2e}", split.projector_residual(), max_abs(&(split.sum() - z.z)));
}
