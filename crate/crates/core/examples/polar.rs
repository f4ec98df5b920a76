//! Polar expansion Z = H·U⁻¹ and how the factors behave under rotations and boosts.
//!
//! `cargo run --example polar`

use bispinor::clifford::DiracRep;
use bispinor::factorization::{polar_decompose, rotation_covariance_check};
use bispinor::frames::LorentzTransform;
use bispinor::linalg::random_matrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let rep = DiracRep::majorana();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let z = random_matrix(&mut rng, true);

    let p = polar_decompose(&z, rep);
    println!("|H·U⁻¹ - Z| = {:.2e}", p.reconstruction_residual(&z));
    if let Some(k) = p.coefficients {
        println!("amplitude coefficients: v0 {:+.4}, v {:+.4?}", k.v0, k.v);
        println!("  w_spatial {:+.4?}, w_time {:+.4?}", k.w_spatial, k.w_time);
    }

    let spin = rep.spatial_rotation_spinor(1, 2, 0.7);
    let (h, u) = rotation_covariance_check(&z, &spin, rep);
    println!("rotation: amplitude residual {h:.2e}, phase residual {u:.2e}");

    let boost = rep.spin_lift(LorentzTransform::boost(1, 0.5).matrix()).unwrap();
    let (h, _) = rotation_covariance_check(&z, &boost, rep);
    println!("boost: amplitude residual {h:.3} (the amplitude is not boost covariant)");
}
