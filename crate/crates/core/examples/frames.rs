//! World metrics, tetrads, local components and Lorentz transforms.
//!
//! `cargo run --example frames`

use bispinor::clifford::DiracRep;
use bispinor::frames::{
    apply_lorentz, tetrad_from_metric, world_to_local, AntisymmetricTensor, IndexFrame, LorentzTransform, TensorQuintuple,
    WorldMetric,
};
use bispinor::spectrum::feasibility;

fn main() {
    let g = WorldMetric::from_row_major(&[
        -1.2, 0.1, 0.0, 0.0, //
        0.1, 1.0, 0.2, 0.0, //
        0.0, 0.2, 1.5, 0.0, //
        0.0, 0.0, 0.0, 0.8,
    ])
    .unwrap();
    let t = tetrad_from_metric(&g);
    println!("metric eigenvalues {:+.4?}", g.eigenvalues());
    println!("|Hᵀ η H - g| = {:.2e}", t.metric_residual(&g));

    let mut h = AntisymmetricTensor::zero();
    h.set(0, 1, 0.2);
    let world = TensorQuintuple::real_sector([1.0, 0.1, 0.0, 0.0], h).with_frame(IndexFrame::World);
    let local = world_to_local(&world, &t).unwrap();
    println!("local j {:+.4?}", local.j);
    println!("contractions agree: {:.2e}", world.contractions(Some(&g)).max_abs_diff(&local.contractions(None)));

    let w = LorentzTransform::random(7, 1.0, true);
    let moved = world_to_local(&world, &t.transformed(&w)).unwrap();
    println!("new tetrad gives Λ·local: {:.2e}", apply_lorentz(&local, &w).unwrap().max_abs_diff(&moved));
    let rep = DiracRep::majorana();
    let (a, b) = (feasibility(&local, rep).unwrap(), feasibility(&moved, rep).unwrap());
    println!("margin {:+.6} -> {:+.6}", a.margin, b.margin);
}
