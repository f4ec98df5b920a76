//! The two gamma representations, their intertwiners and the Hermitian basis.
//!
//! `cargo run --example representations`

use bispinor::clifford::{pauli_intertwiner, DiracRep, HermitianBasis16};
use bispinor::linalg::max_abs;

fn main() {
    for rep in [DiracRep::majorana(), DiracRep::dirac()] {
        println!("{}", rep.kind);
        println!("  {{γ_m, γ_n}} = 2η_mn        residual {:.2e}", rep.anticommutator_residual());
        println!("  D γ_m D⁻¹ = −γ_m⁺            residual {:.2e}", rep.intertwiner_residual());
        println!("  C γ_m C⁻¹ = γ_mᵀ             residual {:.2e}", rep.charge_conjugation_residual());
        println!("  largest imaginary entry     {:.2e}", rep.max_imaginary());
        let basis = HermitianBasis16::new(rep);
        println!("  Hermitian basis rank {}, hermiticity {:.2e}", basis.gram_rank(), basis.max_hermiticity_residual());
    }

    let (maj, dir) = (DiracRep::majorana(), DiracRep::dirac());
    let t = pauli_intertwiner(maj, dir).expect("both reps are irreducible");
    let worst = (0..4)
        .map(|a| max_abs(&(t * maj.gamma[a] * t.try_inverse().unwrap() - dir.gamma[a])))
        .fold(0.0, f64::max);
    println!("T γ_majorana T⁻¹ = γ_dirac     residual {worst:.2e}");
    println!("γ0 (majorana) ={}", maj.gamma[0]);
}
