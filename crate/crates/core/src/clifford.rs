//! Concrete Dirac matrix representations for signature (−,+,+,+).
//!
//! Two frozen conventions are provided:
//!
//! * `MajoranaReal`, all entries real, built from `ε = iσ₂`, `σ₁`, `σ₃`:
//!   `γ₀ = ε⊗1`, `γ₁ = σ₁⊗σ₁`, `γ₂ = σ₁⊗σ₃`, `γ₃ = σ₃⊗1`.
//! * `DiracComplex`, the textbook Dirac matrices multiplied by `i`:
//!   `γ₀ = i·diag(1, 1, −1, −1)`, `γₖ = [[0, iσₖ], [−iσₖ, 0]]`.
//!
//! In both `γ₀` is anti-Hermitian and `γₖ` Hermitian, so the intertwiner `D`
//! with `Dγₖ D⁻¹ = −γₖ⁺` comes out proportional to `γ₀`.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, c, max_abs, CMat4, RMat4, C64, I};

/// Bivector index pairs in storage order.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// `S_mn = SIGMA_NORMALIZATION · [γ_m, γ_n]`.
pub const SIGMA_NORMALIZATION: f64 = 0.5;

/// Position of the pair `(a, b)`, `a < b`, in [`PAIRS`].
pub fn pair_index(a: usize, b: usize) -> Option<usize> {
    PAIRS.iter().position(|&p| p == (a, b))
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CliffordError {
    #[error("gamma matrices violate the anticommutation relation (residual {0:.3e})")]
    NotClifford(f64),
    #[error("no nonzero intertwiner solves the linear system")]
    NoIntertwiner,
    #[error("spin lift of a non-orthochronous transform is not D-unitary")]
    NotOrthochronous,
}

/// The tangent-space Minkowski metric `diag(−1, 1, 1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MinkowskiMetric;

impl MinkowskiMetric {
    pub const DIAGONAL: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

    #[inline]
    pub fn g(m: usize, n: usize) -> f64 {
        if m == n {
            Self::DIAGONAL[m]
        } else {
            0.0
        }
    }

    pub fn matrix() -> RMat4 {
        RMat4::from_diagonal(&nalgebra::Vector4::from(Self::DIAGONAL))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RepKind {
    #[default]
    MajoranaReal,
    DiracComplex,
}

impl RepKind {
    pub fn is_real(self) -> bool {
        matches!(self, RepKind::MajoranaReal)
    }

    pub fn name(self) -> &'static str {
        match self {
            RepKind::MajoranaReal => "majorana_real",
            RepKind::DiracComplex => "dirac_complex",
        }
    }
}

impl std::str::FromStr for RepKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "majorana_real" => Ok(RepKind::MajoranaReal),
            "dirac_complex" => Ok(RepKind::DiracComplex),
            other => Err(format!("unknown representation `{other}`")),
        }
    }
}

impl std::fmt::Display for RepKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A 4×4 realization of the Dirac matrices together with the derived
/// `γ₅`, `S_mn`, intertwiner `D` and charge-conjugation matrix `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracRep {
    pub kind: RepKind,
    pub gamma: [CMat4; 4],
    pub gamma5: CMat4,
    /// `S_mn` for the pairs in [`PAIRS`].
    pub sigma: [CMat4; 6],
    pub d: CMat4,
    pub d_inv: CMat4,
    /// `Cγₖ C⁻¹ = γₖᵀ`, antisymmetric `C`.
    pub c: CMat4,
    pub c_inv: CMat4,
}

fn kron2(a: [[C64; 2]; 2], b: [[C64; 2]; 2]) -> CMat4 {
    CMat4::from_fn(|r, col| a[r / 2][col / 2] * b[r % 2][col % 2])
}

fn pauli() -> ([[C64; 2]; 2], [[C64; 2]; 2], [[C64; 2]; 2], [[C64; 2]; 2]) {
    let o = c(0.0);
    let l = c(1.0);
    let one = [[l, o], [o, l]];
    let s1 = [[o, l], [l, o]];
    let s2 = [[o, -I], [I, o]];
    let s3 = [[l, o], [o, -l]];
    (one, s1, s2, s3)
}

fn majorana_gammas() -> [CMat4; 4] {
    let (one, s1, _, s3) = pauli();
    let o = c(0.0);
    let l = c(1.0);
    let eps = [[o, l], [-l, o]];
    [kron2(eps, one), kron2(s1, s1), kron2(s1, s3), kron2(s3, one)]
}

fn dirac_gammas() -> [CMat4; 4] {
    let (_, s1, s2, s3) = pauli();
    let o = c(0.0);
    let l = c(1.0);
    let g0 = kron2([[l, o], [o, -l]], [[I, o], [o, I]]);
    let block = |s: [[C64; 2]; 2]| {
        CMat4::from_fn(|r, col| {
            let (br, bc) = (r / 2, col / 2);
            let v = s[r % 2][col % 2];
            match (br, bc) {
                (0, 1) => I * v,
                (1, 0) => -I * v,
                _ => o,
            }
        })
    };
    [g0, block(s1), block(s2), block(s3)]
}

fn commutator_sigma(gamma: &[CMat4; 4], a: usize, b: usize) -> CMat4 {
    (gamma[a] * gamma[b] - gamma[b] * gamma[a]) * c(SIGMA_NORMALIZATION)
}

/// Max over `m, n` of `‖γ_mγ_n + γ_nγ_m − 2g_mn E‖`.
pub fn anticommutator_residual(gamma: &[CMat4; 4]) -> f64 {
    let mut worst = 0.0f64;
    for m in 0..4 {
        for n in 0..4 {
            let lhs = gamma[m] * gamma[n] + gamma[n] * gamma[m];
            let rhs = linalg::identity() * c(2.0 * MinkowskiMetric::g(m, n));
            worst = worst.max(max_abs(&(lhs - rhs)));
        }
    }
    worst
}

fn det_normalize(x: CMat4) -> CMat4 {
    let det = x.determinant().norm();
    x * c(det.powf(-0.25))
}

/// Rotates the overall phase so the first entry of (near) maximal modulus is
/// real and positive. Real solutions stay real.
fn phase_normalize(x: CMat4) -> CMat4 {
    let biggest = x.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    // Row-major scan for a deterministic pick.
    for r in 0..4 {
        for col in 0..4 {
            let z = x[(r, col)];
            if z.norm() >= (1.0 - 1e-9) * biggest {
                return x * (z.conj() / c(z.norm()));
            }
        }
    }
    x
}

/// Solves `Dγₖ + γₖ⁺D = 0` and fixes the scalar freedom: `D` anti-Hermitian,
/// `|det D| = 1`, and `Re Sp(γ₀D⁻¹) > 0`.
pub fn find_intertwiner(gamma: &[CMat4; 4]) -> Result<CMat4, CliffordError> {
    let lhs: Vec<CMat4> = gamma.iter().map(|g| -g.adjoint()).collect();
    let raw = linalg::solve_intertwining(&lhs, gamma).ok_or(CliffordError::NoIntertwiner)?;

    // D⁺ solves the same system, so the anti-Hermitian solutions are a real line.
    let anti = raw - raw.adjoint();
    let alt = (raw + raw.adjoint()) * I;
    let d = if max_abs(&anti) >= max_abs(&alt) { anti } else { alt };
    let d = det_normalize(d);
    let d_inv = d.try_inverse().ok_or(CliffordError::NoIntertwiner)?;
    let orientation = (gamma[0] * d_inv).trace().re;
    if orientation.abs() < 1e-9 {
        return Err(CliffordError::NoIntertwiner);
    }
    Ok(if orientation > 0.0 { d } else { -d })
}

/// Solves `Cγₖ C⁻¹ = γₖᵀ`, normalized to `|det C| = 1` with a real positive
/// leading entry.
pub fn find_charge_conjugation(gamma: &[CMat4; 4]) -> Result<CMat4, CliffordError> {
    let lhs: Vec<CMat4> = gamma.iter().map(|g| g.transpose()).collect();
    let raw = linalg::solve_intertwining(&lhs, gamma).ok_or(CliffordError::NoIntertwiner)?;
    Ok(phase_normalize(det_normalize(raw)))
}

/// Similarity `T` with `γ'ₖ = T γₖ T⁻¹` between two representations (Pauli's
/// theorem), normalized to `|det T| = 1`.
pub fn pauli_intertwiner(from: &DiracRep, to: &DiracRep) -> Result<CMat4, CliffordError> {
    let t = linalg::solve_intertwining(&to.gamma, &from.gamma).ok_or(CliffordError::NoIntertwiner)?;
    Ok(phase_normalize(det_normalize(t)))
}

impl DiracRep {
    /// Builds one of the frozen representations.
    pub fn new(kind: RepKind) -> Self {
        let gamma = match kind {
            RepKind::MajoranaReal => majorana_gammas(),
            RepKind::DiracComplex => dirac_gammas(),
        };
        Self::from_gammas(kind, gamma).expect("frozen representation is valid")
    }

    /// Shared instance of the Majorana representation.
    pub fn majorana() -> &'static DiracRep {
        static REP: OnceLock<DiracRep> = OnceLock::new();
        REP.get_or_init(|| DiracRep::new(RepKind::MajoranaReal))
    }

    pub fn dirac() -> &'static DiracRep {
        static REP: OnceLock<DiracRep> = OnceLock::new();
        REP.get_or_init(|| DiracRep::new(RepKind::DiracComplex))
    }

    pub fn shared(kind: RepKind) -> &'static DiracRep {
        match kind {
            RepKind::MajoranaReal => Self::majorana(),
            RepKind::DiracComplex => Self::dirac(),
        }
    }

    /// Completes a representation from arbitrary gamma matrices. `kind` is a
    /// label only; it is not checked against the entries.
    pub fn from_gammas(kind: RepKind, gamma: [CMat4; 4]) -> Result<Self, CliffordError> {
        let residual = anticommutator_residual(&gamma);
        if residual > 1e-9 {
            return Err(CliffordError::NotClifford(residual));
        }
        let gamma5 = gamma[0] * gamma[1] * gamma[2] * gamma[3];
        let sigma = PAIRS.map(|(a, b)| commutator_sigma(&gamma, a, b));
        let d = find_intertwiner(&gamma)?;
        let d_inv = d.try_inverse().ok_or(CliffordError::NoIntertwiner)?;
        let cc = find_charge_conjugation(&gamma)?;
        let c_inv = cc.try_inverse().ok_or(CliffordError::NoIntertwiner)?;
        Ok(DiracRep { kind, gamma, gamma5, sigma, d, d_inv, c: cc, c_inv })
    }

    /// `T γₖ T⁻¹` for every generator, with `D` and `C` re-derived.
    pub fn conjugated(&self, t: &CMat4) -> Result<Self, CliffordError> {
        let t_inv = t.try_inverse().ok_or(CliffordError::NoIntertwiner)?;
        let gamma = self.gamma.map(|g| t * g * t_inv);
        Self::from_gammas(self.kind, gamma)
    }

    /// `γ^a = g^{aa} γ_a`.
    pub fn gamma_upper(&self, a: usize) -> CMat4 {
        self.gamma[a] * c(MinkowskiMetric::g(a, a))
    }

    /// `S_ab` for any ordered pair; zero on the diagonal.
    pub fn sigma_pair(&self, a: usize, b: usize) -> CMat4 {
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => linalg::zeros(),
            std::cmp::Ordering::Less => self.sigma[pair_index(a, b).unwrap()],
            std::cmp::Ordering::Greater => -self.sigma[pair_index(b, a).unwrap()],
        }
    }

    pub fn anticommutator_residual(&self) -> f64 {
        anticommutator_residual(&self.gamma)
    }

    /// Max over k of `‖Dγₖ D⁻¹ + γₖ⁺‖`.
    pub fn intertwiner_residual(&self) -> f64 {
        self.gamma
            .iter()
            .map(|g| max_abs(&(self.d * g * self.d_inv + g.adjoint())))
            .fold(0.0, f64::max)
    }

    /// `max(‖D + D⁺‖, ‖D⁻¹ + (D⁻¹)⁺‖)`.
    pub fn anti_hermitian_residual(&self) -> f64 {
        max_abs(&(self.d + self.d.adjoint())).max(max_abs(&(self.d_inv + self.d_inv.adjoint())))
    }

    pub fn charge_conjugation_residual(&self) -> f64 {
        self.gamma
            .iter()
            .map(|g| max_abs(&(self.c * g * self.c_inv - g.transpose())))
            .fold(0.0, f64::max)
    }

    /// Largest imaginary part over all gamma matrices.
    pub fn max_imaginary(&self) -> f64 {
        self.gamma.iter().map(linalg::max_imag).fold(0.0, f64::max)
    }

    /// Spin matrix `L` of a Lorentz matrix `w`, defined by
    /// `L⁻¹ γ^a L = w^a_b γ^b` and normalized so that `L⁺ D L = D`.
    ///
    /// For spatial rotations `L` is unitary (orthogonal in the Majorana
    /// representation); for boosts it is not. The overall sign is convention.
    pub fn spin_lift(&self, w: &RMat4) -> Result<CMat4, CliffordError> {
        let lhs: Vec<CMat4> = (0..4).map(|a| self.gamma_upper(a)).collect();
        let rhs: Vec<CMat4> = (0..4)
            .map(|a| (0..4).fold(linalg::zeros(), |acc, b| acc + self.gamma_upper(b) * c(w[(a, b)])))
            .collect();
        let raw = linalg::solve_intertwining(&lhs, &rhs).ok_or(CliffordError::NoIntertwiner)?;
        let scale = (self.d_inv * raw.adjoint() * self.d * raw).trace().re / 4.0;
        if scale <= 0.0 {
            return Err(CliffordError::NotOrthochronous);
        }
        Ok(phase_normalize(raw * c(scale.sqrt().recip())))
    }

    /// Spin matrix of the rotation by `angle` in the spatial `(a, b)` plane,
    /// `exp(½·angle·γ_aγ_b)`.
    pub fn spatial_rotation_spinor(&self, a: usize, b: usize, angle: f64) -> CMat4 {
        let generator = self.gamma[a] * self.gamma[b];
        linalg::identity() * c((angle / 2.0).cos()) + generator * c((angle / 2.0).sin())
    }
}

/// The 16 Hermitian matrices
/// `−iD⁻¹; γ_αD⁻¹; −iγ₅γ_αD⁻¹; −S_αβD⁻¹; iγ₅D⁻¹` in that order, with the
/// trace Gram matrix `Sp(B_i B_j)`.
#[derive(Debug, Clone)]
pub struct HermitianBasis16 {
    pub elements: [CMat4; 16],
    pub gram: DMatrix<C64>,
}

impl HermitianBasis16 {
    pub fn new(rep: &DiracRep) -> Self {
        let di = rep.d_inv;
        let mut elements = [linalg::zeros(); 16];
        elements[0] = di * -I;
        for a in 0..4 {
            elements[1 + a] = rep.gamma[a] * di;
            elements[5 + a] = rep.gamma5 * rep.gamma[a] * di * -I;
        }
        for (k, s) in rep.sigma.iter().enumerate() {
            elements[9 + k] = -s * di;
        }
        elements[15] = rep.gamma5 * di * I;
        let gram = DMatrix::from_fn(16, 16, |i, j| (elements[i] * elements[j]).trace());
        HermitianBasis16 { elements, gram }
    }

    pub fn max_hermiticity_residual(&self) -> f64 {
        self.elements.iter().map(linalg::hermiticity_residual).fold(0.0, f64::max)
    }

    /// Numerical rank of the Gram matrix.
    pub fn gram_rank(&self) -> usize {
        let sv = self.gram.clone().singular_values();
        let top = sv.iter().cloned().fold(0.0, f64::max);
        sv.iter().filter(|&&s| s > 1e-10 * top).count()
    }

    /// Expansion coefficients of `x` in this basis via a Gram solve. Real for
    /// Hermitian `x`.
    pub fn coefficients(&self, x: &CMat4) -> Option<Vec<C64>> {
        let rhs = nalgebra::DVector::from_fn(16, |i, _| (self.elements[i] * x).trace());
        let sol = self.gram.clone().lu().solve(&rhs)?;
        Some(sol.iter().cloned().collect())
    }

    pub fn combine(&self, coeffs: &[C64]) -> CMat4 {
        self.elements.iter().zip(coeffs).fold(linalg::zeros(), |acc, (b, k)| acc + b * *k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_exactly_real, random_hermitian, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const KINDS: [RepKind; 2] = [RepKind::MajoranaReal, RepKind::DiracComplex];

    fn is_antisymmetric(m: &CMat4) -> bool {
        max_abs(&(m + m.transpose())) < 1e-12
    }

    fn is_symmetric(m: &CMat4) -> bool {
        max_abs(&(m - m.transpose())) < 1e-12
    }

    #[test]
    fn squares_follow_metric() {
        let maj = DiracRep::new(RepKind::MajoranaReal);
        assert!(max_abs(&(maj.gamma[0] * maj.gamma[0] + linalg::identity())) == 0.0);
        assert!(max_abs(&(maj.gamma[1] * maj.gamma[1] - linalg::identity())) == 0.0);
        let dir = DiracRep::new(RepKind::DiracComplex);
        assert!(max_abs(&(dir.gamma5 * dir.gamma5 + linalg::identity())) < 1e-15);
    }

    #[test]
    fn representation_invariants() {
        for kind in KINDS {
            let rep = DiracRep::new(kind);
            assert!(rep.anticommutator_residual() < 1e-12);
            assert!(rep.intertwiner_residual() < 1e-12);
            assert!(rep.anti_hermitian_residual() < 1e-12);
            assert!(rep.charge_conjugation_residual() < 1e-12);
            assert!((rep.d.determinant().norm() - 1.0).abs() < 1e-12);
            for (k, &(a, b)) in PAIRS.iter().enumerate() {
                let comm = (rep.gamma[a] * rep.gamma[b] - rep.gamma[b] * rep.gamma[a]) * c(0.5);
                assert!(max_abs(&(rep.sigma[k] - comm)) < 1e-15);
                assert!(max_abs(&(rep.sigma_pair(b, a) + rep.sigma[k])) == 0.0);
            }
        }
    }

    #[test]
    fn build_is_deterministic() {
        for kind in KINDS {
            assert_eq!(DiracRep::new(kind), DiracRep::new(kind));
        }
    }

    #[test]
    fn majorana_is_real_and_d_is_antisymmetric() {
        let rep = DiracRep::new(RepKind::MajoranaReal);
        assert_eq!(rep.max_imaginary(), 0.0);
        assert!(is_exactly_real(&rep.d));
        assert!(is_antisymmetric(&rep.d));
        // D = γ₀ under the orientation convention.
        assert!(max_abs(&(rep.d - rep.gamma[0])) < 1e-12);
    }

    #[test]
    fn dirac_d_has_positive_imaginary_leading_entry() {
        let rep = DiracRep::new(RepKind::DiracComplex);
        let first = rep.d.transpose().iter().cloned().find(|z| z.norm() > 1e-12).unwrap();
        assert!(first.re.abs() < 1e-12 && first.im > 0.0);
    }

    #[test]
    fn table_one_symmetry_pattern() {
        let rep = DiracRep::new(RepKind::MajoranaReal);
        let (di, ci) = (rep.d_inv, rep.c_inv);
        // System 1.
        for k in 0..4 {
            assert!(is_symmetric(&(rep.gamma[k] * di)));
            assert!(is_antisymmetric(&(rep.gamma5 * rep.gamma[k] * di)));
        }
        for s in &rep.sigma {
            assert!(is_symmetric(&(s * di)));
        }
        assert!(is_antisymmetric(&di));
        assert!(is_antisymmetric(&(rep.gamma5 * di)));
        // System 2.
        for k in 0..4 {
            assert!(is_symmetric(&(rep.gamma5 * rep.gamma[k] * ci)));
            assert!(is_antisymmetric(&(rep.gamma[k] * ci)));
        }
        for s in &rep.sigma {
            assert!(is_symmetric(&(s * ci)));
        }
        assert!(is_antisymmetric(&ci));
        assert!(is_antisymmetric(&(rep.gamma5 * ci)));
    }

    #[test]
    fn intertwiner_transforms_under_unitary_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for kind in KINDS {
            let rep = DiracRep::new(kind);
            for _ in 0..100 {
                let t = random_unitary(&mut rng, false);
                let conj = rep.conjugated(&t).unwrap();
                let t_inv = t.try_inverse().unwrap();
                let expected = t_inv.adjoint() * rep.d * t_inv;
                assert!(max_abs(&(conj.d - expected)) < 1e-10);
            }
        }
    }

    #[test]
    fn pauli_theorem_finds_nonsingular_similarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let maj = DiracRep::new(RepKind::MajoranaReal);
        let dir = DiracRep::new(RepKind::DiracComplex);
        let t = pauli_intertwiner(&maj, &dir).unwrap();
        let t_inv = t.try_inverse().unwrap();
        for k in 0..4 {
            assert!(max_abs(&(t * maj.gamma[k] * t_inv - dir.gamma[k])) < 1e-10);
        }
        let other = maj.conjugated(&random_unitary(&mut rng, true)).unwrap();
        let t = pauli_intertwiner(&maj, &other).unwrap();
        assert!(t.determinant().norm() > 0.5);
    }

    #[test]
    fn basis_is_hermitian_and_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for kind in KINDS {
            let rep = DiracRep::new(kind);
            let basis = HermitianBasis16::new(&rep);
            assert!(basis.max_hermiticity_residual() < 1e-12);
            assert_eq!(basis.gram_rank(), 16);
            for b in &basis.elements {
                let t = (b * b).trace();
                assert!(t.im.abs() < 1e-12 && t.re.abs() > 1e-12);
            }
            for _ in 0..20 {
                let x = random_hermitian(&mut rng, false);
                let coeffs = basis.coefficients(&x).unwrap();
                assert!(coeffs.iter().all(|k| k.im.abs() < 1e-10));
                assert!(max_abs(&(basis.combine(&coeffs) - x)) < 1e-10);
            }
        }
    }

    #[test]
    fn rotation_spinor_matches_lifted_rotation() {
        let rep = DiracRep::new(RepKind::MajoranaReal);
        let angle: f64 = 0.7;
        let mut w = RMat4::identity();
        // Rotation in the (1, 2) plane acting on vectors.
        w[(1, 1)] = angle.cos();
        w[(1, 2)] = -angle.sin();
        w[(2, 1)] = angle.sin();
        w[(2, 2)] = angle.cos();
        let lifted = rep.spin_lift(&w).unwrap();
        assert!(linalg::unitarity_residual(&lifted) < 1e-12);
        assert!(is_exactly_real(&linalg::complexify(&linalg::real_part(&lifted))));
        let l_inv = lifted.try_inverse().unwrap();
        for a in 0..4 {
            let rhs = (0..4).fold(linalg::zeros(), |acc, b| acc + rep.gamma_upper(b) * c(w[(a, b)]));
            assert!(max_abs(&(l_inv * rep.gamma_upper(a) * lifted - rhs)) < 1e-12);
        }
        // The explicit exponential agrees with the lift up to the double-cover sign.
        let direct = rep.spatial_rotation_spinor(1, 2, angle);
        let d_inv = direct.try_inverse().unwrap();
        let image: Vec<CMat4> = (0..4).map(|a| d_inv * rep.gamma_upper(a) * direct).collect();
        let lift_image: Vec<CMat4> = (0..4).map(|a| l_inv * rep.gamma_upper(a) * lifted).collect();
        let agree = image.iter().zip(&lift_image).all(|(x, y)| max_abs(&(x - y)) < 1e-12);
        let reversed = {
            let direct = rep.spatial_rotation_spinor(1, 2, -angle);
            let d_inv = direct.try_inverse().unwrap();
            (0..4).all(|a| max_abs(&(d_inv * rep.gamma_upper(a) * direct - lift_image[a])) < 1e-12)
        };
        assert!(agree || reversed);
    }
}
