//! Factoring `M = ZZ⁺`: the arithmetic root, the finite set of Hermitian
//! factors, bilinear extraction, polar expansion and the four-column split.

use nalgebra::DMatrix;

use crate::clifford::{DiracRep, RepKind, PAIRS};
use crate::frames::{AntisymmetricTensor, IndexFrame, TensorQuintuple};
use crate::linalg::{self, c, max_abs, CMat4, NoConvergence, C64, I};
use crate::spectrum::{self, build_m, rank_of, MMatrix, SpectrumError, Tolerances};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FactorError {
    #[error("matrix is not nonnegative (min eigenvalue {0:.6e})")]
    NotNonnegative(f64),
    #[error("no bispinor matrix exists: feasibility margin {margin:.6e}")]
    Infeasible { margin: f64 },
    #[error("gauge matrix is not unitary (residual {0:.3e})")]
    NotUnitary(f64),
    #[error("the real representation needs a real orthogonal gauge matrix")]
    GaugeNotReal,
    #[error("projector involutions do not commute or square to E (residual {0:.3e})")]
    ProjectorConstructionFailed(f64),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    NoConvergence(#[from] NoConvergence),
}

/// Eigenvalues below this are an error for square roots; above it (and below
/// zero) they are clamped.
pub const NEGATIVE_EIGENVALUE_LIMIT: f64 = 1e-8;

/// A 4×4 bispinor matrix `Z` with the gauge matrix that produced it, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct BispinorMatrix {
    pub z: CMat4,
    pub rep_kind: RepKind,
    pub gauge: Option<CMat4>,
}

impl BispinorMatrix {
    pub fn new(z: CMat4, rep_kind: RepKind) -> Self {
        Self { z, rep_kind, gauge: None }
    }

    /// `ZZ⁺`.
    pub fn product(&self) -> CMat4 {
        self.z * self.z.adjoint()
    }

    /// `Z·U`; the gauge record is composed.
    pub fn gauged(&self, u: &CMat4) -> Self {
        let gauge = Some(self.gauge.map_or(*u, |g| g * u));
        Self { z: self.z * u, rep_kind: self.rep_kind, gauge }
    }
}

/// The unique nonnegative Hermitian root of `M`.
pub fn hermitian_sqrt(m: &MMatrix) -> Result<CMat4, FactorError> {
    sqrt_of(&m.m)
}

pub fn sqrt_of(m: &CMat4) -> Result<CMat4, FactorError> {
    let (values, vectors) = linalg::hermitian_eigen(m)?;
    if values[3] < -NEGATIVE_EIGENVALUE_LIMIT {
        return Err(FactorError::NotNonnegative(values[3]));
    }
    let roots = values.map(|l| l.max(0.0).sqrt());
    Ok(from_eigen(&vectors, &roots.into()))
}

fn from_eigen(vectors: &CMat4, diag: &[f64; 4]) -> CMat4 {
    let scaled = CMat4::from_fn(|r, col| vectors[(r, col)] * diag[col]);
    linalg::hermitian_part(&(scaled * vectors.adjoint()))
}

/// Hermitian factors `H_ε = V·diag(ε_i√λ_i)·V⁺` of `M`, grouped into unitary
/// equivalence classes by their eigenvalue multisets.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianFactorSet {
    pub rank: usize,
    pub factors: Vec<CMat4>,
    /// One entry per factor, `±1` for each nonzero eigenvalue of `M` in
    /// descending order. Enumerated in binary order, `+` first.
    pub sign_vectors: Vec<Vec<i8>>,
    /// Class index of each factor.
    pub class_of: Vec<usize>,
    /// Sorted eigenvalue multiset of each class.
    pub classes: Vec<[f64; 4]>,
}

impl HermitianFactorSet {
    pub fn nonequivalent_count(&self) -> usize {
        self.classes.len()
    }

    /// Max `‖HH⁺ − M‖` over the factors.
    pub fn max_residual(&self, m: &CMat4) -> f64 {
        self.factors.iter().map(|h| max_abs(&(h * h.adjoint() - m))).fold(0.0, f64::max)
    }
}

pub const MULTISET_TOLERANCE: f64 = 1e-9;

pub fn enumerate_hermitian_factors(m: &MMatrix, tol: &Tolerances) -> Result<HermitianFactorSet, FactorError> {
    enumerate_factors_of(&m.m, tol)
}

pub fn enumerate_factors_of(m: &CMat4, tol: &Tolerances) -> Result<HermitianFactorSet, FactorError> {
    let (values, vectors) = linalg::hermitian_eigen(m)?;
    if values[3] < -NEGATIVE_EIGENVALUE_LIMIT {
        return Err(FactorError::NotNonnegative(values[3]));
    }
    let lambda = [values[0], values[1], values[2], values[3]];
    let rank = rank_of(&lambda, tol.rank);
    let roots = lambda.map(|l| l.max(0.0).sqrt());

    let mut set = HermitianFactorSet { rank, factors: vec![], sign_vectors: vec![], class_of: vec![], classes: vec![] };
    for code in 0..(1usize << rank) {
        let signs: Vec<i8> = (0..rank).map(|i| if code >> (rank - 1 - i) & 1 == 1 { -1 } else { 1 }).collect();
        let mut diag = [0.0; 4];
        for i in 0..rank {
            diag[i] = f64::from(signs[i]) * roots[i];
        }
        let mut multiset = diag;
        multiset.sort_by(|a, b| b.total_cmp(a));
        let class = match set.classes.iter().position(|k| same_multiset(k, &multiset)) {
            Some(idx) => idx,
            None => {
                set.classes.push(multiset);
                set.classes.len() - 1
            }
        };
        set.factors.push(from_eigen(&vectors, &diag));
        set.sign_vectors.push(signs);
        set.class_of.push(class);
    }
    Ok(set)
}

fn same_multiset(a: &[f64; 4], b: &[f64; 4]) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= MULTISET_TOLERANCE)
}

/// `Z = √M · U` for a feasible quintuple.
pub fn solve_z(q: &TensorQuintuple, rep: &DiracRep, gauge: Option<&CMat4>) -> Result<BispinorMatrix, FactorError> {
    solve_z_with(q, rep, gauge, &Tolerances::default())
}

pub fn solve_z_with(
    q: &TensorQuintuple,
    rep: &DiracRep,
    gauge: Option<&CMat4>,
    tol: &Tolerances,
) -> Result<BispinorMatrix, FactorError> {
    let feas = spectrum::feasibility_with(q, rep, tol)?;
    if !feas.feasible {
        return Err(FactorError::Infeasible { margin: feas.margin });
    }
    if let Some(u) = gauge {
        check_gauge(u, rep.kind)?;
    }
    let m = build_m(q, rep)?;
    let h = hermitian_sqrt(&m)?;
    let z = BispinorMatrix::new(h, rep.kind);
    Ok(match gauge {
        Some(u) => z.gauged(u),
        None => z,
    })
}

pub fn check_gauge(u: &CMat4, kind: RepKind) -> Result<(), FactorError> {
    let residual = linalg::unitarity_residual(u);
    if residual.is_nan() || residual >= 1e-8 {
        return Err(FactorError::NotUnitary(residual));
    }
    if kind.is_real() && !linalg::is_exactly_real(u) {
        return Err(FactorError::GaugeNotReal);
    }
    Ok(())
}

/// `m = iSp(Z⁺DZ)`, `jᵅ = Sp(Z⁺Dγᵅ Z)`, `s_α = iSp(Z⁺Dγ₅γ_αZ)`,
/// `H_αβ = Sp(Z⁺DS_αβZ)`, `n = iSp(Z⁺Dγ₅Z)`.
pub fn bilinears(z: &CMat4, rep: &DiracRep) -> TensorQuintuple {
    bilinears_with_residual(z, rep).0
}

/// Bilinears together with the largest discarded imaginary part.
pub fn bilinears_with_residual(z: &CMat4, rep: &DiracRep) -> (TensorQuintuple, f64) {
    let zd = z.adjoint();
    let sp = |a: &CMat4| (zd * rep.d * a * z).trace();
    let mut worst = 0.0f64;
    let mut take = |x: C64| {
        worst = worst.max(x.im.abs());
        x.re
    };
    let m = take(I * sp(&linalg::identity()));
    let j: [f64; 4] = std::array::from_fn(|a| take(sp(&rep.gamma_upper(a))));
    let s: [f64; 4] = std::array::from_fn(|a| take(I * sp(&(rep.gamma5 * rep.gamma[a]))));
    let h = AntisymmetricTensor(std::array::from_fn(|k| take(sp(&rep.sigma[k]))));
    let n = take(I * sp(&rep.gamma5));
    (TensorQuintuple { m, j, s, h, n, frame: IndexFrame::Local }, worst)
}

/// Max componentwise difference between `q` and the bilinears of its
/// arithmetic-root `Z`.
pub fn roundtrip_residual(q: &TensorQuintuple, rep: &DiracRep) -> Result<f64, FactorError> {
    roundtrip_residual_with(q, rep, &Tolerances::default())
}

pub fn roundtrip_residual_with(q: &TensorQuintuple, rep: &DiracRep, tol: &Tolerances) -> Result<f64, FactorError> {
    let z = solve_z_with(q, rep, None, tol)?;
    Ok(bilinears(&z.z, rep).max_abs_diff(q))
}

/// Coefficients of the amplitude in the system-1 symmetric basis:
/// `H = −v₀γ₀D⁻¹ + v_bγ_bD⁻¹ + w_abS_abD⁻¹ − 2w_0bS_0bD⁻¹`, with `a, b`
/// summed over spatial indices (ordered pairs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeCoefficients {
    pub v0: f64,
    pub v: [f64; 3],
    /// `w_12, w_13, w_23`.
    pub w_spatial: [f64; 3],
    /// `w_01, w_02, w_03`.
    pub w_time: [f64; 3],
}

/// `Z = H·U⁻¹` with `H` the nonnegative root of `ZZ⁺`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarFactors {
    pub amplitude: CMat4,
    /// `U⁻¹`.
    pub phase: CMat4,
    /// Present for the real representation, where the amplitude is symmetric.
    pub coefficients: Option<AmplitudeCoefficients>,
}

impl PolarFactors {
    pub fn reconstruction_residual(&self, z: &CMat4) -> f64 {
        max_abs(&(self.amplitude * self.phase - z))
    }
}

/// Polar expansion via the singular value decomposition `Z = WΣV⁺`:
/// amplitude `WΣW⁺`, phase `WV⁺`. For singular `Z` the phase is one valid
/// completion; only the amplitude is unique.
pub fn polar_decompose(z: &CMat4, rep: &DiracRep) -> PolarFactors {
    let (amplitude, phase) = if linalg::is_exactly_real(z) {
        let svd = linalg::real_part(z).svd(true, true);
        let (w, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
        let sigma = nalgebra::Matrix4::from_diagonal(&svd.singular_values);
        let amp = w * sigma * w.transpose();
        (linalg::complexify(&((amp + amp.transpose()) * 0.5)), linalg::complexify(&(w * vt)))
    } else {
        let svd = z.svd(true, true);
        let (w, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
        let sigma = CMat4::from_diagonal(&svd.singular_values.map(c));
        (linalg::hermitian_part(&(w * sigma * w.adjoint())), w * vt)
    };
    let coefficients = (rep.kind.is_real() && linalg::is_exactly_real(&amplitude))
        .then(|| amplitude_coefficients(&amplitude, rep))
        .flatten();
    PolarFactors { amplitude, phase, coefficients }
}

/// System-1 symmetric basis `γ_αD⁻¹` (4) and `S_mnD⁻¹` (6).
pub fn symmetric_basis(rep: &DiracRep) -> [CMat4; 10] {
    let mut out = [linalg::zeros(); 10];
    for a in 0..4 {
        out[a] = rep.gamma[a] * rep.d_inv;
    }
    for k in 0..6 {
        out[4 + k] = rep.sigma[k] * rep.d_inv;
    }
    out
}

/// Gram-solve expansion of `x` in [`symmetric_basis`].
pub fn symmetric_coefficients(x: &CMat4, rep: &DiracRep) -> Option<[f64; 10]> {
    let basis = symmetric_basis(rep);
    let gram = DMatrix::from_fn(10, 10, |i, k| (basis[i].adjoint() * basis[k]).trace());
    let rhs = nalgebra::DVector::from_fn(10, |i, _| (basis[i].adjoint() * x).trace());
    let sol = gram.lu().solve(&rhs)?;
    Some(std::array::from_fn(|i| sol[i].re))
}

fn amplitude_coefficients(h: &CMat4, rep: &DiracRep) -> Option<AmplitudeCoefficients> {
    let x = symmetric_coefficients(h, rep)?;
    let mut w_spatial = [0.0; 3];
    let mut w_time = [0.0; 3];
    for (k, &(a, b)) in PAIRS.iter().enumerate() {
        if a == 0 {
            w_time[b - 1] = -x[4 + k] / 2.0;
        } else {
            w_spatial[k - 3] = x[4 + k] / 2.0;
        }
    }
    Some(AmplitudeCoefficients { v0: -x[0], v: [x[1], x[2], x[3]], w_spatial, w_time })
}

/// Residuals `‖H′ − RHR⁺‖` and `‖U′⁻¹ − RU⁻¹‖` where `(H′, U′⁻¹)` are the
/// polar factors of `RZ`.
pub fn rotation_covariance_check(z: &CMat4, r: &CMat4, rep: &DiracRep) -> (f64, f64) {
    let before = polar_decompose(z, rep);
    let after = polar_decompose(&(r * z), rep);
    let residual_h = max_abs(&(after.amplitude - r * before.amplitude * r.adjoint()));
    let residual_u = max_abs(&(after.phase - r * before.phase));
    (residual_h, residual_u)
}

/// `Z = ΣΨ_ηλ`, `Ψ_ηλ = Z·P_ηλ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BispinorSplit {
    /// Ordered `++, +−, −+, −−`.
    pub projectors: [CMat4; 4],
    pub columns: [CMat4; 4],
}

impl BispinorSplit {
    /// `‖ΣP − E‖` and `‖P_aP_b − δ_abP_a‖`, maximized.
    pub fn projector_residual(&self) -> f64 {
        let mut worst = max_abs(&(self.projectors.iter().sum::<CMat4>() - linalg::identity()));
        for (a, pa) in self.projectors.iter().enumerate() {
            for (b, pb) in self.projectors.iter().enumerate() {
                let target = if a == b { *pa } else { linalg::zeros() };
                worst = worst.max(max_abs(&(pa * pb - target)));
            }
        }
        worst
    }

    pub fn sum(&self) -> CMat4 {
        self.columns.iter().sum()
    }
}

/// The commuting involutions `A = γ₁`, `B = γ₀γ₂`.
pub fn projector_involutions(rep: &DiracRep) -> (CMat4, CMat4) {
    (rep.gamma[1], rep.gamma[0] * rep.gamma[2])
}

/// `P_ηλ = ¼(E + ηA)(E + λB)`.
pub fn projectors(rep: &DiracRep) -> Result<[CMat4; 4], FactorError> {
    let (a, b) = projector_involutions(rep);
    let e = linalg::identity();
    let residual = max_abs(&(a * a - e)).max(max_abs(&(b * b - e))).max(max_abs(&(a * b - b * a)));
    if residual > 1e-12 {
        return Err(FactorError::ProjectorConstructionFailed(residual));
    }
    let p = |eta: f64, lam: f64| (e + a * c(eta)) * (e + b * c(lam)) * c(0.25);
    Ok([p(1.0, 1.0), p(1.0, -1.0), p(-1.0, 1.0), p(-1.0, -1.0)])
}

pub fn split_bispinors(z: &CMat4, rep: &DiracRep) -> Result<BispinorSplit, FactorError> {
    let projectors = projectors(rep)?;
    let columns = projectors.map(|p| z * p);
    Ok(BispinorSplit { projectors, columns })
}

/// Numerical rank from singular values, relative to the largest one.
pub fn matrix_rank(x: &CMat4, rel_tol: f64) -> usize {
    let sv = x.singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}
