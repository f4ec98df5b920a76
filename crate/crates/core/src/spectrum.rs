//! The Hermitian matrix `M` built from a quintuple, its spectrum, and the
//! solvability test `j ≥ √(u² + v² + 2w)`.
//!
//! The closed form involves only `j` and `H` and is exact in the rest frame of
//! `j`. The feasibility margin it yields is built from Lorentz scalars, so it
//! is valid in every frame; the individual eigenvalues of `M` are not, because
//! a boost acts on `M` by congruence rather than similarity.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::clifford::{DiracRep, MinkowskiMetric, RepKind, PAIRS};
use crate::frames::{
    apply_lorentz, levi_civita4, FrameError, IndexFrame, LorentzTransform, TensorQuintuple,
};
use crate::linalg::{self, c, CMat4, NoConvergence, I};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SpectrumError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("current is spacelike (g·jj = {0:.6e})")]
    SpacelikeCurrent(f64),
    #[error("current is null (j = {0:.3e}); closed form undefined")]
    NullCurrent(f64),
    #[error("closed form needs m = s = n = 0 (largest such component {0:.3e})")]
    OutsideRealSector(f64),
    #[error(transparent)]
    NoConvergence(#[from] NoConvergence),
}

/// Thresholds used by feasibility and rank decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Feasible when the margin is at least `-margin`.
    pub margin: f64,
    /// Eigenvalue counted in the rank when above `rank · max(λ₁, 1)`.
    pub rank: f64,
    /// Numeric nonnegativity floor used when the closed form does not apply.
    pub numeric_floor: f64,
    /// `g·jj` above this is spacelike.
    pub spacelike: f64,
    /// `j` below this is treated as null.
    pub null_current: f64,
    /// `|m|, |s|, |n|` at most this (relative to the largest component) count as zero.
    pub real_sector: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            margin: 1e-10,
            rank: 1e-9,
            numeric_floor: 1e-9,
            spacelike: 1e-12,
            null_current: 1e-12,
            real_sector: 1e-12,
        }
    }
}

/// `M = ¼(−iD⁻¹m + γ_αD⁻¹jᵅ − iγ₅γ_αD⁻¹sᵅ − ½S_αβD⁻¹Hᵅᵝ + iγ₅D⁻¹n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MMatrix {
    pub m: CMat4,
    pub rep_kind: RepKind,
    pub source: TensorQuintuple,
}

impl MMatrix {
    pub fn hermiticity_residual(&self) -> f64 {
        linalg::hermiticity_residual(&self.m)
    }
}

pub fn build_m(q: &TensorQuintuple, rep: &DiracRep) -> Result<MMatrix, SpectrumError> {
    if q.frame != IndexFrame::Local {
        return Err(FrameError::WrongFrame { expected: IndexFrame::Local, got: q.frame }.into());
    }
    let eta = MinkowskiMetric::DIAGONAL;
    let di = rep.d_inv;
    let mut acc = linalg::zeros();
    // Zero coefficients are skipped so that real-sector input stays exactly real.
    if q.m != 0.0 {
        acc += di * (-I * q.m);
    }
    for a in 0..4 {
        if q.j[a] != 0.0 {
            acc += rep.gamma[a] * di * c(q.j[a]);
        }
        if q.s[a] != 0.0 {
            acc += rep.gamma5 * rep.gamma[a] * di * (-I * (eta[a] * q.s[a]));
        }
    }
    let h_up = q.h.raised();
    for (k, _) in PAIRS.iter().enumerate() {
        if h_up.0[k] != 0.0 {
            // ½ Σ over ordered pairs = Σ over a < b.
            acc -= rep.sigma[k] * di * c(h_up.0[k]);
        }
    }
    if q.n != 0.0 {
        acc += rep.gamma5 * di * (I * q.n);
    }
    Ok(MMatrix { m: acc * c(0.25), rep_kind: rep.kind, source: *q })
}

/// Eigenvalues of `M`, sorted descending.
pub fn numeric_spectrum(m: &MMatrix) -> Result<[f64; 4], NoConvergence> {
    eigenvalues_desc(&m.m)
}

pub fn eigenvalues_desc(m: &CMat4) -> Result<[f64; 4], NoConvergence> {
    let (values, _) = linalg::hermitian_eigen(m)?;
    Ok([values[0], values[1], values[2], values[3]])
}

/// The scalars built from `j` and `H`, with the covectors they come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentInvariants {
    /// `√(−g_μν jᵘjᵛ)`.
    pub j: f64,
    /// `+1` for future-pointing `j`, `−1` for past-pointing.
    pub time_orientation: f64,
    /// Future-pointing unit vector `eᵅ` (upper index).
    pub e: [f64; 4],
    /// `u_α = H_αν eᵛ`.
    pub u: [f64; 4],
    /// `v_α = ½E_αμνλ Hᵘᵛ eᵏ`.
    pub v: [f64; 4],
    /// `w_α = (δ_αᵝ + e_α eᵝ) H_βμ Hᵘᵛ e_ν`.
    pub w_vec: [f64; 4],
    pub u2: f64,
    pub v2: f64,
    /// `√(w_α wᵅ)`.
    pub w: f64,
}

/// `g^{αβ} x_α y_β` for covectors.
pub fn covector_dot(x: &[f64; 4], y: &[f64; 4]) -> f64 {
    (0..4).map(|a| MinkowskiMetric::DIAGONAL[a] * x[a] * y[a]).sum()
}

pub fn current_invariants(q: &TensorQuintuple, tol: &Tolerances) -> Result<CurrentInvariants, SpectrumError> {
    let eta = MinkowskiMetric::DIAGONAL;
    let jj = q.j_squared();
    let scale = q.j.iter().fold(1.0f64, |acc, x| acc.max(x * x));
    if jj > tol.spacelike * scale {
        return Err(SpectrumError::SpacelikeCurrent(jj));
    }
    let j = (-jj).max(0.0).sqrt();
    if j < tol.null_current {
        return Err(SpectrumError::NullCurrent(j));
    }
    let orientation = if q.j[0] < 0.0 { -1.0 } else { 1.0 };
    let e: [f64; 4] = std::array::from_fn(|a| orientation * q.j[a] / j);
    let e_low: [f64; 4] = std::array::from_fn(|a| eta[a] * e[a]);
    let h_low = q.h.to_matrix();
    let h_up = q.h.raised().to_matrix();

    let u: [f64; 4] = std::array::from_fn(|a| (0..4).map(|nu| h_low[(a, nu)] * e[nu]).sum());
    let v: [f64; 4] = std::array::from_fn(|a| {
        let mut acc = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                for la in 0..4 {
                    acc += levi_civita4(a, mu, nu, la) * h_up[(mu, nu)] * e[la];
                }
            }
        }
        0.5 * acc
    });
    // x_β = H_βμ Hᵘᵛ e_ν, then project orthogonally to e.
    let x: [f64; 4] = std::array::from_fn(|b| {
        (0..4).map(|mu| h_low[(b, mu)] * (0..4).map(|nu| h_up[(mu, nu)] * e_low[nu]).sum::<f64>()).sum()
    });
    let e_dot_x: f64 = (0..4).map(|b| e[b] * x[b]).sum();
    let w_vec: [f64; 4] = std::array::from_fn(|a| x[a] + e_low[a] * e_dot_x);

    Ok(CurrentInvariants {
        j,
        time_orientation: orientation,
        e,
        u,
        v,
        w_vec,
        u2: covector_dot(&u, &u),
        v2: covector_dot(&v, &v),
        w: covector_dot(&w_vec, &w_vec).max(0.0).sqrt(),
    })
}

impl CurrentInvariants {
    /// `j − √(u² + v² + 2w)` with the time orientation of `j` applied.
    pub fn margin(&self) -> f64 {
        self.time_orientation * self.j - (self.u2 + self.v2 + 2.0 * self.w).max(0.0).sqrt()
    }

    /// `κ·(j ± √(u² + v² ± 2w))`, sorted descending.
    pub fn eigenvalues(&self, kappa: f64) -> [f64; 4] {
        let j = self.time_orientation * self.j;
        let outer = (self.u2 + self.v2 + 2.0 * self.w).max(0.0).sqrt();
        let inner = (self.u2 + self.v2 - 2.0 * self.w).max(0.0).sqrt();
        let mut out = [kappa * (j + outer), kappa * (j + inner), kappa * (j - inner), kappa * (j - outer)];
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    /// Largest of `|u·e|`, `|v·e|`, `|w·u|`, `|w·v|`, `|w·e|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let e_low: [f64; 4] = std::array::from_fn(|a| MinkowskiMetric::DIAGONAL[a] * self.e[a]);
        [
            covector_dot(&self.u, &e_low),
            covector_dot(&self.v, &e_low),
            covector_dot(&self.w_vec, &self.u),
            covector_dot(&self.w_vec, &self.v),
            covector_dot(&self.w_vec, &e_low),
        ]
        .iter()
        .fold(0.0, |acc, x| acc.max(x.abs()))
    }
}

/// Closed-form eigenvalues (rest frame of `j`) and the invariants behind them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub lambda: [f64; 4],
    pub invariants: CurrentInvariants,
    pub margin: f64,
    pub kappa: f64,
}

pub fn closed_form_spectrum(q: &TensorQuintuple) -> Result<ClosedForm, SpectrumError> {
    closed_form_with(q, &Tolerances::default())
}

pub fn closed_form_with(q: &TensorQuintuple, tol: &Tolerances) -> Result<ClosedForm, SpectrumError> {
    if q.frame != IndexFrame::Local {
        return Err(FrameError::WrongFrame { expected: IndexFrame::Local, got: q.frame }.into());
    }
    let off = q.non_real_magnitude();
    if off > tol.real_sector * q.max_abs().max(1.0) {
        return Err(SpectrumError::OutsideRealSector(off));
    }
    let invariants = current_invariants(q, tol)?;
    let k = kappa();
    Ok(ClosedForm { lambda: invariants.eigenvalues(k), margin: invariants.margin(), invariants, kappa: k })
}

/// Calibration input `j = (1, 0, 0, 0)`, everything else zero.
pub fn calibration_quintuple() -> TensorQuintuple {
    TensorQuintuple::current([1.0, 0.0, 0.0, 0.0])
}

/// Ratio of numeric to closed-form eigenvalues on the calibration input.
pub fn calibrate_kappa(rep: &DiracRep) -> f64 {
    let q = calibration_quintuple();
    let m = build_m(&q, rep).expect("calibration input is local");
    let numeric = numeric_spectrum(&m).expect("diagonalizable calibration matrix");
    let inv = current_invariants(&q, &Tolerances::default()).expect("timelike calibration current");
    let unscaled = inv.eigenvalues(1.0);
    numeric.iter().zip(unscaled.iter()).map(|(n, u)| n / u).sum::<f64>() / 4.0
}

/// `κ` for the frozen conventions, computed once.
pub fn kappa() -> f64 {
    static KAPPA: OnceLock<f64> = OnceLock::new();
    *KAPPA.get_or_init(|| calibrate_kappa(DiracRep::majorana()))
}

/// Number of eigenvalues above `tol · max(λ₁, 1)`.
pub fn rank_of(lambda: &[f64; 4], tol: f64) -> usize {
    let threshold = tol * lambda[0].max(1.0);
    lambda.iter().filter(|&&l| l > threshold).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibilityReason {
    /// Decided by the closed-form margin.
    ClosedForm,
    ZeroQuintuple,
    SpacelikeCurrent,
    /// Null current, decided by the numeric eigensolver.
    NullCurrentNumeric,
    /// `m`, `s` or `n` nonzero, decided by the numeric eigensolver.
    OutsideRealSectorNumeric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// In tensor units; `λ_min/κ` when the closed form does not apply.
    pub margin: f64,
    pub rank: usize,
    pub reason: FeasibilityReason,
}

/// Everything the spectrum module knows about one quintuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub lambda_closed: Option<[f64; 4]>,
    pub lambda_numeric: [f64; 4],
    pub margin: f64,
    pub feasible: bool,
    pub rank: usize,
    pub kappa: f64,
    pub reason: FeasibilityReason,
    pub invariants: Option<InvariantsReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantsReport {
    pub j: f64,
    pub u2: f64,
    pub v2: f64,
    pub w: f64,
}

impl SpectrumReport {
    pub fn feasibility(&self) -> Feasibility {
        Feasibility { feasible: self.feasible, margin: self.margin, rank: self.rank, reason: self.reason }
    }
}

pub fn spectrum_report(q: &TensorQuintuple, rep: &DiracRep, tol: &Tolerances) -> Result<SpectrumReport, SpectrumError> {
    let m = build_m(q, rep)?;
    let numeric = numeric_spectrum(&m)?;
    let k = kappa();
    let rank = rank_of(&numeric, tol.rank);
    let numeric_margin = numeric[3] / k;
    let numeric_ok = numeric[3] >= -tol.numeric_floor * numeric[0].abs().max(1.0);

    let (closed, invariants, margin, feasible, reason) = if q.max_abs() == 0.0 {
        (None, None, 0.0, true, FeasibilityReason::ZeroQuintuple)
    } else {
        match closed_form_with(q, tol) {
            Ok(cf) => {
                let inv = InvariantsReport { j: cf.invariants.j, u2: cf.invariants.u2, v2: cf.invariants.v2, w: cf.invariants.w };
                (Some(cf.lambda), Some(inv), cf.margin, cf.margin >= -tol.margin, FeasibilityReason::ClosedForm)
            }
            Err(SpectrumError::SpacelikeCurrent(_)) => {
                (None, None, numeric_margin, false, FeasibilityReason::SpacelikeCurrent)
            }
            Err(SpectrumError::NullCurrent(_)) => {
                (None, None, numeric_margin, numeric_ok, FeasibilityReason::NullCurrentNumeric)
            }
            Err(SpectrumError::OutsideRealSector(_)) => {
                (None, None, numeric_margin, numeric_ok, FeasibilityReason::OutsideRealSectorNumeric)
            }
            Err(other) => return Err(other),
        }
    };
    Ok(SpectrumReport { lambda_closed: closed, lambda_numeric: numeric, margin, feasible, rank, kappa: k, reason, invariants })
}

pub fn feasibility(q: &TensorQuintuple, rep: &DiracRep) -> Result<Feasibility, SpectrumError> {
    feasibility_with(q, rep, &Tolerances::default())
}

pub fn feasibility_with(q: &TensorQuintuple, rep: &DiracRep, tol: &Tolerances) -> Result<Feasibility, SpectrumError> {
    Ok(spectrum_report(q, rep, tol)?.feasibility())
}

/// Boost taking a timelike `j` to `(±j, 0, 0, 0)`.
pub fn rest_frame_boost(j: &[f64; 4]) -> Option<LorentzTransform> {
    let spatial = (j[1] * j[1] + j[2] * j[2] + j[3] * j[3]).sqrt();
    if spatial >= j[0].abs() {
        return None;
    }
    if spatial == 0.0 {
        return Some(LorentzTransform::identity());
    }
    let n = [j[1] / spatial, j[2] / spatial, j[3] / spatial];
    Some(LorentzTransform::boost_along(n, (spatial / j[0]).atanh()))
}

/// The quintuple seen in the rest frame of its current.
pub fn to_rest_frame(q: &TensorQuintuple) -> Option<TensorQuintuple> {
    let w = rest_frame_boost(&q.j)?;
    apply_lorentz(q, &w).ok()
}
