//! The five given tensors, world metrics, tetrads and local Lorentz frames.
//!
//! Storage convention: `j` carries an upper index, `s` and `H` carry lower
//! indices. `H` is stored as its six components in [`PAIRS`] order.

use nalgebra::{Matrix3, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::clifford::{MinkowskiMetric, PAIRS};
use crate::linalg::{max_abs_real, RMat4};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FrameError {
    #[error("metric is not symmetric (residual {0:.3e})")]
    NotSymmetric(f64),
    #[error("metric is degenerate (det = {0:.3e})")]
    Degenerate(f64),
    #[error("metric signature is not (-,+,+,+): eigenvalues {0:?}")]
    BadSignature([f64; 4]),
    #[error("transform violates the Lorentz condition (residual {0:.3e})")]
    NotLorentz(f64),
    #[error("expected a quintuple in {expected:?} indices, got {got:?}")]
    WrongFrame { expected: IndexFrame, got: IndexFrame },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum IndexFrame {
    World,
    #[default]
    Local,
}

/// Antisymmetric rank-2 tensor with lower indices.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AntisymmetricTensor(pub [f64; 6]);

impl AntisymmetricTensor {
    pub fn zero() -> Self {
        Self([0.0; 6])
    }

    /// Component `H_ab` for any ordered pair.
    pub fn get(&self, a: usize, b: usize) -> f64 {
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.0[pair_slot(a, b)],
            std::cmp::Ordering::Greater => -self.0[pair_slot(b, a)],
        }
    }

    pub fn set(&mut self, a: usize, b: usize, value: f64) {
        assert_ne!(a, b, "diagonal of an antisymmetric tensor is zero");
        if a < b {
            self.0[pair_slot(a, b)] = value;
        } else {
            self.0[pair_slot(b, a)] = -value;
        }
    }

    pub fn to_matrix(&self) -> RMat4 {
        RMat4::from_fn(|a, b| self.get(a, b))
    }

    /// Reads the upper triangle; the lower triangle is ignored.
    pub fn from_matrix(m: &RMat4) -> Self {
        Self(PAIRS.map(|(a, b)| m[(a, b)]))
    }

    /// Components with both indices moved by the Minkowski metric.
    pub fn raised(&self) -> Self {
        let g = MinkowskiMetric::DIAGONAL;
        Self(PAIRS.map(|(a, b)| g[a] * g[b] * self.get(a, b)))
    }
}

fn pair_slot(a: usize, b: usize) -> usize {
    PAIRS.iter().position(|&p| p == (a, b)).expect("valid index pair")
}

/// The tensors `(m, jᵅ, s_α, H_αβ, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TensorQuintuple {
    pub m: f64,
    pub j: [f64; 4],
    pub s: [f64; 4],
    pub h: AntisymmetricTensor,
    pub n: f64,
    pub frame: IndexFrame,
}

/// Full contractions that do not depend on the frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Contractions {
    pub jj: f64,
    pub ss: f64,
    pub hh: f64,
    pub js: f64,
    pub h_dual: f64,
}

impl Contractions {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.jj - other.jj,
            self.ss - other.ss,
            self.hh - other.hh,
            self.js - other.js,
            self.h_dual - other.h_dual,
        ]
        .iter()
        .fold(0.0, |acc, d| acc.max(d.abs()))
    }
}

impl TensorQuintuple {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Only `j` set, local frame.
    pub fn current(j: [f64; 4]) -> Self {
        Self { j, ..Self::default() }
    }

    /// Local-frame quintuple with `m = s = n = 0`.
    pub fn real_sector(j: [f64; 4], h: AntisymmetricTensor) -> Self {
        Self { j, h, ..Self::default() }
    }

    pub fn with_frame(mut self, frame: IndexFrame) -> Self {
        self.frame = frame;
        self
    }

    /// True when the components outside the real field vanish exactly.
    pub fn is_real_sector(&self) -> bool {
        self.non_real_magnitude() == 0.0
    }

    /// Largest of `|m|`, `|s_α|`, `|n|`.
    pub fn non_real_magnitude(&self) -> f64 {
        self.s.iter().fold(self.m.abs().max(self.n.abs()), |acc, x| acc.max(x.abs()))
    }

    /// Copy with `m`, `s` and `n` zeroed.
    pub fn real_part(&self) -> Self {
        Self { m: 0.0, s: [0.0; 4], n: 0.0, ..*self }
    }

    pub fn components(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        out[0] = self.m;
        out[1..5].copy_from_slice(&self.j);
        out[5..9].copy_from_slice(&self.s);
        out[9..15].copy_from_slice(&self.h.0);
        out[15] = self.n;
        out
    }

    pub fn from_components(c: &[f64; 16], frame: IndexFrame) -> Self {
        let mut q = Self { m: c[0], n: c[15], frame, ..Self::default() };
        q.j.copy_from_slice(&c[1..5]);
        q.s.copy_from_slice(&c[5..9]);
        q.h.0.copy_from_slice(&c[9..15]);
        q
    }

    /// Max componentwise difference, ignoring the frame tag.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components()
            .iter()
            .zip(other.components().iter())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.components().iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    /// `g_μν jᵘjᵛ` in the local frame; negative for timelike `j`.
    pub fn j_squared(&self) -> f64 {
        minkowski_dot(&self.j, &self.j)
    }

    /// Frame-independent contractions. World-frame quintuples need their metric.
    pub fn contractions(&self, metric: Option<&WorldMetric>) -> Contractions {
        let (g, g_inv, vol) = match metric {
            Some(w) => (w.g, w.inverse, (-w.g.determinant()).sqrt()),
            None => (MinkowskiMetric::matrix(), MinkowskiMetric::matrix(), 1.0),
        };
        let j = Vector4::from(self.j);
        let s = Vector4::from(self.s);
        let h_low = self.h.to_matrix();
        let h_up = g_inv * h_low * g_inv.transpose();
        let mut dual = 0.0;
        for (a, b, c, d) in permutations4() {
            dual += levi_civita4(a, b, c, d) * h_up[(a, b)] * h_up[(c, d)];
        }
        Contractions {
            jj: (j.transpose() * g * j)[0],
            ss: (s.transpose() * g_inv * s)[0],
            hh: h_low.component_mul(&h_up).sum(),
            js: j.dot(&s),
            h_dual: 0.5 * vol * dual,
        }
    }
}

/// `x·y` with the Minkowski metric, both vectors upper-index.
pub fn minkowski_dot(x: &[f64; 4], y: &[f64; 4]) -> f64 {
    (0..4).map(|a| MinkowskiMetric::DIAGONAL[a] * x[a] * y[a]).sum()
}

fn permutations4() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..4).flat_map(|a| {
        (0..4).flat_map(move |b| (0..4).flat_map(move |c| (0..4).map(move |d| (a, b, c, d))))
    })
    .filter(|&(a, b, c, d)| a != b && a != c && a != d && b != c && b != d && c != d)
}

/// Permutation sign of `(a, b, c, d)`, zero on repeated indices.
pub fn levi_civita4(a: usize, b: usize, c: usize, d: usize) -> f64 {
    let idx = [a, b, c, d];
    let mut sign = 1.0;
    for i in 0..4 {
        for k in i + 1..4 {
            if idx[i] == idx[k] {
                return 0.0;
            }
            if idx[i] > idx[k] {
                sign = -sign;
            }
        }
    }
    sign
}

/// `ε_ijk` on spatial indices 1..=3 (ε₁₂₃ = +1).
pub fn levi_civita3(i: usize, j: usize, k: usize) -> f64 {
    levi_civita4(0, i, j, k)
}

/// Totally antisymmetric `E_αμνλ` with lower indices and `E₀₁₂₃ = √(−det g)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeviCivita {
    pub volume: f64,
}

impl LeviCivita {
    pub fn local() -> Self {
        Self { volume: 1.0 }
    }

    pub fn for_metric(g: &WorldMetric) -> Self {
        Self { volume: (-g.g.determinant()).sqrt() }
    }

    pub fn lower(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.volume * levi_civita4(a, b, c, d)
    }
}

/// Symmetric world metric `g_αβ` of signature (−,+,+,+).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldMetric {
    g: RMat4,
    inverse: RMat4,
    eigenvalues: [f64; 4],
}

impl WorldMetric {
    pub fn new(g: RMat4) -> Result<Self, FrameError> {
        let scale = max_abs_real(&g).max(1.0);
        let asym = max_abs_real(&(g - g.transpose()));
        if asym > 1e-12 * scale {
            return Err(FrameError::NotSymmetric(asym));
        }
        let det = g.determinant();
        if det.abs() <= 1e-12 * scale.powi(4) {
            return Err(FrameError::Degenerate(det));
        }
        let mut ev: Vec<f64> = g.symmetric_eigenvalues().iter().cloned().collect();
        ev.sort_by(f64::total_cmp);
        let eigenvalues = [ev[0], ev[1], ev[2], ev[3]];
        if !(ev[0] < 0.0 && ev[1] > 0.0) {
            return Err(FrameError::BadSignature(eigenvalues));
        }
        let inverse = g.try_inverse().ok_or(FrameError::Degenerate(det))?;
        Ok(Self { g, inverse, eigenvalues })
    }

    pub fn minkowski() -> Self {
        Self::new(MinkowskiMetric::matrix()).expect("Minkowski metric is Lorentzian")
    }

    pub fn from_row_major(values: &[f64; 16]) -> Result<Self, FrameError> {
        Self::new(RMat4::from_row_slice(values))
    }

    pub fn matrix(&self) -> &RMat4 {
        &self.g
    }

    pub fn inverse(&self) -> &RMat4 {
        &self.inverse
    }

    /// Eigenvalues sorted ascending; exactly one is negative.
    pub fn eigenvalues(&self) -> [f64; 4] {
        self.eigenvalues
    }

    pub fn row_major(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        for r in 0..4 {
            for c in 0..4 {
                out[4 * r + c] = self.g[(r, c)];
            }
        }
        out
    }
}

/// Frame field `H_α^k` (row `α` world, column `k` local) and its inverse
/// `H_k^α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tetrad {
    h: RMat4,
    inverse: RMat4,
}

impl Tetrad {
    pub fn identity() -> Self {
        Self { h: RMat4::identity(), inverse: RMat4::identity() }
    }

    pub fn new(h: RMat4) -> Result<Self, FrameError> {
        let det = h.determinant();
        let inverse = h.try_inverse().ok_or(FrameError::Degenerate(det))?;
        Ok(Self { h, inverse })
    }

    pub fn matrix(&self) -> &RMat4 {
        &self.h
    }

    /// `inverse[(k, α)] = H_k^α`.
    pub fn inverse(&self) -> &RMat4 {
        &self.inverse
    }

    /// `H_α^m H_β^n g_mn`.
    pub fn metric(&self) -> RMat4 {
        self.h * MinkowskiMetric::matrix() * self.h.transpose()
    }

    pub fn metric_residual(&self, g: &WorldMetric) -> f64 {
        max_abs_real(&(self.metric() - g.g))
    }

    /// The tetrad whose local components differ from this one's by `w`.
    pub fn transformed(&self, w: &LorentzTransform) -> Self {
        let h = self.h * w.w.transpose();
        Self { h, inverse: w.inverse().w.transpose() * self.inverse }
    }
}

/// Canonical tetrad: `g = LηLᵀ` with `L` lower triangular and positive
/// diagonal when `g₀₀ < 0`, otherwise an eigenvector frame.
pub fn tetrad_from_metric(g: &WorldMetric) -> Tetrad {
    triangular_tetrad(&g.g).unwrap_or_else(|| eigen_tetrad(g))
}

fn triangular_tetrad(g: &RMat4) -> Option<Tetrad> {
    let eta = MinkowskiMetric::DIAGONAL;
    let mut l = RMat4::zeros();
    for col in 0..4 {
        let pivot = (g[(col, col)] - (0..col).map(|k| l[(col, k)].powi(2) * eta[k]).sum::<f64>()) / eta[col];
        if pivot.is_nan() || pivot <= 1e-14 * g.abs().max() {
            return None;
        }
        l[(col, col)] = pivot.sqrt();
        for row in col + 1..4 {
            let acc: f64 = (0..col).map(|k| l[(row, k)] * l[(col, k)] * eta[k]).sum();
            l[(row, col)] = (g[(row, col)] - acc) / (l[(col, col)] * eta[col]);
        }
    }
    Tetrad::new(l).ok()
}

fn eigen_tetrad(g: &WorldMetric) -> Tetrad {
    let eig = g.g.symmetric_eigen();
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut h = RMat4::from_fn(|r, c| {
        let idx = order[c];
        eig.eigenvectors[(r, idx)] * eig.eigenvalues[idx].abs().sqrt()
    });
    if h.determinant() < 0.0 {
        for r in 0..4 {
            h[(r, 3)] = -h[(r, 3)];
        }
    }
    Tetrad::new(h).expect("Lorentzian metric has an invertible eigenframe")
}

/// Converts world components to the local frame of `t`.
pub fn world_to_local(q: &TensorQuintuple, t: &Tetrad) -> Result<TensorQuintuple, FrameError> {
    if q.frame != IndexFrame::World {
        return Err(FrameError::WrongFrame { expected: IndexFrame::World, got: q.frame });
    }
    let j = t.h.transpose() * Vector4::from(q.j);
    let s = t.inverse * Vector4::from(q.s);
    let h = t.inverse * q.h.to_matrix() * t.inverse.transpose();
    Ok(TensorQuintuple {
        m: q.m,
        j: j.into(),
        s: s.into(),
        h: AntisymmetricTensor::from_matrix(&h),
        n: q.n,
        frame: IndexFrame::Local,
    })
}

/// Local Lorentz matrix `w^k_p` with `w^m_p w^n_q g_mn = g_pq`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzTransform {
    w: RMat4,
}

pub const LORENTZ_TOLERANCE: f64 = 1e-8;

/// `max |wᵀηw − η|`.
pub fn lorentz_residual(w: &RMat4) -> f64 {
    let eta = MinkowskiMetric::matrix();
    max_abs_real(&(w.transpose() * eta * w - eta))
}

impl LorentzTransform {
    pub fn new(w: RMat4) -> Result<Self, FrameError> {
        let residual = lorentz_residual(&w);
        if residual.is_nan() || residual >= LORENTZ_TOLERANCE {
            return Err(FrameError::NotLorentz(residual));
        }
        Ok(Self { w })
    }

    pub fn identity() -> Self {
        Self { w: RMat4::identity() }
    }

    pub fn matrix(&self) -> &RMat4 {
        &self.w
    }

    pub fn residual(&self) -> f64 {
        lorentz_residual(&self.w)
    }

    /// Passive boost with rapidity `phi` along spatial axis `axis` (1..=3).
    pub fn boost(axis: usize, phi: f64) -> Self {
        assert!((1..=3).contains(&axis));
        let mut dir = [0.0; 3];
        dir[axis - 1] = 1.0;
        Self::boost_along(dir, phi)
    }

    /// Boost along the unit 3-vector `n`.
    pub fn boost_along(n: [f64; 3], phi: f64) -> Self {
        let (ch, sh) = (phi.cosh(), phi.sinh());
        let mut w = RMat4::identity();
        w[(0, 0)] = ch;
        for a in 0..3 {
            w[(0, a + 1)] = -sh * n[a];
            w[(a + 1, 0)] = -sh * n[a];
            for b in 0..3 {
                w[(a + 1, b + 1)] += (ch - 1.0) * n[a] * n[b];
            }
        }
        Self { w }
    }

    /// Rotation by `angle` in the spatial `(a, b)` plane, taking axis `a`
    /// toward axis `b`.
    pub fn rotation(a: usize, b: usize, angle: f64) -> Self {
        assert!(a != b && (1..=3).contains(&a) && (1..=3).contains(&b));
        let (c, s) = (angle.cos(), angle.sin());
        let mut w = RMat4::identity();
        w[(a, a)] = c;
        w[(a, b)] = -s;
        w[(b, a)] = s;
        w[(b, b)] = c;
        Self { w }
    }

    pub fn from_spatial_rotation(r: &Matrix3<f64>) -> Result<Self, FrameError> {
        let mut w = RMat4::identity();
        w.fixed_view_mut::<3, 3>(1, 1).copy_from(r);
        Self::new(w)
    }

    /// `Boost · Rotation`, proper orthochronous, deterministic in `seed`.
    /// The rapidity is uniform in `[0, rapidity_bound]`.
    pub fn random(seed: u64, rapidity_bound: f64, include_rotation: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::sample(&mut rng, rapidity_bound, include_rotation)
    }

    pub fn sample<R: Rng + ?Sized>(rng: &mut R, rapidity_bound: f64, include_rotation: bool) -> Self {
        assert!(rapidity_bound >= 0.0, "rapidity bound must be nonnegative");
        let phi = rapidity_bound * rng.random::<f64>();
        let boost = Self::boost_along(random_unit3(rng), phi);
        if !include_rotation {
            return boost;
        }
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let rot = nalgebra::UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(q[0], q[1], q[2], q[3]));
        let rotation = Self::from_spatial_rotation(rot.to_rotation_matrix().matrix()).expect("rotation is Lorentz");
        boost.compose(&rotation)
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { w: self.w * other.w }
    }

    /// `η wᵀ η`.
    pub fn inverse(&self) -> Self {
        let eta = MinkowskiMetric::matrix();
        Self { w: eta * self.w.transpose() * eta }
    }

    pub fn is_identity(&self) -> bool {
        self.w == RMat4::identity()
    }

    /// True for spatial rotations (no boost part).
    pub fn is_rotation(&self, tol: f64) -> bool {
        (self.w[(0, 0)] - 1.0).abs() < tol && (1..4).all(|k| self.w[(0, k)].abs() < tol && self.w[(k, 0)].abs() < tol)
    }
}

fn random_unit3<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = Vector3::<f64>::from_fn(|_, _| rng.sample(StandardNormal));
        let norm = v.norm();
        if norm > 1e-6 {
            return (v / norm).into();
        }
    }
}

/// Transforms local components: `j ↦ wj`, `s ↦ w⁻ᵀs`, `H ↦ w⁻ᵀHw⁻¹`.
pub fn apply_lorentz(q: &TensorQuintuple, w: &LorentzTransform) -> Result<TensorQuintuple, FrameError> {
    if q.frame != IndexFrame::Local {
        return Err(FrameError::WrongFrame { expected: IndexFrame::Local, got: q.frame });
    }
    let residual = w.residual();
    if residual.is_nan() || residual >= LORENTZ_TOLERANCE {
        return Err(FrameError::NotLorentz(residual));
    }
    if w.is_identity() {
        return Ok(*q);
    }
    let inv_t = w.inverse().w.transpose();
    let j = w.w * Vector4::from(q.j);
    let s = inv_t * Vector4::from(q.s);
    let h = inv_t * q.h.to_matrix() * inv_t.transpose();
    Ok(TensorQuintuple {
        j: j.into(),
        s: s.into(),
        h: AntisymmetricTensor::from_matrix(&h),
        ..*q
    })
}
