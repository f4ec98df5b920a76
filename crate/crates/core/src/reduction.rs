//! Expansion of a Hermitian `Z` in Dirac matrices and the quadratic system its
//! square obeys, including the normalized real-field system and its solver.
//!
//! Basis and coefficient names:
//! `Z = aE + iA₀γ₀ + A_kγ_k + iB₀γ₅γ₀ + B_kγ₅γ_k + ibγ₅ + C_kγ₀γ_k + ih_kγ₅γ₀γ_k`.

use nalgebra::{DMatrix, DVector};

use crate::clifford::{DiracRep, RepKind};
use crate::factorization::{self, FactorError};
use crate::frames::{levi_civita3, AntisymmetricTensor, TensorQuintuple};
use crate::linalg::{self, c, max_abs, CMat4, I};
use crate::spectrum::Tolerances;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ReductionError {
    #[error("Z is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),
    #[error("normalization needs j⁰ > 0 (got {0:.6e})")]
    DegenerateNormalization(f64),
    #[error("the real-field system needs m = s = n = 0 (largest such component {0:.3e})")]
    NotRealSector(f64),
    #[error("no real solution: feasibility margin {margin:.6e}")]
    Infeasible { margin: f64 },
    #[error("the symmetric matrix Y needs the real representation")]
    NotRealRepresentation,
    #[error("Newton iteration did not reach the tolerance (residual {0:.3e})")]
    NewtonFailed(f64),
    #[error(transparent)]
    Factor(FactorError),
}

impl From<FactorError> for ReductionError {
    fn from(e: FactorError) -> Self {
        match e {
            FactorError::Infeasible { margin } => ReductionError::Infeasible { margin },
            other => ReductionError::Factor(other),
        }
    }
}

/// Coefficients of a Hermitian `Z` in the sixteen-element Dirac basis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RealExpansion {
    pub a: f64,
    pub b: f64,
    pub a0: f64,
    pub b0: f64,
    pub a_k: [f64; 3],
    pub b_k: [f64; 3],
    pub c_k: [f64; 3],
    pub h_k: [f64; 3],
}

/// The sixteen Hermitian basis matrices in the order
/// `E, iγ₀, γ₁..₃, iγ₅γ₀, γ₅γ₁..₃, iγ₅, γ₀γ₁..₃, iγ₅γ₀γ₁..₃`.
pub fn dirac_basis(rep: &DiracRep) -> [CMat4; 16] {
    let g = &rep.gamma;
    let g5 = rep.gamma5;
    let mut out = [linalg::zeros(); 16];
    out[0] = linalg::identity();
    out[1] = g[0] * I;
    for k in 1..4 {
        out[1 + k] = g[k];
        out[5 + k] = g5 * g[k];
        out[9 + k] = g[0] * g[k];
        out[12 + k] = g5 * g[0] * g[k] * I;
    }
    out[5] = g5 * g[0] * I;
    out[9] = g5 * I;
    out
}

impl RealExpansion {
    pub fn to_array(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        out[0] = self.a;
        out[1] = self.a0;
        out[2..5].copy_from_slice(&self.a_k);
        out[5] = self.b0;
        out[6..9].copy_from_slice(&self.b_k);
        out[9] = self.b;
        out[10..13].copy_from_slice(&self.c_k);
        out[13..16].copy_from_slice(&self.h_k);
        out
    }

    pub fn from_array(x: &[f64; 16]) -> Self {
        let v3 = |i: usize| [x[i], x[i + 1], x[i + 2]];
        Self { a: x[0], a0: x[1], a_k: v3(2), b0: x[5], b_k: v3(6), b: x[9], c_k: v3(10), h_k: v3(13) }
    }

    /// True when only the real-field coefficients `a, A_k, B_k, C_k` are nonzero.
    pub fn is_real_field(&self) -> bool {
        self.a0 == 0.0 && self.b0 == 0.0 && self.b == 0.0 && self.h_k == [0.0; 3]
    }

    pub fn to_matrix(&self, rep: &DiracRep) -> CMat4 {
        dirac_basis(rep).iter().zip(self.to_array()).fold(linalg::zeros(), |acc, (m, x)| acc + m * c(x))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array().iter().zip(other.to_array()).fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
    }
}

/// Trace projection of a Hermitian `Z` onto [`dirac_basis`].
pub fn expand_z(z: &CMat4, rep: &DiracRep) -> Result<RealExpansion, ReductionError> {
    let residual = linalg::hermiticity_residual(z);
    if residual > 1e-12 * max_abs(z).max(1.0) {
        return Err(ReductionError::NotHermitian(residual));
    }
    let basis = dirac_basis(rep);
    // Every basis element squares to E, so Sp(B_i B_j) = 4δ_ij.
    let x: [f64; 16] = std::array::from_fn(|i| (basis[i] * z).trace().re / 4.0);
    Ok(RealExpansion::from_array(&x))
}

fn dot3(x: &[f64; 3], y: &[f64; 3]) -> f64 {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

fn cross3(x: &[f64; 3], y: &[f64; 3]) -> [f64; 3] {
    std::array::from_fn(|k| {
        let mut acc = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                acc += levi_civita3(k + 1, a + 1, b + 1) * x[a] * y[b];
            }
        }
        acc
    })
}

/// The quintuple implied by `ZZ⁺` for a Hermitian `Z` with coefficients `e`,
/// read off the closed-form product.
pub fn compose_zzplus(e: &RealExpansion) -> TensorQuintuple {
    let sq = |v: &[f64; 3]| dot3(v, v);
    let j0 = 4.0
        * (e.a * e.a + sq(&e.a_k) + sq(&e.b_k) + sq(&e.c_k) + e.b * e.b + e.a0 * e.a0 + e.b0 * e.b0 + sq(&e.h_k));
    let bc = cross3(&e.b_k, &e.c_k);
    let ac = cross3(&e.a_k, &e.c_k);
    let ab = cross3(&e.a_k, &e.b_k);

    let mut h = AntisymmetricTensor::zero();
    let mut j = [j0, 0.0, 0.0, 0.0];
    let mut s = [8.0 * (e.a * e.b + dot3(&e.c_k, &e.h_k)), 0.0, 0.0, 0.0];
    for k in 0..3 {
        h.set(0, k + 1, -8.0 * (e.a * e.a_k[k] + bc[k] + e.b0 * e.h_k[k]));
        j[k + 1] = 8.0 * (e.a * e.c_k[k] + ab[k] + e.b * e.h_k[k]);
        s[k + 1] = -8.0 * (e.a * e.h_k[k] + e.a_k[k] * e.b0 - e.a0 * e.b_k[k] + e.b * e.c_k[k]);
        // ε_kpq H_pq / 16 = X_k puts H_pq = 8X_k on the cyclic pair (p, q).
        let x_k = e.a * e.b_k[k] - ac[k] - e.a0 * e.h_k[k];
        let (p, q) = ((k + 1) % 3 + 1, (k + 2) % 3 + 1);
        h.set(p, q, 8.0 * x_k);
    }
    TensorQuintuple {
        m: 8.0 * (e.a * e.a0 - dot3(&e.b_k, &e.h_k)),
        j,
        s,
        h,
        n: -8.0 * (e.a * e.b0 + dot3(&e.a_k, &e.h_k)),
        frame: crate::frames::IndexFrame::Local,
    }
}

/// Data of the normalized real-field system, with `norm = ¼j⁰`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedSystem {
    pub a_vec: [f64; 3],
    pub b_vec: [f64; 3],
    pub c_vec: [f64; 3],
    pub norm: f64,
}

/// `a_k = −½H₀ₖ/j⁰`, `b_k = ¼ε_kpq H_pq/j⁰`, `c_k = ½j_k/j⁰`.
pub fn normalize_system(q: &TensorQuintuple) -> Result<NormalizedSystem, ReductionError> {
    let off = q.non_real_magnitude();
    if off != 0.0 {
        return Err(ReductionError::NotRealSector(off));
    }
    let j0 = q.j[0];
    if j0.is_nan() || j0 <= 1e-12 {
        return Err(ReductionError::DegenerateNormalization(j0));
    }
    let a_vec = std::array::from_fn(|k| -0.5 * q.h.get(0, k + 1) / j0);
    let b_vec = std::array::from_fn(|k| {
        let mut acc = 0.0;
        for p in 1..4 {
            for r in 1..4 {
                acc += levi_civita3(k + 1, p, r) * q.h.get(p, r);
            }
        }
        0.25 * acc / j0
    });
    let c_vec = std::array::from_fn(|k| 0.5 * q.j[k + 1] / j0);
    Ok(NormalizedSystem { a_vec, b_vec, c_vec, norm: 0.25 * j0 })
}

impl NormalizedSystem {
    /// The real-sector quintuple with `j⁰ = 4` whose normalized data is `self`.
    pub fn unit_quintuple(&self) -> TensorQuintuple {
        let mut h = AntisymmetricTensor::zero();
        let mut j = [4.0, 0.0, 0.0, 0.0];
        for k in 0..3 {
            h.set(0, k + 1, -8.0 * self.a_vec[k]);
            j[k + 1] = 8.0 * self.c_vec[k];
            let (p, q) = ((k + 1) % 3 + 1, (k + 2) % 3 + 1);
            h.set(p, q, 8.0 * self.b_vec[k]);
        }
        TensorQuintuple::real_sector(j, h)
    }

    /// Right-hand sides computed from a known solution.
    pub fn from_solution(a: f64, x: &[f64; 3], y: &[f64; 3], z: &[f64; 3]) -> Self {
        let (yz, zx, xy) = (cross3(y, z), cross3(z, x), cross3(x, y));
        Self {
            a_vec: std::array::from_fn(|k| a * x[k] + yz[k]),
            b_vec: std::array::from_fn(|k| a * y[k] + zx[k]),
            c_vec: std::array::from_fn(|k| a * z[k] + xy[k]),
            norm: 1.0,
        }
    }

    /// Residuals of the four equations, max-abs over components.
    pub fn residuals(&self, a: f64, x: &[f64; 3], y: &[f64; 3], z: &[f64; 3]) -> [f64; 4] {
        let f = self.equations(&pack(a, x, y, z));
        let max3 = |i: usize| f[i].abs().max(f[i + 1].abs()).max(f[i + 2].abs());
        [f[0].abs(), max3(1), max3(4), max3(7)]
    }

    fn equations(&self, u: &[f64; 10]) -> [f64; 10] {
        let (a, x, y, z) = unpack(u);
        let (yz, zx, xy) = (cross3(&y, &z), cross3(&z, &x), cross3(&x, &y));
        let mut f = [0.0; 10];
        f[0] = a * a + dot3(&x, &x) + dot3(&y, &y) + dot3(&z, &z) - 1.0;
        for k in 0..3 {
            f[1 + k] = a * x[k] + yz[k] - self.a_vec[k];
            f[4 + k] = a * y[k] + zx[k] - self.b_vec[k];
            f[7 + k] = a * z[k] + xy[k] - self.c_vec[k];
        }
        f
    }

    fn jacobian(&self, u: &[f64; 10]) -> DMatrix<f64> {
        let (a, x, y, z) = unpack(u);
        let mut jac = DMatrix::zeros(10, 10);
        jac[(0, 0)] = 2.0 * a;
        for k in 0..3 {
            jac[(0, 1 + k)] = 2.0 * x[k];
            jac[(0, 4 + k)] = 2.0 * y[k];
            jac[(0, 7 + k)] = 2.0 * z[k];
        }
        // d(p × q)/dq = [p]×, d(p × q)/dp = −[q]×.
        let skew = |v: [f64; 3]| {
            nalgebra::Matrix3::new(0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0)
        };
        let blocks: [([f64; 3], usize, usize, [f64; 3], usize, [f64; 3]); 3] = [
            (x, 1, 4, z, 7, y),
            (y, 4, 7, x, 1, z),
            (z, 7, 1, y, 4, x),
        ];
        // Row block `r`: a·v + p × q with (p, q) = (y, z), (z, x), (x, y).
        for (row, (v, own, p_col, p_partner, q_col, q_partner)) in blocks.iter().enumerate() {
            let r0 = 1 + 3 * row;
            let dp = -skew(*p_partner);
            let dq = skew(*q_partner);
            for i in 0..3 {
                jac[(r0 + i, 0)] = v[i];
                jac[(r0 + i, own + i)] = a;
                for k in 0..3 {
                    jac[(r0 + i, p_col + k)] += dp[(i, k)];
                    jac[(r0 + i, q_col + k)] += dq[(i, k)];
                }
            }
        }
        jac
    }
}

fn pack(a: f64, x: &[f64; 3], y: &[f64; 3], z: &[f64; 3]) -> [f64; 10] {
    [a, x[0], x[1], x[2], y[0], y[1], y[2], z[0], z[1], z[2]]
}

fn unpack(u: &[f64; 10]) -> (f64, [f64; 3], [f64; 3], [f64; 3]) {
    (u[0], [u[1], u[2], u[3]], [u[4], u[5], u[6]], [u[7], u[8], u[9]])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Factorization,
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedSolution {
    pub a: f64,
    pub x: [f64; 3],
    pub y: [f64; 3],
    pub z: [f64; 3],
    pub residuals: [f64; 4],
    pub method: SolveMethod,
}

impl NormalizedSolution {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

pub const SOLUTION_TOLERANCE: f64 = 1e-9;

/// Solves the normalized system through the arithmetic root of the matching
/// `M`, falling back to damped Newton if that path misses the tolerance.
pub fn solve_normalized(s: &NormalizedSystem) -> Result<NormalizedSolution, ReductionError> {
    let q = s.unit_quintuple();
    let rep = DiracRep::majorana();
    let z = factorization::solve_z_with(&q, rep, None, &Tolerances::default())?;
    let e = expand_z(&z.z, rep)?;
    // j⁰ = 4, so the normalization √(¼j⁰) is 1.
    let residuals = s.residuals(e.a, &e.a_k, &e.b_k, &e.c_k);
    let solution = NormalizedSolution {
        a: e.a,
        x: e.a_k,
        y: e.b_k,
        z: e.c_k,
        residuals,
        method: SolveMethod::Factorization,
    };
    if solution.max_residual() < SOLUTION_TOLERANCE {
        return Ok(solution);
    }
    solve_normalized_newton(s, Some(&pack(e.a, &e.a_k, &e.b_k, &e.c_k)))
}

/// Damped Newton iteration on the ten unknowns. Starts from `start` if
/// given, then from a fixed list of deterministic points.
pub fn solve_normalized_newton(s: &NormalizedSystem, start: Option<&[f64; 10]>) -> Result<NormalizedSolution, ReductionError> {
    let mut starts: Vec<[f64; 10]> = start.into_iter().copied().collect();
    starts.push(pack(1.0, &s.a_vec, &s.b_vec, &s.c_vec));
    starts.push([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    for i in 0..10 {
        let mut u = [0.1; 10];
        u[i] = 1.0;
        starts.push(u);
    }
    let mut best = f64::INFINITY;
    for u0 in starts {
        let (u, r) = newton(s, u0);
        if r < SOLUTION_TOLERANCE {
            let (a, x, y, z) = unpack(&u);
            return Ok(NormalizedSolution { a, x, y, z, residuals: s.residuals(a, &x, &y, &z), method: SolveMethod::Newton });
        }
        best = best.min(r);
    }
    Err(ReductionError::NewtonFailed(best))
}

fn norm_inf(f: &[f64; 10]) -> f64 {
    f.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn newton(s: &NormalizedSystem, mut u: [f64; 10]) -> ([f64; 10], f64) {
    let mut f = s.equations(&u);
    let mut r = norm_inf(&f);
    for _ in 0..200 {
        if r < 1e-14 {
            break;
        }
        let jac = s.jacobian(&u);
        let rhs = DVector::from_iterator(10, f.iter().map(|x| -x));
        let Ok(step) = jac.svd(true, true).solve(&rhs, 1e-12) else { break };
        let mut t = 1.0;
        let mut improved = false;
        while t > 1e-6 {
            let trial: [f64; 10] = std::array::from_fn(|i| u[i] + t * step[i]);
            let ft = s.equations(&trial);
            let rt = norm_inf(&ft);
            if rt < r {
                u = trial;
                f = ft;
                r = rt;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (u, r)
}

/// `Y = ¼jᵏγ_kD⁻¹ − ⅛Hᵐⁿ S_mnD⁻¹`, summed over all ordered `(m, n)`; `h`
/// holds lower-index components.
pub fn build_y(j: &[f64; 4], h: &AntisymmetricTensor, rep: &DiracRep) -> Result<CMat4, ReductionError> {
    if rep.kind != RepKind::MajoranaReal {
        return Err(ReductionError::NotRealRepresentation);
    }
    let h_up = h.raised();
    let mut y = linalg::zeros();
    for k in 0..4 {
        y += rep.gamma[k] * rep.d_inv * c(0.25 * j[k]);
    }
    for (k, s) in rep.sigma.iter().enumerate() {
        y -= s * rep.d_inv * c(0.25 * h_up.0[k]);
    }
    Ok(y)
}

/// Solution norm `a² + |x|² + |y|² + |z|²`.
pub fn solution_norm(sol: &NormalizedSolution) -> f64 {
    sol.a * sol.a + dot3(&sol.x, &sol.x) + dot3(&sol.y, &sol.y) + dot3(&sol.z, &sol.z)
}

/// Uniform point on the unit sphere in ten dimensions, as `(a, x, y, z)`.
pub fn random_unit_solution<R: rand::Rng + ?Sized>(rng: &mut R) -> (f64, [f64; 3], [f64; 3], [f64; 3]) {
    let mut u: [f64; 10] = std::array::from_fn(|_| rng.sample(rand_distr::StandardNormal));
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in u.iter_mut() {
        *x /= norm;
    }
    unpack(&u)
}
