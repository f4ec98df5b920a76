//! Small dense 4×4 helpers shared by every module.
//!
//! Everything is stored as `Matrix4<Complex<f64>>`; real representations simply
//! carry zero imaginary parts. Residuals throughout the crate are max-abs entry
//! norms.

use nalgebra::{Complex, DMatrix, Matrix4, SymmetricEigen, Vector4};
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;
pub type CMat4 = Matrix4<C64>;
pub type RMat4 = Matrix4<f64>;

pub const I: C64 = Complex { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

pub fn identity() -> CMat4 {
    CMat4::identity()
}

pub fn zeros() -> CMat4 {
    CMat4::zeros()
}

pub fn complexify(m: &RMat4) -> CMat4 {
    m.map(c)
}

pub fn real_part(m: &CMat4) -> RMat4 {
    m.map(|z| z.re)
}

pub fn max_abs(m: &CMat4) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_real(m: &RMat4) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn max_imag(m: &CMat4) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.im.abs()))
}

/// True when every imaginary part is exactly zero.
pub fn is_exactly_real(m: &CMat4) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

pub fn trace(m: &CMat4) -> C64 {
    m.trace()
}

pub fn hermiticity_residual(m: &CMat4) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn unitarity_residual(u: &CMat4) -> f64 {
    max_abs(&(u * u.adjoint() - identity()))
}

/// Symmetrized copy `(M + M⁺)/2`.
pub fn hermitian_part(m: &CMat4) -> CMat4 {
    (m + m.adjoint()) * c(0.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("Hermitian eigensolver did not converge")]
pub struct NoConvergence;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted descending.
///
/// Inputs with identically zero imaginary parts go through the real symmetric
/// solver, so real inputs produce exactly real eigenvectors.
pub fn hermitian_eigen(m: &CMat4) -> Result<(Vector4<f64>, CMat4), NoConvergence> {
    const MAX_ITER: usize = 1000;
    let h = hermitian_part(m);
    let (values, vectors) = if is_exactly_real(&h) {
        let eig = SymmetricEigen::try_new(real_part(&h), f64::EPSILON, MAX_ITER).ok_or(NoConvergence)?;
        (eig.eigenvalues, complexify(&eig.eigenvectors))
    } else {
        let eig = SymmetricEigen::try_new(h, f64::EPSILON, MAX_ITER).ok_or(NoConvergence)?;
        (eig.eigenvalues, eig.eigenvectors)
    };

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let sorted_values = Vector4::from_fn(|i, _| values[order[i]]);
    let sorted_vectors = CMat4::from_fn(|r, col| vectors[(r, order[col])]);
    Ok((sorted_values, sorted_vectors))
}

/// Finds the (one-dimensional) solution space of `A_k X − X B_k = 0` for all k.
///
/// Returns the normalized null vector reshaped into a 4×4 matrix, or `None`
/// when the system has no nonzero solution or the solution is not unique up to
/// scale.
pub fn solve_intertwining(lhs: &[CMat4], rhs: &[CMat4]) -> Option<CMat4> {
    assert_eq!(lhs.len(), rhs.len());
    let rows = 16 * lhs.len();
    // Column-major vec: X[(r, col)] ↦ col * 4 + r.
    let mut sys = DMatrix::<C64>::zeros(rows, 16);
    for (k, (a, b)) in lhs.iter().zip(rhs).enumerate() {
        for i in 0..4 {
            for col in 0..4 {
                let row = 16 * k + col * 4 + i;
                for r in 0..4 {
                    sys[(row, col * 4 + r)] += a[(i, r)];
                    sys[(row, r * 4 + i)] -= b[(r, col)];
                }
            }
        }
    }
    let scale = sys.iter().fold(0.0f64, |acc, z| acc.max(z.norm())).max(1.0);
    let svd = sys.svd(false, true);
    let v_t = svd.v_t?;
    let sv = &svd.singular_values;

    let mut idx: Vec<usize> = (0..sv.len()).collect();
    idx.sort_by(|&a, &b| sv[a].total_cmp(&sv[b]));
    let (smallest, second) = (sv[idx[0]], sv[idx[1]]);
    if smallest > 1e-9 * scale || second < 1e-6 * scale {
        return None;
    }
    // Rows of V⁺ are conjugated right singular vectors.
    let row = v_t.row(idx[0]);
    Some(CMat4::from_fn(|r, col| row[col * 4 + r].conj()))
}

/// Haar-like random unitary from the QR factorization of a Gaussian matrix.
/// With `real = true` the result is a real orthogonal matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, real: bool) -> CMat4 {
    let g = CMat4::from_fn(|_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = if real { 0.0 } else { rng.sample(StandardNormal) };
        Complex::new(re, im)
    });
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // Fix the phase ambiguity of QR so the distribution is uniform.
    let phases = CMat4::from_fn(|i, j| {
        if i == j {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / c(d.norm())
            } else {
                c(1.0)
            }
        } else {
            c(0.0)
        }
    });
    let u = q * phases;
    if real {
        complexify(&real_part(&u))
    } else {
        u
    }
}

/// Random matrix with entries drawn from the standard normal distribution.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, real: bool) -> CMat4 {
    CMat4::from_fn(|_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = if real { 0.0 } else { rng.sample(StandardNormal) };
        Complex::new(re, im)
    })
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, real: bool) -> CMat4 {
    hermitian_part(&random_matrix(rng, real))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eigen_sorted_descending_with_backward_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for real in [true, false] {
            for _ in 0..50 {
                let m = random_hermitian(&mut rng, real);
                let (vals, vecs) = hermitian_eigen(&m).unwrap();
                for i in 0..3 {
                    assert!(vals[i] >= vals[i + 1]);
                }
                for i in 0..4 {
                    let x = vecs.column(i);
                    let res = (m * x - x * c(vals[i])).iter().fold(0.0f64, |a, z| a.max(z.norm()));
                    assert!(res < 1e-10, "backward error {res}");
                }
            }
        }
    }

    #[test]
    fn real_input_gives_real_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = random_hermitian(&mut rng, true);
        let (_, vecs) = hermitian_eigen(&m).unwrap();
        assert!(is_exactly_real(&vecs));
    }

    #[test]
    fn intertwining_recovers_similarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        // A_k = T B_k T^-1 has the unique (up to scale) solution X = T when the
        // B_k generate the full matrix algebra.
        let b: Vec<CMat4> = (0..4).map(|_| random_matrix(&mut rng, false)).collect();
        let t = random_matrix(&mut rng, false);
        let t_inv = t.try_inverse().unwrap();
        let a: Vec<CMat4> = b.iter().map(|bk| t * bk * t_inv).collect();
        let x = solve_intertwining(&a, &b).unwrap();
        let ratio = x[(0, 0)] / t[(0, 0)];
        assert!(max_abs(&(x - t * ratio)) < 1e-10);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for real in [true, false] {
            let u = random_unitary(&mut rng, real);
            assert!(unitarity_residual(&u) < 1e-12);
            if real {
                assert!(is_exactly_real(&u));
            }
        }
    }
}
