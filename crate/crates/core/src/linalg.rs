//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const JACOBI_OFF_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a
/// Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen<const N: usize> {
    pub eigenvalues: SVector<f64, N>,
    pub eigenvectors: SMatrix<Complex64, N, N>,
    pub sweeps: usize,
}

fn off_diagonal_norm<const N: usize>(a: &SMatrix<Complex64, N, N>) -> f64 {
    let mut s = 0.0;
    for r in 0..N {
        for c in 0..N {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

pub fn hermitian_violation<const N: usize>(a: &SMatrix<Complex64, N, N>) -> f64 {
    (a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Cyclic Jacobi diagonalization. Sweeps visit pivots `(p, q)` in row-major
/// order, so identical input gives identical output. Converged when the
/// off-diagonal Frobenius norm drops below `JACOBI_OFF_TOL · max(1, ‖A‖_F)`.
///
/// Each eigenvector is phase-fixed so its first largest-magnitude component
/// is real and positive.
pub fn jacobi_eigh<const N: usize>(a: &SMatrix<Complex64, N, N>) -> Result<HermitianEigen<N>> {
    let asym = hermitian_violation(a);
    if asym > 1e-12 {
        return Err(Error::ContractViolation(format!(
            "matrix is not Hermitian (max |A − A†| = {asym:e})"
        )));
    }
    // Symmetrize away roundoff before rotating.
    let mut m = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let mut v = SMatrix::<Complex64, N, N>::identity();
    let tol = JACOBI_OFF_TOL * m.norm().max(1.0);

    let mut sweeps = 0;
    while off_diagonal_norm(&m) >= tol {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NumericalHealth(format!(
                "Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (off-norm {:e})",
                off_diagonal_norm(&m)
            )));
        }
        sweeps += 1;
        for p in 0..N {
            for q in (p + 1)..N {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &k| m[(i, i)].re.total_cmp(&m[(k, k)].re).then(i.cmp(&k)));

    let eigenvalues = SVector::<f64, N>::from_fn(|i, _| m[(order[i], order[i])].re);
    let mut eigenvectors = SMatrix::<Complex64, N, N>::zeros();
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src).into_owned();
        let mut lead = 0;
        for k in 1..N {
            // strict comparison keeps the first maximum
            if col[k].norm() > col[lead].norm() * (1.0 + 1e-12) {
                lead = k;
            }
        }
        let z = col[lead];
        if z.norm() > 0.0 {
            col *= z.conj() / z.norm();
        }
        eigenvectors.set_column(dst, &col);
    }

    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
        sweeps,
    })
}

/// Zeroes `m[(p, q)]` with a unitary rotation `G` on the (p, q) plane:
/// `m ← G† m G`, `v ← v G`.
fn rotate<const N: usize>(
    m: &mut SMatrix<Complex64, N, N>,
    v: &mut SMatrix<Complex64, N, N>,
    p: usize,
    q: usize,
) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // Phase e^{iφ} = apq / r; after scaling column q by e^{-iφ} the pivot is
    // the real number r and the usual real rotation applies.
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
    let g00 = Complex64::new(c, 0.0);
    let g01 = Complex64::new(s, 0.0);
    let g10 = -phase.conj() * s;
    let g11 = phase.conj() * c;

    for k in 0..N {
        let (akp, akq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = akp * g00 + akq * g10;
        m[(k, q)] = akp * g01 + akq * g11;
    }
    for k in 0..N {
        let (apk, aqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = g00.conj() * apk + g10.conj() * aqk;
        m[(q, k)] = g01.conj() * apk + g11.conj() * aqk;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);

    for k in 0..N {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * g00 + vkq * g10;
        v[(k, q)] = vkp * g01 + vkq * g11;
    }
}
