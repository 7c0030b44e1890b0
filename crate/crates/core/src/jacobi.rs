//! Jacobi decompositions for small dense matrices.
//!
//! The iterative SVD shipped with nalgebra 0.34 returns mispaired or
//! non-converged factors for some rank-deficient inputs (observed residuals
//! up to 1e-1 on 4×4 projectors), which is fatal for rank decisions. The
//! one-sided Jacobi SVD and the cyclic Jacobi Hermitian eigensolver below are
//! slower but unconditionally accurate at these sizes, and every caller in
//! [`crate::numerics`] re-verifies the recomposition residual anyway.

use nalgebra::{ComplexField, DMatrix};

use crate::error::{Error, Result};
use crate::numerics::C64;

const MAX_SWEEPS: usize = 64;
const CONVERGENCE: f64 = 1e-14;

/// One-sided Jacobi SVD: `a = u · diag(sv) · v.adjoint()` with `sv` sorted
/// descending, `u` having orthonormal columns and `v` unitary.
///
/// Returns thin factors: for an m×n input with k = min(m, n), `u` is m×k and
/// `v` is n×k.
pub(crate) fn jacobi_svd<T>(a: &DMatrix<T>) -> Result<(DMatrix<T>, Vec<f64>, DMatrix<T>)>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let (m, n) = a.shape();
    if m < n {
        let (u, sv, v) = jacobi_svd(&a.adjoint())?;
        return Ok((v, sv, u));
    }
    // m ≥ n from here on.
    let mut work = a.clone();
    let mut v = DMatrix::<T>::identity(n, n);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let col_p = work.column(p);
                let col_q = work.column(q);
                let app = col_p.dotc(&col_p).real();
                let aqq = col_q.dotc(&col_q).real();
                let apq = col_p.dotc(&col_q);
                let off = apq.modulus();
                if off <= CONVERGENCE * (app * aqq).sqrt() || off == 0.0 {
                    continue;
                }
                rotated = true;
                // Phase that makes ⟨A_p, A_q⟩ real positive, then a real
                // Givens rotation that orthogonalizes the pair.
                let phase = apq.unscale(off);
                let tau = (aqq - app) / (2.0 * off);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (c_t, s_t) = (T::from_real(c), T::from_real(s));
                for i in 0..m {
                    let wp = work[(i, p)];
                    let wq = work[(i, q)] * phase.conjugate();
                    work[(i, p)] = wp * c_t - wq * s_t;
                    work[(i, q)] = (wp * s_t + wq * c_t) * phase;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)] * phase.conjugate();
                    v[(i, p)] = vp * c_t - vq * s_t;
                    v[(i, q)] = (vp * s_t + vq * c_t) * phase;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdFailure);
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| work.column(j).norm()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite norms"));

    let mut u = DMatrix::<T>::zeros(m, n);
    let mut v_sorted = DMatrix::<T>::zeros(n, n);
    let mut sv = Vec::with_capacity(n);
    let sigma_max = norms[order[0]];
    for (pos, &j) in order.iter().enumerate() {
        sv.push(norms[j]);
        v_sorted.set_column(pos, &v.column(j));
        if norms[j] > sigma_max * 1e-300 && norms[j] > 0.0 {
            u.set_column(pos, &(work.column(j) / T::from_real(norms[j])));
        }
    }
    // Columns with vanishing singular value get a deterministic orthonormal
    // completion so that u always has orthonormal columns.
    complete_orthonormal_columns(&mut u, &sv, sigma_max);
    Ok((u, sv, v_sorted))
}

/// Replaces the columns of `u` whose singular value is negligible by an
/// orthonormal completion of the remaining ones (greedy over standard basis
/// vectors, largest residual first).
fn complete_orthonormal_columns<T>(u: &mut DMatrix<T>, sv: &[f64], sigma_max: f64)
where
    T: ComplexField<RealField = f64> + Copy,
{
    let (m, n) = u.shape();
    let cut = sigma_max * f64::EPSILON * (m as f64);
    let kept: Vec<usize> = (0..n).filter(|&j| sv[j] > cut).collect();
    let missing: Vec<usize> = (0..n).filter(|&j| sv[j] <= cut).collect();
    if missing.is_empty() {
        return;
    }
    let mut basis: Vec<nalgebra::DVector<T>> =
        kept.iter().map(|&j| u.column(j).into_owned()).collect();
    for &fill in &missing {
        let mut best: Option<(f64, nalgebra::DVector<T>)> = None;
        for e in 0..m {
            let mut cand = nalgebra::DVector::<T>::zeros(m);
            cand[e] = T::one();
            for b in &basis {
                let coeff = b.dotc(&cand);
                cand -= b * coeff;
            }
            let norm = cand.norm();
            if best.as_ref().map_or(true, |(bn, _)| norm > *bn) {
                best = Some((norm, cand));
            }
        }
        let (norm, mut vec) = best.expect("m > 0");
        vec /= T::from_real(norm);
        for b in &basis {
            let coeff = b.dotc(&vec);
            vec -= b * coeff;
        }
        vec /= T::from_real(vec.norm());
        u.set_column(fill, &vec);
        basis.push(vec);
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix:
/// `h = v · diag(values) · v.adjoint()` with real eigenvalues sorted
/// descending and unitary `v`.
pub(crate) fn jacobi_hermitian_eigen(h: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let n = h.nrows();
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let mut work = h.clone();
    let mut v = DMatrix::<C64>::identity(n, n);

    let scale = h.iter().fold(0.0f64, |acc, z| acc.max(z.norm())).max(1.0);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(work[(p, q)].norm());
            }
        }
        if off <= CONVERGENCE * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let hpq = work[(p, q)];
                let norm = hpq.norm();
                if norm <= CONVERGENCE * scale * 1e-2 {
                    continue;
                }
                let phase = hpq.unscale(norm);
                let hpp = work[(p, p)].re;
                let hqq = work[(q, q)].re;
                let tau = (hqq - hpp) / (2.0 * norm);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // Unitary rotation J on the (p,q) plane: column p gets
                // (c, −s·phasē), column q gets (s·phase, c·1)… applied as
                // H ← J† H J, V ← V J.
                let jpp = C64::new(c, 0.0);
                let jpq = phase * s;
                let jqp = -phase.conj() * s;
                let jqq = C64::new(c, 0.0);
                // Columns update: M ← M J.
                for i in 0..n {
                    let mp = work[(i, p)];
                    let mq = work[(i, q)];
                    work[(i, p)] = mp * jpp + mq * jqp;
                    work[(i, q)] = mp * jpq + mq * jqq;
                }
                // Rows update: M ← J† M.
                for i in 0..n {
                    let mp = work[(p, i)];
                    let mq = work[(q, i)];
                    work[(p, i)] = mp * jpp.conj() + mq * jqp.conj();
                    work[(q, i)] = mp * jpq.conj() + mq * jqq.conj();
                }
                work[(p, q)] = C64::new(0.0, 0.0);
                work[(q, p)] = C64::new(0.0, 0.0);
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * jpp + vq * jqp;
                    v[(i, q)] = vp * jpq + vq * jqq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::EigenFailure);
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| work[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).expect("finite eigenvalues"));
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    for (pos, &i) in order.iter().enumerate() {
        vectors.set_column(pos, &v.column(i));
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{max_abs_complex, ComplexMatrix, RealMatrix};

    #[test]
    fn svd_recovers_rank_deficient_projector() {
        // The 4×4 rank-1 projector class that breaks nalgebra's SVD.
        let p = RealMatrix::from_row_slice(
            4,
            4,
            &[
                0.011, -0.081, -0.013, -0.067, //
                -0.081, 0.574, 0.091, 0.479, //
                -0.013, 0.091, 0.014, 0.076, //
                -0.067, 0.479, 0.076, 0.400,
            ],
        );
        let (u, sv, v) = jacobi_svd(&p).unwrap();
        let d = RealMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&sv));
        let resid = (&u * &d * v.transpose() - &p).abs().max();
        assert!(resid <= 1e-12, "residual {resid}");
        assert!(sv.windows(2).all(|w| w[0] >= w[1]));
        let gram = u.transpose() * &u;
        assert!((gram - RealMatrix::identity(4, 4)).abs().max() <= 1e-12);
    }

    #[test]
    fn complex_svd_and_eigen_round_trip() {
        let c = ComplexMatrix::from_row_slice(
            3,
            3,
            &[
                C64::new(0.2, 0.1),
                C64::new(-0.4, 0.0),
                C64::new(0.3, -0.2),
                C64::new(0.0, 0.5),
                C64::new(0.1, 0.1),
                C64::new(-0.2, 0.3),
                C64::new(0.7, -0.1),
                C64::new(0.2, 0.2),
                C64::new(0.05, 0.0),
            ],
        );
        let (u, sv, v) = jacobi_svd(&c).unwrap();
        let d = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            3,
            sv.iter().map(|&s| C64::new(s, 0.0)),
        ));
        assert!(max_abs_complex(&(&u * &d * v.adjoint() - &c)) <= 1e-12);

        let h = &c * c.adjoint();
        let (values, vectors) = jacobi_hermitian_eigen(&h).unwrap();
        let lam = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            3,
            values.iter().map(|&e| C64::new(e, 0.0)),
        ));
        assert!(max_abs_complex(&(&vectors * lam * vectors.adjoint() - &h)) <= 1e-12);
        // Eigenvalues of CC† are the squared singular values.
        for (e, s) in values.iter().zip(sv.iter()) {
            assert!((e - s * s).abs() <= 1e-12);
        }
    }

    #[test]
    fn svd_wide_matrix() {
        let a = RealMatrix::from_row_slice(2, 5, &[1.0, 0.0, 2.0, 0.0, 0.5, 0.0, 3.0, 0.0, 1.0, 0.0]);
        let (u, sv, v) = jacobi_svd(&a).unwrap();
        assert_eq!(u.shape(), (2, 2));
        assert_eq!(v.shape(), (5, 2));
        let d = RealMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&sv));
        assert!((&u * &d * v.transpose() - &a).abs().max() <= 1e-12);
    }
}
