//! Tolerance-aware dense linear algebra primitives.
//!
//! Everything downstream (symplectic membership, dilation construction, the
//! beamsplitter normal form) reduces to a handful of primitives: SVD-based
//! pseudoinverse and rank, the unique PSD square root, kernel projectors, and
//! a positive-semidefiniteness test on Hermitian embeddings `S − iA` of a
//! (symmetric, antisymmetric) pair of real matrices.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

/// Dense real matrix, row-major semantics via `nalgebra`.
pub type RealMatrix = DMatrix<f64>;
/// Dense complex matrix.
pub type ComplexMatrix = DMatrix<Complex<f64>>;
/// Complex scalar shorthand.
pub type C64 = Complex<f64>;

/// Relative/absolute tolerance pair used by every rank and residual decision.
///
/// A quantity `r` measured against a reference scale `s` counts as zero when
/// `r ≤ rel·s + abs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-9,
            abs: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Self {
        assert!(rel >= 0.0 && abs >= 0.0, "tolerances must be nonnegative");
        Tolerance { rel, abs }
    }

    /// Threshold below which a residual measured at scale `scale` is zero.
    pub fn threshold(&self, scale: f64) -> f64 {
        self.rel * scale + self.abs
    }

    /// Threshold with the scale floored at 1, for residuals of matrices that
    /// are close to identity or otherwise O(1) by construction.
    pub fn threshold_at_least_unit(&self, scale: f64) -> f64 {
        self.threshold(scale.max(1.0))
    }
}

/// Largest absolute entry (max norm). Zero for empty matrices.
pub fn max_abs(m: &RealMatrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Largest absolute entry of a complex matrix.
pub fn max_abs_complex(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.norm()))
}

/// Max-norm of the difference of two equally sized matrices.
pub fn residual(a: &RealMatrix, b: &RealMatrix) -> f64 {
    max_abs(&(a - b))
}

/// Commutator `[a, b] = ab − ba`.
pub fn commutator(a: &RealMatrix, b: &RealMatrix) -> RealMatrix {
    a * b - b * a
}

pub(crate) fn ensure_finite(m: &RealMatrix) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub(crate) fn ensure_symmetric(m: &RealMatrix, tol: &Tolerance) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.nrows(), m.ncols()));
    }
    let asym = residual(m, &m.transpose());
    if asym > tol.threshold_at_least_unit(max_abs(m)) {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

pub(crate) fn ensure_antisymmetric(m: &RealMatrix, tol: &Tolerance) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.nrows(), m.ncols()));
    }
    let res = max_abs(&(m + m.transpose()));
    if res > tol.threshold_at_least_unit(max_abs(m)) {
        return Err(Error::NotAntisymmetric(res));
    }
    Ok(())
}

/// Exact symmetrization `(m + mᵀ)/2`, used to remove round-off drift from
/// products that are symmetric in exact arithmetic.
pub fn symmetrize(m: &RealMatrix) -> RealMatrix {
    (m + m.transpose()) * 0.5
}

/// Thin SVD `a = u · diag(sv) · v_t` with singular values sorted descending.
///
/// Backed by the Jacobi kernel in [`crate::jacobi`] (nalgebra's iterative SVD
/// mispairs factors for some rank-deficient inputs); any decomposition whose
/// recomposition residual is not at round-off level is rejected.
pub(crate) fn svd_real(a: &RealMatrix) -> Result<(RealMatrix, Vec<f64>, RealMatrix)> {
    let (u, sv, v) = crate::jacobi::jacobi_svd(a)?;
    let v_t = v.transpose();
    let d = RealMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&sv));
    let recompose = &u * &d * &v_t;
    let scale = max_abs(a).max(1.0);
    if residual(&recompose, a) > 1e-12 * scale {
        return Err(Error::SvdFailure);
    }
    Ok((u, sv, v_t))
}

/// Complex thin SVD `a = u · diag(sv) · v_t`, singular values descending,
/// with the same recomposition guard as [`svd_real`].
pub(crate) fn svd_complex(a: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<f64>, ComplexMatrix)> {
    let (u, sv, v) = crate::jacobi::jacobi_svd(a)?;
    let v_t = v.adjoint();
    let d = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        sv.len(),
        sv.iter().map(|&s| C64::new(s, 0.0)),
    ));
    let recompose = &u * &d * &v_t;
    let scale = max_abs_complex(a).max(1.0);
    if max_abs_complex(&(&recompose - a)) > 1e-12 * scale {
        return Err(Error::SvdFailure);
    }
    Ok((u, sv, v_t))
}

/// Moore–Penrose pseudoinverse `A⁺` with singular values below
/// `tol.rel·σ_max + tol.abs` treated as zero.
///
/// `A·A⁺` is then the orthogonal projection onto range(A) and `A⁺·A` the
/// projection onto range(Aᵀ).
pub fn pseudo_inverse(a: &RealMatrix, tol: &Tolerance) -> Result<RealMatrix> {
    ensure_finite(a)?;
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Ok(RealMatrix::zeros(cols, rows));
    }
    let (u, sv, v_t) = svd_real(a)?;
    let cut = tol.threshold(sv[0]);
    let inv_sigma = nalgebra::DVector::from_iterator(
        sv.len(),
        sv.iter().map(|&s| if s > cut { 1.0 / s } else { 0.0 }),
    );
    Ok(v_t.transpose() * DMatrix::from_diagonal(&inv_sigma) * u.transpose())
}

/// Number of singular values above `tol.rel·σ_max + tol.abs`.
pub fn numerical_rank(a: &RealMatrix, tol: &Tolerance) -> Result<usize> {
    ensure_finite(a)?;
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(0);
    }
    let (_, sv, _) = svd_real(a)?;
    let cut = tol.threshold(sv[0]);
    Ok(sv.iter().filter(|&&s| s > cut).count())
}

/// Orthogonal projector onto the (numerical) kernel of `a`, acting on the
/// domain ℝ^cols. Satisfies `P = Pᵀ`, `P² = P`, `aP ≈ 0` and
/// `rank(P) = cols − numerical_rank(a)`.
pub fn kernel_projector(a: &RealMatrix, tol: &Tolerance) -> Result<RealMatrix> {
    ensure_finite(a)?;
    let (rows, cols) = a.shape();
    if cols == 0 {
        return Ok(RealMatrix::zeros(0, 0));
    }
    if rows == 0 {
        return Ok(RealMatrix::identity(cols, cols));
    }
    let (_, sv, v_t) = svd_real(a)?;
    let cut = tol.threshold(sv[0]);
    // P = I − Σ v_i v_iᵀ over the retained right singular vectors.
    let mut p = RealMatrix::identity(cols, cols);
    for (i, &s) in sv.iter().enumerate() {
        if s > cut {
            let v_i = v_t.row(i).transpose();
            p -= &v_i * v_i.transpose();
        }
    }
    Ok(symmetrize(&p))
}

/// Unique symmetric PSD square root of a symmetric PSD matrix.
///
/// Eigenvalues below `−tol.rel·‖a‖ − tol.abs` are rejected as non-PSD;
/// eigenvalues within that threshold of zero (either sign) are flushed to
/// exactly zero before taking roots. Without the flush, round-off of size ε
/// in a rank-deficient input would surface as spurious √ε directions in the
/// root, wrecking downstream rank and pseudoinverse decisions.
pub fn sqrt_psd(a: &RealMatrix, tol: &Tolerance) -> Result<RealMatrix> {
    ensure_finite(a)?;
    ensure_symmetric(a, tol)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(RealMatrix::zeros(0, 0));
    }
    let (values, vectors) = symmetric_eigen_sorted(a)?;
    let scale = values.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
    let cut = tol.threshold(scale);
    let mut roots = nalgebra::DVector::from_row_slice(&values);
    for e in roots.iter_mut() {
        if *e < -cut {
            return Err(Error::NotPsd(*e));
        }
        *e = if *e <= cut { 0.0 } else { e.sqrt() };
    }
    let b = &vectors * DMatrix::from_diagonal(&roots) * vectors.transpose();
    Ok(symmetrize(&b))
}

/// Hermitian eigendecomposition with eigenpairs sorted descending and a
/// recomposition guard.
pub(crate) fn hermitian_eigen_sorted(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = h.nrows();
    if n == 0 {
        return Ok((Vec::new(), ComplexMatrix::zeros(0, 0)));
    }
    // Exact Hermitization kills the last bits of asymmetry round-off.
    let h = (h.adjoint() + h) * C64::new(0.5, 0.0);
    let (values, vectors) = crate::jacobi::jacobi_hermitian_eigen(&h)?;
    let lam = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        values.iter().map(|&e| C64::new(e, 0.0)),
    ));
    let recompose = &vectors * lam * vectors.adjoint();
    if max_abs_complex(&(&recompose - &h)) > 1e-12 * max_abs_complex(&h).max(1.0) {
        return Err(Error::EigenFailure);
    }
    Ok((values, vectors))
}

/// Eigenvalues of the Hermitian embedding `sreal − i·aanti`, ascending.
fn hermitian_embedding_eigenvalues(sreal: &RealMatrix, aanti: &RealMatrix) -> Result<Vec<f64>> {
    let n = sreal.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let h = ComplexMatrix::from_fn(n, n, |i, j| C64::new(sreal[(i, j)], -aanti[(i, j)]));
    let (mut ev, _) = hermitian_eigen_sorted(&h)?;
    ev.reverse();
    Ok(ev)
}

/// Outcome of a PSD test, with the eigenvalue that decided it.
#[derive(Debug, Clone, Copy)]
pub struct PsdCheck {
    pub is_psd: bool,
    /// Minimum eigenvalue of the Hermitian embedding (`+∞` for 0×0 input).
    pub min_eigenvalue: f64,
    /// Scale `‖S − iA‖` the tolerance was applied to.
    pub scale: f64,
}

/// Decides `sreal − i·aanti ⪰ 0` for symmetric `sreal` and antisymmetric
/// `aanti` of equal even dimension.
///
/// With `aanti = σ` this is the state condition `γ ⪰ iσ`; with
/// `aanti = σ − XσXᵀ` it is the channel CP condition `Y ⪰ iσ − iXσXᵀ`.
pub fn is_psd_hermitian_embedding(
    sreal: &RealMatrix,
    aanti: &RealMatrix,
    tol: &Tolerance,
) -> Result<PsdCheck> {
    ensure_finite(sreal)?;
    ensure_finite(aanti)?;
    ensure_symmetric(sreal, tol)?;
    ensure_antisymmetric(aanti, tol)?;
    if sreal.nrows() != aanti.nrows() {
        return Err(Error::DimensionMismatch {
            expected: sreal.nrows(),
            got: aanti.nrows(),
        });
    }
    if sreal.nrows() % 2 != 0 {
        return Err(Error::OddDimension(sreal.nrows()));
    }
    let ev = hermitian_embedding_eigenvalues(sreal, aanti)?;
    let (min_ev, scale) = match (ev.first(), ev.last()) {
        (Some(&lo), Some(&hi)) => (lo, lo.abs().max(hi.abs())),
        _ => (f64::INFINITY, 0.0),
    };
    Ok(PsdCheck {
        is_psd: min_ev >= -tol.threshold(scale),
        min_eigenvalue: min_ev,
        scale,
    })
}

/// Symmetric eigendecomposition with eigenpairs sorted descending and a
/// recomposition guard.
///
/// Runs the Hermitian Jacobi kernel on the complex embedding; all rotations
/// stay real for real symmetric input, so taking real parts is exact.
pub(crate) fn symmetric_eigen_sorted(a: &RealMatrix) -> Result<(Vec<f64>, RealMatrix)> {
    let sym = symmetrize(a);
    let n = a.nrows();
    let h = ComplexMatrix::from_fn(n, n, |i, j| C64::new(sym[(i, j)], 0.0));
    let (values, vectors_c) = crate::jacobi::jacobi_hermitian_eigen(&h)?;
    let vectors = RealMatrix::from_fn(n, n, |i, j| vectors_c[(i, j)].re);
    let lam = RealMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&values));
    let recompose = &vectors * lam * vectors.transpose();
    if residual(&recompose, &sym) > 1e-12 * max_abs(&sym).max(1.0) {
        return Err(Error::EigenFailure);
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn diag(entries: &[f64]) -> RealMatrix {
        RealMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(entries))
    }

    /// σ₂ = [[0, 1], [−1, 0]].
    fn sigma2() -> RealMatrix {
        RealMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])
    }

    #[test]
    fn pseudo_inverse_diagonal() {
        let a = diag(&[2.0, 0.0]);
        let p = pseudo_inverse(&a, &tol()).unwrap();
        assert_abs_diff_eq!(p, diag(&[0.5, 0.0]), epsilon = 1e-14);
    }

    #[test]
    fn pseudo_inverse_identity() {
        let a = RealMatrix::identity(4, 4);
        let p = pseudo_inverse(&a, &tol()).unwrap();
        assert_abs_diff_eq!(p, a, epsilon = 1e-14);
    }

    #[test]
    fn pseudo_inverse_rank_one_penrose() {
        // Oracle: the four Penrose conditions checked by substitution.
        let a = RealMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let p = pseudo_inverse(&a, &tol()).unwrap();
        let expected = RealMatrix::from_row_slice(2, 2, &[0.25, 0.25, 0.25, 0.25]);
        assert_abs_diff_eq!(p, expected, epsilon = 1e-12);
        assert_penrose(&a, &p, 1e-12);
    }

    fn assert_penrose(a: &RealMatrix, p: &RealMatrix, eps: f64) {
        assert!(residual(&(a * p * a), a) <= eps, "AA⁺A = A violated");
        assert!(residual(&(p * a * p), p) <= eps, "A⁺AA⁺ = A⁺ violated");
        let ap = a * p;
        assert!(residual(&ap.transpose(), &ap) <= eps, "(AA⁺)ᵀ = AA⁺ violated");
        let pa = p * a;
        assert!(residual(&pa.transpose(), &pa) <= eps, "(A⁺A)ᵀ = A⁺A violated");
    }

    #[test]
    fn pseudo_inverse_rejects_non_finite() {
        let a = RealMatrix::from_row_slice(1, 1, &[f64::NAN]);
        assert!(matches!(pseudo_inverse(&a, &tol()), Err(Error::NonFinite)));
    }

    #[test]
    fn pseudo_inverse_empty() {
        let a = RealMatrix::zeros(4, 0);
        let p = pseudo_inverse(&a, &tol()).unwrap();
        assert_eq!(p.shape(), (0, 4));
    }

    #[test]
    fn sqrt_psd_diagonal() {
        let b = sqrt_psd(&diag(&[4.0, 9.0]), &tol()).unwrap();
        assert_abs_diff_eq!(b, diag(&[2.0, 3.0]), epsilon = 1e-12);
        let z = sqrt_psd(&RealMatrix::zeros(2, 2), &tol()).unwrap();
        assert_abs_diff_eq!(z, RealMatrix::zeros(2, 2), epsilon = 1e-15);
    }

    #[test]
    fn sqrt_psd_squares_back() {
        // Eigenvalues √3 and 1 on (1,1)/√2, (1,−1)/√2.
        let a = RealMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let b = sqrt_psd(&a, &tol()).unwrap();
        assert!(residual(&(&b * &b), &a) <= 1e-10);
        let s3 = 3.0f64.sqrt();
        let expected = RealMatrix::from_row_slice(
            2,
            2,
            &[
                (s3 + 1.0) / 2.0,
                (s3 - 1.0) / 2.0,
                (s3 - 1.0) / 2.0,
                (s3 + 1.0) / 2.0,
            ],
        );
        assert_abs_diff_eq!(b, expected, epsilon = 1e-12);
    }

    #[test]
    fn sqrt_psd_rejects_asymmetric_and_negative() {
        let a = RealMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(sqrt_psd(&a, &tol()), Err(Error::NotSymmetric(_))));
        assert!(matches!(
            sqrt_psd(&diag(&[1.0, -0.5]), &tol()),
            Err(Error::NotPsd(_))
        ));
    }

    #[test]
    fn sqrt_psd_clamps_tiny_negatives() {
        let a = diag(&[1.0, -1e-13]);
        let b = sqrt_psd(&a, &tol()).unwrap();
        assert_abs_diff_eq!(b, diag(&[1.0, 0.0]), epsilon = 1e-12);
    }

    #[test]
    fn numerical_rank_cases() {
        assert_eq!(numerical_rank(&diag(&[1.0, 1e-15]), &tol()).unwrap(), 1);
        assert_eq!(
            numerical_rank(&RealMatrix::identity(6, 6), &tol()).unwrap(),
            6
        );
        // Singular values of [[1,1],[1,1]] are {2, 0} (oracle: 2×2 SVD by hand).
        let a = RealMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(numerical_rank(&a, &tol()).unwrap(), 1);
    }

    #[test]
    fn kernel_projector_cases() {
        let p = kernel_projector(&diag(&[2.0, 0.0]), &tol()).unwrap();
        assert_abs_diff_eq!(p, diag(&[0.0, 1.0]), epsilon = 1e-12);

        let p = kernel_projector(&RealMatrix::identity(2, 2), &tol()).unwrap();
        assert_abs_diff_eq!(p, RealMatrix::zeros(2, 2), epsilon = 1e-12);

        // Kernel of [[1,1],[1,1]] is spanned by (1,−1)/√2.
        let a = RealMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let p = kernel_projector(&a, &tol()).unwrap();
        let expected = RealMatrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5]);
        assert_abs_diff_eq!(p, expected, epsilon = 1e-12);
        assert!(residual(&(&p * &p), &p) <= 1e-12);
        assert!(max_abs(&(&a * &p)) <= 1e-12);
    }

    #[test]
    fn psd_embedding_vacuum_and_squeezed() {
        let id = RealMatrix::identity(2, 2);
        let check = is_psd_hermitian_embedding(&id, &sigma2(), &tol()).unwrap();
        assert!(check.is_psd);
        assert_abs_diff_eq!(check.min_eigenvalue, 0.0, epsilon = 1e-12);

        let half = &id * 0.5;
        let check = is_psd_hermitian_embedding(&half, &sigma2(), &tol()).unwrap();
        assert!(!check.is_psd);
        assert_abs_diff_eq!(check.min_eigenvalue, -0.5, epsilon = 1e-12);

        // [[4, −i], [i, 0.25]] has det 0, trace 4.25: eigenvalues {0, 4.25}.
        let squeezed = diag(&[4.0, 0.25]);
        let check = is_psd_hermitian_embedding(&squeezed, &sigma2(), &tol()).unwrap();
        assert!(check.is_psd);
        assert_abs_diff_eq!(check.min_eigenvalue, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn psd_embedding_rejects_bad_inputs() {
        let id = RealMatrix::identity(2, 2);
        assert!(is_psd_hermitian_embedding(&sigma2(), &sigma2(), &tol()).is_err());
        assert!(is_psd_hermitian_embedding(&id, &id, &tol()).is_err());
    }

    /// Random matrix with a planted rank, via A = U diag(s) Vᵀ.
    fn planted_rank_matrix(rows: usize, cols: usize, rank: usize, seed: u64) -> RealMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let dim = rows.max(cols);
        let mut gauss = || RealMatrix::from_fn(dim, dim, |_, _| rng.gen::<f64>() - 0.5);
        let qu = gauss().qr().q();
        let qv = gauss().qr().q();
        let mut s = RealMatrix::zeros(rows, cols);
        for i in 0..rank.min(rows).min(cols) {
            s[(i, i)] = 0.5 + (i as f64);
        }
        qu.view((0, 0), (rows, rows)) * s * qv.view((0, 0), (cols, cols)).transpose()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn penrose_conditions_all_rank_profiles(
            rows in 1usize..7,
            cols in 1usize..7,
            rank_frac in 0.0f64..=1.0,
            seed in any::<u64>(),
        ) {
            let rank = ((rows.min(cols) as f64) * rank_frac).round() as usize;
            let a = planted_rank_matrix(rows, cols, rank, seed);
            let p = pseudo_inverse(&a, &tol()).unwrap();
            assert_penrose(&a, &p, 1e-9);
        }

        #[test]
        fn sqrt_psd_squares_to_input(n in 1usize..7, seed in any::<u64>()) {
            let g = planted_rank_matrix(n, n, n, seed);
            let a = symmetrize(&(&g * g.transpose()));
            let b = sqrt_psd(&a, &tol()).unwrap();
            prop_assert!(residual(&(&b * &b), &a) <= 1e-9 * max_abs(&a).max(1.0));
        }

        #[test]
        fn kernel_projector_invariants(
            rows in 1usize..7,
            cols in 1usize..7,
            rank_frac in 0.0f64..=1.0,
            seed in any::<u64>(),
        ) {
            let rank = ((rows.min(cols) as f64) * rank_frac).round() as usize;
            let a = planted_rank_matrix(rows, cols, rank, seed);
            let p = kernel_projector(&a, &tol()).unwrap();
            prop_assert!(residual(&p.transpose(), &p) <= 1e-9);
            prop_assert!(residual(&(&p * &p), &p) <= 1e-9);
            prop_assert!(max_abs(&(&a * &p)) <= 1e-9 * max_abs(&a).max(1.0));
            let r = numerical_rank(&a, &tol()).unwrap();
            let pr = numerical_rank(&p, &tol()).unwrap();
            prop_assert_eq!(r + pr, cols);
        }
    }
}
