//! The symplectic form, mode orderings, and the orthogonal symplectic group.
//!
//! The group `Sp(2m) ∩ O(2m)` of passive symplectic matrices is isomorphic to
//! `U(m)`: a unitary with blocks `u_i` maps to the real matrix with blocks
//! `s_i = [[Re u_i, Im u_i], [−Im u_i, Re u_i]]`. All constructions here work
//! in the blocked quadrature basis (all Q's, then all P's, per subsystem,
//! system before environment); the interleaved basis `(Q₁,P₁,…)` appears only
//! at I/O boundaries via [`reorder`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    commutator, max_abs, max_abs_complex, residual, ComplexMatrix, RealMatrix, Tolerance, C64,
};

/// Ordering of the `2m` quadratures of an `m`-mode system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeOrdering {
    /// `(Q₁,…,Q_m, P₁,…,P_m)`; σ = [[0, I], [−I, 0]].
    Blocked,
    /// `(Q₁,P₁,…,Q_m,P_m)`; σ = ⊕ [[0, 1], [−1, 0]].
    Interleaved,
}

impl std::fmt::Display for ModeOrdering {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModeOrdering::Blocked => write!(f, "blocked"),
            ModeOrdering::Interleaved => write!(f, "interleaved"),
        }
    }
}

/// The standard symplectic form σ_{2m} on `m` modes in a fixed ordering.
#[derive(Debug, Clone)]
pub struct SymplecticForm {
    modes: usize,
    ordering: ModeOrdering,
    matrix: RealMatrix,
}

impl SymplecticForm {
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn ordering(&self) -> ModeOrdering {
        self.ordering
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }
}

/// σ_{2m} in the requested ordering.
pub fn standard_form(modes: usize, ordering: ModeOrdering) -> SymplecticForm {
    assert!(modes >= 1, "at least one mode");
    let matrix = sigma_matrix(modes, ordering);
    SymplecticForm {
        modes,
        ordering,
        matrix,
    }
}

pub(crate) fn sigma_matrix(modes: usize, ordering: ModeOrdering) -> RealMatrix {
    let mut m = RealMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        let (q, p) = match ordering {
            ModeOrdering::Blocked => (k, modes + k),
            ModeOrdering::Interleaved => (2 * k, 2 * k + 1),
        };
        m[(q, p)] = 1.0;
        m[(p, q)] = -1.0;
    }
    m
}

/// Blocked σ_{2m}, the canonical internal form.
pub fn sigma_blocked(modes: usize) -> RealMatrix {
    sigma_matrix(modes, ModeOrdering::Blocked)
}

/// σ_{2n} ⊕ σ_{2l}: the form in the split basis
/// `(Q_sys, P_sys, Q_env, P_env)` of a system/environment partition.
pub fn sigma_split(sys_modes: usize, env_modes: usize) -> RealMatrix {
    let dim = 2 * (sys_modes + env_modes);
    let mut m = RealMatrix::zeros(dim, dim);
    for k in 0..sys_modes {
        m[(k, sys_modes + k)] = 1.0;
        m[(sys_modes + k, k)] = -1.0;
    }
    let off = 2 * sys_modes;
    for k in 0..env_modes {
        m[(off + k, off + env_modes + k)] = 1.0;
        m[(off + env_modes + k, off + k)] = -1.0;
    }
    m
}

/// Index permutation sending interleaved coordinates to blocked ones:
/// blocked position `j` holds interleaved coordinate `perm[j]`.
fn interleaved_to_blocked_perm(modes: usize) -> Vec<usize> {
    let mut perm = vec![0usize; 2 * modes];
    for k in 0..modes {
        perm[k] = 2 * k;
        perm[modes + k] = 2 * k + 1;
    }
    perm
}

/// Conjugates a `2m × 2m` matrix by the permutation between the two
/// orderings. A round trip is the identity.
pub fn reorder(m: &RealMatrix, from: ModeOrdering, to: ModeOrdering) -> Result<RealMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.nrows(), m.ncols()));
    }
    if m.nrows() % 2 != 0 {
        return Err(Error::OddDimension(m.nrows()));
    }
    if from == to {
        return Ok(m.clone());
    }
    let modes = m.nrows() / 2;
    let perm = interleaved_to_blocked_perm(modes);
    let out = match (from, to) {
        (ModeOrdering::Interleaved, ModeOrdering::Blocked) => {
            RealMatrix::from_fn(2 * modes, 2 * modes, |i, j| m[(perm[i], perm[j])])
        }
        (ModeOrdering::Blocked, ModeOrdering::Interleaved) => {
            let mut out = RealMatrix::zeros(2 * modes, 2 * modes);
            for i in 0..2 * modes {
                for j in 0..2 * modes {
                    out[(perm[i], perm[j])] = m[(i, j)];
                }
            }
            out
        }
        _ => unreachable!(),
    };
    Ok(out)
}

/// Reorders a split matrix (system block first, then environment block)
/// between orderings applied per subsystem, preserving the split layout.
pub fn reorder_split(
    m: &RealMatrix,
    sys_modes: usize,
    env_modes: usize,
    from: ModeOrdering,
    to: ModeOrdering,
) -> Result<RealMatrix> {
    let dim = 2 * (sys_modes + env_modes);
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: m.nrows(),
        });
    }
    if from == to {
        return Ok(m.clone());
    }
    // Position of (mode k, kind) within one subsystem of `modes` modes.
    let slot = |ordering: ModeOrdering, modes: usize, k: usize, is_p: bool| match ordering {
        ModeOrdering::Blocked => {
            if is_p {
                modes + k
            } else {
                k
            }
        }
        ModeOrdering::Interleaved => 2 * k + usize::from(is_p),
    };
    let mut to_from = vec![0usize; dim];
    for k in 0..sys_modes {
        for is_p in [false, true] {
            to_from[slot(to, sys_modes, k, is_p)] = slot(from, sys_modes, k, is_p);
        }
    }
    for k in 0..env_modes {
        for is_p in [false, true] {
            to_from[2 * sys_modes + slot(to, env_modes, k, is_p)] =
                2 * sys_modes + slot(from, env_modes, k, is_p);
        }
    }
    Ok(RealMatrix::from_fn(dim, dim, |i, j| {
        m[(to_from[i], to_from[j])]
    }))
}

/// Reorders a vector of `2m` quadrature components between orderings.
pub fn reorder_vector(
    v: &nalgebra::DVector<f64>,
    from: ModeOrdering,
    to: ModeOrdering,
) -> Result<nalgebra::DVector<f64>> {
    if v.len() % 2 != 0 {
        return Err(Error::OddDimension(v.len()));
    }
    if from == to {
        return Ok(v.clone());
    }
    let modes = v.len() / 2;
    let perm = interleaved_to_blocked_perm(modes);
    let out = match (from, to) {
        (ModeOrdering::Interleaved, ModeOrdering::Blocked) => {
            nalgebra::DVector::from_fn(2 * modes, |i, _| v[perm[i]])
        }
        (ModeOrdering::Blocked, ModeOrdering::Interleaved) => {
            let mut out = nalgebra::DVector::zeros(2 * modes);
            for i in 0..2 * modes {
                out[perm[i]] = v[i];
            }
            out
        }
        _ => unreachable!(),
    };
    Ok(out)
}

/// Diagnostics of an `Sp(2m) ∩ O(2m)` membership test.
///
/// `commutator_residual` reports `‖Mσ − σM‖`; by the 2-out-of-3 property it
/// is small whenever the other two residuals are.
#[derive(Debug, Clone, Copy)]
pub struct MembershipCheck {
    pub orthogonality_residual: f64,
    pub symplecticity_residual: f64,
    pub commutator_residual: f64,
    pub is_member: bool,
}

/// Tests `MMᵀ = I` and `MσMᵀ = σ` against the given form.
pub fn is_orthogonal_symplectic(
    m: &RealMatrix,
    sigma: &RealMatrix,
    tol: &Tolerance,
) -> MembershipCheck {
    let dim = m.nrows();
    let id = RealMatrix::identity(dim, dim);
    let orth = residual(&(m * m.transpose()), &id);
    let symp = residual(&(m * sigma * m.transpose()), sigma);
    let comm = max_abs(&commutator(m, sigma));
    let bound = tol.threshold_at_least_unit(max_abs(m));
    MembershipCheck {
        orthogonality_residual: orth,
        symplecticity_residual: symp,
        commutator_residual: comm,
        is_member: m.is_square() && orth <= bound && symp <= bound,
    }
}

/// An element of `Sp(2m) ∩ O(2m)`, stored in the blocked basis with an
/// explicit system/environment split `(n, l)`, `n + l = m`.
///
/// With a nontrivial split the matrix lives in the basis
/// `(Q_sys, P_sys, Q_env, P_env)` and its blocks `s₁…s₄` are the contiguous
/// submatrices used by the dilation equations.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalSymplectic {
    sys_modes: usize,
    env_modes: usize,
    matrix: RealMatrix,
}

impl OrthogonalSymplectic {
    /// Wraps a matrix after verifying membership against the split form.
    pub fn new(
        matrix: RealMatrix,
        sys_modes: usize,
        env_modes: usize,
        tol: &Tolerance,
    ) -> Result<Self> {
        let dim = 2 * (sys_modes + env_modes);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: matrix.nrows(),
            });
        }
        let check = is_orthogonal_symplectic(&matrix, &sigma_split(sys_modes, env_modes), tol);
        if !check.is_member {
            return Err(Error::NotOrthogonalSymplectic {
                orthogonality: check.orthogonality_residual,
                symplecticity: check.symplecticity_residual,
            });
        }
        Ok(OrthogonalSymplectic {
            sys_modes,
            env_modes,
            matrix,
        })
    }

    pub fn modes(&self) -> usize {
        self.sys_modes + self.env_modes
    }

    pub fn sys_modes(&self) -> usize {
        self.sys_modes
    }

    pub fn env_modes(&self) -> usize {
        self.env_modes
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    /// The symplectic form this element preserves: σ_{2n} ⊕ σ_{2l}.
    pub fn sigma(&self) -> RealMatrix {
        sigma_split(self.sys_modes, self.env_modes)
    }

    /// System block `s₁` (2n × 2n).
    pub fn s1(&self) -> RealMatrix {
        let n2 = 2 * self.sys_modes;
        self.matrix.view((0, 0), (n2, n2)).into()
    }

    /// System-to-environment block `s₂` (2n × 2l).
    pub fn s2(&self) -> RealMatrix {
        let n2 = 2 * self.sys_modes;
        let l2 = 2 * self.env_modes;
        self.matrix.view((0, n2), (n2, l2)).into()
    }

    /// Environment-to-system block `s₃` (2l × 2n).
    pub fn s3(&self) -> RealMatrix {
        let n2 = 2 * self.sys_modes;
        let l2 = 2 * self.env_modes;
        self.matrix.view((n2, 0), (l2, n2)).into()
    }

    /// Environment block `s₄` (2l × 2l).
    pub fn s4(&self) -> RealMatrix {
        let n2 = 2 * self.sys_modes;
        let l2 = 2 * self.env_modes;
        self.matrix.view((n2, n2), (l2, l2)).into()
    }

    /// Membership diagnostics against the split form.
    pub fn verify(&self, tol: &Tolerance) -> MembershipCheck {
        is_orthogonal_symplectic(&self.matrix, &self.sigma(), tol)
    }

    /// Reinterprets the element with a different system/environment split of
    /// the same total mode count, permuting the matrix accordingly.
    pub fn resplit(&self, sys_modes: usize, env_modes: usize) -> Result<Self> {
        if sys_modes + env_modes != self.modes() {
            return Err(Error::DimensionMismatch {
                expected: self.modes(),
                got: sys_modes + env_modes,
            });
        }
        let from = split_to_global_perm(self.sys_modes, self.env_modes);
        let to = split_to_global_perm(sys_modes, env_modes);
        let dim = 2 * self.modes();
        // global coordinate g sits at split position j with from[j] = g
        let mut inv_to = vec![0usize; dim];
        for (j, &g) in to.iter().enumerate() {
            inv_to[g] = j;
        }
        let mut out = RealMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                out[(inv_to[from[i]], inv_to[from[j]])] = self.matrix[(i, j)];
            }
        }
        Ok(OrthogonalSymplectic {
            sys_modes,
            env_modes,
            matrix: out,
        })
    }

    /// The matrix in the globally blocked basis `(Q₁…Q_m, P₁…P_m)`,
    /// forgetting the split.
    pub fn to_global_blocked(&self) -> RealMatrix {
        let perm = split_to_global_perm(self.sys_modes, self.env_modes);
        let dim = 2 * self.modes();
        let mut inv = vec![0usize; dim];
        for (k, &g) in perm.iter().enumerate() {
            inv[g] = k;
        }
        RealMatrix::from_fn(dim, dim, |i, j| self.matrix[(inv[i], inv[j])])
    }
}

/// Split position → global blocked coordinate map. Split position order is
/// `(Q_sys, P_sys, Q_env, P_env)`; global order is `(Q_all, P_all)`.
fn split_to_global_perm(sys_modes: usize, env_modes: usize) -> Vec<usize> {
    let m = sys_modes + env_modes;
    let mut perm = Vec::with_capacity(2 * m);
    for k in 0..sys_modes {
        perm.push(k); // Q_sys
    }
    for k in 0..sys_modes {
        perm.push(m + k); // P_sys
    }
    for k in 0..env_modes {
        perm.push(sys_modes + k); // Q_env
    }
    for k in 0..env_modes {
        perm.push(m + sys_modes + k); // P_env
    }
    perm
}

/// Real representation `[[Re c, Im c], [−Im c, Re c]]` of a complex block.
pub(crate) fn complex_to_real_blocks(c: &ComplexMatrix) -> RealMatrix {
    let (r, k) = c.shape();
    let mut out = RealMatrix::zeros(2 * r, 2 * k);
    for i in 0..r {
        for j in 0..k {
            let z = c[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + k)] = z.im;
            out[(i + r, j)] = -z.im;
            out[(i + r, j + k)] = z.re;
        }
    }
    out
}

/// Inverse of [`complex_to_real_blocks`]: recovers the complex block and
/// reports the deviation from the `[[a, b], [−b, a]]` shape.
pub(crate) fn real_blocks_to_complex(m: &RealMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    let (rows, cols) = m.shape();
    if rows % 2 != 0 || cols % 2 != 0 {
        return Err(Error::OddDimension(if rows % 2 != 0 { rows } else { cols }));
    }
    let (r, k) = (rows / 2, cols / 2);
    let mut out = ComplexMatrix::zeros(r, k);
    let mut worst = 0.0f64;
    for i in 0..r {
        for j in 0..k {
            let re1 = m[(i, j)];
            let re2 = m[(i + r, j + k)];
            let im1 = m[(i, j + k)];
            let im2 = -m[(i + r, j)];
            worst = worst.max((re1 - re2).abs()).max((im1 - im2).abs());
            out[(i, j)] = C64::new(0.5 * (re1 + re2), 0.5 * (im1 + im2));
        }
    }
    if worst > tol.threshold_at_least_unit(max_abs(m)) {
        return Err(Error::NotInCommutant(worst));
    }
    Ok(out)
}

fn ensure_unitary(u: &ComplexMatrix, tol: &Tolerance) -> Result<()> {
    if !u.is_square() {
        return Err(Error::NotSquare(u.nrows(), u.ncols()));
    }
    let dim = u.nrows();
    let res = max_abs_complex(&(u.adjoint() * u - ComplexMatrix::identity(dim, dim)));
    if res > tol.threshold_at_least_unit(1.0) {
        return Err(Error::NotUnitary(res));
    }
    Ok(())
}

/// The isomorphism `φ: U(m) → Sp(2m) ∩ O(2m)` with trivial split.
pub fn phi_iso(u: &ComplexMatrix, tol: &Tolerance) -> Result<OrthogonalSymplectic> {
    phi_iso_split(u, u.nrows(), 0, tol)
}

/// `φ` for `(n + l) × (n + l)` unitaries, producing the split block layout
/// `s_i = [[Re u_i, Im u_i], [−Im u_i, Re u_i]]`.
pub fn phi_iso_split(
    u: &ComplexMatrix,
    sys_modes: usize,
    env_modes: usize,
    tol: &Tolerance,
) -> Result<OrthogonalSymplectic> {
    if u.nrows() != sys_modes + env_modes {
        return Err(Error::DimensionMismatch {
            expected: sys_modes + env_modes,
            got: u.nrows(),
        });
    }
    ensure_unitary(u, tol)?;
    let (n, l) = (sys_modes, env_modes);
    let dim = 2 * (n + l);
    // Mode index → (Q position, P position) in the split basis.
    let qp = |k: usize| -> (usize, usize) {
        if k < n {
            (k, n + k)
        } else {
            (2 * n + (k - n), 2 * n + l + (k - n))
        }
    };
    let mut s = RealMatrix::zeros(dim, dim);
    for j in 0..n + l {
        let (qj, pj) = qp(j);
        for k in 0..n + l {
            let (qk, pk) = qp(k);
            let z = u[(j, k)];
            s[(qj, qk)] = z.re;
            s[(qj, pk)] = z.im;
            s[(pj, qk)] = -z.im;
            s[(pj, pk)] = z.re;
        }
    }
    OrthogonalSymplectic::new(s, n, l, tol)
}

/// Inverse of `φ`: the unique unitary mapping to the given element.
pub fn phi_inverse(s: &OrthogonalSymplectic, tol: &Tolerance) -> Result<ComplexMatrix> {
    let (n, l) = (s.sys_modes(), s.env_modes());
    let m = n + l;
    let mut u = ComplexMatrix::zeros(m, m);
    let u1 = real_blocks_to_complex(&s.s1(), tol)?;
    u.view_mut((0, 0), (n, n)).copy_from(&u1);
    if l > 0 {
        let u2 = real_blocks_to_complex(&s.s2(), tol)?;
        let u3 = real_blocks_to_complex(&s.s3(), tol)?;
        let u4 = real_blocks_to_complex(&s.s4(), tol)?;
        u.view_mut((0, n), (n, l)).copy_from(&u2);
        u.view_mut((n, 0), (l, n)).copy_from(&u3);
        u.view_mut((n, n), (l, l)).copy_from(&u4);
    }
    Ok(u)
}

/// Square `[[A, B], [−B, A]]` decomposition of a matrix commuting with σ.
#[derive(Debug, Clone)]
pub struct BlockForm {
    pub a: RealMatrix,
    pub b: RealMatrix,
}

/// Returns the `(A, B)` block form when `‖[M, σ]‖` is below tolerance, else
/// `None`. Matrices of this shape have even eigenvalue multiplicities.
pub fn block_form_check(m: &RealMatrix, tol: &Tolerance) -> Option<BlockForm> {
    if !m.is_square() || m.nrows() % 2 != 0 {
        return None;
    }
    let modes = m.nrows() / 2;
    let sigma = sigma_blocked(modes);
    let comm = max_abs(&commutator(m, &sigma));
    if comm > tol.threshold_at_least_unit(max_abs(m)) {
        return None;
    }
    let k = modes;
    let a = (m.view((0, 0), (k, k)) + m.view((k, k), (k, k))) * 0.5;
    let b = (m.view((0, k), (k, k)) - m.view((k, 0), (k, k))) * 0.5;
    Some(BlockForm { a, b })
}

/// Completes `(s₁, s₂)` satisfying the extension relations
/// `s₁σs₁ᵀ + s₂σs₂ᵀ = σ` and `s₁s₁ᵀ + s₂s₂ᵀ = I` to a full element of
/// `Sp(2(n+l)) ∩ O(2(n+l))`.
///
/// The rows `(u₁ u₂)` of the underlying unitary are completed by a greedy
/// orthonormalization of standard basis vectors (largest residual first,
/// phases fixed so the largest entry of each new row is real positive), which
/// pins the free environment gauge reproducibly.
pub fn extend_to_orthogonal_symplectic(
    s1: &RealMatrix,
    s2: &RealMatrix,
    tol: &Tolerance,
) -> Result<OrthogonalSymplectic> {
    if !s1.is_square() || s1.nrows() % 2 != 0 {
        return Err(Error::NotSquare(s1.nrows(), s1.ncols()));
    }
    if s2.nrows() != s1.nrows() || s2.ncols() % 2 != 0 {
        return Err(Error::DimensionMismatch {
            expected: s1.nrows(),
            got: s2.nrows(),
        });
    }
    let n = s1.nrows() / 2;
    let l = s2.ncols() / 2;

    let sigma_n = sigma_blocked(n);
    let sigma_l = if l > 0 {
        sigma_blocked(l)
    } else {
        RealMatrix::zeros(0, 0)
    };
    let symp_res = residual(
        &(s1 * &sigma_n * s1.transpose() + s2 * &sigma_l * s2.transpose()),
        &sigma_n,
    );
    let orth_res = residual(
        &(s1 * s1.transpose() + s2 * s2.transpose()),
        &RealMatrix::identity(2 * n, 2 * n),
    );
    let bound = tol.threshold_at_least_unit(max_abs(s1).max(max_abs(s2)));
    if symp_res > bound || orth_res > bound {
        return Err(Error::ExtensionRelationsViolated {
            orthogonality: orth_res,
            symplecticity: symp_res,
        });
    }

    let u1 = real_blocks_to_complex(s1, tol)?;
    let mut v = ComplexMatrix::zeros(n, n + l);
    v.view_mut((0, 0), (n, n)).copy_from(&u1);
    if l > 0 {
        let u2 = real_blocks_to_complex(s2, tol)?;
        v.view_mut((0, n), (n, l)).copy_from(&u2);
    }

    let completion = complete_unitary_rows(&v);
    phi_iso_split(&completion, n, l, tol)
}

/// Extends a matrix with orthonormal rows to a full unitary, deterministically.
fn complete_unitary_rows(v: &ComplexMatrix) -> ComplexMatrix {
    let (rows, dim) = v.shape();
    let mut basis: Vec<nalgebra::DVector<C64>> =
        (0..rows).map(|i| v.row(i).transpose().conjugate()).collect();
    // basis holds column vectors b with ⟨b, x⟩ = bᴴ x; the rows of V become
    // conjugated columns so that orthogonality matches the Hermitian product.
    while basis.len() < dim {
        let mut best: Option<(f64, nalgebra::DVector<C64>)> = None;
        for j in 0..dim {
            let mut cand = nalgebra::DVector::<C64>::zeros(dim);
            cand[j] = C64::new(1.0, 0.0);
            for b in &basis {
                let coeff = b.dotc(&cand);
                cand -= b * coeff;
            }
            let norm = cand.norm();
            if best.as_ref().map_or(true, |(bn, _)| norm > *bn) {
                best = Some((norm, cand));
            }
        }
        let (norm, mut vec) = best.expect("dim > 0");
        vec /= C64::new(norm, 0.0);
        // Second orthogonalization pass for numerical hygiene.
        for b in &basis {
            let coeff = b.dotc(&vec);
            vec -= b * coeff;
        }
        vec /= C64::new(vec.norm(), 0.0);
        // Phase fix: largest-magnitude entry real positive.
        let mut arg = 0usize;
        for i in 0..dim {
            if vec[i].norm() > vec[arg].norm() {
                arg = i;
            }
        }
        let phase = vec[arg] / C64::new(vec[arg].norm(), 0.0);
        vec /= phase;
        basis.push(vec);
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (i, b) in basis.iter().enumerate() {
        u.set_row(i, &b.transpose().conjugate());
    }
    u
}

/// Haar-like random unitary: QR of a complex Gaussian matrix with the phases
/// of the R diagonal pulled into Q.
pub fn random_unitary<R: rand::Rng>(dim: usize, rng: &mut R) -> ComplexMatrix {
    use rand_distr::StandardNormal;
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re / 2f64.sqrt(), im / 2f64.sqrt())
    });
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let phases = nalgebra::DVector::from_fn(dim, |i, _| {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            d / C64::new(d.norm(), 0.0)
        } else {
            C64::new(1.0, 0.0)
        }
    });
    q * ComplexMatrix::from_diagonal(&phases)
}

/// Seed-deterministic random element of `Sp(2m) ∩ O(2m)`.
pub fn random_orthogonal_symplectic(modes: usize, seed: u64) -> OrthogonalSymplectic {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let u = random_unitary(modes, &mut rng);
    phi_iso(&u, &Tolerance::default()).expect("random unitary maps into the group")
}
