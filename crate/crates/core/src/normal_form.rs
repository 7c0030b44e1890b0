//! Beamsplitter normal form of passively dilatable channels.
//!
//! Any passively dilatable channel factors as passive-out ∘ additive-core ∘
//! passive-in: writing the commutant blocks of `X` as the complex matrix
//! `X₁ + iX₂` with singular value decomposition `D = U_G (X₁+iX₂) U_F`, the
//! unitaries map through φ to passive symplectics `G`, `F`, the channel's
//! transmissivities are `λᵢ = Dᵢᵢ²`, and
//!
//! ```text
//!   Φ = Φ_{Gᵀ,0} ∘ Φ_{D⊕D, (I−D²⊕D²)^{1/2} γ̃_E (I−D²⊕D²)^{1/2}} ∘ Φ_{Fᵀ,0}
//! ```
//!
//! with `γ̃_E = G γ_E Gᵀ` the environment state of the `l = n` dilation
//! rotated into the beamsplitter frame. `D` is unique (singular values);
//! `F` and `G` are not, so only reconstruction is asserted.

use crate::dilation::{check_dilatable, sigma_hat};
use crate::error::{Error, Result};
use crate::gaussian::{unitary_channel, validate_covariance, GaussianChannel};
use crate::numerics::{
    kernel_projector, pseudo_inverse, residual, sqrt_psd, svd_complex, symmetrize,
    ComplexMatrix, RealMatrix, Tolerance, C64,
};
use crate::symplectic::{block_form_check, phi_iso, OrthogonalSymplectic};

/// The factored form `(G, F, λ, γ̃_E)` of a passively dilatable channel.
#[derive(Debug, Clone)]
pub struct NormalForm {
    g: OrthogonalSymplectic,
    f: OrthogonalSymplectic,
    lambdas: Vec<f64>,
    gamma_env: RealMatrix,
}

impl NormalForm {
    /// Assembles a normal form from parts, enforcing the invariants
    /// (membership is carried by the factor types).
    pub fn from_parts(
        g: OrthogonalSymplectic,
        f: OrthogonalSymplectic,
        lambdas: Vec<f64>,
        gamma_env: RealMatrix,
        tol: &Tolerance,
    ) -> Result<Self> {
        let n = lambdas.len();
        if g.modes() != n || f.modes() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: g.modes(),
            });
        }
        for &l in &lambdas {
            if !(0.0..=1.0).contains(&l) || !l.is_finite() {
                return Err(Error::TransmissivityOutOfRange(l));
            }
        }
        let validity = validate_covariance(&gamma_env, tol)?;
        if !validity.is_valid {
            return Err(Error::InvalidState(format!(
                "rotated environment covariance invalid (min eigenvalue {:.3e})",
                validity.min_eigenvalue
            )));
        }
        if gamma_env.nrows() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                got: gamma_env.nrows(),
            });
        }
        Ok(NormalForm {
            g,
            f,
            lambdas,
            gamma_env,
        })
    }

    pub fn modes(&self) -> usize {
        self.lambdas.len()
    }

    /// Output-side passive factor; the output unitary channel is `Φ_{Gᵀ,0}`.
    pub fn g(&self) -> &OrthogonalSymplectic {
        &self.g
    }

    /// Input-side passive factor; the input unitary channel is `Φ_{Fᵀ,0}`.
    pub fn f(&self) -> &OrthogonalSymplectic {
        &self.f
    }

    /// Per-mode transmissivities, sorted descending by construction.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Rotated environment covariance `γ̃_E = G γ_E Gᵀ`.
    pub fn gamma_env(&self) -> &RealMatrix {
        &self.gamma_env
    }

    /// The additive core `(D⊕D, (I−D²⊕D²)^{1/2} γ̃_E (I−D²⊕D²)^{1/2})`.
    pub fn additive_core(&self) -> GaussianChannel {
        let n = self.modes();
        let mut d = RealMatrix::zeros(2 * n, 2 * n);
        let mut noise_root = RealMatrix::zeros(2 * n, 2 * n);
        for (i, &l) in self.lambdas.iter().enumerate() {
            let root = l.sqrt();
            let co = (1.0 - l).max(0.0).sqrt();
            d[(i, i)] = root;
            d[(n + i, n + i)] = root;
            noise_root[(i, i)] = co;
            noise_root[(n + i, n + i)] = co;
        }
        let y = symmetrize(&(&noise_root * &self.gamma_env * &noise_root));
        GaussianChannel::new_unchecked(d, y).expect("square matrices of matching even dimension")
    }

    /// Recomposes the channel `Φ_{Gᵀ,0} ∘ core ∘ Φ_{Fᵀ,0}`.
    pub fn reconstruct(&self, tol: &Tolerance) -> Result<GaussianChannel> {
        let g_out = unitary_channel(&self.g.matrix().transpose(), tol)?;
        let f_in = unitary_channel(&self.f.matrix().transpose(), tol)?;
        let core = self.additive_core();
        GaussianChannel::compose(&g_out, &GaussianChannel::compose(&core, &f_in)?)
    }
}

/// Computes the beamsplitter normal form of a passively dilatable channel.
pub fn compute_normal_form(channel: &GaussianChannel, tol: &Tolerance) -> Result<NormalForm> {
    let report = check_dilatable(channel, None, tol)?;
    if !report.conditions_hold() {
        return Err(Error::NotDilatable(format!(
            "conditions failed: {}",
            report.failing_conditions().join(", ")
        )));
    }
    let n = channel.modes();

    // The l = n dilation underlying the factorization.
    let s2 = sqrt_psd(&sigma_hat(channel), tol)?;
    let s2_pinv = pseudo_inverse(&s2, tol)?;
    let gamma_env = symmetrize(
        &(&s2_pinv * channel.y() * s2_pinv.transpose() + kernel_projector(&s2, tol)?),
    );

    // Commutant blocks of X and the SVD of X₁ + iX₂.
    let bf = block_form_check(channel.x(), tol).ok_or_else(|| {
        Error::NotInCommutant(crate::gaussian::sigma_commutator_norm(channel.x()))
    })?;
    let c = ComplexMatrix::from_fn(n, n, |i, j| C64::new(bf.a[(i, j)], bf.b[(i, j)]));
    let (w, singular_values, v_t) = svd_complex(&c)?;

    let mut lambdas = Vec::with_capacity(n);
    for &s in &singular_values {
        let lambda = s * s;
        if lambda > 1.0 + tol.threshold_at_least_unit(1.0) {
            return Err(Error::TransmissivityOutOfRange(lambda));
        }
        lambdas.push(lambda.clamp(0.0, 1.0));
    }

    let g = phi_iso(&w.adjoint(), tol)?;
    let f = phi_iso(&v_t.adjoint(), tol)?;
    let gamma_rotated = symmetrize(&(g.matrix() * &gamma_env * g.matrix().transpose()));

    NormalForm::from_parts(g, f, lambdas, gamma_rotated, tol)
}

/// Worst max-norm deviation of the reconstructed channel from the original,
/// over the `X` and `Y` parts.
pub fn reconstruction_residual(
    channel: &GaussianChannel,
    normal_form: &NormalForm,
    tol: &Tolerance,
) -> Result<f64> {
    let rebuilt = normal_form.reconstruct(tol)?;
    Ok(residual(rebuilt.x(), channel.x()).max(residual(rebuilt.y(), channel.y())))
}
