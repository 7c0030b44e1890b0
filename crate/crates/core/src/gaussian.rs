//! Gaussian states `(d, γ)` and Gaussian channels `(X, Y)` at the
//! covariance-matrix level.
//!
//! A covariance matrix is physical iff `γ ⪰ iσ`; a channel is completely
//! positive iff `Y ⪰ iσ − iXσXᵀ`. Channels act as `γ ↦ XγXᵀ + Y`,
//! `d ↦ Xd`; the channel displacement is fixed to zero throughout. All
//! matrices use the blocked quadrature ordering.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::numerics::{
    commutator, is_psd_hermitian_embedding, max_abs, residual, sqrt_psd, symmetrize, PsdCheck,
    RealMatrix, Tolerance,
};
use crate::symplectic::{
    reorder, sigma_blocked, sigma_matrix, ModeOrdering, OrthogonalSymplectic,
};

/// An `n`-mode Gaussian state: displacement vector and covariance matrix in
/// blocked ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    displacement: DVector<f64>,
    covariance: RealMatrix,
}

impl GaussianState {
    /// Builds a state after validating `γ ⪰ iσ`.
    pub fn new(displacement: DVector<f64>, covariance: RealMatrix, tol: &Tolerance) -> Result<Self> {
        let state = GaussianState {
            displacement,
            covariance,
        };
        let check = state.validate(tol)?;
        if !check.is_valid {
            return Err(Error::InvalidState(format!(
                "uncertainty relation violated (min eigenvalue {:.3e})",
                check.min_eigenvalue
            )));
        }
        Ok(state)
    }

    /// A state with zero displacement.
    pub fn centered(covariance: RealMatrix, tol: &Tolerance) -> Result<Self> {
        let dim = covariance.nrows();
        GaussianState::new(DVector::zeros(dim), covariance, tol)
    }

    /// The vacuum: γ = I, d = 0.
    pub fn vacuum(modes: usize) -> Self {
        GaussianState {
            displacement: DVector::zeros(2 * modes),
            covariance: RealMatrix::identity(2 * modes, 2 * modes),
        }
    }

    pub fn modes(&self) -> usize {
        self.covariance.nrows() / 2
    }

    pub fn displacement(&self) -> &DVector<f64> {
        &self.displacement
    }

    pub fn covariance(&self) -> &RealMatrix {
        &self.covariance
    }

    /// Checks symmetry and the uncertainty relation, reporting the deciding
    /// eigenvalue.
    pub fn validate(&self, tol: &Tolerance) -> Result<StateValidity> {
        let dim = self.covariance.nrows();
        if self.covariance.ncols() != dim {
            return Err(Error::NotSquare(dim, self.covariance.ncols()));
        }
        if dim % 2 != 0 {
            return Err(Error::OddDimension(dim));
        }
        if self.displacement.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.displacement.len(),
            });
        }
        validate_covariance(&self.covariance, tol)
    }
}

/// Outcome of a state validity check.
#[derive(Debug, Clone, Copy)]
pub struct StateValidity {
    pub is_valid: bool,
    pub symmetry_residual: f64,
    /// Minimum eigenvalue of `γ − iσ`.
    pub min_eigenvalue: f64,
}

/// Validates a covariance matrix directly (symmetry plus `γ ⪰ iσ`).
pub fn validate_covariance(gamma: &RealMatrix, tol: &Tolerance) -> Result<StateValidity> {
    let dim = gamma.nrows();
    if gamma.ncols() != dim {
        return Err(Error::NotSquare(dim, gamma.ncols()));
    }
    if dim % 2 != 0 {
        return Err(Error::OddDimension(dim));
    }
    let symmetry_residual = residual(gamma, &gamma.transpose());
    if dim == 0 {
        return Ok(StateValidity {
            is_valid: true,
            symmetry_residual,
            min_eigenvalue: f64::INFINITY,
        });
    }
    let sigma = sigma_blocked(dim / 2);
    let check: PsdCheck = is_psd_hermitian_embedding(&symmetrize(gamma), &sigma, tol)?;
    let sym_ok = symmetry_residual <= tol.threshold_at_least_unit(max_abs(gamma));
    Ok(StateValidity {
        is_valid: sym_ok && check.is_psd,
        symmetry_residual,
        min_eigenvalue: check.min_eigenvalue,
    })
}

/// An `n`-mode Gaussian channel `Φ_{X,Y}` in blocked ordering, with zero
/// displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    x: RealMatrix,
    y: RealMatrix,
}

/// Outcome of a channel CP check.
#[derive(Debug, Clone, Copy)]
pub struct ChannelValidity {
    pub is_valid: bool,
    pub y_symmetry_residual: f64,
    /// Minimum eigenvalue of `Y − i(σ − XσXᵀ)`.
    pub min_eigenvalue: f64,
}

impl GaussianChannel {
    /// Builds a channel after validating complete positivity.
    pub fn new(x: RealMatrix, y: RealMatrix, tol: &Tolerance) -> Result<Self> {
        let channel = GaussianChannel { x, y };
        let check = channel.validate(tol)?;
        if !check.is_valid {
            return Err(Error::InvalidChannel(format!(
                "CP condition violated (Y symmetry residual {:.3e}, min eigenvalue {:.3e})",
                check.y_symmetry_residual, check.min_eigenvalue
            )));
        }
        Ok(channel)
    }

    /// Builds a channel without the CP check; used to represent candidate
    /// channels whose validity is itself the question.
    pub fn new_unchecked(x: RealMatrix, y: RealMatrix) -> Result<Self> {
        if !x.is_square() {
            return Err(Error::NotSquare(x.nrows(), x.ncols()));
        }
        if x.nrows() % 2 != 0 {
            return Err(Error::OddDimension(x.nrows()));
        }
        if y.nrows() != x.nrows() || y.ncols() != x.ncols() {
            return Err(Error::DimensionMismatch {
                expected: x.nrows(),
                got: y.nrows(),
            });
        }
        Ok(GaussianChannel { x, y })
    }

    /// The identity channel on `n` modes.
    pub fn identity(modes: usize) -> Self {
        GaussianChannel {
            x: RealMatrix::identity(2 * modes, 2 * modes),
            y: RealMatrix::zeros(2 * modes, 2 * modes),
        }
    }

    pub fn modes(&self) -> usize {
        self.x.nrows() / 2
    }

    pub fn x(&self) -> &RealMatrix {
        &self.x
    }

    pub fn y(&self) -> &RealMatrix {
        &self.y
    }

    /// Checks `Y = Yᵀ` and `Y − iσ + iXσXᵀ ⪰ 0`.
    pub fn validate(&self, tol: &Tolerance) -> Result<ChannelValidity> {
        let dim = self.x.nrows();
        if !self.x.is_square() || !self.y.is_square() || self.y.nrows() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.y.nrows(),
            });
        }
        if dim % 2 != 0 {
            return Err(Error::OddDimension(dim));
        }
        let y_symmetry_residual = residual(&self.y, &self.y.transpose());
        let sigma = sigma_blocked(dim / 2);
        // Y − i(σ − XσXᵀ) with the antisymmetric part Σ = σ − XσXᵀ.
        let cap_sigma = &sigma - &self.x * &sigma * self.x.transpose();
        let check = is_psd_hermitian_embedding(&symmetrize(&self.y), &cap_sigma, tol)?;
        let sym_ok = y_symmetry_residual <= tol.threshold_at_least_unit(max_abs(&self.y));
        Ok(ChannelValidity {
            is_valid: sym_ok && check.is_psd,
            y_symmetry_residual,
            min_eigenvalue: check.min_eigenvalue,
        })
    }

    /// Applies the channel: `(d, γ) ↦ (Xd, XγXᵀ + Y)`.
    pub fn apply(&self, state: &GaussianState, tol: &Tolerance) -> Result<GaussianState> {
        if state.modes() != self.modes() {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.modes(),
                got: 2 * state.modes(),
            });
        }
        let displacement = &self.x * state.displacement();
        let covariance = symmetrize(&(&self.x * state.covariance() * self.x.transpose() + &self.y));
        GaussianState::new(displacement, covariance, tol)
    }

    /// Composition `c₂ ∘ c₁`: `(X₂X₁, X₂Y₁X₂ᵀ + Y₂)`.
    pub fn compose(later: &GaussianChannel, first: &GaussianChannel) -> Result<GaussianChannel> {
        if later.modes() != first.modes() {
            return Err(Error::DimensionMismatch {
                expected: 2 * later.modes(),
                got: 2 * first.modes(),
            });
        }
        let x = &later.x * &first.x;
        let y = symmetrize(&(&later.x * &first.y * later.x.transpose() + &later.y));
        Ok(GaussianChannel { x, y })
    }
}

/// The unitary channel `Φ_{S,0}` of a symplectic matrix (blocked ordering).
///
/// Accepts any symplectic `S`, orthogonal or not; squeezers make perfectly
/// good unitary channels.
pub fn unitary_channel(s: &RealMatrix, tol: &Tolerance) -> Result<GaussianChannel> {
    if !s.is_square() || s.nrows() % 2 != 0 {
        return Err(Error::NotSquare(s.nrows(), s.ncols()));
    }
    let modes = s.nrows() / 2;
    let sigma = sigma_blocked(modes);
    let res = residual(&(s * &sigma * s.transpose()), &sigma);
    if res > tol.threshold_at_least_unit(max_abs(s).powi(2)) {
        return Err(Error::NotSymplectic(res));
    }
    Ok(GaussianChannel {
        x: s.clone(),
        y: RealMatrix::zeros(s.nrows(), s.ncols()),
    })
}

/// The unitary channel of a passive element, converted to the globally
/// blocked basis.
pub fn unitary_channel_from_passive(
    s: &OrthogonalSymplectic,
    tol: &Tolerance,
) -> Result<GaussianChannel> {
    unitary_channel(&s.to_global_blocked(), tol)
}

/// Two-mode beamsplitter of transmissivity `λ`:
/// `[[√λ·I₂, √(1−λ)·I₂], [√(1−λ)·I₂, −√λ·I₂]]` in the interleaved ordering
/// `(Q₁,P₁,Q₂,P₂)`, converted to the requested ordering.
pub fn beamsplitter(lambda: f64, ordering: ModeOrdering) -> Result<OrthogonalSymplectic> {
    if !(0.0..=1.0).contains(&lambda) || !lambda.is_finite() {
        return Err(Error::TransmissivityOutOfRange(lambda));
    }
    let a = lambda.sqrt();
    let b = (1.0 - lambda).sqrt();
    let interleaved = RealMatrix::from_row_slice(
        4,
        4,
        &[
            a, 0.0, b, 0.0, //
            0.0, a, 0.0, b, //
            b, 0.0, -a, 0.0, //
            0.0, b, 0.0, -a,
        ],
    );
    let tol = Tolerance::default();
    match ordering {
        // Interleaved (Q₁,P₁,Q₂,P₂) coincides with the split-blocked basis
        // of a one-mode system + one-mode environment.
        ModeOrdering::Interleaved => OrthogonalSymplectic::new(interleaved, 1, 1, &tol),
        ModeOrdering::Blocked => {
            let blocked = reorder(&interleaved, ModeOrdering::Interleaved, ModeOrdering::Blocked)?;
            OrthogonalSymplectic::new(blocked, 2, 0, &tol)
        }
    }
}

/// Additive Gaussian noise channel with per-mode transmissivities:
/// `X = ⊕√λᵢ` (doubled, blocked) and `Y = (I−XXᵀ)^{1/2} γ_E (I−XXᵀ)^{1/2}`,
/// which reduces to `(1−λ)γ_E` when all λᵢ coincide.
pub fn additive_channel(
    lambdas: &[f64],
    gamma_env: &RealMatrix,
    tol: &Tolerance,
) -> Result<GaussianChannel> {
    let n = lambdas.len();
    for &l in lambdas {
        if !(0.0..=1.0).contains(&l) || !l.is_finite() {
            return Err(Error::TransmissivityOutOfRange(l));
        }
    }
    let validity = validate_covariance(gamma_env, tol)?;
    if !validity.is_valid {
        return Err(Error::InvalidState(format!(
            "environment covariance invalid (min eigenvalue {:.3e})",
            validity.min_eigenvalue
        )));
    }
    if gamma_env.nrows() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            got: gamma_env.nrows(),
        });
    }
    let mut x = RealMatrix::zeros(2 * n, 2 * n);
    for (i, &l) in lambdas.iter().enumerate() {
        let root = l.sqrt();
        x[(i, i)] = root;
        x[(n + i, n + i)] = root;
    }
    let id = RealMatrix::identity(2 * n, 2 * n);
    let noise_root = sqrt_psd(&symmetrize(&(&id - &x * x.transpose())), tol)?;
    let y = symmetrize(&(&noise_root * gamma_env * &noise_root));
    GaussianChannel::new(x, y, tol)
}

/// A state is passive iff its covariance commutes with σ (no hidden
/// squeezing; thermal-like spectra).
pub fn is_passive_state(gamma: &RealMatrix, tol: &Tolerance) -> Result<bool> {
    let validity = validate_covariance(gamma, tol)?;
    if !validity.is_valid {
        return Err(Error::InvalidState(format!(
            "covariance invalid (min eigenvalue {:.3e})",
            validity.min_eigenvalue
        )));
    }
    if gamma.nrows() == 0 {
        return Ok(true);
    }
    let sigma = sigma_blocked(gamma.nrows() / 2);
    let comm = max_abs(&commutator(gamma, &sigma));
    Ok(comm <= tol.threshold_at_least_unit(max_abs(gamma)))
}

/// Seed-deterministic random Gaussian state.
///
/// Passive variant: `γ = O·diag(ν;ν)·Oᵀ` with a Haar-like `O ∈ Sp∩O` and
/// thermal occupations `νᵢ ≥ 1`. The squeezed variant additionally conjugates
/// the thermal core by `diag(e^r, e^{−r})` per mode with `0.2 ≤ |r| ≤ 1`,
/// which keeps the commutator `[γ, σ]` bounded away from zero.
pub fn random_state(modes: usize, squeezed: bool, seed: u64) -> GaussianState {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    random_state_with(modes, squeezed, &mut rng)
}

/// As [`random_state`] but drawing from a caller-owned generator.
pub fn random_state_with<R: rand::Rng>(modes: usize, squeezed: bool, rng: &mut R) -> GaussianState {
    let n = modes;
    let mut core = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let nu = 1.0 + 2.0 * rng.gen::<f64>();
        core[(i, i)] = nu;
        core[(n + i, n + i)] = nu;
    }
    if squeezed {
        for i in 0..n {
            let magnitude = 0.2 + 0.8 * rng.gen::<f64>();
            let r = if rng.gen::<bool>() { magnitude } else { -magnitude };
            let (eq, ep) = (r.exp(), (-r).exp());
            // Conjugation by diag(e^r, e^{−r}) scales the diagonal core.
            core[(i, i)] *= eq * eq;
            core[(n + i, n + i)] *= ep * ep;
        }
    }
    let o = crate::symplectic::random_unitary(n, rng);
    let rot = crate::symplectic::phi_iso(&o, &Tolerance::default())
        .expect("random unitary maps into the group");
    let gamma = symmetrize(&(rot.matrix() * core * rot.matrix().transpose()));
    GaussianState {
        displacement: DVector::zeros(2 * n),
        covariance: gamma,
    }
}

/// Commutator norm `‖[Y, σ]‖` used by the passivity tests.
pub(crate) fn sigma_commutator_norm(m: &RealMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let sigma = sigma_matrix(m.nrows() / 2, ModeOrdering::Blocked);
    max_abs(&commutator(m, &sigma))
}
