//! Passive dilations of Gaussian channels.
//!
//! A channel `(X, Y)` has a dilation with a passive unitary on `n + l` modes
//! iff `I − XXᵀ ⪰ 0`, `[X, σ] = 0`, `ker Y = ker(I − XXᵀ)` and
//! `2l ≥ rank(I − XXᵀ)`. Writing `Σ̂ = I − XXᵀ` and `Σ = σ − XσXᵀ`, a pair
//! `(s₂, γ_E)` realizes the channel iff
//!
//! ```text
//!   s₂ σ_{2l} s₂ᵀ = Σ,   s₂ s₂ᵀ = Σ̂,   s₂ γ_E s₂ᵀ = Y,
//! ```
//!
//! with `s₁ = X` fixed (the `−X` branch is an environment-gauge twin). The
//! construction sets `s₂ = Σ̂^{1/2}` (erasing zero columns when `l < n`,
//! zero-padding when `l > n`) and `γ_E = s₂⁺ Y s₂⁺ᵀ + P_ker(s₂)`. Minimal
//! dilations use `l = ½·rank Y` and are unique up to an orthogonal symplectic
//! rotation of the environment.

use crate::error::{Error, Result};
use crate::gaussian::{random_state_with, sigma_commutator_norm, GaussianChannel, GaussianState};
use crate::numerics::{
    is_psd_hermitian_embedding, kernel_projector, max_abs, numerical_rank, pseudo_inverse,
    residual, sqrt_psd, symmetrize, ComplexMatrix, RealMatrix, Tolerance, C64,
};
use crate::symplectic::{
    complex_to_real_blocks, extend_to_orthogonal_symplectic, is_orthogonal_symplectic,
    phi_iso_split, random_unitary, real_blocks_to_complex, sigma_blocked, sigma_split,
    MembershipCheck, OrthogonalSymplectic,
};

/// `Σ̂ = I − XXᵀ`, the environment coupling Gram matrix.
pub fn sigma_hat(channel: &GaussianChannel) -> RealMatrix {
    let dim = channel.x().nrows();
    symmetrize(&(RealMatrix::identity(dim, dim) - channel.x() * channel.x().transpose()))
}

/// `Σ = σ − XσXᵀ`.
pub fn cap_sigma(channel: &GaussianChannel) -> RealMatrix {
    let sigma = sigma_blocked(channel.modes());
    &sigma - channel.x() * &sigma * channel.x().transpose()
}

/// Outcome of the passive-dilatability test, with the residuals that
/// justified each flag.
#[derive(Debug, Clone, Copy)]
pub struct DilatabilityReport {
    /// `I − XXᵀ ⪰ 0`.
    pub psd_ok: bool,
    /// `[X, σ] = 0`.
    pub commutes_ok: bool,
    /// `ker Y = ker(I − XXᵀ)`.
    pub kernel_ok: bool,
    /// Smallest environment mode count permitted by `2l ≥ rank(I − XXᵀ)`.
    pub min_modes: usize,
    /// The mode count the query was evaluated at, if any.
    pub queried_modes: Option<usize>,
    /// Conjunction of the three conditions and, when queried, the mode bound.
    pub overall: bool,
    pub sigma_hat_min_eigenvalue: f64,
    pub commutator_norm: f64,
    pub rank_sigma_hat: usize,
    pub rank_y: usize,
    /// `‖P_ker(Σ̂) · Y‖`.
    pub kernel_residual_y: f64,
    /// `‖P_ker(Y) · Σ̂‖`.
    pub kernel_residual_sigma_hat: f64,
}

impl DilatabilityReport {
    /// The three mode-count-independent conditions.
    pub fn conditions_hold(&self) -> bool {
        self.psd_ok && self.commutes_ok && self.kernel_ok
    }

    /// Whether a dilation with `l` environment modes exists.
    pub fn dilatable_with(&self, env_modes: usize) -> bool {
        self.conditions_hold() && 2 * env_modes >= self.rank_sigma_hat
    }

    /// Names of the failing conditions, for error messages.
    pub fn failing_conditions(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.psd_ok {
            out.push("psd_ok");
        }
        if !self.commutes_ok {
            out.push("commutes_ok");
        }
        if !self.kernel_ok {
            out.push("kernel_ok");
        }
        out
    }
}

/// Evaluates the dilatability conditions for `channel`, optionally against
/// a fixed environment mode count.
pub fn check_dilatable(
    channel: &GaussianChannel,
    env_modes: Option<usize>,
    tol: &Tolerance,
) -> Result<DilatabilityReport> {
    let validity = channel.validate(tol)?;
    if !validity.is_valid {
        return Err(Error::InvalidChannel(format!(
            "CP condition violated (min eigenvalue {:.3e})",
            validity.min_eigenvalue
        )));
    }

    let s_hat = sigma_hat(channel);
    let y = symmetrize(channel.y());

    let (eigenvalues, _) = crate::numerics::symmetric_eigen_sorted(&s_hat)?;
    let min_ev = eigenvalues.last().copied().unwrap_or(f64::INFINITY);
    let scale = eigenvalues.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
    let psd_ok = min_ev >= -tol.threshold(scale);

    let commutator_norm = sigma_commutator_norm(channel.x());
    let commutes_ok = commutator_norm <= tol.threshold_at_least_unit(max_abs(channel.x()));

    let rank_sigma_hat = numerical_rank(&s_hat, tol)?;
    let rank_y = numerical_rank(&y, tol)?;
    let p_ker_sigma_hat = kernel_projector(&s_hat, tol)?;
    let p_ker_y = kernel_projector(&y, tol)?;
    let kernel_residual_y = max_abs(&(&p_ker_sigma_hat * &y));
    let kernel_residual_sigma_hat = max_abs(&(&p_ker_y * &s_hat));
    let kernel_ok = rank_sigma_hat == rank_y
        && kernel_residual_y <= tol.threshold_at_least_unit(max_abs(&y))
        && kernel_residual_sigma_hat <= tol.threshold_at_least_unit(max_abs(&s_hat));

    let min_modes = rank_sigma_hat.div_ceil(2);
    let conditions = psd_ok && commutes_ok && kernel_ok;
    let overall = match env_modes {
        Some(l) => conditions && 2 * l >= rank_sigma_hat,
        None => conditions,
    };
    Ok(DilatabilityReport {
        psd_ok,
        commutes_ok,
        kernel_ok,
        min_modes,
        queried_modes: env_modes,
        overall,
        sigma_hat_min_eigenvalue: min_ev,
        commutator_norm,
        rank_sigma_hat,
        rank_y,
        kernel_residual_y,
        kernel_residual_sigma_hat,
    })
}

/// Minimal number of environment modes of any passive dilation: `½·rank Y`.
pub fn minimal_modes(channel: &GaussianChannel, tol: &Tolerance) -> Result<usize> {
    let report = check_dilatable(channel, None, tol)?;
    if !report.conditions_hold() {
        return Err(Error::NotDilatable(format!(
            "conditions failed: {}",
            report.failing_conditions().join(", ")
        )));
    }
    // rank Y is even whenever [X, σ] = 0; div_ceil guards diagnostic paths.
    Ok(report.rank_y.div_ceil(2))
}

/// A candidate passive dilation `(S, γ_E)` of an `n`-mode channel with `l`
/// environment modes.
///
/// Stored as raw matrices so that unverified data (for example a tampered
/// file) can be represented and then judged by [`verify_dilation`]; outputs
/// of [`construct_dilation`] always verify.
#[derive(Debug, Clone, PartialEq)]
pub struct PassiveDilation {
    sys_modes: usize,
    env_modes: usize,
    s: RealMatrix,
    gamma_env: RealMatrix,
}

impl PassiveDilation {
    pub fn from_parts(
        sys_modes: usize,
        env_modes: usize,
        s: RealMatrix,
        gamma_env: RealMatrix,
    ) -> Result<Self> {
        let dim = 2 * (sys_modes + env_modes);
        if s.nrows() != dim || s.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: s.nrows(),
            });
        }
        if gamma_env.nrows() != 2 * env_modes || gamma_env.ncols() != 2 * env_modes {
            return Err(Error::DimensionMismatch {
                expected: 2 * env_modes,
                got: gamma_env.nrows(),
            });
        }
        Ok(PassiveDilation {
            sys_modes,
            env_modes,
            s,
            gamma_env,
        })
    }

    pub fn sys_modes(&self) -> usize {
        self.sys_modes
    }

    pub fn env_modes(&self) -> usize {
        self.env_modes
    }

    /// The full unitary matrix in the split-blocked basis.
    pub fn s(&self) -> &RealMatrix {
        &self.s
    }

    pub fn gamma_env(&self) -> &RealMatrix {
        &self.gamma_env
    }

    pub fn s1(&self) -> RealMatrix {
        let n2 = 2 * self.sys_modes;
        self.s.view((0, 0), (n2, n2)).into()
    }

    pub fn s2(&self) -> RealMatrix {
        let n2 = 2 * self.sys_modes;
        let l2 = 2 * self.env_modes;
        self.s.view((0, n2), (n2, l2)).into()
    }

    pub fn s3(&self) -> RealMatrix {
        let n2 = 2 * self.sys_modes;
        let l2 = 2 * self.env_modes;
        self.s.view((n2, 0), (l2, n2)).into()
    }

    pub fn s4(&self) -> RealMatrix {
        let n2 = 2 * self.sys_modes;
        let l2 = 2 * self.env_modes;
        self.s.view((n2, n2), (l2, l2)).into()
    }
}

/// Builds a passive dilation with `l` environment modes.
///
/// - `l = n`: `s₂ = Σ̂^{1/2}`.
/// - `l < n`: diagonalize the Hermitian form of `Σ̂^{1/2}` and erase the
///   `2(n−l)` zero columns.
/// - `l > n`: zero-pad the `l = n` coupling; the kernel projector in `γ_E`
///   puts the extra modes into the vacuum.
///
/// In every case `γ_E = s₂⁺ Y s₂⁺ᵀ + P_ker(s₂)` and `S` extends `(X, s₂)`.
pub fn construct_dilation(
    channel: &GaussianChannel,
    env_modes: usize,
    tol: &Tolerance,
) -> Result<PassiveDilation> {
    let report = check_dilatable(channel, Some(env_modes), tol)?;
    if !report.overall {
        let mut reasons = report.failing_conditions();
        if report.conditions_hold() {
            reasons.push("mode bound 2l >= rank(I - XX^T)");
        }
        return Err(Error::NotDilatable(format!(
            "conditions failed: {}",
            reasons.join(", ")
        )));
    }

    let n = channel.modes();
    let l = env_modes;
    let s_hat = sigma_hat(channel);
    let s2_full = sqrt_psd(&s_hat, tol)?;

    let s2: RealMatrix = if l == n {
        s2_full
    } else {
        // Complex Hermitian form of Σ̂^{1/2}; its spectrum carries each
        // doubled eigenvalue once.
        let h = real_blocks_to_complex(&s2_full, tol)?;
        if l < n {
            let (values, vectors) = crate::numerics::hermitian_eigen_sorted(&h)?;
            let value_cut = tol.threshold(values.first().copied().unwrap_or(0.0).abs());
            let mut s2_c = ComplexMatrix::zeros(n, l);
            for j in 0..l {
                let mut col = vectors.column(j).into_owned();
                // Canonical phase: largest-magnitude entry real positive.
                let mut arg = 0usize;
                for i in 0..n {
                    if col[i].norm() > col[arg].norm() {
                        arg = i;
                    }
                }
                if col[arg].norm() > 0.0 {
                    let phase = col[arg] / C64::new(col[arg].norm(), 0.0);
                    col /= phase;
                }
                let d = if values[j] > value_cut { values[j] } else { 0.0 };
                s2_c.set_column(j, &(col * C64::new(d, 0.0)));
            }
            complex_to_real_blocks(&s2_c)
        } else {
            let mut s2_c = ComplexMatrix::zeros(n, l);
            s2_c.view_mut((0, 0), (n, n)).copy_from(&h);
            complex_to_real_blocks(&s2_c)
        }
    };

    let s2_pinv = pseudo_inverse(&s2, tol)?;
    let gamma_env = symmetrize(
        &(&s2_pinv * channel.y() * s2_pinv.transpose() + kernel_projector(&s2, tol)?),
    );

    if l > 0 {
        let env_check =
            is_psd_hermitian_embedding(&gamma_env, &sigma_blocked(l), tol)?;
        if !env_check.is_psd {
            return Err(Error::InvalidState(format!(
                "constructed environment covariance fails γ_E ⪰ iσ (min eigenvalue {:.3e})",
                env_check.min_eigenvalue
            )));
        }
    }

    let s = extend_to_orthogonal_symplectic(channel.x(), &s2, tol)?;
    Ok(PassiveDilation {
        sys_modes: n,
        env_modes: l,
        s: s.matrix().clone(),
        gamma_env,
    })
}

/// Residuals of a dilation verification.
#[derive(Debug, Clone, Copy)]
pub struct DilationVerification {
    /// `‖s₂σs₂ᵀ − Σ‖`.
    pub symplectic_equation_residual: f64,
    /// `‖s₂s₂ᵀ − Σ̂‖`.
    pub orthogonal_equation_residual: f64,
    /// `‖s₂γ_Es₂ᵀ − Y‖`.
    pub noise_equation_residual: f64,
    /// `‖s₁ − X‖` (the sign convention fixes `s₁ = +X`).
    pub s1_residual: f64,
    pub membership: MembershipCheck,
    /// Minimum eigenvalue of `γ_E − iσ`.
    pub env_min_eigenvalue: f64,
    /// Worst max-norm deviation of `[S(γ ⊕ γ_E)Sᵀ]₁₁` from `XγXᵀ + Y` over
    /// the sampled states.
    pub action_residual: f64,
    pub is_valid: bool,
}

/// Checks the defining equations, membership of `S`, validity of `γ_E`, and
/// the channel action on a deterministic sample of random states.
pub fn verify_dilation(
    channel: &GaussianChannel,
    dilation: &PassiveDilation,
    tol: &Tolerance,
) -> Result<DilationVerification> {
    use rand::SeedableRng;

    let n = channel.modes();
    let l = dilation.env_modes();
    if dilation.sys_modes() != n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            got: 2 * dilation.sys_modes(),
        });
    }

    let s_hat = sigma_hat(channel);
    let cap = cap_sigma(channel);
    let s1 = dilation.s1();
    let s2 = dilation.s2();
    let sigma_l = if l > 0 {
        sigma_blocked(l)
    } else {
        RealMatrix::zeros(0, 0)
    };

    let symplectic_equation_residual = residual(&(&s2 * &sigma_l * s2.transpose()), &cap);
    let orthogonal_equation_residual = residual(&(&s2 * s2.transpose()), &s_hat);
    let noise_equation_residual =
        residual(&(&s2 * dilation.gamma_env() * s2.transpose()), channel.y());
    let s1_residual = residual(&s1, channel.x());

    let membership = is_orthogonal_symplectic(dilation.s(), &sigma_split(n, l), tol);

    let env_min_eigenvalue = if l > 0 {
        is_psd_hermitian_embedding(&symmetrize(dilation.gamma_env()), &sigma_l, tol)?
            .min_eigenvalue
    } else {
        f64::INFINITY
    };
    let env_scale = max_abs(dilation.gamma_env()).max(1.0);
    let env_ok = env_min_eigenvalue >= -tol.threshold(env_scale);

    // Action on 20 seeded random states: the reduced output block must match
    // XγXᵀ + Y.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x0acc_e55);
    let mut action_residual: f64 = 0.0;
    for k in 0..20 {
        let state = random_state_with(n, k % 2 == 0, &mut rng);
        action_residual = action_residual.max(dilation_action_residual(channel, dilation, &state));
    }

    let scale = max_abs(channel.x())
        .max(max_abs(channel.y()))
        .max(max_abs(dilation.gamma_env()))
        .max(1.0);
    let bound = tol.threshold(scale);
    let is_valid = symplectic_equation_residual <= bound
        && orthogonal_equation_residual <= bound
        && noise_equation_residual <= bound
        && s1_residual <= bound
        && membership.is_member
        && env_ok
        && action_residual <= bound;

    Ok(DilationVerification {
        symplectic_equation_residual,
        orthogonal_equation_residual,
        noise_equation_residual,
        s1_residual,
        membership,
        env_min_eigenvalue,
        action_residual,
        is_valid,
    })
}

/// `‖[S(γ ⊕ γ_E)Sᵀ]₁₁ − (XγXᵀ + Y)‖` for one input state.
pub fn dilation_action_residual(
    channel: &GaussianChannel,
    dilation: &PassiveDilation,
    state: &GaussianState,
) -> f64 {
    let n = dilation.sys_modes();
    let l = dilation.env_modes();
    let dim = 2 * (n + l);
    let mut joint = RealMatrix::zeros(dim, dim);
    joint
        .view_mut((0, 0), (2 * n, 2 * n))
        .copy_from(state.covariance());
    joint
        .view_mut((2 * n, 2 * n), (2 * l, 2 * l))
        .copy_from(dilation.gamma_env());
    let evolved = dilation.s() * joint * dilation.s().transpose();
    let reduced: RealMatrix = evolved.view((0, 0), (2 * n, 2 * n)).into();
    let expected = channel.x() * state.covariance() * channel.x().transpose() + channel.y();
    residual(&reduced, &expected)
}

/// Relates two minimal dilations of the same channel: returns the orthogonal
/// symplectic `o = s₂⁺ s₂′` with `s₂′ = s₂ o` and `γ_E′ = oᵀ γ_E o`.
pub fn relate_minimal_dilations(
    first: &PassiveDilation,
    second: &PassiveDilation,
    tol: &Tolerance,
) -> Result<OrthogonalSymplectic> {
    let l = first.env_modes();
    if second.env_modes() != l || second.sys_modes() != first.sys_modes() {
        return Err(Error::DimensionMismatch {
            expected: 2 * (first.sys_modes() + l),
            got: 2 * (second.sys_modes() + second.env_modes()),
        });
    }
    let s2 = first.s2();
    let s2_prime = second.s2();

    for (name, mat) in [("first", &s2), ("second", &s2_prime)] {
        let rank = numerical_rank(mat, tol)?;
        if rank != 2 * l {
            return Err(Error::NotMinimal(format!(
                "{name} dilation has rank(s2) = {rank} < 2l = {}",
                2 * l
            )));
        }
    }

    // Same channel: s₁ agrees and both reproduce the same (Σ̂, Y).
    let scale = max_abs(&s2).max(max_abs(&s2_prime)).max(1.0);
    let s1_mismatch = residual(&first.s1(), &second.s1());
    let gram_mismatch = residual(&(&s2 * s2.transpose()), &(&s2_prime * s2_prime.transpose()));
    let y_first = &s2 * first.gamma_env() * s2.transpose();
    let y_second = &s2_prime * second.gamma_env() * s2_prime.transpose();
    let y_mismatch = residual(&y_first, &y_second);
    let mismatch = s1_mismatch.max(gram_mismatch).max(y_mismatch);
    if mismatch > tol.threshold(scale.max(max_abs(first.gamma_env())).max(1.0)) {
        return Err(Error::ChannelMismatch(mismatch));
    }

    let o = pseudo_inverse(&s2, tol)? * &s2_prime;
    let gauge = OrthogonalSymplectic::new(o.clone(), l, 0, tol)?;

    let twist_residual = residual(&(&s2 * &o), &s2_prime);
    let env_residual = residual(
        &(o.transpose() * first.gamma_env() * &o),
        second.gamma_env(),
    );
    let bound = tol.threshold(scale.max(max_abs(first.gamma_env())).max(1.0));
    if twist_residual > bound || env_residual > bound {
        return Err(Error::ChannelMismatch(twist_residual.max(env_residual)));
    }
    Ok(gauge)
}

/// A channel is passive iff it is passively dilatable and `[Y, σ] = 0`;
/// its minimal `γ_E` then commutes with σ as well.
pub fn is_passive_channel(channel: &GaussianChannel, tol: &Tolerance) -> Result<bool> {
    let report = check_dilatable(channel, None, tol)?;
    if !report.conditions_hold() {
        return Err(Error::NotDilatable(format!(
            "conditions failed: {}",
            report.failing_conditions().join(", ")
        )));
    }
    let comm = sigma_commutator_norm(channel.y());
    Ok(comm <= tol.threshold_at_least_unit(max_abs(channel.y())))
}

/// Seed-deterministic random passively dilatable channel with its
/// ground-truth dilation, built by inverting the dilation relations: draw
/// `S ∈ Sp(2(n+l)) ∩ O(2(n+l))` and a random environment state, then read off
/// `X = s₁`, `Y = s₂γ_Es₂ᵀ`.
pub fn random_dilatable_channel(
    sys_modes: usize,
    env_modes: usize,
    passive_env: bool,
    seed: u64,
) -> (GaussianChannel, PassiveDilation) {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let tol = Tolerance::default();

    let u = random_unitary(sys_modes + env_modes, &mut rng);
    let s = phi_iso_split(&u, sys_modes, env_modes, &tol)
        .expect("random unitary maps into the group");
    let gamma_env = random_state_with(env_modes, !passive_env, &mut rng)
        .covariance()
        .clone();

    let x = s.s1();
    let y = symmetrize(&(s.s2() * &gamma_env * s.s2().transpose()));
    let channel = GaussianChannel::new(x, y, &tol)
        .expect("dilated channels are completely positive by construction");
    let dilation = PassiveDilation {
        sys_modes,
        env_modes,
        s: s.matrix().clone(),
        gamma_env,
    };
    (channel, dilation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{additive_channel, is_passive_state};
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn id(dim: usize) -> RealMatrix {
        RealMatrix::identity(dim, dim)
    }

    fn example_two(lambda: f64) -> GaussianChannel {
        GaussianChannel::new(id(2) * lambda.sqrt(), id(2) * (1.0 - lambda), &tol()).unwrap()
    }

    #[test]
    fn classical_noise_is_not_dilatable() {
        // X = I, Y = I: kernel condition fails (ker Y = 0 but Σ̂ = 0).
        let c = GaussianChannel::new(id(2), id(2), &tol()).unwrap();
        let report = check_dilatable(&c, Some(5), &tol()).unwrap();
        assert!(report.psd_ok);
        assert!(report.commutes_ok);
        assert!(!report.kernel_ok);
        assert!(!report.overall);
        assert!(matches!(
            minimal_modes(&c, &tol()),
            Err(Error::NotDilatable(_))
        ));
    }

    #[test]
    fn additive_channel_is_dilatable_for_positive_l() {
        let c = example_two(0.5);
        for l in 1..=3 {
            assert!(check_dilatable(&c, Some(l), &tol()).unwrap().overall);
        }
        assert!(!check_dilatable(&c, Some(0), &tol()).unwrap().overall);
        assert_eq!(minimal_modes(&c, &tol()).unwrap(), 1);
    }

    #[test]
    fn squeezer_fails_commutation() {
        let x = RealMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.25]);
        let c = GaussianChannel::new(x, id(2), &tol()).unwrap();
        let report = check_dilatable(&c, Some(1), &tol()).unwrap();
        assert!(!report.commutes_ok);
        assert!(!report.overall);
    }

    #[test]
    fn two_mode_additive_needs_two_environment_modes() {
        // Y = 0.5·I₄ has rank 4, so the minimal dilation uses two modes.
        let c = additive_channel(&[0.5, 0.5], &id(4), &tol()).unwrap();
        assert_eq!(minimal_modes(&c, &tol()).unwrap(), 2);
    }

    #[test]
    fn identity_channel_needs_no_environment() {
        let c = GaussianChannel::identity(2);
        let report = check_dilatable(&c, Some(0), &tol()).unwrap();
        assert!(report.overall);
        assert_eq!(minimal_modes(&c, &tol()).unwrap(), 0);

        let dil = construct_dilation(&c, 0, &tol()).unwrap();
        assert_eq!(dil.env_modes(), 0);
        assert_abs_diff_eq!(dil.s1(), id(4), epsilon = 1e-12);
        assert_eq!(dil.gamma_env().nrows(), 0);
        assert!(verify_dilation(&c, &dil, &tol()).unwrap().is_valid);
    }

    #[test]
    fn example_two_minimal_dilation() {
        // λ = 0.5 with vacuum environment: s₂ = √0.5·I, γ_E = I.
        let c = example_two(0.5);
        let dil = construct_dilation(&c, 1, &tol()).unwrap();
        assert_abs_diff_eq!(dil.s2(), id(2) * 0.5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(*dil.gamma_env(), id(2), epsilon = 1e-12);
        let verification = verify_dilation(&c, &dil, &tol()).unwrap();
        assert!(verification.is_valid);
        assert!(verification.action_residual <= 1e-10);
    }

    #[test]
    fn replacer_channel_dilation() {
        // X = 0 with full-rank γ_E: s₂ = I, γ_E = Y.
        let gamma = RealMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 0.25]);
        let c = GaussianChannel::new(RealMatrix::zeros(2, 2), gamma.clone(), &tol()).unwrap();
        let dil = construct_dilation(&c, 1, &tol()).unwrap();
        assert_abs_diff_eq!(dil.s2(), id(2), epsilon = 1e-12);
        assert_abs_diff_eq!(*dil.gamma_env(), gamma, epsilon = 1e-12);
        assert!(verify_dilation(&c, &dil, &tol()).unwrap().is_valid);
    }

    #[test]
    fn padded_dilation_uses_vacuum() {
        // Example 2 with more environment modes than necessary.
        let c = example_two(0.5);
        let dil = construct_dilation(&c, 2, &tol()).unwrap();
        assert_eq!(dil.env_modes(), 2);
        let verification = verify_dilation(&c, &dil, &tol()).unwrap();
        assert!(verification.is_valid, "{verification:?}");
        // The padded environment mode is in the vacuum.
        let ge = dil.gamma_env();
        assert_abs_diff_eq!(ge[(1, 1)], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(ge[(3, 3)], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn rank_deficient_channel_uses_fewer_modes() {
        // Per-mode transmissivities (1, 0.5): mode 1 is noiseless, so one
        // environment mode suffices for the two-mode channel (l < n path).
        let gamma_e = id(4) * 2.0;
        let c = additive_channel(&[1.0, 0.5], &gamma_e, &tol()).unwrap();
        assert_eq!(minimal_modes(&c, &tol()).unwrap(), 1);
        let dil = construct_dilation(&c, 1, &tol()).unwrap();
        let verification = verify_dilation(&c, &dil, &tol()).unwrap();
        assert!(verification.is_valid, "{verification:?}");
        assert_eq!(crate::numerics::numerical_rank(&dil.s2(), &tol()).unwrap(), 2);
    }

    #[test]
    fn verify_flags_tampered_environment() {
        let c = example_two(0.5);
        let mut dil = construct_dilation(&c, 1, &tol()).unwrap();
        dil.gamma_env[(0, 0)] += 1e-3;
        let verification = verify_dilation(&c, &dil, &tol()).unwrap();
        assert!(!verification.is_valid);
        // Third-equation residual reflects the tamper magnitude times ‖s₂‖².
        assert_abs_diff_eq!(
            verification.noise_equation_residual,
            1e-3 * 0.5,
            epsilon = 1e-6
        );
    }

    #[test]
    fn verify_flags_non_symplectic_unitary() {
        let c = example_two(0.5);
        let dil = construct_dilation(&c, 1, &tol()).unwrap();
        // Swap Q and P of the environment mode: orthogonal, not symplectic.
        let mut s = dil.s().clone();
        s.swap_rows(2, 3);
        let tampered = PassiveDilation::from_parts(1, 1, s, dil.gamma_env().clone()).unwrap();
        let verification = verify_dilation(&c, &tampered, &tol()).unwrap();
        assert!(!verification.is_valid);
        assert!(!verification.membership.is_member);
        assert!(verification.membership.symplecticity_residual > 1e-3);
    }

    #[test]
    fn relate_identical_dilations() {
        let c = example_two(0.3);
        let dil = construct_dilation(&c, 1, &tol()).unwrap();
        let o = relate_minimal_dilations(&dil, &dil, &tol()).unwrap();
        assert_abs_diff_eq!(*o.matrix(), id(2), epsilon = 1e-10);
    }

    #[test]
    fn relate_recovers_planted_gauge() {
        let (c, dil) = random_dilatable_channel(2, 1, false, 314);
        let o_planted = crate::symplectic::random_orthogonal_symplectic(1, 2718);
        // Environment-rotated twin: S′ = S·diag(I, o), γ_E′ = oᵀγ_E o.
        let dim = dil.s().nrows();
        let mut gauge = RealMatrix::identity(dim, dim);
        gauge
            .view_mut((4, 4), (2, 2))
            .copy_from(o_planted.matrix());
        let twin = PassiveDilation::from_parts(
            2,
            1,
            dil.s() * &gauge,
            o_planted.matrix().transpose() * dil.gamma_env() * o_planted.matrix(),
        )
        .unwrap();
        assert!(verify_dilation(&c, &twin, &tol()).unwrap().is_valid);
        let o = relate_minimal_dilations(&dil, &twin, &tol()).unwrap();
        assert!(residual(o.matrix(), o_planted.matrix()) <= 1e-9);
    }

    #[test]
    fn relate_rejects_squeezed_environment() {
        let (_, dil) = random_dilatable_channel(1, 1, false, 99);
        let squeezer = RealMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        let mut gauge = RealMatrix::identity(4, 4);
        gauge.view_mut((2, 2), (2, 2)).copy_from(&squeezer);
        let inv = squeezer.clone().try_inverse().unwrap();
        let twin = PassiveDilation::from_parts(
            1,
            1,
            dil.s() * &gauge,
            &inv * dil.gamma_env() * inv.transpose(),
        )
        .unwrap();
        assert!(relate_minimal_dilations(&dil, &twin, &tol()).is_err());
    }

    #[test]
    fn passive_channel_examples() {
        // Thermal environment: Y = 0.5·3I commutes with σ.
        let c = additive_channel(&[0.5], &(id(2) * 3.0), &tol()).unwrap();
        assert!(is_passive_channel(&c, &tol()).unwrap());

        // Squeezed environment.
        let gamma = RealMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 0.25]);
        let c = additive_channel(&[0.5], &gamma, &tol()).unwrap();
        assert!(!is_passive_channel(&c, &tol()).unwrap());

        assert!(is_passive_channel(&GaussianChannel::identity(1), &tol()).unwrap());

        // Not dilatable at all: error, not false.
        let classical = GaussianChannel::new(id(2), id(2), &tol()).unwrap();
        assert!(is_passive_channel(&classical, &tol()).is_err());
    }

    #[test]
    fn random_channels_are_dilatable_and_verified() {
        for seed in 0..10 {
            let n = 1 + (seed as usize % 3);
            let l = 1 + (seed as usize % 2);
            let (c, dil) = random_dilatable_channel(n, l, seed % 2 == 0, seed);
            let report = check_dilatable(&c, Some(l), &tol()).unwrap();
            assert!(report.overall, "{report:?}");
            let verification = verify_dilation(&c, &dil, &tol()).unwrap();
            assert!(verification.is_valid, "{verification:?}");

            // Σ = σΣ̂ and both commute with σ for any dilatable channel.
            let s_hat = sigma_hat(&c);
            let cap = cap_sigma(&c);
            let sigma = sigma_blocked(n);
            assert!(residual(&cap, &(&sigma * &s_hat)) <= 1e-9);
            assert!(sigma_commutator_norm(&s_hat) <= 1e-9);

            // Reconstruction at the minimal mode count.
            let l_min = minimal_modes(&c, &tol()).unwrap();
            let minimal = construct_dilation(&c, l_min, &tol()).unwrap();
            assert!(verify_dilation(&c, &minimal, &tol()).unwrap().is_valid);
            assert_eq!(
                crate::numerics::numerical_rank(&minimal.s2(), &tol()).unwrap(),
                2 * l_min
            );
        }
    }

    #[test]
    fn passive_environment_yields_passive_channel() {
        for seed in 0..10 {
            let (c, _) = random_dilatable_channel(2, 2, true, 1000 + seed);
            assert!(is_passive_channel(&c, &tol()).unwrap());
            // The constructed minimal γ_E of a passive channel commutes with σ.
            let l_min = minimal_modes(&c, &tol()).unwrap();
            let dil = construct_dilation(&c, l_min, &tol()).unwrap();
            if l_min > 0 {
                assert!(is_passive_state(dil.gamma_env(), &tol()).unwrap());
            }
        }
    }

    #[test]
    fn seed_determinism() {
        let (c1, d1) = random_dilatable_channel(2, 1, false, 42);
        let (c2, d2) = random_dilatable_channel(2, 1, false, 42);
        assert_eq!(c1.x(), c2.x());
        assert_eq!(c1.y(), c2.y());
        assert_eq!(d1.s(), d2.s());
        assert_eq!(d1.gamma_env(), d2.gamma_env());
    }

    #[test]
    fn even_rank_invariant() {
        for seed in 0..20 {
            let (c, _) = random_dilatable_channel(1 + seed as usize % 3, 2, false, 7000 + seed);
            let report = check_dilatable(&c, None, &tol()).unwrap();
            assert!(report.commutes_ok);
            assert_eq!(report.rank_sigma_hat % 2, 0);
            assert_eq!(report.rank_y % 2, 0);
        }
    }

    #[test]
    fn full_rank_reduction() {
        // When X, Y, Σ̂ all have full rank, dilatability at l = n reduces to
        // psd_ok ∧ commutes_ok.
        for seed in 0..10 {
            let (c, _) = random_dilatable_channel(2, 2, false, 4000 + seed);
            let report = check_dilatable(&c, Some(2), &tol()).unwrap();
            if report.rank_sigma_hat == 4 && report.rank_y == 4 {
                assert!(report.kernel_ok);
                assert_eq!(report.overall, report.psd_ok && report.commutes_ok);
            }
        }
    }
}
