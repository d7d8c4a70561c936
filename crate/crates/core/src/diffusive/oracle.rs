use super::coefficients::DiffusionCoefficients;
use super::field::PhaseMoments;

/// Which terms of the phase-space equation the moments follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleTerms {
    /// Include position diffusion D_xx.
    pub quantum: bool,
    /// Include the free-streaming coupling of X to P/M.
    pub free_streaming: bool,
}

/// (1 − e^{−a t})/a, equal to t at a = 0.
fn phi(a: f64, t: f64) -> f64 {
    if a == 0.0 {
        t
    } else {
        -(-a * t).exp_m1() / a
    }
}

/// Closed-form first and second moments of a Gaussian evolving under
///
/// d⟨P⟩/dt = −η⟨P⟩,  d⟨X⟩/dt = ⟨P⟩/M,
/// dVar P/dt = −2η Var P + 2 D_pp,
/// dCov/dt = Var P/M − η Cov,
/// dVar X/dt = 2 Cov/M + 2 D_xx,
///
/// with the 1/M couplings present only when `free_streaming` is set.
pub fn gaussian_moment_oracle(
    initial: PhaseMoments,
    t: f64,
    coeffs: &DiffusionCoefficients,
    tracer_mass: f64,
    terms: OracleTerms,
) -> PhaseMoments {
    let eta = coeffs.eta;
    let d_pp = coeffs.d_pp;
    let d_xx = if terms.quantum { coeffs.d_xx } else { 0.0 };
    let inv_m = if terms.free_streaming { 1.0 / tracer_mass } else { 0.0 };
    let PhaseMoments {
        mean_x: x0,
        mean_p: p0,
        var_x: vx0,
        var_p: vp0,
        cov_xp: c0,
    } = initial;

    let decay = (-eta * t).exp();
    let mean_p = p0 * decay;
    let mean_x = x0 + p0 * phi(eta, t) * inv_m;

    if eta == 0.0 {
        let var_p = vp0 + 2.0 * d_pp * t;
        let cov = c0 + inv_m * (vp0 * t + d_pp * t * t);
        let int_cov = c0 * t + inv_m * (vp0 * t * t / 2.0 + d_pp * t * t * t / 3.0);
        return PhaseMoments {
            mean_x,
            mean_p,
            var_x: vx0 + 2.0 * d_xx * t + 2.0 * inv_m * int_cov,
            var_p,
            cov_xp: cov,
        };
    }

    let v_inf = d_pp / eta;
    let dv = vp0 - v_inf;
    let var_p = v_inf + dv * (-2.0 * eta * t).exp();
    let f1 = phi(eta, t);
    let f2 = phi(2.0 * eta, t);
    let cross = decay * f1;
    let cov = c0 * decay + inv_m * (v_inf * f1 + dv * cross);
    // ∫₀ᵗ φ(η, s) ds = (t − φ(η, t))/η and ∫₀ᵗ e^{−ηs}φ(η, s) ds = (φ(η) − φ(2η))/η
    let int_f1 = (t - f1) / eta;
    let int_cross = (f1 - f2) / eta;
    let int_cov = c0 * f1 + inv_m * (v_inf * int_f1 + dv * int_cross);
    PhaseMoments {
        mean_x,
        mean_p,
        var_x: vx0 + 2.0 * d_xx * t + 2.0 * inv_m * int_cov,
        var_p,
        cov_xp: cov,
    }
}
