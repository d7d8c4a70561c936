//! Error function and the two fixed-index confluent hypergeometric
//! functions that appear in the momentum and energy relaxation rates.

use std::f64::consts::PI;

/// Below this value of u² the Kummer functions are summed from their power
/// series; the closed forms lose digits to cancellation as U → 0.
pub const KUMMER_SERIES_CROSSOVER: f64 = 0.25;

/// Error function, `erf(x) = 2/√π ∫₀ˣ exp(-t²) dt`.
///
/// Evaluated on |x| and sign-restored, so `erf(x) + erf(-x) == 0` holds
/// exactly.
pub fn erf(x: f64) -> f64 {
    let r = libm::erf(x.abs());
    if x.is_sign_negative() {
        -r
    } else {
        r
    }
}

/// Power series of the confluent hypergeometric function
/// `₁F₁(a; b; z) = Σ (a)ₖ/(b)ₖ zᵏ/k!`, summed until a term drops below
/// 1e-16 relative to the partial sum.
///
/// Only suitable where the series does not cancel badly (small |z|, or
/// z > 0 with a > 0).
pub fn hyp1f1_series(a: f64, b: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..10_000 {
        let kf = k as f64;
        term *= (a + kf) / (b + kf) * z / (kf + 1.0);
        sum += term;
        if term.abs() < 1e-16 * sum.abs() {
            break;
        }
    }
    sum
}

/// `₁F₁(-1/2, 5/2; -u²)` as a function of `u2 = u²`.
///
/// Positive and monotonically increasing on `u2 >= 0`, equal to 1 at the
/// origin with slope 1/5.
pub fn kummer_a(u2: f64) -> f64 {
    debug_assert!(u2 >= 0.0, "kummer_a needs u2 >= 0, got {u2}");
    if u2 < KUMMER_SERIES_CROSSOVER {
        return hyp1f1_series(-0.5, 2.5, -u2);
    }
    let u = u2.sqrt();
    let gauss = (-u2).exp();
    let erf_term = 0.5 * PI.sqrt() * erf(u) / u;
    3.0 / (16.0 * u2) * ((1.0 + 2.0 * u2) * gauss - (1.0 - 4.0 * u2 - 4.0 * u2 * u2) * erf_term)
}

/// `₁F₁(-3/2, 3/2; -u²)` as a function of `u2 = u²`.
///
/// Positive and monotonically increasing, equal to 1 at the origin with
/// slope 1.
pub fn kummer_b(u2: f64) -> f64 {
    debug_assert!(u2 >= 0.0, "kummer_b needs u2 >= 0, got {u2}");
    if u2 < KUMMER_SERIES_CROSSOVER {
        return hyp1f1_series(-1.5, 1.5, -u2);
    }
    let u = u2.sqrt();
    let gauss = (-u2).exp();
    let erf_term = 0.5 * PI.sqrt() * erf(u) / u;
    0.125 * ((5.0 + 2.0 * u2) * gauss + (3.0 + 12.0 * u2 + 4.0 * u2 * u2) * erf_term)
}
