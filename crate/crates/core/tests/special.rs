mod common;

use qlbe_core::special::{erf, kummer_a, kummer_b};

fn rel_err(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

#[test]
fn kummer_closed_forms_match_the_series() {
    let n = 10_000;
    let (mut worst_a, mut worst_b) = (0.0f64, 0.0f64);
    for k in 0..n {
        let u2 = 25.0 * k as f64 / (n - 1) as f64;
        worst_a = worst_a.max(rel_err(kummer_a(u2), common::hyp1f1_dd(-0.5, 2.5, -u2)));
        worst_b = worst_b.max(rel_err(kummer_b(u2), common::hyp1f1_dd(-1.5, 1.5, -u2)));
    }
    assert!(worst_a < 1e-10 && worst_b < 1e-10, "worst {worst_a:e}, {worst_b:e}");
}

#[test]
fn kummer_reference_points() {
    assert!(rel_err(kummer_a(1.0), common::hyp1f1_dd(-0.5, 2.5, -1.0)) < 1e-10);
    assert!(rel_err(kummer_b(4.0), common::hyp1f1_dd(-1.5, 1.5, -4.0)) < 1e-10);
    for u2 in [1e-8, 1e-7, 1e-6] {
        assert!((kummer_a(u2) - (1.0 + u2 / 5.0)).abs() < 1e-12);
        assert!((kummer_b(u2) - (1.0 + u2)).abs() < 1e-12);
    }
}

#[test]
fn kummer_functions_are_positive_and_increasing() {
    let (mut last_a, mut last_b) = (0.0, 0.0);
    for k in 0..1000 {
        let u2 = 25.0 * k as f64 / 999.0;
        let (a, b) = (kummer_a(u2), kummer_b(u2));
        assert!(a > 0.0 && b > 0.0);
        assert!(a >= last_a && b >= last_b, "u2 = {u2}");
        last_a = a;
        last_b = b;
    }
}

#[test]
fn erf_against_the_series() {
    // erf(x) = (2x/√π) e^{−x²} ₁F₁(1, 3/2; x²).
    for k in 0..=300 {
        let x = k as f64 * 0.01;
        let series = 2.0 * x / std::f64::consts::PI.sqrt() * (-x * x).exp() * common::hyp1f1_dd(1.0, 1.5, x * x);
        assert!((erf(x) - series).abs() <= 1e-14, "x = {x}");
        assert_eq!(erf(-x), -erf(x));
    }
    assert_eq!(erf(1.0), 0.842_700_792_949_714_9);
}
