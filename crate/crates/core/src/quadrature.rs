//! Fixed Gaussian quadrature rules.
//!
//! Nodes come from Newton iteration on the three-term recurrences, so any
//! order is available without tables. Rules used in hot paths are cached.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights on the reference interval.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Arc<Rule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Rule>>>> = OnceLock::new();
    cached(&CACHE, n, compute_gauss_legendre)
}

/// n-point Gauss–Hermite rule for the weight exp(-x²) on the real line.
pub fn gauss_hermite(n: usize) -> Arc<Rule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Rule>>>> = OnceLock::new();
    cached(&CACHE, n, compute_gauss_hermite)
}

fn cached(
    cache: &OnceLock<Mutex<HashMap<usize, Arc<Rule>>>>,
    n: usize,
    make: fn(usize) -> Rule,
) -> Arc<Rule> {
    assert!(n > 0, "quadrature order must be positive");
    let map = cache.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = map.lock().unwrap_or_else(|e| e.into_inner());
    guard.entry(n).or_insert_with(|| Arc::new(make(n))).clone()
}

fn compute_gauss_legendre(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn compute_gauss_hermite(n: usize) -> Rule {
    // Orthonormal Hermite recurrence; initial guesses as in Numerical Recipes.
    let pim4 = PI.powf(-0.25);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[i] = z;
        weights[i] = 2.0 / (pp * pp);
    }
    // Newton ran on the upper half in descending order; mirror and sort.
    let half = n.div_ceil(2);
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n);
    for i in 0..half {
        pairs.push((nodes[i], weights[i]));
        if !(n % 2 == 1 && i == half - 1) {
            pairs.push((-nodes[i], weights[i]));
        }
    }
    if n % 2 == 1 {
        if let Some(mid) = pairs.last_mut() {
            mid.0 = 0.0;
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Integrate `f` over [a, b] with an n-point Gauss–Legendre rule.
pub fn integrate_gl(n: usize, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let rule = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// ∫∫ exp(-(x² + y²)/s²) g(x, y) dx dy over the plane, by an n×n
/// Gauss–Hermite product rule. Exact when g is a polynomial of degree
/// below 2n in each variable.
pub fn gauss_hermite_plane(n: usize, s: f64, mut g: impl FnMut(f64, f64) -> f64) -> f64 {
    let rule = gauss_hermite(n);
    let mut sum = 0.0;
    for (&x, &wx) in rule.nodes.iter().zip(&rule.weights) {
        for (&y, &wy) in rule.nodes.iter().zip(&rule.weights) {
            sum += wx * wy * g(s * x, s * y);
        }
    }
    sum * s * s
}

/// Orders of a spherical product rule: Gauss–Legendre in r and in cos θ,
/// uniform (trapezoidal) in φ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphericalOrders {
    pub radial: usize,
    pub polar: usize,
    pub azimuthal: usize,
}

impl SphericalOrders {
    pub const DEFAULT: SphericalOrders = SphericalOrders {
        radial: 64,
        polar: 32,
        azimuthal: 16,
    };
    pub const COARSE: SphericalOrders = SphericalOrders {
        radial: 48,
        polar: 24,
        azimuthal: 12,
    };
}

/// ∫ d³Q f(Q) over the spherical shell r ∈ [r_min, r_max], in spherical
/// coordinates about the unit vector `axis`. `f` receives (r, cos θ, φ).
pub fn integrate_spherical(
    orders: SphericalOrders,
    r_min: f64,
    r_max: f64,
    mut f: impl FnMut(f64, f64, f64) -> f64,
) -> f64 {
    let radial = gauss_legendre(orders.radial);
    let polar = gauss_legendre(orders.polar);
    let dphi = 2.0 * PI / orders.azimuthal as f64;
    let half = 0.5 * (r_max - r_min);
    let mid = 0.5 * (r_max + r_min);
    let mut total = 0.0;
    for (&xr, &wr) in radial.nodes.iter().zip(&radial.weights) {
        let r = mid + half * xr;
        let mut shell = 0.0;
        for (&c, &wc) in polar.nodes.iter().zip(&polar.weights) {
            let mut ring = 0.0;
            for k in 0..orders.azimuthal {
                ring += f(r, c, (k as f64 + 0.5) * dphi);
            }
            shell += wc * ring * dphi;
        }
        total += wr * r * r * shell;
    }
    total * half
}
