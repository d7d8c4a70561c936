//! Independent numerical oracles shared by the integration tests. None of
//! these reuse the library's quadrature rules or closed forms.
#![allow(dead_code)]

use std::f64::consts::PI;

use qlbe_core::rates::{m_in_classical, m_out_constant, CrossSectionModel};
use qlbe_core::{derive_scales, PhysicalParams, Vec3};

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS_K: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WEIGHTS_G: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate and the Gauss–Kronrod error estimate on [a, b].
fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = GK_WEIGHTS_K[7] * fc;
    let mut g = GK_WEIGHTS_G[3] * fc;
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        k += GK_WEIGHTS_K[i] * s;
        if i % 2 == 1 {
            g += GK_WEIGHTS_G[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of f on [a, b] to absolute
/// tolerance `tol` (global bisection of the worst interval).
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let mut intervals = vec![{
        let (v, e) = gk15(&mut f, a, b);
        (a, b, v, e)
    }];
    for _ in 0..2000 {
        let total_err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if total_err <= tol {
            break;
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    intervals.iter().map(|iv| iv.2).sum()
}

/// Nested adaptive quadrature over the square [−L, L]².
pub fn integrate_square(f: impl Fn(f64, f64) -> f64, half: f64, tol: f64) -> f64 {
    let inner_tol = tol / (4.0 * half);
    integrate(|y| integrate(|x| f(x, y), -half, half, inner_tol), -half, half, tol)
}

/// Double-double number (hi + lo).
#[derive(Clone, Copy, Debug)]
struct Dd(f64, f64);

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd(s, (a - (s - bb)) + (b - bb))
}

impl Dd {
    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.0, o.0);
        let lo = s.1 + self.1 + o.1;
        let hi = s.0 + lo;
        Dd(hi, lo - (hi - s.0))
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.0 * o.0;
        let e = self.0.mul_add(o.0, -p);
        let lo = e + self.0 * o.1 + self.1 * o.0;
        let hi = p + lo;
        Dd(hi, lo - (hi - p))
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.0 / o.0;
        let r = self.add(o.mul(Dd(-q1, 0.0)));
        let q2 = r.0 / o.0;
        let r = r.add(o.mul(Dd(-q2, 0.0)));
        let q3 = r.0 / o.0;
        Dd(q1, 0.0).add(Dd(q2, 0.0)).add(Dd(q3, 0.0))
    }
}

/// ₁F₁(a, b; z) by its defining power series in double-double arithmetic,
/// truncated when a term falls below 1e-20 of the running sum.
pub fn hyp1f1_dd(a: f64, b: f64, z: f64) -> f64 {
    let mut term = Dd(1.0, 0.0);
    let mut sum = Dd(1.0, 0.0);
    for k in 0..10_000 {
        let kf = k as f64;
        term = term.mul(Dd(a + kf, 0.0)).mul(Dd(z, 0.0)).div(Dd(b + kf, 0.0).mul(Dd(kf + 1.0, 0.0)));
        sum = sum.add(term);
        if term.0.abs() < 1e-20 * sum.0.abs() {
            break;
        }
    }
    sum.0 + sum.1
}

/// Gas Maxwellian written out independently of the library.
pub fn mu(p: Vec3, params: &PhysicalParams) -> f64 {
    let pb2 = 2.0 * params.gas_mass * params.temperature;
    (-p.norm_sq() / pb2).exp() / (PI * pb2).powf(1.5)
}

fn reduced_mass(params: &PhysicalParams) -> f64 {
    params.gas_mass * params.tracer_mass / (params.gas_mass + params.tracer_mass)
}

/// Orthonormal pair spanning the plane perpendicular to `n` (unit).
pub fn plane_basis(n: Vec3) -> (Vec3, Vec3) {
    let trial = if n.x.abs() < 0.9 { Vec3::X } else { Vec3::Y };
    let e1 = (trial - n * trial.dot(n)).normalized().unwrap();
    (e1, n.cross(e1))
}

/// M_in^cl(P; Q) for constant |f|² = σ_tot/4π from the delta-constrained
/// gas-momentum integral: the energy delta fixes the gas momentum component
/// along Q, leaving an adaptive 2D integral over the perpendicular plane.
pub fn m_in_cl_delta_oracle(p_final: Vec3, q: Vec3, params: &PhysicalParams, tol: f64) -> f64 {
    let m = params.gas_mass;
    let big_m = params.tracer_mass;
    let ms = reduced_mass(params);
    let qn = q.norm();
    let qh = q / qn;
    let p_init = p_final - q;
    // δ((Q²/2 − b·Q)) with b = rel(p0, P_init); b·Q is linear in p0·q̂ with
    // slope (m*/m) Q, so p0·q̂ = (m/m*)(Q/2 + (m*/M) P_init·q̂).
    let p0_par = m / ms * (0.5 * qn + ms / big_m * p_init.dot(qh));
    let jacobian = m / (ms * qn);
    let (e1, e2) = plane_basis(qh);
    let pb = (2.0 * m * params.temperature).sqrt();
    let plane = integrate_square(|x, y| mu(qh * p0_par + e1 * x + e2 * y, params), 8.0 * pb, tol);
    params.n_gas / ms * params.sigma_tot / (4.0 * PI) * jacobian * plane
}

/// M_in(P, P′; Q) for constant |f|² from the product of the two Lindblad
/// amplitudes integrated over the plane perpendicular to Q.
pub fn m_in_quantum_oracle(p: Vec3, p_prime: Vec3, q: Vec3, params: &PhysicalParams, tol: f64) -> f64 {
    let m = params.gas_mass;
    let big_m = params.tracer_mass;
    let ms = reduced_mass(params);
    let qn = q.norm();
    let qh = q / qn;
    let (e1, e2) = plane_basis(qh);
    let shift = |pp: Vec3| qh * (0.5 * (1.0 + m / big_m) * qn + m / big_m * (pp - q).dot(qh));
    let (s, s_prime) = (shift(p), shift(p_prime));
    let pb = (2.0 * m * params.temperature).sqrt();
    let plane = integrate_square(
        |x, y| {
            let perp = e1 * x + e2 * y;
            (mu(perp + s, params) * mu(perp + s_prime, params)).sqrt()
        },
        8.0 * pb,
        tol,
    );
    params.n_gas * m / (ms * ms * qn) * params.sigma_tot / (4.0 * PI) * plane
}

/// Mean relative speed n σ ⟨|v − V|⟩ by a radial-angular integral over gas
/// velocities (independent of the library's closed form).
pub fn m_out_flux_oracle(p: Vec3, params: &PhysicalParams) -> f64 {
    let sc = derive_scales(params);
    let v_tracer = p.norm() / params.tracer_mass;
    let vb = sc.v_beta;
    // Gas speed density 4/(√π v_β³) v² e^{−v²/v_β²}; angular mean of |v − V|.
    let angular = |v: f64| {
        if v_tracer == 0.0 {
            v
        } else {
            let (a, b) = (v + v_tracer, (v - v_tracer).abs());
            (a.powi(3) - b.powi(3)) / (6.0 * v * v_tracer)
        }
    };
    let speed = integrate(
        |v| 4.0 / (PI.sqrt() * vb.powi(3)) * v * v * (-(v * v) / (vb * vb)).exp() * angular(v),
        0.0,
        12.0 * vb + v_tracer,
        1e-14 * vb,
    );
    params.n_gas * params.sigma_tot * speed
}

/// Transfer-space extent beyond which the rate density is below e^{-25}.
const Q_EXTENT: f64 = 25.0;

/// ∫ dφ ρ dρ w(ρ, z) M_in^cl(P + Q; Q)/M_out(P) at Q = (ρ cos φ, ρ sin φ, z)
/// for P along ẑ, where the integrand does not depend on φ.
pub fn cylinder_average(p: &PhysicalParams, big_p: Vec3, z: f64, w: impl Fn(f64, f64) -> f64) -> f64 {
    let norm = m_out_constant(big_p, p);
    2.0 * PI
        * integrate(
            |rho| {
                let q = Vec3::new(rho, 0.0, z);
                if q.norm() == 0.0 {
                    return 0.0;
                }
                rho * w(rho, z) * m_in_classical(big_p + q, q, p, &CrossSectionModel::Constant).unwrap() / norm
            },
            0.0,
            Q_EXTENT,
            1e-13,
        )
}

/// ∫ d³Q w(ρ, z) M_in^cl(P + Q; Q)/M_out(P) for P along ẑ.
pub fn transfer_moment(p: &PhysicalParams, big_p: Vec3, w: impl Fn(f64, f64) -> f64 + Copy) -> f64 {
    let f = |z| cylinder_average(p, big_p, z, w);
    integrate(f, -Q_EXTENT, 0.0, 1e-11) + integrate(f, 0.0, Q_EXTENT, 1e-11)
}
