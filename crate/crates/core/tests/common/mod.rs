//! Closed-form oracle for the equal-weight superposition of modes 1 and 2
//! in the unit well (L = 1, mass = 1, ħ = 1), independent of the solver
//! stack under test.

use std::f64::consts::PI;

use num_complex::Complex64;

pub const E1: f64 = PI * PI / 2.0;
pub const E2: f64 = 2.0 * PI * PI;

fn phi(mode: f64, x: f64) -> f64 {
    2f64.sqrt() * (mode * PI * x).sin()
}

fn dphi(mode: f64, x: f64) -> f64 {
    2f64.sqrt() * mode * PI * (mode * PI * x).cos()
}

/// ψ(x, t) = (φ1 e^{−iE1 t} + φ2 e^{−iE2 t}) / √2.
pub fn psi(x: f64, t: f64) -> Complex64 {
    let p1 = Complex64::from_polar(1.0, -E1 * t);
    let p2 = Complex64::from_polar(1.0, -E2 * t);
    (phi(1.0, x) * p1 + phi(2.0, x) * p2) / 2f64.sqrt()
}

/// Guidance velocity Im(ψ′/ψ) from the closed form.
pub fn velocity(x: f64, t: f64) -> f64 {
    let p1 = Complex64::from_polar(1.0, -E1 * t);
    let p2 = Complex64::from_polar(1.0, -E2 * t);
    let dpsi = (dphi(1.0, x) * p1 + dphi(2.0, x) * p2) / 2f64.sqrt();
    (dpsi / psi(x, t)).im
}

/// Plain RK4 on the analytic flow, independent of the crate's integrator.
pub fn integrate_analytic(x0: f64, t_end: f64, dt: f64) -> f64 {
    let mut x = x0;
    let mut t = 0.0;
    while t < t_end - 1e-15 {
        let h = dt.min(t_end - t);
        let k1 = velocity(x, t);
        let k2 = velocity(x + 0.5 * h * k1, t + 0.5 * h);
        let k3 = velocity(x + 0.5 * h * k2, t + 0.5 * h);
        let k4 = velocity(x + h * k3, t + h);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
    }
    x
}
