//! Crank–Nicolson time evolution between the walls.
//!
//! One step applies the Cayley form ψ′ = (1 + i·dt·H/2ħ)⁻¹(1 − i·dt·H/2ħ)ψ
//! with H the central-difference Dirichlet Hamiltonian, so each step is
//! unitary in exact arithmetic and the wall values stay exactly zero.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::well::{trapezoid_norm_sq, WaveFunction, WellSpec};

/// Time-stepping parameters for [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionPlan {
    pub dt: f64,
    pub n_steps: usize,
    /// Store every k-th frame (the initial and final frames are always kept).
    pub frame_stride: usize,
}

impl EvolutionPlan {
    pub fn new(dt: f64, n_steps: usize, frame_stride: usize) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Domain(format!("dt must be positive, got {dt}")));
        }
        if n_steps == 0 {
            return Err(Error::Domain("n_steps must be >= 1".into()));
        }
        if frame_stride == 0 || frame_stride > n_steps {
            return Err(Error::Domain(format!(
                "frame_stride must be in 1..={n_steps}, got {frame_stride}"
            )));
        }
        Ok(Self { dt, n_steps, frame_stride })
    }
}

/// Stored frames of an evolution, including t = 0.
#[derive(Debug, Clone)]
pub struct FrameSeries {
    pub times: Vec<f64>,
    pub frames: Vec<WaveFunction>,
}

impl FrameSeries {
    pub fn time_span(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }
}

/// Reusable Crank–Nicolson propagator for a fixed grid and time step.
///
/// Negative `dt` propagates backward in time.
pub struct Propagator {
    dt: f64,
    n: usize,
    b_diag: Complex64,
    b_off: Complex64,
    // precomputed Thomas factorization of the constant tridiagonal A
    a_off: Complex64,
    c_prime: Vec<Complex64>,
    inv_denom: Vec<Complex64>,
}

impl Propagator {
    pub fn new(spec: WellSpec, n_points: usize, dx: f64, dt: f64) -> Result<Self> {
        if dt == 0.0 || !dt.is_finite() {
            return Err(Error::Domain(format!("dt must be finite and nonzero, got {dt}")));
        }
        if n_points < 3 {
            return Err(Error::Domain("propagator needs at least 3 grid points".into()));
        }
        let n = n_points - 2; // interior unknowns
        let h_diag = spec.hbar * spec.hbar / (spec.mass * dx * dx);
        let h_off = -0.5 * spec.hbar * spec.hbar / (spec.mass * dx * dx);
        let alpha = Complex64::new(0.0, 0.5 * dt / spec.hbar);
        let a_diag = Complex64::new(1.0, 0.0) + alpha * h_diag;
        let a_off = alpha * h_off;
        let b_diag = Complex64::new(1.0, 0.0) - alpha * h_diag;
        let b_off = -a_off;

        let mut c_prime = vec![Complex64::new(0.0, 0.0); n];
        let mut inv_denom = vec![Complex64::new(0.0, 0.0); n];
        inv_denom[0] = a_diag.inv();
        c_prime[0] = a_off * inv_denom[0];
        for i in 1..n {
            let denom = a_diag - a_off * c_prime[i - 1];
            if denom.norm() == 0.0 || !denom.is_finite() {
                return Err(Error::Numerical("tridiagonal factorization broke down".into()));
            }
            inv_denom[i] = denom.inv();
            c_prime[i] = a_off * inv_denom[i];
        }
        Ok(Self { dt, n, b_diag, b_off, a_off, c_prime, inv_denom })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances ψ in place by one step.
    pub fn step(&self, psi: &mut WaveFunction) -> Result<()> {
        let n_total = psi.values.len();
        debug_assert_eq!(self.n, n_total - 2);
        // rhs = B ψ on the interior (walls are zero)
        let mut work = vec![Complex64::new(0.0, 0.0); self.n];
        for i in 0..self.n {
            let left = psi.values[i]; // node i = interior index i+1
            let mid = psi.values[i + 1];
            let right = psi.values[i + 2];
            work[i] = self.b_off * left + self.b_diag * mid + self.b_off * right;
        }
        // Thomas solve A x = rhs with the precomputed factorization
        work[0] *= self.inv_denom[0];
        for i in 1..self.n {
            work[i] = (work[i] - self.a_off * work[i - 1]) * self.inv_denom[i];
        }
        for i in (0..self.n - 1).rev() {
            let next = work[i + 1];
            work[i] -= self.c_prime[i] * next;
        }
        for (i, w) in work.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::Numerical(format!("non-finite value at interior node {i}")));
            }
            psi.values[i + 1] = *w;
        }
        psi.values[0] = Complex64::new(0.0, 0.0);
        psi.values[n_total - 1] = Complex64::new(0.0, 0.0);
        Ok(())
    }
}

/// One Crank–Nicolson step; builds a throwaway propagator.
pub fn crank_nicolson_step(psi: &WaveFunction, dt: f64) -> Result<WaveFunction> {
    let prop = Propagator::new(psi.spec, psi.grid.n_points(), psi.grid.dx(), dt)?;
    let mut out = psi.clone();
    prop.step(&mut out)?;
    Ok(out)
}

/// Runs `plan.n_steps` Crank–Nicolson steps, storing frames at the stride.
pub fn evolve(psi0: &WaveFunction, plan: &EvolutionPlan) -> Result<FrameSeries> {
    let prop = Propagator::new(psi0.spec, psi0.grid.n_points(), psi0.grid.dx(), plan.dt)?;
    let norm0 = trapezoid_norm_sq(&psi0.values, psi0.grid.dx()).sqrt();
    let mut psi = psi0.clone();
    let mut times = vec![0.0];
    let mut frames = vec![psi0.clone()];
    for step in 1..=plan.n_steps {
        prop.step(&mut psi).map_err(|e| {
            Error::Numerical(format!("step {step} failed: {e}"))
        })?;
        if step % plan.frame_stride == 0 || step == plan.n_steps {
            let norm = trapezoid_norm_sq(&psi.values, psi.grid.dx()).sqrt();
            if (norm - norm0).abs() > 1e-8 {
                return Err(Error::Numerical(format!(
                    "norm drifted to {norm} at step {step}"
                )));
            }
            times.push(step as f64 * plan.dt);
            frames.push(psi.clone());
        }
    }
    Ok(FrameSeries { times, frames })
}

/// Density recurrence time of a two-mode superposition: 2πħ/|E_a − E_b|.
pub fn beat_period(spec: WellSpec, mode_a: u32, mode_b: u32) -> Result<f64> {
    if mode_a == mode_b {
        return Err(Error::Domain("beat period needs two distinct modes".into()));
    }
    let ea = crate::well::eigenenergy(spec, mode_a)?;
    let eb = crate::well::eigenenergy(spec, mode_b)?;
    Ok(2.0 * std::f64::consts::PI * spec.hbar / (ea - eb).abs())
}
