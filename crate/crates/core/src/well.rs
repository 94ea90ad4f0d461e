//! Infinite-square-well eigenstates and superpositions on a uniform grid.
//!
//! States use the standard convention ψ_m(x) = √(2/L)·sin(mπx/L); the
//! historical convention sin(2πnx/L) maps onto it via [`paper_mode_to_standard`]
//! (n → m = 2n), so both labellings address the same states.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Well geometry and particle parameters, in natural units (ħ defaults to 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellSpec {
    /// Wall separation L.
    pub length: f64,
    /// Particle mass.
    pub mass: f64,
    /// Reduced Planck constant.
    pub hbar: f64,
}

impl WellSpec {
    pub fn new(length: f64, mass: f64, hbar: f64) -> Result<Self> {
        if !(length > 0.0 && mass > 0.0 && hbar > 0.0) {
            return Err(Error::Domain(format!(
                "well parameters must be positive: L={length}, mass={mass}, hbar={hbar}"
            )));
        }
        Ok(Self { length, mass, hbar })
    }

    /// L = 1, mass = 1, ħ = 1.
    pub fn unit() -> Self {
        Self { length: 1.0, mass: 1.0, hbar: 1.0 }
    }
}

/// Uniform grid on [0, L] with both endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    n_points: usize,
    dx: f64,
    length: f64,
}

impl Grid1D {
    pub fn new(length: f64, n_points: usize) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::Domain(format!("grid length must be positive, got {length}")));
        }
        if n_points < 3 {
            return Err(Error::Domain(format!("grid needs at least 3 points, got {n_points}")));
        }
        let dx = length / (n_points - 1) as f64;
        Ok(Self { n_points, dx, length })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Node coordinate; endpoints are exactly 0 and L.
    pub fn position(&self, i: usize) -> f64 {
        if i == self.n_points - 1 {
            self.length
        } else {
            i as f64 * self.dx
        }
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.position(i))
    }
}

/// Complex wavefunction sampled on a [`Grid1D`], zero at both walls.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub grid: Grid1D,
    pub spec: WellSpec,
    pub values: Vec<Complex64>,
}

impl WaveFunction {
    /// Trapezoid-rule L2 norm.
    pub fn norm(&self) -> f64 {
        trapezoid_norm_sq(&self.values, self.grid.dx()).sqrt()
    }

    /// |ψ|² per node.
    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Trapezoid inner product ⟨self, other⟩ (conjugate-linear in self).
    pub fn inner(&self, other: &WaveFunction) -> Complex64 {
        let dx = self.grid.dx();
        let n = self.values.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += self.values[i].conj() * other.values[i] * w;
        }
        acc * dx
    }
}

pub(crate) fn trapezoid_norm_sq(values: &[Complex64], dx: f64) -> f64 {
    let n = values.len();
    let mut acc = 0.0;
    for (i, z) in values.iter().enumerate() {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        acc += w * z.norm_sqr();
    }
    acc * dx
}

fn check_grid(spec: &WellSpec, grid: &Grid1D) -> Result<()> {
    if (grid.length() - spec.length).abs() > 1e-12 * spec.length {
        return Err(Error::Config(format!(
            "grid length {} does not match well length {}",
            grid.length(),
            spec.length
        )));
    }
    Ok(())
}

/// Normalized eigenstate ψ_m(x) = √(2/L)·sin(mπx/L) on the grid.
pub fn eigenstate(spec: WellSpec, mode: u32, grid: &Grid1D) -> Result<WaveFunction> {
    if mode == 0 {
        return Err(Error::Domain("mode must be >= 1".into()));
    }
    check_grid(&spec, grid)?;
    let amp = (2.0 / spec.length).sqrt();
    let k = mode as f64 * PI / spec.length;
    let n = grid.n_points();
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for i in 1..n - 1 {
        values[i] = Complex64::new(amp * (k * grid.position(i)).sin(), 0.0);
    }
    Ok(WaveFunction { grid: grid.clone(), spec, values })
}

/// E_m = m²π²ħ²/(2·mass·L²).
pub fn eigenenergy(spec: WellSpec, mode: u32) -> Result<f64> {
    if mode == 0 {
        return Err(Error::Domain("mode must be >= 1".into()));
    }
    let k = mode as f64 * PI / spec.length;
    Ok(spec.hbar * spec.hbar * k * k / (2.0 * spec.mass))
}

/// Maps the sin(2πnx/L) labelling onto the standard basis: n → 2n.
pub fn paper_mode_to_standard(n: u32) -> Result<u32> {
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    Ok(2 * n)
}

/// Normalized superposition Σ c_m ψ_m of distinct modes.
pub fn superpose(terms: &[(Complex64, u32)], spec: WellSpec, grid: &Grid1D) -> Result<WaveFunction> {
    if terms.is_empty() {
        return Err(Error::Domain("superposition needs at least one term".into()));
    }
    for (i, &(_, m)) in terms.iter().enumerate() {
        if terms[..i].iter().any(|&(_, m2)| m2 == m) {
            return Err(Error::Domain(format!("duplicate mode {m} in superposition")));
        }
    }
    if terms.iter().all(|(c, _)| c.norm_sqr() == 0.0) {
        return Err(Error::Domain("all superposition coefficients are zero".into()));
    }
    let n = grid.n_points();
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for &(c, mode) in terms {
        let basis = eigenstate(spec, mode, grid)?;
        for (v, b) in values.iter_mut().zip(&basis.values) {
            *v += c * b;
        }
    }
    let norm = trapezoid_norm_sq(&values, grid.dx()).sqrt();
    if norm == 0.0 {
        return Err(Error::Domain("superposition cancels identically".into()));
    }
    for v in &mut values {
        *v /= norm;
    }
    Ok(WaveFunction { grid: grid.clone(), spec, values })
}
