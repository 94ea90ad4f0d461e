//! Polar decomposition, quantum potential, guidance velocity, and the
//! energy partition of a wavefunction between hard walls.
//!
//! The quantum potential Q = −ħ²/2m · R″/R diverges at nodes of the
//! amplitude R, so every field here carries a validity mask: nodes with
//! R below `EPS_R` times the peak amplitude, and the two wall nodes, are
//! excluded rather than interpolated.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::well::WaveFunction;

/// Relative amplitude threshold below which a node is masked.
pub const EPS_R: f64 = 1e-6;

/// Amplitude/phase form of a wavefunction: ψ = R·e^{iS/ħ}.
#[derive(Debug, Clone)]
pub struct PolarField {
    /// Amplitude R = |ψ| per node (present even on masked nodes).
    pub amplitude: Vec<f64>,
    /// Phase-action S per node, unwrapped along the grid; meaningful on valid nodes.
    pub action: Vec<f64>,
    /// False at the walls and wherever R < EPS_R · max R.
    pub valid: Vec<bool>,
}

/// The quantum potential evaluated on the valid interior nodes.
#[derive(Debug, Clone)]
pub struct QuantumPotentialField {
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
    /// Invalid interior nodes as a fraction of all interior nodes.
    pub masked_fraction: f64,
}

/// Guidance velocity v = (ħ/m)·Im(ψ′/ψ) on the valid nodes.
#[derive(Debug, Clone)]
pub struct VelocityField {
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
}

/// Nodewise split of the total energy into kinetic, quantum, and classical parts.
#[derive(Debug, Clone)]
pub struct EnergyPartition {
    pub kinetic: Vec<f64>,
    pub quantum: Vec<f64>,
    pub classical: Vec<f64>,
    pub total: Vec<f64>,
    pub valid: Vec<bool>,
}

fn amplitude_mask(psi: &WaveFunction) -> Result<(Vec<f64>, Vec<bool>)> {
    let n = psi.values.len();
    let amplitude: Vec<f64> = psi.values.iter().map(|z| z.norm()).collect();
    let peak = amplitude.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::DegenerateField);
    }
    let threshold = EPS_R * peak;
    let mut valid = vec![false; n];
    for i in 1..n - 1 {
        valid[i] = amplitude[i] >= threshold;
    }
    if !valid.iter().any(|&v| v) {
        return Err(Error::DegenerateField);
    }
    Ok((amplitude, valid))
}

/// Splits ψ into amplitude and unwrapped phase-action.
///
/// Unwrapping is anchored at the first valid node: the offset accumulated
/// there is zero, so a global phase e^{iφ} shifts S by the constant ħφ.
pub fn polar_decompose(psi: &WaveFunction) -> Result<PolarField> {
    let (amplitude, valid) = amplitude_mask(psi)?;
    let hbar = psi.spec.hbar;
    let n = psi.values.len();
    let mut action = vec![0.0; n];
    let mut prev_arg: Option<f64> = None;
    let mut offset = 0.0;
    for i in 0..n {
        if !valid[i] {
            continue;
        }
        let arg = psi.values[i].arg();
        if let Some(p) = prev_arg {
            let mut delta = arg - p;
            while delta > std::f64::consts::PI {
                delta -= TAU;
                offset -= TAU;
            }
            while delta < -std::f64::consts::PI {
                delta += TAU;
                offset += TAU;
            }
        }
        action[i] = hbar * (arg + offset);
        prev_arg = Some(arg);
    }
    Ok(PolarField { amplitude, action, valid })
}

/// Quantum potential Q = −(ħ²/2m)·R″/R on valid interior nodes.
///
/// Evaluated through the identity R″/R = Re(ψ″/ψ) + (mv/ħ)², which is the
/// same quantity but stays smooth where a real ψ changes sign between grid
/// nodes (|ψ| has a kink there that a naive amplitude stencil cannot cross).
pub fn quantum_potential(psi: &WaveFunction) -> Result<QuantumPotentialField> {
    let n = psi.values.len();
    if n < 5 {
        return Err(Error::Domain("quantum potential needs at least 5 grid nodes".into()));
    }
    let (_, valid) = amplitude_mask(psi)?;
    let interior = n - 2;
    let masked = valid[1..n - 1].iter().filter(|&&v| !v).count();
    let masked_fraction = masked as f64 / interior as f64;
    if masked_fraction > 0.5 {
        return Err(Error::IllConditionedField { masked_fraction });
    }
    let dx = psi.grid.dx();
    let two_dx = 2.0 * dx;
    let half_hbar_sq = 0.5 * psi.spec.hbar * psi.spec.hbar / psi.spec.mass;
    let half_mass = 0.5 * psi.spec.mass;
    let v_scale = psi.spec.hbar / psi.spec.mass;
    let mut values = vec![0.0; n];
    for i in 1..n - 1 {
        if valid[i] {
            let lap = (psi.values[i - 1] - 2.0 * psi.values[i] + psi.values[i + 1]) / (dx * dx);
            let derivative = (psi.values[i + 1] - psi.values[i - 1]) / two_dx;
            let v = v_scale * (derivative / psi.values[i]).im;
            values[i] = -half_hbar_sq * (lap / psi.values[i]).re - half_mass * v * v;
        }
    }
    Ok(QuantumPotentialField { values, valid, masked_fraction })
}

/// v_i = (ħ/m)·Im(ψ′/ψ) with central first differences, masked like the amplitude.
pub fn guidance_velocity(psi: &WaveFunction) -> Result<VelocityField> {
    let (_, valid) = amplitude_mask(psi)?;
    let n = psi.values.len();
    let two_dx = 2.0 * psi.grid.dx();
    let scale = psi.spec.hbar / psi.spec.mass;
    let mut values = vec![0.0; n];
    for i in 1..n - 1 {
        if valid[i] {
            let derivative = (psi.values[i + 1] - psi.values[i - 1]) / two_dx;
            values[i] = scale * (derivative / psi.values[i]).im;
        }
    }
    Ok(VelocityField { values, valid })
}

/// Nodewise energy balance: ½mv² + Q + V, with V ≡ 0 inside the well.
pub fn energy_partition(psi: &WaveFunction) -> Result<EnergyPartition> {
    let q = quantum_potential(psi)?;
    let v = guidance_velocity(psi)?;
    let n = psi.values.len();
    let mut valid = vec![false; n];
    let mut kinetic = vec![0.0; n];
    let mut total = vec![0.0; n];
    let classical = vec![0.0; n];
    for i in 0..n {
        valid[i] = q.valid[i] && v.valid[i];
        if valid[i] {
            kinetic[i] = 0.5 * psi.spec.mass * v.values[i] * v.values[i];
            total[i] = kinetic[i] + q.values[i] + classical[i];
        }
    }
    Ok(EnergyPartition { kinetic, quantum: q.values, classical, total, valid })
}
