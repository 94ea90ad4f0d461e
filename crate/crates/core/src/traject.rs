//! Bohmian trajectories and ensembles.
//!
//! Initial positions are drawn from |ψ|² by inverse-transform sampling of
//! the trapezoid-rule CDF, trajectories integrate dx/dt = v(x, t) with
//! classical RK4 against a tabulated velocity field (linear interpolation
//! in x and t), and the Kolmogorov–Smirnov statistic compares the ensemble
//! against |ψ(·, t)|² at any later time.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolve::FrameSeries;
use crate::pilot::guidance_velocity;
use crate::well::WaveFunction;

/// Masked spans of up to this many nodes are bridged by linear interpolation.
pub const MASK_BRIDGE_MAX: usize = 3;

/// A trajectory may spend at most this many consecutive steps in masked territory.
pub const MASKED_STEPS_MAX: usize = 10;

/// One particle's path.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
}

/// A set of trajectories sharing one time axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub seed: u64,
    pub times: Vec<f64>,
    /// positions[p][k] is particle p at times[k].
    pub positions: Vec<Vec<f64>>,
}

impl Ensemble {
    pub fn particle_count(&self) -> usize {
        self.positions.len()
    }

    pub fn trajectory(&self, particle: usize) -> Trajectory {
        Trajectory { times: self.times.clone(), positions: self.positions[particle].clone() }
    }

    /// All particle positions at the stored time nearest to `t`.
    pub fn positions_at(&self, t: f64) -> Result<(f64, Vec<f64>)> {
        let (t0, t1) = (self.times[0], *self.times.last().unwrap());
        if t < t0 - 1e-12 || t > t1 + 1e-12 {
            return Err(Error::Domain(format!("t = {t} outside ensemble span [{t0}, {t1}]")));
        }
        let k = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().partial_cmp(&(b.1 - t).abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        Ok((self.times[k], self.positions.iter().map(|p| p[k]).collect()))
    }
}

/// Kolmogorov–Smirnov comparison of an ensemble against |ψ(·,t)|².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KSResult {
    pub statistic: f64,
    pub sample_count: usize,
    pub time: f64,
}

/// Velocity lookup used by the RK4 integrator. The flag marks a query that
/// landed in an unbridged masked region (the value is then a nearest-valid
/// fallback).
pub trait VelocitySampler: Sync {
    fn velocity(&self, x: f64, t: f64) -> (f64, bool);
}

struct FrameVelocity {
    values: Vec<f64>,
    valid: Vec<bool>,
}

/// Guidance-velocity fields tabulated at the stored frames of an evolution.
pub struct TabulatedFlow {
    times: Vec<f64>,
    dx: f64,
    frames: Vec<FrameVelocity>,
}

impl TabulatedFlow {
    pub fn from_frames(series: &FrameSeries) -> Result<Self> {
        if series.frames.is_empty() {
            return Err(Error::Domain("frame series is empty".into()));
        }
        let dx = series.frames[0].grid.dx();
        let frames = series
            .frames
            .iter()
            .map(|psi| {
                let field = guidance_velocity(psi)?;
                Ok(bridge(field.values, field.valid))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { times: series.times.clone(), dx, frames })
    }

    pub fn time_span(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }

    fn frame_velocity(&self, frame: &FrameVelocity, x: f64) -> (f64, bool) {
        let n = frame.values.len();
        let mut i = (x / self.dx).floor() as usize;
        if i >= n - 1 {
            i = n - 2;
        }
        let s = (x / self.dx - i as f64).clamp(0.0, 1.0);
        if frame.valid[i] && frame.valid[i + 1] {
            ((1.0 - s) * frame.values[i] + s * frame.values[i + 1], false)
        } else {
            // nearest valid node, searching outward
            for d in 0..n {
                if i >= d && frame.valid[i - d] {
                    return (frame.values[i - d], true);
                }
                if i + d < n && frame.valid[i + d] {
                    return (frame.values[i + d], true);
                }
            }
            (0.0, true)
        }
    }
}

/// Bridges short masked spans and extends wall values from the nearest
/// valid node so interpolation is defined on the whole clamp interval.
fn bridge(mut values: Vec<f64>, mut valid: Vec<bool>) -> FrameVelocity {
    let n = values.len();
    if let Some(first) = valid.iter().position(|&v| v) {
        for i in 0..first {
            values[i] = values[first];
            valid[i] = true;
        }
    }
    if let Some(last) = valid.iter().rposition(|&v| v) {
        for i in last + 1..n {
            values[i] = values[last];
            valid[i] = true;
        }
    }
    let mut i = 0;
    while i < n {
        if valid[i] {
            i += 1;
            continue;
        }
        let start = i; // first invalid node of the run; start > 0 here
        let mut end = i;
        while end < n && !valid[end] {
            end += 1;
        }
        // run is start..end with valid[start-1] and valid[end]
        if end - start <= MASK_BRIDGE_MAX {
            let v0 = values[start - 1];
            let v1 = values[end];
            let len = (end - start + 1) as f64;
            for (k, j) in (start..end).enumerate() {
                let s = (k + 1) as f64 / len;
                values[j] = (1.0 - s) * v0 + s * v1;
                valid[j] = true;
            }
        }
        i = end;
    }
    FrameVelocity { values, valid }
}

impl VelocitySampler for TabulatedFlow {
    fn velocity(&self, x: f64, t: f64) -> (f64, bool) {
        let m = self.times.len();
        if m == 1 {
            return self.frame_velocity(&self.frames[0], x);
        }
        // bracketing frames, clamping t to the span
        let k = match self.times.partition_point(|&ft| ft <= t) {
            0 => 0,
            p if p >= m => m - 2,
            p => p - 1,
        };
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let theta = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        let (v0, m0) = self.frame_velocity(&self.frames[k], x);
        let (v1, m1) = self.frame_velocity(&self.frames[k + 1], x);
        ((1.0 - theta) * v0 + theta * v1, m0 || m1)
    }
}

/// Inverse-transform samples from the trapezoid-rule CDF of |ψ0|².
///
/// Deterministic for a given seed (ChaCha8 keyed by the seed); samples are
/// clamped into [dx, L − dx].
pub fn sample_initial_positions(psi0: &WaveFunction, count: usize, seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Domain("sample count must be >= 1".into()));
    }
    let density = psi0.density();
    let n = density.len();
    let dx = psi0.grid.dx();
    let mut cdf = vec![0.0; n];
    for i in 1..n {
        cdf[i] = cdf[i - 1] + 0.5 * (density[i - 1] + density[i]) * dx;
    }
    let total = cdf[n - 1];
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::DegenerateField);
    }
    let lo = dx;
    let hi = psi0.grid.length() - dx;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let target = rng.gen::<f64>() * total;
        let j = match cdf.partition_point(|&c| c <= target) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        // invert the quadratic CDF piece on [x_j, x_{j+1}]
        let t = (target - cdf[j]) / dx;
        let rho0 = density[j];
        let drho = density[j + 1] - rho0;
        let disc = (rho0 * rho0 + 2.0 * drho * t).max(0.0);
        let s = if rho0 + disc.sqrt() > 0.0 { 2.0 * t / (rho0 + disc.sqrt()) } else { 0.5 };
        let x = psi0.grid.position(j) + s.clamp(0.0, 1.0) * dx;
        out.push(x.clamp(lo, hi));
    }
    Ok(out)
}

struct IntegrationSetup {
    t_start: f64,
    t_end: f64,
    dt: f64,
    clamp: (f64, f64),
    record_stride: usize,
}

fn rk4_integrate<S: VelocitySampler>(
    sampler: &S,
    x0: f64,
    setup: &IntegrationSetup,
) -> Result<Trajectory> {
    let (lo, hi) = setup.clamp;
    if x0 < lo || x0 > hi {
        return Err(Error::Domain(format!("x0 = {x0} outside clamp interval [{lo}, {hi}]")));
    }
    let span = setup.t_end - setup.t_start;
    let n_steps = if span <= 0.0 { 0 } else { (span / setup.dt).ceil() as usize };
    let mut times = Vec::with_capacity(n_steps / setup.record_stride + 2);
    let mut positions = Vec::with_capacity(n_steps / setup.record_stride + 2);
    times.push(setup.t_start);
    positions.push(x0);
    let mut x = x0;
    let mut masked_run = 0usize;
    for step in 1..=n_steps {
        let t = setup.t_start + (step - 1) as f64 * setup.dt;
        let h = if step == n_steps { setup.t_end - t } else { setup.dt };
        let (k1, m1) = sampler.velocity(x, t);
        let (k2, m2) = sampler.velocity(x + 0.5 * h * k1, t + 0.5 * h);
        let (k3, m3) = sampler.velocity(x + 0.5 * h * k2, t + 0.5 * h);
        let (k4, m4) = sampler.velocity(x + h * k3, t + h);
        if m1 || m2 || m3 || m4 {
            masked_run += 1;
            if masked_run > MASKED_STEPS_MAX {
                return Err(Error::MaskedRegion { time: t, position: x });
            }
        } else {
            masked_run = 0;
        }
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !x.is_finite() {
            return Err(Error::Numerical(format!("non-finite position at t = {t}")));
        }
        if x < lo || x > hi {
            return Err(Error::WallClamp { time: t + h, position: x });
        }
        if step % setup.record_stride == 0 || step == n_steps {
            times.push(t + h);
            positions.push(x);
        }
    }
    Ok(Trajectory { times, positions })
}

/// RK4 integration of dx/dt = v(x, t) against any velocity sampler.
///
/// Positions are confined to `clamp`; leaving it is an error, as is spending
/// more than [`MASKED_STEPS_MAX`] consecutive steps on masked queries.
pub fn integrate_velocity_field<S: VelocitySampler>(
    sampler: &S,
    x0: f64,
    t_span: (f64, f64),
    dt: f64,
    clamp: (f64, f64),
) -> Result<Trajectory> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    if t_span.1 < t_span.0 {
        return Err(Error::Domain(format!("bad time span {t_span:?}")));
    }
    let setup = IntegrationSetup {
        t_start: t_span.0,
        t_end: t_span.1,
        dt,
        clamp,
        record_stride: 1,
    };
    rk4_integrate(sampler, x0, &setup)
}

/// Integrates one trajectory over the full time span of `frames`.
pub fn integrate_trajectory(x0: f64, frames: &FrameSeries, dt_traj: f64) -> Result<Trajectory> {
    let flow = TabulatedFlow::from_frames(frames)?;
    integrate_in_flow(x0, &flow, frames, dt_traj, 1)
}

fn integrate_in_flow(
    x0: f64,
    flow: &TabulatedFlow,
    frames: &FrameSeries,
    dt_traj: f64,
    record_stride: usize,
) -> Result<Trajectory> {
    if !(dt_traj > 0.0) {
        return Err(Error::Domain(format!("dt_traj must be positive, got {dt_traj}")));
    }
    let grid = &frames.frames[0].grid;
    let (t0, t1) = flow.time_span();
    let setup = IntegrationSetup {
        t_start: t0,
        t_end: t1,
        dt: dt_traj,
        clamp: (grid.dx(), grid.length() - grid.dx()),
        record_stride,
    };
    rk4_integrate(flow, x0, &setup)
}

/// Integrates an ensemble from |ψ0|²-sampled initial positions.
///
/// Every recorded position is stored (`record_stride` = 1); see
/// [`run_ensemble_recorded`] for large ensembles.
pub fn run_ensemble(
    psi0: &WaveFunction,
    frames: &FrameSeries,
    count: usize,
    seed: u64,
    dt_traj: f64,
) -> Result<Ensemble> {
    run_ensemble_recorded(psi0, frames, count, seed, dt_traj, 1)
}

/// As [`run_ensemble`], keeping only every `record_stride`-th step per particle.
pub fn run_ensemble_recorded(
    psi0: &WaveFunction,
    frames: &FrameSeries,
    count: usize,
    seed: u64,
    dt_traj: f64,
    record_stride: usize,
) -> Result<Ensemble> {
    if record_stride == 0 {
        return Err(Error::Domain("record_stride must be >= 1".into()));
    }
    let starts = sample_initial_positions(psi0, count, seed)?;
    let flow = TabulatedFlow::from_frames(frames)?;
    let results: Vec<Trajectory> = starts
        .par_iter()
        .enumerate()
        .map(|(index, &x0)| {
            integrate_in_flow(x0, &flow, frames, dt_traj, record_stride)
                .map_err(|e| Error::Particle { index, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;
    let times = results[0].times.clone();
    let positions = results.into_iter().map(|t| t.positions).collect();
    Ok(Ensemble { seed, times, positions })
}

/// CDF of |ψ(·,t)|² with the density interpolated linearly between the
/// bracketing frames; returns a closure over node CDF values.
fn frame_cdf(frames: &FrameSeries, t: f64) -> Result<impl Fn(f64) -> f64> {
    let (t0, t1) = (frames.times[0], *frames.times.last().unwrap());
    if t < t0 - 1e-12 || t > t1 + 1e-12 {
        return Err(Error::Domain(format!("t = {t} outside frame span [{t0}, {t1}]")));
    }
    let m = frames.times.len();
    let density: Vec<f64> = if m == 1 {
        frames.frames[0].density()
    } else {
        let k = match frames.times.partition_point(|&ft| ft <= t) {
            0 => 0,
            p if p >= m => m - 2,
            p => p - 1,
        };
        let theta = ((t - frames.times[k]) / (frames.times[k + 1] - frames.times[k])).clamp(0.0, 1.0);
        let d0 = frames.frames[k].density();
        let d1 = frames.frames[k + 1].density();
        d0.iter().zip(&d1).map(|(a, b)| (1.0 - theta) * a + theta * b).collect()
    };
    let grid = frames.frames[0].grid.clone();
    let dx = grid.dx();
    let n = density.len();
    let mut cdf = vec![0.0; n];
    for i in 1..n {
        cdf[i] = cdf[i - 1] + 0.5 * (density[i - 1] + density[i]) * dx;
    }
    let total = cdf[n - 1];
    if !(total > 0.0) {
        return Err(Error::DegenerateField);
    }
    Ok(move |x: f64| -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= grid.length() {
            return 1.0;
        }
        let mut j = (x / dx).floor() as usize;
        if j >= n - 1 {
            j = n - 2;
        }
        let s = (x / dx - j as f64).clamp(0.0, 1.0);
        let piece = dx * (density[j] * s + 0.5 * (density[j + 1] - density[j]) * s * s);
        ((cdf[j] + piece) / total).clamp(0.0, 1.0)
    })
}

/// Two-sided KS statistic between the ensemble at (the stored time nearest) `t`
/// and the |ψ(·,t)|² distribution.
pub fn equivariance_test(ensemble: &Ensemble, frames: &FrameSeries, t: f64) -> Result<KSResult> {
    let (t_used, mut xs) = ensemble.positions_at(t)?;
    let cdf = frame_cdf(frames, t_used)?;
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut statistic = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        statistic = statistic.max(((i + 1) as f64 / n - f).abs());
        statistic = statistic.max((i as f64 / n - f).abs());
    }
    Ok(KSResult { statistic, sample_count: xs.len(), time: t_used })
}
