//! Finite-N Dyson particle system: Euler–Maruyama integration, empirical
//! densities and Kolmogorov–Smirnov distances.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spacing of the arithmetic jitter applied to coincident particles.
pub const JITTER: f64 = 1e-8;
/// A step is accepted only if no particle's drift displacement exceeds this
/// fraction of the configuration diameter.
pub const STABILITY_FRACTION: f64 = 0.1;
/// Number of halvings of `dt` before the step is declared to have underflowed.
pub const MAX_HALVINGS: i32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub n_particles: usize,
    pub beta: f64,
    pub dt: f64,
    pub seed: u64,
    pub t_end: f64,
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 {
            return Err(Error::invalid("n_particles", "must be at least 1"));
        }
        if !(self.beta >= 1.0) || !self.beta.is_finite() {
            return Err(Error::invalid("beta", format!("must be >= 1, got {}", self.beta)));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::invalid("t_end", format!("must be positive, got {}", self.t_end)));
        }
        Ok(())
    }

    pub fn dt_min(&self) -> f64 {
        self.dt * 2f64.powi(-MAX_HALVINGS)
    }
}

/// Sorted particle positions at a given time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleState {
    pub positions: Vec<f64>,
    pub time: f64,
}

impl ParticleState {
    /// Sorts `positions`; rejects non-finite entries and negative times.
    pub fn new(mut positions: Vec<f64>, time: f64) -> Result<Self> {
        if let Some(i) = positions.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid("positions", format!("particle {i} is not finite")));
        }
        if !(time >= 0.0) {
            return Err(Error::invalid("time", format!("must be >= 0, got {time}")));
        }
        positions.sort_by(f64::total_cmp);
        Ok(Self { positions, time })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn is_sorted(&self) -> bool {
        self.positions.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.positions)
    }

    pub fn mean(&self) -> f64 {
        self.positions.iter().sum::<f64>() / self.len() as f64
    }
}

fn diameter(sorted: &[f64]) -> f64 {
    match (sorted.first(), sorted.last()) {
        (Some(a), Some(b)) => b - a,
        _ => 0.0,
    }
}

/// Smallest admissible gap between neighbours of a sorted configuration.
pub fn gap_floor(sorted: &[f64]) -> f64 {
    1e-9 * (diameter(sorted) + 1.0)
}

fn min_gap(sorted: &[f64]) -> f64 {
    sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// Spreads every run of neighbours closer than `gap_floor` into an arithmetic
/// progression with spacing [`JITTER`] around the run's centre. A spread run
/// can land on its neighbours, so passes repeat until no gap is below the floor.
pub fn jitter_coincident(sorted: &mut [f64]) -> bool {
    let mut changed = false;
    while jitter_pass(sorted) {
        changed = true;
    }
    changed
}

fn jitter_pass(sorted: &mut [f64]) -> bool {
    let floor = gap_floor(sorted);
    let mut changed = false;
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] - sorted[end - 1] < floor {
            end += 1;
        }
        if end - start > 1 {
            let m = end - start;
            let centre = 0.5 * (sorted[start] + sorted[end - 1]);
            for (k, x) in sorted[start..end].iter_mut().enumerate() {
                *x = centre + (k as f64 - 0.5 * (m - 1) as f64) * JITTER;
            }
            changed = true;
        }
        start = end;
    }
    if changed {
        sorted.sort_by(f64::total_cmp);
    }
    changed
}

/// `(1/N) Σ_{j≠i} 1/(x_i - x_j)` for every `i`, each pair evaluated once.
pub fn drift(positions: &[f64]) -> Vec<f64> {
    let n = positions.len();
    let mut out = vec![0.0; n];
    for i in 0..n {
        let xi = positions[i];
        let mut acc = 0.0;
        for j in i + 1..n {
            let v = 1.0 / (xi - positions[j]);
            acc += v;
            out[j] -= v;
        }
        out[i] += acc;
    }
    let inv_n = 1.0 / n as f64;
    out.iter_mut().for_each(|d| *d *= inv_n);
    out
}

/// An accepted step together with the step size that was used.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: ParticleState,
    pub dt_used: f64,
    pub halvings: i32,
}

/// One Euler–Maruyama step of size `params.dt`, halved until accepted.
pub fn step_dyson(state: &ParticleState, params: &SimParams, noise: &[f64]) -> Result<ParticleState> {
    step_dyson_with_dt(state, params, noise, params.dt).map(|o| o.state)
}

/// One Euler–Maruyama step starting from step size `dt`.
///
/// The step is halved until no drift displacement exceeds
/// [`STABILITY_FRACTION`] times the diameter; the same noise vector is reused
/// for every retry, scaled by the square root of the trial step. Neighbours of
/// the accepted configuration closer than [`gap_floor`] are re-spread with
/// [`jitter_coincident`]. Rejecting such proposals instead stalls: with the
/// noise fixed, a gap just above the floor forces the step below 1e-20.
pub fn step_dyson_with_dt(
    state: &ParticleState,
    params: &SimParams,
    noise: &[f64],
    dt: f64,
) -> Result<StepOutcome> {
    let n = state.len();
    if noise.len() != n {
        return Err(Error::invalid("noise", format!("expected {n} draws, got {}", noise.len())));
    }
    if n != params.n_particles {
        return Err(Error::invalid(
            "positions",
            format!("state has {n} particles, params say {}", params.n_particles),
        ));
    }
    let mut x = state.positions.clone();
    if !state.is_sorted() {
        x.sort_by(f64::total_cmp);
    }
    jitter_coincident(&mut x);
    let d = drift(&x);
    let max_drift = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diam = diameter(&x);
    let noise_scale = (2.0 / (params.beta * n as f64)).sqrt();
    let dt_min = dt * 2f64.powi(-MAX_HALVINGS);

    let mut h = dt;
    let mut halvings = 0;
    let mut proposal = vec![0.0; n];
    loop {
        if h < dt_min {
            return Err(Error::DtUnderflow {
                time: state.time,
                dt: h,
                dt_min,
            });
        }
        if h * max_drift <= STABILITY_FRACTION * diam || n == 1 {
            let s = noise_scale * h.sqrt();
            for i in 0..n {
                proposal[i] = x[i] + h * d[i] + s * noise[i];
            }
            proposal.sort_by(f64::total_cmp);
            if n >= 2 && min_gap(&proposal) < gap_floor(&proposal) {
                jitter_coincident(&mut proposal);
            }
            return Ok(StepOutcome {
                state: ParticleState {
                    positions: proposal,
                    time: state.time + h,
                },
                dt_used: h,
                halvings,
            });
        }
        h *= 0.5;
        halvings += 1;
    }
}

/// The standard Gaussian draws of step `step`: a ChaCha8 stream selected by
/// `step` under a key derived from `seed`, consumed in particle order.
pub fn step_noise(seed: u64, step: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(step);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Integrates from `init` and returns the states at `sample_times`.
///
/// Steps are truncated so every sample time is hit exactly. Step `k`
/// (counting accepted steps from 0) draws its noise from [`step_noise`].
pub fn simulate(init: &ParticleState, params: &SimParams, sample_times: &[f64]) -> Result<Vec<ParticleState>> {
    simulate_with(init, params, sample_times, |_| {})
}

/// Like [`simulate`], calling `observe` after every accepted step.
pub fn simulate_with<F: FnMut(&StepOutcome)>(
    init: &ParticleState,
    params: &SimParams,
    sample_times: &[f64],
    mut observe: F,
) -> Result<Vec<ParticleState>> {
    params.validate()?;
    if init.len() != params.n_particles {
        return Err(Error::invalid(
            "init",
            format!("{} particles given, params say {}", init.len(), params.n_particles),
        ));
    }
    for (k, &s) in sample_times.iter().enumerate() {
        if !(s >= init.time && s <= params.t_end) {
            return Err(Error::invalid(
                "sample_times",
                format!("time {s} outside [{}, {}]", init.time, params.t_end),
            ));
        }
        if k > 0 && s < sample_times[k - 1] {
            return Err(Error::invalid("sample_times", "must be ascending"));
        }
    }
    let mut out = Vec::with_capacity(sample_times.len());
    let mut state = init.clone();
    let mut step = 0u64;
    for &target in sample_times {
        while state.time < target {
            let remaining = target - state.time;
            let noise = step_noise(params.seed, step, params.n_particles);
            let outcome = step_dyson_with_dt(&state, params, &noise, params.dt.min(remaining))?;
            step += 1;
            observe(&outcome);
            let landed = outcome.dt_used >= remaining;
            state = outcome.state;
            if landed {
                state.time = target;
            }
        }
        out.push(state.clone());
    }
    Ok(out)
}

/// Histogram bins `[x_min, x_max]` split into `n_bins` equal cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_bins: usize,
}

impl HistogramGrid {
    pub fn new(x_min: f64, x_max: f64, n_bins: usize) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::invalid("grid", format!("need x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if n_bins == 0 {
            return Err(Error::invalid("grid", "need at least one bin"));
        }
        Ok(Self { x_min, x_max, n_bins })
    }

    pub fn width(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_bins as f64
    }

    pub fn centre(&self, k: usize) -> f64 {
        self.x_min + (k as f64 + 0.5) * self.width()
    }

    /// Bin of `x`; cells are half-open except the last, which includes `x_max`.
    pub fn bin(&self, x: f64) -> Option<usize> {
        if !(x >= self.x_min && x <= self.x_max) {
            return None;
        }
        let k = ((x - self.x_min) / self.width()) as usize;
        Some(k.min(self.n_bins - 1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDensity {
    pub grid: HistogramGrid,
    pub values: Vec<f64>,
    pub time: f64,
}

impl EmpiricalDensity {
    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.width()
    }

    /// Largest deviation from `rho` at the bin centres.
    pub fn sup_distance<F: Fn(f64) -> f64>(&self, rho: F) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| (v - rho(self.grid.centre(k))).abs())
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x", "rho"])?;
        for (k, v) in self.values.iter().enumerate() {
            out.write_record([self.grid.centre(k).to_string(), v.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn empirical_density(state: &ParticleState, grid: HistogramGrid) -> Result<EmpiricalDensity> {
    let n = state.len();
    if n == 0 {
        return Err(Error::invalid("state", "no particles"));
    }
    let mut counts = vec![0usize; grid.n_bins];
    for (index, &position) in state.positions.iter().enumerate() {
        let k = grid.bin(position).ok_or(Error::OutOfRange {
            index,
            position,
            x_min: grid.x_min,
            x_max: grid.x_max,
        })?;
        counts[k] += 1;
    }
    let scale = 1.0 / (n as f64 * grid.width());
    Ok(EmpiricalDensity {
        grid,
        values: counts.iter().map(|&c| c as f64 * scale).collect(),
        time: state.time,
    })
}

/// `sup_x |F_N(x) - F(x)|` for the empirical CDF `F_N` of the state.
pub fn ks_distance<F: Fn(f64) -> f64>(state: &ParticleState, cdf: F) -> f64 {
    let mut x = state.positions.clone();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let mut d = 0.0f64;
    for (i, &xi) in x.iter().enumerate() {
        let f = cdf(xi);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d.clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Writes `time,particle_index,position` rows for every state.
pub fn write_trajectory_csv<W: Write>(states: &[ParticleState], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["time", "particle_index", "position"])?;
    for s in states {
        let t = s.time.to_string();
        for (i, x) in s.positions.iter().enumerate() {
            out.write_record([t.as_str(), &i.to_string(), &x.to_string()])?;
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize) -> SimParams {
        SimParams {
            n_particles: n,
            beta: 2.0,
            dt: 0.01,
            seed: 7,
            t_end: 1.0,
        }
    }

    #[test]
    fn single_particle_is_brownian() {
        let s = ParticleState::new(vec![0.3], 0.0).unwrap();
        let p = SimParams { beta: 4.0, ..params(1) };
        let out = step_dyson(&s, &p, &[1.5]).unwrap();
        assert_eq!(out.positions[0], 0.3 + (2.0 * 0.01 / 4.0f64).sqrt() * 1.5);
    }

    #[test]
    fn two_particles_without_noise() {
        let s = ParticleState::new(vec![-1.0, 1.0], 0.0).unwrap();
        let out = step_dyson(&s, &params(2), &[0.0, 0.0]).unwrap();
        assert!((out.positions[0] + 1.0025).abs() < 1e-15);
        assert!((out.positions[1] - 1.0025).abs() < 1e-15);
        assert_eq!(out.time, 0.01);
    }

    #[test]
    fn mirror_noise_gives_mirror_state() {
        let s = ParticleState::new(vec![-1.0, -0.2, 0.2, 1.0], 0.0).unwrap();
        let w = [0.3, -1.2, 0.7, 0.1];
        let mut rev: Vec<f64> = w.iter().map(|v| -v).collect();
        rev.reverse();
        let a = step_dyson(&s, &params(4), &w).unwrap();
        let b = step_dyson(&s, &params(4), &rev).unwrap();
        for (x, y) in a.positions.iter().zip(b.positions.iter().rev()) {
            assert!((x + y).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_params_and_noise() {
        let s = ParticleState::new(vec![0.0, 1.0], 0.0).unwrap();
        assert!(SimParams { beta: 0.5, ..params(2) }.validate().is_err());
        assert!(SimParams { dt: 0.0, ..params(2) }.validate().is_err());
        assert!(step_dyson(&s, &params(2), &[0.0]).is_err());
    }

    #[test]
    fn coincident_particles_are_spread() {
        let mut x = vec![0.0; 5];
        assert!(jitter_coincident(&mut x));
        let expected = [-2e-8, -1e-8, 0.0, 1e-8, 2e-8];
        for (a, b) in x.iter().zip(expected) {
            assert!((a - b).abs() < 1e-22);
        }
        let mut y = vec![-1.0, 1.0];
        assert!(!jitter_coincident(&mut y));
    }

    #[test]
    fn simulate_trivial_and_deterministic() {
        let init = ParticleState::new(vec![0.0; 20], 0.0).unwrap();
        let p = params(20);
        assert_eq!(simulate(&init, &p, &[0.0]).unwrap(), vec![init.clone()]);
        let a = simulate(&init, &p, &[0.5, 1.0]).unwrap();
        let b = simulate(&init, &p, &[0.5, 1.0]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].time, 0.5);
        assert_eq!(a[1].time, 1.0);
        assert!(a.iter().all(|s| s.is_sorted()));
    }

    #[test]
    fn histogram_of_two_particles() {
        let s = ParticleState::new(vec![-1.0, 1.0], 0.0).unwrap();
        let g = HistogramGrid::new(-2.0, 2.0, 4).unwrap();
        let d = empirical_density(&s, g).unwrap();
        // -1 opens the second cell [-1, 0), 1 opens the last cell [1, 2]
        assert_eq!(d.values, vec![0.0, 0.5, 0.0, 0.5]);
        assert!((d.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_names_particle() {
        let s = ParticleState::new(vec![-1.0, 3.0], 0.0).unwrap();
        let g = HistogramGrid::new(-2.0, 2.0, 4).unwrap();
        match empirical_density(&s, g) {
            Err(Error::OutOfRange { index, .. }) => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ks_of_point_mass_against_uniform() {
        let s = ParticleState::new(vec![0.0; 10], 0.0).unwrap();
        let d = ks_distance(&s, |x| (0.5 + x / 2.0).clamp(0.0, 1.0));
        assert_eq!(d, 0.5);
    }

    #[test]
    fn two_sample_ks() {
        assert_eq!(ks_two_sample(&[0.0, 1.0], &[0.0, 1.0]), 0.0);
        assert_eq!(ks_two_sample(&[0.0, 1.0], &[2.0, 3.0]), 1.0);
        assert_eq!(ks_two_sample(&[0.0, 1.0, 2.0, 3.0], &[1.5, 2.5]), 0.5);
    }

    #[test]
    fn noise_depends_on_seed_and_step() {
        assert_eq!(step_noise(1, 2, 8), step_noise(1, 2, 8));
        assert_ne!(step_noise(1, 2, 8), step_noise(1, 3, 8));
        assert_ne!(step_noise(1, 2, 8), step_noise(2, 2, 8));
    }
}
