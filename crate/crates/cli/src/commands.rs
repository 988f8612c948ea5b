//! Subcommand drivers. Each resolves a [`RunConfig`] from the file and flags,
//! validates it, writes its outputs and echoes the resolved config next to them.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use dyson_core::characteristics;
use dyson_core::io::{self as core_io};
use dyson_core::particle::{self, EmpiricalDensity, HistogramGrid};
use dyson_core::verify;
use dyson_core::{AnalyticProfile, ParticleState};
use serde::Serialize;

use crate::config::{DensityConfig, OutputConfig, RunConfig, SupportConfig, VerifyConfig};
use crate::{CliError, Common, DensityArgs, SimulateArgs, SupportArgs, VerifyArgs};

const DEFAULT_BINS: usize = 50;

fn base_config(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(dir) = &common.out {
        cfg.output = Some(OutputConfig { dir: dir.clone() });
    }
    Ok(cfg)
}

fn prepare_dir(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = cfg.output_dir();
    fs::create_dir_all(&dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    fs::write(dir.join("config.toml"), cfg.to_toml())?;
    Ok(dir)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<String, CliError> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    let mut w = create(path)?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(text)
}

struct SimulationRun {
    profile: AnalyticProfile,
    initial: ParticleState,
    samples: Vec<ParticleState>,
    accepted_steps: u64,
    smallest_dt: f64,
}

fn simulation_config(args: &SimulateArgs) -> Result<RunConfig, CliError> {
    if args.common.config.is_none() {
        return Err(CliError::Validation("simulation: --config is required".into()));
    }
    let mut cfg = base_config(&args.common)?;
    if let Some(m) = &args.measure {
        cfg.measure = Some(m.clone());
    }
    let sim = cfg
        .simulation
        .as_mut()
        .ok_or_else(|| CliError::Validation("simulation: missing section".into()))?;
    if let Some(seed) = args.seed {
        sim.seed = seed;
    }
    sim.validate()?;
    cfg.measure()?;
    Ok(cfg)
}

fn run_simulation(cfg: &RunConfig) -> Result<SimulationRun, CliError> {
    let sim = cfg.simulation()?;
    let profile = cfg.measure()?.profile()?;
    profile.validate().map_err(|e| CliError::field("measure", e))?;
    let params = sim.params();
    let initial = ParticleState::new(profile.measure().initial_positions(params.n_particles), 0.0)?;
    let mut accepted_steps = 0u64;
    let mut smallest_dt = f64::INFINITY;
    let samples = particle::simulate_with(&initial, &params, &sim.sample_times(), |o| {
        accepted_steps += 1;
        smallest_dt = smallest_dt.min(o.dt_used);
    })
    .map_err(|e| CliError::field("simulation", e))?;
    Ok(SimulationRun {
        profile,
        initial,
        samples,
        accepted_steps,
        smallest_dt,
    })
}

/// Bins covering both the particles and the analytic support, padded by 2%.
fn histogram_for(cfg: &RunConfig, run: &SimulationRun, state: &ParticleState) -> Result<HistogramGrid, CliError> {
    if let Some(h) = cfg.simulation()?.histogram {
        return Ok(HistogramGrid::new(h.x_min, h.x_max, h.n_bins)?);
    }
    let mut lo = state.positions.first().copied().unwrap_or(0.0);
    let mut hi = state.positions.last().copied().unwrap_or(0.0);
    if state.time > 0.0 {
        let support = run.profile.support(state.time)?;
        lo = lo.min(support.lower());
        hi = hi.max(support.upper());
    }
    let pad = if hi > lo { 0.02 * (hi - lo) } else { 1.0 };
    Ok(HistogramGrid::new(lo - pad, hi + pad, DEFAULT_BINS)?)
}

fn histograms(cfg: &RunConfig, run: &SimulationRun) -> Result<Vec<EmpiricalDensity>, CliError> {
    run.samples
        .iter()
        .map(|s| {
            let grid = histogram_for(cfg, run, s)?;
            particle::empirical_density(s, grid).map_err(|e| CliError::field("simulation.histogram", e))
        })
        .collect()
}

#[derive(Serialize)]
struct SampleSummary {
    time: f64,
    ks: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sup_norm: Option<f64>,
    mean: f64,
    diameter: f64,
}

#[derive(Serialize)]
struct SimulationSummary {
    measure: String,
    n_particles: usize,
    beta: f64,
    dt: f64,
    seed: u64,
    accepted_steps: u64,
    smallest_dt: f64,
    samples: Vec<SampleSummary>,
}

fn summarize(cfg: &RunConfig, run: &SimulationRun, sup: &[Option<f64>]) -> Result<SimulationSummary, CliError> {
    let sim = cfg.simulation()?;
    let mut samples = Vec::new();
    for (state, sup_norm) in run.samples.iter().zip(sup) {
        let ks = if state.time > 0.0 {
            let cdf = run.profile.cdf(state.time)?;
            Some(particle::ks_distance(state, |x| cdf.eval(x)))
        } else {
            None
        };
        samples.push(SampleSummary {
            time: state.time,
            ks,
            sup_norm: *sup_norm,
            mean: state.mean(),
            diameter: state.diameter(),
        });
    }
    Ok(SimulationSummary {
        measure: cfg.measure()?.to_string(),
        n_particles: sim.n_particles,
        beta: sim.beta,
        dt: sim.dt,
        seed: sim.seed,
        accepted_steps: run.accepted_steps,
        smallest_dt: run.smallest_dt,
        samples,
    })
}

fn print_samples(summary: &SimulationSummary) {
    for s in &summary.samples {
        match (s.ks, s.sup_norm) {
            (Some(ks), Some(sup)) => println!("t = {}: KS = {ks:.4}, sup |rho_N - rho| = {sup:.4}", s.time),
            (Some(ks), None) => println!("t = {}: KS = {ks:.4}", s.time),
            _ => println!("t = {}: initial state", s.time),
        }
    }
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let cfg = simulation_config(args)?;
    let run = run_simulation(&cfg)?;
    let hists = histograms(&cfg, &run)?;
    let dir = prepare_dir(&cfg)?;

    let mut states = vec![run.initial.clone()];
    states.extend(run.samples.iter().cloned());
    let mut w = create(&dir.join("trajectory.csv"))?;
    particle::write_trajectory_csv(&states, &mut w)?;
    w.flush()?;
    for (k, h) in hists.iter().enumerate() {
        let mut w = create(&dir.join(format!("density_{k}.csv")))?;
        h.write_csv(&mut w)?;
        w.flush()?;
    }
    let summary = summarize(&cfg, &run, &vec![None; run.samples.len()])?;
    write_json(&dir.join("summary.json"), &summary)?;
    print_samples(&summary);
    Ok(())
}

pub fn compare(args: &SimulateArgs) -> Result<(), CliError> {
    let cfg = simulation_config(args)?;
    let run = run_simulation(&cfg)?;
    let hists = histograms(&cfg, &run)?;
    let dir = prepare_dir(&cfg)?;

    let mut sup = Vec::new();
    for (k, h) in hists.iter().enumerate() {
        if h.time <= 0.0 {
            sup.push(None);
            continue;
        }
        let centres: Vec<f64> = (0..h.grid.n_bins).map(|j| h.grid.centre(j)).collect();
        let exact = run.profile.density_many(h.time, &centres)?;
        let mut w = csv_writer(&dir.join(format!("compare_{k}.csv")))?;
        w.write_record(["x", "rho_empirical", "rho_analytic"]).map_err(csv_err)?;
        let mut worst = 0.0f64;
        for ((x, e), a) in centres.iter().zip(&h.values).zip(&exact) {
            worst = worst.max((e - a).abs());
            w.write_record([x.to_string(), e.to_string(), a.to_string()]).map_err(csv_err)?;
        }
        w.flush()?;
        sup.push(Some(worst));
    }
    let summary = summarize(&cfg, &run, &sup)?;
    write_json(&dir.join("compare.json"), &summary)?;
    print_samples(&summary);
    Ok(())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>, CliError> {
    Ok(csv::Writer::from_writer(create(path)?))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Runtime(e.to_string())
}

pub fn density(args: &DensityArgs) -> Result<(), CliError> {
    let mut cfg = base_config(&args.common)?;
    if let Some(m) = &args.measure {
        cfg.measure = Some(m.clone());
    }
    let times = args
        .times
        .as_ref()
        .map(|t| t.0.clone())
        .or_else(|| cfg.density.as_ref().map(|d| d.times.clone()))
        .ok_or_else(|| CliError::Validation("density.times: missing (give --times)".into()))?;
    let grid = args
        .grid
        .or_else(|| cfg.density.as_ref().map(|d| d.grid))
        .ok_or_else(|| CliError::Validation("density.grid: missing (give --grid MIN:MAX:N)".into()))?;
    cfg.density = Some(DensityConfig { times: times.clone(), grid });

    let profile = cfg.measure()?.profile()?;
    profile.validate().map_err(|e| CliError::field("measure", e))?;
    let line = grid.line("density.grid")?;
    for (k, &t) in times.iter().enumerate() {
        if !(t > 0.0) || !t.is_finite() {
            return Err(CliError::Validation(format!("density.times[{k}]: must be positive, got {t}")));
        }
    }
    if times.is_empty() {
        eprintln!("warning: no times given, nothing to do");
        return Ok(());
    }

    let dir = prepare_dir(&cfg)?;
    let xs = line.points();
    for &t in &times {
        let rho = profile.density_many(t, &xs)?;
        let mut w = create(&dir.join(format!("density_t{t}.csv")))?;
        core_io::write_profile(&mut w, &xs, &rho)?;
        w.flush()?;
        let h = xs.get(1).map_or(0.0, |x1| x1 - xs[0]);
        let mass: f64 = rho.iter().sum::<f64>() * h;
        println!("t = {t}: {} points, mass on grid {mass:.6}", xs.len());
    }
    Ok(())
}

pub fn support(args: &SupportArgs) -> Result<(), CliError> {
    let mut cfg = base_config(&args.common)?;
    if let Some(m) = &args.measure {
        cfg.measure = Some(m.clone());
    }
    let range = args
        .t_range
        .or_else(|| cfg.support.as_ref().map(|s| s.t_range))
        .ok_or_else(|| CliError::Validation("support.t_range: missing (give --t-range MIN:MAX:STEPS)".into()))?;
    cfg.support = Some(SupportConfig { t_range: range });
    if range.min < 0.0 {
        return Err(CliError::Validation(format!(
            "support.t_range: times must be non-negative, got {}",
            range.min
        )));
    }
    let times = range.line("support.t_range")?.points();
    let profile = cfg.measure()?.profile()?;
    profile.validate().map_err(|e| CliError::field("measure", e))?;
    let mu = profile.measure();

    let mut edges = Vec::new();
    let mut breakdown = Vec::new();
    for &t in &times {
        if t == 0.0 {
            edges.extend(mu.locations().enumerate().map(|(i, x)| (t, i, x)));
            continue;
        }
        let points = characteristics::breakdown_points(&mu, t)?;
        // support edges are the images of the breakdown points
        let mut images = points
            .iter()
            .map(|&x0| characteristics::characteristic_map(&mu, t, x0))
            .collect::<Result<Vec<f64>, _>>()?;
        images.sort_by(f64::total_cmp);
        edges.extend(images.into_iter().enumerate().map(|(i, x)| (t, i, x)));
        breakdown.extend(points.into_iter().enumerate().map(|(i, x)| (t, i, x)));
    }

    let dir = prepare_dir(&cfg)?;
    let mut w = create(&dir.join("support_edges.csv"))?;
    core_io::write_indexed(&mut w, ["t", "edge_index", "edge_position"], &edges)?;
    w.flush()?;
    let mut w = create(&dir.join("breakdown_points.csv"))?;
    core_io::write_indexed(&mut w, ["t", "breakdown_index", "x0c"], &breakdown)?;
    w.flush()?;
    println!(
        "{} times, {} edge rows, {} breakdown rows written to {}",
        times.len(),
        edges.len(),
        breakdown.len(),
        dir.display()
    );
    Ok(())
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let mut cfg = base_config(&args.common)?;
    let mut v = cfg.verify.clone().unwrap_or_default();
    if let Some(s) = &args.suite {
        v.suite = s.clone();
    }
    for f in &args.inject {
        if !v.inject.contains(f) {
            v.inject.push(*f);
        }
    }
    cfg.verify = Some(VerifyConfig { ..v.clone() });

    let report = verify::run(&v.suite, &v.inject).map_err(|e| CliError::field("verify", e))?;
    let text = if args.common.out.is_some() || cfg.output.is_some() {
        let dir = prepare_dir(&cfg)?;
        write_json(&dir.join("verify.json"), &report)?
    } else {
        serde_json::to_string_pretty(&report).expect("report serializes")
    };
    println!("{text}");
    for c in &report.checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        let measured = c.measured.map_or_else(|| "n/a".to_string(), |m| format!("{m:.3e}"));
        eprintln!("{status} {} measured {measured} ({})", c.id, c.description);
    }
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Verification(report.failing))
    }
}
