//! Named numerical checks with contracted tolerances, grouped in suites, and
//! optional fault injection to confirm the checks can fail.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::characteristics::{self, b_plus_minus};
use crate::error::{Error, Result};
use crate::hilbert::{self, ResidualOptions, SampledFunction, SpectralHilbert, Symbol, UniformGrid};
use crate::measure::AtomicMeasure;
use crate::profile::AnalyticProfile;
use crate::quad::{self, QuadOptions};
use crate::spectral::{
    self, ComplexPoint, EpsSequence, GreenFunction, OneSourceGreen, QuadraticBranch, TwoSourceGreen,
};

/// A deliberate defect that the suite is expected to detect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Use `+i sign(ν)` as the Hilbert multiplier.
    GammaSignFlip,
    /// Take the plus root of the one-source quadratic.
    PlusBranch,
}

impl Fault {
    pub const ALL: [Fault; 2] = [Fault::GammaSignFlip, Fault::PlusBranch];

    pub fn name(self) -> &'static str {
        match self {
            Fault::GammaSignFlip => "gamma-sign-flip",
            Fault::PlusBranch => "plus-branch",
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Fault::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::invalid("inject", format!("unknown fault {s:?}")))
    }
}

/// The operators under test, with any injected faults applied.
#[derive(Debug, Clone, Default)]
pub struct Setup {
    pub faults: Vec<Fault>,
}

impl Setup {
    pub fn new(faults: &[Fault]) -> Self {
        Self {
            faults: faults.to_vec(),
        }
    }

    fn symbol(&self) -> Symbol {
        if self.faults.contains(&Fault::GammaSignFlip) {
            Symbol::Flipped
        } else {
            Symbol::Standard
        }
    }

    /// The padded transform used for pointwise accuracy.
    pub fn hilbert(&self) -> SpectralHilbert {
        SpectralHilbert::default().with_symbol(self.symbol())
    }

    /// The periodic transform used by the identity checks.
    pub fn periodic(&self) -> SpectralHilbert {
        SpectralHilbert::periodic().with_symbol(self.symbol())
    }

    pub fn one_source(&self) -> OneSourceGreen {
        let branch = if self.faults.contains(&Fault::PlusBranch) {
            QuadraticBranch::Plus
        } else {
            QuadraticBranch::Minus
        };
        OneSourceGreen { branch }
    }
}

/// Direction of a tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
}

impl Bound {
    pub fn holds(self, measured: f64) -> bool {
        match self {
            Bound::AtMost(tol) => measured <= tol,
            Bound::AtLeast(tol) => measured >= tol,
        }
    }
}

type CheckFn = fn(&Setup) -> Result<f64>;

/// A registered check.
#[derive(Clone, Copy)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub description: &'static str,
    pub bound: Bound,
    run: CheckFn,
}

impl Check {
    pub fn id(&self) -> String {
        format!("{}.{}", self.suite, self.name)
    }

    pub fn run(&self, setup: &Setup) -> CheckResult {
        let start = Instant::now();
        let outcome = (self.run)(setup);
        let seconds = start.elapsed().as_secs_f64();
        let (measured, error) = match outcome {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let passed = measured.is_some_and(|v| self.bound.holds(v));
        CheckResult {
            id: self.id(),
            description: self.description.to_string(),
            measured,
            bound: self.bound,
            passed,
            error,
            seconds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub description: String,
    pub measured: Option<f64>,
    pub bound: Bound,
    pub passed: bool,
    pub error: Option<String>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub selection: String,
    pub faults: Vec<Fault>,
    pub passed: bool,
    pub failing: Vec<String>,
    pub checks: Vec<CheckResult>,
}

pub const SUITES: [&str; 4] = ["hilbert", "spectral", "characteristics", "pde"];

/// Every check, in suite order.
pub fn catalogue() -> Vec<Check> {
    macro_rules! check {
        ($suite:literal, $name:literal, $bound:expr, $desc:literal, $f:expr) => {
            Check {
                suite: $suite,
                name: $name,
                description: $desc,
                bound: $bound,
                run: $f,
            }
        };
    }
    use Bound::{AtLeast, AtMost};
    vec![
        check!("hilbert", "inverse", AtMost(1e-8), "sup |H[H[f]] + f| for a Gaussian", hilbert_inverse),
        check!("hilbert", "derivative_commutation", AtMost(1e-8), "sup |(H f)' - H[f']| for a Gaussian", hilbert_derivative),
        check!("hilbert", "product_identity", AtMost(1e-7), "sup |H[f Hf] - ((Hf)^2 - f^2)/2| for a Gaussian", hilbert_product),
        check!("hilbert", "product_identity_pair", AtMost(1e-7), "two-function product identity, Gaussian and shifted Gaussian", hilbert_product_pair),
        check!("hilbert", "anti_self_adjoint", AtMost(1e-10), "|<Hf, g> + <f, Hg>| for Gaussians", hilbert_adjoint),
        check!("hilbert", "energy", AtMost(1e-10), "| ||Hf|| - ||f - mean|| | for a Gaussian", hilbert_energy),
        check!("hilbert", "spectral_vs_pv", AtMost(1e-6), "FFT transform against PV quadrature, 1/(1+x^2) on [-10, 10]", hilbert_vs_pv),
        check!("hilbert", "sokhotski_plemelj", AtMost(2e-3), "H[rho] against Re G/pi for the t=1 semicircle on [-1.8, 1.8]", hilbert_sokhotski),
        check!("spectral", "quadratic_residual", AtMost(1e-12), "relative residual of tG^2 - zG + 1 on a 100x100 (t, z) grid", spectral_quadratic),
        check!("spectral", "one_source_density", AtMost(1e-8), "boundary-limit density against the semicircle at 1000 points", spectral_one_density),
        check!("spectral", "one_source_min_density", AtLeast(-1e-10), "smallest boundary-limit density of the one-source solution", spectral_one_min),
        check!("spectral", "cubic_residual", AtMost(1e-10), "relative residual of the normalized two-source cubic", spectral_cubic),
        check!("spectral", "two_source_scaling", AtMost(1e-12), "spread of a G(a^2 tau, a w) over a in {0.5, 1, 2, 5}", spectral_scaling),
        check!("spectral", "two_source_normalization", AtMost(1e-6), "|1 - integral of the two-source density| at five times", spectral_normalization),
        check!("spectral", "two_source_vs_green", AtMost(1e-8), "closed-form two-source density against the boundary limit", spectral_two_vs_green),
        check!("spectral", "merge_asymptotics", AtMost(0.02), "|rho(1,x) / (sqrt3 |x|^(1/3) / 2pi) - 1| at x = 1e-4, 1e-5", spectral_merge),
        check!("spectral", "density_t1", AtMost(1e-10), "t=1 closed form against the general two-source density", spectral_t1),
        check!("spectral", "functional_residual", AtMost(1e-10), "|G - G(0, z - tG)| at 500 random points per measure", spectral_functional),
        check!("spectral", "functional_vs_closed_form", AtMost(1e-10), "functional-equation root against the closed forms", spectral_functional_closed),
        check!("characteristics", "one_source_edges", AtMost(1e-12), "support edges against 2 sqrt t for t in {0.1, 1, 4}", char_one_edges),
        check!("characteristics", "b_plus_minus", AtMost(1e-12), "B+(1) = 27/4, B-(1) = 0, merged edge 3 sqrt3 / 2", char_b_values),
        check!("characteristics", "two_source_edges", AtMost(1e-10), "two-source support edges against sqrt B+-", char_two_edges),
        check!("characteristics", "constancy", AtMost(1e-8), "G carried unchanged along characteristics", char_constancy),
        check!("characteristics", "inside_density", AtLeast(1e-6), "smallest density at midpoints of the support components", char_inside),
        check!("characteristics", "outside_density", AtMost(1e-9), "largest density outside the support on a 2000-point grid", char_outside),
        check!("pde", "continuity_one_source", AtMost(5e-3), "L2 residual of the continuity equation, one source, t=1", pde_one),
        check!("pde", "continuity_two_source", AtMost(5e-3), "L2 residual of the continuity equation, two sources, t in {0.5, 2}", pde_two),
        check!("pde", "frozen_time_control", AtLeast(5e-2), "residual without the time derivative (must be large)", pde_frozen),
    ]
}

/// Runs the checks matching `selection`: `all`, a suite name, or a check id.
pub fn run(selection: &str, faults: &[Fault]) -> Result<VerifyReport> {
    let selected: Vec<Check> = catalogue()
        .into_iter()
        .filter(|c| selection == "all" || c.suite == selection || c.id() == selection)
        .collect();
    if selected.is_empty() {
        return Err(Error::invalid(
            "suite",
            format!("{selection:?} is neither `all`, a suite ({}) nor a check id", SUITES.join(", ")),
        ));
    }
    let setup = Setup::new(faults);
    let checks: Vec<CheckResult> = selected.iter().map(|c| c.run(&setup)).collect();
    let failing: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.id.clone()).collect();
    Ok(VerifyReport {
        selection: selection.to_string(),
        faults: faults.to_vec(),
        passed: failing.is_empty(),
        failing,
        checks,
    })
}

fn gaussian(shift: f64) -> Result<SampledFunction> {
    let grid = UniformGrid::new(-20.0, 20.0, 1 << 14)?;
    SampledFunction::from_fn(grid, |x| (-(x - shift) * (x - shift)).exp())
}

fn hilbert_inverse(s: &Setup) -> Result<f64> {
    hilbert::check_inverse_with(&s.periodic(), &gaussian(0.0)?)
}

fn hilbert_derivative(s: &Setup) -> Result<f64> {
    let a = hilbert::check_derivative_commutation_with(&s.periodic(), &gaussian(0.0)?)?;
    let b = hilbert::check_derivative_commutation_with(&s.periodic(), &gaussian(1.3)?)?;
    Ok(a.max(b))
}

fn hilbert_product(s: &Setup) -> Result<f64> {
    hilbert::check_product_identity_with(&s.periodic(), &gaussian(0.0)?)
}

fn hilbert_product_pair(s: &Setup) -> Result<f64> {
    hilbert::check_product_identity_pair_with(&s.periodic(), &gaussian(0.0)?, &gaussian(1.3)?)
}

fn hilbert_adjoint(s: &Setup) -> Result<f64> {
    let h = s.periodic();
    let (f, g) = (gaussian(0.0)?, gaussian(0.7)?);
    Ok((h.apply(&f)?.inner(&g) + f.inner(&h.apply(&g)?)).abs())
}

fn hilbert_energy(s: &Setup) -> Result<f64> {
    let f = gaussian(0.4)?;
    let hf = s.periodic().apply(&f)?;
    let m = f.mean();
    let centered = SampledFunction {
        grid: f.grid,
        values: f.values.iter().map(|v| v - m).collect(),
    };
    Ok((hf.norm_l2() - centered.norm_l2()).abs())
}

fn hilbert_vs_pv(s: &Setup) -> Result<f64> {
    let lorentz = |x: f64| 1.0 / (1.0 + x * x);
    let grid = UniformGrid::new(-200.0, 200.0, 1 << 14)?;
    let f = SampledFunction::from_fn(grid, lorentz)?;
    let t = s.hilbert().transform(&f)?;
    if t.imaginary_residue >= 1e-10 {
        return Err(Error::invalid("transform", format!("imaginary residue {}", t.imaginary_residue)));
    }
    let mut worst = 0.0f64;
    // every fourth grid point in [-10, 10]
    for (j, x) in grid.points().enumerate().filter(|(j, x)| x.abs() <= 10.0 && j % 4 == 0) {
        let pv = hilbert::hilbert_pv(lorentz, x, 1e5)?;
        worst = worst.max((t.function.values[j] - pv).abs());
    }
    Ok(worst)
}

fn hilbert_sokhotski(s: &Setup) -> Result<f64> {
    let grid = UniformGrid::new(-4.0, 4.0, 1 << 13)?;
    let rho = SampledFunction::from_fn(grid, |x| spectral::semicircle_density(1.0, x))?;
    let h = s.hilbert().apply(&rho)?;
    let green = s.one_source();
    let mut worst = 0.0f64;
    for (x, v) in grid.points().zip(&h.values).filter(|(x, _)| x.abs() <= 1.8) {
        let g = green.green(1.0, ComplexPoint::boundary(x))?;
        worst = worst.max((v - g.re / PI).abs());
    }
    Ok(worst)
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| a + (b - a) * k as f64 / (n - 1) as f64)
}

/// `n` midpoints of equal cells of `(a, b)`.
fn midpoints(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| a + (b - a) * (k as f64 + 0.5) / n as f64)
}

fn spectral_quadratic(s: &Setup) -> Result<f64> {
    let green = s.one_source();
    let mut worst = 0.0f64;
    for t in linspace(0.04, 4.0, 100) {
        for re in linspace(-5.0, 5.0, 10) {
            for im in linspace(-3.0, 3.0, 10) {
                let z = if im == 0.0 {
                    ComplexPoint::boundary(re)
                } else {
                    ComplexPoint::from_complex(Complex64::new(re, im))
                };
                let g = green.green(t, z)?;
                worst = worst.max(spectral::quadratic_residual(t, z.z(), g));
            }
        }
    }
    Ok(worst)
}

fn one_source_densities(s: &Setup) -> Result<Vec<(f64, f64)>> {
    let green = s.one_source();
    let eps = EpsSequence::default();
    midpoints(-1.95, 1.95, 1000)
        .map(|x| Ok((x, spectral::density_from_green(&green, 1.0, x, &eps)?)))
        .collect()
}

fn spectral_one_density(s: &Setup) -> Result<f64> {
    Ok(one_source_densities(s)?
        .into_iter()
        .map(|(x, rho)| (rho - spectral::semicircle_density(1.0, x)).abs())
        .fold(0.0, f64::max))
}

fn spectral_one_min(s: &Setup) -> Result<f64> {
    Ok(one_source_densities(s)?
        .into_iter()
        .map(|(_, rho)| rho)
        .fold(f64::INFINITY, f64::min))
}

fn spectral_cubic(_: &Setup) -> Result<f64> {
    let mut worst = 0.0f64;
    for tau in [0.25, 0.5, 1.0, 1.5, 2.0] {
        for re in linspace(-4.0, 4.0, 21) {
            for im in [1e-3, 0.1, 0.5, 2.0] {
                let g = spectral::green_two_source(tau, ComplexPoint::upper(re, im)?, 1.0)?;
                worst = worst.max(spectral::cubic_residual(tau, Complex64::new(re, im), g));
            }
        }
    }
    Ok(worst)
}

fn spectral_scaling(_: &Setup) -> Result<f64> {
    let mut worst = 0.0f64;
    for tau in [0.3, 1.0, 2.0] {
        for (re, im) in [(0.0, 0.5), (1.1, 0.2), (-2.5, 1.0), (0.4, 3.0)] {
            let base = spectral::green_two_source(tau, ComplexPoint::upper(re, im)?, 1.0)?;
            for a in [0.5, 1.0, 2.0, 5.0] {
                let g = spectral::green_two_source(a * a * tau, ComplexPoint::upper(a * re, a * im)?, a)?;
                worst = worst.max((a * g - base).norm() / base.norm());
            }
        }
    }
    Ok(worst)
}

fn spectral_normalization(_: &Setup) -> Result<f64> {
    let opts = QuadOptions::default();
    let mut worst = 0.0f64;
    for t in [0.25, 0.5, 1.0, 1.5, 2.0] {
        let support = characteristics::support(&AtomicMeasure::two_source(1.0)?, t)?;
        let mut mass = 0.0;
        for iv in &support.intervals {
            // split at 0 so the t=1 cusp sits on a breakpoint
            let mut breaks = vec![iv.lo];
            if iv.lo < 0.0 && 0.0 < iv.hi {
                breaks.push(0.0);
            }
            breaks.push(iv.hi);
            mass += quad::integrate_pieces(|x| spectral::two_source_density(t, x, 1.0), &breaks, opts)?;
        }
        worst = worst.max((mass - 1.0).abs());
    }
    Ok(worst)
}

fn spectral_two_vs_green(_: &Setup) -> Result<f64> {
    let green = TwoSourceGreen { a: 1.0 };
    let eps = EpsSequence::default();
    let mut worst = 0.0f64;
    for t in [0.5, 1.5] {
        let support = characteristics::support(&AtomicMeasure::two_source(1.0)?, t)?;
        for x in midpoints(-3.5, 3.5, 200).filter(|&x| support.distance_to_edge(x) > 0.05) {
            let rho = spectral::density_from_green(&green, t, x, &eps)?;
            worst = worst.max((rho - spectral::two_source_density(t, x, 1.0)).abs());
        }
    }
    Ok(worst)
}

fn spectral_merge(_: &Setup) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in [1e-4f64, 1e-5, -1e-4, -1e-5] {
        let model = 3f64.sqrt() * x.abs().cbrt() / (2.0 * PI);
        worst = worst.max((spectral::two_source_density(1.0, x, 1.0) / model - 1.0).abs());
    }
    Ok(worst)
}

fn spectral_t1(_: &Setup) -> Result<f64> {
    let edge = 1.5 * 3f64.sqrt();
    Ok(midpoints(-edge - 0.2, edge + 0.2, 1000)
        .map(|x| (spectral::density_t1(x) - spectral::two_source_density(1.0, x, 1.0)).abs())
        .fold(0.0, f64::max))
}

fn test_measures() -> Result<Vec<AtomicMeasure>> {
    Ok(vec![
        AtomicMeasure::one_source(),
        AtomicMeasure::two_source(1.0)?,
        AtomicMeasure::uniform(&[-1.0, 0.0, 1.0])?,
    ])
}

fn random_points(seed: u64, n: usize) -> Vec<(f64, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let t = rng.random_range(0.05..3.0);
            let re = rng.random_range(-4.0..4.0);
            let im = 10f64.powf(rng.random_range(-3.0..0.5));
            (t, Complex64::new(re, im))
        })
        .collect()
}

fn spectral_functional(_: &Setup) -> Result<f64> {
    let mut worst = 0.0f64;
    for (k, mu) in test_measures()?.iter().enumerate() {
        for (t, z) in random_points(17 + k as u64, 500) {
            let g = spectral::green_functional(mu, t, ComplexPoint::from_complex(z))?;
            worst = worst.max(spectral::functional_residual(mu, t, z, g));
        }
    }
    Ok(worst)
}

fn spectral_functional_closed(s: &Setup) -> Result<f64> {
    let one = AtomicMeasure::one_source();
    let two = AtomicMeasure::two_source(1.0)?;
    let green = s.one_source();
    let mut worst = 0.0f64;
    for (t, z) in random_points(99, 500) {
        let p = ComplexPoint::from_complex(z);
        let a = spectral::green_functional(&one, t, p)? - green.green(t, p)?;
        let b = spectral::green_functional(&two, t, p)? - spectral::green_two_source(t, p, 1.0)?;
        worst = worst.max(a.norm()).max(b.norm());
    }
    Ok(worst)
}

fn char_one_edges(_: &Setup) -> Result<f64> {
    let mut worst = 0.0f64;
    for t in [0.1, 1.0, 4.0] {
        let s = characteristics::support(&AtomicMeasure::one_source(), t)?;
        let e = 2.0 * t.sqrt();
        worst = worst.max((s.lower() + e).abs()).max((s.upper() - e).abs());
    }
    Ok(worst)
}

fn char_b_values(_: &Setup) -> Result<f64> {
    let (bp, bm) = b_plus_minus(1.0);
    let s = characteristics::support(&AtomicMeasure::two_source(1.0)?, 1.0)?;
    let edge = 1.5 * 3f64.sqrt();
    Ok((bp - 6.75).abs().max(bm.abs()).max((s.upper() - edge).abs()))
}

fn char_two_edges(_: &Setup) -> Result<f64> {
    let mu = AtomicMeasure::two_source(1.0)?;
    let mut worst = 0.0f64;
    for t in [0.25, 0.5, 0.9, 1.0, 1.5, 2.0] {
        let s = characteristics::support(&mu, t)?;
        let (bp, bm) = b_plus_minus(t);
        let expected = if t < 1.0 {
            vec![-bp.sqrt(), -bm.sqrt(), bm.sqrt(), bp.sqrt()]
        } else {
            vec![-bp.sqrt(), bp.sqrt()]
        };
        let edges = s.edges();
        if edges.len() != expected.len() {
            return Err(Error::invalid(
                "support",
                format!("t = {t}: {} edges, expected {}", edges.len(), expected.len()),
            ));
        }
        for (a, b) in edges.iter().zip(&expected) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

fn char_constancy(_: &Setup) -> Result<f64> {
    let one = characteristics::verify_constancy(&AtomicMeasure::one_source(), 1.0, 2.0)?;
    let two = characteristics::verify_constancy(&AtomicMeasure::two_source(1.0)?, 1.0, 3.0)?;
    Ok(one.max(two))
}

/// Boundary-limit densities of both named profiles at `t`.
fn named_greens(s: &Setup) -> Vec<(AtomicMeasure, Box<dyn GreenFunction>)> {
    vec![
        (AtomicMeasure::one_source(), Box::new(s.one_source())),
        (
            AtomicMeasure::two_source(1.0).expect("valid"),
            Box::new(TwoSourceGreen { a: 1.0 }),
        ),
    ]
}

/// Support intervals split at images of breakdown points that land strictly
/// inside them; the density vanishes there (the cusp where two bands merge).
pub fn support_components(mu: &AtomicMeasure, t: f64) -> Result<Vec<characteristics::Interval>> {
    let support = characteristics::support(mu, t)?;
    let mut cuts: Vec<f64> = Vec::new();
    for p in characteristics::breakdown_points(mu, t)? {
        let x = characteristics::characteristic_map(mu, t, p)?;
        if support.intervals.iter().any(|iv| iv.lo + 1e-9 < x && x < iv.hi - 1e-9) {
            cuts.push(x);
        }
    }
    let mut out = Vec::new();
    for iv in &support.intervals {
        let mut lo = iv.lo;
        for &c in cuts.iter().filter(|&&c| iv.lo < c && c < iv.hi) {
            out.push(characteristics::Interval { lo, hi: c });
            lo = c;
        }
        out.push(characteristics::Interval { lo, hi: iv.hi });
    }
    Ok(out)
}

fn char_inside(s: &Setup) -> Result<f64> {
    let eps = EpsSequence::default();
    let mut least = f64::INFINITY;
    for (mu, green) in named_greens(s) {
        for t in [0.5, 1.0, 2.0] {
            for iv in support_components(&mu, t)? {
                let rho = spectral::density_from_green(green.as_ref(), t, iv.midpoint(), &eps)?;
                least = least.min(rho);
            }
        }
    }
    Ok(least)
}

fn char_outside(s: &Setup) -> Result<f64> {
    let eps = EpsSequence::default();
    let mut worst = 0.0f64;
    for (mu, green) in named_greens(s) {
        for t in [0.5, 1.0, 2.0] {
            let support = characteristics::support(&mu, t)?;
            for x in linspace(-5.0, 5.0, 2000).filter(|&x| !support.contains(x)) {
                if support.distance_to_edge(x) < crate::profile::EDGE_TOL {
                    continue;
                }
                worst = worst.max(spectral::density_from_green(green.as_ref(), t, x, &eps)?);
            }
        }
    }
    Ok(worst)
}

fn residual(s: &Setup, profile: &AnalyticProfile, t: f64, half_width: f64, freeze: bool) -> Result<f64> {
    let grid = UniformGrid::new(-half_width, half_width, 1 << 13)?;
    let support = profile.support(t)?;
    let opts = ResidualOptions {
        freeze_time: freeze,
        hilbert: s.hilbert(),
        ..ResidualOptions::default()
    };
    let rho = |t: f64, x: f64| profile.density(t, x).unwrap_or(f64::NAN);
    Ok(hilbert::continuity_residual(rho, &support, t, grid, &opts)?.norm_l2)
}

fn pde_one(s: &Setup) -> Result<f64> {
    residual(s, &AnalyticProfile::OneSource, 1.0, 4.0, false)
}

fn pde_two(s: &Setup) -> Result<f64> {
    let p = AnalyticProfile::TwoSource { a: 1.0 };
    Ok(residual(s, &p, 0.5, 4.0, false)?.max(residual(s, &p, 2.0, 6.0, false)?))
}

fn pde_frozen(s: &Setup) -> Result<f64> {
    residual(s, &AnalyticProfile::OneSource, 1.0, 4.0, true)
}
