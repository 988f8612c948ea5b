//! Real characteristics `x = x0 + t G(0, x0)` of the complex Burgers equation,
//! their breakdown points, and the support of `ρ(t, ·)` as the complement of
//! the image of the injective characteristics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::AtomicMeasure;
use crate::spectral::{green_functional, ComplexPoint};

/// Tolerance on `t S(x_min) - 1` below which an inner breakdown pair is a double root.
const DOUBLE_ROOT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicCurve {
    pub x0: f64,
    /// `G(0, x0)`, the value carried along the curve.
    pub g0: f64,
    /// `(s, M_s(x0))`, strictly increasing in `s`.
    pub samples: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// `supp ρ(t, ·)` as sorted, pairwise disjoint closed intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportSet {
    pub intervals: Vec<Interval>,
    pub time: f64,
}

impl SupportSet {
    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(x))
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(Interval::len).sum()
    }

    /// Interval endpoints in increasing order.
    pub fn edges(&self) -> Vec<f64> {
        self.intervals.iter().flat_map(|i| [i.lo, i.hi]).collect()
    }

    pub fn distance_to_edge(&self, x: f64) -> f64 {
        self.edges()
            .into_iter()
            .map(|e| (x - e).abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn lower(&self) -> f64 {
        self.intervals.first().map_or(0.0, |i| i.lo)
    }

    pub fn upper(&self) -> f64 {
        self.intervals.last().map_or(0.0, |i| i.hi)
    }
}

fn pole_check(mu: &AtomicMeasure, x0: f64) -> Result<()> {
    match mu.locations().find(|&a| a == x0) {
        Some(location) => Err(Error::Pole { location }),
        None => Ok(()),
    }
}

/// `M_t(x0) = x0 + t Σ_k w_k / (x0 - a_k)`.
pub fn characteristic_map(mu: &AtomicMeasure, t: f64, x0: f64) -> Result<f64> {
    pole_check(mu, x0)?;
    Ok(x0 + t * initial_green_real(mu, x0))
}

fn initial_green_real(mu: &AtomicMeasure, x: f64) -> f64 {
    mu.atoms().iter().map(|a| a.weight / (x - a.location)).sum()
}

/// `S(x) = Σ_k w_k / (x - a_k)²`, so that `dM_t/dx0 = 1 - t S(x0)`.
fn slope_sum(mu: &AtomicMeasure, x: f64) -> f64 {
    mu.atoms()
        .iter()
        .map(|a| {
            let d = x - a.location;
            a.weight / (d * d)
        })
        .sum()
}

fn slope_sum_derivative(mu: &AtomicMeasure, x: f64) -> f64 {
    mu.atoms()
        .iter()
        .map(|a| {
            let d = x - a.location;
            -2.0 * a.weight / (d * d * d)
        })
        .sum()
}

/// `dM_t/dx0` at `x0`.
pub fn map_derivative(mu: &AtomicMeasure, t: f64, x0: f64) -> f64 {
    1.0 - t * slope_sum(mu, x0)
}

/// Samples `M_s(x0)` at the given increasing times.
pub fn trace_characteristic(mu: &AtomicMeasure, x0: f64, times: &[f64]) -> Result<CharacteristicCurve> {
    pole_check(mu, x0)?;
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("times", "sample times must be strictly increasing"));
    }
    let g0 = initial_green_real(mu, x0);
    Ok(CharacteristicCurve {
        x0,
        g0,
        samples: times.iter().map(|&s| (s, x0 + s * g0)).collect(),
    })
}

/// Bisection for a sign change of `f` on the open interval `(lo, hi)`;
/// `f(lo)` and `f(hi)` are never evaluated, so poles at the ends are fine.
/// `lo_negative` states the sign of `f` near `lo`.
fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, lo_negative: bool) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if (v < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// All real `x0` with `dM_t/dx0 = 0`, ascending.
///
/// `S` is convex between consecutive atoms (two, one or no solutions there)
/// and monotone on the outer half-lines (exactly one solution each).
pub fn breakdown_points(mu: &AtomicMeasure, t: f64) -> Result<Vec<f64>> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid("t", format!("time must be positive, got {t}")));
    }
    let locs: Vec<f64> = mu.locations().collect();
    let g = |x: f64| t * slope_sum(mu, x) - 1.0;
    let reach = t.sqrt();
    let mut out = Vec::new();

    // left of the first atom: g goes from -1 at -∞ to +∞ at a_1
    let first = locs[0];
    out.push(bisect(g, first - reach, first, true));

    for pair in locs.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let x_min = bisect(|x| slope_sum_derivative(mu, x), a, b, true);
        let g_min = g(x_min);
        if g_min > DOUBLE_ROOT_TOL {
            continue;
        }
        if g_min >= -DOUBLE_ROOT_TOL {
            out.push(x_min);
            continue;
        }
        out.push(bisect(g, a, x_min, false));
        out.push(bisect(g, x_min, b, true));
    }

    let last = *locs.last().expect("non-empty measure");
    out.push(bisect(g, last, last + reach, false));
    Ok(out)
}

/// Closed images `M_t(D)` of the maximal injectivity domains, sorted; the outer
/// ones are rays (`±∞` endpoints).
pub fn image_intervals(mu: &AtomicMeasure, t: f64) -> Result<Vec<Interval>> {
    let locs: Vec<f64> = mu.locations().collect();
    let points = breakdown_points(mu, t)?;
    let m = |x: f64| x + t * initial_green_real(mu, x);
    let mut images = Vec::new();
    let first = points[0];
    let last = *points.last().expect("two outer breakdown points");
    images.push(Interval {
        lo: f64::NEG_INFINITY,
        hi: m(first),
    });
    // inner breakdown points come in increasing pairs inside each atom gap
    for pair in locs.windows(2) {
        let inside: Vec<f64> = points[1..points.len() - 1]
            .iter()
            .copied()
            .filter(|&x| pair[0] < x && x < pair[1])
            .collect();
        match inside.as_slice() {
            [p, q] => images.push(Interval { lo: m(*p), hi: m(*q) }),
            [p] => images.push(Interval { lo: m(*p), hi: m(*p) }),
            _ => {}
        }
    }
    images.push(Interval {
        lo: m(last),
        hi: f64::INFINITY,
    });
    images.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    Ok(images)
}

/// `supp ρ(t, ·) = ℝ \ I_t`.
pub fn support(mu: &AtomicMeasure, t: f64) -> Result<SupportSet> {
    let images = image_intervals(mu, t)?;
    // merge overlapping image pieces
    let mut merged: Vec<Interval> = Vec::with_capacity(images.len());
    for piece in images {
        match merged.last_mut() {
            Some(prev) if piece.lo < prev.hi => prev.hi = prev.hi.max(piece.hi),
            _ => merged.push(piece),
        }
    }
    let mut intervals: Vec<Interval> = Vec::new();
    for pair in merged.windows(2) {
        let gap = Interval {
            lo: pair[0].hi,
            hi: pair[1].lo,
        };
        match intervals.last_mut() {
            // a degenerate image piece leaves two support pieces touching
            Some(prev) if prev.hi >= gap.lo => prev.hi = gap.hi,
            _ => intervals.push(gap),
        }
    }
    Ok(SupportSet { intervals, time: t })
}

/// Squared outer/inner support edges `(B_+, B_-)` of the `a = 1` two-source
/// solution; `B_-` is clamped to 0 once the support has merged (`t >= 1`).
pub fn b_plus_minus(t: f64) -> (f64, f64) {
    let r = (t * (t + 8.0)).sqrt();
    let b = |sign: f64| {
        (1.0 + 0.5 * (t + sign * r)) * (1.0 - 0.25 * (t - sign * r)).powi(2)
    };
    let b_minus = if t >= 1.0 { 0.0 } else { b(-1.0).max(0.0) };
    (b(1.0), b_minus)
}

/// Largest deviation of `G(s, M_s(x0))` from `G(0, x0)` over 32 equally spaced
/// `s ∈ [0, t]`, using the boundary evaluator of the functional equation.
pub fn verify_constancy(mu: &AtomicMeasure, t: f64, x0: f64) -> Result<f64> {
    pole_check(mu, x0)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let g0 = initial_green_real(mu, x0);
    let mut worst: f64 = 0.0;
    for j in 1..32 {
        let s = t * j as f64 / 31.0;
        let x = x0 + s * g0;
        let g = green_functional(mu, s, ComplexPoint::boundary(x))?;
        worst = worst.max((g - g0).norm());
    }
    Ok(worst)
}
