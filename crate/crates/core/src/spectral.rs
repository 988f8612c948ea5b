//! The limiting Green's function `G(t, z) = ∫ dμ(t, x) / (z - x)` for atomic
//! initial data, and recovery of the density from its boundary values.
//!
//! `G` solves `G(t, z) = G(0, z - t G(t, z))`. For `m` atoms clearing the
//! denominators gives a polynomial of degree `m + 1` in `G`; the physical root
//! is selected by continuing it down a vertical path from `x + 10^4 i`, where it
//! is unambiguously the root closest to `1/z`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characteristics::b_plus_minus;
use crate::error::{Error, Result};
use crate::measure::AtomicMeasure;
use crate::roots;

/// Height of the continuation start point above the real axis.
pub const CONTINUATION_HEIGHT: f64 = 1e4;
/// Number of geometric steps along the continuation path.
pub const CONTINUATION_STEPS: usize = 64;
/// Lowest height visited before the final step onto the real axis.
const BOUNDARY_APPROACH_HEIGHT: f64 = 1e-13;
/// Tolerated positive imaginary part of `G` above the real axis.
pub const HERGLOTZ_TOL: f64 = 1e-10;
/// Tiny negative densities above this threshold are treated as zero.
pub const NEGATIVE_DENSITY_CLAMP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfPlane {
    Upper,
    Lower,
    /// The real point `re`, understood as the limit `re + iε`, `ε ↓ 0`.
    BoundaryFromAbove,
}

/// A complex evaluation point carrying the side of the real axis it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub re: f64,
    pub im: f64,
    pub half_plane: HalfPlane,
}

impl ComplexPoint {
    pub fn upper(re: f64, im: f64) -> Result<Self> {
        if !(im > 0.0) {
            return Err(Error::invalid("z", format!("upper half-plane point needs im > 0, got {im}")));
        }
        Ok(Self {
            re,
            im,
            half_plane: HalfPlane::Upper,
        })
    }

    pub fn lower(re: f64, im: f64) -> Result<Self> {
        if !(im < 0.0) {
            return Err(Error::invalid("z", format!("lower half-plane point needs im < 0, got {im}")));
        }
        Ok(Self {
            re,
            im,
            half_plane: HalfPlane::Lower,
        })
    }

    pub fn boundary(x: f64) -> Self {
        Self {
            re: x,
            im: 0.0,
            half_plane: HalfPlane::BoundaryFromAbove,
        }
    }

    /// Tags `z` by the sign of its imaginary part; real `z` is read as a limit from above.
    pub fn from_complex(z: Complex64) -> Self {
        let half_plane = if z.im > 0.0 {
            HalfPlane::Upper
        } else if z.im < 0.0 {
            HalfPlane::Lower
        } else {
            HalfPlane::BoundaryFromAbove
        };
        Self {
            re: z.re,
            im: if z.im == 0.0 { 0.0 } else { z.im },
            half_plane,
        }
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    fn reflected(&self) -> Self {
        Self {
            re: self.re,
            im: -self.im,
            half_plane: HalfPlane::Upper,
        }
    }
}

/// A Green's-function value together with where and when it was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenEval {
    pub value: (f64, f64),
    pub time: f64,
    pub point: ComplexPoint,
}

impl GreenEval {
    pub fn new(value: Complex64, time: f64, point: ComplexPoint) -> Self {
        Self {
            value: (value.re, value.im),
            time,
            point,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.value.0, self.value.1)
    }

    /// `Im G <= tol` above (or on) the real axis, `Im G >= -tol` below it.
    pub fn is_herglotz(&self, tol: f64) -> bool {
        match self.point.half_plane {
            HalfPlane::Upper | HalfPlane::BoundaryFromAbove => self.value.1 <= tol,
            HalfPlane::Lower => self.value.1 >= -tol,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("t", format!("time must be positive and finite, got {t}")))
    }
}

/// `G(0, z) = Σ_k w_k / (z - a_k)`.
pub fn initial_green(mu: &AtomicMeasure, z: ComplexPoint) -> Result<Complex64> {
    if z.half_plane == HalfPlane::BoundaryFromAbove {
        if let Some(a) = mu.locations().find(|&a| a == z.re) {
            return Err(Error::Pole { location: a });
        }
    }
    let zc = z.z();
    Ok(mu
        .atoms()
        .iter()
        .map(|atom| atom.weight / (zc - atom.location))
        .sum())
}

/// Sign choice in `G = (z ∓ √(z² - 4t)) / 2t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadraticBranch {
    /// The physical root (`Im G <= 0` above the axis, `G ~ 1/z` at infinity).
    #[default]
    Minus,
    /// The other root of `tG² - zG + 1 = 0`.
    Plus,
}

/// Green's function of `δ_0` at time `t`: the semicircle root of `tG² - zG + 1 = 0`.
pub fn green_one_source(t: f64, z: ComplexPoint) -> Result<Complex64> {
    green_one_source_branch(t, z, QuadraticBranch::Minus)
}

/// Either root of the one-source quadratic.
///
/// The square root is taken as `√(z - 2√t) √(z + 2√t)`, which is analytic off
/// `[-2√t, 2√t]` and behaves like `z` at infinity, so the minus branch needs no
/// case analysis on the real axis outside the cut.
pub fn green_one_source_branch(t: f64, z: ComplexPoint, branch: QuadraticBranch) -> Result<Complex64> {
    check_time(t)?;
    if z.half_plane == HalfPlane::Lower {
        return Ok(green_one_source_branch(t, z.reflected(), branch)?.conj());
    }
    let zc = z.z();
    let edge = 2.0 * t.sqrt();
    let s = (zc - edge).sqrt() * (zc + edge).sqrt();
    Ok(match branch {
        // (z - s)/2t written without cancellation, using (z - s)(z + s) = 4t
        QuadraticBranch::Minus => 2.0 / (zc + s),
        QuadraticBranch::Plus => (zc + s) / (2.0 * t),
    })
}

/// Relative residual of `tG² - zG + 1 = 0`.
pub fn quadratic_residual(t: f64, z: Complex64, g: Complex64) -> f64 {
    let terms = [t * g * g, z * g, Complex64::new(1.0, 0.0)];
    let scale: f64 = terms.iter().map(|v| v.norm()).sum();
    (terms[0] - terms[1] + terms[2]).norm() / scale
}

/// Coefficients (ascending) of the normalized two-source cubic
/// `τ² G³ - 2wτ G² + (w² - 1 + τ) G - w`.
pub fn two_source_cubic(tau: f64, w: Complex64) -> [Complex64; 4] {
    [
        -w,
        w * w - 1.0 + tau,
        -2.0 * w * tau,
        Complex64::new(tau * tau, 0.0),
    ]
}

/// Relative residual of the normalized two-source cubic.
pub fn cubic_residual(tau: f64, w: Complex64, g: Complex64) -> f64 {
    let c = two_source_cubic(tau, w);
    roots::eval(&c, g).norm() / roots::magnitude_scale(&c, g).max(f64::MIN_POSITIVE)
}

/// Green's function of `(δ_{-a} + δ_a)/2`, from the normalized cubic in
/// `τ = t/a²`, `w = z/a`, then rescaled by `1/a`.
pub fn green_two_source(t: f64, z: ComplexPoint, a: f64) -> Result<Complex64> {
    check_time(t)?;
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::invalid("a", format!("source separation must be positive, got {a}")));
    }
    if z.half_plane == HalfPlane::Lower {
        return Ok(green_two_source(t, z.reflected(), a)?.conj());
    }
    let tau = t / (a * a);
    let target = z.z() / a;
    let coeffs = |w: Complex64| two_source_cubic(tau, w).to_vec();
    let g = continue_physical_root(coeffs, target, |w| w.inv())?;
    let c = two_source_cubic(tau, target);
    let g = polish(g, |g| roots::eval_with_derivative(&c, g));
    Ok(g / a)
}

/// A root selected by path continuation, with the full candidate set at the target.
#[derive(Debug, Clone)]
pub struct RootSelection {
    pub value: Complex64,
    pub candidates: Vec<Complex64>,
    /// Number of candidates with `Im <= HERGLOTZ_TOL` (upper-half-plane input).
    pub admissible: usize,
}

/// Green's function of an arbitrary atomic measure from the functional equation.
pub fn green_functional(mu: &AtomicMeasure, t: f64, z: ComplexPoint) -> Result<Complex64> {
    green_functional_roots(mu, t, z).map(|s| s.value)
}

/// Coefficients (ascending, in `y = tG`) of
/// `y Π_k (z - a_k - y) - t Σ_k w_k Π_{j≠k} (z - a_j - y)`,
/// i.e. the functional equation with denominators cleared.
pub fn functional_polynomial(mu: &AtomicMeasure, t: f64, z: Complex64) -> Vec<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let minus_one = Complex64::new(-1.0, 0.0);
    let atoms = mu.atoms();
    let mut product = vec![Complex64::new(0.0, 0.0), one]; // y
    for atom in atoms {
        product = roots::mul_linear(&product, z - atom.location, minus_one);
    }
    for (k, atom) in atoms.iter().enumerate() {
        let mut others = vec![Complex64::new(-t * atom.weight, 0.0)];
        for (j, other) in atoms.iter().enumerate() {
            if j != k {
                others = roots::mul_linear(&others, z - other.location, minus_one);
            }
        }
        roots::add_assign(&mut product, &others);
    }
    product
}

/// Like [`green_functional`], also reporting every candidate root.
pub fn green_functional_roots(mu: &AtomicMeasure, t: f64, z: ComplexPoint) -> Result<RootSelection> {
    check_time(t)?;
    if z.half_plane == HalfPlane::Lower {
        let mut sel = green_functional_roots(mu, t, z.reflected())?;
        sel.value = sel.value.conj();
        sel.candidates.iter_mut().for_each(|c| *c = c.conj());
        return Ok(sel);
    }
    let zc = z.z();
    let y = continue_physical_root(|w| functional_polynomial(mu, t, w), zc, |w| t / w)?;
    let residual_and_slope = |g: Complex64| {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut slope = Complex64::new(0.0, 0.0);
        for atom in mu.atoms() {
            let d = (zc - t * g - atom.location).inv();
            sum += atom.weight * d;
            slope += atom.weight * d * d;
        }
        (g - sum, 1.0 - t * slope)
    };
    let value = polish(y / t, residual_and_slope);
    let candidates: Vec<Complex64> = roots::roots(&functional_polynomial(mu, t, zc))?
        .into_iter()
        .map(|y| y / t)
        .collect();
    let admissible = candidates.iter().filter(|c| c.im <= HERGLOTZ_TOL).count();
    if value.im > HERGLOTZ_TOL * value.norm().max(1.0) || !value.is_finite() {
        return Err(Error::NoAdmissibleRoot { z: zc, candidates });
    }
    Ok(RootSelection {
        value,
        candidates,
        admissible,
    })
}

/// Functional-equation residual `|G - G(0, z - tG)|`.
pub fn functional_residual(mu: &AtomicMeasure, t: f64, z: Complex64, g: Complex64) -> f64 {
    let shifted = z - t * g;
    let g0: Complex64 = mu
        .atoms()
        .iter()
        .map(|atom| atom.weight / (shifted - atom.location))
        .sum();
    (g - g0).norm()
}

/// Newton refinement that only accepts steps which reduce the residual.
fn polish<F>(mut g: Complex64, f: F) -> Complex64
where
    F: Fn(Complex64) -> (Complex64, Complex64),
{
    let (mut r, mut dr) = f(g);
    for _ in 0..8 {
        if r == Complex64::new(0.0, 0.0) || dr == Complex64::new(0.0, 0.0) {
            break;
        }
        let candidate = g - r / dr;
        let (rc, drc) = f(candidate);
        if !(rc.norm() < r.norm()) || !candidate.is_finite() {
            break;
        }
        g = candidate;
        r = rc;
        dr = drc;
    }
    g
}

/// Follows the root that starts next to `start_guess(z0)` at `z0 = x + 10⁴ i`
/// down to `target`, re-matching the nearest root at each step.
fn continue_physical_root<P, S>(poly_at: P, target: Complex64, start_guess: S) -> Result<Complex64>
where
    P: Fn(Complex64) -> Vec<Complex64>,
    S: Fn(Complex64) -> Complex64,
{
    let x = target.re;
    let top = CONTINUATION_HEIGHT.max(target.im);
    let start = Complex64::new(x, top);
    let mut roots_now = roots::roots(&poly_at(start))?;
    let guess = start_guess(start);
    let mut current = nearest(&roots_now, guess).ok_or(Error::NoAdmissibleRoot {
        z: start,
        candidates: roots_now.clone(),
    })?;
    if target.im >= top {
        return Ok(current);
    }
    let bottom = if target.im > 0.0 {
        target.im
    } else {
        BOUNDARY_APPROACH_HEIGHT * (1.0 + x.abs())
    };
    let ratio = bottom / top;
    let mut heights: Vec<f64> = (1..=CONTINUATION_STEPS)
        .map(|k| top * ratio.powf(k as f64 / CONTINUATION_STEPS as f64))
        .collect();
    *heights.last_mut().expect("non-empty") = bottom;
    if target.im <= 0.0 {
        heights.push(0.0);
    }
    for h in heights {
        let z = Complex64::new(x, h);
        roots_now = roots::roots_from(&poly_at(z), Some(&roots_now))?;
        current = nearest(&roots_now, current).ok_or(Error::NoAdmissibleRoot {
            z,
            candidates: roots_now.clone(),
        })?;
    }
    Ok(current)
}

fn nearest(candidates: &[Complex64], to: Complex64) -> Option<Complex64> {
    candidates
        .iter()
        .copied()
        .filter(|c| c.is_finite())
        .min_by(|a, b| (a - to).norm().total_cmp(&(b - to).norm()))
}

/// Anything that evaluates `G(t, z)`.
pub trait GreenFunction {
    fn green(&self, t: f64, z: ComplexPoint) -> Result<Complex64>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OneSourceGreen {
    pub branch: QuadraticBranch,
}

impl GreenFunction for OneSourceGreen {
    fn green(&self, t: f64, z: ComplexPoint) -> Result<Complex64> {
        green_one_source_branch(t, z, self.branch)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TwoSourceGreen {
    pub a: f64,
}

impl GreenFunction for TwoSourceGreen {
    fn green(&self, t: f64, z: ComplexPoint) -> Result<Complex64> {
        green_two_source(t, z, self.a)
    }
}

#[derive(Debug, Clone)]
pub struct FunctionalGreen {
    pub measure: AtomicMeasure,
}

impl GreenFunction for FunctionalGreen {
    fn green(&self, t: f64, z: ComplexPoint) -> Result<Complex64> {
        if t == 0.0 {
            initial_green(&self.measure, z)
        } else {
            green_functional(&self.measure, t, z)
        }
    }
}

impl<F> GreenFunction for F
where
    F: Fn(f64, ComplexPoint) -> Result<Complex64>,
{
    fn green(&self, t: f64, z: ComplexPoint) -> Result<Complex64> {
        self(t, z)
    }
}

/// Heights `ε_k = eps0 · 2^{-k}` used to approach the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsSequence {
    pub eps0: f64,
    pub levels: usize,
    /// Successive extrapolants closer than this count as converged.
    pub tol: f64,
}

impl Default for EpsSequence {
    fn default() -> Self {
        Self {
            eps0: 1e-3,
            levels: 13,
            tol: 1e-9,
        }
    }
}

impl EpsSequence {
    pub fn heights(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.levels).map(|k| self.eps0 * 0.5f64.powi(k as i32))
    }
}

/// `ρ(t, x) = -lim Im G(t, x + iε) / π`, by two-point Richardson extrapolation
/// in `ε` over a halving sequence.
pub fn density_from_green<G: GreenFunction + ?Sized>(
    green: &G,
    t: f64,
    x: f64,
    eps: &EpsSequence,
) -> Result<f64> {
    let mut samples = Vec::with_capacity(eps.levels);
    let mut extrapolants: Vec<f64> = Vec::with_capacity(eps.levels);
    for h in eps.heights() {
        let g = green.green(t, ComplexPoint::upper(x, h)?)?;
        samples.push(-g.im / PI);
        let n = samples.len();
        if n >= 2 {
            // f(ε) ≈ ρ + cε, with ε halving: ρ ≈ 2 f(ε/2) - f(ε)
            extrapolants.push(2.0 * samples[n - 1] - samples[n - 2]);
        }
        let m = extrapolants.len();
        if m >= 2 && (extrapolants[m - 1] - extrapolants[m - 2]).abs() < eps.tol {
            return Ok(clamp_density(extrapolants[m - 1]));
        }
    }
    let m = extrapolants.len();
    Err(Error::Extrapolation {
        x,
        prev: if m >= 2 { extrapolants[m - 2] } else { f64::NAN },
        last: extrapolants.last().copied().unwrap_or(f64::NAN),
    })
}

pub(crate) fn clamp_density(rho: f64) -> f64 {
    if (-NEGATIVE_DENSITY_CLAMP..0.0).contains(&rho) {
        0.0
    } else {
        rho
    }
}

/// Wigner semicircle `ρ(t, x) = √(4t - x²) / (2πt)` on `|x| < 2√t`.
pub fn semicircle_density(t: f64, x: f64) -> f64 {
    let d = 4.0 * t - x * x;
    if t <= 0.0 || d <= 0.0 {
        0.0
    } else {
        d.sqrt() / (2.0 * PI * t)
    }
}

/// Cumulative distribution of the semicircle at time `t`.
pub fn semicircle_cdf(t: f64, x: f64) -> f64 {
    if t <= 0.0 {
        return if x >= 0.0 { 1.0 } else { 0.0 };
    }
    let u = (x / (2.0 * t.sqrt())).clamp(-1.0, 1.0);
    0.5 + (u * (1.0 - u * u).sqrt() + u.asin()) / PI
}

/// Inverse of [`semicircle_cdf`] by bisection.
pub fn semicircle_quantile(t: f64, p: f64) -> f64 {
    let edge = 2.0 * t.sqrt();
    let (mut lo, mut hi) = (-edge, edge);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if semicircle_cdf(t, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Point where the closed-form two-source density switches from the left
/// branch to the right one (normalized units).
pub fn two_source_split(t: f64) -> f64 {
    if t < 1.0 {
        0.0
    } else {
        (3.0 * (t - 1.0)).sqrt()
    }
}

/// Closed-form density of `(δ_{-a} + δ_a)/2` at time `t`.
///
/// In normalized units the density is `(C_n - q/C_n) / (2√3 π t²)` with
/// `q = t²(x² - 3(t - 1))` and `C_n` a cube root of
/// `C³ = t³ [√(27 D) - (x/2)(9(t + 2) - 2x²)]`,
/// `D = (t - 1)³ + x²(2 + 5t - t²/4) - x⁴`. Left of the split `C³ > 0` and
/// `C_0` is its positive cube root; right of it `C³ < 0` and `C_1` (phase
/// `π/3 + 2π/3`) is its negative real cube root.
///
/// Writing `A = √(27 D)`, `B = (x/2)(9(t+2) - 2x²)`, one has
/// `A² - B² = -(q/t²)³`, so where `B > 0` the difference `A - B` is evaluated as
/// `-(q/t²)³/(A + B)`; the direct difference cancels catastrophically near the
/// split and near the origin at `t = 1`.
pub fn two_source_density(t: f64, x: f64, a: f64) -> f64 {
    if !(t > 0.0) || !(a > 0.0) {
        return 0.0;
    }
    let tau = t / (a * a);
    let w = x / a;
    normalized_two_source_density(tau, w) / a
}

fn normalized_two_source_density(t: f64, x: f64) -> f64 {
    let (b_plus, b_minus) = b_plus_minus(t);
    let ax = x.abs();
    if ax >= b_plus.sqrt() || (t < 1.0 && ax <= b_minus.sqrt()) {
        return 0.0;
    }
    let d = (t - 1.0).powi(3) + x * x * (2.0 + 5.0 * t - t * t / 4.0) - x.powi(4);
    let big_a = (27.0 * d.max(0.0)).sqrt();
    let big_b = 0.5 * x * (9.0 * (t + 2.0) - 2.0 * x * x);
    let q = t * t * (x * x - 3.0 * (t - 1.0));
    let prefactor = 1.0 / (2.0 * 3f64.sqrt() * PI * t * t);

    let value = if big_b > 0.0 {
        // C = t ∛(A - B) = -(q/t) / ∛(A + B) and q/C = -t ∛(A + B)
        let root = (big_a + big_b).cbrt();
        let c = -(q / t) / root;
        let q_over_c = -t * root;
        prefactor * (c - q_over_c)
    } else {
        let c3 = t.powi(3) * (big_a - big_b);
        let c = if x < two_source_split(t) {
            left_cube_root(c3)
        } else {
            right_cube_root(c3)
        };
        if c == 0.0 {
            // only at the merge point t = 1, x = 0, where ρ ~ |x|^{1/3}
            return 0.0;
        }
        prefactor * (c - q / c)
    };
    clamp_density(value).max(0.0)
}

/// `C_0`: the principal cube root, positive for `C³ > 0`.
fn left_cube_root(c3: f64) -> f64 {
    c3.cbrt()
}

/// `C_1 = e^{2πi/3} ∛C³` with `∛(-1) = e^{iπ/3}`: the negative real root for `C³ < 0`.
fn right_cube_root(c3: f64) -> f64 {
    -c3.abs().cbrt()
}

/// Density of the two-source (`a = 1`) solution at the merge time `t = 1`.
pub fn density_t1(x: f64) -> f64 {
    let edge = 1.5 * 3f64.sqrt();
    let ax = x.abs();
    if ax >= edge || ax == 0.0 {
        return 0.0;
    }
    let s = (1.0 - 4.0 * x * x / 27.0).max(0.0).sqrt();
    3.0 / (4.0 * PI)
        * (2.0 * ax / (3.0 * 3f64.sqrt())).cbrt()
        * ((1.0 + s).powf(2.0 / 3.0) - (1.0 - s).powf(2.0 / 3.0))
}
