//! Hilbert transform on uniform grids: the spectral multiplier `-i sign(ν)`,
//! a principal-value quadrature oracle, checks of the transform identities,
//! and the residual of the continuity equation `∂ρ/∂t + π ∂x(ρ H[ρ]) = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::characteristics::SupportSet;
use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};

/// Default bound on `|f|` at the two grid ends.
pub const DEFAULT_DECAY_TOL: f64 = 1e-4;
/// Default zero-padding factor of [`hilbert_spectral`].
pub const DEFAULT_PAD_FACTOR: usize = 32;
/// Flux spectra with more than this fraction of their energy in the top
/// quarter of the band are rejected as under-resolved.
pub const RESOLUTION_LIMIT: f64 = 1e-5;

/// `n` equal cells on `[x_min, x_max)`; sample `j` sits at `x_min + j h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl UniformGrid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::invalid("grid", format!("need x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if n < 2 {
            return Err(Error::invalid("grid", "at least two points are required"));
        }
        Ok(Self { x_min, x_max, n })
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.point(j))
    }

    /// Indices of the central `fraction` of the grid.
    pub fn interior(&self, fraction: f64) -> std::ops::Range<usize> {
        let skip = ((1.0 - fraction) * 0.5 * self.n as f64).round() as usize;
        skip..self.n - skip
    }
}

/// Samples of a real function on a power-of-two uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub grid: UniformGrid,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        if !grid.n.is_power_of_two() {
            return Err(Error::invalid("grid", format!("point count {} is not a power of two", grid.n)));
        }
        if values.len() != grid.n {
            return Err(Error::invalid(
                "values",
                format!("expected {} samples, got {}", grid.n, values.len()),
            ));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid("values", format!("sample {j} is not finite")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: UniformGrid, f: F) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid, values)
    }

    pub fn check_decay(&self, tol: f64) -> Result<()> {
        let left = self.values[0].abs();
        let right = self.values[self.grid.n - 1].abs();
        if left < tol && right < tol {
            Ok(())
        } else {
            Err(Error::DomainTooSmall { left, right, tol })
        }
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.grid.n as f64
    }

    fn with_values(&self, values: Vec<f64>) -> Self {
        Self {
            grid: self.grid,
            values,
        }
    }

    fn map2(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        self.with_values(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        )
    }

    fn centered(&self) -> Self {
        let m = self.mean();
        self.with_values(self.values.iter().map(|v| v - m).collect())
    }

    /// Discrete `L²` inner product `h Σ f g`.
    pub fn inner(&self, other: &Self) -> f64 {
        self.grid.spacing() * self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn norm_l2(&self) -> f64 {
        self.inner(self).sqrt()
    }
}

/// Which multiplier the spectral transform applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symbol {
    /// `Γ(ν) = -i sign(ν)`, `Γ(0) = 0`.
    #[default]
    Standard,
    /// `+i sign(ν)`: a deliberately wrong sign, for mutation controls.
    Flipped,
}

/// Result of a spectral transform together with the discarded imaginary part.
#[derive(Debug, Clone)]
pub struct Transformed {
    pub function: SampledFunction,
    /// Largest `|Im|` of the inverse transform.
    pub imaginary_residue: f64,
}

/// FFT-based Hilbert transform.
///
/// With `pad_factor = 1` this is the exact discrete operator of the periodic
/// grid. Larger factors embed the samples in a zero-padded domain, which
/// shrinks the periodization error (it decays like the squared domain length).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralHilbert {
    pub pad_factor: usize,
    pub symbol: Symbol,
    pub decay_tol: f64,
}

impl Default for SpectralHilbert {
    fn default() -> Self {
        Self {
            pad_factor: DEFAULT_PAD_FACTOR,
            symbol: Symbol::Standard,
            decay_tol: DEFAULT_DECAY_TOL,
        }
    }
}

impl SpectralHilbert {
    /// The unpadded periodic operator.
    pub fn periodic() -> Self {
        Self {
            pad_factor: 1,
            ..Self::default()
        }
    }

    pub fn with_symbol(self, symbol: Symbol) -> Self {
        Self { symbol, ..self }
    }

    /// Transforms `f` after checking that it has decayed at both grid ends.
    pub fn transform(&self, f: &SampledFunction) -> Result<Transformed> {
        f.check_decay(self.decay_tol)?;
        self.transform_unchecked(f)
    }

    // Intermediate results of the identity checks (H[f] itself, mean-free
    // parts) do not decay; the check is made once on the input.
    fn transform_unchecked(&self, f: &SampledFunction) -> Result<Transformed> {
        if !self.pad_factor.is_power_of_two() {
            return Err(Error::invalid("pad_factor", "must be a power of two"));
        }
        let n = f.grid.n;
        let len = n * self.pad_factor;
        // centre the samples inside the padded buffer, so the padding is symmetric
        let offset = (len - n) / 2;
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        for (j, &v) in f.values.iter().enumerate() {
            buf[(offset + j) % len] = Complex64::new(v, 0.0);
        }
        let sign = match self.symbol {
            Symbol::Standard => -1.0,
            Symbol::Flipped => 1.0,
        };
        apply_multiplier(&mut buf, |k, len| {
            let s = frequency_sign(k, len);
            Complex64::new(0.0, sign * s)
        });
        let imaginary_residue = buf[offset..offset + n]
            .iter()
            .map(|c| c.im.abs())
            .fold(0.0, f64::max);
        let values = buf[offset..offset + n].iter().map(|c| c.re).collect();
        Ok(Transformed {
            function: f.with_values(values),
            imaginary_residue,
        })
    }

    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        self.transform(f).map(|t| t.function)
    }

    fn apply_unchecked(&self, f: &SampledFunction) -> Result<SampledFunction> {
        self.transform_unchecked(f).map(|t| t.function)
    }
}

/// Sign of the discrete frequency of bin `k`; both `ν = 0` and the unpaired
/// Nyquist bin map to 0, which keeps the transform real and parity-exact.
fn frequency_sign(k: usize, len: usize) -> f64 {
    if k == 0 || 2 * k == len {
        0.0
    } else if 2 * k < len {
        1.0
    } else {
        -1.0
    }
}

/// Forward FFT, multiply bin `k` by `symbol(k, len)`, inverse FFT (normalized).
fn apply_multiplier(buf: &mut [Complex64], symbol: impl Fn(usize, usize) -> Complex64) {
    let len = buf.len();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(len).process(buf);
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= symbol(k, len);
    }
    planner.plan_fft_inverse(len).process(buf);
    let scale = 1.0 / len as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
}

/// `H[f]` with the default spectral settings.
pub fn hilbert_spectral(f: &SampledFunction) -> Result<SampledFunction> {
    SpectralHilbert::default().apply(f)
}

/// Spectral derivative on the periodic grid.
pub fn derivative_spectral(f: &SampledFunction) -> SampledFunction {
    derivative_spectral_filtered(f, None)
}

/// Spectral derivative with the exponential filter `exp(-36 (|k|/k_max)^order)`
/// applied to the coefficients when `order` is given.
pub fn derivative_spectral_filtered(f: &SampledFunction, order: Option<i32>) -> SampledFunction {
    let n = f.grid.n;
    let length = f.grid.x_max - f.grid.x_min;
    let mut buf: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    apply_multiplier(&mut buf, |k, len| {
        if 2 * k == len {
            return Complex64::new(0.0, 0.0);
        }
        let m = if 2 * k < len { k as f64 } else { k as f64 - len as f64 };
        let sigma = order.map_or(1.0, |p| (-36.0 * (2.0 * m.abs() / len as f64).powi(p)).exp());
        Complex64::new(0.0, 2.0 * PI * m / length * sigma)
    });
    debug_assert_eq!(buf.len(), n);
    f.with_values(buf.iter().map(|c| c.re).collect())
}

/// `(1/π) PV ∫ f(y)/(x - y) dy`, written as `(1/π) ∫_0^cutoff (f(x-u) - f(x+u))/u du`
/// so that the integrand is regular at `u = 0`.
pub fn hilbert_pv<F: Fn(f64) -> f64>(f: F, x: f64, cutoff: f64) -> Result<f64> {
    if !(cutoff > 0.0) {
        return Err(Error::invalid("cutoff", format!("must be positive, got {cutoff}")));
    }
    let integrand = |u: f64| (f(x - u) - f(x + u)) / u;
    // geometric breakpoints keep each panel's scale comparable to its distance from x
    let mut breaks = vec![0.0];
    let mut b = 1e-3_f64.min(cutoff);
    while b < cutoff {
        breaks.push(b);
        b *= 4.0;
    }
    breaks.push(cutoff);
    let opts = QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_intervals: 2000,
    };
    Ok(quad::integrate_pieces(integrand, &breaks, opts)? / PI)
}

fn sup_norm_interior(values: &[f64], range: std::ops::Range<usize>) -> f64 {
    values[range].iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// `sup |H[H[f]] + (f - mean f)|` over the central 80 % of the grid.
///
/// The multiplier vanishes at `ν = 0`, so on the grid `H∘H = -I` holds on the
/// mean-free part of `f`.
pub fn check_inverse(f: &SampledFunction) -> Result<f64> {
    check_inverse_with(&SpectralHilbert::periodic(), f)
}

pub fn check_inverse_with(h: &SpectralHilbert, f: &SampledFunction) -> Result<f64> {
    f.check_decay(h.decay_tol)?;
    let centered = f.centered();
    let hh = h.apply_unchecked(&h.apply_unchecked(f)?)?;
    let diff: Vec<f64> = hh.values.iter().zip(&centered.values).map(|(a, b)| a + b).collect();
    Ok(sup_norm_interior(&diff, f.grid.interior(0.8)))
}

/// `sup |d/dx H[f] - H[df/dx]|` over the central 80 %, derivatives taken spectrally.
pub fn check_derivative_commutation(f: &SampledFunction) -> Result<f64> {
    check_derivative_commutation_with(&SpectralHilbert::periodic(), f)
}

pub fn check_derivative_commutation_with(h: &SpectralHilbert, f: &SampledFunction) -> Result<f64> {
    f.check_decay(h.decay_tol)?;
    let lhs = derivative_spectral(&h.apply_unchecked(f)?);
    let df = derivative_spectral(f);
    let rhs = h.apply_unchecked(&df)?;
    let diff: Vec<f64> = lhs.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect();
    Ok(sup_norm_interior(&diff, f.grid.interior(0.8)))
}

/// `sup |H[f H[f]] - ((H f)² - f²)/2|` over the central 80 %, for the mean-free part of `f`.
pub fn check_product_identity(f: &SampledFunction) -> Result<f64> {
    check_product_identity_with(&SpectralHilbert::periodic(), f)
}

pub fn check_product_identity_with(h: &SpectralHilbert, f: &SampledFunction) -> Result<f64> {
    f.check_decay(h.decay_tol)?;
    let f = f.centered();
    let hf = h.apply_unchecked(&f)?;
    let lhs = h.apply_unchecked(&f.map2(&hf, |a, b| a * b))?;
    let rhs = hf.map2(&f, |a, b| 0.5 * (a * a - b * b));
    let diff: Vec<f64> = lhs.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect();
    Ok(sup_norm_interior(&diff, f.grid.interior(0.8)))
}

/// `sup |H[f] H[h] - f h - H[f H[h] + H[f] h]|` over the central 80 %, mean-free parts.
pub fn check_product_identity_pair(f: &SampledFunction, g: &SampledFunction) -> Result<f64> {
    check_product_identity_pair_with(&SpectralHilbert::periodic(), f, g)
}

pub fn check_product_identity_pair_with(
    h: &SpectralHilbert,
    f: &SampledFunction,
    g: &SampledFunction,
) -> Result<f64> {
    f.check_decay(h.decay_tol)?;
    g.check_decay(h.decay_tol)?;
    let (f, g) = (f.centered(), g.centered());
    let (hf, hg) = (h.apply_unchecked(&f)?, h.apply_unchecked(&g)?);
    let lhs = hf.map2(&hg, |a, b| a * b).map2(&f.map2(&g, |a, b| a * b), |a, b| a - b);
    let inner = f.map2(&hg, |a, b| a * b).map2(&hf.map2(&g, |a, b| a * b), |a, b| a + b);
    let rhs = h.apply_unchecked(&inner)?;
    let diff: Vec<f64> = lhs.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect();
    Ok(sup_norm_interior(&diff, f.grid.interior(0.8)))
}

/// Residual field of the continuity equation at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeResidual {
    pub time: f64,
    pub grid: UniformGrid,
    /// `∂ρ/∂t + π ∂x(ρ H[ρ])` at every grid point.
    pub values: Vec<f64>,
    /// Points farther than `edge_margin` from every support edge.
    pub mask: Vec<bool>,
    pub edge_margin: f64,
    pub norm_inf: f64,
    pub norm_l2: f64,
}

impl PdeResidual {
    fn new(time: f64, grid: UniformGrid, values: Vec<f64>, mask: Vec<bool>, edge_margin: f64) -> Self {
        let h = grid.spacing();
        let kept = values.iter().zip(&mask).filter(|(_, &m)| m).map(|(v, _)| *v);
        let (mut norm_inf, mut sq) = (0.0f64, 0.0);
        for v in kept {
            norm_inf = norm_inf.max(v.abs());
            sq += v * v;
        }
        Self {
            time,
            grid,
            values,
            mask,
            edge_margin,
            norm_inf,
            norm_l2: (sq * h).sqrt(),
        }
    }
}

/// Norms and settings of a [`PdeResidual`], for JSON reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub time: f64,
    pub norm_inf: f64,
    pub norm_l2: f64,
    pub grid: UniformGrid,
    pub edge_margin: f64,
    pub masked_points: usize,
}

impl PdeResidual {
    pub fn summary(&self) -> ResidualSummary {
        ResidualSummary {
            time: self.time,
            norm_inf: self.norm_inf,
            norm_l2: self.norm_l2,
            grid: self.grid,
            edge_margin: self.edge_margin,
            masked_points: self.mask.iter().filter(|m| !**m).count(),
        }
    }

    /// `x,residual` rows for every grid point.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x", "residual"])?;
        for (x, r) in self.grid.points().zip(&self.values) {
            out.write_record([x.to_string(), r.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Options for [`continuity_residual`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualOptions {
    /// Step of the central difference in time.
    pub dt_fd: f64,
    pub edge_margin: f64,
    /// Replace `∂ρ/∂t` by zero (a control that must fail).
    pub freeze_time: bool,
    pub hilbert: SpectralHilbert,
    /// Order of the exponential filter on the flux derivative; `None` disables it.
    pub filter_order: Option<i32>,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self {
            dt_fd: 1e-4,
            edge_margin: 0.1,
            freeze_time: false,
            hilbert: SpectralHilbert::default(),
            filter_order: Some(8),
        }
    }
}

/// `∂ρ/∂t + π ∂x(ρ H[ρ])` on `grid`, with `∂ρ/∂t` by second-order central
/// differences and the flux derivative taken spectrally. Norms only count
/// points farther than `edge_margin` from the edges of `support`.
pub fn continuity_residual<F>(
    density: F,
    support: &SupportSet,
    t: f64,
    grid: UniformGrid,
    opts: &ResidualOptions,
) -> Result<PdeResidual>
where
    F: Fn(f64, f64) -> f64,
{
    if !(opts.dt_fd > 0.0) || t - opts.dt_fd < 0.0 {
        return Err(Error::invalid("dt_fd", "need 0 < dt_fd <= t"));
    }
    let rho = SampledFunction::from_fn(grid, |x| density(t, x))?;
    let h_rho = opts.hilbert.apply(&rho)?;
    let flux = rho.map2(&h_rho, |r, h| PI * r * h);
    let fraction = high_band_fraction(&flux.values);
    if fraction > RESOLUTION_LIMIT {
        return Err(Error::Resolution {
            fraction,
            limit: RESOLUTION_LIMIT,
        });
    }
    let dflux = derivative_spectral_filtered(&flux, opts.filter_order);
    let values: Vec<f64> = grid
        .points()
        .zip(&dflux.values)
        .map(|(x, &dj)| {
            let drho = if opts.freeze_time {
                0.0
            } else {
                (density(t + opts.dt_fd, x) - density(t - opts.dt_fd, x)) / (2.0 * opts.dt_fd)
            };
            drho + dj
        })
        .collect();
    let mask = grid
        .points()
        .map(|x| support.distance_to_edge(x) > opts.edge_margin)
        .collect();
    Ok(PdeResidual::new(t, grid, values, mask, opts.edge_margin))
}

/// Fraction of spectral energy in the top quarter of the resolved band.
pub fn high_band_fraction(values: &[f64]) -> f64 {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    let (mut total, mut high) = (0.0, 0.0);
    for (k, c) in buf.iter().enumerate().take(n / 2 + 1) {
        let e = c.norm_sqr();
        total += e;
        if 8 * k >= 3 * n {
            high += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        high / total
    }
}
