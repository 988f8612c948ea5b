//! Analytic limit profiles `ρ(t, ·)` for a chosen initial measure.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::characteristics::{self, SupportSet};
use crate::error::{Error, Result};
use crate::measure::AtomicMeasure;
use crate::quad::{self, QuadOptions};
use crate::spectral::{self, ComplexPoint, GreenFunction};

/// Points closer than this to a support edge get density 0.
pub const EDGE_TOL: f64 = 1e-8;
/// Pieces per support interval in a tabulated CDF.
const CDF_PIECES: usize = 64;

/// Initial condition of the limit process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticProfile {
    /// `δ_0`
    OneSource,
    /// `(δ_{-a} + δ_a) / 2`
    TwoSource { a: f64 },
    /// Any finite atomic measure.
    General { atoms: AtomicMeasure },
}

impl AnalyticProfile {
    pub fn validate(&self) -> Result<()> {
        if let Self::TwoSource { a } = self {
            if !(*a > 0.0) || !a.is_finite() {
                return Err(Error::invalid("a", format!("must be positive, got {a}")));
            }
        }
        Ok(())
    }

    pub fn measure(&self) -> AtomicMeasure {
        match self {
            Self::OneSource => AtomicMeasure::one_source(),
            Self::TwoSource { a } => AtomicMeasure::two_source(*a).expect("validated a"),
            Self::General { atoms } => atoms.clone(),
        }
    }

    /// `G(t, z)` by the closed form when one exists.
    pub fn green(&self, t: f64, z: ComplexPoint) -> Result<Complex64> {
        match self {
            Self::OneSource => spectral::green_one_source(t, z),
            Self::TwoSource { a } => spectral::green_two_source(t, z, *a),
            Self::General { atoms } => {
                if t == 0.0 {
                    spectral::initial_green(atoms, z)
                } else {
                    spectral::green_functional(atoms, t, z)
                }
            }
        }
    }

    pub fn support(&self, t: f64) -> Result<SupportSet> {
        characteristics::support(&self.measure(), t)
    }

    /// `ρ(t, x)` for `t > 0`. General measures use the boundary value of
    /// the functional-equation root; the two named cases use closed forms.
    pub fn density(&self, t: f64, x: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::invalid("t", format!("density needs t > 0, got {t}")));
        }
        match self {
            Self::OneSource => Ok(spectral::semicircle_density(t, x)),
            Self::TwoSource { a } => Ok(spectral::two_source_density(t, x, *a)),
            Self::General { atoms } => {
                let support = characteristics::support(atoms, t)?;
                general_density(atoms, &support, t, x)
            }
        }
    }

    /// Densities on many points, computing the support once.
    pub fn density_many(&self, t: f64, xs: &[f64]) -> Result<Vec<f64>> {
        match self {
            Self::General { atoms } => {
                if !(t > 0.0) {
                    return Err(Error::invalid("t", format!("density needs t > 0, got {t}")));
                }
                let support = characteristics::support(atoms, t)?;
                xs.iter().map(|&x| general_density(atoms, &support, t, x)).collect()
            }
            _ => xs.iter().map(|&x| self.density(t, x)).collect(),
        }
    }

    /// Cumulative distribution of `ρ(t, ·)`.
    pub fn cdf(&self, t: f64) -> Result<Cdf> {
        match self {
            Self::OneSource => Ok(Cdf::Semicircle { t }),
            _ => Cdf::tabulate(self, t),
        }
    }
}

fn general_density(mu: &AtomicMeasure, support: &SupportSet, t: f64, x: f64) -> Result<f64> {
    if !support.contains(x) || support.distance_to_edge(x) < EDGE_TOL {
        return Ok(0.0);
    }
    let g = spectral::green_functional(mu, t, ComplexPoint::boundary(x))?;
    Ok(spectral::clamp_density(-g.im / PI))
}

impl GreenFunction for AnalyticProfile {
    fn green(&self, t: f64, z: ComplexPoint) -> Result<Complex64> {
        AnalyticProfile::green(self, t, z)
    }
}

/// CDF of a limit profile.
#[derive(Debug, Clone)]
pub enum Cdf {
    Semicircle { t: f64 },
    /// Cumulative masses at nodes covering the support; values between nodes
    /// are integrated from the nearest node on the left.
    Tabulated {
        profile: AnalyticProfile,
        support: SupportSet,
        t: f64,
        nodes: Vec<f64>,
        cumulative: Vec<f64>,
    },
}

fn cdf_quad() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-11,
        rel_tol: 1e-10,
        max_intervals: 2000,
    }
}

impl Cdf {
    fn tabulate(profile: &AnalyticProfile, t: f64) -> Result<Self> {
        let support = profile.support(t)?;
        let mu = profile.measure();
        let rho = |x: f64| match profile {
            AnalyticProfile::General { .. } => general_density(&mu, &support, t, x).unwrap_or(f64::NAN),
            _ => profile.density(t, x).unwrap_or(f64::NAN),
        };
        let mut nodes = Vec::new();
        let mut cumulative = Vec::new();
        let mut mass = 0.0;
        for iv in &support.intervals {
            let h = iv.len() / CDF_PIECES as f64;
            nodes.push(iv.lo);
            cumulative.push(mass);
            for k in 0..CDF_PIECES {
                let a = iv.lo + k as f64 * h;
                let b = if k + 1 == CDF_PIECES { iv.hi } else { a + h };
                mass += quad::integrate(rho, a, b, cdf_quad())?;
                nodes.push(b);
                cumulative.push(mass);
            }
        }
        if cumulative.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("profile", "density evaluation failed while tabulating the CDF"));
        }
        Ok(Self::Tabulated {
            profile: profile.clone(),
            support,
            t,
            nodes,
            cumulative,
        })
    }

    /// Total mass of the tabulated density (1 for a correct profile).
    pub fn total_mass(&self) -> f64 {
        match self {
            Self::Semicircle { .. } => 1.0,
            Self::Tabulated { cumulative, .. } => cumulative.last().copied().unwrap_or(0.0),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Semicircle { t } => spectral::semicircle_cdf(*t, x),
            Self::Tabulated {
                profile,
                support,
                t,
                nodes,
                cumulative,
            } => {
                let k = nodes.partition_point(|&n| n <= x);
                if k == 0 {
                    return 0.0;
                }
                if k == nodes.len() {
                    return *cumulative.last().unwrap();
                }
                let left = nodes[k - 1];
                let base = cumulative[k - 1];
                if !support.contains(0.5 * (left + x)) {
                    return base;
                }
                let mu = profile.measure();
                let rho = |y: f64| match profile {
                    AnalyticProfile::General { .. } => general_density(&mu, support, *t, y).unwrap_or(0.0),
                    _ => profile.density(*t, y).unwrap_or(0.0),
                };
                base + quad::integrate(rho, left, x, cdf_quad()).unwrap_or(0.0)
            }
        }
    }
}
