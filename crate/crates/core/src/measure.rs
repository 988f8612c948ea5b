//! Atomic initial measures `sum_k w_k delta_{a_k}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weight normalization tolerance.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

/// A probability measure made of finitely many point masses.
///
/// Locations are strictly increasing and the weights are positive and sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Atom>", into = "Vec<Atom>")]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("atoms", "at least one atom is required"));
        }
        for (k, atom) in atoms.iter().enumerate() {
            if !atom.location.is_finite() {
                return Err(Error::invalid("atoms", format!("atom {k} has a non-finite location")));
            }
            if !(atom.weight > 0.0) || !atom.weight.is_finite() {
                return Err(Error::invalid(
                    "atoms",
                    format!("atom {k} has non-positive weight {}", atom.weight),
                ));
            }
        }
        if let Some(k) = atoms.windows(2).position(|w| w[1].location <= w[0].location) {
            return Err(Error::invalid(
                "atoms",
                format!("locations must be strictly increasing (atoms {k} and {})", k + 1),
            ));
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::invalid(
                "atoms",
                format!("weights sum to {total}, expected 1"),
            ));
        }
        Ok(Self { atoms })
    }

    /// Builds a measure from `(location, weight)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(location, weight)| Atom { location, weight })
                .collect(),
        )
    }

    /// Equal-weight atoms at the given (strictly increasing) locations.
    pub fn uniform(locations: &[f64]) -> Result<Self> {
        if locations.is_empty() {
            return Err(Error::invalid("atoms", "at least one atom is required"));
        }
        let w = 1.0 / locations.len() as f64;
        let mut atoms: Vec<Atom> = locations
            .iter()
            .map(|&location| Atom { location, weight: w })
            .collect();
        // absorb the rounding of 1/m into the last weight
        let rest: f64 = atoms[..atoms.len() - 1].iter().map(|a| a.weight).sum();
        atoms.last_mut().unwrap().weight = 1.0 - rest;
        Self::new(atoms)
    }

    /// `delta_0`
    pub fn one_source() -> Self {
        Self {
            atoms: vec![Atom {
                location: 0.0,
                weight: 1.0,
            }],
        }
    }

    /// `(delta_{-a} + delta_a) / 2`
    pub fn two_source(a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::invalid("a", format!("source separation must be positive, got {a}")));
        }
        Self::from_pairs(&[(-a, 0.5), (a, 0.5)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn locations(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|a| a.location)
    }

    /// True when the measure is invariant under `x -> -x`.
    pub fn is_symmetric(&self) -> bool {
        let m = self.atoms.len();
        (0..m).all(|k| {
            let (l, r) = (self.atoms[k], self.atoms[m - 1 - k]);
            l.location == -r.location && l.weight == r.weight
        })
    }

    /// Splits `n` particles among the atoms in proportion to the weights
    /// (largest-remainder rounding, so the counts always sum to `n`).
    pub fn particle_counts(&self, n: usize) -> Vec<usize> {
        let exact: Vec<f64> = self.atoms.iter().map(|a| a.weight * n as f64).collect();
        let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
        let assigned: usize = counts.iter().sum();
        let mut order: Vec<usize> = (0..counts.len()).collect();
        order.sort_by(|&i, &j| {
            let (ri, rj) = (exact[i] - exact[i].floor(), exact[j] - exact[j].floor());
            rj.total_cmp(&ri).then(i.cmp(&j))
        });
        for &k in order.iter().take(n.saturating_sub(assigned)) {
            counts[k] += 1;
        }
        counts
    }

    /// Initial particle configuration realizing this measure with `n` particles:
    /// every particle sits exactly on its atom.
    pub fn initial_positions(&self, n: usize) -> Vec<f64> {
        self.particle_counts(n)
            .into_iter()
            .zip(&self.atoms)
            .flat_map(|(count, atom)| std::iter::repeat_n(atom.location, count))
            .collect()
    }

    /// Parses `location,weight` rows (an optional header line is skipped).
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut pairs = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::invalid(
                    "atoms",
                    format!("row {line}: expected `location,weight`, got {} fields", record.len()),
                ));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(l), Ok(w)) => pairs.push((l, w)),
                _ if line == 0 => continue,
                _ => {
                    return Err(Error::invalid(
                        "atoms",
                        format!("row {line}: could not parse `{},{}`", &record[0], &record[1]),
                    ))
                }
            }
        }
        Self::from_pairs(&pairs)
    }
}

impl TryFrom<Vec<Atom>> for AtomicMeasure {
    type Error = Error;

    fn try_from(atoms: Vec<Atom>) -> Result<Self> {
        Self::new(atoms)
    }
}

impl From<AtomicMeasure> for Vec<Atom> {
    fn from(m: AtomicMeasure) -> Self {
        m.atoms
    }
}
