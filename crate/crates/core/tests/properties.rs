//! Property tests for the structural invariants of the particle system, the
//! Green's functions, the characteristic map and the Hilbert transform.

use dyson_core::characteristics;
use dyson_core::hilbert::{self, SampledFunction, SpectralHilbert, UniformGrid};
use dyson_core::particle::{self, HistogramGrid, ParticleState, SimParams};
use dyson_core::spectral::{self, ComplexPoint};
use dyson_core::{AnalyticProfile, AtomicMeasure};
use num_complex::Complex64;
use proptest::prelude::*;

fn positions(max: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-10.0..10.0f64, 2..max)
}

/// Atomic measures with 1 to 4 atoms at least 0.2 apart.
fn measure() -> impl Strategy<Value = AtomicMeasure> {
    proptest::collection::vec((0.2..2.0f64, 0.1..1.0f64), 1..5).prop_map(|steps| {
        let mut x = -2.0;
        let pairs: Vec<(f64, f64)> = steps
            .iter()
            .map(|&(gap, w)| {
                x += gap;
                (x, w)
            })
            .collect();
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        let mut normalized: Vec<(f64, f64)> = pairs.iter().map(|&(l, w)| (l, w / total)).collect();
        // make the weights sum to one exactly
        let rest: f64 = normalized[1..].iter().map(|p| p.1).sum();
        normalized[0].1 = 1.0 - rest;
        AtomicMeasure::from_pairs(&normalized).unwrap()
    })
}

fn upper_point() -> impl Strategy<Value = ComplexPoint> {
    (-5.0..5.0f64, 0.05..5.0f64).prop_map(|(re, im)| ComplexPoint::upper(re, im).unwrap())
}

fn gaussian(grid: UniformGrid, centre: f64, width: f64) -> SampledFunction {
    SampledFunction::from_fn(grid, |x| (-((x - centre) / width).powi(2)).exp()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steps_keep_particles_ordered(x in positions(40), seed in any::<u64>(), beta in 1.0..4.0f64) {
        let state = ParticleState::new(x, 0.0).unwrap();
        let params = SimParams { n_particles: state.len(), beta, dt: 1e-2, seed, t_end: 1.0 };
        let noise = particle::step_noise(seed, 0, state.len());
        let next = particle::step_dyson(&state, &params, &noise).unwrap();
        prop_assert!(next.is_sorted());
        prop_assert!(next.positions.iter().all(|p| p.is_finite()));
        prop_assert!(next.time > state.time);
    }

    #[test]
    fn drift_is_exchangeable_and_balanced(x in positions(30), shift in 1usize..29) {
        let mut sorted = x.clone();
        sorted.sort_by(f64::total_cmp);
        particle::jitter_coincident(&mut sorted);
        let d = particle::drift(&sorted);
        // a cyclic relabelling permutes the drift the same way
        let k = shift % sorted.len();
        let mut rotated = sorted.clone();
        rotated.rotate_left(k);
        let mut d_rot = particle::drift(&rotated);
        d_rot.rotate_right(k);
        for (a, b) in d.iter().zip(&d_rot) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }
        // pair forces cancel, so the centre of mass feels no drift
        let scale: f64 = d.iter().map(|v| v.abs()).sum::<f64>() + 1.0;
        prop_assert!(d.iter().sum::<f64>().abs() <= 1e-12 * scale);
    }

    #[test]
    fn state_construction_ignores_input_order(x in positions(30), seed in any::<u64>()) {
        let mut shuffled = x.clone();
        let n = shuffled.len();
        for i in 0..n {
            shuffled.swap(i, (seed as usize).wrapping_add(i * 7) % n);
        }
        prop_assert_eq!(ParticleState::new(x, 0.0).unwrap(), ParticleState::new(shuffled, 0.0).unwrap());
    }

    #[test]
    fn histogram_has_unit_mass(x in positions(200), bins in 1usize..60) {
        let state = ParticleState::new(x, 0.0).unwrap();
        let grid = HistogramGrid::new(-10.0, 10.0, bins).unwrap();
        let rho = particle::empirical_density(&state, grid).unwrap();
        prop_assert!((rho.total_mass() - 1.0).abs() < 1e-12);
        prop_assert!(rho.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn ks_distances_are_bounded_and_symmetric(a in positions(50), b in positions(50)) {
        let d = particle::ks_two_sample(&a, &b);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, particle::ks_two_sample(&b, &a));
        prop_assert_eq!(particle::ks_two_sample(&a, &a), 0.0);
        let state = ParticleState::new(a, 0.0).unwrap();
        let ks = particle::ks_distance(&state, |x| spectral::semicircle_cdf(1.0, x));
        prop_assert!((0.0..=1.0).contains(&ks));
    }

    #[test]
    fn herglotz_and_schwarz_reflection(mu in measure(), t in 0.05..3.0f64, z in upper_point()) {
        let g = spectral::green_functional(&mu, t, z).unwrap();
        prop_assert!(g.im <= 0.0);
        prop_assert!(g.norm() <= 1.0 / z.im + 1e-12);
        let below = ComplexPoint::lower(z.re, -z.im).unwrap();
        let g_below = spectral::green_functional(&mu, t, below).unwrap();
        prop_assert!((g_below - g.conj()).norm() <= 1e-12 * (1.0 + g.norm()));
        // the root solves G = G0(z - tG) directly
        let g0: Complex64 = mu.atoms().iter().map(|a| a.weight / (z.z() - t * g - a.location)).sum();
        prop_assert!((g - g0).norm() <= 1e-9 * (1.0 + g.norm()));
    }

    #[test]
    fn one_source_green_is_herglotz(t in 0.01..10.0f64, z in upper_point()) {
        let g = spectral::green_one_source(t, z).unwrap();
        prop_assert!(g.im <= 0.0);
        let resid = t * g * g - z.z() * g + 1.0;
        prop_assert!(resid.norm() <= 1e-12 * (1.0 + z.z().norm() * g.norm()));
    }

    #[test]
    fn two_source_scaling(a in 0.2..5.0f64, t in 0.05..3.0f64, z in upper_point()) {
        // G_a(a^2 t, a z) = G_1(t, z) / a
        let scaled = ComplexPoint::upper(a * z.re, a * z.im).unwrap();
        let lhs = spectral::green_two_source(a * a * t, scaled, a).unwrap();
        let rhs = spectral::green_two_source(t, z, 1.0).unwrap() / a;
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn two_source_density_is_even_and_nonnegative(t in 0.05..3.0f64, x in 0.0..4.0f64) {
        let p = spectral::two_source_density(t, x, 1.0);
        let m = spectral::two_source_density(t, -x, 1.0);
        prop_assert!(p >= 0.0);
        prop_assert!((p - m).abs() <= 1e-12 * (1.0 + p));
    }

    #[test]
    fn characteristic_map_is_increasing_off_the_fold(
        mu in measure(),
        t in 0.05..2.0f64,
        a in -6.0..6.0f64,
        b in -6.0..6.0f64,
    ) {
        let (x0, x1) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(x1 - x0 > 1e-6);
        prop_assume!(mu.locations().all(|l| (l - x0).abs() > 1e-6 && (l - x1).abs() > 1e-6));
        prop_assume!(characteristics::map_derivative(&mu, t, x0) > 0.0);
        prop_assume!(characteristics::map_derivative(&mu, t, x1) > 0.0);
        let m0 = characteristics::characteristic_map(&mu, t, x0).unwrap();
        let m1 = characteristics::characteristic_map(&mu, t, x1).unwrap();
        prop_assert!(m0 < m1, "M({x0}) = {m0} >= M({x1}) = {m1}");
        // injective images land outside the support
        let support = characteristics::support(&mu, t).unwrap();
        for m in [m0, m1] {
            prop_assert!(!support.contains(m) || support.distance_to_edge(m) < 1e-9);
        }
    }

    #[test]
    fn general_density_vanishes_off_support(mu in measure(), t in 0.05..2.0f64, x in -8.0..8.0f64) {
        let profile = AnalyticProfile::General { atoms: mu };
        let support = profile.support(t).unwrap();
        let rho = profile.density(t, x).unwrap();
        prop_assert!(rho >= 0.0);
        if !support.contains(x) {
            prop_assert_eq!(rho, 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn simulation_is_deterministic(seed in any::<u64>(), n in 2usize..30) {
        let init = ParticleState::new(AtomicMeasure::two_source(1.0).unwrap().initial_positions(n), 0.0).unwrap();
        let params = SimParams { n_particles: n, beta: 2.0, dt: 1e-2, seed, t_end: 0.2 };
        let a = particle::simulate(&init, &params, &[0.1, 0.2]).unwrap();
        let b = particle::simulate(&init, &params, &[0.1, 0.2]).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a[1].time, 0.2);
    }

    #[test]
    fn hilbert_is_anti_self_adjoint(c1 in -3.0..3.0f64, w1 in 0.5..2.0f64, c2 in -3.0..3.0f64, w2 in 0.5..2.0f64) {
        let grid = UniformGrid::new(-32.0, 32.0, 1024).unwrap();
        let f = gaussian(grid, c1, w1);
        let g = gaussian(grid, c2, w2);
        let h = SpectralHilbert::periodic();
        let hf = h.apply(&f).unwrap();
        let hg = h.apply(&g).unwrap();
        let lhs = hf.inner(&g) + f.inner(&hg);
        prop_assert!(lhs.abs() < 1e-10, "{lhs}");
    }

    #[test]
    fn hilbert_maps_even_to_odd(w in 0.3..2.0f64, c in 0.0..3.0f64) {
        let grid = UniformGrid::new(-32.0, 32.0, 1024).unwrap();
        // even: two bumps at ±c
        let f = SampledFunction::from_fn(grid, |x| {
            (-((x - c) / w).powi(2)).exp() + (-((x + c) / w).powi(2)).exp()
        })
        .unwrap();
        let hf = hilbert::hilbert_spectral(&f).unwrap();
        let n = grid.n;
        let scale = hf.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for j in 1..n {
            // the point -x_j is x_{n-j}
            prop_assert!((hf.values[j] + hf.values[n - j]).abs() <= 1e-12 * (1.0 + scale));
        }
    }

    #[test]
    fn hilbert_squares_to_minus_identity(c in -3.0..3.0f64, w in 0.4..2.0f64) {
        let grid = UniformGrid::new(-32.0, 32.0, 1024).unwrap();
        let f = gaussian(grid, c, w);
        let err = hilbert::check_inverse(&f).unwrap();
        prop_assert!(err < 1e-8, "{err}");
    }
}
