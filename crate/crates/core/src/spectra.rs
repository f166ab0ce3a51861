//! Closed-form frequency spectra and reference energies for two boundary
//! configurations: a scalar field with one periodic spatial direction
//! (periodicity length L, transverse area A) and a polarizable particle at
//! distance z from a perfectly reflecting wall.
//!
//! Both spectra oscillate wildly around zero; their regularized integrals
//! (module [`crate::abel`]) recover the small finite energies
//! E = -pi^2 A / (90 L^3) and V = -3 alpha0 / (8 pi z^4).

use crate::error::{Error, Result};
use std::f64::consts::{PI, TAU};

/// Periodic-boundary configuration: transverse area `A` and periodicity
/// length `L`, both positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasimirGeometry {
    pub area: f64,
    pub periodicity: f64,
}

impl CasimirGeometry {
    pub fn new(area: f64, periodicity: f64) -> Result<Self> {
        if !(area > 0.0 && area.is_finite()) {
            return Err(Error::invalid("area", format!("must be > 0, got {area}")));
        }
        if !(periodicity > 0.0 && periodicity.is_finite()) {
            return Err(Error::invalid(
                "periodicity",
                format!("must be > 0, got {periodicity}"),
            ));
        }
        Ok(Self { area, periodicity })
    }
}

/// Atom-wall configuration: static polarizability `alpha0` (Gaussian units,
/// length^3) and wall distance `z`, both positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasimirPolderSetup {
    pub polarizability: f64,
    pub wall_distance: f64,
}

impl CasimirPolderSetup {
    pub fn new(polarizability: f64, wall_distance: f64) -> Result<Self> {
        if !(polarizability > 0.0 && polarizability.is_finite()) {
            return Err(Error::invalid(
                "polarizability",
                format!("must be > 0, got {polarizability}"),
            ));
        }
        if !(wall_distance > 0.0 && wall_distance.is_finite()) {
            return Err(Error::invalid(
                "wall_distance",
                format!("must be > 0, got {wall_distance}"),
            ));
        }
        Ok(Self {
            polarizability,
            wall_distance,
        })
    }
}

/// A tagged spectrum sigma(omega) together with the metadata the quadrature
/// code needs: the length of one oscillation period in omega.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumModel {
    Casimir(CasimirGeometry),
    CasimirPolder(CasimirPolderSetup),
}

impl SpectrumModel {
    /// Length of one oscillation period in omega: 2 pi / L for the periodic
    /// geometry, the quasi-period pi / z for the atom-wall spectrum.
    pub fn oscillation_scale(&self) -> f64 {
        match self {
            SpectrumModel::Casimir(g) => TAU / g.periodicity,
            SpectrumModel::CasimirPolder(s) => PI / s.wall_distance,
        }
    }

    /// Evaluate sigma(omega).
    pub fn sigma(&self, omega: f64) -> f64 {
        match self {
            SpectrumModel::Casimir(g) => casimir_sigma(omega, g),
            SpectrumModel::CasimirPolder(s) => cp_sigma(omega, s),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SpectrumModel::Casimir(_) => "casimir",
            SpectrumModel::CasimirPolder(_) => "cp",
        }
    }
}

/// The 2 pi-periodic sawtooth S(x) = sum_{n>=1} sin(n x) / n, evaluated in
/// closed form: (pi - x)/2 on (0, 2 pi). At exact multiples of 2 pi the
/// series converges to its midpoint value 0, which is what we return.
///
/// The reduction keeps the sign of `x % 2pi`, so S(-x) == -S(x) bit-exactly.
pub fn sawtooth_s(x: f64) -> f64 {
    let r = x % TAU;
    if r == 0.0 {
        0.0
    } else if r > 0.0 {
        0.5 * (PI - r)
    } else {
        0.5 * (-PI - r)
    }
}

/// Partial sum sum_{n=1}^{terms} sin(n x) / n of the sawtooth series.
pub fn sawtooth_partial_sum(x: f64, terms: u32) -> f64 {
    let mut acc = 0.0;
    for n in 1..=terms {
        acc += (n as f64 * x).sin() / n as f64;
    }
    acc
}

/// Frequency spectrum of the periodic-boundary vacuum energy:
/// sigma(omega) = (A omega^2 / 2 pi^2) S(omega L).
///
/// The prefactor is fixed by requiring that the damped integral reproduce
/// -pi^2 A / (90 L^3) in the limit of vanishing damping; see
/// [`crate::abel::casimir_damped_modesum`] for the term-by-term check.
pub fn casimir_sigma(omega: f64, geom: &CasimirGeometry) -> f64 {
    // area multiplies last so sigma is exactly linear in A
    geom.area * (omega * omega / (2.0 * PI * PI) * sawtooth_s(omega * geom.periodicity))
}

/// Frequency spectrum of the atom-wall interaction:
/// sigma(omega) = (2 omega^2 z^2 - 1) sin(2 omega z) + 2 omega z cos(2 omega z).
pub fn cp_sigma(omega: f64, setup: &CasimirPolderSetup) -> f64 {
    let wz = omega * setup.wall_distance;
    (2.0 * wz * wz - 1.0) * (2.0 * wz).sin() + 2.0 * wz * (2.0 * wz).cos()
}

/// Closed-form reference energy -pi^2 A / (90 L^3).
pub fn casimir_energy_closed(geom: &CasimirGeometry) -> f64 {
    let l = geom.periodicity;
    -PI * PI * geom.area / (90.0 * l * l * l)
}

/// Closed-form atom-wall potential -3 alpha0 / (8 pi z^4).
pub fn cp_potential_closed(setup: &CasimirPolderSetup) -> f64 {
    let z = setup.wall_distance;
    -3.0 * setup.polarizability / (8.0 * PI * z.powi(4))
}

/// A uniformly sampled table of (omega, sigma) rows.
///
/// In normalized form the columns are rescaled for plotting: the periodic
/// spectrum uses omega in units of 2 pi / L and sigma in units of 2 A / L;
/// the atom-wall spectrum keeps sigma as-is and reports 2 omega z on the
/// first column.
#[derive(Debug, Clone)]
pub struct SpectrumTable {
    pub rows: Vec<(f64, f64)>,
    pub normalized: bool,
}

impl SpectrumTable {
    /// CSV with header `omega,sigma`, one row per sample, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,sigma\n");
        for &(omega, sigma) in &self.rows {
            out.push_str(&format!("{omega},{sigma}\n"));
        }
        out
    }
}

/// Tabulate sigma(omega) uniformly over [0, omega_max] with `samples` points.
pub fn tabulate_spectrum(
    model: &SpectrumModel,
    omega_max: f64,
    samples: usize,
    normalized: bool,
) -> Result<SpectrumTable> {
    if !(omega_max > 0.0 && omega_max.is_finite()) {
        return Err(Error::invalid(
            "omega_max",
            format!("must be > 0, got {omega_max}"),
        ));
    }
    if samples < 2 {
        return Err(Error::invalid(
            "samples",
            format!("need at least 2, got {samples}"),
        ));
    }

    let step = omega_max / (samples - 1) as f64;
    let rows = (0..samples)
        .map(|i| {
            let omega = i as f64 * step;
            let sigma = model.sigma(omega);
            if normalized {
                match model {
                    SpectrumModel::Casimir(g) => (
                        omega * g.periodicity / TAU,
                        sigma * g.periodicity / (2.0 * g.area),
                    ),
                    SpectrumModel::CasimirPolder(s) => (2.0 * omega * s.wall_distance, sigma),
                }
            } else {
                (omega, sigma)
            }
        })
        .collect();

    Ok(SpectrumTable { rows, normalized })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn sawtooth_reference_points() {
        assert_eq!(sawtooth_s(PI), 0.0);
        assert_relative_eq!(sawtooth_s(PI / 2.0), PI / 4.0, max_relative = 1e-15);
        assert_abs_diff_eq!(sawtooth_s(5.0 * PI), 0.0, epsilon = 1e-14);
        assert_eq!(sawtooth_s(TAU), 0.0);
        assert_eq!(sawtooth_s(0.0), 0.0);
        assert_eq!(sawtooth_s(-TAU), 0.0);
    }

    #[test]
    fn sawtooth_partial_sum_examples() {
        assert_eq!(sawtooth_partial_sum(PI / 2.0, 1), 1.0);
        assert!((sawtooth_partial_sum(PI / 2.0, 10_000) - PI / 4.0).abs() < 1e-3);
        for n in [1, 7, 100] {
            assert_abs_diff_eq!(sawtooth_partial_sum(PI, n), 0.0, epsilon = 1e-12);
        }
    }

    proptest! {
        // Exact periodicity, restricted to x where x + 2pi incurs no rounding:
        // multiples of 2^-47 below 16 in magnitude (the f64 nearest 2pi is a
        // multiple of 2^-47, so the sum is exactly representable).
        #[test]
        fn sawtooth_exact_periodicity(k in -(1i64 << 51)..(1i64 << 51)) {
            let x = k as f64 * 2f64.powi(-47);
            prop_assert_eq!(sawtooth_s(x + TAU), sawtooth_s(x));
        }

        #[test]
        fn sawtooth_odd_symmetry(x in -1e4f64..1e4) {
            prop_assume!(x % TAU != 0.0);
            prop_assert_eq!(sawtooth_s(-x), -sawtooth_s(x));
        }

        // Partial-sum convergence: |S_N(x) - S(x)| <= 2 / ((N+1) sin(delta/2))
        // for x at distance >= delta from the discontinuities.
        #[test]
        fn sawtooth_partial_sum_converges(x in 0.3f64..(TAU - 0.3), n in 10u32..2000) {
            let err = (sawtooth_partial_sum(x, n) - sawtooth_s(x)).abs();
            let delta = x.min(TAU - x);
            let bound = 2.0 / ((n as f64 + 1.0) * (delta / 2.0).sin());
            prop_assert!(err <= bound, "err {} > bound {}", err, bound);
        }

        #[test]
        fn casimir_sigma_scales_linearly_in_area(a in 0.1f64..10.0, omega in 0.0f64..50.0) {
            let unit = CasimirGeometry::new(1.0, 1.0).unwrap();
            let geom = CasimirGeometry::new(a, 1.0).unwrap();
            prop_assert_eq!(casimir_sigma(omega, &geom), a * casimir_sigma(omega, &unit));
        }

        // cp_sigma depends on omega and z only through omega * z.
        #[test]
        fn cp_sigma_scale_invariance(s in 0.1f64..10.0, omega in 0.01f64..20.0) {
            let a = CasimirPolderSetup::new(1.0, 1.0).unwrap();
            let b = CasimirPolderSetup::new(1.0, 1.0 / s).unwrap();
            let lhs = cp_sigma(omega, &a);
            let rhs = cp_sigma(omega * s, &b);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs().max(rhs.abs())));
        }
    }

    #[test]
    fn casimir_sigma_reference_points() {
        let geom = CasimirGeometry::new(1.0, 1.0).unwrap();
        assert_eq!(casimir_sigma(PI, &geom), 0.0);
        // omega = pi/2: (pi^2/4) * (1/2pi^2) * S(pi/2) = pi/32
        assert_relative_eq!(
            casimir_sigma(PI / 2.0, &geom),
            PI / 32.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn casimir_sigma_sign_pattern() {
        let geom = CasimirGeometry::new(1.0, 1.0).unwrap();
        for i in 1..100 {
            let in_first = PI * i as f64 / 100.0;
            let in_second = PI + PI * i as f64 / 100.0;
            assert!(casimir_sigma(in_first, &geom) > 0.0);
            assert!(casimir_sigma(in_second, &geom) < 0.0);
        }
    }

    #[test]
    fn cp_sigma_reference_points() {
        let setup = CasimirPolderSetup::new(1.0, 1.0).unwrap();
        assert_eq!(cp_sigma(0.0, &setup), 0.0);
        // 2 omega z = pi: value -pi; 2 omega z = 2 pi: value 2 pi.
        assert_abs_diff_eq!(cp_sigma(PI / 2.0, &setup), -PI, epsilon = 1e-13);
        assert_abs_diff_eq!(cp_sigma(PI, &setup), TAU, epsilon = 1e-13);
    }

    #[test]
    fn closed_form_energies() {
        let geom = CasimirGeometry::new(1.0, 1.0).unwrap();
        assert_relative_eq!(
            casimir_energy_closed(&geom),
            -PI * PI / 90.0,
            max_relative = 1e-15
        );
        let doubled_l = CasimirGeometry::new(1.0, 2.0).unwrap();
        assert_relative_eq!(
            casimir_energy_closed(&doubled_l),
            casimir_energy_closed(&geom) / 8.0,
            max_relative = 1e-15
        );
        let doubled_a = CasimirGeometry::new(2.0, 1.0).unwrap();
        assert_relative_eq!(
            casimir_energy_closed(&doubled_a),
            2.0 * casimir_energy_closed(&geom),
            max_relative = 1e-15
        );

        let setup = CasimirPolderSetup::new(1.0, 1.0).unwrap();
        assert_relative_eq!(
            cp_potential_closed(&setup),
            -3.0 / (8.0 * PI),
            max_relative = 1e-15
        );
        let far = CasimirPolderSetup::new(1.0, 2.0).unwrap();
        assert_relative_eq!(
            cp_potential_closed(&far),
            cp_potential_closed(&setup) / 16.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn tabulate_covers_four_periods() {
        let geom = CasimirGeometry::new(1.0, 1.0).unwrap();
        let model = SpectrumModel::Casimir(geom);
        let table = tabulate_spectrum(&model, 8.0 * PI, 1601, false).unwrap();
        assert_eq!(table.rows.len(), 1601);
        assert_eq!(table.rows[0], (0.0, 0.0));
        // strictly increasing omega
        assert!(table.rows.windows(2).all(|w| w[0].0 < w[1].0));
        // one jump discontinuity per period at omega L = 2 pi n: the sampled
        // sigma flips from negative back to positive across each boundary.
        let spacing = 8.0 * PI / 1600.0;
        let nonzero: Vec<(f64, f64)> = table
            .rows
            .iter()
            .copied()
            .filter(|r| r.1 != 0.0)
            .collect();
        let flips: Vec<f64> = nonzero
            .windows(2)
            .filter(|w| w[0].1 < 0.0 && w[1].1 > 0.0)
            .map(|w| w[0].0)
            .collect();
        for boundary in [TAU, 2.0 * TAU, 3.0 * TAU] {
            assert!(
                flips.iter().any(|&x| (x - boundary).abs() <= spacing),
                "missing jump near {boundary}"
            );
        }
        // every upward flip sits at a period boundary
        for &x in &flips {
            let nearest = (x / TAU).round() * TAU;
            assert!((x - nearest).abs() <= spacing, "stray flip at {x}");
        }
    }

    #[test]
    fn tabulate_rejects_bad_arguments() {
        let model = SpectrumModel::Casimir(CasimirGeometry::new(1.0, 1.0).unwrap());
        assert!(tabulate_spectrum(&model, 0.0, 100, false).is_err());
        assert!(tabulate_spectrum(&model, -1.0, 100, false).is_err());
        assert!(tabulate_spectrum(&model, 1.0, 1, false).is_err());
    }

    #[test]
    fn normalized_casimir_table_units() {
        let geom = CasimirGeometry::new(3.0, 2.0).unwrap();
        let model = SpectrumModel::Casimir(geom);
        let table = tabulate_spectrum(&model, 4.0 * PI, 257, true).unwrap();
        // last row: omega = 4 pi -> omega / (2 pi / L) = 4 with L = 2.
        let (w, _) = *table.rows.last().unwrap();
        assert_relative_eq!(w, 4.0, max_relative = 1e-12);
        // sigma column is sigma / (2 A / L)
        let (w1, s1) = table.rows[100];
        let omega = w1 * TAU / geom.periodicity;
        assert_relative_eq!(
            s1,
            casimir_sigma(omega, &geom) * geom.periodicity / (2.0 * geom.area),
            max_relative = 1e-12
        );
    }

    /// Newton-refined root of (x^2/2 - 1) sin x + x cos x near n pi, using
    /// f'(x) = (x^2/2) cos x.
    fn cp_root_near(n: f64) -> f64 {
        let mut x = n * PI;
        for _ in 0..6 {
            let f = (x * x / 2.0 - 1.0) * x.sin() + x * x.cos();
            let df = x * x / 2.0 * x.cos();
            x -= f / df;
        }
        x
    }

    #[test]
    fn cp_table_sign_changes_track_sin_roots() {
        let setup = CasimirPolderSetup::new(1.0, 1.0).unwrap();
        let model = SpectrumModel::CasimirPolder(setup);
        let table = tabulate_spectrum(&model, 4.0 * TAU, 4001, false).unwrap();
        let spacing = 2.0 * (4.0 * TAU) / 4000.0; // in x = 2 omega z
        let mut seen = 0;
        for w in table.rows.windows(2) {
            let x0 = 2.0 * w[0].0;
            if x0 < 6.0 || w[0].1 == 0.0 || w[1].1 == 0.0 {
                continue; // asymptotic regime, skip exact zeros
            }
            if w[0].1.signum() != w[1].1.signum() {
                let n = (x0 / PI).round();
                let predicted = cp_root_near(n);
                assert!(
                    (x0 - predicted).abs() <= spacing,
                    "sign change at x={x0} vs predicted {predicted}"
                );
                seen += 1;
            }
        }
        assert!(seen >= 10, "expected many oscillations, saw {seen}");
    }

    #[test]
    fn invalid_geometry_rejected() {
        assert!(CasimirGeometry::new(0.0, 1.0).is_err());
        assert!(CasimirGeometry::new(1.0, -2.0).is_err());
        assert!(CasimirPolderSetup::new(-1.0, 1.0).is_err());
        assert!(CasimirPolderSetup::new(1.0, 0.0).is_err());
        assert!(CasimirGeometry::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn csv_schema() {
        let model = SpectrumModel::Casimir(CasimirGeometry::new(1.0, 1.0).unwrap());
        let table = tabulate_spectrum(&model, 1.0, 3, false).unwrap();
        let csv = table.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("omega,sigma"));
        assert_eq!(lines.next(), Some("0,0"));
        assert!(csv.ends_with('\n'));
        assert!(!csv.contains('\r'));
    }
}
