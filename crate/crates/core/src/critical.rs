//! The critical dipole moment: closed form, the ionization estimate, the
//! numerical route through the inverse-square threshold, and the two-center
//! dipole experiment.

use rayon::prelude::*;
use serde::Serialize;

use crate::eigensolver::{discretize, find_alpha_crit, AlphaCritEstimate, Grid};
use crate::error::{domain, Error, Result};
use crate::potentials::make_physical_dipole;
use crate::units::{alpha_from_p, bohr_radius, dipole_atomic_to_si, ConstantSet};

/// Windows (δ, L) used when none are given.
pub const DEFAULT_WINDOWS: [(f64, f64); 3] = [(1e-8, 1e8), (1e-10, 1e10), (1e-12, 1e12)];

/// p_crit = (πε₀/2)·ħ²/(qm), evaluated as q·a_B/8 so the atomic-unit value
/// is exactly 1/8.
pub fn p_crit_exact(c: &ConstantSet) -> f64 {
    c.dipole_unit() / 8.0
}

/// p_est = Q·d with d the ionization distance; equals 8πε₀ħ²/(qm) = 2·q·a_B.
pub fn p_crit_estimate(c: &ConstantSet) -> f64 {
    2.0 * c.dipole_unit()
}

/// Distance at which a charge Q's Coulomb repulsion matches the 1D ground
/// state binding |E₁| = qQ/(8πε₀a_B): d = 2a_B.
pub fn ionization_distance(c: &ConstantSet, charge: f64) -> Result<f64> {
    Ok(2.0 * bohr_radius(c, charge)?)
}

/// p_est / p_crit. Both share every constant factor, so the ratio is the
/// exact power of two 16.
pub fn estimate_ratio(c: &ConstantSet) -> f64 {
    p_crit_estimate(c) / p_crit_exact(c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericCritical {
    pub windows: Vec<AlphaCritEstimate>,
    /// Intercept of α̂ against 1/ln²(L/δ).
    pub alpha: f64,
    pub alpha_error: f64,
    pub slope: f64,
    /// α/2 in q·a_B.
    pub p: f64,
    pub p_error: f64,
}

/// Least-squares line through (x_i, y_i); returns intercept, slope and the
/// weights w_i with intercept = Σ w_i y_i.
fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, Vec<f64>) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let weights = x.iter().map(|v| 1.0 / n - mx * (v - mx) / sxx).collect();
    (intercept, slope, weights)
}

/// Runs the threshold search on each window and extrapolates to an
/// infinite window along 1/ln²(L/δ).
pub fn p_crit_numeric(windows: &[(f64, f64)], tol_alpha: f64) -> Result<NumericCritical> {
    if windows.len() < 2 {
        return Err(domain("extrapolation needs at least two windows"));
    }
    let spans: Vec<f64> = windows.iter().map(|(d, l)| (l / d).ln()).collect();
    if spans.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("windows must have increasing ln(L/delta)"));
    }
    let estimates: Vec<AlphaCritEstimate> = windows
        .par_iter()
        .map(|&(d, l)| find_alpha_crit(d, l, tol_alpha))
        .collect::<Result<_>>()?;
    if estimates.windows(2).any(|w| !(w[1].alpha < w[0].alpha)) {
        return Err(Error::Extrapolation(format!(
            "threshold bias does not decrease across windows: {:?}",
            estimates.iter().map(|e| e.alpha).collect::<Vec<_>>()
        )));
    }
    let x: Vec<f64> = spans.iter().map(|s| 1.0 / (s * s)).collect();
    let y: Vec<f64> = estimates.iter().map(|e| e.alpha).collect();
    let (alpha, slope, weights) = fit_line(&x, &y);
    let propagated: f64 = weights
        .iter()
        .zip(&estimates)
        .map(|(w, e)| w.abs() * e.half_width)
        .sum();
    let fit_spread = if x.len() > 2 {
        let rss: f64 = x.iter().zip(&y).map(|(a, b)| (b - alpha - slope * a).powi(2)).sum();
        let sigma2 = rss / (x.len() - 2) as f64;
        (sigma2 * weights.iter().map(|w| w * w).sum::<f64>()).sqrt()
    } else {
        0.0
    };
    let alpha_error = propagated + fit_spread;
    Ok(NumericCritical {
        windows: estimates,
        alpha,
        alpha_error,
        slope,
        p: 0.5 * alpha,
        p_error: 0.5 * alpha_error,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalReport {
    pub constants: String,
    pub alpha_crit_numeric: f64,
    pub alpha_crit_error: f64,
    pub p_crit_exact_au: f64,
    pub p_crit_exact_si: f64,
    pub alpha_at_p_crit_exact: f64,
    pub p_crit_numeric_au: f64,
    pub p_crit_numeric_error_au: f64,
    pub p_crit_numeric_si: f64,
    pub p_estimate_au: f64,
    pub p_estimate_si: f64,
    pub ionization_distance_au: f64,
    pub ratio_estimate_to_exact: f64,
    pub window_metadata: Vec<AlphaCritEstimate>,
}

/// Collects the closed-form and numerical critical quantities.
pub fn critical_report(c: &ConstantSet, windows: &[(f64, f64)], tol_alpha: f64) -> Result<CriticalReport> {
    c.validate()?;
    let numeric = p_crit_numeric(windows, tol_alpha)?;
    let au = ConstantSet::atomic();
    let p_exact_si = p_crit_exact(c);
    Ok(CriticalReport {
        constants: c.provenance_label.clone(),
        alpha_crit_numeric: numeric.alpha,
        alpha_crit_error: numeric.alpha_error,
        p_crit_exact_au: p_exact_si / c.dipole_unit(),
        p_crit_exact_si: p_exact_si,
        alpha_at_p_crit_exact: alpha_from_p(c, p_exact_si)?,
        p_crit_numeric_au: numeric.p,
        p_crit_numeric_error_au: numeric.p_error,
        p_crit_numeric_si: dipole_atomic_to_si(c, numeric.p),
        p_estimate_au: p_crit_estimate(c) / c.dipole_unit(),
        p_estimate_si: p_crit_estimate(c),
        ionization_distance_au: ionization_distance(&au, 1.0)?,
        ratio_estimate_to_exact: estimate_ratio(c),
        window_metadata: numeric.windows,
    })
}

// ---------------------------------------------------------------------------
// Two-center dipole experiment

/// Statement under test in [`physical_dipole_scan`], echoed in its output.
pub const SEPARATION_CLAIM: &str =
    "claim under test: the critical moment of a physical dipole is independent of the separation";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DipoleRow {
    pub d: f64,
    pub epsilon: f64,
    /// Smallest p = Q·d with an E < 0 state; NaN when inconclusive.
    pub p_crit: f64,
    pub half_width: f64,
    pub conclusive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DipoleScan {
    pub exploratory: bool,
    pub half_length: f64,
    pub points: usize,
    pub p_range: (f64, f64),
    pub rows: Vec<DipoleRow>,
    /// max/min of the conclusive p_crit values.
    pub spread: f64,
    pub footer: String,
}

impl DipoleScan {
    pub fn any_inconclusive(&self) -> bool {
        self.rows.iter().any(|r| !r.conclusive)
    }
}

/// Relative width at which the bisection on p stops.
const SCAN_REL_TOL: f64 = 1e-3;

/// Smallest moment tried before a separation is reported inconclusive.
const P_FLOOR: f64 = 1e-6;

fn binds(p: f64, d: f64, epsilon: f64, grid: &Grid) -> Result<bool> {
    let spec = make_physical_dipole(p / d, d, epsilon)?;
    Ok(discretize(&spec, grid)?.matrix.sturm_count(0.0) >= 1)
}

/// For each separation d, bisects on p (with Q = p/d) for the appearance of a
/// negative-energy state of the capped two-center potential on
/// [−half_length, half_length] with Dirichlet ends.
///
/// Exploratory: the result depends on the box and on ε and is reported, not
/// asserted.
pub fn physical_dipole_scan(d_list: &[f64], epsilon: f64, half_length: f64, points: usize) -> Result<DipoleScan> {
    if d_list.is_empty() || d_list.iter().any(|d| !(*d > 0.0)) {
        return Err(domain("separations must be positive"));
    }
    if !(epsilon > 0.0) {
        return Err(domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let grid = Grid::uniform(-half_length, half_length, points)?;
    let spacing = grid.step();
    if !(epsilon > spacing) {
        return Err(Error::Resolution { epsilon, spacing });
    }
    let p_exact = 0.125;
    let (p_lo, p_hi) = (p_exact / 10.0, p_exact * 10.0);
    let rows: Vec<DipoleRow> = d_list
        .par_iter()
        .map(|&d| {
            let mut lo = p_lo;
            let mut hi = p_hi;
            // weak dipoles still bind in a large box; walk the lower end down
            while lo > P_FLOOR && binds(lo, d, epsilon, &grid)? {
                hi = lo;
                lo /= 4.0;
            }
            if binds(lo, d, epsilon, &grid)? || !binds(hi, d, epsilon, &grid)? {
                return Ok(DipoleRow {
                    d,
                    epsilon,
                    p_crit: f64::NAN,
                    half_width: f64::NAN,
                    conclusive: false,
                });
            }
            while hi - lo > SCAN_REL_TOL * lo {
                let mid = 0.5 * (lo + hi);
                if binds(mid, d, epsilon, &grid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok(DipoleRow {
                d,
                epsilon,
                p_crit: 0.5 * (lo + hi),
                half_width: 0.5 * (hi - lo),
                conclusive: true,
            })
        })
        .collect::<Result<_>>()?;
    let found: Vec<f64> = rows.iter().filter(|r| r.conclusive).map(|r| r.p_crit).collect();
    let spread = if found.is_empty() {
        f64::NAN
    } else {
        found.iter().copied().fold(f64::MIN, f64::max) / found.iter().copied().fold(f64::MAX, f64::min)
    };
    Ok(DipoleScan {
        exploratory: true,
        half_length,
        points,
        p_range: (p_lo, p_hi),
        rows,
        spread,
        footer: SEPARATION_CLAIM.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_unit_values() {
        let au = ConstantSet::atomic();
        assert!((p_crit_exact(&au) - 0.125).abs() < 1e-16);
        assert!((p_crit_estimate(&au) - 2.0).abs() < 1e-15);
        assert!((ionization_distance(&au, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(ionization_distance(&au, 0.0).is_err());
    }

    #[test]
    fn ratio_is_exactly_sixteen() {
        assert_eq!(estimate_ratio(&ConstantSet::atomic()), 16.0);
        assert_eq!(estimate_ratio(&ConstantSet::codata2018()), 16.0);
        let odd = ConstantSet::new(1.3e-3, 7.1, 0.37, 2.9e5).unwrap();
        assert_eq!(estimate_ratio(&odd), 16.0);
    }

    #[test]
    fn si_values() {
        let c = ConstantSet::codata2018();
        let p = p_crit_exact(&c);
        assert!(((p - 1.052e-30) / 1.052e-30).abs() < 0.01, "{p:e}");
        // 2·q·a_B = 2 × 8.478353e-30
        let est = p_crit_estimate(&c);
        assert!(((est - 1.70e-29) / 1.70e-29).abs() < 0.005, "{est:e}");
    }

    #[test]
    fn unit_paths_agree() {
        use std::f64::consts::PI;
        for c in [ConstantSet::codata2018(), ConstantSet::new(2.0, 3.0, 0.5, 7.0).unwrap()] {
            let direct = PI * c.epsilon0 / 2.0 * c.hbar * c.hbar / (c.q_electron * c.m_electron);
            let via_au = dipole_atomic_to_si(&c, 0.125);
            assert!(((via_au - direct) / direct).abs() < 1e-12);
            assert!(((p_crit_exact(&c) - direct) / direct).abs() < 1e-12);
        }
    }

    #[test]
    fn single_window_biased_high() {
        let est = find_alpha_crit(1e-8, 1e8, 1e-4).unwrap();
        assert!((0.5 * est.alpha - 0.1287).abs() < 1e-4);
    }

    #[test]
    fn numeric_route_validation() {
        assert!(p_crit_numeric(&[(1e-8, 1e8)], 1e-4).is_err());
        assert!(p_crit_numeric(&[(1e-10, 1e10), (1e-8, 1e8)], 1e-4).is_err());
    }

    #[test]
    fn fit_weights_reproduce_intercept() {
        let x = [0.1, 0.3, 0.7];
        let y = [1.2, 1.6, 2.4];
        let (a, b, w) = fit_line(&x, &y);
        assert!((a - 1.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12);
        let via: f64 = w.iter().zip(&y).map(|(w, y)| w * y).sum();
        assert!((via - a).abs() < 1e-12);
    }

    #[test]
    fn scan_rejects_unresolved_cap() {
        assert!(matches!(
            physical_dipole_scan(&[1.0], 1e-3, 10.0, 1001),
            Err(Error::Resolution { .. })
        ));
        assert!(physical_dipole_scan(&[], 1e-2, 10.0, 4001).is_err());
        assert!(physical_dipole_scan(&[-1.0], 1e-2, 10.0, 4001).is_err());
    }
}
