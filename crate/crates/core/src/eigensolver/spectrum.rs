//! Low-lying spectra, the Dirichlet hydrogen ladder and the cut-off sweep.

use rayon::prelude::*;
use serde::Serialize;

use super::grid::Grid;
use super::hamiltonian::{discretize, discretize_even, DiscreteHamiltonian};
use super::tridiag::{count_sign_changes, SymTridiagonal};
use crate::error::{domain, Error, Result};
use crate::potentials::PotentialSpec;

/// Entries below this fraction of max|ψ| are ignored when counting nodes.
const NODE_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Ascending eigenvalues (hartree).
    pub energies: Vec<f64>,
    pub node_counts: Vec<usize>,
    /// Final bisection bracket widths.
    pub bracket_widths: Vec<f64>,
    /// Richardson error estimate per level; NaN when no refinement was run.
    pub refinement_estimate: Vec<f64>,
    #[serde(skip)]
    pub positions: Option<Vec<f64>>,
    #[serde(skip)]
    pub eigenvectors: Option<Vec<Vec<f64>>>,
}

/// The `k` lowest eigenpairs of `h`. Wavefunctions are kept when
/// `keep_vectors` is set; node counts are always computed.
pub fn lowest_states(h: &DiscreteHamiltonian, k: usize, keep_vectors: bool) -> Result<Spectrum> {
    let brackets = h.matrix.lowest_brackets(k)?;
    let mut energies = Vec::with_capacity(k);
    let mut node_counts = Vec::with_capacity(k);
    let mut vectors = Vec::new();
    for b in &brackets {
        let e = b.mid();
        let psi = h.wavefunction(&h.matrix.eigenvector(e));
        node_counts.push(count_sign_changes(&psi, NODE_FLOOR));
        energies.push(e);
        if keep_vectors {
            vectors.push(psi);
        }
    }
    Ok(Spectrum {
        energies,
        node_counts,
        bracket_widths: brackets.iter().map(|b| b.width()).collect(),
        refinement_estimate: vec![f64::NAN; k],
        positions: keep_vectors.then(|| h.positions()),
        eigenvectors: keep_vectors.then_some(vectors),
    })
}

/// The `k` lowest eigenvalues of `h` with node counts.
pub fn lowest_eigenvalues(h: &DiscreteHamiltonian, k: usize) -> Result<Spectrum> {
    lowest_states(h, k, false)
}

/// Ground-state energy of a bare tridiagonal operator.
pub(crate) fn ground_energy(t: &SymTridiagonal) -> Result<f64> {
    Ok(t.lowest_brackets(1)?[0].mid())
}

// ---------------------------------------------------------------------------
// Dirichlet hydrogen

/// Default half-line grid for the Coulomb problem at λ = 1.
pub const HYDROGEN_X_MIN: f64 = 1e-5;
pub const HYDROGEN_X_MAX: f64 = 200.0;
pub const HYDROGEN_POINTS: usize = 16384;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalmerRow {
    pub n: usize,
    pub computed: f64,
    pub balmer: f64,
    pub relative_error: f64,
    /// Richardson-extrapolated energy, NaN without refinement.
    pub extrapolated: f64,
    pub extrapolated_relative_error: f64,
    /// |E_ℓ − E_{ℓ−1}|/3 for each refinement level ℓ ≥ 1.
    pub error_estimates: Vec<f64>,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HydrogenReport {
    pub lambda: f64,
    pub base_grid: Grid,
    pub level_points: Vec<usize>,
    /// energies[level][state]
    pub level_energies: Vec<Vec<f64>>,
    pub rows: Vec<BalmerRow>,
    pub spectrum: Spectrum,
}

/// Balmer reference −λ²/(2n²) in hartree.
pub fn balmer_energy(lambda: f64, n: usize) -> f64 {
    -lambda * lambda / (2.0 * (n * n) as f64)
}

/// Base grid for a Coulomb strength λ: the λ = 1 grid scaled by 1/λ.
pub fn hydrogen_grid(lambda: f64, n: usize) -> Result<Grid> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(domain(format!("lambda must be positive, got {lambda}")));
    }
    Grid::logarithmic(HYDROGEN_X_MIN / lambda, HYDROGEN_X_MAX / lambda, n)
}

/// Dirichlet half-line hydrogen spectrum on the default grid.
pub fn hydrogen_spectrum(lambda: f64, n_states: usize, refine_levels: usize) -> Result<HydrogenReport> {
    hydrogen_spectrum_on(
        &hydrogen_grid(lambda, HYDROGEN_POINTS)?,
        lambda,
        n_states,
        refine_levels,
    )
}

/// Dirichlet hydrogen on `(base.x_min, base.x_max]`, refined `refine_levels`
/// times by halving every cell.
pub fn hydrogen_spectrum_on(base: &Grid, lambda: f64, n_states: usize, refine_levels: usize) -> Result<HydrogenReport> {
    if !(lambda > 0.0) {
        return Err(domain(format!("lambda must be positive, got {lambda}")));
    }
    if n_states == 0 {
        return Err(domain("need at least one state"));
    }
    let spec = PotentialSpec::coulomb(lambda)?;
    let mut grids = vec![*base];
    for _ in 0..refine_levels {
        let g = grids.last().unwrap().refined();
        grids.push(g);
    }
    let finest = grids.len() - 1;
    let results: Vec<Spectrum> = grids
        .par_iter()
        .enumerate()
        .map(|(lvl, g)| {
            let h = discretize(&spec, g)?;
            if lvl == finest {
                lowest_states(&h, n_states, false)
            } else {
                let b = h.matrix.lowest_brackets(n_states)?;
                Ok(Spectrum {
                    energies: b.iter().map(|b| b.mid()).collect(),
                    node_counts: Vec::new(),
                    bracket_widths: b.iter().map(|b| b.width()).collect(),
                    refinement_estimate: Vec::new(),
                    positions: None,
                    eigenvectors: None,
                })
            }
        })
        .collect::<Result<_>>()?;

    let level_energies: Vec<Vec<f64>> = results.iter().map(|s| s.energies.clone()).collect();
    let mut spectrum = results.into_iter().last().unwrap();
    let mut rows = Vec::with_capacity(n_states);
    for k in 0..n_states {
        let series: Vec<f64> = level_energies.iter().map(|e| e[k]).collect();
        let estimates: Vec<f64> = series.windows(2).map(|w| (w[1] - w[0]).abs() / 3.0).collect();
        let computed = series[finest];
        let extrapolated = if finest >= 1 {
            computed + (computed - series[finest - 1]) / 3.0
        } else {
            f64::NAN
        };
        let balmer = balmer_energy(lambda, k + 1);
        rows.push(BalmerRow {
            n: k + 1,
            computed,
            balmer,
            relative_error: ((computed - balmer) / balmer).abs(),
            extrapolated,
            extrapolated_relative_error: ((extrapolated - balmer) / balmer).abs(),
            error_estimates: estimates.clone(),
            nodes: spectrum.node_counts[k],
        });
        spectrum.refinement_estimate[k] = estimates.last().copied().unwrap_or(f64::NAN);
    }

    // The ground-state estimates must shrink with each doubling.
    if let Some(row) = rows.first() {
        let est = &row.error_estimates;
        if let Some(w) = est.windows(2).find(|w| !(w[1] < w[0])) {
            return Err(Error::Convergence(format!(
                "ground-state Richardson estimates not shrinking: {:e} -> {:e} (all: {:?})",
                w[0], w[1], est
            )));
        }
    }

    Ok(HydrogenReport {
        lambda,
        base_grid: *base,
        level_points: grids.iter().map(|g| g.n).collect(),
        level_energies,
        rows,
        spectrum,
    })
}

// ---------------------------------------------------------------------------
// Cut-off sweep

pub const SWEEP_LENGTH: f64 = 60.0;
pub const SWEEP_POINTS: usize = 65536;

/// ε = 0.2·2⁻ᵏ for k = 0..count.
pub fn default_cutoffs(count: usize) -> Vec<f64> {
    (0..count).map(|k| 0.2 * 0.5f64.powi(k as i32)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub ground_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutoffSweep {
    pub lambda: f64,
    pub length: f64,
    pub points_per_half: usize,
    pub spacing: f64,
    pub rows: Vec<SweepPoint>,
    /// E₀ strictly decreases as ε decreases.
    pub strictly_decreasing: bool,
    /// Full-line check at the first ε: (ε, E₀ on [−L, L]).
    pub full_line_epsilon: f64,
    pub full_line_energy: f64,
    pub full_line_difference: f64,
}

/// Ground-state energy of the ε-capped Coulomb well for each cut-off.
///
/// Solved in the even sector on [0, L] (mirror condition at 0, ψ(L) = 0),
/// with one full-line Dirichlet solve on [−L, L] at the first ε as a check.
pub fn cutoff_sweep(lambda: f64, eps_list: &[f64], length: f64, n: usize) -> Result<CutoffSweep> {
    if !(lambda > 0.0) {
        return Err(domain(format!("lambda must be positive, got {lambda}")));
    }
    if eps_list.is_empty() {
        return Err(domain("empty cut-off list"));
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(domain("cut-off list must be strictly decreasing"));
    }
    let spacing = length / (n as f64 + 0.5);
    if let Some(&bad) = eps_list.iter().find(|&&e| !(e > spacing)) {
        return Err(Error::Resolution { epsilon: bad, spacing });
    }
    let rows: Vec<SweepPoint> = eps_list
        .par_iter()
        .map(|&eps| {
            let spec = PotentialSpec::regularized_coulomb(lambda, eps)?;
            let (t, _) = discretize_even(&spec, length, n)?;
            Ok(SweepPoint {
                epsilon: eps,
                ground_energy: ground_energy(&t)?,
            })
        })
        .collect::<Result<_>>()?;
    let strictly_decreasing = rows.windows(2).all(|w| w[1].ground_energy < w[0].ground_energy);

    let eps0 = eps_list[0];
    let spec = PotentialSpec::regularized_coulomb(lambda, eps0)?;
    let full = Grid::uniform(-length, length, 2 * n + 1)?;
    let full_energy = lowest_eigenvalues(&discretize(&spec, &full)?, 1)?.energies[0];

    Ok(CutoffSweep {
        lambda,
        length,
        points_per_half: n,
        spacing,
        full_line_epsilon: eps0,
        full_line_energy: full_energy,
        full_line_difference: (full_energy - rows[0].ground_energy).abs(),
        rows,
        strictly_decreasing,
    })
}
