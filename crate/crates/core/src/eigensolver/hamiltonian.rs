//! Finite-difference discretization of H = −½ d²/dx² + V on a [`Grid`].

use serde::Serialize;

use super::grid::{Grid, GridKind};
use super::tridiag::SymTridiagonal;
use crate::error::{domain, Error, Result};
use crate::potentials::{classify_domain, PotentialSpec};

/// How the grid coordinate maps onto the physical axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    /// Grid nodes are positions x.
    Direct,
    /// Grid nodes are y = −x (point dipole on a logarithmic grid, x < 0).
    Reflected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteHamiltonian {
    pub matrix: SymTridiagonal,
    pub grid: Grid,
    /// Grid indices of the unknowns, one per matrix row.
    pub unknowns: Vec<usize>,
    pub chart: Chart,
    pub bc_note: String,
}

impl DiscreteHamiltonian {
    pub fn diagonal(&self) -> &[f64] {
        &self.matrix.diagonal
    }

    pub fn offdiagonal(&self) -> &[f64] {
        &self.matrix.offdiagonal
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    /// Physical positions of the unknowns.
    pub fn positions(&self) -> Vec<f64> {
        self.unknowns
            .iter()
            .map(|&i| {
                let g = self.grid.node(i);
                match self.chart {
                    Chart::Direct => g,
                    Chart::Reflected => -g,
                }
            })
            .collect()
    }

    /// Converts a matrix eigenvector to wavefunction samples ψ at [`positions`].
    ///
    /// [`positions`]: DiscreteHamiltonian::positions
    pub fn wavefunction(&self, v: &[f64]) -> Vec<f64> {
        match self.grid.kind {
            GridKind::Uniform => v.to_vec(),
            // the symmetrized log-grid unknown is √x·ψ
            GridKind::Logarithmic => self
                .unknowns
                .iter()
                .zip(v)
                .map(|(&i, c)| c / self.grid.node(i).sqrt())
                .collect(),
        }
    }
}

fn matches_node(grid: &Grid, at: f64) -> Option<usize> {
    let nodes = grid.nodes();
    let idx = nodes.partition_point(|&x| x < at);
    let tol = 1e-9 * (grid.x_max - grid.x_min);
    [idx.checked_sub(1), Some(idx)]
        .into_iter()
        .flatten()
        .filter(|&i| i < nodes.len())
        .find(|&i| (nodes[i] - at).abs() <= tol)
}

/// Assembles the symmetric tridiagonal operator.
///
/// ψ = 0 is imposed at both grid ends and at every interior hard node of the
/// potential, which must then coincide with a grid node. For the point dipole
/// only nodes with x < 0 carry unknowns. On logarithmic grids the operator is
/// written for x = eˢ and symmetrized with the unknown √x·ψ:
/// `H_ii = (1/h² + 1/8)/x_i² + V_i`, `H_i,i+1 = −1/(2h² x_i x_{i+1})`.
pub fn discretize(spec: &PotentialSpec, grid: &Grid) -> Result<DiscreteHamiltonian> {
    spec.validate()?;
    let profile = classify_domain(spec);
    let chart = match (spec, grid.kind) {
        (PotentialSpec::PointDipole { .. }, GridKind::Logarithmic) => Chart::Reflected,
        _ => Chart::Direct,
    };
    if let PotentialSpec::InverseSquare { .. } = spec {
        if grid.x_min < 0.0 {
            return Err(domain("inverse-square grid must lie in y >= 0"));
        }
    }
    let to_x = |g: f64| match chart {
        Chart::Direct => g,
        Chart::Reflected => -g,
    };

    let n = grid.n;
    let mut active = vec![true; n];
    active[0] = false;
    active[n - 1] = false;

    let mut notes = vec![format!("Dirichlet at grid ends {} and {}", grid.x_min, grid.x_max)];
    if chart == Chart::Direct {
        for &h in &profile.hard_nodes {
            if h > grid.x_min && h < grid.x_max {
                let i = matches_node(grid, h).ok_or(Error::Alignment { at: h })?;
                active[i] = false;
                notes.push(format!("Dirichlet hard node at x = {h}"));
            }
        }
    }
    if let PotentialSpec::PointDipole { .. } = spec {
        let mut dropped = 0;
        for (i, a) in active.iter_mut().enumerate() {
            if to_x(grid.node(i)) >= 0.0 && *a {
                *a = false;
                dropped += 1;
            }
        }
        notes.push(match chart {
            Chart::Reflected => "grid coordinate is y = -x; psi = 0 for x > 0".to_string(),
            Chart::Direct => format!("psi = 0 on x >= 0 ({dropped} nodes dropped)"),
        });
    }
    for &s in &profile.singular_points {
        if let Some(i) = (0..n).find(|&i| active[i] && to_x(grid.node(i)) == s) {
            return Err(Error::Singularity { at: to_x(grid.node(i)) });
        }
    }

    let unknowns: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
    if unknowns.is_empty() {
        return Err(domain("no unknowns left after boundary conditions"));
    }

    let mut diagonal = Vec::with_capacity(unknowns.len());
    let mut offdiagonal = Vec::with_capacity(unknowns.len() - 1);
    match grid.kind {
        GridKind::Uniform => {
            let h = grid.step();
            let kin = 1.0 / (h * h);
            for &i in &unknowns {
                diagonal.push(kin + spec.energy_at(to_x(grid.node(i)))?);
            }
            for w in unknowns.windows(2) {
                offdiagonal.push(if w[1] == w[0] + 1 { -0.5 * kin } else { 0.0 });
            }
        }
        GridKind::Logarithmic => {
            let h = grid.step();
            let kin = 1.0 / (h * h);
            for &i in &unknowns {
                let r = grid.node(i);
                diagonal.push((kin + 0.125) / (r * r) + spec.energy_at(to_x(r))?);
            }
            for w in unknowns.windows(2) {
                offdiagonal.push(if w[1] == w[0] + 1 {
                    -0.5 * kin / (grid.node(w[0]) * grid.node(w[1]))
                } else {
                    0.0
                });
            }
            notes.push("log grid x = e^s, symmetrized unknown sqrt(x)*psi".to_string());
        }
    }

    Ok(DiscreteHamiltonian {
        matrix: SymTridiagonal::new(diagonal, offdiagonal)?,
        grid: *grid,
        unknowns,
        chart,
        bc_note: notes.join("; "),
    })
}

/// Even-parity operator on [0, L]: cell-centred nodes x_i = (i+½)h with a
/// mirror condition at the origin (ψ'(0) = 0) and ψ(L) = 0.
pub fn discretize_even(spec: &PotentialSpec, length: f64, n: usize) -> Result<(SymTridiagonal, f64)> {
    if !(length > 0.0) || n < super::grid::MIN_POINTS {
        return Err(domain(format!(
            "even-parity grid needs L > 0 and n >= 16, got L={length}, n={n}"
        )));
    }
    let h = length / (n as f64 + 0.5);
    let kin = 1.0 / (h * h);
    let mut diagonal = Vec::with_capacity(n);
    for i in 0..n {
        let x = (i as f64 + 0.5) * h;
        let k = if i == 0 { 0.5 * kin } else { kin };
        diagonal.push(k + spec.energy_at(x)?);
    }
    let offdiagonal = vec![-0.5 * kin; n - 1];
    Ok((SymTridiagonal::new(diagonal, offdiagonal)?, h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_dipole_keeps_only_negative_side() {
        let spec = PotentialSpec::point_dipole(1.0).unwrap();
        let grid = Grid::uniform(-4.0, 4.0, 33).unwrap();
        let h = discretize(&spec, &grid).unwrap();
        assert!(h.positions().iter().all(|&x| x < 0.0));
        assert_eq!(h.dim(), 15);
        assert!(h.offdiagonal().iter().all(|&e| e < 0.0));

        let log = Grid::logarithmic(1e-3, 10.0, 64).unwrap();
        let h = discretize(&spec, &log).unwrap();
        assert_eq!(h.chart, Chart::Reflected);
        assert!(h.positions().iter().all(|&x| x < 0.0));
    }

    #[test]
    fn hard_node_alignment() {
        let spec = PotentialSpec::coulomb(1.0).unwrap();
        let misaligned = Grid::uniform(-1.0, 2.0, 20).unwrap();
        assert!(matches!(discretize(&spec, &misaligned), Err(Error::Alignment { .. })));
        let aligned = Grid::uniform(-2.0, 2.0, 41).unwrap();
        let h = discretize(&spec, &aligned).unwrap();
        assert_eq!(h.dim(), 38);
        assert_eq!(h.offdiagonal().iter().filter(|&&e| e == 0.0).count(), 1);
    }

    #[test]
    fn inverse_square_must_stay_on_half_line() {
        let spec = PotentialSpec::inverse_square(0.3).unwrap();
        assert!(discretize(&spec, &Grid::uniform(-1.0, 1.0, 33).unwrap()).is_err());
        assert!(discretize(&spec, &Grid::uniform(0.0, 1.0, 33).unwrap()).is_ok());
    }

    #[test]
    fn log_operator_symmetric_entries() {
        let spec = PotentialSpec::coulomb(1.0).unwrap();
        let grid = Grid::logarithmic(1e-5, 200.0, 64).unwrap();
        let h = discretize(&spec, &grid).unwrap();
        assert_eq!(h.dim(), 62);
        assert!(h.offdiagonal().iter().all(|&e| e < 0.0));
        assert!(h.bc_note.contains("log grid"));
    }

    #[test]
    fn even_parity_mirror_row() {
        let spec = PotentialSpec::regularized_coulomb(1.0, 0.1).unwrap();
        let (t, h) = discretize_even(&spec, 10.0, 100).unwrap();
        assert!((t.diagonal[0] - (0.5 / (h * h) - 10.0)).abs() < 1e-9);
        // x₁ = 1.5h lies outside the cut-off
        assert!((t.diagonal[1] - (1.0 / (h * h) - 1.0 / (1.5 * h))).abs() < 1e-9);
    }
}
