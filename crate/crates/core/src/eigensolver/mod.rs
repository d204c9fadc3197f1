//! Discretized spectra of −½ d²/dx² + V and the inverse-square critical
//! coupling.

mod grid;
mod hamiltonian;
mod inverse_square;
mod spectrum;
mod tridiag;

pub use grid::{Grid, GridKind, MIN_POINTS};
pub use hamiltonian::{discretize, discretize_even, Chart, DiscreteHamiltonian};
pub use inverse_square::{
    analytic_node_count, find_alpha_crit, window_threshold, zero_energy_node_count, AlphaCritEstimate, ALPHA_BRACKET,
    DEFAULT_ALPHA_TOL,
};
pub use spectrum::{
    balmer_energy, cutoff_sweep, default_cutoffs, hydrogen_grid, hydrogen_spectrum, hydrogen_spectrum_on,
    lowest_eigenvalues, lowest_states, BalmerRow, CutoffSweep, HydrogenReport, Spectrum, SweepPoint, HYDROGEN_POINTS,
    HYDROGEN_X_MAX, HYDROGEN_X_MIN, SWEEP_LENGTH, SWEEP_POINTS,
};
pub use tridiag::{count_sign_changes, Bracket, SymTridiagonal, BRACKET_WIDTH, MAX_BISECTIONS};
