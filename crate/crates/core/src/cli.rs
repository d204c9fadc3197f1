//! The `critdipole` command line.
//!
//! Every subcommand writes CSV and/or a JSON summary. Numeric inputs are in
//! hartree atomic units unless suffixed with `si`. Exit codes: 0 success,
//! 1 invalid input, 2 numerical failure, 3 inconclusive scan.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::critical::{critical_report, physical_dipole_scan, DEFAULT_WINDOWS};
use crate::eigensolver::{
    cutoff_sweep, default_cutoffs, discretize, hydrogen_grid, hydrogen_spectrum_on, lowest_states, Grid, GridKind,
    DEFAULT_ALPHA_TOL, HYDROGEN_POINTS, SWEEP_LENGTH, SWEEP_POINTS,
};
use crate::error::{domain, Error, Result};
use crate::frobenius::{eval_series, indicial_roots, ode_residual, series_coefficients, DEFAULT_TERMS};
use crate::output::{to_json_string, to_json_value, Cell, Table};
use crate::potentials::{parse_pairs, PotentialSpec};
use crate::units::{alpha_from_p, xi_from_energy, ConstantSet, Dimension};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

/// A number optionally suffixed with `si`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub si: bool,
}

impl FromStr for Quantity {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let t = s.trim();
        let (num, si) = match t.strip_suffix("si").or_else(|| t.strip_suffix("SI")) {
            Some(rest) => (rest, true),
            None => (t, false),
        };
        let value: f64 = num.parse().map_err(|_| format!("malformed number '{s}'"))?;
        if !value.is_finite() {
            return Err(format!("non-finite number '{s}'"));
        }
        Ok(Self { value, si })
    }
}

impl Quantity {
    fn atomic(self, dim: Dimension, c: &ConstantSet) -> f64 {
        if self.si {
            self.value / dim.si_scale(c)
        } else {
            self.value
        }
    }
}

fn parse_domain(s: &str) -> std::result::Result<(Quantity, Quantity), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got '{s}'"))?;
    Ok((a.parse()?, b.parse()?))
}

fn parse_window(w: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = w
        .split_once(':')
        .ok_or_else(|| format!("expected delta:L, got '{w}'"))?;
    let d: f64 = a.trim().parse().map_err(|_| format!("malformed number '{a}'"))?;
    let l: f64 = b.trim().parse().map_err(|_| format!("malformed number '{b}'"))?;
    Ok((d, l))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridArg {
    Uniform,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Coulomb,
    RegularizedCoulomb,
    PointDipole,
    PhysicalDipole,
    InverseSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Root {
    Plus,
    Minus,
}

#[derive(Debug, Parser)]
#[command(name = "critdipole", version, about = "Critical dipole moment in one dimension")]
pub struct Cli {
    /// Output format (default depends on the subcommand).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output path; with `both`, `.csv` and `.json` files are written next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key=value file with constants, potential and grid settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Constant override, e.g. `--const hbar=1.0545718e-34` (SI).
    #[arg(long = "const", global = true, value_name = "KEY=VALUE")]
    pub constants: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Default)]
pub struct PotentialArgs {
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<Quantity>,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<Quantity>,
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<Quantity>,
    #[arg(long = "Q", allow_negative_numbers = true)]
    pub charge: Option<Quantity>,
    #[arg(long, allow_negative_numbers = true)]
    pub d: Option<Quantity>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<Quantity>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest states of any potential.
    Spectrum {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, value_parser = parse_domain, allow_hyphen_values = true)]
        domain: Option<(Quantity, Quantity)>,
        #[arg(long, value_enum)]
        grid: Option<GridArg>,
        #[arg(long, allow_negative_numbers = true)]
        n: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        states: Option<usize>,
    },
    /// Dirichlet hydrogen spectrum against the Balmer formula.
    Hydrogen {
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<Quantity>,
        #[arg(long, default_value_t = 3)]
        states: usize,
        #[arg(long, default_value_t = HYDROGEN_POINTS)]
        n: usize,
        /// Number of grid doublings for Richardson extrapolation.
        #[arg(long, default_value_t = 2)]
        refine: usize,
    },
    /// Ground state of the cut-off Coulomb well for decreasing cut-offs.
    CutoffSweep {
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<Quantity>,
        /// Comma-separated, strictly decreasing cut-offs.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        epsilon: Option<Vec<Quantity>>,
        /// Half-width L of the box [−L, L].
        #[arg(long, allow_negative_numbers = true)]
        length: Option<Quantity>,
        #[arg(long, default_value_t = SWEEP_POINTS)]
        n: usize,
    },
    /// Critical coupling from the zero-energy node criterion.
    CriticalScan {
        #[arg(long, value_parser = parse_window, value_delimiter = ',')]
        windows: Option<Vec<(f64, f64)>>,
        #[arg(long, default_value_t = DEFAULT_ALPHA_TOL)]
        tol_alpha: f64,
    },
    /// Frobenius coefficients and residual table.
    Series {
        #[arg(long, default_value = "0.1875", allow_negative_numbers = true)]
        alpha: Quantity,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        xi: f64,
        #[arg(long, value_enum, default_value_t = Root::Plus)]
        root: Root,
        #[arg(long, default_value_t = DEFAULT_TERMS)]
        terms: usize,
        /// Residual-table range a:b.
        #[arg(long, value_parser = parse_domain, default_value = "0.01:0.5")]
        domain: (Quantity, Quantity),
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
    /// Two-center dipole: critical moment against separation (exploratory).
    DipoleLimit {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        d: Option<Vec<Quantity>>,
        #[arg(long, allow_negative_numbers = true)]
        epsilon: Option<Quantity>,
        /// Symmetric box −L:L.
        #[arg(long, value_parser = parse_domain, allow_hyphen_values = true)]
        domain: Option<(Quantity, Quantity)>,
        #[arg(long, default_value_t = 20001)]
        n: usize,
    },
    /// Unit conversions and the closed-form critical moment.
    Convert {
        /// Print p_crit in SI.
        #[arg(long)]
        pcrit_si: bool,
        #[arg(long, allow_negative_numbers = true)]
        p: Option<Quantity>,
        #[arg(long, allow_hyphen_values = true)]
        energy: Option<Quantity>,
        #[arg(long, allow_negative_numbers = true)]
        length: Option<Quantity>,
    },
    /// Seeded invariant checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Result of one subcommand, before it is written anywhere.
pub struct Rendered {
    pub table: Table,
    pub json: Value,
    pub exit: i32,
    pub default_format: Format,
}

/// Settings read from `--config`.
#[derive(Debug, Default)]
struct ConfigFile {
    potential: BTreeMap<String, String>,
    grid: Option<String>,
    n: Option<String>,
    domain: Option<String>,
    states: Option<String>,
}

fn read_config(path: &Path, constants: &mut ConstantSet) -> Result<ConfigFile> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read config {}: {e}", path.display())))?;
    let mut cfg = ConfigFile::default();
    let body: String = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n");
    for (k, v) in parse_pairs(&body)? {
        match k.as_str() {
            "hbar" | "m_electron" | "q_electron" | "epsilon0" => {
                let x: f64 = v
                    .parse()
                    .map_err(|_| Error::Parse(format!("malformed number for '{k}': '{v}'")))?;
                constants.set(&k, x)?;
            }
            "kind" | "lambda" | "epsilon" | "p" | "Q" | "d" | "alpha" => {
                cfg.potential.insert(k, v);
            }
            "grid" => cfg.grid = Some(v),
            "n" => cfg.n = Some(v),
            "domain" => cfg.domain = Some(v),
            "states" => cfg.states = Some(v),
            other => return Err(Error::Parse(format!("unknown config key '{other}'"))),
        }
    }
    Ok(cfg)
}

fn kind_name(k: Kind) -> &'static str {
    match k {
        Kind::Coulomb => "coulomb",
        Kind::RegularizedCoulomb => "regularized_coulomb",
        Kind::PointDipole => "point_dipole",
        Kind::PhysicalDipole => "physical_dipole",
        Kind::InverseSquare => "inverse_square",
    }
}

fn resolve_potential(args: &PotentialArgs, cfg: &ConfigFile, c: &ConstantSet) -> Result<PotentialSpec> {
    let mut rec = cfg.potential.clone();
    if let Some(k) = args.kind {
        rec.insert("kind".into(), kind_name(k).into());
    }
    let mut put = |key: &str, q: Option<Quantity>, dim: Option<Dimension>, scale_si: Option<f64>| {
        if let Some(q) = q {
            let v = match (q.si, dim, scale_si) {
                (true, _, Some(s)) => q.value / s,
                (true, Some(d), None) => q.value / d.si_scale(c),
                _ => q.value,
            };
            rec.insert(key.into(), v.to_string());
        }
    };
    // λ = Qκ carries energy × length
    put("lambda", args.lambda, None, Some(c.hartree() * c.bohr()));
    put("epsilon", args.epsilon, Some(Dimension::Length), None);
    put("p", args.p, Some(Dimension::DipoleMoment), None);
    put("Q", args.charge, None, Some(c.q_electron));
    put("d", args.d, Some(Dimension::Length), None);
    put("alpha", args.alpha, Some(Dimension::Dimensionless), None);
    if !rec.contains_key("kind") {
        return Err(Error::Parse(
            "no potential given: use --kind or 'kind=' in --config".into(),
        ));
    }
    PotentialSpec::from_record(&rec)
}

fn header(t: &mut Table, cmd: &str, c: &ConstantSet) {
    t.comment(format!("critdipole {cmd}"));
    t.comment(format!(
        "constants: {} fingerprint={:016x}",
        c.provenance_label,
        c.fingerprint()
    ));
}

fn default_spectrum_grid(spec: &PotentialSpec) -> (GridKind, f64, f64, usize) {
    match spec {
        PotentialSpec::Coulomb { lambda } if *lambda > 0.0 => {
            (GridKind::Logarithmic, 1e-5 / lambda, 200.0 / lambda, HYDROGEN_POINTS)
        }
        PotentialSpec::Coulomb { .. } => (GridKind::Uniform, 0.0, std::f64::consts::PI, 1025),
        PotentialSpec::PointDipole { .. } | PotentialSpec::InverseSquare { .. } => {
            (GridKind::Logarithmic, 1e-8, 1e8, HYDROGEN_POINTS)
        }
        _ => (GridKind::Uniform, -SWEEP_LENGTH, SWEEP_LENGTH, 2 * SWEEP_POINTS + 1),
    }
}

fn parse_cfg<T: FromStr>(key: &str, v: &Option<String>) -> Result<Option<T>> {
    v.as_ref()
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::Parse(format!("malformed value for '{key}': '{s}'")))
        })
        .transpose()
}

#[allow(clippy::too_many_arguments)]
fn cmd_spectrum(
    potential: &PotentialArgs,
    domain_arg: Option<(Quantity, Quantity)>,
    grid_arg: Option<GridArg>,
    n_arg: Option<usize>,
    states_arg: Option<usize>,
    cfg: &ConfigFile,
    c: &ConstantSet,
) -> Result<Rendered> {
    let spec = resolve_potential(potential, cfg, c)?;
    let (dk, dlo, dhi, dn) = default_spectrum_grid(&spec);
    let kind = match grid_arg {
        Some(GridArg::Uniform) => GridKind::Uniform,
        Some(GridArg::Log) => GridKind::Logarithmic,
        None => match cfg.grid.as_deref() {
            Some("uniform") => GridKind::Uniform,
            Some("log") => GridKind::Logarithmic,
            Some(other) => return Err(Error::Parse(format!("unknown grid '{other}'"))),
            None => dk,
        },
    };
    let (lo, hi) = match domain_arg {
        Some((a, b)) => (a.atomic(Dimension::Length, c), b.atomic(Dimension::Length, c)),
        None => match &cfg.domain {
            Some(s) => {
                let (a, b) = parse_domain(s).map_err(Error::Parse)?;
                (a.atomic(Dimension::Length, c), b.atomic(Dimension::Length, c))
            }
            None => (dlo, dhi),
        },
    };
    let n = n_arg.or(parse_cfg("n", &cfg.n)?).unwrap_or(dn);
    let states = states_arg.or(parse_cfg("states", &cfg.states)?).unwrap_or(3);
    let grid = Grid::new(kind, lo, hi, n)?;
    let h = discretize(&spec, &grid)?;
    if states == 0 || states > h.dim() {
        return Err(domain(format!("states must be in 1..={}, got {states}", h.dim())));
    }
    let s = lowest_states(&h, states, false)?;

    let mut t = Table::new(&["state", "energy", "nodes", "bracket_width"]);
    header(&mut t, "spectrum", c);
    t.comment(format!("potential: {spec}"));
    t.comment(format!(
        "grid: {:?} [{}, {}] n={} unknowns={}",
        grid.kind,
        grid.x_min,
        grid.x_max,
        grid.n,
        h.dim()
    ));
    t.comment(format!("boundary: {}", h.bc_note));
    for k in 0..states {
        t.push(vec![
            Cell::from(k),
            Cell::from(s.energies[k]),
            Cell::from(s.node_counts[k]),
            Cell::from(s.bracket_widths[k]),
        ]);
    }
    let json = json!({
        "command": "spectrum",
        "potential": to_json_value(&spec)?,
        "grid": to_json_value(&grid)?,
        "unknowns": h.dim(),
        "boundary": h.bc_note,
        "spectrum": to_json_value(&s)?,
    });
    Ok(Rendered {
        table: t,
        json,
        exit: EXIT_OK,
        default_format: Format::Csv,
    })
}

fn cmd_hydrogen(lambda: Option<Quantity>, states: usize, n: usize, refine: usize, c: &ConstantSet) -> Result<Rendered> {
    let lambda = lambda.map_or(1.0, |q| {
        if q.si {
            q.value / (c.hartree() * c.bohr())
        } else {
            q.value
        }
    });
    let grid = hydrogen_grid(lambda, n)?;
    let r = hydrogen_spectrum_on(&grid, lambda, states, refine)?;
    let mut t = Table::new(&[
        "n",
        "computed",
        "balmer",
        "relative_error",
        "extrapolated",
        "extrapolated_relative_error",
        "richardson_estimate",
        "nodes",
    ]);
    header(&mut t, "hydrogen", c);
    t.comment(format!("lambda: {lambda}"));
    t.comment(format!(
        "grid: log ({}, {}] levels n={:?}",
        grid.x_min, grid.x_max, r.level_points
    ));
    t.comment("boundary: psi = 0 at the inner grid end (origin) and at x_max");
    for row in &r.rows {
        t.push(vec![
            Cell::from(row.n),
            Cell::from(row.computed),
            Cell::from(row.balmer),
            Cell::from(row.relative_error),
            Cell::from(row.extrapolated),
            Cell::from(row.extrapolated_relative_error),
            Cell::from(row.error_estimates.last().copied().unwrap_or(f64::NAN)),
            Cell::from(row.nodes),
        ]);
    }
    let json = json!({
        "command": "hydrogen",
        "lambda": to_json_value(&lambda)?,
        "levels": r.level_points,
        "level_energies": to_json_value(&r.level_energies)?,
        "rows": to_json_value(&r.rows)?,
        "diagnostics": {
            "ground_state_estimates": to_json_value(&r.rows[0].error_estimates)?,
            "bracket_widths": to_json_value(&r.spectrum.bracket_widths)?,
        },
    });
    Ok(Rendered {
        table: t,
        json,
        exit: EXIT_OK,
        default_format: Format::Csv,
    })
}

fn cmd_cutoff(
    lambda: Option<Quantity>,
    eps: &Option<Vec<Quantity>>,
    length: Option<Quantity>,
    n: usize,
    c: &ConstantSet,
) -> Result<Rendered> {
    let lambda = lambda.map_or(1.0, |q| {
        if q.si {
            q.value / (c.hartree() * c.bohr())
        } else {
            q.value
        }
    });
    let eps_list: Vec<f64> = match eps {
        Some(v) => v.iter().map(|q| q.atomic(Dimension::Length, c)).collect(),
        None => default_cutoffs(5),
    };
    let length = length.map_or(SWEEP_LENGTH, |q| q.atomic(Dimension::Length, c));
    let s = cutoff_sweep(lambda, &eps_list, length, n)?;
    let mut t = Table::new(&["epsilon", "ground_energy"]);
    header(&mut t, "cutoff-sweep", c);
    t.comment(format!("lambda: {lambda}"));
    t.comment(format!(
        "grid: even parity, cell-centred on [0, {length}] n={n} h={}",
        s.spacing
    ));
    t.comment(format!("strictly_decreasing: {}", s.strictly_decreasing));
    t.comment(format!(
        "full-line check at epsilon={}: E0={} (difference {:e})",
        s.full_line_epsilon, s.full_line_energy, s.full_line_difference
    ));
    for r in &s.rows {
        t.push(vec![Cell::from(r.epsilon), Cell::from(r.ground_energy)]);
    }
    let json = json!({
        "command": "cutoff-sweep",
        "sweep": to_json_value(&s)?,
    });
    Ok(Rendered {
        table: t,
        json,
        exit: EXIT_OK,
        default_format: Format::Csv,
    })
}

fn cmd_critical(windows: &Option<Vec<(f64, f64)>>, tol: f64, c: &ConstantSet) -> Result<Rendered> {
    let windows = windows.clone().unwrap_or_else(|| DEFAULT_WINDOWS.to_vec());
    let report = critical_report(c, &windows, tol)?;
    let mut t = Table::new(&[
        "delta",
        "length",
        "log_span",
        "alpha",
        "half_width",
        "predicted_threshold",
    ]);
    header(&mut t, "critical-scan", c);
    t.comment(format!(
        "alpha_crit extrapolated: {} +/- {}",
        report.alpha_crit_numeric, report.alpha_crit_error
    ));
    for w in &report.window_metadata {
        t.push(vec![
            Cell::from(w.delta),
            Cell::from(w.length),
            Cell::from(w.log_span),
            Cell::from(w.alpha),
            Cell::from(w.half_width),
            Cell::from(w.predicted_threshold),
        ]);
    }
    let json = json!({
        "command": "critical-scan",
        "report": to_json_value(&report)?,
    });
    Ok(Rendered {
        table: t,
        json,
        exit: EXIT_OK,
        default_format: Format::Json,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_series(
    alpha: Quantity,
    xi: f64,
    root: Root,
    terms: usize,
    range: (Quantity, Quantity),
    n: usize,
    c: &ConstantSet,
) -> Result<Rendered> {
    let alpha = alpha.value;
    let roots = indicial_roots(alpha);
    let nu = match root {
        Root::Plus => roots.nu_plus,
        Root::Minus => roots.nu_minus,
    };
    let s = series_coefficients(alpha, xi, nu, terms, Complex64::new(1.0, 0.0))?;
    let (y0, y1) = (range.0.value, range.1.value);
    if !(y0 > 0.0 && y1 > y0) || n < 2 {
        return Err(domain("residual table needs 0 < a < b and n >= 2"));
    }
    let mut t = Table::new(&["table", "key", "re", "im", "ode_residual", "tail_estimate"]);
    header(&mut t, "series", c);
    t.comment(format!("alpha={alpha} xi={xi} nu={}{:+}i terms={terms}", nu.re, nu.im));
    for (j, a) in s.a.iter().enumerate() {
        t.push(vec![
            Cell::from("coefficient"),
            Cell::from(j),
            Cell::from(a.re),
            Cell::from(a.im),
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    let mut residual_rows = Vec::new();
    for i in 0..n {
        let y = y0 + (y1 - y0) * i as f64 / (n - 1) as f64;
        let psi = eval_series(&s, y)?;
        let r = ode_residual(&s, y)?;
        let tail = s.tail_estimate(y);
        t.push(vec![
            Cell::from("residual"),
            Cell::from(y),
            Cell::from(psi.re),
            Cell::from(psi.im),
            Cell::from(r),
            Cell::from(tail),
        ]);
        residual_rows.push(json!({"y": y, "re": psi.re, "im": psi.im, "ode_residual": r, "tail_estimate": tail}));
    }
    let recursion_max = s.max_recursion_residual();
    let coeffs: Vec<[f64; 2]> = s.a.iter().map(|a| [a.re, a.im]).collect();
    let mut json = json!({
        "command": "series",
        "alpha": alpha,
        "xi": xi,
        "nu": [nu.re, nu.im],
        "coefficients": coeffs,
        "residuals": residual_rows,
        "max_recursion_residual": recursion_max,
    });
    json = to_json_value(&json)?;
    Ok(Rendered {
        table: t,
        json,
        exit: EXIT_OK,
        default_format: Format::Csv,
    })
}

fn cmd_dipole(
    d: &Option<Vec<Quantity>>,
    epsilon: Option<Quantity>,
    domain_arg: Option<(Quantity, Quantity)>,
    n: usize,
    c: &ConstantSet,
) -> Result<Rendered> {
    let d_list: Vec<f64> = match d {
        Some(v) => v.iter().map(|q| q.atomic(Dimension::Length, c)).collect(),
        None => vec![1.0, 0.5, 0.25, 0.125],
    };
    let epsilon = epsilon.map_or(0.01, |q| q.atomic(Dimension::Length, c));
    let half = match domain_arg {
        Some((a, b)) => {
            let (a, b) = (a.atomic(Dimension::Length, c), b.atomic(Dimension::Length, c));
            if a != -b || !(b > 0.0) {
                return Err(domain("dipole-limit needs a symmetric domain -L:L"));
            }
            b
        }
        None => 50.0,
    };
    let scan = physical_dipole_scan(&d_list, epsilon, half, n)?;
    let mut t = Table::new(&["d", "epsilon", "p_crit", "half_width", "status"]);
    header(&mut t, "dipole-limit", c);
    t.comment("EXPLORATORY: box- and cut-off-dependent, not an acceptance quantity");
    t.comment(format!("box: [-{half}, {half}] n={n}"));
    t.comment(format!("spread max/min: {}", scan.spread));
    for r in &scan.rows {
        t.push(vec![
            Cell::from(r.d),
            Cell::from(r.epsilon),
            Cell::from(r.p_crit),
            Cell::from(r.half_width),
            Cell::from(if r.conclusive { "ok" } else { "inconclusive" }),
        ]);
    }
    t.comment(scan.footer.clone());
    let exit = if scan.any_inconclusive() {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    };
    let json = json!({
        "command": "dipole-limit",
        "scan": to_json_value(&scan)?,
    });
    Ok(Rendered {
        table: t,
        json,
        exit,
        default_format: Format::Csv,
    })
}

fn cmd_convert(
    pcrit_si: bool,
    p: Option<Quantity>,
    energy: Option<Quantity>,
    length: Option<Quantity>,
    c: &ConstantSet,
) -> Result<Rendered> {
    if !pcrit_si && p.is_none() && energy.is_none() && length.is_none() {
        return Err(domain("convert needs --pcrit-si, --p, --energy or --length"));
    }
    let mut t = Table::new(&["quantity", "value_au", "value_si", "si_unit"]);
    header(&mut t, "convert", c);
    let mut rows = Vec::new();
    let mut add = |name: &str, au: f64, dim: Dimension| {
        let si = au * dim.si_scale(c);
        t.push(vec![
            Cell::from(name),
            Cell::from(au),
            Cell::from(si),
            Cell::from(dim.si_unit()),
        ]);
        rows.push(json!({"quantity": name, "value_au": au, "value_si": si, "si_unit": dim.si_unit()}));
    };
    if pcrit_si {
        let p = crate::critical::p_crit_exact(c);
        add("p_crit", p / c.dipole_unit(), Dimension::DipoleMoment);
    }
    if let Some(q) = p {
        let au = q.atomic(Dimension::DipoleMoment, c);
        add("p", au, Dimension::DipoleMoment);
        add(
            "alpha",
            alpha_from_p(&ConstantSet::atomic(), au)?,
            Dimension::Dimensionless,
        );
    }
    if let Some(q) = energy {
        let au = q.atomic(Dimension::Energy, c);
        add("energy", au, Dimension::Energy);
        add(
            "xi",
            xi_from_energy(&ConstantSet::atomic(), au),
            Dimension::InverseLengthSq,
        );
    }
    if let Some(q) = length {
        add("length", q.atomic(Dimension::Length, c), Dimension::Length);
    }
    let json = to_json_value(&json!({"command": "convert", "rows": rows}))?;
    Ok(Rendered {
        table: t,
        json,
        exit: EXIT_OK,
        default_format: Format::Csv,
    })
}

fn cmd_selftest(seed: u64, c: &ConstantSet) -> Result<Rendered> {
    let checks = crate::selftest::run(seed);
    let mut t = Table::new(&["check", "passed", "detail"]);
    header(&mut t, "selftest", c);
    t.comment(format!("seed: {seed}"));
    for ch in &checks {
        t.push(vec![
            Cell::from(ch.name),
            Cell::from(ch.passed),
            Cell::from(ch.detail.as_str()),
        ]);
    }
    let all = checks.iter().all(|c| c.passed);
    let json = json!({"command": "selftest", "seed": seed, "passed": all, "checks": to_json_value(&checks)?});
    Ok(Rendered {
        table: t,
        json,
        exit: if all { EXIT_OK } else { EXIT_NUMERICAL },
        default_format: Format::Csv,
    })
}

/// Runs a parsed command line and returns what it would write.
pub fn execute(cli: &Cli) -> Result<Rendered> {
    let mut constants = ConstantSet::codata2018();
    let cfg = match &cli.config {
        Some(path) => read_config(path, &mut constants)?,
        None => ConfigFile::default(),
    };
    for kv in &cli.constants {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got '{kv}'")))?;
        let x: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("malformed number for '{k}': '{v}'")))?;
        constants.set(k.trim(), x)?;
    }
    let c = &constants;
    match &cli.command {
        Command::Spectrum {
            potential,
            domain,
            grid,
            n,
            states,
        } => cmd_spectrum(potential, *domain, *grid, *n, *states, &cfg, c),
        Command::Hydrogen {
            lambda,
            states,
            n,
            refine,
        } => cmd_hydrogen(*lambda, *states, *n, *refine, c),
        Command::CutoffSweep {
            lambda,
            epsilon,
            length,
            n,
        } => cmd_cutoff(*lambda, epsilon, *length, *n, c),
        Command::CriticalScan { windows, tol_alpha } => cmd_critical(windows, *tol_alpha, c),
        Command::Series {
            alpha,
            xi,
            root,
            terms,
            domain,
            n,
        } => cmd_series(*alpha, *xi, *root, *terms, *domain, *n, c),
        Command::DipoleLimit { d, epsilon, domain, n } => cmd_dipole(d, *epsilon, *domain, *n, c),
        Command::Convert {
            pcrit_si,
            p,
            energy,
            length,
        } => cmd_convert(*pcrit_si, *p, *energy, *length, c),
        Command::Selftest { seed } => cmd_selftest(*seed, c),
    }
}

fn write_outputs(cli: &Cli, r: &Rendered) -> std::io::Result<()> {
    let format = cli.format.unwrap_or(r.default_format);
    let csv = || r.table.to_csv();
    let json = || to_json_string(&r.json);
    match (&cli.out, format) {
        (None, Format::Csv) => print!("{}", csv()),
        (None, Format::Json) => print!("{}", json()),
        (None, Format::Both) => print!("{}\n{}", csv(), json()),
        (Some(p), Format::Csv) => fs::write(p, csv())?,
        (Some(p), Format::Json) => fs::write(p, json())?,
        (Some(p), Format::Both) => {
            fs::write(p.with_extension("csv"), csv())?;
            fs::write(p.with_extension("json"), json())?;
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Bracket(_) => EXIT_INCONCLUSIVE,
        e if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_INVALID,
    }
}

fn report_error(code: &str, msg: &str) {
    let one_line = msg.split_whitespace().collect::<Vec<_>>().join(" ");
    eprintln!("critdipole: error[{code}]: {one_line}");
}

/// Entry point for the binary; `argv[0]` is the program name.
pub fn run<S: AsRef<str>>(argv: &[S]) -> i32 {
    let cli = match Cli::try_parse_from(argv.iter().map(|s| s.as_ref())) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("invalid arguments");
            report_error("usage", first.trim_start_matches("error: "));
            return EXIT_INVALID;
        }
    };
    match execute(&cli) {
        Ok(r) => match write_outputs(&cli, &r) {
            Ok(()) => r.exit,
            Err(e) => {
                report_error("io", &e.to_string());
                EXIT_INVALID
            }
        },
        Err(e) => {
            report_error(e.code(), &e.to_string());
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantity_suffix() {
        assert_eq!("1.5".parse::<Quantity>().unwrap(), Quantity { value: 1.5, si: false });
        assert_eq!(
            "1.052e-30si".parse::<Quantity>().unwrap(),
            Quantity {
                value: 1.052e-30,
                si: true
            }
        );
        assert!("abc".parse::<Quantity>().is_err());
        assert!("inf".parse::<Quantity>().is_err());
    }

    #[test]
    fn windows_parse() {
        let cli = Cli::try_parse_from(["critdipole", "critical-scan", "--windows", "1e-8:1e8,1e-10:1e10"]).unwrap();
        match cli.command {
            Command::CriticalScan { windows, .. } => assert_eq!(windows.unwrap(), vec![(1e-8, 1e8), (1e-10, 1e10)]),
            _ => unreachable!(),
        }
        assert!(parse_window("1e-8").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(&["critdipole", "hydrogen", "--bogus"]), EXIT_INVALID);
        assert_eq!(run(&["critdipole", "hydrogen", "--lambda", "x"]), EXIT_INVALID);
        assert_eq!(run(&["critdipole", "hydrogen", "--lambda", "-1"]), EXIT_INVALID);
        assert_eq!(run(&["critdipole", "spectrum"]), EXIT_INVALID);
        assert_eq!(run(&["critdipole", "convert"]), EXIT_INVALID);
    }

    #[test]
    fn narrow_window_is_inconclusive() {
        assert_eq!(
            run(&[
                "critdipole",
                "critical-scan",
                "--windows",
                "1:10,1:20",
                "--out",
                "/dev/null"
            ]),
            EXIT_INCONCLUSIVE
        );
    }

    #[test]
    fn si_suffix_converts_dipole() {
        let cli = Cli::try_parse_from(["critdipole", "convert", "--p", "1.052e-30si"]).unwrap();
        let r = execute(&cli).unwrap();
        let csv = r.table.to_csv();
        let alpha_row = csv.lines().find(|l| l.starts_with("alpha,")).unwrap();
        let alpha: f64 = alpha_row.split(',').nth(1).unwrap().parse().unwrap();
        assert!((alpha - 0.25).abs() < 0.0025, "{alpha}");
    }
}
