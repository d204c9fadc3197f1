//! Seeded invariant checks behind `critdipole selftest`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::critical::{estimate_ratio, p_crit_exact};
use crate::eigensolver::{
    analytic_node_count, discretize, lowest_eigenvalues, zero_energy_node_count, Grid, SymTridiagonal,
};
use crate::frobenius::{indicial_roots, series_coefficients};
use crate::potentials::{eval_potential, PotentialSpec};
use crate::units::{alpha_from_p, dipole_atomic_to_si, dipole_si_to_atomic, ConstantSet};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, worst: f64, limit: f64) -> Check {
    Check {
        name,
        passed: worst <= limit,
        detail: format!("worst {worst:e} vs limit {limit:e}"),
    }
}

/// Dense symmetric eigenvalues, ascending.
pub fn dense_eigenvalues(t: &SymTridiagonal) -> Vec<f64> {
    let n = t.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = t.diagonal[i];
        if i + 1 < n {
            m[(i, i + 1)] = t.offdiagonal[i];
            m[(i + 1, i)] = t.offdiagonal[i];
        }
    }
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn run(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    let worst = (0..1000)
        .map(|_| {
            let a: f64 = rng.gen_range(-5.0..5.0);
            let r = indicial_roots(a);
            let s = (r.nu_plus + r.nu_minus - 1.0).norm();
            let p = (r.nu_plus * r.nu_minus - a).norm();
            s.max(p)
        })
        .fold(0.0, f64::max);
    out.push(check("vieta_identities", worst, 1e-12));

    let pd = PotentialSpec::point_dipole(1.0).unwrap();
    let worst = (0..100)
        .map(|_| {
            let x: f64 = rng.gen_range(1e-3..100.0);
            (eval_potential(&pd, -x).unwrap() + eval_potential(&pd, x).unwrap()).abs()
        })
        .fold(0.0, f64::max);
    out.push(check("point_dipole_odd", worst, 0.0));

    let c = ConstantSet::codata2018();
    let worst = (0..20)
        .map(|k| {
            let p = 10f64.powf(-40.0 + 2.5 * k as f64);
            let back = dipole_atomic_to_si(&c, dipole_si_to_atomic(&c, p));
            ((back - p) / p).abs()
        })
        .fold(0.0, f64::max);
    out.push(check("dipole_round_trip", worst, 1e-12));

    let mut worst_alpha: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..50 {
        let cs = ConstantSet::new(
            10f64.powf(rng.gen_range(-35.0..2.0)),
            10f64.powf(rng.gen_range(-31.0..2.0)),
            10f64.powf(rng.gen_range(-20.0..2.0)),
            10f64.powf(rng.gen_range(-12.0..2.0)),
        )
        .unwrap();
        let a = alpha_from_p(&cs, p_crit_exact(&cs)).unwrap();
        worst_alpha = worst_alpha.max(((a - 0.25) / 0.25).abs());
        worst_ratio = worst_ratio.max((estimate_ratio(&cs) - 16.0).abs());
    }
    out.push(check("alpha_at_p_crit", worst_alpha, 1e-12));
    out.push(check("estimate_ratio_sixteen", worst_ratio, 0.0));

    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(2..=50);
        let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let e: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let t = SymTridiagonal::new(d, e).unwrap();
        let dense = dense_eigenvalues(&t);
        let got = t.lowest_brackets(n).unwrap();
        for (b, r) in got.iter().zip(&dense) {
            worst = worst.max((b.mid() - r).abs());
        }
        let probe = rng.gen_range(-8.0..8.0);
        let below = dense.iter().filter(|&&v| v < probe).count();
        if below != t.sturm_count(probe) {
            worst = f64::INFINITY;
        }
    }
    out.push(check("sturm_vs_dense", worst, 1e-9));

    let free = PotentialSpec::coulomb(0.0).unwrap();
    let g = Grid::uniform(0.0, std::f64::consts::PI, 257).unwrap();
    let s = lowest_eigenvalues(&discretize(&free, &g).unwrap(), 5).unwrap();
    let ok = s.node_counts == vec![0, 1, 2, 3, 4] && s.energies.windows(2).all(|w| w[0] < w[1]);
    out.push(Check {
        name: "node_theorem_box",
        passed: ok,
        detail: format!("nodes {:?}", s.node_counts),
    });

    let mut mismatches = 0;
    for _ in 0..20 {
        let a: f64 = rng.gen_range(0.26..4.0);
        let d = 10f64.powf(rng.gen_range(-10.0..-2.0));
        let l = 10f64.powf(rng.gen_range(0.0..10.0));
        if zero_energy_node_count(a, d, l).ok() != Some(analytic_node_count(a, d, l)) {
            mismatches += 1;
        }
    }
    out.push(check("zero_energy_nodes", mismatches as f64, 0.0));

    let sol = series_coefficients(3.0 / 16.0, 1.0, Complex64::new(0.75, 0.0), 30, Complex64::new(1.0, 0.0)).unwrap();
    let odd = sol.a.iter().skip(1).step_by(2).map(|a| a.norm()).fold(0.0, f64::max);
    let rec = sol.max_recursion_residual();
    out.push(check("series_recursion", odd.max(rec), 0.0));

    out
}
