//! The five potential families, their evaluation and their sign/singularity
//! structure. All parameters are in hartree atomic units, where the Coulomb
//! prefactor κ = q/(4πε₀) is 1.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    /// −λ/|x|. λ = 0 is accepted as the free particle.
    Coulomb { lambda: f64 },
    /// −λ/ε for |x| ≤ ε, −λ/|x| outside.
    RegularizedCoulomb { lambda: f64, epsilon: f64 },
    /// p/(x|x|): attractive for x < 0, repulsive for x > 0.
    PointDipole { p: f64 },
    /// Two opposite charges ±Q a distance d apart, each capped at radius ε.
    PhysicalDipole {
        #[serde(rename = "Q")]
        charge: f64,
        d: f64,
        epsilon: f64,
    },
    /// −α/y² on y > 0, in the reduced form where the kinetic operator is −d²/dy².
    InverseSquare { alpha: f64 },
}

/// Open interval; endpoints may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }
}

/// Where a potential is singular, where ψ is pinned to zero, and where it
/// attracts or repels.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DomainProfile {
    pub singular_points: Vec<f64>,
    pub hard_nodes: Vec<f64>,
    pub attractive_regions: Vec<Interval>,
    pub repulsive_regions: Vec<Interval>,
    /// Regions where the potential vanishes identically.
    pub flat_regions: Vec<Interval>,
    /// Lower end of the physical domain (0 for the reduced inverse-square form).
    pub domain_lo: f64,
}

const INF: f64 = f64::INFINITY;

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite and positive, got {v}")))
    }
}

impl PotentialSpec {
    pub fn coulomb(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(domain(format!("lambda must be finite and non-negative, got {lambda}")));
        }
        Ok(Self::Coulomb { lambda })
    }

    pub fn regularized_coulomb(lambda: f64, epsilon: f64) -> Result<Self> {
        positive("lambda", lambda)?;
        positive("epsilon", epsilon)?;
        Ok(Self::RegularizedCoulomb { lambda, epsilon })
    }

    pub fn point_dipole(p: f64) -> Result<Self> {
        positive("p", p)?;
        Ok(Self::PointDipole { p })
    }

    pub fn inverse_square(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(domain("alpha must be finite"));
        }
        Ok(Self::InverseSquare { alpha })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Coulomb { lambda } => Self::coulomb(lambda).map(drop),
            Self::RegularizedCoulomb { lambda, epsilon } => Self::regularized_coulomb(lambda, epsilon).map(drop),
            Self::PointDipole { p } => Self::point_dipole(p).map(drop),
            Self::PhysicalDipole { charge, d, epsilon } => make_physical_dipole(charge, d, epsilon).map(drop),
            Self::InverseSquare { alpha } => Self::inverse_square(alpha).map(drop),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Coulomb { .. } => "coulomb",
            Self::RegularizedCoulomb { .. } => "regularized_coulomb",
            Self::PointDipole { .. } => "point_dipole",
            Self::PhysicalDipole { .. } => "physical_dipole",
            Self::InverseSquare { .. } => "inverse_square",
        }
    }

    /// Potential energy in hartree for the −½ d²/dx² kinetic normalization.
    ///
    /// Identical to [`eval_potential`] except for `InverseSquare`, whose
    /// reduced form carries the factor 2m/ħ² = 2.
    pub fn energy_at(&self, x: f64) -> Result<f64> {
        let v = eval_potential(self, x)?;
        Ok(match self {
            Self::InverseSquare { .. } => 0.5 * v,
            _ => v,
        })
    }

    /// Flat `key=value` record, keys in a fixed order.
    pub fn to_record(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![("kind", self.kind().to_string())];
        match *self {
            Self::Coulomb { lambda } => out.push(("lambda", lambda.to_string())),
            Self::RegularizedCoulomb { lambda, epsilon } => {
                out.push(("lambda", lambda.to_string()));
                out.push(("epsilon", epsilon.to_string()));
            }
            Self::PointDipole { p } => out.push(("p", p.to_string())),
            Self::PhysicalDipole { charge, d, epsilon } => {
                out.push(("Q", charge.to_string()));
                out.push(("d", d.to_string()));
                out.push(("epsilon", epsilon.to_string()));
            }
            Self::InverseSquare { alpha } => out.push(("alpha", alpha.to_string())),
        }
        out
    }

    pub fn to_record_string(&self) -> String {
        self.to_record()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Builds a spec from a parsed record. Unknown keys are rejected.
    pub fn from_record(rec: &BTreeMap<String, String>) -> Result<Self> {
        let kind = rec
            .get("kind")
            .ok_or_else(|| Error::Parse("potential record lacks 'kind'".into()))?;
        let allowed: &[&str] = match kind.as_str() {
            "coulomb" => &["kind", "lambda"],
            "regularized_coulomb" => &["kind", "lambda", "epsilon"],
            "point_dipole" => &["kind", "p"],
            "physical_dipole" => &["kind", "Q", "d", "epsilon"],
            "inverse_square" => &["kind", "alpha"],
            other => return Err(Error::Parse(format!("unknown potential kind '{other}'"))),
        };
        if let Some(k) = rec.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::Parse(format!("key '{k}' not valid for kind '{kind}'")));
        }
        let num = |key: &str| -> Result<f64> {
            let raw = rec
                .get(key)
                .ok_or_else(|| Error::Parse(format!("kind '{kind}' requires '{key}'")))?;
            raw.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("malformed number for '{key}': '{raw}'")))
        };
        match kind.as_str() {
            "coulomb" => Self::coulomb(num("lambda")?),
            "regularized_coulomb" => Self::regularized_coulomb(num("lambda")?, num("epsilon")?),
            "point_dipole" => Self::point_dipole(num("p")?),
            "physical_dipole" => make_physical_dipole(num("Q")?, num("d")?, num("epsilon")?),
            _ => Self::inverse_square(num("alpha")?),
        }
    }

    /// Parses `key=value` pairs separated by whitespace, commas or newlines.
    pub fn parse_record(text: &str) -> Result<Self> {
        Self::from_record(&parse_pairs(text)?)
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_record_string())
    }
}

pub(crate) fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut rec = BTreeMap::new();
    for tok in text.split(|c: char| c.is_whitespace() || c == ',') {
        if tok.is_empty() {
            continue;
        }
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got '{tok}'")))?;
        if rec.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::Parse(format!("duplicate key '{k}'")));
        }
    }
    Ok(rec)
}

/// Two-center dipole κQ·[1/max(|x−d/2|, ε) − 1/max(|x+d/2|, ε)].
///
/// The negative end sits at +d/2, so the far field matches the point-dipole
/// sign convention with p = Qd.
pub fn make_physical_dipole(charge: f64, d: f64, epsilon: f64) -> Result<PotentialSpec> {
    positive("Q", charge)?;
    positive("d", d)?;
    positive("epsilon", epsilon)?;
    Ok(PotentialSpec::PhysicalDipole { charge, d, epsilon })
}

/// Evaluates the potential at `x` (for `InverseSquare`, `x` is the reduced
/// coordinate y > 0).
pub fn eval_potential(spec: &PotentialSpec, x: f64) -> Result<f64> {
    match *spec {
        PotentialSpec::Coulomb { lambda } => {
            if lambda == 0.0 {
                Ok(0.0)
            } else if x == 0.0 {
                Err(Error::Singularity { at: 0.0 })
            } else {
                Ok(-lambda / x.abs())
            }
        }
        PotentialSpec::RegularizedCoulomb { lambda, epsilon } => Ok(-lambda / x.abs().max(epsilon)),
        PotentialSpec::PointDipole { p } => {
            if x == 0.0 {
                Err(Error::Singularity { at: 0.0 })
            } else {
                Ok(p / (x * x.abs()))
            }
        }
        PotentialSpec::PhysicalDipole { charge, d, epsilon } => {
            let half = 0.5 * d;
            let near_negative = (x - half).abs().max(epsilon);
            let near_positive = (x + half).abs().max(epsilon);
            Ok(charge * (1.0 / near_negative - 1.0 / near_positive))
        }
        PotentialSpec::InverseSquare { alpha } => {
            if x == 0.0 {
                Err(Error::Singularity { at: 0.0 })
            } else if x < 0.0 {
                Err(domain(format!("inverse-square form is defined for y > 0, got {x}")))
            } else {
                Ok(-alpha / (x * x))
            }
        }
    }
}

/// Singular points, Dirichlet nodes and sign regions of `spec`.
///
/// Every Coulomb-type or stronger singularity is a hard node (ψ = 0 there).
pub fn classify_domain(spec: &PotentialSpec) -> DomainProfile {
    let whole = Interval::new(-INF, INF);
    let left = Interval::new(-INF, 0.0);
    let right = Interval::new(0.0, INF);
    let mut prof = DomainProfile {
        domain_lo: -INF,
        ..Default::default()
    };
    match *spec {
        PotentialSpec::Coulomb { lambda } => {
            if lambda == 0.0 {
                prof.flat_regions = vec![whole];
            } else {
                prof.singular_points = vec![0.0];
                prof.hard_nodes = vec![0.0];
                prof.attractive_regions = vec![left, right];
            }
        }
        PotentialSpec::RegularizedCoulomb { .. } => {
            prof.attractive_regions = vec![whole];
        }
        PotentialSpec::PointDipole { .. } => {
            prof.singular_points = vec![0.0];
            prof.hard_nodes = vec![0.0];
            prof.attractive_regions = vec![left];
            prof.repulsive_regions = vec![right];
        }
        PotentialSpec::PhysicalDipole { d, epsilon, .. } => {
            // Both caps overlap around the origin when d < 2ε, leaving V = 0 there.
            let w = (epsilon - 0.5 * d).max(0.0);
            prof.attractive_regions = vec![Interval::new(-INF, -w)];
            prof.repulsive_regions = vec![Interval::new(w, INF)];
            if w > 0.0 {
                prof.flat_regions = vec![Interval::new(-w, w)];
            }
        }
        PotentialSpec::InverseSquare { alpha } => {
            prof.domain_lo = 0.0;
            prof.singular_points = vec![0.0];
            prof.hard_nodes = vec![0.0];
            if alpha > 0.0 {
                prof.attractive_regions = vec![right];
            } else if alpha < 0.0 {
                prof.repulsive_regions = vec![right];
            } else {
                prof.flat_regions = vec![right];
            }
        }
    }
    prof
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn point_dipole_values() {
        let s = PotentialSpec::point_dipole(1.0).unwrap();
        assert_eq!(eval_potential(&s, -2.0).unwrap(), -0.25);
        assert_eq!(eval_potential(&s, 2.0).unwrap(), 0.25);
        assert_eq!(eval_potential(&s, 0.0), Err(Error::Singularity { at: 0.0 }));
    }

    #[test]
    fn regularized_coulomb_branches() {
        let s = PotentialSpec::regularized_coulomb(1.0, 0.1).unwrap();
        assert!((eval_potential(&s, 0.05).unwrap() + 10.0).abs() < 1e-12);
        assert!((eval_potential(&s, 0.2).unwrap() + 5.0).abs() < 1e-12);
        assert!((eval_potential(&s, 0.0).unwrap() + 10.0).abs() < 1e-12);
    }

    #[test]
    fn regularized_coulomb_continuous_at_cutoff() {
        for &eps in &[0.2, 0.1, 0.05, 0.0125, 1.0 / 3.0] {
            let s = PotentialSpec::regularized_coulomb(1.3, eps).unwrap();
            let inner = eval_potential(&s, eps * (1.0 - 1e-16)).unwrap();
            let at = eval_potential(&s, eps).unwrap();
            let outer_limit = -1.3 / eps;
            assert_eq!(at, outer_limit);
            assert_eq!(inner, -1.3 / eps);
        }
    }

    #[test]
    fn coulomb_singular_at_origin() {
        let s = PotentialSpec::coulomb(1.0).unwrap();
        assert!(matches!(eval_potential(&s, 0.0), Err(Error::Singularity { .. })));
        assert_eq!(eval_potential(&s, -4.0).unwrap(), -0.25);
        let free = PotentialSpec::coulomb(0.0).unwrap();
        assert_eq!(eval_potential(&free, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn inverse_square_reduced_form() {
        let s = PotentialSpec::inverse_square(0.5).unwrap();
        assert_eq!(eval_potential(&s, 2.0).unwrap(), -0.125);
        assert_eq!(s.energy_at(2.0).unwrap(), -0.0625);
        assert!(matches!(eval_potential(&s, -1.0), Err(Error::Domain(_))));
        assert!(matches!(eval_potential(&s, 0.0), Err(Error::Singularity { .. })));
    }

    #[test]
    fn physical_dipole_far_field() {
        let s = make_physical_dipole(1.0, 0.01, 1e-6).unwrap();
        let v = eval_potential(&s, -2.0).unwrap();
        assert!((v + 0.0025).abs() < 2e-5, "{v}");
        // exact two-center value -0.01 / (2.005 * 1.995)
        assert!((v + 0.01 / (2.005 * 1.995)).abs() < 1e-15);
    }

    #[test]
    fn physical_dipole_vanishes_at_origin() {
        let s = make_physical_dipole(1.0, 1.0, 1e-3).unwrap();
        assert_eq!(eval_potential(&s, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn physical_dipole_converges_at_second_order() {
        let p = 0.4;
        let sup = |d: f64| {
            let phys = make_physical_dipole(p / d, d, 1e-9).unwrap();
            let pd = PotentialSpec::point_dipole(p).unwrap();
            (0..=900)
                .flat_map(|i| {
                    let r = 1.0 + 0.01 * i as f64;
                    [r, -r]
                })
                .map(|x| (eval_potential(&phys, x).unwrap() - eval_potential(&pd, x).unwrap()).abs())
                .fold(0.0, f64::max)
        };
        let mut prev = sup(0.2);
        for k in 1..5 {
            let cur = sup(0.2 / 2f64.powi(k));
            let ratio = prev / cur;
            assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio} at level {k}");
            prev = cur;
        }
    }

    #[test]
    fn constructors_validate() {
        assert!(PotentialSpec::coulomb(-1.0).is_err());
        assert!(PotentialSpec::regularized_coulomb(1.0, 0.0).is_err());
        assert!(PotentialSpec::point_dipole(0.0).is_err());
        assert!(make_physical_dipole(1.0, -1.0, 0.1).is_err());
        assert!(make_physical_dipole(1.0, 1.0, 0.0).is_err());
        assert!(PotentialSpec::inverse_square(f64::NAN).is_err());
    }

    #[test]
    fn classify_examples() {
        let pd = classify_domain(&PotentialSpec::point_dipole(1.0).unwrap());
        assert_eq!(pd.attractive_regions, vec![Interval::new(-INF, 0.0)]);
        assert_eq!(pd.repulsive_regions, vec![Interval::new(0.0, INF)]);
        assert_eq!(pd.hard_nodes, vec![0.0]);
        assert_eq!(pd.singular_points, vec![0.0]);

        let rc = classify_domain(&PotentialSpec::regularized_coulomb(1.0, 0.1).unwrap());
        assert!(rc.hard_nodes.is_empty());
        assert!(rc.singular_points.is_empty());

        let c = classify_domain(&PotentialSpec::coulomb(1.0).unwrap());
        assert_eq!(c.hard_nodes, vec![0.0]);
        assert_eq!(c.attractive_regions.len(), 2);

        let phys = classify_domain(&make_physical_dipole(1.0, 0.5, 0.1).unwrap());
        assert!(phys.singular_points.is_empty());

        let inv = classify_domain(&PotentialSpec::inverse_square(0.3).unwrap());
        assert_eq!(inv.singular_points, vec![0.0]);
        assert_eq!(inv.domain_lo, 0.0);
    }

    fn covers(prof: &DomainProfile) -> bool {
        let mut all: Vec<Interval> = prof
            .attractive_regions
            .iter()
            .chain(&prof.repulsive_regions)
            .chain(&prof.flat_regions)
            .copied()
            .collect();
        all.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut at = prof.domain_lo;
        for iv in &all {
            if iv.lo != at {
                return false;
            }
            at = iv.hi;
        }
        at == INF
    }

    #[test]
    fn regions_partition_domain() {
        let specs = [
            PotentialSpec::coulomb(0.0).unwrap(),
            PotentialSpec::coulomb(2.0).unwrap(),
            PotentialSpec::regularized_coulomb(1.0, 0.3).unwrap(),
            PotentialSpec::point_dipole(0.2).unwrap(),
            make_physical_dipole(1.0, 0.1, 0.3).unwrap(),
            make_physical_dipole(1.0, 1.0, 0.01).unwrap(),
            PotentialSpec::inverse_square(-1.0).unwrap(),
            PotentialSpec::inverse_square(0.0).unwrap(),
            PotentialSpec::inverse_square(0.7).unwrap(),
        ];
        for s in &specs {
            assert!(covers(&classify_domain(s)), "{s}");
        }
    }

    #[test]
    fn record_rejects_bad_input() {
        assert!(PotentialSpec::parse_record("lambda=1").is_err());
        assert!(PotentialSpec::parse_record("kind=coulomb lambda=abc").is_err());
        assert!(PotentialSpec::parse_record("kind=coulomb lambda=1 p=2").is_err());
        assert!(PotentialSpec::parse_record("kind=torus r=1").is_err());
        assert!(PotentialSpec::parse_record("kind=point_dipole p=-1").is_err());
        let s = PotentialSpec::parse_record("kind=physical_dipole, Q=2, d=0.5, epsilon=0.01").unwrap();
        assert_eq!(s, make_physical_dipole(2.0, 0.5, 0.01).unwrap());
    }

    fn any_spec() -> impl Strategy<Value = PotentialSpec> {
        let pos = 1e-6f64..1e3;
        prop_oneof![
            (0.0f64..1e3).prop_map(|l| PotentialSpec::Coulomb { lambda: l }),
            (pos.clone(), pos.clone()).prop_map(|(l, e)| PotentialSpec::RegularizedCoulomb { lambda: l, epsilon: e }),
            pos.clone().prop_map(|p| PotentialSpec::PointDipole { p }),
            (pos.clone(), pos.clone(), pos).prop_map(|(q, d, e)| PotentialSpec::PhysicalDipole {
                charge: q,
                d,
                epsilon: e
            }),
            (-10.0f64..10.0).prop_map(|a| PotentialSpec::InverseSquare { alpha: a }),
        ]
    }

    proptest! {
        #[test]
        fn record_round_trip(s in any_spec()) {
            let back = PotentialSpec::parse_record(&s.to_record_string()).unwrap();
            prop_assert_eq!(back, s);
        }

        #[test]
        fn point_dipole_is_odd(p in 1e-3f64..10.0, x in 1e-6f64..1e3) {
            let s = PotentialSpec::point_dipole(p).unwrap();
            prop_assert_eq!(eval_potential(&s, -x).unwrap(), -eval_potential(&s, x).unwrap());
        }

        #[test]
        fn regularized_coulomb_bounded_below(l in 1e-3f64..10.0, e in 1e-3f64..1.0, x in -100.0f64..100.0) {
            let s = PotentialSpec::regularized_coulomb(l, e).unwrap();
            prop_assert!(eval_potential(&s, x).unwrap() >= -l / e);
        }
    }
}
