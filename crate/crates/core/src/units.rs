//! Physical constants, the hartree atomic-unit system and the dimensionful
//! reductions used by the rest of the crate.
//!
//! Solvers work in hartree atomic units (ħ = m = q = 1, 4πε₀ = 1). SI values
//! enter and leave only through the conversion helpers here.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// The four constants that fix a unit system: ħ, m, q and ε₀.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantSet {
    /// Reduced Planck constant (J·s).
    pub hbar: f64,
    /// Electron mass (kg).
    pub m_electron: f64,
    /// Elementary charge (C).
    pub q_electron: f64,
    /// Vacuum permittivity (F/m).
    pub epsilon0: f64,
    pub provenance_label: String,
}

impl Default for ConstantSet {
    fn default() -> Self {
        Self::codata2018()
    }
}

impl ConstantSet {
    /// CODATA 2018 recommended values.
    pub fn codata2018() -> Self {
        Self {
            hbar: 1.054_571_817e-34,
            m_electron: 9.109_383_701_5e-31,
            q_electron: 1.602_176_634e-19,
            epsilon0: 8.854_187_812_8e-12,
            provenance_label: "CODATA 2018".to_string(),
        }
    }

    /// Hartree atomic units: ħ = m = q = 1 and 4πε₀ = 1.
    pub fn atomic() -> Self {
        Self {
            hbar: 1.0,
            m_electron: 1.0,
            q_electron: 1.0,
            epsilon0: 1.0 / (4.0 * PI),
            provenance_label: "hartree atomic units".to_string(),
        }
    }

    pub fn new(hbar: f64, m_electron: f64, q_electron: f64, epsilon0: f64) -> Result<Self> {
        let c = Self {
            hbar,
            m_electron,
            q_electron,
            epsilon0,
            provenance_label: "custom".to_string(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.entries() {
            if !(v.is_finite() && v > 0.0) {
                return Err(domain(format!("constant {name} must be finite and positive, got {v}")));
            }
        }
        Ok(())
    }

    /// `(key, value)` pairs in the fixed order used by config files.
    pub fn entries(&self) -> [(&'static str, f64); 4] {
        [
            ("hbar", self.hbar),
            ("m_electron", self.m_electron),
            ("q_electron", self.q_electron),
            ("epsilon0", self.epsilon0),
        ]
    }

    /// Overrides one constant by config key.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        match key {
            "hbar" => self.hbar = value,
            "m_electron" => self.m_electron = value,
            "q_electron" => self.q_electron = value,
            "epsilon0" => self.epsilon0 = value,
            other => return Err(Error::Parse(format!("unknown constant key '{other}'"))),
        }
        self.provenance_label = "custom".to_string();
        self.validate()
    }

    /// Coulomb prefactor 4πε₀.
    pub fn four_pi_eps0(&self) -> f64 {
        4.0 * PI * self.epsilon0
    }

    /// Bohr radius for nuclear charge Q = q.
    pub fn bohr(&self) -> f64 {
        self.four_pi_eps0() * self.hbar * self.hbar / (self.q_electron * self.q_electron * self.m_electron)
    }

    /// Hartree energy q²/(4πε₀ a_B).
    pub fn hartree(&self) -> f64 {
        self.q_electron * self.q_electron / (self.four_pi_eps0() * self.bohr())
    }

    /// Atomic unit of dipole moment, q·a_B.
    pub fn dipole_unit(&self) -> f64 {
        self.q_electron * self.bohr()
    }

    /// Stable 64-bit fingerprint of the constant values (FNV-1a over the bit
    /// patterns), used to tag output files.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for (_, v) in self.entries() {
            for b in v.to_bits().to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }
}

/// Bohr radius 4πε₀ħ²/(qQm) for a nucleus of charge `charge`.
pub fn bohr_radius(c: &ConstantSet, charge: f64) -> Result<f64> {
    if !(charge > 0.0) {
        return Err(domain(format!("nuclear charge must be positive, got {charge}")));
    }
    Ok(c.four_pi_eps0() * c.hbar * c.hbar / (c.q_electron * charge * c.m_electron))
}

/// Reduced inverse-square coupling α = 2mpq/(4πε₀ħ²) for dipole moment `p`.
pub fn alpha_from_p(c: &ConstantSet, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(domain(format!("dipole moment must be positive, got {p}")));
    }
    Ok(2.0 * c.m_electron * p * c.q_electron / (c.four_pi_eps0() * c.hbar * c.hbar))
}

/// ξ = −2mE/ħ²; positive exactly for bound (E < 0) energies.
pub fn xi_from_energy(c: &ConstantSet, energy: f64) -> f64 {
    -2.0 * c.m_electron * energy / (c.hbar * c.hbar)
}

/// SI dipole moment (C·m) to multiples of q·a_B.
pub fn dipole_si_to_atomic(c: &ConstantSet, p_si: f64) -> f64 {
    p_si / c.dipole_unit()
}

/// Multiples of q·a_B to SI dipole moment (C·m).
pub fn dipole_atomic_to_si(c: &ConstantSet, p_au: f64) -> f64 {
    p_au * c.dipole_unit()
}

/// The dimensions an [`AtomicQuantity`] can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Energy,
    Length,
    DipoleMoment,
    InverseLengthSq,
    Dimensionless,
}

impl Dimension {
    pub fn name(self) -> &'static str {
        match self {
            Dimension::Energy => "energy",
            Dimension::Length => "length",
            Dimension::DipoleMoment => "dipole_moment",
            Dimension::InverseLengthSq => "inverse_length_sq",
            Dimension::Dimensionless => "dimensionless",
        }
    }

    /// SI unit label for this dimension.
    pub fn si_unit(self) -> &'static str {
        match self {
            Dimension::Energy => "J",
            Dimension::Length => "m",
            Dimension::DipoleMoment => "C*m",
            Dimension::InverseLengthSq => "1/m^2",
            Dimension::Dimensionless => "1",
        }
    }

    /// Size of one atomic unit of this dimension in SI.
    pub fn si_scale(self, c: &ConstantSet) -> f64 {
        match self {
            Dimension::Energy => c.hartree(),
            Dimension::Length => c.bohr(),
            Dimension::DipoleMoment => c.dipole_unit(),
            Dimension::InverseLengthSq => 1.0 / (c.bohr() * c.bohr()),
            Dimension::Dimensionless => 1.0,
        }
    }
}

/// A value in atomic units tagged with its dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AtomicQuantity {
    pub value: f64,
    pub dimension: Dimension,
}

impl AtomicQuantity {
    pub fn new(value: f64, dimension: Dimension) -> Self {
        Self { value, dimension }
    }

    pub fn energy(value: f64) -> Self {
        Self::new(value, Dimension::Energy)
    }

    pub fn length(value: f64) -> Self {
        Self::new(value, Dimension::Length)
    }

    pub fn dipole(value: f64) -> Self {
        Self::new(value, Dimension::DipoleMoment)
    }

    pub fn dimensionless(value: f64) -> Self {
        Self::new(value, Dimension::Dimensionless)
    }

    pub fn from_si(value_si: f64, dimension: Dimension, c: &ConstantSet) -> Self {
        Self::new(value_si / dimension.si_scale(c), dimension)
    }

    pub fn to_si(self, c: &ConstantSet) -> f64 {
        self.value * self.dimension.si_scale(c)
    }

    fn same_dimension(self, other: Self) -> Result<()> {
        if self.dimension == other.dimension {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dimension.name(),
                right: other.dimension.name(),
            })
        }
    }

    pub fn checked_add(self, other: Self) -> Result<Self> {
        self.same_dimension(other)?;
        Ok(Self::new(self.value + other.value, self.dimension))
    }

    pub fn checked_sub(self, other: Self) -> Result<Self> {
        self.same_dimension(other)?;
        Ok(Self::new(self.value - other.value, self.dimension))
    }
}

impl Add for AtomicQuantity {
    type Output = Result<AtomicQuantity>;
    fn add(self, rhs: Self) -> Self::Output {
        self.checked_add(rhs)
    }
}

impl Sub for AtomicQuantity {
    type Output = Result<AtomicQuantity>;
    fn sub(self, rhs: Self) -> Self::Output {
        self.checked_sub(rhs)
    }
}

impl Mul<f64> for AtomicQuantity {
    type Output = AtomicQuantity;
    fn mul(self, rhs: f64) -> Self::Output {
        Self::new(self.value * rhs, self.dimension)
    }
}

impl Neg for AtomicQuantity {
    type Output = AtomicQuantity;
    fn neg(self) -> Self::Output {
        Self::new(-self.value, self.dimension)
    }
}

impl fmt::Display for AtomicQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} a.u. ({})", self.value, self.dimension.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn bohr_radius_codata() {
        // 4πε₀ħ²/(q²m) evaluated by hand from the CODATA 2018 inputs:
        // 1.11265005545e-10 * 1.11212168e-68 / (2.56697e-38 * 9.1093837e-31)
        let c = ConstantSet::codata2018();
        let a = bohr_radius(&c, c.q_electron).unwrap();
        assert!(rel(a, 5.29177e-11) < 1e-3, "{a}");
        assert!(a > 5.0e-11 && a < 5.6e-11);
    }

    #[test]
    fn bohr_radius_atomic_identity_and_scaling() {
        let au = ConstantSet::atomic();
        assert!((bohr_radius(&au, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let c = ConstantSet::codata2018();
        let a1 = bohr_radius(&c, c.q_electron).unwrap();
        let a2 = bohr_radius(&c, 2.0 * c.q_electron).unwrap();
        let a4 = bohr_radius(&c, 4.0 * c.q_electron).unwrap();
        assert!(rel(a2, a1 / 2.0) < 1e-15);
        assert!(rel(a4, a1 / 4.0) < 1e-15);
    }

    #[test]
    fn bohr_radius_rejects_nonpositive_charge() {
        let c = ConstantSet::atomic();
        assert!(matches!(bohr_radius(&c, 0.0), Err(Error::Domain(_))));
        assert!(matches!(bohr_radius(&c, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn alpha_examples() {
        let au = ConstantSet::atomic();
        assert!((alpha_from_p(&au, 0.125).unwrap() - 0.25).abs() < 1e-15);
        assert!((alpha_from_p(&au, 1.0).unwrap() - 2.0).abs() < 1e-15);
        let si = ConstantSet::codata2018();
        let a = alpha_from_p(&si, 1.052e-30).unwrap();
        assert!(rel(a, 0.25) < 0.01, "{a}");
        assert!(alpha_from_p(&au, 0.0).is_err());
        assert!(alpha_from_p(&au, -0.3).is_err());
    }

    #[test]
    fn xi_examples() {
        let au = ConstantSet::atomic();
        assert_eq!(xi_from_energy(&au, -0.5), 1.0);
        assert_eq!(xi_from_energy(&au, 0.0), 0.0);
        assert_eq!(xi_from_energy(&au, 1.0), -2.0);
    }

    #[test]
    fn dipole_conversion_examples() {
        let c = ConstantSet::codata2018();
        // q·a_B = 1.602176634e-19 * 5.29177211e-11 = 8.47835e-30 C·m
        assert!(rel(dipole_atomic_to_si(&c, 1.0), 8.478e-30) < 1e-3);
        assert_eq!(dipole_atomic_to_si(&c, 0.0), 0.0);
        assert_eq!(dipole_si_to_atomic(&c, 0.0), 0.0);
        let back = dipole_si_to_atomic(&c, dipole_atomic_to_si(&c, 0.125));
        assert!((back - 0.125).abs() < 1e-12 * 0.125);
    }

    #[test]
    fn hartree_energy_si() {
        let c = ConstantSet::codata2018();
        assert!(rel(c.hartree(), 4.359_744_7e-18) < 1e-6);
    }

    #[test]
    fn quantity_rejects_cross_dimension_arithmetic() {
        let e = AtomicQuantity::energy(1.0);
        let l = AtomicQuantity::length(2.0);
        assert!(matches!(e + l, Err(Error::DimensionMismatch { .. })));
        assert!(matches!(e - l, Err(Error::DimensionMismatch { .. })));
        let s = (e + AtomicQuantity::energy(0.5)).unwrap();
        assert_eq!(s.dimension, Dimension::Energy);
        assert_eq!(s.value, 1.5);
        assert_eq!((l * 3.0).dimension, Dimension::Length);
    }

    #[test]
    fn overrides_validate() {
        let mut c = ConstantSet::codata2018();
        c.set("hbar", 1.0e-34).unwrap();
        assert_eq!(c.hbar, 1.0e-34);
        assert!(c.set("hbar", -1.0).is_err());
        assert!(c.clone().set("speed_of_light", 3e8).is_err());
        assert!(ConstantSet::new(1.0, 0.0, 1.0, 1.0).is_err());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn dipole_round_trip(exp in -40.0f64..10.0) {
                let c = ConstantSet::codata2018();
                let p = 10f64.powf(exp);
                let back = dipole_atomic_to_si(&c, dipole_si_to_atomic(&c, p));
                prop_assert!(((back - p) / p).abs() < 1e-12);
            }

            #[test]
            fn xi_strictly_decreasing(e1 in -100.0f64..100.0, de in 1e-6f64..10.0) {
                let c = ConstantSet::atomic();
                prop_assert!(xi_from_energy(&c, e1 + de) < xi_from_energy(&c, e1));
            }
        }
    }
}
