//! Power-series (Frobenius) solutions of −ψ'' − (α/y²)ψ = −ξψ about the
//! regular singular point y = 0.
//!
//! With ψ = Σ a_j y^{j+ν} the indicial equation is ν(ν−1) + α = 0, odd
//! coefficients vanish, and even ones obey
//! `[(ν+j+2)(ν+j+1) + α]·a_{j+2} = ξ·a_j`.
//! Arithmetic is complex throughout so that α > 1/4, where ν is a
//! conjugate pair, shares the code path of the real case.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Float, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{domain, Error, Result};

pub const DEFAULT_TERMS: usize = 30;
pub const DEFAULT_CRITICAL_TOL: f64 = 1e-9;
/// Largest tail estimate |a_N y^N / a₀| at which the truncated series is trusted.
pub const TAIL_LIMIT: f64 = 1e-8;

/// The two roots of ν(ν−1) + α = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicialPair {
    pub nu_plus: Complex64,
    pub nu_minus: Complex64,
}

/// `(1 ± √(1−4α))/2` with the principal square root.
pub fn indicial_roots(alpha: f64) -> IndicialPair {
    let root = Complex64::new(1.0 - 4.0 * alpha, 0.0).sqrt();
    IndicialPair {
        nu_plus: (1.0 + root) * 0.5,
        nu_minus: (1.0 - root) * 0.5,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSolution {
    pub alpha: f64,
    pub xi: f64,
    pub nu: Complex64,
    /// a₀ … a_N, rounded from `exact`.
    pub a: Vec<Complex64>,
    pub a0: Complex64,
    /// a₀ … a_N exactly, in terms of the stored α, ξ, ν and a₀.
    pub exact: Vec<ExactCoefficient>,
}

fn denominator(alpha: f64, nu: Complex64, j: usize) -> Complex64 {
    // coefficient multiplying a_{j+2}
    (nu + (j + 2) as f64) * (nu + (j + 1) as f64) + alpha
}

/// `(re + i·im)·2^e` with integer parts; every finite double has this form.
#[derive(Debug, Clone, PartialEq)]
struct Dyadic {
    re: BigInt,
    im: BigInt,
    e: i64,
}

impl Dyadic {
    fn from_complex(z: Complex64) -> Self {
        let decode = |x: f64| {
            let (m, e, sign) = Float::integer_decode(x);
            (BigInt::from(sign) * BigInt::from(m), i64::from(e))
        };
        let ((re, er), (im, ei)) = (decode(z.re), decode(z.im));
        let e = er.min(ei);
        Dyadic {
            re: re << (er - e) as usize,
            im: im << (ei - e) as usize,
            e,
        }
    }

    fn integer(k: usize) -> Self {
        Dyadic {
            re: BigInt::from(k),
            im: BigInt::zero(),
            e: 0,
        }
    }

    fn add(&self, other: &Self) -> Self {
        let e = self.e.min(other.e);
        let (s, o) = ((self.e - e) as usize, (other.e - e) as usize);
        Dyadic {
            re: (&self.re << s) + (&other.re << o),
            im: (&self.im << s) + (&other.im << o),
            e,
        }
    }

    fn mul(&self, other: &Self) -> Self {
        Dyadic {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
            e: self.e + other.e,
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

/// An exact coefficient `(re + i·im)·2^exp2 / denom` with `denom > 0`.
///
/// Fractions are kept unreduced: all inputs are dyadic, so the recursion
/// needs integer products only and never a gcd.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactCoefficient {
    pub re: BigInt,
    pub im: BigInt,
    pub exp2: i64,
    pub denom: BigInt,
}

impl ExactCoefficient {
    fn from_dyadic(d: Dyadic) -> Self {
        ExactCoefficient {
            re: d.re,
            im: d.im,
            exp2: d.e,
            denom: BigInt::from(1),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn part(&self, x: &BigInt) -> BigRational {
        let shift = self.exp2.unsigned_abs() as usize;
        if self.exp2 >= 0 {
            BigRational::new_raw(x << shift, self.denom.clone())
        } else {
            BigRational::new_raw(x.clone(), &self.denom << shift)
        }
    }

    /// The value as a reduced Gaussian rational.
    pub fn to_rational(&self) -> Complex<BigRational> {
        let reduce = |r: BigRational| BigRational::new(r.numer().clone(), r.denom().clone());
        Complex::new(reduce(self.part(&self.re)), reduce(self.part(&self.im)))
    }

    /// The correctly rounded value.
    pub fn round(&self) -> Complex64 {
        let f = |x: &BigInt| self.part(x).to_f64().unwrap_or(f64::NAN);
        Complex64::new(f(&self.re), f(&self.im))
    }
}

fn exact_denominator(alpha: &Dyadic, nu: &Dyadic, j: usize) -> Dyadic {
    nu.add(&Dyadic::integer(j + 2))
        .mul(&nu.add(&Dyadic::integer(j + 1)))
        .add(alpha)
}

/// `ξ·a / D` in exact arithmetic.
fn exact_step(a: &ExactCoefficient, xi: &Dyadic, den: &Dyadic) -> ExactCoefficient {
    // ξ is real: ξ = w·2^f, D = (u + iv)·2^e, so
    // ξ·a/D = w·(x + iy)(u − iv)·2^(E+f−e) / (M·(u² + v²)).
    let (u, v) = (&den.re, &den.im);
    let re = &a.re * u + &a.im * v;
    let im = &a.im * u - &a.re * v;
    ExactCoefficient {
        re: &xi.re * re,
        im: &xi.re * im,
        exp2: a.exp2 + xi.e - den.e,
        denom: &a.denom * (u * u + v * v),
    }
}

/// `D·next − ξ·prev` as an exact Gaussian rational.
fn exact_residual(den: &Dyadic, next: &ExactCoefficient, xi: &Dyadic, prev: &ExactCoefficient) -> Complex<BigRational> {
    // Bring both terms over the common denominator next.denom·prev.denom.
    let lhs_e = den.e + next.exp2;
    let rhs_e = xi.e + prev.exp2;
    let e = lhs_e.min(rhs_e);
    let (ls, rs) = ((lhs_e - e) as usize, (rhs_e - e) as usize);
    let lhs_re = (&den.re * &next.re - &den.im * &next.im) * &prev.denom;
    let lhs_im = (&den.re * &next.im + &den.im * &next.re) * &prev.denom;
    let rhs_re = &xi.re * &prev.re * &next.denom;
    let rhs_im = &xi.re * &prev.im * &next.denom;
    ExactCoefficient {
        re: (lhs_re << ls) - (rhs_re << rs),
        im: (lhs_im << ls) - (rhs_im << rs),
        exp2: e,
        denom: &next.denom * &prev.denom,
    }
    .to_rational()
}

/// Builds a₀ … a_N from the two-term recursion.
///
/// Fails with [`Error::DegenerateRecursion`] when a denominator vanishes,
/// which can only happen for real ν (α ≤ 1/4) when ν₊ − ν₋ is an even
/// integer.
pub fn series_coefficients(
    alpha: f64,
    xi: f64,
    nu: Complex64,
    n_terms: usize,
    a0: Complex64,
) -> Result<SeriesSolution> {
    if n_terms < 2 {
        return Err(domain(format!("series needs N >= 2, got {n_terms}")));
    }
    if !(alpha.is_finite() && xi.is_finite() && nu.re.is_finite() && nu.im.is_finite()) {
        return Err(domain("series parameters must be finite"));
    }
    if a0 == Complex64::new(0.0, 0.0) {
        return Err(domain("a0 must be nonzero"));
    }
    // The recursion is run in exact rational arithmetic on the stored
    // inputs, so the identity holds for the stored coefficients without
    // rounding; `a` holds their correctly rounded values.
    let (alpha_x, xi_x, nu_x) = (
        Dyadic::from_complex(Complex64::new(alpha, 0.0)),
        Dyadic::from_complex(Complex64::new(xi, 0.0)),
        Dyadic::from_complex(nu),
    );
    let mut exact_a = Vec::with_capacity(n_terms + 1);
    exact_a.push(ExactCoefficient::from_dyadic(Dyadic::from_complex(a0)));
    let zero = ExactCoefficient::from_dyadic(Dyadic::integer(0));
    let mut j = 0;
    while j + 2 <= n_terms {
        let den = denominator(alpha, nu, j);
        let scale = 1.0 + (nu + (j + 2) as f64).norm_sqr();
        let den_x = exact_denominator(&alpha_x, &nu_x, j);
        if den.norm() <= 1e-12 * scale || den_x.is_zero() {
            return Err(Error::DegenerateRecursion { j });
        }
        let next = exact_step(&exact_a[j], &xi_x, &den_x);
        exact_a.push(zero.clone());
        exact_a.push(next);
        j += 2;
    }
    if exact_a.len() == n_terms {
        exact_a.push(zero);
    }
    let a = exact_a.iter().map(ExactCoefficient::round).collect();
    Ok(SeriesSolution {
        alpha,
        xi,
        nu,
        a,
        a0,
        exact: exact_a,
    })
}

/// Convenience constructor with ν = ν₊ and the default truncation.
pub fn leading_series(alpha: f64, xi: f64) -> Result<SeriesSolution> {
    let nu = indicial_roots(alpha).nu_plus;
    series_coefficients(alpha, xi, nu, DEFAULT_TERMS, Complex64::new(1.0, 0.0))
}

impl SeriesSolution {
    pub fn n_terms(&self) -> usize {
        self.a.len() - 1
    }

    /// `[(ν+j+2)(ν+j+1)+α]·a_{j+2} − ξ·a_j` for every stored even j,
    /// evaluated exactly.
    pub fn recursion_residuals(&self) -> Vec<Complex<BigRational>> {
        let alpha = Dyadic::from_complex(Complex64::new(self.alpha, 0.0));
        let xi = Dyadic::from_complex(Complex64::new(self.xi, 0.0));
        let nu = Dyadic::from_complex(self.nu);
        (0..)
            .step_by(2)
            .take_while(|j| j + 2 < self.exact.len())
            .map(|j| {
                exact_residual(
                    &exact_denominator(&alpha, &nu, j),
                    &self.exact[j + 2],
                    &xi,
                    &self.exact[j],
                )
            })
            .collect()
    }

    /// Largest |residual| from [`Self::recursion_residuals`], rounded.
    pub fn max_recursion_residual(&self) -> f64 {
        self.recursion_residuals()
            .iter()
            .map(|r| Complex64::new(r.re.to_f64().unwrap_or(f64::NAN), r.im.to_f64().unwrap_or(f64::NAN)).norm())
            .fold(0.0, f64::max)
    }

    /// |a_N y^N / a₀| using the last nonzero coefficient.
    pub fn tail_estimate(&self, y: f64) -> f64 {
        let last = self.a.iter().rposition(|c| *c != Complex64::new(0.0, 0.0)).unwrap_or(0);
        if last == 0 {
            return 0.0;
        }
        (self.a[last] / self.a0).norm() * y.powi(last as i32)
    }

    fn check_y(&self, y: f64) -> Result<()> {
        if !(y > 0.0) || !y.is_finite() {
            return Err(domain(format!("series is evaluated on y > 0, got {y}")));
        }
        let tail = self.tail_estimate(y);
        if tail >= TAIL_LIMIT {
            return Err(domain(format!(
                "y = {y} outside trusted radius (tail estimate {tail:e})"
            )));
        }
        Ok(())
    }
}

/// Σ a_j y^{j+ν}.
pub fn eval_series(s: &SeriesSolution, y: f64) -> Result<Complex64> {
    s.check_y(y)?;
    let ln_y = y.ln();
    Ok(s.a
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
        .map(|(j, c)| c * ((s.nu + j as f64) * ln_y).exp())
        .sum())
}

/// Relative residual of −ψ'' − (α/y²)ψ + ξψ, computed from the term-wise
/// derivative of the truncated series and normalised by max(|ψ|/y², floor).
pub fn ode_residual(s: &SeriesSolution, y: f64) -> Result<f64> {
    s.check_y(y)?;
    let ln_y = y.ln();
    let n = s.a.len();
    let zero = Complex64::new(0.0, 0.0);
    let coeff = |j: usize| if j < n { s.a[j] } else { zero };
    let mut residual = zero;
    let mut psi = zero;
    // powers y^{j+ν−2} for j = 0..N+2; the last two carry the truncation tail
    for j in 0..n + 2 {
        let aj = coeff(j);
        let lower = if j >= 2 { coeff(j - 2) } else { zero };
        let c = if j < n {
            let nj = s.nu + j as f64;
            lower * s.xi - (nj * (nj - 1.0) + s.alpha) * aj
        } else {
            lower * s.xi
        };
        if c != zero {
            residual += c * ((s.nu + j as f64 - 2.0) * ln_y).exp();
        }
        if aj != zero {
            psi += aj * ((s.nu + j as f64) * ln_y).exp();
        }
    }
    let norm = (psi.norm() / (y * y)).max(f64::MIN_POSITIVE);
    Ok(residual.norm() / norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum CriticalityClass {
    Subcritical,
    Critical,
    Supercritical { oscillation_exponent: f64 },
}

/// Places α relative to the critical coupling 1/4.
pub fn classify_criticality(alpha: f64, tol: f64) -> Result<CriticalityClass> {
    if !(tol >= 0.0) {
        return Err(domain(format!("tolerance must be non-negative, got {tol}")));
    }
    if !alpha.is_finite() {
        return Err(domain("alpha must be finite"));
    }
    Ok(if (alpha - 0.25).abs() <= tol {
        CriticalityClass::Critical
    } else if alpha < 0.25 {
        CriticalityClass::Subcritical
    } else {
        CriticalityClass::Supercritical {
            oscillation_exponent: (alpha - 0.25).sqrt(),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn indicial_examples() {
        let r = indicial_roots(0.0);
        assert_eq!((r.nu_plus, r.nu_minus), (c(1.0), c(0.0)));
        let r = indicial_roots(3.0 / 16.0);
        assert_eq!((r.nu_plus, r.nu_minus), (c(0.75), c(0.25)));
        let r = indicial_roots(0.25);
        assert_eq!((r.nu_plus, r.nu_minus), (c(0.5), c(0.5)));
        let r = indicial_roots(2.0);
        let h = 7f64.sqrt() / 2.0;
        assert!((r.nu_plus - Complex64::new(0.5, h)).norm() < 1e-15);
        assert!((r.nu_minus - Complex64::new(0.5, -h)).norm() < 1e-15);
    }

    #[test]
    fn first_coefficients_by_hand() {
        let s = series_coefficients(3.0 / 16.0, 1.0, c(0.75), 2, c(1.0)).unwrap();
        assert_eq!(s.a[1], c(0.0));
        assert!((s.a[2] - c(0.2)).norm() < 1e-16);
        let s = series_coefficients(3.0 / 16.0, 1.0, c(0.75), 4, c(1.0)).unwrap();
        // (4.75)(3.75) + 0.1875 = 18
        assert!((s.a[4] - c(0.2 / 18.0)).norm() < 1e-17);
    }

    #[test]
    fn exact_coefficients_match_reduced_rationals() {
        // Reference: the same recursion in reduced Gaussian rationals.
        let q = |x: f64| BigRational::from_float(x).unwrap();
        let (alpha, xi) = (2.0, -0.7);
        let nu = indicial_roots(alpha).nu_plus;
        let s = series_coefficients(alpha, xi, nu, 12, Complex64::new(0.3, -1.1)).unwrap();
        let nu_q = Complex::new(q(nu.re), q(nu.im));
        let int = |k: usize| Complex::new(q(k as f64), q(0.0));
        let mut a = Complex::new(q(0.3), q(-1.1));
        for j in (0..12).step_by(2) {
            assert_eq!(s.exact[j].to_rational(), a);
            assert_eq!(s.a[j], s.exact[j].round());
            let den = (&nu_q + int(j + 2)) * (&nu_q + int(j + 1)) + Complex::new(q(alpha), q(0.0));
            a = a * Complex::new(q(xi), q(0.0)) / den;
        }
        assert_eq!(s.exact[12].to_rational(), a);
    }

    #[test]
    fn zero_xi_gives_pure_power() {
        let s = series_coefficients(0.1, 0.0, c(0.75), 10, c(1.0)).unwrap();
        assert!(s.a[1..].iter().all(|a| *a == c(0.0)));
        for &y in &[0.01, 0.3, 2.0, 50.0] {
            let v = eval_series(&s, y).unwrap();
            assert!((v - c(y.powf(0.75))).norm() <= 1e-14 * y.powf(0.75));
        }
    }

    #[test]
    fn resonant_denominator_is_reported() {
        // α = −3/4: ν₋ = −1/2 and (ν+2)(ν+1) + α = 0 at j = 0
        let r = indicial_roots(-0.75);
        assert_eq!(r.nu_minus, c(-0.5));
        let err = series_coefficients(-0.75, 1.0, r.nu_minus, 6, c(1.0)).unwrap_err();
        assert_eq!(err, Error::DegenerateRecursion { j: 0 });
        assert!(series_coefficients(-0.75, 1.0, r.nu_plus, 6, c(1.0)).is_ok());
    }

    #[test]
    fn bad_arguments() {
        assert!(series_coefficients(0.1, 1.0, c(0.5), 1, c(1.0)).is_err());
        assert!(series_coefficients(0.1, 1.0, c(0.5), 4, c(0.0)).is_err());
        let s = leading_series(3.0 / 16.0, 1.0).unwrap();
        assert!(eval_series(&s, 0.0).is_err());
        assert!(eval_series(&s, -1.0).is_err());
        assert!(ode_residual(&s, 0.0).is_err());
        // far outside the radius where the 30-term tail is negligible
        assert!(eval_series(&s, 40.0).is_err());
        assert!(classify_criticality(0.3, -1.0).is_err());
    }

    #[test]
    fn residual_small_and_shrinks_with_terms() {
        let s30 = series_coefficients(3.0 / 16.0, 1.0, c(0.75), 30, c(1.0)).unwrap();
        assert!(ode_residual(&s30, 0.1).unwrap() < 1e-10);
        let s15 = series_coefficients(3.0 / 16.0, 1.0, c(0.75), 15, c(1.0)).unwrap();
        let r15 = ode_residual(&s15, 0.5).unwrap();
        let r30 = ode_residual(&s30, 0.5).unwrap();
        assert!(r30 < r15, "{r30} !< {r15}");
    }

    #[test]
    fn criticality_examples() {
        assert_eq!(classify_criticality(0.2, 0.0).unwrap(), CriticalityClass::Subcritical);
        assert_eq!(classify_criticality(0.25, 0.0).unwrap(), CriticalityClass::Critical);
        assert_eq!(
            classify_criticality(0.5, 0.0).unwrap(),
            CriticalityClass::Supercritical {
                oscillation_exponent: 0.5
            }
        );
        assert_eq!(
            classify_criticality(0.25 + 1e-10, DEFAULT_CRITICAL_TOL).unwrap(),
            CriticalityClass::Critical
        );
    }

    #[test]
    fn supercritical_coefficients_are_complex() {
        let s = leading_series(2.0, 1.0).unwrap();
        assert!(s.a[2].im != 0.0);
        assert!(s.a.iter().skip(1).step_by(2).all(|a| *a == c(0.0)));
    }

    proptest! {
        #[test]
        fn vieta(alpha in -5.0f64..5.0) {
            let r = indicial_roots(alpha);
            let sum = r.nu_plus + r.nu_minus;
            let prod = r.nu_plus * r.nu_minus;
            prop_assert!((sum - c(1.0)).norm() < 1e-12);
            prop_assert!((prod - c(alpha)).norm() < 1e-12);
            if alpha > 0.25 {
                prop_assert!((r.nu_plus.re - 0.5).abs() < 1e-15);
                prop_assert!((r.nu_minus.re - 0.5).abs() < 1e-15);
                prop_assert!(r.nu_plus.im > 0.0);
            }
        }

        #[test]
        fn supercritical_iff_complex(alpha in -5.0f64..5.0) {
            let r = indicial_roots(alpha);
            let complex = r.nu_plus.im != 0.0;
            let sup = matches!(
                classify_criticality(alpha, 0.0).unwrap(),
                CriticalityClass::Supercritical { .. }
            );
            prop_assert_eq!(complex, sup);
        }

        #[test]
        fn odd_coefficients_vanish(alpha in -2.0f64..5.0, xi in -3.0f64..3.0, n in 2usize..40) {
            let s = series_coefficients(alpha, xi, indicial_roots(alpha).nu_plus, n, c(1.0)).unwrap();
            prop_assert!(s.a.iter().skip(1).step_by(2).all(|a| *a == c(0.0)));
        }

        #[test]
        fn recursion_residual_exactly_zero(alpha in -2.0f64..5.0, xi in -3.0f64..3.0) {
            let s = series_coefficients(alpha, xi, indicial_roots(alpha).nu_plus, 30, c(1.0)).unwrap();
            prop_assert!(s.recursion_residuals().iter().all(|r| r.is_zero()));
        }

        #[test]
        fn rounded_coefficients_track_float_recursion(alpha in -2.0f64..5.0, xi in -3.0f64..3.0) {
            // the plain floating-point recursion drifts by a few ulps per step
            let nu = indicial_roots(alpha).nu_plus;
            let s = series_coefficients(alpha, xi, nu, 30, c(1.0)).unwrap();
            let mut a = c(1.0);
            for j in (0..30).step_by(2) {
                a = a * xi / denominator(alpha, nu, j);
                let err = (a - s.a[j + 2]).norm();
                prop_assert!(err <= 64.0 * f64::EPSILON * s.a[j + 2].norm() + f64::MIN_POSITIVE, "j={} err={}", j, err);
            }
        }
    }
}
