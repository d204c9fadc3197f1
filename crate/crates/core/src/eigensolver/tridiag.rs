//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection, and
//! eigenvectors by inverse iteration.

use crate::error::{domain, Result};

/// Bisection stops once the bracket is narrower than this (hartree), both
/// absolutely and relative to the eigenvalue.
pub const BRACKET_WIDTH: f64 = 1e-10;
pub const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diagonal: Vec<f64>,
    /// Sub/super-diagonal, length n−1.
    pub offdiagonal: Vec<f64>,
}

/// An eigenvalue located by bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

impl Bracket {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl SymTridiagonal {
    pub fn new(diagonal: Vec<f64>, offdiagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(domain("empty matrix"));
        }
        if offdiagonal.len() + 1 != diagonal.len() {
            return Err(domain(format!(
                "off-diagonal length {} does not match diagonal length {}",
                offdiagonal.len(),
                diagonal.len()
            )));
        }
        if diagonal.iter().chain(&offdiagonal).any(|v| !v.is_finite()) {
            return Err(domain("matrix entries must be finite"));
        }
        Ok(Self { diagonal, offdiagonal })
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    fn pivot_floor(&self) -> f64 {
        let emax = self.offdiagonal.iter().map(|e| e * e).fold(1.0, f64::max);
        f64::MIN_POSITIVE * emax
    }

    /// Number of eigenvalues strictly below `lambda` (negative LDLᵀ pivots).
    pub fn sturm_count(&self, lambda: f64) -> usize {
        let floor = self.pivot_floor();
        let mut q = self.diagonal[0] - lambda;
        let mut count = 0;
        for i in 0.. {
            if q.abs() < floor {
                q = -floor;
            }
            if q < 0.0 {
                count += 1;
            }
            if i + 1 == self.diagonal.len() {
                break;
            }
            let e = self.offdiagonal[i];
            q = (self.diagonal[i + 1] - lambda) - e * e / q;
        }
        count
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.offdiagonal[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.offdiagonal[i].abs() } else { 0.0 };
            lo = lo.min(self.diagonal[i] - left - right);
            hi = hi.max(self.diagonal[i] + left + right);
        }
        let pad = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
        (lo - pad, hi + pad)
    }

    /// Brackets the `k`-th smallest eigenvalue (0-based) inside `[lo, hi]`.
    pub fn bisect(&self, k: usize, mut lo: f64, mut hi: f64) -> Bracket {
        let mut iterations = 0;
        // Small eigenvalues of graded matrices are resolved relatively too.
        let done = |lo: f64, hi: f64| hi - lo < BRACKET_WIDTH && hi - lo <= BRACKET_WIDTH * lo.abs().max(hi.abs());
        while iterations < MAX_BISECTIONS && !done(lo, hi) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
            iterations += 1;
        }
        Bracket { lo, hi, iterations }
    }

    /// Brackets for the `k` smallest eigenvalues in ascending order.
    pub fn lowest_brackets(&self, k: usize) -> Result<Vec<Bracket>> {
        if k == 0 || k > self.len() {
            return Err(domain(format!(
                "requested {k} eigenvalues of a {}x{} matrix",
                self.len(),
                self.len()
            )));
        }
        let (lo, hi) = self.gershgorin();
        let mut out: Vec<Bracket> = Vec::with_capacity(k);
        for idx in 0..k {
            let start = out.last().map_or(lo, |b| b.lo);
            out.push(self.bisect(idx, start, hi));
        }
        Ok(out)
    }

    /// Eigenvector for an eigenvalue near `shift`, unit 2-norm, with its
    /// largest-magnitude entry positive.
    pub fn eigenvector(&self, shift: f64) -> Vec<f64> {
        let n = self.len();
        if n == 1 {
            return vec![1.0];
        }
        // Deterministic, non-symmetric start vector.
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_749_895).fract())
            .collect();
        let solver = ShiftedLu::factor(self, shift);
        for _ in 0..3 {
            solver.solve(&mut x);
            normalize(&mut x);
        }
        let imax = x
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        if x[imax] < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        x
    }
}

fn normalize(x: &mut [f64]) {
    let big = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if big == 0.0 || !big.is_finite() {
        return;
    }
    x.iter_mut().for_each(|v| *v /= big);
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
}

/// LU of T − σI with partial pivoting (LAPACK gttrf layout).
struct ShiftedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &SymTridiagonal, shift: f64) -> Self {
        let n = t.len();
        let mut dl = t.offdiagonal.clone();
        let mut du = t.offdiagonal.clone();
        let mut d: Vec<f64> = t.diagonal.iter().map(|v| v - shift).collect();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let f = dl[i] / d[i];
                    dl[i] = f;
                    d[i + 1] -= f * du[i];
                }
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -f;
                }
                swapped[i] = true;
            }
        }
        // Exactly singular pivots are replaced so the solve stays finite.
        for (i, di) in d.iter_mut().enumerate() {
            let scale = t.diagonal[i].abs()
                + if i > 0 { t.offdiagonal[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { t.offdiagonal[i].abs() } else { 0.0 };
            let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
            if di.abs() < tiny {
                *di = if *di < 0.0 { -tiny } else { tiny };
            }
        }
        Self {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                b.swap(i, i + 1);
                b[i + 1] -= self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
        // Rescale to keep the next solve away from overflow.
        let big = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if big > 1e100 {
            b.iter_mut().for_each(|v| *v /= big);
        }
    }
}

/// Sign changes of `v`, ignoring entries below `rel_floor·max|v|`.
pub fn count_sign_changes(v: &[f64], rel_floor: f64) -> usize {
    let big = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let floor = rel_floor * big;
    let mut last = 0.0f64;
    let mut changes = 0;
    for &x in v {
        if x.abs() <= floor {
            continue;
        }
        if last != 0.0 && (x > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = x;
    }
    changes
}
