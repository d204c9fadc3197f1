use serde::Serialize;

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Uniform,
    Logarithmic,
}

/// `n` nodes spanning `[x_min, x_max]`, both ends included.
///
/// Logarithmic grids are uniform in s = ln x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub kind: GridKind,
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

pub const MIN_POINTS: usize = 16;

impl Grid {
    pub fn new(kind: GridKind, x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(domain(format!(
                "grid needs finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n < MIN_POINTS {
            return Err(domain(format!("grid needs at least {MIN_POINTS} points, got {n}")));
        }
        if kind == GridKind::Logarithmic && !(x_min > 0.0) {
            return Err(domain(format!("logarithmic grid needs x_min > 0, got {x_min}")));
        }
        Ok(Self { kind, x_min, x_max, n })
    }

    pub fn uniform(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        Self::new(GridKind::Uniform, x_min, x_max, n)
    }

    pub fn logarithmic(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        Self::new(GridKind::Logarithmic, x_min, x_max, n)
    }

    /// Step in x (uniform) or in ln x (logarithmic).
    pub fn step(&self) -> f64 {
        let intervals = (self.n - 1) as f64;
        match self.kind {
            GridKind::Uniform => (self.x_max - self.x_min) / intervals,
            GridKind::Logarithmic => (self.x_max / self.x_min).ln() / intervals,
        }
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n - 1 {
            return self.x_max;
        }
        match self.kind {
            GridKind::Uniform => self.x_min + i as f64 * self.step(),
            GridKind::Logarithmic => self.x_min * (i as f64 * self.step()).exp(),
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Same interval with every cell halved; old nodes are kept.
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * self.n - 1,
            ..*self
        }
    }

    /// Physical spacing between nodes `i` and `i+1`.
    pub fn spacing_at(&self, i: usize) -> f64 {
        self.node(i + 1) - self.node(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Grid::uniform(1.0, 0.0, 32).is_err());
        assert!(Grid::uniform(0.0, 1.0, 15).is_err());
        assert!(Grid::logarithmic(0.0, 1.0, 32).is_err());
        assert!(Grid::logarithmic(1e-5, 200.0, 16).is_ok());
    }

    #[test]
    fn nodes_and_refinement() {
        let g = Grid::uniform(0.0, 4.0, 17).unwrap();
        assert_eq!(g.step(), 0.25);
        assert_eq!(g.node(16), 4.0);
        let r = g.refined();
        assert_eq!(r.n, 33);
        for i in 0..g.n {
            assert!((r.node(2 * i) - g.node(i)).abs() < 1e-15);
        }
        let l = Grid::logarithmic(1e-3, 1e3, 61).unwrap();
        assert!((l.node(30) - 1.0).abs() < 1e-12);
        assert_eq!(l.node(60), 1e3);
        assert!((l.step() - 0.1 * 10f64.ln()).abs() < 1e-12);
    }
}
