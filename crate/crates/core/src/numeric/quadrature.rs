use serde::{Deserialize, Serialize};

use super::linalg::CMatrix;
use super::NumericError;

/// Per-interval rule for the cumulative integral on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Trapezoid per interval, order 2.
    Trapezoid,
    /// Integral of the cubic through four neighbouring nodes, order 4.
    Cubic,
}

impl Scheme {
    pub fn order(self) -> i32 {
        match self {
            Scheme::Trapezoid => 2,
            Scheme::Cubic => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Intervals on the coarsest grid.
    pub grid_points: usize,
    pub scheme: Scheme,
    /// Relative refinement tolerance.
    pub tolerance: f64,
    /// Grid doublings allowed before giving up.
    pub max_refinements: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            grid_points: 16,
            scheme: Scheme::Cubic,
            tolerance: 1e-10,
            max_refinements: 10,
        }
    }
}

impl QuadratureConfig {
    pub fn new(grid_points: usize, tolerance: f64) -> Result<Self, NumericError> {
        let c = Self {
            grid_points,
            tolerance,
            ..Self::default()
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), NumericError> {
        if self.grid_points < 8 {
            return Err(NumericError::Quadrature(format!(
                "grid_points must be at least 8, got {}",
                self.grid_points
            )));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(NumericError::Quadrature(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// `F_i = ∫_0^{t_i} f` on nodes `t_i = i·h`, `F_0 = 0`.
pub fn cumulative(f: &[CMatrix], h: f64, scheme: Scheme) -> Vec<CMatrix> {
    let m = f.len() - 1;
    let mut out = Vec::with_capacity(m + 1);
    out.push(f[0].scale(0.0));
    for i in 0..m {
        let piece = match scheme {
            Scheme::Trapezoid => (&f[i] + &f[i + 1]).scale(0.5 * h),
            Scheme::Cubic => {
                assert!(m >= 3, "cubic rule needs at least three intervals");
                let sum = if i == 0 {
                    f[0].scale(9.0) + f[1].scale(19.0) - f[2].scale(5.0) + &f[3]
                } else if i == m - 1 {
                    &f[m - 3] - f[m - 2].scale(5.0) + f[m - 1].scale(19.0) + f[m].scale(9.0)
                } else {
                    f[i].scale(13.0) + f[i + 1].scale(13.0) - &f[i - 1] - &f[i + 2]
                };
                sum.scale(h / 24.0)
            }
        };
        let next = &out[i] + piece;
        out.push(next);
    }
    out
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    for i in 0..q.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=q {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if q == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = q as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[q - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[q - 1 - i] = w;
    }
    (nodes, weights)
}

/// Nodes and weights mapped to `[0, b]`.
pub fn gauss_legendre_on(q: usize, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(q);
    (
        x.iter().map(|xi| 0.5 * b * (xi + 1.0)).collect(),
        w.iter().map(|wi| 0.5 * b * wi).collect(),
    )
}
