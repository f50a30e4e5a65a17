//! Hyvärinen score on a uniform periodic grid over `[0, 1)`.
//!
//! With the antisymmetric centered difference `D` and the discrete log-derivative
//! `g(q) = Dq / q`, the identity `Dp = p ⊙ g(p)` holds exactly, so summation by
//! parts turns the continuum identities into exact ones:
//!
//! * `q·S(q) = Σ q g(q)² h` (Euler identity for the Fisher entropy),
//! * `p·S(p) − p·S(q) = Σ p (g(p) − g(q))² h`.
//!
//! The score is oriented so that larger is better.

use crate::error::{Error, Result};
use crate::measure::{compensated_sum, total_mass, ConeVector, DualVector, MeasureSpace, DENSITY_MASS_TOL};

#[derive(Clone, Debug)]
pub struct PeriodicGrid {
    points: usize,
    space: MeasureSpace,
}

impl PeriodicGrid {
    pub fn new(points: usize) -> Result<Self> {
        if points < 4 {
            return Err(Error::InvalidParameter(format!("periodic grid needs at least 4 points, got {points}")));
        }
        let h = 1.0 / points as f64;
        Ok(Self { points, space: MeasureSpace::new(vec![h; points])? })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.points as f64
    }

    /// Node `x_i = i h`.
    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.node(i)).collect()
    }

    /// Uniform weights `μ_i = h`.
    pub fn measure_space(&self) -> &MeasureSpace {
        &self.space
    }

    /// Periodic centered difference `(v_{i+1} − v_{i−1}) / 2h`.
    pub fn diff(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.points {
            return Err(Error::Dimension { expected: self.points, found: v.len() });
        }
        Ok(grid_diff(v, self.spacing()))
    }
}

pub(crate) fn grid_diff(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|i| (v[(i + 1) % n] - v[(i + n - 1) % n]) / (2.0 * h)).collect()
}

/// Strictly positive, possibly unnormalized, values on a grid.
#[derive(Clone, Debug)]
pub struct GridDensity {
    grid: PeriodicGrid,
    values: ConeVector,
}

impl GridDensity {
    pub fn new(grid: &PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::domain(format!("grid density entry {i} is {}, must be positive", values[i])));
        }
        let values = ConeVector::new(grid.measure_space(), values)?;
        Ok(Self { grid: grid.clone(), values })
    }

    /// Sample a positive function at the grid nodes.
    pub fn from_fn(grid: &PeriodicGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().into_iter().map(f).collect())
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        self.values.values()
    }

    pub fn as_cone(&self) -> &ConeVector {
        &self.values
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(&self.grid, self.values.scaled(lambda).into_values())
    }

    pub fn normalized(&self) -> Result<Self> {
        let m = total_mass(&self.values);
        self.scaled(1.0 / m)
    }

    pub fn is_normalized(&self) -> bool {
        (total_mass(&self.values) - 1.0).abs() <= DENSITY_MASS_TOL
    }

    /// `g(q) = Dq / q`, the discrete log-derivative; invariant under scaling.
    pub fn log_derivative(&self) -> Vec<f64> {
        let dq = grid_diff(self.values(), self.grid.spacing());
        dq.iter().zip(self.values()).map(|(d, q)| d / q).collect()
    }

    fn check_grid(&self, other: &GridDensity) -> Result<()> {
        if self.grid.points != other.grid.points {
            return Err(Error::Dimension { expected: self.grid.points, found: other.grid.points });
        }
        Ok(())
    }
}

/// `S(q) = −2 D g(q) − g(q)²`.
pub fn hyvarinen_score(q: &GridDensity) -> DualVector {
    let g = q.log_derivative();
    let dg = grid_diff(&g, q.grid.spacing());
    let values = dg.iter().zip(&g).map(|(d, gi)| -2.0 * d - gi * gi).collect();
    DualVector::new(q.grid.measure_space(), values).expect("grid-sized vector")
}

/// `Φ(q) = Σ q g(q)² h`, nonnegative and 1-homogeneous.
pub fn fisher_entropy(q: &GridDensity) -> f64 {
    let h = q.grid.spacing();
    compensated_sum(q.values().iter().zip(q.log_derivative()).map(|(qi, g)| qi * g * g * h))
}

/// `Σ p (g(p) − g(q))² h` for normalized `p`.
pub fn hyvarinen_divergence(p: &GridDensity, q: &GridDensity) -> Result<f64> {
    p.check_grid(q)?;
    if !p.is_normalized() {
        return Err(Error::domain("first argument of the Hyvärinen divergence must be normalized"));
    }
    let h = p.grid.spacing();
    let (gp, gq) = (p.log_derivative(), q.log_derivative());
    Ok(compensated_sum(p.values().iter().zip(gp.iter().zip(&gq)).map(|(pi, (a, b))| pi * (a - b) * (a - b) * h)))
}
