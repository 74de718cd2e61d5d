//! Uniform grids, grid functions, difference operators and discrete norms.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `n` uniform subintervals of `[0, L]`, nodes `x_i = i·h`, `i = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    length: f64,
    n: usize,
    h: f64,
}

impl UniformGrid {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "length {length} must be positive"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "need n >= 2 subintervals, got {n}"
            )));
        }
        Ok(Self {
            length,
            n,
            h: length / n as f64,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of subintervals; there are `n + 1` nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn num_nodes(&self) -> usize {
        self.n + 1
    }

    /// Node `x_i`. Computed as `L·(i/n)` so that nested grids agree bitwise
    /// on their shared nodes.
    pub fn node(&self, i: usize) -> f64 {
        self.length * (i as f64 / self.n as f64)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |i| self.node(i))
    }
}

/// Shorthand for [`UniformGrid::new`].
pub fn make_grid(length: f64, n: usize) -> Result<UniformGrid> {
    UniformGrid::new(length, n)
}

/// Complex nodal values on a [`UniformGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: UniformGrid,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: UniformGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.num_nodes() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a grid with {} nodes",
                values.len(),
                grid.num_nodes()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample {
                index,
                x: grid.node(index),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: UniformGrid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.num_nodes()],
        }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Pointwise `self - other` on the same grid.
    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    pub fn scale(&self, c: Complex64) -> GridFunction {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch(format!(
                "grid functions live on different grids (n = {} vs n = {})",
                self.grid.n, other.grid.n
            )));
        }
        Ok(())
    }

    /// `(∇_h v)_i = (v_{i+1} - v_i)/h`, `i = 0..n-1`.
    pub fn forward_diff(&self) -> Vec<Complex64> {
        let h = self.grid.h;
        self.values.windows(2).map(|w| (w[1] - w[0]) / h).collect()
    }

    /// `(Δ_h v)_i = (v_{i+1} - 2v_i + v_{i-1})/h²` at interior nodes `i = 1..n-1`.
    pub fn discrete_laplacian(&self) -> Vec<Complex64> {
        let h2 = self.grid.h * self.grid.h;
        self.values
            .windows(3)
            .map(|w| (w[2] - 2.0 * w[1] + w[0]) / h2)
            .collect()
    }

    /// `(v, w)_h = h Σ_{i=1}^{n-1} v_i conj(w_i)`.
    pub fn inner_h(&self, other: &GridFunction) -> Result<Complex64> {
        self.check_same_grid(other)?;
        let n = self.grid.n;
        let s: Complex64 = (1..n)
            .map(|i| self.values[i] * other.values[i].conj())
            .sum();
        Ok(s * self.grid.h)
    }

    /// Interior discrete L² norm, nodes `1..n-1` only.
    pub fn norm_l2h(&self) -> f64 {
        let n = self.grid.n;
        let s: f64 = self.values[1..n].iter().map(|v| v.norm_sqr()).sum();
        (s * self.grid.h).sqrt()
    }

    /// Discrete H¹ seminorm over the forward differences `0..n-1`.
    pub fn seminorm_h1h(&self) -> f64 {
        let h = self.grid.h;
        let s: f64 = self
            .values
            .windows(2)
            .map(|w| ((w[1] - w[0]) / h).norm_sqr())
            .sum();
        (s * h).sqrt()
    }

    /// `‖v‖_V = (k²‖v‖²_{0,h} + |v|²_{1,h})^{1/2}`.
    pub fn norm_v(&self, k: f64) -> f64 {
        let l2 = self.norm_l2h();
        let h1 = self.seminorm_h1h();
        (k * k * l2 * l2 + h1 * h1).sqrt()
    }

    /// Maximum modulus over all `n + 1` nodes.
    pub fn norm_linf(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Samples `f` at every node of `grid`.
pub fn sample<F>(f: F, grid: &UniformGrid) -> Result<GridFunction>
where
    F: Fn(f64) -> Complex64,
{
    let mut values = Vec::with_capacity(grid.num_nodes());
    for i in 0..grid.num_nodes() {
        let x = grid.node(i);
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteSample { index: i, x });
        }
        values.push(v);
    }
    Ok(GridFunction {
        grid: *grid,
        values,
    })
}

/// Copies the values of `fine` at the nodes shared with `coarse`.
pub fn restrict(fine: &GridFunction, coarse: &UniformGrid) -> Result<GridFunction> {
    let nf = fine.grid.n;
    let nc = coarse.n;
    let same_length =
        (fine.grid.length - coarse.length).abs() <= 1e-14 * coarse.length.max(fine.grid.length);
    if !same_length || nc > nf || !nf.is_multiple_of(nc) {
        return Err(Error::NonNestedGrids {
            fine: nf,
            coarse: nc,
        });
    }
    let stride = nf / nc;
    let values = fine.values.iter().step_by(stride).copied().collect();
    Ok(GridFunction {
        grid: *coarse,
        values,
    })
}
