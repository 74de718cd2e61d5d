//! Complex tridiagonal systems and their direct (Thomas) solution.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative pivot threshold below which elimination is declared singular.
pub const PIVOT_TOL: f64 = 1e-14;

/// A tridiagonal system with `n + 1` unknowns.
///
/// Row `i` reads `lower[i-1]·x_{i-1} + diag[i]·x_i + upper[i]·x_{i+1} = rhs[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub lower: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    pub upper: Vec<Complex64>,
    pub rhs: Vec<Complex64>,
}

impl TridiagonalSystem {
    pub fn new(
        lower: Vec<Complex64>,
        diag: Vec<Complex64>,
        upper: Vec<Complex64>,
        rhs: Vec<Complex64>,
    ) -> Result<Self> {
        let sys = Self {
            lower,
            diag,
            upper,
            rhs,
        };
        sys.check_dims()?;
        Ok(sys)
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    fn check_dims(&self) -> Result<()> {
        let m = self.diag.len();
        if m == 0 || self.lower.len() + 1 != m || self.upper.len() + 1 != m || self.rhs.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "tridiagonal lengths lower {}, diag {}, upper {}, rhs {}",
                self.lower.len(),
                m,
                self.upper.len(),
                self.rhs.len()
            )));
        }
        Ok(())
    }

    /// Matrix-vector product `A x`.
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_dims()?;
        let m = self.dim();
        if x.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a system of dimension {m}",
                x.len()
            )));
        }
        Ok((0..m)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < m {
                    acc += self.upper[i] * x[i + 1];
                }
                acc
            })
            .collect())
    }

    fn max_coefficient(&self) -> f64 {
        self.lower
            .iter()
            .chain(&self.diag)
            .chain(&self.upper)
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Thomas algorithm without row pivoting.
pub fn solve_tridiagonal(sys: &TridiagonalSystem) -> Result<Vec<Complex64>> {
    sys.check_dims()?;
    let m = sys.dim();
    let threshold = PIVOT_TOL * sys.max_coefficient();

    let mut c_prime = vec![Complex64::new(0.0, 0.0); m];
    let mut x = vec![Complex64::new(0.0, 0.0); m];

    let mut pivot = sys.diag[0];
    if !(pivot.norm() > threshold) {
        return Err(Error::SingularSystem {
            row: 0,
            pivot: pivot.norm(),
        });
    }
    if m > 1 {
        c_prime[0] = sys.upper[0] / pivot;
    }
    x[0] = sys.rhs[0] / pivot;

    for i in 1..m {
        let l = sys.lower[i - 1];
        pivot = sys.diag[i] - l * c_prime[i - 1];
        if !(pivot.norm() > threshold) {
            return Err(Error::SingularSystem {
                row: i,
                pivot: pivot.norm(),
            });
        }
        if i + 1 < m {
            c_prime[i] = sys.upper[i] / pivot;
        }
        x[i] = (sys.rhs[i] - l * x[i - 1]) / pivot;
    }
    for i in (0..m - 1).rev() {
        let next = x[i + 1];
        x[i] -= c_prime[i] * next;
    }
    Ok(x)
}

/// `max_i |(A x - b)_i|`.
pub fn residual_inf_norm(sys: &TridiagonalSystem, x: &[Complex64]) -> Result<f64> {
    let ax = sys.apply(x)?;
    Ok(ax
        .iter()
        .zip(&sys.rhs)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}
