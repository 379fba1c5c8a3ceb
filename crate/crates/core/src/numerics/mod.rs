//! Numerical kernels shared by the forward model, migration and theory code.

pub mod fft;
pub mod oracles;
pub mod phase_sum;
pub mod quadrature;
pub mod random_field;

pub use fft::{analytic_signal, AnalyticSignal, Fft3};
pub use phase_sum::{phase_sum, phase_sum_direct};
pub use quadrature::{adaptive_complex, Quadrature1D, RuleKind};

use crate::error::{Error, Result};

/// Uniform grid `start + i * step`, `i < len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl UniformGrid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(step > 0.0) || !start.is_finite() || len == 0 {
            return Err(Error::InvalidInput(format!(
                "uniform grid needs a positive step and at least one node (start {start}, step {step}, len {len})"
            )));
        }
        Ok(Self { start, step, len })
    }

    /// Grid `start:step:end` with the end point included when it falls on the grid.
    pub fn from_range(start: f64, step: f64, end: f64) -> Result<Self> {
        if !(step > 0.0) || end < start {
            return Err(Error::InvalidInput(format!("bad range {start}:{step}:{end}")));
        }
        let len = ((end - start) / step + 1e-9).floor() as usize + 1;
        Self::new(start, step, len)
    }

    #[inline]
    pub fn at(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.at(self.len - 1)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.at(i)).collect()
    }

    /// Trapezoid weights on the grid nodes.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let n = self.len;
        (0..n)
            .map(|i| if n > 1 && (i == 0 || i == n - 1) { 0.5 * self.step } else { self.step })
            .collect()
    }
}
