//! Continuous Fourier transforms on centered grids.
//!
//! Convention, per axis with action scale `hbar`:
//!
//! ```text
//! forward:  F(k) = sum_x f(x) exp(-i x k / hbar) dx
//! inverse:  f(x) = 1/(2 pi hbar) sum_k F(k) exp(+i x k / hbar) dk
//! ```
//!
//! so a unit-integral density maps to a characteristic function equal to one
//! at the origin. Grids are centered: `x_j = (j - N/2) dx` with `N` even, and
//! the conjugate spacing is `dk = 2 pi hbar / (N dx)`.

use std::f64::consts::PI;

use ndarray::{ArrayD, Axis, Zip};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// One centered grid axis for the transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierAxis {
    pub points: usize,
    pub spacing: f64,
}

impl FourierAxis {
    pub fn new(points: usize, spacing: f64) -> Result<Self> {
        if points < 2 || points % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "transform axes need an even point count, got {points}"
            )));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidInput(format!("spacing must be positive, got {spacing}")));
        }
        Ok(Self { points, spacing })
    }

    /// Axis whose nodes span `[-half_width, half_width)`.
    pub fn spanning(half_width: f64, points: usize) -> Result<Self> {
        Self::new(points, 2.0 * half_width / points as f64)
    }

    pub fn coord(&self, j: usize) -> f64 {
        (j as f64 - (self.points / 2) as f64) * self.spacing
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.coord(j)).collect()
    }

    /// The reciprocal axis produced by a transform of this one.
    pub fn conjugate(&self, hbar: f64) -> FourierAxis {
        FourierAxis {
            points: self.points,
            spacing: 2.0 * PI * hbar / (self.points as f64 * self.spacing),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Transforms `values` in place along every axis; returns the conjugate axes.
pub fn dft_nd(
    values: &mut ArrayD<Complex64>,
    axes: &[FourierAxis],
    hbar: f64,
    direction: Direction,
) -> Result<Vec<FourierAxis>> {
    if axes.len() != values.ndim() {
        return Err(Error::DimensionMismatch(format!(
            "{} axis specs for a {}-dimensional grid",
            axes.len(),
            values.ndim()
        )));
    }
    for (i, (ax, &n)) in axes.iter().zip(values.shape()).enumerate() {
        if ax.points != n {
            return Err(Error::DimensionMismatch(format!(
                "axis {i} declares {} points but the grid has {n}",
                ax.points
            )));
        }
        FourierAxis::new(ax.points, ax.spacing)?;
    }
    if !(hbar > 0.0) {
        return Err(Error::InvalidInput(format!("hbar must be positive, got {hbar}")));
    }

    let mut planner = FftPlanner::<f64>::new();
    for (i, ax) in axes.iter().enumerate() {
        let n = ax.points;
        let fft = match direction {
            Direction::Forward => planner.plan_fft_forward(n),
            Direction::Inverse => planner.plan_fft_inverse(n),
        };
        let scale = match direction {
            Direction::Forward => ax.spacing,
            Direction::Inverse => ax.spacing / (2.0 * PI * hbar),
        };
        let half_sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
        Zip::from(values.lanes_mut(Axis(i))).par_for_each(|mut lane| {
            let mut buf: Vec<Complex64> = lane
                .iter()
                .enumerate()
                .map(|(j, &v)| if j % 2 == 0 { v } else { -v })
                .collect();
            fft.process(&mut buf);
            for (m, (out, v)) in lane.iter_mut().zip(buf).enumerate() {
                let sign = if m % 2 == 0 { half_sign } else { -half_sign };
                *out = v * (sign * scale);
            }
        });
    }
    Ok(axes.iter().map(|a| a.conjugate(hbar)).collect())
}
