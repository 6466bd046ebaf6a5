//! Uniform grids, trapezoidal weights and order-fixed reductions.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// A uniform axis from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformAxis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl UniformAxis {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) || points < 2 {
            return Err(Error::InvalidInput(format!(
                "axis [{lo}, {hi}] with {points} points"
            )));
        }
        Ok(Self { lo, hi, points })
    }

    /// Axis symmetric about `center` with the given half-width.
    pub fn centered(center: f64, half_width: f64, points: usize) -> Result<Self> {
        Self::new(center - half_width, center + half_width, points)
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.points - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.coord(i)).collect()
    }

    /// Trapezoidal weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        let h = self.step();
        if i == 0 || i + 1 == self.points {
            0.5 * h
        } else {
            h
        }
    }
}

/// Sum with a fixed binary-tree order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Trapezoidal integral of `f` over the tensor grid.
///
/// The outermost axis is distributed across threads; partial sums are reduced
/// in index order, so the result does not depend on the thread count.
pub fn integrate_grid<F>(axes: &[UniformAxis], f: F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if axes.is_empty() {
        return 0.0;
    }
    let coords: Vec<Vec<f64>> = axes.iter().map(UniformAxis::coords).collect();
    let partials: Vec<f64> = (0..axes[0].points)
        .into_par_iter()
        .map(|i0| {
            let mut point = vec![0.0; axes.len()];
            point[0] = coords[0][i0];
            axes[0].weight(i0) * inner_sum(axes, &coords, 1, &mut point, &f)
        })
        .collect();
    pairwise_sum(&partials)
}

fn inner_sum<F: Fn(&[f64]) -> f64>(
    axes: &[UniformAxis],
    coords: &[Vec<f64>],
    depth: usize,
    point: &mut [f64],
    f: &F,
) -> f64 {
    if depth == axes.len() {
        return f(point);
    }
    let mut local = Vec::with_capacity(axes[depth].points);
    for i in 0..axes[depth].points {
        point[depth] = coords[depth][i];
        local.push(axes[depth].weight(i) * inner_sum(axes, coords, depth + 1, point, f));
    }
    pairwise_sum(&local)
}
