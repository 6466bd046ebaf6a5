//! Shared numerical machinery: quadrature, transforms, grids, root finding.

pub mod fourier;
pub mod grid;
pub mod quadrature;
pub mod roots;

pub use fourier::{dft_nd, Direction, FourierAxis};
pub use grid::{integrate_grid, pairwise_sum, UniformAxis};
pub use quadrature::{
    integrate, integrate_semi_infinite, wynn_epsilon, KernelHints, QuadratureResult,
};
pub use roots::find_root_bracketed;
