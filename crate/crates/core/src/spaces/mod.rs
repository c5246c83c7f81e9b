//! Concrete CAT(0) model spaces.

mod euclidean;
mod hyperboloid;
mod star_tree;

pub use euclidean::{Euclidean, EuclideanPoint};
pub use hyperboloid::{Hyperboloid, HyperboloidPoint};
pub use star_tree::{StarTree, TreePoint};

use crate::error::{Error, Result};

pub fn make_euclidean(dim: usize) -> Result<Euclidean> {
    Euclidean::new(dim)
}

pub fn make_hyperboloid(dim: usize) -> Result<Hyperboloid> {
    Hyperboloid::new(dim)
}

pub fn make_star_tree(lengths: &[f64]) -> Result<StarTree> {
    StarTree::new(lengths)
}

/// Uniform direction on the unit sphere of `ℝ^dim`, by rejection from the cube.
pub(crate) fn random_direction<R: rand::Rng + ?Sized>(rng: &mut R, dim: usize) -> alloc::vec::Vec<f64> {
    loop {
        let v: alloc::vec::Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let n2: f64 = v.iter().map(|c| c * c).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            let n = libm::sqrt(n2);
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

pub(crate) fn finite(coords: &[f64]) -> Result<()> {
    if coords.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidPoint(alloc::format!("non-finite coordinates {coords:?}")))
    }
}
