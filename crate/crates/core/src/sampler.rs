use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geodesic::GeodesicSpace;

/// Seeded sample source for the property checks.
///
/// `radius` bounds the sampled region: a cube of that half-width for
/// Euclidean space, a geodesic ball around the base point for the hyperboloid,
/// and offsets up to `radius` on each edge of a star tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampler {
    pub seed: u64,
    pub count: usize,
    pub radius: f64,
}

impl Sampler {
    pub fn new(seed: u64, count: usize, radius: f64) -> Self {
        Sampler { seed, count, radius }
    }

    /// A fresh generator; equal seeds replay the same stream.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Spaces that can draw random points.
pub trait Sample: GeodesicSpace {
    /// A point in the bounded sampling region of the given radius.
    fn sample_point<R: rand::Rng + ?Sized>(&self, rng: &mut R, radius: f64) -> Self::Point;

    /// A point within distance `radius` of `center`.
    fn sample_near<R: rand::Rng + ?Sized>(&self, rng: &mut R, center: &Self::Point, radius: f64) -> Self::Point;
}
