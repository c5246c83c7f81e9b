use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geodesic::{check_weight, GeodesicSpace, SpaceDescriptor};
use crate::sampler::Sample;

/// `ℝ^d` with the Euclidean norm; `W` is the straight segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Euclidean {
    dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanPoint(pub Vec<f64>);

impl EuclideanPoint {
    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for EuclideanPoint {
    fn from(v: Vec<f64>) -> Self {
        EuclideanPoint(v)
    }
}

impl Euclidean {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("euclidean dimension must be at least 1".into()));
        }
        Ok(Euclidean { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn origin(&self) -> EuclideanPoint {
        EuclideanPoint(alloc::vec![0.0; self.dim])
    }

    pub fn point(&self, coords: &[f64]) -> Result<EuclideanPoint> {
        let p = EuclideanPoint(coords.to_vec());
        self.validate(&p)?;
        Ok(p)
    }

    pub fn norm(p: &EuclideanPoint) -> f64 {
        libm::sqrt(p.0.iter().map(|c| c * c).sum())
    }
}

impl GeodesicSpace for Euclidean {
    type Point = EuclideanPoint;

    fn descriptor(&self) -> SpaceDescriptor {
        SpaceDescriptor::Euclidean { dim: self.dim }
    }

    fn validate(&self, p: &EuclideanPoint) -> Result<()> {
        if p.0.len() != self.dim {
            return Err(Error::InvalidPoint(format!("expected {} coordinates, got {}", self.dim, p.0.len())));
        }
        super::finite(&p.0)
    }

    fn distance(&self, p: &EuclideanPoint, q: &EuclideanPoint) -> Result<f64> {
        self.validate(p)?;
        self.validate(q)?;
        Ok(libm::sqrt(p.0.iter().zip(&q.0).map(|(a, b)| (a - b) * (a - b)).sum()))
    }

    fn combine(&self, p: &EuclideanPoint, q: &EuclideanPoint, lambda: f64) -> Result<EuclideanPoint> {
        check_weight(lambda)?;
        self.validate(p)?;
        self.validate(q)?;
        if lambda == 0.0 {
            return Ok(p.clone());
        }
        if lambda == 1.0 {
            return Ok(q.clone());
        }
        Ok(EuclideanPoint(p.0.iter().zip(&q.0).map(|(a, b)| (1.0 - lambda) * a + lambda * b).collect()))
    }

    fn default_tolerance(&self) -> f64 {
        1e-9
    }
}

impl Sample for Euclidean {
    fn sample_point<R: rand::Rng + ?Sized>(&self, rng: &mut R, radius: f64) -> EuclideanPoint {
        EuclideanPoint((0..self.dim).map(|_| rng.random_range(-radius..=radius)).collect())
    }

    fn sample_near<R: rand::Rng + ?Sized>(&self, rng: &mut R, center: &EuclideanPoint, radius: f64) -> EuclideanPoint {
        let dir = super::random_direction(rng, self.dim);
        let t = radius * rng.random::<f64>();
        EuclideanPoint(center.0.iter().zip(dir).map(|(c, u)| c + t * u).collect())
    }
}
