use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geodesic::{check_weight, GeodesicSpace, SpaceDescriptor};
use crate::sampler::Sample;

/// A metric star: `m ≥ 2` segments of given lengths glued at a common center.
#[derive(Debug, Clone, PartialEq)]
pub struct StarTree {
    lengths: Vec<f64>,
}

/// A point on edge `edge` at distance `offset` from the center. The center is
/// stored as edge 0, offset 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreePoint {
    pub edge: usize,
    pub offset: f64,
}

impl TreePoint {
    pub const CENTER: TreePoint = TreePoint { edge: 0, offset: 0.0 };

    fn canonical(edge: usize, offset: f64) -> TreePoint {
        if offset <= 0.0 {
            TreePoint::CENTER
        } else {
            TreePoint { edge, offset }
        }
    }

    pub fn is_center(&self) -> bool {
        self.offset == 0.0
    }
}

impl StarTree {
    pub fn new(lengths: &[f64]) -> Result<Self> {
        if lengths.len() < 2 {
            return Err(Error::InvalidParameter("a star tree needs at least two edges".into()));
        }
        if let Some(l) = lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::InvalidParameter(format!("edge length {l} is not positive")));
        }
        Ok(StarTree { lengths: lengths.to_vec() })
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn edges(&self) -> usize {
        self.lengths.len()
    }

    pub fn center(&self) -> TreePoint {
        TreePoint::CENTER
    }

    pub fn point(&self, edge: usize, offset: f64) -> Result<TreePoint> {
        let p = TreePoint::canonical(edge, offset);
        self.validate(&TreePoint { edge, offset })?;
        Ok(p)
    }

    fn dist(p: &TreePoint, q: &TreePoint) -> f64 {
        if p.edge == q.edge {
            libm::fabs(p.offset - q.offset)
        } else {
            p.offset + q.offset
        }
    }
}

impl GeodesicSpace for StarTree {
    type Point = TreePoint;

    fn descriptor(&self) -> SpaceDescriptor {
        SpaceDescriptor::StarTree { lengths: self.lengths.clone() }
    }

    fn validate(&self, p: &TreePoint) -> Result<()> {
        let Some(&len) = self.lengths.get(p.edge) else {
            return Err(Error::InvalidPoint(format!("edge {} does not exist", p.edge)));
        };
        if !p.offset.is_finite() || p.offset < 0.0 || p.offset > len {
            return Err(Error::InvalidPoint(format!("offset {} outside [0, {len}] on edge {}", p.offset, p.edge)));
        }
        Ok(())
    }

    fn distance(&self, p: &TreePoint, q: &TreePoint) -> Result<f64> {
        self.validate(p)?;
        self.validate(q)?;
        Ok(Self::dist(p, q))
    }

    /// Same edge: linear in the offsets. Different edges: walk `λ·ρ(p,q)` from
    /// `p` along the path through the center.
    fn combine(&self, p: &TreePoint, q: &TreePoint, lambda: f64) -> Result<TreePoint> {
        check_weight(lambda)?;
        self.validate(p)?;
        self.validate(q)?;
        if lambda == 0.0 {
            return Ok(*p);
        }
        if lambda == 1.0 {
            return Ok(*q);
        }
        if p.edge == q.edge {
            let t = (1.0 - lambda) * p.offset + lambda * q.offset;
            return Ok(TreePoint::canonical(p.edge, t));
        }
        let arc = lambda * (p.offset + q.offset);
        if arc < p.offset {
            Ok(TreePoint::canonical(p.edge, p.offset - arc))
        } else {
            Ok(TreePoint::canonical(q.edge, (arc - p.offset).min(q.offset)))
        }
    }

    fn default_tolerance(&self) -> f64 {
        1e-9
    }
}

impl Sample for StarTree {
    fn sample_point<R: rand::Rng + ?Sized>(&self, rng: &mut R, radius: f64) -> TreePoint {
        let edge = rng.random_range(0..self.lengths.len());
        let t = rng.random::<f64>() * radius.min(self.lengths[edge]);
        TreePoint::canonical(edge, t)
    }

    fn sample_near<R: rand::Rng + ?Sized>(&self, rng: &mut R, center: &TreePoint, radius: f64) -> TreePoint {
        let u = rng.random::<f64>() * radius;
        let outward = rng.random::<bool>();
        if outward && !center.is_center() {
            let t = (center.offset + u).min(self.lengths[center.edge]);
            return TreePoint::canonical(center.edge, t);
        }
        if u <= center.offset {
            return TreePoint::canonical(center.edge, center.offset - u);
        }
        // Past the center onto a random edge.
        let edge = rng.random_range(0..self.lengths.len());
        let t = (u - center.offset).min(self.lengths[edge]);
        TreePoint::canonical(edge, t)
    }
}
