//! The `(X, ρ, W)` abstraction: a metric together with a convex-combination
//! operator, and sampled verification of the W-axioms, the CN midpoint
//! inequality and the segment identities on any concrete space.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::error::Result;
use crate::report::{AxiomReport, Check};
use crate::sampler::{Sample, Sampler};

/// Kind and parameters of a concrete space.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceDescriptor {
    Euclidean { dim: usize },
    Hyperboloid { dim: usize },
    StarTree { lengths: Vec<f64> },
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceDescriptor::Euclidean { dim } => write!(f, "euclidean:{dim}"),
            SpaceDescriptor::Hyperboloid { dim } => write!(f, "hyperboloid:{dim}"),
            SpaceDescriptor::StarTree { lengths } => {
                f.write_str("star-tree:")?;
                for (i, l) in lengths.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{l}")?;
                }
                Ok(())
            }
        }
    }
}

/// A hyperbolic space in the sense of the W-axioms.
///
/// `combine(p, q, λ)` is the point `(1-λ)p ⊕ λq` on the geodesic from `p` to
/// `q`. Points are compared by distance, never by coordinates.
pub trait GeodesicSpace: Clone + fmt::Debug {
    type Point: Clone + fmt::Debug + PartialEq;

    fn descriptor(&self) -> SpaceDescriptor;

    /// Fails if `p` does not belong to this space.
    fn validate(&self, p: &Self::Point) -> Result<()>;

    fn distance(&self, p: &Self::Point, q: &Self::Point) -> Result<f64>;

    fn combine(&self, p: &Self::Point, q: &Self::Point, lambda: f64) -> Result<Self::Point>;

    /// Absolute tolerance appropriate for this model's floating-point error.
    fn default_tolerance(&self) -> f64;

    fn midpoint(&self, p: &Self::Point, q: &Self::Point) -> Result<Self::Point> {
        self.combine(p, q, 0.5)
    }

    fn approx_eq(&self, p: &Self::Point, q: &Self::Point, tol: f64) -> Result<bool> {
        Ok(self.distance(p, q)? <= tol)
    }
}

pub(crate) fn check_weight(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(crate::Error::WeightOutOfRange(lambda))
    }
}

fn unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}

/// Checks (W1)–(W4) on `sampler.count` random configurations. Returns one
/// report per axiom, in order.
pub fn check_w_axioms<S: Sample>(space: &S, sampler: &Sampler, tol: f64) -> Result<Vec<AxiomReport>> {
    let mut rng = sampler.rng();
    let mut w1 = AxiomReport::new(Check::W1, tol);
    let mut w2 = AxiomReport::new(Check::W2, tol);
    let mut w3 = AxiomReport::new(Check::W3, tol);
    let mut w4 = AxiomReport::new(Check::W4, tol);
    for _ in 0..sampler.count {
        let x = space.sample_point(&mut rng, sampler.radius);
        let y = space.sample_point(&mut rng, sampler.radius);
        let z = space.sample_point(&mut rng, sampler.radius);
        let w = space.sample_point(&mut rng, sampler.radius);
        let lambda = unit(&mut rng);
        let other = unit(&mut rng);

        let m = space.combine(&x, &y, lambda)?;
        // ρ(z, W(x,y,λ)) ≤ (1-λ)ρ(z,x) + λρ(z,y)
        let lhs = space.distance(&z, &m)?;
        let rhs = (1.0 - lambda) * space.distance(&z, &x)? + lambda * space.distance(&z, &y)?;
        w1.record(lhs - rhs, || format!("x={x:?} y={y:?} z={z:?} λ={lambda}"));

        // ρ(W(x,y,λ), W(x,y,λ')) = |λ-λ'| ρ(x,y)
        let m2 = space.combine(&x, &y, other)?;
        let dev = space.distance(&m, &m2)? - libm::fabs(lambda - other) * space.distance(&x, &y)?;
        w2.record(libm::fabs(dev), || format!("x={x:?} y={y:?} λ={lambda} λ'={other}"));

        // W(x,y,λ) = W(y,x,1-λ)
        let flipped = space.combine(&y, &x, 1.0 - lambda)?;
        w3.record(space.distance(&m, &flipped)?, || format!("x={x:?} y={y:?} λ={lambda}"));

        // ρ(W(x,z,λ), W(y,w,λ)) ≤ (1-λ)ρ(x,y) + λρ(z,w)
        let a = space.combine(&x, &z, lambda)?;
        let b = space.combine(&y, &w, lambda)?;
        let lhs = space.distance(&a, &b)?;
        let rhs = (1.0 - lambda) * space.distance(&x, &y)? + lambda * space.distance(&z, &w)?;
        w4.record(lhs - rhs, || format!("x={x:?} y={y:?} z={z:?} w={w:?} λ={lambda}"));
    }
    Ok(alloc::vec![w1, w2, w3, w4])
}

/// Bruhat–Tits CN inequality:
/// `ρ(z, ½x⊕½y)² ≤ ½ρ(z,x)² + ½ρ(z,y)² − ¼ρ(x,y)²`.
pub fn cn_excess<S: GeodesicSpace>(space: &S, x: &S::Point, y: &S::Point, z: &S::Point) -> Result<f64> {
    let m = space.midpoint(x, y)?;
    let lhs = sq(space.distance(z, &m)?);
    let rhs = 0.5 * sq(space.distance(z, x)?) + 0.5 * sq(space.distance(z, y)?) - 0.25 * sq(space.distance(x, y)?);
    Ok(lhs - rhs)
}

pub fn check_cn_inequality<S: Sample>(space: &S, sampler: &Sampler, tol: f64) -> Result<AxiomReport> {
    let mut rng = sampler.rng();
    let mut report = AxiomReport::new(Check::Cn, tol);
    for _ in 0..sampler.count {
        let x = space.sample_point(&mut rng, sampler.radius);
        let y = space.sample_point(&mut rng, sampler.radius);
        let z = space.sample_point(&mut rng, sampler.radius);
        let excess = cn_excess(space, &x, &y, &z)?;
        report.record(excess, || format!("x={x:?} y={y:?} z={z:?}"));
    }
    Ok(report)
}

/// Largest deviation of `ρ(x, m) = λρ(x,y)` and `ρ(y, m) = (1−λ)ρ(x,y)` for
/// `m = (1−λ)x ⊕ λy`.
pub fn segment_deviation<S: GeodesicSpace>(space: &S, x: &S::Point, y: &S::Point, lambda: f64) -> Result<f64> {
    let m = space.combine(x, y, lambda)?;
    let d = space.distance(x, y)?;
    let near = libm::fabs(space.distance(x, &m)? - lambda * d);
    let far = libm::fabs(space.distance(y, &m)? - (1.0 - lambda) * d);
    Ok(near.max(far))
}

pub fn check_segment_identities<S: Sample>(space: &S, sampler: &Sampler, tol: f64) -> Result<AxiomReport> {
    let mut rng = sampler.rng();
    let mut report = AxiomReport::new(Check::SegmentIdentities, tol);
    for i in 0..sampler.count {
        let x = space.sample_point(&mut rng, sampler.radius);
        let y = space.sample_point(&mut rng, sampler.radius);
        let lambda = match i % 64 {
            0 => 0.0,
            1 => 1.0,
            _ => unit(&mut rng),
        };
        let dev = segment_deviation(space, &x, &y, lambda)?;
        report.record(dev, || format!("x={x:?} y={y:?} λ={lambda}"));
    }
    Ok(report)
}

/// Sampled midpoint uniqueness.
///
/// For each sampled pair `p, q` with `D = ρ(p,q)`, random points `w` near the
/// midpoint `m` are pulled along the geodesic from the farther endpoint to
/// distance exactly `D/2` from it. Whenever the resulting `z` satisfies both
/// segment identities at `λ = ½` within `tol`, the CN inequality forces
/// `ρ(z, m)² ≤ D·tol + tol²`; the recorded excess is `ρ(z,m)` minus that
/// radius (plus `tol` of rounding slack).
pub fn check_midpoint_uniqueness<S: Sample>(space: &S, sampler: &Sampler, tol: f64) -> Result<AxiomReport> {
    const PROBES: usize = 8;
    let mut rng = sampler.rng();
    let mut report = AxiomReport::new(Check::MidpointUniqueness, tol);
    for _ in 0..sampler.count {
        let p = space.sample_point(&mut rng, sampler.radius);
        let q = space.sample_point(&mut rng, sampler.radius);
        let m = space.midpoint(&p, &q)?;
        let d = space.distance(&p, &q)?;
        let allowed = libm::sqrt(d * tol + tol * tol) + tol;
        let mut tested = false;
        for k in 0..PROBES {
            let scale = allowed * [0.25, 0.5, 1.0, 4.0][k % 4];
            let w = space.sample_near(&mut rng, &m, scale);
            let (wp, wq) = (space.distance(&w, &p)?, space.distance(&w, &q)?);
            let (far, dist) = if wp >= wq { (&p, wp) } else { (&q, wq) };
            if dist <= 0.0 {
                continue;
            }
            let z = space.combine(far, &w, (0.5 * d / dist).min(1.0))?;
            let dp = libm::fabs(space.distance(&z, &p)? - 0.5 * d);
            let dq = libm::fabs(space.distance(&z, &q)? - 0.5 * d);
            if dp <= tol && dq <= tol {
                tested = true;
                let excess = space.distance(&z, &m)? - allowed;
                report.record(excess, || format!("p={p:?} q={q:?} z={z:?}"));
            }
        }
        if !tested {
            report.skip();
        }
    }
    Ok(report)
}

#[inline]
pub(crate) fn sq(x: f64) -> f64 {
    x * x
}
