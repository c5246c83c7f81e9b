use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geodesic::{check_weight, GeodesicSpace, SpaceDescriptor};
use crate::sampler::Sample;

/// Hyperbolic `d`-space in the hyperboloid model: the upper sheet
/// `⟨x,x⟩_L = −1, x₀ > 0` of the Minkowski form
/// `⟨x,y⟩_L = −x₀y₀ + x₁y₁ + … + x_d y_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperboloid {
    dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperboloidPoint(pub Vec<f64>);

impl HyperboloidPoint {
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Coordinates `x₁ … x_d`.
    pub fn spatial(&self) -> &[f64] {
        &self.0[1..]
    }
}

/// Relative tolerance on the sheet equation, scaled by `1 + x₀²`.
const SHEET_TOL: f64 = 1e-9;

pub(crate) fn minkowski(x: &[f64], y: &[f64]) -> f64 {
    -x[0] * y[0] + x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum::<f64>()
}

impl Hyperboloid {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("hyperboloid dimension must be at least 1".into()));
        }
        Ok(Hyperboloid { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The base point `(1, 0, …, 0)`.
    pub fn origin(&self) -> HyperboloidPoint {
        let mut v = alloc::vec![0.0; self.dim + 1];
        v[0] = 1.0;
        HyperboloidPoint(v)
    }

    /// Full ambient coordinates; must already lie on the sheet.
    pub fn point(&self, coords: &[f64]) -> Result<HyperboloidPoint> {
        let p = HyperboloidPoint(coords.to_vec());
        self.validate(&p)?;
        Ok(p)
    }

    /// Lifts spatial coordinates `(x₁ … x_d)` onto the sheet.
    pub fn lift(&self, spatial: &[f64]) -> Result<HyperboloidPoint> {
        if spatial.len() != self.dim {
            return Err(Error::InvalidPoint(format!(
                "expected {} spatial coordinates, got {}",
                self.dim,
                spatial.len()
            )));
        }
        super::finite(spatial)?;
        let s2: f64 = spatial.iter().map(|c| c * c).sum();
        let mut v = Vec::with_capacity(self.dim + 1);
        v.push(libm::sqrt(1.0 + s2));
        v.extend_from_slice(spatial);
        Ok(HyperboloidPoint(v))
    }

    /// The point at distance `t` from the origin in unit direction `dir`.
    pub fn from_polar(&self, t: f64, dir: &[f64]) -> HyperboloidPoint {
        let sh = libm::sinh(t);
        let mut v = Vec::with_capacity(self.dim + 1);
        v.push(libm::cosh(t));
        v.extend(dir.iter().map(|u| sh * u));
        HyperboloidPoint(v)
    }

    fn renormalize(mut v: Vec<f64>) -> HyperboloidPoint {
        let q = -minkowski(&v, &v);
        if q > 0.0 {
            let s = libm::sqrt(q);
            for c in v.iter_mut() {
                *c /= s;
            }
        }
        if v[0] < 0.0 {
            for c in v.iter_mut() {
                *c = -*c;
            }
        }
        HyperboloidPoint(v)
    }

    fn raw_distance(x: &[f64], y: &[f64]) -> f64 {
        // Clamped so acosh never sees an argument below 1.
        let c = (-minkowski(x, y)).max(1.0);
        if c < 2.0 {
            // Near the diagonal: ⟨x−y, x−y⟩_L = 4 sinh²(ρ/2) avoids acosh's
            // loss of precision at 1.
            let mut diff2 = -(x[0] - y[0]) * (x[0] - y[0]);
            for (a, b) in x[1..].iter().zip(&y[1..]) {
                diff2 += (a - b) * (a - b);
            }
            2.0 * libm::asinh(0.5 * libm::sqrt(diff2.max(0.0)))
        } else {
            libm::acosh(c)
        }
    }
}

impl GeodesicSpace for Hyperboloid {
    type Point = HyperboloidPoint;

    fn descriptor(&self) -> SpaceDescriptor {
        SpaceDescriptor::Hyperboloid { dim: self.dim }
    }

    fn validate(&self, p: &HyperboloidPoint) -> Result<()> {
        if p.0.len() != self.dim + 1 {
            return Err(Error::InvalidPoint(format!(
                "expected {} ambient coordinates, got {}",
                self.dim + 1,
                p.0.len()
            )));
        }
        super::finite(&p.0)?;
        if p.0[0] <= 0.0 {
            return Err(Error::InvalidPoint(format!("x0 = {} is not positive", p.0[0])));
        }
        let off = libm::fabs(minkowski(&p.0, &p.0) + 1.0);
        if off > SHEET_TOL * (1.0 + p.0[0] * p.0[0]) {
            return Err(Error::InvalidPoint(format!("point is off the sheet by {off:e}")));
        }
        Ok(())
    }

    fn distance(&self, p: &HyperboloidPoint, q: &HyperboloidPoint) -> Result<f64> {
        self.validate(p)?;
        self.validate(q)?;
        Ok(Self::raw_distance(&p.0, &q.0))
    }

    /// `(sinh((1−λ)ℓ)·x + sinh(λℓ)·y) / sinh ℓ` with `ℓ = ρ(x,y)`, pushed back
    /// onto the sheet.
    fn combine(&self, p: &HyperboloidPoint, q: &HyperboloidPoint, lambda: f64) -> Result<HyperboloidPoint> {
        check_weight(lambda)?;
        self.validate(p)?;
        self.validate(q)?;
        if lambda == 0.0 {
            return Ok(p.clone());
        }
        if lambda == 1.0 {
            return Ok(q.clone());
        }
        let l = Self::raw_distance(&p.0, &q.0);
        let v: Vec<f64> = if l < 1e-12 {
            p.0.iter().zip(&q.0).map(|(a, b)| (1.0 - lambda) * a + lambda * b).collect()
        } else {
            let s = libm::sinh(l);
            let wp = libm::sinh((1.0 - lambda) * l) / s;
            let wq = libm::sinh(lambda * l) / s;
            p.0.iter().zip(&q.0).map(|(a, b)| wp * a + wq * b).collect()
        };
        let out = Self::renormalize(v);
        super::finite(&out.0)?;
        Ok(out)
    }

    fn default_tolerance(&self) -> f64 {
        1e-7
    }
}

impl Sample for Hyperboloid {
    fn sample_point<R: rand::Rng + ?Sized>(&self, rng: &mut R, radius: f64) -> HyperboloidPoint {
        let dir = super::random_direction(rng, self.dim);
        let t = radius * rng.random::<f64>();
        self.from_polar(t, &dir)
    }

    fn sample_near<R: rand::Rng + ?Sized>(
        &self,
        rng: &mut R,
        center: &HyperboloidPoint,
        radius: f64,
    ) -> HyperboloidPoint {
        // Exponential map at `center` applied to a random tangent vector.
        let dir = super::random_direction(rng, self.dim);
        let t = radius * rng.random::<f64>();
        // Tangent basis at the center: push the origin frame forward by the
        // boost taking the origin to `center`.
        let p = &center.0;
        let x0 = p[0];
        let s = &p[1..];
        // Boost applied to (0, dir): tangent vector at center.
        let sd: f64 = s.iter().zip(&dir).map(|(a, b)| a * b).sum();
        let mut v = Vec::with_capacity(self.dim + 1);
        v.push(sd);
        for (si, di) in s.iter().zip(&dir) {
            v.push(di + si * sd / (1.0 + x0));
        }
        let ch = libm::cosh(t);
        let sh = libm::sinh(t);
        let out: Vec<f64> = p.iter().zip(&v).map(|(a, b)| ch * a + sh * b).collect();
        Self::renormalize(out)
    }
}
