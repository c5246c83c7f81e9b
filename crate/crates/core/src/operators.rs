//! Nonexpansive self-maps of convex subsets of the model spaces.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::marker::PhantomData;

use crate::error::{Error, Result};
use crate::geodesic::{GeodesicSpace, SpaceDescriptor};
use crate::report::{AxiomReport, Check};
use crate::sampler::{Sample, Sampler};
use crate::spaces::{Euclidean, EuclideanPoint, Hyperboloid, HyperboloidPoint, StarTree, TreePoint};

/// Shape of a closed convex set.
#[derive(Debug, Clone, PartialEq)]
pub enum SetShape<P> {
    Whole,
    Ball {
        center: P,
        radius: f64,
    },
    /// Axis-aligned box (Euclidean only).
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    /// `{(e, t) : t ≤ limits[e]}` (star trees only).
    Subtree {
        limits: Vec<f64>,
    },
}

/// A closed convex set together with an upper bound on its diameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexSet<P> {
    shape: SetShape<P>,
    diameter: Option<f64>,
}

impl<P: Clone> ConvexSet<P> {
    pub fn shape(&self) -> &SetShape<P> {
        &self.shape
    }

    /// Exact diameter where computable, otherwise the configured upper bound.
    pub fn diameter(&self) -> Option<f64> {
        self.diameter
    }

    /// The whole space, optionally with a caller-supplied diameter bound.
    pub fn whole(diameter_bound: Option<f64>) -> Result<Self> {
        if let Some(d) = diameter_bound {
            positive("diameter bound", d)?;
        }
        Ok(ConvexSet { shape: SetShape::Whole, diameter: diameter_bound })
    }

    pub fn ball<S: GeodesicSpace<Point = P>>(space: &S, center: P, radius: f64) -> Result<Self> {
        space.validate(&center)?;
        positive("ball radius", radius)?;
        Ok(ConvexSet { shape: SetShape::Ball { center, radius }, diameter: Some(2.0 * radius) })
    }

    /// Replaces the diameter by a looser upper bound `d ≥ d_C`.
    pub fn with_diameter_bound(mut self, d: f64) -> Result<Self> {
        positive("diameter bound", d)?;
        if let Some(exact) = self.diameter {
            if d < exact {
                return Err(Error::InvalidParameter(format!("diameter bound {d} is below the set's diameter {exact}")));
            }
        }
        self.diameter = Some(d);
        Ok(self)
    }
}

impl ConvexSet<EuclideanPoint> {
    pub fn cuboid(space: &Euclidean, lower: &[f64], upper: &[f64]) -> Result<Self> {
        if lower.len() != space.dim() || upper.len() != space.dim() {
            return Err(Error::InvalidParameter("box corners must match the dimension".into()));
        }
        if lower.iter().zip(upper).any(|(l, u)| !(l.is_finite() && u.is_finite() && l <= u)) {
            return Err(Error::InvalidParameter("box needs finite lower <= upper".into()));
        }
        let diam = libm::sqrt(lower.iter().zip(upper).map(|(l, u)| (u - l) * (u - l)).sum());
        Ok(ConvexSet { shape: SetShape::Box { lower: lower.to_vec(), upper: upper.to_vec() }, diameter: Some(diam) })
    }
}

impl ConvexSet<TreePoint> {
    pub fn subtree(space: &StarTree, limits: &[f64]) -> Result<Self> {
        if limits.len() != space.edges() {
            return Err(Error::InvalidParameter("one subtree limit per edge is required".into()));
        }
        for (l, len) in limits.iter().zip(space.lengths()) {
            if !(l.is_finite() && *l >= 0.0 && l <= len) {
                return Err(Error::InvalidParameter(format!("subtree limit {l} outside [0, {len}]")));
            }
        }
        let mut sorted = limits.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        Ok(ConvexSet { shape: SetShape::Subtree { limits: limits.to_vec() }, diameter: Some(sorted[0] + sorted[1]) })
    }
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be positive, got {v}")))
    }
}

/// Membership and nearest-point projection for the supported set shapes.
/// Every space handles the whole space and geodesic balls.
pub trait ConvexSets: GeodesicSpace {
    fn contains(&self, set: &ConvexSet<Self::Point>, p: &Self::Point, tol: f64) -> Result<bool> {
        default_contains(self, set, p, tol)
    }

    fn project(&self, set: &ConvexSet<Self::Point>, p: &Self::Point) -> Result<Self::Point> {
        default_project(self, set, p)
    }

    /// A point of the set fixed by the projection.
    fn anchor(&self, set: &ConvexSet<Self::Point>) -> Option<Self::Point> {
        match set.shape() {
            SetShape::Ball { center, .. } => Some(center.clone()),
            _ => None,
        }
    }
}

fn unsupported<S: GeodesicSpace>(space: &S, set: &ConvexSet<S::Point>) -> Error {
    let kind = match set.shape() {
        SetShape::Whole => "whole space",
        SetShape::Ball { .. } => "ball",
        SetShape::Box { .. } => "box",
        SetShape::Subtree { .. } => "subtree",
    };
    Error::Unsupported(format!("{kind} sets in {}", space.descriptor()))
}

/// Geodesic retraction toward the center; the metric projection onto a ball
/// in any CAT(0) space.
fn project_ball<S: GeodesicSpace>(space: &S, center: &S::Point, radius: f64, p: &S::Point) -> Result<S::Point> {
    let d = space.distance(center, p)?;
    if d <= radius {
        Ok(p.clone())
    } else {
        space.combine(center, p, radius / d)
    }
}

impl ConvexSets for Euclidean {
    fn contains(&self, set: &ConvexSet<EuclideanPoint>, p: &EuclideanPoint, tol: f64) -> Result<bool> {
        match set.shape() {
            SetShape::Box { lower, upper } => {
                self.validate(p)?;
                Ok(p.0.iter().zip(lower.iter().zip(upper)).all(|(c, (l, u))| *c >= l - tol && *c <= u + tol))
            }
            SetShape::Subtree { .. } => Err(unsupported(self, set)),
            _ => default_contains(self, set, p, tol),
        }
    }

    fn project(&self, set: &ConvexSet<EuclideanPoint>, p: &EuclideanPoint) -> Result<EuclideanPoint> {
        match set.shape() {
            SetShape::Box { lower, upper } => {
                self.validate(p)?;
                Ok(EuclideanPoint(p.0.iter().zip(lower.iter().zip(upper)).map(|(c, (l, u))| c.clamp(*l, *u)).collect()))
            }
            SetShape::Ball { center, radius } => {
                // Radial scaling; exact for points on the boundary ray.
                let d = self.distance(center, p)?;
                if d <= *radius {
                    Ok(p.clone())
                } else {
                    let s = radius / d;
                    Ok(EuclideanPoint(center.0.iter().zip(&p.0).map(|(c, x)| c + s * (x - c)).collect()))
                }
            }
            SetShape::Subtree { .. } => Err(unsupported(self, set)),
            SetShape::Whole => default_project(self, set, p),
        }
    }

    fn anchor(&self, set: &ConvexSet<EuclideanPoint>) -> Option<EuclideanPoint> {
        match set.shape() {
            SetShape::Box { lower, upper } => {
                Some(EuclideanPoint(lower.iter().zip(upper).map(|(l, u)| 0.5 * (l + u)).collect()))
            }
            SetShape::Ball { center, .. } => Some(center.clone()),
            _ => None,
        }
    }
}

impl ConvexSets for Hyperboloid {}

impl ConvexSets for StarTree {
    fn contains(&self, set: &ConvexSet<TreePoint>, p: &TreePoint, tol: f64) -> Result<bool> {
        match set.shape() {
            SetShape::Subtree { limits } => {
                self.validate(p)?;
                Ok(p.offset <= limits[p.edge] + tol)
            }
            _ => default_contains(self, set, p, tol),
        }
    }

    fn project(&self, set: &ConvexSet<TreePoint>, p: &TreePoint) -> Result<TreePoint> {
        match set.shape() {
            SetShape::Subtree { limits } => {
                self.validate(p)?;
                // The nearest point lies on the path toward the center.
                self.point(p.edge, p.offset.min(limits[p.edge]))
            }
            _ => default_project(self, set, p),
        }
    }

    fn anchor(&self, set: &ConvexSet<TreePoint>) -> Option<TreePoint> {
        match set.shape() {
            SetShape::Subtree { .. } => Some(TreePoint::CENTER),
            SetShape::Ball { center, .. } => Some(*center),
            _ => None,
        }
    }
}

fn default_contains<S: GeodesicSpace>(space: &S, set: &ConvexSet<S::Point>, p: &S::Point, tol: f64) -> Result<bool> {
    match set.shape() {
        SetShape::Whole => space.validate(p).map(|_| true),
        SetShape::Ball { center, radius } => Ok(space.distance(center, p)? <= radius + tol),
        _ => Err(unsupported(space, set)),
    }
}

fn default_project<S: GeodesicSpace>(space: &S, set: &ConvexSet<S::Point>, p: &S::Point) -> Result<S::Point> {
    match set.shape() {
        SetShape::Whole => {
            space.validate(p)?;
            Ok(p.clone())
        }
        SetShape::Ball { center, radius } => project_ball(space, center, *radius, p),
        _ => Err(unsupported(space, set)),
    }
}

/// A self-map of a space, expected to be nonexpansive.
pub trait Operator<S: GeodesicSpace> {
    fn space(&self) -> &S;

    fn apply(&self, p: &S::Point) -> Result<S::Point>;

    /// A declared fixed point, if one is known.
    fn fixed_point(&self) -> Option<S::Point> {
        None
    }

    fn describe(&self) -> String;
}

impl<S: GeodesicSpace, T: Operator<S> + ?Sized> Operator<S> for Box<T> {
    fn space(&self) -> &S {
        (**self).space()
    }
    fn apply(&self, p: &S::Point) -> Result<S::Point> {
        (**self).apply(p)
    }
    fn fixed_point(&self) -> Option<S::Point> {
        (**self).fixed_point()
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

impl<S: GeodesicSpace, T: Operator<S> + ?Sized> Operator<S> for &T {
    fn space(&self) -> &S {
        (**self).space()
    }
    fn apply(&self, p: &S::Point) -> Result<S::Point> {
        (**self).apply(p)
    }
    fn fixed_point(&self) -> Option<S::Point> {
        (**self).fixed_point()
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

#[derive(Debug, Clone)]
pub struct Identity<S> {
    space: S,
}

pub fn identity<S: GeodesicSpace>(space: &S) -> Identity<S> {
    Identity { space: space.clone() }
}

impl<S: GeodesicSpace> Operator<S> for Identity<S> {
    fn space(&self) -> &S {
        &self.space
    }
    fn apply(&self, p: &S::Point) -> Result<S::Point> {
        self.space.validate(p)?;
        Ok(p.clone())
    }
    fn describe(&self) -> String {
        "identity".into()
    }
}

/// Rotation of the plane about the origin.
#[derive(Debug, Clone)]
pub struct Rotation {
    space: Euclidean,
    angle: f64,
    cos: f64,
    sin: f64,
}

pub fn make_rotation(space: &Euclidean, angle: f64) -> Result<Rotation> {
    if space.dim() != 2 {
        return Err(Error::SpaceMismatch(format!("rotation needs euclidean:2, got {}", space.descriptor())));
    }
    if !angle.is_finite() {
        return Err(Error::InvalidParameter("rotation angle must be finite".into()));
    }
    Ok(Rotation { space: space.clone(), angle, cos: libm::cos(angle), sin: libm::sin(angle) })
}

impl Operator<Euclidean> for Rotation {
    fn space(&self) -> &Euclidean {
        &self.space
    }
    fn apply(&self, p: &EuclideanPoint) -> Result<EuclideanPoint> {
        self.space.validate(p)?;
        let (x, y) = (p.0[0], p.0[1]);
        Ok(EuclideanPoint(alloc::vec![self.cos * x - self.sin * y, self.sin * x + self.cos * y]))
    }
    fn fixed_point(&self) -> Option<EuclideanPoint> {
        Some(self.space.origin())
    }
    fn describe(&self) -> String {
        format!("rotation:{}", self.angle)
    }
}

/// `x ↦ factor·x`. Nonexpansive for `factor ≤ 1`; with `factor > 1` it is the
/// expansive negative control.
#[derive(Debug, Clone)]
pub struct Scaling {
    space: Euclidean,
    factor: f64,
}

pub fn make_scaling(space: &Euclidean, factor: f64) -> Result<Scaling> {
    if !factor.is_finite() {
        return Err(Error::InvalidParameter("scaling factor must be finite".into()));
    }
    Ok(Scaling { space: space.clone(), factor })
}

/// Scaling by 1.5, which is not nonexpansive.
pub fn make_expansive_control(space: &Euclidean) -> Scaling {
    Scaling { space: space.clone(), factor: 1.5 }
}

impl Operator<Euclidean> for Scaling {
    fn space(&self) -> &Euclidean {
        &self.space
    }
    fn apply(&self, p: &EuclideanPoint) -> Result<EuclideanPoint> {
        self.space.validate(p)?;
        Ok(EuclideanPoint(p.0.iter().map(|c| self.factor * c).collect()))
    }
    fn fixed_point(&self) -> Option<EuclideanPoint> {
        Some(self.space.origin())
    }
    fn describe(&self) -> String {
        format!("scale:{}", self.factor)
    }
}

/// Rotation of the hyperboloid in the `(x₁, x₂)` plane, an isometry fixing the
/// base point.
#[derive(Debug, Clone)]
pub struct HyperbolicRotation {
    space: Hyperboloid,
    angle: f64,
    cos: f64,
    sin: f64,
}

pub fn make_hyperbolic_rotation(space: &Hyperboloid, angle: f64) -> Result<HyperbolicRotation> {
    if space.dim() < 2 {
        return Err(Error::SpaceMismatch("hyperbolic rotation needs dimension at least 2".into()));
    }
    if !angle.is_finite() {
        return Err(Error::InvalidParameter("rotation angle must be finite".into()));
    }
    Ok(HyperbolicRotation { space: space.clone(), angle, cos: libm::cos(angle), sin: libm::sin(angle) })
}

impl Operator<Hyperboloid> for HyperbolicRotation {
    fn space(&self) -> &Hyperboloid {
        &self.space
    }
    fn apply(&self, p: &HyperboloidPoint) -> Result<HyperboloidPoint> {
        self.space.validate(p)?;
        let mut v = p.0.clone();
        let (a, b) = (p.0[1], p.0[2]);
        v[1] = self.cos * a - self.sin * b;
        v[2] = self.sin * a + self.cos * b;
        Ok(HyperboloidPoint(v))
    }
    fn fixed_point(&self) -> Option<HyperboloidPoint> {
        Some(self.space.origin())
    }
    fn describe(&self) -> String {
        format!("rotation:{}", self.angle)
    }
}

/// Relabels the edges of a star tree: the point `(e, t)` goes to
/// `(perm[e], t)`. An isometry when every edge has the length of its image.
#[derive(Debug, Clone)]
pub struct EdgePermutation {
    space: StarTree,
    perm: Vec<usize>,
}

pub fn make_edge_permutation(space: &StarTree, perm: &[usize]) -> Result<EdgePermutation> {
    let m = space.edges();
    if perm.len() != m {
        return Err(Error::InvalidParameter(format!("permutation needs {m} entries, got {}", perm.len())));
    }
    let mut seen = alloc::vec![false; m];
    for &e in perm {
        if e >= m || seen[e] {
            return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation of 0..{m}")));
        }
        seen[e] = true;
    }
    for (e, &img) in perm.iter().enumerate() {
        if space.lengths()[e] != space.lengths()[img] {
            return Err(Error::InvalidParameter(format!("edge {e} and its image {img} have different lengths")));
        }
    }
    Ok(EdgePermutation { space: space.clone(), perm: perm.to_vec() })
}

/// Swaps edges `a` and `b`.
pub fn make_edge_swap(space: &StarTree, a: usize, b: usize) -> Result<EdgePermutation> {
    let mut perm: Vec<usize> = (0..space.edges()).collect();
    if a >= perm.len() || b >= perm.len() {
        return Err(Error::InvalidParameter(format!("edge swap ({a}, {b}) out of range")));
    }
    perm.swap(a, b);
    make_edge_permutation(space, &perm)
}

impl Operator<StarTree> for EdgePermutation {
    fn space(&self) -> &StarTree {
        &self.space
    }
    fn apply(&self, p: &TreePoint) -> Result<TreePoint> {
        self.space.validate(p)?;
        if p.is_center() {
            return Ok(TreePoint::CENTER);
        }
        self.space.point(self.perm[p.edge], p.offset)
    }
    fn fixed_point(&self) -> Option<TreePoint> {
        Some(TreePoint::CENTER)
    }
    fn describe(&self) -> String {
        let parts: Vec<String> = self.perm.iter().map(|e| format!("{e}")).collect();
        format!("permute:{}", parts.join(","))
    }
}

/// Nearest-point map onto a closed convex set.
#[derive(Debug, Clone)]
pub struct Projection<S: GeodesicSpace> {
    space: S,
    set: ConvexSet<S::Point>,
}

pub fn make_metric_projection<S: ConvexSets>(space: &S, target: ConvexSet<S::Point>) -> Result<Projection<S>> {
    let supported = match (target.shape(), space.descriptor()) {
        (SetShape::Box { .. }, SpaceDescriptor::Euclidean { .. }) => true,
        (SetShape::Subtree { .. }, SpaceDescriptor::StarTree { .. }) => true,
        (SetShape::Box { .. } | SetShape::Subtree { .. }, _) => false,
        _ => true,
    };
    if !supported {
        return Err(unsupported(space, &target));
    }
    Ok(Projection { space: space.clone(), set: target })
}

impl<S: ConvexSets> Projection<S> {
    pub fn set(&self) -> &ConvexSet<S::Point> {
        &self.set
    }
}

impl<S: ConvexSets> Operator<S> for Projection<S> {
    fn space(&self) -> &S {
        &self.space
    }
    fn apply(&self, p: &S::Point) -> Result<S::Point> {
        self.space.project(&self.set, p)
    }
    fn fixed_point(&self) -> Option<S::Point> {
        self.space.anchor(&self.set)
    }
    fn describe(&self) -> String {
        "project".into()
    }
}

/// `T_λ = (1−λ)I ⊕ λT`.
#[derive(Debug, Clone)]
pub struct Averaged<T> {
    inner: T,
    lambda: f64,
}

pub fn averaged<S: GeodesicSpace, T: Operator<S>>(inner: T, lambda: f64) -> Result<Averaged<T>> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!("averaging weight {lambda} outside (0, 1)")));
    }
    Ok(Averaged { inner, lambda })
}

impl<S: GeodesicSpace, T: Operator<S>> Operator<S> for Averaged<T> {
    fn space(&self) -> &S {
        self.inner.space()
    }
    fn apply(&self, p: &S::Point) -> Result<S::Point> {
        let tp = self.inner.apply(p)?;
        self.space().combine(p, &tp, self.lambda)
    }
    fn fixed_point(&self) -> Option<S::Point> {
        self.inner.fixed_point()
    }
    fn describe(&self) -> String {
        format!("averaged({}, {})", self.inner.describe(), self.lambda)
    }
}

/// `outer ∘ inner`.
#[derive(Debug, Clone)]
pub struct Compose<S, A, B> {
    outer: A,
    inner: B,
    _space: PhantomData<S>,
}

pub fn compose<S: GeodesicSpace, A: Operator<S>, B: Operator<S>>(outer: A, inner: B) -> Result<Compose<S, A, B>> {
    if outer.space().descriptor() != inner.space().descriptor() {
        return Err(Error::SpaceMismatch(format!(
            "cannot compose an operator on {} with one on {}",
            outer.space().descriptor(),
            inner.space().descriptor()
        )));
    }
    Ok(Compose { outer, inner, _space: PhantomData })
}

impl<S: GeodesicSpace, A: Operator<S>, B: Operator<S>> Operator<S> for Compose<S, A, B> {
    fn space(&self) -> &S {
        self.outer.space()
    }
    fn apply(&self, p: &S::Point) -> Result<S::Point> {
        self.outer.apply(&self.inner.apply(p)?)
    }
    fn fixed_point(&self) -> Option<S::Point> {
        let space = self.space();
        let tol = space.default_tolerance();
        [self.inner.fixed_point(), self.outer.fixed_point()]
            .into_iter()
            .flatten()
            .find(|p| self.apply(p).and_then(|q| space.distance(p, &q)).map(|d| d <= tol).unwrap_or(false))
    }
    fn describe(&self) -> String {
        format!("{} . {}", self.outer.describe(), self.inner.describe())
    }
}

/// Worst `ρ(Tx, Ty) − ρ(x, y)` over sampled pairs.
pub fn check_nonexpansive<S: Sample, T: Operator<S> + ?Sized>(
    op: &T,
    sampler: &Sampler,
    tol: f64,
) -> Result<AxiomReport> {
    let space = op.space();
    let mut rng = sampler.rng();
    let mut report = AxiomReport::new(Check::Nonexpansive, tol);
    for _ in 0..sampler.count {
        let x = space.sample_point(&mut rng, sampler.radius);
        let y = space.sample_point(&mut rng, sampler.radius);
        let tx = op.apply(&x)?;
        let ty = op.apply(&y)?;
        let excess = space.distance(&tx, &ty)? - space.distance(&x, &y)?;
        report.record(excess, || format!("x={x:?} y={y:?}"));
    }
    Ok(report)
}
