//! How each model space reads points, sets and operator stages from a config.

use kmrate_core::operators::{
    make_edge_permutation, make_edge_swap, make_hyperbolic_rotation, make_rotation, make_scaling, ConvexSet,
    ConvexSets, Operator,
};
use kmrate_core::spaces::{Euclidean, Hyperboloid, StarTree, TreePoint};
use kmrate_core::{GeodesicSpace, Sample};

use crate::config::{ShapeSpec, StageSpec};

pub type DynOperator<S> = Box<dyn Operator<S>>;

/// The space-specific half of experiment construction. Whole-space sets,
/// balls, `identity` and `project` are handled generically.
pub trait HarnessSpace: ConvexSets + Sample + 'static {
    fn read_point(&self, coords: &[f64]) -> Result<Self::Point, String>;

    /// Default ball center.
    fn base_point(&self) -> Self::Point;

    fn read_shape(&self, shape: &ShapeSpec) -> Result<ConvexSet<Self::Point>, String>;

    fn read_stage(&self, stage: &StageSpec) -> Result<DynOperator<Self>, String>;

    /// Sampling radius for the property suites.
    fn default_radius(&self) -> f64;
}

fn not_here<T>(what: impl std::fmt::Display, space: &impl GeodesicSpace) -> Result<T, String> {
    Err(format!("`{what}` is not available in {}", space.descriptor()))
}

impl HarnessSpace for Euclidean {
    fn read_point(&self, coords: &[f64]) -> Result<Self::Point, String> {
        self.point(coords).map_err(|e| e.to_string())
    }

    fn base_point(&self) -> Self::Point {
        self.origin()
    }

    fn read_shape(&self, shape: &ShapeSpec) -> Result<ConvexSet<Self::Point>, String> {
        match shape {
            ShapeSpec::Box { lower, upper } => ConvexSet::cuboid(self, lower, upper).map_err(|e| e.to_string()),
            _ => not_here("subtree", self),
        }
    }

    fn read_stage(&self, stage: &StageSpec) -> Result<DynOperator<Self>, String> {
        match stage {
            StageSpec::Rotation(a) => Ok(Box::new(make_rotation(self, *a).map_err(|e| e.to_string())?)),
            StageSpec::Scale(f) => Ok(Box::new(make_scaling(self, *f).map_err(|e| e.to_string())?)),
            other => not_here(other, self),
        }
    }

    fn default_radius(&self) -> f64 {
        5.0
    }
}

impl HarnessSpace for Hyperboloid {
    /// Spatial coordinates; the time coordinate is solved for.
    fn read_point(&self, coords: &[f64]) -> Result<Self::Point, String> {
        self.lift(coords).map_err(|e| e.to_string())
    }

    fn base_point(&self) -> Self::Point {
        self.origin()
    }

    fn read_shape(&self, shape: &ShapeSpec) -> Result<ConvexSet<Self::Point>, String> {
        match shape {
            ShapeSpec::Box { .. } => not_here("box", self),
            _ => not_here("subtree", self),
        }
    }

    fn read_stage(&self, stage: &StageSpec) -> Result<DynOperator<Self>, String> {
        match stage {
            StageSpec::Rotation(a) => Ok(Box::new(make_hyperbolic_rotation(self, *a).map_err(|e| e.to_string())?)),
            other => not_here(other, self),
        }
    }

    fn default_radius(&self) -> f64 {
        3.0
    }
}

impl HarnessSpace for StarTree {
    /// `[edge, offset]`.
    fn read_point(&self, coords: &[f64]) -> Result<Self::Point, String> {
        let [edge, offset] = coords else {
            return Err(format!("a tree point is [edge, offset], got {} numbers", coords.len()));
        };
        if !(edge.fract() == 0.0 && *edge >= 0.0 && (*edge as usize) < self.edges()) {
            return Err(format!("edge {edge} is not one of 0..{}", self.edges()));
        }
        let e = *edge as usize;
        if *offset > self.lengths()[e] {
            return Err(format!("offset {offset} exceeds the length {} of edge {e}", self.lengths()[e]));
        }
        self.point(e, *offset).map_err(|e| e.to_string())
    }

    fn base_point(&self) -> Self::Point {
        TreePoint::CENTER
    }

    fn read_shape(&self, shape: &ShapeSpec) -> Result<ConvexSet<Self::Point>, String> {
        match shape {
            ShapeSpec::Subtree { limits } => ConvexSet::subtree(self, limits).map_err(|e| e.to_string()),
            _ => not_here("box", self),
        }
    }

    fn read_stage(&self, stage: &StageSpec) -> Result<DynOperator<Self>, String> {
        match stage {
            StageSpec::Swap(a, b) => Ok(Box::new(make_edge_swap(self, *a, *b).map_err(|e| e.to_string())?)),
            StageSpec::Permute(p) => Ok(Box::new(make_edge_permutation(self, p).map_err(|e| e.to_string())?)),
            other => not_here(other, self),
        }
    }

    fn default_radius(&self) -> f64 {
        self.lengths().iter().copied().fold(0.0, f64::max)
    }
}
