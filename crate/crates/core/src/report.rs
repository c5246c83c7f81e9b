//! Sampled-check reports.
//!
//! Every property check in the crate walks a sample stream (or a trace) and
//! records the worst `left side - right side` it saw instead of failing on the
//! first violation.

use alloc::string::String;
use core::fmt;

/// Which inequality or identity a report is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    W1,
    W2,
    W3,
    W4,
    Cn,
    SegmentIdentities,
    MidpointUniqueness,
    UniformConvexity,
    UniformConvexityLambda,
    Nonexpansive,
    ResidualMonotone,
    ResidualBound,
    KmStepGrowth,
    KmCumulativeGrowth,
    MainLemma,
    EtaTildeStep,
    SummedDescent,
    SummedDescentTilde,
    OrbitInSet,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::W1 => "W1",
            Check::W2 => "W2",
            Check::W3 => "W3",
            Check::W4 => "W4",
            Check::Cn => "CN",
            Check::SegmentIdentities => "segment-identities",
            Check::MidpointUniqueness => "midpoint-uniqueness",
            Check::UniformConvexity => "uc-midpoint",
            Check::UniformConvexityLambda => "uc-lambda",
            Check::Nonexpansive => "nonexpansive",
            Check::ResidualMonotone => "residual-monotone",
            Check::ResidualBound => "residual-bound",
            Check::KmStepGrowth => "km-step-growth",
            Check::KmCumulativeGrowth => "km-cumulative-growth",
            Check::MainLemma => "main-lemma",
            Check::EtaTildeStep => "eta-tilde-step",
            Check::SummedDescent => "summed-descent",
            Check::SummedDescentTilde => "summed-descent-tilde",
            Check::OrbitInSet => "orbit-in-set",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one sampled check.
///
/// `max_excess` is the largest `lhs - rhs` observed (it may be negative when
/// an inequality held strictly everywhere). A sample is a violation when its
/// excess is above `tolerance`. `skipped` counts samples where the hypothesis
/// of the checked statement did not hold, so nothing was asserted.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub check: Check,
    pub samples: usize,
    pub skipped: usize,
    pub violations: usize,
    pub max_excess: f64,
    pub witness: Option<String>,
    pub tolerance: f64,
}

impl AxiomReport {
    pub fn new(check: Check, tolerance: f64) -> Self {
        AxiomReport {
            check,
            samples: 0,
            skipped: 0,
            violations: 0,
            max_excess: f64::NEG_INFINITY,
            witness: None,
            tolerance,
        }
    }

    /// Records one evaluated sample. The witness closure only runs when the
    /// sample becomes the new worst violation.
    pub fn record(&mut self, excess: f64, witness: impl FnOnce() -> String) {
        self.samples += 1;
        let violated = excess.is_nan() || excess > self.tolerance;
        if violated {
            self.violations += 1;
        }
        if excess > self.max_excess || (excess.is_nan() && !self.max_excess.is_nan()) {
            self.max_excess = excess;
            if violated {
                self.witness = Some(witness());
            }
        }
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// Worst violation magnitude, clamped at zero.
    pub fn worst_violation(&self) -> f64 {
        if self.max_excess.is_nan() {
            f64::NAN
        } else if self.max_excess > 0.0 {
            self.max_excess
        } else {
            0.0
        }
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<22} {} samples={} skipped={} violations={} worst={:.3e} tol={:.0e}",
            self.check.name(),
            if self.passed() { "pass" } else { "FAIL" },
            self.samples,
            self.skipped,
            self.violations,
            self.worst_violation(),
            self.tolerance
        )
    }
}
