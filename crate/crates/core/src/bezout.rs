//! Intersection-count uniqueness arguments.
//!
//! If two distinct curves of class `d` shared a list of constraints, each
//! constraint would contribute at least a fixed local intersection
//! multiplicity. When the sum exceeds `d·d` no second curve can exist.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::surface::SurfaceClass;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ConstraintKind {
    /// Both curves pass through a point.
    SimplePoint,
    /// Both curves have a node at the same prescribed point.
    SharedPrescribedNode,
    /// A node of one curve close to a node of the other.
    ShadowedNode,
    /// Both curves tangent to the same direction at a point.
    SharedTangency,
}

impl ConstraintKind {
    pub fn multiplicity(self) -> i64 {
        match self {
            ConstraintKind::SimplePoint => 1,
            ConstraintKind::ShadowedNode => 2,
            ConstraintKind::SharedTangency => 2,
            ConstraintKind::SharedPrescribedNode => 4,
        }
    }

    fn keyword(self) -> &'static str {
        match self {
            ConstraintKind::SimplePoint => "simple",
            ConstraintKind::SharedPrescribedNode => "node",
            ConstraintKind::ShadowedNode => "shadow",
            ConstraintKind::SharedTangency => "tangent",
        }
    }
}

pub fn multiplicity_of(kind: ConstraintKind) -> i64 {
    kind.multiplicity()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintItem {
    pub kind: ConstraintKind,
    pub count: i64,
}

impl ConstraintItem {
    pub fn new(kind: ConstraintKind, count: i64) -> Self {
        ConstraintItem { kind, count }
    }
}

impl fmt::Display for ConstraintItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.keyword(), self.count)
    }
}

/// Parses `simple:5,node:3` (also `shadow`, `tangent`).
pub fn parse_constraints(text: &str) -> Result<Vec<ConstraintItem>> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse())
        .collect()
}

impl FromStr for ConstraintItem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, count) = s
            .split_once(':')
            .ok_or_else(|| Error::OutOfRange(format!("constraint `{s}` is not kind:count")))?;
        let kind = match kind.trim() {
            "simple" | "point" => ConstraintKind::SimplePoint,
            "node" | "prescribed" => ConstraintKind::SharedPrescribedNode,
            "shadow" | "shadowed" => ConstraintKind::ShadowedNode,
            "tangent" | "tangency" => ConstraintKind::SharedTangency,
            other => return Err(Error::OutOfRange(format!("unknown constraint kind `{other}`"))),
        };
        let count: i64 = count
            .trim()
            .parse()
            .map_err(|_| Error::OutOfRange(format!("bad count in `{s}`")))?;
        if count < 0 {
            return Err(Error::OutOfRange(format!("negative count in `{s}`")));
        }
        Ok(ConstraintItem { kind, count })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct UniquenessVerdict {
    pub lower_bound: i64,
    pub budget: i64,
    pub forced_unique: bool,
}

impl fmt::Display for UniquenessVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.forced_unique {
            write!(f, "{} > {}: unique", self.lower_bound, self.budget)
        } else {
            write!(f, "{} <= {}: not forced", self.lower_bound, self.budget)
        }
    }
}

/// Compares `Σ count·multiplicity` against the budget `d·d`.
pub fn verdict_for_budget(dd: i64, items: &[ConstraintItem]) -> UniquenessVerdict {
    let lower_bound = items.iter().map(|i| i.count * i.kind.multiplicity()).sum();
    UniquenessVerdict {
        lower_bound,
        budget: dd,
        forced_unique: lower_bound > dd,
    }
}

pub fn uniqueness_verdict(cls: &SurfaceClass, items: &[ConstraintItem]) -> UniquenessVerdict {
    verdict_for_budget(cls.dd, items)
}

/// Constraint lists of the three standard uniqueness arguments.
pub mod scenarios {
    use super::*;

    /// A curve with all `δ` nodes at prescribed points through the remaining
    /// `c1·d − 1 − 2δ` simple points. `None` if there are too few points.
    pub fn all_nodes_prescribed(cls: &SurfaceClass) -> Option<Vec<ConstraintItem>> {
        let delta = cls.delta().ok()?;
        let simple = cls.c1d - 1 - 2 * delta;
        (simple >= 0).then(|| {
            vec![
                ConstraintItem::new(ConstraintKind::SimplePoint, simple),
                ConstraintItem::new(ConstraintKind::SharedPrescribedNode, delta),
            ]
        })
    }

    /// Two components of a reducible curve on a wall: every point is shared,
    /// every node of one is shadowed by a node of the other.
    pub fn reducible_wall(cls: &SurfaceClass) -> Option<Vec<ConstraintItem>> {
        let delta = cls.delta().ok()?;
        Some(vec![
            ConstraintItem::new(ConstraintKind::SimplePoint, cls.c1d - 1),
            ConstraintItem::new(ConstraintKind::ShadowedNode, delta),
        ])
    }

    /// A curve acquiring its node at one of the points: `c1·d − 3` simple
    /// points, one shared node, `δ − 1` shadowed nodes.
    pub fn nodal_at_point(cls: &SurfaceClass) -> Option<Vec<ConstraintItem>> {
        let delta = cls.delta().ok()?;
        (delta >= 1 && cls.c1d >= 3).then(|| {
            vec![
                ConstraintItem::new(ConstraintKind::SimplePoint, cls.c1d - 3),
                ConstraintItem::new(ConstraintKind::SharedPrescribedNode, 1),
                ConstraintItem::new(ConstraintKind::ShadowedNode, delta - 1),
            ]
        })
    }
}
