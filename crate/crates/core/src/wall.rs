//! Combinatorial model of what happens to the set of real rational curves
//! through a point configuration when a generic path of structures crosses a
//! wall.
//!
//! A [`CurveWorld`] is a multiset of curves, each remembered only by its mass
//! (number of isolated real nodes) and, for the node-prescribed counts, the
//! type of its marked node. The moves are:
//!
//! * a cuspidal curve appears or disappears: two curves of masses `m` and
//!   `m + 1` are born or die together;
//! * tacnodes and triple points: no curve changes mass;
//! * a reducible curve with `R` real components: the `R` nearby curves
//!   survive with their masses, because the smoothed real intersection points
//!   join two real branches and are non-isolated;
//! * a cusp at the marked point: either nothing changes, or the marked node
//!   switches between isolated and non-isolated while the mass moves by one.
//!
//! `χ = Σ (−1)^mass` is preserved by every unmarked move. On marked worlds the
//! invariant is `θ = Σ (−1)^mass·ε`, with `ε = +1` for a non-isolated and `−1`
//! for an isolated marked node; a flip at the marked point changes `χ` but not
//! `θ`.
//!
//! Random walks use `ChaCha8Rng::seed_from_u64(seed)` from `rand_chacha`,
//! so a trace is reproducible from its seed on every platform.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::surface::SurfaceClass;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MarkedNode {
    None,
    Isolated,
    NonIsolated,
}

impl MarkedNode {
    fn toggled(self) -> Option<MarkedNode> {
        match self {
            MarkedNode::None => None,
            MarkedNode::Isolated => Some(MarkedNode::NonIsolated),
            MarkedNode::NonIsolated => Some(MarkedNode::Isolated),
        }
    }

    fn sign(self) -> Option<i64> {
        match self {
            MarkedNode::None => None,
            MarkedNode::Isolated => Some(-1),
            MarkedNode::NonIsolated => Some(1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CurveRecord {
    pub mass: i64,
    pub marked_node: MarkedNode,
}

impl CurveRecord {
    pub fn new(mass: i64, marked_node: MarkedNode) -> Self {
        CurveRecord { mass, marked_node }
    }

    pub fn unmarked(mass: i64) -> Self {
        CurveRecord::new(mass, MarkedNode::None)
    }
}

fn parity_sign(mass: i64) -> i64 {
    if mass.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveWorld {
    pub cls: SurfaceClass,
    delta: i64,
    curves: BTreeMap<CurveRecord, usize>,
}

impl CurveWorld {
    pub fn new(cls: SurfaceClass) -> Result<Self> {
        let delta = cls.delta()?;
        Ok(CurveWorld {
            cls,
            delta,
            curves: BTreeMap::new(),
        })
    }

    pub fn with_curves(cls: SurfaceClass, curves: impl IntoIterator<Item = CurveRecord>) -> Result<Self> {
        let mut w = CurveWorld::new(cls)?;
        for c in curves {
            w.insert(c)?;
        }
        Ok(w)
    }

    pub fn delta(&self) -> i64 {
        self.delta
    }

    pub fn len(&self) -> usize {
        self.curves.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn count(&self, record: &CurveRecord) -> usize {
        self.curves.get(record).copied().unwrap_or(0)
    }

    /// Records in sorted order, with repetition.
    pub fn records(&self) -> impl Iterator<Item = CurveRecord> + '_ {
        self.curves
            .iter()
            .flat_map(|(r, &n)| std::iter::repeat_n(*r, n))
    }

    pub fn is_fully_marked(&self) -> bool {
        self.curves.keys().all(|r| r.marked_node != MarkedNode::None)
    }

    fn insert(&mut self, record: CurveRecord) -> Result<()> {
        if record.mass < 0 || record.mass > self.delta {
            return Err(Error::IllegalMove(format!(
                "mass {} outside 0..={}",
                record.mass, self.delta
            )));
        }
        *self.curves.entry(record).or_default() += 1;
        Ok(())
    }

    fn remove(&mut self, record: &CurveRecord) -> Result<()> {
        match self.curves.get_mut(record) {
            Some(n) if *n > 1 => *n -= 1,
            Some(_) => {
                self.curves.remove(record);
            }
            None => {
                return Err(Error::IllegalMove(format!(
                    "no curve of mass {} ({:?})",
                    record.mass, record.marked_node
                )))
            }
        }
        Ok(())
    }
}

/// What a cusp at the marked point does to the curve carrying it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FlipOutcome {
    Unchanged,
    MassUp,
    MassDown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WallMove {
    CuspPairCreate { mass: i64, marked: MarkedNode },
    CuspPairAnnihilate { mass: i64, marked: MarkedNode },
    TacnodeOrTriple,
    ReducibleWall(usize),
    MarkedCuspFlip { record: CurveRecord, outcome: FlipOutcome },
    MarkedTacnode,
}

impl fmt::Display for WallMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = |m: &MarkedNode| match m {
            MarkedNode::None => "-",
            MarkedNode::Isolated => "iso",
            MarkedNode::NonIsolated => "non",
        };
        match self {
            WallMove::CuspPairCreate { mass, marked } => write!(f, "cusp-create({mass},{})", tag(marked)),
            WallMove::CuspPairAnnihilate { mass, marked } => {
                write!(f, "cusp-annihilate({mass},{})", tag(marked))
            }
            WallMove::TacnodeOrTriple => f.write_str("tacnode-or-triple"),
            WallMove::ReducibleWall(r) => write!(f, "reducible({r})"),
            WallMove::MarkedCuspFlip { record, outcome } => {
                let o = match outcome {
                    FlipOutcome::Unchanged => "same",
                    FlipOutcome::MassUp => "up",
                    FlipOutcome::MassDown => "down",
                };
                write!(f, "marked-cusp({},{},{o})", record.mass, tag(&record.marked_node))
            }
            WallMove::MarkedTacnode => f.write_str("marked-tacnode"),
        }
    }
}

/// `Σ (−1)^mass`.
pub fn chi_of(world: &CurveWorld) -> i64 {
    world
        .curves
        .iter()
        .map(|(r, &n)| parity_sign(r.mass) * n as i64)
        .sum()
}

/// `Σ (−1)^mass·ε`; every curve must carry a marked node.
pub fn theta_of(world: &CurveWorld) -> Result<i64> {
    world.curves.iter().try_fold(0, |acc, (r, &n)| {
        let eps = r.marked_node.sign().ok_or(Error::UnmarkedRecord)?;
        Ok(acc + parity_sign(r.mass) * eps * n as i64)
    })
}

pub fn apply_move(world: &CurveWorld, mv: &WallMove) -> Result<CurveWorld> {
    let mut next = world.clone();
    match *mv {
        WallMove::CuspPairCreate { mass, marked } => {
            if mass < 0 || mass + 1 > world.delta {
                return Err(Error::IllegalMove(format!(
                    "cusp pair of masses {mass}, {} exceeds 0..={}",
                    mass + 1,
                    world.delta
                )));
            }
            next.insert(CurveRecord::new(mass, marked))?;
            next.insert(CurveRecord::new(mass + 1, marked))?;
        }
        WallMove::CuspPairAnnihilate { mass, marked } => {
            next.remove(&CurveRecord::new(mass, marked))?;
            next.remove(&CurveRecord::new(mass + 1, marked))?;
        }
        WallMove::TacnodeOrTriple | WallMove::MarkedTacnode => {}
        WallMove::ReducibleWall(r) => {
            if r > world.len() {
                return Err(Error::IllegalMove(format!(
                    "reducible wall with {r} real curves but only {} present",
                    world.len()
                )));
            }
        }
        WallMove::MarkedCuspFlip { record, outcome } => {
            let toggled = record.marked_node.toggled().ok_or(Error::UnmarkedRecord)?;
            if world.count(&record) == 0 {
                return Err(Error::IllegalMove(format!(
                    "no curve of mass {} ({:?}) to flip",
                    record.mass, record.marked_node
                )));
            }
            let step = match outcome {
                FlipOutcome::Unchanged => return Ok(next),
                FlipOutcome::MassUp => 1,
                FlipOutcome::MassDown => -1,
            };
            next.remove(&record)?;
            next.insert(CurveRecord::new(record.mass + step, toggled))?;
        }
    }
    Ok(next)
}

/// The move undoing `mv` once it has been applied.
pub fn inverse_move(mv: &WallMove) -> WallMove {
    match *mv {
        WallMove::CuspPairCreate { mass, marked } => WallMove::CuspPairAnnihilate { mass, marked },
        WallMove::CuspPairAnnihilate { mass, marked } => WallMove::CuspPairCreate { mass, marked },
        WallMove::MarkedCuspFlip { record, outcome } => {
            let (step, back) = match outcome {
                FlipOutcome::Unchanged => return *mv,
                FlipOutcome::MassUp => (1, FlipOutcome::MassDown),
                FlipOutcome::MassDown => (-1, FlipOutcome::MassUp),
            };
            let toggled = record.marked_node.toggled().unwrap_or(record.marked_node);
            WallMove::MarkedCuspFlip {
                record: CurveRecord::new(record.mass + step, toggled),
                outcome: back,
            }
        }
        other => other,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Marking {
    Unmarked,
    Marked,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub step: usize,
    /// `None` for the initial state.
    pub mv: Option<WallMove>,
    pub chi: i64,
    pub theta: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub seed: u64,
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn chi_constant(&self) -> bool {
        self.steps.windows(2).all(|w| w[0].chi == w[1].chi)
    }

    pub fn theta_constant(&self) -> bool {
        self.steps.windows(2).all(|w| w[0].theta == w[1].theta)
    }

    /// `step move chi theta` per line; `-` where there is no value.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let mv = s.mv.map(|m| m.to_string()).unwrap_or_else(|| "start".into());
            let theta = s.theta.map(|t| t.to_string()).unwrap_or_else(|| "-".into());
            out.push_str(&format!("{} {} {} {}\n", s.step, mv, s.chi, theta));
        }
        out
    }
}

fn random_marked(rng: &mut ChaCha8Rng, marking: Marking) -> MarkedNode {
    match marking {
        Marking::Unmarked => MarkedNode::None,
        Marking::Marked if rng.gen_bool(0.5) => MarkedNode::Isolated,
        Marking::Marked => MarkedNode::NonIsolated,
    }
}

/// A random initial world: up to 12 curves of uniform random mass.
pub fn random_world(rng: &mut ChaCha8Rng, cls: &SurfaceClass, marking: Marking) -> Result<CurveWorld> {
    let mut world = CurveWorld::new(cls.clone())?;
    let n = rng.gen_range(0..=12);
    for _ in 0..n {
        let mass = rng.gen_range(0..=world.delta);
        let marked = random_marked(rng, marking);
        world.insert(CurveRecord::new(mass, marked))?;
    }
    Ok(world)
}

/// A uniformly chosen move kind, instantiated legally for `world`.
pub fn random_move(rng: &mut ChaCha8Rng, world: &CurveWorld, marking: Marking) -> WallMove {
    let mut kinds = vec![0u8, 1, 2, 3];
    if marking == Marking::Marked {
        kinds.extend([4, 5]);
    }
    loop {
        match *kinds.choose(rng).expect("nonempty") {
            0 if world.delta >= 1 => {
                return WallMove::CuspPairCreate {
                    mass: rng.gen_range(0..world.delta),
                    marked: random_marked(rng, marking),
                }
            }
            1 => {
                let pairs: Vec<CurveRecord> = world
                    .curves
                    .keys()
                    .filter(|r| world.count(&CurveRecord::new(r.mass + 1, r.marked_node)) > 0)
                    .copied()
                    .collect();
                if let Some(r) = pairs.choose(rng) {
                    return WallMove::CuspPairAnnihilate {
                        mass: r.mass,
                        marked: r.marked_node,
                    };
                }
            }
            2 => return WallMove::TacnodeOrTriple,
            3 => return WallMove::ReducibleWall(rng.gen_range(0..=world.len())),
            4 => {
                let records: Vec<CurveRecord> = world.curves.keys().copied().collect();
                if let Some(&record) = records.choose(rng) {
                    let mut outcomes = vec![FlipOutcome::Unchanged];
                    if record.mass < world.delta {
                        outcomes.push(FlipOutcome::MassUp);
                    }
                    if record.mass >= 1 {
                        outcomes.push(FlipOutcome::MassDown);
                    }
                    let outcome = *outcomes.choose(rng).expect("nonempty");
                    return WallMove::MarkedCuspFlip { record, outcome };
                }
            }
            5 => return WallMove::MarkedTacnode,
            _ => {}
        }
    }
}

/// A reproducible random sequence of legal moves from a random start,
/// recording `χ` (and `θ` on marked worlds) after every step.
pub fn random_walk(seed: u64, steps: usize, cls: &SurfaceClass, marking: Marking) -> Result<Trace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut world = random_world(&mut rng, cls, marking)?;
    let observe = |w: &CurveWorld| -> Result<(i64, Option<i64>)> {
        let theta = match marking {
            Marking::Marked => Some(theta_of(w)?),
            Marking::Unmarked => None,
        };
        Ok((chi_of(w), theta))
    };
    let (chi, theta) = observe(&world)?;
    let mut trace = vec![TraceStep {
        step: 0,
        mv: None,
        chi,
        theta,
    }];
    for step in 1..=steps {
        let mv = random_move(&mut rng, &world, marking);
        world = apply_move(&world, &mv)?;
        let (chi, theta) = observe(&world)?;
        trace.push(TraceStep {
            step,
            mv: Some(mv),
            chi,
            theta,
        });
    }
    Ok(Trace { seed, steps: trace })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CollisionIdentity {
    /// `χ_{r+2} = χ̃ + 2·Σ(−1)^m` over curves with a non-isolated node at the point.
    pub chi_plus: i64,
    /// `χ_r = χ̃ + 2·Σ(−1)^m` over curves with an isolated node at the point.
    pub chi_minus: i64,
    /// `(χ_{r+2} − χ_r)/2`.
    pub theta_diff: i64,
    /// `Σ(−1)^m` over the first list minus the same over the second.
    pub theta_direct: i64,
}

/// When two points collide into a real tangency, the curves through the
/// limit configuration split into those tangent there (`tangent`), and
/// those with a node at the point, non-isolated (`node_plus`) or isolated
/// (`node_minus`). Each nodal curve is the limit of two curves on one side
/// of the collision and none on the other.
pub fn collision_identity(tangent: &[i64], node_plus: &[i64], node_minus: &[i64]) -> CollisionIdentity {
    let signed = |ms: &[i64]| ms.iter().map(|&m| parity_sign(m)).sum::<i64>();
    let tilde = signed(tangent);
    let plus = signed(node_plus);
    let minus = signed(node_minus);
    let chi_plus = tilde + 2 * plus;
    let chi_minus = tilde + 2 * minus;
    CollisionIdentity {
        chi_plus,
        chi_minus,
        theta_diff: (chi_plus - chi_minus) / 2,
        theta_direct: plus - minus,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cls(d: i64) -> SurfaceClass {
        SurfaceClass::cp2(d).unwrap()
    }

    #[test]
    fn chi_examples() {
        let empty = CurveWorld::new(cls(3)).unwrap();
        assert_eq!(chi_of(&empty), 0);
        let pair = CurveWorld::with_curves(cls(3), [CurveRecord::unmarked(0), CurveRecord::unmarked(1)]).unwrap();
        assert_eq!(chi_of(&pair), 0);
        let eight = CurveWorld::with_curves(cls(3), vec![CurveRecord::unmarked(0); 8]).unwrap();
        assert_eq!(chi_of(&eight), 8);
    }

    #[test]
    fn theta_examples() {
        let w = |rs: Vec<CurveRecord>| CurveWorld::with_curves(cls(4), rs).unwrap();
        assert_eq!(theta_of(&w(vec![CurveRecord::new(0, MarkedNode::NonIsolated)])).unwrap(), 1);
        assert_eq!(theta_of(&w(vec![CurveRecord::new(0, MarkedNode::Isolated)])).unwrap(), -1);
        assert_eq!(
            theta_of(&w(vec![
                CurveRecord::new(1, MarkedNode::NonIsolated),
                CurveRecord::new(0, MarkedNode::NonIsolated)
            ]))
            .unwrap(),
            0
        );
        assert!(matches!(
            theta_of(&w(vec![CurveRecord::unmarked(0)])),
            Err(Error::UnmarkedRecord)
        ));
    }

    #[test]
    fn cusp_pair_create() {
        let empty = CurveWorld::new(cls(4)).unwrap();
        let mv = WallMove::CuspPairCreate { mass: 2, marked: MarkedNode::None };
        let w = apply_move(&empty, &mv).unwrap();
        assert_eq!(w.records().collect::<Vec<_>>(), vec![CurveRecord::unmarked(2), CurveRecord::unmarked(3)]);
        assert_eq!(chi_of(&w), 0);
        // degree 3 has a single node
        assert!(apply_move(&CurveWorld::new(cls(3)).unwrap(), &mv).is_err());
        let back = apply_move(&w, &inverse_move(&mv)).unwrap();
        assert_eq!(back, empty);
        assert!(apply_move(&empty, &inverse_move(&mv)).is_err());
    }

    #[test]
    fn marked_cusp_flip() {
        let rec = CurveRecord::new(1, MarkedNode::NonIsolated);
        let w = CurveWorld::with_curves(cls(4), [rec]).unwrap();
        assert_eq!(theta_of(&w).unwrap(), -1);
        for (outcome, mass) in [(FlipOutcome::MassUp, 2), (FlipOutcome::MassDown, 0)] {
            let mv = WallMove::MarkedCuspFlip { record: rec, outcome };
            let after = apply_move(&w, &mv).unwrap();
            assert_eq!(after.records().collect::<Vec<_>>(), vec![CurveRecord::new(mass, MarkedNode::Isolated)]);
            assert_eq!(theta_of(&after).unwrap(), -1);
            assert_eq!(apply_move(&after, &inverse_move(&mv)).unwrap(), w);
        }
        let same = WallMove::MarkedCuspFlip { record: rec, outcome: FlipOutcome::Unchanged };
        assert_eq!(apply_move(&w, &same).unwrap(), w);

        let top = CurveWorld::with_curves(cls(3), [CurveRecord::new(1, MarkedNode::Isolated)]).unwrap();
        let up = WallMove::MarkedCuspFlip {
            record: CurveRecord::new(1, MarkedNode::Isolated),
            outcome: FlipOutcome::MassUp,
        };
        assert!(apply_move(&top, &up).is_err());
        let unmarked = CurveWorld::with_curves(cls(4), [CurveRecord::unmarked(1)]).unwrap();
        let mv = WallMove::MarkedCuspFlip { record: CurveRecord::unmarked(1), outcome: FlipOutcome::MassUp };
        assert!(apply_move(&unmarked, &mv).is_err());
    }

    #[test]
    fn reducible_wall_keeps_world() {
        let w = CurveWorld::with_curves(cls(4), [0, 1, 3].map(CurveRecord::unmarked)).unwrap();
        assert_eq!(apply_move(&w, &WallMove::ReducibleWall(3)).unwrap(), w);
        assert!(apply_move(&w, &WallMove::ReducibleWall(4)).is_err());
    }

    #[test]
    fn walks() {
        let t = random_walk(0, 0, &cls(4), Marking::Unmarked).unwrap();
        assert_eq!(t.steps.len(), 1);
        assert!(t.steps[0].mv.is_none());
        let t = random_walk(7, 10_000, &cls(5), Marking::Unmarked).unwrap();
        assert!(t.chi_constant());
        let t = random_walk(7, 2_000, &cls(5), Marking::Marked).unwrap();
        assert!(t.theta_constant());
        assert_eq!(t, random_walk(7, 2_000, &cls(5), Marking::Marked).unwrap());
        assert!(t.to_text().starts_with("0 start "));
    }

    #[test]
    fn collision_examples() {
        let c = collision_identity(&[], &[0], &[]);
        assert_eq!((c.chi_plus, c.chi_minus, c.theta_diff), (2, 0, 1));
        let c = collision_identity(&[0], &[], &[0]);
        assert_eq!((c.chi_plus, c.chi_minus, c.theta_diff), (1, 3, -1));
        let c = collision_identity(&[0, 1], &[1], &[1]);
        assert_eq!((c.chi_plus, c.chi_minus, c.theta_diff), (-2, -2, 0));
    }

    fn arb_world(marked: bool) -> impl Strategy<Value = CurveWorld> {
        let node = if marked {
            prop_oneof![Just(MarkedNode::Isolated), Just(MarkedNode::NonIsolated)].boxed()
        } else {
            Just(MarkedNode::None).boxed()
        };
        (1i64..7).prop_flat_map(move |d| {
            let delta = SurfaceClass::cp2(d).unwrap().delta().unwrap();
            proptest::collection::vec((0..=delta, node.clone()), 0..10).prop_map(move |rs| {
                CurveWorld::with_curves(cls(d), rs.into_iter().map(|(m, n)| CurveRecord::new(m, n))).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn moves_preserve_counts_and_invert(world in arb_world(true), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..20 {
                let mv = random_move(&mut rng, &world, Marking::Marked);
                let next = apply_move(&world, &mv).unwrap();
                // a flip at the marked point moves the mass parity: only θ survives it
                if !matches!(mv, WallMove::MarkedCuspFlip { outcome: FlipOutcome::MassUp | FlipOutcome::MassDown, .. }) {
                    prop_assert_eq!(chi_of(&next), chi_of(&world));
                }
                prop_assert_eq!(theta_of(&next).unwrap(), theta_of(&world).unwrap());
                prop_assert_eq!(apply_move(&next, &inverse_move(&mv)).unwrap(), world.clone());
            }
        }

        #[test]
        fn unmarked_moves_preserve_chi(world in arb_world(false), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut w = world.clone();
            for _ in 0..50 {
                let mv = random_move(&mut rng, &w, Marking::Unmarked);
                w = apply_move(&w, &mv).unwrap();
                prop_assert_eq!(chi_of(&w), chi_of(&world));
            }
        }

        #[test]
        fn collision_identity_holds(
            t in proptest::collection::vec(0i64..10, 0..8),
            p in proptest::collection::vec(0i64..10, 0..8),
            m in proptest::collection::vec(0i64..10, 0..8),
        ) {
            let c = collision_identity(&t, &p, &m);
            prop_assert_eq!(c.chi_plus - c.chi_minus, 2 * c.theta_diff);
            prop_assert_eq!(c.theta_diff, c.theta_direct);
        }
    }
}
