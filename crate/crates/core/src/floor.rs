//! Genus-0 floor diagrams of the projective plane.
//!
//! A degree-`d` diagram has floors `0 < 1 < … < d−1`, a tree of bounded
//! edges oriented upward, and `d` unbounded edges of weight 1 going up to
//! infinity, with every floor of divergence 1. Summing
//! `ν(D)·μ(D)` over diagrams gives `N_d`; summing `ν(D)·μ_ℝ(D)` gives the
//! count `W_d` of real curves through `3d − 1` real points.
//!
//! Trees are enumerated through Prüfer sequences, so each labelled tree (and
//! hence each floor-order-preserving isomorphism class) is produced once.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest degree accepted by the enumerator.
pub const MAX_DEGREE: usize = 8;

/// Degrees above this are folded without keeping the per-diagram census.
pub const DEFAULT_CENSUS_CAP: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BoundedEdge {
    pub lower: usize,
    pub upper: usize,
    pub weight: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FloorDiagram {
    pub degree: usize,
    /// Sorted by `(lower, upper, weight)`.
    pub bounded: Vec<BoundedEdge>,
    /// Floor of each weight-1 unbounded edge, sorted.
    pub unbounded: Vec<usize>,
}

impl FloorDiagram {
    pub fn new(degree: usize, mut bounded: Vec<BoundedEdge>, mut unbounded: Vec<usize>) -> Self {
        bounded.sort();
        unbounded.sort();
        FloorDiagram {
            degree,
            bounded,
            unbounded,
        }
    }

    fn unbounded_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.degree];
        for &v in &self.unbounded {
            counts[v] += 1;
        }
        counts
    }

    /// Checks tree shape, orientation, divergence and total unbounded weight.
    pub fn is_valid(&self) -> bool {
        let d = self.degree;
        if d == 0 || self.bounded.len() + 1 != d || self.unbounded.len() != d {
            return false;
        }
        if self.unbounded.iter().any(|&v| v >= d) {
            return false;
        }
        let mut parent: Vec<usize> = (0..d).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut div: Vec<i64> = self.unbounded_counts().iter().map(|&c| c as i64).collect();
        for e in &self.bounded {
            if e.lower >= e.upper || e.upper >= d || e.weight == 0 {
                return false;
            }
            let (a, b) = (find(&mut parent, e.lower), find(&mut parent, e.upper));
            if a == b {
                return false;
            }
            parent[a] = b;
            div[e.lower] += e.weight as i64;
            div[e.upper] -= e.weight as i64;
        }
        div.iter().all(|&x| x == 1)
    }

    /// Order of the group of edge permutations fixing every floor: edges with
    /// identical endpoints and weight may be swapped.
    pub fn automorphism_count(&self) -> u128 {
        let mut groups: HashMap<(usize, Option<usize>, u32), u128> = HashMap::new();
        for e in &self.bounded {
            *groups.entry((e.lower, Some(e.upper), e.weight)).or_default() += 1;
        }
        for &v in &self.unbounded {
            *groups.entry((v, None, 1)).or_default() += 1;
        }
        groups.values().map(|&n| (1..=n).product::<u128>()).product()
    }
}

/// One census line: `bounded=1>2:1,2>3:2 unbounded=2,3,3`, floors 1-based.
impl fmt::Display for FloorDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bounded: Vec<String> = self
            .bounded
            .iter()
            .map(|e| format!("{}>{}:{}", e.lower + 1, e.upper + 1, e.weight))
            .collect();
        let unbounded: Vec<String> = self.unbounded.iter().map(|v| (v + 1).to_string()).collect();
        let b = if bounded.is_empty() { "-".to_string() } else { bounded.join(",") };
        write!(f, "bounded={} unbounded={}", b, unbounded.join(","))
    }
}

fn check_degree(d: usize) -> Result<()> {
    if d == 0 || d > MAX_DEGREE {
        return Err(Error::OutOfRange(format!(
            "floor diagram degree must be in 1..={MAX_DEGREE}, got {d}"
        )));
    }
    Ok(())
}

fn prufer_count(d: usize) -> usize {
    if d <= 2 {
        1
    } else {
        d.pow(d as u32 - 2)
    }
}

/// Edges `(lower, upper)` of the labelled tree with Prüfer index `index`.
fn prufer_tree(d: usize, index: usize) -> Vec<(usize, usize)> {
    if d == 1 {
        return Vec::new();
    }
    if d == 2 {
        return vec![(0, 1)];
    }
    let mut seq = Vec::with_capacity(d - 2);
    let mut rest = index;
    for _ in 0..d - 2 {
        seq.push(rest % d);
        rest /= d;
    }
    seq.reverse();
    let mut degree = vec![1usize; d];
    for &x in &seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(d - 1);
    for &x in &seq {
        let leaf = (0..d).find(|&v| degree[v] == 1).expect("a leaf exists");
        edges.push((leaf.min(x), leaf.max(x)));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let last: Vec<usize> = (0..d).filter(|&v| degree[v] == 1).collect();
    edges.push((last[0], last[1]));
    edges.sort();
    edges
}

/// All weightings of a tree satisfying the divergence condition.
fn weightings(d: usize, tree: &[(usize, usize)]) -> Vec<FloorDiagram> {
    let mut out = Vec::new();
    let mut weights = vec![0u32; tree.len()];
    let mut unbounded = vec![0usize; d];
    assign_floor(d, tree, 0, &mut weights, &mut unbounded, &mut out);
    out
}

fn assign_floor(
    d: usize,
    tree: &[(usize, usize)],
    v: usize,
    weights: &mut [u32],
    unbounded: &mut [usize],
    out: &mut Vec<FloorDiagram>,
) {
    if v == d {
        let bounded = tree
            .iter()
            .zip(weights.iter())
            .map(|(&(lower, upper), &weight)| BoundedEdge { lower, upper, weight })
            .collect();
        let unb = unbounded
            .iter()
            .enumerate()
            .flat_map(|(f, &c)| std::iter::repeat_n(f, c))
            .collect();
        out.push(FloorDiagram::new(d, bounded, unb));
        return;
    }
    let inflow: u32 = tree
        .iter()
        .zip(weights.iter())
        .filter(|((_, upper), _)| *upper == v)
        .map(|(_, w)| *w)
        .sum();
    let budget = 1 + inflow;
    let up: Vec<usize> = (0..tree.len()).filter(|&i| tree[i].0 == v).collect();
    distribute(d, tree, v, &up, 0, budget, weights, unbounded, out);
}

#[allow(clippy::too_many_arguments)]
fn distribute(
    d: usize,
    tree: &[(usize, usize)],
    v: usize,
    up: &[usize],
    pos: usize,
    remaining: u32,
    weights: &mut [u32],
    unbounded: &mut [usize],
    out: &mut Vec<FloorDiagram>,
) {
    if pos == up.len() {
        unbounded[v] = remaining as usize;
        assign_floor(d, tree, v + 1, weights, unbounded, out);
        return;
    }
    let still_needed = (up.len() - pos - 1) as u32;
    if remaining < 1 + still_needed {
        return;
    }
    for w in 1..=remaining - still_needed {
        weights[up[pos]] = w;
        distribute(d, tree, v, up, pos + 1, remaining - w, weights, unbounded, out);
    }
    weights[up[pos]] = 0;
}

/// Every degree-`d` floor diagram, sorted canonically.
pub fn enumerate_diagrams(d: usize) -> Result<Vec<FloorDiagram>> {
    check_degree(d)?;
    let mut all: Vec<FloorDiagram> = (0..prufer_count(d))
        .flat_map(|i| weightings(d, &prufer_tree(d, i)))
        .collect();
    all.sort();
    all.dedup();
    Ok(all)
}

/// Number of markings of `diagram` up to automorphism: linear orderings of
/// floors, bounded and unbounded edges compatible with the diagram, where
/// unbounded edges on a common floor are indistinguishable.
pub fn count_markings(diagram: &FloorDiagram) -> u128 {
    MarkingCounter::new(diagram).count()
}

struct MarkingCounter {
    degree: usize,
    bounded: Vec<(usize, usize)>,
    unbounded: Vec<usize>,
    // bounded edges entering each floor from below, as a mask
    below_mask: Vec<u32>,
    memo: HashMap<u64, u128>,
}

// state layout: bits 0..8 bounded-edge mask, 8..12 floors placed,
// 12.. four bits per floor of unbounded edges placed
impl MarkingCounter {
    fn new(diagram: &FloorDiagram) -> Self {
        let d = diagram.degree;
        let bounded: Vec<(usize, usize)> = diagram.bounded.iter().map(|e| (e.lower, e.upper)).collect();
        let mut below_mask = vec![0u32; d];
        for (i, &(_, upper)) in bounded.iter().enumerate() {
            below_mask[upper] |= 1 << i;
        }
        MarkingCounter {
            degree: d,
            bounded,
            unbounded: diagram.unbounded_counts(),
            below_mask,
            memo: HashMap::new(),
        }
    }

    fn count(&mut self) -> u128 {
        self.ways(0)
    }

    fn ways(&mut self, state: u64) -> u128 {
        let edge_mask = (state & 0xff) as u32;
        let floors = ((state >> 8) & 0xf) as usize;
        let placed_unb = |v: usize| ((state >> (12 + 4 * v)) & 0xf) as usize;
        let full_edges = (1u32 << self.bounded.len()) - 1;
        if floors == self.degree
            && edge_mask == full_edges
            && (0..self.degree).all(|v| placed_unb(v) == self.unbounded[v])
        {
            return 1;
        }
        if let Some(&v) = self.memo.get(&state) {
            return v;
        }
        let mut total = 0u128;
        if floors < self.degree && self.below_mask[floors] & !edge_mask == 0 {
            total += self.ways(state + (1 << 8));
        }
        for i in 0..self.bounded.len() {
            if edge_mask & (1 << i) == 0 && self.bounded[i].0 < floors {
                total += self.ways(state | (1 << i));
            }
        }
        for v in 0..floors {
            if placed_unb(v) < self.unbounded[v] {
                total += self.ways(state + (1 << (12 + 4 * v)));
            }
        }
        self.memo.insert(state, total);
        total
    }
}

/// `(μ, μ_ℝ)`: the complex multiplicity `Π w²` and the real multiplicity.
pub fn multiplicities(diagram: &FloorDiagram) -> (BigInt, i64) {
    let mu = diagram
        .bounded
        .iter()
        .fold(BigInt::one(), |acc, e| acc * BigInt::from(e.weight) * BigInt::from(e.weight));
    (mu, real_multiplicity(diagram))
}

/// Real multiplicity for a configuration of real points: zero as soon as an
/// edge has even weight, and 1 otherwise. Each odd elevator of weight `w`
/// meets floors at two vertices of multiplicity `w`, each signed
/// `(−1)^{(w−1)/2}`, so the signs cancel edgewise.
pub fn real_multiplicity(diagram: &FloorDiagram) -> i64 {
    if diagram.bounded.iter().any(|e| e.weight % 2 == 0) {
        0
    } else {
        1
    }
}

/// The sign `(−1)^{Σ(w−1)/2}` taken once per edge, with even weights
/// annihilating. Kept for comparison; it disagrees with [`real_multiplicity`]
/// from degree 4 on.
pub fn single_sign_real_multiplicity(diagram: &FloorDiagram) -> i64 {
    if diagram.bounded.iter().any(|e| e.weight % 2 == 0) {
        return 0;
    }
    let exponent: u32 = diagram.bounded.iter().map(|e| (e.weight - 1) / 2).sum();
    if exponent.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusEntry {
    pub diagram: FloorDiagram,
    #[serde(serialize_with = "as_string")]
    pub markings: u128,
    #[serde(serialize_with = "as_string")]
    pub mu_complex: BigInt,
    pub mu_real: i64,
}

fn as_string<T: fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramCount {
    pub d: usize,
    #[serde(serialize_with = "as_string")]
    pub n_complex: BigInt,
    #[serde(serialize_with = "as_string")]
    pub w_real: BigInt,
    pub diagrams: u64,
    /// Present when `d` is within the census cap.
    pub census: Option<Vec<CensusEntry>>,
}

impl DiagramCount {
    /// One diagram per line: edges, weights, ν, μ, μ_ℝ.
    pub fn census_table(&self) -> String {
        let mut out = String::new();
        if let Some(census) = &self.census {
            for c in census {
                out.push_str(&format!(
                    "{} nu={} mu={} mu_real={}\n",
                    c.diagram, c.markings, c.mu_complex, c.mu_real
                ));
            }
        }
        out
    }
}

#[derive(Default)]
struct Partial {
    n: BigInt,
    w: BigInt,
    diagrams: u64,
    census: Vec<CensusEntry>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.n += other.n;
        self.w += other.w;
        self.diagrams += other.diagrams;
        self.census.extend(other.census);
        self
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CountOptions {
    /// Worker threads; 1 runs on the calling thread.
    pub jobs: usize,
    pub census_cap: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            jobs: 1,
            census_cap: DEFAULT_CENSUS_CAP,
        }
    }
}

fn tree_partial(d: usize, index: usize, keep_census: bool) -> Partial {
    let mut p = Partial::default();
    for diagram in weightings(d, &prufer_tree(d, index)) {
        let nu = count_markings(&diagram);
        let (mu, mu_r) = multiplicities(&diagram);
        let nu_big = BigInt::from(nu);
        p.n += &nu_big * &mu;
        p.w += &nu_big * BigInt::from(mu_r);
        p.diagrams += 1;
        if keep_census {
            p.census.push(CensusEntry {
                diagram,
                markings: nu,
                mu_complex: mu,
                mu_real: mu_r,
            });
        }
    }
    p
}

pub fn count_degree(d: usize) -> Result<DiagramCount> {
    count_degree_with(d, CountOptions::default())
}

/// Folds `(N, W)` over all diagrams, partitioned by underlying tree.
pub fn count_degree_with(d: usize, options: CountOptions) -> Result<DiagramCount> {
    check_degree(d)?;
    let keep = d <= options.census_cap;
    let trees = prufer_count(d);
    let total = if options.jobs <= 1 {
        (0..trees)
            .map(|i| tree_partial(d, i, keep))
            .fold(Partial::default(), Partial::merge)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.jobs)
            .build()
            .map_err(|e| Error::OutOfRange(format!("cannot start {} workers: {e}", options.jobs)))?;
        pool.install(|| {
            (0..trees)
                .into_par_iter()
                .map(|i| tree_partial(d, i, keep))
                .reduce(Partial::default, Partial::merge)
        })
    };
    let census = keep.then(|| {
        let mut c = total.census;
        c.sort_by(|a, b| a.diagram.cmp(&b.diagram));
        c
    });
    Ok(DiagramCount {
        d,
        n_complex: total.n,
        w_real: total.w,
        diagrams: total.diagrams,
        census,
    })
}

/// Sum of `ν·μ_ℝ` under an alternative real multiplicity rule.
pub fn real_count_with(d: usize, rule: fn(&FloorDiagram) -> i64) -> Result<BigInt> {
    Ok(enumerate_diagrams(d)?
        .iter()
        .map(|dg| BigInt::from(count_markings(dg)) * BigInt::from(rule(dg)))
        .fold(BigInt::zero(), |a, b| a + b))
}
