//! Cut flows and conductance.
//!
//! With the uniform stationary distribution, `Q(A, B) = Σ_{i∈A, j∈B} p_ij / n`
//! and `Φ(S) = Q(S, Sᶜ) / (π(S) π(Sᶜ))`. The global conductance is the
//! minimum of `Φ(S)` over all nonempty proper subsets.
//!
//! Minimisers are reported canonically: first the smallest value `v*` is
//! found, then the lexicographically smallest set whose value is within a
//! relative `1e-12` of `v*`. The result does not depend on enumeration order
//! or on how the work was split between threads.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::chain::{self, TransitionMatrix};
use crate::exec::{self, Parallelism};
use crate::topology::{self, ArcRule, LongRangeGraph, TopologyError};

/// Largest chain handled by [`conductance_exact`].
pub const EXACT_LIMIT: usize = 20;
/// Default size limit of [`conductance_connected`].
pub const CONNECTED_LIMIT: usize = 40;
/// Relative slack under which two cut values count as tied.
pub const TIE_REL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConductanceError {
    #[error("sets overlap at node {0}")]
    OverlappingSets(usize),
    #[error("cut set must be nonempty and proper")]
    EmptyOrFullSet,
    #[error("node {node} outside a chain on {n} states")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("chain on {n} states exceeds the enumeration limit {limit}; use connected enumeration or arc bounds")]
    TooLarge { n: usize, limit: usize },
    #[error("connectivity graph of the chain is disconnected")]
    DisconnectedChain,
    #[error("graph has no empty arc")]
    NoEmptyArc,
    #[error("graph has {graph} nodes but the chain has {chain} states")]
    SizeMismatch { graph: usize, chain: usize },
}

type Result<T> = std::result::Result<T, ConductanceError>;

/// A cut `S` with its flow `Q(S, Sᶜ)`, denominator `π(S)π(Sᶜ)` and `Φ(S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutResult {
    /// Sorted node ids.
    pub set: Vec<usize>,
    pub flow: f64,
    pub denom: f64,
    pub phi: f64,
}

impl CutResult {
    pub const CSV_HEADER: &'static str = "phi,flow,denom,set";

    /// `phi,flow,denom,set` with the set as hyphen-joined node ids.
    pub fn csv_row(&self) -> String {
        let set: Vec<String> = self.set.iter().map(|v| v.to_string()).collect();
        format!("{},{},{},{}", self.phi, self.flow, self.denom, set.join("-"))
    }
}

/// How a conductance value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhiKind {
    Exact,
    ConnectedExact,
    ArcUpperBound,
}

impl PhiKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PhiKind::Exact => "exact",
            PhiKind::ConnectedExact => "connected-exact",
            PhiKind::ArcUpperBound => "arc-upper-bound",
        }
    }
}

impl fmt::Display for PhiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PhiKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(PhiKind::Exact),
            "connected-exact" => Ok(PhiKind::ConnectedExact),
            "arc-upper-bound" => Ok(PhiKind::ArcUpperBound),
            other => Err(format!("unknown conductance kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConductanceEstimate {
    pub value: f64,
    pub kind: PhiKind,
    pub witness: Option<CutResult>,
}

fn membership(n: usize, set: &[usize]) -> Result<Vec<bool>> {
    let mut inside = vec![false; n];
    for &v in set {
        if v >= n {
            return Err(ConductanceError::NodeOutOfRange { node: v, n });
        }
        inside[v] = true;
    }
    Ok(inside)
}

/// `Q(A, B)` under the uniform distribution.
pub fn flow(p: &TransitionMatrix, a: &[usize], b: &[usize]) -> Result<f64> {
    let n = p.n();
    let in_a = membership(n, a)?;
    let in_b = membership(n, b)?;
    if let Some(v) = (0..n).find(|&v| in_a[v] && in_b[v]) {
        return Err(ConductanceError::OverlappingSets(v));
    }
    let mut total = 0.0;
    for i in (0..n).filter(|&i| in_a[i]) {
        total += p.row(i).filter(|&(j, _)| in_b[j]).map(|(_, q)| q).sum::<f64>();
    }
    Ok(total / n as f64)
}

/// Outgoing mass `Σ_{i∈S, j∉S} p_ij`, summed by ascending `i` then `j`.
fn boundary_mass(p: &TransitionMatrix, inside: impl Fn(usize) -> bool) -> f64 {
    let mut total = 0.0;
    for i in (0..p.n()).filter(|&i| inside(i)) {
        for (j, q) in p.row(i) {
            if !inside(j) {
                total += q;
            }
        }
    }
    total
}

fn cut_from_mass(n: usize, size: usize, mass: f64) -> (f64, f64, f64) {
    let nf = n as f64;
    let flow = mass / nf;
    let denom = (size as f64 / nf) * ((n - size) as f64 / nf);
    (flow, denom, flow / denom)
}

/// `Φ(S)` with its flow and denominator.
pub fn phi_of_set(p: &TransitionMatrix, set: &[usize]) -> Result<CutResult> {
    let n = p.n();
    let inside = membership(n, set)?;
    let size = inside.iter().filter(|&&b| b).count();
    if size == 0 || size == n {
        return Err(ConductanceError::EmptyOrFullSet);
    }
    let (flow, denom, phi) = cut_from_mass(n, size, boundary_mass(p, |v| inside[v]));
    let set = (0..n).filter(|&v| inside[v]).collect();
    Ok(CutResult { set, flow, denom, phi })
}

fn mask_phi(p: &TransitionMatrix, mask: u64) -> f64 {
    let size = mask.count_ones() as usize;
    cut_from_mass(p.n(), size, boundary_mass(p, |v| mask >> v & 1 == 1)).2
}

fn mask_nodes(mask: u64) -> Vec<usize> {
    (0..64).filter(|&v| mask >> v & 1 == 1).collect()
}

/// Lexicographic order of the sorted element lists of two bit sets.
fn lex_cmp(a: u64, b: u64) -> Ordering {
    let diff = a ^ b;
    if diff == 0 {
        return Ordering::Equal;
    }
    let bit = diff.trailing_zeros();
    // The set holding the lowest differing element is smaller, unless the
    // other set has ended at that point.
    let a_has = a >> bit & 1 == 1;
    let other = if a_has { b } else { a };
    let smaller_is_a = a_has == (other >> bit != 0);
    if smaller_is_a {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

fn within_tie(phi: f64, best: f64) -> bool {
    phi <= best * (1.0 + TIE_REL)
}

/// Candidate minimisers collected by one piece of an enumeration: every set
/// that was within the tie slack of the running minimum when seen.
#[derive(Debug, Default, Clone)]
struct Candidates {
    best: f64,
    sets: Vec<(f64, u64)>,
}

impl Candidates {
    fn new() -> Self {
        Candidates { best: f64::INFINITY, sets: Vec::new() }
    }

    fn offer(&mut self, phi: f64, mask: u64) {
        if !within_tie(phi, self.best) {
            return;
        }
        if phi < self.best {
            self.best = phi;
            let best = self.best;
            self.sets.retain(|&(v, _)| within_tie(v, best));
        }
        self.sets.push((phi, mask));
    }

    fn merge(parts: impl IntoIterator<Item = Candidates>) -> Option<(f64, u64)> {
        let all: Vec<(f64, u64)> = parts.into_iter().flat_map(|c| c.sets).collect();
        let best = all.iter().map(|&(v, _)| v).fold(f64::INFINITY, f64::min);
        all.into_iter()
            .filter(|&(v, _)| within_tie(v, best))
            .min_by(|x, y| lex_cmp(x.1, y.1))
    }
}

fn estimate_from_mask(p: &TransitionMatrix, mask: u64, kind: PhiKind) -> ConductanceEstimate {
    let witness = phi_of_set(p, &mask_nodes(mask)).expect("enumerated sets are proper");
    ConductanceEstimate { value: witness.phi, kind, witness: Some(witness) }
}

/// Exact conductance by enumerating all `2ⁿ − 2` cuts (`n ≤ 20`).
pub fn conductance_exact(p: &TransitionMatrix) -> Result<ConductanceEstimate> {
    conductance_exact_with(p, Parallelism::Auto)
}

pub fn conductance_exact_with(p: &TransitionMatrix, par: Parallelism) -> Result<ConductanceEstimate> {
    let n = p.n();
    if n > EXACT_LIMIT {
        return Err(ConductanceError::TooLarge { n, limit: EXACT_LIMIT });
    }
    if n < 2 {
        return Err(ConductanceError::EmptyOrFullSet);
    }
    let full = (1u64 << n) - 1;
    const CHUNK: u64 = 1 << 12;
    let chunks = full.div_ceil(CHUNK) as usize;
    let parts = exec::map_range(par, chunks, |c| {
        let mut cand = Candidates::new();
        let lo = (c as u64 * CHUNK).max(1);
        let hi = ((c as u64 + 1) * CHUNK).min(full);
        for mask in lo..hi {
            cand.offer(mask_phi(p, mask), mask);
        }
        cand
    });
    let (_, mask) = Candidates::merge(parts).expect("n ≥ 2 has a proper cut");
    Ok(estimate_from_mask(p, mask, PhiKind::Exact))
}

/// Exact conductance restricted to connected sets, with the default limit.
pub fn conductance_connected(p: &TransitionMatrix) -> Result<ConductanceEstimate> {
    conductance_connected_with(p, CONNECTED_LIMIT, Parallelism::Auto)
}

/// Minimum of `Φ(S)` over sets `S` inducing a connected subgraph of the
/// connectivity graph.
///
/// For doubly stochastic chains `Φ(S) = Φ(Sᶜ)`, and both a minimiser and its
/// complement are connected, so only sets containing node 0 are visited.
pub fn conductance_connected_with(
    p: &TransitionMatrix,
    limit: usize,
    par: Parallelism,
) -> Result<ConductanceEstimate> {
    let n = p.n();
    if n > limit.min(64) {
        return Err(ConductanceError::TooLarge { n, limit: limit.min(64) });
    }
    if n < 2 {
        return Err(ConductanceError::EmptyOrFullSet);
    }
    if !p.is_connected() {
        return Err(ConductanceError::DisconnectedChain);
    }
    let adj: Vec<u64> = p
        .connectivity()
        .iter()
        .map(|nb| nb.iter().fold(0u64, |m, &v| m | 1 << v))
        .collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let roots: Vec<usize> = if chain::is_doubly_stochastic(p, chain::STOCHASTIC_TOL) {
        vec![0]
    } else {
        (0..n).collect()
    };
    let mut tasks = Vec::new();
    for root in roots {
        // sets whose smallest node is `root`
        let banned = (1u64 << root) - 1;
        let start = Branch { set: 1 << root, frontier: adj[root] & !banned, excluded: banned | 1 << root, fresh: true };
        split_tasks(start, &adj, 8, &mut tasks);
    }
    let parts = exec::map(par, tasks, |b| {
        let mut cand = Candidates::new();
        let mut stack = vec![b];
        while let Some(b) = stack.pop() {
            if b.fresh && b.set != full {
                cand.offer(mask_phi(p, b.set), b.set);
            }
            stack.extend(b.children(&adj));
        }
        cand
    });
    let (_, mask) = Candidates::merge(parts).ok_or(ConductanceError::EmptyOrFullSet)?;
    Ok(estimate_from_mask(p, mask, PhiKind::ConnectedExact))
}

/// A node of the connected-set search tree: `set` is connected, `frontier`
/// holds the neighbours that may still be added, `excluded` those that may not.
/// `fresh` marks the branch that first reaches `set`.
#[derive(Debug, Clone, Copy)]
struct Branch {
    set: u64,
    frontier: u64,
    excluded: u64,
    fresh: bool,
}

impl Branch {
    /// Include-or-exclude split on the lowest frontier node. Every connected
    /// superset is reached exactly once.
    fn children(&self, adj: &[u64]) -> Vec<Branch> {
        if self.frontier == 0 {
            return Vec::new();
        }
        let v = self.frontier.trailing_zeros() as usize;
        let bit = 1u64 << v;
        let excluded = self.excluded | bit;
        let with = Branch {
            set: self.set | bit,
            frontier: (self.frontier | adj[v]) & !(self.set | bit) & !self.excluded,
            excluded: self.excluded,
            fresh: true,
        };
        let without = Branch { set: self.set, frontier: self.frontier & !bit, excluded, fresh: false };
        vec![with, without]
    }
}

/// Expands the search tree a few levels so the pieces can run in parallel.
fn split_tasks(root: Branch, adj: &[u64], depth: usize, out: &mut Vec<Branch>) {
    if depth == 0 || root.frontier == 0 {
        out.push(root);
        return;
    }
    let kids = root.children(adj);
    let mut kids = kids.into_iter();
    let with = kids.next().expect("frontier is nonempty");
    let mut without = kids.next().expect("frontier is nonempty");
    // `root` itself is never run, so its set is reported through `without`
    without.fresh = root.fresh;
    split_tasks(with, adj, depth - 1, out);
    split_tasks(without, adj, depth - 1, out);
}

/// Upper bound `min Φ(A)` over the maximal empty arcs `A` of `g`.
pub fn conductance_arc_upper(p: &TransitionMatrix, g: &LongRangeGraph) -> Result<ConductanceEstimate> {
    conductance_arc_upper_with(p, g, ArcRule::NoIncidentEdge)
}

pub fn conductance_arc_upper_with(
    p: &TransitionMatrix,
    g: &LongRangeGraph,
    rule: ArcRule,
) -> Result<ConductanceEstimate> {
    if g.n() != p.n() {
        return Err(ConductanceError::SizeMismatch { graph: g.n(), chain: p.n() });
    }
    let arcs = match topology::empty_arcs(g, rule) {
        Ok(a) => a,
        Err(TopologyError::NoEndpoints { .. }) => return Err(ConductanceError::NoEmptyArc),
        Err(_) => return Err(ConductanceError::NoEmptyArc),
    };
    let mut best: Option<CutResult> = None;
    for arc in arcs.iter().filter(|a| a.len < g.n()) {
        let cut = phi_of_set(p, &arc.sorted_nodes(g.n()))?;
        best = match best {
            None => Some(cut),
            Some(b) => {
                let keep_new = if within_tie(cut.phi, b.phi) && within_tie(b.phi, cut.phi) {
                    cut.set < b.set
                } else {
                    cut.phi < b.phi
                };
                Some(if keep_new { cut } else { b })
            }
        };
    }
    let witness = best.ok_or(ConductanceError::NoEmptyArc)?;
    Ok(ConductanceEstimate { value: witness.phi, kind: PhiKind::ArcUpperBound, witness: Some(witness) })
}

/// Best available estimate by size: exhaustive up to [`EXACT_LIMIT`],
/// connected enumeration up to [`CONNECTED_LIMIT`], arc bound beyond.
pub fn best_estimate(p: &TransitionMatrix, g: &LongRangeGraph, par: Parallelism) -> Result<ConductanceEstimate> {
    let n = p.n();
    if n <= EXACT_LIMIT {
        conductance_exact_with(p, par)
    } else if n <= CONNECTED_LIMIT {
        conductance_connected_with(p, CONNECTED_LIMIT, par)
    } else {
        conductance_arc_upper(p, g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{build_homogeneous, ChainParams};
    use crate::topology::Model;

    fn cycle(n: usize, edges: &[(usize, usize)]) -> LongRangeGraph {
        LongRangeGraph::new(n, 1.5, Model::M2, 0, edges.iter().copied()).unwrap()
    }

    fn sym_walk(n: usize) -> TransitionMatrix {
        build_homogeneous(&cycle(n, &[]), &ChainParams::new(0.25, 0.0, 0.0, 1).unwrap()).unwrap()
    }

    #[test]
    fn lex_order_matches_sorted_lists() {
        let sets = [0b1u64, 0b11, 0b101, 0b10, 0b110, 0b1000, 0b1001, 0b111];
        for &a in &sets {
            for &b in &sets {
                assert_eq!(lex_cmp(a, b), mask_nodes(a).cmp(&mask_nodes(b)), "{a:b} vs {b:b}");
            }
        }
    }

    #[test]
    fn flows_on_small_chains() {
        let two = TransitionMatrix::from_dense(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert_eq!(flow(&two, &[0], &[1]).unwrap(), 0.25);
        let p = sym_walk(4);
        assert_eq!(flow(&p, &[0, 1], &[2, 3]).unwrap(), 0.125);
        assert_eq!(flow(&p, &[0, 1], &[1, 2]), Err(ConductanceError::OverlappingSets(1)));
    }

    #[test]
    fn phi_on_four_cycle() {
        let p = sym_walk(4);
        assert_eq!(phi_of_set(&p, &[0, 1]).unwrap().phi, 0.5);
        assert!((phi_of_set(&p, &[0]).unwrap().phi - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(phi_of_set(&p, &[]), Err(ConductanceError::EmptyOrFullSet));
        assert_eq!(phi_of_set(&p, &[0, 1, 2, 3]), Err(ConductanceError::EmptyOrFullSet));
        let est = conductance_exact(&p).unwrap();
        assert_eq!(est.value, 0.5);
        assert_eq!(est.witness.as_ref().unwrap().set, vec![0, 1]);
        assert_eq!(est.witness.unwrap().csv_row(), "0.5,0.125,0.25,0-1");
    }

    #[test]
    fn two_state_chain() {
        let q = 0.3;
        let p = TransitionMatrix::from_dense(&[vec![1.0 - q, q], vec![q, 1.0 - q]]).unwrap();
        let est = conductance_exact(&p).unwrap();
        assert!((est.value - 2.0 * q).abs() < 1e-15);
        assert_eq!(est.witness.unwrap().set, vec![0]);
    }

    #[test]
    fn connected_matches_exact_on_chorded_cycle() {
        let g = cycle(12, &[(0, 5), (3, 9), (7, 11)]);
        let p = build_homogeneous(&g, &ChainParams::new(0.2, 0.1, 0.05, 2).unwrap()).unwrap();
        let a = conductance_exact_with(&p, Parallelism::Sequential).unwrap();
        let b = conductance_connected(&p).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.witness.unwrap().set, b.witness.unwrap().set);
    }

    #[test]
    fn connected_limits() {
        assert!(matches!(conductance_exact(&sym_walk(21)), Err(ConductanceError::TooLarge { .. })));
        assert!(matches!(conductance_connected(&sym_walk(41)), Err(ConductanceError::TooLarge { .. })));
        let p = TransitionMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(conductance_connected(&p), Err(ConductanceError::DisconnectedChain));
    }

    #[test]
    fn plain_cycle_minimiser_is_a_half_arc() {
        let p = sym_walk(30);
        let est = conductance_connected(&p).unwrap();
        assert_eq!(est.witness.unwrap().set, (0..15).collect::<Vec<_>>());
        assert!((est.value - 2.0 * 0.25 / (15.0 * 15.0 / 30.0)).abs() < 1e-14);
    }

    #[test]
    fn arc_bound_uses_longest_gap() {
        let g = cycle(20, &[(0, 10), (2, 15)]);
        let p = build_homogeneous(&g, &ChainParams::new(0.2, 0.1, 0.0, 1).unwrap()).unwrap();
        let est = conductance_arc_upper(&p, &g).unwrap();
        assert_eq!(est.kind, PhiKind::ArcUpperBound);
        assert_eq!(est.witness.as_ref().unwrap().set, (3..10).collect::<Vec<_>>());
        let exact = conductance_exact(&p).unwrap();
        assert!(est.value >= exact.value);
        assert_eq!(conductance_arc_upper(&sym_walk(20), &cycle(20, &[])), Err(ConductanceError::NoEmptyArc));
    }
}
