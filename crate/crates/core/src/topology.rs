//! Cycle-plus-chords graphs: the three random models, empty-arc analysis,
//! the reductions used to compare a chain with its contracted version, and
//! the wind-up quotient.
//!
//! Nodes are `0..n` arranged on a cycle; node `i` is adjacent to `i ± 1 mod n`.
//! Long-range edges ("chords") are stored separately as sorted unordered
//! pairs. Chords may coincide with cycle edges for the edge-subset and
//! Bernoulli models.
//!
//! Rounding: edge and endpoint counts use a ceiling and matching positions use
//! a floor; both absorb floating-point noise so that, for example, `100^0.5`
//! counts as exactly 10.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use thiserror::Error;

use crate::numeric::{as_integer, ceil_snap, floor_snap};
use crate::rng::graph_rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate model: {0}")]
    DegenerateModel(String),
    /// The edge set is empty, so the whole cycle is a single empty arc.
    #[error("graph has no long-range endpoints; the whole cycle is one empty arc")]
    NoEndpoints { whole: Arc },
    #[error("operation requires model {expected}, graph is {found}")]
    WrongModel { expected: &'static str, found: Model },
    #[error("graph has no long-range edges")]
    EmptyEdgeSet,
    #[error("long-range endpoints are not exactly equidistant")]
    NotEquidistant,
    #[error("wind-up spacing does not divide the cycle: {0}")]
    NotDivisible(String),
    #[error("malformed graph text at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

type Result<T> = std::result::Result<T, TopologyError>;

/// Which random model produced a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    /// Random perfect matching on `2⌈n^{2−α}⌉` almost equidistant nodes.
    M1,
    /// Uniform subset of `⌈n^{2−α}⌉` pairs.
    M2,
    /// Every pair independently with probability `2n^{−α}`.
    M3,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::M1 => "M1",
            Model::M2 => "M2",
            Model::M3 => "M3",
        })
    }
}

impl FromStr for Model {
    type Err = TopologyError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "M1" => Ok(Model::M1),
            "M2" => Ok(Model::M2),
            "M3" => Ok(Model::M3),
            other => Err(TopologyError::InvalidParameter(format!("unknown model {other:?}"))),
        }
    }
}

/// A cycle of `n` nodes plus a set of long-range chords.
#[derive(Debug, Clone, PartialEq)]
pub struct LongRangeGraph {
    n: usize,
    alpha: f64,
    model: Model,
    seed: u64,
    edges: Vec<(usize, usize)>,
}

impl LongRangeGraph {
    /// Builds a graph from explicit chords. Pairs are normalised to `(min, max)`
    /// and sorted; self-loops, out-of-range nodes and duplicates are rejected,
    /// as is a node with two chords when the model is [`Model::M1`].
    pub fn new(
        n: usize,
        alpha: f64,
        model: Model,
        seed: u64,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if n < 2 {
            return Err(TopologyError::InvalidParameter(format!("n = {n} must be at least 2")));
        }
        check_alpha(alpha)?;
        let mut edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        for &(u, v) in &edges {
            if u == v {
                return Err(TopologyError::InvalidParameter(format!("self-loop at node {u}")));
            }
            if v >= n {
                return Err(TopologyError::InvalidParameter(format!("edge ({u}, {v}) outside 0..{n}")));
            }
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(TopologyError::InvalidParameter(format!("duplicate edge {:?}", w[0])));
        }
        let g = LongRangeGraph { n, alpha, model, seed, edges };
        if model == Model::M1 && g.max_long_range_degree() > 1 {
            return Err(TopologyError::InvalidParameter(
                "M1 chords must form a matching".into(),
            ));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Chords as sorted `(u, v)` pairs with `u < v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Number of chords at every node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Largest number of chords at a single node; 0 without chords.
    pub fn max_long_range_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Sorted nodes with at least one chord.
    pub fn endpoints(&self) -> Vec<usize> {
        let mut e: Vec<usize> = self.edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    /// Chord neighbours of every node.
    pub fn chord_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Serialises to the line format: header `n alpha model seed`, then one
    /// `u v` line per chord in lexicographic order.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {} {}\n", self.n, self.alpha, self.model, self.seed);
        for &(u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(self.to_text().as_bytes())
    }

    /// Parses the format written by [`LongRangeGraph::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or(TopologyError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let parse_err = |line: usize, msg: String| TopologyError::Parse { line: line + 1, msg };
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_err(hl, format!("expected `n alpha model seed`, got {header:?}")));
        }
        let n = fields[0].parse().map_err(|e| parse_err(hl, format!("n: {e}")))?;
        let alpha = fields[1].parse().map_err(|e| parse_err(hl, format!("alpha: {e}")))?;
        let model = fields[2].parse().map_err(|e| parse_err(hl, format!("{e}")))?;
        let seed = fields[3].parse().map_err(|e| parse_err(hl, format!("seed: {e}")))?;
        let mut edges = Vec::new();
        for (ln, line) in lines {
            let mut it = line.split_whitespace();
            let (Some(u), Some(v), None) = (it.next(), it.next(), it.next()) else {
                return Err(parse_err(ln, format!("expected `u v`, got {line:?}")));
            };
            let u = u.parse().map_err(|e| parse_err(ln, format!("{e}")))?;
            let v = v.parse().map_err(|e| parse_err(ln, format!("{e}")))?;
            edges.push((u, v));
        }
        LongRangeGraph::new(n, alpha, model, seed, edges)
    }

    pub fn read_from(mut r: impl BufRead) -> std::io::Result<Result<Self>> {
        let mut s = String::new();
        r.read_to_string(&mut s)?;
        Ok(Self::from_text(&s))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 1.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(TopologyError::InvalidParameter(format!("alpha = {alpha} must lie in (1, 2)")))
    }
}

fn check_model_params(n: usize, alpha: f64) -> Result<()> {
    if n < 4 {
        return Err(TopologyError::InvalidParameter(format!("n = {n} must be at least 4")));
    }
    check_alpha(alpha)
}

/// `⌈n^{2−α}⌉`, the nominal number of chords.
pub fn nominal_edge_count(n: usize, alpha: f64) -> usize {
    ceil_snap((n as f64).powf(2.0 - alpha)) as usize
}

/// Builds a model by tag.
pub fn generate(model: Model, n: usize, alpha: f64, seed: u64) -> Result<LongRangeGraph> {
    match model {
        Model::M1 => generate_m1(n, alpha, seed),
        Model::M2 => generate_m2(n, alpha, seed),
        Model::M3 => generate_m3(n, alpha, seed),
    }
}

/// Positions `⌊i·n^{α−1}/2⌋ mod n` for `i < 2⌈n^{2−α}⌉`, deduplicated.
pub fn m1_positions(n: usize, alpha: f64) -> Vec<usize> {
    let count = 2 * nominal_edge_count(n, alpha);
    let spacing = (n as f64).powf(alpha - 1.0) / 2.0;
    let mut pts: Vec<usize> = (0..count)
        .map(|i| floor_snap(i as f64 * spacing) as usize % n)
        .collect();
    pts.sort_unstable();
    pts.dedup();
    pts
}

/// M1: uniformly random perfect matching on the almost equidistant nodes.
///
/// If position collisions leave an odd number of endpoints, the largest one
/// is dropped with a warning when `n ≥ 4·n^{2−α}`, and the call fails with
/// [`TopologyError::DegenerateModel`] otherwise.
pub fn generate_m1(n: usize, alpha: f64, seed: u64) -> Result<LongRangeGraph> {
    check_model_params(n, alpha)?;
    let count = nominal_edge_count(n, alpha);
    if 2 * count > n {
        return Err(TopologyError::InvalidParameter(format!(
            "2⌈n^(2-alpha)⌉ = {} exceeds n = {n}",
            2 * count
        )));
    }
    let mut pts = m1_positions(n, alpha);
    if pts.len() % 2 == 1 {
        let nf = n as f64;
        if nf >= 4.0 * nf.powf(2.0 - alpha) {
            log::warn!(
                "M1 positions collide at n = {n}, alpha = {alpha}: dropping endpoint {}",
                pts[pts.len() - 1]
            );
            pts.pop();
        } else {
            return Err(TopologyError::DegenerateModel(format!(
                "odd endpoint count {} after deduplication at n = {n}",
                pts.len()
            )));
        }
    }
    let mut rng = graph_rng(seed);
    pts.shuffle(&mut rng);
    let edges = pts.chunks_exact(2).map(|c| (c[0], c[1]));
    LongRangeGraph::new(n, alpha, Model::M1, seed, edges)
}

/// Number of unordered pairs of `n` nodes.
fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Maps a lexicographic pair index to `(u, v)` with `u < v`.
fn decode_pair(n: usize, k: usize) -> (usize, usize) {
    // Row u starts at u(2n − u − 1)/2.
    let row_start = |u: usize| u * (2 * n - u - 1) / 2;
    let nf = n as f64;
    let disc = (2.0 * nf - 1.0).powi(2) - 8.0 * k as f64;
    let mut u = ((2.0 * nf - 1.0 - disc.max(0.0).sqrt()) / 2.0).floor().max(0.0) as usize;
    u = u.min(n - 2);
    while u > 0 && row_start(u) > k {
        u -= 1;
    }
    while u + 1 < n - 1 && row_start(u + 1) <= k {
        u += 1;
    }
    (u, u + 1 + (k - row_start(u)))
}

/// Uniformly random `count`-subset of all pairs, sorted.
pub(crate) fn sample_pairs(n: usize, count: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = index::sample(rng, pair_count(n), count)
        .into_iter()
        .map(|k| decode_pair(n, k))
        .collect();
    edges.sort_unstable();
    edges
}

/// M2: uniformly random subset of exactly `⌈n^{2−α}⌉` pairs (cycle pairs allowed).
pub fn generate_m2(n: usize, alpha: f64, seed: u64) -> Result<LongRangeGraph> {
    check_model_params(n, alpha)?;
    let count = nominal_edge_count(n, alpha);
    if count > pair_count(n) {
        return Err(TopologyError::InvalidParameter(format!(
            "{count} edges exceed the {} available pairs",
            pair_count(n)
        )));
    }
    let mut rng = graph_rng(seed);
    LongRangeGraph::new(n, alpha, Model::M2, seed, sample_pairs(n, count, &mut rng))
}

/// Edge probability `2n^{−α}` of the Bernoulli model.
pub fn m3_probability(n: usize, alpha: f64) -> f64 {
    2.0 * (n as f64).powf(-alpha)
}

/// M3: every pair independently with probability `2n^{−α}`.
///
/// Pairs are visited in lexicographic order with geometric skips between
/// successes, which has exactly the Bernoulli law but costs O(edges).
pub fn generate_m3(n: usize, alpha: f64, seed: u64) -> Result<LongRangeGraph> {
    check_model_params(n, alpha)?;
    let p = m3_probability(n, alpha);
    let total = pair_count(n) as u64;
    let log_q = (-p).ln_1p();
    let mut rng = graph_rng(seed);
    let mut edges = Vec::new();
    let mut k: u64 = 0;
    loop {
        let u: f64 = rng.random();
        let skip = ((1.0 - u).ln() / log_q).floor();
        if skip >= (total - k) as f64 {
            break;
        }
        k += skip as u64;
        edges.push(decode_pair(n, k as usize));
        k += 1;
        if k >= total {
            break;
        }
    }
    LongRangeGraph::new(n, alpha, Model::M3, seed, edges)
}

/// Integer degree cap `⌈2/(α−1)⌉`.
pub fn degree_cap(alpha: f64) -> Result<usize> {
    check_alpha(alpha)?;
    Ok(ceil_snap(2.0 / (alpha - 1.0)) as usize)
}

/// A run of consecutive cycle nodes `start, start+1, …, start+len−1 (mod n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arc {
    pub start: usize,
    pub len: usize,
}

impl Arc {
    pub fn nodes(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        let start = self.start;
        (0..self.len).map(move |j| (start + j) % n)
    }

    pub fn contains(&self, n: usize, node: usize) -> bool {
        (node + n - self.start) % n < self.len
    }

    /// Whether `other` lies inside `self` (both on a cycle of `n` nodes).
    pub fn covers(&self, n: usize, other: &Arc) -> bool {
        if self.len >= n {
            return true;
        }
        (other.start + n - self.start) % n + other.len <= self.len
    }

    /// Sorted node list.
    pub fn sorted_nodes(&self, n: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.nodes(n).collect();
        v.sort_unstable();
        v
    }
}

/// What an "empty" arc may contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArcRule {
    /// No node of the arc has a chord.
    #[default]
    NoIncidentEdge,
    /// Chords may join two nodes of the arc, but none leaves it.
    NoLeavingEdge,
}

/// Maximal empty arcs, longest first (ties by start node).
///
/// Without chords the whole cycle is one arc; that case is reported as
/// [`TopologyError::NoEndpoints`] carrying the arc.
pub fn empty_arcs(g: &LongRangeGraph, rule: ArcRule) -> Result<Vec<Arc>> {
    let n = g.n();
    let ends = g.endpoints();
    if ends.is_empty() {
        return Err(TopologyError::NoEndpoints { whole: Arc { start: 0, len: n } });
    }
    let mut arcs = match rule {
        ArcRule::NoIncidentEdge => gaps_between(n, &ends),
        ArcRule::NoLeavingEdge => closed_arcs(g, &ends),
    };
    arcs.sort_by(|a, b| b.len.cmp(&a.len).then(a.start.cmp(&b.start)));
    Ok(arcs)
}

fn gaps_between(n: usize, ends: &[usize]) -> Vec<Arc> {
    let k = ends.len();
    (0..k)
        .filter_map(|i| {
            let a = ends[i];
            let b = ends[(i + 1) % k];
            let len = (b + n - a - 1) % n;
            let len = if k == 1 { n - 1 } else { len };
            (len > 0).then_some(Arc { start: (a + 1) % n, len })
        })
        .collect()
}

/// Arcs whose chords all stay inside. Candidate arcs are the regions strictly
/// between endpoint `e[p−1]` and `e[q+1]` for every cyclic block of endpoints
/// `e[p..=q]` that is closed under chord adjacency; only maximal ones are kept.
fn closed_arcs(g: &LongRangeGraph, ends: &[usize]) -> Vec<Arc> {
    let n = g.n();
    let k = ends.len();
    let adj = g.chord_adjacency();
    let mut pos = vec![usize::MAX; n];
    for (i, &e) in ends.iter().enumerate() {
        pos[e] = i;
    }
    let mut candidates = gaps_between(n, ends);
    let mut inside = vec![false; k];
    for p in 0..k {
        inside.iter_mut().for_each(|b| *b = false);
        let mut dangling: isize = 0;
        for c in 1..k {
            let idx = (p + c - 1) % k;
            inside[idx] = true;
            for &w in &adj[ends[idx]] {
                if inside[pos[w]] {
                    dangling -= 1;
                } else {
                    dangling += 1;
                }
            }
            if dangling == 0 {
                let before = ends[(p + k - 1) % k];
                let after = ends[(p + c) % k];
                let len = if before == after { n - 1 } else { (after + n - before - 1) % n };
                candidates.push(Arc { start: (before + 1) % n, len });
            }
        }
    }
    candidates.sort_by(|a, b| b.len.cmp(&a.len).then(a.start.cmp(&b.start)));
    candidates.dedup();
    let mut maximal: Vec<Arc> = Vec::new();
    for a in candidates {
        if !maximal.iter().any(|m| m.covers(n, &a)) {
            maximal.push(a);
        }
    }
    maximal
}

/// A cycle on `m` reduced nodes with a perfect matching of chords.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedGraph {
    pub m: usize,
    /// Matching edges `(a, b)`, `a < b`, sorted.
    pub matching: Vec<(usize, usize)>,
    /// Original node of every reduced node.
    pub origin: Vec<usize>,
}

impl ReducedGraph {
    /// The reduced cycle with its matching as a graph of its own.
    pub fn as_graph(&self, alpha: f64, seed: u64) -> Result<LongRangeGraph> {
        LongRangeGraph::new(self.m, alpha, Model::M1, seed, self.matching.iter().copied())
    }

    /// Whether every reduced node is matched exactly once.
    pub fn is_perfect_matching(&self) -> bool {
        let mut seen = vec![0usize; self.m];
        for &(a, b) in &self.matching {
            seen[a] += 1;
            seen[b] += 1;
        }
        seen.iter().all(|&c| c == 1)
    }
}

/// Contracts every empty arc of an M1 graph to a single cycle edge.
pub fn reduce_m1(g: &LongRangeGraph) -> Result<ReducedGraph> {
    if g.model() != Model::M1 {
        return Err(TopologyError::WrongModel { expected: "M1", found: g.model() });
    }
    if g.edges().is_empty() {
        return Err(TopologyError::EmptyEdgeSet);
    }
    let origin = g.endpoints();
    let mut index = vec![usize::MAX; g.n()];
    for (i, &u) in origin.iter().enumerate() {
        index[u] = i;
    }
    let mut matching: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(u, v)| (index[u].min(index[v]), index[u].max(index[v])))
        .collect();
    matching.sort_unstable();
    Ok(ReducedGraph { m: origin.len(), matching, origin })
}

/// Contraction for M2/M3 graphs: an endpoint with `k` chords becomes `k`
/// consecutive reduced nodes and its chords are dealt to the copies in a
/// uniformly random order, so the reduced chords form a perfect matching.
pub fn reduce_with_splitting(g: &LongRangeGraph, seed: u64) -> Result<ReducedGraph> {
    if g.model() == Model::M1 {
        return Err(TopologyError::WrongModel { expected: "M2 or M3", found: g.model() });
    }
    if g.edges().is_empty() {
        return Err(TopologyError::EmptyEdgeSet);
    }
    let n = g.n();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        incident[u].push(e);
        incident[v].push(e);
    }
    let mut rng = graph_rng(seed);
    let mut origin = Vec::with_capacity(2 * g.edges().len());
    let mut slot: Vec<[usize; 2]> = vec![[usize::MAX; 2]; g.edges().len()];
    for u in 0..n {
        incident[u].shuffle(&mut rng);
        for &e in &incident[u] {
            let side = usize::from(g.edges()[e].0 != u);
            slot[e][side] = origin.len();
            origin.push(u);
        }
    }
    let mut matching: Vec<(usize, usize)> = slot
        .iter()
        .map(|&[a, b]| (a.min(b), a.max(b)))
        .collect();
    matching.sort_unstable();
    Ok(ReducedGraph { m: origin.len(), matching, origin })
}

/// Quotient of an exactly equidistant M1 graph by `i ↦ i mod s` with
/// `s = n^{α−1}/2`; every chord becomes a loop.
#[derive(Debug, Clone, PartialEq)]
pub struct WoundGraph {
    pub cycle_len: usize,
    /// Quotient node of every original node.
    pub projection: Vec<usize>,
    /// Number of chords turned into loops at every quotient node.
    pub loops: Vec<usize>,
}

impl WoundGraph {
    /// Pushes a distribution on the original nodes forward to the quotient.
    pub fn project(&self, weights: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cycle_len];
        for (i, &w) in weights.iter().enumerate() {
            out[self.projection[i]] += w;
        }
        out
    }

    /// Number of original nodes over every quotient node.
    pub fn preimage_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.cycle_len];
        for &x in &self.projection {
            c[x] += 1;
        }
        c
    }
}

/// Winds an M1 graph around a cycle of `n^{α−1}/2` nodes.
///
/// Requires the spacing to be an integer dividing `n` and the endpoints to be
/// exactly one residue class mod the spacing. All endpoints then share a
/// residue, so every matching is compatible with the quotient.
pub fn wind_up(g: &LongRangeGraph) -> Result<WoundGraph> {
    if g.model() != Model::M1 {
        return Err(TopologyError::WrongModel { expected: "M1", found: g.model() });
    }
    if g.edges().is_empty() {
        return Err(TopologyError::NotEquidistant);
    }
    let n = g.n();
    let spacing = (n as f64).powf(g.alpha() - 1.0) / 2.0;
    let s = as_integer(spacing)
        .map(|s| s as usize)
        .filter(|&s| s > 0 && n % s == 0)
        .ok_or_else(|| TopologyError::NotDivisible(format!("spacing {spacing} vs n = {n}")))?;
    let ends = g.endpoints();
    let offset = ends[0] % s;
    let expected: Vec<usize> = (0..n / s).map(|i| offset + i * s).collect();
    if ends != expected {
        return Err(TopologyError::NotEquidistant);
    }
    let mut loops = vec![0; s];
    loops[offset] = g.edges().len();
    Ok(WoundGraph {
        cycle_len: s,
        projection: (0..n).map(|i| i % s).collect(),
        loops,
    })
}
