//! Exact total-variation mixing times.
//!
//! `t_mix(P, ε) = max_σ min{k : ‖σPᵏ − π‖_TV ≤ ε}`. The distance to `π` is
//! convex in `σ`, so the maximum over all starting distributions is attained
//! at a point mass and it suffices to follow the `n` point-mass starts.
//!
//! Following every start costs `n · t_mix` sparse steps. On a cycle with few
//! chords most starts can be settled without that:
//!
//! 1. Nodes whose only moves are to their two cycle neighbours split the cycle
//!    into segments between *anchor* nodes (all other nodes).
//! 2. A walk started inside a segment must pass through one of the segment's
//!    two anchors before leaving it. Writing `F_a(s)` for the probability to
//!    first hit anchor `a` at step `s` and `D_a(k)` for the anchor's distance
//!    profile, the strong Markov property and convexity give
//!
//!    `d_i(k) ≤ Σ_{s≤k} F_a(s) D_a(k−s) + F_b(s) D_b(k−s) + P(no hit by k)`.
//!
//! 3. Anchors are followed exactly. Every interior node whose bound already
//!    lies below `ε` one step before the current maximum cannot be the worst
//!    start; the remaining nodes are followed exactly.
//!
//! The result is identical to following every start. Distances are evolved
//! eight starts at a time in one pass over the chain.

use std::fmt::Write as _;

use log::debug;
use thiserror::Error;

use crate::chain::{self, TransitionMatrix};
use crate::exec::{self, Parallelism};

/// Default step ceiling.
pub const DEFAULT_CEILING: usize = 10_000_000;
/// Largest tolerated `|Σ weights − 1|` during iteration.
pub const MASS_TOL: f64 = 1e-10;
/// Below this size every start is followed.
const PRUNE_MIN_N: usize = 64;
/// Tail mass at which the hitting-time recursion stops; the rest is bounded by 1.
const TAIL_CUTOFF: f64 = 1e-14;
/// Safety margin added to the rounding-sensitive upper bounds.
const BOUND_MARGIN: f64 = 1e-12;
const LANES: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MixingError {
    #[error("distributions have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error("start {start} outside a chain on {n} states")]
    StartOutOfRange { start: usize, n: usize },
    #[error("transition matrix is not doubly stochastic")]
    NotDoublyStochastic,
    #[error("start {start} did not reach the threshold within {ceiling} steps")]
    NotConverged { start: usize, ceiling: usize },
    #[error("mass drifted by {drift:e} after {step} steps")]
    MassDrift { drift: f64, step: usize },
    #[error("conductance must be positive, got {0}")]
    NonPositivePhi(f64),
    #[error("need at least two states, got {0}")]
    TooFewStates(usize),
}

type Result<T> = std::result::Result<T, MixingError>;

/// A probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    weights: Vec<f64>,
}

impl Distribution {
    /// Checks nonnegativity and that the mass is 1 within [`MASS_TOL`].
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(MixingError::InvalidDistribution("empty".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(MixingError::InvalidDistribution(format!("weight {w}")));
        }
        let mass: f64 = weights.iter().sum();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(MixingError::InvalidDistribution(format!("mass {mass}")));
        }
        Ok(Distribution { weights })
    }

    pub fn point(n: usize, at: usize) -> Result<Self> {
        if at >= n {
            return Err(MixingError::StartOutOfRange { start: at, n });
        }
        let mut weights = vec![0.0; n];
        weights[at] = 1.0;
        Ok(Distribution { weights })
    }

    pub fn uniform(n: usize) -> Self {
        Distribution { weights: vec![1.0 / n as f64; n] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// `½ Σ |μ_i − ν_i|`.
pub fn tv_distance(mu: &Distribution, nu: &Distribution) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(MixingError::LengthMismatch(mu.len(), nu.len()));
    }
    Ok(0.5 * mu.weights.iter().zip(&nu.weights).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// `σ Pˢᵗᵉᵖˢ`.
pub fn evolve(sigma: &Distribution, p: &TransitionMatrix, steps: usize) -> Result<Distribution> {
    if sigma.len() != p.n() {
        return Err(MixingError::LengthMismatch(sigma.len(), p.n()));
    }
    let incoming = p.incoming();
    let mut x = sigma.weights.clone();
    let mut y = vec![0.0; x.len()];
    for _ in 0..steps {
        for (j, out) in y.iter_mut().enumerate() {
            *out = p.hold(j) * x[j] + incoming[j].iter().map(|&(i, q)| q * x[i]).sum::<f64>();
        }
        std::mem::swap(&mut x, &mut y);
    }
    Ok(Distribution { weights: x })
}

/// `d_start(k) = ‖δ_start Pᵏ − π‖_TV` for `k = 0..=k_max`.
pub fn distance_profile(p: &TransitionMatrix, start: usize, k_max: usize) -> Result<Vec<f64>> {
    check_chain(p)?;
    if start >= p.n() {
        return Err(MixingError::StartOutOfRange { start, n: p.n() });
    }
    let kernel = RingKernel::new(p);
    let mut runs = kernel.run(&[start], |_, k, _| k >= k_max, k_max)?;
    Ok(runs.pop().expect("one lane").profile)
}

/// How [`mixing_time_with`] chooses the starts it follows exactly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Prune starts by anchor bounds where the chain allows it.
    #[default]
    Auto,
    /// Follow every start.
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingOptions {
    pub ceiling: usize,
    pub parallelism: Parallelism,
    pub strategy: Strategy,
}

impl Default for MixingOptions {
    fn default() -> Self {
        MixingOptions { ceiling: DEFAULT_CEILING, parallelism: Parallelism::Auto, strategy: Strategy::Auto }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixingResult {
    pub t_mix: usize,
    pub epsilon: f64,
    /// Smallest start whose distance reaches `ε` last.
    pub worst_start: usize,
    /// `d_worst(k)` for `k = 0..=t_mix`.
    pub profile: Vec<f64>,
}

impl MixingResult {
    pub const CSV_HEADER: &'static str = "t_mix,epsilon,worst_start,d_final";

    pub fn csv_row(&self) -> String {
        let last = self.profile.last().copied().unwrap_or(f64::NAN);
        format!("{},{},{},{}", self.t_mix, self.epsilon, self.worst_start, last)
    }
}

/// Mixing time with default options.
pub fn mixing_time(p: &TransitionMatrix, epsilon: f64) -> Result<MixingResult> {
    mixing_time_with(p, epsilon, &MixingOptions::default())
}

pub fn mixing_time_with(p: &TransitionMatrix, epsilon: f64, opts: &MixingOptions) -> Result<MixingResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(MixingError::InvalidEpsilon(epsilon));
    }
    check_chain(p)?;
    let kernel = RingKernel::new(p);
    let n = p.n();
    let mut worst = Worst::default();
    if is_circulant(p) {
        debug!("circulant chain: one start");
        kernel.follow(&[0], epsilon, opts, &mut worst)?;
    } else {
        match (opts.strategy, Segments::find(p)) {
            (Strategy::Auto, Some(seg)) if n >= PRUNE_MIN_N && seg.anchors.len() * 4 < n => {
                pruned(p, &kernel, &seg, epsilon, opts, &mut worst)?;
            }
            _ => {
                let starts: Vec<usize> = (0..n).collect();
                kernel.follow(&starts, epsilon, opts, &mut worst)?;
            }
        }
    }
    let Worst { t_mix, start, profile } = worst;
    Ok(MixingResult { t_mix, epsilon, worst_start: start, profile })
}

/// Latest first hit seen so far, ties going to the smaller start.
#[derive(Debug, Default)]
struct Worst {
    t_mix: usize,
    start: usize,
    profile: Vec<f64>,
}

impl Worst {
    /// `profile` ends at the start's first hit.
    fn offer(&mut self, start: usize, profile: &[f64]) {
        let t = profile.len() - 1;
        if self.profile.is_empty() || t > self.t_mix || (t == self.t_mix && start < self.start) {
            *self = Worst { t_mix: t, start, profile: profile.to_vec() };
        }
    }
}

fn check_chain(p: &TransitionMatrix) -> Result<()> {
    if p.n() < 2 {
        return Err(MixingError::TooFewStates(p.n()));
    }
    if !chain::is_doubly_stochastic(p, chain::STOCHASTIC_TOL) {
        return Err(MixingError::NotDoublyStochastic);
    }
    Ok(())
}

/// True iff `p_{i, i+k} = p_{0, k}` for all `i, k`.
fn is_circulant(p: &TransitionMatrix) -> bool {
    let n = p.n();
    let base: Vec<(usize, f64)> = p.row(0).collect();
    (1..n).all(|i| {
        p.hold(i) == p.hold(0) && {
            let mut row: Vec<(usize, f64)> = p.row(i).map(|(j, q)| ((j + n - i) % n, q)).collect();
            row.sort_by_key(|e| e.0);
            row == base
        }
    })
}

/// Anchors and the segments of cycle-local nodes between them.
#[derive(Debug)]
struct Segments {
    anchors: Vec<usize>,
    /// `(a, b, interior)` for consecutive anchors `a`, `b` with `interior`
    /// the nodes strictly between them, clockwise.
    spans: Vec<(usize, usize, Vec<usize>)>,
}

impl Segments {
    fn find(p: &TransitionMatrix) -> Option<Segments> {
        let n = p.n();
        if n < 3 {
            return None;
        }
        let local = |i: usize| p.row(i).all(|(j, _)| j == (i + 1) % n || j == (i + n - 1) % n);
        let mut anchors: Vec<usize> = (0..n).filter(|&i| !local(i)).collect();
        if anchors.is_empty() {
            anchors.push(0);
        }
        let k = anchors.len();
        let spans = (0..k)
            .filter_map(|idx| {
                let a = anchors[idx];
                let b = anchors[(idx + 1) % k];
                let len = if k == 1 { n - 1 } else { (b + n - a - 1) % n };
                (len > 0).then(|| (a, b, (1..=len).map(|j| (a + j) % n).collect()))
            })
            .collect();
        Some(Segments { anchors, spans })
    }
}

fn pruned(
    p: &TransitionMatrix,
    kernel: &RingKernel,
    seg: &Segments,
    epsilon: f64,
    opts: &MixingOptions,
    worst: &mut Worst,
) -> Result<()> {
    let (_, _, longest) = seg
        .spans
        .iter()
        .max_by(|x, y| x.2.len().cmp(&y.2.len()).then(y.0.cmp(&x.0)))
        .expect("segments exist when pruning");
    let probe = longest[longest.len() / 2];
    let k0 = kernel.follow(&[probe], epsilon, opts, worst)?[0];

    // Anchors run past their own hitting time until k0, or until a quarter of
    // ε, so their profiles are tight where the bounds need them.
    let theta = epsilon / 4.0;
    let anchor_runs = kernel.run_batched(&seg.anchors, opts, move |_, k, d| d <= epsilon && (k >= k0 || d <= theta))?;
    let mut profiles = vec![Vec::new(); p.n()];
    for (&a, run) in seg.anchors.iter().zip(anchor_runs) {
        let t = run.profile.iter().position(|&d| d <= epsilon).expect("anchor runs end below ε");
        worst.offer(a, &run.profile[..=t]);
        profiles[a] = run.profile;
    }
    let k1 = worst.t_mix;

    // A start whose bound at k1 − 1 is below ε hits strictly before k1 and
    // can neither raise the maximum nor tie with it.
    let mut pending = Vec::new();
    if k1 >= 1 {
        let target = k1 - 1;
        let bounds = exec::map(opts.parallelism, seg.spans.iter().collect(), |(a, b, interior)| {
            segment_bounds(p, *a, *b, interior, &profiles[*a], &profiles[*b], target)
        });
        for ((_, _, interior), ub) in seg.spans.iter().zip(bounds) {
            let open = interior.iter().zip(ub).filter(|&(&i, u)| i != probe && u + BOUND_MARGIN > epsilon);
            pending.extend(open.map(|(&i, _)| i));
        }
    } else {
        pending.extend(seg.spans.iter().flat_map(|s| s.2.iter().copied()).filter(|&i| i != probe));
    }
    debug!(
        "n = {}: {} anchors, probe {probe} at {k0}, anchors max {k1}, {} starts left",
        p.n(),
        seg.anchors.len(),
        pending.len()
    );
    kernel.follow(&pending, epsilon, opts, worst)?;
    Ok(())
}

/// Upper bounds on `d_i(target)` for the interior nodes of one segment.
fn segment_bounds(
    p: &TransitionMatrix,
    a: usize,
    b: usize,
    interior: &[usize],
    prof_a: &[f64],
    prof_b: &[f64],
    target: usize,
) -> Vec<f64> {
    let len = interior.len();
    // tridiagonal restriction of P to the segment
    let stay: Vec<f64> = interior.iter().map(|&i| p.hold(i)).collect();
    let fwd: Vec<f64> = (0..len).map(|k| if k + 1 < len { p.get(interior[k], interior[k + 1]) } else { 0.0 }).collect();
    let back: Vec<f64> = (0..len).map(|k| if k > 0 { p.get(interior[k], interior[k - 1]) } else { 0.0 }).collect();
    let apply = |v: &[f64], out: &mut [f64]| {
        for k in 0..len {
            let mut s = stay[k] * v[k];
            if k + 1 < len {
                s += fwd[k] * v[k + 1];
            }
            if k > 0 {
                s += back[k] * v[k - 1];
            }
            out[k] = s;
        }
    };
    let mut fa: Vec<f64> = interior.iter().map(|&i| p.get(i, a)).collect();
    let mut fb: Vec<f64> = if a == b { vec![0.0; len] } else { interior.iter().map(|&i| p.get(i, b)).collect() };
    let mut tail = vec![1.0; len];
    let mut scratch = vec![0.0; len];
    let at = |prof: &[f64], k: usize| prof.get(k).or(prof.last()).copied().unwrap_or(1.0);
    let mut ub = vec![0.0; len];
    for s in 1..=target {
        let (da, db) = (at(prof_a, target - s), at(prof_b, target - s));
        for k in 0..len {
            ub[k] += fa[k] * da + fb[k] * db;
        }
        apply(&tail, &mut scratch);
        std::mem::swap(&mut tail, &mut scratch);
        if tail.iter().all(|&w| w < TAIL_CUTOFF) {
            break;
        }
        apply(&fa, &mut scratch);
        std::mem::swap(&mut fa, &mut scratch);
        apply(&fb, &mut scratch);
        std::mem::swap(&mut fb, &mut scratch);
    }
    for k in 0..len {
        ub[k] += tail[k];
    }
    ub
}

type Block = [f64; LANES];

/// `Pᵀ` split into the two cycle neighbours of every node plus a short list
/// of other incoming entries.
struct RingKernel {
    n: usize,
    /// `[p_jj, p_{j−1,j}, p_{j+1,j}]`
    coef: Vec<[f64; 3]>,
    extra_ptr: Vec<usize>,
    extra: Vec<(usize, f64)>,
}

/// One followed start.
struct Run {
    profile: Vec<f64>,
}

impl RingKernel {
    fn new(p: &TransitionMatrix) -> Self {
        let n = p.n();
        let ring = n >= 3;
        let mut from_prev = vec![0.0; n];
        let mut from_next = vec![0.0; n];
        let mut extra_ptr = vec![0];
        let mut extra = Vec::new();
        for (j, inc) in p.incoming().into_iter().enumerate() {
            for (i, q) in inc {
                if ring && i == (j + n - 1) % n {
                    from_prev[j] = q;
                } else if ring && i == (j + 1) % n {
                    from_next[j] = q;
                } else {
                    extra.push((i, q));
                }
            }
            extra_ptr.push(extra.len());
        }
        let coef = (0..n).map(|j| [p.hold(j), from_prev[j], from_next[j]]).collect();
        RingKernel { n, coef, extra_ptr, extra }
    }

    /// One step `y = x P` on all lanes; returns per-lane TV distance and mass.
    /// Interior nodes are visited in pairs with one accumulator each, so the
    /// sums do not form a single dependency chain.
    fn step(&self, x: &[Block], y: &mut [Block]) -> (Block, Block) {
        let n = self.n;
        let u = 1.0 / n as f64;
        let mut tv = [[0.0; LANES]; 2];
        let mut mass = [[0.0; LANES]; 2];
        let mut add = |slot: usize, v: &Block| {
            for l in 0..LANES {
                mass[slot][l] += v[l];
                tv[slot][l] += (v[l] - u).abs();
            }
        };
        let pairs = if n >= 3 { (n - 2) / 2 } else { 0 };
        if pairs > 0 {
            let ys = &mut y[1..1 + 2 * pairs];
            let coef = &self.coef[1..1 + 2 * pairs];
            let windows = x.windows(4).step_by(2);
            for (m, ((yc, cc), w)) in ys.chunks_exact_mut(2).zip(coef.chunks_exact(2)).zip(windows).enumerate() {
                for s in 0..2 {
                    let [d, cp, cn] = cc[s];
                    let mut v = [0.0; LANES];
                    for l in 0..LANES {
                        v[l] = d * w[s + 1][l] + cp * w[s][l] + cn * w[s + 2][l];
                    }
                    let j = 1 + 2 * m + s;
                    if self.extra_ptr[j] < self.extra_ptr[j + 1] {
                        self.add_extra(x, j, &mut v);
                    }
                    add(s, &v);
                    yc[s] = v;
                }
            }
        }
        let done = if n >= 3 { 1 + 2 * pairs } else { 0 };
        for j in (0..n).filter(|&j| j == 0 && n >= 3 || j >= done) {
            let v = self.node(x, j);
            add(0, &v);
            y[j] = v;
        }
        let fold = |acc: [Block; 2]| {
            let mut out = [0.0; LANES];
            for l in 0..LANES {
                out[l] = acc[0][l] + acc[1][l];
            }
            out
        };
        (fold(tv).map(|t| 0.5 * t), fold(mass))
    }

    fn add_extra(&self, x: &[Block], j: usize, v: &mut Block) {
        for &(i, q) in &self.extra[self.extra_ptr[j]..self.extra_ptr[j + 1]] {
            let xi = &x[i];
            for l in 0..LANES {
                v[l] += q * xi[l];
            }
        }
    }

    /// `(x P)_j` on all lanes, for any node.
    fn node(&self, x: &[Block], j: usize) -> Block {
        let n = self.n;
        let prev = if j == 0 { n - 1 } else { j - 1 };
        let next = if j + 1 == n { 0 } else { j + 1 };
        let [d, cp, cn] = self.coef[j];
        let mut v = [0.0; LANES];
        for l in 0..LANES {
            v[l] = d * x[j][l] + cp * x[prev][l] + cn * x[next][l];
        }
        self.add_extra(x, j, &mut v);
        v
    }

    /// Follows up to eight starts until `done(lane, k, d)` holds for each,
    /// recording the distance profiles. Lanes never interact, so a start's
    /// profile does not depend on its batch.
    fn run(&self, starts: &[usize], done: impl Fn(usize, usize, f64) -> bool, ceiling: usize) -> Result<Vec<Run>> {
        assert!(!starts.is_empty() && starts.len() <= LANES);
        let n = self.n;
        let mut x = vec![[0.0; LANES]; n];
        for l in 0..LANES {
            // idle lanes shadow the last start so their mass stays at 1
            x[starts[l.min(starts.len() - 1)]][l] = 1.0;
        }
        let mut y = vec![[0.0; LANES]; n];
        let d0 = 1.0 - 1.0 / n as f64;
        let mut runs: Vec<Run> = starts.iter().map(|_| Run { profile: vec![d0] }).collect();
        let mut active: Vec<bool> = (0..starts.len()).map(|l| !done(l, 0, d0)).collect();
        let mut k = 0;
        while active.iter().any(|&a| a) {
            if k >= ceiling {
                let lane = active.iter().position(|&a| a).expect("some lane active");
                return Err(MixingError::NotConverged { start: starts[lane], ceiling });
            }
            let (tv, mass) = self.step(&x, &mut y);
            std::mem::swap(&mut x, &mut y);
            k += 1;
            for l in 0..starts.len() {
                let drift = (mass[l] - 1.0).abs();
                if drift > MASS_TOL {
                    return Err(MixingError::MassDrift { drift, step: k });
                }
                if active[l] {
                    runs[l].profile.push(tv[l]);
                    active[l] = !done(l, k, tv[l]);
                }
            }
        }
        Ok(runs)
    }

    /// [`RingKernel::run`] over any number of starts, eight at a time.
    fn run_batched(
        &self,
        starts: &[usize],
        opts: &MixingOptions,
        done: impl Fn(usize, usize, f64) -> bool + Sync,
    ) -> Result<Vec<Run>> {
        let batches: Vec<&[usize]> = starts.chunks(LANES).collect();
        let out = exec::map(opts.parallelism, batches, |b| self.run(b, &done, opts.ceiling));
        let mut runs = Vec::with_capacity(starts.len());
        for r in out {
            runs.extend(r?);
        }
        Ok(runs)
    }

    /// First `k` with `d_start(k) ≤ ε` for every start; profiles go to `worst`.
    fn follow(&self, starts: &[usize], epsilon: f64, opts: &MixingOptions, worst: &mut Worst) -> Result<Vec<usize>> {
        let runs = self.run_batched(starts, opts, move |_, _, d| d <= epsilon)?;
        Ok(starts
            .iter()
            .zip(runs)
            .map(|(&s, r)| {
                worst.offer(s, &r.profile);
                r.profile.len() - 1
            })
            .collect())
    }
}

/// `1/Φ`, the conductance lower-bound functional (constant omitted).
pub fn bound_lower_phi(phi: f64) -> Result<f64> {
    if !(phi > 0.0) {
        return Err(MixingError::NonPositivePhi(phi));
    }
    Ok(1.0 / phi)
}

/// `(1/Φ²) · ln n`, the conductance upper-bound functional (constant omitted).
pub fn bound_upper_cheeger(phi: f64, n: usize) -> Result<f64> {
    if !(phi > 0.0) {
        return Err(MixingError::NonPositivePhi(phi));
    }
    if n < 2 {
        return Err(MixingError::TooFewStates(n));
    }
    Ok((n as f64).ln() / (phi * phi))
}

/// Mixing results of a chain and of its reversibilization.
#[derive(Debug, Clone, PartialEq)]
pub struct GapResult {
    pub nonreversible: MixingResult,
    pub reversible: MixingResult,
    /// `t_mix(P′) / (t_mix(P)² · ln n)`.
    pub ratio: f64,
}

pub fn rev_vs_nonrev_gap(p: &TransitionMatrix, epsilon: f64) -> Result<GapResult> {
    rev_vs_nonrev_gap_with(p, epsilon, &MixingOptions::default())
}

pub fn rev_vs_nonrev_gap_with(p: &TransitionMatrix, epsilon: f64, opts: &MixingOptions) -> Result<GapResult> {
    let rev = chain::reversibilize(p).map_err(|_| MixingError::NotDoublyStochastic)?;
    let nonreversible = mixing_time_with(p, epsilon, opts)?;
    let reversible = mixing_time_with(&rev, epsilon, opts)?;
    let t = nonreversible.t_mix as f64;
    let ratio = reversible.t_mix as f64 / (t * t * (p.n() as f64).ln());
    Ok(GapResult { nonreversible, reversible, ratio })
}

pub const PROFILE_CSV_HEADER: &str = "start,k,d";

/// `start,k,d` rows, one per profile entry.
pub fn profile_csv_rows(start: usize, profile: &[f64]) -> String {
    let mut s = String::new();
    for (k, d) in profile.iter().enumerate() {
        let _ = writeln!(s, "{start},{k},{d}");
    }
    s
}
