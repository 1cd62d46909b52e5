//! Homogeneous transition matrices on a cycle with chords.
//!
//! A homogeneous chain moves clockwise with probability `q_c + r`,
//! counterclockwise with `q_c − r`, along each chord with `q_l / d`, and holds
//! otherwise. Every row and every column then contains the same multiset of
//! probabilities, so the matrix is doubly stochastic and the uniform
//! distribution is stationary.
//!
//! A chord that duplicates a cycle edge adds its mass to the cycle mass, and on
//! cycles with `n = 2` the two cycle directions lead to the same node and add
//! up as well.

use std::fmt::Write as _;

use thiserror::Error;

use crate::numeric::complement_of_sum;
use crate::topology::{self, LongRangeGraph};

/// Tolerance used for stochasticity checks on built matrices.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// Off-diagonal probabilities are stored as multiples of `2⁻⁵²`. Sums of such
/// values below 2 are exact, so every stored row sums to exactly 1 and the
/// hold probability carries no rounding residue.
const GRID: f64 = (1u64 << 52) as f64;

fn snap_to_grid(p: f64) -> f64 {
    (p * GRID).round() / GRID
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainError {
    #[error("invalid chain parameters: {0}")]
    InvalidParams(String),
    #[error("parameters are infeasible: node {node} would move with probability {mass}")]
    InfeasibleParams { node: usize, mass: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("invalid transition matrix: {0}")]
    InvalidMatrix(String),
    #[error("chain is not lumpable: class {class} rows disagree")]
    NotLumpable { class: usize },
}

type Result<T> = std::result::Result<T, ChainError>;

/// Parameters `(q_c, q_l, r, d)` of the homogeneous chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    /// Base probability of each cycle direction.
    pub q_c: f64,
    /// Long-range budget; each chord is used with probability `q_l / d`.
    pub q_l: f64,
    /// Drift: clockwise gets `q_c + r`, counterclockwise `q_c − r`.
    pub r: f64,
    /// Long-range divisor.
    pub d: usize,
}

impl ChainParams {
    pub fn new(q_c: f64, q_l: f64, r: f64, d: usize) -> Result<Self> {
        let p = ChainParams { q_c, q_l, r, d };
        p.validate()?;
        Ok(p)
    }

    /// Sweep defaults `q_c = 0.2`, `q_l = 0.1` with divisor `⌈2/(α−1)⌉`.
    /// These satisfy `2q_c + q_l ≤ 1/2`, so feasible chains are lazy.
    pub fn experiment(alpha: f64, r: f64) -> Result<Self> {
        let d = topology::degree_cap(alpha)
            .map_err(|e| ChainError::InvalidParams(e.to_string()))?;
        ChainParams::new(0.2, 0.1, r, d)
    }

    pub fn validate(&self) -> Result<()> {
        let ChainParams { q_c, q_l, r, d } = *self;
        if ![q_c, q_l, r].iter().all(|x| x.is_finite()) {
            return Err(ChainError::InvalidParams("non-finite value".into()));
        }
        if q_c < 0.0 || q_l < 0.0 {
            return Err(ChainError::InvalidParams(format!("q_c = {q_c}, q_l = {q_l} must be ≥ 0")));
        }
        if r < 0.0 || r > q_c {
            return Err(ChainError::InvalidParams(format!("drift r = {r} must lie in [0, q_c = {q_c}]")));
        }
        if d == 0 {
            return Err(ChainError::InvalidParams("divisor d must be ≥ 1".into()));
        }
        Ok(())
    }

    /// Probability of using one chord.
    pub fn chord_probability(&self) -> f64 {
        self.q_l / self.d as f64
    }

    pub fn with_drift(self, r: f64) -> Self {
        ChainParams { r, ..self }
    }
}

/// Sparse row-stochastic matrix: per-row off-diagonal entries sorted by
/// column, plus the hold probability on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    hold: Vec<f64>,
}

impl TransitionMatrix {
    /// Assembles a matrix from off-diagonal rows; each row's hold probability
    /// is the complement of its off-diagonal mass. Entries are snapped to the
    /// `2⁻⁵²` grid, summed per target (exactly, since all lie on the grid), and
    /// dropped if zero.
    pub fn from_offdiagonal_rows(rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut hold = Vec::with_capacity(n);
        row_ptr.push(0);
        for (i, row) in rows.into_iter().enumerate() {
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            let mut order: Vec<(usize, f64)> = row;
            order.sort_by_key(|&(j, _)| j);
            for (j, p) in order {
                if j == i || j >= n {
                    return Err(ChainError::InvalidMatrix(format!("bad target {j} in row {i}")));
                }
                if !(0.0..=1.0).contains(&p) {
                    return Err(ChainError::InvalidMatrix(format!("p[{i}][{j}] = {p}")));
                }
                let p = snap_to_grid(p);
                match merged.last_mut() {
                    Some(last) if last.0 == j => last.1 += p,
                    _ => merged.push((j, p)),
                }
            }
            merged.retain(|&(_, p)| p > 0.0);
            let h = complement_of_sum(merged.iter().map(|&(_, p)| p));
            if h < -STOCHASTIC_TOL {
                return Err(ChainError::InfeasibleParams { node: i, mass: 1.0 - h });
            }
            hold.push(h.max(0.0));
            for (j, p) in merged {
                cols.push(j);
                vals.push(p);
            }
            row_ptr.push(cols.len());
        }
        Ok(TransitionMatrix { n, row_ptr, cols, vals, hold })
    }

    /// Builds a matrix from explicit `(i, j, p)` entries, diagonal included.
    /// Rows must sum to 1 within `1e-9`; the stored diagonal is the exact
    /// complement of the (snapped) off-diagonal entries.
    pub fn from_entries(n: usize, entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut hold = vec![0.0; n];
        for (i, j, p) in entries {
            if i >= n || j >= n {
                return Err(ChainError::InvalidMatrix(format!("entry ({i}, {j}) outside {n}×{n}")));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(ChainError::InvalidMatrix(format!("p[{i}][{j}] = {p}")));
            }
            if i == j {
                hold[i] += p;
            } else {
                rows[i].push((j, p));
            }
        }
        let m = Self::from_offdiagonal_rows(rows)?;
        for (i, h) in hold.into_iter().enumerate() {
            if (m.hold[i] - h).abs() > 1e-9 {
                return Err(ChainError::InvalidMatrix(format!("row {i} sums to {}", 1.0 - m.hold[i] + h)));
            }
        }
        Ok(m)
    }

    /// Builds a matrix from a dense row-major array.
    pub fn from_dense(dense: &[Vec<f64>]) -> Result<Self> {
        let n = dense.len();
        let entries = dense
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &p)| (i, j, p)))
            .filter(|&(i, j, p)| p != 0.0 || i == j);
        if dense.iter().any(|r| r.len() != n) {
            return Err(ChainError::InvalidMatrix("dense matrix is not square".into()));
        }
        Self::from_entries(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Diagonal entry `p_ii`.
    pub fn hold(&self, i: usize) -> f64 {
        self.hold[i]
    }

    pub fn holds(&self) -> &[f64] {
        &self.hold
    }

    /// Off-diagonal entries of row `i`, sorted by column.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    /// Entry `p_ij`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.hold[i];
        }
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    /// Number of stored off-diagonal entries.
    pub fn offdiagonal_nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = self.hold[i];
            for (j, p) in self.row(i) {
                row[j] = p;
            }
        }
        d
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.hold[i] + self.row(i).map(|(_, p)| p).sum::<f64>())
            .collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut c = self.hold.clone();
        for i in 0..self.n {
            for (j, p) in self.row(i) {
                c[j] += p;
            }
        }
        c
    }

    /// Off-diagonal entries of `Pᵀ` by row, i.e. the incoming entries of each node.
    pub fn incoming(&self) -> Vec<Vec<(usize, f64)>> {
        let mut inc = vec![Vec::new(); self.n];
        for i in 0..self.n {
            for (j, p) in self.row(i) {
                inc[j].push((i, p));
            }
        }
        inc
    }

    /// Neighbour lists of the connectivity graph (`i ~ j` iff `p_ij > 0` or `p_ji > 0`).
    pub fn connectivity(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for i in 0..self.n {
            for (j, _) in self.row(i) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let adj = self.connectivity();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// Debug dump: one `i j p` line per nonzero (diagonal included), row-major,
    /// probabilities with 17 significant digits.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for i in 0..self.n {
            let mut diag_done = self.hold[i] == 0.0;
            for (j, p) in self.row(i) {
                if !diag_done && j > i {
                    let _ = writeln!(s, "{i} {i} {:.16e}", self.hold[i]);
                    diag_done = true;
                }
                let _ = writeln!(s, "{i} {j} {p:.16e}");
            }
            if !diag_done {
                let _ = writeln!(s, "{i} {i} {:.16e}", self.hold[i]);
            }
        }
        s
    }

    /// Parses [`TransitionMatrix::dump`] output for a chain on `n` states.
    pub fn from_dump(n: usize, text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (ln, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || ChainError::InvalidMatrix(format!("line {}: {line:?}", ln + 1));
            if f.len() != 3 {
                return Err(bad());
            }
            let i = f[0].parse().map_err(|_| bad())?;
            let j = f[1].parse().map_err(|_| bad())?;
            let p = f[2].parse().map_err(|_| bad())?;
            entries.push((i, j, p));
        }
        Self::from_entries(n, entries)
    }
}

/// True iff every node's off-diagonal mass `2q_c + deg·q_l/d` is at most 1.
pub fn is_feasible(g: &LongRangeGraph, params: &ChainParams) -> bool {
    if params.validate().is_err() {
        return false;
    }
    let chord = params.chord_probability();
    g.degrees()
        .into_iter()
        .all(|deg| 2.0 * params.q_c + deg as f64 * chord <= 1.0 + STOCHASTIC_TOL)
}

/// The homogeneous chain of `params` on `g`.
pub fn build_homogeneous(g: &LongRangeGraph, params: &ChainParams) -> Result<TransitionMatrix> {
    params.validate()?;
    let n = g.n();
    let chord = params.chord_probability();
    if !is_feasible(g, params) {
        let (node, deg) = g
            .degrees()
            .into_iter()
            .enumerate()
            .max_by_key(|&(_, d)| d)
            .unwrap_or((0, 0));
        return Err(ChainError::InfeasibleParams {
            node,
            mass: 2.0 * params.q_c + deg as f64 * chord,
        });
    }
    let mut rows: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| vec![((i + 1) % n, params.q_c + params.r), ((i + n - 1) % n, params.q_c - params.r)])
        .collect();
    for &(u, v) in g.edges() {
        rows[u].push((v, chord));
        rows[v].push((u, chord));
    }
    TransitionMatrix::from_offdiagonal_rows(rows)
}

/// True iff every hold probability is at least 1/2.
pub fn is_lazy(p: &TransitionMatrix) -> bool {
    p.holds().iter().all(|&h| h >= 0.5 - STOCHASTIC_TOL)
}

/// True iff all row and column sums lie within `tol` of 1.
pub fn is_doubly_stochastic(p: &TransitionMatrix, tol: f64) -> bool {
    let ok = |s: f64| (s - 1.0).abs() <= tol;
    p.row_sums().into_iter().all(ok) && p.column_sums().into_iter().all(ok)
}

/// Detailed balance for the uniform distribution, i.e. symmetry of `P`.
pub fn is_reversible(p: &TransitionMatrix, tol: f64) -> Result<bool> {
    if !is_doubly_stochastic(p, tol.max(STOCHASTIC_TOL)) {
        return Err(ChainError::PreconditionViolated("matrix is not doubly stochastic".into()));
    }
    Ok((0..p.n()).all(|i| p.row(i).all(|(j, pij)| (pij - p.get(j, i)).abs() <= tol)))
}

/// Additive reversibilization `(P + Pᵀ)/2`.
///
/// For a doubly stochastic `P` the result is symmetric, doubly stochastic, has
/// the same connectivity graph, and every cut carries the same flow.
pub fn reversibilize(p: &TransitionMatrix) -> Result<TransitionMatrix> {
    if !is_doubly_stochastic(p, STOCHASTIC_TOL) {
        return Err(ChainError::PreconditionViolated("matrix is not doubly stochastic".into()));
    }
    let n = p.n();
    let incoming = p.incoming();
    let mut row_ptr = vec![0];
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    for i in 0..n {
        let mut targets: Vec<usize> = p.row(i).map(|(j, _)| j).chain(incoming[i].iter().map(|&(j, _)| j)).collect();
        targets.sort_unstable();
        targets.dedup();
        for j in targets {
            cols.push(j);
            vals.push((p.get(i, j) + p.get(j, i)) * 0.5);
        }
        row_ptr.push(cols.len());
    }
    Ok(TransitionMatrix { n, row_ptr, cols, vals, hold: p.holds().to_vec() })
}

/// Quotient chain under `projection` (node → class in `0..classes`).
///
/// Every node of a class must send the same mass to every class.
pub fn lump(p: &TransitionMatrix, projection: &[usize], classes: usize) -> Result<TransitionMatrix> {
    if projection.len() != p.n() || projection.iter().any(|&c| c >= classes) {
        return Err(ChainError::PreconditionViolated("projection does not match the chain".into()));
    }
    let class_row = |i: usize| {
        let mut row = vec![0.0; classes];
        row[projection[i]] += p.hold(i);
        for (j, pij) in p.row(i) {
            row[projection[j]] += pij;
        }
        row
    };
    let mut reps: Vec<Option<Vec<f64>>> = vec![None; classes];
    for i in 0..p.n() {
        let row = class_row(i);
        let c = projection[i];
        match &reps[c] {
            None => reps[c] = Some(row),
            Some(rep) => {
                if rep.iter().zip(&row).any(|(a, b)| (a - b).abs() > 1e-12) {
                    return Err(ChainError::NotLumpable { class: c });
                }
            }
        }
    }
    let entries = reps.into_iter().enumerate().flat_map(|(c, row)| {
        row.unwrap_or_default()
            .into_iter()
            .enumerate()
            .filter(move |&(d, q)| q != 0.0 || d == c)
            .map(move |(d, q)| (c, d, q))
    });
    TransitionMatrix::from_entries(classes, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{generate_m1, generate_m2, LongRangeGraph, Model};

    fn cycle(n: usize, edges: &[(usize, usize)]) -> LongRangeGraph {
        LongRangeGraph::new(n, 1.5, Model::M2, 0, edges.iter().copied()).unwrap()
    }

    #[test]
    fn plain_cycle_symmetric_walk() {
        let p = build_homogeneous(&cycle(6, &[]), &ChainParams::new(0.25, 0.0, 0.0, 1).unwrap()).unwrap();
        for i in 0..6 {
            assert_eq!(p.get(i, (i + 1) % 6), 0.25);
            assert_eq!(p.get(i, (i + 5) % 6), 0.25);
            assert_eq!(p.hold(i), 0.5);
        }
        assert!(is_lazy(&p));
        assert!(is_reversible(&p, 1e-12).unwrap());
    }

    #[test]
    fn four_cycle_with_chord_row_zero() {
        let p = build_homogeneous(&cycle(4, &[(0, 2)]), &ChainParams::new(0.2, 0.2, 0.1, 4).unwrap()).unwrap();
        assert!((p.get(0, 1) - 0.3).abs() < 1e-15);
        assert!((p.get(0, 3) - 0.1).abs() < 1e-15);
        assert!((p.get(0, 2) - 0.05).abs() < 1e-15);
        assert!((p.hold(0) - 0.55).abs() < 1e-15);
        let row0: f64 = p.row_sums()[0];
        assert!((row0 - 1.0).abs() < 1e-15);
        assert!(is_doubly_stochastic(&p, 1e-12));
        assert!(!is_reversible(&p, 1e-12).unwrap());
    }

    #[test]
    fn chord_on_cycle_edge_adds_mass() {
        let p = build_homogeneous(&cycle(5, &[(0, 1)]), &ChainParams::new(0.2, 0.1, 0.05, 2).unwrap()).unwrap();
        assert!((p.get(0, 1) - 0.30).abs() < 1e-15);
        assert!((p.get(1, 0) - 0.20).abs() < 1e-15);
        assert!(is_doubly_stochastic(&p, 1e-12));
    }

    #[test]
    fn two_cycle_directions_merge() {
        let p = build_homogeneous(&cycle(2, &[]), &ChainParams::new(0.2, 0.0, 0.1, 1).unwrap()).unwrap();
        assert!((p.get(0, 1) - 0.4).abs() < 1e-15);
        assert!(is_reversible(&p, 1e-12).unwrap());
    }

    #[test]
    fn feasibility() {
        let g = generate_m2(200, 1.5, 3).unwrap();
        let dmax = g.max_long_range_degree().max(1);
        assert!(is_feasible(&g, &ChainParams::new(0.2, 0.4, 0.0, dmax).unwrap()));
        assert!(!is_feasible(&cycle(6, &[(0, 3)]), &ChainParams::new(0.5, 0.1, 0.0, 1).unwrap()));
        let m1 = generate_m1(100, 1.5, 2).unwrap();
        assert!(is_feasible(&m1, &ChainParams::new(0.25, 0.5, 0.0, 1).unwrap()));
        let err = build_homogeneous(&cycle(6, &[(0, 3)]), &ChainParams::new(0.5, 0.1, 0.0, 1).unwrap());
        assert!(matches!(err, Err(ChainError::InfeasibleParams { .. })));
    }

    #[test]
    fn params_validation() {
        assert!(ChainParams::new(0.2, 0.1, 0.3, 1).is_err());
        assert!(ChainParams::new(-0.1, 0.1, 0.0, 1).is_err());
        assert!(ChainParams::new(0.2, 0.1, 0.0, 0).is_err());
        assert_eq!(ChainParams::experiment(1.5, 0.15).unwrap().d, 4);
    }

    #[test]
    fn laziness() {
        let g = cycle(8, &[]);
        assert!(!is_lazy(&build_homogeneous(&g, &ChainParams::new(0.3, 0.0, 0.0, 1).unwrap()).unwrap()));
        for seed in 0..20 {
            let g = generate_m2(300, 1.5, seed).unwrap();
            let params = ChainParams::new(0.2, 0.1, 0.1, g.max_long_range_degree().max(1)).unwrap();
            assert!(is_lazy(&build_homogeneous(&g, &params).unwrap()));
        }
    }

    #[test]
    fn doubly_stochastic_checks() {
        let mut dense = vec![vec![0.0; 3]; 3];
        dense[0][1] = 1.0;
        dense[1][2] = 1.0;
        dense[2][0] = 1.0;
        let perm = TransitionMatrix::from_dense(&dense).unwrap();
        assert!(is_doubly_stochastic(&perm, 1e-12));
        let p = build_homogeneous(&cycle(5, &[(0, 2)]), &ChainParams::new(0.2, 0.1, 0.0, 1).unwrap()).unwrap();
        let mut d = p.to_dense();
        for x in &mut d[0] {
            *x *= 0.9;
        }
        let scaled = TransitionMatrix { hold: d.iter().enumerate().map(|(i, r)| r[i]).collect(), ..p.clone() };
        assert!(!is_doubly_stochastic(&scaled, 1e-12));
        assert!(is_reversible(&scaled, 1e-12).is_err());
    }

    #[test]
    fn reversibilize_drifted_triangle() {
        let g = cycle(3, &[]);
        let p = build_homogeneous(&g, &ChainParams::new(0.4, 0.0, 0.2, 1).unwrap()).unwrap();
        assert!((p.get(0, 1) - 0.6).abs() < 1e-15);
        assert!((p.hold(0) - 0.2).abs() < 1e-15);
        let q = reversibilize(&p).unwrap();
        for i in 0..3 {
            assert!((q.get(i, (i + 1) % 3) - 0.4).abs() < 1e-15);
            assert!((q.get(i, (i + 2) % 3) - 0.4).abs() < 1e-15);
            assert!((q.hold(i) - 0.2).abs() < 1e-15);
        }
        assert_eq!(reversibilize(&q).unwrap(), q);
        assert_eq!(p.connectivity(), q.connectivity());
    }

    #[test]
    fn reversibilize_symmetric_is_fixed_point() {
        let g = generate_m2(64, 1.5, 1).unwrap();
        let p = build_homogeneous(&g, &ChainParams::experiment(1.5, 0.0).unwrap()).unwrap();
        assert_eq!(reversibilize(&p).unwrap(), p);
    }

    #[test]
    fn dump_round_trip_is_bit_exact() {
        let g = generate_m2(40, 1.5, 9).unwrap();
        let p = build_homogeneous(&g, &ChainParams::experiment(1.5, 0.15).unwrap()).unwrap();
        let text = p.dump();
        assert!(text.starts_with("0 0 "));
        let q = TransitionMatrix::from_dump(40, &text).unwrap();
        assert_eq!(p, q);
        assert_eq!(q.dump(), text);
    }

    #[test]
    fn wound_chain_is_the_plain_quotient_cycle() {
        let g = generate_m1(100, 1.5, 7).unwrap();
        let w = crate::topology::wind_up(&g).unwrap();
        let p = build_homogeneous(&g, &ChainParams::new(0.2, 0.1, 0.1, 1).unwrap()).unwrap();
        let q = lump(&p, &w.projection, w.cycle_len).unwrap();
        for x in 0..5 {
            assert!((q.get(x, (x + 1) % 5) - 0.3).abs() < 1e-12);
            assert!((q.get(x, (x + 4) % 5) - 0.1).abs() < 1e-12);
            assert!((q.hold(x) - 0.6).abs() < 1e-12);
        }
        let bad: Vec<usize> = (0..100).map(|i| i % 3).collect();
        assert!(matches!(lump(&p, &bad, 3), Err(ChainError::NotLumpable { .. })));
    }
}
