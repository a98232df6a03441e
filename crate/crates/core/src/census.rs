//! Canonical copy counts and rooted degrees.
//!
//! A canonical copy of a pattern maps pattern vertex `w` into part
//! `parts[w]` (the identity for ordinary patterns) so that every pattern edge
//! lands on a host edge. Distinct pattern vertices sharing a part must map to
//! distinct host vertices; this only arises for glued patterns.
//!
//! Counting is a backtracking search. At every node the next vertex is the
//! unassigned one with the fewest candidates (ties to the lowest index), and
//! candidate sets are intersections of bit rows. When the unassigned vertices
//! are pairwise non-adjacent and sit in distinct parts, the count of the
//! subtree is the product of their candidate set sizes.

use crate::bits::{popcount, BitMatrix, Ones};
use crate::blowup::{BlowupGraph, Edge};
use crate::logspace::LogScale;
use crate::pattern::{glued_patterns, PatternGraph};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use std::ops::ControlFlow;

const UNSET: usize = usize::MAX;

/// Neighbourhood rows for every ordered pair of parts that has a block.
pub struct HostIndex {
    n: usize,
    k: usize,
    adj: Vec<Option<BitMatrix>>,
}

impl HostIndex {
    pub fn new(g: &BlowupGraph) -> Self {
        let k = g.parts();
        let mut adj: Vec<Option<BitMatrix>> = vec![None; k * k];
        for ((i, j), block) in g.blocks() {
            adj[j * k + i] = Some(block.transpose());
            adj[i * k + j] = Some(block.clone());
        }
        HostIndex { n: g.n(), k, adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Neighbours in part `q` of vertex `u` of part `p`.
    #[inline]
    pub fn row(&self, p: usize, q: usize, u: usize) -> Option<&[u64]> {
        self.adj[p * self.k + q].as_ref().map(|m| m.row(u))
    }

    #[inline]
    pub fn adjacent(&self, p: usize, q: usize, u: usize, v: usize) -> bool {
        self.adj[p * self.k + q].as_ref().is_some_and(|m| m.get(u, v))
    }
}

struct Search<'a> {
    index: &'a HostIndex,
    pattern: &'a PatternGraph,
    parts: &'a [usize],
    words: usize,
    full: Vec<u64>,
}

impl<'a> Search<'a> {
    fn new(index: &'a HostIndex, pattern: &'a PatternGraph, parts: &'a [usize]) -> Result<Self> {
        if parts.len() != pattern.k() {
            return Err(Error::Mismatch(format!(
                "part map has {} entries for a pattern on {} vertices",
                parts.len(),
                pattern.k()
            )));
        }
        if let Some(&p) = parts.iter().find(|&&p| p >= index.k) {
            return Err(Error::Mismatch(format!(
                "pattern vertex mapped to part {p}, host has {} parts",
                index.k
            )));
        }
        if let Some(&(u, v)) = pattern.edges().iter().find(|&&(u, v)| parts[u] == parts[v]) {
            return Err(Error::Mismatch(format!(
                "pattern edge {u}-{v} joins two vertices of part {}",
                parts[u]
            )));
        }
        let n = index.n;
        let words = n.div_ceil(64);
        let mut full = vec![u64::MAX; words];
        if !n.is_multiple_of(64) {
            full[words - 1] = (1u64 << (n % 64)) - 1;
        }
        Ok(Search {
            index,
            pattern,
            parts,
            words,
            full,
        })
    }

    /// Whether the pre-assigned vertices are mutually consistent.
    fn consistent(&self, assign: &[usize]) -> bool {
        let k = self.pattern.k();
        for x in 0..k {
            if assign[x] == UNSET {
                continue;
            }
            for y in x + 1..k {
                if assign[y] == UNSET {
                    continue;
                }
                if self.parts[x] == self.parts[y] && assign[x] == assign[y] {
                    return false;
                }
                if self.pattern.has_edge(x, y)
                    && !self.index.adjacent(self.parts[x], self.parts[y], assign[x], assign[y])
                {
                    return false;
                }
            }
        }
        true
    }

    fn candidates(&self, w: usize, assign: &[usize], out: &mut [u64]) {
        out.copy_from_slice(&self.full);
        let pw = self.parts[w];
        let mut nbrs = self.pattern.neighbor_mask(w);
        while nbrs != 0 {
            let x = nbrs.trailing_zeros() as usize;
            nbrs &= nbrs - 1;
            if assign[x] == UNSET {
                continue;
            }
            match self.index.row(self.parts[x], pw, assign[x]) {
                Some(row) => out.iter_mut().zip(row).for_each(|(a, b)| *a &= *b),
                None => {
                    out.iter_mut().for_each(|a| *a = 0);
                    return;
                }
            }
        }
        for (y, &hy) in assign.iter().enumerate() {
            if hy != UNSET && y != w && self.parts[y] == pw {
                out[hy / 64] &= !(1u64 << (hy % 64));
            }
        }
    }

    /// Unassigned vertices (restricted to `scope`), their candidate sets, and
    /// the index of the vertex to branch on; `None` if some set is empty.
    fn frontier(&self, assign: &[usize], scope: u64) -> Option<Frontier> {
        let open: Vec<usize> = (0..self.pattern.k())
            .filter(|&w| assign[w] == UNSET && scope >> w & 1 == 1)
            .collect();
        let mut cands = vec![0u64; open.len() * self.words];
        let mut best = 0;
        let mut best_size = usize::MAX;
        for (slot, &w) in open.iter().enumerate() {
            let buf = &mut cands[slot * self.words..(slot + 1) * self.words];
            self.candidates(w, assign, buf);
            let size = popcount(buf);
            if size == 0 {
                return None;
            }
            if size < best_size {
                best_size = size;
                best = slot;
            }
        }
        Some(Frontier {
            open,
            cands,
            best,
            words: self.words,
        })
    }

    fn independent(&self, open: &[usize]) -> bool {
        let mut seen_parts = 0u64;
        let mut mask = 0u64;
        for &w in open {
            mask |= 1 << w;
        }
        for &w in open {
            if self.pattern.neighbor_mask(w) & mask != 0 {
                return false;
            }
            let bit = 1u64 << self.parts[w];
            if seen_parts & bit != 0 {
                return false;
            }
            seen_parts |= bit;
        }
        true
    }

    fn count(&self, assign: &mut [usize]) -> Result<u128> {
        let Some(front) = self.frontier(assign, u64::MAX) else {
            return Ok(0);
        };
        if front.open.is_empty() {
            return Ok(1);
        }
        if self.independent(&front.open) {
            return (0..front.open.len()).try_fold(1u128, |acc, slot| {
                acc.checked_mul(popcount(front.cand(slot)) as u128)
                    .ok_or(Error::CountOverflow)
            });
        }
        let w = front.open[front.best];
        let mut total: u128 = 0;
        for v in Ones::new(front.cand(front.best)) {
            assign[w] = v;
            let sub = self.count(assign);
            assign[w] = UNSET;
            total = total.checked_add(sub?).ok_or(Error::CountOverflow)?;
        }
        Ok(total)
    }

    fn enumerate<F>(&self, assign: &mut [usize], scope: u64, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        let Some(front) = self.frontier(assign, scope) else {
            return ControlFlow::Continue(());
        };
        if front.open.is_empty() {
            return f(assign);
        }
        let w = front.open[front.best];
        for v in Ones::new(front.cand(front.best)) {
            assign[w] = v;
            let flow = self.enumerate(assign, scope, f);
            assign[w] = UNSET;
            flow?;
        }
        ControlFlow::Continue(())
    }
}

struct Frontier {
    open: Vec<usize>,
    cands: Vec<u64>,
    best: usize,
    words: usize,
}

impl Frontier {
    fn cand(&self, slot: usize) -> &[u64] {
        &self.cands[slot * self.words..(slot + 1) * self.words]
    }
}

/// Canonical copies of `pattern` with vertex `w` placed in part `parts[w]`.
pub fn count_mapped(g: &BlowupGraph, pattern: &PatternGraph, parts: &[usize]) -> Result<u128> {
    let index = HostIndex::new(g);
    count_mapped_indexed(&index, pattern, parts)
}

pub fn count_mapped_indexed(index: &HostIndex, pattern: &PatternGraph, parts: &[usize]) -> Result<u128> {
    let search = Search::new(index, pattern, parts)?;
    let mut assign = vec![UNSET; pattern.k()];
    let Some(front) = search.frontier(&assign, u64::MAX) else {
        return Ok(0);
    };
    if front.open.is_empty() || search.independent(&front.open) || index.n < 16 {
        return search.count(&mut assign);
    }
    let w = front.open[front.best];
    let roots: Vec<usize> = Ones::new(front.cand(front.best)).collect();
    let partial: Vec<Result<u128>> = roots
        .par_iter()
        .map(|&v| {
            let mut local = vec![UNSET; pattern.k()];
            local[w] = v;
            search.count(&mut local)
        })
        .collect();
    partial
        .into_iter()
        .try_fold(0u128, |acc, r| acc.checked_add(r?).ok_or(Error::CountOverflow))
}

/// `Z_H(G)`: canonical copies of `h`, vertex `i` in part `V_i`.
pub fn count_canonical(g: &BlowupGraph, h: &PatternGraph) -> Result<u128> {
    let parts: Vec<usize> = (0..h.k()).collect();
    count_mapped(g, h, &parts)
}

/// Copies of `h` rooted at `a -> u`, `b -> v`.
pub fn count_rooted(index: &HostIndex, h: &PatternGraph, a: usize, u: usize, b: usize, v: usize) -> Result<u128> {
    let parts: Vec<usize> = (0..h.k()).collect();
    let search = Search::new(index, h, &parts)?;
    let mut assign = vec![UNSET; h.k()];
    assign[a] = u;
    assign[b] = v;
    if !search.consistent(&assign) {
        return Ok(0);
    }
    search.count(&mut assign)
}

/// Visits canonical copies of the non-isolated vertices of `pattern`, in the
/// search order used for counting. The callback sees the host vertex of every
/// such pattern vertex; isolated pattern vertices are left unset
/// (`usize::MAX`), so each edge set is visited once.
pub fn for_each_copy<F>(g: &BlowupGraph, pattern: &PatternGraph, parts: &[usize], mut f: F) -> Result<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let index = HostIndex::new(g);
    let search = Search::new(&index, pattern, parts)?;
    let scope = (0..pattern.k())
        .filter(|&w| pattern.degree(w) > 0)
        .fold(0u64, |m, w| m | 1 << w);
    let mut assign = vec![UNSET; pattern.k()];
    let _ = search.enumerate(&mut assign, scope, &mut f);
    Ok(())
}

/// Host edges used by a copy.
pub fn copy_edges(pattern: &PatternGraph, parts: &[usize], assign: &[usize]) -> Vec<Edge> {
    pattern
        .edges()
        .iter()
        .map(|&(x, y)| Edge::new(parts[x], parts[y], assign[x], assign[y]))
        .collect()
}

/// `deg(e)` for every `e = (u, v)` in `V_a x V_b`, stored row-major by `u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeVector {
    pub a: usize,
    pub b: usize,
    pub n: usize,
    pub pattern: PatternGraph,
    pub values: Vec<u64>,
}

impl DegreeVector {
    pub fn get(&self, u: usize, v: usize) -> u64 {
        self.values[u * self.n + v]
    }

    pub fn sum(&self) -> u128 {
        self.values.iter().map(|&d| d as u128).sum()
    }

    pub fn sum_of_squares(&self) -> u128 {
        self.values.iter().map(|&d| d as u128 * d as u128).sum()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "u,v,deg")?;
        for u in 0..self.n {
            for v in 0..self.n {
                writeln!(w, "{u},{v},{}", self.get(u, v))?;
            }
        }
        Ok(())
    }
}

/// Rooted degrees of `h` over the part pair `(a, b)`. The pair need not be an
/// edge of `h`; block `(a, b)` of `g` is only consulted when it is.
pub fn degree_vector(g: &BlowupGraph, h: &PatternGraph, a: usize, b: usize) -> Result<DegreeVector> {
    if a == b {
        return Err(Error::SameVertex(a));
    }
    if a >= h.k() || b >= h.k() {
        return Err(Error::EndpointOutOfRange { u: a, v: b, k: h.k() });
    }
    let n = g.n();
    let index = HostIndex::new(g);
    let rows: Vec<Result<Vec<u64>>> = (0..n)
        .into_par_iter()
        .map(|u| {
            (0..n)
                .map(|v| {
                    let c = count_rooted(&index, h, a, u, b, v)?;
                    u64::try_from(c).map_err(|_| Error::CountOverflow)
                })
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(n * n);
    for r in rows {
        values.extend(r?);
    }
    Ok(DegreeVector {
        a,
        b,
        n,
        pattern: h.clone(),
        values,
    })
}

/// `(1/n^2) sum_e deg(e)^2`, summed exactly before the division.
pub fn second_moment(dv: &DegreeVector) -> f64 {
    dv.sum_of_squares() as f64 / (dv.n as f64 * dv.n as f64)
}

/// Both sides of `sum_e deg(e)^2 = sum_J Z_{glued(J)}`.
#[derive(Clone, Debug, Serialize)]
pub struct GluedIdentity {
    pub sum_of_squares: u128,
    pub glued_total: u128,
    pub per_pattern: Vec<(String, u128)>,
}

impl GluedIdentity {
    pub fn holds(&self) -> bool {
        self.sum_of_squares == self.glued_total
    }
}

/// Recounts `sum_e deg_h(e)^2` through the glued patterns of `h` over `(a, b)`.
pub fn glued_identity(g: &BlowupGraph, h: &PatternGraph, a: usize, b: usize) -> Result<GluedIdentity> {
    let dv = degree_vector(g, h, a, b)?;
    let index = HostIndex::new(g);
    let mut per_pattern = Vec::new();
    let mut total: u128 = 0;
    for gp in glued_patterns(h, a, b)? {
        let c = count_mapped_indexed(&index, &gp.result, &gp.part_map)?;
        total = total.checked_add(c).ok_or(Error::CountOverflow)?;
        per_pattern.push((gp.label(), c));
    }
    Ok(GluedIdentity {
        sum_of_squares: dv.sum_of_squares(),
        glued_total: total,
        per_pattern,
    })
}

pub fn glued_identity_check(g: &BlowupGraph, h: &PatternGraph, a: usize, b: usize) -> Result<bool> {
    Ok(glued_identity(g, h, a, b)?.holds())
}

/// Pairs with `deg(e) >= gamma mu_e / 2`.
pub fn rich_pairs(dv: &DegreeVector, gamma: f64, mu_e: LogScale) -> usize {
    let threshold = gamma * mu_e.value() / 2.0;
    dv.values.iter().filter(|&&d| d as f64 >= threshold).count()
}

/// The poor set as a `V_a x V_b` indicator (rows on the lower part index).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoorPairs {
    pub a: usize,
    pub b: usize,
    pub indicator: BitMatrix,
    pub count: usize,
}

/// Pairs `e` in `V_a x V_b` with `deg_{H - ab}(e, D ∪ Ĝ⁻) < gamma'' mu_e / 2`,
/// where `Ĝ⁻` is `ghat` with its `(a, b)` block emptied.
pub fn poor_pairs(
    d: &BlowupGraph,
    ghat: &BlowupGraph,
    h: &PatternGraph,
    a: usize,
    b: usize,
    gamma_pp: f64,
    mu_e: LogScale,
) -> Result<PoorPairs> {
    let (a, b) = (a.min(b), a.max(b));
    if d.n() != ghat.n() || d.parts() != ghat.parts() {
        return Err(Error::Mismatch(format!(
            "side graph has {} parts of size {}, base graph {} parts of size {}",
            d.parts(),
            d.n(),
            ghat.parts(),
            ghat.n()
        )));
    }
    let reduced = h.without_edge(a, b)?;
    let host = d.union(&ghat.minus_pair(a, b))?;
    let dv = degree_vector(&host, &reduced, a, b)?;
    let threshold = gamma_pp * mu_e.value() / 2.0;
    let n = dv.n;
    let mut indicator = BitMatrix::zeros(n);
    for u in 0..n {
        for v in 0..n {
            if (dv.get(u, v) as f64) < threshold {
                indicator.set(u, v);
            }
        }
    }
    let count = indicator.count();
    Ok(PoorPairs { a, b, indicator, count })
}

/// Counting summary for one pattern and root pair.
#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    pub pattern: String,
    pub pair: (usize, usize),
    pub z: u128,
    pub sum_of_squares: u128,
    pub second_moment: f64,
    pub mu_e: LogScale,
    pub gamma: f64,
    pub rich_count: usize,
    pub poor_count: usize,
    /// `second_moment / mu_e^2`.
    pub ratio_t: f64,
}

/// Mean edge count over the blocks `h` uses, rounded down.
pub fn mean_block_edges(g: &BlowupGraph, h: &PatternGraph) -> usize {
    if h.edge_count() == 0 {
        return 0;
    }
    let total: usize = h.edges().iter().map(|&(i, j)| g.block_edge_count(i, j)).sum();
    total / h.edge_count()
}

/// Full census. `mu_e` defaults to `n^{v(h)} (m/n^2)^{e(h)} / n^2` with `m`
/// the mean edge count of the blocks `h` uses.
pub fn census(
    g: &BlowupGraph,
    h: &PatternGraph,
    a: usize,
    b: usize,
    gamma: f64,
    mu_e: Option<LogScale>,
) -> Result<CensusReport> {
    let dv = degree_vector(g, h, a, b)?;
    let mu_e = match mu_e {
        Some(m) => m,
        None => {
            let m = mean_block_edges(g, h).max(1) as u64;
            crate::pattern::expected_copies(h, g.n() as u64, m, true)?
        }
    };
    let z = dv.sum();
    let second = second_moment(&dv);
    let rich = rich_pairs(&dv, gamma, mu_e);
    Ok(CensusReport {
        pattern: h.spec_string(),
        pair: (a, b),
        z,
        sum_of_squares: dv.sum_of_squares(),
        second_moment: second,
        mu_e,
        gamma,
        rich_count: rich,
        poor_count: dv.n * dv.n - rich,
        ratio_t: second / mu_e.value().powi(2),
    })
}
