//! Template graphs `H` and pattern-level quantities.

use crate::logspace::LogScale;
use crate::{Error, Result};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Largest supported vertex count; vertex subsets are `u64` masks.
pub const MAX_PATTERN_VERTICES: usize = 32;

/// A labelled graph on `{0, .., k-1}` without loops or multi-edges.
///
/// Edges are stored as `(u, v)` with `u < v`, sorted. Isolated vertices are
/// allowed and still count towards `v(H)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PatternRepr", into = "PatternRepr")]
pub struct PatternGraph {
    k: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct PatternRepr {
    k: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<PatternRepr> for PatternGraph {
    type Error = Error;

    fn try_from(r: PatternRepr) -> Result<Self> {
        PatternGraph::new(r.k, r.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl From<PatternGraph> for PatternRepr {
    fn from(p: PatternGraph) -> Self {
        PatternRepr {
            k: p.k,
            edges: p.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }
}

impl PatternGraph {
    /// Validates and normalises an edge list.
    pub fn new(k: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyPattern);
        }
        if k > MAX_PATTERN_VERTICES {
            return Err(Error::PatternTooLarge {
                k,
                max: MAX_PATTERN_VERTICES,
            });
        }
        let mut adj = vec![0u64; k];
        let mut list = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if u >= k || v >= k {
                return Err(Error::EndpointOutOfRange { u, v, k });
            }
            let (u, v) = (u.min(v), u.max(v));
            if adj[u] >> v & 1 == 1 {
                return Err(Error::DuplicateEdge { u, v });
            }
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
            list.push((u, v));
        }
        list.sort_unstable();
        Ok(PatternGraph { k, edges: list, adj })
    }

    pub fn complete(k: usize) -> Self {
        let edges = (0..k).flat_map(|u| (u + 1..k).map(move |v| (u, v)));
        PatternGraph::new(k, edges).expect("complete graph is valid")
    }

    /// Path `0 - 1 - .. - (k-1)`.
    pub fn path(k: usize) -> Self {
        PatternGraph::new(k, (1..k).map(|v| (v - 1, v))).expect("path is valid")
    }

    /// Cycle `0 - 1 - .. - (k-1) - 0`, `k >= 3`.
    pub fn cycle(k: usize) -> Self {
        assert!(k >= 3, "cycles need at least 3 vertices");
        PatternGraph::new(k, (0..k).map(|v| (v, (v + 1) % k))).expect("cycle is valid")
    }

    pub fn triangle() -> Self {
        PatternGraph::complete(3)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.k
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.k && v < self.k && self.adj[u] >> v & 1 == 1
    }

    /// Neighbourhood of `v` as a vertex mask.
    pub fn neighbor_mask(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn full_mask(&self) -> u64 {
        if self.k == 64 {
            u64::MAX
        } else {
            (1u64 << self.k) - 1
        }
    }

    /// Number of edges induced by the vertex mask.
    pub fn induced_edge_count(&self, mask: u64) -> usize {
        let mut total = 0;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            total += (self.adj[v] & mask).count_ones() as usize;
        }
        total / 2
    }

    /// Same vertex set, one edge removed.
    pub fn without_edge(&self, u: usize, v: usize) -> Result<Self> {
        if !self.has_edge(u, v) {
            return Err(Error::Parse(format!("pattern has no edge {u}-{v}")));
        }
        let (u, v) = (u.min(v), u.max(v));
        PatternGraph::new(self.k, self.edges.iter().copied().filter(|&e| e != (u, v)))
    }

    /// Same vertex set, one edge added.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Self> {
        PatternGraph::new(self.k, self.edges.iter().copied().chain([(u, v)]))
    }

    /// Whether every edge of `self` is an edge of `other` (same labels).
    pub fn is_subgraph_of(&self, other: &PatternGraph) -> bool {
        self.k <= other.k && self.edges.iter().all(|&(u, v)| other.has_edge(u, v))
    }

    /// Compact textual form, `k=3;edges=0-1,0-2,1-2`.
    pub fn spec_string(&self) -> String {
        let edges: Vec<String> = self.edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
        format!("k={};edges={}", self.k, edges.join(","))
    }
}

impl fmt::Debug for PatternGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PatternGraph({})", self.spec_string())
    }
}

impl fmt::Display for PatternGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}

/// Parses `k=3;edges=0-1,0-2,1-2` or one of the shorthands `K<k>`, `C<k>`,
/// `P<k>` (path on `k` vertices) and `K<k>-e` (complete minus the edge `0-1`).
impl FromStr for PatternGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(named) = parse_named(s) {
            return named;
        }
        let mut k = None;
        let mut edges = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{part}`")))?;
            match key.trim() {
                "k" => {
                    k = Some(
                        value
                            .trim()
                            .parse::<usize>()
                            .map_err(|e| Error::Parse(format!("bad vertex count `{value}`: {e}")))?,
                    )
                }
                "edges" => {
                    for e in value.split(',').map(str::trim).filter(|e| !e.is_empty()) {
                        let (u, v) = e
                            .split_once('-')
                            .ok_or_else(|| Error::Parse(format!("bad edge `{e}`")))?;
                        let parse = |x: &str| {
                            x.trim()
                                .parse::<usize>()
                                .map_err(|err| Error::Parse(format!("bad edge `{e}`: {err}")))
                        };
                        edges.push((parse(u)?, parse(v)?));
                    }
                }
                other => return Err(Error::Parse(format!("unknown pattern key `{other}`"))),
            }
        }
        let k = k.ok_or_else(|| Error::Parse("pattern is missing `k=`".into()))?;
        PatternGraph::new(k, edges)
    }
}

fn parse_named(s: &str) -> Option<Result<PatternGraph>> {
    let (body, minus_edge) = match s.strip_suffix("-e") {
        Some(b) => (b, true),
        None => (s, false),
    };
    let mut chars = body.chars();
    let kind = chars.next()?.to_ascii_uppercase();
    let k: usize = chars.as_str().parse().ok()?;
    let base = match kind {
        'K' if (1..=MAX_PATTERN_VERTICES).contains(&k) => PatternGraph::complete(k),
        'C' if (3..=MAX_PATTERN_VERTICES).contains(&k) => PatternGraph::cycle(k),
        'P' if (1..=MAX_PATTERN_VERTICES).contains(&k) => PatternGraph::path(k),
        _ => return None,
    };
    Some(if minus_edge { base.without_edge(0, 1) } else { Ok(base) })
}

/// Validating constructor mirroring [`PatternGraph::new`].
pub fn validate_pattern(k: usize, edges: &[(usize, usize)]) -> Result<PatternGraph> {
    PatternGraph::new(k, edges.iter().copied())
}

/// The 2-density together with whether the `1/2` floor was applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwoDensity {
    pub value: Rational64,
    /// True when no subgraph on more than two vertices reaches `1/2`
    /// (e.g. `K_2`), so the conventional value `1/2` is reported.
    pub convention: bool,
}

impl TwoDensity {
    pub fn as_f64(&self) -> f64 {
        *self.value.numer() as f64 / *self.value.denom() as f64
    }

    /// `2 - 1/m_2`, the exponent of the edge threshold `n^{2 - 1/m_2}`.
    pub fn threshold_exponent(&self) -> f64 {
        2.0 - 1.0 / self.as_f64()
    }
}

/// `m_2(H) = max (e(F) - 1) / (v(F) - 2)` over subgraphs `F` with `v(F) > 2`,
/// floored at `1/2`.
///
/// Only induced subgraphs are scanned: for a fixed vertex set the ratio grows
/// with the edge count.
pub fn two_density(h: &PatternGraph) -> Result<TwoDensity> {
    if h.edge_count() == 0 {
        return Err(Error::EdgelessPattern);
    }
    let half = Rational64::new(1, 2);
    let mut best: Option<Rational64> = None;
    for mask in 1..=h.full_mask() {
        let v = mask.count_ones() as i64;
        if v <= 2 {
            continue;
        }
        let e = h.induced_edge_count(mask) as i64;
        let ratio = Rational64::new(e - 1, v - 2);
        if best.is_none_or(|b| ratio > b) {
            best = Some(ratio);
        }
    }
    Ok(match best {
        Some(b) if b >= half => TwoDensity {
            value: b,
            convention: false,
        },
        _ => TwoDensity {
            value: half,
            convention: true,
        },
    })
}

fn check_range(n: u64, m: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::param("n", 0.0, "part size must be at least 1"));
    }
    let max = n.checked_mul(n).ok_or(Error::CountOverflow)?;
    if m == 0 || m > max {
        return Err(Error::EdgeCountOutOfRange { m, max });
    }
    Ok(())
}

/// `ln( n^v (m/n^2)^e )`.
pub fn ln_expected(n: u64, m: u64, v: usize, e: usize) -> f64 {
    let nf = n as f64;
    v as f64 * nf.ln() + e as f64 * (m as f64 / (nf * nf)).ln()
}

/// `Phi(H, m) = min n^{v(F)} (m/n^2)^{e(F)}` over subgraphs `F` with at least one edge.
pub fn phi(h: &PatternGraph, n: u64, m: u64) -> Result<LogScale> {
    if h.edge_count() == 0 {
        return Err(Error::EdgelessPattern);
    }
    check_range(n, m)?;
    let mut best = f64::INFINITY;
    for mask in 1..=h.full_mask() {
        let e = h.induced_edge_count(mask);
        if e == 0 {
            continue;
        }
        let val = ln_expected(n, m, mask.count_ones() as usize, e);
        if val < best {
            best = val;
        }
    }
    Ok(LogScale(best))
}

/// Expected canonical copies `mu = n^{v(H)} (m/n^2)^{e(H)}`, or the rooted
/// `mu_e = mu / n^2` when `rooted` is set.
pub fn expected_copies(h: &PatternGraph, n: u64, m: u64, rooted: bool) -> Result<LogScale> {
    check_range(n, m)?;
    let mut val = ln_expected(n, m, h.k(), h.edge_count());
    if rooted {
        val -= 2.0 * (n as f64).ln();
    }
    Ok(LogScale(val))
}

/// Pattern-level summary for a given `(n, m)`.
#[derive(Clone, Debug, Serialize)]
pub struct PatternStats {
    pub m2: String,
    pub m2_convention: bool,
    pub phi: LogScale,
    pub mu: LogScale,
    pub mu_e: LogScale,
}

pub fn pattern_stats(h: &PatternGraph, n: u64, m: u64) -> Result<PatternStats> {
    let m2 = two_density(h)?;
    Ok(PatternStats {
        m2: m2.value.to_string(),
        m2_convention: m2.convention,
        phi: phi(h, n, m)?,
        mu: expected_copies(h, n, m, false)?,
        mu_e: expected_copies(h, n, m, true)?,
    })
}

/// Two copies of a base pattern glued along an overlap `J`.
///
/// Vertices `0..k` of `result` are the first copy (identity labels); the
/// second copy reuses the vertices of `J` and appends one new vertex for every
/// base vertex outside `J`, in increasing order. `part_map[w]` is the base
/// vertex (and hence host part) that vertex `w` of `result` stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluedPattern {
    pub base: PatternGraph,
    pub overlap: Vec<usize>,
    pub result: PatternGraph,
    pub part_map: Vec<usize>,
}

impl GluedPattern {
    pub fn overlap_mask(&self) -> u64 {
        self.overlap.iter().fold(0, |m, &v| m | 1 << v)
    }

    /// Edges of the base pattern induced by the overlap.
    pub fn overlap_edge_count(&self) -> usize {
        self.base.induced_edge_count(self.overlap_mask())
    }

    pub fn label(&self) -> String {
        let j: Vec<String> = self.overlap.iter().map(ToString::to_string).collect();
        format!("J={{{}}}", j.join(","))
    }
}

/// All gluings of two copies of `h` along overlaps `J` containing `a` and `b`.
///
/// Every such `J` yields one labelled glued pattern, `2^{k-2}` in total. The
/// two copies agree exactly on `J`, so their intersection is the subgraph
/// induced by `J`.
pub fn glued_patterns(h: &PatternGraph, a: usize, b: usize) -> Result<Vec<GluedPattern>> {
    if a == b {
        return Err(Error::SameVertex(a));
    }
    let k = h.k();
    if a >= k || b >= k {
        return Err(Error::EndpointOutOfRange { u: a, v: b, k });
    }
    if 2 * k - 2 > MAX_PATTERN_VERTICES {
        return Err(Error::PatternTooLarge {
            k: 2 * k - 2,
            max: MAX_PATTERN_VERTICES,
        });
    }
    let fixed = (1u64 << a) | (1u64 << b);
    let others: Vec<usize> = (0..k).filter(|&v| v != a && v != b).collect();
    let mut out = Vec::with_capacity(1 << others.len());
    for sub in 0u64..(1u64 << others.len()) {
        let mut mask = fixed;
        for (i, &v) in others.iter().enumerate() {
            if sub >> i & 1 == 1 {
                mask |= 1 << v;
            }
        }
        out.push(glue(h, mask)?);
    }
    Ok(out)
}

fn glue(h: &PatternGraph, overlap: u64) -> Result<GluedPattern> {
    let k = h.k();
    let mut second = vec![0usize; k];
    let mut part_map: Vec<usize> = (0..k).collect();
    for (v, slot) in second.iter_mut().enumerate() {
        if overlap >> v & 1 == 1 {
            *slot = v;
        } else {
            *slot = part_map.len();
            part_map.push(v);
        }
    }
    let mut edges: Vec<(usize, usize)> = h.edges().to_vec();
    for &(u, v) in h.edges() {
        let (x, y) = (second[u], second[v]);
        if !(x == u && y == v) {
            edges.push((x, y));
        }
    }
    let result = PatternGraph::new(part_map.len(), edges)?;
    Ok(GluedPattern {
        base: h.clone(),
        overlap: (0..k).filter(|&v| overlap >> v & 1 == 1).collect(),
        result,
        part_map,
    })
}
