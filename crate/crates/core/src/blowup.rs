//! Subgraphs of the blow-up host `K_n^H`.
//!
//! Part `i` holds vertices `0..n` of `V_i`. Each stored block `(i, j)` with
//! `i < j` is an `n x n` bit matrix whose rows index `V_i` and columns `V_j`.
//! Blocks may sit on pairs that are not edges of the pattern; those carry
//! side graphs that live between otherwise unrelated parts.

use crate::bits::{BitMatrix, BitSet};
use crate::pattern::PatternGraph;
use crate::{Error, Result};
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// Largest supported part size.
pub const MAX_PART_SIZE: usize = 4096;

/// Edge `u v` between parts `i < j`, with `u` in `V_i` and `v` in `V_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 4]", into = "[usize; 4]")]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub u: usize,
    pub v: usize,
}

impl Edge {
    /// Normalises the pair order so that `i < j`.
    pub fn new(p: usize, q: usize, x: usize, y: usize) -> Self {
        if p < q {
            Edge { i: p, j: q, u: x, v: y }
        } else {
            Edge { i: q, j: p, u: y, v: x }
        }
    }
}

impl From<[usize; 4]> for Edge {
    fn from(a: [usize; 4]) -> Self {
        Edge::new(a[0], a[1], a[2], a[3])
    }
}

impl From<Edge> for [usize; 4] {
    fn from(e: Edge) -> Self {
        [e.i, e.j, e.u, e.v]
    }
}

/// Vertex subset of one part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSubset {
    pub part: usize,
    pub members: BitSet,
}

impl PairSubset {
    pub fn new(part: usize, n: usize, members: impl IntoIterator<Item = usize>) -> Self {
        PairSubset {
            part,
            members: BitSet::from_indices(n, members),
        }
    }

    pub fn full(part: usize, n: usize) -> Self {
        PairSubset {
            part,
            members: BitSet::full(n),
        }
    }

    pub fn len(&self) -> usize {
        self.members.count()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fill {
    Empty,
    Complete,
}

#[derive(Clone, PartialEq, Eq)]
pub struct BlowupGraph {
    pattern: PatternGraph,
    n: usize,
    blocks: BTreeMap<(usize, usize), BitMatrix>,
}

impl BlowupGraph {
    /// The host with one block per pattern edge, either empty or complete.
    pub fn new_host(pattern: &PatternGraph, n: usize, fill: Fill) -> Result<Self> {
        if n == 0 || n > MAX_PART_SIZE {
            return Err(Error::param("n", n as f64, "part size must lie in 1..=4096"));
        }
        let blocks = pattern
            .edges()
            .iter()
            .map(|&pair| {
                let m = match fill {
                    Fill::Empty => BitMatrix::zeros(n),
                    Fill::Complete => BitMatrix::ones(n),
                };
                (pair, m)
            })
            .collect();
        Ok(BlowupGraph {
            pattern: pattern.clone(),
            n,
            blocks,
        })
    }

    /// Host with no blocks at all.
    pub fn bare(pattern: &PatternGraph, n: usize) -> Result<Self> {
        let mut g = BlowupGraph::new_host(pattern, n, Fill::Empty)?;
        g.blocks.clear();
        Ok(g)
    }

    pub fn pattern(&self) -> &PatternGraph {
        &self.pattern
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> usize {
        self.pattern.k()
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<(usize, usize)> {
        let k = self.parts();
        if i == j {
            return Err(Error::SameVertex(i));
        }
        if i >= k || j >= k {
            return Err(Error::EndpointOutOfRange { u: i, v: j, k });
        }
        Ok((i.min(j), i.max(j)))
    }

    /// Block `(i, j)`; `i < j` is required for the row/column orientation.
    pub fn block(&self, i: usize, j: usize) -> Option<&BitMatrix> {
        self.blocks.get(&(i, j))
    }

    pub fn blocks(&self) -> impl Iterator<Item = ((usize, usize), &BitMatrix)> {
        self.blocks.iter().map(|(&k, v)| (k, v))
    }

    pub fn block_keys(&self) -> Vec<(usize, usize)> {
        self.blocks.keys().copied().collect()
    }

    /// Inserts or replaces block `(i, j)`, `i < j`.
    pub fn set_block(&mut self, i: usize, j: usize, block: BitMatrix) -> Result<()> {
        if i >= j {
            return Err(Error::Mismatch(format!("block key {i}-{j} must satisfy i < j")));
        }
        self.check_pair(i, j)?;
        if block.n() != self.n {
            return Err(Error::Mismatch(format!(
                "block has side {}, graph has part size {}",
                block.n(),
                self.n
            )));
        }
        self.blocks.insert((i, j), block);
        Ok(())
    }

    /// Mutable block `(i, j)`, created empty if absent.
    pub fn block_mut(&mut self, i: usize, j: usize) -> Result<&mut BitMatrix> {
        let (i, j) = self.check_pair(i, j)?;
        let n = self.n;
        Ok(self.blocks.entry((i, j)).or_insert_with(|| BitMatrix::zeros(n)))
    }

    pub fn has_edge(&self, e: &Edge) -> bool {
        self.blocks
            .get(&(e.i, e.j))
            .is_some_and(|b| e.u < self.n && e.v < self.n && b.get(e.u, e.v))
    }

    pub fn insert_edge(&mut self, e: Edge) -> Result<()> {
        if e.u >= self.n || e.v >= self.n {
            return Err(Error::param("vertex", e.u.max(e.v) as f64, "outside the part"));
        }
        self.block_mut(e.i, e.j)?.set(e.u, e.v);
        Ok(())
    }

    pub fn block_edge_count(&self, i: usize, j: usize) -> usize {
        self.blocks.get(&(i, j)).map_or(0, BitMatrix::count)
    }

    /// Total number of edges over all blocks.
    pub fn edge_count(&self) -> usize {
        self.blocks.values().map(BitMatrix::count).sum()
    }

    /// All edges, sorted by `(i, j, u, v)`.
    pub fn edges(&self) -> Vec<Edge> {
        self.blocks
            .iter()
            .flat_map(|(&(i, j), b)| b.iter_ones().map(move |(u, v)| Edge { i, j, u, v }))
            .collect()
    }

    /// `e(A, B) / (|A| |B|)` inside block `(i, j)`, `A` on part `i` and `B` on part `j`.
    pub fn pair_density(&self, a: &PairSubset, b: &PairSubset) -> Result<f64> {
        let (i, j) = (a.part, b.part);
        self.check_pair(i, j)?;
        if a.is_empty() {
            return Err(Error::EmptySubset(a.part));
        }
        if b.is_empty() {
            return Err(Error::EmptySubset(b.part));
        }
        let (rows, cols, key) = if i < j { (a, b, (i, j)) } else { (b, a, (j, i)) };
        let block = self.blocks.get(&key).ok_or(Error::MissingBlock(key.0, key.1))?;
        let e = block.count_between(&rows.members, &cols.members);
        Ok(e as f64 / (rows.len() as f64 * cols.len() as f64))
    }

    /// Copy with block `(a, b)` emptied; absent blocks stay absent.
    pub fn minus_pair(&self, a: usize, b: usize) -> BlowupGraph {
        let mut out = self.clone();
        if let Some(block) = out.blocks.get_mut(&(a.min(b), a.max(b))) {
            *block = BitMatrix::zeros(self.n);
        }
        out
    }

    fn check_compatible(&self, other: &BlowupGraph) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Mismatch(format!("part sizes {} and {}", self.n, other.n)));
        }
        if self.pattern != other.pattern {
            return Err(Error::Mismatch(format!(
                "patterns {} and {}",
                self.pattern, other.pattern
            )));
        }
        Ok(())
    }

    /// Blockwise OR; the result carries every block present in either operand.
    pub fn union(&self, other: &BlowupGraph) -> Result<BlowupGraph> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (&key, block) in &other.blocks {
            match out.blocks.get_mut(&key) {
                Some(mine) => mine.or_assign(block),
                None => {
                    out.blocks.insert(key, block.clone());
                }
            }
        }
        Ok(out)
    }

    /// Blockwise AND over the blocks of `self`.
    pub fn intersection(&self, other: &BlowupGraph) -> Result<BlowupGraph> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (key, block) in out.blocks.iter_mut() {
            match other.blocks.get(key) {
                Some(theirs) => block.and_assign(theirs),
                None => *block = BitMatrix::zeros(self.n),
            }
        }
        Ok(out)
    }

    /// `self` minus every edge of `other`.
    pub fn difference_graph(&self, other: &BlowupGraph) -> Result<BlowupGraph> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (key, block) in out.blocks.iter_mut() {
            if let Some(theirs) = other.blocks.get(key) {
                block.and_not_assign(theirs);
            }
        }
        Ok(out)
    }

    /// `self` minus the listed edges; edges not present are ignored.
    pub fn difference(&self, remove: &[Edge]) -> BlowupGraph {
        let mut out = self.clone();
        for e in remove {
            if let Some(b) = out.blocks.get_mut(&(e.i, e.j)) {
                b.clear(e.u, e.v);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphFile::from(self)).expect("graph serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFileIn = serde_json::from_str(text)?;
        file.into_graph()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        BlowupGraph::from_json(&std::fs::read_to_string(path)?)
    }
}

impl fmt::Debug for BlowupGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<String> = self
            .blocks
            .iter()
            .map(|((i, j), b)| format!("{i}-{j}:{}", b.count()))
            .collect();
        write!(
            f,
            "BlowupGraph(pattern={}, n={}, blocks=[{}])",
            self.pattern,
            self.n,
            sizes.join(", ")
        )
    }
}

/// Canonical on-disk form: blocks in ascending `(i, j)` order, edges sorted.
#[derive(Serialize)]
struct GraphFile<'a> {
    pattern: &'a PatternGraph,
    n: usize,
    blocks: BlockMap<'a>,
}

struct BlockMap<'a>(&'a BTreeMap<(usize, usize), BitMatrix>);

impl Serialize for BlockMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for ((i, j), block) in self.0 {
            let edges: Vec<[usize; 2]> = block.iter_ones().map(|(u, v)| [u, v]).collect();
            map.serialize_entry(&format!("{i}-{j}"), &edges)?;
        }
        map.end()
    }
}

impl<'a> From<&'a BlowupGraph> for GraphFile<'a> {
    fn from(g: &'a BlowupGraph) -> Self {
        GraphFile {
            pattern: &g.pattern,
            n: g.n,
            blocks: BlockMap(&g.blocks),
        }
    }
}

#[derive(Deserialize)]
struct GraphFileIn {
    pattern: PatternGraph,
    n: usize,
    blocks: BTreeMap<String, Vec<[usize; 2]>>,
}

impl GraphFileIn {
    fn into_graph(self) -> Result<BlowupGraph> {
        let mut g = BlowupGraph::bare(&self.pattern, self.n)?;
        for (key, edges) in self.blocks {
            let (i, j) = key
                .split_once('-')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                .ok_or_else(|| Error::Parse(format!("bad block key `{key}`")))?;
            let mut block = BitMatrix::zeros(self.n);
            for [u, v] in edges {
                if u >= self.n || v >= self.n {
                    return Err(Error::Parse(format!(
                        "edge [{u},{v}] in block {key} outside part size {}",
                        self.n
                    )));
                }
                if block.get(u, v) {
                    return Err(Error::Parse(format!("duplicate edge [{u},{v}] in block {key}")));
                }
                block.set(u, v);
            }
            g.set_block(i, j, block)?;
        }
        Ok(g)
    }
}
