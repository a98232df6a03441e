//! Seeded generators for subgraphs of `K_n^H`.
//!
//! Stream layout: block `(i, j)` of [`sample_gnm_h`] draws from
//! `seed.child("pair:i-j")`, the split construction from `seed.child("split:i-j")`
//! and [`partition_exposure`] from `seed.child("expose:i-j")`. Cells are indexed
//! `u * n + v` and selected by partial Fisher-Yates.

use crate::bits::BitMatrix;
use crate::blowup::BlowupGraph;
use crate::pattern::PatternGraph;
use crate::rng::SeedSpec;
use crate::{Error, Result};

fn uniform_block(n: usize, m: usize, seed: &SeedSpec) -> BitMatrix {
    let mut rng = seed.rng();
    let mut block = BitMatrix::zeros(n);
    for idx in rng.sample_indices(n * n, m) {
        block.set(idx / n, idx % n);
    }
    block
}

/// Uniform sample from `G(H, n, m)`: exactly `m` edges in every pattern block,
/// blocks independent.
pub fn sample_gnm_h(h: &PatternGraph, n: usize, m: usize, seed: &SeedSpec) -> Result<BlowupGraph> {
    let mut g = BlowupGraph::bare(h, n)?;
    if m > n * n {
        return Err(Error::EdgeCountOutOfRange {
            m: m as u64,
            max: (n * n) as u64,
        });
    }
    for &(i, j) in h.edges() {
        let stream = seed.child(format!("pair:{i}-{j}"));
        g.set_block(i, j, uniform_block(n, m, &stream))?;
    }
    Ok(g)
}

/// Triangle-free member of `G(K_3, n, m)`.
///
/// `V_0` is split into `U_1 = {0, .., n/2 - 1}` and `U_2 = {n/2, .., n-1}`.
/// Edges of block `(0, i)` have their `V_0` endpoint in `U_i`, chosen uniformly
/// among the `n^2/2` allowed cells; block `(1, 2)` is uniform. A triangle would
/// need its `V_0` vertex in both halves.
pub fn adversarial_split(n: usize, m: usize, seed: &SeedSpec) -> Result<BlowupGraph> {
    if n % 2 == 1 {
        return Err(Error::OddPartSize(n));
    }
    let half = n / 2;
    let allowed = half * n;
    if m > allowed {
        return Err(Error::EdgeCountOutOfRange {
            m: m as u64,
            max: allowed as u64,
        });
    }
    let mut g = BlowupGraph::bare(&PatternGraph::triangle(), n)?;
    for (j, row_offset) in [(1usize, 0usize), (2, half)] {
        let mut rng = seed.child(format!("split:0-{j}")).rng();
        let mut block = BitMatrix::zeros(n);
        for idx in rng.sample_indices(allowed, m) {
            block.set(row_offset + idx / n, idx % n);
        }
        g.set_block(0, j, block)?;
    }
    g.set_block(1, 2, uniform_block(n, m, &seed.child("split:1-2")))?;
    Ok(g)
}

/// Splits every block of `g` uniformly into `rounds` equal, edge-disjoint chunks.
///
/// Each block's edges (row-major order) are shuffled and dealt out in
/// consecutive runs, so every equipartition is equally likely.
pub fn partition_exposure(g: &BlowupGraph, rounds: usize, seed: &SeedSpec) -> Result<Vec<BlowupGraph>> {
    if rounds == 0 {
        return Err(Error::param("rounds", 0.0, "must be positive"));
    }
    for ((i, j), block) in g.blocks() {
        let count = block.count();
        if count % rounds != 0 {
            return Err(Error::NotDivisible { i, j, count, rounds });
        }
    }
    let mut chunks: Vec<BlowupGraph> = (0..rounds)
        .map(|_| {
            let mut c = g.clone();
            for key in g.block_keys() {
                c.set_block(key.0, key.1, BitMatrix::zeros(g.n())).expect("same shape");
            }
            c
        })
        .collect();
    for ((i, j), block) in g.blocks() {
        let mut cells: Vec<(usize, usize)> = block.iter_ones().collect();
        seed.child(format!("expose:{i}-{j}")).rng().shuffle(&mut cells);
        let per = cells.len() / rounds;
        for (c, chunk) in chunks.iter_mut().enumerate() {
            let target = chunk.block_mut(i, j)?;
            for &(u, v) in &cells[c * per..(c + 1) * per] {
                target.set(u, v);
            }
        }
    }
    Ok(chunks)
}
