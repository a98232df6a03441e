//! Constructive deletion: kill every copy of a pattern by removing the edges
//! of a maximal edge-disjoint family of copies.
//!
//! If a greedy scan collects fewer than `t = ceil(k/s)` pairwise edge-disjoint
//! copies (`s` edges each) before running out, the family is maximal, every
//! remaining copy shares an edge with it, and removing its at most
//! `s (t - 1) <= k` edges leaves no copy at all. Otherwise the attempt fails
//! and nothing is removed.

use crate::blowup::{BlowupGraph, Edge};
use crate::census::{copy_edges, count_mapped, degree_vector, for_each_copy, mean_block_edges, second_moment};
use crate::logspace::LogScale;
use crate::pattern::{expected_copies, glued_patterns, PatternGraph};
use crate::{Error, Result};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::ops::ControlFlow;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CanonicalCopy {
    /// Host vertex per pattern vertex; `usize::MAX` for isolated pattern vertices.
    pub assignment: Vec<usize>,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DisjointFamily {
    pub copies: Vec<CanonicalCopy>,
    /// The scan finished below the cap, so every copy meets the family's edges.
    pub maximal: bool,
}

impl DisjointFamily {
    pub fn edges(&self) -> Vec<Edge> {
        let mut all: Vec<Edge> = self.copies.iter().flat_map(|c| c.edges.iter().copied()).collect();
        all.sort_unstable();
        all
    }
}

/// Greedy edge-disjoint family of copies of `pattern` (vertex `w` in part
/// `parts[w]`), scanning copies in the census search order and stopping at `cap`.
pub fn greedy_disjoint_family_mapped(
    g: &BlowupGraph,
    pattern: &PatternGraph,
    parts: &[usize],
    cap: usize,
) -> Result<DisjointFamily> {
    let mut copies = Vec::new();
    let mut used: HashSet<Edge> = HashSet::new();
    let mut hit_cap = cap == 0;
    if !hit_cap {
        for_each_copy(g, pattern, parts, |assign| {
            let edges = copy_edges(pattern, parts, assign);
            if edges.iter().any(|e| used.contains(e)) {
                return ControlFlow::Continue(());
            }
            used.extend(edges.iter().copied());
            copies.push(CanonicalCopy {
                assignment: assign.to_vec(),
                edges,
            });
            if copies.len() >= cap {
                hit_cap = true;
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })?;
    }
    Ok(DisjointFamily {
        copies,
        maximal: !hit_cap,
    })
}

pub fn greedy_disjoint_family(g: &BlowupGraph, h: &PatternGraph, cap: usize) -> Result<DisjointFamily> {
    let parts: Vec<usize> = (0..h.k()).collect();
    greedy_disjoint_family_mapped(g, h, &parts, cap)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeletionStatus {
    Success,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeletionOutcome {
    pub status: DeletionStatus,
    /// Removed edges, sorted.
    pub removed: Vec<Edge>,
    pub removed_size: usize,
    pub budget: f64,
    /// Copies of each pattern left after removing `removed`.
    pub per_pattern_residual: BTreeMap<String, u128>,
    /// `(1/n^2) sum deg^2 / mu_e^2` before removal (second-moment mode only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_before: Option<f64>,
    /// The same ratio after removal.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meets_target: Option<bool>,
}

impl DeletionOutcome {
    pub fn is_success(&self) -> bool {
        self.status == DeletionStatus::Success
    }
}

struct SingleDeletion {
    success: bool,
    removed: Vec<Edge>,
}

fn delete_one(g: &BlowupGraph, pattern: &PatternGraph, parts: &[usize], budget: usize) -> Result<SingleDeletion> {
    let s = pattern.edge_count();
    if s == 0 {
        // Edge-free copies cannot be destroyed by removing edges.
        let present = count_mapped(g, pattern, parts)? > 0;
        return Ok(SingleDeletion {
            success: !present,
            removed: Vec::new(),
        });
    }
    let cap = budget.div_ceil(s).max(1);
    let family = greedy_disjoint_family_mapped(g, pattern, parts, cap)?;
    if family.maximal && family.copies.len() < cap {
        Ok(SingleDeletion {
            success: true,
            removed: family.edges(),
        })
    } else {
        Ok(SingleDeletion {
            success: false,
            removed: Vec::new(),
        })
    }
}

/// Removes at most `budget` edges so that no copy of `h` survives, if the
/// greedy family certifies this is possible; otherwise reports failure.
pub fn deletion_set(g: &BlowupGraph, h: &PatternGraph, budget: usize) -> Result<DeletionOutcome> {
    let parts: Vec<usize> = (0..h.k()).collect();
    let single = delete_one(g, h, &parts, budget)?;
    let rest = g.difference(&single.removed);
    let residual = count_mapped(&rest, h, &parts)?;
    Ok(DeletionOutcome {
        status: if single.success {
            DeletionStatus::Success
        } else {
            DeletionStatus::Fail
        },
        removed_size: single.removed.len(),
        removed: single.removed,
        budget: budget as f64,
        per_pattern_residual: BTreeMap::from([(h.spec_string(), residual)]),
        ratio_before: None,
        measured_t: None,
        meets_target: None,
    })
}

/// Tames the rooted second moment of `h` over the non-edge `(a, b)`.
///
/// Every glued pattern of `h` over `(a, b)` gets its own deletion with budget
/// `floor(xi 2^{-v(h)} m)`, `m` the mean block size. The removed set is the
/// union of the successful deletions; the second moment is recomputed on
/// what is left and reported relative to `mu_e^2`, with
/// `mu_e = n^{v(h)} (m/n^2)^{e(h)} / n^2`. `target_t` is only compared against.
pub fn deletion_for_second_moment(
    g: &BlowupGraph,
    h: &PatternGraph,
    a: usize,
    b: usize,
    xi: f64,
    target_t: f64,
) -> Result<DeletionOutcome> {
    if h.has_edge(a, b) {
        return Err(Error::Mismatch(format!(
            "root pair {a}-{b} must not be an edge of the counted pattern"
        )));
    }
    if !(xi >= 0.0) {
        return Err(Error::param("xi", xi, "must be non-negative"));
    }
    let n = g.n();
    let m = mean_block_edges(g, h);
    let v = h.k();
    let budget = (xi * (-(v as f64)).exp2() * m as f64).floor();
    let budget_edges = budget as usize;

    let mut removed: BTreeSet<Edge> = BTreeSet::new();
    let mut all_ok = true;
    let glued = glued_patterns(h, a, b)?;
    for gp in &glued {
        let single = delete_one(g, &gp.result, &gp.part_map, budget_edges)?;
        if single.success {
            removed.extend(single.removed);
        } else {
            all_ok = false;
        }
    }
    let removed: Vec<Edge> = removed.into_iter().collect();
    let rest = g.difference(&removed);
    let mut residual = BTreeMap::new();
    for gp in &glued {
        residual.insert(gp.label(), count_mapped(&rest, &gp.result, &gp.part_map)?);
    }

    let before = second_moment(&degree_vector(g, h, a, b)?);
    let after = second_moment(&degree_vector(&rest, h, a, b)?);
    let mu_e = if m == 0 && h.edge_count() > 0 {
        None
    } else {
        Some(expected_copies(h, n as u64, m.max(1) as u64, true)?)
    };
    let ratio = |sm: f64| match mu_e {
        _ if sm == 0.0 => 0.0,
        Some(mu) => sm / mu.value().powi(2),
        None => f64::INFINITY,
    };
    let measured = ratio(after);
    Ok(DeletionOutcome {
        status: if all_ok {
            DeletionStatus::Success
        } else {
            DeletionStatus::Fail
        },
        removed_size: removed.len(),
        removed,
        budget,
        per_pattern_residual: residual,
        ratio_before: Some(ratio(before)),
        measured_t: Some(measured),
        meets_target: Some(measured < target_t),
    })
}

/// `mu_e` as used by [`deletion_for_second_moment`].
pub fn rooted_expectation(g: &BlowupGraph, h: &PatternGraph) -> Result<LogScale> {
    let m = mean_block_edges(g, h).max(1) as u64;
    expected_copies(h, g.n() as u64, m, true)
}
