//! Lower-regularity of bipartite blocks.
//!
//! A block on `A x B`, `|A| = |B| = n`, is `(eps, lambda)`-lower-regular when
//! every `A' ⊆ A`, `B' ⊆ B` with `|A'|, |B'| >= eps n` has
//! `d(A', B') >= lambda d(A, B)`. The function variant replaces the constant
//! by `delta(alpha)`, `alpha = min(|A'|, |B'|) / n`, and asks for the strict
//! inequality `d(A', B') > delta(alpha) d(A, B)`.
//!
//! Three checks are offered:
//!
//! - [`check_exact`] decides the property by enumerating one side and taking
//!   the lowest-degree vertices on the other.
//! - [`check_heuristic`] searches for a violating pair by alternating descent
//!   and can only refute.
//! - [`check_spectral`] bounds the operator norm of the centred block and can
//!   only certify.

use crate::bits::{and_popcount, BitMatrix, BitSet};
use crate::blowup::BlowupGraph;
use crate::rng::SeedSpec;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::E;

/// Relative gap below which the two sides of a density comparison are equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Default bound on the number of subsets the exact check may enumerate.
pub const DEFAULT_ENUMERATION_CAP: u128 = 100_000_000;

/// `delta_0(x) = (lambda / 4e) (beta / 2)^{1 / (lambda x^2)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaSchedule {
    pub lambda: f64,
    pub beta: f64,
}

impl DeltaSchedule {
    pub fn ln_eval(&self, x: f64) -> f64 {
        (self.lambda / (4.0 * E)).ln() + (self.beta / 2.0).ln() / (self.lambda * x * x)
    }

    /// May underflow to `0.0` for very small `x`; use [`Self::ln_eval`] there.
    pub fn eval(&self, x: f64) -> f64 {
        self.ln_eval(x).exp()
    }

    /// `d_0 = delta_0(1)`.
    pub fn d0(&self) -> f64 {
        self.eval(1.0)
    }

    /// `ln m + lambda alpha^2 m ln(4e delta_0(alpha) / lambda) - m ln beta`;
    /// non-positive exactly when `m (4e delta_0(alpha)/lambda)^{lambda alpha^2 m} <= beta^m`.
    pub fn tail_bound_excess(&self, alpha: f64, m: u64) -> f64 {
        let mf = m as f64;
        let base = (4.0 * E / self.lambda).ln() + self.ln_eval(alpha);
        mf.ln() + self.lambda * alpha * alpha * mf * base - mf * self.beta.ln()
    }

    /// Smallest `m0 <= m_max` such that the tail bound holds for every
    /// `m0 <= m <= m_max` and every `alpha` given; `None` if it fails at `m_max`.
    pub fn admissible_from(&self, alphas: &[f64], m_max: u64) -> Option<u64> {
        let mut m0 = None;
        for m in (1..=m_max).rev() {
            if alphas.iter().all(|&a| self.tail_bound_excess(a, m) <= 0.0) {
                m0 = Some(m);
            } else {
                break;
            }
        }
        m0
    }
}

/// The extremal admissible schedule for given `lambda, beta` in `(0, 1)`.
pub fn delta_schedule(lambda: f64, beta: f64) -> Result<DeltaSchedule> {
    for (name, v) in [("lambda", lambda), ("beta", beta)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::param(name, v, "must lie in (0, 1)"));
        }
    }
    Ok(DeltaSchedule { lambda, beta })
}

/// A threshold function `delta: (0, 1] -> (0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeltaFn {
    Extremal(DeltaSchedule),
    Constant { value: f64 },
}

impl DeltaFn {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            DeltaFn::Extremal(s) => s.eval(x),
            DeltaFn::Constant { value } => *value,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Threshold {
    /// `d(A', B') >= lambda d(A, B)`.
    Constant { lambda: f64 },
    /// `d(A', B') > delta(alpha) d(A, B)`.
    Function { delta: DeltaFn },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityParams {
    pub eps: f64,
    pub threshold: Threshold,
}

impl RegularityParams {
    pub fn constant(eps: f64, lambda: f64) -> Result<Self> {
        check_unit("eps", eps)?;
        check_unit("lambda", lambda)?;
        Ok(RegularityParams {
            eps,
            threshold: Threshold::Constant { lambda },
        })
    }

    pub fn function(eps: f64, delta: DeltaFn) -> Result<Self> {
        check_unit("eps", eps)?;
        if let DeltaFn::Constant { value } = delta {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::param("delta", value, "must lie in (0, 1)"));
            }
        }
        Ok(RegularityParams {
            eps,
            threshold: Threshold::Function { delta },
        })
    }

    /// `ceil(eps n)`, with products within `1e-9` of an integer snapped to it.
    pub fn min_size(&self, n: usize) -> usize {
        let x = self.eps * n as f64;
        let r = x.round();
        let a0 = if (x - r).abs() < 1e-9 { r } else { x.ceil() };
        (a0 as usize).clamp(1, n.max(1))
    }

    /// Whether `e_sub` edges between sets of sizes `s, t` violate the
    /// property in a block with `e_total` edges.
    ///
    /// Both sides are compared cleared of denominators; values within a
    /// relative [`TIE_TOLERANCE`] count as equal, so decimal parameters such
    /// as `lambda = 0.1` behave as written rather than as their binary rounding.
    pub fn violates(&self, e_sub: usize, s: usize, t: usize, e_total: usize, n: usize) -> bool {
        let lhs = e_sub as f64 * (n as f64 * n as f64);
        let base = e_total as f64 * s as f64 * t as f64;
        match self.threshold {
            Threshold::Constant { lambda } => lhs < lambda * base * (1.0 - TIE_TOLERANCE),
            Threshold::Function { delta } => {
                let alpha = s.min(t) as f64 / n as f64;
                lhs <= delta.eval(alpha) * base * (1.0 + TIE_TOLERANCE)
            }
        }
    }
}

fn check_unit(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::param(name, v, "must lie in (0, 1]"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    CertifiedRegular,
    Irregular,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Heuristic,
    Spectral,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "heuristic" => Ok(Mode::Heuristic),
            "spectral" => Ok(Mode::Spectral),
            other => Err(Error::Parse(format!("unknown regularity mode `{other}`"))),
        }
    }
}

/// A violating pair: rows `a_side` of the block against columns `b_side`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub a_side: Vec<usize>,
    pub b_side: Vec<usize>,
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    pub status: Status,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Certified upper bound on the centred operator norm (spectral mode).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_bound: Option<f64>,
}

impl RegularityVerdict {
    fn new(status: Status, mode: Mode) -> Self {
        RegularityVerdict {
            status,
            mode,
            witness: None,
            norm_bound: None,
        }
    }

    pub fn is_regular(&self) -> bool {
        self.status == Status::CertifiedRegular
    }
}

/// Recomputes a witness against the block; `Some(witness)` only if it violates.
pub fn verify_witness(
    block: &BitMatrix,
    params: &RegularityParams,
    a_side: &[usize],
    b_side: &[usize],
) -> Option<Witness> {
    let n = block.n();
    let a0 = params.min_size(n);
    if a_side.len() < a0 || b_side.len() < a0 {
        return None;
    }
    let rows = BitSet::from_indices(n, a_side.iter().copied());
    let cols = BitSet::from_indices(n, b_side.iter().copied());
    if rows.count() != a_side.len() || cols.count() != b_side.len() {
        return None;
    }
    let e_sub = block.count_between(&rows, &cols);
    let (s, t) = (a_side.len(), b_side.len());
    params.violates(e_sub, s, t, block.count(), n).then(|| Witness {
        a_side: rows.to_vec(),
        b_side: cols.to_vec(),
        density: e_sub as f64 / (s as f64 * t as f64),
    })
}

pub(crate) fn binomial_u128(n: usize, k: usize) -> Option<u128> {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Lexicographic walk over `k`-subsets of `0..n`.
struct Combinations {
    idx: Vec<usize>,
    n: usize,
    first: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            idx: (0..k).collect(),
            n,
            first: true,
        }
    }

    fn advance(&mut self) -> Option<&[usize]> {
        let k = self.idx.len();
        if self.first {
            self.first = false;
            return (k <= self.n).then_some(&self.idx[..]);
        }
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return Some(&self.idx[..]);
            }
        }
        None
    }
}

/// Column degrees towards `rows`, sorted ascending with ties by index.
fn sorted_degrees_towards(cols_t: &BitMatrix, rows: &BitSet) -> Vec<(usize, usize)> {
    let mut degs: Vec<(usize, usize)> = (0..cols_t.n())
        .map(|b| (and_popcount(cols_t.row(b), rows.words()), b))
        .collect();
    degs.sort_unstable();
    degs
}

/// Decides lower-regularity exactly.
///
/// For a fixed `A'` the sparsest `B'` of size `t` consists of the `t`
/// lowest-degree columns towards `A'`, and shrinking either side to its
/// lowest-degree vertices never raises the density. With a constant threshold
/// a violation of any admissible size therefore shrinks to one of size exactly
/// `a0 = ceil(eps n)` on both sides, so only the `C(n, a0)` row subsets of that
/// size are enumerated. With a threshold function only the larger side can be
/// shrunk (the relative size `alpha` must not drop), so row subsets of every
/// size `s >= a0` are enumerated against `s` lowest-degree columns.
pub fn check_exact(block: &BitMatrix, params: &RegularityParams, cap: u128) -> Result<RegularityVerdict> {
    let n = block.n();
    let a0 = params.min_size(n);
    let sizes: Vec<usize> = match params.threshold {
        Threshold::Constant { .. } => vec![a0],
        Threshold::Function { .. } => (a0..=n).collect(),
    };
    let required = sizes
        .iter()
        .try_fold(0u128, |acc, &s| acc.checked_add(binomial_u128(n, s)?))
        .unwrap_or(u128::MAX);
    if required > cap {
        return Err(Error::EnumerationCap { required, cap });
    }
    let cols_t = block.transpose();
    let e_total = block.count();
    for &s in &sizes {
        let mut combos = Combinations::new(n, s);
        while let Some(rows) = combos.advance() {
            let rows_set = BitSet::from_indices(n, rows.iter().copied());
            let degs = sorted_degrees_towards(&cols_t, &rows_set);
            let e_sub: usize = degs[..s].iter().map(|d| d.0).sum();
            if params.violates(e_sub, s, s, e_total, n) {
                let a_side = rows.to_vec();
                let mut b_side: Vec<usize> = degs[..s].iter().map(|d| d.1).collect();
                b_side.sort_unstable();
                let witness = verify_witness(block, params, &a_side, &b_side)
                    .expect("enumerated witness violates by construction");
                let mut v = RegularityVerdict::new(Status::Irregular, Mode::Exact);
                v.witness = Some(witness);
                return Ok(v);
            }
        }
    }
    Ok(RegularityVerdict::new(Status::CertifiedRegular, Mode::Exact))
}

fn lowest(degs: Vec<(usize, usize)>, size: usize) -> Vec<usize> {
    let mut out: Vec<usize> = degs[..size].iter().map(|d| d.1).collect();
    out.sort_unstable();
    out
}

/// Alternating-descent search for a violating pair of size `a0 x a0`.
///
/// Two deterministic starts (lowest-degree rows, lowest-degree columns) are
/// followed by `restarts` random row subsets. Each start alternates between
/// replacing one side by the lowest-degree vertices towards the other until
/// the edge count stops dropping. Returns `Irregular` with a re-verified
/// witness or `Unknown`.
pub fn check_heuristic(
    block: &BitMatrix,
    params: &RegularityParams,
    restarts: usize,
    seed: &SeedSpec,
) -> RegularityVerdict {
    let n = block.n();
    let a0 = params.min_size(n);
    let cols_t = block.transpose();
    let all = BitSet::full(n);

    let descend = |mut rows: Vec<usize>| -> Option<Witness> {
        let mut best = usize::MAX;
        for _ in 0..4 * n + 4 {
            let row_set = BitSet::from_indices(n, rows.iter().copied());
            let cols = lowest(sorted_degrees_towards(&cols_t, &row_set), a0);
            let col_set = BitSet::from_indices(n, cols.iter().copied());
            rows = lowest(sorted_degrees_towards(block, &col_set), a0);
            let row_set = BitSet::from_indices(n, rows.iter().copied());
            let e_sub = block.count_between(&row_set, &col_set);
            if let Some(w) = verify_witness(block, params, &rows, &cols) {
                return Some(w);
            }
            if e_sub >= best {
                break;
            }
            best = e_sub;
        }
        None
    };

    let mut starts: Vec<Vec<usize>> = Vec::with_capacity(restarts + 2);
    starts.push(lowest(sorted_degrees_towards(block, &all), a0));
    let col_start = BitSet::from_indices(n, lowest(sorted_degrees_towards(&cols_t, &all), a0));
    starts.push(lowest(sorted_degrees_towards(block, &col_start), a0));
    for r in 0..restarts {
        let mut rng = seed.child(format!("restart:{r}")).rng();
        let mut rows = rng.sample_indices(n, a0);
        rows.sort_unstable();
        starts.push(rows);
    }
    for start in starts {
        if let Some(w) = descend(start) {
            let mut v = RegularityVerdict::new(Status::Irregular, Mode::Heuristic);
            v.witness = Some(w);
            return v;
        }
    }
    RegularityVerdict::new(Status::Unknown, Mode::Heuristic)
}

/// Bounds on the largest singular value of the centred block `M - d J`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormBounds {
    /// Rayleigh-quotient estimate from power iteration (never above the truth
    /// up to rounding).
    pub estimate: f64,
    /// Certified upper bound.
    pub upper: f64,
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    let row = |(i, out_row): (usize, &mut [f64])| {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik != 0.0 {
                let brow = &b[k * n..(k + 1) * n];
                for (o, &bv) in out_row.iter_mut().zip(brow) {
                    *o += aik * bv;
                }
            }
        }
    };
    if n >= 128 {
        out.par_chunks_mut(n).enumerate().for_each(row);
    } else {
        out.chunks_mut(n).enumerate().for_each(row);
    }
    out
}

fn frobenius(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

const SQUARINGS: u32 = 6;

/// Operator-norm bounds for the centred block.
///
/// The certified bound uses `lambda_max(B)^{2^{k+1}} <= tr(B^{2^{k+1}}) =
/// ||B^{2^k}||_F^2` for the positive semidefinite `B = (M - dJ)^T (M - dJ)`,
/// evaluated by repeated squaring with renormalisation. It overshoots by at
/// most a factor `n^{1/2^{k+2}}` and is inflated for rounding.
pub fn centred_norm_bounds(block: &BitMatrix) -> NormBounds {
    let n = block.n();
    let d = block.count() as f64 / (n as f64 * n as f64);
    let mut centred = vec![0.0; n * n];
    for u in 0..n {
        for v in 0..n {
            centred[u * n + v] = if block.get(u, v) { 1.0 - d } else { -d };
        }
    }
    let mut transposed = vec![0.0; n * n];
    for u in 0..n {
        for v in 0..n {
            transposed[v * n + u] = centred[u * n + v];
        }
    }
    let gram = matmul(&transposed, &centred, n);

    let f0 = frobenius(&gram);
    if f0 == 0.0 {
        return NormBounds {
            estimate: 0.0,
            upper: 0.0,
        };
    }
    let mut ln_norm = f0.ln();
    let mut unit: Vec<f64> = gram.iter().map(|x| x / f0).collect();
    for _ in 0..SQUARINGS {
        let sq = matmul(&unit, &unit, n);
        let f = frobenius(&sq);
        if f == 0.0 {
            break;
        }
        ln_norm = 2.0 * ln_norm + f.ln();
        unit = sq.iter().map(|x| x / f).collect();
    }
    let ln_lambda_max = ln_norm / f64::powi(2.0, SQUARINGS as i32);
    let inflate = 1.0 + 1e-9 + 64.0 * n as f64 * f64::EPSILON;
    let upper = (0.5 * ln_lambda_max).exp() * inflate;

    // Power iteration on the Gram matrix for the reported estimate.
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.618_033_988_75).fract()).collect();
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nx = norm(&x);
    x.iter_mut().for_each(|a| *a /= nx);
    let mut rayleigh = 0.0;
    for _ in 0..2000 {
        let y: Vec<f64> = (0..n)
            .map(|i| gram[i * n..(i + 1) * n].iter().zip(&x).map(|(g, a)| g * a).sum())
            .collect();
        let r: f64 = y.iter().zip(&x).map(|(a, b)| a * b).sum();
        let ny = norm(&y);
        if ny == 0.0 {
            break;
        }
        x = y.into_iter().map(|a| a / ny).collect();
        let done = (r - rayleigh).abs() <= 1e-9 * r.abs().max(1e-300);
        rayleigh = r;
        if done {
            break;
        }
    }
    NormBounds {
        estimate: rayleigh.max(0.0).sqrt(),
        upper,
    }
}

/// Sufficient certificate: with `s` the centred operator norm and `d` the block
/// density, `e(A', B') >= d |A'||B'| - s sqrt(|A'||B'|)`, so `s <= (1 - lambda) d a0`
/// certifies the constant form (and `s < (1 - delta(t/n)) d t` for every size
/// `t >= a0` certifies the function form). Never reports `Irregular`.
pub fn check_spectral(block: &BitMatrix, params: &RegularityParams) -> RegularityVerdict {
    let n = block.n();
    let e = block.count();
    if e == 0 {
        return RegularityVerdict::new(Status::Unknown, Mode::Spectral);
    }
    let d = e as f64 / (n as f64 * n as f64);
    let a0 = params.min_size(n);
    let bounds = centred_norm_bounds(block);
    let s = bounds.upper;
    let certified = match params.threshold {
        Threshold::Constant { lambda } => s <= (1.0 - lambda) * d * a0 as f64,
        Threshold::Function { delta } => (a0..=n).all(|t| {
            let alpha = t as f64 / n as f64;
            s < (1.0 - delta.eval(alpha)) * d * t as f64
        }),
    };
    let status = if certified {
        Status::CertifiedRegular
    } else {
        Status::Unknown
    };
    let mut v = RegularityVerdict::new(status, Mode::Spectral);
    v.norm_bound = Some(s);
    v
}

/// Options shared by the per-block checks of [`check_blowup`].
#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub cap: u128,
    pub restarts: usize,
    pub seed: SeedSpec,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            cap: DEFAULT_ENUMERATION_CAP,
            restarts: 8,
            seed: SeedSpec::new(0, "regularity"),
        }
    }
}

pub fn check_block(
    block: &BitMatrix,
    params: &RegularityParams,
    mode: Mode,
    opts: &CheckOptions,
    label: &str,
) -> Result<RegularityVerdict> {
    match mode {
        Mode::Exact => check_exact(block, params, opts.cap),
        Mode::Heuristic => Ok(check_heuristic(block, params, opts.restarts, &opts.seed.child(label))),
        Mode::Spectral => Ok(check_spectral(block, params)),
    }
}

/// Runs the chosen check on every pattern-pair block; absent blocks count as empty.
pub fn check_blowup(
    g: &BlowupGraph,
    params: &RegularityParams,
    mode: Mode,
    opts: &CheckOptions,
) -> Result<BTreeMap<(usize, usize), RegularityVerdict>> {
    let empty = BitMatrix::zeros(g.n());
    let results: Vec<Result<((usize, usize), RegularityVerdict)>> = g
        .pattern()
        .edges()
        .par_iter()
        .map(|&(i, j)| {
            let block = g.block(i, j).unwrap_or(&empty);
            check_block(block, params, mode, opts, &format!("block:{i}-{j}")).map(|v| ((i, j), v))
        })
        .collect();
    results.into_iter().collect()
}

/// Membership in `G(H, n, m, eps, lambda)`: every verdict certified and every
/// pattern block holding exactly `m` edges.
pub fn is_member(g: &BlowupGraph, m: usize, verdicts: &BTreeMap<(usize, usize), RegularityVerdict>) -> bool {
    g.pattern()
        .edges()
        .iter()
        .all(|&(i, j)| g.block_edge_count(i, j) == m && verdicts.get(&(i, j)).is_some_and(|v| v.is_regular()))
}
