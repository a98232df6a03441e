//! Brute-force reference implementations shared by the integration tests.
//! Nothing here calls into the counting, regularity or constants code.
#![allow(dead_code, clippy::too_many_arguments, clippy::excessive_precision)]

use klr_lab::bits::BitMatrix;
use klr_lab::blowup::{BlowupGraph, Edge};
use klr_lab::pattern::PatternGraph;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Calls `f` on every tuple in `0..n` of length `k`.
fn for_tuples(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if n == 0 && k > 0 {
        return;
    }
    let mut t = vec![0usize; k];
    loop {
        f(&t);
        let mut i = 0;
        loop {
            if i == k {
                return;
            }
            t[i] += 1;
            if t[i] < n {
                break;
            }
            t[i] = 0;
            i += 1;
        }
    }
}

/// Whether tuple `t` is a copy of `pattern` with vertex `w` in part `parts[w]`.
fn is_copy(g: &BlowupGraph, pattern: &PatternGraph, parts: &[usize], t: &[usize]) -> bool {
    for x in 0..t.len() {
        for y in x + 1..t.len() {
            if parts[x] == parts[y] && t[x] == t[y] {
                return false;
            }
        }
    }
    pattern
        .edges()
        .iter()
        .all(|&(x, y)| g.has_edge(&Edge::new(parts[x], parts[y], t[x], t[y])))
}

/// Copies of `pattern` (vertex `w` in part `parts[w]`, distinct within a part)
/// by enumerating all `n^k` tuples.
pub fn tuple_count_mapped(g: &BlowupGraph, pattern: &PatternGraph, parts: &[usize]) -> u128 {
    let mut count = 0u128;
    for_tuples(g.n(), pattern.k(), |t| {
        if is_copy(g, pattern, parts, t) {
            count += 1;
        }
    });
    count
}

pub fn tuple_count(g: &BlowupGraph, h: &PatternGraph) -> u128 {
    let parts: Vec<usize> = (0..h.k()).collect();
    tuple_count_mapped(g, h, &parts)
}

/// `deg(u, v)` over parts `(a, b)`, row-major by the `V_a` vertex.
pub fn tuple_degrees(g: &BlowupGraph, h: &PatternGraph, a: usize, b: usize) -> Vec<u64> {
    let n = g.n();
    let parts: Vec<usize> = (0..h.k()).collect();
    let mut deg = vec![0u64; n * n];
    for_tuples(n, h.k(), |t| {
        if is_copy(g, h, &parts, t) {
            deg[t[a] * n + t[b]] += 1;
        }
    });
    deg
}

/// Edge count between row set `rows` and column set `cols`, bit by bit.
fn edges_between(block: &BitMatrix, rows: u64, cols: u64) -> u64 {
    let n = block.n();
    let mut e = 0;
    for u in 0..n {
        if rows >> u & 1 == 0 {
            continue;
        }
        for v in 0..n {
            if cols >> v & 1 == 1 && block.get(u, v) {
                e += 1;
            }
        }
    }
    e
}

/// Definition of `(eps, lambda)`-lower-regularity checked over every pair of
/// subsets with both sides of size at least `a0`, in exact integer arithmetic
/// with `lambda` read as a decimal. Returns the first violating pair of masks.
pub fn brute_constant_violation(block: &BitMatrix, a0: usize, lambda: &str) -> Option<(u64, u64)> {
    let n = block.n();
    assert!(n <= 16);
    let lam = decimal(lambda);
    let p = lam.numer().to_u128().unwrap();
    let q = lam.denom().to_u128().unwrap();
    let full = (1u64 << n) - 1;
    let total = edges_between(block, full, full) as u128;
    let nn = (n * n) as u128;
    for rows in 1u64..=full {
        let s = rows.count_ones() as u128;
        if (s as usize) < a0 {
            continue;
        }
        for cols in 1u64..=full {
            let t = cols.count_ones() as u128;
            if (t as usize) < a0 {
                continue;
            }
            // d(A', B') >= lambda d(A, B), cleared of denominators
            let e = edges_between(block, rows, cols) as u128;
            if e * nn * q < p * total * s * t {
                return Some((rows, cols));
            }
        }
    }
    None
}

/// The function form: `d(A', B') > delta(min(s, t)/n) d(A, B)`.
pub fn brute_function_violation(block: &BitMatrix, a0: usize, delta: impl Fn(f64) -> f64) -> Option<(u64, u64)> {
    let n = block.n();
    assert!(n <= 16);
    let total = edges_between(block, (1 << n) - 1, (1 << n) - 1) as f64;
    let nn = (n * n) as f64;
    for rows in 1u64..1 << n {
        let s = rows.count_ones() as usize;
        if s < a0 {
            continue;
        }
        for cols in 1u64..1 << n {
            let t = cols.count_ones() as usize;
            if t < a0 {
                continue;
            }
            let e = edges_between(block, rows, cols) as f64;
            let alpha = s.min(t) as f64 / n as f64;
            if e * nn <= delta(alpha) * total * (s * t) as f64 {
                return Some((rows, cols));
            }
        }
    }
    None
}

/// `ceil(eps n)` computed in exact rationals from a decimal string for `eps`.
pub fn exact_min_size(eps: &str, n: usize) -> usize {
    let e = decimal(eps) * BigRational::from_integer(BigInt::from(n));
    let c = e.ceil().to_integer().to_usize().unwrap();
    c.clamp(1, n.max(1))
}

/// All subgraphs `F` of `h` as `(vertex mask, edge subset)`, by brute force.
fn for_subgraphs(h: &PatternGraph, mut f: impl FnMut(usize, usize)) {
    let edges = h.edges();
    for vmask in 1u64..1 << h.k() {
        let v = vmask.count_ones() as usize;
        let inside: Vec<usize> = (0..edges.len())
            .filter(|&i| vmask >> edges[i].0 & 1 == 1 && vmask >> edges[i].1 & 1 == 1)
            .collect();
        for emask in 0u64..1 << inside.len() {
            f(v, emask.count_ones() as usize);
        }
    }
}

/// `m_2(h)` as `(numerator, denominator)` in lowest terms, floored at `1/2`.
pub fn brute_two_density(h: &PatternGraph) -> (i64, i64) {
    let mut best = BigRational::new(BigInt::from(1), BigInt::from(2));
    for_subgraphs(h, |v, e| {
        if v > 2 {
            let r = BigRational::new(BigInt::from(e as i64 - 1), BigInt::from(v as i64 - 2));
            if r > best {
                best = r;
            }
        }
    });
    (best.numer().to_i64().unwrap(), best.denom().to_i64().unwrap())
}

/// `ln Phi(h, m)` over every subgraph with at least one edge.
pub fn brute_ln_phi(h: &PatternGraph, n: u64, m: u64) -> f64 {
    let mut best = f64::INFINITY;
    let p = (m as f64) / ((n * n) as f64);
    for_subgraphs(h, |v, e| {
        if e > 0 {
            best = best.min(v as f64 * (n as f64).ln() + e as f64 * p.ln());
        }
    });
    best
}

/// Parses a plain decimal such as `0.125` or `3` into an exact rational.
pub fn decimal(s: &str) -> BigRational {
    let (neg, s) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let digits: BigInt = format!("{int}{frac}").parse().unwrap();
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(digits, scale);
    if neg {
        -r
    } else {
        r
    }
}

fn pow_int(base: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(base.clone(), e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

/// The rational part of the constants chain, in exact arithmetic.
pub struct ExactChain {
    pub beta1: BigRational,
    pub beta2: BigRational,
    pub xi_p: BigRational,
    pub z: BigInt,
    pub xi: BigRational,
    pub gamma_p: BigRational,
    pub gamma: BigRational,
    pub m_p: BigRational,
}

/// Inputs as decimal strings: `lambda, beta, eps, xi_pp, gamma_pp, t`.
pub fn exact_chain(
    e_sub: i64,
    lambda: &str,
    beta: &str,
    eps: &str,
    xi_pp: &str,
    gamma_pp: &str,
    t: &str,
    m: u64,
) -> ExactChain {
    let (lambda, beta, eps) = (decimal(lambda), decimal(beta), decimal(eps));
    let (xi_pp, gamma_pp, t) = (decimal(xi_pp), decimal(gamma_pp), decimal(t));
    let int = |x: i64| BigRational::from_integer(BigInt::from(x));
    let beta1 = &beta * pow_int(&int(3), -e_sub);
    let beta2 = &beta1 * &beta1 * pow_int(&int(2), -4 * e_sub);
    let a = &xi_pp / int(2);
    let b = &lambda * &eps * &eps / int(4);
    let xi_p = if a < b { a } else { b };
    let ratio = int(4) * &t / (&gamma_pp * &gamma_pp);
    let z = ratio.ceil().to_integer();
    let two_z = BigRational::from_integer(BigInt::from(2) * &z);
    let xi = &xi_p / &two_z;
    let gamma_p = &gamma_pp * &lambda * &eps * &eps / int(8);
    let gamma = &gamma_p / pow_int(&two_z, e_sub);
    let m_p = BigRational::from_integer(BigInt::from(m)) / &two_z;
    ExactChain {
        beta1,
        beta2,
        xi_p,
        z,
        xi,
        gamma_p,
        gamma,
        m_p,
    }
}

/// `|x - exact| / |exact|`, with the exact value rounded only at the end.
pub fn rel_err(x: f64, exact: &BigRational) -> f64 {
    if exact.is_zero() {
        return x.abs();
    }
    let approx = BigRational::from_float(x).expect("finite");
    ((approx - exact).abs() / exact.abs()).to_f64().unwrap()
}

/// `ln` of a positive rational, accurate far beyond `f64` range.
pub fn ln_rational(x: &BigRational) -> f64 {
    assert!(x.is_positive());
    let (num, den) = (x.numer(), x.denom());
    ln_bigint(num) - ln_bigint(den)
}

fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 60;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// `(lambda, beta, d0)` with `d0 = (lambda/4e)(beta/2)^{1/lambda}`, evaluated
/// at 40 significant digits and rounded.
pub const D0_REFERENCE: &[(f64, f64, f64)] = &[
    (0.25, 0.25, 5.6133947932654162841e-6),
    (0.25, 0.5, 0.000089814316692246660546),
    (0.25, 0.9, 0.00094283477090852854375),
    (0.5, 0.25, 0.00071851453353797328437),
    (0.5, 0.5, 0.0028740581341518931375),
    (0.5, 0.9, 0.0093119483546521337654),
    (0.75, 0.25, 0.0043110872012278397062),
    (0.75, 0.5, 0.010863259025518660276),
    (0.75, 0.9, 0.023786112860438524623),
];
