//! Exact combinatorics of Wick contractions: perfect matchings of field
//! insertions, no-self-loop matchings of two-leg vertices (normal ordering),
//! cycle-partition weights for moments of quadratic operators, and the
//! moment/cumulant conversion.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// A perfect matching of the index set {0, .., 2n-1}: n disjoint unordered
/// pairs. Pairs are stored canonically, smallest free index first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    pub pairs: Vec<(usize, usize)>,
}

/// (2n-1)!! = 1 * 3 * 5 * ... * (2n-1), the number of perfect matchings of
/// 2n points. By convention the empty product (n = 0) is 1.
pub fn odd_double_factorial(n: u32) -> u128 {
    (0..n).fold(1u128, |acc, k| acc * (2 * k + 1) as u128)
}

const MAX_PAIRING_N: usize = 8;

/// All perfect matchings of {0, .., 2n-1} in canonical order: the list has
/// exactly (2n-1)!! entries.
pub fn enumerate_pairings(n: usize) -> Result<Vec<Pairing>> {
    if n == 0 || n > MAX_PAIRING_N {
        return Err(Error::CapacityExceeded {
            what: "enumerate_pairings",
            max: MAX_PAIRING_N,
            got: n,
        });
    }
    let mut out = Vec::with_capacity(odd_double_factorial(n as u32) as usize);
    let mut used = vec![false; 2 * n];
    let mut current = Vec::with_capacity(n);
    fn rec(
        used: &mut [bool],
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Pairing>,
        forbid_same_vertex: bool,
    ) {
        let a = match used.iter().position(|&u| !u) {
            Some(a) => a,
            None => {
                out.push(Pairing {
                    pairs: current.clone(),
                });
                return;
            }
        };
        used[a] = true;
        for b in (a + 1)..used.len() {
            if used[b] || (forbid_same_vertex && b / 2 == a / 2) {
                continue;
            }
            used[b] = true;
            current.push((a, b));
            rec(used, current, out, forbid_same_vertex);
            current.pop();
            used[b] = false;
        }
        used[a] = false;
    }
    rec(&mut used, &mut current, &mut out, false);
    Ok(out)
}

/// Gaussian even moment <x^{2n}> = (2n-1)!! variance^n.
pub fn gaussian_moment(n: u32, variance: f64) -> f64 {
    odd_double_factorial(n) as f64 * variance.powi(n as i32)
}

/// Zero-mean Gaussian density (2 pi v)^{-1/2} exp(-x^2 / 2v); the unique
/// density whose even moments are (2n-1)!! v^n. Requires variance > 0.
pub fn gaussian_density(x: f64, variance: f64) -> f64 {
    (2.0 * PI * variance).sqrt().recip() * (-x * x / (2.0 * variance)).exp()
}

/// A pairing of the 2n legs of n two-leg vertices (legs 2i and 2i+1 belong
/// to vertex i) in which no pair joins two legs of the same vertex: the
/// contractions that survive normal ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexMatching {
    pub pairs: Vec<(usize, usize)>,
}

impl VertexMatching {
    /// Lengths of the vertex cycles traced out by the matching, descending.
    /// Every two-leg vertex has degree two, so the contraction graph is a
    /// disjoint union of cycles (a double edge counts as a 2-cycle).
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let n = self.pairs.len();
        // incident pair indices per vertex
        let mut incident: Vec<Vec<usize>> = vec![Vec::with_capacity(2); n];
        for (pi, &(a, b)) in self.pairs.iter().enumerate() {
            incident[a / 2].push(pi);
            incident[b / 2].push(pi);
        }
        let mut seen_pair = vec![false; n];
        let mut seen_vertex = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if seen_vertex[start] {
                continue;
            }
            let mut len = 0;
            let mut v = start;
            let mut pair = incident[start][0];
            loop {
                seen_vertex[v] = true;
                seen_pair[pair] = true;
                len += 1;
                let (a, b) = self.pairs[pair];
                let next = if a / 2 == v { b / 2 } else { a / 2 };
                let leave = incident[next]
                    .iter()
                    .copied()
                    .find(|&q| !seen_pair[q]);
                v = next;
                match leave {
                    Some(q) => pair = q,
                    None => break,
                }
            }
            lengths.push(len);
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        lengths
    }
}

const MAX_MATCHING_N: usize = 6;

/// All no-self-loop leg pairings of n two-leg vertices, canonical order.
pub fn enumerate_vertex_matchings(n: usize) -> Result<Vec<VertexMatching>> {
    if n == 0 || n > MAX_MATCHING_N {
        return Err(Error::CapacityExceeded {
            what: "enumerate_vertex_matchings",
            max: MAX_MATCHING_N,
            got: n,
        });
    }
    // reuse the pairing generator with the same-vertex exclusion switched on
    let mut out = Vec::new();
    let mut used = vec![false; 2 * n];
    let mut current = Vec::with_capacity(n);
    fn rec(used: &mut [bool], current: &mut Vec<(usize, usize)>, out: &mut Vec<VertexMatching>) {
        let a = match used.iter().position(|&u| !u) {
            Some(a) => a,
            None => {
                out.push(VertexMatching {
                    pairs: current.clone(),
                });
                return;
            }
        };
        used[a] = true;
        for b in (a + 1)..used.len() {
            if used[b] || b / 2 == a / 2 {
                continue;
            }
            used[b] = true;
            current.push((a, b));
            rec(used, current, out);
            current.pop();
            used[b] = false;
        }
        used[a] = false;
    }
    rec(&mut used, &mut current, &mut out);
    Ok(out)
}

fn binomial_u128(n: u32, k: u32) -> u128 {
    let k = k.min(n - k);
    let mut num = 1u128;
    for i in 0..k {
        num = num * (n - i) as u128 / (i + 1) as u128;
    }
    num
}

/// Inclusion-exclusion count of no-self-loop matchings:
/// sum_k (-1)^k C(n,k) (2n - 2k - 1)!!.
pub fn matching_count_formula(n: u32) -> u128 {
    let mut total = 0i128;
    for k in 0..=n {
        let term = (binomial_u128(n, k) * odd_double_factorial(n - k)) as i128;
        total += if k % 2 == 0 { term } else { -term };
    }
    total as u128
}

/// The number of Wick contractions forming one closed cycle through `len`
/// two-leg vertices: 2^{len-1} (len-1)!.
pub fn cycle_weight(len: usize) -> u128 {
    let fact = (1..len as u128).product::<u128>();
    (1u128 << (len - 1)) * fact
}

/// A partition of n vertices into cycles of length >= 2, with the number of
/// leg matchings realizing exactly this block structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclePartition {
    /// Vertex blocks, each of size >= 2; blocks ordered by smallest member.
    pub blocks: Vec<Vec<usize>>,
    /// Product over blocks of 2^{len-1} (len-1)!.
    pub multiplicity: u128,
}

const MAX_CYCLE_N: usize = 12;

/// Every set partition of {0, .., n-1} into blocks of size >= 2, each with
/// its matching multiplicity. The multiplicities sum to the no-self-loop
/// matching count.
pub fn cycle_partitions(n: usize) -> Result<Vec<CyclePartition>> {
    if n == 0 || n > MAX_CYCLE_N {
        return Err(Error::CapacityExceeded {
            what: "cycle_partitions",
            max: MAX_CYCLE_N,
            got: n,
        });
    }
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    fn rec(remaining: &[usize], blocks: &mut Vec<Vec<usize>>, out: &mut Vec<CyclePartition>) {
        if remaining.is_empty() {
            let multiplicity = blocks.iter().map(|b| cycle_weight(b.len())).product();
            out.push(CyclePartition {
                blocks: blocks.clone(),
                multiplicity,
            });
            return;
        }
        let head = remaining[0];
        let rest = &remaining[1..];
        // choose the non-empty companion set of the block containing `head`
        let m = rest.len();
        for mask in 1u32..(1 << m) {
            let mut block = vec![head];
            let mut left = Vec::with_capacity(m);
            for (i, &v) in rest.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    block.push(v);
                } else {
                    left.push(v);
                }
            }
            blocks.push(block);
            rec(&left, blocks, out);
            blocks.pop();
        }
    }
    let all: Vec<usize> = (0..n).collect();
    rec(&all, &mut blocks, &mut out);
    Ok(out)
}

/// Moments mu_1..mu_k and cumulants kappa_1..kappa_k of one distribution;
/// entry i corresponds to order i + 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    pub moments: Vec<f64>,
    pub cumulants: Vec<f64>,
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut b = 1.0f64;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

/// Raw moments from cumulants via the standard recursion
/// mu_n = sum_{k=0}^{n-1} C(n-1, k) kappa_{k+1} mu_{n-1-k}, mu_0 = 1.
pub fn moments_from_cumulants(kappas: &[f64]) -> MomentSet {
    let k = kappas.len();
    let mut mu = vec![0.0; k + 1];
    mu[0] = 1.0;
    for n in 1..=k {
        let mut acc = 0.0;
        for j in 0..n {
            acc += binomial_f64(n - 1, j) * kappas[j] * mu[n - 1 - j];
        }
        mu[n] = acc;
    }
    MomentSet {
        moments: mu[1..].to_vec(),
        cumulants: kappas.to_vec(),
    }
}

/// Cumulants from raw moments (inverse of [`moments_from_cumulants`]).
pub fn cumulants_from_moments(moments: &[f64]) -> MomentSet {
    let k = moments.len();
    let mut mu = vec![1.0; k + 1];
    mu[1..].copy_from_slice(moments);
    let mut kappa = vec![0.0; k];
    for n in 1..=k {
        let mut acc = mu[n];
        for j in 0..(n - 1) {
            acc -= binomial_f64(n - 1, j) * kappa[j] * mu[n - 1 - j];
        }
        kappa[n - 1] = acc;
    }
    MomentSet {
        moments: moments.to_vec(),
        cumulants: kappa,
    }
}
