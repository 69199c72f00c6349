//! Exact counts of vector partitions `p(C, k)`.
//!
//! A strict partition of `k` is a multiset of primitive vectors of the cone
//! summing to `k`; non-strict partitions allow any nonzero lattice vectors.
//! Counts come from an unbounded-knapsack recursion over the order interval
//! `{m : m ∈ C, k - m ∈ C}` with parts in the outer loop.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{dot_i, is_primitive, rat};
use crate::cap::solve_cap;
use crate::cone::PolyhedralCone;
use crate::error::{check_dim, Error, Result};
use crate::latt::TruncatedConeQuery;
use crate::multiset::GeneratorMultiset;
use crate::zeta::{c_nonstrict, c_strict};

/// Default cap on order-interval states.
pub const DEFAULT_STATE_BUDGET: u128 = 10_000_000;
/// Largest partition list [`enumerate_partitions`] will build.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

fn decimal<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_str_radix(10))
}

/// `p(C, k)` with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionCount {
    pub k: Vec<i64>,
    pub strict: bool,
    #[serde(serialize_with = "decimal")]
    pub count: BigUint,
    pub parts_used: usize,
}

/// Lattice points of an order interval, sorted by `(w·m, lex)` for a fixed
/// integer `w` in the open dual, with dense box indexing.
#[derive(Clone, Debug)]
pub struct OrderInterval {
    pub points: Vec<Vec<i64>>,
    lo: Vec<i64>,
    extent: Vec<i64>,
    slot: Vec<u32>,
}

impl OrderInterval {
    /// Lattice points `m` with `m ∈ C` and `k - m ∈ C`, including `0` and `k`.
    ///
    /// # Errors
    /// `k` outside the cone or more than `budget` states.
    pub fn new(cone: &PolyhedralCone, k: &[i64], budget: u128) -> Result<Self> {
        check_dim(cone.dim(), k.len())?;
        if !cone.contains(k)? {
            return Err(Error::InvalidInput(format!("{k:?} is not in the cone")));
        }
        let d = cone.dim();
        let w = cone.interior_dual_vector();
        let level = dot_i(&w, k);
        let mut points = vec![vec![0i64; d]];
        if level > 0 {
            let wf: Vec<f64> = w.iter().map(|&x| x as f64).collect();
            let q = TruncatedConeQuery::new(cone, &wf, level as f64, false)?;
            let mut rest = vec![0i64; d];
            q.for_each_point(budget, |m, _| {
                for i in 0..d {
                    rest[i] = k[i] - m[i];
                }
                if cone.contains(&rest).unwrap_or(false) {
                    points.push(m.to_vec());
                }
            })?;
        }
        if points.len() as u128 > budget {
            return Err(Error::Budget {
                what: "order-interval states",
                needed: points.len() as u128,
                budget,
            });
        }
        points.sort_by(|a, b| dot_i(&w, a).cmp(&dot_i(&w, b)).then_with(|| a.cmp(b)));
        let lo: Vec<i64> = (0..d).map(|i| points.iter().map(|p| p[i]).min().unwrap()).collect();
        let hi: Vec<i64> = (0..d).map(|i| points.iter().map(|p| p[i]).max().unwrap()).collect();
        let extent: Vec<i64> = lo.iter().zip(&hi).map(|(a, b)| b - a + 1).collect();
        let cells: u128 = extent.iter().map(|&e| e as u128).product();
        if cells > 16 * budget.max(1 << 20) {
            return Err(Error::Budget {
                what: "order-interval box cells",
                needed: cells,
                budget: 16 * budget.max(1 << 20),
            });
        }
        let mut slot = vec![u32::MAX; cells as usize];
        let mut out = Self {
            points: Vec::new(),
            lo,
            extent,
            slot: Vec::new(),
        };
        for (i, p) in points.iter().enumerate() {
            let c = out.cell(p).expect("inside box");
            slot[c] = i as u32;
        }
        out.points = points;
        out.slot = slot;
        Ok(out)
    }

    fn cell(&self, m: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for i in 0..m.len() {
            let off = m[i] - self.lo[i];
            if off < 0 || off >= self.extent[i] {
                return None;
            }
            idx = idx * self.extent[i] as usize + off as usize;
        }
        Some(idx)
    }

    /// Position of `m` in [`Self::points`].
    pub fn index_of(&self, m: &[i64]) -> Option<usize> {
        let c = self.cell(m)?;
        let s = self.slot[c];
        (s != u32::MAX).then_some(s as usize)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Counts `p(C, m)` for every `m` in an order interval.
#[derive(Clone, Debug)]
pub struct PartitionTable {
    pub interval: OrderInterval,
    pub counts: Vec<BigUint>,
    pub strict: bool,
    pub parts: Vec<Vec<i64>>,
}

impl PartitionTable {
    /// Run the recursion over the order interval of `k`.
    ///
    /// # Errors
    /// `k` outside the cone or budget exceeded.
    pub fn new(cone: &PolyhedralCone, k: &[i64], strict: bool, budget: u128) -> Result<Self> {
        let interval = OrderInterval::new(cone, k, budget)?;
        let d = cone.dim();
        let mut parts: Vec<Vec<i64>> = interval
            .points
            .iter()
            .filter(|p| p.iter().any(|&x| x != 0) && (!strict || is_primitive(p)))
            .cloned()
            .collect();
        parts.sort();
        let n = interval.len();
        let mut counts = vec![BigUint::zero(); n];
        counts[0] = BigUint::from(1u32);
        let mut diff = vec![0i64; d];
        for p in &parts {
            let start = interval.index_of(p).expect("part in interval");
            for i in start..n {
                let m = &interval.points[i];
                for j in 0..d {
                    diff[j] = m[j] - p[j];
                }
                let Some(src) = interval.index_of(&diff) else {
                    continue;
                };
                let (head, tail) = counts.split_at_mut(i);
                if !head[src].is_zero() {
                    tail[0] += &head[src];
                }
            }
        }
        Ok(Self {
            interval,
            counts,
            strict,
            parts,
        })
    }

    /// `p(C, m)`, or `None` outside the interval.
    pub fn get(&self, m: &[i64]) -> Option<&BigUint> {
        self.interval.index_of(m).map(|i| &self.counts[i])
    }
}

/// `p(C, k)` (strict) or the non-strict count.
///
/// # Errors
/// `k` outside the cone or more than [`DEFAULT_STATE_BUDGET`] states.
pub fn count_partitions(cone: &PolyhedralCone, k: &[i64], strict: bool) -> Result<PartitionCount> {
    count_partitions_with_budget(cone, k, strict, DEFAULT_STATE_BUDGET)
}

/// [`count_partitions`] with an explicit state budget.
pub fn count_partitions_with_budget(
    cone: &PolyhedralCone,
    k: &[i64],
    strict: bool,
    budget: u128,
) -> Result<PartitionCount> {
    let t = PartitionTable::new(cone, k, strict, budget)?;
    Ok(PartitionCount {
        k: k.to_vec(),
        strict,
        count: t.get(k).cloned().unwrap_or_default(),
        parts_used: t.parts.len(),
    })
}

/// All partitions of `k`, each as a multiset of parts.
///
/// # Errors
/// More than [`ENUMERATION_LIMIT`] partitions, or the count errors.
pub fn enumerate_partitions(cone: &PolyhedralCone, k: &[i64], strict: bool) -> Result<Vec<GeneratorMultiset>> {
    let t = PartitionTable::new(cone, k, strict, DEFAULT_STATE_BUDGET)?;
    let total = t.get(k).cloned().unwrap_or_default();
    if total > BigUint::from(ENUMERATION_LIMIT) {
        return Err(Error::Budget {
            what: "partitions",
            needed: total.to_u128().unwrap_or(u128::MAX),
            budget: ENUMERATION_LIMIT as u128,
        });
    }
    let d = cone.dim();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn dfs(
        t: &PartitionTable,
        cone: &PolyhedralCone,
        from: usize,
        rest: Vec<i64>,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if rest.iter().all(|&x| x == 0) {
            out.push(chosen.clone());
            return;
        }
        for j in from..t.parts.len() {
            let p = &t.parts[j];
            let r: Vec<i64> = rest.iter().zip(p).map(|(a, b)| a - b).collect();
            if !cone.contains(&r).unwrap_or(false) {
                continue;
            }
            if t.get(&r).is_none_or(Zero::is_zero) {
                continue;
            }
            chosen.push(j);
            dfs(t, cone, j, r, chosen, out);
            chosen.pop();
        }
    }
    let mut raw = Vec::new();
    dfs(&t, cone, 0, k.to_vec(), &mut chosen, &mut raw);
    for sel in raw {
        let vecs = sel.iter().map(|&j| t.parts[j].clone());
        out.push(if strict {
            GeneratorMultiset::from_entries(d, vecs.map(|v| (v, 1)))?
        } else {
            GeneratorMultiset::from_vectors_unchecked(d, vecs)
        });
    }
    Ok(out)
}

/// Canonical primitive multiset of a list of nonzero vectors.
pub fn canonicalize(d: usize, vectors: &[Vec<i64>]) -> Result<GeneratorMultiset> {
    GeneratorMultiset::canonicalize(d, vectors)
}

/// Natural logarithm of a big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// One row of the growth sequence.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub n: u64,
    #[serde(serialize_with = "decimal")]
    pub count: BigUint,
    /// `n^(-d/(d+1)) log p(C, n k)`.
    pub a_n: f64,
}

/// Exact counts along the ray `n k` with the predicted limit of `a_n`.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthSequence {
    pub strict: bool,
    pub rows: Vec<GrowthRow>,
    /// `c_d q(C, k)` (strict) or `c'_d q(C, k)` (non-strict reference).
    pub limit: f64,
    /// `c_d ((d+1)!)^(-1/(d+1)) (Λ(u) + u·k)` with the model normalization of `u`.
    pub limit_from_laplace: f64,
}

/// `a_n = n^(-d/(d+1)) log p(C, n k)` for `n = 1..=n_max` from a single table.
///
/// # Errors
/// `k` not interior, or budgets exceeded.
pub fn growth_sequence(cone: &PolyhedralCone, k: &[i64], n_max: u64, strict: bool) -> Result<GrowthSequence> {
    let d = cone.dim();
    let big: Vec<i64> = k.iter().map(|&x| x * n_max as i64).collect();
    let t = PartitionTable::new(cone, &big, strict, DEFAULT_STATE_BUDGET)?;
    let e = d as f64 / (d as f64 + 1.0);
    let rows = (1..=n_max)
        .map(|n| {
            let m: Vec<i64> = k.iter().map(|&x| x * n as i64).collect();
            let count = t.get(&m).cloned().unwrap_or_default();
            let a_n = (n as f64).powf(-e) * ln_big(&count);
            GrowthRow { n, count, a_n }
        })
        .collect();
    let kr: Vec<_> = k.iter().map(|&x| rat(x, 1)).collect();
    let cap = solve_cap(cone, &kr)?;
    let c = if strict { c_strict(d) } else { c_nonstrict(d) };
    let lap = cone.laplace_value(&cap.u_model)?;
    let uk: f64 = cap.u_model.iter().zip(k).map(|(a, &b)| a * b as f64).sum();
    let fact = crate::arith::factorial(d + 1);
    Ok(GrowthSequence {
        strict,
        rows,
        limit: c * cap.q,
        limit_from_laplace: c * fact.powf(-1.0 / (d as f64 + 1.0)) * (lap + uk),
    })
}

/// Independent brute-force count: number of ways to write `k` as a multiset of
/// the given parts, by recursion over parts with explicit multiplicities.
pub fn brute_force_count(parts: &[Vec<i64>], k: &[i64], cone: &PolyhedralCone) -> u64 {
    fn rec(parts: &[Vec<i64>], i: usize, rest: &mut Vec<i64>, cone: &PolyhedralCone, memo: &mut HashMap<(usize, Vec<i64>), u64>) -> u64 {
        if rest.iter().all(|&x| x == 0) {
            return 1;
        }
        if i == parts.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(i, rest.clone())) {
            return v;
        }
        let saved = rest.clone();
        let mut total = 0;
        loop {
            total += rec(parts, i + 1, rest, cone, memo);
            for (r, p) in rest.iter_mut().zip(&parts[i]) {
                *r -= p;
            }
            if !cone.contains(rest).unwrap_or(false) {
                break;
            }
        }
        *rest = saved;
        memo.insert((i, rest.clone()), total);
        total
    }
    rec(parts, 0, &mut k.to_vec(), cone, &mut HashMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthant2() -> PolyhedralCone {
        PolyhedralCone::orthant(2).unwrap()
    }

    fn count(c: &PolyhedralCone, k: &[i64], strict: bool) -> u64 {
        count_partitions(c, k, strict).unwrap().count.to_u64().unwrap()
    }

    #[test]
    fn small_values() {
        let c = orthant2();
        assert_eq!(count(&c, &[1, 1], true), 2);
        assert_eq!(count(&c, &[2, 2], true), 5);
        assert_eq!(count(&c, &[2, 2], false), 9);
        assert_eq!(count(&c, &[1, 0], true), 1);
        assert_eq!(count(&c, &[0, 0], true), 1);
    }

    #[test]
    fn enumerations() {
        let c = orthant2();
        let e = enumerate_partitions(&c, &[1, 1], true).unwrap();
        assert_eq!(e.len(), 2);
        let e = enumerate_partitions(&c, &[2, 2], true).unwrap();
        assert_eq!(e.len(), 5);
        let a = GeneratorMultiset::from_entries(2, [(vec![1, 0], 2), (vec![0, 1], 2)]).unwrap();
        let b = GeneratorMultiset::from_entries(2, [(vec![2, 1], 1), (vec![0, 1], 1)]).unwrap();
        assert!(e.contains(&a) && e.contains(&b));
        for w in &e {
            assert_eq!(w.endpoint(), vec![2, 2]);
        }
        assert_eq!(enumerate_partitions(&c, &[2, 2], false).unwrap().len(), 9);
        let one = enumerate_partitions(&c, &[1, 0], true).unwrap();
        assert_eq!(one, vec![GeneratorMultiset::from_entries(2, [(vec![1, 0], 1)]).unwrap()]);
    }

    #[test]
    fn matches_brute_force_on_wedge() {
        let c = PolyhedralCone::new(vec![vec![1, 0], vec![1, 2]]).unwrap();
        for x in 0..=4 {
            for y in 0..=4 {
                let k = [x, y];
                if !c.contains(&k).unwrap() {
                    continue;
                }
                let t = PartitionTable::new(&c, &k, true, DEFAULT_STATE_BUDGET).unwrap();
                let b = brute_force_count(&t.parts, &k, &c);
                assert_eq!(t.get(&k).unwrap().to_u64().unwrap(), b, "{k:?}");
            }
        }
    }

    #[test]
    fn first_term_of_growth_sequence() {
        let s = growth_sequence(&orthant2(), &[1, 1], 4, true).unwrap();
        assert!((s.rows[0].a_n - 2f64.ln()).abs() < 1e-15);
        assert!((s.limit - s.limit_from_laplace).abs() < 1e-12);
        assert!((s.limit - 2.702_174_8).abs() < 1e-6, "{}", s.limit);
    }

    #[test]
    fn big_logs() {
        let x = BigUint::from(3u32).pow(2000);
        assert!((ln_big(&x) - 2000.0 * 3f64.ln()).abs() < 1e-9);
    }
}
