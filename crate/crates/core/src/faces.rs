//! Face and tower counts of integral zonotopes.
//!
//! The `k`-cells of the central arrangement `A^c(T)` with normals the
//! generator directions correspond to the `(d-k)`-faces of `T`. For `d = 3`
//! the arrangement is sliced by an affine plane `c·x = 1`; the resulting line
//! arrangement is counted with exact rational intersection points and the
//! central counts are recovered from the cells that the slice sees twice.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{binomial, gcd_slice, line_key, Rational};
use crate::cone::PolyhedralCone;
use crate::error::{Error, Result};
use crate::gibbs::GibbsModel;
use crate::hull::convex_hull;
use crate::linalg::rank_i64;
use crate::multiset::GeneratorMultiset;
use crate::rng::Stream;

/// Largest number of distinct generators accepted by [`hull_oracle`].
pub const HULL_ORACLE_LIMIT: usize = 12;
/// Seed of the sequence of candidate slicing planes.
const SLICE_SEED: u64 = 0x5eed_c0de;
/// Candidate slicing planes tried before giving up.
const SLICE_ATTEMPTS: usize = 1000;

/// How a face vector was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FaceMethod {
    Arrangement,
    HullOracle,
    BuckGeneric,
}

/// `f_0, ..., f_{d-1}` and the number of towers `F(T)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceVector {
    pub f: Vec<u64>,
    pub towers: u64,
    pub method: FaceMethod,
}

impl FaceVector {
    /// `Σ (-1)^i f_i`.
    pub fn euler_characteristic(&self) -> i64 {
        self.f
            .iter()
            .enumerate()
            .map(|(i, &x)| if i % 2 == 0 { x as i64 } else { -(x as i64) })
            .sum()
    }
}

/// Cell counts of a central plane arrangement in `R^3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArrangementCounts {
    /// Number of distinct planes.
    pub m: usize,
    pub rays: u64,
    pub two_cells: u64,
    pub chambers: u64,
    /// Flags `ray ⊂ 2-cell ⊂ chamber`.
    pub towers: u64,
    /// Cells of the affine slice: points, edges, regions.
    pub slice: [u64; 3],
    /// Normal `c` of the slicing plane `c·x = 1`.
    pub slice_normal: Vec<i64>,
}

fn cross(a: &[i64], b: &[i64]) -> [i64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

/// Count the cells of the central arrangement `{n_i^⊥}` in `R^3`.
///
/// # Errors
/// Normals of rank below 3, zero or repeated lines, or no generic slicing
/// plane in the candidate sequence.
pub fn central_arrangement_3d(normals: &[Vec<i64>]) -> Result<ArrangementCounts> {
    let m = normals.len();
    if normals.iter().any(|n| n.len() != 3) {
        return Err(Error::UnsupportedDimension(normals.first().map_or(0, Vec::len)));
    }
    let rank = rank_i64(normals);
    if rank < 3 {
        return Err(Error::Degenerate { rank, dim: 3 });
    }
    let keys: BTreeSet<Vec<i64>> = normals.iter().filter_map(|n| line_key(n)).collect();
    if keys.len() != m {
        return Err(Error::InvalidInput("normals must be nonzero and pairwise independent".into()));
    }
    // Central lines `n_i^⊥ ∩ n_j^⊥` as primitive direction vectors.
    let mut pair_lines: Vec<((usize, usize), [i64; 3])> = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            let r = cross(&normals[i], &normals[j]);
            let g = gcd_slice(&r);
            pair_lines.push(((i, j), [r[0] / g, r[1] / g, r[2] / g]));
        }
    }
    let mut rng = Stream::new(SLICE_SEED);
    for _ in 0..SLICE_ATTEMPTS {
        let c: Vec<i64> = (0..3).map(|_| rng.range_i64(-97, 97)).collect();
        if c.iter().all(|&x| x == 0) {
            continue;
        }
        // Every central line must cross the slice, and no plane may be parallel to it.
        if pair_lines.iter().any(|(_, r)| dot3(r, &c) == 0) {
            continue;
        }
        if normals.iter().any(|n| cross(n, &c).iter().all(|&x| x == 0)) {
            continue;
        }
        return Ok(count_slice(m, &pair_lines, c));
    }
    Err(Error::InvalidInput("no generic slicing plane found".into()))
}

fn count_slice(m: usize, pair_lines: &[((usize, usize), [i64; 3])], c: Vec<i64>) -> ArrangementCounts {
    // Intersection point of lines i and j in the slice: r / (c·r), exactly.
    let mut points: HashMap<[Rational; 3], BTreeSet<usize>> = HashMap::new();
    for &((i, j), r) in pair_lines {
        let s = dot3(&r, &c);
        let p = [0, 1, 2].map(|a| Rational::new((r[a] as i128).into(), s.into()));
        let e = points.entry(p).or_default();
        e.insert(i);
        e.insert(j);
    }
    let a0 = points.len() as u64;
    let incidences: u64 = points.values().map(|s| s.len() as u64).sum();
    let a1 = m as u64 + incidences;
    let a2 = 1 + a1 - a0;
    let rays = 2 * a0;
    let two_cells = 2 * a1 - 2 * m as u64;
    let chambers = 2 * a2 - 2 * m as u64;
    ArrangementCounts {
        m,
        rays,
        two_cells,
        chambers,
        // Each 2-cell has two bounding rays and lies between two chambers.
        towers: 4 * two_cells,
        slice: [a0, a1, a2],
        slice_normal: c,
    }
}

fn distinct_directions(w: &GeneratorMultiset) -> Result<Vec<Vec<i64>>> {
    let set: BTreeSet<Vec<i64>> = w
        .entries()
        .keys()
        .map(|k| line_key(k).ok_or_else(|| Error::InvalidInput("zero generator".into())))
        .collect::<Result<_>>()?;
    Ok(set.into_iter().collect())
}

/// Faces and towers of the zonotope of `w` through the arrangement duality.
///
/// # Errors
/// Generators not spanning `R^d`, or `d >= 4`.
pub fn face_counts(w: &GeneratorMultiset) -> Result<FaceVector> {
    let d = w.dim();
    let dirs = distinct_directions(w)?;
    match d {
        2 => {
            let rank = rank_i64(&dirs);
            if rank < 2 {
                return Err(Error::Degenerate { rank, dim: 2 });
            }
            let g = 2 * dirs.len() as u64;
            Ok(FaceVector {
                f: vec![g, g],
                towers: 2 * g,
                method: FaceMethod::Arrangement,
            })
        }
        3 => {
            let a = central_arrangement_3d(&dirs)?;
            Ok(FaceVector {
                f: vec![a.chambers, a.two_cells, a.rays],
                towers: a.towers,
                method: FaceMethod::Arrangement,
            })
        }
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

/// Faces and towers from the exact convex hull of all `2^m` subset sums.
///
/// # Errors
/// More than [`HULL_ORACLE_LIMIT`] distinct directions, or degenerate input.
pub fn hull_oracle(w: &GeneratorMultiset) -> Result<FaceVector> {
    let d = w.dim();
    let mut gens: HashMap<Vec<i64>, Vec<i64>> = HashMap::new();
    for (x, mult) in w.iter() {
        let key = line_key(x).ok_or_else(|| Error::InvalidInput("zero generator".into()))?;
        let e = gens.entry(key).or_insert_with(|| vec![0; d]);
        for (a, &b) in e.iter_mut().zip(x) {
            *a += mult as i64 * b;
        }
    }
    let gens: Vec<Vec<i64>> = gens.into_values().filter(|g| g.iter().any(|&x| x != 0)).collect();
    let m = gens.len();
    if m > HULL_ORACLE_LIMIT {
        return Err(Error::Budget {
            what: "hull oracle generators",
            needed: m as u128,
            budget: HULL_ORACLE_LIMIT as u128,
        });
    }
    let points: Vec<Vec<i64>> = (0..1u32 << m)
        .map(|mask| {
            let mut p = vec![0i64; d];
            for (i, g) in gens.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    for (a, &b) in p.iter_mut().zip(g) {
                        *a += b;
                    }
                }
            }
            p
        })
        .collect();
    let hull = convex_hull(&points)?;
    let towers = match d {
        2 => 2 * hull.edges.len() as u64,
        _ => hull.facets.iter().map(|f| 2 * f.cycle.len() as u64).sum(),
    };
    Ok(FaceVector {
        f: hull.face_vector(),
        towers,
        method: FaceMethod::HullOracle,
    })
}

/// Number of `i`-dimensional cells of a generic central arrangement of `m`
/// hyperplanes in `R^d`: `C(m, d-i) · 2 Σ_{k<i} C(m-d+i-1, k)` for `i >= 1`,
/// and 1 (the origin) for `i = 0`.
///
/// # Errors
/// `m < d` or `i > d`.
pub fn buck_generic(m: u64, d: u64, i: u64) -> Result<BigUint> {
    if m < d || i > d || d == 0 {
        return Err(Error::InvalidInput(format!("need d <= m and i <= d, got m={m} d={d} i={i}")));
    }
    if i == 0 {
        return Ok(BigUint::from(1u32));
    }
    let s = (0..i).fold(BigUint::zero(), |acc, k| acc + binomial(m - d + i - 1, k));
    Ok(binomial(m, d - i) * s * 2u32)
}

/// Number of `i`-dimensional faces of a generic affine arrangement of `m`
/// hyperplanes in `R^d`: `Σ_{k=d-i}^{d} C(k, d-i) C(m, k)`.
///
/// # Errors
/// `i > d`.
pub fn buck_affine(m: u64, d: u64, i: u64) -> Result<BigUint> {
    if i > d {
        return Err(Error::InvalidInput(format!("need i <= d, got d={d} i={i}")));
    }
    Ok((d - i..=d).fold(BigUint::zero(), |acc, k| acc + binomial(k, d - i) * binomial(m, k)))
}

/// The arrangement `A_r` in `R^3`: planes `z^⊥` for primitive `z` with `‖z‖ <= r`, up to sign.
#[derive(Clone, Debug, Serialize)]
pub struct ArCells {
    pub r: u32,
    pub counts: ArrangementCounts,
}

/// Normals of `A_r` in `R^3`.
pub fn a_r_normals(r: u32) -> Vec<Vec<i64>> {
    let r = r as i64;
    let mut out = Vec::new();
    for x in -r..=r {
        for y in -r..=r {
            for z in -r..=r {
                let v = vec![x, y, z];
                if x * x + y * y + z * z <= r * r && line_key(&v).as_ref() == Some(&v) && gcd_slice(&v) == 1 {
                    out.push(v);
                }
            }
        }
    }
    out
}

/// Cell counts of `A_r` for `d = 3`.
///
/// # Errors
/// `r` outside `1..=5`.
pub fn a_r_cells(r: u32) -> Result<ArCells> {
    if !(1..=5).contains(&r) {
        return Err(Error::Budget {
            what: "A_r radius",
            needed: r as u128,
            budget: 5,
        });
    }
    Ok(ArCells {
        r,
        counts: central_arrangement_3d(&a_r_normals(r))?,
    })
}

/// One row of the face statistics table.
#[derive(Clone, Debug, Serialize)]
pub struct FaceRow {
    pub n: u64,
    pub replicas: usize,
    /// `n^(d(d-1)/(d+1))`.
    pub scale: f64,
    pub f0_mean: f64,
    /// Mean, minimum and maximum of `f_0 / scale`.
    pub ratio_mean: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub generators_mean: f64,
}

/// `f_0(T) / n^(d(d-1)/(d+1))` under `P_n` for each `n`; replica `r` uses seed `seed + r`.
///
/// # Errors
/// `d ∉ {2,3}` or model failures.
pub fn face_statistics_experiment(
    cone: &PolyhedralCone,
    k: &[i64],
    ns: &[u64],
    replicas: usize,
    seed: u64,
) -> Result<Vec<FaceRow>> {
    let d = cone.dim();
    if !(2..=3).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    let mut rows = Vec::new();
    for &n in ns {
        let model = GibbsModel::new(cone, k, n)?;
        let scale = (n as f64).powf((d * (d - 1)) as f64 / (d + 1) as f64);
        let stats: Vec<Result<(u64, usize)>> = (0..replicas)
            .into_par_iter()
            .map(|r| {
                let w = model.sample(seed.wrapping_add(r as u64));
                Ok((face_counts(&w)?.f[0], w.support_size()))
            })
            .collect();
        let stats: Vec<(u64, usize)> = stats.into_iter().collect::<Result<_>>()?;
        let ratios: Vec<f64> = stats.iter().map(|s| s.0 as f64 / scale).collect();
        let rf = replicas as f64;
        rows.push(FaceRow {
            n,
            replicas,
            scale,
            f0_mean: stats.iter().map(|s| s.0 as f64).sum::<f64>() / rf,
            ratio_mean: ratios.iter().sum::<f64>() / rf,
            ratio_min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
            ratio_max: ratios.iter().copied().fold(0.0, f64::max),
            generators_mean: stats.iter().map(|s| s.1 as f64).sum::<f64>() / rf,
        });
    }
    Ok(rows)
}

/// [`buck_generic`] as `u64`, when it fits.
pub fn buck_generic_u64(m: u64, d: u64, i: u64) -> Result<u64> {
    buck_generic(m, d, i)?.to_u64().ok_or(Error::Overflow)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(d: usize, v: &[&[i64]]) -> GeneratorMultiset {
        GeneratorMultiset::from_entries(d, v.iter().map(|x| (x.to_vec(), 1))).unwrap()
    }

    #[test]
    fn planar_counts() {
        let sq = ms(2, &[&[1, 0], &[0, 1]]);
        assert_eq!(face_counts(&sq).unwrap().f, vec![4, 4]);
        assert_eq!(hull_oracle(&sq).unwrap().f, vec![4, 4]);
        let hex = ms(2, &[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(face_counts(&hex).unwrap().f, vec![6, 6]);
        assert_eq!(hull_oracle(&hex).unwrap().f, vec![6, 6]);
        assert_eq!(hull_oracle(&hex).unwrap().towers, 12);
        assert!(face_counts(&ms(2, &[&[1, 0]])).is_err());
    }

    #[test]
    fn parallelepiped_and_generic() {
        let p = ms(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let f = face_counts(&p).unwrap();
        assert_eq!(f.f, vec![8, 12, 6]);
        assert_eq!(f.towers, 48);
        assert_eq!(hull_oracle(&p).unwrap(), FaceVector { method: FaceMethod::HullOracle, ..f });
        let g4 = ms(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]]);
        assert_eq!(hull_oracle(&g4).unwrap().f[0], 14);
        assert_eq!(face_counts(&g4).unwrap().f[0], 14);
        let g5 = ms(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1], &[1, 2, 3]]);
        assert_eq!(face_counts(&g5).unwrap().f[0], 22);
        assert_eq!(hull_oracle(&g5).unwrap().f[0], 22);
    }

    #[test]
    fn non_generic_arrangement() {
        // Four planes through a common line plus one more.
        let w = ms(3, &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 0], &[1, 2, 0], &[0, 0, 1]]);
        let f = face_counts(&w).unwrap();
        let h = hull_oracle(&w).unwrap();
        assert_eq!(f.f, h.f);
        assert_eq!(f.towers, h.towers);
        assert_eq!(f.euler_characteristic(), 2);
    }

    #[test]
    fn buck_formulas() {
        for m in 2..10u64 {
            assert_eq!(buck_generic_u64(m, 2, 2).unwrap(), 2 * m);
        }
        for m in 3..10u64 {
            assert_eq!(buck_generic_u64(m, 3, 3).unwrap(), m * m - m + 2);
            assert_eq!(buck_generic(m, 3, 3).unwrap(), buck_affine(m - 1, 2, 2).unwrap() * 2u32);
            assert_eq!(buck_generic_u64(m, 3, 1).unwrap(), m * (m - 1));
        }
        assert_eq!(buck_affine(4, 2, 2).unwrap(), BigUint::from(11u32));
        assert!(buck_generic(2, 3, 1).is_err());
    }

    #[test]
    fn a_r_family() {
        let a1 = a_r_cells(1).unwrap();
        assert_eq!(a1.counts.m, 3);
        assert_eq!(a1.counts.chambers, 8);
        let a2 = a_r_cells(2).unwrap();
        assert_eq!(a2.counts.m, 13);
        assert_eq!(a2.counts.chambers % 2, 0);
        assert!(a_r_cells(6).is_err());
    }
}
