//! Pointed rational polyhedral cones.
//!
//! A cone is given by primitive integer generators. Facet normals and a
//! simplicial fan are derived on construction and never supplied by the caller.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::arith::{dot_f, dot_i, gcd_slice, norm, Field};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{det_i128, integer_normal, rank_i64};

/// Relative tolerance below which `v·w` counts as touching the dual boundary.
pub const DUAL_TOLERANCE: f64 = 1e-9;

/// One simplicial cone of the fan: indices into the generator list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialPiece {
    pub indices: Vec<usize>,
    /// `|det W|` of the generator matrix.
    pub abs_det: i128,
}

/// Full-dimensional pointed cone `{x : n_j·x >= 0}`.
#[derive(Clone, Debug, Serialize)]
pub struct PolyhedralCone {
    dim: usize,
    generators: Vec<Vec<i64>>,
    facet_normals: Vec<Vec<i64>>,
    simplices: Vec<SimplicialPiece>,
}

/// A dual vector together with its open-dual flag.
#[derive(Clone, Debug, PartialEq)]
pub struct DualVector {
    pub v: Vec<f64>,
    pub strict_interior: bool,
}

/// `Λ(v)` with gradient and Hessian.
#[derive(Clone, Debug, PartialEq)]
pub struct Laplace {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct ConeFile {
    d: usize,
    generators: Vec<Vec<i64>>,
}

impl PolyhedralCone {
    /// Build a cone from generators. Non-primitive generators are reduced.
    ///
    /// # Errors
    /// Zero or mixed-length generators, rank below `d`, or a cone containing a line.
    pub fn new(generators: Vec<Vec<i64>>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::InvalidInput("no generators".into()));
        };
        let dim = first.len();
        if dim < 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let mut gens = Vec::with_capacity(generators.len());
        for g in &generators {
            check_dim(dim, g.len())?;
            let h = gcd_slice(g);
            if h == 0 {
                return Err(Error::InvalidInput("zero generator".into()));
            }
            gens.push(g.iter().map(|x| x / h).collect::<Vec<i64>>());
        }
        let rank = rank_i64(&gens);
        if rank < dim {
            return Err(Error::Degenerate { rank, dim });
        }
        let facet_normals = facet_normals(&gens)?;
        if rank_i64(&facet_normals) < dim {
            return Err(Error::NotPointed);
        }
        let simplices = triangulate(&gens)?;
        Ok(Self {
            dim,
            generators: gens,
            facet_normals,
            simplices,
        })
    }

    /// The nonnegative orthant of `R^d`.
    pub fn orthant(d: usize) -> Result<Self> {
        Self::new(
            (0..d)
                .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
                .collect(),
        )
    }

    /// Parse `{"d": int, "generators": [[int,...],...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let f: ConeFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        for g in &f.generators {
            check_dim(f.d, g.len())?;
        }
        Self::new(f.generators)
    }

    /// Serialize to the cone file format.
    pub fn to_json(&self) -> String {
        serde_json::json!({"d": self.dim, "generators": self.generators}).to_string()
    }

    /// Built-in cones: `orthant<d>`, `circ3:<facets>`, `wedge` or `wedge:(a,b),(c,d)`.
    pub fn preset(name: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unknown cone preset {name:?}"));
        if let Some(d) = name.strip_prefix("orthant") {
            let d: usize = d.parse().map_err(|_| bad())?;
            return Self::orthant(d);
        }
        if let Some(m) = name.strip_prefix("circ3:") {
            let m: usize = m.parse().map_err(|_| bad())?;
            return regular_cone_approx(std::f64::consts::FRAC_PI_4, m);
        }
        if name == "wedge" {
            return Self::new(vec![vec![1, 0], vec![1, 2]]);
        }
        if let Some(list) = name.strip_prefix("wedge:") {
            let mut gens = Vec::new();
            for part in list.split(')') {
                let part = part.trim_start_matches([',', ' ']).trim_start_matches('(');
                if part.trim().is_empty() {
                    continue;
                }
                let v: std::result::Result<Vec<i64>, _> =
                    part.split(',').map(|s| s.trim().parse::<i64>()).collect();
                gens.push(v.map_err(|_| bad())?);
            }
            return Self::new(gens);
        }
        Err(bad())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn facet_normals(&self) -> &[Vec<i64>] {
        &self.facet_normals
    }

    pub fn simplices(&self) -> &[SimplicialPiece] {
        &self.simplices
    }

    /// Generator vectors of one fan piece.
    pub fn piece_generators(&self, piece: &SimplicialPiece) -> Vec<&[i64]> {
        piece
            .indices
            .iter()
            .map(|&i| self.generators[i].as_slice())
            .collect()
    }

    /// True when the cone has exactly `d` generators.
    pub fn is_simplicial(&self) -> bool {
        self.simplices.len() == 1 && self.generators.len() == self.dim
    }

    /// Integer membership test.
    pub fn contains(&self, x: &[i64]) -> Result<bool> {
        check_dim(self.dim, x.len())?;
        Ok(self.facet_normals.iter().all(|n| dot_i(n, x) >= 0))
    }

    /// Membership for a vector over any field.
    pub fn contains_point<S: Field>(&self, x: &[S]) -> Result<bool> {
        check_dim(self.dim, x.len())?;
        Ok(self
            .facet_normals
            .iter()
            .all(|n| !facet_value(n, x).is_neg()))
    }

    /// Interior membership: every facet inequality strict.
    pub fn contains_strictly<S: Field>(&self, x: &[S]) -> Result<bool> {
        check_dim(self.dim, x.len())?;
        Ok(self
            .facet_normals
            .iter()
            .all(|n| facet_value(n, x).is_pos()))
    }

    /// Open-dual membership: `v·g > 0` for every generator.
    pub fn dual_contains<S: Field>(&self, v: &[S]) -> Result<bool> {
        check_dim(self.dim, v.len())?;
        Ok(self
            .generators
            .iter()
            .all(|g| facet_value(g, v).is_pos()))
    }

    /// Tag a float vector with its open-dual flag.
    pub fn classify_dual(&self, v: &[f64]) -> Result<DualVector> {
        Ok(DualVector {
            strict_interior: self.dual_contains(v)?,
            v: v.to_vec(),
        })
    }

    /// An integer vector in the open dual: the sum of the facet normals.
    pub fn interior_dual_vector(&self) -> Vec<i64> {
        let mut s = vec![0i64; self.dim];
        for n in &self.facet_normals {
            for (a, b) in s.iter_mut().zip(n) {
                *a += b;
            }
        }
        s
    }

    /// An integer vector in the interior of the cone: the sum of the generators.
    pub fn interior_vector(&self) -> Vec<i64> {
        let mut s = vec![0i64; self.dim];
        for g in &self.generators {
            for (a, b) in s.iter_mut().zip(g) {
                *a += b;
            }
        }
        s
    }

    /// Laplace transform `Λ(v) = int_C exp(-v·x) dx` with its first two derivatives.
    ///
    /// # Errors
    /// [`Error::OutsideDual`] when `v` is not in the open dual and
    /// [`Error::Conditioning`] when some `v·w` is below the relative tolerance.
    pub fn laplace(&self, v: &[f64]) -> Result<Laplace> {
        check_dim(self.dim, v.len())?;
        let d = self.dim;
        let s_gen = self.checked_levels(v)?;
        let mut value = 0.0;
        let mut gradient = vec![0.0; d];
        let mut hessian = vec![vec![0.0; d]; d];
        let mut a = vec![0.0; d];
        for piece in &self.simplices {
            let mut f = piece.abs_det as f64;
            a.iter_mut().for_each(|x| *x = 0.0);
            for &i in &piece.indices {
                let s = s_gen[i];
                f /= s;
                for (aj, &gj) in a.iter_mut().zip(&self.generators[i]) {
                    *aj += gj as f64 / s;
                }
            }
            value += f;
            for r in 0..d {
                gradient[r] -= f * a[r];
                for c in 0..d {
                    let mut diag = 0.0;
                    for &i in &piece.indices {
                        let s = s_gen[i];
                        let g = &self.generators[i];
                        diag += g[r] as f64 * g[c] as f64 / (s * s);
                    }
                    hessian[r][c] += f * (a[r] * a[c] + diag);
                }
            }
        }
        Ok(Laplace {
            value,
            gradient,
            hessian,
        })
    }

    /// `Λ(v)` only.
    pub fn laplace_value(&self, v: &[f64]) -> Result<f64> {
        check_dim(self.dim, v.len())?;
        let s_gen = self.checked_levels(v)?;
        Ok(self
            .simplices
            .iter()
            .map(|p| p.indices.iter().fold(p.abs_det as f64, |f, &i| f / s_gen[i]))
            .sum())
    }

    fn checked_levels(&self, v: &[f64]) -> Result<Vec<f64>> {
        let nv = norm(v);
        let mut out = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            let gf: Vec<f64> = g.iter().map(|&x| x as f64).collect();
            let s = dot_f(v, &gf);
            if s <= 0.0 {
                return Err(Error::OutsideDual);
            }
            let tol = DUAL_TOLERANCE * nv * norm(&gf);
            if s < tol {
                return Err(Error::Conditioning { value: s, tolerance: tol });
            }
            out.push(s);
        }
        Ok(out)
    }

    /// Random point of the cone as a nonnegative combination of the generators.
    pub fn random_point(&self, rng: &mut crate::rng::Stream) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        for g in &self.generators {
            let c = -rng.uniform().ln();
            for (a, &b) in x.iter_mut().zip(g) {
                *a += c * b as f64;
            }
        }
        x
    }
}

fn facet_value<S: Field>(n: &[i64], x: &[S]) -> S {
    n.iter()
        .zip(x)
        .fold(S::zero(), |acc, (&a, b)| acc + S::from_i64(a) * b.clone())
}

fn to_i64(v: &[i128]) -> Result<Vec<i64>> {
    v.iter()
        .map(|&x| i64::try_from(x).map_err(|_| Error::Overflow))
        .collect()
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    if k > n {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx)?;
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return Ok(());
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Facet normals of the cone generated by `gens`, by enumerating
/// `(d-1)`-subsets and keeping the supporting hyperplanes.
fn facet_normals(gens: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let d = gens[0].len();
    let m = gens.len();
    // A stride coprime to m visits generators in a spread-out order, so most
    // non-supporting candidates are rejected after a few evaluations.
    let mut stride = ((m as f64) * 0.618_033_988_75) as usize | 1;
    while m > 1 && num_integer::Integer::gcd(&stride, &m) != 1 {
        stride += 2;
    }
    let order: Vec<usize> = (0..m).map(|i| (i * stride) % m.max(1)).collect();
    let mut found: BTreeSet<Vec<i64>> = BTreeSet::new();
    for_each_subset(m, d - 1, &mut |sub| {
        let vs: Vec<&[i64]> = sub.iter().map(|&i| gens[i].as_slice()).collect();
        let Some(n) = integer_normal(&vs) else {
            return Ok(());
        };
        let mut pos = false;
        let mut neg = false;
        for &j in &order {
            let s: i128 = n.iter().zip(&gens[j]).map(|(&a, &b)| a * b as i128).sum();
            pos |= s > 0;
            neg |= s < 0;
            if pos && neg {
                return Ok(());
            }
        }
        if !pos && !neg {
            return Ok(());
        }
        let n = if neg { n.iter().map(|x| -x).collect() } else { n };
        found.insert(to_i64(&n)?);
        Ok(())
    })?;
    Ok(found.into_iter().collect())
}

struct BoundaryFacet {
    normal: Vec<i128>,
}

/// Placing triangulation of the cone over `gens`, in input order.
///
/// # Errors
/// Rank below `d`.
pub fn triangulate(gens: &[Vec<i64>]) -> Result<Vec<SimplicialPiece>> {
    let d = gens[0].len();
    let mut initial: Vec<usize> = Vec::new();
    for i in 0..gens.len() {
        let mut rows: Vec<Vec<i64>> = initial.iter().map(|&j| gens[j].clone()).collect();
        rows.push(gens[i].clone());
        if rank_i64(&rows) == rows.len() {
            initial.push(i);
            if initial.len() == d {
                break;
            }
        }
    }
    if initial.len() < d {
        return Err(Error::Degenerate {
            rank: initial.len(),
            dim: d,
        });
    }
    let mut pieces = Vec::new();
    let mut boundary: BTreeMap<Vec<usize>, BoundaryFacet> = BTreeMap::new();
    let add_piece = |idx: Vec<usize>,
                     pieces: &mut Vec<SimplicialPiece>,
                     boundary: &mut BTreeMap<Vec<usize>, BoundaryFacet>|
     -> Result<()> {
        let cols: Vec<Vec<i64>> = idx.iter().map(|&i| gens[i].clone()).collect();
        let det = det_i128(&cols).ok_or(Error::Overflow)?;
        for skip in 0..idx.len() {
            let mut face: Vec<usize> = idx
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != skip)
                .map(|(_, &i)| i)
                .collect();
            face.sort_unstable();
            if boundary.remove(&face).is_some() {
                continue;
            }
            let vs: Vec<&[i64]> = face.iter().map(|&i| gens[i].as_slice()).collect();
            let mut n = integer_normal(&vs).ok_or(Error::Overflow)?;
            let opp: i128 = n
                .iter()
                .zip(&gens[idx[skip]])
                .map(|(&a, &b)| a * b as i128)
                .sum();
            if opp > 0 {
                n.iter_mut().for_each(|x| *x = -*x);
            }
            boundary.insert(face, BoundaryFacet { normal: n });
        }
        let mut sorted = idx;
        sorted.sort_unstable();
        pieces.push(SimplicialPiece {
            indices: sorted,
            abs_det: det.abs(),
        });
        Ok(())
    };
    add_piece(initial.clone(), &mut pieces, &mut boundary)?;
    for p in 0..gens.len() {
        if initial.contains(&p) {
            continue;
        }
        let visible: Vec<Vec<usize>> = boundary
            .iter()
            .filter(|(_, f)| {
                f.normal
                    .iter()
                    .zip(&gens[p])
                    .map(|(&a, &b)| a * b as i128)
                    .sum::<i128>()
                    > 0
            })
            .map(|(k, _)| k.clone())
            .collect();
        for face in visible {
            let mut idx = face.clone();
            idx.push(p);
            add_piece(idx, &mut pieces, &mut boundary)?;
        }
    }
    Ok(pieces)
}

/// Polyhedral approximation of the circular cone `x^2 + y^2 <= z^2 tan^2(half_angle)`.
///
/// Generators are `(round(Q r cos θ_i), round(Q r sin θ_i), Q)` reduced to
/// primitive form, with `Q = 10^6`, `r = tan(half_angle)` and `θ_i = 2πi/facets`.
///
/// # Errors
/// `facets < 3` or a half angle outside `(0, π/2)`.
pub fn regular_cone_approx(half_angle: f64, facets: usize) -> Result<PolyhedralCone> {
    if facets < 3 {
        return Err(Error::InvalidInput(format!("need at least 3 facets, got {facets}")));
    }
    if !(half_angle > 0.0 && half_angle < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidInput("half angle must lie in (0, pi/2)".into()));
    }
    const Q: f64 = 1e6;
    let r = half_angle.tan();
    let gens = (0..facets)
        .map(|i| {
            let th = 2.0 * std::f64::consts::PI * i as f64 / facets as f64;
            vec![(Q * r * th.cos()).round() as i64, (Q * r * th.sin()).round() as i64, Q as i64]
        })
        .collect();
    PolyhedralCone::new(gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn wedge() -> PolyhedralCone {
        PolyhedralCone::new(vec![vec![1, 0], vec![1, 2]]).unwrap()
    }

    #[test]
    fn membership() {
        let o = PolyhedralCone::orthant(2).unwrap();
        assert!(o.contains(&[1, 1]).unwrap());
        assert!(!o.contains(&[1, -1]).unwrap());
        assert!(wedge().contains(&[2, 1]).unwrap());
        assert!(!wedge().contains(&[1, 3]).unwrap());
        assert!(matches!(o.contains(&[1]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn dual_membership() {
        let o = PolyhedralCone::orthant(2).unwrap();
        assert!(o.dual_contains(&[1.0, 1.0]).unwrap());
        assert!(!o.dual_contains(&[1.0, 0.0]).unwrap());
        assert!(!wedge().dual_contains(&[0.0, 1.0]).unwrap());
        assert!(wedge().dual_contains(&[rat(1, 1), rat(-1, 3)]).unwrap());
    }

    #[test]
    fn wedge_facets() {
        let w = wedge();
        assert_eq!(w.facet_normals(), &[vec![0, 1], vec![2, -1]]);
    }

    #[test]
    fn laplace_orthant() {
        let o = PolyhedralCone::orthant(2).unwrap();
        let l = o.laplace(&[1.0, 1.0]).unwrap();
        assert_eq!(l.value, 1.0);
        assert_eq!(l.gradient, vec![-1.0, -1.0]);
        assert_eq!(l.hessian, vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert_eq!(o.laplace_value(&[0.5, 0.5]).unwrap(), 4.0);
        assert_eq!(o.laplace(&[1.0, 0.0]), Err(Error::OutsideDual));
        assert!(matches!(o.laplace(&[1.0, 1e-12]), Err(Error::Conditioning { .. })));
    }

    #[test]
    fn non_pointed_and_degenerate() {
        assert_eq!(
            PolyhedralCone::new(vec![vec![1, 0], vec![-1, 0], vec![0, 1]]).unwrap_err(),
            Error::NotPointed
        );
        assert!(matches!(
            PolyhedralCone::new(vec![vec![1, 2], vec![2, 4]]),
            Err(Error::Degenerate { .. })
        ));
        assert!(PolyhedralCone::new(vec![vec![0, 0], vec![1, 0]]).is_err());
    }

    #[test]
    fn generators_made_primitive() {
        let c = PolyhedralCone::new(vec![vec![2, 0], vec![3, 3]]).unwrap();
        assert_eq!(c.generators(), &[vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn triangulation_orders() {
        let a = PolyhedralCone::new(vec![vec![1, 1, 1], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(a.simplices().len(), 3);
        let b = PolyhedralCone::new(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 1]]).unwrap();
        assert_eq!(b.simplices().len(), 1);
        let total: i128 = a.simplices().iter().map(|p| p.abs_det).sum();
        assert_eq!(total, 3);
    }

    #[test]
    fn octagon_has_six_pieces() {
        let c = regular_cone_approx(std::f64::consts::FRAC_PI_4, 8).unwrap();
        assert_eq!(c.simplices().len(), 6);
        assert_eq!(c.facet_normals().len(), 8);
    }

    #[test]
    fn square_cone_pattern() {
        let c = regular_cone_approx(std::f64::consts::FRAC_PI_4, 4).unwrap();
        assert_eq!(
            c.generators(),
            &[vec![1, 0, 1], vec![0, 1, 1], vec![-1, 0, 1], vec![0, -1, 1]]
        );
        assert!(regular_cone_approx(0.5, 2).is_err());
    }

    #[test]
    fn presets_and_json() {
        let w = PolyhedralCone::preset("wedge:(1,0),(1,2)").unwrap();
        assert_eq!(w.generators(), wedge().generators());
        let o = PolyhedralCone::preset("orthant3").unwrap();
        assert_eq!(o.dim(), 3);
        let back = PolyhedralCone::from_json(&o.to_json()).unwrap();
        assert_eq!(back.generators(), o.generators());
        assert!(PolyhedralCone::from_json(r#"{"d":3,"generators":[[1,0]]}"#).is_err());
        assert!(PolyhedralCone::preset("cube").is_err());
    }
}
