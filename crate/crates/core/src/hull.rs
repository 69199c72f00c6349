//! Exact convex hulls of integer point sets in dimensions 2 and 3.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::arith::reduce_i128;
use crate::error::{Error, Result};

/// Facet `{x : normal·x = offset}` with the hull on the side `normal·x <= offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullFacet {
    pub normal: Vec<i128>,
    pub offset: i128,
    /// Vertex indices in cyclic order around the facet (two entries when `d = 2`).
    pub cycle: Vec<usize>,
}

/// Face lattice data of a full-dimensional polytope.
#[derive(Clone, Debug)]
pub struct Hull {
    pub dim: usize,
    pub vertices: Vec<Vec<i64>>,
    pub facets: Vec<HullFacet>,
    /// Edges as sorted vertex index pairs.
    pub edges: Vec<(usize, usize)>,
}

impl Hull {
    /// `[f_0, ..., f_{d-1}]`.
    pub fn face_vector(&self) -> Vec<u64> {
        match self.dim {
            2 => vec![self.vertices.len() as u64, self.edges.len() as u64],
            _ => vec![
                self.vertices.len() as u64,
                self.edges.len() as u64,
                self.facets.len() as u64,
            ],
        }
    }

    /// Closed membership test.
    pub fn contains(&self, x: &[i64]) -> bool {
        self.facets.iter().all(|f| {
            f.normal
                .iter()
                .zip(x)
                .map(|(&a, &b)| a * b as i128)
                .sum::<i128>()
                <= f.offset
        })
    }

    /// Triangulation into `d`-simplices, as vertex index lists.
    pub fn simplices(&self) -> Vec<Vec<usize>> {
        let apex = 0;
        let mut out = Vec::new();
        for f in &self.facets {
            if f.cycle.contains(&apex) {
                continue;
            }
            if self.dim == 2 {
                out.push(vec![apex, f.cycle[0], f.cycle[1]]);
            } else {
                for i in 1..f.cycle.len() - 1 {
                    out.push(vec![apex, f.cycle[0], f.cycle[i], f.cycle[i + 1]]);
                }
            }
        }
        out
    }
}

fn cross2(o: &[i64; 2], a: &[i64; 2], b: &[i64; 2]) -> i128 {
    (a[0] - o[0]) as i128 * (b[1] - o[1]) as i128 - (a[1] - o[1]) as i128 * (b[0] - o[0]) as i128
}

/// Strict convex hull of planar points, counter-clockwise, as indices into `pts`.
fn chain2(pts: &[[i64; 2]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by_key(|&i| pts[i]);
    idx.dedup_by_key(|i| pts[*i]);
    if idx.len() < 3 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && cross2(&pts[lower[lower.len() - 2]], &pts[lower[lower.len() - 1]], &pts[i]) <= 0
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && cross2(&pts[upper[upper.len() - 2]], &pts[upper[upper.len() - 1]], &pts[i]) <= 0
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn hull2(points: &[Vec<i64>]) -> Result<Hull> {
    let pts: Vec<[i64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
    let cyc = chain2(&pts);
    if cyc.len() < 3 {
        return Err(Error::Degenerate { rank: cyc.len().saturating_sub(1), dim: 2 });
    }
    let vertices: Vec<Vec<i64>> = cyc.iter().map(|&i| points[i].clone()).collect();
    let m = vertices.len();
    let mut facets = Vec::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    for i in 0..m {
        let j = (i + 1) % m;
        let (a, b) = (&vertices[i], &vertices[j]);
        // Counter-clockwise order: the outward normal is the edge rotated clockwise.
        let mut n = vec![(b[1] - a[1]) as i128, (a[0] - b[0]) as i128];
        reduce_i128(&mut n);
        let offset = n[0] * a[0] as i128 + n[1] * a[1] as i128;
        facets.push(HullFacet { normal: n, offset, cycle: vec![i, j] });
        edges.push((i.min(j), i.max(j)));
    }
    Ok(Hull { dim: 2, vertices, facets, edges })
}

type P3 = [i128; 3];

fn sub3(a: &P3, b: &P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross3(a: &P3, b: &P3) -> P3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: &P3, b: &P3) -> i128 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

struct Tri {
    v: [usize; 3],
    n: P3,
    off: i128,
    alive: bool,
}

fn hull3(points: &[Vec<i64>]) -> Result<Hull> {
    let mut uniq: Vec<[i64; 3]> = points.iter().map(|p| [p[0], p[1], p[2]]).collect();
    uniq.sort_unstable();
    uniq.dedup();
    let pts: Vec<P3> = uniq
        .iter()
        .map(|p| [p[0] as i128, p[1] as i128, p[2] as i128])
        .collect();
    let degenerate = |rank| Error::Degenerate { rank, dim: 3 };
    if pts.is_empty() {
        return Err(degenerate(0));
    }
    let i1 = (1..pts.len()).next().ok_or(degenerate(0))?;
    let e1 = sub3(&pts[i1], &pts[0]);
    let i2 = (i1 + 1..pts.len())
        .find(|&i| cross3(&e1, &sub3(&pts[i], &pts[0])) != [0, 0, 0])
        .ok_or(degenerate(1))?;
    let n012 = cross3(&e1, &sub3(&pts[i2], &pts[0]));
    let i3 = (i2 + 1..pts.len())
        .find(|&i| dot3(&n012, &sub3(&pts[i], &pts[0])) != 0)
        .ok_or(degenerate(2))?;
    let c4: P3 = [0, 1, 2].map(|k| pts[0][k] + pts[i1][k] + pts[i2][k] + pts[i3][k]);
    let make = |a: usize, b: usize, c: usize| -> Tri {
        let n = cross3(&sub3(&pts[b], &pts[a]), &sub3(&pts[c], &pts[a]));
        let off = dot3(&n, &pts[a]);
        if dot3(&n, &c4) > 4 * off {
            Tri { v: [a, c, b], n: [-n[0], -n[1], -n[2]], off: -off, alive: true }
        } else {
            Tri { v: [a, b, c], n, off, alive: true }
        }
    };
    let mut tris = vec![
        make(0, i1, i2),
        make(0, i1, i3),
        make(0, i2, i3),
        make(i1, i2, i3),
    ];
    for p in 0..pts.len() {
        if p == 0 || p == i1 || p == i2 || p == i3 {
            continue;
        }
        let visible: Vec<usize> = (0..tris.len())
            .filter(|&t| tris[t].alive && dot3(&tris[t].n, &pts[p]) > tris[t].off)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut dir: HashSet<(usize, usize)> = HashSet::new();
        for &t in &visible {
            let v = tris[t].v;
            for k in 0..3 {
                dir.insert((v[k], v[(k + 1) % 3]));
            }
            tris[t].alive = false;
        }
        let mut horizon: Vec<(usize, usize)> =
            dir.iter().filter(|(a, b)| !dir.contains(&(*b, *a))).copied().collect();
        horizon.sort_unstable();
        for (a, b) in horizon {
            tris.push(make(a, b, p));
        }
    }
    // Merge coplanar triangles into facets.
    let mut groups: BTreeMap<(P3, i128), BTreeSet<usize>> = BTreeMap::new();
    for t in tris.iter().filter(|t| t.alive && t.n != [0, 0, 0]) {
        let mut key = vec![t.n[0], t.n[1], t.n[2], t.off];
        reduce_i128(&mut key);
        groups
            .entry(([key[0], key[1], key[2]], key[3]))
            .or_default()
            .extend(t.v);
    }
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut raw_facets = Vec::new();
    for ((n, off), vs) in groups {
        let vs: Vec<usize> = vs.into_iter().collect();
        let drop = (0..3).max_by_key(|&k| n[k].abs()).unwrap();
        let keep: Vec<usize> = (0..3).filter(|&k| k != drop).collect();
        let proj: Vec<[i64; 2]> = vs
            .iter()
            .map(|&i| [uniq[i][keep[0]], uniq[i][keep[1]]])
            .collect();
        let cyc: Vec<usize> = chain2(&proj).into_iter().map(|j| vs[j]).collect();
        for &i in &cyc {
            let next = index.len();
            index.entry(i).or_insert(next);
        }
        raw_facets.push((n, off, cyc));
    }
    let mut vertices = vec![Vec::new(); index.len()];
    for (&orig, &new) in &index {
        vertices[new] = uniq[orig].to_vec();
    }
    let mut edges = BTreeSet::new();
    let facets = raw_facets
        .into_iter()
        .map(|(n, off, cyc)| {
            let cycle: Vec<usize> = cyc.iter().map(|i| index[i]).collect();
            for k in 0..cycle.len() {
                let (a, b) = (cycle[k], cycle[(k + 1) % cycle.len()]);
                edges.insert((a.min(b), a.max(b)));
            }
            HullFacet { normal: n.to_vec(), offset: off, cycle }
        })
        .collect();
    Ok(Hull {
        dim: 3,
        vertices,
        facets,
        edges: edges.into_iter().collect(),
    })
}

/// Exact convex hull of a full-dimensional integer point set (`d` = 2 or 3).
///
/// # Errors
/// Lower-dimensional input or an unsupported dimension.
pub fn convex_hull(points: &[Vec<i64>]) -> Result<Hull> {
    let d = points.first().map_or(0, Vec::len);
    for p in points {
        crate::error::check_dim(d, p.len())?;
    }
    match d {
        2 => hull2(points),
        3 => hull3(points),
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_with_interior_and_edge_points() {
        let pts = vec![
            vec![0, 0],
            vec![2, 0],
            vec![2, 2],
            vec![0, 2],
            vec![1, 1],
            vec![1, 0],
        ];
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.face_vector(), vec![4, 4]);
        assert!(h.contains(&[1, 2]));
        assert!(!h.contains(&[3, 1]));
        assert_eq!(h.simplices().len(), 2);
    }

    #[test]
    fn cube_with_face_points() {
        let mut pts = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    pts.push(vec![x, y, z]);
                }
            }
        }
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.face_vector(), vec![8, 12, 6]);
        assert_eq!(h.simplices().len(), 6);
        assert!(h.contains(&[2, 2, 2]) && !h.contains(&[3, 0, 0]));
    }

    #[test]
    fn octahedron() {
        let pts = vec![
            vec![1, 0, 0],
            vec![-1, 0, 0],
            vec![0, 1, 0],
            vec![0, -1, 0],
            vec![0, 0, 1],
            vec![0, 0, -1],
        ];
        assert_eq!(convex_hull(&pts).unwrap().face_vector(), vec![6, 12, 8]);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(convex_hull(&[vec![0, 0], vec![1, 1], vec![2, 2]]).is_err());
        assert!(convex_hull(&[vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0]]).is_err());
    }
}
