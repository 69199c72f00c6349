//! Simplices: volumes, first moments, half-space clipping and cubature.

use crate::arith::{factorial, Field};
use crate::linalg::det;

/// A simplex given by its vertex list.
pub type Simplex<S> = Vec<Vec<S>>;

/// Volume of a full-dimensional simplex (`d + 1` vertices in `R^d`).
pub fn volume<S: Field>(s: &[Vec<S>]) -> S {
    let d = s[0].len();
    let m: Vec<Vec<S>> = s[1..]
        .iter()
        .map(|p| p.iter().zip(&s[0]).map(|(a, b)| a.clone() - b.clone()).collect())
        .collect();
    let f = (1..=d as i64).fold(S::one(), |acc, i| acc * S::from_i64(i));
    det(m).abs() / f
}

/// First moment `int_S x dx = vol(S) * centroid(S)`.
pub fn moment<S: Field>(s: &[Vec<S>]) -> Vec<S> {
    let v = volume(s);
    let k = S::from_i64(s.len() as i64);
    (0..s[0].len())
        .map(|i| {
            let sum = s.iter().fold(S::zero(), |acc, p| acc + p[i].clone());
            v.clone() * sum / k.clone()
        })
        .collect()
}

/// Total volume and first moment of a simplex list.
pub fn volume_and_moment<S: Field>(simplices: &[Simplex<S>], d: usize) -> (S, Vec<S>) {
    let mut vol = S::zero();
    let mut mom = vec![S::zero(); d];
    for s in simplices {
        vol = vol + volume(s);
        for (m, x) in mom.iter_mut().zip(moment(s)) {
            *m = m.clone() + x;
        }
    }
    (vol, mom)
}

type Tagged<S> = (Vec<S>, S);

fn edge_point<S: Field>(p: &Tagged<S>, n: &Tagged<S>) -> Vec<S> {
    let t = p.1.clone() / (p.1.clone() - n.1.clone());
    p.0.iter()
        .zip(&n.0)
        .map(|(a, b)| a.clone() + t.clone() * (b.clone() - a.clone()))
        .collect()
}

fn without<T: Clone>(v: &[T], i: usize) -> Vec<T> {
    v.iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, x)| x.clone())
        .collect()
}

// Vertices on the cutting hyperplane are treated as lying on the positive
// side (a symbolic perturbation of the offset). The pieces then never overlap
// in positive measure, and volumes agree with the unperturbed cut.
fn clip_rec<S: Field>(vs: &[Tagged<S>]) -> Vec<Simplex<S>> {
    if vs.iter().all(|v| !v.1.is_neg()) {
        return vec![vs.iter().map(|v| v.0.clone()).collect()];
    }
    let Some(p) = vs.iter().position(|v| !v.1.is_neg()) else {
        return Vec::new();
    };
    let apex = vs[p].0.clone();
    let mut out = clip_rec(&without(vs, p));
    out.extend(section_rec(vs));
    for s in &mut out {
        s.push(apex.clone());
    }
    out
}

/// Simplices of one dimension lower covering the cut inside `conv(vs)`.
fn section_rec<S: Field>(vs: &[Tagged<S>]) -> Vec<Simplex<S>> {
    let p = vs.iter().position(|v| !v.1.is_neg());
    let n = vs.iter().position(|v| v.1.is_neg());
    let (Some(p), Some(n)) = (p, n) else {
        return Vec::new();
    };
    let e = edge_point(&vs[p], &vs[n]);
    if vs.len() == 2 {
        return vec![vec![e]];
    }
    let mut out = section_rec(&without(vs, p));
    out.extend(section_rec(&without(vs, n)));
    for s in &mut out {
        s.push(e.clone());
    }
    out
}

/// Triangulation of `s ∩ {x : normal·x >= offset}`.
///
/// Exact for rational input. Pieces may be degenerate (zero volume) but never
/// overlap in positive measure.
pub fn clip_halfspace<S: Field>(s: &[Vec<S>], normal: &[S], offset: &S) -> Vec<Simplex<S>> {
    let tagged: Vec<Tagged<S>> = s
        .iter()
        .map(|p| (p.clone(), crate::arith::dot(p, normal) - offset.clone()))
        .collect();
    clip_rec(&tagged)
}

/// Clip a whole simplex list.
pub fn clip_all<S: Field>(simplices: &[Simplex<S>], normal: &[S], offset: &S) -> Vec<Simplex<S>> {
    simplices
        .iter()
        .flat_map(|s| clip_halfspace(s, normal, offset))
        .collect()
}

/// `(1-based) k`-volume of a `k`-simplex embedded in `R^n` via the Gram determinant.
pub fn embedded_volume(s: &[Vec<f64>]) -> f64 {
    let k = s.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let e: Vec<Vec<f64>> = s[1..]
        .iter()
        .map(|p| p.iter().zip(&s[0]).map(|(a, b)| a - b).collect())
        .collect();
    let g: Vec<Vec<f64>> = e
        .iter()
        .map(|a| e.iter().map(|b| crate::arith::dot_f(a, b)).collect())
        .collect();
    det(g).max(0.0).sqrt() / factorial(k)
}

fn compositions(parts: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for i in 0..=total {
        prefix.push(i);
        compositions(parts - 1, total - i, prefix, out);
        prefix.pop();
    }
}

/// Grundmann-Moller rule of degree `2s + 1` on a `k`-simplex, as barycentric
/// nodes and weights normalized to sum one (so it returns averages).
pub fn grundmann_moller(k: usize, s: usize) -> Vec<(Vec<f64>, f64)> {
    let deg = 2 * s + 1;
    let mut out = Vec::new();
    let kf = factorial(k);
    for i in 0..=s {
        let den = (deg + k - 2 * i) as f64;
        let w = if i % 2 == 0 { 1.0 } else { -1.0 } * 2f64.powi(-(2 * s as i32))
            * den.powi(deg as i32)
            / (factorial(i) * factorial(deg + k - i))
            * kf;
        let mut cs = Vec::new();
        compositions(k + 1, s - i, &mut Vec::new(), &mut cs);
        for beta in cs {
            let bary: Vec<f64> = beta.iter().map(|&b| (2 * b + 1) as f64 / den).collect();
            out.push((bary, w));
        }
    }
    out
}

fn bisect(s: &[Vec<f64>]) -> (Simplex<f64>, Simplex<f64>) {
    let mut best = (0, 1, -1.0);
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            let l: f64 = s[i].iter().zip(&s[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            if l > best.2 {
                best = (i, j, l);
            }
        }
    }
    let mid: Vec<f64> = s[best.0].iter().zip(&s[best.1]).map(|(a, b)| 0.5 * (a + b)).collect();
    let mut a = s.to_vec();
    let mut b = s.to_vec();
    a[best.1] = mid.clone();
    b[best.0] = mid;
    (a, b)
}

/// Average of `f` over a simplex (uniform measure), by a degree-9 rule on
/// `2^levels` pieces from longest-edge bisection.
pub fn average<F: Fn(&[f64]) -> f64>(s: &[Vec<f64>], f: &F, levels: u32) -> f64 {
    let rule = grundmann_moller(s.len() - 1, 4);
    let mut stack = vec![(s.to_vec(), 0u32)];
    let mut total = 0.0;
    let mut pieces = 0.0;
    let mut x = vec![0.0; s[0].len()];
    while let Some((t, lvl)) = stack.pop() {
        if lvl < levels {
            let (a, b) = bisect(&t);
            stack.push((a, lvl + 1));
            stack.push((b, lvl + 1));
            continue;
        }
        let mut acc = 0.0;
        for (bary, w) in &rule {
            x.iter_mut().for_each(|c| *c = 0.0);
            for (l, p) in bary.iter().zip(&t) {
                for (c, v) in x.iter_mut().zip(p) {
                    *c += l * v;
                }
            }
            acc += w * f(&x);
        }
        total += acc;
        pieces += 1.0;
    }
    total / pieces
}

/// Integral of `f` over a full-dimensional simplex.
pub fn integrate<F: Fn(&[f64]) -> f64>(s: &[Vec<f64>], f: &F, levels: u32) -> f64 {
    volume(s) * average(s, f, levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, Rational};

    fn unit_triangle() -> Simplex<Rational> {
        vec![
            vec![rat(0, 1), rat(0, 1)],
            vec![rat(1, 1), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1)],
        ]
    }

    #[test]
    fn triangle_moment() {
        let t = unit_triangle();
        assert_eq!(volume(&t), rat(1, 2));
        assert_eq!(moment(&t), vec![rat(1, 6), rat(1, 6)]);
    }

    #[test]
    fn clip_triangle_exact() {
        // {x >= y} inside the unit triangle: triangle (0,0),(1,0),(1/2,1/2).
        let t = unit_triangle();
        let parts = clip_halfspace(&t, &[rat(1, 1), rat(-1, 1)], &rat(0, 1));
        let (v, m) = volume_and_moment(&parts, 2);
        assert_eq!(v, rat(1, 4));
        assert_eq!(m, vec![rat(1, 8), rat(1, 24)]);
    }

    #[test]
    fn clip_tetra_both_sides_sum() {
        let s: Simplex<Rational> = vec![
            vec![rat(0, 1), rat(0, 1), rat(0, 1)],
            vec![rat(3, 1), rat(0, 1), rat(0, 1)],
            vec![rat(0, 1), rat(2, 1), rat(0, 1)],
            vec![rat(0, 1), rat(0, 1), rat(5, 1)],
        ];
        let n = vec![rat(1, 1), rat(-2, 1), rat(1, 3)];
        let off = rat(1, 2);
        let a = clip_halfspace(&s, &n, &off);
        let neg: Vec<Rational> = n.iter().map(|x| -x.clone()).collect();
        let b = clip_halfspace(&s, &neg, &(-off));
        let (va, ma) = volume_and_moment(&a, 3);
        let (vb, mb) = volume_and_moment(&b, 3);
        assert_eq!(va + vb, volume(&s));
        let m = moment(&s);
        for i in 0..3 {
            assert_eq!(ma[i].clone() + mb[i].clone(), m[i]);
        }
    }

    #[test]
    fn clip_through_vertex() {
        // Plane through a vertex and the opposite edge midpoint.
        let t = unit_triangle();
        let parts = clip_halfspace(&t, &[rat(1, 1), rat(-1, 1)], &rat(0, 1));
        assert!(!parts.is_empty());
        let s: Simplex<Rational> = vec![
            vec![rat(0, 1), rat(0, 1), rat(0, 1)],
            vec![rat(1, 1), rat(0, 1), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1), rat(0, 1)],
            vec![rat(0, 1), rat(0, 1), rat(1, 1)],
        ];
        let parts = clip_halfspace(&s, &[rat(0, 1), rat(1, 1), rat(-1, 1)], &rat(0, 1));
        assert_eq!(volume_and_moment(&parts, 3).0, rat(1, 12));
    }

    #[test]
    fn gm_rule_exact_on_polynomials() {
        // Average of x^a y^b over the unit triangle: 2 a! b! / (a+b+2)!.
        let t = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        for (a, b) in [(0, 0), (2, 3), (4, 5), (9, 0)] {
            let avg = average(&t, &|x: &[f64]| x[0].powi(a) * x[1].powi(b), 0);
            let exact = 2.0 * factorial(a as usize) * factorial(b as usize) / factorial(a as usize + b as usize + 2);
            assert!((avg - exact).abs() < 1e-13, "{a} {b}: {avg} vs {exact}");
        }
    }

    #[test]
    fn gm_rule_tetra() {
        let s = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let v = integrate(&s, &|x: &[f64]| x[0] * x[1] * x[2], 2);
        assert!((v - 1.0 / 720.0).abs() < 1e-15);
    }

    #[test]
    fn embedded_area() {
        let s = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert!((embedded_volume(&s) - 3f64.sqrt() / 2.0).abs() < 1e-14);
    }
}
