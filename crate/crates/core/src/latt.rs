//! Lattice points in truncated cones, primitive densities and cubature checks.

use num_integer::Integer;
use serde::Serialize;

use crate::arith::{ceil_div, dot, dot_f, factorial, floor_div, gcd_slice, norm, to_f64_vec, Field, Rational};
use crate::cone::PolyhedralCone;
use crate::error::{check_dim, Error, Result};
use crate::hull::{convex_hull, Hull};
use crate::rng::Stream;
use crate::simplex;
use crate::zeta::zeta;

/// Default cap on the number of lattice points visited by one enumeration.
pub const DEFAULT_POINT_BUDGET: u128 = 100_000_000;

/// Relative slack in the test `u·x <= t`.
const LEVEL_SLACK: f64 = 1e-12;

/// The truncated cone `C ∩ {u·x <= t}`, optionally restricted to primitive vectors.
#[derive(Clone, Debug)]
pub struct TruncatedConeQuery<'a> {
    pub cone: &'a PolyhedralCone,
    pub u: Vec<f64>,
    pub t: f64,
    pub primitive_only: bool,
}

impl<'a> TruncatedConeQuery<'a> {
    /// # Errors
    /// `u` outside the open dual or negative `t`.
    pub fn new(cone: &'a PolyhedralCone, u: &[f64], t: f64, primitive_only: bool) -> Result<Self> {
        check_dim(cone.dim(), u.len())?;
        if !cone.dual_contains(u)? {
            return Err(Error::OutsideDual);
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("threshold must be finite and >= 0, got {t}")));
        }
        Ok(Self {
            cone,
            u: u.to_vec(),
            t,
            primitive_only,
        })
    }

    fn bounding_box(&self) -> (Vec<i64>, Vec<i64>) {
        let d = self.cone.dim();
        let mut lo = vec![0i64; d];
        let mut hi = vec![0i64; d];
        for g in self.cone.generators() {
            let gf: Vec<f64> = g.iter().map(|&x| x as f64).collect();
            let s = self.t / dot_f(&self.u, &gf) * (1.0 + LEVEL_SLACK);
            for i in 0..d {
                let c = gf[i] * s;
                lo[i] = lo[i].min((c - 1e-9).floor() as i64);
                hi[i] = hi[i].max((c + 1e-9).ceil() as i64);
            }
        }
        (lo, hi)
    }

    /// Visit every row: a prefix of the first `d-1` coordinates and the
    /// inclusive range of the last coordinate inside the truncated cone.
    fn for_each_row(&self, mut f: impl FnMut(&[i64], i64, i64)) {
        let d = self.cone.dim();
        let (lo, hi) = self.bounding_box();
        let normals = self.cone.facet_normals();
        let mut prefix: Vec<i64> = lo[..d - 1].to_vec();
        let ud = self.u[d - 1];
        let tol = LEVEL_SLACK * (self.t.abs() + 1.0);
        loop {
            let mut zlo = lo[d - 1] as i128;
            let mut zhi = hi[d - 1] as i128;
            let mut ok = true;
            for n in normals {
                let c: i128 = -n[..d - 1]
                    .iter()
                    .zip(&prefix)
                    .map(|(&a, &b)| a as i128 * b as i128)
                    .sum::<i128>();
                let nd = n[d - 1] as i128;
                match nd.cmp(&0) {
                    std::cmp::Ordering::Greater => zlo = zlo.max(ceil_div(c, nd)),
                    std::cmp::Ordering::Less => zhi = zhi.min(floor_div(c, nd)),
                    std::cmp::Ordering::Equal => ok &= c <= 0,
                }
            }
            let up: f64 = self.u[..d - 1].iter().zip(&prefix).map(|(a, &b)| a * b as f64).sum();
            let rest = self.t - up;
            if ud > 0.0 {
                zhi = zhi.min(((rest + tol) / ud).floor() as i128);
            } else if ud < 0.0 {
                zlo = zlo.max(((rest + tol) / ud).ceil() as i128);
            } else {
                ok &= rest + tol >= 0.0;
            }
            if ok && zlo <= zhi {
                f(&prefix, zlo as i64, zhi as i64);
            }
            let mut i = d - 1;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                if prefix[i] < hi[i] {
                    prefix[i] += 1;
                    break;
                }
                prefix[i] = lo[i];
            }
        }
    }

    /// Number of lattice points (all, including the origin) in the rows.
    fn visit_count(&self) -> u128 {
        let mut n = 0u128;
        self.for_each_row(|_, a, b| n += (b - a + 1) as u128);
        n
    }

    /// Call `f(x, u·x)` for every selected point, in lexicographic order.
    ///
    /// # Errors
    /// [`Error::Budget`] if more than `budget` points would be visited.
    pub fn for_each_point(&self, budget: u128, mut f: impl FnMut(&[i64], f64)) -> Result<()> {
        let needed = self.visit_count();
        if needed > budget {
            return Err(Error::Budget {
                what: "lattice points",
                needed,
                budget,
            });
        }
        let d = self.cone.dim();
        let mut x = vec![0i64; d];
        let ud = self.u[d - 1];
        self.for_each_row(|prefix, zlo, zhi| {
            x[..d - 1].copy_from_slice(prefix);
            let g = gcd_slice(prefix);
            let up: f64 = self.u[..d - 1].iter().zip(prefix).map(|(a, &b)| a * b as f64).sum();
            for z in zlo..=zhi {
                if self.primitive_only {
                    if g.gcd(&z) != 1 {
                        continue;
                    }
                } else if g == 0 && z == 0 {
                    continue;
                }
                x[d - 1] = z;
                f(&x, up + ud * z as f64);
            }
        });
        Ok(())
    }

    /// Sum of `weight(x) · exp(-beta u·x)` over the selected points, with the
    /// exponential advanced by a running product along each row.
    fn exp_weighted_sum(&self, beta: f64, budget: u128, weight: &dyn Fn(&[i64]) -> f64) -> Result<(f64, u64)> {
        let needed = self.visit_count();
        if needed > budget {
            return Err(Error::Budget {
                what: "lattice points",
                needed,
                budget,
            });
        }
        let d = self.cone.dim();
        let mut x = vec![0i64; d];
        let ud = self.u[d - 1];
        let step = (-beta * ud).exp();
        let mut total = 0.0;
        let mut count = 0u64;
        self.for_each_row(|prefix, zlo, zhi| {
            x[..d - 1].copy_from_slice(prefix);
            let g = gcd_slice(prefix);
            let up: f64 = self.u[..d - 1].iter().zip(prefix).map(|(a, &b)| a * b as f64).sum();
            let mut e = (-beta * (up + ud * zlo as f64)).exp();
            let mut row = 0.0;
            for z in zlo..=zhi {
                let keep = if self.primitive_only { g.gcd(&z) == 1 } else { g != 0 || z != 0 };
                if keep {
                    x[d - 1] = z;
                    row += weight(&x) * e;
                    count += 1;
                }
                e *= step;
            }
            total += row;
        });
        Ok((total, count))
    }
}

/// All selected points of a query, lexicographically ordered.
///
/// # Errors
/// Budget exceeded.
pub fn enumerate_points(q: &TruncatedConeQuery<'_>) -> Result<Vec<Vec<i64>>> {
    enumerate_points_with_budget(q, DEFAULT_POINT_BUDGET)
}

/// [`enumerate_points`] with an explicit point budget.
pub fn enumerate_points_with_budget(q: &TruncatedConeQuery<'_>, budget: u128) -> Result<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    q.for_each_point(budget, |x, _| out.push(x.to_vec()))?;
    Ok(out)
}

/// Fraction of primitive vectors in `[1, N]^d`.
pub fn primitive_density(n: u64, d: usize) -> f64 {
    fn rec(n: i64, left: usize, g: i64) -> u64 {
        if left == 0 {
            return u64::from(g == 1);
        }
        if g == 1 {
            return (n as u64).pow(left as u32);
        }
        (1..=n).map(|x| rec(n, left - 1, g.gcd(&x))).sum()
    }
    if n == 0 || d == 0 {
        return 0.0;
    }
    rec(n as i64, d, 0) as f64 / (n as f64).powi(d as i32)
}

/// Lipschitz test functions for the cubature check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TestFunction {
    Constant(i64),
    Coordinate(usize),
    Norm,
}

impl TestFunction {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            Self::Constant(c) => c as f64,
            Self::Coordinate(i) => x[i],
            Self::Norm => norm(x),
        }
    }

    /// Smallest Lipschitz constant.
    pub fn lipschitz(&self) -> f64 {
        match self {
            Self::Constant(_) => 0.0,
            _ => 1.0,
        }
    }

    /// `sup_K |f|` for a polytope with the given vertices (attained at a vertex
    /// since `|f|` is convex).
    pub fn sup_abs(&self, vertices: &[Vec<i64>]) -> f64 {
        vertices
            .iter()
            .map(|v| self.eval(&v.iter().map(|&x| x as f64).collect::<Vec<_>>()).abs())
            .fold(0.0, f64::max)
    }
}

/// Result of comparing a lattice sum with an integral.
#[derive(Clone, Debug, Serialize)]
pub struct CubatureReport {
    pub lattice_sum: f64,
    pub integral: f64,
    pub lhs: f64,
    pub bound: f64,
    pub pass: bool,
    pub points: u64,
}

/// Compare `Σ_{x ∈ K ∩ Z^d} f(x)` with `int_K f` against the cubature bound
/// `M (√d/2) L^d + 4 d! (L+1)^(d-1) sup_K |f|`.
///
/// `K` is the convex hull of `vertices`, which must be in convex position and
/// inside `[-L/2, L/2]^d`. A single point is accepted as a degenerate polytope.
/// Sums and integrals of constant and coordinate functions are exact.
///
/// # Errors
/// Points not in convex position, `K` outside the box, or unsupported dimension.
pub fn cubature_check(vertices: &[Vec<i64>], f: TestFunction, m: f64, l: f64) -> Result<CubatureReport> {
    let d = vertices.first().map_or(0, Vec::len);
    if !(2..=3).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    for v in vertices {
        check_dim(d, v.len())?;
        if v.iter().any(|&x| (x as f64).abs() > l / 2.0) {
            return Err(Error::InvalidInput("polytope leaves the box [-L/2, L/2]^d".into()));
        }
    }
    let sup = f.sup_abs(vertices);
    let bound = m * (d as f64).sqrt() / 2.0 * l.powi(d as i32)
        + 4.0 * factorial(d) * (l + 1.0).powi(d as i32 - 1) * sup;
    let mut uniq = vertices.to_vec();
    uniq.sort();
    uniq.dedup();
    if uniq.len() == 1 {
        let s = f.eval(&to_f64_vec(&crate::arith::to_field::<f64>(&uniq[0])));
        return Ok(CubatureReport {
            lattice_sum: s,
            integral: 0.0,
            lhs: s.abs(),
            bound,
            pass: s.abs() <= bound,
            points: 1,
        });
    }
    let hull = convex_hull(&uniq)?;
    if hull.vertices.len() != uniq.len() {
        return Err(Error::NonConvex);
    }
    let (sum, integral, lhs, points) = lattice_sum_and_integral(&hull, f);
    Ok(CubatureReport {
        lattice_sum: sum,
        integral,
        lhs,
        bound,
        pass: lhs <= bound,
        points,
    })
}

fn lattice_sum_and_integral(hull: &Hull, f: TestFunction) -> (f64, f64, f64, u64) {
    let d = hull.dim;
    let lo: Vec<i64> = (0..d).map(|i| hull.vertices.iter().map(|v| v[i]).min().unwrap()).collect();
    let hi: Vec<i64> = (0..d).map(|i| hull.vertices.iter().map(|v| v[i]).max().unwrap()).collect();
    let mut x = lo.clone();
    let mut exact_sum = Rational::from_i64(0);
    let mut float_sum = 0.0;
    let mut points = 0u64;
    'outer: loop {
        if hull.contains(&x) {
            points += 1;
            match f {
                TestFunction::Constant(c) => exact_sum += Rational::from_i64(c),
                TestFunction::Coordinate(i) => exact_sum += Rational::from_i64(x[i]),
                TestFunction::Norm => float_sum += norm(&to_f64_vec(&crate::arith::to_field::<f64>(&x))),
            }
        }
        for i in (0..d).rev() {
            if x[i] < hi[i] {
                x[i] += 1;
                continue 'outer;
            }
            x[i] = lo[i];
        }
        break;
    }
    let simplices: Vec<Vec<Vec<Rational>>> = hull
        .simplices()
        .iter()
        .map(|s| s.iter().map(|&i| crate::arith::to_field(&hull.vertices[i])).collect())
        .collect();
    match f {
        TestFunction::Norm => {
            let integral: f64 = simplices
                .iter()
                .map(|s| {
                    let sf: Vec<Vec<f64>> = s.iter().map(|p| to_f64_vec(p)).collect();
                    simplex::integrate(&sf, &|x: &[f64]| norm(x), 6)
                })
                .sum();
            (float_sum, integral, (float_sum - integral).abs(), points)
        }
        _ => {
            let (vol, mom) = simplex::volume_and_moment(&simplices, d);
            let integral = match f {
                TestFunction::Constant(c) => vol * Rational::from_i64(c),
                TestFunction::Coordinate(i) => mom[i].clone(),
                TestFunction::Norm => unreachable!(),
            };
            let diff = num_traits::Signed::abs(&(exact_sum.clone() - integral.clone()));
            (Field::to_f64(&exact_sum), Field::to_f64(&integral), Field::to_f64(&diff), points)
        }
    }
}

/// Random lattice polytope in `[-L/2, L/2]^d`: hull vertices of a few random points.
pub fn random_lattice_polytope(d: usize, l: i64, rng: &mut Stream) -> Vec<Vec<i64>> {
    loop {
        let k = 4 + (rng.next_u64() % 8) as usize;
        let pts: Vec<Vec<i64>> = (0..k)
            .map(|_| (0..d).map(|_| rng.range_i64(-l / 2, l / 2)).collect())
            .collect();
        if let Ok(h) = convex_hull(&pts) {
            return h.vertices;
        }
    }
}

/// Positively homogeneous test functions of degree `h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Homogeneous {
    One,
    Norm,
    Coordinate(usize),
    NormCubed,
}

impl Homogeneous {
    pub fn degree(&self) -> u32 {
        match self {
            Self::One => 0,
            Self::Norm | Self::Coordinate(_) => 1,
            Self::NormCubed => 3,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            Self::One => 1.0,
            Self::Norm => norm(x),
            Self::Coordinate(i) => x[i],
            Self::NormCubed => norm(x).powi(3),
        }
    }
}

/// Weighted primitive lattice sum against the corresponding integral.
#[derive(Clone, Debug, Serialize)]
pub struct WeightedSumReport {
    pub beta: f64,
    pub sum: f64,
    pub integral: f64,
    /// `|β^(d+h) ζ(d) sum - integral|`.
    pub scaled_gap: f64,
    /// Continuum estimate of the truncated tail, relative to the integral.
    pub tail_estimate: f64,
    pub points: u64,
}

/// `int_C f(x) exp(-u·x) dx` for a homogeneous `f`, per fan piece.
///
/// On a piece with generators `w_i` and `s_i = u·w_i` the integral is
/// `|det W| / Π s_i · Γ(d+h) / (d-1)! · avg_Δ f`, the average taken over the
/// simplex with vertices `w_i / s_i`.
pub fn cone_integral(cone: &PolyhedralCone, u: &[f64], f: Homogeneous) -> Result<f64> {
    check_dim(cone.dim(), u.len())?;
    if !cone.dual_contains(u)? {
        return Err(Error::OutsideDual);
    }
    let d = cone.dim();
    let gamma = factorial(d - 1 + f.degree() as usize) / factorial(d - 1);
    let mut total = 0.0;
    for piece in cone.simplices() {
        let mut scale = piece.abs_det as f64;
        let mut verts = Vec::with_capacity(d);
        for g in cone.piece_generators(piece) {
            let gf: Vec<f64> = g.iter().map(|&x| x as f64).collect();
            let s = dot(&gf, u);
            scale /= s;
            verts.push(gf.into_iter().map(|x| x / s).collect::<Vec<f64>>());
        }
        let avg = match f {
            Homogeneous::One => 1.0,
            Homogeneous::Coordinate(i) => verts.iter().map(|v| v[i]).sum::<f64>() / d as f64,
            _ => simplex::average(&verts, &|x: &[f64]| f.eval(x), 8),
        };
        total += scale * gamma * avg;
    }
    Ok(total)
}

/// `Γ(a, x) / Γ(a)` for integer `a >= 1`.
fn upper_gamma_ratio(a: u32, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..a {
        term *= x / k as f64;
        sum += term;
    }
    (-x).exp() * sum
}

/// Compare `β^(d+h) ζ(d) Σ_{x ∈ P ∩ C} f(x) exp(-β u·x)` with `int_C f exp(-u·x)`.
///
/// The sum is truncated where `exp(-β u·x) < 1e-16`.
///
/// # Errors
/// `β` outside `(0, 1]`, `u` outside the dual, or the point budget exceeded.
pub fn weighted_sum_vs_integral(
    cone: &PolyhedralCone,
    u: &[f64],
    beta: f64,
    f: Homogeneous,
    budget: u128,
) -> Result<WeightedSumReport> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidInput(format!("beta must lie in (0, 1], got {beta}")));
    }
    let d = cone.dim();
    let cutoff = 1e16f64.ln();
    let q = TruncatedConeQuery::new(cone, u, cutoff / beta, true)?;
    let (sum, points) = q.exp_weighted_sum(beta, budget, &|x: &[i64]| {
        let xf: Vec<f64> = x.iter().map(|&c| c as f64).collect();
        f.eval(&xf)
    })?;
    let integral = cone_integral(cone, u, f)?;
    let h = f.degree();
    let scaled = beta.powi((d as u32 + h) as i32) * zeta(d as u32) * sum;
    Ok(WeightedSumReport {
        beta,
        sum,
        integral,
        scaled_gap: (scaled - integral).abs(),
        tail_estimate: upper_gamma_ratio(d as u32 + h, cutoff),
        points,
    })
}
