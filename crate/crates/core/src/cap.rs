//! Minimal caps of a cone.
//!
//! For an interior vector `a`, the cap direction `u = u(C,a)` is the dual vector
//! for which `a` is the centroid of the section `C(u = 1)`. Scaling by `λ`
//! gives the cap `Q(C,a) = C(u <= λ)` with first moment `a`, and
//! `q(C,a) = Vol Q(C,a)`.

use serde::Serialize;

use crate::arith::{dot, dot_f, factorial, norm, rational_from_f64, to_f64_vec, Field, Rational};
use crate::cone::PolyhedralCone;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{cholesky_solve, columns, solve};
use crate::rng::Stream;
use crate::simplex::{self, Simplex};

/// Newton iteration cap.
pub const MAX_NEWTON_ITERATIONS: usize = 200;
/// Stopping rule: `‖∇F‖ <= NEWTON_TOLERANCE · ‖a‖`.
pub const NEWTON_TOLERANCE: f64 = 1e-10;

/// A bounded polytope stored as a vertex list and a triangulation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapPolytope<S> {
    pub vertices: Vec<Vec<S>>,
    pub simplices: Vec<Simplex<S>>,
}

impl<S: Field> CapPolytope<S> {
    pub fn dim(&self) -> usize {
        self.vertices.first().map_or(0, Vec::len)
    }

    pub fn volume(&self) -> S {
        self.simplices
            .iter()
            .fold(S::zero(), |acc, s| acc + simplex::volume(s))
    }
}

/// Solution of the minimal-cap problem for `(C, a)`.
#[derive(Clone, Debug, Serialize)]
pub struct CapSolution {
    pub d: usize,
    pub a: Vec<f64>,
    /// Cap direction: the centroid of `C(u = 1)` is `a`.
    pub u: Vec<f64>,
    /// `u` as exact rationals when the minimizer is rational.
    #[serde(skip)]
    pub u_exact: Option<Vec<Rational>>,
    /// Scale with `int_{C(u <= λ)} x dx = a`.
    pub lambda: f64,
    /// `Vol C(u <= 1)`.
    pub vol_unit: f64,
    #[serde(skip)]
    pub vol_unit_exact: Option<Rational>,
    /// `q(C,a) = Vol C(u <= λ)`.
    pub q: f64,
    /// Dual vector with `(d+1)! int_{C(u_model <= 1)} x dx = a`;
    /// the minimizer of `Λ(v) + v·a`.
    pub u_model: Vec<f64>,
    pub cap_unit: CapPolytope<f64>,
    pub iterations: usize,
    /// `‖∇F‖ / ‖a‖` at the returned point (zero on the exact path).
    pub residual: f64,
}

impl CapSolution {
    /// `C(u <= 1)` in exact arithmetic, when `u` is rational.
    pub fn cap_unit_exact(&self, cone: &PolyhedralCone) -> Option<CapPolytope<Rational>> {
        let u = self.u_exact.as_ref()?;
        cap_polytope(cone, u, &Rational::from_i64(1)).ok()
    }

    /// `a` as exact rationals.
    pub fn a_exact(&self) -> Vec<Rational> {
        self.a
            .iter()
            .map(|&x| rational_from_f64(x).expect("finite"))
            .collect()
    }
}

/// The cap `C(u <= t)` triangulated along the fan of the cone.
///
/// # Errors
/// [`Error::OutsideDual`] when `u` is not in the open dual (the cap is unbounded).
pub fn cap_polytope<S: Field>(cone: &PolyhedralCone, u: &[S], t: &S) -> Result<CapPolytope<S>> {
    check_dim(cone.dim(), u.len())?;
    if !cone.dual_contains(u)? {
        return Err(Error::OutsideDual);
    }
    let d = cone.dim();
    let apexes: Vec<Vec<S>> = cone
        .generators()
        .iter()
        .map(|g| {
            let gf: Vec<S> = crate::arith::to_field(g);
            let s = t.clone() / dot(&gf, u);
            gf.into_iter().map(|x| x * s.clone()).collect()
        })
        .collect();
    let origin = vec![S::zero(); d];
    let simplices = cone
        .simplices()
        .iter()
        .map(|p| {
            let mut s = vec![origin.clone()];
            s.extend(p.indices.iter().map(|&i| apexes[i].clone()));
            s
        })
        .collect();
    let mut vertices = vec![origin];
    vertices.extend(apexes);
    Ok(CapPolytope { vertices, simplices })
}

/// `int_P x dx` over a triangulated polytope; zero for an empty one.
pub fn moment_integral<S: Field>(poly: &CapPolytope<S>) -> Vec<S> {
    let d = poly.dim();
    simplex::volume_and_moment(&poly.simplices, d).1
}

fn check_interior_f(cone: &PolyhedralCone, a: &[f64]) -> Result<()> {
    check_dim(cone.dim(), a.len())?;
    if !cone.contains_strictly(a)? {
        return Err(Error::NotInterior);
    }
    Ok(())
}

/// Solve the cap problem for a rational target.
///
/// Simplicial cones take an exact rational path; other cones minimize
/// `Λ(v) + v·a` by damped Newton.
///
/// # Errors
/// `a` not in the interior of the cone, or Newton failing to converge.
pub fn solve_cap(cone: &PolyhedralCone, a: &[Rational]) -> Result<CapSolution> {
    check_dim(cone.dim(), a.len())?;
    if !cone.contains_strictly(a)? {
        return Err(Error::NotInterior);
    }
    if cone.is_simplicial() {
        return solve_simplicial(cone, a);
    }
    solve_newton(cone, &to_f64_vec(a))
}

/// Solve the cap problem for a float target.
pub fn solve_cap_f64(cone: &PolyhedralCone, a: &[f64]) -> Result<CapSolution> {
    check_interior_f(cone, a)?;
    if cone.is_simplicial() {
        let ar: Option<Vec<Rational>> = a.iter().map(|&x| rational_from_f64(x)).collect();
        let ar = ar.ok_or_else(|| Error::InvalidInput("non-finite target".into()))?;
        return solve_simplicial(cone, &ar);
    }
    solve_newton(cone, a)
}

/// `q(C,a)`.
pub fn q_value(cone: &PolyhedralCone, a: &[Rational]) -> Result<f64> {
    Ok(solve_cap(cone, a)?.q)
}

fn lambda_and_q(d: usize, vol_unit: f64) -> (f64, f64) {
    let df = d as f64;
    let lambda = ((df + 1.0) / df / vol_unit).powf(1.0 / (df + 1.0));
    let q = ((1.0 + 1.0 / df).powi(d as i32) * vol_unit).powf(1.0 / (df + 1.0));
    (lambda, q)
}

fn solve_simplicial(cone: &PolyhedralCone, a: &[Rational]) -> Result<CapSolution> {
    let d = cone.dim();
    let gens: Vec<Vec<Rational>> = cone
        .generators()
        .iter()
        .map(|g| crate::arith::to_field(g))
        .collect();
    let w = columns(&gens);
    let alpha = solve(w, a.to_vec()).ok_or(Error::Degenerate { rank: d - 1, dim: d })?;
    if alpha.iter().any(|x| !x.is_pos()) {
        return Err(Error::NotInterior);
    }
    let dr = Rational::from_i64(d as i64);
    let rhs: Vec<Rational> = alpha
        .iter()
        .map(|x| Rational::from_i64(1) / (dr.clone() * x.clone()))
        .collect();
    let u = solve(gens.clone(), rhs).ok_or(Error::Degenerate { rank: d - 1, dim: d })?;
    let abs_det = Rational::from_i128(cone.simplices()[0].abs_det);
    let mut vol = abs_det;
    for x in &alpha {
        vol = vol * dr.clone() * x.clone();
    }
    vol = vol / Rational::from_i64(crate::arith::factorial_i(d));
    let vol_f = Field::to_f64(&vol);
    let (lambda, q) = lambda_and_q(d, vol_f);
    let uf = to_f64_vec(&u);
    let scale = (d as f64 * factorial(d) * vol_f).powf(1.0 / (d as f64 + 1.0));
    let u_model = uf.iter().map(|x| x * scale).collect();
    let cap_unit = cap_polytope(cone, &uf, &1.0)?;
    Ok(CapSolution {
        d,
        a: to_f64_vec(a),
        u: uf,
        u_exact: Some(u),
        lambda,
        vol_unit: vol_f,
        vol_unit_exact: Some(vol),
        q,
        u_model,
        cap_unit,
        iterations: 0,
        residual: 0.0,
    })
}

fn starting_point(cone: &PolyhedralCone, a: &[f64]) -> Result<Vec<f64>> {
    let d = cone.dim();
    let mut gtg = vec![vec![0.0; d]; d];
    let mut rhs = vec![0.0; d];
    for g in cone.generators() {
        for r in 0..d {
            rhs[r] += g[r] as f64;
            for c in 0..d {
                gtg[r][c] += g[r] as f64 * g[c] as f64;
            }
        }
    }
    let mut v = cholesky_solve(&gtg, &rhs).unwrap_or_default();
    if v.len() != d || !cone.dual_contains(&v)? || cone.laplace_value(&v).is_err() {
        v = cone.interior_dual_vector().iter().map(|&x| x as f64).collect();
    }
    let l = cone.laplace_value(&v)?;
    let b = dot_f(&v, a);
    let s = (d as f64 * l / b).powf(1.0 / (d as f64 + 1.0));
    Ok(v.into_iter().map(|x| x * s).collect())
}

fn solve_newton(cone: &PolyhedralCone, a: &[f64]) -> Result<CapSolution> {
    let d = cone.dim();
    let na = norm(a);
    let objective = |v: &[f64]| -> Option<f64> {
        if !cone.dual_contains(v).ok()? {
            return None;
        }
        cone.laplace_value(v).ok().map(|l| l + dot_f(v, a))
    };
    let mut v = starting_point(cone, a)?;
    let mut iterations = 0;
    let mut residual;
    loop {
        let lap = cone.laplace(&v)?;
        let grad: Vec<f64> = lap.gradient.iter().zip(a).map(|(g, x)| g + x).collect();
        residual = norm(&grad) / na;
        if residual <= NEWTON_TOLERANCE {
            break;
        }
        if iterations >= MAX_NEWTON_ITERATIONS {
            return Err(Error::NoConvergence { iterations, residual });
        }
        iterations += 1;
        let neg: Vec<f64> = grad.iter().map(|x| -x).collect();
        let step = cholesky_solve(&lap.hessian, &neg).ok_or(Error::NoConvergence {
            iterations,
            residual,
        })?;
        let f0 = lap.value + dot_f(&v, a);
        let slope = dot_f(&grad, &step);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let cand: Vec<f64> = v.iter().zip(&step).map(|(x, s)| x + t * s).collect();
            if let Some(f1) = objective(&cand) {
                if f1 <= f0 + 1e-4 * t * slope {
                    accepted = Some(cand);
                    break;
                }
                // Near the optimum the decrease drowns in rounding; accept a
                // step that still shrinks the gradient.
                if (f1 - f0).abs() <= 1e-13 * f0.abs() {
                    if let Ok(l1) = cone.laplace(&cand) {
                        let g1: Vec<f64> = l1.gradient.iter().zip(a).map(|(g, x)| g + x).collect();
                        if norm(&g1) < norm(&grad) {
                            accepted = Some(cand);
                            break;
                        }
                    }
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some(c) => v = c,
            None => return Err(Error::NoConvergence { iterations, residual }),
        }
    }
    let l = cone.laplace_value(&v)?;
    let c = 1.0 / (d as f64 * l);
    let u: Vec<f64> = v.iter().map(|x| x * c).collect();
    let vol_unit = cone.laplace_value(&u)? / factorial(d);
    let (lambda, q) = lambda_and_q(d, vol_unit);
    let cap_unit = cap_polytope(cone, &u, &1.0)?;
    Ok(CapSolution {
        d,
        a: a.to_vec(),
        u,
        u_exact: None,
        lambda,
        vol_unit,
        vol_unit_exact: None,
        q,
        u_model: v,
        cap_unit,
        iterations,
        residual,
    })
}

/// Centroid of the section `C(u = 1)`.
pub fn section_centroid(cone: &PolyhedralCone, u: &[f64]) -> Result<Vec<f64>> {
    let poly = cap_polytope(cone, u, &1.0)?;
    let d = cone.dim();
    let mut acc = vec![0.0; d];
    let mut total = 0.0;
    for s in &poly.simplices {
        let face = &s[1..];
        let w = simplex::embedded_volume(face);
        total += w;
        for p in face {
            for (a, x) in acc.iter_mut().zip(p) {
                *a += w * x / d as f64;
            }
        }
    }
    Ok(acc.into_iter().map(|x| x / total).collect())
}

/// Outcome of the cap round trip `Vol C(w <= s) = q(C, a_w)`.
#[derive(Clone, Debug, Serialize)]
pub struct RoundtripReport {
    pub cap_volume: f64,
    pub moment: Vec<f64>,
    pub q: f64,
    pub rel_error: f64,
    pub passed: bool,
}

/// Every cap is the minimal cap of its own first moment.
pub fn max_cap_roundtrip(cone: &PolyhedralCone, w: &[Rational], s: &Rational) -> Result<RoundtripReport> {
    let poly = cap_polytope(cone, w, s)?;
    let vol = poly.volume();
    let m = moment_integral(&poly);
    let q = solve_cap(cone, &m)?.q;
    let vf = Field::to_f64(&vol);
    let rel_error = (vf - q).abs() / vf;
    Ok(RoundtripReport {
        cap_volume: vf,
        moment: to_f64_vec(&m),
        q,
        rel_error,
        passed: rel_error <= 1e-9,
    })
}

/// Verdict of a Monte Carlo non-cap comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NonCapStatus {
    /// `Vol S < q(C, int_S x)` with margin above three standard errors.
    Strict,
    /// Margin within three standard errors of zero.
    Inconclusive,
    /// `Vol S > q` beyond three standard errors.
    Violated,
}

/// Monte Carlo comparison for `S = C(w <= s) ∩ {w2·x <= s2}`.
#[derive(Clone, Debug, Serialize)]
pub struct NonCapReport {
    pub volume: f64,
    pub moment: Vec<f64>,
    pub q: f64,
    /// `q - Vol S`.
    pub margin: f64,
    /// Standard error of the margin from batch means.
    pub margin_se: f64,
    /// Exact `q - Vol S` from rational clipping.
    pub exact_margin: f64,
    pub status: NonCapStatus,
}

fn uniform_in_simplex(s: &[Vec<f64>], rng: &mut Stream, out: &mut [f64]) {
    let mut e: Vec<f64> = (0..s.len()).map(|_| -rng.uniform().ln()).collect();
    let tot: f64 = e.iter().sum();
    e.iter_mut().for_each(|x| *x /= tot);
    out.iter_mut().for_each(|x| *x = 0.0);
    for (l, p) in e.iter().zip(s) {
        for (o, v) in out.iter_mut().zip(p) {
            *o += l * v;
        }
    }
}

/// Check `Vol S < q(C, int_S x dx)` for a cap cut by a second half-space.
///
/// Volume and moment of `S` are estimated from `samples` uniform points of the
/// cap `C(w <= s)`; the standard error comes from 20 batch means.
pub fn non_cap_check(
    cone: &PolyhedralCone,
    w: &[Rational],
    s: &Rational,
    w2: &[Rational],
    s2: &Rational,
    samples: usize,
    seed: u64,
) -> Result<NonCapReport> {
    check_dim(cone.dim(), w2.len())?;
    let d = cone.dim();
    let cap = cap_polytope(cone, w, s)?;
    let neg: Vec<Rational> = w2.iter().map(|x| -x.clone()).collect();
    let clipped = simplex::clip_all(&cap.simplices, &neg, &(-s2.clone()));
    let (ev, em) = simplex::volume_and_moment(&clipped, d);
    let exact_q = solve_cap(cone, &em)?.q;
    let exact_margin = exact_q - Field::to_f64(&ev);

    let capf: Vec<Simplex<f64>> = cap
        .simplices
        .iter()
        .map(|s| s.iter().map(|p| to_f64_vec(p)).collect())
        .collect();
    let vols: Vec<f64> = capf.iter().map(|s| simplex::volume(s)).collect();
    let v0: f64 = vols.iter().sum();
    let mut cdf = Vec::with_capacity(vols.len());
    let mut acc = 0.0;
    for v in &vols {
        acc += v / v0;
        cdf.push(acc);
    }
    let w2f = to_f64_vec(w2);
    let s2f = Field::to_f64(s2);
    const BATCHES: usize = 20;
    let per = samples.div_ceil(BATCHES);
    let mut rng = Stream::new(seed);
    let mut x = vec![0.0; d];
    let mut batch_diff = Vec::with_capacity(BATCHES);
    let mut tot_hits = 0.0;
    let mut tot_mom = vec![0.0; d];
    for _ in 0..BATCHES {
        let mut hits = 0.0;
        let mut mom = vec![0.0; d];
        for _ in 0..per {
            let r = rng.uniform0();
            let k = cdf.iter().position(|&c| r < c).unwrap_or(cdf.len() - 1);
            uniform_in_simplex(&capf[k], &mut rng, &mut x);
            if dot_f(&w2f, &x) <= s2f {
                hits += 1.0;
                for (m, xi) in mom.iter_mut().zip(&x) {
                    *m += xi;
                }
            }
        }
        tot_hits += hits;
        for (t, m) in tot_mom.iter_mut().zip(&mom) {
            *t += m;
        }
        let vol = v0 * hits / per as f64;
        let m: Vec<f64> = mom.iter().map(|x| v0 * x / per as f64).collect();
        let q = solve_cap_f64(cone, &m)?.q;
        batch_diff.push(q - vol);
    }
    let n = (per * BATCHES) as f64;
    let volume = v0 * tot_hits / n;
    let moment: Vec<f64> = tot_mom.iter().map(|x| v0 * x / n).collect();
    let q = solve_cap_f64(cone, &moment)?.q;
    let margin = q - volume;
    let mean = batch_diff.iter().sum::<f64>() / BATCHES as f64;
    let var = batch_diff.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (BATCHES as f64 - 1.0);
    let margin_se = (var / BATCHES as f64).sqrt();
    let status = if margin > 3.0 * margin_se {
        NonCapStatus::Strict
    } else if margin < -3.0 * margin_se {
        NonCapStatus::Violated
    } else {
        NonCapStatus::Inconclusive
    };
    Ok(NonCapReport {
        volume,
        moment,
        q,
        margin,
        margin_se,
        exact_margin,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn orthant_plane_exact() {
        let c = PolyhedralCone::orthant(2).unwrap();
        let s = solve_cap(&c, &[rat(1, 1), rat(1, 1)]).unwrap();
        assert_eq!(s.u_exact, Some(vec![rat(1, 2), rat(1, 2)]));
        assert_eq!(s.vol_unit_exact, Some(rat(2, 1)));
        assert!((s.q - 4.5f64.cbrt()).abs() < 1e-12);
        assert!((s.u_model[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn orthant_space_exact() {
        let c = PolyhedralCone::orthant(3).unwrap();
        let s = solve_cap(&c, &vec![rat(1, 1); 3]).unwrap();
        assert_eq!(s.u_exact, Some(vec![rat(1, 3); 3]));
        assert_eq!(s.vol_unit_exact, Some(rat(27, 6)));
        assert!((s.q - (64.0f64 / 6.0).powf(0.25)).abs() < 1e-12);
        assert!((s.q - 1.80720).abs() < 1e-5);
    }

    #[test]
    fn scaled_target() {
        let c = PolyhedralCone::orthant(2).unwrap();
        let q = q_value(&c, &[rat(2, 1), rat(2, 1)]).unwrap();
        assert!((q - 18f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn polytopes_and_moments() {
        let c = PolyhedralCone::orthant(2).unwrap();
        let p = cap_polytope(&c, &[rat(1, 1), rat(1, 1)], &rat(1, 1)).unwrap();
        assert_eq!(p.volume(), rat(1, 2));
        assert_eq!(moment_integral(&p), vec![rat(1, 6), rat(1, 6)]);
        let p = cap_polytope(&c, &[rat(1, 2), rat(1, 2)], &rat(1, 1)).unwrap();
        assert_eq!(p.volume(), rat(2, 1));
        assert_eq!(moment_integral(&p), vec![rat(4, 3), rat(4, 3)]);
        let c3 = PolyhedralCone::orthant(3).unwrap();
        let p = cap_polytope(&c3, &vec![rat(1, 1); 3], &rat(1, 1)).unwrap();
        assert_eq!(p.volume(), rat(1, 6));
        assert_eq!(moment_integral(&p), vec![rat(1, 24); 3]);
        assert_eq!(
            cap_polytope(&c, &[rat(1, 1), rat(0, 1)], &rat(1, 1)).unwrap_err(),
            Error::OutsideDual
        );
    }

    #[test]
    fn moment_of_area_two_triangle_by_quadrature() {
        let t = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0]];
        let m0 = simplex::integrate(&t, &|x: &[f64]| x[0], 0);
        assert!((m0 - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn not_interior() {
        let c = PolyhedralCone::orthant(2).unwrap();
        assert_eq!(solve_cap(&c, &[rat(1, 1), rat(0, 1)]).unwrap_err(), Error::NotInterior);
    }

    #[test]
    fn newton_matches_exact_on_redundant_generator() {
        // Same cone as the orthant, but not simplicial as a generator list.
        let c = PolyhedralCone::new(vec![vec![1, 0], vec![1, 1], vec![0, 1]]).unwrap();
        assert!(!c.is_simplicial());
        let s = solve_cap_f64(&c, &[1.0, 2.0]).unwrap();
        let o = PolyhedralCone::orthant(2).unwrap();
        let e = solve_cap_f64(&o, &[1.0, 2.0]).unwrap();
        for i in 0..2 {
            assert!((s.u[i] - e.u[i]).abs() < 1e-10);
        }
        assert!((s.q - e.q).abs() < 1e-10);
    }

    #[test]
    fn gigena_conditions_on_octagon() {
        let c = crate::cone::regular_cone_approx(0.6, 8).unwrap();
        let a = [0.1, -0.05, 1.0];
        let s = solve_cap_f64(&c, &a).unwrap();
        let cen = section_centroid(&c, &s.u).unwrap();
        for i in 0..3 {
            assert!((cen[i] - a[i]).abs() < 1e-9, "{cen:?}");
        }
        let p = cap_polytope(&c, &s.u, &s.lambda).unwrap();
        let m = moment_integral(&p);
        for i in 0..3 {
            assert!((m[i] - a[i]).abs() < 1e-9);
        }
        assert!((p.volume() - s.q).abs() < 1e-9);
    }

    #[test]
    fn roundtrip_and_noncap_example() {
        let c = PolyhedralCone::orthant(2).unwrap();
        let r = max_cap_roundtrip(&c, &[rat(1, 1), rat(3, 1)], &rat(1, 1)).unwrap();
        assert!(r.passed, "{r:?}");
        let lam = solve_cap(&c, &[rat(1, 1), rat(1, 1)]).unwrap().lambda;
        let lam = rational_from_f64(lam).unwrap();
        assert!(max_cap_roundtrip(&c, &[rat(1, 1), rat(1, 1)], &lam).unwrap().passed);
        // The cut of this example is close to a cap: the deficit is about
        // 1e-3 of the volume, resolved exactly by clipping.
        let nc = non_cap_check(
            &c,
            &[rat(1, 1), rat(1, 1)],
            &rat(1, 1),
            &[rat(2, 1), rat(1, 1)],
            &rat(6, 5),
            200_000,
            1,
        )
        .unwrap();
        assert_ne!(nc.status, NonCapStatus::Violated, "{nc:?}");
        assert!(nc.exact_margin > 3e-4);
        let nc = non_cap_check(
            &c,
            &[rat(1, 1), rat(1, 1)],
            &rat(1, 1),
            &[rat(1, 1), rat(-1, 1)],
            &rat(0, 1),
            200_000,
            2,
        )
        .unwrap();
        assert_eq!(nc.status, NonCapStatus::Strict, "{nc:?}");
    }
}
