//! The limiting zonoid `T₀(C,k)`, support functions and limit-shape experiments.
//!
//! `T₀` has boundary map `t(v) = ∫_{Q ∩ {v·x >= 0}} x dx` with `Q = Q(C,k)`.
//! The integral is taken over the unit cap `C(u <= 1)` and rescaled so that
//! `t(v) = k` for `v` in the open dual.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{dot, dot_f, norm, rat, Field, Rational};
use crate::cap::{solve_cap, CapPolytope, CapSolution};
use crate::cone::PolyhedralCone;
use crate::error::{Error, Result};
use crate::gibbs::{ConditionedSampler, GibbsModel, ModelOptions};
use crate::multiset::GeneratorMultiset;
use crate::rng::Stream;
use crate::simplex::{self, Simplex};

/// Default net sizes.
pub const NET_SIZE_2D: usize = 4096;
pub const NET_SIZE_3D: usize = 65536;

/// `T₀` as a triangulated unit cap and a moment scale.
#[derive(Clone, Debug)]
pub struct LimitZonoid<S> {
    pub d: usize,
    simplices: Vec<Simplex<S>>,
    /// `(d+1) / (d · Vol C(u <= 1))`.
    scale: S,
}

impl LimitZonoid<Rational> {
    /// Exact zonoid; needs a rational cap direction.
    ///
    /// # Errors
    /// [`Error::InvalidInput`] when the cap direction is not rational.
    pub fn exact(cone: &PolyhedralCone, cap: &CapSolution) -> Result<Self> {
        let poly = cap
            .cap_unit_exact(cone)
            .ok_or_else(|| Error::InvalidInput("cap direction is not rational".into()))?;
        let vol = cap.vol_unit_exact.clone().unwrap_or_else(|| poly.volume());
        Ok(Self::from_cap(&poly, vol))
    }
}

impl LimitZonoid<f64> {
    /// Floating-point zonoid.
    pub fn from_solution(cap: &CapSolution) -> Self {
        Self::from_cap(&cap.cap_unit, cap.vol_unit)
    }
}

impl<S: Field> LimitZonoid<S> {
    fn from_cap(poly: &CapPolytope<S>, vol: S) -> Self {
        let d = poly.dim();
        let scale = S::from_i64(d as i64 + 1) / (S::from_i64(d as i64) * vol);
        Self {
            d,
            simplices: poly.simplices.clone(),
            scale,
        }
    }

    /// Boundary point `t(v)` with outer normal `v`; zero for `v ∈ -C°`.
    pub fn boundary(&self, v: &[S]) -> Vec<S> {
        let clipped = simplex::clip_all(&self.simplices, v, &S::zero());
        let (_, m) = simplex::volume_and_moment(&clipped, self.d);
        m.into_iter().map(|x| x * self.scale.clone()).collect()
    }

    /// `h_{T₀}(v) = v·t(v)`.
    pub fn support(&self, v: &[S]) -> S {
        dot(v, &self.boundary(v))
    }
}

/// `t(v)` for `T₀(C,k)`.
///
/// # Errors
/// Cap solver failures.
pub fn zonoid_boundary(cone: &PolyhedralCone, k: &[Rational], v: &[f64]) -> Result<Vec<f64>> {
    let cap = solve_cap(cone, k)?;
    Ok(LimitZonoid::from_solution(&cap).boundary(v))
}

/// `h_{T₀(C,k)}(v)`.
///
/// # Errors
/// Cap solver failures.
pub fn zonoid_support(cone: &PolyhedralCone, k: &[Rational], v: &[f64]) -> Result<f64> {
    let cap = solve_cap(cone, k)?;
    Ok(LimitZonoid::from_solution(&cap).support(v))
}

/// Result of [`boundary_equation_check`].
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryCheck {
    pub d: usize,
    pub max_residual: f64,
    pub checked: usize,
    /// Grid points outside the region where the equation applies.
    pub skipped: usize,
}

/// Evaluate the closed-form boundary equations of `T₀(R^d_+, 1)` at exact
/// boundary points.
///
/// For `d = 2` the directions are `(1, -r)` and `(-r, 1)` and the equations
/// are `(x+y)² = 4y` (for `x >= y`) and `(x+y)² = 4x` (for `x <= y`). For
/// `d = 3` the directions are `(tv, -sv, -tu)` with `s = 1-t`, `u = 1-v`, and
/// the equation is `(x+y+z)³ = 27yz`, valid where `x-2y+z >= 0` and
/// `x+y-2z >= 0`.
///
/// # Errors
/// `d` outside `{2, 3}` or `grid < 2`.
pub fn boundary_equation_check(d: usize, grid: usize) -> Result<BoundaryCheck> {
    if grid < 2 {
        return Err(Error::InvalidInput("grid needs at least 2 points".into()));
    }
    let cone = PolyhedralCone::orthant(d)?;
    let k = vec![rat(1, 1); d];
    let cap = solve_cap(&cone, &k)?;
    let z = LimitZonoid::exact(&cone, &cap)?;
    let mut max_residual: f64 = 0.0;
    let mut checked = 0;
    let mut skipped = 0;
    match d {
        2 => {
            let half = grid / 2;
            for i in 0..grid {
                let r = rat((i % half) as i64 + 1, 10);
                let (v, lower) = if i < half {
                    (vec![rat(1, 1), -r], true)
                } else {
                    (vec![-r, rat(1, 1)], false)
                };
                let p = z.boundary(&v);
                let (x, y) = (p[0].clone(), p[1].clone());
                let s = x.clone() + y.clone();
                let rhs = if lower { y } else { x };
                let res = s.clone() * s - rat(4, 1) * rhs;
                max_residual = max_residual.max(Field::to_f64(&res).abs());
                checked += 1;
            }
        }
        3 => {
            let side = (grid as f64).sqrt().ceil() as i64;
            let mut count = 0;
            'outer: for a in 1..=side {
                for b in 1..=side {
                    if count == grid {
                        break 'outer;
                    }
                    count += 1;
                    let t = rat(a, side + 1);
                    let vv = rat(b, side + 1);
                    let s = rat(1, 1) - t.clone();
                    let u = rat(1, 1) - vv.clone();
                    let dir = vec![t.clone() * vv.clone(), -(s * vv), -(t * u)];
                    let p = z.boundary(&dir);
                    let (x, y, w) = (p[0].clone(), p[1].clone(), p[2].clone());
                    let two = rat(2, 1);
                    let in_region = !(x.clone() - two.clone() * y.clone() + w.clone()).is_neg()
                        && !(x.clone() + y.clone() - two * w.clone()).is_neg();
                    if !in_region {
                        skipped += 1;
                        continue;
                    }
                    let sum = x + y.clone() + w.clone();
                    let res = sum.clone() * sum.clone() * sum - rat(27, 1) * y * w;
                    max_residual = max_residual.max(Field::to_f64(&res).abs());
                    checked += 1;
                }
            }
        }
        _ => return Err(Error::UnsupportedDimension(d)),
    }
    Ok(BoundaryCheck {
        d,
        max_residual,
        checked,
        skipped,
    })
}

/// `h_T(v) = Σ ω(x) max(x·v, 0)`.
pub fn zonotope_support(w: &GeneratorMultiset, v: &[f64]) -> f64 {
    w.iter()
        .map(|(x, m)| {
            let s: f64 = x.iter().zip(v).map(|(&a, b)| a as f64 * b).sum();
            m as f64 * s.max(0.0)
        })
        .sum()
}

/// [`zonotope_support`] for an integer direction, exactly.
pub fn zonotope_support_exact(w: &GeneratorMultiset, v: &[i64]) -> i128 {
    w.iter()
        .map(|(x, m)| {
            let s: i128 = x.iter().zip(v).map(|(&a, &b)| a as i128 * b as i128).sum();
            m as i128 * s.max(0)
        })
        .sum()
}

/// `h_{Q₀}(v) = ½ ∫_{t·O^d} |x·v| dx` with `t^(d+1) = (d+1)! 2^(1-d)`.
///
/// Each orthant simplex of the cross-polytope is split by `x·v = 0`.
///
/// # Errors
/// `d` outside `{2, 3}` or a length mismatch.
pub fn cube_zonoid_support<S: Field>(d: usize, v: &[S]) -> Result<S> {
    if !(2..=3).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    crate::error::check_dim(d, v.len())?;
    let neg: Vec<S> = v.iter().map(|x| -x.clone()).collect();
    let mut total = S::zero();
    for signs in 0..(1u32 << d) {
        let mut s: Simplex<S> = vec![vec![S::zero(); d]];
        for i in 0..d {
            let mut e = vec![S::zero(); d];
            e[i] = if signs >> i & 1 == 1 { -S::one() } else { S::one() };
            s.push(e);
        }
        for (dir, sign) in [(v, S::one()), (&neg[..], -S::one())] {
            let pieces = simplex::clip_halfspace(&s, dir, &S::zero());
            let (_, m) = simplex::volume_and_moment(&pieces, d);
            total = total + sign * dot(&m, v);
        }
    }
    let fact = (1..=d as i64 + 1).fold(1i64, |a, b| a * b);
    let t_pow = S::from_i64(fact) / S::from_i64(1 << (d - 1));
    Ok(total * t_pow / S::from_i64(2))
}

/// Deterministic direction net: `m` equally spaced angles for `d = 2`, an
/// `m`-point Fibonacci sphere for `d = 3`.
///
/// # Errors
/// Other dimensions or `m = 0`.
pub fn direction_net(d: usize, m: usize) -> Result<Vec<Vec<f64>>> {
    if m == 0 {
        return Err(Error::InvalidInput("empty net".into()));
    }
    match d {
        2 => Ok((0..m)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / m as f64;
                vec![a.cos(), a.sin()]
            })
            .collect()),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            Ok((0..m)
                .map(|i| {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / m as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * i as f64;
                    vec![r * a.cos(), r * a.sin(), z]
                })
                .collect())
        }
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

/// Largest angle from a unit vector to the nearest net direction (an
/// estimate for the Fibonacci sphere).
pub fn net_mesh(d: usize, m: usize) -> f64 {
    match d {
        2 => std::f64::consts::PI / m as f64,
        _ => 2.0 * (4.0 * std::f64::consts::PI / m as f64).sqrt(),
    }
}

/// Support function values on a direction net.
#[derive(Clone, Debug, Serialize)]
pub struct SupportProfile {
    pub directions: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub body_id: String,
}

impl SupportProfile {
    /// Evaluate `h` on every net direction.
    pub fn evaluate(directions: Vec<Vec<f64>>, body_id: &str, h: impl Fn(&[f64]) -> f64 + Sync) -> Self {
        let values = directions.par_iter().map(|v| h(v)).collect();
        Self {
            directions,
            values,
            body_id: body_id.to_string(),
        }
    }

    /// Profile of `T₀`.
    pub fn of_zonoid(z: &LimitZonoid<f64>, directions: Vec<Vec<f64>>) -> Self {
        Self::evaluate(directions, "T0", |v| z.support(v))
    }

    /// Profile of `(1/n) T(w)`.
    pub fn of_zonotope(w: &GeneratorMultiset, n: f64, directions: Vec<Vec<f64>>) -> Self {
        let values = directions.iter().map(|v| zonotope_support(w, v) / n).collect();
        Self {
            directions,
            values,
            body_id: format!("T/{n}"),
        }
    }

    /// Largest `|h|` on the net, a proxy for the circumradius about the origin.
    pub fn radius(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |a, b| a.max(b.abs()))
    }

    /// Largest violation of `h(a+b) <= h(a)+h(b)` over pairs of net
    /// directions whose normalized sum is also in the net (checked on
    /// antipodal-adjacent triples for `d = 2`).
    pub fn subadditivity_defect(&self) -> f64 {
        let m = self.directions.len();
        if self.directions.first().map_or(0, Vec::len) != 2 || m < 4 || m % 2 != 0 {
            return 0.0;
        }
        // For the angle grid, directions i-1, i+1 sum to 2cos(δ) times direction i.
        let c = 2.0 * (2.0 * std::f64::consts::PI / m as f64).cos();
        (0..m)
            .map(|i| {
                let a = self.values[(i + m - 1) % m];
                let b = self.values[(i + 1) % m];
                (c * self.values[i] - a - b).max(0.0)
            })
            .fold(0.0, f64::max)
    }
}

/// Hausdorff distance estimate from support nets.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HausdorffEstimate {
    pub distance: f64,
    /// Bound on the net error: `(R_a + R_b) · mesh`.
    pub resolution: f64,
}

/// `max_v |h_a(v) - h_b(v)|` over the common net.
///
/// # Errors
/// [`Error::NetMismatch`] when the nets differ.
pub fn hausdorff(a: &SupportProfile, b: &SupportProfile) -> Result<HausdorffEstimate> {
    if a.directions != b.directions {
        return Err(Error::NetMismatch);
    }
    let distance = a
        .values
        .iter()
        .zip(&b.values)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    let d = a.directions.first().map_or(2, Vec::len);
    Ok(HausdorffEstimate {
        distance,
        resolution: (a.radius() + b.radius()) * net_mesh(d, a.directions.len()),
    })
}

/// Which law the experiment samples from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SamplingLaw {
    /// `P_n` (unconditioned).
    Boltzmann,
    /// `Q_n` by basis completion.
    Uniform,
}

/// Options of [`limit_shape_experiment`].
#[derive(Clone, Debug)]
pub struct ExperimentOptions {
    pub net_size: usize,
    pub law: SamplingLaw,
    /// Probe direction for the per-direction deviation.
    pub probe: Vec<f64>,
    pub eps: f64,
    pub max_attempts: u64,
    pub model: ModelOptions,
}

impl ExperimentOptions {
    /// Defaults for dimension `d`: probe `(1,-1,0..)/√2`, `ε = 0.05`.
    pub fn new(d: usize) -> Self {
        let mut probe = vec![0.0; d];
        probe[0] = std::f64::consts::FRAC_1_SQRT_2;
        probe[1] = -std::f64::consts::FRAC_1_SQRT_2;
        Self {
            net_size: if d == 2 { NET_SIZE_2D } else { NET_SIZE_3D },
            law: SamplingLaw::Uniform,
            probe,
            eps: 0.05,
            max_attempts: 100_000_000,
            model: ModelOptions::default(),
        }
    }
}

/// One row of the convergence table.
#[derive(Clone, Debug, Serialize)]
pub struct ShapeRow {
    pub n: u64,
    pub replicas: usize,
    pub law: SamplingLaw,
    pub median: f64,
    pub q90: f64,
    pub resolution: f64,
    /// `h_{T₀}` at the probe direction.
    pub probe_limit: f64,
    pub probe_mean: f64,
    pub probe_se: f64,
    /// Fraction of replicas with `|h_{T/n}(probe) - h_{T₀}(probe)| > ε`.
    pub probe_exceed: f64,
    pub mean_attempts: f64,
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Distance between `(1/n)T` and `T₀` for `replicas` draws at each `n`.
/// Replica `r` at every `n` uses seed `seed + r`.
///
/// # Errors
/// `d ∉ {2,3}`, model construction failures or sampler timeouts.
pub fn limit_shape_experiment(
    cone: &PolyhedralCone,
    k: &[i64],
    ns: &[u64],
    replicas: usize,
    seed: u64,
    opts: &ExperimentOptions,
) -> Result<Vec<ShapeRow>> {
    let d = cone.dim();
    if !(2..=3).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    let ka: Vec<Rational> = k.iter().map(|&x| rat(x, 1)).collect();
    let cap = solve_cap(cone, &ka)?;
    let z = LimitZonoid::from_solution(&cap);
    let net = direction_net(d, opts.net_size)?;
    let t0 = SupportProfile::of_zonoid(&z, net.clone());
    let probe_norm = norm(&opts.probe);
    let probe: Vec<f64> = opts.probe.iter().map(|x| x / probe_norm).collect();
    let probe_limit = z.support(&probe);
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let model = GibbsModel::with_options(cone, k, n, &opts.model)?;
        let sampler = match opts.law {
            SamplingLaw::Uniform => Some(ConditionedSampler::new(&model)?),
            SamplingLaw::Boltzmann => None,
        };
        let draws: Vec<Result<(f64, f64, u64)>> = (0..replicas)
            .into_par_iter()
            .map(|r| {
                let s = seed.wrapping_add(r as u64);
                let (w, attempts) = match &sampler {
                    Some(c) => {
                        let u = c.sample(opts.max_attempts, s)?;
                        (u.w, u.attempts)
                    }
                    None => (model.sample(s), 1),
                };
                let prof = SupportProfile::of_zonotope(&w, n as f64, net.clone());
                let h = hausdorff(&prof, &t0)?.distance;
                Ok((h, zonotope_support(&w, &probe) / n as f64, attempts))
            })
            .collect();
        let draws: Vec<(f64, f64, u64)> = draws.into_iter().collect::<Result<_>>()?;
        let mut dist: Vec<f64> = draws.iter().map(|x| x.0).collect();
        dist.sort_by(f64::total_cmp);
        let rf = replicas as f64;
        let probe_mean = draws.iter().map(|x| x.1).sum::<f64>() / rf;
        let probe_var = draws.iter().map(|x| (x.1 - probe_mean).powi(2)).sum::<f64>() / (rf - 1.0).max(1.0);
        let exceed = draws.iter().filter(|x| (x.1 - probe_limit).abs() > opts.eps).count();
        let r_max = t0.radius() * 2.0;
        rows.push(ShapeRow {
            n,
            replicas,
            law: opts.law,
            median: quantile(&dist, 0.5),
            q90: quantile(&dist, 0.9),
            resolution: r_max * net_mesh(d, opts.net_size),
            probe_limit,
            probe_mean,
            probe_se: (probe_var / rf).sqrt(),
            probe_exceed: exceed as f64 / rf,
            mean_attempts: draws.iter().map(|x| x.2 as f64).sum::<f64>() / rf,
        });
    }
    Ok(rows)
}

/// `h_{Q₀}` by Monte Carlo over the cross-polytope (an independent check).
pub fn cube_zonoid_support_mc(d: usize, v: &[f64], samples: usize, seed: u64) -> f64 {
    let mut rng = Stream::new(seed);
    let fact: f64 = (1..=d + 1).map(|x| x as f64).product();
    let t_pow = fact / (1u64 << (d - 1)) as f64;
    // Unit cross-polytope volume 2^d / d!.
    let vol = (1u64 << d) as f64 / (1..=d).map(|x| x as f64).product::<f64>();
    let mut acc = 0.0;
    let mut x = vec![0.0; d];
    for _ in 0..samples {
        // Uniform point of the simplex via exponential spacings, then random signs.
        let e: Vec<f64> = (0..=d).map(|_| -rng.uniform().ln()).collect();
        let s: f64 = e.iter().sum();
        for i in 0..d {
            let sign = if rng.next_u64() & 1 == 1 { -1.0 } else { 1.0 };
            x[i] = sign * e[i] / s;
        }
        acc += dot_f(&x, v).abs();
    }
    0.5 * t_pow * vol * acc / samples as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthant_zonoid(d: usize) -> LimitZonoid<Rational> {
        let cone = PolyhedralCone::orthant(d).unwrap();
        let cap = solve_cap(&cone, &vec![rat(1, 1); d]).unwrap();
        LimitZonoid::exact(&cone, &cap).unwrap()
    }

    #[test]
    fn boundary_points_exact() {
        let z = orthant_zonoid(2);
        assert_eq!(z.boundary(&[rat(1, 2), rat(-1, 2)]), vec![rat(3, 4), rat(1, 4)]);
        assert_eq!(z.boundary(&[rat(1, 3), rat(2, 5)]), vec![rat(1, 1), rat(1, 1)]);
        assert_eq!(z.boundary(&[rat(-1, 3), rat(-2, 5)]), vec![rat(0, 1), rat(0, 1)]);
        let z3 = orthant_zonoid(3);
        let (t, v) = (rat(1, 2), rat(1, 2));
        let dir = vec![t.clone() * v.clone(), -(rat(1, 2) * v), -(t * rat(1, 2))];
        assert_eq!(z3.boundary(&dir), vec![rat(1, 2), rat(1, 8), rat(1, 8)]);
    }

    #[test]
    fn support_values() {
        let cone = PolyhedralCone::orthant(2).unwrap();
        let k = [rat(1, 1), rat(1, 1)];
        assert!((zonoid_support(&cone, &k, &[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(zonoid_support(&cone, &k, &[-1.0, -2.0]).unwrap(), 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = zonoid_support(&cone, &k, &[s, -s]).unwrap();
        assert!((h - 0.5 * s).abs() < 1e-12);
        let z = orthant_zonoid(2);
        let v = [rat(2, 3), rat(-1, 7)];
        assert_eq!(z.support(&v), dot(&v, &z.boundary(&v)));
    }

    #[test]
    fn boundary_equations() {
        let c2 = boundary_equation_check(2, 100).unwrap();
        assert_eq!(c2.checked, 100);
        assert!(c2.max_residual < 1e-9);
        let c3 = boundary_equation_check(3, 100).unwrap();
        assert!(c3.checked > 0 && c3.max_residual < 1e-9, "{c3:?}");
        assert!(boundary_equation_check(4, 10).is_err());
    }

    #[test]
    fn zonotope_supports() {
        assert_eq!(zonotope_support(&GeneratorMultiset::empty(2), &[1.0, 0.0]), 0.0);
        let w = GeneratorMultiset::from_entries(2, [(vec![1, 0], 2), (vec![0, 1], 1)]).unwrap();
        assert_eq!(zonotope_support(&w, &[1.0, 0.0]), 2.0);
        let w = GeneratorMultiset::from_entries(2, [(vec![1, 0], 1), (vec![1, 2], 1)]).unwrap();
        assert_eq!(zonotope_support_exact(&w, &[2, -1]), 2);
    }

    #[test]
    fn hausdorff_basics() {
        let net = direction_net(2, 256).unwrap();
        let z = LimitZonoid::from_solution(
            &solve_cap(&PolyhedralCone::orthant(2).unwrap(), &[rat(1, 1), rat(1, 1)]).unwrap(),
        );
        let a = SupportProfile::of_zonoid(&z, net.clone());
        assert_eq!(hausdorff(&a, &a).unwrap().distance, 0.0);
        let tau = [0.3, -0.4];
        let b = SupportProfile::evaluate(net.clone(), "shifted", |v| z.support(v) + dot_f(v, &tau));
        let h = hausdorff(&a, &b).unwrap();
        assert!((h.distance - 0.5).abs() <= h.resolution);
        let other = SupportProfile::of_zonoid(&z, direction_net(2, 128).unwrap());
        assert_eq!(hausdorff(&a, &other).unwrap_err(), Error::NetMismatch);
        assert!(a.subadditivity_defect() < 1e-12);
    }

    #[test]
    fn cube_zonoid() {
        let h = cube_zonoid_support(2, &[rat(1, 1), rat(0, 1)]).unwrap();
        assert_eq!(h, rat(1, 1));
        assert_eq!(cube_zonoid_support(2, &[rat(0, 1), rat(1, 1)]).unwrap(), rat(1, 1));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let diag = cube_zonoid_support(2, &[s, s]).unwrap();
        assert!((diag - 1.5 * s).abs() < 1e-12);
        assert_eq!(cube_zonoid_support(2, &[rat(1, 1), rat(1, 1)]).unwrap(), rat(3, 2));
        let mc = cube_zonoid_support_mc(2, &[s, s], 1_000_000, 3);
        assert!((diag - mc).abs() < 1e-3, "{diag} vs {mc}");
        let v = [rat(1, 2), rat(-1, 3), rat(2, 5)];
        let neg: Vec<Rational> = v.iter().map(|x| -x.clone()).collect();
        assert_eq!(cube_zonoid_support(3, &v).unwrap(), cube_zonoid_support(3, &neg).unwrap());
        assert_eq!(cube_zonoid_support(3, &[rat(1, 1), rat(0, 1), rat(0, 1)]).unwrap(), rat(1, 1));
    }

    #[test]
    fn experiment_is_reproducible() {
        let cone = PolyhedralCone::orthant(2).unwrap();
        let mut opts = ExperimentOptions::new(2);
        opts.net_size = 512;
        opts.law = SamplingLaw::Boltzmann;
        let a = limit_shape_experiment(&cone, &[1, 1], &[100], 1, 4, &opts).unwrap();
        let b = limit_shape_experiment(&cone, &[1, 1], &[100], 1, 4, &opts).unwrap();
        assert_eq!(a[0].median.to_bits(), b[0].median.to_bits());
    }
}
