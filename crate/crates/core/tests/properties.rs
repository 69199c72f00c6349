//! Structural invariants checked on randomized inputs.

use proptest::prelude::*;
use zonolimit::arith::{dot, rat, Rational};
use zonolimit::cap::{section_centroid, solve_cap};
use zonolimit::cone::PolyhedralCone;
use zonolimit::count::{canonicalize, count_partitions};
use zonolimit::faces::{buck_generic_u64, face_counts, hull_oracle};
use zonolimit::gibbs::GibbsModel;
use zonolimit::latt::{enumerate_points, TruncatedConeQuery};
use zonolimit::multiset::GeneratorMultiset;
use zonolimit::rng::Stream;
use zonolimit::shape::{cube_zonoid_support, zonotope_support, LimitZonoid};

fn cones() -> Vec<PolyhedralCone> {
    ["orthant2", "wedge:(1,0),(1,2)", "orthant3", "circ3:6"]
        .iter()
        .map(|p| PolyhedralCone::preset(p).unwrap())
        .collect()
}

fn interior_dual(cone: &PolyhedralCone, raw: &[f64]) -> Option<Vec<f64>> {
    let v: Vec<f64> = raw.iter().take(cone.dim()).copied().collect();
    let c = cone.classify_dual(&v).ok()?;
    c.strict_interior.then_some(v)
}

fn small_vectors(d: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, d), 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplace_is_homogeneous(ci in 0usize..4, raw in prop::collection::vec(-1.0f64..3.0, 3), beta in 0.1f64..10.0) {
        let cone = &cones()[ci];
        let Some(v) = interior_dual(cone, &raw) else { return Ok(()) };
        let d = cone.dim() as i32;
        let base = cone.laplace_value(&v).unwrap();
        let scaled: Vec<f64> = v.iter().map(|x| beta * x).collect();
        let value = cone.laplace_value(&scaled).unwrap();
        prop_assert!((value - beta.powi(-d) * base).abs() <= 1e-12 * value.abs());
    }

    #[test]
    fn laplace_derivatives_match_differences(ci in 0usize..4, raw in prop::collection::vec(0.2f64..3.0, 3)) {
        let cone = &cones()[ci];
        let Some(v) = interior_dual(cone, &raw) else { return Ok(()) };
        let l = cone.laplace(&v).unwrap();
        let h = 1e-5;
        for i in 0..v.len() {
            let mut p = v.clone();
            let mut m = v.clone();
            p[i] += h;
            m[i] -= h;
            let lp = cone.laplace(&p).unwrap();
            let lm = cone.laplace(&m).unwrap();
            let g = (lp.value - lm.value) / (2.0 * h);
            prop_assert!((g - l.gradient[i]).abs() <= 1e-6 * l.gradient[i].abs().max(1e-300));
            for j in 0..v.len() {
                let hd = (lp.gradient[j] - lm.gradient[j]) / (2.0 * h);
                let scale = l.hessian[i][i].abs().max(l.hessian[j][j].abs());
                prop_assert!((hd - l.hessian[i][j]).abs() <= 1e-6 * scale);
            }
        }
    }

    #[test]
    fn dual_vectors_are_positive_on_the_cone(ci in 0usize..4, raw in prop::collection::vec(-1.0f64..3.0, 3), seed in any::<u64>()) {
        let cone = &cones()[ci];
        let Some(v) = interior_dual(cone, &raw) else { return Ok(()) };
        let mut rng = Stream::new(seed);
        for _ in 0..1000 {
            let x = cone.random_point(&mut rng);
            prop_assert!(v.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() > 0.0);
        }
    }

    #[test]
    fn cap_is_equivariant_under_diagonal_scaling(d1 in 1i64..5, d2 in 1i64..5, a1 in 1i64..7, a2 in 1i64..7) {
        let base = PolyhedralCone::new(vec![vec![1, 0], vec![1, 2]]).unwrap();
        let scaled = PolyhedralCone::new(vec![vec![d1, 0], vec![d1, 2 * d2]]).unwrap();
        let a = [rat(a1, 1), rat(a2, 2)];
        let da = [rat(a1 * d1, 1), rat(a2 * d2, 2)];
        prop_assume!(base.contains_strictly(&a).unwrap());
        let s = solve_cap(&base, &a).unwrap();
        let t = solve_cap(&scaled, &da).unwrap();
        let det = (d1 * d2) as f64;
        prop_assert!((t.q - det.powf(1.0 / 3.0) * s.q).abs() <= 1e-9 * t.q);
        prop_assert!((t.u[0] - s.u[0] / d1 as f64).abs() <= 1e-9 * s.u[0].abs().max(1.0));
        prop_assert!((t.u[1] - s.u[1] / d2 as f64).abs() <= 1e-9 * s.u[1].abs().max(1.0));
    }

    #[test]
    fn cap_direction_has_the_prescribed_centroid(ci in 0usize..4, raw in prop::collection::vec(1i64..9, 3)) {
        let cone = &cones()[ci];
        let d = cone.dim();
        let gens = cone.generators();
        // A positive combination of generators rescaled to comparable length.
        let a: Vec<Rational> = (0..d)
            .map(|j| {
                gens.iter()
                    .zip(&raw)
                    .map(|(g, &c)| rat(g[j] * c, g.iter().map(|x| x.abs()).max().unwrap()))
                    .sum()
            })
            .collect();
        let s = solve_cap(cone, &a).unwrap();
        let c = section_centroid(cone, &s.u).unwrap();
        for (x, y) in c.iter().zip(&s.a) {
            prop_assert!((x - y).abs() <= 1e-9 * y.abs().max(1.0));
        }
    }

    #[test]
    fn counts_are_monotone_along_the_cone(m1 in 0i64..5, m2 in 0i64..5, e1 in 0i64..3, e2 in 0i64..3) {
        prop_assume!(m1 + m2 > 0);
        let cone = PolyhedralCone::orthant(2).unwrap();
        for strict in [true, false] {
            let small = count_partitions(&cone, &[m1, m2], strict).unwrap().count;
            let big = count_partitions(&cone, &[m1 + e1, m2 + e2], strict).unwrap().count;
            prop_assert!(big >= small);
        }
        let s = count_partitions(&cone, &[m1, m2], true).unwrap().count;
        let n = count_partitions(&cone, &[m1, m2], false).unwrap().count;
        prop_assert!(n >= s);
    }

    #[test]
    fn canonicalize_is_idempotent(vs in small_vectors(3)) {
        let vs: Vec<Vec<i64>> = vs.into_iter().filter(|v| v.iter().any(|&x| x != 0)).collect();
        prop_assume!(!vs.is_empty());
        let w = canonicalize(3, &vs).unwrap();
        let sum: Vec<i64> = (0..3).map(|j| vs.iter().map(|v| v[j]).sum()).collect();
        prop_assert_eq!(w.endpoint(), sum);
        prop_assert_eq!(w.canonical(), w.clone());
        prop_assert!(w.is_canonical());
    }

    #[test]
    fn support_is_additive_over_unions(a in small_vectors(2), b in small_vectors(2), v in prop::collection::vec(-2.0f64..2.0, 2)) {
        let wa = GeneratorMultiset::from_vectors_unchecked(2, a.into_iter().filter(|x| x.iter().any(|&c| c != 0)));
        let wb = GeneratorMultiset::from_vectors_unchecked(2, b.into_iter().filter(|x| x.iter().any(|&c| c != 0)));
        let u = wa.union(&wb);
        let lhs = zonotope_support(&u, &v);
        let rhs = zonotope_support(&wa, &v) + zonotope_support(&wb, &v);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0));
    }

    #[test]
    fn cube_zonoid_is_centrally_symmetric(d in 2usize..4, v in prop::collection::vec(-20i64..20, 3)) {
        let v: Vec<Rational> = v.iter().take(d).map(|&x| rat(x, 7)).collect();
        let neg: Vec<Rational> = v.iter().map(|x| -x.clone()).collect();
        prop_assert_eq!(cube_zonoid_support(d, &v).unwrap(), cube_zonoid_support(d, &neg).unwrap());
    }

    #[test]
    fn zonoid_support_is_boundary_dot_direction(ci in 0usize..3, v in prop::collection::vec(-12i64..12, 3)) {
        let cone = &cones()[ci];
        let d = cone.dim();
        let k: Vec<Rational> = vec![rat(1, 1); d];
        let z = LimitZonoid::exact(cone, &solve_cap(cone, &k).unwrap()).unwrap();
        let v: Vec<Rational> = v.iter().take(d).map(|&x| rat(x, 5)).collect();
        prop_assert_eq!(z.support(&v), dot(&v, &z.boundary(&v)));
    }

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>()) {
        let cone = PolyhedralCone::orthant(2).unwrap();
        let model = GibbsModel::new(&cone, &[1, 1], 50).unwrap();
        prop_assert_eq!(model.sample(seed), model.sample(seed));
    }

    #[test]
    fn face_vectors_satisfy_euler_and_tower_bounds(seed in any::<u64>(), m in 3usize..8) {
        let mut rng = Stream::new(seed);
        let entries: Vec<(Vec<i64>, u64)> = (0..m)
            .filter_map(|_| {
                let v: Vec<i64> = (0..3).map(|_| rng.range_i64(-5, 5)).collect();
                zonolimit::arith::line_key(&v).map(|k| (k, 1))
            })
            .collect::<std::collections::BTreeMap<_, _>>()
            .into_iter()
            .collect();
        let rows: Vec<Vec<i64>> = entries.iter().map(|e| e.0.clone()).collect();
        prop_assume!(zonolimit::linalg::rank_i64(&rows) == 3);
        let w = GeneratorMultiset::from_entries(3, entries).unwrap();
        let f = face_counts(&w).unwrap();
        prop_assert_eq!(f.euler_characteristic(), 2);
        prop_assert!(f.f[0] >= 4);
        prop_assert!(f.towers >= 3 * f.f[0]);
        prop_assert_eq!(f.f[0] % 2, 0);
        prop_assert_eq!(&f.f, &hull_oracle(&w).unwrap().f);
        // Vertices, edges and facets are dual to chambers, 2-cells and rays.
        let m = w.support_size() as u64;
        for (j, &fj) in f.f.iter().enumerate() {
            prop_assert!(fj <= buck_generic_u64(m, 3, 3 - j as u64).unwrap());
        }
    }

    #[test]
    fn primitive_points_generate_all_points(t in 2.0f64..9.0) {
        let cone = PolyhedralCone::preset("wedge:(1,0),(1,2)").unwrap();
        let u = [1.0, 0.25];
        let all = enumerate_points(&TruncatedConeQuery::new(&cone, &u, t, false).unwrap()).unwrap();
        let prim = enumerate_points(&TruncatedConeQuery::new(&cone, &u, t, true).unwrap()).unwrap();
        let mut expanded = Vec::new();
        for p in &prim {
            let mut j = 1;
            loop {
                let x: Vec<i64> = p.iter().map(|c| c * j).collect();
                if u[0] * x[0] as f64 + u[1] * x[1] as f64 > t {
                    break;
                }
                expanded.push(x);
                j += 1;
            }
        }
        let mut all = all;
        all.sort();
        expanded.sort();
        prop_assert_eq!(all, expanded);
    }
}
