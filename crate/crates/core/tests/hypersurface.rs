use std::f64::consts::PI;

use nalgebra::Matrix4;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ruelle_core::hypersurface::*;

fn close(a: f64, b: f64, rel: f64) -> bool {
  (a - b).abs() <= rel * b.abs().max(1e-300)
}

fn random_sphere_point(rng: &mut ChaCha8Rng) -> Vec4<f64> {
  let u: f64 = rng.gen();
  sphere_point(u, rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI))
}

fn dot4(a: Vec4<f64>, b: Vec4<f64>) -> f64 {
  (0..4).map(|i| a[i] * b[i]).sum()
}

#[test]
fn ellipsoid_closed_form_examples() {
  let q = ellipsoid_quantities(EllipsoidSpec::new(1.0, 1.0).unwrap());
  // Round sphere of radius r₀ = 1/√π: area 2π²r₀³, H = 1/r₀.
  let r0 = 1.0 / PI.sqrt();
  assert!(close(q.diam, 2.0 * r0, 1e-15));
  assert!(close(q.area, 2.0 * PI * PI * r0.powi(3), 1e-14));
  assert!(close(q.total_mean_curvature, 2.0 * PI * PI * r0.powi(3) / r0, 1e-14));
  assert_eq!((q.vol_x, q.contact_vol, q.ruelle, q.sys), (0.5, 1.0, 2.0, 1.0));

  let q = ellipsoid_quantities(EllipsoidSpec::new(1.0, 2.0).unwrap());
  assert_eq!((q.ruelle, q.sys, q.min_action, q.vol_x), (3.0, 0.5, 1.0, 1.0));

  let q = ellipsoid_quantities(EllipsoidSpec::new(1.0, 4.0).unwrap());
  assert!(close(q.total_mean_curvature, 2.0 * PI / 3.0 * (5.0 + 4.0 / 3.0 * 4f64.ln()), 1e-14));

  // The a = b branch joins the general formula continuously.
  for a in [0.5, 1.0, 3.0] {
    let at = ellipsoid_quantities(EllipsoidSpec::new(a, a).unwrap());
    let near = ellipsoid_quantities(EllipsoidSpec::new(a, a * (1.0 + 1e-4)).unwrap());
    assert!(close(at.area, near.area, 1e-4));
    assert!(close(at.total_mean_curvature, near.total_mean_curvature, 1e-4));
  }
  assert!(EllipsoidSpec::new(2.0, 1.0).is_err());
  assert!(EllipsoidSpec::new(0.0, 1.0).is_err());
}

#[test]
fn quadrature_reproduces_ellipsoid_closed_forms() {
  for (a, b) in [(1.0, 1.0), (1.0, 2.0), (1.0, 4.0)] {
    let t = std::time::Instant::now();
    let body = QuarticBody::ellipsoid(a, b);
    let quad = SurfaceQuadrature::new(&body, QuadratureSize::default()).unwrap();
    let q = ellipsoid_quantities(EllipsoidSpec::new(a, b).unwrap());
    let area = quad.area();
    let vol = quad.contact_volume();
    let h = quad.integrate_area(|n| n.geometry.curvature.mean);
    assert!(close(area, q.area, 1e-4), "{a},{b}: area {area} vs {}", q.area);
    assert!(close(vol, q.contact_vol, 1e-4), "{a},{b}: vol {vol}");
    assert!(close(h, q.total_mean_curvature, 1e-4), "{a},{b}: H {h} vs {}", q.total_mean_curvature);
    for n in &quad.nodes {
      assert!(close(n.contact_weight, n.geometry.frame.z_dot_nu * n.area_weight, 1e-12));
    }
    assert!(t.elapsed().as_secs_f64() < 30.0);
  }
}

#[test]
fn quadrature_error_shrinks_with_refinement() {
  let body = QuarticBody::ellipsoid(1.0, 4.0);
  let q = ellipsoid_quantities(EllipsoidSpec::new(1.0, 4.0).unwrap());
  let err = |n: usize| {
    let quad = SurfaceQuadrature::new(&body, QuadratureSize::new(n, 4, 4)).unwrap();
    [
      (quad.area() - q.area).abs(),
      (quad.contact_volume() - q.contact_vol).abs(),
      (quad.integrate_area(|n| n.geometry.curvature.mean) - q.total_mean_curvature).abs(),
    ]
  };
  for n in [1, 2] {
    let (coarse, fine) = (err(n), err(4 * n));
    for k in 0..3 {
      assert!(fine[k] * 4.0 <= coarse[k], "n={n} k={k}: {coarse:?} -> {fine:?}");
    }
  }
}

#[test]
fn curvature_examples() {
  let mut rng = ChaCha8Rng::seed_from_u64(3);
  let unit = QuarticBody::ball(1.0);
  let round = QuarticBody::ellipsoid(1.0, 1.0);
  for _ in 0..20 {
    let th = random_sphere_point(&mut rng);
    let g = geometry_at(&unit, boundary_point(&unit, th).unwrap()).unwrap();
    for i in 0..3 {
      for j in 0..3 {
        assert!((g.curvature.s[i][j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
      }
    }
    assert!((g.curvature.mean - 1.0).abs() < 1e-12);
    let g = geometry_at(&round, boundary_point(&round, th).unwrap()).unwrap();
    assert!((g.curvature.mean - PI.sqrt()).abs() < 1e-12);
  }
  for b in [1.0, 2.0, 5.0] {
    let body = QuarticBody::ellipsoid(1.0, b);
    let g = geometry_at(&body, [1.0 / PI.sqrt(), 0.0, 0.0, 0.0]).unwrap();
    assert!((g.curvature.mean - ellipsoid_mean_curvature(b, 1.0)).abs() < 1e-12);
    assert!((g.curvature.mean - PI.sqrt() / 3.0 * (1.0 + 2.0 / b)).abs() < 1e-12);
  }
  assert!(geometry_at(&unit, [0.5, 0.0, 0.0, 0.0]).is_err());
}

#[test]
fn degenerate_gradient_is_reported() {
  let flat = FlatBody;
  assert!(matches!(geometry_at(&flat, [1.0, 0.0, 0.0, 0.0]), Err(ruelle_core::error::Error::DegenerateGradient(_))));
}

struct FlatBody;

impl ConvexBody<f64> for FlatBody {
  fn value(&self, _: Vec4<f64>) -> f64 {
    1.0
  }
  fn gradient(&self, _: Vec4<f64>) -> Vec4<f64> {
    [0.0; 4]
  }
  fn hessian(&self, _: Vec4<f64>) -> Mat4<f64> {
    [[0.0; 4]; 4]
  }
}

#[test]
fn round_sphere_rotation_density_is_two() {
  let body = QuarticBody::ellipsoid(1.0, 1.0);
  let mut rng = ChaCha8Rng::seed_from_u64(11);
  for _ in 0..100 {
    let y = boundary_point(&body, random_sphere_point(&mut rng)).unwrap();
    let s: f64 = rng.gen();
    assert!((rotation_density(&body, y, s).unwrap() - 2.0).abs() < 1e-8);
  }
}

#[test]
fn rotation_density_averages_to_ruelle_over_volume() {
  // Mean of ρ_τ over the contact measure and s equals Ru/vol = 3/2 on ∂E(1, 2).
  let body = QuarticBody::ellipsoid(1.0, 2.0);
  let quad = SurfaceQuadrature::new(&body, QuadratureSize::new(16, 8, 8)).unwrap();
  let m = 16;
  let total = quad.integrate_contact(|n| (0..m).map(|k| n.geometry.rotation_density(k as f64 / m as f64)).sum::<f64>() / m as f64);
  assert!((total / quad.contact_volume() - 1.5).abs() < 1e-10, "{}", total / quad.contact_volume());
}

#[test]
fn frame_is_orthonormal_and_reeb_is_normalized() {
  let mut rng = ChaCha8Rng::seed_from_u64(5);
  for _ in 0..10 {
    let body = random_convex_body(&mut rng, &RandomBodySettings::default());
    let y = boundary_point(&body, random_sphere_point(&mut rng)).unwrap();
    let g = geometry_at(&body, y).unwrap();
    let f = g.frame;
    let basis = [f.nu, f.i_nu, f.j_nu, f.k_nu];
    for i in 0..4 {
      for j in 0..4 {
        assert!((dot4(basis[i], basis[j]) - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
      }
    }
    // λ(R) = ½⟨iy, R⟩.
    let lam = 0.5 * dot4(quat_i(y), f.reeb());
    assert!((lam - 1.0).abs() < 1e-8);
  }
}

#[test]
fn hopf_orbits_on_the_round_sphere() {
  let body = QuarticBody::ellipsoid(1.0, 1.0);
  let mut rng = ChaCha8Rng::seed_from_u64(2);
  for _ in 0..3 {
    let y0 = boundary_point(&body, random_sphere_point(&mut rng)).unwrap();
    let s: f64 = rng.gen();
    let tr = reeb_flow(&body, y0, s, 1.0, 1e-3).unwrap();
    for i in 0..4 {
      assert!((tr.end[i] - y0[i]).abs() < 1e-9, "{:?} vs {y0:?}", tr.end);
    }
    assert!((tr.angle_change - 2.0).abs() < 1e-8, "{}", tr.angle_change);
    assert!(tr.max_drift < 1e-9);
  }
  // The z₁-circle of ∂E(a, b) closes after time a.
  let (a, b) = (1.3, 2.9);
  let body = QuarticBody::ellipsoid(a, b);
  let y0 = [(a / PI).sqrt(), 0.0, 0.0, 0.0];
  let tr = reeb_flow(&body, y0, 0.0, a, 1e-3).unwrap();
  for i in 0..4 {
    assert!((tr.end[i] - y0[i]).abs() < 1e-9, "{:?}", tr.end);
  }
}

#[test]
fn ruelle_of_round_sphere_and_ellipsoid() {
  let settings = ReebSettings { step: Some(5e-3), ..Default::default() };
  let body = QuarticBody::ellipsoid(1.0, 1.0);
  let quad = SurfaceQuadrature::new(&body, QuadratureSize::new(4, 4, 4)).unwrap();
  let ru = ruelle_invariant(&body, &quad, 4.0, &settings).unwrap();
  assert!((ru.value - 2.0).abs() < 1e-6, "{ru:?}");

  let t = std::time::Instant::now();
  let body = QuarticBody::ellipsoid(1.0, 2.0);
  let quad = SurfaceQuadrature::new(&body, QuadratureSize::new(8, 8, 8)).unwrap();
  let ru = ruelle_invariant(&body, &quad, 20.0, &settings).unwrap();
  println!("E(1,2): {ru:?} in {:.2}s", t.elapsed().as_secs_f64());
  assert!((ru.value - 3.0).abs() < 0.05, "{ru:?}");
}

#[test]
fn iv_averages_on_the_round_sphere() {
  let body = QuarticBody::ellipsoid(1.0, 1.0);
  let y0 = boundary_point(&body, sphere_point(0.3, 0.2, 1.0)).unwrap();
  let av = iv_flow_averages(&body, y0, 2.0, 1e-3).unwrap();
  let r = PI.sqrt();
  assert!((av.s_t - r).abs() < 1e-10 && (av.h_t - r).abs() < 1e-10 && (av.a_t - r).abs() < 1e-10, "{av:?}");
  assert!(av.a_t * av.a_t <= 3.0 * av.h_t * av.s_t);
}

#[test]
fn williamson_recovers_symplectic_radii() {
  let mut rng = ChaCha8Rng::seed_from_u64(9);
  for _ in 0..20 {
    let (a, b) = (rng.gen_range(0.2..2.0), rng.gen_range(2.0..6.0));
    let p = random_symplectic(&mut rng);
    let e = QuarticBody::ellipsoid(a, b);
    let q0 = Matrix4::from_fn(|i, j| e.q[i][j]);
    let pinv = p.try_inverse().unwrap();
    let q = pinv.transpose() * q0 * pinv;
    let w = williamson(&q).unwrap();
    assert!((w.a - a).abs() < 1e-9 * a && (w.b - b).abs() < 1e-9 * b, "{a} {b} {w:?}");
    let m = Matrix4::from_fn(|i, j| w.map[i][j]);
    assert!(symplectic_defect(&m) < 1e-9);
    // P maps E(a, b) onto {xᵀQx ≤ 1}.
    let back = m.transpose() * q * m;
    assert!((back - q0).abs().max() < 1e-8 * q0.abs().max());
  }
  let w = williamson(&Matrix4::identity()).unwrap();
  assert!((w.a - PI).abs() < 1e-12 && (w.b - PI).abs() < 1e-12);
}

fn random_symplectic(rng: &mut ChaCha8Rng) -> Matrix4<f64> {
  // Product of symplectic shears [[I, S], [0, I]] in (x, y) coordinates and a unitary map.
  let mut p = Matrix4::identity();
  for _ in 0..3 {
    let s = [rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7)];
    // Symmetric S acting from the y's to the x's: x += S y.
    let mut shear = Matrix4::identity();
    shear[(0, 1)] = s[0];
    shear[(0, 3)] = s[1];
    shear[(2, 1)] = s[1];
    shear[(2, 3)] = s[2];
    let mut low = Matrix4::identity();
    low[(1, 0)] = s[2];
    low[(1, 2)] = s[0];
    low[(3, 0)] = s[0];
    low[(3, 2)] = s[1];
    p = p * shear * low;
  }
  assert!(symplectic_defect(&p) < 1e-12);
  p
}

#[test]
fn john_ellipsoid_of_an_ellipsoid() {
  for (a, b) in [(1.0, 2.0), (0.5, 3.0)] {
    let body = QuarticBody::ellipsoid(a, b);
    let j = john_ellipsoid(&body, &JohnSettings::default()).unwrap();
    assert!((j.a - a).abs() < 0.02 * a && (j.b - b).abs() < 0.02 * b, "{j:?}");
    assert!(j.center.iter().all(|c| c.abs() < 1e-3));
    assert!(symplectic_defect(&Matrix4::from_fn(|i, k| j.symplectic_map[i][k])) < 1e-8);
    assert!(j.outer_ratio < 1.05);
  }
  let c = [0.1, -0.05, 0.2, 0.0];
  let body = QuarticBody::ellipsoid(1.0, 2.0).translated(c);
  let j = john_ellipsoid(&body, &JohnSettings::default()).unwrap();
  assert!((j.a - 1.0).abs() < 0.02 && (j.b - 2.0).abs() < 0.04, "{j:?}");
  for i in 0..4 {
    assert!((j.center[i] - c[i]).abs() < 1e-3);
  }
}

#[test]
fn john_inclusions_hold_under_rejection_sampling() {
  let mut rng = ChaCha8Rng::seed_from_u64(21);
  let body = random_convex_body(&mut rng, &RandomBodySettings::default());
  let j = john_ellipsoid(&body, &JohnSettings::default()).unwrap();
  let b = Matrix4::from_fn(|i, k| j.shape[i][k]);
  let binv = b.try_inverse().unwrap();
  let c = nalgebra::Vector4::from(j.center);
  // Points of E must lie in K.
  let mut in_e = 0;
  while in_e < 100_000 {
    let w = nalgebra::Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    if w.norm() > 1.0 {
      continue;
    }
    in_e += 1;
    let x = c + b * w;
    assert!(body.value([x[0], x[1], x[2], x[3]]) <= 1.0 + 1e-6, "point of E outside K");
  }
  // Points of K, drawn from the box around c + 4(E − c), must lie in that ellipsoid.
  let half: Vec<f64> = (0..4).map(|i| 4.0 * b.row(i).norm()).collect();
  let mut in_k = 0;
  for _ in 0..100_000 {
    let x = nalgebra::Vector4::from_fn(|i, _| c[i] + rng.gen_range(-half[i]..half[i]));
    if body.value([x[0], x[1], x[2], x[3]]) <= 1.0 {
      in_k += 1;
      assert!((binv * (x - c)).norm() <= 4.0 + 1e-9, "point of K outside 4E");
    }
  }
  assert!(in_k > 100);
}

#[test]
fn closed_orbits_of_ellipsoids() {
  let body = QuarticBody::ellipsoid(1.0, 2.0);
  let j = john_ellipsoid(&body, &JohnSettings::default()).unwrap();
  let s = closed_orbit_search(&body, Some(&j), 2.0, &OrbitSearchSettings::default()).unwrap();
  let c = s.min_action.unwrap();
  assert!((c - 1.0).abs() < 1e-6, "{s:?}");
  assert!(s.orbits.iter().all(|o| o.action > 0.0));
}

#[test]
fn sandwich_of_an_ellipsoid_and_a_smoothed_cube() {
  let settings = AnalysisSettings::scan();
  for body in [QuarticBody::ellipsoid(1.0, 2.0), smoothed_cube(0.6, 0.2)] {
    let an = analyze_body(&body, &settings).unwrap();
    println!("{:?}", an.sandwich);
    assert!(an.sandwich.flags_clear());
    assert!(an.bracket_ok, "{:?} {:?}", an.ruelle, an.bracket);
    assert!(an.certificate.convex && an.certificate.star_shaped);
  }
}

#[test]
fn ellipsoid_bound_rows_obey_the_identity() {
  for r in ELLIPSOID_RATIOS {
    let row = BoundRow::ellipsoid(EllipsoidSpec::new(1.0, r).unwrap());
    assert!((row.product - (row.sys + 1.0)).abs() < 1e-12);
    assert!(row.product > 1.0 && row.product <= 2.0);
  }
  let row = BoundRow::ellipsoid(EllipsoidSpec::new(1.0, 1.0).unwrap());
  assert_eq!((row.ru, row.sys, row.product), (2.0, 1.0, 2.0));
}

proptest! {
  #![proptest_config(ProptestConfig::with_cases(24))]

  #[test]
  fn rotation_density_is_nonnegative_on_convex_bodies(seed in 0u64..1000, u in 0.0f64..1.0, p1 in 0.0f64..6.28, p2 in 0.0f64..6.28, s in 0.0f64..1.0) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let body = random_convex_body(&mut rng, &RandomBodySettings::default());
    let y = boundary_point(&body, sphere_point(u, p1, p2)).unwrap();
    let g = geometry_at(&body, y).unwrap();
    prop_assert!(g.curvature.min_eigenvalue() >= -1e-9);
    prop_assert!(g.frame.z_dot_nu > 0.0);
    prop_assert!(g.rotation_density(s) >= 0.0);
    prop_assert!((g.curvature.mean - (g.curvature.s[0][0] + g.curvature.s[1][1] + g.curvature.s[2][2]) / 3.0).abs() < 1e-12);
  }

  #[test]
  fn acceleration_inequality(seed in 0u64..1000, u in 0.0f64..1.0, p1 in 0.0f64..6.28, p2 in 0.0f64..6.28, t in 0.1f64..3.0) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let body = random_convex_body(&mut rng, &RandomBodySettings::default());
    let y = boundary_point(&body, sphere_point(u, p1, p2)).unwrap();
    let av = iv_flow_averages(&body, y, t, 5e-3).unwrap();
    prop_assert!(av.a_t * av.a_t <= 3.0 * av.h_t * av.s_t + 1e-8);
  }

  #[test]
  fn ellipsoid_identity(a in 0.1f64..5.0, r in 1.0f64..50.0) {
    let q = ellipsoid_quantities(EllipsoidSpec::new(a, a * r).unwrap());
    let ru = q.ruelle / q.contact_vol.sqrt();
    prop_assert!((ru * q.sys.sqrt() - (q.sys + 1.0)).abs() < 1e-12);
    prop_assert!((q.contact_vol - 2.0 * q.vol_x).abs() < 1e-12 * q.contact_vol);
  }
}

#[test]
fn ellipsoid_sandwich_ratios_match_closed_form_slack() {
  let an = analyze_body(&QuarticBody::ellipsoid(1.0, 2.0), &AnalysisSettings::scan()).unwrap();
  let ratio = |name: &str| an.sandwich.entries.iter().find(|e| e.quantity == name).unwrap().ratio;
  let sp = PI.sqrt();
  assert!((ratio("diam") - 2.0 / sp).abs() < 0.02);
  assert!(ratio("area") >= 4.0 * sp / 3.0 * 0.99 && ratio("area") <= 2.0 * sp * 1.01);
  assert!(ratio("total_mean_curvature") >= 2.0 * PI / 3.0 * 0.99 && ratio("total_mean_curvature") <= 2.0 * PI * 1.01);
  assert!((ratio("vol_x") - 0.5).abs() < 0.01);
  assert!((ratio("min_action") - 1.0).abs() < 0.01);
  assert!((ratio("sys") - 1.0).abs() < 0.02);
}

fn ruelle_of<B: ConvexBody<f64>>(body: &B, horizon: f64) -> f64 {
  let quad = SurfaceQuadrature::new(body, QuadratureSize::new(12, 6, 6)).unwrap();
  ruelle_invariant(body, &quad, horizon, &ReebSettings { step_scale: 4e-3, step: None }).unwrap().value
}

#[test]
fn ruelle_is_invariant_under_the_standardizer() {
  let mut rng = ChaCha8Rng::seed_from_u64(17);
  let body = random_convex_body(&mut rng, &RandomBodySettings::default());
  let j = john_ellipsoid(&body, &JohnSettings::default()).unwrap();
  let std_body = j.standardize(body.clone());
  let (r0, r1) = (ruelle_of(&body, 40.0 * j.a), ruelle_of(&std_body, 40.0 * j.a));
  assert!((r0 - r1).abs() < 0.02 * r0, "{r0} vs {r1}");
}

#[test]
fn ruelle_is_continuous_under_small_perturbations() {
  let base = QuarticBody::ellipsoid(1.0, 2.0);
  let perturbed = |eps: f64| {
    let mut b = base.clone();
    b.quartic.push(([0.6, 0.0, 0.8, 0.0], eps));
    b
  };
  let r0 = ruelle_of(&base, 40.0);
  let (g1, g2) = (ruelle_of(&perturbed(0.4), 40.0) - r0, ruelle_of(&perturbed(0.2), 40.0) - r0);
  let ratio = g1 / g2;
  assert!(g1.abs() > 1e-3 && (ratio - 2.0).abs() < 0.4, "{r0} {g1} {g2}");
}
