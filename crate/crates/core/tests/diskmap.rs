use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ruelle_core::diskmap::*;

struct OffCenter {
  p: [f64; 2],
  profile: RadialPolynomial<f64>,
}

impl DiskHamiltonian<f64> for OffCenter {
  fn value(&self, _: f64, z: [f64; 2]) -> f64 {
    let u = (z[0] - self.p[0]).powi(2) + (z[1] - self.p[1]).powi(2);
    self.profile.p(u).0
  }
  fn gradient(&self, _: f64, z: [f64; 2]) -> [f64; 2] {
    let w = [z[0] - self.p[0], z[1] - self.p[1]];
    let d = 2.0 * self.profile.p(w[0] * w[0] + w[1] * w[1]).1;
    [d * w[0], d * w[1]]
  }
  fn meta(&self) -> HamiltonianMeta<f64> {
    HamiltonianMeta { autonomous: true, ..Default::default() }
  }
}

fn profiles() -> Vec<RadialPolynomial<f64>> {
  vec![
    RadialPolynomial::rotation(1.1 * PI),
    // (1 − u)²
    RadialPolynomial::new(vec![1.0, -2.0, 1.0]),
    // (1 − u)(1 + u/2)
    RadialPolynomial::new(vec![1.0, -0.5, -0.5]),
  ]
}

#[test]
fn zero_hamiltonian_is_stationary() {
  let flow = DiskFlow::<_, f64>::new(ZeroHamiltonian);
  let tr = integrate_flow(&flow, [0.3, -0.2], (0.0, 1.0)).unwrap();
  let last = tr.last();
  assert_eq!(last.z, [0.3, -0.2]);
  assert_eq!(last.jac, [[1.0, 0.0], [0.0, 1.0]]);
  assert_eq!(action_map(&flow, [0.1, 0.4]).unwrap(), 0.0);
  assert_eq!(calabi(&flow, 8).unwrap(), 0.0);
  assert_eq!(birkhoff_averages(&flow, [0.5, 0.0], 3).unwrap(), (0.0, 0.0));
  assert_eq!(ruelle_diskmap(&flow, 8, 2).unwrap().value, 0.0);
}

#[test]
fn rotation_hamiltonian_time_one_map() {
  let flow = DiskFlow::new(RadialHamiltonian::<f64>::rotation(10));
  let tr = integrate_flow(&flow, [0.5, 0.0], (0.0, 1.0)).unwrap();
  let a = 2.0 * PI * 1.1;
  let z = tr.last().z;
  assert!((z[0] - 0.5 * a.cos()).abs() < 1e-9 && (z[1] - 0.5 * a.sin()).abs() < 1e-9, "{z:?}");
  let sigma = action_map(&flow, [0.3, 0.2]).unwrap();
  assert!((sigma - 1.1 * PI).abs() < 1e-9, "{sigma}");
  assert!((sigma - 3.455752).abs() < 1e-6);
  let cal = calabi(&flow, 12).unwrap();
  assert!((cal - 1.1 * PI * PI).abs() < 1e-8, "{cal}");
  for k in [1, 2, 5] {
    let (r, s) = birkhoff_averages(&flow, [0.7, -0.1], k).unwrap();
    // Φ⁵ = −Id, where σ is only Hölder-½ in the matrix entries.
    let tol = if k == 5 { 1e-5 } else { 1e-9 };
    assert!((r - 1.1).abs() < tol, "k={k}: {r}");
    assert!((s - 1.1 * PI).abs() < 1e-9);
  }
  let ru = ruelle_diskmap(&flow, 10, 2).unwrap();
  assert!((ru.value - 1.1 * PI).abs() < 1e-8, "{ru:?}");
  assert!(ru.diagnostic < 1e-8);
}

#[test]
fn radial_profiles_match_closed_forms() {
  for prof in profiles() {
    let flow = DiskFlow::new(RadialHamiltonian::new(prof.clone()));
    for r in [0.0, 0.15, 0.4, 0.65, 0.9] {
      let z = [r * 0.6, r * 0.8];
      let got = action_map(&flow, z).unwrap();
      let want = radial_action(&prof, r);
      assert!((got - want).abs() < 1e-6, "action at r={r}: {got} vs {want}");
      let tr = integrate_flow(&flow, z, (0.0, 1.0)).unwrap();
      let rz = (tr.last().z[0].powi(2) + tr.last().z[1].powi(2)).sqrt();
      assert!((rz - r).abs() < 1e-8);
    }
    // No shear at the origin: the Jacobian path is a rotation path.
    let (r0, _) = birkhoff_averages(&flow, [0.0, 0.0], 1).unwrap();
    assert!((r0 - radial_rotation(&prof, 0.0)).abs() < 1e-6, "{r0}");
    // Away from it the shear biases r_k by at most half a turn over k steps.
    for r in [0.3, 0.7] {
      let k = 32;
      let (rk, _) = birkhoff_averages(&flow, [r, 0.0], k).unwrap();
      let want = radial_rotation(&prof, r);
      assert!((rk - want).abs() <= 0.5 / k as f64 + 1e-6, "r={r}: {rk} vs {want}");
    }
  }
}

#[test]
fn rotation_profile_is_rigid_everywhere() {
  let prof = RadialPolynomial::rotation(1.1 * PI);
  let flow = DiskFlow::new(RadialHamiltonian::new(prof.clone()));
  for r in [0.2, 0.5, 0.95] {
    let (rk, _) = birkhoff_averages(&flow, [0.0, r], 3).unwrap();
    assert!((rk - radial_rotation(&prof, r)).abs() < 1e-6);
    assert!((radial_rotation(&prof, r) - 1.1).abs() < 1e-12);
  }
}

#[test]
fn off_center_action_matches_closed_form() {
  let p = [0.2, -0.1];
  let profile = RadialPolynomial::new(vec![0.3, -2.0, 1.5]);
  let h = OffCenter { p, profile: profile.clone() };
  let flow = DiskFlow::new(h);
  for z in [[0.25, -0.05], [0.0, 0.1], [0.4, -0.3], [0.2, -0.1]] {
    let got = action_map(&flow, z).unwrap();
    let want = off_center_action(&profile, p, z);
    assert!((got - want).abs() < 1e-8, "{z:?}: {got} vs {want}");
    let img = flow.time_one(z, Track::POINT).unwrap().z;
    let exact = off_center_flow(&profile, p, z, 1.0);
    assert!((img[0] - exact[0]).abs() < 1e-9 && (img[1] - exact[1]).abs() < 1e-9);
  }
}

#[test]
fn action_differential_matches_pullback_of_liouville_form() {
  let flow = DiskFlow::new(PolynomialHamiltonian::<f64>::random(7, 3, 0.6, true));
  let h = 1e-4;
  let n = 32;
  let mut worst: f64 = 0.0;
  for i in 0..n {
    for j in 0..n {
      let z = [-0.9 + 1.8 * (i as f64 + 0.5) / n as f64, -0.9 + 1.8 * (j as f64 + 0.5) / n as f64];
      if z[0] * z[0] + z[1] * z[1] > 0.8 {
        continue;
      }
      let s = flow.time_one(z, Track::ALL).unwrap();
      let (x1, y1) = (s.z[0], s.z[1]);
      let jac = s.jac;
      // (φ*λ − λ)(e_k) with λ = ½(x dy − y dx).
      let pull = |k: usize| 0.5 * (x1 * jac[1][k] - y1 * jac[0][k]) - 0.5 * if k == 0 { -z[1] } else { z[0] };
      let ds = |k: usize| {
        let mut a = z;
        let mut b = z;
        a[k] += h;
        b[k] -= h;
        (action_map(&flow, a).unwrap() - action_map(&flow, b).unwrap()) / (2.0 * h)
      };
      for k in 0..2 {
        worst = worst.max((ds(k) - pull(k)).abs());
      }
    }
  }
  assert!(worst < 1e-5, "sup error {worst}");
}

#[test]
fn random_flows_preserve_area_and_boundary() {
  let mut rng = ChaCha8Rng::seed_from_u64(11);
  let flow = DiskFlow::new(PolynomialHamiltonian::<f64>::random(3, 4, 0.5, true));
  for _ in 0..100 {
    let r: f64 = rng.gen_range(0.0f64..1.0).sqrt();
    let a: f64 = rng.gen_range(0.0..2.0 * PI);
    let s = flow.time_one([r * a.cos(), r * a.sin()], Track::ALL).unwrap();
    let det = s.jac[0][0] * s.jac[1][1] - s.jac[0][1] * s.jac[1][0];
    assert!((det - 1.0).abs() < 1e-7, "{det}");
  }
  for i in 0..16 {
    let a = 2.0 * PI * i as f64 / 16.0;
    let s = flow.time_one([a.cos(), a.sin()], Track::POINT).unwrap();
    let r = (s.z[0].powi(2) + s.z[1].powi(2)).sqrt();
    assert!((r - 1.0).abs() < 1e-8, "{r}");
  }
}

#[test]
fn boundary_values_and_gradients() {
  let h = PolynomialHamiltonian::<f64>::random(5, 3, 1.0, true);
  for i in 0..64 {
    let a = 2.0 * PI * i as f64 / 64.0;
    assert!(h.value(0.3, [a.cos(), a.sin()]).abs() < 1e-9);
  }
  let mut rng = ChaCha8Rng::seed_from_u64(2);
  let e = 1e-6;
  for _ in 0..20 {
    let z = [rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)];
    let t = rng.gen_range(0.0..1.0);
    let g = h.gradient(t, z);
    let fx = (h.value(t, [z[0] + e, z[1]]) - h.value(t, [z[0] - e, z[1]])) / (2.0 * e);
    let fy = (h.value(t, [z[0], z[1] + e]) - h.value(t, [z[0], z[1] - e])) / (2.0 * e);
    assert!((g[0] - fx).abs() < 1e-6 && (g[1] - fy).abs() < 1e-6);
  }
}

#[test]
fn calabi_is_invariant_under_rotation_conjugation() {
  let base = PolynomialHamiltonian::<f64>::random(9, 3, 0.4, true);
  let q = DiskQuadrature::gauss_polar(24, 64);
  let c0 = calabi_with(&DiskFlow::new(base.clone()), &q).unwrap();
  let rotated = RotatedHamiltonian { inner: base, turns: 0.137 };
  let c1 = calabi_with(&DiskFlow::new(rotated), &q).unwrap();
  assert!((c0 - c1).abs() < 1e-8, "{c0} vs {c1}");
}

#[test]
fn energy_drift_is_reported() {
  let flow = DiskFlow::with_settings(
    RadialHamiltonian::new(RadialPolynomial::new(vec![1.0, -2.0, 1.0])),
    FlowSettings { steps_per_unit: 1, stiffness_factor: 1e9, energy_tol: 1e-12, ..Default::default() },
  );
  let err = flow.time_one([0.3, 0.6], Track::POINT).unwrap_err();
  assert!(matches!(err, ruelle_core::error::Error::StepUnstable(_)));
}

#[test]
fn rotation_periodic_points() {
  let flow = DiskFlow::new(RadialHamiltonian::<f64>::rotation(10));
  let found = find_periodic_points(&flow, 10, 4).unwrap();
  assert_eq!(found.points.len(), 1, "{:?}", found.points);
  let c = &found.points[0];
  assert_eq!(c.period, 1);
  assert!(c.location[0].abs() < 1e-9 && c.location[1].abs() < 1e-9);
  assert!((c.action - 1.1 * PI).abs() < 1e-9);
  assert!((c.rotation - 1.1).abs() < 1e-9);
  assert!(found.non_isolated_count > 0, "{:?}", found.diagnostics);
  assert!(found.non_isolated.iter().all(|p| p.period == 10));
  for p in &found.non_isolated {
    assert!((p.action - 11.0 * PI).abs() < 1e-8);
    // σ is only Hölder-½ at the identity, so integration error shows up amplified.
    assert!((p.rotation - 11.0).abs() < 1e-4, "{p:?}");
  }
}

#[test]
fn zero_hamiltonian_floods_with_non_isolated_points() {
  let flow = DiskFlow::<_, f64>::new(ZeroHamiltonian);
  let found = find_periodic_points(&flow, 3, 3).unwrap();
  assert!(found.points.is_empty());
  assert_eq!(found.non_isolated_count, found.diagnostics.seeds);
  assert!(found.non_isolated.iter().all(|p| p.period == 1 && p.action == 0.0));
}
