use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ruelle_core::diskmap::*;
use ruelle_core::special::*;

fn packed(n: usize, s: f64, delta: f64, twist: f64) -> SpecialParams {
  let pk = pack_rings(n, s, delta, None).unwrap();
  SpecialParams { n, disks: pk.disks, delta, twist, mollifier_width: None }
}

fn one_orbit(n: usize, s: f64, delta: f64, twist: f64) -> SpecialParams {
  let mid = PI / n as f64;
  let base = Disk { center: [0.55 * mid.cos(), 0.55 * mid.sin()], radius: s };
  SpecialParams { n, disks: SpecialParams::with_rotations(n, &[base]), delta, twist, mollifier_width: None }
}

fn random_point(rng: &mut ChaCha8Rng, rmax: f64) -> [f64; 2] {
  let r = rmax * rng.gen_range(0.0f64..1.0).sqrt();
  let a = rng.gen_range(0.0..2.0 * PI);
  [r * a.cos(), r * a.sin()]
}

#[test]
fn empty_union_is_the_rotation() {
  let p = SpecialParams { n: 10, disks: vec![], delta: 0.01, twist: -1.0, mollifier_width: None };
  let sys = build_special_hamiltonian(&p).unwrap();
  for z in [[0.0, 0.0], [0.3, 0.1], [-0.5, 0.6]] {
    assert!((action_map(&sys.map, z).unwrap() - 1.1 * PI).abs() < 1e-12);
    let f = action_map(&DiskFlow::new(sys.hamiltonian.clone()), z).unwrap();
    assert!((f - 1.1 * PI).abs() < 1e-9, "{f}");
  }
  let sweep = disk_sweep(&sys.map, 20, 2).unwrap();
  assert!((sweep.calabi - 1.1 * PI * PI).abs() < 1e-9);
  assert!((sweep.ruelle.value - 1.1 * PI).abs() < 1e-9);
}

#[test]
fn closed_form_map_matches_integrated_flow() {
  let p = one_orbit(10, 0.08, 0.01, -1.5);
  let sys = build_special_hamiltonian(&p).unwrap();
  let flow = DiskFlow::new(sys.hamiltonian.clone());
  let mut rng = ChaCha8Rng::seed_from_u64(4);
  // Mix of generic points and points whose image under φ^H lands in a disk.
  let mut pts: Vec<[f64; 2]> = (0..12).map(|_| random_point(&mut rng, 0.95)).collect();
  for r in [0.0, 0.03, 0.065, 0.075, 0.085] {
    let c = p.disks[3].center;
    let z = [c[0] + r, c[1]];
    let back = 2.0 * PI * -1.1;
    pts.push([back.cos() * z[0] - back.sin() * z[1], back.sin() * z[0] + back.cos() * z[1]]);
  }
  for z in pts {
    let mut l1 = JacobianLift::new(&[[1.0, 0.0]]);
    let mut l2 = JacobianLift::new(&[[1.0, 0.0]]);
    let a = sys.map.iterate(z, 1, Track::ALL, Some(&mut l1)).unwrap();
    let b = flow.iterate(z, 1, Track::ALL, Some(&mut l2)).unwrap();
    assert!((a.z[0] - b.z[0]).abs() < 1e-7 && (a.z[1] - b.z[1]).abs() < 1e-7, "{z:?}: {:?} vs {:?}", a.z, b.z);
    assert!((a.action - b.action).abs() < 1e-6, "{z:?}: {} vs {}", a.action, b.action);
    assert!((l1.rho() - l2.rho()).abs() < 1e-5, "{z:?}: {} vs {}", l1.rho(), l2.rho());
    assert!((l1.probe_winding(0) - l2.probe_winding(0)).abs() < 1e-6);
    for i in 0..2 {
      for j in 0..2 {
        assert!((a.jac[i][j] - b.jac[i][j]).abs() < 1e-5 * (1.0 + a.jac[i][j].abs()));
      }
    }
  }
}

#[test]
fn g_and_h_commute() {
  let p = packed(20, 0.02, 0.02 / (4.0 * PI * 20.0), -1.95);
  let sys = build_special_hamiltonian(&p).unwrap();
  let mut rng = ChaCha8Rng::seed_from_u64(8);
  for _ in 0..200 {
    let z = random_point(&mut rng, 1.0);
    let gh = sys.map.g_map(sys.map.h_map(z));
    let hg = sys.map.h_map(sys.map.g_map(z));
    assert!((gh[0] - hg[0]).abs() < 1e-7 && (gh[1] - hg[1]).abs() < 1e-7);
  }
}

#[test]
fn action_is_bounded_and_positive() {
  let n = 20;
  let twist = -1.95;
  let p = packed(n, 0.02, 0.02 / (4.0 * PI * 20.0), twist);
  let sys = build_special_hamiltonian(&p).unwrap();
  let lo = PI / 2.0 + twist.min(0.0) * 2.0 * PI / n as f64;
  let hi = 2.0 * PI + twist.max(0.0) * 2.0 * PI / n as f64;
  let m = 256;
  let mut min_s = f64::INFINITY;
  for i in 0..m {
    for j in 0..m {
      let z = [-1.0 + 2.0 * (i as f64 + 0.5) / m as f64, -1.0 + 2.0 * (j as f64 + 0.5) / m as f64];
      if z[0] * z[0] + z[1] * z[1] >= 1.0 {
        continue;
      }
      let s = action_map(&sys.map, z).unwrap();
      assert!(s >= lo && s <= hi, "{z:?}: {s}");
      min_s = min_s.min(s);
    }
  }
  assert!(min_s > 0.0);
}

#[test]
fn lemma_report_for_a_packed_configuration() {
  let p = packed(20, 0.02, 0.02 / (4.0 * PI * 20.0), -1.95);
  assert!(validate_setup(&p).passed());
  let sys = build_special_hamiltonian(&p).unwrap();
  let rep = verify_special_lemmas(&sys, &LemmaSettings { resolution: 120, ..Default::default() }).unwrap();
  assert!(rep.action_ok && rep.rotation_ok && rep.periodic_ok, "{rep:#?}");
  let c = rep.periodic.center.as_ref().expect("center found");
  assert!((c.action - 1.05 * PI).abs() < 1e-9);
  assert!((c.rotation - 1.05).abs() < 1e-9);
  assert!(rep.warnings.is_empty());
}

#[test]
fn action_error_constant_is_stable_under_halving() {
  let settings = LemmaSettings { resolution: 160, period_bound: Some(1), seed_resolution: 1, ..Default::default() };
  let mut consts = Vec::new();
  for s in [0.04, 0.02] {
    let p = packed(20, s, s / (4.0 * PI * 20.0), -1.5);
    let sys = build_special_hamiltonian(&p).unwrap();
    let rep = verify_special_lemmas(&sys, &settings).unwrap();
    consts.push(rep.action_constant);
  }
  let ratio = consts[1] / consts[0];
  assert!((ratio - 1.0).abs() < 0.2, "{consts:?}");
}

#[test]
fn twist_below_minus_two_warns() {
  let p = one_orbit(10, 0.08, 0.01, -2.5);
  let sys = build_special_hamiltonian(&p).unwrap();
  let settings = LemmaSettings { resolution: 20, period_bound: Some(2), seed_resolution: 4, ..Default::default() };
  let rep = verify_special_lemmas(&sys, &settings).unwrap();
  assert_eq!(rep.warnings.len(), 1);
}

#[test]
fn invalid_setup_is_rejected() {
  let mut p = one_orbit(10, 0.08, 0.01, 1.0);
  p.disks.pop();
  assert!(build_special_hamiltonian(&p).is_err());
}
