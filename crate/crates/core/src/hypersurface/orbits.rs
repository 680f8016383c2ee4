use std::f64::consts::TAU;

use nalgebra::{SMatrix, SVector, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::body::{dot, norm, radial_distance, scale, ConvexBody, Vec4};
use super::curvature::sphere_directions;
use super::frame::quat_i;
use super::john::{from_array, JohnEllipsoid};
use super::reeb::{reeb_endpoint, step_count};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OrbitSearchSettings {
  /// Seeds per symmetry circle of the John ellipsoid.
  pub circle_seeds: usize,
  pub random_seeds: usize,
  /// Longest period scanned, as a multiple of `(contact volume)^{1/2}`.
  pub period_factor: f64,
  /// Near-returns tried per seed.
  pub returns_per_seed: usize,
  pub max_iterations: usize,
  /// Accepted `|φ_T(y) − y|`.
  pub tolerance: f64,
  pub step: f64,
  pub seed: u64,
}

impl Default for OrbitSearchSettings {
  fn default() -> Self {
    Self {
      circle_seeds: 3,
      random_seeds: 6,
      period_factor: 2.5,
      returns_per_seed: 2,
      max_iterations: 40,
      tolerance: 1e-8,
      step: 2e-3,
      seed: 1,
    }
  }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedOrbit {
  pub start: Vec4<f64>,
  /// Period, equal to the action since `λ(R) = 1`.
  pub action: f64,
  pub closing_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSearch {
  pub orbits: Vec<ClosedOrbit>,
  /// Smallest action found; an upper bound for the true minimum.
  pub min_action: Option<f64>,
  pub seeds_tried: usize,
  pub attempts: usize,
  pub period_limit: f64,
}

impl OrbitSearch {
  pub fn conclusive(&self) -> bool {
    self.min_action.is_some()
  }
}

fn on_boundary<B: ConvexBody<f64> + ?Sized>(body: &B, y: Vec4<f64>) -> Result<Vec4<f64>> {
  let d = scale(1.0 / norm(y), y);
  Ok(scale(radial_distance(body, d)?, d))
}

fn reeb_at<B: ConvexBody<f64> + ?Sized>(body: &B, y: Vec4<f64>) -> Vec4<f64> {
  let g = body.gradient(y);
  let nu = scale(1.0 / norm(g), g);
  scale(2.0 / dot(y, nu), quat_i(nu))
}

/// Times of the first near-returns of the trajectory from `y0`, sorted by time.
fn near_returns<B: ConvexBody<f64> + ?Sized>(body: &B, y0: Vec4<f64>, limit: f64, step: f64, keep: usize) -> Result<Vec<f64>> {
  let chunk = 8.0 * step;
  let n = (limit / chunk).ceil() as usize;
  let size = norm(y0);
  let mut y = y0;
  let mut dist = Vec::with_capacity(n + 1);
  dist.push(0.0);
  for _ in 0..n {
    y = reeb_endpoint(body, y, chunk, 8)?;
    let d = [y[0] - y0[0], y[1] - y0[1], y[2] - y0[2], y[3] - y0[3]];
    dist.push(norm(d));
  }
  let mut out = Vec::new();
  for i in 2..n {
    if dist[i] < dist[i - 1] && dist[i] <= dist[i + 1] && dist[i] < 0.3 * size {
      out.push(i as f64 * chunk);
      if out.len() == keep {
        break;
      }
    }
  }
  Ok(out)
}

type V5 = SVector<f64, 5>;
type R6 = SVector<f64, 6>;

/// Levenberg–Marquardt on `(y, T)` for `φ_T(y) = y`, `F(y) = 1`, and a phase condition.
fn refine<B: ConvexBody<f64> + ?Sized>(body: &B, y0: Vec4<f64>, t0: f64, settings: &OrbitSearchSettings) -> Result<Option<ClosedOrbit>> {
  let phase_dir = Vector4::from(reeb_at(body, y0)).normalize();
  let anchor = Vector4::from(y0);
  let steps = step_count(t0 * 1.5, settings.step)?;
  let residual = |x: &V5| -> Result<R6> {
    let y = [x[0], x[1], x[2], x[3]];
    let t = x[4];
    // Fixed step count keeps the residual smooth in T.
    let end = reeb_endpoint(body, y, t, steps)?;
    Ok(R6::new(
      end[0] - y[0],
      end[1] - y[1],
      end[2] - y[2],
      end[3] - y[3],
      body.value(y) - 1.0,
      phase_dir.dot(&(Vector4::from(y) - anchor)),
    ))
  };
  let mut x = V5::new(y0[0], y0[1], y0[2], y0[3], t0);
  let Ok(mut r) = residual(&x) else { return Ok(None) };
  let mut damping = 1e-3;
  for _ in 0..settings.max_iterations {
    if r.fixed_rows::<4>(0).norm() < settings.tolerance && r[4].abs() < 1e-10 {
      break;
    }
    let mut jac = SMatrix::<f64, 6, 5>::zeros();
    for k in 0..5 {
      let h = 1e-7 * (1.0 + x[k].abs());
      let mut xp = x;
      xp[k] += h;
      let Ok(rp) = residual(&xp) else { return Ok(None) };
      jac.set_column(k, &((rp - r) / h));
    }
    let jtj = jac.transpose() * jac;
    let jtr = jac.transpose() * r;
    let mut improved = false;
    for _ in 0..12 {
      let mut a = jtj;
      for k in 0..5 {
        a[(k, k)] += damping * (1.0 + jtj[(k, k)]);
      }
      let Some(d) = a.lu().solve(&(-jtr)) else { break };
      let trial = x + d;
      if trial[4] > 0.0 {
        if let Ok(rt) = residual(&trial) {
          if rt.norm() < r.norm() {
            x = trial;
            r = rt;
            damping = (damping * 0.3).max(1e-12);
            improved = true;
            break;
          }
        }
      }
      damping *= 10.0;
    }
    if !improved {
      break;
    }
  }
  let closing = r.fixed_rows::<4>(0).norm();
  if closing < settings.tolerance && x[4] > 0.0 {
    let y = on_boundary(body, [x[0], x[1], x[2], x[3]])?;
    Ok(Some(ClosedOrbit { start: y, action: x[4], closing_error: closing }))
  } else {
    Ok(None)
  }
}

/// Closed Reeb orbits from seeds on the symmetry circles of the John
/// ellipsoid and from random boundary points.
pub fn closed_orbit_search<B: ConvexBody<f64> + ?Sized>(
  body: &B,
  john: Option<&JohnEllipsoid>,
  contact_volume: f64,
  settings: &OrbitSearchSettings,
) -> Result<OrbitSearch> {
  let limit = settings.period_factor * contact_volume.sqrt();
  let mut seeds: Vec<Vec4<f64>> = Vec::new();
  if let Some(j) = john {
    let p = from_array(&j.symplectic_map);
    let c = Vector4::from(j.center);
    for (k, radius) in [(0usize, (j.a / std::f64::consts::PI).sqrt()), (2, (j.b / std::f64::consts::PI).sqrt())] {
      for i in 0..settings.circle_seeds {
        let phi = TAU * i as f64 / settings.circle_seeds.max(1) as f64;
        let mut w = Vector4::zeros();
        w[k] = radius * phi.cos();
        w[k + 1] = radius * phi.sin();
        let y = c + p * w;
        seeds.push([y[0], y[1], y[2], y[3]]);
      }
    }
  }
  let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
  let dirs = sphere_directions(512);
  for _ in 0..settings.random_seeds {
    seeds.push(dirs[rng.gen_range(0..dirs.len())]);
  }

  let mut orbits: Vec<ClosedOrbit> = Vec::new();
  let mut attempts = 0;
  for seed in &seeds {
    let y = on_boundary(body, *seed)?;
    for t in near_returns(body, y, limit, settings.step, settings.returns_per_seed)? {
      attempts += 1;
      if let Some(o) = refine(body, y, t, settings)? {
        if !orbits.iter().any(|q| (q.action - o.action).abs() < 1e-6 * o.action) {
          orbits.push(o);
        }
      }
    }
  }
  orbits.sort_by(|a, b| a.action.total_cmp(&b.action));
  Ok(OrbitSearch {
    min_action: orbits.first().map(|o| o.action),
    orbits,
    seeds_tried: seeds.len(),
    attempts,
    period_limit: limit,
  })
}
