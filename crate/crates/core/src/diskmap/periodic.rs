use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scalar::Scalar;

use super::flow::{FlowState, JacobianLift, Track};
use super::map::DiskMap;

/// A periodic point of the time-one map with its minimal period `L`, action
/// `A = Σ σ_φ(φ^i p)` and rotation number `ρ` of the `L`-step Jacobian path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPoint<T> {
  pub location: [T; 2],
  pub period: usize,
  pub action: T,
  pub rotation: T,
  pub residual: T,
  /// False when `Φ^L − Id` is numerically singular at the point.
  pub isolated: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchDiagnostics {
  pub seeds: usize,
  pub candidates: usize,
  pub newton_diverged: usize,
  pub duplicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicSearch<T> {
  /// Isolated points, one representative per orbit and symmetry class.
  pub points: Vec<PeriodicPoint<T>>,
  /// Non-isolated points, truncated to [`PeriodicSearchSettings::max_non_isolated`].
  pub non_isolated: Vec<PeriodicPoint<T>>,
  pub non_isolated_count: usize,
  /// Smallest action and smallest `ρ + L` over every accepted point,
  /// including non-isolated ones beyond the truncation.
  pub min_action: T,
  pub min_rotation_plus_period: T,
  pub diagnostics: SearchDiagnostics,
}

impl<T: Scalar> PeriodicSearch<T> {
  pub fn all(&self) -> impl Iterator<Item = &PeriodicPoint<T>> {
    self.points.iter().chain(self.non_isolated.iter())
  }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicSearchSettings<T> {
  pub newton_max_iter: usize,
  pub residual_tol: T,
  /// Residual accepted at non-isolated points, where Newton cannot improve
  /// on the integration error.
  pub non_isolated_tol: T,
  /// Points closer than this (after applying the symmetry) are identified.
  pub dedupe_tol: T,
  /// Relative singular-value threshold for `Φ^L − Id`.
  pub singular_tol: T,
  /// A seed becomes a candidate for period `L` when `|φ^L z − z|` is below
  /// this multiple of the grid spacing.
  pub candidate_factor: T,
  pub max_non_isolated: usize,
}

impl<T: Scalar> Default for PeriodicSearchSettings<T> {
  fn default() -> Self {
    Self {
      newton_max_iter: 30,
      residual_tol: T::tol(1e-9),
      non_isolated_tol: T::tol(1e-7),
      dedupe_tol: T::tol(1e-6),
      singular_tol: T::tol(1e-6),
      candidate_factor: T::lit(3.0),
      max_non_isolated: 256,
    }
  }
}

fn norm<T: Scalar>(v: [T; 2]) -> T {
  (v[0] * v[0] + v[1] * v[1]).sqrt()
}

fn rotate<T: Scalar>(z: [T; 2], angle: T) -> [T; 2] {
  let (s, c) = angle.sin_cos();
  [c * z[0] - s * z[1], s * z[0] + c * z[1]]
}

/// Singular values and the leading singular pair `(σ_max, σ_min, u, v)` of a 2×2 matrix.
fn svd2<T: Scalar>(m: [[T; 2]; 2]) -> (T, T, [T; 2], [T; 2]) {
  let a = m[0][0] * m[0][0] + m[1][0] * m[1][0];
  let b = m[0][0] * m[0][1] + m[1][0] * m[1][1];
  let c = m[0][1] * m[0][1] + m[1][1] * m[1][1];
  let half = T::lit(0.5);
  let mid = half * (a + c);
  let rad = ((half * (a - c)).powi(2) + b * b).sqrt();
  let l_max = mid + rad;
  let l_min = (mid - rad).max(T::zero());
  let v = if (l_max - a).abs() + b.abs() > (l_max - c).abs() + b.abs() {
    [b, l_max - a]
  } else {
    [l_max - c, b]
  };
  let nv = norm(v);
  let v = if nv > T::zero() { [v[0] / nv, v[1] / nv] } else { [T::one(), T::zero()] };
  let s_max = l_max.sqrt();
  let mv = [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
  let u = if s_max > T::zero() { [mv[0] / s_max, mv[1] / s_max] } else { [T::one(), T::zero()] };
  (s_max, l_min.sqrt(), u, v)
}

/// Points bucketed on a grid of cell size `tol`, for radius-`tol` lookups.
struct PointSet<T> {
  tol: T,
  cells: HashMap<(i64, i64), Vec<[T; 2]>>,
}

impl<T: Scalar> PointSet<T> {
  fn new(tol: T) -> Self {
    Self { tol, cells: HashMap::new() }
  }

  fn key(&self, z: [T; 2]) -> (i64, i64) {
    ((z[0] / self.tol).floor().to_i64().unwrap_or(0), (z[1] / self.tol).floor().to_i64().unwrap_or(0))
  }

  fn insert(&mut self, z: [T; 2]) {
    let k = self.key(z);
    self.cells.entry(k).or_default().push(z);
  }

  fn contains(&self, z: [T; 2]) -> bool {
    let (i, j) = self.key(z);
    (i - 1..=i + 1).any(|a| {
      (j - 1..=j + 1).any(|b| {
        self.cells.get(&(a, b)).is_some_and(|v| v.iter().any(|o| norm([o[0] - z[0], o[1] - z[1]]) < self.tol))
      })
    })
  }
}

struct Evaluation<T> {
  image: [T; 2],
  jac: [[T; 2]; 2],
}

fn iterate<T: Scalar, M: DiskMap<T> + ?Sized>(
  map: &M,
  z: [T; 2],
  l: usize,
  track: Track,
) -> Result<Evaluation<T>> {
  let s = map.iterate(z, l, track, None)?;
  Ok(Evaluation { image: s.z, jac: s.jac })
}

enum Newton<T> {
  Converged { point: [T; 2], residual: T, isolated: bool },
  Diverged,
}

fn newton<T: Scalar, M: DiskMap<T> + ?Sized>(
  map: &M,
  z0: [T; 2],
  l: usize,
  settings: &PeriodicSearchSettings<T>,
) -> Result<Newton<T>> {
  let track = Track { jacobian: true, action: false };
  let mut z = z0;
  let mut ev = iterate(map, z, l, track)?;
  let mut f = [ev.image[0] - z[0], ev.image[1] - z[1]];
  let mut res = norm(f);
  for _ in 0..=settings.newton_max_iter {
    let m = [[ev.jac[0][0] - T::one(), ev.jac[0][1]], [ev.jac[1][0], ev.jac[1][1] - T::one()]];
    let (s_max, s_min, u, v) = svd2(m);
    let singular = s_min <= settings.singular_tol * s_max.max(T::one());
    if res < settings.residual_tol || (singular && res < settings.non_isolated_tol) {
      return Ok(Newton::Converged { point: z, residual: res, isolated: !singular });
    }
    // Minimum-norm step, restricted to the leading direction when singular.
    let step = if singular {
      if s_max <= settings.singular_tol {
        return Ok(Newton::Diverged);
      }
      let c = -(u[0] * f[0] + u[1] * f[1]) / s_max;
      [c * v[0], c * v[1]]
    } else {
      let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
      [
        -(m[1][1] * f[0] - m[0][1] * f[1]) / det,
        -(-m[1][0] * f[0] + m[0][0] * f[1]) / det,
      ]
    };
    let mut lambda = T::one();
    let mut accepted = false;
    for _ in 0..12 {
      let cand = [z[0] + lambda * step[0], z[1] + lambda * step[1]];
      if norm(cand) <= T::one() + T::lit(1e-9) {
        let e = iterate(map, cand, l, track)?;
        let fc = [e.image[0] - cand[0], e.image[1] - cand[1]];
        let rc = norm(fc);
        if rc < res {
          z = cand;
          ev = e;
          f = fc;
          res = rc;
          accepted = true;
          break;
        }
      }
      lambda = lambda * T::lit(0.5);
    }
    if !accepted {
      break;
    }
  }
  Ok(Newton::Diverged)
}

/// Searches for periodic points of period at most `max_period`, seeded from a
/// polar grid with `resolution` rings over the fundamental sector of the
/// Hamiltonian's rotational symmetry, plus the origin.
///
/// Newton steps on `φ^L − Id` are backtracked by halving until the residual
/// decreases. Points where `Φ^L − Id` is singular are reported separately as
/// non-isolated.
pub fn find_periodic_points<T: Scalar, M: DiskMap<T> + ?Sized>(
  map: &M,
  max_period: usize,
  resolution: usize,
) -> Result<PeriodicSearch<T>> {
  find_periodic_points_with(map, max_period, resolution, &PeriodicSearchSettings::default())
}

pub fn find_periodic_points_with<T: Scalar, M: DiskMap<T> + ?Sized>(
  map: &M,
  max_period: usize,
  resolution: usize,
  settings: &PeriodicSearchSettings<T>,
) -> Result<PeriodicSearch<T>> {
  let k = max_period.max(1);
  let res = resolution.max(1);
  let m = map.symmetry_order().max(1);
  let sector = T::two_pi() / T::from_usize(m).unwrap();
  let spacing = T::one() / T::from_usize(res).unwrap();
  let threshold = settings.candidate_factor * spacing;

  let mut seeds = vec![[T::zero(), T::zero()]];
  for i in 0..res {
    let r = (T::from_usize(i).unwrap() + T::lit(0.5)) * spacing;
    let count = (r * sector / spacing).ceil().max(T::one()).to_usize().unwrap();
    for j in 0..count {
      let th = (T::from_usize(j).unwrap() + T::lit(0.5)) * sector / T::from_usize(count).unwrap();
      seeds.push([r * th.cos(), r * th.sin()]);
    }
  }

  let mut out = PeriodicSearch {
    points: Vec::new(),
    non_isolated: Vec::new(),
    non_isolated_count: 0,
    min_action: T::infinity(),
    min_rotation_plus_period: T::infinity(),
    diagnostics: SearchDiagnostics { seeds: seeds.len(), ..Default::default() },
  };
  // Orbit points of everything accepted so far, for deduplication.
  let mut known = PointSet::new(settings.dedupe_tol);

  for seed in seeds {
    let mut orbit = vec![seed];
    let mut s = FlowState::start(T::zero(), seed);
    for _ in 0..k {
      s = map.step(s, Track::POINT, None)?;
      orbit.push(s.z);
    }
    let mut found_periods: Vec<usize> = Vec::new();
    for l in 1..=k {
      if found_periods.iter().any(|p| l % p == 0) {
        continue;
      }
      let d = norm([orbit[l][0] - seed[0], orbit[l][1] - seed[1]]);
      if d > threshold {
        continue;
      }
      out.diagnostics.candidates += 1;
      let (p, residual, isolated) = match newton(map, seed, l, settings)? {
        Newton::Converged { point, residual, isolated } => (point, residual, isolated),
        Newton::Diverged => {
          out.diagnostics.newton_diverged += 1;
          continue;
        }
      };
      if norm(p) > T::one() + T::lit(1e-9) {
        out.diagnostics.newton_diverged += 1;
        continue;
      }
      let is_known = (0..m).any(|j| {
        let q = rotate(p, sector * T::from_usize(j).unwrap());
        known.contains(q)
      });
      if is_known {
        out.diagnostics.duplicates += 1;
        if norm([p[0] - seed[0], p[1] - seed[1]]) < settings.dedupe_tol {
          found_periods.push(l);
        }
        continue;
      }
      let record = describe(map, p, l, residual, isolated, settings)?;
      if norm([p[0] - seed[0], p[1] - seed[1]]) < settings.dedupe_tol {
        found_periods.push(record.period);
      }
      let mut z = p;
      let mut st = FlowState::start(T::zero(), z);
      for _ in 0..record.period {
        known.insert(z);
        st = map.step(st, Track::POINT, None)?;
        z = st.z;
      }
      out.min_action = out.min_action.min(record.action);
      out.min_rotation_plus_period =
        out.min_rotation_plus_period.min(record.rotation + T::from_usize(record.period).unwrap());
      if record.isolated {
        out.points.push(record);
      } else {
        out.non_isolated_count += 1;
        if out.non_isolated.len() < settings.max_non_isolated {
          out.non_isolated.push(record);
        }
      }
    }
  }
  Ok(out)
}

/// Minimal period, action and rotation of a point with `φ^l p ≈ p`.
fn describe<T: Scalar, M: DiskMap<T> + ?Sized>(
  map: &M,
  p: [T; 2],
  l: usize,
  residual: T,
  isolated: bool,
  settings: &PeriodicSearchSettings<T>,
) -> Result<PeriodicPoint<T>> {
  let mut lift = JacobianLift::new(&[]);
  let mut s = FlowState::start(T::zero(), p);
  let loose = residual.max(settings.residual_tol) * T::lit(100.0);
  let mut period = l;
  for i in 0..l {
    s = map.step(s, Track::ALL, Some(&mut lift))?;
    if i + 1 < l && l % (i + 1) == 0 && norm([s.z[0] - p[0], s.z[1] - p[1]]) < loose {
      period = i + 1;
      break;
    }
  }
  let residual = if period == l { residual } else { norm([s.z[0] - p[0], s.z[1] - p[1]]) };
  let isolated = if period == l {
    isolated
  } else {
    let m = [[s.jac[0][0] - T::one(), s.jac[0][1]], [s.jac[1][0], s.jac[1][1] - T::one()]];
    let (s_max, s_min, _, _) = svd2(m);
    s_min > settings.singular_tol * s_max.max(T::one())
  };
  Ok(PeriodicPoint { location: p, period, action: s.action, rotation: lift.rho(), residual, isolated })
}
