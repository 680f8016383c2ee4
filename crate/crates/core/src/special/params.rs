use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
  pub center: [f64; 2],
  pub radius: f64,
}

impl Disk {
  pub fn area(&self) -> f64 {
    PI * self.radius * self.radius
  }

  pub fn rotated(&self, angle: f64) -> Disk {
    let (s, c) = angle.sin_cos();
    let [x, y] = self.center;
    Disk { center: [c * x - s * y, s * x + c * y], radius: self.radius }
  }
}

/// Parameters of the special map `φ = φ^G ∘ φ^H`: the symmetry order `n`,
/// the disk union `U` (all `n` rotated copies listed), the collar width `δ`,
/// the twist `R`, and optionally the blend half-width of the twist profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecialParams {
  pub n: usize,
  pub disks: Vec<Disk>,
  pub delta: f64,
  #[serde(rename = "R")]
  pub twist: f64,
  #[serde(default, skip_serializing_if = "Option::is_none")]
  pub mollifier_width: Option<f64>,
}

impl SpecialParams {
  /// `B = 1 + 1/n`.
  pub fn boundary_coefficient(&self) -> f64 {
    1.0 + 1.0 / self.n as f64
  }

  pub fn sector_angle(&self) -> f64 {
    2.0 * PI / self.n as f64
  }

  /// `d(U)`, the largest disk diameter.
  pub fn max_diameter(&self) -> f64 {
    self.disks.iter().map(|d| 2.0 * d.radius).fold(0.0, f64::max)
  }

  pub fn total_area(&self) -> f64 {
    self.disks.iter().fold(0.0, |acc, d| acc + d.area())
  }

  pub fn sum_area_squared(&self) -> f64 {
    self.disks.iter().fold(0.0, |acc, d| acc + d.area() * d.area())
  }

  /// `area(N(∂U)) = Σ 4π s δ`.
  pub fn boundary_band_area(&self) -> f64 {
    self.disks.iter().fold(0.0, |acc, d| acc + 4.0 * PI * d.radius * self.delta)
  }

  /// Disks whose centers lie in the sector `0 ≤ θ < 2π/n`.
  pub fn base_disks(&self) -> Vec<Disk> {
    let alpha = self.sector_angle();
    self.disks.iter().copied().filter(|d| sector_of(d.center, alpha) == 0).collect()
  }

  /// Closes a list of disks under rotation by `2π/n`.
  pub fn with_rotations(n: usize, base: &[Disk]) -> Vec<Disk> {
    let alpha = 2.0 * PI / n as f64;
    (0..n).flat_map(|k| base.iter().map(move |d| d.rotated(alpha * k as f64))).collect()
  }

  pub fn blend_width(&self) -> f64 {
    self.mollifier_width.unwrap_or(super::profile::DEFAULT_WIDTH_FRACTION * self.delta)
  }
}

/// Index `k` of the sector `2πk/n ≤ θ < 2π(k+1)/n` containing `z`.
pub fn sector_of(z: [f64; 2], alpha: f64) -> usize {
  let mut th = z[1].atan2(z[0]);
  if th < 0.0 {
    th += 2.0 * PI;
  }
  let n = (2.0 * PI / alpha).round() as usize;
  ((th / alpha).floor() as usize).min(n.saturating_sub(1))
}

/// Distance from `z` to the ray from the origin at angle `angle`.
fn ray_distance(z: [f64; 2], angle: f64) -> f64 {
  let (s, c) = angle.sin_cos();
  let t = z[0] * c + z[1] * s;
  if t <= 0.0 {
    (z[0] * z[0] + z[1] * z[1]).sqrt()
  } else {
    (z[1] * c - z[0] * s).abs()
  }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetupCheck {
  pub name: String,
  pub passed: bool,
  /// Indices into [`SpecialParams::disks`].
  pub offending: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetupReport {
  pub checks: Vec<SetupCheck>,
}

impl SetupReport {
  pub fn passed(&self) -> bool {
    self.checks.iter().all(|c| c.passed)
  }

  pub fn check(&self, name: &str) -> Option<&SetupCheck> {
    self.checks.iter().find(|c| c.name == name)
  }

  pub fn failures(&self) -> Vec<&str> {
    self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
  }
}

fn grid_of(disks: &[Disk], cell: f64) -> HashMap<(i64, i64), Vec<usize>> {
  let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
  for (i, d) in disks.iter().enumerate() {
    let key = ((d.center[0] / cell).floor() as i64, (d.center[1] / cell).floor() as i64);
    grid.entry(key).or_default().push(i);
  }
  grid
}

fn neighbours<'a>(
  grid: &'a HashMap<(i64, i64), Vec<usize>>,
  z: [f64; 2],
  cell: f64,
) -> impl Iterator<Item = usize> + 'a {
  let (i, j) = ((z[0] / cell).floor() as i64, (z[1] / cell).floor() as i64);
  (i - 1..=i + 1)
    .flat_map(move |a| (j - 1..=j + 1).map(move |b| (a, b)))
    .filter_map(move |k| grid.get(&k))
    .flatten()
    .copied()
}

/// Checks the geometric conditions on a parameter pack, reporting every
/// failing condition with the offending disk indices.
pub fn validate_setup(p: &SpecialParams) -> SetupReport {
  let mut checks = Vec::new();
  let mut push = |name: &str, offending: Vec<usize>, ok: bool| {
    checks.push(SetupCheck { name: name.into(), passed: ok && offending.is_empty(), offending });
  };
  push("n_at_least_10", vec![], p.n >= 10);
  let finite = p.delta.is_finite()
    && p.delta > 0.0
    && p.twist.is_finite()
    && p.disks.iter().all(|d| d.radius > 0.0 && d.center.iter().all(|c| c.is_finite()));
  push("finite_positive", vec![], finite);
  if p.n == 0 || !finite {
    return SetupReport { checks };
  }
  let alpha = p.sector_angle();
  let delta = p.delta;

  let sector: Vec<usize> = p
    .disks
    .iter()
    .enumerate()
    .filter(|(_, d)| {
      let k = sector_of(d.center, alpha) as f64;
      let m = ray_distance(d.center, k * alpha).min(ray_distance(d.center, (k + 1.0) * alpha));
      m - d.radius <= delta
    })
    .map(|(i, _)| i)
    .collect();
  push("sector_containment", sector, true);

  let inside: Vec<usize> = p
    .disks
    .iter()
    .enumerate()
    .filter(|(_, d)| (d.center[0].hypot(d.center[1]) + d.radius + delta) >= 1.0)
    .map(|(i, _)| i)
    .collect();
  push("inside_disk", inside, true);

  let small: Vec<usize> =
    p.disks.iter().enumerate().filter(|(_, d)| delta >= d.radius / 4.0).map(|(i, _)| i).collect();
  push("delta_small", small, true);

  let width_ok = p.mollifier_width.is_none_or(|w| w > 0.0 && w <= delta);
  push("mollifier_width", vec![], width_ok);

  let sym_cell = 1e-6;
  let sym_grid = grid_of(&p.disks, sym_cell);
  let asym: Vec<usize> = p
    .disks
    .iter()
    .enumerate()
    .filter(|(_, d)| {
      let r = d.rotated(alpha);
      !neighbours(&sym_grid, r.center, sym_cell).any(|j| {
        let e = &p.disks[j];
        (e.center[0] - r.center[0]).hypot(e.center[1] - r.center[1]) < 1e-9 && (e.radius - r.radius).abs() < 1e-9
      })
    })
    .map(|(i, _)| i)
    .collect();
  push("rotation_symmetry", asym, true);

  let max_r = p.disks.iter().map(|d| d.radius).fold(0.0, f64::max);
  let cell = 2.0 * max_r + 2.0 * delta;
  let grid = grid_of(&p.disks, cell);
  let mut close = Vec::new();
  for (i, d) in p.disks.iter().enumerate() {
    let hit = neighbours(&grid, d.center, cell).any(|j| {
      j != i && {
        let e = &p.disks[j];
        (e.center[0] - d.center[0]).hypot(e.center[1] - d.center[1]) - d.radius - e.radius <= 2.0 * delta
      }
    });
    if hit {
      close.push(i);
    }
  }
  push("separation", close, true);
  SetupReport { checks }
}

/// Result of [`pack_rings`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Packing {
  pub disks: Vec<Disk>,
  pub rings: usize,
  pub per_sector: usize,
  pub total_area: f64,
}

/// Most ring layers tried before giving up on a packing target.
pub const MAX_RING_LAYERS: usize = 200;

/// Equal disks of radius `s` on concentric rings inside the sector
/// `0 < θ < 2π/n`, replicated by rotation. Disks keep a clearance of `δ`
/// beyond what the setup requires from each other, from the sector rays and
/// from the unit circle.
///
/// Without a target the packing is as full as the rings allow. With a target
/// area, whole `n`-orbits are added while the total stays at most the target;
/// running out of room first is reported as [`Error::PackingInfeasible`].
pub fn pack_rings(n: usize, s: f64, delta: f64, target_area: Option<f64>) -> Result<Packing> {
  if n < 1 || !(s > 0.0 && delta > 0.0 && s + 2.0 * delta < 1.0) {
    return Err(Error::InvalidInput(format!("cannot pack disks of radius {s} with δ = {delta}")));
  }
  let alpha = 2.0 * PI / n as f64;
  let clear = 2.0 * s + 3.0 * delta;
  let side = s + 2.0 * delta;
  let outer = 1.0 - s - 2.0 * delta;
  let orbit_area = n as f64 * PI * s * s;

  let ring_at = |rho: f64| -> Vec<[f64; 2]> {
    let tm = (side / rho).min(1.0).asin();
    let span = alpha - 2.0 * tm;
    if span < 0.0 {
      return Vec::new();
    }
    let step = 2.0 * (clear / (2.0 * rho)).min(1.0).asin();
    let count = (span / step).floor() as usize + 1;
    (0..count)
      .map(|j| {
        let th = if count == 1 { alpha / 2.0 } else { tm + span * j as f64 / (count - 1) as f64 };
        [rho * th.cos(), rho * th.sin()]
      })
      .collect()
  };

  let mut base: Vec<Disk> = Vec::new();
  let mut rho = side / (alpha / 2.0).sin();
  let mut rings = 0;
  let mut capped = false;
  'rings: while rho <= outer && rings < MAX_RING_LAYERS {
    let ring = ring_at(rho);
    for c in &ring {
      if let Some(t) = target_area {
        if (base.len() + 1) as f64 * orbit_area > t {
          capped = true;
          break 'rings;
        }
      }
      base.push(Disk { center: *c, radius: s });
    }
    rings += 1;
    let prev = ring;
    // Smallest step outward, at least the hexagonal row spacing, that
    // clears the ring just placed.
    let lo = rho + 0.5 * 3f64.sqrt() * clear;
    let hi = rho + clear;
    let mut next = hi;
    for i in 0..=24 {
      let cand = lo + (hi - lo) * i as f64 / 24.0;
      let ok = ring_at(cand)
        .iter()
        .all(|c| prev.iter().all(|q| (c[0] - q[0]).hypot(c[1] - q[1]) >= clear));
      if ok {
        next = cand;
        break;
      }
    }
    rho = next;
  }
  let total = base.len() as f64 * orbit_area;
  if let Some(t) = target_area {
    if !capped {
      return Err(Error::PackingInfeasible { achieved: total, target: t });
    }
  }
  Ok(Packing {
    per_sector: base.len(),
    disks: SpecialParams::with_rotations(n, &base),
    rings,
    total_area: total,
  })
}
