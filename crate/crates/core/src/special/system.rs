use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::diskmap::{DiskHamiltonian, DiskMap, FlowState, HamiltonianMeta, JacobianLift, Track};
use crate::error::{Error, Result};

use super::params::{sector_of, validate_setup, SpecialParams};
use super::profile::{build_twist_profile_with_width, TwistProfile};

#[derive(Debug, Clone)]
struct BaseDisk {
  center: [f64; 2],
  profile: TwistProfile,
}

/// The disks of the fundamental sector, bucketed for point location.
#[derive(Debug)]
struct DiskIndex {
  n: usize,
  alpha: f64,
  base: Vec<BaseDisk>,
  cell: f64,
  grid: HashMap<(i64, i64), Vec<usize>>,
}

/// Where a point sits relative to `N(U)`.
struct Located<'a> {
  disk: &'a BaseDisk,
  /// Sector index `k`; the point is `R_{kα}` of `local`.
  sector: usize,
  local: [f64; 2],
}

fn rot(z: [f64; 2], angle: f64) -> [f64; 2] {
  let (s, c) = angle.sin_cos();
  [c * z[0] - s * z[1], s * z[0] + c * z[1]]
}

fn mat_mul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
  let mut out = [[0.0; 2]; 2];
  for i in 0..2 {
    for j in 0..2 {
      out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    }
  }
  out
}

fn rot_mat(angle: f64) -> [[f64; 2]; 2] {
  let (s, c) = angle.sin_cos();
  [[c, -s], [s, c]]
}

impl DiskIndex {
  fn new(p: &SpecialParams) -> Result<Self> {
    let alpha = p.sector_angle();
    let width = p.blend_width();
    let base: Vec<BaseDisk> = p
      .base_disks()
      .into_iter()
      .map(|d| {
        Ok(BaseDisk {
          center: d.center,
          profile: build_twist_profile_with_width(d.radius, p.delta, p.twist, width)?,
        })
      })
      .collect::<Result<_>>()?;
    let reach = base.iter().map(|b| b.profile.support_end()).fold(0.0, f64::max);
    let cell = (2.0 * reach).max(1e-6);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, b) in base.iter().enumerate() {
      grid.entry(Self::key(b.center, cell)).or_default().push(i);
    }
    Ok(Self { n: p.n, alpha, base, cell, grid })
  }

  fn key(z: [f64; 2], cell: f64) -> (i64, i64) {
    ((z[0] / cell).floor() as i64, (z[1] / cell).floor() as i64)
  }

  fn locate(&self, z: [f64; 2]) -> Option<Located<'_>> {
    if self.base.is_empty() {
      return None;
    }
    let sector = sector_of(z, self.alpha);
    let local = rot(z, -(sector as f64) * self.alpha);
    let (i, j) = Self::key(local, self.cell);
    for a in i - 1..=i + 1 {
      for b in j - 1..=j + 1 {
        if let Some(v) = self.grid.get(&(a, b)) {
          for &k in v {
            let d = &self.base[k];
            let r = (local[0] - d.center[0]).hypot(local[1] - d.center[1]);
            if r < d.profile.support_end() {
              return Some(Located { disk: d, sector, local });
            }
          }
        }
      }
    }
    None
  }

  /// `G` with its gradient and Hessian at `z`.
  fn g(&self, z: [f64; 2]) -> (f64, [f64; 2], [[f64; 2]; 2]) {
    let Some(loc) = self.locate(z) else {
      return (0.0, [0.0; 2], [[0.0; 2]; 2]);
    };
    let prof = &loc.disk.profile;
    let w = [loc.local[0] - loc.disk.center[0], loc.local[1] - loc.disk.center[1]];
    let r = w[0].hypot(w[1]);
    let value = prof.g(r);
    let (grad, hess) = if r < 1e-300 {
      ([0.0; 2], [[prof.d2g(0.0), 0.0], [0.0, prof.d2g(0.0)]])
    } else {
      let u = [w[0] / r, w[1] / r];
      let (g1, g2) = (prof.dg(r), prof.d2g(r));
      let t = g1 / r;
      (
        [g1 * u[0], g1 * u[1]],
        [
          [g2 * u[0] * u[0] + t * (1.0 - u[0] * u[0]), (g2 - t) * u[0] * u[1]],
          [(g2 - t) * u[0] * u[1], g2 * u[1] * u[1] + t * (1.0 - u[1] * u[1])],
        ],
      )
    };
    let a = loc.sector as f64 * self.alpha;
    let grad = rot(grad, a);
    let r = rot_mat(a);
    let rt = rot_mat(-a);
    (value, grad, mat_mul(&mat_mul(&r, &hess), &rt))
  }
}

/// The special Hamiltonian: `2H` on `[0, ½)` followed by `2G` on `[½, 1)`,
/// with `H = Bπ(1 − r²)`, `B = 1 + 1/n`, and `G = g_s∘r_p` near each disk.
/// Its time-one map is `φ^G ∘ φ^H`.
#[derive(Debug, Clone)]
pub struct SpecialHamiltonian {
  index: Arc<DiskIndex>,
  b: f64,
}

impl SpecialHamiltonian {
  pub fn boundary_coefficient(&self) -> f64 {
    self.b
  }

  /// The autonomous `G` alone.
  pub fn g(&self, z: [f64; 2]) -> f64 {
    self.index.g(z).0
  }
}

impl DiskHamiltonian<f64> for SpecialHamiltonian {
  fn value(&self, t: f64, z: [f64; 2]) -> f64 {
    if t < 0.5 {
      2.0 * self.b * PI * (1.0 - z[0] * z[0] - z[1] * z[1])
    } else {
      2.0 * self.index.g(z).0
    }
  }
  fn gradient(&self, t: f64, z: [f64; 2]) -> [f64; 2] {
    if t < 0.5 {
      let c = -4.0 * self.b * PI;
      [c * z[0], c * z[1]]
    } else {
      let g = self.index.g(z).1;
      [2.0 * g[0], 2.0 * g[1]]
    }
  }
  fn hessian(&self, t: f64, z: [f64; 2]) -> [[f64; 2]; 2] {
    if t < 0.5 {
      let c = -4.0 * self.b * PI;
      [[c, 0.0], [0.0, c]]
    } else {
      let h = self.index.g(z).2;
      [[2.0 * h[0][0], 2.0 * h[0][1]], [2.0 * h[1][0], 2.0 * h[1][1]]]
    }
  }
  fn meta(&self) -> HamiltonianMeta<f64> {
    HamiltonianMeta {
      autonomous: false,
      radial: false,
      boundary_coefficient: Some(self.b),
      symmetry_order: self.index.n,
      breakpoints: vec![0.5],
    }
  }
}

/// The time-one map `φ = φ^G ∘ φ^H` of a [`SpecialHamiltonian`], evaluated in
/// closed form: `φ^H` is the rotation by `2πB` and `φ^G` rotates each
/// neighbourhood `N(D)` about its center `p` by the angle `−g′(r_p)/r_p`.
/// Jacobian paths are those of the two flows, sampled and lifted.
#[derive(Debug, Clone)]
pub struct SpecialMap {
  index: Arc<DiskIndex>,
  b: f64,
}

/// `u_p(z) = (b x − a y)/2` for `p = (a, b)`.
fn u_p(p: [f64; 2], z: [f64; 2]) -> f64 {
  0.5 * (p[1] * z[0] - p[0] * z[1])
}

impl SpecialMap {
  pub fn boundary_coefficient(&self) -> f64 {
    self.b
  }

  /// `φ^H`: rotation by `2πB` about the origin.
  pub fn h_map(&self, z: [f64; 2]) -> [f64; 2] {
    rot(z, 2.0 * PI * self.b)
  }

  /// `φ^G`.
  pub fn g_map(&self, z: [f64; 2]) -> [f64; 2] {
    match self.index.locate(z) {
      None => z,
      Some(loc) => {
        let c = loc.disk.center;
        let w = [loc.local[0] - c[0], loc.local[1] - c[1]];
        let om = loc.disk.profile.angular_speed(w[0].hypot(w[1]));
        let v = rot(w, om);
        rot([c[0] + v[0], c[1] + v[1]], loc.sector as f64 * self.index.alpha)
      }
    }
  }

  /// `1 + 1/n + R` on `D∖N(∂D)` and `1 + 1/n` off `N(U)`, the rotation of
  /// the rigid parts of `φ`; `None` on the collars `N(∂D)`.
  pub fn rigid_rotation(&self, z: [f64; 2]) -> Option<f64> {
    match self.index.locate(z) {
      None => Some(self.b),
      Some(loc) => {
        let c = loc.disk.center;
        let r = (loc.local[0] - c[0]).hypot(loc.local[1] - c[1]);
        let p = &loc.disk.profile;
        (r <= p.s - p.delta).then_some(self.b + p.twist)
      }
    }
  }

  /// Distance to the center and area of the disk of `U` containing `z`.
  pub fn disk_containing(&self, z: [f64; 2]) -> Option<(f64, f64)> {
    let loc = self.index.locate(z)?;
    let c = loc.disk.center;
    let r = (loc.local[0] - c[0]).hypot(loc.local[1] - c[1]);
    (r < loc.disk.profile.s).then(|| (r, PI * loc.disk.profile.s * loc.disk.profile.s))
  }

  /// Distance from `z` to `∂U`, if `z` lies in some `N(D)`.
  pub fn collar_distance(&self, z: [f64; 2]) -> Option<f64> {
    let loc = self.index.locate(z)?;
    let c = loc.disk.center;
    Some(((loc.local[0] - c[0]).hypot(loc.local[1] - c[1]) - loc.disk.profile.s).abs())
  }
}

impl DiskMap<f64> for SpecialMap {
  fn symmetry_order(&self) -> usize {
    self.index.n
  }

  fn step(&self, state: FlowState<f64>, track: Track, mut lift: Option<&mut JacobianLift<f64>>) -> Result<FlowState<f64>> {
    let jacobian = track.jacobian || lift.is_some();
    let th = 2.0 * PI * self.b;
    let z1 = rot(state.z, th);
    let j0 = state.jac;
    if let Some(l) = lift.as_deref_mut() {
      l.follow_rotation(th, j0)?;
    }
    let j1 = if jacobian { mat_mul(&rot_mat(th), &j0) } else { j0 };
    let mut action = state.action + PI * self.b;

    let mut out = FlowState { t: state.t + 1.0, z: z1, jac: j1, action: state.action };
    let Some(loc) = self.index.locate(z1) else {
      if track.action {
        out.action = action;
      }
      return Ok(out);
    };
    let prof = &loc.disk.profile;
    let c = loc.disk.center;
    let w = [loc.local[0] - c[0], loc.local[1] - c[1]];
    let r = w[0].hypot(w[1]);
    let om = prof.angular_speed(r);
    let dom = prof.angular_speed_derivative(r);
    let v = rot(w, om);
    let z2_local = [c[0] + v[0], c[1] + v[1]];
    let a = loc.sector as f64 * self.index.alpha;
    out.z = rot(z2_local, a);
    action += prof.g(r) - 0.5 * r * prof.dg(r) + u_p(c, loc.local) - u_p(c, z2_local);
    if jacobian {
      // D(t) = R(tω)(Id + tω′·(Jw)ŵᵀ) in sector coordinates. The lift runs
      // along the homotopic path that shears first and rotates after.
      let shear = if r > 0.0 {
        let jw = [-w[1], w[0]];
        let u = [w[0] / r, w[1] / r];
        [[jw[0] * u[0], jw[0] * u[1]], [jw[1] * u[0], jw[1] * u[1]]]
      } else {
        [[0.0; 2]; 2]
      };
      let (ra, rb) = (rot_mat(a), rot_mat(-a));
      let sheared = |t: f64| {
        let s = t * dom;
        let m = [[1.0 + s * shear[0][0], s * shear[0][1]], [s * shear[1][0], 1.0 + s * shear[1][1]]];
        mat_mul(&mat_mul(&mat_mul(&ra, &m), &rb), &j1)
      };
      let m1 = sheared(1.0);
      if let Some(l) = lift.as_deref_mut() {
        l.follow(sheared, 4)?;
        l.follow_rotation(om, m1)?;
      }
      out.jac = mat_mul(&rot_mat(om), &m1);
    }
    if track.action {
      out.action = action;
    }
    Ok(out)
  }
}

/// Validated special Hamiltonian together with its closed-form time-one map.
#[derive(Debug, Clone)]
pub struct SpecialSystem {
  pub params: SpecialParams,
  pub hamiltonian: SpecialHamiltonian,
  pub map: SpecialMap,
}

/// Builds the special Hamiltonian for a validated parameter pack.
pub fn build_special_hamiltonian(p: &SpecialParams) -> Result<SpecialSystem> {
  let report = validate_setup(p);
  if !report.passed() {
    return Err(Error::PreconditionViolated(format!("setup checks failed: {}", report.failures().join(", "))));
  }
  let index = Arc::new(DiskIndex::new(p)?);
  let b = p.boundary_coefficient();
  Ok(SpecialSystem {
    params: p.clone(),
    hamiltonian: SpecialHamiltonian { index: index.clone(), b },
    map: SpecialMap { index, b },
  })
}
