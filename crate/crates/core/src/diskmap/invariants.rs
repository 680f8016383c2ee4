use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::quadrature::gauss_legendre;
use crate::scalar::Scalar;

use super::flow::{FlowState, JacobianLift, Track};
use super::map::DiskMap;

/// Midpoint quadrature on the unit disk, or on one sector `0 ≤ θ < 2π/m`
/// with weights multiplied by `m`, for integrands with that symmetry.
#[derive(Debug, Clone)]
pub struct DiskQuadrature<T> {
  pub nodes: Vec<([T; 2], T)>,
}

impl<T: Scalar> DiskQuadrature<T> {
  /// `resolution` radial rings; angular spacing matched to the ring width.
  /// Successive rings are offset by the golden ratio to avoid aliasing
  /// against lattice-like integrands.
  pub fn polar(resolution: usize, sector_order: usize) -> Self {
    let n = resolution.max(1);
    let m = sector_order.max(1);
    let nf = T::from_usize(n).unwrap();
    let sector = T::two_pi() / T::from_usize(m).unwrap();
    let golden = T::lit(0.618_033_988_749_894_9);
    let mut nodes = Vec::new();
    for i in 0..n {
      let r_in = T::from_usize(i).unwrap() / nf;
      let r_out = T::from_usize(i + 1).unwrap() / nf;
      let rc = ((r_in * r_in + r_out * r_out) / T::lit(2.0)).sqrt();
      let count = (rc * sector * nf).ceil().max(T::one());
      let k = count.to_usize().unwrap();
      let ring_area = T::PI() * (r_out * r_out - r_in * r_in);
      let w = ring_area / count;
      let offset = {
        let x = golden * T::from_usize(i).unwrap();
        x - x.floor()
      };
      for j in 0..k {
        let th = (T::from_usize(j).unwrap() + offset) * sector / count;
        nodes.push(([rc * th.cos(), rc * th.sin()], w));
      }
    }
    Self { nodes }
  }

  /// Gauss–Legendre in `r` (weight `r dr`) times the trapezoid rule in `θ`;
  /// spectrally accurate for smooth integrands.
  pub fn gauss_polar(radial: usize, angular: usize) -> Self {
    let na = angular.max(1);
    let dth = T::two_pi() / T::from_usize(na).unwrap();
    let mut nodes = Vec::with_capacity(radial * na);
    for (r, w) in gauss_legendre(radial, T::zero(), T::one()) {
      for j in 0..na {
        let th = T::from_usize(j).unwrap() * dth;
        nodes.push(([r * th.cos(), r * th.sin()], w * r * dth));
      }
    }
    Self { nodes }
  }

  pub fn len(&self) -> usize {
    self.nodes.len()
  }

  pub fn is_empty(&self) -> bool {
    self.nodes.is_empty()
  }
}

/// `σ_φ(z) = ∫₀¹ (λ(X_H) + H)(t, φ_t z) dt`.
pub fn action_map<T: Scalar, M: DiskMap<T> + ?Sized>(map: &M, z: [T; 2]) -> Result<T> {
  Ok(map.step(FlowState::start(T::zero(), z), Track { jacobian: false, action: true }, None)?.action)
}

/// `Cal = ∫_D σ_φ ω` on a polar grid with `resolution` rings.
pub fn calabi<T: Scalar, M: DiskMap<T> + ?Sized>(map: &M, resolution: usize) -> Result<T> {
  calabi_with(map, &DiskQuadrature::polar(resolution, map.symmetry_order()))
}

/// `Cal = ∫_D σ_φ ω` on a given quadrature.
pub fn calabi_with<T: Scalar, M: DiskMap<T> + ?Sized>(
  map: &M,
  quadrature: &DiskQuadrature<T>,
) -> Result<T> {
  let mut acc = T::zero();
  for (z, w) in &quadrature.nodes {
    acc = acc + *w * action_map(map, *z)?;
  }
  Ok(acc)
}

/// `(r_k, s_k)`: the rotation number of the `k`-step Jacobian path divided
/// by `k`, and the mean action over the first `k` iterates.
pub fn birkhoff_averages<T: Scalar, M: DiskMap<T> + ?Sized>(
  map: &M,
  z: [T; 2],
  k: usize,
) -> Result<(T, T)> {
  let k = k.max(1);
  let mut lift = JacobianLift::new(&[]);
  let s = map.iterate(z, k, Track::ALL, Some(&mut lift))?;
  let kf = T::from_usize(k).unwrap();
  Ok((lift.rho() / kf, s.action / kf))
}

/// Ruelle invariant of a disk map with its `k` versus `k/2` diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuelleDiskEstimate<T> {
  pub value: T,
  pub half_iterations_value: T,
  pub diagnostic: T,
  pub iterations: usize,
  pub nodes: usize,
}

/// Joint quadrature of action and rotation, sharing the flow evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskSweep<T> {
  pub calabi: T,
  pub ruelle: RuelleDiskEstimate<T>,
  pub min_action: T,
  pub max_action: T,
  pub min_rotation: T,
  pub max_rotation: T,
}

/// Visits each quadrature node with `σ_φ(z)`, `r_k(z)` and `r_{k/2}(z)`.
pub fn sweep_nodes<T: Scalar, M: DiskMap<T> + ?Sized, F>(
  map: &M,
  quadrature: &DiskQuadrature<T>,
  k: usize,
  mut visit: F,
) -> Result<()>
where
  F: FnMut([T; 2], T, T, T, T),
{
  let k = k.max(1);
  let k_half = (k / 2).max(1);
  for (z, w) in &quadrature.nodes {
    let mut lift = JacobianLift::new(&[]);
    let mut s = FlowState::start(T::zero(), *z);
    let mut action = T::zero();
    let mut r_half = T::zero();
    for i in 0..k {
      s = map.step(s, Track::ALL, Some(&mut lift))?;
      if i == 0 {
        action = s.action;
      }
      if i + 1 == k_half {
        r_half = lift.rho() / T::from_usize(k_half).unwrap();
      }
    }
    visit(*z, *w, action, lift.rho() / T::from_usize(k).unwrap(), r_half);
  }
  Ok(())
}

/// Calabi and Ruelle invariants in one pass over a polar grid.
pub fn disk_sweep<T: Scalar, M: DiskMap<T> + ?Sized>(
  map: &M,
  resolution: usize,
  k: usize,
) -> Result<DiskSweep<T>> {
  let q = DiskQuadrature::polar(resolution, map.symmetry_order());
  let (mut cal, mut ru, mut ru_half) = (T::zero(), T::zero(), T::zero());
  let (mut amin, mut amax) = (T::infinity(), T::neg_infinity());
  let (mut rmin, mut rmax) = (T::infinity(), T::neg_infinity());
  sweep_nodes(map, &q, k, |_, w, a, r, rh| {
    cal = cal + w * a;
    ru = ru + w * r;
    ru_half = ru_half + w * rh;
    amin = amin.min(a);
    amax = amax.max(a);
    rmin = rmin.min(r);
    rmax = rmax.max(r);
  })?;
  Ok(DiskSweep {
    calabi: cal,
    ruelle: RuelleDiskEstimate {
      value: ru,
      half_iterations_value: ru_half,
      diagnostic: (ru - ru_half).abs(),
      iterations: k.max(1),
      nodes: q.len(),
    },
    min_action: amin,
    max_action: amax,
    min_rotation: rmin,
    max_rotation: rmax,
  })
}

/// `Ru(D, φ) = ∫_D r_φ ω`, estimated with `r_k` on a polar grid.
pub fn ruelle_diskmap<T: Scalar, M: DiskMap<T> + ?Sized>(
  map: &M,
  resolution: usize,
  k: usize,
) -> Result<RuelleDiskEstimate<T>> {
  Ok(disk_sweep(map, resolution, k)?.ruelle)
}
