//! Invariants of the contact form on `S³` obtained from a disk map by the
//! open book construction, read off through the dictionary between disk and
//! contact invariants. The contact manifold itself is never built.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::diskmap::{
  disk_sweep, find_periodic_points, DiskFlow, DiskHamiltonian, DiskMap, JacobianLift, PeriodicPoint, Track,
};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::special::{build_special_hamiltonian, pack_rings, Packing, SpecialParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
  /// Every orbit found up to the period bound has rotation number above 1.
  VerifiedUpToK,
  Violated,
  Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitSource {
  Binding,
  /// A periodic point of the disk map.
  PeriodicPoint,
}

/// A closed Reeb orbit. For the orbit through a periodic point `p` of period
/// `L`: linking number `L`, action `A(p)` and rotation number `ρ(p) + L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
  pub source: OrbitSource,
  /// Location of `p` in the page; `None` for the binding.
  pub location: Option<[f64; 2]>,
  /// Linking number with the binding; 0 is recorded for the binding itself.
  pub linking: i64,
  pub action: f64,
  pub rotation: f64,
  pub isolated: bool,
  /// Cover multiplicity; above 1 for iterates of a simple orbit.
  pub iterate: usize,
}

impl OrbitRecord {
  fn from_point(p: &PeriodicPoint<f64>, iterate: usize) -> Self {
    let m = iterate as f64;
    Self {
      source: OrbitSource::PeriodicPoint,
      location: Some(p.location),
      linking: (iterate * p.period) as i64,
      action: m * p.action,
      rotation: m * (p.rotation + p.period as f64),
      isolated: p.isolated,
      iterate,
    }
  }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Binding {
  pub action: f64,
  pub rotation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactInvariants {
  pub volume: f64,
  pub ruelle: f64,
  /// Smallest action over the reported orbits.
  pub min_action: f64,
  /// `min_action² / volume`; an upper bound for the true systolic ratio.
  pub systolic_ratio: f64,
  pub dynamically_convex: Verdict,
  pub binding: Binding,
  /// Factor by which the contact form has been rescaled.
  pub scale: f64,
  /// Period bound `K` of the orbit search.
  pub period_bound: usize,
  /// `|Ru_k − Ru_{k/2}|` of the disk Ruelle estimate.
  pub ruelle_diagnostic: f64,
  /// Non-isolated orbits found; only part of them may be listed.
  pub non_isolated_count: usize,
  /// Smallest `ρ + L` over all periodic points found, listed or not.
  pub min_orbit_rotation: f64,
  pub orbits: Vec<OrbitRecord>,
}

/// Resolution knobs of [`contact_invariants`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContactSettings {
  /// Rings of the polar quadrature for the Calabi and Ruelle integrals.
  pub resolution: usize,
  /// Iterates behind the rotation averages.
  pub iterations: usize,
  /// Defaults to `3m` with `m` the symmetry order of the map.
  pub period_bound: Option<usize>,
  pub seed_resolution: usize,
  /// Width of the collar of `∂D` on which the boundary condition is checked.
  pub boundary_band: f64,
}

impl Default for ContactSettings {
  fn default() -> Self {
    Self { resolution: 200, iterations: 64, period_bound: None, seed_resolution: 24, boundary_band: 1e-3 }
  }
}

/// Checks that the time average of `H` equals `B·π(1 − r²)` on the collar
/// `1 − band ≤ r ≤ 1`.
fn check_boundary_condition<H: DiskHamiltonian<f64> + ?Sized>(h: &H, b: f64, band: f64) -> Result<()> {
  let mut cuts = vec![0.0];
  cuts.extend(h.meta().breakpoints.iter().copied().filter(|&t| t > 0.0 && t < 1.0));
  cuts.push(1.0);
  let nodes: Vec<(f64, f64)> = cuts.windows(2).flat_map(|w| gauss_legendre::<f64>(8, w[0], w[1])).collect();
  for i in 0..=8 {
    let r = 1.0 - band * i as f64 / 8.0;
    for j in 0..32 {
      let th = 2.0 * PI * j as f64 / 32.0;
      let z = [r * th.cos(), r * th.sin()];
      let avg: f64 = nodes.iter().map(|&(t, w)| w * h.value(t, z)).sum();
      let want = b * PI * (1.0 - r * r);
      if (avg - want).abs() > 1e-9 * (1.0 + b.abs()) {
        return Err(Error::PreconditionViolated(format!(
          "boundary condition: time-averaged H = {avg} at r = {r}, expected B·π(1−r²) = {want}"
        )));
      }
    }
  }
  Ok(())
}

/// Contact volume, Ruelle invariant, binding and closed orbits of the open
/// book whose page map is `map`, generated by `hamiltonian` with boundary
/// coefficient `b`.
pub fn contact_invariants<H, M>(hamiltonian: &H, map: &M, b: f64, settings: &ContactSettings) -> Result<ContactInvariants>
where
  H: DiskHamiltonian<f64> + ?Sized,
  M: DiskMap<f64> + ?Sized,
{
  if !(b.is_finite() && b > 0.0) {
    return Err(Error::InvalidInput(format!("boundary coefficient must be positive, got {b}")));
  }
  check_boundary_condition(hamiltonian, b, settings.boundary_band)?;
  let sweep = disk_sweep(map, settings.resolution, settings.iterations)?;
  if !(sweep.min_action > 0.0) {
    return Err(Error::PreconditionViolated(format!(
      "action positivity: min σ_φ = {} on the quadrature nodes",
      sweep.min_action
    )));
  }
  let k = settings.period_bound.unwrap_or(3 * map.symmetry_order().max(1));
  let found = find_periodic_points(map, k, settings.seed_resolution)?;
  if found.min_action <= 0.0 {
    return Err(Error::PreconditionViolated(format!(
      "action positivity: periodic point with action {}",
      found.min_action
    )));
  }

  let binding = Binding { action: PI, rotation: 1.0 + 1.0 / b };
  let mut orbits = vec![OrbitRecord {
    source: OrbitSource::Binding,
    location: None,
    linking: 0,
    action: binding.action,
    rotation: binding.rotation,
    isolated: true,
    iterate: 1,
  }];
  for p in found.all() {
    for m in 1..=k / p.period.max(1) {
      orbits.push(OrbitRecord::from_point(p, m));
    }
  }
  let min_action = orbits.iter().map(|o| o.action).fold(f64::INFINITY, f64::min).min(found.min_action);
  let min_orbit_rotation = found.min_rotation_plus_period;
  let violated = binding.rotation <= 1.0 || min_orbit_rotation <= 1.0 || orbits.iter().any(|o| o.rotation <= 1.0);
  let volume = sweep.calabi;
  if !(volume > 0.0) {
    return Err(Error::NonPositiveVolume(volume));
  }
  Ok(ContactInvariants {
    volume,
    ruelle: sweep.ruelle.value + PI,
    min_action,
    systolic_ratio: min_action * min_action / volume,
    dynamically_convex: if violated { Verdict::Violated } else { Verdict::VerifiedUpToK },
    binding,
    scale: 1.0,
    period_bound: k,
    ruelle_diagnostic: sweep.ruelle.diagnostic,
    non_isolated_count: found.non_isolated_count,
    min_orbit_rotation,
    orbits,
  })
}

/// [`contact_invariants`] for a flow, whose time-one map is the page map.
pub fn contact_invariants_of_flow<H: DiskHamiltonian<f64>>(
  flow: &DiskFlow<H, f64>,
  b: f64,
  settings: &ContactSettings,
) -> Result<ContactInvariants> {
  contact_invariants(&flow.hamiltonian, flow, b, settings)
}

/// Rotation number, in the trivialization of `S³`, of the orbit through a
/// `k`-periodic point `p`: `ρ(Φ̃(k, p)) + k`.
pub fn orbit_rotation_from_disk<M: DiskMap<f64> + ?Sized>(map: &M, p: [f64; 2], k: usize) -> Result<f64> {
  let mut lift = JacobianLift::new(&[]);
  map.iterate(p, k, Track::ALL, Some(&mut lift))?;
  Ok(lift.rho() + k as f64)
}

impl ContactInvariants {
  /// Rescales by `c`: lengths and actions scale by `c`, volume by `c²`.
  pub fn rescaled(&self, c: f64) -> Self {
    let mut out = self.clone();
    out.volume *= c * c;
    out.ruelle *= c;
    out.min_action *= c;
    out.binding.action *= c;
    out.scale *= c;
    for o in &mut out.orbits {
      o.action *= c;
    }
    out
  }
}

/// Rescales to unit volume. The systolic ratio is carried over unchanged.
pub fn normalize(inv: &ContactInvariants) -> Result<ContactInvariants> {
  if !(inv.volume > 0.0) {
    return Err(Error::NonPositiveVolume(inv.volume));
  }
  let mut out = inv.rescaled(1.0 / inv.volume.sqrt());
  out.volume = 1.0;
  Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CounterexampleMode {
  /// Ruelle invariant close to zero with systolic ratio close to 1.
  Small,
  /// Ruelle invariant of order `κ`.
  Large,
}

/// Disk radius `s = c/κ`.
pub const DISK_RADIUS_CONSTANT: f64 = 0.3;

/// Parameters of the counterexample at a given `κ`: `n = ⌊κ⌋ + 1` sectors,
/// disks of radius `0.3/κ` packed in rings, and
/// `(δ, R) = (s/(4πκ), −2 + 1/κ)` or `(s/(4πκ²), κ)`.
pub fn counterexample_params(mode: CounterexampleMode, kappa: f64, target_area: Option<f64>) -> Result<(SpecialParams, Packing)> {
  if !(kappa.is_finite() && kappa >= 10.0) {
    return Err(Error::InvalidInput(format!("κ must be at least 10, got {kappa}")));
  }
  let n = kappa.floor() as usize + 1;
  let s = DISK_RADIUS_CONSTANT / kappa;
  let (delta, twist) = match mode {
    CounterexampleMode::Small => (s / (4.0 * PI * kappa), -2.0 + 1.0 / kappa),
    CounterexampleMode::Large => (s / (4.0 * PI * kappa * kappa), kappa),
  };
  let packing = pack_rings(n, s, delta, target_area)?;
  let params = SpecialParams { n, disks: packing.disks.clone(), delta, twist, mollifier_width: None };
  Ok((params, packing))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
  pub mode: CounterexampleMode,
  pub kappa: f64,
  pub n: usize,
  pub disk_radius: f64,
  pub delta: f64,
  pub twist: f64,
  pub disk_count: usize,
  pub rings: usize,
  pub total_area: f64,
  pub collar_area: f64,
  pub raw: ContactInvariants,
  pub normalized: ContactInvariants,
}

/// Quadrature rings per disk radius used by [`counterexample`]; coarser grids
/// alias against the ring packing.
pub const RINGS_PER_DISK_RADIUS: f64 = 8.0;

/// Builds the counterexample contact form for `κ` and returns its invariants
/// before and after normalization to unit volume. The quadrature resolution
/// is raised to at least [`RINGS_PER_DISK_RADIUS`] rings per disk radius.
pub fn counterexample(
  mode: CounterexampleMode,
  kappa: f64,
  target_area: Option<f64>,
  settings: &ContactSettings,
) -> Result<CounterexampleReport> {
  let (params, packing) = counterexample_params(mode, kappa, target_area)?;
  let sys = build_special_hamiltonian(&params)?;
  let b = params.boundary_coefficient();
  let s = DISK_RADIUS_CONSTANT / kappa;
  let settings = ContactSettings {
    resolution: settings.resolution.max((RINGS_PER_DISK_RADIUS / s).ceil() as usize),
    ..*settings
  };
  let raw = contact_invariants(&sys.hamiltonian, &sys.map, b, &settings)?;
  let normalized = normalize(&raw)?;
  Ok(CounterexampleReport {
    mode,
    kappa,
    n: params.n,
    disk_radius: s,
    delta: params.delta,
    twist: params.twist,
    disk_count: params.disks.len(),
    rings: packing.rings,
    total_area: params.total_area(),
    collar_area: params.boundary_band_area(),
    raw,
    normalized,
  })
}
