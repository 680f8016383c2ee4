use serde::{Deserialize, Serialize};

use super::body::{axpy, dot, norm, project_to_boundary, scale, ConvexBody, Vec4};
use super::frame::{geometry_unchecked, quat_i, reeb_rhs};
use super::surface::{QuadratureSize, SurfaceQuadrature};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest admissible `|F − 1|` after projection.
pub const LEVEL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReebSettings {
  /// Step as a multiple of `(contact volume)^{1/4}`.
  pub step_scale: f64,
  /// Absolute step, overriding `step_scale`.
  pub step: Option<f64>,
}

impl Default for ReebSettings {
  fn default() -> Self {
    Self { step_scale: 1e-3, step: None }
  }
}

impl ReebSettings {
  /// Step for a body of the given contact volume.
  pub fn step_for(&self, contact_volume: f64) -> f64 {
    self.step.unwrap_or(self.step_scale * contact_volume.max(0.0).powf(0.25))
  }

  pub fn resolve<T: Scalar, B: ConvexBody<T> + ?Sized>(&self, body: &B) -> Result<f64> {
    match self.step {
      Some(h) => Ok(h),
      None => Ok(self.step_for(SurfaceQuadrature::new(body, QuadratureSize::new(8, 8, 8))?.contact_volume().as_f64())),
    }
  }
}

/// Endpoint of a Reeb trajectory with its co-integrated angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReebTrajectory<T> {
  pub start: Vec4<T>,
  pub end: Vec4<T>,
  pub time: T,
  /// `θ(T) − θ(0)` in turns.
  pub angle_change: T,
  /// `θ(T/2) − θ(0)`.
  pub half_angle_change: T,
  /// Largest `|F − 1|` before projection.
  pub max_drift: f64,
  pub steps: usize,
}

struct Run<T, const K: usize> {
  y: Vec4<T>,
  extra: [T; K],
  half: [T; K],
  max_drift: f64,
  steps: usize,
}

/// Even step count covering `time` with steps of at most `h`.
pub fn step_count(time: f64, h: f64) -> Result<usize> {
  if !(h > 0.0) || !time.is_finite() || time < 0.0 {
    return Err(Error::InvalidInput("time and step must be positive and finite".into()));
  }
  let n = (time / h).ceil() as usize;
  Ok((n + n % 2).max(2))
}

/// RK4 for `(y, extra)` with projection of `y` onto `{F = 1}` after every step.
fn integrate<T, B, F, const K: usize>(body: &B, y0: Vec4<T>, extra0: [T; K], time: T, n: usize, rhs: F) -> Result<Run<T, K>>
where
  T: Scalar,
  B: ConvexBody<T> + ?Sized,
  F: Fn(Vec4<T>, [T; K]) -> (Vec4<T>, [T; K]),
{
  let dt = time / T::lit(n as f64);
  let half_dt = T::lit(0.5) * dt;
  let (mut y, mut e) = (y0, extra0);
  let mut half = extra0;
  let mut max_drift = 0.0f64;
  let add = |e: [T; K], a: T, d: [T; K]| -> [T; K] { std::array::from_fn(|i| e[i] + a * d[i]) };
  for step in 0..n {
    let (k1, l1) = rhs(y, e);
    let (k2, l2) = rhs(axpy(half_dt, k1, y), add(e, half_dt, l1));
    let (k3, l3) = rhs(axpy(half_dt, k2, y), add(e, half_dt, l2));
    let (k4, l4) = rhs(axpy(dt, k3, y), add(e, dt, l3));
    let six = dt / T::lit(6.0);
    let two = T::lit(2.0);
    let mut ny = y;
    for i in 0..4 {
      ny[i] = y[i] + six * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
    }
    for i in 0..K {
      e[i] = e[i] + six * (l1[i] + two * l2[i] + two * l3[i] + l4[i]);
    }
    let drift = (body.value(ny) - T::one()).abs().as_f64();
    if !drift.is_finite() {
      return Err(Error::StepUnstable(format!("non-finite state at step {step}")));
    }
    max_drift = max_drift.max(drift);
    y = project_to_boundary(body, ny);
    let left = (body.value(y) - T::one()).abs().as_f64();
    if !(left <= LEVEL_TOLERANCE) {
      return Err(Error::StepUnstable(format!("projection left |F - 1| = {left:e} at step {step}")));
    }
    if step + 1 == n / 2 {
      half = e;
    }
  }
  Ok(Run { y, extra: e, half, max_drift, steps: n })
}

fn check_on_boundary<T: Scalar, B: ConvexBody<T> + ?Sized>(body: &B, y: Vec4<T>) -> Result<()> {
  let f = (body.value(y) - T::one()).abs().as_f64();
  if f > 1e-10 {
    return Err(Error::InvalidInput(format!("start point is off the boundary by {f:e}")));
  }
  Ok(())
}

/// Reeb flow `ẏ = Iν/⟨Z,ν⟩` with `θ̇ = ρ_τ(y, θ)` from `θ(0) = s`.
pub fn reeb_flow<T: Scalar, B: ConvexBody<T> + ?Sized>(
  body: &B,
  y0: Vec4<T>,
  s: T,
  time: T,
  step: f64,
) -> Result<ReebTrajectory<T>> {
  check_on_boundary(body, y0)?;
  let run = integrate(body, y0, [s], time, step_count(time.as_f64(), step)?, |y, [a]| {
    let (v, r) = reeb_rhs(body, y, a);
    (v, [r])
  })?;
  Ok(ReebTrajectory {
    start: y0,
    end: run.y,
    time,
    angle_change: run.extra[0] - s,
    half_angle_change: run.half[0] - s,
    max_drift: run.max_drift,
    steps: run.steps,
  })
}

/// Reeb flow alone over a fixed number of steps, returning the endpoint.
pub(crate) fn reeb_endpoint<T: Scalar, B: ConvexBody<T> + ?Sized>(body: &B, y0: Vec4<T>, time: T, steps: usize) -> Result<Vec4<T>> {
  let run = integrate(body, y0, [], time, steps, |y, _| {
    let g = body.gradient(y);
    let nu = scale(T::one() / norm(g), g);
    (scale(T::lit(2.0) / dot(y, nu), quat_i(nu)), [])
  })?;
  Ok(run.y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuelleEstimate {
  pub value: f64,
  /// The same estimate at horizon `T/2`.
  pub half_value: f64,
  /// `|value − half_value|`.
  pub diagnostic: f64,
  pub horizon: f64,
  pub step: f64,
  pub nodes: usize,
  pub max_drift: f64,
}

/// `∫_Y rot_T λ∧dλ` with `rot_T = (θ(T) − θ(0))/T` from each node.
pub fn ruelle_invariant<T: Scalar, B: ConvexBody<T> + ?Sized>(
  body: &B,
  quad: &SurfaceQuadrature<T>,
  horizon: f64,
  settings: &ReebSettings,
) -> Result<RuelleEstimate> {
  let step = settings.step_for(quad.contact_volume().as_f64());
  let time = T::lit(horizon);
  let (mut full, mut half, mut drift) = (0.0, 0.0, 0.0f64);
  for node in &quad.nodes {
    let tr = reeb_flow(body, node.geometry.point, T::zero(), time, step)?;
    let w = node.contact_weight.as_f64();
    full += w * tr.angle_change.as_f64() / horizon;
    half += w * tr.half_angle_change.as_f64() / (0.5 * horizon);
    drift = drift.max(tr.max_drift);
  }
  Ok(RuelleEstimate {
    value: full,
    half_value: half,
    diagnostic: (full - half).abs(),
    horizon,
    step,
    nodes: quad.nodes.len(),
    max_drift: drift,
  })
}

/// Time averages along the unit-speed `Iν` flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IvAverages {
  /// Average of `S(Iν,Iν)`.
  pub s_t: f64,
  /// Average of `H`.
  pub h_t: f64,
  /// Average of `|∇_{Iν}Iν|`.
  pub a_t: f64,
}

pub fn iv_flow_averages<T: Scalar, B: ConvexBody<T> + ?Sized>(body: &B, y0: Vec4<T>, time: f64, step: f64) -> Result<IvAverages> {
  check_on_boundary(body, y0)?;
  if !(time > 0.0) {
    return Err(Error::InvalidInput("time horizon must be positive".into()));
  }
  let run = integrate(body, y0, [T::zero(); 3], T::lit(time), step_count(time, step)?, |y, _| match geometry_unchecked(body, y) {
    Ok(g) => (g.frame.i_nu, [g.curvature.s[0][0], g.curvature.mean, g.curvature.iv_acceleration()]),
    Err(_) => ([T::nan(); 4], [T::nan(); 3]),
  })?;
  let [s, h, a] = run.extra.map(|v| v.as_f64() / time);
  Ok(IvAverages { s_t: s, h_t: h, a_t: a })
}
