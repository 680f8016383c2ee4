use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sp2::{sigma, vector_turns, AngleLift, SymplecticMatrix, MAX_TURN_STEP};

use super::hamiltonian::DiskHamiltonian;

/// Step control for [`DiskFlow`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSettings<T> {
  /// Minimum number of steps per unit time.
  pub steps_per_unit: usize,
  /// Steps are also capped at `stiffness_factor / stiffness(t, z)`.
  pub stiffness_factor: T,
  /// Abort when `|det Φ − 1|` exceeds this.
  pub det_tol: T,
  /// Abort when the energy of an autonomous Hamiltonian drifts more than this.
  pub energy_tol: T,
}

impl<T: Scalar> Default for FlowSettings<T> {
  fn default() -> Self {
    Self {
      steps_per_unit: 200,
      stiffness_factor: T::lit(0.02),
      det_tol: T::lit(1e-6),
      energy_tol: T::lit(1e-6),
    }
  }
}

/// Point, Jacobian, accumulated action and time along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowState<T> {
  pub t: T,
  pub z: [T; 2],
  pub jac: [[T; 2]; 2],
  pub action: T,
}

impl<T: Scalar> FlowState<T> {
  pub fn start(t: T, z: [T; 2]) -> Self {
    Self { t, z, jac: [[T::one(), T::zero()], [T::zero(), T::one()]], action: T::zero() }
  }

  pub fn jacobian(&self) -> SymplecticMatrix<T> {
    SymplecticMatrix::new_unchecked(self.jac)
  }
}

/// Continuous lifts carried along a flow: σ of the Jacobian and the windings
/// of probe vectors under it.
#[derive(Debug, Clone)]
pub struct JacobianLift<T> {
  pub sigma: AngleLift<T>,
  pub probes: Vec<([T; 2], T, AngleLift<T>)>,
}

impl<T: Scalar> JacobianLift<T> {
  pub fn new(probes: &[[T; 2]]) -> Self {
    Self {
      sigma: AngleLift::starting_at(T::zero()),
      probes: probes
        .iter()
        .map(|s| {
          let a = vector_turns(*s);
          (*s, a, AngleLift::starting_at(a))
        })
        .collect(),
    }
  }

  /// Lift continuing from an already accumulated state.
  pub fn rho(&self) -> T {
    self.sigma.value()
  }

  pub fn probe_winding(&self, k: usize) -> T {
    self.probes[k].2.value() - self.probes[k].1
  }

  /// Extends the lift along `t ↦ f(t)` for `t ∈ (0, 1]`, starting from `n`
  /// uniform samples and bisecting wherever an angle would jump too far.
  /// `f(0)` must be the matrix the lift currently ends at.
  pub fn follow<F: Fn(T) -> [[T; 2]; 2]>(&mut self, f: F, n: usize) -> Result<()> {
    let n = n.max(1);
    let mut t_prev = T::zero();
    for j in 1..=n {
      let goal = T::from_usize(j).unwrap() / T::from_usize(n).unwrap();
      let mut t = goal;
      let mut depth = 0;
      loop {
        let m = f(t);
        if self.accepts(&m) {
          self.advance(&m);
          t_prev = t;
          depth = 0;
          if t == goal {
            break;
          }
          t = goal;
        } else {
          depth += 1;
          if depth > MAX_HALVINGS {
            return Err(Error::SamplingTooCoarse { index: j, jump: MAX_TURN_STEP });
          }
          t = (t_prev + t) / T::lit(2.0);
        }
      }
    }
    Ok(())
  }

  /// Extends the lift along `t ↦ R(t·angle)·m0`. Whole turns are added
  /// exactly, so only the remaining fraction is sampled.
  pub fn follow_rotation(&mut self, angle: T, m0: [[T; 2]; 2]) -> Result<()> {
    let turns = (angle / T::two_pi()).round();
    let rest = angle - turns * T::two_pi();
    let n = (T::lit(8.0) * rest.abs() / T::two_pi()).ceil().to_usize().unwrap_or(0) + 2;
    self.follow(
      |t| {
        let (s, c) = (t * rest).sin_cos();
        [
          [c * m0[0][0] - s * m0[1][0], c * m0[0][1] - s * m0[1][1]],
          [s * m0[0][0] + c * m0[1][0], s * m0[0][1] + c * m0[1][1]],
        ]
      },
      n,
    )?;
    self.sigma.shift(turns);
    for (_, _, l) in self.probes.iter_mut() {
      l.shift(turns);
    }
    Ok(())
  }

  fn accepts(&self, jac: &[[T; 2]; 2]) -> bool {
    let m = SymplecticMatrix::new_unchecked(*jac);
    self.sigma.peek(sigma(&m)).is_ok()
      && self.probes.iter().all(|(s, _, l)| l.peek(vector_turns(m.apply(*s))).is_ok())
  }

  fn advance(&mut self, jac: &[[T; 2]; 2]) {
    let m = SymplecticMatrix::new_unchecked(*jac);
    self.sigma.push(sigma(&m)).ok();
    for (s, _, l) in self.probes.iter_mut() {
      l.push(vector_turns(m.apply(*s))).ok();
    }
  }
}

/// What to carry besides the point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Track {
  pub jacobian: bool,
  pub action: bool,
}

impl Track {
  pub const POINT: Track = Track { jacobian: false, action: false };
  pub const ALL: Track = Track { jacobian: true, action: true };
}

/// The flow of a [`DiskHamiltonian`] integrated with fixed-order RK4 steps.
#[derive(Debug, Clone)]
pub struct DiskFlow<H, T> {
  pub hamiltonian: H,
  pub settings: FlowSettings<T>,
}

const MAX_HALVINGS: usize = 30;

impl<T: Scalar, H: DiskHamiltonian<T>> DiskFlow<H, T> {
  pub fn new(hamiltonian: H) -> Self {
    Self { hamiltonian, settings: FlowSettings::default() }
  }

  pub fn with_settings(hamiltonian: H, settings: FlowSettings<T>) -> Self {
    Self { hamiltonian, settings }
  }

  fn period_time(t: T) -> T {
    t - t.floor()
  }

  /// Derivative of `(z, J, action)`.
  fn rhs(&self, t: T, z: [T; 2], jac: &[[T; 2]; 2], track: Track) -> ([T; 2], [[T; 2]; 2], T) {
    let tp = Self::period_time(t);
    let g = self.hamiltonian.gradient(tp, z);
    let x = [g[1], -g[0]];
    let dj = if track.jacobian {
      let h = self.hamiltonian.hessian(tp, z);
      let dx = [[h[1][0], h[1][1]], [-h[0][0], -h[0][1]]];
      let mut out = [[T::zero(); 2]; 2];
      for i in 0..2 {
        for j in 0..2 {
          out[i][j] = dx[i][0] * jac[0][j] + dx[i][1] * jac[1][j];
        }
      }
      out
    } else {
      [[T::zero(); 2]; 2]
    };
    let da = if track.action {
      let half = T::lit(0.5);
      half * (z[0] * x[1] - z[1] * x[0]) + self.hamiltonian.value(tp, z)
    } else {
      T::zero()
    };
    (x, dj, da)
  }

  /// One RK4 step. Stage times are pulled into the open piece `(lo, hi)` so
  /// that a piecewise Hamiltonian is never sampled across a breakpoint.
  fn rk4(&self, s: &FlowState<T>, h: T, track: Track, (lo, hi): (T, T)) -> FlowState<T> {
    let half = T::lit(0.5);
    let pad = (hi - lo) * T::lit(1e-12);
    let at = |t: T| t.max(lo + pad).min(hi - pad);
    let add = |s: &FlowState<T>, k: &([T; 2], [[T; 2]; 2], T), c: T| -> ([T; 2], [[T; 2]; 2]) {
      let z = [s.z[0] + c * k.0[0], s.z[1] + c * k.0[1]];
      let mut j = s.jac;
      for a in 0..2 {
        for b in 0..2 {
          j[a][b] = j[a][b] + c * k.1[a][b];
        }
      }
      (z, j)
    };
    let k1 = self.rhs(at(s.t), s.z, &s.jac, track);
    let (z2, j2) = add(s, &k1, half * h);
    let k2 = self.rhs(at(s.t + half * h), z2, &j2, track);
    let (z3, j3) = add(s, &k2, half * h);
    let k3 = self.rhs(at(s.t + half * h), z3, &j3, track);
    let (z4, j4) = add(s, &k3, h);
    let k4 = self.rhs(at(s.t + h), z4, &j4, track);
    let six = T::lit(6.0);
    let two = T::lit(2.0);
    let comb = |a: T, b: T, c: T, d: T| (a + two * b + two * c + d) * h / six;
    let mut out = *s;
    out.t = s.t + h;
    for i in 0..2 {
      out.z[i] = s.z[i] + comb(k1.0[i], k2.0[i], k3.0[i], k4.0[i]);
    }
    if track.jacobian {
      for a in 0..2 {
        for b in 0..2 {
          out.jac[a][b] = s.jac[a][b] + comb(k1.1[a][b], k2.1[a][b], k3.1[a][b], k4.1[a][b]);
        }
      }
    }
    if track.action {
      out.action = s.action + comb(k1.2, k2.2, k3.2, k4.2);
    }
    out
  }

  /// Breakpoints (including integers) strictly inside `(t0, t1)`, then `t1`.
  fn pieces(&self, t0: T, t1: T) -> Vec<T> {
    let mut bps = self.hamiltonian.meta().breakpoints;
    bps.push(T::zero());
    let mut out = Vec::new();
    let mut k = t0.floor();
    while k < t1 {
      for &b in &bps {
        let c = k + b;
        if c > t0 && c < t1 {
          out.push(c);
        }
      }
      k = k + T::one();
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.push(t1);
    out
  }

  /// Integrates from `state` to time `t1`, calling `visit` after every step.
  /// When `lift` is given, steps are halved until its angles move by less
  /// than a quarter turn.
  pub fn advance<F>(
    &self,
    mut state: FlowState<T>,
    t1: T,
    track: Track,
    mut lift: Option<&mut JacobianLift<T>>,
    mut visit: F,
  ) -> Result<FlowState<T>>
  where
    F: FnMut(&FlowState<T>),
  {
    let track = Track { jacobian: track.jacobian || lift.is_some(), action: track.action };
    let meta = self.hamiltonian.meta();
    let e0 = if meta.autonomous { Some(self.hamiltonian.value(T::zero(), state.z)) } else { None };
    let mut start = state.t;
    for end in self.pieces(state.t, t1) {
      let len = end - start;
      let n = (len * T::from_usize(self.settings.steps_per_unit).unwrap()).ceil().max(T::one());
      let h_uniform = len / n;
      let eps = h_uniform * T::lit(1e-9);
      while end - state.t > eps {
        let stiff = self.hamiltonian.stiffness(Self::period_time(state.t), state.z);
        let mut h = h_uniform;
        if stiff * h > self.settings.stiffness_factor {
          h = self.settings.stiffness_factor / stiff;
        }
        if end - state.t - h < eps {
          h = end - state.t;
        }
        let mut next = self.rk4(&state, h, track, (start, end));
        let mut halvings = 0;
        if let Some(l) = lift.as_deref() {
          while !l.accepts(&next.jac) {
            halvings += 1;
            if halvings > MAX_HALVINGS {
              return Err(Error::SamplingTooCoarse { index: 0, jump: MAX_TURN_STEP });
            }
            h = h / T::lit(2.0);
            next = self.rk4(&state, h, track, (start, end));
          }
        }
        if let Some(l) = lift.as_deref_mut() {
          l.advance(&next.jac);
        }
        if !(next.z[0].is_finite() && next.z[1].is_finite()) {
          return Err(Error::StepUnstable(format!("non-finite state at t = {}", next.t)));
        }
        state = next;
        visit(&state);
      }
      state.t = end;
      start = end;
    }
    if track.jacobian {
      let det = state.jac[0][0] * state.jac[1][1] - state.jac[0][1] * state.jac[1][0];
      if (det - T::one()).abs() > self.settings.det_tol {
        return Err(Error::StepUnstable(format!("Jacobian determinant drifted to {det}")));
      }
    }
    if let Some(e0) = e0 {
      let e1 = self.hamiltonian.value(T::zero(), state.z);
      if (e1 - e0).abs() > self.settings.energy_tol {
        return Err(Error::StepUnstable(format!("energy drifted by {}", (e1 - e0).abs())));
      }
    }
    Ok(state)
  }

  /// Time-one map from time `t0` (usually an integer).
  pub fn time_one(&self, z: [T; 2], track: Track) -> Result<FlowState<T>> {
    self.advance(FlowState::start(T::zero(), z), T::one(), track, None, |_| {})
  }

  /// `k`-th iterate from `z`, carrying the lifts of the Jacobian path.
  pub fn iterate_lifted(&self, z: [T; 2], k: usize, lift: &mut JacobianLift<T>) -> Result<FlowState<T>> {
    let mut s = FlowState::start(T::zero(), z);
    for i in 0..k {
      s = self.advance(s, T::from_usize(i + 1).unwrap(), Track::ALL, Some(lift), |_| {})?;
    }
    Ok(s)
  }
}

/// A sampled trajectory: every accepted step of the integrator.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
  pub states: Vec<FlowState<T>>,
}

impl<T: Scalar> Trajectory<T> {
  pub fn last(&self) -> &FlowState<T> {
    self.states.last().expect("trajectory nonempty")
  }

  /// The Jacobian path as time-stamped Sp(2) samples.
  pub fn jacobian_samples(&self) -> Vec<(T, SymplecticMatrix<T>)> {
    self.states.iter().map(|s| (s.t, s.jacobian())).collect()
  }
}

/// Trajectory of `z0` over `t_span` with its Jacobian path and action.
pub fn integrate_flow<T: Scalar, H: DiskHamiltonian<T>>(
  flow: &DiskFlow<H, T>,
  z0: [T; 2],
  t_span: (T, T),
) -> Result<Trajectory<T>> {
  let start = FlowState::start(t_span.0, z0);
  let mut states = vec![start];
  let mut lift = JacobianLift::new(&[]);
  flow.advance(start, t_span.1, Track::ALL, Some(&mut lift), |s| states.push(*s))?;
  Ok(Trajectory { states })
}
