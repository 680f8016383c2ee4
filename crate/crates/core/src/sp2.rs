//! The group Sp(2) and its universal cover.
//!
//! Angles are measured in turns. A path is lifted by unwinding the circle
//! invariant [`sigma`] sample by sample; the endpoint of the lift is the
//! rotation number of the path.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest accepted change of a lifted angle between consecutive samples.
pub const MAX_TURN_STEP: f64 = 0.25;
/// Tolerance on `det = 1`.
pub const DET_TOL: f64 = 1e-10;
/// Band on `trace² − 4` treated as the real-eigenvalue branch.
pub const DISCRIMINANT_BAND: f64 = 1e-12;
/// Tolerance on `|det(Φ − Id)|` below which an endpoint counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;
const MAX_BISECTIONS: usize = 40;
/// Most points inserted between two samples by arc refinement.
const MAX_INSERTED: usize = 1 << 14;

/// A real 2×2 matrix of determinant one, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymplecticMatrix<T> {
  pub m: [[T; 2]; 2],
}

impl<T: Scalar> SymplecticMatrix<T> {
  /// Checked constructor.
  pub fn new(m: [[T; 2]; 2]) -> Result<Self> {
    let s = Self { m };
    let det = s.det();
    if (det - T::one()).abs() > T::tol(DET_TOL) {
      return Err(Error::NotSymplectic { det: det.as_f64() });
    }
    Ok(s)
  }

  /// Constructor without the determinant check, for matrices produced by
  /// integrators that monitor the drift themselves.
  pub fn new_unchecked(m: [[T; 2]; 2]) -> Self {
    Self { m }
  }

  pub fn identity() -> Self {
    Self { m: [[T::one(), T::zero()], [T::zero(), T::one()]] }
  }

  /// Counterclockwise rotation by `turns` full turns.
  pub fn rotation(turns: T) -> Self {
    let (s, c) = (T::two_pi() * turns).sin_cos();
    Self { m: [[c, -s], [s, c]] }
  }

  /// Matrix exponential of a traceless 2×2 matrix.
  pub fn exp_sl2(a: [[T; 2]; 2]) -> Self {
    // A² = −det(A)·Id for traceless A.
    let q = -(a[0][0] * a[1][1] - a[0][1] * a[1][0]);
    let (c, s) = if q > T::zero() {
      let w = q.sqrt();
      (w.cosh(), w.sinh() / w)
    } else if q < T::zero() {
      let w = (-q).sqrt();
      (w.cos(), w.sin() / w)
    } else {
      (T::one(), T::one())
    };
    Self {
      m: [
        [c + s * a[0][0], s * a[0][1]],
        [s * a[1][0], c + s * a[1][1]],
      ],
    }
  }

  pub fn det(&self) -> T {
    self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
  }

  pub fn trace(&self) -> T {
    self.m[0][0] + self.m[1][1]
  }

  /// Matrix product `self · rhs`.
  pub fn mul(&self, rhs: &Self) -> Self {
    let a = &self.m;
    let b = &rhs.m;
    Self {
      m: [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
      ],
    }
  }

  /// Inverse, using `det = 1`.
  pub fn inverse(&self) -> Self {
    Self { m: [[self.m[1][1], -self.m[0][1]], [-self.m[1][0], self.m[0][0]]] }
  }

  pub fn apply(&self, v: [T; 2]) -> [T; 2] {
    [
      self.m[0][0] * v[0] + self.m[0][1] * v[1],
      self.m[1][0] * v[0] + self.m[1][1] * v[1],
    ]
  }

  /// `|det(Φ − Id)| = |2 − trace|`.
  pub fn fixed_point_defect(&self) -> T {
    (T::lit(2.0) - self.trace()).abs()
  }
}

/// The circle-valued invariant σ, in turns in `[0, 1)`.
///
/// Real positive eigenvalues give 0, real negative ones ½. For complex
/// eigenvalues `ζ, ζ̄` the value is `arg ζ / 2π` where `ζ` is the eigenvalue
/// in the upper half plane when `⟨iv, Φv⟩ > 0` and its conjugate otherwise.
pub fn sigma<T: Scalar>(m: &SymplecticMatrix<T>) -> T {
  let tr = m.trace();
  let two = T::lit(2.0);
  if tr * tr - two * two >= -T::tol(DISCRIMINANT_BAND) {
    return if tr > T::zero() { T::zero() } else { T::lit(0.5) };
  }
  let theta = (tr / two).max(-T::one()).min(T::one()).acos() / T::two_pi();
  // v = (1,0): ⟨iv, Φv⟩ = Φ₂₁. Fallback v = (0,1): ⟨iv, Φv⟩ = −Φ₁₂.
  let probe = if m.m[1][0].abs() >= T::tol(1e-12) { m.m[1][0] } else { -m.m[0][1] };
  if probe > T::zero() {
    theta
  } else {
    T::one() - theta
  }
}

/// Signed distance from `x` to the nearest integer, in `[-½, ½]`.
#[inline]
pub fn wrap_turn<T: Scalar>(x: T) -> T {
  x - x.round()
}

/// Streaming continuous lift of a circle-valued angle.
#[derive(Debug, Clone, Copy)]
pub struct AngleLift<T> {
  value: T,
  last: T,
}

impl<T: Scalar> AngleLift<T> {
  /// Starts a lift at circle value `start`, with lifted value `start`.
  pub fn starting_at(start: T) -> Self {
    Self { value: start, last: start }
  }

  /// Current lifted value.
  pub fn value(&self) -> T {
    self.value
  }

  /// Circle value `x` the lift would move to, or the offending jump.
  pub fn peek(&self, x: T) -> std::result::Result<T, T> {
    let d = wrap_turn(x - self.last);
    if d.abs() >= T::lit(MAX_TURN_STEP) {
      return Err(d);
    }
    // Keep lifted ≡ x exactly modulo one.
    let k = (self.value + d - x).round();
    Ok(x + k)
  }

  /// Adds `turns` (an integer) to the lifted value.
  pub fn shift(&mut self, turns: T) {
    self.value = self.value + turns;
  }

  /// Advances to circle value `x`.
  pub fn push(&mut self, x: T) -> std::result::Result<(), T> {
    let v = self.peek(x)?;
    self.value = v;
    self.last = x;
    Ok(())
  }
}

/// Angle of a nonzero vector in turns, in `(-½, ½]`.
#[inline]
pub fn vector_turns<T: Scalar>(v: [T; 2]) -> T {
  v[1].atan2(v[0]) / T::two_pi()
}

/// Sampled path in Sp(2) from the identity with its lifted angles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiftedSymplecticPath<T> {
  /// `(time, matrix)` samples, starting at the identity.
  pub samples: Vec<(T, SymplecticMatrix<T>)>,
  /// Continuous lift of σ along the samples; the last entry is ρ.
  pub lifted_angle: Vec<T>,
  /// Per probe vector `s`, the continuous winding of `Φ(t)s` relative to `s`.
  pub lifted_angle_rel_s: Vec<([T; 2], Vec<T>)>,
}

/// Traceless `A` with `exp(A) = m`; `None` when `trace(m) ≤ −2`.
pub fn log_sl2<T: Scalar>(m: &SymplecticMatrix<T>) -> Option<[[T; 2]; 2]> {
  let c = m.trace() / T::lit(2.0);
  if c <= -T::one() {
    return None;
  }
  // det(m − c·Id) = 1 − c², so f·(m − c·Id) has eigenvalues ±iθ or ±η.
  let d = c - T::one();
  let f = if d.abs() < T::tol(1e-8) {
    T::one() - d / T::lit(3.0)
  } else if c < T::one() {
    let th = c.acos();
    th / th.sin()
  } else {
    let eta = (c + (c * c - T::one()).sqrt()).ln();
    eta / eta.sinh()
  };
  Some([[f * (m.m[0][0] - c), f * m.m[0][1]], [f * m.m[1][0], f * (m.m[1][1] - c)]])
}

/// Point `τ ∈ [0, 1]` of the one-parameter arc `m₀·exp(τ log(m₀⁻¹m₁))`.
fn arc_point<T: Scalar>(m0: &SymplecticMatrix<T>, a: &[[T; 2]; 2], tau: T) -> SymplecticMatrix<T> {
  m0.mul(&SymplecticMatrix::exp_sl2([[tau * a[0][0], tau * a[0][1]], [tau * a[1][0], tau * a[1][1]]]))
}

/// Lifts `angle` along the samples. With `interpolate`, steps that move the
/// angle too far are bisected along one-parameter arcs between samples and
/// the inserted points are returned with the lift.
fn lift_along<T: Scalar, F: Fn(&SymplecticMatrix<T>) -> T>(
  samples: &[(T, SymplecticMatrix<T>)],
  start: T,
  angle: F,
  interpolate: bool,
) -> Result<(Vec<(T, SymplecticMatrix<T>)>, Vec<T>)> {
  let mut lift = AngleLift::starting_at(start);
  let mut out_samples = vec![samples[0]];
  let mut out = vec![T::zero()];
  lift.push(angle(&samples[0].1)).map_err(|jump| Error::SamplingTooCoarse { index: 0, jump: jump.as_f64() })?;
  for (k, w) in samples.windows(2).enumerate() {
    let ((t0, m0), (t1, m1)) = (w[0], w[1]);
    if let Ok(()) = lift.push(angle(&m1)) {
      out_samples.push((t1, m1));
      out.push(lift.value() - start);
      continue;
    }
    let coarse = |jump: T| Error::SamplingTooCoarse { index: k + 1, jump: jump.as_f64() };
    let jump = lift.peek(angle(&m1)).err().unwrap_or(T::lit(MAX_TURN_STEP));
    let arc = match (interpolate, log_sl2(&m0.inverse().mul(&m1))) {
      (true, Some(a)) => a,
      _ => return Err(coarse(jump)),
    };
    let mut stack = vec![(T::one(), 0usize)];
    let mut left = T::zero();
    let mut inserted = 0;
    while let Some(&(right, depth)) = stack.last() {
      inserted += 1;
      if inserted > MAX_INSERTED {
        return Err(coarse(jump));
      }
      let m = if right == T::one() { m1 } else { arc_point(&m0, &arc, right) };
      match lift.push(angle(&m)) {
        Ok(()) => {
          out_samples.push((t0 + (t1 - t0) * right, m));
          out.push(lift.value() - start);
          left = right;
          stack.pop();
        }
        Err(jump) if depth >= MAX_BISECTIONS => return Err(coarse(jump)),
        Err(_) => stack.push(((left + right) / T::lit(2.0), depth + 1)),
      }
    }
  }
  Ok((out_samples, out))
}

fn lift_vector<T: Scalar>(samples: &[(T, SymplecticMatrix<T>)], s: [T; 2]) -> Result<Vec<T>> {
  Ok(lift_along(samples, vector_turns(s), |m| vector_turns(m.apply(s)), true)?.1)
}

fn is_identity<T: Scalar>(m: &SymplecticMatrix<T>) -> bool {
  let tol = T::tol(1e-10);
  (m.m[0][0] - T::one()).abs() <= tol
    && m.m[0][1].abs() <= tol
    && m.m[1][0].abs() <= tol
    && (m.m[1][1] - T::one()).abs() <= tol
}

/// Lifts raw samples; fails if the first sample is not the identity or a
/// σ-step reaches [`MAX_TURN_STEP`].
pub fn lift_path<T: Scalar>(raw: Vec<(T, SymplecticMatrix<T>)>) -> Result<LiftedSymplecticPath<T>> {
  LiftedSymplecticPath::from_samples(raw)
}

/// Winding of `Φ(t)s` relative to `s` along the path, in turns.
pub fn rotation_rel_s<T: Scalar>(path: &LiftedSymplecticPath<T>, s: [T; 2]) -> Result<T> {
  path.rotation_rel_s(s)
}

impl<T: Scalar> LiftedSymplecticPath<T> {
  pub fn from_samples(raw: Vec<(T, SymplecticMatrix<T>)>) -> Result<Self> {
    match raw.first() {
      Some((_, m)) if is_identity(m) => {}
      _ => return Err(Error::PathNotAtIdentity),
    }
    let (_, lifted_angle) = lift_along(&raw, T::zero(), sigma, false)?;
    Ok(Self { samples: raw, lifted_angle, lifted_angle_rel_s: Vec::new() })
  }

  /// As [`Self::from_samples`], refining coarse steps along one-parameter arcs.
  fn from_samples_interpolated(raw: Vec<(T, SymplecticMatrix<T>)>) -> Result<Self> {
    if !is_identity(&raw[0].1) {
      return Err(Error::PathNotAtIdentity);
    }
    let (samples, lifted_angle) = lift_along(&raw, T::zero(), sigma, true)?;
    Ok(Self { samples, lifted_angle, lifted_angle_rel_s: Vec::new() })
  }

  /// Samples `f` on `[t0, t1]` with `n` uniform steps, bisecting any step
  /// whose σ-jump (or winding jump of a probe vector) is too large.
  ///
  /// The initial grid must move less than one turn per step; whole-turn
  /// aliasing is invisible to any sampling test.
  pub fn from_generator<F>(f: F, t0: T, t1: T, n: usize, probes: &[[T; 2]]) -> Result<Self>
  where
    F: Fn(T) -> SymplecticMatrix<T>,
  {
    let n = n.max(1);
    let m0 = f(t0);
    if !is_identity(&m0) {
      return Err(Error::PathNotAtIdentity);
    }
    let mut samples = vec![(t0, m0)];
    let mut sig = AngleLift::starting_at(T::zero());
    let mut lifted = vec![T::zero()];
    let mut probe_lifts: Vec<(T, AngleLift<T>, Vec<T>)> = probes
      .iter()
      .map(|s| {
        let a = vector_turns(*s);
        (a, AngleLift::starting_at(a), vec![T::zero()])
      })
      .collect();
    let dt = (t1 - t0) / T::from_usize(n).unwrap();
    for k in 0..n {
      let a = t0 + dt * T::from_usize(k).unwrap();
      let b = if k + 1 == n { t1 } else { a + dt };
      // Stack of pending right endpoints; refine left to right.
      let mut stack = vec![(b, 0usize)];
      let mut left = a;
      while let Some(&(right, depth)) = stack.last() {
        let m = f(right);
        let ok = sig.peek(sigma(&m)).is_ok()
          && probe_lifts
            .iter()
            .zip(probes)
            .all(|((_, l, _), s)| l.peek(vector_turns(m.apply(*s))).is_ok());
        if ok {
          sig.push(sigma(&m)).ok();
          lifted.push(sig.value());
          for ((start, l, out), s) in probe_lifts.iter_mut().zip(probes) {
            l.push(vector_turns(m.apply(*s))).ok();
            out.push(l.value() - *start);
          }
          samples.push((right, m));
          left = right;
          stack.pop();
        } else {
          if depth >= MAX_BISECTIONS {
            let jump = sig.peek(sigma(&m)).err().unwrap_or(T::lit(MAX_TURN_STEP));
            return Err(Error::SamplingTooCoarse { index: samples.len(), jump: jump.as_f64() });
          }
          let mid = left + (right - left) / T::lit(2.0);
          stack.push((mid, depth + 1));
        }
      }
    }
    let lifted_angle_rel_s = probes
      .iter()
      .zip(probe_lifts)
      .map(|(s, (_, _, out))| (*s, out))
      .collect();
    Ok(Self { samples, lifted_angle: lifted, lifted_angle_rel_s })
  }

  /// Rotation number ρ of the path (final lifted angle).
  pub fn rho(&self) -> T {
    *self.lifted_angle.last().expect("path has samples")
  }

  pub fn endpoint(&self) -> SymplecticMatrix<T> {
    self.samples.last().expect("path has samples").1
  }

  /// Winding of `Φ(t)s` relative to `s`; reuses a stored probe when present.
  pub fn rotation_rel_s(&self, s: [T; 2]) -> Result<T> {
    if let Some((_, w)) = self.lifted_angle_rel_s.iter().find(|(p, _)| *p == s) {
      return Ok(*w.last().expect("probe lift nonempty"));
    }
    Ok(*lift_vector(&self.samples, s)?.last().expect("path has samples"))
  }

  /// Adds the winding samples of probe vector `s`.
  pub fn with_probe(mut self, s: [T; 2]) -> Result<Self> {
    let w = lift_vector(&self.samples, s)?;
    self.lifted_angle_rel_s.push((s, w));
    Ok(self)
  }

  /// Path of the product `Ψ·Φ` in the universal cover: `self` (Φ)
  /// reparametrized to the first half, then `Ψ(t)·Φ(1)`.
  pub fn then(&self, psi: &Self) -> Result<Self> {
    let half = T::lit(0.5);
    let (a0, a1) = (self.samples[0].0, self.samples.last().unwrap().0);
    let (b0, b1) = (psi.samples[0].0, psi.samples.last().unwrap().0);
    let end = self.endpoint();
    let mut raw: Vec<(T, SymplecticMatrix<T>)> = self
      .samples
      .iter()
      .map(|(t, m)| (half * (*t - a0) / (a1 - a0), *m))
      .collect();
    raw.extend(psi.samples.iter().skip(1).map(|(t, m)| (half + half * (*t - b0) / (b1 - b0), m.mul(&end))));
    Self::from_samples_interpolated(raw)
  }

  /// `k`-fold concatenation `Φ^k` in the universal cover.
  pub fn power(&self, k: usize) -> Result<Self> {
    let mut raw = vec![self.samples[0]];
    let (a0, a1) = (self.samples[0].0, self.samples.last().unwrap().0);
    let end = self.endpoint();
    let mut acc = SymplecticMatrix::identity();
    for j in 0..k {
      for (t, m) in self.samples.iter().skip(1) {
        let tau = (*t - a0) / (a1 - a0) + T::from_usize(j).unwrap();
        raw.push((tau, m.mul(&acc)));
      }
      acc = end.mul(&acc);
    }
    Self::from_samples_interpolated(raw)
  }
}

/// Conley–Zehnder index, or its lower bound on degenerate endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CzResult {
  pub value: i64,
  pub degenerate: bool,
}

/// `⌊ρ⌋ + ⌈ρ⌉` when the endpoint has no eigenvalue 1, otherwise the lower
/// bound `2⌈ρ⌉ − 1` flagged as degenerate.
pub fn cz_index<T: Scalar>(path: &LiftedSymplecticPath<T>) -> CzResult {
  cz_from_rho(path.rho(), &path.endpoint())
}

/// Index from a rotation number and the endpoint matrix.
pub fn cz_from_rho<T: Scalar>(rho: T, end: &SymplecticMatrix<T>) -> CzResult {
  if end.fixed_point_defect() <= T::tol(DEGENERACY_TOL) {
    // An eigenvalue 1 forces σ = 0, so ρ is an integer up to rounding.
    let r = rho.round().to_i64().unwrap_or(0);
    CzResult { value: 2 * r - 1, degenerate: true }
  } else {
    let f = rho.floor().to_i64().unwrap_or(0);
    let c = rho.ceil().to_i64().unwrap_or(0);
    CzResult { value: f + c, degenerate: false }
  }
}

#[cfg(test)]
mod tests {
  use super::*;

  fn rot_path(l: f64, n: usize) -> LiftedSymplecticPath<f64> {
    LiftedSymplecticPath::from_generator(|t| SymplecticMatrix::rotation(l * t), 0.0, 1.0, n, &[]).unwrap()
  }

  #[test]
  fn sigma_branches() {
    assert_eq!(sigma(&SymplecticMatrix::<f64>::identity()), 0.0);
    let minus = SymplecticMatrix::new([[-1.0, 0.0], [0.0, -1.0]]).unwrap();
    assert_eq!(sigma(&minus), 0.5);
    let r = SymplecticMatrix::<f64>::rotation(1.0 / 6.0);
    assert!((sigma(&r) - 1.0 / 6.0).abs() < 1e-12);
    let r = SymplecticMatrix::<f64>::rotation(-1.0 / 6.0);
    assert!((sigma(&r) - 5.0 / 6.0).abs() < 1e-12);
    let hyp = SymplecticMatrix::new([[2.0, 0.0], [0.0, 0.5]]).unwrap();
    assert_eq!(sigma(&hyp), 0.0);
    let hyp = SymplecticMatrix::new([[-2.0, 0.0], [0.0, -0.5]]).unwrap();
    assert_eq!(sigma(&hyp), 0.5);
  }

  #[test]
  fn rejects_non_symplectic() {
    assert!(SymplecticMatrix::new([[2.0, 0.0], [0.0, 2.0]]).is_err());
  }

  #[test]
  fn rotation_paths() {
    assert!((rot_path(3.0, 64).rho() - 3.0).abs() < 1e-12);
    let p = rot_path(2.0, 64);
    assert!((p.rotation_rel_s([0.6, 0.8]).unwrap() - 2.0).abs() < 1e-12);
  }

  #[test]
  fn constant_and_shear_paths() {
    let id = LiftedSymplecticPath::from_generator(|_| SymplecticMatrix::<f64>::identity(), 0.0, 1.0, 4, &[])
      .unwrap();
    assert_eq!(id.rho(), 0.0);
    let shear = LiftedSymplecticPath::from_generator(
      |t: f64| SymplecticMatrix::new_unchecked([[1.0, t], [0.0, 1.0]]),
      0.0,
      1.0,
      16,
      &[],
    )
    .unwrap();
    assert_eq!(shear.rho(), 0.0);
    assert_eq!(shear.rotation_rel_s([1.0, 0.0]).unwrap(), 0.0);
  }

  #[test]
  fn coarse_raw_samples_error() {
    let raw = vec![(0.0, SymplecticMatrix::identity()), (1.0, SymplecticMatrix::rotation(0.3))];
    assert!(matches!(lift_path(raw), Err(Error::SamplingTooCoarse { .. })));
    let raw = vec![(0.0, SymplecticMatrix::rotation(0.1))];
    assert!(matches!(lift_path(raw), Err(Error::PathNotAtIdentity)));
  }

  #[test]
  fn generator_refines_coarse_steps() {
    let p = LiftedSymplecticPath::<f64>::from_generator(|t| SymplecticMatrix::rotation(5.0 * t), 0.0, 1.0, 8, &[]).unwrap();
    assert!((p.rho() - 5.0).abs() < 1e-12, "{}", p.rho());
    assert!(p.samples.len() > 20);
  }

  #[test]
  fn cz_examples() {
    assert_eq!(cz_index(&rot_path(1.5, 64)), CzResult { value: 3, degenerate: false });
    assert_eq!(cz_index(&rot_path(0.25, 64)), CzResult { value: 1, degenerate: false });
    assert_eq!(cz_index(&rot_path(1.0, 64)), CzResult { value: 1, degenerate: true });
  }

  #[test]
  fn power_and_product() {
    let p = rot_path(0.3, 16);
    assert!((p.power(4).unwrap().rho() - 1.2).abs() < 1e-12);
    let q = rot_path(0.45, 16);
    assert!((p.then(&q).unwrap().rho() - 0.75).abs() < 1e-12);
  }

  #[test]
  fn exp_sl2_matches_rotation() {
    let a = [[0.0, -1.0], [1.0, 0.0]];
    let e = SymplecticMatrix::<f64>::exp_sl2(a);
    let r = SymplecticMatrix::<f64>::rotation(1.0 / std::f64::consts::TAU);
    for i in 0..2 {
      for j in 0..2 {
        assert!((e.m[i][j] - r.m[i][j]).abs() < 1e-14);
      }
    }
    let h = SymplecticMatrix::<f64>::exp_sl2([[0.5, 0.0], [0.0, -0.5]]);
    assert!((h.m[0][0] - 0.5f64.exp()).abs() < 1e-14);
  }

  #[test]
  fn works_in_single_precision() {
    let r = SymplecticMatrix::<f32>::rotation(0.25);
    assert!((sigma(&r) - 0.25).abs() < 1e-5);
  }
}
