use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::diskmap::RadialProfile;
use crate::error::{Error, Result};

/// Samples used to certify a profile after construction.
pub const PROFILE_CHECK_SAMPLES: usize = 1024;

/// Quintic smoothstep `10y³ − 15y⁴ + 6y⁵`.
fn smoothstep(y: f64) -> f64 {
  y * y * y * (10.0 + y * (-15.0 + 6.0 * y))
}

fn smoothstep_d(y: f64) -> f64 {
  30.0 * y * y * (1.0 + y * (-2.0 + y))
}

/// `∫₀ˣ S(ξ^q) dξ`.
fn smoothstep_power_integral(x: f64, q: f64) -> f64 {
  let t = |k: f64| x.powf(k * q + 1.0) / (k * q + 1.0);
  10.0 * t(3.0) - 15.0 * t(4.0) + 6.0 * t(5.0)
}

/// The twist profile `g_s` of a disk of radius `s`.
///
/// On `[0, s−δ]` it is `πR(s² − r²)`. On the band `[s−δ, s−δ+2w]` its
/// derivative is `g′(s−δ)·v(x)` with `x` the band coordinate and
/// `v = 1 − S(x^q)`; the exponent `q ≥ 1` is tuned so that `g` reaches zero
/// exactly at the end of the band. Hence `|g′|` never exceeds its value at
/// `s−δ`, `g′` keeps its sign and `g` is `C¹`. It is not `C²` at `s−δ`:
/// `|g′|` is increasing just inside and may not increase past the cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistProfile {
  pub s: f64,
  pub delta: f64,
  pub twist: f64,
  /// Half-width `w ≤ δ` of the blend band.
  pub width: f64,
  pub exponent: f64,
}

impl TwistProfile {
  fn band_start(&self) -> f64 {
    self.s - self.delta
  }

  fn band_len(&self) -> f64 {
    2.0 * self.width
  }

  /// End of the support.
  pub fn support_end(&self) -> f64 {
    self.band_start() + self.band_len()
  }

  /// The cap `2π|R|(s−δ)` on `|g′|`.
  pub fn derivative_cap(&self) -> f64 {
    2.0 * PI * self.twist.abs() * self.band_start()
  }

  fn x(&self, r: f64) -> f64 {
    ((r - self.band_start()) / self.band_len()).clamp(0.0, 1.0)
  }

  pub fn g(&self, r: f64) -> f64 {
    let a = self.band_start();
    if r <= a {
      PI * self.twist * (self.s * self.s - r * r)
    } else if r < self.support_end() {
      let x = self.x(r);
      let v_int = x - smoothstep_power_integral(x, self.exponent);
      let ga = PI * self.twist * (self.s * self.s - a * a);
      ga - 2.0 * PI * self.twist * a * self.band_len() * v_int
    } else {
      0.0
    }
  }

  pub fn dg(&self, r: f64) -> f64 {
    let a = self.band_start();
    if r <= a {
      -2.0 * PI * self.twist * r
    } else if r < self.support_end() {
      let x = self.x(r);
      -2.0 * PI * self.twist * a * (1.0 - smoothstep(x.powf(self.exponent)))
    } else {
      0.0
    }
  }

  pub fn d2g(&self, r: f64) -> f64 {
    let a = self.band_start();
    if r <= a {
      -2.0 * PI * self.twist
    } else if r < self.support_end() {
      let x = self.x(r);
      let q = self.exponent;
      let dv = if x > 0.0 { -smoothstep_d(x.powf(q)) * q * x.powf(q - 1.0) } else { 0.0 };
      -2.0 * PI * self.twist * a * dv / self.band_len()
    } else {
      0.0
    }
  }

  /// Angular speed `−g′(r)/r` of the flow of `g∘r_p` about `p`.
  pub fn angular_speed(&self, r: f64) -> f64 {
    if r <= self.band_start() {
      2.0 * PI * self.twist
    } else {
      -self.dg(r) / r
    }
  }

  /// `d/dr` of [`TwistProfile::angular_speed`].
  pub fn angular_speed_derivative(&self, r: f64) -> f64 {
    if r <= self.band_start() || r >= self.support_end() {
      0.0
    } else {
      -self.d2g(r) / r + self.dg(r) / (r * r)
    }
  }

  /// `(r, g(r), g′(r))` at `count` evenly spaced radii on `[0, s+δ]`.
  pub fn samples(&self, count: usize) -> Vec<(f64, f64, f64)> {
    let count = count.max(2);
    let end = self.s + self.delta;
    (0..count)
      .map(|i| {
        let r = end * i as f64 / (count - 1) as f64;
        (r, self.g(r), self.dg(r))
      })
      .collect()
  }

  fn certify(&self) -> Result<()> {
    let cap = self.derivative_cap() * (1.0 + 1e-12) + 1e-15;
    let sign = -self.twist.signum();
    let a = self.band_start();
    for (r, g, dg) in self.samples(PROFILE_CHECK_SAMPLES) {
      if r <= a {
        let exact = PI * self.twist * (self.s * self.s - r * r);
        if (g - exact).abs() > 1e-12 {
          return Err(Error::InfeasibleProfile(format!("g deviates from πR(s²−r²) at r = {r}")));
        }
      } else if dg.abs() > cap {
        return Err(Error::InfeasibleProfile(format!("|g′({r})| = {} exceeds the cap {cap}", dg.abs())));
      }
      if dg * sign < -1e-15 {
        return Err(Error::InfeasibleProfile(format!("g′ changes sign at r = {r}")));
      }
    }
    let tail = self.g(self.support_end() * (1.0 - 1e-15));
    if tail.abs() > 1e-12 * (1.0 + self.twist.abs()) {
      return Err(Error::InfeasibleProfile(format!("g does not vanish at the end of its support ({tail})")));
    }
    Ok(())
  }
}

impl RadialProfile<f64> for TwistProfile {
  fn h(&self, r: f64) -> f64 {
    self.g(r)
  }
  fn dh(&self, r: f64) -> f64 {
    self.dg(r)
  }
  fn d2h(&self, r: f64) -> f64 {
    self.d2g(r)
  }
}

/// Default blend half-width as a fraction of `δ`; below one so that the
/// support stays inside `[0, s+δ)`.
pub const DEFAULT_WIDTH_FRACTION: f64 = 0.9;

/// Twist profile with the default blend width `0.9·δ`.
pub fn build_twist_profile(s: f64, delta: f64, twist: f64) -> Result<TwistProfile> {
  build_twist_profile_with_width(s, delta, twist, DEFAULT_WIDTH_FRACTION * delta)
}

/// Twist profile whose blend band is `[s−δ, s−δ+2w]`.
pub fn build_twist_profile_with_width(s: f64, delta: f64, twist: f64, width: f64) -> Result<TwistProfile> {
  if !(s.is_finite() && delta.is_finite() && twist.is_finite() && width.is_finite()) {
    return Err(Error::InvalidInput("twist profile parameters must be finite".into()));
  }
  if !(delta > 0.0 && s > 4.0 * delta) {
    return Err(Error::InfeasibleProfile(format!("need s > 4δ, got s = {s}, δ = {delta}")));
  }
  if !(width > 0.0 && width <= delta) {
    return Err(Error::InfeasibleProfile(format!("blend width {width} must lie in (0, δ]")));
  }
  let a = s - delta;
  // Mean of v over the band needed to bring g(s−δ) down to zero at the cap.
  let mean = delta * (2.0 * s - delta) / (4.0 * width * a);
  if !(mean > 0.5 && mean < 1.0) {
    return Err(Error::InfeasibleProfile(format!(
      "blend width {width} cannot meet the derivative cap (required mean {mean})"
    )));
  }
  let mean_of = |q: f64| 1.0 - smoothstep_power_integral(1.0, q);
  let (mut lo, mut hi) = (1.0, 2.0);
  while mean_of(hi) < mean {
    lo = hi;
    hi *= 2.0;
  }
  for _ in 0..200 {
    let mid = 0.5 * (lo + hi);
    if mean_of(mid) < mean {
      lo = mid;
    } else {
      hi = mid;
    }
    if hi - lo <= 1e-15 * hi {
      break;
    }
  }
  let profile = TwistProfile { s, delta, twist, width, exponent: 0.5 * (lo + hi) };
  profile.certify()?;
  Ok(profile)
}

#[cfg(test)]
mod tests {
  use super::*;

  #[test]
  fn zero_twist_is_zero() {
    let p = build_twist_profile(0.2, 0.02, 0.0).unwrap();
    assert!(p.samples(100).iter().all(|&(_, g, dg)| g == 0.0 && dg == 0.0));
  }

  #[test]
  fn center_value_and_cap() {
    let p = build_twist_profile(0.2, 0.02, 1.0).unwrap();
    assert!((p.g(0.0) - PI * 0.04).abs() < 1e-15);
    assert!((p.g(0.0) - 0.125664).abs() < 1e-6);
    let cap = 2.0 * PI * 0.18;
    assert!((cap - 1.13097).abs() < 1e-5);
    let mut worst: f64 = 0.0;
    for i in 0..=10_000 {
      let r = 0.18 + 0.04 * i as f64 / 10_000.0;
      worst = worst.max(p.dg(r).abs());
    }
    assert!(worst <= cap * (1.0 + 1e-12), "{worst}");
    assert!(p.g(0.2 + 0.02) == 0.0);
  }

  #[test]
  fn profile_is_c1_and_integrates_its_derivative() {
    for twist in [-1.95, 3.0] {
      let p = build_twist_profile(0.1, 0.01, twist).unwrap();
      let n = 20_000;
      let (a, b) = (0.085, 0.115);
      let h = (b - a) / n as f64;
      let mut acc = 0.0;
      for i in 0..n {
        let r = a + (i as f64 + 0.5) * h;
        acc += p.dg(r) * h;
      }
      assert!((p.g(b) - p.g(a) - acc).abs() < 1e-9);
      let e = 1e-9;
      for r in [0.09, 0.095, 0.1, 0.105] {
        let fd = (p.g(r + e) - p.g(r - e)) / (2.0 * e);
        assert!((fd - p.dg(r)).abs() < 1e-5 * (1.0 + p.dg(r).abs()));
      }
    }
  }

  #[test]
  fn infeasible_parameters() {
    assert!(matches!(build_twist_profile(0.07, 0.02, 1.0), Err(Error::InfeasibleProfile(_))));
    assert!(matches!(build_twist_profile_with_width(0.2, 0.02, 1.0, 0.005), Err(Error::InfeasibleProfile(_))));
  }
}
