use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Scalar;

/// Static facts about a Hamiltonian that integrators and drivers may use.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMeta<T> {
  pub autonomous: bool,
  /// Depends on `|z|` only (and not on time).
  pub radial: bool,
  /// The `B` of `H = B·π(1 − r²)` near the boundary, in the time average.
  pub boundary_coefficient: Option<T>,
  /// Order `m` of a rotational symmetry `H(t, e^{2πi/m} z) = H(t, z)`.
  pub symmetry_order: usize,
  /// Times in `(0, 1)` where `H` may jump in `t`; steps never straddle them.
  pub breakpoints: Vec<T>,
}

impl<T> Default for HamiltonianMeta<T> {
  fn default() -> Self {
    Self {
      autonomous: false,
      radial: false,
      boundary_coefficient: None,
      symmetry_order: 1,
      breakpoints: Vec::new(),
    }
  }
}

/// A one-periodic Hamiltonian `H(t, z)` on the closed unit disk, zero on the
/// boundary. The flow convention is `ι_{X_H} ω = dH` with `ω = dx∧dy`,
/// so `X_H = (∂H/∂y, −∂H/∂x)`.
pub trait DiskHamiltonian<T: Scalar>: Send + Sync {
  fn value(&self, t: T, z: [T; 2]) -> T;
  fn gradient(&self, t: T, z: [T; 2]) -> [T; 2];

  /// Hessian; the default differentiates the gradient numerically.
  fn hessian(&self, t: T, z: [T; 2]) -> [[T; 2]; 2] {
    let h = T::lit(1e-5);
    let gx = (self.gradient(t, [z[0] + h, z[1]]), self.gradient(t, [z[0] - h, z[1]]));
    let gy = (self.gradient(t, [z[0], z[1] + h]), self.gradient(t, [z[0], z[1] - h]));
    let two_h = h + h;
    let hxx = (gx.0[0] - gx.1[0]) / two_h;
    let hyy = (gy.0[1] - gy.1[1]) / two_h;
    let hxy = ((gx.0[1] - gx.1[1]) + (gy.0[0] - gy.1[0])) / (two_h + two_h);
    [[hxx, hxy], [hxy, hyy]]
  }

  fn meta(&self) -> HamiltonianMeta<T>;

  /// Local frequency scale used to shorten integration steps.
  fn stiffness(&self, t: T, z: [T; 2]) -> T {
    let h = self.hessian(t, z);
    (h[0][0] * h[0][0] + h[1][1] * h[1][1] + (h[0][1] * h[0][1] + h[1][0] * h[1][0])).sqrt()
  }
}

macro_rules! forward_hamiltonian {
  ($ty:ty) => {
    impl<T: Scalar, H: DiskHamiltonian<T> + ?Sized> DiskHamiltonian<T> for $ty {
      fn value(&self, t: T, z: [T; 2]) -> T {
        (**self).value(t, z)
      }
      fn gradient(&self, t: T, z: [T; 2]) -> [T; 2] {
        (**self).gradient(t, z)
      }
      fn hessian(&self, t: T, z: [T; 2]) -> [[T; 2]; 2] {
        (**self).hessian(t, z)
      }
      fn meta(&self) -> HamiltonianMeta<T> {
        (**self).meta()
      }
      fn stiffness(&self, t: T, z: [T; 2]) -> T {
        (**self).stiffness(t, z)
      }
    }
  };
}

forward_hamiltonian!(&H);
forward_hamiltonian!(Box<H>);
forward_hamiltonian!(Arc<H>);

/// The zero Hamiltonian; its flow is the identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroHamiltonian;

impl<T: Scalar> DiskHamiltonian<T> for ZeroHamiltonian {
  fn value(&self, _: T, _: [T; 2]) -> T {
    T::zero()
  }
  fn gradient(&self, _: T, _: [T; 2]) -> [T; 2] {
    [T::zero(); 2]
  }
  fn hessian(&self, _: T, _: [T; 2]) -> [[T; 2]; 2] {
    [[T::zero(); 2]; 2]
  }
  fn meta(&self) -> HamiltonianMeta<T> {
    HamiltonianMeta { autonomous: true, radial: true, ..Default::default() }
  }
}

/// Radial profile `h(r) = P(r²)` for a polynomial `P` with `P(1) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPolynomial<T> {
  /// Coefficients of `P` in increasing degree.
  pub coeffs: Vec<T>,
}

impl<T: Scalar> RadialPolynomial<T> {
  pub fn new(coeffs: Vec<T>) -> Self {
    Self { coeffs }
  }

  /// `c·(1 − r²)`.
  pub fn rotation(c: T) -> Self {
    Self { coeffs: vec![c, -c] }
  }

  fn eval(&self, u: T, deriv: usize) -> T {
    let mut acc = T::zero();
    for (k, &c) in self.coeffs.iter().enumerate().rev() {
      if k < deriv {
        break;
      }
      let mut f = T::one();
      for j in 0..deriv {
        f = f * T::from_usize(k - j).unwrap();
      }
      acc = acc * u + c * f;
    }
    acc
  }

  /// `P`, `P′`, `P″` at `u = r²`.
  pub fn p(&self, u: T) -> (T, T, T) {
    (self.eval(u, 0), self.eval(u, 1), self.eval(u, 2))
  }

  /// `h(r)`.
  pub fn h(&self, r: T) -> T {
    self.eval(r * r, 0)
  }

  /// `h′(r) = 2r·P′(r²)`.
  pub fn dh(&self, r: T) -> T {
    T::lit(2.0) * r * self.eval(r * r, 1)
  }

  /// `h″(r) = 2P′(r²) + 4r²P″(r²)`.
  pub fn d2h(&self, r: T) -> T {
    let u = r * r;
    T::lit(2.0) * self.eval(u, 1) + T::lit(4.0) * u * self.eval(u, 2)
  }

  /// `−h′(r)/r = −2P′(r²)`, finite at the origin.
  pub fn angular_speed(&self, r: T) -> T {
    -T::lit(2.0) * self.eval(r * r, 1)
  }
}

/// Autonomous radial Hamiltonian `H(z) = h(|z|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialHamiltonian<T> {
  pub profile: RadialPolynomial<T>,
}

impl<T: Scalar> RadialHamiltonian<T> {
  pub fn new(profile: RadialPolynomial<T>) -> Self {
    Self { profile }
  }

  /// `π(1 + 1/n)(1 − r²)`: time-one map is rotation by `2π/n` after a full turn.
  pub fn rotation(n: usize) -> Self {
    Self::with_boundary_coefficient(T::one() + T::one() / T::from_usize(n).unwrap())
  }

  /// `B·π(1 − r²)`.
  pub fn with_boundary_coefficient(b: T) -> Self {
    Self { profile: RadialPolynomial::rotation(b * T::PI()) }
  }
}

impl<T: Scalar> DiskHamiltonian<T> for RadialHamiltonian<T> {
  fn value(&self, _: T, z: [T; 2]) -> T {
    self.profile.eval(z[0] * z[0] + z[1] * z[1], 0)
  }
  fn gradient(&self, _: T, z: [T; 2]) -> [T; 2] {
    let d = T::lit(2.0) * self.profile.eval(z[0] * z[0] + z[1] * z[1], 1);
    [d * z[0], d * z[1]]
  }
  fn hessian(&self, _: T, z: [T; 2]) -> [[T; 2]; 2] {
    let u = z[0] * z[0] + z[1] * z[1];
    let (_, p1, p2) = self.profile.p(u);
    let a = T::lit(2.0) * p1;
    let b = T::lit(4.0) * p2;
    [[a + b * z[0] * z[0], b * z[0] * z[1]], [b * z[0] * z[1], a + b * z[1] * z[1]]]
  }
  fn meta(&self) -> HamiltonianMeta<T> {
    let c = &self.profile.coeffs;
    let b = if c.len() == 2 && (c[0] + c[1]).abs() <= T::tol(1e-15) {
      Some(c[0] / T::PI())
    } else {
      None
    };
    HamiltonianMeta { autonomous: true, radial: true, boundary_coefficient: b, ..Default::default() }
  }
}

/// `H(t, z) = (1 − |z|²)·Σ c_ij(t) xⁱ yʲ` with
/// `c_ij(t) = α_ij + β_ij cos 2πt + γ_ij sin 2πt`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialHamiltonian<T> {
  /// `(i, j, α, β, γ)` terms.
  pub terms: Vec<(u32, u32, T, T, T)>,
}

impl<T: Scalar> PolynomialHamiltonian<T> {
  /// Random smooth Hamiltonian of total degree ≤ `degree` with coefficients
  /// in `[-amplitude, amplitude]`; `time_dependent = false` zeroes β and γ.
  pub fn random(seed: u64, degree: u32, amplitude: f64, time_dependent: bool) -> Self {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for i in 0..=degree {
      for j in 0..=(degree - i) {
        let mut draw = || T::lit(rng.gen_range(-amplitude..=amplitude));
        let a = draw();
        let (b, c) = if time_dependent { (draw(), draw()) } else { (T::zero(), T::zero()) };
        terms.push((i, j, a, b, c));
      }
    }
    Self { terms }
  }

  /// `Q(t,z)` and its first and second partials `(Q, Qx, Qy, Qxx, Qxy, Qyy)`.
  fn poly(&self, t: T, z: [T; 2]) -> [T; 6] {
    let (s, c) = (T::two_pi() * t).sin_cos();
    let mut out = [T::zero(); 6];
    let pw = |x: T, k: i32| if k < 0 { T::zero() } else { x.powi(k) };
    for &(i, j, a, b, g) in &self.terms {
      let k = a + b * c + g * s;
      let (i, j) = (i as i32, j as i32);
      let fi = T::from_i32(i).unwrap();
      let fj = T::from_i32(j).unwrap();
      let (x, y) = (z[0], z[1]);
      out[0] = out[0] + k * pw(x, i) * pw(y, j);
      out[1] = out[1] + k * fi * pw(x, i - 1) * pw(y, j);
      out[2] = out[2] + k * fj * pw(x, i) * pw(y, j - 1);
      out[3] = out[3] + k * fi * (fi - T::one()) * pw(x, i - 2) * pw(y, j);
      out[4] = out[4] + k * fi * fj * pw(x, i - 1) * pw(y, j - 1);
      out[5] = out[5] + k * fj * (fj - T::one()) * pw(x, i) * pw(y, j - 2);
    }
    out
  }
}

impl<T: Scalar> DiskHamiltonian<T> for PolynomialHamiltonian<T> {
  fn value(&self, t: T, z: [T; 2]) -> T {
    let w = T::one() - z[0] * z[0] - z[1] * z[1];
    w * self.poly(t, z)[0]
  }
  fn gradient(&self, t: T, z: [T; 2]) -> [T; 2] {
    let q = self.poly(t, z);
    let w = T::one() - z[0] * z[0] - z[1] * z[1];
    let two = T::lit(2.0);
    [w * q[1] - two * z[0] * q[0], w * q[2] - two * z[1] * q[0]]
  }
  fn hessian(&self, t: T, z: [T; 2]) -> [[T; 2]; 2] {
    let q = self.poly(t, z);
    let w = T::one() - z[0] * z[0] - z[1] * z[1];
    let two = T::lit(2.0);
    let (x, y) = (z[0], z[1]);
    let hxx = w * q[3] - T::lit(4.0) * x * q[1] - two * q[0];
    let hyy = w * q[5] - T::lit(4.0) * y * q[2] - two * q[0];
    let hxy = w * q[4] - two * x * q[2] - two * y * q[1];
    [[hxx, hxy], [hxy, hyy]]
  }
  fn meta(&self) -> HamiltonianMeta<T> {
    let autonomous = self.terms.iter().all(|&(_, _, _, b, g)| b == T::zero() && g == T::zero());
    HamiltonianMeta { autonomous, ..Default::default() }
  }
}

/// `H` conjugated by the rotation `R_α`: `H′(t, z) = H(t, R_α⁻¹ z)`.
#[derive(Debug, Clone)]
pub struct RotatedHamiltonian<H, T> {
  pub inner: H,
  /// Rotation angle in turns.
  pub turns: T,
}

impl<T: Scalar, H: DiskHamiltonian<T>> RotatedHamiltonian<H, T> {
  fn rot(&self, v: [T; 2], sign: T) -> [T; 2] {
    let (s, c) = (T::two_pi() * self.turns * sign).sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
  }
}

impl<T: Scalar, H: DiskHamiltonian<T>> DiskHamiltonian<T> for RotatedHamiltonian<H, T> {
  fn value(&self, t: T, z: [T; 2]) -> T {
    self.inner.value(t, self.rot(z, -T::one()))
  }
  fn gradient(&self, t: T, z: [T; 2]) -> [T; 2] {
    self.rot(self.inner.gradient(t, self.rot(z, -T::one())), T::one())
  }
  fn hessian(&self, t: T, z: [T; 2]) -> [[T; 2]; 2] {
    let h = self.inner.hessian(t, self.rot(z, -T::one()));
    let c0 = self.rot([h[0][0], h[1][0]], T::one());
    let c1 = self.rot([h[0][1], h[1][1]], T::one());
    // R·H·Rᵀ: rotate columns, then rows.
    let r0 = self.rot([c0[0], c1[0]], T::one());
    let r1 = self.rot([c0[1], c1[1]], T::one());
    [[r0[0], r0[1]], [r1[0], r1[1]]]
  }
  fn meta(&self) -> HamiltonianMeta<T> {
    let mut m = self.inner.meta();
    m.symmetry_order = 1;
    m
  }
}
