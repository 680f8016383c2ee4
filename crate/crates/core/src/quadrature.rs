//! Gauss–Legendre rules.

use crate::scalar::Scalar;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre<T: Scalar>(n: usize, a: T, b: T) -> Vec<(T, T)> {
  let n = n.max(1);
  let nf = n as f64;
  let mut out = Vec::with_capacity(n);
  let half = 0.5 * (b.as_f64() - a.as_f64());
  let mid = 0.5 * (b.as_f64() + a.as_f64());
  for i in 0..n {
    let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
    let mut dp = 1.0;
    for _ in 0..100 {
      let (mut p0, mut p1) = (1.0, x);
      for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
      }
      dp = nf * (x * p1 - p0) / (x * x - 1.0);
      let dx = p1 / dp;
      x -= dx;
      if dx.abs() < 1e-16 {
        break;
      }
    }
    let w = 2.0 / ((1.0 - x * x) * dp * dp);
    out.push((T::lit(mid - half * x), T::lit(half * w)));
  }
  out.reverse();
  out
}
