use std::f64::consts::PI;

use nalgebra::{Matrix4, SMatrix, SVector, SymmetricEigen, Vector4};
use serde::{Deserialize, Serialize};

use super::body::{AffineImage, ConvexBody, Mat4, Vec4};
use super::curvature::{sphere_directions, support};
use crate::error::{Error, Result};

/// `ω(u, v) = uᵀ Ω v` with `Ω` block-diagonal `[[0, 1], [−1, 0]]`.
pub fn omega_matrix() -> Matrix4<f64> {
  let mut m = Matrix4::zeros();
  m[(0, 1)] = 1.0;
  m[(1, 0)] = -1.0;
  m[(2, 3)] = 1.0;
  m[(3, 2)] = -1.0;
  m
}

/// `max |PᵀΩP − Ω|`.
pub fn symplectic_defect(p: &Matrix4<f64>) -> f64 {
  let w = omega_matrix();
  (p.transpose() * w * p - w).abs().max()
}

pub(crate) fn to_array(m: &Matrix4<f64>) -> Mat4<f64> {
  std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

pub(crate) fn from_array(m: &Mat4<f64>) -> Matrix4<f64> {
  Matrix4::from_fn(|i, j| m[i][j])
}

/// Symplectic normal form of a positive definite quadratic form `Q`:
/// `{xᵀQx ≤ 1} = P·E(a, b)` with `P` symplectic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Williamson {
  pub a: f64,
  pub b: f64,
  pub map: Mat4<f64>,
}

pub fn williamson(q: &Matrix4<f64>) -> Result<Williamson> {
  let eig = SymmetricEigen::new(0.5 * (q + q.transpose()));
  if eig.eigenvalues.min() <= 0.0 {
    return Err(Error::InvalidInput("quadratic form is not positive definite".into()));
  }
  let inv_sqrt = eig.eigenvectors * Matrix4::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt())) * eig.eigenvectors.transpose();
  let m = inv_sqrt * omega_matrix() * inv_sqrt;
  let sq = SymmetricEigen::new(-(m * m));
  let mut order: Vec<usize> = (0..4).collect();
  order.sort_by(|&i, &j| sq.eigenvalues[i].total_cmp(&sq.eigenvalues[j]));
  let col = |k: usize| -> Vector4<f64> { sq.eigenvectors.column(order[k]).into_owned() };

  let mut basis: Vec<Vector4<f64>> = Vec::with_capacity(4);
  let mut lambdas = [0.0; 2];
  for (slot, lam) in lambdas.iter_mut().enumerate() {
    // Pick the eigenvector with the largest part orthogonal to the pairs chosen so far.
    let candidates = if slot == 0 { vec![col(0)] } else { vec![col(1), col(2), col(3)] };
    let mut best: Option<Vector4<f64>> = None;
    for mut v in candidates {
      for e in &basis {
        v -= e * e.dot(&v);
      }
      if best.as_ref().map_or(true, |b| v.norm() > b.norm()) {
        best = Some(v);
      }
    }
    let v = best.unwrap().normalize();
    let l = (m * v).norm();
    let u = -(m * v) / l;
    basis.push(v);
    basis.push(u);
    *lam = l;
  }
  let o = Matrix4::from_columns(&basis);
  let scale = Matrix4::from_diagonal(&Vector4::new(lambdas[0], lambdas[0], lambdas[1], lambdas[1]).map(|l| 1.0 / l.sqrt()));
  let p = inv_sqrt * o * scale;
  let defect = symplectic_defect(&p);
  if defect > 1e-8 * (1.0 + p.abs().max().powi(2)) {
    return Err(Error::StepUnstable(format!("normal form is not symplectic (defect {defect:e})")));
  }
  Ok(Williamson { a: PI * lambdas[0], b: PI * lambdas[1], map: to_array(&p) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JohnSettings {
  pub samples: usize,
  /// Final barrier weight.
  pub barrier_min: f64,
}

impl Default for JohnSettings {
  fn default() -> Self {
    Self { samples: 4096, barrier_min: 2e-10 }
  }
}

/// Inscribed ellipsoid `{c + Bw : |w| ≤ 1}` with its symplectic normal form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JohnEllipsoid {
  pub center: Vec4<f64>,
  /// `B`, symmetric positive definite.
  pub shape: Mat4<f64>,
  /// `Q = B⁻²`.
  pub quadratic: Mat4<f64>,
  pub a: f64,
  pub b: f64,
  /// Symplectic `P` with `E = c + P·E(a, b)`.
  pub symplectic_map: Mat4<f64>,
  /// `P⁻¹`; `x ↦ P⁻¹(x − c)` carries `E` to `E(a, b)`.
  pub standardizer: Mat4<f64>,
  /// Factor applied after the polytope solve so that `E ⊂ K` on the samples.
  pub shrink: f64,
  /// Largest sampled ratio `‖B⁻¹(y − c)‖` over boundary points `y`; at most 4.
  pub outer_ratio: f64,
  pub newton_steps: usize,
}

impl JohnEllipsoid {
  pub fn volume(&self) -> f64 {
    0.5 * self.a * self.b
  }

  /// The body in standardized coordinates, `w ↦ F(c + P w)`.
  pub fn standardize<B>(&self, body: B) -> AffineImage<B, f64> {
    AffineImage { body, center: self.center, map: self.symplectic_map }
  }
}

/// Index pairs of the symmetric-matrix parameters.
const PAIRS: [(usize, usize); 10] = [(0, 0), (1, 1), (2, 2), (3, 3), (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn sym_from(p: &SVector<f64, 14>) -> Matrix4<f64> {
  let mut b = Matrix4::zeros();
  for (k, &(i, j)) in PAIRS.iter().enumerate() {
    b[(i, j)] = p[k];
    b[(j, i)] = p[k];
  }
  b
}

struct Polytope {
  normals: Vec<Vector4<f64>>,
  heights: Vec<f64>,
}

impl Polytope {
  /// Barrier objective `−log det B − μ Σ log sᵢ`, or `None` outside the domain.
  fn objective(&self, x: &SVector<f64, 14>, mu: f64) -> Option<f64> {
    let b = sym_from(x);
    let chol = b.cholesky()?;
    let logdet = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let c = Vector4::new(x[10], x[11], x[12], x[13]);
    let mut bar = 0.0;
    for (n, h) in self.normals.iter().zip(&self.heights) {
      let s = h - n.dot(&c) - (b * n).norm();
      if !(s > 0.0) {
        return None;
      }
      bar += s.ln();
    }
    Some(-logdet - mu * bar)
  }

  fn derivatives(&self, x: &SVector<f64, 14>, mu: f64) -> (SVector<f64, 14>, SMatrix<f64, 14, 14>) {
    let b = sym_from(x);
    let binv = b.try_inverse().expect("positive definite");
    let c = Vector4::new(x[10], x[11], x[12], x[13]);
    let mut g = SVector::<f64, 14>::zeros();
    let mut h = SMatrix::<f64, 14, 14>::zeros();
    let basis: Vec<Matrix4<f64>> = PAIRS
      .iter()
      .map(|&(i, j)| {
        let mut e = Matrix4::zeros();
        e[(i, j)] = 1.0;
        e[(j, i)] = 1.0;
        e
      })
      .collect();
    let be: Vec<Matrix4<f64>> = basis.iter().map(|e| binv * e).collect();
    for k in 0..10 {
      g[k] = -be[k].trace();
      for l in k..10 {
        let v = (be[k] * be[l]).trace();
        h[(k, l)] = v;
        h[(l, k)] = v;
      }
    }
    for (n, &hh) in self.normals.iter().zip(&self.heights) {
      let v = b * n;
      let rho = v.norm();
      let s = hh - n.dot(&c) - rho;
      let w: Vec<Vector4<f64>> = basis.iter().map(|e| e * n).collect();
      let q: Vec<f64> = w.iter().map(|wk| v.dot(wk) / rho).collect();
      let mut a = SVector::<f64, 14>::zeros();
      for k in 0..10 {
        a[k] = -q[k];
      }
      for i in 0..4 {
        a[10 + i] = -n[i];
      }
      g -= a * (mu / s);
      h += a * a.transpose() * (mu / (s * s));
      for k in 0..10 {
        for l in k..10 {
          let d2 = (w[k].dot(&w[l]) - q[k] * q[l]) / rho;
          let add = mu * d2 / s;
          h[(k, l)] += add;
          if l != k {
            h[(l, k)] += add;
          }
        }
      }
    }
    (g, h)
  }
}

/// Distance `t` with `F(c + t d) = 1`, for `c` interior.
fn ray_from<B: ConvexBody<f64> + ?Sized>(body: &B, c: Vector4<f64>, d: Vector4<f64>) -> f64 {
  let at = |t: f64| -> f64 {
    let p = c + d * t;
    body.value([p[0], p[1], p[2], p[3]]) - 1.0
  };
  let (mut lo, mut hi) = (0.0, 1.0);
  while at(hi) < 0.0 && hi < 1e12 {
    lo = hi;
    hi *= 2.0;
  }
  for _ in 0..200 {
    let mid = 0.5 * (lo + hi);
    if at(mid) < 0.0 {
      lo = mid;
    } else {
      hi = mid;
    }
    if hi - lo <= 1e-15 * hi {
      break;
    }
  }
  0.5 * (lo + hi)
}

/// Maximal-volume ellipsoid of the tangent polytope at sampled support points,
/// shrunk into the body and checked against `K ⊂ c + 4(E − c)`.
pub fn john_ellipsoid<B: ConvexBody<f64> + ?Sized>(body: &B, settings: &JohnSettings) -> Result<JohnEllipsoid> {
  let dirs = sphere_directions(settings.samples);
  let mut normals = Vec::with_capacity(dirs.len());
  let mut heights = Vec::with_capacity(dirs.len());
  for u in &dirs {
    let (_, h) = support(body, *u)?;
    normals.push(Vector4::from(*u));
    heights.push(h);
  }
  let min_h = heights.iter().copied().fold(f64::INFINITY, f64::min);
  if !(min_h > 0.0) {
    return Err(Error::InvalidInput("origin must lie in the interior of the body".into()));
  }
  let poly = Polytope { normals, heights };
  let mut x = SVector::<f64, 14>::zeros();
  for k in 0..4 {
    x[k] = 0.5 * min_h;
  }
  let mut mu = 1.0;
  let mut steps = 0;
  loop {
    for _ in 0..100 {
      let (g, h) = poly.derivatives(&x, mu);
      let Some(chol) = h.cholesky() else {
        return Err(Error::StepUnstable("barrier Hessian is not positive definite".into()));
      };
      let d = chol.solve(&(-g));
      let decrement = -g.dot(&d);
      steps += 1;
      if decrement < 1e-12 {
        break;
      }
      let f0 = poly.objective(&x, mu).expect("iterate stays feasible");
      let mut t = 1.0;
      let mut accepted = false;
      for _ in 0..60 {
        let trial = x + d * t;
        if let Some(f) = poly.objective(&trial, mu) {
          if f <= f0 - 0.25 * t * decrement {
            x = trial;
            accepted = true;
            break;
          }
        }
        t *= 0.5;
      }
      if !accepted {
        break;
      }
    }
    if mu <= settings.barrier_min {
      break;
    }
    mu = (mu * 0.1).max(settings.barrier_min);
  }

  let mut shape = sym_from(&x);
  let c = Vector4::new(x[10], x[11], x[12], x[13]);
  let mut ratios = Vec::with_capacity(dirs.len());
  for u in &dirs {
    let d = shape * Vector4::from(*u);
    ratios.push(ray_from(body, c, d));
  }
  let shrink = ratios.iter().copied().fold(1.0, f64::min);
  shape *= shrink;
  let outer_ratio = ratios.iter().copied().fold(0.0, f64::max) / shrink;
  if outer_ratio > 4.0 * (1.0 + 1e-9) {
    return Err(Error::NotConvex(format!("sampled boundary reaches {outer_ratio:.4} times the inscribed ellipsoid")));
  }
  let binv = shape.try_inverse().ok_or_else(|| Error::StepUnstable("inscribed ellipsoid is degenerate".into()))?;
  let q = binv * binv;
  let w = williamson(&q)?;
  let p = from_array(&w.map);
  let pinv = p.try_inverse().ok_or_else(|| Error::StepUnstable("normal form map is singular".into()))?;
  Ok(JohnEllipsoid {
    center: [c[0], c[1], c[2], c[3]],
    shape: to_array(&shape),
    quadratic: to_array(&q),
    a: w.a,
    b: w.b,
    symplectic_map: w.map,
    standardizer: to_array(&pinv),
    shrink,
    outer_ratio,
    newton_steps: steps,
  })
}
