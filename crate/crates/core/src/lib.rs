pub mod diskmap;
pub mod error;
pub mod hypersurface;
pub mod openbook;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod sp2;

/// Version of this crate, recorded in result provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Double-precision instances of the generic types.
pub mod f64 {
  pub type SymplecticMatrix = crate::sp2::SymplecticMatrix<f64>;
  pub type LiftedSymplecticPath = crate::sp2::LiftedSymplecticPath<f64>;
  pub type RadialPolynomial = crate::diskmap::RadialPolynomial<f64>;
  pub type RadialHamiltonian = crate::diskmap::RadialHamiltonian<f64>;
  pub type PolynomialHamiltonian = crate::diskmap::PolynomialHamiltonian<f64>;
  pub type DiskQuadrature = crate::diskmap::DiskQuadrature<f64>;
  pub type PeriodicPoint = crate::diskmap::PeriodicPoint<f64>;
  pub type PeriodicSearch = crate::diskmap::PeriodicSearch<f64>;
  pub type Trajectory = crate::diskmap::Trajectory<f64>;
  pub type QuarticBody = crate::hypersurface::QuarticBody<f64>;
  pub type SurfaceQuadrature = crate::hypersurface::SurfaceQuadrature<f64>;
  pub type Geometry = crate::hypersurface::Geometry<f64>;
  pub type ReebTrajectory = crate::hypersurface::ReebTrajectory<f64>;
}
