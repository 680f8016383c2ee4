//! Star-shaped and convex hypersurfaces in `R⁴`: curvature, the quaternion
//! trivialization, Reeb dynamics, Ruelle invariant, John ellipsoids and the
//! sandwich and bound experiments.

mod body;
mod curvature;
mod ellipsoid;
mod experiment;
mod frame;
mod john;
mod orbits;
mod reeb;
mod surface;

pub use body::{
  boundary_point, project_to_boundary, radial_distance, random_convex_body, smoothed_cube, AffineImage, ConvexBody,
  Mat4, QuarticBody, RandomBodySettings, Vec4,
};
pub use curvature::{curvature_integrals, diameter, sphere_directions, support, CurvatureIntegrals, SUPPORT_DIRECTIONS};
pub use ellipsoid::{ellipsoid_mean_curvature, ellipsoid_quantities, EllipsoidQuantities, EllipsoidSpec};
pub use experiment::{
  analyze_body, band_min_acceleration, bound_experiment, sandwich_report, scan_bodies, AnalysisSettings,
  BodyAnalysis, BoundExperimentSpec, BoundRow, RowKind, SandwichEntry, SandwichReport, BRACKET_SLACK, C_MAX,
  ELLIPSOID_RATIOS,
};
pub use frame::{
  geometry_at, quat_i, quat_j, quat_k, rotation_density, CurvatureData, Geometry, QuaternionFrame,
};
pub use john::{john_ellipsoid, omega_matrix, symplectic_defect, williamson, JohnEllipsoid, JohnSettings, Williamson};
pub use orbits::{closed_orbit_search, ClosedOrbit, OrbitSearch, OrbitSearchSettings};
pub use reeb::{
  iv_flow_averages, reeb_flow, ruelle_invariant, step_count, IvAverages, ReebSettings, ReebTrajectory,
  RuelleEstimate, LEVEL_TOLERANCE,
};
pub use surface::{
  certify, sphere_point, BodyCertificate, QuadratureSize, SurfaceNode, SurfaceQuadrature, CONVEXITY_TOLERANCE,
};
