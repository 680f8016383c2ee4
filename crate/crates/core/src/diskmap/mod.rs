//! Hamiltonian flows on the unit disk, their action and rotation invariants,
//! and periodic points of the time-one map.

pub mod flow;
pub mod hamiltonian;
pub mod invariants;
pub mod map;
pub mod periodic;
pub mod radial;

pub use flow::{integrate_flow, DiskFlow, FlowSettings, FlowState, JacobianLift, Track, Trajectory};
pub use hamiltonian::{
  DiskHamiltonian, HamiltonianMeta, PolynomialHamiltonian, RadialHamiltonian, RadialPolynomial,
  RotatedHamiltonian, ZeroHamiltonian,
};
pub use invariants::{
  action_map, birkhoff_averages, calabi, calabi_with, disk_sweep, ruelle_diskmap, sweep_nodes, DiskQuadrature,
  DiskSweep, RuelleDiskEstimate,
};
pub use map::DiskMap;
pub use periodic::{
  find_periodic_points, find_periodic_points_with, PeriodicPoint, PeriodicSearch,
  PeriodicSearchSettings, SearchDiagnostics,
};
pub use radial::{
  off_center_action, off_center_flow, radial_action, radial_angular_speed, radial_rotation, u_p,
  RadialProfile,
};
