use crate::error::Result;
use crate::scalar::Scalar;

use super::flow::{DiskFlow, FlowState, JacobianLift, Track};
use super::hamiltonian::DiskHamiltonian;

/// An area-preserving disk map given as the time-one map of a Hamiltonian
/// isotopy, iterated together with its Jacobian path and action.
pub trait DiskMap<T: Scalar>: Send + Sync {
  /// Order `m` of a rotational symmetry commuting with the map.
  fn symmetry_order(&self) -> usize {
    1
  }

  /// Applies the map once. `state.t` counts iterates; the Jacobian and the
  /// action accumulate, and `lift` is extended along this iterate's path.
  fn step(&self, state: FlowState<T>, track: Track, lift: Option<&mut JacobianLift<T>>) -> Result<FlowState<T>>;

  /// `k`-th iterate from `z`.
  fn iterate(&self, z: [T; 2], k: usize, track: Track, mut lift: Option<&mut JacobianLift<T>>) -> Result<FlowState<T>> {
    let mut s = FlowState::start(T::zero(), z);
    for _ in 0..k {
      s = self.step(s, track, lift.as_deref_mut())?;
    }
    Ok(s)
  }
}

impl<T: Scalar, H: DiskHamiltonian<T>> DiskMap<T> for DiskFlow<H, T> {
  fn symmetry_order(&self) -> usize {
    self.hamiltonian.meta().symmetry_order
  }

  fn step(&self, state: FlowState<T>, track: Track, lift: Option<&mut JacobianLift<T>>) -> Result<FlowState<T>> {
    let t1 = state.t.floor() + T::one();
    self.advance(state, t1, track, lift, |_| {})
  }
}
