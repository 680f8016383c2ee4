//! The special disk map `φ = φ^G ∘ φ^H`: a rotation by `2π(1 + 1/n)`
//! followed by twists of strength `R` on a `Z/n`-symmetric union of disks.

pub mod lemmas;
pub mod params;
pub mod profile;
pub mod system;

pub use lemmas::{verify_special_lemmas, LemmaReport, LemmaSettings, PeriodicSummary};
pub use params::{pack_rings, sector_of, validate_setup, Disk, Packing, SetupCheck, SetupReport, SpecialParams};
pub use profile::{build_twist_profile, build_twist_profile_with_width, TwistProfile};
pub use system::{build_special_hamiltonian, SpecialHamiltonian, SpecialMap, SpecialSystem};
