//! Shared inputs for the benchmarks.

use gc_twin::{MeshSpec, Placement, Scenario};

pub fn scenario() -> Scenario {
    Scenario::default_for(Placement::Longitudinal)
}

/// Coarser than the default so one iteration stays well under a second.
pub fn mesh() -> MeshSpec {
    MeshSpec::new(12, 96, 240)
}
