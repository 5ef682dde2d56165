//! Shared fixtures for the criterion benches: one mid-zone geometry and a
//! representative mixed state, so every bench measures the same workload.

use nalgebra::Vector3;
use resint_core::{werner_state, Geometry, TransitionDipole, TwoAtomState};

pub fn fixture_geometry() -> Geometry {
    Geometry::new(1.5, Vector3::new(0.6, 0.0, 0.8), 1.0).expect("valid geometry")
}

pub fn fixture_dipole() -> TransitionDipole {
    TransitionDipole::from_real(0.6, 0.0, 0.8).expect("valid dipole")
}

pub fn fixture_state() -> TwoAtomState {
    werner_state(0.7).expect("valid Werner parameter")
}
