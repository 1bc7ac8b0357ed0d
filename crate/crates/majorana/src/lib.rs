//! Spin states as constellations of points on the unit sphere.
//!
//! A pure spin-S state is equivalent to an unordered set of 2S points on the
//! sphere (the zeros of its Husimi function). This crate builds states from
//! such constellations and back, expands states over irreducible tensor
//! operators to obtain their multipole spectra, transforms between spectra
//! and the Husimi function, samples three families of random states, and
//! runs reproducible Monte Carlo ensemble studies against closed-form
//! baselines.
//!
//! The narrative guide lives in [`guide`]; its chapters double as doc-tests.

pub mod cg;
pub mod ensembles;
pub mod engine;
pub mod error;
pub mod half_integer;
pub mod harmonics;
pub mod husimi;
pub mod io;
pub mod multipole;
pub mod oracles;
pub mod roots;
pub mod sphere;
pub mod states;

pub use cg::{clebsch_gordan, CgMode, CgTable};
pub use ensembles::{
    sample_cue, sample_majorana, sample_symmetric_projection, EnsembleKind, RngStream,
};
pub use engine::{compare_ensembles, fit_kmax_scaling, run_ensemble, EnsembleStats, RunConfig, ScalingFit};
pub use error::{Error, Result};
pub use half_integer::HalfInt;
pub use harmonics::spherical_harmonic;
pub use husimi::{integrate_q, multipoles_from_q, q_function, q_function_from_state, q_on_grid};
pub use multipole::{multipoles, projected_multipoles, MultipoleSpectrum};
pub use sphere::{Direction, SphereGrid};
pub use states::{
    coherent_amplitude, constellation_from_state, make_coherent_state, normalization_permanent,
    state_from_constellation, Constellation, ProjectedState, SpinState,
};
