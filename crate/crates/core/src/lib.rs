//! Exact simulation of a qubit dephasing against an `N`-level random band.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: parameters, the Gaussian coupling matrix and the two
//!   spin-sector Hamiltonian blocks;
//! * [`spectral`] and [`evolve`]: exact propagation of the joint pure state;
//! * [`reduction`]: the qubit marginal and fragment-conditioned states;
//! * [`info`]: entropies, mutual information and averaged partial information
//!   plots;
//! * [`dephasing`]: the closed-form master-equation reference.
//!
//! Fragment averages and trajectories run on rayon when the `parallel`
//! feature is enabled (the default). Results are reduced in a fixed order,
//! so output is identical with or without the feature and for any thread
//! count.

pub mod dephasing;
pub mod error;
pub mod evolve;
pub mod info;
pub mod model;
pub mod par;
pub mod reduction;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use evolve::{initial_state, trajectory, JointState, Propagator};
pub use info::{
    entropy, mutual_information, pip_curve, pip_point, AverageMethod, Convention, LogBase, PipConfig, PipCurve,
    PipPoint, SamplingKey,
};
pub use model::{
    build_blocks, build_coupling_matrix, coupling_realization, dephasing_rate, validity_criteria, CouplingMatrix,
    HamiltonianBlocks, SystemParams,
};
pub use reduction::{fragment_projection, purity, reduce_fragment, reduce_system, DensityMatrix, Fragment};
