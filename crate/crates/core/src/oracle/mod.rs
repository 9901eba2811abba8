//! Brute-force checks for the closed forms: exact diagonalization of small
//! system + bath models, normal modes of quadratic networks, and direct
//! quadrature of position-space integrals. All oracles work in `f64`.

mod ed;
mod network;
mod quadrature;

pub use ed::{
    first_order_structure_check, ground_state, ground_state_with, oscillator_moments, reduced_density,
    spin_bloch_vector, spin_coupling_sweep, spin_energy_populations, truncation_change, EigenSolver, FirstOrderReport,
    GroundState, ReducedDensityMatrix, SparseSymmetric, SweepPoint, SystemKind, TruncatedModel, DENSE_LIMIT,
    MAX_DIMENSION, SLOPE_WINDOW,
};
pub use network::{network_ground_covariances, ohmic_network, NormalModeNetwork};
pub use quadrature::{
    hermite_function, purity_via_quadrature, rho_nn_via_quadrature, z_via_quadrature, MAX_QUADRATURE_LEVEL,
};
