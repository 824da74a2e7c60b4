//! Quadrature, root finding, elliptic integrals and Bohr-Sommerfeld levels
//! of one-degree-of-freedom potentials.

pub mod action;
pub mod elliptic;
pub mod quadrature;
pub mod roots;

pub use action::{
    action_integral, bs_energy_levels, turning_points, Domain, Excluded, Level, LevelTable,
    OneDofSystem,
};
pub use elliptic::{
    elliptic_e, elliptic_k, elliptic_k_e, pendulum_action_closed_form, PENDULUM_SEPARATRIX_ACTION,
};
pub use quadrature::{tanh_sinh, tanh_sinh_endpoints, QuadratureResult, QuadratureSpec};
pub use roots::{brent, golden_min};
