//! Spectral-Galerkin simulation of the nonlinear fish-bone suspension-bridge
//! model: a vertical deflection `w(x, t)` and a torsional rotation
//! `theta(x, t)` of a hinged deck, coupled through two parabolic cables with
//! rigid hangers, with stretching of the deck and first-order piston-theory
//! wind loading.
//!
//! The modules build on each other:
//!
//! - [`spectral`]: sine basis, composite Gauss-Legendre grid, transforms.
//! - [`cable`]: cable-hanger force `h`, its energy `Pi` and the projected loads.
//! - [`dynamics`]: parameters, modal state and the ODE right-hand side.
//! - [`integrate`]: RK4 and adaptive Dormand-Prince integrators.
//! - [`linear`]: characteristic roots and the closed-form linear solution.
//! - [`diagnostics`]: energies, energy identity, Lyapunov functional, inequality checks.
//! - [`experiments`]: the Tacoma Narrows preset, figure scenarios and wind sweeps.

pub mod cable;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod integrate;
pub mod linear;
pub mod spectral;

pub use error::{Error, Result};
