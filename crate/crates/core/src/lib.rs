//! Analytic and numeric machinery for a laser-driven two-level atom with
//! spontaneous decay: the Liouvillian and its exceptional points, population
//! dynamics, first- and second-order coherence, and the fluorescence spectrum.
//!
//! Every closed form in the crate has an independent numeric counterpart
//! (dense eigensolver, null vector, ODE integration of the moment and
//! regression equations, Fourier quadrature), and the two are cross-checked
//! in the test suite.
//!
//! Frequencies and rates are in the units of the decay rate `gamma`.
//!
//! ```
//! use liouville_ep::{ep, liouvillian, model::AtomParams};
//!
//! let at_ep = AtomParams::resonant(0.125).unwrap();
//! let spectrum = liouvillian::eigenvalues_numeric(&liouvillian::build_liouvillian(&at_ep)).unwrap();
//! assert!(spectrum.is_coalesced(1, 2));
//!
//! let found = ep::solve_ep_sextic(&ep::EpQuery::new(0.0, 1.0).unwrap());
//! assert_eq!(found.omegas, vec![0.125]);
//! ```

pub mod closed;
pub mod cubic;
pub mod dynamics;
pub mod eigen;
pub mod ep;
pub mod error;
pub mod liouvillian;
pub mod model;
pub mod ode;
pub mod spectrum;

pub use error::{Error, Result};
pub use model::{AtomParams, ComplexFrequency, DrivingRegime, RegimeTag};
