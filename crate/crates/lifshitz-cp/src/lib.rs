//! Casimir-Polder atom-wall dispersion interaction from the finite-temperature
//! Lifshitz formula, with oscillator, dc-conductivity, plasma, Drude and
//! screened wall-response models, closed-form low-temperature references,
//! and an automated Nernst heat-theorem audit.
//!
//! See the guide in `book/` for a narrative introduction; the `lifshitz-cp`
//! binary exposes the energy/entropy/sweep/audit/coeff front end.

pub mod asymptotics;
pub mod audit;
pub mod cli;
pub mod constants;
pub mod lifshitz;
pub mod material;
pub mod quadrature;
pub mod reflection;
pub mod response;

pub use lifshitz::{
    energy_t0, entropy, free_energy, matsubara_grid, ComputationResult, EvaluationPoint,
    LifshitzError, QuadratureSpec,
};
pub use response::{AtomModel, WallModel};
