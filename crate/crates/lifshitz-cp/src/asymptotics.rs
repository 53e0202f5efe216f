//! Closed-form low-temperature laws and limiting entropy values used as
//! analytic references for the numerical pipeline.

use crate::constants::CGS;
use crate::lifshitz::{self, EvaluationPoint, LifshitzError, QuadratureSpec};
use crate::response::{AtomModel, WallModel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AsymptoticsError {
    #[error("no tabulated C(eps0) for eps0 = {0}; known entries: 3.81, 11.67")]
    MissingCoefficient(f64),
    #[error("reduced temperature tau = {0} outside the asymptotic window (<= {1})")]
    OutsideWindow(f64, f64),
    #[error("wall model has no finite static permittivity")]
    NoStaticPermittivity,
    #[error("wall model is not metallic")]
    NotMetallic,
    #[error(transparent)]
    Lifshitz(#[from] LifshitzError),
}

/// Tabulated values of the dielectric low-temperature coefficient C(eps0).
/// Lookups outside the table fail explicitly; the coefficient is never
/// interpolated.
const C_TABLE: [(f64, f64); 2] = [(3.81, 2.70), (11.67, 6.33)];

/// C(eps0) for the tabulated static permittivities.
pub fn c_coefficient(eps0: f64) -> Result<f64, AsymptoticsError> {
    C_TABLE
        .iter()
        .find(|(key, _)| (eps0 - key).abs() <= 1e-9 * key)
        .map(|(_, c)| *c)
        .ok_or(AsymptoticsError::MissingCoefficient(eps0))
}

/// Static TM reflection coefficient r0 = (eps0 - 1)/(eps0 + 1).
pub fn r0(eps0: f64) -> f64 {
    (eps0 - 1.0) / (eps0 + 1.0)
}

fn require_window(pt: &EvaluationPoint, max_tau: f64) -> Result<(), AsymptoticsError> {
    let tau = pt.tau();
    if tau > max_tau {
        return Err(AsymptoticsError::OutsideWindow(tau, max_tau));
    }
    Ok(())
}

fn static_eps(wall: &WallModel) -> Result<f64, AsymptoticsError> {
    wall.static_permittivity().ok_or(AsymptoticsError::NoStaticPermittivity)
}

/// Dielectric low-temperature free energy:
/// E(a) - (hbar c pi^3 / 240 a^4) alpha0 C(eps0) (T/T_eff)^4,
/// with E(a) from the zero-temperature pipeline.
pub fn dielectric_free_energy_asym(
    wall: &WallModel,
    atom: &AtomModel,
    pt: &EvaluationPoint,
    q: &QuadratureSpec,
) -> Result<f64, AsymptoticsError> {
    let c = c_coefficient(static_eps(wall)?)?;
    require_window(pt, 0.1)?;
    let e0 = lifshitz::energy_t0(wall, atom, pt.separation(), q)?.free_energy;
    let x = pt.temperature() / pt.t_eff();
    let a4 = pt.separation().powi(4);
    Ok(e0 - CGS.hbar * CGS.c * std::f64::consts::PI.powi(3) / (240.0 * a4)
        * atom.alpha0
        * c
        * x.powi(4))
}

/// Dielectric low-temperature entropy:
/// (pi^3 k_B / 30 a^3) alpha0 C(eps0) (T/T_eff)^3.
pub fn dielectric_entropy_asym(
    eps0: f64,
    atom: &AtomModel,
    pt: &EvaluationPoint,
) -> Result<f64, AsymptoticsError> {
    let c = c_coefficient(eps0)?;
    require_window(pt, 0.1)?;
    let x = pt.temperature() / pt.t_eff();
    Ok(std::f64::consts::PI.powi(3) * CGS.k_b / (30.0 * pt.separation().powi(3))
        * atom.alpha0
        * c
        * x.powi(3))
}

/// Classical zero-frequency deficit once dc conductivity is included:
/// -(k_B T / 4 a^3) (1 - r0) alpha0.
pub fn dc_free_energy_correction(eps0: f64, atom: &AtomModel, pt: &EvaluationPoint) -> f64 {
    -CGS.k_b * pt.temperature() / (4.0 * pt.separation().powi(3))
        * (1.0 - r0(eps0))
        * atom.alpha0
}

/// Residual entropy of the dc-included theory, k_B (1 - r0) alpha0 / (4 a^3).
pub fn dc_entropy_limit(eps0: f64, atom: &AtomModel, a: f64) -> f64 {
    CGS.k_b * (1.0 - r0(eps0)) * atom.alpha0 / (4.0 * a.powi(3))
}

/// Metallic low-temperature laws as tabulated for an atom near an ideal
/// metal plate: returns (free energy, entropy),
/// F = E^p(a) - (hbar c pi^3 / 360 a^4) alpha0 (T/T_eff)^4,
/// S = (pi^3 k_B / 45 a^3) alpha0 (T/T_eff)^3,
/// with E^p(a) from the zero-temperature pipeline for the given metal wall.
pub fn metal_asym(
    wall: &WallModel,
    atom: &AtomModel,
    pt: &EvaluationPoint,
    q: &QuadratureSpec,
) -> Result<(f64, f64), AsymptoticsError> {
    let plasma = match wall {
        WallModel::Plasma(p) | WallModel::Drude(p, _) => p,
        _ => return Err(AsymptoticsError::NotMetallic),
    };
    require_window(pt, 0.1)?;
    let delta0_over_a = plasma.skin_depth() / pt.separation();
    if delta0_over_a > 0.01 {
        return Err(AsymptoticsError::OutsideWindow(delta0_over_a, 0.01));
    }
    let e_p = lifshitz::energy_t0(wall, atom, pt.separation(), q)?.free_energy;
    let x = pt.temperature() / pt.t_eff();
    let pi3 = std::f64::consts::PI.powi(3);
    let f = e_p
        - CGS.hbar * CGS.c * pi3 / (360.0 * pt.separation().powi(4)) * atom.alpha0 * x.powi(4);
    let s = pi3 * CGS.k_b / (45.0 * pt.separation().powi(3)) * atom.alpha0 * x.powi(3);
    Ok((f, s))
}

/// Carrier-density classes of the screened theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CarrierClass {
    /// n(T) -> 0 as T -> 0 (e.g. exponentially activated carriers).
    VanishingN,
    /// n(T) stays finite as T -> 0; only the mobility vanishes.
    PersistentN,
}

/// Residual entropy of the screened theory at T -> 0: zero for vanishing
/// carrier density, and exactly the dc-conductivity value
/// k_B (1 - r0) alpha0 / (4 a^3) for a persistent one.
pub fn screened_entropy_limit(
    eps0: f64,
    atom: &AtomModel,
    a: f64,
    class: CarrierClass,
) -> f64 {
    match class {
        CarrierClass::VanishingN => 0.0,
        CarrierClass::PersistentN => dc_entropy_limit(eps0, atom, a),
    }
}

/// Asserted T -> 0 entropy limit for a Thomas-Fermi-screened metal wall:
/// zero, under either the plasma or the Drude description.
pub fn screened_metal_check(_atom: &AtomModel, _pt: &EvaluationPoint) -> f64 {
    0.0
}
