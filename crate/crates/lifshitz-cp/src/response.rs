//! Dielectric response models evaluated along the imaginary frequency axis,
//! carrier/conductivity laws, screening lengths, and the atomic polarizability.

use serde::{Deserialize, Serialize};

use crate::constants::CGS;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ResponseError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("imaginary frequency must be non-negative, got {0}")]
    NegativeFrequency(f64),
    #[error("imaginary frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("temperature must be non-negative, got {0}")]
    NegativeTemperature(f64),
    #[error("temperature must be positive for Maxwell-Boltzmann screening, got {0}")]
    NonPositiveTemperature(f64),
    #[error("Fermi-Dirac screening requires a Fermi energy")]
    MissingFermiEnergy,
}

/// A single Lorentz oscillator contribution to the core-electron permittivity.
///
/// `strength` is the squared-frequency oscillator strength g_j (rad^2/s^2),
/// `omega` the resonance frequency (rad/s), `gamma` the relaxation
/// frequency (rad/s; only used by the full, non-approximated form).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Oscillator {
    pub strength: f64,
    pub omega: f64,
    pub gamma: f64,
}

/// Oscillator model of a dielectric: eps(i xi) = 1 + sum_j g_j / (omega_j^2 + xi^2).
///
/// The relaxation terms gamma_j are dropped by default; `full_form` retains
/// them (g_j / (omega_j^2 + xi^2 + gamma_j xi)) for sensitivity studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatorModel {
    oscillators: Vec<Oscillator>,
    #[serde(default)]
    full_form: bool,
}

impl OscillatorModel {
    pub fn new(oscillators: Vec<Oscillator>) -> Result<Self, ResponseError> {
        for (j, osc) in oscillators.iter().enumerate() {
            if !(osc.omega > 0.0) {
                return Err(ResponseError::InvalidModel(format!(
                    "oscillator {j}: omega must be > 0, got {}",
                    osc.omega
                )));
            }
            if !(osc.strength >= 0.0) || !(osc.gamma >= 0.0) {
                return Err(ResponseError::InvalidModel(format!(
                    "oscillator {j}: strength and gamma must be >= 0"
                )));
            }
        }
        let model = Self { oscillators, full_form: false };
        if !model.static_permittivity().is_finite() {
            return Err(ResponseError::InvalidModel(
                "static permittivity is not finite".into(),
            ));
        }
        Ok(model)
    }

    /// An empty model: vacuum response, eps = 1 at every frequency.
    pub fn vacuum() -> Self {
        Self { oscillators: Vec::new(), full_form: false }
    }

    pub fn with_full_form(mut self, full_form: bool) -> Self {
        self.full_form = full_form;
        self
    }

    pub fn oscillators(&self) -> &[Oscillator] {
        &self.oscillators
    }

    /// Static permittivity eps_0 = 1 + sum_j g_j / omega_j^2.
    pub fn static_permittivity(&self) -> f64 {
        1.0 + self
            .oscillators
            .iter()
            .map(|o| o.strength / (o.omega * o.omega))
            .sum::<f64>()
    }

    /// Core-electron permittivity at imaginary frequency xi (rad/s),
    /// in the approximated form with the relaxation terms dropped.
    pub fn eps_core(&self, xi: f64) -> Result<f64, ResponseError> {
        if !(xi >= 0.0) {
            return Err(ResponseError::NegativeFrequency(xi));
        }
        Ok(self.eval_approx(xi))
    }

    /// Full form retaining the gamma_j relaxation terms.
    pub fn eps_core_full(&self, xi: f64) -> Result<f64, ResponseError> {
        if !(xi >= 0.0) {
            return Err(ResponseError::NegativeFrequency(xi));
        }
        Ok(1.0
            + self
                .oscillators
                .iter()
                .map(|o| o.strength / (o.omega * o.omega + xi * xi + o.gamma * xi))
                .sum::<f64>())
    }

    fn eval_approx(&self, xi: f64) -> f64 {
        1.0 + self
            .oscillators
            .iter()
            .map(|o| o.strength / (o.omega * o.omega + xi * xi))
            .sum::<f64>()
    }

    /// Permittivity honoring the `full_form` flag.
    pub(crate) fn permittivity(&self, xi: f64) -> f64 {
        if self.full_form {
            1.0 + self
                .oscillators
                .iter()
                .map(|o| o.strength / (o.omega * o.omega + xi * xi + o.gamma * xi))
                .sum::<f64>()
        } else {
            self.eval_approx(xi)
        }
    }
}

/// Parametric carrier-density or mobility law of temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CarrierLaw {
    /// Temperature-independent value.
    Constant { value: f64 },
    /// value = prefactor * exp(-delta / (k_B T)); 0 at T = 0. `delta` in erg.
    Activated { prefactor: f64, delta: f64 },
    /// Piecewise-linear table of (T, value) points, clamped at the ends.
    Table { points: Vec<(f64, f64)> },
}

impl CarrierLaw {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            CarrierLaw::Constant { value } => *value,
            CarrierLaw::Activated { prefactor, delta } => {
                if t <= 0.0 {
                    0.0
                } else {
                    prefactor * (-delta / (CGS.k_b * t)).exp()
                }
            }
            CarrierLaw::Table { points } => {
                if points.is_empty() {
                    return 0.0;
                }
                if t <= points[0].0 {
                    return points[0].1;
                }
                if t >= points[points.len() - 1].0 {
                    return points[points.len() - 1].1;
                }
                let i = points.partition_point(|p| p.0 < t);
                let (t0, v0) = points[i - 1];
                let (t1, v1) = points[i];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }
}

/// How the dc conductivity sigma(0, T) is obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ConductivityMode {
    /// sigma(0, T) = sigma_ref * exp(-delta / (k_B T)), with sigma(0, 0) = 0.
    Activation { sigma_ref: f64, delta: f64 },
    /// sigma(0, T) = mu(T) |e| n(T).
    Assembled { n: CarrierLaw, mobility: CarrierLaw },
}

/// dc conductivity law plus the free-electron relaxation frequency used by
/// the Drude-like permittivity addition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConductivityLaw {
    pub mode: ConductivityMode,
    /// Relaxation frequency of free carriers, rad/s.
    pub gamma_free: f64,
}

impl ConductivityLaw {
    pub fn new(mode: ConductivityMode, gamma_free: f64) -> Result<Self, ResponseError> {
        if !(gamma_free > 0.0) {
            return Err(ResponseError::InvalidModel(format!(
                "gamma_free must be > 0, got {gamma_free}"
            )));
        }
        if let ConductivityMode::Activation { sigma_ref, delta } = &mode {
            if !(*sigma_ref >= 0.0) || !(*delta >= 0.0) {
                return Err(ResponseError::InvalidModel(
                    "sigma_ref and delta must be >= 0".into(),
                ));
            }
        }
        Ok(Self { mode, gamma_free })
    }

    /// dc conductivity sigma(0, T) in 1/s (Gaussian units).
    pub fn sigma_dc(&self, t: f64) -> Result<f64, ResponseError> {
        if !(t >= 0.0) {
            return Err(ResponseError::NegativeTemperature(t));
        }
        Ok(match &self.mode {
            ConductivityMode::Activation { sigma_ref, delta } => {
                if t == 0.0 {
                    0.0
                } else {
                    sigma_ref * (-delta / (CGS.k_b * t)).exp()
                }
            }
            ConductivityMode::Assembled { n, mobility } => {
                mobility.eval(t) * CGS.e * n.eval(t)
            }
        })
    }
}

/// Adds the Drude-like free-carrier term to the core permittivity:
/// eps~(i xi) = eps_core(i xi) + 4 pi sigma(0,T) / [xi (1 + xi/gamma_free)].
pub fn eps_with_dc(
    model: &OscillatorModel,
    law: &ConductivityLaw,
    xi: f64,
    t: f64,
) -> Result<f64, ResponseError> {
    if !(xi > 0.0) {
        return Err(ResponseError::NonPositiveFrequency(xi));
    }
    let sigma0 = law.sigma_dc(t)?;
    Ok(model.eps_core(xi)? + drude_like_addition(sigma0, law.gamma_free, xi))
}

pub(crate) fn drude_like_addition(sigma0: f64, gamma_free: f64, xi: f64) -> f64 {
    4.0 * std::f64::consts::PI * sigma0 / (xi * (1.0 + xi / gamma_free))
}

/// Plasma model of a metal: eps(i xi) = 1 + omega_p^2 / xi^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlasmaModel {
    /// Plasma frequency, rad/s.
    pub omega_p: f64,
}

impl PlasmaModel {
    pub fn new(omega_p: f64) -> Result<Self, ResponseError> {
        if !(omega_p > 0.0) {
            return Err(ResponseError::InvalidModel(format!(
                "omega_p must be > 0, got {omega_p}"
            )));
        }
        Ok(Self { omega_p })
    }

    /// Effective skin depth delta_0 = c / omega_p, cm.
    pub fn skin_depth(&self) -> f64 {
        CGS.c / self.omega_p
    }

    pub fn eps_plasma(&self, xi: f64) -> Result<f64, ResponseError> {
        if !(xi > 0.0) {
            return Err(ResponseError::NonPositiveFrequency(xi));
        }
        let r = self.omega_p / xi;
        Ok(1.0 + r * r)
    }

    /// Drude model: eps(i xi) = 1 + omega_p^2 / [xi (xi + gamma)].
    pub fn eps_drude(&self, gamma: f64, xi: f64) -> Result<f64, ResponseError> {
        if !(xi > 0.0) {
            return Err(ResponseError::NonPositiveFrequency(xi));
        }
        if !(gamma >= 0.0) {
            return Err(ResponseError::InvalidModel(format!(
                "relaxation frequency must be >= 0, got {gamma}"
            )));
        }
        Ok(1.0 + self.omega_p * self.omega_p / (xi * (xi + gamma)))
    }
}

/// Carrier statistics selecting the screening law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarrierStatistics {
    MaxwellBoltzmann,
    FermiDirac,
}

/// Screening specification: carrier statistics, density and mobility laws,
/// host static permittivity and (for degenerate carriers) the Fermi energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeningSpec {
    pub statistics: CarrierStatistics,
    pub n: CarrierLaw,
    pub mobility: CarrierLaw,
    /// Static permittivity of the host material entering the screening length.
    pub eps0_host: f64,
    /// Fermi energy in erg; required for Fermi-Dirac statistics.
    /// The convention here is E_F = hbar omega_p.
    pub fermi_energy: Option<f64>,
}

impl ScreeningSpec {
    pub fn validate(&self) -> Result<(), ResponseError> {
        if !(self.eps0_host >= 1.0) {
            return Err(ResponseError::InvalidModel(format!(
                "eps0_host must be >= 1, got {}",
                self.eps0_host
            )));
        }
        if self.statistics == CarrierStatistics::FermiDirac {
            match self.fermi_energy {
                Some(ef) if ef > 0.0 => {}
                Some(_) => {
                    return Err(ResponseError::InvalidModel(
                        "fermi_energy must be > 0".into(),
                    ))
                }
                None => return Err(ResponseError::MissingFermiEnergy),
            }
        }
        Ok(())
    }

    /// Inverse screening length kappa(T) in 1/cm.
    ///
    /// Maxwell-Boltzmann: kappa_DH = sqrt(4 pi e^2 n(T) / (eps0_host k_B T));
    /// Fermi-Dirac: kappa_TF = sqrt(6 pi e^2 n(T) / (eps0_host E_F)).
    pub fn kappa(&self, t: f64) -> Result<f64, ResponseError> {
        self.validate()?;
        let n = self.n.eval(t).max(0.0);
        match self.statistics {
            CarrierStatistics::MaxwellBoltzmann => {
                if !(t > 0.0) {
                    return Err(ResponseError::NonPositiveTemperature(t));
                }
                Ok((4.0 * std::f64::consts::PI * CGS.e * CGS.e * n
                    / (self.eps0_host * CGS.k_b * t))
                    .sqrt())
            }
            CarrierStatistics::FermiDirac => {
                let ef = self.fermi_energy.ok_or(ResponseError::MissingFermiEnergy)?;
                Ok((6.0 * std::f64::consts::PI * CGS.e * CGS.e * n / (self.eps0_host * ef))
                    .sqrt())
            }
        }
    }
}

/// Single-oscillator atomic polarizability: alpha(i zeta) = alpha0 / (1 + beta^2 zeta^2),
/// with zeta the dimensionless Matsubara frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomModel {
    /// Static polarizability, cm^3.
    pub alpha0: f64,
    /// Dimensionless shape constant.
    pub beta: f64,
}

impl AtomModel {
    pub fn new(alpha0: f64, beta: f64) -> Result<Self, ResponseError> {
        if !(alpha0 > 0.0) {
            return Err(ResponseError::InvalidModel(format!(
                "alpha0 must be > 0, got {alpha0}"
            )));
        }
        if !(beta >= 0.0) {
            return Err(ResponseError::InvalidModel(format!(
                "beta must be >= 0, got {beta}"
            )));
        }
        Ok(Self { alpha0, beta })
    }

    /// Dynamic polarizability at dimensionless frequency zeta, cm^3.
    pub fn alpha_dynamic(&self, zeta: f64) -> Result<f64, ResponseError> {
        if !(zeta >= 0.0) {
            return Err(ResponseError::NegativeFrequency(zeta));
        }
        Ok(self.alpha0 / (1.0 + self.beta * self.beta * zeta * zeta))
    }

    /// alpha(zeta)/alpha0; used by the reduced (dimensionless) summation.
    pub(crate) fn reduced_alpha(&self, zeta: f64) -> f64 {
        1.0 / (1.0 + self.beta * self.beta * zeta * zeta)
    }
}

/// Wall response model: one variant per dielectric-response class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WallModel {
    /// Dielectric with dc conductivity neglected.
    Oscillator(OscillatorModel),
    /// Dielectric with the Drude-like dc-conductivity term included.
    OscillatorPlusDc(OscillatorModel, ConductivityLaw),
    /// Metal described by the plasma model.
    Plasma(PlasmaModel),
    /// Metal described by the Drude model with relaxation frequency (rad/s).
    Drude(PlasmaModel, f64),
    /// Dielectric with free carriers, screening and diffusion currents
    /// (modified reflection coefficients).
    Screened(OscillatorModel, ConductivityLaw, ScreeningSpec),
}

impl WallModel {
    /// Finite static permittivity, when the variant has one.
    pub fn static_permittivity(&self) -> Option<f64> {
        match self {
            WallModel::Oscillator(m)
            | WallModel::OscillatorPlusDc(m, _)
            | WallModel::Screened(m, _, _) => Some(m.static_permittivity()),
            WallModel::Plasma(_) | WallModel::Drude(_, _) => None,
        }
    }

    pub fn validate(&self) -> Result<(), ResponseError> {
        match self {
            WallModel::Oscillator(_) | WallModel::OscillatorPlusDc(_, _) => Ok(()),
            WallModel::Plasma(p) | WallModel::Drude(p, _) => {
                if p.omega_p > 0.0 {
                    Ok(())
                } else {
                    Err(ResponseError::InvalidModel("omega_p must be > 0".into()))
                }
            }
            WallModel::Screened(_, _, s) => s.validate(),
        }
    }
}
