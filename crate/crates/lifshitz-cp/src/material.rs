//! Material and atom definition files (JSON, strict schema).
//!
//! Wall files carry frequencies and energies in eV; conversion to Gaussian
//! units happens here. Schema (unknown keys are rejected):
//!
//! ```json
//! {
//!   "variant": "oscillator | oscillator_dc | plasma | drude | screened",
//!   "oscillators": [ { "g_ev2": 474.89, "omega_ev": 13.0, "gamma_ev": 0.0 } ],
//!   "full_oscillator_form": false,
//!   "sigma_ref": 1.0,
//!   "delta_ev": 0.05,
//!   "gamma_ev": 0.001,
//!   "omega_p_ev": 9.0,
//!   "screening": {
//!     "statistics": "maxwell_boltzmann | fermi_dirac",
//!     "n_law": { "type": "constant", "value": 1e18 },
//!     "mu_law": { "type": "activated", "prefactor": 2e-7, "delta_ev": 0.05 },
//!     "e_f_ev": 9.0
//!   }
//! }
//! ```
//!
//! `gamma_ev` is the relaxation parameter of the variant: the Drude
//! relaxation frequency for `drude`, and the free-carrier relaxation of the
//! dc term for `oscillator_dc` and `screened`.  Screened walls assemble
//! sigma(0,T) = mu(T) |e| n(T) from the screening laws, and the host static
//! permittivity of the screening length is derived from the oscillators.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::{ev_to_rad_s, EV_ERG};
use crate::response::{
    AtomModel, CarrierLaw, CarrierStatistics, ConductivityLaw, ConductivityMode, Oscillator,
    OscillatorModel, PlasmaModel, ResponseError, ScreeningSpec, WallModel,
};

#[derive(Debug, thiserror::Error)]
pub enum MaterialError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: {source}")]
    Model { path: String, source: ResponseError },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OscillatorEntry {
    g_ev2: f64,
    omega_ev: f64,
    #[serde(default)]
    gamma_ev: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum LawEntry {
    Constant { value: f64 },
    Activated { prefactor: f64, delta_ev: f64 },
    Table { points: Vec<(f64, f64)> },
}

impl From<&LawEntry> for CarrierLaw {
    fn from(entry: &LawEntry) -> Self {
        match entry {
            LawEntry::Constant { value } => CarrierLaw::Constant { value: *value },
            LawEntry::Activated { prefactor, delta_ev } => {
                CarrierLaw::Activated { prefactor: *prefactor, delta: delta_ev * EV_ERG }
            }
            LawEntry::Table { points } => CarrierLaw::Table { points: points.clone() },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScreeningEntry {
    statistics: CarrierStatistics,
    n_law: LawEntry,
    mu_law: LawEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    e_f_ev: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WallFile {
    variant: String,
    #[serde(default)]
    oscillators: Vec<OscillatorEntry>,
    #[serde(default)]
    full_oscillator_form: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma_ref: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta_ev: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma_ev: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    omega_p_ev: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    screening: Option<ScreeningEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomFile {
    alpha0_cm3: f64,
    beta: f64,
}

fn schema_err(path: &Path, message: impl Into<String>) -> MaterialError {
    MaterialError::Schema { path: path.display().to_string(), message: message.into() }
}

fn build_oscillators(path: &Path, file: &WallFile) -> Result<OscillatorModel, MaterialError> {
    let oscillators = file
        .oscillators
        .iter()
        .map(|o| Oscillator {
            strength: o.g_ev2 * ev_to_rad_s(1.0) * ev_to_rad_s(1.0),
            omega: ev_to_rad_s(o.omega_ev),
            gamma: ev_to_rad_s(o.gamma_ev),
        })
        .collect();
    OscillatorModel::new(oscillators)
        .map(|m| m.with_full_form(file.full_oscillator_form))
        .map_err(|source| MaterialError::Model { path: path.display().to_string(), source })
}

fn require<T: Copy>(path: &Path, field: Option<T>, name: &str) -> Result<T, MaterialError> {
    field.ok_or_else(|| schema_err(path, format!("missing field `{name}` for this variant")))
}

/// Loads a wall model from a JSON definition file.
pub fn load_wall(path: impl AsRef<Path>) -> Result<WallModel, MaterialError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| MaterialError::Io { path: path.display().to_string(), source })?;
    let file: WallFile = serde_json::from_str(&text)
        .map_err(|source| MaterialError::Parse { path: path.display().to_string(), source })?;
    wall_from_file(path, &file)
}

fn wall_from_file(path: &Path, file: &WallFile) -> Result<WallModel, MaterialError> {
    let model = |source| MaterialError::Model { path: path.display().to_string(), source };
    match file.variant.as_str() {
        "oscillator" => Ok(WallModel::Oscillator(build_oscillators(path, file)?)),
        "oscillator_dc" => {
            let m = build_oscillators(path, file)?;
            let sigma_ref = require(path, file.sigma_ref, "sigma_ref")?;
            let delta = require(path, file.delta_ev, "delta_ev")? * EV_ERG;
            let gamma_free = ev_to_rad_s(require(path, file.gamma_ev, "gamma_ev")?);
            let law =
                ConductivityLaw::new(ConductivityMode::Activation { sigma_ref, delta }, gamma_free)
                    .map_err(model)?;
            Ok(WallModel::OscillatorPlusDc(m, law))
        }
        "plasma" => {
            let p = PlasmaModel::new(ev_to_rad_s(require(path, file.omega_p_ev, "omega_p_ev")?))
                .map_err(model)?;
            Ok(WallModel::Plasma(p))
        }
        "drude" => {
            let p = PlasmaModel::new(ev_to_rad_s(require(path, file.omega_p_ev, "omega_p_ev")?))
                .map_err(model)?;
            let gamma = ev_to_rad_s(require(path, file.gamma_ev, "gamma_ev")?);
            Ok(WallModel::Drude(p, gamma))
        }
        "screened" => {
            let m = build_oscillators(path, file)?;
            let screening = file
                .screening
                .as_ref()
                .ok_or_else(|| schema_err(path, "missing field `screening`"))?;
            let n: CarrierLaw = (&screening.n_law).into();
            let mobility: CarrierLaw = (&screening.mu_law).into();
            let gamma_free = ev_to_rad_s(require(path, file.gamma_ev, "gamma_ev")?);
            let law = ConductivityLaw::new(
                ConductivityMode::Assembled { n: n.clone(), mobility: mobility.clone() },
                gamma_free,
            )
            .map_err(model)?;
            let spec = ScreeningSpec {
                statistics: screening.statistics,
                n,
                mobility,
                eps0_host: m.static_permittivity(),
                fermi_energy: screening.e_f_ev.map(|ev| ev * EV_ERG),
            };
            spec.validate().map_err(model)?;
            Ok(WallModel::Screened(m, law, spec))
        }
        other => Err(schema_err(
            path,
            format!(
                "unknown variant `{other}`; expected oscillator, oscillator_dc, plasma, drude \
                 or screened"
            ),
        )),
    }
}

/// Loads an atom model from a JSON definition file.
pub fn load_atom(path: impl AsRef<Path>) -> Result<AtomModel, MaterialError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| MaterialError::Io { path: path.display().to_string(), source })?;
    let file: AtomFile = serde_json::from_str(&text)
        .map_err(|source| MaterialError::Parse { path: path.display().to_string(), source })?;
    AtomModel::new(file.alpha0_cm3, file.beta)
        .map_err(|source| MaterialError::Model { path: path.display().to_string(), source })
}
