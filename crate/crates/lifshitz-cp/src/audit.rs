//! Automated Nernst heat-theorem audit: sweeps the reduced temperature
//! downward, fits the low-temperature entropy law S(T) = s0 + s3 (T/T_eff)^3,
//! extrapolates the T -> 0 entropy and classifies the wall model as
//! thermodynamically consistent or violating.

use serde::Serialize;

use crate::asymptotics::r0;
use crate::constants::CGS;
use crate::lifshitz::{self, EvaluationPoint, LifshitzError, QuadratureSpec};
use crate::response::{AtomModel, CarrierStatistics, WallModel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AuditError {
    #[error("invalid audit config: {0}")]
    InvalidConfig(String),
    #[error("entropy evaluation failed at tau = {tau}: {source}")]
    PointFailed { tau: f64, source: LifshitzError },
    #[error(
        "carrier-density limit is indeterminate: n({t_lo} K)/n({t_hi} K) = {ratio} \
         lies in the ambiguous band (0.5, 0.9)"
    )]
    IndeterminateCarrierLimit { t_lo: f64, t_hi: f64, ratio: f64 },
    #[error("wall model carries no carrier-density law and is not metallic")]
    NoCarrierLaw,
}

/// Material classes of the audit, following the carrier-density dichotomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaterialClass {
    DielectricVanishingN,
    DielectricPersistentN,
    Metal,
}

/// Classifies a wall by the T -> 0 behavior of its carrier density,
/// probing n(T) at the two smallest grid temperatures (ratio test).
/// Metallic variants classify directly.
pub fn classify_material(
    wall: &WallModel,
    t_lo: f64,
    t_hi: f64,
) -> Result<MaterialClass, AuditError> {
    let n_law = match wall {
        WallModel::Plasma(_) | WallModel::Drude(_, _) => return Ok(MaterialClass::Metal),
        WallModel::Screened(_, _, spec) => {
            if spec.statistics == CarrierStatistics::FermiDirac {
                return Ok(MaterialClass::Metal);
            }
            &spec.n
        }
        WallModel::OscillatorPlusDc(_, law) => match &law.mode {
            crate::response::ConductivityMode::Assembled { n, .. } => n,
            // the activation law itself vanishes exponentially; treated as
            // carriers freezing out
            crate::response::ConductivityMode::Activation { .. } => {
                return Ok(MaterialClass::DielectricVanishingN)
            }
        },
        WallModel::Oscillator(_) => return Err(AuditError::NoCarrierLaw),
    };
    let (n_lo, n_hi) = (n_law.eval(t_lo), n_law.eval(t_hi));
    if n_hi <= 0.0 {
        return Ok(MaterialClass::DielectricVanishingN);
    }
    let ratio = n_lo / n_hi;
    if ratio >= 0.9 {
        Ok(MaterialClass::DielectricPersistentN)
    } else if ratio <= 0.5 {
        Ok(MaterialClass::DielectricVanishingN)
    } else {
        Err(AuditError::IndeterminateCarrierLimit { t_lo, t_hi, ratio })
    }
}

/// Audit configuration: wall/atom/separation, the descending reduced
/// temperature grid, and the verdict threshold theta.
#[derive(Debug, Clone)]
pub struct AuditConfig {
    pub wall: WallModel,
    pub atom: AtomModel,
    /// Separation, cm.
    pub a: f64,
    /// Strictly descending reduced temperatures tau = 2 pi T / T_eff, all <= 0.1.
    pub tau_grid: Vec<f64>,
    /// Verdict threshold: Violated iff |s0| > theta * S_ref.
    pub theta: f64,
    pub quadrature: QuadratureSpec,
}

impl AuditConfig {
    pub fn new(wall: WallModel, atom: AtomModel, a: f64) -> Self {
        Self {
            wall,
            atom,
            a,
            tau_grid: vec![0.05, 0.03, 0.02, 0.01, 0.005],
            theta: 0.02,
            // the low-tau entropy rides on a large temperature-independent
            // background; a larger differentiation step keeps the rounding
            // noise of the differences well below the verdict threshold
            quadrature: QuadratureSpec { entropy_step_frac: 2e-2, ..QuadratureSpec::default() },
        }
    }

    pub fn validate(&self) -> Result<(), AuditError> {
        if self.tau_grid.len() < 3 {
            return Err(AuditError::InvalidConfig("need at least 3 grid points".into()));
        }
        if !self.tau_grid.windows(2).all(|w| w[0] > w[1]) {
            return Err(AuditError::InvalidConfig("tau grid must be strictly descending".into()));
        }
        if self.tau_grid.iter().any(|&t| !(t > 0.0 && t <= 0.1)) {
            return Err(AuditError::InvalidConfig("tau grid entries must lie in (0, 0.1]".into()));
        }
        if !(self.theta > 0.0 && self.theta < 0.1) {
            return Err(AuditError::InvalidConfig(format!(
                "theta must lie in (0, 0.1), got {}",
                self.theta
            )));
        }
        if !(self.a > 0.0) {
            return Err(AuditError::InvalidConfig("separation must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated,
}

/// One evaluated grid point of the audit sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AuditPoint {
    pub tau: f64,
    pub temperature_k: f64,
    /// (T/T_eff)^3, the fit abscissa.
    pub x: f64,
    /// Entropy, erg/K.
    pub entropy: f64,
    /// Step-audit deviation of this entropy value, erg/K.
    pub uncertainty: f64,
}

/// Result of a Nernst audit: the fitted law, the reference scale, and the
/// verdict.
#[derive(Debug, Clone, Serialize)]
pub struct NernstReport {
    /// Extrapolated residual entropy S(a, T -> 0), erg/K.
    pub s0: f64,
    pub s0_uncertainty: f64,
    /// Coefficient of (T/T_eff)^3, erg/K.
    pub s3: f64,
    pub s3_uncertainty: f64,
    /// Reference entropy scale the threshold is measured against, erg/K.
    pub s_ref: f64,
    pub theta: f64,
    pub verdict: Verdict,
    pub material_class: Option<MaterialClass>,
    pub points: Vec<AuditPoint>,
    /// Root-mean-square relative fit residual.
    pub residual_rms: f64,
}

impl std::fmt::Display for NernstReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Nernst heat-theorem audit")?;
        writeln!(f, "  {:>10}  {:>12}  {:>17}  {:>12}", "tau", "T (K)", "S (erg/K)", "dS (erg/K)")?;
        for p in &self.points {
            writeln!(
                f,
                "  {:>10.4}  {:>12.6}  {:>17.9e}  {:>12.3e}",
                p.tau, p.temperature_k, p.entropy, p.uncertainty
            )?;
        }
        writeln!(f, "  fit S(T) = s0 + s3 (T/T_eff)^3")?;
        writeln!(f, "    s0    = {:.9e} +- {:.3e} erg/K", self.s0, self.s0_uncertainty)?;
        writeln!(f, "    s3    = {:.9e} +- {:.3e} erg/K", self.s3, self.s3_uncertainty)?;
        writeln!(f, "    S_ref = {:.9e} erg/K, theta = {}", self.s_ref, self.theta)?;
        writeln!(f, "    residual rms (relative) = {:.3e}", self.residual_rms)?;
        if let Some(class) = self.material_class {
            writeln!(f, "    material class: {class:?}")?;
        }
        write!(f, "  verdict: {:?}", self.verdict)
    }
}

/// Weighted least squares of S = s0 + s3 x with fractional weighting:
/// sigma_i proportional to max(|S_i|, floor), floor = 1e-3 max|S|.  The
/// grid spans three decades in x, so absolute weighting would let the
/// largest point dictate the fit; fractional weighting balances the law
/// across the window.
fn fit_line(points: &[AuditPoint]) -> (f64, f64, f64, f64, f64) {
    let s_max = points.iter().map(|p| p.entropy.abs()).fold(0.0, f64::max);
    let floor = (1e-3 * s_max).max(1e-300);
    let sigmas: Vec<f64> = points.iter().map(|p| p.entropy.abs().max(floor)).collect();

    let (mut sw, mut swx, mut swxx, mut swy, mut swxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (p, sig) in points.iter().zip(&sigmas) {
        let w = 1.0 / (sig * sig);
        sw += w;
        swx += w * p.x;
        swxx += w * p.x * p.x;
        swy += w * p.entropy;
        swxy += w * p.x * p.entropy;
    }
    let det = sw * swxx - swx * swx;
    let s0 = (swxx * swy - swx * swxy) / det;
    let s3 = (sw * swxy - swx * swy) / det;

    // residual-scaled parameter uncertainties
    let n = points.len() as f64;
    let chi2: f64 = points
        .iter()
        .zip(&sigmas)
        .map(|(p, sig)| {
            let r = (p.entropy - s0 - s3 * p.x) / sig;
            r * r
        })
        .sum();
    let dof = (n - 2.0).max(1.0);
    let scale = (chi2 / dof).max(1.0);
    let s0_unc = (scale * swxx / det).sqrt();
    let s3_unc = (scale * sw / det).sqrt();

    let rms = (points
        .iter()
        .map(|p| {
            let denom = p.entropy.abs().max(floor);
            let r = (p.entropy - s0 - s3 * p.x) / denom;
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    (s0, s3, s0_unc, s3_unc, rms)
}

fn is_metallic(wall: &WallModel) -> bool {
    matches!(wall, WallModel::Plasma(_) | WallModel::Drude(_, _))
        || matches!(wall, WallModel::Screened(_, _, spec) if spec.statistics == CarrierStatistics::FermiDirac)
}

/// Reference entropy scale of the verdict threshold: the dc residual
/// k_B (1 - r0) alpha0 / (4 a^3) for walls with a finite eps0, and the
/// metallic cubic law at the smallest grid point otherwise.
pub fn reference_scale(cfg: &AuditConfig) -> f64 {
    match cfg.wall.static_permittivity() {
        Some(eps0) if !is_metallic(&cfg.wall) => {
            CGS.k_b * (1.0 - r0(eps0)) * cfg.atom.alpha0 / (4.0 * cfg.a.powi(3))
        }
        _ => {
            let tau_min = cfg.tau_grid.last().copied().unwrap_or(0.005);
            let x = tau_min / (2.0 * std::f64::consts::PI);
            std::f64::consts::PI.powi(3) * CGS.k_b / (45.0 * cfg.a.powi(3))
                * cfg.atom.alpha0
                * x.powi(3)
        }
    }
}

/// Runs the audit: descending sweep, weighted fit, verdict.
pub fn run_audit(cfg: &AuditConfig) -> Result<NernstReport, AuditError> {
    cfg.validate()?;
    let t_eff = EvaluationPoint::new(cfg.a, 1.0)
        .map_err(|e| AuditError::InvalidConfig(e.to_string()))?
        .t_eff();

    let mut points = Vec::with_capacity(cfg.tau_grid.len());
    for &tau in &cfg.tau_grid {
        let t = tau * t_eff / (2.0 * std::f64::consts::PI);
        let pt = EvaluationPoint::new(cfg.a, t)
            .map_err(|source| AuditError::PointFailed { tau, source })?;
        let result = lifshitz::entropy(&cfg.wall, &cfg.atom, &pt, &cfg.quadrature)
            .map_err(|source| AuditError::PointFailed { tau, source })?;
        let audit = result.diagnostics.step_audit.expect("entropy carries a step audit");
        points.push(AuditPoint {
            tau,
            temperature_k: t,
            x: (t / t_eff).powi(3),
            entropy: result.entropy.expect("entropy result"),
            uncertainty: (audit.richardson_coarse - audit.richardson_fine).abs(),
        });
    }

    let (s0, s3, s0_unc, s3_unc, residual_rms) = fit_line(&points);
    let s_ref = reference_scale(cfg);
    let verdict = if s0.abs() > cfg.theta * s_ref { Verdict::Violated } else { Verdict::Satisfied };

    let (t_lo, t_hi) = {
        let n = points.len();
        (points[n - 1].temperature_k, points[n - 2].temperature_k)
    };
    let material_class = match classify_material(&cfg.wall, t_lo, t_hi) {
        Ok(class) => Some(class),
        Err(AuditError::NoCarrierLaw) => None,
        Err(e) => return Err(e),
    };

    Ok(NernstReport {
        s0,
        s0_uncertainty: s0_unc,
        s3,
        s3_uncertainty: s3_unc,
        s_ref,
        theta: cfg.theta,
        verdict,
        material_class,
        points,
        residual_rms,
    })
}
