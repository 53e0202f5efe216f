//! Casimir-Polder free energy by Matsubara summation, entropy by numerical
//! temperature differentiation, and the zero-temperature energy by the
//! continuum limit of the sum.
//!
//! The computed object is the reduced sum
//!     phi = sum'_l [alpha(zeta_l)/alpha0] Itilde_l e^{-zeta_l},
//! with Itilde_l the exponentially weighted inner integral; unit conversion
//! happens only at the boundary (F = -k_B T alpha0 phi / 8 a^3), which keeps
//! all accumulated magnitudes O(1).

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::CGS;
use crate::quadrature::{CompositeExpRule, NeumaierSum};
use crate::reflection::{
    self, FrequencyPoint, ReflectionError, ReflectionPair, ScreeningContext,
};
use crate::response::{
    drude_like_addition, AtomModel, CarrierStatistics, ResponseError, WallModel,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LifshitzError {
    #[error(transparent)]
    Response(#[from] ResponseError),
    #[error(transparent)]
    Reflection(#[from] ReflectionError),
    #[error("invalid evaluation point: {0}")]
    InvalidPoint(String),
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("summation did not converge: {0}")]
    NonConvergence(String),
    #[error(
        "temperature-derivative step audit failed: coarse {coarse:e} vs fine {fine:e} \
         (relative deviation {deviation:e} exceeds {allowed:e})"
    )]
    DerivativeInconsistency { coarse: f64, fine: f64, deviation: f64, allowed: f64 },
}

/// Separation/temperature pair with the derived dimensionless quantities of
/// the Matsubara representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvaluationPoint {
    a: f64,
    t: f64,
}

impl EvaluationPoint {
    /// `a` in cm, `t` in K.
    pub fn new(a: f64, t: f64) -> Result<Self, LifshitzError> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(LifshitzError::InvalidPoint(format!("separation must be > 0, got {a}")));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(LifshitzError::InvalidPoint(format!("temperature must be >= 0, got {t}")));
        }
        Ok(Self { a, t })
    }

    pub fn separation(&self) -> f64 {
        self.a
    }
    pub fn temperature(&self) -> f64 {
        self.t
    }

    /// Characteristic frequency omega_c = c / (2a), rad/s.
    pub fn omega_c(&self) -> f64 {
        CGS.c / (2.0 * self.a)
    }

    /// Effective temperature, k_B T_eff = hbar omega_c.
    pub fn t_eff(&self) -> f64 {
        CGS.hbar * self.omega_c() / CGS.k_b
    }

    /// Reduced temperature tau = 2 pi T / T_eff = 4 pi k_B T a / (hbar c).
    pub fn tau(&self) -> f64 {
        4.0 * std::f64::consts::PI * CGS.k_b * self.t * self.a / (CGS.hbar * CGS.c)
    }

    /// Dimensionless Matsubara frequency zeta_l = l tau.
    pub fn zeta(&self, l: usize) -> f64 {
        l as f64 * self.tau()
    }

    fn with_temperature(&self, t: f64) -> Self {
        Self { a: self.a, t }
    }
}

/// The dimensionless Matsubara grid zeta_l = l tau for l = 0..=l_max.
pub fn matsubara_grid(pt: &EvaluationPoint, l_max: usize) -> Vec<f64> {
    (0..=l_max).map(|l| pt.zeta(l)).collect()
}

/// Numerical controls: relative tolerance, node budget for the inner rule,
/// optional explicit term count, and the entropy step fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Target relative error of the summation (default 1e-10).
    pub rel_tol: f64,
    /// Upper bound on Gauss-Laguerre tail nodes (default 150).
    pub node_budget: usize,
    /// Explicit number of l >= 1 terms; overrides the cutoff rule.
    /// `Some(0)` evaluates the zero-frequency term alone.
    pub lmax: Option<usize>,
    /// Relative step h/T of the entropy differentiation (default 1e-3).
    pub entropy_step_frac: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-10, node_budget: 150, lmax: None, entropy_step_frac: 1e-3 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), LifshitzError> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-4) {
            return Err(LifshitzError::InvalidSpec(format!(
                "rel_tol must lie in (0, 1e-4], got {}",
                self.rel_tol
            )));
        }
        if !(8..=150).contains(&self.node_budget) {
            return Err(LifshitzError::InvalidSpec(format!(
                "node_budget must lie in [8, 150], got {}",
                self.node_budget
            )));
        }
        if !(self.entropy_step_frac > 1e-6 && self.entropy_step_frac <= 0.1) {
            return Err(LifshitzError::InvalidSpec(format!(
                "entropy_step_frac must lie in (1e-6, 0.1], got {}",
                self.entropy_step_frac
            )));
        }
        Ok(())
    }
}

/// How the Matsubara summation terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffReason {
    /// Geometric tail bound fell below the tolerance.
    Tolerance,
    /// The caller fixed the term count explicitly.
    ExplicitCap,
    /// The hard cap was reached with the tail already negligible.
    HardCap,
}

/// Numerical diagnostics attached to every computed quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Number of l >= 1 terms actually summed.
    pub l_terms: usize,
    /// Gauss-Laguerre tail nodes of the inner rule.
    pub gl_nodes: usize,
    /// Measured relative deviation of the probe terms under node refinement.
    pub quad_validation: f64,
    /// Geometric bound on the dropped tail relative to the accumulated sum.
    pub tail_fraction: f64,
    pub cutoff: CutoffReason,
    /// Present on entropy results: the two-step Richardson audit.
    pub step_audit: Option<StepAudit>,
}

/// Temperature-derivative step audit: Richardson values from steps
/// (h, h/2) and (h/2, h/4) and their relative deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepAudit {
    pub h: f64,
    pub richardson_coarse: f64,
    pub richardson_fine: f64,
    pub rel_deviation: f64,
}

/// Free energy (erg), optional entropy (erg/K) and zero-temperature energy
/// (erg), with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComputationResult {
    pub free_energy: f64,
    pub entropy: Option<f64>,
    pub energy_t0: Option<f64>,
    pub diagnostics: Diagnostics,
}

/// Smallest absolute temperature step of the entropy differentiation, K.
const T_FLOOR: f64 = 1e-6;

/// Hard summation caps in units of 1/tau: free energy keeps the documented
/// 40/tau guarantee; entropy sums further because the derivative of a
/// truncated tail, not just its value, must stay below the noise floor.
const L_MULT_FREE_ENERGY: f64 = 40.0;
const L_MULT_ENTROPY: f64 = 50.0;

/// Zero-frequency reflection branch of a wall model.
#[derive(Debug, Clone, Copy)]
enum ZeroMode {
    /// TM coefficient constant in y (r0 for plain dielectrics, exactly 1
    /// once a dc term or a metallic response is present).
    ConstantTm(f64),
    /// Screened static coefficient of the modified theory.
    ScreenedStatic { eps0: f64, kappa_a: f64 },
}

/// Reflection inputs of one Matsubara term.
#[derive(Debug, Clone, Copy)]
enum TermCoeffs {
    Standard { eps: f64 },
    Modified { ctx: ScreeningContext },
}

/// Wall model resolved at fixed (a, T): precomputed sigma(0,T), kappa_a(T)
/// and the dispatch needed by the summation hot path.
struct WallResponse<'w> {
    wall: &'w WallModel,
    sigma0: f64,
    kappa_a: f64,
    eps0_host: f64,
}

impl<'w> WallResponse<'w> {
    fn new(wall: &'w WallModel, pt: &EvaluationPoint) -> Result<Self, LifshitzError> {
        wall.validate()?;
        let t = pt.temperature();
        let (sigma0, kappa_a, eps0_host) = match wall {
            WallModel::Oscillator(m) => (0.0, 0.0, m.static_permittivity()),
            WallModel::OscillatorPlusDc(m, law) => {
                (law.sigma_dc(t)?, 0.0, m.static_permittivity())
            }
            WallModel::Plasma(_) | WallModel::Drude(_, _) => (0.0, 0.0, 1.0),
            WallModel::Screened(m, law, spec) => {
                let eps0 = m.static_permittivity();
                let sigma0 = law.sigma_dc(t)?;
                let kappa_a = if t > 0.0 {
                    2.0 * pt.separation() * spec.kappa(t)?
                } else {
                    // T = 0 limit: Debye-Hueckel screening diverges for a
                    // persistent carrier density and vanishes with n -> 0;
                    // Thomas-Fermi is temperature-independent.
                    match spec.statistics {
                        CarrierStatistics::FermiDirac => 2.0 * pt.separation() * spec.kappa(0.0)?,
                        CarrierStatistics::MaxwellBoltzmann => {
                            if spec.n.eval(0.0) > 0.0 {
                                f64::INFINITY
                            } else {
                                0.0
                            }
                        }
                    }
                };
                (sigma0, kappa_a, eps0)
            }
        };
        Ok(Self { wall, sigma0, kappa_a, eps0_host })
    }

    fn zero_mode(&self) -> ZeroMode {
        match self.wall {
            WallModel::Oscillator(m) => {
                let e0 = m.static_permittivity();
                ZeroMode::ConstantTm((e0 - 1.0) / (e0 + 1.0))
            }
            // The dc term makes the static TM coefficient exactly 1 for any
            // nonzero conductivity law; this branch depends on the variant,
            // never on the magnitude of sigma.
            WallModel::OscillatorPlusDc(_, _) => ZeroMode::ConstantTm(1.0),
            WallModel::Plasma(_) | WallModel::Drude(_, _) => ZeroMode::ConstantTm(1.0),
            WallModel::Screened(m, _, _) => {
                if self.kappa_a == 0.0 {
                    let e0 = m.static_permittivity();
                    ZeroMode::ConstantTm((e0 - 1.0) / (e0 + 1.0))
                } else {
                    ZeroMode::ScreenedStatic { eps0: self.eps0_host, kappa_a: self.kappa_a }
                }
            }
        }
    }

    /// Reflection inputs at imaginary frequency xi = omega_c zeta_l, l >= 1.
    fn coeffs(&self, xi: f64) -> TermCoeffs {
        match self.wall {
            WallModel::Oscillator(m) => TermCoeffs::Standard { eps: m.permittivity(xi) },
            WallModel::OscillatorPlusDc(m, law) => TermCoeffs::Standard {
                eps: m.permittivity(xi) + drude_like_addition(self.sigma0, law.gamma_free, xi),
            },
            WallModel::Plasma(p) => {
                let r = p.omega_p / xi;
                TermCoeffs::Standard { eps: 1.0 + r * r }
            }
            WallModel::Drude(p, gamma) => TermCoeffs::Standard {
                eps: 1.0 + p.omega_p * p.omega_p / (xi * (xi + gamma)),
            },
            WallModel::Screened(m, law, _) => {
                let eps = m.permittivity(xi);
                let eps_tilde = eps + drude_like_addition(self.sigma0, law.gamma_free, xi);
                if eps_tilde == eps {
                    TermCoeffs::Standard { eps }
                } else {
                    TermCoeffs::Modified {
                        ctx: ScreeningContext {
                            eps,
                            eps_tilde,
                            eps0: self.eps0_host,
                            kappa_a: self.kappa_a,
                        },
                    }
                }
            }
        }
    }
}

/// Integrand bracket (2y^2 - zeta^2) r_TM - zeta^2 r_TE at l >= 1.
#[inline]
fn bracket(coeffs: &TermCoeffs, zeta: f64, y: f64) -> f64 {
    let (tm, te) = match coeffs {
        TermCoeffs::Standard { eps } => {
            let p = reflection::standard_pair_nonzero(*eps, zeta, y);
            (p.tm, p.te)
        }
        TermCoeffs::Modified { ctx } => (
            reflection::modified_tm_nonzero(ctx, zeta, y),
            reflection::standard_pair_nonzero(ctx.eps_tilde, zeta, y).te,
        ),
    };
    (2.0 * y * y - zeta * zeta) * tm - zeta * zeta * te
}

/// Frozen discretization of one summation: term count, cutoff floor, tail
/// nodes and the reference tau that fixes the panel layout.  The entropy
/// stencil reuses one plan at all stencil temperatures so that every
/// discretization error is a smooth function of T and cancels in the
/// differences.
#[derive(Debug, Clone, Copy)]
struct SummationPlan {
    l_terms: usize,
    l_min_check: usize,
    n_tail: usize,
    tau_ref: f64,
    explicit_cap: bool,
    validation: f64,
}

/// Reduced zero-frequency integral Itilde_0 = int_0^inf e^-y 2 y^2 r_TM(0,y) dy.
fn zero_term(mode: &ZeroMode, n_tail: usize) -> f64 {
    match mode {
        // int e^-y 2 y^2 dy = 4 exactly
        ZeroMode::ConstantTm(r) => 4.0 * r,
        ZeroMode::ScreenedStatic { eps0, kappa_a } => {
            if !kappa_a.is_finite() {
                return 4.0;
            }
            let rule = CompositeExpRule::for_corner(kappa_a.max(1e-4), n_tail);
            rule.integrate(0.0, |y| {
                2.0 * y * y * reflection::modified_tm_static(*eps0, *kappa_a, y)
            })
        }
    }
}

fn eval_term(
    resolver: &WallResponse<'_>,
    atom: &AtomModel,
    omega_c: f64,
    tau: f64,
    tau_ref: f64,
    n_tail: usize,
    l: usize,
) -> f64 {
    let zeta = l as f64 * tau;
    let coeffs = resolver.coeffs(omega_c * zeta);
    let rule = CompositeExpRule::for_corner(l as f64 * tau_ref, n_tail);
    let itilde = rule.integrate(zeta, |y| bracket(&coeffs, zeta, y));
    atom.reduced_alpha(zeta) * (-zeta).exp() * itilde
}

fn build_plan(
    resolver: &WallResponse<'_>,
    atom: &AtomModel,
    pt: &EvaluationPoint,
    q: &QuadratureSpec,
    l_mult: f64,
) -> Result<SummationPlan, LifshitzError> {
    q.validate()?;
    let tau = pt.tau();
    let (l_terms, l_min_check, explicit_cap) = match q.lmax {
        Some(l) => (l, l, true),
        None => {
            let hard = (l_mult / tau).ceil().max(8.0) as usize;
            let floor = ((20.0 / tau).ceil() as usize).min(hard);
            (hard, floor, false)
        }
    };
    // validate the tail rule on probe terms; refine nodes until stable
    let omega_c = pt.omega_c();
    let probes: Vec<usize> = [1usize, l_terms / 8 + 1, l_terms / 2 + 1]
        .into_iter()
        .filter(|&l| l <= l_terms.max(1))
        .collect();
    let mut n = 50usize.min(q.node_budget);
    let mut validation = f64::INFINITY;
    loop {
        let n_next = ((n * 3) / 2).min(q.node_budget);
        if n_next == n {
            break;
        }
        validation = probes
            .iter()
            .map(|&l| {
                let coarse = eval_term(resolver, atom, omega_c, tau, tau, n, l);
                let fine = eval_term(resolver, atom, omega_c, tau, tau, n_next, l);
                (coarse - fine).abs() / fine.abs().max(coarse.abs()).max(1e-300)
            })
            .fold(0.0, f64::max);
        if validation <= q.rel_tol / 30.0 {
            break;
        }
        n = n_next;
    }
    if validation > q.rel_tol {
        return Err(LifshitzError::NonConvergence(format!(
            "inner quadrature stalled at relative deviation {validation:e} with {n} tail nodes"
        )));
    }
    Ok(SummationPlan {
        l_terms,
        l_min_check,
        n_tail: n,
        tau_ref: tau,
        explicit_cap,
        validation: if validation.is_finite() { validation } else { 0.0 },
    })
}

/// Reduced free-energy sum phi = sum'_l [alpha/alpha0] I_l with the l = 0
/// term halved.  Ascending-l compensated accumulation; term values are
/// independent of the chunking, so results are bit-reproducible under any
/// thread count.
fn reduced_phi(
    resolver: &WallResponse<'_>,
    atom: &AtomModel,
    pt: &EvaluationPoint,
    q: &QuadratureSpec,
    plan: &SummationPlan,
    early_exit: bool,
) -> Result<(f64, Diagnostics), LifshitzError> {
    let tau = pt.tau();
    let omega_c = pt.omega_c();
    let mut acc = NeumaierSum::new();
    acc.add(0.5 * zero_term(&resolver.zero_mode(), plan.n_tail));

    let tail_factor = 1.0 / (1.0 - (-tau).exp());
    let mut cutoff = if plan.explicit_cap { CutoffReason::ExplicitCap } else { CutoffReason::HardCap };
    let mut tail_fraction = 0.0;
    let mut l_used = plan.l_terms;

    const CHUNK: usize = 256;
    let mut l = 1usize;
    'sum: while l <= plan.l_terms {
        let hi = (l + CHUNK - 1).min(plan.l_terms);
        let term_at = |i: usize| eval_term(resolver, atom, omega_c, tau, plan.tau_ref, plan.n_tail, i);
        let terms: Vec<f64> = if hi - l >= 32 {
            (l..=hi).into_par_iter().map(term_at).collect()
        } else {
            (l..=hi).map(term_at).collect()
        };
        for (i, t) in (l..=hi).zip(terms) {
            acc.add(t);
            if early_exit && i >= plan.l_min_check {
                let bound = t.abs() * tail_factor;
                let total = acc.value().abs();
                if bound < q.rel_tol * total {
                    cutoff = CutoffReason::Tolerance;
                    tail_fraction = if total > 0.0 { bound / total } else { 0.0 };
                    l_used = i;
                    break 'sum;
                }
            }
        }
        l = hi + 1;
    }

    if early_exit && cutoff == CutoffReason::HardCap && !plan.explicit_cap {
        // at the hard cap the geometric tail must already satisfy the rule
        let t_last = eval_term(resolver, atom, omega_c, tau, plan.tau_ref, plan.n_tail, plan.l_terms);
        let bound = t_last.abs() * tail_factor;
        let total = acc.value().abs();
        if bound >= q.rel_tol * total && total > 0.0 {
            return Err(LifshitzError::NonConvergence(format!(
                "tail bound {bound:e} still above tolerance after {} terms",
                plan.l_terms
            )));
        }
        tail_fraction = if total > 0.0 { bound / total } else { 0.0 };
    }

    Ok((
        acc.value(),
        Diagnostics {
            l_terms: l_used,
            gl_nodes: plan.n_tail,
            quad_validation: plan.validation,
            tail_fraction,
            cutoff,
            step_audit: None,
        },
    ))
}

fn free_energy_from_phi(pt: &EvaluationPoint, atom: &AtomModel, phi: f64) -> f64 {
    -CGS.k_b * pt.temperature() * atom.alpha0 * phi / (8.0 * pt.separation().powi(3))
}

/// Casimir-Polder free energy at (a, T), T > 0.
pub fn free_energy(
    wall: &WallModel,
    atom: &AtomModel,
    pt: &EvaluationPoint,
    q: &QuadratureSpec,
) -> Result<ComputationResult, LifshitzError> {
    if !(pt.temperature() > 0.0) {
        return Err(LifshitzError::InvalidPoint(
            "free_energy requires T > 0; use energy_t0 for the zero-temperature limit".into(),
        ));
    }
    let resolver = WallResponse::new(wall, pt)?;
    let plan = build_plan(&resolver, atom, pt, q, L_MULT_FREE_ENERGY)?;
    let (phi, diagnostics) = reduced_phi(&resolver, atom, pt, q, &plan, true)?;
    Ok(ComputationResult {
        free_energy: free_energy_from_phi(pt, atom, phi),
        entropy: None,
        energy_t0: None,
        diagnostics,
    })
}

/// Entropy S = -dF/dT by central differences of g(T) = T phi(T) with
/// Richardson extrapolation from steps (h, h/2); a second extrapolation
/// from (h/2, h/4) forms the step audit.
///
/// The summation plan (term count, node count, panel layout) is frozen at
/// the central temperature so the discretization error is smooth in T; the
/// physical temperature dependence (zeta spacing, sigma(0,T), kappa(T)) is
/// differentiated in full.
pub fn entropy(
    wall: &WallModel,
    atom: &AtomModel,
    pt: &EvaluationPoint,
    q: &QuadratureSpec,
) -> Result<ComputationResult, LifshitzError> {
    let t = pt.temperature();
    if !(t > 0.0) {
        return Err(LifshitzError::InvalidPoint("entropy requires T > 0".into()));
    }
    let h = (t * q.entropy_step_frac).max(T_FLOOR);
    if h >= 0.5 * t {
        return Err(LifshitzError::InvalidPoint(format!(
            "temperature {t} K too small for differentiation step {h} K"
        )));
    }
    let resolver = WallResponse::new(wall, pt)?;
    let plan = build_plan(&resolver, atom, pt, q, L_MULT_ENTROPY)?;

    let mut g_scale: f64 = 0.0;
    let mut g = |temp: f64| -> Result<f64, LifshitzError> {
        let pt_t = pt.with_temperature(temp);
        let resolver_t = WallResponse::new(wall, &pt_t)?;
        let (phi, _) = reduced_phi(&resolver_t, atom, &pt_t, q, &plan, false)?;
        let val = temp * phi;
        g_scale = g_scale.max(val.abs());
        Ok(val)
    };

    let central = |g: &mut dyn FnMut(f64) -> Result<f64, LifshitzError>,
                   step: f64|
     -> Result<f64, LifshitzError> { Ok((g(t + step)? - g(t - step)?) / (2.0 * step)) };

    let d_h = central(&mut g, h)?;
    let d_h2 = central(&mut g, 0.5 * h)?;
    let d_h4 = central(&mut g, 0.25 * h)?;
    let coarse = (4.0 * d_h2 - d_h) / 3.0;
    let fine = (4.0 * d_h4 - d_h2) / 3.0;

    let scale = coarse.abs().max(fine.abs());
    let deviation = (coarse - fine).abs();
    let allowed = 100.0 * q.rel_tol * scale;
    // pure-rounding fluctuations of the difference quotient set a noise
    // floor below which the audit cannot discriminate
    let noise_floor = 256.0 * f64::EPSILON * g_scale / (0.25 * h);
    if deviation > allowed.max(noise_floor) {
        return Err(LifshitzError::DerivativeInconsistency {
            coarse,
            fine,
            deviation: deviation / scale.max(1e-300),
            allowed: (allowed.max(noise_floor)) / scale.max(1e-300),
        });
    }

    let prefactor = CGS.k_b * atom.alpha0 / (8.0 * pt.separation().powi(3));
    let (phi_central, mut diagnostics) = reduced_phi(&resolver, atom, pt, q, &plan, false)?;
    diagnostics.step_audit = Some(StepAudit {
        h,
        richardson_coarse: prefactor * coarse,
        richardson_fine: prefactor * fine,
        rel_deviation: deviation / scale.max(1e-300),
    });
    Ok(ComputationResult {
        free_energy: free_energy_from_phi(pt, atom, phi_central),
        entropy: Some(prefactor * coarse),
        energy_t0: None,
        diagnostics,
    })
}

/// Zero-temperature Casimir-Polder energy: the continuum limit of the
/// Matsubara sum, E(a) = -(hbar c alpha0 / 32 pi a^4) int_0^inf dzeta
/// [alpha(zeta)/alpha0] Itilde(zeta) e^-zeta.
pub fn energy_t0(
    wall: &WallModel,
    atom: &AtomModel,
    a: f64,
    q: &QuadratureSpec,
) -> Result<ComputationResult, LifshitzError> {
    q.validate()?;
    let pt = EvaluationPoint::new(a, 0.0)?;
    let resolver = WallResponse::new(wall, &pt)?;
    let omega_c = pt.omega_c();

    let integral = |n_inner: usize, n_outer: usize| -> f64 {
        let outer = CompositeExpRule::for_corner(1e-4, n_outer);
        outer.integrate(0.0, |zeta| {
            let coeffs = resolver.coeffs(omega_c * zeta);
            let rule = CompositeExpRule::for_corner(zeta, n_inner);
            let itilde = rule.integrate(zeta, |y| bracket(&coeffs, zeta, y));
            atom.reduced_alpha(zeta) * itilde
        })
    };

    let mut n = 50usize.min(q.node_budget);
    let mut value = integral(n, n);
    let mut validation;
    loop {
        let n_next = ((n * 3) / 2).min(q.node_budget);
        let refined = if n_next == n { value } else { integral(n_next, n_next) };
        validation = (value - refined).abs() / refined.abs().max(1e-300);
        value = refined;
        if validation <= q.rel_tol || n_next == n {
            break;
        }
        n = n_next;
    }
    if validation > q.rel_tol {
        return Err(LifshitzError::NonConvergence(format!(
            "zero-temperature integral stalled at relative deviation {validation:e}"
        )));
    }

    let energy = -CGS.hbar * CGS.c * atom.alpha0 * value
        / (32.0 * std::f64::consts::PI * a.powi(4));
    Ok(ComputationResult {
        free_energy: energy,
        entropy: None,
        energy_t0: Some(energy),
        diagnostics: Diagnostics {
            l_terms: 0,
            gl_nodes: n,
            quad_validation: validation,
            tail_fraction: 0.0,
            cutoff: CutoffReason::Tolerance,
            step_audit: None,
        },
    })
}

/// Reflection coefficients of `wall` at Matsubara index `l` and integration
/// variable `y`, exactly as used inside the summation (including the
/// analytic zero-frequency branches).
pub fn reflection_pair(
    wall: &WallModel,
    pt: &EvaluationPoint,
    l: usize,
    y: f64,
) -> Result<ReflectionPair, LifshitzError> {
    let resolver = WallResponse::new(wall, pt)?;
    let zeta = pt.zeta(l);
    let point = FrequencyPoint::new(l, zeta, y)?;
    if l == 0 {
        let tm = match resolver.zero_mode() {
            ZeroMode::ConstantTm(r) => r,
            ZeroMode::ScreenedStatic { eps0, kappa_a } => {
                if kappa_a.is_finite() {
                    reflection::modified_tm_static(eps0, kappa_a, y)
                } else {
                    1.0
                }
            }
        };
        return Ok(ReflectionPair { tm, te: 0.0 });
    }
    Ok(match resolver.coeffs(pt.omega_c() * zeta) {
        TermCoeffs::Standard { eps } => reflection::standard_pair(eps, &point)?,
        TermCoeffs::Modified { ctx } => ReflectionPair {
            tm: reflection::modified_tm(&ctx, &point)?,
            te: reflection::modified_te(ctx.eps_tilde, &point)?,
        },
    })
}
