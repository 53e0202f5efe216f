//! TM/TE reflection coefficients at imaginary Matsubara frequencies:
//! the standard pair, the screening-modified coefficients, their analytic
//! zero-frequency limits, and the small-parameter expansions used as
//! numerical cross-checks.
//!
//! Zero-frequency values are hard-coded analytic branches; the generic
//! formulas are never evaluated at zeta = 0, where they are 0/0.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReflectionError {
    #[error("permittivity must be >= 1, got {0}")]
    PermittivityBelowVacuum(f64),
    #[error("invalid frequency point: {0}")]
    InvalidPoint(String),
    #[error("screening context is unphysical: {0}")]
    UnphysicalContext(String),
    #[error("expansion parameter {value} outside validity window (max {max})")]
    ExpansionWindow { value: f64, max: f64 },
}

/// A point of the inner integration domain: Matsubara index `l`, the
/// dimensionless frequency `zeta` = zeta_l, and the integration variable
/// `y` with y >= zeta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyPoint {
    l: usize,
    zeta: f64,
    y: f64,
}

impl FrequencyPoint {
    pub fn new(l: usize, zeta: f64, y: f64) -> Result<Self, ReflectionError> {
        if !(zeta >= 0.0) || !(y >= zeta) {
            return Err(ReflectionError::InvalidPoint(format!(
                "need y >= zeta >= 0, got zeta = {zeta}, y = {y}"
            )));
        }
        if (l == 0) != (zeta == 0.0) {
            return Err(ReflectionError::InvalidPoint(format!(
                "l = 0 iff zeta = 0, got l = {l}, zeta = {zeta}"
            )));
        }
        Ok(Self { l, zeta, y })
    }

    pub fn l(&self) -> usize {
        self.l
    }
    pub fn zeta(&self) -> f64 {
        self.zeta
    }
    pub fn y(&self) -> f64 {
        self.y
    }
}

/// TM and TE reflection amplitudes at one frequency point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReflectionPair {
    pub tm: f64,
    pub te: f64,
}

/// sqrt(y^2 + (eps - 1) zeta^2), the common radical of the Fresnel pair.
#[inline]
fn radical(eps: f64, zeta: f64, y: f64) -> f64 {
    (y * y + (eps - 1.0) * zeta * zeta).sqrt()
}

/// Standard pair at l >= 1, written in cancellation-free product form:
/// tm = (eps-1)[(eps+1)y^2 - zeta^2] / (eps y + R)^2,
/// te = -(eps-1) zeta^2 / (y + R)^2.
#[inline]
pub(crate) fn standard_pair_nonzero(eps: f64, zeta: f64, y: f64) -> ReflectionPair {
    let r = radical(eps, zeta, y);
    let em1 = eps - 1.0;
    ReflectionPair {
        tm: em1 * ((eps + 1.0) * y * y - zeta * zeta) / {
            let d = eps * y + r;
            d * d
        },
        te: -em1 * zeta * zeta / {
            let d = y + r;
            d * d
        },
    }
}

/// Standard TM/TE reflection coefficients.
///
/// At l = 0 the analytic limits r_tm = (eps0 - 1)/(eps0 + 1), r_te = 0 are
/// returned; `eps_l` is then interpreted as the static permittivity.
pub fn standard_pair(eps_l: f64, point: &FrequencyPoint) -> Result<ReflectionPair, ReflectionError> {
    if !(eps_l >= 1.0) {
        return Err(ReflectionError::PermittivityBelowVacuum(eps_l));
    }
    if point.l == 0 {
        return Ok(ReflectionPair { tm: (eps_l - 1.0) / (eps_l + 1.0), te: 0.0 });
    }
    Ok(standard_pair_nonzero(eps_l, point.zeta, point.y))
}

/// Inputs of the modified (screened) TM coefficient: core and dc-included
/// permittivities at this Matsubara frequency, host static permittivity,
/// and the dimensionless screening parameter kappa_a = 2 a kappa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreeningContext {
    pub eps: f64,
    pub eps_tilde: f64,
    pub eps0: f64,
    pub kappa_a: f64,
}

impl ScreeningContext {
    pub fn validate(&self) -> Result<(), ReflectionError> {
        if !(self.eps >= 1.0) {
            return Err(ReflectionError::PermittivityBelowVacuum(self.eps));
        }
        if !(self.eps_tilde >= self.eps) {
            return Err(ReflectionError::UnphysicalContext(format!(
                "eps_tilde ({}) must be >= eps ({})",
                self.eps_tilde, self.eps
            )));
        }
        if !(self.eps0 >= 1.0) || !(self.kappa_a >= 0.0) {
            return Err(ReflectionError::UnphysicalContext(
                "need eps0 >= 1 and kappa_a >= 0".into(),
            ));
        }
        Ok(())
    }

    /// The auxiliary root eta~_l = sqrt(y^2 - zeta^2 + kappa_a^2 eps0 eps~ / (eps (eps~ - eps))).
    pub fn eta(&self, point: &FrequencyPoint) -> Result<f64, ReflectionError> {
        let delta = self.eps_tilde - self.eps;
        let arg = (point.y - point.zeta) * (point.y + point.zeta)
            + self.kappa_a * self.kappa_a * self.eps0 * self.eps_tilde / (self.eps * delta);
        if !(arg > 0.0) || !arg.is_finite() {
            return Err(ReflectionError::UnphysicalContext(format!(
                "eta^2 = {arg} is not a positive real number"
            )));
        }
        Ok(arg.sqrt())
    }
}

/// Zero-frequency modified TM coefficient,
/// [eps0 sqrt(y^2 + kappa_a^2) - y] / [eps0 sqrt(y^2 + kappa_a^2) + y].
#[inline]
pub(crate) fn modified_tm_static(eps0: f64, kappa_a: f64, y: f64) -> f64 {
    let s = (y * y + kappa_a * kappa_a).sqrt();
    (eps0 * s - y) / (eps0 * s + y)
}

/// Drift-diffusion TM coefficient at l >= 1; assumes a validated context
/// with eps_tilde > eps and y > zeta.
#[inline]
pub(crate) fn modified_tm_nonzero(ctx: &ScreeningContext, zeta: f64, y: f64) -> f64 {
    let delta = ctx.eps_tilde - ctx.eps;
    let ysq = (y - zeta) * (y + zeta);
    let q = ctx.kappa_a * ctx.kappa_a * ctx.eps0 * ctx.eps_tilde / (ctx.eps * delta);
    let diffusion = ysq * delta / (ctx.eps * (ysq + q).sqrt());
    let r = radical(ctx.eps_tilde, zeta, y);
    // eps~ y - R written as a product to avoid cancellation near eps~ -> 1
    let num_std = (ctx.eps_tilde - 1.0) * ((ctx.eps_tilde + 1.0) * y * y - zeta * zeta)
        / (ctx.eps_tilde * y + r);
    (num_std - diffusion) / (ctx.eps_tilde * y + r + diffusion)
}

/// Modified TM reflection coefficient accounting for screening and
/// diffusion currents.
///
/// l = 0 uses the analytic branch
/// [eps0 sqrt(y^2 + kappa_a^2) - y] / [eps0 sqrt(y^2 + kappa_a^2) + y];
/// l >= 1 evaluates the drift-diffusion form. When sigma = 0 makes
/// eps~ = eps exactly, the standard coefficient is returned (the modified
/// form reduces to it continuously).
pub fn modified_tm(ctx: &ScreeningContext, point: &FrequencyPoint) -> Result<f64, ReflectionError> {
    ctx.validate()?;
    if point.l == 0 {
        return Ok(modified_tm_static(ctx.eps0, ctx.kappa_a, point.y));
    }
    let delta = ctx.eps_tilde - ctx.eps;
    if delta == 0.0 {
        return Ok(standard_pair_nonzero(ctx.eps, point.zeta, point.y).tm);
    }
    ctx.eta(point)?; // reject unphysical parameter combinations
    Ok(modified_tm_nonzero(ctx, point.zeta, point.y))
}

/// Modified TE coefficient: the standard TE form with eps replaced by
/// eps~; identically 0 at l = 0.
pub fn modified_te(eps_tilde: f64, point: &FrequencyPoint) -> Result<f64, ReflectionError> {
    if !(eps_tilde >= 1.0) {
        return Err(ReflectionError::PermittivityBelowVacuum(eps_tilde));
    }
    if point.l == 0 {
        return Ok(0.0);
    }
    Ok(standard_pair_nonzero(eps_tilde, point.zeta, point.y).te)
}

fn check_window(value: f64, max: f64) -> Result<(), ReflectionError> {
    if !(value >= 0.0) || value >= max {
        return Err(ReflectionError::ExpansionWindow { value, max });
    }
    Ok(())
}

fn require_nonzero_l(point: &FrequencyPoint) -> Result<(), ReflectionError> {
    if point.l == 0 {
        return Err(ReflectionError::InvalidPoint(
            "expansions are defined for l >= 1 only".into(),
        ));
    }
    Ok(())
}

/// First-order small-sigma expansion of the modified TM coefficient for a
/// dielectric: standard r_tm plus the beta_l term. Cross-check only; not
/// part of the summation path.
///
/// The first-order term equals eps d(r_tm)/d(eps) * beta_l, i.e. it is the
/// exact tangent along the relative perturbation eps~ = eps (1 + beta_l).
pub fn expand_tm_dielectric(
    eps_l: f64,
    beta_l: f64,
    point: &FrequencyPoint,
) -> Result<f64, ReflectionError> {
    if !(eps_l >= 1.0) {
        return Err(ReflectionError::PermittivityBelowVacuum(eps_l));
    }
    require_nonzero_l(point)?;
    check_window(beta_l, 0.1)?;
    let (zeta, y) = (point.zeta, point.y);
    let r = radical(eps_l, zeta, y);
    let first_order = eps_l * y * (2.0 * y * y + (eps_l - 2.0) * zeta * zeta) / {
        let d = eps_l * y + r;
        r * d * d
    };
    Ok(standard_pair_nonzero(eps_l, zeta, y).tm + beta_l * first_order)
}

/// First-order TE analog of [`expand_tm_dielectric`].
pub fn expand_te_dielectric(
    eps_l: f64,
    beta_l: f64,
    point: &FrequencyPoint,
) -> Result<f64, ReflectionError> {
    if !(eps_l >= 1.0) {
        return Err(ReflectionError::PermittivityBelowVacuum(eps_l));
    }
    require_nonzero_l(point)?;
    check_window(beta_l, 0.1)?;
    let (zeta, y) = (point.zeta, point.y);
    let r = radical(eps_l, zeta, y);
    let first_order = y * (y - r) / (r * (y + r));
    Ok(standard_pair_nonzero(eps_l, zeta, y).te + beta_l * first_order)
}

/// Large-screening expansion of the modified TM coefficient for a metal:
/// r~_tm - 2 beta_a Z_l with beta_a = 1/kappa_a. Cross-check only.
pub fn expand_tm_metal(
    ctx: &ScreeningContext,
    beta_a: f64,
    point: &FrequencyPoint,
) -> Result<f64, ReflectionError> {
    ctx.validate()?;
    require_nonzero_l(point)?;
    if !(beta_a > 0.0) {
        return Err(ReflectionError::ExpansionWindow { value: beta_a, max: 0.05 });
    }
    check_window(beta_a, 0.05)?;
    let (zeta, y) = (point.zeta, point.y);
    let delta = ctx.eps_tilde - ctx.eps;
    let r = radical(ctx.eps_tilde, zeta, y);
    let z_l = (ctx.eps_tilde * delta * delta * delta / (ctx.eps0 * ctx.eps)).sqrt()
        * y
        * (y - zeta)
        * (y + zeta)
        / {
            let d = ctx.eps_tilde * y + r;
            d * d
        };
    Ok(standard_pair_nonzero(ctx.eps_tilde, zeta, y).tm - 2.0 * beta_a * z_l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pt(l: usize, zeta: f64, y: f64) -> FrequencyPoint {
        FrequencyPoint::new(l, zeta, y).unwrap()
    }

    #[test]
    fn frequency_point_invariants() {
        assert!(FrequencyPoint::new(0, 0.0, 1.0).is_ok());
        assert!(FrequencyPoint::new(1, 0.5, 0.4).is_err()); // y < zeta
        assert!(FrequencyPoint::new(0, 0.5, 1.0).is_err()); // l = 0 with zeta > 0
        assert!(FrequencyPoint::new(2, 0.0, 1.0).is_err()); // zeta = 0 with l > 0
    }

    #[test]
    fn standard_pair_vacuum_reflects_nothing() {
        let p = standard_pair(1.0, &pt(1, 0.3, 0.9)).unwrap();
        assert_eq!(p.tm, 0.0);
        assert_eq!(p.te, 0.0);
    }

    #[test]
    fn standard_pair_static_branch() {
        let p = standard_pair(3.81, &pt(0, 0.0, 1.7)).unwrap();
        assert_relative_eq!(p.tm, 2.81 / 4.81, max_relative = 1e-15);
        assert_eq!(p.te, 0.0);
        // r0 = 0.584199... for eps0 = 3.81
        assert_relative_eq!(p.tm, 0.584_199_584_199_584_2, max_relative = 1e-12);
    }

    #[test]
    fn standard_pair_ideal_metal_limit() {
        let p = standard_pair(1e14, &pt(3, 0.9, 1.4)).unwrap();
        assert_relative_eq!(p.tm, 1.0, max_relative = 1e-6);
        assert_relative_eq!(p.te, -1.0, max_relative = 1e-6);
        assert!(standard_pair(0.99, &pt(1, 0.1, 0.2)).is_err());
    }

    #[test]
    fn standard_pair_matches_textbook_form() {
        // the product form must equal the naive (eps y - R)/(eps y + R) form
        for &(eps, zeta, y) in
            &[(3.81, 0.5, 0.5), (3.81, 0.5, 1.9), (11.67, 2.0, 2.0), (1.0 + 1e-9, 0.3, 0.7)]
        {
            let p = standard_pair(eps, &pt(1, zeta, y)).unwrap();
            let r = (y * y + (eps - 1.0) * zeta * zeta).sqrt();
            assert_relative_eq!(p.tm, (eps * y - r) / (eps * y + r), max_relative = 1e-12);
            assert_relative_eq!(p.te, (y - r) / (y + r), epsilon = 1e-15, max_relative = 1e-12);
        }
    }

    #[test]
    fn modified_tm_zero_frequency_branches() {
        // kappa_a = 0 collapses to the unscreened static coefficient
        let ctx = ScreeningContext { eps: 3.81, eps_tilde: 3.81, eps0: 3.81, kappa_a: 0.0 };
        let r = modified_tm(&ctx, &pt(0, 0.0, 1.3)).unwrap();
        assert_relative_eq!(r, 2.81 / 4.81, max_relative = 1e-15);
        // kappa_a -> infinity drives the coefficient to 1 for any eps0
        let ctx = ScreeningContext { eps: 3.81, eps_tilde: 3.81, eps0: 3.81, kappa_a: 1e12 };
        let r = modified_tm(&ctx, &pt(0, 0.0, 1.3)).unwrap();
        assert!((r - 1.0).abs() < 1e-10);
        // monotone in kappa_a at fixed (eps0, y)
        let mut prev = 0.0;
        for ka in [0.0, 0.5, 1.0, 5.0, 50.0, 5e3] {
            let ctx = ScreeningContext { eps: 3.81, eps_tilde: 3.81, eps0: 3.81, kappa_a: ka };
            let r = modified_tm(&ctx, &pt(0, 0.0, 0.8)).unwrap();
            assert!(r >= prev);
            prev = r;
        }
    }

    #[test]
    fn modified_tm_reduces_to_standard_without_carriers() {
        let point = pt(2, 0.7, 1.21);
        let ctx = ScreeningContext { eps: 3.81, eps_tilde: 3.81, eps0: 3.81, kappa_a: 857.0 };
        assert_eq!(
            modified_tm(&ctx, &point).unwrap(),
            standard_pair(3.81, &point).unwrap().tm
        );
        // and continuously: a microscopic sigma changes nothing at 1e-12 level
        let ctx = ScreeningContext { eps: 3.81, eps_tilde: 3.81 + 1e-13, eps0: 3.81, kappa_a: 857.0 };
        assert_relative_eq!(
            modified_tm(&ctx, &point).unwrap(),
            standard_pair(3.81, &point).unwrap().tm,
            max_relative = 1e-12
        );
    }

    #[test]
    fn modified_tm_point_anchor() {
        // frozen from an independent evaluation of the drift-diffusion form
        let ctx = ScreeningContext { eps: 3.81, eps_tilde: 3.82, eps0: 3.81, kappa_a: 100.0 };
        let r = modified_tm(&ctx, &pt(1, 0.5, 1.2)).unwrap();
        assert_relative_eq!(r, 0.515_726_793_940_469_49, max_relative = 1e-13);
    }

    #[test]
    fn modified_tm_rejects_unphysical_context() {
        let ctx = ScreeningContext { eps: 3.81, eps_tilde: 3.80, eps0: 3.81, kappa_a: 1.0 };
        assert!(modified_tm(&ctx, &pt(1, 0.5, 1.2)).is_err());
        let ctx = ScreeningContext { eps: 0.5, eps_tilde: 0.6, eps0: 3.81, kappa_a: 1.0 };
        assert!(modified_tm(&ctx, &pt(1, 0.5, 1.2)).is_err());
    }

    #[test]
    fn modified_te_examples() {
        assert_eq!(modified_te(3.81, &pt(0, 0.0, 0.4)).unwrap(), 0.0);
        assert_eq!(modified_te(1.0, &pt(1, 0.5, 1.0)).unwrap(), 0.0);
        // frozen arithmetic: (1 - sqrt 2)/(1 + sqrt 2)
        assert_relative_eq!(
            modified_te(2.0, &pt(1, 1.0, 1.0)).unwrap(),
            -0.171_572_875_253_809_9,
            max_relative = 1e-14
        );
        assert!(modified_te(0.9, &pt(1, 1.0, 1.0)).is_err());
    }

    #[test]
    fn expansions_collapse_at_zeroth_order() {
        let point = pt(1, 0.6, 1.1);
        assert_eq!(
            expand_tm_dielectric(3.81, 0.0, &point).unwrap(),
            standard_pair(3.81, &point).unwrap().tm
        );
        assert_eq!(
            expand_te_dielectric(3.81, 0.0, &point).unwrap(),
            standard_pair(3.81, &point).unwrap().te
        );
        assert!(expand_tm_dielectric(3.81, 0.2, &point).is_err());
        assert!(expand_tm_dielectric(3.81, 1e-3, &pt(0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn metal_expansion_zeroth_order_and_light_cone() {
        let ctx = ScreeningContext { eps: 1.0, eps_tilde: 4.0e4, eps0: 1.0, kappa_a: 1e4 };
        let point = pt(1, 0.8, 1.7);
        let rt = standard_pair(4.0e4, &point).unwrap().tm;
        // beta_a -> 0: correction vanishes linearly
        let d1 = (expand_tm_metal(&ctx, 1e-3, &point).unwrap() - rt).abs();
        let d2 = (expand_tm_metal(&ctx, 5e-4, &point).unwrap() - rt).abs();
        assert_relative_eq!(d1 / d2, 2.0, max_relative = 1e-9);
        // on the light-cone boundary y = zeta the Z_l factor vanishes
        let edge = pt(1, 0.8, 0.8);
        assert_eq!(
            expand_tm_metal(&ctx, 1e-3, &edge).unwrap(),
            standard_pair(4.0e4, &edge).unwrap().tm
        );
        assert!(expand_tm_metal(&ctx, 0.06, &point).is_err());
        assert!(expand_tm_metal(&ctx, 0.0, &point).is_err());
    }

    #[test]
    fn dielectric_expansion_residual_scales_quadratically() {
        // residual of the first-order expansion along eps~ = eps (1 + beta)
        // with a large fixed screening parameter
        let (eps, zeta, y) = (3.81, 0.7, 1.3);
        let point = pt(1, zeta, y);
        let mut residuals = Vec::new();
        for beta in [1e-2, 1e-3, 1e-4] {
            let ctx = ScreeningContext {
                eps,
                eps_tilde: eps * (1.0 + beta),
                eps0: eps,
                kappa_a: 1e8,
            };
            let full = modified_tm(&ctx, &point).unwrap();
            let exp = expand_tm_dielectric(eps, beta, &point).unwrap();
            residuals.push((full - exp).abs());
        }
        let r1 = residuals[1] / residuals[0];
        let r2 = residuals[2] / residuals[1];
        assert!((0.5e-2..=2e-2).contains(&r1), "ratio {r1}");
        assert!((0.5e-2..=2e-2).contains(&r2), "ratio {r2}");
    }

    #[test]
    fn metal_expansion_residual_scales_quadratically() {
        let (eps, eps_tilde, zeta, y) = (1.0, 4.0e4, 0.8, 1.7);
        let point = pt(1, zeta, y);
        let mut residuals = Vec::new();
        for beta_a in [1e-2, 1e-3, 1e-4] {
            let ctx = ScreeningContext { eps, eps_tilde, eps0: 1.0, kappa_a: 1.0 / beta_a };
            let full = modified_tm(&ctx, &point).unwrap();
            let exp = expand_tm_metal(&ctx, beta_a, &point).unwrap();
            residuals.push((full - exp).abs());
        }
        let r1 = residuals[1] / residuals[0];
        let r2 = residuals[2] / residuals[1];
        assert!((0.5e-2..=2e-2).contains(&r1), "ratio {r1}");
        assert!((0.5e-2..=2e-2).contains(&r2), "ratio {r2}");
    }
}
