//! Shared test support: fixture paths and an independently written
//! brute-force evaluator of the free energy (naive adaptive quadrature,
//! textbook-form coefficients, compensated accumulation).  The oracle
//! deliberately avoids the library's quadrature and summation machinery.

use std::path::PathBuf;

use lifshitz_cp::response::{
    AtomModel, CarrierLaw, CarrierStatistics, ConductivityMode, WallModel,
};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn load_wall(name: &str) -> WallModel {
    lifshitz_cp::material::load_wall(fixture(name)).unwrap()
}

pub fn load_atom() -> AtomModel {
    lifshitz_cp::material::load_atom(fixture("rb_atom.json")).unwrap()
}

pub mod oracle {
    use super::*;

    const K_B: f64 = 1.380649e-16;
    const HBAR: f64 = 1.054571817e-27;
    const C: f64 = 2.99792458e10;
    const E_CH: f64 = 4.803204712570263e-10;
    const L_MAX: usize = 100_000;

    struct Kahan {
        sum: f64,
        err: f64,
    }

    impl Kahan {
        fn new() -> Self {
            Self { sum: 0.0, err: 0.0 }
        }
        fn add(&mut self, v: f64) {
            let y = v - self.err;
            let t = self.sum + y;
            self.err = (t - self.sum) - y;
            self.sum = t;
        }
    }

    fn simpson_rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            left + right + delta / 15.0
        } else {
            simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
                + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
        }
    }

    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
        let (fa, fb) = (f(a), f(b));
        let m = 0.5 * (a + b);
        let fm = f(m);
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        simpson_rec(f, a, b, fa, fm, fb, whole, eps, 48)
    }

    fn carrier_eval(law: &CarrierLaw, t: f64) -> f64 {
        match law {
            CarrierLaw::Constant { value } => *value,
            CarrierLaw::Activated { prefactor, delta } => {
                if t <= 0.0 {
                    0.0
                } else {
                    prefactor * (-delta / (K_B * t)).exp()
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

    fn sigma_dc(mode: &ConductivityMode, t: f64) -> f64 {
        match mode {
            ConductivityMode::Activation { sigma_ref, delta } => {
                if t <= 0.0 {
                    0.0
                } else {
                    sigma_ref * (-delta / (K_B * t)).exp()
                }
            }
            ConductivityMode::Assembled { n, mobility } => {
                carrier_eval(mobility, t) * E_CH * carrier_eval(n, t)
            }
        }
    }

    fn eps_oscillators(wall_oscs: &lifshitz_cp::response::OscillatorModel, xi: f64) -> f64 {
        1.0 + wall_oscs
            .oscillators()
            .iter()
            .map(|o| o.strength / (o.omega * o.omega + xi * xi))
            .sum::<f64>()
    }

    fn rtm_textbook(eps: f64, z: f64, y: f64) -> f64 {
        let r = (y * y + z * z * (eps - 1.0)).sqrt();
        (eps * y - r) / (eps * y + r)
    }

    fn rte_textbook(eps: f64, z: f64, y: f64) -> f64 {
        let r = (y * y + z * z * (eps - 1.0)).sqrt();
        (y - r) / (y + r)
    }

    fn rtm_modified(eps: f64, epst: f64, eps0: f64, ka: f64, z: f64, y: f64) -> f64 {
        let rt = (y * y + (epst - 1.0) * z * z).sqrt();
        let eta = (y * y - z * z + ka * ka * eps0 * epst / (eps * (epst - eps))).sqrt();
        let d = (y * y - z * z) * (epst - eps) / (eta * eps);
        (epst * y - rt - d) / (epst * y + rt + d)
    }

    fn rtm_static_screened(eps0: f64, ka: f64, y: f64) -> f64 {
        let s = (y * y + ka * ka).sqrt();
        (eps0 * s - y) / (eps0 * s + y)
    }

    enum Coeffs {
        Std(f64),
        Screened { eps: f64, epst: f64, eps0: f64, ka: f64 },
    }

    struct Resolved<'w> {
        wall: &'w WallModel,
        sigma0: f64,
        kappa_a: f64,
    }

    impl<'w> Resolved<'w> {
        fn new(wall: &'w WallModel, a: f64, t: f64) -> Self {
            let (sigma0, kappa_a) = match wall {
                WallModel::Oscillator(_) | WallModel::Plasma(_) | WallModel::Drude(_, _) => {
                    (0.0, 0.0)
                }
                WallModel::OscillatorPlusDc(_, law) => (sigma_dc(&law.mode, t), 0.0),
                WallModel::Screened(m, law, spec) => {
                    let n = carrier_eval(&spec.n, t).max(0.0);
                    let kappa = match spec.statistics {
                        CarrierStatistics::MaxwellBoltzmann => {
                            (4.0 * std::f64::consts::PI * E_CH * E_CH * n
                                / (m.static_permittivity() * K_B * t))
                                .sqrt()
                        }
                        CarrierStatistics::FermiDirac => {
                            (6.0 * std::f64::consts::PI * E_CH * E_CH * n
                                / (m.static_permittivity() * spec.fermi_energy.unwrap()))
                            .sqrt()
                        }
                    };
                    (sigma_dc(&law.mode, t), 2.0 * a * kappa)
                }
            };
            Self { wall, sigma0, kappa_a }
        }

        fn zero_tm(&self) -> Box<dyn Fn(f64) -> f64 + '_> {
            match self.wall {
                WallModel::Oscillator(m) => {
                    let e0 = m.static_permittivity();
                    let r0 = (e0 - 1.0) / (e0 + 1.0);
                    Box::new(move |_| r0)
                }
                WallModel::OscillatorPlusDc(_, _)
                | WallModel::Plasma(_)
                | WallModel::Drude(_, _) => Box::new(|_| 1.0),
                WallModel::Screened(m, _, _) => {
                    let e0 = m.static_permittivity();
                    let ka = self.kappa_a;
                    if ka > 0.0 {
                        Box::new(move |y| rtm_static_screened(e0, ka, y))
                    } else {
                        let r0 = (e0 - 1.0) / (e0 + 1.0);
                        Box::new(move |_| r0)
                    }
                }
            }
        }

        fn coeffs(&self, xi: f64) -> Coeffs {
            match self.wall {
                WallModel::Oscillator(m) => Coeffs::Std(eps_oscillators(m, xi)),
                WallModel::OscillatorPlusDc(m, law) => {
                    let add = 4.0 * std::f64::consts::PI * self.sigma0
                        / (xi * (1.0 + xi / law.gamma_free));
                    Coeffs::Std(eps_oscillators(m, xi) + add)
                }
                WallModel::Plasma(p) => Coeffs::Std(1.0 + (p.omega_p / xi).powi(2)),
                WallModel::Drude(p, gamma) => {
                    Coeffs::Std(1.0 + p.omega_p * p.omega_p / (xi * (xi + gamma)))
                }
                WallModel::Screened(m, law, _) => {
                    let eps = eps_oscillators(m, xi);
                    let add = 4.0 * std::f64::consts::PI * self.sigma0
                        / (xi * (1.0 + xi / law.gamma_free));
                    if add == 0.0 {
                        Coeffs::Std(eps)
                    } else {
                        Coeffs::Screened {
                            eps,
                            epst: eps + add,
                            eps0: m.static_permittivity(),
                            ka: self.kappa_a,
                        }
                    }
                }
            }
        }
    }

    /// Brute-force Casimir-Polder free energy (erg).
    pub fn free_energy(wall: &WallModel, atom: &AtomModel, a: f64, t: f64) -> f64 {
        let resolved = Resolved::new(wall, a, t);
        let tau = 4.0 * std::f64::consts::PI * K_B * t * a / (HBAR * C);
        let omega_c = C / (2.0 * a);
        let (alpha0, beta) = (atom.alpha0, atom.beta);

        let mut acc = Kahan::new();
        let zero_tm = resolved.zero_tm();
        let f0 = |y: f64| (-y).exp() * 2.0 * y * y * zero_tm(y);
        acc.add(0.5 * adaptive_simpson(&f0, 0.0, 80.0, 1e-13));

        for l in 1..=L_MAX {
            let zeta = l as f64 * tau;
            if zeta > 120.0 {
                break;
            }
            let xi = omega_c * zeta;
            let coeffs = resolved.coeffs(xi);
            let integrand = |y: f64| -> f64 {
                let (tm, te) = match &coeffs {
                    Coeffs::Std(eps) => (rtm_textbook(*eps, zeta, y), rte_textbook(*eps, zeta, y)),
                    Coeffs::Screened { eps, epst, eps0, ka } => (
                        rtm_modified(*eps, *epst, *eps0, *ka, zeta, y),
                        rte_textbook(*epst, zeta, y),
                    ),
                };
                (-y).exp() * ((2.0 * y * y - zeta * zeta) * tm - zeta * zeta * te)
            };
            let eps_abs = 5e-13 * (-zeta).exp();
            let alpha_red = 1.0 / (1.0 + beta * beta * zeta * zeta);
            acc.add(alpha_red * adaptive_simpson(&integrand, zeta, zeta + 80.0, eps_abs));
        }

        -K_B * t * alpha0 * (acc.sum + acc.err) / (8.0 * a.powi(3))
    }

    /// Brute-force zero-temperature energy by nested adaptive quadrature.
    pub fn energy_t0(wall: &WallModel, atom: &AtomModel, a: f64) -> f64 {
        let resolved = Resolved::new(wall, a, 0.0);
        let omega_c = C / (2.0 * a);
        let (alpha0, beta) = (atom.alpha0, atom.beta);
        let outer = |zeta: f64| -> f64 {
            let coeffs = resolved.coeffs(omega_c * zeta);
            let integrand = |y: f64| -> f64 {
                let (tm, te) = match &coeffs {
                    Coeffs::Std(eps) => (rtm_textbook(*eps, zeta, y), rte_textbook(*eps, zeta, y)),
                    Coeffs::Screened { eps, epst, eps0, ka } => (
                        rtm_modified(*eps, *epst, *eps0, *ka, zeta, y),
                        rte_textbook(*epst, zeta, y),
                    ),
                };
                (-y).exp() * ((2.0 * y * y - zeta * zeta) * tm - zeta * zeta * te)
            };
            let alpha_red = 1.0 / (1.0 + beta * beta * zeta * zeta);
            alpha_red * adaptive_simpson(&integrand, zeta, zeta + 80.0, 1e-12 * (-zeta).exp())
        };
        let integral = adaptive_simpson(&outer, 1e-12, 80.0, 1e-12);
        -HBAR * C * alpha0 * integral / (32.0 * std::f64::consts::PI * a.powi(4))
    }
}
