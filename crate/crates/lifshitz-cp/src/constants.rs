//! Physical constants in Gaussian (cgs) units.

/// Fundamental constants used throughout the crate.
///
/// All internal computations are carried out in Gaussian units: lengths in
/// cm, energies in erg, frequencies in rad/s, charge in statC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Boltzmann constant, erg/K.
    pub k_b: f64,
    /// Reduced Planck constant, erg s.
    pub hbar: f64,
    /// Speed of light, cm/s.
    pub c: f64,
    /// Elementary charge, statC.
    pub e: f64,
}

/// CODATA 2018 values (the charge is the exact SI value converted to esu).
pub const CGS: PhysicalConstants = PhysicalConstants {
    k_b: 1.380_649e-16,
    hbar: 1.054_571_817e-27,
    c: 2.997_924_58e10,
    e: 4.803_204_712_570_263e-10,
};

/// One electron-volt in erg.
pub const EV_ERG: f64 = 1.602_176_634e-12;

/// Converts a photon energy in eV to an angular frequency in rad/s.
pub fn ev_to_rad_s(ev: f64) -> f64 {
    ev * EV_ERG / CGS.hbar
}
