//! Unit constants. Energies are carried in eV internally and times in ħ/eV.

/// e²/(4πε₀) in eV·Å.
pub const COULOMB_EV_ANGSTROM: f64 = 14.3996;

/// One micro-electronvolt in eV.
pub const MICRO_EV: f64 = 1e-6;

/// Ångström per nanometre.
pub const ANGSTROM_PER_NM: f64 = 10.0;

#[inline]
pub fn uev(x: f64) -> f64 {
    x * MICRO_EV
}

#[inline]
pub fn to_uev(x: f64) -> f64 {
    x / MICRO_EV
}
