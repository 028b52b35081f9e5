//! Decibel conversions and physical constants shared by every model.

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Reference temperature for noise figure, K.
pub const T0_KELVIN: f64 = 290.0;

/// Thermal noise floor kT at 290 K, dBm/Hz.
pub const THERMAL_FLOOR_DBM_HZ: f64 = -174.0;

/// Power ratio to decibels.
#[inline]
pub fn db_from_ratio(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Decibels to power ratio.
#[inline]
pub fn ratio_from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Amplitude (voltage) ratio to decibels.
#[inline]
pub fn db_from_amplitude(ratio: f64) -> f64 {
    20.0 * ratio.log10()
}

#[inline]
pub fn watts_from_dbm(dbm: f64) -> f64 {
    1e-3 * ratio_from_db(dbm)
}

#[inline]
pub fn dbm_from_watts(watts: f64) -> f64 {
    db_from_ratio(watts / 1e-3)
}
