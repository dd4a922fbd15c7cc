//! Quantities with explicit units, converted to SI on ingest.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    Length,
    /// Angular frequency; Hz-type units are multiplied by 2 pi.
    Frequency,
    Rate,
    Temperature,
    Charge,
    Dipole,
    Quadrupole,
    Mass,
    Inertia,
    Time,
    Angle,
    /// London parameter in H m.
    London,
}

impl Dim {
    pub fn si_unit(self) -> &'static str {
        match self {
            Dim::Length => "m",
            Dim::Frequency => "rad/s",
            Dim::Rate => "1/s",
            Dim::Temperature => "K",
            Dim::Charge => "C",
            Dim::Dipole => "C m",
            Dim::Quadrupole => "C m^2",
            Dim::Mass => "kg",
            Dim::Inertia => "kg m^2",
            Dim::Time => "s",
            Dim::Angle => "rad",
            Dim::London => "H m",
        }
    }

    fn factor(self, unit: &str) -> Option<f64> {
        use surfnoise::constants::{AMU, DEBYE, E_CHARGE};
        let unit = unit.trim();
        let f = match (self, unit) {
            (Dim::Length, "m") => 1.0,
            (Dim::Length, "mm") => 1e-3,
            (Dim::Length, "um") | (Dim::Length, "µm") => 1e-6,
            (Dim::Length, "nm") => 1e-9,
            (Dim::Frequency, "rad/s") => 1.0,
            (Dim::Frequency, "Hz") => 2.0 * PI,
            (Dim::Frequency, "kHz") => 2.0 * PI * 1e3,
            (Dim::Frequency, "MHz") => 2.0 * PI * 1e6,
            (Dim::Frequency, "GHz") => 2.0 * PI * 1e9,
            (Dim::Frequency, "THz") => 2.0 * PI * 1e12,
            (Dim::Rate, "1/s") | (Dim::Rate, "s^-1") => 1.0,
            (Dim::Temperature, "K") => 1.0,
            (Dim::Temperature, "mK") => 1e-3,
            (Dim::Charge, "C") => 1.0,
            (Dim::Charge, "e") => E_CHARGE,
            (Dim::Dipole, "C m") => 1.0,
            (Dim::Dipole, "D") => DEBYE,
            (Dim::Dipole, "e nm") => E_CHARGE * 1e-9,
            (Dim::Quadrupole, "C m^2") => 1.0,
            (Dim::Quadrupole, "e nm^2") => E_CHARGE * 1e-18,
            (Dim::Mass, "kg") => 1.0,
            (Dim::Mass, "amu") | (Dim::Mass, "u") => AMU,
            (Dim::Inertia, "kg m^2") => 1.0,
            (Dim::Inertia, "amu nm^2") => AMU * 1e-18,
            (Dim::Time, "s") => 1.0,
            (Dim::Time, "ms") => 1e-3,
            (Dim::Time, "us") => 1e-6,
            (Dim::Time, "ns") => 1e-9,
            (Dim::Angle, "rad") => 1.0,
            (Dim::Angle, "deg") => PI / 180.0,
            (Dim::London, "H m") => 1.0,
            _ => return None,
        };
        Some(f)
    }
}

/// `{"value": .., "unit": ".."}` with a scalar or array value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quantity<V = f64> {
    pub value: V,
    pub unit: String,
}

pub type Vector = Quantity<[f64; 3]>;

fn factor(unit: &str, dim: Dim, field: &str) -> Result<f64, CliError> {
    dim.factor(unit)
        .ok_or_else(|| CliError::config(format!("{field}: unit '{unit}' is not a {dim:?} unit")))
}

impl Quantity<f64> {
    pub fn si(&self, dim: Dim, field: &str) -> Result<f64, CliError> {
        let v = self.value * factor(&self.unit, dim, field)?;
        if !v.is_finite() {
            return Err(CliError::config(format!("{field}: value must be finite")));
        }
        Ok(v)
    }

    /// Rewrites the quantity in SI units in place.
    pub fn normalize(&mut self, dim: Dim, field: &str) -> Result<f64, CliError> {
        let v = self.si(dim, field)?;
        *self = Quantity { value: v, unit: dim.si_unit().into() };
        Ok(v)
    }
}

impl<const N: usize> Quantity<[f64; N]> {
    pub fn si(&self, dim: Dim, field: &str) -> Result<[f64; N], CliError> {
        let f = factor(&self.unit, dim, field)?;
        let v = self.value.map(|x| x * f);
        if v.iter().any(|x| !x.is_finite()) {
            return Err(CliError::config(format!("{field}: values must be finite")));
        }
        Ok(v)
    }

    pub fn normalize(&mut self, dim: Dim, field: &str) -> Result<[f64; N], CliError> {
        let v = self.si(dim, field)?;
        *self = Quantity { value: v, unit: dim.si_unit().into() };
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(value: f64, unit: &str) -> Quantity {
        Quantity { value, unit: unit.into() }
    }

    #[test]
    fn conversions() {
        assert_eq!(q(4.0, "nm").si(Dim::Length, "d").unwrap(), 4e-9);
        assert_eq!(q(100.0, "mK").si(Dim::Temperature, "t").unwrap(), 0.1);
        assert_eq!(q(1.0, "GHz").si(Dim::Frequency, "w").unwrap(), 2.0 * PI * 1e9);
        assert_eq!(q(2.0, "D").si(Dim::Dipole, "p").unwrap(), 2.0 * surfnoise::constants::DEBYE);
        assert_eq!(q(90.0, "deg").si(Dim::Angle, "a").unwrap(), PI / 2.0);
    }

    #[test]
    fn wrong_dimension_is_a_config_error() {
        let e = q(1.0, "nm").si(Dim::Frequency, "omega").unwrap_err();
        assert_eq!(e.category(), "config");
        assert!(q(1.0, "parsec").si(Dim::Length, "d").is_err());
    }

    #[test]
    fn normalized_values_are_stable() {
        let mut a = q(5.5, "GHz");
        let v = a.normalize(Dim::Frequency, "w").unwrap();
        let mut b = a.clone();
        assert_eq!(b.normalize(Dim::Frequency, "w").unwrap(), v);
        assert_eq!(a, b);
    }
}
