//! Physical units attached to numeric types.
//!
//! The supported set is a closed table: lengths (m, mm, cm, km), times
//! (s, min, h), speeds (mm/s, m/s) and the dimensionless unit. Values are
//! carried in their declared unit; conversions go through the SI base unit
//! of the dimension.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dimension {
    Dimensionless,
    Length,
    Time,
    Speed,
}

impl Dimension {
    /// (length exponent, time exponent)
    fn exponents(self) -> (i8, i8) {
        match self {
            Dimension::Dimensionless => (0, 0),
            Dimension::Length => (1, 0),
            Dimension::Time => (0, 1),
            Dimension::Speed => (1, -1),
        }
    }

    fn from_exponents(exp: (i8, i8)) -> Option<Dimension> {
        match exp {
            (0, 0) => Some(Dimension::Dimensionless),
            (1, 0) => Some(Dimension::Length),
            (0, 1) => Some(Dimension::Time),
            (1, -1) => Some(Dimension::Speed),
            _ => None,
        }
    }

    pub fn si_symbol(self) -> &'static str {
        match self {
            Dimension::Dimensionless => "1",
            Dimension::Length => "m",
            Dimension::Time => "s",
            Dimension::Speed => "m/s",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Dimension::Dimensionless => "dimensionless",
            Dimension::Length => "length",
            Dimension::Time => "time",
            Dimension::Speed => "speed",
        };
        f.write_str(name)
    }
}

/// A unit: its dimension and the factor that converts a value in this unit
/// to the SI base unit of that dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unit {
    pub dimension: Dimension,
    pub scale: f64,
}

const TABLE: &[(&str, Dimension, f64)] = &[
    ("m", Dimension::Length, 1.0),
    ("mm", Dimension::Length, 0.001),
    ("cm", Dimension::Length, 0.01),
    ("km", Dimension::Length, 1000.0),
    ("s", Dimension::Time, 1.0),
    ("min", Dimension::Time, 60.0),
    ("h", Dimension::Time, 3600.0),
    ("mm/s", Dimension::Speed, 0.001),
    ("m/s", Dimension::Speed, 1.0),
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnitError {
    #[error("cannot convert between {from} and {to}")]
    DimensionMismatch { from: Dimension, to: Dimension },
}

impl Unit {
    pub const DIMENSIONLESS: Unit = Unit { dimension: Dimension::Dimensionless, scale: 1.0 };

    pub fn si(dimension: Dimension) -> Unit {
        Unit { dimension, scale: 1.0 }
    }

    /// Looks up a unit tag such as `"mm/s"`. The empty tag and `"1"` are
    /// dimensionless.
    pub fn parse(tag: &str) -> Option<Unit> {
        let tag = tag.trim();
        if tag.is_empty() || tag == "1" {
            return Some(Unit::DIMENSIONLESS);
        }
        TABLE
            .iter()
            .find(|(sym, _, _)| *sym == tag)
            .map(|&(_, dimension, scale)| Unit { dimension, scale })
    }

    /// All tags accepted by [`Unit::parse`].
    pub fn known_tags() -> impl Iterator<Item = &'static str> {
        TABLE.iter().map(|(sym, _, _)| *sym)
    }

    pub fn is_dimensionless(&self) -> bool {
        self.dimension == Dimension::Dimensionless
    }

    pub fn is_si(&self) -> bool {
        self.scale == 1.0
    }

    /// Symbol from the table, if this unit is one of the named ones.
    pub fn symbol(&self) -> Option<&'static str> {
        if self.is_dimensionless() {
            return None;
        }
        TABLE
            .iter()
            .find(|(_, d, s)| *d == self.dimension && *s == self.scale)
            .map(|(sym, _, _)| *sym)
    }

    /// Unit of `a * b` once both operands are in SI. `None` when the result
    /// falls outside the supported dimensions.
    pub fn product(a: Unit, b: Unit) -> Option<Unit> {
        let (la, ta) = a.dimension.exponents();
        let (lb, tb) = b.dimension.exponents();
        Dimension::from_exponents((la + lb, ta + tb)).map(Unit::si)
    }

    /// Unit of `a / b` once both operands are in SI.
    pub fn quotient(a: Unit, b: Unit) -> Option<Unit> {
        let (la, ta) = a.dimension.exponents();
        let (lb, tb) = b.dimension.exponents();
        Dimension::from_exponents((la - lb, ta - tb)).map(Unit::si)
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.symbol() {
            Some(sym) => f.write_str(sym),
            None if self.is_dimensionless() => f.write_str("dimensionless"),
            None => write!(f, "{} {}", self.scale, self.dimension.si_symbol()),
        }
    }
}

/// Expresses `x` (given in `from`) in `to`.
pub fn convert_unit(x: f64, from: Unit, to: Unit) -> Result<f64, UnitError> {
    if from.dimension != to.dimension {
        return Err(UnitError::DimensionMismatch { from: from.dimension, to: to.dimension });
    }
    if from.scale == to.scale {
        return Ok(x);
    }
    Ok(x * from.scale / to.scale)
}
