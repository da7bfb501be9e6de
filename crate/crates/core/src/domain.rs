//! Declared value spaces and their discretized domains.

use std::collections::HashSet;

use thiserror::Error;

use crate::units::Unit;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TypeError {
    #[error("empty range [{lo}, {hi}]: lower bound must be below upper bound")]
    EmptyRange { lo: f64, hi: f64 },
    #[error("precision must be positive, got {0}")]
    NonPositivePrecision(f64),
    #[error("precision {precision} exceeds the range width {width}")]
    PrecisionTooCoarse { precision: f64, width: f64 },
    #[error("range bounds and precision must be finite")]
    NonFinite,
    #[error("unknown unit \"{0}\"")]
    UnknownUnit(String),
    #[error("duplicate enum literal `{0}`")]
    DuplicateLiteral(String),
    #[error("duplicate enum code {0}")]
    DuplicateCode(i64),
    #[error("enum `{0}` has no literals")]
    EmptyEnum(String),
}

/// A bounded, discretized range of numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericType {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub precision: f64,
    pub unit_tag: Option<String>,
    unit: Unit,
    decimals: i32,
}

/// Number of decimal digits needed to write `x` exactly (capped at 12).
fn decimals_of(x: f64) -> i32 {
    let mut scaled = x.abs();
    for d in 0..12 {
        if (scaled - scaled.round()).abs() <= 1e-9 * scaled.max(1.0) {
            return d;
        }
        scaled *= 10.0;
    }
    12
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let f = 10f64.powi(decimals);
    (x * f).round() / f
}

impl NumericType {
    pub fn new(
        name: impl Into<String>,
        lo: f64,
        hi: f64,
        precision: f64,
        unit_tag: Option<String>,
    ) -> Result<Self, TypeError> {
        if !(lo.is_finite() && hi.is_finite() && precision.is_finite()) {
            return Err(TypeError::NonFinite);
        }
        if lo >= hi {
            return Err(TypeError::EmptyRange { lo, hi });
        }
        if precision <= 0.0 {
            return Err(TypeError::NonPositivePrecision(precision));
        }
        // tolerate representation error when the step equals the width
        if precision > (hi - lo) * (1.0 + 1e-9) {
            return Err(TypeError::PrecisionTooCoarse { precision, width: hi - lo });
        }
        let unit = match &unit_tag {
            Some(tag) => Unit::parse(tag).ok_or_else(|| TypeError::UnknownUnit(tag.clone()))?,
            None => Unit::DIMENSIONLESS,
        };
        let decimals = decimals_of(precision).max(decimals_of(lo));
        Ok(NumericType { name: name.into(), lo, hi, precision, unit_tag, unit, decimals })
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    /// floor((hi - lo) / precision) + 1, tolerant to representation error
    /// of decimal steps such as 0.1.
    pub fn cardinality(&self) -> usize {
        let steps = (self.hi - self.lo) / self.precision;
        (steps + 1e-9).floor() as usize + 1
    }

    /// Whether every grid point is an integer.
    pub fn is_integral(&self) -> bool {
        self.lo.fract() == 0.0 && self.precision.fract() == 0.0
    }

    pub fn grid_value(&self, index: usize) -> f64 {
        round_to(self.lo + index as f64 * self.precision, self.decimals)
    }

    /// Index of the grid point nearest to `x`, clamping outside values.
    pub fn nearest_index(&self, x: f64) -> usize {
        let raw = ((x - self.lo) / self.precision).round();
        if raw <= 0.0 || raw.is_nan() {
            0
        } else {
            (raw as usize).min(self.cardinality() - 1)
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let tol = self.precision / 2.0;
        x >= self.lo - tol && x <= self.grid_value(self.cardinality() - 1) + tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumLiteral {
    pub name: String,
    pub code: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumType {
    pub name: String,
    pub literals: Vec<EnumLiteral>,
}

impl EnumType {
    /// Builds an enum; literals without an explicit code get their 0-based
    /// position.
    pub fn new(
        name: impl Into<String>,
        literals: impl IntoIterator<Item = (String, Option<i64>)>,
    ) -> Result<Self, TypeError> {
        let name = name.into();
        let mut names = HashSet::new();
        let mut codes = HashSet::new();
        let mut out = Vec::new();
        for (i, (lit, code)) in literals.into_iter().enumerate() {
            let code = code.unwrap_or(i as i64);
            if !names.insert(lit.clone()) {
                return Err(TypeError::DuplicateLiteral(lit));
            }
            if !codes.insert(code) {
                return Err(TypeError::DuplicateCode(code));
            }
            out.push(EnumLiteral { name: lit, code });
        }
        if out.is_empty() {
            return Err(TypeError::EmptyEnum(name));
        }
        Ok(EnumType { name, literals: out })
    }

    pub fn code_of(&self, literal: &str) -> Option<i64> {
        self.literals.iter().find(|l| l.name == literal).map(|l| l.code)
    }

    pub fn literal_of(&self, code: i64) -> Option<&str> {
        self.literals.iter().find(|l| l.code == code).map(|l| l.name.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoolType {
    pub name: String,
}

/// Any declared type.
#[derive(Debug, Clone, PartialEq)]
pub enum ValueType {
    Numeric(NumericType),
    Enum(EnumType),
    Bool(BoolType),
}

impl ValueType {
    pub fn name(&self) -> &str {
        match self {
            ValueType::Numeric(t) => &t.name,
            ValueType::Enum(t) => &t.name,
            ValueType::Bool(t) => &t.name,
        }
    }

    pub fn unit(&self) -> Unit {
        match self {
            ValueType::Numeric(t) => t.unit(),
            _ => Unit::DIMENSIONLESS,
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            ValueType::Numeric(t) => discretize(t),
            ValueType::Enum(t) => {
                let mut codes: Vec<f64> = t.literals.iter().map(|l| l.code as f64).collect();
                codes.sort_by(f64::total_cmp);
                Domain { values: codes, tolerance: 0.5 }
            }
            ValueType::Bool(_) => Domain { values: vec![0.0, 1.0], tolerance: 0.5 },
        }
    }

    /// Clamps `x` into the type's range and moves it onto the nearest
    /// admissible value. Returns the snapped value and whether clamping
    /// was needed.
    pub fn snap(&self, x: f64) -> (f64, bool) {
        match self {
            ValueType::Numeric(t) => {
                let clamped = !t.contains(x);
                (t.grid_value(t.nearest_index(x)), clamped)
            }
            _ => {
                let d = self.domain();
                let clamped = !d.contains(x);
                (d.nearest(x), clamped)
            }
        }
    }

    /// Human-readable rendering of a value of this type.
    pub fn format_value(&self, x: f64) -> String {
        match self {
            ValueType::Enum(t) => match t.literal_of(x.round() as i64) {
                Some(name) => name.to_string(),
                None => format!("{x}"),
            },
            ValueType::Bool(_) => (x != 0.0).to_string(),
            ValueType::Numeric(_) => format!("{x}"),
        }
    }

    /// Parses a value written as a number, an enum literal or a boolean.
    pub fn parse_value(&self, text: &str) -> Option<f64> {
        let text = text.trim();
        match self {
            ValueType::Enum(t) => {
                t.code_of(text).map(|c| c as f64).or_else(|| text.parse::<f64>().ok())
            }
            ValueType::Bool(_) => match text {
                "true" => Some(1.0),
                "false" => Some(0.0),
                _ => text.parse::<f64>().ok(),
            },
            ValueType::Numeric(_) => text.parse::<f64>().ok(),
        }
    }
}

/// A finite, strictly increasing set of admissible values. Enum values are
/// their codes and booleans are 0/1.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    values: Vec<f64>,
    tolerance: f64,
}

impl Domain {
    /// Domain made of arbitrary values; they are sorted and deduplicated.
    pub fn from_values(mut values: Vec<f64>, tolerance: f64) -> Domain {
        values.sort_by(f64::total_cmp);
        values.dedup();
        Domain { values, tolerance }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Index of a member within the membership tolerance.
    pub fn position(&self, x: f64) -> Option<usize> {
        let i = self.nearest_index(x)?;
        ((self.values[i] - x).abs() <= self.tolerance).then_some(i)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.position(x).is_some()
    }

    fn nearest_index(&self, x: f64) -> Option<usize> {
        if self.values.is_empty() {
            return None;
        }
        let i = self.values.partition_point(|v| *v < x);
        if i == 0 {
            return Some(0);
        }
        if i == self.values.len() {
            return Some(i - 1);
        }
        if (self.values[i] - x).abs() < (x - self.values[i - 1]).abs() {
            Some(i)
        } else {
            Some(i - 1)
        }
    }

    /// Nearest member; NaN for an empty domain.
    pub fn nearest(&self, x: f64) -> f64 {
        self.nearest_index(x).map(|i| self.values[i]).unwrap_or(f64::NAN)
    }

    pub fn retain(&mut self, mut keep: impl FnMut(f64) -> bool) {
        self.values.retain(|v| keep(*v));
    }
}

/// The full grid `{lo, lo+precision, ...}` up to the last point not above `hi`.
pub fn discretize(t: &NumericType) -> Domain {
    let values = (0..t.cardinality()).map(|i| t.grid_value(i)).collect();
    Domain { values, tolerance: t.precision / 2.0 }
}
