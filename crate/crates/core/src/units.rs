//! Unit-carrying scalars used throughout the cost model.
//!
//! Work is measured in abstract computational instructions ("inst"). Time is
//! kept in microseconds and processing power in inst/µs, which are the
//! working units of the 802.11a case studies; conversions to and from SI
//! units are provided at the edges.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A count of abstract computational instructions.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct CostUnits(pub u64);

impl CostUnits {
    pub const ZERO: CostUnits = CostUnits(0);

    pub fn count(self) -> u64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

impl Add for CostUnits {
    type Output = CostUnits;

    fn add(self, rhs: CostUnits) -> CostUnits {
        CostUnits(self.0 + rhs.0)
    }
}

impl AddAssign for CostUnits {
    fn add_assign(&mut self, rhs: CostUnits) {
        self.0 += rhs.0;
    }
}

impl Mul<u64> for CostUnits {
    type Output = CostUnits;

    fn mul(self, rhs: u64) -> CostUnits {
        CostUnits(self.0 * rhs)
    }
}

impl Sum for CostUnits {
    fn sum<I: Iterator<Item = CostUnits>>(iter: I) -> CostUnits {
        iter.fold(CostUnits::ZERO, Add::add)
    }
}

impl fmt::Display for CostUnits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} inst", self.0)
    }
}

/// A duration in microseconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Micros(pub f64);

impl Micros {
    pub const ZERO: Micros = Micros(0.0);

    /// Converts from seconds, quantized to whole picoseconds so that decimal
    /// timings such as 4 µs or 0.8 µs land on their exact binary value.
    pub fn from_secs(secs: f64) -> Self {
        Micros((secs * 1e12).round() / 1e6)
    }

    pub fn as_secs(self) -> f64 {
        (self.0 * 1e6).round() / 1e12
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Add for Micros {
    type Output = Micros;

    fn add(self, rhs: Micros) -> Micros {
        Micros(self.0 + rhs.0)
    }
}

impl fmt::Display for Micros {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} µs", self.0)
    }
}

/// Baseband processor throughput, in instructions per microsecond.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ProcessingPower {
    inst_per_us: f64,
}

impl ProcessingPower {
    pub fn from_inst_per_us(inst_per_us: f64) -> Result<Self> {
        if !(inst_per_us.is_finite() && inst_per_us > 0.0) {
            return Err(Error::domain(format!(
                "processing power must be positive and finite, got {inst_per_us} inst/µs"
            )));
        }
        Ok(ProcessingPower { inst_per_us })
    }

    pub fn from_inst_per_sec(inst_per_sec: f64) -> Result<Self> {
        Self::from_inst_per_us(inst_per_sec / 1e6)
    }

    pub fn inst_per_us(self) -> f64 {
        self.inst_per_us
    }

    pub fn inst_per_sec(self) -> f64 {
        self.inst_per_us * 1e6
    }

    /// Scales the throughput by a positive factor.
    pub fn scaled(self, factor: f64) -> Result<Self> {
        Self::from_inst_per_us(self.inst_per_us * factor)
    }
}

impl TryFrom<f64> for ProcessingPower {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::from_inst_per_us(value)
    }
}

impl From<ProcessingPower> for f64 {
    fn from(p: ProcessingPower) -> f64 {
        p.inst_per_us
    }
}

impl fmt::Display for ProcessingPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} inst/µs", self.inst_per_us)
    }
}
