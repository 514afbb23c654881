use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Admissible control value, |u1|, |u2| ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Control {
    pub u1: f64,
    pub u2: f64,
}

impl Control {
    pub const ZERO: Control = Control { u1: 0.0, u2: 0.0 };

    pub fn new(u1: f64, u2: f64) -> Result<Self> {
        if !(u1.abs() <= 1.0 && u2.abs() <= 1.0) {
            return Err(Error::ControlOutOfRange(u1, u2));
        }
        Ok(Self { u1, u2 })
    }

    pub fn neg(self) -> Self {
        Self { u1: -self.u1, u2: -self.u2 }
    }
}

/// The four bang controls. Doubles as the family tag of an extremal, named
/// after its initial control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bang {
    PP,
    PM,
    MM,
    MP,
}

pub type FamilyTag = Bang;

impl Bang {
    /// In the order the bang-bang cycle visits them.
    pub const ALL: [Bang; 4] = [Bang::PP, Bang::PM, Bang::MM, Bang::MP];

    pub fn signs(self) -> (f64, f64) {
        match self {
            Bang::PP => (1.0, 1.0),
            Bang::PM => (1.0, -1.0),
            Bang::MM => (-1.0, -1.0),
            Bang::MP => (-1.0, 1.0),
        }
    }

    pub fn control(self) -> Control {
        let (u1, u2) = self.signs();
        Control { u1, u2 }
    }

    pub fn from_signs(u1: f64, u2: f64) -> Bang {
        match (u1 >= 0.0, u2 >= 0.0) {
            (true, true) => Bang::PP,
            (true, false) => Bang::PM,
            (false, false) => Bang::MM,
            (false, true) => Bang::MP,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Successor along ++ → +− → −− → −+ → ++.
    pub fn next(self) -> Bang {
        Bang::ALL[(self.index() + 1) % 4]
    }

    /// The bang reached after `n` switchings.
    pub fn advance(self, n: usize) -> Bang {
        Bang::ALL[(self.index() + n) % 4]
    }

    /// Which switching function vanishes when leaving this bang:
    /// 2 for ++ and −−, 1 for +− and −+.
    pub fn switching_index(self) -> u8 {
        match self {
            Bang::PP | Bang::MM => 2,
            Bang::PM | Bang::MP => 1,
        }
    }

    /// PP and MM use the β branch of the switching formulas, PM and MP the π/2 − β branch.
    pub fn uses_beta_branch(self) -> bool {
        matches!(self, Bang::PP | Bang::MM)
    }

    pub fn name(self) -> &'static str {
        match self {
            Bang::PP => "pp",
            Bang::PM => "pm",
            Bang::MM => "mm",
            Bang::MP => "mp",
        }
    }
}

impl fmt::Display for Bang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Bang {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pp" | "++" => Ok(Bang::PP),
            "pm" | "+-" => Ok(Bang::PM),
            "mm" | "--" => Ok(Bang::MM),
            "mp" | "-+" => Ok(Bang::MP),
            _ => Err(Error::InvalidArgument(format!("unknown family '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub control: Control,
    pub duration: f64,
}

/// Piecewise-constant control: arcs applied in order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ControlSchedule {
    arcs: Vec<Arc>,
}

impl ControlSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, control: Control, duration: f64) -> Result<()> {
        Control::new(control.u1, control.u2)?;
        if !(duration >= 0.0) || !duration.is_finite() {
            return Err(Error::InvalidDuration(duration));
        }
        self.arcs.push(Arc { control, duration });
        Ok(())
    }

    pub fn with_arc(mut self, control: Control, duration: f64) -> Result<Self> {
        self.push(control, duration)?;
        Ok(self)
    }

    pub fn push_bang(&mut self, b: Bang, duration: f64) -> Result<()> {
        self.push(b.control(), duration)
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        self.arcs.iter().map(|a| a.duration).sum()
    }

    /// Cumulative times at which the control changes (interior arc ends).
    pub fn switch_times(&self) -> Vec<f64> {
        let mut t = 0.0;
        let mut out = Vec::new();
        for a in self.arcs.iter().take(self.arcs.len().saturating_sub(1)) {
            t += a.duration;
            out.push(t);
        }
        out
    }
}
