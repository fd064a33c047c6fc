use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Color-coded risk class, ordered from acceptable to not acceptable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RiskClass {
    Green,
    Yellow,
    Orange,
    Red,
}

impl RiskClass {
    pub const ALL: [RiskClass; 4] = [Self::Green, Self::Yellow, Self::Orange, Self::Red];

    /// 0 for Green up to 3 for Red.
    pub fn level(self) -> u8 {
        self as u8
    }

    pub fn from_level(level: u8) -> Option<Self> {
        Self::ALL.get(usize::from(level)).copied()
    }

    /// The fixed recommendation attached to each class.
    pub fn recommendation(self) -> &'static str {
        match self {
            Self::Green => "risk may be accepted if all other recommended measures are carefully implemented",
            Self::Yellow => "risk should be avoided if alternatives exist",
            Self::Orange => "risk should be taken only if it is unavoidable e. g. as part of necessary work",
            Self::Red => "risk should be taken only in exceptional circumstances e. g. emergency",
        }
    }

    /// Single-letter code used by the matrix text format.
    pub fn code(self) -> char {
        match self {
            Self::Green => 'G',
            Self::Yellow => 'Y',
            Self::Orange => 'O',
            Self::Red => 'R',
        }
    }

    pub fn from_code(code: char) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.code() == code)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Green => "green",
            Self::Yellow => "yellow",
            Self::Orange => "orange",
            Self::Red => "red",
        }
    }
}

impl fmt::Display for RiskClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RiskClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == lower || lower.len() == 1 && c.code().to_ascii_lowercase().to_string() == lower)
            .ok_or_else(|| format!("unknown risk class `{s}`"))
    }
}
