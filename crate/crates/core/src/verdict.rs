use std::fmt;

use serde::{Deserialize, Serialize};

/// Three-valued satisfaction result.
///
/// Combination follows the strong Kleene tables: `Unknown` only survives
/// when the known operand does not already decide the result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Satisfied,
    Falsified,
    Unknown,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Satisfied
        } else {
            Verdict::Falsified
        }
    }

    pub fn is_known(self) -> bool {
        self != Verdict::Unknown
    }

    pub fn not(self) -> Self {
        match self {
            Verdict::Satisfied => Verdict::Falsified,
            Verdict::Falsified => Verdict::Satisfied,
            Verdict::Unknown => Verdict::Unknown,
        }
    }

    pub fn and(self, other: Self) -> Self {
        use Verdict::*;
        match (self, other) {
            (Falsified, _) | (_, Falsified) => Falsified,
            (Satisfied, Satisfied) => Satisfied,
            _ => Unknown,
        }
    }

    pub fn or(self, other: Self) -> Self {
        self.not().and(other.not()).not()
    }

    pub fn implies(self, other: Self) -> Self {
        self.not().or(other)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Satisfied => "Satisfied",
            Verdict::Falsified => "Falsified",
            Verdict::Unknown => "Unknown",
        };
        f.write_str(s)
    }
}
