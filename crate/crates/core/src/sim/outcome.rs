//! Sixteen joint outcomes (x_A, y_A; x_B, y_B) and their b-values.

use std::fmt;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::quantum::povm::{LocalOutcome, Sign};

/// Serialized as its display form, e.g. `"(+,+;+,-)"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Outcome {
    pub a: LocalOutcome,
    pub b: LocalOutcome,
}

impl Outcome {
    pub const COUNT: usize = 16;

    pub fn new(xa: Sign, ya: Sign, xb: Sign, yb: Sign) -> Self {
        Outcome { a: LocalOutcome::new(xa, ya), b: LocalOutcome::new(xb, yb) }
    }

    /// Build from ±1 integers; `None` for anything else.
    pub fn from_values(xa: i32, ya: i32, xb: i32, yb: i32) -> Option<Self> {
        Some(Outcome::new(Sign::from_value(xa)?, Sign::from_value(ya)?, Sign::from_value(xb)?, Sign::from_value(yb)?))
    }

    /// All outcomes in canonical order: lexicographic in (x_A, y_A, x_B, y_B), + before −.
    pub fn all() -> impl Iterator<Item = Outcome> {
        (0..Self::COUNT).map(Outcome::from_index)
    }

    pub fn index(self) -> usize {
        4 * self.a.index() + self.b.index()
    }

    pub fn from_index(i: usize) -> Self {
        Outcome { a: LocalOutcome::ALL[i / 4], b: LocalOutcome::ALL[i % 4] }
    }

    pub fn values(self) -> [i32; 4] {
        [self.a.x.value(), self.a.y.value(), self.b.x.value(), self.b.y.value()]
    }

    /// Flip the signs selected by `mask` (bits: x_A, y_A, x_B, y_B from most significant).
    pub fn flipped(self, mask: u8) -> Self {
        let f = |s: Sign, bit: u8| if mask & bit != 0 { s.flip() } else { s };
        Outcome::new(f(self.a.x, 8), f(self.a.y, 4), f(self.b.x, 2), f(self.b.y, 1))
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{},{})", self.a.x.symbol(), self.a.y.symbol(), self.b.x.symbol(), self.b.y.symbol())
    }
}

impl std::str::FromStr for Outcome {
    type Err = String;

    /// Parses the display form, e.g. `(+,+;+,-)`; parentheses optional.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let signs: Vec<Sign> = inner
            .split([',', ';'])
            .map(|t| match t.trim() {
                "+" | "+1" | "1" => Ok(Sign::Plus),
                "-" | "-1" | "−" => Ok(Sign::Minus),
                other => Err(format!("bad sign {other:?} in outcome {s:?}")),
            })
            .collect::<Result<_, _>>()?;
        match signs[..] {
            [xa, ya, xb, yb] => Ok(Outcome::new(xa, ya, xb, yb)),
            _ => Err(format!("outcome {s:?} needs four signs")),
        }
    }
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Outcome {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// `x_A x_B − x_A y_B + y_A x_B + y_A y_B`, always ±2.
pub fn b_value(o: Outcome) -> i32 {
    let [xa, ya, xb, yb] = o.values();
    xa * xb - xa * yb + ya * xb + ya * yb
}

/// Outcomes whose probability can reach zero for the singlet: the first pair
/// at θ = 22.5°, the second at θ = 67.5°.
pub fn minimal_outcomes() -> [Outcome; 4] {
    use Sign::{Minus as M, Plus as P};
    [Outcome::new(P, P, P, M), Outcome::new(M, M, M, P), Outcome::new(M, P, P, P), Outcome::new(P, M, M, M)]
}
