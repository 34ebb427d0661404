//! Coincidence-count tables: Poisson sampling, relative frequencies, and the
//! plain-text CSV exchange format.
//!
//! File layout (canonical outcome order, `+1`/`-1` signs):
//!
//! ```text
//! x_a,y_a,x_b,y_b,counts
//! +1,+1,+1,+1,10421
//! ...
//! # duration_s=10
//! ```

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::joint::JointDistribution;
use super::outcome::Outcome;
use super::poisson::sample_poisson;
use crate::error::{Error, Result};

pub const HEADER: &str = "x_a,y_a,x_b,y_b,counts";
const DURATION_KEY: &str = "# duration_s=";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountTable {
    pub counts: [u64; 16],
    pub duration_s: Option<f64>,
}

impl CountTable {
    pub fn new(counts: [u64; 16]) -> Self {
        CountTable { counts, duration_s: None }
    }

    pub fn get(&self, o: Outcome) -> u64 {
        self.counts[o.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Outcome, u64)> + '_ {
        Outcome::all().map(|o| (o, self.get(o)))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(24 * 18);
        s.push_str(HEADER);
        s.push('\n');
        for (o, n) in self.iter() {
            let [xa, ya, xb, yb] = o.values();
            let _ = writeln!(s, "{:+},{:+},{:+},{:+},{}", xa, ya, xb, yb, n);
        }
        if let Some(d) = self.duration_s {
            let _ = writeln!(s, "{DURATION_KEY}{d}");
        }
        s
    }

    /// Strict parser: exact header, sixteen distinct outcomes, non-negative
    /// integer counts. Blank lines and other `#` comments are ignored.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let header = lines.by_ref().find(|(_, l)| !l.is_empty());
        match header {
            Some((_, h)) if h.replace(' ', "") == HEADER => {}
            Some((n, h)) => {
                return Err(Error::CountFormat { line: n, msg: format!("expected header {HEADER:?}, found {h:?}") })
            }
            None => return Err(Error::CountFormat { line: 1, msg: "empty file".into() }),
        }

        let mut counts: [Option<u64>; 16] = [None; 16];
        let mut duration_s = None;
        for (n, line) in lines {
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix(DURATION_KEY) {
                let d: f64 = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::CountFormat { line: n, msg: format!("bad duration {rest:?}") })?;
                if !(d.is_finite() && d > 0.0) {
                    return Err(Error::CountFormat { line: n, msg: format!("duration must be positive, got {d}") });
                }
                duration_s = Some(d);
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(Error::CountFormat { line: n, msg: format!("expected 5 fields, found {}", fields.len()) });
            }
            let sign = |f: &str| -> Result<i32> {
                match f {
                    "+1" | "1" => Ok(1),
                    "-1" => Ok(-1),
                    other => Err(Error::CountFormat { line: n, msg: format!("bad sign {other:?}") }),
                }
            };
            let o = Outcome::from_values(sign(fields[0])?, sign(fields[1])?, sign(fields[2])?, sign(fields[3])?)
                .expect("signs validated");
            let c: u64 = fields[4]
                .parse()
                .map_err(|_| Error::CountFormat { line: n, msg: format!("bad count {:?}", fields[4]) })?;
            if counts[o.index()].replace(c).is_some() {
                return Err(Error::CountFormat { line: n, msg: format!("duplicate outcome {o}") });
            }
        }
        let mut out = [0u64; 16];
        for o in Outcome::all() {
            out[o.index()] = counts[o.index()].ok_or_else(|| Error::MissingOutcome(o.to_string()))?;
        }
        Ok(CountTable { counts: out, duration_s })
    }
}

/// Relative frequencies and their Poisson standard errors √N / ΣN.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatedDistribution {
    pub dist: JointDistribution,
    pub std_err: [f64; 16],
    pub total: u64,
}

/// Draws each outcome independently from Poisson(p(m)·mean_total) using a
/// ChaCha8 stream seeded with `seed`; outcomes are drawn in canonical order.
pub fn sample_counts(dist: &JointDistribution, mean_total: f64, seed: u64) -> Result<CountTable> {
    if !(mean_total.is_finite() && mean_total > 0.0) {
        return Err(Error::Domain { what: "mean total counts", value: mean_total });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = [0u64; 16];
    for (c, &p) in counts.iter_mut().zip(dist.probs.iter()) {
        *c = sample_poisson(&mut rng, p.max(0.0) * mean_total);
    }
    Ok(CountTable::new(counts))
}

pub fn probabilities_from_counts(table: &CountTable) -> Result<EstimatedDistribution> {
    let total = table.total();
    if total == 0 {
        return Err(Error::EmptyCounts);
    }
    let t = total as f64;
    let mut probs = [0.0; 16];
    let mut std_err = [0.0; 16];
    for (i, &n) in table.counts.iter().enumerate() {
        probs[i] = n as f64 / t;
        std_err[i] = (n as f64).sqrt() / t;
    }
    Ok(EstimatedDistribution { dist: JointDistribution { probs, settings: None }, std_err, total })
}
