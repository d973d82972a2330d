//! Use Case Points size computation.
//!
//! Actors and use cases are weighted by complexity class, summed into the
//! unadjusted size, and scaled by the technical complexity factor (TCF) and
//! the environmental factor (EF). No rounding is applied anywhere in the chain.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TECHNICAL_FACTORS: usize = 13;
pub const ENVIRONMENTAL_FACTORS: usize = 8;
pub const MAX_RATING: u8 = 5;

/// Literature-standard technical factor weights (T1..T13).
pub const DEFAULT_TECHNICAL_WEIGHTS: [f64; TECHNICAL_FACTORS] =
    [2.0, 1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0];

/// Literature-standard environmental factor weights (E1..E8).
pub const DEFAULT_ENVIRONMENTAL_WEIGHTS: [f64; ENVIRONMENTAL_FACTORS] =
    [1.5, 0.5, 1.0, 0.5, 1.0, 2.0, -1.0, -1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ActorCounts {
    pub simple: u32,
    pub average: u32,
    pub complex: u32,
}

impl ActorCounts {
    pub fn new(simple: u32, average: u32, complex: u32) -> Self {
        Self {
            simple,
            average,
            complex,
        }
    }

    pub fn total(&self) -> u64 {
        self.simple as u64 + self.average as u64 + self.complex as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct UseCaseCounts {
    pub simple: u32,
    pub average: u32,
    pub complex: u32,
}

impl UseCaseCounts {
    pub fn new(simple: u32, average: u32, complex: u32) -> Self {
        Self {
            simple,
            average,
            complex,
        }
    }

    pub fn total(&self) -> u64 {
        self.simple as u64 + self.average as u64 + self.complex as u64
    }

    /// Tally use cases from their transaction counts.
    pub fn from_transactions(transactions: &[u32]) -> Self {
        let mut counts = Self::default();
        for &t in transactions {
            match classify_use_case(t) {
                UseCaseClass::Simple => counts.simple += 1,
                UseCaseClass::Average => counts.average += 1,
                UseCaseClass::Complex => counts.complex += 1,
            }
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UseCaseClass {
    Simple,
    Average,
    Complex,
}

impl fmt::Display for UseCaseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UseCaseClass::Simple => "simple",
            UseCaseClass::Average => "average",
            UseCaseClass::Complex => "complex",
        })
    }
}

fn check_ratings(values: &[u8], kind: &str) -> Result<()> {
    if let Some((i, v)) = values.iter().enumerate().find(|(_, &v)| v > MAX_RATING) {
        return Err(Error::invalid(format!(
            "{kind} rating {} is {v}, expected an integer in 0..=5",
            i + 1
        )));
    }
    Ok(())
}

/// Ratings E1..E8, each an integer in `0..=5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct EnvRatings([u8; ENVIRONMENTAL_FACTORS]);

impl EnvRatings {
    pub fn new(values: [u8; ENVIRONMENTAL_FACTORS]) -> Result<Self> {
        check_ratings(&values, "environmental")?;
        Ok(Self(values))
    }

    pub fn from_slice(values: &[u8]) -> Result<Self> {
        let arr: [u8; ENVIRONMENTAL_FACTORS] = values.try_into().map_err(|_| {
            Error::invalid(format!(
                "expected {ENVIRONMENTAL_FACTORS} environmental ratings, got {}",
                values.len()
            ))
        })?;
        Self::new(arr)
    }

    pub fn values(&self) -> &[u8; ENVIRONMENTAL_FACTORS] {
        &self.0
    }
}

impl TryFrom<Vec<u8>> for EnvRatings {
    type Error = Error;
    fn try_from(v: Vec<u8>) -> Result<Self> {
        Self::from_slice(&v)
    }
}

impl From<EnvRatings> for Vec<u8> {
    fn from(r: EnvRatings) -> Self {
        r.0.to_vec()
    }
}

/// Ratings T1..T13, each an integer in `0..=5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct TechRatings([u8; TECHNICAL_FACTORS]);

impl TechRatings {
    pub fn new(values: [u8; TECHNICAL_FACTORS]) -> Result<Self> {
        check_ratings(&values, "technical")?;
        Ok(Self(values))
    }

    pub fn from_slice(values: &[u8]) -> Result<Self> {
        let arr: [u8; TECHNICAL_FACTORS] = values.try_into().map_err(|_| {
            Error::invalid(format!(
                "expected {TECHNICAL_FACTORS} technical ratings, got {}",
                values.len()
            ))
        })?;
        Self::new(arr)
    }

    pub fn values(&self) -> &[u8; TECHNICAL_FACTORS] {
        &self.0
    }
}

impl TryFrom<Vec<u8>> for TechRatings {
    type Error = Error;
    fn try_from(v: Vec<u8>) -> Result<Self> {
        Self::from_slice(&v)
    }
}

impl From<TechRatings> for Vec<u8> {
    fn from(r: TechRatings) -> Self {
        r.0.to_vec()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FactorRatings {
    pub technical: TechRatings,
    pub environmental: EnvRatings,
}

impl FactorRatings {
    pub fn new(technical: TechRatings, environmental: EnvRatings) -> Self {
        Self {
            technical,
            environmental,
        }
    }
}

/// Factor weights used by the TCF and EF formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightTable {
    pub technical: [f64; TECHNICAL_FACTORS],
    pub environmental: [f64; ENVIRONMENTAL_FACTORS],
}

impl Default for WeightTable {
    fn default() -> Self {
        Self {
            technical: DEFAULT_TECHNICAL_WEIGHTS,
            environmental: DEFAULT_ENVIRONMENTAL_WEIGHTS,
        }
    }
}

impl WeightTable {
    pub fn validate(&self) -> Result<()> {
        if self
            .technical
            .iter()
            .chain(self.environmental.iter())
            .any(|w| !w.is_finite())
        {
            return Err(Error::Config("weights must be finite".into()));
        }
        Ok(())
    }

    /// Parse a table from TOML text with `technical = [13 reals]` and
    /// `environmental = [8 reals]`.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: WeightTable =
            toml::from_str(text).map_err(|e| Error::Config(format!("weight table: {e}")))?;
        table.validate()?;
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn technical_sum(&self) -> f64 {
        self.technical.iter().sum()
    }

    pub fn environmental_sum(&self) -> f64 {
        self.environmental.iter().sum()
    }
}

/// Every intermediate quantity of the size computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UcpBreakdown {
    pub uaw: f64,
    pub uuc: f64,
    pub uucp: f64,
    pub tcf: f64,
    pub ef: f64,
    pub ucp: f64,
}

pub fn compute_uaw(actors: ActorCounts) -> f64 {
    actors.simple as f64 + 2.0 * actors.average as f64 + 3.0 * actors.complex as f64
}

pub fn compute_uuc(usecases: UseCaseCounts) -> f64 {
    5.0 * usecases.simple as f64 + 10.0 * usecases.average as f64 + 15.0 * usecases.complex as f64
}

pub fn compute_uucp(actors: ActorCounts, usecases: UseCaseCounts) -> f64 {
    compute_uaw(actors) + compute_uuc(usecases)
}

pub fn classify_use_case(transactions: u32) -> UseCaseClass {
    match transactions {
        0..=3 => UseCaseClass::Simple,
        4..=7 => UseCaseClass::Average,
        _ => UseCaseClass::Complex,
    }
}

pub fn compute_tcf(ratings: &FactorRatings, weights: &WeightTable) -> f64 {
    let sum: f64 = ratings
        .technical
        .values()
        .iter()
        .zip(weights.technical.iter())
        .map(|(&f, &w)| f as f64 * w)
        .sum();
    0.6 + 0.01 * sum
}

pub fn compute_ef(ratings: &FactorRatings, weights: &WeightTable) -> f64 {
    environmental_factor(&ratings.environmental, weights)
}

pub(crate) fn weighted_env_sum(env: &EnvRatings, weights: &WeightTable) -> f64 {
    env.values()
        .iter()
        .zip(weights.environmental.iter())
        .map(|(&e, &w)| e as f64 * w)
        .sum()
}

pub fn environmental_factor(env: &EnvRatings, weights: &WeightTable) -> f64 {
    1.4 - 0.03 * weighted_env_sum(env, weights)
}

/// Adjusted size from its three factors.
pub fn adjusted_size(uucp: f64, tcf: f64, ef: f64) -> f64 {
    uucp * tcf * ef
}

pub fn compute_ucp(
    actors: ActorCounts,
    usecases: UseCaseCounts,
    ratings: &FactorRatings,
    weights: &WeightTable,
) -> Result<UcpBreakdown> {
    if actors.total() == 0 {
        return Err(Error::invalid("model has no actors"));
    }
    if usecases.total() == 0 {
        return Err(Error::invalid("model has no use cases"));
    }
    weights.validate()?;
    let uaw = compute_uaw(actors);
    let uuc = compute_uuc(usecases);
    let uucp = uaw + uuc;
    let tcf = compute_tcf(ratings, weights);
    let ef = compute_ef(ratings, weights);
    let ucp = adjusted_size(uucp, tcf, ef);
    if !(ucp > 0.0) {
        return Err(Error::invalid(format!(
            "adjusted size is {ucp} (TCF {tcf}, EF {ef}); check the weight table"
        )));
    }
    Ok(UcpBreakdown {
        uaw,
        uuc,
        uucp,
        tcf,
        ef,
        ucp,
    })
}
