//! Seeded synthetic project datasets.
//!
//! Each row draws eight environmental ratings uniformly from 0..=5 and a UCP
//! size from a right-skewed positive distribution. Productivity follows a
//! latent linear rule on the ratings, `-(sum of E_i * ew_i)` with the default
//! environmental weights, plus Gaussian noise; the latent values are then
//! rescaled so the sample mean and standard deviation hit the profile
//! targets exactly. Effort is productivity times UCP.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use super::dataset::ProjectRecord;
use crate::error::{Error, Result};
use crate::ucp::{EnvRatings, DEFAULT_ENVIRONMENTAL_WEIGHTS, ENVIRONMENTAL_FACTORS, MAX_RATING};

pub const MIN_ROWS: usize = 10;
/// Rows of the first and second profile in a merged dataset.
pub const MERGE_RATIO: (usize, usize) = (45, 65);

const MIN_PRODUCTIVITY: f64 = 1.0;

/// One lognormal mixture component, given by its own mean and sd.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UcpComponent {
    pub weight: f64,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub productivity_mean: f64,
    pub productivity_sd: f64,
    /// Share of latent productivity variance explained by the ratings.
    pub signal_share: f64,
    /// Rows are allotted to components in proportion to their weights.
    pub ucp: Vec<UcpComponent>,
}

impl ProfileSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.productivity_mean) || !positive(self.productivity_sd) {
            return Err(Error::Config(
                "profile productivity mean and sd must be positive".into(),
            ));
        }
        if !(self.signal_share > 0.0 && self.signal_share <= 1.0) {
            return Err(Error::Config("profile signal_share must be in (0, 1]".into()));
        }
        if self.ucp.is_empty()
            || self
                .ucp
                .iter()
                .any(|c| !positive(c.weight) || !positive(c.mean) || !(c.sd >= 0.0 && c.sd.is_finite()))
        {
            return Err(Error::Config(
                "profile ucp components need positive weight and mean, nonnegative sd".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Dataset1,
    Dataset2,
    /// Dataset1 and Dataset2 rows concatenated in 45:65 proportion.
    Dataset3,
    Custom(ProfileSpec),
}

impl Profile {
    /// Generator parameters for the single-source profiles.
    pub fn spec(&self) -> Option<ProfileSpec> {
        match self {
            Profile::Dataset1 => Some(ProfileSpec {
                productivity_mean: 24.1,
                productivity_sd: 5.1,
                signal_share: 0.85,
                // Mostly mid-sized projects plus a few very large ones; the
                // mixture lands near mean 739, sd 1564, skewness 3, kurtosis 12.
                ucp: vec![
                    UcpComponent {
                        weight: 41.0,
                        mean: 250.0,
                        sd: 120.0,
                    },
                    UcpComponent {
                        weight: 4.0,
                        mean: 5600.0,
                        sd: 1000.0,
                    },
                ],
            }),
            Profile::Dataset2 => Some(ProfileSpec {
                productivity_mean: 20.8,
                productivity_sd: 4.8,
                signal_share: 0.75,
                ucp: vec![UcpComponent {
                    weight: 1.0,
                    mean: 82.6,
                    sd: 20.7,
                }],
            }),
            Profile::Dataset3 => None,
            Profile::Custom(spec) => Some(spec.clone()),
        }
    }

    /// Row count of the source dataset this profile imitates.
    pub fn reference_size(&self) -> Option<usize> {
        match self {
            Profile::Dataset1 => Some(MERGE_RATIO.0),
            Profile::Dataset2 => Some(MERGE_RATIO.1),
            Profile::Dataset3 => Some(MERGE_RATIO.0 + MERGE_RATIO.1),
            Profile::Custom(_) => None,
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dataset1" => Ok(Profile::Dataset1),
            "dataset2" => Ok(Profile::Dataset2),
            "dataset3" => Ok(Profile::Dataset3),
            other => Err(Error::Config(format!(
                "unknown profile {other:?}; expected dataset1, dataset2, dataset3 or a custom profile from the config file"
            ))),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Dataset1 => "dataset1",
            Profile::Dataset2 => "dataset2",
            Profile::Dataset3 => "dataset3",
            Profile::Custom(_) => "custom",
        })
    }
}

fn sub_seed(seed: u64, stream: u64) -> u64 {
    seed.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn round_to(v: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits);
    (v * scale).round() / scale
}

/// Split `n` into counts proportional to `weights` (largest remainder).
fn allot(n: usize, weights: &[f64]) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| w / total * n as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let short = n - counts.iter().sum::<usize>();
    for &k in order.iter().take(short) {
        counts[k] += 1;
    }
    counts
}

fn lognormal(mean: f64, sd: f64) -> Result<LogNormal<f64>> {
    let s2 = (1.0 + (sd / mean).powi(2)).ln();
    LogNormal::new(mean.ln() - s2 / 2.0, s2.sqrt())
        .map_err(|e| Error::Config(format!("ucp component: {e}")))
}

fn generate_single(spec: &ProfileSpec, n: usize, seed: u64, id_prefix: &str) -> Result<Vec<ProjectRecord>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut sizes = Vec::with_capacity(n);
    let weights: Vec<f64> = spec.ucp.iter().map(|c| c.weight).collect();
    for (component, count) in spec.ucp.iter().zip(allot(n, &weights)) {
        let dist = lognormal(component.mean, component.sd)?;
        for _ in 0..count {
            sizes.push(dist.sample(&mut rng));
        }
    }
    sizes.shuffle(&mut rng);

    let rating_variance = {
        let k = MAX_RATING as f64 + 1.0;
        (k * k - 1.0) / 12.0
    };
    let signal_variance: f64 = DEFAULT_ENVIRONMENTAL_WEIGHTS
        .iter()
        .map(|w| w * w * rating_variance)
        .sum();
    let noise_sd = (signal_variance * (1.0 - spec.signal_share) / spec.signal_share).sqrt();
    let noise = Normal::new(0.0, noise_sd).map_err(|e| Error::Config(e.to_string()))?;

    let mut envs = Vec::with_capacity(n);
    let mut latent = Vec::with_capacity(n);
    for _ in 0..n {
        let mut e = [0u8; ENVIRONMENTAL_FACTORS];
        for slot in &mut e {
            *slot = rng.random_range(0..=MAX_RATING);
        }
        let signal: f64 = e
            .iter()
            .zip(DEFAULT_ENVIRONMENTAL_WEIGHTS)
            .map(|(&r, w)| r as f64 * w)
            .sum();
        latent.push(-signal + noise.sample(&mut rng));
        envs.push(EnvRatings::new(e)?);
    }

    let mean = latent.iter().sum::<f64>() / n as f64;
    let sd = (latent.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    (0..n)
        .map(|i| {
            let z = if sd > 0.0 { (latent[i] - mean) / sd } else { 0.0 };
            let mut productivity = spec.productivity_mean + spec.productivity_sd * z;
            if productivity < MIN_PRODUCTIVITY {
                log::debug!("synthetic productivity {productivity} raised to {MIN_PRODUCTIVITY}");
                productivity = MIN_PRODUCTIVITY;
            }
            let ucp = round_to(sizes[i], 2).max(0.01);
            let effort = round_to(productivity * ucp, 2).max(0.01);
            let id = format!("{id_prefix}{:03}", i + 1);
            ProjectRecord::new(id, envs[i], None, ucp, effort)
        })
        .collect()
}

/// Generate `n` rows for `profile`, deterministically from `seed`.
pub fn synth_generate(profile: &Profile, n: usize, seed: u64) -> Result<Vec<ProjectRecord>> {
    if n < MIN_ROWS {
        return Err(Error::TooFew {
            what: "synthetic rows",
            needed: MIN_ROWS,
            got: n,
        });
    }
    match profile {
        Profile::Dataset3 => {
            let (a, b) = MERGE_RATIO;
            let first = (n as f64 * a as f64 / (a + b) as f64).round() as usize;
            let spec1 = Profile::Dataset1.spec().expect("single-source profile");
            let spec2 = Profile::Dataset2.spec().expect("single-source profile");
            let mut rows = generate_single(&spec1, first, sub_seed(seed, 1), "d1-")?;
            rows.extend(generate_single(&spec2, n - first, sub_seed(seed, 2), "d2-")?);
            Ok(rows)
        }
        other => {
            let spec = other.spec().expect("single-source profile");
            generate_single(&spec, n, seed, "p")
        }
    }
}
