//! Project datasets as delimited text with header
//! `id,e1..e8[,f1..f13],ucp,effort`.
//!
//! Productivity is never stored; it is always `effort / ucp`. A
//! `productivity` column in an input file is accepted and compared against
//! the recomputed value, with a warning on mismatch.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ucp::{EnvRatings, TechRatings, ENVIRONMENTAL_FACTORS, MAX_RATING, TECHNICAL_FACTORS};

/// Relative tolerance for a supplied productivity column.
pub const PRODUCTIVITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectRecord {
    pub id: String,
    pub env: EnvRatings,
    pub tech: Option<TechRatings>,
    pub ucp: f64,
    pub effort: f64,
    /// Hours per UCP, always `effort / ucp`.
    pub productivity: f64,
}

impl ProjectRecord {
    pub fn new(
        id: impl Into<String>,
        env: EnvRatings,
        tech: Option<TechRatings>,
        ucp: f64,
        effort: f64,
    ) -> Result<Self> {
        let id = id.into();
        if !(ucp > 0.0 && ucp.is_finite()) {
            return Err(Error::invalid(format!("project {id}: ucp must be positive, got {ucp}")));
        }
        if !(effort > 0.0 && effort.is_finite()) {
            return Err(Error::invalid(format!(
                "project {id}: effort must be positive, got {effort}"
            )));
        }
        Ok(Self {
            id,
            env,
            tech,
            ucp,
            effort,
            productivity: effort / ucp,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedDataset {
    pub records: Vec<ProjectRecord>,
    pub warnings: Vec<String>,
}

struct Columns {
    id: usize,
    env: [usize; ENVIRONMENTAL_FACTORS],
    tech: Option<[usize; TECHNICAL_FACTORS]>,
    ucp: usize,
    effort: usize,
    productivity: Option<usize>,
}

fn locate(headers: &csv::StringRecord) -> Result<Columns> {
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
    };
    let require = |name: &str| {
        find(name).ok_or_else(|| Error::Dataset {
            row: 0,
            column: name.to_string(),
            message: "missing column in header".into(),
        })
    };
    let mut env = [0; ENVIRONMENTAL_FACTORS];
    for (i, slot) in env.iter_mut().enumerate() {
        *slot = require(&format!("e{}", i + 1))?;
    }
    let tech_found: Vec<Option<usize>> = (1..=TECHNICAL_FACTORS)
        .map(|i| find(&format!("f{i}")))
        .collect();
    let tech = if tech_found.iter().all(Option::is_none) {
        None
    } else if let Some(missing) = tech_found.iter().position(Option::is_none) {
        return Err(Error::Dataset {
            row: 0,
            column: format!("f{}", missing + 1),
            message: "technical factor columns must be all present or all absent".into(),
        });
    } else {
        let mut cols = [0; TECHNICAL_FACTORS];
        for (slot, c) in cols.iter_mut().zip(tech_found) {
            *slot = c.expect("checked above");
        }
        Some(cols)
    };
    Ok(Columns {
        id: require("id")?,
        env,
        tech,
        ucp: require("ucp")?,
        effort: require("effort")?,
        productivity: find("productivity"),
    })
}

fn field<'r>(record: &'r csv::StringRecord, col: usize, row: usize, name: &str) -> Result<&'r str> {
    record.get(col).map(str::trim).ok_or_else(|| Error::Dataset {
        row,
        column: name.to_string(),
        message: "missing field".into(),
    })
}

fn parse_rating(text: &str, row: usize, column: &str) -> Result<u8> {
    match text.parse::<u8>() {
        Ok(v) if v <= MAX_RATING => Ok(v),
        _ => Err(Error::Dataset {
            row,
            column: column.to_string(),
            message: format!("rating {text:?} is not an integer in 0..={MAX_RATING}"),
        }),
    }
}

fn parse_positive(text: &str, row: usize, column: &str) -> Result<f64> {
    match text.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(Error::Dataset {
            row,
            column: column.to_string(),
            message: format!("{text:?} is not a positive number"),
        }),
    }
}

/// Parse a dataset. Row numbers in errors count data rows from 1.
pub fn read_dataset<R: Read>(reader: R) -> Result<LoadedDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let cols = locate(rdr.headers()?)?;
    let mut records = Vec::new();
    let mut warnings = Vec::new();

    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec?;
        let id = field(&rec, cols.id, row, "id")?.to_string();
        let mut env = [0u8; ENVIRONMENTAL_FACTORS];
        for (k, (&c, slot)) in cols.env.iter().zip(env.iter_mut()).enumerate() {
            let name = format!("e{}", k + 1);
            *slot = parse_rating(field(&rec, c, row, &name)?, row, &name)?;
        }
        let tech = match &cols.tech {
            None => None,
            Some(tc) => {
                let texts: Vec<&str> = tc
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| field(&rec, c, row, &format!("f{}", k + 1)))
                    .collect::<Result<_>>()?;
                if texts.iter().all(|t| t.is_empty()) {
                    None
                } else {
                    let mut vals = [0u8; TECHNICAL_FACTORS];
                    for (k, (t, slot)) in texts.iter().zip(vals.iter_mut()).enumerate() {
                        *slot = parse_rating(t, row, &format!("f{}", k + 1))?;
                    }
                    Some(TechRatings::new(vals)?)
                }
            }
        };
        let ucp = parse_positive(field(&rec, cols.ucp, row, "ucp")?, row, "ucp")?;
        let effort = parse_positive(field(&rec, cols.effort, row, "effort")?, row, "effort")?;
        let record = ProjectRecord::new(id, EnvRatings::new(env)?, tech, ucp, effort)?;

        if let Some(pc) = cols.productivity {
            let text = field(&rec, pc, row, "productivity")?;
            if !text.is_empty() {
                let supplied = parse_positive(text, row, "productivity")?;
                let rel = (supplied - record.productivity).abs() / record.productivity;
                if rel >= PRODUCTIVITY_TOLERANCE {
                    warnings.push(format!(
                        "row {row} ({}): supplied productivity {supplied} differs from effort/ucp = {}; using effort/ucp",
                        record.id, record.productivity
                    ));
                }
            }
        }
        records.push(record);
    }
    Ok(LoadedDataset { records, warnings })
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<LoadedDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let loaded = read_dataset(file)?;
    for w in &loaded.warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(loaded)
}

/// Write records; technical columns appear when any record carries them.
pub fn write_dataset<W: Write>(writer: W, records: &[ProjectRecord]) -> Result<()> {
    let with_tech = records.iter().any(|r| r.tech.is_some());
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["id".to_string()];
    header.extend((1..=ENVIRONMENTAL_FACTORS).map(|i| format!("e{i}")));
    if with_tech {
        header.extend((1..=TECHNICAL_FACTORS).map(|i| format!("f{i}")));
    }
    header.push("ucp".into());
    header.push("effort".into());
    w.write_record(&header)?;

    for r in records {
        let mut row = vec![r.id.clone()];
        row.extend(r.env.values().iter().map(u8::to_string));
        if with_tech {
            match &r.tech {
                Some(t) => row.extend(t.values().iter().map(u8::to_string)),
                None => row.extend(std::iter::repeat_n(String::new(), TECHNICAL_FACTORS)),
            }
        }
        row.push(r.ucp.to_string());
        row.push(r.effort.to_string());
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<dataset writer>", e))?;
    Ok(())
}

pub fn save_dataset(path: impl AsRef<Path>, records: &[ProjectRecord]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_dataset(file, records)
}
