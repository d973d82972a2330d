//! Versioned JSON model artifacts.
//!
//! An artifact is one JSON object with a `format` tag, a `version`, and one
//! key per model section. Floats are written in shortest round-trip form, so
//! save -> load -> save reproduces the file byte for byte.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::pipeline::HybridModel;

pub const ARTIFACT_FORMAT: &str = "ucp-hybrid-model";
pub const ARTIFACT_VERSION: u32 = 1;
const SECTIONS: [&str; 5] = ["provenance", "tree", "labels", "classifier", "regressor"];

fn section_value<T: Serialize>(name: &str, value: &T) -> Result<Value> {
    serde_json::to_value(value).map_err(|e| Error::Artifact {
        section: name.to_string(),
        message: e.to_string(),
    })
}

pub fn model_to_string(model: &HybridModel) -> Result<String> {
    let mut root = Map::new();
    root.insert("format".into(), Value::from(ARTIFACT_FORMAT));
    root.insert("version".into(), Value::from(ARTIFACT_VERSION));
    root.insert("provenance".into(), section_value("provenance", &model.provenance)?);
    root.insert("tree".into(), section_value("tree", &model.tree)?);
    root.insert("labels".into(), section_value("labels", &model.labels)?);
    root.insert("classifier".into(), section_value("classifier", &model.classifier)?);
    root.insert("regressor".into(), section_value("regressor", &model.regressor)?);
    let mut text = serde_json::to_string_pretty(&Value::Object(root)).map_err(|e| Error::Artifact {
        section: "document".into(),
        message: e.to_string(),
    })?;
    text.push('\n');
    Ok(text)
}

fn take_section<T: DeserializeOwned>(root: &mut Map<String, Value>, name: &str) -> Result<T> {
    let value = root.remove(name).ok_or_else(|| Error::Artifact {
        section: name.to_string(),
        message: "section missing".into(),
    })?;
    serde_json::from_value(value).map_err(|e| Error::Artifact {
        section: name.to_string(),
        message: e.to_string(),
    })
}

pub fn model_from_str(text: &str) -> Result<HybridModel> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Artifact {
        section: "document".into(),
        message: format!("not a well-formed artifact: {e}"),
    })?;
    let Value::Object(mut root) = doc else {
        return Err(Error::Artifact {
            section: "document".into(),
            message: "top level is not an object".into(),
        });
    };
    match root.get("format") {
        Some(Value::String(f)) if f == ARTIFACT_FORMAT => {}
        other => {
            return Err(Error::Artifact {
                section: "format".into(),
                message: format!("expected {ARTIFACT_FORMAT:?}, found {other:?}"),
            })
        }
    }
    match root.get("version") {
        Some(v) if v.as_u64() == Some(ARTIFACT_VERSION as u64) => {}
        other => {
            return Err(Error::VersionMismatch {
                expected: ARTIFACT_VERSION,
                found: other.map_or_else(|| "nothing".to_string(), Value::to_string),
            })
        }
    }
    let known: Vec<&str> = SECTIONS.iter().copied().chain(["format", "version"]).collect();
    if let Some(extra) = root.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(Error::Artifact {
            section: extra.clone(),
            message: "unknown section".into(),
        });
    }
    let model = HybridModel {
        provenance: take_section(&mut root, "provenance")?,
        tree: take_section(&mut root, "tree")?,
        labels: take_section(&mut root, "labels")?,
        classifier: take_section(&mut root, "classifier")?,
        regressor: take_section(&mut root, "regressor")?,
    };
    model
        .check_consistency()
        .map_err(|(section, message)| Error::Artifact {
            section: section.to_string(),
            message,
        })?;
    Ok(model)
}

pub fn save_model(model: &HybridModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = model_to_string(model)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<HybridModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synth::{synth_generate, Profile};
    use crate::pipeline::{train_hybrid, HybridConfig};

    fn model() -> HybridModel {
        let rows = synth_generate(&Profile::Dataset2, 30, 8).unwrap();
        train_hybrid(&rows, &HybridConfig::default()).unwrap()
    }

    #[test]
    fn byte_identical_round_trip() {
        let m = model();
        let text = model_to_string(&m).unwrap();
        let back = model_from_str(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(model_to_string(&back).unwrap(), text);
    }

    #[test]
    fn truncated_and_tampered_files() {
        let text = model_to_string(&model()).unwrap();
        assert!(matches!(
            model_from_str(&text[..text.len() / 2]),
            Err(Error::Artifact { .. })
        ));

        let v2 = text.replacen("\"version\": 1", "\"version\": 2", 1);
        assert!(matches!(model_from_str(&v2), Err(Error::VersionMismatch { .. })));

        let mut doc: Value = serde_json::from_str(&text).unwrap();
        doc["regressor"]["weights"] = Value::from("oops");
        match model_from_str(&doc.to_string()) {
            Err(Error::Artifact { section, .. }) => assert_eq!(section, "regressor"),
            other => panic!("{other:?}"),
        }

        let mut doc: Value = serde_json::from_str(&text).unwrap();
        doc.as_object_mut().unwrap().remove("labels");
        match model_from_str(&doc.to_string()) {
            Err(Error::Artifact { section, .. }) => assert_eq!(section, "labels"),
            other => panic!("{other:?}"),
        }

        let mut doc: Value = serde_json::from_str(&text).unwrap();
        doc["classifier"]["classes"] = Value::from(vec![999]);
        match model_from_str(&doc.to_string()) {
            Err(Error::Artifact { section, .. }) => assert_eq!(section, "classifier"),
            other => panic!("{other:?}"),
        }
    }
}
