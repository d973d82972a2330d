pub mod artifact;
pub mod dataset;
pub mod stats;
pub mod synth;

pub use artifact::{load_model, save_model};
pub use dataset::{load_dataset, read_dataset, save_dataset, write_dataset, LoadedDataset, ProjectRecord};
pub use stats::{describe, describe_values, DatasetStats, VariableStats};
pub use synth::{synth_generate, Profile, ProfileSpec, UcpComponent};
