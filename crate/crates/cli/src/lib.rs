//! Command implementations behind the `sentimen` binary. Each `cmd_*`
//! function echoes the resolved configuration into the output directory
//! before doing any work.

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{
    cmd_compare, cmd_evaluate, cmd_fetch, cmd_predict, cmd_preprocess, cmd_train, load_model, Context, EvalSource,
    LoadedModel, TrainSummary,
};
pub use config::{ClassWeights, RunConfig};
pub use error::CliError;
