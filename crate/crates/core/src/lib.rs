//! Sentiment classification for Indonesian social-media comments.
//!
//! The crate covers the whole pipeline: corpus loading and stratified
//! splitting ([`ingest`]), text cleaning and Nazief–Adriani stemming
//! ([`preprocess`]), integer encoding ([`vocab`]), a from-scratch LSTM
//! classifier with hand-written backpropagation through time ([`nn`]),
//! the training loop ([`train`]), classical baselines ([`baselines`]) and
//! the confusion-matrix based evaluation harness ([`eval`]).

pub mod baselines;
pub mod eval;
pub mod ingest;
pub mod nn;
pub mod plot;
pub mod preprocess;
pub mod train;
pub mod vocab;

pub use ingest::{Dataset, Label, LabeledComment, SplitSpec};
pub use preprocess::{PreprocessConfig, TokenList};
pub use vocab::{EncodedSequence, Vocabulary};
