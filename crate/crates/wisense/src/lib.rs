//! Device-free wireless sensing over WiFi channel state information.
//!
//! The crate turns CSI traces into gesture-class predictions:
//!
//! 1. [`fresnel`] plans transceiver geometry so gestures land in
//!    signal-enhancing zones;
//! 2. [`ingest`] decodes binary CSI logs and a portable text trace format,
//!    while [`sim`] synthesizes traces from a two-path channel model;
//! 3. [`preprocess`] repairs sampling gaps and low-pass filters the
//!    amplitude streams;
//! 4. [`features`] reduces each trace to seven statistics per stream;
//! 5. [`classify`] and [`eval`] run k-nearest-neighbor and naive Bayes
//!    classifiers under inset, cross-validation, person-dependent, and
//!    person-independent protocols.
//!
//! Each capability has a runnable demo under `examples/`; the `wisense`
//! binary chains them behind a small config-driven CLI.

pub mod csi;
pub mod error;
pub mod fresnel;
pub mod preprocess;

pub use csi::{ComplexValue, CsiFrame, LogBase, Trace, TraceMetadata};
pub use error::{Error, Result};
pub use fresnel::{FresnelLookupTable, Point2, TransceiverGeometry};
pub use preprocess::{AmplitudeTrace, FilterSpec};
