//! Core channel-data types: complex CSI entries, per-measurement frames,
//! and timestamped traces, plus the amplitude/phase/RSS indicators derived
//! from them.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// One complex channel-frequency-response entry, in raw ADC-derived units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl ComplexValue {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    /// Modulus `sqrt(re^2 + im^2)`.
    pub fn amplitude(self) -> f64 {
        self.re.hypot(self.im)
    }

    /// Principal-value argument in (-pi, pi]; the zero entry maps to 0.
    pub fn phase(self) -> f64 {
        if self.re == 0.0 && self.im == 0.0 {
            return 0.0;
        }
        let p = self.im.atan2(self.re);
        // atan2 can return -pi for a negative real axis approached from below;
        // fold it onto the closed upper boundary.
        if p == -PI {
            PI
        } else {
            p
        }
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Log base used by the RSS indicator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    /// Base-2 indicator (the nonstandard but literal convention).
    #[default]
    Two,
    /// Conventional decibels.
    Ten,
}

/// RSS-style power indicator of an aggregate channel value:
/// `10 * log_base(|h|^2)`.
///
/// Base [`LogBase::Two`] is the literal definition; [`LogBase::Ten`] gives
/// conventional decibels.
pub fn rss_from_aggregate(h: ComplexValue, base: LogBase) -> Result<f64> {
    let power = h.re * h.re + h.im * h.im;
    if power <= 0.0 {
        return Err(Error::InvalidArgument(
            "rss_from_aggregate requires |h| > 0 (log of zero power)".into(),
        ));
    }
    let log2 = power.log2();
    Ok(match base {
        LogBase::Two => 10.0 * log2,
        LogBase::Ten => 10.0 * power.log10(),
    })
}

/// One timestamped CSI measurement: a complex matrix over
/// `subcarrier x rx x tx`, with optional receiver-side indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiFrame {
    /// Seconds, monotone within a trace.
    pub timestamp: f64,
    n_subcarriers: usize,
    n_rx: usize,
    n_tx: usize,
    /// Flat storage, `index = (sc * n_rx + rx) * n_tx + tx`.
    matrix: Vec<ComplexValue>,
    pub rssi_a: Option<f64>,
    pub rssi_b: Option<f64>,
    pub rssi_c: Option<f64>,
    pub agc: Option<u8>,
}

impl CsiFrame {
    /// Builds a frame and checks the dimension and finiteness invariants.
    pub fn new(
        timestamp: f64,
        n_subcarriers: usize,
        n_rx: usize,
        n_tx: usize,
        matrix: Vec<ComplexValue>,
    ) -> Result<Self> {
        if n_subcarriers == 0 {
            return Err(Error::InvalidArgument("n_subcarriers must be >= 1".into()));
        }
        if n_rx == 0 || n_tx == 0 {
            return Err(Error::InvalidArgument(
                "antenna counts must be >= 1".into(),
            ));
        }
        if !timestamp.is_finite() {
            return Err(Error::InvalidArgument("timestamp must be finite".into()));
        }
        let expected = n_subcarriers * n_rx * n_tx;
        if matrix.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "matrix has {} entries, dimensions {}x{}x{} require {}",
                matrix.len(),
                n_subcarriers,
                n_rx,
                n_tx,
                expected
            )));
        }
        if let Some(bad) = matrix.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "matrix entry {bad} is not finite"
            )));
        }
        Ok(Self {
            timestamp,
            n_subcarriers,
            n_rx,
            n_tx,
            matrix,
            rssi_a: None,
            rssi_b: None,
            rssi_c: None,
            agc: None,
        })
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    /// Flat index of `(subcarrier, rx, tx)` into [`CsiFrame::entries`].
    pub fn index_of(&self, subcarrier: usize, rx: usize, tx: usize) -> usize {
        (subcarrier * self.n_rx + rx) * self.n_tx + tx
    }

    pub fn entry(&self, subcarrier: usize, rx: usize, tx: usize) -> Option<ComplexValue> {
        if subcarrier >= self.n_subcarriers || rx >= self.n_rx || tx >= self.n_tx {
            return None;
        }
        Some(self.matrix[self.index_of(subcarrier, rx, tx)])
    }

    /// All complex entries in flat `(subcarrier, rx, tx)` order.
    pub fn entries(&self) -> &[ComplexValue] {
        &self.matrix
    }

    /// Per-entry modulus, in the same flat layout as [`CsiFrame::entries`].
    pub fn amplitude(&self) -> Vec<f64> {
        self.matrix.iter().map(|v| v.amplitude()).collect()
    }

    /// Per-entry principal-value phase in (-pi, pi], zero entry mapping to 0,
    /// in the same flat layout as [`CsiFrame::entries`].
    pub fn phase(&self) -> Vec<f64> {
        self.matrix.iter().map(|v| v.phase()).collect()
    }

    fn same_dimensions(&self, other: &CsiFrame) -> bool {
        self.n_subcarriers == other.n_subcarriers
            && self.n_rx == other.n_rx
            && self.n_tx == other.n_tx
    }
}

/// Subject, label, and session identity of a trace plus free-form attributes
/// (for example `gender`). Tokens must not contain whitespace so they survive
/// the text formats unescaped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TraceMetadata {
    pub subject_id: String,
    pub label: String,
    pub session: String,
    pub attributes: BTreeMap<String, String>,
}

/// An ordered sequence of CSI frames: the unit of classification.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    frames: Vec<CsiFrame>,
    /// Declared sampling rate in Hz (the prototype logs at 100 Hz).
    pub nominal_rate: f64,
    pub metadata: TraceMetadata,
}

impl Trace {
    /// Builds a trace, checking that timestamps strictly increase and that
    /// all frames share dimensions.
    pub fn new(frames: Vec<CsiFrame>, nominal_rate: f64, metadata: TraceMetadata) -> Result<Self> {
        if !(nominal_rate > 0.0) {
            return Err(Error::InvalidArgument("nominal_rate must be > 0".into()));
        }
        for pair in frames.windows(2) {
            if pair[1].timestamp <= pair[0].timestamp {
                return Err(Error::InvalidArgument(format!(
                    "timestamps must strictly increase ({} then {})",
                    pair[0].timestamp, pair[1].timestamp
                )));
            }
            if !pair[0].same_dimensions(&pair[1]) {
                return Err(Error::InvalidArgument(
                    "all frames of a trace must share dimensions".into(),
                ));
            }
        }
        Ok(Self {
            frames,
            nominal_rate,
            metadata,
        })
    }

    pub fn frames(&self) -> &[CsiFrame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// The amplitude of one `(subcarrier, rx, tx)` stream over time, as
    /// `(timestamp, amplitude)` pairs in frame order.
    pub fn amplitude_series(
        &self,
        subcarrier: usize,
        rx: usize,
        tx: usize,
    ) -> Result<Vec<(f64, f64)>> {
        if let Some(first) = self.frames.first() {
            if subcarrier >= first.n_subcarriers() || rx >= first.n_rx() || tx >= first.n_tx() {
                return Err(Error::IndexOutOfRange(format!(
                    "stream ({subcarrier},{rx},{tx}) outside {}x{}x{}",
                    first.n_subcarriers(),
                    first.n_rx(),
                    first.n_tx()
                )));
            }
        }
        Ok(self
            .frames
            .iter()
            .map(|f| {
                (
                    f.timestamp,
                    f.entry(subcarrier, rx, tx).expect("validated index").amplitude(),
                )
            })
            .collect())
    }
}
