//! Trace preprocessing: gap repair via linear interpolation onto a uniform
//! grid, and low-pass denoising of the amplitude streams with a Butterworth
//! filter designed by bilinear transform with frequency prewarping.

use std::f64::consts::PI;

use crate::csi::{ComplexValue, CsiFrame, Trace, TraceMetadata};
use crate::error::{Error, Result};

/// Low-pass filter parameters. The defaults are the deployed ones: 15 Hz
/// cutoff at 100 Hz sampling (normalized cutoff 2*pi*15/100 = 0.942
/// rad/sample), order 4, zero-phase application.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub cutoff_hz: f64,
    pub sample_rate: f64,
    pub order: usize,
    /// Apply forward then backward for squared magnitude and zero net phase.
    pub zero_phase: bool,
}

impl Default for FilterSpec {
    fn default() -> Self {
        Self {
            cutoff_hz: 15.0,
            sample_rate: 100.0,
            order: 4,
            zero_phase: true,
        }
    }
}

impl FilterSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate > 0.0) {
            return Err(Error::InvalidArgument("sample_rate must be > 0".into()));
        }
        if !(self.cutoff_hz > 0.0) || self.cutoff_hz >= self.sample_rate / 2.0 {
            return Err(Error::InvalidArgument(format!(
                "cutoff must satisfy 0 < cutoff < sample_rate/2, got {} at rate {}",
                self.cutoff_hz, self.sample_rate
            )));
        }
        if self.order == 0 {
            return Err(Error::InvalidArgument("order must be >= 1".into()));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Gap repair
// ---------------------------------------------------------------------------

/// Tolerance for treating a frame timestamp as lying on the target grid.
const GRID_TOL: f64 = 1e-9;

/// Resamples a trace onto a uniform grid at `target_rate` spanning its
/// original time range. Complex components are linearly interpolated between
/// bracketing frames; frames already on the grid are preserved exactly, so
/// the operation is idempotent on uniform input.
pub fn regularize(trace: &Trace, target_rate: f64) -> Result<Trace> {
    if !(target_rate > 0.0) {
        return Err(Error::InvalidArgument("target_rate must be > 0".into()));
    }
    let frames = trace.frames();
    if frames.len() < 2 {
        return Err(Error::InvalidArgument(
            "regularize needs at least 2 frames".into(),
        ));
    }
    let t0 = frames[0].timestamp;
    let span = frames.last().unwrap().timestamp - t0;
    let n_intervals = (span * target_rate + GRID_TOL).floor() as usize;

    let mut out = Vec::with_capacity(n_intervals + 1);
    let mut j = 0usize; // index of the first frame with timestamp >= t - tol
    for i in 0..=n_intervals {
        let t = t0 + i as f64 / target_rate;
        while j + 1 < frames.len() && frames[j].timestamp < t - GRID_TOL {
            j += 1;
        }
        if (frames[j].timestamp - t).abs() <= GRID_TOL {
            out.push(frames[j].clone());
            continue;
        }
        // frames[j - 1].timestamp < t < frames[j].timestamp
        let a = &frames[j - 1];
        let b = &frames[j];
        let w = (t - a.timestamp) / (b.timestamp - a.timestamp);
        let matrix: Vec<ComplexValue> = a
            .entries()
            .iter()
            .zip(b.entries())
            .map(|(va, vb)| {
                ComplexValue::new(va.re + (vb.re - va.re) * w, va.im + (vb.im - va.im) * w)
            })
            .collect();
        out.push(CsiFrame::new(
            t,
            a.n_subcarriers(),
            a.n_rx(),
            a.n_tx(),
            matrix,
        )?);
    }
    Trace::new(out, target_rate, trace.metadata.clone())
}

// ---------------------------------------------------------------------------
// Butterworth low-pass
// ---------------------------------------------------------------------------

/// One second-order section, denominator normalized to a0 = 1.
#[derive(Debug, Clone, Copy)]
struct Biquad {
    b0: f64,
    b1: f64,
    b2: f64,
    a1: f64,
    a2: f64,
}

impl Biquad {
    /// Direct form II transposed. The state starts at its steady value for a
    /// step held at the first sample, so a constant series passes through
    /// unchanged and startup transients stay bounded; the initialization is
    /// proportional to the first sample, which keeps the filter linear.
    fn run(&self, x: &mut [f64]) {
        let x0 = x.first().copied().unwrap_or(0.0);
        let mut s1 = (1.0 - self.b0) * x0;
        let mut s2 = (self.b2 - self.a2) * x0;
        for v in x.iter_mut() {
            let y = self.b0 * *v + s1;
            s1 = self.b1 * *v - self.a1 * y + s2;
            s2 = self.b2 * *v - self.a2 * y;
            *v = y;
        }
    }
}

/// Designs the cascade of second-order sections for a digital Butterworth
/// low-pass: analog prototype poles on the unit circle, scaled to the
/// prewarped cutoff, then mapped with the bilinear transform. Each section
/// has exact unity DC gain.
fn design_lowpass(spec: &FilterSpec) -> Vec<Biquad> {
    let n = spec.order;
    let fs = spec.sample_rate;
    // prewarp so the analog and digital responses agree at the cutoff
    let omega = 2.0 * fs * (PI * spec.cutoff_hz / fs).tan();
    let k = 2.0 * fs;

    let mut sections = Vec::with_capacity(n.div_ceil(2));
    // conjugate pole pairs of the analog prototype
    let pairs = n / 2;
    for i in 0..pairs {
        let theta = PI * (2.0 * i as f64 + n as f64 + 1.0) / (2.0 * n as f64);
        // analog section omega^2 / (s^2 + a1 s + omega^2)
        let a1 = -2.0 * theta.cos() * omega;
        let a0 = omega * omega;
        let d0 = k * k + a1 * k + a0;
        sections.push(Biquad {
            b0: a0 / d0,
            b1: 2.0 * a0 / d0,
            b2: a0 / d0,
            a1: (-2.0 * k * k + 2.0 * a0) / d0,
            a2: (k * k - a1 * k + a0) / d0,
        });
    }
    if n % 2 == 1 {
        // real pole at -omega: analog section omega / (s + omega)
        let d0 = k + omega;
        sections.push(Biquad {
            b0: omega / d0,
            b1: omega / d0,
            b2: 0.0,
            a1: (omega - k) / d0,
            a2: 0.0,
        });
    }
    sections
}

fn run_cascade(sections: &[Biquad], x: &mut [f64]) {
    for s in sections {
        s.run(x);
    }
}

/// Low-pass filters a uniformly sampled series. Single-pass application is
/// causal; zero-phase mode runs the cascade forward then backward over an
/// odd-reflection padding of `3 * order` samples at each edge, which bounds
/// the startup transients and leaves no net phase lag.
pub fn lowpass(series: &[f64], spec: &FilterSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let pad = 3 * spec.order;
    if series.len() <= pad {
        return Err(Error::InvalidArgument(format!(
            "series length {} must exceed 3 * order = {}",
            series.len(),
            pad
        )));
    }
    let sections = design_lowpass(spec);

    if !spec.zero_phase {
        let mut y = series.to_vec();
        run_cascade(&sections, &mut y);
        return Ok(y);
    }

    // odd reflection about the first and last samples
    let n = series.len();
    let mut padded = Vec::with_capacity(n + 2 * pad);
    for i in (1..=pad).rev() {
        padded.push(2.0 * series[0] - series[i]);
    }
    padded.extend_from_slice(series);
    for i in (1..=pad).rev() {
        padded.push(2.0 * series[n - 1] - series[n - 1 - i]);
    }

    run_cascade(&sections, &mut padded);
    padded.reverse();
    run_cascade(&sections, &mut padded);
    padded.reverse();

    Ok(padded[pad..pad + n].to_vec())
}

// ---------------------------------------------------------------------------
// Whole-trace preprocessing
// ---------------------------------------------------------------------------

/// One denoised amplitude stream of a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeStream {
    pub subcarrier: usize,
    pub rx: usize,
    pub tx: usize,
    pub values: Vec<f64>,
}

impl AmplitudeStream {
    /// Stable stream name used in feature layouts.
    pub fn name(&self) -> String {
        format!("sc{:02}rx{}tx{}", self.subcarrier, self.rx, self.tx)
    }
}

/// A preprocessed trace: uniform timestamps and one filtered amplitude
/// series per `(subcarrier, rx, tx)` stream, in subcarrier-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrace {
    pub metadata: TraceMetadata,
    pub sample_rate: f64,
    pub times: Vec<f64>,
    pub streams: Vec<AmplitudeStream>,
}

/// Runs the preprocessing stage on one trace: resample onto the nominal-rate
/// grid, take per-stream amplitudes, and low-pass each stream independently.
/// The trace's nominal rate supersedes `spec.sample_rate` for both the grid
/// and the filter design.
pub fn preprocess_trace(trace: &Trace, spec: &FilterSpec) -> Result<AmplitudeTrace> {
    let effective = FilterSpec {
        sample_rate: trace.nominal_rate,
        ..*spec
    };
    effective.validate()?;
    let uniform = regularize(trace, trace.nominal_rate)?;
    let frames = uniform.frames();
    let first = &frames[0];
    let times: Vec<f64> = frames.iter().map(|f| f.timestamp).collect();

    let mut streams =
        Vec::with_capacity(first.n_subcarriers() * first.n_rx() * first.n_tx());
    for sc in 0..first.n_subcarriers() {
        for rx in 0..first.n_rx() {
            for tx in 0..first.n_tx() {
                let raw: Vec<f64> = frames
                    .iter()
                    .map(|f| f.entry(sc, rx, tx).expect("uniform dims").amplitude())
                    .collect();
                let values = lowpass(&raw, &effective)?;
                streams.push(AmplitudeStream {
                    subcarrier: sc,
                    rx,
                    tx,
                    values,
                });
            }
        }
    }
    Ok(AmplitudeTrace {
        metadata: uniform.metadata.clone(),
        sample_rate: trace.nominal_rate,
        times,
        streams,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tone(freq: f64, rate: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| (2.0 * PI * freq * i as f64 / rate).sin())
            .collect()
    }

    fn rms(x: &[f64]) -> f64 {
        (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
    }

    fn trace_1x1(samples: &[(f64, f64)], rate: f64) -> Trace {
        let frames = samples
            .iter()
            .map(|&(t, v)| {
                CsiFrame::new(t, 1, 1, 1, vec![ComplexValue::new(v, 0.0)]).unwrap()
            })
            .collect();
        Trace::new(frames, rate, TraceMetadata::default()).unwrap()
    }

    #[test]
    fn regularize_fills_linear_gap() {
        let trace = trace_1x1(&[(0.0, 0.0), (1.0, 1.0), (3.0, 3.0)], 1.0);
        let fixed = regularize(&trace, 1.0).unwrap();
        assert_eq!(fixed.len(), 4);
        let series = fixed.amplitude_series(0, 0, 0).unwrap();
        let values: Vec<f64> = series.iter().map(|&(_, v)| v).collect();
        assert_eq!(values, vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn regularize_is_idempotent_on_uniform_input() {
        let samples: Vec<(f64, f64)> = (0..50)
            .map(|i| (i as f64 / 100.0, (i as f64 * 0.37).sin()))
            .collect();
        let trace = trace_1x1(&samples, 100.0);
        let once = regularize(&trace, 100.0).unwrap();
        assert_eq!(once, trace);
        let twice = regularize(&once, 100.0).unwrap();
        assert_eq!(twice, once);
    }

    #[test]
    fn regularize_recovers_exactly_linear_signal() {
        // gaps of 2 and 4 samples give exactly representable interpolation
        // weights, so the repair reproduces the line with zero error
        let full: Vec<(f64, f64)> = (0..64).map(|i| (i as f64, 2.0 * i as f64)).collect();
        let kept: Vec<(f64, f64)> = full
            .iter()
            .enumerate()
            .filter(|(i, _)| ![3, 10, 11, 12, 40].contains(i))
            .map(|(_, &s)| s)
            .collect();
        let fixed = regularize(&trace_1x1(&kept, 1.0), 1.0).unwrap();
        assert_eq!(fixed.len(), 64);
        for (i, frame) in fixed.frames().iter().enumerate() {
            let v = frame.entry(0, 0, 0).unwrap().re;
            assert_eq!(v, 2.0 * i as f64, "sample {i}");
        }
    }

    #[test]
    fn regularize_rejects_short_traces() {
        let trace = trace_1x1(&[(0.0, 1.0)], 1.0);
        assert!(regularize(&trace, 1.0).is_err());
    }

    #[test]
    fn lowpass_preserves_constants() {
        let x = vec![2.5; 64];
        for zero_phase in [false, true] {
            let spec = FilterSpec {
                zero_phase,
                ..FilterSpec::default()
            };
            let y = lowpass(&x, &spec).unwrap();
            for v in &y {
                assert_relative_eq!(*v, 2.5, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn lowpass_attenuates_stopband_tone() {
        // 30 Hz at 100 Hz sampling is twice the cutoff; the analog magnitude
        // bound there is 1/sqrt(1 + 2^8) ~ 0.0624, and prewarped bilinear
        // design only attenuates more.
        let x = tone(30.0, 100.0, 500);
        let spec = FilterSpec {
            zero_phase: false,
            ..FilterSpec::default()
        };
        let y = lowpass(&x, &spec).unwrap();
        let ratio = rms(&y[100..400]) / rms(&x[100..400]);
        assert!(ratio <= 1.0 / (1.0f64 + 2f64.powi(8)).sqrt(), "ratio {ratio}");

        let spec_zp = FilterSpec::default();
        let y2 = lowpass(&x, &spec_zp).unwrap();
        let ratio2 = rms(&y2[100..400]) / rms(&x[100..400]);
        assert!(ratio2 <= 0.005, "zero-phase ratio {ratio2}");
    }

    #[test]
    fn lowpass_passes_slow_tone() {
        // 2 Hz is deep in the passband (cutoff ratio 2/15)
        let x = tone(2.0, 100.0, 500);
        for zero_phase in [false, true] {
            let spec = FilterSpec {
                zero_phase,
                ..FilterSpec::default()
            };
            let y = lowpass(&x, &spec).unwrap();
            let ratio = rms(&y[100..400]) / rms(&x[100..400]);
            assert!((ratio - 1.0).abs() <= 0.05, "ratio {ratio}");
        }
    }

    #[test]
    fn lowpass_is_linear() {
        let x = tone(3.0, 100.0, 200);
        let y = tone(11.0, 100.0, 200);
        let spec = FilterSpec::default();
        let (a, b) = (1.7, -0.4);
        let combined: Vec<f64> = x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect();
        let lhs = lowpass(&combined, &spec).unwrap();
        let fx = lowpass(&x, &spec).unwrap();
        let fy = lowpass(&y, &spec).unwrap();
        for i in 0..lhs.len() {
            let rhs = a * fx[i] + b * fy[i];
            assert_relative_eq!(lhs[i], rhs, max_relative = 1e-9, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_phase_mode_has_no_lag() {
        // cross-correlation of input and output peaks at lag 0 for an
        // in-band signal
        let x = tone(3.0, 100.0, 400);
        let y = lowpass(&x, &FilterSpec::default()).unwrap();
        let mut best_lag = 0i64;
        let mut best = f64::NEG_INFINITY;
        for lag in -8i64..=8 {
            let mut acc = 0.0;
            for i in 0..x.len() as i64 {
                let j = i + lag;
                if j >= 0 && (j as usize) < y.len() {
                    acc += x[i as usize] * y[j as usize];
                }
            }
            if acc > best {
                best = acc;
                best_lag = lag;
            }
        }
        assert_eq!(best_lag, 0);
    }

    #[test]
    fn lowpass_rejects_bad_specs() {
        let x = vec![0.0; 64];
        let nyq = FilterSpec {
            cutoff_hz: 50.0,
            ..FilterSpec::default()
        };
        assert!(lowpass(&x, &nyq).is_err());
        assert!(lowpass(&x[..10], &FilterSpec::default()).is_err());
    }

    #[test]
    fn preprocess_keeps_constant_amplitudes() {
        let samples: Vec<(f64, f64)> = (0..100).map(|i| (i as f64 / 100.0, 3.0)).collect();
        let trace = trace_1x1(&samples, 100.0);
        let out = preprocess_trace(&trace, &FilterSpec::default()).unwrap();
        assert_eq!(out.streams.len(), 1);
        for v in &out.streams[0].values {
            assert_relative_eq!(*v, 3.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn preprocess_restores_uniform_grid_after_drops() {
        // 5% of frames dropped; output must be uniform at the nominal rate
        let samples: Vec<(f64, f64)> = (0..200)
            .filter(|i| i % 20 != 7)
            .map(|i| (i as f64 / 100.0, (i as f64 * 0.1).sin() + 2.0))
            .collect();
        let trace = trace_1x1(&samples, 100.0);
        let out = preprocess_trace(&trace, &FilterSpec::default()).unwrap();
        assert_eq!(out.times.len(), 200);
        for (i, pair) in out.times.windows(2).enumerate() {
            assert_relative_eq!(pair[1] - pair[0], 0.01, epsilon = 1e-9);
            let _ = i;
        }
    }

    #[test]
    fn preprocess_reduces_high_band_energy() {
        // in-band motion plus strong out-of-band noise; the >20 Hz band must
        // drop by at least 20 dB
        let n = 400;
        let rate = 100.0;
        let raw: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let t = i as f64 / rate;
                let v = 5.0
                    + (2.0 * PI * 2.0 * t).sin()
                    + 0.8 * (2.0 * PI * 31.0 * t).sin()
                    + 0.6 * (2.0 * PI * 42.0 * t).cos();
                (t, v)
            })
            .collect();
        let trace = trace_1x1(&raw, rate);
        let out = preprocess_trace(&trace, &FilterSpec::default()).unwrap();
        let filtered = &out.streams[0].values;
        let raw_values: Vec<f64> = raw.iter().map(|&(_, v)| v).collect();

        let band_energy = |x: &[f64]| -> f64 {
            // direct Fourier magnitudes above 20 Hz
            let n = x.len();
            let mut energy = 0.0;
            for k in 0..n / 2 {
                let f = k as f64 * rate / n as f64;
                if f <= 20.0 {
                    continue;
                }
                let (mut re, mut im) = (0.0, 0.0);
                for (i, &v) in x.iter().enumerate() {
                    let ang = -2.0 * PI * k as f64 * i as f64 / n as f64;
                    re += v * ang.cos();
                    im += v * ang.sin();
                }
                energy += re * re + im * im;
            }
            energy
        };
        let before = band_energy(&raw_values);
        let after = band_energy(filtered);
        assert!(
            after <= before * 1e-2,
            "high-band energy reduced only {:.1} dB",
            10.0 * (before / after).log10()
        );
    }
}
