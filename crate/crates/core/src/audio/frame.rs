use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::AudioSignal;

pub const MIN_WINDOW_S: f64 = 0.020;
pub const MAX_WINDOW_S: f64 = 0.100;

/// Short-term window length and stride, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFrameSpec")]
pub struct FrameSpec {
    window_s: f64,
    hop_s: f64,
}

#[derive(Deserialize)]
struct RawFrameSpec {
    window_s: f64,
    hop_s: f64,
}

impl TryFrom<RawFrameSpec> for FrameSpec {
    type Error = Error;

    fn try_from(r: RawFrameSpec) -> Result<Self> {
        FrameSpec::new(r.window_s, r.hop_s)
    }
}

impl Default for FrameSpec {
    fn default() -> Self {
        FrameSpec {
            window_s: 0.050,
            hop_s: 0.025,
        }
    }
}

impl FrameSpec {
    pub fn new(window_s: f64, hop_s: f64) -> Result<Self> {
        if !(MIN_WINDOW_S..=MAX_WINDOW_S).contains(&window_s) {
            return Err(Error::invalid(
                "window_s",
                format!("{window_s} outside [{MIN_WINDOW_S}, {MAX_WINDOW_S}]"),
            ));
        }
        if !(hop_s > 0.0 && hop_s <= window_s) {
            return Err(Error::invalid("hop_s", format!("{hop_s} must lie in (0, window_s]")));
        }
        Ok(FrameSpec { window_s, hop_s })
    }

    pub fn window_s(&self) -> f64 {
        self.window_s
    }

    pub fn hop_s(&self) -> f64 {
        self.hop_s
    }

    pub fn window_samples(&self, fs: u32) -> usize {
        ((self.window_s * fs as f64).round() as usize).max(1)
    }

    pub fn hop_samples(&self, fs: u32) -> usize {
        ((self.hop_s * fs as f64).round() as usize).max(1)
    }

    /// floor((N - W) / H) + 1, or an error when N < W.
    pub fn frame_count(&self, n: usize, fs: u32) -> Result<usize> {
        let w = self.window_samples(fs);
        if n < w {
            return Err(Error::SignalTooShort {
                samples: n,
                window: w,
            });
        }
        Ok((n - w) / self.hop_samples(fs) + 1)
    }
}

/// Splits the signal into full windows; a trailing partial window is dropped.
pub fn frame_signal<'a>(signal: &'a AudioSignal, spec: &FrameSpec) -> Result<Vec<&'a [f64]>> {
    let fs = signal.sample_rate_hz();
    let count = spec.frame_count(signal.len(), fs)?;
    let w = spec.window_samples(fs);
    let h = spec.hop_samples(fs);
    Ok((0..count)
        .map(|i| &signal.samples()[i * h..i * h + w])
        .collect())
}
