//! Prosodic audio features: PCM ingestion, short-term framing, and
//! time/frequency/cepstral/chroma descriptors aggregated per recording.

mod features;
mod frame;
mod recording;
mod spectrum;
mod wav;

pub use features::{
    cepstral_features, chroma_features, spectral_features, time_domain_features, FrameFeatures,
    MelFilterbank, SpectralFeatures, TimeDomainFeatures, FRAME_FEATURE_NAMES, N_CHROMA, N_MEL_FILTERS,
    N_MFCC,
};
pub use frame::{frame_signal, FrameSpec};
pub use recording::{
    extract_recording_audio_features, frame_features, recording_feature_names, AudioConfig,
    RecordingAudioFeatures,
};
pub use spectrum::{dft_magnitude, hamming_window, SpectrumAnalyzer};
pub use wav::{decode_wav, encode_wav_pcm16, read_wav, write_wav_mono};

use crate::error::{Error, Result};

/// Mono samples in [-1, 1] at a known sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioSignal {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl AudioSignal {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("samples", "audio signal must be non-empty"));
        }
        if sample_rate_hz == 0 {
            return Err(Error::invalid("sample_rate_hz", "must be > 0"));
        }
        if let Some(x) = samples.iter().find(|x| !x.is_finite() || x.abs() > 1.0) {
            return Err(Error::invalid("samples", format!("sample {x} outside [-1, 1]")));
        }
        Ok(AudioSignal {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }
}
