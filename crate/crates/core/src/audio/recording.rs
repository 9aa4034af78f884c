use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::features::{
    chroma_features, spectral_features, time_domain_features, FrameFeatures, MelFilterbank,
    FRAME_FEATURE_NAMES,
};
use super::frame::{frame_signal, FrameSpec};
use super::spectrum::{hamming_window, SpectrumAnalyzer};
use super::AudioSignal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct AudioConfig {
    pub frame: FrameSpec,
    /// Append the per-frame standard deviation block (37 more columns).
    pub include_std: bool,
}

/// Named per-recording audio vector: 37 means, then `duration_s` and
/// `frame_count`, then optionally 37 standard deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordingAudioFeatures {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl RecordingAudioFeatures {
    pub fn width(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }
}

pub fn recording_feature_names(include_std: bool) -> Vec<String> {
    let mut names: Vec<String> = FRAME_FEATURE_NAMES.iter().map(|n| format!("{n}_mean")).collect();
    names.push("duration_s".into());
    names.push("frame_count".into());
    if include_std {
        names.extend(FRAME_FEATURE_NAMES.iter().map(|n| format!("{n}_std")));
    }
    names
}

/// Per-frame features. Spectra use a Hamming-windowed copy of each frame;
/// flux for frame 0 is taken against an all-zero spectrum.
pub fn frame_features(signal: &AudioSignal, spec: &FrameSpec) -> Result<Vec<FrameFeatures>> {
    let fs = signal.sample_rate_hz();
    let frames = frame_signal(signal, spec)?;
    let w = spec.window_samples(fs);
    let window = hamming_window(w);
    let analyzer = SpectrumAnalyzer::new(w);
    let mel = MelFilterbank::new(fs, w);
    let mut prev = vec![0.0; analyzer.n_bins()];
    let mut out = Vec::with_capacity(frames.len());
    let mut windowed = vec![0.0; w];
    for frame in frames {
        for ((o, x), h) in windowed.iter_mut().zip(frame).zip(&window) {
            *o = x * h;
        }
        let spectrum = analyzer.magnitude(&windowed);
        let time = time_domain_features(frame, fs);
        let spectral = spectral_features(&spectrum, &prev, fs, w);
        let mfcc = mel.mfcc(&spectrum);
        let (chroma, chroma_dev) = chroma_features(&spectrum, fs, w);
        out.push(FrameFeatures::assemble(&time, &spectral, &mfcc, &chroma, chroma_dev));
        prev = spectrum;
    }
    Ok(out)
}

pub fn extract_recording_audio_features(
    signal: &AudioSignal,
    spec: &FrameSpec,
    include_std: bool,
) -> Result<RecordingAudioFeatures> {
    let frames = frame_features(signal, spec)?;
    let n = frames.len() as f64;
    let width = FRAME_FEATURE_NAMES.len();
    let mut mean = vec![0.0; width];
    for f in &frames {
        for (m, v) in mean.iter_mut().zip(f.0.iter()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);

    let mut values = mean.clone();
    values.push(signal.duration_s());
    values.push(frames.len() as f64);
    if include_std {
        let mut var = vec![0.0; width];
        for f in &frames {
            for (j, v) in f.0.iter().enumerate() {
                var[j] += (v - mean[j]).powi(2);
            }
        }
        values.extend(var.iter().map(|v| (v / n).sqrt()));
    }
    Ok(RecordingAudioFeatures {
        names: recording_feature_names(include_std),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(fs: u32, hz: f64, n: usize, amp: f64) -> AudioSignal {
        let s = (0..n)
            .map(|i| amp * (2.0 * std::f64::consts::PI * hz * i as f64 / fs as f64).sin())
            .collect();
        AudioSignal::new(s, fs).unwrap()
    }

    #[test]
    fn single_frame_means_and_zero_stds() {
        let sig = tone(16000, 200.0, 800, 0.5);
        let frames = frame_features(&sig, &FrameSpec::default()).unwrap();
        assert_eq!(frames.len(), 1);
        let rec = extract_recording_audio_features(&sig, &FrameSpec::default(), true).unwrap();
        assert_eq!(rec.width(), 76);
        assert_eq!(&rec.values[..37], &frames[0].0[..]);
        assert!(rec.values[39..].iter().all(|&s| s == 0.0));
        assert_eq!(rec.get("frame_count"), Some(1.0));
    }

    #[test]
    fn silence_recording() {
        let sig = AudioSignal::new(vec![0.0; 16000], 16000).unwrap();
        let rec = extract_recording_audio_features(&sig, &FrameSpec::default(), false).unwrap();
        assert_eq!(rec.width(), 39);
        assert_eq!(rec.get("energy_mean"), Some(0.0));
        assert_eq!(rec.get("zcr_mean"), Some(0.0));
        assert_eq!(rec.get("pitch_hz_mean"), Some(0.0));
        assert_eq!(rec.get("duration_s"), Some(1.0));
        assert!(rec.values.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn deterministic() {
        let sig = tone(16000, 310.0, 8000, 0.3);
        let a = extract_recording_audio_features(&sig, &FrameSpec::default(), true).unwrap();
        let b = extract_recording_audio_features(&sig, &FrameSpec::default(), true).unwrap();
        assert_eq!(a, b);
    }
}
