//! Per-frame descriptors. Frequencies are in Hz throughout.

use std::f64::consts::PI;

pub const N_MFCC: usize = 13;
pub const N_MEL_FILTERS: usize = 26;
pub const N_CHROMA: usize = 12;
pub const N_FRAME_FEATURES: usize = 11 + N_MFCC + N_CHROMA + 1;

const INTENSITY_EPS: f64 = 1e-10;
const LOG_ENERGY_FLOOR: f64 = 1e-10;
const ENTROPY_EPS: f64 = 1e-10;
const ENERGY_SUB_BLOCKS: usize = 10;
const PITCH_MIN_HZ: f64 = 50.0;
const PITCH_MAX_HZ: f64 = 500.0;
const VOICING_THRESHOLD: f64 = 0.3;
const ROLLOFF_FRACTION: f64 = 0.90;
const CHROMA_MIN_HZ: f64 = 27.5;

/// Canonical ordering of the 37 per-frame values.
pub const FRAME_FEATURE_NAMES: [&str; N_FRAME_FEATURES] = [
    "zcr",
    "energy",
    "energy_entropy",
    "rms_power",
    "intensity_db",
    "pitch_hz",
    "spec_centroid",
    "spec_spread",
    "spec_entropy",
    "spec_flux",
    "spec_rolloff",
    "mfcc_0",
    "mfcc_1",
    "mfcc_2",
    "mfcc_3",
    "mfcc_4",
    "mfcc_5",
    "mfcc_6",
    "mfcc_7",
    "mfcc_8",
    "mfcc_9",
    "mfcc_10",
    "mfcc_11",
    "mfcc_12",
    "chroma_0",
    "chroma_1",
    "chroma_2",
    "chroma_3",
    "chroma_4",
    "chroma_5",
    "chroma_6",
    "chroma_7",
    "chroma_8",
    "chroma_9",
    "chroma_10",
    "chroma_11",
    "chroma_dev",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeDomainFeatures {
    pub zcr: f64,
    pub energy: f64,
    pub energy_entropy: f64,
    pub rms_power: f64,
    pub intensity_db: f64,
    pub pitch_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralFeatures {
    pub centroid: f64,
    pub spread: f64,
    pub entropy: f64,
    pub flux: f64,
    pub rolloff: f64,
}

/// All 37 values of one frame, in [`FRAME_FEATURE_NAMES`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameFeatures(pub [f64; N_FRAME_FEATURES]);

impl FrameFeatures {
    pub fn assemble(
        time: &TimeDomainFeatures,
        spectral: &SpectralFeatures,
        mfcc: &[f64; N_MFCC],
        chroma: &[f64; N_CHROMA],
        chroma_dev: f64,
    ) -> Self {
        let mut v = [0.0; N_FRAME_FEATURES];
        v[..11].copy_from_slice(&[
            time.zcr,
            time.energy,
            time.energy_entropy,
            time.rms_power,
            time.intensity_db,
            time.pitch_hz,
            spectral.centroid,
            spectral.spread,
            spectral.entropy,
            spectral.flux,
            spectral.rolloff,
        ]);
        v[11..24].copy_from_slice(mfcc);
        v[24..36].copy_from_slice(chroma);
        v[36] = chroma_dev;
        FrameFeatures(v)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        FRAME_FEATURE_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| self.0[i])
    }
}

/// Time-domain descriptors of a raw (unwindowed) frame of length ≥ 2.
pub fn time_domain_features(frame: &[f64], fs: u32) -> TimeDomainFeatures {
    assert!(frame.len() >= 2, "frame must hold at least two samples");
    let w = frame.len() as f64;
    let crossings = frame
        .windows(2)
        .filter(|p| (p[0] >= 0.0) != (p[1] >= 0.0))
        .count();
    let zcr = crossings as f64 / (w - 1.0);
    let sum_sq: f64 = frame.iter().map(|x| x * x).sum();
    let energy = sum_sq / w;
    TimeDomainFeatures {
        zcr,
        energy,
        energy_entropy: energy_entropy(frame),
        rms_power: energy.sqrt(),
        intensity_db: 10.0 * (energy + INTENSITY_EPS).log10(),
        pitch_hz: autocorrelation_pitch(frame, fs),
    }
}

/// Entropy (bits) of the energy distribution over ten equal sub-blocks.
/// Samples past the last whole sub-block are ignored.
fn energy_entropy(frame: &[f64]) -> f64 {
    let block = frame.len() / ENERGY_SUB_BLOCKS;
    if block == 0 {
        return 0.0;
    }
    let energies: Vec<f64> = frame
        .chunks_exact(block)
        .take(ENERGY_SUB_BLOCKS)
        .map(|c| c.iter().map(|x| x * x).sum())
        .collect();
    let total: f64 = energies.iter().sum();
    -energies
        .iter()
        .map(|e| {
            let p = e / (total + ENTROPY_EPS);
            p * (p + ENTROPY_EPS).log2()
        })
        .sum::<f64>()
}

/// Lag of the highest normalized autocorrelation r(τ)/r(0) in the
/// 50–500 Hz band; unvoiced (0) when that peak is below 0.3.
fn autocorrelation_pitch(frame: &[f64], fs: u32) -> f64 {
    let r0: f64 = frame.iter().map(|x| x * x).sum();
    if r0 <= 0.0 {
        return 0.0;
    }
    let fs = fs as f64;
    let min_lag = (fs / PITCH_MAX_HZ).ceil() as usize;
    let max_lag = ((fs / PITCH_MIN_HZ).floor() as usize).min(frame.len() - 1);
    let mut best = (0usize, f64::NEG_INFINITY);
    for lag in min_lag.max(1)..=max_lag {
        let r: f64 = frame[..frame.len() - lag]
            .iter()
            .zip(&frame[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / r0;
        if r > best.1 {
            best = (lag, r);
        }
    }
    if best.0 == 0 || best.1 < VOICING_THRESHOLD {
        0.0
    } else {
        fs / best.0 as f64
    }
}

fn bin_hz(b: usize, fs: u32, frame_len: usize) -> f64 {
    b as f64 * fs as f64 / frame_len as f64
}

fn l1_normalized(m: &[f64]) -> Vec<f64> {
    let s: f64 = m.iter().sum();
    if s > 0.0 {
        m.iter().map(|v| v / s).collect()
    } else {
        vec![0.0; m.len()]
    }
}

/// Spectral shape of a one-sided magnitude spectrum computed from a frame
/// of `frame_len` samples. `prev` is the previous frame's spectrum (zeros
/// for the first frame).
pub fn spectral_features(spectrum: &[f64], prev: &[f64], fs: u32, frame_len: usize) -> SpectralFeatures {
    assert_eq!(spectrum.len(), prev.len(), "spectra must have equal length");
    let total: f64 = spectrum.iter().sum();
    let freqs: Vec<f64> = (0..spectrum.len()).map(|b| bin_hz(b, fs, frame_len)).collect();
    let (centroid, spread) = if total > 0.0 {
        let c = freqs.iter().zip(spectrum).map(|(f, m)| f * m).sum::<f64>() / total;
        let var = freqs
            .iter()
            .zip(spectrum)
            .map(|(f, m)| (f - c).powi(2) * m)
            .sum::<f64>()
            / total;
        (c, var.sqrt())
    } else {
        (0.0, 0.0)
    };

    let p = l1_normalized(spectrum);
    let entropy = -p
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|v| v * v.ln())
        .sum::<f64>();
    let q = l1_normalized(prev);
    let flux = p.iter().zip(&q).map(|(a, b)| (a - b).powi(2)).sum();

    let energy: Vec<f64> = spectrum.iter().map(|m| m * m).collect();
    let total_energy: f64 = energy.iter().sum();
    let rolloff = if total_energy > 0.0 {
        let target = ROLLOFF_FRACTION * total_energy;
        let mut cum = 0.0;
        let mut at = spectrum.len() - 1;
        for (b, e) in energy.iter().enumerate() {
            cum += e;
            if cum >= target {
                at = b;
                break;
            }
        }
        freqs[at]
    } else {
        0.0
    };

    SpectralFeatures {
        centroid,
        spread,
        entropy,
        flux,
        rolloff,
    }
}

fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular mel filters over [0, fs/2] for a fixed one-sided spectrum length.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    weights: Vec<Vec<f64>>,
    dct: Vec<Vec<f64>>,
}

impl MelFilterbank {
    pub fn new(fs: u32, frame_len: usize) -> Self {
        let n_bins = frame_len / 2 + 1;
        let top = hz_to_mel(fs as f64 / 2.0);
        let edges: Vec<f64> = (0..N_MEL_FILTERS + 2)
            .map(|i| mel_to_hz(top * i as f64 / (N_MEL_FILTERS + 1) as f64))
            .collect();
        let weights = (0..N_MEL_FILTERS)
            .map(|k| {
                let (lo, mid, hi) = (edges[k], edges[k + 1], edges[k + 2]);
                (0..n_bins)
                    .map(|b| {
                        let f = bin_hz(b, fs, frame_len);
                        if f > lo && f <= mid {
                            (f - lo) / (mid - lo)
                        } else if f > mid && f < hi {
                            (hi - f) / (hi - mid)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        // orthonormal DCT-II rows
        let n = N_MEL_FILTERS as f64;
        let dct = (0..N_MFCC)
            .map(|k| {
                let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
                (0..N_MEL_FILTERS)
                    .map(|j| scale * (PI * k as f64 * (j as f64 + 0.5) / n).cos())
                    .collect()
            })
            .collect();
        MelFilterbank { weights, dct }
    }

    pub fn n_bins(&self) -> usize {
        self.weights[0].len()
    }

    /// Log mel-filter power energies, floored at 1e-10.
    pub fn log_energies(&self, spectrum: &[f64]) -> Vec<f64> {
        assert_eq!(spectrum.len(), self.n_bins(), "spectrum length mismatch");
        self.weights
            .iter()
            .map(|w| {
                let e: f64 = w.iter().zip(spectrum).map(|(w, m)| w * m * m).sum();
                e.max(LOG_ENERGY_FLOOR).ln()
            })
            .collect()
    }

    pub fn mfcc(&self, spectrum: &[f64]) -> [f64; N_MFCC] {
        let log_e = self.log_energies(spectrum);
        let mut out = [0.0; N_MFCC];
        for (o, row) in out.iter_mut().zip(&self.dct) {
            *o = row.iter().zip(&log_e).map(|(c, e)| c * e).sum();
        }
        out
    }
}

/// 13 MFCCs: 26 mel filters, log energies, DCT-II.
pub fn cepstral_features(spectrum: &[f64], fs: u32, frame_len: usize) -> [f64; N_MFCC] {
    MelFilterbank::new(fs, frame_len).mfcc(spectrum)
}

/// Pitch class (0 = C, 9 = A) of frequency `f`, MIDI convention.
pub(crate) fn pitch_class(f: f64) -> usize {
    let midi = (12.0 * (f / 440.0).log2()).round() as i64 + 69;
    midi.rem_euclid(12) as usize
}

/// Spectral energy folded onto the 12 pitch classes and L1-normalized,
/// plus the population standard deviation of those 12 values.
pub fn chroma_features(spectrum: &[f64], fs: u32, frame_len: usize) -> ([f64; N_CHROMA], f64) {
    let mut chroma = [0.0; N_CHROMA];
    for (b, m) in spectrum.iter().enumerate() {
        let f = bin_hz(b, fs, frame_len);
        if f >= CHROMA_MIN_HZ {
            chroma[pitch_class(f)] += m * m;
        }
    }
    let total: f64 = chroma.iter().sum();
    if total > 0.0 {
        chroma.iter_mut().for_each(|c| *c /= total);
    }
    let mean = chroma.iter().sum::<f64>() / N_CHROMA as f64;
    let dev = (chroma.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / N_CHROMA as f64).sqrt();
    (chroma, dev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zcr_trivial_cases() {
        assert_eq!(time_domain_features(&[0.3; 100], 16000).zcr, 0.0);
        let alt: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let t = time_domain_features(&alt, 16000);
        assert_eq!(t.zcr, 1.0);
        assert_eq!(t.energy, 1.0);
        assert_eq!(t.rms_power, 1.0);
    }

    #[test]
    fn silence() {
        let t = time_domain_features(&[0.0; 800], 16000);
        assert_eq!((t.zcr, t.energy, t.pitch_hz, t.energy_entropy), (0.0, 0.0, 0.0, 0.0));
        assert!((t.intensity_db - (-100.0)).abs() < 1e-9);
    }

    #[test]
    fn uniform_energy_entropy_is_log2_ten() {
        let t = time_domain_features(&[0.5; 1000], 16000);
        assert!((t.energy_entropy - 10f64.log2()).abs() < 1e-6);
    }

    #[test]
    fn degenerate_spectrum() {
        let mut s = vec![0.0; 33];
        s[5] = 2.0;
        let f = spectral_features(&s, &s, 64, 64);
        assert!((f.centroid - 5.0).abs() < 1e-12);
        assert_eq!(f.spread, 0.0);
        assert_eq!(f.entropy, 0.0);
        assert_eq!(f.flux, 0.0);
        assert_eq!(f.rolloff, 5.0);
    }

    #[test]
    fn flat_spectrum() {
        let b = 10;
        let s = vec![1.0; b];
        let f = spectral_features(&s, &vec![0.0; b], 18, 18);
        assert!((f.entropy - (b as f64).ln()).abs() < 1e-12);
        // cumulative count first reaches 9 of 10 at bin 8
        assert_eq!(f.rolloff, 8.0);
        // against zero prev: Σ (1/10)² = 0.1
        assert!((f.flux - 0.1).abs() < 1e-12);
    }

    #[test]
    fn zero_spectrum_mfcc_is_dct_of_constant() {
        let m = cepstral_features(&vec![0.0; 401], 16000, 800);
        assert!(m[0].abs() > 1.0);
        assert!(m[1..].iter().all(|c| c.abs() <= 1e-9));
    }

    #[test]
    fn zero_spectrum_chroma() {
        let (c, dev) = chroma_features(&vec![0.0; 401], 16000, 800);
        assert!(c.iter().all(|&v| v == 0.0));
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn pitch_classes() {
        assert_eq!(pitch_class(440.0), 9);
        assert_eq!(pitch_class(261.63), 0);
        assert_eq!(pitch_class(27.5), 9);
    }

    #[test]
    fn frame_features_lookup() {
        let t = TimeDomainFeatures { zcr: 0.1, energy: 0.2, energy_entropy: 0.3, rms_power: 0.4, intensity_db: 0.5, pitch_hz: 0.6 };
        let s = SpectralFeatures { centroid: 1.0, spread: 2.0, entropy: 3.0, flux: 4.0, rolloff: 5.0 };
        let mut chroma = [0.0; 12];
        chroma[11] = 7.0;
        let f = FrameFeatures::assemble(&t, &s, &[9.0; 13], &chroma, 8.0);
        assert_eq!(f.get("pitch_hz"), Some(0.6));
        assert_eq!(f.get("spec_rolloff"), Some(5.0));
        assert_eq!(f.get("mfcc_12"), Some(9.0));
        assert_eq!(f.get("chroma_11"), Some(7.0));
        assert_eq!(f.get("chroma_dev"), Some(8.0));
    }
}
