use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// One-sided DFT magnitude for a fixed frame length. Reuses the FFT plan.
pub struct SpectrumAnalyzer {
    len: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl SpectrumAnalyzer {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "frame length must be positive");
        let fft = FftPlanner::new().plan_fft_forward(len);
        SpectrumAnalyzer { len, fft }
    }

    pub fn frame_len(&self) -> usize {
        self.len
    }

    /// Number of one-sided bins, ⌊W/2⌋ + 1.
    pub fn n_bins(&self) -> usize {
        self.len / 2 + 1
    }

    /// Full two-sided complex spectrum.
    pub fn complex(&self, frame: &[f64]) -> Vec<Complex<f64>> {
        assert_eq!(frame.len(), self.len, "frame length mismatch");
        let mut buf: Vec<Complex<f64>> = frame.iter().map(|&x| Complex::new(x, 0.0)).collect();
        self.fft.process(&mut buf);
        buf
    }

    pub fn magnitude(&self, frame: &[f64]) -> Vec<f64> {
        let full = self.complex(frame);
        full[..self.n_bins()].iter().map(|c| c.norm()).collect()
    }
}

/// Magnitude of the one-sided DFT; bin b sits at b·fs/W Hz.
pub fn dft_magnitude(frame: &[f64]) -> Vec<f64> {
    SpectrumAnalyzer::new(frame.len()).magnitude(frame)
}

/// Symmetric Hamming window of length `len`.
pub fn hamming_window(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    (0..len)
        .map(|n| 0.54 - 0.46 * (2.0 * PI * n as f64 / (len - 1) as f64).cos())
        .collect()
}
