//! Minimal RIFF/WAVE reader and writer for 16-bit PCM.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

use super::AudioSignal;

const WAVE_FORMAT_PCM: u16 = 1;
const WAVE_FORMAT_EXTENSIBLE: u16 = 0xFFFE;

struct Format {
    channels: u16,
    sample_rate: u32,
    bits_per_sample: u16,
}

fn u16_le(b: &[u8]) -> u16 {
    u16::from_le_bytes([b[0], b[1]])
}

fn u32_le(b: &[u8]) -> u32 {
    u32::from_le_bytes([b[0], b[1], b[2], b[3]])
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioSignal> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_wav(&bytes).map_err(|e| match e {
        Error::UnsupportedWav(m) => Error::UnsupportedWav(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Decodes an in-memory WAV file. Samples are scaled by 1/32768 and
/// multichannel audio is downmixed by averaging channels per sample.
pub fn decode_wav(bytes: &[u8]) -> Result<AudioSignal> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::UnsupportedWav("not a RIFF/WAVE file".into()));
    }
    let mut pos = 12;
    let mut format: Option<Format> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_le(&bytes[pos + 4..pos + 8]) as usize;
        let body_start = pos + 8;
        let body_end = body_start
            .checked_add(size)
            .filter(|&end| end <= bytes.len())
            .ok_or_else(|| {
                Error::UnsupportedWav(format!(
                    "truncated `{}` chunk: declares {size} bytes, {} available",
                    String::from_utf8_lossy(id),
                    bytes.len() - body_start
                ))
            })?;
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => {
                if body.len() < 16 {
                    return Err(Error::UnsupportedWav("fmt chunk too short".into()));
                }
                let mut tag = u16_le(&body[0..2]);
                if tag == WAVE_FORMAT_EXTENSIBLE && body.len() >= 26 {
                    tag = u16_le(&body[24..26]);
                }
                if tag != WAVE_FORMAT_PCM {
                    return Err(Error::UnsupportedWav(format!("codec tag {tag:#06x} is not PCM")));
                }
                format = Some(Format {
                    channels: u16_le(&body[2..4]),
                    sample_rate: u32_le(&body[4..8]),
                    bits_per_sample: u16_le(&body[14..16]),
                });
            }
            b"data" => {
                let fmt = format
                    .as_ref()
                    .ok_or_else(|| Error::UnsupportedWav("data chunk before fmt chunk".into()))?;
                return decode_pcm16(fmt, body);
            }
            _ => {}
        }
        // chunks are word aligned
        pos = body_end + (size & 1);
    }
    Err(Error::UnsupportedWav("no data chunk".into()))
}

fn decode_pcm16(fmt: &Format, data: &[u8]) -> Result<AudioSignal> {
    if fmt.bits_per_sample != 16 {
        return Err(Error::UnsupportedWav(format!(
            "{}-bit samples (only 16-bit PCM is supported)",
            fmt.bits_per_sample
        )));
    }
    if fmt.channels == 0 || fmt.sample_rate == 0 {
        return Err(Error::UnsupportedWav("zero channels or sample rate".into()));
    }
    let channels = fmt.channels as usize;
    let frame_bytes = 2 * channels;
    let n = data.len() / frame_bytes;
    if n == 0 {
        return Err(Error::UnsupportedWav("zero-length data chunk".into()));
    }
    let samples = data
        .chunks_exact(frame_bytes)
        .map(|frame| {
            let sum: f64 = frame
                .chunks_exact(2)
                .map(|s| i16::from_le_bytes([s[0], s[1]]) as f64 / 32768.0)
                .sum();
            sum / channels as f64
        })
        .collect();
    AudioSignal::new(samples, fmt.sample_rate)
}

/// Encodes interleaved 16-bit PCM. `channels` holds one sample slice per channel.
pub fn encode_wav_pcm16(channels: &[&[i16]], sample_rate: u32) -> Vec<u8> {
    let n_ch = channels.len() as u16;
    let n = channels.first().map_or(0, |c| c.len());
    let data_len = (n * channels.len() * 2) as u32;
    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&WAVE_FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&n_ch.to_le_bytes());
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&(sample_rate * n_ch as u32 * 2).to_le_bytes());
    out.extend_from_slice(&(n_ch * 2).to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for i in 0..n {
        for ch in channels {
            out.extend_from_slice(&ch[i].to_le_bytes());
        }
    }
    out
}

/// Writes a mono signal (values clamped to [-1, 1]) as 16-bit PCM.
pub fn write_wav_mono(path: impl AsRef<Path>, samples: &[f64], sample_rate: u32) -> Result<()> {
    let pcm: Vec<i16> = samples
        .iter()
        .map(|&x| (x.clamp(-1.0, 1.0) * 32767.0).round() as i16)
        .collect();
    let path = path.as_ref();
    fs::write(path, encode_wav_pcm16(&[&pcm], sample_rate)).map_err(|e| Error::io(path, e))
}
