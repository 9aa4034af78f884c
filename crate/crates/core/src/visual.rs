//! Facial landmark tracks: head pose from rotation matrices, similarity-
//! normalized landmark geometry, smile indicators, per-recording aggregation.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];
pub type Rotation = [[f64; 3]; 3];

const ORTHONORMAL_TOL: f64 = 1e-3;
const GIMBAL_TOL: f64 = 1e-6;

/// Landmark order used everywhere vectors of points appear.
pub const LANDMARK_NAMES: [&str; 6] = [
    "nose",
    "chin",
    "left_eye_left_corner",
    "right_eye_right_corner",
    "left_mouth",
    "right_mouth",
];

const LEFT_EYE: usize = 2;
const RIGHT_EYE: usize = 3;
const LEFT_MOUTH: usize = 4;
const RIGHT_MOUTH: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkFrame {
    pub t_s: f64,
    /// Pixel coordinates in [`LANDMARK_NAMES`] order.
    pub landmarks: [Point; 6],
    pub rotation: Option<Rotation>,
    pub smile_prob: Option<f64>,
}

#[derive(Deserialize)]
struct RawLandmarks {
    nose: Point,
    chin: Point,
    lel: Point,
    rer: Point,
    lm_l: Point,
    lm_r: Point,
}

#[derive(Deserialize)]
struct RawFrame {
    t: f64,
    lm: RawLandmarks,
    #[serde(rename = "R", default)]
    rotation: Option<Rotation>,
    #[serde(default)]
    smile: Option<f64>,
}

impl LandmarkFrame {
    fn validate(&self) -> std::result::Result<(), String> {
        if !(self.t_s.is_finite() && self.t_s >= 0.0) {
            return Err(format!("timestamp {} must be finite and ≥ 0", self.t_s));
        }
        if self.landmarks.iter().flatten().any(|v| !v.is_finite()) {
            return Err("non-finite landmark coordinate".into());
        }
        if let Some(r) = &self.rotation {
            check_rotation(r)?;
        }
        if let Some(p) = self.smile_prob {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("smile probability {p} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

fn check_rotation(r: &Rotation) -> std::result::Result<(), String> {
    if r.iter().flatten().any(|v| !v.is_finite()) {
        return Err("malformed rotation: non-finite entry".into());
    }
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let dot: f64 = (0..3).map(|k| r[k][i] * r[k][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    if worst > ORTHONORMAL_TOL {
        return Err(format!("malformed rotation: ‖RᵀR − I‖∞ = {worst:.3e}"));
    }
    let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
        - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
        + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
    if !(0.99..=1.01).contains(&det) {
        return Err(format!("malformed rotation: det(R) = {det:.4}"));
    }
    Ok(())
}

pub fn load_landmark_track(path: impl AsRef<Path>) -> Result<Vec<LandmarkFrame>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_landmark_track(&text).map_err(|e| match e {
        Error::Parse { context, message } => Error::Parse {
            context: format!("{}{}", path.display(), context),
            message,
        },
        other => other,
    })
}

/// Parses JSON-lines track text. Timestamps must already be strictly increasing.
pub fn parse_landmark_track(text: &str) -> Result<Vec<LandmarkFrame>> {
    let mut frames: Vec<LandmarkFrame> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            context: format!(":{}", i + 1),
            message,
        };
        let raw: RawFrame = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        let lm = raw.lm;
        let frame = LandmarkFrame {
            t_s: raw.t,
            landmarks: [lm.nose, lm.chin, lm.lel, lm.rer, lm.lm_l, lm.lm_r],
            rotation: raw.rotation,
            smile_prob: raw.smile,
        };
        frame.validate().map_err(err)?;
        if let Some(prev) = frames.last() {
            if frame.t_s <= prev.t_s {
                return Err(err(format!(
                    "non-monotonic timestamps: {} follows {}",
                    frame.t_s, prev.t_s
                )));
            }
        }
        frames.push(frame);
    }
    Ok(frames)
}

/// Pitch, yaw and roll in radians (X-Y-Z intrinsic, R = Rz·Ry·Rx).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct HeadPose {
    pub pitch_rad: f64,
    pub yaw_rad: f64,
    pub roll_rad: f64,
    /// |yaw| within 1e-6 of π/2; roll was pinned to 0.
    pub gimbal_lock: bool,
}

pub fn euler_from_rotation(r: &Rotation) -> HeadPose {
    let cos_yaw = r[2][1].hypot(r[2][2]);
    let yaw = (-r[2][0]).atan2(cos_yaw);
    if (yaw.abs() - std::f64::consts::FRAC_PI_2).abs() < GIMBAL_TOL {
        let s = yaw.signum();
        return HeadPose {
            pitch_rad: (s * r[0][1]).atan2(r[1][1]),
            yaw_rad: yaw,
            roll_rad: 0.0,
            gimbal_lock: true,
        };
    }
    HeadPose {
        pitch_rad: r[2][1].atan2(r[2][2]),
        yaw_rad: yaw,
        roll_rad: r[1][0].atan2(r[0][0]),
        gimbal_lock: false,
    }
}

/// Moves the eye-corner midpoint to the origin, rotates the eye-corner
/// segment onto +x and scales the inter-ocular distance to 1.
pub fn local_normalize(frame: &LandmarkFrame) -> Result<[Point; 6]> {
    let l = frame.landmarks[LEFT_EYE];
    let r = frame.landmarks[RIGHT_EYE];
    let (dx, dy) = (r[0] - l[0], r[1] - l[1]);
    let dist = dx.hypot(dy);
    if !(dist > 1e-12) {
        return Err(Error::Data(format!(
            "coincident eye corners at t = {}",
            frame.t_s
        )));
    }
    let mid = [(l[0] + r[0]) / 2.0, (l[1] + r[1]) / 2.0];
    let (cos, sin) = (dx / dist, dy / dist);
    let mut out = [[0.0; 2]; 6];
    for (o, p) in out.iter_mut().zip(&frame.landmarks) {
        let (x, y) = (p[0] - mid[0], p[1] - mid[1]);
        *o = [(cos * x + sin * y) / dist, (-sin * x + cos * y) / dist];
    }
    Ok(out)
}

/// Mouth width over inter-ocular distance on normalized points.
pub fn smile_ratio(points: &[Point; 6]) -> f64 {
    let eyes = distance(points[LEFT_EYE], points[RIGHT_EYE]);
    let mouth = distance(points[LEFT_MOUTH], points[RIGHT_MOUTH]);
    if eyes > 0.0 {
        mouth / eyes
    } else {
        0.0
    }
}

fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VisualConfig {
    pub smile_prob_threshold: f64,
    pub smile_ratio_threshold: f64,
}

impl Default for VisualConfig {
    fn default() -> Self {
        VisualConfig {
            smile_prob_threshold: 0.5,
            smile_ratio_threshold: 0.55,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordingVisualFeatures {
    pub names: Vec<String>,
    pub values: Vec<f64>,
    /// Fraction of frames that carried a rotation matrix.
    pub pose_coverage: f64,
    pub gimbal_lock_frames: usize,
}

impl RecordingVisualFeatures {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }
}

pub fn visual_feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(19);
    for lm in LANDMARK_NAMES {
        names.push(format!("{lm}_x"));
        names.push(format!("{lm}_y"));
    }
    names.extend(
        [
            "head_pitch",
            "head_yaw",
            "head_roll",
            "smile_fraction",
            "smile_ratio_mean",
            "smile_ratio_std",
            "landmark_motion_energy",
        ]
        .map(String::from),
    );
    names
}

pub fn aggregate_visual(track: &[LandmarkFrame], config: &VisualConfig) -> Result<RecordingVisualFeatures> {
    if track.is_empty() {
        return Err(Error::Data("empty landmark track".into()));
    }
    let n = track.len() as f64;
    let normalized = track.iter().map(local_normalize).collect::<Result<Vec<_>>>()?;

    let mut coords = [0.0; 12];
    for pts in &normalized {
        for (k, p) in pts.iter().enumerate() {
            coords[2 * k] += p[0];
            coords[2 * k + 1] += p[1];
        }
    }
    coords.iter_mut().for_each(|c| *c /= n);

    let mut pose_sum = [0.0; 3];
    let mut with_pose = 0usize;
    let mut locked = 0usize;
    for frame in track {
        if let Some(r) = &frame.rotation {
            let pose = euler_from_rotation(r);
            pose_sum[0] += pose.pitch_rad;
            pose_sum[1] += pose.yaw_rad;
            pose_sum[2] += pose.roll_rad;
            with_pose += 1;
            locked += pose.gimbal_lock as usize;
        }
    }

    let ratios: Vec<f64> = normalized.iter().map(smile_ratio).collect();
    let smiles = track
        .iter()
        .zip(&ratios)
        .filter(|(f, &ratio)| match f.smile_prob {
            Some(p) => p >= config.smile_prob_threshold,
            None => ratio >= config.smile_ratio_threshold,
        })
        .count();
    let ratio_mean = ratios.iter().sum::<f64>() / n;
    let ratio_std = (ratios.iter().map(|r| (r - ratio_mean).powi(2)).sum::<f64>() / n).sqrt();

    let motion = if normalized.len() > 1 {
        normalized
            .windows(2)
            .map(|w| {
                w[0].iter()
                    .zip(&w[1])
                    .map(|(a, b)| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2))
                    .sum::<f64>()
            })
            .sum::<f64>()
            / (normalized.len() - 1) as f64
    } else {
        0.0
    };

    let mut values = coords.to_vec();
    values.extend(pose_sum.iter().map(|s| s / n));
    values.push(smiles as f64 / n);
    values.push(ratio_mean);
    values.push(ratio_std);
    values.push(motion);
    debug_assert_eq!(values.len(), 19);
    Ok(RecordingVisualFeatures {
        names: visual_feature_names(),
        values,
        pose_coverage: with_pose as f64 / n,
        gimbal_lock_frames: locked,
    })
}
