//! Interview records, manifests, labelled feature matrices and modality fusion.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ndarray::{concatenate, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The nine behavioral labels, each scored on an integer 1..=7 scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LabelName {
    EyeContact,
    SpeakingRate,
    Engaged,
    Pauses,
    Calmness,
    NotStressed,
    Focused,
    Authentic,
    NotAwkward,
}

impl LabelName {
    pub const ALL: [LabelName; 9] = [
        LabelName::EyeContact,
        LabelName::SpeakingRate,
        LabelName::Engaged,
        LabelName::Pauses,
        LabelName::Calmness,
        LabelName::NotStressed,
        LabelName::Focused,
        LabelName::Authentic,
        LabelName::NotAwkward,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LabelName::EyeContact => "EyeContact",
            LabelName::SpeakingRate => "SpeakingRate",
            LabelName::Engaged => "Engaged",
            LabelName::Pauses => "Pauses",
            LabelName::Calmness => "Calmness",
            LabelName::NotStressed => "NotStressed",
            LabelName::Focused => "Focused",
            LabelName::Authentic => "Authentic",
            LabelName::NotAwkward => "NotAwkward",
        }
    }

    /// Human-readable row title used in rendered tables.
    pub fn title(self) -> &'static str {
        match self {
            LabelName::EyeContact => "Eye contact",
            LabelName::SpeakingRate => "Speaking rate",
            LabelName::Engaged => "Engaged",
            LabelName::Pauses => "Pauses",
            LabelName::Calmness => "Calmness",
            LabelName::NotStressed => "Not stressed",
            LabelName::Focused => "Focused",
            LabelName::Authentic => "Authentic",
            LabelName::NotAwkward => "Not awkward",
        }
    }
}

impl fmt::Display for LabelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LabelName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LabelName::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid("label", format!("unknown label `{s}`")))
    }
}

pub const MIN_SCORE: u8 = 1;
pub const MAX_SCORE: u8 = 7;

/// One recorded interview and its ground-truth scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterviewRecord {
    pub id: String,
    /// Optional candidate identifier, used for grouped folds.
    pub candidate: Option<String>,
    pub audio_path: PathBuf,
    pub landmarks_path: PathBuf,
    pub transcript_path: PathBuf,
    pub duration_s: f64,
    pub labels: BTreeMap<LabelName, u8>,
}

impl InterviewRecord {
    pub fn label(&self, name: LabelName) -> u8 {
        self.labels[&name]
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |field: &str, message: String| Error::InvalidRecord {
            record: self.id.clone(),
            field: field.to_string(),
            message,
        };
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(invalid(
                "duration_s",
                format!("must be > 0 (got {})", self.duration_s),
            ));
        }
        for name in LabelName::ALL {
            match self.labels.get(&name) {
                None => return Err(invalid("labels", format!("missing label {name}"))),
                Some(&v) if !(MIN_SCORE..=MAX_SCORE).contains(&v) => {
                    return Err(invalid(
                        "labels",
                        format!("{name} ∉ [1,7] (got {v})"),
                    ))
                }
                _ => {}
            }
        }
        if self.labels.len() != LabelName::ALL.len() {
            return Err(invalid("labels", "unexpected extra labels".into()));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct RawManifest {
    records: Vec<RawRecord>,
}

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    #[serde(default)]
    candidate: Option<String>,
    audio: String,
    landmarks: String,
    transcript: String,
    duration_s: f64,
    labels: BTreeMap<String, i64>,
}

/// Loads a JSON manifest. Paths inside it are resolved against the
/// manifest's own directory.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<InterviewRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_manifest(&text, base).map_err(|e| match e {
        Error::Parse { context, message } => Error::Parse {
            context: format!("{}{}", path.display(), context),
            message,
        },
        other => other,
    })
}

/// Parses manifest text; `base` is the directory relative paths resolve against.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<InterviewRecord>> {
    let raw: RawManifest = serde_json::from_str(text).map_err(|e| Error::Parse {
        context: format!(":{}:{}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let mut seen = HashSet::new();
    let mut records = Vec::with_capacity(raw.records.len());
    for (index, r) in raw.records.into_iter().enumerate() {
        let invalid = |field: &str, message: String| Error::InvalidRecord {
            record: r.id.clone(),
            field: field.to_string(),
            message,
        };
        if r.id.is_empty() {
            return Err(Error::Parse {
                context: format!(" record #{index}"),
                message: "empty id".into(),
            });
        }
        if !seen.insert(r.id.clone()) {
            return Err(invalid("id", "duplicate record id".into()));
        }
        let mut labels = BTreeMap::new();
        for (key, value) in &r.labels {
            let name: LabelName = key
                .parse()
                .map_err(|_| invalid("labels", format!("unknown label `{key}`")))?;
            if !(MIN_SCORE as i64..=MAX_SCORE as i64).contains(value) {
                return Err(invalid("labels", format!("{name} ∉ [1,7] (got {value})")));
            }
            labels.insert(name, *value as u8);
        }
        let record = InterviewRecord {
            id: r.id.clone(),
            candidate: r.candidate.clone(),
            audio_path: base.join(&r.audio),
            landmarks_path: base.join(&r.landmarks),
            transcript_path: base.join(&r.transcript),
            duration_s: r.duration_s,
            labels,
        };
        record.validate()?;
        records.push(record);
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Audio,
    Video,
    Lexical,
}

impl Modality {
    /// Canonical fusion order.
    pub const ORDER: [Modality; 3] = [Modality::Audio, Modality::Video, Modality::Lexical];

    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Audio => "audio",
            Modality::Video => "video",
            Modality::Lexical => "lexical",
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Modality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "audio" | "a" => Ok(Modality::Audio),
            "video" | "v" => Ok(Modality::Video),
            "lexical" | "l" | "text" => Ok(Modality::Lexical),
            _ => Err(Error::invalid("modality", format!("unknown modality `{s}`"))),
        }
    }
}

/// A non-empty subset of modalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Modality>", into = "Vec<Modality>")]
pub struct ModalityMask(u8);

impl ModalityMask {
    pub const ALL: ModalityMask = ModalityMask(0b111);

    fn bit(m: Modality) -> u8 {
        match m {
            Modality::Audio => 1,
            Modality::Video => 2,
            Modality::Lexical => 4,
        }
    }

    pub fn new(modalities: &[Modality]) -> Result<Self> {
        let bits = modalities.iter().fold(0, |acc, &m| acc | Self::bit(m));
        if bits == 0 {
            return Err(Error::invalid("modalities", "modality mask must be non-empty"));
        }
        Ok(ModalityMask(bits))
    }

    pub fn single(m: Modality) -> Self {
        ModalityMask(Self::bit(m))
    }

    pub fn contains(self, m: Modality) -> bool {
        self.0 & Self::bit(m) != 0
    }

    pub fn is_subset(self, other: ModalityMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn modalities(self) -> Vec<Modality> {
        Modality::ORDER
            .into_iter()
            .filter(|&m| self.contains(m))
            .collect()
    }

    /// All seven non-empty masks: the full set, then pairs, then singles.
    pub fn all_combinations() -> Vec<ModalityMask> {
        use Modality::*;
        [
            &[Audio, Video, Lexical][..],
            &[Audio, Video],
            &[Video, Lexical],
            &[Audio, Lexical],
            &[Audio],
            &[Video],
            &[Lexical],
        ]
        .iter()
        .map(|ms| ModalityMask::new(ms).expect("non-empty"))
        .collect()
    }
}

impl fmt::Display for ModalityMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.modalities().into_iter().map(Modality::as_str).collect();
        f.write_str(&names.join("+"))
    }
}

impl FromStr for ModalityMask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ms = s
            .split([',', '+'])
            .filter(|p| !p.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Modality>>>()?;
        ModalityMask::new(&ms)
    }
}

impl TryFrom<Vec<Modality>> for ModalityMask {
    type Error = Error;

    fn try_from(v: Vec<Modality>) -> Result<Self> {
        ModalityMask::new(&v)
    }
}

impl From<ModalityMask> for Vec<Modality> {
    fn from(m: ModalityMask) -> Self {
        m.modalities()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnDescriptor {
    pub name: String,
    pub modality: Modality,
}

/// An n × d matrix of finite values with named, modality-tagged columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    values: Array2<f64>,
    columns: Vec<ColumnDescriptor>,
    row_ids: Vec<String>,
}

impl FeatureMatrix {
    pub fn new(
        values: Array2<f64>,
        columns: Vec<ColumnDescriptor>,
        row_ids: Vec<String>,
    ) -> Result<Self> {
        if values.nrows() != row_ids.len() {
            return Err(Error::DimensionMismatch {
                context: "feature matrix rows vs row ids".into(),
                expected: row_ids.len(),
                actual: values.nrows(),
            });
        }
        if values.ncols() != columns.len() {
            return Err(Error::DimensionMismatch {
                context: "feature matrix columns vs descriptors".into(),
                expected: columns.len(),
                actual: values.ncols(),
            });
        }
        let mut names = HashSet::new();
        for c in &columns {
            if !names.insert(c.name.as_str()) {
                return Err(Error::Data(format!("duplicate column name `{}`", c.name)));
            }
        }
        if let Some(((r, c), v)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite value {v} at row `{}` column `{}`",
                row_ids[r], columns[c].name
            )));
        }
        Ok(FeatureMatrix {
            values,
            columns,
            row_ids,
        })
    }

    /// Builds a single-modality matrix from row vectors.
    pub fn from_rows(
        modality: Modality,
        names: &[String],
        row_ids: Vec<String>,
        rows: &[Vec<f64>],
    ) -> Result<Self> {
        let d = names.len();
        let mut values = Array2::zeros((rows.len(), d));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    context: format!("row `{}`", row_ids.get(i).map_or("?", |s| s)),
                    expected: d,
                    actual: row.len(),
                });
            }
            for (j, v) in row.iter().enumerate() {
                values[[i, j]] = *v;
            }
        }
        let columns = names
            .iter()
            .map(|n| ColumnDescriptor {
                name: n.clone(),
                modality,
            })
            .collect();
        FeatureMatrix::new(values, columns, row_ids)
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn columns(&self) -> &[ColumnDescriptor] {
        &self.columns
    }

    pub fn column_names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn take_rows(&self, rows: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            values: self.values.select(Axis(0), rows),
            columns: self.columns.clone(),
            row_ids: rows.iter().map(|&r| self.row_ids[r].clone()).collect(),
        }
    }

    pub fn take_columns(&self, cols: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            values: self.values.select(Axis(1), cols),
            columns: cols.iter().map(|&c| self.columns[c].clone()).collect(),
            row_ids: self.row_ids.clone(),
        }
    }

    /// Replaces the values, keeping labels. Used by transforms that preserve shape.
    pub(crate) fn with_values(&self, values: Array2<f64>) -> FeatureMatrix {
        debug_assert_eq!(values.dim(), self.values.dim());
        FeatureMatrix {
            values,
            columns: self.columns.clone(),
            row_ids: self.row_ids.clone(),
        }
    }

    /// Distinct modalities present, in canonical order.
    pub fn modalities(&self) -> Vec<Modality> {
        Modality::ORDER
            .into_iter()
            .filter(|m| self.columns.iter().any(|c| c.modality == *m))
            .collect()
    }

    /// Writes `id,<col>,...` header plus one row per record.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("id");
        for c in &self.columns {
            out.push(',');
            out.push_str(&c.name);
        }
        out.push('\n');
        for (i, id) in self.row_ids.iter().enumerate() {
            out.push_str(id);
            for v in self.values.row(i) {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn read_csv(path: impl AsRef<Path>, modality: Modality) -> Result<FeatureMatrix> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text, modality).map_err(|e| match e {
            Error::Parse { context, message } => Error::Parse {
                context: format!("{}{}", path.display(), context),
                message,
            },
            other => other,
        })
    }

    pub fn parse_csv(text: &str, modality: Modality) -> Result<FeatureMatrix> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::Parse {
            context: ":1".into(),
            message: "empty feature file".into(),
        })?;
        let mut head = header.split(',');
        if head.next() != Some("id") {
            return Err(Error::Parse {
                context: ":1".into(),
                message: "first header column must be `id`".into(),
            });
        }
        let names: Vec<String> = head.map(str::to_string).collect();
        let mut ids = Vec::new();
        let mut rows = Vec::new();
        for (lineno, line) in lines {
            let mut fields = line.split(',');
            let id = fields.next().unwrap_or_default().to_string();
            let row = fields
                .map(|f| {
                    f.trim().parse::<f64>().map_err(|e| Error::Parse {
                        context: format!(":{}", lineno + 1),
                        message: format!("`{f}`: {e}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            ids.push(id);
            rows.push(row);
        }
        FeatureMatrix::from_rows(modality, &names, ids, &rows)
    }
}

/// Concatenates the columns of `parts` whose modality is in `mask`, in the
/// fixed order audio, video, lexical.
pub fn fuse_features(parts: &[FeatureMatrix], mask: ModalityMask) -> Result<FeatureMatrix> {
    let Some(first) = parts.first() else {
        return Err(Error::Data("no feature parts to fuse".into()));
    };
    for p in &parts[1..] {
        if p.row_ids != first.row_ids {
            return Err(Error::RowIdMismatch(
                "feature parts do not share identical row ids in identical order".into(),
            ));
        }
    }
    let mut seen = Vec::new();
    for p in parts {
        for m in p.modalities() {
            if seen.contains(&m) {
                return Err(Error::Data(format!("modality {m} appears in more than one part")));
            }
            seen.push(m);
        }
    }

    let mut blocks = Vec::new();
    let mut columns = Vec::new();
    for m in mask.modalities() {
        for p in parts {
            let idx: Vec<usize> = p
                .columns
                .iter()
                .enumerate()
                .filter(|(_, c)| c.modality == m)
                .map(|(i, _)| i)
                .collect();
            if idx.is_empty() {
                continue;
            }
            blocks.push(p.values.select(Axis(1), &idx));
            columns.extend(idx.iter().map(|&i| p.columns[i].clone()));
        }
    }
    if blocks.is_empty() {
        return Err(Error::Data(format!("modality mask {mask} selects no feature part")));
    }
    let views: Vec<_> = blocks.iter().map(|b| b.view()).collect();
    let values = concatenate(Axis(1), &views).expect("row counts checked");
    FeatureMatrix::new(values, columns, first.row_ids.clone())
}

/// Per-label integer class targets, paired with a feature matrix's rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelVector {
    pub label_name: LabelName,
    pub classes: Vec<u8>,
}

impl LabelVector {
    pub fn new(label_name: LabelName, classes: Vec<u8>) -> Result<Self> {
        if let Some(c) = classes.iter().find(|c| !(MIN_SCORE..=MAX_SCORE).contains(c)) {
            return Err(Error::Data(format!("{label_name}: class {c} ∉ [1,7]")));
        }
        Ok(LabelVector {
            label_name,
            classes,
        })
    }

    /// Labels for `records` in order, matched by id against `rows`.
    pub fn from_records(
        label_name: LabelName,
        records: &[InterviewRecord],
        rows: &[String],
    ) -> Result<Self> {
        let classes = rows
            .iter()
            .map(|id| {
                records
                    .iter()
                    .find(|r| &r.id == id)
                    .map(|r| r.label(label_name))
                    .ok_or_else(|| Error::Data(format!("no manifest record for feature row `{id}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        LabelVector::new(label_name, classes)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn take(&self, rows: &[usize]) -> LabelVector {
        LabelVector {
            label_name: self.label_name,
            classes: rows.iter().map(|&r| self.classes[r]).collect(),
        }
    }
}
