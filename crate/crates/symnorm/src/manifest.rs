//! Tab-separated corpus manifests.
//!
//! ```text
//! #codebook: symmetry=horizontal_circle:10 normals=hemisphere:60
//! #fields: model_id  category  obj_path  pose  normal_map_path  label_map_path  symmetry_label  view_setting  split
//! ```
//!
//! `pose` is `azimuth,elevation,cyclo` in degrees and `symmetry_label` a
//! string of `0`/`1` flags. Sidecar paths are relative to the manifest's
//! directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use symnorm_core::orientation::{CodebookSupport, ViewPose, ViewSetting};

use crate::error::{Error, Result};

/// Column names in file order.
pub const FIELDS: [&str; 9] = [
    "model_id",
    "category",
    "obj_path",
    "pose",
    "normal_map_path",
    "label_map_path",
    "symmetry_label",
    "view_setting",
    "split",
];

/// Model-level train/test assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    /// Training model.
    Train,
    /// Held-out model.
    Test,
}

impl Split {
    /// Lowercase name.
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }

    /// Parses [`Split::name`].
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "train" => Some(Split::Train),
            "test" => Some(Split::Test),
            _ => None,
        }
    }
}

/// One rendering of one model.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    /// Model file stem.
    pub model_id: String,
    /// Category name.
    pub category: String,
    /// Source mesh.
    pub obj_path: PathBuf,
    /// Camera pose of the rendering.
    pub pose: ViewPose,
    /// Camera-frame normals (3-channel PFM).
    pub normal_map_path: PathBuf,
    /// Normal bins (16-bit PGM).
    pub label_map_path: PathBuf,
    /// Multi-label symmetry target over the symmetry codebook.
    pub symmetry_label: Vec<bool>,
    /// Viewpoint distribution the pose was drawn from.
    pub view_setting: ViewSetting,
    /// Train or test.
    pub split: Split,
}

/// Identifier of the `view`-th rendering of a model.
pub fn image_id(category: &str, model_id: &str, view: usize) -> String {
    format!("{category}/{model_id}/{view:03}")
}

/// Manifest-relative location of the normal map of `image_id`.
pub fn normal_map_rel(image_id: &str) -> PathBuf {
    PathBuf::from(format!("normals/{image_id}.pfm"))
}

/// Manifest-relative location of the depth map of `image_id`.
pub fn depth_map_rel(image_id: &str) -> PathBuf {
    PathBuf::from(format!("depth/{image_id}.pfm"))
}

/// Manifest-relative location of the label map of `image_id`.
pub fn label_map_rel(image_id: &str) -> PathBuf {
    PathBuf::from(format!("labels/{image_id}.pgm"))
}

/// Manifest-relative location of a model's symmetry planes (model frame).
pub fn symmetry_rel(category: &str, model_id: &str) -> PathBuf {
    PathBuf::from(format!("symmetry/{category}/{model_id}.sym"))
}

impl SampleRecord {
    /// Image identifier: the normal map path without its `normals/`
    /// directory and extension.
    pub fn image_id(&self) -> String {
        let p = self.normal_map_path.to_string_lossy();
        let p = p.strip_prefix("normals/").unwrap_or(&p);
        p.strip_suffix(".pfm").unwrap_or(p).to_string()
    }

    /// Depth map next to the normal map.
    pub fn depth_map_path(&self) -> PathBuf {
        depth_map_rel(&self.image_id())
    }

    /// Symmetry planes of the record's model.
    pub fn symmetry_path(&self) -> PathBuf {
        symmetry_rel(&self.category, &self.model_id)
    }
}

/// A manifest: codebook shapes plus records.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    /// Symmetry label codebook.
    pub symmetry_codebook: (CodebookSupport, usize),
    /// Bins of the hemisphere normal codebook.
    pub normal_codebook_k: usize,
    /// Records sorted by category, model and view.
    pub records: Vec<SampleRecord>,
}

fn pose_text(p: &ViewPose) -> String {
    format!("{},{},{}", p.azimuth_deg(), p.elevation_deg(), p.cyclo_deg())
}

impl Manifest {
    /// Serializes the manifest. Fields must not contain tabs or newlines.
    pub fn to_text(&self) -> Result<String> {
        let mut out = String::new();
        let (support, k) = self.symmetry_codebook;
        let _ = writeln!(out, "#codebook: symmetry={}:{k} normals=hemisphere:{}", support.name(), self.normal_codebook_k);
        let _ = writeln!(out, "#fields: {}", FIELDS.join("\t"));
        for r in &self.records {
            let cols = [
                r.model_id.clone(),
                r.category.clone(),
                r.obj_path.to_string_lossy().into_owned(),
                pose_text(&r.pose),
                r.normal_map_path.to_string_lossy().into_owned(),
                r.label_map_path.to_string_lossy().into_owned(),
                r.symmetry_label.iter().map(|&b| if b { '1' } else { '0' }).collect(),
                r.view_setting.tag().to_string(),
                r.split.name().to_string(),
            ];
            if let Some(bad) = cols.iter().find(|c| c.contains(['\t', '\n', '\r'])) {
                return Err(Error::Input(format!("manifest field `{bad}` contains a tab or newline")));
            }
            let _ = writeln!(out, "{}", cols.join("\t"));
        }
        Ok(out)
    }

    /// Parses manifest text; `path` labels errors.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut codebook: Option<((CodebookSupport, usize), usize)> = None;
        let mut fields_seen = false;
        let mut records = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line_no = k + 1;
            let err = |m: String| Error::parse(path, line_no, m);
            if let Some(rest) = line.strip_prefix("#codebook:") {
                codebook = Some(parse_codebook_header(rest).map_err(err)?);
                continue;
            }
            if let Some(rest) = line.strip_prefix("#fields:") {
                let cols: Vec<&str> = rest.trim().split('\t').collect();
                if cols != FIELDS {
                    return Err(err(format!("unexpected field list `{}`", rest.trim())));
                }
                fields_seen = true;
                continue;
            }
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            if !fields_seen {
                return Err(err("record before the `#fields:` header".into()));
            }
            let Some(((support, k_sym), _)) = codebook else {
                return Err(err("record before the `#codebook:` header".into()));
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != FIELDS.len() {
                return Err(err(format!("expected {} fields, found {}", FIELDS.len(), cols.len())));
            }
            let angles = cols[3]
                .split(',')
                .map(|t| t.parse::<f64>().ok())
                .collect::<Option<Vec<f64>>>()
                .filter(|a| a.len() == 3)
                .ok_or_else(|| err(format!("bad pose `{}`", cols[3])))?;
            let pose = ViewPose::new(angles[0], angles[1], angles[2]).map_err(|e| err(e.to_string()))?;
            let symmetry_label = cols[6]
                .chars()
                .map(|c| match c {
                    '0' => Some(false),
                    '1' => Some(true),
                    _ => None,
                })
                .collect::<Option<Vec<bool>>>()
                .ok_or_else(|| err("symmetry label must be 0/1 flags".into()))?;
            if symmetry_label.len() != k_sym {
                return Err(err(format!(
                    "symmetry label has {} flags, codebook has {k_sym} ({})",
                    symmetry_label.len(),
                    support.name()
                )));
            }
            records.push(SampleRecord {
                model_id: cols[0].to_string(),
                category: cols[1].to_string(),
                obj_path: PathBuf::from(cols[2]),
                pose,
                normal_map_path: PathBuf::from(cols[4]),
                label_map_path: PathBuf::from(cols[5]),
                symmetry_label,
                view_setting: ViewSetting::from_tag(cols[7]).ok_or_else(|| err(format!("bad view setting `{}`", cols[7])))?,
                split: Split::from_name(cols[8]).ok_or_else(|| err(format!("bad split `{}`", cols[8])))?,
            });
        }
        let Some((symmetry_codebook, normal_codebook_k)) = codebook else {
            return Err(Error::format(path, "missing `#codebook:` header"));
        };
        if !fields_seen {
            return Err(Error::format(path, "missing `#fields:` header"));
        }
        Ok(Manifest { symmetry_codebook, normal_codebook_k, records })
    }

    /// Reads a manifest file, returning it with the directory its relative
    /// paths resolve against.
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Manifest::parse(&text, path)?, base))
    }
}

fn parse_codebook_header(rest: &str) -> std::result::Result<((CodebookSupport, usize), usize), String> {
    let mut symmetry = None;
    let mut normals = None;
    for item in rest.split_whitespace() {
        let (key, value) = item.split_once('=').ok_or_else(|| format!("bad codebook entry `{item}`"))?;
        let (support, k) = value.split_once(':').ok_or_else(|| format!("bad codebook entry `{item}`"))?;
        let support = CodebookSupport::from_name(support).ok_or_else(|| format!("unknown support `{support}`"))?;
        let k: usize = k.parse().map_err(|_| format!("bad codebook size `{k}`"))?;
        match key {
            "symmetry" => symmetry = Some((support, k)),
            "normals" if support == CodebookSupport::Hemisphere => normals = Some(k),
            "normals" => return Err("normal codebook must be a hemisphere".into()),
            _ => return Err(format!("unknown codebook `{key}`")),
        }
    }
    Ok((symmetry.ok_or("missing symmetry codebook")?, normals.ok_or("missing normal codebook")?))
}
