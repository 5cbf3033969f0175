//! Flat `key = value` run configuration.

use std::fmt::Write as _;
use std::path::Path;

use symnorm_core::orientation::{CodebookSupport, ViewSetting};
use symnorm_core::render::CameraIntrinsics;
use symnorm_core::symmetry::DetectorConfig;

use crate::error::{Error, Result};

/// Every tunable of a run, with the library defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Symmetry detector settings; its seed mirrors [`RunConfig::seed`].
    pub detector: DetectorConfig,
    /// Render resolution, field of view and framing margin.
    pub camera: CameraIntrinsics,
    /// Bins of the hemisphere codebook used for normal labels.
    pub normal_codebook_k: usize,
    /// Bins of the symmetry codebook; `None` uses the view setting's default.
    pub symmetry_codebook_k: Option<usize>,
    /// Viewpoint distribution.
    pub view_setting: ViewSetting,
    /// Renderings per model.
    pub per_model_views: usize,
    /// Maximum models kept per category.
    pub models_per_category: usize,
    /// Master seed.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            detector: DetectorConfig::default(),
            camera: CameraIntrinsics::with_size(224, 224),
            normal_codebook_k: 60,
            symmetry_codebook_k: None,
            view_setting: ViewSetting::Natural,
            per_model_views: 200,
            models_per_category: 200,
            seed: 0,
        }
    }
}

/// Recognized configuration keys, in serialization order.
pub const KEYS: &[&str] = &[
    "seed",
    "sample_count",
    "pair_count",
    "cluster_angle_deg",
    "cluster_offset_frac",
    "max_hypotheses",
    "icp_max_iters",
    "icp_converge_deg",
    "icp_reject_frac",
    "accept_residual",
    "dedupe_angle_deg",
    "width",
    "height",
    "fov_y_deg",
    "auto_frame_margin",
    "normal_codebook_k",
    "symmetry_codebook_k",
    "view_setting",
    "per_model_views",
    "models_per_category",
];

impl RunConfig {
    /// Symmetry codebook shape for the configured view setting.
    pub fn symmetry_codebook(&self) -> (CodebookSupport, usize) {
        let (support, k) = self.view_setting.default_symmetry_codebook();
        (support, self.symmetry_codebook_k.unwrap_or(k))
    }

    /// Detector settings with the run seed applied.
    pub fn detector_config(&self) -> DetectorConfig {
        DetectorConfig { seed: self.seed, ..self.detector.clone() }
    }

    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
            value.parse().map_err(|_| format!("`{key}`: cannot parse `{value}`"))
        }
        let d = &mut self.detector;
        match key {
            "seed" => self.seed = num(key, value)?,
            "sample_count" => d.sample_count = num(key, value)?,
            "pair_count" => d.pair_count = num(key, value)?,
            "cluster_angle_deg" => d.cluster_angle_deg = num(key, value)?,
            "cluster_offset_frac" => d.cluster_offset_frac = num(key, value)?,
            "max_hypotheses" => d.max_hypotheses = num(key, value)?,
            "icp_max_iters" => d.icp_max_iters = num(key, value)?,
            "icp_converge_deg" => d.icp_converge_deg = num(key, value)?,
            "icp_reject_frac" => d.icp_reject_frac = num(key, value)?,
            "accept_residual" => d.accept_residual = num(key, value)?,
            "dedupe_angle_deg" => d.dedupe_angle_deg = num(key, value)?,
            "width" => self.camera.width = num(key, value)?,
            "height" => self.camera.height = num(key, value)?,
            "fov_y_deg" => self.camera.fov_y_deg = num(key, value)?,
            "auto_frame_margin" => self.camera.auto_frame_margin = num(key, value)?,
            "normal_codebook_k" => self.normal_codebook_k = num(key, value)?,
            "symmetry_codebook_k" => {
                self.symmetry_codebook_k = if value == "auto" { None } else { Some(num(key, value)?) }
            }
            "view_setting" => {
                self.view_setting =
                    ViewSetting::from_tag(value).ok_or_else(|| format!("`{key}`: expected V_N or V_D, got `{value}`"))?
            }
            "per_model_views" => self.per_model_views = num(key, value)?,
            "models_per_category" => self.models_per_category = num(key, value)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Text value of one key.
    pub fn get(&self, key: &str) -> Option<String> {
        let d = &self.detector;
        Some(match key {
            "seed" => self.seed.to_string(),
            "sample_count" => d.sample_count.to_string(),
            "pair_count" => d.pair_count.to_string(),
            "cluster_angle_deg" => d.cluster_angle_deg.to_string(),
            "cluster_offset_frac" => d.cluster_offset_frac.to_string(),
            "max_hypotheses" => d.max_hypotheses.to_string(),
            "icp_max_iters" => d.icp_max_iters.to_string(),
            "icp_converge_deg" => d.icp_converge_deg.to_string(),
            "icp_reject_frac" => d.icp_reject_frac.to_string(),
            "accept_residual" => d.accept_residual.to_string(),
            "dedupe_angle_deg" => d.dedupe_angle_deg.to_string(),
            "width" => self.camera.width.to_string(),
            "height" => self.camera.height.to_string(),
            "fov_y_deg" => self.camera.fov_y_deg.to_string(),
            "auto_frame_margin" => self.camera.auto_frame_margin.to_string(),
            "normal_codebook_k" => self.normal_codebook_k.to_string(),
            "symmetry_codebook_k" => self.symmetry_codebook_k.map_or("auto".into(), |k| k.to_string()),
            "view_setting" => self.view_setting.tag().into(),
            "per_model_views" => self.per_model_views.to_string(),
            "models_per_category" => self.models_per_category.to_string(),
            _ => return None,
        })
    }

    /// Merges `key = value` lines into `self`. Blank lines and `#` comments
    /// are skipped; unknown keys and duplicates are errors.
    pub fn merge_text(&mut self, text: &str, path: &Path) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(path, k + 1, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::parse(path, k + 1, format!("duplicate key `{key}`")));
            }
            self.set(key, value).map_err(|m| Error::parse(path, k + 1, m))?;
        }
        self.validate()
    }

    /// Reads a config file over the defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = RunConfig::default();
        cfg.merge_text(&text, path)?;
        Ok(cfg)
    }

    /// Serializes every key, one per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let _ = writeln!(out, "{key} = {}", self.get(key).expect("listed key"));
        }
        out
    }

    /// Checks detector and camera invariants and codebook sizes.
    pub fn validate(&self) -> Result<()> {
        self.detector_config().validate()?;
        self.camera.validate()?;
        if self.normal_codebook_k == 0 || self.symmetry_codebook().1 == 0 {
            return Err(Error::Input("codebook sizes must be positive".into()));
        }
        if self.normal_codebook_k > u16::MAX as usize - 1 {
            return Err(Error::Input("normal_codebook_k must fit 16-bit labels".into()));
        }
        if self.models_per_category == 0 {
            return Err(Error::Input("models_per_category must be positive".into()));
        }
        Ok(())
    }
}
