//! Corpus building: model selection, splits, rendering and sidecar files.

use std::path::{Path, PathBuf};

use log::{info, warn};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use symnorm_core::orientation::{
    fibonacci_codebook, make_symmetry_label, rotate_orientations, sample_view, CodebookSupport, OrientationCodebook,
    ViewDistribution,
};
use symnorm_core::render::{discretize_normal_map, rasterize};
use symnorm_core::{detect_symmetries, Vec3};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::formats::{obj, pnm, symfile};
use crate::io::write_atomic;
use crate::manifest::{self, Manifest, SampleRecord, Split};
use crate::registry::CategoryRegistry;

/// File name of the manifest inside a build directory.
pub const MANIFEST_FILE: &str = "manifest.tsv";
/// File name of the resolved run configuration inside a build directory.
pub const CONFIG_FILE: &str = "config.txt";

/// Fraction of each category's models assigned to training (rounded down).
pub const TRAIN_FRACTION: f64 = 0.75;

/// Maps a camera-frame direction into the frame symmetry labels live in:
/// `(x, -z, y)`, so the camera's up axis becomes `+z` and horizontal
/// directions lie in `z = 0`. The result is sign-canonical.
pub fn camera_to_label_frame(v: Vec3) -> Vec3 {
    Vec3::new(v.x, -v.z, v.y).canonical_sign()
}

/// Largest `|z|` of a label-frame orientation a horizontal-circle codebook
/// represents: normals closer to vertical than horizontal have no bin.
pub const HORIZONTAL_MAX_ABS_Z: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Camera-frame plane normals as label-frame orientations for a codebook of
/// the given support. Horizontal-circle codebooks drop near-vertical normals.
pub fn label_orientations(camera_normals: &[Vec3], support: CodebookSupport) -> Vec<Vec3> {
    camera_normals
        .iter()
        .map(|&n| camera_to_label_frame(n))
        .filter(|n| support != CodebookSupport::HorizontalCircle || n.z.abs() <= HORIZONTAL_MAX_ABS_Z)
        .collect()
}

/// Derives an independent stream seed from the run seed and a label.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    // FNV-1a, then a splitmix64 finalizer
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Model selection of one category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategorySplit {
    /// Category name.
    pub category: String,
    /// `(model_id, obj path, split)` in manifest order (sorted by id).
    pub models: Vec<(String, PathBuf, Split)>,
}

/// Lists `<category>/*.obj`, caps the list after a seeded shuffle of the
/// sorted ids and assigns the first `floor(0.75 n)` to training.
pub fn split_category(dir: &Path, category: &str, cap: usize, seed: u64) -> Result<CategorySplit> {
    let mut models: Vec<(String, PathBuf)> = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("obj") || !path.is_file() {
            continue;
        }
        match path.file_stem().and_then(|s| s.to_str()) {
            Some(stem) if !stem.contains(['\t', '\n', '\r']) => models.push((stem.to_string(), path.clone())),
            _ => warn!("{}: unusable file name, skipped", path.display()),
        }
    }
    models.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &format!("split/{category}")));
    models.shuffle(&mut rng);
    models.truncate(cap);
    let n_train = (TRAIN_FRACTION * models.len() as f64).floor() as usize;
    let mut tagged: Vec<(String, PathBuf, Split)> = models
        .into_iter()
        .enumerate()
        .map(|(i, (id, p))| (id, p, if i < n_train { Split::Train } else { Split::Test }))
        .collect();
    tagged.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(CategorySplit { category: category.to_string(), models: tagged })
}

/// Outcome of a corpus build.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildSummary {
    /// The written manifest.
    pub manifest: Manifest,
    /// Non-fatal problems, in a stable order.
    pub warnings: Vec<String>,
    /// Models that were skipped, with reasons.
    pub skipped: Vec<(String, String)>,
}

/// Symmetry and normal codebooks of a run.
pub fn run_codebooks(cfg: &RunConfig) -> Result<(OrientationCodebook, OrientationCodebook)> {
    let (support, k) = cfg.symmetry_codebook();
    Ok((fibonacci_codebook(k, support)?, fibonacci_codebook(cfg.normal_codebook_k, CodebookSupport::Hemisphere)?))
}

/// Builds a corpus from `corpus_root/<category>/<model_id>.obj` into
/// `out_dir`: symmetry planes per model, and per view a normal map, depth
/// map and label map, plus `manifest.tsv` and `config.txt`.
pub fn build_manifest(
    corpus_root: &Path,
    out_dir: &Path,
    registry: &CategoryRegistry,
    cfg: &RunConfig,
) -> Result<BuildSummary> {
    cfg.validate()?;
    let corpus_root = corpus_root.canonicalize().map_err(|e| Error::io(corpus_root, e))?;
    let mut warnings = Vec::new();

    let mut present: Vec<String> = Vec::new();
    for entry in std::fs::read_dir(&corpus_root).map_err(|e| Error::io(&corpus_root, e))? {
        let path = entry.map_err(|e| Error::io(&corpus_root, e))?.path();
        if path.is_dir() {
            if let Some(name) = path.file_name().and_then(|n| n.to_str()) {
                present.push(name.to_string());
            }
        }
    }
    present.sort();
    for name in &present {
        if !registry.contains(name) {
            warnings.push(format!("directory `{name}` is not a registered category; ignored"));
        }
    }
    let missing: Vec<&str> =
        registry.categories().iter().filter(|c| !present.contains(c)).map(String::as_str).collect();
    if !missing.is_empty() {
        warnings.push(format!("{} categories missing from corpus: {}", missing.len(), missing.join(", ")));
    }

    let mut jobs: Vec<(String, String, PathBuf, Split)> = Vec::new();
    for cat in present.iter().filter(|c| registry.contains(c)) {
        let split = split_category(&corpus_root.join(cat), cat, cfg.models_per_category, cfg.seed)?;
        jobs.extend(split.models.into_iter().map(|(id, p, s)| (cat.clone(), id, p, s)));
    }

    let (sym_cb, normal_cb) = run_codebooks(cfg)?;
    let results: Vec<std::result::Result<Vec<SampleRecord>, String>> = jobs
        .par_iter()
        .map(|(cat, id, path, split)| {
            build_model(cat, id, path, *split, out_dir, cfg, &sym_cb, &normal_cb).map_err(|e| e.to_string())
        })
        .collect();

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    let mut usable: std::collections::BTreeMap<&str, usize> = Default::default();
    for ((cat, id, _, _), res) in jobs.iter().zip(results) {
        match res {
            Ok(recs) => {
                *usable.entry(cat).or_default() += 1;
                records.extend(recs);
            }
            Err(reason) => {
                warn!("{cat}/{id}: skipped: {reason}");
                skipped.push((format!("{cat}/{id}"), reason));
            }
        }
    }
    for cat in present.iter().filter(|c| registry.contains(c)) {
        if usable.get(cat.as_str()).copied().unwrap_or(0) == 0 {
            warnings.push(format!("category `{cat}` has no usable models"));
        }
    }
    for w in &warnings {
        warn!("{w}");
    }

    let manifest = Manifest {
        symmetry_codebook: (sym_cb.support(), sym_cb.k()),
        normal_codebook_k: normal_cb.k(),
        records,
    };
    write_atomic(&out_dir.join(MANIFEST_FILE), manifest.to_text()?.as_bytes())?;
    write_atomic(&out_dir.join(CONFIG_FILE), cfg.to_text().as_bytes())?;
    info!("wrote {} records to {}", manifest.records.len(), out_dir.join(MANIFEST_FILE).display());
    Ok(BuildSummary { manifest, warnings, skipped })
}

#[allow(clippy::too_many_arguments)]
fn build_model(
    category: &str,
    model_id: &str,
    obj_path: &Path,
    split: Split,
    out_dir: &Path,
    cfg: &RunConfig,
    sym_cb: &OrientationCodebook,
    normal_cb: &OrientationCodebook,
) -> Result<Vec<SampleRecord>> {
    let bytes = std::fs::read(obj_path).map_err(|e| Error::io(obj_path, e))?;
    let mesh = obj::parse_obj(&bytes, obj_path)?;
    let mut detector = cfg.detector_config();
    detector.seed = derive_seed(cfg.seed, &format!("detect/{category}/{model_id}"));
    let planes = detect_symmetries(&mesh, &detector)?;
    let sym_text = symfile::write_planes(&planes, &[format!("{category}/{model_id}")]);
    write_atomic(&out_dir.join(manifest::symmetry_rel(category, model_id)), sym_text.as_bytes())?;
    let world_normals: Vec<Vec3> = planes.iter().map(|p| p.normal).collect();

    let dist = ViewDistribution::new(cfg.view_setting);
    let mut records = Vec::with_capacity(cfg.per_model_views);
    for view in 0..cfg.per_model_views {
        let pose = sample_view(&dist, derive_seed(cfg.seed, &format!("view/{category}/{model_id}/{view}")));
        let nm = rasterize(&mesh, &pose, &cfg.camera)?;
        let labels = discretize_normal_map(&nm, normal_cb)?;
        let in_camera = rotate_orientations(&world_normals, pose.rotation());
        let symmetry_label = make_symmetry_label(&label_orientations(&in_camera, sym_cb.support()), sym_cb)?;

        let id = manifest::image_id(category, model_id, view);
        let (normals_img, depth_img) = pnm::normal_map_to_images(&nm);
        write_atomic(&out_dir.join(manifest::normal_map_rel(&id)), &pnm::write_pfm(&normals_img))?;
        write_atomic(&out_dir.join(manifest::depth_map_rel(&id)), &pnm::write_pfm(&depth_img))?;
        write_atomic(
            &out_dir.join(manifest::label_map_rel(&id)),
            &pnm::write_pgm16(labels.width(), labels.height(), labels.labels()),
        )?;
        records.push(SampleRecord {
            model_id: model_id.to_string(),
            category: category.to_string(),
            obj_path: obj_path.to_path_buf(),
            pose,
            normal_map_path: manifest::normal_map_rel(&id),
            label_map_path: manifest::label_map_rel(&id),
            symmetry_label,
            view_setting: cfg.view_setting,
            split,
        });
    }
    Ok(records)
}

/// Ground-truth symmetry orientations of a record in the label frame, as
/// representable by a codebook of `support`.
pub fn record_symmetry_orientations(
    record: &SampleRecord,
    base: &Path,
    support: CodebookSupport,
) -> Result<Vec<Vec3>> {
    let path = base.join(record.symmetry_path());
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let planes = symfile::read_planes(&text, &path)?;
    let normals: Vec<Vec3> = planes.iter().map(|p| p.normal).collect();
    Ok(label_orientations(&rotate_orientations(&normals, record.pose.rotation()), support))
}
