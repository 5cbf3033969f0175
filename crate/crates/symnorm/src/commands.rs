//! Subcommand implementations shared by the binary and the tests.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use log::warn;

use symnorm_core::eval::{
    aggregate_by_category, ap_by_category, pixel_errors, random_baseline, ApReport, CategoryReport, NormalMetrics,
    SymmetryImage, SymmetryPrediction, TaggedErrors,
};
use symnorm_core::orientation::{fibonacci_codebook, ViewPose};
use symnorm_core::render::{discretize_normal_map, labels_to_normals, rasterize, NormalMap};
use symnorm_core::{detect_symmetries, SymmetryPlane, Vec3};

use crate::config::RunConfig;
use crate::dataset::{self, BuildSummary};
use crate::error::{Error, Result};
use crate::formats::{obj, pnm, symfile};
use crate::io::{read, write_atomic};
use crate::manifest::{Manifest, SampleRecord, Split};
use crate::registry::CategoryRegistry;

/// Which records of a manifest a command uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitFilter {
    /// Every record.
    #[default]
    All,
    /// Training records only.
    Train,
    /// Test records only.
    Test,
}

impl SplitFilter {
    fn keeps(self, r: &SampleRecord) -> bool {
        match self {
            SplitFilter::All => true,
            SplitFilter::Train => r.split == Split::Train,
            SplitFilter::Test => r.split == Split::Test,
        }
    }
}

fn load_mesh(path: &Path) -> Result<symnorm_core::TriangleMesh> {
    obj::parse_obj(&read(path)?, path)
}

/// Detects the symmetry planes of one mesh and renders them as a plane file.
pub fn cmd_detect(obj_path: &Path, cfg: &RunConfig) -> Result<(Vec<SymmetryPlane>, String)> {
    cfg.validate()?;
    let mesh = load_mesh(obj_path)?;
    let det = cfg.detector_config();
    let planes = detect_symmetries(&mesh, &det)?;
    let comments = [
        "nx ny nz b residual".to_string(),
        format!("seed={} sample_count={} accept_residual={}", det.seed, det.sample_count, det.accept_residual),
    ];
    let text = symfile::write_planes(&planes, &comments);
    Ok((planes, text))
}

/// Files written by [`cmd_render`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderOutputs {
    /// Camera-frame normals.
    pub normals: PathBuf,
    /// Depth.
    pub depth: PathBuf,
    /// Normal bins.
    pub labels: PathBuf,
}

/// Renders one pose and writes `<prefix>.normals.pfm`, `<prefix>.depth.pfm`
/// and `<prefix>.labels.pgm`.
pub fn cmd_render(obj_path: &Path, pose: &ViewPose, cfg: &RunConfig, prefix: &Path) -> Result<RenderOutputs> {
    cfg.validate()?;
    let mesh = load_mesh(obj_path)?;
    let nm = rasterize(&mesh, pose, &cfg.camera)?;
    let (_, normal_cb) = dataset::run_codebooks(cfg)?;
    let labels = discretize_normal_map(&nm, &normal_cb)?;
    let with_suffix = |s: &str| {
        let mut name = prefix.as_os_str().to_os_string();
        name.push(s);
        PathBuf::from(name)
    };
    let out = RenderOutputs {
        normals: with_suffix(".normals.pfm"),
        depth: with_suffix(".depth.pfm"),
        labels: with_suffix(".labels.pgm"),
    };
    let (n_img, d_img) = pnm::normal_map_to_images(&nm);
    write_atomic(&out.normals, &pnm::write_pfm(&n_img))?;
    write_atomic(&out.depth, &pnm::write_pfm(&d_img))?;
    write_atomic(&out.labels, &pnm::write_pgm16(labels.width(), labels.height(), labels.labels()))?;
    Ok(out)
}

/// Builds a corpus; see [`dataset::build_manifest`].
pub fn cmd_build(corpus_root: &Path, out_dir: &Path, cfg: &RunConfig) -> Result<BuildSummary> {
    dataset::build_manifest(corpus_root, out_dir, &CategoryRegistry::default(), cfg)
}

/// Parses a prediction file: `image_id<TAB>nx<TAB>ny<TAB>nz<TAB>confidence`
/// per line; blank and `#` lines are skipped.
pub fn parse_predictions(text: &str, path: &Path) -> Result<Vec<(String, SymmetryPrediction)>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: &str| Error::parse(path, k + 1, m);
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(err("expected `image_id nx ny nz confidence` separated by tabs"));
        }
        let nums = cols[1..]
            .iter()
            .map(|t| t.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| err("non-numeric orientation or confidence"))?;
        let dir = Vec3::new(nums[0], nums[1], nums[2])
            .try_normalize()
            .ok_or_else(|| err("zero orientation"))?;
        let pred = SymmetryPrediction::new(dir, nums[3]).map_err(|e| err(&e.to_string()))?;
        out.push((cols[0].to_string(), pred));
    }
    Ok(out)
}

/// Renders predictions in the format [`parse_predictions`] reads.
pub fn format_predictions(preds: &[(String, SymmetryPrediction)]) -> String {
    let mut out = String::new();
    for (id, p) in preds {
        let o = p.orientation;
        let _ = writeln!(out, "{id}\t{}\t{}\t{}\t{}", o.x, o.y, o.z, p.confidence);
    }
    out
}

/// Symmetry evaluation result.
#[derive(Debug, Clone, PartialEq)]
pub struct SymReport {
    /// Per-category curves and macro AP.
    pub ap: ApReport,
    /// Human-readable summary.
    pub text: String,
    /// Tab-separated summary.
    pub tsv: String,
}

/// Scores symmetry predictions against a manifest and writes
/// `sym_report.txt`, `sym_report.tsv` and `pr/<category>.csv` under `out_dir`.
pub fn cmd_eval_sym(
    manifest_path: &Path,
    predictions_path: &Path,
    theta_deg: f64,
    split: SplitFilter,
    out_dir: &Path,
) -> Result<SymReport> {
    let (manifest, base) = Manifest::load(manifest_path)?;
    let text = std::fs::read_to_string(predictions_path).map_err(|e| Error::io(predictions_path, e))?;
    let preds = parse_predictions(&text, predictions_path)?;

    let mut images: Vec<SymmetryImage> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for r in manifest.records.iter().filter(|r| split.keeps(r)) {
        index.insert(r.image_id(), images.len());
        images.push(SymmetryImage {
            category: r.category.clone(),
            gt: dataset::record_symmetry_orientations(r, &base, manifest.symmetry_codebook.0)?,
            predictions: Vec::new(),
        });
    }
    for (id, p) in preds {
        let slot = *index
            .get(&id)
            .ok_or_else(|| Error::Input(format!("{}: unknown image id `{id}`", predictions_path.display())))?;
        images[slot].predictions.push(p);
    }
    let ap = ap_by_category(&images, theta_deg)?;

    let mut text = format!("symmetry AP at {theta_deg} degrees\n");
    let mut tsv = String::from("category\tap\ttotal_gt\n");
    for (cat, curve) in &ap.per_category {
        let _ = writeln!(text, "{cat:<24} AP {:.4}  ({} ground-truth planes)", curve.ap, curve.total_gt);
        let _ = writeln!(tsv, "{cat}\t{}\t{}", curve.ap, curve.total_gt);
        let mut csv = String::from("recall,precision\n");
        for (r, p) in &curve.points {
            let _ = writeln!(csv, "{r},{p}");
        }
        write_atomic(&out_dir.join("pr").join(format!("{cat}.csv")), csv.as_bytes())?;
    }
    for cat in &ap.undefined {
        let _ = writeln!(text, "{cat:<24} AP undefined (no ground-truth planes)");
        let _ = writeln!(tsv, "{cat}\tNA\t0");
    }
    let total: usize = ap.per_category.iter().map(|(_, c)| c.total_gt).sum();
    match ap.macro_ap {
        Some(m) => {
            let _ = writeln!(text, "{:<24} AP {m:.4}", "macro");
            let _ = writeln!(tsv, "macro\t{m}\t{total}");
        }
        None => {
            let _ = writeln!(text, "{:<24} AP undefined", "macro");
            let _ = writeln!(tsv, "macro\tNA\t0");
        }
    }
    write_atomic(&out_dir.join("sym_report.txt"), text.as_bytes())?;
    write_atomic(&out_dir.join("sym_report.tsv"), tsv.as_bytes())?;
    Ok(SymReport { ap, text, tsv })
}

/// Surface-normal evaluation result.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalsReport {
    /// Per-category and macro metrics; `None` if no image could be scored.
    pub metrics: Option<CategoryReport>,
    /// `(image_id, reason)` for every skipped image.
    pub failures: Vec<(String, String)>,
    /// Human-readable summary.
    pub text: String,
    /// Tab-separated summary.
    pub tsv: String,
}

fn load_prediction(pred_dir: &Path, image_id: &str, k: usize) -> Result<NormalMap> {
    let pgm = pred_dir.join(format!("{image_id}.pgm"));
    let pfm = pred_dir.join(format!("{image_id}.pfm"));
    if pgm.is_file() {
        let labels = pnm::label_map_from_pgm(&read(&pgm)?, k, &pgm)?;
        let cb = fibonacci_codebook(k, symnorm_core::orientation::CodebookSupport::Hemisphere)?;
        Ok(labels_to_normals(&labels, &cb)?)
    } else if pfm.is_file() {
        let img = pnm::read_pfm(&read(&pfm)?, &pfm)?;
        pnm::normal_map_from_images(&img, None, &pfm)
    } else {
        Err(Error::Input(format!("no prediction `{}` or `{}`", pgm.display(), pfm.display())))
    }
}

fn load_ground_truth(base: &Path, r: &SampleRecord) -> Result<NormalMap> {
    let path = base.join(&r.normal_map_path);
    let img = pnm::read_pfm(&read(&path)?, &path)?;
    pnm::normal_map_from_images(&img, None, &path)
}

fn metric_row(name: &str, m: &NormalMetrics) -> String {
    format!(
        "{name}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
        m.pixels, m.mean_err_deg, m.median_err_deg, m.gp_11_25, m.gp_22_5, m.gp_30, m.auc_30
    )
}

fn metric_line(name: &str, m: &NormalMetrics) -> String {
    format!(
        "{name:<24} mean {:7.3}  median {:7.3}  <11.25 {:6.2}%  <22.5 {:6.2}%  <30 {:6.2}%  auc {:.4}\n",
        m.mean_err_deg,
        m.median_err_deg,
        100.0 * m.gp_11_25,
        100.0 * m.gp_22_5,
        100.0 * m.gp_30,
        m.auc_30
    )
}

/// Scores predicted normal or label maps in `pred_dir` (`<image_id>.pgm` or
/// `<image_id>.pfm`) and writes `normals_report.txt`, `normals_report.tsv`
/// and `gp_curve.csv`. Images that cannot be scored are skipped and listed
/// in [`NormalsReport::failures`].
pub fn cmd_eval_normals(
    manifest_path: &Path,
    pred_dir: &Path,
    split: SplitFilter,
    out_dir: &Path,
) -> Result<NormalsReport> {
    let (manifest, base) = Manifest::load(manifest_path)?;
    let registry = CategoryRegistry::default();
    let known: Vec<&str> = registry.categories().iter().map(String::as_str).collect();
    let mut tagged = Vec::new();
    let mut failures = Vec::new();
    for r in manifest.records.iter().filter(|r| split.keeps(r)) {
        let id = r.image_id();
        let scored = load_ground_truth(&base, r).and_then(|gt| {
            let pred = load_prediction(pred_dir, &id, manifest.normal_codebook_k)?;
            Ok(pixel_errors(&gt, &pred)?)
        });
        match scored {
            Ok(errors) => tagged.push(TaggedErrors { category: r.category.clone(), errors }),
            Err(e) => {
                warn!("{id}: {e}");
                failures.push((id, e.to_string()));
            }
        }
    }
    let metrics = if tagged.is_empty() { None } else { Some(aggregate_by_category(&tagged, Some(&known))?) };

    let mut text = String::from("surface normal errors (degrees)\n");
    let mut tsv = String::from("category\tpixels\tmean_deg\tmedian_deg\tgp_11_25\tgp_22_5\tgp_30\tauc_30\n");
    if let Some(rep) = &metrics {
        for (cat, m) in &rep.per_category {
            text.push_str(&metric_line(cat, m));
            tsv.push_str(&metric_row(cat, m));
        }
        text.push_str(&metric_line("macro", &rep.macro_avg));
        tsv.push_str(&metric_row("macro", &rep.macro_avg));
        let mut csv = String::from("threshold_deg");
        for (cat, _) in &rep.per_category {
            let _ = write!(csv, ",{cat}");
        }
        csv.push_str(",macro\n");
        for (i, (t, macro_frac)) in rep.macro_avg.curve.iter().enumerate() {
            let _ = write!(csv, "{t}");
            for (_, m) in &rep.per_category {
                let _ = write!(csv, ",{}", m.curve[i].1);
            }
            let _ = writeln!(csv, ",{macro_frac}");
        }
        write_atomic(&out_dir.join("gp_curve.csv"), csv.as_bytes())?;
    }
    for (id, reason) in &failures {
        let _ = writeln!(text, "skipped {id}: {reason}");
    }
    write_atomic(&out_dir.join("normals_report.txt"), text.as_bytes())?;
    write_atomic(&out_dir.join("normals_report.tsv"), tsv.as_bytes())?;
    Ok(NormalsReport { metrics, failures, text, tsv })
}

/// Uniform-confidence predictions for every image: each direction of a
/// `k`-bin codebook with the manifest's symmetry support.
pub fn cmd_baseline(manifest_path: &Path, k: Option<usize>, seed: u64, split: SplitFilter) -> Result<String> {
    let (manifest, _) = Manifest::load(manifest_path)?;
    let (support, default_k) = manifest.symmetry_codebook;
    let cb = fibonacci_codebook(k.unwrap_or(default_k), support)?;
    let ids: Vec<String> = manifest.records.iter().filter(|r| split.keeps(r)).map(SampleRecord::image_id).collect();
    let preds = random_baseline(&cb, ids.len(), seed);
    let flat: Vec<(String, SymmetryPrediction)> = ids
        .iter()
        .zip(preds)
        .flat_map(|(id, ps)| ps.into_iter().map(move |p| (id.clone(), p)))
        .collect();
    Ok(format_predictions(&flat))
}
