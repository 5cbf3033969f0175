//! Scoring of symmetry detections and surface-normal predictions.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::geom::{angle_between_deg, axis_angle_deg, Vec3};
use crate::orientation::OrientationCodebook;
use crate::render::NormalMap;

/// Default matching threshold for symmetry AP, degrees (π/18).
pub const DEFAULT_THETA_DEG: f64 = 10.0;

/// Good-pixel thresholds, degrees.
pub const GOOD_PIXEL_THRESHOLDS: [f64; 3] = [11.25, 22.5, 30.0];

/// Error assigned to foreground pixels predicted as background, degrees.
pub const MISSED_PIXEL_ERROR_DEG: f64 = 180.0;

fn check_unit(v: Vec3) -> Result<()> {
    if libm::fabs(v.norm() - 1.0) <= 1e-6 {
        Ok(())
    } else {
        Err(invalid(alloc::format!("{v:?} is not a unit vector")))
    }
}

/// Sign-invariant angle `arccos(|a·b|)` between two plane orientations, in
/// degrees within `[0, 90]`.
pub fn angular_distance_sym(a: Vec3, b: Vec3) -> Result<f64> {
    check_unit(a)?;
    check_unit(b)?;
    Ok(axis_angle_deg(a, b))
}

/// A predicted symmetry orientation with its confidence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryPrediction {
    /// Unit plane normal.
    pub orientation: Vec3,
    /// Confidence in `[0, 1]`.
    pub confidence: f64,
}

impl SymmetryPrediction {
    /// Validates a prediction.
    pub fn new(orientation: Vec3, confidence: f64) -> Result<Self> {
        check_unit(orientation)?;
        if !(0.0..=1.0).contains(&confidence) {
            return Err(invalid(alloc::format!("confidence {confidence} outside [0, 1]")));
        }
        Ok(SymmetryPrediction { orientation, confidence })
    }
}

/// Precision-recall curve with its average precision.
#[derive(Debug, Clone, PartialEq)]
pub struct PRCurve {
    /// `(recall, precision)` after each distinct confidence level, in order of
    /// decreasing confidence (hence nondecreasing recall).
    pub points: Vec<(f64, f64)>,
    /// Area under the monotone precision envelope.
    pub ap: f64,
    /// Number of ground-truth orientations.
    pub total_gt: usize,
}

/// Average precision of symmetry detections at angular threshold `theta_deg`.
///
/// Predictions from all images are ranked by confidence (ties keep image then
/// input order). Each one, in that order, claims the closest still-unmatched
/// ground truth of its image within `theta_deg`; it is a false positive when
/// none is left. A curve point is emitted after every distinct confidence,
/// and the AP sums recall increments times the best precision reached at that
/// recall or beyond.
pub fn ap_symmetry(gt_sets: &[Vec<Vec3>], pred_sets: &[Vec<SymmetryPrediction>], theta_deg: f64) -> Result<PRCurve> {
    if gt_sets.len() != pred_sets.len() {
        return Err(invalid(alloc::format!(
            "{} ground-truth images but {} prediction images",
            gt_sets.len(),
            pred_sets.len()
        )));
    }
    if !(theta_deg >= 0.0) {
        return Err(invalid("theta must be nonnegative"));
    }
    for &g in gt_sets.iter().flatten() {
        check_unit(g)?;
    }
    for p in pred_sets.iter().flatten() {
        check_unit(p.orientation)?;
        if !p.confidence.is_finite() {
            return Err(invalid("confidences must be finite"));
        }
    }
    let total_gt: usize = gt_sets.iter().map(Vec::len).sum();
    if total_gt == 0 {
        return Err(Error::UndefinedAp);
    }

    let mut ranked: Vec<(usize, usize)> = pred_sets
        .iter()
        .enumerate()
        .flat_map(|(img, preds)| (0..preds.len()).map(move |j| (img, j)))
        .collect();
    // stable sort keeps (image, index) order among equal confidences
    ranked.sort_by(|a, b| pred_sets[b.0][b.1].confidence.total_cmp(&pred_sets[a.0][a.1].confidence));

    let mut matched: Vec<Vec<bool>> = gt_sets.iter().map(|g| alloc::vec![false; g.len()]).collect();
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut points = Vec::new();
    for (pos, &(img, j)) in ranked.iter().enumerate() {
        let pred = &pred_sets[img][j];
        let mut best: Option<(usize, f64)> = None;
        for (g, &gt) in gt_sets[img].iter().enumerate() {
            if matched[img][g] {
                continue;
            }
            let d = axis_angle_deg(pred.orientation, gt);
            if d <= theta_deg && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((g, d));
            }
        }
        match best {
            Some((g, _)) => {
                matched[img][g] = true;
                tp += 1;
            }
            None => fp += 1,
        }
        let last_of_level = ranked
            .get(pos + 1)
            .is_none_or(|&(ni, nj)| pred_sets[ni][nj].confidence != pred.confidence);
        if last_of_level {
            points.push((tp as f64 / total_gt as f64, tp as f64 / (tp + fp) as f64));
        }
    }
    let ap = envelope_area(&points);
    Ok(PRCurve { points, ap, total_gt })
}

// All-points interpolated area: Σ (r_i - r_{i-1}) · max_{k ≥ i} p_k, r_0 = 0.
fn envelope_area(points: &[(f64, f64)]) -> f64 {
    let mut envelope: Vec<f64> = points.iter().map(|p| p.1).collect();
    for i in (0..envelope.len().saturating_sub(1)).rev() {
        envelope[i] = envelope[i].max(envelope[i + 1]);
    }
    let mut prev_recall = 0.0;
    let mut area = 0.0;
    for (i, &(r, _)) in points.iter().enumerate() {
        area += (r - prev_recall) * envelope[i];
        prev_recall = r;
    }
    area
}

/// Uninformed baseline: every codebook direction for every image, each with
/// an independent uniform confidence.
pub fn random_baseline(codebook: &OrientationCodebook, images: usize, seed: u64) -> Vec<Vec<SymmetryPrediction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..images)
        .map(|_| {
            codebook
                .directions()
                .iter()
                .map(|&d| SymmetryPrediction { orientation: d, confidence: rng.random::<f64>() })
                .collect()
        })
        .collect()
}

/// The five surface-normal metrics plus the good-pixel curve.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalMetrics {
    /// Mean angular error, degrees.
    pub mean_err_deg: f64,
    /// Median angular error (lower middle for even counts), degrees.
    pub median_err_deg: f64,
    /// Fraction of pixels within 11.25°.
    pub gp_11_25: f64,
    /// Fraction of pixels within 22.5°.
    pub gp_22_5: f64,
    /// Fraction of pixels within 30°.
    pub gp_30: f64,
    /// `(threshold_deg, fraction)` at 0°, 1°, …, 30°.
    pub curve: Vec<(f64, f64)>,
    /// Trapezoidal area under `curve`, divided by 30.
    pub auc_30: f64,
    /// Number of pixels scored.
    pub pixels: usize,
}

/// Angular error at every ground-truth foreground pixel, in row-major order.
/// Pixels the prediction leaves as background score
/// [`MISSED_PIXEL_ERROR_DEG`].
pub fn pixel_errors(gt: &NormalMap, pred: &NormalMap) -> Result<Vec<f64>> {
    if gt.width() != pred.width() || gt.height() != pred.height() {
        return Err(invalid(alloc::format!(
            "dimension mismatch: ground truth {}x{}, prediction {}x{}",
            gt.width(),
            gt.height(),
            pred.width(),
            pred.height()
        )));
    }
    let mut errors = Vec::new();
    for k in 0..gt.mask().len() {
        if !gt.mask()[k] {
            continue;
        }
        errors.push(if pred.mask()[k] {
            angle_between_deg(gt.normals()[k], pred.normals()[k])
        } else {
            MISSED_PIXEL_ERROR_DEG
        });
    }
    if errors.is_empty() {
        return Err(Error::NoForeground);
    }
    Ok(errors)
}

/// Scores `pred` against the foreground of `gt`.
pub fn normal_metrics(gt: &NormalMap, pred: &NormalMap) -> Result<NormalMetrics> {
    metrics_from_errors(&pixel_errors(gt, pred)?)
}

/// Fraction of errors at or below `threshold_deg`.
fn fraction_within(sorted: &[f64], threshold_deg: f64) -> f64 {
    sorted.partition_point(|&e| e <= threshold_deg) as f64 / sorted.len() as f64
}

/// Metrics over a pooled set of per-pixel errors.
pub fn metrics_from_errors(errors: &[f64]) -> Result<NormalMetrics> {
    if errors.is_empty() {
        return Err(Error::NoForeground);
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mean_err_deg = sorted.iter().sum::<f64>() / n as f64;
    let median_err_deg = sorted[(n - 1) / 2];
    let curve: Vec<(f64, f64)> = (0..=30).map(|t| (t as f64, fraction_within(&sorted, t as f64))).collect();
    let auc_30 = curve.windows(2).map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0)).sum::<f64>() / 30.0;
    Ok(NormalMetrics {
        mean_err_deg,
        median_err_deg,
        gp_11_25: fraction_within(&sorted, GOOD_PIXEL_THRESHOLDS[0]),
        gp_22_5: fraction_within(&sorted, GOOD_PIXEL_THRESHOLDS[1]),
        gp_30: fraction_within(&sorted, GOOD_PIXEL_THRESHOLDS[2]),
        curve,
        auc_30,
        pixels: n,
    })
}

/// Per-pixel errors of one evaluated image, tagged with its category.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedErrors {
    /// Object category of the image.
    pub category: String,
    /// Foreground pixel errors, degrees.
    pub errors: Vec<f64>,
}

/// Per-category metrics and their unweighted average.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryReport {
    /// Metrics per category, sorted by name.
    pub per_category: Vec<(String, NormalMetrics)>,
    /// Unweighted mean over categories of every metric and curve point.
    pub macro_avg: NormalMetrics,
}

/// Pools pixel errors within each category and averages across categories.
/// With `known` set, tags outside it are rejected and listed in the error.
pub fn aggregate_by_category(records: &[TaggedErrors], known: Option<&[&str]>) -> Result<CategoryReport> {
    if let Some(known) = known {
        let mut unknown: Vec<&str> = records
            .iter()
            .map(|r| r.category.as_str())
            .filter(|c| !known.contains(c))
            .collect();
        unknown.sort_unstable();
        unknown.dedup();
        if !unknown.is_empty() {
            return Err(Error::UnknownCategories(unknown.join(", ")));
        }
    }
    let mut pooled: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for r in records {
        pooled.entry(r.category.as_str()).or_default().extend_from_slice(&r.errors);
    }
    let mut per_category = Vec::with_capacity(pooled.len());
    for (cat, errs) in pooled {
        per_category.push((String::from(cat), metrics_from_errors(&errs)?));
    }
    if per_category.is_empty() {
        return Err(Error::NoForeground);
    }
    let macro_avg = macro_average(per_category.iter().map(|(_, m)| m));
    Ok(CategoryReport { per_category, macro_avg })
}

fn macro_average<'a>(metrics: impl Iterator<Item = &'a NormalMetrics> + Clone) -> NormalMetrics {
    let n = metrics.clone().count() as f64;
    let avg = |f: &dyn Fn(&NormalMetrics) -> f64| metrics.clone().map(f).sum::<f64>() / n;
    let first = metrics.clone().next().expect("at least one category");
    let curve = (0..first.curve.len())
        .map(|i| (first.curve[i].0, avg(&|m| m.curve[i].1)))
        .collect();
    NormalMetrics {
        mean_err_deg: avg(&|m| m.mean_err_deg),
        median_err_deg: avg(&|m| m.median_err_deg),
        gp_11_25: avg(&|m| m.gp_11_25),
        gp_22_5: avg(&|m| m.gp_22_5),
        gp_30: avg(&|m| m.gp_30),
        curve,
        auc_30: avg(&|m| m.auc_30),
        pixels: metrics.map(|m| m.pixels).sum(),
    }
}

/// Ground truth and predictions of one image for symmetry scoring.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryImage {
    /// Object category of the image.
    pub category: String,
    /// Ground-truth plane orientations.
    pub gt: Vec<Vec3>,
    /// Predicted orientations.
    pub predictions: Vec<SymmetryPrediction>,
}

/// Per-category symmetry AP and its unweighted mean.
#[derive(Debug, Clone, PartialEq)]
pub struct ApReport {
    /// Curve per category with defined AP, sorted by name.
    pub per_category: Vec<(String, PRCurve)>,
    /// Categories skipped because they have no ground-truth planes.
    pub undefined: Vec<String>,
    /// Mean AP over `per_category`; `None` when it is empty.
    pub macro_ap: Option<f64>,
}

/// Pools the images of each category into one precision-recall curve.
pub fn ap_by_category(images: &[SymmetryImage], theta_deg: f64) -> Result<ApReport> {
    let mut groups: BTreeMap<&str, (Vec<Vec<Vec3>>, Vec<Vec<SymmetryPrediction>>)> = BTreeMap::new();
    for im in images {
        let g = groups.entry(im.category.as_str()).or_default();
        g.0.push(im.gt.clone());
        g.1.push(im.predictions.clone());
    }
    let mut per_category = Vec::new();
    let mut undefined = Vec::new();
    for (cat, (gt, preds)) in groups {
        match ap_symmetry(&gt, &preds, theta_deg) {
            Ok(curve) => per_category.push((String::from(cat), curve)),
            Err(Error::UndefinedAp) => undefined.push(String::from(cat)),
            Err(e) => return Err(e),
        }
    }
    let macro_ap = (!per_category.is_empty())
        .then(|| per_category.iter().map(|(_, c)| c.ap).sum::<f64>() / per_category.len() as f64);
    Ok(ApReport { per_category, undefined, macro_ap })
}
