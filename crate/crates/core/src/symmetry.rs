//! Global reflection-symmetry planes of a mesh.
//!
//! The pipeline samples the surface, votes plane hypotheses from random point
//! pairs, refines each hypothesis with reflective ICP, drops planes whose
//! reflected samples do not land back on the surface, and suppresses near
//! duplicates.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::geom::{axis_angle_deg, to_radians, Mat3, Vec3};
use crate::mesh::{sample_surface, SurfaceSamples, TriangleMesh};
use crate::nn::NearestNeighbors;

/// A reflection plane `{x : normal · x = offset}` with its fit residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryPlane {
    /// Unit normal, sign-canonical under the (z, y, x) rule.
    pub normal: Vec3,
    /// Signed offset along the normal, in model units.
    pub offset: f64,
    /// Fit residual from [`score_plane`]; zero until scored.
    pub residual: f64,
}

impl SymmetryPlane {
    /// Builds a plane from any nonzero normal. The normal is normalized and
    /// sign-canonicalized, flipping the offset with it so the point set is
    /// unchanged.
    pub fn new(normal: Vec3, offset: f64) -> Result<Self> {
        let len = normal.norm();
        let unit = normal
            .try_normalize()
            .ok_or_else(|| invalid("plane normal must be nonzero and finite"))?;
        let offset = offset / len * if unit.sign_flip_needed() { -1.0 } else { 1.0 };
        Ok(SymmetryPlane { normal: unit.canonical_sign(), offset, residual: 0.0 })
    }

    /// Same plane carrying a residual.
    pub fn with_residual(mut self, residual: f64) -> Self {
        self.residual = residual;
        self
    }

    /// Signed distance of `p` from the plane.
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Tunables of the symmetry detector. Fractions are relative to the bounding
/// box diagonal of the surface samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    /// Surface samples drawn from the mesh.
    pub sample_count: usize,
    /// Random point pairs voting for plane hypotheses.
    pub pair_count: usize,
    /// Angular radius of a vote cluster, degrees.
    pub cluster_angle_deg: f64,
    /// Offset radius of a vote cluster.
    pub cluster_offset_frac: f64,
    /// Clusters kept as hypotheses, most votes first.
    pub max_hypotheses: usize,
    /// ICP iteration cap.
    pub icp_max_iters: usize,
    /// ICP stops once the normal rotates less than this, degrees.
    pub icp_converge_deg: f64,
    /// Correspondences farther apart than this are rejected.
    pub icp_reject_frac: f64,
    /// Planes with a larger residual are discarded.
    pub accept_residual: f64,
    /// Minimum angle between two kept planes, degrees.
    pub dedupe_angle_deg: f64,
    /// Seed for sampling and pair drawing.
    pub seed: u64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            sample_count: 4000,
            pair_count: 20000,
            cluster_angle_deg: 10.0,
            cluster_offset_frac: 0.05,
            max_hypotheses: 32,
            icp_max_iters: 30,
            icp_converge_deg: 0.1,
            icp_reject_frac: 0.05,
            accept_residual: 0.002,
            dedupe_angle_deg: 10.0,
            seed: 0,
        }
    }
}

impl DetectorConfig {
    /// Checks that every threshold is strictly positive and the angular
    /// radii stay below 90°.
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("sample_count", self.sample_count),
            ("pair_count", self.pair_count),
            ("max_hypotheses", self.max_hypotheses),
            ("icp_max_iters", self.icp_max_iters),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(invalid(alloc::format!("{name} must be positive")));
            }
        }
        let reals = [
            ("cluster_angle_deg", self.cluster_angle_deg),
            ("cluster_offset_frac", self.cluster_offset_frac),
            ("icp_converge_deg", self.icp_converge_deg),
            ("icp_reject_frac", self.icp_reject_frac),
            ("accept_residual", self.accept_residual),
            ("dedupe_angle_deg", self.dedupe_angle_deg),
        ];
        for (name, v) in reals {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(alloc::format!("{name} must be positive, got {v}")));
            }
        }
        if self.cluster_angle_deg >= 90.0 || self.dedupe_angle_deg >= 90.0 {
            return Err(invalid("cluster_angle_deg and dedupe_angle_deg must be below 90"));
        }
        Ok(())
    }
}

/// Mirror image of `p` across `plane`: `p - 2 (n·p - b) n`.
pub fn reflect_point(p: Vec3, plane: &SymmetryPlane) -> Vec3 {
    p - plane.normal * (2.0 * plane.signed_distance(p))
}

/// A vote cluster produced by [`generate_hypotheses_with_votes`].
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    /// Cluster representative (residual unset).
    pub plane: SymmetryPlane,
    /// Number of pair votes in the cluster.
    pub votes: usize,
}

struct Cluster {
    sum_normal: Vec3,
    sum_offset: f64,
    votes: usize,
    rep_normal: Vec3,
    rep_offset: f64,
}

impl Cluster {
    fn new(normal: Vec3, offset: f64) -> Self {
        Cluster { sum_normal: normal, sum_offset: offset, votes: 1, rep_normal: normal, rep_offset: offset }
    }

    fn add(&mut self, normal: Vec3, offset: f64) {
        self.sum_normal += normal;
        self.sum_offset += offset;
        self.votes += 1;
        let mean_offset = self.sum_offset / self.votes as f64;
        match SymmetryPlane::new(self.sum_normal, mean_offset * self.sum_normal.norm()) {
            Ok(p) => {
                self.rep_normal = p.normal;
                self.rep_offset = p.offset;
            }
            // votes cancelled out; keep the previous representative
            Err(_) => {}
        }
    }
}

/// Plane hypotheses from point-pair voting, most-voted first.
pub fn generate_hypotheses(samples: &SurfaceSamples, config: &DetectorConfig) -> Result<Vec<SymmetryPlane>> {
    Ok(generate_hypotheses_with_votes(samples, config)?.into_iter().map(|h| h.plane).collect())
}

/// Like [`generate_hypotheses`] but keeps the vote counts.
///
/// Each ordered pair `(p, q)` votes for the plane that reflects `p` onto `q`:
/// normal `(p - q)/|p - q|` and offset `n·(p + q)/2`. Votes join the first
/// cluster whose representative is within `cluster_angle_deg` (sign-invariant)
/// and `cluster_offset_frac` of the diagonal in offset, otherwise they open a
/// new cluster.
pub fn generate_hypotheses_with_votes(
    samples: &SurfaceSamples,
    config: &DetectorConfig,
) -> Result<Vec<Hypothesis>> {
    config.validate()?;
    let pts = &samples.points;
    if pts.len() < 2 {
        return Err(Error::InsufficientGeometry("fewer than 2 sample points"));
    }
    let diag = samples.bbox_diagonal();
    let min_sep = 1e-6 * diag;
    if !(diag > 0.0) || !pts.iter().any(|p| p.distance(pts[0]) > min_sep) {
        return Err(Error::InsufficientGeometry("fewer than 2 distinct sample points"));
    }

    let cos_tol = libm::cos(to_radians(config.cluster_angle_deg));
    let offset_tol = config.cluster_offset_frac * diag;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut drawn = 0usize;
    let max_attempts = config.pair_count.saturating_mul(50).max(1000);
    let mut attempts = 0usize;
    while drawn < config.pair_count && attempts < max_attempts {
        attempts += 1;
        let i = rng.random_range(0..pts.len());
        let j = rng.random_range(0..pts.len());
        let (p, q) = (pts[i], pts[j]);
        let d = p - q;
        let len = d.norm();
        if !(len > min_sep) {
            continue;
        }
        drawn += 1;
        let vote = match SymmetryPlane::new(d / len, d.dot((p + q) * 0.5) / len) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let hit = clusters.iter_mut().find_map(|c| {
            let dot = vote.normal.dot(c.rep_normal);
            if libm::fabs(dot) < cos_tol {
                return None;
            }
            let (n, b) = if dot < 0.0 { (-vote.normal, -vote.offset) } else { (vote.normal, vote.offset) };
            (libm::fabs(b - c.rep_offset) <= offset_tol).then_some((c, n, b))
        });
        match hit {
            Some((c, n, b)) => c.add(n, b),
            None => clusters.push(Cluster::new(vote.normal, vote.offset)),
        }
    }
    if clusters.is_empty() {
        return Err(Error::InsufficientGeometry("no valid point pairs"));
    }
    // stable: equal vote counts keep creation order
    clusters.sort_by(|a, b| b.votes.cmp(&a.votes));
    clusters.truncate(config.max_hypotheses);
    Ok(clusters
        .into_iter()
        .map(|c| Hypothesis {
            plane: SymmetryPlane { normal: c.rep_normal, offset: c.rep_offset, residual: 0.0 },
            votes: c.votes,
        })
        .collect())
}

struct Correspondences {
    // (original index, nearest sample index, distance)
    matches: Vec<(usize, usize, f64)>,
    residual: f64,
}

// Reflects every sample and matches it to its nearest original sample.
//
// A match within `near` of a sample carrying a normal contributes its
// distance to that sample's tangent plane, so that random sample spacing
// along the surface does not count as misfit. Other matches contribute their
// full distance.
fn correspond(nn: &NearestNeighbors<'_>, normals: &[Vec3], plane: &SymmetryPlane, near: f64, diag: f64) -> Correspondences {
    let pts = nn.points();
    let mut matches = Vec::with_capacity(pts.len());
    let mut total = 0.0;
    for (i, &p) in pts.iter().enumerate() {
        let r = reflect_point(p, plane);
        let (j, dist) = nn.nearest(r).expect("non-empty point set");
        let n = normals[j];
        total += if dist <= near && n != Vec3::ZERO { libm::fabs((r - pts[j]).dot(n)) } else { dist };
        matches.push((i, j, dist));
    }
    Correspondences { matches, residual: normalized_residual(total / pts.len() as f64, diag) }
}

fn normalized_residual(mean: f64, diag: f64) -> f64 {
    if mean == 0.0 {
        0.0
    } else {
        mean / diag
    }
}

/// Misfit of a plane: mean over reflected samples of the distance to the
/// nearest original sample, divided by the bounding-box diagonal of the
/// samples. Matches closer than 5% of the diagonal to a sample with a normal
/// are measured along that normal (point-to-plane).
pub fn score_plane(samples: &SurfaceSamples, plane: &SymmetryPlane) -> f64 {
    score_plane_with(samples, plane, DetectorConfig::default().icp_reject_frac)
}

/// [`score_plane`] with an explicit point-to-plane radius (fraction of the
/// diagonal).
pub fn score_plane_with(samples: &SurfaceSamples, plane: &SymmetryPlane, near_frac: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let diag = samples.bbox_diagonal();
    let near = near_frac * diag;
    let nn = NearestNeighbors::new(&samples.points);
    correspond(&nn, &samples.normals, plane, near, diag).residual
}

/// Outcome of a traced ICP refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct IcpTrace {
    /// Refined plane carrying its residual.
    pub plane: SymmetryPlane,
    /// Accepted plane updates.
    pub iterations: usize,
    /// Residual of the input plane followed by the residual after each
    /// accepted update; nonincreasing.
    pub residuals: Vec<f64>,
}

/// Refines a plane by reflective ICP; see [`refine_plane_icp_traced`].
pub fn refine_plane_icp(
    samples: &SurfaceSamples,
    plane: &SymmetryPlane,
    config: &DetectorConfig,
) -> Result<SymmetryPlane> {
    Ok(refine_plane_icp_traced(samples, plane, config)?.plane)
}

// Rounding slack when comparing residuals of successive ICP updates.
const RESIDUAL_SLACK: f64 = 1e-12;

/// Reflective ICP.
///
/// Each iteration reflects the samples, matches every reflected point to its
/// nearest original and drops matches longer than `icp_reject_frac` of the
/// diagonal. The plane is then refit from the surviving matches. With sample
/// normals this is a Gauss-Newton step on the point-to-plane misfit
/// `(reflect(p) - q)·m_q`. Without normals the normal is the principal
/// eigenvector of `Σ dᵢdᵢᵀ` over the match differences and the offset is the
/// normal projected onto the mean match midpoint. An update whose residual is
/// higher than the current one (beyond 1e-12 rounding slack) is not taken and
/// ends the refinement.
pub fn refine_plane_icp_traced(
    samples: &SurfaceSamples,
    plane: &SymmetryPlane,
    config: &DetectorConfig,
) -> Result<IcpTrace> {
    config.validate()?;
    if samples.is_empty() {
        return Err(invalid("no samples to refine against"));
    }
    let diag = samples.bbox_diagonal();
    let reject = config.icp_reject_frac * diag;
    let nn = NearestNeighbors::new(&samples.points);
    let normals = &samples.normals;
    let with_normals = normals.iter().any(|&n| n != Vec3::ZERO);

    let mut current = SymmetryPlane::new(plane.normal, plane.offset)?;
    let mut corr = correspond(&nn, normals, &current, reject, diag);
    let mut residuals = alloc::vec![corr.residual];
    let mut iterations = 0;

    for _ in 0..config.icp_max_iters {
        let candidate = if with_normals {
            fit_point_to_plane(samples, &current, &corr, reject)?
        } else {
            fit_point_to_point(samples, &corr, reject)?
        };
        let next = correspond(&nn, normals, &candidate, reject, diag);
        if next.residual > corr.residual + RESIDUAL_SLACK {
            break;
        }
        let rotation = axis_angle_deg(candidate.normal, current.normal);
        current = candidate;
        corr = next;
        residuals.push(corr.residual);
        iterations += 1;
        if rotation < config.icp_converge_deg {
            break;
        }
    }
    Ok(IcpTrace { plane: current.with_residual(corr.residual), iterations, residuals })
}

fn fit_point_to_point(samples: &SurfaceSamples, corr: &Correspondences, reject: f64) -> Result<SymmetryPlane> {
    let pts = &samples.points;
    let min_sep = 1e-6 * samples.bbox_diagonal();
    let mut scatter = Mat3::ZERO;
    let mut informative = 0usize;
    let mut mid_sum = Vec3::ZERO;
    let mut surviving = 0usize;
    for &(i, j, dist) in &corr.matches {
        if dist > reject {
            continue;
        }
        surviving += 1;
        let (p, q) = (pts[i], pts[j]);
        mid_sum += (p + q) * 0.5;
        let d = p - q;
        if d.norm() > min_sep {
            scatter += Mat3::outer(d, d);
            informative += 1;
        }
    }
    if surviving == 0 {
        return Err(Error::RefinementDiverged);
    }
    if informative < 3 {
        return Err(Error::DegenerateCorrespondences(informative));
    }
    let (axis, _) = scatter.principal_eigenvector_symmetric();
    let normal = axis.canonical_sign();
    let mid = mid_sum / surviving as f64;
    SymmetryPlane::new(normal, normal.dot(mid))
}

// Linearizing reflect(p) = p - 2(n·p - b)n around the current plane with
// n = n0 + u·t1 + v·t2 and b = b0 + w gives the misfit
// e ≈ e0 - 2u(c p·t1 + s m·t1) - 2v(c p·t2 + s m·t2) + 2cw,
// where c = n0·m and s = n0·p - b0. The normal equations are solved by
// eigendecomposition, ignoring directions the matches do not constrain.
fn fit_point_to_plane(
    samples: &SurfaceSamples,
    current: &SymmetryPlane,
    corr: &Correspondences,
    reject: f64,
) -> Result<SymmetryPlane> {
    let (pts, normals) = (&samples.points, &samples.normals);
    let n0 = current.normal;
    let helper = if libm::fabs(n0.x) < 0.9 { Vec3::X } else { Vec3::Y };
    let t1 = n0.cross(helper).try_normalize().ok_or(Error::RefinementDiverged)?;
    let t2 = n0.cross(t1);
    let mut ata = Mat3::ZERO;
    let mut atb = Vec3::ZERO;
    let mut used = 0usize;
    for &(i, j, dist) in &corr.matches {
        let m = normals[j];
        if dist > reject || m == Vec3::ZERO {
            continue;
        }
        let p = pts[i];
        let (c, s) = (n0.dot(m), current.signed_distance(p));
        let e0 = (reflect_point(p, current) - pts[j]).dot(m);
        let g = p * c + m * s;
        let row = Vec3::new(-2.0 * g.dot(t1), -2.0 * g.dot(t2), 2.0 * c);
        ata += Mat3::outer(row, row);
        atb += row * -e0;
        used += 1;
    }
    if used == 0 {
        return Err(Error::RefinementDiverged);
    }
    if used < 3 {
        return Err(Error::DegenerateCorrespondences(used));
    }
    let (values, vectors) = ata.symmetric_eigen();
    let top = values.iter().fold(0.0f64, |a, &v| a.max(v));
    if !(top > 0.0) {
        return Err(Error::DegenerateCorrespondences(used));
    }
    let mut step = Vec3::ZERO;
    for k in 0..3 {
        if values[k] > 1e-9 * top {
            let v = vectors.column(k);
            step += v * (v.dot(atb) / values[k]);
        }
    }
    SymmetryPlane::new(n0 + t1 * step.x + t2 * step.y, current.offset + step.z)
}

fn plane_order(a: &SymmetryPlane, b: &SymmetryPlane) -> core::cmp::Ordering {
    a.residual
        .total_cmp(&b.residual)
        .then(a.normal.z.total_cmp(&b.normal.z))
        .then(a.normal.y.total_cmp(&b.normal.y))
        .then(a.normal.x.total_cmp(&b.normal.x))
        .then(a.offset.total_cmp(&b.offset))
}

/// Keeps the best-fitting plane of every group of planes closer than
/// `angle_deg` (sign-invariant). Output is sorted by ascending residual.
pub fn dedupe_planes(planes: &[SymmetryPlane], angle_deg: f64) -> Vec<SymmetryPlane> {
    let mut sorted = planes.to_vec();
    sorted.sort_by(plane_order);
    let mut kept: Vec<SymmetryPlane> = Vec::new();
    for p in sorted {
        if kept.iter().all(|k| axis_angle_deg(k.normal, p.normal) > angle_deg) {
            kept.push(p);
        }
    }
    kept
}

/// Planes through the sample centroid perpendicular to the principal axes of
/// the samples. Every reflection symmetry maps the centroid and the scatter
/// matrix onto themselves, so these are natural seeds alongside voting.
pub fn principal_planes(samples: &SurfaceSamples) -> Vec<SymmetryPlane> {
    if samples.is_empty() {
        return Vec::new();
    }
    let n = samples.len() as f64;
    let centroid = samples.points.iter().fold(Vec3::ZERO, |acc, &p| acc + p) / n;
    let scatter = samples.points.iter().fold(Mat3::ZERO, |acc, &p| acc + Mat3::outer(p - centroid, p - centroid));
    let (_, vectors) = scatter.symmetric_eigen();
    (0..3)
        .filter_map(|k| {
            let axis = vectors.column(k);
            SymmetryPlane::new(axis, axis.dot(centroid)).ok()
        })
        .collect()
}

/// Full extraction pipeline: sample, vote, refine, accept, dedupe.
///
/// The principal-axis planes of [`principal_planes`] are refined along with
/// the voted hypotheses. Returns an empty list when no plane fits within
/// `accept_residual`.
pub fn detect_symmetries(mesh: &TriangleMesh, config: &DetectorConfig) -> Result<Vec<SymmetryPlane>> {
    config.validate()?;
    let samples = sample_surface(mesh, config.sample_count, config.seed)?;
    let mut seeds = principal_planes(&samples);
    seeds.extend(generate_hypotheses(&samples, config)?);
    let accepted: Vec<SymmetryPlane> = seeds
        .iter()
        .filter_map(|h| refine_plane_icp(&samples, h, config).ok())
        .filter(|p| p.residual <= config.accept_residual)
        .collect();
    Ok(dedupe_planes(&accepted, config.dedupe_angle_deg))
}
