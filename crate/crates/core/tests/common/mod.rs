#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symnorm_core::geom::{to_radians, Mat3, Vec3};
use symnorm_core::shapes::{cuboid, regular_prism, tetrahedron};
use symnorm_core::symmetry::{reflect_point, SymmetryPlane};
use symnorm_core::TriangleMesh;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

pub fn random_rotation(rng: &mut impl Rng) -> Mat3 {
    Mat3::rotation_axis_angle(random_unit(rng), rng.random_range(0.0..core::f64::consts::TAU))
}

/// Rotates `n` by `deg` about a random axis perpendicular to it.
pub fn perturb(n: Vec3, deg: f64, rng: &mut impl Rng) -> Vec3 {
    let axis = n.cross(random_unit(rng)).try_normalize().unwrap();
    Mat3::rotation_axis_angle(axis, to_radians(deg)) * n
}

pub fn cuboid_fixture() -> TriangleMesh {
    cuboid(2.0, 3.0, 5.0).unwrap()
}

pub fn plate_fixture() -> TriangleMesh {
    cuboid(4.0, 4.0, 0.4).unwrap()
}

pub fn hex_prism_fixture() -> TriangleMesh {
    regular_prism(6, 1.0, 0.8).unwrap()
}

/// Edge lengths 1, 2, 3, √5, √10, √13 are all distinct, so no isometry other
/// than the identity maps the tetrahedron onto itself.
pub fn asymmetric_tetrahedron() -> TriangleMesh {
    tetrahedron([Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 2.0, 0.0), Vec3::new(0.0, 0.0, 3.0)]).unwrap()
}

pub fn axis_normals() -> Vec<Vec3> {
    vec![Vec3::X, Vec3::Y, Vec3::Z]
}

/// Symmetry normals of the square plate: the two edge bisectors, the two
/// diagonals and the midplane.
pub fn plate_normals() -> Vec<Vec3> {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    vec![Vec3::X, Vec3::Y, Vec3::new(s, s, 0.0), Vec3::new(s, -s, 0.0), Vec3::Z]
}

/// Symmetry normals of the hexagonal prism with a corner on +x: six vertical
/// planes every 30° plus the midplane.
pub fn hex_prism_normals() -> Vec<Vec3> {
    let mut v: Vec<Vec3> = (0..6)
        .map(|k| {
            let a = to_radians(30.0 * k as f64);
            Vec3::new(libm::cos(a), libm::sin(a), 0.0)
        })
        .collect();
    v.push(Vec3::Z);
    v
}

/// Random cloud on one side of `plane` plus its mirror image.
pub fn mirrored_cloud(plane: &SymmetryPlane, half: usize, rng: &mut impl Rng) -> Vec<Vec3> {
    let mut pts = Vec::with_capacity(2 * half);
    while pts.len() < half {
        let p = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if plane.signed_distance(p) > 0.05 {
            pts.push(p);
        }
    }
    let mirrored: Vec<Vec3> = pts.iter().map(|&p| reflect_point(p, plane)).collect();
    pts.extend(mirrored);
    pts
}

/// Minimum over all assignments of the largest sign-invariant angle between
/// matched normals; `None` when the counts differ.
pub fn best_matching_max_angle(a: &[Vec3], b: &[Vec3]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut idx: Vec<usize> = (0..b.len()).collect();
    let mut best = f64::INFINITY;
    permute(&mut idx, 0, &mut |perm| {
        let worst = a
            .iter()
            .zip(perm)
            .map(|(x, &j)| symnorm_core::geom::axis_angle_deg(*x, b[j]))
            .fold(0.0, f64::max);
        best = best.min(worst);
    });
    Some(best)
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Sign-invariant angle via arccos, independent of the library's atan2 form.
pub fn acos_axis_angle_deg(a: Vec3, b: Vec3) -> f64 {
    a.dot(b).abs().min(1.0).acos().to_degrees()
}

/// Result of the brute-force AP oracle.
pub struct OracleAp {
    /// (recall, precision) per distinct confidence, highest confidence first.
    pub points: Vec<(f64, f64)>,
    pub ap: f64,
    /// Whether some cutoff matches every ground truth with no false positive.
    pub clean_cutoff_exists: bool,
    /// Ground truth matched at the lowest cutoff, per image.
    pub matched: Vec<Vec<bool>>,
}

/// Enumerates every distinct confidence cutoff, re-runs the confidence-ordered
/// greedy matching from scratch on the predictions at or above it, checks the
/// greedy true-positive count against an exhaustive maximum matching, and
/// integrates the precision envelope as max precision over recall ≥ r.
pub fn brute_force_ap(gt: &[Vec<Vec3>], preds: &[Vec<(Vec3, f64)>], theta: f64) -> OracleAp {
    let total: usize = gt.iter().map(Vec::len).sum();
    let mut flat: Vec<(f64, usize, usize)> = Vec::new();
    for (img, ps) in preds.iter().enumerate() {
        for (j, p) in ps.iter().enumerate() {
            flat.push((p.1, img, j));
        }
    }
    flat.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut cutoffs: Vec<f64> = flat.iter().map(|f| f.0).collect();
    cutoffs.dedup();

    let mut points = Vec::new();
    let mut clean = false;
    let mut matched: Vec<Vec<bool>> = gt.iter().map(|g| vec![false; g.len()]).collect();
    for &t in &cutoffs {
        let prefix: Vec<&(f64, usize, usize)> = flat.iter().filter(|f| f.0 >= t).collect();
        let mut used: Vec<Vec<bool>> = gt.iter().map(|g| vec![false; g.len()]).collect();
        let (mut tp, mut fp) = (0usize, 0usize);
        for &&(_, img, j) in &prefix {
            let dir = preds[img][j].0;
            let mut best: Option<(usize, f64)> = None;
            for (g, &v) in gt[img].iter().enumerate() {
                let d = acos_axis_angle_deg(dir, v);
                if !used[img][g] && d <= theta && best.map_or(true, |b| d < b.1) {
                    best = Some((g, d));
                }
            }
            match best {
                Some((g, _)) => {
                    used[img][g] = true;
                    tp += 1;
                }
                None => fp += 1,
            }
        }
        let max_matching: usize = (0..gt.len())
            .map(|img| {
                let mine: Vec<Vec3> = prefix.iter().filter(|f| f.1 == img).map(|f| preds[img][f.2].0).collect();
                max_matching(&mine, &gt[img], theta)
            })
            .sum();
        assert!(tp <= max_matching, "greedy matched more than the maximum matching");
        if fp == 0 && tp == total {
            clean = true;
        }
        points.push((tp as f64 / total as f64, tp as f64 / (tp + fp) as f64));
        matched = used;
    }
    let mut ap = 0.0;
    let mut prev = 0.0;
    for &(r, _) in &points {
        if r > prev {
            let env = points.iter().filter(|q| q.0 >= r).map(|q| q.1).fold(0.0, f64::max);
            ap += (r - prev) * env;
            prev = r;
        }
    }
    OracleAp { points, ap, clean_cutoff_exists: clean, matched }
}

// Exhaustive maximum bipartite matching between predictions and ground truth
// within theta.
fn max_matching(preds: &[Vec3], gt: &[Vec3], theta: f64) -> usize {
    fn go(i: usize, preds: &[Vec3], gt: &[Vec3], used: &mut Vec<bool>, theta: f64) -> usize {
        if i == preds.len() {
            return 0;
        }
        let mut best = go(i + 1, preds, gt, used, theta);
        for g in 0..gt.len() {
            if !used[g] && acos_axis_angle_deg(preds[i], gt[g]) <= theta {
                used[g] = true;
                best = best.max(1 + go(i + 1, preds, gt, used, theta));
                used[g] = false;
            }
        }
        best
    }
    go(0, preds, gt, &mut vec![false; gt.len()], theta)
}

/// Random detection instance: up to `max_images` images with ≤ 3 ground-truth
/// orientations and ≤ 6 predictions each. Predictions are near a ground truth
/// or random; confidences come from a coarse grid in [0, 0.9] to force ties.
pub fn random_ap_instance(rng: &mut impl Rng, max_images: usize) -> (Vec<Vec<Vec3>>, Vec<Vec<(Vec3, f64)>>) {
    let images = rng.random_range(1..=max_images);
    let mut gt = Vec::new();
    let mut preds = Vec::new();
    for _ in 0..images {
        let g: Vec<Vec3> = (0..rng.random_range(0..=3)).map(|_| random_unit(rng)).collect();
        let p: Vec<(Vec3, f64)> = (0..rng.random_range(0..=6))
            .map(|_| {
                let dir = if !g.is_empty() && rng.random_bool(0.6) {
                    let base = g[rng.random_range(0..g.len())];
                    let base = if rng.random_bool(0.5) { -base } else { base };
                    perturb(base, rng.random_range(0.0..15.0), rng)
                } else {
                    random_unit(rng)
                };
                (dir, rng.random_range(0..10) as f64 / 10.0)
            })
            .collect();
        gt.push(g);
        preds.push(p);
    }
    (gt, preds)
}
