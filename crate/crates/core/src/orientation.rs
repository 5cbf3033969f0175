//! Orientation codebooks, binning, viewing poses and view distributions.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::geom::{to_radians, Mat3, Vec3};

/// Fractional part of the golden ratio, `(√5 - 1) / 2`.
pub const GOLDEN_RATIO_CONJUGATE: f64 = 0.618_033_988_749_894_9;

/// Which part of the sphere a codebook covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodebookSupport {
    /// Whole unit sphere.
    FullSphere,
    /// Upper hemisphere `z > 0`.
    Hemisphere,
    /// Half circle in the `z = 0` plane, azimuths in `[0°, 180°)`.
    HorizontalCircle,
}

impl CodebookSupport {
    /// Stable lowercase name.
    pub fn name(self) -> &'static str {
        match self {
            CodebookSupport::FullSphere => "full_sphere",
            CodebookSupport::Hemisphere => "hemisphere",
            CodebookSupport::HorizontalCircle => "horizontal_circle",
        }
    }

    /// Parses [`CodebookSupport::name`].
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "full_sphere" => Some(CodebookSupport::FullSphere),
            "hemisphere" => Some(CodebookSupport::Hemisphere),
            "horizontal_circle" => Some(CodebookSupport::HorizontalCircle),
            _ => None,
        }
    }
}

/// `K` near-uniform unit directions used as classification bins.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationCodebook {
    directions: Vec<Vec3>,
    support: CodebookSupport,
}

impl OrientationCodebook {
    /// Bin directions.
    pub fn directions(&self) -> &[Vec3] {
        &self.directions
    }

    /// Number of bins `K`.
    pub fn k(&self) -> usize {
        self.directions.len()
    }

    /// Covered region.
    pub fn support(&self) -> CodebookSupport {
        self.support
    }

    /// Direction of bin `k`.
    pub fn direction(&self, k: usize) -> Option<Vec3> {
        self.directions.get(k).copied()
    }
}

/// Builds a Fibonacci-lattice codebook of `k` directions.
///
/// On the sphere direction `i` has `z = 1 - (2i+1)/K`, on the hemisphere
/// `z = 1 - (i+½)/K`, and azimuth `2π·i·φ⁻¹` in both cases. The horizontal
/// circle uses azimuths `πi/K`.
pub fn fibonacci_codebook(k: usize, support: CodebookSupport) -> Result<OrientationCodebook> {
    if k == 0 {
        return Err(invalid("codebook size K must be at least 1"));
    }
    let kf = k as f64;
    let directions = (0..k)
        .map(|i| {
            let fi = i as f64;
            match support {
                CodebookSupport::HorizontalCircle => {
                    let az = core::f64::consts::PI * fi / kf;
                    Vec3::new(libm::cos(az), libm::sin(az), 0.0)
                }
                CodebookSupport::FullSphere | CodebookSupport::Hemisphere => {
                    let z = match support {
                        CodebookSupport::FullSphere => 1.0 - (2.0 * fi + 1.0) / kf,
                        _ => 1.0 - (fi + 0.5) / kf,
                    };
                    // fractional turn keeps the angle small for large i
                    let turn = fi * GOLDEN_RATIO_CONJUGATE;
                    let az = 2.0 * core::f64::consts::PI * (turn - libm::floor(turn));
                    let r = libm::sqrt((1.0 - z * z).max(0.0));
                    Vec3::new(r * libm::cos(az), r * libm::sin(az), z)
                }
            }
        })
        .collect();
    Ok(OrientationCodebook { directions, support })
}

/// Index of the codebook direction with the largest dot product with `v`
/// (largest absolute dot product when `sign_invariant`). Ties go to the
/// lowest index.
pub fn bin_orientation(codebook: &OrientationCodebook, v: Vec3, sign_invariant: bool) -> Result<usize> {
    if !(libm::fabs(v.norm() - 1.0) <= 1e-6) {
        return Err(invalid(alloc::format!("orientation {v:?} is not unit length")));
    }
    Ok(bin_unchecked(codebook, v, sign_invariant))
}

pub(crate) fn bin_unchecked(codebook: &OrientationCodebook, v: Vec3, sign_invariant: bool) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (k, d) in codebook.directions.iter().enumerate() {
        let dot = v.dot(*d);
        let score = if sign_invariant { libm::fabs(dot) } else { dot };
        if score > best_score {
            best = k;
            best_score = score;
        }
    }
    best
}

/// World-to-camera rotation `R_z(cyclo) · R_x(-elevation) · R_y(azimuth)`,
/// angles in degrees. The world is y-up; the camera has +x right, +y up and
/// looks along -z.
pub fn euler_to_rotation(azimuth_deg: f64, elevation_deg: f64, cyclo_deg: f64) -> Mat3 {
    Mat3::rotation_z(to_radians(cyclo_deg))
        * Mat3::rotation_x(-to_radians(elevation_deg))
        * Mat3::rotation_y(to_radians(azimuth_deg))
}

/// A viewing pose given by azimuth, elevation and cyclo-rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewPose {
    azimuth_deg: f64,
    elevation_deg: f64,
    cyclo_deg: f64,
    rotation: Mat3,
}

impl ViewPose {
    /// Builds a pose; the rotation is derived with [`euler_to_rotation`].
    pub fn new(azimuth_deg: f64, elevation_deg: f64, cyclo_deg: f64) -> Result<Self> {
        if !(azimuth_deg.is_finite() && elevation_deg.is_finite() && cyclo_deg.is_finite()) {
            return Err(invalid("pose angles must be finite"));
        }
        Ok(ViewPose {
            azimuth_deg,
            elevation_deg,
            cyclo_deg,
            rotation: euler_to_rotation(azimuth_deg, elevation_deg, cyclo_deg),
        })
    }

    /// The identity pose.
    pub fn identity() -> Self {
        ViewPose::new(0.0, 0.0, 0.0).expect("finite")
    }

    /// Azimuth in degrees.
    pub fn azimuth_deg(&self) -> f64 {
        self.azimuth_deg
    }

    /// Elevation in degrees.
    pub fn elevation_deg(&self) -> f64 {
        self.elevation_deg
    }

    /// Cyclo-rotation in degrees.
    pub fn cyclo_deg(&self) -> f64 {
        self.cyclo_deg
    }

    /// World-to-camera rotation.
    pub fn rotation(&self) -> &Mat3 {
        &self.rotation
    }
}

/// The two named view distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViewSetting {
    /// Natural views: full azimuth, elevation in [0, 10], no cyclo-rotation.
    Natural,
    /// Diverse views: full azimuth, elevation in [0, 50], cyclo in [-30, 30].
    Diverse,
}

impl ViewSetting {
    /// Short tag, `V_N` or `V_D`.
    pub fn tag(self) -> &'static str {
        match self {
            ViewSetting::Natural => "V_N",
            ViewSetting::Diverse => "V_D",
        }
    }

    /// Parses [`ViewSetting::tag`] (case-insensitive).
    pub fn from_tag(s: &str) -> Option<Self> {
        if s.eq_ignore_ascii_case("V_N") {
            Some(ViewSetting::Natural)
        } else if s.eq_ignore_ascii_case("V_D") {
            Some(ViewSetting::Diverse)
        } else {
            None
        }
    }

    /// Symmetry codebook used with this setting: 10 horizontal directions for
    /// natural views, 60 sphere directions for diverse views.
    pub fn default_symmetry_codebook(self) -> (CodebookSupport, usize) {
        match self {
            ViewSetting::Natural => (CodebookSupport::HorizontalCircle, 10),
            ViewSetting::Diverse => (CodebookSupport::FullSphere, 60),
        }
    }
}

/// Independent uniform ranges for the three pose angles, in degrees.
/// Azimuth is half-open `(lo, hi]`; elevation and cyclo are closed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewDistribution {
    /// Which named distribution this is.
    pub setting: ViewSetting,
    /// Azimuth interval.
    pub azimuth_range: (f64, f64),
    /// Elevation interval.
    pub elevation_range: (f64, f64),
    /// Cyclo-rotation interval.
    pub cyclo_range: (f64, f64),
}

impl ViewDistribution {
    /// The distribution for a named setting.
    pub fn new(setting: ViewSetting) -> Self {
        match setting {
            ViewSetting::Natural => ViewDistribution {
                setting,
                azimuth_range: (-180.0, 180.0),
                elevation_range: (0.0, 10.0),
                cyclo_range: (0.0, 0.0),
            },
            ViewSetting::Diverse => ViewDistribution {
                setting,
                azimuth_range: (-180.0, 180.0),
                elevation_range: (0.0, 50.0),
                cyclo_range: (-30.0, 30.0),
            },
        }
    }

    /// Draws a pose using an existing generator.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> ViewPose {
        let (alo, ahi) = self.azimuth_range;
        let u: f64 = rng.random();
        // u in [0, 1) maps onto (lo, hi]
        let azimuth = ahi - (ahi - alo) * u;
        let closed = |(lo, hi): (f64, f64), rng: &mut R| -> f64 {
            if lo == hi {
                lo
            } else {
                (lo + (hi - lo) * rng.random::<f64>()).min(hi)
            }
        };
        let elevation = closed(self.elevation_range, rng);
        let cyclo = closed(self.cyclo_range, rng);
        ViewPose::new(azimuth, elevation, cyclo).expect("finite angles")
    }
}

/// Draws one pose from `dist`, deterministically per `seed`.
pub fn sample_view(dist: &ViewDistribution, seed: u64) -> ViewPose {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    dist.sample_with(&mut rng)
}

/// Rotates plane normals by `r` and re-canonicalizes their sign.
pub fn rotate_orientations(normals: &[Vec3], r: &Mat3) -> Vec<Vec3> {
    normals.iter().map(|&n| (*r * n).canonical_sign()).collect()
}

/// Multi-label target: bin `k` is set iff some normal bins to it
/// (sign-invariant). Hemisphere codebooks are rejected because plane
/// orientations are unsigned.
pub fn make_symmetry_label(normals: &[Vec3], codebook: &OrientationCodebook) -> Result<Vec<bool>> {
    if codebook.support == CodebookSupport::Hemisphere {
        return Err(invalid("symmetry labels need a full_sphere or horizontal_circle codebook"));
    }
    let mut label = alloc::vec![false; codebook.k()];
    for &n in normals {
        label[bin_orientation(codebook, n, true)?] = true;
    }
    Ok(label)
}
