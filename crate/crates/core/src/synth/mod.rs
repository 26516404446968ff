//! Synthetic scans: one object resting on a tilted ground plane, seen by a
//! pinhole camera at the origin looking down +z, with projector shadows and
//! a border frame of missing measurements.

mod shape;

use std::collections::BTreeMap;

use nalgebra::{Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::camera::CameraIntrinsics;
use crate::error::{Error, Result};
use crate::raster::{quantize_u16, DefinitionMap, DepthMap, IntensityMap, ObjectMap};
use crate::sample::Sample;

pub use shape::Solid;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectKind {
    #[default]
    Box,
    /// Ellipsoid with radii equal to half the object size.
    Sphere,
    /// Rounded box, `|x|^4 + |y|^4 + |z|^4 <= 1` in normalized coordinates.
    Superellipsoid,
}

impl ObjectKind {
    pub const ALL: [ObjectKind; 3] = [ObjectKind::Box, ObjectKind::Sphere, ObjectKind::Superellipsoid];
}

impl std::str::FromStr for ObjectKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "box" => Ok(Self::Box),
            "sphere" => Ok(Self::Sphere),
            "superellipsoid" => Ok(Self::Superellipsoid),
            _ => Err(Error::InvalidParameter(format!("unknown object kind `{s}`"))),
        }
    }
}

/// Placement on the ground: offsets along the two in-plane axes (mm) and a
/// rotation about the plane normal (radians).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObjectPose {
    pub translation: [f64; 2],
    pub yaw: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneConfig {
    pub width: usize,
    pub height: usize,
    /// Depth of the ground along the optical axis.
    pub ground_depth: f64,
    /// Rotation of the ground about the camera x axis, radians.
    pub ground_tilt: f64,
    /// Focal length in pixels; `None` means `1.1 * width`.
    pub focal: Option<f64>,
    pub object_kind: ObjectKind,
    /// Extent along the two in-plane axes and the height, mm.
    pub object_size: [f64; 3],
    pub object_pose: ObjectPose,
    pub projector_offset: [f64; 3],
    pub noise_sigma: f64,
    pub border_margin: usize,
    pub seed: u64,
    /// Down-sampling factor recorded in the sample.
    pub scale: usize,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            width: 320,
            height: 240,
            ground_depth: 600.0,
            ground_tilt: 0.35,
            focal: None,
            object_kind: ObjectKind::Box,
            object_size: [100.0, 100.0, 50.0],
            object_pose: ObjectPose::default(),
            projector_offset: [100.0, 0.0, 0.0],
            noise_sigma: 0.3,
            border_margin: 4,
            seed: 0,
            scale: 4,
        }
    }
}

const AMBIENT: f64 = 0.05;
const GROUND_ALBEDO: f64 = 0.9;
const OBJECT_ALBEDO: f64 = 0.75;

impl SceneConfig {
    pub fn focal_length(&self) -> f64 {
        self.focal.unwrap_or(1.1 * self.width as f64)
    }

    pub fn intrinsics(&self) -> Result<CameraIntrinsics> {
        CameraIntrinsics::centered(self.width, self.height, self.focal_length())
    }

    /// Unit normal of the ground, pointing away from the camera.
    pub fn ground_normal(&self) -> Vector3<f64> {
        Vector3::new(0.0, self.ground_tilt.sin(), self.ground_tilt.cos())
    }

    /// Plane offset: ground points satisfy `normal . p = offset`.
    pub fn ground_offset(&self) -> f64 {
        self.ground_depth * self.ground_tilt.cos()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.width == 0 || self.height == 0 {
            return bad("scene dimensions must be positive".into());
        }
        if self.scale == 0 || self.width % self.scale != 0 || self.height % self.scale != 0 {
            return bad(format!(
                "scale {} must divide {}x{}",
                self.scale, self.width, self.height
            ));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise sigma must be >= 0, got {}", self.noise_sigma));
        }
        if self.object_size.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return bad("object size must be finite and >= 0".into());
        }
        if !(self.ground_depth > self.object_size[2] + 1.0) {
            return bad(format!(
                "ground depth {} must exceed object height {} by more than 1 mm",
                self.ground_depth, self.object_size[2]
            ));
        }
        if !(self.ground_tilt.abs() < std::f64::consts::FRAC_PI_2) {
            return bad(format!("ground tilt must lie in (-pi/2, pi/2), got {}", self.ground_tilt));
        }
        if self.projector_offset.iter().any(|v| !v.is_finite()) || !self.object_pose.yaw.is_finite() {
            return bad("pose and projector offset must be finite".into());
        }
        let k = self.intrinsics()?;
        let n = self.ground_normal();
        let (w, h) = ((self.width - 1) as f64, (self.height - 1) as f64);
        for (r, c) in [(0.0, 0.0), (0.0, w), (h, 0.0), (h, w)] {
            if n.dot(&k.ray(r, c)) <= 0.0 {
                return bad("the ground horizon is inside the image".into());
            }
        }
        Ok(())
    }

    /// A variation of this scene drawn from `seed`: kind, size, position and
    /// yaw are randomized, everything else is kept.
    pub fn randomized(&self, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = self.clone();
        c.seed = seed;
        c.object_kind = ObjectKind::ALL[rng.random_range(0..3)];
        for v in &mut c.object_size {
            *v *= rng.random_range(0.6..1.4);
        }
        c.object_pose.yaw = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
        let reach = 0.15 * self.ground_depth * self.width.min(self.height) as f64 / self.focal_length();
        let t = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        // pull the object back towards the center until it fits the frame
        for shrink in [1.0, 0.5, 0.25, 0.0] {
            c.object_pose.translation = [t[0] * reach * shrink, t[1] * reach * shrink];
            if c.solid().and_then(|s| self.check_frustum(&s)).is_ok() {
                break;
            }
        }
        c
    }

    fn solid(&self) -> Result<Option<Solid>> {
        let [sx, sy, sz] = self.object_size;
        if sx == 0.0 || sy == 0.0 || sz == 0.0 {
            return Ok(None);
        }
        let n = self.ground_normal();
        let up = -n;
        let e1 = Vector3::x();
        let e2 = up.cross(&e1);
        let (s, c) = self.object_pose.yaw.sin_cos();
        let a1 = c * e1 + s * e2;
        let a2 = -s * e1 + c * e2;
        let [tx, ty] = self.object_pose.translation;
        let anchor = Point3::new(0.0, 0.0, self.ground_depth) + tx * e1 + ty * e2;
        let half = Vector3::new(sx / 2.0, sy / 2.0, sz / 2.0);
        Ok(Some(Solid::new(self.object_kind, anchor + half.z * up, [a1, a2, up], half)))
    }

    fn check_frustum(&self, solid: &Option<Solid>) -> Result<()> {
        let Some(solid) = solid else { return Ok(()) };
        let k = self.intrinsics()?;
        let m = self.border_margin as f64;
        let (w, h) = (self.width as f64, self.height as f64);
        for p in solid.bounding_corners() {
            let inside = k
                .project(&p)
                .is_some_and(|(r, c)| r >= m && c >= m && r <= h - 1.0 - m && c <= w - 1.0 - m);
            if !inside {
                return Err(Error::OutsideFrustum(format!(
                    "corner ({:.1}, {:.1}, {:.1}) leaves the measured area",
                    p.x, p.y, p.z
                )));
            }
        }
        Ok(())
    }
}

/// What a single camera ray sees.
#[derive(Clone, Copy, Debug)]
struct Hit {
    depth: f64,
    object: bool,
    shadow: bool,
    shade: f64,
}

struct Scene {
    k: CameraIntrinsics,
    normal: Vector3<f64>,
    offset: f64,
    solid: Option<Solid>,
    projector: Point3<f64>,
}

impl Scene {
    fn new(config: &SceneConfig) -> Result<Self> {
        config.validate()?;
        let solid = config.solid()?;
        config.check_frustum(&solid)?;
        let [px, py, pz] = config.projector_offset;
        Ok(Self {
            k: config.intrinsics()?,
            normal: config.ground_normal(),
            offset: config.ground_offset(),
            solid,
            projector: Point3::new(px, py, pz),
        })
    }

    fn lambert(&self, p: &Point3<f64>, surface_normal: &Vector3<f64>, albedo: f64) -> f64 {
        let to_light = (self.projector - p).normalize();
        AMBIENT + (1.0 - AMBIENT) * albedo * surface_normal.dot(&to_light).max(0.0)
    }

    fn trace(&self, row: usize, col: usize) -> Hit {
        let d = self.k.ray(row as f64, col as f64);
        let t_ground = self.offset / self.normal.dot(&d);
        let origin = Point3::origin();
        if let Some((t, nrm)) = self.solid.as_ref().and_then(|s| s.intersect(&origin, &d)) {
            if t < t_ground {
                let p = origin + t * d;
                return Hit {
                    depth: t,
                    object: true,
                    shadow: false,
                    shade: self.lambert(&p, &nrm, OBJECT_ALBEDO),
                };
            }
        }
        let p = origin + t_ground * d;
        let shadow = self.solid.as_ref().is_some_and(|s| {
            s.intersect(&self.projector, &(p - self.projector))
                .is_some_and(|(t, _)| t < 1.0 - 1e-9)
        });
        Hit {
            depth: t_ground,
            object: false,
            shadow,
            shade: if shadow { AMBIENT } else { self.lambert(&p, &-self.normal, GROUND_ALBEDO) },
        }
    }

    fn render(&self, w: usize, h: usize) -> Vec<Hit> {
        (0..h)
            .into_par_iter()
            .flat_map_iter(|r| (0..w).map(move |c| (r, c)))
            .map(|(r, c)| self.trace(r, c))
            .collect()
    }
}

/// Render a scene. Depth is undefined on the border frame and on ground
/// pixels the projector cannot reach.
pub fn generate_scene(config: &SceneConfig) -> Result<Sample> {
    let scene = Scene::new(config)?;
    let (w, h, m) = (config.width, config.height, config.border_margin);
    let hits = scene.render(w, h);
    let noise = Normal::new(0.0, config.noise_sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut depth = Vec::with_capacity(w * h);
    let mut defined = Vec::with_capacity(w * h);
    for (i, hit) in hits.iter().enumerate() {
        let (r, c) = (i / w, i % w);
        let e = if config.noise_sigma > 0.0 { noise.sample(&mut rng) } else { 0.0 };
        let border = r < m || c < m || r + m >= h || c + m >= w;
        let ok = !border && !hit.shadow;
        defined.push(ok);
        depth.push(if ok {
            ((hit.depth + e) as f32).max(f32::MIN_POSITIVE)
        } else {
            f32::NAN
        });
    }
    let intensity = IntensityMap::new(w, h, hits.iter().map(|h| quantize_u16(h.shade as f32)).collect())?;
    let mut metadata = BTreeMap::new();
    metadata.insert("object_kind".to_string(), serde_json::to_value(config.object_kind)?.as_str().unwrap_or_default().to_string());
    metadata.insert("seed".to_string(), config.seed.to_string());
    let sample = Sample {
        hr_depth: DepthMap::new(w, h, depth)?,
        intensity,
        definition: DefinitionMap::new(w, h, defined)?,
        object_map: None,
        lr_depth: None,
        intrinsics: scene.k,
        scale: config.scale,
        metadata,
    };
    sample.validate()?;
    Ok(sample)
}

/// Pixels whose camera ray meets the object before the ground.
pub fn gt_object_mask(config: &SceneConfig) -> Result<ObjectMap> {
    let scene = Scene::new(config)?;
    let data = match scene.solid {
        None => vec![false; config.width * config.height],
        Some(_) => scene.render(config.width, config.height).iter().map(|h| h.object).collect(),
    };
    ObjectMap::new(config.width, config.height, data)
}
