//! Batch orchestration over sample directories: synthesis, preparation,
//! evaluation and stage timing. The `dsr` binary is a thin shell around
//! these functions.

use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::eval::{time_median, BenchRecord, LossWeights, MetricsReport};
use crate::geom::{self, DistanceMode, DistanceStats, OutlierParams};
use crate::io;
use crate::prep::{self, Connectivity, FillConfig};
use crate::raster::{DepthMap, ObjectMap};
use crate::sample::Sample;
use crate::scene::{extract_object_map, PlaneSearchConfig};
use crate::synth::{generate_scene, SceneConfig};
use crate::upsample::remask;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub scale: usize,
    pub tau: f32,
    /// Depth written into background holes; `None` uses the largest
    /// measured depth of the corpus.
    pub background: Option<f32>,
    /// Texture value for background holes; `None` uses the brightest
    /// measured pixel of the corpus.
    pub background_intensity: Option<f32>,
    pub connectivity: Connectivity,
    pub plane: PlaneSearchConfig,
    pub outliers: OutlierParams,
    pub weights: LossWeights,
    pub color_threshold: f64,
    pub distance_mode: DistanceMode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            scale: 4,
            tau: prep::DEFAULT_TAU_MM,
            background: None,
            background_intensity: None,
            connectivity: Connectivity::Four,
            plane: PlaneSearchConfig::default(),
            outliers: OutlierParams::default(),
            weights: LossWeights::default(),
            color_threshold: geom::DEFAULT_COLOR_THRESHOLD_MM,
            distance_mode: DistanceMode::OneSided,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scale == 0 {
            return Err(Error::InvalidParameter("scale must be >= 1".into()));
        }
        if !(self.tau >= 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be >= 0, got {}", self.tau)));
        }
        if !(self.color_threshold > 0.0) {
            return Err(Error::InvalidParameter("color threshold must be > 0".into()));
        }
        self.plane.validate()?;
        self.outliers.validate()?;
        self.weights.validate()
    }

    pub fn fill_config(&self, depth_max: f32, intensity_max: f32) -> Result<FillConfig> {
        let cfg = FillConfig {
            background_value_depth: self.background.unwrap_or(depth_max),
            background_value_intensity: self.background_intensity.unwrap_or(intensity_max),
            connectivity: self.connectivity,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Recursively merge `overrides` into `base`; objects merge key by key, any
/// other value replaces.
pub fn merge_json(base: &mut serde_json::Value, overrides: &serde_json::Value) {
    match (base, overrides) {
        (serde_json::Value::Object(b), serde_json::Value::Object(o)) => {
            for (k, v) in o {
                merge_json(b.entry(k.clone()).or_insert(serde_json::Value::Null), v);
            }
        }
        (b, o) => *b = o.clone(),
    }
}

/// Largest measured depth and intensity of a sample.
fn measured_max(sample: &Sample) -> (f32, f32) {
    let mut depth = 0.0f32;
    let mut intensity = 0.0f32;
    for (i, &d) in sample.definition.data().iter().enumerate() {
        if d {
            depth = depth.max(sample.hr_depth.data()[i]);
            intensity = intensity.max(sample.intensity.data()[i]);
        }
    }
    (depth, intensity)
}

/// Fill the HR depth and texture, downsample the filled depth and extract
/// the object map. Only pixels marked in the definition map are trusted, so
/// running this on its own output changes nothing.
pub fn prepare_sample(sample: &Sample, config: &PipelineConfig, fill: &FillConfig) -> Result<Sample> {
    let measured = remask(&sample.hr_depth, &sample.definition)?;
    let labeling = prep::classify_holes(&sample.definition, fill.connectivity);
    let filled = prep::fill_depth(&measured, &labeling, fill)?;
    let intensity = prep::augment_texture(&sample.intensity, &sample.definition, &labeling, fill)?;
    let lr = prep::downsample(&filled, config.scale, config.tau)?;
    let (object, _) = extract_object_map(&filled, &sample.definition, &sample.intrinsics, &config.plane)?;
    let out = Sample {
        hr_depth: filled,
        intensity,
        definition: sample.definition.clone(),
        object_map: Some(object),
        lr_depth: Some(lr),
        intrinsics: sample.intrinsics,
        scale: config.scale,
        metadata: sample.metadata.clone(),
    };
    out.validate()?;
    Ok(out)
}

/// `dir` itself when it holds a sample, otherwise its sample subdirectories
/// in name order.
pub fn sample_dirs(dir: &Path) -> Result<Vec<PathBuf>> {
    if dir.join(io::META).is_file() {
        return Ok(vec![dir.to_path_buf()]);
    }
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut dirs = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.join(io::META).is_file() {
            dirs.push(path);
        }
    }
    dirs.sort();
    Ok(dirs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreparedEntry {
    pub sample: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lr: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub object_pixels: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrepareReport {
    pub background: f32,
    pub background_intensity: f32,
    pub samples: Vec<PreparedEntry>,
}

impl PrepareReport {
    pub fn failures(&self) -> usize {
        self.samples.iter().filter(|s| s.error.is_some()).count()
    }
}

/// Prepare every sample under `dir` in place. The background constants are
/// taken from the whole corpus before any sample is rewritten. A failing
/// sample is reported and left untouched.
pub fn prepare_corpus(dir: &Path, config: &PipelineConfig) -> Result<PrepareReport> {
    config.validate()?;
    let dirs = sample_dirs(dir)?;
    let maxima = dirs
        .par_iter()
        .map(|d| io::read_sample(d).map(|s| measured_max(&s)))
        .collect::<Result<Vec<_>>>()?;
    let depth_max = maxima.iter().map(|m| m.0).fold(0.0, f32::max);
    let intensity_max = maxima.iter().map(|m| m.1).fold(0.0, f32::max);
    let fill = config.fill_config(depth_max, intensity_max)?;
    info!(
        "preparing {} samples, background {} mm / {}",
        dirs.len(),
        fill.background_value_depth,
        fill.background_value_intensity
    );
    let samples = dirs
        .par_iter()
        .map(|d| {
            let result = io::read_sample(d)
                .and_then(|s| prepare_sample(&s, config, &fill))
                .and_then(|p| io::write_sample(&p, d).map(|_| p));
            match result {
                Ok(p) => PreparedEntry {
                    sample: d.clone(),
                    lr: p.lr_depth.as_ref().map(DepthMap::dims),
                    object_pixels: p.object_map.as_ref().map(|o| o.count_ones()),
                    error: None,
                },
                Err(e) => {
                    warn!("{}: {e}", d.display());
                    PreparedEntry {
                        sample: d.clone(),
                        lr: None,
                        object_pixels: None,
                        error: Some(e.to_string()),
                    }
                }
            }
        })
        .collect();
    Ok(PrepareReport {
        background: fill.background_value_depth,
        background_intensity: fill.background_value_intensity,
        samples,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub seed: u64,
    pub config: SceneConfig,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub samples: Vec<ManifestEntry>,
}

pub const MANIFEST: &str = "manifest.json";

/// Scene settings of sample `i` of a corpus started at `seed`.
pub fn corpus_scene(base: &SceneConfig, seed: u64, i: usize, randomize: bool) -> SceneConfig {
    let s = seed.wrapping_add(i as u64);
    if randomize {
        base.randomized(s)
    } else {
        SceneConfig { seed: s, ..base.clone() }
    }
}

/// Write `count` synthetic samples named `sample_0000`, ... plus a manifest.
pub fn synth_corpus(out: &Path, count: usize, seed: u64, base: &SceneConfig, randomize: bool) -> Result<Manifest> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let samples = (0..count)
        .into_par_iter()
        .map(|i| {
            let config = corpus_scene(base, seed, i, randomize);
            let name = format!("sample_{i:04}");
            io::write_sample(&generate_scene(&config)?, out.join(&name)).map_err(|e| e.at(out.join(&name)))?;
            Ok(ManifestEntry {
                name,
                seed: config.seed,
                config,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = Manifest { samples };
    io::write_json(out.join(MANIFEST), &manifest)?;
    Ok(manifest)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloudReport {
    pub points: usize,
    pub removed: usize,
    pub removed_fraction: f64,
    pub distances: DistanceStats,
    pub ply: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(flatten)]
    pub metrics: MetricsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point_cloud: Option<PointCloudReport>,
}

/// Object map stored with the sample, or derived from its depth.
pub fn sample_object_map(sample: &Sample, config: &PipelineConfig) -> Result<ObjectMap> {
    match &sample.object_map {
        Some(o) => Ok(o.clone()),
        None => Ok(extract_object_map(&sample.hr_depth, &sample.definition, &sample.intrinsics, &config.plane)?.0),
    }
}

/// Compare a predicted HR depth with a sample. With `ply`, both maps are
/// also turned into point clouds; the prediction is cleaned of outliers and
/// written there, colored by its distance to the ground truth.
pub fn evaluate(pred: &DepthMap, sample: &Sample, config: &PipelineConfig, ply: Option<&Path>) -> Result<EvalReport> {
    config.validate()?;
    check_dims("prediction", sample.dims(), pred.dims())?;
    let def = &sample.definition;
    let gt = remask(&sample.hr_depth, def)?;
    let pred = remask(pred, def)?;
    let object = sample_object_map(sample, config)?;
    let metrics = MetricsReport::compute(&pred, &gt, &object, def, &config.weights)?;
    let point_cloud = match ply {
        None => None,
        Some(path) => {
            let reference = geom::unproject(&gt, def, &sample.intrinsics)?;
            let candidate = geom::unproject(&pred, def, &sample.intrinsics)?;
            let (mut kept, removed) = geom::remove_outliers(&candidate, &config.outliers)?;
            let stats = geom::hausdorff(&kept, &reference, config.distance_mode)?;
            // symmetric mode lists the candidate distances first
            let mut colors = geom::color_by_distance(&stats, config.color_threshold);
            colors.truncate(kept.len());
            kept.colors = Some(colors);
            geom::ply::write_ply(path, &kept)?;
            Some(PointCloudReport {
                points: candidate.len(),
                removed,
                removed_fraction: removed as f64 / candidate.len() as f64,
                distances: stats.summary(),
                ply: path.to_path_buf(),
            })
        }
    };
    Ok(EvalReport { metrics, point_cloud })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Fill,
    Downsample,
    ObjectMap,
}

impl std::str::FromStr for Stage {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fill" => Ok(Stage::Fill),
            "downsample" => Ok(Stage::Downsample),
            "objectmap" => Ok(Stage::ObjectMap),
            other => Err(Error::UnknownStage(other.to_string())),
        }
    }
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Fill => "fill",
            Stage::Downsample => "downsample",
            Stage::ObjectMap => "objectmap",
        }
    }
}

/// Parse a comma-separated stage list.
pub fn parse_stages(list: &str) -> Result<Vec<Stage>> {
    list.split(',').map(|s| s.trim().parse()).collect()
}

/// Median time of each stage on one sample, on a single thread. Inputs a
/// stage depends on are computed outside the timed region.
pub fn bench_sample(sample: &Sample, stages: &[Stage], reps: usize, config: &PipelineConfig) -> Result<Vec<BenchRecord>> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    pool.install(|| {
        let (dmax, imax) = measured_max(sample);
        let fill = config.fill_config(dmax, imax)?;
        let measured = remask(&sample.hr_depth, &sample.definition)?;
        let filled = prep::fill_depth(&measured, &prep::classify_holes(&sample.definition, fill.connectivity), &fill)?;
        let (w, h) = sample.dims();
        stages
            .iter()
            .map(|&stage| {
                let seconds = match stage {
                    Stage::Fill => time_median(reps, || {
                        let labeling = prep::classify_holes(&sample.definition, fill.connectivity);
                        prep::fill_depth(&measured, &labeling, &fill)
                    })?,
                    Stage::Downsample => time_median(reps, || prep::downsample(&filled, config.scale, config.tau))?,
                    Stage::ObjectMap => time_median(reps, || {
                        extract_object_map(&filled, &sample.definition, &sample.intrinsics, &config.plane)
                    })?,
                };
                Ok(BenchRecord {
                    stage: stage.name().to_string(),
                    w,
                    h,
                    seconds,
                    repetitions: reps,
                })
            })
            .collect()
    })
}

/// Time every stage on every sample under `dir`, one sample at a time.
pub fn bench_corpus(dir: &Path, stages: &[Stage], reps: usize, config: &PipelineConfig) -> Result<Vec<BenchRecord>> {
    let mut records = Vec::new();
    for d in sample_dirs(dir)? {
        let sample = io::read_sample(&d)?;
        records.extend(bench_sample(&sample, stages, reps, config).map_err(|e| e.at(&d))?);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn merge_overrides_nested_keys() {
        let mut base = serde_json::to_value(PipelineConfig::default()).unwrap();
        merge_json(&mut base, &json!({"scale": 2, "plane": {"grid_w": 10}}));
        let cfg: PipelineConfig = serde_json::from_value(base).unwrap();
        assert_eq!(cfg.scale, 2);
        assert_eq!(cfg.plane.grid_w, 10);
        assert_eq!(cfg.plane.grid_h, 20);
    }

    #[test]
    fn stage_names() {
        assert_eq!(parse_stages("fill, downsample,objectmap").unwrap().len(), 3);
        assert!(matches!(parse_stages("fill,blur"), Err(Error::UnknownStage(s)) if s == "blur"));
    }

    #[test]
    fn prepare_is_idempotent_in_memory() {
        let raw = generate_scene(&SceneConfig::default().randomized(3)).unwrap();
        let cfg = PipelineConfig::default();
        let (d, i) = measured_max(&raw);
        let fill = cfg.fill_config(d, i).unwrap();
        let once = prepare_sample(&raw, &cfg, &fill).unwrap();
        assert!(once.hr_depth.is_fully_defined());
        assert_eq!(once.lr_depth.as_ref().unwrap().dims(), (80, 60));
        assert_eq!(prepare_sample(&once, &cfg, &fill).unwrap(), once);
    }
}
