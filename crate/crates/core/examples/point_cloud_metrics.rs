// Point clouds from depth: outlier removal, distances to the ground truth
// and a distance-colored PLY.

use depthsr::geom::{self, hausdorff, DistanceMode, OutlierParams, DEFAULT_COLOR_THRESHOLD_MM};
use depthsr::prep::{classify_holes, downsample, fill_depth, Connectivity, FillConfig, DEFAULT_TAU_MM};
use depthsr::synth::{generate_scene, SceneConfig};
use depthsr::upsample::{remask, upsample_nn};

pub fn run_example() -> depthsr::Result<()> {
    let scan = generate_scene(&SceneConfig {
        seed: 9,
        ..Default::default()
    })?;
    let labeling = classify_holes(&scan.definition, Connectivity::Four);
    let b = scan.hr_depth.max_defined().expect("scan has measurements");
    let hr = fill_depth(&scan.hr_depth, &labeling, &FillConfig::new(b, 1.0)?)?;
    // nearest-neighbor baseline standing in for a model output
    let pred = remask(&upsample_nn(&downsample(&hr, 4, DEFAULT_TAU_MM)?, 4)?, &scan.definition)?;

    let reference = geom::unproject(&hr, &scan.definition, &scan.intrinsics)?;
    let candidate = geom::unproject(&pred, &scan.definition, &scan.intrinsics)?;
    let (mut kept, removed) = geom::remove_outliers(&candidate, &OutlierParams::default())?;
    println!(
        "{} points, {removed} removed as outliers ({:.3}%)",
        candidate.len(),
        100.0 * removed as f64 / candidate.len() as f64
    );

    let one = hausdorff(&kept, &reference, DistanceMode::OneSided)?;
    let both = hausdorff(&kept, &reference, DistanceMode::Symmetric)?;
    println!("one-sided: min {:.4} max {:.4} mean {:.4} mm", one.min, one.max, one.mean);
    println!("symmetric: max {:.4} mm", both.max);

    kept.colors = Some(geom::color_by_distance(&one, DEFAULT_COLOR_THRESHOLD_MM));
    let dir = tempfile::tempdir().map_err(|e| depthsr::Error::InvalidParameter(e.to_string()))?;
    let path = dir.path().join("baseline.ply");
    geom::ply::write_ply(&path, &kept)?;
    let back = geom::ply::read_ply(&path)?;
    println!("wrote {} colored points to {}", back.len(), path.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> depthsr::Result<()> {
    run_example()
}
