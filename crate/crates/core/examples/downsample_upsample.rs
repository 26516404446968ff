// Gradient-aware downsampling followed by nearest-neighbor and bicubic
// upsampling, scored against the original depth.

use depthsr::eval::rmse;
use depthsr::prep::{classify_holes, downsample, fill_depth, Connectivity, FillConfig, DEFAULT_TAU_MM};
use depthsr::synth::{generate_scene, SceneConfig};
use depthsr::upsample::{upsample_bicubic, upsample_nn};

pub fn run_example() -> depthsr::Result<()> {
    let scan = generate_scene(&SceneConfig {
        seed: 5,
        ..Default::default()
    })?;
    let labeling = classify_holes(&scan.definition, Connectivity::Four);
    let b = scan.hr_depth.max_defined().expect("scan has measurements");
    let hr = fill_depth(&scan.hr_depth, &labeling, &FillConfig::new(b, 1.0)?)?;

    for s in [2, 4] {
        let lr = downsample(&hr, s, DEFAULT_TAU_MM)?;
        let nn = upsample_nn(&lr, s)?;
        let cubic = upsample_bicubic(&lr, s)?;
        println!(
            "s = {s}: LR {}x{}, RMSE nearest {:.3} mm, bicubic {:.3} mm",
            lr.width(),
            lr.height(),
            rmse(&nn, &hr, &scan.definition)?,
            rmse(&cubic, &hr, &scan.definition)?,
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> depthsr::Result<()> {
    run_example()
}
