// Render a synthetic scan and write it as a sample directory.
//
// ```text
// cargo run --example synth_scene -- [OUT_DIR]
// ```

use depthsr::synth::{generate_scene, gt_object_mask, ObjectKind, SceneConfig};

pub fn run_example() -> depthsr::Result<()> {
    for kind in ObjectKind::ALL {
        let config = SceneConfig {
            object_kind: kind,
            seed: 7,
            ..Default::default()
        };
        let sample = generate_scene(&config)?;
        let gt = gt_object_mask(&config)?;
        let (w, h) = sample.dims();
        let holes = w * h - sample.definition.count_ones();
        println!(
            "{kind:?}: {w}x{h}, {holes} undefined pixels, {} object pixels, depth {:.1}..{:.1} mm",
            gt.count_ones(),
            sample.hr_depth.data().iter().filter(|v| !v.is_nan()).fold(f32::INFINITY, |a, &b| a.min(b)),
            sample.hr_depth.max_defined().unwrap_or(0.0),
        );
    }

    // corpus members vary kind, size and pose with the seed
    let config = SceneConfig::default().randomized(42);
    let sample = generate_scene(&config)?;
    if let Some(dir) = std::env::args().nth(1) {
        depthsr::io::write_sample(&sample, &dir)?;
        println!("wrote {:?} scene to {dir}", config.object_kind);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> depthsr::Result<()> {
    run_example()
}
