// End to end on disk: render a small corpus, prepare it in place, score the
// nearest-neighbor baseline and time the stages.

use depthsr::io;
use depthsr::pipeline::{self, PipelineConfig, Stage};
use depthsr::synth::SceneConfig;
use depthsr::upsample::upsample_nn;

pub fn run_example() -> depthsr::Result<()> {
    let tmp = tempfile::tempdir().map_err(|e| depthsr::Error::InvalidParameter(e.to_string()))?;
    let root = tmp.path();
    let manifest = pipeline::synth_corpus(root, 4, 100, &SceneConfig::default(), true)?;
    println!("rendered {} samples", manifest.samples.len());

    let config = PipelineConfig::default();
    let report = pipeline::prepare_corpus(root, &config)?;
    println!("background b = {} mm, {} failures", report.background, report.failures());

    for entry in &manifest.samples {
        let dir = root.join(&entry.name);
        let sample = io::read_sample(&dir)?;
        let lr = sample.lr_depth.as_ref().expect("prepared");
        let pred = upsample_nn(lr, sample.scale)?;
        let ply = dir.join("nearest.ply");
        let r = pipeline::evaluate(&pred, &sample, &config, Some(&ply))?;
        let pc = r.point_cloud.expect("point cloud requested");
        println!(
            "{} ({:?}): RMSE {:.3}, object RMSE {:.3}, object loss {:.3}, max distance {:.3} mm, {:.2}% removed",
            entry.name,
            entry.config.object_kind,
            r.metrics.rmse,
            r.metrics.object_rmse.unwrap_or(f64::NAN),
            r.metrics.object_loss,
            pc.distances.max,
            100.0 * pc.removed_fraction,
        );
    }

    let stages = [Stage::Fill, Stage::Downsample, Stage::ObjectMap];
    for rec in pipeline::bench_corpus(&root.join("sample_0000"), &stages, 3, &config)? {
        println!("{:>10} {}x{}: {:.5} s", rec.stage, rec.w, rec.h, rec.seconds);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> depthsr::Result<()> {
    run_example()
}
