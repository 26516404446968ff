// Label the holes of a scan and fill them.

use depthsr::prep::{augment_texture, classify_holes, fill_depth, Connectivity, FillConfig};
use depthsr::synth::{generate_scene, SceneConfig};

pub fn run_example() -> depthsr::Result<()> {
    let scan = generate_scene(&SceneConfig {
        seed: 3,
        ..Default::default()
    })?;
    let labeling = classify_holes(&scan.definition, Connectivity::Four);
    let background: Vec<u32> = labeling.background_ids().collect();
    println!(
        "{} holes, background {:?}, {} near the object",
        labeling.hole_count(),
        background,
        labeling.hole_count() - background.len()
    );

    // background holes get the farthest measured depth
    let b = scan.hr_depth.max_defined().expect("scan has measurements");
    let config = FillConfig::new(b, scan.intensity.max_value())?;
    let filled = fill_depth(&scan.hr_depth, &labeling, &config)?;
    let texture = augment_texture(&scan.intensity, &scan.definition, &labeling, &config)?;
    assert!(filled.is_fully_defined());

    let kept = (0..filled.data().len())
        .filter(|&i| scan.definition.data()[i])
        .all(|i| filled.data()[i].to_bits() == scan.hr_depth.data()[i].to_bits());
    println!("filled with b = {b:.2} mm; measured pixels unchanged: {kept}");
    println!("texture max after augmentation: {:.4}", texture.max_value());
    Ok(())
}

#[allow(dead_code)]
fn main() -> depthsr::Result<()> {
    run_example()
}
