// Recover the ground plane of a scan and mark what stands on it.

use depthsr::scene::{extract_object_map, PlaneSearchConfig};
use depthsr::synth::{generate_scene, gt_object_mask, ObjectKind, SceneConfig};

pub fn run_example() -> depthsr::Result<()> {
    let plane_config = PlaneSearchConfig::default();
    for (i, kind) in ObjectKind::ALL.into_iter().enumerate() {
        let scene = SceneConfig {
            object_kind: kind,
            seed: i as u64,
            ..Default::default()
        };
        let scan = generate_scene(&scene)?;
        let (map, plane) = extract_object_map(&scan.hr_depth, &scan.definition, &scan.intrinsics, &plane_config)?;
        let iou = map.iou(&*gt_object_mask(&scene)?)?;
        println!(
            "{kind:?}: normal ({:.4}, {:.4}, {:.4}) offset {:.2} mm (true {:.2}), {} object pixels, IoU {iou:.3}",
            plane.normal.x,
            plane.normal.y,
            plane.normal.z,
            plane.offset,
            scene.ground_offset(),
            map.count_ones(),
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> depthsr::Result<()> {
    run_example()
}
