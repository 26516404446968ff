// Predict the run time at a small resolution from timings at larger ones.

use depthsr::eval::fit_time_model;

pub fn run_example() -> depthsr::Result<()> {
    let known = [(560 * 800, 0.068), (1120 * 800, 0.091), (1680 * 1200, 0.184)];
    let samples: Vec<(f64, f64)> = known.iter().map(|&(n, t)| (n as f64, t)).collect();
    let model = fit_time_model(&samples)?;
    println!(
        "t(m) = {:.5} + {:.5} m + {:.5} m^2   (m = megapixels)",
        model.c0, model.c1, model.c2
    );
    for (w, h) in [(140, 200), (560, 800), (3360, 2400)] {
        println!("{w}x{h}: {:.4} s", model.predict((w * h) as f64));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> depthsr::Result<()> {
    run_example()
}
