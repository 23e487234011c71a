//! Rough single-core timing of the hot paths at benchmark scale.

use aca_core::{fit, min_depth_over_dataset, proj_depth, Basis, DataMatrix, DepthNotion, OptimizerConfig};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::time::Instant;

fn gaussian(n: usize, d: usize, seed: u64) -> DataMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flat: Vec<f64> = (0..n * d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    DataMatrix::from_rows(n, d, &flat).unwrap()
}

fn main() {
    let cfg = OptimizerConfig { seed: 1, ..OptimizerConfig::default() };

    for (n, d) in [(1000usize, 10usize), (500, 10), (250, 5), (500, 5)] {
        let data = gaussian(n, d, 7);
        let z = DVector::from_element(d, 3.0);
        let t0 = Instant::now();
        let mut evals = 0usize;
        for s in 0..20 {
            let mut c = cfg.clone();
            c.seed = s;
            evals += proj_depth(&z, &data, &Basis::identity(d), DepthNotion::Projection, &c)
                .unwrap()
                .evaluations_used;
        }
        let dt = t0.elapsed().as_secs_f64();
        println!(
            "n={n:4} d={d:2}: {:7.1} us/query, {:6.2} us/eval ({} evals)",
            dt / 20.0 * 1e6,
            dt / evals as f64 * 1e6,
            evals
        );
    }

    let data = gaussian(1000, 10, 9);
    let t0 = Instant::now();
    let (row, res) = min_depth_over_dataset(&data, &Basis::identity(10), DepthNotion::Projection, &cfg).unwrap();
    println!(
        "min_depth n=1000 d=10: {:.2} s (row {row}, depth {:.4})",
        t0.elapsed().as_secs_f64(),
        res.depth
    );

    let t0 = Instant::now();
    let model = fit(&data, 2, DepthNotion::Projection, &cfg).unwrap();
    println!(
        "fit p=2 n=1000 d=10: {:.2} s (depths {:?})",
        t0.elapsed().as_secs_f64(),
        model.min_depths()
    );
}
