//! Row and block sketch distributions, and lambda_min of the expected
//! sketched Gram matrix M, which governs the linear rate.

use bregman_kaczmarz::{generate_gaussian, lambda_min, matrix_m, SketchDistribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let p = generate_gaussian(12, 30, 3, 4).unwrap();
    let dists = [
        ("squared row norms", SketchDistribution::squared_row_norms(&p.a).unwrap()),
        ("uniform rows", SketchDistribution::uniform_rows(&p.a).unwrap()),
        ("frobenius blocks of 4", SketchDistribution::frobenius_blocks(&p.a, 4).unwrap()),
        ("uniform blocks of 5", SketchDistribution::uniform_blocks(&p.a, 5).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (name, dist) in &dists {
        let m = matrix_m(&p.a, dist).unwrap();
        let draws: Vec<_> = (0..5).map(|_| dist.sample(&mut rng).rows).collect();
        println!("{name:<22} {:?}  lambda_min(M) = {:.4}  draws {draws:?}", dist.mode(), lambda_min(&m));
    }
}
