pub mod chi_a22;
pub mod counterexample;
pub mod eta;
pub mod matern;
pub mod ou;
pub mod simulate;

use exdep::approx::Point;
use rand::Rng;

/// Uniform sites in the unit square.
pub fn random_sites(n: usize, seed: u64) -> Vec<Point> {
    let mut rng = exdep::rng::stream(seed);
    (0..n).map(|_| [rng.gen(), rng.gen()]).collect()
}

pub fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}
