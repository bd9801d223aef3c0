#![allow(dead_code)]

use lindblad_relax::generator::GeneratorSpec;
use lindblad_relax::numerics::{Mat3R, Vec3};
use lindblad_relax::scan::{sample_cp_spec, sample_rng, sample_violating_spec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn cp_spec(seed: u64) -> GeneratorSpec {
    sample_cp_spec(&mut sample_rng(seed, 0))
}

pub fn violating_spec(seed: u64) -> GeneratorSpec {
    sample_violating_spec(&mut sample_rng(seed, 0))
}

pub fn uniform3(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Vec3 {
    [0; 3].map(|_| rng.random_range(lo..=hi))
}

/// `δ = 0`, otherwise unconstrained (usually not CP).
pub fn delta_free_spec(rng: &mut ChaCha8Rng) -> GeneratorSpec {
    GeneratorSpec::new(
        uniform3(rng, -2.0, 2.0),
        uniform3(rng, 0.0, 2.0),
        uniform3(rng, -1.0, 1.0),
        [0.0; 3],
    )
}

/// Rotation by Euler angles `z(a)·y(b)·z(c)`.
pub fn rotation(a: f64, b: f64, c: f64) -> Mat3R {
    let rz = |t: f64| Mat3R::from_rows([[t.cos(), -t.sin(), 0.0], [t.sin(), t.cos(), 0.0], [0.0, 0.0, 1.0]]);
    let ry = Mat3R::from_rows([[b.cos(), 0.0, b.sin()], [0.0, 1.0, 0.0], [-b.sin(), 0.0, b.cos()]]);
    rz(a) * ry * rz(c)
}

pub fn sup_dist(a: &Vec3, b: &Vec3) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
}
