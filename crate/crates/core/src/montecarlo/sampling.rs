//! Random inputs under the uniform-sphere model, with per-trial streams.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::norm;
use crate::matrix::UnitRowMatrix;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for trial `index` of a run seeded with `seed`. The stream is a
/// pure function of `(seed, index)`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let key = mix64(mix64(seed) ^ mix64(index.wrapping_add(0x632b_e59b_d9b4_e019)));
    ChaCha8Rng::seed_from_u64(key)
}

/// A pair of independent standard normal deviates (Marsaglia polar method).
pub fn normal_pair<R: RngCore + ?Sized>(rng: &mut R) -> (f64, f64) {
    loop {
        let u: f64 = 2.0 * rng.random::<f64>() - 1.0;
        let v: f64 = 2.0 * rng.random::<f64>() - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            let f = (-2.0 * s.ln() / s).sqrt();
            return (u * f, v * f);
        }
    }
}

fn fill_normals<R: RngCore + ?Sized>(rng: &mut R, out: &mut [f64]) {
    let mut chunks = out.chunks_exact_mut(2);
    for pair in &mut chunks {
        let (a, b) = normal_pair(rng);
        pair[0] = a;
        pair[1] = b;
    }
    if let [last] = chunks.into_remainder() {
        *last = normal_pair(rng).0;
    }
}

/// Uniform point on `S^{m-1}`: a normalized standard Gaussian vector,
/// redrawn on the (measure-zero) zero draw.
pub fn unit_vector<R: RngCore + ?Sized>(rng: &mut R, m: usize) -> Vec<f64> {
    let mut v = vec![0.0; m];
    loop {
        fill_normals(rng, &mut v);
        let n = norm(&v);
        if n > 1e-150 {
            v.iter_mut().for_each(|x| *x /= n);
            return v;
        }
    }
}

/// `n` i.i.d. uniform unit rows in `R^m`.
pub fn sample_uniform_rows<R: RngCore + ?Sized>(m: usize, n: usize, rng: &mut R) -> UnitRowMatrix {
    assert!(m >= 2, "ambient dimension must be at least 2");
    let mut data = Vec::with_capacity(m * n);
    for _ in 0..n {
        data.extend(unit_vector(rng, m));
    }
    UnitRowMatrix::from_flat_unchecked(m, data)
}
