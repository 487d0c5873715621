#![allow(dead_code)]

use meshae::mesh::Mesh;
use ndarray::{array, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const STEP: f64 = 1e-6;

/// `|a - n| / max(|a|, |n|)`, zero when both vanish.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let scale = analytic.abs().max(numeric.abs());
    if scale < 1e-12 {
        0.0
    } else {
        (analytic - numeric).abs() / scale
    }
}

/// Central difference of `f` at `x[i]`.
pub fn central_difference(x: &mut [f64], i: usize, f: &mut dyn FnMut(&[f64]) -> f64) -> f64 {
    let orig = x[i];
    x[i] = orig + STEP;
    let plus = f(x);
    x[i] = orig - STEP;
    let minus = f(x);
    x[i] = orig;
    (plus - minus) / (2.0 * STEP)
}

/// Central difference, or `None` when the two one-sided differences
/// disagree (the step straddles a kink of a piecewise-linear function).
pub fn smooth_central_difference(
    x: &mut [f64],
    i: usize,
    f: &mut dyn FnMut(&[f64]) -> f64,
) -> Option<f64> {
    let orig = x[i];
    let mid = f(x);
    x[i] = orig + STEP;
    let plus = f(x);
    x[i] = orig - STEP;
    let minus = f(x);
    x[i] = orig;
    let (fwd, bwd) = ((plus - mid) / STEP, (mid - minus) / STEP);
    if (fwd - bwd).abs() > 1e-4 * fwd.abs().max(bwd.abs()).max(1e-3) {
        return None;
    }
    Some((plus - minus) / (2.0 * STEP))
}

/// Worst relative error of `analytic` against central differences of `f`
/// over every coordinate of `x`.
pub fn worst_relative_error(x: &mut [f64], analytic: &[f64], f: &mut dyn FnMut(&[f64]) -> f64) -> f64 {
    assert_eq!(x.len(), analytic.len());
    let worst = (0..x.len())
        .map(|i| relative_error(analytic[i], central_difference(x, i, f)))
        .fold(0.0, f64::max);
    // leave any state captured by `f` at the unperturbed point
    f(x);
    worst
}

/// Unit cube split into 12 triangles.
pub fn cube() -> Mesh {
    let v: Array2<f64> = array![
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [1.0, 1.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [1.0, 0.0, 1.0],
        [1.0, 1.0, 1.0],
        [0.0, 1.0, 1.0],
    ];
    let f = vec![
        [0, 2, 1],
        [0, 3, 2],
        [4, 5, 6],
        [4, 6, 7],
        [0, 1, 5],
        [0, 5, 4],
        [1, 2, 6],
        [1, 6, 5],
        [2, 3, 7],
        [2, 7, 6],
        [3, 0, 4],
        [3, 4, 7],
    ];
    Mesh::new(v, f).expect("valid cube")
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || rng.random_range(-scale..scale))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Jittered grid of at most `max_n` vertices with shuffled vertex ids and a
/// few faces dropped, so connectivity varies between instances.
pub fn random_small_mesh(rng: &mut ChaCha8Rng, max_n: usize) -> Mesh {
    loop {
        let w = rng.random_range(2..=5);
        let h = rng.random_range(2..=4);
        if w * h > max_n {
            continue;
        }
        let base = meshae::eval::grid(w, h, |_, _| 0.0);
        let n = base.num_vertices();
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let mut v = Array2::zeros((n, 3));
        for i in 0..n {
            let p = base.position(i);
            for k in 0..3 {
                v[[perm[i], k]] = p[k] + rng.random_range(-0.2..0.2);
            }
        }
        let mut faces: Vec<[usize; 3]> = base
            .faces()
            .iter()
            .map(|f| [perm[f[0]], perm[f[1]], perm[f[2]]])
            .collect();
        if faces.len() > 2 {
            let drop = rng.random_range(0..faces.len() / 3 + 1);
            for _ in 0..drop {
                let i = rng.random_range(0..faces.len());
                faces.swap_remove(i);
            }
        }
        return Mesh::new(v, faces).expect("valid mesh");
    }
}
