use meshae::eval::{
    euclidean_error, generate_synthetic_dataset, icosphere, pca_fit, ErrorStats, SynthConfig,
};
use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pca_mean_error(train: &[ArrayView2<'_, f64>], test: &[ArrayView2<'_, f64>], k: usize) -> f64 {
    let pca = pca_fit(train, k).unwrap();
    let mut e = Vec::new();
    for x in test {
        e.extend(euclidean_error(pca.reconstruct(*x).unwrap().view(), *x).unwrap());
    }
    ErrorStats::from_errors(&e).unwrap().mean
}

#[test]
fn default_dataset_is_not_eight_dimensional() {
    let t = icosphere(3);
    let ds = generate_synthetic_dataset(&t, &SynthConfig::default()).unwrap();
    let frames: Vec<_> = ds.frame_refs().into_iter().map(|r| ds.frame(r).view()).collect();
    assert_eq!(frames.len(), 720);
    let err = pca_mean_error(&frames, &frames, 8);
    assert!(err > 0.01, "PCA-8 mean error {err}");
}

#[test]
fn affine_dataset_is_captured_by_pca() {
    let t = icosphere(2);
    let n = t.num_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let basis: Vec<Array2<f64>> = (0..8)
        .map(|_| Array2::from_shape_simple_fn((n, 3), || rng.random_range(-0.1..0.1)))
        .collect();
    let frames: Vec<Array2<f64>> = (0..60)
        .map(|_| {
            let mut v = t.vertices().clone();
            for b in &basis {
                v.scaled_add(rng.random_range(-1.0..1.0), b);
            }
            v
        })
        .collect();
    let views: Vec<_> = frames.iter().map(|f| f.view()).collect();
    let err = pca_mean_error(&views[..50], &views[50..], 8);
    assert!(err < 1e-9, "PCA-8 mean error {err}");
}
