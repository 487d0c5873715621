mod common;

use common::{random_matrix, random_small_mesh, rng};
use meshae::laplacian::{estimate_lambda_max, scale_laplacian, Laplacian, PowerIteration};
use meshae::oracle::{dense_spectral_filter, SpectralOracle};
use meshae::spectral_conv::{cheb_forward, ChebConvLayer};
use ndarray::Array2;
use rand::Rng;

/// Single-channel filter per (input, output) pair, summed over inputs,
/// written through the layer's own coefficient accessors.
#[test]
fn recurrence_matches_eigenbasis_filter() {
    let mut r = rng(11);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let mesh = random_small_mesh(&mut r, 20);
        let lap = Laplacian::from_mesh(&mesh).unwrap();
        let lmax = estimate_lambda_max(&lap, &PowerIteration::default());
        let lt = scale_laplacian(&lap, lmax).unwrap();
        let oracle = SpectralOracle::new(&lap).unwrap();
        let k = 1 + case % 8;
        let (f_in, f_out) = (r.random_range(1..4), r.random_range(1..4));
        let mut layer = ChebConvLayer::zeros(k, f_in, f_out).unwrap();
        for kk in 0..k {
            for i in 0..f_in {
                for j in 0..f_out {
                    layer.set_coefficient(kk, i, j, r.random_range(-1.0..1.0));
                }
            }
        }
        let x = random_matrix(&mut r, mesh.num_vertices(), f_in, 1.0);
        let (y, _) = cheb_forward(&lt, x.view(), &layer).unwrap();

        let mut want = Array2::<f64>::zeros((mesh.num_vertices(), f_out));
        for i in 0..f_in {
            for j in 0..f_out {
                let theta: Vec<f64> = (0..k).map(|kk| layer.coefficient(kk, i, j)).collect();
                let col = x.slice(ndarray::s![.., i..i + 1]);
                let filtered = dense_spectral_filter(&oracle, lmax, col, &theta).unwrap();
                let mut dst = want.slice_mut(ndarray::s![.., j..j + 1]);
                dst += &filtered;
            }
        }
        let err = (&y - &want).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        worst = worst.max(err);
        assert!(err < 1e-10, "case {case} (K={k}, n={}): {err:e}", mesh.num_vertices());
    }
    eprintln!("worst max-abs deviation {worst:e}");
}

#[test]
fn order_one_is_a_per_vertex_linear_map() {
    let mut r = rng(12);
    let mesh = random_small_mesh(&mut r, 20);
    let lt = meshae::laplacian::ScaledLaplacian::from_mesh(&mesh, &PowerIteration::default()).unwrap();
    let layer = ChebConvLayer::glorot(1, 3, 2, &mut r).unwrap();
    let x = random_matrix(&mut r, mesh.num_vertices(), 3, 1.0);
    let (y, _) = cheb_forward(&lt, x.view(), &layer).unwrap();
    let want = x.dot(layer.theta()) + layer.bias();
    assert!((&y - &want).iter().all(|v| v.abs() < 1e-14));
}
