mod common;

use common::{random_matrix, random_small_mesh, rng};
use meshae::eval::{cumulative_error_histogram, grid, is_partition, pca_fit, split_interpolation, Dataset, ErrorStats, Sequence};
use meshae::laplacian::{Laplacian, PowerIteration, ScaledLaplacian};
use meshae::mesh::build_adjacency;
use meshae::model::{level_counts, ModelSpec, Normalization};
use meshae::nn::{decay_learning_rate, kl_divergence, l1_loss, sgd_momentum_step, DenseLayer, OptimizerState, Parameterized};
use meshae::oracle::{jacobi_eigen, SpectralOracle};
use meshae::sampling::{build_upsampling, compute_vertex_quadrics, decimate};
use meshae::sparse::SparseMatrix;
use ndarray::{Array2, ArrayView2};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sparse_construction_merges_and_drops_zeros(
        triplets in prop::collection::vec((0usize..6, 0usize..5, -3i32..4), 0..40)
    ) {
        let m = SparseMatrix::from_triplets(6, 5, triplets.iter().map(|&(r, c, v)| (r, c, v as f64))).unwrap();
        let mut dense = Array2::<f64>::zeros((6, 5));
        for &(r, c, v) in &triplets {
            dense[[r, c]] += v as f64;
        }
        prop_assert_eq!(m.to_dense(), dense);
        prop_assert!(m.triplets().all(|(_, _, v)| v != 0.0));
        let mut seen = std::collections::BTreeSet::new();
        prop_assert!(m.triplets().all(|(r, c, _)| seen.insert((r, c))));
        prop_assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn adjacency_and_laplacian_invariants(seed in any::<u64>()) {
        let mesh = random_small_mesh(&mut rng(seed), 20);
        let a = build_adjacency(&mesh).unwrap();
        prop_assert!(a.is_symmetric());
        prop_assert!(a.triplets().all(|(r, c, v)| r != c && v == 1.0));
        let lap = Laplacian::from_mesh(&mesh).unwrap();
        prop_assert!(lap.matrix().is_symmetric());
        for (r, s) in lap.matrix().row_sums().iter().enumerate() {
            prop_assert_eq!(*s, 0.0);
            prop_assert_eq!(lap.matrix().get(r, r), lap.degrees()[r]);
        }
    }

    #[test]
    fn scaled_spectrum_lies_in_unit_interval(seed in any::<u64>()) {
        let mesh = random_small_mesh(&mut rng(seed), 20);
        let lap = Laplacian::from_mesh(&mesh).unwrap();
        let oracle = SpectralOracle::new(&lap).unwrap();
        let rec = oracle.reconstruct();
        prop_assert!((&rec - &lap.matrix().to_dense()).iter().all(|v| v.abs() < 1e-9));
        prop_assert!(oracle.eigenvalues.iter().all(|&l| l > -1e-9));
        let lt = ScaledLaplacian::from_mesh(&mesh, &PowerIteration::default()).unwrap();
        let eig = jacobi_eigen(lt.matrix().to_dense().view()).unwrap();
        prop_assert!(eig.eigenvalues.iter().all(|&l| (-1.0 - 1e-6..=1.0 + 1e-6).contains(&l)),
            "{:?}", eig.eigenvalues);
    }

    #[test]
    fn quadrics_vanish_at_their_own_vertex(seed in any::<u64>()) {
        let mesh = random_small_mesh(&mut rng(seed), 20);
        for (i, q) in compute_vertex_quadrics(&mesh).iter().enumerate() {
            prop_assert!(q.error(mesh.position(i)).abs() <= 1e-12);
            let block = q.q.fixed_view::<3, 3>(0, 0).into_owned();
            let eig = block.symmetric_eigenvalues();
            prop_assert!(eig.iter().all(|&l| l > -1e-12));
        }
    }

    #[test]
    fn sampling_matrices_chain(w in 3usize..8, h in 3usize..8, frac in 0.05f64..0.95) {
        let mesh = grid(w, h, |x, y| 0.1 * x * y);
        let m = mesh.num_vertices();
        let n = ((m as f64 * frac) as usize).clamp(1, m - 1);
        let (coarse, qd) = decimate(&mesh, n).unwrap();
        let qu = build_upsampling(&mesh, &coarse, &qd).unwrap();
        prop_assert_eq!(qd.matrix.shape(), (n, m));
        prop_assert_eq!(qu.matrix.shape(), (m, n));
        for (p, &q) in qd.kept_indices.iter().enumerate() {
            let row: Vec<_> = qu.matrix.row(q).collect();
            prop_assert_eq!(row, vec![(p, 1.0)]);
        }
    }

    #[test]
    fn l1_and_kl_are_nonnegative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, 5, 3, 2.0);
        let b = random_matrix(&mut r, 5, 3, 2.0);
        prop_assert!(l1_loss(a.view(), b.view()).unwrap().0 >= 0.0);
        prop_assert_eq!(l1_loss(a.view(), a.view()).unwrap().0, 0.0);
        let mu: Vec<f64> = a.iter().copied().collect();
        let lv: Vec<f64> = b.iter().copied().collect();
        prop_assert!(kl_divergence(&mu, &lv).unwrap().loss >= -1e-12);
    }

    #[test]
    fn optimizer_buffers_track_parameters(steps in 1usize..6, decay in 0.5f64..1.0) {
        let mut r = rng(steps as u64);
        let mut layer = DenseLayer::glorot(3, 2, &mut r);
        let mut state = OptimizerState::new(&layer, 0.01, decay, 0.9);
        for _ in 0..steps {
            let grads: Vec<Vec<f64>> = layer.params().iter().map(|p| vec![0.1; p.values.len()]).collect();
            sgd_momentum_step(layer.params_mut(), &grads, &mut state).unwrap();
            decay_learning_rate(&mut state);
            for (v, p) in state.velocities.iter().zip(layer.params()) {
                prop_assert_eq!(v.len(), p.values.len());
            }
        }
        prop_assert!((state.current_lr - 0.01 * decay.powi(steps as i32)).abs() < 1e-15);
    }

    #[test]
    fn normalization_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let frames: Vec<Array2<f64>> = (0..4).map(|_| random_matrix(&mut r, 6, 3, 5.0)).collect();
        let norm = Normalization::fit(frames.iter().map(|f| f.view())).unwrap();
        let back = norm.invert(norm.apply(frames[0].view()).view());
        prop_assert!((&back - &frames[0]).iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn error_stats_sanity(errors in prop::collection::vec(0.0f64..10.0, 1..50)) {
        let s = ErrorStats::from_errors(&errors).unwrap();
        prop_assert!(s.mean >= 0.0 && s.std >= 0.0 && s.median >= 0.0);
        prop_assert!(s.median <= s.max);
        let edges: Vec<f64> = (0..=10).map(|i| i as f64).collect();
        let cum = cumulative_error_histogram(&errors, &edges).unwrap();
        prop_assert!(cum.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(*cum.last().unwrap(), 1.0);
    }

    #[test]
    fn interpolation_windows_are_disjoint_runs(lengths in prop::collection::vec(10usize..40, 3..8), seed in any::<u64>()) {
        let t = grid(2, 2, |_, _| 0.0);
        let seqs = lengths.iter().enumerate().map(|(i, &n)| Sequence {
            name: format!("s{i}"),
            frames: vec![Array2::zeros((4, 3)); n],
        }).collect();
        let d = Dataset::new(&t, seqs).unwrap();
        prop_assume!(d.num_frames() >= 100);
        let s = split_interpolation(&d, 10, seed).unwrap();
        prop_assert!(is_partition(&d, &s));
        prop_assert_eq!(s.test.len() % 10, 0);
        prop_assert_eq!(s.test.len(), d.num_frames() / 100 * 10);
        // every maximal run of test frames within a sequence is a multiple of the window
        let mut run = 0;
        let mut prev: Option<(usize, usize)> = None;
        for r in &s.test {
            match prev {
                Some((sq, f)) if sq == r.sequence && f + 1 == r.frame => run += 1,
                _ => {
                    prop_assert_eq!(run % 10, 0);
                    run = 1;
                }
            }
            prev = Some((r.sequence, r.frame));
        }
        prop_assert_eq!(run % 10, 0);
    }

    #[test]
    fn pca_components_are_orthonormal_and_sorted(seed in any::<u64>()) {
        let mut r = rng(seed);
        let frames: Vec<Array2<f64>> = (0..12).map(|_| random_matrix(&mut r, 5, 3, 1.0)).collect();
        let views: Vec<ArrayView2<'_, f64>> = frames.iter().map(|f| f.view()).collect();
        let pca = pca_fit(&views, 6).unwrap();
        let gram = pca.components.dot(&pca.components.t());
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gram[[i, j]] - want).abs() < 1e-10);
            }
        }
        prop_assert!(pca.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn level_counts_follow_quarter_rule(n in 1usize..20_000, levels in 1usize..6) {
        let c = level_counts(n, levels);
        prop_assert_eq!(c.len(), levels + 1);
        prop_assert_eq!(c[0], n);
        for w in c.windows(2) {
            prop_assert_eq!(w[1], w[0].div_ceil(4));
        }
    }

    #[test]
    fn model_widths_fit_any_level_count(levels in 1usize..7, k in 1usize..8, z in 1usize..16) {
        let spec = ModelSpec::with_levels(k, z, false, levels);
        prop_assert!(spec.validate().is_ok());
        prop_assert_eq!(spec.num_levels(), levels);
        prop_assert_eq!(spec.encoder_widths.last(), spec.decoder_widths.first());
        if levels == 4 {
            prop_assert_eq!(spec, ModelSpec::standard(k, z, false));
        }
    }
}
