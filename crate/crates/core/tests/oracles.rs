//! Engine outputs against independently computed references.

use approx::assert_abs_diff_eq;
use num_bigint::BigUint;
use num_traits::One;

use compression_readout::bounds::{theorem1_shots, BudgetQuery};
use compression_readout::engines::{
    compression_readout_exact, compression_readout_sparse_exact, direct_readout_exact, direct_readout_exact_sparse,
    direct_readout_sampled,
};
use compression_readout::experiments::runner::mean_sem;
use compression_readout::grid::{
    build_encoding_circuit, build_grid, ideal_ancilla_probability, simulate_circuit_ancilla, Architecture,
};
use compression_readout::noise::{apply_readout_transition, NoiseModel, ReadoutErrorModel};
use compression_readout::state::{AmplitudeState, SparsePopulations, DEFAULT_DENSE_CAP};

fn kron(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![0.0; ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// `Q^{⊗n}` with qubit 0 as the least significant index bit.
fn transition_matrix(n: u32, e0: f64, e1: f64) -> Vec<Vec<f64>> {
    let q = vec![vec![1.0 - e0, e1], vec![e0, 1.0 - e1]];
    let mut t = q.clone();
    for _ in 1..n {
        t = kron(&q, &t);
    }
    t
}

#[test]
fn readout_transition_matches_kronecker_product() {
    for n in 1..=6 {
        for (e0, e1) in [(0.0452, 0.0452), (0.0346, 0.0608), (0.2, 0.01)] {
            let w = AmplitudeState::haar(n, 40 + n as u64, DEFAULT_DENSE_CAP).unwrap().populations();
            let t = transition_matrix(n, e0, e1);
            let model = ReadoutErrorModel::asymmetric(e0, e1).unwrap();
            let fast = apply_readout_transition(&w, &model).unwrap();
            for (i, row) in t.iter().enumerate() {
                let expected: f64 = row.iter().zip(&w).map(|(q, a)| q * a).sum();
                assert_abs_diff_eq!(fast[i], expected, epsilon = 1e-14);
            }
        }
    }
}

#[test]
fn mixed_bit_closed_form_matches_matrix() {
    let (e0, e1) = (0.0346, 0.0608);
    let model = ReadoutErrorModel::asymmetric(e0, e1).unwrap();
    for n in 1..=5u32 {
        let t = transition_matrix(n, e0, e1);
        for i in 0..(1usize << n) {
            let survive = t[i][i];
            let sparse = SparsePopulations::basis(n, BigUint::from(i)).unwrap();
            let e = direct_readout_exact_sparse(&sparse, &model, DEFAULT_DENSE_CAP).unwrap().tv_error;
            assert_abs_diff_eq!(e, 1.0 - survive, epsilon = 1e-14);
        }
    }
}

#[test]
fn uniform_pipeline_matches_extended_precision() {
    // 50-digit evaluation of the full 63-point pipeline for n=6, Uniform, ξ=0, γ=0.0063, G=6
    let reference = 0.000288411235766813072330319020669;
    let w = AmplitudeState::uniform(6, DEFAULT_DENSE_CAP).unwrap().populations();
    let noise = NoiseModel::new(ReadoutErrorModel::NOISELESS, 0.0063).unwrap();
    let r = compression_readout_exact(&w, &noise, Architecture::FullyConnected).unwrap();
    assert_abs_diff_eq!(r.tv_error, reference, epsilon = 1e-10);
}

#[test]
fn affine_decode_hand_computation() {
    let xi = 0.0452;
    let m = 3.0;
    let a = 1.0 - 2.0 * xi;
    let w = [0.0, 0.0, 0.0, 1.0];
    let expected: Vec<f64> = (0..4)
        .map(|i| a * w[i] + (1.0 - a) * (2.0 - if i == 0 { 1.0 } else { 0.0 }) / (2.0 * m + 1.0))
        .collect();
    let noise = NoiseModel::new(ReadoutErrorModel::symmetric(xi).unwrap(), 0.0).unwrap();
    let r = compression_readout_exact(&w, &noise, Architecture::FullyConnected).unwrap();
    let p = r.distribution.unwrap();
    for (got, want) in p.iter().zip(&expected) {
        assert_abs_diff_eq!(got, want, epsilon = 1e-14);
    }
    let e: f64 = 0.5 * expected.iter().zip(&w).map(|(p, w)| (p - w).abs()).sum::<f64>();
    assert_abs_diff_eq!(r.tv_error, e, epsilon = 1e-14);
}

#[test]
fn haar_populations_average_to_uniform() {
    let draws = 10_000u64;
    let mut mean = [0.0f64; 16];
    for s in 0..draws {
        let p = AmplitudeState::haar(4, s, DEFAULT_DENSE_CAP).unwrap().populations();
        for (acc, v) in mean.iter_mut().zip(p) {
            *acc += v / draws as f64;
        }
    }
    for v in mean {
        assert!((v - 1.0 / 16.0).abs() <= 0.002, "{v}");
    }
}

#[test]
fn direct_sampling_within_clt_band() {
    let xi = 0.0452;
    let model = ReadoutErrorModel::symmetric(xi).unwrap();
    let mut w = vec![0.0; 8];
    w[7] = 1.0;
    let exact = 1.0 - (1.0 - xi).powi(3);
    let es: Vec<f64> = (0..10)
        .map(|seed| direct_readout_sampled(&w, &model, 1_000_000, seed, 0).unwrap().tv_error)
        .collect();
    let (mean, sem) = mean_sem(&es);
    assert!((mean - exact).abs() <= 3.0 * sem, "mean {mean}, exact {exact}, sem {sem}");
}

#[test]
fn noiseless_direct_sampling_of_basis_is_exact() {
    let mut w = vec![0.0; 16];
    w[9] = 1.0;
    for shots in [1, 17, 1000] {
        let r = direct_readout_sampled(&w, &ReadoutErrorModel::NOISELESS, shots, 3, 0).unwrap();
        assert_eq!(r.tv_error, 0.0);
    }
}

#[test]
fn circuits_reproduce_fourier_series() {
    for n in 1..=5 {
        let w = AmplitudeState::haar(n, 90 + n as u64, DEFAULT_DENSE_CAP).unwrap();
        let pops = w.populations();
        let grid = build_grid(n).unwrap();
        for x in grid.points() {
            let expected = ideal_ancilla_probability(&pops, x);
            for arch in [Architecture::FullyConnected, Architecture::NearestNeighborWalk] {
                let plan = build_encoding_circuit(n, x, arch).unwrap();
                let got = simulate_circuit_ancilla(&w, &plan).unwrap();
                assert_abs_diff_eq!(got, expected, epsilon = 1e-12);
            }
        }
    }
}

#[test]
fn ideal_probability_for_basis_state() {
    // basis |i⟩ gives cos²(i x)
    let n = 3;
    let grid = build_grid(n).unwrap();
    for i in 0..8 {
        let mut w = vec![0.0; 8];
        w[i] = 1.0;
        for x in grid.points() {
            assert_abs_diff_eq!(ideal_ancilla_probability(&w, x), (i as f64 * x).cos().powi(2), epsilon = 1e-14);
        }
    }
}

#[test]
fn theorem1_budget_by_hand() {
    let (m, eps, eta) = (3.0f64, 0.1f64, 0.05f64);
    let numerator = 48.0 * 9.0 + 4.0 * 3.0 * 7.0 * 0.1;
    let denominator = 49.0 * 0.01;
    let by_hand = (numerator / denominator * (m / eta).ln()).ceil() as u64;
    assert_eq!(by_hand, 3680);
    assert_eq!(theorem1_shots(&BudgetQuery::new(eps, eta, 3).unwrap()), by_hand);
}

#[test]
fn sparse_engine_at_thousand_qubits() {
    let n = 1000;
    let index = (BigUint::one() << n) - BigUint::one();
    let s = SparsePopulations::basis(n, index).unwrap();
    let r = compression_readout_sparse_exact(&s, &NoiseModel::NOISELESS, n as u64, DEFAULT_DENSE_CAP).unwrap();
    assert!(r.tv_error.abs() < 1e-12);

    let noise = NoiseModel::new(ReadoutErrorModel::symmetric(0.0452).unwrap(), 0.0063).unwrap();
    let ones = SparsePopulations::all_ones(100).unwrap();
    let c = compression_readout_sparse_exact(&ones, &noise, 100, DEFAULT_DENSE_CAP).unwrap().tv_error;
    let d = direct_readout_exact_sparse(&ones, &noise.readout, DEFAULT_DENSE_CAP).unwrap().tv_error;
    assert_abs_diff_eq!(d, 1.0 - 0.9548f64.powi(100), epsilon = 1e-12);
    assert!(d > 0.99 && c < d, "compression {c}, direct {d}");
}

#[test]
fn sparse_engine_matches_dense_basis_255() {
    let noise = NoiseModel::new(ReadoutErrorModel::symmetric(0.0452).unwrap(), 0.006293).unwrap();
    let s = SparsePopulations::basis(8, BigUint::from(255u32)).unwrap();
    let a = compression_readout_sparse_exact(&s, &noise, 8, DEFAULT_DENSE_CAP).unwrap().tv_error;
    let b = compression_readout_exact(&s.to_dense(DEFAULT_DENSE_CAP).unwrap(), &noise, Architecture::FullyConnected)
        .unwrap()
        .tv_error;
    assert_abs_diff_eq!(a, b, epsilon = 1e-9);
}

#[test]
fn direct_exact_on_dense_matches_sparse_for_superpositions() {
    let model = ReadoutErrorModel::asymmetric(0.018, 0.051).unwrap();
    let s = SparsePopulations::normalized(
        5,
        [(BigUint::from(3u32), 0.25), (BigUint::from(17u32), 0.5), (BigUint::from(30u32), 0.25)],
    )
    .unwrap();
    let dense = s.to_dense(DEFAULT_DENSE_CAP).unwrap();
    let a = direct_readout_exact_sparse(&s, &model, DEFAULT_DENSE_CAP).unwrap().tv_error;
    let t = transition_matrix(5, 0.018, 0.051);
    let read: Vec<f64> = t.iter().map(|row| row.iter().zip(&dense).map(|(q, w)| q * w).sum()).collect();
    let e = 0.5 * read.iter().zip(&dense).map(|(p, w)| (p - w).abs()).sum::<f64>();
    assert_abs_diff_eq!(a, e, epsilon = 1e-14);
    assert_abs_diff_eq!(direct_readout_exact(&dense, &model).unwrap().tv_error, e, epsilon = 1e-14);
}
