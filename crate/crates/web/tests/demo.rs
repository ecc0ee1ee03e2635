use compression_readout_web::{convergence, curves, profile};

#[test]
fn noiseless_profile_decodes_exactly() {
    let v = profile(4, "haar", 3, 0.0, 0.0, 0).unwrap();
    assert_eq!(v["x"].as_array().unwrap().len(), 15);
    let truth = v["truth"].as_array().unwrap();
    let decoded = v["decoded"].as_array().unwrap();
    for (t, d) in truth.iter().zip(decoded) {
        assert!((t.as_f64().unwrap() - d.as_f64().unwrap()).abs() < 1e-12);
    }
    assert_eq!(v["ideal"], v["noisy"]);
}

#[test]
fn sampled_profile_has_positive_error() {
    let v = profile(3, "all-ones", 1, 0.0452, 0.0063, 7000).unwrap();
    assert!(v["tv_error"].as_f64().unwrap() > 0.0);
}

#[test]
fn curves_reach_large_n_for_sparse_states() {
    let v = curves("all-ones", 0, 0.0452, 0.0063, "fully-connected", 200).unwrap();
    assert_eq!(v["n"].as_array().unwrap().len(), 200);
    let d = v["direct"][199].as_f64().unwrap();
    let c = v["compression"][199].as_f64().unwrap();
    assert!(c < d);
    let h = curves("haar", 0, 0.0452, 0.0063, "paper-count", 40).unwrap();
    assert_eq!(h["n"].as_array().unwrap().len(), 14);
    assert!(curves("all-ones", 0, 0.0452, 0.0063, "ring", 4).is_err());
}

#[test]
fn convergence_ladder_respects_grid_size() {
    let v = convergence(6, "haar", 2, 0.0452, 0.0063, 3).unwrap();
    let shots: Vec<u64> = v["shots"].as_array().unwrap().iter().map(|s| s.as_u64().unwrap()).collect();
    assert!(shots.iter().all(|s| *s >= 63));
    assert_eq!(*shots.last().unwrap(), 10_000_000);
    let c = v["compression"].as_array().unwrap();
    assert!(c.last().unwrap().as_f64().unwrap() < c[0].as_f64().unwrap());
    assert!(profile(20, "haar", 0, 0.0, 0.0, 0).is_err());
}
