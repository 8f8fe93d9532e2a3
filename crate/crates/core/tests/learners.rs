use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topocontro_core::learn::{
    bootstrap_indices, gradient_check, train, train_adaboost, train_adaboost_traced, train_mlp, train_random_forest,
    train_random_forest_with, tree_seed, Activation, AdaBoostConfig, ForestConfig, LearnError, Matrix, MaxFeatures,
    MlpConfig, MlpModel, ModelKind, ModelParams, TrainedModel, TrainingConfig,
};

fn accuracy(m: &TrainedModel, x: &Matrix, y: &[bool]) -> f64 {
    let p = m.predict(x).unwrap();
    p.labels.iter().zip(y).filter(|(a, b)| a == b).count() as f64 / y.len() as f64
}

fn f1_positive(pred: &[bool], y: &[bool]) -> f64 {
    let tp = pred.iter().zip(y).filter(|(&p, &t)| p && t).count() as f64;
    let fp = pred.iter().zip(y).filter(|(&p, &t)| p && !t).count() as f64;
    let fn_ = pred.iter().zip(y).filter(|(&p, &t)| !p && t).count() as f64;
    if tp == 0.0 {
        return 0.0;
    }
    2.0 * tp / (2.0 * tp + fp + fn_)
}

fn separable_1d(n: usize, seed: u64) -> (Matrix, Vec<bool>) {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for i in 0..n {
        let mag: f64 = r.gen_range(0.05..3.0);
        let pos = i % 2 == 0;
        rows.push(vec![if pos { mag } else { -mag }]);
        y.push(pos);
    }
    (Matrix::from_rows(&rows), y)
}

fn separable_nd(n: usize, d: usize, seed: u64) -> (Matrix, Vec<bool>) {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..d).map(|_| r.gen_range(-1.0..1.0)).collect();
    let mut rows = Vec::new();
    let mut y = Vec::new();
    while rows.len() < n {
        let row: Vec<f64> = (0..d).map(|_| r.gen_range(-2.0..2.0)).collect();
        let s: f64 = row.iter().zip(&w).map(|(a, b)| a * b).sum();
        if s.abs() < 0.2 {
            continue;
        }
        y.push(s > 0.0);
        rows.push(row);
    }
    (Matrix::from_rows(&rows), y)
}

fn xor(n: usize, seed: u64) -> (Matrix, Vec<bool>) {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for _ in 0..n {
        let a: f64 = r.gen_range(-1.0..1.0);
        let b: f64 = r.gen_range(-1.0..1.0);
        y.push((a > 0.0) != (b > 0.0));
        rows.push(vec![a, b]);
    }
    (Matrix::from_rows(&rows), y)
}

#[test]
fn adaboost_separable_1d_is_perfect() {
    let (x, y) = separable_1d(40, 1);
    let cfg = AdaBoostConfig { n_estimators: 50, learning_rate: 1.0 };
    let m = train_adaboost(&x, &y, &cfg, 0).unwrap();
    assert_eq!(f1_positive(&m.predict(&x).unwrap().labels, &y), 1.0);
}

#[test]
fn adaboost_fits_xor_with_enough_stumps() {
    let (x, y) = xor(60, 2);
    let cfg = AdaBoostConfig { n_estimators: 100, learning_rate: 1.0 };
    let (m, trace) = train_adaboost_traced(&x, &y, &cfg, 0).unwrap();
    assert!(trace.alphas.len() >= 25);
    let acc = accuracy(&m, &x, &y);
    assert!(acc > 0.9, "xor training accuracy {acc}");
}

#[test]
fn adaboost_round_invariants() {
    for seed in 0..10 {
        let (x, y) = xor(80, 100 + seed);
        let cfg = AdaBoostConfig { n_estimators: 60, learning_rate: 0.5 };
        let (m, trace) = train_adaboost_traced(&x, &y, &cfg, seed).unwrap();
        let mut prev = 1.0;
        for t in 0..trace.errors.len() {
            assert!(trace.errors[t] < 0.5);
            assert!((trace.weight_sums[t] - 1.0).abs() <= 1e-12);
            assert!(trace.bounds[t] <= prev + 1e-15);
            prev = trace.bounds[t];
        }
        // The product of normalizers bounds the training error of the final vote.
        let err = 1.0 - accuracy(&m, &x, &y);
        assert!(err <= *trace.bounds.last().unwrap() + 1e-12);
    }
}

#[test]
fn adaboost_scores_are_logistic_of_margin() {
    let (x, y) = xor(40, 3);
    let m = train_adaboost(&x, &y, &AdaBoostConfig::default(), 0).unwrap();
    let ModelParams::AdaBoost(inner) = &m.params else { panic!() };
    let p = m.predict(&x).unwrap();
    for (i, row) in x.iter_rows().enumerate() {
        let margin = inner.margin(row);
        assert!((p.scores[i] - 1.0 / (1.0 + (-2.0 * margin).exp())).abs() < 1e-12);
        assert_eq!(p.labels[i], margin > 0.0);
    }
}

#[test]
fn forest_separable_training_is_perfect() {
    let (x, y) = separable_nd(120, 5, 4);
    let m = train_random_forest(&x, &y, &ForestConfig::default(), 7).unwrap();
    assert_eq!(f1_positive(&m.predict(&x).unwrap().labels, &y), 1.0);
}

fn gini(pos: usize, n: usize) -> f64 {
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

/// Exhaustive Gini stump over the rows in `sample`.
fn gini_stump(x: &Matrix, y: &[bool], sample: &[usize]) -> impl Fn(&[f64]) -> bool {
    let n = sample.len();
    let mut best = (f64::INFINITY, 0usize, f64::NEG_INFINITY, false, false);
    for j in 0..x.cols() {
        let mut vals: Vec<f64> = sample.iter().map(|&i| x.get(i, j)).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for w in vals.windows(2) {
            let thr = w[0] + (w[1] - w[0]) / 2.0;
            let left: Vec<usize> = sample.iter().copied().filter(|&i| x.get(i, j) <= thr).collect();
            let lp = left.iter().filter(|&&i| y[i]).count();
            let nl = left.len();
            let tp = sample.iter().filter(|&&i| y[i]).count();
            let imp = (nl as f64 * gini(lp, nl) + (n - nl) as f64 * gini(tp - lp, n - nl)) / n as f64;
            if imp < best.0 {
                best = (imp, j, thr, 2 * lp > nl, 2 * (tp - lp) > n - nl);
            }
        }
    }
    let (_, j, thr, lv, rv) = best;
    move |row: &[f64]| if row[j] <= thr { lv } else { rv }
}

#[test]
fn single_depth_one_tree_matches_stump_on_its_bootstrap() {
    for seed in 0..20 {
        let (x, y) = xor(50, 200 + seed);
        let cfg = ForestConfig {
            n_estimators: 1,
            max_features: MaxFeatures::All,
            max_depth: Some(1),
        };
        let m = train_random_forest(&x, &y, &cfg, seed).unwrap();
        let sample = bootstrap_indices(x.rows(), tree_seed(seed, 0));
        let stump = gini_stump(&x, &y, &sample);
        let pred = m.predict(&x).unwrap().labels;
        for (i, row) in x.iter_rows().enumerate() {
            assert_eq!(pred[i], stump(row), "seed {seed} row {i}");
        }
    }
}

#[test]
fn forest_votes_survive_row_duplication() {
    // Separated classes, so every bootstrap of either copy yields a perfect tree.
    let (x, y) = separable_1d(30, 5);
    let rows: Vec<Vec<f64>> = x.iter_rows().chain(x.iter_rows()).map(|r| r.to_vec()).collect();
    let x2 = Matrix::from_rows(&rows);
    let y2: Vec<bool> = y.iter().chain(&y).copied().collect();
    let cfg = ForestConfig { n_estimators: 25, ..ForestConfig::default() };
    let a = train_random_forest(&x, &y, &cfg, 11).unwrap();
    let b = train_random_forest(&x2, &y2, &cfg, 11).unwrap();
    let probe = Matrix::from_rows(&[vec![-2.0], vec![-0.5], vec![0.5], vec![2.5]]);
    assert_eq!(a.predict(&x).unwrap(), b.predict(&x).unwrap());
    assert_eq!(a.predict(&probe).unwrap(), b.predict(&probe).unwrap());
}

#[test]
fn forest_schedule_does_not_change_result() {
    let (x, y) = xor(60, 8);
    let cfg = ForestConfig { n_estimators: 12, ..ForestConfig::default() };
    let serial = train_random_forest(&x, &y, &cfg, 3).unwrap();
    let reversed = train_random_forest_with(&x, &y, &cfg, 3, |n, fit| {
        let mut trees: Vec<_> = (0..n).rev().map(|i| (i, fit(i))).collect();
        trees.sort_by_key(|(i, _)| *i);
        trees.into_iter().map(|(_, t)| t).collect()
    })
    .unwrap();
    assert_eq!(serial, reversed);
}

#[test]
fn mlp_separable_training() {
    let (x, y) = separable_nd(100, 4, 9);
    let cfg = MlpConfig {
        hidden_sizes: vec![32],
        learning_rate: 1e-2,
        ..MlpConfig::default()
    };
    let m = train_mlp(&x, &y, &cfg, 1).unwrap();
    let f1 = f1_positive(&m.predict(&x).unwrap().labels, &y);
    assert!(f1 >= 0.99, "f1 {f1}");
}

#[test]
fn mlp_zero_epochs_predicts_from_init() {
    let (x, y) = separable_nd(20, 3, 1);
    let cfg = MlpConfig { epochs: 0, ..MlpConfig::default() };
    let m = train_mlp(&x, &y, &cfg, 5).unwrap();
    let ModelParams::Mlp(inner) = &m.params else { panic!() };
    let init = MlpModel::init(3, &[64], Activation::Relu, 5);
    assert_eq!(inner.params, init.params);
    let p = m.predict(&x).unwrap();
    assert!(p.scores.iter().all(|s| (0.0..=1.0).contains(s)));
}

fn random_small(r: &mut ChaCha8Rng, n: usize, d: usize) -> (Matrix, Vec<bool>) {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| r.gen_range(-1.5..1.5)).collect()).collect();
    let y: Vec<bool> = (0..n).map(|i| i % 2 == 0 || r.gen_bool(0.3)).collect();
    (Matrix::from_rows(&rows), y)
}

#[test]
fn mlp_gradient_check_all_activations() {
    let mut r = ChaCha8Rng::seed_from_u64(77);
    for act in [Activation::Relu, Activation::Tanh, Activation::Logistic, Activation::Identity] {
        let mut checked = 0;
        let mut attempts = 0;
        while checked < 10 {
            attempts += 1;
            assert!(attempts < 500, "too many kink resamples for {act:?}");
            let n = r.gen_range(2..=20);
            let d = r.gen_range(1..=10);
            let hidden: Vec<usize> = if r.gen_bool(0.5) {
                vec![r.gen_range(1..6)]
            } else {
                vec![r.gen_range(1..6), r.gen_range(1..6)]
            };
            let (x, y) = random_small(&mut r, n, d);
            let m = MlpModel::init(d, &hidden, act, r.gen());
            match gradient_check(&m, &x, &y, r.gen_range(0.0..0.5), 1e-5) {
                Ok(err) => {
                    assert!(err < 1e-4, "{act:?} hidden {hidden:?}: {err}");
                    checked += 1;
                }
                Err(LearnError::NearKink) => continue,
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[test]
fn zero_identity_net_gradient_is_exact() {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    let (x, y) = random_small(&mut r, 10, 4);
    let m = MlpModel::zeros(4, &[3], Activation::Identity);
    let err = gradient_check(&m, &x, &y, 0.2, 1e-5).unwrap();
    assert!(err < 1e-8, "{err}");
}

/// Plain logistic regression trained full-batch with the same Adam settings.
fn logistic_regression(x: &Matrix, y: &[bool], lr: f64, epochs: usize) -> Vec<f64> {
    let d = x.cols();
    let n = x.rows() as f64;
    let mut w = vec![0.0; d + 1];
    let (mut m, mut v) = (vec![0.0; d + 1], vec![0.0; d + 1]);
    let (mut b1, mut b2) = (1.0f64, 1.0f64);
    for _ in 0..epochs {
        let mut g = vec![0.0; d + 1];
        for (i, row) in x.iter_rows().enumerate() {
            let z = w[d] + row.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
            let e = 1.0 / (1.0 + (-z).exp()) - if y[i] { 1.0 } else { 0.0 };
            for k in 0..d {
                g[k] += e * row[k] / n;
            }
            g[d] += e / n;
        }
        b1 *= 0.9;
        b2 *= 0.999;
        let step = lr * (1.0 - b2).sqrt() / (1.0 - b1);
        for k in 0..=d {
            m[k] = 0.9 * m[k] + 0.1 * g[k];
            v[k] = 0.999 * v[k] + 0.001 * g[k] * g[k];
            w[k] -= step * m[k] / (v[k].sqrt() + 1e-8);
        }
    }
    w
}

#[test]
fn identity_mlp_reduces_to_logistic_regression() {
    // Overlapping classes so the optimum is finite.
    let mut r = ChaCha8Rng::seed_from_u64(13);
    let rows: Vec<Vec<f64>> = (0..60).map(|_| vec![r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)]).collect();
    let y: Vec<bool> = rows.iter().map(|p| p[0] - 0.5 * p[1] + r.gen_range(-1.5..1.5) > 0.0).collect();
    let x = Matrix::from_rows(&rows);
    let cfg = MlpConfig {
        hidden_sizes: vec![2],
        activation: Activation::Identity,
        learning_rate: 0.01,
        l2_alpha: 0.0,
        epochs: 4000,
        batch_size: 60,
    };
    let mlp = train_mlp(&x, &y, &cfg, 2).unwrap();
    let w = logistic_regression(&x, &y, 0.01, 4000);
    let p = mlp.predict(&x).unwrap();
    for (i, row) in x.iter_rows().enumerate() {
        let z = w[2] + row[0] * w[0] + row[1] * w[1];
        let lr = 1.0 / (1.0 + (-z).exp());
        assert!((p.scores[i] - lr).abs() < 0.02, "row {i}: {} vs {lr}", p.scores[i]);
    }
}

#[test]
fn training_is_deterministic_and_serializes_exactly() {
    let (x, y) = xor(50, 21);
    let mut cfg = TrainingConfig::default();
    cfg.mlp.epochs = 20;
    cfg.random_forest.n_estimators = 10;
    for kind in ModelKind::ALL {
        let a = train(kind, &x, &y, &cfg, 99).unwrap();
        let b = train(kind, &x, &y, &cfg, 99).unwrap();
        assert_eq!(a, b);
        let json = serde_json::to_string(&a).unwrap();
        let back: TrainedModel = serde_json::from_str(&json).unwrap();
        assert_eq!(a, back);
        assert_eq!(a.predict(&x).unwrap(), back.predict(&x).unwrap());
        assert_eq!(back.kind(), kind);
    }
}

#[test]
fn predict_edge_cases() {
    let (x, y) = separable_1d(10, 3);
    for kind in ModelKind::ALL {
        let m = train(kind, &x, &y, &TrainingConfig::default(), 0).unwrap();
        let one = m.predict(&Matrix::from_rows(&[vec![1.0]])).unwrap();
        assert_eq!(one.labels.len(), 1);
        assert!(m.predict(&Matrix::new(0, 1)).unwrap().labels.is_empty());
        assert!(m.predict(&Matrix::from_rows(&[vec![1.0, 1.0]])).is_err());
    }
}
