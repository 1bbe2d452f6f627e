mod common;

use neuroevo::dlopt::{
    batchnorm_backward, batchnorm_forward, dropout_infer, dropout_train, lcn, whiten, BatchNormState,
    BnMode, LrSchedule, MomentumState,
};
use neuroevo::rng::seeded;
use proptest::prelude::*;
use rand::Rng;

fn random_rows(seed: u64, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    let mut rng = seeded(seed);
    (0..rows).map(|_| (0..cols).map(|_| rng.random_range(-5.0..5.0)).collect()).collect()
}

#[test]
fn momentum_examples() {
    let mut plain = MomentumState::new(2, 0.0, 0.3).unwrap();
    assert_eq!(plain.momentum_step(&[1.0, -2.0]).unwrap(), vec![-0.3, 0.6]);

    let mut s = MomentumState::new(1, 0.9, 0.1).unwrap();
    assert!((s.momentum_step(&[1.0]).unwrap()[0] + 0.1).abs() < 1e-15);
    assert!((s.momentum_step(&[1.0]).unwrap()[0] + 0.19).abs() < 1e-15);
    let mut last = 0.0;
    for _ in 0..1000 {
        last = s.momentum_step(&[1.0]).unwrap()[0];
    }
    assert!((last + 1.0).abs() < 1e-9);

    let mut idle = MomentumState::new(3, 0.9, 0.1).unwrap();
    assert_eq!(idle.momentum_step(&[0.0; 3]).unwrap(), vec![0.0; 3]);
}

#[test]
fn momentum_reaches_its_limit_in_the_predicted_iterations() {
    let (lr, m, g): (f64, f64, f64) = (0.05, 0.8, 2.0);
    let limit = -lr * g / (1.0 - m);
    let n = (1e-9f64.ln() / m.ln()).ceil() as usize;
    let mut s = MomentumState::new(1, m, lr).unwrap();
    let mut last = 0.0;
    for _ in 0..n {
        last = s.momentum_step(&[g]).unwrap()[0];
    }
    assert!((last - limit).abs() < 1e-9 * limit.abs().max(1.0));
}

#[test]
fn nesterov_on_a_quadratic() {
    let mut s = MomentumState::new(1, 0.9, 0.1).unwrap();
    let grad = |w: &[f64]| Ok(w.to_vec());
    let mut w = vec![1.0];
    let d = s.nesterov_step(&w, grad).unwrap();
    w[0] += d[0];
    assert!((w[0] - 0.9).abs() < 1e-15);
    let d = s.nesterov_step(&w, grad).unwrap();
    assert!((d[0] + 0.171).abs() < 1e-12);
    w[0] += d[0];
    assert!((w[0] - 0.729).abs() < 1e-12);

    let mut plain = MomentumState::new(1, 0.0, 0.1).unwrap();
    let w = [2.0];
    assert_eq!(plain.nesterov_step(&w, grad).unwrap(), vec![-0.2]);
}

#[test]
fn schedule_examples() {
    let step = LrSchedule::Step { lr0: 0.1, factor: 0.5, period: 10 };
    assert!((step.lr_at(25) - 0.025).abs() < 1e-15);
    let exp = LrSchedule::Exponential { lr0: 0.1, k: 0.1 };
    assert_eq!(exp.lr_at(0), 0.1);
    assert!((exp.lr_at(10) - 0.036788).abs() < 1e-6);
    assert!(LrSchedule::Step { lr0: 0.1, factor: 1.5, period: 10 }.validate().is_err());
    assert!(LrSchedule::Step { lr0: 0.1, factor: 0.5, period: 0 }.validate().is_err());
}

#[test]
fn whitening_examples() {
    let data = random_rows(1, 50, 4);
    let (out, _) = whiten(&data).unwrap();
    for k in 0..4 {
        let mean = out.iter().map(|r| r[k]).sum::<f64>() / 50.0;
        let var = out.iter().map(|r| (r[k] - mean).powi(2)).sum::<f64>() / 50.0;
        assert!(mean.abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-9);
    }

    let constant = vec![vec![3.0, 1.0], vec![3.0, 2.0], vec![3.0, 5.0]];
    let (out, stats) = whiten(&constant).unwrap();
    assert!(out.iter().all(|r| r[0] == 0.0));
    assert_eq!(stats.std[0], 0.0);
}

#[test]
fn lcn_examples() {
    let fives = vec![vec![5.0; 5]; 5];
    // zero padding only touches the border, so the interior sees a flat window
    assert_eq!(lcn(&fives, 1).unwrap()[2][2], 0.0);

    let small = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
    let out = lcn(&small, 1).unwrap();
    assert_eq!(out.len(), 2);
    assert_eq!(out[0].len(), 2);
    let expect = common::lcn_reference(&small, 1);
    assert!((out[0][0] - expect[0][0]).abs() < 1e-12);
    assert!((out[0][0] - -0.0767).abs() < 1e-4, "{}", out[0][0]);
}

#[test]
fn batchnorm_examples() {
    let mut state = BatchNormState::new(1);
    state.epsilon = 1e-12;
    let batch = vec![vec![1.0], vec![2.0], vec![3.0]];
    let (y, _) = batchnorm_forward(&batch, &mut state, BnMode::Train).unwrap();
    let expect = [-1.224744871391589, 0.0, 1.224744871391589];
    for (r, e) in y.iter().zip(expect) {
        assert!((r[0] - e).abs() < 1e-6);
    }
}

#[test]
fn batchnorm_can_recover_the_input() {
    let batch = random_rows(2, 16, 3);
    let mut state = BatchNormState::new(3);
    state.epsilon = 1e-12;
    for k in 0..3 {
        let mean = batch.iter().map(|r| r[k]).sum::<f64>() / 16.0;
        let var = batch.iter().map(|r| (r[k] - mean).powi(2)).sum::<f64>() / 16.0;
        state.gamma[k] = (var + state.epsilon).sqrt();
        state.beta[k] = mean;
    }
    let (y, _) = batchnorm_forward(&batch, &mut state, BnMode::Train).unwrap();
    for (a, b) in y.iter().flatten().zip(batch.iter().flatten()) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn batchnorm_inference_is_per_example() {
    let mut state = BatchNormState::new(2);
    for seed in 0..5 {
        batchnorm_forward(&random_rows(seed, 8, 2), &mut state, BnMode::Train).unwrap();
    }
    let batch = random_rows(9, 6, 2);
    let (whole, _) = batchnorm_forward(&batch, &mut state.clone(), BnMode::Infer).unwrap();
    for (row, expect) in batch.iter().zip(&whole) {
        let (single, _) = batchnorm_forward(std::slice::from_ref(row), &mut state.clone(), BnMode::Infer).unwrap();
        assert_eq!(&single[0], expect);
    }
}

#[test]
fn batchnorm_backward_examples() {
    let mut state = BatchNormState::new(3);
    let batch = random_rows(3, 5, 3);
    let (_, cache) = batchnorm_forward(&batch, &mut state, BnMode::Train).unwrap();
    let (dx, dgamma, dbeta) = batchnorm_backward(&cache, &vec![vec![0.0; 3]; 5]).unwrap();
    assert!(dx.iter().flatten().all(|&v| v == 0.0));
    assert!(dgamma.iter().chain(&dbeta).all(|&v| v == 0.0));

    let upstream = random_rows(4, 5, 3);
    let (_, _, dbeta) = batchnorm_backward(&cache, &upstream).unwrap();
    for k in 0..3 {
        let sum: f64 = upstream.iter().map(|r| r[k]).sum();
        assert!((dbeta[k] - sum).abs() < 1e-12);
    }
}

#[test]
fn dropout_examples() {
    let units = vec![1.0; 100_000];
    let (out, mask) = dropout_train(&units, 0.5, &mut seeded(5)).unwrap();
    let zeroed = mask.iter().filter(|&&k| !k).count() as f64 / units.len() as f64;
    assert!((zeroed - 0.5).abs() < 0.005, "{zeroed}");
    assert!(out.iter().zip(&mask).all(|(o, &k)| if k { *o == 1.0 } else { *o == 0.0 }));

    let mut rng = seeded(6);
    let trials = 100_000;
    let w = 0.8;
    let mean = (0..trials).map(|_| dropout_train(&[w], 0.5, &mut rng).unwrap().0[0]).sum::<f64>() / trials as f64;
    let infer = dropout_infer(&[w], 0.5).unwrap()[0];
    assert!((mean - infer).abs() < 0.01 * infer, "{mean} vs {infer}");

    assert_eq!(dropout_infer(&[0.3, -1.0], 0.0).unwrap(), vec![0.3, -1.0]);
    assert_eq!(dropout_infer(&[0.5, -2.0], 0.25).unwrap(), vec![0.375, -1.5]);
    assert!(dropout_train(&units, 1.0, &mut rng).is_err());
}

proptest! {
    #[test]
    fn nesterov_matches_momentum_from_rest(g in prop::collection::vec(-10.0f64..10.0, 1..20), m in 0.0f64..0.99, lr in 0.0f64..1.0) {
        let w: Vec<f64> = g.iter().map(|x| x * 0.5).collect();
        let mut a = MomentumState::new(g.len(), m, lr).unwrap();
        let mut b = a.clone();
        let da = a.momentum_step(&g).unwrap();
        let db = b.nesterov_step(&w, |_| Ok(g.clone())).unwrap();
        prop_assert_eq!(da, db);
    }

    #[test]
    fn whitening_is_idempotent(seed in any::<u64>(), rows in 3usize..40, cols in 1usize..6) {
        let data = random_rows(seed, rows, cols);
        let (once, _) = whiten(&data).unwrap();
        let (twice, _) = whiten(&once).unwrap();
        for (a, b) in once.iter().flatten().zip(twice.iter().flatten()) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn batchnorm_standardizes_each_feature(seed in any::<u64>(), rows in 2usize..30, cols in 1usize..5) {
        let batch = random_rows(seed, rows, cols);
        let mut state = BatchNormState::new(cols);
        let (_, cache) = batchnorm_forward(&batch, &mut state, BnMode::Train).unwrap();
        let n = rows as f64;
        for k in 0..cols {
            let mean = cache.x_hat.iter().map(|r| r[k]).sum::<f64>() / n;
            let var = cache.x_hat.iter().map(|r| (r[k] - mean).powi(2)).sum::<f64>() / n;
            prop_assert!(mean.abs() < 1e-7);
            // epsilon shrinks the variance slightly below 1
            let raw = batch.iter().map(|r| r[k]).sum::<f64>() / n;
            let raw_var = batch.iter().map(|r| (r[k] - raw).powi(2)).sum::<f64>() / n;
            let expect = raw_var / (raw_var + state.epsilon);
            prop_assert!((var - expect).abs() < 1e-7);
        }
    }

    #[test]
    fn lcn_matches_reference(seed in any::<u64>(), rows in 1usize..8, cols in 1usize..8, radius in 1usize..3) {
        let grid = random_rows(seed, rows, cols);
        let out = lcn(&grid, radius).unwrap();
        let expect = common::lcn_reference(&grid, radius);
        for (a, b) in out.iter().flatten().zip(expect.iter().flatten()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dropout_inference_is_linear(w in prop::collection::vec(-5.0f64..5.0, 1..20), p in 0.0f64..0.99) {
        let once = dropout_infer(&w, p).unwrap();
        let doubled: Vec<f64> = w.iter().map(|x| 2.0 * x).collect();
        let twice = dropout_infer(&doubled, p).unwrap();
        for (a, b) in once.iter().zip(twice) {
            prop_assert!((2.0 * a - b).abs() < 1e-12);
        }
    }
}
