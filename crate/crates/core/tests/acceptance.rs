//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Runs without the libtest harness so the report is always printed.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use smile::data::{mask_labels, write_dataset};
use smile::eval::{
    bench_scaling, generate_synthetic, micro_f1, run_missing_rate_experiment, BenchConfig,
    ExperimentGrid,
};
use smile::pu::{estimate_c, pu_loss, pu_loss_at, pu_loss_gradient, train_pu_binary};
use smile::stacking::{cross_val_predictions_traced, load_model, save_model, train_stacked};
use smile::{
    Augmentation, CEstimateConfig, LabelVector, MaskSpec, MultiLabelDataset, PUBinaryModel,
    SGDConfig, SparseVector, StackConfig, StackedModel,
};

use common::{gaussian_vec, random_labels, random_sparse, rng, separable_pu};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("gradient matches finite differences", secs(1), gradient_oracle),
        ("c = 1 is plain logistic regression", secs(10), logistic_equivalence),
        ("label frequency recovery", secs(30), c_recovery),
        ("micro-F1 against confusion counts", secs(1), micro_f1_oracle),
        ("masking keeps round((1-r)P) positives", secs(1), masking_exactness),
        ("out-of-fold predictions never see their row", secs(30), no_leakage),
        ("missing-label robustness", secs(600), missing_label_robustness),
        ("training time linear in n", secs(300), linearity),
        ("model files round-trip bitwise", secs(10), persistence),
        ("training output independent of threads", secs(60), determinism),
    ];

    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run));
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("panicked: {}", panic_message(&e))),
        };
        let in_time = elapsed <= *limit;
        let verdict = if pass && in_time { "PASS" } else { "FAIL" };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {:>2} {verdict}: {name}: {detail} [{:.2}s, limit {}s{}]",
            i + 1,
            elapsed.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { ", over time" }
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn panic_message(e: &Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_default()
}

fn gradient_oracle() -> Outcome {
    let mut r = rng(1);
    let d = 8;
    let mut worst = 0.0f64;
    let mut checks = 0;
    for &c in &[0.3, 0.7, 1.0] {
        for _ in 0..25 {
            let w: Vec<f64> = gaussian_vec(&mut r, d).iter().map(|v| 0.5 * v).collect();
            let b: f64 = r.random_range(-1.0..1.0);
            let x = random_sparse(&mut r, d, 0.6);
            let s = r.random::<bool>();
            let model = PUBinaryModel::new(w.clone(), b, c).unwrap();
            let grad = pu_loss_gradient(&model, &x, s);

            let loss_at = |w: Vec<f64>, b: f64| pu_loss(&PUBinaryModel::new(w, b, c).unwrap(), &x, s);
            let h = 1e-6;
            let mut pairs = Vec::new();
            for &(j, g) in &grad.weights {
                let (mut up, mut down) = (w.clone(), w.clone());
                up[j - 1] += h;
                down[j - 1] -= h;
                let fd = (loss_at(up, b) - loss_at(down, b)) / (2.0 * h);
                pairs.push((g, fd));
            }
            let fd_bias = (loss_at(w.clone(), b + h) - loss_at(w.clone(), b - h)) / (2.0 * h);
            pairs.push((grad.bias, fd_bias));
            for (g, fd) in pairs {
                let rel = (g - fd).abs() / g.abs().max(fd.abs());
                worst = worst.max(if rel.is_nan() { 0.0 } else { rel });
                checks += 1;
            }
        }
    }
    outcome(
        worst <= 1e-5,
        format!("{checks} partials over 75 draws, worst relative error {worst:.2e}"),
    )
}

fn reference_logistic_loss(z: f64, positive: bool) -> f64 {
    let t = if positive { -z } else { z };
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

fn reference_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Textbook logistic-regression SGD with the same step schedule and shuffle.
fn reference_logistic_sgd(
    x: &[SparseVector],
    y: &[bool],
    d: usize,
    cfg: &SGDConfig,
) -> (Vec<f64>, f64) {
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut r = rng(cfg.rng_seed);
    let n = x.len() as f64;
    let mut t = 0u64;
    for _ in 0..cfg.epochs {
        order.shuffle(&mut r);
        for &i in &order {
            let eta = cfg.learning_rate / (1.0 + t as f64 / n);
            let z = x[i].dot(&w) + b;
            let g = if y[i] {
                -reference_sigmoid(-z)
            } else {
                reference_sigmoid(z)
            };
            let step = eta * g;
            for (j, v) in x[i].iter() {
                w[j - 1] -= step * v;
            }
            b -= step;
            t += 1;
        }
    }
    (w, b)
}

fn logistic_equivalence() -> Outcome {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let z: f64 = r.random_range(-40.0..40.0);
        let positive = r.random::<bool>();
        worst = worst.max((pu_loss_at(z, positive, 1.0) - reference_logistic_loss(z, positive)).abs());
    }
    let data = separable_pu(2000, 15, 1.0, 0.0, 3);
    let labels: Vec<bool> = data
        .y
        .iter()
        .zip(0..)
        .map(|(&y, i)| if i % 7 == 0 { !y } else { y })
        .collect();
    let cfg = SGDConfig {
        l2_penalty: 0.0,
        rng_seed: 11,
        ..SGDConfig::default()
    };
    let model = train_pu_binary(&data.x, &labels, 15, 1.0, &cfg).unwrap();
    let (w, b) = reference_logistic_sgd(&data.x, &labels, 15, &cfg);
    let bitwise = model.bias().to_bits() == b.to_bits()
        && model.weights().iter().zip(&w).all(|(a, b)| a.to_bits() == b.to_bits());
    outcome(
        worst <= 1e-12 && bitwise,
        format!("max per-sample gap {worst:.1e} over 1000 samples; SGD run bitwise equal: {bitwise}"),
    )
}

fn c_recovery() -> Outcome {
    let mut estimates = Vec::new();
    for seed in 0..10u64 {
        let data = separable_pu(5000, 20, 0.7, 1.0, 100 + seed);
        let c = estimate_c(
            &data.x,
            &data.s,
            &CEstimateConfig::default().with_seed(seed),
            &SGDConfig::default().with_seed(seed),
        )
        .unwrap();
        estimates.push(c);
    }
    let inside = estimates.iter().filter(|c| (0.6..=0.8).contains(*c)).count();
    let shown: Vec<String> = estimates.iter().map(|c| format!("{c:.3}")).collect();
    outcome(
        inside >= 8,
        format!("{inside}/10 estimates in [0.6, 0.8]: {}", shown.join(" ")),
    )
}

fn brute_force_f1(pred: &[LabelVector], truth: &[LabelVector]) -> f64 {
    let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
    for (p, t) in pred.iter().zip(truth) {
        for k in 0..p.len() {
            match (p.is_positive(k), t.is_positive(k)) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
    }
    if tp + fp + fn_ == 0 {
        1.0
    } else {
        (2 * tp) as f64 / (2 * tp + fp + fn_) as f64
    }
}

fn micro_f1_oracle() -> Outcome {
    let mut r = rng(4);
    let mut mismatches = 0;
    for _ in 0..100 {
        let n = r.random_range(1..=20);
        let q = r.random_range(1..=5);
        let (pp, pt) = (r.random_range(0.0..0.7), r.random_range(0.0..0.7));
        let pred: Vec<_> = (0..n).map(|_| random_labels(&mut r, q, pp)).collect();
        let truth: Vec<_> = (0..n).map(|_| random_labels(&mut r, q, pt)).collect();
        let got = micro_f1(&pred, &truth).unwrap().micro_f1;
        if got.to_bits() != brute_force_f1(&pred, &truth).to_bits() {
            mismatches += 1;
        }
    }
    let truth = vec![
        LabelVector::from_positives(3, &[0, 1]).unwrap(),
        LabelVector::from_positives(3, &[2]).unwrap(),
    ];
    let pred = vec![
        LabelVector::from_positives(3, &[0]).unwrap(),
        LabelVector::from_positives(3, &[2]).unwrap(),
    ];
    let hand = micro_f1(&pred, &truth).unwrap().micro_f1;
    outcome(
        mismatches == 0 && hand == 0.8,
        format!("{mismatches}/100 mismatches; hand-counted example gives {hand}"),
    )
}

fn masking_exactness() -> Outcome {
    // one or two positives per instance; P = 135 is odd so r = 0.5 lands on a tie
    let (n, q) = (101, 4);
    let x: Vec<_> = (0..n).map(|i| SparseVector::from_dense(&[i as f64 + 1.0])).collect();
    let s: Vec<_> = (0..n)
        .map(|i| {
            let mut ks = vec![i % q];
            if i % 3 == 0 {
                ks.push((i + 1) % q);
            }
            LabelVector::from_positives(q, &ks).unwrap()
        })
        .collect();
    let ds = MultiLabelDataset::new(1, q, x, s, None).unwrap();
    let p = ds.observed_positive_count();
    let mut ok = p == 135;
    let mut counts = Vec::new();
    for &rate in &[0.0, 0.2, 0.5, 1.0] {
        let masked = mask_labels(&ds, &MaskSpec::new(rate, 9).unwrap()).unwrap().dataset;
        let kept = masked.observed_positive_count();
        let expected = ((1.0 - rate) * p as f64).round() as usize;
        ok &= kept == expected;
        ok &= masked
            .observed_labels()
            .iter()
            .zip(ds.observed_labels())
            .all(|(m, o)| (0..q).all(|k| !m.is_positive(k) || o.is_positive(k)));
        if rate == 0.0 {
            ok &= masked.observed_labels() == ds.observed_labels();
        }
        if rate == 1.0 {
            ok &= masked.observed_labels().iter().all(|l| l.count_positive() == 0);
        }
        counts.push(format!("r={rate}: {kept}/{expected}"));
    }
    outcome(ok, format!("P={p}; kept/expected {}", counts.join(", ")))
}

fn no_leakage() -> Outcome {
    let ds = generate_synthetic(40, 10, 3, 0.8, 0.0, 6).unwrap();
    let n = ds.num_instances();
    let mut ok = true;
    let mut notes = Vec::new();
    for &m in &[2usize, 5, n] {
        let cfg = StackConfig {
            cv_folds: m,
            ..StackConfig::default()
        };
        let (preds, trace) = cross_val_predictions_traced(&ds, &cfg, ds.num_features()).unwrap();
        let mut checked = 0;
        for (k, label) in trace.iter().enumerate() {
            let mut seen = vec![0usize; n];
            for fold in &label.folds {
                let mut members = vec![false; n];
                for &i in &fold.trained_on {
                    members[i] = true;
                }
                for &i in &fold.held_out {
                    seen[i] += 1;
                    ok &= !members[i];
                    ok &= preds[i][k].to_bits() == fold.model.predict_proba(&ds.instances()[i]).to_bits();
                    checked += 1;
                }
                ok &= fold.trained_on.len() + fold.held_out.len() == n;
            }
            ok &= seen.iter().all(|&c| c == 1);
        }
        ok &= checked == n * ds.num_labels();

        // relabelling a fold's held-out rows must not move that fold's model
        let fold = &trace[0].folds[0];
        let mut observed = ds.observed_labels().to_vec();
        for &i in &fold.held_out {
            let v = observed[i].is_positive(0);
            observed[i].set(0, !v);
        }
        let altered =
            MultiLabelDataset::new(ds.num_features(), ds.num_labels(), ds.instances().to_vec(), observed, None)
                .unwrap();
        let (alt_preds, alt_trace) =
            cross_val_predictions_traced(&altered, &cfg, ds.num_features()).unwrap();
        let same_model = alt_trace[0].folds[0].model == fold.model;
        let same_preds = fold.held_out.iter().all(|&i| alt_preds[i][0].to_bits() == preds[i][0].to_bits());
        ok &= same_model && same_preds;
        notes.push(format!("m={m}: {checked} predictions traced, perturbation invariant {}", same_model && same_preds));
    }
    outcome(ok, notes.join("; "))
}

fn missing_label_robustness() -> Outcome {
    let ds = generate_synthetic(5000, 50, 10, 0.8, 0.0, 42).unwrap();
    let grid = ExperimentGrid {
        missing_rates: vec![0.0, 0.2, 0.4, 0.6],
        folds: 5,
        ..ExperimentGrid::default()
    };
    let table = run_missing_rate_experiment(&ds, &grid).unwrap();
    let f1 = |rate: f64, method: &str| table.get(rate, method).unwrap().mean_micro_f1;
    let base_drop = f1(0.0, "logistic_c1") - f1(0.6, "logistic_c1");
    let pu_drop = f1(0.0, "pu_L0") - f1(0.6, "pu_L0");
    let (l1, l0) = (f1(0.4, "pu_L1"), f1(0.4, "pu_L0"));
    let (a, b, c) = (base_drop >= 0.10, pu_drop < base_drop, l1 >= l0);
    outcome(
        a && b && c,
        format!(
            "(a) baseline drop {base_drop:.4} [{}] (b) L=0 drop {pu_drop:.4} [{}] (c) at 0.4 L=1 {l1:.4} vs L=0 {l0:.4} [{}]",
            pass_word(a),
            pass_word(b),
            pass_word(c)
        ),
    )
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "fail"
    }
}

fn linearity() -> Outcome {
    let rows = bench_scaling(&BenchConfig::default()).unwrap();
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.time_ratio).collect();
    let ok = ratios.len() == 2 && ratios.iter().all(|t| (1.0..=3.0).contains(t));
    let shown: Vec<String> = rows
        .iter()
        .map(|r| format!("n={} {:.3}s", r.n, r.train_seconds))
        .collect();
    outcome(
        ok,
        format!(
            "{}; doubling ratios {}",
            shown.join(", "),
            ratios.iter().map(|t| format!("{t:.2}")).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn random_model(q: usize, d: usize, levels: usize, seed: u64) -> StackedModel {
    let mut r = rng(seed);
    let all = (0..levels)
        .map(|l| {
            (0..q)
                .map(|_| {
                    let weights = (0..d + l * q)
                        .map(|_| match r.random_range(0..4) {
                            0 => 0.0,
                            // magnitudes down to the smallest weight a model file keeps
                            1 => {
                                let sign = if r.random::<bool>() { 1.0 } else { -1.0 };
                                sign * r.random_range(1.0..10.0) * 10f64.powi(r.random_range(-12..4))
                            }
                            _ => r.random_range(-3.0..3.0),
                        })
                        .collect();
                    PUBinaryModel::new(weights, r.random_range(-2.0..2.0), r.random_range(0.05..=1.0)).unwrap()
                })
                .collect()
        })
        .collect();
    StackedModel::new(q, d, Augmentation::Probability, all).unwrap()
}

fn bits_equal(a: &StackedModel, b: &StackedModel) -> bool {
    a.num_labels() == b.num_labels()
        && a.base_features() == b.base_features()
        && a.augmentation() == b.augmentation()
        && a.levels().len() == b.levels().len()
        && a.levels().iter().zip(b.levels()).all(|(la, lb)| {
            la.iter().zip(lb).all(|(ma, mb)| {
                ma.bias().to_bits() == mb.bias().to_bits()
                    && ma.label_frequency_c().to_bits() == mb.label_frequency_c().to_bits()
                    && ma.weights().len() == mb.weights().len()
                    && ma.weights().iter().zip(mb.weights()).all(|(x, y)| x.to_bits() == y.to_bits())
            })
        })
}

fn round_trips(model: &StackedModel) -> bool {
    let mut text = Vec::new();
    save_model(model, &mut text).unwrap();
    let loaded = load_model(text.as_slice()).unwrap();
    let mut again = Vec::new();
    save_model(&loaded, &mut again).unwrap();
    bits_equal(model, &loaded) && text == again
}

fn persistence() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for &levels in &[0usize, 1] {
        for &q in &[1usize, 17, 101] {
            let same = round_trips(&random_model(q, 30, levels + 1, 7 + q as u64));
            ok &= same;
            if !same {
                notes.push(format!("random q={q} L={levels} differs"));
            }
        }
        let ds = generate_synthetic(300, 20, 101, 0.8, 0.5, 8).unwrap();
        let cfg = StackConfig {
            num_stack_levels: levels,
            cv_folds: 2,
            sgd: SGDConfig {
                epochs: 2,
                ..SGDConfig::default()
            },
            ..StackConfig::default()
        };
        let trained = train_stacked(&ds, &cfg).unwrap();
        let same = round_trips(&trained);
        ok &= same;
        notes.push(format!("trained q=101 L={levels} bitwise: {same}"));
    }
    outcome(ok, format!("random models q in {{1, 17, 101}}; {}", notes.join(", ")))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let ds = generate_synthetic(400, 20, 5, 0.8, 0.5, 12).unwrap();
    let masked = mask_labels(&ds, &MaskSpec::new(0.3, 12).unwrap()).unwrap().dataset;
    let data = dir.path().join("train.txt");
    write_dataset(&masked, std::fs::File::create(&data).unwrap()).unwrap();

    let train = |threads: &str| -> Vec<u8> {
        let out = dir.path().join(format!("model-{threads}.txt"));
        let status = Command::new(env!("CARGO_BIN_EXE_smile"))
            .args(["--threads", threads, "--quiet", "--seed", "5", "train", "--labels", "5", "--levels", "1"])
            .arg("--input")
            .arg(&data)
            .arg("--model-out")
            .arg(&out)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        std::fs::read(out).unwrap()
    };
    let one = train("1");
    let auto = train("auto");
    let four = train("4");
    let again = train("1");
    let ok = one == auto && one == four && one == again;
    outcome(
        ok,
        format!(
            "{} byte model; --threads 1 == auto: {}, == 4: {}, rerun identical: {}",
            one.len(),
            one == auto,
            one == four,
            one == again
        ),
    )
}
