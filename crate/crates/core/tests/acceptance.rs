//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its runtime (visible under `--nocapture`).

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lesionscan::classifiers::{
    ann_risk_level, cascade_assess_with, mlp_gradients, mlp_loss, scale_value, svm_assess,
    svm_objective, svm_rfe, svm_risk_level, train_mlp, train_svm, ClassLabel, LinearSvmModel,
    MlpHyper, MlpModel, RiskAssessment, RiskLevel, SecondStage, SvmHyper,
};
use lesionscan::features::{assemble_features, glcm, glcm_stats, FeatureConfig, FeatureVector};
use lesionscan::pipeline::{
    evaluate, generate_fixtures, ingest_manifest, report_write, train, FixtureSpec,
    PipelineConfig, ReportFormat, TrainedModels,
};
use lesionscan::raster::{BinaryMask, Connectivity, RasterImage, ScalarField};
use lesionscan::segmentation::{
    flood_from_markers, merge_masks, snake_segment_with_trace, watershed_segment, EnergyWeights,
    SnakeContour, WatershedConfig,
};
use lesionscan::similarity::{dice, jaccard, ssim, ssim_masks, SimilarityConfig};

fn pass(name: &str, started: Instant) {
    println!(
        "criterion {name}: PASS ({:.2}s)",
        started.elapsed().as_secs_f64()
    );
}

fn random_mask(rng: &mut ChaCha8Rng, w: usize, h: usize) -> BinaryMask {
    BinaryMask::from_fn(w, h, |_, _| rng.gen_bool(0.5)).unwrap()
}

// --------------------------------------------------------------------
// 1. similarity identities and the Dice-Jaccard relation
// --------------------------------------------------------------------
#[test]
fn criterion_01_similarity_identities() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let cfg = SimilarityConfig::default();

    for _ in 0..50 {
        let mask = random_mask(&mut rng, 24, 18);
        assert_eq!(ssim_masks(&mask, &mask, &cfg).unwrap(), 100.0);
        assert_eq!(jaccard(&mask, &mask).unwrap(), 100.0);
        assert_eq!(dice(&mask, &mask).unwrap(), 100.0);

        let img = RasterImage::from_fn(24, 18, 1, |_, _, _| rng.gen()).unwrap();
        assert_eq!(ssim(&img, &img, &cfg).unwrap(), 100.0);
    }

    for _ in 0..200 {
        let a = random_mask(&mut rng, 16, 16);
        let b = random_mask(&mut rng, 16, 16);
        let j = jaccard(&a, &b).unwrap() / 100.0;
        let d = dice(&a, &b).unwrap() / 100.0;
        assert!((d - 2.0 * j / (1.0 + j)).abs() < 1e-12, "d={d} j={j}");
    }

    assert!(started.elapsed().as_secs_f64() < 5.0, "over the 5s budget");
    pass("01 similarity identities", started);
}

// --------------------------------------------------------------------
// 2. watershed flooding equals a brute-force priority flood
// --------------------------------------------------------------------

/// Reference flood: identical rules, but the minimum (level, seq) entry
/// is located by exhaustive scan over a plain list instead of a heap.
fn flood_oracle(levels: &ScalarField, markers: &[u8], connectivity: Connectivity) -> Vec<u8> {
    let (w, h) = (levels.width(), levels.height());
    let mut labels = markers.to_vec();
    let mut queue: Vec<(u64, u64, usize)> = Vec::new();
    let mut seq = 0u64;
    for (idx, &m) in markers.iter().enumerate() {
        if m != 0 {
            queue.push((levels.data()[idx].to_bits(), seq, idx));
            seq += 1;
        }
    }
    while !queue.is_empty() {
        let mut best = 0;
        for i in 1..queue.len() {
            if (queue[i].0, queue[i].1) < (queue[best].0, queue[best].1) {
                best = i;
            }
        }
        let (level, _, idx) = queue.remove(best);
        let (x, y) = ((idx % w) as i64, (idx / w) as i64);
        for &(dx, dy) in connectivity.offsets() {
            let (nx, ny) = (x + dx, y + dy);
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                continue;
            }
            let nidx = ny as usize * w + nx as usize;
            if labels[nidx] != 0 {
                continue;
            }
            labels[nidx] = labels[idx];
            queue.push((levels.data()[nidx].to_bits().max(level), seq, nidx));
            seq += 1;
        }
    }
    labels
}

#[test]
fn criterion_02_watershed_flooding_matches_oracle() {
    let started = Instant::now();
    let mut corner_markers4 = vec![0u8; 16];
    corner_markers4[0] = 1;
    corner_markers4[15] = 2;

    // exhaustive: every 4x4 two-level grid
    for code in 0..(1u32 << 16) {
        let vals: Vec<f64> = (0..16).map(|i| f64::from((code >> i) & 1)).collect();
        let levels = ScalarField::new(4, 4, vals);
        for conn in [Connectivity::Four, Connectivity::Eight] {
            let got = flood_from_markers(&levels, &corner_markers4, conn);
            let want = flood_oracle(&levels, &corner_markers4, conn);
            assert_eq!(got, want, "grid code {code}");
        }
    }

    // sampled: four-level 4x4 grids
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..1000 {
        let vals: Vec<f64> = (0..16).map(|_| f64::from(rng.gen_range(0..4u8))).collect();
        let levels = ScalarField::new(4, 4, vals);
        let got = flood_from_markers(&levels, &corner_markers4, Connectivity::Four);
        let want = flood_oracle(&levels, &corner_markers4, Connectivity::Four);
        assert_eq!(got, want);
    }

    // sampled: four-level 8x8 grids with the fixed corner markers
    let mut corner_markers8 = vec![0u8; 64];
    corner_markers8[0] = 1;
    corner_markers8[63] = 2;
    for _ in 0..1000 {
        let vals: Vec<f64> = (0..64).map(|_| f64::from(rng.gen_range(0..4u8))).collect();
        let levels = ScalarField::new(8, 8, vals);
        for conn in [Connectivity::Four, Connectivity::Eight] {
            let got = flood_from_markers(&levels, &corner_markers8, conn);
            let want = flood_oracle(&levels, &corner_markers8, conn);
            assert_eq!(got, want);
            assert!(got.iter().all(|&l| l != 0), "every pixel labeled once");
        }
    }

    assert!(started.elapsed().as_secs_f64() < 60.0, "over the 60s budget");
    pass("02 watershed flooding oracle", started);
}

// --------------------------------------------------------------------
// 3. snake energy descent and synthetic disk recovery
// --------------------------------------------------------------------
fn disk_image(size: usize, cx: f64, cy: f64, r: f64, inside: u8, outside: u8) -> RasterImage {
    RasterImage::from_fn(size, size, 1, |x, y, _| {
        let dx = x as f64 - cx;
        let dy = y as f64 - cy;
        if dx * dx + dy * dy <= r * r {
            inside
        } else {
            outside
        }
    })
    .unwrap()
}

#[test]
fn criterion_03_snake_descent_and_disk_recovery() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);

    for trial in 0..20 {
        // a dark blob with a strong edge plus mild pixel noise
        let cx = 32.0 + rng.gen_range(-4.0..4.0);
        let cy = 32.0 + rng.gen_range(-4.0..4.0);
        let r = rng.gen_range(10.0..14.0);
        let dark = rng.gen_range(20..70u8);
        let light = rng.gen_range(170..230u8);
        let img = RasterImage::from_fn(64, 64, 1, |x, y, _| {
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            let base = if dx * dx + dy * dy <= r * r { dark } else { light };
            (i16::from(base) + rng.gen_range(-5..=5)).clamp(0, 255) as u8
        })
        .unwrap();
        let init_r = rng.gen_range(16.0..22.0);
        let init = SnakeContour::circle(cx, cy, init_r, 32).unwrap();
        let run = snake_segment_with_trace(&img, &init, &EnergyWeights::default(), 30, 0.02)
            .unwrap_or_else(|e| panic!("trial {trial}: {e}"));
        for (i, sweep) in run.sweeps.iter().enumerate() {
            assert!(
                sweep.energy_end <= sweep.energy_start,
                "trial {trial} sweep {i}: {} > {}",
                sweep.energy_end,
                sweep.energy_start
            );
        }
    }

    // disk recovery with the spec's geometry: radius-20 disk, radius-28 init
    let img = disk_image(96, 47.5, 47.5, 20.0, 45, 205);
    let init = SnakeContour::circle(47.5, 47.5, 28.0, 44).unwrap();
    let snake_run =
        snake_segment_with_trace(&img, &init, &EnergyWeights::default(), 150, 0.02).unwrap();
    let cfg = WatershedConfig::default();
    let ws = watershed_segment(&img, &cfg).unwrap();
    let merged = merge_masks(&ws, &snake_run.mask).unwrap();
    let truth = BinaryMask::from_fn(96, 96, |x, y| {
        let dx = x as f64 - 47.5;
        let dy = y as f64 - 47.5;
        dx * dx + dy * dy <= 400.0
    })
    .unwrap();
    let d = dice(&merged, &truth).unwrap();
    assert!(d >= 95.0, "merged-mask dice {d}% against the analytic disk");
    // the snake alone must also land on the disk
    let d_snake = dice(&snake_run.mask, &truth).unwrap();
    assert!(d_snake >= 95.0, "snake-only dice {d_snake}%");

    assert!(started.elapsed().as_secs_f64() < 120.0, "over the 2min budget");
    pass("03 snake energy descent + disk recovery", started);
}

// --------------------------------------------------------------------
// 4. GLCM equals exhaustive pair enumeration
// --------------------------------------------------------------------
#[test]
fn criterion_04_glcm_bruteforce_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let levels = 8usize;
    let mut checked = 0usize;

    for _ in 0..500 {
        let w = rng.gen_range(2..=6);
        let h = rng.gen_range(2..=6);
        let img = RasterImage::from_fn(w, h, 1, |_, _, _| rng.gen()).unwrap();
        let mask = BinaryMask::from_fn(w, h, |_, _| rng.gen_bool(0.85)).unwrap();
        for offset in [(1, 0), (1, 1), (0, 1), (-1, 1)] {
            // exhaustive enumeration over all ordered pixel pairs
            let mut counts = vec![0u64; levels * levels];
            let mut pairs = 0u64;
            for y in 0..h as i64 {
                for x in 0..w as i64 {
                    let (nx, ny) = (x + i64::from(offset.0), y + i64::from(offset.1));
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    if !mask.get(x as usize, y as usize) || !mask.get(nx as usize, ny as usize) {
                        continue;
                    }
                    let a = img.gray(x as usize, y as usize) as usize * levels / 256;
                    let b = img.gray(nx as usize, ny as usize) as usize * levels / 256;
                    counts[a * levels + b] += 1;
                    counts[b * levels + a] += 1;
                    pairs += 1;
                }
            }
            match glcm(&img, &mask, offset, levels) {
                Ok(matrix) => {
                    assert!(pairs >= 2);
                    let want: Vec<f64> = counts
                        .iter()
                        .map(|&c| c as f64 / (2 * pairs) as f64)
                        .collect();
                    assert_eq!(matrix.entries(), want.as_slice());
                    checked += 1;
                }
                Err(_) => assert!(pairs < 2, "rejected a grid with {pairs} pairs"),
            }
        }
    }
    assert!(checked > 1000, "only {checked} grids exercised the matrix path");

    // constant-region statistics
    let img = RasterImage::filled(6, 6, 1, 200).unwrap();
    let mask = BinaryMask::from_fn(6, 6, |_, _| true).unwrap();
    let stats = glcm_stats(&glcm(&img, &mask, (1, 0), 16).unwrap());
    assert!(stats.contrast.abs() < 1e-12);
    assert!((stats.energy - 1.0).abs() < 1e-12);
    assert!(stats.entropy.abs() < 1e-12);

    pass("04 GLCM brute-force equivalence", started);
}

// --------------------------------------------------------------------
// 5. feature vector contract
// --------------------------------------------------------------------
#[test]
fn criterion_05_feature_contract() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let records = generate_fixtures(
        dir.path(),
        &FixtureSpec {
            per_class: 3,
            seed: 505,
            size: 128,
        },
    )
    .unwrap();
    let cfg = FeatureConfig::default();
    let names = lesionscan::features::canonical_names();
    assert_eq!(names.len(), 73);
    // 3 shape + 44 GLCM + 2 coarseness + 24 color
    assert_eq!(names.iter().filter(|n| n.starts_with("glcm_")).count(), 44);
    assert_eq!(
        names.iter().filter(|n| n.starts_with("coarseness_")).count(),
        2
    );

    for record in &records {
        let img = lesionscan::raster::io::read_image(&record.image_path).unwrap();
        let mask =
            lesionscan::raster::io::read_mask(record.truth_mask_path.as_ref().unwrap()).unwrap();
        let (a, _) = assemble_features(&img, &mask, &cfg).unwrap();
        assert_eq!(a.values().len(), 73, "{}", record.id);
        assert!(a.values().iter().all(|v| v.is_finite()), "{}", record.id);
        let (b, _) = assemble_features(&img, &mask, &cfg).unwrap();
        assert!(
            a.values()
                .iter()
                .zip(b.values())
                .all(|(x, y)| x.to_bits() == y.to_bits()),
            "feature extraction must be bit-identical for {}",
            record.id
        );
    }
    pass("05 feature contract", started);
}

// --------------------------------------------------------------------
// 6. min/max scaling properties
// --------------------------------------------------------------------
#[test]
fn criterion_06_scaling_properties() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for _ in 0..10_000 {
        let lo = rng.gen_range(-1e3..1e3);
        let hi = lo + rng.gen_range(0.0..1e3);
        if hi == lo {
            assert_eq!(scale_value(rng.gen_range(-1e3..1e3), lo, hi), 0.0);
            continue;
        }
        assert_eq!(scale_value(lo, lo, hi), -1.0);
        assert_eq!(scale_value(hi, lo, hi), 1.0);
        let mid = scale_value(lo + (hi - lo) / 2.0, lo, hi);
        assert!(mid.abs() < 1e-9, "midpoint {mid}");
        let below = scale_value(lo - rng.gen_range(0.0..1e3) - 1e-9, lo, hi);
        let above = scale_value(hi + rng.gen_range(0.0..1e3) + 1e-9, lo, hi);
        assert_eq!(below, -1.0);
        assert_eq!(above, 1.0);
        let f = rng.gen_range(lo..hi);
        let v = scale_value(f, lo, hi);
        assert!((-1.0..=1.0).contains(&v));
    }
    pass("06 scaling properties", started);
}

// --------------------------------------------------------------------
// 7. risk rule fidelity
// --------------------------------------------------------------------
#[test]
fn criterion_07_risk_rule_fidelity() {
    let started = Instant::now();
    for i in 0..=10_000 {
        let p = i as f64 * 1e-4;
        let expected = if p >= 0.40 {
            RiskLevel::High
        } else if p >= 0.30 {
            RiskLevel::Medium
        } else {
            RiskLevel::Low
        };
        assert_eq!(svm_risk_level(p), expected, "p = {p}");
    }
    assert_eq!(svm_risk_level(0.3), RiskLevel::Medium);
    assert_eq!(svm_risk_level(0.4), RiskLevel::High);
    assert_eq!(ann_risk_level(0.5), RiskLevel::High);
    assert_eq!(ann_risk_level(0.5 - 1e-12), RiskLevel::Low);
    pass("07 risk rule fidelity", started);
}

// --------------------------------------------------------------------
// 8. SVM objective vs exhaustive grid search + RFE noise rejection
// --------------------------------------------------------------------
fn separable_set(seed: u64) -> (Vec<Vec<f64>>, Vec<ClassLabel>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = if seed.is_multiple_of(2) { 2 } else { 3 };
    let n = rng.gen_range(8..=12);
    let mut dir: Vec<f64> = (0..dims).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-6);
    dir.iter_mut().for_each(|v| *v /= norm);
    let mut samples = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let side = if i % 2 == 0 { 1.0 } else { -1.0 };
        let along = side * rng.gen_range(0.7..1.5);
        let sample: Vec<f64> = (0..dims)
            .map(|d| along * dir[d] + rng.gen_range(-0.15..0.15))
            .collect();
        samples.push(sample);
        labels.push(if side > 0.0 {
            ClassLabel::Melanoma
        } else {
            ClassLabel::NonMelanoma
        });
    }
    (samples, labels)
}

/// Exhaustive grid minimization with three refinement stages.
fn grid_search_min(samples: &[Vec<f64>], labels: &[ClassLabel], c: f64) -> f64 {
    let dims = samples[0].len();
    let mut center = vec![0.0f64; dims + 1]; // weights then bias
    let mut half_width = 4.0f64;
    let mut step = 0.5f64;
    let mut best_obj = f64::INFINITY;
    for _stage in 0..4 {
        let counts = (2.0 * half_width / step).round() as i64 + 1;
        let mut idx = vec![0i64; dims + 1];
        let mut best_point = center.clone();
        loop {
            let point: Vec<f64> = (0..dims + 1)
                .map(|d| center[d] - half_width + idx[d] as f64 * step)
                .collect();
            let obj = svm_objective(samples, labels, &point[..dims], point[dims], c);
            if obj < best_obj {
                best_obj = obj;
                best_point = point;
            }
            // odometer increment
            let mut d = 0;
            loop {
                idx[d] += 1;
                if idx[d] < counts {
                    break;
                }
                idx[d] = 0;
                d += 1;
                if d == dims + 1 {
                    break;
                }
            }
            if d == dims + 1 {
                break;
            }
        }
        center = best_point;
        half_width = step * 2.0;
        step /= 5.0;
    }
    best_obj
}

#[test]
fn criterion_08_svm_grid_oracle_and_rfe() {
    let started = Instant::now();
    let hyper = SvmHyper {
        epochs: 60_000,
        ..SvmHyper::default()
    };
    for seed in 0..10 {
        let (samples, labels) = separable_set(800 + seed);
        let fit = train_svm(&samples, &labels, &hyper).unwrap();
        // 100% training accuracy on a separable set
        for (x, l) in samples.iter().zip(&labels) {
            let raw: f64 =
                fit.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + fit.bias;
            assert_eq!(raw > 0.0, l.sign() > 0.0, "seed {seed} misclassified {x:?}");
        }
        let trained_obj =
            svm_objective(&samples, &labels, &fit.weights, fit.bias, hyper.c);
        let grid_obj = grid_search_min(&samples, &labels, hyper.c);
        assert!(
            trained_obj <= grid_obj * 1.01 + 1e-9,
            "seed {seed}: trained {trained_obj} vs grid {grid_obj}"
        );
    }

    // RFE: the planted pure-noise feature goes first in >= 9/10 trials
    let mut hits = 0;
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(900 + seed);
        let mut samples = Vec::new();
        let mut labels = Vec::new();
        for i in 0..20 {
            let y = if i % 2 == 0 { 1.0 } else { -1.0 };
            samples.push(vec![
                y + rng.gen_range(-0.2..0.2),
                rng.gen_range(-1.0..1.0),
                0.7 * y + rng.gen_range(-0.2..0.2),
            ]);
            labels.push(if y > 0.0 {
                ClassLabel::Melanoma
            } else {
                ClassLabel::NonMelanoma
            });
        }
        let names = vec!["signal".to_string(), "noise".to_string(), "weak".to_string()];
        let rfe = svm_rfe(&samples, &labels, &names, &SvmHyper::default(), 2).unwrap();
        if rfe.eliminated.first().map(String::as_str) == Some("noise") {
            hits += 1;
        }
    }
    assert!(hits >= 9, "noise eliminated first in only {hits}/10 trials");

    pass("08 SVM grid oracle + RFE", started);
}

// --------------------------------------------------------------------
// 9. MLP gradient check and XOR convergence
// --------------------------------------------------------------------
#[test]
fn criterion_09_mlp_gradient_check_and_xor() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let h = 1e-5;
    for pair in 0..20 {
        let model = MlpModel::seeded(rng.gen(), MlpHyper::default());
        let xs: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let ys: Vec<f64> = (0..4).map(|_| f64::from(rng.gen_range(0..2u8))).collect();
        let grads = mlp_gradients(&model, &xs, &ys);

        let mut worst = 0.0f64;
        let mut check = |apply: &dyn Fn(&mut MlpModel, f64), analytic: f64| {
            let mut plus = model.clone();
            apply(&mut plus, h);
            let mut minus = model.clone();
            apply(&mut minus, -h);
            let numeric = (mlp_loss(&plus, &xs, &ys) - mlp_loss(&minus, &xs, &ys)) / (2.0 * h);
            let rel =
                (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8);
            worst = worst.max(rel);
        };
        for i in 0..80 {
            check(&move |m: &mut MlpModel, d: f64| m.w1[i] += d, grads.w1[i]);
        }
        for j in 0..10 {
            check(&move |m: &mut MlpModel, d: f64| m.b1[j] += d, grads.b1[j]);
            check(&move |m: &mut MlpModel, d: f64| m.w2[j] += d, grads.w2[j]);
        }
        check(&|m: &mut MlpModel, d: f64| m.b2 += d, grads.b2);
        assert!(worst < 1e-4, "pair {pair}: max relative error {worst}");
    }

    // XOR on inputs 0 and 1, the rest zero
    let xor_samples: Vec<Vec<f64>> = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]
        .iter()
        .map(|&(a, b)| {
            let mut v = vec![0.0; 8];
            v[0] = a;
            v[1] = b;
            v
        })
        .collect();
    let xor_labels = vec![0.0, 1.0, 1.0, 0.0];
    let converged = [42u64, 43, 44, 45, 46].iter().any(|&seed| {
        let model = train_mlp(
            &xor_samples,
            &xor_labels,
            &MlpHyper {
                learning_rate: 0.5,
                epochs: 20_000,
                seed,
            },
        )
        .unwrap();
        xor_samples.iter().zip(&xor_labels).all(|(x, &y)| {
            let scaled = model.scale_inputs(x).unwrap();
            let o = lesionscan::classifiers::mlp_forward(&model, &scaled).unwrap();
            (o >= 0.5) == (y == 1.0)
        })
    });
    assert!(converged, "XOR failed to converge for all five seeds");

    pass("09 MLP gradient check + XOR", started);
}

// --------------------------------------------------------------------
// 10. end-to-end synthetic corpus with byte-identical reruns
// --------------------------------------------------------------------
fn run_train_eval(data_dir: &std::path::Path, out_root: &std::path::Path) -> (f64, f64) {
    let records = ingest_manifest(&data_dir.join("manifest.csv")).unwrap();
    let mut cfg = PipelineConfig::default();
    cfg.set_seed(1234);
    let models_dir = out_root.join("models");
    let (_, summary) = train(&records, &cfg, &models_dir).unwrap();
    assert!(summary.training_accuracy >= 0.95);

    let models = TrainedModels::load(&models_dir).unwrap();
    let eval_dir = out_root.join("eval");
    let report = evaluate(&records, &cfg, &models, Some(&eval_dir)).unwrap();
    report_write(&report, &eval_dir, ReportFormat::Csv, cfg.report.precision).unwrap();
    report_write(&report, &eval_dir, ReportFormat::Json, cfg.report.precision).unwrap();
    (report.accuracy, report.auc)
}

fn collect_files(root: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn criterion_10_end_to_end_synthetic_corpus() {
    let started = Instant::now();
    let data = tempfile::tempdir().unwrap();
    generate_fixtures(data.path(), &FixtureSpec::default()).unwrap();

    let run_a = tempfile::tempdir().unwrap();
    let (accuracy, auc) = run_train_eval(data.path(), run_a.path());
    assert!(accuracy >= 0.95, "accuracy {accuracy}");
    assert!(auc >= 0.95, "auc {auc}");

    let run_b = tempfile::tempdir().unwrap();
    let _ = run_train_eval(data.path(), run_b.path());
    let files_a = collect_files(run_a.path());
    let files_b = collect_files(run_b.path());
    assert_eq!(files_a.len(), files_b.len());
    for ((name_a, bytes_a), (name_b, bytes_b)) in files_a.iter().zip(&files_b) {
        assert_eq!(name_a, name_b);
        assert_eq!(bytes_a, bytes_b, "rerun changed {name_a}");
    }

    assert!(
        started.elapsed().as_secs_f64() < 300.0,
        "over the 5min budget"
    );
    pass("10 end-to-end synthetic corpus", started);
}

// --------------------------------------------------------------------
// 11. cascade contract with an instrumented second stage
// --------------------------------------------------------------------
struct CountingStage<'a> {
    inner: &'a MlpModel,
    calls: std::cell::Cell<usize>,
}

impl SecondStage for CountingStage<'_> {
    fn assess(&self, raw: &[f64]) -> lesionscan::Result<RiskAssessment> {
        self.calls.set(self.calls.get() + 1);
        self.inner.assess(raw)
    }
}

#[test]
fn criterion_11_cascade_contract() {
    let started = Instant::now();
    let svm = LinearSvmModel {
        selected: vec!["asymmetry".into()],
        weights: vec![1.0],
        bias: 0.0,
        feature_min: vec![0.0],
        feature_max: vec![1.0],
        decision_lo: -1.0,
        decision_hi: 1.0,
        hyper: SvmHyper::default(),
    };
    let mlp = MlpModel::seeded(11, MlpHyper::default());
    let counting = CountingStage {
        inner: &mlp,
        calls: std::cell::Cell::new(0),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let mut mediums = 0usize;
    for _ in 0..1000 {
        let f = FeatureVector::new((0..73).map(|_| rng.gen_range(0.0..1.0)).collect()).unwrap();
        let first = svm_assess(&svm, &f).unwrap();
        if first.level == RiskLevel::Medium {
            mediums += 1;
        }
        let outcome = cascade_assess_with(&svm, &counting, &f).unwrap();
        assert_ne!(outcome.level, RiskLevel::Medium, "cascade returned Medium");
        match first.level {
            RiskLevel::Medium => assert_eq!(
                outcome.stage,
                lesionscan::classifiers::Stage::Cascade
            ),
            _ => {
                assert_eq!(outcome.stage, lesionscan::classifiers::Stage::Svm);
                assert_eq!(outcome.level, first.level);
            }
        }
    }
    assert_eq!(
        counting.calls.get(),
        mediums,
        "second stage invoked off the Medium path"
    );
    assert!(mediums > 20, "sweep produced too few Medium cases to be meaningful");
    pass("11 cascade contract", started);
}
