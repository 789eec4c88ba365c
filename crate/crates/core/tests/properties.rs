use proptest::prelude::*;

use scene_core::dataset::{
    compute_normalization, ClassIndexMap, ManifestEntry, MemorySource, NoAugment,
};
use scene_core::dsp::SpectrogramPipeline;
use scene_core::eval::ConfusionMatrix;
use scene_core::model::{
    softmax, EvalSet, Network, NetworkSpec, TrainConfig, Trainer, TrainingSet,
};
use scene_core::rng::AugmentRng;
use scene_core::synthetic::SyntheticCorpus;

fn tiny_spec(n_classes: usize) -> NetworkSpec {
    NetworkSpec {
        input_height: 8,
        input_width: 8,
        conv_channels: vec![2],
        fc1_units: 5,
        fc2_units: 4,
        n_classes,
    }
}

proptest! {
    #[test]
    fn softmax_ignores_constant_shift(
        logits in prop::collection::vec(-50.0f64..50.0, 2..12),
        shift in -100.0f64..100.0,
    ) {
        let a = softmax(&logits);
        let shifted: Vec<f64> = logits.iter().map(|v| v + shift).collect();
        let b = softmax(&shifted);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        prop_assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn confusion_rows_sum_to_support(
        pairs in prop::collection::vec((0usize..5, 0usize..5), 0..300),
    ) {
        let classes = ClassIndexMap::from_names(["a", "b", "c", "d", "e"]);
        let mut m = ConfusionMatrix::new(classes);
        for &(t, p) in &pairs {
            m.record(t, p).unwrap();
        }
        for c in 0..5 {
            let support = pairs.iter().filter(|(t, _)| *t == c).count() as u64;
            prop_assert_eq!(m.row_sum(c), support);
        }
        prop_assert_eq!(m.total(), pairs.len() as u64);
        let hits = pairs.iter().filter(|(t, p)| t == p).count() as u64;
        prop_assert_eq!(m.trace(), hits);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gradients_match_finite_differences(seed in any::<u64>(), n_classes in 2usize..5) {
        let spec = tiny_spec(n_classes);
        let mut net = Network::init(&spec, seed).unwrap();
        let mut rng = AugmentRng::new(seed ^ 0x5EED);
        for t in net.params_mut() {
            if t.shape().len() == 1 {
                t.data_mut().iter_mut().for_each(|b| *b = rng.uniform(-0.1, 0.1));
            }
        }
        let batch = 2;
        let images: Vec<f64> = (0..batch * 64).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let labels: Vec<usize> = (0..batch).map(|_| rng.below(n_classes as u64) as usize).collect();
        let (_, grads) = net.loss_and_gradients(&images, &labels).unwrap();
        let eps = 1e-4;
        for (ti, grad) in grads.iter().enumerate() {
            for k in 0..grad.len() {
                let orig = net.params()[ti].data()[k];
                net.params_mut()[ti].data_mut()[k] = orig + eps;
                let plus = net.loss(&images, &labels).unwrap();
                net.params_mut()[ti].data_mut()[k] = orig - eps;
                let minus = net.loss(&images, &labels).unwrap();
                net.params_mut()[ti].data_mut()[k] = orig;
                let numeric = (plus - minus) / (2.0 * eps);
                let analytic = grad.data()[k];
                let rel = (numeric - analytic).abs() / analytic.abs().max(numeric.abs()).max(1e-8);
                prop_assert!(rel < 1e-4, "tensor {} index {}: {} vs {}", ti, k, analytic, numeric);
            }
        }
    }
}

#[test]
fn init_spread_matches_fan_in() {
    // fc1 sees 4x4x4 = 64 features and has 160 units: 10240 weights.
    let spec = NetworkSpec {
        input_height: 8,
        input_width: 8,
        conv_channels: vec![4],
        fc1_units: 160,
        fc2_units: 8,
        n_classes: 3,
    };
    let net = Network::init(&spec, 42).unwrap();
    let fc1 = &net.params()[2];
    assert_eq!(fc1.shape(), &[160, 64]);
    let w = fc1.data();
    let n = w.len() as f64;
    let mean = w.iter().sum::<f64>() / n;
    let std = (w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let target = (2.0f64 / 64.0).sqrt();
    assert!(
        (std / target - 1.0).abs() < 0.2,
        "std {std} target {target}"
    );
    assert!(net.params()[3].data().iter().all(|&b| b == 0.0));
}

#[test]
fn training_loss_falls_over_first_epochs() {
    let corpus = SyntheticCorpus::default();
    let pipe = SpectrogramPipeline::new(corpus.dsp_config()).unwrap();
    let entries: Vec<ManifestEntry> = corpus.entries();
    let classes = ClassIndexMap::from_names(entries.iter().map(|e| e.label.clone()));
    let mut source = MemorySource::new();
    let mut images = Vec::new();
    for (k, e) in entries.iter().enumerate() {
        let clip = corpus.clip(k / corpus.clips_per_class, k % corpus.clips_per_class);
        let img = pipe.render(&clip).unwrap();
        images.push(img.clone());
        source.insert(e.path.clone(), img);
    }
    let stats = compute_normalization(&images).unwrap();
    let (train, val): (Vec<_>, Vec<_>) = entries
        .iter()
        .cloned()
        .enumerate()
        .partition(|(k, _)| k % 4 != 0);
    let train: Vec<ManifestEntry> = train.into_iter().map(|(_, e)| e).collect();
    let val: Vec<ManifestEntry> = val.into_iter().map(|(_, e)| e).collect();

    let spec = NetworkSpec::with_defaults(images[0].n_bins(), images[0].n_frames(), 4);
    let cfg = TrainConfig {
        max_epochs: 5,
        patience: 5,
        seed: 3,
        batch_size: 8,
        ..TrainConfig::default()
    };
    let mut hook = NoAugment;
    let mut data = TrainingSet {
        entries: &train,
        classes: &classes,
        batch_size: cfg.batch_size,
        stats,
        source: &source,
        hook: &mut hook,
    };
    let mut validator = EvalSet {
        entries: &val,
        classes: &classes,
        batch_size: 16,
        stats,
        source: &source,
    };
    let mut losses = Vec::new();
    Trainer::new(spec, cfg, classes.clone(), stats)
        .on_epoch(|r| losses.push(r.train_loss))
        .run(&mut data, &mut validator)
        .unwrap();
    assert_eq!(losses.len(), 5);
    assert!(losses.windows(2).all(|w| w[1] < w[0]), "{losses:?}");
}
