use modechoice::dataset::{
    encode_dataset, generate_synthetic, BinningScheme, EncodedDataset, SchemaRegistry, SyntheticSpec,
};
use modechoice::learner::{fit, Family, FittedModel, LearnerSpec};
use proptest::prelude::*;

fn sample(n: usize, seed: u64) -> EncodedDataset {
    let spec = SyntheticSpec {
        n_records: n,
        seed,
        target_mode_shares: [0.2; 5],
        ..SyntheticSpec::default()
    };
    encode_dataset(
        &generate_synthetic(&spec, &SchemaRegistry::default()).unwrap(),
        &BinningScheme::default(),
    )
    .unwrap()
}

fn reweighted(data: &EncodedDataset, weights: Vec<f64>) -> EncodedDataset {
    EncodedDataset::new(
        data.features().to_owned(),
        data.labels().to_vec(),
        weights,
        data.feature_names().to_vec(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn scaling_weights_keeps_tree_and_bayes_predictions(seed in 0u64..1000, scale in 0.01f64..100.0) {
        let data = sample(200, seed);
        let scaled = reweighted(&data, data.weights().iter().map(|w| w * scale).collect());
        for family in [Family::Nb, Family::Knn, Family::Cart, Family::Rf, Family::Bag] {
            let spec = LearnerSpec::new(family, seed);
            let a = fit(&spec, &data).unwrap().predict(data.features()).unwrap();
            let b = fit(&spec, &scaled).unwrap().predict(data.features()).unwrap();
            prop_assert_eq!(a, b, "{}", family);
        }
    }

    #[test]
    fn row_order_does_not_change_deterministic_learners(seed in 0u64..1000) {
        let data = sample(150, seed);
        let reversed: Vec<usize> = (0..data.n_samples()).rev().collect();
        let flipped = data.subset(&reversed).unwrap();
        for family in [Family::Nb, Family::Knn, Family::Cart] {
            let spec = LearnerSpec::new(family, 0);
            let a = fit(&spec, &data).unwrap().predict(data.features()).unwrap();
            let b = fit(&spec, &flipped).unwrap().predict(data.features()).unwrap();
            prop_assert_eq!(a, b, "{}", family);
        }
    }

    #[test]
    fn probabilities_are_distributions(seed in 0u64..1000) {
        let data = sample(120, seed);
        for family in Family::ALL {
            let model = fit(&LearnerSpec::new(family, seed), &data).unwrap();
            let proba = model.predict_proba(data.features()).unwrap();
            for row in proba.rows() {
                prop_assert!(row.iter().all(|&p| (0.0..=1.0).contains(&p)), "{}", family);
                prop_assert!((row.sum() - 1.0).abs() < 1e-9, "{}", family);
            }
        }
    }
}

#[test]
fn every_family_round_trips_through_json() {
    let data = sample(150, 3);
    for family in Family::ALL {
        let model = fit(&LearnerSpec::new(family, 1), &data).unwrap();
        let restored = FittedModel::from_json(&model.to_json().unwrap()).unwrap();
        assert_eq!(
            restored.predict_proba(data.features()).unwrap(),
            model.predict_proba(data.features()).unwrap(),
            "{family}"
        );
    }
}

#[test]
fn same_seed_same_model() {
    let data = sample(150, 4);
    for family in Family::ALL {
        let spec = LearnerSpec::new(family, 9);
        let a = fit(&spec, &data).unwrap().to_json().unwrap();
        let b = fit(&spec, &data).unwrap().to_json().unwrap();
        assert_eq!(a, b, "{family}");
    }
}
