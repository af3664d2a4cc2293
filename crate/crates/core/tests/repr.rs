use landmap::doe::SamplingConfig;
use landmap::mabbob::{ProblemKey, SuiteConfig};
use landmap::manifest::SuiteManifest;
use landmap::matrix::Matrix;
use landmap::repr::{align, apply_record, ingest_csv, preprocess, ImputePolicy, RepresentationMatrix};
use landmap::Error;
use proptest::prelude::*;

fn manifest() -> SuiteManifest {
    let suite = SuiteConfig {
        classes: vec![1, 2, 3],
        instances: vec![1, 2],
        alphas: vec![0.25, 0.75],
        dim: 2,
    };
    SuiteManifest::build(&suite, &SamplingConfig::default(), 42).unwrap()
}

fn matrix(values: Vec<f64>, d: usize) -> RepresentationMatrix {
    let m = manifest();
    let cols = (0..d).map(|c| format!("f{c}")).collect();
    RepresentationMatrix::new("r", m.keys(), cols, Matrix::new(m.len(), d, values).unwrap()).unwrap()
}

fn column_values(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, 24 * d)
}

#[test]
fn median_oracle_for_one_missing_cell() {
    let mut v: Vec<f64> = (0..48).map(|i| ((i * 37) % 17) as f64).collect();
    v[2 * 5 + 1] = f64::NAN;
    let out = preprocess(&matrix(v.clone(), 2), ImputePolicy::Median, false).unwrap();
    let mut col: Vec<f64> = (0..24).filter(|&r| r != 5).map(|r| v[r * 2 + 1]).collect();
    col.sort_by(f64::total_cmp);
    assert_eq!(col.len(), 23);
    let median = col[11];
    assert_eq!(out.values.get(5, 1), median);
}

#[test]
fn ingest_reports_problems_with_locations() {
    let m = manifest();
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("class_i,class_j,instance,alpha,a\n");
    for r in m.records.iter().skip(1) {
        text.push_str(&format!("{},{},{},{},1\n", r.class_i, r.class_j, r.instance, r.alpha));
    }
    let path = dir.path().join("short.csv");
    std::fs::write(&path, &text).unwrap();
    let err = ingest_csv(&path, "x", &m).unwrap_err().to_string();
    assert!(err.contains(&m.records[0].key().to_string()), "{err}");

    let bad = text.replacen(",1\n", ",oops\n", 1);
    std::fs::write(&path, bad).unwrap();
    let err = ingest_csv(&path, "x", &m).unwrap_err();
    assert!(matches!(err, Error::Data(_)));
    assert!(err.to_string().contains("line 2"), "{err}");
}

#[test]
fn align_reorders_and_names_missing_keys() {
    let a = matrix((0..24).map(f64::from).collect(), 1);
    let mut order: Vec<usize> = (0..24).rev().collect();
    order.swap(0, 5);
    let keys: Vec<ProblemKey> = order.iter().map(|&i| a.keys[i]).collect();
    let b = RepresentationMatrix::new("b", keys, vec!["g".into()], a.values.select_rows(&order)).unwrap();
    let out = align(vec![a.clone(), b]).unwrap();
    assert_eq!(out[0].keys, out[1].keys);
    assert_eq!(out[0].values, out[1].values);

    let short = RepresentationMatrix::new("c", a.keys[1..].to_vec(), vec!["g".into()], a.values.select_rows(&(1..24).collect::<Vec<_>>())).unwrap();
    let err = align(vec![a.clone(), short]).unwrap_err().to_string();
    assert!(err.contains(&a.keys[0].to_string()), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn standardised_columns_have_unit_moments(v in column_values(3)) {
        let out = preprocess(&matrix(v, 3), ImputePolicy::Median, true).unwrap();
        for c in 0..out.dim() {
            let col = out.values.column(c);
            let mean = col.iter().sum::<f64>() / 24.0;
            let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 24.0;
            prop_assert!(mean.abs() < 1e-9);
            prop_assert!((var - 1.0).abs() < 1e-9);
        }
        let again = preprocess(&out, ImputePolicy::Median, true).unwrap();
        for (a, b) in again.values.values().iter().zip(out.values.values()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn recorded_preprocessing_replays_bit_for_bit(mut v in column_values(3), holes in prop::collection::vec(0usize..72, 0..6), std in any::<bool>()) {
        for h in holes {
            v[h] = f64::NAN;
        }
        let raw = matrix(v, 3);
        let out = preprocess(&raw, ImputePolicy::Mean, std).unwrap();
        let replayed = apply_record(&raw, out.preprocessing.as_ref().unwrap()).unwrap();
        prop_assert_eq!(
            replayed.values.values().iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            out.values.values().iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
        prop_assert_eq!(replayed.columns, out.columns);
    }
}
