use landmap::analysis::{
    combo_alignment, coverage, cross_similarity, dendrogram_order, overlap_report, perf_alignment, CoverageMatrix,
    Orientation, PerformanceTable,
};
use landmap::doe::SamplingConfig;
use landmap::manifest::SuiteManifest;
use landmap::mabbob::SuiteConfig;
use landmap::matrix::Matrix;
use proptest::prelude::*;

fn reduced_manifest() -> SuiteManifest {
    let suite = SuiteConfig {
        classes: vec![1, 2, 3],
        instances: vec![1, 2, 3],
        alphas: vec![0.5],
        dim: 2,
    };
    SuiteManifest::build(&suite, &SamplingConfig::default(), 42).unwrap()
}

fn counts(name: &str, rows: &[&[u64]]) -> CoverageMatrix {
    CoverageMatrix {
        representation: name.into(),
        combos: (0..rows.len()).map(|i| (1, i as u8 + 2)).collect(),
        n_clusters: rows[0].len(),
        counts: rows.iter().flat_map(|r| r.iter().copied()).collect(),
    }
}

#[test]
fn hand_counted_coverage() {
    let m = reduced_manifest();
    // rows come in blocks of three variants per combination
    let labels: Vec<usize> = (0..m.len()).map(|r| usize::from(r % 3 == 0)).collect();
    let cov = coverage("hand", &labels, &m).unwrap();
    assert_eq!(cov.combos.len(), 6);
    for c in 0..6 {
        assert_eq!((cov.get(c, 0), cov.get(c, 1)), (2, 1));
    }
    assert_eq!(cov.row_sums(), vec![3; 6]);
    assert_eq!(cov.column_sums(), vec![12, 6]);
    assert_eq!(cov.total(), 18);
}

#[test]
fn block_diagonal_similarity_orders_blocks_contiguously() {
    // clusters 0, 2, 4 and 1, 3 form two blocks
    let block = [0, 1, 0, 1, 0];
    let mut s = Matrix::zeros(5, 5);
    for i in 0..5 {
        for j in 0..5 {
            let v = if block[i] == block[j] { 0.9 } else { 0.05 };
            s.set(i, j, if i == j { 1.0 } else { v });
        }
    }
    let order = dendrogram_order(&s);
    for leaves in [&order.row_order, &order.col_order] {
        let groups: Vec<usize> = leaves.iter().map(|&i| block[i]).collect();
        let switches = groups.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(switches, 1, "{leaves:?}");
        let mut sorted = leaves.to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
    }
}

#[test]
fn self_and_disjoint_similarity() {
    let a = counts("a", &[&[3, 0, 0], &[0, 2, 1], &[0, 1, 2]]);
    let s = cross_similarity(&a, &a).unwrap();
    for j in 0..3 {
        assert!((s.values.get(j, j) - 1.0).abs() < 1e-12);
    }
    let b = counts("b", &[&[3, 0], &[0, 0], &[0, 0]]);
    let c = counts("c", &[&[0, 0], &[3, 0], &[0, 3]]);
    assert!(cross_similarity(&b, &c).unwrap().values.values().iter().all(|v| *v == 0.0));
}

#[test]
fn overlap_on_two_shared_combinations() {
    let mut ra = vec![[0u64, 1]; 10];
    let mut rb = vec![[1u64, 0]; 10];
    ra[3] = [5, 0];
    ra[7] = [10, 0];
    rb[3] = [0, 10];
    rb[7] = [0, 5];
    let a = counts("a", &ra.iter().map(|r| &r[..]).collect::<Vec<_>>());
    let b = counts("b", &rb.iter().map(|r| &r[..]).collect::<Vec<_>>());
    let s = cross_similarity(&a, &b).unwrap();
    let report = overlap_report(&s, &a, &b, 0.5, 5).unwrap();
    let e = report.iter().find(|e| e.cluster_a == 0 && e.cluster_b == 1).unwrap();
    assert_eq!(e.contributors.len(), 2);
    for c in &e.contributors {
        assert_eq!(c.contribution, 50.0);
        assert_eq!(c.share, 0.5);
    }
    assert_eq!(e.contributors[0].combo_index, 3);
}

#[test]
fn perfect_and_hand_counted_performance_alignment() {
    let m = reduced_manifest();
    let keys = m.keys();
    let n = keys.len();
    let mut scores = Matrix::zeros(n, 5);
    let labels: Vec<usize> = m.records.iter().map(|r| r.class_i as usize - 1).collect();
    for (row, &l) in labels.iter().enumerate() {
        for c in 0..5 {
            scores.set(row, c, if c == l { 0.0 } else { 1.0 });
        }
    }
    let ids: Vec<String> = (0..5).map(|c| format!("c{c}")).collect();
    let perf = PerformanceTable::new("DE", ids.clone(), keys.clone(), scores.clone(), Orientation::Lower).unwrap();
    let h = perf_alignment(&labels, &keys, &perf).unwrap();
    assert_eq!((h.homogeneity, h.completeness, h.v_measure), (1.0, 1.0, 1.0));

    // 8 instances, hand contingency: best configs [0,0,0,0,1,1,1,1], clusters [0,0,1,1,2,2,2,2]
    let sub = &keys[..8];
    let mut s8 = Matrix::zeros(8, 5);
    for r in 0..8 {
        s8.set(r, if r < 4 { 1 } else { 0 }, -1.0);
    }
    let perf = PerformanceTable::new("PSO", ids, sub.to_vec(), s8, Orientation::Lower).unwrap();
    let h = perf_alignment(&[0, 0, 1, 1, 2, 2, 2, 2], sub, &perf).unwrap();
    // H(true) = ln 2, H(true|pred) = 0; H(pred) = -(2 * 1/4 ln 1/4 + 1/2 ln 1/2), H(pred|true) = 1/2 ln 2
    let h_pred = -(0.5 * 0.25f64.ln() + 0.5 * 0.5f64.ln());
    assert!((h.homogeneity - 1.0).abs() < 1e-12);
    assert!((h.completeness - (1.0 - 0.5 * 2f64.ln() / h_pred)).abs() < 1e-12);

    let missing = PerformanceTable::new("x", (0..5).map(|c| c.to_string()).collect(), keys[1..].to_vec(), scores.select_rows(&(1..n).collect::<Vec<_>>()), Orientation::Lower).unwrap();
    let err = perf_alignment(&labels, &keys, &missing).unwrap_err().to_string();
    assert!(err.contains(&keys[0].to_string()), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coverage_conserves_counts(labels in prop::collection::vec(0usize..7, 18)) {
        let m = reduced_manifest();
        let cov = coverage("p", &labels, &m).unwrap();
        prop_assert_eq!(cov.total(), 18);
        prop_assert!(cov.row_sums().iter().all(|r| *r == 3));
        let max = labels.iter().max().copied().unwrap();
        let mut sizes = vec![0u64; max + 1];
        for l in &labels {
            sizes[*l] += 1;
        }
        prop_assert_eq!(cov.column_sums(), sizes);
        let h = combo_alignment(&labels, &m).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&h.v_measure));
    }

    #[test]
    fn similarity_transposes_and_relabels(
        la in prop::collection::vec(0usize..4, 18),
        lb in prop::collection::vec(0usize..3, 18),
        shift in 1usize..4,
    ) {
        let m = reduced_manifest();
        let a = coverage("a", &la, &m).unwrap();
        let b = coverage("b", &lb, &m).unwrap();
        let ab = cross_similarity(&a, &b).unwrap();
        let ba = cross_similarity(&b, &a).unwrap();
        prop_assert_eq!(ab.values.transpose(), ba.values.clone());
        let width = la.iter().max().unwrap() + 1;
        prop_assume!((0..width).all(|c| la.contains(&c)));
        let renamed: Vec<usize> = la.iter().map(|l| (l + shift) % width).collect();
        let ra = cross_similarity(&coverage("a", &renamed, &m).unwrap(), &b).unwrap();
        let mut v1: Vec<f64> = ab.values.values().to_vec();
        let mut v2: Vec<f64> = ra.values.values().to_vec();
        v1.sort_by(f64::total_cmp);
        v2.sort_by(f64::total_cmp);
        prop_assert_eq!(v1, v2);
    }

    #[test]
    fn best_config_ignores_monotone_transforms(v in prop::collection::vec(-5.0f64..5.0, 40)) {
        let m = reduced_manifest();
        let keys = m.keys()[..8].to_vec();
        let ids: Vec<String> = (0..5).map(|c| c.to_string()).collect();
        let base = PerformanceTable::new("p", ids.clone(), keys.clone(), Matrix::new(8, 5, v.clone()).unwrap(), Orientation::Lower).unwrap();
        let warped: Vec<f64> = v.iter().map(|x| x.exp() * 3.0 + 1.0).collect();
        let t = PerformanceTable::new("p", ids, keys, Matrix::new(8, 5, warped).unwrap(), Orientation::Lower).unwrap();
        prop_assert_eq!(base.best_config(), t.best_config());
    }
}
