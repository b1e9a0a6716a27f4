mod common;

use proptest::prelude::*;
use streamclust::metrics::{
    assignment_value, bcubed_labels, ceaf_labels, hungarian, info_metrics_labels, muc_labels, pairwise_metrics_labels,
    CeafMode, Prf,
};

const TOL: f64 = 1e-9;

fn labels() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (2usize..=50, 1usize..=6, 1usize..=6).prop_flat_map(|(n, kp, kg)| {
        (proptest::collection::vec(0..kp, n), proptest::collection::vec(0..kg, n))
    })
}

fn close(got: Prf, want: (f64, f64, f64)) -> bool {
    (got.precision - want.0).abs() <= TOL && (got.recall - want.1).abs() <= TOL && (got.f1 - want.2).abs() <= TOL
}

fn relabel(labels: &[usize], shift: usize) -> Vec<usize> {
    labels.iter().map(|l| (l * 7 + shift) % 101 + 3).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn coreference_metrics_match_brute_force((pred, gold) in labels()) {
        prop_assert!(close(bcubed_labels(&pred, &gold).unwrap(), common::bcubed(&pred, &gold)));
        prop_assert!(close(muc_labels(&pred, &gold).unwrap(), common::muc(&pred, &gold)));
        for (mode, phi) in [
            (CeafMode::Entity, common::Phi::Entity),
            (CeafMode::Mention, common::Phi::Mention),
            (CeafMode::EntityJaccard, common::Phi::Jaccard),
        ] {
            prop_assert!(close(ceaf_labels(&pred, &gold, mode).unwrap(), common::ceaf(&pred, &gold, phi)));
        }
    }

    #[test]
    fn pairwise_metrics_match_pair_enumeration((pred, gold) in labels()) {
        let s = pairwise_metrics_labels(&pred, &gold).unwrap();
        let (tp, fp, fn_, tn) = common::pairs(&pred, &gold);
        prop_assert_eq!((s.counts.tp, s.counts.fp, s.counts.fn_, s.counts.tn), (tp, fp, fn_, tn));
        prop_assert!((s.rand_index - common::rand_index(&pred, &gold)).abs() <= TOL);
        prop_assert!((s.adjusted_rand - common::ari(&pred, &gold)).abs() <= TOL);
        prop_assert!((s.fowlkes_mallows - common::fowlkes_mallows(&pred, &gold)).abs() <= TOL);
        prop_assert!(close(s.blanc, common::blanc(&pred, &gold)));
    }

    #[test]
    fn information_metrics_match_brute_force((pred, gold) in labels()) {
        let s = info_metrics_labels(&pred, &gold).unwrap();
        let (h, c, v) = common::v_measure(&pred, &gold);
        prop_assert!((s.homogeneity - h).abs() <= TOL);
        prop_assert!((s.completeness - c).abs() <= TOL);
        prop_assert!((s.v_measure - v).abs() <= TOL);
        prop_assert!((s.mutual_information - common::mutual_information(&pred, &gold)).abs() <= TOL);
        prop_assert!((s.adjusted_mutual_information - common::ami(&pred, &gold)).abs() <= TOL,
            "{} vs {}", s.adjusted_mutual_information, common::ami(&pred, &gold));
    }

    #[test]
    fn metrics_ignore_label_names((pred, gold) in labels(), shift in 0usize..50) {
        let (p2, g2) = (relabel(&pred, shift), relabel(&gold, shift + 1));
        prop_assert_eq!(bcubed_labels(&pred, &gold).unwrap(), bcubed_labels(&p2, &g2).unwrap());
        prop_assert_eq!(muc_labels(&pred, &gold).unwrap(), muc_labels(&p2, &g2).unwrap());
        for mode in [CeafMode::Entity, CeafMode::Mention] {
            let a = ceaf_labels(&pred, &gold, mode).unwrap();
            let b = ceaf_labels(&p2, &g2, mode).unwrap();
            prop_assert!(close(a, (b.precision, b.recall, b.f1)));
        }
        let a = pairwise_metrics_labels(&pred, &gold).unwrap();
        let b = pairwise_metrics_labels(&p2, &g2).unwrap();
        prop_assert_eq!(a, b);
        let a = info_metrics_labels(&pred, &gold).unwrap();
        let b = info_metrics_labels(&p2, &g2).unwrap();
        prop_assert!((a.v_measure - b.v_measure).abs() <= TOL);
        prop_assert!((a.adjusted_mutual_information - b.adjusted_mutual_information).abs() <= TOL);
    }

    #[test]
    fn identical_labelings_score_maximal((pred, _) in labels(), shift in 0usize..50) {
        let gold = relabel(&pred, shift);
        for prf in [
            bcubed_labels(&pred, &gold).unwrap(),
            muc_labels(&pred, &gold).unwrap(),
            ceaf_labels(&pred, &gold, CeafMode::Entity).unwrap(),
            ceaf_labels(&pred, &gold, CeafMode::Mention).unwrap(),
            pairwise_metrics_labels(&pred, &gold).unwrap().blanc,
        ] {
            prop_assert!((prf.f1 - 1.0).abs() <= TOL, "{:?}", prf);
        }
        let p = pairwise_metrics_labels(&pred, &gold).unwrap();
        prop_assert_eq!(p.adjusted_rand, 1.0);
        prop_assert_eq!(p.fowlkes_mallows, 1.0);
        prop_assert_eq!(p.rand_index, 1.0);
        let i = info_metrics_labels(&pred, &gold).unwrap();
        prop_assert_eq!(i.adjusted_mutual_information, 1.0);
        prop_assert!((i.v_measure - 1.0).abs() <= TOL);
    }

    #[test]
    fn symmetric_metrics((pred, gold) in labels()) {
        let a = pairwise_metrics_labels(&pred, &gold).unwrap();
        let b = pairwise_metrics_labels(&gold, &pred).unwrap();
        prop_assert!((a.adjusted_rand - b.adjusted_rand).abs() <= TOL);
        let ab = bcubed_labels(&pred, &gold).unwrap();
        let ba = bcubed_labels(&gold, &pred).unwrap();
        prop_assert!((ab.precision - ba.recall).abs() <= TOL);
        prop_assert!((ab.recall - ba.precision).abs() <= TOL);
    }

    #[test]
    fn hungarian_is_optimal(rows in 1usize..=6, cols in 1usize..=6, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = common::rng(seed);
        let profit: Vec<Vec<f64>> =
            (0..rows).map(|_| (0..cols).map(|_| rng.random_range(-20i32..=20) as f64).collect()).collect();
        let pairs = hungarian(&profit);
        prop_assert_eq!(pairs.len(), rows.min(cols));
        let mut seen_r = std::collections::HashSet::new();
        let mut seen_c = std::collections::HashSet::new();
        for &(r, c) in &pairs {
            prop_assert!(seen_r.insert(r) && seen_c.insert(c));
        }
        prop_assert_eq!(assignment_value(&profit, &pairs), common::brute_assignment(&profit));
    }
}
