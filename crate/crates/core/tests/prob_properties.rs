use proptest::prelude::*;
use twoway_helper::prob::{
    conditional_entropy, conditional_mutual_information, entropy, marginalize, mutual_information, JointPmf, Var,
};

fn joint3() -> impl Strategy<Value = JointPmf> {
    (1usize..4, 1usize..4, 1usize..4)
        .prop_flat_map(|(a, b, c)| {
            proptest::collection::vec(0.0f64..1.0, a * b * c).prop_map(move |raw| (a, b, c, raw))
        })
        .prop_filter_map("nonzero mass", |(a, b, c, raw)| {
            let t: f64 = raw.iter().sum();
            (t > 1e-6).then(|| {
                JointPmf::new(
                    vec![Var::new("A", a), Var::new("B", b), Var::new("C", c)],
                    raw.iter().map(|v| v / t).collect(),
                )
                .unwrap()
            })
        })
}

proptest! {
    #[test]
    fn chain_rule_of_entropy(j in joint3()) {
        let hab = entropy(&j, &["A", "B"]).unwrap();
        let ha = entropy(&j, &["A"]).unwrap();
        let hb_a = conditional_entropy(&j, &["B"], &["A"]).unwrap();
        prop_assert!((hab - ha - hb_a).abs() < 1e-9);
    }

    #[test]
    fn chain_rule_of_mutual_information(j in joint3()) {
        let i_a_bc = mutual_information(&j, &["A"], &["B", "C"]).unwrap();
        let i_a_b = mutual_information(&j, &["A"], &["B"]).unwrap();
        let i_a_c_b = conditional_mutual_information(&j, &["A"], &["C"], &["B"]).unwrap();
        prop_assert!((i_a_bc - i_a_b - i_a_c_b).abs() < 1e-9);
    }

    #[test]
    fn information_is_nonnegative_and_symmetric(j in joint3()) {
        let ab_c = conditional_mutual_information(&j, &["A"], &["B"], &["C"]).unwrap();
        let ba_c = conditional_mutual_information(&j, &["B"], &["A"], &["C"]).unwrap();
        prop_assert!(ab_c >= 0.0);
        prop_assert!((ab_c - ba_c).abs() < 1e-12);
        prop_assert!(conditional_entropy(&j, &["A"], &["B", "C"]).unwrap() >= -1e-12);
    }

    #[test]
    fn marginals_reproduce_sums(j in joint3()) {
        let m = marginalize(&j, &["C", "A"]).unwrap();
        let cards = j.cards();
        for c in 0..cards[2] {
            for a in 0..cards[0] {
                let direct: f64 = (0..cards[1]).map(|b| j.prob(&[a, b, c])).sum();
                prop_assert!((m.prob(&[c, a]) - direct).abs() < 1e-12);
            }
        }
        let total: f64 = m.probs().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn conditioning_reduces_entropy(j in joint3()) {
        let h = entropy(&j, &["A"]).unwrap();
        let hc = conditional_entropy(&j, &["A"], &["B"]).unwrap();
        prop_assert!(hc <= h + 1e-12);
    }
}
