use std::collections::BTreeMap;

use holdup_network::deals::{classify, classify_all, read_deals};
use holdup_network::quartiles::nearest_rank;
use holdup_network::*;
use holdup_testkit::search::nearest_rank as oracle_rank;
use proptest::prelude::*;

fn ups(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(c, u)| (c.to_string(), u)).collect()
}

#[test]
fn direction_examples() {
    let map = ups(&[("1310", 1.2), ("2610", 3.4), ("3311", 3.4)]);
    assert_eq!(classify("1310", "2610", &map).unwrap(), Direction::Backward);
    assert_eq!(classify("2610", "1310", &map).unwrap(), Direction::Forward);
    assert_eq!(classify("2610", "2610", &map).unwrap(), Direction::Horizontal);
    // Distinct codes with equal upstreamness.
    assert_eq!(classify("2610", "3311", &map).unwrap(), Direction::Horizontal);
    assert!(matches!(classify("1310", "9999", &map), Err(NetworkError::UnknownIndustry(_))));
    assert!(classify("9999", "9999", &map).is_err());
}

#[test]
fn deals_csv() {
    let text = "deal_id,year,acquirer_firm_id,acquirer_industry,target_industry,status,tech_flag\n\
                D1,2005,F1,1310,2610,completed,true\n\
                D2,2006,F2,2610,2610,completed,\n";
    let deals = read_deals(text.as_bytes()).unwrap();
    assert_eq!(deals.len(), 2);
    assert_eq!(deals[0].tech_flag, Some(true));
    assert_eq!(deals[1].tech_flag, None);
    let map = ups(&[("1310", 1.2), ("2610", 3.4)]);
    let classified = classify_all(&deals, &map).unwrap();
    assert_eq!(classified[0].direction, Direction::Backward);
    assert_eq!(classified[1].direction, Direction::Horizontal);

    let bad = "deal_id,year,acquirer_firm_id,acquirer_industry,target_industry,status,tech_flag\nD1,2005,F1,131,2610,completed,\n";
    assert!(matches!(read_deals(bad.as_bytes()), Err(NetworkError::BadIndustryCode(_))));
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn classification_is_antisymmetric(a in 1.0f64..6.0, b in 1.0f64..6.0, same in any::<bool>()) {
        let map = ups(&[("1000", a), ("2000", b)]);
        let target = if same { "1000" } else { "2000" };
        let forward = classify("1000", target, &map).unwrap();
        let back = classify(target, "1000", &map).unwrap();
        prop_assert_eq!(back, forward.reversed());
    }

    #[test]
    fn quartiles_follow_nearest_rank(values in prop::collection::vec(1.0f64..8.0, 4..40)) {
        let map: BTreeMap<String, f64> = values.iter().enumerate().map(|(i, &u)| (format!("{:04}", i), u)).collect();
        let q = upstream_quartiles(&map).unwrap();
        for (k, p) in [25.0, 50.0, 75.0].into_iter().enumerate() {
            prop_assert_eq!(q.cuts[k], oracle_rank(&values, p));
        }
        for (code, &u) in &map {
            let expected = if u <= q.cuts[0] { Quartile::Q1 } else if u <= q.cuts[1] { Quartile::Q2 }
                else if u <= q.cuts[2] { Quartile::Q3 } else { Quartile::Q4 };
            prop_assert_eq!(q.assignment[code], expected);
        }
    }
}

#[test]
fn quartile_examples() {
    let q = upstream_quartiles(&ups(&[("0001", 1.0), ("0002", 2.0), ("0003", 3.0), ("0004", 4.0)])).unwrap();
    let got: Vec<Quartile> = q.assignment.values().copied().collect();
    assert_eq!(got, [Quartile::Q1, Quartile::Q2, Quartile::Q3, Quartile::Q4]);
    assert!(!q.degenerate);

    let flat = upstream_quartiles(&ups(&[("0001", 2.0), ("0002", 2.0), ("0003", 2.0), ("0004", 2.0), ("0005", 2.0)])).unwrap();
    assert!(flat.assignment.values().all(|&q| q == Quartile::Q1));
    assert!(flat.degenerate);

    let eight: Vec<(String, f64)> = (0..8).map(|i| (format!("{:04}", i), 1.0 + 0.37 * i as f64)).collect();
    let map: BTreeMap<String, f64> = eight.into_iter().collect();
    let q = upstream_quartiles(&map).unwrap();
    for quart in [Quartile::Q1, Quartile::Q2, Quartile::Q3, Quartile::Q4] {
        assert_eq!(q.assignment.values().filter(|&&x| x == quart).count(), 2);
    }

    assert!(matches!(
        upstream_quartiles(&ups(&[("0001", 1.0), ("0002", 2.0), ("0003", 3.0)])),
        Err(NetworkError::TooFewIndustries(3))
    ));
    assert_eq!(nearest_rank(&[1.0, 2.0, 3.0, 4.0], 50.0), 2.0);
}
