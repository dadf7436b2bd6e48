use arw_core::layerperc::{
    enumerate_infections, enumerate_odometers, flow_nonnegativity_check, greedy_path, minimal_odometer,
    oracle, phi_map, validate, BoundaryData, ExtendedOdometer,
};
use arw_core::{check_stable, stabilize, ArwError, Configuration, InstructionTape, Policy};
use proptest::prelude::*;

fn corpus() -> Vec<(u64, BoundaryData)> {
    let shapes = [
        (vec![1, 2, 0, 1, 1, 1], -1),
        (vec![0, 1, 0, 1], 0),
        (vec![2, 0, 0, 0, 1], -2),
        (vec![1, 1, 1], 0),
        (vec![0, 0, 3, 0, 0, 0], -1),
    ];
    let mut out = Vec::new();
    for seed in 0..12u64 {
        let (sigma, f0) = shapes[seed as usize % shapes.len()].clone();
        out.push((seed, BoundaryData::new(sigma, 0, f0)));
    }
    out
}

#[test]
fn engine_odometer_is_a_member_with_matching_row() {
    for seed in 0..40u64 {
        let sigma: Vec<u32> = (0..6).map(|i| ((seed + i) % 3) as u32).collect();
        let tape = InstructionTape::new(seed, 0.8).unwrap();
        let r = stabilize(Configuration::from_active(sigma.clone()), &tape, Policy::Sweep, None).unwrap();
        let bd = BoundaryData::new(sigma, 0, -(r.ejected_left as i64));
        let mut values = vec![0];
        values.extend(r.odometer.counts().iter().map(|&x| x as i64));
        values.push(0);
        let u = ExtendedOdometer::new(values, &tape);
        validate(&u, &tape, &bd).unwrap();
        let path = phi_map(&u, &tape, &bd).unwrap();
        assert_eq!(path.cells[bd.n].s as u64, r.sleeping_count, "seed {seed}");
        assert_eq!(path.last().s as u64, r.sleeping_count);

        let m = minimal_odometer(&tape, &bd).unwrap();
        assert!(u.values.iter().zip(&m.values).all(|(a, b)| a >= b));
        let reach = u.values.iter().zip(&m.values).map(|(a, b)| (a - b) as u64).max().unwrap();
        if reach <= 40 {
            let all = enumerate_odometers(&tape, &bd, Some(40), 1_000_000).unwrap();
            assert!(all.odometers.contains(&u), "seed {seed}");
        }
    }
}

#[test]
fn genuine_members_are_engine_stable() {
    let mut seen = 0;
    for (seed, bd) in corpus() {
        let tape = InstructionTape::new(seed, 0.8).unwrap();
        let all = enumerate_odometers(&tape, &bd, Some(40), 1_000_000).unwrap();
        let cfg = Configuration::from_active(bd.sigma.clone());
        for u in all.odometers.iter().filter(|u| u.is_genuine() && u.values[bd.n + 1] == 0) {
            let engine = u.to_engine(&tape).unwrap();
            let rep = check_stable(&engine, &cfg, &tape, 1..=bd.n);
            assert!(rep.is_stable(), "seed {seed}: {:?}", u.values);
            let s_n = phi_map(u, &tape, &bd).unwrap().cells[bd.n].s;
            assert_eq!(rep.resting(), s_n);
            seen += 1;
        }
    }
    assert!(seen > 0);
}

#[test]
fn enumeration_matches_oracle_on_corpus() {
    for (seed, bd) in corpus() {
        let tape = InstructionTape::new(seed, 0.8).unwrap();
        let sets = enumerate_infections(&tape, &bd, Some(25)).unwrap();
        assert_eq!(sets.steps, oracle::infection_sets(&tape, &bd, 25).unwrap(), "seed {seed}");
        assert!(!oracle::has_member_below_minimal(&tape, &bd, 25).unwrap());
        assert_eq!(minimal_odometer(&tape, &bd).unwrap().values, oracle::minimal_odometer(&tape, &bd));
        let all = enumerate_odometers(&tape, &bd, Some(25), 1_000_000).unwrap();
        let members = oracle::members(&tape, &bd, 25).unwrap();
        assert_eq!(all.odometers.len(), members.len());
        for u in &all.odometers {
            assert!(flow_nonnegativity_check(u).is_empty());
            validate(u, &tape, &bd).unwrap();
        }
    }
}

#[test]
fn corrupted_values_are_rejected() {
    let tape = InstructionTape::new(3, 0.8).unwrap();
    let bd = BoundaryData::new(vec![1, 0, 2, 1], 0, -1);
    let m = minimal_odometer(&tape, &bd).unwrap();
    let mut values = m.values.clone();
    values[2] = -values[2] - 1;
    let bad = ExtendedOdometer::new(values, &tape);
    assert!(matches!(validate(&bad, &tape, &bd), Err(ArwError::NotAMember(_))));
    assert!(phi_map(&bad, &tape, &bd).is_err());

    let mut wrong_flow = m.clone();
    wrong_flow.flows[1] += 1;
    assert!(matches!(validate(&wrong_flow, &tape, &bd), Err(ArwError::NotAMember(_))));
}

#[test]
fn enumeration_limits_are_enforced() {
    let tape = InstructionTape::new(1, 0.8).unwrap();
    assert!(enumerate_infections(&tape, &BoundaryData::zero(13), Some(4)).is_err());
    let bd = BoundaryData::new(vec![2, 2, 2, 2, 2, 2], 0, 0);
    assert!(matches!(
        enumerate_odometers(&tape, &bd, Some(40), 3),
        Err(ArwError::InvalidParameter(_))
    ));
}

#[test]
fn greedy_block_matches_enumerated_maximum() {
    for seed in 0..15u64 {
        let tape = InstructionTape::new(seed, 0.8).unwrap();
        let bd = BoundaryData::zero(3);
        let g = greedy_path(&tape, &bd, 4, 4).unwrap();
        let sets = enumerate_infections(&tape, &bd, None).unwrap();
        let best = sets.steps[4].iter().map(|c| c.s).max().unwrap();
        assert_eq!(g.path.cells[4].s, best, "seed {seed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn minimal_odometer_agrees_with_oracle(
        seed in any::<u64>(),
        sigma in prop::collection::vec(0u32..3, 1..9),
        u0 in -3i64..4,
        f0 in -4i64..3,
        lambda in 0.2f64..2.5,
    ) {
        let tape = InstructionTape::new(seed, lambda).unwrap();
        let bd = BoundaryData::new(sigma, u0, f0);
        let m = minimal_odometer(&tape, &bd).unwrap();
        prop_assert_eq!(&m.values, &oracle::minimal_odometer(&tape, &bd));
        prop_assert!(validate(&m, &tape, &bd).is_ok());
        let path = phi_map(&m, &tape, &bd).unwrap();
        prop_assert!(path.cells.iter().all(|c| c.r == 0 && c.s == 0));
    }

    #[test]
    fn infection_sets_agree_with_oracle(
        seed in any::<u64>(),
        sigma in prop::collection::vec(0u32..3, 1..5),
        f0 in -2i64..1,
    ) {
        let tape = InstructionTape::new(seed, 0.8).unwrap();
        let bd = BoundaryData::new(sigma, 0, f0);
        let sets = enumerate_infections(&tape, &bd, Some(12)).unwrap();
        prop_assert_eq!(sets.steps, oracle::infection_sets(&tape, &bd, 12).unwrap());
    }
}
