//! Randomized invariants. Each case draws a seed and builds its instance from
//! it, so a failing seed reproduces with `common::rng`.

mod common;

use common::props;
use proptest::prelude::*;
use proptest::test_runner::Config;

const GRID: u32 = 16;

fn config(cases: u32) -> Config {
    Config { cases, failure_persistence: None, ..Config::default() }
}

fn ok(r: props::Check) -> Result<(), TestCaseError> {
    r.map(|_| ()).map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn factorization_idempotence_and_signs(seed in any::<u64>()) {
        let f = common::random_pointed(&mut common::rng(seed), 12);
        ok(props::factorization(&f))?;
    }

    #[test]
    fn oracle_agrees_at_two_resolutions(seed in any::<u64>()) {
        let f = common::random_pointed(&mut common::rng(seed), 10);
        ok(props::oracle_agreement(&f, GRID))?;
    }

    #[test]
    fn opposite_witnesses_nest(seed in any::<u64>()) {
        let f = common::random_pointed(&mut common::rng(seed), 12);
        ok(props::prop_a(&f, GRID))?;
    }

    #[test]
    fn composition_orientation_rule(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let f = common::random_pointed(&mut rng, 8);
        let g = common::random_pointed(&mut rng, 8);
        ok(props::prop_c(&f, &g, 8))?;
    }

    #[test]
    fn witnesses_lift_to_positive_departures(seed in any::<u64>()) {
        let f = common::random_pointed(&mut common::rng(seed), 12);
        ok(props::lemma_d(&f, GRID))?;
    }

    #[test]
    fn reach_is_monotone(seed in any::<u64>()) {
        let f = common::random_pointed(&mut common::rng(seed), 12);
        let t = zigzag::contour::radial_contour_factor(&f).unwrap();
        ok(props::l_monotone(t.map()))?;
    }
}

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn negative_witnesses_straddle_outer_witnesses(seed in any::<u64>()) {
        let Some((f1, f2)) = common::hypothesis_pair(&mut common::rng(seed)) else {
            return Ok(());
        };
        ok(props::prop_e(&f1, &f2, GRID))?;
    }
}

proptest! {
    #![proptest_config(config(400))]

    #[test]
    fn bridging_pairs_nest_with_inner_witnesses(seed in any::<u64>()) {
        let Some([f1, f2, f3]) = common::ex4_triple(&mut common::rng(seed)) else {
            return Ok(());
        };
        ok(props::star(&f1, &f2, &f3, GRID))?;
    }
}
