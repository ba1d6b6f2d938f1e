use proptest::prelude::*;

use rcom::chart::{shared_facet_check, FacetVerdict};
use rcom::sampling::{random_certified_chart, random_in_ball, seeded_rng, ChartOptions};
use rcom::{BarycentricChart, ModelSpace};

fn space_strategy() -> impl Strategy<Value = ModelSpace> {
    (prop_oneof![Just(1.0), Just(0.0), Just(-1.0)], 2usize..=3).prop_map(|(k, n)| ModelSpace::new(k, n).unwrap())
}

fn chart(space: ModelSpace, seed: u64) -> BarycentricChart {
    random_certified_chart(&mut seeded_rng(seed), space, &ChartOptions::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reference_edges_are_geodesic_lengths(space in space_strategy(), seed in any::<u64>()) {
        let c = chart(space, seed);
        let n = space.dimension();
        for i in 0..=n {
            for j in i + 1..=n {
                let geo = c.sigma()[i].distance(&c.sigma()[j]).unwrap();
                let flat = (c.reference().vertex(i) - c.reference().vertex(j)).norm();
                prop_assert!((geo - flat).abs() <= 1e-10 * geo);
            }
        }
    }

    #[test]
    fn vertices_map_to_sigma(space in space_strategy(), seed in any::<u64>()) {
        let c = chart(space, seed);
        for i in 0..=space.dimension() {
            let x = c.forward_map(c.reference().vertex(i)).unwrap();
            prop_assert!(x.distance(&c.sigma()[i]).unwrap() <= 1e-10 * c.edge_bound());
        }
    }

    #[test]
    fn inverse_undoes_forward(space in space_strategy(), seed in any::<u64>()) {
        let c = chart(space, seed);
        let mut rng = seeded_rng(seed ^ 0x5eed);
        for _ in 0..10 {
            let u = c.anchor_parameter() + random_in_ball(&mut rng, space.dimension(), c.domain_radius());
            let lambda = c.reference().barycentric_coords(&u).unwrap();
            let back = c.inverse_map(&c.forward_map(&u).unwrap()).unwrap();
            prop_assert!((back - lambda).amax() <= 1e-8);
        }
    }

    #[test]
    fn chart_is_not_its_own_neighbour(space in space_strategy(), seed in any::<u64>()) {
        let c = chart(space, seed);
        let verdict = shared_facet_check(&c, &c, 0).unwrap();
        prop_assert!(matches!(verdict, FacetVerdict::NotApplicable(_)));
    }
}

#[test]
fn distortion_bound_vanishes_only_when_flat() {
    for (kappa, seed) in [(1.0, 1), (-1.0, 2), (0.0, 3)] {
        let c = chart(ModelSpace::new(kappa, 2).unwrap(), seed);
        let bound = c.distortion_bound().unwrap();
        assert_eq!(bound == 0.0, kappa == 0.0);
    }
}
