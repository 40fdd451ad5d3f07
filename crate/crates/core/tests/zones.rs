mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{grid, ConstraintSet};
use tareach::model::ClockSet;
use tareach::zone::{canonicalize, point_region, time_successor, zone_member, zone_reset, BoundedZone};
use tareach::Rational;

fn zone_of(seed: u64, n: usize) -> Option<(ConstraintSet, BoundedZone)> {
    let set = ConstraintSet::random(&mut ChaCha8Rng::seed_from_u64(seed), n);
    canonicalize(&set.to_raw()).map(|z| (set, z))
}

fn grid_set(z: &BoundedZone) -> Vec<bool> {
    grid(z.dim(), 4).iter().map(|p| zone_member(z, p)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn canonical_form_is_unique_per_point_set(a in any::<u64>(), b in any::<u64>(), n in 1usize..=3) {
        if let (Some((_, za)), Some((_, zb))) = (zone_of(a, n), zone_of(b, n)) {
            prop_assert_eq!(grid_set(&za) == grid_set(&zb), za == zb);
        }
    }

    #[test]
    fn inclusion_matches_the_grid(a in any::<u64>(), b in any::<u64>(), n in 1usize..=3) {
        if let (Some((_, za)), Some((_, zb))) = (zone_of(a, n), zone_of(b, n)) {
            let included = grid_set(&zb).iter().zip(grid_set(&za)).all(|(&in_b, in_a)| !in_b || in_a);
            prop_assert_eq!(za.contains_zone(&zb), included);
        }
    }

    #[test]
    fn point_region_is_the_least_zone_around_a_point(seed in any::<u64>(), n in 1usize..=3, k in any::<prop::sample::Index>()) {
        let points = grid(n, 4);
        let p = &points[k.index(points.len())];
        let region = point_region(p).unwrap();
        prop_assert!(zone_member(&region, p));
        if let Some((set, z)) = zone_of(seed, n) {
            prop_assert_eq!(set.contains(p), z.contains_zone(&region));
        }
    }

    #[test]
    fn future_is_a_closure_operator(seed in any::<u64>(), n in 1usize..=3) {
        if let Some((_, z)) = zone_of(seed, n) {
            let f = time_successor(&z);
            prop_assert!(f.contains_zone(&z));
            prop_assert_eq!(time_successor(&f), f);
        }
    }

    #[test]
    fn resets_compose(seed in any::<u64>(), n in 1usize..=3, a in 0u64..8, b in 0u64..8) {
        if let Some((_, z)) = zone_of(seed, n) {
            let mask = (1u64 << n) - 1;
            let (a, b) = (ClockSet(a & mask), ClockSet(b & mask));
            prop_assert_eq!(zone_reset(&zone_reset(&z, a), b), zone_reset(&z, a.union(b)));
        }
    }
}

#[test]
fn regions_of_grid_points_partition_the_cube() {
    for n in 1..=3 {
        let points = grid(n, 4);
        let regions: Vec<BoundedZone> = points.iter().map(|p| point_region(p).unwrap()).collect();
        for (p, rp) in points.iter().zip(&regions) {
            for rq in &regions {
                assert_eq!(zone_member(rq, p), rp == rq);
            }
        }
    }
}


#[test]
fn values_outside_the_cube_have_no_region() {
    assert!(point_region(&[Rational::new(3, 2)]).is_none());
}
