use addcomb::cover::{
    build_cover_element_small, level_profile, level_set, verify_cover_element, LevelProfile, Mode, DEFAULT_C,
};
use addcomb::fourier::convolve_sets;
use addcomb::group::{make_group, random_subset, random_subset_of_size, sumset, SubsetBits};
use addcomb::RngStream;
use proptest::prelude::*;

fn groups() -> impl Strategy<Value = Vec<usize>> {
    prop_oneof![
        (2usize..=512).prop_map(|n| vec![n]),
        (1usize..=8).prop_map(|d| vec![2; d]),
        (2usize..=16, 2usize..=16).prop_map(|(a, b)| vec![a, b]),
    ]
}

fn mode_of(i: u8) -> Mode {
    if i % 2 == 0 {
        Mode::Difference
    } else {
        Mode::Sum
    }
}

fn floor_of(profile: &LevelProfile, ell: u32) -> f64 {
    profile.size_floor(ell, DEFAULT_C)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Levels are disjoint, and together with the points above `alpha`
    /// (none exist) they cover the support of the convolution.
    #[test]
    fn levels_partition_support(factors in groups(), seed in any::<u64>(), density in 0.01f64..0.8, m in 0u8..2) {
        let g = make_group(&factors).unwrap();
        let a = random_subset(&g, density, &mut RngStream::new(seed));
        prop_assume!(!a.is_empty());
        let mode = mode_of(m);
        let conv = convolve_sets(&a, &match mode { Mode::Difference => a.negate(), Mode::Sum => a.clone() }).unwrap();
        let alpha = a.density();
        prop_assert!(conv.iter().all(|&v| v <= alpha + 1e-12));
        let top = (g.order() as f64).log2().ceil() as u32 + 1;
        let mut union = SubsetBits::empty(&g);
        for ell in 0..=top {
            let lvl = level_set(&a, ell, mode).unwrap().members;
            prop_assert!(union.is_disjoint(&lvl).unwrap());
            union = union.union(&lvl).unwrap();
        }
        let target = match mode { Mode::Difference => addcomb::group::difference_set(&a), Mode::Sum => sumset(&a, &a).unwrap() };
        prop_assert_eq!(union, target);
        if mode == Mode::Difference {
            prop_assert!(level_set(&a, 0, mode).unwrap().members.contains(0));
        }
    }

    #[test]
    fn small_regime_sandwich_and_size_floor(factors in groups(), seed in any::<u64>(), density in 0.05f64..0.6, m in 0u8..2) {
        let g = make_group(&factors).unwrap();
        let mut rng = RngStream::new(seed);
        let a = random_subset(&g, density, &mut rng);
        prop_assume!(!a.is_empty());
        let mode = mode_of(m);
        let elem = build_cover_element_small(&a, mode, &mut rng).unwrap();
        let checked = verify_cover_element(&a, &elem).unwrap();
        prop_assert!(checked.is_verified(), "{:?}", checked.verification);
        let level = level_set(&a, elem.ell, mode).unwrap().members;
        prop_assert!(level.is_subset_of(&elem.set).unwrap());
        let profile = level_profile(&a, mode).unwrap();
        prop_assert!(elem.set.len() >= level.len());
        prop_assert!(level.len() as f64 >= floor_of(&profile, elem.ell));
    }
}

#[test]
fn dense_sets_in_z1024_give_large_elements_inside_sumset() {
    let g = make_group(&[1024]).unwrap();
    let root = RngStream::new(1024);
    let mut min_fraction = f64::INFINITY;
    for i in 0..100 {
        let mut rng = root.split(i);
        let size = 256 + rng.below(512);
        let a = random_subset_of_size(&g, size, &mut rng);
        let profile = level_profile(&a, Mode::Sum).unwrap();
        assert!(profile.target_size <= 4 * a.len());
        let elem = build_cover_element_small(&a, Mode::Sum, &mut rng).unwrap();
        assert!(verify_cover_element(&a, &elem).unwrap().is_verified());
        assert!(elem.set.is_subset_of(&sumset(&a, &a).unwrap()).unwrap());
        min_fraction = min_fraction.min(elem.set.len() as f64 / 1024.0);
    }
    println!("smallest |F|/n over dense sets: {min_fraction:.4}");
    // the size floor at l <= 2 with alpha >= 1/4 is c/4 of the group
    assert!(min_fraction >= DEFAULT_C / 4.0);
}
