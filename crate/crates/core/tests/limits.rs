use std::collections::BTreeSet;

use fusionlim::fusion::{FusionSystem, SubId};
use fusionlim::group::Group;
use fusionlim::orbitlim::{higher_limits, LimitSetup, DEFAULT_COCHAIN_CAP};
use fusionlim::perm::Perm;

fn group(degree: usize, gens: &[&str]) -> Group {
    Group::generate(degree, gens.iter().map(|s| Perm::parse(degree, s).unwrap()).collect()).unwrap()
}

fn s4() -> FusionSystem {
    FusionSystem::new(&group(4, &["(1 2)", "(1 2 3 4)"]), 2, 512).unwrap()
}

fn factors(fs: &FusionSystem, support: &BTreeSet<SubId>, k: usize) -> Vec<Vec<u128>> {
    higher_limits(fs, support, k, DEFAULT_COCHAIN_CAP).unwrap().into_iter().map(|r| r.invariant_factors).collect()
}

fn by_skeleton(fs: &FusionSystem, support: &BTreeSet<SubId>, k: usize, skeletal: bool) -> Vec<Vec<u128>> {
    let setup = LimitSetup::new(fs, support, skeletal).unwrap();
    let cx = setup.complex(k + 1, DEFAULT_COCHAIN_CAP).unwrap();
    (0..=k).map(|i| cx.limit_over(&cx.ring(), i).unwrap().0).collect()
}

fn centrics(fs: &FusionSystem) -> BTreeSet<SubId> {
    fs.centrics().into_iter().collect()
}

#[test]
fn skeleton_agrees_with_full_category_s4() {
    let fs = s4();
    let c = centrics(&fs);
    assert_eq!(by_skeleton(&fs, &c, 2, true), by_skeleton(&fs, &c, 2, false));
}

#[test]
fn skeleton_agrees_with_full_category_on_single_classes() {
    let fs = s4();
    for id in fs.centrics() {
        let one = fs.class_closure(&[id].into());
        assert_eq!(by_skeleton(&fs, &one, 2, true), by_skeleton(&fs, &one, 2, false), "{:?}", fs.subgroup(id).gens());
    }
}

#[test]
fn s4_centric_frozen() {
    let fs = s4();
    assert_eq!(factors(&fs, &centrics(&fs), 2), vec![vec![], vec![], vec![]]);
}

#[test]
fn natural_steinberg_atom() {
    // Z^R on the single class of V4 in S4
    let fs = s4();
    let v4 = fs.id_of(&group(4, &["(1 2)(3 4)", "(1 3)(2 4)"])).unwrap();
    assert_eq!(factors(&fs, &[v4].into(), 2), vec![vec![], vec![2], vec![]]);
}

#[test]
fn p_group_model_vanishes() {
    let d8 = group(4, &["(1 2 3 4)", "(1 3)"]);
    let fs = FusionSystem::new(&d8, 2, 512).unwrap();
    let lim = factors(&fs, &centrics(&fs), 2);
    assert_eq!(lim[0], vec![2]);
    assert!(lim[1].is_empty() && lim[2].is_empty());
}

#[test]
fn independent_of_sylow_choice() {
    let g = group(4, &["(1 2)", "(1 2 3 4)"]);
    let fs = s4();
    let other = fs.sylow().conjugate(&Perm::parse(4, "(2 3)").unwrap());
    assert_ne!(&other, fs.sylow());
    let moved = FusionSystem::with_sylow(&g, &other, 2, 512).unwrap();
    assert_eq!(factors(&fs, &centrics(&fs), 2), factors(&moved, &centrics(&moved), 2));
}

#[test]
fn odd_prime_abelian_sylow_vanishes() {
    // S3 at 3: Sylow C3 is the only centric
    let fs = FusionSystem::new(&group(3, &["(1 2)", "(1 2 3)"]), 3, 512).unwrap();
    let lim = factors(&fs, &centrics(&fs), 2);
    assert!(lim[0].is_empty() && lim[1].is_empty() && lim[2].is_empty());
}
