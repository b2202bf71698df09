use proptest::prelude::*;

use fusionlim::group::Group;
use fusionlim::library::permutation_module;
use fusionlim::modaction::Action;
use fusionlim::offenders::{is_best_offender, is_offender, offender_score, replacement};
use fusionlim::perm::Perm;
use fusionlim::verify::{quadnorm, replacement_suite, Caps};

fn perm(n: usize) -> impl Strategy<Value = Perm> {
    Just((0..n as u32).collect::<Vec<u32>>()).prop_shuffle().prop_map(|v| Perm::from_images(v).unwrap())
}

fn small_group() -> impl Strategy<Value = Group> {
    (2usize..=5).prop_flat_map(|n| prop::collection::vec(perm(n), 1..=2)).prop_map(|gens| {
        let n = gens[0].degree();
        Group::generate(n, gens).unwrap()
    })
}

fn p_part(mut n: usize, p: usize) -> usize {
    let mut q = 1;
    while n.is_multiple_of(p) {
        n /= p;
        q *= p;
    }
    q
}

fn faithful_module(g: &Group, p: u64) -> Option<Action> {
    let act = permutation_module(g, p).ok()?;
    act.is_faithful().then_some(act)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn perm_axioms(x in perm(6), y in perm(6), z in perm(6)) {
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert!(x.mul(&x.inverse()).is_identity());
        prop_assert_eq!(x.conj(&y), y.inverse().mul(&x).mul(&y));
        prop_assert!(x.pow(x.order()).is_identity());
        for i in 0..6 {
            prop_assert_eq!(x.mul(&y).apply(i), y.apply(x.apply(i)));
        }
    }

    #[test]
    fn sylow_and_normalizer(g in small_group(), p in prop::sample::select(vec![2u64, 3, 5])) {
        let s = g.sylow(p);
        prop_assert!(s.is_subgroup_of(&g));
        prop_assert_eq!(s.order(), p_part(g.order(), p as usize));
        prop_assert_eq!(g.order() % g.normalizer(&s).order(), 0);
        prop_assert!(s.is_normal_in(&g.normalizer(&s)));
        let z = g.center();
        prop_assert!(z.is_abelian() && z.is_normal_in(&g));
        prop_assert_eq!(g.order() % g.conjugates(&s).len(), 0);
    }

    #[test]
    fn offenders_and_replacement(g in small_group(), p in prop::sample::select(vec![2u64, 3])) {
        if let Some(act) = faithful_module(&g, p) {
            let d = act.module().order_log();
            let s = g.sylow(p);
            for x in s.elements() {
                let a = g.subgroup(vec![x.clone()]).unwrap();
                prop_assert!(offender_score(&act, &a) >= act.fixed_points(&a).log_order(act.module()));
                if a.is_trivial() {
                    prop_assert_eq!(offender_score(&act, &a), d);
                } else if is_offender(&act, &a) {
                    let b = replacement(&act, &a).unwrap();
                    prop_assert!(b.is_subgroup_of(&a) && !b.is_trivial());
                    prop_assert!(offender_score(&act, &b) >= offender_score(&act, &a));
                    prop_assert!(is_best_offender(&act, &b).unwrap() && act.is_quadratic(&b));
                }
            }
        }
    }

    #[test]
    fn suites_on_permutation_modules(g in small_group(), p in prop::sample::select(vec![2u64, 3])) {
        if let Some(act) = faithful_module(&g, p) {
            for r in [quadnorm("random", &act, Caps::default()).unwrap(), replacement_suite("random", &act, Caps::default()).unwrap()] {
                let bad: Vec<String> = r.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
                prop_assert!(bad.is_empty(), "{} {:?}", r.suite, bad);
            }
        }
    }

    #[test]
    fn norms_are_fixed(g in small_group(), seed in prop::collection::vec(0u64..3, 5)) {
        if let Some(act) = faithful_module(&g, 3) {
            let d = act.module();
            let v = d.normalize(&seed[..d.rank()]);
            let s = g.sylow(3);
            let one = Group::trivial(g.degree());
            let w = act.relative_norm(&one, &s, &v).unwrap();
            prop_assert!(act.is_fixed_by(&w, s.gens()));
            let n = act.norm(&s, &w).unwrap();
            prop_assert!(act.is_fixed_by(&n, g.gens()));
            prop_assert_eq!(n, act.norm(&one, &v).unwrap());
        }
    }
}
