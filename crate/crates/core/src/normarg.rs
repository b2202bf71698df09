//! Norm maps on composition factors and hypothesis checkers for the norm
//! arguments: `C_D(N_G(J)) = C_D(G)` and `C_D(H) = C_D(G)`.

use serde::Serialize;

use crate::abelian::AbSubgroup;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::lattice::{subgroups_of_pgroup, DEFAULT_PGROUP_CAP};
use crate::modaction::Action;

/// Largest `log_p |D|` for element-wise norm evaluation on factors.
pub const MAX_FACTOR_LOG: u32 = 12;

/// Whether `N_{A0}^A` vanishes on the factor `upper / lower`.
pub fn norm_trivial_on_factor(act: &Action, a0: &Group, a: &Group, lower: &AbSubgroup, upper: &AbSubgroup) -> Result<bool> {
    let d = act.module();
    if upper.log_order(d) > MAX_FACTOR_LOG {
        return Err(Error::cap("log_p of a module factor for norm evaluation", MAX_FACTOR_LOG as usize));
    }
    let reps = a.right_coset_reps(a0);
    for v in upper.elements(d) {
        if lower.contains(d, &v) {
            continue;
        }
        let fixed = a0.gens().iter().all(|x| lower.contains(d, &act.commutator_vector(&v, x)));
        if !fixed {
            continue;
        }
        let n = reps.iter().fold(d.zero(), |acc, g| d.add(&acc, &act.apply(&v, g)));
        if !lower.contains(d, &n) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Composition factors of `D` under the acting group, as `(lower, upper)`.
pub fn composition_factors(act: &Action) -> Vec<(AbSubgroup, AbSubgroup)> {
    let chain = act.composition_series();
    chain.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct QuadnormReport {
    /// Pairs `A0 <= A` where a part of the lemma applies.
    pub applicable: usize,
    pub violations: Vec<String>,
}

/// Every pair `A0 <= A` of subgroups of the `p`-group `a`, checked
/// against the three vanishing criteria for elementary abelian `D`.
pub fn quadnorm_check(act: &Action, a: &Group) -> Result<QuadnormReport> {
    let d = act.module();
    let p = d.prime();
    if !d.is_elementary() {
        return Err(Error::precondition("module is not elementary abelian"));
    }
    if !a.is_p_group(p) {
        return Err(Error::precondition("A is not a p-group"));
    }
    let quadratic = act.is_quadratic(a);
    let fixed_a = act.fixed_points(a);
    let whole = d.whole();
    let mut report = QuadnormReport::default();
    for a0 in subgroups_of_pgroup(a, p, DEFAULT_PGROUP_CAP.max(a.order()))? {
        if !a0.is_subgroup_of(a) {
            continue;
        }
        let index = a.order() / a0.order();
        let part = if p != 2 {
            (quadratic && index > 1).then_some("(a)")
        } else if index >= 2 && act.fixed_points(&a0).equals(d, &fixed_a) {
            Some("(b)(i)")
        } else if index >= 4 && quadratic {
            Some("(b)(ii)")
        } else {
            None
        };
        let Some(part) = part else { continue };
        report.applicable += 1;
        if !act.norm_vanishes(&a0, a, &whole) {
            report.violations.push(format!("{part}: A0 of order {} in A of order {}", a0.order(), a.order()));
        }
    }
    Ok(report)
}

/// Outcome of a norm-argument check: hypotheses, then the conclusion.
#[derive(Clone, Debug, Serialize)]
pub struct NormArgReport {
    pub theorem: String,
    pub hypotheses: bool,
    pub failed_hypothesis: Option<String>,
    pub conclusion: bool,
    pub j_order: usize,
    pub h_order: usize,
}

impl NormArgReport {
    /// The implication `hypotheses => conclusion`.
    pub fn holds(&self) -> bool {
        !self.hypotheses || self.conclusion
    }
}

fn join_all(degree: usize, coll: &[Group]) -> Group {
    let gens = coll.iter().flat_map(|a| a.gens().iter().cloned()).collect();
    Group::generate(degree, gens).expect("uncapped closure")
}

fn check_collection(act: &Action, s: &Group, coll: &[Group]) -> Result<()> {
    if coll.is_empty() {
        return Err(Error::precondition("collection is empty"));
    }
    if !s.is_subgroup_of(act.group()) || act.group().sylow(act.module().prime()).order() != s.order() {
        return Err(Error::precondition("S is not a Sylow subgroup"));
    }
    if coll.iter().any(|a| !a.is_subgroup_of(s)) {
        return Err(Error::precondition("collection is not inside S"));
    }
    Ok(())
}

/// `J = <coll>` weakly closed and, for `A ∈ coll` and Sylow `S^g` not
/// containing `A`, `N_{A ∩ S^g}^A = 1` on each composition factor; then
/// `C_D(N_G(J)) = C_D(G)` is evaluated.
pub fn check_glawc(act: &Action, s: &Group, coll: &[Group]) -> Result<NormArgReport> {
    check_collection(act, s, coll)?;
    let g = act.group();
    let d = act.module();
    let j = join_all(g.degree(), coll);
    let n = g.normalizer(&j);
    let mut failed = None;
    if !g.is_weakly_closed(&j, s) {
        failed = Some("J is not weakly closed in S".to_string());
    }
    if failed.is_none() {
        let factors = composition_factors(act);
        'outer: for sg in g.conjugates(s) {
            for a in coll {
                if a.is_subgroup_of(&sg) {
                    continue;
                }
                let a0 = a.intersection(&sg);
                for (lo, hi) in &factors {
                    if !norm_trivial_on_factor(act, &a0, a, lo, hi)? {
                        failed = Some(format!("norm from a subgroup of order {} is nontrivial on a factor", a0.order()));
                        break 'outer;
                    }
                }
            }
        }
    }
    let conclusion = act.fixed_points(&n).equals(d, &act.fixed_points(g));
    Ok(NormArgReport {
        theorem: "C_D(N_G(J)) = C_D(G)".into(),
        hypotheses: failed.is_none(),
        failed_hypothesis: failed,
        conclusion,
        j_order: j.order(),
        h_order: n.order(),
    })
}

/// Which form of the `p = 2` norm condition to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NormCondition {
    /// For `A ∈ coll` and `A` not in `H^g`: `N_{A ∩ H^g}^A = 1` on `V`.
    Members,
    /// For `J` not in `H^g`: `N_{J ∩ H^g}^J = 1` on `V`.
    Generated,
}

/// The `p = 2` variant with `V = Ω_1(D)` and `N_G(J) <= H`; evaluates
/// `C_D(H) = C_D(G)`.
pub fn check_glawc2(act: &Action, s: &Group, coll: &[Group], h: &Group, cond: NormCondition) -> Result<NormArgReport> {
    check_collection(act, s, coll)?;
    let g = act.group();
    let d = act.module();
    if d.prime() != 2 {
        return Err(Error::precondition("this form is for p = 2"));
    }
    if !h.is_subgroup_of(g) {
        return Err(Error::NotSubgroup("H is not a subgroup of G".into()));
    }
    let j = join_all(g.degree(), coll);
    let v = d.omega1();
    let mut failed = None;
    if !g.is_weakly_closed(&j, s) {
        failed = Some("J is not weakly closed in S".to_string());
    } else if !g.normalizer(&j).is_subgroup_of(h) {
        failed = Some("H does not contain N_G(J)".to_string());
    }
    if failed.is_none() {
        'outer: for hg in g.conjugates(h) {
            let tops: Vec<&Group> = match cond {
                NormCondition::Members => coll.iter().collect(),
                NormCondition::Generated => vec![&j],
            };
            for a in tops {
                if a.is_subgroup_of(&hg) {
                    continue;
                }
                let a0 = a.intersection(&hg);
                if !act.norm_vanishes(&a0, a, &v) {
                    failed = Some(format!("norm from a subgroup of order {} is nontrivial on V", a0.order()));
                    break 'outer;
                }
            }
        }
    }
    let conclusion = act.fixed_points(h).equals(d, &act.fixed_points(g));
    Ok(NormArgReport {
        theorem: "C_D(H) = C_D(G)".into(),
        hypotheses: failed.is_none(),
        failed_hypothesis: failed,
        conclusion,
        j_order: j.order(),
        h_order: h.order(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::PAbelianGroup;
    use crate::offenders::{natural_module_action, order_two_offenders};
    use crate::perm::Perm;

    fn group(degree: usize, gens: &[&str]) -> Group {
        Group::generate(degree, gens.iter().map(|s| Perm::parse(degree, s).unwrap()).collect()).unwrap()
    }

    /// `C_3` on `F_3^2` through a Jordan block.
    fn c3_jordan() -> Action {
        let g = group(3, &["(1 2 3)"]);
        Action::from_generator_matrices(&g, PAbelianGroup::elementary(3, 2), vec![vec![vec![1, 1], vec![0, 1]]]).unwrap()
    }

    #[test]
    fn quadnorm_odd() {
        let act = c3_jordan();
        assert!(act.is_quadratic(act.group()));
        let r = quadnorm_check(&act, act.group()).unwrap();
        assert_eq!(r.applicable, 1);
        assert!(r.violations.is_empty());
        // the norm from 1 is 1 + a + a^2 = (1 - a)^2
        let v = act.norm(&Group::trivial(3), &[1, 0]).unwrap();
        assert_eq!(v, vec![0, 0]);
    }

    #[test]
    fn quadnorm_two() {
        let act = natural_module_action(5).unwrap();
        let s = act.group().sylow(2);
        for a in subgroups_of_pgroup(&s, 2, 64).unwrap() {
            let r = quadnorm_check(&act, &a).unwrap();
            assert!(r.violations.is_empty(), "{:?}", r.violations);
        }
        let a = group(5, &["(1 2)", "(3 4)"]);
        assert!(act.is_quadratic(&a));
        assert!(act.norm_vanishes(&Group::trivial(5), &a, &act.module().whole()));
    }

    #[test]
    fn glawc_on_jordan_block() {
        let act = c3_jordan();
        let s = act.group().clone();
        let r = check_glawc(&act, &s, std::slice::from_ref(&s)).unwrap();
        assert!(r.hypotheses && r.conclusion);
    }

    #[test]
    fn glawc2_members_on_s5() {
        // the norm argument does not apply to solitary offenders
        let act = natural_module_action(5).unwrap();
        let s = act.group().sylow(2);
        let a2 = order_two_offenders(&act, &s);
        let j = join_all(5, &a2);
        let h = act.group().normalizer(&j);
        let r = check_glawc2(&act, &s, &a2, &h, NormCondition::Generated).unwrap();
        assert!(r.holds());
        assert!(!r.hypotheses);
        let trivial = check_glawc2(&act, &s, &a2, act.group(), NormCondition::Members).unwrap();
        assert!(trivial.hypotheses && trivial.conclusion);
    }

    #[test]
    fn factor_norms_match_module_norms() {
        let act = natural_module_action(5).unwrap();
        let d = act.module();
        let s = act.group().sylow(2);
        for a in subgroups_of_pgroup(&s, 2, 64).unwrap() {
            for a0 in subgroups_of_pgroup(&a, 2, 64).unwrap() {
                let whole = norm_trivial_on_factor(&act, &a0, &a, &d.trivial_subgroup(), &d.whole()).unwrap();
                assert_eq!(whole, act.norm_vanishes(&a0, &a, &d.whole()));
            }
        }
    }
}
