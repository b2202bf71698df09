//! Named check suites. Each suite evaluates conclusions of the lemmas on
//! concrete instances and reports one line per check.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::abelian::AbSubgroup;
use crate::error::{Error, Result};
use crate::fusion::{ConjugacyFunctor, FusionSystem, GeneralSetup, SubId};
use crate::group::Group;
use crate::lattice::{subgroups_of_pgroup, DEFAULT_PGROUP_CAP};
use crate::library::{alternating6, module_instance, setup_instance, MODULE_NAMES};
use crate::modaction::Action;
use crate::normarg::{check_glawc, check_glawc2, quadnorm_check, NormArgReport, NormCondition};
use crate::offenders::{
    best_offenders, is_best_offender, is_offender, is_semisolitary, is_solitary, natural_module_action,
    offender_score, order_two_offenders, replacement, solitary_decomposition, solitary_offenders, thompson_preimage,
    verify_decomposition, OffenderCollections,
};
use crate::orbitlim::{
    admissible_splittings, gamma_star, higher_limits, inclusion_normalize, locality_formula,
    restriction_injectivity_check, rigid_map, verify_les, LimitSetup, Splitting, Transport,
};
use crate::parse::Descriptor;
use crate::perm::Perm;
use crate::quotient::Quotient;

/// Suite names accepted by [`run_suite`].
pub const SUITE_NAMES: [&str; 11] = [
    "olijm",
    "quadnorm",
    "les",
    "normarg",
    "replacement",
    "nooveroffenders",
    "solitary",
    "wellplaced",
    "rigid",
    "oddvanish",
    "restinj",
];

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: &str) -> SuiteReport {
        SuiteReport { suite: suite.to_string(), checks: Vec::new() }
    }

    pub fn push(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), pass, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    fn absorb(&mut self, other: SuiteReport) {
        self.checks.extend(other.checks);
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Caps {
    pub cochains: usize,
    pub pgroup: usize,
}

impl Default for Caps {
    fn default() -> Caps {
        Caps { cochains: crate::orbitlim::DEFAULT_COCHAIN_CAP, pgroup: DEFAULT_PGROUP_CAP }
    }
}

/// Runs a suite on the shipped instances, or on the descriptor when given.
pub fn run_suite(name: &str, input: Option<&Descriptor>, order_cap: usize, caps: Caps) -> Result<SuiteReport> {
    let setups = |default: &[&str]| -> Result<Vec<(String, GeneralSetup)>> {
        match input {
            Some(d) => Ok(vec![("input".into(), d.setup(order_cap)?)]),
            None => default.iter().map(|n| Ok((n.to_string(), setup_instance(n)?))).collect(),
        }
    };
    let modules = |default: &[&str]| -> Result<Vec<(String, Action)>> {
        match input {
            Some(d) => Ok(vec![("input".into(), d.action(order_cap)?)]),
            None => default.iter().map(|n| Ok((n.to_string(), module_instance(n)?))).collect(),
        }
    };
    let mut report = SuiteReport::new(name);
    match name {
        "olijm" => {
            for (label, st) in setups(&["s4", "c2wrs3", "a6-v4a", "a6-v4b", "asl23"])? {
                report.absorb(olijm(&label, &st, caps)?);
            }
        }
        "quadnorm" => {
            for (label, act) in modules(&MODULE_NAMES)? {
                report.absorb(quadnorm(&label, &act, caps)?);
            }
        }
        "les" => match input {
            Some(d) if d.y.is_none() => {
                let p = d.prime.ok_or_else(|| Error::precondition("les needs a prime"))?;
                let fs = FusionSystem::new(&d.group(order_cap)?, p, caps.pgroup)?;
                report.absorb(les_centric("input", &fs, caps)?);
            }
            _ => {
                for (label, st) in setups(&["s4", "a6-v4a", "a6-v4b", "c2wrs3"])? {
                    report.absorb(les_setup(&label, &st, caps)?);
                }
                if input.is_none() {
                    let fs = FusionSystem::new(&alternating6(), 2, caps.pgroup)?;
                    report.absorb(les_centric("a6", &fs, caps)?);
                }
            }
        },
        "normarg" => {
            let names = norm_instance_names();
            let r = normarg(&modules(&names)?, if input.is_some() { 1 } else { 10 })?;
            report.absorb(r);
        }
        "replacement" => {
            for (label, act) in modules(&MODULE_NAMES)? {
                report.absorb(replacement_suite(&label, &act, caps)?);
            }
        }
        "nooveroffenders" => {
            for (label, act) in modules(&TWO_LOCAL_NAMES)? {
                report.absorb(nooveroffenders(&label, &act, caps)?);
            }
        }
        "solitary" => match input {
            Some(d) => report.absorb(solitary_single("input", &d.action(order_cap)?)?),
            None => report.absorb(solitary_library()?),
        },
        "wellplaced" => {
            let systems: Vec<(String, FusionSystem)> = match input {
                Some(d) => {
                    let p = d.prime.ok_or_else(|| Error::precondition("wellplaced needs a prime"))?;
                    vec![("input".into(), FusionSystem::new(&d.group(order_cap)?, p, caps.pgroup)?)]
                }
                None => vec![
                    ("s4".into(), FusionSystem::new(&crate::library::symmetric4(), 2, caps.pgroup)?),
                    ("a6".into(), FusionSystem::new(&alternating6(), 2, caps.pgroup)?),
                ],
            };
            for (label, fs) in &systems {
                report.absorb(wellplaced(label, fs, None)?);
            }
            if input.is_none() {
                let st = setup_instance("s4")?;
                let fs = setup_fusion(&st, caps)?;
                report.absorb(wellplaced("s4-setup", &fs, Some(&st))?);
            }
        }
        "rigid" => {
            let fs = match input {
                Some(d) => {
                    let p = d.prime.ok_or_else(|| Error::precondition("rigid needs a prime"))?;
                    FusionSystem::new(&d.group(order_cap)?, p, caps.pgroup)?
                }
                None => FusionSystem::new(&alternating6(), 2, caps.pgroup)?,
            };
            report.absorb(rigid("centric", &fs, caps)?);
        }
        "oddvanish" => {
            for (label, st) in setups(&["asl23"])? {
                report.absorb(oddvanish(&label, &st, caps)?);
            }
        }
        "restinj" => {
            for (label, st) in setups(&["s4", "c2wrs3", "a6-v4a"])? {
                report.absorb(restinj(&label, &st, caps)?);
            }
        }
        other => return Err(Error::precondition(format!("unknown suite {other:?}; known: {}", SUITE_NAMES.join(", ")))),
    }
    Ok(report)
}

/// The fusion system of a setup on its own Sylow subgroup.
pub fn setup_fusion(st: &GeneralSetup, caps: Caps) -> Result<FusionSystem> {
    FusionSystem::with_sylow(&st.gamma, &st.s, st.p, caps.pgroup.max(st.s.order()))
}

/// Invariant factors of a finite abelian `p`-group, ascending.
pub fn abelian_invariants(g: &Group, p: u64) -> Vec<u128> {
    let mut counts = vec![0u32];
    let mut q = 1u64;
    loop {
        q *= p;
        let n = g.elements().iter().filter(|x| q.is_multiple_of(x.order())).count();
        let log = (n as f64).log(p as f64).round() as u32;
        counts.push(log);
        if n == g.order() {
            break;
        }
    }
    // at least i-th powers: counts[i] - counts[i-1] cyclic factors of order >= p^i
    let top = counts.len() - 1;
    let mut out = Vec::new();
    for i in 1..=top {
        let at_least_i = counts[i] - counts[i - 1];
        let at_least_next = if i < top { counts[i + 1] - counts[i] } else { 0 };
        for _ in 0..(at_least_i - at_least_next) {
            out.push((p as u128).pow(i as u32));
        }
    }
    out.sort_unstable();
    out
}

fn sorted(mut v: Vec<u128>) -> Vec<u128> {
    v.sort_unstable();
    v
}

fn overgroups_of_y(st: &GeneralSetup, fs: &FusionSystem) -> Result<BTreeSet<SubId>> {
    let y = fs.id_of(&st.y).ok_or_else(|| Error::precondition("Y is not a subgroup of S"))?;
    Ok(fs.overgroups(y).into_iter().collect())
}

/// `L^0(F; S(S)_{>=Y}) ≅ C_{Z(Y)}(Γ)` and `L^1 = L^2 = 0`.
pub fn olijm(label: &str, st: &GeneralSetup, caps: Caps) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("olijm");
    let fs = setup_fusion(st, caps)?;
    let u = overgroups_of_y(st, &fs)?;
    let lim = higher_limits(&fs, &u, 2, caps.cochains)?;
    let c = centralized_part(st);
    let expect = abelian_invariants(&c, st.p);
    let got = sorted(lim[0].invariant_factors.clone());
    r.push(format!("{label}: L^0 ≅ C_D(Γ)"), got == expect, format!("L^0 {got:?}, C_D(Γ) {expect:?}"));
    for k in 1..=2 {
        r.push(
            format!("{label}: L^{k} = 0"),
            lim[k].is_zero(),
            format!("invariant factors {:?}", lim[k].invariant_factors),
        );
    }
    Ok(r)
}

/// `C_D(Γ) = D ∩ Z(Γ)` as a subgroup of `Γ`.
fn centralized_part(st: &GeneralSetup) -> Group {
    st.d.intersection(&st.gamma.center())
}

/// Every subgroup of the Sylow subgroup, against each part of the norm lemma.
pub fn quadnorm(label: &str, act: &Action, caps: Caps) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("quadnorm");
    let d = act.module();
    if !d.is_elementary() {
        return Ok(r);
    }
    let s = act.group().sylow(d.prime());
    let mut applicable = 0;
    let mut violations = Vec::new();
    for a in subgroups_of_pgroup(&s, d.prime(), caps.pgroup.max(s.order()))? {
        let q = quadnorm_check(act, &a)?;
        applicable += q.applicable;
        violations.extend(q.violations);
    }
    r.push(
        format!("{label}: norms vanish where the lemma applies"),
        violations.is_empty(),
        format!("{applicable} applicable pairs; violations {violations:?}"),
    );
    Ok(r)
}

/// Exactness of the sequence for each splitting of `S(S)_{>=Y}`, and the
/// locality formula for its lower part.
pub fn les_setup(label: &str, st: &GeneralSetup, caps: Caps) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("les");
    let fs = setup_fusion(st, caps)?;
    let u = overgroups_of_y(st, &fs)?;
    let splits = admissible_splittings(&fs, &u);
    r.push(format!("{label}: has splittings"), !splits.is_empty(), format!("{} splittings", splits.len()));
    for (i, sp) in splits.iter().enumerate() {
        les_one(&mut r, &format!("{label} split {i}"), &fs, sp, caps)?;
        let f = locality_formula(st, &fs, &sp.r, caps.cochains)?;
        r.push(
            format!("{label} split {i}: |C_D(Γ*)| = |C_D(Γ)||L^1(R)|"),
            f.holds(),
            format!("{} = {} * {}", f.fixed_on_gamma_star, f.fixed_on_gamma, f.limit_order),
        );
    }
    Ok(r)
}

fn les_one(r: &mut SuiteReport, label: &str, fs: &FusionSystem, sp: &Splitting, caps: Caps) -> Result<()> {
    let rep = verify_les(fs, sp, 2, caps.cochains)?;
    let bad: Vec<&str> = rep.nodes.iter().filter(|n| !n.exact).map(|n| n.label.as_str()).collect();
    r.push(format!("{label}: exact through degree 2"), rep.is_exact(), format!("{} nodes; inexact {bad:?}", rep.nodes.len()));
    Ok(())
}

/// Exactness for each splitting of the centric subgroups.
pub fn les_centric(label: &str, fs: &FusionSystem, caps: Caps) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("les");
    let c: BTreeSet<SubId> = fs.centrics().into_iter().collect();
    let splits = admissible_splittings(fs, &c);
    r.push(format!("{label}: has splittings"), !splits.is_empty(), format!("{} splittings", splits.len()));
    for (i, sp) in splits.iter().enumerate() {
        les_one(&mut r, &format!("{label} centric split {i}"), fs, sp, caps)?;
    }
    Ok(r)
}

/// Module instances for the norm suite.
pub fn norm_instance_names() -> Vec<&'static str> {
    MODULE_NAMES.to_vec()
}

/// One attempt at a norm argument on an instance.
#[derive(Clone, Debug, Serialize)]
pub struct NormAttempt {
    pub instance: String,
    pub collection: String,
    pub report: NormArgReport,
    /// `H < G`.
    pub proper: bool,
}

fn join_all(degree: usize, coll: &[Group]) -> Group {
    Group::generate(degree, coll.iter().flat_map(|a| a.gens().iter().cloned()).collect()).expect("uncapped closure")
}

fn dedup(v: Vec<Group>) -> Vec<Group> {
    let mut seen = HashSet::new();
    v.into_iter().filter(|g| seen.insert(g.clone())).collect()
}

/// The norm arguments whose collections are nonempty on `act`.
pub fn norm_attempts(label: &str, act: &Action) -> Result<Vec<NormAttempt>> {
    let g = act.group();
    let p = act.module().prime();
    let s = g.sylow(p);
    let reports = best_offenders(act)?;
    let coll = OffenderCollections::from_reports(&reports);
    let in_s = |v: &[Group]| -> Vec<Group> { v.iter().filter(|a| a.is_subgroup_of(&s)).cloned().collect() };
    let mut out = Vec::new();
    let mut push = |name: &str, report: NormArgReport| {
        let proper = report.h_order < g.order();
        out.push(NormAttempt { instance: label.into(), collection: name.into(), report, proper });
    };
    if p == 2 {
        let mut big = in_s(&coll.minimal_ge4);
        big.extend(in_s(&coll.minimal_over));
        let big = dedup(big);
        if !big.is_empty() {
            let h = g.normalizer(&join_all(g.degree(), &big));
            push("minimal offenders of order >= 4 and minimal over-offenders", check_glawc2(act, &s, &big, &h, NormCondition::Members)?);
        }
        if coll.over.is_empty() {
            let b: Vec<Group> = reports.iter().filter(|r| r.size == 2 && !r.flags.solitary).map(|r| r.subgroup.clone()).collect();
            let b = in_s(&b);
            let a2 = in_s(&coll.order_two);
            if !b.is_empty() {
                let h = g.normalizer(&join_all(g.degree(), &b));
                push("order-2 offenders, H = N_G(J_B(S))", check_glawc2(act, &s, &a2, &h, NormCondition::Generated)?);
            }
        }
    }
    let minimal = in_s(&coll.minimal);
    if !minimal.is_empty() {
        push("minimal best offenders", check_glawc(act, &s, &minimal)?);
    }
    Ok(out)
}

/// Conclusions hold whenever hypotheses are verified, on at least `need`
/// instances with `H < G`; the collections of the `p = 2` lemmas satisfy
/// their norm conditions.
pub fn normarg(instances: &[(String, Action)], need: usize) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("normarg");
    let mut verified = Vec::new();
    for (label, act) in instances {
        if !act.module().is_elementary() && act.module().prime() == 2 {
            continue;
        }
        for at in norm_attempts(label, act)? {
            let rep = &at.report;
            r.push(
                format!("{label}: {} ({})", rep.theorem, at.collection),
                rep.holds(),
                format!(
                    "hypotheses {}, conclusion {}, |J| {}, |H| {}{}",
                    rep.hypotheses,
                    rep.conclusion,
                    rep.j_order,
                    rep.h_order,
                    rep.failed_hypothesis.as_ref().map(|f| format!(", failed: {f}")).unwrap_or_default()
                ),
            );
            if at.collection.starts_with("minimal offenders of order") || at.collection.starts_with("order-2") {
                r.push(format!("{label}: norm condition for {}", at.collection), rep.hypotheses, rep.failed_hypothesis.clone().unwrap_or_default());
            }
            if rep.hypotheses && at.proper && !verified.contains(label) {
                verified.push(label.clone());
            }
        }
    }
    r.push(
        format!("at least {need} instances with verified hypotheses and H < G"),
        verified.len() >= need,
        format!("{} instances: {}", verified.len(), verified.join(", ")),
    );
    Ok(r)
}

/// Nontrivial subgroups `B <= A`, minimal subject to
/// `|B||C_D(B)| >= |A||C_D(A)|`, by brute force.
pub fn minimal_replacements(act: &Action, a: &Group, caps: Caps) -> Result<Vec<Group>> {
    let p = act.module().prime();
    let score = offender_score(act, a);
    let good: Vec<Group> = subgroups_of_pgroup(a, p, caps.pgroup.max(a.order()))?
        .into_iter()
        .filter(|b| !b.is_trivial() && offender_score(act, b) >= score)
        .collect();
    Ok(good.iter().filter(|b| !good.iter().any(|c| c.order() < b.order() && c.is_subgroup_of(b))).cloned().collect())
}

/// For every nontrivial offender inside the Sylow subgroup, the extracted
/// subgroup is a quadratic best offender and is one of the brute-force
/// minimal replacements, each of which is also a quadratic best offender.
pub fn replacement_suite(label: &str, act: &Action, caps: Caps) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("replacement");
    let p = act.module().prime();
    let s = act.group().sylow(p);
    let mut count = 0;
    let mut bad = Vec::new();
    for a in subgroups_of_pgroup(&s, p, caps.pgroup.max(s.order()))? {
        if a.is_trivial() || !is_offender(act, &a) {
            continue;
        }
        count += 1;
        let b = replacement(act, &a)?;
        let oracle = minimal_replacements(act, &a, caps)?;
        let ok = b.is_subgroup_of(&a)
            && is_best_offender(act, &b)?
            && act.is_quadratic(&b)
            && oracle.contains(&b)
            && oracle.iter().map(|c| Ok(is_best_offender(act, c)? && act.is_quadratic(c))).collect::<Result<Vec<bool>>>()?.iter().all(|&x| x);
        if !ok {
            bad.push(format!("A = {:?}", a.gens().iter().map(|g| g.to_string()).collect::<Vec<_>>()));
        }
    }
    r.push(format!("{label}: replacements are quadratic best offenders"), bad.is_empty(), format!("{count} offenders; failures {bad:?}"));
    Ok(r)
}

/// Instances at `p = 2` for the over-offender and solitary lemmas.
pub const TWO_LOCAL_NAMES: [&str; 10] = [
    "s3-natural",
    "s5-natural",
    "s7-natural",
    "sl32-natural",
    "s3xs5",
    "s3-natural-plus-trivial",
    "s6-natural",
    "a5-natural",
    "s4-even-subsets",
    "s4-permutation",
];

fn gens_of(g: &Group) -> String {
    let v: Vec<String> = g.gens().iter().map(|x| x.to_string()).collect();
    format!("<{}>", v.join(", "))
}

/// Conclusions (a)-(d) when there are no over-offenders, with the order-2
/// remark, the Sylow-relative description of solitary offenders and the
/// two lemmas on semisolitary offenders.
pub fn nooveroffenders(label: &str, act: &Action, caps: Caps) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("nooveroffenders");
    let d = act.module();
    if d.prime() != 2 || !act.is_faithful() {
        return Err(Error::precondition("needs a faithful action at p = 2"));
    }
    let g = act.group();
    let s = g.sylow(2);
    let reports = best_offenders(act)?;
    let a2: Vec<Group> = reports.iter().filter(|x| x.size == 2).map(|x| x.subgroup.clone()).collect();
    let over: Vec<&Group> = reports.iter().filter(|x| x.flags.over).map(|x| &x.subgroup).collect();

    // order-2 members have |D : C_D(A)| = 2; over-offenders have order >= 4
    let small = a2.iter().all(|a| d.order_log() - act.fixed_points(a).log_order(d) == 1) && over.iter().all(|a| a.order() >= 4);
    r.push(format!("{label}: order-2 members are transvection groups"), small, format!("{} of order 2", a2.len()));
    if !over.is_empty() {
        r.push(format!("{label}: over-offenders present, lemma not applicable"), true, format!("{} over-offenders", over.len()));
        return Ok(r);
    }
    let whole = d.whole();
    let (mut fa, mut fb, mut fd) = (Vec::new(), Vec::new(), Vec::new());
    for (i, a) in a2.iter().enumerate() {
        for b in &a2[i + 1..] {
            let l = a.join(b);
            let commute = l.is_abelian();
            if commute {
                let distinct = !act.fixed_points(a).equals(d, &act.fixed_points(b));
                if !distinct || !act.is_quadratic(&l) {
                    fa.push(format!("{} {}", gens_of(a), gens_of(b)));
                }
            }
            if l.is_p_group(2) && !commute {
                fb.push(format!("{} {}", gens_of(a), gens_of(b)));
            }
            if !commute {
                let dl = act.commutator(&whole, &l);
                let cl = act.fixed_points(&l);
                let ok = l.order() == 6
                    && dl.log_order(d) == 2
                    && dl.order(d) == 4
                    && is_elementary_sub(act, &dl)
                    && dl.meet(d, &cl).is_trivial(d)
                    && dl.log_order(d) + cl.log_order(d) == d.order_log();
                if !ok {
                    fd.push(format!("{} {}", gens_of(a), gens_of(b)));
                }
            }
        }
    }
    let pairs = a2.len() * a2.len().saturating_sub(1) / 2;
    r.push(format!("{label}: (a) commuting pairs"), fa.is_empty(), format!("{pairs} pairs; failures {fa:?}"));
    r.push(format!("{label}: (b) 2-groups are abelian"), fb.is_empty(), format!("failures {fb:?}"));
    let a2s: Vec<Group> = a2.iter().filter(|a| a.is_subgroup_of(&s)).cloned().collect();
    let j = join_all(g.degree(), &a2s);
    let elem = j.is_abelian() && j.elements().iter().all(|x| x.order() <= 2);
    r.push(format!("{label}: (c) J elementary abelian"), elem, format!("|J| = {}", j.order()));
    r.push(format!("{label}: (d) non-commuting pairs generate S3"), fd.is_empty(), format!("failures {fd:?}"));

    // solitary relative to S, against membership in T_D(G) taken over all Sylow subgroups
    let sylows = g.conjugates(&s);
    let mut in_t = Vec::new();
    for a in &a2 {
        let mut found = false;
        for sg in sylows.iter().filter(|sg| a.is_subgroup_of(sg)) {
            if is_solitary(act, a, sg)?.is_some() {
                found = true;
                break;
            }
        }
        if found && a.is_subgroup_of(&s) {
            in_t.push(a.clone());
        }
    }
    let mut rel = Vec::new();
    for a in &a2s {
        if is_solitary(act, a, &s)?.is_some() {
            rel.push(a.clone());
        }
    }
    r.push(format!("{label}: T_D(G) ∩ S is the set solitary relative to S"), in_t == rel, format!("{} solitary in S", rel.len()));

    let semi = semisolitary_in(act, &a2s, &s)?;
    r.push(format!("{label}: solitary implies semisolitary"), rel.iter().all(|t| semi.contains(t)), format!("{} semisolitary in S", semi.len()));
    ssperm(&mut r, label, act, &semi, &reports.iter().map(|x| x.subgroup.clone()).collect::<Vec<_>>())?;
    sspermlocal(&mut r, label, act, &s, &reports.iter().map(|x| x.subgroup.clone()).collect::<Vec<_>>(), caps)?;
    Ok(r)
}

fn is_elementary_sub(act: &Action, u: &AbSubgroup) -> bool {
    let d = act.module();
    u.generators(d).iter().all(|v| d.element_order_log(v) <= 1)
}

fn semisolitary_in(act: &Action, a2: &[Group], p: &Group) -> Result<Vec<Group>> {
    let mut out = Vec::new();
    for t in a2.iter().filter(|t| t.is_subgroup_of(p)) {
        if is_semisolitary(act, t, p)?.is_some() {
            out.push(t.clone());
        }
    }
    Ok(out)
}

fn conj_orbit(t: &Group, a: &Group) -> Vec<Group> {
    let mut orbit: Vec<Group> = Vec::new();
    for x in a.elements() {
        let c = t.conjugate(x);
        if !orbit.contains(&c) {
            orbit.push(c);
        }
    }
    orbit
}

/// Direct product of the commutators, and the orbit dichotomy for best
/// offenders permuting the semisolitary set.
fn ssperm(r: &mut SuiteReport, label: &str, act: &Action, semi: &[Group], offenders: &[Group]) -> Result<()> {
    let d = act.module();
    let whole = d.whole();
    let ys: Vec<AbSubgroup> = semi.iter().map(|t| act.commutator(&whole, t)).collect();
    let span = ys.iter().fold(d.trivial_subgroup(), |acc, y| acc.join(d, y));
    let direct = ys.iter().all(|y| y.log_order(d) == 1) && span.log_order(d) as usize == ys.len();
    r.push(format!("{label}: commutators of semisolitary members form a direct product"), direct, format!("{} members", semi.len()));
    let mut bad = Vec::new();
    let mut orbits = 0;
    for a in offenders {
        let mut done: Vec<Group> = Vec::new();
        for t in semi {
            if done.contains(t) {
                continue;
            }
            let orbit = conj_orbit(t, a);
            done.extend(orbit.iter().cloned());
            if !orbit.iter().all(|o| semi.contains(o)) {
                continue;
            }
            orbits += 1;
            let yo: Vec<AbSubgroup> = orbit.iter().map(|o| act.commutator(&whole, o)).collect();
            let span = yo.iter().fold(d.trivial_subgroup(), |acc, y| acc.join(d, y));
            let b_elems: Vec<Perm> =
                a.elements().iter().filter(|x| span.generators(d).iter().all(|v| d.is_zero(&act.commutator_vector(v, x)))).cloned().collect();
            let b = a.subgroup(b_elems)?;
            let ok = if b.order() == a.order() {
                true
            } else {
                let ca = act.fixed_points(a).log_order(d);
                let cb = act.fixed_points(&b).log_order(d);
                orbit.len() == 2
                    && a.order() == 2 * b.order()
                    && cb == ca + 1
                    && a.elements().iter().filter(|x| !b.contains(x)).all(|x| orbit[0].conjugate(x) == orbit[1])
            };
            if !ok {
                bad.push(format!("A = {}, orbit of {}", gens_of(a), gens_of(t)));
            }
        }
    }
    r.push(format!("{label}: transitive offenders move at most two"), bad.is_empty(), format!("{orbits} orbits; failures {bad:?}"));
    Ok(())
}

/// Best offenders normalizing `P <= S` normalize each member semisolitary
/// relative to `P`.
fn sspermlocal(r: &mut SuiteReport, label: &str, act: &Action, s: &Group, offenders: &[Group], caps: Caps) -> Result<()> {
    let mut bad = Vec::new();
    let mut count = 0;
    for p in subgroups_of_pgroup(s, 2, caps.pgroup.max(s.order()))? {
        let a2p = order_two_offenders(act, &p);
        if a2p.is_empty() {
            continue;
        }
        let semi = semisolitary_in(act, &a2p, &p)?;
        if semi.is_empty() {
            continue;
        }
        for a in offenders.iter().filter(|a| a.gens().iter().all(|x| p.conjugate(x) == p)) {
            count += 1;
            for t in &semi {
                if a.gens().iter().any(|x| t.conjugate(x) != *t) {
                    bad.push(format!("P = {}, A = {}, T = {}", gens_of(&p), gens_of(a), gens_of(t)));
                }
            }
        }
    }
    r.push(format!("{label}: normalizing offenders fix semisolitary members"), bad.is_empty(), format!("{count} pairs; failures {bad:?}"));
    Ok(())
}

fn transposition_subgroups(m: usize) -> Vec<Group> {
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let mut im: Vec<u32> = (0..m as u32).collect();
            im.swap(i, j);
            out.push(Group::generate(m, vec![Perm::from_images(im).expect("swap")]).expect("order 2"));
        }
    }
    out.sort();
    out
}

/// Solitary offenders of the natural modules, their absence for `SL_3(2)`
/// and even degree, and the decomposition of `S_3 × S_5`.
pub fn solitary_library() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("solitary");
    for m in [3, 5, 7] {
        let act = natural_module_action(m)?;
        let mut sol = solitary_offenders(&act)?;
        sol.sort();
        let expect = transposition_subgroups(m);
        r.push(format!("S{m} natural: solitary offenders are the transpositions"), sol == expect, format!("{} solitary, {} transpositions", sol.len(), expect.len()));
    }
    for name in ["sl32-natural", "s6-natural"] {
        let act = module_instance(name)?;
        let best = best_offenders(&act)?;
        let sol = solitary_offenders(&act)?;
        r.push(format!("{name}: best offenders, none solitary"), !best.is_empty() && sol.is_empty(), format!("{} best offenders, {} solitary", best.len(), sol.len()));
    }
    let act = module_instance("s3xs5")?;
    let dec = solitary_decomposition(&act)?;
    let d = act.module();
    let mut degrees = dec.degrees();
    degrees.sort_unstable();
    let sizes: Vec<u32> = dec.factors.iter().map(|f| f.v.log_order(d)).collect();
    let exact = verify_decomposition(&act, &dec).is_ok();
    r.push(
        "S3 × S5: decomposition into S3 and S5 with D = V1 × V2",
        degrees == [3, 5] && dec.residue.is_trivial(d) && exact && sizes.iter().sum::<u32>() == d.order_log(),
        format!("degrees {degrees:?}, factor ranks {sizes:?}, residue rank {}", dec.residue.log_order(d)),
    );
    Ok(r)
}

/// Solitary offenders and, when defined, the decomposition for one action.
pub fn solitary_single(label: &str, act: &Action) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("solitary");
    let sol = solitary_offenders(act)?;
    let sols: Vec<String> = sol.iter().map(gens_of).collect();
    let rel: bool = sol.iter().all(|t| t.order() == 2);
    r.push(format!("{label}: solitary offenders have order 2"), rel, format!("{} solitary: {}", sol.len(), sols.join(" ")));
    match solitary_decomposition(act) {
        Ok(dec) => {
            let ok = verify_decomposition(act, &dec).is_ok();
            r.push(format!("{label}: decomposition verifies"), ok, format!("degrees {:?}", dec.degrees()));
        }
        Err(Error::Hypothesis(msg)) => r.push(format!("{label}: decomposition not applicable"), true, msg),
        Err(e) => return Err(e),
    }
    Ok(r)
}

/// Conjugacy functors on a fusion system, and their well-placed subgroups
/// as conjugation families.
pub fn wellplaced(label: &str, fs: &FusionSystem, setup: Option<&GeneralSetup>) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("wellplaced");
    let mut functors = vec![ConjugacyFunctor::identity(fs), ConjugacyFunctor::center(fs), ConjugacyFunctor::thompson(fs)];
    // J_A for A the F-class of the elementary abelian subgroups of maximal rank
    let elem: Vec<&Group> = fs.subgroups().iter().filter(|h| h.is_abelian() && h.elements().iter().all(|x| x.order() <= fs.prime())).collect();
    let top = elem.iter().map(|h| h.order()).max().unwrap_or(1);
    let coll: Vec<Group> = elem.iter().filter(|h| h.order() == top).map(|h| (*h).clone()).collect();
    functors.push(ConjugacyFunctor::generated_by(fs, "J_A(maximal elementary abelian)", &coll));
    if let Some(st) = setup {
        // J_A(P, D) for A the best offenders of Γ / C_Γ(D)
        let (quo, act) = st.action.faithful_quotient()?;
        let reports = best_offenders(&act)?;
        let best: Vec<Group> = reports.into_iter().map(|x| x.subgroup).collect();
        let w = ConjugacyFunctor::from_fn(fs, "J_A(P, D)", |p| {
            let j = thompson_preimage(&best, p, &quo, &act).unwrap_or_else(|_| p.clone());
            if j.is_trivial() { p.clone() } else { j }
        })?;
        functors.push(w);
    }
    for w in &functors {
        let valid = w.validate(fs);
        if let Err(e) = valid {
            r.push(format!("{label}: {} is a conjugacy functor", w.name), false, e.to_string());
            continue;
        }
        let wp = fs.well_placed(w);
        let defect = fs.conjugation_family_defect(&wp);
        r.push(
            format!("{label}: well-placed subgroups for {} form a conjugation family", w.name),
            defect.is_none(),
            format!("{} well-placed; first ungenerated subgroup {:?}", wp.len(), defect.map(|x| gens_of(fs.subgroup(x)))),
        );
    }
    Ok(r)
}

/// Rigid maps of all nonzero classes of `L^1` over the centric subgroups.
pub fn rigid(label: &str, fs: &FusionSystem, caps: Caps) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("rigid");
    let c: BTreeSet<SubId> = fs.centrics().into_iter().collect();
    let setup = LimitSetup::new(fs, &c, true)?;
    let cx = setup.complex(2, caps.cochains)?;
    let lim = higher_limits(fs, &c, 1, caps.cochains)?;
    let (orders, witnesses) = (&lim[1].invariant_factors, &lim[1].witnesses);
    let total: u128 = orders.iter().product();
    let modulus = cx.ring().modulus();
    r.push(format!("{label}: L^1 computed"), true, format!("invariant factors {orders:?}"));
    let family = fs.well_placed(&ConjugacyFunctor::identity(fs));
    for idx in 0..total {
        let mut rest = idx;
        let mut flat = vec![0u64; cx.dimension(1)];
        for (o, w) in orders.iter().zip(witnesses) {
            let k = (rest % o) as u64;
            rest /= o;
            for (f, x) in flat.iter_mut().zip(cx.flatten(w)) {
                *f = (*f + k * x) % modulus;
            }
        }
        let t = Transport::new(&cx, &cx.cochain(1, &flat))?;
        let tn = inclusion_normalize(&t)?;
        let tau = rigid_map(fs, &tn)?;
        let name = format!("{label} class {idx}");
        r.push(format!("{name}: inclusion-normalized"), tn.is_inclusion_normalized(), "");
        r.push(format!("{name}: identity on S"), tau.is_identity_on(fs.sylow().elements()), "");
        r.push(format!("{name}: bijection of Γ*"), tau.is_bijection(), format!("|Γ*| = {}", tau.locality.elements().len()));
        let defect = tau.multiplicativity_defect(fs, 3);
        r.push(
            format!("{name}: multiplicative on chains of length <= 3"),
            defect.is_none(),
            defect.map(|v| v.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" ")).unwrap_or_default(),
        );
        let mut missing = Vec::new();
        for &q in &c {
            if !fs.is_fully_normalized(q) {
                continue;
            }
            let ok = tau
                .local_conjugator(fs, q)
                .is_some_and(|z| fs.sylow().normalizer(fs.subgroup(q)).center().contains(&z));
            if !ok {
                missing.push(gens_of(fs.subgroup(q)));
            }
        }
        r.push(format!("{name}: locally conjugation by z ∈ Z(N_S(Q))"), missing.is_empty(), format!("failures {missing:?}"));
        // identity on the normalizers of a conjugation family forces identity
        let on_family = family.iter().filter(|q| c.contains(q)).all(|&q| tau.is_identity_on(fs.gamma().normalizer(fs.subgroup(q)).elements()));
        r.push(
            format!("{name}: identity on family normalizers iff identity"),
            on_family == tau.is_identity() && (idx == 0) == tau.is_identity(),
            format!("identity {}", tau.is_identity()),
        );
    }
    Ok(r)
}

/// `R = {Q >= Y : J_A(Q, D) = Y}` for the best offenders of `Γ / C_Γ(D)`,
/// as subgroup ids of `fs`.
pub fn offender_interval(st: &GeneralSetup, fs: &FusionSystem) -> Result<BTreeSet<SubId>> {
    let (quo, act) = st.action.faithful_quotient()?;
    let best: Vec<Group> = best_offenders(&act)?.into_iter().map(|x| x.subgroup).collect();
    let u = overgroups_of_y(st, fs)?;
    let mut out = BTreeSet::new();
    for q in u {
        if jad(&best, fs.subgroup(q), &quo, &act)? == st.y {
            out.insert(q);
        }
    }
    Ok(out)
}

fn jad(best: &[Group], q: &Group, quo: &Quotient, act: &Action) -> Result<Group> {
    thompson_preimage(best, q, quo, act)
}

/// The vanishing of `L^k(F;R)` at an odd prime for the offender interval.
pub fn oddvanish(label: &str, st: &GeneralSetup, caps: Caps) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("oddvanish");
    if st.p == 2 {
        return Err(Error::precondition("oddvanish needs an odd prime"));
    }
    let fs = setup_fusion(st, caps)?;
    let rr = offender_interval(st, &fs)?;
    let iv = fs.validate_interval(&rr);
    r.push(
        format!("{label}: R is a nonempty F-invariant interval"),
        !rr.is_empty() && iv.is_interval && iv.f_invariant,
        format!("|R| = {}", rr.len()),
    );
    let (quo, act) = st.action.faithful_quotient()?;
    let best: Vec<Group> = best_offenders(&act)?.into_iter().map(|x| x.subgroup).collect();
    r.push(format!("{label}: offenders exist"), !best.is_empty(), format!("{} best offenders", best.len()));
    let mut closed = true;
    for q in overgroups_of_y(st, &fs)? {
        let j = jad(&best, fs.subgroup(q), &quo, &act)?;
        let jid = fs.id_of(&j).ok_or_else(|| Error::internal("J outside S"))?;
        closed &= rr.contains(&q) == rr.contains(&jid);
    }
    r.push(format!("{label}: Q ∈ R iff J(Q) ∈ R"), closed, "");
    if rr.is_empty() {
        return Ok(r);
    }
    let lim = higher_limits(&fs, &rr, 2, caps.cochains)?;
    for k in 1..=2 {
        r.push(format!("{label}: L^{k}(F;R) = 0"), lim[k].is_zero(), format!("invariant factors {:?}", lim[k].invariant_factors));
    }
    let f = locality_formula(st, &fs, &rr, caps.cochains)?;
    let star = gamma_star(&fs, &overgroups_of_y(st, &fs)?.difference(&rr).copied().collect())?;
    r.push(
        format!("{label}: C_D(Γ*) = C_D(Γ)"),
        f.fixed_on_gamma_star == f.fixed_on_gamma,
        format!("|Γ*| = {}, |C_D(Γ*)| = {}, |C_D(Γ)| = {}", star.elements().len(), f.fixed_on_gamma_star, f.fixed_on_gamma),
    );
    Ok(r)
}

/// Normal subgroups of `Γ` containing `Y`, as normal closures of `<Y, g>`.
fn normal_overgroups(st: &GeneralSetup) -> Vec<Group> {
    let mut out: Vec<Group> = Vec::new();
    for g in st.gamma.elements() {
        let mut gens = st.y.gens().to_vec();
        gens.extend(st.gamma.conjugacy_class(g));
        let n = st.gamma.closure(gens);
        if !out.contains(&n) {
            out.push(n);
        }
    }
    out.sort();
    out
}

/// Injectivity of restriction to normal subgroups containing `Y`, over the
/// overgroup-closed invariant intervals satisfying the hypotheses.
pub fn restinj(label: &str, st: &GeneralSetup, caps: Caps) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("restinj");
    let fs = setup_fusion(st, caps)?;
    let u = overgroups_of_y(st, &fs)?;
    let reps: BTreeSet<SubId> = u.iter().map(|&x| fs.rep_of(x)).collect();
    let classes: Vec<Vec<SubId>> = reps.into_iter().map(|x| fs.classes()[fs.class_of(x)].clone()).collect();
    if classes.len() > 16 {
        return Err(Error::cap("classes of overgroups of Y", 16));
    }
    let mut checked = 0;
    let mut nontrivial = 0;
    let mut bad = Vec::new();
    for g0 in normal_overgroups(st) {
        for mask in 1u32..(1 << classes.len()) {
            let q: BTreeSet<SubId> = (0..classes.len()).filter(|i| mask >> i & 1 == 1).flat_map(|i| classes[i].iter().copied()).collect();
            if !q.contains(&fs.s_id()) || fs.upward_closure(&q).intersection(&u).count() != q.len() {
                continue;
            }
            match restriction_injectivity_check(st, &g0, &q, &fs, caps.cochains) {
                Ok(rep) => {
                    checked += 1;
                    if !rep.source.is_empty() {
                        nontrivial += 1;
                    }
                    if !rep.injective {
                        bad.push(format!("Γ0 of order {}, |Q| = {}", g0.order(), q.len()));
                    }
                }
                Err(Error::Hypothesis(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    r.push(
        format!("{label}: restriction is injective"),
        checked > 0 && bad.is_empty(),
        format!("{checked} cases, {nontrivial} with L^1 ≠ 0; failures {bad:?}"),
    );
    Ok(r)
}
