//! Offenders on a module: best offenders, over-offenders, Thompson-type
//! subgroups, replacement, and solitary offenders for `p = 2`.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::abelian::{AbSubgroup, PAbelianGroup, Vector};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::lattice::{subgroups_of_pgroup, DEFAULT_PGROUP_CAP};
use crate::modaction::{Action, Matrix};
use crate::perm::Perm;
use crate::quotient::Quotient;

/// Largest degree accepted by [`natural_module_action`].
pub const MAX_NATURAL_DEGREE: usize = 7;

/// Largest `log_2 |D|` for the exhaustive complement search.
pub const MAX_COMPLEMENT_LOG: u32 = 8;

pub(crate) fn serialize_group<S: Serializer>(g: &Group, s: S) -> std::result::Result<S::Ok, S::Error> {
    let gens: Vec<String> = g.gens().iter().map(|x| x.to_string()).collect();
    gens.serialize(s)
}

fn serialize_groups<S: Serializer>(gs: &[Group], s: S) -> std::result::Result<S::Ok, S::Error> {
    let all: Vec<Vec<String>> = gs.iter().map(|g| g.gens().iter().map(|x| x.to_string()).collect()).collect();
    all.serialize(s)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OffenderFlags {
    pub best: bool,
    pub over: bool,
    pub minimal: bool,
    pub quadratic: bool,
    pub solitary: bool,
    pub semisolitary: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OffenderReport {
    #[serde(serialize_with = "serialize_group")]
    pub subgroup: Group,
    pub size: u64,
    pub fixed_size: u128,
    /// `|A||C_D(A)| / |D|`.
    pub defect: Ratio<u64>,
    pub flags: OffenderFlags,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolitaryWitness {
    #[serde(serialize_with = "serialize_group")]
    pub t: Group,
    #[serde(serialize_with = "serialize_group")]
    pub l: Group,
    #[serde(serialize_with = "serialize_group")]
    pub j: Group,
    #[serde(serialize_with = "serialize_group")]
    pub complement: Group,
}

#[derive(Clone, Debug)]
pub struct DecompositionFactor {
    pub e: Group,
    pub m: usize,
    pub v: AbSubgroup,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub factors: Vec<DecompositionFactor>,
    pub residue: AbSubgroup,
}

impl Decomposition {
    pub fn degrees(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.m).collect()
    }
}

/// `log_p |A| + log_p |C_D(A)|`.
pub fn offender_score(act: &Action, a: &Group) -> u32 {
    let d = act.module();
    log_p(a.order() as u64, d.prime()) + act.fixed_points(a).log_order(d)
}

fn log_p(mut n: u64, p: u64) -> u32 {
    let mut e = 0;
    while n > 1 && n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    e
}

fn pow(p: u64, e: i64) -> Ratio<u64> {
    if e >= 0 {
        Ratio::from_integer(p.pow(e as u32))
    } else {
        Ratio::new(1, p.pow((-e) as u32))
    }
}

pub fn is_offender(act: &Action, a: &Group) -> bool {
    let p = act.module().prime();
    a.is_abelian() && a.is_p_group(p) && offender_score(act, a) >= act.module().order_log()
}

/// Best offender test by exhaustion over the subgroups of `a`.
pub fn is_best_offender(act: &Action, a: &Group) -> Result<bool> {
    let p = act.module().prime();
    if !a.is_abelian() || !a.is_p_group(p) {
        return Ok(false);
    }
    let score = offender_score(act, a);
    let subs = subgroups_of_pgroup(a, p, DEFAULT_PGROUP_CAP.max(a.order()))?;
    Ok(subs.iter().all(|b| offender_score(act, b) <= score))
}

/// The order-2 members of `A_D(G)` inside `h`: `<t>` with `|D : C_D(t)| = 2`.
pub fn order_two_offenders(act: &Action, h: &Group) -> Vec<Group> {
    let d = act.module();
    if d.prime() != 2 {
        return vec![];
    }
    let mut out: Vec<Group> = h
        .elements()
        .iter()
        .filter(|x| x.order() == 2)
        .filter(|x| d.order_log() - act.fixed_points_of(std::slice::from_ref(*x)).log_order(d) == 1)
        .map(|x| h.closure(vec![x.clone()]))
        .collect();
    out.sort();
    out
}

fn generated(degree: usize, gs: &[Group]) -> Group {
    let gens: Vec<Perm> = gs.iter().flat_map(|g| g.gens().iter().cloned()).collect();
    Group::generate(degree, gens).expect("uncapped closure")
}

struct LocalScan {
    /// Nontrivial best offenders inside `S`, with flags except the solitary ones.
    best: Vec<(Group, OffenderFlags)>,
}

fn scan_sylow(act: &Action, s: &Group) -> Result<LocalScan> {
    let d = act.module();
    let p = d.prime();
    let dlog = d.order_log();
    let subs = subgroups_of_pgroup(s, p, DEFAULT_PGROUP_CAP.max(s.order()))?;
    let abelian: Vec<&Group> = subs.iter().filter(|a| a.is_abelian()).collect();
    let score: HashMap<&Group, u32> = abelian.iter().map(|a| (*a, offender_score(act, a))).collect();
    let mut best: Vec<Group> = Vec::new();
    for a in &abelian {
        if a.is_trivial() {
            continue;
        }
        let sa = score[a];
        // all subgroups of an abelian A are abelian and lie in S
        if abelian.iter().filter(|b| b.order() < a.order() && b.is_subgroup_of(a)).all(|b| score[b] <= sa) {
            best.push((*a).clone());
        }
    }
    let out = best
        .iter()
        .map(|a| {
            let minimal = !best.iter().any(|b| b.order() < a.order() && b.is_subgroup_of(a));
            let flags = OffenderFlags {
                best: true,
                over: score[a] > dlog,
                minimal,
                quadratic: act.is_quadratic(a),
                solitary: false,
                semisolitary: false,
            };
            (a.clone(), flags)
        })
        .collect();
    Ok(LocalScan { best: out })
}

fn require_faithful(act: &Action) -> Result<()> {
    if act.is_faithful() {
        Ok(())
    } else {
        Err(Error::NotFaithful)
    }
}

/// `A_D(G)` with all flags, sorted by order and then elements.
pub fn best_offenders(act: &Action) -> Result<Vec<OffenderReport>> {
    require_faithful(act)?;
    let g = act.group();
    let d = act.module();
    let p = d.prime();
    let s = g.sylow(p);
    let mut local = scan_sylow(act, &s)?;
    if p == 2 {
        let sol: HashSet<Group> = solitary_in_sylow(act, &s)?.into_iter().collect();
        let semi: HashSet<Group> = semisolitary_in(act, &s)?.into_iter().collect();
        for (a, f) in local.best.iter_mut() {
            f.solitary = sol.contains(a);
            f.semisolitary = semi.contains(a);
        }
        // membership in T_D(G) is relative to some Sylow subgroup: spread over classes
        let classes: Vec<Vec<Group>> = local.best.iter().map(|(a, _)| g.conjugates(a)).collect();
        let n = local.best.len();
        for i in 0..n {
            let (sol_any, semi_any) = (0..n)
                .filter(|&j| classes[i].contains(&local.best[j].0))
                .fold((false, false), |acc, j| (acc.0 || local.best[j].1.solitary, acc.1 || local.best[j].1.semisolitary));
            local.best[i].1.solitary = sol_any;
            local.best[i].1.semisolitary = semi_any;
        }
    }
    let mut seen: HashSet<Group> = HashSet::new();
    let mut out = Vec::new();
    for (a, flags) in &local.best {
        for c in g.conjugates(a) {
            if seen.insert(c.clone()) {
                out.push(report(act, &c, *flags));
            }
        }
    }
    out.sort_by(|x, y| x.subgroup.cmp(&y.subgroup));
    Ok(out)
}

fn report(act: &Action, a: &Group, flags: OffenderFlags) -> OffenderReport {
    let d = act.module();
    let p = d.prime();
    let fixed = act.fixed_points(a);
    let e = log_p(a.order() as u64, p) as i64 + fixed.log_order(d) as i64 - d.order_log() as i64;
    OffenderReport { subgroup: a.clone(), size: a.order() as u64, fixed_size: fixed.order(d), defect: pow(p, e), flags }
}

/// A nontrivial `B <= A`, minimal under inclusion with
/// `|B||C_D(B)| >= |A||C_D(A)|`.
pub fn replacement(act: &Action, a: &Group) -> Result<Group> {
    let p = act.module().prime();
    if a.is_trivial() || !is_offender(act, a) {
        return Err(Error::precondition("not a nontrivial offender"));
    }
    let target = offender_score(act, a);
    let subs = subgroups_of_pgroup(a, p, DEFAULT_PGROUP_CAP.max(a.order()))?;
    let qualifying: Vec<&Group> =
        subs.iter().filter(|b| !b.is_trivial() && offender_score(act, b) >= target).collect();
    // the first in (order, elements) order has no qualifying proper subgroup
    let b = qualifying.first().copied().expect("A itself qualifies").clone();
    if !is_best_offender(act, &b)? || !act.is_quadratic(&b) {
        return Err(Error::internal("replacement is not a quadratic best offender"));
    }
    Ok(b)
}

fn check_invariant(act: &Action, coll: &[Group]) -> Result<()> {
    let set: HashSet<&Group> = coll.iter().collect();
    for a in coll {
        for x in act.group().gens() {
            if !set.contains(&a.conjugate(x)) {
                return Err(Error::precondition("collection is not invariant under conjugation"));
            }
        }
    }
    Ok(())
}

/// `J_A(H) = <A ∈ coll : A <= H>`.
pub fn thompson_subgroup(coll: &[Group], h: &Group, act: &Action) -> Result<Group> {
    check_invariant(act, coll)?;
    let inside: Vec<Group> = coll.iter().filter(|a| a.is_subgroup_of(h)).cloned().collect();
    Ok(generated(act.group().degree(), &inside))
}

/// `J_A(H, D)`: the preimage in `H <= Γ` of `J_A(H C_Γ(D) / C_Γ(D))`, with
/// `quotient` realizing `Γ -> G` and `act` the faithful action of `G`.
pub fn thompson_preimage(coll: &[Group], h: &Group, quotient: &Quotient, act: &Action) -> Result<Group> {
    if !h.is_subgroup_of(quotient.parent()) {
        return Err(Error::NotSubgroup("H is not in the parent group".into()));
    }
    let j = thompson_subgroup(coll, &quotient.project_subgroup(h), act)?;
    Ok(h.intersection(&quotient.preimage(&j)))
}

fn check_order_two(act: &Action, t: &Group, within: &Group) -> Result<()> {
    let d = act.module();
    if d.prime() != 2 {
        return Err(Error::precondition("solitary offenders are defined for p = 2"));
    }
    require_faithful(act)?;
    if t.order() != 2 || !t.is_subgroup_of(within) {
        return Err(Error::precondition("T is not a subgroup of order 2 in the given 2-subgroup"));
    }
    if d.order_log() - act.fixed_points(t).log_order(d) != 1 {
        return Err(Error::precondition("T is not an order-2 best offender"));
    }
    Ok(())
}

fn involution(t: &Group) -> Perm {
    t.elements().iter().find(|x| !x.is_identity()).expect("order 2").clone()
}

/// Conditions (S1)-(S3) for `T` relative to the Sylow 2-subgroup `S`,
/// searching `L = <T, u>` over conjugates `u` of `T` with `tu` of order 3.
pub fn is_solitary(act: &Action, t: &Group, s: &Group) -> Result<Option<SolitaryWitness>> {
    check_order_two(act, t, s)?;
    let g = act.group();
    if !s.is_subgroup_of(g) || g.sylow(2).order() != s.order() {
        return Err(Error::precondition("S is not a Sylow 2-subgroup"));
    }
    let a = order_two_offenders(act, s);
    Ok(solitary_witness(act, t, &a))
}

fn solitary_witness(act: &Action, t: &Group, a: &[Group]) -> Option<SolitaryWitness> {
    let g = act.group();
    let d = act.module();
    let deg = g.degree();
    let j = generated(deg, a);
    let others: Vec<Group> = a.iter().filter(|x| *x != t).cloned().collect();
    let k = generated(deg, &others);
    let tt = involution(t);
    // J = T × K
    if k.contains(&tt) || j.order() != 2 * k.order() || k.gens().iter().any(|x| x.mul(&tt) != tt.mul(x)) {
        return None;
    }
    let mut tried: HashSet<Group> = HashSet::new();
    for u in g.conjugacy_class(&tt) {
        if tt.mul(&u).order() != 3 {
            continue;
        }
        let l = g.closure(vec![tt.clone(), u]);
        if !tried.insert(l.clone()) {
            continue;
        }
        if j.centralizer(&l) != k {
            continue;
        }
        let dl = act.commutator(&d.whole(), &l);
        let cl = act.fixed_points(&l);
        if !dl.meet(d, &cl).is_trivial(d) || dl.log_order(d) + cl.log_order(d) != d.order_log() {
            continue;
        }
        if !act.commutator(&dl, &k).is_trivial(d) {
            continue;
        }
        return Some(SolitaryWitness { t: t.clone(), l, j: j.clone(), complement: k.clone() });
    }
    None
}

/// Members of `A_D(G)_2 ∩ S` solitary relative to `S`.
fn solitary_in_sylow(act: &Action, s: &Group) -> Result<Vec<Group>> {
    let a = order_two_offenders(act, s);
    Ok(a.iter().filter(|t| solitary_witness(act, t, &a).is_some()).cloned().collect())
}

fn semisolitary_in(act: &Action, s0: &Group) -> Result<Vec<Group>> {
    let a = order_two_offenders(act, s0);
    let mut out = Vec::new();
    for t in &a {
        if semisolitary_witness(act, t, &a)?.is_some() {
            out.push(t.clone());
        }
    }
    Ok(out)
}

/// `T_D(G)`: subgroups solitary relative to some Sylow 2-subgroup.
pub fn solitary_offenders(act: &Action) -> Result<Vec<Group>> {
    require_faithful(act)?;
    if act.module().prime() != 2 {
        return Err(Error::precondition("solitary offenders are defined for p = 2"));
    }
    let g = act.group();
    let s = g.sylow(2);
    let mut out: BTreeSet<Group> = BTreeSet::new();
    for t in solitary_in_sylow(act, &s)? {
        out.extend(g.conjugates(&t));
    }
    Ok(out.into_iter().collect())
}

/// Conditions (SS2)-(SS3) for `T` relative to the 2-subgroup `S0`; returns
/// `(W, X)`.
pub fn is_semisolitary(act: &Action, t: &Group, s0: &Group) -> Result<Option<(AbSubgroup, AbSubgroup)>> {
    check_order_two(act, t, s0)?;
    if !s0.is_p_group(2) || !s0.is_subgroup_of(act.group()) {
        return Err(Error::precondition("S0 is not a 2-subgroup"));
    }
    let a = order_two_offenders(act, s0);
    semisolitary_witness(act, t, &a)
}

fn key(d: &PAbelianGroup, u: &AbSubgroup) -> Vec<Vector> {
    u.elements(d)
}

fn semisolitary_witness(act: &Action, t: &Group, a: &[Group]) -> Result<Option<(AbSubgroup, AbSubgroup)>> {
    let d = act.module();
    let deg = act.group().degree();
    let j0 = generated(deg, a);
    let others: Vec<Group> = a.iter().filter(|x| *x != t).cloned().collect();
    let k = generated(deg, &others);
    let tt = involution(t);
    if k.contains(&tt) || j0.order() != 2 * k.order() || k.gens().iter().any(|x| x.mul(&tt) != tt.mul(x)) {
        return Ok(None);
    }
    if d.order_log() > MAX_COMPLEMENT_LOG {
        return Err(Error::cap("log_2 |D| for the complement search", MAX_COMPLEMENT_LOG as usize));
    }
    let dt = act.commutator(&d.whole(), t);
    let ck = act.fixed_points(&k).meet(d, &d.omega1());
    let ct = act.fixed_points(t);
    let target = d.order_log() - 2;
    let mut ws: Vec<AbSubgroup> = Vec::new();
    let mut seen: HashSet<Vec<Vector>> = HashSet::new();
    for w in ck.elements(d) {
        if dt.contains(d, &w) {
            continue;
        }
        let cand = dt.join(d, &d.span(&[w]));
        if cand.log_order(d) == 2 && act.is_invariant(&cand, j0.gens()) && seen.insert(key(d, &cand)) {
            ws.push(cand);
        }
    }
    for w in &ws {
        if let Some(x) = find_complement(act, w, &ct, target, &j0) {
            return Ok(Some((w.clone(), x)));
        }
    }
    Ok(None)
}

/// A `J0`-invariant subgroup of `within`, meeting `w` trivially, of
/// order `p^target`.
fn find_complement(act: &Action, w: &AbSubgroup, within: &AbSubgroup, target: u32, j0: &Group) -> Option<AbSubgroup> {
    let d = act.module();
    let pool = within.elements(d);
    let mut layer = vec![d.trivial_subgroup()];
    let mut seen: HashSet<Vec<Vector>> = HashSet::new();
    loop {
        for x in &layer {
            if x.log_order(d) == target && act.is_invariant(x, j0.gens()) {
                return Some(x.clone());
            }
        }
        let mut next = Vec::new();
        for x in &layer {
            if x.log_order(d) >= target {
                continue;
            }
            for v in &pool {
                if x.contains(d, v) {
                    continue;
                }
                let y = x.join(d, &d.span(std::slice::from_ref(v)));
                if y.log_order(d) > target || !y.meet(d, w).is_trivial(d) {
                    continue;
                }
                if seen.insert(key(d, &y)) {
                    next.push(y);
                }
            }
        }
        if next.is_empty() {
            return None;
        }
        layer = next;
    }
}

/// The decomposition of a group generated by its solitary offenders into
/// odd symmetric groups with natural modules.
pub fn solitary_decomposition(act: &Action) -> Result<Decomposition> {
    require_faithful(act)?;
    let g = act.group();
    let d = act.module();
    if d.prime() != 2 {
        return Err(Error::precondition("solitary offenders are defined for p = 2"));
    }
    if !g.op(2).is_trivial() {
        return Err(Error::Hypothesis("O_2(G) is nontrivial".into()));
    }
    let sol = solitary_offenders(act)?;
    if generated(g.degree(), &sol).order() != g.order() {
        return Err(Error::Hypothesis("G is not generated by its solitary offenders".into()));
    }
    let n = sol.len();
    let inv: Vec<Perm> = sol.iter().map(involution).collect();
    let dts: Vec<Vec<Vector>> = sol.iter().map(|t| key(d, &act.commutator(&d.whole(), t))).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if inv[i].mul(&inv[j]) != inv[j].mul(&inv[i]) || dts[i] == dts[j] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut blocks: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        by_root.entry(r).or_default().push(i);
    }
    blocks.extend(by_root.into_values());
    let mut factors = Vec::new();
    for b in &blocks {
        let members: Vec<Group> = b.iter().map(|&i| sol[i].clone()).collect();
        let e = generated(g.degree(), &members);
        let c = members.len();
        let m = (1..=MAX_NATURAL_DEGREE * 4).find(|m| m * (m - 1) / 2 == c);
        let m = m.ok_or_else(|| Error::internal(format!("block of {c} solitary subgroups is not a transposition class")))?;
        let fact: usize = (1..=m).product();
        if m % 2 == 0 || m < 3 || e.order() != fact {
            return Err(Error::internal(format!("block generates a group of order {} for degree {m}", e.order())));
        }
        let v = act.commutator(&d.whole(), &e);
        if v.log_order(d) as usize != m - 1 {
            return Err(Error::internal("[D, E] is not a natural module"));
        }
        factors.push(DecompositionFactor { e, m, v });
    }
    factors.sort_by(|x, y| x.m.cmp(&y.m).then_with(|| x.e.cmp(&y.e)));
    let residue = act.fixed_points(g);
    let decomposition = Decomposition { factors, residue };
    verify_decomposition(act, &decomposition)?;
    Ok(decomposition)
}

/// Checks `G = ∏ E_i`, `D = ∏ V_i × C_D(G)` and `[V_i, E_j] = 1` for `i != j`.
pub fn verify_decomposition(act: &Action, dec: &Decomposition) -> Result<()> {
    let g = act.group();
    let d = act.module();
    let fail = |m: &str| Err(Error::internal(format!("decomposition: {m}")));
    let order: usize = dec.factors.iter().map(|f| f.e.order()).product();
    if order != g.order() {
        return fail("orders of the factors do not multiply to |G|");
    }
    for (i, a) in dec.factors.iter().enumerate() {
        for (j, b) in dec.factors.iter().enumerate() {
            if i == j {
                continue;
            }
            if a.e.gens().iter().any(|x| b.e.gens().iter().any(|y| x.mul(y) != y.mul(x))) {
                return fail("factors do not commute");
            }
            if !act.commutator(&a.v, &b.e).is_trivial(d) {
                return fail("a module factor is moved by another factor");
            }
        }
    }
    let mut total = dec.residue.clone();
    let mut log = dec.residue.log_order(d);
    for f in &dec.factors {
        total = total.join(d, &f.v);
        log += f.v.log_order(d);
    }
    if !total.is_whole(d) || log != d.order_log() {
        return fail("module is not the direct product of the pieces");
    }
    Ok(())
}

/// Generators `(1 2)` and `(1 2 ... m)` of `S_m`.
pub fn symmetric_group(m: usize) -> Result<Group> {
    if m < 2 {
        return Ok(Group::trivial(m.max(1)));
    }
    let cycle: Vec<u32> = (0..m as u32).map(|i| (i + 1) % m as u32).collect();
    let mut swap: Vec<u32> = (0..m as u32).collect();
    swap.swap(0, 1);
    Group::generate(m, vec![Perm::from_images(swap)?, Perm::from_images(cycle)?])
}

/// Matrix of `g ∈ S_m` on even subsets of `{1..m}` in the basis `{i, m}`,
/// `i < m`.
pub fn natural_matrix(g: &Perm, m: usize) -> Matrix {
    let last = m - 1;
    (0..last)
        .map(|i| {
            let mut row = vec![0u64; last];
            for x in [g.apply(i), g.apply(last)] {
                if x != last {
                    row[x] ^= 1;
                }
            }
            row
        })
        .collect()
}

/// `S_m` on its natural module, the even subsets of `{1..m}`.
pub fn natural_module_action(m: usize) -> Result<Action> {
    if m.is_multiple_of(2) || m < 3 {
        return Err(Error::precondition(format!("degree {m} is not odd and at least 3")));
    }
    if m > MAX_NATURAL_DEGREE {
        return Err(Error::cap("degree of the natural module", MAX_NATURAL_DEGREE));
    }
    let g = symmetric_group(m)?;
    let mats = g.gens().iter().map(|x| natural_matrix(x, m)).collect();
    Action::from_generator_matrices(&g, PAbelianGroup::elementary(2, m - 1), mats)
}

/// Collections used by the norm arguments.
#[derive(Clone, Debug, Serialize)]
pub struct OffenderCollections {
    #[serde(serialize_with = "serialize_groups")]
    pub all: Vec<Group>,
    #[serde(serialize_with = "serialize_groups")]
    pub over: Vec<Group>,
    #[serde(serialize_with = "serialize_groups")]
    pub minimal: Vec<Group>,
    #[serde(serialize_with = "serialize_groups")]
    pub minimal_over: Vec<Group>,
    #[serde(serialize_with = "serialize_groups")]
    pub order_two: Vec<Group>,
    #[serde(serialize_with = "serialize_groups")]
    pub minimal_ge4: Vec<Group>,
}

impl OffenderCollections {
    pub fn from_reports(reports: &[OffenderReport]) -> OffenderCollections {
        let pick = |f: &dyn Fn(&OffenderReport) -> bool| -> Vec<Group> {
            reports.iter().filter(|r| f(r)).map(|r| r.subgroup.clone()).collect()
        };
        let over = pick(&|r| r.flags.over);
        let minimal_over =
            over.iter().filter(|a| !over.iter().any(|b| b.order() < a.order() && b.is_subgroup_of(a))).cloned().collect();
        OffenderCollections {
            all: pick(&|_| true),
            minimal: pick(&|r| r.flags.minimal),
            order_two: pick(&|r| r.size == 2),
            minimal_ge4: pick(&|r| r.flags.minimal && r.size >= 4),
            over,
            minimal_over,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(degree: usize, gens: &[&str]) -> Group {
        Group::generate(degree, gens.iter().map(|s| Perm::parse(degree, s).unwrap()).collect()).unwrap()
    }

    /// `SL_3(2)` on `F_2^3` as the permutation group of the seven nonzero vectors.
    fn sl32() -> Action {
        // vectors 1..7 are the binary numbers 1..7
        let mats: [Matrix; 2] = [vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]], vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]];
        let perm_of = |m: &Matrix| -> Perm {
            let images = (1..8u32)
                .map(|v| {
                    let bits: Vec<u64> = (0..3).map(|i| u64::from(v >> i & 1)).collect();
                    let img: u32 = (0..3).map(|j| ((0..3).map(|i| bits[i] * m[i][j]).sum::<u64>() % 2) as u32 * (1 << j)).sum();
                    img - 1
                })
                .collect();
            Perm::from_images(images).unwrap()
        };
        let gens: Vec<Perm> = mats.iter().map(perm_of).collect();
        let g = Group::generate(7, gens.clone()).unwrap();
        assert_eq!(g.order(), 168);
        Action::from_generator_pairs(&g, PAbelianGroup::elementary(2, 3), gens.into_iter().zip(mats).collect()).unwrap()
    }

    /// Brute force over all abelian 2-subgroups generated by at most two
    /// elements, enough for the small examples below.
    fn brute_best(act: &Action) -> BTreeSet<Group> {
        let g = act.group();
        let p = act.module().prime();
        let els: Vec<&Perm> = g.elements().iter().filter(|x| !x.is_identity() && x.order().is_power_of_two()).collect();
        let mut cands: BTreeSet<Group> = BTreeSet::new();
        for x in &els {
            for y in &els {
                let h = g.closure(vec![(*x).clone(), (*y).clone()]);
                if h.is_abelian() && h.is_p_group(p) {
                    cands.insert(h);
                }
            }
        }
        cands.into_iter().filter(|a| is_best_offender(act, a).unwrap()).collect()
    }

    #[test]
    fn s3_natural_offenders() {
        let act = natural_module_action(3).unwrap();
        let r = best_offenders(&act).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(|x| x.size == 2 && x.flags.best && !x.flags.over && x.flags.solitary && x.flags.semisolitary));
        assert!(r.iter().all(|x| x.defect == Ratio::from_integer(1)));
        let found: BTreeSet<Group> = r.iter().map(|x| x.subgroup.clone()).collect();
        assert_eq!(found, brute_best(&act));
    }

    #[test]
    fn c3_has_no_offenders() {
        let g = group(3, &["(1 2 3)"]);
        let m = natural_matrix(&g.gens()[0], 3);
        let act = Action::from_generator_matrices(&g, PAbelianGroup::elementary(2, 2), vec![m]).unwrap();
        assert!(best_offenders(&act).unwrap().is_empty());
    }

    #[test]
    fn s5_natural_offenders() {
        let act = natural_module_action(5).unwrap();
        let r = best_offenders(&act).unwrap();
        let found: BTreeSet<Group> = r.iter().map(|x| x.subgroup.clone()).collect();
        assert_eq!(found, brute_best(&act));
        let transpositions: Vec<&OffenderReport> = r.iter().filter(|x| x.size == 2 && x.subgroup.gens()[0].cycles().len() == 1).collect();
        assert_eq!(transpositions.len(), 10);
        assert!(transpositions.iter().all(|x| x.flags.solitary && x.flags.minimal));
        let solitary: Vec<Group> = solitary_offenders(&act).unwrap();
        assert_eq!(solitary.len(), 10);
    }

    #[test]
    fn replacement_examples() {
        let act = natural_module_action(5).unwrap();
        let a = group(5, &["(1 2)", "(3 4)"]);
        assert_eq!(offender_score(&act, &a), 4);
        let b = replacement(&act, &a).unwrap();
        assert_eq!(b.order(), 2);
        assert!(b.is_subgroup_of(&a));
        let t = group(5, &["(1 2)"]);
        assert_eq!(replacement(&act, &t).unwrap(), t);
        assert!(replacement(&act, &group(5, &["(1 2 3 4)"])).is_err());
        for r in best_offenders(&act).unwrap() {
            let b = replacement(&act, &r.subgroup).unwrap();
            assert!(offender_score(&act, &b) >= offender_score(&act, &r.subgroup));
        }
    }

    #[test]
    fn thompson_examples() {
        let act = natural_module_action(5).unwrap();
        let coll = OffenderCollections::from_reports(&best_offenders(&act).unwrap());
        let s = group(5, &["(1 2)", "(3 4)", "(1 3)(2 4)"]);
        let j = thompson_subgroup(&coll.order_two, &s, &act).unwrap();
        assert_eq!(j, group(5, &["(1 2)", "(3 4)"]));
        assert!(thompson_subgroup(&coll.order_two[..1], &s, &act).is_err());
        assert!(thompson_subgroup(&coll.order_two, &group(5, &["(1 2 3)"]), &act).unwrap().is_trivial());

        let act3 = natural_module_action(3).unwrap();
        let coll3 = OffenderCollections::from_reports(&best_offenders(&act3).unwrap());
        let s3 = act3.group().sylow(2);
        assert_eq!(thompson_subgroup(&coll3.all, &s3, &act3).unwrap(), s3);
    }

    #[test]
    fn solitary_examples() {
        let act = natural_module_action(3).unwrap();
        let s = act.group().sylow(2);
        let w = is_solitary(&act, &s, &s).unwrap().unwrap();
        assert_eq!(w.l, *act.group());
        let (wsub, x) = is_semisolitary(&act, &s, &s).unwrap().unwrap();
        assert_eq!(wsub.log_order(act.module()), 2);
        assert!(x.is_trivial(act.module()));

        let act5 = natural_module_action(5).unwrap();
        let s5 = group(5, &["(1 2)", "(3 4)", "(1 3)(2 4)"]);
        let t = group(5, &["(3 4)"]);
        let w = is_solitary(&act5, &t, &s5).unwrap().unwrap();
        assert_eq!(w.l.order(), 6);
        assert!(is_semisolitary(&act5, &t, &s5).unwrap().is_some());
        assert!(is_solitary(&act5, &group(5, &["(1 2)(3 4)"]), &s5).is_err());

        let sl = sl32();
        let s = sl.group().sylow(2);
        let a2 = order_two_offenders(&sl, &s);
        assert!(!a2.is_empty());
        for t in &a2 {
            assert!(is_solitary(&sl, t, &s).unwrap().is_none());
            assert!(is_semisolitary(&sl, t, &s).unwrap().is_none());
        }
        assert!(best_offenders(&sl).unwrap().iter().all(|r| !r.flags.solitary));
    }

    #[test]
    fn natural_modules() {
        for (m, order) in [(3, 4u128), (5, 16), (7, 64)] {
            let act = natural_module_action(m).unwrap();
            assert_eq!(act.module().order(), order);
            assert!(act.is_faithful());
        }
        let act = natural_module_action(5).unwrap();
        let t = group(5, &["(1 2)"]);
        assert_eq!(act.fixed_points(&t).log_order(act.module()), 3);
        assert!(natural_module_action(4).is_err());
        assert!(natural_module_action(9).is_err());
    }

    #[test]
    fn decompositions() {
        let act5 = natural_module_action(5).unwrap();
        let dec = solitary_decomposition(&act5).unwrap();
        assert_eq!(dec.degrees(), vec![5]);
        assert!(dec.residue.is_trivial(act5.module()));

        // S3 on natural ⊕ trivial
        let g = symmetric_group(3).unwrap();
        let mats = g
            .gens()
            .iter()
            .map(|x| {
                let n = natural_matrix(x, 3);
                vec![vec![n[0][0], n[0][1], 0], vec![n[1][0], n[1][1], 0], vec![0, 0, 1]]
            })
            .collect();
        let act = Action::from_generator_matrices(&g, PAbelianGroup::elementary(2, 3), mats).unwrap();
        let dec = solitary_decomposition(&act).unwrap();
        assert_eq!(dec.degrees(), vec![3]);
        assert_eq!(dec.residue.order(act.module()), 2);

        let sl = sl32();
        assert!(matches!(solitary_decomposition(&sl), Err(Error::Hypothesis(_))));
        let s4 = symmetric_group(4).unwrap();
        let mats = s4.gens().iter().map(|x| {
            let p: Vec<usize> = (0..4).map(|i| x.apply(i)).collect();
            (0..4).map(|i| (0..4).map(|j| u64::from(p[i] == j)).collect()).collect()
        });
        let perm = Action::from_generator_matrices(&s4, PAbelianGroup::elementary(2, 4), mats.collect()).unwrap();
        assert!(matches!(solitary_decomposition(&perm), Err(Error::Hypothesis(m)) if m.contains("O_2")));
    }
}
