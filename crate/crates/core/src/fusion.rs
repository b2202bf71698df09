//! The fusion system `F_S(Γ)` of a finite group at a prime.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::lattice::subgroups_of_pgroup;
use crate::modaction::Action;
use crate::perm::Perm;
use crate::quotient::Quotient;

/// Identifier of a subgroup of `S`: its index in [`FusionSystem::subgroups`].
pub type SubId = usize;

pub struct FusionSystem {
    gamma: Group,
    s: Group,
    p: u64,
    subs: Vec<Group>,
    ids: HashMap<Group, SubId>,
    class_of: Vec<usize>,
    classes: Vec<Vec<SubId>>,
    reps: Vec<SubId>,
    /// `rep^{a} = P` for the class representative `rep` of `P`.
    to_member: Vec<Perm>,
    ns_order: Vec<usize>,
    centric: Vec<bool>,
    contained_in: OnceLock<Vec<Vec<SubId>>>,
    hom_cache: RwLock<HashMap<(SubId, SubId), Arc<Vec<Perm>>>>,
}

impl std::fmt::Debug for FusionSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FusionSystem(|Γ| = {}, |S| = {}, p = {})", self.gamma.order(), self.s.order(), self.p)
    }
}

impl FusionSystem {
    pub fn new(gamma: &Group, p: u64, pgroup_cap: usize) -> Result<FusionSystem> {
        let s = gamma.sylow(p);
        FusionSystem::with_sylow(gamma, &s, p, pgroup_cap)
    }

    pub fn with_sylow(gamma: &Group, s: &Group, p: u64, pgroup_cap: usize) -> Result<FusionSystem> {
        if !s.is_subgroup_of(gamma) || !s.is_p_group(p) || ((gamma.order() / s.order()) as u64).is_multiple_of(p) {
            return Err(Error::precondition("not a Sylow subgroup"));
        }
        let subs = subgroups_of_pgroup(s, p, pgroup_cap)?;
        let ids: HashMap<Group, SubId> = subs.iter().cloned().enumerate().map(|(i, h)| (h, i)).collect();
        let n = subs.len();
        let ns_order: Vec<usize> = subs.iter().map(|h| s.normalizer(h).order()).collect();
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<SubId>> = Vec::new();
        let mut reps = Vec::new();
        let mut to_member = vec![Perm::identity(gamma.degree()); n];
        for i in 0..n {
            if class_of[i] != usize::MAX {
                continue;
            }
            let p0 = &subs[i];
            let norm = gamma.normalizer(p0);
            let mut members: Vec<(SubId, Perm)> = Vec::new();
            for r in gamma.right_coset_reps(&norm) {
                let c = p0.conjugate(&r);
                if c.is_subgroup_of(s) {
                    let id = ids[&c];
                    members.push((id, r));
                }
            }
            members.sort_by_key(|(id, _)| *id);
            // representative: largest N_S(P), ties to the smallest subgroup
            let (rep, a_rep) = members
                .iter()
                .max_by(|a, b| ns_order[a.0].cmp(&ns_order[b.0]).then(b.0.cmp(&a.0)))
                .cloned()
                .expect("class contains P");
            let a_inv = a_rep.inverse();
            let cid = classes.len();
            for (id, r) in &members {
                class_of[*id] = cid;
                to_member[*id] = a_inv.mul(r);
            }
            classes.push(members.iter().map(|(id, _)| *id).collect());
            reps.push(rep);
        }
        let centric = (0..n)
            .map(|i| classes[class_of[i]].iter().all(|&q| s.centralizer(&subs[q]).is_subgroup_of(&subs[q])))
            .collect();
        Ok(FusionSystem {
            gamma: gamma.clone(),
            s: s.clone(),
            p,
            subs,
            ids,
            class_of,
            classes,
            reps,
            to_member,
            ns_order,
            centric,
            contained_in: OnceLock::new(),
            hom_cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn gamma(&self) -> &Group {
        &self.gamma
    }

    pub fn sylow(&self) -> &Group {
        &self.s
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn subgroups(&self) -> &[Group] {
        &self.subs
    }

    pub fn subgroup(&self, id: SubId) -> &Group {
        &self.subs[id]
    }

    pub fn id_of(&self, h: &Group) -> Option<SubId> {
        self.ids.get(h).copied()
    }

    pub fn s_id(&self) -> SubId {
        self.subs.len() - 1
    }

    pub fn class_of(&self, id: SubId) -> usize {
        self.class_of[id]
    }

    pub fn classes(&self) -> &[Vec<SubId>] {
        &self.classes
    }

    pub fn class_rep(&self, class: usize) -> SubId {
        self.reps[class]
    }

    pub fn rep_of(&self, id: SubId) -> SubId {
        self.reps[self.class_of[id]]
    }

    /// An element `a` with `rep^a = P`, the identity when `P` is the representative.
    pub fn conjugator_from_rep(&self, id: SubId) -> &Perm {
        &self.to_member[id]
    }

    pub fn normalizer_order_in_s(&self, id: SubId) -> usize {
        self.ns_order[id]
    }

    pub fn is_fully_normalized(&self, id: SubId) -> bool {
        let c = &self.classes[self.class_of[id]];
        c.iter().all(|&q| self.ns_order[q] <= self.ns_order[id])
    }

    pub fn is_centric(&self, id: SubId) -> bool {
        self.centric[id]
    }

    pub fn centrics(&self) -> Vec<SubId> {
        (0..self.subs.len()).filter(|&i| self.centric[i]).collect()
    }

    pub fn is_le(&self, a: SubId, b: SubId) -> bool {
        self.contained_in()[a].binary_search(&b).is_ok()
    }

    /// For each subgroup, the sorted ids of the subgroups containing it.
    pub fn contained_in(&self) -> &Vec<Vec<SubId>> {
        self.contained_in.get_or_init(|| {
            let n = self.subs.len();
            (0..n)
                .map(|a| {
                    (0..n)
                        .filter(|&b| {
                            self.subs[b].order().is_multiple_of(self.subs[a].order())
                                && self.subs[a].gens().iter().all(|x| self.subs[b].contains(x))
                        })
                        .collect()
                })
                .collect()
        })
    }

    pub fn overgroups(&self, y: SubId) -> Vec<SubId> {
        self.contained_in()[y].clone()
    }

    /// One `g` per map in `Hom_F(P, Q)`, i.e. per right coset of `C_Γ(P)`
    /// in the transporter.
    pub fn hom_reps(&self, p: SubId, q: SubId) -> Arc<Vec<Perm>> {
        if let Some(v) = self.hom_cache.read().expect("lock").get(&(p, q)) {
            return v.clone();
        }
        let pg = &self.subs[p];
        let qg = &self.subs[q];
        let mut seen: HashSet<Vec<Perm>> = HashSet::new();
        let mut out = Vec::new();
        if pg.order() <= qg.order() {
            for g in self.gamma.elements() {
                let imgs: Vec<Perm> = pg.gens().iter().map(|x| x.conj(g)).collect();
                if imgs.iter().all(|y| qg.contains(y)) && seen.insert(imgs) {
                    out.push(g.clone());
                }
            }
        }
        let v = Arc::new(out);
        self.hom_cache.write().expect("lock").insert((p, q), v.clone());
        v
    }

    /// `Hom_F(P, Q)` as lists of generator images.
    pub fn hom_set(&self, p: SubId, q: SubId) -> Vec<Vec<Perm>> {
        let gens = self.subs[p].gens();
        self.hom_reps(p, q).iter().map(|g| gens.iter().map(|x| x.conj(g)).collect()).collect()
    }

    /// `P^g` as a subgroup id, if it lies in `S`.
    pub fn conj_id(&self, p: SubId, g: &Perm) -> Option<SubId> {
        let c = self.subs[p].conjugate(g);
        self.ids.get(&c).copied()
    }

    pub fn upward_closure(&self, members: &BTreeSet<SubId>) -> BTreeSet<SubId> {
        let mut out = BTreeSet::new();
        for &m in members {
            out.extend(self.contained_in()[m].iter().copied());
        }
        out
    }

    pub fn validate_interval(&self, members: &BTreeSet<SubId>) -> Interval {
        let ci = self.contained_in();
        let n = self.subs.len();
        let mut is_interval = true;
        for x in 0..n {
            if members.contains(&x) {
                continue;
            }
            let above = members.iter().any(|&m| ci[x].binary_search(&m).is_ok());
            let below = members.iter().any(|&m| ci[m].binary_search(&x).is_ok());
            if above && below {
                is_interval = false;
                break;
            }
        }
        let f_invariant = members.iter().all(|&m| self.classes[self.class_of[m]].iter().all(|q| members.contains(q)));
        let contains_s = members.contains(&self.s_id());
        let overgroup_closed = members.iter().all(|&m| ci[m].iter().all(|q| members.contains(q)));
        Interval { members: members.clone(), is_interval, f_invariant, contains_s, overgroup_closed }
    }

    /// `F`-class closure of a set of subgroups.
    pub fn class_closure(&self, members: &BTreeSet<SubId>) -> BTreeSet<SubId> {
        members.iter().flat_map(|&m| self.classes[self.class_of[m]].iter().copied()).collect()
    }

    /// Whether every morphism of `F` is a composite of restrictions of
    /// `F`-automorphisms of members of `c` and of inner automorphisms of `S`.
    pub fn is_conjugation_family(&self, c: &[SubId]) -> bool {
        self.conjugation_family_defect(c).is_none()
    }

    /// The first subgroup whose hom-set into `S` is not generated, if any.
    pub fn conjugation_family_defect(&self, c: &[SubId]) -> Option<SubId> {
        // generator maps: (member T, elements of N_Γ(T) inducing distinct automorphisms)
        let mut gens: Vec<(SubId, Vec<Perm>)> = Vec::new();
        for &t in c {
            gens.push((t, self.hom_reps(t, t).to_vec()));
        }
        gens.push((self.s_id(), self.s.elements().to_vec()));
        let ci = self.contained_in();
        for p in 0..self.subs.len() {
            let target = self.hom_reps(p, self.s_id()).len();
            let pgens = self.subs[p].gens().to_vec();
            let key = |g: &Perm| -> Vec<Perm> { pgens.iter().map(|x| x.conj(g)).collect() };
            let id = self.gamma.identity();
            let mut seen: HashSet<Vec<Perm>> = HashSet::from([key(&id)]);
            let mut stack = vec![(p, id)];
            while let Some((cur, g)) = stack.pop() {
                for (t, ns) in &gens {
                    if ci[cur].binary_search(t).is_err() {
                        continue;
                    }
                    for n in ns {
                        let h = g.mul(n);
                        if seen.insert(key(&h)) {
                            let next = self.conj_id(p, &h).expect("image inside S");
                            stack.push((next, h));
                        }
                    }
                }
            }
            if seen.len() != target {
                return Some(p);
            }
        }
        None
    }

    /// Subgroups `P` whose iterates `W_i(P)` are all fully normalized.
    pub fn well_placed(&self, w: &ConjugacyFunctor) -> Vec<SubId> {
        (0..self.subs.len()).filter(|&p| w.iterates(self, p).iter().all(|&q| self.is_fully_normalized(q))).collect()
    }

    /// Some `n ∈ N_Γ(J)` with `X^n = Y`, for `J` abelian and weakly closed in `S`.
    pub fn burnside_fuse(&self, j: &Group, x: &Group, y: &Group) -> Result<Perm> {
        if !j.is_abelian() || !j.is_subgroup_of(&self.s) {
            return Err(Error::precondition("J must be an abelian subgroup of S"));
        }
        if !self.gamma.is_weakly_closed(j, &self.s) {
            return Err(Error::precondition("J is not weakly closed in S"));
        }
        if !x.is_subgroup_of(j) || !y.is_subgroup_of(j) {
            return Err(Error::precondition("X and Y must lie in J"));
        }
        if self.gamma.conjugating_element(x, y).is_none() {
            return Err(Error::precondition("X and Y are not conjugate"));
        }
        let n = self.gamma.normalizer(j);
        n.conjugating_element(x, y).ok_or_else(|| Error::internal("no conjugating element in N(J)"))
    }
}

/// A collection of subgroups of `S` with its interval flags.
#[derive(Clone, Debug)]
pub struct Interval {
    pub members: BTreeSet<SubId>,
    pub is_interval: bool,
    pub f_invariant: bool,
    pub contains_s: bool,
    pub overgroup_closed: bool,
}

/// A map `W` on the subgroups of `S`, stored as a table.
#[derive(Clone, Debug)]
pub struct ConjugacyFunctor {
    pub name: String,
    map: Vec<SubId>,
}

impl ConjugacyFunctor {
    pub fn from_fn(fs: &FusionSystem, name: &str, f: impl Fn(&Group) -> Group) -> Result<ConjugacyFunctor> {
        let mut map = Vec::with_capacity(fs.subs.len());
        for h in &fs.subs {
            let w = f(h);
            map.push(fs.id_of(&w).ok_or_else(|| Error::precondition("W(P) is not a subgroup of S"))?);
        }
        Ok(ConjugacyFunctor { name: name.to_string(), map })
    }

    pub fn identity(fs: &FusionSystem) -> ConjugacyFunctor {
        ConjugacyFunctor { name: "identity".into(), map: (0..fs.subs.len()).collect() }
    }

    pub fn center(fs: &FusionSystem) -> ConjugacyFunctor {
        Self::from_fn(fs, "center", |h| h.center()).expect("centers lie in S")
    }

    /// `J(P)`: generated by the abelian subgroups of `P` of maximal order.
    pub fn thompson(fs: &FusionSystem) -> ConjugacyFunctor {
        let ci = fs.contained_in();
        let abelian: Vec<bool> = fs.subs.iter().map(|h| h.is_abelian()).collect();
        let map = (0..fs.subs.len())
            .map(|p| {
                let below: Vec<SubId> = (0..=p).filter(|&a| abelian[a] && ci[a].binary_search(&p).is_ok()).collect();
                let m = below.iter().map(|&a| fs.subs[a].order()).max().unwrap_or(1);
                let gens: Vec<Perm> =
                    below.iter().filter(|&&a| fs.subs[a].order() == m).flat_map(|&a| fs.subs[a].gens().to_vec()).collect();
                fs.id_of(&fs.s.closure(gens)).expect("inside S")
            })
            .collect();
        ConjugacyFunctor { name: "thompson".into(), map }
    }

    /// `J_A(P) = <A ∈ 𝒜 : A <= P>`, or `P` itself when no member lies in `P`.
    pub fn generated_by(fs: &FusionSystem, name: &str, collection: &[Group]) -> ConjugacyFunctor {
        let members: Vec<SubId> = collection.iter().filter_map(|a| fs.id_of(a)).collect();
        let ci = fs.contained_in();
        let map = (0..fs.subs.len())
            .map(|p| {
                let inside: Vec<SubId> = members.iter().copied().filter(|&a| ci[a].binary_search(&p).is_ok()).collect();
                if inside.is_empty() {
                    return p;
                }
                let gens: Vec<Perm> = inside.iter().flat_map(|&a| fs.subs[a].gens().to_vec()).collect();
                fs.id_of(&fs.s.closure(gens)).expect("inside S")
            })
            .collect();
        ConjugacyFunctor { name: name.into(), map }
    }

    pub fn apply(&self, p: SubId) -> SubId {
        self.map[p]
    }

    /// Checks `W(P) <= P`, `W(P) != 1` for `P != 1`, and `W(P)^g = W(P^g)`.
    pub fn validate(&self, fs: &FusionSystem) -> Result<()> {
        for p in 0..fs.subs.len() {
            let w = self.map[p];
            if !fs.is_le(w, p) {
                return Err(Error::precondition(format!("{}: W(P) is not contained in P", self.name)));
            }
            if p != 0 && w == 0 {
                return Err(Error::precondition(format!("{}: W(P) is trivial for nontrivial P", self.name)));
            }
            for g in fs.hom_reps(p, fs.s_id()).iter() {
                let pg = fs.conj_id(p, g).expect("inside S");
                if fs.conj_id(w, g) != Some(self.map[pg]) {
                    return Err(Error::precondition(format!("{}: not compatible with conjugation", self.name)));
                }
            }
        }
        Ok(())
    }

    /// `W_1(P) = P`, `W_i(P) = W(N_S(W_{i-1}(P)))`, until the sequence repeats.
    pub fn iterates(&self, fs: &FusionSystem, p: SubId) -> Vec<SubId> {
        let mut seq = vec![p];
        loop {
            let last = *seq.last().expect("nonempty");
            let n = fs.id_of(&fs.s.normalizer(&fs.subs[last])).expect("inside S");
            let next = self.map[n];
            if seq.contains(&next) {
                return seq;
            }
            seq.push(next);
        }
    }
}

/// A general setup `(Γ, S, Y)`: `Y` a normal `p`-subgroup with `C_Γ(Y) <= Y`.
#[derive(Clone, Debug)]
pub struct GeneralSetup {
    pub gamma: Group,
    pub s: Group,
    pub y: Group,
    pub p: u64,
    /// `D = Z(Y)` as a subgroup of `Γ`.
    pub d: Group,
    /// Conjugation action of `Γ` on `D`.
    pub action: Action,
    pub reduced: bool,
}

impl GeneralSetup {
    pub fn new(gamma: &Group, p: u64, y: &Group) -> Result<GeneralSetup> {
        if !y.is_subgroup_of(gamma) {
            return Err(Error::NotSubgroup("Y is not a subgroup".into()));
        }
        if !y.is_p_group(p) {
            return Err(Error::Hypothesis(format!("Y is not a {p}-group")));
        }
        if !y.is_normal_in(gamma) {
            return Err(Error::NotNormal("Y is not normal".into()));
        }
        if !gamma.centralizer(y).is_subgroup_of(y) {
            return Err(Error::Hypothesis("C(Y) is not contained in Y".into()));
        }
        let s = gamma.sylow(p);
        let d = y.center();
        let action = Action::internal(gamma, &d, p)?;
        let reduced = s.centralizer(&d) == *y && {
            let q = Quotient::new(gamma, action.kernel())?;
            q.image().op(p).is_trivial()
        };
        Ok(GeneralSetup { gamma: gamma.clone(), s, y: y.clone(), p, d, action, reduced })
    }

    /// Image check: `N_Γ(Q)` maps onto `N_G(Q̄)` in `G = Γ / C_Γ(D)`.
    pub fn normalizer_image_check(&self, q: &Group) -> Result<bool> {
        let cs = self.s.centralizer(&self.d);
        if !q.is_subgroup_of(&self.s) || !cs.is_subgroup_of(q) {
            return Err(Error::precondition("need C_S(D) <= Q <= S"));
        }
        let quo = Quotient::new(&self.gamma, self.action.kernel())?;
        let lhs = quo.project_subgroup(&self.gamma.normalizer(q));
        let rhs = quo.image().normalizer(&quo.project_subgroup(q));
        Ok(lhs == rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(degree: usize, gens: &[&str]) -> Group {
        Group::generate(degree, gens.iter().map(|s| Perm::parse(degree, s).unwrap()).collect()).unwrap()
    }

    fn a6() -> Group {
        group(6, &["(1 2 3)", "(2 3 4 5 6)"])
    }

    #[test]
    fn a6_classes_and_centrics() {
        let fs = FusionSystem::new(&a6(), 2, 512).unwrap();
        assert_eq!(fs.subgroups().len(), 10);
        let centric_classes: BTreeSet<usize> = fs.centrics().iter().map(|&c| fs.class_of(c)).collect();
        assert_eq!(centric_classes.len(), 4);
        let mut orders: Vec<usize> = centric_classes.iter().map(|&c| fs.subgroup(fs.class_rep(c)).order()).collect();
        orders.sort();
        assert_eq!(orders, vec![4, 4, 4, 8]);
        let z = fs.id_of(&fs.sylow().center()).unwrap();
        assert!(!fs.is_centric(z));
        assert!(fs.is_centric(fs.s_id()) && fs.is_fully_normalized(fs.s_id()));
        for c in fs.centrics() {
            assert!(fs.is_fully_normalized(fs.rep_of(c)));
            let a = fs.conjugator_from_rep(c);
            assert_eq!(&fs.subgroup(fs.rep_of(c)).conjugate(a), fs.subgroup(c));
        }
    }

    #[test]
    fn a6_hom_sets() {
        let fs = FusionSystem::new(&a6(), 2, 512).unwrap();
        let v4s: Vec<SubId> = (0..fs.subgroups().len())
            .filter(|&i| fs.subgroup(i).order() == 4 && fs.subgroup(i).exponent() == 2)
            .collect();
        assert_eq!(v4s.len(), 2);
        assert!(fs.hom_reps(v4s[0], v4s[1]).is_empty());
        assert_eq!(fs.hom_reps(v4s[0], v4s[0]).len(), 6);
        assert_eq!(fs.hom_reps(fs.s_id(), fs.s_id()).len(), 4);
    }

    #[test]
    fn setups() {
        let s4 = group(4, &["(1 2)", "(1 2 3 4)"]);
        let v4 = s4.op(2);
        let st = GeneralSetup::new(&s4, 2, &v4).unwrap();
        assert!(st.reduced);
        let c2 = s4.subgroup(vec![Perm::parse(4, "(1 2)(3 4)").unwrap()]).unwrap();
        assert!(GeneralSetup::new(&s4, 2, &c2).is_err());
        let d8 = group(4, &["(1 2 3 4)", "(1 3)"]);
        let st = GeneralSetup::new(&d8, 2, &d8).unwrap();
        assert!(st.reduced);
        assert!(st.normalizer_image_check(&d8).unwrap());
        let st = GeneralSetup::new(&s4, 2, &v4).unwrap();
        assert!(st.normalizer_image_check(&v4).unwrap());
        assert!(st.normalizer_image_check(&st.s).unwrap());
    }

    #[test]
    fn conjugacy_functors_and_families() {
        for g in [a6(), group(4, &["(1 2)", "(1 2 3 4)"])] {
            let fs = FusionSystem::new(&g, 2, 512).unwrap();
            for w in [ConjugacyFunctor::identity(&fs), ConjugacyFunctor::center(&fs), ConjugacyFunctor::thompson(&fs)] {
                w.validate(&fs).unwrap();
                let wp = fs.well_placed(&w);
                assert!(fs.is_conjugation_family(&wp), "{}", w.name);
                for p in 0..fs.subgroups().len() {
                    assert!(wp.iter().any(|&q| fs.class_of(q) == fs.class_of(p)));
                }
            }
            assert!(fs.is_conjugation_family(&(0..fs.subgroups().len()).collect::<Vec<_>>()));
        }
        let fs = FusionSystem::new(&a6(), 2, 512).unwrap();
        assert!(!fs.is_conjugation_family(&[]));
    }

    #[test]
    fn intervals() {
        let fs = FusionSystem::new(&a6(), 2, 512).unwrap();
        let s = BTreeSet::from([fs.s_id()]);
        let iv = fs.validate_interval(&s);
        assert!(iv.is_interval && iv.contains_s && iv.f_invariant);
        // trivial group and S with a gap
        let gap = BTreeSet::from([0, fs.s_id()]);
        assert!(!fs.validate_interval(&gap).is_interval);
    }
}
