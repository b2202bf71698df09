//! Localities, inclusion-normalized one-cocycles and their rigid maps.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::abelian::AbSubgroup;
use crate::error::{Error, Result};
use crate::fusion::{FusionSystem, GeneralSetup, SubId};
use crate::group::Group;
use crate::modaction::Action;
use crate::perm::Perm;

use super::category::{CenterFunctor, OrbitCategory};
use super::complex::{BarComplex, Cochain};
use super::LimitSetup;

/// `Γ* = {g : Q^g ∈ 𝒬 for some Q ∈ 𝒬}`, stored with the domain
/// `S ∩ gSg^-1` of each `c_g`.
#[derive(Clone, Debug)]
pub struct Locality {
    pub q: BTreeSet<SubId>,
    elements: Vec<Perm>,
    domains: HashMap<Perm, SubId>,
}

/// `{x ∈ S : x^{h_i} ∈ S for all i}`.
fn common_domain(fs: &FusionSystem, within: &[Perm], h: &Perm) -> Vec<Perm> {
    let s = fs.sylow();
    within.iter().filter(|x| s.contains(&x.conj(h))).cloned().collect()
}

fn subgroup_id(fs: &FusionSystem, elements: Vec<Perm>) -> Option<SubId> {
    let degree = fs.gamma().degree();
    fs.id_of(&Group::from_sorted_elements(degree, Vec::new(), elements))
}

impl Locality {
    pub fn new(fs: &FusionSystem, q: &BTreeSet<SubId>) -> Result<Locality> {
        if !q.contains(&fs.s_id()) {
            return Err(Error::precondition("the collection must contain S"));
        }
        let iv = fs.validate_interval(q);
        if !iv.is_interval || !iv.f_invariant {
            return Err(Error::precondition("the collection must be an F-invariant interval"));
        }
        let s = fs.sylow().elements().to_vec();
        let mut elements = Vec::new();
        let mut domains = HashMap::new();
        for g in fs.gamma().elements() {
            let x = common_domain(fs, &s, g);
            if let Some(id) = subgroup_id(fs, x) {
                if q.contains(&id) {
                    elements.push(g.clone());
                    domains.insert(g.clone(), id);
                }
            }
        }
        Ok(Locality { q: q.clone(), elements, domains })
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.domains.contains_key(g)
    }

    /// `S ∩ gSg^-1`, the source of `c_g`.
    pub fn domain(&self, g: &Perm) -> Option<SubId> {
        self.domains.get(g).copied()
    }

    /// `C_D(Γ*)` for an action of `Γ` on `D`.
    pub fn fixed_points(&self, action: &Action) -> AbSubgroup {
        let mut seen = HashSet::new();
        let gens: Vec<Perm> =
            self.elements.iter().filter(|g| seen.insert(action.matrix(g).clone())).cloned().collect();
        action.fixed_points_of(&gens)
    }
}

/// `Γ*` for an overgroup-closed `F`-invariant interval containing `S`.
pub fn gamma_star(fs: &FusionSystem, q: &BTreeSet<SubId>) -> Result<Locality> {
    Locality::new(fs, q)
}

/// A one-cocycle on the full orbit category, obtained from a cocycle on the
/// skeleton plus the coboundary of a zero-cochain.
pub struct Transport<'c, 'a> {
    fs: &'a FusionSystem,
    category: &'c OrbitCategory<'a>,
    functor: &'c CenterFunctor,
    skeletal: HashMap<usize, Perm>,
    correction: HashMap<SubId, Perm>,
}

impl<'c, 'a> Transport<'c, 'a> {
    /// Reads a degree-one cochain of a skeletal complex.
    pub fn new(cx: &BarComplex<'c, 'a>, t: &Cochain) -> Result<Transport<'c, 'a>> {
        if t.degree != 1 {
            return Err(Error::precondition("expected a one-cochain"));
        }
        if !cx.is_zero(&cx.coboundary(t)) {
            return Err(Error::precondition("not a cocycle"));
        }
        let category = cx.category();
        let functor = cx.functor();
        let mut skeletal = HashMap::new();
        for (chain, v) in cx.chains(1).iter().zip(&t.values) {
            let p = category.objects()[chain.src];
            let z = functor.coordinates(p).expect("source in the support").to_perm(v);
            skeletal.insert(chain.mors[0], z);
        }
        Ok(Transport { fs: category.fusion(), category, functor, skeletal, correction: HashMap::new() })
    }

    /// `t([c_g]) ∈ Z(P)` for `P^g <= Q`, both in the support.
    pub fn evaluate(&self, p: SubId, q: SubId, g: &Perm) -> Result<Perm> {
        let fs = self.fs;
        let id = fs.gamma().identity();
        if !self.functor.contains(p) {
            return Ok(id);
        }
        if !fs.subgroup(p).gens().iter().all(|x| fs.subgroup(q).contains(&x.conj(g))) {
            return Err(Error::precondition("P^g is not contained in Q"));
        }
        let (pb, qb) = (fs.rep_of(p), fs.rep_of(q));
        let (ap, aq) = (fs.conjugator_from_rep(p), fs.conjugator_from_rep(q));
        let h = ap.mul(g).mul(&aq.inverse());
        let (i, j) = (self.category.object_index(pb), self.category.object_index(qb));
        let (Some(i), Some(j)) = (i, j) else {
            return Err(Error::precondition("subgroup outside the category"));
        };
        let m = self.category.lookup(i, j, &h)?;
        let base = match self.skeletal.get(&m) {
            Some(z) => z.conj(ap),
            None => id.clone(),
        };
        let mut z = base;
        if let Some(uq) = self.correction.get(&q) {
            z = z.mul(&uq.conj(&g.inverse()));
        }
        if let Some(up) = self.correction.get(&p) {
            z = z.mul(&up.inverse());
        }
        Ok(z)
    }

    /// Whether `t([ι_P^Q]) = 1` for all nested members `P <= Q`.
    pub fn is_inclusion_normalized(&self) -> bool {
        let id = self.fs.gamma().identity();
        let support: Vec<SubId> = self.functor.support().iter().copied().collect();
        support.iter().all(|&p| {
            support.iter().filter(|&&q| self.fs.is_le(p, q)).all(|&q| {
                self.evaluate(p, q, &id).is_ok_and(|z| z.is_identity())
            })
        })
    }

    /// Values on the one-chains of another complex over the same fusion system.
    pub fn to_cochain(&self, cx: &BarComplex<'_, '_>) -> Result<Cochain> {
        let category = cx.category();
        let mut values = Vec::new();
        for chain in cx.chains(1) {
            let m = &category.morphisms()[chain.mors[0]];
            let (p, q) = (category.objects()[m.src], category.objects()[m.tgt]);
            let z = self.evaluate(p, q, &m.g)?;
            let coords = cx.functor().coordinates(p).expect("source in the support");
            values.push(coords.to_vector(&z).ok_or_else(|| Error::internal("value outside Z(P)"))?);
        }
        Ok(Cochain { degree: 1, values })
    }
}

/// `t du` with `u(P) = t([ι_P^S])`, which vanishes on all inclusions.
pub fn inclusion_normalize<'c, 'a>(t: &Transport<'c, 'a>) -> Result<Transport<'c, 'a>> {
    let fs = t.fs;
    let id = fs.gamma().identity();
    let mut correction = HashMap::new();
    for &p in t.functor.support() {
        correction.insert(p, t.evaluate(p, fs.s_id(), &id)?);
    }
    let mut merged = t.correction.clone();
    for (p, u) in correction {
        let z = match merged.get(&p) {
            Some(old) => old.mul(&u),
            None => u,
        };
        merged.insert(p, z);
    }
    Ok(Transport { fs, category: t.category, functor: t.functor, skeletal: t.skeletal.clone(), correction: merged })
}

/// `t du` for the constant zero-cochain `u(Q) = z`, `z ∈ Z(S)`.
pub fn twist_by_central<'c, 'a>(t: &Transport<'c, 'a>, z: &Perm) -> Result<Transport<'c, 'a>> {
    if !t.fs.sylow().center().contains(z) {
        return Err(Error::precondition("z is not central in S"));
    }
    let mut merged = t.correction.clone();
    for &p in t.functor.support() {
        let v = match merged.get(&p) {
            Some(old) => old.mul(z),
            None => z.clone(),
        };
        merged.insert(p, v);
    }
    Ok(Transport { fs: t.fs, category: t.category, functor: t.functor, skeletal: t.skeletal.clone(), correction: merged })
}

/// `g -> t([c_g]) g` on `Γ*`.
pub struct RigidMap {
    pub locality: Locality,
    map: HashMap<Perm, Perm>,
}

pub fn rigid_map(fs: &FusionSystem, t: &Transport<'_, '_>) -> Result<RigidMap> {
    if !t.is_inclusion_normalized() {
        return Err(Error::precondition("cocycle is not inclusion-normalized"));
    }
    let locality = Locality::new(fs, t.functor.support())?;
    let mut map = HashMap::new();
    for g in locality.elements() {
        let x = locality.domain(g).expect("element of the locality");
        let z = t.evaluate(x, fs.s_id(), g)?;
        map.insert(g.clone(), z.mul(g));
    }
    Ok(RigidMap { locality, map })
}

impl RigidMap {
    pub fn apply(&self, g: &Perm) -> Option<&Perm> {
        self.map.get(g)
    }

    pub fn is_identity_on(&self, elements: &[Perm]) -> bool {
        elements.iter().all(|g| self.map.get(g) == Some(g))
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().all(|(g, h)| g == h)
    }

    pub fn is_bijection(&self) -> bool {
        let image: HashSet<&Perm> = self.map.values().collect();
        image.len() == self.map.len() && image.iter().all(|h| self.locality.contains(h))
    }

    /// A chain `g_1, ..., g_n` (`n <= max_len`) with some `Q ∈ 𝒬` such that
    /// every `Q^{g_1...g_i} ∈ 𝒬`, on which `τ` fails to be multiplicative.
    pub fn multiplicativity_defect(&self, fs: &FusionSystem, max_len: usize) -> Option<Vec<Perm>> {
        let s = fs.sylow().elements().to_vec();
        let mut stack: Vec<(Vec<Perm>, Perm, Perm, Vec<Perm>)> =
            vec![(Vec::new(), fs.gamma().identity(), fs.gamma().identity(), s)];
        let mut memo: HashMap<Vec<Perm>, bool> = HashMap::new();
        let mut admissible = |dom: &Vec<Perm>| -> bool {
            if let Some(&b) = memo.get(dom) {
                return b;
            }
            let b = subgroup_id(fs, dom.clone()).is_some_and(|id| self.locality.q.contains(&id));
            memo.insert(dom.clone(), b);
            b
        };
        while let Some((chain, prod, tau_prod, dom)) = stack.pop() {
            if chain.len() == max_len {
                continue;
            }
            for g in self.locality.elements() {
                let next = prod.mul(g);
                let d = common_domain(fs, &dom, &next);
                if !admissible(&d) {
                    continue;
                }
                let tp = tau_prod.mul(&self.map[g]);
                let mut c = chain.clone();
                c.push(g.clone());
                if self.map.get(&next) != Some(&tp) {
                    return Some(c);
                }
                stack.push((c, next, tp, d));
            }
        }
        None
    }

    /// `z ∈ Z(N_S(Q))` with `τ(g) = g^z` on `N_Γ(Q)`, by exhaustive search.
    pub fn local_conjugator(&self, fs: &FusionSystem, q: SubId) -> Option<Perm> {
        let qg = fs.subgroup(q);
        let n = fs.gamma().normalizer(qg);
        let zn = fs.sylow().normalizer(qg).center();
        zn.elements()
            .iter()
            .find(|z| n.elements().iter().all(|g| self.map.get(g) == Some(&g.conj(z))))
            .cloned()
    }
}

/// Outcome of restricting `L^1(F;𝒬)` to `L^1(F_0;𝒬_0)`.
#[derive(Clone, Debug, Serialize)]
pub struct RestrictionReport {
    pub source: Vec<u128>,
    pub target: Vec<u128>,
    pub classes_checked: usize,
    pub injective: bool,
}

/// Checks that restriction `L^1(F;𝒬) -> L^1(F_0;𝒬_0)` is injective by
/// restricting every nonzero class.
pub fn restriction_injectivity_check(
    setup: &GeneralSetup,
    gamma0: &Group,
    q: &BTreeSet<SubId>,
    fs: &FusionSystem,
    cap: usize,
) -> Result<RestrictionReport> {
    if !gamma0.is_subgroup_of(&setup.gamma) || !gamma0.is_normal_in(&setup.gamma) {
        return Err(Error::Hypothesis("Γ0 is not a normal subgroup".into()));
    }
    if !setup.y.is_subgroup_of(gamma0) {
        return Err(Error::Hypothesis("Γ0 does not contain Y".into()));
    }
    if fs.sylow() != &setup.s {
        return Err(Error::precondition("fusion system does not belong to the setup"));
    }
    if !q.contains(&fs.s_id()) {
        return Err(Error::Hypothesis("S is not in 𝒬".into()));
    }
    let iv = fs.validate_interval(q);
    if !iv.is_interval || !iv.f_invariant {
        return Err(Error::Hypothesis("𝒬 is not an F-invariant interval".into()));
    }
    for &m in q {
        let h = fs.subgroup(m);
        if !setup.y.is_subgroup_of(h) {
            return Err(Error::Hypothesis("𝒬 has a member not containing Y".into()));
        }
        let cut = h.intersection(gamma0);
        if !fs.id_of(&cut).is_some_and(|id| q.contains(&id)) {
            return Err(Error::Hypothesis("𝒬 is not closed under intersection with Γ0".into()));
        }
    }
    let s0 = setup.s.intersection(gamma0);
    let fs0 = FusionSystem::with_sylow(gamma0, &s0, setup.p, crate::lattice::DEFAULT_PGROUP_CAP.max(setup.s.order()))?;
    let q0: BTreeSet<SubId> = q
        .iter()
        .map(|&m| fs.subgroup(m))
        .filter(|h| h.is_subgroup_of(gamma0))
        .filter_map(|h| fs0.id_of(h))
        .collect();

    let big = LimitSetup::new(fs, q, true)?;
    let cx = big.complex(2, cap)?;
    let ring = cx.ring();
    let (orders, witnesses) = cx.limit_over(&ring, 1)?;
    let small = LimitSetup::new(&fs0, &q0, true)?;
    let cx0 = small.complex(2, cap)?;
    let (target, _) = cx0.limit_over(&cx0.ring(), 1)?;

    let modulus = ring.modulus();
    let mut classes_checked = 0;
    let mut injective = true;
    let total: u128 = orders.iter().product();
    for idx in 1..total {
        let mut rest = idx;
        let mut flat = vec![0u64; cx.dimension(1)];
        for (o, w) in orders.iter().zip(&witnesses) {
            let c = (rest % o) as u64;
            rest /= o;
            for (f, x) in flat.iter_mut().zip(w) {
                *f = (*f + c * x) % modulus;
            }
        }
        let t = Transport::new(&cx, &cx.cochain(1, &flat))?;
        let restricted = restrict(&t, &cx0)?;
        classes_checked += 1;
        if cx0.is_coboundary(&restricted) {
            injective = false;
        }
    }
    Ok(RestrictionReport { source: orders, target, classes_checked, injective })
}

/// Values of a cocycle of `F` on the one-chains of a complex of a subsystem.
fn restrict(t: &Transport<'_, '_>, cx0: &BarComplex<'_, '_>) -> Result<Cochain> {
    let fs = t.fs;
    let cat0 = cx0.category();
    let fs0 = cat0.fusion();
    let mut values = Vec::new();
    for chain in cx0.chains(1) {
        let m = &cat0.morphisms()[chain.mors[0]];
        let (p0, q0) = (cat0.objects()[m.src], cat0.objects()[m.tgt]);
        let p = fs.id_of(fs0.subgroup(p0)).ok_or_else(|| Error::internal("subgroup missing"))?;
        let q = fs.id_of(fs0.subgroup(q0)).ok_or_else(|| Error::internal("subgroup missing"))?;
        let z = t.evaluate(p, q, &m.g)?;
        let coords = cx0.functor().coordinates(p0).expect("source in the support");
        values.push(coords.to_vector(&z).ok_or_else(|| Error::internal("value outside Z(P)"))?);
    }
    let c = Cochain { degree: 1, values };
    if !cx0.is_zero(&cx0.coboundary(&c)) {
        return Err(Error::internal("restriction is not a cocycle"));
    }
    Ok(c)
}

/// Both sides of `|C_D(Γ*)| = |C_D(Γ)| · |L^1(F;R)|` for a setup, with
/// `𝒬 = 𝒮(S)_{>=Y} - R`.
#[derive(Clone, Debug, Serialize)]
pub struct LocalityFormula {
    pub fixed_on_gamma: u128,
    pub fixed_on_gamma_star: u128,
    pub limit_order: u128,
}

impl LocalityFormula {
    pub fn holds(&self) -> bool {
        self.fixed_on_gamma_star == self.fixed_on_gamma * self.limit_order
    }
}

pub fn locality_formula(setup: &GeneralSetup, fs: &FusionSystem, r: &BTreeSet<SubId>, cap: usize) -> Result<LocalityFormula> {
    let y = fs.id_of(&setup.y).ok_or_else(|| Error::precondition("Y is not a subgroup of S"))?;
    let u: BTreeSet<SubId> = fs.overgroups(y).into_iter().collect();
    if !r.is_subset(&u) {
        return Err(Error::precondition("R is not inside the overgroups of Y"));
    }
    let q: BTreeSet<SubId> = u.difference(r).copied().collect();
    let module = setup.action.module();
    let star = Locality::new(fs, &q)?;
    let fixed_on_gamma_star = star.fixed_points(&setup.action).order(module);
    let fixed_on_gamma = setup.action.fixed_points(&setup.gamma).order(module);
    let limit_order = super::higher_limits(fs, r, 1, cap)?[1].order();
    Ok(LocalityFormula { fixed_on_gamma, fixed_on_gamma_star, limit_order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::ConjugacyFunctor;
    use crate::orbitlim::{higher_limits, DEFAULT_COCHAIN_CAP};

    fn group(degree: usize, gens: &[&str]) -> Group {
        Group::generate(degree, gens.iter().map(|s| Perm::parse(degree, s).unwrap()).collect()).unwrap()
    }

    fn a6() -> FusionSystem {
        FusionSystem::new(&group(6, &["(1 2 3)", "(2 3 4 5 6)"]), 2, 512).unwrap()
    }

    #[test]
    fn a6_rigid_map_of_nontrivial_class() {
        let fs = a6();
        let c: BTreeSet<SubId> = fs.centrics().into_iter().collect();
        let setup = LimitSetup::new(&fs, &c, true).unwrap();
        let cx = setup.complex(2, DEFAULT_COCHAIN_CAP).unwrap();
        let r = higher_limits(&fs, &c, 1, DEFAULT_COCHAIN_CAP).unwrap();
        let w = &r[1].witnesses[0];
        let t = Transport::new(&cx, w).unwrap();
        let tn = inclusion_normalize(&t).unwrap();
        assert!(tn.is_inclusion_normalized());
        let back = tn.to_cochain(&cx).unwrap();
        assert!(cx.is_zero(&cx.coboundary(&back)));
        assert!(!cx.is_coboundary(&back));
        let tau = rigid_map(&fs, &tn).unwrap();
        assert!(tau.is_identity_on(fs.sylow().elements()));
        assert!(tau.is_bijection());
        assert!(!tau.is_identity());
        assert_eq!(tau.multiplicativity_defect(&fs, 3), None);
        for &q in &c {
            if fs.is_fully_normalized(q) {
                let z = tau.local_conjugator(&fs, q).expect("local conjugator");
                assert!(fs.sylow().normalizer(fs.subgroup(q)).center().contains(&z));
            }
        }
        // some member of an Alperin family sees the nontrivial class
        let family = fs.well_placed(&ConjugacyFunctor::identity(&fs));
        assert!(fs.is_conjugation_family(&family));
        let nontrivial = family.iter().filter(|t| c.contains(t)).any(|&t| {
            let n = fs.gamma().normalizer(fs.subgroup(t));
            !tau.is_identity_on(n.elements())
        });
        assert!(nontrivial);
    }

    #[test]
    fn zero_and_central_twists() {
        let fs = a6();
        let c: BTreeSet<SubId> = fs.centrics().into_iter().collect();
        let setup = LimitSetup::new(&fs, &c, true).unwrap();
        let cx = setup.complex(2, DEFAULT_COCHAIN_CAP).unwrap();
        let zero = cx.cochain(1, &vec![0; cx.dimension(1)]);
        let t = Transport::new(&cx, &zero).unwrap();
        assert!(t.is_inclusion_normalized());
        let tau = rigid_map(&fs, &t).unwrap();
        assert!(tau.is_identity());
        let z = fs.sylow().center().elements().iter().find(|x| !x.is_identity()).unwrap().clone();
        let tz = twist_by_central(&t, &z).unwrap();
        assert!(tz.is_inclusion_normalized());
        let tau = rigid_map(&fs, &tz).unwrap();
        for g in tau.locality.elements() {
            assert_eq!(tau.apply(g), Some(&g.conj(&z)));
        }
        let back = tz.to_cochain(&cx).unwrap();
        assert!(cx.is_coboundary(&back));
    }

    #[test]
    fn locality_examples() {
        let s4 = group(4, &["(1 2)", "(1 2 3 4)"]);
        let y = s4.op(2);
        let st = GeneralSetup::new(&s4, 2, &y).unwrap();
        let fs = FusionSystem::with_sylow(&s4, &st.s, 2, 512).unwrap();
        let yid = fs.id_of(&y).unwrap();
        let u: BTreeSet<SubId> = fs.overgroups(yid).into_iter().collect();
        assert_eq!(Locality::new(&fs, &u).unwrap().elements().len(), 24);
        let top = BTreeSet::from([fs.s_id()]);
        let star = Locality::new(&fs, &top).unwrap();
        assert_eq!(star.elements(), fs.gamma().normalizer(fs.sylow()).elements());
        let r = BTreeSet::from([yid]);
        let f = locality_formula(&st, &fs, &r, DEFAULT_COCHAIN_CAP).unwrap();
        assert!(f.holds());
        assert_eq!((f.fixed_on_gamma, f.fixed_on_gamma_star, f.limit_order), (1, 2, 2));
    }

    #[test]
    fn restriction_checks() {
        let s4 = group(4, &["(1 2)", "(1 2 3 4)"]);
        let y = s4.op(2);
        let st = GeneralSetup::new(&s4, 2, &y).unwrap();
        let fs = FusionSystem::with_sylow(&s4, &st.s, 2, 512).unwrap();
        let yid = fs.id_of(&y).unwrap();
        let u: BTreeSet<SubId> = fs.overgroups(yid).into_iter().collect();
        let top = BTreeSet::from([fs.s_id()]);
        let a4 = s4.subgroup(vec![Perm::parse(4, "(1 2 3)").unwrap(), Perm::parse(4, "(1 2)(3 4)").unwrap()]).unwrap();
        let rep = restriction_injectivity_check(&st, &a4, &u, &fs, DEFAULT_COCHAIN_CAP).unwrap();
        assert!(rep.injective && rep.source.is_empty());
        let rep = restriction_injectivity_check(&st, &s4, &top, &fs, DEFAULT_COCHAIN_CAP).unwrap();
        assert!(rep.injective);
        assert_eq!(rep.source, rep.target);
        assert!(restriction_injectivity_check(&st, &a4, &top, &fs, DEFAULT_COCHAIN_CAP).is_err());
    }
}
