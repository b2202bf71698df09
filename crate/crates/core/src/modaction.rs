//! Groups acting on finite abelian `p`-groups by automorphisms.
//!
//! Vectors are rows and `v^g = v M_g`, so `M_{gh} = M_g M_h`.

use std::collections::VecDeque;

use crate::abelian::{AbSubgroup, PAbelianGroup, PermCoordinates, Vector};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::linalg::Submodule;
use crate::perm::Perm;
use crate::quotient::Quotient;
use crate::ring::PivotRing;

/// Row `i` is the image of the `i`-th basis vector.
pub type Matrix = Vec<Vec<u64>>;

#[derive(Clone, Debug)]
pub struct Action {
    group: Group,
    module: PAbelianGroup,
    /// One matrix per element, indexed like `group.elements()`.
    mats: Vec<Matrix>,
    kernel: Group,
    coordinates: Option<PermCoordinates>,
}

fn identity_matrix(r: usize) -> Matrix {
    (0..r).map(|i| (0..r).map(|j| u64::from(i == j)).collect()).collect()
}

impl Action {
    /// Extends generator matrices to the whole group, checking the
    /// compatibility congruences and that the result is a homomorphism.
    pub fn from_generator_matrices(group: &Group, module: PAbelianGroup, gen_mats: Vec<Matrix>) -> Result<Action> {
        if gen_mats.len() != group.gens().len() {
            return Err(Error::precondition(format!(
                "{} matrices for {} nontrivial generators",
                gen_mats.len(),
                group.gens().len()
            )));
        }
        let pairs = group.gens().iter().cloned().zip(gen_mats).collect();
        Action::from_generator_pairs(group, module, pairs)
    }

    /// Like [`Action::from_generator_matrices`] with explicit generators,
    /// which must generate `group`.
    pub fn from_generator_pairs(group: &Group, module: PAbelianGroup, pairs: Vec<(Perm, Matrix)>) -> Result<Action> {
        let r = module.rank();
        let gens: Vec<Perm> = pairs.iter().map(|(g, _)| g.clone()).collect();
        if group.closure(gens.clone()).order() != group.order() {
            return Err(Error::precondition("generators do not generate the group"));
        }
        let mut mats_in = Vec::new();
        for (_, m) in pairs {
            if m.len() != r || m.iter().any(|row| row.len() != r) {
                return Err(Error::precondition(format!("matrix is not {r}x{r}")));
            }
            for i in 0..r {
                for j in 0..r {
                    // p^{e_i} M_ij must vanish modulo p^{e_j}
                    let v = (module.modulus(i) as u128 * m[i][j] as u128) % module.modulus(j) as u128;
                    if v != 0 {
                        return Err(Error::precondition(format!("entry ({},{}) violates the order congruence", i + 1, j + 1)));
                    }
                }
            }
            mats_in.push(m.into_iter().map(|row| module.normalize(&row)).collect::<Matrix>());
        }
        let mut mats: Vec<Option<Matrix>> = vec![None; group.order()];
        let id = group.index_of(&group.identity()).expect("identity");
        mats[id] = Some(identity_matrix(r));
        let mut queue = VecDeque::from([id]);
        let m = Self::mat_mul_with(&module);
        while let Some(i) = queue.pop_front() {
            let x = group.elements()[i].clone();
            let mx = mats[i].clone().expect("visited");
            for (s, ms) in gens.iter().zip(&mats_in) {
                let j = group.index_of(&x.mul(s)).expect("closed");
                let prod = m(&mx, ms);
                match &mats[j] {
                    Some(existing) if *existing != prod => {
                        return Err(Error::precondition("matrices do not define a homomorphism"));
                    }
                    Some(_) => {}
                    None => {
                        mats[j] = Some(prod);
                        queue.push_back(j);
                    }
                }
            }
        }
        drop(m);
        let mats: Vec<Matrix> = mats.into_iter().map(|m| m.expect("group is connected")).collect();
        let ident = identity_matrix(r);
        let kernel_els: Vec<Perm> =
            group.elements().iter().zip(&mats).filter(|(_, m)| **m == ident).map(|(g, _)| g.clone()).collect();
        let kernel = group.closure(crate::group::small_generating_set(&kernel_els));
        Ok(Action { group: group.clone(), module, mats, kernel, coordinates: None })
    }

    fn mat_mul_with(module: &PAbelianGroup) -> impl Fn(&Matrix, &Matrix) -> Matrix + '_ {
        move |a: &Matrix, b: &Matrix| {
            let r = module.rank();
            (0..r)
                .map(|i| {
                    (0..r)
                        .map(|j| {
                            let m = module.modulus(j) as u128;
                            (0..r).fold(0u128, |acc, k| (acc + a[i][k] as u128 * b[k][j] as u128) % m) as u64
                        })
                        .collect()
                })
                .collect()
        }
    }

    /// Conjugation action of `gamma` on an abelian normal `p`-subgroup `d`.
    pub fn internal(gamma: &Group, d: &Group, p: u64) -> Result<Action> {
        if !d.is_subgroup_of(gamma) {
            return Err(Error::NotSubgroup("D is not contained in the group".into()));
        }
        if !d.is_abelian() {
            return Err(Error::NotAbelian("D is not abelian".into()));
        }
        if !d.is_normal_in(gamma) {
            return Err(Error::NotNormal("D is not normal".into()));
        }
        let coords = PermCoordinates::new(d, p)?;
        let gen_mats = gamma
            .gens()
            .iter()
            .map(|g| coords.basis.iter().map(|b| coords.to_vector(&b.conj(g)).expect("normal")).collect())
            .collect();
        let mut act = Action::from_generator_matrices(gamma, coords.module.clone(), gen_mats)?;
        act.coordinates = Some(coords);
        Ok(act)
    }

    /// The faithful action of `G / C_G(D)`, together with the quotient map.
    pub fn faithful_quotient(&self) -> Result<(Quotient, Action)> {
        let q = Quotient::new(&self.group, &self.kernel)?;
        let gen_mats = q.image().gens().iter().map(|y| self.matrix(&q.lift(y)).clone()).collect();
        let mut act = Action::from_generator_matrices(q.image(), self.module.clone(), gen_mats)?;
        act.coordinates = self.coordinates.clone();
        Ok((q, act))
    }

    /// Restriction to a subgroup of the acting group.
    pub fn restrict(&self, h: &Group) -> Result<Action> {
        if !h.is_subgroup_of(&self.group) {
            return Err(Error::NotSubgroup("restriction to a non-subgroup".into()));
        }
        let gen_mats = h.gens().iter().map(|x| self.matrix(x).clone()).collect();
        let mut act = Action::from_generator_matrices(h, self.module.clone(), gen_mats)?;
        act.coordinates = self.coordinates.clone();
        Ok(act)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn module(&self) -> &PAbelianGroup {
        &self.module
    }

    pub fn kernel(&self) -> &Group {
        &self.kernel
    }

    pub fn is_faithful(&self) -> bool {
        self.kernel.is_trivial()
    }

    pub fn coordinates(&self) -> Option<&PermCoordinates> {
        self.coordinates.as_ref()
    }

    pub fn matrix(&self, g: &Perm) -> &Matrix {
        &self.mats[self.group.index_of(g).expect("element of the acting group")]
    }

    /// `v^g`.
    pub fn apply(&self, v: &[u64], g: &Perm) -> Vector {
        let m = self.matrix(g);
        let d = &self.module;
        (0..d.rank())
            .map(|j| {
                let md = d.modulus(j) as u128;
                (0..d.rank()).fold(0u128, |acc, i| (acc + v[i] as u128 * m[i][j] as u128) % md) as u64
            })
            .collect()
    }

    /// `-v + v^g`, the additive form of `[v, g]`.
    pub fn commutator_vector(&self, v: &[u64], g: &Perm) -> Vector {
        self.module.sub(&self.apply(v, g), v)
    }

    /// `C_D(H)` for a subgroup or subset `H` of the acting group.
    pub fn fixed_points_of(&self, h: &[Perm]) -> AbSubgroup {
        let d = &self.module;
        let r = d.rank();
        let hs: Vec<&Perm> = h.iter().filter(|x| !x.is_identity()).collect();
        if hs.is_empty() || r == 0 {
            return d.whole();
        }
        let k = hs.len();
        let ring = d.ring();
        // block row map v -> (v (M_h - I))_h into R^{r k}
        let a: Vec<Vec<u64>> = (0..r)
            .map(|i| {
                let mut row = Vec::with_capacity(r * k);
                for x in &hs {
                    let m = self.matrix(x);
                    for j in 0..r {
                        let diag = u64::from(i == j);
                        row.push(ring.sub(&m[i][j], &diag));
                    }
                }
                row
            })
            .collect();
        let rel = d.relations();
        let mut target_rows = Vec::new();
        for b in 0..k {
            for row in &rel.rows {
                let mut t = vec![0u64; r * k];
                t[b * r..(b + 1) * r].copy_from_slice(row);
                target_rows.push(t);
            }
        }
        let target = Submodule::from_generators(ring, target_rows, r * k);
        let lat = Submodule::preimage(ring, &a, &target);
        d.from_lattice(lat)
    }

    pub fn fixed_points(&self, h: &Group) -> AbSubgroup {
        self.fixed_points_of(h.gens())
    }

    /// `[U, A]`, generated by `-u + u^a` over generators `u` and all `a ∈ A`.
    pub fn commutator(&self, u: &AbSubgroup, a: &Group) -> AbSubgroup {
        let d = &self.module;
        let mut gens = Vec::new();
        for v in u.generators(d) {
            for x in a.elements() {
                let c = self.commutator_vector(&v, x);
                if !d.is_zero(&c) {
                    gens.push(c);
                }
            }
        }
        d.span(&gens)
    }

    /// `[D, A, ..., A]` with `depth` copies of `A`.
    pub fn commutator_series(&self, a: &Group, depth: usize) -> AbSubgroup {
        let mut u = self.module.whole();
        for _ in 0..depth {
            u = self.commutator(&u, a);
        }
        u
    }

    /// `[D, A, A] = 1` while `[D, A] != 1`.
    pub fn is_quadratic(&self, a: &Group) -> bool {
        let d = &self.module;
        let c1 = self.commutator(&d.whole(), a);
        !c1.is_trivial(d) && self.commutator(&c1, a).is_trivial(d)
    }

    pub fn is_fixed_by(&self, v: &[u64], h: &[Perm]) -> bool {
        h.iter().all(|x| self.apply(v, x) == v)
    }

    /// `N_H^G(v)`: the sum of `v^g` over minimal right coset representatives.
    pub fn norm(&self, h: &Group, v: &[u64]) -> Result<Vector> {
        let reps = self.group.right_coset_reps(h);
        self.norm_with_reps(h, v, &reps)
    }

    pub fn norm_with_reps(&self, h: &Group, v: &[u64], reps: &[Perm]) -> Result<Vector> {
        if !self.is_fixed_by(v, h.gens()) {
            return Err(Error::precondition("vector is not fixed by the subgroup"));
        }
        Ok(self.sum_images(v, reps))
    }

    /// Norm from `K` up to `G` restricted to `C_D(H)` for `H <= K`,
    /// computed within the subgroup `K` as acting group.
    pub fn relative_norm(&self, h: &Group, k: &Group, v: &[u64]) -> Result<Vector> {
        if !self.is_fixed_by(v, h.gens()) {
            return Err(Error::precondition("vector is not fixed by the subgroup"));
        }
        let reps = k.right_coset_reps(h);
        Ok(self.sum_images(v, &reps))
    }

    fn sum_images(&self, v: &[u64], reps: &[Perm]) -> Vector {
        reps.iter().fold(self.module.zero(), |acc, g| self.module.add(&acc, &self.apply(v, g)))
    }

    /// Whether `N_H^K` vanishes on all of `V` restricted to `C_V(H)`.
    pub fn norm_vanishes(&self, h: &Group, k: &Group, v_sub: &AbSubgroup) -> bool {
        let d = &self.module;
        let fixed = self.fixed_points(h).meet(d, v_sub);
        let reps = k.right_coset_reps(h);
        fixed.generators(d).iter().all(|v| d.is_zero(&self.sum_images(v, &reps)))
    }

    /// Norm from a subset `X` relative to a transversal.
    pub fn norm_transversal(&self, t: &Transversal, v: &[u64]) -> Result<Vector> {
        if !self.is_fixed_by(v, &t.x) {
            return Err(Error::precondition("vector is not fixed by the base set"));
        }
        Ok(self.sum_images(v, &t.y))
    }

    /// Chain of `G`-invariant subgroups `0 = D_0 < ... < D_n = D` whose
    /// successive quotients are irreducible.
    pub fn composition_series(&self) -> Vec<AbSubgroup> {
        let d = &self.module;
        let mut chain = vec![d.trivial_subgroup()];
        loop {
            let top = chain.last().expect("nonempty").clone();
            if top.is_whole(d) {
                return chain;
            }
            // a minimal invariant subgroup strictly above `top`
            let mut best: Option<AbSubgroup> = None;
            for v in d.elements() {
                if top.contains(d, &v) {
                    continue;
                }
                let cand = self.invariant_closure(&top.join(d, &d.span(std::slice::from_ref(&v))));
                let smaller = best.as_ref().is_none_or(|b| cand.log_order(d) < b.log_order(d));
                if smaller {
                    best = Some(cand);
                }
            }
            chain.push(best.expect("proper subgroup"));
        }
    }

    pub fn invariant_closure(&self, u: &AbSubgroup) -> AbSubgroup {
        let d = &self.module;
        let mut cur = u.clone();
        loop {
            let mut gens = Vec::new();
            for v in cur.generators(d) {
                for g in self.group.gens() {
                    let w = self.apply(&v, g);
                    if !cur.contains(d, &w) {
                        gens.push(w);
                    }
                }
            }
            if gens.is_empty() {
                return cur;
            }
            cur = cur.join(d, &d.span(&gens));
        }
    }

    pub fn is_invariant(&self, u: &AbSubgroup, h: &[Perm]) -> bool {
        let d = &self.module;
        u.generators(d).iter().all(|v| h.iter().all(|g| u.contains(d, &self.apply(v, g))))
    }
}

/// A transversal `Y` to a subset `X` of a group: every element is `x y`
/// for unique `x ∈ X`, `y ∈ Y`.
#[derive(Clone, Debug)]
pub struct Transversal {
    pub x: Vec<Perm>,
    pub y: Vec<Perm>,
}

impl Transversal {
    pub fn new(g: &Group, x: Vec<Perm>, y: Vec<Perm>) -> Result<Transversal> {
        if x.len() * y.len() != g.order() {
            return Err(Error::precondition("transversal has the wrong size"));
        }
        let mut hit = vec![false; g.order()];
        for a in &x {
            for b in &y {
                let i = g.index_of(&a.mul(b)).ok_or_else(|| Error::precondition("product outside the group"))?;
                if hit[i] {
                    return Err(Error::precondition("product map is not injective"));
                }
                hit[i] = true;
            }
        }
        Ok(Transversal { x, y })
    }

    /// Finds a transversal by peeling translates `X y` with backtracking.
    pub fn find(g: &Group, x: &[Perm]) -> Option<Transversal> {
        fn go(g: &Group, x: &[Perm], covered: &mut Vec<bool>, ys: &mut Vec<Perm>) -> bool {
            let Some(first) = covered.iter().position(|c| !c) else { return true };
            let target = g.elements()[first].clone();
            for a in x {
                let y = a.inverse().mul(&target);
                let idx: Vec<usize> = x.iter().map(|b| g.index_of(&b.mul(&y)).expect("inside")).collect();
                let mut distinct = idx.clone();
                distinct.sort();
                distinct.dedup();
                if distinct.len() != idx.len() || idx.iter().any(|&i| covered[i]) {
                    continue;
                }
                for &i in &idx {
                    covered[i] = true;
                }
                ys.push(y);
                if go(g, x, covered, ys) {
                    return true;
                }
                ys.pop();
                for &i in &idx {
                    covered[i] = false;
                }
            }
            false
        }
        if x.is_empty() || !g.order().is_multiple_of(x.len()) {
            return None;
        }
        let mut covered = vec![false; g.order()];
        let mut ys = Vec::new();
        if go(g, x, &mut covered, &mut ys) {
            Transversal::new(g, x.to_vec(), ys).ok()
        } else {
            None
        }
    }
}

/// The product set `X Y`.
pub fn product_set(x: &[Perm], y: &[Perm]) -> Vec<Perm> {
    let mut out: Vec<Perm> = x.iter().flat_map(|a| y.iter().map(move |b| a.mul(b))).collect();
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(degree: usize, gens: &[&str]) -> Group {
        Group::generate(degree, gens.iter().map(|s| Perm::parse(degree, s).unwrap()).collect()).unwrap()
    }

    /// S3 on the natural module {0, e1, e2, e1+e2}, generators (1 2), (1 2 3).
    fn s3_natural() -> Action {
        let g = group(3, &["(1 2)", "(1 2 3)"]);
        let d = PAbelianGroup::elementary(2, 2);
        // basis e1 = {1,3}, e2 = {2,3}; (1 2) swaps; (1 2 3): {1,3} -> {2,1} = e1+e2, {2,3} -> {3,1} = e1
        let mats = g
            .gens()
            .iter()
            .map(|x| if x.order() == 2 { vec![vec![0, 1], vec![1, 0]] } else { vec![vec![1, 1], vec![1, 0]] })
            .collect();
        Action::from_generator_matrices(&g, d, mats).unwrap()
    }

    fn brute_fixed(act: &Action, h: &Group) -> usize {
        act.module().elements().iter().filter(|v| act.is_fixed_by(v, h.elements())).count()
    }

    #[test]
    fn internal_action_of_s4_on_v4() {
        let s4 = group(4, &["(1 2)", "(1 2 3 4)"]);
        let v4 = s4.op(2);
        let act = Action::internal(&s4, &v4, 2).unwrap();
        assert_eq!(act.kernel(), &s4.centralizer(&v4));
        assert_eq!(act.kernel().order(), 4);
        let (q, f) = act.faithful_quotient().unwrap();
        assert_eq!(q.image().order(), 6);
        assert!(f.is_faithful());
        assert!(act.fixed_points(&s4).is_trivial(act.module()));
        let d8 = group(4, &["(1 2 3 4)", "(1 3)"]);
        let z = d8.center();
        let act = Action::internal(&d8, &z, 2).unwrap();
        assert_eq!(act.kernel(), &d8);
    }

    #[test]
    fn fixed_points_match_brute_force() {
        let act = s3_natural();
        let d = act.module();
        for h in [Group::trivial(3), act.group().sylow(2), act.group().sylow(3), act.group().clone()] {
            assert_eq!(act.fixed_points(&h).order(d), brute_fixed(&act, &h) as u128);
        }
        assert_eq!(act.fixed_points(&act.group().sylow(2)).order(d), 2);
    }

    #[test]
    fn quadratic_and_commutators() {
        let act = s3_natural();
        let d = act.module();
        let t = act.group().sylow(2);
        assert_eq!(act.commutator_series(&t, 1).order(d), 2);
        assert!(act.commutator_series(&t, 2).is_trivial(d));
        assert!(act.is_quadratic(&t));
        assert!(!act.is_quadratic(&Group::trivial(3)));
        assert!(!act.is_quadratic(act.group()));
    }

    #[test]
    fn bad_matrices_rejected() {
        let g = group(3, &["(1 2)", "(1 2 3)"]);
        let d = PAbelianGroup::elementary(2, 2);
        // an element of order 3 cannot act as an involution
        let mats = g.gens().iter().map(|x| if x.order() == 2 { vec![vec![1, 1], vec![0, 1]] } else { vec![vec![0, 1], vec![1, 0]] }).collect();
        assert!(Action::from_generator_matrices(&g, d, mats).is_err());
        let d = PAbelianGroup::from_orders(2, &[2, 4]).unwrap();
        let g = group(2, &["(1 2)"]);
        // e1 of order 2 cannot map onto a generator of Z/4
        assert!(Action::from_generator_matrices(&g, d, vec![vec![vec![0, 1], vec![1, 0]]]).is_err());
    }

    #[test]
    fn norms() {
        let act = s3_natural();
        let d = act.module();
        let g = act.group().clone();
        let v = vec![1, 0];
        assert!(act.fixed_points(&g).is_trivial(d));
        assert!(act.norm(&g, &[1, 1]).is_err());
        assert_eq!(act.norm(&g, &[0, 0]).unwrap(), vec![0, 0]);
        assert!(act.norm(&Group::trivial(3), &v).is_ok());
        let t = Transversal::find(&g, g.elements()).unwrap();
        assert_eq!(t.y.len(), 1);
        let s = g.sylow(2);
        let fixed = act.fixed_points(&s).generators(d);
        let w = act.norm(&s, &fixed[0]).unwrap();
        assert!(act.is_fixed_by(&w, g.gens()));
        assert!(act.norm(&s, &[1, 0]).is_err() || act.is_fixed_by(&[1, 0], s.gens()));
    }

    #[test]
    fn composition_series_of_permutation_module() {
        // S3 on F2^3 permuting coordinates: factors of dimension 1, 1, 1 or 1, 2
        let g = group(3, &["(1 2)", "(1 2 3)"]);
        let d = PAbelianGroup::elementary(2, 3);
        let mats = g
            .gens()
            .iter()
            .map(|x| (0..3).map(|i| (0..3).map(|j| u64::from(x.apply(i) == j)).collect()).collect())
            .collect();
        let act = Action::from_generator_matrices(&g, d.clone(), mats).unwrap();
        let chain = act.composition_series();
        let dims: Vec<u32> = chain.windows(2).map(|w| w[1].log_order(&d) - w[0].log_order(&d)).collect();
        assert_eq!(dims.iter().sum::<u32>(), 3);
        assert!(dims.contains(&2));
        for u in &chain {
            assert!(act.is_invariant(u, g.gens()));
        }
    }
}
