//! Finite abelian `p`-groups as direct sums of cyclic groups, their
//! subgroups, and coordinates for abelian permutation groups.
//!
//! Elements are written additively as integer vectors whose `i`-th entry
//! lives modulo `p^{e_i}`. Subgroups are stored as submodules of
//! `(Z/p^N)^r` containing the relation module `<p^{e_i} b_i>`.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::linalg::Submodule;
use crate::perm::Perm;
use crate::ring::{is_prime, PivotRing, PrimePowerRing};

pub type Vector = Vec<u64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAbelianGroup {
    p: u64,
    exps: Vec<u32>,
    ring: PrimePowerRing,
}

impl PAbelianGroup {
    pub fn new(p: u64, exps: Vec<u32>) -> Result<PAbelianGroup> {
        if !is_prime(p) {
            return Err(Error::precondition(format!("{p} is not prime")));
        }
        if exps.contains(&0) {
            return Err(Error::precondition("cyclic factors must be nontrivial"));
        }
        let n = exps.iter().copied().max().unwrap_or(1);
        Ok(PAbelianGroup { p, exps, ring: PrimePowerRing::new(p, n) })
    }

    /// From cyclic orders such as `[4, 2]`.
    pub fn from_orders(p: u64, orders: &[u64]) -> Result<PAbelianGroup> {
        let mut exps = Vec::new();
        for &o in orders {
            let mut e = 0;
            let mut x = o;
            while x > 1 && x % p == 0 {
                x /= p;
                e += 1;
            }
            if x != 1 || e == 0 {
                return Err(Error::precondition(format!("{o} is not a positive power of {p}")));
            }
            exps.push(e);
        }
        PAbelianGroup::new(p, exps)
    }

    pub fn elementary(p: u64, rank: usize) -> PAbelianGroup {
        PAbelianGroup::new(p, vec![1; rank]).expect("valid elementary abelian group")
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn rank(&self) -> usize {
        self.exps.len()
    }

    pub fn ring(&self) -> &PrimePowerRing {
        &self.ring
    }

    pub fn modulus(&self, i: usize) -> u64 {
        self.p.pow(self.exps[i])
    }

    pub fn orders(&self) -> Vec<u64> {
        (0..self.rank()).map(|i| self.modulus(i)).collect()
    }

    pub fn order_log(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.order_log())
    }

    pub fn is_elementary(&self) -> bool {
        self.exps.iter().all(|&e| e == 1)
    }

    pub fn zero(&self) -> Vector {
        vec![0; self.rank()]
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        let mut v = self.zero();
        v[i] = 1;
        v
    }

    pub fn normalize(&self, v: &[u64]) -> Vector {
        v.iter().enumerate().map(|(i, &x)| x % self.modulus(i)).collect()
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vector {
        (0..self.rank()).map(|i| (a[i] + b[i]) % self.modulus(i)).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vector {
        (0..self.rank()).map(|i| (a[i] + self.modulus(i) - b[i] % self.modulus(i)) % self.modulus(i)).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Vector {
        self.sub(&self.zero(), a)
    }

    pub fn scale(&self, c: u64, a: &[u64]) -> Vector {
        (0..self.rank()).map(|i| ((c as u128 * a[i] as u128) % self.modulus(i) as u128) as u64).collect()
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    /// `log_p` of the order of `v`.
    pub fn element_order_log(&self, v: &[u64]) -> u32 {
        (0..self.rank())
            .map(|i| if v[i] == 0 { 0 } else { self.exps[i] - self.ring.valuation(v[i]).min(self.exps[i]) })
            .max()
            .unwrap_or(0)
    }

    /// All elements, in lexicographic order of coordinates.
    pub fn elements(&self) -> Vec<Vector> {
        let mut out = vec![self.zero()];
        for i in 0..self.rank() {
            let m = self.modulus(i);
            let mut next = Vec::with_capacity(out.len() * m as usize);
            for v in &out {
                for x in 0..m {
                    let mut w = v.clone();
                    w[i] = x;
                    next.push(w);
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    pub(crate) fn relations(&self) -> Submodule<PrimePowerRing> {
        let rows = (0..self.rank())
            .map(|i| {
                let mut r = vec![0u64; self.rank()];
                r[i] = self.ring.prime_power(self.p, self.exps[i]);
                r
            })
            .collect();
        Submodule::from_generators(&self.ring, rows, self.rank())
    }

    pub fn trivial_subgroup(&self) -> AbSubgroup {
        AbSubgroup { lattice: self.relations() }
    }

    pub fn whole(&self) -> AbSubgroup {
        AbSubgroup { lattice: Submodule::full(&self.ring, self.rank()) }
    }

    pub fn span(&self, gens: &[Vector]) -> AbSubgroup {
        AbSubgroup { lattice: self.relations().add_generators(&self.ring, gens) }
    }

    pub(crate) fn from_lattice(&self, lattice: Submodule<PrimePowerRing>) -> AbSubgroup {
        AbSubgroup { lattice: lattice.sum(&self.ring, &self.relations()) }
    }

    /// `Ω_1`: elements of order dividing `p`.
    pub fn omega1(&self) -> AbSubgroup {
        let r = self.rank();
        let p_id: Vec<Vec<u64>> = (0..r)
            .map(|i| {
                let mut row = vec![0; r];
                row[i] = self.p % self.ring.modulus();
                row
            })
            .collect();
        let lat = Submodule::preimage(&self.ring, &p_id, &self.relations());
        AbSubgroup { lattice: lat }
    }
}

/// A subgroup of a [`PAbelianGroup`].
#[derive(Clone, Debug)]
pub struct AbSubgroup {
    pub(crate) lattice: Submodule<PrimePowerRing>,
}

impl AbSubgroup {
    pub fn contains(&self, d: &PAbelianGroup, v: &[u64]) -> bool {
        self.lattice.contains(d.ring(), v)
    }

    pub fn log_order(&self, d: &PAbelianGroup) -> u32 {
        // |U / M| = |R^r / M| / |R^r / U|
        d.order_log() - self.lattice.colength_log(d.ring()).expect("chain ring") as u32
    }

    pub fn order(&self, d: &PAbelianGroup) -> u128 {
        (d.prime() as u128).pow(self.log_order(d))
    }

    pub fn is_trivial(&self, d: &PAbelianGroup) -> bool {
        self.log_order(d) == 0
    }

    pub fn is_whole(&self, d: &PAbelianGroup) -> bool {
        self.log_order(d) == d.order_log()
    }

    pub fn le(&self, d: &PAbelianGroup, other: &AbSubgroup) -> bool {
        other.lattice.contains_module(d.ring(), &self.lattice)
    }

    pub fn equals(&self, d: &PAbelianGroup, other: &AbSubgroup) -> bool {
        self.le(d, other) && other.le(d, self)
    }

    pub fn join(&self, d: &PAbelianGroup, other: &AbSubgroup) -> AbSubgroup {
        AbSubgroup { lattice: self.lattice.sum(d.ring(), &other.lattice) }
    }

    pub fn meet(&self, d: &PAbelianGroup, other: &AbSubgroup) -> AbSubgroup {
        AbSubgroup { lattice: self.lattice.intersection(d.ring(), &other.lattice) }
    }

    /// Nonzero generators, reduced into coordinate range.
    pub fn generators(&self, d: &PAbelianGroup) -> Vec<Vector> {
        let mut out: Vec<Vector> = self.lattice.rows.iter().map(|r| d.normalize(r)).filter(|v| !d.is_zero(v)).collect();
        out.dedup();
        out
    }

    /// All elements by closure of the generators.
    pub fn elements(&self, d: &PAbelianGroup) -> Vec<Vector> {
        let mut seen: HashSet<Vector> = HashSet::from([d.zero()]);
        let mut frontier = vec![d.zero()];
        let gens = self.generators(d);
        while let Some(v) = frontier.pop() {
            for g in &gens {
                let w = d.add(&v, g);
                if seen.insert(w.clone()) {
                    frontier.push(w);
                }
            }
        }
        let mut out: Vec<Vector> = seen.into_iter().collect();
        out.sort();
        out
    }
}

/// Coordinates for an abelian `p`-subgroup of a permutation group.
#[derive(Clone, Debug)]
pub struct PermCoordinates {
    pub module: PAbelianGroup,
    pub basis: Vec<Perm>,
    coords: HashMap<Perm, Vector>,
}

impl PermCoordinates {
    /// Decomposes `d` as a direct sum of cyclic groups by repeatedly peeling
    /// off an element of maximal order modulo the part already split.
    pub fn new(d: &Group, p: u64) -> Result<PermCoordinates> {
        if !d.is_abelian() {
            return Err(Error::NotAbelian("subgroup is not abelian".into()));
        }
        if !d.is_p_group(p) {
            return Err(Error::precondition(format!("subgroup is not a {p}-group")));
        }
        let mut span: Vec<Perm> = vec![d.identity()];
        let mut span_set: HashSet<Perm> = span.iter().cloned().collect();
        let mut basis: Vec<Perm> = Vec::new();
        let mut exps = Vec::new();
        while span.len() < d.order() {
            // f(c): least f with c^(p^f) in the current span
            let mut best: Option<(u32, &Perm)> = None;
            for c in d.elements() {
                let mut f = 0;
                let mut x = c.clone();
                while !span_set.contains(&x) {
                    x = x.pow(p);
                    f += 1;
                }
                if best.is_none_or(|(bf, _)| f > bf) {
                    best = Some((f, c));
                }
            }
            let (f, c) = best.expect("nonempty group");
            let pf = p.pow(f);
            let h = c.pow(pf);
            let h1 = span
                .iter()
                .find(|y| y.pow(pf) == h)
                .ok_or_else(|| Error::internal("basis peeling found no root in the split part"))?;
            let y = c.mul(&h1.inverse());
            let mut next = Vec::with_capacity(span.len() * pf as usize);
            let mut yi = d.identity();
            for _ in 0..pf {
                for s in &span {
                    next.push(s.mul(&yi));
                }
                yi = yi.mul(&y);
            }
            span_set = next.iter().cloned().collect();
            if span_set.len() != next.len() {
                return Err(Error::internal("basis peeling produced a non-direct sum"));
            }
            span = next;
            basis.push(y);
            exps.push(f);
        }
        let module = PAbelianGroup::new(p, exps)?;
        let mut coords = HashMap::new();
        for v in module.elements() {
            coords.insert(Self::eval(&basis, d.identity(), &v), v);
        }
        if coords.len() != d.order() {
            return Err(Error::internal("coordinates are not a bijection"));
        }
        Ok(PermCoordinates { module, basis, coords })
    }

    fn eval(basis: &[Perm], id: Perm, v: &[u64]) -> Perm {
        basis.iter().zip(v).fold(id, |acc, (b, &k)| acc.mul(&b.pow(k)))
    }

    pub fn to_vector(&self, x: &Perm) -> Option<Vector> {
        self.coords.get(x).cloned()
    }

    pub fn to_perm(&self, v: &[u64]) -> Perm {
        let id = Perm::identity(self.basis.first().map_or(0, |b| b.degree()));
        Self::eval(&self.basis, id, &self.module.normalize(v))
    }

    /// The subgroup of the module corresponding to a subgroup of `d`.
    pub fn subgroup_of(&self, h: &Group) -> AbSubgroup {
        let gens: Vec<Vector> = h.gens().iter().filter_map(|x| self.to_vector(x)).collect();
        self.module.span(&gens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_span(d: &PAbelianGroup, gens: &[Vector]) -> HashSet<Vector> {
        let mut s: HashSet<Vector> = HashSet::from([d.zero()]);
        loop {
            let before = s.len();
            let cur: Vec<Vector> = s.iter().cloned().collect();
            for v in &cur {
                for g in gens {
                    s.insert(d.add(v, g));
                }
            }
            if s.len() == before {
                return s;
            }
        }
    }

    #[test]
    fn omega1_examples() {
        let d = PAbelianGroup::elementary(2, 3);
        assert!(d.omega1().is_whole(&d));
        let d = PAbelianGroup::from_orders(2, &[4]).unwrap();
        assert_eq!(d.omega1().order(&d), 2);
        let d = PAbelianGroup::from_orders(2, &[8, 2]).unwrap();
        let o = d.omega1();
        assert_eq!(o.order(&d), 4);
        assert!(o.elements(&d).iter().all(|v| d.element_order_log(v) <= 1));
    }

    #[test]
    fn span_orders_match_brute_force() {
        let d = PAbelianGroup::from_orders(2, &[8, 4, 2]).unwrap();
        let cases: Vec<Vec<Vector>> = vec![
            vec![vec![2, 0, 1]],
            vec![vec![4, 2, 0], vec![0, 2, 1]],
            vec![vec![1, 1, 1], vec![6, 2, 0]],
            vec![],
        ];
        for gens in cases {
            let s = d.span(&gens);
            let b = brute_span(&d, &gens);
            assert_eq!(s.order(&d), b.len() as u128, "{gens:?}");
            for v in d.elements() {
                assert_eq!(s.contains(&d, &v), b.contains(&v));
            }
        }
        assert!(d.trivial_subgroup().is_trivial(&d));
        assert_eq!(d.whole().order(&d), 64);
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(PAbelianGroup::from_orders(2, &[6]).is_err());
        assert!(PAbelianGroup::from_orders(4, &[4]).is_err());
    }

    #[test]
    fn perm_coordinates() {
        let gens = vec![Perm::parse(6, "(1 2 3 4)").unwrap(), Perm::parse(6, "(5 6)").unwrap()];
        let d = Group::generate(6, gens).unwrap();
        let c = PermCoordinates::new(&d, 2).unwrap();
        assert_eq!(c.module.orders(), vec![4, 2]);
        for x in d.elements() {
            assert_eq!(&c.to_perm(&c.to_vector(x).unwrap()), x);
        }
        for a in d.elements() {
            for b in d.elements() {
                let s = c.module.add(&c.to_vector(a).unwrap(), &c.to_vector(b).unwrap());
                assert_eq!(c.to_vector(&a.mul(b)).unwrap(), s);
            }
        }
        // a group with a non-obvious splitting: <(1 2 3 4)(5 6), (1 3)(2 4)(5 6)>
        let gens = vec![Perm::parse(6, "(1 2 3 4)(5 6)").unwrap(), Perm::parse(6, "(1 3)(2 4)(5 6)").unwrap()];
        let d = Group::generate(6, gens).unwrap();
        let c = PermCoordinates::new(&d, 2).unwrap();
        assert_eq!(c.module.order(), d.order() as u128);
    }
}
