//! Finite permutation groups with fully enumerated element sets.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::ring::p_valuation;

pub const DEFAULT_ORDER_CAP: usize = 1_000_000;

const PAR_THRESHOLD: usize = 4096;

struct GroupData {
    degree: usize,
    gens: Vec<Perm>,
    elements: Vec<Perm>,
}

/// A finite permutation group. Subgroups are groups of the same degree;
/// containment is checked against element sets. Cloning is cheap.
#[derive(Clone)]
pub struct Group(Arc<GroupData>);

impl Group {
    /// The group generated by `gens`, enumerated up to the default cap.
    pub fn generate(degree: usize, gens: Vec<Perm>) -> Result<Group> {
        Group::generate_capped(degree, gens, DEFAULT_ORDER_CAP)
    }

    pub fn generate_capped(degree: usize, gens: Vec<Perm>, cap: usize) -> Result<Group> {
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::InvalidPermutation(format!("{g} has degree {} not {degree}", g.degree())));
            }
        }
        let gens: Vec<Perm> = gens.into_iter().filter(|g| !g.is_identity()).collect();
        let id = Perm::identity(degree);
        let mut seen: HashSet<Perm> = HashSet::new();
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for s in &gens {
                let y = x.mul(s);
                if !seen.contains(&y) {
                    if seen.len() >= cap {
                        return Err(Error::cap("group order", cap));
                    }
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        let mut elements: Vec<Perm> = seen.into_iter().collect();
        elements.sort();
        Ok(Group(Arc::new(GroupData { degree, gens, elements })))
    }

    /// Builds a group from a sorted, closed element list.
    pub(crate) fn from_sorted_elements(degree: usize, gens: Vec<Perm>, elements: Vec<Perm>) -> Group {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        let gens = gens.into_iter().filter(|g| !g.is_identity()).collect();
        Group(Arc::new(GroupData { degree, gens, elements }))
    }

    pub(crate) fn from_elements(degree: usize, gens: Vec<Perm>, mut elements: Vec<Perm>) -> Group {
        elements.sort();
        elements.dedup();
        Group::from_sorted_elements(degree, gens, elements)
    }

    pub fn trivial(degree: usize) -> Group {
        Group::from_sorted_elements(degree, vec![], vec![Perm::identity(degree)])
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn gens(&self) -> &[Perm] {
        &self.0.gens
    }

    /// Elements in sorted order.
    pub fn elements(&self) -> &[Perm] {
        &self.0.elements
    }

    pub fn order(&self) -> usize {
        self.0.elements.len()
    }

    pub fn identity(&self) -> Perm {
        Perm::identity(self.degree())
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn contains(&self, x: &Perm) -> bool {
        self.0.elements.binary_search(x).is_ok()
    }

    pub fn index_of(&self, x: &Perm) -> Option<usize> {
        self.0.elements.binary_search(x).ok()
    }

    pub fn is_subgroup_of(&self, other: &Group) -> bool {
        self.order() <= other.order() && other.order().is_multiple_of(self.order()) && self.elements().iter().all(|x| other.contains(x))
    }

    pub fn is_abelian(&self) -> bool {
        let g = self.gens();
        g.iter().all(|a| g.iter().all(|b| a.mul(b) == b.mul(a)))
    }

    pub fn is_p_group(&self, p: u64) -> bool {
        let mut n = self.order() as u64;
        while n.is_multiple_of(p) {
            n /= p;
        }
        n == 1
    }

    pub fn exponent(&self) -> u64 {
        self.elements().iter().fold(1, |acc, x| num_integer::lcm(acc, x.order()))
    }

    /// Subgroup generated by elements of `self`.
    pub fn subgroup(&self, gens: Vec<Perm>) -> Result<Group> {
        for g in &gens {
            if !self.contains(g) {
                return Err(Error::NotSubgroup(format!("{g} is not in the group")));
            }
        }
        Group::generate_capped(self.degree(), gens, self.order())
    }

    /// Subgroup generated by `gens`, which are assumed to lie in `self`.
    pub fn closure(&self, gens: Vec<Perm>) -> Group {
        Group::generate_capped(self.degree(), gens, usize::MAX).expect("uncapped closure")
    }

    pub fn join(&self, other: &Group) -> Group {
        let mut g = self.gens().to_vec();
        g.extend(other.gens().iter().cloned());
        Group::generate_capped(self.degree(), g, usize::MAX).expect("uncapped closure")
    }

    pub fn intersection(&self, other: &Group) -> Group {
        let (small, big) = if self.order() <= other.order() { (self, other) } else { (other, self) };
        let elements: Vec<Perm> = small.elements().iter().filter(|x| big.contains(x)).cloned().collect();
        let gens = small_generating_set(&elements);
        Group::from_sorted_elements(self.degree(), gens, elements)
    }

    /// `H^g = g^-1 H g`.
    pub fn conjugate(&self, g: &Perm) -> Group {
        let gens = self.gens().iter().map(|x| x.conj(g)).collect();
        let elements = self.elements().iter().map(|x| x.conj(g)).collect();
        Group::from_elements(self.degree(), gens, elements)
    }

    /// Whether `h^g` lies in `self` for every generator `h` of `h_group`.
    fn conj_gens_inside(&self, h_group: &Group, g: &Perm) -> bool {
        h_group.gens().iter().all(|x| self.contains(&x.conj(g)))
    }

    fn filter_elements<F>(&self, pred: F) -> Vec<Perm>
    where
        F: Fn(&Perm) -> bool + Sync,
    {
        if self.order() >= PAR_THRESHOLD {
            self.elements().par_iter().filter(|g| pred(g)).cloned().collect()
        } else {
            self.elements().iter().filter(|g| pred(g)).cloned().collect()
        }
    }

    /// `N_self(h)`; `h` need not lie in `self`.
    pub fn normalizer(&self, h: &Group) -> Group {
        let elements = self.filter_elements(|g| h.conj_gens_inside(h, g));
        let gens = small_generating_set(&elements);
        Group::from_sorted_elements(self.degree(), gens, elements)
    }

    pub fn centralizer(&self, h: &Group) -> Group {
        let elements = self.filter_elements(|g| h.gens().iter().all(|x| x.mul(g) == g.mul(x)));
        let gens = small_generating_set(&elements);
        Group::from_sorted_elements(self.degree(), gens, elements)
    }

    pub fn centralizer_of_element(&self, x: &Perm) -> Group {
        let elements = self.filter_elements(|g| x.mul(g) == g.mul(x));
        let gens = small_generating_set(&elements);
        Group::from_sorted_elements(self.degree(), gens, elements)
    }

    pub fn center(&self) -> Group {
        self.centralizer(self)
    }

    pub fn is_normal_in(&self, g: &Group) -> bool {
        g.gens().iter().all(|x| self.conj_gens_inside(self, x))
    }

    /// `[A, B] = <[a, b]>` with `[a, b] = a^-1 b^-1 a b`.
    pub fn commutator(a: &Group, b: &Group) -> Group {
        let mut gens = Vec::new();
        for x in a.gens() {
            for y in b.gens() {
                let c = x.inverse().mul(&y.inverse()).mul(x).mul(y);
                if !c.is_identity() {
                    gens.push(c);
                }
            }
        }
        // normal closure in <A, B>
        let ab = a.join(b);
        let mut cur = Group::generate_capped(a.degree(), gens, usize::MAX).expect("closure");
        loop {
            let mut extra = Vec::new();
            for x in cur.gens() {
                for g in ab.gens() {
                    let y = x.conj(g);
                    if !cur.contains(&y) {
                        extra.push(y);
                    }
                }
            }
            if extra.is_empty() {
                return cur;
            }
            let mut all = cur.gens().to_vec();
            all.extend(extra);
            cur = Group::generate_capped(a.degree(), all, usize::MAX).expect("closure");
        }
    }

    /// A Sylow `p`-subgroup, grown one step at a time inside normalizers.
    pub fn sylow(&self, p: u64) -> Group {
        let target = (p as usize).pow(p_valuation(self.order() as u64, p));
        let mut cur = Group::trivial(self.degree());
        while cur.order() < target {
            let n = self.normalizer(&cur);
            let x = n
                .elements()
                .iter()
                .find(|x| !cur.contains(x) && cur.contains(&x.pow(p)))
                .expect("a p-subgroup that is not Sylow has a larger normalizing p-element")
                .clone();
            let mut gens = cur.gens().to_vec();
            gens.push(x);
            cur = Group::generate_capped(self.degree(), gens, usize::MAX).expect("closure");
        }
        cur
    }

    /// `{g : P^g <= Q}`, scanned one `C(P)`-coset at a time.
    pub fn transporter(&self, p: &Group, q: &Group) -> Vec<Perm> {
        let c = self.centralizer(p);
        let mut visited = vec![false; self.order()];
        let mut out = Vec::new();
        for i in 0..self.order() {
            if visited[i] {
                continue;
            }
            let g = &self.elements()[i];
            let ok = q.conj_gens_inside(p, g);
            for x in c.elements() {
                let y = x.mul(g);
                let j = self.index_of(&y).expect("coset inside group");
                visited[j] = true;
                if ok {
                    out.push(y);
                }
            }
        }
        out.sort();
        out
    }

    /// Some `g` with `P^g <= Q`, if any.
    pub fn transporter_element(&self, p: &Group, q: &Group) -> Option<Perm> {
        if p.order() > q.order() {
            return None;
        }
        self.elements().iter().find(|g| q.conj_gens_inside(p, g)).cloned()
    }

    /// Some `g` with `P^g = Q`, if any.
    pub fn conjugating_element(&self, p: &Group, q: &Group) -> Option<Perm> {
        if p.order() != q.order() {
            return None;
        }
        self.transporter_element(p, q)
    }

    /// Minimal element of each right coset `H g`.
    pub fn right_coset_reps(&self, h: &Group) -> Vec<Perm> {
        let mut visited = vec![false; self.order()];
        let mut reps = Vec::new();
        for i in 0..self.order() {
            if visited[i] {
                continue;
            }
            let g = &self.elements()[i];
            reps.push(g.clone());
            for x in h.elements() {
                let j = self.index_of(&x.mul(g)).expect("coset inside group");
                visited[j] = true;
            }
        }
        reps
    }

    /// Representatives of the distinct conjugates `H^g`, one per right coset of `N(H)`.
    pub fn conjugates(&self, h: &Group) -> Vec<Group> {
        let n = self.normalizer(h);
        let mut out: Vec<Group> = self.right_coset_reps(&n).iter().map(|g| h.conjugate(g)).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn conjugacy_class(&self, x: &Perm) -> Vec<Perm> {
        let mut out: Vec<Perm> = self.elements().iter().map(|g| x.conj(g)).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Largest normal subgroup of `self` contained in `h`.
    pub fn core(&self, h: &Group) -> Group {
        // shrink until stable under the generators
        let mut cur = h.clone();
        loop {
            let next: Vec<Perm> = cur
                .elements()
                .iter()
                .filter(|x| self.gens().iter().all(|g| cur.contains(&x.conj(g))))
                .cloned()
                .collect();
            if next.len() == cur.order() {
                return cur;
            }
            cur = Group::from_sorted_elements(self.degree(), small_generating_set(&next), next);
        }
    }

    /// `O_p`: the intersection of all Sylow `p`-subgroups.
    pub fn op(&self, p: u64) -> Group {
        let s = self.sylow(p);
        self.core(&s)
    }

    pub fn is_weakly_closed(&self, j: &Group, s: &Group) -> bool {
        // J^g <= S forces J^g = J
        self.elements().iter().all(|g| {
            let inside = s.conj_gens_inside(j, g);
            !inside || j.conj_gens_inside(j, g)
        })
    }
}

/// A generating set picked greedily from a closed, sorted element list.
pub(crate) fn small_generating_set(elements: &[Perm]) -> Vec<Perm> {
    if elements.len() <= 1 {
        return vec![];
    }
    let degree = elements[0].degree();
    let mut gens: Vec<Perm> = Vec::new();
    let mut span: HashSet<Perm> = HashSet::from([Perm::identity(degree)]);
    // prefer high-order elements so fewer generators are needed
    let mut by_order: Vec<&Perm> = elements.iter().collect();
    by_order.sort_by(|a, b| b.order().cmp(&a.order()).then_with(|| a.cmp(b)));
    for x in by_order {
        if span.len() == elements.len() {
            break;
        }
        if span.contains(x) {
            continue;
        }
        gens.push(x.clone());
        let mut queue: VecDeque<Perm> = span.iter().cloned().collect();
        while let Some(y) = queue.pop_front() {
            for s in &gens {
                let z = y.mul(s);
                if span.insert(z.clone()) {
                    queue.push_back(z);
                }
            }
        }
    }
    gens
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.degree() == other.degree() && self.elements() == other.elements())
    }
}

impl Eq for Group {}

impl Hash for Group {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.elements().hash(state);
    }
}

impl PartialOrd for Group {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Deterministic order: by order, then by sorted element sequence.
impl Ord for Group {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order().cmp(&other.order()).then_with(|| self.elements().cmp(other.elements()))
    }
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group(order {}, gens [", self.order())?;
        for (i, g) in self.gens().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "])")
    }
}

/// Parses a comma-free list of cycle-notation generators such as
/// `(1 2)(3 4), (1 3)(2 4)`; a `,` between closing and opening brackets
/// separates generators.
pub fn parse_generator_list(degree: usize, text: &str) -> Result<Vec<Perm>> {
    let mut out = Vec::new();
    for part in split_generators(text) {
        out.push(Perm::parse(degree, &part)?);
    }
    Ok(out)
}

fn split_generators(text: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut cur = String::new();
    let mut depth = 0;
    for c in text.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth -= 1;
                cur.push(c);
            }
            ',' | ';' if depth == 0 => {
                if !cur.trim().is_empty() {
                    parts.push(cur.trim().to_string());
                }
                cur.clear();
            }
            _ => cur.push(c),
        }
    }
    if !cur.trim().is_empty() {
        parts.push(cur.trim().to_string());
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(degree: usize, gens: &[&str]) -> Group {
        Group::generate(degree, gens.iter().map(|s| Perm::parse(degree, s).unwrap()).collect()).unwrap()
    }

    #[test]
    fn orders_of_small_groups() {
        assert_eq!(g(4, &["(1 2)", "(1 2 3 4)"]).order(), 24);
        assert_eq!(g(3, &[]).order(), 1);
        let a6 = g(6, &["(1 2 3)", "(2 3 4 5 6)"]);
        assert_eq!(a6.order(), 360);
        assert!(a6.elements().iter().all(|x| x.is_even()));
    }

    #[test]
    fn cap_is_enforced() {
        let gens = vec![Perm::parse(6, "(1 2)").unwrap(), Perm::parse(6, "(1 2 3 4 5 6)").unwrap()];
        assert!(matches!(Group::generate_capped(6, gens, 100), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn sylow_orders() {
        let s4 = g(4, &["(1 2)", "(1 2 3 4)"]);
        assert_eq!(s4.sylow(2).order(), 8);
        assert!(s4.sylow(5).is_trivial());
        let a6 = g(6, &["(1 2 3)", "(2 3 4 5 6)"]);
        assert_eq!(a6.sylow(2).order(), 8);
        assert_eq!(a6.sylow(3).order(), 9);
    }

    #[test]
    fn centralizer_and_center() {
        let s4 = g(4, &["(1 2)", "(1 2 3 4)"]);
        let v4 = s4.subgroup(vec![Perm::parse(4, "(1 2)(3 4)").unwrap(), Perm::parse(4, "(1 3)(2 4)").unwrap()]).unwrap();
        assert_eq!(s4.centralizer(&v4), v4);
        let d8 = s4.sylow(2);
        assert_eq!(d8.center().order(), 2);
        assert_eq!(s4.normalizer(&s4), s4);
        assert_eq!(s4.op(2), v4);
    }

    #[test]
    fn transporters() {
        let s4 = g(4, &["(1 2)", "(1 2 3 4)"]);
        let p = s4.subgroup(vec![Perm::parse(4, "(1 2)").unwrap()]).unwrap();
        let q = s4.subgroup(vec![Perm::parse(4, "(3 4)").unwrap()]).unwrap();
        let t = s4.transporter(&p, &q);
        assert!(t.contains(&Perm::parse(4, "(1 3)(2 4)").unwrap()));
        assert_eq!(t.len(), 4);
        let v4 = s4.op(2);
        assert_eq!(s4.transporter(&v4, &v4).len(), 24);
    }

    #[test]
    fn split_generator_lists() {
        let gens = parse_generator_list(4, "(1 2)(3 4), (1 3)(2 4)").unwrap();
        assert_eq!(gens.len(), 2);
        let gens = parse_generator_list(4, "(1 2)(3 4)").unwrap();
        assert_eq!(gens.len(), 1);
    }
}
