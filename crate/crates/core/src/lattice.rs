//! Subgroup enumeration for small `p`-groups.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::group::Group;

pub const DEFAULT_PGROUP_CAP: usize = 512;

/// Bitset over the element indices of the ambient `p`-group.
type Bits = Vec<u64>;

fn bit(b: &Bits, i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

fn set(b: &mut Bits, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

struct Table {
    n: usize,
    mul: Vec<u16>,
    inv: Vec<u16>,
}

impl Table {
    fn new(s: &Group) -> Table {
        let n = s.order();
        let els = s.elements();
        let mut mul = vec![0u16; n * n];
        for i in 0..n {
            for j in 0..n {
                mul[i * n + j] = s.index_of(&els[i].mul(&els[j])).expect("closed") as u16;
            }
        }
        let inv = (0..n).map(|i| s.index_of(&els[i].inverse()).expect("closed") as u16).collect();
        Table { n, mul, inv }
    }

    fn m(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b] as usize
    }

    fn conj(&self, h: usize, x: usize) -> usize {
        self.m(self.m(self.inv[x] as usize, h), x)
    }
}

/// All subgroups of the `p`-group `s`, each exactly once, ordered by
/// `(order, sorted elements)`.
///
/// Every nontrivial subgroup `K` has a normal maximal subgroup `H` of index
/// `p`, so extending each `H` by elements `x` with `H^x = H` and `x^p ∈ H`
/// reaches all of them.
pub fn subgroups_of_pgroup(s: &Group, p: u64, cap: usize) -> Result<Vec<Group>> {
    if s.order() > cap {
        return Err(Error::cap("p-group order for subgroup enumeration", cap));
    }
    if !s.is_p_group(p) {
        return Err(Error::precondition(format!("group of order {} is not a {p}-group", s.order())));
    }
    let t = Table::new(s);
    let n = t.n;
    let words = n.div_ceil(64);
    let mut trivial = vec![0u64; words];
    set(&mut trivial, 0);
    debug_assert!(s.elements()[0].is_identity());

    let mut seen: HashSet<Bits> = HashSet::from([trivial.clone()]);
    let mut layer: Vec<(Bits, Vec<usize>)> = vec![(trivial, vec![])];
    let mut all: Vec<(Bits, Vec<usize>)> = layer.clone();
    while !layer.is_empty() {
        let mut next = Vec::new();
        for (h, gens) in &layer {
            let members: Vec<usize> = (0..n).filter(|&i| bit(h, i)).collect();
            for x in 0..n {
                if bit(h, x) {
                    continue;
                }
                if !gens.iter().all(|&g| bit(h, t.conj(g, x))) {
                    continue;
                }
                let mut xp = x;
                for _ in 1..p {
                    xp = t.m(xp, x);
                }
                if !bit(h, xp) {
                    continue;
                }
                // <H, x> is the union of the cosets H x^i
                let mut k = h.clone();
                let mut xi = x;
                for _ in 1..p {
                    for &a in &members {
                        set(&mut k, t.m(a, xi));
                    }
                    xi = t.m(xi, x);
                }
                if seen.insert(k.clone()) {
                    let mut g = gens.clone();
                    g.push(x);
                    next.push((k, g));
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    let els = s.elements();
    let mut out: Vec<Group> = all
        .into_iter()
        .map(|(b, gens)| {
            let elements = (0..n).filter(|&i| bit(&b, i)).map(|i| els[i].clone()).collect();
            Group::from_sorted_elements(s.degree(), gens.into_iter().map(|i| els[i].clone()).collect(), elements)
        })
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;

    fn group(degree: usize, gens: &[&str]) -> Group {
        Group::generate(degree, gens.iter().map(|s| Perm::parse(degree, s).unwrap()).collect()).unwrap()
    }

    /// Closure of the cyclic subgroups under pairwise joins.
    fn oracle(s: &Group) -> Vec<Group> {
        let mut found: Vec<Group> = s.elements().iter().map(|x| s.closure(vec![x.clone()])).collect();
        found.sort();
        found.dedup();
        loop {
            let mut added = false;
            let snapshot = found.clone();
            for a in &snapshot {
                for b in &snapshot {
                    let j = a.join(b);
                    if !found.contains(&j) {
                        found.push(j);
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        found.sort();
        found
    }

    #[test]
    fn small_counts() {
        let c2 = group(2, &["(1 2)"]);
        assert_eq!(subgroups_of_pgroup(&c2, 2, 512).unwrap().len(), 2);
        let v4 = group(4, &["(1 2)(3 4)", "(1 3)(2 4)"]);
        assert_eq!(subgroups_of_pgroup(&v4, 2, 512).unwrap().len(), 5);
        let d8 = group(4, &["(1 2 3 4)", "(1 3)"]);
        assert_eq!(subgroups_of_pgroup(&d8, 2, 512).unwrap().len(), 10);
    }

    #[test]
    fn matches_join_closure() {
        let cases = [
            group(8, &["(1 2 3 4 5 6 7 8)", "(1 3)(4 8)(5 7)"]),
            group(8, &["(1 2)", "(3 4)", "(5 6)", "(7 8)"]),
            group(9, &["(1 2 3)", "(4 5 6)", "(1 4 7)(2 5 8)(3 6 9)"]),
            group(8, &["(1 2)(3 4)", "(1 3)(2 4)", "(5 6)(7 8)", "(1 5)(2 6)(3 7)(4 8)"]),
        ];
        for (i, s) in cases.iter().enumerate() {
            let p = if i == 2 { 3 } else { 2 };
            let fast = subgroups_of_pgroup(s, p, 512).unwrap();
            assert_eq!(fast, oracle(s), "case {i}");
            for h in &fast {
                assert!(h.elements().iter().all(|a| h.elements().iter().all(|b| h.contains(&a.mul(b)))));
                assert_eq!(s.closure(h.gens().to_vec()), *h);
            }
        }
    }

    #[test]
    fn rejects_large_and_non_p() {
        let s4 = group(4, &["(1 2)", "(1 2 3 4)"]);
        assert!(subgroups_of_pgroup(&s4, 2, 512).is_err());
        let d8 = group(4, &["(1 2 3 4)", "(1 3)"]);
        assert!(matches!(subgroups_of_pgroup(&d8, 2, 4), Err(Error::CapExceeded { .. })));
    }
}
