//! Quotient groups realized as permutation groups on cosets.

use crate::error::{Error, Result};
use crate::group::Group;
use crate::perm::Perm;

/// `G/K` as a permutation group, with the projection stored per element.
#[derive(Clone, Debug)]
pub struct Quotient {
    parent: Group,
    kernel: Group,
    image: Group,
    /// Index into `image.elements()` for each element of `parent`.
    proj: Vec<usize>,
    /// A parent element over each image element.
    section: Vec<Perm>,
}

impl Quotient {
    pub fn new(g: &Group, k: &Group) -> Result<Quotient> {
        if !k.is_subgroup_of(g) {
            return Err(Error::NotSubgroup("kernel is not a subgroup".into()));
        }
        if !k.is_normal_in(g) {
            return Err(Error::NotNormal("kernel is not normal".into()));
        }
        if k.is_trivial() {
            let proj = (0..g.order()).collect();
            return Ok(Quotient {
                parent: g.clone(),
                kernel: k.clone(),
                image: g.clone(),
                proj,
                section: g.elements().to_vec(),
            });
        }
        let h = reduce_point_stabilizer(g, k);
        // G acts on right cosets of H by right multiplication
        let reps = g.right_coset_reps(&h);
        let mut coset_of = vec![usize::MAX; g.order()];
        for (c, r) in reps.iter().enumerate() {
            for x in h.elements() {
                coset_of[g.index_of(&x.mul(r)).expect("inside")] = c;
            }
        }
        let degree = reps.len().max(1);
        let act = |x: &Perm| -> Perm {
            let images = reps
                .iter()
                .map(|r| coset_of[g.index_of(&r.mul(x)).expect("inside")] as u32)
                .collect();
            Perm::from_images(images).expect("coset action is a bijection")
        };
        // one image per coset of K
        let kreps = g.right_coset_reps(k);
        let mut pairs: Vec<(Perm, Perm)> = kreps.iter().map(|r| (act(r), r.clone())).collect();
        pairs.sort();
        let images: Vec<Perm> = pairs.iter().map(|(a, _)| a.clone()).collect();
        let gens = g.gens().iter().map(act).collect();
        let image = Group::from_sorted_elements(degree, gens, images);
        let section = pairs.into_iter().map(|(_, r)| r).collect();
        let mut proj = vec![0; g.order()];
        for (i, x) in g.elements().iter().enumerate() {
            proj[i] = image.index_of(&act(x)).expect("image element");
        }
        Ok(Quotient { parent: g.clone(), kernel: k.clone(), image, proj, section })
    }

    pub fn parent(&self) -> &Group {
        &self.parent
    }

    pub fn kernel(&self) -> &Group {
        &self.kernel
    }

    pub fn image(&self) -> &Group {
        &self.image
    }

    pub fn project(&self, x: &Perm) -> Perm {
        let i = self.parent.index_of(x).expect("element of the parent group");
        self.image.elements()[self.proj[i]].clone()
    }

    /// A preimage of an element of the quotient.
    pub fn lift(&self, y: &Perm) -> Perm {
        let i = self.image.index_of(y).expect("element of the quotient");
        self.section[i].clone()
    }

    pub fn project_subgroup(&self, h: &Group) -> Group {
        let gens = h.gens().iter().map(|x| self.project(x)).collect();
        let mut elements: Vec<Perm> = h.elements().iter().map(|x| self.project(x)).collect();
        elements.sort();
        elements.dedup();
        Group::from_sorted_elements(self.image.degree(), gens, elements)
    }

    /// Full preimage of a subgroup of the quotient.
    pub fn preimage(&self, h: &Group) -> Group {
        let elements: Vec<Perm> = self
            .parent
            .elements()
            .iter()
            .enumerate()
            .filter(|(i, _)| h.contains(&self.image.elements()[self.proj[*i]]))
            .map(|(_, x)| x.clone())
            .collect();
        let mut gens: Vec<Perm> = h.gens().iter().map(|y| self.lift(y)).collect();
        gens.extend(self.kernel.gens().iter().cloned());
        Group::from_sorted_elements(self.parent.degree(), gens, elements)
    }
}

/// A subgroup `H >= K` of `G` with core `K`, as large as a cheap search
/// finds; the action on its cosets is faithful on `G/K`.
fn reduce_point_stabilizer(g: &Group, k: &Group) -> Group {
    let mut best = k.clone();
    let mut tried = std::collections::HashSet::new();
    for x in g.right_coset_reps(k) {
        let h = k.join(&g.closure(vec![x]));
        if h.order() <= best.order() || !tried.insert(h.clone()) {
            continue;
        }
        if g.core(&h).order() == k.order() {
            best = h;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(degree: usize, gens: &[&str]) -> Group {
        Group::generate(degree, gens.iter().map(|s| Perm::parse(degree, s).unwrap()).collect()).unwrap()
    }

    fn check_hom(q: &Quotient) {
        let g = q.parent();
        for a in g.elements().iter().step_by(3) {
            for b in g.elements().iter().step_by(5) {
                assert_eq!(q.project(&a.mul(b)), q.project(a).mul(&q.project(b)));
            }
        }
        for y in q.image().elements() {
            assert_eq!(&q.project(&q.lift(y)), y);
        }
    }

    #[test]
    fn s4_mod_v4() {
        let s4 = group(4, &["(1 2)", "(1 2 3 4)"]);
        let v4 = s4.op(2);
        let q = Quotient::new(&s4, &v4).unwrap();
        assert_eq!(q.image().order(), 6);
        assert!(!q.image().is_abelian());
        assert!(q.image().degree() <= 6);
        check_hom(&q);
        assert_eq!(q.preimage(&q.image().sylow(3)).order(), 12);
    }

    #[test]
    fn degenerate_kernels() {
        let s4 = group(4, &["(1 2)", "(1 2 3 4)"]);
        let q = Quotient::new(&s4, &s4).unwrap();
        assert_eq!(q.image().order(), 1);
        let q = Quotient::new(&s4, &Group::trivial(4)).unwrap();
        assert_eq!(q.image().order(), 24);
        check_hom(&q);
    }

    #[test]
    fn rejects_non_normal() {
        let s4 = group(4, &["(1 2)", "(1 2 3 4)"]);
        let c2 = s4.subgroup(vec![Perm::parse(4, "(1 2)").unwrap()]).unwrap();
        assert!(matches!(Quotient::new(&s4, &c2), Err(Error::NotNormal(_))));
    }

    #[test]
    fn kernel_of_projection_is_k() {
        let g = group(6, &["(1 2)", "(3 4)", "(5 6)", "(1 3 5)(2 4 6)", "(1 3)(2 4)"]);
        let k = g.op(2);
        let q = Quotient::new(&g, &k).unwrap();
        assert_eq!(q.image().order() * k.order(), g.order());
        let trivial = Group::trivial(q.image().degree());
        assert_eq!(q.preimage(&trivial), k);
        check_hom(&q);
    }
}
