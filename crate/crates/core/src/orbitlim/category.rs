//! Orbit categories and the center functor.

use std::collections::{BTreeSet, HashMap};

use crate::abelian::{PAbelianGroup, PermCoordinates, Vector};
use crate::error::{Error, Result};
use crate::fusion::{FusionSystem, SubId};
use crate::perm::Perm;

/// A morphism class `[c_g]: P -> Q` with `P^g <= Q`, modulo `Inn(Q)`.
#[derive(Clone, Debug)]
pub struct Morphism {
    pub src: usize,
    pub tgt: usize,
    pub g: Perm,
    pub is_identity: bool,
}

/// The orbit category on a set of subgroups of `S`. In skeletal form the
/// objects are the class representatives.
pub struct OrbitCategory<'a> {
    fs: &'a FusionSystem,
    objects: Vec<SubId>,
    obj_index: HashMap<SubId, usize>,
    morphisms: Vec<Morphism>,
    /// `hom[i][j]`: ids of the morphisms `i -> j`.
    hom: Vec<Vec<Vec<usize>>>,
    keys: HashMap<(usize, usize, Vec<Perm>), usize>,
    identity: Vec<usize>,
    composition: HashMap<(usize, usize), usize>,
}

impl<'a> OrbitCategory<'a> {
    /// The orbit category on `collection`, which must be `F`-invariant.
    pub fn new(fs: &'a FusionSystem, collection: &BTreeSet<SubId>, skeletal: bool) -> Result<OrbitCategory<'a>> {
        if fs.class_closure(collection) != *collection {
            return Err(Error::precondition("collection is not F-invariant"));
        }
        let objects: Vec<SubId> = if skeletal {
            let reps: BTreeSet<SubId> = collection.iter().map(|&c| fs.rep_of(c)).collect();
            reps.into_iter().collect()
        } else {
            collection.iter().copied().collect()
        };
        let obj_index = objects.iter().enumerate().map(|(i, &o)| (o, i)).collect();
        let n = objects.len();
        let mut cat = OrbitCategory {
            fs,
            objects,
            obj_index,
            morphisms: Vec::new(),
            hom: vec![vec![Vec::new(); n]; n],
            keys: HashMap::new(),
            identity: vec![usize::MAX; n],
            composition: HashMap::new(),
        };
        for i in 0..n {
            for j in 0..n {
                let reps = fs.hom_reps(cat.objects[i], cat.objects[j]);
                for g in reps.iter() {
                    let key = cat.key(i, j, g);
                    if cat.keys.contains_key(&(i, j, key.clone())) {
                        continue;
                    }
                    let id = cat.morphisms.len();
                    let is_identity = i == j && key == cat.key(i, i, &fs.gamma().identity());
                    cat.morphisms.push(Morphism { src: i, tgt: j, g: g.clone(), is_identity });
                    cat.keys.insert((i, j, key), id);
                    cat.hom[i][j].push(id);
                    if is_identity {
                        cat.identity[i] = id;
                    }
                }
            }
        }
        for i in 0..n {
            if cat.identity[i] == usize::MAX {
                return Err(Error::internal("object without identity"));
            }
        }
        let mut comp = HashMap::new();
        for a in 0..cat.morphisms.len() {
            let j = cat.morphisms[a].tgt;
            for k in 0..n {
                for &b in &cat.hom[j][k] {
                    let g = cat.morphisms[a].g.mul(&cat.morphisms[b].g);
                    let c = cat.lookup(cat.morphisms[a].src, k, &g)?;
                    comp.insert((a, b), c);
                }
            }
        }
        cat.composition = comp;
        Ok(cat)
    }

    /// Canonical key of `[c_g]: P_i -> P_j`: the least image of the
    /// generators of `P_i` under `g q`, `q ∈ P_j`.
    fn key(&self, i: usize, j: usize, g: &Perm) -> Vec<Perm> {
        let p = self.fs.subgroup(self.objects[i]);
        let q = self.fs.subgroup(self.objects[j]);
        q.elements()
            .iter()
            .map(|x| {
                let h = g.mul(x);
                p.gens().iter().map(|y| y.conj(&h)).collect::<Vec<Perm>>()
            })
            .min()
            .expect("Q is nonempty")
    }

    /// The morphism id of `[c_g]: P_i -> P_k`.
    pub fn lookup(&self, i: usize, k: usize, g: &Perm) -> Result<usize> {
        let key = self.key(i, k, g);
        self.keys.get(&(i, k, key)).copied().ok_or_else(|| Error::internal("composite is not a morphism"))
    }

    pub fn fusion(&self) -> &'a FusionSystem {
        self.fs
    }

    pub fn objects(&self) -> &[SubId] {
        &self.objects
    }

    pub fn object_index(&self, id: SubId) -> Option<usize> {
        self.obj_index.get(&id).copied()
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn hom(&self, i: usize, j: usize) -> &[usize] {
        &self.hom[i][j]
    }

    pub fn identity(&self, i: usize) -> usize {
        self.identity[i]
    }

    /// `a` then `b`.
    pub fn compose(&self, a: usize, b: usize) -> usize {
        self.composition[&(a, b)]
    }

    /// Checks `(ab)c = a(bc)` and the identity laws on all composable triples.
    pub fn check_associative(&self) -> bool {
        for (a, ma) in self.morphisms.iter().enumerate() {
            if self.compose(self.identity[ma.src], a) != a || self.compose(a, self.identity[ma.tgt]) != a {
                return false;
            }
            for k in 0..self.objects.len() {
                for &b in &self.hom[ma.tgt][k] {
                    let ab = self.compose(a, b);
                    for l in 0..self.objects.len() {
                        for &c in &self.hom[k][l] {
                            if self.compose(ab, c) != self.compose(a, self.compose(b, c)) {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }
}

/// `Z^R_F`: `Z(P)` on members of `R`, trivial elsewhere.
pub struct CenterFunctor {
    support: BTreeSet<SubId>,
    coords: HashMap<SubId, PermCoordinates>,
}

impl CenterFunctor {
    pub fn new(fs: &FusionSystem, support: &BTreeSet<SubId>) -> Result<CenterFunctor> {
        if fs.class_closure(support) != *support {
            return Err(Error::precondition("interval is not F-invariant"));
        }
        let mut coords = HashMap::new();
        for &r in support {
            let z = fs.subgroup(r).center();
            coords.insert(r, PermCoordinates::new(&z, fs.prime())?);
        }
        Ok(CenterFunctor { support: support.clone(), coords })
    }

    pub fn support(&self) -> &BTreeSet<SubId> {
        &self.support
    }

    pub fn contains(&self, id: SubId) -> bool {
        self.support.contains(&id)
    }

    pub fn coordinates(&self, id: SubId) -> Option<&PermCoordinates> {
        self.coords.get(&id)
    }

    pub fn value(&self, id: SubId) -> Option<&PAbelianGroup> {
        self.coords.get(&id).map(|c| &c.module)
    }

    pub fn rank(&self, id: SubId) -> usize {
        self.value(id).map_or(0, |m| m.rank())
    }

    /// Matrix of `Z(Q) -> Z(P)`, `z -> g z g^-1`, for `[c_g]: P -> Q`.
    /// Rows are indexed by the basis of `Z(Q)`.
    pub fn map_matrix(&self, p: SubId, q: SubId, g: &Perm) -> Vec<Vec<u64>> {
        let (Some(cp), Some(cq)) = (self.coords.get(&p), self.coords.get(&q)) else {
            return vec![vec![0; self.rank(p)]; self.rank(q)];
        };
        let gi = g.inverse();
        cq.basis
            .iter()
            .map(|z| cp.to_vector(&z.conj(&gi)).expect("image of Z(Q) lies in Z(P) for centric P"))
            .collect()
    }

    /// `z -> g z g^-1` on coordinates.
    pub fn map_vector(&self, p: SubId, q: SubId, g: &Perm, v: &[u64]) -> Vector {
        let (Some(cp), Some(cq)) = (self.coords.get(&p), self.coords.get(&q)) else {
            return vec![0; self.rank(p)];
        };
        let z = cq.to_perm(v);
        cp.to_vector(&z.conj(&g.inverse())).expect("image of Z(Q) lies in Z(P) for centric P")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;

    fn a6_fusion() -> FusionSystem {
        let g = Group::generate(6, vec![Perm::parse(6, "(1 2 3)").unwrap(), Perm::parse(6, "(2 3 4 5 6)").unwrap()])
            .unwrap();
        FusionSystem::new(&g, 2, 512).unwrap()
    }

    #[test]
    fn a6_centric_orbit_category() {
        let fs = a6_fusion();
        let c: BTreeSet<SubId> = fs.centrics().into_iter().collect();
        let cat = OrbitCategory::new(&fs, &c, true).unwrap();
        assert_eq!(cat.objects().len(), 4);
        assert!(cat.check_associative());
        for (i, &o) in cat.objects().iter().enumerate() {
            let h = fs.subgroup(o);
            if h.order() == 4 && h.exponent() == 2 {
                assert_eq!(cat.hom(i, i).len(), 6);
            }
        }
        let full = OrbitCategory::new(&fs, &c, false).unwrap();
        assert_eq!(full.objects().len(), c.len());
        assert!(full.check_associative());
    }

    #[test]
    fn trivial_category() {
        let g = Group::generate(2, vec![Perm::parse(2, "(1 2)").unwrap()]).unwrap();
        let fs = FusionSystem::new(&g, 2, 512).unwrap();
        let c = BTreeSet::from([fs.s_id()]);
        let cat = OrbitCategory::new(&fs, &c, true).unwrap();
        assert_eq!(cat.morphisms().len(), 1);
    }

    #[test]
    fn functoriality_of_centers() {
        let fs = a6_fusion();
        let c: BTreeSet<SubId> = fs.centrics().into_iter().collect();
        let f = CenterFunctor::new(&fs, &c).unwrap();
        let cat = OrbitCategory::new(&fs, &c, false).unwrap();
        let obj = cat.objects().to_vec();
        for (a, ma) in cat.morphisms().iter().enumerate() {
            for k in 0..obj.len() {
                for &b in cat.hom(ma.tgt, k) {
                    let mb = &cat.morphisms()[b];
                    let ab = &cat.morphisms()[cat.compose(a, b)];
                    // F(ab) = F(a) F(b) acting on Z(P_k) -> Z(P_src)
                    let zk = f.value(obj[k]).unwrap();
                    for v in zk.elements() {
                        let via = f.map_vector(obj[ma.tgt], obj[k], &mb.g, &v);
                        let via = f.map_vector(obj[ma.src], obj[ma.tgt], &ma.g, &via);
                        assert_eq!(via, f.map_vector(obj[ab.src], obj[k], &ab.g, &v));
                    }
                }
            }
        }
    }
}
