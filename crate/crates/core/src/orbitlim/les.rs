//! The long exact sequence of a splitting `Q ∪ R`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fusion::{FusionSystem, SubId};
use crate::linalg::{quotient_structure, Row, Submodule};
use crate::ring::{PivotRing, PrimePowerRing};

use super::complex::{coboundary_module, cocycle_module};
use super::LimitSetup;

/// Complementary `F`-invariant intervals with `Q` not below `R`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Splitting {
    pub q: BTreeSet<SubId>,
    pub r: BTreeSet<SubId>,
}

impl Splitting {
    pub fn union(&self) -> BTreeSet<SubId> {
        self.q.union(&self.r).copied().collect()
    }

    /// Checks the interval, invariance and disjointness conditions.
    pub fn validate(&self, fs: &FusionSystem) -> Result<()> {
        if !self.q.is_disjoint(&self.r) {
            return Err(Error::precondition("Q and R meet"));
        }
        for (name, set) in [("Q", &self.q), ("R", &self.r), ("Q ∪ R", &self.union())] {
            let iv = fs.validate_interval(set);
            if !iv.is_interval || !iv.f_invariant {
                return Err(Error::precondition(format!("{name} is not an F-invariant interval")));
            }
        }
        for &q in &self.q {
            for &r in &self.r {
                for &q2 in &fs.classes()[fs.class_of(q)] {
                    if fs.is_le(q2, r) {
                        return Err(Error::precondition("a member of Q lies below a member of R"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// All splittings of an `F`-invariant interval `U` with both parts nonempty.
pub fn admissible_splittings(fs: &FusionSystem, u: &BTreeSet<SubId>) -> Vec<Splitting> {
    let classes: Vec<Vec<SubId>> = {
        let reps: BTreeSet<SubId> = u.iter().map(|&x| fs.rep_of(x)).collect();
        reps.into_iter().map(|r| fs.classes()[fs.class_of(r)].clone()).collect()
    };
    let c = classes.len();
    let mut out = Vec::new();
    if c > 20 {
        return out;
    }
    for mask in 1u32..(1u32 << c) - 1 {
        let r: BTreeSet<SubId> =
            (0..c).filter(|i| mask >> i & 1 == 1).flat_map(|i| classes[i].iter().copied()).collect();
        let q: BTreeSet<SubId> = u.difference(&r).copied().collect();
        let s = Splitting { q, r };
        if s.validate(fs).is_ok() {
            out.push(s);
        }
    }
    out
}

/// One term of the sequence: kernel of the outgoing map against the image
/// of the incoming one, as `log_p` of orders.
#[derive(Clone, Debug, Serialize)]
pub struct LesNode {
    pub label: String,
    pub kernel_log: u64,
    pub image_log: u64,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LesReport {
    pub r_limits: Vec<Vec<u128>>,
    pub u_limits: Vec<Vec<u128>>,
    pub q_limits: Vec<Vec<u128>>,
    pub nodes: Vec<LesNode>,
}

impl LesReport {
    pub fn is_exact(&self) -> bool {
        self.nodes.iter().all(|n| n.exact)
    }

    /// `lim^{k-1}(Q) ≅ lim^k(R)` for `2 <= k <= k_max`.
    pub fn connecting_isomorphisms(&self) -> Vec<bool> {
        (2..self.r_limits.len()).map(|k| self.q_limits[k - 1] == self.r_limits[k]).collect()
    }
}

fn select<T: Clone>(a: &[Vec<T>], rows: &[usize], cols: &[usize]) -> Vec<Vec<T>> {
    rows.iter().map(|&i| cols.iter().map(|&j| a[i][j].clone()).collect()).collect()
}

fn placement<R: PivotRing>(ring: &R, part: &[usize], n: usize) -> Vec<Row<R>> {
    part.iter()
        .map(|&j| {
            let mut r = vec![ring.zero(); n];
            r[j] = ring.one();
            r
        })
        .collect()
}

fn log_of(ring: &PrimePowerRing, m: &Submodule<PrimePowerRing>) -> u64 {
    m.order_log(ring).expect("finite chain ring")
}

/// Exactness of
/// `0 -> lim^0 R -> lim^0 U -> lim^0 Q -> lim^1 R -> ... -> lim^{k_max} Q`,
/// checked term by term as equality of submodules of cochains.
pub fn verify_les(fs: &FusionSystem, split: &Splitting, k_max: usize, cap: usize) -> Result<LesReport> {
    split.validate(fs)?;
    let u = split.union();
    let setup = LimitSetup::new(fs, &u, true)?;
    let cx = setup.complex(k_max + 1, cap)?;
    let ring = cx.ring();
    let p = fs.prime();

    let mut rpart = Vec::new();
    let mut qpart = Vec::new();
    for k in 0..=k_max + 1 {
        let src = cx.coordinate_sources(k);
        rpart.push((0..src.len()).filter(|&j| split.r.contains(&src[j])).collect::<Vec<_>>());
        qpart.push((0..src.len()).filter(|&j| split.q.contains(&src[j])).collect::<Vec<_>>());
    }
    let ex = |part: &Vec<usize>, k: usize| -> Vec<u32> { part.iter().map(|&j| cx.exponents(k)[j]).collect() };

    let mut a_u = Vec::new();
    let mut a_r = Vec::new();
    let mut a_q = Vec::new();
    let mut a_qr = Vec::new();
    for k in 0..=k_max {
        let a = cx.dense(&ring, k);
        let rq = select(&a, &rpart[k], &qpart[k + 1]);
        if rq.iter().flatten().any(|x| *x != 0) {
            return Err(Error::internal("R cochains do not form a subcomplex"));
        }
        a_r.push(select(&a, &rpart[k], &rpart[k + 1]));
        a_q.push(select(&a, &qpart[k], &qpart[k + 1]));
        a_qr.push(select(&a, &qpart[k], &rpart[k + 1]));
        a_u.push(a);
    }

    let z = |a: &[Vec<Row<PrimePowerRing>>], part: Option<&Vec<Vec<usize>>>, k: usize| {
        let (ek, ek1) = match part {
            Some(pt) => (ex(&pt[k], k), ex(&pt[k + 1], k + 1)),
            None => (cx.exponents(k).to_vec(), cx.exponents(k + 1).to_vec()),
        };
        cocycle_module(&ring, p, &a[k], &ek, &ek1)
    };
    let b = |a: &[Vec<Row<PrimePowerRing>>], part: Option<&Vec<Vec<usize>>>, k: usize| {
        let ek = match part {
            Some(pt) => ex(&pt[k], k),
            None => cx.exponents(k).to_vec(),
        };
        let prev = if k > 0 { Some(a[k - 1].as_slice()) } else { None };
        coboundary_module(&ring, p, prev, &ek)
    };

    let mut report = LesReport { r_limits: vec![], u_limits: vec![], q_limits: vec![], nodes: vec![] };
    let structure = |zz: &Submodule<PrimePowerRing>, bb: &Submodule<PrimePowerRing>| -> Result<Vec<u128>> {
        Ok(quotient_structure(&ring, zz, bb).ok_or_else(|| Error::internal("infinite cohomology"))?.orders)
    };
    let mut push = |label: String, ker: &Submodule<PrimePowerRing>, im: &Submodule<PrimePowerRing>, base: u64| {
        report.nodes.push(LesNode {
            label,
            kernel_log: log_of(&ring, ker) - base,
            image_log: log_of(&ring, im) - base,
            exact: ker.equals(&ring, im),
        });
    };

    let mut r_lim = Vec::new();
    let mut u_lim = Vec::new();
    let mut q_lim = Vec::new();
    for k in 0..=k_max {
        let (nu, nr, nq) = (cx.dimension(k), rpart[k].len(), qpart[k].len());
        let zr = z(&a_r, Some(&rpart), k);
        let br = b(&a_r, Some(&rpart), k);
        let zu = z(&a_u, None, k);
        let bu = b(&a_u, None, k);
        let zq = z(&a_q, Some(&qpart), k);
        let bq = b(&a_q, Some(&qpart), k);
        r_lim.push(structure(&zr, &br)?);
        u_lim.push(structure(&zu, &bu)?);
        q_lim.push(structure(&zq, &bq)?);

        let emb = placement(&ring, &rpart[k], nu);
        let proj: Vec<Row<PrimePowerRing>> = {
            let mut m = vec![vec![0u64; nq]; nu];
            for (i, &j) in qpart[k].iter().enumerate() {
                m[j][i] = 1;
            }
            m
        };

        // at lim^k R: ker(i) against im(delta) (or the relation module in degree 0)
        let ker_i = Submodule::preimage(&ring, &emb, &bu).intersection(&ring, &zr);
        let im_delta = if k == 0 {
            br.clone()
        } else {
            let zq_prev = z(&a_q, Some(&qpart), k - 1);
            zq_prev.image(&ring, &a_qr[k - 1], nr).sum(&ring, &br)
        };
        push(format!("lim^{k} R"), &ker_i, &im_delta, log_of(&ring, &br));

        // at lim^k U: ker(j) against im(i)
        let ker_j = Submodule::preimage(&ring, &proj, &bq).intersection(&ring, &zu);
        let im_i = zr.image(&ring, &emb, nu).sum(&ring, &bu);
        push(format!("lim^{k} U"), &ker_j, &im_i, log_of(&ring, &bu));

        // at lim^k Q: ker(delta) against im(j)
        let br_next = b(&a_r, Some(&rpart), k + 1);
        let ker_d = Submodule::preimage(&ring, &a_qr[k], &br_next).intersection(&ring, &zq);
        let im_j = zu.image(&ring, &proj, nq).sum(&ring, &bq);
        push(format!("lim^{k} Q"), &ker_d, &im_j, log_of(&ring, &bq));
    }
    report.r_limits = r_lim;
    report.u_limits = u_lim;
    report.q_limits = q_lim;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;
    use crate::perm::Perm;
    use crate::orbitlim::{higher_limits, DEFAULT_COCHAIN_CAP};

    fn group(degree: usize, gens: &[&str]) -> Group {
        Group::generate(degree, gens.iter().map(|s| Perm::parse(degree, s).unwrap()).collect()).unwrap()
    }

    #[test]
    fn a6_centric_splitting() {
        let fs = FusionSystem::new(&group(6, &["(1 2 3)", "(2 3 4 5 6)"]), 2, 512).unwrap();
        let c: BTreeSet<SubId> = fs.centrics().into_iter().collect();
        let splits = admissible_splittings(&fs, &c);
        assert!(!splits.is_empty());
        for s in &splits {
            let rep = verify_les(&fs, s, 2, DEFAULT_COCHAIN_CAP).unwrap();
            assert!(rep.is_exact(), "{:?}", rep.nodes);
            for (k, r) in rep.r_limits.iter().enumerate() {
                let direct = higher_limits(&fs, &s.r, 2, DEFAULT_COCHAIN_CAP).unwrap();
                assert_eq!(&direct[k].invariant_factors, r);
            }
            assert_eq!(rep.u_limits[1], vec![2]);
        }
        let top = BTreeSet::from([fs.s_id()]);
        let s = Splitting { q: top.clone(), r: c.difference(&top).copied().collect() };
        assert!(splits.contains(&s));
    }

    #[test]
    fn rejects_bad_splittings() {
        let fs = FusionSystem::new(&group(4, &["(1 2)", "(1 2 3 4)"]), 2, 512).unwrap();
        let c: BTreeSet<SubId> = fs.centrics().into_iter().collect();
        let top = BTreeSet::from([fs.s_id()]);
        let bad = Splitting { r: top.clone(), q: c.difference(&top).copied().collect() };
        assert!(bad.validate(&fs).is_err());
        assert!(verify_les(&fs, &bad, 1, DEFAULT_COCHAIN_CAP).is_err());
    }
}
