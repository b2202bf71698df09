//! Higher limits `lim^k` of the center functor `Z^R_F` over orbit
//! categories, together with the long exact sequence of a splitting and the
//! rigid maps attached to one-cocycles.

mod category;
mod complex;
mod les;
mod rigid;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::Result;
use crate::fusion::{FusionSystem, SubId};

pub use category::{CenterFunctor, Morphism, OrbitCategory};
pub use complex::{BarComplex, Chain, Cochain, DEFAULT_COCHAIN_CAP};
pub use les::{admissible_splittings, verify_les, LesNode, LesReport, Splitting};
pub use rigid::{
    gamma_star, inclusion_normalize, restriction_injectivity_check, rigid_map, twist_by_central, Locality,
    LocalityFormula, locality_formula, RestrictionReport, RigidMap, Transport,
};



/// The orbit category on the upward closure of an interval, with `Z^R_F`.
pub struct LimitSetup<'a> {
    pub category: OrbitCategory<'a>,
    pub functor: CenterFunctor,
}

impl<'a> LimitSetup<'a> {
    pub fn new(fs: &'a FusionSystem, support: &BTreeSet<SubId>, skeletal: bool) -> Result<LimitSetup<'a>> {
        let functor = CenterFunctor::new(fs, support)?;
        let up = fs.upward_closure(support);
        let category = OrbitCategory::new(fs, &up, skeletal)?;
        Ok(LimitSetup { category, functor })
    }

    pub fn complex(&self, top: usize, cap: usize) -> Result<BarComplex<'_, 'a>> {
        BarComplex::new(&self.category, &self.functor, top, cap)
    }
}

/// `lim^k` as a list of cyclic orders, with cocycle representatives.
#[derive(Clone, Debug, Serialize)]
pub struct CohomologyResult {
    pub k: usize,
    pub invariant_factors: Vec<u128>,
    pub cochain_dims: Vec<usize>,
    #[serde(skip)]
    pub witnesses: Vec<Cochain>,
}

impl CohomologyResult {
    pub fn order(&self) -> u128 {
        self.invariant_factors.iter().product()
    }

    pub fn is_zero(&self) -> bool {
        self.invariant_factors.is_empty()
    }
}

/// `lim^k Z^R_F` for `k = 0..=k_max` over `Z/p^N`.
pub fn higher_limits(fs: &FusionSystem, support: &BTreeSet<SubId>, k_max: usize, cap: usize) -> Result<Vec<CohomologyResult>> {
    let setup = LimitSetup::new(fs, support, true)?;
    let cx = setup.complex(k_max + 1, cap)?;
    limits_of(&cx, k_max)
}

pub(crate) fn limits_of(cx: &BarComplex<'_, '_>, k_max: usize) -> Result<Vec<CohomologyResult>> {
    let ring = cx.ring();
    let dims: Vec<usize> = (0..=cx.top()).map(|k| cx.dimension(k)).collect();
    (0..=k_max)
        .map(|k| {
            let (orders, witnesses) = cx.limit_over(&ring, k)?;
            Ok(CohomologyResult {
                k,
                invariant_factors: orders,
                cochain_dims: dims.clone(),
                witnesses: witnesses.iter().map(|w| cx.cochain(k, w)).collect(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;
    use crate::perm::Perm;
    use crate::ring::IntegerRing;
    use num_bigint::BigInt;

    fn group(degree: usize, gens: &[&str]) -> Group {
        Group::generate(degree, gens.iter().map(|s| Perm::parse(degree, s).unwrap()).collect()).unwrap()
    }

    fn a6() -> FusionSystem {
        FusionSystem::new(&group(6, &["(1 2 3)", "(2 3 4 5 6)"]), 2, 512).unwrap()
    }

    #[test]
    fn a6_centric_limits() {
        let fs = a6();
        let c: BTreeSet<SubId> = fs.centrics().into_iter().collect();
        let r = higher_limits(&fs, &c, 2, DEFAULT_COCHAIN_CAP).unwrap();
        assert_eq!(r[0].invariant_factors, Vec::<u128>::new());
        assert_eq!(r[1].invariant_factors, vec![2]);
        assert_eq!(r[2].invariant_factors, Vec::<u128>::new());
    }

    #[test]
    fn square_of_differential_vanishes() {
        let fs = a6();
        let c: BTreeSet<SubId> = fs.centrics().into_iter().collect();
        let setup = LimitSetup::new(&fs, &c, true).unwrap();
        let cx = setup.complex(3, DEFAULT_COCHAIN_CAP).unwrap();
        for k in 0..2 {
            for (i, _) in cx.chains(k).iter().enumerate() {
                let rank = cx.cochain(k, &vec![0; cx.dimension(k)]).values[i].len();
                for a in 0..rank {
                    let mut flat = vec![0u64; cx.dimension(k)];
                    let off: usize = (0..i).map(|j| cx.cochain(k, &flat).values[j].len()).sum();
                    flat[off + a] = 1;
                    let c = cx.cochain(k, &flat);
                    let dd = cx.coboundary(&cx.coboundary(&c));
                    assert!(cx.is_zero(&dd));
                }
            }
        }
    }

    /// `log_p |Z^m / L|` for a lattice `L` spanned by `rows` and `d Z^m`,
    /// by Hermite elimination with entries kept modulo `d`.
    fn index_log(rows: &[Vec<i128>], m: usize, d: i128, p: i128) -> u32 {
        let mut work: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|x| x.rem_euclid(d)).collect()).collect();
        let log = |mut x: i128| {
            let mut e = 0;
            while x % p == 0 {
                x /= p;
                e += 1;
            }
            e
        };
        let mut total = 0;
        for col in 0..m {
            loop {
                let live: Vec<usize> = (0..work.len()).filter(|&i| work[i][col] != 0).collect();
                if live.len() <= 1 {
                    break;
                }
                let &piv = live.iter().min_by_key(|&&i| work[i][col]).unwrap();
                let prow = work[piv].clone();
                for &i in &live {
                    if i != piv {
                        let q = work[i][col] / prow[col];
                        for j in 0..m {
                            work[i][j] = (work[i][j] - q * prow[j]).rem_euclid(d);
                        }
                    }
                }
            }
            match (0..work.len()).find(|&i| work[i][col] != 0) {
                None => total += log(d),
                Some(i) => {
                    let prow = work.swap_remove(i);
                    let a = prow[col];
                    let (mut g, mut r0) = (a, d);
                    while r0 != 0 {
                        (g, r0) = (r0, g % r0);
                    }
                    total += log(g);
                    let k = d / g;
                    let rest: Vec<i128> = prow.iter().map(|x| (k * x).rem_euclid(d)).collect();
                    if rest.iter().any(|&x| x != 0) {
                        work.push(rest);
                    }
                }
            }
        }
        total
    }

    /// `log_p |lim^k|` through `|Z^k| / |B^k|`, from lattice indices alone.
    fn oracle_order_log(cx: &BarComplex<'_, '_>, k: usize) -> u32 {
        let p = cx.category().fusion().prime() as i128;
        let d = cx.ring().modulus() as i128;
        let image_log = |j: usize| -> u32 {
            // |im d_j| = |C^{j+1}| / |Z^{j+1} : (rowspace A_j + M_{j+1})|
            let m = cx.dimension(j + 1);
            let mut rows = vec![vec![0i128; m]; cx.dimension(j)];
            for (r, c, v) in cx.entries(j) {
                rows[r][c] = v as i128;
            }
            for (c, &e) in cx.exponents(j + 1).iter().enumerate() {
                let mut row = vec![0i128; m];
                row[c] = p.pow(e);
                rows.push(row);
            }
            let total: u32 = cx.exponents(j + 1).iter().sum();
            total - index_log(&rows, m, d, p)
        };
        let c_log: u32 = cx.exponents(k).iter().sum();
        let z_log = c_log - image_log(k);
        let b_log = if k == 0 { 0 } else { image_log(k - 1) };
        z_log - b_log
    }

    fn log2(orders: &[u128]) -> u32 {
        orders.iter().map(|o| o.trailing_zeros()).sum()
    }

    #[test]
    fn lattice_index_oracle_agrees() {
        let fs = a6();
        let c: BTreeSet<SubId> = fs.centrics().into_iter().collect();
        let setup = LimitSetup::new(&fs, &c, true).unwrap();
        let cx = setup.complex(3, DEFAULT_COCHAIN_CAP).unwrap();
        for k in 0..3 {
            let (orders, _) = cx.limit_over(&cx.ring(), k).unwrap();
            assert_eq!(log2(&orders), oracle_order_log(&cx, k), "degree {k}");
        }
    }

    #[test]
    fn integer_ring_route_on_small_complex() {
        let fs = FusionSystem::new(&group(4, &["(1 2)", "(1 2 3 4)"]), 2, 512).unwrap();
        let s = BTreeSet::from([fs.s_id()]);
        let setup = LimitSetup::new(&fs, &s, true).unwrap();
        let cx = setup.complex(2, DEFAULT_COCHAIN_CAP).unwrap();
        let z = IntegerRing::<BigInt>::new();
        for k in 0..2 {
            let (a, _) = cx.limit_over(&z, k).unwrap();
            let (b, _) = cx.limit_over(&cx.ring(), k).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn skeleton_matches_full_category() {
        let fs = a6();
        let c: BTreeSet<SubId> = fs.centrics().into_iter().collect();
        let full = LimitSetup::new(&fs, &c, false).unwrap();
        let cx = full.complex(2, DEFAULT_COCHAIN_CAP).unwrap();
        let r = limits_of(&cx, 1).unwrap();
        assert_eq!(r[0].invariant_factors, Vec::<u128>::new());
        assert_eq!(r[1].invariant_factors, vec![2]);
    }
}
