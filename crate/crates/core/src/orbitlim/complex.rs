//! The normalized bar complex computing `lim^k` of a center functor.

use std::collections::HashMap;

use crate::abelian::Vector;
use crate::error::{Error, Result};
use crate::linalg::{left_kernel, quotient_structure, Row, Submodule};
use crate::ring::{PivotRing, PrimePowerRing};

use super::category::{CenterFunctor, OrbitCategory};

/// Default bound on the number of cochain coordinates in one degree.
pub const DEFAULT_COCHAIN_CAP: usize = 1_000_000;

/// A chain `P_0 -> P_1 -> ... -> P_k` of non-identity morphisms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chain {
    pub src: usize,
    pub mors: Vec<usize>,
}

/// A cochain: one value in `F(P_0)` per chain of its degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    pub degree: usize,
    pub values: Vec<Vector>,
}

pub struct BarComplex<'c, 'a> {
    cat: &'c OrbitCategory<'a>,
    functor: &'c CenterFunctor,
    p: u64,
    top_exp: u32,
    chains: Vec<Vec<Chain>>,
    index: Vec<HashMap<Chain, usize>>,
    offsets: Vec<Vec<usize>>,
    exps: Vec<Vec<u32>>,
    /// `diffs[k]`: entries `(row, col, value)` of `d: C^k -> C^{k+1}`.
    diffs: Vec<Vec<(usize, usize, i64)>>,
}

impl<'c, 'a> BarComplex<'c, 'a> {
    /// Cochains in degrees `0..=top` and differentials below `top`.
    pub fn new(cat: &'c OrbitCategory<'a>, functor: &'c CenterFunctor, top: usize, cap: usize) -> Result<Self> {
        let objects = cat.objects();
        let in_support: Vec<bool> = objects.iter().map(|&o| functor.contains(o)).collect();
        let mut chains: Vec<Vec<Chain>> = vec![(0..objects.len())
            .filter(|&i| in_support[i])
            .map(|i| Chain { src: i, mors: Vec::new() })
            .collect()];
        for k in 1..=top {
            let mut next = Vec::new();
            let mut size = 0usize;
            for c in &chains[k - 1] {
                let last = c.mors.last().map_or(c.src, |&m| cat.morphisms()[m].tgt);
                let rank = functor.rank(objects[c.src]);
                for j in 0..objects.len() {
                    for &m in cat.hom(last, j) {
                        if cat.morphisms()[m].is_identity {
                            continue;
                        }
                        let mut mors = c.mors.clone();
                        mors.push(m);
                        next.push(Chain { src: c.src, mors });
                        size += rank;
                        if size > cap {
                            return Err(Error::cap("cochain coordinates", cap));
                        }
                    }
                }
            }
            chains.push(next);
        }
        let mut index = Vec::new();
        let mut offsets = Vec::new();
        let mut exps = Vec::new();
        for level in &chains {
            let mut idx = HashMap::new();
            let mut off = Vec::new();
            let mut ex = Vec::new();
            for (i, c) in level.iter().enumerate() {
                idx.insert(c.clone(), i);
                off.push(ex.len());
                if let Some(m) = functor.value(objects[c.src]) {
                    ex.extend_from_slice(m.exps());
                }
            }
            if ex.len() > cap {
                return Err(Error::cap("cochain coordinates", cap));
            }
            index.push(idx);
            offsets.push(off);
            exps.push(ex);
        }
        let top_exp = exps.iter().flatten().copied().max().unwrap_or(1);
        let mut cx = BarComplex {
            cat,
            functor,
            p: cat.fusion().prime(),
            top_exp,
            chains,
            index,
            offsets,
            exps,
            diffs: Vec::new(),
        };
        for k in 0..top {
            let d = cx.differential(k);
            cx.diffs.push(d);
        }
        Ok(cx)
    }

    fn differential(&self, k: usize) -> Vec<(usize, usize, i64)> {
        let objects = self.cat.objects();
        let mut acc: HashMap<(usize, usize), i64> = HashMap::new();
        for (s, sigma) in self.chains[k + 1].iter().enumerate() {
            let p0 = objects[sigma.src];
            let rank = self.functor.rank(p0);
            if rank == 0 {
                continue;
            }
            let col0 = self.offsets[k + 1][s];
            let phi1 = &self.cat.morphisms()[sigma.mors[0]];
            // F(phi_1) t(phi_2, ...)
            let face0 = Chain { src: phi1.tgt, mors: sigma.mors[1..].to_vec() };
            if let Some(&f) = self.index[k].get(&face0) {
                let row0 = self.offsets[k][f];
                let m = self.functor.map_matrix(p0, objects[phi1.tgt], &phi1.g);
                for (a, r) in m.iter().enumerate() {
                    for (b, &v) in r.iter().enumerate() {
                        if v != 0 {
                            *acc.entry((row0 + a, col0 + b)).or_insert(0) += v as i64;
                        }
                    }
                }
            }
            let mut same_source = |mors: Vec<usize>, sign: i64| {
                let face = Chain { src: sigma.src, mors };
                let f = self.index[k][&face];
                let row0 = self.offsets[k][f];
                for a in 0..rank {
                    *acc.entry((row0 + a, col0 + a)).or_insert(0) += sign;
                }
            };
            for i in 1..=k {
                let c = self.cat.compose(sigma.mors[i - 1], sigma.mors[i]);
                if self.cat.morphisms()[c].is_identity {
                    continue;
                }
                let mut mors = sigma.mors[..i - 1].to_vec();
                mors.push(c);
                mors.extend_from_slice(&sigma.mors[i + 1..]);
                same_source(mors, if i % 2 == 0 { 1 } else { -1 });
            }
            same_source(sigma.mors[..k].to_vec(), if (k + 1).is_multiple_of(2) { 1 } else { -1 });
        }
        let mut out: Vec<(usize, usize, i64)> =
            acc.into_iter().filter(|&(_, v)| v != 0).map(|((r, c), v)| (r, c, v)).collect();
        out.sort_unstable();
        out
    }

    pub fn category(&self) -> &'c OrbitCategory<'a> {
        self.cat
    }

    pub fn functor(&self) -> &'c CenterFunctor {
        self.functor
    }

    pub fn top(&self) -> usize {
        self.chains.len() - 1
    }

    pub fn chains(&self, k: usize) -> &[Chain] {
        &self.chains[k]
    }

    pub fn chain_index(&self, k: usize, c: &Chain) -> Option<usize> {
        self.index[k].get(c).copied()
    }

    /// Number of cochain coordinates in degree `k`.
    pub fn dimension(&self, k: usize) -> usize {
        self.exps[k].len()
    }

    /// Exponents `e` with coordinate `j` of `C^k` living in `Z/p^e`.
    pub fn exponents(&self, k: usize) -> &[u32] {
        &self.exps[k]
    }

    /// The subgroup id `P_0` owning each coordinate of `C^k`.
    pub fn coordinate_sources(&self, k: usize) -> Vec<usize> {
        let objects = self.cat.objects();
        let mut out = Vec::with_capacity(self.dimension(k));
        for c in &self.chains[k] {
            let o = objects[c.src];
            out.extend(std::iter::repeat_n(o, self.functor.rank(o)));
        }
        out
    }

    /// Nonzero entries `(row, col, value)` of `d: C^k -> C^{k+1}`.
    pub fn entries(&self, k: usize) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.diffs[k].iter().copied()
    }

    pub fn ring(&self) -> PrimePowerRing {
        PrimePowerRing::new(self.p, self.top_exp)
    }

    pub(crate) fn dense<R: PivotRing>(&self, ring: &R, k: usize) -> Vec<Row<R>> {
        let mut a = vec![vec![ring.zero(); self.dimension(k + 1)]; self.dimension(k)];
        for &(r, c, v) in &self.diffs[k] {
            a[r][c] = ring.from_i64(v);
        }
        a
    }

    /// Cocycles `Z^k` (containing the relation module) over `ring`.
    pub fn cocycles<R: PivotRing>(&self, ring: &R, k: usize) -> Result<Submodule<R>> {
        if k >= self.diffs.len() {
            return Err(Error::precondition("complex too short for this degree"));
        }
        let a = self.dense(ring, k);
        Ok(cocycle_module(ring, self.p, &a, &self.exps[k], &self.exps[k + 1]))
    }

    /// Coboundaries `B^k` plus the relation module.
    pub fn coboundaries<R: PivotRing>(&self, ring: &R, k: usize) -> Submodule<R> {
        let prev = if k > 0 { Some(self.dense(ring, k - 1)) } else { None };
        coboundary_module(ring, self.p, prev.as_deref(), &self.exps[k])
    }

    /// Orders of the cyclic factors of `lim^k`, and a witness for each.
    pub fn limit_over<R: PivotRing>(&self, ring: &R, k: usize) -> Result<(Vec<u128>, Vec<Row<R>>)> {
        if self.dimension(k) == 0 {
            return Ok((Vec::new(), Vec::new()));
        }
        let z = self.cocycles(ring, k)?;
        let b = self.coboundaries(ring, k);
        let q = quotient_structure(ring, &z, &b).ok_or_else(|| Error::internal("infinite cohomology"))?;
        Ok((q.orders, q.witnesses))
    }

    /// Splits a flat coordinate vector into a cochain.
    pub fn cochain(&self, k: usize, flat: &[u64]) -> Cochain {
        let objects = self.cat.objects();
        let values = self.chains[k]
            .iter()
            .zip(&self.offsets[k])
            .map(|(c, &off)| {
                let m = self.functor.value(objects[c.src]).expect("chain starts in the support");
                m.normalize(&flat[off..off + m.rank()])
            })
            .collect();
        Cochain { degree: k, values }
    }

    pub fn flatten(&self, c: &Cochain) -> Vec<u64> {
        c.values.iter().flatten().copied().collect()
    }

    /// `d c`, computed from the sparse differential.
    pub fn coboundary(&self, c: &Cochain) -> Cochain {
        let k = c.degree;
        let flat = self.flatten(c);
        let modulus = self.ring().modulus() as i128;
        let mut out = vec![0i128; self.dimension(k + 1)];
        for &(r, col, v) in &self.diffs[k] {
            out[col] = (out[col] + v as i128 * flat[r] as i128).rem_euclid(modulus);
        }
        let out: Vec<u64> = out.into_iter().map(|x| x as u64).collect();
        self.cochain(k + 1, &out)
    }

    pub fn is_zero(&self, c: &Cochain) -> bool {
        let objects = self.cat.objects();
        c.values.iter().zip(&self.chains[c.degree]).all(|(v, ch)| {
            self.functor.value(objects[ch.src]).is_none_or(|m| m.is_zero(v))
        })
    }

    /// Whether `c` is a coboundary, that is `c` lies in `B^k`.
    pub fn is_coboundary(&self, c: &Cochain) -> bool {
        let ring = self.ring();
        let b = self.coboundaries(&ring, c.degree);
        b.contains(&ring, &self.flatten(c))
    }

    /// Value of a cochain on a chain given by morphism ids; zero on
    /// degenerate chains.
    pub fn value(&self, c: &Cochain, src: usize, mors: &[usize]) -> Vector {
        let rank = self.functor.rank(self.cat.objects()[src]);
        if mors.iter().any(|&m| self.cat.morphisms()[m].is_identity) {
            return vec![0; rank];
        }
        let key = Chain { src, mors: mors.to_vec() };
        match self.index[c.degree].get(&key) {
            Some(&i) => c.values[i].clone(),
            None => vec![0; rank],
        }
    }
}

/// Relation rows `p^{e_j} e_j`.
pub(crate) fn relation_rows<R: PivotRing>(ring: &R, p: u64, exps: &[u32]) -> Vec<Row<R>> {
    let n = exps.len();
    exps.iter()
        .enumerate()
        .map(|(j, &e)| {
            let mut r = vec![ring.zero(); n];
            r[j] = ring.prime_power(p, e);
            r
        })
        .collect()
}

/// `{x : x A in M_{k+1}}` for a cochain map `A` between coordinate groups
/// with exponents `ek` and `ek1`.
pub(crate) fn cocycle_module<R: PivotRing>(ring: &R, p: u64, a: &[Row<R>], ek: &[u32], ek1: &[u32]) -> Submodule<R> {
    let n = ek.len();
    let m = ek1.len();
    let scalers: Option<Vec<R::Elem>> = ek1.iter().map(|&e| ring.torsion_scaler(p, e)).collect();
    match scalers {
        Some(s) => {
            let scaled: Vec<Row<R>> =
                a.iter().map(|r| r.iter().zip(&s).map(|(x, y)| ring.mul(x, y)).collect()).collect();
            let mut gens = left_kernel(ring, &scaled, m);
            gens.extend(relation_rows(ring, p, ek));
            Submodule::from_generators(ring, gens, n)
        }
        None => {
            let target = Submodule::from_generators(ring, relation_rows(ring, p, ek1), m);
            Submodule::preimage(ring, a, &target)
        }
    }
}

/// Row space of `prev` plus the relation module.
pub(crate) fn coboundary_module<R: PivotRing>(ring: &R, p: u64, prev: Option<&[Row<R>]>, ek: &[u32]) -> Submodule<R> {
    let mut gens = relation_rows(ring, p, ek);
    if let Some(a) = prev {
        gens.extend(a.iter().cloned());
    }
    Submodule::from_generators(ring, gens, ek.len())
}
