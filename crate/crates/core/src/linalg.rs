//! Echelon forms, kernels, submodules and Smith normal form over a
//! [`PivotRing`]. Vectors are rows and maps act on the right: `x -> x A`.

use crate::ring::PivotRing;

pub type Row<R> = Vec<<R as PivotRing>::Elem>;

fn is_zero_row<R: PivotRing>(ring: &R, row: &[R::Elem]) -> bool {
    row.iter().all(|x| ring.is_zero(x))
}

/// `row += c * other`, starting at column `from`.
fn axpy<R: PivotRing>(ring: &R, row: &mut [R::Elem], c: &R::Elem, other: &[R::Elem], from: usize) {
    if ring.is_zero(c) {
        return;
    }
    for j in from..row.len() {
        if !ring.is_zero(&other[j]) {
            row[j] = ring.add(&row[j], &ring.mul(c, &other[j]));
        }
    }
}

fn scale<R: PivotRing>(ring: &R, c: &R::Elem, row: &[R::Elem]) -> Row<R> {
    row.iter().map(|x| ring.mul(c, x)).collect()
}

pub fn vec_mat<R: PivotRing>(ring: &R, x: &[R::Elem], a: &[Row<R>], ncols: usize) -> Row<R> {
    let mut out = vec![ring.zero(); ncols];
    for (xi, ai) in x.iter().zip(a) {
        axpy(ring, &mut out, xi, ai, 0);
    }
    out
}

pub fn mat_mul<R: PivotRing>(ring: &R, a: &[Row<R>], b: &[Row<R>], ncols: usize) -> Vec<Row<R>> {
    a.iter().map(|row| vec_mat(ring, row, b, ncols)).collect()
}

pub fn identity<R: PivotRing>(ring: &R, n: usize) -> Vec<Row<R>> {
    (0..n)
        .map(|i| {
            let mut r = vec![ring.zero(); n];
            r[i] = ring.one();
            r
        })
        .collect()
}

/// Result of a (partial) Howell elimination.
#[derive(Clone, Debug)]
pub struct Echelon<R: PivotRing> {
    pub rows: Vec<Row<R>>,
    pub pivots: Vec<usize>,
    /// Nonzero rows left over, all vanishing on the eliminated columns.
    pub rest: Vec<Row<R>>,
}

/// Howell elimination on columns `0..col_limit`. Each pivot is followed by
/// its annihilator multiple, so the span of `rest` is exactly the part of the
/// row space vanishing on those columns. With `reduce`, entries above pivots
/// are brought to canonical residues.
pub fn howell<R: PivotRing>(ring: &R, mut work: Vec<Row<R>>, col_limit: usize, reduce: bool) -> Echelon<R> {
    work.retain(|r| !is_zero_row(ring, r));
    let mut rows: Vec<Row<R>> = Vec::new();
    let mut pivots = Vec::new();
    for col in 0..col_limit {
        let mut best: Option<(usize, u128)> = None;
        for (i, r) in work.iter().enumerate() {
            if !ring.is_zero(&r[col]) {
                let k = ring.pivot_key(&r[col]);
                if best.is_none_or(|(_, bk)| k < bk) {
                    best = Some((i, k));
                }
            }
        }
        let Some((idx, _)) = best else { continue };
        let mut prow = work.swap_remove(idx);
        for r in work.iter_mut() {
            if ring.is_zero(&r[col]) {
                continue;
            }
            let (_, s, t, u, v) = ring.gcdext(&prow[col], &r[col]);
            let simple = ring.is_zero(&t) && s == ring.one() && v == ring.one();
            if simple {
                let mut tmp = std::mem::take(r);
                axpy(ring, &mut tmp, &u, &prow, col);
                *r = tmp;
            } else {
                let np: Row<R> = (0..prow.len())
                    .map(|j| ring.add(&ring.mul(&s, &prow[j]), &ring.mul(&t, &r[j])))
                    .collect();
                let nr: Row<R> = (0..prow.len())
                    .map(|j| ring.add(&ring.mul(&u, &prow[j]), &ring.mul(&v, &r[j])))
                    .collect();
                prow = np;
                *r = nr;
            }
        }
        work.retain(|r| !is_zero_row(ring, r));
        let w = ring.unit_normalizer(&prow[col]);
        if w != ring.one() {
            prow = scale(ring, &w, &prow);
        }
        if reduce {
            for r in rows.iter_mut() {
                let q = ring.reduce_quotient(&r[col], &prow[col]);
                if !ring.is_zero(&q) {
                    let nq = ring.neg(&q);
                    axpy(ring, r, &nq, &prow, col);
                }
            }
        }
        if let Some(a) = ring.annihilator(&prow[col]) {
            let ar = scale(ring, &a, &prow);
            if !is_zero_row(ring, &ar) {
                work.push(ar);
            }
        }
        rows.push(prow);
        pivots.push(col);
    }
    Echelon { rows, pivots, rest: work }
}

/// Generators of `{x : x A = 0}` for `A` with `a.len()` rows and `ncols` columns.
pub fn left_kernel<R: PivotRing>(ring: &R, a: &[Row<R>], ncols: usize) -> Vec<Row<R>> {
    let m = a.len();
    let aug: Vec<Row<R>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..m).map(|j| if i == j { ring.one() } else { ring.zero() }));
            row
        })
        .collect();
    let e = howell(ring, aug, ncols, false);
    e.rest.into_iter().map(|r| r[ncols..].to_vec()).collect()
}

/// A submodule of `R^n`, stored in reduced Howell form.
#[derive(Clone, Debug)]
pub struct Submodule<R: PivotRing> {
    pub ncols: usize,
    pub rows: Vec<Row<R>>,
    pub pivots: Vec<usize>,
}

impl<R: PivotRing> Submodule<R> {
    pub fn zero(ncols: usize) -> Self {
        Submodule { ncols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ring: &R, ncols: usize) -> Self {
        Submodule::from_generators(ring, identity(ring, ncols), ncols)
    }

    pub fn from_generators(ring: &R, gens: Vec<Row<R>>, ncols: usize) -> Self {
        debug_assert!(gens.iter().all(|g| g.len() == ncols));
        let e = howell(ring, gens, ncols, true);
        debug_assert!(e.rest.is_empty());
        Submodule { ncols, rows: e.rows, pivots: e.pivots }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, ring: &R, v: &[R::Elem]) -> bool {
        let mut v = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            if ring.is_zero(&v[pc]) {
                continue;
            }
            match ring.divide(&v[pc], &row[pc]) {
                Some(q) => {
                    let nq = ring.neg(&q);
                    axpy(ring, &mut v, &nq, row, pc);
                }
                None => return false,
            }
        }
        is_zero_row(ring, &v)
    }

    pub fn contains_module(&self, ring: &R, other: &Submodule<R>) -> bool {
        other.rows.iter().all(|r| self.contains(ring, r))
    }

    pub fn sum(&self, ring: &R, other: &Submodule<R>) -> Submodule<R> {
        let mut g = self.rows.clone();
        g.extend(other.rows.iter().cloned());
        Submodule::from_generators(ring, g, self.ncols)
    }

    pub fn add_generators(&self, ring: &R, gens: &[Row<R>]) -> Submodule<R> {
        let mut g = self.rows.clone();
        g.extend(gens.iter().cloned());
        Submodule::from_generators(ring, g, self.ncols)
    }

    pub fn intersection(&self, ring: &R, other: &Submodule<R>) -> Submodule<R> {
        let a = self.rows.len();
        let n = self.ncols;
        let mut aug: Vec<Row<R>> = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            let mut row = r.clone();
            row.extend((0..a).map(|j| if i == j { ring.one() } else { ring.zero() }));
            aug.push(row);
        }
        for r in &other.rows {
            let mut row = r.clone();
            row.extend((0..a).map(|_| ring.zero()));
            aug.push(row);
        }
        let e = howell(ring, aug, n, false);
        let gens = e.rest.iter().map(|r| vec_mat(ring, &r[n..], &self.rows, n)).collect();
        Submodule::from_generators(ring, gens, n)
    }

    /// Image under `x -> x A`, where `A` has `ncols` rows and `m` columns.
    pub fn image(&self, ring: &R, a: &[Row<R>], m: usize) -> Submodule<R> {
        let gens = self.rows.iter().map(|r| vec_mat(ring, r, a, m)).collect();
        Submodule::from_generators(ring, gens, m)
    }

    /// `{x in R^k : x A in target}` for `A` with `k` rows.
    pub fn preimage(ring: &R, a: &[Row<R>], target: &Submodule<R>) -> Submodule<R> {
        let k = a.len();
        let n = target.ncols;
        let mut aug: Vec<Row<R>> = Vec::new();
        for (i, r) in a.iter().enumerate() {
            let mut row = r.clone();
            row.extend((0..k).map(|j| if i == j { ring.one() } else { ring.zero() }));
            aug.push(row);
        }
        for r in &target.rows {
            let mut row = r.clone();
            row.extend((0..k).map(|_| ring.zero()));
            aug.push(row);
        }
        let e = howell(ring, aug, n, false);
        let gens = e.rest.into_iter().map(|r| r[n..].to_vec()).collect();
        Submodule::from_generators(ring, gens, k)
    }

    /// `log_p |R^n / U|` over a chain ring.
    pub fn colength_log(&self, ring: &R) -> Option<u64> {
        let full = ring.quotient_log(&ring.zero())? as u64;
        let mut total = (self.ncols - self.pivots.len()) as u64 * full;
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            total += ring.quotient_log(&row[pc])? as u64;
        }
        Some(total)
    }

    /// `log_p |U|` over a chain ring.
    pub fn order_log(&self, ring: &R) -> Option<u64> {
        let full = ring.quotient_log(&ring.zero())? as u64;
        Some(self.ncols as u64 * full - self.colength_log(ring)?)
    }

    pub fn equals(&self, ring: &R, other: &Submodule<R>) -> bool {
        self.contains_module(ring, other) && other.contains_module(ring, self)
    }
}

/// Smith normal form `P A Q = diag`, returning the diagonal and `Q^{-1}`.
pub struct Smith<R: PivotRing> {
    pub diagonal: Vec<R::Elem>,
    pub q_inverse: Vec<Row<R>>,
}

pub fn smith<R: PivotRing>(ring: &R, mut m: Vec<Row<R>>, ncols: usize) -> Smith<R> {
    let nrows = m.len();
    let mut qinv = identity(ring, ncols);
    let mut diagonal = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        let mut best: Option<(usize, usize, u128)> = None;
        for (i, row) in m.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if !ring.is_zero(x) {
                    let k = ring.pivot_key(x);
                    if best.is_none_or(|(_, _, bk)| k < bk) {
                        best = Some((i, j, k));
                    }
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        m.swap(t, pi);
        if pj != t {
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            qinv.swap(t, pj);
        }
        loop {
            for i in t + 1..nrows {
                if ring.is_zero(&m[i][t]) {
                    continue;
                }
                let (_, s, tt, u, v) = ring.gcdext(&m[t][t], &m[i][t]);
                let (rt, ri) = (m[t].clone(), m[i].clone());
                m[t] = (0..ncols).map(|j| ring.add(&ring.mul(&s, &rt[j]), &ring.mul(&tt, &ri[j]))).collect();
                m[i] = (0..ncols).map(|j| ring.add(&ring.mul(&u, &rt[j]), &ring.mul(&v, &ri[j]))).collect();
            }
            for j in t + 1..ncols {
                if ring.is_zero(&m[t][j]) {
                    continue;
                }
                let (_, s, tt, u, v) = ring.gcdext(&m[t][t], &m[t][j]);
                for row in m.iter_mut() {
                    let (a, b) = (row[t].clone(), row[j].clone());
                    row[t] = ring.add(&ring.mul(&s, &a), &ring.mul(&tt, &b));
                    row[j] = ring.add(&ring.mul(&u, &a), &ring.mul(&v, &b));
                }
                // column block [[s, u], [t, v]] has inverse det^{-1} [[v, -u], [-t, s]]
                let det = ring.sub(&ring.mul(&s, &v), &ring.mul(&tt, &u));
                let di = ring.unit_inverse(&det);
                let (qa, qb) = (qinv[t].clone(), qinv[j].clone());
                qinv[t] = (0..ncols)
                    .map(|c| ring.mul(&di, &ring.sub(&ring.mul(&v, &qa[c]), &ring.mul(&u, &qb[c]))))
                    .collect();
                qinv[j] = (0..ncols)
                    .map(|c| ring.mul(&di, &ring.sub(&ring.mul(&s, &qb[c]), &ring.mul(&tt, &qa[c]))))
                    .collect();
            }
            let col_clear = (t + 1..nrows).all(|i| ring.is_zero(&m[i][t]));
            if !col_clear {
                continue;
            }
            // a PID may still need the divisibility pass
            let bad = (t + 1..nrows)
                .find(|&i| (t + 1..ncols).any(|j| ring.divide(&m[i][j], &m[t][t]).is_none()));
            match bad {
                Some(i) => {
                    let ri = m[i].clone();
                    for j in 0..ncols {
                        m[t][j] = ring.add(&m[t][j], &ri[j]);
                    }
                }
                None => break,
            }
        }
        let w = ring.unit_normalizer(&m[t][t]);
        if w != ring.one() {
            for row in m.iter_mut() {
                row[t] = ring.mul(&w, &row[t]);
            }
            let wi = ring.unit_inverse(&w);
            qinv[t] = qinv[t].iter().map(|x| ring.mul(&wi, x)).collect();
        }
        diagonal.push(m[t][t].clone());
        t += 1;
    }
    while diagonal.len() < ncols {
        diagonal.push(ring.zero());
    }
    Smith { diagonal, q_inverse: qinv }
}

/// Cyclic decomposition of `U / V` for submodules `V <= U`.
#[derive(Clone, Debug)]
pub struct QuotientStructure<R: PivotRing> {
    /// Orders of the cyclic factors, all greater than one, in divisibility order.
    pub orders: Vec<u128>,
    /// One generator per cyclic factor, in ambient coordinates.
    pub witnesses: Vec<Row<R>>,
}

pub fn quotient_structure<R: PivotRing>(ring: &R, u: &Submodule<R>, v: &Submodule<R>) -> Option<QuotientStructure<R>> {
    let g = u.rows.len();
    let n = u.ncols;
    let rel = Submodule::preimage(ring, &u.rows, v);
    let s = smith(ring, rel.rows.clone(), g);
    let mut pairs: Vec<(u128, Row<R>)> = Vec::new();
    for i in 0..g {
        let d = &s.diagonal[i];
        if ring.is_unit(d) {
            continue;
        }
        let ord = ring.quotient_order(d)?;
        let w = vec_mat(ring, &s.q_inverse[i], &u.rows, n);
        pairs.push((ord, w));
    }
    pairs.sort_by_key(|(o, _)| *o);
    Some(QuotientStructure {
        orders: pairs.iter().map(|(o, _)| *o).collect(),
        witnesses: pairs.into_iter().map(|(_, w)| w).collect(),
    })
}
