//! Rings over which the exact linear algebra runs.
//!
//! Two families implement [`PivotRing`]: the integers (any `num-integer`
//! type, used as an independent oracle route) and the chain rings `Z/p^N`
//! (the main route for finite abelian `p`-group coefficients).

use std::fmt::Debug;

use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// A principal ideal ring with enough structure for Howell/Hermite echelon
/// forms and Smith normal form.
pub trait PivotRing: Clone + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    /// Returns `(g, s, t, u, v)` with `s a + t b = g`, `u a + v b = 0` and
    /// `[[s, t], [u, v]]` invertible.
    fn gcdext(
        &self,
        a: &Self::Elem,
        b: &Self::Elem,
    ) -> (Self::Elem, Self::Elem, Self::Elem, Self::Elem, Self::Elem);

    /// A unit `u` such that `u a` is the canonical associate of `a`.
    fn unit_normalizer(&self, a: &Self::Elem) -> Self::Elem;

    /// Inverse of a unit.
    fn unit_inverse(&self, u: &Self::Elem) -> Self::Elem;

    /// Generator of the annihilator of `a`, or `None` when it is zero.
    fn annihilator(&self, a: &Self::Elem) -> Option<Self::Elem>;

    /// `q` such that `b - q a` is the canonical residue of `b` modulo `(a)`.
    fn reduce_quotient(&self, b: &Self::Elem, a: &Self::Elem) -> Self::Elem;

    /// Exact quotient `q` with `q a = b`, if one exists.
    fn divide(&self, b: &Self::Elem, a: &Self::Elem) -> Option<Self::Elem>;

    /// Pivot preference: smaller keys generate larger ideals.
    fn pivot_key(&self, a: &Self::Elem) -> u128;

    /// `|R / (a)|`, or `None` when infinite.
    fn quotient_order(&self, a: &Self::Elem) -> Option<u128>;

    /// `log_p |R / (a)|` for finite chain rings; `None` for domains.
    fn quotient_log(&self, _a: &Self::Elem) -> Option<u32> {
        None
    }

    /// An element `s` such that `x` lies in `p^e R` exactly when `s x = 0`.
    /// Domains have no such element.
    fn torsion_scaler(&self, p: u64, e: u32) -> Option<Self::Elem>;

    /// Image of a `p`-power integer.
    fn prime_power(&self, p: u64, e: u32) -> Self::Elem {
        let mut x = self.one();
        let pe = self.from_i64(p as i64);
        for _ in 0..e {
            x = self.mul(&x, &pe);
        }
        x
    }

    /// Canonical residue in `[0, m)` of an element as an integer, when it fits.
    fn to_u64(&self, a: &Self::Elem) -> Option<u64>;

    fn is_unit(&self, a: &Self::Elem) -> bool {
        self.pivot_key(a) == self.pivot_key(&self.one())
    }
}

/// The integers, backed by any signed `num-integer` type.
#[derive(Clone, Debug, Default)]
pub struct IntegerRing<T> {
    _marker: std::marker::PhantomData<T>,
}

impl<T> IntegerRing<T> {
    pub fn new() -> Self {
        IntegerRing { _marker: std::marker::PhantomData }
    }
}

impl<T> PivotRing for IntegerRing<T>
where
    T: Clone + Integer + Signed + FromPrimitive + ToPrimitive + Debug + Send + Sync,
{
    type Elem = T;

    fn zero(&self) -> T {
        T::zero()
    }
    fn one(&self) -> T {
        T::one()
    }
    fn from_i64(&self, v: i64) -> T {
        T::from_i64(v).expect("integer type too narrow")
    }
    fn add(&self, a: &T, b: &T) -> T {
        a.clone() + b.clone()
    }
    fn sub(&self, a: &T, b: &T) -> T {
        a.clone() - b.clone()
    }
    fn mul(&self, a: &T, b: &T) -> T {
        a.clone() * b.clone()
    }
    fn neg(&self, a: &T) -> T {
        -a.clone()
    }
    fn is_zero(&self, a: &T) -> bool {
        a.is_zero()
    }

    fn gcdext(&self, a: &T, b: &T) -> (T, T, T, T, T) {
        if b.is_zero() {
            return (a.clone(), T::one(), T::zero(), T::zero(), T::one());
        }
        if a.is_zero() {
            return (b.clone(), T::zero(), T::one(), -T::one(), T::zero());
        }
        let e = a.extended_gcd(b);
        let (g, s, t) = (e.gcd, e.x, e.y);
        let u = -(b.clone() / g.clone());
        let v = a.clone() / g.clone();
        (g, s, t, u, v)
    }

    fn unit_normalizer(&self, a: &T) -> T {
        if a.is_negative() {
            -T::one()
        } else {
            T::one()
        }
    }

    fn unit_inverse(&self, u: &T) -> T {
        u.clone()
    }

    fn annihilator(&self, _a: &T) -> Option<T> {
        None
    }

    fn reduce_quotient(&self, b: &T, a: &T) -> T {
        if a.is_zero() {
            T::zero()
        } else {
            b.div_floor(&a.abs()) * a.signum()
        }
    }

    fn divide(&self, b: &T, a: &T) -> Option<T> {
        if a.is_zero() {
            return if b.is_zero() { Some(T::zero()) } else { None };
        }
        let (q, r) = b.div_rem(a);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    fn pivot_key(&self, a: &T) -> u128 {
        if a.is_zero() {
            u128::MAX
        } else {
            a.abs().to_u128().unwrap_or(u128::MAX - 1)
        }
    }

    fn quotient_order(&self, a: &T) -> Option<u128> {
        if a.is_zero() {
            None
        } else {
            a.abs().to_u128()
        }
    }

    fn torsion_scaler(&self, _p: u64, _e: u32) -> Option<T> {
        None
    }

    fn to_u64(&self, a: &T) -> Option<u64> {
        a.to_u64()
    }
}

/// The chain ring `Z/p^N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimePowerRing {
    p: u64,
    n: u32,
    modulus: u64,
}

impl PrimePowerRing {
    /// `Z/p^n`; the modulus must fit in 63 bits.
    pub fn new(p: u64, n: u32) -> Self {
        assert!(p >= 2, "prime must be at least 2");
        let mut modulus: u64 = 1;
        for _ in 0..n {
            modulus = modulus.checked_mul(p).filter(|m| *m < (1 << 63)).expect("modulus overflow");
        }
        PrimePowerRing { p, n, modulus }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn exponent(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `p`-adic valuation, with `v(0) = N`.
    pub fn valuation(&self, a: u64) -> u32 {
        if a == 0 {
            return self.n;
        }
        let mut a = a;
        let mut v = 0;
        while a.is_multiple_of(self.p) {
            a /= self.p;
            v += 1;
        }
        v
    }

    fn pow_p(&self, e: u32) -> u64 {
        if e >= self.n {
            return 0;
        }
        self.p.pow(e)
    }

    #[inline]
    fn mulmod(&self, a: u64, b: u64) -> u64 {
        if self.modulus <= (1 << 32) {
            (a * b) % self.modulus
        } else {
            ((a as u128 * b as u128) % self.modulus as u128) as u64
        }
    }

    fn inv_unit(&self, u: u64) -> u64 {
        let (mut r0, mut r1) = (self.modulus as i128, u as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1, "not a unit");
        t0.rem_euclid(self.modulus as i128) as u64
    }

    /// Splits `a = p^v u` with `u` a unit.
    fn split(&self, a: u64) -> (u32, u64) {
        if a == 0 {
            return (self.n, 1);
        }
        let v = self.valuation(a);
        let mut u = a / self.p.pow(v);
        if u == 0 {
            u = 1;
        }
        (v, u % self.modulus)
    }
}

impl PivotRing for PrimePowerRing {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.modulus
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.modulus as i64) as u64
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.mulmod(*a, *b)
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.modulus - a
        }
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn gcdext(&self, a: &u64, b: &u64) -> (u64, u64, u64, u64, u64) {
        let (one, zero) = (self.one(), 0);
        if self.valuation(*a) <= self.valuation(*b) {
            if *a == 0 {
                return (0, one, zero, zero, one);
            }
            let q = self.divide(b, a).expect("chain ring division");
            (*a, one, zero, self.neg(&q), one)
        } else {
            let q = self.divide(a, b).expect("chain ring division");
            (*b, zero, one, one, self.neg(&q))
        }
    }

    fn unit_normalizer(&self, a: &u64) -> u64 {
        let (_, u) = self.split(*a);
        self.inv_unit(u)
    }

    fn unit_inverse(&self, u: &u64) -> u64 {
        self.inv_unit(*u)
    }

    fn annihilator(&self, a: &u64) -> Option<u64> {
        let v = self.valuation(*a);
        if v == 0 {
            None
        } else {
            Some(self.pow_p(self.n - v))
        }
    }

    fn reduce_quotient(&self, b: &u64, a: &u64) -> u64 {
        let v = self.valuation(*a);
        if v >= self.n {
            return 0;
        }
        let pv = self.p.pow(v);
        let r = b % pv;
        self.divide(&self.sub(b, &r), a).expect("residue divisible")
    }

    fn divide(&self, b: &u64, a: &u64) -> Option<u64> {
        let (va, ua) = self.split(*a);
        let (vb, ub) = self.split(*b);
        if *b == 0 {
            return Some(0);
        }
        if vb < va {
            return None;
        }
        let q = self.mulmod(self.pow_p(vb - va), self.mulmod(ub, self.inv_unit(ua)));
        Some(q)
    }

    fn pivot_key(&self, a: &u64) -> u128 {
        self.valuation(*a) as u128
    }

    fn quotient_order(&self, a: &u64) -> Option<u128> {
        Some((self.p as u128).pow(self.valuation(*a)))
    }

    fn quotient_log(&self, a: &u64) -> Option<u32> {
        Some(self.valuation(*a))
    }

    fn torsion_scaler(&self, p: u64, e: u32) -> Option<u64> {
        debug_assert_eq!(p, self.p);
        if e >= self.n {
            Some(1 % self.modulus)
        } else {
            Some(self.pow_p(self.n - e))
        }
    }

    fn to_u64(&self, a: &u64) -> Option<u64> {
        Some(*a)
    }
}

/// Largest exponent `e` with `p^e | n`, for `n > 0`.
pub fn p_valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n > 0 && n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn chain_ring_gcdext_is_unimodular() {
        let r = PrimePowerRing::new(2, 4);
        for a in 0..16u64 {
            for b in 0..16u64 {
                let (g, s, t, u, v) = r.gcdext(&a, &b);
                assert_eq!(r.add(&r.mul(&s, &a), &r.mul(&t, &b)), g);
                assert_eq!(r.add(&r.mul(&u, &a), &r.mul(&v, &b)), 0);
                let det = r.sub(&r.mul(&s, &v), &r.mul(&t, &u));
                assert_eq!(r.valuation(det), 0, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn chain_ring_annihilator_and_scaler() {
        let r = PrimePowerRing::new(3, 3);
        assert_eq!(r.annihilator(&9), Some(3));
        assert_eq!(r.annihilator(&5), None);
        assert_eq!(r.annihilator(&0), Some(1));
        let s = r.torsion_scaler(3, 1).unwrap();
        for x in 0..27u64 {
            assert_eq!(r.mul(&s, &x) == 0, x % 3 == 0);
        }
    }

    #[test]
    fn chain_ring_reduce_quotient() {
        let r = PrimePowerRing::new(2, 3);
        for b in 0..8u64 {
            let q = r.reduce_quotient(&b, &4);
            let rem = r.sub(&b, &r.mul(&q, &4));
            assert!(rem < 4);
            assert_eq!(rem, b % 4);
        }
    }

    #[test]
    fn integer_gcdext() {
        let z = IntegerRing::<BigInt>::new();
        let (a, b) = (BigInt::from(12), BigInt::from(-18));
        let (g, s, t, u, v) = z.gcdext(&a, &b);
        assert_eq!(&s * &a + &t * &b, g);
        assert_eq!(&u * &a + &v * &b, BigInt::from(0));
        assert_eq!((&s * &v - &t * &u).abs(), BigInt::from(1));
        let zi = IntegerRing::<i64>::new();
        assert_eq!(zi.reduce_quotient(&-7, &3), -3);
        assert_eq!(zi.quotient_order(&-6), Some(6));
    }
}
