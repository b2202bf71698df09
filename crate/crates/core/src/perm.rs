use std::fmt;

use crate::error::{Error, Result};

/// A permutation of `{0, .., n-1}`, displayed 1-based in cycle notation.
///
/// Products follow the right-action convention: `x^(gh) = (x^g)^h`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Box<[u32]>,
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm { images: (0..n as u32).collect() }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection")));
            }
            seen[x] = true;
        }
        Ok(Perm { images: images.into_boxed_slice() })
    }

    /// Parses cycle notation such as `(1 2 3)(4 5)`; points are 1-based.
    pub fn parse(degree: usize, text: &str) -> Result<Perm> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut seen = vec![false; degree];
        let mut rest = text.trim();
        while !rest.is_empty() {
            if !rest.starts_with('(') {
                return Err(Error::InvalidPermutation(format!("expected '(' in {text:?}")));
            }
            let close = rest
                .find(')')
                .ok_or_else(|| Error::InvalidPermutation(format!("unclosed cycle in {text:?}")))?;
            let body = &rest[1..close];
            let mut pts = Vec::new();
            for tok in body.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
                let v: usize = tok
                    .parse()
                    .map_err(|_| Error::InvalidPermutation(format!("bad point {tok:?}")))?;
                if v == 0 || v > degree {
                    return Err(Error::InvalidPermutation(format!("point {v} outside 1..{degree}")));
                }
                if seen[v - 1] {
                    return Err(Error::InvalidPermutation(format!("point {v} repeated in {text:?}")));
                }
                seen[v - 1] = true;
                pts.push(v as u32 - 1);
            }
            for i in 0..pts.len() {
                images[pts[i] as usize] = pts[(i + 1) % pts.len()];
            }
            rest = rest[close + 1..].trim_start();
        }
        Ok(Perm { images: images.into_boxed_slice() })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self * other`: first `self`, then `other`.
    pub fn mul(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm { images: self.images.iter().map(|&x| other.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm { images: inv.into_boxed_slice() }
    }

    /// `g^-1 self g`.
    pub fn conj(&self, g: &Perm) -> Perm {
        let mut out = vec![0u32; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            out[g.images[i] as usize] = g.images[x as usize];
        }
        Perm { images: out.into_boxed_slice() }
    }

    pub fn pow(&self, mut e: u64) -> Perm {
        let mut base = self.clone();
        let mut acc = Perm::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x] = true;
                cyc.push(x);
                x = self.apply(x);
            }
            out.push(cyc);
        }
        out
    }

    pub fn order(&self) -> u64 {
        self.cycles().iter().fold(1u64, |acc, c| num_integer::lcm(acc, c.len() as u64))
    }

    pub fn is_even(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }

    /// Same permutation on a larger point set.
    pub fn extend(&self, degree: usize) -> Perm {
        let mut im: Vec<u32> = self.images.to_vec();
        im.extend(self.degree() as u32..degree as u32);
        Perm { images: im.into_boxed_slice() }
    }

    /// Same permutation with all points shifted by `offset` inside a larger set.
    pub fn shifted(&self, offset: usize, degree: usize) -> Perm {
        let mut im: Vec<u32> = (0..degree as u32).collect();
        for (i, &x) in self.images.iter().enumerate() {
            im[i + offset] = x + offset as u32;
        }
        Perm { images: im.into_boxed_slice() }
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (i, x) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", x + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        let p = Perm::parse(6, "( 1 2 3 )(4 5)").unwrap();
        assert_eq!(p.to_string(), "(1 2 3)(4 5)");
        assert_eq!(Perm::parse(3, "()").unwrap(), Perm::identity(3));
        assert!(Perm::parse(3, "(1 4)").is_err());
        assert!(Perm::parse(3, "(1 2 1)").is_err());
    }

    #[test]
    fn right_action_convention() {
        let g = Perm::parse(3, "(1 2)").unwrap();
        let h = Perm::parse(3, "(2 3)").unwrap();
        // 1 -> 2 under g, then 2 -> 3 under h
        assert_eq!(g.mul(&h).apply(0), 2);
        assert_eq!(g.mul(&h).to_string(), "(1 3 2)");
        let x = Perm::parse(3, "(1 2 3)").unwrap();
        assert_eq!(x.conj(&g), g.inverse().mul(&x).mul(&g));
    }

    #[test]
    fn order_and_parity() {
        let p = Perm::parse(7, "(1 2 3)(4 5)").unwrap();
        assert_eq!(p.order(), 6);
        assert!(!p.is_even());
        assert_eq!(p.pow(6), Perm::identity(7));
        assert!(Perm::from_images(vec![0, 0, 1]).is_err());
    }
}
