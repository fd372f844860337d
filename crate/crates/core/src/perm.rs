//! Permutations of `{0, .., n-1}`.
//!
//! Products act left to right: `p.compose(&q)` maps `x` to `q(p(x))`.
//! Every other module relies on this orientation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<u16>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u16).collect(),
        }
    }

    /// Builds a permutation from its image list, checking it is a bijection.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        if n > crate::MAX_DEGREE {
            return Err(Error::DegreeCap(n));
        }
        let mut seen = vec![false; n];
        for &x in images {
            if x >= n || seen[x] {
                return Err(Error::NotAPermutation(format!("{images:?}")));
            }
            seen[x] = true;
        }
        Ok(Permutation {
            images: images.iter().map(|&x| x as u16).collect(),
        })
    }

    /// Builds a permutation of the given degree from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x >= degree {
                    return Err(Error::PointOutOfRange { point: x, degree });
                }
                if touched[x] {
                    return Err(Error::NotAPermutation(format!("cycles overlap at {x}")));
                }
                touched[x] = true;
                images[x] = cycle[(i + 1) % cycle.len()];
            }
        }
        Self::from_images(&images)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `x -> q(p(x))`.
    pub fn compose(&self, q: &Permutation) -> Result<Permutation> {
        if self.degree() != q.degree() {
            return Err(Error::DegreeMismatch(self.degree(), q.degree()));
        }
        Ok(self.mul(q))
    }

    /// Unchecked product for callers that already know the degrees agree.
    #[inline]
    pub(crate) fn mul(&self, q: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), q.degree());
        Permutation {
            images: self.images.iter().map(|&x| q.images[x as usize]).collect(),
        }
    }

    /// `self * q^-1` without materializing the inverse.
    pub(crate) fn mul_inv(&self, q: &Permutation) -> Permutation {
        let mut inv = vec![0u16; q.degree()];
        for (i, &x) in q.images.iter().enumerate() {
            inv[x as usize] = i as u16;
        }
        Permutation {
            images: self.images.iter().map(|&x| inv[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u16; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u16;
        }
        Permutation { images: inv }
    }

    /// `g^-1 * self * g`, i.e. the image of `self` under relabelling by `g`.
    pub fn conjugate_by(&self, g: &Permutation) -> Permutation {
        g.inverse().mul(self).mul(g)
    }

    /// `[a, b] = a^-1 b^-1 a b`.
    pub fn commutator(&self, b: &Permutation) -> Permutation {
        self.inverse().mul(&b.inverse()).mul(self).mul(b)
    }

    pub fn pow(&self, mut e: u64) -> Permutation {
        let mut base = self.clone();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Smallest point moved, if any.
    pub fn first_moved(&self) -> Option<usize> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, &x)| *i != x as usize)
            .map(|(i, _)| i)
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    /// Sorted cycle lengths, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable();
        t
    }

    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .fold(1u64, |acc, c| num_integer_lcm(acc, c.len() as u64))
    }

    /// Extends to a larger degree by fixing the new points.
    pub fn extend(&self, degree: usize) -> Permutation {
        let mut images = self.images.clone();
        images.extend(self.degree() as u16..degree as u16);
        Permutation { images }
    }
}

fn num_integer_lcm(a: u64, b: u64) -> u64 {
    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    a / gcd(a, b) * b
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::from_images(&v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(ToString::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}; {}]", self.degree(), self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(images: &[usize]) -> Permutation {
        Permutation::from_images(images).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let q = p(&[2, 0, 1, 3]);
        let id = Permutation::identity(4);
        assert_eq!(id.compose(&q).unwrap(), q);
        assert_eq!(q.compose(&id).unwrap(), q);
    }

    #[test]
    fn transposition_is_involution() {
        let t = Permutation::from_cycles(3, &[&[0, 1]]).unwrap();
        assert!(t.compose(&t).unwrap().is_identity());
    }

    #[test]
    fn composition_is_left_to_right() {
        // (0 1 2) then (0 1): 0->1->0, 1->2->2, 2->0->1
        let c = Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        let t = Permutation::from_cycles(3, &[&[0, 1]]).unwrap();
        let prod = c.compose(&t).unwrap();
        for x in 0..3 {
            assert_eq!(prod.apply(x), t.apply(c.apply(x)));
        }
        assert_eq!(prod.images(), vec![0, 2, 1]);
    }

    #[test]
    fn degree_mismatch_is_an_error() {
        let a = Permutation::identity(3);
        let b = Permutation::identity(4);
        assert_eq!(a.compose(&b), Err(Error::DegreeMismatch(3, 4)));
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_images(&[0, 0, 1]).is_err());
        assert!(Permutation::from_images(&[0, 3, 1]).is_err());
        assert!(Permutation::from_images(&vec![0; 257]).is_err());
    }

    #[test]
    fn display_uses_cycle_notation() {
        let c = Permutation::from_cycles(5, &[&[0, 2], &[1, 3, 4]]).unwrap();
        assert_eq!(c.to_string(), "(0 2)(1 3 4)");
        assert_eq!(c.order(), 6);
        assert_eq!(c.cycle_type(), vec![2, 3]);
    }

    #[test]
    fn json_round_trip() {
        let c = p(&[1, 2, 0]);
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, "[1,2,0]");
        let back: Permutation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<Permutation>("[0,0]").is_err());
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::from_images(&v).unwrap())
    }

    proptest! {
        #[test]
        fn group_axioms(a in arb_perm(7), b in arb_perm(7), c in arb_perm(7)) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert!(a.mul(&a.inverse()).is_identity());
            prop_assert_eq!(a.mul_inv(&b), a.mul(&b.inverse()));
            prop_assert_eq!(a.pow(a.order()), Permutation::identity(7));
            let comm = a.commutator(&b);
            prop_assert_eq!(b.mul(&a).mul(&comm), a.mul(&b));
        }
    }
}
