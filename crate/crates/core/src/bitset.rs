//! Subsets as 256-bit masks and colorings as color arrays.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;

const WORDS: usize = crate::MAX_DEGREE / 64;

/// Subset of `{0, .., degree-1}`.
///
/// Ordered like the corresponding 2-colorings: the first point where two
/// subsets differ belongs to the larger one.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SubsetRepr", into = "SubsetRepr")]
pub struct Subset {
    degree: u16,
    words: [u64; WORDS],
}

#[derive(Serialize, Deserialize)]
struct SubsetRepr {
    degree: usize,
    points: Vec<usize>,
}

impl TryFrom<SubsetRepr> for Subset {
    type Error = Error;
    fn try_from(r: SubsetRepr) -> Result<Self> {
        Subset::from_points(r.degree, &r.points)
    }
}

impl From<Subset> for SubsetRepr {
    fn from(s: Subset) -> Self {
        SubsetRepr {
            degree: s.degree(),
            points: s.points(),
        }
    }
}

impl Subset {
    pub fn empty(degree: usize) -> Self {
        assert!(degree <= crate::MAX_DEGREE);
        Subset {
            degree: degree as u16,
            words: [0; WORDS],
        }
    }

    pub fn full(degree: usize) -> Self {
        let mut s = Subset::empty(degree);
        for x in 0..degree {
            s.insert(x);
        }
        s
    }

    pub fn from_points(degree: usize, points: &[usize]) -> Result<Self> {
        if degree > crate::MAX_DEGREE {
            return Err(Error::DegreeCap(degree));
        }
        let mut s = Subset::empty(degree);
        for &p in points {
            if p >= degree {
                return Err(Error::PointOutOfRange { point: p, degree });
            }
            s.insert(p);
        }
        Ok(s)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.words[x >> 6] >> (x & 63) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, x: usize) {
        debug_assert!(x < self.degree());
        self.words[x >> 6] |= 1 << (x & 63);
    }

    pub fn remove(&mut self, x: usize) {
        self.words[x >> 6] &= !(1 << (x & 63));
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn points(&self) -> Vec<usize> {
        (0..self.degree()).filter(|&x| self.contains(x)).collect()
    }

    pub fn complement(&self) -> Subset {
        let mut c = Subset::empty(self.degree());
        for x in 0..self.degree() {
            if !self.contains(x) {
                c.insert(x);
            }
        }
        c
    }

    /// `g(S)`.
    pub fn image(&self, g: &Permutation) -> Subset {
        let mut out = Subset::empty(self.degree());
        for (w, &word) in self.words.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let x = w * 64 + bits.trailing_zeros() as usize;
                out.insert(g.apply(x));
                bits &= bits - 1;
            }
        }
        out
    }

    /// The 2-coloring with color 1 on the subset.
    pub fn to_coloring(&self) -> Coloring {
        Coloring {
            colors: (0..self.degree()).map(|x| self.contains(x) as u8).collect(),
            k: 2,
        }
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree.cmp(&other.degree).then_with(|| {
            for (a, b) in self.words.iter().zip(&other.words) {
                let diff = a ^ b;
                if diff != 0 {
                    let low = diff & diff.wrapping_neg();
                    return if a & low != 0 {
                        std::cmp::Ordering::Greater
                    } else {
                        std::cmp::Ordering::Less
                    };
                }
            }
            std::cmp::Ordering::Equal
        })
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.points())
    }
}

/// Largest supported number of colors.
pub const MAX_COLORS: usize = 8;

/// A function `{0..n-1} -> {0..k-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct Coloring {
    colors: Vec<u8>,
    k: u8,
}

impl TryFrom<Vec<u8>> for Coloring {
    type Error = Error;
    fn try_from(colors: Vec<u8>) -> Result<Self> {
        let k = colors.iter().copied().max().map_or(1, |m| m as usize + 1);
        Coloring::new(colors, k)
    }
}

impl From<Coloring> for Vec<u8> {
    fn from(c: Coloring) -> Self {
        c.colors
    }
}

impl Coloring {
    pub fn new(colors: Vec<u8>, k: usize) -> Result<Self> {
        if k == 0 || k > MAX_COLORS {
            return Err(Error::InvalidColoring(format!("{k} colors (allowed 1..={MAX_COLORS})")));
        }
        if colors.len() > crate::MAX_DEGREE {
            return Err(Error::DegreeCap(colors.len()));
        }
        if let Some(&bad) = colors.iter().find(|&&c| c as usize >= k) {
            return Err(Error::InvalidColoring(format!("color {bad} with only {k} colors")));
        }
        Ok(Coloring { colors, k: k as u8 })
    }

    pub fn constant(degree: usize, k: usize) -> Result<Self> {
        Coloring::new(vec![0; degree], k)
    }

    pub fn degree(&self) -> usize {
        self.colors.len()
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    pub fn get(&self, x: usize) -> usize {
        self.colors[x] as usize
    }

    /// `c^g` with `c^g[g(x)] = c[x]`.
    pub fn image(&self, g: &Permutation) -> Coloring {
        let mut out = vec![0; self.degree()];
        for (x, &c) in self.colors.iter().enumerate() {
            out[g.apply(x)] = c;
        }
        Coloring { colors: out, k: self.k }
    }

    pub fn is_fixed_by(&self, g: &Permutation) -> bool {
        (0..self.degree()).all(|x| self.colors[g.apply(x)] == self.colors[x])
    }

    /// Points of color `j`.
    pub fn class(&self, j: usize) -> Subset {
        let mut s = Subset::empty(self.degree());
        for (x, &c) in self.colors.iter().enumerate() {
            if c as usize == j {
                s.insert(x);
            }
        }
        s
    }

    /// Number of colors actually used.
    pub fn used_colors(&self) -> usize {
        let mut seen = [false; MAX_COLORS];
        for &c in &self.colors {
            seen[c as usize] = true;
        }
        seen.iter().filter(|&&b| b).count()
    }

    /// Base-`k` index with position 0 most significant, so that numeric
    /// order agrees with lexicographic order.
    pub fn index(&self) -> u64 {
        self.colors.iter().fold(0u64, |acc, &c| acc * self.k as u64 + c as u64)
    }

    pub fn from_index(index: u64, degree: usize, k: usize) -> Result<Self> {
        let mut colors = vec![0u8; degree];
        let mut rest = index;
        for slot in colors.iter_mut().rev() {
            *slot = (rest % k as u64) as u8;
            rest /= k as u64;
        }
        if rest != 0 {
            return Err(Error::InvalidColoring(format!("index {index} out of range")));
        }
        Coloring::new(colors, k)
    }

    /// Same colors with a larger palette.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        Coloring::new(self.colors.clone(), k)
    }
}

impl fmt::Debug for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}/{}", self.colors, self.k)
    }
}
