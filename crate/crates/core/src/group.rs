//! Permutation groups given by generators, with a lazily built
//! stabilizer chain.

use std::collections::VecDeque;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::chain::StabChain;
use crate::error::{Error, Result};
use crate::perm::Permutation;

#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: OnceLock<StabChain>,
}

/// Derived length of a group, or a marker for groups whose derived series
/// stalls above the trivial group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DerivedLength {
    Solvable(u32),
    NotSolvable,
}

impl DerivedLength {
    pub fn value(self) -> Option<u32> {
        match self {
            DerivedLength::Solvable(d) => Some(d),
            DerivedLength::NotSolvable => None,
        }
    }

    pub fn at_most(self, bound: u32) -> bool {
        matches!(self, DerivedLength::Solvable(d) if d <= bound)
    }
}

impl fmt::Display for DerivedLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivedLength::Solvable(d) => write!(f, "{d}"),
            DerivedLength::NotSolvable => write!(f, "NOT_SOLVABLE"),
        }
    }
}

impl Serialize for DerivedLength {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DerivedLength::Solvable(d) => s.serialize_u32(*d),
            DerivedLength::NotSolvable => s.serialize_str("NOT_SOLVABLE"),
        }
    }
}

impl<'de> Deserialize<'de> for DerivedLength {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(DerivedLength::Solvable(n)),
            Raw::Str(s) if s == "NOT_SOLVABLE" => Ok(DerivedLength::NotSolvable),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad derived length {s}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedSeriesReport {
    /// Orders of `G = G^(0) >= G^(1) >= ...`, ending at 1 or at the first repeat.
    pub orders: Vec<BigUint>,
    pub derived_length: DerivedLength,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        if degree > crate::MAX_DEGREE {
            return Err(Error::DegreeCap(degree));
        }
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch(degree, g.degree()));
            }
        }
        let generators = generators.into_iter().filter(|g| !g.is_identity()).collect();
        Ok(PermGroup {
            degree,
            generators,
            chain: OnceLock::new(),
        })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            generators: Vec::new(),
            chain: OnceLock::new(),
        }
    }

    pub(crate) fn with_chain(degree: usize, generators: Vec<Permutation>, chain: StabChain) -> Self {
        let cell = OnceLock::new();
        let _ = cell.set(chain);
        PermGroup {
            degree,
            generators,
            chain: cell,
        }
    }

    /// Group generated by `elements`, keeping only those that enlarge it.
    pub fn generated_by<I>(degree: usize, elements: I) -> Self
    where
        I: IntoIterator<Item = Permutation>,
    {
        let mut chain = StabChain::new(degree);
        let mut gens = Vec::new();
        for g in elements {
            if chain.add_generator(&g) {
                gens.push(g);
            }
        }
        PermGroup::with_chain(degree, gens, chain)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn chain(&self) -> &StabChain {
        self.chain
            .get_or_init(|| StabChain::from_generators(self.degree, &self.generators))
    }

    /// Forces the stabilizer chain and returns `self` for chaining.
    pub fn build_chain(self) -> Self {
        self.chain();
        self
    }

    pub fn order(&self) -> BigUint {
        self.chain().order()
    }

    /// Order as a machine integer, when it fits.
    pub fn order_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn contains(&self, p: &Permutation) -> Result<bool> {
        if p.degree() != self.degree {
            return Err(Error::DegreeMismatch(self.degree, p.degree()));
        }
        Ok(self.chain().contains(p))
    }

    pub(crate) fn has(&self, p: &Permutation) -> bool {
        self.chain().contains(p)
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.generators.iter().all(|g| other.has(g))
    }

    /// Equality as sets of permutations.
    pub fn same_group(&self, other: &PermGroup) -> bool {
        self.is_subgroup_of(other) && self.order() == other.order()
    }

    /// Sorted orbit of `point`.
    pub fn orbit(&self, point: usize) -> Result<Vec<usize>> {
        if point >= self.degree {
            return Err(Error::PointOutOfRange {
                point,
                degree: self.degree,
            });
        }
        let mut seen = vec![false; self.degree];
        seen[point] = true;
        let mut queue = vec![point];
        let mut i = 0;
        while i < queue.len() {
            let x = queue[i];
            for g in &self.generators {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    queue.push(y);
                }
            }
            i += 1;
        }
        queue.sort_unstable();
        Ok(queue)
    }

    /// Orbits on `{0..n-1}`, each sorted, ordered by smallest element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut assigned = vec![false; self.degree];
        let mut out = Vec::new();
        for x in 0..self.degree {
            if !assigned[x] {
                let orb = self.orbit(x).expect("in range");
                for &y in &orb {
                    assigned[y] = true;
                }
                out.push(orb);
            }
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.degree <= 1 || self.orbit(0).map(|o| o.len() == self.degree).unwrap_or(false)
    }

    /// Longest orbit on points; 1 for the trivial group, 0 on an empty domain.
    pub fn max_orbit_length(&self) -> usize {
        self.orbits().iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn pointwise_stabilizer(&self, points: &[usize]) -> Result<PermGroup> {
        for &p in points {
            if p >= self.degree {
                return Err(Error::PointOutOfRange {
                    point: p,
                    degree: self.degree,
                });
            }
        }
        let mut prefix: Vec<usize> = Vec::with_capacity(points.len());
        for &p in points {
            if !prefix.contains(&p) {
                prefix.push(p);
            }
        }
        let mut chain = StabChain::with_base_prefix(self.degree, &prefix);
        for g in &self.generators {
            chain.add_generator(g);
        }
        let gens = chain.stabilizer_generators(prefix.len());
        Ok(PermGroup::generated_by(self.degree, gens))
    }

    /// Chain of this group whose base starts with `prefix`.
    pub fn chain_with_base_prefix(&self, prefix: &[usize]) -> StabChain {
        let mut chain = StabChain::with_base_prefix(self.degree, prefix);
        for g in &self.generators {
            chain.add_generator(g);
        }
        chain
    }

    /// Smallest normal subgroup containing `seeds`.
    pub fn normal_closure(&self, seeds: &[Permutation]) -> Result<PermGroup> {
        for s in seeds {
            if !self.contains(s)? {
                return Err(Error::NotAMember);
            }
        }
        Ok(self.normal_closure_unchecked(seeds.iter().cloned()))
    }

    fn normal_closure_unchecked(&self, seeds: impl IntoIterator<Item = Permutation>) -> PermGroup {
        let mut chain = StabChain::new(self.degree);
        let mut gens = Vec::new();
        let mut queue = VecDeque::new();
        for s in seeds {
            if chain.add_generator(&s) {
                gens.push(s.clone());
                queue.push_back(s);
            }
        }
        let inverses: Vec<Permutation> = self.generators.iter().map(Permutation::inverse).collect();
        while let Some(x) = queue.pop_front() {
            for (g, ginv) in self.generators.iter().zip(&inverses) {
                let c = ginv.mul(&x).mul(g);
                if chain.add_generator(&c) {
                    gens.push(c.clone());
                    queue.push_back(c);
                }
            }
        }
        PermGroup::with_chain(self.degree, gens, chain)
    }

    pub fn derived_subgroup(&self) -> PermGroup {
        let gens = &self.generators;
        let mut seeds = Vec::new();
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i + 1..] {
                let c = a.commutator(b);
                if !c.is_identity() {
                    seeds.push(c);
                }
            }
        }
        self.normal_closure_unchecked(seeds)
    }

    pub fn derived_series(&self) -> DerivedSeriesReport {
        let mut orders = vec![self.order()];
        let mut current = self.clone();
        loop {
            let last = orders.last().unwrap().clone();
            if last.is_one() {
                return DerivedSeriesReport {
                    derived_length: DerivedLength::Solvable(orders.len() as u32 - 1),
                    orders,
                };
            }
            let next = current.derived_subgroup();
            let order = next.order();
            if order == last {
                return DerivedSeriesReport {
                    orders,
                    derived_length: DerivedLength::NotSolvable,
                };
            }
            orders.push(order);
            current = next;
        }
    }

    pub fn derived_length(&self) -> DerivedLength {
        self.derived_series().derived_length
    }

    pub fn is_solvable(&self) -> bool {
        self.derived_length() != DerivedLength::NotSolvable
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.generators;
        g.iter()
            .enumerate()
            .all(|(i, a)| g[i + 1..].iter().all(|b| a.mul(b) == b.mul(a)))
    }

    pub fn is_elementary_abelian_2(&self) -> bool {
        self.is_abelian() && self.generators.iter().all(|a| a.mul(a).is_identity())
    }

    pub fn elements(&self) -> impl Iterator<Item = Permutation> + '_ {
        self.chain().elements()
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        self.chain().random_element(rng)
    }

    /// Action on the points of `support` (sorted), relabelled `0..support.len()`.
    /// The support must be a union of orbits.
    pub fn restrict_to(&self, support: &[usize]) -> Result<PermGroup> {
        let mut local = vec![usize::MAX; self.degree];
        for (i, &x) in support.iter().enumerate() {
            local[x] = i;
        }
        let mut gens = Vec::new();
        for g in &self.generators {
            let mut images = Vec::with_capacity(support.len());
            for &x in support {
                let y = local[g.apply(x)];
                if y == usize::MAX {
                    return Err(Error::InvalidBlocks("support is not invariant".into()));
                }
                images.push(y);
            }
            gens.push(Permutation::from_images(&images)?);
        }
        PermGroup::new(support.len(), gens)
    }

    pub fn is_normal_in(&self, over: &PermGroup) -> bool {
        self.is_subgroup_of(over)
            && self
                .generators
                .iter()
                .all(|n| over.generators().iter().all(|g| self.has(&n.conjugate_by(g))))
    }

    /// Order divided by `other`'s order; both must be known exactly.
    pub fn index_of(&self, sub: &PermGroup) -> BigUint {
        self.order() / sub.order()
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PermGroup(degree {}, gens [", self.degree)?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "])")
    }
}

/// JSON form of a group: `{"degree": n, "generators": [[images...], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupFile {
    pub degree: usize,
    pub generators: Vec<Vec<usize>>,
}

impl TryFrom<GroupFile> for PermGroup {
    type Error = Error;

    fn try_from(file: GroupFile) -> Result<Self> {
        if file.degree > crate::MAX_DEGREE {
            return Err(Error::DegreeCap(file.degree));
        }
        let gens = file
            .generators
            .iter()
            .map(|g| {
                if g.len() != file.degree {
                    Err(Error::DegreeMismatch(file.degree, g.len()))
                } else {
                    Permutation::from_images(g)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        PermGroup::new(file.degree, gens)
    }
}

impl From<&PermGroup> for GroupFile {
    fn from(g: &PermGroup) -> Self {
        GroupFile {
            degree: g.degree,
            generators: g.generators.iter().map(Permutation::images).collect(),
        }
    }
}
