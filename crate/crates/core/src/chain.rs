//! Base and strong generating set, built with the deterministic
//! Schreier–Sims algorithm.
//!
//! Level `l` holds base point `b_l`, the strong generators fixing
//! `b_0, .., b_{l-1}`, and explicit transversal elements `u_x` with
//! `b_l^{u_x} = x` for every `x` in the basic orbit.

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;

use crate::perm::Permutation;

#[derive(Clone, Debug)]
struct Level {
    base: usize,
    gens: Vec<Permutation>,
    orbit: Vec<usize>,
    transversal: Vec<Option<Permutation>>,
    // number of generators already checked against each orbit point
    done: Vec<usize>,
}

impl Level {
    fn new(degree: usize, base: usize) -> Self {
        let mut transversal = vec![None; degree];
        transversal[base] = Some(Permutation::identity(degree));
        Level {
            base,
            gens: Vec::new(),
            orbit: vec![base],
            transversal,
            done: vec![0],
        }
    }

    fn add_gen(&mut self, g: Permutation) {
        self.gens.push(g);
        let mut i = 0;
        while i < self.orbit.len() {
            let x = self.orbit[i];
            for s in &self.gens {
                let y = s.apply(x);
                if self.transversal[y].is_none() {
                    let u = self.transversal[x].as_ref().unwrap().mul(s);
                    self.transversal[y] = Some(u);
                    self.orbit.push(y);
                    self.done.push(0);
                }
            }
            i += 1;
        }
    }
}

#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    pub fn new(degree: usize) -> Self {
        StabChain {
            degree,
            levels: Vec::new(),
        }
    }

    /// Starts with the given base prefix; later base points are chosen as the
    /// smallest point moved by the element that needs them.
    pub fn with_base_prefix(degree: usize, prefix: &[usize]) -> Self {
        StabChain {
            degree,
            levels: prefix.iter().map(|&b| Level::new(degree, b)).collect(),
        }
    }

    pub fn from_generators(degree: usize, gens: &[Permutation]) -> Self {
        let mut chain = StabChain::new(degree);
        for g in gens {
            chain.add_generator(g);
        }
        chain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// Strong generators of the whole group.
    pub fn strong_generators(&self) -> Vec<Permutation> {
        self.levels.first().map(|l| l.gens.clone()).unwrap_or_default()
    }

    /// Strong generators of the pointwise stabilizer of the first `depth` base points.
    pub fn stabilizer_generators(&self, depth: usize) -> Vec<Permutation> {
        self.levels.get(depth).map(|l| l.gens.clone()).unwrap_or_default()
    }

    /// Strips `g` from level `from` on. Returns the residue and the level at
    /// which stripping stopped (`depth()` if it ran through every level).
    pub fn strip_from(&self, g: &Permutation, from: usize) -> (Permutation, usize) {
        let mut h = g.clone();
        for (l, level) in self.levels.iter().enumerate().skip(from) {
            let x = h.apply(level.base);
            match &level.transversal[x] {
                Some(u) => {
                    if x != level.base {
                        h = h.mul_inv(u);
                    }
                }
                None => return (h, l),
            }
        }
        (h, self.levels.len())
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        let (h, l) = self.strip_from(g, 0);
        l == self.levels.len() && h.is_identity()
    }

    /// Adds `g` to the group; returns whether the group grew.
    pub fn add_generator(&mut self, g: &Permutation) -> bool {
        assert_eq!(g.degree(), self.degree, "generator degree");
        let (h, j) = self.strip_from(g, 0);
        if j == self.levels.len() && h.is_identity() {
            return false;
        }
        self.insert_residue(h, 0, j);
        self.complete(j);
        true
    }

    fn insert_residue(&mut self, h: Permutation, from: usize, to: usize) {
        if to == self.levels.len() {
            let b = h.first_moved().expect("non-identity residue");
            self.levels.push(Level::new(self.degree, b));
        }
        for l in from..=to {
            self.levels[l].add_gen(h.clone());
        }
    }

    // Holt's SCHREIERSIMS: levels deeper than `i` are complete; work upwards.
    fn complete(&mut self, mut i: usize) {
        loop {
            let pending = {
                let level = &self.levels[i];
                let ngens = level.gens.len();
                level.done.iter().position(|&d| d < ngens).map(|p| (p, level.done[p]))
            };
            match pending {
                Some((p, s)) => {
                    let level = &mut self.levels[i];
                    level.done[p] += 1;
                    let x = level.orbit[p];
                    let gen = &level.gens[s];
                    let y = gen.apply(x);
                    let ux = level.transversal[x].as_ref().unwrap();
                    let uy = level.transversal[y].as_ref().unwrap();
                    let schreier = ux.mul(gen).mul_inv(uy);
                    if schreier.is_identity() {
                        continue;
                    }
                    let (h, j) = self.strip_from(&schreier, i + 1);
                    if j < self.levels.len() || !h.is_identity() {
                        self.insert_residue(h, i + 1, j);
                        i = j;
                    }
                }
                None => {
                    if i == 0 {
                        return;
                    }
                    i -= 1;
                }
            }
        }
    }

    /// Element of the group mapping the first `images.len()` base points to
    /// `images`, if one exists.
    pub fn map_base_prefix(&self, images: &[usize]) -> Option<Permutation> {
        assert!(images.len() <= self.levels.len(), "prefix longer than the base");
        // g = u_{k-1} .. u_1 u_0; peel u_0 off first, pulling the remaining
        // targets back through it.
        let mut targets: Vec<usize> = images.to_vec();
        let mut factors = Vec::with_capacity(images.len());
        for (l, level) in self.levels.iter().enumerate().take(images.len()) {
            let u = level.transversal[targets[l]].as_ref()?;
            let uinv = u.inverse();
            for t in targets.iter_mut().skip(l + 1) {
                *t = uinv.apply(*t);
            }
            factors.push(u);
        }
        let mut g = Permutation::identity(self.degree);
        for u in factors.iter().rev() {
            g = g.mul(u);
        }
        Some(g)
    }

    /// All elements, in the order of the transversal odometer.
    pub fn elements(&self) -> ChainElements<'_> {
        ChainElements {
            chain: self,
            counters: vec![0; self.levels.len()],
            done: false,
        }
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        let mut g = Permutation::identity(self.degree);
        for level in self.levels.iter().rev() {
            let x = level.orbit[rng.gen_range(0..level.orbit.len())];
            g = g.mul(level.transversal[x].as_ref().unwrap());
        }
        g
    }
}

pub struct ChainElements<'a> {
    chain: &'a StabChain,
    counters: Vec<usize>,
    done: bool,
}

impl Iterator for ChainElements<'_> {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.done {
            return None;
        }
        let levels = &self.chain.levels;
        let mut g = Permutation::identity(self.chain.degree);
        for (l, level) in levels.iter().enumerate().rev() {
            let x = level.orbit[self.counters[l]];
            if x != level.base {
                g = g.mul(level.transversal[x].as_ref().unwrap());
            }
        }
        // advance odometer
        let mut l = 0;
        loop {
            if l == levels.len() {
                self.done = true;
                break;
            }
            self.counters[l] += 1;
            if self.counters[l] < levels[l].orbit.len() {
                break;
            }
            self.counters[l] = 0;
            l += 1;
        }
        Some(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn cyc(n: usize, c: &[usize]) -> Permutation {
        Permutation::from_cycles(n, &[c]).unwrap()
    }

    #[test]
    fn symmetric_group_orders() {
        for n in 1..=7usize {
            let gens = if n < 2 {
                vec![]
            } else {
                vec![cyc(n, &[0, 1]), cyc(n, &(0..n).collect::<Vec<_>>())]
            };
            let chain = StabChain::from_generators(n, &gens);
            let fact: u64 = (1..=n as u64).product();
            assert_eq!(chain.order(), BigUint::from(fact));
        }
    }

    #[test]
    fn base_points_are_smallest_moved() {
        let chain = StabChain::from_generators(4, &[cyc(4, &[1, 2, 3]), cyc(4, &[2, 3])]);
        assert_eq!(chain.base(), vec![1, 2]);
        assert_eq!(chain.order(), BigUint::from(6u32));
    }

    #[test]
    fn element_enumeration_is_exact() {
        let chain = StabChain::from_generators(5, &[cyc(5, &[0, 1, 2, 3, 4]), cyc(5, &[0, 1, 2])]);
        let elements: HashSet<_> = chain.elements().collect();
        assert_eq!(elements.len(), 60);
        assert!(elements.iter().all(|g| chain.contains(g)));
    }

    #[test]
    fn maps_base_prefix() {
        let chain = StabChain::with_base_prefix(5, &[3, 1]);
        let mut chain = chain;
        chain.add_generator(&cyc(5, &[0, 1, 2, 3, 4]));
        chain.add_generator(&cyc(5, &[0, 1]));
        let g = chain.map_base_prefix(&[0, 4]).unwrap();
        assert_eq!(g.apply(3), 0);
        assert_eq!(g.apply(1), 4);
    }
}
