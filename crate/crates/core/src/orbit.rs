//! Orbit enumeration with a Schreier tree, for any right action of a
//! permutation group.

use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::One;

use crate::chain::StabChain;
use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Permutation;

const ROOT: u32 = u32::MAX;

/// Orbit of a seed, in breadth-first order, with a Schreier tree.
pub struct Orbit<T> {
    points: Vec<T>,
    // (parent position, generator index)
    parent: Vec<(u32, u32)>,
    index: HashMap<T, u32>,
}

impl<T: Clone + Eq + Hash> Orbit<T> {
    /// Explores the orbit of `seed`; fails once it grows past `cap`.
    pub fn explore<F>(g: &PermGroup, seed: T, act: F, cap: usize) -> Result<Self>
    where
        F: Fn(&T, &Permutation) -> T,
    {
        let mut orbit = Orbit {
            points: vec![seed.clone()],
            parent: vec![(ROOT, ROOT)],
            index: HashMap::from([(seed, 0)]),
        };
        let mut i = 0;
        while i < orbit.points.len() {
            for (s, gen) in g.generators().iter().enumerate() {
                let y = act(&orbit.points[i], gen);
                if !orbit.index.contains_key(&y) {
                    if orbit.points.len() >= cap {
                        return Err(Error::OrbitCapExceeded(cap));
                    }
                    orbit.index.insert(y.clone(), orbit.points.len() as u32);
                    orbit.points.push(y);
                    orbit.parent.push((i as u32, s as u32));
                }
            }
            i += 1;
        }
        Ok(orbit)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn into_points(self) -> Vec<T> {
        self.points
    }

    pub fn position(&self, t: &T) -> Option<usize> {
        self.index.get(t).map(|&i| i as usize)
    }

    /// A group element taking the seed to the `i`-th orbit point.
    pub fn transversal(&self, g: &PermGroup, i: usize) -> Permutation {
        let mut word = Vec::new();
        let mut j = i;
        while self.parent[j].0 != ROOT {
            word.push(self.parent[j].1 as usize);
            j = self.parent[j].0 as usize;
        }
        let mut t = Permutation::identity(g.degree());
        for &s in word.iter().rev() {
            t = t.mul(&g.generators()[s]);
        }
        t
    }

    /// Stabilizer of the seed, from Schreier generators, stopping as soon
    /// as its order reaches `|G| / |orbit|`.
    pub fn stabilizer<F>(&self, g: &PermGroup, act: F) -> PermGroup
    where
        F: Fn(&T, &Permutation) -> T,
    {
        let target = g.order() / BigUint::from(self.len());
        let degree = g.degree();
        if target.is_one() {
            return PermGroup::trivial(degree);
        }
        let mut chain = StabChain::new(degree);
        let mut gens = Vec::new();
        'outer: for i in 0..self.len() {
            let ti = self.transversal(g, i);
            for gen in g.generators() {
                let j = self.index[&act(&self.points[i], gen)] as usize;
                let sch = ti.mul(gen).mul_inv(&self.transversal(g, j));
                if chain.add_generator(&sch) {
                    gens.push(sch);
                    if chain.order() == target {
                        break 'outer;
                    }
                }
            }
        }
        debug_assert_eq!(chain.order(), target);
        PermGroup::with_chain(degree, gens, chain)
    }
}

impl<T: Clone + Eq + Hash + Ord> Orbit<T> {
    /// Position of the smallest orbit point.
    pub fn min_position(&self) -> usize {
        (0..self.len())
            .min_by(|&a, &b| self.points[a].cmp(&self.points[b]))
            .expect("orbit is never empty")
    }
}
