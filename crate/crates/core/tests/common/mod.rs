//! Brute-force oracles that share no code paths with the library's
//! searches: closures by breadth-first search over generators, orbits by
//! union-find, stabilizers by filtering whole groups.
#![allow(dead_code)]

use std::collections::HashSet;

use setstab::{PermGroup, Permutation};

/// Every element of the group, by closing the generators under products.
pub fn closure(g: &PermGroup) -> Vec<Permutation> {
    let id = Permutation::identity(g.degree());
    let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut queue = vec![id];
    while let Some(x) = queue.pop() {
        for s in g.generators() {
            let y = x.compose(s).unwrap();
            if seen.insert(y.clone()) {
                queue.push(y);
            }
        }
    }
    seen.into_iter().collect()
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n as u32).collect())
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.0[x as usize] != x {
            let up = self.0[self.0[x as usize] as usize];
            self.0[x as usize] = up;
            x = up;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b) as usize] = a.min(b);
        }
    }

    fn classes(&mut self) -> usize {
        (0..self.0.len() as u32).filter(|&x| self.find(x) == x).count()
    }
}

/// `c^g` with `c^g[g(x)] = c[x]`.
pub fn image(colors: &[u8], g: &Permutation) -> Vec<u8> {
    let mut out = vec![0u8; colors.len()];
    for (x, &c) in colors.iter().enumerate() {
        out[g.apply(x)] = c;
    }
    out
}

fn decode(mut index: usize, n: usize, k: usize) -> Vec<u8> {
    let mut c = vec![0u8; n];
    for x in (0..n).rev() {
        c[x] = (index % k) as u8;
        index /= k;
    }
    c
}

fn encode(c: &[u8], k: usize) -> usize {
    c.iter().fold(0, |acc, &x| acc * k + x as usize)
}

/// Number of orbits on `k`-colorings, by joining each coloring with its
/// images under the generators.
pub fn orbit_count(g: &PermGroup, k: usize) -> usize {
    let n = g.degree();
    let size = k.pow(n as u32);
    let mut uf = UnionFind::new(size);
    for i in 0..size {
        let c = decode(i, n, k);
        for s in g.generators() {
            uf.union(i as u32, encode(&image(&c, s), k) as u32);
        }
    }
    uf.classes()
}

/// Orbit lengths of the group generated by `gens` on `n` points.
pub fn point_orbit_lengths(n: usize, gens: &[Permutation]) -> Vec<usize> {
    let mut uf = UnionFind::new(n);
    for g in gens {
        for x in 0..n {
            uf.union(x as u32, g.apply(x) as u32);
        }
    }
    let mut sizes = vec![0usize; n];
    for x in 0..n {
        let r = uf.find(x as u32) as usize;
        sizes[r] += 1;
    }
    sizes.into_iter().filter(|&s| s > 0).collect()
}

pub fn max_orbit(n: usize, gens: &[Permutation]) -> usize {
    point_orbit_lengths(n, gens).into_iter().max().unwrap_or(1)
}

/// Elements of `elements` fixing the coloring.
pub fn stabilizer_elements(elements: &[Permutation], colors: &[u8]) -> Vec<Permutation> {
    elements
        .iter()
        .filter(|g| (0..colors.len()).all(|x| colors[g.apply(x)] == colors[x]))
        .cloned()
        .collect()
}

/// True iff the generators are commuting involutions (or the identity).
pub fn elementary_abelian_2(gens: &[Permutation]) -> bool {
    gens.iter().all(|a| a.compose(a).unwrap().is_identity())
        && gens
            .iter()
            .all(|a| gens.iter().all(|b| a.compose(b).unwrap() == b.compose(a).unwrap()))
}

/// Derived length of a finite group given by its full element list.
pub fn derived_length(elements: &[Permutation]) -> Option<u32> {
    let mut current: HashSet<Permutation> = elements.iter().cloned().collect();
    let mut steps = 0;
    loop {
        if current.len() == 1 {
            return Some(steps);
        }
        let list: Vec<&Permutation> = current.iter().collect();
        let mut next: HashSet<Permutation> = HashSet::new();
        for a in &list {
            for b in &list {
                let c = a
                    .inverse()
                    .compose(&b.inverse())
                    .unwrap()
                    .compose(a)
                    .unwrap()
                    .compose(b)
                    .unwrap();
                next.insert(c);
            }
        }
        // close the commutators under products
        let gens: Vec<Permutation> = next.iter().cloned().collect();
        let mut queue: Vec<Permutation> = gens.clone();
        while let Some(x) = queue.pop() {
            for s in &gens {
                let y = x.compose(s).unwrap();
                if next.insert(y.clone()) {
                    queue.push(y);
                }
            }
        }
        if next.len() == current.len() {
            return None;
        }
        current = next;
        steps += 1;
    }
}
