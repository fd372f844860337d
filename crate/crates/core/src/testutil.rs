//! Brute-force oracles for unit tests. Nothing here touches the
//! stabilizer chain.

use std::collections::HashSet;

use crate::bitset::Subset;
use crate::group::PermGroup;
use crate::perm::Permutation;

pub fn builtin(spec: &str) -> PermGroup {
    crate::registry::group(spec).unwrap()
}

/// Every element of the group, by closure under the generators.
pub fn closure(g: &PermGroup) -> HashSet<Permutation> {
    let id = Permutation::identity(g.degree());
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = vec![id];
    while let Some(x) = queue.pop() {
        for s in g.generators() {
            let y = x.mul(s);
            if seen.insert(y.clone()) {
                queue.push(y);
            }
        }
    }
    seen
}

pub fn brute_set_stabilizer(g: &PermGroup, s: &Subset) -> Vec<Permutation> {
    closure(g).into_iter().filter(|p| s.image(p) == *s).collect()
}

pub fn brute_coloring_stabilizer(g: &PermGroup, colors: &[u8]) -> Vec<Permutation> {
    closure(g)
        .into_iter()
        .filter(|p| (0..colors.len()).all(|x| colors[p.apply(x)] == colors[x]))
        .collect()
}

/// Longest orbit of the group generated by `elements` (which must be closed).
pub fn max_orbit_of_elements(degree: usize, elements: &[Permutation]) -> usize {
    (0..degree)
        .map(|x| elements.iter().map(|p| p.apply(x)).collect::<HashSet<_>>().len())
        .max()
        .unwrap_or(0)
}
