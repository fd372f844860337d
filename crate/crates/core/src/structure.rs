//! Block systems, wreath products in imprimitive and product action, and
//! coset actions.
//!
//! Frozen indexing:
//! * imprimitive `B wr A` on `m * b` points: `(w1, w2) -> w1 * b + w2`;
//! * product action on `b^m` points: `(w_0, .., w_{m-1}) -> sum w_i b^(m-1-i)`,
//!   coordinate 0 most significant.
//!
//! An element `(f; s)` with `f = (f_0, .., f_{m-1})` in `B^m` and `s` in `A`
//! moves `(w1, w2)` to `(s(w1), f_{w1}(w2))` imprimitively, and sends a tuple
//! `w` to `w'` with `w'_{s(i)} = f_i(w_i)` in product action. Under the
//! left-to-right convention `(f; s)(g; t) = (h; st)` with `h_i = f_i g_{s(i)}`.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::orbit::Orbit;
use crate::perm::Permutation;

/// A `G`-invariant partition into `m` blocks of size `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BlockSystem {
    block_of: Vec<usize>,
    m: usize,
    b: usize,
}

impl BlockSystem {
    /// Relabels blocks by first appearance and checks that all blocks have
    /// the same size.
    pub fn new(block_of: &[usize]) -> Result<Self> {
        let mut relabel = std::collections::HashMap::new();
        let normalized: Vec<usize> = block_of
            .iter()
            .map(|&l| {
                let next = relabel.len();
                *relabel.entry(l).or_insert(next)
            })
            .collect();
        let m = relabel.len();
        let n = block_of.len();
        if m == 0 {
            return Ok(BlockSystem {
                block_of: normalized,
                m: 0,
                b: 0,
            });
        }
        let mut sizes = vec![0usize; m];
        for &l in &normalized {
            sizes[l] += 1;
        }
        if sizes.iter().any(|&s| s * m != n) {
            return Err(Error::InvalidBlocks(format!("unequal block sizes {sizes:?}")));
        }
        Ok(BlockSystem {
            block_of: normalized,
            m,
            b: n / m,
        })
    }

    pub fn block_of(&self) -> &[usize] {
        &self.block_of
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn degree(&self) -> usize {
        self.block_of.len()
    }

    /// Blocks as sorted point lists, in label order.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::with_capacity(self.b); self.m];
        for (x, &l) in self.block_of.iter().enumerate() {
            out[l].push(x);
        }
        out
    }

    pub fn is_trivial(&self) -> bool {
        self.m <= 1 || self.b <= 1
    }

    /// Whether every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &BlockSystem) -> bool {
        let mut target = vec![usize::MAX; self.m];
        for (x, &l) in self.block_of.iter().enumerate() {
            let o = other.block_of[x];
            if target[l] == usize::MAX {
                target[l] = o;
            } else if target[l] != o {
                return false;
            }
        }
        true
    }

    pub fn is_invariant(&self, g: &PermGroup) -> bool {
        self.block_images(g).is_ok()
    }

    // Image of each block under each generator.
    fn block_images(&self, g: &PermGroup) -> Result<Vec<Vec<usize>>> {
        if self.degree() != g.degree() {
            return Err(Error::InvalidBlocks(format!(
                "system on {} points, group of degree {}",
                self.degree(),
                g.degree()
            )));
        }
        g.generators()
            .iter()
            .map(|s| {
                let mut image = vec![usize::MAX; self.m];
                for (x, &l) in self.block_of.iter().enumerate() {
                    let t = self.block_of[s.apply(x)];
                    if image[l] == usize::MAX {
                        image[l] = t;
                    } else if image[l] != t {
                        return Err(Error::InvalidBlocks(format!("generator {s} splits block {l}")));
                    }
                }
                Ok(image)
            })
            .collect()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
}

/// Finest block system in which `a` and `c` share a block.
pub fn minimal_block(g: &PermGroup, a: usize, c: usize) -> BlockSystem {
    let n = g.degree();
    let mut uf = UnionFind((0..n).collect());
    let mut queue = Vec::new();
    if a != c {
        let (ra, rc) = (uf.find(a), uf.find(c));
        uf.0[rc] = ra;
        queue.push((a, c));
    }
    while let Some((x, y)) = queue.pop() {
        for s in g.generators() {
            let (u, v) = (uf.find(s.apply(x)), uf.find(s.apply(y)));
            if u != v {
                uf.0[v] = u;
                queue.push((u, v));
            }
        }
    }
    let labels: Vec<usize> = (0..n).map(|x| uf.find(x)).collect();
    BlockSystem::new(&labels).expect("blocks of a transitive group have equal size")
}

/// All minimal nontrivial block systems of a transitive group; empty exactly
/// when the group is primitive.
pub fn block_systems(g: &PermGroup) -> Result<Vec<BlockSystem>> {
    if !g.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let n = g.degree();
    let mut found: Vec<BlockSystem> = Vec::new();
    for c in 1..n {
        let bs = minimal_block(g, 0, c);
        if bs.m() > 1 && !found.contains(&bs) {
            found.push(bs);
        }
    }
    let minimal: BTreeSet<Vec<usize>> = found
        .iter()
        .filter(|p| !found.iter().any(|q| q != *p && q.refines(p)))
        .map(|p| p.block_of.clone())
        .collect();
    Ok(minimal
        .into_iter()
        .map(|b| BlockSystem::new(&b).expect("valid"))
        .collect())
}

pub fn is_primitive(g: &PermGroup) -> Result<bool> {
    Ok(block_systems(g)?.is_empty())
}

/// A block system whose quotient action is primitive; the one with the
/// lexicographically smallest `block_of` when there are several.
pub fn maximal_block_system(g: &PermGroup) -> Result<BlockSystem> {
    let minimal = block_systems(g)?;
    if minimal.is_empty() {
        return Err(Error::IsPrimitive);
    }
    let mut stack = minimal;
    let mut seen = HashSet::new();
    let mut best: Option<BlockSystem> = None;
    while let Some(p) = stack.pop() {
        if !seen.insert(p.block_of.clone()) {
            continue;
        }
        let (top, _) = blocks_action(g, &p)?;
        let above = block_systems(&top)?;
        if above.is_empty() {
            if best.as_ref().is_none_or(|b| p.block_of < b.block_of) {
                best = Some(p);
            }
            continue;
        }
        for q in above {
            let pulled: Vec<usize> = p.block_of.iter().map(|&l| q.block_of[l]).collect();
            stack.push(BlockSystem::new(&pulled)?);
        }
    }
    Ok(best.expect("some system has a primitive quotient"))
}

/// Action on the blocks, with the image of each generator.
pub fn blocks_action(g: &PermGroup, bs: &BlockSystem) -> Result<(PermGroup, Vec<Permutation>)> {
    let images = bs.block_images(g)?;
    let perms = images
        .iter()
        .map(|im| Permutation::from_images(im))
        .collect::<Result<Vec<_>>>()?;
    Ok((PermGroup::new(bs.m(), perms.clone())?, perms))
}

/// Setwise stabilizer of a block, as a subgroup of `g`.
pub fn block_stabilizer(g: &PermGroup, bs: &BlockSystem, block: usize) -> Result<PermGroup> {
    let (orbit, reps) = block_orbit(g, bs, block)?;
    let act = |&l: &usize, p: &Permutation| bs.block_of[p.apply(reps[l])];
    Ok(orbit.stabilizer(g, act))
}

// Orbit of a block under the induced action, plus one point of every block.
fn block_orbit(g: &PermGroup, bs: &BlockSystem, block: usize) -> Result<(Orbit<usize>, Vec<usize>)> {
    bs.block_images(g)?;
    if block >= bs.m() {
        return Err(Error::InvalidBlocks(format!("no block {block}")));
    }
    let mut reps = vec![0; bs.m()];
    for (x, &l) in bs.block_of.iter().enumerate().rev() {
        reps[l] = x;
    }
    let act = |&l: &usize, p: &Permutation| bs.block_of[p.apply(reps[l])];
    let orbit = Orbit::explore(g, block, act, usize::MAX)?;
    Ok((orbit, reps))
}

/// The block stabilizer restricted to the block, on local labels given by
/// the sorted order of the block's points.
pub fn block_constituent(g: &PermGroup, bs: &BlockSystem, block: usize) -> Result<PermGroup> {
    let stab = block_stabilizer(g, bs, block)?;
    let points = &bs.blocks()[block];
    restrict(&stab, points)
}

fn restrict(h: &PermGroup, points: &[usize]) -> Result<PermGroup> {
    let mut local = vec![usize::MAX; h.degree()];
    for (i, &x) in points.iter().enumerate() {
        local[x] = i;
    }
    let restricted = h
        .generators()
        .iter()
        .map(|s| Permutation::from_images(&points.iter().map(|&x| local[s.apply(x)]).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    Ok(PermGroup::generated_by(points.len(), restricted))
}

/// Identification of a transitive group's domain with blocks x block-0,
/// under which the group lies inside `bottom wr top`.
#[derive(Clone, Debug)]
pub struct BlockEmbedding {
    pub system: BlockSystem,
    /// `points[b][j]` is the point with wreath coordinates `(b, j)`.
    pub points: Vec<Vec<usize>>,
    pub bottom: PermGroup,
    pub top: PermGroup,
}

impl BlockEmbedding {
    /// Uses transversal elements `t_b` carrying block 0 to block `b`, and
    /// sets `points[b][j] = t_b(p_j)` with `p_0 < p_1 < ..` the points of block 0.
    pub fn new(g: &PermGroup, bs: &BlockSystem) -> Result<Self> {
        let (orbit, _) = block_orbit(g, bs, 0)?;
        if orbit.len() != bs.m() {
            return Err(Error::NotTransitive);
        }
        let block0 = bs.blocks()[0].clone();
        let mut points = vec![Vec::new(); bs.m()];
        for (i, &l) in orbit.points().iter().enumerate() {
            let t = orbit.transversal(g, i);
            points[l] = block0.iter().map(|&x| t.apply(x)).collect();
        }
        let (top, _) = blocks_action(g, bs)?;
        let bottom = block_constituent(g, bs, 0)?;
        Ok(BlockEmbedding {
            system: bs.clone(),
            points,
            bottom,
            top,
        })
    }

    pub fn m(&self) -> usize {
        self.system.m()
    }

    pub fn b(&self) -> usize {
        self.system.b()
    }

    /// Relabelling sending `points[b][j]` to `b * bsize + j`.
    pub fn to_wreath(&self) -> Permutation {
        let mut images = vec![0; self.system.degree()];
        for (b, pts) in self.points.iter().enumerate() {
            for (j, &x) in pts.iter().enumerate() {
                images[x] = b * self.b() + j;
            }
        }
        Permutation::from_images(&images).expect("points form a partition")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum WreathFlavor {
    Imprimitive,
    Product,
}

/// A realized wreath product `bottom wr top`, optionally remembering how
/// its factors were themselves built.
#[derive(Clone, Debug)]
pub struct WreathStructure {
    pub flavor: WreathFlavor,
    pub bottom: PermGroup,
    pub top: PermGroup,
    pub ambient: PermGroup,
    pub bottom_structure: Option<Box<WreathStructure>>,
    pub top_structure: Option<Box<WreathStructure>>,
}

impl WreathStructure {
    pub fn with_substructures(mut self, bottom: Option<WreathStructure>, top: Option<WreathStructure>) -> Self {
        self.bottom_structure = bottom.map(Box::new);
        self.top_structure = top.map(Box::new);
        self
    }

    /// Number of copies of the bottom group.
    pub fn m(&self) -> usize {
        self.top.degree()
    }

    /// Degree of the bottom group.
    pub fn b(&self) -> usize {
        self.bottom.degree()
    }

    pub fn degree(&self) -> usize {
        self.ambient.degree()
    }

    /// The element `(f; sigma)`.
    pub fn element(&self, f: &[Permutation], sigma: &Permutation) -> Permutation {
        assert_eq!(f.len(), self.m());
        let (m, b) = (self.m(), self.b());
        let images: Vec<usize> = match self.flavor {
            WreathFlavor::Imprimitive => (0..m * b)
                .map(|x| sigma.apply(x / b) * b + f[x / b].apply(x % b))
                .collect(),
            WreathFlavor::Product => {
                let mut digits = vec![0; m];
                let mut out = vec![0; m];
                (0..self.degree())
                    .map(|x| {
                        to_digits(x, b, &mut digits);
                        for i in 0..m {
                            out[sigma.apply(i)] = f[i].apply(digits[i]);
                        }
                        from_digits(&out, b)
                    })
                    .collect()
            }
        };
        Permutation::from_images(&images).expect("wreath element")
    }

    /// Splits an element of the ambient group into `(f; sigma)`. Returns
    /// `None` when `g` does not preserve the product structure.
    pub fn decompose(&self, g: &Permutation) -> Option<(Vec<Permutation>, Permutation)> {
        let (m, b) = (self.m(), self.b());
        match self.flavor {
            WreathFlavor::Imprimitive => {
                let sigma: Vec<usize> = (0..m).map(|w| g.apply(w * b) / b).collect();
                let mut f = Vec::with_capacity(m);
                for (w, &target) in sigma.iter().enumerate() {
                    let mut fw = Vec::with_capacity(b);
                    for j in 0..b {
                        let y = g.apply(w * b + j);
                        if y / b != target {
                            return None;
                        }
                        fw.push(y % b);
                    }
                    f.push(Permutation::from_images(&fw).ok()?);
                }
                Some((f, Permutation::from_images(&sigma).ok()?))
            }
            WreathFlavor::Product => {
                if b == 1 {
                    return Some((vec![Permutation::identity(1); m], Permutation::identity(m)));
                }
                let mut digits = vec![0; m];
                let mut base_image = vec![0; m];
                to_digits(g.apply(0), b, &mut base_image);
                let mut sigma = vec![0; m];
                for i in 0..m {
                    let mut probe = vec![0; m];
                    probe[i] = 1;
                    to_digits(g.apply(from_digits(&probe, b)), b, &mut digits);
                    let changed: Vec<usize> = (0..m).filter(|&k| digits[k] != base_image[k]).collect();
                    if changed.len() != 1 {
                        return None;
                    }
                    sigma[i] = changed[0];
                }
                let sigma = Permutation::from_images(&sigma).ok()?;
                let mut f = Vec::with_capacity(m);
                for i in 0..m {
                    let mut fi = Vec::with_capacity(b);
                    for a in 0..b {
                        let mut probe = vec![0; m];
                        probe[i] = a;
                        to_digits(g.apply(from_digits(&probe, b)), b, &mut digits);
                        fi.push(digits[sigma.apply(i)]);
                    }
                    f.push(Permutation::from_images(&fi).ok()?);
                }
                let candidate = self.element(&f, &sigma);
                (candidate == *g).then_some((f, sigma))
            }
        }
    }

    /// The defining block system of an imprimitive wreath product.
    pub fn block_system(&self) -> Option<BlockSystem> {
        match self.flavor {
            WreathFlavor::Imprimitive => {
                let b = self.b();
                Some(BlockSystem::new(&(0..self.degree()).map(|x| x / b).collect::<Vec<_>>()).expect("valid"))
            }
            WreathFlavor::Product => None,
        }
    }
}

fn to_digits(mut x: usize, b: usize, out: &mut [usize]) {
    for d in out.iter_mut().rev() {
        *d = x % b;
        x /= b;
    }
}

fn from_digits(digits: &[usize], b: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * b + d)
}

fn wreath(bottom: &PermGroup, top: &PermGroup, flavor: WreathFlavor) -> Result<WreathStructure> {
    let (b, m) = (bottom.degree(), top.degree());
    let degree = match flavor {
        WreathFlavor::Imprimitive => b.checked_mul(m),
        WreathFlavor::Product => u32::try_from(m).ok().and_then(|m| b.checked_pow(m)),
    }
    .unwrap_or(usize::MAX);
    if degree > crate::MAX_DEGREE {
        return Err(Error::DegreeCap(degree));
    }
    let mut ws = WreathStructure {
        flavor,
        bottom: bottom.clone(),
        top: top.clone(),
        ambient: PermGroup::trivial(degree),
        bottom_structure: None,
        top_structure: None,
    };
    let id_b = Permutation::identity(b);
    let id_m = Permutation::identity(m);
    let mut gens = Vec::new();
    for i in 0..m {
        for s in bottom.generators() {
            let mut f = vec![id_b.clone(); m];
            f[i] = s.clone();
            gens.push(ws.element(&f, &id_m));
        }
    }
    for s in top.generators() {
        gens.push(ws.element(&vec![id_b.clone(); m], s));
    }
    ws.ambient = PermGroup::new(degree, gens)?;
    Ok(ws)
}

/// `bottom wr top` on `m * b` points.
pub fn wreath_imprimitive(bottom: &PermGroup, top: &PermGroup) -> Result<WreathStructure> {
    wreath(bottom, top, WreathFlavor::Imprimitive)
}

/// `bottom wr top` in product action on `b^m` points.
pub fn wreath_product_action(bottom: &PermGroup, top: &PermGroup) -> Result<WreathStructure> {
    wreath(bottom, top, WreathFlavor::Product)
}

/// Action of `g` on the right cosets of `h`, with coset representatives;
/// point 0 is `h` itself.
pub fn coset_action(g: &PermGroup, h: &PermGroup) -> Result<(PermGroup, Vec<Permutation>)> {
    if h.degree() != g.degree() || !h.is_subgroup_of(g) {
        return Err(Error::NotSubgroup);
    }
    let index = g.index_of(h);
    if index > crate::MAX_DEGREE.into() {
        return Err(Error::IndexCap {
            index: index.to_string(),
            cap: crate::MAX_DEGREE,
        });
    }
    let find = |reps: &[Permutation], x: &Permutation| reps.iter().position(|r| h.has(&x.mul_inv(r)));
    let mut reps = vec![Permutation::identity(g.degree())];
    let mut images = vec![Vec::new(); g.generators().len()];
    let mut i = 0;
    while i < reps.len() {
        for (k, s) in g.generators().iter().enumerate() {
            let y = reps[i].mul(s);
            let j = match find(&reps, &y) {
                Some(j) => j,
                None => {
                    reps.push(y);
                    reps.len() - 1
                }
            };
            images[k].push(j);
        }
        i += 1;
    }
    let perms = images
        .iter()
        .map(|im| Permutation::from_images(im))
        .collect::<Result<Vec<_>>>()?;
    Ok((PermGroup::new(reps.len(), perms)?, reps))
}
