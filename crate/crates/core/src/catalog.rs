//! Primitive solvable groups of small degree, built as affine groups
//! `V x| H` with `H` an irreducible solvable subgroup of `GL(d, p)`.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::actions::{coloring_census, CensusReport, ELL_LEVELS};
use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Permutation;
use crate::structure::is_primitive;
use crate::Caps;

/// Largest matrix group materialized.
pub const ORDER_CAP: usize = 200;

/// Prime powers `p^d <= 9` with `d >= 1`.
pub const SMALL_FIELDS: [(u8, u8); 7] = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)];

/// A `d x d` matrix over `F_p`, `d <= 3`, row-major.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Matrix {
    p: u8,
    d: u8,
    e: [u8; 9],
}

impl Matrix {
    pub fn new(p: usize, rows: &[&[usize]]) -> Result<Self> {
        let d = rows.len();
        if !(1..=3).contains(&d) || rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidInstance(format!(
                "matrices must be square of size 1..=3, got {d} rows"
            )));
        }
        if !is_prime(p) || p > 255 {
            return Err(Error::InvalidInstance(format!("{p} is not a small prime")));
        }
        let mut e = [0u8; 9];
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                e[i * 3 + j] = (x % p) as u8;
            }
        }
        Ok(Matrix {
            p: p as u8,
            d: d as u8,
            e,
        })
    }

    pub fn identity(p: usize, d: usize) -> Self {
        let mut e = [0u8; 9];
        for i in 0..d {
            e[i * 3 + i] = 1;
        }
        Matrix {
            p: p as u8,
            d: d as u8,
            e,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.e[i * 3 + j] as usize
    }

    pub fn dim(&self) -> usize {
        self.d as usize
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let (p, d) = (self.p as usize, self.dim());
        let mut e = [0u8; 9];
        for i in 0..d {
            for j in 0..d {
                let s: usize = (0..d).map(|k| self.get(i, k) * other.get(k, j)).sum();
                e[i * 3 + j] = (s % p) as u8;
            }
        }
        Matrix { e, ..*self }
    }

    pub fn det(&self) -> usize {
        let p = self.p as usize;
        let m = |i, j| self.get(i, j);
        let v = match self.dim() {
            1 => m(0, 0),
            2 => m(0, 0) * m(1, 1) + p * p - (m(0, 1) * m(1, 0)) % (p * p),
            _ => {
                let plus = m(0, 0) * m(1, 1) * m(2, 2) + m(0, 1) * m(1, 2) * m(2, 0) + m(0, 2) * m(1, 0) * m(2, 1);
                let minus = m(0, 2) * m(1, 1) * m(2, 0) + m(0, 0) * m(1, 2) * m(2, 1) + m(0, 1) * m(1, 0) * m(2, 2);
                plus + p * minus - minus
            }
        };
        v % p
    }

    /// `M v` for a column vector.
    pub fn apply(&self, v: &[usize]) -> Vec<usize> {
        let p = self.p as usize;
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.get(i, j) * v[j]).sum::<usize>() % p)
            .collect()
    }
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..p).take_while(|q| q * q <= p).all(|q| !p.is_multiple_of(q))
}

/// A finite matrix group, materialized.
#[derive(Clone, Debug)]
pub struct MatrixGroupSmall {
    p: usize,
    d: usize,
    generators: Vec<Matrix>,
    elements: Vec<Matrix>,
}

impl MatrixGroupSmall {
    /// Closure of `generators`; fails past [`ORDER_CAP`] elements.
    pub fn generated(p: usize, d: usize, generators: Vec<Matrix>) -> Result<Self> {
        if generators.iter().any(|m| m.p as usize != p || m.dim() != d) {
            return Err(Error::DegreeMismatch(
                d,
                generators.iter().map(Matrix::dim).max().unwrap_or(d),
            ));
        }
        if generators.iter().any(|m| m.det() == 0) {
            return Err(Error::InvalidInstance("singular matrix".into()));
        }
        let id = Matrix::identity(p, d);
        let mut seen = HashSet::from([id]);
        let mut queue = vec![id];
        while let Some(x) = queue.pop() {
            for g in &generators {
                let y = x.mul(g);
                if seen.insert(y) {
                    if seen.len() > ORDER_CAP {
                        return Err(Error::OrderCap(ORDER_CAP as u64));
                    }
                    queue.push(y);
                }
            }
        }
        let mut elements: Vec<Matrix> = seen.into_iter().collect();
        elements.sort();
        Ok(MatrixGroupSmall {
            p,
            d,
            generators,
            elements,
        })
    }

    pub fn general_linear(p: usize, d: usize) -> Result<Self> {
        if !is_prime(p) || !(1..=3).contains(&d) {
            return Err(Error::InvalidInstance(format!("GL({d}, {p}) is not supported")));
        }
        let total = p.pow((d * d) as u32);
        let mut elements = Vec::new();
        for code in 0..total {
            let mut e = [0u8; 9];
            let mut rest = code;
            for i in 0..d {
                for j in 0..d {
                    e[i * 3 + j] = (rest % p) as u8;
                    rest /= p;
                }
            }
            let m = Matrix {
                p: p as u8,
                d: d as u8,
                e,
            };
            if m.det() != 0 {
                elements.push(m);
            }
        }
        if elements.len() > ORDER_CAP {
            return Err(Error::OrderCap(ORDER_CAP as u64));
        }
        elements.sort();
        let mut g = MatrixGroupSmall {
            p,
            d,
            generators: Vec::new(),
            elements,
        };
        g.generators = generating_subset(&g, &g.elements);
        Ok(g)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.elements.binary_search(m).is_ok()
    }
}

/// A few elements of `pool` that generate the same group as all of it.
fn generating_subset(g: &MatrixGroupSmall, pool: &[Matrix]) -> Vec<Matrix> {
    let target: HashSet<Matrix> = pool.iter().copied().collect();
    let mut gens: Vec<Matrix> = Vec::new();
    let mut span: HashSet<Matrix> = HashSet::from([Matrix::identity(g.p, g.d)]);
    for m in pool {
        if span.len() == target.len() {
            break;
        }
        if !span.contains(m) {
            gens.push(*m);
            span = MatrixGroupSmall::generated(g.p, g.d, gens.clone())
                .expect("subgroup of a capped group")
                .elements
                .into_iter()
                .collect();
        }
    }
    gens
}

type Bits = [u64; 4];

fn bit(b: &Bits, i: usize) -> bool {
    b[i >> 6] >> (i & 63) & 1 == 1
}

fn set_bit(b: &mut Bits, i: usize) {
    b[i >> 6] |= 1 << (i & 63);
}

/// Index arithmetic for a materialized group.
struct Table {
    mul: Vec<Vec<u8>>,
    inv: Vec<u8>,
}

impl Table {
    fn new(g: &MatrixGroupSmall) -> Self {
        let index: HashMap<Matrix, u8> = g.elements.iter().enumerate().map(|(i, m)| (*m, i as u8)).collect();
        let mul: Vec<Vec<u8>> = g
            .elements
            .iter()
            .map(|a| g.elements.iter().map(|b| index[&a.mul(b)]).collect())
            .collect();
        let id = index[&Matrix::identity(g.p, g.d)];
        let inv = (0..g.order())
            .map(|a| (0..g.order()).find(|&b| mul[a][b] == id).expect("group") as u8)
            .collect();
        Table { mul, inv }
    }

    fn closure(&self, gens: &[usize]) -> Bits {
        let n = self.inv.len();
        let id = (0..n).find(|&i| self.mul[i][i] == i as u8).expect("identity");
        let mut bits = [0u64; 4];
        set_bit(&mut bits, id);
        let mut queue = vec![id];
        while let Some(x) = queue.pop() {
            for &g in gens {
                let y = self.mul[x][g] as usize;
                if !bit(&bits, y) {
                    set_bit(&mut bits, y);
                    queue.push(y);
                }
            }
        }
        bits
    }

    fn conjugate(&self, h: &Bits, g: usize) -> Bits {
        let gi = self.inv[g] as usize;
        let mut out = [0u64; 4];
        for x in 0..self.inv.len() {
            if bit(h, x) {
                set_bit(&mut out, self.mul[self.mul[gi][x] as usize][g] as usize);
            }
        }
        out
    }
}

fn members(b: &Bits, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| bit(b, i)).collect()
}

/// Every subgroup, as sets of element indices, by joining cyclic subgroups.
fn all_subgroup_bits(g: &MatrixGroupSmall, table: &Table) -> Vec<Bits> {
    let n = g.order();
    let mut cyclic: Vec<(Bits, usize)> = Vec::new();
    let mut seen = HashSet::new();
    for e in 0..n {
        let c = table.closure(&[e]);
        if seen.insert(c) {
            cyclic.push((c, e));
        }
    }
    let mut all: Vec<(Bits, Vec<usize>)> = cyclic.iter().map(|(b, e)| (*b, vec![*e])).collect();
    let mut frontier = all.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (h, gens) in &frontier {
            for (c, e) in &cyclic {
                if (0..4).all(|w| c[w] & !h[w] == 0) {
                    continue;
                }
                let mut joined = gens.clone();
                joined.push(*e);
                let j = table.closure(&joined);
                if seen.insert(j) {
                    next.push((j, joined));
                }
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all.into_iter().map(|(b, _)| b).collect()
}

fn to_group(g: &MatrixGroupSmall, b: &Bits) -> MatrixGroupSmall {
    let pool: Vec<Matrix> = members(b, g.order()).into_iter().map(|i| g.elements[i]).collect();
    let mut h = MatrixGroupSmall {
        p: g.p,
        d: g.d,
        generators: Vec::new(),
        elements: pool.clone(),
    };
    h.generators = generating_subset(&h, &pool);
    h
}

/// Every subgroup of `m`, ordered by size.
pub fn subgroups(m: &MatrixGroupSmall) -> Result<Vec<MatrixGroupSmall>> {
    if m.order() > ORDER_CAP {
        return Err(Error::OrderCap(ORDER_CAP as u64));
    }
    let table = Table::new(m);
    let mut subs: Vec<MatrixGroupSmall> = all_subgroup_bits(m, &table).iter().map(|b| to_group(m, b)).collect();
    subs.sort_by(|a, b| (a.order(), &a.elements).cmp(&(b.order(), &b.elements)));
    Ok(subs)
}

/// One subgroup from each conjugacy class of subgroups of `m`.
pub fn subgroups_up_to_conjugacy(m: &MatrixGroupSmall) -> Result<Vec<MatrixGroupSmall>> {
    if m.order() > ORDER_CAP {
        return Err(Error::OrderCap(ORDER_CAP as u64));
    }
    let table = Table::new(m);
    let n = m.order();
    let mut classes: HashMap<Bits, Bits> = HashMap::new();
    for h in all_subgroup_bits(m, &table) {
        let key = (0..n).map(|g| table.conjugate(&h, g)).min().expect("nonempty");
        classes.entry(key).or_insert(key);
    }
    let mut reps: Vec<MatrixGroupSmall> = classes.values().map(|b| to_group(m, b)).collect();
    reps.sort_by(|a, b| (a.order(), &a.elements).cmp(&(b.order(), &b.elements)));
    Ok(reps)
}

fn decode(mut code: usize, p: usize, d: usize) -> Vec<usize> {
    (0..d)
        .map(|_| {
            let x = code % p;
            code /= p;
            x
        })
        .collect()
}

fn encode(v: &[usize], p: usize) -> usize {
    v.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Whether no proper nonzero subspace is invariant, by checking the span
/// of every nonzero vector and every pair of vectors.
pub fn is_irreducible(h: &MatrixGroupSmall) -> bool {
    let (p, d) = (h.p, h.d);
    let size = p.pow(d as u32);
    let span = |vs: &[usize]| -> u64 {
        let mut mask = 1u64;
        let mut members = vec![0usize];
        loop {
            let mut grew = false;
            for &v in vs {
                let dv = decode(v, p, d);
                for m in members.clone() {
                    let dm = decode(m, p, d);
                    let sum: Vec<usize> = dm.iter().zip(&dv).map(|(a, b)| (a + b) % p).collect();
                    let s = encode(&sum, p);
                    if mask >> s & 1 == 0 {
                        mask |= 1 << s;
                        members.push(s);
                        grew = true;
                    }
                }
            }
            if !grew {
                return mask;
            }
        }
    };
    let full = if size == 64 { u64::MAX } else { (1u64 << size) - 1 };
    let mut subspaces = HashSet::new();
    for a in 1..size {
        subspaces.insert(span(&[a]));
        for b in a + 1..size {
            subspaces.insert(span(&[a, b]));
        }
    }
    subspaces.retain(|&s| s != full);
    !subspaces.into_iter().any(|s| {
        h.generators.iter().all(|m| {
            (0..size)
                .filter(|&v| s >> v & 1 == 1)
                .all(|v| s >> encode(&m.apply(&decode(v, p, d)), p) & 1 == 1)
        })
    })
}

/// `V x| H` on the `p^d` vectors, vector `v` being point `sum v_i p^i`.
pub fn affine_group(h: &MatrixGroupSmall) -> Result<PermGroup> {
    if !is_irreducible(h) {
        return Err(Error::NotIrreducible);
    }
    let (p, d) = (h.p, h.d);
    let size = p.pow(d as u32);
    let mut gens = Vec::new();
    for i in 0..d {
        let images: Vec<usize> = (0..size)
            .map(|x| {
                let mut v = decode(x, p, d);
                v[i] = (v[i] + 1) % p;
                encode(&v, p)
            })
            .collect();
        gens.push(Permutation::from_images(&images)?);
    }
    for m in &h.generators {
        let images: Vec<usize> = (0..size).map(|x| encode(&m.apply(&decode(x, p, d)), p)).collect();
        gens.push(Permutation::from_images(&images)?);
    }
    PermGroup::new(size, gens)
}

/// A primitive solvable group from the catalog, with its subset census.
#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub degree: usize,
    #[serde(serialize_with = "as_string")]
    pub order: BigUint,
    /// Identifier in the standard library of primitive groups, for the
    /// entries whose identification is unambiguous.
    pub gap_id: Option<String>,
    /// Number of subset classes whose stabilizer has all orbits of length
    /// at most 1, 2, 3, 6.
    pub ell: [usize; 4],
    #[serde(skip)]
    pub group: PermGroup,
    #[serde(skip)]
    pub census: CensusReport,
}

fn as_string<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn label(p: usize, d: usize, h_order: usize, degree: usize, order: &BigUint) -> (String, Option<String>) {
    let known = match (degree, order.to_string().as_str()) {
        (2, "2") => Some(("Sym(2)", "PrimitiveGroup(2,1)")),
        (4, "12") => Some(("Alt(4)", "PrimitiveGroup(4,1)")),
        (4, "24") => Some(("Sym(4)", "PrimitiveGroup(4,2)")),
        (8, "56") => Some(("AGL1(8)", "PrimitiveGroup(8,1)")),
        (8, "168") => Some(("AGammaL1(8)", "PrimitiveGroup(8,2)")),
        (9, "432") => Some(("AGL2(3)", "PrimitiveGroup(9,7)")),
        _ => None,
    };
    match known {
        Some((name, id)) => (name.to_string(), Some(id.to_string())),
        None if d == 1 && h_order == p - 1 => (format!("AGL1({p})"), None),
        None if d == 1 && h_order == 1 => (format!("C{p}"), None),
        None if d == 1 && h_order == 2 => (format!("D{}", 2 * p), None),
        None => (format!("{p}^{d}:{h_order}"), None),
    }
}

/// All primitive solvable groups of degree `2..=max_degree` (at most 9), up
/// to permutation isomorphism, sorted by degree then order.
pub fn enumerate_primitive_solvable(max_degree: usize, caps: &Caps) -> Result<Vec<CatalogEntry>> {
    if max_degree > 9 {
        return Err(Error::InvalidInstance(format!(
            "catalog stops at degree 9, asked for {max_degree}"
        )));
    }
    let mut candidates = Vec::new();
    for (p, d) in SMALL_FIELDS {
        let (p, d) = (p as usize, d as usize);
        if p.pow(d as u32) > max_degree {
            continue;
        }
        let gl = MatrixGroupSmall::general_linear(p, d)?;
        for h in subgroups_up_to_conjugacy(&gl)? {
            if !is_irreducible(&h) {
                continue;
            }
            let g = affine_group(&h)?;
            if g.is_solvable() {
                candidates.push((p, d, h.order(), g));
            }
        }
    }
    let mut entries = candidates
        .into_par_iter()
        .map(|(p, d, h_order, g)| {
            let census = coloring_census(&g, "", 2, caps)?;
            let (name, gap_id) = label(p, d, h_order, g.degree(), &g.order());
            let mut census = census;
            census.group = name.clone();
            Ok(CatalogEntry {
                ell: ELL_LEVELS.map(|i| census.ell(i)),
                name,
                degree: g.degree(),
                order: g.order(),
                gap_id,
                group: g,
                census,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| (a.degree, &a.order, a.ell).cmp(&(b.degree, &b.order, b.ell)));

    let mut kept: Vec<CatalogEntry> = Vec::new();
    for e in entries {
        let duplicate = kept.iter().any(|k| {
            k.degree == e.degree
                && k.order == e.order
                && k.ell == e.ell
                && permutation_isomorphic(&k.group, &e.group).is_some()
        });
        if !duplicate {
            kept.push(e);
        }
    }
    Ok(kept)
}

/// A relabelling `pi` with `pi^-1 a pi = b`, if one exists.
pub fn permutation_isomorphic(a: &PermGroup, b: &PermGroup) -> Option<Permutation> {
    let n = a.degree();
    if n != b.degree() || a.order() != b.order() || fingerprint(a) != fingerprint(b) {
        return None;
    }
    let mut images = vec![usize::MAX; n];
    let mut used = vec![false; n];
    // transitive groups: any conjugator can be adjusted to fix 0
    let start = if a.is_transitive() && b.is_transitive() && n > 0 {
        images[0] = 0;
        used[0] = true;
        1
    } else {
        0
    };
    search_conjugator(a, b, &mut images, &mut used, start)
}

fn search_conjugator(
    a: &PermGroup,
    b: &PermGroup,
    images: &mut [usize],
    used: &mut [bool],
    x: usize,
) -> Option<Permutation> {
    let n = images.len();
    if x == n {
        let pi = Permutation::from_images(images).ok()?;
        return a
            .generators()
            .iter()
            .all(|g| b.has(&pi.inverse().mul(g).mul(&pi)))
            .then_some(pi);
    }
    for y in 0..n {
        if used[y] {
            continue;
        }
        if a.orbit(x).ok()?.len() != b.orbit(y).ok()?.len() {
            continue;
        }
        images[x] = y;
        used[y] = true;
        if let Some(pi) = search_conjugator(a, b, images, used, x + 1) {
            return Some(pi);
        }
        used[y] = false;
    }
    images[x] = usize::MAX;
    None
}

/// Orbit lengths and the multiset of cycle types of all elements (for
/// orders up to 10^5).
fn fingerprint(g: &PermGroup) -> (Vec<usize>, Vec<(Vec<usize>, usize)>) {
    let mut lengths: Vec<usize> = g.orbits().iter().map(Vec::len).collect();
    lengths.sort_unstable();
    let mut types: HashMap<Vec<usize>, usize> = HashMap::new();
    if g.order() <= BigUint::from(100_000u32) {
        for e in g.elements() {
            *types.entry(e.cycle_type()).or_default() += 1;
        }
    }
    let mut types: Vec<(Vec<usize>, usize)> = types.into_iter().collect();
    types.sort();
    (lengths, types)
}

/// Row of subset-class counts for a group with fewer than 5 classes of
/// trivial stabilizer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Table1Row {
    pub degree: usize,
    pub ell: [usize; 4],
    pub name: String,
}

/// Entries with fewer than 5 regular subset orbits, sorted by degree and row.
pub fn table1_report(entries: &[CatalogEntry]) -> Vec<Table1Row> {
    let mut rows: Vec<Table1Row> = entries
        .iter()
        .filter(|e| e.ell[0] < 5)
        .map(|e| Table1Row {
            degree: e.degree,
            ell: e.ell,
            name: e.name.clone(),
        })
        .collect();
    rows.sort();
    rows
}

/// Per-entry existence checks for well-behaved subset stabilizers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaFlags {
    pub name: String,
    pub degree: usize,
    /// Classes with all stabilizer orbits of length at most 2.
    pub two_regular: usize,
    pub three_regular_class: bool,
    pub metabelian_class: bool,
    pub abelian_class: bool,
    pub asymmetric_4_coloring: bool,
}

pub fn primitive_lemma_report(entries: &[CatalogEntry], caps: &Caps) -> Result<Vec<LemmaFlags>> {
    entries
        .par_iter()
        .map(|e| {
            let classes = &e.census.classes;
            let four = coloring_census(&e.group, &e.name, 4, caps)?;
            Ok(LemmaFlags {
                name: e.name.clone(),
                degree: e.degree,
                two_regular: e.census.ell(2),
                three_regular_class: e.census.ell(3) > 0,
                metabelian_class: classes.iter().any(|c| c.derived_length.at_most(2)),
                abelian_class: classes.iter().any(|c| c.derived_length.at_most(1)),
                asymmetric_4_coloring: four.ell(1) > 0,
            })
        })
        .collect()
}

/// Checks that every entry is primitive and solvable.
pub fn check_entries(entries: &[CatalogEntry]) -> Result<()> {
    for e in entries {
        if !is_primitive(&e.group)? || !e.group.is_solvable() {
            return Err(Error::PropertyViolation(format!(
                "{} is not primitive solvable",
                e.name
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::lookup;

    fn gl(p: usize, d: usize) -> MatrixGroupSmall {
        MatrixGroupSmall::general_linear(p, d).unwrap()
    }

    #[test]
    fn general_linear_orders() {
        assert_eq!(gl(2, 2).order(), 6);
        assert_eq!(gl(3, 2).order(), 48);
        assert_eq!(gl(2, 3).order(), 168);
        assert_eq!(gl(7, 1).order(), 6);
        assert!(gl(3, 2).generators().len() <= 4);
        assert_eq!(
            MatrixGroupSmall::general_linear(5, 2).unwrap_err(),
            Error::OrderCap(200)
        );
    }

    #[test]
    fn subgroup_lattices() {
        assert_eq!(subgroups(&gl(2, 2)).unwrap().len(), 6);
        let classes = subgroups_up_to_conjugacy(&gl(2, 2)).unwrap();
        assert_eq!(classes.iter().map(|h| h.order()).collect::<Vec<_>>(), vec![1, 2, 3, 6]);
        assert_eq!(subgroups_up_to_conjugacy(&gl(5, 1)).unwrap().len(), 3);
        let gl23 = subgroups_up_to_conjugacy(&gl(3, 2)).unwrap();
        assert!(gl23
            .iter()
            .any(|h| h.order() == 24 && h.elements().iter().all(|m| m.det() == 1)));
        assert_eq!(subgroups(&gl(7, 1)).unwrap().len(), 4);
    }

    #[test]
    fn irreducibility() {
        let rot = Matrix::new(3, &[&[0, 2], &[1, 0]]).unwrap();
        let h = MatrixGroupSmall::generated(3, 2, vec![rot]).unwrap();
        assert!(is_irreducible(&h));
        let trivial = MatrixGroupSmall::generated(3, 2, vec![]).unwrap();
        assert!(!is_irreducible(&trivial));
        assert!(is_irreducible(&gl(2, 3)));
        let diag = Matrix::new(3, &[&[2, 0], &[0, 1]]).unwrap();
        assert!(!is_irreducible(&MatrixGroupSmall::generated(3, 2, vec![diag]).unwrap()));
        assert!(is_irreducible(&MatrixGroupSmall::generated(5, 1, vec![]).unwrap()));
    }

    #[test]
    fn affine_examples() {
        let g = affine_group(&gl(5, 1)).unwrap();
        assert_eq!(g.order(), BigUint::from(20u32));
        assert!(permutation_isomorphic(&g, &lookup("agl1:5").unwrap().group).is_some());
        let s2 = affine_group(&MatrixGroupSmall::generated(2, 1, vec![]).unwrap()).unwrap();
        assert_eq!(s2.order(), BigUint::from(2u32));
        let agl = affine_group(&gl(3, 2)).unwrap();
        assert_eq!(agl.order(), BigUint::from(432u32));
        assert!(permutation_isomorphic(&agl, &lookup("agl2:3").unwrap().group).is_some());
        let trivial = MatrixGroupSmall::generated(3, 2, vec![]).unwrap();
        assert_eq!(affine_group(&trivial).unwrap_err(), Error::NotIrreducible);
    }

    #[test]
    fn isomorphism_search() {
        let a = lookup("cyc:5").unwrap().group;
        let b = PermGroup::new(5, vec![Permutation::from_cycles(5, &[&[0, 2, 4, 1, 3]]).unwrap()]).unwrap();
        let pi = permutation_isomorphic(&a, &b).unwrap();
        for g in a.generators() {
            assert!(b.has(&pi.inverse().mul(g).mul(&pi)));
        }
        assert!(permutation_isomorphic(&a, &lookup("agl1:5").unwrap().group).is_none());
        let d8 = PermGroup::new(
            4,
            vec![
                Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap(),
                Permutation::from_cycles(4, &[&[0, 2]]).unwrap(),
            ],
        )
        .unwrap();
        let v4 = PermGroup::new(
            4,
            vec![
                Permutation::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap(),
                Permutation::from_cycles(4, &[&[0, 2], &[1, 3]]).unwrap(),
            ],
        )
        .unwrap();
        assert!(permutation_isomorphic(&d8, &v4).is_none());
    }

    #[test]
    fn catalog_small_degrees() {
        let entries = enumerate_primitive_solvable(5, &Caps::default()).unwrap();
        let by_degree = |d| entries.iter().filter(|e| e.degree == d).count();
        assert_eq!((by_degree(2), by_degree(3), by_degree(4), by_degree(5)), (1, 2, 2, 3));
        check_entries(&entries).unwrap();
        let rows: Vec<(usize, [usize; 4])> = table1_report(&entries).into_iter().map(|r| (r.degree, r.ell)).collect();
        assert_eq!(
            rows,
            vec![
                (2, [1, 3, 3, 3]),
                (3, [0, 2, 4, 4]),
                (3, [2, 2, 4, 4]),
                (4, [0, 1, 3, 5]),
                (4, [0, 1, 3, 5]),
                (5, [0, 2, 2, 6]),
                (5, [0, 6, 6, 8]),
            ]
        );
        let s4 = entries
            .iter()
            .find(|e| e.gap_id.as_deref() == Some("PrimitiveGroup(4,2)"))
            .unwrap();
        assert!(permutation_isomorphic(&s4.group, &lookup("sym:4").unwrap().group).is_some());
        let flags = primitive_lemma_report(&entries, &Caps::default()).unwrap();
        assert!(flags
            .iter()
            .all(|f| f.three_regular_class && f.metabelian_class && f.abelian_class && f.asymmetric_4_coloring));
    }

    #[test]
    fn full_catalog_table() {
        let entries = enumerate_primitive_solvable(9, &Caps::default()).unwrap();
        let counts: Vec<usize> = (2..=9)
            .map(|d| entries.iter().filter(|e| e.degree == d).count())
            .collect();
        assert_eq!(counts, vec![1, 2, 2, 3, 0, 4, 2, 7]);
        check_entries(&entries).unwrap();
        let mut rows: Vec<(usize, [usize; 4])> =
            table1_report(&entries).into_iter().map(|r| (r.degree, r.ell)).collect();
        let mut expected = vec![
            (2, [1, 3, 3, 3]),
            (3, [2, 2, 4, 4]),
            (3, [0, 2, 4, 4]),
            (4, [0, 1, 3, 5]),
            (4, [0, 1, 3, 5]),
            (5, [0, 6, 6, 8]),
            (5, [0, 2, 2, 6]),
            (7, [2, 16, 16, 16]),
            (7, [4, 4, 10, 10]),
            (7, [0, 4, 6, 8]),
            (8, [3, 5, 5, 6]),
            (8, [0, 0, 3, 6]),
            (9, [0, 10, 10, 24]),
            (9, [4, 6, 6, 14]),
            (9, [4, 8, 8, 12]),
            (9, [0, 4, 4, 12]),
            (9, [0, 0, 4, 10]),
            (9, [0, 0, 4, 10]),
        ];
        rows.sort();
        expected.sort();
        assert_eq!(rows, expected);
        let pinned = |id: &str| entries.iter().find(|e| e.gap_id.as_deref() == Some(id)).unwrap();
        assert_eq!(pinned("PrimitiveGroup(8,2)").ell, [0, 0, 3, 6]);
        assert_eq!(pinned("PrimitiveGroup(9,7)").ell, [0, 0, 4, 10]);
        assert!(permutation_isomorphic(
            &pinned("PrimitiveGroup(8,2)").group,
            &lookup("agammal1:8").unwrap().group
        )
        .is_some());

        let flags = primitive_lemma_report(&entries, &Caps::default()).unwrap();
        for f in &flags {
            assert!(
                f.three_regular_class && f.metabelian_class && f.asymmetric_4_coloring,
                "{f:?}"
            );
            assert_eq!(f.abelian_class, f.name != "AGL2(3)", "{f:?}");
        }
        let agammal = flags.iter().find(|f| f.name == "AGammaL1(8)").unwrap();
        assert_eq!(agammal.two_regular, 0);
    }
}
