//! Actions on subsets and colorings: stabilizers, canonical forms and
//! orbit censuses.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bitset::{Coloring, Subset};
use crate::error::{Error, Result};
use crate::group::{DerivedLength, PermGroup};
use crate::orbit::Orbit;
use crate::perm::Permutation;
use crate::structure::{WreathFlavor, WreathStructure};
use crate::Caps;

/// Regularity levels reported by every census.
pub const ELL_LEVELS: [usize; 4] = [1, 2, 3, 6];

/// Orbit of `s` and its setwise stabilizer.
pub fn subset_orbit_stabilizer(g: &PermGroup, s: &Subset, caps: &Caps) -> Result<(Vec<Subset>, PermGroup)> {
    check_degree(g, s.degree())?;
    let act = |s: &Subset, p: &Permutation| s.image(p);
    let orbit = Orbit::explore(g, *s, act, caps.orbit)?;
    let stab = orbit.stabilizer(g, act);
    Ok((orbit.into_points(), stab))
}

pub fn subset_stabilizer(g: &PermGroup, s: &Subset, caps: &Caps) -> Result<PermGroup> {
    check_degree(g, s.degree())?;
    if s.is_empty() || s.len() == s.degree() {
        return Ok(g.clone());
    }
    let act = |s: &Subset, p: &Permutation| s.image(p);
    let orbit = Orbit::explore(g, *s, act, caps.orbit)?;
    Ok(orbit.stabilizer(g, act))
}

/// Stabilizer of a coloring, as the stabilizer of color class 0 inside
/// which class 1 is stabilized, and so on; the last class is then fixed.
pub fn coloring_stabilizer(g: &PermGroup, c: &Coloring, caps: &Caps) -> Result<PermGroup> {
    check_degree(g, c.degree())?;
    let mut h = g.clone();
    for j in 0..c.k().saturating_sub(1) {
        if h.is_trivial() {
            break;
        }
        h = subset_stabilizer(&h, &c.class(j), caps)?;
    }
    Ok(h)
}

/// Longest orbit on points.
pub fn max_orbit_length(h: &PermGroup) -> usize {
    h.max_orbit_length()
}

/// Lexicographically smallest coloring in the orbit of `c`, with an element
/// carrying `c` to it.
pub fn lex_min_coloring(g: &PermGroup, c: &Coloring, caps: &Caps) -> Result<(Coloring, Permutation)> {
    check_degree(g, c.degree())?;
    let orbit = Orbit::explore(g, c.clone(), |c, p| c.image(p), caps.orbit)?;
    let i = orbit.min_position();
    Ok((orbit.points()[i].clone(), orbit.transversal(g, i)))
}

/// Whether two colorings lie in one orbit, by exploring the orbit of `a`.
pub fn same_orbit(g: &PermGroup, a: &Coloring, b: &Coloring, caps: &Caps) -> Result<bool> {
    check_degree(g, a.degree())?;
    if a.degree() != b.degree() {
        return Ok(false);
    }
    let orbit = Orbit::explore(g, a.clone(), |c, p| c.image(p), caps.orbit)?;
    Ok(orbit.position(b).is_some())
}

fn check_degree(g: &PermGroup, n: usize) -> Result<()> {
    if g.degree() != n {
        return Err(Error::DegreeMismatch(g.degree(), n));
    }
    Ok(())
}

// Label vectors allow more than `MAX_COLORS` labels; block colorings built
// from class ids need that.
type Labels = Vec<u16>;

fn label_image(v: &Labels, p: &Permutation) -> Labels {
    let mut out = vec![0; v.len()];
    for (x, &c) in v.iter().enumerate() {
        out[p.apply(x)] = c;
    }
    out
}

struct Canon {
    rep: Labels,
    to_rep: Permutation,
    stab: PermGroup,
}

/// Canonical form: `rep` is the same for every member of an orbit, and
/// `labels^to_rep = rep`. With an imprimitive structure the work is done
/// block by block; otherwise by orbit enumeration (where `rep` is the
/// lexicographic minimum).
fn canon(g: &PermGroup, ws: Option<&WreathStructure>, labels: &[u16], caps: &Caps) -> Result<Canon> {
    match ws {
        Some(ws) if ws.flavor == WreathFlavor::Imprimitive => canon_imprimitive(ws, labels, caps),
        _ => {
            let orbit = Orbit::explore(g, labels.to_vec(), label_image, caps.orbit)?;
            let i = orbit.min_position();
            Ok(Canon {
                rep: orbit.points()[i].clone(),
                to_rep: orbit.transversal(g, i),
                stab: orbit.stabilizer(g, label_image),
            })
        }
    }
}

fn canon_imprimitive(ws: &WreathStructure, labels: &[u16], caps: &Caps) -> Result<Canon> {
    let (m, b) = (ws.m(), ws.b());
    let degree = m * b;
    if labels.len() != degree {
        return Err(Error::DegreeMismatch(degree, labels.len()));
    }
    let mut cache: HashMap<&[u16], Canon> = HashMap::new();
    for w in 0..m {
        let block = &labels[w * b..(w + 1) * b];
        if !cache.contains_key(block) {
            let c = canon(&ws.bottom, ws.bottom_structure.as_deref(), block, caps)?;
            cache.insert(block, c);
        }
    }
    let blocks: Vec<&Canon> = (0..m).map(|w| &cache[&labels[w * b..(w + 1) * b]]).collect();
    let mut distinct: Vec<&Labels> = blocks.iter().map(|c| &c.rep).collect();
    distinct.sort();
    distinct.dedup();
    let id_of = |r: &Labels| distinct.binary_search(&r).expect("present") as u16;
    let x: Labels = blocks.iter().map(|c| id_of(&c.rep)).collect();
    let top = canon(&ws.top, ws.top_structure.as_deref(), &x, caps)?;

    let mut rep = Vec::with_capacity(degree);
    for &id in &top.rep {
        rep.extend_from_slice(distinct[id as usize]);
    }
    let t: Vec<Permutation> = blocks.iter().map(|c| c.to_rep.clone()).collect();
    let to_rep = ws.element(&t, &top.to_rep);

    let id_b = Permutation::identity(b);
    let id_m = Permutation::identity(m);
    let mut gens = Vec::new();
    for (w, c) in blocks.iter().enumerate() {
        for h in c.stab.generators() {
            let mut f = vec![id_b.clone(); m];
            f[w] = h.clone();
            gens.push(ws.element(&f, &id_m));
        }
    }
    for tau in top.stab.generators() {
        let f: Vec<Permutation> = (0..m).map(|w| t[w].mul_inv(&t[tau.apply(w)])).collect();
        gens.push(ws.element(&f, tau));
    }
    Ok(Canon {
        rep,
        to_rep,
        stab: PermGroup::new(degree, gens)?,
    })
}

fn structure_for(ws: Option<&WreathStructure>) -> Result<&WreathStructure> {
    match ws {
        Some(ws) if ws.flavor == WreathFlavor::Imprimitive => Ok(ws),
        _ => Err(Error::StructureMissing),
    }
}

/// Exact stabilizer of a coloring in an imprimitive wreath product, built
/// from per-block stabilizers and lifts of the block-coloring stabilizer.
pub fn imprimitive_coloring_stabilizer(ws: Option<&WreathStructure>, c: &Coloring, caps: &Caps) -> Result<PermGroup> {
    let ws = structure_for(ws)?;
    let labels: Labels = c.colors().iter().map(|&x| x as u16).collect();
    Ok(canon_imprimitive(ws, &labels, caps)?.stab)
}

pub fn imprimitive_subset_stabilizer(ws: Option<&WreathStructure>, s: &Subset, caps: &Caps) -> Result<PermGroup> {
    imprimitive_coloring_stabilizer(ws, &s.to_coloring(), caps)
}

/// Orbit invariant under an imprimitive wreath product (not necessarily the
/// lexicographic minimum), with an element carrying `c` to it.
pub fn imprimitive_canonical_form(
    ws: Option<&WreathStructure>,
    c: &Coloring,
    caps: &Caps,
) -> Result<(Coloring, Permutation)> {
    let ws = structure_for(ws)?;
    let labels: Labels = c.colors().iter().map(|&x| x as u16).collect();
    let canon = canon_imprimitive(ws, &labels, caps)?;
    let colors = canon.rep.iter().map(|&x| x as u8).collect();
    Ok((Coloring::new(colors, c.k())?, canon.to_rep))
}

/// Canonical orbit representative with a carrying element: structural for
/// an imprimitive wreath product, the lexicographic minimum otherwise.
pub fn canonical_form(
    g: &PermGroup,
    ws: Option<&WreathStructure>,
    c: &Coloring,
    caps: &Caps,
) -> Result<(Coloring, Permutation)> {
    match ws {
        Some(ws) if ws.flavor == WreathFlavor::Imprimitive => imprimitive_canonical_form(Some(ws), c, caps),
        _ => lex_min_coloring(g, c, caps),
    }
}

/// Stabilizer of `c` in `g`, through the wreath structure when one is known
/// and by orbit enumeration otherwise.
pub fn stabilizer(g: &PermGroup, ws: Option<&WreathStructure>, c: &Coloring, caps: &Caps) -> Result<PermGroup> {
    match ws {
        Some(ws) if ws.flavor == WreathFlavor::Imprimitive => imprimitive_coloring_stabilizer(Some(ws), c, caps),
        _ => coloring_stabilizer(g, c, caps),
    }
}

/// A class of colorings under the group.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitClass {
    /// Lexicographically smallest member.
    pub rep: Vec<u8>,
    pub orbit_size: u64,
    #[serde(serialize_with = "as_string")]
    pub stab_order: BigUint,
    pub max_orbit_length: usize,
    pub derived_length: DerivedLength,
    #[serde(skip)]
    pub stabilizer: PermGroup,
}

impl OrbitClass {
    pub fn coloring(&self, k: usize) -> Coloring {
        Coloring::new(self.rep.clone(), k).expect("census colorings are valid")
    }
}

fn as_string<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Every orbit of the group on `k`-colorings.
#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    pub group: String,
    pub k: usize,
    pub classes: Vec<OrbitClass>,
    pub ell: BTreeMap<String, usize>,
}

impl CensusReport {
    /// Number of classes whose stabilizer has all orbits of length at most `i`.
    pub fn ell(&self, i: usize) -> usize {
        self.classes.iter().filter(|c| c.max_orbit_length <= i).count()
    }

    /// Classes with stabilizer orbits of length at most `i`.
    pub fn regular(&self, i: usize) -> impl Iterator<Item = &OrbitClass> {
        self.classes.iter().filter(move |c| c.max_orbit_length <= i)
    }

    pub fn total_colorings(&self) -> u128 {
        self.classes.iter().map(|c| c.orbit_size as u128).sum()
    }

    /// Position of the class containing the lexicographically minimal `rep`.
    pub fn class_of_rep(&self, rep: &[u8]) -> Option<usize> {
        self.classes.binary_search_by(|c| c.rep.as_slice().cmp(rep)).ok()
    }
}

fn space_size(n: usize, k: usize, caps: &Caps) -> Result<u64> {
    let size = (k as u128).checked_pow(n as u32).filter(|&s| s <= caps.space as u128);
    match size {
        Some(s) => Ok(s as u64),
        None => Err(Error::SpaceCapExceeded {
            size: format!("{k}^{n}"),
            cap: caps.space,
        }),
    }
}

/// Walks the whole space of `k`-colorings, reporting `(lex-min index,
/// orbit size)` for each orbit in increasing order of representative.
fn scan_orbits(g: &PermGroup, k: usize, caps: &Caps) -> Result<Vec<(u64, u64)>> {
    let n = g.degree();
    if k == 0 {
        return Err(Error::InvalidColoring("zero colors".into()));
    }
    let size = space_size(n, k, caps)?;
    let kk = k as u64;
    let weights: Vec<u64> = (0..n).map(|x| kk.pow((n - 1 - x) as u32)).collect();
    let tables: Vec<Vec<u64>> = g
        .generators()
        .iter()
        .map(|p| (0..n).map(|x| weights[p.apply(x)]).collect())
        .collect();
    let mut visited = vec![0u64; (size as usize).div_ceil(64)];
    let mut classes = Vec::new();
    let mut queue: Vec<u64> = Vec::new();
    let mut digits = vec![0u64; n];
    for start in 0..size {
        if visited[(start >> 6) as usize] >> (start & 63) & 1 == 1 {
            continue;
        }
        visited[(start >> 6) as usize] |= 1 << (start & 63);
        queue.clear();
        queue.push(start);
        let mut head = 0;
        while head < queue.len() {
            let mut cur = queue[head];
            head += 1;
            for d in digits.iter_mut().rev() {
                *d = cur % kk;
                cur /= kk;
            }
            for table in &tables {
                let img: u64 = digits.iter().zip(table).map(|(d, w)| d * w).sum();
                let (word, bit) = ((img >> 6) as usize, img & 63);
                if visited[word] >> bit & 1 == 0 {
                    visited[word] |= 1 << bit;
                    queue.push(img);
                }
            }
        }
        classes.push((start, queue.len() as u64));
    }
    Ok(classes)
}

/// Number of orbits on `k`-colorings.
pub fn count_orbits(g: &PermGroup, k: usize, caps: &Caps) -> Result<usize> {
    Ok(scan_orbits(g, k, caps)?.len())
}

/// Number of orbits on the power set.
pub fn power_set_orbit_count(g: &PermGroup, caps: &Caps) -> Result<usize> {
    count_orbits(g, 2, caps)
}

/// Classifies all `k`-colorings into orbits, with stabilizer invariants.
pub fn coloring_census(g: &PermGroup, name: &str, k: usize, caps: &Caps) -> Result<CensusReport> {
    let n = g.degree();
    let scan = scan_orbits(g, k, caps)?;
    let order = g.order();
    let classes = scan
        .par_iter()
        .map(|&(index, orbit_size)| {
            let c = Coloring::from_index(index, n, k)?;
            let stab_order = &order / BigUint::from(orbit_size);
            let stabilizer = if stab_order.is_one() {
                PermGroup::trivial(n)
            } else {
                coloring_stabilizer(g, &c, caps)?
            };
            if stabilizer.order() != stab_order {
                return Err(Error::PropertyViolation(format!(
                    "orbit-stabilizer fails for {:?}",
                    c.colors()
                )));
            }
            Ok(OrbitClass {
                rep: c.colors().to_vec(),
                orbit_size,
                stab_order,
                max_orbit_length: stabilizer.max_orbit_length(),
                derived_length: stabilizer.derived_length(),
                stabilizer,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = CensusReport {
        group: name.to_string(),
        k,
        classes,
        ell: BTreeMap::new(),
    };
    for i in ELL_LEVELS {
        report.ell.insert(i.to_string(), report.ell(i));
    }
    let total: u128 = report.total_colorings();
    if total != (k as u128).pow(n as u32) {
        return Err(Error::PropertyViolation(format!("census covers {total} colorings")));
    }
    Ok(report)
}

/// Number of orbits of `i`-asymmetric `k`-colorings.
pub fn ell(g: &PermGroup, k: usize, i: usize, caps: &Caps) -> Result<usize> {
    Ok(coloring_census(g, "", k, caps)?.ell(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::lookup;
    use crate::testutil::{brute_coloring_stabilizer, brute_set_stabilizer, builtin, closure, max_orbit_of_elements};
    use proptest::prelude::*;

    fn caps() -> Caps {
        Caps::default()
    }

    fn subset(n: usize, pts: &[usize]) -> Subset {
        Subset::from_points(n, pts).unwrap()
    }

    #[test]
    fn subset_stabilizers() {
        let s4 = builtin("sym:4");
        let (orbit, stab) = subset_orbit_stabilizer(&s4, &subset(4, &[0, 1]), &caps()).unwrap();
        assert_eq!(orbit.len(), 6);
        assert_eq!(stab.order(), BigUint::from(4u32));
        assert_eq!(stab.orbits(), vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(max_orbit_length(&stab), 2);

        let (orbit, stab) = subset_orbit_stabilizer(&s4, &Subset::empty(4), &caps()).unwrap();
        assert_eq!(orbit.len(), 1);
        assert!(stab.same_group(&s4));

        let f20 = builtin("agl1:5");
        let (orbit, stab) = subset_orbit_stabilizer(&f20, &subset(5, &[0]), &caps()).unwrap();
        assert_eq!(orbit.len(), 5);
        assert_eq!(stab.order(), BigUint::from(4u32));
        assert_eq!(brute_set_stabilizer(&f20, &subset(5, &[0])).len(), 4);
    }

    #[test]
    fn coloring_stabilizers() {
        let s3 = builtin("sym:3");
        let c = Coloring::new(vec![0, 1, 2], 3).unwrap();
        assert!(coloring_stabilizer(&s3, &c, &caps()).unwrap().is_trivial());
        let s4 = builtin("sym:4");
        let c = Coloring::new(vec![0, 0, 1, 1], 2).unwrap();
        let stab = coloring_stabilizer(&s4, &c, &caps()).unwrap();
        assert_eq!(stab.order(), BigUint::from(4u32));
        assert_eq!(brute_coloring_stabilizer(&s4, c.colors()).len(), 4);
        let c = Coloring::constant(4, 3).unwrap();
        assert!(coloring_stabilizer(&s4, &c, &caps()).unwrap().same_group(&s4));
    }

    #[test]
    fn max_orbit_examples() {
        assert_eq!(max_orbit_length(&PermGroup::trivial(5)), 1);
        assert_eq!(max_orbit_length(&builtin("cyc:7")), 7);
    }

    #[test]
    fn imprimitive_small_wreath() {
        let r = lookup("wr_imp(sym:2,sym:2)").unwrap();
        let ws = r.structure.as_ref();
        let stab = imprimitive_subset_stabilizer(ws, &subset(4, &[0]), &caps()).unwrap();
        assert_eq!(stab.order(), BigUint::from(2u32));
        let full = imprimitive_subset_stabilizer(ws, &Subset::full(4), &caps()).unwrap();
        assert!(full.same_group(&r.group));
        assert_eq!(
            imprimitive_subset_stabilizer(None, &subset(4, &[0]), &caps()).unwrap_err(),
            Error::StructureMissing
        );
    }

    #[test]
    fn imprimitive_matches_brute_force_on_every_subset() {
        for spec in [
            "wr_imp(sym:2,sym:2)",
            "wr_imp(sym:3,sym:2)",
            "wr_imp(sym:2,sym:3)",
            "wr_imp(cyc:3,cyc:3)",
            "wr_imp(wr_imp(sym:2,sym:2),sym:2)",
            "wr_imp(sym:2,wr_imp(sym:2,sym:2))",
        ] {
            let r = lookup(spec).unwrap();
            let n = r.group.degree();
            let elements: Vec<Permutation> = closure(&r.group).into_iter().collect();
            for mask in 0u32..1 << n {
                let pts: Vec<usize> = (0..n).filter(|x| mask >> x & 1 == 1).collect();
                let s = subset(n, &pts);
                let fast = imprimitive_subset_stabilizer(r.structure.as_ref(), &s, &caps()).unwrap();
                let brute: Vec<Permutation> = elements.iter().filter(|p| s.image(p) == s).cloned().collect();
                assert_eq!(fast.order(), BigUint::from(brute.len()), "{spec} {pts:?}");
                assert!(brute.iter().all(|p| fast.has(p)));
                assert_eq!(fast.max_orbit_length(), max_orbit_of_elements(n, &brute));
            }
        }
    }

    #[test]
    fn imprimitive_canonical_form_is_an_orbit_invariant() {
        let r = lookup("wr_imp(sym:3,wr_imp(sym:2,sym:2))").unwrap();
        let ws = r.structure.as_ref();
        let mut rng = rand::thread_rng();
        for seed in 0u64..40 {
            let colors: Vec<u8> = (0..12).map(|x| ((seed * 7 + x * x * 3) % 3) as u8).collect();
            let c = Coloring::new(colors, 3).unwrap();
            let g = r.group.random_element(&mut rng);
            let (ca, ta) = imprimitive_canonical_form(ws, &c, &caps()).unwrap();
            let (cb, _) = imprimitive_canonical_form(ws, &c.image(&g), &caps()).unwrap();
            assert_eq!(ca, cb);
            assert_eq!(c.image(&ta), ca);
            assert!(r.group.has(&ta));
        }
    }

    #[test]
    fn census_of_sym4() {
        let r = coloring_census(&builtin("sym:4"), "sym:4", 2, &caps()).unwrap();
        assert_eq!(r.classes.len(), 5);
        let row: Vec<usize> = ELL_LEVELS.iter().map(|&i| r.ell(i)).collect();
        assert_eq!(row, vec![0, 1, 3, 5]);
        assert_eq!(r.ell["6"], 5);
        assert_eq!(r.classes[0].rep, vec![0, 0, 0, 0]);
        assert_eq!(r.classes[1].rep, vec![0, 0, 0, 1]);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["classes"][0]["stab_order"], "24");
        assert_eq!(json["ell"]["3"], 3);
    }

    #[test]
    fn census_small_cases() {
        let r = coloring_census(&builtin("sym:2"), "sym:2", 2, &caps()).unwrap();
        let row: Vec<usize> = ELL_LEVELS.iter().map(|&i| r.ell(i)).collect();
        assert_eq!(row, vec![1, 3, 3, 3]);
        let r = coloring_census(&builtin("trivial:1"), "trivial:1", 2, &caps()).unwrap();
        assert_eq!((r.classes.len(), r.ell(1)), (2, 2));
        let r = coloring_census(&builtin("agammal1:8"), "agammal1:8", 2, &caps()).unwrap();
        let row: Vec<usize> = ELL_LEVELS.iter().map(|&i| r.ell(i)).collect();
        assert_eq!(row, vec![0, 0, 3, 6]);
        assert_eq!(ell(&builtin("agl2:3"), 2, 6, &caps()).unwrap(), 10);
        let l32 = ell(&builtin("sym:3"), 3, 2, &caps()).unwrap();
        assert_eq!(l32, 7);
        assert_eq!(ell(&builtin("sym:3"), 1, 1, &caps()).unwrap(), 0);
        assert_eq!(ell(&builtin("trivial:1"), 1, 1, &caps()).unwrap(), 1);
    }

    #[test]
    fn census_space_cap() {
        let tight = Caps {
            orbit: 1 << 22,
            space: 100,
        };
        assert!(matches!(
            coloring_census(&builtin("sym:7"), "sym:7", 2, &tight),
            Err(Error::SpaceCapExceeded { .. })
        ));
    }

    #[test]
    fn power_set_counts() {
        assert_eq!(power_set_orbit_count(&builtin("sym:4"), &caps()).unwrap(), 5);
        assert!(power_set_orbit_count(&builtin("agl2:3"), &caps()).unwrap() >= 10);
        assert_eq!(power_set_orbit_count(&builtin("trivial:2"), &caps()).unwrap(), 4);
    }

    #[test]
    fn census_matches_brute_force_classes() {
        let g = builtin("wr_imp(sym:2,sym:3)");
        let elements: Vec<Permutation> = closure(&g).into_iter().collect();
        let r = coloring_census(&g, "", 3, &caps()).unwrap();
        for class in &r.classes {
            let brute = brute_coloring_stabilizer(&g, &class.rep);
            assert_eq!(class.stab_order, BigUint::from(brute.len()));
            assert_eq!(class.max_orbit_length, max_orbit_of_elements(6, &brute));
            let orbit: std::collections::HashSet<Coloring> =
                elements.iter().map(|p| class.coloring(3).image(p)).collect();
            assert_eq!(orbit.len() as u64, class.orbit_size);
            assert_eq!(orbit.iter().min().unwrap().colors(), class.rep.as_slice());
        }
    }

    #[test]
    fn census_is_monotone() {
        for spec in ["sym:3", "agl1:5", "cyc:4", "wr_imp(sym:2,sym:2)"] {
            let g = builtin(spec);
            let mut prev: Option<Vec<usize>> = None;
            for k in 1..=4 {
                let r = coloring_census(&g, spec, k, &caps()).unwrap();
                let row: Vec<usize> = ELL_LEVELS.iter().map(|&i| r.ell(i)).collect();
                assert!(row.windows(2).all(|w| w[0] <= w[1]), "{spec} k={k}");
                if let Some(p) = &prev {
                    assert!(p.iter().zip(&row).all(|(a, b)| a <= b), "{spec} k={k}");
                }
                prev = Some(row);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn orbit_stabilizer_on_subsets(mask in 0u32..1 << 9, which in 0usize..4) {
            let spec = ["agl2:3", "sym:5", "wr_imp(sym:3,sym:3)", "wr_imp(sym:2,cyc:4)"][which];
            let g = builtin(spec);
            let n = g.degree();
            let pts: Vec<usize> = (0..n).filter(|x| mask >> x & 1 == 1).collect();
            let s = subset(n, &pts);
            let (orbit, stab) = subset_orbit_stabilizer(&g, &s, &caps()).unwrap();
            prop_assert_eq!(BigUint::from(orbit.len()) * stab.order(), g.order());
            for p in stab.generators() {
                prop_assert_eq!(s.image(p), s);
            }
        }

        #[test]
        fn stabilizer_routes_agree(colors in proptest::collection::vec(0u8..3, 9)) {
            let r = lookup("wr_imp(sym:3,cyc:3)").unwrap();
            let c = Coloring::new(colors, 3).unwrap();
            let fast = stabilizer(&r.group, r.structure.as_ref(), &c, &caps()).unwrap();
            let slow = coloring_stabilizer(&r.group, &c, &caps()).unwrap();
            prop_assert!(fast.same_group(&slow));
        }
    }
}
