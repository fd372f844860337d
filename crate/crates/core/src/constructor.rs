//! Recursive construction of subsets and 3-colorings with small-orbit
//! stabilizers, together with checkable certificates.
//!
//! The engine follows the block structure of the group: intransitive groups
//! are handled orbit by orbit, primitive groups by exhaustive census (or
//! seeded sampling when the coloring space is too large), and imprimitive
//! groups by combining colorings of the block constituent `B` along a
//! coloring of the block action `A`.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::actions::{self, coloring_census, coloring_stabilizer, imprimitive_canonical_form, lex_min_coloring};
use crate::bitset::{Coloring, Subset};
use crate::error::{Error, Result};
use crate::group::{DerivedLength, PermGroup};
use crate::perm::Permutation;
use crate::structure::{
    is_primitive, maximal_block_system, wreath_imprimitive, BlockEmbedding, WreathFlavor, WreathStructure,
};
use crate::Caps;

/// Largest number of classes a family is asked for.
pub const MAX_WANT: usize = 5;

const SAMPLE_ATTEMPTS: usize = 20_000;

/// Caps and the seed used whenever a primitive group is too large for a census.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Params {
    pub caps: Caps,
    pub seed: u64,
}

/// How pairwise inequivalence of a family was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Inequivalence {
    /// Checked by comparing canonical forms.
    Verified,
    /// Guaranteed by the construction but not rechecked.
    Constructed,
}

/// Colorings of one domain, pairwise in different orbits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringFamily {
    pub colorings: Vec<Coloring>,
    pub pairwise_inequivalent: Inequivalence,
}

impl ColoringFamily {
    pub fn len(&self) -> usize {
        self.colorings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colorings.is_empty()
    }

    /// Members read as subsets (points of color 1).
    pub fn subsets(&self) -> Vec<Subset> {
        self.colorings.iter().map(|c| c.class(1)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// A single point.
    Point,
    Intransitive,
    PrimitiveCensus,
    PrimitiveSampled,
    /// Blocks of size at least 4: five good subsets of `B`, asymmetric
    /// 5-colorings of `A`.
    BlocksLarge,
    /// Blocks of size 2: the three subset classes of `B`, 3-asymmetric
    /// 3-colorings of `A`.
    BlocksOfTwo,
    /// Blocks of size 3: the four subset classes of `B`, 2-asymmetric
    /// 4-colorings of `A`.
    BlocksOfThree,
    /// 3-colorings: five 2-asymmetric 3-colorings of `B`, asymmetric
    /// 5-colorings of `A`.
    BlocksThreeColor,
}

/// One level of the recursion that produced a coloring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub depth: usize,
    pub case: Case,
    pub degree: usize,
    /// Number of blocks, or of orbits in the intransitive case.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_size: Option<usize>,
    /// Coloring of the blocks used to combine the block colorings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_coloring: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl TraceStep {
    fn new(depth: usize, case: Case, degree: usize) -> Self {
        TraceStep {
            depth,
            case,
            degree,
            blocks: None,
            block_size: None,
            block_coloring: None,
            seed: None,
        }
    }
}

/// A coloring together with its stabilizer and the invariants claimed for it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub coloring: Coloring,
    #[serde(rename = "stab_gens")]
    pub stabilizer_generators: Vec<Permutation>,
    pub max_orbit_length: usize,
    pub derived_length: DerivedLength,
    #[serde(rename = "elem_abelian_2")]
    pub elementary_abelian_2: bool,
    pub trace: Vec<TraceStep>,
}

impl Certificate {
    fn build(
        g: &PermGroup,
        structure: Option<&WreathStructure>,
        c: Coloring,
        trace: Vec<TraceStep>,
        caps: &Caps,
    ) -> Result<Self> {
        let stab = stabilizer_of(g, structure, &c, caps)?;
        Ok(Certificate {
            coloring: c,
            stabilizer_generators: stab.generators().to_vec(),
            max_orbit_length: stab.max_orbit_length(),
            derived_length: stab.derived_length(),
            elementary_abelian_2: stab.is_elementary_abelian_2(),
            trace,
        })
    }

    pub fn stabilizer(&self) -> Result<PermGroup> {
        PermGroup::new(self.coloring.degree(), self.stabilizer_generators.clone())
    }
}

/// A family with one certificate per member.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Construction {
    pub family: ColoringFamily,
    pub certificates: Vec<Certificate>,
}

/// `Z(b, j) = Y_{X(b)}(j)` on the imprimitive wreath indexing `b * |B| + j`.
pub fn combine_colorings(x: &Coloring, ys: &[Coloring], structure: &WreathStructure) -> Result<Coloring> {
    if structure.flavor != WreathFlavor::Imprimitive {
        return Err(Error::ArityMismatch("combining needs an imprimitive wreath".into()));
    }
    let (m, b) = (structure.m(), structure.b());
    if x.degree() != m {
        return Err(Error::ArityMismatch(format!(
            "block coloring has degree {}, expected {m}",
            x.degree()
        )));
    }
    let points: Vec<Vec<usize>> = (0..m).map(|w| (w * b..(w + 1) * b).collect()).collect();
    combine_on(&points, x, ys)
}

fn combine_on(points: &[Vec<usize>], x: &Coloring, ys: &[Coloring]) -> Result<Coloring> {
    if ys.len() != x.k() {
        return Err(Error::ArityMismatch(format!(
            "{} block colorings for {} colors",
            ys.len(),
            x.k()
        )));
    }
    let b = points.first().map_or(0, Vec::len);
    let y = ys.first().map_or(1, Coloring::k);
    if let Some(bad) = ys.iter().find(|c| c.degree() != b || c.k() != y) {
        return Err(Error::ArityMismatch(format!(
            "block coloring of degree {} with {} colors, expected {b} and {y}",
            bad.degree(),
            bad.k()
        )));
    }
    let mut colors = vec![0u8; points.len() * b];
    for (w, pts) in points.iter().enumerate() {
        let yi = &ys[x.get(w)];
        for (j, &p) in pts.iter().enumerate() {
            colors[p] = yi.colors()[j];
        }
    }
    Coloring::new(colors, y)
}

/// Checks that the stabilizer of `z` in the full wreath product fits in
/// `(prod_b Stab_B(Y_{X(b)})) x| Stab_A(X)`: its order divides the order of
/// that semidirect product and its orbits are no longer than the longest
/// `B`-orbit times the longest `A`-orbit.
///
/// Colors of `X` whose block colorings lie in one `B`-orbit are merged
/// first; for pairwise inequivalent `Y_i` this changes nothing.
pub fn stab_embedding_check(
    structure: &WreathStructure,
    x: &Coloring,
    ys: &[Coloring],
    z: &Coloring,
    caps: &Caps,
) -> Result<bool> {
    if structure.flavor != WreathFlavor::Imprimitive {
        return Err(Error::StructureMissing);
    }
    if z.degree() != structure.degree() || x.degree() != structure.m() || ys.len() != x.k() {
        return Err(Error::ArityMismatch(
            "coloring sizes do not match the wreath product".into(),
        ));
    }
    let sz = actions::imprimitive_coloring_stabilizer(Some(structure), z, caps)?;
    let mut reps: Vec<Coloring> = Vec::new();
    let mut merged_color = Vec::with_capacity(ys.len());
    for y in ys {
        let (rep, _) = actions::canonical_form(&structure.bottom, structure.bottom_structure.as_deref(), y, caps)?;
        let id = reps.iter().position(|r| *r == rep).unwrap_or_else(|| {
            reps.push(rep);
            reps.len() - 1
        });
        merged_color.push(id as u8);
    }
    let merged = Coloring::new(x.colors().iter().map(|&c| merged_color[c as usize]).collect(), x.k())?;
    let sx = actions::stabilizer(&structure.top, structure.top_structure.as_deref(), &merged, caps)?;
    let sys = ys
        .iter()
        .map(|y| actions::stabilizer(&structure.bottom, structure.bottom_structure.as_deref(), y, caps))
        .collect::<Result<Vec<_>>>()?;
    let mut bound = sx.order();
    for w in 0..structure.m() {
        bound *= sys[x.get(w)].order();
    }
    let divides = (&bound % sz.order()).is_zero();
    let longest_b = sys.iter().map(PermGroup::max_orbit_length).max().unwrap_or(1);
    let orbits_ok = sz.max_orbit_length() <= longest_b * sx.max_orbit_length();
    Ok(divides && orbits_ok)
}

/// `want` pairwise inequivalent `k`-colorings whose stabilizers have all
/// orbits of length at most `i`, least orbit length first.
pub fn asymmetric_colorings(a: &PermGroup, k: usize, i: usize, want: usize, params: &Params) -> Result<ColoringFamily> {
    let mut engine = Engine::new(Kind::Good, params);
    let (found, _) = engine.regular_classes(a, k, i, want)?;
    if found.len() < want {
        return Err(Error::SearchExhausted(format!(
            "only {} classes of {i}-asymmetric {k}-colorings",
            found.len()
        )));
    }
    Ok(ColoringFamily {
        colorings: found,
        pairwise_inequivalent: Inequivalence::Verified,
    })
}

/// Up to `want` (at most 5) pairwise inequivalent subsets whose
/// stabilizers have all orbits of length at most 6. Fewer are returned only
/// on at most 3 points, where fewer classes exist.
pub fn good_subsets(
    g: &PermGroup,
    structure: Option<&WreathStructure>,
    want: usize,
    params: &Params,
) -> Result<Construction> {
    construct(Kind::Good, g, structure, want, params)
}

/// Up to `want` pairwise inequivalent 3-colorings whose stabilizers have
/// all orbits of length at most 2.
pub fn three_colorings_2asym(
    g: &PermGroup,
    structure: Option<&WreathStructure>,
    want: usize,
    params: &Params,
) -> Result<Construction> {
    construct(Kind::ThreeColor, g, structure, want, params)
}

/// A 3-coloring whose stabilizer is an elementary abelian 2-group.
pub fn three_coloring_2asym(
    g: &PermGroup,
    structure: Option<&WreathStructure>,
    params: &Params,
) -> Result<Certificate> {
    let mut c = three_colorings_2asym(g, structure, 1, params)?;
    Ok(c.certificates.swap_remove(0))
}

fn construct(
    kind: Kind,
    g: &PermGroup,
    structure: Option<&WreathStructure>,
    want: usize,
    params: &Params,
) -> Result<Construction> {
    let n = g.degree();
    if want > MAX_WANT {
        return Err(Error::InvalidInstance(format!(
            "at most {MAX_WANT} classes can be requested"
        )));
    }
    if n == 0 || (kind == Kind::ThreeColor && n < 2) {
        return Err(Error::InvalidInstance(format!("degree {n} is too small")));
    }
    if !g.is_solvable() {
        return Err(Error::NotSolvable);
    }
    if let Some(ws) = structure {
        if ws.degree() != n {
            return Err(Error::DegreeMismatch(n, ws.degree()));
        }
    }
    let mut engine = Engine::new(kind, params);
    let mut built = engine.family(g, want, 0)?;
    if built.len() < want && n > 3 {
        return Err(Error::SearchExhausted(format!(
            "found {} of {want} classes on {n} points",
            built.len()
        )));
    }
    built.truncate(want);

    let caps = params.caps;
    let certificates = built
        .into_par_iter()
        .map(|b| {
            let cert = Certificate::build(g, structure, b.coloring, b.trace, &caps)?;
            kind.check(&cert)?;
            Ok(cert)
        })
        .collect::<Result<Vec<_>>>()?;
    let colorings: Vec<Coloring> = certificates.iter().map(|c| c.coloring.clone()).collect();
    let pairwise_inequivalent = check_inequivalent(g, structure, &colorings, &caps)?;
    Ok(Construction {
        family: ColoringFamily {
            colorings,
            pairwise_inequivalent,
        },
        certificates,
    })
}

fn check_inequivalent(
    g: &PermGroup,
    structure: Option<&WreathStructure>,
    colorings: &[Coloring],
    caps: &Caps,
) -> Result<Inequivalence> {
    let mut keys = HashSet::new();
    for c in colorings {
        match canonical_key(g, structure, c, caps) {
            Ok(key) => {
                if !keys.insert(key) {
                    return Err(Error::PropertyViolation(format!("{:?} repeats an orbit", c.colors())));
                }
            }
            Err(e) if e.is_cap() => return Ok(Inequivalence::Constructed),
            Err(e) => return Err(e),
        }
    }
    Ok(Inequivalence::Verified)
}

/// A canonical orbit representative (not necessarily the lexicographic minimum).
fn canonical_key(g: &PermGroup, structure: Option<&WreathStructure>, c: &Coloring, caps: &Caps) -> Result<Coloring> {
    if let Some(ws) = structure.filter(|ws| ws.flavor == WreathFlavor::Imprimitive) {
        return Ok(imprimitive_canonical_form(Some(ws), c, caps)?.0);
    }
    if let Some(d) = discover(g)?.filter(|d| d.full) {
        return Ok(imprimitive_canonical_form(Some(&d.ws), &c.image(&d.relabel), caps)?.0);
    }
    Ok(lex_min_coloring(g, c, caps)?.0)
}

/// Re-derives the stabilizer of the certified coloring and compares every
/// claimed invariant.
pub fn verify_certificate(
    g: &PermGroup,
    structure: Option<&WreathStructure>,
    cert: &Certificate,
    caps: &Caps,
) -> Result<bool> {
    let c = &cert.coloring;
    if c.degree() != g.degree() {
        return Ok(false);
    }
    for s in &cert.stabilizer_generators {
        if s.degree() != g.degree() || !g.contains(s)? || !c.is_fixed_by(s) {
            return Ok(false);
        }
    }
    let claimed = cert.stabilizer()?;
    // the claimed generators fix `c`, so |G : claimed| bounds the orbit of `c`
    let orbit_bound = g.order() / claimed.order();
    let recomputed = if orbit_bound > BigUint::from(caps.orbit) {
        stabilizer_of(g, None, c, caps).or_else(|_| stabilizer_of(g, structure, c, caps))?
    } else {
        match coloring_stabilizer(g, c, caps) {
            Err(e) if e.is_cap() => stabilizer_of(g, structure, c, caps)?,
            other => other?,
        }
    };
    Ok(claimed.same_group(&recomputed)
        && recomputed.max_orbit_length() == cert.max_orbit_length
        && recomputed.derived_length() == cert.derived_length
        && recomputed.is_elementary_abelian_2() == cert.elementary_abelian_2)
}

/// Stabilizer of `c` in `g`, using the wreath structure of `g` when it is
/// declared or can be recognised, the orbit decomposition when `g` is
/// intransitive, and orbit enumeration otherwise.
pub fn stabilizer_of(
    g: &PermGroup,
    structure: Option<&WreathStructure>,
    c: &Coloring,
    caps: &Caps,
) -> Result<PermGroup> {
    if c.degree() != g.degree() {
        return Err(Error::DegreeMismatch(g.degree(), c.degree()));
    }
    if let Some(ws) = structure.filter(|ws| ws.flavor == WreathFlavor::Imprimitive) {
        return actions::imprimitive_coloring_stabilizer(Some(ws), c, caps);
    }
    let n = g.degree();
    if n <= 1 || g.is_trivial() {
        return Ok(PermGroup::trivial(n));
    }
    if !g.is_transitive() {
        let mut gens = Vec::new();
        let mut product_order = BigUint::from(1u32);
        for orbit in g.orbits() {
            let h = g.restrict_to(&orbit)?;
            product_order *= h.order();
            let local = Coloring::new(orbit.iter().map(|&x| c.colors()[x]).collect(), c.k())?;
            for s in stabilizer_of(&h, None, &local, caps)?.generators() {
                let mut images: Vec<usize> = (0..n).collect();
                for (i, &x) in orbit.iter().enumerate() {
                    images[x] = orbit[s.apply(i)];
                }
                gens.push(Permutation::from_images(&images)?);
            }
        }
        let bound = PermGroup::new(n, gens)?;
        return if product_order == g.order() {
            Ok(bound)
        } else {
            intersect(g, &bound, c, caps)
        };
    }
    match discover(g)? {
        Some(d) => {
            let s = actions::imprimitive_coloring_stabilizer(Some(&d.ws), &c.image(&d.relabel), caps)?;
            let gens = s
                .generators()
                .iter()
                .map(|p| d.relabel.mul(p).mul_inv(&d.relabel))
                .collect();
            let bound = PermGroup::new(n, gens)?;
            if d.full {
                Ok(bound)
            } else {
                intersect(g, &bound, c, caps)
            }
        }
        None => coloring_stabilizer(g, c, caps),
    }
}

/// `g` intersected with an overgroup `bound` of the stabilizer.
fn intersect(g: &PermGroup, bound: &PermGroup, c: &Coloring, caps: &Caps) -> Result<PermGroup> {
    if bound.order() <= BigUint::from(caps.orbit) {
        Ok(PermGroup::generated_by(
            g.degree(),
            bound.elements().filter(|p| g.has(p)),
        ))
    } else {
        coloring_stabilizer(g, c, caps)
    }
}

/// A transitive imprimitive group relabelled into `B wr A` for its maximal
/// block system; `full` when it is the whole wreath product.
struct Discovered {
    relabel: Permutation,
    ws: WreathStructure,
    full: bool,
}

fn discover(g: &PermGroup) -> Result<Option<Discovered>> {
    if g.degree() < 4 || !g.is_transitive() || is_primitive(g)? {
        return Ok(None);
    }
    let bs = maximal_block_system(g)?;
    let emb = BlockEmbedding::new(g, &bs)?;
    let (bottom, inner, sub) = match discover(&emb.bottom)?.filter(|d| d.full) {
        Some(d) => (d.ws.ambient.clone(), d.relabel, Some(d.ws)),
        None => (emb.bottom.clone(), Permutation::identity(emb.b()), None),
    };
    let ws = wreath_imprimitive(&bottom, &emb.top)?.with_substructures(sub, None);
    let mut images = vec![0; g.degree()];
    for (w, pts) in emb.points.iter().enumerate() {
        for (j, &x) in pts.iter().enumerate() {
            images[x] = w * emb.b() + inner.apply(j);
        }
    }
    let relabel = Permutation::from_images(&images)?;
    let full = ws.ambient.order() == g.order();
    Ok(Some(Discovered { relabel, ws, full }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Good,
    ThreeColor,
}

impl Kind {
    fn colors(self) -> usize {
        match self {
            Kind::Good => 2,
            Kind::ThreeColor => 3,
        }
    }

    fn regularity(self) -> usize {
        match self {
            Kind::Good => 6,
            Kind::ThreeColor => 2,
        }
    }

    fn check(self, cert: &Certificate) -> Result<()> {
        let ok = match self {
            Kind::Good => cert.max_orbit_length <= 6 && cert.derived_length.at_most(3),
            Kind::ThreeColor => cert.max_orbit_length <= 2 && cert.elementary_abelian_2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::PropertyViolation(format!(
                "{:?}: max orbit {}, derived length {}, elementary abelian 2: {}",
                cert.coloring.colors(),
                cert.max_orbit_length,
                cert.derived_length,
                cert.elementary_abelian_2
            )))
        }
    }
}

struct Built {
    coloring: Coloring,
    trace: Vec<TraceStep>,
}

type CensusKey = (usize, Vec<Permutation>, usize);

struct Engine {
    kind: Kind,
    params: Params,
    // (max orbit length, representative), sorted
    census: HashMap<CensusKey, Vec<(usize, Coloring)>>,
}

impl Engine {
    fn new(kind: Kind, params: &Params) -> Self {
        Engine {
            kind,
            params: *params,
            census: HashMap::new(),
        }
    }

    fn family(&mut self, g: &PermGroup, want: usize, depth: usize) -> Result<Vec<Built>> {
        let n = g.degree();
        if n == 1 {
            let step = TraceStep::new(depth, Case::Point, 1);
            let k = self.kind.colors();
            return (0..k.min(want.max(1)))
                .map(|c| {
                    Ok(Built {
                        coloring: Coloring::new(vec![c as u8], k)?,
                        trace: vec![step.clone()],
                    })
                })
                .collect();
        }
        if !g.is_transitive() {
            self.intransitive(g, want, depth)
        } else if is_primitive(g)? {
            let (found, seed) = self.regular_classes(g, self.kind.colors(), self.kind.regularity(), want)?;
            let mut step = TraceStep::new(depth, Case::PrimitiveCensus, n);
            if seed.is_some() {
                step.case = Case::PrimitiveSampled;
                step.seed = seed;
            }
            Ok(found
                .into_iter()
                .map(|coloring| Built {
                    coloring,
                    trace: vec![step.clone()],
                })
                .collect())
        } else {
            self.imprimitive(g, want, depth)
        }
    }

    fn intransitive(&mut self, g: &PermGroup, want: usize, depth: usize) -> Result<Vec<Built>> {
        let n = g.degree();
        let orbits = g.orbits();
        let parts = orbits
            .iter()
            .map(|orbit| {
                let h = g.restrict_to(orbit)?;
                self.family(&h, MAX_WANT, depth + 1)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut step = TraceStep::new(depth, Case::Intransitive, n);
        step.blocks = Some(orbits.len());
        let mut out = Vec::new();
        let mut index = vec![0usize; parts.len()];
        if parts.iter().any(Vec::is_empty) {
            return Ok(out);
        }
        while out.len() < want {
            let mut colors = vec![0u8; n];
            let mut trace = vec![step.clone()];
            for ((orbit, part), &i) in orbits.iter().zip(&parts).zip(&index) {
                for (&x, &c) in orbit.iter().zip(part[i].coloring.colors()) {
                    colors[x] = c;
                }
                trace.extend(part[i].trace.iter().cloned());
            }
            out.push(Built {
                coloring: Coloring::new(colors, self.kind.colors())?,
                trace,
            });
            // odometer, last orbit fastest
            let mut pos = parts.len();
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                index[pos] += 1;
                if index[pos] < parts[pos].len() {
                    break;
                }
                index[pos] = 0;
            }
        }
        Ok(out)
    }

    fn imprimitive(&mut self, g: &PermGroup, want: usize, depth: usize) -> Result<Vec<Built>> {
        let bs = maximal_block_system(g)?;
        let emb = BlockEmbedding::new(g, &bs)?;
        let b = emb.b();
        let (case, x, i) = match (self.kind, b) {
            (Kind::ThreeColor, _) => (Case::BlocksThreeColor, 5, 1),
            (Kind::Good, 2) => (Case::BlocksOfTwo, 3, 3),
            (Kind::Good, 3) => (Case::BlocksOfThree, 4, 2),
            (Kind::Good, _) => (Case::BlocksLarge, 5, 1),
        };
        let ys = self.family(&emb.bottom, x, depth + 1)?;
        if ys.len() < x {
            return Err(Error::SearchExhausted(format!(
                "block constituent of degree {b} has only {} suitable classes",
                ys.len()
            )));
        }
        let (xs, seed) = self.regular_classes(&emb.top, x, i, want)?;
        let y_colorings: Vec<Coloring> = ys.iter().map(|y| y.coloring.clone()).collect();
        xs.into_iter()
            .map(|xc| {
                let coloring = combine_on(&emb.points, &xc, &y_colorings)?;
                let mut step = TraceStep::new(depth, case, g.degree());
                step.blocks = Some(emb.m());
                step.block_size = Some(b);
                step.block_coloring = Some(xc.colors().to_vec());
                step.seed = seed;
                let mut trace = vec![step];
                let mut used: Vec<usize> = xc.colors().iter().map(|&c| c as usize).collect();
                used.sort_unstable();
                used.dedup();
                for u in used {
                    trace.extend(ys[u].trace.iter().cloned());
                }
                Ok(Built { coloring, trace })
            })
            .collect()
    }

    /// Inequivalent `k`-colorings with stabilizer orbits of length at most
    /// `i`: from a census when the space is small enough, otherwise by
    /// seeded sampling (the seed is returned).
    fn regular_classes(
        &mut self,
        g: &PermGroup,
        k: usize,
        i: usize,
        want: usize,
    ) -> Result<(Vec<Coloring>, Option<u64>)> {
        let n = g.degree();
        let fits = (k as u128)
            .checked_pow(n as u32)
            .is_some_and(|s| s <= self.params.caps.space as u128);
        if fits {
            let key = (n, g.generators().to_vec(), k);
            if !self.census.contains_key(&key) {
                let report = coloring_census(g, "", k, &self.params.caps)?;
                let mut classes: Vec<(usize, Coloring)> = report
                    .classes
                    .iter()
                    .map(|c| (c.max_orbit_length, c.coloring(k)))
                    .collect();
                classes.sort();
                self.census.insert(key.clone(), classes);
            }
            let found = self.census[&key]
                .iter()
                .filter(|(l, _)| *l <= i)
                .take(want)
                .map(|(_, c)| c.clone())
                .collect();
            return Ok((found, None));
        }
        let seed = self.params.seed;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = HashSet::new();
        let mut found = Vec::new();
        for _ in 0..SAMPLE_ATTEMPTS {
            if found.len() >= want {
                break;
            }
            let colors = (0..n).map(|_| rng.gen_range(0..k) as u8).collect();
            let c = Coloring::new(colors, k)?;
            let (rep, _) = lex_min_coloring(g, &c, &self.params.caps)?;
            if !seen.insert(rep.clone()) {
                continue;
            }
            if coloring_stabilizer(g, &rep, &self.params.caps)?.max_orbit_length() <= i {
                found.push(rep);
            }
        }
        Ok((found, Some(seed)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::coloring_census;
    use crate::registry::lookup;
    use crate::testutil::{brute_coloring_stabilizer, builtin, closure, max_orbit_of_elements};
    use proptest::prelude::*;

    fn params() -> Params {
        Params::default()
    }

    fn col(colors: &[u8], k: usize) -> Coloring {
        Coloring::new(colors.to_vec(), k).unwrap()
    }

    #[test]
    fn combine_examples() {
        let ws = lookup("wr_imp(sym:2,sym:2)").unwrap().structure.unwrap();
        let z = combine_colorings(&col(&[0, 1], 2), &[col(&[0, 1], 2), col(&[1, 0], 2)], &ws).unwrap();
        assert_eq!(z.colors(), &[0, 1, 1, 0]);
        let ws = lookup("wr_imp(sym:3,sym:4)").unwrap().structure.unwrap();
        let y = col(&[0, 2, 1], 3);
        let z = combine_colorings(&col(&[0, 0, 0, 0], 1), std::slice::from_ref(&y), &ws).unwrap();
        assert_eq!(z.colors(), y.colors().repeat(4).as_slice());
        assert!(matches!(
            combine_colorings(&col(&[0, 1, 0, 0], 2), &[y], &ws),
            Err(Error::ArityMismatch(_))
        ));
    }

    #[test]
    fn embedding_check_examples() {
        let caps = Caps::default();
        let ws = lookup("wr_imp(sym:2,sym:2)").unwrap().structure.unwrap();
        let (x, ys) = (col(&[0, 1], 2), [col(&[0, 1], 2), col(&[1, 0], 2)]);
        let z = combine_colorings(&x, &ys, &ws).unwrap();
        assert!(stab_embedding_check(&ws, &x, &ys, &z, &caps).unwrap());
        let brute = brute_coloring_stabilizer(&ws.ambient, z.colors());
        assert_eq!(4 % brute.len(), 0);

        let ws = lookup("wr_imp(sym:3,trivial:3)").unwrap().structure.unwrap();
        let ys = [col(&[0, 0, 1], 2), col(&[0, 1, 1], 2), col(&[1, 1, 1], 2)];
        let x = col(&[0, 1, 2], 3);
        let z = combine_colorings(&x, &ys, &ws).unwrap();
        assert!(stab_embedding_check(&ws, &x, &ys, &z, &caps).unwrap());
        let s = actions::imprimitive_coloring_stabilizer(Some(&ws), &z, &caps).unwrap();
        assert_eq!(s.order(), BigUint::from(2u32 * 2 * 6));

        let ws = lookup("wr_imp(sym:4,sym:4)").unwrap().structure.unwrap();
        let ys = [col(&[1, 0, 0, 0], 2), col(&[1, 1, 1, 0], 2), col(&[1, 1, 0, 0], 2)];
        let x = col(&[0, 1, 2, 2], 3);
        let z = combine_colorings(&x, &ys, &ws).unwrap();
        assert_eq!(z.class(1).points(), vec![0, 4, 5, 6, 8, 9, 12, 13]);
        assert!(stab_embedding_check(&ws, &x, &ys, &z, &caps).unwrap());
    }

    #[test]
    fn asymmetric_examples() {
        let f = asymmetric_colorings(&builtin("sym:3"), 3, 2, 5, &params()).unwrap();
        assert_eq!(f.len(), 5);
        let f = asymmetric_colorings(&builtin("sym:2"), 2, 2, 3, &params()).unwrap();
        let mut reps: Vec<Vec<u8>> = f.colorings.iter().map(|c| c.colors().to_vec()).collect();
        reps.sort();
        assert_eq!(reps, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        let g = builtin("agl1:5");
        let f = asymmetric_colorings(&g, 5, 1, 5, &params()).unwrap();
        assert_eq!(f.len(), 5);
        let mut keys = HashSet::new();
        for c in &f.colorings {
            assert!(coloring_stabilizer(&g, c, &Caps::default()).unwrap().is_trivial());
            assert!(keys.insert(lex_min_coloring(&g, c, &Caps::default()).unwrap().0));
        }
        assert!(matches!(
            asymmetric_colorings(&builtin("sym:3"), 2, 1, 1, &params()),
            Err(Error::SearchExhausted(_))
        ));
    }

    #[test]
    fn sampling_matches_requirements() {
        let g = builtin("cyc:29");
        let f = asymmetric_colorings(&g, 2, 1, 5, &params()).unwrap();
        assert_eq!(f.len(), 5);
        let seeded = Params { seed: 7, ..params() };
        let again = asymmetric_colorings(&g, 2, 1, 5, &seeded).unwrap();
        assert_eq!(again, asymmetric_colorings(&g, 2, 1, 5, &seeded).unwrap());
    }

    fn check_against_brute_force(g: &PermGroup, construction: &Construction, bound: usize) {
        let elements: Vec<Permutation> = closure(g).into_iter().collect();
        let mut seen = HashSet::new();
        for cert in &construction.certificates {
            let c = &cert.coloring;
            let brute: Vec<Permutation> = elements.iter().filter(|p| c.is_fixed_by(p)).cloned().collect();
            let stab = cert.stabilizer().unwrap();
            assert_eq!(stab.order(), BigUint::from(brute.len()));
            assert_eq!(cert.max_orbit_length, max_orbit_of_elements(g.degree(), &brute));
            assert!(cert.max_orbit_length <= bound);
            let rep = elements.iter().map(|p| c.image(p)).min().unwrap();
            assert!(seen.insert(rep), "two members share an orbit");
        }
    }

    #[test]
    fn good_subsets_examples() {
        let s4 = builtin("sym:4");
        let c = good_subsets(&s4, None, 5, &params()).unwrap();
        assert_eq!(c.family.len(), 5);
        assert_eq!(c.family.pairwise_inequivalent, Inequivalence::Verified);
        check_against_brute_force(&s4, &c, 6);

        let t3 = builtin("trivial:3");
        let c = good_subsets(&t3, None, 5, &params()).unwrap();
        assert_eq!(c.family.len(), 5);
        assert!(c.certificates.iter().all(|c| c.max_orbit_length == 1));

        let r = lookup("wr_imp(sym:4,sym:4)").unwrap();
        let c = good_subsets(&r.group, r.structure.as_ref(), 1, &params()).unwrap();
        assert!(c.certificates[0].max_orbit_length <= 6);
        assert_eq!(c.certificates[0].trace[0].case, Case::BlocksLarge);

        assert_eq!(
            good_subsets(&builtin("sym:2"), None, 5, &params())
                .unwrap()
                .family
                .len(),
            3
        );
        assert_eq!(
            good_subsets(&builtin("sym:3"), None, 5, &params())
                .unwrap()
                .family
                .len(),
            4
        );
        assert_eq!(
            good_subsets(&builtin("trivial:1"), None, 5, &params())
                .unwrap()
                .family
                .len(),
            2
        );
        assert_eq!(
            good_subsets(&builtin("sym:5"), None, 1, &params()).unwrap_err(),
            Error::NotSolvable
        );
    }

    #[test]
    fn every_case_against_brute_force() {
        for (spec, case) in [
            ("wr_imp(sym:2,sym:3)", Case::BlocksOfTwo),
            ("wr_imp(cyc:3,sym:2)", Case::BlocksOfThree),
            ("wr_imp(sym:3,cyc:3)", Case::BlocksOfThree),
            ("wr_imp(sym:4,sym:2)", Case::BlocksLarge),
            ("wr_imp(wr_imp(sym:2,sym:2),sym:2)", Case::BlocksLarge),
            ("wr_imp(sym:2,sym:4)", Case::BlocksOfTwo),
        ] {
            let r = lookup(spec).unwrap();
            let c = good_subsets(&r.group, r.structure.as_ref(), 5, &params()).unwrap();
            assert_eq!(c.family.len(), 5, "{spec}");
            assert_eq!(c.certificates[0].trace[0].case, case, "{spec}");
            check_against_brute_force(&r.group, &c, 6);
            // without the declared structure the stabilizers must agree
            let plain = good_subsets(&r.group, None, 5, &params()).unwrap();
            for (a, b) in plain.certificates.iter().zip(&c.certificates) {
                assert_eq!(a.coloring, b.coloring);
                assert!(a.stabilizer().unwrap().same_group(&b.stabilizer().unwrap()));
            }
        }
    }

    #[test]
    fn intransitive_and_subgroups() {
        let g = PermGroup::new(
            7,
            vec![
                Permutation::from_cycles(7, &[&[0, 1, 2]]).unwrap(),
                Permutation::from_cycles(7, &[&[3, 4], &[5, 6]]).unwrap(),
            ],
        )
        .unwrap();
        let c = good_subsets(&g, None, 5, &params()).unwrap();
        assert_eq!(c.certificates[0].trace[0].case, Case::Intransitive);
        check_against_brute_force(&g, &c, 6);

        // a proper transitive subgroup of Sym(2) wr Sym(3)
        let h = PermGroup::new(
            6,
            vec![
                Permutation::from_cycles(6, &[&[0, 2, 4], &[1, 3, 5]]).unwrap(),
                Permutation::from_cycles(6, &[&[0, 1], &[2, 3]]).unwrap(),
            ],
        )
        .unwrap();
        let c = good_subsets(&h, None, 5, &params()).unwrap();
        check_against_brute_force(&h, &c, 6);
    }

    #[test]
    fn three_coloring_examples() {
        let s3 = builtin("sym:3");
        let cert = three_coloring_2asym(&s3, None, &params()).unwrap();
        assert!(cert.stabilizer().unwrap().order() <= BigUint::from(2u32));
        let cert = three_coloring_2asym(&builtin("sym:2"), None, &params()).unwrap();
        assert_eq!(cert.coloring.colors(), &[0, 1]);
        assert_eq!(cert.max_orbit_length, 1);

        let r = lookup("wr_imp(sym:3,sym:2)").unwrap();
        let c = three_colorings_2asym(&r.group, r.structure.as_ref(), 5, &params()).unwrap();
        assert_eq!(c.family.len(), 5);
        assert!(c
            .certificates
            .iter()
            .all(|c| c.elementary_abelian_2 && c.max_orbit_length <= 2));
        check_against_brute_force(&r.group, &c, 2);
        assert!(matches!(
            three_coloring_2asym(&builtin("trivial:1"), None, &params()),
            Err(Error::InvalidInstance(_))
        ));
    }

    #[test]
    fn certificates_verify() {
        let caps = Caps::default();
        let r = lookup("wr_imp(sym:4,sym:4)").unwrap();
        let c = good_subsets(&r.group, r.structure.as_ref(), 2, &params()).unwrap();
        let cert = &c.certificates[0];
        assert!(verify_certificate(&r.group, r.structure.as_ref(), cert, &caps).unwrap());
        let mut tampered = cert.clone();
        tampered.max_orbit_length += 1;
        assert!(!verify_certificate(&r.group, r.structure.as_ref(), &tampered, &caps).unwrap());
        let mut tampered = cert.clone();
        tampered.stabilizer_generators.pop();
        assert!(!verify_certificate(&r.group, r.structure.as_ref(), &tampered, &caps).unwrap());

        let t = builtin("trivial:4");
        let cert = Certificate {
            coloring: col(&[0, 1, 1, 0], 2),
            stabilizer_generators: vec![],
            max_orbit_length: 1,
            derived_length: DerivedLength::Solvable(0),
            elementary_abelian_2: true,
            trace: vec![],
        };
        assert!(verify_certificate(&t, None, &cert, &caps).unwrap());
        let json = serde_json::to_value(&cert).unwrap();
        assert!(json.get("stab_gens").is_some() && json.get("elem_abelian_2").is_some());
    }

    #[test]
    fn small_groups_match_census() {
        for spec in [
            "sym:4",
            "agl1:5",
            "wr_imp(sym:2,sym:3)",
            "wr_imp(cyc:3,sym:3)",
            "cyc:4",
            "agl2:3",
        ] {
            let g = builtin(spec);
            let report = coloring_census(&g, spec, 2, &Caps::default()).unwrap();
            let c = good_subsets(&g, None, 5, &params()).unwrap();
            assert!(report.ell(6) >= 5);
            for cert in &c.certificates {
                let (rep, _) = lex_min_coloring(&g, &cert.coloring, &Caps::default()).unwrap();
                let class = report.class_of_rep(rep.colors()).unwrap();
                assert_eq!(report.classes[class].max_orbit_length, cert.max_orbit_length);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn combine_projects_to_block_coloring(x in proptest::collection::vec(0u8..3, 4)) {
            let ws = lookup("wr_imp(sym:3,sym:4)").unwrap().structure.unwrap();
            let ys = [col(&[0, 0, 0], 2), col(&[0, 0, 1], 2), col(&[0, 1, 1], 2)];
            let xc = col(&x, 3);
            let z = combine_colorings(&xc, &ys, &ws).unwrap();
            for (w, &xw) in x.iter().enumerate() {
                let block = &z.colors()[w * 3..w * 3 + 3];
                let ones = block.iter().filter(|&&c| c == 1).count();
                prop_assert_eq!(ones, xw as usize);
            }
            prop_assert!(stab_embedding_check(&ws, &xc, &ys, &z, &Caps::default()).unwrap());
        }
    }
}
