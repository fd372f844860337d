//! Two worked examples of imprimitive groups whose good subsets do not
//! survive doubling: `Sym(4) wr Sym(4)` ("bad") and `AΓL1(8) wr Sym(4)`
//! ("bad2").

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::actions::{coloring_census, max_orbit_length, same_orbit, stabilizer, CensusReport};
use crate::bitset::{Coloring, Subset};
use crate::constructor::combine_colorings;
use crate::error::{Error, Result};
use crate::group::DerivedLength;
use crate::registry::{self, Registered};
use crate::structure::WreathStructure;
use crate::Caps;

/// The subset of `Sym(4) wr Sym(4)` with metabelian stabilizer: one point
/// of the first block, three of the second, two of each remaining block.
pub const BAD_DELTA: [usize; 8] = [0, 4, 5, 6, 8, 9, 12, 13];

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "example", rename_all = "lowercase")]
pub enum ExampleReport {
    Bad(BadReport),
    Bad2(Bad2Report),
}

impl ExampleReport {
    pub fn holds(&self) -> bool {
        match self {
            ExampleReport::Bad(r) => r.holds,
            ExampleReport::Bad2(r) => r.holds,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BadReport {
    pub group: String,
    pub subset_classes: usize,
    pub metabelian_classes: usize,
    pub metabelian_rep: Vec<usize>,
    pub rep_equivalent_to_delta: bool,
    #[serde(serialize_with = "big")]
    pub stabilizer_order: BigUint,
    pub stabilizer_derived_length: DerivedLength,
    pub doubled_group: String,
    #[serde(serialize_with = "big")]
    pub doubled_stabilizer_order: BigUint,
    pub doubled_derived_length: DerivedLength,
    /// Unordered pairs of classes, one subset per block of the doubled group.
    pub pairs_checked: usize,
    pub metabelian_pairs: usize,
    /// For distinct classes the stabilizer is the direct product of the two.
    pub product_rule_holds: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Bad2Report {
    pub group: String,
    pub affine_classes: usize,
    pub classes_orbits_at_most_4: usize,
    pub orbit_4_attained: bool,
    /// Multisets of four classes, each with stabilizer orbits of length at most 5.
    pub multisets_checked: usize,
    pub qualifying_multisets: usize,
    pub qualifying_rep: Vec<usize>,
    pub doubled_rep: Vec<usize>,
    pub doubled_max_orbit_length: usize,
    pub holds: bool,
}

fn big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn verify_example(name: &str, caps: &Caps) -> Result<ExampleReport> {
    match name {
        "bad" => verify_bad(caps).map(ExampleReport::Bad),
        "bad2" => verify_bad2(caps).map(ExampleReport::Bad2),
        other => Err(Error::InvalidInstance(format!(
            "unknown example {other:?} (use bad or bad2)"
        ))),
    }
}

fn structured(spec: &str) -> Result<(Registered, WreathStructure)> {
    let reg = registry::lookup(spec)?;
    let ws = reg.structure.clone().ok_or(Error::StructureMissing)?;
    Ok((reg, ws))
}

/// Subset of the wreath product carrying class `labels[b]` on block `b`.
fn assemble(ws: &WreathStructure, census: &CensusReport, labels: &[usize]) -> Result<Coloring> {
    let mut distinct: Vec<usize> = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let x: Vec<u8> = labels
        .iter()
        .map(|l| distinct.binary_search(l).expect("label present") as u8)
        .collect();
    let ys: Vec<Coloring> = distinct.iter().map(|&l| census.classes[l].coloring(2)).collect();
    combine_colorings(&Coloring::new(x, distinct.len().max(1))?, &ys, ws)
}

fn verify_bad(caps: &Caps) -> Result<BadReport> {
    let (b, ws_b) = structured("wr_imp(sym:4,sym:4)")?;
    let census = coloring_census(&b.group, &b.name, 2, caps)?;
    let metabelian: Vec<usize> = (0..census.classes.len())
        .filter(|&i| census.classes[i].derived_length.at_most(2))
        .collect();
    let &[m] = metabelian.as_slice() else {
        return Err(Error::PropertyViolation(format!(
            "expected one metabelian class, found {}",
            metabelian.len()
        )));
    };
    let rep = census.classes[m].coloring(2);
    let delta = Subset::from_points(16, &BAD_DELTA)?.to_coloring();
    let rep_equivalent_to_delta = same_orbit(&b.group, &rep, &delta, caps)?;
    let stab = stabilizer(&b.group, Some(&ws_b), &rep, caps)?;

    let (g, ws_g) = structured("wr_imp(wr_imp(sym:4,sym:4),sym:2)")?;
    let n = census.classes.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |c| (a, c))).collect();
    let dls = pairs
        .par_iter()
        .map(|&(a, c)| {
            let z = assemble(&ws_g, &census, &[a, c])?;
            Ok(stabilizer(&g.group, Some(&ws_g), &z, caps)?.derived_length())
        })
        .collect::<Result<Vec<DerivedLength>>>()?;
    let product_rule_holds = pairs
        .iter()
        .zip(&dls)
        .all(|(&(a, c), &dl)| a == c || dl == census.classes[a].derived_length.max(census.classes[c].derived_length));
    let metabelian_pairs = dls.iter().filter(|d| d.at_most(2)).count();
    let doubled = stabilizer(&g.group, Some(&ws_g), &assemble(&ws_g, &census, &[m, m])?, caps)?;

    let stabilizer_order = stab.order();
    let stabilizer_derived_length = stab.derived_length();
    let doubled_derived_length = doubled.derived_length();
    let holds = rep_equivalent_to_delta
        && stabilizer_order == BigUint::from(6u32 * 6 * 32)
        && stabilizer_order == census.classes[m].stab_order
        && stabilizer_derived_length == DerivedLength::Solvable(2)
        && doubled_derived_length == DerivedLength::Solvable(3)
        && metabelian_pairs == 0
        && product_rule_holds;
    Ok(BadReport {
        group: b.name,
        subset_classes: n,
        metabelian_classes: 1,
        metabelian_rep: rep.class(1).points(),
        rep_equivalent_to_delta,
        stabilizer_order,
        stabilizer_derived_length,
        doubled_group: g.name,
        doubled_stabilizer_order: doubled.order(),
        doubled_derived_length,
        pairs_checked: pairs.len(),
        metabelian_pairs,
        product_rule_holds,
        holds,
    })
}

/// Multisets of size `k` over `items`, as non-decreasing sequences.
fn multisets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in multisets(&items[i..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

fn verify_bad2(caps: &Caps) -> Result<Bad2Report> {
    let a = registry::lookup("agammal1:8")?;
    let census = coloring_census(&a.group, &a.name, 2, caps)?;
    let classes_orbits_at_most_4 = census.ell(4);
    let orbit_4_attained = census.classes.iter().any(|c| c.max_orbit_length == 4);

    // A stabilizer in the wreath product contains the product of the block
    // stabilizers, so only classes with orbits of length at most 5 can occur.
    let (b, ws) = structured("wr_imp(agammal1:8,sym:4)")?;
    let candidates: Vec<usize> = (0..census.classes.len())
        .filter(|&i| census.classes[i].max_orbit_length <= 5)
        .collect();
    let all = multisets(&candidates, ws.m());
    let orbits = all
        .par_iter()
        .map(|labels| {
            let z = assemble(&ws, &census, labels)?;
            Ok((
                z.class(1).points(),
                max_orbit_length(&stabilizer(&b.group, Some(&ws), &z, caps)?),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let qualifying: Vec<&(Vec<usize>, usize)> = orbits.iter().filter(|(_, o)| *o <= 5).collect();

    let four = candidates
        .iter()
        .copied()
        .find(|&i| census.classes[i].max_orbit_length == 4);
    let (doubled_rep, doubled_max_orbit_length) = match four {
        Some(f) => {
            let mut labels = vec![f, f];
            labels.extend(candidates.iter().copied().filter(|&i| i != f).take(ws.m() - 2));
            labels.sort_unstable();
            let z = assemble(&ws, &census, &labels)?;
            (
                z.class(1).points(),
                max_orbit_length(&stabilizer(&b.group, Some(&ws), &z, caps)?),
            )
        }
        None => (Vec::new(), 0),
    };
    let holds =
        classes_orbits_at_most_4 == 4 && orbit_4_attained && qualifying.len() == 1 && doubled_max_orbit_length == 8;
    Ok(Bad2Report {
        group: b.name,
        affine_classes: census.classes.len(),
        classes_orbits_at_most_4,
        orbit_4_attained,
        multisets_checked: all.len(),
        qualifying_multisets: qualifying.len(),
        qualifying_rep: qualifying.first().map(|q| q.0.clone()).unwrap_or_default(),
        doubled_rep,
        doubled_max_orbit_length,
        holds,
    })
}
