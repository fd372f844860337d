//! Product-type groups `X wr_d S` in product action: double cosets of a
//! point stabilizer, the element `v`, the two-point stabilizer `I_v` and
//! its projection to `S`, with every quantity computed along two or three
//! independent routes.

use std::collections::HashMap;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::actions::subset_stabilizer;
use crate::bitset::Subset;
use crate::constructor::{good_subsets, Params};
use crate::error::{Error, Result};
use crate::group::{DerivedLength, PermGroup};
use crate::perm::Permutation;
use crate::registry;
use crate::structure::{wreath_product_action, WreathStructure};
use crate::Caps;

/// Largest `X` whose elements are enumerated.
pub const X_ORDER_CAP: u64 = 1_000_000;

/// `T wr_d S <= G = X wr_d S` acting on `|X:Y|^d` points, `Y` the
/// stabilizer of point 0 in `X`.
#[derive(Clone, Debug)]
pub struct ProductInstance {
    pub x: PermGroup,
    pub y: PermGroup,
    pub t: PermGroup,
    pub d: usize,
    pub s: PermGroup,
    pub g: WreathStructure,
    /// Stabilizer of the base point 0 of `G`, namely `Y wr_d S`.
    pub h: PermGroup,
    pub cosets: DoubleCosetDecomposition,
}

impl ProductInstance {
    pub fn new(x: PermGroup, t: PermGroup, d: usize, s: PermGroup) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidInstance(format!("product type needs d >= 2, got {d}")));
        }
        if s.degree() != d {
            return Err(Error::DegreeMismatch(d, s.degree()));
        }
        if t.degree() != x.degree() {
            return Err(Error::DegreeMismatch(x.degree(), t.degree()));
        }
        if !x.is_transitive() || !s.is_transitive() {
            return Err(Error::NotTransitive);
        }
        if !s.is_solvable() {
            return Err(Error::NotSolvable);
        }
        if !t.is_normal_in(&x) {
            return Err(Error::InvalidInstance("T is not a normal subgroup of X".into()));
        }
        let y = x.pointwise_stabilizer(&[0])?;
        if !y.is_solvable() {
            return Err(Error::NotSolvable);
        }
        if t.is_subgroup_of(&y) {
            return Err(Error::SocleInsideStabilizer);
        }
        let cosets = double_coset_reps(&x, &y)?;
        let g = wreath_product_action(&x, &s)?;
        let h = g.ambient.pointwise_stabilizer(&[0])?;
        Ok(ProductInstance {
            x,
            y,
            t,
            d,
            s,
            g,
            h,
            cosets,
        })
    }

    /// Builds the instance from registry names.
    pub fn from_specs(x: &str, t: &str, d: usize, s: &str) -> Result<Self> {
        ProductInstance::new(registry::group(x)?, registry::group(t)?, d, registry::group(s)?)
    }

    pub fn degree(&self) -> usize {
        self.g.degree()
    }

    /// `(x_1, .., x_d; 1)`.
    pub fn base_element(&self, xs: &[Permutation]) -> Permutation {
        self.g.element(xs, &Permutation::identity(self.d))
    }
}

/// Double cosets `Y c_i Y` of `Y` in `X`, with `c_1 = 1`.
#[derive(Clone, Debug)]
pub struct DoubleCosetDecomposition {
    /// Lexicographically least element of each double coset, in increasing order.
    pub reps: Vec<Permutation>,
    class: HashMap<Permutation, usize>,
}

impl DoubleCosetDecomposition {
    pub fn r(&self) -> usize {
        self.reps.len()
    }

    /// Index of the double coset containing `x`.
    pub fn class_of(&self, x: &Permutation) -> Option<usize> {
        self.class.get(x).copied()
    }
}

/// Enumerates `X` and splits it into double cosets of `Y`.
pub fn double_coset_reps(x: &PermGroup, y: &PermGroup) -> Result<DoubleCosetDecomposition> {
    if !y.is_subgroup_of(x) {
        return Err(Error::NotSubgroup);
    }
    if x.order() > BigUint::from(X_ORDER_CAP) {
        return Err(Error::OrderCap(X_ORDER_CAP));
    }
    let mut elements: Vec<Permutation> = x.elements().collect();
    elements.sort();
    let mut class: HashMap<Permutation, usize> = HashMap::with_capacity(elements.len());
    let mut reps = Vec::new();
    for e in &elements {
        if class.contains_key(e) {
            continue;
        }
        let id = reps.len();
        reps.push(e.clone());
        class.insert(e.clone(), id);
        let mut queue = vec![e.clone()];
        while let Some(z) = queue.pop() {
            for s in y.generators() {
                for w in [s.mul(&z), z.mul(s)] {
                    if !class.contains_key(&w) {
                        class.insert(w.clone(), id);
                        queue.push(w);
                    }
                }
            }
        }
    }
    if reps.len() < 2 {
        return Err(Error::NotCoreFree);
    }
    Ok(DoubleCosetDecomposition { reps, class })
}

/// Lexicographically least element of `T` outside `Y`.
pub fn pick_c2(y: &PermGroup, t: &PermGroup) -> Result<Permutation> {
    t.elements()
        .filter(|e| !y.has(e))
        .min()
        .ok_or(Error::SocleInsideStabilizer)
}

/// `v = (x_1, .., x_d; 1)` with `x_i = c2` for `i` in `delta`, identity otherwise.
pub fn build_v(delta: &Subset, c2: &Permutation, instance: &ProductInstance) -> Result<Permutation> {
    if delta.degree() != instance.d {
        return Err(Error::DegreeMismatch(instance.d, delta.degree()));
    }
    let id = Permutation::identity(instance.x.degree());
    let xs: Vec<Permutation> = (0..instance.d)
        .map(|i| if delta.contains(i) { c2.clone() } else { id.clone() })
        .collect();
    Ok(instance.base_element(&xs))
}

/// `I_v = WS ∩ (WS)^v` for `v = (x; 1)`, with its kernel `I_v ∩ W` and
/// image `π(I_v)` in `S`.
#[derive(Clone, Debug)]
pub struct IvParts {
    pub iv: PermGroup,
    pub kernel: PermGroup,
    pub projection: PermGroup,
}

/// Builds `I_v` from the coordinate condition: `(w; σ)` lies in `(WS)^v`
/// iff `x_i w_i x_{σ(i)}^-1` lies in `Y` for every `i`.
pub fn i_v(instance: &ProductInstance, xs: &[Permutation]) -> Result<IvParts> {
    let d = instance.d;
    if xs.len() != d {
        return Err(Error::ArityMismatch(format!("{} coordinates for d = {d}", xs.len())));
    }
    let y_elements: Vec<Permutation> = instance.y.elements().collect();
    let allowed = |i: usize, j: usize| -> Vec<Permutation> {
        y_elements
            .iter()
            .filter(|w| instance.y.has(&xs[i].mul(w).mul_inv(&xs[j])))
            .cloned()
            .collect()
    };
    let id_s = Permutation::identity(d);
    let id_x = Permutation::identity(instance.x.degree());
    let mut gens = Vec::new();
    let mut kernel_gens = Vec::new();
    for i in 0..d {
        for w in allowed(i, i) {
            let mut f = vec![id_x.clone(); d];
            f[i] = w;
            let e = instance.g.element(&f, &id_s);
            kernel_gens.push(e.clone());
            gens.push(e);
        }
    }
    let mut count = BigUint::from(0u32);
    let mut sigmas = Vec::new();
    for sigma in instance.s.elements() {
        let sets: Vec<Vec<Permutation>> = (0..d).map(|i| allowed(i, sigma.apply(i))).collect();
        if sets.iter().any(Vec::is_empty) {
            continue;
        }
        count += sets.iter().map(|s| BigUint::from(s.len())).product::<BigUint>();
        let f: Vec<Permutation> = sets.iter().map(|s| s[0].clone()).collect();
        gens.push(instance.g.element(&f, &sigma));
        sigmas.push(sigma);
    }
    let degree = instance.degree();
    let iv = PermGroup::generated_by(degree, gens);
    let kernel = PermGroup::generated_by(degree, kernel_gens);
    if iv.order() != count {
        return Err(Error::PropertyViolation(format!(
            "I_v has order {} but the coordinate count is {count}",
            iv.order()
        )));
    }
    Ok(IvParts {
        iv,
        kernel,
        projection: PermGroup::generated_by(d, sigmas),
    })
}

/// `π(I_v)` three ways: the projection of `I_v`; the set of `σ` with
/// `x_{σ(i)} ∈ Y x_i Y` for all `i`; and the intersection of the
/// stabilizers in `S` of the sets `Δ_j = {i : x_i ∈ Y c_{j+1} Y}`.
pub fn pi_of_iv(instance: &ProductInstance, xs: &[Permutation], caps: &Caps) -> Result<PermGroup> {
    let parts = i_v(instance, xs)?;
    let d = instance.d;
    let projected = PermGroup::generated_by(
        d,
        parts
            .iv
            .generators()
            .iter()
            .map(|g| instance.g.decompose(g).expect("element of the wreath product").1),
    );
    let classes: Vec<usize> = xs
        .iter()
        .map(|x| instance.cosets.class_of(x).ok_or(Error::NotAMember))
        .collect::<Result<_>>()?;
    let by_cosets = PermGroup::generated_by(
        d,
        instance
            .s
            .elements()
            .filter(|sigma| (0..d).all(|i| classes[sigma.apply(i)] == classes[i])),
    );
    let mut by_stabilizers = instance.s.clone();
    for j in 1..instance.cosets.r() {
        let pts: Vec<usize> = (0..d).filter(|&i| classes[i] == j).collect();
        by_stabilizers = subset_stabilizer(&by_stabilizers, &Subset::from_points(d, &pts)?, caps)?;
    }
    if !(projected.same_group(&by_cosets)
        && projected.same_group(&by_stabilizers)
        && projected.same_group(&parts.projection))
    {
        return Err(Error::PropertyViolation(
            "the three computations of π(I_v) disagree".into(),
        ));
    }
    Ok(projected)
}

/// Invariants checked on one choice of `v`.
#[derive(Clone, Debug, Serialize)]
pub struct VReport {
    pub v_coordinates: Vec<Permutation>,
    pub image_of_base_point: usize,
    #[serde(serialize_with = "big")]
    pub iv_order: BigUint,
    pub dl_iv: DerivedLength,
    pub dl_iv_cap_v: DerivedLength,
    pub dl_pi: DerivedLength,
    pub dl_h_cap_hv: DerivedLength,
    /// `dl(I_v) <= dl(I_v ∩ V) + dl(π(I_v))`.
    pub eq2_holds: bool,
    /// `H ∩ H^v`, computed as a two-point stabilizer of `G`, equals `I_v`.
    pub two_point_stabilizer_agrees: bool,
}

fn big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn sum(a: DerivedLength, b: DerivedLength) -> Option<u32> {
    Some(a.value()? + b.value()?)
}

/// Runs every check for `v = (x; 1)`.
pub fn check_v(instance: &ProductInstance, xs: &[Permutation], caps: &Caps) -> Result<VReport> {
    let parts = i_v(instance, xs)?;
    let pi = pi_of_iv(instance, xs, caps)?;
    let v = instance.base_element(xs);
    let image = v.apply(0);
    let h_cap_hv = instance.g.ambient.pointwise_stabilizer(&[0, image])?;
    let dl_iv = parts.iv.derived_length();
    let dl_iv_cap_v = parts.kernel.derived_length();
    let dl_pi = pi.derived_length();
    let eq2_holds = matches!((dl_iv.value(), sum(dl_iv_cap_v, dl_pi)), (Some(a), Some(b)) if a <= b);
    let agrees = h_cap_hv.same_group(&parts.iv);
    Ok(VReport {
        v_coordinates: xs.to_vec(),
        image_of_base_point: image,
        iv_order: parts.iv.order(),
        dl_iv,
        dl_iv_cap_v,
        dl_pi,
        dl_h_cap_hv: h_cap_hv.derived_length(),
        eq2_holds,
        two_point_stabilizer_agrees: agrees,
    })
}

/// Aggregate of the randomized trials.
#[derive(Clone, Debug, Serialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub seed: u64,
    pub all_checks_hold: bool,
    pub max_dl_pi: Option<u32>,
    pub max_dl_iv: Option<u32>,
}

/// Report for the element `v` built from a good subset of `S`.
#[derive(Clone, Debug, Serialize)]
pub struct ThMainReport {
    pub degree: usize,
    #[serde(serialize_with = "big")]
    pub order_x: BigUint,
    #[serde(serialize_with = "big")]
    pub order_y: BigUint,
    pub dl_y: DerivedLength,
    pub double_cosets: usize,
    pub c2: Permutation,
    pub delta: Vec<usize>,
    pub base_point: usize,
    pub v: VReport,
    /// `dl(I_v ∩ V) <= dl(Y)`.
    pub kernel_bound: bool,
    /// `dl(π(I_v)) <= 3`.
    pub projection_bound: bool,
    /// `dl(I_v) <= dl(Y) + 3 <= 13`.
    pub iv_bound: bool,
    /// `dl(H ∩ H^v) <= dl(I_v)`.
    pub two_point_bound: bool,
    pub trials: TrialSummary,
}

impl ThMainReport {
    pub fn holds(&self) -> bool {
        self.kernel_bound
            && self.projection_bound
            && self.iv_bound
            && self.two_point_bound
            && self.v.eq2_holds
            && self.v.two_point_stabilizer_agrees
            && self.trials.all_checks_hold
    }
}

/// The recipe: `Δ` a good subset of `S`, `c2` the least element of `T`
/// outside `Y`, `v = (c2 on Δ, 1 elsewhere)`; plus `trials` random `v`
/// over `T^d`.
pub fn thmain_report(instance: &ProductInstance, trials: usize, seed: u64, caps: &Caps) -> Result<ThMainReport> {
    let params = Params { caps: *caps, seed };
    let good = good_subsets(&instance.s, None, 1, &params)?;
    let delta = good.family.colorings[0].class(1);
    let c2 = pick_c2(&instance.y, &instance.t)?;
    let id = Permutation::identity(instance.x.degree());
    let xs: Vec<Permutation> = (0..instance.d)
        .map(|i| if delta.contains(i) { c2.clone() } else { id.clone() })
        .collect();
    let v = check_v(instance, &xs, caps)?;
    let dl_y = instance.y.derived_length();
    let le = |a: DerivedLength, b: Option<u32>| matches!((a.value(), b), (Some(a), Some(b)) if a <= b);
    let y3 = dl_y.value().map(|y| y + 3);
    let trials = run_trials(instance, trials, seed, caps)?;
    Ok(ThMainReport {
        degree: instance.degree(),
        order_x: instance.x.order(),
        order_y: instance.y.order(),
        dl_y,
        double_cosets: instance.cosets.r(),
        c2,
        delta: delta.points(),
        base_point: 0,
        kernel_bound: le(v.dl_iv_cap_v, dl_y.value()),
        projection_bound: le(v.dl_pi, Some(3)),
        iv_bound: le(v.dl_iv, y3) && le(v.dl_iv, Some(13)),
        two_point_bound: le(v.dl_h_cap_hv, v.dl_iv.value()),
        v,
        trials,
    })
}

fn run_trials(instance: &ProductInstance, trials: usize, seed: u64, caps: &Caps) -> Result<TrialSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let choices: Vec<Vec<Permutation>> = (0..trials)
        .map(|_| (0..instance.d).map(|_| instance.t.random_element(&mut rng)).collect())
        .collect();
    let reports = choices
        .par_iter()
        .map(|xs| check_v(instance, xs, caps))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialSummary {
        trials,
        seed,
        all_checks_hold: reports.iter().all(|r| {
            r.eq2_holds
                && r.two_point_stabilizer_agrees
                && matches!((r.dl_h_cap_hv.value(), r.dl_iv.value()), (Some(a), Some(b)) if a <= b)
        }),
        max_dl_pi: reports.iter().filter_map(|r| r.dl_pi.value()).max(),
        max_dl_iv: reports.iter().filter_map(|r| r.dl_iv.value()).max(),
    })
}

/// Result of the setwise-stabilizer check on a small set of points.
#[derive(Clone, Debug, Serialize)]
pub struct FinalCheck {
    pub delta: Vec<usize>,
    #[serde(serialize_with = "big")]
    pub stabilizer_order: BigUint,
    pub dl_stabilizer: DerivedLength,
    pub dl_iv: DerivedLength,
    pub holds: bool,
}

/// For `Δ ⊇ {0, v(0)}` of the given size (padded with fixed points of
/// `I_v`, then with the smallest remaining points), `Stab_G(Δ)` is solvable
/// of derived length at most `dl(I_v) + 3`.
pub fn final_corollary_check(
    instance: &ProductInstance,
    delta_size: usize,
    seed: u64,
    caps: &Caps,
) -> Result<FinalCheck> {
    if !(2..=4).contains(&delta_size) {
        return Err(Error::InvalidInstance(format!(
            "Δ must have 2 to 4 points, got {delta_size}"
        )));
    }
    let report = thmain_report(instance, 0, seed, caps)?;
    let xs = &report.v.v_coordinates;
    let parts = i_v(instance, xs)?;
    let mut delta = vec![0, report.v.image_of_base_point];
    delta.dedup();
    let n = instance.degree();
    let fixed: Vec<usize> = (0..n)
        .filter(|&p| parts.iv.generators().iter().all(|g| g.apply(p) == p))
        .collect();
    for p in fixed.into_iter().chain(0..n) {
        if delta.len() >= delta_size {
            break;
        }
        if !delta.contains(&p) {
            delta.push(p);
        }
    }
    let stab = setwise_stabilizer_small(&instance.g.ambient, &delta)?;
    let dl_stabilizer = stab.derived_length();
    let dl_iv = parts.iv.derived_length();
    let holds = matches!((dl_stabilizer.value(), dl_iv.value()), (Some(a), Some(b)) if a <= b + 3);
    Ok(FinalCheck {
        delta,
        stabilizer_order: stab.order(),
        dl_stabilizer,
        dl_iv,
        holds,
    })
}

/// `Stab_G(Δ)` for a few points: the pointwise stabilizer together with one
/// element realizing each achievable permutation of `Δ`.
fn setwise_stabilizer_small(g: &PermGroup, delta: &[usize]) -> Result<PermGroup> {
    let chain = g.chain_with_base_prefix(delta);
    let mut gens = chain.stabilizer_generators(delta.len());
    let mut arrangement = delta.to_vec();
    permutations(&mut arrangement, 0, &mut |images| {
        if let Some(p) = chain.map_base_prefix(images) {
            gens.push(p);
        }
    });
    Ok(PermGroup::generated_by(g.degree(), gens))
}

fn permutations(items: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}
