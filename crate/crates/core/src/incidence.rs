//! The polynomial incidence graph and its bound verifiers.
//!
//! For a monomial-supported space V over GF(q), the incidence graph is the
//! Cayley color graph on the additive group of V whose connection function
//! is the zero count N_q(f) = |{α ∈ F_q^m : f(α) = 0}|. Edge weights between
//! two polynomial sets then count incidences pairwise: e(𝓛, 𝓛') equals
//! Σ N_q(f − f'). This module builds that coloring, verifies the exact
//! three-eigenvalue spectrum on spaces with the star condition, and checks
//! every incidence inequality the spectrum implies — in integer arithmetic
//! whenever the statement itself is an integer statement.
//!
//! The underlying Cayley group is (ℤ_p)^{s·dim V}: a coefficient vector over
//! GF(p^s) is flattened to base-p digits, so a polynomial's index in the
//! enumeration of V is also its group element label. Characters of that
//! group pair with the plain mod-p dot product, while polynomial annihilator
//! characters pair through the field trace form Tr(Σ f_i g_i); the two
//! labelings are exchanged by the Gram matrix of the trace form, which is
//! what `char_label` applies.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::cayley::{self, ConnectionFunction, GroupDesc, SpectrumReport};
use crate::error::{LabError, Result};
use crate::ffield::{FieldCtx, FieldElem};
use crate::polyspace::{Poly, PolySpace};
use crate::rng::SplitMix64;
use crate::Budget;

/// A deduplicated set of points of F_q^{m+1}, encoded base q with
/// coordinate 0 least significant.
#[derive(Debug, Clone)]
pub struct PointSet {
    indices: Vec<u64>,
}

impl PointSet {
    pub fn new(space: &PolySpace, mut indices: Vec<u64>) -> Result<PointSet> {
        let limit = extended_grid_size(space)?;
        indices.sort_unstable();
        indices.dedup();
        if indices.last().is_some_and(|&last| last >= limit) {
            return Err(LabError::InvalidParameter(format!(
                "point index out of range for F_q^{}",
                space.m() + 1
            )));
        }
        Ok(PointSet { indices })
    }

    /// All of F_q^{m+1}.
    pub fn full_grid(space: &PolySpace) -> Result<PointSet> {
        Ok(PointSet {
            indices: (0..extended_grid_size(space)?).collect(),
        })
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn len(&self) -> u64 {
        self.indices.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Splits an encoded point into (α ∈ F_q^m, last coordinate).
    pub fn split(space: &PolySpace, index: u64) -> (u64, u64) {
        let qm = space.q().pow(space.m());
        (index % qm, index / qm)
    }
}

/// A deduplicated subset of V, members encoded by polynomial index.
#[derive(Debug, Clone)]
pub struct PolySet {
    indices: Vec<u64>,
}

impl PolySet {
    pub fn new(space: &PolySpace, mut indices: Vec<u64>) -> Result<PolySet> {
        indices.sort_unstable();
        indices.dedup();
        if indices.last().is_some_and(|&last| last >= space.size()) {
            return Err(LabError::InvalidParameter(
                "polynomial index out of range".into(),
            ));
        }
        Ok(PolySet { indices })
    }

    /// The whole space as a set.
    pub fn full(space: &PolySpace) -> PolySet {
        PolySet {
            indices: (0..space.size()).collect(),
        }
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn len(&self) -> u64 {
        self.indices.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

fn extended_grid_size(space: &PolySpace) -> Result<u64> {
    let q = space.q();
    let budget = space.budget();
    q.checked_pow(space.m() + 1)
        .filter(|&n| n <= budget.max_points)
        .ok_or(LabError::SizeLimit {
            what: "point grid size q^{m+1}",
            required: (q as u128).saturating_pow(space.m() + 1),
            limit: budget.max_points,
        })
}

/// The zero-count table N_q over the whole space, in polynomial index order.
/// Walks the coefficient odometer and updates all q^m evaluations per digit
/// change, so the cost is O(q^dim · q^m) table operations.
pub fn nq_table(space: &PolySpace) -> Result<Vec<i64>> {
    let ctx = space.ctx();
    let points = space.points()?;
    let n_points = points.len();
    let dim = space.dim();
    let q = space.q();

    // weights[j][a] = value of support monomial j at point a
    let weights: Vec<Vec<FieldElem>> = {
        let mut per_point: Vec<Vec<FieldElem>> =
            points.iter().map(|pt| space.monomial_weights(pt)).collect();
        (0..dim)
            .map(|j| per_point.iter_mut().map(|w| w[j]).collect())
            .collect()
    };

    let elems: Vec<FieldElem> = ctx.elements().collect();
    let mut values = vec![ctx.zero(); n_points];
    let mut zeros = n_points as i64;
    let mut table = vec![0i64; space.size() as usize];
    table[0] = zeros;

    let mut digits = vec![0u64; dim];
    for index in 1..space.size() {
        let mut j = 0;
        loop {
            let old = digits[j];
            let new = (old + 1) % q;
            digits[j] = new;
            let delta = ctx.sub(elems[new as usize], elems[old as usize]);
            for (value, w) in values.iter_mut().zip(&weights[j]) {
                let was_zero = *value == FieldElem::ZERO;
                *value = ctx.add(*value, ctx.mul(delta, *w));
                match (was_zero, *value == FieldElem::ZERO) {
                    (true, false) => zeros -= 1,
                    (false, true) => zeros += 1,
                    _ => {}
                }
            }
            if new != 0 {
                break;
            }
            j += 1;
        }
        table[index as usize] = zeros;
    }
    Ok(table)
}

/// The incidence coloring as a Cayley connection function on (ℤ_p)^{s·dim}.
/// c(0) = q^m and c is hermitian since N_q(f) = N_q(−f).
pub fn incidence_connection(space: &PolySpace) -> Result<ConnectionFunction> {
    let table = nq_table(space)?;
    let group = GroupDesc::Vector {
        p: space.ctx().p(),
        n: space.ctx().s() * space.dim() as u32,
    };
    let conn = ConnectionFunction::new_exact(group, table)?;
    debug_assert!(conn.is_hermitian());
    Ok(conn)
}

/// Σ_{f∈𝓛, f'∈𝓛'} N_q(f − f'), computed through field arithmetic on
/// coefficient vectors and again as a Cayley edge weight through group
/// arithmetic on flattened labels. The two routes must agree exactly.
pub fn pp_incidence_sum(
    space: &PolySpace,
    conn: &ConnectionFunction,
    l: &PolySet,
    lp: &PolySet,
) -> Result<i128> {
    let table = conn
        .exact_values()
        .ok_or_else(|| LabError::Unsupported("incidence coloring must be exact".into()))?;
    let l_polys: Vec<Poly> = l
        .indices()
        .iter()
        .map(|&k| space.poly_from_index(k))
        .collect();
    let lp_polys: Vec<Poly> = lp
        .indices()
        .iter()
        .map(|&k| space.poly_from_index(k))
        .collect();
    let mut direct: i128 = 0;
    for f in &l_polys {
        for g in &lp_polys {
            let diff = space.sub_polys(f, g);
            direct += table[space.poly_index(&diff) as usize] as i128;
        }
    }
    let via_edges = cayley::edge_weight(conn, l.indices(), lp.indices())
        .as_integer()
        .expect("integer coloring sums to an integer");
    assert_eq!(
        direct, via_edges,
        "field-arithmetic and group-arithmetic incidence sums disagree"
    );
    Ok(direct)
}

/// I(𝓟, 𝓛): incidences counted by direct evaluation of every pair.
pub fn point_poly_incidences(space: &PolySpace, points: &PointSet, l: &PolySet) -> Result<u64> {
    let ctx = space.ctx();
    let qm = space.q().pow(space.m());
    // cache monomial weights per base point α
    let mut weight_cache: BTreeMap<u64, Vec<FieldElem>> = BTreeMap::new();
    let all_points = space.points()?;
    let polys: Vec<Poly> = l
        .indices()
        .iter()
        .map(|&k| space.poly_from_index(k))
        .collect();
    let mut count = 0u64;
    for &v in points.indices() {
        let (alpha_idx, last) = PointSet::split(space, v);
        debug_assert!(alpha_idx < qm);
        let weights = weight_cache
            .entry(alpha_idx)
            .or_insert_with(|| space.monomial_weights(&all_points[alpha_idx as usize]));
        let target = ctx.elem(last).expect("coordinate < q");
        for f in &polys {
            if space.eval_with_weights(f, weights) == target {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// i_𝓛(v) for every v ∈ F_q^{m+1}: how many members of 𝓛 pass through v.
/// Σ_v i(v) = q^m·|𝓛| and Σ_v i(v)² = Σ N_q(f − f').
pub fn incidence_profile(space: &PolySpace, l: &PolySet) -> Result<Vec<u64>> {
    let grid = extended_grid_size(space)?;
    let qm = space.q().pow(space.m());
    let points = space.points()?;
    let mut profile = vec![0u64; grid as usize];
    for &k in l.indices() {
        let f = space.poly_from_index(k);
        for (alpha_idx, pt) in points.iter().enumerate() {
            let y = space.evaluate(&f, pt).index();
            profile[(alpha_idx as u64 + y * qm) as usize] += 1;
        }
    }
    Ok(profile)
}

// --- character relabeling between the dot-product and trace pairings ---

/// Gram matrix of the trace form on the polynomial basis of GF(p^s):
/// M[u][v] = Tr(θ^{u+v}). Row-major s×s, symmetric, invertible.
fn trace_gram(ctx: &FieldCtx) -> Vec<u32> {
    let s = ctx.s() as usize;
    let theta = if s == 1 {
        ctx.one()
    } else {
        ctx.elem(ctx.p() as u64).expect("θ exists for s >= 2")
    };
    let mut gram = vec![0u32; s * s];
    for u in 0..s {
        for v in 0..s {
            gram[u * s + v] = ctx.trace(ctx.pow(theta, (u + v) as u64));
        }
    }
    gram
}

/// The Cayley character label of a polynomial f: the group element g with
/// χ_g(h) = ζ_p^{Tr(⟨f, h⟩)} under the plain dot-product pairing, obtained
/// by applying the trace-form Gram matrix blockwise.
pub fn char_label(space: &PolySpace, gram: &[u32], f: &Poly) -> u64 {
    let ctx = space.ctx();
    let p = ctx.p() as u64;
    let s = ctx.s() as usize;
    let mut label = 0u64;
    let mut scale = 1u64;
    for coeff in &f.coeffs {
        let digits = ctx.digits(*coeff);
        for u in 0..s {
            let mut acc = 0u64;
            for (v, &d) in digits.iter().enumerate() {
                acc += gram[u * s + v] as u64 * d as u64;
            }
            label += acc % p * scale;
            scale *= p;
        }
    }
    label
}

/// Eigenvalue multiset the spectrum statement predicts on a star space:
/// q^{dim+m−1} once, q^{dim−1} with multiplicity (q−1)q^m, zero for the rest.
pub fn predicted_spectrum_multiset(space: &PolySpace) -> Vec<(i128, u64)> {
    let q = space.q() as i128;
    let dim = space.dim() as u32;
    let m = space.m();
    let big = q.pow(dim + m - 1);
    let mid = q.pow(dim - 1);
    let mid_mult = (space.q() - 1) * space.q().pow(m);
    let rest = space.size() - mid_mult - 1;
    let mut out = vec![(big, 1u64), (mid, mid_mult)];
    if rest > 0 {
        out.push((0, rest));
    }
    out.sort();
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumTheoremVerdict {
    pub multiset_matches: bool,
    pub eigencharacters_match: bool,
    pub predicted: Vec<(i128, u64)>,
    /// Observed distinct eigenvalues; integer-valued entries only, which is
    /// always the case for the incidence coloring.
    pub observed: Vec<(i128, u64)>,
    pub lambda: f64,
}

impl SpectrumTheoremVerdict {
    pub fn holds(&self) -> bool {
        self.multiset_matches && self.eigencharacters_match
    }
}

/// Observed-versus-predicted spectrum comparison, without the hypothesis
/// gate. Negative controls use this directly on non-star spaces.
pub fn spectrum_comparison(
    space: &PolySpace,
    conn: &ConnectionFunction,
    report: &SpectrumReport,
) -> Result<SpectrumTheoremVerdict> {
    debug_assert_eq!(conn.order(), space.size());
    let observed = report
        .integer_multiset()
        .ok_or_else(|| LabError::Unsupported("incidence spectrum must be integer-valued".into()))?;
    let observed: Vec<(i128, u64)> = observed.into_iter().collect();
    let predicted = predicted_spectrum_multiset(space);
    let multiset_matches = observed == predicted;

    // The q^{dim−1} eigenspace must be spanned by exactly the annihilator
    // characters χ_{p_{C,α}}, C ≠ 0.
    let mid = (space.q() as i128).pow(space.dim() as u32 - 1);
    let observed_labels: BTreeSet<u64> = report
        .labels_with_integer_eigenvalue(mid)
        .into_iter()
        .collect();
    let gram = trace_gram(space.ctx());
    let mut expected_labels = BTreeSet::new();
    for pt in space.points()? {
        for c in space.ctx().elements().skip(1) {
            let ann = space.annihilator_poly(c, &pt);
            expected_labels.insert(char_label(space, &gram, &ann));
        }
    }
    let eigencharacters_match = observed_labels == expected_labels;

    Ok(SpectrumTheoremVerdict {
        multiset_matches,
        eigencharacters_match,
        predicted,
        observed,
        lambda: report.lambda,
    })
}

/// Full spectrum verification. Refuses on spaces without the star condition,
/// where the three-eigenvalue statement is not claimed.
pub fn verify_spectrum_theorem(
    space: &PolySpace,
    conn: &ConnectionFunction,
) -> Result<SpectrumTheoremVerdict> {
    let star = space.has_property_star();
    if !star.holds() {
        return Err(LabError::HypothesesNotMet(format!(
            "spectrum statement needs the star condition; {}",
            star.describe()
        )));
    }
    let report = cayley::spectrum(conn, &space.budget())?;
    spectrum_comparison(space, conn, &report)
}

#[derive(Debug, Clone, Serialize)]
pub struct KeyLemmaVerdict {
    /// q^{dim−1}, the vanishing-subspace size the lemma asserts.
    pub expected_vanishing: u64,
    /// Points α where |V_α| deviates, with the actual count.
    pub vanishing_failures: Vec<(u64, u64)>,
    /// Every χ_{p_{C,α}} restricts trivially to V_α, and the q annihilator
    /// polynomials per point are distinct.
    pub restriction_ok: bool,
    /// Annihilator families of distinct points meet only at C = 0.
    pub disjoint_ok: bool,
}

impl KeyLemmaVerdict {
    pub fn all_hold(&self) -> bool {
        self.vanishing_failures.is_empty() && self.restriction_ok && self.disjoint_ok
    }
}

/// Checks the three parts of the vanishing-subspace lemma by enumeration.
/// Runs on any space; star spaces must pass all three.
pub fn verify_key_lemma(space: &PolySpace) -> Result<KeyLemmaVerdict> {
    let ctx = space.ctx();
    let points = space.points()?;
    let expected = space.size() / space.q();

    let mut vanishing_failures = Vec::new();
    for (idx, pt) in points.iter().enumerate() {
        let count = space.vanishing_count(pt)?;
        if count != expected {
            vanishing_failures.push((idx as u64, count));
        }
    }

    // Part 2: ⟨p_{C,α}, f⟩ has zero trace for every f ∈ V_α — computed from
    // the annihilator coefficients, independently of the evaluation route —
    // and the q annihilators per point are pairwise distinct.
    let mut restriction_ok = true;
    'outer: for pt in &points {
        let weights = space.monomial_weights(pt);
        let annihilators: Vec<Poly> = ctx
            .elements()
            .map(|c| space.annihilator_poly(c, pt))
            .collect();
        let distinct: BTreeSet<u64> = annihilators.iter().map(|a| space.poly_index(a)).collect();
        if distinct.len() as u64 != space.q() {
            restriction_ok = false;
            break;
        }
        for k in 0..space.size() {
            let f = space.poly_from_index(k);
            if space.eval_with_weights(&f, &weights) != FieldElem::ZERO {
                continue;
            }
            for ann in annihilators.iter().skip(1) {
                if ctx.trace(space.inner_product(ann, &f)) != 0 {
                    restriction_ok = false;
                    break 'outer;
                }
            }
        }
    }

    // Part 3: {p_{C,α} : C ≠ 0} are disjoint across points.
    let mut owner: BTreeMap<u64, usize> = BTreeMap::new();
    let mut disjoint_ok = true;
    'disjoint: for (idx, pt) in points.iter().enumerate() {
        for c in ctx.elements().skip(1) {
            let key = space.poly_index(&space.annihilator_poly(c, pt));
            if let Some(&prev) = owner.get(&key) {
                if prev != idx {
                    disjoint_ok = false;
                    break 'disjoint;
                }
            }
            owner.insert(key, idx);
        }
    }

    Ok(KeyLemmaVerdict {
        expected_vanishing: expected,
        vanishing_failures,
        restriction_ok,
        disjoint_ok,
    })
}

fn require_star(space: &PolySpace, statement: &str) -> Result<()> {
    let star = space.has_property_star();
    if star.holds() {
        Ok(())
    } else {
        Err(LabError::HypothesesNotMet(format!(
            "{statement} needs the star condition; {}",
            star.describe()
        )))
    }
}

/// |Σ N_q(f−f') − q^{m−1}|𝓛||𝓛'|| ≤ q^{dim−1}·sqrt(|𝓛||𝓛'|), compared as
/// exact integers after squaring.
#[derive(Debug, Clone, Serialize)]
pub struct CrossVersionCheck {
    pub sum: i128,
    pub main: i128,
    pub deviation: i128,
    pub rhs: f64,
    pub holds: bool,
}

pub fn verify_cross_version(
    space: &PolySpace,
    conn: &ConnectionFunction,
    l: &PolySet,
    lp: &PolySet,
) -> Result<CrossVersionCheck> {
    require_star(space, "the cross incidence bound")?;
    let sum = pp_incidence_sum(space, conn, l, lp)?;
    let q = space.q() as i128;
    let main = q.pow(space.m() - 1) * l.len() as i128 * lp.len() as i128;
    let deviation = (sum - main).abs();
    let factor = q.pow(space.dim() as u32 - 1);
    let rhs_sq = factor
        .checked_mul(factor)
        .and_then(|f| f.checked_mul(l.len() as i128))
        .and_then(|f| f.checked_mul(lp.len() as i128))
        .expect("rhs² fits i128 at desk scale");
    let holds = deviation.checked_mul(deviation).expect("lhs² fits") <= rhs_sq;
    Ok(CrossVersionCheck {
        sum,
        main,
        deviation,
        rhs: factor as f64 * ((l.len() * lp.len()) as f64).sqrt(),
        holds,
    })
}

/// q^{m−1}|𝓛|² ≤ Σ N_q(f−f') ≤ q^{m−1}|𝓛|² + q^{dim−1}|𝓛|, both exact.
#[derive(Debug, Clone, Serialize)]
pub struct SubspaceBoundsCheck {
    pub sum: i128,
    pub lower: i128,
    pub upper: i128,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

pub fn verify_subspace_bounds(
    space: &PolySpace,
    conn: &ConnectionFunction,
    l: &PolySet,
) -> Result<SubspaceBoundsCheck> {
    require_star(space, "the incidence sum bounds")?;
    let sum = pp_incidence_sum(space, conn, l, l)?;
    let q = space.q() as i128;
    let lower = q.pow(space.m() - 1) * l.len() as i128 * l.len() as i128;
    let upper = lower + q.pow(space.dim() as u32 - 1) * l.len() as i128;
    Ok(SubspaceBoundsCheck {
        sum,
        lower,
        upper,
        lower_holds: lower <= sum,
        upper_holds: sum <= upper,
    })
}

/// |I(𝓟,𝓛) − |𝓟||𝓛|/q| ≤ q^{(dim−1)/2}·sqrt(|𝓟||𝓛|), compared exactly via
/// |q·I − |𝓟||𝓛||² ≤ q^{dim+1}·|𝓟||𝓛|.
#[derive(Debug, Clone, Serialize)]
pub struct PointPolyCheck {
    pub incidences: u64,
    /// |q·I − |𝓟||𝓛||, the deviation scaled by q.
    pub scaled_deviation: i128,
    pub deviation: f64,
    pub rhs: f64,
    pub holds: bool,
    /// True when V is a full degree-bounded space, where this is also the
    /// unrestricted point–polynomial statement.
    pub full_space_case: bool,
}

pub fn verify_point_poly_bound(
    space: &PolySpace,
    points: &PointSet,
    l: &PolySet,
) -> Result<PointPolyCheck> {
    require_star(space, "the point-polynomial bound")?;
    let incidences = point_poly_incidences(space, points, l)?;
    let q = space.q() as i128;
    let pl = points.len() as i128 * l.len() as i128;
    let scaled_deviation = (q * incidences as i128 - pl).abs();
    let rhs_sq = q
        .checked_pow(space.dim() as u32 + 1)
        .and_then(|f| f.checked_mul(pl))
        .expect("rhs² fits i128 at desk scale");
    let holds = scaled_deviation
        .checked_mul(scaled_deviation)
        .expect("lhs² fits")
        <= rhs_sq;
    Ok(PointPolyCheck {
        incidences,
        scaled_deviation,
        deviation: scaled_deviation as f64 / space.q() as f64,
        rhs: (space.q() as f64).powf((space.dim() as f64 - 1.0) / 2.0) * (pl as f64).sqrt(),
        holds,
        full_space_case: space.is_full_space(),
    })
}

/// The two Cauchy–Schwarz counting bounds on I(𝓟,𝓛) for a full space
/// V_{m,r}, their minimum, and the comparison against the spectral term.
#[derive(Debug, Clone, Serialize)]
pub struct CauchySchwarzCheck {
    pub incidences: u64,
    pub branch_points: f64,
    pub branch_polys: f64,
    pub bound: f64,
    pub holds: bool,
    pub spectral_rhs: f64,
    pub spectral_smaller: bool,
    /// |𝓟| > q and r·|𝓛| > q^{dim−m}: the regime where the spectral error
    /// term undercuts the counting bound.
    pub comparison_regime: bool,
}

pub fn cauchy_schwarz_bound(
    space: &PolySpace,
    points: &PointSet,
    l: &PolySet,
) -> Result<CauchySchwarzCheck> {
    if !space.is_full_space() {
        return Err(LabError::HypothesesNotMet(
            "the counting bound reads r and dim off a full degree-bounded space".into(),
        ));
    }
    let incidences = point_poly_incidences(space, points, l)?;
    let q = space.q() as f64;
    let r = space.max_total_degree() as f64;
    let np = points.len() as f64;
    let nl = l.len() as f64;
    let dim = space.dim() as f64;
    let branch_polys = nl + q.powf(dim / 2.0 - 1.0) * np * nl.sqrt();
    let branch_points = np + r.sqrt() * q.powf((space.m() as f64 - 1.0) / 2.0) * np.sqrt() * nl;
    let bound = branch_polys.min(branch_points);
    let spectral_rhs = q.powf((dim - 1.0) / 2.0) * (np * nl).sqrt();
    let scale = (np * nl).max(1.0);
    let comparison_regime = points.len() as f64 > q
        && (l.len() as f64) * r > (space.q() as f64).powi(space.dim() as i32 - space.m() as i32);
    Ok(CauchySchwarzCheck {
        incidences,
        branch_points,
        branch_polys,
        bound,
        holds: (incidences as f64) <= bound + 1e-9 * scale,
        spectral_rhs,
        spectral_smaller: spectral_rhs < bound,
        comparison_regime,
    })
}

/// The structured instance that separates dim 𝓛 from the star condition:
/// 𝓟₀ = {(α, 0)} and 𝓛₀ = x₁·V_{m,r−1}. Its incidence count satisfies
/// q·I = (2q−1)·q^{m−1}·|𝓛₀| exactly, which exceeds what the dim-𝓛₀ error
/// term would allow.
#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub q: u64,
    pub m: u32,
    pub r: u32,
    pub l0_size: u64,
    pub incidences: u64,
    /// q·I and (2q−1)·q^{m−1}·|𝓛₀|, which must be equal.
    pub identity_lhs: i128,
    pub identity_rhs: i128,
    pub identity_holds: bool,
    /// I / (q^{m−1}|𝓛₀|) = 2 − 1/q.
    pub concentration_ratio: f64,
    /// Deviation from the main term versus the would-be error term
    /// q^{(dim 𝓛₀ − 1)/2}·sqrt(|𝓟₀||𝓛₀|); above 1 refutes that bound.
    pub deviation: f64,
    pub invalid_rhs: f64,
    pub ratio_to_invalid: f64,
    /// I versus main + invalid error term.
    pub ratio_to_naive_bound: f64,
}

pub fn example_counterexample(
    ctx: Arc<FieldCtx>,
    m: u32,
    r: u32,
    budget: Budget,
) -> Result<CounterexampleReport> {
    if m < 1 || r < 1 {
        return Err(LabError::InvalidParameter(
            "the counterexample needs m >= 1 and r >= 1".into(),
        ));
    }
    let space = PolySpace::x1_shifted_space(ctx, m, r, budget)?;
    let q = space.q();
    let qm = q.pow(m);
    // 𝓟₀ = {(α, 0): α ∈ F_q^m} encodes as the first q^m point indices.
    let points = PointSet::new(&space, (0..qm).collect())?;
    let l0 = PolySet::full(&space);
    let incidences = point_poly_incidences(&space, &points, &l0)?;

    let qi = q as i128;
    let identity_lhs = qi * incidences as i128;
    let identity_rhs = (2 * qi - 1) * qi.pow(m - 1) * l0.len() as i128;

    let main = qi.pow(m - 1) * l0.len() as i128;
    let deviation = incidences as f64 - main as f64;
    let dim = space.dim() as f64;
    let invalid_rhs =
        (q as f64).powf((dim - 1.0) / 2.0) * ((points.len() * l0.len()) as f64).sqrt();
    Ok(CounterexampleReport {
        q,
        m,
        r,
        l0_size: l0.len(),
        incidences,
        identity_lhs,
        identity_rhs,
        identity_holds: identity_lhs == identity_rhs,
        concentration_ratio: incidences as f64 / main as f64,
        deviation,
        invalid_rhs,
        ratio_to_invalid: deviation / invalid_rhs,
        ratio_to_naive_bound: incidences as f64 / (main as f64 + invalid_rhs),
    })
}

/// Subset families probed by the concentration scanner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleStrategy {
    UniformRandom,
    LinearSubspace,
    Coset,
    X1Shifted,
}

impl SampleStrategy {
    pub const ALL: [SampleStrategy; 4] = [
        SampleStrategy::UniformRandom,
        SampleStrategy::LinearSubspace,
        SampleStrategy::Coset,
        SampleStrategy::X1Shifted,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            SampleStrategy::UniformRandom => "uniform-random",
            SampleStrategy::LinearSubspace => "linear-subspace",
            SampleStrategy::Coset => "coset",
            SampleStrategy::X1Shifted => "x1-shifted",
        }
    }

    pub fn parse(name: &str) -> Result<SampleStrategy> {
        SampleStrategy::ALL
            .into_iter()
            .find(|s| s.label() == name)
            .ok_or_else(|| LabError::InvalidParameter(format!("unknown strategy {name:?}")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TauScanRow {
    pub strategy: &'static str,
    pub size: u64,
    pub trials: u32,
    pub mean_ratio: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Exact check of ratio ∈ [1, 1 + q^{dim−1}/(q^{m−1}|𝓛|)]; only claimed
    /// on star spaces.
    pub within_star_bound: Option<bool>,
    pub seed: u64,
}

/// Concentration scan: Σ N_q(f−f') / (q^{m−1}|𝓛|²) over sampled families.
/// Deterministic under the seed; every row carries its derived sub-seed.
pub fn tau_scan(
    space: &PolySpace,
    conn: &ConnectionFunction,
    strategies: &[SampleStrategy],
    sizes: &[u64],
    trials: u32,
    seed: u64,
) -> Result<Vec<TauScanRow>> {
    let star = space.has_property_star().holds();
    let mut rows = Vec::new();
    for (si, &strategy) in strategies.iter().enumerate() {
        let requested: Vec<u64> = match strategy {
            // the shifted family has exactly one size
            SampleStrategy::X1Shifted => vec![0],
            _ => sizes.to_vec(),
        };
        for &size in &requested {
            let row_seed = crate::rng::derive_seed(seed, &[si as u64, size]);
            let mut rng = SplitMix64::new(row_seed);
            let mut ratios = Vec::new();
            let mut bound_ok = true;
            let mut actual_size = size;
            let trial_count = match strategy {
                SampleStrategy::X1Shifted => 1,
                _ => trials.max(1),
            };
            for _ in 0..trial_count {
                let l = sample_family(space, strategy, size, &mut rng)?;
                if l.is_empty() {
                    return Err(LabError::InvalidParameter(
                        "tau scan needs nonempty families".into(),
                    ));
                }
                actual_size = l.len();
                let sum = pp_incidence_sum(space, conn, &l, &l)?;
                let q = space.q() as i128;
                let main = q.pow(space.m() - 1) * l.len() as i128 * l.len() as i128;
                ratios.push(sum as f64 / main as f64);
                if star {
                    let upper = main + q.pow(space.dim() as u32 - 1) * l.len() as i128;
                    bound_ok &= main <= sum && sum <= upper;
                }
            }
            let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
            rows.push(TauScanRow {
                strategy: strategy.label(),
                size: actual_size,
                trials: trial_count,
                mean_ratio: mean,
                min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
                max_ratio: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                within_star_bound: star.then_some(bound_ok),
                seed: row_seed,
            });
        }
    }
    Ok(rows)
}

fn sample_family(
    space: &PolySpace,
    strategy: SampleStrategy,
    size: u64,
    rng: &mut SplitMix64,
) -> Result<PolySet> {
    match strategy {
        SampleStrategy::UniformRandom => {
            let k = size.min(space.size()).max(1);
            PolySet::new(space, rng.sample_distinct(space.size(), k))
        }
        SampleStrategy::LinearSubspace => {
            let basis = random_independent(space, subspace_dim(space, size)?, rng);
            PolySet::new(space, enumerate_span(space, &basis, None))
        }
        SampleStrategy::Coset => {
            let basis = random_independent(space, subspace_dim(space, size)?, rng);
            let shift = space.poly_from_index(rng.below(space.size()));
            PolySet::new(space, enumerate_span(space, &basis, Some(&shift)))
        }
        SampleStrategy::X1Shifted => {
            // members supported on exponents with first coordinate >= 1
            let positions: Vec<usize> = space
                .support()
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, e)| e[0] >= 1)
                .map(|(j, _)| j)
                .collect();
            let q = space.q();
            let count = q.pow(positions.len() as u32);
            let mut members = Vec::with_capacity(count as usize);
            for combo in 0..count {
                let mut index = 0u64;
                let mut c = combo;
                for &j in &positions {
                    index += c % q * q.pow(j as u32);
                    c /= q;
                }
                members.push(index);
            }
            PolySet::new(space, members)
        }
    }
}

fn subspace_dim(space: &PolySpace, size: u64) -> Result<u32> {
    let q = space.q();
    let mut d = 0u32;
    let mut n = 1u64;
    while n < size {
        n *= q;
        d += 1;
    }
    if n != size || d as usize > space.dim() {
        return Err(LabError::InvalidParameter(format!(
            "subspace strategies need a size that is a power of q = {q} up to |V|, got {size}"
        )));
    }
    Ok(d)
}

/// d random linearly independent members, by rejection on the rank.
fn random_independent(space: &PolySpace, d: u32, rng: &mut SplitMix64) -> Vec<Poly> {
    'retry: loop {
        let candidates: Vec<Poly> = (0..d)
            .map(|_| space.poly_from_index(rng.below(space.size())))
            .collect();
        if rank(space, &candidates) == d as usize {
            break 'retry candidates;
        }
    }
}

#[allow(clippy::needless_range_loop)] // pivot row and target row alias
fn rank(space: &PolySpace, rows: &[Poly]) -> usize {
    let ctx = space.ctx();
    let mut mat: Vec<Vec<FieldElem>> = rows.iter().map(|p| p.coeffs.clone()).collect();
    let mut rank = 0usize;
    for col in 0..space.dim() {
        let Some(pivot) = (rank..mat.len()).find(|&r| mat[r][col] != FieldElem::ZERO) else {
            continue;
        };
        mat.swap(rank, pivot);
        let inv = ctx.inv(mat[rank][col]).expect("pivot nonzero");
        for c in 0..space.dim() {
            mat[rank][c] = ctx.mul(mat[rank][c], inv);
        }
        for r in 0..mat.len() {
            if r != rank && mat[r][col] != FieldElem::ZERO {
                let factor = mat[r][col];
                for c in 0..space.dim() {
                    let t = ctx.mul(factor, mat[rank][c]);
                    mat[r][c] = ctx.sub(mat[r][c], t);
                }
            }
        }
        rank += 1;
        if rank == mat.len() {
            break;
        }
    }
    rank
}

fn enumerate_span(space: &PolySpace, basis: &[Poly], shift: Option<&Poly>) -> Vec<u64> {
    let q = space.q();
    let count = q.pow(basis.len() as u32);
    let mut out = Vec::with_capacity(count as usize);
    for combo in 0..count {
        let mut acc = match shift {
            Some(s) => s.clone(),
            None => space.zero_poly(),
        };
        let mut c = combo;
        for b in basis {
            let scalar = space.ctx().elem(c % q).expect("digit < q");
            c /= q;
            if scalar != FieldElem::ZERO {
                let scaled = Poly {
                    coeffs: b
                        .coeffs
                        .iter()
                        .map(|&x| space.ctx().mul(scalar, x))
                        .collect(),
                };
                acc = space.add_polys(&acc, &scaled);
            }
        }
        out.push(space.poly_index(&acc));
    }
    out
}
