//! Monomial-supported polynomial subspaces of F_q[x_1..x_m].
//!
//! A space is the set of all F_q-linear combinations of the monomials x^i,
//! i ∈ 𝓘, for a finite set 𝓘 ⊆ ℕ^m of exponent vectors. A member polynomial
//! is its coefficient vector over 𝓘 in lexicographic order, and the whole
//! space is enumerated by an odometer over those coefficients, so polynomial
//! index k has coefficient (k / q^j) mod q at support position j.
//!
//! Exponents may exceed q − 1 and are never reduced: evaluation uses field
//! exponentiation as written. Supports are treated formally — two supports
//! that induce the same evaluation map are still distinct spaces.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::ffield::{FieldCtx, FieldElem};
use crate::Budget;

/// The exponent set 𝓘: distinct vectors in ℕ^m, kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialSupport {
    m: u32,
    exponents: Vec<Vec<u32>>,
}

impl MonomialSupport {
    pub fn new(m: u32, mut exponents: Vec<Vec<u32>>) -> Result<MonomialSupport> {
        if m == 0 {
            return Err(LabError::InvalidParameter(
                "supports need at least one variable".into(),
            ));
        }
        if exponents.is_empty() {
            return Err(LabError::InvalidParameter("empty monomial support".into()));
        }
        for e in &exponents {
            if e.len() != m as usize {
                return Err(LabError::InvalidParameter(format!(
                    "exponent vector {e:?} does not have {m} entries"
                )));
            }
        }
        exponents.sort();
        if exponents.windows(2).any(|w| w[0] == w[1]) {
            return Err(LabError::InvalidParameter(
                "duplicate exponent vector in support".into(),
            ));
        }
        Ok(MonomialSupport { m, exponents })
    }

    /// All monomials of total degree at most r: the support of V_{m,r}.
    pub fn full(m: u32, r: u32) -> Result<MonomialSupport> {
        let mut exponents = Vec::new();
        let mut current = vec![0u32; m as usize];
        loop {
            exponents.push(current.clone());
            // next vector with total degree ≤ r, odometer with degree carry
            let mut j = m as usize;
            loop {
                if j == 0 {
                    return MonomialSupport::new(m, exponents);
                }
                j -= 1;
                current[j] += 1;
                if current.iter().sum::<u32>() <= r {
                    break;
                }
                current[j] = 0;
            }
        }
    }

    /// The support of x_1 · V_{m,r−1}: every exponent of V_{m,r−1} shifted by
    /// one in the first coordinate. Misses the constant monomial.
    pub fn x1_shifted(m: u32, r: u32) -> Result<MonomialSupport> {
        if r == 0 {
            return Err(LabError::InvalidParameter(
                "x1-shifted support needs r >= 1".into(),
            ));
        }
        let base = MonomialSupport::full(m, r - 1)?;
        let exponents = base
            .exponents
            .into_iter()
            .map(|mut e| {
                e[0] += 1;
                e
            })
            .collect();
        MonomialSupport::new(m, exponents)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn max_total_degree(&self) -> u32 {
        self.exponents
            .iter()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }
}

/// Support descriptor as it appears in config files: either a preset name
/// (`"full:m,r"`, `"x1-shifted:m,r"`) or `{"m": int, "exponents": [[int]]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum SupportDescriptor {
    Preset(String),
    Explicit { m: u32, exponents: Vec<Vec<u32>> },
}

impl SupportDescriptor {
    pub fn build(&self) -> Result<MonomialSupport> {
        match self {
            SupportDescriptor::Explicit { m, exponents } => {
                MonomialSupport::new(*m, exponents.clone())
            }
            SupportDescriptor::Preset(name) => {
                let (kind, args) = name.split_once(':').ok_or_else(|| {
                    LabError::InvalidParameter(format!("unrecognized support descriptor {name:?}"))
                })?;
                let (m, r) = args.split_once(',').ok_or_else(|| {
                    LabError::InvalidParameter(format!(
                        "support preset {name:?} needs the form kind:m,r"
                    ))
                })?;
                let m: u32 = m.trim().parse().map_err(|_| {
                    LabError::InvalidParameter(format!("bad variable count in {name:?}"))
                })?;
                let r: u32 = r
                    .trim()
                    .parse()
                    .map_err(|_| LabError::InvalidParameter(format!("bad degree in {name:?}")))?;
                match kind {
                    "full" => MonomialSupport::full(m, r),
                    "x1-shifted" => MonomialSupport::x1_shifted(m, r),
                    other => Err(LabError::InvalidParameter(format!(
                        "unknown support preset {other:?}"
                    ))),
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            SupportDescriptor::Preset(name) => name.clone(),
            SupportDescriptor::Explicit { m, exponents } => {
                format!("custom:m={m},n={}", exponents.len())
            }
        }
    }
}

/// Verdict of the monomial-basis condition: the constant monomial is present
/// and every axis carries a pure power x_i^{k_i} with gcd(k_i, q−1) = 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum StarVerdict {
    Holds { axis_powers: Vec<u64> },
    MissingConstant,
    NoUnitAxisPower { axis: u32 },
}

impl StarVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, StarVerdict::Holds { .. })
    }

    pub fn describe(&self) -> String {
        match self {
            StarVerdict::Holds { axis_powers } => {
                format!("holds with axis powers {axis_powers:?}")
            }
            StarVerdict::MissingConstant => "fails: no constant monomial".into(),
            StarVerdict::NoUnitAxisPower { axis } => format!(
                "fails: no pure power of x_{} with exponent coprime to q-1",
                axis + 1
            ),
        }
    }
}

/// A polynomial of the space: one coefficient per support entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    pub coeffs: Vec<FieldElem>,
}

/// A monomial-supported subspace V ⊆ F_q[x_1..x_m] together with the budgets
/// that gate its enumerations. Immutable; enumeration state lives in callers.
#[derive(Debug, Clone)]
pub struct PolySpace {
    ctx: Arc<FieldCtx>,
    support: MonomialSupport,
    size: u64,
    budget: Budget,
}

impl PolySpace {
    pub fn new(ctx: Arc<FieldCtx>, support: MonomialSupport, budget: Budget) -> Result<PolySpace> {
        let q = ctx.q();
        let dim = support.dim() as u32;
        let size = q
            .checked_pow(dim)
            .filter(|&s| s <= budget.max_space)
            .ok_or(LabError::SizeLimit {
                what: "polynomial space size q^dim",
                required: (q as u128).saturating_pow(dim),
                limit: budget.max_space,
            })?;
        Ok(PolySpace {
            ctx,
            support,
            size,
            budget,
        })
    }

    /// V_{m,r}: all m-variate polynomials of total degree ≤ r.
    pub fn full_space(ctx: Arc<FieldCtx>, m: u32, r: u32, budget: Budget) -> Result<PolySpace> {
        PolySpace::new(ctx, MonomialSupport::full(m, r)?, budget)
    }

    pub fn x1_shifted_space(
        ctx: Arc<FieldCtx>,
        m: u32,
        r: u32,
        budget: Budget,
    ) -> Result<PolySpace> {
        PolySpace::new(ctx, MonomialSupport::x1_shifted(m, r)?, budget)
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn ctx_arc(&self) -> Arc<FieldCtx> {
        Arc::clone(&self.ctx)
    }

    pub fn support(&self) -> &MonomialSupport {
        &self.support
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn q(&self) -> u64 {
        self.ctx.q()
    }

    pub fn m(&self) -> u32 {
        self.support.m
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    /// |V| = q^dim.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// q^m, the number of evaluation points, gated by the point budget.
    pub fn point_count(&self) -> Result<u64> {
        self.q()
            .checked_pow(self.m())
            .filter(|&n| n <= self.budget.max_points)
            .ok_or(LabError::SizeLimit {
                what: "evaluation grid size q^m",
                required: (self.q() as u128).saturating_pow(self.m()),
                limit: self.budget.max_points,
            })
    }

    pub fn max_total_degree(&self) -> u32 {
        self.support.max_total_degree()
    }

    /// True when the support is exactly that of V_{m,r} for r = max degree.
    pub fn is_full_space(&self) -> bool {
        MonomialSupport::full(self.m(), self.max_total_degree())
            .map(|f| f == self.support)
            .unwrap_or(false)
    }

    pub fn zero_poly(&self) -> Poly {
        Poly {
            coeffs: vec![FieldElem::ZERO; self.dim()],
        }
    }

    /// Odometer decoding: coefficient j of polynomial k is digit j of k base q.
    pub fn poly_from_index(&self, index: u64) -> Poly {
        debug_assert!(index < self.size);
        let q = self.q();
        let mut coeffs = Vec::with_capacity(self.dim());
        let mut k = index;
        for _ in 0..self.dim() {
            coeffs.push(self.ctx.elem(k % q).expect("digit < q"));
            k /= q;
        }
        Poly { coeffs }
    }

    pub fn poly_index(&self, poly: &Poly) -> u64 {
        debug_assert_eq!(poly.coeffs.len(), self.dim());
        let q = self.q();
        let mut k = 0u64;
        for c in poly.coeffs.iter().rev() {
            k = k * q + c.index();
        }
        k
    }

    pub fn add_polys(&self, a: &Poly, b: &Poly) -> Poly {
        Poly {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| self.ctx.add(x, y))
                .collect(),
        }
    }

    pub fn sub_polys(&self, a: &Poly, b: &Poly) -> Poly {
        Poly {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| self.ctx.sub(x, y))
                .collect(),
        }
    }

    /// ⟨f, g⟩ = Σ_i f_i g_i over the support.
    pub fn inner_product(&self, a: &Poly, b: &Poly) -> FieldElem {
        let mut acc = self.ctx.zero();
        for (&x, &y) in a.coeffs.iter().zip(&b.coeffs) {
            acc = self.ctx.add(acc, self.ctx.mul(x, y));
        }
        acc
    }

    /// Monomial values x^i at a point, one per support entry; 0⁰ = 1.
    pub fn monomial_weights(&self, point: &[FieldElem]) -> Vec<FieldElem> {
        debug_assert_eq!(point.len(), self.m() as usize);
        self.support
            .exponents
            .iter()
            .map(|exp| {
                let mut w = self.ctx.one();
                for (&x, &e) in point.iter().zip(exp) {
                    if e > 0 {
                        w = self.ctx.mul(w, self.ctx.pow(x, e as u64));
                    }
                }
                w
            })
            .collect()
    }

    pub fn eval_with_weights(&self, f: &Poly, weights: &[FieldElem]) -> FieldElem {
        let mut acc = self.ctx.zero();
        for (&c, &w) in f.coeffs.iter().zip(weights) {
            acc = self.ctx.add(acc, self.ctx.mul(c, w));
        }
        acc
    }

    /// f(point) = Σ_{i∈𝓘} f_i · Π_j point_j^{i_j}.
    pub fn evaluate(&self, f: &Poly, point: &[FieldElem]) -> FieldElem {
        self.eval_with_weights(f, &self.monomial_weights(point))
    }

    /// All points of F_q^m in odometer order (coordinate 0 least significant).
    pub fn points(&self) -> Result<Vec<Vec<FieldElem>>> {
        let n = self.point_count()?;
        let q = self.q();
        let m = self.m() as usize;
        let mut out = Vec::with_capacity(n as usize);
        for idx in 0..n {
            let mut pt = Vec::with_capacity(m);
            let mut k = idx;
            for _ in 0..m {
                pt.push(self.ctx.elem(k % q).expect("digit < q"));
                k /= q;
            }
            out.push(pt);
        }
        Ok(out)
    }

    pub fn point_index(&self, point: &[FieldElem]) -> u64 {
        let q = self.q();
        let mut k = 0u64;
        for c in point.iter().rev() {
            k = k * q + c.index();
        }
        k
    }

    /// Checks the monomial-basis condition that drives the spectrum result:
    /// constant present, and per axis a unit-exponent pure power.
    pub fn has_property_star(&self) -> StarVerdict {
        let exps = &self.support.exponents;
        if !exps.iter().any(|e| e.iter().all(|&x| x == 0)) {
            return StarVerdict::MissingConstant;
        }
        let mut axis_powers = Vec::with_capacity(self.m() as usize);
        for axis in 0..self.m() as usize {
            let found = exps
                .iter()
                .filter(|e| e[axis] > 0 && e.iter().enumerate().all(|(j, &x)| j == axis || x == 0))
                .map(|e| e[axis] as u64)
                .filter(|&k| self.ctx.is_unit_exponent(k))
                .min();
            match found {
                Some(k) => axis_powers.push(k),
                None => return StarVerdict::NoUnitAxisPower { axis: axis as u32 },
            }
        }
        StarVerdict::Holds { axis_powers }
    }

    /// N_q(f): exact zero count over F_q^m by full enumeration.
    pub fn count_zeros(&self, f: &Poly) -> Result<u64> {
        let mut zeros = 0;
        for pt in self.points()? {
            if self.evaluate(f, &pt) == self.ctx.zero() {
                zeros += 1;
            }
        }
        Ok(zeros)
    }

    /// |V_α| = |{f ∈ V : f(α) = 0}| by enumerating V. Equals q^{dim−1}
    /// whenever the star condition holds; reports the actual count always.
    pub fn vanishing_count(&self, alpha: &[FieldElem]) -> Result<u64> {
        let weights = self.monomial_weights(alpha);
        let mut count = 0;
        // Incremental odometer walk: f(α) is updated per digit change.
        let q = self.q();
        let dim = self.dim();
        let mut digits = vec![0u64; dim];
        let mut value = self.ctx.zero();
        let elems: Vec<FieldElem> = self.ctx.elements().collect();
        let mut index = 0u64;
        loop {
            if value == self.ctx.zero() {
                count += 1;
            }
            index += 1;
            if index == self.size {
                break;
            }
            let mut j = 0;
            loop {
                let old = digits[j];
                let new = (old + 1) % q;
                digits[j] = new;
                let delta = self.ctx.sub(elems[new as usize], elems[old as usize]);
                value = self.ctx.add(value, self.ctx.mul(delta, weights[j]));
                if new != 0 {
                    break;
                }
                j += 1;
            }
        }
        Ok(count)
    }

    /// The annihilator polynomial p_{C,α}: coefficient C·α^i at support
    /// position i, so that ⟨p_{C,α}, f⟩ = C·f(α) for every f ∈ V.
    pub fn annihilator_poly(&self, c: FieldElem, alpha: &[FieldElem]) -> Poly {
        let weights = self.monomial_weights(alpha);
        Poly {
            coeffs: weights.iter().map(|&w| self.ctx.mul(c, w)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(p: u32, s: u32, m: u32, r: u32) -> PolySpace {
        let ctx = Arc::new(FieldCtx::new(p, s).unwrap());
        PolySpace::full_space(ctx, m, r, Budget::default()).unwrap()
    }

    #[test]
    fn full_space_dimensions() {
        assert_eq!(space(3, 1, 1, 2).dim(), 3);
        let s21 = space(3, 1, 2, 1);
        assert_eq!(s21.dim(), 3);
        assert_eq!(
            s21.support().exponents(),
            &[vec![0, 0], vec![0, 1], vec![1, 0]]
        );
        assert_eq!(space(3, 1, 2, 2).dim(), 6);
    }

    #[test]
    fn x1_shifted_support() {
        let s = MonomialSupport::x1_shifted(2, 2).unwrap();
        assert_eq!(s.exponents(), &[vec![1, 0], vec![1, 1], vec![2, 0]]);
        assert_eq!(s.max_total_degree(), 2);
    }

    #[test]
    fn property_star_examples() {
        // full spaces always qualify with k_i = 1
        match space(3, 1, 2, 2).has_property_star() {
            StarVerdict::Holds { axis_powers } => assert_eq!(axis_powers, vec![1, 1]),
            v => panic!("expected star condition, got {v:?}"),
        }
        // x1-shifted support misses the constant
        let ctx = Arc::new(FieldCtx::new(3, 1).unwrap());
        let shifted = PolySpace::x1_shifted_space(ctx, 2, 2, Budget::default()).unwrap();
        assert_eq!(shifted.has_property_star(), StarVerdict::MissingConstant);
        // GF(4): only axis power k=3 but gcd(3, 3) = 3
        let ctx4 = Arc::new(FieldCtx::new(2, 2).unwrap());
        let sup = MonomialSupport::new(2, vec![vec![0, 0], vec![3, 0], vec![0, 1]]).unwrap();
        let sp = PolySpace::new(ctx4, sup, Budget::default()).unwrap();
        assert_eq!(
            sp.has_property_star(),
            StarVerdict::NoUnitAxisPower { axis: 0 }
        );
    }

    #[test]
    fn evaluate_examples() {
        let s = space(3, 1, 1, 2);
        let ctx = s.ctx();
        let zero = s.zero_poly();
        for pt in s.points().unwrap() {
            assert_eq!(s.evaluate(&zero, &pt), ctx.zero());
        }
        // f = x² over GF(3) at 2 → 1
        let f = s.poly_from_index(9); // digits (0,0,1): coefficient 1 on x²
        assert_eq!(
            s.evaluate(&f, &[ctx.elem(2).unwrap()]),
            ctx.elem(1).unwrap()
        );

        // GF(4): f = 1 + t·x at x = t gives 1 + t² = t
        let ctx4 = Arc::new(FieldCtx::new(2, 2).unwrap());
        let s4 = PolySpace::full_space(ctx4, 1, 1, Budget::default()).unwrap();
        let t = s4.ctx().elem(2).unwrap();
        let f = Poly {
            coeffs: vec![s4.ctx().one(), t],
        };
        assert_eq!(s4.evaluate(&f, &[t]), t);
    }

    #[test]
    fn count_zeros_examples() {
        let s = space(3, 1, 2, 1);
        assert_eq!(s.count_zeros(&s.zero_poly()).unwrap(), 9);
        // f = x₁: support order is (0,0), (0,1), (1,0) so x₁ is position 2
        let f = s.poly_from_index(9);
        assert_eq!(f.coeffs[2].index(), 1);
        assert_eq!(s.count_zeros(&f).unwrap(), 3);
        // x² + 1 has no roots in GF(3)
        let s1 = space(3, 1, 1, 2);
        let f = s1.poly_from_index(1 + 9); // 1 + x²
        assert_eq!(s1.count_zeros(&f).unwrap(), 0);
    }

    #[test]
    fn vanishing_count_examples() {
        let s = space(3, 1, 1, 2);
        assert_eq!(s.vanishing_count(&[s.ctx().zero()]).unwrap(), 9);

        // V = {c·x}: everything vanishes at 0
        let ctx = Arc::new(FieldCtx::new(3, 1).unwrap());
        let sup = MonomialSupport::new(1, vec![vec![1]]).unwrap();
        let sp = PolySpace::new(ctx, sup, Budget::default()).unwrap();
        assert_eq!(sp.vanishing_count(&[sp.ctx().zero()]).unwrap(), 3);

        let s2 = space(2, 1, 2, 1);
        let one = s2.ctx().one();
        assert_eq!(s2.vanishing_count(&[one, one]).unwrap(), 4);
    }

    #[test]
    fn vanishing_count_matches_naive_enumeration() {
        for s in [space(2, 2, 1, 1), space(3, 1, 2, 1), space(5, 1, 1, 2)] {
            for pt in s.points().unwrap() {
                let naive = (0..s.size())
                    .filter(|&k| s.evaluate(&s.poly_from_index(k), &pt) == s.ctx().zero())
                    .count() as u64;
                assert_eq!(s.vanishing_count(&pt).unwrap(), naive);
            }
        }
    }

    #[test]
    fn annihilator_examples() {
        let s = space(3, 1, 1, 2);
        let ctx = s.ctx();
        let alpha = [ctx.elem(2).unwrap()];
        let p0 = s.annihilator_poly(ctx.zero(), &alpha);
        assert_eq!(p0, s.zero_poly());
        let p1 = s.annihilator_poly(ctx.one(), &alpha);
        let idx: Vec<u64> = p1.coeffs.iter().map(|c| c.index()).collect();
        assert_eq!(idx, vec![1, 2, 1]); // α⁰, α¹, α² = 1, 2, 4≡1

        let s5 = space(5, 1, 2, 1);
        let c = s5.ctx().elem(2).unwrap();
        let alpha = [s5.ctx().elem(1).unwrap(), s5.ctx().elem(3).unwrap()];
        let p = s5.annihilator_poly(c, &alpha);
        let idx: Vec<u64> = p.coeffs.iter().map(|x| x.index()).collect();
        // support order (0,0), (0,1), (1,0): 2·(1, 3, 1) = (2, 6≡1, 2)
        assert_eq!(idx, vec![2, 1, 2]);
    }

    #[test]
    fn annihilator_pairs_with_evaluation() {
        // ⟨p_{C,α}, f⟩ = C·f(α), exhaustively over V, random (C, α)
        let mut rng = crate::rng::SplitMix64::new(0xA11);
        for s in [
            space(3, 1, 1, 2),
            space(2, 2, 1, 1),
            space(5, 1, 2, 1),
            space(3, 1, 1, 4), // |V| = 3^5
        ] {
            let pts = s.points().unwrap();
            for _ in 0..100 {
                let c = s.ctx().elem(rng.below(s.q())).unwrap();
                let alpha = &pts[rng.below(pts.len() as u64) as usize];
                let ann = s.annihilator_poly(c, alpha);
                for k in 0..s.size() {
                    let f = s.poly_from_index(k);
                    let lhs = s.inner_product(&ann, &f);
                    let rhs = s.ctx().mul(c, s.evaluate(&f, alpha));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn vanishing_dimension_under_star() {
        for s in [
            space(2, 1, 1, 2),
            space(3, 1, 1, 2),
            space(3, 1, 2, 1),
            space(2, 2, 1, 1),
            space(5, 1, 1, 1),
        ] {
            assert!(s.has_property_star().holds());
            let expected = s.size() / s.q();
            for pt in s.points().unwrap() {
                assert_eq!(s.vanishing_count(&pt).unwrap(), expected);
            }
        }
    }

    #[test]
    fn schwartz_zippel_exhaustive() {
        for s in [
            space(3, 1, 1, 2),
            space(2, 1, 2, 2),
            space(3, 1, 2, 1),
            space(3, 1, 1, 4),
        ] {
            let bound = s.max_total_degree() as u64 * s.q().pow(s.m() - 1);
            for k in 1..s.size() {
                let f = s.poly_from_index(k);
                assert!(s.count_zeros(&f).unwrap() <= bound, "index {k}");
            }
        }
    }

    #[test]
    fn annihilator_families_disjoint_under_star() {
        use std::collections::HashMap;
        for s in [space(3, 1, 1, 2), space(2, 2, 1, 1), space(5, 1, 2, 1)] {
            let mut owner: HashMap<u64, usize> = HashMap::new();
            for (pi, pt) in s.points().unwrap().iter().enumerate() {
                for c in s.ctx().elements().skip(1) {
                    let ann = s.annihilator_poly(c, pt);
                    let key = s.poly_index(&ann);
                    if let Some(&other) = owner.get(&key) {
                        panic!("annihilator collision between points {other} and {pi}");
                    }
                    owner.insert(key, pi);
                }
            }
        }
    }

    #[test]
    fn vanishing_and_disjointness_at_the_grid_cap() {
        // q^m = 625: GF(25) with two variables
        let s = space(5, 2, 2, 1);
        assert_eq!(s.q().pow(s.m()), 625);
        let expected = s.size() / s.q();
        let mut owner: std::collections::HashMap<u64, usize> = std::collections::HashMap::new();
        for (pi, pt) in s.points().unwrap().iter().enumerate() {
            assert_eq!(s.vanishing_count(pt).unwrap(), expected);
            for c in s.ctx().elements().skip(1) {
                let key = s.poly_index(&s.annihilator_poly(c, pt));
                assert!(owner.insert(key, pi).is_none_or(|prev| prev == pi));
            }
        }
    }

    #[test]
    fn max_total_degree_examples() {
        assert_eq!(space(2, 1, 2, 2).max_total_degree(), 2);
        let s = MonomialSupport::new(2, vec![vec![0, 0], vec![3, 0], vec![0, 1]]).unwrap();
        assert_eq!(s.max_total_degree(), 3);
        let c = MonomialSupport::new(1, vec![vec![0]]).unwrap();
        assert_eq!(c.max_total_degree(), 0);
    }

    #[test]
    fn poly_index_roundtrip() {
        let s = space(3, 1, 2, 1);
        for k in 0..s.size() {
            assert_eq!(s.poly_index(&s.poly_from_index(k)), k);
        }
    }

    #[test]
    fn budget_gates_construction() {
        let ctx = Arc::new(FieldCtx::new(3, 1).unwrap());
        let tight = Budget {
            max_space: 10,
            ..Budget::default()
        };
        assert!(matches!(
            PolySpace::full_space(ctx, 1, 2, tight),
            Err(LabError::SizeLimit { .. })
        ));
    }

    #[test]
    fn support_descriptor_parsing() {
        let d: SupportDescriptor = serde_json::from_str("\"full:2,1\"").unwrap();
        assert_eq!(d.build().unwrap().dim(), 3);
        let d: SupportDescriptor =
            serde_json::from_str(r#"{"m": 2, "exponents": [[0,0],[1,0]]}"#).unwrap();
        assert_eq!(d.build().unwrap().dim(), 2);
        let bad: SupportDescriptor = serde_json::from_str("\"diagonal:2,1\"").unwrap();
        assert!(bad.build().is_err());
    }
}
