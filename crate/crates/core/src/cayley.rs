//! Abelian Cayley color graphs and their spectra.
//!
//! Cay(G, c) is the complete directed graph on a finite abelian group G with
//! edge (x, y) colored c(x − y). Its eigenvalues are the Fourier coefficients
//! ĉ(χ) = Σ_g c(g)·conj(χ(g)), one per character, with χ itself the
//! eigenvector. For G = (ℤ_p)^n the characters are χ_g(h) = ζ_p^{⟨g,h⟩} and
//! every coefficient of an integer-valued c is computed exactly in ℤ\[ζ_p\];
//! for a general product ℤ_{n_1}×…×ℤ_{n_k} the lab works in complex doubles.
//!
//! The adjacency matrix is never materialized; the one matrix-style
//! computation, `oracle_eigencheck`, streams one row at a time.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cyclo::CycInt;
use crate::error::{LabError, Result};
use crate::Budget;

/// Multiplicities in numeric mode are grouped at this absolute tolerance
/// scaled by |G|·max|c|.
pub const NUMERIC_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupDesc {
    /// (ℤ_p)^n with base-p mixed-radix element encoding.
    Vector { p: u32, n: u32 },
    /// ℤ_{n_1} × … × ℤ_{n_k}, mixed radix with `orders[0]` least significant.
    Product { orders: Vec<u32> },
}

impl GroupDesc {
    pub fn order(&self) -> u64 {
        match self {
            GroupDesc::Vector { p, n } => (*p as u64).pow(*n),
            GroupDesc::Product { orders } => orders.iter().map(|&o| o as u64).product(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GroupDesc::Vector { p, n } => {
                if *p < 2 || *n == 0 {
                    return Err(LabError::InvalidParameter(
                        "vector group needs p >= 2 and n >= 1".into(),
                    ));
                }
                (*p as u64)
                    .checked_pow(*n)
                    .filter(|&o| o <= 1 << 40)
                    .ok_or(LabError::SizeLimit {
                        what: "group order p^n",
                        required: (*p as u128).saturating_pow(*n),
                        limit: 1 << 40,
                    })?;
            }
            GroupDesc::Product { orders } => {
                if orders.is_empty() || orders.iter().any(|&o| o < 1) {
                    return Err(LabError::InvalidParameter(
                        "product group needs at least one positive order".into(),
                    ));
                }
                orders
                    .iter()
                    .try_fold(1u64, |acc, &o| {
                        acc.checked_mul(o as u64).filter(|&n| n <= 1 << 40)
                    })
                    .ok_or(LabError::SizeLimit {
                        what: "product group order",
                        required: orders
                            .iter()
                            .fold(1u128, |a, &o| a.saturating_mul(o as u128)),
                        limit: 1 << 40,
                    })?;
            }
        }
        Ok(())
    }

    fn radices(&self) -> Vec<u64> {
        match self {
            GroupDesc::Vector { p, n } => vec![*p as u64; *n as usize],
            GroupDesc::Product { orders } => orders.iter().map(|&o| o as u64).collect(),
        }
    }

    pub fn digits(&self, g: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let mut x = g;
        for r in self.radices() {
            out.push(x % r);
            x /= r;
        }
        out
    }

    pub fn neg(&self, g: u64) -> u64 {
        let mut out = 0u64;
        let mut scale = 1u64;
        let mut x = g;
        for r in self.radices() {
            out += (r - x % r) % r * scale;
            x /= r;
            scale *= r;
        }
        out
    }

    pub fn sub(&self, x: u64, y: u64) -> u64 {
        let mut out = 0u64;
        let mut scale = 1u64;
        let (mut x, mut y) = (x, y);
        for r in self.radices() {
            out += (x % r + r - y % r) % r * scale;
            x /= r;
            y /= r;
            scale *= r;
        }
        out
    }

    /// ⟨g, h⟩ mod p for vector groups.
    fn dot_mod_p(&self, g: u64, h: u64) -> u32 {
        match self {
            GroupDesc::Vector { p, n } => {
                let p = *p as u64;
                let mut acc = 0u64;
                let (mut g, mut h) = (g, h);
                for _ in 0..*n {
                    acc += (g % p) * (h % p) % p;
                    g /= p;
                    h /= p;
                }
                (acc % p) as u32
            }
            GroupDesc::Product { .. } => unreachable!("dot product is vector-group only"),
        }
    }
}

/// Eigenvalue or character value: exact cyclotomic integer on vector groups,
/// complex double elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(CycInt),
    Numeric(Complex64),
}

impl Value {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            Value::Exact(z) => z.to_complex(),
            Value::Numeric(z) => *z,
        }
    }

    pub fn abs(&self) -> f64 {
        self.to_complex().norm()
    }

    pub fn as_exact(&self) -> Option<&CycInt> {
        match self {
            Value::Exact(z) => Some(z),
            Value::Numeric(_) => None,
        }
    }

    /// The rational integer this value equals, if it does exactly.
    pub fn as_integer(&self) -> Option<i128> {
        self.as_exact().and_then(|z| z.as_integer())
    }
}

#[derive(Debug, Clone)]
pub enum ConnValues {
    Exact(Vec<i64>),
    Numeric(Vec<Complex64>),
}

/// A connection function c : G → ℂ, the edge coloring of Cay(G, c).
#[derive(Debug, Clone)]
pub struct ConnectionFunction {
    group: GroupDesc,
    values: ConnValues,
    hermitian: bool,
}

impl ConnectionFunction {
    /// Integer-valued coloring. Exact spectra need a vector group.
    pub fn new_exact(group: GroupDesc, values: Vec<i64>) -> Result<ConnectionFunction> {
        group.validate()?;
        if values.len() as u64 != group.order() {
            return Err(LabError::InvalidParameter(format!(
                "connection table has {} entries for a group of order {}",
                values.len(),
                group.order()
            )));
        }
        // verified by full scan, not trusted from the caller
        let hermitian =
            (0..values.len() as u64).all(|g| values[g as usize] == values[group.neg(g) as usize]);
        Ok(ConnectionFunction {
            group,
            values: ConnValues::Exact(values),
            hermitian,
        })
    }

    pub fn new_numeric(group: GroupDesc, values: Vec<Complex64>) -> Result<ConnectionFunction> {
        group.validate()?;
        if values.len() as u64 != group.order() {
            return Err(LabError::InvalidParameter(format!(
                "connection table has {} entries for a group of order {}",
                values.len(),
                group.order()
            )));
        }
        let scale = values.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
        let hermitian = (0..values.len() as u64).all(|g| {
            (values[g as usize] - values[group.neg(g) as usize].conj()).norm() <= 1e-12 * scale
        });
        Ok(ConnectionFunction {
            group,
            values: ConnValues::Numeric(values),
            hermitian,
        })
    }

    pub fn group(&self) -> &GroupDesc {
        &self.group
    }

    pub fn order(&self) -> u64 {
        self.group.order()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.values, ConnValues::Exact(_))
    }

    pub fn exact_values(&self) -> Option<&[i64]> {
        match &self.values {
            ConnValues::Exact(v) => Some(v),
            ConnValues::Numeric(_) => None,
        }
    }

    pub fn value_complex(&self, g: u64) -> Complex64 {
        match &self.values {
            ConnValues::Exact(v) => Complex64::new(v[g as usize] as f64, 0.0),
            ConnValues::Numeric(v) => v[g as usize],
        }
    }

    pub fn max_abs(&self) -> f64 {
        match &self.values {
            ConnValues::Exact(v) => v.iter().map(|&x| (x as f64).abs()).fold(0.0, f64::max),
            ConnValues::Numeric(v) => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }

    /// Σ_g c(g), the trivial Fourier coefficient.
    pub fn total(&self) -> Value {
        match &self.values {
            ConnValues::Exact(v) => {
                let sum: i128 = v.iter().map(|&x| x as i128).sum();
                Value::Exact(CycInt::integer(self.vector_p().unwrap_or(2), sum))
            }
            ConnValues::Numeric(v) => Value::Numeric(v.iter().sum()),
        }
    }

    fn vector_p(&self) -> Option<u32> {
        match &self.group {
            GroupDesc::Vector { p, .. } => Some(*p),
            GroupDesc::Product { .. } => None,
        }
    }
}

/// χ_g(h): ζ_p^{⟨g,h⟩} on vector groups (exact), Π_j e^{2πi g_j h_j / n_j}
/// on product groups.
pub fn character_value(group: &GroupDesc, g: u64, h: u64) -> Value {
    match group {
        GroupDesc::Vector { p, .. } => {
            Value::Exact(CycInt::root_of_unity(*p, group.dot_mod_p(g, h) as i64))
        }
        GroupDesc::Product { orders } => {
            let mut theta = 0.0f64;
            let (mut g, mut h) = (g, h);
            for &o in orders {
                let o = o as u64;
                theta += (g % o * (h % o) % o) as f64 / o as f64;
                g /= o;
                h /= o;
            }
            let t = 2.0 * std::f64::consts::PI * theta;
            Value::Numeric(Complex64::new(t.cos(), t.sin()))
        }
    }
}

/// ĉ(χ_g) = Σ_h c(h)·conj(χ_g(h)).
pub fn fourier_coefficient(c: &ConnectionFunction, g: u64) -> Value {
    match (&c.values, &c.group) {
        (ConnValues::Exact(v), GroupDesc::Vector { p, .. }) => {
            let p = *p;
            let mut buckets = vec![0i128; p as usize];
            for h in 0..c.order() {
                let e = (p - c.group.dot_mod_p(g, h)) % p;
                buckets[e as usize] += v[h as usize] as i128;
            }
            Value::Exact(CycInt::from_exponent_buckets(p, &buckets))
        }
        _ => {
            let mut acc = Complex64::new(0.0, 0.0);
            for h in 0..c.order() {
                acc += c.value_complex(h) * character_value(&c.group, g, h).to_complex().conj();
            }
            Value::Numeric(acc)
        }
    }
}

/// Full spectrum of Cay(G, c): one eigenvalue per character label, the
/// multiset of distinct eigenvalues with multiplicities, and the largest
/// non-trivial coefficient λ in absolute value.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub group: GroupDesc,
    /// Eigenvalue per character label g ∈ [0, |G|).
    pub entries: Vec<Value>,
    /// Distinct eigenvalues with multiplicities; exact grouping on vector
    /// groups, NUMERIC_EPS-scaled clustering otherwise.
    pub multiset: Vec<(Value, u64)>,
    pub lambda: f64,
    pub trivial: Value,
}

impl SpectrumReport {
    /// Exact multiset keyed by integer eigenvalues, when all of them are
    /// rational integers (always the case for the incidence coloring).
    pub fn integer_multiset(&self) -> Option<BTreeMap<i128, u64>> {
        let mut out = BTreeMap::new();
        for (v, mult) in &self.multiset {
            *out.entry(v.as_integer()?).or_insert(0) += mult;
        }
        Some(out)
    }

    /// Character labels whose eigenvalue equals the given integer, exactly.
    pub fn labels_with_integer_eigenvalue(&self, value: i128) -> Vec<u64> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, v)| v.as_integer() == Some(value))
            .map(|(g, _)| g as u64)
            .collect()
    }

    /// Mixing-lemma terms for subset sizes |S|, |T|: the main term
    /// Σc·|S||T|/|G| and the error term λ·sqrt(|S||T|(1−|S|/|G|)(1−|T|/|G|)).
    pub fn mixing_bound(&self, s_size: u64, t_size: u64) -> (Complex64, f64) {
        let n = self.group.order() as f64;
        let main = self.trivial.to_complex() * (s_size as f64) * (t_size as f64) / n;
        let err = self.lambda
            * ((s_size * t_size) as f64 * (1.0 - s_size as f64 / n) * (1.0 - t_size as f64 / n))
                .max(0.0)
                .sqrt();
        (main, err)
    }
}

fn spectrum_from_entries(group: GroupDesc, entries: Vec<Value>) -> SpectrumReport {
    let lambda = entries
        .iter()
        .skip(1)
        .map(Value::abs)
        .fold(0.0f64, f64::max);
    let trivial = entries[0].clone();
    let multiset = group_multiset(&entries);
    SpectrumReport {
        group,
        entries,
        multiset,
        lambda,
        trivial,
    }
}

fn group_multiset(entries: &[Value]) -> Vec<(Value, u64)> {
    let exact = entries.iter().all(|v| matches!(v, Value::Exact(_)));
    if exact {
        let mut map: BTreeMap<CycInt, u64> = BTreeMap::new();
        for v in entries {
            *map.entry(v.as_exact().unwrap().clone()).or_insert(0) += 1;
        }
        map.into_iter().map(|(z, k)| (Value::Exact(z), k)).collect()
    } else {
        let scale = entries.iter().map(Value::abs).fold(1.0f64, f64::max);
        let eps = NUMERIC_EPS * scale;
        let mut vals: Vec<Complex64> = entries.iter().map(Value::to_complex).collect();
        vals.sort_by(|a, b| {
            (a.re, a.im)
                .partial_cmp(&(b.re, b.im))
                .expect("finite eigenvalues")
        });
        let mut out: Vec<(Complex64, u64)> = Vec::new();
        for z in vals {
            match out.last_mut() {
                Some((rep, k)) if (z - *rep).norm() <= eps => *k += 1,
                _ => out.push((z, 1)),
            }
        }
        out.into_iter()
            .map(|(z, k)| (Value::Numeric(z), k))
            .collect()
    }
}

/// Spectrum by the direct O(|G|²) transform.
pub fn spectrum(c: &ConnectionFunction, budget: &Budget) -> Result<SpectrumReport> {
    let n = c.order();
    if n > budget.max_spectrum {
        return Err(LabError::SizeLimit {
            what: "spectrum group order",
            required: n as u128,
            limit: budget.max_spectrum,
        });
    }
    let entries: Vec<Value> = (0..n).map(|g| fourier_coefficient(c, g)).collect();
    Ok(spectrum_from_entries(c.group.clone(), entries))
}

/// Spectrum by the radix-p transform along each coordinate axis; exact, and
/// independent of the naive double loop. Vector groups with integer values.
pub fn spectrum_fast(c: &ConnectionFunction, budget: &Budget) -> Result<SpectrumReport> {
    let (p, n_axes) = match &c.group {
        GroupDesc::Vector { p, n } => (*p as usize, *n as usize),
        GroupDesc::Product { .. } => {
            return Err(LabError::Unsupported(
                "fast transform needs a vector group".into(),
            ))
        }
    };
    let values = c.exact_values().ok_or_else(|| {
        LabError::Unsupported("fast transform needs an integer-valued coloring".into())
    })?;
    let order = c.order();
    if order > budget.max_space {
        return Err(LabError::SizeLimit {
            what: "fast transform group order",
            required: order as u128,
            limit: budget.max_space,
        });
    }
    let order = order as usize;

    // Working state: per group element, p exponent buckets of ζ_p.
    let mut buf = vec![0i128; order * p];
    for (h, &v) in values.iter().enumerate() {
        buf[h * p] = v as i128;
    }
    let mut scratch = vec![0i128; p * p];
    let mut stride = 1usize;
    for _ in 0..n_axes {
        let block = stride * p;
        for base in (0..order).step_by(block) {
            for offset in 0..stride {
                scratch.iter_mut().for_each(|x| *x = 0);
                // out[a] = Σ_b in[b]·ζ^{−ab}: bucket e of in[b] lands in
                // bucket (e − ab) mod p of out[a].
                for b in 0..p {
                    let src = (base + offset + b * stride) * p;
                    for a in 0..p {
                        let shift = (a * b) % p;
                        let dst = a * p;
                        for e in 0..p {
                            scratch[dst + (e + p - shift) % p] += buf[src + e];
                        }
                    }
                }
                for a in 0..p {
                    let dst = (base + offset + a * stride) * p;
                    buf[dst..dst + p].copy_from_slice(&scratch[a * p..(a + 1) * p]);
                }
            }
        }
        stride *= p;
    }

    let entries: Vec<Value> = (0..order)
        .map(|g| {
            Value::Exact(CycInt::from_exponent_buckets(
                p as u32,
                &buf[g * p..(g + 1) * p],
            ))
        })
        .collect();
    Ok(spectrum_from_entries(c.group.clone(), entries))
}

/// Edge weight e_c(S, T) = Σ_{x∈S, y∈T} c(x − y).
pub fn edge_weight(c: &ConnectionFunction, s: &[u64], t: &[u64]) -> Value {
    match &c.values {
        ConnValues::Exact(v) => {
            let mut acc: i128 = 0;
            for &x in s {
                for &y in t {
                    acc += v[c.group.sub(x, y) as usize] as i128;
                }
            }
            Value::Exact(CycInt::integer(c.vector_p().unwrap_or(2), acc))
        }
        ConnValues::Numeric(v) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for &x in s {
                for &y in t {
                    acc += v[c.group.sub(x, y) as usize];
                }
            }
            Value::Numeric(acc)
        }
    }
}

/// One mixing-lemma check: |e_c(S,T) − Σc·|S||T|/|G|| against the spectral
/// error term, with slack NUMERIC_EPS·|G|·max|c|.
#[derive(Debug, Clone, Serialize)]
pub struct MixingVerdict {
    pub s_size: u64,
    pub t_size: u64,
    pub edge_weight_re: f64,
    pub edge_weight_im: f64,
    pub main_term: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn verify_mixing(
    c: &ConnectionFunction,
    report: &SpectrumReport,
    s: &[u64],
    t: &[u64],
) -> MixingVerdict {
    let (main, rhs) = report.mixing_bound(s.len() as u64, t.len() as u64);
    let e = edge_weight(c, s, t).to_complex();
    let lhs = (e - main).norm();
    let slack = NUMERIC_EPS * c.order() as f64 * c.max_abs().max(1.0);
    MixingVerdict {
        s_size: s.len() as u64,
        t_size: t.len() as u64,
        edge_weight_re: e.re,
        edge_weight_im: e.im,
        main_term: main.re,
        lhs,
        rhs,
        holds: lhs <= rhs + slack,
    }
}

/// Trace-of-A² lower bound λ ≥ sqrt(|G|·Var_g |c(g)|), for hermitian c.
pub fn variance_lower_bound(c: &ConnectionFunction) -> Result<f64> {
    if !c.is_hermitian() {
        return Err(LabError::HypothesesNotMet(
            "variance bound needs a hermitian connection function".into(),
        ));
    }
    let n = c.order() as f64;
    let (sum_abs, sum_sq) = match &c.values {
        ConnValues::Exact(v) => {
            let a: i128 = v.iter().map(|&x| (x as i128).abs()).sum();
            let s: i128 = v.iter().map(|&x| x as i128 * x as i128).sum();
            (a as f64, s as f64)
        }
        ConnValues::Numeric(v) => (
            v.iter().map(|z| z.norm()).sum(),
            v.iter().map(|z| z.norm_sqr()).sum(),
        ),
    };
    let variance = (sum_sq / n - (sum_abs / n).powi(2)).max(0.0);
    Ok((n * variance).sqrt())
}

/// Exact check that Σ_y c(x−y)·χ_g(y) = ĉ(χ_g)·χ_g(x) for every x, i.e.
/// that χ_g really is an eigenvector. Materializes one row at a time.
pub fn oracle_eigencheck(c: &ConnectionFunction, g: u64) -> Result<bool> {
    const ORACLE_LIMIT: u64 = 2048;
    let n = c.order();
    if n > ORACLE_LIMIT {
        return Err(LabError::SizeLimit {
            what: "eigencheck group order",
            required: n as u128,
            limit: ORACLE_LIMIT,
        });
    }
    let (p, values) = match (&c.group, &c.values) {
        (GroupDesc::Vector { p, .. }, ConnValues::Exact(v)) => (*p, v),
        _ => {
            return Err(LabError::Unsupported(
                "exact eigencheck needs a vector group with integer coloring".into(),
            ))
        }
    };
    let eig = fourier_coefficient(c, g);
    let eig = eig.as_exact().expect("vector group gives exact values");
    for x in 0..n {
        let mut buckets = vec![0i128; p as usize];
        for y in 0..n {
            let e = c.group.dot_mod_p(g, y);
            buckets[e as usize] += values[c.group.sub(x, y) as usize] as i128;
        }
        let lhs = CycInt::from_exponent_buckets(p, &buckets);
        let chi_x = CycInt::root_of_unity(p, c.group.dot_mod_p(g, x) as i64);
        let rhs = eig.mul(&chi_x).expect("same order");
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}
