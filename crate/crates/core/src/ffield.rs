//! Exact arithmetic in GF(p^s).
//!
//! Elements are canonical integers in `[0, q)`: the index encodes the
//! coefficient vector (a_0, …, a_{s−1}) over GF(p) in base p, with a_0 the
//! constant term of the polynomial-basis representation. Multiplication
//! reduces modulo a monic irreducible polynomial, by default the Conway
//! polynomial for the field, so element indices mean the same thing across
//! runs and machines.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Full add/mul tables are precomputed up to this order.
pub const TABLE_LIMIT: u64 = 4096;

/// One element of GF(p^s), identified by its canonical index in `[0, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FieldElem(u64);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);

    pub fn index(self) -> u64 {
        self.0
    }
}

/// Conway polynomials for p ≤ 13, s ≤ 4, coefficients constant-first.
/// Callers may override the modulus; these fix the default element encoding.
const CONWAY: &[(u32, u32, &[u32])] = &[
    (2, 1, &[1, 1]),
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (3, 1, &[1, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
    (5, 1, &[3, 1]),
    (5, 2, &[2, 4, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (5, 4, &[2, 4, 4, 0, 1]),
    (7, 1, &[4, 1]),
    (7, 2, &[3, 6, 1]),
    (7, 3, &[4, 0, 6, 1]),
    (7, 4, &[3, 4, 5, 0, 1]),
    (11, 1, &[9, 1]),
    (11, 2, &[2, 7, 1]),
    (11, 3, &[9, 2, 0, 1]),
    (11, 4, &[2, 10, 8, 0, 1]),
    (13, 1, &[11, 1]),
    (13, 2, &[2, 12, 1]),
    (13, 3, &[11, 2, 0, 1]),
    (13, 4, &[2, 12, 3, 0, 1]),
];

/// Field descriptor as it appears in config files:
/// `{"p": int, "s": int, "modulus": [int]}` with the modulus optional.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldDescriptor {
    pub p: u32,
    pub s: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

impl FieldDescriptor {
    pub fn build(&self) -> Result<FieldCtx> {
        match &self.modulus {
            Some(m) => FieldCtx::with_modulus(self.p, self.s, m.clone()),
            None => FieldCtx::new(self.p, self.s),
        }
    }
}

/// Arithmetic context for GF(p^s). Immutable after construction.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    p: u32,
    s: u32,
    q: u64,
    /// Monic irreducible modulus over GF(p), s+1 coefficients, constant first.
    modulus: Vec<u32>,
    add_table: Option<Vec<u16>>,
    mul_table: Option<Vec<u16>>,
}

impl FieldCtx {
    /// GF(p^s) with the built-in Conway modulus (p ≤ 13, s ≤ 4).
    pub fn new(p: u32, s: u32) -> Result<FieldCtx> {
        validate_params(p, s)?;
        let modulus = CONWAY
            .iter()
            .find(|&&(cp, cs, _)| cp == p && cs == s)
            .map(|&(_, _, m)| m.to_vec())
            .ok_or_else(|| {
                LabError::InvalidParameter(format!(
                    "no built-in modulus for GF({p}^{s}); supply one explicitly"
                ))
            })?;
        FieldCtx::with_modulus(p, s, modulus)
    }

    /// GF(p^s) with a caller-supplied monic irreducible modulus.
    pub fn with_modulus(p: u32, s: u32, modulus: Vec<u32>) -> Result<FieldCtx> {
        validate_params(p, s)?;
        let q = (p as u64)
            .checked_pow(s)
            .filter(|&q| q <= 1 << 31)
            .ok_or(LabError::SizeLimit {
                what: "field order p^s",
                required: (p as u128).pow(s),
                limit: 1 << 31,
            })?;
        if modulus.len() != s as usize + 1 {
            return Err(LabError::InvalidParameter(format!(
                "modulus must have s+1 = {} coefficients, got {}",
                s + 1,
                modulus.len()
            )));
        }
        let modulus: Vec<u32> = modulus.iter().map(|&c| c % p).collect();
        if modulus[s as usize] != 1 {
            return Err(LabError::InvalidParameter("modulus must be monic".into()));
        }
        if !is_irreducible(&modulus, p) {
            return Err(LabError::InvalidParameter(format!(
                "modulus {modulus:?} is reducible over GF({p})"
            )));
        }

        let mut ctx = FieldCtx {
            p,
            s,
            q,
            modulus,
            add_table: None,
            mul_table: None,
        };
        if q <= TABLE_LIMIT {
            let n = q as usize;
            let mut add = vec![0u16; n * n];
            let mut mul = vec![0u16; n * n];
            for a in 0..q {
                for b in 0..q {
                    add[(a * q + b) as usize] = ctx.add_poly(a, b) as u16;
                    mul[(a * q + b) as usize] = ctx.mul_poly(a, b) as u16;
                }
            }
            ctx.add_table = Some(add);
            ctx.mul_table = Some(mul);
        }
        Ok(ctx)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p,
            s: self.s,
            modulus: Some(self.modulus.clone()),
        }
    }

    pub fn elem(&self, index: u64) -> Result<FieldElem> {
        if index < self.q {
            Ok(FieldElem(index))
        } else {
            Err(LabError::InvalidParameter(format!(
                "element index {index} out of range for field of order {}",
                self.q
            )))
        }
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(0)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem(1)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(FieldElem)
    }

    /// Base-p digits of an element, constant term first.
    pub fn digits(&self, a: FieldElem) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.s as usize);
        let mut x = a.0;
        for _ in 0..self.s {
            v.push((x % self.p as u64) as u32);
            x /= self.p as u64;
        }
        v
    }

    pub fn from_digits(&self, digits: &[u32]) -> FieldElem {
        debug_assert_eq!(digits.len(), self.s as usize);
        let mut x = 0u64;
        for &d in digits.iter().rev() {
            x = x * self.p as u64 + (d % self.p) as u64;
        }
        FieldElem(x)
    }

    fn add_poly(&self, a: u64, b: u64) -> u64 {
        let p = self.p as u64;
        let mut out = 0u64;
        let mut scale = 1u64;
        let (mut a, mut b) = (a, b);
        for _ in 0..self.s {
            out += (a % p + b % p) % p * scale;
            a /= p;
            b /= p;
            scale *= p;
        }
        out
    }

    fn mul_poly(&self, a: u64, b: u64) -> u64 {
        let p = self.p as u64;
        let s = self.s as usize;
        // Schoolbook product of the digit vectors, then reduce by the modulus.
        let mut prod = vec![0u64; 2 * s - 1];
        let mut ad = [0u64; 32];
        let mut bd = [0u64; 32];
        let (mut x, mut y) = (a, b);
        for i in 0..s {
            ad[i] = x % p;
            bd[i] = y % p;
            x /= p;
            y /= p;
        }
        for i in 0..s {
            if ad[i] == 0 {
                continue;
            }
            for j in 0..s {
                prod[i + j] = (prod[i + j] + ad[i] * bd[j]) % p;
            }
        }
        // x^s ≡ −(m_0 + m_1 x + … + m_{s−1} x^{s−1})
        for i in (s..2 * s - 1).rev() {
            let t = prod[i];
            if t == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..s {
                let m = self.modulus[j] as u64;
                if m != 0 {
                    prod[i - s + j] = (prod[i - s + j] + t * (p - m)) % p;
                }
            }
        }
        let mut out = 0u64;
        for i in (0..s).rev() {
            out = out * p + prod[i];
        }
        out
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        match &self.add_table {
            Some(t) => FieldElem(t[(a.0 * self.q + b.0) as usize] as u64),
            None => FieldElem(self.add_poly(a.0, b.0)),
        }
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        let p = self.p as u64;
        let mut out = 0u64;
        let mut scale = 1u64;
        let mut x = a.0;
        for _ in 0..self.s {
            out += (p - x % p) % p * scale;
            x /= p;
            scale *= p;
        }
        FieldElem(out)
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        match &self.mul_table {
            Some(t) => FieldElem(t[(a.0 * self.q + b.0) as usize] as u64),
            None => FieldElem(self.mul_poly(a.0, b.0)),
        }
    }

    /// a^k by square-and-multiply, with 0^0 = 1.
    pub fn pow(&self, a: FieldElem, k: u64) -> FieldElem {
        let mut base = a;
        let mut k = k;
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElem) -> Option<FieldElem> {
        if a.0 == 0 {
            None
        } else {
            Some(self.pow(a, self.q - 2))
        }
    }

    /// Trace to the prime field: Tr(a) = a + a^p + … + a^{p^{s−1}},
    /// returned as an integer in `[0, p)`.
    pub fn trace(&self, a: FieldElem) -> u32 {
        let mut acc = self.zero();
        let mut x = a;
        for _ in 0..self.s {
            acc = self.add(acc, x);
            x = self.pow(x, self.p as u64);
        }
        debug_assert!(acc.0 < self.p as u64, "trace landed outside GF(p)");
        acc.0 as u32
    }

    /// True iff x ↦ x^k is a bijection of the multiplicative group,
    /// i.e. gcd(k, q−1) = 1.
    pub fn is_unit_exponent(&self, k: u64) -> bool {
        gcd(k, self.q - 1) == 1
    }
}

fn validate_params(p: u32, s: u32) -> Result<()> {
    if !is_prime(p) {
        return Err(LabError::InvalidParameter(format!(
            "characteristic {p} is not prime"
        )));
    }
    if s == 0 {
        return Err(LabError::InvalidParameter(
            "invalid extension degree: s must be >= 1".into(),
        ));
    }
    Ok(())
}

fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d as u64 * d as u64 <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// --- dense polynomial arithmetic over GF(p), for the irreducibility check ---

fn poly_trim(v: &mut Vec<u64>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    if v.is_empty() {
        v.push(0);
    }
}

fn poly_is_zero(v: &[u64]) -> bool {
    v.iter().all(|&c| c == 0)
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let lead_inv = mod_inv(m[dm], p);
    while r.len() > dm {
        let t = r.last().copied().unwrap() % p;
        let shift = r.len() - 1 - dm;
        if t != 0 {
            let f = t * lead_inv % p;
            for (j, &mj) in m.iter().enumerate() {
                let idx = shift + j;
                r[idx] = (r[idx] + (p - mj % p) * f) % p;
            }
        }
        r.pop();
        if r.is_empty() {
            break;
        }
        poly_trim(&mut r);
    }
    poly_trim(&mut r);
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    poly_rem(&prod, m, p)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !poly_is_zero(&b) {
        let r = poly_rem(&a, &pad_monic(&b, p), p);
        a = b;
        b = r;
    }
    a
}

/// Scales a nonzero polynomial to be monic so it can serve as a modulus.
fn pad_monic(f: &[u64], p: u64) -> Vec<u64> {
    let inv = mod_inv(*f.last().unwrap(), p);
    f.iter().map(|&c| c * inv % p).collect()
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p prime, a nonzero mod p.
    mod_pow(a % p, p - 2, p)
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Irreducibility of a monic polynomial over GF(p): f of degree s is
/// irreducible iff gcd(f, x^{p^i} − x) = 1 for all 1 ≤ i ≤ s/2.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let p = p as u64;
    let s = modulus.len() - 1;
    if s == 1 {
        return true;
    }
    let m: Vec<u64> = modulus.iter().map(|&c| c as u64).collect();
    // x^{p^i} mod f by iterated Frobenius; start from x.
    let mut xp = vec![0u64, 1];
    for _ in 1..=s / 2 {
        xp = poly_powmod(&xp, p, &m, p);
        // x^{p^i} − x
        let mut diff = xp.clone();
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        poly_trim(&mut diff);
        if poly_is_zero(&diff) {
            // x^{p^i} ≡ x: every element of the degree-i subfield is a root.
            return false;
        }
        let g = poly_gcd(&m, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

fn poly_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, m, p);
        }
        b = poly_mulmod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32, s: u32) -> FieldCtx {
        FieldCtx::new(p, s).unwrap()
    }

    #[test]
    fn conway_table_entries_all_construct() {
        for &(p, s, _) in CONWAY {
            let ctx = FieldCtx::new(p, s).unwrap();
            assert_eq!(ctx.q(), (p as u64).pow(s));
        }
    }

    #[test]
    fn add_examples() {
        let f3 = gf(3, 1);
        assert_eq!(f3.add(f3.elem(1).unwrap(), f3.elem(2).unwrap()).index(), 0);
        let f4 = gf(2, 2);
        // t + 1 = index 3
        assert_eq!(f4.add(f4.elem(2).unwrap(), f4.elem(1).unwrap()).index(), 3);
        let f5 = gf(5, 1);
        assert_eq!(f5.add(f5.elem(4).unwrap(), f5.elem(4).unwrap()).index(), 3);
    }

    #[test]
    fn mul_examples() {
        let f4 = gf(2, 2);
        // t·t = t+1 under t² = t+1
        assert_eq!(f4.mul(f4.elem(2).unwrap(), f4.elem(2).unwrap()).index(), 3);
        let f3 = gf(3, 1);
        assert_eq!(f3.mul(f3.elem(2).unwrap(), f3.elem(2).unwrap()).index(), 1);
        for q in [gf(2, 2), gf(3, 2), gf(5, 1)] {
            for a in q.elements() {
                assert_eq!(q.mul(a, q.one()), a);
            }
        }
    }

    #[test]
    fn trace_examples() {
        let f4 = gf(2, 2);
        assert_eq!(f4.trace(f4.zero()), 0);
        assert_eq!(f4.trace(f4.one()), 0);
        assert_eq!(f4.trace(f4.elem(2).unwrap()), 1); // Tr(t) = t + t² = 1
    }

    #[test]
    fn unit_exponent_examples() {
        assert!(!gf(2, 2).is_unit_exponent(3)); // gcd(3, 3) = 3
        assert!(gf(3, 1).is_unit_exponent(1));
        assert!(gf(5, 1).is_unit_exponent(3)); // gcd(3, 4) = 1
    }

    fn small_grid() -> Vec<FieldCtx> {
        // all built-in fields with q ≤ 64
        vec![
            gf(2, 1),
            gf(2, 2),
            gf(2, 3),
            gf(2, 4),
            gf(3, 1),
            gf(3, 2),
            gf(3, 3),
            gf(5, 1),
            gf(5, 2),
            gf(7, 1),
            gf(7, 2),
            gf(11, 1),
            gf(13, 1),
        ]
    }

    #[test]
    fn field_axioms_exhaustive_small_q() {
        for ctx in small_grid() {
            let elems: Vec<FieldElem> = ctx.elements().collect();
            for &a in &elems {
                // additive and multiplicative inverses
                assert_eq!(ctx.add(a, ctx.neg(a)), ctx.zero());
                if a != ctx.zero() {
                    let inv = ctx.inv(a).unwrap();
                    assert_eq!(ctx.mul(a, inv), ctx.one());
                }
                for &b in &elems {
                    assert_eq!(ctx.add(a, b), ctx.add(b, a));
                    assert_eq!(ctx.mul(a, b), ctx.mul(b, a));
                    for &c in &elems {
                        assert_eq!(ctx.add(ctx.add(a, b), c), ctx.add(a, ctx.add(b, c)));
                        assert_eq!(ctx.mul(ctx.mul(a, b), c), ctx.mul(a, ctx.mul(b, c)));
                        assert_eq!(
                            ctx.mul(a, ctx.add(b, c)),
                            ctx.add(ctx.mul(a, b), ctx.mul(a, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn trace_is_linear_and_balanced() {
        for ctx in small_grid() {
            let p = ctx.p();
            let mut fibers = vec![0u64; p as usize];
            for a in ctx.elements() {
                fibers[ctx.trace(a) as usize] += 1;
                for b in ctx.elements() {
                    let lhs = ctx.trace(ctx.add(a, b));
                    let rhs = (ctx.trace(a) + ctx.trace(b)) % p;
                    assert_eq!(lhs, rhs);
                }
            }
            for &count in &fibers {
                assert_eq!(count, ctx.q() / p as u64);
            }
        }
    }

    #[test]
    fn unit_exponent_iff_power_map_injective() {
        for ctx in small_grid() {
            for k in 1..=2 * ctx.q() {
                let mut seen = std::collections::HashSet::new();
                let injective = ctx
                    .elements()
                    .skip(1)
                    .all(|a| seen.insert(ctx.pow(a, k).index()));
                assert_eq!(ctx.is_unit_exponent(k), injective, "q={} k={}", ctx.q(), k);
            }
        }
    }

    #[test]
    fn tables_match_polynomial_arithmetic() {
        for ctx in [gf(2, 3), gf(3, 2), gf(5, 2)] {
            assert!(ctx.add_table.is_some() && ctx.mul_table.is_some());
            for a in 0..ctx.q() {
                for b in 0..ctx.q() {
                    assert_eq!(
                        ctx.add(FieldElem(a), FieldElem(b)).index(),
                        ctx.add_poly(a, b)
                    );
                    assert_eq!(
                        ctx.mul(FieldElem(a), FieldElem(b)).index(),
                        ctx.mul_poly(a, b)
                    );
                }
            }
        }
    }

    #[test]
    fn digit_roundtrip() {
        for ctx in [gf(2, 4), gf(3, 3), gf(5, 2)] {
            for a in ctx.elements() {
                assert_eq!(ctx.from_digits(&ctx.digits(a)), a);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FieldCtx::new(4, 1).is_err()); // not prime
        assert!(FieldCtx::new(3, 0).is_err()); // zero extension degree
        assert!(FieldCtx::with_modulus(2, 2, vec![1, 0, 1]).is_err()); // (x+1)²
        assert!(FieldCtx::with_modulus(2, 2, vec![1, 1, 0]).is_err()); // not monic
        assert!(FieldCtx::with_modulus(3, 4, vec![1, 0, 2, 0, 1]).is_err()); // (x²+x+2)(x²+2x+2)
    }

    #[test]
    fn accepts_custom_irreducible_modulus() {
        // x² + 1 is irreducible over GF(3)
        let ctx = FieldCtx::with_modulus(3, 2, vec![1, 0, 1]).unwrap();
        let i = ctx.elem(3).unwrap(); // the class of x
        assert_eq!(ctx.mul(i, i), ctx.neg(ctx.one()));
    }

    #[test]
    fn pow_handles_zero_exponent() {
        let ctx = gf(3, 2);
        for a in ctx.elements() {
            assert_eq!(ctx.pow(a, 0), ctx.one());
        }
        assert_eq!(ctx.pow(ctx.zero(), 5), ctx.zero());
    }
}
