//! Exact arithmetic in ℤ\[ζ_p\] for prime p.
//!
//! Every additive character sum in the lab takes values here. An element is
//! stored on the basis 1, ζ, …, ζ^{p−2}; the top power is eliminated through
//! 1 + ζ + … + ζ^{p−1} = 0, so the representation is canonical and equality
//! is a coefficient comparison. That makes eigenvalue multisets exact: equal
//! eigenvalues hash equal, nothing is clustered.
//!
//! Coefficients are checked i128. Character sums reach |G|²·max|c| in the
//! worst intermediate, which stays far below 2^127 for any enumeration the
//! budgets admit.

use num_complex::Complex64;

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CycInt {
    p: u32,
    /// Coefficients of 1, ζ, …, ζ^{p−2}.
    coeffs: Vec<i128>,
}

fn overflow() -> ! {
    panic!("cyclotomic coefficient overflowed i128; raise no budget this far")
}

impl CycInt {
    pub fn zero(p: u32) -> CycInt {
        CycInt {
            p,
            coeffs: vec![0; (p - 1) as usize],
        }
    }

    pub fn one(p: u32) -> CycInt {
        CycInt::integer(p, 1)
    }

    pub fn integer(p: u32, n: i128) -> CycInt {
        let mut z = CycInt::zero(p);
        z.coeffs[0] = n;
        z
    }

    /// ζ_p^e in canonical form; e may be any integer.
    pub fn root_of_unity(p: u32, e: i64) -> CycInt {
        let e = e.rem_euclid(p as i64) as u32;
        if e == p - 1 {
            // ζ^{p−1} = −(1 + ζ + … + ζ^{p−2})
            CycInt {
                p,
                coeffs: vec![-1; (p - 1) as usize],
            }
        } else {
            let mut z = CycInt::zero(p);
            z.coeffs[e as usize] = 1;
            z
        }
    }

    /// Canonicalizes a vector of p bucket coefficients (an element written on
    /// 1, ζ, …, ζ^{p−1}) by eliminating the top power.
    pub fn from_exponent_buckets(p: u32, buckets: &[i128]) -> CycInt {
        assert_eq!(buckets.len(), p as usize);
        let top = buckets[(p - 1) as usize];
        let coeffs = buckets[..(p - 1) as usize]
            .iter()
            .map(|&b| b.checked_sub(top).unwrap_or_else(|| overflow()))
            .collect();
        CycInt { p, coeffs }
    }

    pub fn order(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check_order(&self, other: &CycInt) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(LabError::CyclotomicOrderMismatch {
                left: self.p,
                right: other.p,
            })
        }
    }

    pub fn add(&self, other: &CycInt) -> Result<CycInt> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| a.checked_add(b).unwrap_or_else(|| overflow()))
            .collect();
        Ok(CycInt { p: self.p, coeffs })
    }

    pub fn neg(&self) -> CycInt {
        CycInt {
            p: self.p,
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &CycInt) -> Result<CycInt> {
        self.add(&other.neg())
    }

    pub fn scaled(&self, k: i128) -> CycInt {
        CycInt {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .map(|&c| c.checked_mul(k).unwrap_or_else(|| overflow()))
                .collect(),
        }
    }

    /// Ring product: convolve exponents mod p, then canonicalize.
    pub fn mul(&self, other: &CycInt) -> Result<CycInt> {
        self.check_order(other)?;
        let p = self.p as usize;
        let mut buckets = vec![0i128; p];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let e = (i + j) % p;
                buckets[e] = buckets[e]
                    .checked_add(a.checked_mul(b).unwrap_or_else(|| overflow()))
                    .unwrap_or_else(|| overflow());
            }
        }
        Ok(CycInt::from_exponent_buckets(self.p, &buckets))
    }

    /// Complex conjugation: ζ^i ↦ ζ^{p−i}.
    pub fn conj(&self) -> CycInt {
        let p = self.p as usize;
        let mut buckets = vec![0i128; p];
        for (i, &a) in self.coeffs.iter().enumerate() {
            buckets[(p - i) % p] += a;
        }
        CycInt::from_exponent_buckets(self.p, &buckets)
    }

    /// The rational integer this element equals, if it equals one.
    pub fn as_integer(&self) -> Option<i128> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    /// Numeric view Σ a_i e^{2πi·i/p}.
    pub fn to_complex(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a != 0 {
                let theta = 2.0 * std::f64::consts::PI * i as f64 / self.p as f64;
                acc += Complex64::new(theta.cos(), theta.sin()) * a as f64;
            }
        }
        acc
    }

    pub fn abs(&self) -> f64 {
        self.to_complex().norm()
    }
}
