//! Dense integer polynomials with arbitrary-precision coefficients.
//!
//! These are the carriers for Hilbert numerators, the truncated cyclotomic
//! quotients `A_r = (1 - t^r)/(1 - t)` and the inverse numerators of orbifold
//! contributions. Degrees in play stay in the low hundreds, so a dense
//! representation with trimmed trailing zeros is the right trade-off.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A polynomial in one variable `t` with `BigInt` coefficients.
///
/// Invariant: the coefficient vector never ends in a zero, and the zero
/// polynomial is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        if c == 0 {
            IntPoly::zero()
        } else {
            IntPoly {
                coeffs: vec![BigInt::from(c)],
            }
        }
    }

    /// `c * t^e`.
    pub fn monomial(c: i64, e: usize) -> Self {
        if c == 0 {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); e + 1];
        coeffs[e] = BigInt::from(c);
        IntPoly { coeffs }
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        let mut p = IntPoly { coeffs };
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `1 - t^e`.
    pub fn one_minus_pow(e: usize) -> Self {
        assert!(e >= 1, "exponent must be positive");
        let mut coeffs = vec![BigInt::zero(); e + 1];
        coeffs[0] = BigInt::one();
        coeffs[e] = -BigInt::one();
        IntPoly { coeffs }
    }

    /// `1 + t + ... + t^{e-1}`, i.e. `(1 - t^e)/(1 - t)`.
    pub fn geometric(e: usize) -> Self {
        assert!(e >= 1, "length must be positive");
        IntPoly {
            coeffs: vec![BigInt::one(); e],
        }
    }

    /// The truncated cyclotomic quotient `A_r = 1 + t + ... + t^{r-1}`.
    pub fn cyclotomic_a(r: usize) -> Self {
        assert!(r >= 2, "index must exceed 1");
        IntPoly::geometric(r)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Lowest exponent with a nonzero coefficient; `None` for zero.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn coeff(&self, e: usize) -> BigInt {
        self.coeffs.get(e).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Iterate over nonzero terms as `(exponent, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
    }

    /// Multiply by `t^e`.
    pub fn shifted(&self, e: usize) -> Self {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); e];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPoly { coeffs }
    }

    pub fn scaled(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return IntPoly::zero();
        }
        IntPoly {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Exact division, returning `None` when the divisor does not divide
    /// `self` over the integers.
    pub fn div_exact(&self, divisor: &IntPoly) -> Option<IntPoly> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        let dd = divisor.degree().unwrap();
        let nd = self.degree().unwrap();
        if nd < dd {
            return None;
        }
        let lead = &divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); nd - dd + 1];
        for i in (0..=nd - dd).rev() {
            let top = rem[i + dd].clone();
            if top.is_zero() {
                continue;
            }
            if !(&top % lead).is_zero() {
                return None;
            }
            let q = &top / lead;
            for (j, djc) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &q * djc;
            }
            quot[i] = q;
        }
        if rem.iter().all(|c| c.is_zero()) {
            Some(IntPoly::from_coeffs(quot))
        } else {
            None
        }
    }

    /// True when `t^k * N(1/t) = (-1)^c * N(t)`, the Gorenstein symmetry of a
    /// Hilbert numerator of degree `k` and codimension `c`.
    pub fn is_gorenstein_symmetric(&self, k: i64, c: i64) -> bool {
        if self.is_zero() {
            return true;
        }
        if k < 0 {
            return false;
        }
        let k = k as usize;
        if self.degree().unwrap() > k {
            return false;
        }
        let negate = c.rem_euclid(2) == 1;
        (0..=k).all(|i| {
            let mirrored = self.coeff(k - i);
            let rhs = if negate { -mirrored } else { mirrored };
            self.coeff(i) == rhs
        })
    }

    /// Reduce into the window `[lo, lo + r - 2]` modulo `A_r = (1-t^r)/(1-t)`.
    ///
    /// Every residue class mod `A_r` contains exactly one polynomial supported
    /// on `r - 1` consecutive exponents, because `{t^lo, ..., t^{lo+r-2}}` is a
    /// basis of `Z[t]/(A_r)`. Exponents are first folded with `t^r = 1` (valid
    /// since `t^r - 1 = (t-1) A_r`), then the surplus slot is cleared by
    /// subtracting a multiple of `t^lo A_r`.
    pub fn reduce_mod_a(&self, r: i64, lo: i64) -> IntPoly {
        assert!(r >= 2, "index must exceed 1");
        let r = r as usize;
        // r consecutive slots starting at lo; the final one is scratch.
        let mut window = vec![BigInt::zero(); r];
        for (e, c) in self.terms() {
            let slot = (e as i64 - lo).rem_euclid(r as i64) as usize;
            window[slot] += c;
        }
        let surplus = window[r - 1].clone();
        if !surplus.is_zero() {
            for w in window.iter_mut() {
                *w -= &surplus;
            }
        }
        window.pop();
        if lo >= 0 {
            IntPoly::from_coeffs(vec![BigInt::zero(); lo as usize])
                .add_shifted_window(window, lo as usize)
        } else {
            panic!("window start must be nonnegative, got {lo}");
        }
    }

    fn add_shifted_window(mut self, window: Vec<BigInt>, lo: usize) -> IntPoly {
        self.coeffs.resize(lo, BigInt::zero());
        self.coeffs.extend(window);
        self.trim();
        self
    }

    /// All coefficients in `[lo, hi]` strictly negative and zero elsewhere.
    pub fn is_strictly_negative_on(&self, lo: usize, hi: usize) -> bool {
        if let Some(d) = self.degree() {
            if d > hi {
                return false;
            }
        }
        (0..=hi).all(|e| {
            let c = self.coeff(e);
            if (lo..=hi).contains(&e) {
                c.is_negative()
            } else {
                c.is_zero()
            }
        })
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i) + rhs.coeff(i));
        }
        IntPoly::from_coeffs(coeffs)
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i) - rhs.coeff(i));
        }
        IntPoly::from_coeffs(coeffs)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        IntPoly::from_coeffs(coeffs)
    }
}

impl fmt::Display for IntPoly {
    /// Renders like `-3t^3 - 2t^4 - t^5`, lowest degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_mag = !mag.is_one() || e == 0;
            if show_mag {
                write!(f, "{mag}")?;
            }
            match e {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{e}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_basics() {
        let p = IntPoly::from_i64(&[1, 0, -2]);
        let q = IntPoly::from_i64(&[0, 3]);
        assert_eq!(&p + &q, IntPoly::from_i64(&[1, 3, -2]));
        assert_eq!(&p - &p, IntPoly::zero());
        assert_eq!(&p * &q, IntPoly::from_i64(&[0, 3, 0, -6]));
        assert_eq!(p.degree(), Some(2));
        assert_eq!(IntPoly::zero().degree(), None);
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let p = IntPoly::from_i64(&[1, 2, 0, 0]);
        assert_eq!(p.coeffs().len(), 2);
        let q = &IntPoly::from_i64(&[0, 0, 1]) - &IntPoly::monomial(1, 2);
        assert!(q.is_zero());
    }

    #[test]
    fn exact_division() {
        let n = IntPoly::one_minus_pow(6);
        let d = IntPoly::one_minus_pow(1);
        assert_eq!(n.div_exact(&d), Some(IntPoly::geometric(6)));
        assert_eq!(IntPoly::one_minus_pow(3).div_exact(&IntPoly::from_i64(&[1, 1])), None);
        let a = IntPoly::cyclotomic_a(8);
        let prod = &a * &IntPoly::from_i64(&[2, -1, 5]);
        assert_eq!(prod.div_exact(&a), Some(IntPoly::from_i64(&[2, -1, 5])));
    }

    #[test]
    fn gorenstein_symmetry_examples() {
        // Gr(2,5) numerator for w = (0,1,1,1,1).
        let n = IntPoly::from_i64(&[1, 0, 0, -4, 0, 4, 0, 0, -1]);
        assert!(n.is_gorenstein_symmetric(8, 3));
        // Hypersurface numerator.
        assert!(IntPoly::one_minus_pow(6).is_gorenstein_symmetric(6, 1));
        // Asymmetric coefficients.
        assert!(!IntPoly::from_i64(&[1, -1, 0, -1]).is_gorenstein_symmetric(3, 1));
        // Wrong sign parity.
        assert!(!IntPoly::one_minus_pow(6).is_gorenstein_symmetric(6, 2));
    }

    #[test]
    fn reduce_mod_a_window_basis() {
        // 1 = t^3 mod A_3, reduced to the window [3,4].
        let one = IntPoly::one();
        assert_eq!(one.reduce_mod_a(3, 3), IntPoly::monomial(1, 3));
        assert_eq!((&IntPoly::zero() - &one).reduce_mod_a(3, 3), IntPoly::monomial(-1, 3));
        // Multiples of A_r reduce to zero in any window.
        for r in 2..10 {
            let a = IntPoly::cyclotomic_a(r as usize);
            for lo in [0_i64, 1, 3, 7] {
                assert!(a.reduce_mod_a(r, lo).is_zero());
            }
        }
    }

    #[test]
    fn reduce_mod_a_is_congruent() {
        // result - p must be divisible by A_r.
        let p = IntPoly::from_i64(&[4, -7, 0, 2, 9, -1, 1, 3]);
        for r in 2..12_i64 {
            let a = IntPoly::cyclotomic_a(r as usize);
            for lo in [0_i64, 2, 5] {
                let red = p.reduce_mod_a(r, lo);
                let diff = &red - &p;
                assert!(diff.div_exact(&a).is_some(), "r={r} lo={lo}");
                if let Some(d) = red.degree() {
                    assert!(d as i64 <= lo + r - 2);
                }
                if let Some(o) = red.order() {
                    assert!(o as i64 >= lo);
                }
            }
        }
    }

    #[test]
    fn display_matches_conventional_form() {
        let c = IntPoly::from_i64(&[0, 0, 0, -3, -2, -1, -3, -1, -2, -3]);
        assert_eq!(
            c.to_string(),
            "-3t^3 - 2t^4 - t^5 - 3t^6 - t^7 - 2t^8 - 3t^9"
        );
        assert_eq!(IntPoly::from_i64(&[1, -1]).to_string(), "1 - t");
        assert_eq!(IntPoly::zero().to_string(), "0");
    }
}
