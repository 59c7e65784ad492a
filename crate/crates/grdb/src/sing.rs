//! Isolated cyclic quotient singularities `1/r(w1, w2, w3)`.
//!
//! The weight triple is recorded with respect to the polarising divisor `A`:
//! local orbinates carry their `A`-degrees mod `r`. Two polarised points are
//! identified only up to reordering of the weights; simultaneous unit
//! rescaling changes the polarisation data (for example `1/3(1,1,1)` and
//! `1/3(2,2,2)` contribute with opposite signs), so it is used only for the
//! abstract classification behind the terminal test.

use crate::error::GrdbError;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// An isolated cyclic quotient point `1/r(w1, w2, w3)` with weights coprime
/// to `r`, stored sorted ascending.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuotientSingularity {
    r: i64,
    weights: [i64; 3],
}

impl QuotientSingularity {
    pub fn new(r: i64, weights: [i64; 3]) -> Result<Self, GrdbError> {
        if r < 2 {
            return Err(GrdbError::invalid(format!("index r = {r} must exceed 1")));
        }
        let mut reduced = weights.map(|w| w.rem_euclid(r));
        for &w in &reduced {
            if w == 0 || w.gcd(&r) != 1 {
                return Err(GrdbError::invalid(format!(
                    "weight {w} is not coprime to r = {r}: point would not be isolated"
                )));
            }
        }
        reduced.sort_unstable();
        Ok(QuotientSingularity { r, weights: reduced })
    }

    /// The polarised terminal point of index `r` for polarisation `K = kA`:
    /// `1/r(-k, a, r-a)`. For `k = 1` this is the familiar `1/r(r-1, a, r-a)`.
    pub fn terminal(r: i64, a: i64, k: i64) -> Result<Self, GrdbError> {
        let u = (-k).rem_euclid(r);
        QuotientSingularity::new(r, [u, a, r - a])
    }

    pub fn index(&self) -> i64 {
        self.r
    }

    pub fn weights(&self) -> [i64; 3] {
        self.weights
    }

    pub fn weight_sum_mod_r(&self) -> i64 {
        (self.weights.iter().sum::<i64>()).rem_euclid(self.r)
    }

    /// True when the weight sum vanishes mod `r`: the Gorenstein condition
    /// `a + b + c = 0 (mod r)` for an isolated crepant (canonical) point.
    pub fn is_crepant(&self) -> bool {
        self.weight_sum_mod_r() == 0
    }

    /// True when the underlying abstract singularity is terminal, i.e. some
    /// unit multiple of the triple is `(1, a, r - a)`.
    pub fn is_terminal(&self) -> bool {
        let r = self.r;
        (1..r).filter(|u| u.gcd(&r) == 1).any(|u| {
            let mut v = self.weights.map(|w| (w * u).rem_euclid(r));
            v.sort_unstable();
            v.contains(&1) && {
                // remove one copy of 1, the remaining pair must sum to r
                let mut rest = Vec::with_capacity(2);
                let mut removed = false;
                for x in v {
                    if x == 1 && !removed {
                        removed = true;
                    } else {
                        rest.push(x);
                    }
                }
                rest[0] + rest[1] == r
            }
        })
    }

    /// Smallest triple in the orbit under permutations and simultaneous unit
    /// multiplication: a label for the abstract isomorphism class.
    pub fn abstract_class(&self) -> [i64; 3] {
        let r = self.r;
        let mut best = self.weights;
        for u in 2..r {
            if u.gcd(&r) != 1 {
                continue;
            }
            let mut v = self.weights.map(|w| (w * u).rem_euclid(r));
            v.sort_unstable();
            if v < best {
                best = v;
            }
        }
        best
    }

    /// For a terminal point written as `1/r(-k, a, -a)` in `A`-weights,
    /// recover the pair `(r, a)` normalised with `a <= r/2`.
    ///
    /// Rejects points that are not of the polarised terminal shape for the
    /// given `k`.
    pub fn terminal_pair(&self, k: i64) -> Result<(i64, i64), GrdbError> {
        let r = self.r;
        let u = (-k).rem_euclid(r);
        // find a weight equal to u whose complementary pair sums to 0 mod r
        for i in 0..3 {
            if self.weights[i] != u {
                continue;
            }
            let rest: Vec<i64> = (0..3).filter(|&j| j != i).map(|j| self.weights[j]).collect();
            if (rest[0] + rest[1]).rem_euclid(r) == 0 {
                let b = rest[0];
                return Ok((r, b.min(r - b)));
            }
        }
        Err(GrdbError::invalid(format!(
            "{self} is not a terminal point polarised with K = {k}A"
        )))
    }
}

impl fmt::Display for QuotientSingularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "1/{}({},{},{})",
            self.r, self.weights[0], self.weights[1], self.weights[2]
        )
    }
}

impl FromStr for QuotientSingularity {
    type Err = GrdbError;

    /// Parses `1/r(a,b,c)`.
    fn from_str(s: &str) -> Result<Self, GrdbError> {
        let bad = || GrdbError::invalid(format!("cannot parse singularity '{s}'"));
        let rest = s.trim().strip_prefix("1/").ok_or_else(bad)?;
        let open = rest.find('(').ok_or_else(bad)?;
        let r: i64 = rest[..open].trim().parse().map_err(|_| bad())?;
        let inner = rest[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let ws: Vec<i64> = inner
            .split(',')
            .map(|p| p.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        if ws.len() != 3 {
            return Err(bad());
        }
        QuotientSingularity::new(r, [ws[0], ws[1], ws[2]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_validates_isolation() {
        assert!(QuotientSingularity::new(4, [1, 2, 3]).is_err());
        assert!(QuotientSingularity::new(1, [1, 1, 1]).is_err());
        let s = QuotientSingularity::new(8, [7, 3, 5]).unwrap();
        assert_eq!(s.weights(), [3, 5, 7]);
    }

    #[test]
    fn terminal_and_crepant_flags() {
        let s = QuotientSingularity::new(8, [3, 5, 7]).unwrap();
        assert!(s.is_terminal());
        assert!(!s.is_crepant());
        let c = QuotientSingularity::new(3, [1, 1, 1]).unwrap();
        assert!(c.is_crepant());
        assert!(!c.is_terminal());
        let c2 = QuotientSingularity::new(3, [2, 2, 2]).unwrap();
        assert!(c2.is_crepant());
        // 1/5(1,2,2) is crepant but not terminal.
        let q = QuotientSingularity::new(5, [1, 2, 2]).unwrap();
        assert!(q.is_crepant());
        assert!(!q.is_terminal());
        let t = QuotientSingularity::new(5, [4, 2, 3]).unwrap();
        assert!(t.is_terminal());
    }

    #[test]
    fn terminal_pair_extraction() {
        let s = QuotientSingularity::new(8, [7, 3, 5]).unwrap();
        assert_eq!(s.terminal_pair(1).unwrap(), (8, 3));
        let t = QuotientSingularity::new(3, [1, 1, 2]).unwrap();
        assert_eq!(t.terminal_pair(2).unwrap(), (3, 1));
        let c = QuotientSingularity::new(3, [1, 1, 1]).unwrap();
        assert!(c.terminal_pair(1).is_err());
    }

    #[test]
    fn abstract_class_is_unit_invariant() {
        let a = QuotientSingularity::new(3, [1, 1, 1]).unwrap();
        let b = QuotientSingularity::new(3, [2, 2, 2]).unwrap();
        assert_eq!(a.abstract_class(), b.abstract_class());
        assert_ne!(a, b);
    }

    #[test]
    fn parse_display_round_trip() {
        for s in ["1/2(1,1,1)", "1/8(3,5,7)", "1/11(5,6,9)"] {
            let p: QuotientSingularity = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("1/4(1,2,3)".parse::<QuotientSingularity>().is_err());
        assert!("nonsense".parse::<QuotientSingularity>().is_err());
    }
}
