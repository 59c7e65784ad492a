//! Gorenstein formats: complete intersections, the codimension-three
//! Pfaffian Gr(2,5) family, hypersurface products of it, and the
//! codimension-five orthogonal Grassmannian OGr(5,10).
//!
//! A format instance packages the key weights, equation degrees, Hilbert
//! numerator and adjunction number determined by a grading, plus the data the
//! search needs (`chi_max` bounds the ambient weights).

use crate::error::GrdbError;
use crate::poly::IntPoly;
use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Gr(2,5) grading vector `w1 <= ... <= w5`, either all integers or all
/// half-odd-integers, stored doubled so every quantity stays integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Gr25Grading {
    doubled: [i64; 5],
}

impl Gr25Grading {
    pub fn from_doubled(doubled: [i64; 5]) -> Result<Self, GrdbError> {
        let parity = doubled[0].rem_euclid(2);
        if doubled.iter().any(|d| d.rem_euclid(2) != parity) {
            return Err(GrdbError::invalid(
                "grading entries must be all integers or all half-odd-integers",
            ));
        }
        let mut sorted = doubled;
        sorted.sort_unstable();
        if sorted != doubled {
            return Err(GrdbError::invalid("grading must be sorted ascending"));
        }
        Ok(Gr25Grading { doubled })
    }

    /// Parse entries like `0,1,1,1,1` or `1/2,1/2,3/2,3/2,3/2`.
    pub fn parse(parts: &[String]) -> Result<Self, GrdbError> {
        if parts.len() != 5 {
            return Err(GrdbError::invalid("gr25 grading needs 5 entries"));
        }
        let mut doubled = [0i64; 5];
        for (i, p) in parts.iter().enumerate() {
            doubled[i] = parse_half(p)?;
        }
        Gr25Grading::from_doubled(doubled)
    }

    pub fn doubled(&self) -> [i64; 5] {
        self.doubled
    }

    /// `2 * sum(w)`, the adjunction number of the format.
    pub fn adjunction(&self) -> i64 {
        self.doubled.iter().sum()
    }

    /// The ten pairwise sums `w_i + w_j` (i < j) in lexicographic order:
    /// the key weight matrix, row by row.
    pub fn pairwise_sums(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(10);
        for i in 0..5 {
            for j in i + 1..5 {
                out.push((self.doubled[i] + self.doubled[j]) / 2);
            }
        }
        out
    }

    pub fn entries_display(&self) -> Vec<String> {
        self.doubled.iter().map(|&d| half_display(d)).collect()
    }
}

/// OGr(5,10) grading: positive integer `u` plus a `w` vector as above.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ogr510Grading {
    pub u: i64,
    doubled: [i64; 5],
}

impl Ogr510Grading {
    pub fn from_doubled(u: i64, doubled: [i64; 5]) -> Result<Self, GrdbError> {
        if u < 1 {
            return Err(GrdbError::invalid("u must be a positive integer"));
        }
        let parity = doubled[0].rem_euclid(2);
        if doubled.iter().any(|d| d.rem_euclid(2) != parity) {
            return Err(GrdbError::invalid(
                "grading entries must be all integers or all half-odd-integers",
            ));
        }
        let mut sorted = doubled;
        sorted.sort_unstable();
        if sorted != doubled {
            return Err(GrdbError::invalid("grading must be sorted ascending"));
        }
        // x has the smallest weight in the format, so no pairwise sum may be
        // negative; only w1 may be negative.
        if doubled[0] + doubled[1] < 0 {
            return Err(GrdbError::invalid(
                "w1 + w2 must be nonnegative in a normalised OGr(5,10) grading",
            ));
        }
        Ok(Ogr510Grading { u, doubled })
    }

    pub fn doubled(&self) -> [i64; 5] {
        self.doubled
    }

    fn doubled_sum(&self) -> i64 {
        self.doubled.iter().sum()
    }

    /// `k_V = 4|w| + 8u`.
    pub fn adjunction(&self) -> i64 {
        2 * self.doubled_sum() + 8 * self.u
    }

    /// The sixteen variable weights, in the order `x`, `x_1..x_5`, `x_ij`.
    pub fn variable_weights(&self) -> Vec<i64> {
        let s = self.doubled_sum();
        let mut out = Vec::with_capacity(16);
        out.push(self.u);
        for i in 0..5 {
            out.push(self.u + (s - self.doubled[i]) / 2);
        }
        for i in 0..5 {
            for j in i + 1..5 {
                out.push(self.u + (self.doubled[i] + self.doubled[j]) / 2);
            }
        }
        out
    }

    pub fn entries_display(&self) -> Vec<String> {
        self.doubled.iter().map(|&d| half_display(d)).collect()
    }
}

/// Grading parameters attached to a format instance.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GradingParams {
    Ci { degrees: Vec<i64> },
    Gr25 { w: Gr25Grading },
    Gr25xH { w: Gr25Grading, degrees: Vec<i64> },
    Ogr510 { g: Ogr510Grading },
}

impl GradingParams {
    pub fn family_name(&self) -> &'static str {
        match self {
            GradingParams::Ci { .. } => "ci",
            GradingParams::Gr25 { .. } => "gr25",
            GradingParams::Gr25xH { .. } => "gr25xh",
            GradingParams::Ogr510 { .. } => "ogr510",
        }
    }
}

/// A graded Gorenstein format: everything the search pipeline consumes.
#[derive(Clone, Debug)]
pub struct FormatInstance {
    pub params: GradingParams,
    pub codim: i64,
    pub key_weights: Vec<i64>,
    pub equation_degrees: Vec<i64>,
    pub numerator: IntPoly,
    /// Degree of the Hilbert numerator, `k_V`.
    pub adjunction: i64,
    /// Largest key weight: an upper bound for any ambient weight.
    pub chi_max: i64,
}

impl FormatInstance {
    /// The quantity the search iterates over in increasing order. For
    /// OGr(5,10) the tables index searches by `k_V / 2` (equation degrees
    /// pair up to that value); the other families use `k_V` itself.
    pub fn search_parameter(&self) -> i64 {
        match self.params {
            GradingParams::Ogr510 { .. } => self.adjunction / 2,
            _ => self.adjunction,
        }
    }

    pub fn family_name(&self) -> &'static str {
        self.params.family_name()
    }
}

fn numerator_from_terms(terms: &[(i64, i64)]) -> Result<IntPoly, GrdbError> {
    let mut max_e = 0usize;
    for &(e, _) in terms {
        if e < 0 {
            return Err(GrdbError::invalid(format!(
                "negative exponent {e} in Hilbert numerator"
            )));
        }
        max_e = max_e.max(e as usize);
    }
    let mut coeffs = vec![BigInt::zero(); max_e + 1];
    for &(e, c) in terms {
        coeffs[e as usize] += BigInt::from(c);
    }
    Ok(IntPoly::from_coeffs(coeffs))
}

/// Complete intersection format with the given equation degrees.
pub fn ci_format(degrees: &[i64]) -> Result<FormatInstance, GrdbError> {
    if degrees.is_empty() {
        return Err(GrdbError::invalid("a complete intersection needs at least one equation"));
    }
    if degrees.iter().any(|&d| d < 2) {
        return Err(GrdbError::invalid(
            "equation degrees below 2 are not minimal",
        ));
    }
    let mut degrees = degrees.to_vec();
    degrees.sort_unstable();
    let mut numerator = IntPoly::one();
    for &d in &degrees {
        numerator = &numerator * &IntPoly::one_minus_pow(d as usize);
    }
    let adjunction = degrees.iter().sum();
    Ok(FormatInstance {
        codim: degrees.len() as i64,
        key_weights: degrees.clone(),
        equation_degrees: degrees.clone(),
        chi_max: *degrees.last().unwrap(),
        params: GradingParams::Ci { degrees },
        numerator,
        adjunction,
    })
}

/// Gr(2,5) Pfaffian format: equation degrees `d_j = sum(w) - w_{6-j}`,
/// numerator `1 - sum t^{d_j} + sum t^{k - d_j} - t^k` with `k = 2 sum(w)`.
pub fn gr25_format(w: &Gr25Grading) -> Result<FormatInstance, GrdbError> {
    let k = w.adjunction();
    let doubled = w.doubled();
    let sum: i64 = doubled.iter().sum();
    let mut degrees: Vec<i64> = (0..5).map(|j| (sum - doubled[4 - j]) / 2).collect();
    degrees.sort_unstable();
    if degrees[0] < 1 || k - degrees[4] < 0 {
        return Err(GrdbError::invalid(
            "grading produces nonpositive equation degrees",
        ));
    }
    let mut terms = vec![(0, 1), (k, -1)];
    for &d in &degrees {
        terms.push((d, -1));
        terms.push((k - d, 1));
    }
    let numerator = numerator_from_terms(&terms)?;
    let key_weights = w.pairwise_sums();
    let chi_max = *key_weights.iter().max().unwrap();
    Ok(FormatInstance {
        params: GradingParams::Gr25 { w: *w },
        codim: 3,
        key_weights,
        equation_degrees: degrees,
        numerator,
        adjunction: k,
        chi_max,
    })
}

/// OGr(5,10) spinor format. The ten equations have degrees
/// `2u + |w| -+ w_i`; the sixteen first syzygies sit at
/// `g_v = k_V/2 - wt(x_v)` over the sixteen variables, calibrated so the
/// standard grading reproduces the classical resolution twists
/// `(2^10, 3^16, 5^16, 6^10, 8)`.
pub fn ogr510_format(g: &Ogr510Grading) -> Result<FormatInstance, GrdbError> {
    let k = g.adjunction();
    let khalf = k / 2;
    let s = g.doubled().iter().sum::<i64>();
    let mut degrees = Vec::with_capacity(10);
    for &d in &g.doubled() {
        degrees.push(2 * g.u + (s - d) / 2);
        degrees.push(2 * g.u + (s + d) / 2);
    }
    degrees.sort_unstable();
    if degrees[0] < 2 {
        return Err(GrdbError::invalid(
            "grading produces equation degrees below 2",
        ));
    }
    let weights = g.variable_weights();
    let mut terms = vec![(0, 1), (k, -1)];
    for &e in &degrees {
        terms.push((e, -1));
        terms.push((k - e, 1));
    }
    for &wt in &weights {
        let gv = khalf - wt;
        terms.push((gv, 1));
        terms.push((k - gv, -1));
    }
    let numerator = numerator_from_terms(&terms)?;
    let chi_max = *weights.iter().max().unwrap();
    Ok(FormatInstance {
        params: GradingParams::Ogr510 { g: *g },
        codim: 5,
        key_weights: weights,
        equation_degrees: degrees,
        numerator,
        adjunction: k,
        chi_max,
    })
}

/// Tensor a format with extra hypersurface equations: numerators multiply,
/// adjunction numbers and codimensions add, key weights concatenate.
pub fn product_format(f: &FormatInstance, degrees: &[i64]) -> Result<FormatInstance, GrdbError> {
    if degrees.is_empty() {
        return Ok(f.clone());
    }
    if degrees.iter().any(|&d| d < 2) {
        return Err(GrdbError::invalid(
            "equation degrees below 2 are not minimal",
        ));
    }
    let mut extra = degrees.to_vec();
    extra.sort_unstable();
    let params = match &f.params {
        GradingParams::Ci { degrees: base } => {
            let mut all = base.clone();
            all.extend_from_slice(&extra);
            all.sort_unstable();
            GradingParams::Ci { degrees: all }
        }
        GradingParams::Gr25 { w } => GradingParams::Gr25xH {
            w: *w,
            degrees: extra.clone(),
        },
        GradingParams::Gr25xH { w, degrees: base } => {
            let mut all = base.clone();
            all.extend_from_slice(&extra);
            all.sort_unstable();
            GradingParams::Gr25xH { w: *w, degrees: all }
        }
        GradingParams::Ogr510 { .. } => {
            return Err(GrdbError::invalid(
                "hypersurface products of OGr(5,10) are not part of the catalogue",
            ))
        }
    };
    let mut numerator = f.numerator.clone();
    let mut key_weights = f.key_weights.clone();
    let mut equation_degrees = f.equation_degrees.clone();
    let mut chi_max = f.chi_max;
    for &d in &extra {
        numerator = &numerator * &IntPoly::one_minus_pow(d as usize);
        key_weights.push(d);
        equation_degrees.push(d);
        chi_max = chi_max.max(d);
    }
    equation_degrees.sort_unstable();
    Ok(FormatInstance {
        params,
        codim: f.codim + extra.len() as i64,
        key_weights,
        equation_degrees,
        numerator,
        adjunction: f.adjunction + extra.iter().sum::<i64>(),
        chi_max,
    })
}

/// Which family to search, with its shape parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    Ci { codim: usize },
    Gr25,
    Gr25xH { hypersurfaces: usize },
    Ogr510,
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Ci { codim } => write!(f, "ci (codim {codim})"),
            FamilySpec::Gr25 => write!(f, "gr25"),
            FamilySpec::Gr25xH { hypersurfaces } => {
                write!(f, "gr25xh ({hypersurfaces} hypersurfaces)")
            }
            FamilySpec::Ogr510 => write!(f, "ogr510"),
        }
    }
}

/// All normalised gradings of the family whose search parameter equals
/// `param`, honouring the dimension >= 3 positivity of key weights.
/// Output order is deterministic (lexicographic in the grading data).
pub fn enumerate_gradings(
    family: FamilySpec,
    param: i64,
    dim: i64,
) -> Vec<FormatInstance> {
    if param < 1 {
        return Vec::new();
    }
    match family {
        FamilySpec::Ci { codim } => enumerate_ci(codim, param),
        FamilySpec::Gr25 => enumerate_gr25(param, dim)
            .into_iter()
            .filter_map(|w| gr25_format(&w).ok())
            .collect(),
        FamilySpec::Gr25xH { hypersurfaces } => {
            let mut out = Vec::new();
            let min_extra = 2 * hypersurfaces as i64;
            for kv1 in 1..=param - min_extra {
                for w in enumerate_gr25(kv1, dim) {
                    let Ok(base) = gr25_format(&w) else { continue };
                    let mut degrees = Vec::new();
                    collect_sorted_tuples(
                        hypersurfaces,
                        param - kv1,
                        2,
                        &mut Vec::new(),
                        &mut degrees,
                    );
                    for d in degrees {
                        if let Ok(f) = product_format(&base, &d) {
                            out.push(f);
                        }
                    }
                }
            }
            out
        }
        FamilySpec::Ogr510 => enumerate_ogr510(param)
            .into_iter()
            .filter_map(|g| ogr510_format(&g).ok())
            .collect(),
    }
}

fn enumerate_ci(codim: usize, adjunction: i64) -> Vec<FormatInstance> {
    let mut tuples = Vec::new();
    collect_sorted_tuples(codim, adjunction, 2, &mut Vec::new(), &mut tuples);
    tuples
        .into_iter()
        .filter_map(|d| ci_format(&d).ok())
        .collect()
}

/// Sorted `len`-tuples with entries >= `min` summing to `total`.
fn collect_sorted_tuples(
    len: usize,
    total: i64,
    min: i64,
    prefix: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    if len == 0 {
        if total == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    // entries are sorted ascending, so each of the remaining entries is at
    // least `min`, giving the upper bound total/len for the next one
    let mut v = min;
    while v * len as i64 <= total {
        prefix.push(v);
        collect_sorted_tuples(len - 1, total - v, v, prefix, out);
        prefix.pop();
        v += 1;
    }
}

fn enumerate_gr25(adjunction: i64, dim: i64) -> Vec<Gr25Grading> {
    // doubled entries share the parity of the adjunction number
    let parity = adjunction.rem_euclid(2);
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    gr25_rec(adjunction, dim, parity, &mut prefix, &mut out);
    out
}

fn gr25_rec(
    remaining: i64,
    dim: i64,
    parity: i64,
    prefix: &mut Vec<i64>,
    out: &mut Vec<Gr25Grading>,
) {
    let idx = prefix.len();
    if idx == 5 {
        if remaining == 0 {
            let doubled: [i64; 5] = prefix.as_slice().try_into().unwrap();
            if let Ok(g) = Gr25Grading::from_doubled(doubled) {
                out.push(g);
            }
        }
        return;
    }
    let slots = (5 - idx) as i64;
    // lower bound: sortedness, positivity of the smallest pairwise sum
    let mut lo = match idx {
        0 => {
            // D1 >= (8 - k)/3 when dim >= 3 (see module tests); otherwise
            // bounded below by -remaining as a safe fallback
            if dim >= 3 {
                div_ceil(8 - remaining, 3)
            } else {
                -remaining
            }
        }
        1 => {
            let need = if dim >= 3 { 2 - prefix[0] } else { prefix[0] };
            need.max(prefix[0])
        }
        _ => prefix[idx - 1],
    };
    // match parity
    if lo.rem_euclid(2) != parity {
        lo += 1;
    }
    let mut v = lo;
    loop {
        // the remaining slots are all >= v, so v cannot exceed remaining/slots
        if v * slots > remaining {
            break;
        }
        prefix.push(v);
        gr25_rec(remaining - v, dim, parity, prefix, out);
        prefix.pop();
        v += 2;
    }
}

fn enumerate_ogr510(param: i64) -> Vec<Ogr510Grading> {
    let mut out = Vec::new();
    for u in 1..=param / 4 {
        let s = param - 4 * u; // doubled |w|
        let parity = s.rem_euclid(2);
        let mut prefix = Vec::new();
        ogr_rec(s, parity, &mut prefix, &mut |doubled| {
            if let Ok(g) = Ogr510Grading::from_doubled(u, doubled) {
                out.push(g);
            }
        });
    }
    out
}

fn ogr_rec(remaining: i64, parity: i64, prefix: &mut Vec<i64>, emit: &mut impl FnMut([i64; 5])) {
    let idx = prefix.len();
    if idx == 5 {
        if remaining == 0 {
            emit(prefix.as_slice().try_into().unwrap());
        }
        return;
    }
    let slots = (5 - idx) as i64;
    let mut lo = match idx {
        0 => div_ceil(-remaining, 3).min(0),
        1 => (-prefix[0]).max(prefix[0]),
        _ => prefix[idx - 1],
    };
    if lo.rem_euclid(2) != parity {
        lo += 1;
    }
    let mut v = lo;
    while v * slots <= remaining {
        prefix.push(v);
        ogr_rec(remaining - v, parity, prefix, emit);
        prefix.pop();
        v += 2;
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    a.div_euclid(b) + if a.rem_euclid(b) != 0 { 1 } else { 0 }
}

fn parse_half(s: &str) -> Result<i64, GrdbError> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num
            .trim()
            .parse()
            .map_err(|_| GrdbError::invalid(format!("bad fraction '{s}'")))?;
        let d: i64 = den
            .trim()
            .parse()
            .map_err(|_| GrdbError::invalid(format!("bad fraction '{s}'")))?;
        match d {
            1 => Ok(2 * n),
            2 => Ok(n),
            _ => Err(GrdbError::invalid(format!(
                "grading entries must have denominator 1 or 2, got '{s}'"
            ))),
        }
    } else {
        let n: i64 = s
            .parse()
            .map_err(|_| GrdbError::invalid(format!("bad number '{s}'")))?;
        Ok(2 * n)
    }
}

pub fn half_display(doubled: i64) -> String {
    if doubled % 2 == 0 {
        (doubled / 2).to_string()
    } else {
        format!("{doubled}/2")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gr(ws: [i64; 5]) -> Gr25Grading {
        // integer weights
        Gr25Grading::from_doubled(ws.map(|w| 2 * w)).unwrap()
    }

    #[test]
    fn ci_format_basics() {
        let f = ci_format(&[6]).unwrap();
        assert_eq!(f.numerator, IntPoly::one_minus_pow(6));
        assert_eq!(f.adjunction, 6);
        assert_eq!(f.chi_max, 6);
        let f = ci_format(&[18, 35]).unwrap();
        assert_eq!(f.adjunction, 53);
        assert_eq!(
            f.numerator,
            &IntPoly::one_minus_pow(18) * &IntPoly::one_minus_pow(35)
        );
        let f = ci_format(&[2, 2]).unwrap();
        assert_eq!(f.numerator, IntPoly::from_i64(&[1, 0, -2, 0, 1]));
        assert_eq!(f.adjunction, 4);
        assert!(ci_format(&[1, 3]).is_err());
        assert!(ci_format(&[]).is_err());
    }

    #[test]
    fn gr25_table_row_one() {
        let f = gr25_format(&gr([0, 1, 1, 1, 1])).unwrap();
        assert_eq!(f.equation_degrees, vec![3, 3, 3, 3, 4]);
        assert_eq!(f.adjunction, 8);
        assert_eq!(f.key_weights, vec![1, 1, 1, 1, 2, 2, 2, 2, 2, 2]);
        assert_eq!(f.chi_max, 2);
        assert_eq!(
            f.numerator,
            IntPoly::from_i64(&[1, 0, 0, -4, 0, 4, 0, 0, -1])
        );
        assert!(f.numerator.is_gorenstein_symmetric(8, 3));
    }

    #[test]
    fn gr25_k3_example_numerator() {
        let f = gr25_format(&gr([1, 2, 3, 3, 4])).unwrap();
        let mut want = vec![0i64; 27];
        want[0] = 1;
        want[9] = -1;
        want[10] = -2;
        want[11] = -1;
        want[12] = -1;
        want[14] = 1;
        want[15] = 1;
        want[16] = 2;
        want[17] = 1;
        want[26] = -1;
        assert_eq!(f.numerator, IntPoly::from_i64(&want));
        assert_eq!(f.adjunction, 26);
    }

    #[test]
    fn gr25_negative_weight_surface_numerator() {
        let w = Gr25Grading::from_doubled([-1, -1, 3, 3, 3]).unwrap();
        let f = gr25_format(&w).unwrap();
        assert_eq!(
            f.numerator,
            IntPoly::from_i64(&[1, 0, -3, 2, -2, 3, 0, -1])
        );
        assert_eq!(f.adjunction, 7);
        assert!(f.numerator.is_gorenstein_symmetric(7, 3));
    }

    #[test]
    fn ogr510_standard_spinor_grading() {
        let g = Ogr510Grading::from_doubled(1, [0; 5]).unwrap();
        let f = ogr510_format(&g).unwrap();
        assert_eq!(f.key_weights, vec![1; 16]);
        assert_eq!(f.equation_degrees, vec![2; 10]);
        assert_eq!(f.adjunction, 8);
        let mut want = vec![0i64; 9];
        want[0] = 1;
        want[2] = -10;
        want[3] = 16;
        want[5] = -16;
        want[6] = 10;
        want[8] = -1;
        assert_eq!(f.numerator, IntPoly::from_i64(&want));
    }

    #[test]
    fn ogr510_table_two_rows() {
        let g = Ogr510Grading::from_doubled(1, [0, 0, 0, 0, 2]).unwrap();
        let f = ogr510_format(&g).unwrap();
        assert_eq!(f.adjunction, 12);
        assert_eq!(
            f.equation_degrees,
            vec![2, 3, 3, 3, 3, 3, 3, 3, 3, 4]
        );
        let mut ws = f.key_weights.clone();
        ws.sort_unstable();
        assert_eq!(ws, vec![1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2]);
        assert!(f.numerator.is_gorenstein_symmetric(12, 5));

        let g5 = Ogr510Grading::from_doubled(2, [0; 5]).unwrap();
        let f5 = ogr510_format(&g5).unwrap();
        assert_eq!(f5.adjunction, 16);
        assert_eq!(f5.key_weights, vec![2; 16]);
        assert_eq!(f5.equation_degrees, vec![4; 10]);
    }

    #[test]
    fn product_format_laws() {
        // hypersurface section of a Gr(2,5) four-fold, adjunction 35 + 18
        let w = Gr25Grading::from_doubled([3, 5, 7, 9, 11]).unwrap();
        let base = gr25_format(&w).unwrap();
        assert_eq!(base.adjunction, 35);
        let f = product_format(&base, &[18]).unwrap();
        assert_eq!(f.adjunction, 53);
        assert_eq!(f.codim, 4);
        assert!(f.numerator.is_gorenstein_symmetric(53, 4));
        // empty product is the identity
        let same = product_format(&base, &[]).unwrap();
        assert_eq!(same.numerator, base.numerator);
        // product of complete intersections merges degree lists
        let a = product_format(&ci_format(&[2]).unwrap(), &[3]).unwrap();
        let b = ci_format(&[2, 3]).unwrap();
        assert_eq!(a.numerator, b.numerator);
        assert_eq!(a.params, b.params);
        assert_eq!(a.key_weights, b.key_weights);
    }

    #[test]
    fn enumerate_ci_partitions() {
        let fs = enumerate_gradings(FamilySpec::Ci { codim: 2 }, 5, 3);
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].equation_degrees, vec![2, 3]);
        let fs = enumerate_gradings(FamilySpec::Ci { codim: 1 }, 7, 3);
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].equation_degrees, vec![7]);
    }

    #[test]
    fn enumerate_gr25_contains_table_rows_and_matches_oracle() {
        let fs = enumerate_gradings(FamilySpec::Gr25, 8, 3);
        assert!(fs.iter().any(|f| matches!(
            &f.params,
            GradingParams::Gr25 { w } if w.doubled() == [0, 2, 2, 2, 2]
        )));
        // brute-force oracle over the bounded doubled region
        for kv in 1..=8_i64 {
            let got: Vec<[i64; 5]> = enumerate_gr25(kv, 3).iter().map(|g| g.doubled()).collect();
            let mut want = Vec::new();
            let lo = -kv - 2;
            let hi = kv + 2;
            brute_tuples(5, lo, hi, &mut Vec::new(), &mut |t| {
                let sorted = t.windows(2).all(|p| p[0] <= p[1]);
                let parity_ok = t.iter().all(|d| d.rem_euclid(2) == kv.rem_euclid(2));
                let sum: i64 = t.iter().sum();
                if sorted && parity_ok && sum == kv && t[0] + t[1] >= 2 {
                    want.push([t[0], t[1], t[2], t[3], t[4]]);
                }
            });
            assert_eq!(got, want, "kv={kv}");
        }
    }

    fn brute_tuples(
        len: usize,
        lo: i64,
        hi: i64,
        prefix: &mut Vec<i64>,
        visit: &mut impl FnMut(&[i64]),
    ) {
        if len == 0 {
            visit(prefix);
            return;
        }
        for v in lo..=hi {
            prefix.push(v);
            brute_tuples(len - 1, lo, hi, prefix, visit);
            prefix.pop();
        }
    }

    #[test]
    fn enumerate_ogr510_covers_table_rows() {
        // Table 2 row 1: u = 1, w = (0,0,0,0,1), parameter k_V/2 = 6.
        let fs = enumerate_gradings(FamilySpec::Ogr510, 6, 3);
        assert!(fs.iter().any(|f| matches!(
            &f.params,
            GradingParams::Ogr510 { g } if g.u == 1 && g.doubled() == [0, 0, 0, 0, 2]
        )));
        // largest Table 2 row: u = 3, w = (0,1,2,3,4), parameter 32
        let fs = enumerate_gradings(FamilySpec::Ogr510, 32, 3);
        assert!(fs.iter().any(|f| matches!(
            &f.params,
            GradingParams::Ogr510 { g } if g.u == 3 && g.doubled() == [0, 2, 4, 6, 8]
        )));
    }

    #[test]
    fn enumeration_is_duplicate_free() {
        for kv in 1..=20 {
            let fs = enumerate_gradings(FamilySpec::Gr25, kv, 3);
            let mut keys: Vec<_> = fs
                .iter()
                .map(|f| format!("{:?}", f.params))
                .collect();
            keys.sort();
            let n = keys.len();
            keys.dedup();
            assert_eq!(n, keys.len());
            for f in &fs {
                assert!(f
                    .numerator
                    .is_gorenstein_symmetric(f.adjunction, f.codim));
            }
        }
    }

    #[test]
    fn half_integer_parsing() {
        let g = Gr25Grading::parse(&[
            "1/2".into(),
            "1/2".into(),
            "3/2".into(),
            "3/2".into(),
            "3/2".into(),
        ])
        .unwrap();
        assert_eq!(g.doubled(), [1, 1, 3, 3, 3]);
        assert_eq!(g.entries_display(), vec!["1/2", "1/2", "3/2", "3/2", "3/2"]);
        assert!(Gr25Grading::parse(&vec!["1/3".to_string(); 5]).is_err());
        assert!(Gr25Grading::parse(&["0".into(), "1/2".into(), "1".into(), "1".into(), "1".into()]).is_err());
    }
}
