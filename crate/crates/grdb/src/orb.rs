//! Orbifold Riemann--Roch contributions of isolated quotient points.
//!
//! For a point `Q = 1/r(w1,w2,w3)` on a threefold polarised with `K = kA`,
//! the contribution to the Hilbert series is
//!
//! ```text
//! P_orb(Q) = C(t) / ((1-t)^3 (1-t^r))
//! ```
//!
//! where `C` is the unique polynomial supported on the window
//! `[floor(c/2)+1, floor(c/2)+r-1]`, `c = k + 4`, with
//! `C * B = 1 mod A_r`, `B = prod (1-t^w)/(1-t)` and `A_r = (1-t^r)/(1-t)`.
//!
//! Two independent routes compute `C`: a closed form for canonically
//! polarised terminal points, and a generic construction that inverts each
//! factor of `B` mod `A_r` and reduces into the window.

use crate::error::GrdbError;
use crate::poly::IntPoly;
use crate::series::CycloRational;
use crate::sing::QuotientSingularity;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// The window `[lo, hi]` carrying the inverse numerator for polarisation
/// index `k` and singularity index `r`. In dimension 3 the Gorenstein
/// parameter is `c = k + 4`.
pub fn support_window(r: i64, k: i64) -> (i64, i64) {
    let c = k + 4;
    let lo = c.div_euclid(2) + 1;
    (lo, lo + r - 2)
}

/// One quotient point's exact contribution to a Hilbert series.
#[derive(Clone, Debug)]
pub struct OrbContribution {
    pub singularity: QuotientSingularity,
    pub k: i64,
    pub inverse_numerator: IntPoly,
    pub series: CycloRational,
}

impl OrbContribution {
    fn assemble(
        singularity: QuotientSingularity,
        k: i64,
        inverse_numerator: IntPoly,
    ) -> Result<Self, GrdbError> {
        let series = CycloRational::new(
            inverse_numerator.clone(),
            vec![1, 1, 1, singularity.index()],
        )?;
        Ok(OrbContribution {
            singularity,
            k,
            inverse_numerator,
            series,
        })
    }
}

fn mod_inverse(a: i64, r: i64) -> Option<i64> {
    let egcd = a.rem_euclid(r).extended_gcd(&r);
    if egcd.gcd != 1 {
        return None;
    }
    Some(egcd.x.rem_euclid(r))
}

/// Closed form for the inverse numerator of a canonically polarised terminal
/// point `1/r(r-1, a, r-a)`: with `m` the representative of `-1/a` in
/// `(0, r/2]` (switching `a` for `r-a` when needed),
/// `c_{i+3} = -min(m, |m - i_a|)` where `i_a = -i m` in `(0, r]`.
pub fn inverse_numerator_closed(r: i64, a: i64) -> Result<IntPoly, GrdbError> {
    if r < 2 {
        return Err(GrdbError::invalid(format!("index r = {r} must exceed 1")));
    }
    let a = a.rem_euclid(r);
    if a == 0 || a.gcd(&r) != 1 {
        return Err(GrdbError::invalid(format!(
            "residue a = {a} must be coprime to r = {r}"
        )));
    }
    // a*m = -1 (mod r) with 0 < m <= r/2; otherwise switch a and r-a.
    let m0 = (r - mod_inverse(a, r).unwrap()).rem_euclid(r);
    let m = if 2 * m0 <= r { m0 } else { r - m0 };
    debug_assert!(m >= 1 && 2 * m <= r);
    let mut coeffs = vec![BigInt::zero(); (r + 2) as usize];
    for i in 0..=(r - 2) {
        let mut ia = (-i * m).rem_euclid(r);
        if ia == 0 {
            ia = r;
        }
        coeffs[(i + 3) as usize] = BigInt::from(-m.min((m - ia).abs()));
    }
    Ok(IntPoly::from_coeffs(coeffs))
}

/// Generic contribution for an arbitrary isolated point and polarisation
/// index `k >= -1`.
///
/// Inverts `B` factor by factor: `(1-t^w)/(1-t)` has inverse
/// `1 + t^w + ... + t^{(s-1)w}` mod `A_r` where `s w = 1 (mod r)`, because
/// `(1-t^w) * (1 + t^w + ... + t^{(s-1)w}) = 1 - t^{sw}` and
/// `t^{sw} = t (mod t^r - 1)`. The product is then reduced into the support
/// window, where the representative is unique.
pub fn porb_generic(s: &QuotientSingularity, k: i64) -> Result<OrbContribution, GrdbError> {
    if k < -1 {
        return Err(GrdbError::invalid(format!(
            "polarisation index k = {k} must be at least -1"
        )));
    }
    let r = s.index();
    let (lo, _hi) = support_window(r, k);
    let mut inv = IntPoly::one();
    for w in s.weights() {
        let sw = mod_inverse(w, r).ok_or_else(|| {
            GrdbError::inconsistency(format!("weight {w} not invertible mod {r}"))
        })?;
        let mut step = IntPoly::zero();
        for j in 0..sw.max(1) {
            step = &step + &IntPoly::monomial(1, (j * w) as usize);
        }
        inv = (&inv * &step).reduce_mod_a(r, lo.max(0));
    }
    let c = inv.reduce_mod_a(r, lo);
    // Exact inverse check: C * B = 1 mod A_r.
    let mut b = IntPoly::one();
    for w in s.weights() {
        b = &b * &IntPoly::geometric(w as usize);
    }
    let product = (&c * &b).reduce_mod_a(r, 0);
    if product != IntPoly::one().reduce_mod_a(r, 0) {
        return Err(GrdbError::inconsistency(format!(
            "inverse numerator of {s} failed the C*B = 1 mod A check"
        )));
    }
    OrbContribution::assemble(*s, k, c)
}

/// Closed-form contribution for a canonically polarised terminal point.
pub fn porb_terminal_closed(r: i64, a: i64) -> Result<OrbContribution, GrdbError> {
    let c = inverse_numerator_closed(r, a)?;
    OrbContribution::assemble(QuotientSingularity::terminal(r, a, 1)?, 1, c)
}

/// The periodic correction `c_m(P)` in the plurigenus formula for a terminal
/// point with canonical pair `(r, a)`:
/// `c_m = sum_{i=1}^{m-1} ib(r - ib) / (2r)` with `ab = 1 (mod r)` and the
/// products reduced into `[0, r)`.
pub(crate) fn plurigenus_cm(r: i64, a: i64, m: i64) -> BigRational {
    let b = mod_inverse(a, r).expect("terminal pair has invertible a");
    let mut sum = BigRational::zero();
    for i in 1..m {
        let x = (i * b).rem_euclid(r);
        sum += BigRational::new(BigInt::from(x * (r - x)), BigInt::from(2 * r));
    }
    sum
}

/// Plurigenus correction of a terminal point `1/r(r-1, a, r-a)` at level `m`.
pub fn plurigenus_contribution(
    s: &QuotientSingularity,
    m: i64,
) -> Result<BigRational, GrdbError> {
    if m < 1 {
        return Err(GrdbError::invalid("plurigenus level m must be positive"));
    }
    let (r, a) = s.terminal_pair(1)?;
    Ok(plurigenus_cm(r, a, m))
}

/// A multiset of singularities with multiplicities.
pub type SingularityMultiset = Vec<(QuotientSingularity, u32)>;

/// All minimal nonzero multisets of candidates, with total multiplicity at
/// most `cap`, whose contributions sum to the zero rational function.
///
/// These are the "kernels" that can be added to any basket without changing
/// the Hilbert series. Verification is exact; the cap bounds the enumeration
/// because mixed-sign contribution sets admit no a-priori bound.
pub fn find_kernels(
    candidates: &[QuotientSingularity],
    k: i64,
    cap: u32,
) -> Result<Vec<SingularityMultiset>, GrdbError> {
    let contributions: Vec<OrbContribution> = candidates
        .iter()
        .map(|s| porb_generic(s, k))
        .collect::<Result<_, _>>()?;
    // All-negative (or all-positive) leading windows cannot cancel.
    let order = candidates
        .iter()
        .map(|s| s.index())
        .max()
        .map(|r| (r + 8) as usize)
        .unwrap_or(8);
    let prefixes: Vec<Vec<BigInt>> = contributions
        .iter()
        .map(|c| c.series.expand(order).coeffs().to_vec())
        .collect();
    if sign_uniform(&prefixes).is_some() {
        return Ok(Vec::new());
    }

    let mut solutions: Vec<Vec<u32>> = Vec::new();
    let mut assignment = vec![0u32; candidates.len()];
    let mut acc = vec![BigInt::zero(); order + 1];
    kernel_dfs(
        &prefixes,
        0,
        cap,
        &mut assignment,
        &mut acc,
        order,
        &mut solutions,
    );
    // Exact verification, then componentwise minimality.
    let mut verified: Vec<Vec<u32>> = Vec::new();
    for sol in solutions {
        let mut total = CycloRational::zero();
        for (i, &mult) in sol.iter().enumerate() {
            if mult > 0 {
                total = total.add(&contributions[i].series.scaled(&BigInt::from(mult)));
            }
        }
        if total.is_zero() {
            verified.push(sol);
        }
    }
    let minimal: Vec<Vec<u32>> = verified
        .iter()
        .filter(|sol| {
            !verified.iter().any(|other| {
                other != *sol
                    && other.iter().zip(sol.iter()).all(|(o, s)| o <= s)
            })
        })
        .cloned()
        .collect();
    let mut out: Vec<SingularityMultiset> = minimal
        .into_iter()
        .map(|sol| {
            sol.into_iter()
                .enumerate()
                .filter(|(_, m)| *m > 0)
                .map(|(i, m)| (candidates[i], m))
                .collect()
        })
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// `Some(sign)` when every nonzero prefix entry of every candidate has the
/// same sign; such families admit no cancellation.
pub(crate) fn sign_uniform(prefixes: &[Vec<BigInt>]) -> Option<i32> {
    let mut sign = 0i32;
    for p in prefixes {
        for c in p {
            if c.is_zero() {
                continue;
            }
            let s = if c.is_negative() { -1 } else { 1 };
            if sign == 0 {
                sign = s;
            } else if sign != s {
                return None;
            }
        }
    }
    if sign == 0 {
        None
    } else {
        Some(sign)
    }
}

fn kernel_dfs(
    prefixes: &[Vec<BigInt>],
    idx: usize,
    cap_left: u32,
    assignment: &mut Vec<u32>,
    acc: &mut Vec<BigInt>,
    order: usize,
    solutions: &mut Vec<Vec<u32>>,
) {
    if idx == prefixes.len() {
        if acc.iter().all(|c| c.is_zero()) && assignment.iter().any(|&m| m > 0) {
            solutions.push(assignment.clone());
        }
        return;
    }
    // Feasibility: remaining candidates can shift position p by at most
    // cap_left * max|v[p]| in either direction.
    for p in 0..=order {
        if acc[p].is_zero() {
            continue;
        }
        let reach: BigInt = prefixes[idx..]
            .iter()
            .map(|v| v[p].abs())
            .max()
            .unwrap_or_else(BigInt::zero)
            * BigInt::from(cap_left);
        if acc[p].abs() > reach {
            return;
        }
    }
    for mult in 0..=cap_left {
        if mult > 0 {
            for p in 0..=order {
                let add = &prefixes[idx][p];
                if !add.is_zero() {
                    acc[p] += add;
                }
            }
        }
        assignment[idx] = mult;
        kernel_dfs(
            prefixes,
            idx + 1,
            cap_left - mult,
            assignment,
            acc,
            order,
            solutions,
        );
    }
    // undo all additions of this index
    let total = assignment[idx];
    if total > 0 {
        for p in 0..=order {
            let sub = &prefixes[idx][p] * BigInt::from(total);
            if !sub.is_zero() {
                acc[p] -= sub;
            }
        }
    }
    assignment[idx] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn sing(r: i64, w: [i64; 3]) -> QuotientSingularity {
        QuotientSingularity::new(r, w).unwrap()
    }

    #[test]
    fn closed_form_half_point() {
        let c = inverse_numerator_closed(2, 1).unwrap();
        assert_eq!(c, IntPoly::monomial(-1, 3));
    }

    #[test]
    fn closed_form_eighth_point() {
        // 1/8(3,5,7): the theorem forces a = 5.
        let c = inverse_numerator_closed(8, 5).unwrap();
        let want = IntPoly::from_i64(&[0, 0, 0, -3, -2, -1, -3, -1, -2, -3]);
        assert_eq!(c, want);
        // switching handled automatically for a = 3
        assert_eq!(inverse_numerator_closed(8, 3).unwrap(), want);
    }

    #[test]
    fn closed_form_third_point() {
        let c = inverse_numerator_closed(3, 1).unwrap();
        assert_eq!(c, IntPoly::from_i64(&[0, 0, 0, -1, -1]));
        assert!(inverse_numerator_closed(6, 2).is_err());
    }

    #[test]
    fn generic_matches_paper_examples() {
        let half = porb_generic(&sing(2, [1, 1, 1]), 1).unwrap();
        assert_eq!(half.inverse_numerator, IntPoly::monomial(-1, 3));
        assert_eq!(
            half.series.expand(5).to_i64_vec().unwrap(),
            vec![0, 0, 0, -1, -3, -7]
        );

        let third_cy = porb_generic(&sing(3, [1, 1, 1]), 0).unwrap();
        assert_eq!(third_cy.inverse_numerator, IntPoly::monomial(1, 3));
        let third_cy_op = porb_generic(&sing(3, [2, 2, 2]), 0).unwrap();
        assert_eq!(third_cy_op.inverse_numerator, IntPoly::monomial(-1, 3));
        // opposite contributions cancel as rational functions
        let total = third_cy.series.add(&third_cy_op.series);
        assert!(total.is_zero());
    }

    #[test]
    fn closed_equals_generic_for_all_terminal_points() {
        for r in 2..=40_i64 {
            for a in 1..=r / 2 {
                if a.gcd(&r) != 1 {
                    continue;
                }
                let closed = inverse_numerator_closed(r, a).unwrap();
                let s = QuotientSingularity::terminal(r, a, 1).unwrap();
                let generic = porb_generic(&s, 1).unwrap();
                assert_eq!(closed, generic.inverse_numerator, "r={r} a={a}");
            }
        }
    }

    #[test]
    fn window_support_and_palindromy() {
        for (r, a) in [(7, 2), (11, 3), (8, 5), (13, 6)] {
            let c = inverse_numerator_closed(r, a).unwrap();
            let (lo, hi) = support_window(r, 1);
            assert_eq!(c.order().unwrap() as i64, lo);
            assert_eq!(c.degree().unwrap() as i64, hi);
            // palindromic about the window centre
            for i in 0..=(hi - lo) {
                assert_eq!(c.coeff((lo + i) as usize), c.coeff((hi - i) as usize));
            }
        }
    }

    #[test]
    fn leading_coefficients_match_theorem() {
        // leading terms are -m t^3 - min(m, r-2m) t^4 - ...
        for (r, a) in [(8, 5), (7, 3), (11, 4), (9, 2)] {
            let c = inverse_numerator_closed(r, a).unwrap();
            let m0 = (r - mod_inverse(a, r).unwrap()).rem_euclid(r);
            let m = if 2 * m0 <= r { m0 } else { r - m0 };
            assert_eq!(c.coeff(3), BigInt::from(-m));
            assert_eq!(c.coeff(4), BigInt::from(-(m.min(r - 2 * m))));
        }
    }

    #[test]
    fn strict_negativity_of_terminal_expansion() {
        for (r, a) in [(2, 1), (5, 2), (8, 3), (13, 5)] {
            let s = QuotientSingularity::terminal(r, a, 1).unwrap();
            let orb = porb_generic(&s, 1).unwrap();
            let prefix = orb.series.expand(50);
            for i in 0..3 {
                assert!(prefix.coeff(i).is_zero());
            }
            for i in 3..=50 {
                assert!(prefix.coeff(i).is_negative(), "r={r} a={a} i={i}");
            }
        }
    }

    #[test]
    fn fano_window_starts_at_two() {
        let s = QuotientSingularity::terminal(2, 1, -1).unwrap();
        let orb = porb_generic(&s, -1).unwrap();
        assert_eq!(orb.inverse_numerator, IntPoly::monomial(1, 2));
    }

    #[test]
    fn plurigenus_corrections() {
        let half = sing(2, [1, 1, 1]);
        assert_eq!(
            plurigenus_contribution(&half, 2).unwrap(),
            BigRational::new(BigInt::one(), BigInt::from(4))
        );
        assert!(plurigenus_contribution(&half, 1).unwrap().is_zero());
        let third = sing(3, [1, 2, 2]);
        assert_eq!(
            plurigenus_contribution(&third, 2).unwrap(),
            BigRational::new(BigInt::one(), BigInt::from(3))
        );
        // non-terminal input rejected
        assert!(plurigenus_contribution(&sing(3, [1, 1, 1]), 2).is_err());
    }

    #[test]
    fn kernels_find_the_opposite_pair() {
        let a = sing(3, [1, 1, 1]);
        let b = sing(3, [2, 2, 2]);
        let kernels = find_kernels(&[a, b], 0, 4).unwrap();
        assert_eq!(kernels, vec![vec![(a, 1), (b, 1)]]);
        // strictly negative family: no kernels
        let terms: Vec<QuotientSingularity> = vec![
            QuotientSingularity::terminal(2, 1, 1).unwrap(),
            QuotientSingularity::terminal(3, 1, 1).unwrap(),
        ];
        assert!(find_kernels(&terms, 1, 8).unwrap().is_empty());
        // a single generator has no zero combination
        assert!(find_kernels(&[a], 0, 6).unwrap().is_empty());
    }
}
