//! Numerical invariants of a candidate: chi(O_X), the polarising degree A^3,
//! K^3, the Barlow--Kawamata number K.c2, and plurigenera, each with an
//! independent cross-check where one exists.

use crate::error::GrdbError;
use crate::orb::{plurigenus_cm, SingularityMultiset};
use crate::poly::IntPoly;
use crate::series::CycloRational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// The invariants attached to one (candidate, basket) pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantSet {
    pub chi: i64,
    pub a3: BigRational,
    pub k3: BigRational,
    pub kc2: BigRational,
    pub plurigenera: Vec<BigInt>,
}

/// `chi(O_X)` from the Hilbert series: `1 - h^0(K_X)` where `h^0(K_X)` is the
/// coefficient of `t^k` (Fano reads off 0, Calabi--Yau 1 - 1 = 0).
pub fn chi_o(p_x: &CycloRational, k: i64) -> Result<i64, GrdbError> {
    if k < -1 {
        return Err(GrdbError::invalid("polarisation index must be at least -1"));
    }
    let h0_k = if k < 0 {
        BigInt::zero()
    } else {
        p_x.expand(k as usize).coeff(k as usize).clone()
    };
    (BigInt::one() - h0_k)
        .to_i64()
        .ok_or_else(|| GrdbError::inconsistency("chi(O) out of range"))
}

/// The leading Hilbert coefficient `A^3 = lim (1-t)^4 P_X(t)` at `t = 1`,
/// computed symbolically: cancel `(1-t)` factors of the numerator against the
/// denominator and evaluate the rest at 1.
pub fn degree_a3(p_x: &CycloRational) -> Result<BigRational, GrdbError> {
    let n = p_x.denominator_exponents().len() as i64;
    let cancel = n - 4;
    if cancel < 0 {
        return Err(GrdbError::invalid(
            "series has fewer than four denominator factors: not a threefold",
        ));
    }
    let one_minus_t = IntPoly::one_minus_pow(1);
    let mut reduced = p_x.numerator().clone();
    for _ in 0..cancel {
        reduced = reduced.div_exact(&one_minus_t).ok_or_else(|| {
            GrdbError::invalid("Hilbert series does not have a pole of order 4 at t = 1")
        })?;
    }
    if reduced.div_exact(&one_minus_t).is_some() {
        return Err(GrdbError::invalid(
            "Hilbert series does not have a pole of order 4 at t = 1",
        ));
    }
    let mut denom = BigInt::one();
    for &a in p_x.denominator_exponents() {
        denom *= BigInt::from(a);
    }
    Ok(BigRational::new(reduced.eval_at_one(), denom))
}

/// `K.c2` via Barlow--Kawamata: `sum (r^2 - 1)/r - 24 chi(O_X)` over the
/// basket.
pub fn kc2(basket: &SingularityMultiset, chi: i64) -> BigRational {
    let mut total = BigRational::from_integer(BigInt::from(-24 * chi));
    for (s, mult) in basket {
        let r = s.index();
        total += BigRational::new(
            BigInt::from((r * r - 1) * i64::from(*mult)),
            BigInt::from(r),
        );
    }
    total
}

/// Plurigenus correction sum over a basket, with the triples read in
/// `K`-normalised weights for polarisation index `k` (requires every index
/// coprime to `k`, which holds for terminal points).
fn basket_cm(basket: &SingularityMultiset, k: i64, m: i64) -> Result<BigRational, GrdbError> {
    let mut total = BigRational::zero();
    for (s, mult) in basket {
        let r = s.index();
        let v = k
            .rem_euclid(r)
            .extended_gcd(&r)
            .x
            .rem_euclid(r);
        if (v * k).rem_euclid(r) != 1 {
            return Err(GrdbError::invalid(format!(
                "index {r} shares a factor with the polarisation k = {k}"
            )));
        }
        let scaled = crate::sing::QuotientSingularity::new(r, s.weights().map(|w| w * v))?;
        let (r, a) = scaled.terminal_pair(1)?;
        total += plurigenus_cm(r, a, m) * BigRational::from_integer(BigInt::from(i64::from(*mult)));
    }
    Ok(total)
}

/// `K^3` solved from the plurigenus formula at `m = 2`:
/// `K^3 = 2 (P_2 + 3 chi - sum c_2(P))`, cross-checked against the pole
/// residue `k^3 A^3`. A mismatch means the basket or numerator is wrong and
/// is a hard error.
pub fn k3_from_plurigenus(
    p_x: &CycloRational,
    basket: &SingularityMultiset,
    k: i64,
) -> Result<BigRational, GrdbError> {
    if k != 1 {
        return Err(GrdbError::invalid(
            "the m = 2 plurigenus solve is stated for canonical polarisation k = 1",
        ));
    }
    let prefix = p_x.expand(2);
    let p2 = BigRational::from_integer(prefix.coeff(2).clone());
    let chi = BigRational::from_integer(BigInt::from(chi_o(p_x, k)?));
    let c2 = basket_cm(basket, 1, 2)?;
    let k3 = BigRational::from_integer(BigInt::from(2))
        * (p2 + BigRational::from_integer(BigInt::from(3)) * chi - c2);
    let a3 = degree_a3(p_x)?;
    if k3 != a3 {
        return Err(GrdbError::inconsistency(format!(
            "K^3 from plurigenus ({k3}) disagrees with the pole residue ({a3})"
        )));
    }
    Ok(k3)
}

/// Plurigenera `P_1..P_m_max` from `chi`, `K^3` and the basket corrections.
/// `P_1 = 1 - chi`; for `m >= 2` the Riemann--Roch formula applies directly.
/// Every value must come out a nonnegative integer.
pub fn plurigenera(
    chi: i64,
    k3: &BigRational,
    basket: &SingularityMultiset,
    m_max: i64,
    k: i64,
) -> Result<Vec<BigInt>, GrdbError> {
    let mut out = Vec::new();
    for m in 1..=m_max {
        let value = if m == 1 {
            BigRational::from_integer(BigInt::from(1 - chi))
        } else {
            let poly_term = BigRational::new(
                BigInt::from(m * (m - 1) * (2 * m - 1)),
                BigInt::from(12),
            ) * k3.clone();
            BigRational::from_integer(BigInt::from((1 - 2 * m) * chi))
                + poly_term
                + basket_cm(basket, k, m)?
        };
        if !value.is_integer() || value.is_negative() {
            return Err(GrdbError::inconsistency(format!(
                "plurigenus P_{m} = {value} is not a nonnegative integer"
            )));
        }
        out.push(value.to_integer());
    }
    Ok(out)
}

/// Assemble the full invariant set for a record, running every cross-check
/// that applies at this polarisation index.
pub fn invariant_set(
    p_x: &CycloRational,
    basket: &SingularityMultiset,
    k: i64,
    m_max: i64,
) -> Result<InvariantSet, GrdbError> {
    let chi = chi_o(p_x, k)?;
    let a3 = degree_a3(p_x)?;
    let k3 = BigRational::from_integer(BigInt::from(k * k * k)) * a3.clone();
    let kc2 = kc2(basket, chi);
    let mut plurigenera_values = Vec::new();
    let all_terminal = basket.iter().all(|(s, _)| s.is_terminal());
    if k >= 1 && all_terminal {
        if k == 1 {
            // independent route: must reproduce k^3 A^3 exactly
            k3_from_plurigenus(p_x, basket, k)?;
        }
        plurigenera_values = plurigenera(chi, &k3, basket, m_max, k)?;
        // the series must agree with the formula: P_m = [t^{mk}] P_X
        let order = (m_max * k) as usize;
        let prefix = p_x.expand(order);
        for (i, pm) in plurigenera_values.iter().enumerate() {
            let coeff = prefix.coeff((i as i64 + 1) as usize * k as usize);
            if coeff != pm {
                return Err(GrdbError::inconsistency(format!(
                    "P_{} = {pm} from the formula but {coeff} from the series",
                    i + 1
                )));
            }
        }
    }
    Ok(InvariantSet {
        chi,
        a3,
        k3,
        kc2,
        plurigenera: plurigenera_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sing::QuotientSingularity;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    fn series(num: &[i64], den: &[i64]) -> CycloRational {
        CycloRational::new(IntPoly::from_i64(num), den.to_vec()).unwrap()
    }

    fn sextic() -> CycloRational {
        let mut num = vec![0i64; 7];
        num[0] = 1;
        num[6] = -1;
        series(&num, &[1, 1, 1, 1, 1])
    }

    #[test]
    fn chi_of_classical_cases() {
        // nonsingular sextic: chi = 1 - P_1 = 1 - 5
        assert_eq!(chi_o(&sextic(), 1).unwrap(), -4);
        // Fano polarisation: h^0(K) = 0
        assert_eq!(chi_o(&sextic(), -1).unwrap(), 1);
        // Calabi-Yau: h^0(K) = h^0(O) = 1
        assert_eq!(chi_o(&sextic(), 0).unwrap(), 0);
    }

    #[test]
    fn degree_of_weighted_hypersurfaces() {
        assert_eq!(degree_a3(&sextic()).unwrap(), rat(6, 1));
        // X_{18,35} in P(5,6,7,9,11,13): 18*35 / prod(W) = 1/429
        let mut num = vec![0i64; 54];
        num[0] = 1;
        num[18] = -1;
        num[35] = -1;
        num[53] = 1;
        let f = series(&num, &[5, 6, 7, 9, 11, 13]);
        assert_eq!(degree_a3(&f).unwrap(), rat(1, 429));
        // wrong pole order is rejected
        let curve = series(&[1], &[1, 1]);
        assert!(degree_a3(&curve).is_err());
    }

    #[test]
    fn kc2_examples() {
        assert_eq!(kc2(&vec![], -6), rat(144, 1));
        let half = QuotientSingularity::new(2, [1, 1, 1]).unwrap();
        assert_eq!(kc2(&vec![(half, 1)], -4), rat(195, 2));
        assert_eq!(kc2(&vec![], 0), rat(0, 1));
    }

    #[test]
    fn k3_via_plurigenus_matches_residue() {
        // nonsingular sextic: P_2 = 15, chi = -4, empty basket -> K^3 = 6
        assert_eq!(k3_from_plurigenus(&sextic(), &vec![], 1).unwrap(), rat(6, 1));
    }

    #[test]
    fn plurigenera_formula() {
        assert_eq!(
            plurigenera(-6, &rat(20, 1), &vec![], 2, 1).unwrap(),
            vec![BigInt::from(7), BigInt::from(28)]
        );
        let half = QuotientSingularity::new(2, [1, 1, 1]).unwrap();
        assert_eq!(
            plurigenera(-4, &rat(19, 2), &vec![(half, 1)], 2, 1).unwrap(),
            vec![BigInt::from(5), BigInt::from(17)]
        );
        // non-integral output is a hard error
        assert!(plurigenera(-4, &rat(19, 3), &vec![(half, 1)], 2, 1).is_err());
    }

    #[test]
    fn invariant_set_cross_checks_sextic() {
        let inv = invariant_set(&sextic(), &vec![], 1, 6).unwrap();
        assert_eq!(inv.chi, -4);
        assert_eq!(inv.k3, rat(6, 1));
        assert_eq!(inv.kc2, rat(96, 1));
        assert_eq!(inv.plurigenera[0], BigInt::from(5));
    }
}
