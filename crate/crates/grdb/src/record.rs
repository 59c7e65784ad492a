//! Serialisation of search results: JSON Lines records, CSV flattening and
//! the run report. All rationals travel as exact `p/q` strings.

use crate::error::GrdbError;
use crate::formats::GradingParams;
use crate::orb::SingularityMultiset;
use crate::search::{CandidateHit, Flags, RunReport};
use crate::sing::QuotientSingularity;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::io::Write;

/// One serialised search hit. Field order is the wire order.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CandidateRecord {
    pub family: String,
    pub params: ParamsJson,
    pub codim: i64,
    pub dim: i64,
    pub k: i64,
    pub adjunction: i64,
    pub ambient_weights: Vec<i64>,
    pub equation_degrees: Vec<i64>,
    pub numerator: Vec<i64>,
    pub baskets: Vec<Vec<String>>,
    pub chi: i64,
    #[serde(rename = "K3")]
    pub k3: String,
    #[serde(rename = "Kc2")]
    pub kc2: String,
    #[serde(rename = "A3")]
    pub a3: String,
    pub flags: Flags,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernels: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plurigenera: Option<Vec<i64>>,
    /// `K.c2` per basket when a record matches several baskets.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kc2_per_basket: Option<Vec<String>>,
}

/// Grading parameters in wire form.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ParamsJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<i64>,
}

pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, GrdbError> {
    let bad = || GrdbError::invalid(format!("cannot parse rational '{s}'"));
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(p, q))
    } else {
        let p: BigInt = s.parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(p))
    }
}

/// `"3*1/2(1,1,1)"`, with the multiplicity prefix omitted when it is one.
pub fn basket_entry_string(s: &QuotientSingularity, mult: u32) -> String {
    if mult == 1 {
        s.to_string()
    } else {
        format!("{mult}*{s}")
    }
}

pub fn parse_basket_entry(text: &str) -> Result<(QuotientSingularity, u32), GrdbError> {
    let text = text.trim();
    if let Some((m, rest)) = text.split_once('*') {
        let mult: u32 = m
            .trim()
            .parse()
            .map_err(|_| GrdbError::invalid(format!("bad multiplicity in '{text}'")))?;
        if mult == 0 {
            return Err(GrdbError::invalid("zero multiplicity"));
        }
        Ok((rest.trim().parse()?, mult))
    } else {
        Ok((text.parse()?, 1))
    }
}

pub fn basket_strings(basket: &SingularityMultiset) -> Vec<String> {
    basket
        .iter()
        .map(|(s, m)| basket_entry_string(s, *m))
        .collect()
}

pub fn parse_basket(strings: &[String]) -> Result<SingularityMultiset, GrdbError> {
    let mut out: SingularityMultiset = strings
        .iter()
        .map(|s| parse_basket_entry(s))
        .collect::<Result<_, _>>()?;
    out.sort();
    Ok(out)
}

impl CandidateRecord {
    pub fn from_hit(hit: &CandidateHit, dim: i64, k: i64) -> Result<Self, GrdbError> {
        let params = match &hit.format.params {
            GradingParams::Ci { degrees } => ParamsJson {
                degrees: Some(degrees.clone()),
                w: None,
                u: None,
            },
            GradingParams::Gr25 { w } => ParamsJson {
                degrees: None,
                w: Some(w.entries_display()),
                u: None,
            },
            GradingParams::Gr25xH { w, degrees } => ParamsJson {
                degrees: Some(degrees.clone()),
                w: Some(w.entries_display()),
                u: None,
            },
            GradingParams::Ogr510 { g } => ParamsJson {
                degrees: None,
                w: Some(g.entries_display()),
                u: Some(g.u),
            },
        };
        let numerator: Vec<i64> = hit
            .format
            .numerator
            .coeffs()
            .iter()
            .map(|c| {
                c.to_i64()
                    .ok_or_else(|| GrdbError::inconsistency("numerator coefficient out of range"))
            })
            .collect::<Result<_, _>>()?;
        let first = hit
            .invariants
            .first()
            .ok_or_else(|| GrdbError::inconsistency("record without invariants"))?;
        let kc2_per_basket = if hit.invariants.len() > 1 {
            Some(
                hit.invariants
                    .iter()
                    .map(|inv| rational_string(&inv.kc2))
                    .collect(),
            )
        } else {
            None
        };
        let plurigenera = if first.plurigenera.is_empty() {
            None
        } else {
            Some(
                first
                    .plurigenera
                    .iter()
                    .map(|p| {
                        p.to_i64().ok_or_else(|| {
                            GrdbError::inconsistency("plurigenus out of range")
                        })
                    })
                    .collect::<Result<_, _>>()?,
            )
        };
        Ok(CandidateRecord {
            family: hit.format.family_name().to_string(),
            params,
            codim: hit.format.codim,
            dim,
            k,
            adjunction: hit.format.adjunction,
            ambient_weights: hit.weights.clone(),
            equation_degrees: hit.format.equation_degrees.clone(),
            numerator,
            baskets: hit.baskets.iter().map(|b| basket_strings(b)).collect(),
            chi: first.chi,
            k3: rational_string(&first.k3),
            kc2: rational_string(&first.kc2),
            a3: rational_string(&first.a3),
            flags: hit.flags,
            kernels: if hit.kernels.is_empty() {
                None
            } else {
                Some(hit.kernels.iter().map(|k| basket_strings(k)).collect())
            },
            plurigenera,
            kc2_per_basket,
        })
    }

    pub fn to_jsonl(&self) -> Result<String, GrdbError> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Write records as JSON Lines.
pub fn write_jsonl<W: Write>(out: &mut W, records: &[CandidateRecord]) -> Result<(), GrdbError> {
    for r in records {
        writeln!(out, "{}", r.to_jsonl()?)?;
    }
    Ok(())
}

/// Read records back from JSON Lines.
pub fn read_jsonl(text: &str) -> Result<Vec<CandidateRecord>, GrdbError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}

/// CSV export: one row per (record, basket) pair.
pub fn write_csv<W: Write>(out: &mut W, records: &[CandidateRecord]) -> Result<(), GrdbError> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record([
        "family",
        "params",
        "codim",
        "dim",
        "k",
        "adjunction",
        "ambient_weights",
        "equation_degrees",
        "basket",
        "chi",
        "K3",
        "Kc2",
        "A3",
        "well_formed",
        "variable_usage",
        "tangent_monomial",
        "index_capacity",
    ])
    .map_err(csv_err)?;
    for r in records {
        let params = serde_json::to_string(&r.params)?;
        let baskets: Vec<Vec<String>> = if r.baskets.is_empty() {
            vec![Vec::new()]
        } else {
            r.baskets.clone()
        };
        for (i, basket) in baskets.iter().enumerate() {
            let kc2 = match (&r.kc2_per_basket, i) {
                (Some(per), i) if i < per.len() => per[i].clone(),
                _ => r.kc2.clone(),
            };
            wtr.write_record([
                r.family.as_str(),
                params.as_str(),
                &r.codim.to_string(),
                &r.dim.to_string(),
                &r.k.to_string(),
                &r.adjunction.to_string(),
                &join(&r.ambient_weights),
                &join(&r.equation_degrees),
                &basket.join(" + "),
                &r.chi.to_string(),
                &r.k3,
                &kc2,
                &r.a3,
                &r.flags.well_formed.to_string(),
                &r.flags.variable_usage.to_string(),
                &r.flags.tangent_monomial.to_string(),
                &r.flags.index_capacity.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> GrdbError {
    GrdbError::Io(std::io::Error::other(e))
}

fn join(xs: &[i64]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Human-readable run summary, intended for stderr.
pub fn report_text(report: &RunReport) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "formats scanned: {}\nweight lists scanned: {}\nrecords: {} ({} all-flags-pass)\n",
        report.formats_scanned, report.weight_lists_scanned, report.records, report.all_flags_pass
    ));
    for (flag, n) in &report.flag_failures {
        s.push_str(&format!("  flag {flag} failed on {n} record(s)\n"));
    }
    match report.k_last {
        Some(k) => s.push_str(&format!("k_last = {k}, k_max = {}\n", report.k_max)),
        None => s.push_str(&format!("k_last = none, k_max = {}\n", report.k_max)),
    }
    s.push_str(&format!("wall time: {} ms\n", report.wall_ms));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings_round_trip() {
        for s in ["20", "19/2", "-5/6", "0", "107/30"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(rational_string(&r), s);
        }
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn basket_entry_round_trip() {
        let (s, m) = parse_basket_entry("3*1/2(1,1,1)").unwrap();
        assert_eq!(m, 3);
        assert_eq!(basket_entry_string(&s, 3), "3*1/2(1,1,1)");
        let (s, m) = parse_basket_entry("1/5(2,3,4)").unwrap();
        assert_eq!(m, 1);
        assert_eq!(basket_entry_string(&s, 1), "1/5(2,3,4)");
        assert!(parse_basket_entry("0*1/2(1,1,1)").is_err());
    }

    #[test]
    fn jsonl_round_trip() {
        let rec = CandidateRecord {
            family: "gr25".into(),
            params: ParamsJson {
                degrees: None,
                w: Some(vec!["0".into(), "1".into(), "1".into(), "1".into(), "1".into()]),
                u: None,
            },
            codim: 3,
            dim: 3,
            k: 1,
            adjunction: 8,
            ambient_weights: vec![1; 7],
            equation_degrees: vec![3, 3, 3, 3, 4],
            numerator: vec![1, 0, 0, -4, 0, 4, 0, 0, -1],
            baskets: vec![vec![]],
            chi: -6,
            k3: "20".into(),
            kc2: "144".into(),
            a3: "20".into(),
            flags: Flags {
                well_formed: true,
                variable_usage: true,
                tangent_monomial: true,
                index_capacity: true,
            },
            kernels: None,
            plurigenera: Some(vec![7, 28]),
            kc2_per_basket: None,
        };
        let line = rec.to_jsonl().unwrap();
        let back = read_jsonl(&line).unwrap();
        assert_eq!(back, vec![rec]);
    }
}
