//! The five-step search pipeline: enumerate ambient weights for a graded
//! format, assemble the candidate Hilbert series, split off the initial
//! term, and match baskets of quotient singularities against the residual by
//! bounded knapsack search with exact rational verification.

use crate::error::GrdbError;
use crate::formats::{enumerate_gradings, FamilySpec, FormatInstance, GradingParams};
use crate::invariants::{invariant_set, InvariantSet};
use crate::orb::{find_kernels, porb_generic, SingularityMultiset};
use crate::poly::IntPoly;
use crate::series::CycloRational;
use crate::sing::QuotientSingularity;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

/// Which singularities a search admits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingClass {
    /// Isolated terminal quotient points, `1/r(-k, a, r-a)` in `A`-weights.
    Terminal,
    /// Isolated crepant-resolvable points `1/r(a,b,c)`, `a+b+c = 0 (mod r)`.
    CanonicalIsolated,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub family: FamilySpec,
    pub dim: i64,
    pub k: i64,
    pub max_adjunction: i64,
    pub sing_class: SingClass,
    /// Total-multiplicity bound for basket enumeration when contributions
    /// have mixed signs (the Calabi--Yau case); sign-uniform searches are
    /// self-bounding and ignore it.
    pub basket_cap: u32,
    pub kernel_cap: u32,
    pub min_weight: i64,
    pub jobs: usize,
    /// Restrict a ci search to exactly these equation degrees.
    pub pinned_degrees: Option<Vec<i64>>,
    /// Plurigenus table length attached to each record.
    pub m_max: i64,
}

impl SearchConfig {
    pub fn new(family: FamilySpec, k: i64, max_adjunction: i64) -> Self {
        SearchConfig {
            family,
            dim: 3,
            k,
            max_adjunction,
            sing_class: if k == 0 {
                SingClass::CanonicalIsolated
            } else {
                SingClass::Terminal
            },
            basket_cap: 24,
            kernel_cap: 12,
            min_weight: 1,
            jobs: 1,
            pinned_degrees: None,
            m_max: 12,
        }
    }
}

/// Advisory realisability flags; they never drop a record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Flags {
    pub well_formed: bool,
    pub variable_usage: bool,
    pub tangent_monomial: bool,
    pub index_capacity: bool,
}

impl Flags {
    pub fn all_pass(&self) -> bool {
        self.well_formed && self.variable_usage && self.tangent_monomial && self.index_capacity
    }
}

/// One search hit: a format, ambient weights, and every exact basket match.
#[derive(Clone, Debug)]
pub struct CandidateHit {
    pub format: FormatInstance,
    pub weights: Vec<i64>,
    pub p_x: CycloRational,
    pub p_ini: CycloRational,
    pub baskets: Vec<SingularityMultiset>,
    pub kernels: Vec<SingularityMultiset>,
    pub invariants: Vec<InvariantSet>,
    pub flags: Flags,
}

#[derive(Clone, Debug, Default)]
pub struct RunReport {
    pub formats_scanned: u64,
    pub weight_lists_scanned: u64,
    pub records: u64,
    pub all_flags_pass: u64,
    pub flag_failures: BTreeMap<String, u64>,
    /// Largest search parameter that produced a record.
    pub k_last: Option<i64>,
    /// The configured search ceiling.
    pub k_max: i64,
    pub wall_ms: u128,
}

/// Distinct gcds of nonempty subsets of `weights`, those exceeding 1.
pub fn subset_gcds(weights: &[i64]) -> Vec<i64> {
    let mut gcds: Vec<i64> = Vec::new();
    for &w in weights {
        let mut next: Vec<i64> = gcds.iter().map(|g| g.gcd(&w)).collect();
        next.push(w);
        for g in next {
            if let Err(pos) = gcds.binary_search(&g) {
                gcds.insert(pos, g);
            }
        }
    }
    gcds.retain(|&g| g > 1);
    gcds
}

/// All admissible singularities of one index in a class, polarised by
/// `K = kA`: sorted, duplicate-free.
pub fn class_singularities(r: i64, class: SingClass, k: i64) -> Vec<QuotientSingularity> {
    let mut out = Vec::new();
    match class {
        SingClass::Terminal => {
            let u = (-k).rem_euclid(r);
            if u.gcd(&r) != 1 {
                return out;
            }
            for a in 1..=r / 2 {
                if a.gcd(&r) == 1 {
                    out.push(QuotientSingularity::new(r, [u, a, r - a]).unwrap());
                }
            }
        }
        SingClass::CanonicalIsolated => {
            for a in 1..r {
                if a.gcd(&r) != 1 {
                    continue;
                }
                for b in a..r {
                    if b.gcd(&r) != 1 {
                        continue;
                    }
                    let c = (-(a + b)).rem_euclid(r);
                    if c < b || c == 0 || c.gcd(&r) != 1 {
                        continue;
                    }
                    out.push(QuotientSingularity::new(r, [a, b, c]).unwrap());
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Candidate singularities for an ambient weight list: an isolated quotient
/// point of a quasismooth well-formed member sits on a coordinate stratum,
/// so its index is a subset gcd of `W`.
pub fn candidate_singularities(
    weights: &[i64],
    class: SingClass,
    k: i64,
) -> Vec<QuotientSingularity> {
    let mut out = Vec::new();
    for r in subset_gcds(weights) {
        out.extend(class_singularities(r, class, k));
    }
    out.sort();
    out.dedup();
    out
}

/// Sorted ambient weight lists for a format: `dim + codim + 1` positive
/// entries summing to `adjunction - k`, none exceeding the largest key
/// weight, no common divisor.
pub fn enumerate_ambient_weights(
    f: &FormatInstance,
    dim: i64,
    k: i64,
    min_weight: i64,
) -> Vec<Vec<i64>> {
    let n = (dim + f.codim + 1) as usize;
    let total = f.adjunction - k;
    let lo = min_weight.max(1);
    let hi = f.chi_max;
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    weight_rec(n, total, lo, hi, &mut prefix, &mut out);
    out
}

fn weight_rec(
    slots: usize,
    total: i64,
    lo: i64,
    hi: i64,
    prefix: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    if slots == 0 {
        if total == 0 {
            let g = prefix.iter().fold(0i64, |acc, &w| acc.gcd(&w));
            if g == 1 {
                out.push(prefix.clone());
            }
        }
        return;
    }
    let mut v = lo;
    while v <= hi && v * slots as i64 <= total {
        // remaining entries are >= v and <= hi each
        if total - v <= hi * (slots as i64 - 1) {
            prefix.push(v);
            weight_rec(slots - 1, total - v, v, hi, prefix, out);
            prefix.pop();
        }
        v += 1;
    }
}

/// `P_X = P_num / prod_{a in W} (1 - t^a)`.
pub fn hilbert_series(f: &FormatInstance, weights: &[i64]) -> CycloRational {
    CycloRational::new(f.numerator.clone(), weights.to_vec())
        .expect("ambient weights are positive")
}

/// The initial term of an orbifold Riemann--Roch decomposition: the unique
/// series `N/(1-t)^4` with `N` palindromic of degree `k + 4`, constant term
/// one, agreeing with `P_X` up to the centre of symmetry.
pub fn initial_series(p_x: &CycloRational, k: i64) -> Result<CycloRational, GrdbError> {
    if k < -1 {
        return Err(GrdbError::invalid("polarisation index must be at least -1"));
    }
    let c = (k + 4) as usize;
    let half = c / 2;
    let prefix = p_x.expand(half);
    // N = P_X * (1-t)^4 truncated: n_j = sum_i (-1)^i C(4,i) P_{j-i}
    let binom = [1i64, -4, 6, -4, 1];
    let mut n = vec![BigInt::zero(); c + 1];
    for j in 0..=half {
        let mut v = BigInt::zero();
        for (i, &b) in binom.iter().enumerate() {
            if i <= j {
                v += prefix.coeff(j - i) * BigInt::from(b);
            }
        }
        n[j] = v;
    }
    for j in half + 1..=c {
        n[j] = n[c - j].clone();
    }
    CycloRational::new(IntPoly::from_coeffs(n), vec![1, 1, 1, 1])
}

/// A candidate singularity with cached contribution data for one run.
#[derive(Debug)]
struct CandContrib {
    sing: QuotientSingularity,
    series: CycloRational,
    /// Expansion of the contribution to the run-wide order.
    prefix: Vec<i64>,
    /// Sign of all nonzero prefix entries: -1, +1, or 0 for mixed.
    sign: i8,
    /// First position with a nonzero coefficient.
    first_nonzero: usize,
}

/// Candidate singularities of one subset-gcd profile with their shared sign
/// classification and whole-set ratio envelope.
struct CandSet {
    list: Vec<Rc<CandContrib>>,
    /// `Some(sign)` when every contribution is strictly one-signed.
    uniform: Option<i8>,
    /// Common first live position, when every candidate starts there.
    anchor: Option<usize>,
    /// Extreme ratios `|v[p]| : |v[anchor]|` over the whole set, per
    /// position of the quick window.
    ratio_min: Vec<(i64, i64)>,
    ratio_max: Vec<(i64, i64)>,
}

impl CandSet {
    fn build(list: Vec<Rc<CandContrib>>, quick_order: usize) -> Self {
        let uniform = uniform_sign(&list);
        let anchor = list
            .first()
            .map(|c| c.first_nonzero)
            .filter(|&a| list.iter().all(|c| c.first_nonzero == a) && a <= quick_order);
        let mut ratio_min = Vec::new();
        let mut ratio_max = Vec::new();
        if let Some(a) = anchor {
            ratio_min = vec![(i64::MAX, 1); quick_order + 1];
            ratio_max = vec![(0, 1); quick_order + 1];
            for c in &list {
                let den = c.prefix[a].abs();
                for p in 0..=quick_order {
                    let num = c.prefix[p].abs();
                    if frac_lt(num, den, ratio_min[p].0, ratio_min[p].1) {
                        ratio_min[p] = (num, den);
                    }
                    if frac_lt(ratio_max[p].0, ratio_max[p].1, num, den) {
                        ratio_max[p] = (num, den);
                    }
                }
            }
        }
        CandSet {
            list,
            uniform,
            anchor,
            ratio_min,
            ratio_max,
        }
    }

    /// Target-independent envelope test: can any nonnegative combination of
    /// this set produce `target`? Sound only for sign-uniform sets.
    fn envelope_admits(&self, target: &[i64]) -> bool {
        let Some(a) = self.anchor else {
            return true;
        };
        let order = target.len() - 1;
        if a > order {
            return true;
        }
        // nothing reaches below the common first live position
        if target[..a].iter().any(|&v| v != 0) {
            return false;
        }
        ratio_box_ok(target, a, order, 0, 0, &self.ratio_min, &self.ratio_max)
    }
}

/// Per-worker caches: orbifold contributions, per-index class lists, and
/// full candidate sets keyed by the subset-gcd profile.
struct SearchContext {
    k: i64,
    class: SingClass,
    order: usize,
    quick_order: usize,
    orb: HashMap<QuotientSingularity, Rc<CandContrib>>,
    classes: HashMap<i64, Vec<QuotientSingularity>>,
    candidate_sets: HashMap<Vec<i64>, Rc<CandSet>>,
}

impl SearchContext {
    fn new(k: i64, class: SingClass, order: usize) -> Self {
        let quick_order = ((k + 4) / 2 + 1) as usize + 6;
        SearchContext {
            k,
            class,
            order,
            quick_order,
            orb: HashMap::new(),
            classes: HashMap::new(),
            candidate_sets: HashMap::new(),
        }
    }

    fn contribution(&mut self, s: QuotientSingularity) -> Result<Rc<CandContrib>, GrdbError> {
        if let Some(c) = self.orb.get(&s) {
            return Ok(Rc::clone(c));
        }
        let orb = porb_generic(&s, self.k)?;
        let big = orb.series.expand(self.order);
        let prefix: Vec<i64> = big
            .coeffs()
            .iter()
            .map(|c| {
                c.to_i64().ok_or_else(|| {
                    GrdbError::inconsistency("orbifold contribution exceeds i64 range")
                })
            })
            .collect::<Result<_, _>>()?;
        let mut sign = 0i8;
        let mut mixed = false;
        let mut first_nonzero = prefix.len();
        for (i, &v) in prefix.iter().enumerate() {
            if v == 0 {
                continue;
            }
            if first_nonzero == prefix.len() {
                first_nonzero = i;
            }
            let s = if v < 0 { -1 } else { 1 };
            if sign == 0 {
                sign = s;
            } else if sign != s {
                mixed = true;
            }
        }
        let contrib = Rc::new(CandContrib {
            sing: s,
            series: orb.series,
            prefix,
            sign: if mixed { 0 } else { sign },
            first_nonzero,
        });
        self.orb.insert(s, Rc::clone(&contrib));
        Ok(contrib)
    }

    /// Deduplicated quick-window prefixes over every singularity the class
    /// admits up to the given index bound: a superset of any weight list's
    /// candidates, so an existence failure against it rejects a whole family
    /// of weight completions.
    fn universe(&mut self, max_index: i64) -> Result<Rc<CandSet>, GrdbError> {
        let key = vec![-max_index];
        if let Some(set) = self.candidate_sets.get(&key) {
            return Ok(Rc::clone(set));
        }
        let mut list: Vec<Rc<CandContrib>> = Vec::new();
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        for r in 2..=max_index {
            let sings = self
                .classes
                .entry(r)
                .or_insert_with(|| class_singularities(r, self.class, self.k))
                .clone();
            for s in sings {
                let c = self.contribution(s)?;
                if seen.insert(c.prefix[..=self.quick_order].to_vec()) {
                    list.push(c);
                }
            }
        }
        let set = Rc::new(CandSet::build(list, self.quick_order));
        self.candidate_sets.insert(key, Rc::clone(&set));
        Ok(set)
    }

    fn candidates(&mut self, weights: &[i64]) -> Result<Rc<CandSet>, GrdbError> {
        let gcds = subset_gcds(weights);
        if let Some(set) = self.candidate_sets.get(&gcds) {
            return Ok(Rc::clone(set));
        }
        let mut sings = Vec::new();
        for &r in &gcds {
            let list = self
                .classes
                .entry(r)
                .or_insert_with(|| class_singularities(r, self.class, self.k));
            sings.extend(list.iter().copied());
        }
        sings.sort();
        sings.dedup();
        let list = sings
            .into_iter()
            .map(|s| self.contribution(s))
            .collect::<Result<Vec<_>, _>>()?;
        let set = Rc::new(CandSet::build(list, self.quick_order));
        self.candidate_sets.insert(gcds, Rc::clone(&set));
        Ok(set)
    }
}

fn uniform_sign(contribs: &[Rc<CandContrib>]) -> Option<i8> {
    let mut sign = 0i8;
    for c in contribs {
        if c.sign == 0 {
            return None;
        }
        if sign == 0 {
            sign = c.sign;
        } else if sign != c.sign {
            return None;
        }
    }
    if sign == 0 {
        None
    } else {
        Some(sign)
    }
}

enum CapRule {
    /// All contributions share a strict sign: every position bounds the
    /// total multiplicity from both sides.
    SignBound(i64),
    /// Mixed signs: bound the total multiplicity.
    Cap(u32),
}

/// Depth-first enumeration of multiplicity vectors whose contributions
/// reproduce `target` on the truncated prefix.
struct Matcher {
    cands: Vec<Rc<CandContrib>>,
    order: usize,
    rule: CapRule,
    existence_only: bool,
    /// individual multiplicity bound per (kept) candidate
    per_cap: Vec<u32>,
    /// `suffix_min[idx][p]`, `suffix_max[idx][p]`: extreme absolute values of
    /// `prefix[p]` over candidates `idx..`.
    suffix_min: Vec<Vec<i64>>,
    suffix_max: Vec<Vec<i64>>,
    solutions: Vec<Vec<u32>>,
    found: bool,
}

impl Matcher {
    fn run(
        cands: &[Rc<CandContrib>],
        target: &[i64],
        rule: CapRule,
        existence_only: bool,
    ) -> Vec<Vec<u32>> {
        let order = target.len() - 1;
        // In sign-uniform mode contributions never cancel, so a candidate
        // that overshoots the target anywhere can be discarded outright, and
        // candidates indistinguishable on this window are interchangeable
        // for an existence check. Branching on the largest leading entries
        // first fails fastest.
        let (kept, caps): (Vec<usize>, Vec<u32>) = match rule {
            CapRule::SignBound(sign) => {
                if target.iter().any(|&v| v != 0 && v.signum() != sign) {
                    return Vec::new();
                }
                let mut pairs: Vec<(usize, u32)> = Vec::new();
                for (i, c) in cands.iter().enumerate() {
                    let mut cap = u32::MAX;
                    let mut visible = false;
                    for p in 0..=order {
                        let v = c.prefix[p].unsigned_abs();
                        if v != 0 {
                            visible = true;
                            cap = cap.min((target[p].unsigned_abs() / v) as u32);
                        }
                    }
                    if visible && cap > 0 {
                        pairs.push((i, cap));
                    }
                }
                pairs.sort_by_key(|&(i, _)| {
                    std::cmp::Reverse(cands[i].prefix[cands[i].first_nonzero].abs())
                });
                if existence_only {
                    // merge window-identical candidates
                    let mut merged: Vec<(usize, u32)> = Vec::new();
                    'outer: for (i, cap) in pairs {
                        for m in merged.iter_mut() {
                            if cands[m.0].prefix[..=order] == cands[i].prefix[..=order] {
                                m.1 = m.1.saturating_add(cap);
                                continue 'outer;
                            }
                        }
                        merged.push((i, cap));
                    }
                    merged.into_iter().unzip()
                } else {
                    pairs.into_iter().unzip()
                }
            }
            CapRule::Cap(_) => ((0..cands.len()).collect(), vec![u32::MAX; cands.len()]),
        };
        let picked: Vec<Rc<CandContrib>> =
            kept.iter().map(|&i| Rc::clone(&cands[i])).collect();
        let n = picked.len();
        // sentinel MAX on the empty suffix keeps the running minimum honest;
        // a zero entry anywhere zeroes it, voiding the cap from that slot
        let mut suffix_min = vec![vec![i64::MAX; order + 1]; n + 1];
        let mut suffix_max = vec![vec![0i64; order + 1]; n + 1];
        for idx in (0..n).rev() {
            for p in 0..=order {
                let v = picked[idx].prefix[p].abs();
                suffix_min[idx][p] = v.min(suffix_min[idx + 1][p]);
                suffix_max[idx][p] = v.max(suffix_max[idx + 1][p]);
            }
        }
        let mut m = Matcher {
            cands: picked,
            order,
            rule,
            existence_only,
            per_cap: caps,
            suffix_min,
            suffix_max,
            solutions: Vec::new(),
            found: false,
        };
        let mut rem: Vec<i64> = target.to_vec();
        let mut assignment = vec![0u32; n];
        m.dfs(0, &mut rem, 0, &mut assignment);
        // remap solutions to the original candidate order
        m.solutions
            .into_iter()
            .map(|sol| {
                let mut full = vec![0u32; cands.len()];
                for (slot, mult) in sol.into_iter().enumerate() {
                    full[kept[slot]] = mult;
                }
                full
            })
            .collect()
    }

    /// In sign-uniform mode, bounds `[lo, hi]` on the total multiplicity the
    /// remaining candidates may still contribute; `None` when some position
    /// is unreachable.
    fn total_bounds(&self, idx: usize, rem: &[i64], sign: i64) -> Option<(u32, u32)> {
        let mut lo = 0u64;
        let mut hi = u64::MAX;
        for (p, &r) in rem.iter().enumerate() {
            if r == 0 {
                continue;
            }
            if r.signum() != sign {
                return None;
            }
            let a = r.unsigned_abs();
            let maxv = self.suffix_max[idx][p];
            if maxv == 0 {
                return None;
            }
            // every unit subtracts at most maxv here
            lo = lo.max(a.div_ceil(maxv as u64));
            // and, when every remaining candidate is nonzero here, at least
            // minv, so the position also caps the total
            let minv = self.suffix_min[idx][p];
            if minv > 0 && minv < i64::MAX {
                hi = hi.min(a / minv as u64);
            }
        }
        if lo > hi {
            return None;
        }
        Some((lo.min(u32::MAX as u64) as u32, hi.min(u32::MAX as u64) as u32))
    }

    fn feasible_cap(&self, idx: usize, rem: &[i64], used: u32) -> bool {
        let CapRule::Cap(cap) = self.rule else {
            return true;
        };
        let budget = i64::from(cap - used);
        for (p, &r) in rem.iter().enumerate() {
            if r == 0 {
                continue;
            }
            let reach = self.suffix_max[idx][p] * budget;
            if r.abs() > reach {
                return false;
            }
        }
        true
    }

    fn dfs(&mut self, idx: usize, rem: &mut Vec<i64>, used: u32, assignment: &mut Vec<u32>) {
        if idx == self.cands.len() {
            if rem.iter().all(|&v| v == 0) {
                self.solutions.push(assignment.clone());
                self.found = true;
            }
            return;
        }
        let max_mult = match self.rule {
            CapRule::Cap(cap) => {
                if !self.feasible_cap(idx, rem, used) {
                    return;
                }
                cap - used
            }
            CapRule::SignBound(sign) => {
                let Some((_, hi)) = self.total_bounds(idx, rem, sign) else {
                    return;
                };
                // this candidate alone cannot exceed the total cap, nor its
                // own per-position quota at its first nonzero slot
                match cand_first(&self.cands[idx], self.order) {
                    None => 0,
                    Some(p) => {
                        let per = rem[p] / self.cands[idx].prefix[p];
                        hi.min(per.max(0) as u32)
                    }
                }
            }
        }
        .min(self.per_cap[idx]);
        let cand = Rc::clone(&self.cands[idx]);
        let mut applied = 0u32;
        for mult in 0..=max_mult {
            if mult > 0 {
                for p in 0..=self.order {
                    rem[p] -= cand.prefix[p];
                }
                applied = mult;
                // sign-uniform residuals may never cross zero
                if let CapRule::SignBound(sign) = self.rule {
                    if rem.iter().any(|&v| v != 0 && v.signum() != sign) {
                        break;
                    }
                }
            }
            assignment[idx] = mult;
            self.dfs(idx + 1, rem, used + mult, assignment);
            if self.existence_only && self.found {
                break;
            }
        }
        for p in 0..=self.order {
            rem[p] += cand.prefix[p] * i64::from(applied);
        }
        assignment[idx] = 0;
    }
}

fn cand_first(c: &CandContrib, order: usize) -> Option<usize> {
    if c.first_nonzero > order {
        None
    } else {
        Some(c.first_nonzero)
    }
}

/// All baskets realising the residual `P_X - P_ini` exactly, with each
/// prefix solution confirmed by exact rational arithmetic.
fn baskets_for(
    p_x: &CycloRational,
    p_ini: &CycloRational,
    contribs: &[Rc<CandContrib>],
    basket_cap: u32,
    order: usize,
) -> Result<Vec<SingularityMultiset>, GrdbError> {
    let px_prefix = p_x.expand(order);
    let pini_prefix = p_ini.expand(order);
    let target: Vec<i64> = px_prefix
        .coeffs()
        .iter()
        .zip(pini_prefix.coeffs())
        .map(|(a, b)| {
            (a - b)
                .to_i64()
                .ok_or_else(|| GrdbError::inconsistency("residual coefficient exceeds i64 range"))
        })
        .collect::<Result<_, _>>()?;
    let rule = match uniform_sign(contribs) {
        Some(s) => CapRule::SignBound(i64::from(s)),
        None => CapRule::Cap(basket_cap),
    };
    let vectors = Matcher::run(contribs, &target, rule, false);
    let residual = p_x.sub(p_ini);
    let mut baskets = Vec::new();
    for v in vectors {
        let mut sum = CycloRational::zero();
        let mut basket: SingularityMultiset = Vec::new();
        for (i, &mult) in v.iter().enumerate() {
            if mult > 0 {
                sum = sum.add(&contribs[i].series.scaled(&BigInt::from(mult)));
                basket.push((contribs[i].sing, mult));
            }
        }
        if sum.sub(&residual).is_zero() {
            baskets.push(basket);
        }
    }
    baskets.sort_by_key(|b| {
        (
            b.iter().map(|(_, m)| u64::from(*m)).sum::<u64>(),
            b.clone(),
        )
    });
    baskets.dedup();
    Ok(baskets)
}

/// Public entry point matching a residual against candidate singularities.
/// Returns every exact basket plus the kernel report for mixed-sign
/// candidate families.
pub fn match_baskets(
    p_x: &CycloRational,
    p_ini: &CycloRational,
    candidates: &[QuotientSingularity],
    config: &SearchConfig,
) -> Result<(Vec<SingularityMultiset>, Vec<SingularityMultiset>), GrdbError> {
    let max_r = candidates.iter().map(|s| s.index()).max().unwrap_or(2);
    let s0 = ((config.k + 4) / 2 + 1) as usize;
    let order = (max_r + 8) as usize + s0;
    let mut ctx = SearchContext::new(config.k, config.sing_class, order);
    let contribs: Vec<Rc<CandContrib>> = candidates
        .iter()
        .map(|&s| ctx.contribution(s))
        .collect::<Result<_, _>>()?;
    let baskets = baskets_for(p_x, p_ini, &contribs, config.basket_cap, order)?;
    let kernels = if uniform_sign(&contribs).is_none() && !candidates.is_empty() {
        find_kernels(candidates, config.k, config.kernel_cap)?
    } else {
        Vec::new()
    };
    Ok((baskets, kernels))
}

// ---------------------------------------------------------------------------
// Realisability flags
// ---------------------------------------------------------------------------

/// How an equation's monomials decompose in terms of the pulled-back key
/// variables, which are general forms of their key weights.
#[derive(Clone, Debug)]
enum EqShape {
    /// A general form of the given degree (complete intersection equations).
    General(i64),
    /// A sum of products of two key-variable pullbacks with the listed
    /// weight pairs (Pfaffian and spinor equations).
    Pairs(i64, Vec<(i64, i64)>),
}

impl EqShape {
    fn degree(&self) -> i64 {
        match self {
            EqShape::General(d) => *d,
            EqShape::Pairs(d, _) => *d,
        }
    }
}

/// The three products of disjoint index pairs of a four-element set.
fn disjoint_pair_products(quad: [usize; 4], weight: &dyn Fn(usize, usize) -> i64) -> Vec<(i64, i64)> {
    let [p, q, r, s] = quad;
    vec![
        (weight(p, q), weight(r, s)),
        (weight(p, r), weight(q, s)),
        (weight(p, s), weight(q, r)),
    ]
}

fn gr25_equation_shapes(w: &crate::formats::Gr25Grading) -> Vec<EqShape> {
    let d = w.doubled();
    let chi = |i: usize, j: usize| (d[i] + d[j]) / 2;
    let total: i64 = d.iter().sum::<i64>() / 2;
    (0..5)
        .map(|m| {
            let rest: Vec<usize> = (0..5).filter(|&i| i != m).collect();
            let quad = [rest[0], rest[1], rest[2], rest[3]];
            EqShape::Pairs(total - d[m] / 2, disjoint_pair_products(quad, &chi))
        })
        .collect()
}

fn ogr510_equation_shapes(g: &crate::formats::Ogr510Grading) -> Vec<EqShape> {
    let u = g.u;
    let dw = g.doubled();
    let s: i64 = dw.iter().sum();
    let xi = |i: usize| u + (s - dw[i]) / 2;
    let xij = |i: usize, j: usize| u + (dw[i] + dw[j]) / 2;
    let mut out = Vec::with_capacity(10);
    for i in 0..5 {
        // x x_i = Pf_i(M)
        let mut pairs = vec![(u, xi(i))];
        let rest: Vec<usize> = (0..5).filter(|&j| j != i).collect();
        let quad = [rest[0], rest[1], rest[2], rest[3]];
        pairs.extend(disjoint_pair_products(quad, &xij));
        out.push(EqShape::Pairs(u + xi(i), pairs));
    }
    for i in 0..5 {
        // row i of M (x_1..x_5)^t = 0
        let pairs: Vec<(i64, i64)> = (0..5)
            .filter(|&j| j != i)
            .map(|j| (xij(i, j), xi(j)))
            .collect();
        let degree = pairs[0].0 + pairs[0].1;
        out.push(EqShape::Pairs(degree, pairs));
    }
    out
}

fn equation_shapes(f: &FormatInstance) -> Vec<EqShape> {
    match &f.params {
        GradingParams::Ci { degrees } => degrees.iter().map(|&d| EqShape::General(d)).collect(),
        GradingParams::Gr25 { w } => gr25_equation_shapes(w),
        GradingParams::Gr25xH { w, degrees } => {
            let mut out = gr25_equation_shapes(w);
            out.extend(degrees.iter().map(|&d| EqShape::General(d)));
            out
        }
        GradingParams::Ogr510 { g } => ogr510_equation_shapes(g),
    }
}

/// Boolean membership table for nonnegative combinations of `gens`, up to
/// `cap` inclusive.
fn semigroup_table(gens: &[i64], cap: usize) -> Vec<bool> {
    let mut reach = vec![false; cap + 1];
    reach[0] = true;
    for &g in gens {
        let g = g as usize;
        if g == 0 || g > cap {
            continue;
        }
        for i in g..=cap {
            if reach[i - g] {
                reach[i] = true;
            }
        }
    }
    reach
}

fn representable(sg: &[bool], d: i64) -> bool {
    d >= 0 && (d as usize) < sg.len() && sg[d as usize]
}

/// Can the equation restrict to a nonzero form on a stratum with semigroup
/// table `sg`?
fn cuts_stratum(sg: &[bool], eq: &EqShape) -> bool {
    match eq {
        EqShape::General(d) => representable(sg, *d),
        EqShape::Pairs(_, pairs) => pairs
            .iter()
            .any(|&(u, v)| representable(sg, u) && representable(sg, v)),
    }
}

/// Can the equation contribute a monomial linear in a transverse variable of
/// weight `a_t` over the stratum?
fn tangent_monomial(sg: &[bool], eq: &EqShape, a_t: i64) -> bool {
    match eq {
        EqShape::General(d) => representable(sg, d - a_t),
        EqShape::Pairs(_, pairs) => pairs.iter().any(|&(u, v)| {
            (representable(sg, u - a_t) && representable(sg, v))
                || (representable(sg, u) && representable(sg, v - a_t))
        }),
    }
}

/// Can some equation contain a pure power of a single variable of weight `a`?
fn corner_cut(shapes: &[EqShape], a: i64) -> bool {
    shapes.iter().any(|eq| match eq {
        EqShape::General(d) => d % a == 0 && *d >= a,
        EqShape::Pairs(_, pairs) => pairs.iter().any(|&(u, v)| u % a == 0 && v % a == 0),
    })
}

/// Lattice point count of `{(u, v) >= 0 : u a + v b = d}`.
fn stratum_monomials(a: i64, b: i64, d: i64) -> i64 {
    let mut count = 0;
    let mut u = 0;
    while u * a <= d {
        if (d - u * a) % b == 0 {
            count += 1;
        }
        u += 1;
    }
    count
}

/// Advisory realisability flags for a record.
pub fn realisability_flags(
    f: &FormatInstance,
    weights: &[i64],
    baskets: &[SingularityMultiset],
) -> Flags {
    let n = weights.len();
    let shapes = equation_shapes(f);
    let max_d = f.equation_degrees.iter().max().copied().unwrap_or(0) as usize;

    // (i) every (n-1)-subset of the weights is coprime
    let well_formed = (0..n).all(|omit| {
        weights
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != omit)
            .fold(0i64, |acc, (_, &w)| acc.gcd(&w))
            == 1
    });

    // (ii) no variable omitted from every equation
    let ambient_sg = semigroup_table(weights, max_d);
    let variable_usage = weights.iter().all(|&a| {
        corner_cut(&shapes, a)
            || shapes
                .iter()
                .any(|eq| tangent_monomial(&ambient_sg, eq, a))
    });

    // (iii) every positive-dimensional singular stratum is cut down to
    // isolated points, with enough equations active nearby
    let mut tangent_ok = true;
    let gcds = subset_gcds(weights);
    let mut seen_strata: BTreeSet<Vec<usize>> = BTreeSet::new();
    for &r in &gcds {
        let members: Vec<usize> = (0..n).filter(|&i| weights[i] % r == 0).collect();
        if members.len() < 2 || !seen_strata.insert(members.clone()) {
            continue;
        }
        let stratum_weights: Vec<i64> = members.iter().map(|&i| weights[i]).collect();
        let sg = semigroup_table(&stratum_weights, max_d);
        let cutting = shapes.iter().filter(|eq| cuts_stratum(&sg, eq)).count();
        if (cutting as i64) < members.len() as i64 - 1 {
            tangent_ok = false;
        }
        let transverse: Vec<i64> = (0..n)
            .filter(|i| !members.contains(i))
            .map(|i| weights[i])
            .collect();
        let armed = shapes
            .iter()
            .filter(|eq| {
                !cuts_stratum(&sg, eq)
                    && transverse.iter().any(|&a_t| tangent_monomial(&sg, eq, a_t))
            })
            .count();
        if ((cutting + armed) as i64) < f.codim {
            tangent_ok = false;
        }
    }

    // (iv) basket indices must fit the counting capacity of their strata;
    // a record passes if one of its baskets does
    let capacity_ok = if baskets.is_empty() {
        basket_capacity_ok(weights, &Vec::new(), &shapes, max_d, f.codim)
    } else {
        baskets
            .iter()
            .any(|basket| basket_capacity_ok(weights, basket, &shapes, max_d, f.codim))
    };

    Flags {
        well_formed,
        variable_usage,
        tangent_monomial: tangent_ok,
        index_capacity: capacity_ok,
    }
}

/// Greedy-with-augmenting bipartite matching: equations to the directions
/// they can act on. Returns the maximum number of independently used
/// equations.
fn max_matching(adj: &[Vec<usize>], n_right: usize) -> usize {
    let mut matched_right: Vec<Option<usize>> = vec![None; n_right];
    let mut size = 0;
    for (left, _) in adj.iter().enumerate() {
        let mut seen = vec![false; n_right];
        if augment(left, adj, &mut matched_right, &mut seen) {
            size += 1;
        }
    }
    size
}

fn augment(
    left: usize,
    adj: &[Vec<usize>],
    matched_right: &mut Vec<Option<usize>>,
    seen: &mut Vec<bool>,
) -> bool {
    for &r in &adj[left] {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        if matched_right[r].is_none()
            || augment(matched_right[r].unwrap(), adj, matched_right, seen)
        {
            matched_right[r] = Some(left);
            return true;
        }
    }
    false
}

/// Quasismooth rank test at the points of a one-dimensional stratum: every
/// equation contributes at most one Jacobian row there, either the direction
/// along the stratum (only equations with a nonzero restriction) or one
/// transverse coordinate it can reach with a tangent monomial. The matching
/// must reach the codimension.
fn stratum_rank_ok(
    shapes: &[EqShape],
    sg: &[bool],
    transverse: &[i64],
    codim: i64,
) -> bool {
    // right side: node 0 is "along the stratum", then one per transverse
    // coordinate
    let n_right = transverse.len() + 1;
    let adj: Vec<Vec<usize>> = shapes
        .iter()
        .map(|eq| {
            let mut targets = Vec::new();
            if cuts_stratum(sg, eq) {
                targets.push(0);
            }
            for (t, &a_t) in transverse.iter().enumerate() {
                if tangent_monomial(sg, eq, a_t) {
                    targets.push(t + 1);
                }
            }
            targets
        })
        .collect();
    max_matching(&adj, n_right) as i64 >= codim
}

fn basket_capacity_ok(
    weights: &[i64],
    basket: &SingularityMultiset,
    shapes: &[EqShape],
    max_d: usize,
    codim: i64,
) -> bool {
    let n = weights.len();
    let mult_by_index = |r: i64| -> u32 {
        basket
            .iter()
            .filter(|(s, _)| s.index() == r)
            .map(|(_, m)| m)
            .sum()
    };
    // coordinate points forced onto X must appear in the basket
    let mut forced: BTreeMap<i64, u32> = BTreeMap::new();
    for &a in weights {
        if a > 1 && !corner_cut(shapes, a) {
            *forced.entry(a).or_insert(0) += 1;
        }
    }
    for (&r, &count) in &forced {
        if mult_by_index(r) < count {
            return false;
        }
    }
    let demanded: BTreeSet<i64> = basket.iter().map(|(s, _)| s.index()).collect();
    for r in demanded {
        let m_r = mult_by_index(r);
        let members: Vec<usize> = (0..n).filter(|&i| weights[i] % r == 0).collect();
        match members.len() {
            0 => return false,
            1 => {
                let a = weights[members[0]];
                if a != r {
                    return false;
                }
                let capacity = u32::from(!corner_cut(shapes, a));
                if m_r > capacity {
                    return false;
                }
            }
            2 => {
                let (a, b) = (weights[members[0]], weights[members[1]]);
                let corners = members
                    .iter()
                    .filter(|&&i| weights[i] == r && !corner_cut(shapes, weights[i]))
                    .count() as u32;
                if a.gcd(&b) != r {
                    // generic points of the stratum carry a different index
                    if m_r > corners {
                        return false;
                    }
                    continue;
                }
                let sg = semigroup_table(&[a, b], max_d);
                let cutting: Vec<i64> = shapes
                    .iter()
                    .filter(|eq| cuts_stratum(&sg, eq))
                    .map(|eq| eq.degree())
                    .collect();
                if cutting.is_empty() {
                    // the whole curve lies on X; the tangent flag reports it
                    continue;
                }
                let generic = cutting
                    .iter()
                    .map(|&d| stratum_monomials(a, b, d) - 1)
                    .min()
                    .unwrap_or(0)
                    .max(0) as u32;
                if m_r > generic + corners {
                    return false;
                }
                // demanded points on the stratum also need full Jacobian
                // rank from the equations available near it
                if m_r > corners {
                    let transverse: Vec<i64> = (0..n)
                        .filter(|i| !members.contains(i))
                        .map(|i| weights[i])
                        .collect();
                    if !stratum_rank_ok(shapes, &sg, &transverse, codim) {
                        return false;
                    }
                }
            }
            _ => {
                // strata of dimension >= 2 need degree arguments beyond
                // these flags; accept
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

/// Scratch buffers for the allocation-free residual prefix computation.
struct QuickScratch {
    px: Vec<i64>,
    pini: Vec<i64>,
    residual: Vec<i64>,
}

impl QuickScratch {
    fn new(order: usize) -> Self {
        QuickScratch {
            px: vec![0; order + 1],
            pini: vec![0; order + 1],
            residual: vec![0; order + 1],
        }
    }
}

/// Scratch buffers for the allocation-free existence matcher.
struct MatchScratch {
    kept: Vec<(usize, u32)>,
    minv: Vec<i64>,
    maxv: Vec<i64>,
    /// flattened suffix min/max tables, stride `order + 1`
    suffix_min: Vec<i64>,
    suffix_max: Vec<i64>,
    /// flattened suffix extreme ratios `v[p] : v[s0]` as fraction pairs
    ratio_min: Vec<(i64, i64)>,
    ratio_max: Vec<(i64, i64)>,
    rem: Vec<i64>,
}

impl MatchScratch {
    fn new(order: usize) -> Self {
        MatchScratch {
            kept: Vec::new(),
            minv: vec![0; order + 1],
            maxv: vec![0; order + 1],
            suffix_min: Vec::new(),
            suffix_max: Vec::new(),
            ratio_min: Vec::new(),
            ratio_max: Vec::new(),
            rem: vec![0; order + 1],
        }
    }
}

/// `a/b < c/d` over positive denominators, exactly.
#[inline]
fn frac_lt(a: i64, b: i64, c: i64, d: i64) -> bool {
    (a as i128) * (d as i128) < (c as i128) * (b as i128)
}

/// The residual is a nonnegative combination of candidate columns, so at
/// every position its ratio to the anchor coordinate lies in the convex hull
/// of the candidate ratios. Checks `|rem[p]| / |rem[anchor]|` against the
/// suffix extremes; sound because all entries share one sign.
#[inline]
fn ratio_box_ok(
    rem: &[i64],
    anchor: usize,
    order: usize,
    idx: usize,
    stride: usize,
    ratio_min: &[(i64, i64)],
    ratio_max: &[(i64, i64)],
) -> bool {
    let a0 = rem[anchor].unsigned_abs() as i64;
    if a0 == 0 {
        // every remaining candidate is nonzero at the anchor, so nothing
        // more can be added: the rest must vanish too
        return rem[..=order].iter().all(|&v| v == 0);
    }
    for p in anchor + 1..=order {
        let ap = rem[p].unsigned_abs() as i64;
        let (ln, ld) = ratio_min[idx * stride + p];
        if frac_lt(ap, a0, ln, ld) {
            return false;
        }
        let (hn, hd) = ratio_max[idx * stride + p];
        if frac_lt(hn, hd, ap, a0) {
            return false;
        }
    }
    true
}

/// Existence-only matcher for sign-uniform candidate families, engineered to
/// refute the typical weight list in a handful of integer operations and
/// without touching the heap.
#[doc(hidden)]
pub static EX_STATS: [AtomicUsize; 6] = [
    AtomicUsize::new(0),
    AtomicUsize::new(0),
    AtomicUsize::new(0),
    AtomicUsize::new(0),
    AtomicUsize::new(0),
    AtomicUsize::new(0),
];

fn exists_sign_uniform(
    cands: &[Rc<CandContrib>],
    target: &[i64],
    sign: i64,
    s: &mut MatchScratch,
) -> bool {
    let order = target.len() - 1;
    EX_STATS[0].fetch_add(1, Ordering::Relaxed);
    for &v in target {
        if v != 0 && v.signum() != sign {
            EX_STATS[1].fetch_add(1, Ordering::Relaxed);
            return false;
        }
    }
    // drop candidates that overshoot anywhere; track per-position extremes
    s.kept.clear();
    for p in 0..=order {
        s.minv[p] = i64::MAX;
        s.maxv[p] = 0;
    }
    for (i, c) in cands.iter().enumerate() {
        let mut cap = u64::MAX;
        let mut visible = false;
        for p in 0..=order {
            let v = c.prefix[p].unsigned_abs();
            if v != 0 {
                visible = true;
                cap = cap.min(target[p].unsigned_abs() / v);
                if cap == 0 {
                    break;
                }
            }
        }
        if !visible || cap == 0 {
            continue;
        }
        s.kept.push((i, cap.min(u32::MAX as u64) as u32));
        for p in 0..=order {
            let v = c.prefix[p].abs();
            s.minv[p] = s.minv[p].min(v);
            s.maxv[p] = s.maxv[p].max(v);
        }
    }
    // interval bound on the total multiplicity across all positions
    let mut lo = 0u64;
    let mut hi = u64::MAX;
    for p in 0..=order {
        let a = target[p].unsigned_abs();
        if a == 0 {
            continue;
        }
        if s.maxv[p] == 0 {
            return false;
        }
        lo = lo.max(a.div_ceil(s.maxv[p] as u64));
        if s.minv[p] > 0 && s.minv[p] < i64::MAX {
            hi = hi.min(a / s.minv[p] as u64);
        }
    }
    if lo > hi {
        EX_STATS[2].fetch_add(1, Ordering::Relaxed);
        return false;
    }
    EX_STATS[3].fetch_add(1, Ordering::Relaxed);
    EX_STATS[4].fetch_add(cands.len(), Ordering::Relaxed);
    // most-constrained first: large leading entries admit few multiplicities
    s.kept
        .sort_by_key(|&(i, _)| std::cmp::Reverse(cands[i].prefix[cands[i].first_nonzero].abs()));
    // merge window-identical candidates
    let mut merged: Vec<(usize, u32)> = Vec::with_capacity(s.kept.len());
    'outer: for &(i, cap) in &s.kept {
        for m in merged.iter_mut() {
            if cands[m.0].prefix[..=order] == cands[i].prefix[..=order] {
                m.1 = m.1.saturating_add(cap);
                continue 'outer;
            }
        }
        merged.push((i, cap));
    }
    let n = merged.len();
    let stride = order + 1;
    s.suffix_min.clear();
    s.suffix_min.resize((n + 1) * stride, i64::MAX);
    s.suffix_max.clear();
    s.suffix_max.resize((n + 1) * stride, 0);
    for idx in (0..n).rev() {
        for p in 0..=order {
            let v = cands[merged[idx].0].prefix[p].abs();
            s.suffix_min[idx * stride + p] = v.min(s.suffix_min[(idx + 1) * stride + p]);
            s.suffix_max[idx * stride + p] = v.max(s.suffix_max[(idx + 1) * stride + p]);
        }
    }
    // anchor for ratio pruning: the common first live position, valid when
    // every kept candidate is nonzero there
    let anchor = (0..=order).find(|&p| target[p] != 0).unwrap_or(0);
    let anchored = merged
        .iter()
        .all(|&(i, _)| cands[i].prefix[anchor] != 0);
    s.ratio_min.clear();
    s.ratio_max.clear();
    if anchored {
        s.ratio_min.resize((n + 1) * stride, (i64::MAX, 1));
        s.ratio_max.resize((n + 1) * stride, (0, 1));
        for idx in (0..n).rev() {
            let c = &cands[merged[idx].0];
            let den = c.prefix[anchor].abs();
            for p in 0..=order {
                let num = c.prefix[p].abs();
                let below_min = s.ratio_min[(idx + 1) * stride + p];
                let below_max = s.ratio_max[(idx + 1) * stride + p];
                s.ratio_min[idx * stride + p] = if frac_lt(num, den, below_min.0, below_min.1) {
                    (num, den)
                } else {
                    below_min
                };
                s.ratio_max[idx * stride + p] = if frac_lt(below_max.0, below_max.1, num, den) {
                    (num, den)
                } else {
                    below_max
                };
            }
        }
        if !ratio_box_ok(target, anchor, order, 0, stride, &s.ratio_min, &s.ratio_max) {
            EX_STATS[2].fetch_add(1, Ordering::Relaxed);
            return false;
        }
    }
    s.rem.copy_from_slice(&target[..=order]);
    EX_STATS[5].fetch_add(merged.len(), Ordering::Relaxed);
    exists_dfs(cands, &merged, sign, order, 0, s, anchor, anchored)
}

#[allow(clippy::too_many_arguments)]
fn exists_dfs(
    cands: &[Rc<CandContrib>],
    merged: &[(usize, u32)],
    sign: i64,
    order: usize,
    idx: usize,
    s: &mut MatchScratch,
    anchor: usize,
    anchored: bool,
) -> bool {
    if idx == merged.len() {
        return s.rem[..=order].iter().all(|&v| v == 0);
    }
    let stride = order + 1;
    // interval feasibility over the remaining suffix
    let mut lo = 0u64;
    let mut hi = u64::MAX;
    for p in 0..=order {
        let a = s.rem[p].unsigned_abs();
        if a == 0 {
            continue;
        }
        if s.rem[p].signum() != sign {
            return false;
        }
        let maxv = s.suffix_max[idx * stride + p];
        if maxv == 0 {
            return false;
        }
        lo = lo.max(a.div_ceil(maxv as u64));
        let minv = s.suffix_min[idx * stride + p];
        if minv > 0 && minv < i64::MAX {
            hi = hi.min(a / minv as u64);
        }
    }
    if lo > hi {
        return false;
    }
    if anchored
        && !ratio_box_ok(&s.rem, anchor, order, idx, stride, &s.ratio_min, &s.ratio_max)
    {
        return false;
    }
    let (ci, cap) = merged[idx];
    let cand = &cands[ci];
    // the final candidate is determined: the remainder must be an exact
    // multiple of its column
    if idx == merged.len() - 1 {
        let p0 = cand.first_nonzero;
        if p0 > order {
            return s.rem[..=order].iter().all(|&v| v == 0);
        }
        let v0 = cand.prefix[p0];
        if s.rem[p0] % v0 != 0 {
            return false;
        }
        let mult = s.rem[p0] / v0;
        if mult < 0 || mult as u64 > u64::from(cap) {
            return false;
        }
        return (0..=order).all(|p| s.rem[p] == cand.prefix[p] * mult);
    }
    let p0 = cand.first_nonzero;
    let max_mult = if p0 > order {
        0
    } else {
        ((s.rem[p0] / cand.prefix[p0]).max(0) as u32)
            .min(cap)
            .min(hi.min(u32::MAX as u64) as u32)
    };
    let mut applied = 0u32;
    let mut ok = false;
    for mult in 0..=max_mult {
        if mult > 0 {
            let mut crossed = false;
            for p in 0..=order {
                s.rem[p] -= cand.prefix[p];
                if s.rem[p] != 0 && s.rem[p].signum() != sign {
                    crossed = true;
                }
            }
            applied = mult;
            if crossed {
                break;
            }
        }
        if exists_dfs(cands, merged, sign, order, idx + 1, s, anchor, anchored) {
            ok = true;
            break;
        }
    }
    for p in 0..=order {
        s.rem[p] += cand.prefix[p] * i64::from(applied);
    }
    ok
}

/// Compute the residual prefix `P_X - P_ini` to `order` in plain machine
/// integers. Returns `false` when any step would overflow, in which case the
/// caller must redo the computation exactly.
fn quick_residual(
    numerator: &[i64],
    weights: &[i64],
    k: i64,
    order: usize,
    scratch: &mut QuickScratch,
) -> bool {
    let c = (k + 4) as usize;
    let half = c / 2;
    if c > order {
        return false;
    }
    let px = &mut scratch.px;
    for (i, slot) in px.iter_mut().enumerate() {
        *slot = numerator.get(i).copied().unwrap_or(0);
    }
    for &w in weights {
        let w = w as usize;
        for i in w..=order {
            let Some(v) = px[i].checked_add(px[i - w]) else {
                return false;
            };
            px[i] = v;
        }
    }
    // numerator of the initial series: P_X * (1-t)^4 truncated, mirrored
    let binom = [1i64, -4, 6, -4, 1];
    let pini = &mut scratch.pini;
    pini.iter_mut().for_each(|v| *v = 0);
    for j in 0..=half {
        let mut acc = 0i64;
        for (i, &b) in binom.iter().enumerate() {
            if i <= j {
                let Some(t) = px[j - i].checked_mul(b) else {
                    return false;
                };
                let Some(s) = acc.checked_add(t) else {
                    return false;
                };
                acc = s;
            }
        }
        pini[j] = acc;
        pini[c - j] = acc;
    }
    for _ in 0..4 {
        for i in 1..=order {
            let Some(v) = pini[i].checked_add(pini[i - 1]) else {
                return false;
            };
            pini[i] = v;
        }
    }
    for i in 0..=order {
        let Some(v) = px[i].checked_sub(pini[i]) else {
            return false;
        };
        scratch.residual[i] = v;
    }
    true
}

#[doc(hidden)]
pub static STAGE_NS: [AtomicUsize; 5] = [
    AtomicUsize::new(0),
    AtomicUsize::new(0),
    AtomicUsize::new(0),
    AtomicUsize::new(0),
    AtomicUsize::new(0),
];

macro_rules! stage {
    ($idx:expr, $body:expr) => {{
        let t = Instant::now();
        let out = $body;
        STAGE_NS[$idx].fetch_add(t.elapsed().as_nanos() as usize, Ordering::Relaxed);
        out
    }};
}

fn process_format(
    f: &FormatInstance,
    config: &SearchConfig,
    ctx: &mut SearchContext,
    pairs_scanned: &mut u64,
) -> Result<Vec<CandidateHit>, GrdbError> {
    let mut hits = Vec::new();
    if let Some(pinned) = &config.pinned_degrees {
        let mut want = pinned.clone();
        want.sort_unstable();
        if f.equation_degrees != want {
            return Ok(hits);
        }
    }
    let s0 = ((config.k + 4) / 2 + 1) as usize;
    let quick_order = s0 + 6;
    let numerator_small: Option<Vec<i64>> = f
        .numerator
        .coeffs()
        .iter()
        .map(|c| c.to_i64())
        .collect();
    // a general-form equation of degree equal to an ambient weight makes
    // that variable eliminable: the member is a linear cone over a lower
    // codimension model and is catalogued there instead
    let cone_degrees: Vec<i64> = equation_shapes(f)
        .iter()
        .filter_map(|eq| match eq {
            EqShape::General(d) => Some(*d),
            EqShape::Pairs(..) => None,
        })
        .collect();
    let slots = (config.dim + f.codim + 1) as usize;
    let total = f.adjunction - config.k;
    let mut walker = WeightWalker {
        f,
        config,
        ctx,
        scratch: QuickScratch::new(quick_order),
        mscratch: MatchScratch::new(quick_order),
        numerator_small,
        cone_degrees,
        quick_order,
        s0,
        prefix: Vec::with_capacity(slots),
        pairs_scanned,
        hits: &mut hits,
    };
    walker.walk(slots, total, config.min_weight.max(1), false)?;
    Ok(hits)
}

/// Recursive ambient-weight enumeration fused with subtree rejection.
///
/// Weights are chosen ascending. Denominator factors `(1 - t^a)` with
/// `a > quick_order` cannot influence series coefficients up to
/// `quick_order`, so the moment every remaining slot exceeds it the quick
/// residual is frozen: one existence test against the class-wide universe of
/// contribution prefixes decides the entire completion subtree.
struct WeightWalker<'a> {
    f: &'a FormatInstance,
    config: &'a SearchConfig,
    ctx: &'a mut SearchContext,
    scratch: QuickScratch,
    mscratch: MatchScratch,
    numerator_small: Option<Vec<i64>>,
    cone_degrees: Vec<i64>,
    quick_order: usize,
    s0: usize,
    prefix: Vec<i64>,
    pairs_scanned: &'a mut u64,
    hits: &'a mut Vec<CandidateHit>,
}

impl WeightWalker<'_> {
    fn walk(
        &mut self,
        slots: usize,
        total: i64,
        lo: i64,
        stem_checked: bool,
    ) -> Result<(), GrdbError> {
        if slots == 0 {
            if total == 0 {
                let g = self.prefix.iter().fold(0i64, |acc, &w| acc.gcd(&w));
                if g == 1 {
                    self.leaf()?;
                }
            }
            return Ok(());
        }
        let hi = self.f.chi_max;
        let mut v = lo;
        while v <= hi && v * slots as i64 <= total {
            if total - v > hi * (slots as i64 - 1) || self.cone_degrees.contains(&v) {
                v += 1;
                continue;
            }
            let mut stem_now = stem_checked;
            if !stem_now && v as usize > self.quick_order {
                // all remaining weights exceed the quick window
                if !self.stem_admits()? {
                    return Ok(());
                }
                stem_now = true;
            }
            self.prefix.push(v);
            self.walk(slots - 1, total - v, v, stem_now)?;
            self.prefix.pop();
            v += 1;
        }
        Ok(())
    }

    /// Can any completion of the current stem by large weights match? The
    /// residual window is already frozen; test it against every quick
    /// prefix the class can produce.
    fn stem_admits(&mut self) -> Result<bool, GrdbError> {
        let Some(num) = self.numerator_small.as_ref() else {
            return Ok(true);
        };
        if !quick_residual(
            num,
            &self.prefix,
            self.config.k,
            self.quick_order,
            &mut self.scratch,
        ) {
            return Ok(true);
        }
        if self.scratch.residual.iter().all(|&x| x == 0) {
            return Ok(true);
        }
        let universe = self.ctx.universe(self.f.chi_max)?;
        let admits = stage!(4, match universe.uniform {
            Some(sg) => {
                universe.envelope_admits(&self.scratch.residual)
                    && exists_sign_uniform(
                        &universe.list,
                        &self.scratch.residual,
                        i64::from(sg),
                        &mut self.mscratch,
                    )
            }
            None => !Matcher::run(
                &universe.list,
                &self.scratch.residual,
                CapRule::Cap(self.config.basket_cap),
                true,
            )
            .is_empty(),
        });
        Ok(admits)
    }

    fn leaf(&mut self) -> Result<(), GrdbError> {
        let config = self.config;
        let f = self.f;
        let weights = &self.prefix;
        *self.pairs_scanned += 1;
        // fast lane: machine-integer residual prefix
        let quick_ok = stage!(1, self.numerator_small.as_ref().is_some_and(|num| {
            quick_residual(num, weights, config.k, self.quick_order, &mut self.scratch)
        }));
        let fallback: Vec<i64>;
        let quick: &[i64] = if quick_ok {
            &self.scratch.residual
        } else {
            // exact fallback
            let p_x = hilbert_series(f, weights);
            let p_ini = initial_series(&p_x, config.k)?;
            let px_q = p_x.expand(self.quick_order);
            let pini_q = p_ini.expand(self.quick_order);
            fallback = px_q
                .coeffs()
                .iter()
                .zip(pini_q.coeffs())
                .map(|(a, b)| {
                    (a - b).to_i64().ok_or_else(|| {
                        GrdbError::inconsistency("residual coefficient exceeds i64 range")
                    })
                })
                .collect::<Result<_, _>>()?;
            &fallback
        };
        let quick_is_zero = quick.iter().all(|&v| v == 0);

        if quick_is_zero {
            let p_x = hilbert_series(f, weights);
            let p_ini = initial_series(&p_x, config.k)?;
            let residual = p_x.sub(&p_ini);
            let set = self.ctx.candidates(weights)?;
            if residual.is_zero() {
                let kernels = kernel_report(&set.list, config)?;
                self.hits.push(assemble_hit(
                    f,
                    weights,
                    p_x,
                    p_ini,
                    vec![Vec::new()],
                    kernels,
                    config,
                )?);
                return Ok(());
            }
            // the residual hides beyond the quick prefix: run the full match
            if let Some(hit) =
                full_match(f, weights, p_x, p_ini, &set.list, config, self.ctx.order, self.s0)?
            {
                self.hits.push(hit);
            }
            return Ok(());
        }

        let set = stage!(2, self.ctx.candidates(weights))?;
        if set.list.is_empty() {
            return Ok(());
        }
        // quick rejection, sound only when every candidate is visible
        // inside the short prefix
        let all_visible = set
            .list
            .iter()
            .all(|c| c.first_nonzero <= self.quick_order);
        if all_visible {
            let reject = stage!(3, match set.uniform {
                Some(sg) => {
                    !set.envelope_admits(quick)
                        || !exists_sign_uniform(
                            &set.list,
                            quick,
                            i64::from(sg),
                            &mut self.mscratch,
                        )
                }
                None => {
                    Matcher::run(&set.list, quick, CapRule::Cap(config.basket_cap), true)
                        .is_empty()
                }
            });
            if reject {
                return Ok(());
            }
        }
        let p_x = hilbert_series(f, weights);
        let p_ini = initial_series(&p_x, config.k)?;
        if let Some(hit) =
            full_match(f, weights, p_x, p_ini, &set.list, config, self.ctx.order, self.s0)?
        {
            self.hits.push(hit);
        }
        Ok(())
    }
}

fn full_match(
    f: &FormatInstance,
    weights: &[i64],
    p_x: CycloRational,
    p_ini: CycloRational,
    contribs: &[Rc<CandContrib>],
    config: &SearchConfig,
    order_bound: usize,
    s0: usize,
) -> Result<Option<CandidateHit>, GrdbError> {
    let max_r = contribs.iter().map(|c| c.sing.index()).max().unwrap_or(2);
    let order = ((max_r + 8) as usize + s0).min(order_bound);
    let baskets = baskets_for(&p_x, &p_ini, contribs, config.basket_cap, order)?;
    if baskets.is_empty() {
        return Ok(None);
    }
    let kernels = kernel_report(contribs, config)?;
    Ok(Some(assemble_hit(
        f, weights, p_x, p_ini, baskets, kernels, config,
    )?))
}

fn kernel_report(
    contribs: &[Rc<CandContrib>],
    config: &SearchConfig,
) -> Result<Vec<SingularityMultiset>, GrdbError> {
    if contribs.is_empty() || uniform_sign(contribs).is_some() {
        return Ok(Vec::new());
    }
    let candidates: Vec<QuotientSingularity> = contribs.iter().map(|c| c.sing).collect();
    find_kernels(&candidates, config.k, config.kernel_cap)
}

fn assemble_hit(
    f: &FormatInstance,
    weights: &[i64],
    p_x: CycloRational,
    p_ini: CycloRational,
    baskets: Vec<SingularityMultiset>,
    kernels: Vec<SingularityMultiset>,
    config: &SearchConfig,
) -> Result<CandidateHit, GrdbError> {
    let invariants = baskets
        .iter()
        .map(|b| invariant_set(&p_x, b, config.k, config.m_max))
        .collect::<Result<Vec<_>, _>>()?;
    let flags = realisability_flags(f, weights, &baskets);
    Ok(CandidateHit {
        format: f.clone(),
        weights: weights.to_vec(),
        p_x,
        p_ini,
        baskets,
        kernels,
        invariants,
        flags,
    })
}

/// Run the full pipeline over all gradings with search parameter up to the
/// configured ceiling. Output is canonically ordered and independent of the
/// worker count.
pub fn run_search(config: &SearchConfig) -> Result<(Vec<CandidateHit>, RunReport), GrdbError> {
    let start = Instant::now();
    if config.dim != 3 {
        return Err(GrdbError::invalid("only dimension 3 searches are supported"));
    }
    if config.k < -1 {
        return Err(GrdbError::invalid("polarisation index must be at least -1"));
    }
    let mut formats: Vec<FormatInstance> = Vec::new();
    for param in 1..=config.max_adjunction {
        formats.extend(enumerate_gradings(config.family, param, config.dim));
    }
    let order_bound = formats.iter().map(|f| f.chi_max).max().unwrap_or(2).max(2) as usize
        + 8
        + ((config.k + 4) / 2 + 1) as usize;

    let jobs = config.jobs.max(1);
    let mut per_task: Vec<(Vec<CandidateHit>, u64)> = Vec::with_capacity(formats.len());
    if jobs <= 1 {
        let mut ctx = SearchContext::new(config.k, config.sing_class, order_bound);
        for f in &formats {
            let mut pairs = 0u64;
            let hits = process_format(f, config, &mut ctx, &mut pairs)?;
            per_task.push((hits, pairs));
        }
    } else {
        let next = AtomicUsize::new(0);
        let slots: Vec<std::sync::Mutex<Option<Result<(Vec<CandidateHit>, u64), GrdbError>>>> =
            (0..formats.len())
                .map(|_| std::sync::Mutex::new(None))
                .collect();
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(|| {
                    let mut ctx = SearchContext::new(config.k, config.sing_class, order_bound);
                    loop {
                        let idx = next.fetch_add(1, Ordering::Relaxed);
                        if idx >= formats.len() {
                            break;
                        }
                        let mut pairs = 0u64;
                        let out = process_format(&formats[idx], config, &mut ctx, &mut pairs)
                            .map(|hits| (hits, pairs));
                        *slots[idx].lock().unwrap() = Some(out);
                    }
                });
            }
        });
        for slot in slots {
            let out = slot
                .into_inner()
                .unwrap()
                .expect("every task index was claimed");
            per_task.push(out?);
        }
    }

    let mut report = RunReport {
        k_max: config.max_adjunction,
        formats_scanned: formats.len() as u64,
        ..RunReport::default()
    };
    let mut hits: Vec<CandidateHit> = Vec::new();
    for (task_hits, pairs) in per_task {
        report.weight_lists_scanned += pairs;
        hits.extend(task_hits);
    }
    // canonical order, bit-stable regardless of how tasks were scheduled
    hits.sort_by(|a, b| {
        (a.format.search_parameter(), &a.format.params, &a.weights).cmp(&(
            b.format.search_parameter(),
            &b.format.params,
            &b.weights,
        ))
    });
    for h in &hits {
        report.records += 1;
        if h.flags.all_pass() {
            report.all_flags_pass += 1;
        } else {
            for (name, pass) in [
                ("well_formed", h.flags.well_formed),
                ("variable_usage", h.flags.variable_usage),
                ("tangent_monomial", h.flags.tangent_monomial),
                ("index_capacity", h.flags.index_capacity),
            ] {
                if !pass {
                    *report.flag_failures.entry(name.to_string()).or_insert(0) += 1;
                }
            }
        }
        let p = h.format.search_parameter();
        report.k_last = Some(report.k_last.map_or(p, |k| k.max(p)));
    }
    report.wall_ms = start.elapsed().as_millis();
    Ok((hits, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{ci_format, gr25_format, Gr25Grading};

    fn gr(ws: [i64; 5]) -> FormatInstance {
        gr25_format(&Gr25Grading::from_doubled(ws.map(|w| 2 * w)).unwrap()).unwrap()
    }

    fn half_gr(doubled: [i64; 5]) -> FormatInstance {
        gr25_format(&Gr25Grading::from_doubled(doubled).unwrap()).unwrap()
    }

    #[test]
    fn subset_gcd_closure() {
        assert_eq!(subset_gcds(&[1, 1, 1]), Vec::<i64>::new());
        assert_eq!(subset_gcds(&[2, 4, 6]), vec![2, 4, 6]);
        assert_eq!(subset_gcds(&[6, 9, 4]), vec![2, 3, 4, 6, 9]);
        assert_eq!(
            subset_gcds(&[1, 3, 4, 5, 6, 7, 8]),
            vec![2, 3, 4, 5, 6, 7, 8]
        );
    }

    #[test]
    fn class_singularity_lists() {
        assert_eq!(
            class_singularities(2, SingClass::Terminal, 1),
            vec![QuotientSingularity::new(2, [1, 1, 1]).unwrap()]
        );
        assert_eq!(
            class_singularities(4, SingClass::Terminal, 1),
            vec![QuotientSingularity::new(4, [1, 3, 3]).unwrap()]
        );
        // an index sharing a factor with k has no terminal points
        assert!(class_singularities(4, SingClass::Terminal, 2).is_empty());
        assert_eq!(
            class_singularities(3, SingClass::Terminal, 2),
            vec![QuotientSingularity::new(3, [1, 1, 2]).unwrap()]
        );
        // canonical-isolated: both thirds appear, no half points exist
        assert_eq!(
            class_singularities(3, SingClass::CanonicalIsolated, 0),
            vec![
                QuotientSingularity::new(3, [1, 1, 1]).unwrap(),
                QuotientSingularity::new(3, [2, 2, 2]).unwrap(),
            ]
        );
        assert!(class_singularities(2, SingClass::CanonicalIsolated, 0).is_empty());
        assert_eq!(
            class_singularities(5, SingClass::CanonicalIsolated, 0).len(),
            4
        );
    }

    #[test]
    fn candidate_lists_from_weights() {
        let c = candidate_singularities(&[1, 1, 1, 1, 1, 2, 2], SingClass::Terminal, 1);
        assert_eq!(c, vec![QuotientSingularity::new(2, [1, 1, 1]).unwrap()]);
        assert!(candidate_singularities(&[1; 7], SingClass::Terminal, 1).is_empty());
        let c = candidate_singularities(&[1, 3, 4, 5, 6, 7, 8], SingClass::Terminal, 1);
        for want in ["1/2(1,1,1)", "1/3(1,2,2)", "1/4(1,3,3)"] {
            let s: QuotientSingularity = want.parse().unwrap();
            assert!(c.contains(&s), "missing {want}");
        }
    }

    #[test]
    fn ambient_weights_for_table_rows() {
        let f = gr([0, 1, 1, 1, 1]);
        assert_eq!(
            enumerate_ambient_weights(&f, 3, 1, 1),
            vec![vec![1, 1, 1, 1, 1, 1, 1]]
        );
        let f = gr([0, 1, 1, 1, 2]);
        let lists = enumerate_ambient_weights(&f, 3, 1, 1);
        assert!(lists.contains(&vec![1, 1, 1, 1, 1, 2, 2]));
        // partition oracle: sorted lists, 7 entries in [1,3], sum 9, gcd 1
        let mut want = Vec::new();
        fn rec(prefix: &mut Vec<i64>, total: i64, out: &mut Vec<Vec<i64>>) {
            if prefix.len() == 7 {
                if total == 0 {
                    let g = prefix.iter().fold(0i64, |a, &w| a.gcd(&w));
                    if g == 1 {
                        out.push(prefix.clone());
                    }
                }
                return;
            }
            let lo = prefix.last().copied().unwrap_or(1);
            for v in lo..=3 {
                if v <= total {
                    prefix.push(v);
                    rec(prefix, total - v, out);
                    prefix.pop();
                }
            }
        }
        rec(&mut Vec::new(), 9, &mut want);
        assert_eq!(lists, want);
        // infeasible sum
        let f = ci_format(&[2]).unwrap();
        assert!(enumerate_ambient_weights(&f, 3, 1, 1).is_empty());
    }

    #[test]
    fn initial_series_of_first_table_row() {
        let f = gr([0, 1, 1, 1, 1]);
        let p_x = hilbert_series(&f, &[1; 7]);
        let p_ini = initial_series(&p_x, 1).unwrap();
        assert_eq!(p_ini.numerator(), &IntPoly::from_i64(&[1, 3, 6, 6, 3, 1]));
        assert!(p_x.sub(&p_ini).is_zero());
        // a series already of the initial shape is its own fixed point
        let again = initial_series(&p_ini, 1).unwrap();
        assert!(again.rational_eq(&p_ini));
    }

    #[test]
    fn basket_match_row_three() {
        // X_{3,4^3,5} in P(1^5, 2^2): basket is one half point
        let f = gr([0, 1, 1, 1, 2]);
        let weights = vec![1, 1, 1, 1, 1, 2, 2];
        let p_x = hilbert_series(&f, &weights);
        let p_ini = initial_series(&p_x, 1).unwrap();
        assert_eq!(p_ini.numerator(), &IntPoly::from_i64(&[1, 1, 3, 3, 1, 1]));
        let config = SearchConfig::new(FamilySpec::Gr25, 1, 20);
        let candidates = candidate_singularities(&weights, SingClass::Terminal, 1);
        let (baskets, kernels) = match_baskets(&p_x, &p_ini, &candidates, &config).unwrap();
        let half = QuotientSingularity::new(2, [1, 1, 1]).unwrap();
        assert_eq!(baskets, vec![vec![(half, 1)]]);
        assert!(kernels.is_empty());
    }

    #[test]
    fn basket_match_is_unique_for_p1345678() {
        // X_{12..16} in P(1,3,4,5,6,7,8): 1/2 + 1/3(1,2,2) + 1/4(1,3,3)
        let f = half_gr([3, 5, 7, 9, 11]);
        let weights = vec![1, 3, 4, 5, 6, 7, 8];
        let p_x = hilbert_series(&f, &weights);
        let p_ini = initial_series(&p_x, 1).unwrap();
        let config = SearchConfig::new(FamilySpec::Gr25, 1, 40);
        let candidates = candidate_singularities(&weights, SingClass::Terminal, 1);
        let (baskets, _) = match_baskets(&p_x, &p_ini, &candidates, &config).unwrap();
        assert_eq!(baskets.len(), 1);
        let want: SingularityMultiset = vec![
            ("1/2(1,1,1)".parse().unwrap(), 1),
            ("1/3(1,2,2)".parse().unwrap(), 1),
            ("1/4(1,3,3)".parse().unwrap(), 1),
        ];
        assert_eq!(baskets[0], want);
    }

    #[test]
    fn empty_residual_for_smooth_sextic() {
        let f = ci_format(&[6]).unwrap();
        let p_x = hilbert_series(&f, &[1, 1, 1, 1, 1]);
        let p_ini = initial_series(&p_x, 1).unwrap();
        assert!(p_x.sub(&p_ini).is_zero());
    }

    #[test]
    fn flags_pass_on_smooth_sextic() {
        let f = ci_format(&[6]).unwrap();
        let flags = realisability_flags(&f, &[1, 1, 1, 1, 1], &[Vec::new()]);
        assert!(flags.all_pass());
    }

    #[test]
    fn flags_fail_on_x630() {
        // X_{6,30} in P(1,2,3,4,10,15): the degree-six equation cannot
        // provide a tangent monomial along P(10,15)
        let f = ci_format(&[6, 30]).unwrap();
        let weights = vec![1, 2, 3, 4, 10, 15];
        let flags = realisability_flags(&f, &weights, &[Vec::new()]);
        assert!(!flags.tangent_monomial);
    }

    #[test]
    fn flags_pass_on_table_one_row_one() {
        let f = gr([0, 1, 1, 1, 1]);
        let flags = realisability_flags(&f, &[1; 7], &[Vec::new()]);
        assert!(flags.all_pass());
    }

    #[test]
    fn search_finds_first_table_rows_quickly() {
        let mut config = SearchConfig::new(FamilySpec::Gr25, 1, 10);
        config.jobs = 1;
        let (hits, report) = run_search(&config).unwrap();
        assert!(hits.iter().any(|h| h.weights == vec![1; 7]));
        assert!(hits.iter().any(|h| h.weights == vec![1, 1, 1, 1, 1, 1, 2]));
        assert_eq!(report.records, hits.len() as u64);
        assert!(report.k_last.unwrap() >= 9);
    }

    #[test]
    fn no_gradings_below_the_threshold() {
        let config = SearchConfig::new(FamilySpec::Gr25, 1, 2);
        let (hits, _) = run_search(&config).unwrap();
        assert!(hits.is_empty());
    }
}
