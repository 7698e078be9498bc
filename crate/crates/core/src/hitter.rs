//! Hitting sets for products of variable differences.
//!
//! A polynomial in the class has the form Π (x_a - x_b) over at most `degree`
//! pairs with a ≠ b. Rows of a hitting set are assignments in F_q^n; the
//! construction takes n distinct nonzero codewords of a code with relative
//! distance 1 - 1/h and uses codeword j as column j. Two columns then agree on
//! at most ⌊m/h⌋ rows, so a product of fewer than h factors is nonzero on some row.

use std::ops::ControlFlow;

use num_rational::Ratio;

use crate::combin::for_each_combination;
use crate::error::{Error, Result};
use crate::gfq::{is_prime_power, FieldSpec};
use crate::gvcode::{self, LinearCode};
use crate::matrix::SymbolMatrix;
use crate::verdict::{ConstraintBudget, Verdict, Witness};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HittingSet {
    pub field: FieldSpec,
    pub n: usize,
    /// m rows of n field-element indices.
    pub rows: SymbolMatrix,
    pub degree: usize,
    pub eps: Option<Ratio<u64>>,
    pub h: u32,
    /// Row count promised by the closed form.
    pub closed_form_m: usize,
    /// The code whose codewords are the columns, when built here.
    pub code: Option<LinearCode>,
}

impl HittingSet {
    pub fn m(&self) -> usize {
        self.rows.rows()
    }

    pub fn q(&self) -> u32 {
        self.field.order()
    }
}

/// A multiset of column pairs standing for Π (x_a - x_b).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairConstraint {
    pairs: Vec<(usize, usize)>,
}

impl PairConstraint {
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        if pairs.iter().any(|(a, b)| a == b) {
            return Err(Error::InvalidParameters(
                "a pair {j, j} makes the product identically zero".into(),
            ));
        }
        Ok(PairConstraint { pairs })
    }

    pub fn degree(&self) -> usize {
        self.pairs.len()
    }

    /// Distinct unordered pairs; multiplicity does not change where the product vanishes.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut s: Vec<(usize, usize)> = self
            .pairs
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Whether the product is nonzero on `row`.
    pub fn hits(&self, row: &[u32]) -> bool {
        self.pairs.iter().all(|&(a, b)| row[a] != row[b])
    }
}

fn check_alphabet(q: u32) -> Result<FieldSpec> {
    if is_prime_power(q as u64).is_none() {
        return Err(Error::NotPrimePower(q as u64));
    }
    FieldSpec::new(q as u64)
}

fn from_code(
    n: usize,
    degree: usize,
    eps: Option<Ratio<u64>>,
    h: u32,
    params: gvcode::CodeParams,
) -> Result<HittingSet> {
    let closed_form_m = params.closed_form_m;
    let code = gvcode::construct_code(&params)?;
    let words = gvcode::enumerate_codewords(&code, n as u64)?;
    let m = code.params.m;
    let mut rows = SymbolMatrix::zeros(m, n);
    for (j, w) in words.iter().enumerate() {
        for (i, &x) in w.iter().enumerate() {
            rows.set(i, j, x);
        }
    }
    Ok(HittingSet {
        field: code.field.clone(),
        n,
        rows,
        degree,
        eps,
        h,
        closed_form_m,
        code: Some(code),
    })
}

fn trivial(field: FieldSpec, n: usize, degree: usize, eps: Option<Ratio<u64>>) -> HittingSet {
    HittingSet {
        field,
        n,
        rows: SymbolMatrix::zeros(1, n),
        degree,
        eps,
        h: 1,
        closed_form_m: 1,
        code: None,
    }
}

/// A hitting set for products of at most `d` differences over F_q.
pub fn build_hitting(n: usize, d: usize, q: u32) -> Result<HittingSet> {
    let field = check_alphabet(q)?;
    if (q as usize) < d + 2 {
        return Err(Error::AlphabetTooSmall(format!(
            "need q >= d + 2 = {}, got q = {q}",
            d + 2
        )));
    }
    if n < 2 {
        return Err(Error::InvalidParameters("need n >= 2".into()));
    }
    if n <= q as usize || n <= d {
        log::warn!("n = {n} does not exceed q = {q} and d = {d}; the size is not optimal here");
    }
    if d == 0 {
        return Ok(trivial(field, n, d, None));
    }
    let h = d as u32 + 1;
    let params = gvcode::code_params(q, h, n as u64)?;
    from_code(n, d, None, h, params)
}

/// ⌈(d+1)/ε⌉.
pub fn dense_distance_parameter(d: usize, eps: Ratio<u64>) -> u64 {
    ((d as u64 + 1) * eps.denom()).div_ceil(*eps.numer())
}

fn check_eps(eps: Ratio<u64>) -> Result<()> {
    if *eps.numer() == 0 || eps > Ratio::from_integer(1) {
        return Err(Error::InvalidParameters(format!("eps must lie in (0,1], got {eps}")));
    }
    Ok(())
}

/// A (1-ε)-dense hitting set: every nonzero product is nonzero on more than (1-ε)m rows.
pub fn build_dense_hitting(n: usize, d: usize, q: u32, eps: Ratio<u64>) -> Result<HittingSet> {
    check_eps(eps)?;
    let field = check_alphabet(q)?;
    // q >= (d+1)/eps + 1
    if (q as u64 - 1) * eps.numer() < (d as u64 + 1) * eps.denom() {
        return Err(Error::EpsilonInfeasible(format!(
            "need q >= (d+1)/eps + 1 = {}, got q = {q}",
            Ratio::new((d as u64 + 1) * eps.denom(), *eps.numer()) + 1
        )));
    }
    if n < 2 {
        return Err(Error::InvalidParameters("need n >= 2".into()));
    }
    if n <= q as usize || n <= d {
        log::warn!("n = {n} does not exceed q = {q} and d = {d}; the size is not optimal here");
    }
    let h = dense_distance_parameter(d, eps) as u32;
    if h < 2 {
        // eps = 1 with d = 0: any nonempty row set qualifies
        return Ok(trivial(field, n, d, Some(eps)));
    }
    let params = gvcode::code_params(q, h, n as u64)?;
    from_code(n, d, Some(eps), h, params)
}

/// Largest number of rows on which two distinct columns agree, with the first
/// pair attaining it.
pub fn max_column_agreement(rows: &SymbolMatrix) -> (usize, Option<(usize, usize)>) {
    let mut best = (0, None);
    for a in 0..rows.cols() {
        for b in a + 1..rows.cols() {
            let agree = rows.iter_rows().filter(|r| r[a] == r[b]).count();
            if best.1.is_none() || agree > best.0 {
                best = (agree, Some((a, b)));
            }
        }
    }
    best
}

/// For every column pair (lexicographic), a bitset of rows where the two columns agree.
struct AgreementSets {
    pairs: Vec<(usize, usize)>,
    words: usize,
    bits: Vec<u64>,
}

impl AgreementSets {
    fn new(rows: &SymbolMatrix) -> Self {
        let n = rows.cols();
        let m = rows.rows();
        let words = m.div_ceil(64).max(1);
        let mut pairs = Vec::new();
        let mut bits = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                pairs.push((a, b));
                let start = bits.len();
                bits.resize(start + words, 0u64);
                for (i, r) in rows.iter_rows().enumerate() {
                    if r[a] == r[b] {
                        bits[start + i / 64] |= 1 << (i % 64);
                    }
                }
            }
        }
        AgreementSets { pairs, words, bits }
    }

    fn set(&self, pair: usize) -> &[u64] {
        &self.bits[pair * self.words..(pair + 1) * self.words]
    }
}

fn constraint_count(pairs: usize, degree: usize) -> u64 {
    (1..=degree.min(pairs))
        .map(|s| crate::combin::binomial_u64(pairs as u64, s as u64))
        .fold(0u64, |a, b| a.saturating_add(b))
}

/// Walks every set of 1..=degree distinct pairs (by size, then lexicographically)
/// and reports the first whose hit count fails `ok`.
fn scan_pair_sets(
    rows: &SymbolMatrix,
    degree: usize,
    budget: &mut ConstraintBudget,
    ok: impl Fn(usize) -> bool,
) -> Result<Verdict> {
    let m = rows.rows();
    let start = budget.elapsed();
    if m == 0 {
        // with no rows even the empty product goes unhit
        return Ok(Verdict::Violated {
            witness: Witness::Pairs {
                pairs: Vec::new(),
                hits: m,
            },
            checks: 0,
        });
    }
    let sets = AgreementSets::new(rows);
    let per = m.max(1) as u64;
    budget.require(constraint_count(sets.pairs.len(), degree).saturating_mul(per))?;
    let mut union = vec![0u64; sets.words];
    for size in 1..=degree.min(sets.pairs.len()) {
        let flow = for_each_combination(sets.pairs.len(), size, |pick| {
            if let Err(e) = budget.charge(per) {
                return ControlFlow::Break(Err(e));
            }
            union.iter_mut().for_each(|w| *w = 0);
            for &p in pick {
                for (u, s) in union.iter_mut().zip(sets.set(p)) {
                    *u |= s;
                }
            }
            let zero_rows: usize = union.iter().map(|w| w.count_ones() as usize).sum();
            let hits = m - zero_rows;
            if ok(hits) {
                ControlFlow::Continue(())
            } else {
                ControlFlow::Break(Ok(Witness::Pairs {
                    pairs: pick.iter().map(|&p| sets.pairs[p]).collect(),
                    hits,
                }))
            }
        });
        if let ControlFlow::Break(res) = flow {
            return res.map(|witness| Verdict::Violated {
                witness,
                checks: budget.elapsed() - start,
            });
        }
    }
    Ok(Verdict::Holds {
        checks: budget.elapsed() - start,
    })
}

/// Checks that every product of at most `degree` distinct differences is nonzero on some row.
pub fn verify_hitting(rows: &SymbolMatrix, degree: usize, budget: &mut ConstraintBudget) -> Result<Verdict> {
    scan_pair_sets(rows, degree, budget, |hits| hits > 0)
}

/// Checks that every such product is nonzero on strictly more than (1-ε)m rows.
pub fn verify_hitting_density(
    rows: &SymbolMatrix,
    degree: usize,
    eps: Ratio<u64>,
    budget: &mut ConstraintBudget,
) -> Result<Verdict> {
    let m = rows.rows() as u128;
    let (num, den) = (*eps.numer() as u128, *eps.denom() as u128);
    if num > den {
        return Err(Error::InvalidParameters(format!("eps must lie in [0,1], got {eps}")));
    }
    scan_pair_sets(rows, degree, budget, |hits| hits as u128 * den > (den - num) * m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> ConstraintBudget {
        ConstraintBudget::default()
    }

    #[test]
    fn branch_one_size() {
        let hs = build_hitting(100, 3, 17).unwrap();
        assert_eq!((hs.m(), hs.h), (67, 4));
        assert_eq!(hs.closed_form_m, 67);
    }

    #[test]
    fn branch_two_size() {
        let hs = build_hitting(20, 2, 7).unwrap();
        assert_eq!((hs.m(), hs.h), (135, 3));
    }

    #[test]
    fn alphabet_too_small() {
        assert!(matches!(build_hitting(10, 9, 7), Err(Error::AlphabetTooSmall(_))));
        assert!(matches!(build_hitting(10, 2, 6), Err(Error::NotPrimePower(6))));
    }

    #[test]
    fn columns_are_codewords() {
        let hs = build_hitting(30, 2, 7).unwrap();
        let code = hs.code.as_ref().unwrap();
        let words = gvcode::enumerate_codewords(code, 30).unwrap();
        for i in 0..hs.m() {
            for j in 0..hs.n {
                assert_eq!(hs.rows.get(i, j), words[j][i]);
            }
        }
        let (agree, _) = max_column_agreement(&hs.rows);
        assert!(agree <= hs.m() / hs.h as usize);
    }

    #[test]
    fn dense_size_and_branch() {
        let hs = build_dense_hitting(50, 2, 25, Ratio::new(1, 2)).unwrap();
        assert_eq!(hs.h, 6);
        assert_eq!(hs.m(), 101);
        assert!(matches!(
            build_dense_hitting(50, 5, 49, Ratio::new(1, 10)),
            Err(Error::EpsilonInfeasible(_))
        ));
        // (q-1) eps = d+1 exactly
        assert!(build_dense_hitting(12, 1, 5, Ratio::new(1, 2)).is_ok());
    }

    #[test]
    fn dense_with_eps_one_is_plain() {
        let a = build_dense_hitting(12, 2, 7, Ratio::new(1, 1)).unwrap();
        let b = build_hitting(12, 2, 7).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.h, b.h);
    }

    #[test]
    fn small_construction_hits() {
        let hs = build_hitting(8, 2, 5).unwrap();
        let v = verify_hitting(&hs.rows, 2, &mut budget()).unwrap();
        assert!(v.holds(), "{v:?}");
        // all 28 single pairs and 378 pairs of pairs
        assert_eq!(v.checks(), (28 + 378) * hs.m() as u64);
    }

    #[test]
    fn constant_rows_never_hit() {
        let zeros = SymbolMatrix::zeros(1, 5);
        let v = verify_hitting(&zeros, 1, &mut budget()).unwrap();
        assert_eq!(
            v.witness(),
            Some(&Witness::Pairs {
                pairs: vec![(0, 1)],
                hits: 0
            })
        );
        let constants: Vec<Vec<u32>> = (0..5).map(|c| vec![c; 6]).collect();
        let m = SymbolMatrix::from_rows(6, &constants);
        assert!(!verify_hitting(&m, 1, &mut budget()).unwrap().holds());
    }

    #[test]
    fn density_checks() {
        let hs = build_dense_hitting(12, 2, 25, Ratio::new(1, 2)).unwrap();
        assert!(verify_hitting_density(&hs.rows, 2, Ratio::new(1, 2), &mut budget())
            .unwrap()
            .holds());
        assert!(verify_hitting_density(&hs.rows, 2, Ratio::new(1, 1), &mut budget())
            .unwrap()
            .holds());
        let row = SymbolMatrix::from_rows(4, &[vec![0u32, 1, 1, 2]]);
        assert!(!verify_hitting_density(&row, 1, Ratio::new(0, 1), &mut budget())
            .unwrap()
            .holds());
    }

    #[test]
    fn multiplicity_is_ignored() {
        let c = PairConstraint::new(vec![(0, 1), (1, 0), (2, 3)]).unwrap();
        assert_eq!(c.degree(), 3);
        assert_eq!(c.support(), vec![(0, 1), (2, 3)]);
        assert!(c.hits(&[0, 1, 2, 3]));
        assert!(!c.hits(&[0, 1, 2, 2]));
        assert!(PairConstraint::new(vec![(2, 2)]).is_err());
    }

    #[test]
    fn budget_exhaustion() {
        let hs = build_hitting(10, 3, 7).unwrap();
        let mut tiny = ConstraintBudget::new(1000);
        assert!(matches!(
            verify_hitting(&hs.rows, 3, &mut tiny),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
