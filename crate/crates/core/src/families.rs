//! Perfect hash families, cover-free families and separating hash families
//! built from hitting sets.
//!
//! Every builder is deterministic. The verifiers here scan constraints in
//! lexicographic order and report the first violation; the independent
//! reference checks live in [`crate::oracle`].

use std::ops::ControlFlow;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::bounds::{dense_phf_feasibility, g_factor};
use crate::combin::{binomial_u64, for_each_combination, for_each_disjoint_classes, multinomial_count};
use crate::error::{Error, Result};
use crate::gfq::{is_prime_power, next_prime_power, prev_prime_power, FieldSpec};
use crate::hitter::{build_dense_hitting, build_hitting};
use crate::matrix::SymbolMatrix;
use crate::verdict::{ConstraintBudget, Verdict, Witness};

/// Default cap on C(N,d)·Q^d for the greedy inner family.
pub const DEFAULT_GREEDY_BUDGET: u64 = 200_000_000;
/// Largest domain accepted by [`greedy_phf`].
pub const GREEDY_MAX_DOMAIN: usize = 1000;
/// Default cap on the number of colorings in [`build_shf_small_alphabet`].
pub const DEFAULT_COLORING_CAP: u64 = 100_000;

/// m functions [n] → [q], one per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerfectHashFamily {
    pub n: usize,
    pub q: u32,
    pub d: usize,
    pub functions: SymbolMatrix,
    pub dense_eps: Option<Ratio<u64>>,
    /// Order of the field the construction ran over; at most q.
    pub field_order: u32,
    /// Size predicted by the closed form, when there is one.
    pub closed_form_size: Option<usize>,
}

impl PerfectHashFamily {
    pub fn size(&self) -> usize {
        self.functions.rows()
    }
}

/// Binary tests over n items; see [`verify_cff`] for the property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverFreeFamily {
    pub n: usize,
    pub w: usize,
    pub r: usize,
    pub tests: SymbolMatrix,
    pub field_order: Option<u32>,
    pub closed_form_size: Option<usize>,
}

impl CoverFreeFamily {
    pub fn size(&self) -> usize {
        self.tests.rows()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatingHashFamily {
    pub n: usize,
    pub q: u32,
    pub ds: Vec<usize>,
    pub functions: SymbolMatrix,
    pub field_order: Option<u32>,
    pub closed_form_size: Option<usize>,
}

impl SeparatingHashFamily {
    pub fn size(&self) -> usize {
        self.functions.rows()
    }

    pub fn d1(&self) -> usize {
        self.ds.iter().sum()
    }

    pub fn d2(&self) -> usize {
        let ds: Vec<u64> = self.ds.iter().map(|&d| d as u64).collect();
        d2_of(&ds) as usize
    }
}

/// Σ_{i<j} d_i d_j.
pub fn d2_of(ds: &[u64]) -> u64 {
    let total: u64 = ds.iter().sum();
    let squares: u64 = ds.iter().map(|d| d * d).sum();
    (total * total - squares) / 2
}

fn phf_degree(d: usize) -> usize {
    d * d.saturating_sub(1) / 2
}

fn constant_family(n: usize, q: u32, d: usize) -> PerfectHashFamily {
    PerfectHashFamily {
        n,
        q,
        d,
        functions: SymbolMatrix::zeros(1, n),
        dense_eps: None,
        field_order: q,
        closed_form_size: Some(1),
    }
}

/// The largest prime power q' <= q with q' >= floor; q itself when it already is one.
fn usable_alphabet(q: u32, floor: usize) -> Option<u32> {
    let qp = prev_prime_power(q as u64)? as u32;
    (qp as usize >= floor).then_some(qp)
}

/// An (n,q,d)-PHF from a hitting set for the products Π_{a<b in S}(x_a - x_b).
pub fn build_phf(n: usize, q: u32, d: usize) -> Result<PerfectHashFamily> {
    if d == 0 {
        return Err(Error::InvalidParameters("d must be at least 1".into()));
    }
    if n < d {
        return Err(Error::InvalidParameters(format!("need n >= d, got n={n} d={d}")));
    }
    if d == 1 {
        return Ok(constant_family(n, q, d));
    }
    let degree = phf_degree(d);
    let qp = usable_alphabet(q, degree + 2).ok_or_else(|| {
        Error::AlphabetTooSmall(format!(
            "need a prime power q' >= d(d-1)/2 + 2 = {} at or below q = {q}",
            degree + 2
        ))
    })?;
    if qp != q {
        log::info!("q = {q} is not a prime power; building over F_{qp}");
    }
    let hs = build_hitting(n, degree, qp)?;
    Ok(PerfectHashFamily {
        n,
        q,
        d,
        functions: hs.rows,
        dense_eps: None,
        field_order: qp,
        closed_form_size: Some(hs.closed_form_m),
    })
}

/// A (1-ε)-dense (n,q,d)-PHF: every d-subset is separated by more than (1-ε)m functions.
pub fn build_dense_phf(n: usize, q: u32, d: usize, eps: Ratio<u64>) -> Result<PerfectHashFamily> {
    if d == 0 {
        return Err(Error::InvalidParameters("d must be at least 1".into()));
    }
    if n < d {
        return Err(Error::InvalidParameters(format!("need n >= d, got n={n} d={d}")));
    }
    if *eps.numer() == 0 || eps > Ratio::from_integer(1) {
        return Err(Error::InvalidParameters(format!("eps must lie in (0,1], got {eps}")));
    }
    if d == 1 {
        let mut f = constant_family(n, q, d);
        f.dense_eps = Some(eps);
        return Ok(f);
    }
    let degree = phf_degree(d);
    let feas = dense_phf_feasibility(q as u64, d as u64, eps);
    if feas.infeasible {
        return Err(Error::EpsilonInfeasible(format!(
            "eps = {eps} is at most d(d-1)/2q - d^2(d-1)^2/8q^2 = {}; no such family exists",
            feas.threshold
        )));
    }
    let qp = usable_alphabet(q, degree + 2).ok_or_else(|| {
        Error::EpsilonInfeasible(format!(
            "no prime power at or below q = {q} reaches d(d-1)/2 + 2 = {}",
            degree + 2
        ))
    })?;
    let hs = build_dense_hitting(n, degree, qp, eps)?;
    Ok(PerfectHashFamily {
        n,
        q,
        d,
        functions: hs.rows,
        dense_eps: Some(eps),
        field_order: qp,
        closed_form_size: Some(hs.closed_form_m),
    })
}

/// The inner family for small alphabets: polynomials of degree < d over F_Q,
/// Q = q^t >= N, evaluated at the field elements with indices 0..N and reduced
/// to [q] by taking the index modulo q (the low base-q digit).
///
/// For distinct points the evaluation vector is uniform over F_Q^d as the
/// polynomial varies, and reduction mod q is balanced, so exactly a g(q,d)
/// fraction of members is injective on any fixed d-subset.
#[derive(Debug, Clone)]
pub struct GreedyFamilySpec {
    pub domain: usize,
    pub q: u32,
    pub d: usize,
    pub t: u32,
    pub big_q: u32,
    field: FieldSpec,
}

impl GreedyFamilySpec {
    pub fn new(domain: usize, q: u32, d: usize) -> Result<Self> {
        if is_prime_power(q as u64).is_none() {
            return Err(Error::NotPrimePower(q as u64));
        }
        if d == 0 || domain < d {
            return Err(Error::InvalidParameters(format!(
                "need 1 <= d <= N, got N={domain} d={d}"
            )));
        }
        let mut t = 1u32;
        let mut big_q = q as u64;
        while big_q < domain as u64 {
            big_q *= q as u64;
            t += 1;
        }
        if big_q > u32::MAX as u64 {
            return Err(Error::Overflow(format!("Q = {q}^{t} is too large")));
        }
        let field = FieldSpec::new(big_q)?;
        Ok(GreedyFamilySpec {
            domain,
            q,
            d,
            t,
            big_q: big_q as u32,
            field,
        })
    }

    /// Q^d.
    pub fn member_count(&self) -> u64 {
        (self.big_q as u64).saturating_pow(self.d as u32)
    }

    /// Coefficients (c_0, ..., c_{d-1}) of member `idx`; members are ordered
    /// lexicographically with c_0 most significant.
    pub fn coefficients(&self, mut idx: u64) -> Vec<u32> {
        let mut c = vec![0u32; self.d];
        for slot in c.iter_mut().rev() {
            *slot = (idx % self.big_q as u64) as u32;
            idx /= self.big_q as u64;
        }
        c
    }

    /// Values of member `idx` on the domain, in [q].
    pub fn evaluate(&self, idx: u64) -> Vec<u32> {
        let c = self.coefficients(idx);
        (0..self.domain as u32)
            .map(|x| {
                let mut acc = 0u32;
                for &ci in c.iter().rev() {
                    acc = self.field.add_raw(self.field.mul_raw(acc, x), ci);
                }
                acc % self.q
            })
            .collect()
    }
}

/// ⌈ln C(N,d) / -ln(1 - g(q,d))⌉, at least 1; the greedy size guarantee.
pub fn greedy_size_bound(domain: usize, q: u32, d: usize) -> Option<usize> {
    let g = g_factor(q as u64, d as u64).to_f64()?;
    if g <= 0.0 {
        return None;
    }
    if g >= 1.0 {
        return Some(1);
    }
    let subsets = binomial_u64(domain as u64, d as u64) as f64;
    Some(((subsets.ln() / -(1.0 - g).ln()).ceil() as usize).max(1))
}

fn injective(vals: &[u32]) -> bool {
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            if vals[i] == vals[j] {
                return false;
            }
        }
    }
    true
}

/// A (N,q,d)-PHF chosen greedily from [`GreedyFamilySpec`]: repeatedly take the
/// member separating the most still-unseparated d-subsets (earliest on ties).
pub fn greedy_phf(domain: usize, q: u32, d: usize, budget: u64) -> Result<PerfectHashFamily> {
    if domain > GREEDY_MAX_DOMAIN {
        return Err(Error::BudgetExceeded {
            needed: domain as u64,
            limit: GREEDY_MAX_DOMAIN as u64,
        });
    }
    let spec = GreedyFamilySpec::new(domain, q, d)?;
    if d > q as usize {
        return Err(Error::Infeasible(format!("no function into [{q}] is injective on {d} points")));
    }
    let subsets_n = binomial_u64(domain as u64, d as u64);
    let work = subsets_n.saturating_mul(spec.member_count());
    if work > budget {
        return Err(Error::BudgetExceeded {
            needed: work,
            limit: budget,
        });
    }
    let mut subsets: Vec<usize> = Vec::with_capacity(subsets_n as usize * d);
    let _ = for_each_combination::<()>(domain, d, |c| {
        subsets.extend_from_slice(c);
        ControlFlow::Continue(())
    });
    let count = subsets_n as usize;
    let words = count.div_ceil(64);
    let members = spec.member_count() as usize;
    let mut values = Vec::with_capacity(members);
    let mut cover = vec![0u64; members * words];
    let mut scratch = vec![0u32; d];
    for idx in 0..members {
        let v = spec.evaluate(idx as u64);
        let bits = &mut cover[idx * words..(idx + 1) * words];
        for (s, subset) in subsets.chunks_exact(d).enumerate() {
            for (slot, &x) in scratch.iter_mut().zip(subset) {
                *slot = v[x];
            }
            if injective(&scratch) {
                bits[s / 64] |= 1 << (s % 64);
            }
        }
        values.push(v);
    }

    let mut uncovered = vec![u64::MAX; words];
    if count % 64 != 0 {
        uncovered[words - 1] = (1u64 << (count % 64)) - 1;
    }
    let mut remaining = count;
    let mut chosen = Vec::new();
    while remaining > 0 {
        let mut best = (0usize, 0usize);
        for idx in 0..members {
            let bits = &cover[idx * words..(idx + 1) * words];
            let gain: usize = bits
                .iter()
                .zip(&uncovered)
                .map(|(a, b)| (a & b).count_ones() as usize)
                .sum();
            if gain > best.1 {
                best = (idx, gain);
            }
        }
        if best.1 == 0 {
            return Err(Error::Infeasible("greedy cover stalled".into()));
        }
        let bits = &cover[best.0 * words..(best.0 + 1) * words];
        for (u, b) in uncovered.iter_mut().zip(bits) {
            *u &= !b;
        }
        remaining -= best.1;
        chosen.push(best.0);
    }
    let functions = SymbolMatrix::from_rows(domain, &chosen.iter().map(|&i| values[i].clone()).collect::<Vec<_>>());
    let bound = greedy_size_bound(domain, q, d);
    debug_assert!(bound.map_or(true, |b| functions.rows() <= b));
    Ok(PerfectHashFamily {
        n: domain,
        q,
        d,
        functions,
        dense_eps: None,
        field_order: spec.big_q,
        closed_form_size: bound,
    })
}

/// For q <= d^2: compose a PHF into [q1], q1 = next prime power >= d^3, with a
/// greedy (q1,q,d)-PHF. Larger q delegates to [`build_phf`].
pub fn build_phf_small_d(n: usize, q: u32, d: usize) -> Result<PerfectHashFamily> {
    if is_prime_power(q as u64).is_none() {
        return Err(Error::NotPrimePower(q as u64));
    }
    if (q as usize) > d * d {
        return build_phf(n, q, d);
    }
    let ln_n = (n as f64).ln();
    if d as f64 > ln_n / (8.0 * ln_n.ln()) {
        log::warn!("d = {d} exceeds log n / (8 log log n) for n = {n}; proceeding within the greedy budget");
    }
    let q1 = next_prime_power((d * d * d) as u64) as u32;
    let outer = build_phf(n, q1, d)?;
    let inner = greedy_phf(q1 as usize, q, d, DEFAULT_GREEDY_BUDGET)?;
    let mut functions = SymbolMatrix::zeros(0, n);
    let mut row = vec![0u32; n];
    for h1 in outer.functions.iter_rows() {
        for h2 in inner.functions.iter_rows() {
            for (o, &x) in row.iter_mut().zip(h1) {
                *o = h2[x as usize];
            }
            functions.push_row(&row);
        }
    }
    Ok(PerfectHashFamily {
        n,
        q,
        d,
        functions,
        dense_eps: None,
        field_order: q,
        closed_form_size: outer
            .closed_form_size
            .zip(inner.closed_form_size)
            .map(|(a, b)| a * b),
    })
}

/// The (q,(w,r))-CFF {χ_R : R ⊆ [q], |R| = w}, R in lexicographic order.
pub fn chi_family(q: u32, w: usize) -> CoverFreeFamily {
    let mut tests = SymbolMatrix::zeros(0, q as usize);
    let _ = for_each_combination::<()>(q as usize, w, |set| {
        let mut row = vec![0u32; q as usize];
        for &x in set {
            row[x] = 1;
        }
        tests.push_row(&row);
        ControlFlow::Continue(())
    });
    CoverFreeFamily {
        n: q as usize,
        w,
        r: (q as usize).saturating_sub(w),
        tests,
        field_order: None,
        closed_form_size: Some(binomial_u64(q as u64, w as u64) as usize),
    }
}

/// Tests f∘b for every row b of the hitting set and every inner test f.
pub fn compose_cff(inner: &CoverFreeFamily, w: usize, r: usize, hs_rows: &SymbolMatrix, hs_q: u32, hs_degree: usize) -> Result<CoverFreeFamily> {
    if inner.n != hs_q as usize {
        return Err(Error::InvalidParameters(format!(
            "inner family has domain {} but the hitting set alphabet is {hs_q}",
            inner.n
        )));
    }
    if hs_degree < w * r {
        return Err(Error::DegreeMismatch(format!(
            "hitting set degree {hs_degree} is below wr = {}",
            w * r
        )));
    }
    let n = hs_rows.cols();
    let mut tests = SymbolMatrix::zeros(0, n);
    let mut out = vec![0u32; n];
    for b in hs_rows.iter_rows() {
        for f in inner.tests.iter_rows() {
            for (o, &x) in out.iter_mut().zip(b) {
                *o = f[x as usize];
            }
            tests.push_row(&out);
        }
    }
    Ok(CoverFreeFamily {
        n,
        w,
        r,
        closed_form_size: Some(tests.rows()),
        tests,
        field_order: Some(hs_q),
    })
}

/// Alphabet for [`build_cff`]: next prime power >= max(wr+2, ⌈c·max(wr, w+r)⌉).
pub fn cff_alphabet(w: usize, r: usize, qmult: Ratio<u64>) -> u32 {
    let base = (w * r).max(w + r) as u64;
    let scaled = (base * qmult.numer()).div_ceil(*qmult.denom());
    next_prime_power(scaled.max((w * r + 2) as u64)) as u32
}

/// An (n,(w,r))-CFF of size C(q,w)·|S| with S a hitting set for degree wr.
pub fn build_cff(n: usize, w: usize, r: usize, qmult: Ratio<u64>) -> Result<CoverFreeFamily> {
    if w == 0 || r == 0 {
        return Err(Error::InvalidParameters("w and r must be at least 1".into()));
    }
    if n <= w + r {
        return Err(Error::InvalidParameters(format!("need n > w + r = {}", w + r)));
    }
    if qmult < Ratio::from_integer(1) {
        return Err(Error::InvalidParameters(format!("qmult must be at least 1, got {qmult}")));
    }
    let q = cff_alphabet(w, r, qmult);
    let hs = build_hitting(n, w * r, q)?;
    let inner = chi_family(q, w);
    let mut cff = compose_cff(&inner, w, r, &hs.rows, q, hs.degree)?;
    cff.closed_form_size = Some(binomial_u64(q as u64, w as u64) as usize * hs.closed_form_m);
    Ok(cff)
}

fn check_ds(ds: &[usize]) -> Result<()> {
    if ds.is_empty() || ds.contains(&0) {
        return Err(Error::InvalidParameters("class sizes must be positive".into()));
    }
    Ok(())
}

/// An SHF whose functions are the rows of a hitting set for degree D2 over
/// F_{q'}, q' the largest prime power <= q with q' >= D2 + 2.
pub fn build_shf(n: usize, q: u32, ds: &[usize]) -> Result<SeparatingHashFamily> {
    check_ds(ds)?;
    let d1: usize = ds.iter().sum();
    if n < d1 {
        return Err(Error::InvalidParameters(format!("need n >= D1 = {d1}")));
    }
    if ds.len() == 1 {
        return Ok(SeparatingHashFamily {
            n,
            q,
            ds: ds.to_vec(),
            functions: SymbolMatrix::zeros(1, n),
            field_order: None,
            closed_form_size: Some(1),
        });
    }
    let d2 = d2_of(&ds.iter().map(|&d| d as u64).collect::<Vec<_>>()) as usize;
    let qp = usable_alphabet(q, d2 + 2).ok_or_else(|| {
        Error::InsufficientAlphabet(format!(
            "no prime power q' with D2 + 2 = {} <= q' <= q = {q}",
            d2 + 2
        ))
    })?;
    let hs = build_hitting(n, d2, qp)?;
    Ok(SeparatingHashFamily {
        n,
        q,
        ds: ds.to_vec(),
        functions: hs.rows,
        field_order: Some(qp),
        closed_form_size: Some(hs.closed_form_m),
    })
}

/// An SHF into exactly r = |ds| symbols: hitting-set rows over F_{q'},
/// q' = next prime power >= 2·D2 + 2, composed with every coloring that sends
/// disjoint designated sets R_i (|R_i| = d_i) to color i and the rest to color 0.
pub fn build_shf_small_alphabet(n: usize, ds: &[usize], cap: u64) -> Result<SeparatingHashFamily> {
    check_ds(ds)?;
    let r = ds.len();
    if r < 2 {
        return Err(Error::InvalidParameters("need at least two classes".into()));
    }
    let d1: usize = ds.iter().sum();
    if n < d1 {
        return Err(Error::InvalidParameters(format!("need n >= D1 = {d1}")));
    }
    let ds64: Vec<u64> = ds.iter().map(|&d| d as u64).collect();
    let d2 = d2_of(&ds64) as usize;
    let qp = next_prime_power((2 * d2 + 2) as u64) as u32;
    let colorings = multinomial_count(qp as u64, &ds64);
    let count = colorings.to_u64().unwrap_or(u64::MAX);
    if colorings.is_zero() {
        return Err(Error::InsufficientAlphabet(format!("F_{qp} has fewer than D1 = {d1} elements")));
    }
    if count > cap {
        return Err(Error::BudgetExceeded {
            needed: count,
            limit: cap,
        });
    }
    let hs = build_hitting(n, d2, qp)?;
    let mut inner: Vec<Vec<u32>> = Vec::with_capacity(count as usize);
    let _ = for_each_disjoint_classes::<()>(qp as usize, ds, |classes| {
        let mut color = vec![0u32; qp as usize];
        for (i, class) in classes.iter().enumerate() {
            for &x in class {
                color[x] = i as u32;
            }
        }
        inner.push(color);
        ControlFlow::Continue(())
    });
    let mut functions = SymbolMatrix::zeros(0, n);
    let mut out = vec![0u32; n];
    for b in hs.rows.iter_rows() {
        for f in &inner {
            for (o, &x) in out.iter_mut().zip(b) {
                *o = f[x as usize];
            }
            functions.push_row(&out);
        }
    }
    let predicted = BigUint::from(hs.closed_form_m) * colorings;
    Ok(SeparatingHashFamily {
        n,
        q: r as u32,
        ds: ds.to_vec(),
        functions,
        field_order: Some(qp),
        closed_form_size: predicted.to_usize(),
    })
}

fn finish(start: u64, budget: &ConstraintBudget, witness: Option<Witness>) -> Verdict {
    let checks = budget.elapsed() - start;
    match witness {
        None => Verdict::Holds { checks },
        Some(witness) => Verdict::Violated { witness, checks },
    }
}

/// Scans rows until `good` holds, charging one check per row examined.
fn first_good_row(
    rows: &SymbolMatrix,
    budget: &mut ConstraintBudget,
    mut good: impl FnMut(&[u32]) -> bool,
) -> Result<bool> {
    for (i, row) in rows.iter_rows().enumerate() {
        if good(row) {
            budget.charge(i as u64 + 1)?;
            return Ok(true);
        }
    }
    budget.charge(rows.rows() as u64)?;
    Ok(false)
}

fn run<B>(flow: ControlFlow<Result<B>>) -> Result<Option<B>> {
    match flow {
        ControlFlow::Continue(()) => Ok(None),
        ControlFlow::Break(r) => r.map(Some),
    }
}

/// Every d-subset of [n] has a function injective on it.
pub fn verify_phf(functions: &SymbolMatrix, d: usize, budget: &mut ConstraintBudget) -> Result<Verdict> {
    let start = budget.elapsed();
    let n = functions.cols();
    budget.require(binomial_u64(n as u64, d as u64))?;
    let mut vals = vec![0u32; d];
    let witness = run(for_each_combination(n, d, |s| {
        match first_good_row(functions, budget, |row| {
            for (v, &x) in vals.iter_mut().zip(s) {
                *v = row[x];
            }
            injective(&vals)
        }) {
            Ok(true) => ControlFlow::Continue(()),
            Ok(false) => ControlFlow::Break(Ok(Witness::Subset {
                items: s.to_vec(),
                hits: 0,
            })),
            Err(e) => ControlFlow::Break(Err(e)),
        }
    }))?;
    Ok(finish(start, budget, witness))
}

/// Every d-subset has strictly more than (1-ε)m injective functions.
pub fn verify_phf_density(
    functions: &SymbolMatrix,
    d: usize,
    eps: Ratio<u64>,
    budget: &mut ConstraintBudget,
) -> Result<Verdict> {
    let start = budget.elapsed();
    let n = functions.cols();
    let m = functions.rows() as u128;
    let (num, den) = (*eps.numer() as u128, *eps.denom() as u128);
    if num > den {
        return Err(Error::InvalidParameters(format!("eps must lie in [0,1], got {eps}")));
    }
    let need = |hits: usize| hits as u128 * den > (den - num) * m;
    let per = functions.rows() as u64;
    budget.require(binomial_u64(n as u64, d as u64).saturating_mul(per))?;
    let mut vals = vec![0u32; d];
    let witness = run(for_each_combination(n, d, |s| {
        if let Err(e) = budget.charge(per) {
            return ControlFlow::Break(Err(e));
        }
        let hits = functions
            .iter_rows()
            .filter(|row| {
                for (v, &x) in vals.iter_mut().zip(s) {
                    *v = row[x];
                }
                injective(&vals)
            })
            .count();
        if need(hits) {
            ControlFlow::Continue(())
        } else {
            ControlFlow::Break(Ok(Witness::Subset {
                items: s.to_vec(),
                hits,
            }))
        }
    }))?;
    Ok(finish(start, budget, witness))
}

/// For all disjoint J (|J| = w) and K (|K| = r) some test is 1 on J and 0 on K.
pub fn verify_cff(tests: &SymbolMatrix, w: usize, r: usize, budget: &mut ConstraintBudget) -> Result<Verdict> {
    let start = budget.elapsed();
    let n = tests.cols();
    budget.require(
        binomial_u64(n as u64, w as u64).saturating_mul(binomial_u64(n.saturating_sub(w) as u64, r as u64)),
    )?;
    let witness = run(for_each_disjoint_classes(n, &[w, r], |cls| {
        let (ones, zeros) = (&cls[0], &cls[1]);
        match first_good_row(tests, budget, |t| {
            ones.iter().all(|&j| t[j] == 1) && zeros.iter().all(|&k| t[k] == 0)
        }) {
            Ok(true) => ControlFlow::Continue(()),
            Ok(false) => ControlFlow::Break(Ok(Witness::Split {
                ones: ones.clone(),
                zeros: zeros.clone(),
            })),
            Err(e) => ControlFlow::Break(Err(e)),
        }
    }))?;
    Ok(finish(start, budget, witness))
}

/// For all pairwise disjoint C_1..C_r with |C_i| = d_i some function has
/// pairwise disjoint images f(C_1), ..., f(C_r).
pub fn verify_shf(functions: &SymbolMatrix, ds: &[usize], budget: &mut ConstraintBudget) -> Result<Verdict> {
    let start = budget.elapsed();
    let n = functions.cols();
    let ds64: Vec<u64> = ds.iter().map(|&d| d as u64).collect();
    budget.require(multinomial_count(n as u64, &ds64).to_u64().unwrap_or(u64::MAX))?;
    let witness = run(for_each_disjoint_classes(n, ds, |classes| {
        match first_good_row(functions, budget, |row| separates(row, classes)) {
            Ok(true) => ControlFlow::Continue(()),
            Ok(false) => ControlFlow::Break(Ok(Witness::Classes(classes.to_vec()))),
            Err(e) => ControlFlow::Break(Err(e)),
        }
    }))?;
    Ok(finish(start, budget, witness))
}

fn separates(row: &[u32], classes: &[Vec<usize>]) -> bool {
    for i in 0..classes.len() {
        for j in i + 1..classes.len() {
            for &a in &classes[i] {
                for &b in &classes[j] {
                    if row[a] == row[b] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> ConstraintBudget {
        ConstraintBudget::new(100_000_000)
    }

    #[test]
    fn phf_sizes() {
        let f = build_phf(100, 17, 3).unwrap();
        assert_eq!(f.size(), 67);
        assert_eq!(f.field_order, 17);
        let f = build_phf(30, 17, 3).unwrap();
        assert_eq!(f.size(), 57);
        assert!(verify_phf(&f.functions, 3, &mut budget()).unwrap().holds());
    }

    #[test]
    fn phf_alphabet_boundary() {
        assert!(build_phf(50, 8, 4).is_ok());
        assert!(matches!(build_phf(50, 7, 4), Err(Error::AlphabetTooSmall(_))));
        assert!(matches!(build_phf(10, 7, 4), Err(Error::AlphabetTooSmall(_))));
    }

    #[test]
    fn phf_non_prime_power_alphabet() {
        // 18 -> 17
        let a = build_phf(40, 18, 3).unwrap();
        let b = build_phf(40, 17, 3).unwrap();
        assert_eq!(a.functions, b.functions);
        assert_eq!((a.q, a.field_order), (18, 17));
    }

    #[test]
    fn phf_d1_is_one_constant() {
        let f = build_phf(10, 5, 1).unwrap();
        assert_eq!(f.size(), 1);
        assert!(verify_phf(&f.functions, 1, &mut budget()).unwrap().holds());
    }

    #[test]
    fn dense_phf() {
        let f = build_dense_phf(30, 9, 2, Ratio::new(1, 2)).unwrap();
        assert_eq!(f.size(), 231);
        assert!(verify_phf_density(&f.functions, 2, Ratio::new(1, 2), &mut budget())
            .unwrap()
            .holds());
        assert!(matches!(
            build_dense_phf(30, 13, 4, Ratio::new(1, 100)),
            Err(Error::EpsilonInfeasible(_))
        ));
        let plain = build_phf(30, 17, 3).unwrap();
        let dense = build_dense_phf(30, 17, 3, Ratio::new(1, 1)).unwrap();
        assert_eq!(plain.functions, dense.functions);
    }

    #[test]
    fn greedy_examples() {
        let f = greedy_phf(8, 3, 3, DEFAULT_GREEDY_BUDGET).unwrap();
        assert!(f.size() <= 17);
        assert_eq!(greedy_size_bound(8, 3, 3), Some(17));
        assert!(verify_phf(&f.functions, 3, &mut budget()).unwrap().holds());

        let f = greedy_phf(4, 2, 2, DEFAULT_GREEDY_BUDGET).unwrap();
        assert!(f.size() <= 3);
        assert!(verify_phf(&f.functions, 2, &mut budget()).unwrap().holds());

        let f = greedy_phf(5, 5, 3, DEFAULT_GREEDY_BUDGET).unwrap();
        assert_eq!(f.size(), 1);
    }

    #[test]
    fn greedy_family_is_d_wise_uniform() {
        // fraction of members injective on a fixed subset equals g(q,d)
        let spec = GreedyFamilySpec::new(9, 3, 2).unwrap();
        assert_eq!((spec.t, spec.big_q), (2, 9));
        let good = (0..spec.member_count())
            .filter(|&i| {
                let v = spec.evaluate(i);
                v[2] != v[7]
            })
            .count();
        assert_eq!(good as u64 * 3, spec.member_count() * 2);
    }

    #[test]
    fn greedy_budget() {
        assert!(matches!(
            greedy_phf(27, 3, 3, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn small_d_composition() {
        let f = build_phf_small_d(16, 2, 2).unwrap();
        assert!(verify_phf(&f.functions, 2, &mut budget()).unwrap().holds());
        let a = build_phf_small_d(100, 17, 3).unwrap();
        let b = build_phf(100, 17, 3).unwrap();
        assert_eq!(a.functions, b.functions);
    }

    #[test]
    fn cff_sizes() {
        assert_eq!(cff_alphabet(1, 2, Ratio::from_integer(2)), 7);
        assert_eq!(cff_alphabet(2, 2, Ratio::from_integer(2)), 8);
        let c = build_cff(20, 1, 2, Ratio::from_integer(2)).unwrap();
        assert_eq!(c.size(), 945);
        assert!(verify_cff(&c.tests, 1, 2, &mut budget()).unwrap().holds());
        assert!(matches!(
            build_cff(20, 0, 2, Ratio::from_integer(2)),
            Err(Error::InvalidParameters(_))
        ));
    }

    #[test]
    fn compose_checks() {
        let hs = build_hitting(12, 2, 7).unwrap();
        let inner = chi_family(7, 1);
        let c = compose_cff(&inner, 1, 2, &hs.rows, 7, hs.degree).unwrap();
        assert_eq!(c.size(), 7 * hs.m());
        assert!(matches!(
            compose_cff(&inner, 2, 2, &hs.rows, 7, hs.degree),
            Err(Error::DegreeMismatch(_))
        ));
        let wrong = chi_family(5, 1);
        assert!(compose_cff(&wrong, 1, 2, &hs.rows, 7, hs.degree).is_err());
    }

    #[test]
    fn composing_a_broken_inner_family_is_caught() {
        // a single injective row leaves the inner family no slack
        let rows = SymbolMatrix::from_rows(7, &[vec![0u32, 1, 2, 3, 4, 5, 6]]);
        let mut inner = chi_family(7, 1);
        assert!(verify_cff(&compose_cff(&inner, 1, 2, &rows, 7, 2).unwrap().tests, 1, 2, &mut budget())
            .unwrap()
            .holds());
        inner.tests.set(3, 3, 0);
        let c = compose_cff(&inner, 1, 2, &rows, 7, 2).unwrap();
        let doc = crate::drf::DrfDocument::from_cff(&c);
        let slow = crate::oracle::oracle_check_document(&doc, 10_000_000).unwrap();
        let fast = verify_cff(&c.tests, 1, 2, &mut budget()).unwrap();
        assert!(!slow.holds);
        assert!(!fast.holds());
    }

    #[test]
    fn identity_tests_are_cover_free() {
        let id = SymbolMatrix::from_rows(3, &[vec![1u32, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert!(verify_cff(&id, 1, 1, &mut budget()).unwrap().holds());
    }

    #[test]
    fn shf_examples() {
        let s = build_shf(15, 5, &[1, 2]).unwrap();
        assert_eq!(s.size(), 211);
        let v = verify_shf(&s.functions, &[1, 2], &mut budget()).unwrap();
        assert!(v.holds());
        let one = build_shf(10, 5, &[3]).unwrap();
        assert_eq!(one.size(), 1);
        assert!(matches!(build_shf(10, 4, &[2, 2]), Err(Error::InsufficientAlphabet(_))));
        let constants = SymbolMatrix::from_rows(6, &[vec![0u32; 6], vec![1; 6]]);
        assert!(!verify_shf(&constants, &[1, 1], &mut budget()).unwrap().holds());
    }

    #[test]
    fn shf_small_alphabet_counts() {
        let s = build_shf_small_alphabet(10, &[1, 1], DEFAULT_COLORING_CAP).unwrap();
        assert_eq!(s.field_order, Some(4));
        assert_eq!(s.size() % 12, 0);
        assert!(verify_shf(&s.functions, &[1, 1], &mut budget()).unwrap().holds());
        let s = build_shf_small_alphabet(10, &[1, 2], DEFAULT_COLORING_CAP).unwrap();
        assert_eq!(s.field_order, Some(7));
        // 7!/(1! 2! 4!) = 105
        assert_eq!(s.size() % 105, 0);
        assert!(s.functions.max_symbol().unwrap() <= 1);
        assert!(verify_shf(&s.functions, &[1, 2], &mut budget()).unwrap().holds());
        assert!(matches!(
            build_shf_small_alphabet(10, &[1, 2], 50),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn d2_values() {
        assert_eq!(d2_of(&[1, 2]), 2);
        assert_eq!(d2_of(&[1, 1, 1]), 3);
        assert_eq!(d2_of(&[2, 3, 4]), 6 + 8 + 12);
    }
}
