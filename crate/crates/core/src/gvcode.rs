//! Deterministic construction of linear codes meeting the Gilbert–Varshamov bound.
//!
//! The generator columns v_1..v_k live in F_q^m. v_1 is the all-ones vector and
//! the remaining columns are fixed one symbol at a time by the method of
//! conditional expectations. Only normalized codewords (message whose first
//! nonzero coefficient is 1) are tracked: every nonzero codeword is a scalar
//! multiple of one of them, so their minimum weight is the code's.
//!
//! A codeword is *bad* when it has at least `m - ⌈δm⌉ + 1` zero positions. The
//! pessimistic estimator is the exact conditional expected number of bad
//! normalized codewords, computed with integer binomial tails
//! `A[N][s] = q^N · P[Bin(N, 1/q) >= s]`, so comparisons never round.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};

use crate::bounds::entropy_q;
use crate::error::{Error, Result};
use crate::gfq::{is_prime_power, FieldSpec};
use crate::verdict::{ConstraintBudget, Verdict, Witness};

/// Forced length increases stop at this multiple of the closed-form length.
pub const LENGTH_CAP_FACTOR: usize = 4;
/// Default limit on codeword evaluations in [`min_weight_bruteforce`].
pub const DEFAULT_WEIGHT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeParams {
    pub q: u32,
    /// Code length.
    pub m: usize,
    /// Dimension.
    pub k: usize,
    /// Relative distance; codewords must have weight at least ⌈δm⌉.
    pub delta: Ratio<u64>,
    /// Distance parameter with δ = 1 - 1/h, when the code came from a closed form.
    pub h: Option<u32>,
    /// Number of distinct nonzero codewords the caller needs.
    pub n: u64,
    /// The length given by the closed form before any estimator-forced increase.
    pub closed_form_m: usize,
}

impl CodeParams {
    /// Parameters given directly rather than through a closed form.
    pub fn explicit(q: u32, m: usize, k: usize, delta: Ratio<u64>) -> Result<Self> {
        check_field_order(q)?;
        if k == 0 || m == 0 {
            return Err(Error::InvalidParameters("m and k must be positive".into()));
        }
        if delta > Ratio::one() {
            return Err(Error::InvalidParameters("delta must lie in [0,1]".into()));
        }
        let n = (q as u64).checked_pow(k as u32).map_or(u64::MAX, |x| x - 1);
        Ok(CodeParams {
            q,
            m,
            k,
            delta,
            h: None,
            n,
            closed_form_m: m,
        })
    }

    /// ⌈δm⌉, the minimum acceptable codeword weight.
    pub fn required_weight(&self) -> usize {
        let num = *self.delta.numer() as u128 * self.m as u128;
        let den = *self.delta.denom() as u128;
        num.div_ceil(den) as usize
    }

    /// Number of zero positions that makes a codeword bad.
    pub fn bad_zeros(&self) -> usize {
        self.m - self.required_weight() + 1
    }

    /// (q^k - 1)/(q - 1).
    pub fn normalized_count(&self) -> BigUint {
        let q = BigUint::from(self.q);
        (q.pow(self.k as u32) - 1u32) / (self.q - 1)
    }

    pub fn with_length(&self, m: usize) -> Self {
        CodeParams { m, ..self.clone() }
    }
}

fn check_field_order(q: u32) -> Result<()> {
    if is_prime_power(q as u64).is_none() {
        return Err(Error::NotPrimePower(q as u64));
    }
    Ok(())
}

/// Smallest k with q^k >= n + 1, i.e. ⌈log(n+1)/log q⌉ without rounding error.
pub fn dimension_for(q: u32, n: u64) -> usize {
    let target = n as u128 + 1;
    let mut k = 0;
    let mut power = 1u128;
    while power < target {
        power *= q as u128;
        k += 1;
    }
    k.max(1)
}

fn delta_for(h: u32) -> Ratio<u64> {
    Ratio::new(h as u64 - 1, h as u64)
}

/// ⌈h ln(q(n+1)) / (ln q - ln h - 1)⌉.
pub fn spcode_length(q: u32, h: u32, n: u64) -> usize {
    let (qf, hf) = (q as f64, h as f64);
    let m = hf * (qf * (n as f64 + 1.0)).ln() / (qf.ln() - hf.ln() - 1.0);
    m.ceil() as usize
}

/// ⌈4(q-1)^2 h ln(q(n+1)) / (q-h)^2⌉.
pub fn spcode2_length(q: u32, h: u32, n: u64) -> usize {
    let (qf, hf) = (q as f64, h as f64);
    let m = 4.0 * (qf - 1.0).powi(2) * hf * (qf * (n as f64 + 1.0)).ln() / (qf - hf).powi(2);
    m.ceil() as usize
}

fn closed_form(q: u32, h: u32, n: u64, m: usize) -> Result<CodeParams> {
    if n == 0 {
        return Err(Error::InvalidParameters("n must be at least 1".into()));
    }
    Ok(CodeParams {
        q,
        m,
        k: dimension_for(q, n),
        delta: delta_for(h),
        h: Some(h),
        n,
        closed_form_m: m,
    })
}

/// Parameters for the small-distance regime 1 < h < q/4.
pub fn spcode_params(q: u32, h: u32, n: u64) -> Result<CodeParams> {
    check_field_order(q)?;
    if h < 2 || 4 * h >= q {
        return Err(Error::RegimeViolation(format!(
            "need 1 < h < q/4, got h={h} q={q}"
        )));
    }
    closed_form(q, h, n, spcode_length(q, h, n))
}

/// Parameters for the large-distance regime q/4 <= h <= q - 1.
pub fn spcode2_params(q: u32, h: u32, n: u64) -> Result<CodeParams> {
    check_field_order(q)?;
    if h < 2 || 4 * h < q || h > q - 1 {
        return Err(Error::RegimeViolation(format!(
            "need q/4 <= h <= q-1 and h >= 2, got h={h} q={q}"
        )));
    }
    closed_form(q, h, n, spcode2_length(q, h, n))
}

/// Picks whichever closed form applies to (q, h).
pub fn code_params(q: u32, h: u32, n: u64) -> Result<CodeParams> {
    if 4 * h < q {
        spcode_params(q, h, n)
    } else {
        spcode2_params(q, h, n)
    }
}

/// Whether k <= (1 - H_q(δ)) m, the rate condition of the GV bound.
/// Always false for δ > 1 - 1/q, where H_q stops increasing and the bound says nothing.
pub fn gv_condition(params: &CodeParams) -> bool {
    if params.delta * Ratio::from_integer(params.q as u64) > Ratio::from_integer(params.q as u64 - 1) {
        return false;
    }
    let delta = *params.delta.numer() as f64 / *params.delta.denom() as f64;
    match entropy_q(params.q as u64, delta) {
        Ok(h) => params.k as f64 <= (1.0 - h) * params.m as f64,
        Err(_) => false,
    }
}

/// `q^N · P[Bin(N, 1/q) >= s] = Σ_{j>=s} C(N,j)(q-1)^{N-j}`.
pub fn tail_numerator(q: u32, n: usize, s: usize) -> BigUint {
    tail_row(q, n, s)[s].clone()
}

/// Row `A[N][0..=max_s]` by direct summation.
fn tail_row(q: u32, n: usize, max_s: usize) -> Vec<BigUint> {
    // terms[j] = C(N,j)(q-1)^{N-j}
    let mut terms = Vec::with_capacity(n + 1);
    let qm1 = BigUint::from(q - 1);
    let mut binom = BigUint::one();
    let powers: Vec<BigUint> = {
        let mut p = Vec::with_capacity(n + 1);
        let mut acc = BigUint::one();
        for _ in 0..=n {
            p.push(acc.clone());
            acc *= &qm1;
        }
        p
    };
    for j in 0..=n {
        terms.push(&binom * &powers[n - j]);
        binom = binom * (n - j) / (j + 1);
    }
    let mut row = vec![BigUint::zero(); max_s + 1];
    let mut suffix = BigUint::zero();
    for j in (0..=n).rev() {
        suffix += &terms[j];
        if j <= max_s {
            row[j] = suffix.clone();
        }
    }
    row
}

/// Conditional tail probabilities for the estimator, one row at a time.
///
/// Holds `A[N][0..=max_s]` and steps N down by one using
/// `A[N][s] = A[N-1][s-1] + (q-1) A[N-1][s]`.
struct TailRow {
    q: u32,
    n: usize,
    row: Vec<BigUint>,
}

impl TailRow {
    fn new(q: u32, n: usize, max_s: usize) -> Self {
        TailRow {
            q,
            n,
            row: tail_row(q, n, max_s),
        }
    }

    /// A[N][s] with s clamped at 0 from below.
    fn at(&self, s: isize) -> &BigUint {
        &self.row[s.max(0) as usize]
    }

    fn step_down(&mut self) {
        debug_assert!(self.n > 0);
        let n = self.n - 1;
        let mut next = Vec::with_capacity(self.row.len());
        next.push(BigUint::from(self.q).pow(n as u32));
        for s in 1..self.row.len() {
            let diff = &self.row[s] - &next[s - 1];
            let (quot, rem) = diff.div_rem(&BigUint::from(self.q - 1));
            debug_assert!(rem.is_zero());
            next.push(quot);
        }
        self.row = next;
        self.n = n;
    }
}

/// A linear code given by generator columns, v_1 all-ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    pub field: FieldSpec,
    pub params: CodeParams,
    /// k columns of length m, as element indices.
    pub columns: Vec<Vec<u32>>,
}

impl LinearCode {
    pub fn from_columns(field: FieldSpec, params: CodeParams, columns: Vec<Vec<u32>>) -> Result<Self> {
        if field.order() != params.q {
            return Err(Error::InvalidParameters("field order differs from q".into()));
        }
        if columns.len() != params.k || columns.iter().any(|c| c.len() != params.m) {
            return Err(Error::InvalidParameters("generator shape differs from (m, k)".into()));
        }
        if columns.iter().flatten().any(|&x| x >= params.q) {
            return Err(Error::InvalidParameters("generator entry out of range".into()));
        }
        Ok(LinearCode {
            field,
            params,
            columns,
        })
    }

    /// Σ u_i v_i.
    pub fn codeword(&self, message: &[u32]) -> Vec<u32> {
        let f = &self.field;
        let mut out = vec![0u32; self.params.m];
        for (col, &u) in self.columns.iter().zip(message) {
            if u == 0 {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(col) {
                *o = f.add_raw(*o, f.mul_raw(u, v));
            }
        }
        out
    }

    pub fn weight(word: &[u32]) -> usize {
        word.iter().filter(|&&x| x != 0).count()
    }
}

/// Normalized messages of length k over F_q in lexicographic order
/// (u_1 most significant).
pub fn normalized_messages(q: u32, k: usize) -> impl Iterator<Item = Vec<u32>> {
    // A normalized message is 0^f 1 w with w arbitrary; more leading zeros sort first.
    (0..k).rev().flat_map(move |f| {
        let tail_len = k - f - 1;
        let count = (q as u64).pow(tail_len as u32);
        (0..count).map(move |mut t| {
            let mut msg = vec![0u32; k];
            msg[f] = 1;
            for slot in msg[f + 1..].iter_mut().rev() {
                *slot = (t % q as u64) as u32;
                t /= q as u64;
            }
            msg
        })
    })
}

/// Normalized messages whose highest nonzero coordinate is `top` (0-based),
/// in lexicographic order.
fn messages_with_top(q: u32, k: usize, top: usize) -> Vec<Vec<u32>> {
    normalized_messages(q, top + 1)
        .filter(|m| m[top] != 0)
        .map(|mut m| {
            m.resize(k, 0);
            m
        })
        .collect()
}

/// What happened during one construction run.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionReport {
    pub closed_form_m: usize,
    pub m: usize,
    /// N_norm · P[Bin(m,1/q) >= bad_zeros], the feasibility quantity.
    pub phi_initial: BigRational,
    /// Estimator value at the end; equals the number of bad normalized codewords.
    pub phi_final: BigRational,
    /// Number of greedy symbol choices.
    pub steps: usize,
    /// Whether Φ never increased across any step.
    pub monotone: bool,
    pub final_bad: usize,
}

impl ConstructionReport {
    pub fn forced_increase(&self) -> bool {
        self.m != self.closed_form_m
    }
}

/// Φ_0 numerator and denominator q^m.
fn initial_phi(params: &CodeParams) -> (BigUint, BigUint) {
    let tail = tail_numerator(params.q, params.m, params.bad_zeros().min(params.m + 1));
    let den = BigUint::from(params.q).pow(params.m as u32);
    (params.normalized_count() * tail, den)
}

/// Whether the estimator starts strictly below one at the given length.
pub fn estimator_feasible(params: &CodeParams) -> bool {
    let (num, den) = initial_phi(params);
    num < den
}

pub fn construct_code(params: &CodeParams) -> Result<LinearCode> {
    construct_code_traced(params).map(|(c, _)| c)
}

/// Builds the code, growing m (up to 4x the closed form) until Φ_0 < 1.
pub fn construct_code_traced(params: &CodeParams) -> Result<(LinearCode, ConstructionReport)> {
    check_field_order(params.q)?;
    if params.k == 0 || params.m == 0 {
        return Err(Error::InvalidParameters("m and k must be positive".into()));
    }
    let field = FieldSpec::new(params.q as u64)?;
    let cap = params.closed_form_m.max(params.m) * LENGTH_CAP_FACTOR;
    let mut p = params.clone();
    while !estimator_feasible(&p) {
        if p.m >= cap {
            return Err(Error::Infeasible(format!(
                "estimator stays >= 1 up to m = {cap} (q={}, k={}, delta={})",
                p.q, p.k, p.delta
            )));
        }
        p.m += 1;
    }
    if p.m != params.m {
        log::warn!(
            "closed-form length {} failed the estimator check; using m = {}",
            params.m,
            p.m
        );
    }
    greedy(field, p, params.closed_form_m)
}

fn greedy(field: FieldSpec, params: CodeParams, closed_form_m: usize) -> Result<(LinearCode, ConstructionReport)> {
    let (q, m, k) = (params.q, params.m, params.k);
    let thr = params.bad_zeros();
    // rows only need s up to thr; thr can exceed m when delta = 0
    let max_s = thr.min(m + 1);
    let thr = thr as isize;

    let (phi0_num, qm) = initial_phi(&params);
    let full_tail = tail_numerator(q, m, max_s);

    let mut columns: Vec<Vec<u32>> = vec![vec![1u32; m]];
    // v_1 is fixed and the all-ones word has no zeros, so it is never bad
    let mut fixed_bad = 0usize;
    let total = params.normalized_count().to_usize().ok_or_else(|| {
        Error::Overflow("too many normalized codewords to track".into())
    })?;
    let mut later = total - 1;

    let mut phi_prev = BigUint::from(fixed_bad) * &qm + BigUint::from(later) * &full_tail;
    let mut monotone = true;
    let mut steps = 0usize;

    for top in 1..k {
        let msgs = messages_with_top(q, k, top);
        later -= msgs.len();
        let partial: Vec<Vec<u32>> = msgs
            .iter()
            .map(|u| {
                let mut acc = vec![0u32; m];
                for (col, &c) in columns.iter().zip(&u[..top]) {
                    if c == 0 {
                        continue;
                    }
                    for (a, &v) in acc.iter_mut().zip(col) {
                        *a = field.add_raw(*a, field.mul_raw(c, v));
                    }
                }
                acc
            })
            .collect();
        let neg_inv: Vec<u32> = msgs
            .iter()
            .map(|u| field.neg_raw(field.inv_raw(u[top])))
            .collect();
        let mut zeros = vec![0isize; msgs.len()];
        let mut column = vec![0u32; m];
        let constant = BigUint::from(fixed_bad) * &qm + BigUint::from(later) * &full_tail;

        let mut tails = TailRow::new(q, m.saturating_sub(1), max_s);
        let mut scale = BigUint::from(q);
        let mut penalty = vec![BigUint::zero(); q as usize];
        for t in 0..m {
            if t > 0 {
                tails.step_down();
                scale *= q;
            }
            for p in penalty.iter_mut() {
                p.set_zero();
            }
            let mut base = BigUint::zero();
            let mut target = Vec::with_capacity(msgs.len());
            for (i, z) in zeros.iter().enumerate() {
                // the unique symbol making this codeword vanish at t
                let s = field.mul_raw(partial[i][t], neg_inv[i]);
                target.push(s);
                let stay = tails.at(thr - z);
                let hit = tails.at(thr - z - 1);
                base += stay;
                penalty[s as usize] += hit - stay;
            }
            let mut best = 0usize;
            for (s, p) in penalty.iter().enumerate().skip(1) {
                if *p < penalty[best] {
                    best = s;
                }
            }
            column[t] = best as u32;
            for (z, &s) in zeros.iter_mut().zip(&target) {
                if s == best as u32 {
                    *z += 1;
                }
            }
            let phi = &constant + &scale * (base + &penalty[best]);
            if phi > phi_prev {
                monotone = false;
            }
            debug_assert!(monotone, "estimator increased at column {top} position {t}");
            phi_prev = phi;
            steps += 1;
        }
        fixed_bad += zeros.iter().filter(|&&z| z >= thr).count();
        columns.push(column);
    }

    let final_bad = fixed_bad;
    let report = ConstructionReport {
        closed_form_m,
        m,
        phi_initial: BigRational::new(phi0_num.into(), qm.clone().into()),
        phi_final: BigRational::new(phi_prev.into(), qm.into()),
        steps,
        monotone,
        final_bad,
    };
    let code = LinearCode {
        field,
        params,
        columns,
    };
    Ok((code, report))
}

/// The first n nonzero codewords: normalized ones in message order, then
/// their multiples λ·c for λ = 2, 3, ... (by element index).
pub fn enumerate_codewords(code: &LinearCode, n: u64) -> Result<Vec<Vec<u32>>> {
    let q = code.params.q;
    let available = (q as u64)
        .checked_pow(code.params.k as u32)
        .map_or(u64::MAX, |x| x - 1);
    if n > available {
        return Err(Error::TooMany {
            requested: n,
            available,
        });
    }
    let n = n as usize;
    let mut out = Vec::with_capacity(n);
    let mut normalized = Vec::new();
    for msg in normalized_messages(q, code.params.k) {
        if out.len() == n {
            return Ok(out);
        }
        let w = code.codeword(&msg);
        out.push(w.clone());
        normalized.push(w);
    }
    'scalars: for lambda in 2..q {
        for w in &normalized {
            if out.len() == n {
                break 'scalars;
            }
            out.push(w.iter().map(|&x| code.field.mul_raw(lambda, x)).collect());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinWeight {
    pub weight: usize,
    /// First normalized message (in lexicographic order) attaining the minimum.
    pub message: Vec<u32>,
    pub evaluations: u64,
}

/// Exact minimum weight by scanning every normalized codeword.
pub fn min_weight_bruteforce(code: &LinearCode, budget: u64) -> Result<MinWeight> {
    let count = code.params.normalized_count().to_u64().unwrap_or(u64::MAX);
    if count > budget {
        return Err(Error::BudgetExceeded {
            needed: count,
            limit: budget,
        });
    }
    let mut best: Option<(usize, Vec<u32>)> = None;
    for msg in normalized_messages(code.params.q, code.params.k) {
        let w = LinearCode::weight(&code.codeword(&msg));
        if best.as_ref().map_or(true, |(b, _)| w < *b) {
            best = Some((w, msg));
        }
    }
    let (weight, message) = best.expect("k >= 1 gives at least one normalized message");
    Ok(MinWeight {
        weight,
        message,
        evaluations: count,
    })
}

/// Every normalized codeword has weight at least ⌈δm⌉; one check per codeword.
/// Reports the first light message in lexicographic order.
pub fn verify_code(code: &LinearCode, budget: &mut ConstraintBudget) -> Result<Verdict> {
    let count = code.params.normalized_count().to_u64().unwrap_or(u64::MAX);
    budget.require(count)?;
    let required = code.params.required_weight();
    let mut checks = 0u64;
    for msg in normalized_messages(code.params.q, code.params.k) {
        budget.charge(1)?;
        checks += 1;
        let weight = LinearCode::weight(&code.codeword(&msg));
        if weight < required {
            return Ok(Verdict::Violated {
                witness: Witness::LightCodeword {
                    message: msg,
                    weight,
                    required,
                },
                checks,
            });
        }
    }
    Ok(Verdict::Holds { checks })
}
