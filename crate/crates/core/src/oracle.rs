//! Brute-force reference checks, kept deliberately naive and separate from
//! the construction and verification code paths.
//!
//! Inputs are DRF texts (or plain matrices), never construction state. The
//! field arithmetic here is its own digit-vector implementation, the code
//! check scans all q^k - 1 messages rather than the normalized ones, and the
//! subset enumerations are written out recursively.

use std::collections::HashSet;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::drf::{self, DrfDocument, Kind};
use crate::error::{Error, Result};
use crate::gfq::is_prime_power;
use crate::matrix::SymbolMatrix;

/// Cap on q^k for [`oracle_min_distance`].
pub const MAX_MESSAGES: u64 = 1_000_000;

/// Result of a brute-force property check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleOutcome {
    pub holds: bool,
    /// The first failing constraint, rendered as text.
    pub counterexample: Option<String>,
    /// Number of constraints examined.
    pub constraints: u64,
}

/// F_q as digit vectors over F_p, reduced by a monic modulus.
struct NaiveField {
    p: u64,
    e: usize,
    /// Modulus coefficients, constant term first, without the leading 1.
    low: Vec<u64>,
}

impl NaiveField {
    fn new(q: u64, modulus: Option<&[u32]>) -> Result<Self> {
        let (p, e) = is_prime_power(q).ok_or(Error::NotPrimePower(q))?;
        let low = match modulus {
            Some(m) if e > 1 => m[1..].iter().rev().map(|&c| c as u64).collect(),
            _ if e > 1 => return Err(Error::InvalidParameters("extension field without modulus".into())),
            _ => Vec::new(),
        };
        Ok(NaiveField { p, e: e as usize, low })
    }

    fn digits(&self, mut x: u64) -> Vec<u64> {
        let mut d = vec![0; self.e];
        for slot in d.iter_mut() {
            *slot = x % self.p;
            x /= self.p;
        }
        d
    }

    fn index(&self, d: &[u64]) -> u64 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        let (x, y) = (self.digits(a), self.digits(b));
        let s: Vec<u64> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.index(&s)
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        let (x, y) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * self.e];
        for (i, u) in x.iter().enumerate() {
            for (j, v) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u * v) % self.p;
            }
        }
        // x^e = -(low), applied from the top degree down
        for deg in (self.e..2 * self.e).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for (i, &l) in self.low.iter().enumerate() {
                let t = deg - self.e + i;
                prod[t] = (prod[t] + (self.p - c) * l % self.p) % self.p;
            }
        }
        self.index(&prod[..self.e])
    }
}

/// Minimum weight over all q^k - 1 nonzero messages of the generator columns.
pub fn oracle_min_distance(columns: &[Vec<u32>], q: u64, modulus: Option<&[u32]>) -> Result<usize> {
    let k = columns.len() as u32;
    let total = q.checked_pow(k).filter(|&t| t <= MAX_MESSAGES).ok_or(Error::BudgetExceeded {
        needed: q.saturating_pow(k),
        limit: MAX_MESSAGES,
    })?;
    let field = NaiveField::new(q, modulus)?;
    let m = columns.first().map_or(0, Vec::len);
    let mut best = usize::MAX;
    for msg in 1..total {
        let mut word = vec![0u64; m];
        let mut rest = msg;
        for col in columns {
            let u = rest % q;
            rest /= q;
            for (w, &v) in word.iter_mut().zip(col) {
                *w = field.add(*w, field.mul(u, v as u64));
            }
        }
        best = best.min(word.iter().filter(|&&x| x != 0).count());
    }
    Ok(best)
}

fn subsets(n: usize, k: usize, start: usize, acc: &mut Vec<usize>, out: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if acc.len() == k {
        return out(acc);
    }
    for i in start..n {
        acc.push(i);
        let go = subsets(n, k, i + 1, acc, out);
        acc.pop();
        if !go {
            return false;
        }
    }
    true
}

fn distinct(vals: impl Iterator<Item = u32>) -> bool {
    let mut seen = HashSet::new();
    vals.into_iter().all(|v| seen.insert(v))
}

/// Counts rows satisfying `pred` and compares against the plain or dense threshold.
fn enough(rows: &SymbolMatrix, eps: Option<Ratio<u64>>, pred: impl Fn(&[u32]) -> bool) -> bool {
    let hits = rows.iter_rows().filter(|r| pred(r)).count() as u128;
    match eps {
        None => hits > 0,
        Some(e) => {
            let (a, b) = (*e.numer() as u128, *e.denom() as u128);
            hits * b > (b - a) * rows.rows() as u128
        }
    }
}

struct Scan {
    constraints: u64,
    limit: u64,
    failure: Option<String>,
    over_budget: bool,
}

impl Scan {
    fn new(limit: u64) -> Self {
        Scan {
            constraints: 0,
            limit,
            failure: None,
            over_budget: false,
        }
    }

    /// Records one constraint; returns false to stop the enumeration.
    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) -> bool {
        self.constraints += 1;
        if self.constraints > self.limit {
            self.over_budget = true;
            return false;
        }
        if !ok {
            self.failure = Some(describe());
            return false;
        }
        true
    }

    fn finish(self) -> Result<OracleOutcome> {
        if self.over_budget {
            return Err(Error::BudgetExceeded {
                needed: self.constraints,
                limit: self.limit,
            });
        }
        Ok(OracleOutcome {
            holds: self.failure.is_none(),
            counterexample: self.failure,
            constraints: self.constraints,
        })
    }
}

fn phf_check(rows: &SymbolMatrix, d: usize, eps: Option<Ratio<u64>>, limit: u64) -> Result<OracleOutcome> {
    let mut scan = Scan::new(limit);
    subsets(rows.cols(), d, 0, &mut Vec::new(), &mut |s| {
        let ok = enough(rows, eps, |r| distinct(s.iter().map(|&i| r[i])));
        scan.record(ok, || format!("subset {s:?}"))
    });
    scan.finish()
}

fn hitting_check(rows: &SymbolMatrix, degree: usize, eps: Option<Ratio<u64>>, limit: u64) -> Result<OracleOutcome> {
    let n = rows.cols();
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            pairs.push((a, b));
        }
    }
    let mut scan = Scan::new(limit);
    for size in 1..=degree.min(pairs.len()) {
        let go = subsets(pairs.len(), size, 0, &mut Vec::new(), &mut |pick| {
            let ok = enough(rows, eps, |r| pick.iter().all(|&i| r[pairs[i].0] != r[pairs[i].1]));
            scan.record(ok, || {
                let ps: Vec<_> = pick.iter().map(|&i| pairs[i]).collect();
                format!("pairs {ps:?}")
            })
        });
        if !go {
            break;
        }
    }
    if degree > 0 && rows.rows() == 0 {
        scan.failure.get_or_insert_with(|| "no rows".into());
    }
    scan.finish()
}

fn cff_check(rows: &SymbolMatrix, w: usize, r: usize, limit: u64) -> Result<OracleOutcome> {
    let n = rows.cols();
    let mut scan = Scan::new(limit);
    subsets(n, w, 0, &mut Vec::new(), &mut |ones| {
        let rest: Vec<usize> = (0..n).filter(|i| !ones.contains(i)).collect();
        subsets(rest.len(), r, 0, &mut Vec::new(), &mut |pick| {
            let zeros: Vec<usize> = pick.iter().map(|&i| rest[i]).collect();
            let ok = rows
                .iter_rows()
                .any(|t| ones.iter().all(|&j| t[j] == 1) && zeros.iter().all(|&k| t[k] == 0));
            scan.record(ok, || format!("ones {ones:?} zeros {zeros:?}"))
        })
    });
    scan.finish()
}

fn shf_check(rows: &SymbolMatrix, ds: &[usize], limit: u64) -> Result<OracleOutcome> {
    fn rec(
        rows: &SymbolMatrix,
        ds: &[usize],
        free: Vec<usize>,
        classes: &mut Vec<Vec<usize>>,
        scan: &mut Scan,
    ) -> bool {
        if classes.len() == ds.len() {
            let ok = rows.iter_rows().any(|f| {
                let images: Vec<HashSet<u32>> = classes
                    .iter()
                    .map(|c| c.iter().map(|&i| f[i]).collect())
                    .collect();
                (0..images.len()).all(|i| (i + 1..images.len()).all(|j| images[i].is_disjoint(&images[j])))
            });
            return scan.record(ok, || format!("classes {classes:?}"));
        }
        let size = ds[classes.len()];
        subsets(free.len(), size, 0, &mut Vec::new(), &mut |pick| {
            let class: Vec<usize> = pick.iter().map(|&i| free[i]).collect();
            let left: Vec<usize> = free.iter().copied().filter(|x| !class.contains(x)).collect();
            classes.push(class);
            let go = rec(rows, ds, left, classes, scan);
            classes.pop();
            go
        })
    }
    let mut scan = Scan::new(limit);
    rec(rows, ds, (0..rows.cols()).collect(), &mut Vec::new(), &mut scan);
    scan.finish()
}

fn header_usize(v: Option<u64>, key: &str) -> Result<usize> {
    v.map(|x| x as usize)
        .ok_or_else(|| Error::InvalidParameters(format!("header key {key} missing")))
}

/// Parses a DRF text and checks its defining property by brute force,
/// examining at most `limit` constraints.
pub fn oracle_check_text(text: &str, limit: u64) -> Result<OracleOutcome> {
    oracle_check_document(&drf::parse(text)?, limit)
}

pub fn oracle_check_document(doc: &DrfDocument, limit: u64) -> Result<OracleOutcome> {
    let h = &doc.header;
    let body = &doc.body;
    match doc.kind {
        Kind::Code => {
            let q = h.q.unwrap_or(0);
            let (num, den) = h.delta.unwrap_or((0, 1));
            let m = body.cols() as u64;
            let required = (num * m).div_ceil(den) as usize;
            let columns: Vec<Vec<u32>> = body.iter_rows().map(<[u32]>::to_vec).collect();
            let messages = q.saturating_pow(columns.len() as u32).saturating_sub(1);
            if messages > limit {
                return Err(Error::BudgetExceeded {
                    needed: messages,
                    limit,
                });
            }
            let weight = oracle_min_distance(&columns, q, h.modulus.as_deref())?;
            Ok(OracleOutcome {
                holds: weight >= required,
                counterexample: (weight < required).then(|| format!("weight {weight} < {required}")),
                constraints: messages,
            })
        }
        Kind::Hitting => hitting_check(body, header_usize(h.d, "d")?, h.eps_ratio(), limit),
        Kind::Phf => phf_check(body, header_usize(h.d, "d")?, h.eps_ratio(), limit),
        Kind::Cff => cff_check(body, header_usize(h.w, "w")?, header_usize(h.r, "r")?, limit),
        Kind::Shf => {
            let ds: Vec<usize> = h.ds.as_ref().map(|v| v.iter().map(|&x| x as usize).collect()).unwrap_or_default();
            shf_check(body, &ds, limit)
        }
    }
}

/// Property and parameters for [`oracle_random_family_baseline`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaselineKind {
    Phf { n: usize, q: u32, d: usize },
    Hitting { n: usize, q: u32, degree: usize },
    Cff { n: usize, w: usize, r: usize },
    Shf { n: usize, q: u32, ds: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineResult {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
}

/// Fraction of uniformly random families with `size` members that have the
/// property, over `trials` seeded draws.
pub fn oracle_random_family_baseline(
    kind: &BaselineKind,
    size: usize,
    trials: u64,
    seed: u64,
    limit: u64,
) -> Result<BaselineResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, alphabet) = match kind {
        BaselineKind::Phf { n, q, .. } | BaselineKind::Hitting { n, q, .. } | BaselineKind::Shf { n, q, .. } => {
            (*n, *q)
        }
        BaselineKind::Cff { n, .. } => (*n, 2),
    };
    if alphabet == 0 {
        return Err(Error::InvalidParameters("alphabet must be nonempty".into()));
    }
    let mut successes = 0;
    for _ in 0..trials {
        let rows: Vec<Vec<u32>> = (0..size)
            .map(|_| (0..n).map(|_| rng.gen_range(0..alphabet)).collect())
            .collect();
        let rows = SymbolMatrix::from_rows(n, &rows);
        let outcome = match kind {
            BaselineKind::Phf { d, .. } => phf_check(&rows, *d, None, limit)?,
            BaselineKind::Hitting { degree, .. } => hitting_check(&rows, *degree, None, limit)?,
            BaselineKind::Cff { w, r, .. } => cff_check(&rows, *w, *r, limit)?,
            BaselineKind::Shf { ds, .. } => shf_check(&rows, ds, limit)?,
        };
        successes += outcome.holds as u64;
    }
    Ok(BaselineResult {
        successes,
        trials,
        rate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
    })
}
