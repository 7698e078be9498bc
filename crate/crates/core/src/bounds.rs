//! Bound calculators for the d-restriction objects.
//!
//! Lower and upper bounds that only hold up to constants are reported as their
//! dominant term and tagged [`Exactness::Asymptotic`]. Logarithms inside ratio
//! forms are natural (the base cancels); a standalone `log n` factor is base 2
//! and says so in its label.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};

use crate::combin::binomial;
use crate::error::{Error, Result};

/// Largest w + r for which the CFF calculators run.
pub const CFF_MAX_D: u64 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    /// Dominant term of an Ω/O statement, constants omitted.
    Asymptotic,
}

impl fmt::Display for Exactness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exactness::Exact => f.write_str("exact"),
            Exactness::Asymptotic => f.write_str("asymptotic, constants omitted"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundValue {
    Real(f64),
    Rational(BigRational),
    Feasible(bool),
    NotApplicable,
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Real(x) if x.is_infinite() => f.write_str("inf"),
            BoundValue::Real(x) => write!(f, "{x:.6}"),
            BoundValue::Rational(r) => {
                write!(f, "{r} (~{:.6})", r.to_f64().unwrap_or(f64::NAN))
            }
            BoundValue::Feasible(true) => f.write_str("FEASIBLE"),
            BoundValue::Feasible(false) => f.write_str("INFEASIBLE"),
            BoundValue::NotApplicable => f.write_str("n/a"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundEntry {
    pub name: String,
    pub value: BoundValue,
    pub exactness: Exactness,
    pub note: Option<String>,
}

impl BoundEntry {
    fn new(name: &str, value: BoundValue, exactness: Exactness) -> Self {
        BoundEntry {
            name: name.to_string(),
            value,
            exactness,
            note: None,
        }
    }

    fn note(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }

    pub fn real(&self) -> Option<f64> {
        match &self.value {
            BoundValue::Real(x) => Some(*x),
            BoundValue::Rational(r) => r.to_f64(),
            _ => None,
        }
    }
}

/// Evaluated bounds for one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub params: Vec<(String, String)>,
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    fn new(params: &[(&str, String)]) -> Self {
        BoundReport {
            params: params
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            entries: Vec::new(),
        }
    }

    pub fn get(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Renders `BOUND name = value [tag]` lines, one per entry.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("PARAMS {}\n", params.join(" ")));
        let width = self.entries.iter().map(|e| e.name.len()).max().unwrap_or(0);
        for e in &self.entries {
            out.push_str(&format!(
                "BOUND {:<width$} = {} [{}]",
                e.name, e.value, e.exactness
            ));
            if let Some(n) = &e.note {
                out.push_str(&format!(" ; {n}"));
            }
            out.push('\n');
        }
        out
    }
}

/// The q-ary entropy H_q(p), with H_q(0) = 0 and H_q(1) = log_q(q-1).
pub fn entropy_q(q: u64, p: f64) -> Result<f64> {
    if q < 2 || !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::DomainError(format!(
            "entropy needs q >= 2 and p in [0,1], got q={q} p={p}"
        )));
    }
    let lq = (q as f64).ln();
    let mut h = 0.0;
    if p > 0.0 {
        h += p * (((q - 1) as f64) / p).ln() / lq;
    }
    if p < 1.0 {
        h += (1.0 - p) * (1.0 / (1.0 - p)).ln() / lq;
    }
    Ok(h)
}

/// g(q,d) = (1 - 1/q)(1 - 2/q)...(1 - (d-1)/q): the chance that d uniform
/// values in [q] are pairwise distinct.
pub fn g_factor(q: u64, d: u64) -> BigRational {
    let mut acc = BigRational::one();
    for i in 1..d {
        if i >= q {
            return BigRational::zero();
        }
        acc *= BigRational::new(BigInt::from(q - i), BigInt::from(q));
    }
    acc
}

fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Lower bounds on the size of an (n,q,d)-PHF.
pub fn phf_lower_bound(n: u64, q: u64, d: u64) -> BoundReport {
    let mut report = BoundReport::new(&[("n", n.to_string()), ("q", q.to_string()), ("d", d.to_string())]);
    let g = g_factor(q, d);
    report.entries.push(BoundEntry::new(
        "g(q,d)",
        BoundValue::Rational(g.clone()),
        Exactness::Exact,
    ));
    if d <= 1 {
        report.entries.push(
            BoundEntry::new("phf_lower", BoundValue::Real(1.0), Exactness::Exact)
                .note("d <= 1: one function suffices"),
        );
        return report;
    }
    let ln_n = (n as f64).ln();
    let fk = if g.is_zero() {
        f64::INFINITY
    } else {
        let base = (q + 2).saturating_sub(d) as f64;
        ((q + 1 - d.min(q + 1)) as f64) / (q as f64 * base.ln()) * ln_n / ratio_f64(&g)
    };
    let mut fk_entry = BoundEntry::new("phf_lower_fk", BoundValue::Real(fk), Exactness::Asymptotic)
        .note("(q-d+1)/(q log(q-d+2)) * log n / g(q,d); stated for n > d^(2+eps)");
    if g.is_zero() {
        fk_entry = fk_entry.note("d > q: no PHF exists");
    }
    report.entries.push(fk_entry);
    let generic = d as f64 * ln_n / (q as f64).ln();
    report.entries.push(
        BoundEntry::new("phf_lower_generic", BoundValue::Real(generic), Exactness::Asymptotic)
            .note("d log n / log q"),
    );
    let dominant = fk.max(generic);
    report.entries.push(
        BoundEntry::new("phf_lower", BoundValue::Real(dominant), Exactness::Asymptotic)
            .note(if generic >= fk {
                "generic term dominates"
            } else {
                "g-term dominates"
            }),
    );
    report
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseFeasibility {
    /// Whether the impossibility threshold applies at all (q > d^2/2).
    pub applicable: bool,
    pub threshold: BigRational,
    pub infeasible: bool,
}

/// The impossibility threshold d(d-1)/(2q) - d^2(d-1)^2/(8q^2) for dense PHFs.
pub fn dense_threshold(q: u64, d: u64) -> BigRational {
    let dd = BigInt::from(d * d.saturating_sub(1));
    let q = BigInt::from(q);
    BigRational::new(dd.clone(), BigInt::from(2) * &q)
        - BigRational::new(&dd * &dd, BigInt::from(8) * &q * &q)
}

/// Decides whether a (1-eps)-dense (n,q,d)-PHF is ruled out by the counting argument.
pub fn dense_phf_feasibility(q: u64, d: u64, eps: Ratio<u64>) -> DenseFeasibility {
    let threshold = dense_threshold(q, d);
    // q > d^2/2
    let applicable = 2 * q > d * d;
    let eps = BigRational::new(BigInt::from(*eps.numer()), BigInt::from(*eps.denom()));
    let infeasible = applicable && d > 1 && eps <= threshold;
    DenseFeasibility {
        applicable,
        threshold,
        infeasible,
    }
}

/// Feasibility verdict plus the dense lower bound d log n / (eps log q).
pub fn dense_phf_report(q: u64, d: u64, eps: Ratio<u64>, n: Option<u64>) -> BoundReport {
    let mut params = vec![("q", q.to_string()), ("d", d.to_string()), ("eps", eps.to_string())];
    if let Some(n) = n {
        params.insert(0, ("n", n.to_string()));
    }
    let mut report = BoundReport::new(&params);
    let f = dense_phf_feasibility(q, d, eps);
    report.entries.push(BoundEntry::new(
        "dense_threshold",
        BoundValue::Rational(f.threshold.clone()),
        Exactness::Exact,
    ));
    let verdict = if f.applicable {
        BoundValue::Feasible(!f.infeasible)
    } else {
        BoundValue::NotApplicable
    };
    let mut entry = BoundEntry::new("dense_phf_feasibility", verdict, Exactness::Exact);
    if !f.applicable {
        entry = entry.note("threshold only applies for q > d^2/2");
    } else if f.infeasible {
        entry = entry.note("eps <= threshold: no such family exists");
    }
    report.entries.push(entry);
    if let Some(n) = n {
        let e = *eps.numer() as f64 / *eps.denom() as f64;
        let lb = d as f64 * (n as f64).ln() / (e * (q as f64).ln());
        report.entries.push(
            BoundEntry::new("dense_phf_lower", BoundValue::Real(lb), Exactness::Asymptotic)
                .note("d log n / (eps log q); stated for q >= d^(1+c)"),
        );
    }
    report
}

/// Group-testing lower bound, the CFF lower bound and the union-bound upper bound.
pub fn cff_bounds(n: u64, w: u64, r: u64) -> Result<BoundReport> {
    let d = w + r;
    if d > CFF_MAX_D {
        return Err(Error::Overflow(format!("w + r = {d} exceeds {CFF_MAX_D}")));
    }
    if w == 0 || r == 0 {
        return Err(Error::DomainError("w and r must be positive".into()));
    }
    let mut report = BoundReport::new(&[("n", n.to_string()), ("w", w.to_string()), ("r", r.to_string())]);
    let ln_n = (n as f64).ln();
    let c: BigUint = binomial(d, w);
    let cf = c.to_f64().unwrap_or(f64::INFINITY);
    report.entries.push(BoundEntry::new(
        "binom(d,w)",
        BoundValue::Real(cf),
        Exactness::Exact,
    ));
    let gt = if r >= 2 {
        BoundValue::Real((r * r) as f64 / (r as f64).ln() * ln_n)
    } else {
        BoundValue::NotApplicable
    };
    report.entries.push(
        BoundEntry::new("group_testing_lower", gt, Exactness::Asymptotic)
            .note("r^2 / log r * log n; the (1,r) case"),
    );
    let lower = if cf > 1.0 {
        BoundValue::Real(d as f64 * cf / cf.ln() * ln_n)
    } else {
        BoundValue::NotApplicable
    };
    report.entries.push(
        BoundEntry::new("cff_lower", lower, Exactness::Asymptotic)
            .note("d binom(d,w) / log binom(d,w) * log n"),
    );
    let upper = ((w * r * d) as f64).sqrt() * cf * (n as f64).log2();
    report.entries.push(
        BoundEntry::new("cff_upper_union", BoundValue::Real(upper), Exactness::Asymptotic)
            .note("sqrt(wrd) binom(d,w) log2 n"),
    );
    Ok(report)
}

/// (D1 - 1)(log n - log(D1 - 1) - log q) / log q, with D1 = sum of ds.
pub fn shf_lower_bound(n: u64, q: u64, ds: &[u64]) -> Result<f64> {
    let d1: u64 = ds.iter().sum();
    if d1 <= 1 {
        return Ok(0.0);
    }
    if q < 2 || n == 0 {
        return Err(Error::DomainError(format!("logarithm of n={n} or q={q} undefined")));
    }
    if n <= (d1 - 1) * q {
        return Err(Error::DomainError(format!(
            "need n > (D1-1) q = {}",
            (d1 - 1) * q
        )));
    }
    let (n, q, k) = (n as f64, q as f64, (d1 - 1) as f64);
    Ok(k * (n.ln() - k.ln() - q.ln()) / q.ln())
}

pub fn shf_report(n: u64, q: u64, ds: &[u64]) -> Result<BoundReport> {
    let d1: u64 = ds.iter().sum();
    let d2: u64 = crate::families::d2_of(ds);
    let ds_s: Vec<String> = ds.iter().map(|d| d.to_string()).collect();
    let mut report = BoundReport::new(&[
        ("n", n.to_string()),
        ("q", q.to_string()),
        ("ds", ds_s.join(",")),
    ]);
    report.entries.push(BoundEntry::new("D1", BoundValue::Real(d1 as f64), Exactness::Exact));
    report.entries.push(BoundEntry::new("D2", BoundValue::Real(d2 as f64), Exactness::Exact));
    report.entries.push(
        BoundEntry::new(
            "shf_lower",
            BoundValue::Real(shf_lower_bound(n, q, ds)?),
            Exactness::Exact,
        )
        .note("(D1-1)(log n - log(D1-1) - log q)/log q"),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn entropy_examples() {
        assert!((entropy_q(2, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(entropy_q(2, 0.0).unwrap(), 0.0);
        assert!((entropy_q(4, 0.75).unwrap() - 1.0).abs() < 1e-12);
        assert!((entropy_q(5, 1.0).unwrap() - 4f64.ln() / 5f64.ln()).abs() < 1e-12);
        assert!(entropy_q(1, 0.5).is_err());
        assert!(entropy_q(2, 1.5).is_err());
    }

    #[test]
    fn entropy_peaks_at_one_minus_inverse_q() {
        for q in 2..=64u64 {
            let h = entropy_q(q, 1.0 - 1.0 / q as f64).unwrap();
            assert!((h - 1.0).abs() < 1e-12, "q={q} h={h}");
        }
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_factor(7, 1), rat(1, 1));
        assert_eq!(g_factor(3, 3), rat(2, 9));
        assert_eq!(g_factor(2, 3), rat(0, 1));
        assert_eq!(g_factor(2, 2), rat(1, 2));
    }

    #[test]
    fn g_matches_enumeration() {
        for q in 1..=8u64 {
            for d in 1..=4u32 {
                let total = q.pow(d);
                let mut distinct = 0u64;
                for code in 0..total {
                    let mut vals = Vec::new();
                    let mut c = code;
                    for _ in 0..d {
                        vals.push(c % q);
                        c /= q;
                    }
                    vals.sort();
                    vals.dedup();
                    if vals.len() == d as usize {
                        distinct += 1;
                    }
                }
                assert_eq!(g_factor(q, d as u64), rat(distinct as i64, total as i64), "q={q} d={d}");
            }
        }
    }

    #[test]
    fn dense_threshold_example() {
        assert_eq!(dense_threshold(100, 2), rat(199, 20000));
        let f = dense_phf_feasibility(100, 2, Ratio::new(1, 200));
        assert!(f.applicable && f.infeasible);
        let f = dense_phf_feasibility(100, 2, Ratio::new(1, 2));
        assert!(!f.infeasible);
        let f = dense_phf_feasibility(10, 1, Ratio::new(0, 1));
        assert!(!f.infeasible);
        assert_eq!(f.threshold, rat(0, 1));
    }

    #[test]
    fn phf_lower_cases() {
        let r = phf_lower_bound(100, 17, 1);
        assert_eq!(r.get("phf_lower").unwrap().real(), Some(1.0));
        let r = phf_lower_bound(1000, 3, 3);
        let g = 2.0 / 9.0;
        let fk = 1.0 / (3.0 * 2f64.ln()) * 1000f64.ln() / g;
        assert!((r.get("phf_lower_fk").unwrap().real().unwrap() - fk).abs() < 1e-9);
        // q much larger than d^2: the generic term wins
        let r = phf_lower_bound(1 << 20, 100_003, 2);
        let fk = r.get("phf_lower_fk").unwrap().real().unwrap();
        let gen = r.get("phf_lower_generic").unwrap().real().unwrap();
        assert!(gen > fk);
        assert_eq!(r.get("phf_lower").unwrap().real(), Some(gen));
        let r = phf_lower_bound(100, 2, 3);
        assert!(r.get("phf_lower_fk").unwrap().real().unwrap().is_infinite());
    }

    #[test]
    fn shf_examples() {
        assert!((shf_lower_bound(16, 2, &[1, 1]).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(shf_lower_bound(16, 2, &[1]).unwrap(), 0.0);
        // (3-1)(log 256 - log 2 - log 4)/log 4 = 2 (4 - 0.5 - 1) = 5
        assert!((shf_lower_bound(256, 4, &[1, 2]).unwrap() - 5.0).abs() < 1e-12);
        assert!(shf_lower_bound(2, 2, &[1, 1]).is_err());
    }

    #[test]
    fn cff_examples() {
        let r = cff_bounds(20, 1, 2).unwrap();
        let ln20 = 20f64.ln();
        let gt = r.get("group_testing_lower").unwrap().real().unwrap();
        assert!((gt - 4.0 / 2f64.ln() * ln20).abs() < 1e-9);
        let lo = r.get("cff_lower").unwrap().real().unwrap();
        assert!((lo - 3.0 * 3.0 / 3f64.ln() * ln20).abs() < 1e-9);
        let up = r.get("cff_upper_union").unwrap().real().unwrap();
        assert!((up - 6f64.sqrt() * 3.0 * 20f64.log2()).abs() < 1e-9);

        let a = cff_bounds(50, 2, 5).unwrap();
        let b = cff_bounds(50, 5, 2).unwrap();
        for name in ["cff_lower", "cff_upper_union"] {
            assert_eq!(a.get(name).unwrap().real(), b.get(name).unwrap().real());
        }
        assert!(matches!(cff_bounds(10, 30, 31), Err(Error::Overflow(_))));
    }
}
