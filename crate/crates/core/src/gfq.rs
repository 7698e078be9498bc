//! Finite field arithmetic over F_q for arbitrary prime powers q = p^e.
//!
//! Elements are encoded as integers in `[0, q)`: the coefficient vector of the
//! polynomial representative, written in base p with the constant coefficient
//! as the least significant digit. Index 0 is zero and index 1 is one.
//!
//! Extension fields use the lexicographically smallest monic irreducible
//! polynomial of degree e as modulus, so a given q always produces the same
//! field and the same element encoding.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Orders up to this bound get log/antilog tables.
const TABLE_LIMIT: u32 = 1 << 16;
/// Orders up to this bound (with odd characteristic and e > 1) get a full addition table.
const ADD_TABLE_LIMIT: u32 = 1024;

/// An element of F_q in its canonical base-p encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug)]
struct Tables {
    /// exp[i] = g^i for a fixed primitive element g, i in [0, q-1).
    exp: Vec<u32>,
    /// log[a] for a != 0; log[0] is unused.
    log: Vec<u32>,
    add: Option<Vec<u32>>,
}

/// The field F_q together with its fixed modulus.
///
/// Cloning is cheap: lookup tables are shared.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    e: u32,
    q: u32,
    /// Coefficients from the leading (always 1) down to the constant term.
    modulus: Option<Vec<u32>>,
    tables: Option<Arc<Tables>>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

impl FieldSpec {
    /// Builds F_q. Fails with [`Error::NotPrimePower`] when q is not a prime power.
    pub fn new(q: u64) -> Result<Self> {
        let (p, e) = is_prime_power(q).ok_or(Error::NotPrimePower(q))?;
        if q > u64::from(u32::MAX) {
            return Err(Error::NotPrimePower(q));
        }
        let (p, e, q) = (p as u32, e, q as u32);
        let modulus = if e > 1 {
            Some(smallest_irreducible(p, e))
        } else {
            None
        };
        Self::with_modulus(p, e, q, modulus)
    }

    /// Builds a field from an explicit modulus, e.g. one read back from a file.
    ///
    /// The modulus is checked for monicity, degree and irreducibility.
    pub fn from_parts(q: u64, modulus: Option<Vec<u32>>) -> Result<Self> {
        let (p, e) = is_prime_power(q).ok_or(Error::NotPrimePower(q))?;
        let (p, q) = (p as u32, q as u32);
        let modulus = match (e, modulus) {
            (1, None) => None,
            (1, Some(m)) if m.is_empty() => None,
            (1, Some(_)) => {
                return Err(Error::InvalidParameters(
                    "a prime field takes no modulus".into(),
                ))
            }
            (_, None) => Some(smallest_irreducible(p, e)),
            (_, Some(m)) => {
                if m.len() != e as usize + 1 || m[0] != 1 || m.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidParameters(format!(
                        "modulus must be monic of degree {e} with coefficients below {p}"
                    )));
                }
                let mut low_first: Vec<u32> = m.iter().rev().copied().collect();
                trim(&mut low_first);
                if !is_irreducible(&low_first, p) {
                    return Err(Error::InvalidParameters("modulus is reducible".into()));
                }
                Some(m)
            }
        };
        Self::with_modulus(p, e, q, modulus)
    }

    fn with_modulus(p: u32, e: u32, q: u32, modulus: Option<Vec<u32>>) -> Result<Self> {
        let mut spec = FieldSpec {
            p,
            e,
            q,
            modulus,
            tables: None,
        };
        if q <= TABLE_LIMIT {
            spec.tables = Some(Arc::new(spec.build_tables()));
        }
        Ok(spec)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients from leading to constant, present iff e > 1.
    pub fn modulus(&self) -> Option<&[u32]> {
        self.modulus.as_deref()
    }

    pub fn element(&self, index: u32) -> FieldElement {
        debug_assert!(index < self.q);
        FieldElement(index)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.add_raw(a.0, b.0))
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg_raw(a.0))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.add_raw(a.0, self.neg_raw(b.0)))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.mul_raw(a.0, b.0))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldElement(self.inv_raw(a.0)))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub(crate) fn add_raw(&self, a: u32, b: u32) -> u32 {
        if self.e == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        if self.p == 2 {
            return a ^ b;
        }
        if let Some(t) = self.tables.as_ref().and_then(|t| t.add.as_ref()) {
            return t[(a * self.q + b) as usize];
        }
        self.add_digits(a, b)
    }

    pub(crate) fn neg_raw(&self, a: u32) -> u32 {
        if self.e == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        if self.p == 2 {
            return a;
        }
        let mut out = 0;
        let mut place = 1;
        let mut rest = a;
        for _ in 0..self.e {
            let digit = rest % self.p;
            out += ((self.p - digit) % self.p) * place;
            rest /= self.p;
            place *= self.p;
        }
        out
    }

    pub(crate) fn mul_raw(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.e == 1 {
            return ((u64::from(a) * u64::from(b)) % u64::from(self.p)) as u32;
        }
        match &self.tables {
            Some(t) => {
                let n = self.q - 1;
                let s = t.log[a as usize] + t.log[b as usize];
                t.exp[(if s >= n { s - n } else { s }) as usize]
            }
            None => self.mul_schoolbook(a, b),
        }
    }

    pub(crate) fn inv_raw(&self, a: u32) -> u32 {
        debug_assert!(a != 0);
        match &self.tables {
            Some(t) => {
                let n = self.q - 1;
                let l = t.log[a as usize];
                t.exp[((n - l) % n) as usize]
            }
            None => self.pow_raw(a, u64::from(self.q) - 2),
        }
    }

    fn pow_raw(&self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_schoolbook(acc, base);
            }
            base = self.mul_schoolbook(base, base);
            exp >>= 1;
        }
        acc
    }

    fn add_digits(&self, a: u32, b: u32) -> u32 {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.e {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut d = Vec::with_capacity(self.e as usize);
        for _ in 0..self.e {
            d.push(a % self.p);
            a /= self.p;
        }
        d
    }

    fn from_digits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    /// Polynomial product followed by reduction modulo the fixed modulus.
    pub(crate) fn mul_schoolbook(&self, a: u32, b: u32) -> u32 {
        if self.e == 1 {
            return ((u64::from(a) * u64::from(b)) % u64::from(self.p)) as u32;
        }
        let p = u64::from(self.p);
        let (da, db) = (self.digits(a), self.digits(b));
        let e = self.e as usize;
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u64::from(x) * u64::from(y)) % p;
            }
        }
        // modulus is monic: x^e = -(m_{e-1} x^{e-1} + ... + m_0)
        let modulus = self.modulus.as_ref().expect("extension field has a modulus");
        for deg in (e..prod.len()).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for k in 0..e {
                // coefficient of x^k in the modulus
                let mk = u64::from(modulus[e - k]);
                let idx = deg - e + k;
                prod[idx] = (prod[idx] + (p - mk) * c) % p;
            }
        }
        let low: Vec<u32> = prod[..e].iter().map(|&c| c as u32).collect();
        self.from_digits(&low)
    }

    fn build_tables(&self) -> Tables {
        let q = self.q;
        let n = q - 1;
        let mut exp = vec![0u32; n as usize];
        let mut log = vec![0u32; q as usize];
        if q == 2 {
            exp[0] = 1;
        } else {
            'search: for g in 2..q {
                let mut x = 1u32;
                for i in 0..n {
                    if i > 0 && x == 1 {
                        continue 'search;
                    }
                    exp[i as usize] = x;
                    x = self.mul_schoolbook(x, g);
                }
                if x == 1 {
                    break;
                }
            }
        }
        for (i, &x) in exp.iter().enumerate() {
            log[x as usize] = i as u32;
        }
        let add = if self.e > 1 && self.p != 2 && q <= ADD_TABLE_LIMIT {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = self.add_digits(a, b);
                }
            }
            Some(t)
        } else {
            None
        };
        Tables { exp, log, add }
    }
}

/// Shorthand for [`FieldSpec::new`].
pub fn field_make(q: u64) -> Result<FieldSpec> {
    FieldSpec::new(q)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Returns `(p, e)` with `q = p^e` when q is a prime power.
pub fn is_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 0;
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            p = d;
            break;
        }
        d += 1;
    }
    if p == 0 {
        return Some((q, 1));
    }
    let mut rest = q;
    let mut e = 0;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

/// Largest prime power not exceeding q, if any.
pub fn prev_prime_power(q: u64) -> Option<u64> {
    (2..=q).rev().find(|&c| is_prime_power(c).is_some())
}

/// Smallest prime power at least q (and at least 2).
pub fn next_prime_power(q: u64) -> u64 {
    (q.max(2)..)
        .find(|&c| is_prime_power(c).is_some())
        .expect("prime powers are unbounded")
}

fn trim(poly: &mut Vec<u32>) {
    while poly.len() > 1 && *poly.last().unwrap() == 0 {
        poly.pop();
    }
}

/// Remainder of `a mod b` over F_p, both given constant-term first; b must be monic.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    while r.len() > db && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let c = r[dr];
        if c != 0 {
            for (k, &bk) in b.iter().enumerate() {
                let idx = dr - db + k;
                r[idx] = (r[idx] + (p - bk) * c % p) % p;
            }
        }
        r.pop();
        trim(&mut r);
    }
    r
}

/// Irreducibility by trial division with every monic polynomial of degree 1..=deg/2.
fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for tail in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut t = tail;
            for _ in 0..d {
                divisor.push((t % p as u64) as u32);
                t /= p as u64;
            }
            divisor.push(1);
            let r = poly_rem(poly, &divisor, p);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible polynomial of degree e over F_p,
/// coefficients ordered from leading to constant.
fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
    let count = (p as u64).pow(e);
    for tail in 0..count {
        // tail written in base p with x^{e-1}'s coefficient most significant
        let mut high_first = vec![0u32; e as usize];
        let mut t = tail;
        for slot in high_first.iter_mut().rev() {
            *slot = (t % p as u64) as u32;
            t /= p as u64;
        }
        let mut low_first: Vec<u32> = high_first.iter().rev().copied().collect();
        low_first.push(1);
        if is_irreducible(&low_first, p) {
            let mut out = vec![1];
            out.extend(high_first);
            return out;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
