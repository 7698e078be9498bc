//! The DRF v1 text format.
//!
//! ```text
//! DRF 1
//! kind phf
//! n 5
//! q 3
//! d 2
//! m 2
//! body
//! 0 1 2 0 1
//! 0 0 1 1 2
//! ```
//!
//! Header lines are `key value`, in the canonical order
//! n, q, d, w, r, ds, m, k, eps_num, eps_den, delta_num, delta_den, h, modulus,
//! restricted to the keys the kind allows. `ds` and `modulus` are comma
//! separated (modulus coefficients from the leading one down to the constant).
//! The body holds k rows of length m for `code` and m rows of length n
//! otherwise. Lines end in LF, tokens are separated by single spaces, numbers
//! are plain decimal without leading zeros.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::families::{self, CoverFreeFamily, PerfectHashFamily, SeparatingHashFamily};
use crate::gfq::FieldSpec;
use crate::gvcode::{self, CodeParams, LinearCode};
use crate::hitter::{self, HittingSet};
use crate::matrix::SymbolMatrix;
use crate::verdict::{ConstraintBudget, Verdict};

pub const MAGIC: &str = "DRF 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Code,
    Hitting,
    Phf,
    Cff,
    Shf,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Code => "code",
            Kind::Hitting => "hitting",
            Kind::Phf => "phf",
            Kind::Cff => "cff",
            Kind::Shf => "shf",
        }
    }

    /// Allowed header keys, in canonical order, and whether each is required.
    fn schema(self) -> &'static [(Key, bool)] {
        use Key::*;
        match self {
            Kind::Code => &[
                (N, false),
                (Q, true),
                (M, true),
                (K, true),
                (DeltaNum, true),
                (DeltaDen, true),
                (H, false),
                (Modulus, false),
            ],
            Kind::Hitting => &[
                (N, true),
                (Q, true),
                (D, true),
                (M, true),
                (EpsNum, false),
                (EpsDen, false),
                (H, false),
                (Modulus, false),
            ],
            Kind::Phf => &[
                (N, true),
                (Q, true),
                (D, true),
                (M, true),
                (EpsNum, false),
                (EpsDen, false),
            ],
            Kind::Cff => &[(N, true), (W, true), (R, true), (M, true)],
            Kind::Shf => &[(N, true), (Q, true), (Ds, true), (M, true)],
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "code" => Kind::Code,
            "hitting" => Kind::Hitting,
            "phf" => Kind::Phf,
            "cff" => Kind::Cff,
            "shf" => Kind::Shf,
            _ => return Err(Error::InvalidParameters(format!("unknown kind {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    N,
    Q,
    D,
    W,
    R,
    Ds,
    M,
    K,
    EpsNum,
    EpsDen,
    DeltaNum,
    DeltaDen,
    H,
    Modulus,
}

impl Key {
    const ALL: [Key; 14] = [
        Key::N,
        Key::Q,
        Key::D,
        Key::W,
        Key::R,
        Key::Ds,
        Key::M,
        Key::K,
        Key::EpsNum,
        Key::EpsDen,
        Key::DeltaNum,
        Key::DeltaDen,
        Key::H,
        Key::Modulus,
    ];

    fn name(self) -> &'static str {
        match self {
            Key::N => "n",
            Key::Q => "q",
            Key::D => "d",
            Key::W => "w",
            Key::R => "r",
            Key::Ds => "ds",
            Key::M => "m",
            Key::K => "k",
            Key::EpsNum => "eps_num",
            Key::EpsDen => "eps_den",
            Key::DeltaNum => "delta_num",
            Key::DeltaDen => "delta_den",
            Key::H => "h",
            Key::Modulus => "modulus",
        }
    }

    fn parse(s: &str) -> Option<Key> {
        Key::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// Header fields; which ones are set depends on the kind.
///
/// Rationals are kept as raw numerator/denominator pairs so that a parsed
/// file serializes back to the same bytes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Header {
    pub n: Option<u64>,
    pub q: Option<u64>,
    pub d: Option<u64>,
    pub w: Option<u64>,
    pub r: Option<u64>,
    pub ds: Option<Vec<u64>>,
    pub m: Option<u64>,
    pub k: Option<u64>,
    pub eps: Option<(u64, u64)>,
    pub delta: Option<(u64, u64)>,
    pub h: Option<u64>,
    pub modulus: Option<Vec<u32>>,
}

impl Header {
    fn value(&self, key: Key) -> Option<String> {
        let num = |v: Option<u64>| v.map(|x| x.to_string());
        let list = |v: &Option<Vec<u64>>| v.as_ref().map(|xs| join(xs, ","));
        match key {
            Key::N => num(self.n),
            Key::Q => num(self.q),
            Key::D => num(self.d),
            Key::W => num(self.w),
            Key::R => num(self.r),
            Key::Ds => list(&self.ds),
            Key::M => num(self.m),
            Key::K => num(self.k),
            Key::EpsNum => num(self.eps.map(|e| e.0)),
            Key::EpsDen => num(self.eps.map(|e| e.1)),
            Key::DeltaNum => num(self.delta.map(|e| e.0)),
            Key::DeltaDen => num(self.delta.map(|e| e.1)),
            Key::H => num(self.h),
            Key::Modulus => self
                .modulus
                .as_ref()
                .map(|c| join(&c.iter().map(|&x| x as u64).collect::<Vec<_>>(), ",")),
        }
    }

    pub fn eps_ratio(&self) -> Option<Ratio<u64>> {
        self.eps.map(|(a, b)| Ratio::new(a, b))
    }

    pub fn delta_ratio(&self) -> Option<Ratio<u64>> {
        self.delta.map(|(a, b)| Ratio::new(a, b))
    }
}

fn join(xs: &[u64], sep: &str) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrfDocument {
    pub kind: Kind,
    pub header: Header,
    pub body: SymbolMatrix,
}

fn required(v: Option<u64>, key: &str) -> Result<u64> {
    v.ok_or_else(|| Error::InvalidParameters(format!("header key {key} missing")))
}

fn to_usize(v: u64, key: &str) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::Overflow(format!("{key} = {v} does not fit")))
}

fn to_u32(v: u64, key: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::Overflow(format!("{key} = {v} does not fit")))
}

fn ratio_pair(r: Ratio<u64>) -> (u64, u64) {
    (*r.numer(), *r.denom())
}

impl DrfDocument {
    pub fn from_code(code: &LinearCode) -> Self {
        let p = &code.params;
        let header = Header {
            n: Some(p.n),
            q: Some(p.q as u64),
            m: Some(p.m as u64),
            k: Some(p.k as u64),
            delta: Some(ratio_pair(p.delta)),
            h: p.h.map(u64::from),
            modulus: code.field.modulus().map(<[u32]>::to_vec),
            ..Header::default()
        };
        DrfDocument {
            kind: Kind::Code,
            header,
            body: SymbolMatrix::from_rows(p.m, &code.columns),
        }
    }

    pub fn from_hitting(hs: &HittingSet) -> Self {
        let header = Header {
            n: Some(hs.n as u64),
            q: Some(hs.q() as u64),
            d: Some(hs.degree as u64),
            m: Some(hs.m() as u64),
            eps: hs.eps.map(ratio_pair),
            h: Some(hs.h as u64),
            modulus: hs.field.modulus().map(<[u32]>::to_vec),
            ..Header::default()
        };
        DrfDocument {
            kind: Kind::Hitting,
            header,
            body: hs.rows.clone(),
        }
    }

    pub fn from_phf(f: &PerfectHashFamily) -> Self {
        let header = Header {
            n: Some(f.n as u64),
            q: Some(f.q as u64),
            d: Some(f.d as u64),
            m: Some(f.size() as u64),
            eps: f.dense_eps.map(ratio_pair),
            ..Header::default()
        };
        DrfDocument {
            kind: Kind::Phf,
            header,
            body: f.functions.clone(),
        }
    }

    pub fn from_cff(f: &CoverFreeFamily) -> Self {
        let header = Header {
            n: Some(f.n as u64),
            w: Some(f.w as u64),
            r: Some(f.r as u64),
            m: Some(f.size() as u64),
            ..Header::default()
        };
        DrfDocument {
            kind: Kind::Cff,
            header,
            body: f.tests.clone(),
        }
    }

    pub fn from_shf(f: &SeparatingHashFamily) -> Self {
        let header = Header {
            n: Some(f.n as u64),
            q: Some(f.q as u64),
            ds: Some(f.ds.iter().map(|&d| d as u64).collect()),
            m: Some(f.size() as u64),
            ..Header::default()
        };
        DrfDocument {
            kind: Kind::Shf,
            header,
            body: f.functions.clone(),
        }
    }

    fn expect_kind(&self, kind: Kind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::InvalidParameters(format!(
                "document kind is {}, expected {kind}",
                self.kind
            )));
        }
        Ok(())
    }

    /// The field a code or hitting document is written over.
    pub fn field(&self) -> Result<FieldSpec> {
        let q = required(self.header.q, "q")?;
        FieldSpec::from_parts(q, self.header.modulus.clone())
    }

    pub fn to_code(&self) -> Result<LinearCode> {
        self.expect_kind(Kind::Code)?;
        let h = &self.header;
        let q = to_u32(required(h.q, "q")?, "q")?;
        let m = to_usize(required(h.m, "m")?, "m")?;
        let k = to_usize(required(h.k, "k")?, "k")?;
        let delta = h
            .delta_ratio()
            .ok_or_else(|| Error::InvalidParameters("header key delta_num missing".into()))?;
        let mut params = CodeParams::explicit(q, m, k, delta)?;
        params.h = h.h.map(|x| to_u32(x, "h")).transpose()?;
        if let Some(n) = h.n {
            params.n = n;
        }
        let columns = self.body.iter_rows().map(<[u32]>::to_vec).collect();
        LinearCode::from_columns(self.field()?, params, columns)
    }

    pub fn to_phf(&self) -> Result<PerfectHashFamily> {
        self.expect_kind(Kind::Phf)?;
        let h = &self.header;
        Ok(PerfectHashFamily {
            n: to_usize(required(h.n, "n")?, "n")?,
            q: to_u32(required(h.q, "q")?, "q")?,
            d: to_usize(required(h.d, "d")?, "d")?,
            functions: self.body.clone(),
            dense_eps: h.eps_ratio(),
            field_order: to_u32(required(h.q, "q")?, "q")?,
            closed_form_size: None,
        })
    }

    pub fn to_cff(&self) -> Result<CoverFreeFamily> {
        self.expect_kind(Kind::Cff)?;
        let h = &self.header;
        Ok(CoverFreeFamily {
            n: to_usize(required(h.n, "n")?, "n")?,
            w: to_usize(required(h.w, "w")?, "w")?,
            r: to_usize(required(h.r, "r")?, "r")?,
            tests: self.body.clone(),
            field_order: None,
            closed_form_size: None,
        })
    }

    pub fn to_shf(&self) -> Result<SeparatingHashFamily> {
        self.expect_kind(Kind::Shf)?;
        let h = &self.header;
        let ds = h
            .ds
            .as_ref()
            .ok_or_else(|| Error::InvalidParameters("header key ds missing".into()))?
            .iter()
            .map(|&d| to_usize(d, "ds"))
            .collect::<Result<Vec<_>>>()?;
        Ok(SeparatingHashFamily {
            n: to_usize(required(h.n, "n")?, "n")?,
            q: to_u32(required(h.q, "q")?, "q")?,
            ds,
            functions: self.body.clone(),
            field_order: None,
            closed_form_size: None,
        })
    }

    /// Row length and row count the body must have.
    fn body_shape(kind: Kind, h: &Header) -> Result<(usize, usize)> {
        let m = to_usize(required(h.m, "m")?, "m")?;
        Ok(match kind {
            Kind::Code => (to_usize(required(h.k, "k")?, "k")?, m),
            _ => (m, to_usize(required(h.n, "n")?, "n")?),
        })
    }

    /// Exclusive upper bound on body entries.
    fn alphabet(kind: Kind, h: &Header) -> Result<u64> {
        match kind {
            Kind::Cff => Ok(2),
            _ => required(h.q, "q"),
        }
    }

    fn validate(kind: Kind, h: &Header) -> Result<()> {
        for (key, pair) in [("eps", h.eps), ("delta", h.delta)] {
            if let Some((_, 0)) = pair {
                return Err(Error::InvalidParameters(format!("{key}_den must be positive")));
            }
        }
        if let Some((a, b)) = h.eps {
            if a > b {
                return Err(Error::InvalidParameters("eps must lie in [0,1]".into()));
            }
        }
        if let Some((a, b)) = h.delta {
            if a > b {
                return Err(Error::InvalidParameters("delta must lie in [0,1]".into()));
            }
        }
        if let Some(ds) = &h.ds {
            if ds.is_empty() || ds.contains(&0) {
                return Err(Error::InvalidParameters("ds entries must be positive".into()));
            }
        }
        if matches!(kind, Kind::Code | Kind::Hitting) {
            let q = required(h.q, "q")?;
            let field = FieldSpec::from_parts(q, h.modulus.clone())?;
            if field.e() > 1 && h.modulus.is_none() {
                return Err(Error::InvalidParameters(format!("q = {q} needs a modulus line")));
            }
        }
        if kind != Kind::Code && required(h.n, "n")? == 0 {
            return Err(Error::InvalidParameters("n must be positive".into()));
        }
        Ok(())
    }
}

impl fmt::Display for DrfDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{MAGIC}")?;
        writeln!(f, "kind {}", self.kind)?;
        for &(key, _) in self.kind.schema() {
            if let Some(v) = self.header.value(key) {
                writeln!(f, "{} {v}", key.name())?;
            }
        }
        writeln!(f, "body")?;
        for row in self.body.iter_rows() {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_number(tok: &str, line: usize) -> Result<u64> {
    let canonical = !tok.is_empty()
        && tok.bytes().all(|b| b.is_ascii_digit())
        && (tok == "0" || !tok.starts_with('0'));
    if !canonical {
        return Err(parse_err(line, format!("expected a decimal number, found {tok:?}")));
    }
    tok.parse()
        .map_err(|_| parse_err(line, format!("number {tok} is too large")))
}

fn parse_list(v: &str, line: usize) -> Result<Vec<u64>> {
    v.split(',').map(|t| parse_number(t, line)).collect()
}

/// Parses a DRF v1 document; any deviation from the canonical form is an error.
pub fn parse(text: &str) -> Result<DrfDocument> {
    let Some(stripped) = text.strip_suffix('\n') else {
        return Err(parse_err(text.split('\n').count(), "file must end with a line feed"));
    };
    let lines: Vec<&str> = stripped.split('\n').collect();
    let mut at = 0usize;
    let mut next = |expect: &str| -> Result<(usize, &str)> {
        let i = at;
        at += 1;
        lines
            .get(i)
            .map(|l| (i + 1, *l))
            .ok_or_else(|| parse_err(i + 1, format!("unexpected end of file, expected {expect}")))
    };
    let (no, l) = next("the magic line")?;
    if l != MAGIC {
        return Err(parse_err(no, format!("expected {MAGIC:?}")));
    }
    let (no, l) = next("the kind line")?;
    let kind: Kind = l
        .strip_prefix("kind ")
        .ok_or_else(|| parse_err(no, "expected `kind <name>`"))?
        .parse()
        .map_err(|e: Error| parse_err(no, e.to_string()))?;

    let schema = kind.schema();
    let mut header = Header::default();
    let mut pos = 0usize;
    loop {
        let (no, l) = next("a header line or `body`")?;
        if l == "body" {
            break;
        }
        let (k, v) = l
            .split_once(' ')
            .ok_or_else(|| parse_err(no, format!("malformed header line {l:?}")))?;
        let key = Key::parse(k).ok_or_else(|| parse_err(no, format!("unknown header key {k:?}")))?;
        let slot = schema[pos..]
            .iter()
            .position(|&(s, _)| s == key)
            .ok_or_else(|| parse_err(no, format!("header key {k} not allowed here for kind {kind}")))?;
        if let Some(&(missing, _)) = schema[pos..pos + slot].iter().find(|&&(_, req)| req) {
            return Err(parse_err(no, format!("header key {} missing before {k}", missing.name())));
        }
        pos += slot + 1;
        match key {
            Key::N => header.n = Some(parse_number(v, no)?),
            Key::Q => header.q = Some(parse_number(v, no)?),
            Key::D => header.d = Some(parse_number(v, no)?),
            Key::W => header.w = Some(parse_number(v, no)?),
            Key::R => header.r = Some(parse_number(v, no)?),
            Key::Ds => header.ds = Some(parse_list(v, no)?),
            Key::M => header.m = Some(parse_number(v, no)?),
            Key::K => header.k = Some(parse_number(v, no)?),
            Key::EpsNum => header.eps = Some((parse_number(v, no)?, 0)),
            Key::EpsDen => match &mut header.eps {
                Some(e) => e.1 = parse_number(v, no)?,
                None => return Err(parse_err(no, "eps_den without eps_num")),
            },
            Key::DeltaNum => header.delta = Some((parse_number(v, no)?, 0)),
            Key::DeltaDen => match &mut header.delta {
                Some(e) => e.1 = parse_number(v, no)?,
                None => return Err(parse_err(no, "delta_den without delta_num")),
            },
            Key::H => header.h = Some(parse_number(v, no)?),
            Key::Modulus => {
                let c = parse_list(v, no)?;
                header.modulus = Some(c.into_iter().map(|x| x.min(u32::MAX as u64) as u32).collect());
            }
        }
        // a numerator must be followed directly by its denominator
        if matches!(key, Key::EpsNum | Key::DeltaNum) {
            let (no, l) = next("a denominator")?;
            let want = if key == Key::EpsNum { Key::EpsDen } else { Key::DeltaDen };
            let v = l
                .strip_prefix(want.name())
                .and_then(|r| r.strip_prefix(' '))
                .ok_or_else(|| parse_err(no, format!("expected {}", want.name())))?;
            let den = parse_number(v, no)?;
            match key {
                Key::EpsNum => header.eps.as_mut().unwrap().1 = den,
                _ => header.delta.as_mut().unwrap().1 = den,
            }
            pos += 1;
        }
    }
    if let Some(&(missing, _)) = schema[pos..].iter().find(|&&(_, req)| req) {
        return Err(parse_err(at, format!("header key {} missing", missing.name())));
    }
    let header_end = at;
    DrfDocument::validate(kind, &header).map_err(|e| parse_err(header_end, e.to_string()))?;
    let (rows, cols) = DrfDocument::body_shape(kind, &header).map_err(|e| parse_err(header_end, e.to_string()))?;
    let alphabet = DrfDocument::alphabet(kind, &header)?;
    let body_lines = &lines[header_end..];
    if body_lines.len() != rows {
        return Err(parse_err(
            header_end + body_lines.len().min(rows) + 1,
            format!("body has {} rows, header says {rows}", body_lines.len()),
        ));
    }
    let mut data = Vec::with_capacity(rows);
    for (i, l) in body_lines.iter().enumerate() {
        let no = header_end + i + 1;
        let row: Vec<u32> = if l.is_empty() && cols == 0 {
            Vec::new()
        } else {
            l.split(' ')
                .map(|t| {
                    let x = parse_number(t, no)?;
                    if x >= alphabet {
                        return Err(parse_err(no, format!("entry {x} outside [0,{alphabet})")));
                    }
                    Ok(x as u32)
                })
                .collect::<Result<_>>()?
        };
        if row.len() != cols {
            return Err(parse_err(no, format!("row has {} entries, expected {cols}", row.len())));
        }
        data.push(row);
    }
    Ok(DrfDocument {
        kind,
        header,
        body: SymbolMatrix::from_rows(cols, &data),
    })
}

/// Checks the defining property of the document's object with the fast verifiers.
pub fn verify_document(doc: &DrfDocument, budget: &mut ConstraintBudget) -> Result<Verdict> {
    let h = &doc.header;
    match doc.kind {
        Kind::Code => gvcode::verify_code(&doc.to_code()?, budget),
        Kind::Hitting => {
            let d = to_usize(required(h.d, "d")?, "d")?;
            match h.eps_ratio() {
                Some(eps) => hitter::verify_hitting_density(&doc.body, d, eps, budget),
                None => hitter::verify_hitting(&doc.body, d, budget),
            }
        }
        Kind::Phf => {
            let f = doc.to_phf()?;
            match f.dense_eps {
                Some(eps) => families::verify_phf_density(&f.functions, f.d, eps, budget),
                None => families::verify_phf(&f.functions, f.d, budget),
            }
        }
        Kind::Cff => {
            let f = doc.to_cff()?;
            families::verify_cff(&f.tests, f.w, f.r, budget)
        }
        Kind::Shf => {
            let f = doc.to_shf()?;
            families::verify_shf(&f.functions, &f.ds, budget)
        }
    }
}
