//! Dense univariate polynomials over `F_q`.
//!
//! [`Poly`] is a plain coefficient vector; arithmetic goes through a
//! [`PolyRing`], a borrowed view of the coefficient field.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Elem, FieldCtx, GfError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("gcd of two zero polynomials")]
    BothZero,
    #[error("argument must be a nonzero polynomial")]
    ZeroArgument,
    #[error("{0} is not a monic irreducible polynomial")]
    NotIrreducible(String),
    #[error("cannot parse polynomial {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error(transparent)]
    Field(#[from] GfError),
}

/// Polynomial with ascending coefficients; the last stored coefficient is
/// nonzero and the zero polynomial has none.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Elem>,
}

/// Canonical order: degree first (zero polynomial smallest), then the
/// coefficient sequence compared from the constant term up.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Elem::ONE)
    }

    pub fn x() -> Poly {
        Poly {
            coeffs: vec![Elem::ZERO, Elem::ONE],
        }
    }

    pub fn constant(c: Elem) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    /// `c * x^deg`
    pub fn monomial(c: Elem, deg: usize) -> Poly {
        let mut coeffs = vec![Elem::ZERO; deg + 1];
        coeffs[deg] = c;
        Poly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Elem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    #[inline]
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Elem::ONE
    }

    pub fn leading(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Elem::ONE
    }

    /// Degree of a nonzero polynomial, 0 for zero.
    pub(crate) fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }
}

/// Canonical factorization `unit * ∏ f_i^{e_i}` with the `f_i` sorted in
/// canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Elem,
    pub factors: Vec<(Poly, u32)>,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    field: String,
    coeffs: Vec<u32>,
}

#[derive(Clone, Copy, Debug)]
pub struct PolyRing<'f> {
    field: &'f FieldCtx,
}

impl<'f> PolyRing<'f> {
    pub fn new(field: &'f FieldCtx) -> PolyRing<'f> {
        PolyRing { field }
    }

    pub fn field(&self) -> &'f FieldCtx {
        self.field
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let f = self.field;
        let (long, short) = if a.coeffs.len() >= b.coeffs.len() {
            (a, b)
        } else {
            (b, a)
        };
        let mut c = long.coeffs.clone();
        for (x, &y) in c.iter_mut().zip(&short.coeffs) {
            *x = f.add(*x, y);
        }
        Poly::from_coeffs(c)
    }

    pub fn neg(&self, a: &Poly) -> Poly {
        Poly {
            coeffs: a.coeffs.iter().map(|&c| self.field.neg(c)).collect(),
        }
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &Poly, c: Elem) -> Poly {
        Poly::from_coeffs(a.coeffs.iter().map(|&x| self.field.mul(x, c)).collect())
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let f = self.field;
        let mut c = vec![Elem::ZERO; a.coeffs.len() + b.coeffs.len() - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                c[i + j] = f.add(c[i + j], f.mul(x, y));
            }
        }
        Poly::from_coeffs(c)
    }

    pub fn pow(&self, a: &Poly, e: u32) -> Poly {
        (0..e).fold(Poly::one(), |acc, _| self.mul(&acc, a))
    }

    pub fn product<'a>(&self, polys: impl IntoIterator<Item = &'a Poly>) -> Poly {
        polys
            .into_iter()
            .fold(Poly::one(), |acc, p| self.mul(&acc, p))
    }

    /// `a = q*b + r` with `deg r < deg b`.
    pub fn divmod(&self, a: &Poly, b: &Poly) -> Result<(Poly, Poly), PolyError> {
        let db = b.degree().ok_or(PolyError::DivisionByZero)?;
        let f = self.field;
        if a.coeffs.len() <= db {
            return Ok((Poly::zero(), a.clone()));
        }
        let lead_inv = f.inv(b.leading())?;
        let mut r = a.coeffs.clone();
        let mut q = vec![Elem::ZERO; r.len() - db];
        for i in (0..q.len()).rev() {
            let c = f.mul(r[i + db], lead_inv);
            if c.is_zero() {
                continue;
            }
            q[i] = c;
            for (j, &bc) in b.coeffs.iter().enumerate() {
                r[i + j] = f.sub(r[i + j], f.mul(c, bc));
            }
        }
        r.truncate(db);
        Ok((Poly::from_coeffs(q), Poly::from_coeffs(r)))
    }

    pub fn rem(&self, a: &Poly, b: &Poly) -> Result<Poly, PolyError> {
        Ok(self.divmod(a, b)?.1)
    }

    /// Whether `a` divides `b`. Zero divides only zero.
    pub fn divides(&self, a: &Poly, b: &Poly) -> bool {
        if a.is_zero() {
            return b.is_zero();
        }
        self.divmod(b, a).map(|(_, r)| r.is_zero()).unwrap_or(false)
    }

    /// Quotient of an exact division; panics if `b` does not divide `a`.
    pub(crate) fn exact_div(&self, a: &Poly, b: &Poly) -> Poly {
        let (q, r) = self.divmod(a, b).expect("nonzero divisor");
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self, a: &Poly) -> Poly {
        if a.is_zero() || a.is_monic() {
            return a.clone();
        }
        let inv = self
            .field
            .inv(a.leading())
            .expect("nonzero leading coefficient");
        self.scale(a, inv)
    }

    /// Monic gcd by Euclid's algorithm.
    pub fn gcd(&self, a: &Poly, b: &Poly) -> Result<Poly, PolyError> {
        if a.is_zero() && b.is_zero() {
            return Err(PolyError::BothZero);
        }
        Ok(self.gcd_or_zero(a, b))
    }

    // gcd(0, 0) = 0, which is what determinantal divisors want.
    pub(crate) fn gcd_or_zero(&self, a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = self.rem(&x, &y).expect("nonzero divisor");
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    /// Monic lcm; zero if either argument is zero.
    pub fn lcm(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let g = self.gcd_or_zero(a, b);
        self.monic(&self.mul(&self.exact_div(a, &g), b))
    }

    /// Largest `e` with `f^e | g`, for monic irreducible `f`.
    pub fn nu(&self, f: &Poly, g: &Poly) -> Result<u32, PolyError> {
        if g.is_zero() || f.is_zero() {
            return Err(PolyError::ZeroArgument);
        }
        if !f.is_monic() || !self.is_irreducible(f) {
            return Err(PolyError::NotIrreducible(self.format(f)));
        }
        Ok(self.nu_unchecked(f, g))
    }

    pub(crate) fn nu_unchecked(&self, f: &Poly, g: &Poly) -> u32 {
        let mut e = 0;
        let mut rest = g.clone();
        loop {
            let (q, r) = self.divmod(&rest, f).expect("nonzero divisor");
            if !r.is_zero() {
                return e;
            }
            rest = q;
            e += 1;
        }
    }

    pub fn is_irreducible(&self, f: &Poly) -> bool {
        match f.degree() {
            None | Some(0) => false,
            Some(_) => {
                let fact = self.factorize(f).expect("nonzero");
                fact.factors.len() == 1 && fact.factors[0].1 == 1
            }
        }
    }

    /// Every monic polynomial of degree `d`, in canonical order.
    pub fn monic_of_degree(&self, d: usize) -> impl Iterator<Item = Poly> + '_ {
        let q = self.field.order() as u64;
        let total = q.pow(d as u32);
        (0..total).map(move |mut v| {
            // constant term is the most significant digit
            let mut coeffs = vec![Elem::ZERO; d + 1];
            for i in (0..d).rev() {
                coeffs[i] = Elem::from_raw((v % q) as u32);
                v /= q;
            }
            coeffs[d] = Elem::ONE;
            Poly { coeffs }
        })
    }

    /// All monic polynomials of degree at most `d`, in canonical order.
    pub fn monic_up_to(&self, d: usize) -> impl Iterator<Item = Poly> + '_ {
        (0..=d).flat_map(move |e| self.monic_of_degree(e))
    }

    /// Monic irreducibles of degree `1..=d` in canonical order, sieved by
    /// trial division against the irreducibles of smaller degree.
    pub fn irreducibles_up_to(&self, d: usize) -> Vec<Poly> {
        let mut out: Vec<Poly> = Vec::new();
        for e in 1..=d {
            let found: Vec<Poly> = self
                .monic_of_degree(e)
                .filter(|cand| {
                    out.iter()
                        .take_while(|g| 2 * g.deg0() <= e)
                        .all(|g| !self.divides(g, cand))
                })
                .collect();
            out.extend(found);
        }
        out
    }

    /// Complete factorization by trial division against the irreducibles of
    /// degree at most `deg g / 2`; whatever is left over is irreducible.
    pub fn factorize(&self, g: &Poly) -> Result<Factorization, PolyError> {
        let deg = g.degree().ok_or(PolyError::ZeroArgument)?;
        let unit = g.leading();
        let mut rest = self.monic(g);
        let mut factors = Vec::new();
        if deg >= 2 {
            for f in self.irreducibles_up_to(deg / 2) {
                if 2 * f.deg0() > rest.deg0() {
                    break;
                }
                let mut e = 0;
                loop {
                    let (q, r) = self.divmod(&rest, &f)?;
                    if !r.is_zero() {
                        break;
                    }
                    rest = q;
                    e += 1;
                }
                if e > 0 {
                    factors.push((f, e));
                }
            }
        }
        if rest.deg0() > 0 {
            factors.push((rest, 1));
        }
        factors.sort();
        Ok(Factorization { unit, factors })
    }

    pub fn reconstruct(&self, fact: &Factorization) -> Poly {
        let prod = fact
            .factors
            .iter()
            .fold(Poly::one(), |acc, (f, e)| self.mul(&acc, &self.pow(f, *e)));
        self.scale(&prod, fact.unit)
    }

    /// Renders e.g. `x^3+2*x+1`. Coefficient 1 is omitted on nonconstant
    /// terms; extension-field coefficients are bracketed, `[3]*x^2+[1]`.
    pub fn format(&self, a: &Poly) -> String {
        if a.is_zero() {
            return "0".to_string();
        }
        let bracket = !self.field.is_prime_field();
        let mut s = String::new();
        for (deg, &c) in a.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !s.is_empty() {
                s.push('+');
            }
            let show_coeff = deg == 0 || c != Elem::ONE;
            if show_coeff {
                if bracket {
                    let _ = write!(s, "[{}]", c.value());
                } else {
                    let _ = write!(s, "{}", c.value());
                }
                if deg > 0 {
                    s.push('*');
                }
            }
            match deg {
                0 => {}
                1 => s.push('x'),
                _ => {
                    let _ = write!(s, "x^{deg}");
                }
            }
        }
        s
    }

    /// Inverse of [`PolyRing::format`]. Also accepts `-` between terms, bare
    /// integers in extension fields (prime-subfield elements) and bracketed
    /// coefficients in prime fields.
    pub fn parse(&self, input: &str) -> Result<Poly, PolyError> {
        let err = |reason: &str| PolyError::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err("empty input"));
        }
        let f = self.field;
        let mut acc: Vec<Elem> = Vec::new();
        let mut rest = s.as_str();
        let mut negate = false;
        if let Some(r) = rest.strip_prefix('-') {
            negate = true;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        loop {
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let term = &rest[..end];
            if term.is_empty() {
                return Err(err("empty term"));
            }
            let (coeff, deg) = self.parse_term(term).map_err(|r| err(&r))?;
            let coeff = if negate { f.neg(coeff) } else { coeff };
            if acc.len() <= deg {
                acc.resize(deg + 1, Elem::ZERO);
            }
            acc[deg] = f.add(acc[deg], coeff);
            if end == rest.len() {
                break;
            }
            negate = rest.as_bytes()[end] == b'-';
            rest = &rest[end + 1..];
        }
        Ok(Poly::from_coeffs(acc))
    }

    fn parse_term(&self, term: &str) -> Result<(Elem, usize), String> {
        let f = self.field;
        let (coeff_part, x_part) = match term.find('x') {
            None => (term, None),
            Some(pos) => {
                let c = &term[..pos];
                let c = if c.is_empty() {
                    c
                } else {
                    c.strip_suffix('*').ok_or("expected '*' before x")?
                };
                (c, Some(&term[pos + 1..]))
            }
        };
        let coeff = if coeff_part.is_empty() {
            if x_part.is_none() {
                return Err("missing coefficient".into());
            }
            Elem::ONE
        } else if let Some(inner) = coeff_part
            .strip_prefix('[')
            .and_then(|c| c.strip_suffix(']'))
        {
            let v: i64 = inner
                .parse()
                .map_err(|_| format!("bad coefficient [{inner}]"))?;
            f.elem(v).map_err(|e| e.to_string())?
        } else {
            let v: i64 = coeff_part
                .parse()
                .map_err(|_| format!("bad coefficient {coeff_part:?}"))?;
            if v < 0 || v >= f.characteristic() as i64 {
                return Err(format!(
                    "coefficient {v} outside [0, {}); use [c] for extension-field elements",
                    f.characteristic()
                ));
            }
            f.from_int(v)
        };
        let deg = match x_part {
            None => 0,
            Some("") => 1,
            Some(e) => {
                let e = e.strip_prefix('^').ok_or("expected '^' after x")?;
                e.parse::<usize>()
                    .map_err(|_| format!("bad exponent {e:?}"))?
            }
        };
        Ok((coeff, deg))
    }

    /// `{"field": "<spec>", "coeffs": [c0, c1, ...]}`
    pub fn to_json(&self, a: &Poly) -> serde_json::Value {
        serde_json::to_value(PolyJson {
            field: self.field.spec(),
            coeffs: a.coeffs.iter().map(|c| c.value()).collect(),
        })
        .expect("plain struct serializes")
    }

    pub fn from_json(&self, v: &serde_json::Value) -> Result<Poly, PolyError> {
        let parsed: PolyJson = serde_json::from_value(v.clone()).map_err(|e| PolyError::Parse {
            input: v.to_string(),
            reason: e.to_string(),
        })?;
        let field = FieldCtx::from_spec(&parsed.field)?;
        if field != *self.field {
            return Err(PolyError::Parse {
                input: v.to_string(),
                reason: format!(
                    "field {} does not match {}",
                    parsed.field,
                    self.field.spec()
                ),
            });
        }
        let coeffs = parsed
            .coeffs
            .iter()
            .map(|&c| self.field.elem(c as i64))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Poly::from_coeffs(coeffs))
    }
}
