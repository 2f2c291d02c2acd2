//! Dense univariate polynomials and reduced rational functions over an
//! exact coefficient field, the chart change at infinity, and the
//! `3 G1^2 + G2^2` decomposition machinery.
//!
//! Degrees in this crate never exceed a few dozen, so a dense
//! representation wins on simplicity.

use crate::ellcurve::{CoefficientField, FieldError, Rationals};
use crate::exactnum::ExactRat;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Clone)]
pub enum FuncfieldError {
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("the linear system only has solutions with Q = 0")]
    NoSolution,
    #[error("field arithmetic failed: {0}")]
    Field(#[from] FieldError),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Dense polynomial, coefficients lowest degree first, no trailing zeros.
#[derive(Debug, Clone)]
pub struct Poly<K: CoefficientField> {
    coeffs: Vec<K::Elem>,
}

impl<K: CoefficientField> PartialEq for Poly<K> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

pub type RatPoly = Poly<Rationals>;
pub type RatFunc = RatFn<Rationals>;

impl<K: CoefficientField> Poly<K> {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one(k: &K) -> Self {
        Poly { coeffs: vec![k.one()] }
    }

    pub fn constant(c: K::Elem, k: &K) -> Self {
        Poly::from_coeffs(vec![c], k)
    }

    /// `c * t^e`.
    pub fn monomial(c: K::Elem, e: usize, k: &K) -> Self {
        let mut coeffs = vec![k.zero(); e + 1];
        coeffs[e] = c;
        Poly::from_coeffs(coeffs, k)
    }

    pub fn from_coeffs(mut coeffs: Vec<K::Elem>, k: &K) -> Self {
        while coeffs.last().map(|c| k.is_zero(c)).unwrap_or(false) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[K::Elem] {
        &self.coeffs
    }

    /// Coefficient of `t^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize, k: &K) -> K::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| k.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<&K::Elem> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self, k: &K) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(k.add(&self.coeff(i, k), &other.coeff(i, k)));
        }
        Poly::from_coeffs(coeffs, k)
    }

    pub fn sub(&self, other: &Self, k: &K) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(k.sub(&self.coeff(i, k), &other.coeff(i, k)));
        }
        Poly::from_coeffs(coeffs, k)
    }

    pub fn neg(&self, k: &K) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|c| k.neg(c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self, k: &K) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![k.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if k.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if k.is_zero(b) {
                    continue;
                }
                coeffs[i + j] = k.add(&coeffs[i + j], &k.mul(a, b));
            }
        }
        Poly::from_coeffs(coeffs, k)
    }

    pub fn scale(&self, c: &K::Elem, k: &K) -> Self {
        if k.is_zero(c) {
            return Poly::zero();
        }
        Poly::from_coeffs(self.coeffs.iter().map(|a| k.mul(a, c)).collect(), k)
    }

    /// Multiply by `t^e`.
    pub fn shift(&self, e: usize, k: &K) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![k.zero(); e];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn pow(&self, e: u32, k: &K) -> Self {
        let mut acc = Poly::one(k);
        for _ in 0..e {
            acc = acc.mul(self, k);
        }
        acc
    }

    /// Euclidean division; fails if the divisor's leading coefficient is
    /// not invertible.
    pub fn divrem(&self, div: &Self, k: &K) -> Result<(Self, Self), FieldError> {
        let dd = match div.degree() {
            None => return Err(FieldError::DivisionByZero),
            Some(d) => d,
        };
        let lc_inv = k.invert(div.leading().unwrap())?;
        let mut rem = self.coeffs.clone();
        let nd = self.coeffs.len();
        if nd < dd + 1 {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![k.zero(); nd - dd];
        for i in (dd..nd).rev() {
            let c = k.mul(&rem[i], &lc_inv);
            if k.is_zero(&c) {
                continue;
            }
            quot[i - dd] = c.clone();
            for (j, b) in div.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                rem[idx] = k.sub(&rem[idx], &k.mul(&c, b));
            }
        }
        Ok((Poly::from_coeffs(quot, k), Poly::from_coeffs(rem, k)))
    }

    /// Monic greatest common divisor by the Euclidean algorithm.
    pub fn gcd(&self, other: &Self, k: &K) -> Result<Self, FieldError> {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b, k)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return Ok(a);
        }
        let lc_inv = k.invert(a.leading().unwrap())?;
        Ok(a.scale(&lc_inv, k))
    }

    pub fn eval(&self, x: &K::Elem, k: &K) -> K::Elem {
        let mut acc = k.zero();
        for c in self.coeffs.iter().rev() {
            acc = k.add(&k.mul(&acc, x), c);
        }
        acc
    }

    /// Composition with a rational function argument.
    pub fn eval_ratfn(&self, u: &RatFn<K>, k: &K) -> RatFn<K> {
        let mut acc = RatFn::from_poly(Poly::zero(), k);
        for c in self.coeffs.iter().rev() {
            let c_fn = RatFn::constant(c.clone(), k);
            acc = acc.mul(u, k).add(&c_fn, k);
        }
        acc
    }

    /// Coefficients reversed: `t^deg * p(1/t)`.
    pub fn reverse(&self, k: &K) -> Self {
        let mut coeffs: Vec<K::Elem> = self.coeffs.iter().rev().cloned().collect();
        while coeffs.last().map(|c| k.is_zero(c)).unwrap_or(false) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Multiplicity of `t = 0` as a root.
    pub fn order_at_zero(&self, k: &K) -> Option<usize> {
        self.coeffs.iter().position(|c| !k.is_zero(c))
    }

    /// Exact square root of a monic polynomial of even degree, if the
    /// polynomial is a perfect square.
    pub fn monic_sqrt(&self, k: &K) -> Option<Self> {
        let deg = self.degree()?;
        if deg % 2 != 0 {
            return None;
        }
        if deg == 0 {
            return if *self == Poly::one(k) { Some(Poly::one(k)) } else { None };
        }
        debug_assert!(self.leading().map(|c| *c == k.one()).unwrap_or(false));
        let m = deg / 2;
        let half = k.invert(&k.from_int(2)).expect("2 is invertible");
        let mut q = vec![k.zero(); m + 1];
        q[m] = k.one();
        // coefficient of t^(m+i) in q^2 is 2 q_i plus cross terms with
        // indices strictly between i and m; solve from the top down
        for i in (0..m).rev() {
            let mut s = k.zero();
            for a in (i + 1)..m {
                let b = m + i - a;
                if b > i && b < m {
                    s = k.add(&s, &k.mul(&q[a], &q[b]));
                }
            }
            let target = self.coeff(m + i, k);
            q[i] = k.mul(&k.sub(&target, &s), &half);
        }
        let q = Poly::from_coeffs(q, k);
        if q.mul(&q, k) == *self {
            Some(q)
        } else {
            None
        }
    }

    pub fn map_coeffs<F: Fn(&K::Elem) -> K::Elem>(&self, f: F, k: &K) -> Self {
        Poly::from_coeffs(self.coeffs.iter().map(f).collect(), k)
    }

    pub fn format(&self, k: &K) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if k.is_zero(c) {
                continue;
            }
            let s = k.fmt_elem(c);
            let term = match i {
                0 => s,
                1 => format!("{s}*t"),
                _ => format!("{s}*t^{i}"),
            };
            if out.is_empty() {
                out = term;
            } else if let Some(stripped) = term.strip_prefix('-') {
                out = format!("{out}-{stripped}");
            } else {
                out = format!("{out}+{term}");
            }
        }
        out
    }
}

/// Reduced rational function: coprime numerator/denominator, monic
/// denominator. Equality is structural.
#[derive(Debug, Clone)]
pub struct RatFn<K: CoefficientField> {
    num: Poly<K>,
    den: Poly<K>,
}

impl<K: CoefficientField> PartialEq for RatFn<K> {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl<K: CoefficientField> RatFn<K> {
    /// Reduce `num/den` to lowest terms with a monic denominator.
    pub fn new(num: Poly<K>, den: Poly<K>, k: &K) -> Result<Self, FuncfieldError> {
        if den.is_zero() {
            return Err(FuncfieldError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RatFn { num: Poly::zero(), den: Poly::one(k) });
        }
        let g = num.gcd(&den, k)?;
        let (num, _) = num.divrem(&g, k)?;
        let (den, _) = den.divrem(&g, k)?;
        let lc_inv = k.invert(den.leading().expect("non-zero"))?;
        Ok(RatFn { num: num.scale(&lc_inv, k), den: den.scale(&lc_inv, k) })
    }

    pub fn from_poly(p: Poly<K>, k: &K) -> Self {
        RatFn { num: p, den: Poly::one(k) }
    }

    pub fn constant(c: K::Elem, k: &K) -> Self {
        RatFn { num: Poly::constant(c, k), den: Poly::one(k) }
    }

    pub fn num(&self) -> &Poly<K> {
        &self.num
    }

    pub fn den(&self) -> &Poly<K> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &Self, k: &K) -> Self {
        let num = self
            .num
            .mul(&other.den, k)
            .add(&other.num.mul(&self.den, k), k);
        let den = self.den.mul(&other.den, k);
        RatFn::new(num, den, k).expect("denominators non-zero")
    }

    pub fn sub(&self, other: &Self, k: &K) -> Self {
        self.add(&other.neg(k), k)
    }

    pub fn neg(&self, k: &K) -> Self {
        RatFn { num: self.num.neg(k), den: self.den.clone() }
    }

    pub fn mul(&self, other: &Self, k: &K) -> Self {
        let num = self.num.mul(&other.num, k);
        let den = self.den.mul(&other.den, k);
        RatFn::new(num, den, k).expect("denominators non-zero")
    }

    pub fn div(&self, other: &Self, k: &K) -> Result<Self, FieldError> {
        if other.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let num = self.num.mul(&other.den, k);
        let den = self.den.mul(&other.num, k);
        RatFn::new(num, den, k).map_err(|e| match e {
            FuncfieldError::Field(f) => f,
            _ => FieldError::DivisionByZero,
        })
    }

    /// Is the denominator trivial?
    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn map_coeffs<F: Fn(&K::Elem) -> K::Elem>(&self, f: F, k: &K) -> Self {
        RatFn {
            num: self.num.map_coeffs(&f, k),
            den: self.den.map_coeffs(&f, k),
        }
    }

    pub fn format(&self, k: &K) -> String {
        let num = self.num.format(k);
        if self.is_polynomial() {
            num
        } else {
            format!("({})/({})", num, self.den.format(k))
        }
    }
}

/// Spec-level reduce: coprime pair with monic denominator.
pub fn reduce(num: RatPoly, den: RatPoly) -> Result<RatFunc, FuncfieldError> {
    RatFn::new(num, den, &Rationals)
}

/// Substitutes `t = 1/s` and rescales by `s^2` (the coordinate change to
/// the integral model at infinity). Returns the reduced value and the
/// pole order of the result at `s = 0`.
pub fn infinity_chart<K: CoefficientField>(x: &RatFn<K>, k: &K) -> (RatFn<K>, usize) {
    if x.is_zero() {
        return (RatFn::from_poly(Poly::zero(), k), 0);
    }
    let dp = x.num().degree().unwrap();
    let dq = x.den().degree().unwrap();
    let rev_num = x.num().reverse(k);
    let rev_den = x.den().reverse(k);
    let e: i64 = 2 + dq as i64 - dp as i64;
    let (num, den) = if e >= 0 {
        (rev_num.shift(e as usize, k), rev_den)
    } else {
        (rev_num, rev_den.shift((-e) as usize, k))
    };
    let val = RatFn::new(num, den, k).expect("denominator non-zero");
    let pole = if val.is_zero() {
        0
    } else {
        val.den().order_at_zero(k).unwrap_or(0)
    };
    (val, pole)
}

/// Checks the exact polynomial identity `G = C (3 G1^2 + G2^2)`.
pub fn verify_3sq_decomposition(
    g: &RatPoly,
    c: &ExactRat,
    g1: &RatPoly,
    g2: &RatPoly,
) -> bool {
    let k = Rationals;
    let three = Poly::constant(k.from_int(3), &k);
    let sum = three
        .mul(&g1.mul(g1, &k), &k)
        .add(&g2.mul(g2, &k), &k)
        .scale(c, &k);
    *g == sum
}

/// Solves claim-style linear systems: given `f` of even degree `2d` and
/// `delta` in `Q[alpha]/f` (coefficient vector of length `2d`), finds
/// `P, Q` with `deg P <= d`, `deg Q <= d-1`, `Q != 0` and
/// `P(alpha) = delta * Q(alpha) mod f`.
///
/// The null space basis vector is chosen under a deterministic
/// elimination order (the fraction `P/Q` is unique even though the pair
/// is not).
pub fn radical_ratio(
    f: &RatPoly,
    delta: &[ExactRat],
) -> Result<(RatPoly, RatPoly), FuncfieldError> {
    let k = Rationals;
    let deg_f = f.degree().filter(|d| d % 2 == 0 && *d >= 2).ok_or_else(|| {
        FuncfieldError::Parse("f must be non-zero of even degree 2d >= 2".into())
    })?;
    let d = deg_f / 2;
    if delta.len() != deg_f {
        return Err(FuncfieldError::Parse(format!(
            "delta must have {} coefficients",
            deg_f
        )));
    }

    // columns: delta * alpha^k mod f, for k = 0..d-1
    let delta_poly = Poly::from_coeffs(delta.to_vec(), &k);
    let mut cols: Vec<Poly<Rationals>> = Vec::with_capacity(d);
    let t = Poly::monomial(k.one(), 1, &k);
    let mut cur = {
        let (_, r) = delta_poly.divrem(f, &k).map_err(FuncfieldError::Field)?;
        r
    };
    for _ in 0..d {
        cols.push(cur.clone());
        let (_, r) = cur.mul(&t, &k).divrem(f, &k).map_err(FuncfieldError::Field)?;
        cur = r;
    }

    // constraint rows: coefficients of alpha^j for j in d+1..=2d-1
    let rows: Vec<usize> = ((d + 1)..deg_f).collect();
    let mut mat: Vec<Vec<ExactRat>> = rows
        .iter()
        .map(|&j| cols.iter().map(|c| c.coeff(j, &k)).collect())
        .collect();

    // Gaussian elimination, deterministic order: scan columns left to
    // right, pick the first unused row with a non-zero entry.
    let nrows = mat.len();
    let ncols = d;
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut used = vec![false; nrows];
    for col in 0..ncols {
        let Some(r) = (0..nrows).find(|&r| !used[r] && !mat[r][col].is_zero()) else {
            continue;
        };
        used[r] = true;
        pivot_of_col[col] = Some(r);
        let inv = mat[r][col].clone().recip();
        for c in 0..ncols {
            mat[r][c] = &mat[r][c] * &inv;
        }
        for rr in 0..nrows {
            if rr != r && !mat[rr][col].is_zero() {
                let factor = mat[rr][col].clone();
                for c in 0..ncols {
                    let sub = &mat[r][c] * &factor;
                    mat[rr][c] = &mat[rr][c] - &sub;
                }
            }
        }
    }
    let free_col = (0..ncols).find(|&c| pivot_of_col[c].is_none());
    let Some(free) = free_col else {
        return Err(FuncfieldError::NoSolution);
    };
    let mut b = vec![ExactRat::zero(); ncols];
    b[free] = ExactRat::one();
    for c in 0..ncols {
        if let Some(r) = pivot_of_col[c] {
            b[c] = -mat[r][free].clone();
        }
    }

    let q_poly = Poly::from_coeffs(b, &k);
    if q_poly.is_zero() {
        return Err(FuncfieldError::NoSolution);
    }
    let prod = delta_poly.mul(&q_poly, &k);
    let (_, p_poly) = prod.divrem(f, &k).map_err(FuncfieldError::Field)?;
    debug_assert!(p_poly.degree().map(|dp| dp <= d).unwrap_or(true));
    Ok((p_poly, q_poly))
}

/// Modular inverse in `Q[alpha]/f` by the extended Euclidean algorithm.
pub fn poly_mod_inverse(el: &RatPoly, f: &RatPoly) -> Option<RatPoly> {
    let k = Rationals;
    let (mut r0, mut r1) = (f.clone(), {
        let (_, r) = el.divrem(f, &k).ok()?;
        r
    });
    let (mut s0, mut s1) = (Poly::zero(), Poly::one(&k));
    while !r1.is_zero() {
        let (q, r) = r0.divrem(&r1, &k).ok()?;
        let s = s0.sub(&q.mul(&s1, &k), &k);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    if r0.degree() != Some(0) {
        return None; // gcd not a unit: element not invertible mod f
    }
    let c = k.invert(r0.leading().unwrap()).ok()?;
    Some(s0.scale(&c, &k))
}

/// Parses the polynomial text grammar: signed monomials `c*t^k` joined by
/// `+`/`-`, rationals as `p/q`. Both ASCII `-` and Unicode minus are
/// accepted.
pub fn parse_poly(input: &str) -> Result<RatPoly, FuncfieldError> {
    let k = Rationals;
    let cleaned: String = input
        .chars()
        .map(|c| if c == '\u{2212}' { '-' } else { c })
        .filter(|c| !c.is_whitespace())
        .collect();
    if cleaned.is_empty() {
        return Err(FuncfieldError::Parse("empty polynomial".into()));
    }
    let bytes = cleaned.as_bytes();
    let mut terms: Vec<(usize, usize)> = Vec::new(); // (start, end)
    let mut start = 0;
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' && bytes[i - 1] != b'*'
            && bytes[i - 1] != b'+' && bytes[i - 1] != b'-' && bytes[i - 1] != b'/'
        {
            terms.push((start, i));
            start = i;
        }
    }
    terms.push((start, bytes.len()));

    let mut acc = Poly::zero();
    for (s, e) in terms {
        let term = &cleaned[s..e];
        let (sign, body) = match term.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1i64, term.strip_prefix('+').unwrap_or(term)),
        };
        if body.is_empty() {
            return Err(FuncfieldError::Parse(format!("dangling sign in '{input}'")));
        }
        let (coeff_str, exp) = match body.find('t') {
            None => (body, 0usize),
            Some(tpos) => {
                let coeff = body[..tpos].trim_end_matches('*');
                let after = &body[tpos + 1..];
                let exp = if after.is_empty() {
                    1
                } else if let Some(e_str) = after.strip_prefix('^') {
                    e_str
                        .parse::<usize>()
                        .map_err(|_| FuncfieldError::Parse(format!("bad exponent in '{term}'")))?
                } else {
                    return Err(FuncfieldError::Parse(format!("bad term '{term}'")));
                };
                (coeff, exp)
            }
        };
        let coeff: ExactRat = if coeff_str.is_empty() {
            ExactRat::one()
        } else {
            parse_rat(coeff_str)?
        };
        let signed = coeff * ExactRat::from_integer(sign.into());
        acc = acc.add(&Poly::monomial(signed, exp, &k), &k);
    }
    Ok(acc)
}

fn parse_rat(s: &str) -> Result<ExactRat, FuncfieldError> {
    let parse_int = |v: &str| {
        v.parse::<num_bigint::BigInt>()
            .map_err(|_| FuncfieldError::Parse(format!("bad number '{v}'")))
    };
    match s.split_once('/') {
        None => Ok(ExactRat::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(FuncfieldError::Parse("zero denominator".into()));
            }
            Ok(ExactRat::new(parse_int(p)?, den))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k() -> Rationals {
        Rationals
    }

    fn p(s: &str) -> RatPoly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let r = reduce(p("t^2-1"), p("t-1")).unwrap();
        assert_eq!(r.num(), &p("t+1"));
        assert_eq!(r.den(), &Poly::one(&k()));

        let r = reduce(p("2*t"), p("2")).unwrap();
        assert_eq!(r.num(), &p("t"));

        let r = reduce(Poly::zero(), p("t^3")).unwrap();
        assert!(r.is_zero());

        assert_eq!(
            reduce(p("1"), Poly::zero()).unwrap_err(),
            FuncfieldError::ZeroDenominator
        );
    }

    #[test]
    fn monic_denominator_normalization() {
        let r = reduce(p("3*t+3"), p("2*t^2-2")).unwrap();
        // (3t+3)/(2t^2-2) = 3/(2t-2) = (3/2)/(t-1)
        assert_eq!(r.den(), &p("t-1"));
        assert_eq!(r.num(), &p("3/2"));
    }

    #[test]
    fn infinity_chart_examples() {
        let kk = k();
        // x = -3t^2 -> (-3, 0)
        let x = RatFn::new(p("-3*t^2"), Poly::one(&kk), &kk).unwrap();
        let (val, pole) = infinity_chart(&x, &kk);
        assert_eq!(val.num(), &p("-3"));
        assert!(val.is_polynomial());
        assert_eq!(pole, 0);

        // constant c -> (c s^2, 0)
        let x = RatFn::new(p("5"), Poly::one(&kk), &kk).unwrap();
        let (val, pole) = infinity_chart(&x, &kk);
        assert_eq!(val.num(), &p("5*t^2"));
        assert_eq!(pole, 0);

        // kappa t^4 -> (kappa / s^2, 2)
        let x = RatFn::new(p("7*t^4"), Poly::one(&kk), &kk).unwrap();
        let (val, pole) = infinity_chart(&x, &kk);
        assert_eq!(val.num(), &p("7"));
        assert_eq!(val.den(), &p("t^2"));
        assert_eq!(pole, 2);
    }

    #[test]
    fn three_square_decomposition_examples() {
        let one = ExactRat::one();
        assert!(verify_3sq_decomposition(&p("3*t^6+1"), &one, &p("t^3"), &p("1")));
        assert!(verify_3sq_decomposition(&p("27*t^6+16"), &one, &p("3*t^3"), &p("4")));
        assert!(!verify_3sq_decomposition(&p("t^6+1"), &one, &p("t^3"), &p("1")));
    }

    #[test]
    fn radical_ratio_trivial() {
        // f = t^2 + 3, delta = alpha -> P = t, Q = 1
        let f = p("t^2+3");
        let delta = vec![ExactRat::zero(), ExactRat::one()];
        let (pp, qq) = radical_ratio(&f, &delta).unwrap();
        let ratio_check = check_ratio(&f, &delta, &pp, &qq);
        assert!(ratio_check);
        assert_eq!(pp, p("t"));
        assert_eq!(qq, p("1"));
    }

    #[test]
    fn radical_ratio_sqrt_minus3_in_cyclotomic() {
        // f = t^4 - t^2 + 1, delta = 2 alpha^2 - 1 (a square root of -3)
        let f = p("t^4-t^2+1");
        let delta: Vec<ExactRat> = vec![
            ExactRat::from_integer((-1).into()),
            ExactRat::zero(),
            ExactRat::from_integer(2.into()),
            ExactRat::zero(),
        ];
        let (pp, qq) = radical_ratio(&f, &delta).unwrap();
        assert!(check_ratio(&f, &delta, &pp, &qq));
        // P/Q = (2t^2-1)/1
        assert_eq!(pp, p("2*t^2-1"));
        assert_eq!(qq, p("1"));
        // P^2 = -3 Q^2 mod f
        let kk = k();
        let lhs = pp.mul(&pp, &kk);
        let rhs = qq.mul(&qq, &kk).scale(&ExactRat::from_integer((-3).into()), &kk);
        let (_, r) = lhs.sub(&rhs, &kk).divrem(&f, &kk).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn radical_ratio_with_ring_inverse() {
        // delta = (2 alpha^2 - 1) * alpha^{-1} mod f -> P = 2t^2-1, Q = t
        let f = p("t^4-t^2+1");
        let kk = k();
        let alpha_inv = poly_mod_inverse(&p("t"), &f).unwrap();
        let sqrt_m3 = p("2*t^2-1");
        let (_, delta_poly) = sqrt_m3.mul(&alpha_inv, &kk).divrem(&f, &kk).unwrap();
        let mut delta = vec![ExactRat::zero(); 4];
        for i in 0..4 {
            delta[i] = delta_poly.coeff(i, &kk);
        }
        let (pp, qq) = radical_ratio(&f, &delta).unwrap();
        assert!(check_ratio(&f, &delta, &pp, &qq));
        assert_eq!(pp, p("2*t^2-1"));
        assert_eq!(qq, p("t"));
    }

    fn check_ratio(f: &RatPoly, delta: &[ExactRat], pp: &RatPoly, qq: &RatPoly) -> bool {
        // f | (P - delta Q)
        let kk = k();
        let delta_poly = Poly::from_coeffs(delta.to_vec(), &kk);
        let diff = pp.sub(&delta_poly.mul(qq, &kk), &kk);
        let (_, r) = diff.divrem(f, &kk).unwrap();
        r.is_zero() && !qq.is_zero()
    }

    #[test]
    fn parse_and_format_roundtrip() {
        for s in ["27*t^6+16", "-3*t^2", "t^3-t+1/2", "5", "-1/3*t^4+2*t", "t"] {
            let poly = p(s);
            let printed = poly.format(&k());
            assert_eq!(p(&printed), poly, "roundtrip failed for {s}");
        }
    }

    #[test]
    fn monic_sqrt_works() {
        let kk = k();
        let q = p("t^3+2*t-5");
        let sq = q.mul(&q, &kk);
        // normalize monic (it already is)
        assert_eq!(sq.monic_sqrt(&kk), Some(q));
        assert_eq!(p("t^2+1").monic_sqrt(&kk), None);
        assert_eq!(p("t^2+2*t+1").monic_sqrt(&kk), Some(p("t+1")));
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent_and_cross_multiplies(
            n in proptest::collection::vec(-9i64..9, 0..5),
            d in proptest::collection::vec(-9i64..9, 1..5),
        ) {
            let kk = k();
            let num = Poly::from_coeffs(
                n.iter().map(|&c| ExactRat::from_integer(c.into())).collect(), &kk);
            let den = Poly::from_coeffs(
                d.iter().map(|&c| ExactRat::from_integer(c.into())).collect(), &kk);
            prop_assume!(!den.is_zero());
            let r = RatFn::new(num.clone(), den.clone(), &kk).unwrap();
            // idempotent
            let r2 = RatFn::new(r.num().clone(), r.den().clone(), &kk).unwrap();
            prop_assert_eq!(&r2, &r);
            // cross-multiplication: num * r.den == r.num * den
            let lhs = num.mul(r.den(), &kk);
            let rhs = r.num().mul(&den, &kk);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn three_square_roundtrip(
            c in -20i64..20,
            g1 in proptest::collection::vec(-5i64..5, 1..4),
            g2 in proptest::collection::vec(-5i64..5, 1..4),
        ) {
            prop_assume!(c != 0);
            let kk = k();
            let c = ExactRat::from_integer(c.into());
            let g1 = Poly::from_coeffs(
                g1.iter().map(|&x| ExactRat::from_integer(x.into())).collect(), &kk);
            let g2 = Poly::from_coeffs(
                g2.iter().map(|&x| ExactRat::from_integer(x.into())).collect(), &kk);
            let three = Poly::constant(ExactRat::from_integer(3.into()), &kk);
            let g = three.mul(&g1.mul(&g1, &kk), &kk).add(&g2.mul(&g2, &kk), &kk).scale(&c, &kk);
            prop_assert!(verify_3sq_decomposition(&g, &c, &g1, &g2));
        }
    }
}
