//! Weierstrass group law for `y^2 = x^3 + A t^6 + B` with coordinates in
//! `F(t)`, generic over the coefficient field `F`.
//!
//! The same code path serves `F = Q` (rational bases), `F = Q(zeta_3)`
//! (branch instantiation of radical templates) and the 216-dimensional
//! tower ring housing all radicals of `A` and `B` (orbit verification).

use crate::exactnum::ExactRat;
use crate::funcfield::{Poly, RatFn};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero divisor encountered (pick a more generic A, B)")]
    ZeroDivisor,
}

/// Field operations demanded of a coefficient domain.
///
/// `invert` may fail: with `ZeroDivisor` in the tower ring (a quotient
/// ring, not a field, for special parameter values), with
/// `DivisionByZero` everywhere on zero.
pub trait CoefficientField: Clone {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn invert(&self, a: &Self::Elem) -> Result<Self::Elem, FieldError>;
    fn from_rat(&self, q: &ExactRat) -> Self::Elem;
    fn fmt_elem(&self, a: &Self::Elem) -> String;

    fn from_int(&self, n: i64) -> Self::Elem {
        self.from_rat(&ExactRat::from_integer(n.into()))
    }
}

/// The rational numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl CoefficientField for Rationals {
    type Elem = ExactRat;

    fn zero(&self) -> ExactRat {
        ExactRat::zero()
    }
    fn one(&self) -> ExactRat {
        ExactRat::one()
    }
    fn add(&self, a: &ExactRat, b: &ExactRat) -> ExactRat {
        a + b
    }
    fn sub(&self, a: &ExactRat, b: &ExactRat) -> ExactRat {
        a - b
    }
    fn mul(&self, a: &ExactRat, b: &ExactRat) -> ExactRat {
        a * b
    }
    fn neg(&self, a: &ExactRat) -> ExactRat {
        -a
    }
    fn is_zero(&self, a: &ExactRat) -> bool {
        a.is_zero()
    }
    fn invert(&self, a: &ExactRat) -> Result<ExactRat, FieldError> {
        if a.is_zero() {
            Err(FieldError::DivisionByZero)
        } else {
            Ok(a.recip())
        }
    }
    fn from_rat(&self, q: &ExactRat) -> ExactRat {
        q.clone()
    }
    fn fmt_elem(&self, a: &ExactRat) -> String {
        a.to_string()
    }
}

/// The Eisenstein field `Q(zeta_3)`, elements `a + b z` with
/// `z^2 + z + 1 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Eisenstein;

/// Element of `Q(zeta_3)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EisElem {
    pub re: ExactRat,
    pub zc: ExactRat,
}

impl EisElem {
    pub fn new(re: ExactRat, zc: ExactRat) -> Self {
        EisElem { re, zc }
    }

    pub fn from_int(re: i64, zc: i64) -> Self {
        EisElem {
            re: ExactRat::from_integer(re.into()),
            zc: ExactRat::from_integer(zc.into()),
        }
    }

    /// zeta_3 itself.
    pub fn zeta() -> Self {
        EisElem::from_int(0, 1)
    }

    /// Is the element rational, i.e. has no zeta_3 component?
    pub fn is_rational(&self) -> bool {
        self.zc.is_zero()
    }
}

impl Eisenstein {
    /// zeta_3^k for any integer k.
    pub fn zeta_pow(&self, k: i64) -> EisElem {
        match k.rem_euclid(3) {
            0 => self.one(),
            1 => EisElem::zeta(),
            _ => EisElem::from_int(-1, -1),
        }
    }
}

impl CoefficientField for Eisenstein {
    type Elem = EisElem;

    fn zero(&self) -> EisElem {
        EisElem::from_int(0, 0)
    }
    fn one(&self) -> EisElem {
        EisElem::from_int(1, 0)
    }
    fn add(&self, a: &EisElem, b: &EisElem) -> EisElem {
        EisElem::new(&a.re + &b.re, &a.zc + &b.zc)
    }
    fn sub(&self, a: &EisElem, b: &EisElem) -> EisElem {
        EisElem::new(&a.re - &b.re, &a.zc - &b.zc)
    }
    fn mul(&self, a: &EisElem, b: &EisElem) -> EisElem {
        // (a + bz)(c + dz) = ac - bd + (ad + bc - bd) z  using z^2 = -1 - z
        let ac = &a.re * &b.re;
        let bd = &a.zc * &b.zc;
        let ad_bc = &a.re * &b.zc + &a.zc * &b.re;
        EisElem::new(ac - &bd, ad_bc - bd)
    }
    fn neg(&self, a: &EisElem) -> EisElem {
        EisElem::new(-&a.re, -&a.zc)
    }
    fn is_zero(&self, a: &EisElem) -> bool {
        a.re.is_zero() && a.zc.is_zero()
    }
    fn invert(&self, a: &EisElem) -> Result<EisElem, FieldError> {
        if self.is_zero(a) {
            return Err(FieldError::DivisionByZero);
        }
        // norm (a+bz)(a-b-bz) = a^2 - ab + b^2
        let norm = &a.re * &a.re - &a.re * &a.zc + &a.zc * &a.zc;
        let n_inv = norm.recip();
        Ok(EisElem::new((&a.re - &a.zc) * &n_inv, -&a.zc * n_inv))
    }
    fn from_rat(&self, q: &ExactRat) -> EisElem {
        EisElem::new(q.clone(), ExactRat::zero())
    }
    fn fmt_elem(&self, a: &EisElem) -> String {
        if a.zc.is_zero() {
            a.re.to_string()
        } else if a.re.is_zero() {
            format!("{}*z", a.zc)
        } else {
            format!("{}{}{}*z", a.re, if a.zc.is_negative() { "" } else { "+" }, a.zc)
        }
    }
}

/// A real quadratic extension `Q(sqrt(d))` for a non-square rational `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadExt {
    pub d: ExactRat,
}

/// Element `a + b sqrt(d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadElem {
    pub a: ExactRat,
    pub b: ExactRat,
}

impl CoefficientField for QuadExt {
    type Elem = QuadElem;

    fn zero(&self) -> QuadElem {
        QuadElem { a: ExactRat::zero(), b: ExactRat::zero() }
    }
    fn one(&self) -> QuadElem {
        QuadElem { a: ExactRat::one(), b: ExactRat::zero() }
    }
    fn add(&self, x: &QuadElem, y: &QuadElem) -> QuadElem {
        QuadElem { a: &x.a + &y.a, b: &x.b + &y.b }
    }
    fn sub(&self, x: &QuadElem, y: &QuadElem) -> QuadElem {
        QuadElem { a: &x.a - &y.a, b: &x.b - &y.b }
    }
    fn mul(&self, x: &QuadElem, y: &QuadElem) -> QuadElem {
        QuadElem {
            a: &x.a * &y.a + &x.b * &y.b * &self.d,
            b: &x.a * &y.b + &x.b * &y.a,
        }
    }
    fn neg(&self, x: &QuadElem) -> QuadElem {
        QuadElem { a: -&x.a, b: -&x.b }
    }
    fn is_zero(&self, x: &QuadElem) -> bool {
        x.a.is_zero() && x.b.is_zero()
    }
    fn invert(&self, x: &QuadElem) -> Result<QuadElem, FieldError> {
        if self.is_zero(x) {
            return Err(FieldError::DivisionByZero);
        }
        let norm = &x.a * &x.a - &x.b * &x.b * &self.d;
        if norm.is_zero() {
            // d was a square after all
            return Err(FieldError::ZeroDivisor);
        }
        let n_inv = norm.recip();
        Ok(QuadElem { a: &x.a * &n_inv, b: -&x.b * n_inv })
    }
    fn from_rat(&self, q: &ExactRat) -> QuadElem {
        QuadElem { a: q.clone(), b: ExactRat::zero() }
    }
    fn fmt_elem(&self, x: &QuadElem) -> String {
        format!("{}+{}*sqrt({})", x.a, x.b, self.d)
    }
}

#[derive(Debug, Error, PartialEq, Clone)]
pub enum CurveError {
    #[error("inversion failure in group law: {0}")]
    InversionFailure(#[from] FieldError),
    #[error("point is not on the curve")]
    NotOnCurve,
}

/// Affine point or point at infinity with coordinates in `F(t)`.
#[derive(Debug, Clone)]
pub enum CurvePoint<K: CoefficientField> {
    Infinity,
    Affine(RatFn<K>, RatFn<K>),
}

impl<K: CoefficientField> PartialEq for CurvePoint<K> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (CurvePoint::Infinity, CurvePoint::Infinity) => true,
            (CurvePoint::Affine(x1, y1), CurvePoint::Affine(x2, y2)) => x1 == x2 && y1 == y2,
            _ => false,
        }
    }
}

impl<K: CoefficientField> CurvePoint<K> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<&RatFn<K>> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine(x, _) => Some(x),
        }
    }

    pub fn y(&self) -> Option<&RatFn<K>> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine(_, y) => Some(y),
        }
    }
}

/// The curve `y^2 = x^3 + A t^6 + B` over `F(t)`.
#[derive(Debug, Clone)]
pub struct Curve<K: CoefficientField> {
    pub field: K,
    pub coeff_a: K::Elem,
    pub coeff_b: K::Elem,
    rhs: Poly<K>,
}

impl<K: CoefficientField> Curve<K> {
    pub fn new(field: K, coeff_a: K::Elem, coeff_b: K::Elem) -> Self {
        assert!(!field.is_zero(&coeff_a) && !field.is_zero(&coeff_b), "A and B must be non-zero");
        let mut coeffs = vec![field.zero(); 7];
        coeffs[0] = coeff_b.clone();
        coeffs[6] = coeff_a.clone();
        let rhs = Poly::from_coeffs(coeffs, &field);
        Curve { field, coeff_a, coeff_b, rhs }
    }

    /// The right-hand side `A t^6 + B` as a polynomial.
    pub fn rhs_poly(&self) -> &Poly<K> {
        &self.rhs
    }

    /// Exact curve-membership check after clearing denominators.
    pub fn on_curve(&self, pt: &CurvePoint<K>) -> bool {
        match pt {
            CurvePoint::Infinity => true,
            CurvePoint::Affine(x, y) => {
                let k = &self.field;
                // y^2 - x^3 - (A t^6 + B) == 0 in F(t)
                let y2 = y.mul(y, k);
                let x3 = x.mul(x, k).mul(x, k);
                let rhs_fn = RatFn::from_poly(self.rhs.clone(), k);
                y2.sub(&x3, k).sub(&rhs_fn, k).is_zero()
            }
        }
    }

    pub fn negate(&self, pt: &CurvePoint<K>) -> CurvePoint<K> {
        match pt {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => CurvePoint::Affine(x.clone(), y.neg(&self.field)),
        }
    }

    /// Chord-and-tangent addition. Dispatch is by exact x-equality; no
    /// epsilon anywhere.
    pub fn add(&self, p1: &CurvePoint<K>, p2: &CurvePoint<K>) -> Result<CurvePoint<K>, CurveError> {
        let k = &self.field;
        let (x1, y1, x2, y2) = match (p1, p2) {
            (CurvePoint::Infinity, _) => return Ok(p2.clone()),
            (_, CurvePoint::Infinity) => return Ok(p1.clone()),
            (CurvePoint::Affine(x1, y1), CurvePoint::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            let y_sum = y1.add(y2, k);
            if y_sum.is_zero() {
                return Ok(CurvePoint::Infinity);
            }
            if y1 != y2 {
                // y1^2 = y2^2 with y1 != +-y2: only possible through a
                // zero divisor in a non-field coefficient ring
                return Err(CurveError::InversionFailure(FieldError::ZeroDivisor));
            }
            // tangent: (3 x^2) / (2 y)
            let three = RatFn::constant(k.from_int(3), k);
            let x_sq = x1.mul(x1, k);
            three.mul(&x_sq, k).div(&y_sum, k)?
        } else {
            let dy = y2.sub(y1, k);
            let dx = x2.sub(x1, k);
            dy.div(&dx, k)?
        };
        let x3 = lambda.mul(&lambda, k).sub(x1, k).sub(x2, k);
        let y3 = lambda.mul(&x1.sub(&x3, k), k).sub(y1, k);
        Ok(CurvePoint::Affine(x3, y3))
    }

    pub fn sub(&self, p1: &CurvePoint<K>, p2: &CurvePoint<K>) -> Result<CurvePoint<K>, CurveError> {
        self.add(p1, &self.negate(p2))
    }

    /// `n`-fold sum by double-and-add; `scalar_mul(0, p)` is infinity.
    pub fn scalar_mul(&self, n: i64, pt: &CurvePoint<K>) -> Result<CurvePoint<K>, CurveError> {
        let (mut n, base) = if n < 0 {
            (-n as u64, self.negate(pt))
        } else {
            (n as u64, pt.clone())
        };
        let mut acc = CurvePoint::Infinity;
        let mut pow = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(&acc, &pow)?;
            }
            n >>= 1;
            if n > 0 {
                pow = self.add(&pow, &pow)?;
            }
        }
        Ok(acc)
    }

    /// Folds a signed combination `sum_i c_i P_i`.
    pub fn linear_combination(
        &self,
        terms: &[(i64, CurvePoint<K>)],
    ) -> Result<CurvePoint<K>, CurveError> {
        let mut acc = CurvePoint::Infinity;
        for (c, p) in terms {
            let t = self.scalar_mul(*c, p)?;
            acc = self.add(&acc, &t)?;
        }
        Ok(acc)
    }

    /// Formats a point in the `(x, y)` text form.
    pub fn format_point(&self, pt: &CurvePoint<K>) -> String {
        match pt {
            CurvePoint::Infinity => "infinity".to_string(),
            CurvePoint::Affine(x, y) => {
                format!("({}, {})", x.format(&self.field), y.format(&self.field))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::parse_poly;

    fn rat_curve(a: i64, b: i64) -> Curve<Rationals> {
        let k = Rationals;
        Curve::new(k, k.from_int(a), k.from_int(b))
    }

    fn pt(c: &Curve<Rationals>, x: &str, y: &str) -> CurvePoint<Rationals> {
        let xs: Vec<&str> = x.split('|').collect();
        let ys: Vec<&str> = y.split('|').collect();
        let parse = |parts: Vec<&str>| -> RatFn<Rationals> {
            let num = parse_poly(parts[0]).unwrap();
            let den = if parts.len() > 1 {
                parse_poly(parts[1]).unwrap()
            } else {
                Poly::one(&Rationals)
            };
            RatFn::new(num, den, &Rationals).unwrap()
        };
        let p = CurvePoint::Affine(parse(xs), parse(ys));
        assert!(c.on_curve(&p), "test point not on curve");
        p
    }

    #[test]
    fn on_curve_examples() {
        let c = rat_curve(1, 1);
        let p = pt(&c, "-1", "t^3");
        assert!(c.on_curve(&p));
        let c2716 = rat_curve(27, 16);
        let q = pt(&c2716, "-3*t^2", "4");
        assert!(c2716.on_curve(&q));
        // (0,0) is not on y^2 = x^3 + t^6 + 1
        let zero = RatFn::from_poly(Poly::zero(), &Rationals);
        let not_on = CurvePoint::Affine(zero.clone(), zero);
        assert!(!c.on_curve(&not_on));
    }

    #[test]
    fn identity_and_negation() {
        let c = rat_curve(1, 1);
        let p = pt(&c, "-1", "t^3");
        assert_eq!(c.add(&p, &CurvePoint::Infinity).unwrap(), p);
        let sum = c.add(&p, &c.negate(&p)).unwrap();
        assert!(sum.is_infinity());
        assert_eq!(c.scalar_mul(1, &p).unwrap(), p);
        assert_eq!(c.scalar_mul(-1, &p).unwrap(), c.negate(&p));
        assert!(c.scalar_mul(0, &p).unwrap().is_infinity());
    }

    #[test]
    fn r_minus_s_at_1_16() {
        // R = (2t, t^3+4), S = (-2t, t^3-4) on y^2 = x^3 + t^6 + 16
        let c = rat_curve(1, 16);
        let r = pt(&c, "2*t", "t^3+4");
        let s = pt(&c, "-2*t", "t^3-4");
        let diff = c.sub(&r, &s).unwrap();
        let expected = pt(&c, "1/4*t^4", "-1/8*t^6-4");
        assert_eq!(diff, expected);
        assert!(c.on_curve(&diff));
    }

    #[test]
    fn r_minus_s_at_27_16_over_quadratic_field() {
        // Over Q(sqrt(3)): R = (2 sqrt3 t, 3 sqrt3 t^3 + 4). The difference
        // R - S lands back in Q(t) with the on-curve-corrected x = 9/4 t^4.
        let f = QuadExt { d: ExactRat::from_integer(3.into()) };
        let c = Curve::new(
            f.clone(),
            f.from_int(27),
            f.from_int(16),
        );
        let s3 = |a: i64, b: i64| QuadElem {
            a: ExactRat::from_integer(a.into()),
            b: ExactRat::from_integer(b.into()),
        };
        let mono = |e: QuadElem, k: usize| {
            let mut coeffs = vec![f.zero(); k + 1];
            coeffs[k] = e;
            RatFn::from_poly(Poly::from_coeffs(coeffs, &f), &f)
        };
        let r = CurvePoint::Affine(
            mono(s3(0, 2), 1),
            mono(s3(0, 3), 3).add(&mono(s3(4, 0), 0), &f),
        );
        assert!(c.on_curve(&r));
        let s = CurvePoint::Affine(
            mono(s3(0, -2), 1),
            mono(s3(0, 3), 3).add(&mono(s3(-4, 0), 0), &f),
        );
        assert!(c.on_curve(&s));
        let diff = c.sub(&r, &s).unwrap();
        assert!(c.on_curve(&diff));
        // x = 9/4 t^4, y = -(27/8 t^6 + 4): rational coordinates
        let (x, y) = match &diff {
            CurvePoint::Affine(x, y) => (x, y),
            _ => panic!("affine expected"),
        };
        let x9_4 = mono(QuadElem { a: ExactRat::new(9.into(), 4.into()), b: ExactRat::zero() }, 4);
        assert_eq!(*x, x9_4);
        let y_expect = mono(
            QuadElem { a: ExactRat::new((-27).into(), 8.into()), b: ExactRat::zero() },
            6,
        )
        .add(&mono(s3(-4, 0), 0), &f);
        assert_eq!(*y, y_expect);
    }

    #[test]
    fn commutative_and_associative_on_rational_points() {
        let c = rat_curve(1, 16);
        let p = pt(&c, "-t^2", "4");
        let q = pt(&c, "2*t", "t^3+4");
        let r = pt(&c, "-2*t", "t^3-4");
        assert_eq!(c.add(&p, &q).unwrap(), c.add(&q, &p).unwrap());
        let lhs = c.add(&c.add(&p, &q).unwrap(), &r).unwrap();
        let rhs = c.add(&p, &c.add(&q, &r).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert!(c.on_curve(&lhs));
    }

    #[test]
    fn eisenstein_field_axioms() {
        let k = Eisenstein;
        let z = EisElem::zeta();
        let z2 = k.mul(&z, &z);
        let z3 = k.mul(&z2, &z);
        assert_eq!(z3, k.one());
        assert_eq!(k.add(&k.add(&z2, &z), &k.one()), k.zero());
        let inv = k.invert(&z).unwrap();
        assert_eq!(inv, z2);
    }
}
