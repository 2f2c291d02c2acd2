//! The quotient ring `Q[z,u,v,w]/(z^2+z+1, u^6-A, v^6-B, w^3-2)` housing
//! `zeta_3`, `A^(1/6)`, `B^(1/6)` and `2^(1/3)`, its Galois-style
//! conjugations, and the verification of the eight orbits of minimal
//! sections over the algebraic closure.
//!
//! The ring is a 216-dimensional Q-algebra. It is a product of fields for
//! generic `A, B`; for special values it has zero divisors, and inversion
//! reports them as first-class errors instead of guessing.

mod orbits;
mod zwroots;

pub use orbits::{
    orbit_points, verify_galois_decomposition, verify_orbit, GaloisReport, OrbitReport,
    RelationCheck, ORBIT_SIZES,
};

use crate::ellcurve::{CoefficientField, FieldError};
use crate::exactnum::ExactRat;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::sync::{Arc, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Clone)]
pub enum QbarError {
    #[error("field arithmetic failed: {0}")]
    Field(#[from] FieldError),
    #[error("group law failed: {0}")]
    Curve(#[from] crate::ellcurve::CurveError),
    #[error("height computation failed: {0}")]
    Height(#[from] crate::heightlat::HeightError),
    #[error("orbit construction failed: {0}")]
    Construction(String),
}

/// Monomial index: `((e1*6 + e2)*6 + e3)*3 + e4` for
/// `z^e1 u^e2 v^e3 w^e4`, `e1 < 2`, `e2 < 6`, `e3 < 6`, `e4 < 3`.
pub const DIM: usize = 216;

#[inline]
fn encode(e1: u8, e2: u8, e3: u8, e4: u8) -> u16 {
    ((e1 as u16 * 6 + e2 as u16) * 6 + e3 as u16) * 3 + e4 as u16
}

#[inline]
fn decode(idx: u16) -> (u8, u8, u8, u8) {
    let e4 = (idx % 3) as u8;
    let r = idx / 3;
    let e3 = (r % 6) as u8;
    let r = r / 6;
    let e2 = (r % 6) as u8;
    let e1 = (r / 6) as u8;
    (e1, e2, e3, e4)
}

/// Element of the tower ring: sparse sorted list of (monomial, coefficient).
#[derive(Debug, Clone, PartialEq)]
pub struct TowerElem {
    terms: Vec<(u16, ExactRat)>,
}

impl TowerElem {
    pub fn zero() -> Self {
        TowerElem { terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(u16, ExactRat)] {
        &self.terms
    }

    fn from_dense(dense: Vec<ExactRat>) -> Self {
        let terms = dense
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as u16, c))
            .collect();
        TowerElem { terms }
    }

    /// The rational part if the element is a scalar, else `None`.
    pub fn as_rational(&self) -> Option<ExactRat> {
        match self.terms.len() {
            0 => Some(ExactRat::zero()),
            1 if self.terms[0].0 == 0 => Some(self.terms[0].1.clone()),
            _ => None,
        }
    }

    /// Does the element lie in the `Q[z,w]` subring (no u, v monomials)?
    pub fn is_zw_only(&self) -> bool {
        self.terms.iter().all(|(idx, _)| {
            let (_, e2, e3, _) = decode(*idx);
            e2 == 0 && e3 == 0
        })
    }
}

/// The tower ring with parameters `A`, `B`.
#[derive(Debug, Clone)]
pub struct TowerRing {
    pub a: ExactRat,
    pub b: ExactRat,
    o8: Arc<OnceLock<Result<orbits::O8Constants, QbarError>>>,
}

impl TowerRing {
    pub fn new(a: ExactRat, b: ExactRat) -> Self {
        assert!(!a.is_zero() && !b.is_zero(), "A and B must be non-zero");
        TowerRing { a, b, o8: Arc::new(OnceLock::new()) }
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        TowerRing::new(
            ExactRat::from_integer(a.into()),
            ExactRat::from_integer(b.into()),
        )
    }

    pub(crate) fn o8_constants(&self) -> Result<&orbits::O8Constants, QbarError> {
        self.o8
            .get_or_init(|| orbits::O8Constants::compute(self))
            .as_ref()
            .map_err(|e| e.clone())
    }

    pub fn monomial(&self, e1: u8, e2: u8, e3: u8, e4: u8, c: ExactRat) -> TowerElem {
        if c.is_zero() {
            return TowerElem::zero();
        }
        TowerElem { terms: vec![(encode(e1, e2, e3, e4), c)] }
    }

    pub fn gen_z(&self) -> TowerElem {
        self.monomial(1, 0, 0, 0, ExactRat::one())
    }
    pub fn gen_u(&self) -> TowerElem {
        self.monomial(0, 1, 0, 0, ExactRat::one())
    }
    pub fn gen_v(&self) -> TowerElem {
        self.monomial(0, 0, 1, 0, ExactRat::one())
    }
    pub fn gen_w(&self) -> TowerElem {
        self.monomial(0, 0, 0, 1, ExactRat::one())
    }

    /// `zeta_3^k` reduced to the `{1, z}` basis.
    pub fn zeta_pow(&self, k: i64) -> TowerElem {
        match k.rem_euclid(3) {
            0 => self.one(),
            1 => self.gen_z(),
            _ => {
                // z^2 = -1 - z
                let m1 = ExactRat::from_integer((-1).into());
                TowerElem {
                    terms: vec![(encode(0, 0, 0, 0), m1.clone()), (encode(1, 0, 0, 0), m1)],
                }
            }
        }
    }

    /// `sqrt(-3) = 2 zeta_3 + 1`.
    pub fn sqrt_m3(&self) -> TowerElem {
        TowerElem {
            terms: vec![
                (encode(0, 0, 0, 0), ExactRat::one()),
                (encode(1, 0, 0, 0), ExactRat::from_integer(2.into())),
            ],
        }
    }

    pub fn pow(&self, el: &TowerElem, e: u32) -> TowerElem {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, el);
        }
        acc
    }

    fn mul_monomial_into(
        &self,
        dense: &mut [ExactRat],
        idx_a: u16,
        idx_b: u16,
        coeff: &ExactRat,
    ) {
        let (a1, a2, a3, a4) = decode(idx_a);
        let (b1, b2, b3, b4) = decode(idx_b);
        let mut scalar = coeff.clone();
        let mut e2 = a2 + b2;
        if e2 >= 6 {
            e2 -= 6;
            scalar *= &self.a;
        }
        let mut e3 = a3 + b3;
        if e3 >= 6 {
            e3 -= 6;
            scalar *= &self.b;
        }
        let mut e4 = a4 + b4;
        if e4 >= 3 {
            e4 -= 3;
            scalar *= ExactRat::from_integer(2.into());
        }
        let e1 = a1 + b1;
        if e1 < 2 {
            let idx = encode(e1, e2, e3, e4) as usize;
            dense[idx] += scalar;
        } else {
            // z^2 = -1 - z
            let i0 = encode(0, e2, e3, e4) as usize;
            let i1 = encode(1, e2, e3, e4) as usize;
            dense[i0] -= &scalar;
            dense[i1] -= scalar;
        }
    }

    /// Rescales each monomial by `z^(zexp) * (-1)^(negate)` as a function
    /// of its exponent vector. All conjugation lifts and the norm-chain
    /// stages are maps of this shape.
    fn monomial_phase_map<F>(&self, el: &TowerElem, phase: F) -> TowerElem
    where
        F: Fn(u8, u8, u8, u8) -> (u8, bool),
    {
        let mut dense = vec![ExactRat::zero(); DIM];
        for (idx, c) in &el.terms {
            let (e1, e2, e3, e4) = decode(*idx);
            let (zexp, negate) = phase(e1, e2, e3, e4);
            let coeff = if negate { -c.clone() } else { c.clone() };
            let total_z = e1 + (zexp % 3);
            match total_z.rem_euclid(3) {
                z if z < 2 => {
                    dense[encode(z, e2, e3, e4) as usize] += coeff;
                }
                _ => {
                    // z^2 = -1 - z
                    dense[encode(0, e2, e3, e4) as usize] -= &coeff;
                    dense[encode(1, e2, e3, e4) as usize] -= coeff;
                }
            }
        }
        TowerElem::from_dense(dense)
    }

    /// `z -> z^2` ring conjugation.
    fn conj_z(&self, el: &TowerElem) -> TowerElem {
        let mut dense = vec![ExactRat::zero(); DIM];
        for (idx, c) in &el.terms {
            let (e1, e2, e3, e4) = decode(*idx);
            if e1 == 0 {
                dense[*idx as usize] += c;
            } else {
                // z -> z^2 = -1 - z
                dense[encode(0, e2, e3, e4) as usize] -= c;
                dense[encode(1, e2, e3, e4) as usize] -= c;
            }
        }
        TowerElem::from_dense(dense)
    }
}

/// Conjugation lifts chosen once for the whole crate: monomial-scaling
/// endomorphisms acting on a single generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conjugation {
    /// `cbrt(B) -> zeta_3 cbrt(B)` (lift: `v -> z^2 v`)
    SigmaK,
    /// `cbrt(A) -> zeta_3 cbrt(A)` (lift: `u -> z^2 u`)
    SigmaKPrime,
    /// `s = cbrt(4AB) -> zeta_3 s` (lift: `w -> z^2 w`)
    SigmaL,
    /// `sqrt(B) -> -sqrt(B)` (lift: `v -> -v`)
    TauL,
    /// `sqrt(A) -> -sqrt(A)` (lift: `u -> -u`)
    TauLPrime,
}

impl TowerRing {
    pub fn apply_conjugation_elem(&self, c: Conjugation, el: &TowerElem) -> TowerElem {
        match c {
            Conjugation::SigmaK => self.monomial_phase_map(el, |_, _, e3, _| ((2 * e3) % 3, false)),
            Conjugation::SigmaKPrime => {
                self.monomial_phase_map(el, |_, e2, _, _| ((2 * e2) % 3, false))
            }
            Conjugation::SigmaL => self.monomial_phase_map(el, |_, _, _, e4| ((2 * e4) % 3, false)),
            Conjugation::TauL => self.monomial_phase_map(el, |_, _, e3, _| (0, e3 % 2 == 1)),
            Conjugation::TauLPrime => self.monomial_phase_map(el, |_, e2, _, _| (0, e2 % 2 == 1)),
        }
    }

    /// Coordinate-wise conjugation of a curve point.
    pub fn apply_conjugation(
        &self,
        c: Conjugation,
        pt: &crate::ellcurve::CurvePoint<TowerRing>,
    ) -> crate::ellcurve::CurvePoint<TowerRing> {
        use crate::ellcurve::CurvePoint;
        match pt {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => CurvePoint::Affine(
                x.map_coeffs(|e| self.apply_conjugation_elem(c, e), self),
                y.map_coeffs(|e| self.apply_conjugation_elem(c, e), self),
            ),
        }
    }
}

impl CoefficientField for TowerRing {
    type Elem = TowerElem;

    fn zero(&self) -> TowerElem {
        TowerElem::zero()
    }

    fn one(&self) -> TowerElem {
        TowerElem { terms: vec![(0, ExactRat::one())] }
    }

    fn add(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        // merge two sorted term lists
        let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < a.terms.len() && j < b.terms.len() {
            match a.terms[i].0.cmp(&b.terms[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a.terms[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b.terms[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &a.terms[i].1 + &b.terms[j].1;
                    if !c.is_zero() {
                        out.push((a.terms[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a.terms[i..]);
        out.extend_from_slice(&b.terms[j..]);
        TowerElem { terms: out }
    }

    fn sub(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        self.add(a, &self.neg(b))
    }

    fn mul(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        if a.is_zero() || b.is_zero() {
            return TowerElem::zero();
        }
        let mut dense = vec![ExactRat::zero(); DIM];
        for (ia, ca) in &a.terms {
            for (ib, cb) in &b.terms {
                let c = ca * cb;
                self.mul_monomial_into(&mut dense, *ia, *ib, &c);
            }
        }
        TowerElem::from_dense(dense)
    }

    fn neg(&self, a: &TowerElem) -> TowerElem {
        TowerElem {
            terms: a.terms.iter().map(|(i, c)| (*i, -c.clone())).collect(),
        }
    }

    fn is_zero(&self, a: &TowerElem) -> bool {
        a.terms.is_empty()
    }

    /// Inverse by a chain of relative norms: multiply by the `w`, `v`,
    /// `u` and `z` conjugates until the product is rational, then divide.
    /// Equivalent to solving the multiplication-by-`a` linear system, but
    /// far cheaper; non-invertible non-zero elements surface as
    /// `ZeroDivisor`.
    fn invert(&self, a: &TowerElem) -> Result<TowerElem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let mut numer = self.one();
        let mut cur = a.clone();

        // stage maps with their orders
        type Phase = fn(u8, u8, u8, u8) -> (u8, bool);
        let stages: [(Phase, u32); 3] = [
            // w -> zeta_3 w
            (|_, _, _, e4| (e4 % 3, false), 3),
            // v -> zeta_6 v = (-z^2) v
            (|_, _, e3, _| ((2 * e3) % 3, e3 % 2 == 1), 6),
            // u -> zeta_6 u
            (|_, e2, _, _| ((2 * e2) % 3, e2 % 2 == 1), 6),
        ];
        for (phase, order) in stages {
            let mut conj_prod = self.one();
            let mut c = cur.clone();
            for _ in 1..order {
                c = self.monomial_phase_map(&c, phase);
                conj_prod = self.mul(&conj_prod, &c);
            }
            numer = self.mul(&numer, &conj_prod);
            cur = self.mul(&cur, &conj_prod);
        }
        // final z-conjugation
        let zc = self.conj_z(&cur);
        numer = self.mul(&numer, &zc);
        let norm = self.mul(&cur, &zc);
        let norm_rat = norm
            .as_rational()
            .expect("norm must be rational after the full chain");
        if norm_rat.is_zero() {
            return Err(FieldError::ZeroDivisor);
        }
        let inv = norm_rat.recip();
        Ok(TowerElem {
            terms: numer.terms.iter().map(|(i, c)| (*i, c * &inv)).collect(),
        })
    }

    fn from_rat(&self, q: &ExactRat) -> TowerElem {
        if q.is_zero() {
            TowerElem::zero()
        } else {
            TowerElem { terms: vec![(0, q.clone())] }
        }
    }

    fn fmt_elem(&self, a: &TowerElem) -> String {
        if a.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (idx, c) in &a.terms {
            let (e1, e2, e3, e4) = decode(*idx);
            let mut monos = String::new();
            for (sym, e) in [("z", e1), ("u", e2), ("v", e3), ("w", e4)] {
                match e {
                    0 => {}
                    1 => monos.push_str(&format!("*{sym}")),
                    _ => monos.push_str(&format!("*{sym}^{e}")),
                }
            }
            parts.push(format!("{c}{monos}"));
        }
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring57() -> TowerRing {
        TowerRing::from_ints(5, 7)
    }

    #[test]
    fn generator_relations() {
        let r = ring57();
        let z = r.gen_z();
        let u = r.gen_u();
        let v = r.gen_v();
        let w = r.gen_w();
        // z^2 + z + 1 = 0
        let zz = r.add(&r.add(&r.mul(&z, &z), &z), &r.one());
        assert!(zz.is_zero());
        // u^6 = 5, v^6 = 7, w^3 = 2
        assert_eq!(r.pow(&u, 6).as_rational(), Some(ExactRat::from_integer(5.into())));
        assert_eq!(r.pow(&v, 6).as_rational(), Some(ExactRat::from_integer(7.into())));
        assert_eq!(r.pow(&w, 3).as_rational(), Some(ExactRat::from_integer(2.into())));
        // sqrt(-3)^2 = -3
        let s = r.sqrt_m3();
        assert_eq!(
            r.mul(&s, &s).as_rational(),
            Some(ExactRat::from_integer((-3).into()))
        );
    }

    #[test]
    fn ring_axioms_on_pseudorandom_elements() {
        let r = ring57();
        // deterministic little generator of sparse elements
        let make = |seed: u64| {
            let mut el = TowerElem::zero();
            let mut s = seed;
            for _ in 0..6 {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let idx = ((s >> 17) % DIM as u64) as u16;
                let c = ((s >> 40) % 19) as i64 - 9;
                el = r.add(&el, &TowerElem { terms: vec![(idx, ExactRat::from_integer(c.into()))] });
            }
            // re-normalize through from_dense to drop zeros and sort
            let mut dense = vec![ExactRat::zero(); DIM];
            for (i, c) in &el.terms {
                dense[*i as usize] += c;
            }
            TowerElem::from_dense(dense)
        };
        for seed in 1..8u64 {
            let a = make(seed);
            let b = make(seed + 100);
            let c = make(seed + 200);
            // commutativity and associativity
            assert_eq!(r.mul(&a, &b), r.mul(&b, &a));
            assert_eq!(r.mul(&r.mul(&a, &b), &c), r.mul(&a, &r.mul(&b, &c)));
            // distributivity
            assert_eq!(
                r.mul(&a, &r.add(&b, &c)),
                r.add(&r.mul(&a, &b), &r.mul(&a, &c))
            );
        }
    }

    #[test]
    fn inversion_examples() {
        let r = ring57();
        assert_eq!(r.invert(&r.one()).unwrap(), r.one());
        // invert(z) = z^2 = -1 - z
        let z_inv = r.invert(&r.gen_z()).unwrap();
        assert_eq!(z_inv, r.zeta_pow(2));
        // u * u^{-1} = 1
        let u = r.gen_u();
        let u_inv = r.invert(&u).unwrap();
        assert_eq!(r.mul(&u, &u_inv), r.one());
        // a denser element
        let el = r.add(&r.add(&r.gen_u(), &r.mul(&r.gen_v(), &r.gen_w())), &r.sqrt_m3());
        let inv = r.invert(&el).unwrap();
        assert_eq!(r.mul(&el, &inv), r.one());
        assert_eq!(
            r.invert(&TowerElem::zero()),
            Err(FieldError::DivisionByZero)
        );
    }

    #[test]
    fn zero_divisor_detected() {
        // at A = 1 the binomial u^6 - 1 is very reducible: u^3 - 1 kills u^3 + 1
        let r = TowerRing::from_ints(1, 7);
        let u3 = r.pow(&r.gen_u(), 3);
        let el = r.sub(&u3, &r.one());
        let other = r.add(&r.pow(&r.gen_u(), 3), &r.one());
        assert!(r.mul(&el, &other).is_zero());
        assert_eq!(r.invert(&el), Err(FieldError::ZeroDivisor));
    }

    #[test]
    fn conjugation_fixed_elements() {
        let r = ring57();
        let u = r.gen_u();
        let v = r.gen_v();
        let z = r.gen_z();
        let v3 = r.pow(&v, 3);
        let v2 = r.pow(&v, 2);
        let u3 = r.pow(&u, 3);
        let s = r.mul(&r.mul(&r.pow(&r.gen_w(), 2), &r.pow(&u, 2)), &v2.clone());

        // sigma_K fixes u, z, v^3 and rotates cbrt(B) = v^2 by zeta_3
        assert_eq!(r.apply_conjugation_elem(Conjugation::SigmaK, &u), u);
        assert_eq!(r.apply_conjugation_elem(Conjugation::SigmaK, &z), z);
        assert_eq!(r.apply_conjugation_elem(Conjugation::SigmaK, &v3), v3);
        assert_eq!(
            r.apply_conjugation_elem(Conjugation::SigmaK, &v2),
            r.mul(&r.gen_z(), &v2)
        );
        // sigma_K' fixes v, z, u^3
        assert_eq!(r.apply_conjugation_elem(Conjugation::SigmaKPrime, &v), v);
        assert_eq!(r.apply_conjugation_elem(Conjugation::SigmaKPrime, &u3), u3);
        // sigma_L fixes u, v, z and rotates s by zeta_3
        assert_eq!(r.apply_conjugation_elem(Conjugation::SigmaL, &u), u);
        assert_eq!(r.apply_conjugation_elem(Conjugation::SigmaL, &v), v);
        assert_eq!(
            r.apply_conjugation_elem(Conjugation::SigmaL, &s),
            r.mul(&r.gen_z(), &s)
        );
        // tau_L negates sqrt(B) = v^3, fixes v^2 (hence s), u, z
        assert_eq!(
            r.apply_conjugation_elem(Conjugation::TauL, &v3),
            r.neg(&v3)
        );
        assert_eq!(r.apply_conjugation_elem(Conjugation::TauL, &v2), v2);
        assert_eq!(r.apply_conjugation_elem(Conjugation::TauL, &s), s);
        // tau_L' negates sqrt(A) = u^3
        assert_eq!(
            r.apply_conjugation_elem(Conjugation::TauLPrime, &u3),
            r.neg(&u3)
        );
    }

    #[test]
    fn conjugations_are_ring_homomorphisms() {
        let r = ring57();
        let a = r.add(&r.mul(&r.gen_u(), &r.gen_v()), &r.zeta_pow(2));
        let b = r.add(&r.pow(&r.gen_w(), 2), &r.gen_z());
        for c in [
            Conjugation::SigmaK,
            Conjugation::SigmaKPrime,
            Conjugation::SigmaL,
            Conjugation::TauL,
            Conjugation::TauLPrime,
        ] {
            let lhs = r.apply_conjugation_elem(c, &r.mul(&a, &b));
            let rhs = r.mul(
                &r.apply_conjugation_elem(c, &a),
                &r.apply_conjugation_elem(c, &b),
            );
            assert_eq!(lhs, rhs, "{c:?} not multiplicative");
            let lhs = r.apply_conjugation_elem(c, &r.add(&a, &b));
            let rhs = r.add(
                &r.apply_conjugation_elem(c, &a),
                &r.apply_conjugation_elem(c, &b),
            );
            assert_eq!(lhs, rhs, "{c:?} not additive");
        }
    }

    #[test]
    fn conjugation_orders() {
        let r = ring57();
        let el = r.add(&r.mul(&r.gen_u(), &r.mul(&r.gen_v(), &r.gen_w())), &r.gen_z());
        // sigma's have order 3 on tested elements
        for c in [Conjugation::SigmaK, Conjugation::SigmaKPrime, Conjugation::SigmaL] {
            let once = r.apply_conjugation_elem(c, &el);
            let twice = r.apply_conjugation_elem(c, &once);
            let thrice = r.apply_conjugation_elem(c, &twice);
            assert_eq!(thrice, el);
            assert_ne!(once, el);
        }
        // tau's have order 2
        for c in [Conjugation::TauL, Conjugation::TauLPrime] {
            let once = r.apply_conjugation_elem(c, &el);
            let twice = r.apply_conjugation_elem(c, &once);
            assert_eq!(twice, el);
        }
    }
}
