//! Square and sixth roots inside the `Q(zeta_3, 2^(1/3))` subring.
//!
//! The orbit of size 108 needs a handful of algebraic constants that live
//! in `Q(zeta_3, 2^(1/3))`. A root is *located* numerically through the
//! six complex embeddings of that field and then *verified* exactly in
//! the ring before it is used; the floats never leak into a result.

use super::{decode, TowerElem, TowerRing};
use crate::ellcurve::CoefficientField;
use crate::exactnum::ExactRat;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// The six basis monomials of the subring: `z^e1 w^e4`.
const ZW_BASIS: [(u8, u8); 6] = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)];

fn embeddings() -> Vec<[Complex64; 2]> {
    // an embedding maps z -> zeta_3^s and w -> cbrt(2) zeta_3^k;
    // returned as the pair (image of z, image of w)
    let zeta = Complex64::new(-0.5, 3.0f64.sqrt() / 2.0);
    let cbrt2 = 2.0f64.powf(1.0 / 3.0);
    let mut out = Vec::new();
    // independent embeddings first (s = 1), conjugates mirrored after
    for k in 0..3 {
        out.push([zeta, zeta.powu(k) * cbrt2]);
    }
    for k in 0..3 {
        out.push([zeta.conj(), (zeta.powu(k) * cbrt2).conj()]);
    }
    out
}

fn eval_zw(el: &TowerElem, emb: &[Complex64; 2]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (idx, c) in el.terms() {
        let (e1, e2, e3, e4) = decode(*idx);
        debug_assert!(e2 == 0 && e3 == 0, "element must lie in Q(z, w)");
        let val = emb[0].powu(e1 as u32) * emb[1].powu(e4 as u32);
        acc += val * c.to_f64().unwrap_or(f64::NAN);
    }
    acc
}

/// Nearest rational with a bounded denominator, by continued fractions.
fn rationalize(x: f64, max_den: u64) -> Option<ExactRat> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one());
    let mut v = x;
    for _ in 0..40 {
        let a = v.floor();
        if !(-1e18..=1e18).contains(&a) {
            return None;
        }
        let a_int = BigInt::from(a as i64);
        let p2 = &a_int * &p0 + &p1;
        let q2 = &a_int * &q0 + &q1;
        if q2 > BigInt::from(max_den) {
            break;
        }
        p1 = p0;
        q1 = q0;
        p0 = p2;
        q0 = q2;
        let frac = v - a;
        if frac.abs() < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    if q0.is_zero() {
        return None;
    }
    if q0.is_negative() {
        p0 = -p0;
        q0 = -q0;
    }
    let cand = ExactRat::new(p0, q0);
    let approx = cand.to_f64()?;
    if (approx - x).abs() <= 1e-6 * (1.0 + x.abs()) {
        Some(cand)
    } else {
        None
    }
}

/// Solves the 6x6 complex linear system `V x = y` by Gaussian
/// elimination with partial pivoting.
fn solve6(v: &mut [[Complex64; 6]; 6], y: &mut [Complex64; 6]) -> Option<[Complex64; 6]> {
    let n = 6;
    for col in 0..n {
        let (pivot, mag) = (col..n)
            .map(|r| (r, v[r][col].norm()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if mag < 1e-12 {
            return None;
        }
        v.swap(col, pivot);
        y.swap(col, pivot);
        let inv = Complex64::new(1.0, 0.0) / v[col][col];
        for c in col..n {
            v[col][c] *= inv;
        }
        y[col] *= inv;
        for r in 0..n {
            if r != col && v[r][col].norm() > 0.0 {
                let f = v[r][col];
                for c in col..n {
                    let sub = f * v[col][c];
                    v[r][c] -= sub;
                }
                let sub = f * y[col];
                y[r] -= sub;
            }
        }
    }
    Some(*y)
}

/// Finds `x` in `Q(zeta_3, 2^(1/3))` with `x^degree = target`, exactly.
///
/// `target` must lie in the `z, w` subring. Returns `None` when no root
/// exists there (an exact statement: every numeric candidate is exactly
/// verified, and candidates exhaust the possible phase choices).
pub fn root_in_zw(ring: &TowerRing, target: &TowerElem, degree: u32) -> Option<TowerElem> {
    assert!(target.is_zw_only(), "target must lie in Q(z, w)");
    if target.is_zero() {
        return Some(TowerElem::zero());
    }
    let embs = embeddings();
    let basis: Vec<TowerElem> = ZW_BASIS
        .iter()
        .map(|&(e1, e4)| ring.monomial(e1, 0, 0, e4, ExactRat::one()))
        .collect();
    let targets: Vec<Complex64> = embs.iter().map(|e| eval_zw(target, e)).collect();

    // phase choices for the three independent embeddings; conjugate
    // embeddings receive the conjugate root
    let mut choice = [0u32; 3];
    loop {
        let mut y = [Complex64::new(0.0, 0.0); 6];
        for i in 0..3 {
            let t = targets[i];
            let r = t.norm().powf(1.0 / degree as f64);
            let theta = (t.arg() + 2.0 * std::f64::consts::PI * choice[i] as f64) / degree as f64;
            y[i] = Complex64::from_polar(r, theta);
            y[i + 3] = y[i].conj();
        }
        let mut v = [[Complex64::new(0.0, 0.0); 6]; 6];
        for (i, emb) in embs.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                v[i][j] = eval_zw(b, emb);
            }
        }
        if let Some(sol) = solve6(&mut v, &mut y) {
            let coords: Option<Vec<ExactRat>> = sol
                .iter()
                .map(|c| {
                    if c.im.abs() > 1e-6 * (1.0 + c.norm()) {
                        None
                    } else {
                        rationalize(c.re, 1_000_000)
                    }
                })
                .collect();
            if let Some(coords) = coords {
                let mut cand = TowerElem::zero();
                for (x, &(e1, e4)) in coords.iter().zip(ZW_BASIS.iter()) {
                    if !x.is_zero() {
                        cand = ring.add(&cand, &ring.monomial(e1, 0, 0, e4, x.clone()));
                    }
                }
                if !cand.is_zero() && ring.pow(&cand, degree) == *target {
                    return Some(cand);
                }
            }
        }
        // odometer over phase choices
        let mut i = 0;
        loop {
            if i == 3 {
                return None;
            }
            choice[i] += 1;
            if choice[i] == degree {
                choice[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
    }
}
