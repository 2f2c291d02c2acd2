//! Shioda height, height pairing, Gram matrices and lattice-type
//! classification by invariant fingerprint (rank, determinant, norm-2 and
//! norm-4 vector counts).

use crate::ellcurve::{CoefficientField, Curve, CurveError, CurvePoint};
use crate::funcfield::infinity_chart;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Clone)]
pub enum HeightError {
    #[error("x-denominator is not a perfect square: not a section")]
    NonSquareDenominator,
    #[error("odd pole order at infinity: not a section")]
    OddPoleOrder,
    #[error("group law failed: {0}")]
    Curve(#[from] CurveError),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
}

/// Symmetric integer Gram matrix, serialized row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramMatrix {
    pub entries: Vec<Vec<i64>>,
}

impl GramMatrix {
    pub fn new(entries: Vec<Vec<i64>>) -> Self {
        let n = entries.len();
        for row in &entries {
            assert_eq!(row.len(), n, "gram matrix must be square");
        }
        for i in 0..n {
            for j in 0..n {
                assert_eq!(entries[i][j], entries[j][i], "gram matrix must be symmetric");
            }
        }
        GramMatrix { entries }
    }

    pub fn diag(values: &[i64]) -> Self {
        let n = values.len();
        let mut entries = vec![vec![0i64; n]; n];
        for (i, v) in values.iter().enumerate() {
            entries[i][i] = *v;
        }
        GramMatrix { entries }
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let n = self.entries.len();
        if n == 0 {
            return BigInt::one();
        }
        let mut m: Vec<Vec<BigInt>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                m.swap(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let val = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                    m[i][j] = val;
                }
            }
            prev = m[k][k].clone();
            for i in k + 1..n {
                m[i][k] = BigInt::zero();
            }
        }
        let d = m[n - 1][n - 1].clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    /// Quadratic form value of an integer vector.
    pub fn norm(&self, v: &[i64]) -> i64 {
        let n = self.rank();
        let mut acc = 0i64;
        for i in 0..n {
            for j in 0..n {
                acc += self.entries[i][j] * v[i] * v[j];
            }
        }
        acc
    }

    /// Is every leading principal minor positive?
    pub fn is_positive_definite(&self) -> bool {
        let n = self.rank();
        (1..=n).all(|k| {
            let sub = GramMatrix {
                entries: (0..k)
                    .map(|i| (0..k).map(|j| self.entries[i][j]).collect())
                    .collect(),
            };
            sub.det().is_positive()
        })
    }

    /// Equality up to flipping the signs of basis vectors (which does not
    /// change the lattice).
    pub fn eq_up_to_signs(&self, other: &GramMatrix) -> bool {
        let n = self.rank();
        if other.rank() != n {
            return false;
        }
        'outer: for mask in 0..(1u32 << n) {
            for i in 0..n {
                for j in 0..n {
                    let s = if (mask >> i) & 1 == (mask >> j) & 1 { 1 } else { -1 };
                    if self.entries[i][j] * s != other.entries[i][j] {
                        continue 'outer;
                    }
                }
            }
            return true;
        }
        false
    }
}

/// Lattice types occurring as spans of minimal sections.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeType {
    #[serde(rename = "<2>")]
    N2,
    #[serde(rename = "<4>")]
    N4,
    #[serde(rename = "<6>")]
    N6,
    #[serde(rename = "<12>")]
    N12,
    #[serde(rename = "<2>+<2>")]
    N2N2,
    #[serde(rename = "<2>+<4>")]
    N2N4,
    #[serde(rename = "<2>+<6>")]
    N2N6,
    #[serde(rename = "<6>+<6>")]
    N6N6,
    #[serde(rename = "A2")]
    A2,
    #[serde(rename = "A2(2)")]
    A2Scaled,
    #[serde(rename = "A2+A2")]
    A2A2,
    #[serde(rename = "<2>+<2>+<2>")]
    N2N2N2,
    #[serde(rename = "<2>+A2(2)")]
    N2A2Scaled,
    #[serde(rename = "D4")]
    D4,
    #[serde(rename = "E6")]
    E6,
    #[serde(rename = "E8")]
    E8,
    #[serde(rename = "unclassified")]
    Unclassified(GramMatrix),
}

impl std::fmt::Display for LatticeType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LatticeType::N2 => "<2>",
            LatticeType::N4 => "<4>",
            LatticeType::N6 => "<6>",
            LatticeType::N12 => "<12>",
            LatticeType::N2N2 => "<2>+<2>",
            LatticeType::N2N4 => "<2>+<4>",
            LatticeType::N2N6 => "<2>+<6>",
            LatticeType::N6N6 => "<6>+<6>",
            LatticeType::A2 => "A2",
            LatticeType::A2Scaled => "A2(2)",
            LatticeType::A2A2 => "A2+A2",
            LatticeType::N2N2N2 => "<2>+<2>+<2>",
            LatticeType::N2A2Scaled => "<2>+A2(2)",
            LatticeType::D4 => "D4",
            LatticeType::E6 => "E6",
            LatticeType::E8 => "E8",
            LatticeType::Unclassified(_) => "unclassified",
        };
        write!(f, "{s}")
    }
}

/// Invariant fingerprint: (rank, det, #norm-2 vectors, #norm-4 vectors).
type Fingerprint = (usize, i64, usize, usize);

/// Catalog of named lattices with their fingerprints. The tuples are
/// pairwise distinct (checked by a test), so a fingerprint identifies its
/// entry.
pub const CATALOG: [(Fingerprint, &str); 16] = [
    ((1, 2, 2, 0), "<2>"),
    ((1, 4, 0, 2), "<4>"),
    ((1, 6, 0, 0), "<6>"),
    ((1, 12, 0, 0), "<12>"),
    ((2, 4, 4, 4), "<2>+<2>"),
    ((2, 8, 2, 2), "<2>+<4>"),
    ((2, 12, 2, 0), "<2>+<6>"),
    ((2, 36, 0, 0), "<6>+<6>"),
    ((2, 3, 6, 0), "A2"),
    ((2, 12, 0, 6), "A2(2)"),
    ((4, 9, 12, 36), "A2+A2"),
    ((3, 8, 6, 12), "<2>+<2>+<2>"),
    ((3, 24, 2, 6), "<2>+A2(2)"),
    ((4, 4, 24, 24), "D4"),
    ((6, 3, 72, 270), "E6"),
    ((8, 1, 240, 2160), "E8"),
];

fn type_from_name(name: &str) -> LatticeType {
    match name {
        "<2>" => LatticeType::N2,
        "<4>" => LatticeType::N4,
        "<6>" => LatticeType::N6,
        "<12>" => LatticeType::N12,
        "<2>+<2>" => LatticeType::N2N2,
        "<2>+<4>" => LatticeType::N2N4,
        "<2>+<6>" => LatticeType::N2N6,
        "<6>+<6>" => LatticeType::N6N6,
        "A2" => LatticeType::A2,
        "A2(2)" => LatticeType::A2Scaled,
        "A2+A2" => LatticeType::A2A2,
        "<2>+<2>+<2>" => LatticeType::N2N2N2,
        "<2>+A2(2)" => LatticeType::N2A2Scaled,
        "D4" => LatticeType::D4,
        "E6" => LatticeType::E6,
        "E8" => LatticeType::E8,
        _ => unreachable!(),
    }
}

/// Shioda height `2 + 2 (deg q + delta)` where `x = p/q^2` in lowest
/// terms and `delta` comes from the chart at infinity. `h(O) = 0`.
pub fn naive_height<K: CoefficientField>(
    curve: &Curve<K>,
    pt: &CurvePoint<K>,
) -> Result<u64, HeightError> {
    let k = &curve.field;
    let x = match pt {
        CurvePoint::Infinity => return Ok(0),
        CurvePoint::Affine(x, _) => x,
    };
    let den = x.den();
    let q = match den.degree() {
        Some(0) | None => Some(crate::funcfield::Poly::one(k)),
        Some(_) => den.monic_sqrt(k),
    }
    .ok_or(HeightError::NonSquareDenominator)?;
    let deg_q = q.degree().unwrap_or(0) as u64;
    let (_, pole) = infinity_chart(x, k);
    if pole % 2 != 0 {
        return Err(HeightError::OddPoleOrder);
    }
    let delta = (pole / 2) as u64;
    Ok(2 + 2 * (deg_q + delta))
}

/// Height pairing via the parallelogram identity.
pub fn height_pairing<K: CoefficientField>(
    curve: &Curve<K>,
    p1: &CurvePoint<K>,
    p2: &CurvePoint<K>,
) -> Result<i64, HeightError> {
    let sum = curve.add(p1, p2)?;
    let h_sum = naive_height(curve, &sum)? as i64;
    let h1 = naive_height(curve, p1)? as i64;
    let h2 = naive_height(curve, p2)? as i64;
    let twice = h_sum - h1 - h2;
    debug_assert!(twice % 2 == 0, "height pairing must be integral");
    Ok(twice / 2)
}

/// Pairwise height pairings of a tuple of points.
pub fn gram_matrix<K: CoefficientField>(
    curve: &Curve<K>,
    points: &[CurvePoint<K>],
) -> Result<GramMatrix, HeightError> {
    let n = points.len();
    let mut entries = vec![vec![0i64; n]; n];
    for i in 0..n {
        entries[i][i] = naive_height(curve, &points[i])? as i64;
        for j in i + 1..n {
            let v = height_pairing(curve, &points[i], &points[j])?;
            entries[i][j] = v;
            entries[j][i] = v;
        }
    }
    Ok(GramMatrix { entries })
}

/// Complete list of integer vectors with `0 < norm <= bound`, by
/// Fincke-Pohst enumeration over an exact LDL^T decomposition. Both signs
/// of every vector are listed.
pub fn enumerate_short_vectors(
    g: &GramMatrix,
    bound: u64,
) -> Result<Vec<Vec<i64>>, HeightError> {
    let n = g.rank();
    if n == 0 {
        return Ok(Vec::new());
    }
    // exact LDL^T: g = L D L^T with unit lower-triangular L
    let mut d = vec![BigRational::zero(); n];
    let mut l = vec![vec![BigRational::zero(); n]; n];
    for j in 0..n {
        let mut dj = BigRational::from_integer(g.entries[j][j].into());
        for k in 0..j {
            let ljk = l[j][k].clone();
            dj -= &ljk * &ljk * &d[k];
        }
        if !dj.is_positive() {
            return Err(HeightError::NotPositiveDefinite);
        }
        d[j] = dj;
        for i in j + 1..n {
            let mut v = BigRational::from_integer(g.entries[i][j].into());
            for k in 0..j {
                v -= &l[i][k] * &l[j][k] * &d[k];
            }
            l[i][j] = v / &d[j];
        }
    }

    // norm(x) = sum_j d_j (x_j + sum_{i>j} l[i][j] x_i)^2; recurse from the
    // last coordinate down. Float square roots only суggest the scan range;
    // every candidate is admitted by an exact rational comparison.
    fn recurse(
        j: usize,
        remaining: &BigRational,
        x: &mut [i64],
        d: &[BigRational],
        l: &[Vec<BigRational>],
        out: &mut Vec<Vec<i64>>,
    ) {
        let n = x.len();
        let mut c = BigRational::zero();
        for i in j + 1..n {
            c += &l[i][j] * BigRational::from_integer(x[i].into());
        }
        let ratio = remaining / &d[j];
        let r_approx = ratio.to_f64().unwrap_or(0.0).max(0.0).sqrt();
        let c_approx = c.to_f64().unwrap_or(0.0);
        let lo = (-c_approx - r_approx).floor() as i64 - 1;
        let hi = (-c_approx + r_approx).ceil() as i64 + 1;
        for xj in lo..=hi {
            let t = BigRational::from_integer(xj.into()) + &c;
            let used = &t * &t * &d[j];
            if used > *remaining {
                continue;
            }
            x[j] = xj;
            if j == 0 {
                if x.iter().any(|&v| v != 0) {
                    out.push(x.to_vec());
                }
            } else {
                let rem = remaining - used;
                recurse(j - 1, &rem, x, d, l, out);
            }
        }
        x[j] = 0;
    }

    let bound_rat = BigRational::from_integer(BigInt::from(bound));
    let mut out: Vec<Vec<i64>> = Vec::new();
    let mut x = vec![0i64; n];
    recurse(n - 1, &bound_rat, &mut x, &d, &l, &mut out);
    debug_assert!(out
        .iter()
        .all(|v| g.norm(v) > 0 && g.norm(v) as u64 <= bound));
    out.sort();
    Ok(out)
}

/// Matches the invariant fingerprint against the catalog.
pub fn classify_lattice(g: &GramMatrix) -> Result<LatticeType, HeightError> {
    if !g.is_positive_definite() {
        return Err(HeightError::NotPositiveDefinite);
    }
    let rank = g.rank();
    let det = g.det().to_i64().expect("catalog determinants fit in i64");
    let shorts = enumerate_short_vectors(g, 4)?;
    let n2 = shorts.iter().filter(|v| g.norm(v) == 2).count();
    let n4 = shorts.iter().filter(|v| g.norm(v) == 4).count();
    let fp = (rank, det, n2, n4);
    for (cat_fp, name) in CATALOG {
        if cat_fp == fp {
            return Ok(type_from_name(name));
        }
    }
    Ok(LatticeType::Unclassified(g.clone()))
}

/// Reference Gram matrices for the root lattices; used by tests and the
/// orbit verification reports.
pub mod reference {
    use super::GramMatrix;

    pub fn a2() -> GramMatrix {
        GramMatrix::new(vec![vec![2, -1], vec![-1, 2]])
    }

    pub fn a2_scaled() -> GramMatrix {
        GramMatrix::new(vec![vec![4, -2], vec![-2, 4]])
    }

    pub fn d4() -> GramMatrix {
        GramMatrix::new(vec![
            vec![2, -1, 0, 0],
            vec![-1, 2, -1, -1],
            vec![0, -1, 2, 0],
            vec![0, -1, 0, 2],
        ])
    }

    pub fn e6() -> GramMatrix {
        // chain 1-2-3-4-5 with node 6 attached to node 3
        let mut m = vec![vec![0i64; 6]; 6];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 2;
        }
        for (i, j) in [(0, 1), (1, 2), (2, 3), (3, 4), (2, 5)] {
            m[i][j] = -1;
            m[j][i] = -1;
        }
        GramMatrix::new(m)
    }

    pub fn e8() -> GramMatrix {
        // chain 1-...-7 with node 8 attached to node 5
        let mut m = vec![vec![0i64; 8]; 8];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 2;
        }
        for (i, j) in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)] {
            m[i][j] = -1;
            m[j][i] = -1;
        }
        GramMatrix::new(m)
    }

    /// `I_4 (x) M`: the Gram matrix of the eight generators over the
    /// algebraic closure.
    pub fn i4_kron_m() -> GramMatrix {
        let mut m = vec![vec![0i64; 8]; 8];
        for b in 0..4 {
            m[2 * b][2 * b] = 2;
            m[2 * b + 1][2 * b + 1] = 2;
            m[2 * b][2 * b + 1] = -1;
            m[2 * b + 1][2 * b] = -1;
        }
        GramMatrix::new(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ellcurve::Rationals;
    use crate::funcfield::{parse_poly, Poly, RatFn};

    fn rat_curve(a: i64, b: i64) -> Curve<Rationals> {
        let k = Rationals;
        Curve::new(k, k.from_int(a), k.from_int(b))
    }

    fn pt(c: &Curve<Rationals>, x: &str, y: &str) -> CurvePoint<Rationals> {
        let parse = |s: &str| -> RatFn<Rationals> {
            let parts: Vec<&str> = s.split('|').collect();
            let num = parse_poly(parts[0]).unwrap();
            let den = if parts.len() > 1 {
                parse_poly(parts[1]).unwrap()
            } else {
                Poly::one(&Rationals)
            };
            RatFn::new(num, den, &Rationals).unwrap()
        };
        let p = CurvePoint::Affine(parse(x), parse(y));
        assert!(c.on_curve(&p), "test point not on curve");
        p
    }

    #[test]
    fn height_of_simple_sections() {
        let c = rat_curve(1, 1);
        assert_eq!(naive_height(&c, &CurvePoint::Infinity).unwrap(), 0);
        let p = pt(&c, "-1", "t^3");
        assert_eq!(naive_height(&c, &p).unwrap(), 2);
        let q = pt(&c, "-t^2", "1");
        assert_eq!(naive_height(&c, &q).unwrap(), 2);
    }

    #[test]
    fn height_4_and_6_points() {
        // R+S at (1,16): x = 4/t^2 (deg q = 1, delta = 0)
        let c = rat_curve(1, 16);
        let rps = pt(&c, "4|t^2", "-t^6-8|t^3");
        assert_eq!(naive_height(&c, &rps).unwrap(), 4);
        // R-S at (1,16): x = t^4/4 (deg q = 0, delta = 2)
        let rms = pt(&c, "1/4*t^4", "-1/8*t^6-4");
        assert_eq!(naive_height(&c, &rms).unwrap(), 4);
        // P+2P^sigma at (-3,1): x = 4t^6 - 1
        let c2 = rat_curve(-3, 1);
        let p2 = pt(&c2, "4*t^6-1", "8*t^9-3*t^3");
        assert_eq!(naive_height(&c2, &p2).unwrap(), 6);
    }

    #[test]
    fn pairing_and_gram_at_27_16() {
        let c = rat_curve(27, 16);
        let q = pt(&c, "-3*t^2", "4");
        let rms = pt(&c, "9/4*t^4", "27/8*t^6+4");
        assert_eq!(naive_height(&c, &q).unwrap(), 2);
        assert_eq!(naive_height(&c, &rms).unwrap(), 4);
        assert_eq!(height_pairing(&c, &q, &rms).unwrap(), 0);
        assert_eq!(height_pairing(&c, &q, &c.negate(&q)).unwrap(), -2);
        let g = gram_matrix(&c, &[q, rms]).unwrap();
        assert_eq!(g, GramMatrix::diag(&[2, 4]));
        assert_eq!(classify_lattice(&g).unwrap(), LatticeType::N2N4);
    }

    #[test]
    fn single_point_gram() {
        let c = rat_curve(1, 1);
        let p = pt(&c, "-1", "t^3");
        let g = gram_matrix(&c, &[p]).unwrap();
        assert_eq!(g, GramMatrix::diag(&[2]));
        assert_eq!(classify_lattice(&g).unwrap(), LatticeType::N2);
    }

    /// Brute-force oracle for short vector sets.
    fn brute_force_shorts(g: &GramMatrix, bound: u64, box_radius: i64) -> Vec<Vec<i64>> {
        let n = g.rank();
        let mut out = Vec::new();
        let mut v = vec![-box_radius; n];
        loop {
            let norm = g.norm(&v);
            if norm > 0 && norm as u64 <= bound {
                out.push(v.clone());
            }
            let mut i = 0;
            loop {
                if i == n {
                    out.sort();
                    return out;
                }
                v[i] += 1;
                if v[i] > box_radius {
                    v[i] = -box_radius;
                    i += 1;
                } else {
                    break;
                }
            }
        }
    }

    #[test]
    fn short_vector_counts_match_brute_force() {
        let a2 = reference::a2();
        let found = enumerate_short_vectors(&a2, 2).unwrap();
        assert_eq!(found.len(), 6);
        assert_eq!(found, brute_force_shorts(&a2, 2, 3));

        let d4 = reference::d4();
        let found = enumerate_short_vectors(&d4, 2).unwrap();
        assert_eq!(found.len(), 24);
        assert_eq!(found, brute_force_shorts(&d4, 2, 3));

        let e6 = reference::e6();
        assert_eq!(enumerate_short_vectors(&e6, 2).unwrap().len(), 72);

        let e8 = reference::e8();
        assert_eq!(enumerate_short_vectors(&e8, 2).unwrap().len(), 240);
    }

    #[test]
    fn classify_reference_lattices() {
        assert_eq!(classify_lattice(&reference::a2()).unwrap(), LatticeType::A2);
        assert_eq!(
            classify_lattice(&reference::a2_scaled()).unwrap(),
            LatticeType::A2Scaled
        );
        assert_eq!(classify_lattice(&reference::d4()).unwrap(), LatticeType::D4);
        assert_eq!(classify_lattice(&reference::e6()).unwrap(), LatticeType::E6);
        assert_eq!(classify_lattice(&reference::e8()).unwrap(), LatticeType::E8);
        assert_eq!(
            classify_lattice(&GramMatrix::diag(&[2, 4])).unwrap(),
            LatticeType::N2N4
        );
        assert_eq!(
            classify_lattice(&GramMatrix::diag(&[2, 2, 2])).unwrap(),
            LatticeType::N2N2N2
        );
        assert_eq!(
            classify_lattice(&GramMatrix::diag(&[2, 12])).unwrap(),
            LatticeType::Unclassified(GramMatrix::diag(&[2, 12]))
        );
        let not_pd = GramMatrix::new(vec![vec![2, 3], vec![3, 2]]);
        assert_eq!(classify_lattice(&not_pd), Err(HeightError::NotPositiveDefinite));
    }

    #[test]
    fn catalog_fingerprints_are_consistent_and_injective() {
        for (i, (fp_i, name_i)) in CATALOG.iter().enumerate() {
            for (fp_j, name_j) in CATALOG.iter().skip(i + 1) {
                assert_ne!(fp_i, fp_j, "{name_i} and {name_j} collide");
            }
        }
        let cases: [(&str, GramMatrix); 5] = [
            ("A2", reference::a2()),
            ("A2(2)", reference::a2_scaled()),
            ("D4", reference::d4()),
            ("E6", reference::e6()),
            ("E8", reference::e8()),
        ];
        for (name, g) in cases {
            let det = g.det().to_i64().unwrap();
            let shorts = enumerate_short_vectors(&g, 4).unwrap();
            let n2 = shorts.iter().filter(|v| g.norm(v) == 2).count();
            let n4 = shorts.iter().filter(|v| g.norm(v) == 4).count();
            let fp = (g.rank(), det, n2, n4);
            let listed = CATALOG.iter().find(|(_, n)| *n == name).unwrap().0;
            assert_eq!(fp, listed, "fingerprint mismatch for {name}");
        }
    }

    #[test]
    fn det_and_kron() {
        assert_eq!(reference::i4_kron_m().det(), BigInt::from(81));
        assert_eq!(reference::e8().det(), BigInt::from(1));
        assert_eq!(reference::e6().det(), BigInt::from(3));
    }

    #[test]
    fn gram_sign_equivalence() {
        let a = GramMatrix::new(vec![vec![4, 2], vec![2, 4]]);
        let b = GramMatrix::new(vec![vec![4, -2], vec![-2, 4]]);
        assert!(a.eq_up_to_signs(&b));
        let c = GramMatrix::new(vec![vec![4, 1], vec![1, 4]]);
        assert!(!a.eq_up_to_signs(&c));
    }
}
