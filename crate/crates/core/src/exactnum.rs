//! Arbitrary-precision integer arithmetic and the number-theoretic
//! predicates behind the rank decision diagrams: perfect-power tests,
//! factorization (trial division plus Pollard-Brent rho), sixth-power-free
//! reduction and Jacobi symbols.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision signed integer used throughout the crate.
pub type ExactInt = BigInt;
/// Arbitrary-precision rational, always kept in lowest terms by `num`.
pub type ExactRat = num_rational::BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactnumError {
    #[error("input must be non-zero")]
    ZeroInput,
    #[error("factorization effort cap exceeded for cofactor with {digits} digits")]
    FactorLimitExceeded { digits: usize },
    #[error("jacobi symbol requires an odd positive modulus")]
    EvenModulus,
}

/// Effort caps for [`factor`]. Exceeding them is an error, never a silent
/// wrong answer.
#[derive(Debug, Clone)]
pub struct FactorConfig {
    /// Trial-divide by all primes up to this bound.
    pub trial_division_limit: u64,
    /// Pollard-Brent iterations allowed per composite cofactor.
    pub rho_max_iterations: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            trial_division_limit: 1_000_000,
            rho_max_iterations: 2_000_000,
        }
    }
}

/// Exact prime factorization `sign * prod p_i^{e_i}` with strictly
/// increasing primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i32,
    pub factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    /// Multiplies the factorization back together.
    pub fn recompose(&self) -> BigInt {
        let mut acc = BigInt::from(self.sign);
        for (p, e) in &self.factors {
            acc *= p.pow(*e);
        }
        acc
    }

    /// p-adic valuation recorded in this factorization.
    pub fn valuation(&self, p: &BigInt) -> u32 {
        self.factors
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }
}

/// Exact integer n-th root: `r` with `r^n = x`, if one exists.
///
/// Even roots of negative numbers do not exist over the integers, so they
/// return `None`.
pub fn int_nth_root(n: u32, x: &BigInt) -> Option<BigInt> {
    assert!(n >= 1, "root degree must be positive");
    if x.is_negative() && n % 2 == 0 {
        return None;
    }
    let r = x.nth_root(n);
    if r.pow(n) == *x {
        Some(r)
    } else {
        None
    }
}

/// Exact rational n-th root of a reduced fraction.
pub fn rat_nth_root(n: u32, q: &ExactRat) -> Option<ExactRat> {
    let num = int_nth_root(n, q.numer())?;
    let den = int_nth_root(n, q.denom())?;
    Some(ExactRat::new(num, den))
}

/// Arithmetic shape queries used by the decision diagrams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithClass {
    Square,
    Minus3Square,
    Cube,
}

/// Is `x` a square, minus three times a square, or a cube?
///
/// `minus3_square` is decided as three integer sub-checks (`x < 0`,
/// `3 | x`, `-x/3` a perfect square) so no rational division occurs.
pub fn arith_class(x: &BigInt, kind: ArithClass) -> Result<bool, ExactnumError> {
    if x.is_zero() {
        return Err(ExactnumError::ZeroInput);
    }
    Ok(match kind {
        ArithClass::Square => !x.is_negative() && int_nth_root(2, x).is_some(),
        ArithClass::Minus3Square => {
            if !x.is_negative() {
                false
            } else {
                let minus_x = -x;
                let three = BigInt::from(3);
                minus_x.is_multiple_of(&three) && int_nth_root(2, &(minus_x / three)).is_some()
            }
        }
        ArithClass::Cube => int_nth_root(3, x).is_some(),
    })
}

/// Deterministic Miller-Rabin witnesses, correct for all inputs below
/// 3.3 * 10^24; inputs in this crate stay far below that.
const MR_WITNESSES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn is_probable_prime(n: &BigInt) -> bool {
    if *n < BigInt::from(2) {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let p = BigInt::from(small);
        if *n == p {
            return true;
        }
        if n.is_multiple_of(&p) {
            return false;
        }
    }
    let n_minus_1: BigInt = n - 1;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for w in MR_WITNESSES {
        let a = BigInt::from(w);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigInt::from(2), n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard-Brent rho with a fixed deterministic schedule of polynomial
/// offsets. Returns a non-trivial factor or `None` within the budget.
fn pollard_brent(n: &BigInt, max_iterations: u64) -> Option<BigInt> {
    let two = BigInt::from(2);
    if n.is_multiple_of(&two) {
        return Some(two);
    }
    let step = |y: &BigInt, c: &BigInt| (y * y + c) % n;
    for c in 1u64..=12 {
        let c = BigInt::from(c);
        let mut y = BigInt::from(2);
        let mut r: u64 = 1;
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut spent: u64 = 0;
        let m: u64 = 128;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = step(&y, &c);
            }
            let mut k: u64 = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let blk = m.min(r - k);
                for _ in 0..blk {
                    y = step(&y, &c);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += blk;
                spent += blk;
                if spent > max_iterations {
                    return None;
                }
            }
            r *= 2;
        }
        if g == *n {
            // The batched gcd collapsed to n; replay one step at a time.
            g = BigInt::one();
            while g.is_one() {
                ys = step(&ys, &c);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                if diff.is_zero() {
                    break;
                }
                g = diff.gcd(n);
            }
        }
        if !g.is_one() && g != *n {
            return Some(g);
        }
    }
    None
}

/// Exact factorization of a non-zero integer.
pub fn factor(x: &BigInt, cfg: &FactorConfig) -> Result<Factorization, ExactnumError> {
    if x.is_zero() {
        return Err(ExactnumError::ZeroInput);
    }
    let sign = if x.is_negative() { -1 } else { 1 };
    let mut n = x.abs();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();

    let push = |p: BigInt, e: u32, factors: &mut Vec<(BigInt, u32)>| {
        if let Some(last) = factors.iter_mut().find(|(q, _)| *q == p) {
            last.1 += e;
        } else {
            factors.push((p, e));
        }
    };

    // Trial division by 2, 3 and 6k+-1.
    let divide_out = |p: u64, n: &mut BigInt, factors: &mut Vec<(BigInt, u32)>| {
        let p_big = BigInt::from(p);
        let mut e = 0u32;
        while n.is_multiple_of(&p_big) {
            *n /= &p_big;
            e += 1;
        }
        if e > 0 {
            push(p_big, e, factors);
        }
    };
    divide_out(2, &mut n, &mut factors);
    divide_out(3, &mut n, &mut factors);
    let mut p: u64 = 5;
    while p <= cfg.trial_division_limit {
        if let Some(n_small) = n.to_u64() {
            if p.checked_mul(p).map(|pp| pp > n_small).unwrap_or(true) {
                break;
            }
        } else {
            // n still large; keep dividing
        }
        if BigInt::from(p).pow(2) > n {
            break;
        }
        divide_out(p, &mut n, &mut factors);
        divide_out(p + 2, &mut n, &mut factors);
        p += 6;
    }

    // Whatever is left is either 1, prime, or needs rho.
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            push(m, 1, &mut factors);
            continue;
        }
        // perfect powers first: rho struggles on p^2
        let mut split = None;
        for k in [2u32, 3, 5] {
            if let Some(r) = int_nth_root(k, &m) {
                split = Some((r, k));
                break;
            }
        }
        if let Some((r, k)) = split {
            for _ in 0..k {
                stack.push(r.clone());
            }
            continue;
        }
        match pollard_brent(&m, cfg.rho_max_iterations) {
            Some(d) => {
                stack.push(&m / &d);
                stack.push(d);
            }
            None => {
                return Err(ExactnumError::FactorLimitExceeded {
                    digits: m.to_string().len(),
                })
            }
        }
    }

    factors.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(Factorization { sign, factors })
}

/// Writes `x = root^6 * core` with every prime exponent of `core` in
/// `0..=5`. The core carries the sign of `x`; the root is positive.
pub fn sixth_power_free(
    x: &BigInt,
    cfg: &FactorConfig,
) -> Result<(BigInt, BigInt), ExactnumError> {
    let f = factor(x, cfg)?;
    let mut core = BigInt::from(f.sign);
    let mut root = BigInt::one();
    for (p, e) in &f.factors {
        core *= p.pow(e % 6);
        root *= p.pow(e / 6);
    }
    Ok((core, root))
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: &BigInt, n: &BigInt) -> Result<i32, ExactnumError> {
    if !n.is_positive() || n.is_even() {
        return Err(ExactnumError::EvenModulus);
    }
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut acc = 1i32;
    loop {
        if n.is_one() {
            return Ok(acc);
        }
        a = a.mod_floor(&n);
        if a.is_zero() {
            return Ok(0);
        }
        // pull out factors of two
        let twos = a.trailing_zeros().unwrap_or(0);
        if twos % 2 == 1 {
            let n_mod_8 = (&n % 8u32).to_u8().unwrap();
            if n_mod_8 == 3 || n_mod_8 == 5 {
                acc = -acc;
            }
        }
        a >>= twos;
        if a.is_one() {
            return Ok(acc);
        }
        // reciprocity
        if (&a % 4u32).to_u8().unwrap() == 3 && (&n % 4u32).to_u8().unwrap() == 3 {
            acc = -acc;
        }
        std::mem::swap(&mut a, &mut n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn nth_root_examples() {
        assert_eq!(int_nth_root(2, &big(16)), Some(big(4)));
        assert_eq!(int_nth_root(3, &big(1728)), Some(big(12)));
        assert_eq!(int_nth_root(2, &big(-4)), None);
        assert_eq!(int_nth_root(3, &big(-27)), Some(big(-3)));
        assert_eq!(int_nth_root(1, &big(-7)), Some(big(-7)));
        assert_eq!(int_nth_root(6, &big(64)), Some(big(2)));
    }

    #[test]
    fn arith_class_examples() {
        assert_eq!(arith_class(&big(27), ArithClass::Cube), Ok(true));
        assert_eq!(arith_class(&big(-27), ArithClass::Minus3Square), Ok(true));
        assert_eq!(arith_class(&big(27), ArithClass::Minus3Square), Ok(false));
        assert_eq!(arith_class(&big(16), ArithClass::Square), Ok(true));
        assert_eq!(arith_class(&big(-16), ArithClass::Square), Ok(false));
        assert_eq!(arith_class(&big(0), ArithClass::Square), Err(ExactnumError::ZeroInput));
    }

    #[test]
    fn factor_examples() {
        let cfg = FactorConfig::default();
        let f = factor(&big(3600), &cfg).unwrap();
        assert_eq!(f.sign, 1);
        assert_eq!(f.factors, vec![(big(2), 4), (big(3), 2), (big(5), 2)]);
        let f = factor(&big(-432), &cfg).unwrap();
        assert_eq!(f.sign, -1);
        assert_eq!(f.factors, vec![(big(2), 4), (big(3), 3)]);
        assert_eq!(f.recompose(), big(-432));
        let f = factor(&big(1), &cfg).unwrap();
        assert_eq!(f.sign, 1);
        assert!(f.factors.is_empty());
    }

    #[test]
    fn factor_limit_is_loud() {
        let cfg = FactorConfig {
            trial_division_limit: 10,
            rho_max_iterations: 0,
        };
        // 10403 = 101 * 103 resists trial division to 10 and a zero-budget rho
        let err = factor(&big(10403), &cfg).unwrap_err();
        assert!(matches!(err, ExactnumError::FactorLimitExceeded { .. }));
    }

    #[test]
    fn factor_larger_semiprime() {
        let cfg = FactorConfig::default();
        let n = BigInt::from(1_000_003i64) * BigInt::from(1_000_033i64);
        let f = factor(&n, &cfg).unwrap();
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.recompose(), n);
    }

    #[test]
    fn sixth_power_free_examples() {
        let cfg = FactorConfig::default();
        assert_eq!(sixth_power_free(&big(64), &cfg).unwrap(), (big(1), big(2)));
        assert_eq!(sixth_power_free(&big(128), &cfg).unwrap(), (big(2), big(2)));
        assert_eq!(sixth_power_free(&big(3600), &cfg).unwrap(), (big(3600), big(1)));
        assert_eq!(sixth_power_free(&big(-432), &cfg).unwrap(), (big(-432), big(1)));
        assert_eq!(
            sixth_power_free(&(big(-27) * big(729)), &cfg).unwrap(),
            (big(-27), big(3))
        );
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(&big(-3), &big(7)), Ok(1));
        assert_eq!(jacobi(&big(-3), &big(5)), Ok(-1));
        assert_eq!(jacobi(&big(-1), &big(1)), Ok(1));
        assert_eq!(jacobi(&big(2), &big(4)), Err(ExactnumError::EvenModulus));
        assert_eq!(jacobi(&big(15), &big(9)), Ok(0));
    }

    #[test]
    fn jacobi_matches_euler_criterion_on_primes() {
        // deterministic pseudo-random sweep over odd primes
        let primes: Vec<i64> = (3..2000)
            .filter(|&p| is_probable_prime(&big(p)))
            .collect();
        let mut state = 0x9e3779b97f4a7c15u64;
        for i in 0..1000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let p = primes[(state >> 33) as usize % primes.len()];
            let a = (state % 4001) as i64 - 2000 + i % 3;
            if a == 0 {
                continue;
            }
            let sym = jacobi(&big(a), &big(p)).unwrap();
            let euler = big(a).modpow(&big((p - 1) / 2), &big(p));
            let expect = if euler.is_zero() {
                0
            } else if euler.is_one() {
                1
            } else {
                -1
            };
            assert_eq!(sym, expect, "a={a} p={p}");
        }
    }

    proptest! {
        #[test]
        fn squares_and_cubes_classify(x in -1000000i64..1000000i64) {
            prop_assume!(x != 0);
            let x = big(x);
            prop_assert!(arith_class(&(&x * &x), ArithClass::Square).unwrap());
            prop_assert!(arith_class(&(big(-3) * &x * &x), ArithClass::Minus3Square).unwrap());
            prop_assert!(arith_class(&(&x * &x * &x), ArithClass::Cube).unwrap());
        }

        #[test]
        fn factor_recomposes(x in -100000i64..100000i64) {
            prop_assume!(x != 0);
            let cfg = FactorConfig::default();
            let f = factor(&big(x), &cfg).unwrap();
            prop_assert_eq!(f.recompose(), big(x));
            for w in f.factors.windows(2) {
                prop_assert!(w[0].0 < w[1].0);
            }
        }

        #[test]
        fn sixth_power_free_roundtrip(x in -100000i64..100000i64, k in 1i64..6) {
            prop_assume!(x != 0);
            let cfg = FactorConfig::default();
            let y = big(x) * big(k).pow(6);
            let (core, root) = sixth_power_free(&y, &cfg).unwrap();
            prop_assert_eq!(&root.pow(6) * &core, y);
            let f = factor(&core, &cfg).unwrap();
            for (_, e) in f.factors {
                prop_assert!(e < 6);
            }
        }
    }
}
