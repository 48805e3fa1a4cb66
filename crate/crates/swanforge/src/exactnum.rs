//! Exact rationals and cyclotomic numbers.
//!
//! A [`CycNum`] lives in `Q(ζ_n)` for a fixed ambient order `n`, stored in the
//! power basis `1, ζ, ..., ζ^{φ(n)-1}` after reduction modulo `Φ_n`. That form
//! is unique, so structural equality is field equality.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `"num/den"`, or just `"num"` when the denominator is one.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::input(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let n: BigInt = a.trim().parse().map_err(|_| bad())?;
            let d: BigInt = b.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Integer value of a rational, if it is one.
pub fn rat_to_i64(r: &Rat) -> Option<i64> {
    if r.denom().is_one() {
        r.numer().to_i64()
    } else {
        None
    }
}

pub fn euler_phi(n: usize) -> usize {
    let mut m = n;
    let mut out = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Coefficients (constant term first) of the n-th cyclotomic polynomial.
pub fn cyclotomic_poly(n: usize) -> Vec<i64> {
    // x^n - 1 divided by Φ_d for every proper divisor d.
    let mut num = vec![0i64; n + 1];
    num[0] = -1;
    num[n] = 1;
    for d in 1..n {
        if n % d == 0 {
            num = poly_div_exact(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn poly_div_exact(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let da = a.len() - 1;
    let mut q = vec![0i64; da - db + 1];
    for k in (0..=da - db).rev() {
        let c = rem[k + db] / b[db];
        q[k] = c;
        for (j, bj) in b.iter().enumerate() {
            rem[k + j] -= c * bj;
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    q
}

/// Shared reduction data for `Q(ζ_n)`.
#[derive(Debug)]
pub struct CycField {
    n: usize,
    phi: usize,
    // reduce[k] = coefficients of x^k mod Φ_n, for 0 ≤ k < n
    reduce: Vec<Vec<i64>>,
}

impl CycField {
    /// Field data for order `n`, memoised per process.
    pub fn get(n: usize) -> Arc<CycField> {
        assert!(n >= 1, "cyclotomic order must be positive");
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<CycField>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("cyclotomic cache poisoned");
        guard.entry(n).or_insert_with(|| Arc::new(CycField::build(n))).clone()
    }

    fn build(n: usize) -> CycField {
        let phi = euler_phi(n);
        let cyc = cyclotomic_poly(n);
        let mut reduce = Vec::with_capacity(n);
        let mut cur = vec![0i64; phi];
        cur[0] = 1;
        for _ in 0..n {
            reduce.push(cur.clone());
            // multiply by x and reduce with the monic Φ_n
            let top = cur[phi - 1];
            for j in (1..phi).rev() {
                cur[j] = cur[j - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for j in 0..phi {
                    cur[j] -= top * cyc[j];
                }
            }
        }
        CycField { n, phi, reduce }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.phi
    }
}

/// An element of `Q(ζ_n)` in canonical form.
#[derive(Clone)]
pub struct CycNum {
    field: Arc<CycField>,
    c: Vec<Rat>,
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        self.field.n == other.field.n && self.c == other.c
    }
}
impl Eq for CycNum {}

impl std::hash::Hash for CycNum {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.field.n.hash(state);
        self.c.hash(state);
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum[n={}]({})", self.field.n, self)
    }
}

impl CycNum {
    pub fn zero(n: usize) -> CycNum {
        let field = CycField::get(n);
        let c = vec![Rat::zero(); field.phi];
        CycNum { field, c }
    }

    pub fn from_rat(n: usize, r: Rat) -> CycNum {
        let mut x = CycNum::zero(n);
        x.c[0] = r;
        x
    }

    pub fn from_int(n: usize, k: i64) -> CycNum {
        CycNum::from_rat(n, rint(k))
    }

    pub fn one(n: usize) -> CycNum {
        CycNum::from_int(n, 1)
    }

    /// `ζ_n^k`.
    pub fn zeta_pow(n: usize, k: i64) -> CycNum {
        let field = CycField::get(n);
        let e = k.rem_euclid(n as i64) as usize;
        let c = field.reduce[e].iter().map(|&v| rint(v)).collect();
        CycNum { field, c }
    }

    /// Canonical form from an arbitrary coefficient sequence on `ζ^0, ζ^1, ...`
    /// (exponents are taken mod n).
    pub fn from_power_coeffs(n: usize, coeffs: &[Rat]) -> CycNum {
        let field = CycField::get(n);
        let mut acc = vec![Rat::zero(); n];
        for (j, a) in coeffs.iter().enumerate() {
            if !a.is_zero() {
                acc[j % n] += a;
            }
        }
        let c = reduce_full(&field, &acc);
        CycNum { field, c }
    }

    /// Same as [`from_power_coeffs`](Self::from_power_coeffs) but with integer coefficients.
    pub fn from_int_power_coeffs(n: usize, coeffs: &[i64]) -> CycNum {
        let field = CycField::get(n);
        let mut c = vec![Rat::zero(); field.phi];
        let mut acc = vec![0i64; field.phi];
        for (j, &a) in coeffs.iter().enumerate() {
            if a != 0 {
                for (t, &r) in field.reduce[j % n].iter().enumerate() {
                    acc[t] += a * r;
                }
            }
        }
        for (t, v) in acc.into_iter().enumerate() {
            c[t] = rint(v);
        }
        CycNum { field, c }
    }

    pub fn order(&self) -> usize {
        self.field.n
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// Re-normalise; canonical values are already normal so this is the identity on them.
    pub fn normalize(&self) -> CycNum {
        CycNum::from_power_coeffs(self.field.n, &self.c)
    }

    pub fn to_rational(&self) -> Option<Rat> {
        if self.c[1..].iter().all(|x| x.is_zero()) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    pub fn scale(&self, r: &Rat) -> CycNum {
        CycNum { field: self.field.clone(), c: self.c.iter().map(|x| x * r).collect() }
    }

    fn check(&self, other: &CycNum) -> Result<()> {
        if self.field.n != other.field.n {
            return Err(Error::input(format!(
                "cyclotomic order mismatch: {} vs {}",
                self.field.n, other.field.n
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &CycNum) -> Result<CycNum> {
        self.check(other)?;
        let c = self.c.iter().zip(&other.c).map(|(a, b)| a + b).collect();
        Ok(CycNum { field: self.field.clone(), c })
    }

    pub fn try_sub(&self, other: &CycNum) -> Result<CycNum> {
        self.check(other)?;
        let c = self.c.iter().zip(&other.c).map(|(a, b)| a - b).collect();
        Ok(CycNum { field: self.field.clone(), c })
    }

    pub fn try_mul(&self, other: &CycNum) -> Result<CycNum> {
        self.check(other)?;
        let n = self.field.n;
        // raw product has exponents < 2φ-1 ≤ 2n; fold mod n then reduce.
        let mut acc = vec![Rat::zero(); n];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                acc[(i + j) % n] += a * b;
            }
        }
        Ok(CycNum { field: self.field.clone(), c: reduce_full(&self.field, &acc) })
    }

    /// Ring automorphism `ζ ↦ ζ^k`.
    pub fn galois(&self, k: i64) -> Result<CycNum> {
        let n = self.field.n as i64;
        if gcd_i64(k.rem_euclid(n), n) != 1 {
            return Err(Error::input(format!("galois exponent {k} not coprime to {n}")));
        }
        let mut acc = vec![Rat::zero(); self.field.n];
        for (j, a) in self.c.iter().enumerate() {
            if !a.is_zero() {
                let e = (j as i64 * k).rem_euclid(n) as usize;
                acc[e] += a;
            }
        }
        Ok(CycNum { field: self.field.clone(), c: reduce_full(&self.field, &acc) })
    }

    /// Complex conjugate.
    pub fn conj(&self) -> CycNum {
        self.galois(-1).expect("-1 is a unit")
    }

    pub fn pow(&self, e: u32) -> CycNum {
        let mut out = CycNum::one(self.field.n);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Re-express inside `Q(ζ_m)` for a multiple `m` of the current order.
    pub fn embed(&self, m: usize) -> Result<CycNum> {
        let n = self.field.n;
        if m % n != 0 {
            return Err(Error::input(format!("cannot embed order {n} into order {m}")));
        }
        let step = m / n;
        let mut acc = vec![Rat::zero(); m];
        for (j, a) in self.c.iter().enumerate() {
            acc[(j * step) % m] += a;
        }
        Ok(CycNum::from_power_coeffs(m, &acc))
    }

    /// Inverse of [`embed`](Self::embed): express inside `Q(ζ_m)`, `m | n`, if possible.
    pub fn descend(&self, m: usize) -> Result<CycNum> {
        let n = self.field.n;
        if m == n {
            return Ok(self.clone());
        }
        if n % m != 0 {
            return Err(Error::input(format!("order {m} does not divide {n}")));
        }
        let dm = CycField::get(m).phi;
        // columns: images of ζ_m^i, i < φ(m); solve by elimination over Q
        let cols: Vec<CycNum> = (0..dm).map(|i| CycNum::zeta_pow(m, i as i64).embed(n)).collect::<Result<_>>()?;
        let rows = self.field.phi;
        let mut a: Vec<Vec<Rat>> =
            (0..rows).map(|r| cols.iter().map(|c| c.c[r].clone()).chain([self.c[r].clone()]).collect()).collect();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..dm {
            let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else { continue };
            a.swap(row, p);
            let inv = Rat::one() / a[row][col].clone();
            for x in a[row].iter_mut() {
                *x *= inv.clone();
            }
            for r in 0..rows {
                if r != row && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for j in 0..=dm {
                        let t = a[row][j].clone() * f.clone();
                        a[r][j] -= t;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        if a[row..].iter().any(|r| !r[dm].is_zero()) {
            return Err(Error::input(format!("value does not lie in Q(ζ_{m})")));
        }
        let mut d = vec![Rat::zero(); dm];
        for (r, &c) in pivots.iter().enumerate() {
            d[c] = a[r][dm].clone();
        }
        Ok(CycNum::from_power_coeffs(m, &d))
    }

    /// Lexicographic order on canonical coefficients.
    pub fn cmp_canonical(&self, other: &CycNum) -> Ordering {
        self.field.n.cmp(&other.field.n).then_with(|| self.c.cmp(&other.c))
    }

    /// Parse the report form produced by `Display`.
    pub fn parse(s: &str, n: usize) -> Result<CycNum> {
        let field = CycField::get(n);
        let mut acc = vec![Rat::zero(); n];
        let t = s.trim();
        if t == "0" {
            return Ok(CycNum::zero(n));
        }
        for term in t.split(" + ") {
            let term = term.trim();
            let (coef, exp) = match term.split_once('*') {
                Some((c, z)) => {
                    let e = if z == "z" {
                        1
                    } else if let Some(rest) = z.strip_prefix("z^") {
                        rest.parse::<usize>().map_err(|_| Error::input(format!("bad term {term:?}")))?
                    } else {
                        return Err(Error::input(format!("bad term {term:?}")));
                    };
                    (parse_rat(c)?, e)
                }
                None => (parse_rat(term)?, 0),
            };
            acc[exp % n] += coef;
        }
        Ok(CycNum { c: reduce_full(&field, &acc), field })
    }
}

fn reduce_full(field: &CycField, acc: &[Rat]) -> Vec<Rat> {
    let mut c = vec![Rat::zero(); field.phi];
    for (k, a) in acc.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        if k < field.phi {
            c[k] += a;
            continue;
        }
        for (t, &r) in field.reduce[k].iter().enumerate() {
            if r != 0 {
                c[t] += a * BigInt::from(r);
            }
        }
    }
    c
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (j, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let coef = fmt_rat(a);
            terms.push(match j {
                0 => coef,
                1 => format!("{coef}*z"),
                _ => format!("{coef}*z^{j}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl<'a> Add<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        self.try_add(rhs).expect("cyclotomic order mismatch")
    }
}

impl<'a> Sub<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        self.try_sub(rhs).expect("cyclotomic order mismatch")
    }
}

impl<'a> Mul<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        self.try_mul(rhs).expect("cyclotomic order mismatch")
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum { field: self.field.clone(), c: self.c.iter().map(|x| -x).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
}

pub fn cyc_binop(op: BinOp, x: &CycNum, y: &CycNum) -> Result<CycNum> {
    match op {
        BinOp::Add => x.try_add(y),
        BinOp::Sub => x.try_sub(y),
        BinOp::Mul => x.try_mul(y),
    }
}

pub fn cyc_galois(k: i64, x: &CycNum) -> Result<CycNum> {
    x.galois(k)
}

/// Sign of a rational as -1, 0, 1.
pub fn rat_sign(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_and_cyclotomic() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        for n in 1..60 {
            assert_eq!(cyclotomic_poly(n).len() - 1, euler_phi(n));
        }
        // Φ_105 is the first with a coefficient of absolute value 2
        assert!(cyclotomic_poly(105).iter().any(|&c| c.abs() == 2));
    }

    #[test]
    fn spec_examples() {
        let z4 = CycNum::zeta_pow(4, 1);
        let z43 = CycNum::zeta_pow(4, 3);
        assert!((&z4 + &z43).is_zero());
        let prod = &CycNum::zeta_pow(3, 1) * &CycNum::zeta_pow(3, 2);
        assert_eq!(prod, CycNum::one(3));
        let mut s = CycNum::zero(7);
        for j in 0..7 {
            s = &s + &CycNum::zeta_pow(7, j);
        }
        assert!(s.is_zero());
        assert_eq!(CycNum::zeta_pow(8, 1).galois(-1).unwrap(), CycNum::zeta_pow(8, 7));
        assert_eq!(CycNum::zeta_pow(8, 3).galois(1).unwrap(), CycNum::zeta_pow(8, 3));
    }

    #[test]
    fn order_mismatch_is_input_error() {
        let a = CycNum::one(4);
        let b = CycNum::one(3);
        assert!(matches!(cyc_binop(BinOp::Add, &a, &b), Err(Error::Input(_))));
        assert!(matches!(cyc_galois(2, &CycNum::one(4)), Err(Error::Input(_))));
    }

    #[test]
    fn display_parse_roundtrip() {
        let x = &CycNum::zeta_pow(12, 5).scale(&rat(3, 2)) + &CycNum::from_int(12, -4);
        let s = x.to_string();
        assert_eq!(CycNum::parse(&s, 12).unwrap(), x);
        assert_eq!(CycNum::zero(5).to_string(), "0");
        assert_eq!(fmt_rat(&rat(-6, 4)), "-3/2");
    }

    #[test]
    fn embed_preserves_value() {
        let x = CycNum::zeta_pow(3, 1);
        let y = x.embed(12).unwrap();
        assert_eq!(y, CycNum::zeta_pow(12, 4));
        assert!(x.embed(8).is_err());
    }

    #[test]
    fn rational_detection() {
        // ζ8 + ζ8^7 = √2 is real but not rational
        let r = &CycNum::zeta_pow(8, 1) + &CycNum::zeta_pow(8, 7);
        assert!(r.to_rational().is_none());
        let q = &r * &r;
        assert_eq!(q.to_rational(), Some(rint(2)));
    }
}
