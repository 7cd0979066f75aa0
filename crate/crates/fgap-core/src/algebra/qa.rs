//! The layers `Q`, `Q[a]` and `Q(a)` of the coefficient tower.
//!
//! [`QaPoly`] is a dense univariate polynomial in the parameter `a` over the
//! rationals, [`QaRat`] a reduced fraction of two such polynomials with a
//! monic denominator.  Both are immutable value types; every constructor
//! normalizes, so structural equality is semantic equality.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = num_rational::BigRational;

/// Rational from an integer pair; panics on zero denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_i(num: i64) -> Rat {
    Rat::from(BigInt::from(num))
}

/// Dense polynomial in `a` with rational coefficients.  Invariant: no
/// trailing zero coefficients (the zero polynomial is the empty vector).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QaPoly {
    coeffs: Vec<Rat>,
}

impl QaPoly {
    pub fn zero() -> Self {
        QaPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        QaPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        QaPoly { coeffs: vec![c] }.trimmed()
    }

    pub fn int(c: i64) -> Self {
        QaPoly::constant(rat_i(c))
    }

    /// The generator `a`.
    pub fn gen() -> Self {
        QaPoly {
            coeffs: vec![Rat::zero(), Rat::one()],
        }
    }

    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        QaPoly { coeffs }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    /// Constant value if degree <= 0.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.coeffs.len() {
            0 => Some(Rat::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return QaPoly::zero();
        }
        QaPoly {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return QaPoly::zero();
        }
        QaPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rat::from(BigInt::from(k)))
                .collect(),
        }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_c64(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
        }
        acc
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = QaPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Euclidean division; the divisor must be nonzero.
    pub fn div_rem(&self, d: &QaPoly) -> (QaPoly, QaPoly) {
        assert!(!d.is_zero(), "division of Q[a] polynomial by zero");
        let dd = d.degree().unwrap();
        let lc_inv = d.leading().unwrap().recip();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![Rat::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let q = &rem[rem.len() - 1] * &lc_inv;
            if !q.is_zero() {
                for (i, dc) in d.coeffs.iter().enumerate() {
                    let idx = k + i;
                    rem[idx] = &rem[idx] - &(dc * &q);
                }
                quo[k] = q;
            }
            rem.pop();
        }
        (QaPoly::from_coeffs(quo), QaPoly::from_coeffs(rem))
    }

    /// Rescale so the coefficients are coprime integers with positive leading
    /// coefficient.  Controls growth inside the Euclidean gcd.
    pub fn primitive(&self) -> QaPoly {
        if self.is_zero() {
            return QaPoly::zero();
        }
        let mut den_lcm = BigInt::one();
        for c in &self.coeffs {
            den_lcm = num_integer::lcm(den_lcm, c.denom().clone());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den_lcm / c.denom()))
            .collect();
        let mut g = BigInt::zero();
        for v in &ints {
            g = num_integer::gcd(g, v.clone());
        }
        if ints.last().unwrap().is_negative() {
            g = -g;
        }
        QaPoly {
            coeffs: ints.iter().map(|v| Rat::from(v / &g)).collect(),
        }
    }

    /// Monic multiple of self (zero stays zero).
    pub fn monic(&self) -> QaPoly {
        match self.leading() {
            None => QaPoly::zero(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    /// Monic greatest common divisor.  Euclidean remainders are reduced to
    /// primitive integer form at every step to keep coefficients small.
    pub fn gcd(&self, other: &QaPoly) -> QaPoly {
        let mut f = self.primitive();
        let mut g = other.primitive();
        while !g.is_zero() {
            let (_, r) = f.div_rem(&g);
            f = g;
            g = r.primitive();
        }
        f.monic()
    }

    /// Resultant via the subresultant-free route: determinant of the Sylvester
    /// matrix expanded by exact fraction arithmetic.  Only used on small
    /// inputs (tests and square-freeness certificates).
    pub fn resultant(&self, other: &QaPoly) -> Rat {
        let (m, n) = match (self.degree(), other.degree()) {
            (Some(m), Some(n)) => (m, n),
            _ => return Rat::zero(),
        };
        if m == 0 {
            return self.coeffs[0].pow(n as i32);
        }
        if n == 0 {
            return other.coeffs[0].pow(m as i32);
        }
        let size = m + n;
        let mut s = vec![vec![Rat::zero(); size]; size];
        for (row, item) in s.iter_mut().enumerate().take(n) {
            for (k, c) in self.coeffs.iter().rev().enumerate() {
                item[row + k] = c.clone();
            }
        }
        for row in 0..m {
            for (k, c) in other.coeffs.iter().rev().enumerate() {
                s[n + row][row + k] = c.clone();
            }
        }
        // Fraction-free elimination on a dense rational matrix.
        let mut det = Rat::one();
        for col in 0..size {
            let pivot_row = (col..size).find(|&r| !s[r][col].is_zero());
            let pr = match pivot_row {
                Some(pr) => pr,
                None => return Rat::zero(),
            };
            if pr != col {
                s.swap(pr, col);
                det = -det;
            }
            let pivot = s[col][col].clone();
            det *= &pivot;
            for r in col + 1..size {
                let factor = &s[r][col] / &pivot;
                if factor.is_zero() {
                    continue;
                }
                for c in col..size {
                    let sub = &s[col][c] * &factor;
                    s[r][c] = &s[r][c] - &sub;
                }
            }
        }
        det
    }
}

impl fmt::Debug for QaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if k == 0 || !mag.is_one() {
                write!(f, "{mag}")?;
                if k > 0 {
                    write!(f, "*")?;
                }
            }
            if k == 1 {
                write!(f, "a")?;
            } else if k > 1 {
                write!(f, "a^{k}")?;
            }
        }
        Ok(())
    }
}

impl Add for &QaPoly {
    type Output = QaPoly;
    fn add(self, rhs: &QaPoly) -> QaPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + rhs.coeff(k));
        }
        QaPoly::from_coeffs(out)
    }
}

impl Sub for &QaPoly {
    type Output = QaPoly;
    fn sub(self, rhs: &QaPoly) -> QaPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) - rhs.coeff(k));
        }
        QaPoly::from_coeffs(out)
    }
}

impl Neg for &QaPoly {
    type Output = QaPoly;
    fn neg(self) -> QaPoly {
        QaPoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl Mul for &QaPoly {
    type Output = QaPoly;
    fn mul(self, rhs: &QaPoly) -> QaPoly {
        if self.is_zero() || rhs.is_zero() {
            return QaPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, ci) in self.coeffs.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (j, cj) in rhs.coeffs.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                out[i + j] = &out[i + j] + &(ci * cj);
            }
        }
        QaPoly::from_coeffs(out)
    }
}

/// Element of `Q(a)`: a reduced fraction with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QaRat {
    num: QaPoly,
    den: QaPoly,
}

impl QaRat {
    pub fn new(num: QaPoly, den: QaPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator in Q(a)");
        if num.is_zero() {
            return QaRat {
                num: QaPoly::zero(),
                den: QaPoly::one(),
            };
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lc = den.leading().unwrap().recip();
        QaRat {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    pub fn from_poly(p: QaPoly) -> Self {
        QaRat {
            num: p,
            den: QaPoly::one(),
        }
    }

    pub fn zero() -> Self {
        QaRat::from_poly(QaPoly::zero())
    }

    pub fn one() -> Self {
        QaRat::from_poly(QaPoly::one())
    }

    pub fn rational(c: Rat) -> Self {
        QaRat::from_poly(QaPoly::constant(c))
    }

    pub fn int(c: i64) -> Self {
        QaRat::rational(rat_i(c))
    }

    pub fn gen() -> Self {
        QaRat::from_poly(QaPoly::gen())
    }

    pub fn num(&self) -> &QaPoly {
        &self.num
    }

    pub fn den(&self) -> &QaPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// Rational value if both parts are constants.
    pub fn as_rational(&self) -> Option<Rat> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    pub fn is_poly(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn inv(&self) -> Option<QaRat> {
        if self.is_zero() {
            return None;
        }
        Some(QaRat::new(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, rhs: &QaRat) -> QaRat {
        self * &rhs.inv().expect("division by zero in Q(a)")
    }

    /// Evaluate at a rational `a`; `None` when the denominator vanishes.
    pub fn eval(&self, a: &Rat) -> Option<Rat> {
        let d = self.den.eval(a);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(a) / d)
    }

    pub fn eval_c64(&self, a: Complex64) -> Complex64 {
        self.num.eval_c64(a) / self.den.eval_c64(a)
    }
}

impl fmt::Debug for QaRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QaRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.as_constant().is_some_and(|c| c.is_one()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl Add for &QaRat {
    type Output = QaRat;
    fn add(self, rhs: &QaRat) -> QaRat {
        QaRat::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &QaRat {
    type Output = QaRat;
    fn sub(self, rhs: &QaRat) -> QaRat {
        QaRat::new(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Neg for &QaRat {
    type Output = QaRat;
    fn neg(self) -> QaRat {
        QaRat {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &QaRat {
    type Output = QaRat;
    fn mul(self, rhs: &QaRat) -> QaRat {
        QaRat::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> QaPoly {
        QaPoly::gen()
    }

    #[test]
    fn div_rem_roundtrip() {
        // (a^3 - 2a + 1) / (a - 1)
        let f = QaPoly::from_coeffs(vec![rat_i(1), rat_i(-2), rat_i(0), rat_i(1)]);
        let d = &a() - &QaPoly::one();
        let (q, r) = f.div_rem(&d);
        assert!(r.is_zero());
        assert_eq!(&q * &d, f);
    }

    #[test]
    fn gcd_monic_and_divides() {
        let d = &a() - &QaPoly::int(3);
        let f = &(&d * &d) * &(&a() + &QaPoly::int(1));
        let g = &d * &(&a() - &QaPoly::int(5));
        let h = f.gcd(&g);
        assert_eq!(h, d.monic());
        assert!(f.div_rem(&h).1.is_zero());
        assert!(g.div_rem(&h).1.is_zero());
    }

    #[test]
    fn gcd_with_zero_is_monic_other() {
        let f = (&a() + &QaPoly::int(2)).scale(&rat_i(7));
        assert_eq!(f.gcd(&QaPoly::zero()), f.monic());
    }

    #[test]
    fn qarat_reduces() {
        // (a^2 - 1)/(a - 1) = a + 1
        let num = &(&a() * &a()) - &QaPoly::one();
        let den = &a() - &QaPoly::one();
        let q = QaRat::new(num, den);
        assert!(q.is_poly());
        assert_eq!(q.num(), &(&a() + &QaPoly::one()));
    }

    #[test]
    fn resultant_detects_common_root() {
        let f = &a() - &QaPoly::int(2);
        let g = &(&a() - &QaPoly::int(2)) * &(&a() + &QaPoly::int(1));
        assert!(f.resultant(&g).is_zero());
        let h = &a() + &QaPoly::int(5);
        assert!(!f.resultant(&h).is_zero());
    }
}
