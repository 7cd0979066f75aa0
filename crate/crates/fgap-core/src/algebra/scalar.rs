//! The top of the coefficient tower: polynomials in `b` over `Q(a)`, branch
//! condition polynomials, and [`ParamScalar`] — the scalar every downstream
//! module computes with.
//!
//! A scalar either lives in the quotient ring `Q(a)[b]/(p_b)` (branch mode:
//! the representative is reduced below `deg p_b` and the denominator is 1) or
//! in the fraction field `Q(a)(b)` (generic mode: `b` is a free symbol, and
//! partial-fraction expansions around `z = b` legitimately produce
//! denominators such as `b`, `b - 1`, `b - a`).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::qa::{QaPoly, QaRat, Rat};
use crate::error::{Error, Result};

/// Dense polynomial in `b` over `Q(a)`.  No trailing zeros.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BPoly {
    coeffs: Vec<QaRat>,
}

impl BPoly {
    pub fn zero() -> Self {
        BPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        BPoly::constant(QaRat::one())
    }

    pub fn constant(c: QaRat) -> Self {
        BPoly { coeffs: vec![c] }.trimmed()
    }

    /// The generator `b`.
    pub fn gen() -> Self {
        BPoly {
            coeffs: vec![QaRat::zero(), QaRat::one()],
        }
    }

    pub fn from_coeffs(coeffs: Vec<QaRat>) -> Self {
        BPoly { coeffs }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().is_some_and(QaRat::is_zero) {
            self.coeffs.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> QaRat {
        self.coeffs.get(k).cloned().unwrap_or_else(QaRat::zero)
    }

    pub fn coeffs(&self) -> &[QaRat] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&QaRat> {
        self.coeffs.last()
    }

    pub fn as_constant(&self) -> Option<QaRat> {
        match self.coeffs.len() {
            0 => Some(QaRat::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &QaRat) -> Self {
        if c.is_zero() {
            return BPoly::zero();
        }
        BPoly {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return BPoly::zero();
        }
        BPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &QaRat::int(k as i64))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = BPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn monic(&self) -> BPoly {
        match self.leading() {
            None => BPoly::zero(),
            Some(lc) => self.scale(&lc.inv().unwrap()),
        }
    }

    /// Euclidean division over the field `Q(a)`.
    pub fn div_rem(&self, d: &BPoly) -> (BPoly, BPoly) {
        assert!(!d.is_zero(), "division of Q(a)[b] polynomial by zero");
        let dd = d.degree().unwrap();
        let lc_inv = d.leading().unwrap().inv().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![QaRat::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let q = &rem[rem.len() - 1] * &lc_inv;
            if !q.is_zero() {
                for (i, dc) in d.coeffs.iter().enumerate() {
                    rem[k + i] = &rem[k + i] - &(dc * &q);
                }
                quo[k] = q;
            }
            rem.pop();
        }
        (BPoly::from_coeffs(quo), BPoly::from_coeffs(rem))
    }

    /// Exact division; panics if the remainder is nonzero.
    pub fn exact_div(&self, d: &BPoly) -> BPoly {
        let (q, r) = self.div_rem(d);
        assert!(r.is_zero(), "inexact 'exact' division in Q(a)[b]");
        q
    }

    /// Monic gcd over `Q(a)`.
    pub fn gcd(&self, other: &BPoly) -> BPoly {
        let mut f = self.clone();
        let mut g = other.clone();
        while !g.is_zero() {
            // Normalizing to monic at each step keeps Q(a) coefficients tame.
            g = g.monic();
            let (_, r) = f.div_rem(&g);
            f = g;
            g = r;
        }
        f.monic()
    }

    /// Square-free part: `self / gcd(self, self')`, normalized monic.
    pub fn squarefree_part(&self) -> BPoly {
        if self.is_zero() {
            return BPoly::zero();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).monic()
    }

    pub fn is_squarefree(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    pub fn eval(&self, b: &QaRat) -> QaRat {
        let mut acc = QaRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * b) + c;
        }
        acc
    }

    pub fn eval_c64(&self, a: Complex64, b: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * b + c.eval_c64(a);
        }
        acc
    }

    /// Substitute a rational value for `a` in every coefficient.  `None` if
    /// some coefficient denominator vanishes there.
    pub fn specialize_a(&self, a: &Rat) -> Option<Vec<Rat>> {
        self.coeffs.iter().map(|c| c.eval(a)).collect()
    }

    /// Rescale so that, viewed in `Z[a][b]`, the coefficients are integral,
    /// content-free and the leading `b`-coefficient has a positive leading
    /// rational.  The canonical representative of a branch condition.
    pub fn primitive_normalized(&self) -> BPoly {
        if self.is_zero() {
            return BPoly::zero();
        }
        // Clear Q(a) denominators first.
        let mut den = QaPoly::one();
        for c in &self.coeffs {
            let g = den.gcd(c.den());
            den = &den * &c.den().div_rem(&g).0;
        }
        let cleared: Vec<QaPoly> = self
            .coeffs
            .iter()
            .map(|c| {
                let q = QaRat::new(&c.num().clone() * &den, c.den().clone());
                debug_assert!(q.is_poly());
                q.num().scale(&q.den().as_constant().unwrap().recip())
            })
            .collect();
        // Integer content across all a-coefficients of all b-coefficients.
        let mut content: Option<Rat> = None;
        for p in &cleared {
            for r in p.coeffs() {
                if r.numer() == &num_bigint::BigInt::from(0) {
                    continue;
                }
                content = Some(match content {
                    None => r.abs(),
                    Some(c) => {
                        // gcd over Q: gcd of numerators / lcm of denominators
                        Rat::new(
                            num_integer::gcd(c.numer().clone(), r.numer().abs().clone()),
                            num_integer::lcm(c.denom().clone(), r.denom().clone()),
                        )
                    }
                });
            }
        }
        let mut content = content.unwrap();
        let lead = cleared.last().unwrap();
        let lead_sign = lead
            .leading()
            .map(|r| num_traits::Signed::is_negative(r))
            .unwrap_or(false);
        if lead_sign {
            content = -content;
        }
        let inv = content.recip();
        BPoly {
            coeffs: cleared
                .into_iter()
                .map(|p| QaRat::from_poly(p.scale(&inv)))
                .collect(),
        }
        .trimmed()
    }
}

use num_traits::Signed as _;

impl fmt::Debug for BPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for BPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "({c})")?;
            } else if c.is_one() {
                write!(f, "b")?;
                if k > 1 {
                    write!(f, "^{k}")?;
                }
            } else {
                write!(f, "({c})*b")?;
                if k > 1 {
                    write!(f, "^{k}")?;
                }
            }
        }
        Ok(())
    }
}

impl Add for &BPoly {
    type Output = BPoly;
    fn add(self, rhs: &BPoly) -> BPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        BPoly::from_coeffs((0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect())
    }
}

impl Sub for &BPoly {
    type Output = BPoly;
    fn sub(self, rhs: &BPoly) -> BPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        BPoly::from_coeffs((0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect())
    }
}

impl Neg for &BPoly {
    type Output = BPoly;
    fn neg(self) -> BPoly {
        BPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &BPoly {
    type Output = BPoly;
    fn mul(self, rhs: &BPoly) -> BPoly {
        if self.is_zero() || rhs.is_zero() {
            return BPoly::zero();
        }
        let mut out = vec![QaRat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
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
        BPoly::from_coeffs(out)
    }
}

/// Provenance of a branch condition polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchTag {
    SexticFactor,
    UserSupplied,
}

/// A square-free polynomial in `b` over `Q(a)` cutting out a branch of
/// candidate false points.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConditionPolynomial {
    poly: BPoly,
    tag: BranchTag,
}

impl ConditionPolynomial {
    pub fn new(poly: BPoly, tag: BranchTag) -> Result<Self> {
        let lc = poly
            .leading()
            .ok_or_else(|| Error::InvalidModulus("zero polynomial".into()))?;
        if lc.is_zero() {
            return Err(Error::InvalidModulus(
                "leading coefficient vanishes identically".into(),
            ));
        }
        if poly.degree() == Some(0) {
            return Err(Error::InvalidModulus("constant polynomial".into()));
        }
        if !poly.is_squarefree() {
            return Err(Error::InvalidModulus(format!(
                "not square-free in b: {poly}"
            )));
        }
        Ok(ConditionPolynomial { poly, tag })
    }

    pub fn poly(&self) -> &BPoly {
        &self.poly
    }

    pub fn tag(&self) -> BranchTag {
        self.tag
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap()
    }
}

impl fmt::Display for ConditionPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)
    }
}

/// Construction context for [`ParamScalar`]: fixes the modulus once so scalars
/// built from it are compatible.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScalarCtx {
    modulus: Option<Arc<ConditionPolynomial>>,
}

impl ScalarCtx {
    /// Generic mode: `b` is a free transcendental.
    pub fn generic() -> Self {
        ScalarCtx { modulus: None }
    }

    pub fn on_branch(p: Arc<ConditionPolynomial>) -> Self {
        ScalarCtx { modulus: Some(p) }
    }

    pub fn modulus(&self) -> Option<&Arc<ConditionPolynomial>> {
        self.modulus.as_ref()
    }

    pub fn zero(&self) -> ParamScalar {
        self.from_bpoly(BPoly::zero())
    }

    pub fn one(&self) -> ParamScalar {
        self.from_bpoly(BPoly::one())
    }

    pub fn rational(&self, r: Rat) -> ParamScalar {
        self.from_bpoly(BPoly::constant(QaRat::rational(r)))
    }

    pub fn int(&self, n: i64) -> ParamScalar {
        self.from_bpoly(BPoly::constant(QaRat::int(n)))
    }

    pub fn sym_a(&self) -> ParamScalar {
        self.from_bpoly(BPoly::constant(QaRat::gen()))
    }

    pub fn sym_b(&self) -> ParamScalar {
        self.from_bpoly(BPoly::gen())
    }

    pub fn from_qa(&self, q: QaRat) -> ParamScalar {
        self.from_bpoly(BPoly::constant(q))
    }

    pub fn from_bpoly(&self, p: BPoly) -> ParamScalar {
        ParamScalar::make(p, BPoly::one(), self.modulus.clone())
    }
}

/// Element of the coefficient tower with an optional branch modulus.
#[derive(Clone)]
pub struct ParamScalar {
    num: BPoly,
    den: BPoly, // always 1 in branch mode; monic in generic mode
    modulus: Option<Arc<ConditionPolynomial>>,
}

impl ParamScalar {
    fn make(num: BPoly, den: BPoly, modulus: Option<Arc<ConditionPolynomial>>) -> Self {
        ParamScalar { num, den, modulus }.normalized()
    }

    fn normalized(mut self) -> Self {
        match &self.modulus {
            Some(m) => {
                debug_assert!(
                    self.den.as_constant().is_some(),
                    "branch-mode scalar with polynomial denominator"
                );
                let den = self.den.as_constant().unwrap();
                if !den.is_one() {
                    self.num = self.num.scale(&den.inv().expect("zero denominator"));
                    self.den = BPoly::one();
                }
                let (_, r) = self.num.div_rem(m.poly());
                self.num = r;
            }
            None => {
                assert!(!self.den.is_zero(), "zero denominator in Q(a)(b)");
                if self.num.is_zero() {
                    self.den = BPoly::one();
                } else {
                    let g = self.num.gcd(&self.den);
                    if g.degree() != Some(0) {
                        self.num = self.num.exact_div(&g);
                        self.den = self.den.exact_div(&g);
                    }
                    let lc = self.den.leading().unwrap().inv().unwrap();
                    self.num = self.num.scale(&lc);
                    self.den = self.den.scale(&lc);
                }
            }
        }
        self
    }

    pub fn ctx(&self) -> ScalarCtx {
        ScalarCtx {
            modulus: self.modulus.clone(),
        }
    }

    pub fn modulus(&self) -> Option<&Arc<ConditionPolynomial>> {
        self.modulus.as_ref()
    }

    pub fn num(&self) -> &BPoly {
        &self.num
    }

    pub fn den(&self) -> &BPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// Polynomial representative; `None` in generic mode when a genuine
    /// `b`-denominator is present.
    pub fn as_bpoly(&self) -> Option<&BPoly> {
        if self.den.as_constant().is_some_and(|c| c.is_one()) {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn as_qa(&self) -> Option<QaRat> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n.div(&d))
    }

    pub fn as_rational(&self) -> Option<Rat> {
        self.as_qa()?.as_rational()
    }

    fn same_modulus(&self, other: &ParamScalar) -> bool {
        match (&self.modulus, &other.modulus) {
            (None, None) => true,
            (Some(a), Some(b)) => Arc::ptr_eq(a, b) || a.poly() == b.poly(),
            _ => false,
        }
    }

    fn check_compat(&self, other: &ParamScalar) {
        assert!(
            self.same_modulus(other),
            "scalars from different branches combined"
        );
    }

    /// Multiplicative inverse.  In branch mode this runs the extended
    /// Euclidean algorithm against the modulus; a nontrivial common factor is
    /// reported as [`Error::SplitModulus`].
    pub fn inv(&self) -> Result<ParamScalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match &self.modulus {
            None => Ok(ParamScalar::make(
                self.den.clone(),
                self.num.clone(),
                None,
            )),
            Some(m) => {
                let (g, inv) = ext_gcd_mod(&self.num, m.poly());
                if g.degree() != Some(0) {
                    return Err(Error::SplitModulus {
                        factor: g.monic().to_string(),
                    });
                }
                let scale = g.as_constant().unwrap().inv().unwrap();
                Ok(ParamScalar::make(
                    inv.scale(&scale),
                    BPoly::one(),
                    self.modulus.clone(),
                ))
            }
        }
    }

    /// The offending factor when `inv` would split, as a polynomial.
    pub fn zero_divisor_factor(&self) -> Option<BPoly> {
        let m = self.modulus.as_ref()?;
        if self.is_zero() {
            return None;
        }
        let g = self.num.gcd(m.poly());
        if g.degree() == Some(0) {
            None
        } else {
            Some(g)
        }
    }

    pub fn try_div(&self, rhs: &ParamScalar) -> Result<ParamScalar> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, mut e: u32) -> ParamScalar {
        let mut base = self.clone();
        let mut acc = self.ctx().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Numeric evaluation at concrete parameter values.  The caller is
    /// responsible for `b` actually satisfying the branch condition.
    pub fn eval_c64(&self, a: Complex64, b: Complex64) -> Complex64 {
        self.num.eval_c64(a, b) / self.den.eval_c64(a, b)
    }
}

impl PartialEq for ParamScalar {
    fn eq(&self, other: &Self) -> bool {
        self.same_modulus(other) && self.num == other.num && self.den == other.den
    }
}

impl Eq for ParamScalar {}

impl fmt::Debug for ParamScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ParamScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.as_constant().is_some_and(|c| c.is_one()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "[{}]/[{}]", self.num, self.den)
        }
    }
}

impl Add for &ParamScalar {
    type Output = ParamScalar;
    fn add(self, rhs: &ParamScalar) -> ParamScalar {
        self.check_compat(rhs);
        ParamScalar::make(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
            self.modulus.clone(),
        )
    }
}

impl Sub for &ParamScalar {
    type Output = ParamScalar;
    fn sub(self, rhs: &ParamScalar) -> ParamScalar {
        self.check_compat(rhs);
        ParamScalar::make(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
            self.modulus.clone(),
        )
    }
}

impl Neg for &ParamScalar {
    type Output = ParamScalar;
    fn neg(self) -> ParamScalar {
        ParamScalar {
            num: -&self.num,
            den: self.den.clone(),
            modulus: self.modulus.clone(),
        }
    }
}

impl Mul for &ParamScalar {
    type Output = ParamScalar;
    fn mul(self, rhs: &ParamScalar) -> ParamScalar {
        self.check_compat(rhs);
        ParamScalar::make(
            &self.num * &rhs.num,
            &self.den * &rhs.den,
            self.modulus.clone(),
        )
    }
}

/// Extended Euclid in `Q(a)[b]`: returns `(g, s)` with `s * x = g (mod m)`.
fn ext_gcd_mod(x: &BPoly, m: &BPoly) -> (BPoly, BPoly) {
    let mut r0 = x.clone();
    let mut r1 = m.clone();
    let mut s0 = BPoly::one();
    let mut s1 = BPoly::zero();
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1);
        let s = &s0 - &(&q * &s1);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    (r0, s0)
}

/// Reduce a polynomial in `b` modulo a branch condition: the canonical image
/// in `Q(a)[b]/(p)`.  The reduction map is a ring homomorphism.
pub fn quotient_reduce(x: &BPoly, p: &ConditionPolynomial) -> ParamScalar {
    let ctx = ScalarCtx::on_branch(Arc::new(p.clone()));
    ctx.from_bpoly(x.clone())
}

/// Chinese-remainder recombination of values on two coprime branches into a
/// value on the product branch.
pub fn crt_combine(
    v1: &ParamScalar,
    v2: &ParamScalar,
    combined: &ScalarCtx,
) -> Result<ParamScalar> {
    let p1 = v1
        .modulus()
        .ok_or_else(|| Error::InternalInconsistency("crt on generic scalar".into()))?
        .poly()
        .clone();
    let p2 = v2
        .modulus()
        .ok_or_else(|| Error::InternalInconsistency("crt on generic scalar".into()))?
        .poly()
        .clone();
    let (g, s) = ext_gcd_mod(&p1, &p2);
    if g.degree() != Some(0) {
        return Err(Error::InternalInconsistency(
            "crt moduli are not coprime".into(),
        ));
    }
    // s*p1 = g (mod p2)  =>  u := s*p1/g  satisfies u = 0 (mod p1), u = 1 (mod p2)
    let u = (&s * &p1).scale(&g.as_constant().unwrap().inv().unwrap());
    let one_minus_u = &BPoly::one() - &u;
    let r1 = v1.num().clone();
    let r2 = v2.num().clone();
    let res = &(&r1 * &one_minus_u) + &(&r2 * &u);
    Ok(combined.from_bpoly(res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::qa::rat_i;

    fn b() -> BPoly {
        BPoly::gen()
    }

    fn a() -> QaRat {
        QaRat::gen()
    }

    /// b^2 - a
    fn b2_minus_a() -> BPoly {
        &(&b() * &b()) - &BPoly::constant(a())
    }

    /// Independent long-division oracle for quotient reduction.
    fn long_division_reduce(x: &BPoly, p: &BPoly) -> BPoly {
        x.div_rem(p).1
    }

    #[test]
    fn reduce_b_cubed_mod_b2_minus_a() {
        // b^3 = a*b (mod b^2 - a)
        let p = ConditionPolynomial::new(b2_minus_a(), BranchTag::UserSupplied).unwrap();
        let r = quotient_reduce(&b().pow(3), &p);
        let expected = BPoly::from_coeffs(vec![QaRat::zero(), a()]);
        assert_eq!(r.num(), &expected);
    }

    #[test]
    fn reduce_modulus_to_zero() {
        let p = ConditionPolynomial::new(b2_minus_a(), BranchTag::UserSupplied).unwrap();
        assert!(quotient_reduce(&b2_minus_a(), &p).is_zero());
    }

    #[test]
    fn reduce_b5_matches_long_division_and_substitution() {
        // p = b^2 - 2b + a, so b^2 -> 2b - a under repeated substitution.
        let p_poly = BPoly::from_coeffs(vec![a(), QaRat::int(-2), QaRat::one()]);
        let p = ConditionPolynomial::new(p_poly.clone(), BranchTag::UserSupplied).unwrap();

        // Repeated substitution: x_{k+1} = subst(b^2 -> 2b - a) applied to b^5.
        let sub = BPoly::from_coeffs(vec![-&a(), QaRat::int(2)]);
        let mut by_subst = b().pow(5);
        while by_subst.degree() > Some(1) {
            let d = by_subst.degree().unwrap();
            let top = by_subst.coeff(d);
            let mut low = by_subst.clone();
            low = &low - &BPoly::from_coeffs({
                let mut v = vec![QaRat::zero(); d + 1];
                v[d] = top.clone();
                v
            });
            let replaced = &(&b().pow((d - 2) as u32) * &sub).scale(&top) + &low;
            by_subst = replaced;
        }

        let oracle = long_division_reduce(&b().pow(5), &p_poly);
        assert_eq!(by_subst, oracle);
        let r = quotient_reduce(&b().pow(5), &p);
        assert_eq!(r.num(), &oracle);
    }

    #[test]
    fn invalid_modulus_rejected() {
        // (b - 1)^2 is not square-free
        let sq = (&b() - &BPoly::one()).pow(2);
        assert!(matches!(
            ConditionPolynomial::new(sq, BranchTag::UserSupplied),
            Err(Error::InvalidModulus(_))
        ));
        // leading coefficient identically zero is impossible after trim, but a
        // constant polynomial is rejected too
        assert!(ConditionPolynomial::new(BPoly::one(), BranchTag::UserSupplied).is_err());
    }

    #[test]
    fn gcd_examples() {
        // (b-1)^2 vs (b-1)(b+1) -> b-1
        let f = (&b() - &BPoly::one()).pow(2);
        let g = &(&b() - &BPoly::one()) * &(&b() + &BPoly::one());
        assert_eq!(f.gcd(&g), &b() - &BPoly::one());

        // b^2 - a and b^2 - 2b + a are coprime for generic a: resultant != 0.
        let f = b2_minus_a();
        let g = BPoly::from_coeffs(vec![a(), QaRat::int(-2), QaRat::one()]);
        assert_eq!(f.gcd(&g).degree(), Some(0));

        // gcd(f, 0) = monic f
        let f = (&b() - &BPoly::constant(a())).scale(&QaRat::int(3));
        assert_eq!(f.gcd(&BPoly::zero()), f.monic());
    }

    #[test]
    fn inverse_on_branch() {
        let p = ConditionPolynomial::new(b2_minus_a(), BranchTag::UserSupplied).unwrap();
        let ctx = ScalarCtx::on_branch(Arc::new(p));
        // (b)^-1 = b/a since b^2 = a
        let inv = ctx.sym_b().inv().unwrap();
        let expected = &ctx.sym_b() * &ctx.from_qa(QaRat::gen().inv().unwrap());
        assert_eq!(inv, expected);
        let product = &inv * &ctx.sym_b();
        assert!(product.is_one());
    }

    #[test]
    fn zero_divisor_split() {
        // modulus (b - 1)(b - a) is square-free; b - 1 is a zero divisor
        let m = &(&b() - &BPoly::one()) * &(&b() - &BPoly::constant(a()));
        let p = ConditionPolynomial::new(m, BranchTag::UserSupplied).unwrap();
        let ctx = ScalarCtx::on_branch(Arc::new(p));
        let zd = &ctx.sym_b() - &ctx.one();
        match zd.inv() {
            Err(Error::SplitModulus { factor }) => assert!(factor.contains('b')),
            other => panic!("expected SplitModulus, got {other:?}"),
        }
    }

    #[test]
    fn generic_mode_fractions() {
        let ctx = ScalarCtx::generic();
        let x = &ctx.sym_b() - &ctx.one();
        let inv = x.inv().unwrap();
        assert!((&inv * &x).is_one());
        // 1/(b-1) + 1/(b+1) = 2b/(b^2-1)
        let y = &ctx.sym_b() + &ctx.one();
        let s = &inv + &y.inv().unwrap();
        let expect = (&ctx.int(2) * &ctx.sym_b())
            .try_div(&(&ctx.sym_b().pow(2) - &ctx.one()))
            .unwrap();
        assert_eq!(s, expect);
    }

    #[test]
    fn crt_roundtrip() {
        let p1 = ConditionPolynomial::new(b2_minus_a(), BranchTag::UserSupplied).unwrap();
        let q = BPoly::from_coeffs(vec![a(), QaRat::int(-2), QaRat::one()]);
        let p2 = ConditionPolynomial::new(q.clone(), BranchTag::UserSupplied).unwrap();
        let prod = ConditionPolynomial::new(&b2_minus_a() * &q, BranchTag::UserSupplied).unwrap();
        let ctx1 = ScalarCtx::on_branch(Arc::new(p1));
        let ctx2 = ScalarCtx::on_branch(Arc::new(p2));
        let ctx = ScalarCtx::on_branch(Arc::new(prod));

        // value b^3 + 1 on each branch, recombined, equals reduction on product
        let v = &b().pow(3) + &BPoly::one();
        let v1 = ctx1.from_bpoly(v.clone());
        let v2 = ctx2.from_bpoly(v.clone());
        let merged = crt_combine(&v1, &v2, &ctx).unwrap();
        assert_eq!(merged, ctx.from_bpoly(v));
    }

    #[test]
    fn primitive_normalized_form() {
        // (2/3) b^2 - (2/3) a  ->  3*(2/3)/2 ... -> b^2 - a with integer content 1
        let f = b2_minus_a().scale(&QaRat::rational(rat_i(2) / rat_i(3)));
        assert_eq!(f.primitive_normalized(), b2_minus_a());
        // negative leading flips sign
        let g = b2_minus_a().scale(&QaRat::int(-5));
        assert_eq!(g.primitive_normalized(), b2_minus_a());
    }
}
