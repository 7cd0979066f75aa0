//! Rational functions of `z` in partial-fraction form, anchored at the fixed
//! pole set `{0, 1, a, b_1..b_M}`.
//!
//! The representation is unique: a polynomial part plus, per pole, the list
//! of Laurent coefficients.  Products go through a cleared-fraction
//! multiplication followed by exact re-decomposition (local series division
//! at every pole), so the invariant is restored after every operation.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;

use crate::algebra::{ParamScalar, Rat, ScalarCtx};
use crate::error::{Error, Result};
use crate::zpoly::ZPoly;

/// A singular point of the equation in the `z`-plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PolePoint {
    Zero,
    One,
    A,
    B(usize),
}

impl fmt::Display for PolePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolePoint::Zero => write!(f, "z=0"),
            PolePoint::One => write!(f, "z=1"),
            PolePoint::A => write!(f, "z=a"),
            PolePoint::B(k) => write!(f, "z=b{}", k + 1),
        }
    }
}

/// The anchored pole locations, validated pairwise distinct (and the
/// differences invertible, so local expansions exist on the branch).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleSet {
    ctx: ScalarCtx,
    a: ParamScalar,
    b: Vec<ParamScalar>,
}

impl PoleSet {
    pub fn new(ctx: ScalarCtx, a: ParamScalar, b: Vec<ParamScalar>) -> Result<Self> {
        let set = PoleSet { ctx, a, b };
        let pts = set.all_points();
        for (i, p) in pts.iter().enumerate() {
            for q in pts.iter().skip(i + 1) {
                let d = &set.location(*p) - &set.location(*q);
                if d.is_zero() {
                    return Err(Error::DegenerateConfiguration(format!(
                        "coincident singular points {p} and {q}"
                    )));
                }
                // Must be invertible for local expansions; a zero divisor
                // here surfaces as a branch split.
                d.inv()?;
            }
        }
        Ok(set)
    }

    pub fn ctx(&self) -> &ScalarCtx {
        &self.ctx
    }

    pub fn a_value(&self) -> &ParamScalar {
        &self.a
    }

    pub fn b_values(&self) -> &[ParamScalar] {
        &self.b
    }

    pub fn all_points(&self) -> Vec<PolePoint> {
        let mut v = vec![PolePoint::Zero, PolePoint::One, PolePoint::A];
        v.extend((0..self.b.len()).map(PolePoint::B));
        v
    }

    pub fn location(&self, p: PolePoint) -> ParamScalar {
        match p {
            PolePoint::Zero => self.ctx.zero(),
            PolePoint::One => self.ctx.one(),
            PolePoint::A => self.a.clone(),
            PolePoint::B(k) => self.b[k].clone(),
        }
    }
}

/// Rational function of `z` in partial fractions over [`ParamScalar`].
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunctionZ {
    poles: Arc<PoleSet>,
    poly: ZPoly,
    /// `parts[p][i]` is the coefficient of `(z - p)^-(i+1)`.
    parts: BTreeMap<PolePoint, Vec<ParamScalar>>,
}

impl RationalFunctionZ {
    pub fn zero(poles: &Arc<PoleSet>) -> Self {
        RationalFunctionZ {
            poles: poles.clone(),
            poly: ZPoly::zero(poles.ctx()),
            parts: BTreeMap::new(),
        }
    }

    pub fn from_poly(poles: &Arc<PoleSet>, poly: ZPoly) -> Self {
        RationalFunctionZ {
            poles: poles.clone(),
            poly,
            parts: BTreeMap::new(),
        }
    }

    pub fn constant(poles: &Arc<PoleSet>, c: ParamScalar) -> Self {
        RationalFunctionZ::from_poly(poles, ZPoly::constant(c))
    }

    pub fn poles(&self) -> &Arc<PoleSet> {
        &self.poles
    }

    pub fn ctx(&self) -> &ScalarCtx {
        self.poles.ctx()
    }

    pub fn poly_part(&self) -> &ZPoly {
        &self.poly
    }

    pub fn pole_part(&self, p: PolePoint) -> &[ParamScalar] {
        self.parts.get(&p).map_or(&[], Vec::as_slice)
    }

    /// Laurent coefficient of `(z - p)^(-order)`.
    pub fn pole_coeff(&self, p: PolePoint, order: usize) -> ParamScalar {
        assert!(order >= 1);
        self.parts
            .get(&p)
            .and_then(|v| v.get(order - 1))
            .cloned()
            .unwrap_or_else(|| self.ctx().zero())
    }

    pub fn residue(&self, p: PolePoint) -> ParamScalar {
        self.pole_coeff(p, 1)
    }

    pub fn pole_order(&self, p: PolePoint) -> usize {
        self.parts.get(&p).map_or(0, Vec::len)
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero() && self.parts.is_empty()
    }

    /// Constant if the function has no poles and degree <= 0.
    pub fn as_constant(&self) -> Option<ParamScalar> {
        if !self.parts.is_empty() || self.poly.degree() > Some(0) {
            return None;
        }
        Some(self.poly.coeff(0))
    }

    fn normalized(mut self) -> Self {
        self.parts.retain(|_, v| {
            while v.last().is_some_and(ParamScalar::is_zero) {
                v.pop();
            }
            !v.is_empty()
        });
        self
    }

    pub fn with_pole_term(mut self, p: PolePoint, order: usize, coeff: ParamScalar) -> Self {
        assert!(order >= 1);
        let zero = self.poles.ctx().zero();
        let v = self.parts.entry(p).or_default();
        while v.len() < order {
            v.push(zero.clone());
        }
        v[order - 1] = &v[order - 1] + &coeff;
        self.normalized()
    }

    pub fn scale(&self, c: &ParamScalar) -> Self {
        RationalFunctionZ {
            poles: self.poles.clone(),
            poly: self.poly.scale(c),
            parts: self
                .parts
                .iter()
                .map(|(p, v)| (*p, v.iter().map(|x| x * c).collect()))
                .collect(),
        }
        .normalized()
    }

    pub fn derivative(&self) -> Self {
        let ctx = self.ctx().clone();
        let mut parts: BTreeMap<PolePoint, Vec<ParamScalar>> = BTreeMap::new();
        for (p, v) in &self.parts {
            let mut out = vec![ctx.zero(); v.len() + 1];
            for (i, c) in v.iter().enumerate() {
                // d/dz (z-p)^-(i+1) = -(i+1) (z-p)^-(i+2)
                out[i + 1] = &out[i + 1] - &(c * &ctx.int((i + 1) as i64));
            }
            parts.insert(*p, out);
        }
        RationalFunctionZ {
            poles: self.poles.clone(),
            poly: self.poly.derivative(),
            parts,
        }
        .normalized()
    }

    /// Term-by-term antiderivative with integration constant zero.  Errors
    /// when any residue is nonzero (the antiderivative would be logarithmic).
    pub fn antiderivative(&self) -> Result<Self> {
        let ctx = self.ctx().clone();
        let mut parts: BTreeMap<PolePoint, Vec<ParamScalar>> = BTreeMap::new();
        for (p, v) in &self.parts {
            if !v[0].is_zero() {
                return Err(Error::LogarithmicAntiderivative {
                    location: format!("{p}"),
                });
            }
            if v.len() == 1 {
                continue;
            }
            let mut out = vec![ctx.zero(); v.len() - 1];
            for (i, c) in v.iter().enumerate().skip(1) {
                // (z-p)^-(i+1) integrates to -(1/i) (z-p)^-i
                out[i - 1] = c
                    .try_div(&ctx.int(-(i as i64)))
                    .expect("integer division cannot fail");
            }
            parts.insert(*p, out);
        }
        Ok(RationalFunctionZ {
            poles: self.poles.clone(),
            poly: self.poly.antiderivative(),
            parts,
        }
        .normalized())
    }

    /// Cleared form `(numerator, denominator exponents)`.
    pub fn to_fraction(&self) -> (ZPoly, Vec<(PolePoint, usize)>) {
        let ctx = self.ctx().clone();
        let dens: Vec<(PolePoint, usize)> =
            self.parts.iter().map(|(p, v)| (*p, v.len())).collect();
        let mut den = ZPoly::one(&ctx);
        for (p, e) in &dens {
            den = &den * &ZPoly::linear(&self.poles.location(*p)).pow(*e as u32);
        }
        let mut num = &self.poly * &den;
        for (p, v) in &self.parts {
            let e_p = v.len();
            let lin = ZPoly::linear(&self.poles.location(*p));
            let mut rest = ZPoly::one(&ctx);
            for (q, e) in &dens {
                if q != p {
                    rest = &rest * &ZPoly::linear(&self.poles.location(*q)).pow(*e as u32);
                }
            }
            for (i, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                // c/(z-p)^(i+1) * den = c (z-p)^(e_p-i-1) * rest
                let term = &lin.pow((e_p - i - 1) as u32).scale(c) * &rest;
                num = &num + &term;
            }
        }
        (num, dens)
    }

    /// Exact partial-fraction decomposition of `num / prod (z-p)^e`.
    pub fn from_fraction(
        poles: &Arc<PoleSet>,
        num: &ZPoly,
        dens: &[(PolePoint, usize)],
    ) -> Result<Self> {
        let ctx = poles.ctx().clone();
        let mut den = ZPoly::one(&ctx);
        for (p, e) in dens {
            if *e == 0 {
                continue;
            }
            den = &den * &ZPoly::linear(&poles.location(*p)).pow(*e as u32);
        }
        if den.degree() == Some(0) {
            let dinv = den.coeff(0).inv()?;
            return Ok(RationalFunctionZ::from_poly(poles, num.scale(&dinv)));
        }
        let (poly, rem) = num.div_rem(&den)?;
        let mut parts: BTreeMap<PolePoint, Vec<ParamScalar>> = BTreeMap::new();
        for (p, e) in dens {
            if *e == 0 {
                continue;
            }
            let loc = poles.location(*p);
            // series of rem / (den / (z-p)^e) at z = p, to order e-1
            let mut dp = ZPoly::one(&ctx);
            for (q, eq) in dens {
                if q != p && *eq > 0 {
                    dp = &dp * &ZPoly::linear(&poles.location(*q)).pow(*eq as u32);
                }
            }
            let rem_t = rem.taylor_shift(&loc);
            let dp_t = dp.taylor_shift(&loc);
            let g = series_div(&rem_t, &dp_t, *e)?;
            let mut v = vec![ctx.zero(); *e];
            for i in 1..=*e {
                v[i - 1] = g[*e - i].clone();
            }
            parts.insert(*p, v);
        }
        let out = RationalFunctionZ {
            poles: poles.clone(),
            poly,
            parts,
        }
        .normalized();
        #[cfg(debug_assertions)]
        {
            let (num2, dens2) = out.to_fraction();
            let mut den2 = ZPoly::one(&ctx);
            for (p, e) in &dens2 {
                den2 = &den2 * &ZPoly::linear(&poles.location(*p)).pow(*e as u32);
            }
            debug_assert!(
                (&(num * &den2) - &(&num2 * &den)).is_zero(),
                "partial fraction decomposition failed the reconstruction audit"
            );
        }
        Ok(out)
    }

    /// Multiply by a plain polynomial in `z`.
    pub fn mul_poly(&self, q: &ZPoly) -> Result<Self> {
        if q.is_zero() || self.is_zero() {
            return Ok(RationalFunctionZ::zero(&self.poles));
        }
        let (num, dens) = self.to_fraction();
        RationalFunctionZ::from_fraction(&self.poles, &(&num * q), &dens)
    }

    /// Laurent expansion around `p`: `(negative, regular)`, where
    /// `negative[i]` multiplies `(z-p)^-(i+1)` and `regular[j]` multiplies
    /// `(z-p)^j`.
    pub fn laurent_at(
        &self,
        p: PolePoint,
        pos_order: usize,
    ) -> Result<(Vec<ParamScalar>, Vec<ParamScalar>)> {
        let ctx = self.ctx().clone();
        let loc = self.poles.location(p);
        let negative = self.parts.get(&p).cloned().unwrap_or_default();
        let mut regular = vec![ctx.zero(); pos_order + 1];
        let shifted = self.poly.taylor_shift(&loc);
        for (j, c) in shifted.iter().enumerate().take(pos_order + 1) {
            regular[j] = &regular[j] + c;
        }
        for (q, v) in &self.parts {
            if *q == p {
                continue;
            }
            let d = &loc - &self.poles.location(*q);
            let d_inv = d.inv()?;
            for (idx, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let i = idx + 1;
                // (z-q)^-i = (d + t)^-i = d^-i sum_j C(-i,j) (t/d)^j
                let mut factor = d_inv.pow(i as u32);
                for (j, slot) in regular.iter_mut().enumerate() {
                    // C(-i, j) = (-1)^j C(i+j-1, j)
                    let binom = binom_rat(i + j - 1, j);
                    let signed = if j % 2 == 0 { binom } else { -binom };
                    *slot = &*slot + &(&(c * &factor) * &ctx.rational(signed));
                    factor = &factor * &d_inv;
                }
            }
        }
        Ok((negative, regular))
    }

    pub fn eval_c64(&self, a: Complex64, b: &[Complex64], z: Complex64) -> Complex64 {
        let loc = |p: PolePoint| -> Complex64 {
            match p {
                PolePoint::Zero => Complex64::new(0.0, 0.0),
                PolePoint::One => Complex64::new(1.0, 0.0),
                PolePoint::A => a,
                PolePoint::B(k) => b[k],
            }
        };
        let bb = b.first().copied().unwrap_or(Complex64::new(0.0, 0.0));
        let mut acc = self.poly.eval_c64(a, bb, z);
        for (p, v) in &self.parts {
            let d = z - loc(*p);
            let mut pw = d;
            for c in v {
                acc += c.eval_c64(a, bb) / pw;
                pw *= d;
            }
        }
        acc
    }
}

impl std::ops::Add for &RationalFunctionZ {
    type Output = RationalFunctionZ;
    fn add(self, rhs: &RationalFunctionZ) -> RationalFunctionZ {
        let mut parts = self.parts.clone();
        for (p, v) in &rhs.parts {
            let slot = parts.entry(*p).or_default();
            while slot.len() < v.len() {
                slot.push(self.poles.ctx().zero());
            }
            for (i, c) in v.iter().enumerate() {
                slot[i] = &slot[i] + c;
            }
        }
        RationalFunctionZ {
            poles: self.poles.clone(),
            poly: &self.poly + &rhs.poly,
            parts,
        }
        .normalized()
    }
}

impl std::ops::Sub for &RationalFunctionZ {
    type Output = RationalFunctionZ;
    fn sub(self, rhs: &RationalFunctionZ) -> RationalFunctionZ {
        self + &rhs.scale(&self.ctx().int(-1))
    }
}

impl std::ops::Mul for &RationalFunctionZ {
    type Output = RationalFunctionZ;
    fn mul(self, rhs: &RationalFunctionZ) -> RationalFunctionZ {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunctionZ::zero(&self.poles);
        }
        let (n1, d1) = self.to_fraction();
        let (n2, d2) = rhs.to_fraction();
        let mut dens: BTreeMap<PolePoint, usize> = d1.into_iter().collect();
        for (p, e) in d2 {
            *dens.entry(p).or_insert(0) += e;
        }
        let dens: Vec<(PolePoint, usize)> = dens.into_iter().collect();
        RationalFunctionZ::from_fraction(&self.poles, &(&n1 * &n2), &dens)
            .expect("product of anchored rational functions must decompose")
    }
}

impl fmt::Display for RationalFunctionZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.poly.is_zero() {
            write!(f, "{}", self.poly)?;
            first = false;
        }
        for (p, v) in &self.parts {
            for (i, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "({c})/({p})^{}", i + 1)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for RationalFunctionZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Truncated power-series division `num / den` to `n` terms; `den[0]` must be
/// invertible.
fn series_div(num: &[ParamScalar], den: &[ParamScalar], n: usize) -> Result<Vec<ParamScalar>> {
    assert!(!den.is_empty());
    let ctx = den[0].ctx();
    let d0_inv = den[0].inv()?;
    let mut out: Vec<ParamScalar> = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = num.get(k).cloned().unwrap_or_else(|| ctx.zero());
        for i in 1..=k {
            if let Some(di) = den.get(i) {
                if !di.is_zero() && !out[k - i].is_zero() {
                    acc = &acc - &(di * &out[k - i]);
                }
            }
        }
        out.push(&acc * &d0_inv);
    }
    Ok(out)
}

fn binom_rat(n: usize, k: usize) -> Rat {
    let mut num = BigInt::from(1);
    let mut den = BigInt::from(1);
    for i in 0..k {
        num *= BigInt::from((n - i) as u64);
        den *= BigInt::from((i + 1) as u64);
    }
    Rat::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat_i;

    fn poles_generic() -> Arc<PoleSet> {
        let ctx = ScalarCtx::generic();
        Arc::new(PoleSet::new(ctx.clone(), ctx.sym_a(), vec![ctx.sym_b()]).unwrap())
    }

    #[test]
    fn rejects_coincident_points() {
        let ctx = ScalarCtx::generic();
        let r = PoleSet::new(ctx.clone(), ctx.one(), vec![]);
        assert!(matches!(r, Err(Error::DegenerateConfiguration(_))));
    }

    #[test]
    fn decompose_simple() {
        // 1/(z(z-1)) = -1/z + 1/(z-1)
        let ps = poles_generic();
        let ctx = ps.ctx().clone();
        let f = RationalFunctionZ::from_fraction(
            &ps,
            &ZPoly::one(&ctx),
            &[(PolePoint::Zero, 1), (PolePoint::One, 1)],
        )
        .unwrap();
        assert_eq!(f.residue(PolePoint::Zero), ctx.int(-1));
        assert_eq!(f.residue(PolePoint::One), ctx.one());
        assert!(f.poly_part().is_zero());
    }

    #[test]
    fn product_roundtrip() {
        let ps = poles_generic();
        let ctx = ps.ctx().clone();
        let f = RationalFunctionZ::zero(&ps).with_pole_term(PolePoint::Zero, 1, ctx.one());
        let g = RationalFunctionZ::zero(&ps).with_pole_term(PolePoint::One, 1, ctx.one());
        let prod = &f * &g;
        let direct = RationalFunctionZ::from_fraction(
            &ps,
            &ZPoly::one(&ctx),
            &[(PolePoint::Zero, 1), (PolePoint::One, 1)],
        )
        .unwrap();
        assert_eq!(prod, direct);
    }

    #[test]
    fn derivative_and_antiderivative() {
        let ps = poles_generic();
        let ctx = ps.ctx().clone();
        // f = 1/(z-1)^2 + z^2
        let f = RationalFunctionZ::from_poly(&ps, ZPoly::gen(&ctx).pow(2))
            .with_pole_term(PolePoint::One, 2, ctx.one());
        let fp = f.derivative();
        assert_eq!(fp.pole_order(PolePoint::One), 3);
        assert!(fp.residue(PolePoint::One).is_zero());
        let back = fp.antiderivative().unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn logarithmic_antiderivative_detected() {
        let ps = poles_generic();
        let ctx = ps.ctx().clone();
        let f = RationalFunctionZ::zero(&ps).with_pole_term(PolePoint::A, 1, ctx.one());
        assert!(matches!(
            f.antiderivative(),
            Err(Error::LogarithmicAntiderivative { .. })
        ));
    }

    #[test]
    fn laurent_at_foreign_pole() {
        // 1/z around z = 1: 1/(1 + t) = 1 - t + t^2 - ...
        let ps = poles_generic();
        let ctx = ps.ctx().clone();
        let f = RationalFunctionZ::zero(&ps).with_pole_term(PolePoint::Zero, 1, ctx.one());
        let (neg, reg) = f.laurent_at(PolePoint::One, 3).unwrap();
        assert!(neg.is_empty());
        assert_eq!(reg[0], ctx.one());
        assert_eq!(reg[1], ctx.int(-1));
        assert_eq!(reg[2], ctx.one());
        assert_eq!(reg[3], ctx.int(-1));
    }

    #[test]
    fn mul_poly_cancels_pole() {
        let ps = poles_generic();
        let ctx = ps.ctx().clone();
        // (z - b) / (z-b)^2 = 1/(z-b)
        let f = RationalFunctionZ::zero(&ps).with_pole_term(PolePoint::B(0), 2, ctx.one());
        let g = f.mul_poly(&ZPoly::linear(&ctx.sym_b())).unwrap();
        assert_eq!(g.pole_order(PolePoint::B(0)), 1);
        assert_eq!(g.residue(PolePoint::B(0)), ctx.one());
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binom_rat(4, 2), rat_i(6));
        assert_eq!(binom_rat(5, 0), rat_i(1));
    }
}
