//! Dense polynomials in the independent variable `z` over [`ParamScalar`],
//! plus the bivariate view in `(lambda, z)` used by the product-equation
//! solver.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::algebra::{ParamScalar, ScalarCtx};

#[derive(Clone, PartialEq, Eq)]
pub struct ZPoly {
    ctx: ScalarCtx,
    coeffs: Vec<ParamScalar>, // ascending powers of z, no trailing zeros
}

impl ZPoly {
    pub fn zero(ctx: &ScalarCtx) -> Self {
        ZPoly {
            ctx: ctx.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(ctx: &ScalarCtx) -> Self {
        ZPoly::constant(ctx.one())
    }

    pub fn constant(c: ParamScalar) -> Self {
        ZPoly {
            ctx: c.ctx(),
            coeffs: vec![c],
        }
        .trimmed()
    }

    /// The monomial `z`.
    pub fn gen(ctx: &ScalarCtx) -> Self {
        ZPoly {
            ctx: ctx.clone(),
            coeffs: vec![ctx.zero(), ctx.one()],
        }
    }

    /// `z - r`
    pub fn linear(r: &ParamScalar) -> Self {
        let ctx = r.ctx();
        ZPoly {
            coeffs: vec![-r, ctx.one()],
            ctx,
        }
        .trimmed()
    }

    pub fn from_coeffs(ctx: &ScalarCtx, coeffs: Vec<ParamScalar>) -> Self {
        ZPoly {
            ctx: ctx.clone(),
            coeffs,
        }
        .trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().is_some_and(ParamScalar::is_zero) {
            self.coeffs.pop();
        }
        self
    }

    pub fn ctx(&self) -> &ScalarCtx {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> ParamScalar {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| self.ctx.zero())
    }

    pub fn coeffs(&self) -> &[ParamScalar] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&ParamScalar> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &ParamScalar) -> Self {
        if c.is_zero() {
            return ZPoly::zero(&self.ctx);
        }
        ZPoly {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
        .trimmed()
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return ZPoly::zero(&self.ctx);
        }
        ZPoly {
            ctx: self.ctx.clone(),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &self.ctx.int(k as i64))
                .collect(),
        }
        .trimmed()
    }

    /// Antiderivative with integration constant zero.
    pub fn antiderivative(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut out = vec![self.ctx.zero()];
        for (k, c) in self.coeffs.iter().enumerate() {
            out.push(
                c.try_div(&self.ctx.int((k + 1) as i64))
                    .expect("integer division cannot fail"),
            );
        }
        ZPoly {
            ctx: self.ctx.clone(),
            coeffs: out,
        }
        .trimmed()
    }

    pub fn eval(&self, z: &ParamScalar) -> ParamScalar {
        let mut acc = self.ctx.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    pub fn eval_c64(&self, a: Complex64, b: Complex64, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.eval_c64(a, b);
        }
        acc
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = ZPoly::one(&self.ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn mul_xk(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.ctx.zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        ZPoly {
            ctx: self.ctx.clone(),
            coeffs,
        }
    }

    /// Expand around `center`: the returned coefficients are in powers of
    /// `t = z - center`.
    pub fn taylor_shift(&self, center: &ParamScalar) -> Vec<ParamScalar> {
        let mut out: Vec<ParamScalar> = Vec::new();
        for c in self.coeffs.iter().rev() {
            // out = out * (t + center) + c
            let mut next = vec![self.ctx.zero(); out.len() + 1];
            for (k, v) in out.iter().enumerate() {
                next[k + 1] = &next[k + 1] + v;
                next[k] = &next[k] + &(v * center);
            }
            next[0] = &next[0] + c;
            out = next;
        }
        if out.is_empty() {
            out.push(self.ctx.zero());
        }
        out
    }

    /// Euclidean division; the divisor's leading coefficient must be
    /// invertible.
    pub fn div_rem(&self, d: &ZPoly) -> crate::Result<(ZPoly, ZPoly)> {
        assert!(!d.is_zero(), "division of z-polynomial by zero");
        let dd = d.degree().unwrap();
        let lc_inv = d.leading().unwrap().inv()?;
        let mut rem = self.coeffs.clone();
        let mut quo = vec![self.ctx.zero(); self.coeffs.len().saturating_sub(dd)];
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
        Ok((
            ZPoly::from_coeffs(&self.ctx, quo),
            ZPoly::from_coeffs(&self.ctx, rem),
        ))
    }

    pub fn exact_div(&self, d: &ZPoly) -> crate::Result<ZPoly> {
        let (q, r) = self.div_rem(d)?;
        if !r.is_zero() {
            return Err(crate::Error::InternalInconsistency(format!(
                "inexact polynomial division, remainder {r}"
            )));
        }
        Ok(q)
    }
}

impl fmt::Debug for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ZPoly {
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
            } else {
                if c.is_one() {
                    write!(f, "z")?;
                } else {
                    write!(f, "({c})*z")?;
                }
                if k > 1 {
                    write!(f, "^{k}")?;
                }
            }
        }
        Ok(())
    }
}

impl Add for &ZPoly {
    type Output = ZPoly;
    fn add(self, rhs: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ZPoly::from_coeffs(
            &self.ctx,
            (0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect(),
        )
    }
}

impl Sub for &ZPoly {
    type Output = ZPoly;
    fn sub(self, rhs: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ZPoly::from_coeffs(
            &self.ctx,
            (0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect(),
        )
    }
}

impl Neg for &ZPoly {
    type Output = ZPoly;
    fn neg(self) -> ZPoly {
        ZPoly {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &ZPoly {
    type Output = ZPoly;
    fn mul(self, rhs: &ZPoly) -> ZPoly {
        if self.is_zero() || rhs.is_zero() {
            return ZPoly::zero(&self.ctx);
        }
        let mut out = vec![self.ctx.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
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
        ZPoly::from_coeffs(&self.ctx, out)
    }
}

/// Bivariate polynomial in `(lambda, z)`: `strata[p]` is the coefficient of
/// `lambda^p` as a polynomial in `z`.
#[derive(Clone, PartialEq, Eq)]
pub struct LzPoly {
    ctx: ScalarCtx,
    strata: Vec<ZPoly>, // ascending powers of lambda, trailing zeros trimmed
}

impl LzPoly {
    pub fn zero(ctx: &ScalarCtx) -> Self {
        LzPoly {
            ctx: ctx.clone(),
            strata: Vec::new(),
        }
    }

    pub fn from_strata(ctx: &ScalarCtx, strata: Vec<ZPoly>) -> Self {
        LzPoly {
            ctx: ctx.clone(),
            strata,
        }
        .trimmed()
    }

    pub fn from_z(p: ZPoly) -> Self {
        LzPoly {
            ctx: p.ctx().clone(),
            strata: vec![p],
        }
        .trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.strata.last().is_some_and(ZPoly::is_zero) {
            self.strata.pop();
        }
        self
    }

    pub fn ctx(&self) -> &ScalarCtx {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn lambda_degree(&self) -> Option<usize> {
        self.strata.len().checked_sub(1)
    }

    pub fn stratum(&self, p: usize) -> ZPoly {
        self.strata
            .get(p)
            .cloned()
            .unwrap_or_else(|| ZPoly::zero(&self.ctx))
    }

    pub fn strata(&self) -> &[ZPoly] {
        &self.strata
    }

    pub fn mul_lambda(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut strata = vec![ZPoly::zero(&self.ctx)];
        strata.extend(self.strata.iter().cloned());
        LzPoly {
            ctx: self.ctx.clone(),
            strata,
        }
    }

    pub fn mul_z(&self, other: &ZPoly) -> Self {
        LzPoly {
            ctx: self.ctx.clone(),
            strata: self.strata.iter().map(|s| s * other).collect(),
        }
        .trimmed()
    }

    pub fn d_dz(&self) -> Self {
        LzPoly {
            ctx: self.ctx.clone(),
            strata: self.strata.iter().map(ZPoly::derivative).collect(),
        }
        .trimmed()
    }

    pub fn eval_lambda(&self, lam: &ParamScalar) -> ZPoly {
        let mut acc = ZPoly::zero(&self.ctx);
        for s in self.strata.iter().rev() {
            acc = &acc.scale(lam) + s;
        }
        acc
    }
}

impl Add for &LzPoly {
    type Output = LzPoly;
    fn add(self, rhs: &LzPoly) -> LzPoly {
        let n = self.strata.len().max(rhs.strata.len());
        LzPoly::from_strata(
            &self.ctx,
            (0..n).map(|p| &self.stratum(p) + &rhs.stratum(p)).collect(),
        )
    }
}

impl Sub for &LzPoly {
    type Output = LzPoly;
    fn sub(self, rhs: &LzPoly) -> LzPoly {
        let n = self.strata.len().max(rhs.strata.len());
        LzPoly::from_strata(
            &self.ctx,
            (0..n).map(|p| &self.stratum(p) - &rhs.stratum(p)).collect(),
        )
    }
}

impl Mul for &LzPoly {
    type Output = LzPoly;
    fn mul(self, rhs: &LzPoly) -> LzPoly {
        if self.is_zero() || rhs.is_zero() {
            return LzPoly::zero(&self.ctx);
        }
        let mut out = vec![ZPoly::zero(&self.ctx); self.strata.len() + rhs.strata.len() - 1];
        for (i, si) in self.strata.iter().enumerate() {
            for (j, sj) in rhs.strata.iter().enumerate() {
                out[i + j] = &out[i + j] + &(si * sj);
            }
        }
        LzPoly::from_strata(&self.ctx, out)
    }
}

impl fmt::Display for LzPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, s) in self.strata.iter().enumerate().rev() {
            if s.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if p == 0 {
                write!(f, "{s}")?;
            } else {
                write!(f, "({s})*l")?;
                if p > 1 {
                    write!(f, "^{p}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LzPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> ScalarCtx {
        ScalarCtx::generic()
    }

    #[test]
    fn taylor_shift_recenters() {
        let c = ctx();
        // (z - 2)^2 + 3 expanded at center 2 must be t^2 + 3
        let p = &ZPoly::linear(&c.int(2)).pow(2) + &ZPoly::constant(c.int(3));
        let t = p.taylor_shift(&c.int(2));
        assert_eq!(t[0], c.int(3));
        assert_eq!(t[1], c.zero());
        assert_eq!(t[2], c.one());
    }

    #[test]
    fn div_rem_exact() {
        let c = ctx();
        let d = ZPoly::linear(&c.sym_a());
        let p = &d * &d;
        let (q, r) = p.div_rem(&d).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, d);
    }

    #[test]
    fn antiderivative_inverts_derivative() {
        let c = ctx();
        let p = ZPoly::from_coeffs(&c, vec![c.int(5), c.sym_a(), c.int(3)]);
        let back = p.derivative().antiderivative();
        // constant term is lost
        assert_eq!(back, &p - &ZPoly::constant(c.int(5)));
    }

    #[test]
    fn lz_product_and_eval() {
        let c = ctx();
        // (l + z)^2 = l^2 + 2lz + z^2
        let p = LzPoly::from_strata(&c, vec![ZPoly::gen(&c), ZPoly::one(&c)]);
        let sq = &p * &p;
        assert_eq!(sq.lambda_degree(), Some(2));
        let at_one = sq.eval_lambda(&c.one());
        let expect = &(&ZPoly::gen(&c) + &ZPoly::one(&c)) * &(&ZPoly::gen(&c) + &ZPoly::one(&c));
        assert_eq!(at_one, expect);
    }
}
