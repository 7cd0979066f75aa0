//! Canonical exact serialization used repo-wide: a polynomial is a list of
//! terms `{num, den, pow_a, pow_b, pow_z, pow_lambda}` with decimal-string
//! coefficients, sorted by `(pow_lambda, pow_z, pow_b, pow_a)` descending;
//! omitted exponents are zero.  For energy-plane curves the `pow_lambda`
//! slot carries the power of `E`.

use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::algebra::{BPoly, ParamScalar, QaRat, Rat, ScalarCtx};
use crate::error::{Error, Result};
use crate::psi::{PsiPolynomial, SpectralCurve};
use crate::zpoly::{LzPoly, ZPoly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub num: String,
    pub den: String,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub pow_a: u32,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub pow_b: u32,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub pow_z: u32,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub pow_lambda: u32,
}

fn is_zero(v: &u32) -> bool {
    *v == 0
}

fn sort_terms(terms: &mut [Term]) {
    terms.sort_by(|x, y| {
        (y.pow_lambda, y.pow_z, y.pow_b, y.pow_a).cmp(&(
            x.pow_lambda,
            x.pow_z,
            x.pow_b,
            x.pow_a,
        ))
    });
}

fn push_scalar(out: &mut Vec<Term>, s: &ParamScalar, pow_z: u32, pow_lambda: u32) -> Result<()> {
    if s.is_zero() {
        return Ok(());
    }
    let bp = s.as_bpoly().ok_or_else(|| {
        Error::SerializeUnsupported(format!("coefficient has a b-denominator: {s}"))
    })?;
    for (pb, qa) in bp.coeffs().iter().enumerate() {
        if qa.is_zero() {
            continue;
        }
        let den_const = qa.den().as_constant().ok_or_else(|| {
            Error::SerializeUnsupported(format!(
                "coefficient is not a polynomial in a: {qa}"
            ))
        })?;
        for (pa, c) in qa.num().coeffs().iter().enumerate() {
            if num_traits::Zero::is_zero(c) {
                continue;
            }
            let val = c / &den_const;
            out.push(Term {
                num: val.numer().to_string(),
                den: val.denom().to_string(),
                pow_a: pa as u32,
                pow_b: pb as u32,
                pow_z,
                pow_lambda,
            });
        }
    }
    Ok(())
}

pub fn bpoly_terms(p: &BPoly) -> Result<Vec<Term>> {
    let ctx = ScalarCtx::generic();
    let mut out = Vec::new();
    push_scalar(&mut out, &ctx.from_bpoly(p.clone()), 0, 0)?;
    sort_terms(&mut out);
    Ok(out)
}

pub fn zpoly_terms(p: &ZPoly, pow_lambda: u32) -> Result<Vec<Term>> {
    let mut out = Vec::new();
    for (pz, c) in p.coeffs().iter().enumerate() {
        push_scalar(&mut out, c, pz as u32, pow_lambda)?;
    }
    sort_terms(&mut out);
    Ok(out)
}

pub fn lz_terms(p: &LzPoly) -> Result<Vec<Term>> {
    let mut out = Vec::new();
    for (pl, s) in p.strata().iter().enumerate() {
        for (pz, c) in s.coeffs().iter().enumerate() {
            push_scalar(&mut out, c, pz as u32, pl as u32)?;
        }
    }
    sort_terms(&mut out);
    Ok(out)
}

pub fn psi_terms(psi: &PsiPolynomial) -> Result<Vec<Term>> {
    let mut out = Vec::new();
    for (j, p) in psi.tilde_a.iter().enumerate() {
        let pl = (psi.genus - j) as u32;
        for (pz, c) in p.coeffs().iter().enumerate() {
            push_scalar(&mut out, c, pz as u32, pl)?;
        }
    }
    sort_terms(&mut out);
    Ok(out)
}

pub fn curve_terms(curve: &SpectralCurve) -> Result<Vec<Term>> {
    scalars_terms(&curve.nu_sq)
}

/// Coefficient list in ascending lambda/E powers.
pub fn scalars_terms(coeffs: &[ParamScalar]) -> Result<Vec<Term>> {
    let mut out = Vec::new();
    for (pl, c) in coeffs.iter().enumerate() {
        push_scalar(&mut out, c, 0, pl as u32)?;
    }
    sort_terms(&mut out);
    Ok(out)
}

fn term_rat(t: &Term) -> Result<Rat> {
    let num = BigInt::from_str(&t.num)
        .map_err(|e| Error::Parse(format!("bad numerator '{}': {e}", t.num)))?;
    let den = BigInt::from_str(&t.den)
        .map_err(|e| Error::Parse(format!("bad denominator '{}': {e}", t.den)))?;
    if num_traits::Zero::is_zero(&den) {
        return Err(Error::Parse("zero denominator in term".into()));
    }
    Ok(Rat::new(num, den))
}

/// Rebuild a `(lambda, z)` polynomial over a context from canonical terms.
pub fn lz_from_terms(terms: &[Term], ctx: &ScalarCtx) -> Result<LzPoly> {
    let max_l = terms.iter().map(|t| t.pow_lambda).max().unwrap_or(0) as usize;
    let mut strata: Vec<Vec<ParamScalar>> = vec![Vec::new(); max_l + 1];
    for t in terms {
        let v = term_rat(t)?;
        let mono = {
            let qa = QaRat::from_poly(crate::algebra::QaPoly::from_coeffs({
                let mut c = vec![Rat::from(BigInt::from(0)); t.pow_a as usize + 1];
                c[t.pow_a as usize] = v;
                c
            }));
            let mut bc = vec![QaRat::zero(); t.pow_b as usize + 1];
            bc[t.pow_b as usize] = qa;
            ctx.from_bpoly(BPoly::from_coeffs(bc))
        };
        let stratum = &mut strata[t.pow_lambda as usize];
        while stratum.len() <= t.pow_z as usize {
            stratum.push(ctx.zero());
        }
        stratum[t.pow_z as usize] = &stratum[t.pow_z as usize] + &mono;
    }
    Ok(LzPoly::from_strata(
        ctx,
        strata
            .into_iter()
            .map(|c| ZPoly::from_coeffs(ctx, c))
            .collect(),
    ))
}

pub fn bpoly_from_terms(terms: &[Term]) -> Result<BPoly> {
    let ctx = ScalarCtx::generic();
    let lz = lz_from_terms(terms, &ctx)?;
    if lz.lambda_degree().unwrap_or(0) > 0 || lz.stratum(0).degree().unwrap_or(0) > 0 {
        return Err(Error::Parse("terms are not a pure (a, b) polynomial".into()));
    }
    let s = lz.stratum(0).coeff(0);
    s.as_bpoly()
        .cloned()
        .ok_or_else(|| Error::Parse("terms reconstruct a fraction".into()))
}

/// First differing monomial between two canonical term lists, if any.
pub fn first_difference(got: &[Term], want: &[Term]) -> Option<String> {
    let key = |t: &Term| (t.pow_lambda, t.pow_z, t.pow_b, t.pow_a);
    let mut gi = got.iter().peekable();
    let mut wi = want.iter().peekable();
    loop {
        match (gi.peek(), wi.peek()) {
            (None, None) => return None,
            (Some(g), None) => {
                return Some(format!(
                    "extra term l^{} z^{} b^{} a^{} = {}/{}",
                    g.pow_lambda, g.pow_z, g.pow_b, g.pow_a, g.num, g.den
                ))
            }
            (None, Some(w)) => {
                return Some(format!(
                    "missing term l^{} z^{} b^{} a^{} = {}/{}",
                    w.pow_lambda, w.pow_z, w.pow_b, w.pow_a, w.num, w.den
                ))
            }
            (Some(g), Some(w)) => {
                if key(g) == key(w) {
                    if g.num != w.num || g.den != w.den {
                        return Some(format!(
                            "coefficient of l^{} z^{} b^{} a^{}: got {}/{}, want {}/{}",
                            g.pow_lambda, g.pow_z, g.pow_b, g.pow_a, g.num, g.den, w.num, w.den
                        ));
                    }
                    gi.next();
                    wi.next();
                } else if key(g) > key(w) {
                    let g = *g;
                    return Some(format!(
                        "extra term l^{} z^{} b^{} a^{} = {}/{}",
                        g.pow_lambda, g.pow_z, g.pow_b, g.pow_a, g.num, g.den
                    ));
                } else {
                    let w = *w;
                    return Some(format!(
                        "missing term l^{} z^{} b^{} a^{} = {}/{}",
                        w.pow_lambda, w.pow_z, w.pow_b, w.pow_a, w.num, w.den
                    ));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{ab_vars, parse_bpoly, parse_lz};

    #[test]
    fn roundtrip_bpoly() {
        let p = parse_bpoly("3*b^2 - 2*(a+2)*b + 3*a").unwrap();
        let terms = bpoly_terms(&p).unwrap();
        let back = bpoly_from_terms(&terms).unwrap();
        assert_eq!(p, back);
        // terms are sorted (pow_b descending here)
        assert!(terms.windows(2).all(|w| {
            (w[0].pow_lambda, w[0].pow_z, w[0].pow_b, w[0].pow_a)
                > (w[1].pow_lambda, w[1].pow_z, w[1].pow_b, w[1].pow_a)
        }));
    }

    #[test]
    fn roundtrip_lz() {
        let ctx = ScalarCtx::generic();
        let vars = ab_vars(&ctx);
        let p = parse_lz("(z-b)^2*l + (3+3*a-4*b)*z^2 - 2*(5*b+5*a*b-8*a)*z", &ctx, &vars)
            .unwrap();
        let terms = lz_terms(&p).unwrap();
        let back = lz_from_terms(&terms, &ctx).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn difference_reporting() {
        let p = parse_bpoly("b^2 - a").unwrap();
        let q = parse_bpoly("b^2 - 2*a").unwrap();
        let tp = bpoly_terms(&p).unwrap();
        let tq = bpoly_terms(&q).unwrap();
        let d = first_difference(&tp, &tq).unwrap();
        assert!(d.contains("coefficient"), "{d}");
        assert!(first_difference(&tp, &tp).is_none());
    }

    #[test]
    fn fraction_coefficients_serialize() {
        let p = parse_bpoly("b^2/4 - a/3").unwrap();
        let terms = bpoly_terms(&p).unwrap();
        assert_eq!(terms[0].den, "4");
        assert_eq!(terms[1].den, "3");
    }
}
