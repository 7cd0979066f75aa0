//! The third-order product equation, its polynomial solution
//! `Psi(lambda, z)`, and the hyperelliptic spectral curve `nu^2(lambda)`.

use crate::algebra::{ExactMatrix, ParamScalar, ScalarCtx};
use crate::error::{Error, Result};
use crate::fuchsian::{genus_bounds, FuchsianEquation};
use crate::zpoly::{LzPoly, ZPoly};

/// Coefficients of the product equation, cleared by `U^2` where
/// `U = z(z-1)(z-a) prod (z-b_k)`:
/// `C3 Psi''' + C2 Psi'' + (C1_0 + lambda C1_1) Psi'
///    + (C0_0 + lambda C0_1) Psi = 0`.
#[derive(Clone)]
pub struct ProductOde {
    pub c3: ZPoly,
    pub c2: ZPoly,
    pub c1_0: ZPoly,
    pub c1_1: ZPoly,
    pub c0_0: ZPoly,
    pub c0_1: ZPoly,
}

/// Assemble the cleared product-equation coefficients from `P` and `Q`.
pub fn build_product_ode(eq: &FuchsianEquation) -> Result<ProductOde> {
    let ctx = eq.ctx().clone();
    let a = eq.poles.a_value().clone();
    let e3 = &(&ZPoly::gen(&ctx) * &ZPoly::linear(&ctx.one())) * &ZPoly::linear(&a);
    let mut big_pi = ZPoly::one(&ctx);
    for (k, &nk) in eq.chars.n.iter().enumerate() {
        if nk > 0 {
            big_pi = &big_pi * &ZPoly::linear(&eq.config.b[k]);
        }
    }
    let u = &e3 * &big_pi;
    let u_prime = u.derivative();

    // P = p_num / U exactly (all poles simple).
    let (p_num, p_dens) = eq.p.to_fraction();
    {
        let mut check = ZPoly::one(&ctx);
        for (pt, e) in &p_dens {
            check = &check * &ZPoly::linear(&eq.poles.location(*pt)).pow(*e as u32);
        }
        if check != u {
            return Err(Error::InternalInconsistency(
                "P denominator does not match U".into(),
            ));
        }
    }
    // lambda-free part of Q: q0 = num0 / U, so (Sz + R_M)/(4 E3) has
    // numerator 4*num0 over U.
    let (num0, q_dens) = eq.q0.to_fraction();
    let num0 = {
        // the fraction may omit vanished poles; rescale to denominator U
        let mut den = ZPoly::one(&ctx);
        for (pt, e) in &q_dens {
            den = &den * &ZPoly::linear(&eq.poles.location(*pt)).pow(*e as u32);
        }
        let scale = u.exact_div(&den)?;
        &num0 * &scale
    };

    let c3 = &u * &u;
    let c2 = (&p_num * &u).scale(&ctx.int(3));
    let c1_0 = {
        let t = &(&p_num.derivative() * &u) - &(&p_num * &u_prime);
        let t = &t + &(&num0 * &u).scale(&ctx.int(4));
        &t + &(&p_num * &p_num).scale(&ctx.int(2))
    };
    let c1_1 = &big_pi * &u;
    let half = ctx
        .one()
        .try_div(&ctx.int(2))
        .expect("division by two");
    let c0_0 = {
        let t = &(&num0.derivative() * &u) - &(&num0 * &u_prime);
        &t.scale(&ctx.int(2)) + &(&p_num * &num0).scale(&ctx.int(4))
    };
    let c0_1 = {
        let t = &(&big_pi.derivative() * &u) - &(&big_pi * &u_prime);
        &t.scale(&half) + &(&p_num * &big_pi)
    };
    Ok(ProductOde {
        c3,
        c2,
        c1_0,
        c1_1,
        c0_0,
        c0_1,
    })
}

/// The polynomial `Psi_{g,N}`; `tilde_a[j]` is the coefficient of
/// `lambda^(g-j)`, and `tilde_a[0]` is the pinned leading coefficient.
#[derive(Clone, PartialEq, Eq)]
pub struct PsiPolynomial {
    pub tilde_a: Vec<ZPoly>,
    pub genus: usize,
    pub z_degree: u32,
}

impl PsiPolynomial {
    pub fn to_lz(&self, ctx: &ScalarCtx) -> LzPoly {
        let mut strata = vec![ZPoly::zero(ctx); self.genus + 1];
        for (j, p) in self.tilde_a.iter().enumerate() {
            strata[self.genus - j] = p.clone();
        }
        LzPoly::from_strata(ctx, strata)
    }

    pub fn eval_c64(
        &self,
        a: num_complex::Complex64,
        b: num_complex::Complex64,
        lambda: num_complex::Complex64,
        z: num_complex::Complex64,
    ) -> num_complex::Complex64 {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for p in &self.tilde_a {
            acc = acc * lambda + p.eval_c64(a, b, z);
        }
        acc
    }
}

impl std::fmt::Debug for PsiPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

impl std::fmt::Display for PsiPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (j, p) in self.tilde_a.iter().enumerate() {
            if j > 0 {
                write!(f, " + ")?;
            }
            let pow = self.genus - j;
            if pow == 0 {
                write!(f, "[{p}]")?;
            } else if pow == 1 {
                write!(f, "[{p}]*l")?;
            } else {
                write!(f, "[{p}]*l^{pow}")?;
            }
        }
        Ok(())
    }
}

/// `z^m1 (z-1)^m2 (z-a)^m3 prod (z-b_k)^(2 n_k)`.
pub fn leading_coefficient(eq: &FuchsianEquation) -> ZPoly {
    let ctx = eq.ctx().clone();
    let mut out = ZPoly::gen(&ctx).pow(eq.chars.m[1]);
    out = &out * &ZPoly::linear(&ctx.one()).pow(eq.chars.m[2]);
    out = &out * &ZPoly::linear(eq.poles.a_value()).pow(eq.chars.m[3]);
    for (k, &nk) in eq.chars.n.iter().enumerate() {
        out = &out * &ZPoly::linear(&eq.config.b[k]).pow(2 * nk);
    }
    out
}

/// A polynomial depending affinely on solver parameters.
#[derive(Clone)]
struct AffinePoly {
    base: ZPoly,
    dirs: Vec<ZPoly>,
}

impl AffinePoly {
    fn dir(&self, i: usize, ctx: &ScalarCtx) -> ZPoly {
        self.dirs.get(i).cloned().unwrap_or_else(|| ZPoly::zero(ctx))
    }
}

/// One global linear constraint on the solver parameters.
struct ParamConstraint {
    constant: ParamScalar,
    coeffs: Vec<ParamScalar>,
}

/// Solve for `Psi` by searching the genus from the lower bound upward,
/// solving stratum by stratum in `lambda`, and verifying the result against
/// the full equation.
pub fn solve_psi(eq: &FuchsianEquation, ode: &ProductOde) -> Result<PsiPolynomial> {
    let (lower, upper) = genus_bounds(&eq.chars);
    let g_max = (upper.max(lower as i64)) as usize;
    let mut last_err: Option<Error> = None;
    for g in (lower as usize)..=g_max {
        match try_genus(eq, ode, g) {
            Ok(psi) => {
                let check = verify_psi(eq, ode, &psi)?;
                if !check.is_zero() {
                    return Err(Error::InternalInconsistency(format!(
                        "solved Psi fails the product equation, residual {check}"
                    )));
                }
                return Ok(psi);
            }
            Err(Error::NotFiniteGap { .. }) => continue,
            Err(e @ Error::NonUniqueSolution { .. }) => {
                last_err = Some(e);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or(Error::NotFiniteGap {
        upper_bound: g_max,
    }))
}

fn try_genus(eq: &FuchsianEquation, ode: &ProductOde, g: usize) -> Result<PsiPolynomial> {
    let ctx = eq.ctx().clone();
    let n_deg = eq.big_n() as usize;
    let a0 = leading_coefficient(eq);

    // Top stratum identity: C1_1 a0' + C0_1 a0 = 0.
    let top = &(&ode.c1_1 * &a0.derivative()) + &(&ode.c0_1 * &a0);
    if !top.is_zero() {
        return Err(Error::InternalInconsistency(
            "leading coefficient does not satisfy the top stratum".into(),
        ));
    }

    let rhs_op = |f: &ZPoly| -> ZPoly {
        let t = &(&ode.c3 * &f.derivative().derivative().derivative())
            + &(&ode.c2 * &f.derivative().derivative());
        let t = &t + &(&ode.c1_0 * &f.derivative());
        &t + &(&ode.c0_0 * f)
    };
    let lhs_op = |f: &ZPoly| -> ZPoly {
        &(&ode.c1_1 * &f.derivative()) + &(&ode.c0_1 * f)
    };

    let rows = {
        let lhs_deg = ode.c1_1.degree().unwrap_or(0) + n_deg + ode.c0_1.degree().unwrap_or(0);
        let rhs_deg = ode.c3.degree().unwrap_or(0) + n_deg;
        lhs_deg.max(rhs_deg) + 2
    };

    // A: (rows) x (n_deg + 1) matrix of the lhs operator on z-coefficients.
    let mut a_mat = ExactMatrix::new(rows, n_deg + 1, ctx.clone());
    for i in 0..=n_deg {
        let img = lhs_op(&ZPoly::gen(&ctx).pow(i as u32));
        for r in 0..rows {
            a_mat.set(r, i, img.coeff(r));
        }
    }

    let mut params = 0usize;
    let mut constraints: Vec<ParamConstraint> = Vec::new();
    let mut tilde: Vec<AffinePoly> = vec![AffinePoly {
        base: a0.clone(),
        dirs: Vec::new(),
    }];

    for _j in 1..=g {
        let prev = tilde.last().unwrap();
        let rhs_base = -&rhs_op(&prev.base);
        let rhs0: Vec<ParamScalar> = (0..rows).map(|r| rhs_base.coeff(r)).collect();
        let mut rhs_dirs = Vec::with_capacity(params);
        for i in 0..params {
            let d = -&rhs_op(&prev.dir(i, &ctx));
            rhs_dirs.push((0..rows).map(|r| d.coeff(r)).collect::<Vec<_>>());
        }
        let sol = crate::algebra::solve_affine(&a_mat, &rhs0, &rhs_dirs)?;
        for c in &sol.constraints {
            let mut coeffs = c.coeffs.clone();
            coeffs.resize(params, ctx.zero());
            constraints.push(ParamConstraint {
                constant: c.constant.clone(),
                coeffs,
            });
        }
        if sol.kernel.len() != 1 {
            return Err(Error::InternalInconsistency(format!(
                "stratum kernel has dimension {}, expected 1",
                sol.kernel.len()
            )));
        }
        let mut dirs: Vec<ZPoly> = sol
            .directions
            .iter()
            .map(|d| ZPoly::from_coeffs(&ctx, d.clone()))
            .collect();
        dirs.push(ZPoly::from_coeffs(&ctx, sol.kernel[0].clone()));
        params += 1;
        tilde.push(AffinePoly {
            base: ZPoly::from_coeffs(&ctx, sol.particular),
            dirs,
        });
    }

    // Closure: the lambda^0 stratum must vanish identically.
    {
        let last = tilde.last().unwrap();
        let base = rhs_op(&last.base);
        let dir_polys: Vec<ZPoly> = (0..params).map(|i| rhs_op(&last.dir(i, &ctx))).collect();
        let max_deg = std::iter::once(base.degree())
            .chain(dir_polys.iter().map(ZPoly::degree))
            .flatten()
            .max();
        if let Some(md) = max_deg {
            for r in 0..=md {
                let constant = base.coeff(r);
                let coeffs: Vec<ParamScalar> =
                    dir_polys.iter().map(|d| d.coeff(r)).collect();
                if constant.is_zero() && coeffs.iter().all(ParamScalar::is_zero) {
                    continue;
                }
                constraints.push(ParamConstraint { constant, coeffs });
            }
        }
    }

    // Solve the accumulated constraints for the parameters.
    let t_values: Vec<ParamScalar> = if params == 0 {
        if constraints.iter().any(|c| !c.constant.is_zero()) {
            return Err(Error::NotFiniteGap { upper_bound: g });
        }
        Vec::new()
    } else {
        let rows_c = constraints.len().max(1);
        let mut c_mat = ExactMatrix::new(rows_c, params, ctx.clone());
        let mut rhs = vec![ctx.zero(); rows_c];
        for (r, c) in constraints.iter().enumerate() {
            for (i, v) in c.coeffs.iter().enumerate() {
                c_mat.set(r, i, v.clone());
            }
            rhs[r] = -&c.constant;
        }
        let sol = crate::algebra::solve_affine(&c_mat, &rhs, &[])?;
        if sol.constraints.iter().any(|c| !c.constant.is_zero()) {
            return Err(Error::NotFiniteGap { upper_bound: g });
        }
        if !sol.kernel.is_empty() {
            return Err(Error::NonUniqueSolution {
                dimension: sol.kernel.len(),
            });
        }
        sol.particular
    };

    let tilde_a: Vec<ZPoly> = tilde
        .iter()
        .map(|ap| {
            let mut out = ap.base.clone();
            for (i, t) in t_values.iter().enumerate() {
                out = &out + &ap.dir(i, &ctx).scale(t);
            }
            out
        })
        .collect();
    for p in &tilde_a {
        if p.degree().map_or(0, |d| d) > n_deg {
            return Err(Error::InternalInconsistency(
                "stratum exceeds the z-degree bound".into(),
            ));
        }
    }
    Ok(PsiPolynomial {
        tilde_a,
        genus: g,
        z_degree: eq.big_n(),
    })
}

/// Authoritative route: one exact linear system over all monomials at a given
/// genus, no stratification.
pub fn solve_psi_full(eq: &FuchsianEquation, ode: &ProductOde, g: usize) -> Result<PsiPolynomial> {
    let ctx = eq.ctx().clone();
    let n_deg = eq.big_n() as usize;
    let a0 = leading_coefficient(eq);
    let cols = g * (n_deg + 1);

    let contribution = |j: usize, f: &ZPoly| -> LzPoly {
        // lambda^(g-j) * (C3 f''' + C2 f'' + C1_0 f' + C0_0 f)
        //   + lambda^(g-j+1) * (C1_1 f' + C0_1 f)
        let low = {
            let t = &(&ode.c3 * &f.derivative().derivative().derivative())
                + &(&ode.c2 * &f.derivative().derivative());
            let t = &t + &(&ode.c1_0 * &f.derivative());
            &t + &(&ode.c0_0 * f)
        };
        let high = &(&ode.c1_1 * &f.derivative()) + &(&ode.c0_1 * f);
        let mut strata = vec![ZPoly::zero(&ctx); g - j + 2];
        strata[g - j] = low;
        strata[g - j + 1] = &strata[g - j + 1] + &high;
        LzPoly::from_strata(&ctx, strata)
    };

    let rhs_lz = contribution(0, &a0);
    let z_rows = ode.c3.degree().unwrap_or(0) + n_deg + 2;
    let l_rows = g + 2;

    let mut rows_data: Vec<Vec<ParamScalar>> = Vec::new();
    let mut rhs: Vec<ParamScalar> = Vec::new();
    let mut col_images: Vec<LzPoly> = Vec::with_capacity(cols);
    for j in 1..=g {
        for i in 0..=n_deg {
            col_images.push(contribution(j, &ZPoly::gen(&ctx).pow(i as u32)));
        }
    }
    for lp in 0..l_rows {
        for zp in 0..z_rows {
            let mut row = Vec::with_capacity(cols);
            let mut any = false;
            for img in &col_images {
                let v = img.stratum(lp).coeff(zp);
                if !v.is_zero() {
                    any = true;
                }
                row.push(v);
            }
            let r = -&rhs_lz.stratum(lp).coeff(zp);
            if any || !r.is_zero() {
                rows_data.push(row);
                rhs.push(r);
            }
        }
    }
    let a_mat = ExactMatrix::from_rows(rows_data, ctx.clone());
    let sol = crate::algebra::solve_affine(&a_mat, &rhs, &[])?;
    if sol.constraints.iter().any(|c| !c.constant.is_zero()) {
        return Err(Error::NotFiniteGap { upper_bound: g });
    }
    if !sol.kernel.is_empty() {
        return Err(Error::NonUniqueSolution {
            dimension: sol.kernel.len(),
        });
    }
    let mut tilde_a = vec![a0];
    for j in 1..=g {
        let coeffs = sol.particular[(j - 1) * (n_deg + 1)..j * (n_deg + 1)].to_vec();
        tilde_a.push(ZPoly::from_coeffs(&ctx, coeffs));
    }
    Ok(PsiPolynomial {
        tilde_a,
        genus: g,
        z_degree: eq.big_n(),
    })
}

/// Substitute `psi` into the product equation; the result is identically zero
/// exactly when `psi` solves it.
pub fn verify_psi(eq: &FuchsianEquation, ode: &ProductOde, psi: &PsiPolynomial) -> Result<LzPoly> {
    let ctx = eq.ctx().clone();
    let p = psi.to_lz(&ctx);
    let dp = p.d_dz();
    let ddp = dp.d_dz();
    let dddp = ddp.d_dz();
    let mut e = dddp.mul_z(&ode.c3);
    e = &e + &ddp.mul_z(&ode.c2);
    e = &e + &dp.mul_z(&ode.c1_0);
    e = &e + &dp.mul_z(&ode.c1_1).mul_lambda();
    e = &e + &p.mul_z(&ode.c0_0);
    e = &e + &p.mul_z(&ode.c0_1).mul_lambda();
    Ok(e)
}

/// The hyperelliptic curve `nu^2(lambda)`: monic of degree `2g + 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct SpectralCurve {
    /// ascending powers of lambda; length `2g + 2`.
    pub nu_sq: Vec<ParamScalar>,
    pub genus: usize,
}

impl SpectralCurve {
    pub fn degree(&self) -> usize {
        self.nu_sq.len() - 1
    }

    pub fn eval_c64(
        &self,
        a: num_complex::Complex64,
        b: num_complex::Complex64,
        lambda: num_complex::Complex64,
    ) -> num_complex::Complex64 {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for c in self.nu_sq.iter().rev() {
            acc = acc * lambda + c.eval_c64(a, b);
        }
        acc
    }
}

impl std::fmt::Display for SpectralCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (k, c) in self.nu_sq.iter().enumerate().rev() {
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
                write!(f, "({c})*l^{k}")?;
            }
        }
        Ok(())
    }
}

/// Extract `nu^2` from a solved `Psi`, asserting exact divisibility,
/// z-independence, monicity and degree `2g + 1`.
pub fn spectral_curve(eq: &FuchsianEquation, psi: &PsiPolynomial) -> Result<SpectralCurve> {
    let ctx = eq.ctx().clone();
    let a = eq.poles.a_value().clone();
    let e3 = &(&ZPoly::gen(&ctx) * &ZPoly::linear(&ctx.one())) * &ZPoly::linear(&a);
    let mut big_pi = ZPoly::one(&ctx);
    for (k, &nk) in eq.chars.n.iter().enumerate() {
        if nk > 0 {
            big_pi = &big_pi * &ZPoly::linear(&eq.config.b[k]);
        }
    }
    let u = &e3 * &big_pi;
    let (p_num, _) = eq.p.to_fraction();
    let (num0, q_dens) = eq.q0.to_fraction();
    let num0 = {
        let mut den = ZPoly::one(&ctx);
        for (pt, e) in &q_dens {
            den = &den * &ZPoly::linear(&eq.poles.location(*pt)).pow(*e as u32);
        }
        &num0 * &u.exact_div(&den)?
    };

    let p_lz = psi.to_lz(&ctx);
    let dp = p_lz.d_dz();
    let ddp = dp.d_dz();
    // T = U (2 Psi Psi'' - Psi'^2) + 2 p_num Psi Psi'
    //     + Psi^2 (4 num0 + lambda BigPi)
    let two_p_ddp = (&p_lz * &ddp).mul_z(&ZPoly::constant(ctx.int(2)));
    let dp_sq = &dp * &dp;
    let mut t = (&two_p_ddp - &dp_sq).mul_z(&u);
    t = &t + &(&p_lz * &dp).mul_z(&p_num.scale(&ctx.int(2)));
    let psi_sq = &p_lz * &p_lz;
    t = &t + &psi_sq.mul_z(&num0.scale(&ctx.int(4)));
    t = &t + &psi_sq.mul_z(&big_pi).mul_lambda();

    // divisor G = z^(2m1) (z-1)^(2m2) (z-a)^(2m3) prod (z-b)^(4n+1 | n>0)
    let mut g_div = ZPoly::gen(&ctx).pow(2 * eq.chars.m[1]);
    g_div = &g_div * &ZPoly::linear(&ctx.one()).pow(2 * eq.chars.m[2]);
    g_div = &g_div * &ZPoly::linear(&a).pow(2 * eq.chars.m[3]);
    for (k, &nk) in eq.chars.n.iter().enumerate() {
        if nk > 0 {
            g_div = &g_div * &ZPoly::linear(&eq.config.b[k]).pow(4 * nk + 1);
        }
    }

    let mut nu_sq = Vec::new();
    for p in 0..=t.lambda_degree().unwrap_or(0) {
        let stratum = t.stratum(p);
        if stratum.is_zero() {
            nu_sq.push(ctx.zero());
            continue;
        }
        let q = stratum.exact_div(&g_div).map_err(|_| {
            Error::InternalInconsistency(
                "curve numerator is not divisible by the pole divisor".into(),
            )
        })?;
        if q.degree() > Some(0) {
            return Err(Error::InternalInconsistency(
                "curve coefficient depends on z".into(),
            ));
        }
        nu_sq.push(q.coeff(0));
    }
    while nu_sq.last().is_some_and(ParamScalar::is_zero) {
        nu_sq.pop();
    }
    let expected_deg = 2 * psi.genus + 1;
    if nu_sq.len() != expected_deg + 1 {
        return Err(Error::InternalInconsistency(format!(
            "curve degree {} but genus {} expects {expected_deg}",
            nu_sq.len().saturating_sub(1),
            psi.genus
        )));
    }
    if !nu_sq.last().unwrap().is_one() {
        return Err(Error::InternalInconsistency(
            "curve is not monic".into(),
        ));
    }
    Ok(SpectralCurve {
        nu_sq,
        genus: psi.genus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{BPoly, BranchTag, ConditionPolynomial, QaRat};
    use crate::fuchsian::{build_equation, Characteristics, SingularConfig};

    fn generic_eq(m: [u32; 4], n: Vec<u32>) -> FuchsianEquation {
        let ctx = ScalarCtx::generic();
        let config = SingularConfig {
            a: ctx.sym_a(),
            b: vec![ctx.sym_b(); n.len()],
        };
        build_equation(&Characteristics::new(m, n), &config).unwrap()
    }

    fn branch_eq(m: [u32; 4], n: Vec<u32>, factor: BPoly) -> FuchsianEquation {
        let p = ConditionPolynomial::new(factor, BranchTag::SexticFactor).unwrap();
        let ctx = crate::false_point::branch_ctx(&p);
        let config = SingularConfig {
            a: ctx.sym_a(),
            b: vec![ctx.sym_b(); n.len()],
        };
        build_equation(&Characteristics::new(m, n), &config).unwrap()
    }

    fn b2_minus_a() -> BPoly {
        &BPoly::gen().pow(2) - &BPoly::constant(QaRat::gen())
    }

    #[test]
    fn trivial_case_psi_is_one() {
        let eq = generic_eq([0, 0, 0, 0], vec![]);
        let ode = build_product_ode(&eq).unwrap();
        // 2Q' + 4PQ clears identically for m = 0, M = 0
        assert!(ode.c0_0.is_zero());
        assert!(ode.c0_1.is_zero());
        let psi = solve_psi(&eq, &ode).unwrap();
        assert_eq!(psi.genus, 0);
        assert_eq!(psi.tilde_a.len(), 1);
        assert!(psi.tilde_a[0].degree() == Some(0));
        let curve = spectral_curve(&eq, &psi).unwrap();
        // nu^2 = lambda
        assert_eq!(curve.degree(), 1);
        assert!(curve.nu_sq[0].is_zero());
        assert!(curve.nu_sq[1].is_one());
    }

    #[test]
    fn golden_0000_branch_b2_a() {
        let eq = branch_eq([0, 0, 0, 0], vec![1], b2_minus_a());
        let ctx = eq.ctx().clone();
        let ode = build_product_ode(&eq).unwrap();
        let psi = solve_psi(&eq, &ode).unwrap();
        assert_eq!(psi.genus, 1);

        // Psi = (z-b)^2 l + (3+3a-4b) z^2 - 2(5b+5ab-8a) z + a(3+3a-4b)
        let a = ctx.sym_a();
        let b = ctx.sym_b();
        let lead = ZPoly::linear(&b).pow(2);
        assert_eq!(psi.tilde_a[0], lead);
        let c2 = &(&ctx.int(3) + &(&ctx.int(3) * &a)) - &(&ctx.int(4) * &b);
        let c1 = &ctx.int(-2)
            * &(&(&(&ctx.int(5) * &b) + &(&(&ctx.int(5) * &a) * &b)) - &(&ctx.int(8) * &a));
        let c0 = &a * &c2;
        let expect = ZPoly::from_coeffs(&ctx, vec![c0, c1, c2]);
        assert_eq!(psi.tilde_a[1], expect, "got {}", psi.tilde_a[1]);

        // nu^2 = (l - 4b + 3a + 3)(l^2 + 7(1+a-2b) l + 2(6a^2+36a+6-25ab-25b))
        let curve = spectral_curve(&eq, &psi).unwrap();
        assert_eq!(curve.degree(), 3);
        let lin = vec![
            &(&(&ctx.int(3) * &a) + &ctx.int(3)) - &(&ctx.int(4) * &b),
            ctx.one(),
        ];
        let quad_c0 = {
            // 2(6a^2 + 36a + 6 - 25ab - 25b)
            let inner = &(&(&(&ctx.int(6) * &(&a * &a)) + &(&ctx.int(36) * &a)) + &ctx.int(6))
                - &(&(&(&ctx.int(25) * &a) * &b) + &(&ctx.int(25) * &b));
            &ctx.int(2) * &inner
        };
        let quad = vec![
            quad_c0,
            &ctx.int(7) * &(&(&ctx.one() + &a) - &(&ctx.int(2) * &b)),
            ctx.one(),
        ];
        // expand product
        let mut prod = vec![ctx.zero(); 4];
        for (i, x) in lin.iter().enumerate() {
            for (j, y) in quad.iter().enumerate() {
                prod[i + j] = &prod[i + j] + &(x * y);
            }
        }
        assert_eq!(curve.nu_sq, prod, "curve {curve}");
    }

    #[test]
    fn full_system_agrees_with_stratified() {
        let eq = branch_eq([0, 0, 0, 0], vec![1], b2_minus_a());
        let ode = build_product_ode(&eq).unwrap();
        let psi = solve_psi(&eq, &ode).unwrap();
        let full = solve_psi_full(&eq, &ode, psi.genus).unwrap();
        assert_eq!(psi.tilde_a, full.tilde_a);
    }

    #[test]
    fn verify_detects_perturbation() {
        let eq = branch_eq([0, 0, 0, 0], vec![1], b2_minus_a());
        let ctx = eq.ctx().clone();
        let ode = build_product_ode(&eq).unwrap();
        let mut psi = solve_psi(&eq, &ode).unwrap();
        assert!(verify_psi(&eq, &ode, &psi).unwrap().is_zero());
        // perturb by (z - b)
        let last = psi.tilde_a.len() - 1;
        psi.tilde_a[last] = &psi.tilde_a[last] + &ZPoly::linear(&ctx.sym_b());
        assert!(!verify_psi(&eq, &ode, &psi).unwrap().is_zero());
    }

    #[test]
    fn not_finite_gap_off_branch() {
        // rational b not on any branch for m = 0, a = 5
        let ctx = ScalarCtx::generic();
        let config = SingularConfig {
            a: ctx.int(5),
            b: vec![ctx.int(3)],
        };
        let eq = build_equation(&Characteristics::new([0, 0, 0, 0], vec![1]), &config).unwrap();
        let ode = build_product_ode(&eq).unwrap();
        match solve_psi(&eq, &ode) {
            Err(Error::NotFiniteGap { .. }) => {}
            other => panic!("expected NotFiniteGap, got {other:?}"),
        }
    }
}
