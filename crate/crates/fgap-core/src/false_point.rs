//! Locating positions `b` that make `z = b` a false (apparent) singular
//! point: the explicit sextic condition for `n_1 = 1`, and a Frobenius
//! no-logarithm obstruction that works for any `n_k` and serves as the
//! independent oracle.

use std::sync::Arc;

use crate::algebra::{
    rat, BPoly, BranchTag, ConditionPolynomial, ParamScalar, QaPoly, QaRat, Rat, ScalarCtx,
};
use crate::error::{Error, Result};
use crate::factor::{factor_bivariate, squarefree_decomposition};
use crate::fuchsian::FuchsianEquation;
use crate::ratz::PolePoint;

/// The degree-six condition on `b` for `M = 1`, `n_1 = 1`.
#[derive(Clone, Debug)]
pub struct SexticCondition {
    /// `k_j^2 = (m_j + 1/2)^2`.
    pub k_sq: [Rat; 4],
    pub h2: QaPoly,
    pub h3: QaPoly,
    pub h4: QaPoly,
    pub poly: ConditionPolynomial,
}

/// Build the sextic from characteristics.  The quadratic residues
/// `k_j^2 = (m_j + 1/2)^2` make the coefficients invariant under
/// `m_j -> -m_j - 1`.
pub fn sextic_condition(m: [u32; 4]) -> Result<SexticCondition> {
    let k_sq: [Rat; 4] = std::array::from_fn(|j| {
        let half = rat(2 * m[j] as i64 + 1, 2);
        &half * &half
    });
    let (k0, k1, k2, k3) = (&k_sq[0], &k_sq[1], &k_sq[2], &k_sq[3]);
    let h4 = QaPoly::from_coeffs(vec![k0 - k2, rat(4, 1) * k0 + k2 + k3 - k1, k0 - k3]);
    let h3 = QaPoly::from_coeffs(vec![k1 + k2 - k0 - k3, k1 + k3 - k0 - k2]);
    let h2 = QaPoly::from_coeffs(vec![k3 - k1, k0 - rat(4, 1) * k1 - k2 - k3, k2 - k1]);
    let a = QaPoly::gen();
    let a_plus_1 = &a + &QaPoly::one();
    let a2 = &a * &a;
    let a3 = &a2 * &a;
    // k0^2 b^6 - 2 k0^2 (a+1) b^5 + h4 b^4 + 2 a h3 b^3 + a h2 b^2
    //   + 2 k1^2 a^2 (a+1) b - k1^2 a^3
    let coeffs: Vec<QaRat> = vec![
        QaRat::from_poly(a3.scale(&-k1.clone())),
        QaRat::from_poly((&a2 * &a_plus_1).scale(&(rat(2, 1) * k1))),
        QaRat::from_poly(&a * &h2),
        QaRat::from_poly((&a * &h3).scale(&rat(2, 1))),
        QaRat::from_poly(h4.clone()),
        QaRat::from_poly(a_plus_1.scale(&(rat(-2, 1) * k0))),
        QaRat::rational(k0.clone()),
    ];
    let poly = ConditionPolynomial::new(BPoly::from_coeffs(coeffs), BranchTag::SexticFactor)?;
    Ok(SexticCondition {
        k_sq,
        h2,
        h3,
        h4,
        poly,
    })
}

/// The sextic with a rational value substituted for `a`, as a `Q[b]`
/// coefficient list.
pub fn sextic_at_rational_a(sextic: &SexticCondition, a: &Rat) -> Result<Vec<Rat>> {
    sextic
        .poly
        .poly()
        .specialize_a(a)
        .ok_or_else(|| Error::DegenerateConfiguration("a hits a coefficient pole".into()))
}

/// The obstruction to a log-free Frobenius series through the resonance.
#[derive(Clone, Debug)]
pub struct Obstruction {
    /// Vanishes exactly when the exponent-0 solution extends through the
    /// resonance with no logarithm.
    pub value: ParamScalar,
    /// The resonance index `2 n_k + 1`.
    pub order: u32,
}

/// Run the Frobenius recursion for the exponent-0 solution at `z = b_k` up to
/// the resonance `2 n_k + 1` and return the obstruction coefficient.
pub fn frobenius_obstruction(eq: &FuchsianEquation, k: usize) -> Result<Obstruction> {
    if k >= eq.chars.n.len() {
        return Err(Error::NonsingularPoint(format!("b{}", k + 1)));
    }
    let ctx = eq.ctx().clone();
    let nk = eq.chars.n[k];
    let s = 2 * nk as usize + 1;
    if nk == 0 {
        // exponents (1, 0): no simple pole of P, no resonance gap to
        // obstruct; degenerate rather than false.
        return Ok(Obstruction {
            value: ctx.zero(),
            order: 1,
        });
    }
    let pt = PolePoint::B(k);

    // Local data: P and Q have at most simple poles at b_k.
    let (p_neg, p_reg) = eq.p.laurent_at(pt, s)?;
    let (q0_neg, q0_reg) = eq.q0.laurent_at(pt, s)?;
    if p_neg.len() > 1 || q0_neg.len() > 1 {
        return Err(Error::InternalInconsistency(
            "unexpected pole order in local equation data".into(),
        ));
    }
    let p_m1 = p_neg.first().cloned().unwrap_or_else(|| ctx.zero());
    let q_m1 = q0_neg.first().cloned().unwrap_or_else(|| ctx.zero());
    // The recursion runs at lambda = 0; the lambda part of Q is regular at
    // b_k and shifts only the regular q-coefficients.
    let (q1_neg, _q1_reg) = eq.q1.laurent_at(pt, s)?;
    if !q1_neg.is_empty() {
        return Err(Error::InternalInconsistency(
            "lambda part of Q has a pole at a false-point candidate".into(),
        ));
    }

    // y = sum u_j t^j, u_0 = 1; at order t^(step-2):
    //   u_step * step(step - 1 + p_{-1})
    //     + sum_{j<step} [ j p_{step-1-j} + q_{step-2-j} ] u_j
    //     + q_{-1} u_{step-1} = 0
    let mut u = vec![ctx.one()];
    for step in 1..=s {
        let mut acc = ctx.zero();
        for (j, uj) in u.iter().enumerate() {
            if uj.is_zero() {
                continue;
            }
            if j >= 1 {
                let idx = step - 1 - j;
                if let Some(c) = p_reg.get(idx) {
                    if !c.is_zero() {
                        acc = &acc + &(&(c * uj) * &ctx.int(j as i64));
                    }
                }
            }
            if step >= 2 && j <= step - 2 {
                let idx = step - 2 - j;
                if let Some(c) = q0_reg.get(idx) {
                    if !c.is_zero() {
                        acc = &acc + &(c * uj);
                    }
                }
            }
        }
        if !q_m1.is_zero() {
            acc = &acc + &(&q_m1 * &u[step - 1]);
        }
        let indicial = {
            let st = ctx.int(step as i64);
            &(&st * &(&st - &ctx.one())) + &(&p_m1 * &st)
        };
        if step == s {
            if !indicial.is_zero() {
                return Err(Error::InternalInconsistency(
                    "resonance index does not annihilate the indicial factor".into(),
                ));
            }
            return Ok(Obstruction {
                value: acc,
                order: s as u32,
            });
        }
        let next = (-&acc).try_div(&indicial)?;
        u.push(next);
    }
    unreachable!("loop returns at the resonance")
}

/// One branch of candidate false points.
#[derive(Clone, Debug)]
pub struct Branch {
    pub factor: ConditionPolynomial,
    /// Numeric roots (only for rational `a`): exact rational roots first,
    /// then floating approximations of the rest.
    pub numeric_roots: Vec<NumericRoot>,
}

#[derive(Clone, Debug)]
pub enum NumericRoot {
    Rational(Rat),
    Approximate(num_complex::Complex64),
}

/// Enumerate the branches of the sextic: square-free split, then full
/// factorization over `Q(a)`; with rational `a` also the six numeric roots.
pub fn enumerate_candidates(m: [u32; 4], a: Option<&Rat>) -> Result<Vec<Branch>> {
    let sextic = sextic_condition(m)?;
    let mut branch_polys: Vec<BPoly> = Vec::new();
    match a {
        None => {
            for (part, _mult) in squarefree_decomposition(sextic.poly.poly()) {
                for irr in factor_bivariate(&part) {
                    branch_polys.push(irr);
                }
            }
        }
        Some(a_val) => {
            let spec = sextic_at_rational_a(&sextic, a_val)?;
            for (ipoly, _mult) in crate::factor::factor_rational(&spec) {
                let coeffs: Vec<QaRat> = ipoly
                    .iter()
                    .map(|c| QaRat::rational(Rat::from(c.clone())))
                    .collect();
                branch_polys.push(BPoly::from_coeffs(coeffs).primitive_normalized());
            }
        }
    }
    branch_polys.sort_by_key(|p| (p.degree(), format!("{p}")));

    let mut out = Vec::new();
    for poly in branch_polys {
        let numeric_roots = match a {
            None => Vec::new(),
            Some(_) => numeric_roots_rational_coeffs(&poly)?,
        };
        out.push(Branch {
            factor: ConditionPolynomial::new(poly, BranchTag::SexticFactor)?,
            numeric_roots,
        });
    }
    Ok(out)
}

/// Roots of a rational-coefficient branch polynomial: exact rationals from
/// linear factors, the rest numerically.
fn numeric_roots_rational_coeffs(poly: &BPoly) -> Result<Vec<NumericRoot>> {
    let coeffs: Vec<Rat> = poly
        .coeffs()
        .iter()
        .map(|c| {
            c.as_rational().ok_or_else(|| {
                Error::InternalInconsistency("expected rational coefficients".into())
            })
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    if coeffs.len() == 2 {
        out.push(NumericRoot::Rational(-(&coeffs[0] / &coeffs[1])));
        return Ok(out);
    }
    let c64: Vec<num_complex::Complex64> = coeffs
        .iter()
        .map(|c| {
            num_complex::Complex64::new(
                num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN),
                0.0,
            )
        })
        .collect();
    for r in crate::numeric::poly_roots(&c64) {
        out.push(NumericRoot::Approximate(r));
    }
    Ok(out)
}

/// Check the generic-b obstruction is a `Q(a)`-multiple of the sextic and
/// return the proportionality factor.
pub fn obstruction_sextic_ratio(eq: &FuchsianEquation, sextic: &SexticCondition) -> Result<QaRat> {
    let obst = frobenius_obstruction(eq, 0)?;
    let num = obst.value.num().clone();
    let (q, r) = num.div_rem(sextic.poly.poly());
    if !r.is_zero() {
        return Err(Error::InternalInconsistency(
            "obstruction is not a multiple of the sextic".into(),
        ));
    }
    q.as_constant().ok_or_else(|| {
        Error::InternalInconsistency("obstruction/sextic ratio depends on b".into())
    })
}

/// The scalar context for downstream computations on a given factor.
pub fn branch_ctx(factor: &ConditionPolynomial) -> ScalarCtx {
    ScalarCtx::on_branch(Arc::new(factor.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::{build_equation, Characteristics, SingularConfig};

    fn b() -> BPoly {
        BPoly::gen()
    }

    fn a() -> QaRat {
        QaRat::gen()
    }

    fn qa_int(v: i64) -> QaRat {
        QaRat::int(v)
    }

    /// 4*sextic in primitive form, for direct display comparisons.
    fn four_sextic(m: [u32; 4]) -> BPoly {
        sextic_condition(m).unwrap().poly.poly().primitive_normalized()
    }

    #[test]
    fn sextic_0000_matches_display_and_factorization() {
        // 4*poly = b^6 - 2(a+1) b^5 + 5a b^4 - 5a^2 b^2 + 2a^2(a+1) b - a^3
        let got = four_sextic([0, 0, 0, 0]);
        let a1 = &a() + &QaRat::one();
        let a2 = &a() * &a();
        let expect = BPoly::from_coeffs(vec![
            -&(&a2 * &a()),
            &(&qa_int(2) * &a2) * &a1,
            QaRat::zero(),
            &qa_int(-5) * &a2,
            &qa_int(5) * &a(),
            &qa_int(-2) * &a1,
            QaRat::one(),
        ]);
        assert_eq!(got, expect);

        // (b^2 - a)(b^2 - 2b + a)(b^2 - 2ab + a)
        let p1 = &b().pow(2) - &BPoly::constant(a());
        let p2 = BPoly::from_coeffs(vec![a(), qa_int(-2), QaRat::one()]);
        let p3 = BPoly::from_coeffs(vec![a(), &qa_int(-2) * &a(), QaRat::one()]);
        let prod = &(&p1 * &p2) * &p3;
        assert_eq!(got, prod.primitive_normalized());
    }

    #[test]
    fn sextic_1000_matches_appendix_product() {
        // (3b^2 - 2(a+1)b + a)(3b^4 - 4(a+1)b^3 + 6ab^2 - a^2)
        let a1 = &a() + &QaRat::one();
        let p1 = BPoly::from_coeffs(vec![a(), &qa_int(-2) * &a1, qa_int(3)]);
        let p2 = BPoly::from_coeffs(vec![
            -&(&a() * &a()),
            QaRat::zero(),
            &qa_int(6) * &a(),
            &qa_int(-4) * &a1,
            qa_int(3),
        ]);
        let prod = (&p1 * &p2).primitive_normalized();
        assert_eq!(four_sextic([1, 0, 0, 0]), prod);
    }

    #[test]
    fn sextic_2000_matches_display() {
        // 25b^6 - 50(a+1)b^5 + (24a^2+101a+24)b^4 - 48a(a+1)b^3
        //   + 19a^2 b^2 + 2a^2(a+1) b - a^3
        let a1 = &a() + &QaRat::one();
        let a2 = &a() * &a();
        let expect = BPoly::from_coeffs(vec![
            -&(&a2 * &a()),
            &(&qa_int(2) * &a2) * &a1,
            &qa_int(19) * &a2,
            &(&qa_int(-48) * &a()) * &a1,
            QaRat::from_poly(QaPoly::from_coeffs(vec![
                rat(24, 1),
                rat(101, 1),
                rat(24, 1),
            ])),
            &qa_int(-50) * &a1,
            qa_int(25),
        ]);
        assert_eq!(four_sextic([2, 0, 0, 0]), expect);
    }

    #[test]
    fn k_sq_symmetry_under_reflection() {
        for m in 0..4i64 {
            let plus = rat(2 * m + 1, 2);
            let refl = rat(2 * (-m - 1) + 1, 2);
            assert_eq!(&plus * &plus, &refl * &refl);
        }
        let s = sextic_condition([3, 1, 0, 2]).unwrap();
        assert_eq!(s.poly.degree(), 6);
        assert!(s.k_sq[0] > rat(0, 1));
    }

    #[test]
    fn candidates_1100() {
        let branches = enumerate_candidates([1, 1, 0, 0], None).unwrap();
        let display: Vec<String> = branches.iter().map(|br| format!("{}", br.factor)).collect();
        assert_eq!(branches.len(), 3, "branches: {display:?}");
        let p1 = &b().pow(2) - &BPoly::constant(a());
        // 3b^2 - 2(a+2)b + 3a
        let p2 = BPoly::from_coeffs(vec![
            &qa_int(3) * &a(),
            &qa_int(-2) * &(&a() + &qa_int(2)),
            qa_int(3),
        ]);
        // 3b^2 - 2(2a+1)b + 3a
        let p3 = BPoly::from_coeffs(vec![
            &qa_int(3) * &a(),
            &qa_int(-2) * &(&(&qa_int(2) * &a()) + &QaRat::one()),
            qa_int(3),
        ]);
        for expect in [p1, p2, p3] {
            assert!(
                branches.iter().any(|br| br.factor.poly() == &expect),
                "missing branch {expect}"
            );
        }
    }

    #[test]
    fn candidates_numeric_a4() {
        let branches = enumerate_candidates([0, 0, 0, 0], Some(&rat(4, 1))).unwrap();
        let mut rationals: Vec<Rat> = branches
            .iter()
            .flat_map(|br| br.numeric_roots.iter())
            .filter_map(|r| match r {
                NumericRoot::Rational(q) => Some(q.clone()),
                _ => None,
            })
            .collect();
        rationals.sort();
        assert_eq!(rationals, vec![rat(-2, 1), rat(2, 1)]);
        let total: usize = branches.iter().map(|br| br.numeric_roots.len()).sum();
        assert_eq!(total, 6);
    }

    #[test]
    fn obstruction_vanishes_on_branch() {
        // m = 0, n1 = 1, branch b^2 - a
        let p = ConditionPolynomial::new(
            &b().pow(2) - &BPoly::constant(a()),
            BranchTag::SexticFactor,
        )
        .unwrap();
        let ctx = branch_ctx(&p);
        let config = SingularConfig {
            a: ctx.sym_a(),
            b: vec![ctx.sym_b()],
        };
        let eq = build_equation(&Characteristics::new([0, 0, 0, 0], vec![1]), &config).unwrap();
        let obst = frobenius_obstruction(&eq, 0).unwrap();
        assert_eq!(obst.order, 3);
        assert!(obst.value.is_zero(), "obstruction = {}", obst.value);
    }

    #[test]
    fn obstruction_generic_is_sextic_multiple() {
        let ctx = ScalarCtx::generic();
        let config = SingularConfig {
            a: ctx.sym_a(),
            b: vec![ctx.sym_b()],
        };
        let eq = build_equation(&Characteristics::new([0, 0, 0, 0], vec![1]), &config).unwrap();
        let sextic = sextic_condition([0, 0, 0, 0]).unwrap();
        let ratio = obstruction_sextic_ratio(&eq, &sextic).unwrap();
        assert!(!ratio.is_zero());
    }

    #[test]
    fn obstruction_nonzero_off_sextic() {
        // a = 3, b = 7 is not on the sextic for m = 0
        let ctx = ScalarCtx::generic();
        let config = SingularConfig {
            a: ctx.int(3),
            b: vec![ctx.int(7)],
        };
        let eq = build_equation(&Characteristics::new([0, 0, 0, 0], vec![1]), &config).unwrap();
        let obst = frobenius_obstruction(&eq, 0).unwrap();
        assert!(!obst.value.is_zero());
    }

    #[test]
    fn obstruction_n0_degenerate() {
        let ctx = ScalarCtx::generic();
        let config = SingularConfig {
            a: ctx.sym_a(),
            b: vec![ctx.int(5)],
        };
        let eq = build_equation(&Characteristics::new([1, 0, 0, 0], vec![0]), &config).unwrap();
        let obst = frobenius_obstruction(&eq, 0).unwrap();
        assert_eq!(obst.order, 1);
        assert!(obst.value.is_zero());
    }
}
