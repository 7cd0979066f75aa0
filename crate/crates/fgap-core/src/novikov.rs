//! The z-side stationary recursion: the seed function `I_0`, the operator
//! `L`, residue tuning of the false-point position, and detection of the
//! minimal linear relation among `1, I_1~, ..., I_g~` — whose order is the
//! genus.

use std::collections::BTreeMap;

use crate::algebra::{rat, BranchTag, ConditionPolynomial, ParamScalar};
use crate::error::{Error, Result};
use crate::fuchsian::{quad_e3_prime, FuchsianEquation};
use crate::ratz::{PolePoint, RationalFunctionZ};
use crate::zpoly::ZPoly;

/// Options for the recursion operator.
#[derive(Clone)]
pub struct LOptions {
    /// Constant of integration added to the antiderivative term.  The
    /// minimal relation order is invariant under this choice; only the
    /// relation coefficients move.
    pub integration_constant: ParamScalar,
}

impl LOptions {
    pub fn zero(eq: &FuchsianEquation) -> Self {
        LOptions {
            integration_constant: eq.ctx().zero(),
        }
    }

    pub fn constant(c: ParamScalar) -> Self {
        LOptions {
            integration_constant: c,
        }
    }
}

/// The seed `I_0`: linear term from `m_0`, simple poles at `0, 1, a`, and a
/// double pole at every `b_k`.
pub fn build_i0(eq: &FuchsianEquation) -> RationalFunctionZ {
    let ctx = eq.ctx().clone();
    let poles = &eq.poles;
    let m = &eq.chars.m;
    let a = eq.poles.a_value().clone();
    let coef = |mi: u32| ctx.rational(rat((mi * (mi + 1)) as i64, 4));

    // m0(m0+1)/4 z  +  m1(m1+1)/4 a/z  +  m2(m2+1)/4 (z-a)/(z-1)
    //   +  m3(m3+1)/4 a(z-1)/(z-a)
    let mut f = RationalFunctionZ::from_poly(
        poles,
        ZPoly::gen(&ctx).scale(&coef(m[0])),
    );
    // a/z
    f = &f + &RationalFunctionZ::zero(poles)
        .with_pole_term(PolePoint::Zero, 1, &coef(m[1]) * &a);
    // (z-a)/(z-1) = 1 + (1-a)/(z-1)
    let one_minus_a = &ctx.one() - &a;
    f = &f + &RationalFunctionZ::from_poly(poles, ZPoly::constant(coef(m[2])))
        .with_pole_term(PolePoint::One, 1, &coef(m[2]) * &one_minus_a);
    // a(z-1)/(z-a) = a + a(a-1)/(z-a)
    let a_a_minus_1 = &a * &(&a - &ctx.one());
    f = &f + &RationalFunctionZ::from_poly(poles, ZPoly::constant(&coef(m[3]) * &a))
        .with_pole_term(PolePoint::A, 1, &coef(m[3]) * &a_a_minus_1);

    for (k, &nk) in eq.chars.n.iter().enumerate() {
        if nk == 0 {
            continue;
        }
        let bk = &eq.config.b[k];
        let factor = ctx.int((nk * (nk + 1)) as i64);
        // b(b-1)(b-a)/(z-b)^2
        let lead = &(&(bk * &(bk - &ctx.one())) * &(bk - &a)) * &factor;
        // (3b^2 - 2(a+1)b + a)/(2(z-b))
        let res = (&quad_e3_prime(&ctx, &a, bk) * &factor)
            .try_div(&ctx.int(2))
            .expect("division by two");
        f = f
            .with_pole_term(PolePoint::B(k), 2, lead)
            .with_pole_term(PolePoint::B(k), 1, res);
    }
    f
}

/// Apply the recursion operator:
/// `L(f) = z(z-1)(z-a) f'' + (3z^2 - 2(a+1)z + a)/2 f'
///         - int(4 I0 f' + 2 f I0') - c`.
pub fn apply_l(
    eq: &FuchsianEquation,
    i0: &RationalFunctionZ,
    f: &RationalFunctionZ,
    opts: &LOptions,
) -> Result<RationalFunctionZ> {
    let ctx = eq.ctx().clone();
    let a = eq.poles.a_value().clone();
    // E3 = z(z-1)(z-a)
    let e3 = &(&ZPoly::gen(&ctx) * &ZPoly::linear(&ctx.one())) * &ZPoly::linear(&a);
    let e3_prime_half = e3.derivative().scale(
        &ctx.one()
            .try_div(&ctx.int(2))
            .expect("division by two"),
    );
    let df = f.derivative();
    let ddf = df.derivative();
    let term1 = ddf.mul_poly(&e3)?;
    let term2 = df.mul_poly(&e3_prime_half)?;
    let t1 = (i0 * &df).scale(&ctx.int(4));
    let t2 = (f * &i0.derivative()).scale(&ctx.int(2));
    let integrand = &t1 + &t2;
    let integral = integrand.antiderivative()?;
    let mut out = &(&term1 + &term2) - &integral;
    if !opts.integration_constant.is_zero() {
        out = &out
            - &RationalFunctionZ::constant(&eq.poles, opts.integration_constant.clone());
    }
    Ok(out)
}

/// Tune the generic false-point position: the residue condition on `b` that
/// removes the first-order pole of `I_1 + c I_0` at `z = b`.
///
/// Requires `M = 1`, `n_1 = 1` and a generic (modulus-free) `b`.  The
/// returned polynomial is proportional over `Q(a)` to the sextic condition;
/// this is asserted before returning.
pub fn tune_b_residue(eq: &FuchsianEquation) -> Result<ConditionPolynomial> {
    if eq.chars.n != vec![1] {
        return Err(Error::NotApplicable(
            "residue tuning requires M = 1, n_1 = 1".into(),
        ));
    }
    if eq.ctx().modulus().is_some() {
        return Err(Error::NotApplicable(
            "residue tuning requires a generic b".into(),
        ));
    }
    let i0 = build_i0(eq);
    let i1 = apply_l(eq, &i0, &i0, &LOptions::zero(eq))?;
    let pt = PolePoint::B(0);
    let lead0 = i0.pole_coeff(pt, 2);
    if lead0.is_zero() {
        return Err(Error::InternalInconsistency(
            "second-order coefficient of I0 at b vanishes".into(),
        ));
    }
    let c = (-&i1.pole_coeff(pt, 2)).try_div(&lead0)?;
    let residue = &i1.residue(pt) + &(&c * &i0.residue(pt));
    let num = residue.num().primitive_normalized();
    let condition = ConditionPolynomial::new(num.clone(), BranchTag::SexticFactor)?;

    // Proportionality audit against the explicit sextic.
    let sextic = crate::false_point::sextic_condition(eq.chars.m)?;
    let (q, r) = num.div_rem(sextic.poly.poly());
    if !r.is_zero() || q.as_constant().is_none() {
        return Err(Error::InternalInconsistency(
            "tuned residue condition is not proportional to the sextic".into(),
        ));
    }
    Ok(condition)
}

/// The minimal relation `I_g~ + sum c_j~ I_{g-j}~ = d~`.
#[derive(Clone, Debug)]
pub struct NovikovRelation {
    pub order: usize,
    /// `c_1~ .. c_g~` (coefficient of `I_{g-1}~` first).
    pub c: Vec<ParamScalar>,
    pub d: ParamScalar,
}

/// Coordinate of a partial-fraction coefficient vector, ordered so that
/// `b_k` pole coordinates eliminate first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Coord {
    BPole(usize, std::cmp::Reverse<usize>),
    Pole(u8, std::cmp::Reverse<usize>),
    Poly(std::cmp::Reverse<usize>),
}

fn coords_of(f: &RationalFunctionZ) -> BTreeMap<Coord, ParamScalar> {
    let mut out = BTreeMap::new();
    for p in f.poles().all_points() {
        let orders = f.pole_order(p);
        for i in 1..=orders {
            let c = f.pole_coeff(p, i);
            if c.is_zero() {
                continue;
            }
            let key = match p {
                PolePoint::B(k) => Coord::BPole(k, std::cmp::Reverse(i)),
                PolePoint::Zero => Coord::Pole(0, std::cmp::Reverse(i)),
                PolePoint::One => Coord::Pole(1, std::cmp::Reverse(i)),
                PolePoint::A => Coord::Pole(2, std::cmp::Reverse(i)),
            };
            out.insert(key, c);
        }
    }
    if let Some(d) = f.poly_part().degree() {
        for k in 0..=d {
            let c = f.poly_part().coeff(k);
            if !c.is_zero() {
                out.insert(Coord::Poly(std::cmp::Reverse(k)), c);
            }
        }
    }
    out
}

struct ReducedBasis {
    /// `(pivot coordinate, pivot value, function)`, echelon by construction.
    items: Vec<(Coord, ParamScalar, RationalFunctionZ)>,
}

impl ReducedBasis {
    fn new() -> Self {
        ReducedBasis { items: Vec::new() }
    }

    /// Eliminate `f` against the basis; returns the reduced function and the
    /// coefficients used per basis element.
    fn reduce(&self, f: &RationalFunctionZ) -> Result<(RationalFunctionZ, Vec<ParamScalar>)> {
        let mut cur = f.clone();
        let mut used = vec![f.ctx().zero(); self.items.len()];
        loop {
            let coords = coords_of(&cur);
            let mut progressed = false;
            for (idx, (pivot, pval, bf)) in self.items.iter().enumerate() {
                if let Some(v) = coords.get(pivot) {
                    let factor = v.try_div(pval)?;
                    cur = &cur - &bf.scale(&factor);
                    used[idx] = &used[idx] + &factor;
                    progressed = true;
                    break;
                }
            }
            if !progressed {
                return Ok((cur, used));
            }
        }
    }

    /// Insert a reduced, nonzero function; picks an invertible pivot.
    fn insert(&mut self, f: RationalFunctionZ) -> Result<()> {
        let coords = coords_of(&f);
        let mut zero_divisor = None;
        for (key, val) in &coords {
            match val.inv() {
                Ok(_) => {
                    self.items.push((*key, val.clone(), f));
                    return Ok(());
                }
                Err(Error::SplitModulus { factor }) => {
                    zero_divisor = Some(factor.clone());
                }
                Err(_) => {}
            }
        }
        match zero_divisor {
            Some(factor) => Err(Error::SplitModulus { factor }),
            None => Err(Error::InternalInconsistency(
                "cannot insert zero function into basis".into(),
            )),
        }
    }
}

/// Find the minimal `g` such that `1, I_1~, ..., I_g~` are linearly
/// dependent, maintaining each `I_j~` in span-reduced form (no poles at any
/// `b_k`, bounded pole orders at `0, 1, a`).
pub fn find_novikov_relation(
    eq: &FuchsianEquation,
    opts: &LOptions,
) -> Result<NovikovRelation> {
    let ctx = eq.ctx().clone();
    let i0 = build_i0(eq);
    let upper = eq.big_n() as i64 - 1;

    let mut basis = ReducedBasis::new();
    let one = RationalFunctionZ::constant(&eq.poles, ctx.one());
    basis.insert(one)?;

    // order 0: I0 itself constant
    let (i0_red, mut coeffs_hist) = {
        let (red, used) = basis.reduce(&i0)?;
        (red, vec![used])
    };
    if i0_red.is_zero() {
        return Ok(NovikovRelation {
            order: 0,
            c: Vec::new(),
            d: coeffs_hist[0][0].clone(),
        });
    }
    basis.insert(i0_red.clone())?;

    let mut prev = i0_red;
    let mut j = 1usize;
    loop {
        if upper >= 0 && j as i64 > upper {
            return Err(Error::InternalInconsistency(format!(
                "no relation found through order {upper}; a non-false point slipped through"
            )));
        }
        let raw = apply_l(eq, &i0, &prev, opts)?;
        let (red, used) = basis.reduce(&raw)?;
        if red.is_zero() {
            // raw = sum used_i basis_i; basis order: [1, I0~, I1~, ..].
            // I_j~ := raw, so the relation is raw - sum used = 0.
            let d = used[0].clone();
            let mut c = Vec::with_capacity(j);
            // coefficient of I_{j-1}~ first
            for idx in (1..used.len()).rev() {
                c.push(-&used[idx]);
            }
            // audit bounds from the characteristics
            let lower = eq.chars.max_m() as usize;
            if j < lower {
                return Err(Error::InternalInconsistency(format!(
                    "relation order {j} below the lower bound {lower}"
                )));
            }
            // exact audit: raw == sum used_i basis_i
            let mut recomb = RationalFunctionZ::zero(&eq.poles);
            for (val, (_, _, bf)) in used.iter().zip(&basis.items) {
                recomb = &recomb + &bf.scale(val);
            }
            if !(&raw - &recomb).is_zero() {
                return Err(Error::InternalInconsistency(
                    "relation audit failed".into(),
                ));
            }
            return Ok(NovikovRelation { order: j, c, d });
        }
        // Invariants on the reduced function: no b-poles, bounded orders.
        for (k, _) in eq.chars.n.iter().enumerate() {
            if red.pole_order(PolePoint::B(k)) > 0 {
                return Err(Error::InternalInconsistency(format!(
                    "I_{j}~ keeps a pole at b{}; not a false point",
                    k + 1
                )));
            }
        }
        let bounds = [
            (PolePoint::Zero, eq.chars.m[1]),
            (PolePoint::One, eq.chars.m[2]),
            (PolePoint::A, eq.chars.m[3]),
        ];
        for (pt, mi) in bounds {
            if red.pole_order(pt) > mi as usize {
                return Err(Error::InternalInconsistency(format!(
                    "I_{j}~ pole order at {pt} exceeds {mi}"
                )));
            }
        }
        coeffs_hist.push(used);
        basis.insert(red.clone())?;
        prev = red;
        j += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{BPoly, QaRat, ScalarCtx};
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
    fn i0_for_m1000_is_half_z() {
        let eq = generic_eq([1, 0, 0, 0], vec![]);
        let i0 = build_i0(&eq);
        let ctx = eq.ctx().clone();
        let expect = RationalFunctionZ::from_poly(
            &eq.poles,
            ZPoly::gen(&ctx).scale(&ctx.rational(rat(1, 2))),
        );
        assert_eq!(i0, expect);
    }

    #[test]
    fn i0_for_m0_n1() {
        // I0 = 2b(b-1)(b-a)/(z-b)^2 + (3b^2 - 2(a+1)b + a)/(z-b)
        let eq = generic_eq([0, 0, 0, 0], vec![1]);
        let i0 = build_i0(&eq);
        let ctx = eq.ctx().clone();
        let b = ctx.sym_b();
        let a = ctx.sym_a();
        let lead = &(&(&b * &(&b - &ctx.one())) * &(&b - &a)) * &ctx.int(2);
        assert_eq!(i0.pole_coeff(PolePoint::B(0), 2), lead);
        assert_eq!(
            i0.pole_coeff(PolePoint::B(0), 1),
            quad_e3_prime(&ctx, &a, &b)
        );
        assert!(i0.poly_part().is_zero());
    }

    #[test]
    fn l_of_one_is_minus_two_i0_plus_const() {
        let eq = generic_eq([0, 0, 0, 0], vec![1]);
        let ctx = eq.ctx().clone();
        let i0 = build_i0(&eq);
        let one = RationalFunctionZ::constant(&eq.poles, ctx.one());
        let l1 = apply_l(&eq, &i0, &one, &LOptions::zero(&eq)).unwrap();
        // for m = 0 the constant part of I0 is zero, so L(1) = -2 I0 exactly
        assert_eq!(l1, i0.scale(&ctx.int(-2)));

        // in general L(1) + 2 I0 is a constant
        let eq = generic_eq([1, 2, 1, 0], vec![1]);
        let i0 = build_i0(&eq);
        let one = RationalFunctionZ::constant(&eq.poles, eq.ctx().one());
        let l1 = apply_l(&eq, &i0, &one, &LOptions::zero(&eq)).unwrap();
        let diff = &l1 + &i0.scale(&eq.ctx().int(2));
        assert!(diff.as_constant().is_some(), "L(1) + 2 I0 = {diff}");
    }

    #[test]
    fn i1_pole_order_two_for_n1() {
        // the (z-b)^-4 and (z-b)^-3 coefficients carry n1(n1-1) = 0
        let eq = generic_eq([0, 0, 0, 0], vec![1]);
        let i0 = build_i0(&eq);
        let i1 = apply_l(&eq, &i0, &i0, &LOptions::zero(&eq)).unwrap();
        assert_eq!(i1.pole_order(PolePoint::B(0)), 2);
    }

    #[test]
    fn i1_asymptotics_for_n2_match_displayed_formula() {
        // alpha = 1 (I0 itself), n1 = 2: check the t^-4 and t^-3 coefficients
        // of L(I0) at b against the displayed leading asymptotics.
        let eq = generic_eq([0, 0, 0, 0], vec![2]);
        let ctx = eq.ctx().clone();
        let i0 = build_i0(&eq);
        let i1 = apply_l(&eq, &i0, &i0, &LOptions::zero(&eq)).unwrap();
        let b = ctx.sym_b();
        let a = ctx.sym_a();
        let n1 = ctx.int(2);
        let bb = &(&b * &(&b - &ctx.one())) * &(&b - &a);
        let quad = quad_e3_prime(&ctx, &a, &b);
        let big_a = i0.pole_coeff(PolePoint::B(0), 2);
        let big_b = i0.pole_coeff(PolePoint::B(0), 1);
        // alpha = 1:
        // t^-4: 2(2a+1)(a+n+1)(a-n)/(a+1) * bb * A -> 2*3*4*(-1)/2 = -12
        let alpha = ctx.one();
        let c4 = {
            let f1 = &(&(&ctx.int(2) * &(&(&ctx.int(2) * &alpha) + &ctx.one()))
                * &(&(&alpha + &n1) + &ctx.one()))
                * &(&alpha - &n1);
            let f1 = f1.try_div(&(&alpha + &ctx.one())).unwrap();
            &(&f1 * &bb) * &big_a
        };
        assert_eq!(i1.pole_coeff(PolePoint::B(0), 4), c4);
        // t^-3: (4a+1)(2a^2+a-n-n^2)/(2a+1) quad A + 2a(2a+2n+1)(2a-2n-1)/(2a+1) bb B
        let c3 = {
            let two_a = &ctx.int(2) * &alpha;
            let t1 = &(&(&ctx.int(4) * &alpha) + &ctx.one())
                * &(&(&(&(&ctx.int(2) * &alpha) * &alpha) + &alpha) - &(&n1 + &(&n1 * &n1)));
            let t1 = t1.try_div(&(&two_a + &ctx.one())).unwrap();
            let t1 = &(&t1 * &quad) * &big_a;
            let t2 = &(&(&two_a + &(&(&ctx.int(2) * &n1) + &ctx.one()))
                * &(&two_a - &(&(&ctx.int(2) * &n1) + &ctx.one())))
                * &(&ctx.int(2) * &alpha);
            let t2 = t2.try_div(&(&two_a + &ctx.one())).unwrap();
            let t2 = &(&t2 * &bb) * &big_b;
            &t1 + &t2
        };
        assert_eq!(i1.pole_coeff(PolePoint::B(0), 3), c3);
    }

    #[test]
    fn tuned_condition_proportional_to_sextic() {
        for m in [[0u32, 0, 0, 0], [1, 0, 0, 0], [1, 1, 0, 0]] {
            let eq = generic_eq(m, vec![1]);
            let cond = tune_b_residue(&eq).unwrap();
            let sextic = crate::false_point::sextic_condition(m).unwrap();
            assert_eq!(
                cond.poly(),
                &sextic.poly.poly().primitive_normalized(),
                "m = {m:?}"
            );
        }
    }

    #[test]
    fn genus_trivial_cases() {
        // m = 0, M = 0: I0 = 0, relation at order 0
        let eq = generic_eq([0, 0, 0, 0], vec![]);
        let rel = find_novikov_relation(&eq, &LOptions::zero(&eq)).unwrap();
        assert_eq!(rel.order, 0);

        // m = (1,0,0,0), M = 0: one-gap
        let eq = generic_eq([1, 0, 0, 0], vec![]);
        let rel = find_novikov_relation(&eq, &LOptions::zero(&eq)).unwrap();
        assert_eq!(rel.order, 1);
    }

    #[test]
    fn genus_on_branch_m0() {
        let eq = branch_eq([0, 0, 0, 0], vec![1], b2_minus_a());
        let rel = find_novikov_relation(&eq, &LOptions::zero(&eq)).unwrap();
        assert_eq!(rel.order, 1);
    }

    #[test]
    fn integration_constant_moves_coefficients_not_order() {
        let eq = branch_eq([0, 0, 0, 0], vec![1], b2_minus_a());
        let rel0 = find_novikov_relation(&eq, &LOptions::zero(&eq)).unwrap();
        let rel1 =
            find_novikov_relation(&eq, &LOptions::constant(eq.ctx().one())).unwrap();
        assert_eq!(rel0.order, rel1.order);
        assert!(rel0.d != rel1.d || rel0.c != rel1.c);
    }
}
