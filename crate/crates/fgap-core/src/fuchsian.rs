//! The Fuchsian equation `y'' + P(z) y' + Q(z) y = 0` with regular singular
//! points at `0, 1, a, infinity` and candidate false points `b_1..b_M`:
//! construction of `P`, `Q`, the residues `rho_k`, characteristic exponents,
//! and genus bounds.

use std::fmt;
use std::sync::Arc;

use num_traits::Signed;

use crate::algebra::{rat, ParamScalar, Rat, ScalarCtx};
use crate::error::{Error, Result};
use crate::ratz::{PolePoint, PoleSet, RationalFunctionZ};
use crate::zpoly::ZPoly;

/// The integer data `(m_0, m_1, m_2, m_3; n_1..n_M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Characteristics {
    pub m: [u32; 4],
    pub n: Vec<u32>,
}

impl Characteristics {
    pub fn new(m: [u32; 4], n: Vec<u32>) -> Self {
        Characteristics { m, n }
    }

    /// `N = m_0 + m_1 + m_2 + m_3 + 2 sum n_k`.
    pub fn big_n(&self) -> u32 {
        self.m.iter().sum::<u32>() + 2 * self.n.iter().sum::<u32>()
    }

    pub fn num_false_points(&self) -> usize {
        self.n.len()
    }

    pub fn max_m(&self) -> u32 {
        *self.m.iter().max().unwrap()
    }
}

impl fmt::Display for Characteristics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{}); n={:?}",
            self.m[0], self.m[1], self.m[2], self.m[3], self.n
        )
    }
}

/// Exact positions of the movable singular points.
#[derive(Clone, Debug)]
pub struct SingularConfig {
    pub a: ParamScalar,
    pub b: Vec<ParamScalar>,
}

impl SingularConfig {
    /// Symbolic `a`, symbolic single `b` (generic or on a branch, depending
    /// on the context).
    pub fn symbolic(ctx: &ScalarCtx, num_b: usize) -> Self {
        SingularConfig {
            a: ctx.sym_a(),
            b: vec![ctx.sym_b(); num_b.min(1)],
        }
    }

    pub fn ctx(&self) -> ScalarCtx {
        self.a.ctx()
    }
}

/// A singular point by name; `B` indices past `M` are rejected.
pub type SingularPoint = Option<PolePoint>;

/// The assembled equation data.
#[derive(Clone)]
pub struct FuchsianEquation {
    pub chars: Characteristics,
    pub config: SingularConfig,
    pub poles: Arc<PoleSet>,
    /// `P(z)` in partial fractions.
    pub p: RationalFunctionZ,
    /// lambda-free part of `Q(z)` in partial fractions.
    pub q0: RationalFunctionZ,
    /// coefficient of lambda in `Q(z)`: `1/(4 z (z-1)(z-a))`.
    pub q1: RationalFunctionZ,
    /// `rho_k` values.
    pub rho: Vec<ParamScalar>,
}

impl FuchsianEquation {
    pub fn ctx(&self) -> &ScalarCtx {
        self.poles.ctx()
    }

    /// `N`.
    pub fn big_n(&self) -> u32 {
        self.chars.big_n()
    }

    /// `N (N - 2 m_0 - 1)`, the linear coefficient in the numerator of `Q`.
    pub fn s_lin(&self) -> Rat {
        let n = self.chars.big_n() as i64;
        let m0 = self.chars.m[0] as i64;
        rat(n * (n - 2 * m0 - 1), 1)
    }
}

/// Build the equation from characteristics and singular positions.
pub fn build_equation(chars: &Characteristics, config: &SingularConfig) -> Result<FuchsianEquation> {
    if config.b.len() != chars.n.len() {
        return Err(Error::DegenerateConfiguration(format!(
            "{} false-point positions given for {} characteristics",
            config.b.len(),
            chars.n.len()
        )));
    }
    let ctx = config.ctx();
    let poles = Arc::new(PoleSet::new(ctx.clone(), config.a.clone(), config.b.clone())?);

    // P(z) = (1/2)[(1-2m1)/z + (1-2m2)/(z-1) + (1-2m3)/(z-a)] - 2 sum n_k/(z-b_k)
    let mut p = RationalFunctionZ::zero(&poles);
    let halves = [
        (PolePoint::Zero, chars.m[1]),
        (PolePoint::One, chars.m[2]),
        (PolePoint::A, chars.m[3]),
    ];
    for (pt, m) in halves {
        let c = ctx.rational(rat(1 - 2 * m as i64, 2));
        p = p.with_pole_term(pt, 1, c);
    }
    for (k, &nk) in chars.n.iter().enumerate() {
        if nk == 0 {
            continue;
        }
        p = p.with_pole_term(PolePoint::B(k), 1, ctx.int(-2 * nk as i64));
    }

    // rho_k per the residue formula.
    let a = &config.a;
    let one = ctx.one();
    let mut rho = Vec::with_capacity(chars.n.len());
    for (k, &nk) in chars.n.iter().enumerate() {
        let bk = &config.b[k];
        let b1 = &(bk - &one);
        let ba = &(bk - a);
        let m1 = ctx.int(chars.m[1] as i64);
        let m2 = ctx.int(chars.m[2] as i64);
        let m3 = ctx.int(chars.m[3] as i64);
        let two = ctx.int(2);
        let mut r = &(&(&two * &(b1 * ba)) * &m1) + &(&(&two * &(bk * ba)) * &m2);
        r = &r + &(&(&two * &(bk * b1)) * &m3);
        // (3 b^2 - 2(a+1) b + a) n_k
        let quad = quad_e3_prime(&ctx, a, bk);
        r = &r + &(&quad * &ctx.int(nk as i64));
        // 4 sum_{j != k} b(b-1)(b-a)/(b_k - b_j) n_j
        for (j, &nj) in chars.n.iter().enumerate() {
            if j == k || nj == 0 {
                continue;
            }
            let diff = bk - &config.b[j];
            let num = &(&(bk * b1) * ba) * &ctx.int(4 * nj as i64);
            r = &r + &num.try_div(&diff)?;
        }
        rho.push(r);
    }

    // Q = [S z + lambda + 2 sum n_k rho_k/(z - b_k)] / (4 z (z-1)(z-a))
    let s = ctx.rational({
        let n = chars.big_n() as i64;
        rat(n * (n - 2 * chars.m[0] as i64 - 1), 1)
    });
    let base_den = [
        (PolePoint::Zero, 1usize),
        (PolePoint::One, 1),
        (PolePoint::A, 1),
    ];
    let q1 = {
        let num = ZPoly::constant(ctx.rational(rat(1, 4)));
        RationalFunctionZ::from_fraction(&poles, &num, &base_den)?
    };
    let q0 = {
        // numerator (S z + R_M(z)) cleared by prod(z - b_k) over n_k > 0
        let mut dens: Vec<(PolePoint, usize)> = base_den.to_vec();
        let mut blob = ZPoly::one(&ctx);
        for (k, &nk) in chars.n.iter().enumerate() {
            if nk == 0 {
                continue;
            }
            dens.push((PolePoint::B(k), 1));
            blob = &blob * &ZPoly::linear(&config.b[k]);
        }
        let mut num = ZPoly::gen(&ctx).scale(&s);
        num = &num * &blob;
        for (k, &nk) in chars.n.iter().enumerate() {
            if nk == 0 {
                continue;
            }
            let mut rest = ZPoly::one(&ctx);
            for (j, &nj) in chars.n.iter().enumerate() {
                if j != k && nj > 0 {
                    rest = &rest * &ZPoly::linear(&config.b[j]);
                }
            }
            let c = &rho[k] * &ctx.int(2 * nk as i64);
            num = &num + &rest.scale(&c);
        }
        let num = num.scale(&ctx.rational(rat(1, 4)));
        RationalFunctionZ::from_fraction(&poles, &num, &dens)?
    };

    Ok(FuchsianEquation {
        chars: chars.clone(),
        config: config.clone(),
        poles,
        p,
        q0,
        q1,
        rho,
    })
}

/// `3 b^2 - 2 (a+1) b + a`
pub fn quad_e3_prime(ctx: &ScalarCtx, a: &ParamScalar, b: &ParamScalar) -> ParamScalar {
    let three_b2 = &(b * b) * &ctx.int(3);
    let mid = &(&(a + &ctx.one()) * b) * &ctx.int(2);
    &(&three_b2 - &mid) + a
}

/// Characteristic exponents at a singular point, derived from the indicial
/// equation and cross-checked against the closed forms.
pub fn characteristic_exponents(
    eq: &FuchsianEquation,
    point: Option<PolePoint>,
) -> Result<(Rat, Rat)> {
    let (beta, gamma) = match point {
        Some(pt) => {
            if let PolePoint::B(k) = pt {
                if k >= eq.chars.n.len() {
                    return Err(Error::NonsingularPoint(format!("b{}", k + 1)));
                }
            }
            // indicial: r(r-1) + p0 r + q0 = 0 with p0 = Res_pt P,
            // q0 = order-2 Laurent coefficient of Q at pt.
            let p0 = rational_of(&eq.p.residue(pt))?;
            let q0 = rational_of(&eq.q0.pole_coeff(pt, 2))?;
            (p0 - rat(1, 1), q0)
        }
        None => {
            // at infinity: r^2 + (1 - p_inf) r + q_inf = 0
            let mut p_inf = Rat::from(num_bigint::BigInt::from(0));
            for pt in eq.poles.all_points() {
                p_inf += rational_of(&eq.p.residue(pt))?;
            }
            let (num, dens) = eq.q0.to_fraction();
            let den_deg: usize = dens.iter().map(|(_, e)| *e).sum();
            let num_deg = num.degree().map_or(0, |d| d);
            if num_deg + 2 > den_deg {
                return Err(Error::InternalInconsistency(
                    "Q does not vanish to second order at infinity".into(),
                ));
            }
            let q_inf = if num_deg + 2 == den_deg {
                // leading coefficient ratio; denominator is monic by
                // construction (product of z - p)
                rational_of(&num.leading().cloned().unwrap_or_else(|| eq.ctx().zero()))?
            } else {
                rat(0, 1)
            };
            (rat(1, 1) - p_inf, q_inf)
        }
    };
    let disc = &beta * &beta - rat(4, 1) * &gamma;
    let sq = rational_sqrt(&disc).ok_or_else(|| {
        Error::InternalInconsistency(format!("irrational exponent discriminant {disc}"))
    })?;
    let r1 = (-&beta + &sq) / rat(2, 1);
    let r2 = (-&beta - &sq) / rat(2, 1);

    // closed forms
    let expect: Option<(Rat, Rat)> = match point {
        Some(PolePoint::Zero) => Some((rat(1, 2) + rat(eq.chars.m[1] as i64, 1), rat(0, 1))),
        Some(PolePoint::One) => Some((rat(1, 2) + rat(eq.chars.m[2] as i64, 1), rat(0, 1))),
        Some(PolePoint::A) => Some((rat(1, 2) + rat(eq.chars.m[3] as i64, 1), rat(0, 1))),
        Some(PolePoint::B(k)) => Some((rat(2 * eq.chars.n[k] as i64 + 1, 1), rat(0, 1))),
        None => {
            let n = eq.big_n() as i64;
            let m0 = eq.chars.m[0] as i64;
            Some((rat(-n, 2), rat(-(n - 2 * m0 - 1), 2)))
        }
    };
    if let Some((e1, e2)) = expect {
        let got = if (r1 == e1 && r2 == e2) || (r1 == e2 && r2 == e1) {
            true
        } else {
            false
        };
        if !got {
            return Err(Error::InternalInconsistency(format!(
                "indicial roots ({r1}, {r2}) disagree with closed forms ({e1}, {e2})"
            )));
        }
    }
    Ok((r1, r2))
}

fn rational_of(x: &ParamScalar) -> Result<Rat> {
    x.as_rational().ok_or_else(|| {
        Error::InternalInconsistency(format!("expected a rational value, got {x}"))
    })
}

/// Exact square root of a nonnegative rational, if it is one.
fn rational_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Rat::new(n, d))
    } else {
        None
    }
}

/// `(max m_i, N - 1)`; for `N = 0` the upper bound `-1` flags the trivial
/// equation with genus 0.
pub fn genus_bounds(chars: &Characteristics) -> (u32, i64) {
    (chars.max_m(), chars.big_n() as i64 - 1)
}

/// Closed-form genus for the four-point case (`M = 0`), which depends only on
/// the characteristics.
pub fn heun_genus(chars: &Characteristics) -> Result<u32> {
    if !chars.n.is_empty() {
        return Err(Error::NotApplicable(
            "closed-form genus requires M = 0".into(),
        ));
    }
    let n = chars.big_n();
    let mx = chars.max_m();
    Ok(if n % 2 == 0 {
        let mn = *chars.m.iter().min().unwrap();
        mx.max(n / 2 - mn.min(n / 2))
    } else {
        mx.max((n + 1) / 2)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq_generic(m: [u32; 4], n: Vec<u32>) -> FuchsianEquation {
        let ctx = ScalarCtx::generic();
        let config = SingularConfig {
            a: ctx.sym_a(),
            b: vec![ctx.sym_b(); n.len()],
        };
        build_equation(&Characteristics::new(m, n), &config).unwrap()
    }

    #[test]
    fn rho_for_trivial_m() {
        // m = 0, n1 = 1: rho = 3b^2 - 2(a+1)b + a; N(N - 2m0 - 1) = 2
        let eq = eq_generic([0, 0, 0, 0], vec![1]);
        assert_eq!(eq.big_n(), 2);
        assert_eq!(eq.s_lin(), rat(2, 1));
        let ctx = eq.ctx().clone();
        let expect = quad_e3_prime(&ctx, &ctx.sym_a(), &ctx.sym_b());
        assert_eq!(eq.rho[0], expect);
    }

    #[test]
    fn rho_includes_m1_term() {
        // m = (0,1,0,0), n1 = 1: rho = 2(b-1)(b-a) + 3b^2 - 2(a+1)b + a
        let eq = eq_generic([0, 1, 0, 0], vec![1]);
        let ctx = eq.ctx().clone();
        let b = ctx.sym_b();
        let a = ctx.sym_a();
        let expect = &(&(&(&b - &ctx.one()) * &(&b - &a)) * &ctx.int(2))
            + &quad_e3_prime(&ctx, &a, &b);
        assert_eq!(eq.rho[0], expect);
    }

    #[test]
    fn rho_m2_uses_b_and_b_minus_a() {
        // m = (0,0,1,0), n1 = 1: rho = 2b(b-a) + 3b^2 - 2(a+1)b + a
        let eq = eq_generic([0, 0, 1, 0], vec![1]);
        let ctx = eq.ctx().clone();
        let b = ctx.sym_b();
        let a = ctx.sym_a();
        let expect =
            &(&(&b * &(&b - &a)) * &ctx.int(2)) + &quad_e3_prime(&ctx, &a, &b);
        assert_eq!(eq.rho[0], expect);
    }

    #[test]
    fn n_for_one_one() {
        let eq = eq_generic([1, 1, 0, 0], vec![1]);
        assert_eq!(eq.big_n(), 4);
    }

    #[test]
    fn exponents_match_closed_forms() {
        let eq = eq_generic([0, 0, 0, 0], vec![1]);
        let (r1, r2) = characteristic_exponents(&eq, Some(PolePoint::B(0))).unwrap();
        let pair = if r1 > r2 { (r1, r2) } else { (r2, r1) };
        assert_eq!(pair, (rat(3, 1), rat(0, 1)));

        // N = 4, m0 = 2: the second exponent -(N - 2 m0 - 1)/2 = +1/2 exceeds
        // the first; the pair is returned unordered.
        let eq = eq_generic([2, 0, 0, 0], vec![1]);
        let (r1, r2) = characteristic_exponents(&eq, None).unwrap();
        let mut v = vec![r1, r2];
        v.sort();
        assert_eq!(v, vec![rat(-2, 1), rat(1, 2)]);
    }

    #[test]
    fn fuchs_relation_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let m = [
                rng.gen_range(0..3u32),
                rng.gen_range(0..3u32),
                rng.gen_range(0..3u32),
                rng.gen_range(0..3u32),
            ];
            let n = vec![rng.gen_range(1..3u32)];
            let eq = eq_generic(m, n.clone());
            let mut sum = rat(0, 1);
            for pt in eq.poles.all_points() {
                let (r1, r2) = characteristic_exponents(&eq, Some(pt)).unwrap();
                sum += r1 + r2;
            }
            let (r1, r2) = characteristic_exponents(&eq, None).unwrap();
            sum += r1 + r2;
            let m_count = n.len() as i64;
            assert_eq!(sum, rat(m_count + 2, 1), "Fuchs relation for m={m:?}");
        }
    }

    #[test]
    fn genus_bounds_examples() {
        assert_eq!(genus_bounds(&Characteristics::new([2, 0, 0, 0], vec![1])), (2, 3));
        assert_eq!(genus_bounds(&Characteristics::new([0, 0, 0, 0], vec![1])), (0, 1));
        assert_eq!(genus_bounds(&Characteristics::new([0, 0, 0, 0], vec![])), (0, -1));
    }

    #[test]
    fn heun_genus_examples() {
        assert_eq!(heun_genus(&Characteristics::new([1, 1, 1, 1], vec![])).unwrap(), 1);
        assert_eq!(heun_genus(&Characteristics::new([1, 1, 1, 0], vec![])).unwrap(), 2);
        assert_eq!(heun_genus(&Characteristics::new([2, 0, 0, 0], vec![])).unwrap(), 2);
        assert!(heun_genus(&Characteristics::new([1, 0, 0, 0], vec![1])).is_err());
    }

    #[test]
    fn rejects_mismatched_b_count() {
        let ctx = ScalarCtx::generic();
        let config = SingularConfig {
            a: ctx.sym_a(),
            b: vec![],
        };
        assert!(build_equation(&Characteristics::new([0, 0, 0, 0], vec![1]), &config).is_err());
    }

    #[test]
    fn relabeling_invariance() {
        // two rational false points, swapped together with their n_k
        let ctx = ScalarCtx::generic();
        let chars1 = Characteristics::new([1, 0, 0, 0], vec![1, 2]);
        let chars2 = Characteristics::new([1, 0, 0, 0], vec![2, 1]);
        let c1 = SingularConfig {
            a: ctx.sym_a(),
            b: vec![ctx.int(5), ctx.int(7)],
        };
        let c2 = SingularConfig {
            a: ctx.sym_a(),
            b: vec![ctx.int(7), ctx.int(5)],
        };
        let e1 = build_equation(&chars1, &c1).unwrap();
        let e2 = build_equation(&chars2, &c2).unwrap();
        assert_eq!(e1.rho[0], e2.rho[1]);
        assert_eq!(e1.rho[1], e2.rho[0]);
        // P and Q agree as rational functions (pole labels permuted)
        let (n1, _) = e1.q0.to_fraction();
        let (n2, _) = e2.q0.to_fraction();
        assert_eq!(n1, n2);
    }
}
