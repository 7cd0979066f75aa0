//! Translation between the z-side data and the elliptic side: half-period
//! values `e_i` from `a`, the image of the false point under the Weierstrass
//! function, algebraic duplication identities, and the affine map of the
//! spectral curve to the energy plane with the sum-of-roots normalization.
//!
//! Nothing here is transcendental: every relation is checked as an exact
//! identity in the coefficient tower.

use crate::algebra::{rat, ParamScalar, Rat};
use crate::error::{Error, Result};
use crate::psi::SpectralCurve;

/// `e_1` free, `e_2 = (a-2)/(a+1) e_1`, `e_3 = (1-2a)/(a+1) e_1`, and the
/// quartic invariants.
#[derive(Clone, Debug)]
pub struct LatticeData {
    pub e: [ParamScalar; 3],
    pub g2: ParamScalar,
    pub g3: ParamScalar,
}

pub fn lattice_from_a(a: &ParamScalar, e1: &ParamScalar) -> Result<LatticeData> {
    let ctx = a.ctx();
    let denom = a + &ctx.one();
    if denom.is_zero() {
        return Err(Error::DegenerateConfiguration(
            "a = -1 degenerates the half-period parametrization".into(),
        ));
    }
    let inv = denom.inv()?;
    let e2 = &(&(a - &ctx.int(2)) * &inv) * e1;
    let e3 = &(&(&ctx.one() - &(&ctx.int(2) * a)) * &inv) * e1;
    let e1 = e1.clone();
    // sum of roots is zero by construction; g2 = -4 sigma2, g3 = 4 sigma3
    let sigma2 = &(&(&e1 * &e2) + &(&e1 * &e3)) + &(&e2 * &e3);
    let sigma3 = &(&e1 * &e2) * &e3;
    let g2 = -&(&ctx.int(4) * &sigma2);
    let g3 = &ctx.int(4) * &sigma3;
    Ok(LatticeData {
        e: [e1, e2, e3],
        g2,
        g3,
    })
}

/// Weierstrass value at the false point: `(a + 1 - 3b)/(a + 1) * e_1`.
pub fn p_delta(a: &ParamScalar, e1: &ParamScalar, b: &ParamScalar) -> Result<ParamScalar> {
    let ctx = a.ctx();
    let denom = a + &ctx.one();
    let inv = denom.inv()?;
    Ok(&(&(&denom - &(&ctx.int(3) * b)) * &inv) * e1)
}

/// `(p')^2 = 4u^3 - g2 u - g3` evaluated at `u`.
pub fn p_prime_sq(u: &ParamScalar, lat: &LatticeData) -> ParamScalar {
    let ctx = u.ctx();
    let u3 = &(u * u) * u;
    let four_u3 = &u3 * &ctx.int(4);
    &(&four_u3 - &(&lat.g2 * u)) - &lat.g3
}

/// Duplication via the second-derivative form:
/// `p(2x) = (6u^2 - g2/2)^2 / (4 (p')^2) - 2u`.
pub fn p_double(u: &ParamScalar, lat: &LatticeData) -> Result<ParamScalar> {
    let ctx = u.ctx();
    let w = &(&ctx.int(6) * &(u * u)) - &lat.g2.try_div(&ctx.int(2))?;
    let d = p_prime_sq(u, lat);
    let quot = (&w * &w).try_div(&(&ctx.int(4) * &d))?;
    Ok(&quot - &(&ctx.int(2) * u))
}

/// Duplication via the invariant form:
/// `p(2x) = ((u^2 + g2/4)^2 + 2 g3 u) / (p')^2`.
pub fn p_double_alt(u: &ParamScalar, lat: &LatticeData) -> Result<ParamScalar> {
    let ctx = u.ctx();
    let w = &(u * u) + &lat.g2.try_div(&ctx.int(4))?;
    let num = &(&w * &w) + &(&(&ctx.int(2) * &lat.g3) * u);
    num.try_div(&p_prime_sq(u, lat))
}

/// The ratio `p'(2x)/p'(x)`, a rational function of `u = p(x)`:
/// `F'(u)/2`, where `F` is the duplication map.  Sign-unambiguous because
/// flipping the sign of `p'(x)` flips `p'(2x)` too.
pub fn p_prime_double_ratio(u: &ParamScalar, lat: &LatticeData) -> Result<ParamScalar> {
    let ctx = u.ctx();
    let w = &(&ctx.int(6) * &(u * u)) - &lat.g2.try_div(&ctx.int(2))?;
    let w_prime = &ctx.int(12) * u;
    let d = p_prime_sq(u, lat);
    let d_prime = &(&ctx.int(12) * &(u * u)) - &lat.g2;
    // F'(u) = -2 + (2 w w' d - w^2 d') / (4 d^2)
    let num = &(&(&(&ctx.int(2) * &w) * &w_prime) * &d) - &(&(&w * &w) * &d_prime);
    let f_prime = &ctx.int(-2) + &num.try_div(&(&(&ctx.int(4) * &d) * &d))?;
    f_prime.try_div(&ctx.int(2))
}

/// Algebraic forms of the relations the appendix states about `delta`.
#[derive(Clone, Debug, PartialEq)]
pub enum DeltaRelation {
    /// `p(2 delta) = sum_i e_coeffs[i] e_i + pd_coeff * p(delta)`
    PDouble {
        e_coeffs: [Rat; 3],
        pd_coeff: Rat,
    },
    /// `p'(2 delta) = ratio * p'(delta)`
    PPrimeDouble { ratio: Rat },
    /// `p(delta)^2 = g2 / 12`
    PdSquaredIsG2Over12,
}

impl DeltaRelation {
    pub fn p2d_e(i: usize) -> Self {
        let mut e_coeffs = [rat(0, 1), rat(0, 1), rat(0, 1)];
        e_coeffs[i] = rat(1, 1);
        DeltaRelation::PDouble {
            e_coeffs,
            pd_coeff: rat(0, 1),
        }
    }

    pub fn p2d_multiple_of_pd(c: i64) -> Self {
        DeltaRelation::PDouble {
            e_coeffs: [rat(0, 1), rat(0, 1), rat(0, 1)],
            pd_coeff: rat(c, 1),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RelationReport {
    pub holds: bool,
    pub lhs: String,
    pub rhs: String,
}

/// Check a relation exactly, on the branch, using only duplication algebra.
pub fn verify_delta_relation(
    lat: &LatticeData,
    pd: &ParamScalar,
    relation: &DeltaRelation,
) -> Result<RelationReport> {
    match relation {
        DeltaRelation::PDouble { e_coeffs, pd_coeff } => {
            let lhs = p_double(pd, lat)?;
            let ctx = pd.ctx();
            let mut rhs = pd * &ctx.rational(pd_coeff.clone());
            for (i, c) in e_coeffs.iter().enumerate() {
                if !num_traits::Zero::is_zero(c) {
                    rhs = &rhs + &(&lat.e[i] * &ctx.rational(c.clone()));
                }
            }
            Ok(RelationReport {
                holds: lhs == rhs,
                lhs: format!("{lhs}"),
                rhs: format!("{rhs}"),
            })
        }
        DeltaRelation::PPrimeDouble { ratio } => {
            let lhs = p_prime_double_ratio(pd, lat)?;
            let rhs = pd.ctx().rational(ratio.clone());
            Ok(RelationReport {
                holds: lhs == rhs,
                lhs: format!("{lhs}"),
                rhs: format!("{rhs}"),
            })
        }
        DeltaRelation::PdSquaredIsG2Over12 => {
            let lhs = pd * pd;
            let rhs = lat.g2.try_div(&pd.ctx().int(12))?;
            Ok(RelationReport {
                holds: lhs == rhs,
                lhs: format!("{lhs}"),
                rhs: format!("{rhs}"),
            })
        }
    }
}

/// The spectral curve mapped to the energy plane and normalized so the roots
/// sum to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedCurve {
    /// ascending powers of `E`, monic, degree `2g + 1`.
    pub w_sq: Vec<ParamScalar>,
    /// the shift `c` in `E = (e1 - e2) lambda + c`.
    pub shift: ParamScalar,
    /// the scale `e1 - e2`.
    pub scale: ParamScalar,
    pub genus: usize,
}

/// Substitute `lambda = (E - c)/(e1 - e2)`, rescale monic, and pin `c` by the
/// vanishing of the `E^(2g)` coefficient.
pub fn curve_to_e(curve: &SpectralCurve, lat: &LatticeData) -> Result<NormalizedCurve> {
    let ctx = lat.e[0].ctx();
    let scale = &lat.e[0] - &lat.e[1];
    if scale.is_zero() {
        return Err(Error::DegenerateConfiguration("e1 = e2".into()));
    }
    let deg = curve.degree();
    // sum of lambda-roots = -coeff_{deg-1}
    let s1 = -&curve.nu_sq[deg - 1];
    let shift = (-&(&scale * &s1)).try_div(&ctx.int(deg as i64))?;
    // w^2(E) = sum_k nu_k scale^(deg-k) (E - shift)^k
    let mut w_sq = vec![ctx.zero(); deg + 1];
    // precompute (E - shift)^k by iterated multiplication
    let mut pw = vec![ctx.one()]; // coefficients of (E - shift)^k, ascending
    for (k, nu_k) in curve.nu_sq.iter().enumerate() {
        if !nu_k.is_zero() {
            let factor = &scale.pow((deg - k) as u32) * nu_k;
            for (i, c) in pw.iter().enumerate() {
                w_sq[i] = &w_sq[i] + &(c * &factor);
            }
        }
        // pw *= (E - shift)
        let mut next = vec![ctx.zero(); pw.len() + 1];
        for (i, c) in pw.iter().enumerate() {
            next[i + 1] = &next[i + 1] + c;
            next[i] = &next[i] - &(c * &shift);
        }
        pw = next;
    }
    if !w_sq[deg].is_one() {
        return Err(Error::InternalInconsistency(
            "energy curve is not monic".into(),
        ));
    }
    if !w_sq[deg - 1].is_zero() {
        return Err(Error::InternalInconsistency(
            "sum-of-roots normalization failed".into(),
        ));
    }
    Ok(NormalizedCurve {
        w_sq,
        shift,
        scale,
        genus: curve.genus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ScalarCtx;

    #[test]
    fn lattice_sums_to_zero_symbolically() {
        let ctx = ScalarCtx::generic();
        let lat = lattice_from_a(&ctx.sym_a(), &ctx.one()).unwrap();
        let sum = &(&lat.e[0] + &lat.e[1]) + &lat.e[2];
        assert!(sum.is_zero());
        // 4 prod (x - e_j) = 4x^3 - g2 x - g3: check x^2 and x coefficients
        let sigma2 = &(&(&lat.e[0] * &lat.e[1]) + &(&lat.e[0] * &lat.e[2]))
            + &(&lat.e[1] * &lat.e[2]);
        assert_eq!(-&(&ctx.int(4) * &sigma2), lat.g2);
    }

    #[test]
    fn lattice_at_a2_e1_3() {
        let ctx = ScalarCtx::generic();
        let lat = lattice_from_a(&ctx.int(2), &ctx.int(3)).unwrap();
        assert_eq!(lat.e[1], ctx.zero());
        assert_eq!(lat.e[2], ctx.int(-3));
        assert_eq!(lat.g2, ctx.int(36));
        assert_eq!(lat.g3, ctx.zero());
    }

    #[test]
    fn a_minus_one_rejected() {
        let ctx = ScalarCtx::generic();
        assert!(lattice_from_a(&ctx.int(-1), &ctx.one()).is_err());
    }

    #[test]
    fn duplication_routes_agree() {
        use rand::{Rng, SeedableRng};
        let ctx = ScalarCtx::generic();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = ctx.int(rng.gen_range(2..20));
            let e1 = ctx.int(rng.gen_range(1..7));
            let lat = lattice_from_a(&a, &e1).unwrap();
            let u = ctx.rational(rat(rng.gen_range(2..50), rng.gen_range(1..5)));
            if p_prime_sq(&u, &lat).is_zero() {
                continue;
            }
            let d1 = p_double(&u, &lat).unwrap();
            let d2 = p_double_alt(&u, &lat).unwrap();
            assert_eq!(d1, d2);
        }
    }

    #[test]
    fn trivial_curve_maps_to_e() {
        // nu^2 = lambda -> w^2 = E with zero shift
        let ctx = ScalarCtx::generic();
        let lat = lattice_from_a(&ctx.sym_a(), &ctx.one()).unwrap();
        let curve = SpectralCurve {
            nu_sq: vec![ctx.zero(), ctx.one()],
            genus: 0,
        };
        let w = curve_to_e(&curve, &lat).unwrap();
        assert!(w.shift.is_zero());
        assert_eq!(w.w_sq.len(), 2);
        assert!(w.w_sq[0].is_zero());
        assert!(w.w_sq[1].is_one());
    }
}
