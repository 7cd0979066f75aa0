//! Exact linear algebra over [`ParamScalar`].
//!
//! Elimination is fraction-free (Bareiss): rows are first cleared of
//! denominators, then every intermediate entry is a minor of the original
//! matrix, so a zero pivot is a genuine zero and never an artifact of
//! fraction cancellation.  On a branch, pivots must be invertible modulo the
//! condition polynomial; a zero-divisor pivot surfaces as
//! [`Error::SplitModulus`] so the caller can split the branch.

use std::sync::Arc;

use super::scalar::{BPoly, ConditionPolynomial, ParamScalar, ScalarCtx};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ParamScalar>,
    ctx: ScalarCtx,
}

impl ExactMatrix {
    pub fn new(rows: usize, cols: usize, ctx: ScalarCtx) -> Self {
        ExactMatrix {
            rows,
            cols,
            entries: vec![ctx.zero(); rows * cols],
            ctx,
        }
    }

    pub fn from_rows(rows_data: Vec<Vec<ParamScalar>>, ctx: ScalarCtx) -> Self {
        let rows = rows_data.len();
        let cols = rows_data.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows * cols);
        for r in rows_data {
            assert_eq!(r.len(), cols, "ragged matrix");
            entries.extend(r);
        }
        ExactMatrix {
            rows,
            cols,
            entries,
            ctx,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ctx(&self) -> &ScalarCtx {
        &self.ctx
    }

    pub fn get(&self, r: usize, c: usize) -> &ParamScalar {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: ParamScalar) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn identity(n: usize, ctx: ScalarCtx) -> Self {
        let mut m = ExactMatrix::new(n, n, ctx);
        for i in 0..n {
            let one = m.ctx.one();
            m.set(i, i, one);
        }
        m
    }

    pub fn mul_vec(&self, v: &[ParamScalar]) -> Vec<ParamScalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = self.ctx.zero();
                for c in 0..self.cols {
                    if self.get(r, c).is_zero() || v[c].is_zero() {
                        continue;
                    }
                    acc = &acc + &(self.get(r, c) * &v[c]);
                }
                acc
            })
            .collect()
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> Result<ParamScalar> {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        if self.rows == 0 {
            return Ok(self.ctx.one());
        }
        let mut e = Elimination::new(self);
        e.run(self.cols)?;
        if e.pivot_cols.len() < self.cols {
            return Ok(self.ctx.zero());
        }
        // The last Bareiss pivot is the determinant of the cleared matrix;
        // undo the row scalings applied while clearing denominators.
        let mut det = self.ctx.from_bpoly(e.prev_pivot.clone());
        if e.swap_sign {
            det = -&det;
        }
        for s in &e.row_scales {
            det = det.try_div(&self.ctx.from_bpoly(s.clone()))?;
        }
        Ok(det)
    }

    /// Determinant by cofactor expansion; an independent oracle for small
    /// sizes.
    pub fn det_cofactor(&self) -> ParamScalar {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return self.ctx.one();
        }
        if n == 1 {
            return self.get(0, 0).clone();
        }
        let mut acc = self.ctx.zero();
        for c in 0..n {
            if self.get(0, c).is_zero() {
                continue;
            }
            let mut sub = ExactMatrix::new(n - 1, n - 1, self.ctx.clone());
            for r in 1..n {
                let mut cc = 0;
                for k in 0..n {
                    if k == c {
                        continue;
                    }
                    sub.set(r - 1, cc, self.get(r, k).clone());
                    cc += 1;
                }
            }
            let term = &self.get(0, c).clone() * &sub.det_cofactor();
            acc = if c % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    }
}

/// Fraction-free forward elimination over denominator-cleared rows.
struct Elimination {
    rows_data: Vec<Vec<BPoly>>,
    cols: usize,
    modulus: Option<Arc<ConditionPolynomial>>,
    pivot_cols: Vec<usize>,
    swap_sign: bool,
    row_scales: Vec<BPoly>,
    prev_pivot: BPoly,
    rank: usize,
}

impl Elimination {
    fn new(m: &ExactMatrix) -> Self {
        let mut rows_data = Vec::with_capacity(m.rows);
        let mut row_scales = Vec::new();
        for r in 0..m.rows {
            let mut lcm = BPoly::one();
            for c in 0..m.cols {
                let den = m.get(r, c).den();
                let g = lcm.gcd(den);
                lcm = &lcm * &den.exact_div(&g);
            }
            if !(lcm.degree() == Some(0) && lcm.leading().unwrap().is_one()) {
                row_scales.push(lcm.clone());
            }
            let row: Vec<BPoly> = (0..m.cols)
                .map(|c| {
                    let e = m.get(r, c);
                    &e.num().clone() * &lcm.exact_div(e.den())
                })
                .collect();
            rows_data.push(row);
        }
        Elimination {
            rows_data,
            cols: m.cols,
            modulus: m.ctx.modulus().cloned(),
            pivot_cols: Vec::new(),
            swap_sign: false,
            row_scales,
            prev_pivot: BPoly::one(),
            rank: 0,
        }
    }

    fn reduce(&self, p: BPoly) -> BPoly {
        match &self.modulus {
            Some(m) => p.div_rem(m.poly()).1,
            None => p,
        }
    }

    fn is_unit(&self, p: &BPoly) -> bool {
        if p.is_zero() {
            return false;
        }
        match &self.modulus {
            None => true,
            Some(m) => p.gcd(m.poly()).degree() == Some(0),
        }
    }

    /// Divide by the previous pivot: exact polynomial division in generic
    /// mode, multiplication by the modular inverse on a branch.
    fn bareiss_div(&self, num: BPoly) -> BPoly {
        match &self.modulus {
            None => {
                if self.prev_pivot.degree() == Some(0) {
                    num.scale(&self.prev_pivot.as_constant().unwrap().inv().unwrap())
                } else {
                    num.exact_div(&self.prev_pivot)
                }
            }
            Some(m) => {
                let (g, inv) = ext_gcd(&self.prev_pivot, m.poly());
                debug_assert_eq!(g.degree(), Some(0), "pivot not invertible");
                let inv = inv.scale(&g.as_constant().unwrap().inv().unwrap());
                self.reduce(&num * &inv)
            }
        }
    }

    /// Forward elimination with pivots restricted to the first `pivot_limit`
    /// columns; row operations act on the full width.
    fn run(&mut self, pivot_limit: usize) -> Result<()> {
        let nrows = self.rows_data.len();
        for col in 0..pivot_limit {
            if self.rank >= nrows {
                break;
            }
            let mut chosen = None;
            let mut zero_divisor: Option<BPoly> = None;
            for r in self.rank..nrows {
                let e = &self.rows_data[r][col];
                if e.is_zero() {
                    continue;
                }
                if self.is_unit(e) {
                    chosen = Some(r);
                    break;
                }
                if zero_divisor.is_none() {
                    let m = self.modulus.as_ref().unwrap();
                    zero_divisor = Some(e.gcd(m.poly()));
                }
            }
            let r = match chosen {
                Some(r) => r,
                None => {
                    if let Some(factor) = zero_divisor {
                        return Err(Error::SplitModulus {
                            factor: factor.monic().to_string(),
                        });
                    }
                    continue;
                }
            };
            if r != self.rank {
                self.rows_data.swap(r, self.rank);
                self.swap_sign = !self.swap_sign;
            }
            let pivot = self.rows_data[self.rank][col].clone();
            for i in self.rank + 1..nrows {
                let head = self.rows_data[i][col].clone();
                for j in 0..self.cols {
                    if j == col {
                        self.rows_data[i][j] = BPoly::zero();
                        continue;
                    }
                    let num = &(&pivot * &self.rows_data[i][j])
                        - &(&head * &self.rows_data[self.rank][j]);
                    self.rows_data[i][j] = self.bareiss_div(self.reduce(num));
                }
            }
            self.prev_pivot = pivot;
            self.pivot_cols.push(col);
            self.rank += 1;
        }
        Ok(())
    }

    /// Back-substitute through the echelon rows for `unknowns` in the first
    /// `n` columns, taking column `rhs_col` as the right-hand side and
    /// leaving free variables at zero.
    fn back_substitute(
        &self,
        ctx: &ScalarCtx,
        n: usize,
        rhs_col: Option<usize>,
        free_col: Option<usize>,
    ) -> Result<Vec<ParamScalar>> {
        let mut x = vec![ctx.zero(); n];
        if let Some(fc) = free_col {
            x[fc] = ctx.one();
        }
        for ri in (0..self.rank).rev() {
            let pc = self.pivot_cols[ri];
            let row = &self.rows_data[ri];
            let mut acc = match rhs_col {
                Some(rc) => ctx.from_bpoly(row[rc].clone()),
                None => ctx.zero(),
            };
            for c in pc + 1..n {
                if row[c].is_zero() || x[c].is_zero() {
                    continue;
                }
                acc = &acc - &(&ctx.from_bpoly(row[c].clone()) * &x[c]);
            }
            x[pc] = acc.try_div(&ctx.from_bpoly(row[pc].clone()))?;
        }
        Ok(x)
    }
}

fn ext_gcd(x: &BPoly, m: &BPoly) -> (BPoly, BPoly) {
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

/// Exact kernel basis of `m`: every returned vector satisfies `m * v = 0`,
/// which is re-verified by exact multiplication.
pub fn nullspace(m: &ExactMatrix) -> Result<Vec<Vec<ParamScalar>>> {
    let ctx = m.ctx().clone();
    let mut e = Elimination::new(m);
    e.run(m.cols())?;
    let free_cols: Vec<usize> = (0..m.cols())
        .filter(|c| !e.pivot_cols.contains(c))
        .collect();
    let mut basis = Vec::with_capacity(free_cols.len());
    for &fc in &free_cols {
        let v = e.back_substitute(&ctx, m.cols(), None, Some(fc))?;
        assert!(
            m.mul_vec(&v).iter().all(ParamScalar::is_zero),
            "kernel vector failed the exact audit"
        );
        basis.push(v);
    }
    Ok(basis)
}

/// A linear condition `constant + sum_i coeffs[i] * t_i = 0` on the free
/// parameters of an affine right-hand side.
#[derive(Clone, Debug)]
pub struct AffineConstraint {
    pub constant: ParamScalar,
    pub coeffs: Vec<ParamScalar>,
}

/// Solution family of `A x = rhs0 + sum_i t_i * rhs_dirs[i]`:
/// `x = particular + sum_i t_i * directions[i] + ker(A)`, valid exactly for
/// parameters satisfying `constraints`.
#[derive(Clone, Debug)]
pub struct AffineSolution {
    pub particular: Vec<ParamScalar>,
    pub directions: Vec<Vec<ParamScalar>>,
    pub kernel: Vec<Vec<ParamScalar>>,
    pub constraints: Vec<AffineConstraint>,
}

pub fn solve_affine(
    a: &ExactMatrix,
    rhs0: &[ParamScalar],
    rhs_dirs: &[Vec<ParamScalar>],
) -> Result<AffineSolution> {
    assert_eq!(rhs0.len(), a.rows());
    for d in rhs_dirs {
        assert_eq!(d.len(), a.rows());
    }
    let ctx = a.ctx().clone();
    let n = a.cols();
    let k = rhs_dirs.len();

    let mut aug = ExactMatrix::new(a.rows(), n + 1 + k, ctx.clone());
    for r in 0..a.rows() {
        for c in 0..n {
            aug.set(r, c, a.get(r, c).clone());
        }
        aug.set(r, n, rhs0[r].clone());
        for (i, d) in rhs_dirs.iter().enumerate() {
            aug.set(r, n + 1 + i, d[r].clone());
        }
    }

    let mut e = Elimination::new(&aug);
    e.run(n)?;

    // Rows past the rank have a zero A-part; their rhs entries are the
    // consistency conditions.
    let mut constraints = Vec::new();
    for r in e.rank..a.rows() {
        let row = &e.rows_data[r];
        debug_assert!((0..n).all(|c| row[c].is_zero()));
        let constant = ctx.from_bpoly(row[n].clone());
        let coeffs: Vec<ParamScalar> = (0..k)
            .map(|i| ctx.from_bpoly(row[n + 1 + i].clone()))
            .collect();
        if constant.is_zero() && coeffs.iter().all(ParamScalar::is_zero) {
            continue;
        }
        constraints.push(AffineConstraint { constant, coeffs });
    }

    let particular = e.back_substitute(&ctx, n, Some(n), None)?;
    let mut directions = Vec::with_capacity(k);
    for i in 0..k {
        directions.push(e.back_substitute(&ctx, n, Some(n + 1 + i), None)?);
    }
    let free_cols: Vec<usize> = (0..n).filter(|c| !e.pivot_cols.contains(c)).collect();
    let mut kernel = Vec::with_capacity(free_cols.len());
    for &fc in &free_cols {
        kernel.push(e.back_substitute(&ctx, n, None, Some(fc))?);
    }

    Ok(AffineSolution {
        particular,
        directions,
        kernel,
        constraints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::qa::{rat_i, QaRat};
    use crate::algebra::scalar::BranchTag;

    fn gctx() -> ScalarCtx {
        ScalarCtx::generic()
    }

    fn m_from_i64(rows: &[&[i64]], ctx: &ScalarCtx) -> ExactMatrix {
        let data: Vec<Vec<ParamScalar>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| ctx.int(v)).collect())
            .collect();
        ExactMatrix::from_rows(data, ctx.clone())
    }

    #[test]
    fn identity_has_empty_nullspace() {
        let ctx = gctx();
        let m = ExactMatrix::identity(2, ctx);
        assert!(nullspace(&m).unwrap().is_empty());
    }

    #[test]
    fn rank_one_two_by_two() {
        let ctx = gctx();
        let m = m_from_i64(&[&[1, 1], &[2, 2]], &ctx);
        let basis = nullspace(&m).unwrap();
        assert_eq!(basis.len(), 1);
        // span{(1, -1)}: v0 + v1 = 0
        let v = &basis[0];
        assert_eq!(&v[0] + &v[1], ctx.zero());
        assert!(!v[0].is_zero());
    }

    #[test]
    fn det_matches_cofactor_small() {
        let ctx = gctx();
        let m = m_from_i64(
            &[&[2, -1, 3, 0], &[1, 4, 0, 2], &[0, 5, -2, 1], &[3, 0, 1, 1]],
            &ctx,
        );
        assert_eq!(m.det().unwrap(), m.det_cofactor());
    }

    #[test]
    fn det_with_symbols() {
        let ctx = gctx();
        // det [[a, b], [b, a]] = a^2 - b^2
        let m = ExactMatrix::from_rows(
            vec![
                vec![ctx.sym_a(), ctx.sym_b()],
                vec![ctx.sym_b(), ctx.sym_a()],
            ],
            ctx.clone(),
        );
        let expect = &ctx.sym_a().pow(2) - &ctx.sym_b().pow(2);
        assert_eq!(m.det().unwrap(), expect);
        assert_eq!(m.det_cofactor(), expect);
    }

    #[test]
    fn nullspace_on_branch_with_inverses() {
        use crate::algebra::scalar::BPoly;
        // modulus b^2 - a; the vector (1, -1/b) spans the kernel of [[1, b]].
        let m_poly = BPoly::from_coeffs(vec![-&QaRat::gen(), QaRat::zero(), QaRat::one()]);
        let p = ConditionPolynomial::new(m_poly, BranchTag::UserSupplied).unwrap();
        let ctx = ScalarCtx::on_branch(Arc::new(p));
        let m = ExactMatrix::from_rows(vec![vec![ctx.one(), ctx.sym_b()]], ctx.clone());
        let basis = nullspace(&m).unwrap();
        assert_eq!(basis.len(), 1);
        let audit = m.mul_vec(&basis[0]);
        assert!(audit[0].is_zero());
    }

    #[test]
    fn affine_solve_unique() {
        let ctx = gctx();
        // x + y = 3, x - y = 1 -> (2, 1)
        let a = m_from_i64(&[&[1, 1], &[1, -1]], &ctx);
        let sol = solve_affine(&a, &[ctx.int(3), ctx.int(1)], &[]).unwrap();
        assert!(sol.constraints.is_empty());
        assert!(sol.kernel.is_empty());
        assert_eq!(sol.particular, vec![ctx.int(2), ctx.int(1)]);
    }

    #[test]
    fn affine_solve_with_constraint() {
        let ctx = gctx();
        // [1 1; 2 2] x = (1, t): consistent iff t = 2.
        let a = m_from_i64(&[&[1, 1], &[2, 2]], &ctx);
        let rhs0 = vec![ctx.int(1), ctx.zero()];
        let dir = vec![ctx.zero(), ctx.one()];
        let sol = solve_affine(&a, &rhs0, &[dir]).unwrap();
        assert_eq!(sol.constraints.len(), 1);
        let c = &sol.constraints[0];
        // constant + coeff * t = 0 must have the solution t = 2
        let t = (-&c.constant).try_div(&c.coeffs[0]).unwrap();
        assert_eq!(t, ctx.int(2));
        assert_eq!(sol.kernel.len(), 1);
    }

    #[test]
    fn random_nullspace_against_naive_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let ctx = gctx();
        for _ in 0..12 {
            let rows = rng.gen_range(3..=5usize);
            let cols = rng.gen_range(4..=7usize);
            let data: Vec<Vec<i64>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.gen_range(-4..=4)).collect())
                .collect();
            let refs: Vec<&[i64]> = data.iter().map(|r| r.as_slice()).collect();
            let m = m_from_i64(&refs, &ctx);
            let basis = nullspace(&m).unwrap();

            // naive rational RREF oracle
            let mut a: Vec<Vec<crate::algebra::Rat>> = data
                .iter()
                .map(|r| r.iter().map(|&v| crate::algebra::rat_i(v)).collect())
                .collect();
            let mut pivots = Vec::new();
            let mut pr = 0;
            for c in 0..cols {
                if pr >= rows {
                    break;
                }
                if let Some(r) = (pr..rows).find(|&r| !num_traits::Zero::is_zero(&a[r][c])) {
                    a.swap(r, pr);
                    let inv = a[pr][c].clone().recip();
                    for x in a[pr].iter_mut() {
                        *x = &*x * &inv;
                    }
                    for r2 in 0..rows {
                        if r2 != pr && !num_traits::Zero::is_zero(&a[r2][c]) {
                            let f = a[r2][c].clone();
                            for k in 0..cols {
                                let d = &a[pr][k] * &f;
                                a[r2][k] = &a[r2][k] - &d;
                            }
                        }
                    }
                    pivots.push(c);
                    pr += 1;
                }
            }
            let nullity = cols - pivots.len();
            assert_eq!(basis.len(), nullity, "nullity mismatch vs naive oracle");
            for v in &basis {
                assert!(m.mul_vec(v).iter().all(ParamScalar::is_zero));
            }
        }
    }

    #[test]
    fn det_of_rank_deficient_is_zero() {
        let ctx = gctx();
        let m = m_from_i64(&[&[1, 2], &[2, 4]], &ctx);
        assert!(m.det().unwrap().is_zero());
        assert!(m.det_cofactor().is_zero());
    }

    #[test]
    fn rat_i_helper() {
        assert_eq!(rat_i(3) + rat_i(4), rat_i(7));
    }
}
