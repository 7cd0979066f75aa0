//! Polynomial factorization support.
//!
//! Three layers, each only as general as the pipeline needs:
//!  * square-free (Yun) decomposition over `Q(a)`,
//!  * univariate factorization over `Q` (Berlekamp mod a small prime,
//!    Hensel lifting, Zassenhaus recombination),
//!  * bivariate factorization over `Q(a)` for polynomials whose leading
//!    `b`-coefficient is constant in `a`, by lifting a specialized
//!    factorization in powers of `a - a0`.
//!
//! The bivariate case covers every branch-condition polynomial produced by
//! the sextic (its leading coefficient is `k0^2`, a rational); inputs outside
//! that shape are returned unsplit, which is always sound.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{BPoly, QaPoly, QaRat, Rat};

// ---------------------------------------------------------------------------
// square-free decomposition over Q(a)
// ---------------------------------------------------------------------------

/// Yun's algorithm: returns `(g_i, i)` with `f = lc * prod g_i^i`, each `g_i`
/// monic and square-free, pairwise coprime.
pub fn squarefree_decomposition(f: &BPoly) -> Vec<(BPoly, usize)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let f = f.monic();
    let df = f.derivative();
    let mut a = f.gcd(&df);
    let mut b = f.exact_div(&a);
    let mut c = df.exact_div(&a);
    let mut i = 1usize;
    loop {
        let d = &c - &b.derivative();
        if d.is_zero() {
            if b.degree().unwrap_or(0) > 0 {
                out.push((b.monic(), i));
            }
            break;
        }
        a = b.gcd(&d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.monic(), i));
        }
        b = b.exact_div(&a);
        c = d.exact_div(&a);
        i += 1;
        if b.degree().unwrap_or(0) == 0 {
            break;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// F_p polynomials (small prime, u64 arithmetic)
// ---------------------------------------------------------------------------

type FpPoly = Vec<u64>; // ascending, no trailing zeros

fn fp_trim(mut v: FpPoly) -> FpPoly {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn fp_deg(v: &FpPoly) -> isize {
    v.len() as isize - 1
}

fn fp_inv(x: u64, p: u64) -> u64 {
    let mut e = p - 2;
    let mut base = x % p;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

fn fp_sub(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    fp_trim(
        (0..n)
            .map(|k| {
                (a.get(k).copied().unwrap_or(0) + p - b.get(k).copied().unwrap_or(0) % p) % p
            })
            .collect(),
    )
}

fn fp_mul(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    fp_trim(out)
}

fn fp_scale(a: &FpPoly, c: u64, p: u64) -> FpPoly {
    fp_trim(a.iter().map(|&x| x * c % p).collect())
}

fn fp_div_rem(a: &FpPoly, d: &FpPoly, p: u64) -> (FpPoly, FpPoly) {
    assert!(!d.is_empty());
    let dd = d.len() - 1;
    let lc_inv = fp_inv(*d.last().unwrap(), p);
    let mut rem = a.clone();
    let mut quo = vec![0u64; a.len().saturating_sub(dd)];
    while rem.len() > dd {
        let k = rem.len() - 1 - dd;
        let q = rem[rem.len() - 1] * lc_inv % p;
        if q != 0 {
            for (i, &dc) in d.iter().enumerate() {
                rem[k + i] = (rem[k + i] + p - dc * q % p) % p;
            }
            quo[k] = q;
        }
        rem.pop();
        while rem.last() == Some(&0) {
            rem.pop();
        }
        if rem.len() <= dd {
            break;
        }
    }
    (fp_trim(quo), fp_trim(rem))
}

fn fp_gcd(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let mut f = a.clone();
    let mut g = b.clone();
    while !g.is_empty() {
        let (_, r) = fp_div_rem(&f, &g, p);
        f = g;
        g = r;
    }
    if f.is_empty() {
        return f;
    }
    let inv = fp_inv(*f.last().unwrap(), p);
    fp_scale(&f, inv, p)
}

fn fp_pow_mod(x: &FpPoly, mut e: u64, m: &FpPoly, p: u64) -> FpPoly {
    let mut base = fp_div_rem(x, m, p).1;
    let mut acc = vec![1u64];
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_div_rem(&fp_mul(&acc, &base, p), m, p).1;
        }
        base = fp_div_rem(&fp_mul(&base, &base, p), m, p).1;
        e >>= 1;
    }
    acc
}

/// Berlekamp factorization of a monic square-free polynomial over F_p.
fn berlekamp(f: &FpPoly, p: u64) -> Vec<FpPoly> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.clone()];
    }
    let xp = fp_pow_mod(&vec![0, 1], p, f, p);
    let mut q_rows = Vec::with_capacity(n);
    let mut cur = vec![1u64];
    for i in 0..n {
        let mut row = vec![0u64; n];
        for (j, &c) in cur.iter().enumerate() {
            row[j] = c;
        }
        row[i] = (row[i] + p - 1) % p;
        q_rows.push(row);
        cur = fp_div_rem(&fp_mul(&cur, &xp, p), f, p).1;
    }
    // v with v (Q - I) = 0: kernel of the transpose.
    let mut m = vec![vec![0u64; n]; n];
    for (i, row) in q_rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m[j][i] = v;
        }
    }
    let kernel = fp_kernel(&mut m, n, p);
    let r = kernel.len();
    let mut factors = vec![f.clone()];
    if r == 1 {
        return factors;
    }
    for v in &kernel {
        if factors.len() == r {
            break;
        }
        let vpoly = fp_trim(v.clone());
        if fp_deg(&vpoly) < 1 {
            continue;
        }
        let mut next = Vec::new();
        for fac in factors.drain(..) {
            if fac.len() - 1 <= 1 {
                next.push(fac);
                continue;
            }
            let mut pieces = Vec::new();
            let mut rest = fac.clone();
            for s in 0..p {
                if rest.len() <= 2 {
                    break;
                }
                let mut shifted = vpoly.clone();
                shifted[0] = (shifted[0] + p - s) % p;
                let g = fp_gcd(&rest, &fp_trim(shifted), p);
                if g.len() > 1 && g.len() < rest.len() {
                    rest = fp_div_rem(&rest, &g, p).0;
                    pieces.push(g);
                }
            }
            pieces.push(rest);
            next.extend(pieces.into_iter().filter(|x| x.len() > 1));
        }
        factors = next;
    }
    factors
}

/// Kernel basis (as coefficient vectors) of an n x n matrix over F_p.
fn fp_kernel(m: &mut [Vec<u64>], n: usize, p: u64) -> Vec<Vec<u64>> {
    let mut pivot_of_col = vec![usize::MAX; n];
    let mut row = 0;
    for col in 0..n {
        if row >= n {
            break;
        }
        let pr = match (row..n).find(|&r| m[r][col] != 0) {
            Some(pr) => pr,
            None => continue,
        };
        m.swap(pr, row);
        let inv = fp_inv(m[row][col], p);
        for c in 0..n {
            m[row][c] = m[row][c] * inv % p;
        }
        for r in 0..n {
            if r != row && m[r][col] != 0 {
                let f = m[r][col];
                for c in 0..n {
                    m[r][c] = (m[r][c] + p - m[row][c] * f % p) % p;
                }
            }
        }
        pivot_of_col[col] = row;
        row += 1;
    }
    let mut basis = Vec::new();
    for col in 0..n {
        if pivot_of_col[col] != usize::MAX {
            continue;
        }
        let mut v = vec![0u64; n];
        v[col] = 1;
        for c in 0..n {
            if pivot_of_col[c] != usize::MAX {
                let r = pivot_of_col[c];
                v[c] = (p - m[r][col] % p) % p;
            }
        }
        basis.push(v);
    }
    basis
}

// ---------------------------------------------------------------------------
// integer polynomials, Hensel lifting, Zassenhaus
// ---------------------------------------------------------------------------

type IPoly = Vec<BigInt>; // ascending, trimmed

fn ip_trim(mut v: IPoly) -> IPoly {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn ip_mul(a: &IPoly, b: &IPoly) -> IPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    ip_trim(out)
}

fn ip_mod(a: &IPoly, m: &BigInt) -> IPoly {
    ip_trim(a.iter().map(|c| c.mod_floor(m)).collect())
}

fn ip_balanced(a: &IPoly, m: &BigInt) -> IPoly {
    let half = m / 2;
    ip_trim(
        a.iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

fn ip_content(a: &IPoly) -> BigInt {
    let mut g = BigInt::zero();
    for c in a {
        g = g.gcd(c);
    }
    g
}

fn ip_primitive(a: &IPoly) -> IPoly {
    if a.is_empty() {
        return Vec::new();
    }
    let mut g = ip_content(a);
    if a.last().unwrap().is_negative() {
        g = -g;
    }
    a.iter().map(|c| c / &g).collect()
}

/// Exact division over Z; `Some(quotient)` iff `d` divides `a`.
fn ip_try_div(a: &IPoly, d: &IPoly) -> Option<IPoly> {
    if d.is_empty() {
        return None;
    }
    if a.is_empty() {
        return Some(Vec::new());
    }
    if a.len() < d.len() {
        return None;
    }
    let dd = d.len() - 1;
    let lc = d.last().unwrap();
    let mut rem = a.clone();
    let mut quo = vec![BigInt::zero(); a.len() - dd];
    loop {
        rem = ip_trim(rem);
        if rem.len() <= dd {
            break;
        }
        let k = rem.len() - 1 - dd;
        let (q, r) = rem.last().unwrap().div_rem(lc);
        if r.is_zero() {
            if !q.is_zero() {
                for (i, dc) in d.iter().enumerate() {
                    let s = dc * &q;
                    rem[k + i] -= s;
                }
            }
            quo[k] = q;
            rem.pop();
        } else {
            return None;
        }
    }
    if rem.is_empty() {
        Some(ip_trim(quo))
    } else {
        None
    }
}

fn fp_from_ipoly(a: &IPoly, p: u64) -> FpPoly {
    let pb = BigInt::from(p);
    fp_trim(
        a.iter()
            .map(|c| c.mod_floor(&pb).to_u64().unwrap())
            .collect(),
    )
}

fn ipoly_from_fp(a: &FpPoly) -> IPoly {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

/// One linear Hensel step: from `f = g h (mod q)` to modulo `q p`, with
/// Bezout cofactors `sigma g + tau h = 1 (mod p)`.  All polynomials monic.
fn hensel_step(
    f: &IPoly,
    g: &IPoly,
    h: &IPoly,
    tau: &FpPoly,
    q: &BigInt,
    p: u64,
) -> (IPoly, IPoly) {
    let qp = q * BigInt::from(p);
    let prod = ip_mul(g, h);
    let n = f.len().max(prod.len());
    let diff: IPoly = ip_trim(
        (0..n)
            .map(|k| {
                let a = f.get(k).cloned().unwrap_or_else(BigInt::zero);
                let b = prod.get(k).cloned().unwrap_or_else(BigInt::zero);
                a - b
            })
            .collect(),
    );
    let e_int: IPoly = ip_trim(diff.iter().map(|c| c / q).collect());
    let e = fp_from_ipoly(&e_int, p);
    let g_p = fp_from_ipoly(g, p);
    let h_p = fp_from_ipoly(h, p);
    let dg = fp_div_rem(&fp_mul(tau, &e, p), &g_p, p).1;
    let num = fp_sub(&e, &fp_mul(&dg, &h_p, p), p);
    let (dh, rr) = fp_div_rem(&num, &g_p, p);
    debug_assert!(rr.is_empty(), "hensel step division not exact");
    let lift = |base: &IPoly, delta: &FpPoly| -> IPoly {
        let mut out = base.clone();
        for (k, &c) in delta.iter().enumerate() {
            while out.len() <= k {
                out.push(BigInt::zero());
            }
            out[k] += q * BigInt::from(c);
        }
        ip_mod(&ip_trim(out), &qp)
    };
    (lift(g, &dg), lift(h, &dh))
}

/// Lift a modular factorization of monic `f` to modulo `p^k` via a binary
/// split tree.
fn hensel_tree(f: &IPoly, factors: &[FpPoly], p: u64, k: u32) -> Vec<IPoly> {
    if factors.len() == 1 {
        let pk = BigInt::from(p).pow(k);
        return vec![ip_mod(f, &pk)];
    }
    let mid = factors.len() / 2;
    let mut g0 = vec![1u64];
    for fac in &factors[..mid] {
        g0 = fp_mul(&g0, fac, p);
    }
    let mut h0 = vec![1u64];
    for fac in &factors[mid..] {
        h0 = fp_mul(&h0, fac, p);
    }
    let (_sigma, tau) = fp_bezout(&g0, &h0, p);
    let mut g = ipoly_from_fp(&g0);
    let mut h = ipoly_from_fp(&h0);
    let mut q = BigInt::from(p);
    for _ in 1..k {
        let (g2, h2) = hensel_step(f, &g, &h, &tau, &q, p);
        g = g2;
        h = h2;
        q *= BigInt::from(p);
    }
    let mut out = hensel_tree(&g, &factors[..mid], p, k);
    out.extend(hensel_tree(&h, &factors[mid..], p, k));
    out
}

/// sigma g + tau h = 1 over F_p for coprime g, h.
fn fp_bezout(g: &FpPoly, h: &FpPoly, p: u64) -> (FpPoly, FpPoly) {
    let (mut r0, mut r1) = (g.clone(), h.clone());
    let (mut s0, mut s1) = (vec![1u64], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = fp_div_rem(&r0, &r1, p);
        let s = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        let t = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    debug_assert_eq!(fp_deg(&r0), 0, "bezout of non-coprime polynomials");
    let inv = fp_inv(r0[0], p);
    (fp_scale(&s0, inv, p), fp_scale(&t0, inv, p))
}

const PRIMES: &[u64] = &[
    5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101,
    103, 107, 109, 113,
];

/// Factor a primitive square-free integer polynomial into primitive
/// irreducible factors over Z (Zassenhaus).
pub fn factor_squarefree_int(f: &IPoly) -> Vec<IPoly> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.clone()];
    }
    // Monic transform: F(x) = lc^(n-1) f(x/lc) is monic over Z.
    let lc = f.last().unwrap().clone();
    let mut big_f: IPoly = Vec::with_capacity(n + 1);
    for (i, c) in f.iter().enumerate() {
        if i == n {
            big_f.push(BigInt::one());
        } else {
            big_f.push(c * lc.pow((n - 1 - i) as u32));
        }
    }

    let mut chosen = None;
    for &p in PRIMES {
        let fp = fp_from_ipoly(&big_f, p);
        if fp.len() != n + 1 {
            continue;
        }
        let dfp = fp_trim(
            fp.iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * (k as u64 % p) % p)
                .collect(),
        );
        if fp_gcd(&fp, &dfp, p).len() == 1 {
            chosen = Some(p);
            break;
        }
    }
    let p = chosen.expect("no good prime found for a square-free polynomial");

    let modular = berlekamp(&fp_from_ipoly(&big_f, p), p);
    if modular.len() == 1 {
        return vec![f.clone()];
    }

    // Lift beyond twice a Mignotte-style bound on factor coefficients.
    let norm: BigInt = big_f.iter().map(|c| c.abs()).max().unwrap();
    let bound = BigInt::from(n as u64 + 1) * (BigInt::one() << n) * norm;
    let mut k = 1u32;
    let mut pk = BigInt::from(p);
    while pk <= &bound * 2 {
        pk *= BigInt::from(p);
        k += 1;
    }
    let lifted = hensel_tree(&ip_mod(&big_f, &pk), &modular, p, k);

    // Zassenhaus recombination over subsets of lifted factors.
    let mut remaining: Vec<IPoly> = lifted;
    let mut current = big_f.clone();
    let mut monic_factors: Vec<IPoly> = Vec::new();
    'outer: loop {
        let r = remaining.len();
        if r == 0 {
            break;
        }
        if r == 1 {
            monic_factors.push(ip_primitive(&current));
            break;
        }
        for size in 1..=(r / 2) {
            for subset in subsets(r, size) {
                let mut cand = vec![BigInt::one()];
                for &i in &subset {
                    cand = ip_mul(&cand, &remaining[i]);
                }
                cand = ip_balanced(&cand, &pk);
                if let Some(quot) = ip_try_div(&current, &cand) {
                    monic_factors.push(ip_primitive(&cand));
                    current = quot;
                    for &i in subset.iter().rev() {
                        remaining.remove(i);
                    }
                    continue 'outer;
                }
            }
        }
        monic_factors.push(ip_primitive(&current));
        break;
    }

    // Undo the monic transform: g(x) -> primitive(g(lc x)).
    let mut out: Vec<IPoly> = monic_factors
        .iter()
        .map(|g| {
            let scaled: IPoly = g
                .iter()
                .enumerate()
                .map(|(i, c)| c * lc.pow(i as u32))
                .collect();
            ip_primitive(&ip_trim(scaled))
        })
        .collect();

    let mut prod_lc = BigInt::one();
    for g in &out {
        prod_lc *= g.last().unwrap();
    }
    if prod_lc.sign() != f.last().unwrap().sign() {
        for c in out[0].iter_mut() {
            *c = -c.clone();
        }
    }
    out
}

/// All size-`size` subsets of `0..r` in lexicographic order.
fn subsets(r: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..size).collect();
    loop {
        out.push(cur.clone());
        let mut i = size;
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            if cur[i] != i + r - size {
                cur[i] += 1;
                for j in i + 1..size {
                    cur[j] = cur[j - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }
    out
}

/// Factor a rational-coefficient polynomial into primitive irreducible
/// integer factors with multiplicities (content dropped).
pub fn factor_rational(coeffs: &[Rat]) -> Vec<(IPoly, usize)> {
    let mut den = BigInt::one();
    for c in coeffs {
        den = den.lcm(c.denom());
    }
    let ints: IPoly = ip_trim(
        coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect(),
    );
    if ints.len() <= 1 {
        return Vec::new();
    }
    let prim = ip_primitive(&ints);
    let dg = ip_trim(
        prim.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigInt::from(k))
            .collect(),
    );
    let common = int_poly_gcd(&prim, &dg);
    let mut out: Vec<(IPoly, usize)> = Vec::new();
    if common.len() <= 1 {
        for irr in factor_squarefree_int(&prim) {
            out.push((irr, 1));
        }
        return out;
    }
    let sqfree = ip_primitive(&ip_try_div(&prim, &common).expect("gcd divides"));
    for irr in factor_squarefree_int(&sqfree) {
        let mut m = 1usize;
        let mut rest = ip_primitive(&common);
        while rest.len() > 1 {
            match ip_try_div(&rest, &irr) {
                Some(q) => {
                    m += 1;
                    rest = ip_primitive(&ip_trim(q));
                    if rest.is_empty() {
                        break;
                    }
                }
                None => break,
            }
        }
        out.push((irr, m));
    }
    out
}

/// gcd over Z via primitive pseudo-remainder Euclid.
fn int_poly_gcd(a: &IPoly, b: &IPoly) -> IPoly {
    let mut f = ip_primitive(a);
    let mut g = ip_primitive(b);
    if f.len() < g.len() {
        std::mem::swap(&mut f, &mut g);
    }
    while !g.is_empty() {
        let df = f.len() as isize - 1;
        let dg = g.len() as isize - 1;
        let e = (df - dg + 1).max(0) as u32;
        let scale = g.last().unwrap().pow(e);
        let mut rem: IPoly = f.iter().map(|c| c * &scale).collect();
        let dd = g.len() - 1;
        loop {
            rem = ip_trim(rem);
            if rem.len() <= dd {
                break;
            }
            let k = rem.len() - 1 - dd;
            let q = rem.last().unwrap() / g.last().unwrap();
            for (i, gc) in g.iter().enumerate() {
                let s = gc * &q;
                rem[k + i] -= s;
            }
            rem.pop();
        }
        f = g;
        g = ip_primitive(&rem);
    }
    ip_primitive(&f)
}

// ---------------------------------------------------------------------------
// bivariate factorization over Q(a)
// ---------------------------------------------------------------------------

/// Truncated polynomial in `alpha = a - a0` with Q[b] coefficients,
/// `c[bpow][apow]`.
#[derive(Clone)]
struct ABPoly {
    c: Vec<Vec<Rat>>,
    order: usize,
}

impl ABPoly {
    fn zero(order: usize) -> Self {
        ABPoly {
            c: Vec::new(),
            order,
        }
    }

    fn coeff(&self, bp: usize, ap: usize) -> Rat {
        self.c
            .get(bp)
            .and_then(|r| r.get(ap))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    fn trim(mut self) -> Self {
        while self.c.last().is_some_and(|r| r.iter().all(Zero::is_zero)) {
            self.c.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.c.iter().all(|r| r.iter().all(Zero::is_zero))
    }

    fn mul(&self, other: &ABPoly) -> ABPoly {
        let order = self.order;
        if self.c.is_empty() || other.c.is_empty() {
            return ABPoly::zero(order);
        }
        let mut out = vec![vec![Rat::zero(); order]; self.c.len() + other.c.len() - 1];
        for (i, ri) in self.c.iter().enumerate() {
            for (ai, vi) in ri.iter().enumerate() {
                if vi.is_zero() {
                    continue;
                }
                for (j, rj) in other.c.iter().enumerate() {
                    for (aj, vj) in rj.iter().enumerate() {
                        if ai + aj >= order || vj.is_zero() {
                            continue;
                        }
                        out[i + j][ai + aj] = &out[i + j][ai + aj] + &(vi * vj);
                    }
                }
            }
        }
        ABPoly { c: out, order }.trim()
    }

    fn sub(&self, other: &ABPoly) -> ABPoly {
        let order = self.order;
        let n = self.c.len().max(other.c.len());
        let mut out = vec![vec![Rat::zero(); order]; n];
        for (bp, item) in out.iter_mut().enumerate() {
            for (ap, slot) in item.iter_mut().enumerate() {
                *slot = self.coeff(bp, ap) - other.coeff(bp, ap);
            }
        }
        ABPoly { c: out, order }.trim()
    }

    /// Add `alpha^k * delta(b)`.
    fn add_alpha_term(&mut self, k: usize, delta: &[Rat]) {
        for (bp, v) in delta.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            while self.c.len() <= bp {
                self.c.push(vec![Rat::zero(); self.order]);
            }
            while self.c[bp].len() < self.order {
                self.c[bp].push(Rat::zero());
            }
            self.c[bp][k] = &self.c[bp][k] + v;
        }
    }

    /// Coefficient of `alpha^k` as a Q[b] polynomial.
    fn alpha_slice(&self, k: usize) -> Vec<Rat> {
        qb_trim(
            self.c
                .iter()
                .map(|r| r.get(k).cloned().unwrap_or_else(Rat::zero))
                .collect(),
        )
    }

    /// Back to a BPoly by substituting `alpha = a - a0`.
    fn to_bpoly(&self, a0: &Rat) -> BPoly {
        let a_minus = QaPoly::from_coeffs(vec![-a0.clone(), Rat::one()]);
        let mut pows = vec![QaPoly::one()];
        for k in 1..self.order {
            pows.push(&pows[k - 1] * &a_minus);
        }
        let coeffs: Vec<QaRat> = self
            .c
            .iter()
            .map(|r| {
                let mut acc = QaPoly::zero();
                for (k, v) in r.iter().enumerate() {
                    if !v.is_zero() {
                        acc = &acc + &pows[k].scale(v);
                    }
                }
                QaRat::from_poly(acc)
            })
            .collect();
        BPoly::from_coeffs(coeffs)
    }

    fn from_bpoly(p: &BPoly, a0: &Rat, order: usize) -> ABPoly {
        let mut out = ABPoly::zero(order);
        for (bp, c) in p.coeffs().iter().enumerate() {
            let den = c
                .den()
                .as_constant()
                .expect("bivariate factoring needs a-polynomial coefficients");
            let poly = c.num().scale(&den.recip());
            let shifted = qa_shift(&poly, a0);
            for (ap, v) in shifted.iter().enumerate() {
                if !v.is_zero() {
                    assert!(ap < order, "a-degree exceeds lifting order");
                    let mut d = vec![Rat::zero(); bp + 1];
                    d[bp] = v.clone();
                    out.add_alpha_term(ap, &d);
                }
            }
        }
        out
    }
}

// Q[b] helpers on Vec<Rat>
fn qb_trim(mut v: Vec<Rat>) -> Vec<Rat> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn qb_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(ai * bj);
        }
    }
    qb_trim(out)
}

fn qb_div_rem(a: &[Rat], d: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let dd = d.len() - 1;
    let lc_inv = d.last().unwrap().recip();
    let mut rem = a.to_vec();
    let mut quo = vec![Rat::zero(); a.len().saturating_sub(dd)];
    loop {
        rem = qb_trim(rem);
        if rem.len() <= dd {
            break;
        }
        let k = rem.len() - 1 - dd;
        let q = rem.last().unwrap() * &lc_inv;
        if !q.is_zero() {
            for (i, dc) in d.iter().enumerate() {
                rem[k + i] = &rem[k + i] - &(dc * &q);
            }
            quo[k] = q;
        }
        rem.pop();
    }
    (qb_trim(quo), rem)
}

fn qb_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    qb_trim(
        (0..n)
            .map(|k| {
                a.get(k).cloned().unwrap_or_else(Rat::zero)
                    - b.get(k).cloned().unwrap_or_else(Rat::zero)
            })
            .collect(),
    )
}

fn qb_gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut f = a.to_vec();
    let mut g = b.to_vec();
    while !g.is_empty() {
        let lc = g.last().unwrap().recip();
        let gm: Vec<Rat> = g.iter().map(|c| c * &lc).collect();
        let (_, r) = qb_div_rem(&f, &gm);
        f = gm;
        g = r;
    }
    if f.is_empty() {
        return f;
    }
    let lc = f.last().unwrap().recip();
    f.iter().map(|c| c * &lc).collect()
}

/// sigma g + tau h = 1 over Q[b] for coprime g, h.
fn qb_bezout(g: &[Rat], h: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let (mut r0, mut r1) = (g.to_vec(), h.to_vec());
    let (mut s0, mut s1) = (vec![Rat::one()], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![Rat::one()]);
    while !r1.is_empty() {
        let (q, r) = qb_div_rem(&r0, &r1);
        let s = qb_sub(&s0, &qb_mul(&q, &s1));
        let t = qb_sub(&t0, &qb_mul(&q, &t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    assert_eq!(r0.len(), 1, "bezout of non-coprime Q[b] polynomials");
    let inv = r0[0].recip();
    (
        s0.iter().map(|c| c * &inv).collect(),
        t0.iter().map(|c| c * &inv).collect(),
    )
}

/// Re-expand a Q[a] polynomial in powers of `(a - a0)`.
fn qa_shift(p: &QaPoly, a0: &Rat) -> Vec<Rat> {
    let mut out: Vec<Rat> = Vec::new();
    for c in p.coeffs().iter().rev() {
        let mut next = vec![Rat::zero(); out.len() + 1];
        for (k, v) in out.iter().enumerate() {
            next[k + 1] = &next[k + 1] + v;
            next[k] = &next[k] + &(v * a0);
        }
        next[0] = &next[0] + c;
        out = next;
    }
    if out.is_empty() {
        out.push(Rat::zero());
    }
    out
}

/// Hensel-lift a monic divisor `g0` of `f mod alpha` to a candidate monic
/// factor modulo `alpha^order`; `None` when the cofactor is not coprime or
/// the lift fails to converge.
fn try_lift_factor(f: &ABPoly, g0: &[Rat], order: usize) -> Option<ABPoly> {
    let f0 = f.alpha_slice(0);
    let (h0, rem) = qb_div_rem(&f0, g0);
    if !rem.is_empty() {
        return None;
    }
    if qb_gcd(g0, &h0).len() != 1 {
        return None;
    }
    let (_sigma, tau) = qb_bezout(g0, &h0);
    let mut g = ABPoly::zero(order);
    g.add_alpha_term(0, g0);
    let mut h = ABPoly::zero(order);
    h.add_alpha_term(0, &h0);
    for k in 1..order {
        let e = f.sub(&g.mul(&h)).alpha_slice(k);
        if e.is_empty() {
            continue;
        }
        let (_, dg) = qb_div_rem(&qb_mul(&tau, &e), g0);
        let num = qb_sub(&e, &qb_mul(&dg, &h0));
        let (dh, rr) = qb_div_rem(&num, g0);
        if !rr.is_empty() {
            return None;
        }
        g.add_alpha_term(k, &dg);
        h.add_alpha_term(k, &dh);
    }
    if f.sub(&g.mul(&h)).is_zero() {
        Some(g)
    } else {
        None
    }
}

/// Factor a square-free polynomial over `Q(a)[b]` into irreducible factors in
/// canonical primitive form.  Requires the leading `b`-coefficient to be
/// constant in `a`; inputs outside that shape come back unsplit.
pub fn factor_bivariate(f: &BPoly) -> Vec<BPoly> {
    let f = f.primitive_normalized();
    let deg_b = match f.degree() {
        Some(d) if d >= 1 => d,
        _ => return vec![f],
    };
    if deg_b == 1 {
        return vec![f];
    }
    let lc_rat = match f.leading().unwrap().as_rational() {
        Some(r) => r,
        None => return vec![f],
    };

    let deg_a = f
        .coeffs()
        .iter()
        .map(|c| c.num().degree().unwrap_or(0))
        .max()
        .unwrap_or(0);

    if deg_a == 0 {
        let coeffs: Vec<Rat> = f
            .coeffs()
            .iter()
            .map(|c| c.as_rational().expect("constant coefficients"))
            .collect();
        return factor_rational(&coeffs)
            .into_iter()
            .map(|(g, _)| {
                BPoly::from_coeffs(
                    g.iter()
                        .map(|c| QaRat::rational(Rat::from(c.clone())))
                        .collect(),
                )
                .primitive_normalized()
            })
            .collect();
    }

    let order = deg_a + 1;

    // Specialization point: preserve degree and square-freeness.
    let mut chosen: Option<(Rat, Vec<Rat>)> = None;
    for cand in [2i64, 3, 5, 7, 11, 13, -2, -3, 17, 19, -5, 23] {
        let a0 = Rat::from(BigInt::from(cand));
        if let Some(spec) = f.specialize_a(&a0) {
            let spec = qb_trim(spec);
            if spec.len() != deg_b + 1 {
                continue;
            }
            let dspec = qb_trim(
                spec.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, c)| c * Rat::from(BigInt::from(k as i64)))
                    .collect(),
            );
            if qb_gcd(&spec, &dspec).len() == 1 {
                chosen = Some((a0, spec));
                break;
            }
        }
    }
    let (a0, spec) = match chosen {
        Some(x) => x,
        None => return vec![f],
    };

    let uni = factor_rational(&spec);
    if uni.len() == 1 {
        return vec![f];
    }
    let mut monic_uni: Vec<Vec<Rat>> = uni
        .iter()
        .map(|(g, _)| {
            let lc = Rat::from(g.last().unwrap().clone());
            g.iter().map(|c| Rat::from(c.clone()) / &lc).collect()
        })
        .collect();

    // Work with the monic form of f; the constant lc is restored by
    // primitive normalization at the end.
    let f_monic = f.scale(&QaRat::rational(lc_rat.recip()));
    let mut current = ABPoly::from_bpoly(&f_monic, &a0, order);

    let mut result = Vec::new();
    'outer: loop {
        let r = monic_uni.len();
        if r <= 1 {
            break;
        }
        for size in 1..r {
            for indices in subsets(r, size) {
                let mut g0 = vec![Rat::one()];
                for &i in &indices {
                    g0 = qb_mul(&g0, &monic_uni[i]);
                }
                if let Some(gf) = try_lift_factor(&current, &g0, order) {
                    let g_bp = gf.to_bpoly(&a0);
                    let cur_bp = current.to_bpoly(&a0);
                    let (q, rem) = cur_bp.div_rem(&g_bp);
                    if rem.is_zero() {
                        result.push(g_bp.primitive_normalized());
                        current = ABPoly::from_bpoly(&q, &a0, order);
                        for &i in indices.iter().rev() {
                            monic_uni.remove(i);
                        }
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
    let leftover = current.to_bpoly(&a0).primitive_normalized();
    if leftover.degree().unwrap_or(0) >= 1 {
        result.push(leftover);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat_i;

    fn b() -> BPoly {
        BPoly::gen()
    }

    fn a() -> QaRat {
        QaRat::gen()
    }

    fn int_poly(v: &[i64]) -> IPoly {
        ip_trim(v.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn zassenhaus_splits_quadratics() {
        let f = int_poly(&[-1, 0, 1]);
        let fs = factor_squarefree_int(&f);
        assert_eq!(fs.len(), 2);
        // 2x^2 + 3x + 1 = (2x + 1)(x + 1)
        let f = int_poly(&[1, 3, 2]);
        let fs = factor_squarefree_int(&f);
        assert_eq!(fs.len(), 2);
        let mut prod = vec![BigInt::one()];
        for g in &fs {
            prod = ip_mul(&prod, g);
        }
        assert_eq!(ip_trim(prod), f);
    }

    #[test]
    fn zassenhaus_keeps_irreducible() {
        let f = int_poly(&[1, 0, 0, 0, 1]); // x^4 + 1
        assert_eq!(factor_squarefree_int(&f).len(), 1);
        let f = int_poly(&[1, 1, 1]); // x^2 + x + 1
        assert_eq!(factor_squarefree_int(&f).len(), 1);
    }

    #[test]
    fn rational_factorization_with_multiplicity() {
        // (x-1)^2 (x+2) = x^3 - 3x + 2
        let coeffs = vec![rat_i(2), rat_i(-3), rat_i(0), rat_i(1)];
        let fs = factor_rational(&coeffs);
        let mut sizes: Vec<(usize, usize)> = fs.iter().map(|(g, m)| (g.len() - 1, *m)).collect();
        sizes.sort();
        assert_eq!(sizes, vec![(1, 1), (1, 2)]);
    }

    #[test]
    fn sextic_at_a4_splits_into_four() {
        // (b^2-4)(b^2-2b+4)(b^2-8b+4)
        let f1 = int_poly(&[-4, 0, 1]);
        let f2 = int_poly(&[4, -2, 1]);
        let f3 = int_poly(&[4, -8, 1]);
        let f = ip_mul(&ip_mul(&f1, &f2), &f3);
        let fs = factor_squarefree_int(&f);
        assert_eq!(fs.len(), 4);
        let mut prod = vec![BigInt::one()];
        for g in &fs {
            prod = ip_mul(&prod, g);
        }
        assert_eq!(ip_trim(prod), f);
    }

    #[test]
    fn bivariate_recovers_three_quadratics() {
        // (b^2 - a)(b^2 - 2b + a)(b^2 - 2ab + a)
        let p1 = &b().pow(2) - &BPoly::constant(a());
        let p2 = BPoly::from_coeffs(vec![a(), QaRat::int(-2), QaRat::one()]);
        let p3 = BPoly::from_coeffs(vec![a(), &QaRat::int(-2) * &a(), QaRat::one()]);
        let f = &(&p1 * &p2) * &p3;
        let mut fs = factor_bivariate(&f);
        assert_eq!(fs.len(), 3, "expected three quadratic branches, got {fs:?}");
        fs.sort_by_key(|g| format!("{g}"));
        let mut expect = vec![p1, p2, p3];
        expect.sort_by_key(|g| format!("{g}"));
        assert_eq!(fs, expect);
    }

    #[test]
    fn bivariate_mixed_degrees() {
        // (3b^2 - 2(a+1)b + a) (3b^4 - 4(a+1)b^3 + 6ab^2 - a^2)
        let two_a1 = &QaRat::int(2) * &(&a() + &QaRat::one());
        let p1 = BPoly::from_coeffs(vec![a(), -&two_a1, QaRat::int(3)]);
        let p2 = BPoly::from_coeffs(vec![
            -&(&a() * &a()),
            QaRat::zero(),
            &QaRat::int(6) * &a(),
            &QaRat::int(-4) * &(&a() + &QaRat::one()),
            QaRat::int(3),
        ]);
        let f = &p1 * &p2;
        let mut fs = factor_bivariate(&f);
        fs.sort_by_key(BPoly::degree);
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0], p1.primitive_normalized());
        assert_eq!(fs[1], p2.primitive_normalized());
    }

    #[test]
    fn bivariate_irreducible_stays_whole() {
        let f = &b().pow(2) - &BPoly::constant(a());
        let fs = factor_bivariate(&f);
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0], f);
    }

    #[test]
    fn squarefree_decomposition_yun() {
        // (b - 1)^2 (b - a)
        let f = &(&b() - &BPoly::one()).pow(2) * &(&b() - &BPoly::constant(a()));
        let parts = squarefree_decomposition(&f);
        assert_eq!(parts.len(), 2);
        let linear = &b() - &BPoly::constant(a());
        let squared = &b() - &BPoly::one();
        assert!(parts.contains(&(linear.monic(), 1)));
        assert!(parts.contains(&(squared.monic(), 2)));
    }
}
