//! Truncated arithmetic in the unramified quadratic extension `E = k(x)` of
//! `k = Q_p`, and hermitian lattices over its ring of integers.
//!
//! Elements of `R_E` are pairs `(a, b)` meaning `a + b·x`, stored modulo
//! `p^N`. For odd `p`, `x² = u` with `u` the least quadratic nonresidue; for
//! `p = 2`, `x² + x + 1 = 0`. The uniformizer is `ϖ = p`.
//!
//! A lattice is stored as `ϖ^{-s}·M` with `M ⊆ R_E^r` integral and given by
//! its column Hermite normal form: upper triangular, pivots `p^k`, entries
//! above a pivot reduced modulo that pivot. Such a form has small exact
//! integer entries, so lattices compare exactly even though the arithmetic
//! that produced them ran modulo `p^N`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::matgrp::field::{FiniteField, FqMatrix};
use crate::report::CheckReport;

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as u64)
}

/// Prime, precision and defining polynomial of `R_E / p^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PadicCtx {
    p: u64,
    prec: u32,
    modulus: u64,
    /// `x² = u` for odd `p`; unused for `p = 2`.
    u: u64,
}

impl PadicCtx {
    pub fn new(p: u64, prec: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Unsupported(format!("p = {p} is not prime")));
        }
        if prec == 0 {
            return Err(Error::PrecisionExhausted("precision must be positive".into()));
        }
        let modulus = p
            .checked_pow(prec)
            .filter(|&m| m < 1 << 30)
            .ok_or_else(|| Error::Unsupported(format!("p^N too large for p = {p}, N = {prec}")))?;
        let u = if p == 2 { 0 } else { (2..p).find(|&a| (1..p).all(|y| y * y % p != a)).expect("nonresidues exist") };
        Ok(PadicCtx { p, prec, modulus, u })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Same field at a different precision.
    pub fn with_precision(&self, prec: u32) -> Result<Self> {
        if prec == 0 {
            return Err(Error::PrecisionExhausted("no significant digits left".into()));
        }
        Ok(PadicCtx { prec, modulus: self.p.pow(prec), ..*self })
    }

    pub fn elem(&self, a: i64, b: i64) -> UnramElem {
        let m = self.modulus as i64;
        UnramElem { ctx: *self, a: a.rem_euclid(m) as u64, b: b.rem_euclid(m) as u64 }
    }

    pub fn zero(&self) -> UnramElem {
        self.elem(0, 0)
    }

    pub fn one(&self) -> UnramElem {
        self.elem(1, 0)
    }

    /// `p^k` as an element.
    pub fn pi_pow(&self, k: u32) -> UnramElem {
        if k >= self.prec {
            self.zero()
        } else {
            self.elem(self.p.pow(k) as i64, 0)
        }
    }

    /// Every element of `R_E / p^N`.
    pub fn elements(&self) -> impl Iterator<Item = UnramElem> + '_ {
        let m = self.modulus;
        (0..m * m).map(move |i| UnramElem { ctx: *self, a: i % m, b: i / m })
    }

    /// The residue field `F_{p²}` with the same generator `x`.
    pub fn residue_field(&self) -> Arc<FiniteField> {
        let p = self.p as u32;
        let modulus = if p == 2 { vec![1, 1, 1] } else { vec![(p - self.u as u32) % p, 0, 1] };
        Arc::new(FiniteField::with_modulus(p, modulus).expect("defining polynomial is irreducible"))
    }

    /// Image of an integral element in the residue field.
    pub fn residue(&self, f: &FiniteField, e: &UnramElem) -> u8 {
        f.from_coeffs(&[(e.a % self.p) as u32, (e.b % self.p) as u32])
    }
}

/// An element `a + b·x` of `R_E / p^N`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct UnramElem {
    ctx: PadicCtx,
    a: u64,
    b: u64,
}

impl fmt::Debug for UnramElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}x mod {}^{})", self.a, self.b, self.ctx.p, self.ctx.prec)
    }
}

impl fmt::Display for UnramElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{b}x"),
            (a, b) => write!(f, "{a}+{b}x"),
        }
    }
}

fn v_p(mut n: u64, p: u64, cap: u32) -> u32 {
    if n == 0 {
        return cap;
    }
    let mut k = 0;
    while n.is_multiple_of(p) && k < cap {
        n /= p;
        k += 1;
    }
    k
}

impl UnramElem {
    pub fn ctx(&self) -> PadicCtx {
        self.ctx
    }

    pub fn parts(&self) -> (u64, u64) {
        (self.a, self.b)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// `min(v(a), v(b))`, equal to the precision for zero.
    pub fn valuation(&self) -> u32 {
        let p = self.ctx.p;
        v_p(self.a, p, self.ctx.prec).min(v_p(self.b, p, self.ctx.prec))
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == 0
    }

    fn common(&self, other: &Self) -> (PadicCtx, Self, Self) {
        debug_assert_eq!((self.ctx.p, self.ctx.u), (other.ctx.p, other.ctx.u));
        if self.ctx.prec == other.ctx.prec {
            return (self.ctx, *self, *other);
        }
        let ctx = if self.ctx.prec < other.ctx.prec { self.ctx } else { other.ctx };
        (ctx, self.truncate(ctx), other.truncate(ctx))
    }

    /// Reduction to a lower precision.
    pub fn truncate(&self, ctx: PadicCtx) -> Self {
        UnramElem { ctx, a: self.a % ctx.modulus, b: self.b % ctx.modulus }
    }

    /// Reinterprets the representative at another precision; only meaningful
    /// when the representative is known to be exact.
    pub fn embed(&self, ctx: PadicCtx) -> Self {
        UnramElem { ctx, a: self.a % ctx.modulus, b: self.b % ctx.modulus }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (ctx, x, y) = self.common(other);
        let m = ctx.modulus;
        UnramElem { ctx, a: (x.a + y.a) % m, b: (x.b + y.b) % m }
    }

    pub fn neg(&self) -> Self {
        let m = self.ctx.modulus;
        UnramElem { ctx: self.ctx, a: (m - self.a) % m, b: (m - self.b) % m }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (ctx, x, y) = self.common(other);
        let m = ctx.modulus as u128;
        let (a, b, c, d) = (x.a as u128, x.b as u128, y.a as u128, y.b as u128);
        let (ra, rb) = if ctx.p == 2 {
            // x² = −x − 1
            ((a * c + m * m - b * d % m) % m, (a * d + b * c + m * m - b * d % m) % m)
        } else {
            ((a * c + b * d % m * ctx.u as u128) % m, (a * d + b * c) % m)
        };
        UnramElem { ctx, a: ra as u64, b: rb as u64 }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.mul(&self.ctx.elem(k, 0))
    }

    /// Galois conjugation `x ↦ x̄`.
    pub fn conj(&self) -> Self {
        let m = self.ctx.modulus;
        if self.ctx.p == 2 {
            // x̄ = −1 − x
            UnramElem { ctx: self.ctx, a: (self.a + m - self.b) % m, b: (m - self.b) % m }
        } else {
            UnramElem { ctx: self.ctx, a: self.a, b: (m - self.b) % m }
        }
    }

    /// `N(e) = e·ē`, an element of `Z/p^N`.
    pub fn norm(&self) -> u64 {
        let n = self.mul(&self.conj());
        debug_assert_eq!(n.b, 0);
        n.a
    }

    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::DivisionByZero);
        }
        let n = inv_mod(self.norm(), self.ctx.modulus).ok_or(Error::DivisionByZero)?;
        Ok(self.conj().mul(&self.ctx.elem(n as i64, 0)))
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = self.ctx.one();
        let mut base = *self;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Some `y` with `p^k y ≡ self`, at the same precision. Only `y mod
    /// p^{N−k}` is determined; callers use it where any lift is valid.
    fn div_pow_lift(&self, k: u32) -> Self {
        let pk = self.ctx.p.pow(k);
        debug_assert!(self.a.is_multiple_of(pk) && self.b.is_multiple_of(pk));
        UnramElem { ctx: self.ctx, a: self.a / pk, b: self.b / pk }
    }

    /// Exact division by `p^k`, losing `k` digits of precision.
    pub fn div_pow(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(*self);
        }
        if self.valuation() < k {
            return Err(Error::PrecisionExhausted(format!("{self:?} is not divisible by p^{k}")));
        }
        let ctx = self
            .ctx
            .with_precision(self.ctx.prec.saturating_sub(k))
            .map_err(|_| Error::PrecisionExhausted(format!("dividing by p^{k} at precision {}", self.ctx.prec)))?;
        Ok(self.div_pow_lift(k).truncate(ctx))
    }

    /// Multiplication by `p^k`; precision is kept.
    pub fn mul_pow(&self, k: u32) -> Self {
        self.mul(&self.ctx.pi_pow(k))
    }
}

/// A vector `ϖ^{-shift}·(entries)` with integral entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VecE {
    pub shift: i32,
    pub entries: Vec<UnramElem>,
}

/// A matrix `ϖ^{-shift}·M` with integral `M` (row-major).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatE {
    pub dim: usize,
    pub shift: i32,
    pub entries: Vec<UnramElem>,
}

impl MatE {
    pub fn identity(ctx: PadicCtx, dim: usize) -> Self {
        Self::diagonal(ctx, &vec![ctx.one(); dim])
    }

    pub fn diagonal(ctx: PadicCtx, diag: &[UnramElem]) -> Self {
        let n = diag.len();
        let mut entries = vec![ctx.zero(); n * n];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * n + i] = d;
        }
        MatE { dim: n, shift: 0, entries }
    }

    pub fn get(&self, i: usize, j: usize) -> UnramElem {
        self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: UnramElem) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn mul(&self, other: &MatE) -> MatE {
        let n = self.dim;
        let zero = self.entries[0].ctx.zero();
        let mut entries = vec![zero; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] = entries[i * n + j].add(&a.mul(&other.get(k, j)));
                }
            }
        }
        MatE { dim: n, shift: self.shift + other.shift, entries }
    }

    pub fn apply(&self, v: &VecE) -> VecE {
        let n = self.dim;
        let entries = (0..n)
            .map(|i| (0..n).fold(v.entries[0].ctx.zero(), |acc, k| acc.add(&self.get(i, k).mul(&v.entries[k]))))
            .collect();
        VecE { shift: self.shift + v.shift, entries }
    }

    /// Conjugate transpose.
    pub fn star(&self) -> MatE {
        let n = self.dim;
        let mut entries = self.entries.clone();
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.get(i, j).conj();
            }
        }
        MatE { dim: n, shift: self.shift, entries }
    }

    pub fn column(&self, j: usize) -> VecE {
        VecE { shift: self.shift, entries: (0..self.dim).map(|i| self.get(i, j)).collect() }
    }

    /// Lowers the shift while every entry is divisible by `p`.
    pub fn normalize(&self) -> Result<MatE> {
        let mut m = self.clone();
        while m.shift > 0 && m.entries.iter().all(|e| e.valuation() >= 1) {
            let entries = m.entries.iter().map(|e| e.div_pow(1)).collect::<Result<_>>()?;
            m = MatE { dim: m.dim, shift: m.shift - 1, entries };
        }
        Ok(m)
    }

    /// Whether `self = ϖ^{-t}·other` for some common normalization.
    pub fn equals(&self, other: &MatE) -> Result<bool> {
        let (a, b) = (self.normalize()?, other.normalize()?);
        Ok(a.shift == b.shift
            && a.entries.iter().zip(&b.entries).all(|(x, y)| {
                let (_, x, y) = x.common(y);
                x == y
            }))
    }
}

/// `V = E^{2m}` with hyperbolic basis `e_1, f_1, …, e_m, f_m`.
#[derive(Clone, Debug)]
pub struct HermSpace {
    pub ctx: PadicCtx,
    pub pairs: usize,
    pub gram: MatE,
}

impl HermSpace {
    pub fn hyperbolic(ctx: PadicCtx, pairs: usize) -> Self {
        let n = 2 * pairs;
        let mut gram = MatE::diagonal(ctx, &vec![ctx.zero(); n]);
        for i in 0..pairs {
            gram.set(2 * i, 2 * i + 1, ctx.one());
            gram.set(2 * i + 1, 2 * i, ctx.one());
        }
        HermSpace { ctx, pairs, gram }
    }

    pub fn dim(&self) -> usize {
        2 * self.pairs
    }

    /// Index of `e_i` (1-based `i`).
    pub fn e(i: usize) -> usize {
        2 * (i - 1)
    }

    /// Index of `f_i` (1-based `i`).
    pub fn f(i: usize) -> usize {
        2 * (i - 1) + 1
    }

    /// `⟨u, v⟩ = ū^T H v` as `ϖ^{-shift}·value`.
    pub fn pair(&self, u: &VecE, v: &VecE) -> (i32, UnramElem) {
        let n = self.dim();
        let mut acc = self.ctx.zero();
        for a in 0..n {
            let ua = u.entries[a].conj();
            if ua.is_zero() {
                continue;
            }
            for b in 0..n {
                let h = self.gram.get(a, b);
                if !h.is_zero() {
                    acc = acc.add(&ua.mul(&h).mul(&v.entries[b]));
                }
            }
        }
        (u.shift + v.shift, acc)
    }

    /// Valuation of `⟨u, v⟩`, or `None` when it is zero at working precision.
    pub fn pair_valuation(&self, u: &VecE, v: &VecE) -> Option<i32> {
        let (s, x) = self.pair(u, v);
        (!x.is_zero()).then(|| x.valuation() as i32 - s)
    }

    /// `λ` with `g* H g = ϖ^{-λ}·H`, if `g` is a similitude with a power of
    /// `ϖ` as factor.
    pub fn similitude_exponent(&self, g: &MatE) -> Option<i32> {
        let lhs = g.star().mul(&self.gram).mul(g);
        // gram has unit entries, so compare entrywise after scaling
        let lhs = lhs.normalize().ok()?;
        (-(lhs.dim as i32)..=lhs.dim as i32 * 4).find_map(|lam| {
            let mut target = self.gram.clone();
            target.shift = lam;
            lhs.equals(&target).ok().filter(|&b| b).map(|_| lam)
        })
    }

    /// Whether `g* H g = H` at working precision.
    pub fn preserves_form(&self, g: &MatE) -> Result<bool> {
        let lhs = g.star().mul(&self.gram).mul(g);
        lhs.equals(&self.gram)
    }
}

/// Valuations of the elementary divisors of a matrix (rows × cols given as
/// columns), with the column transform `V` such that `U·A·V = D`.
fn smith(cols: &[Vec<UnramElem>], track: bool) -> (Vec<u32>, Vec<Vec<UnramElem>>) {
    let m = cols.len();
    let r = cols.first().map_or(0, |c| c.len());
    let ctx = cols[0][0].ctx;
    let mut a: Vec<Vec<UnramElem>> = cols.to_vec();
    let mut v: Vec<Vec<UnramElem>> = if track {
        (0..m).map(|j| (0..m).map(|i| if i == j { ctx.one() } else { ctx.zero() }).collect()).collect()
    } else {
        Vec::new()
    };
    let mut exps = Vec::new();
    for t in 0..m.min(r) {
        let mut best: Option<(u32, usize, usize)> = None;
        for (j, col) in a.iter().enumerate().skip(t) {
            for (i, x) in col.iter().enumerate().skip(t) {
                let val = x.valuation();
                if val < ctx.prec && best.is_none_or(|b| val < b.0) {
                    best = Some((val, i, j));
                }
            }
        }
        let Some((k, i, j)) = best else { break };
        a.swap(t, j);
        if track {
            v.swap(t, j);
        }
        for col in a.iter_mut() {
            col.swap(t, i);
        }
        let unit = a[t][t].div_pow_lift(k).inv().expect("pivot quotient is a unit");
        for x in a[t].iter_mut() {
            *x = x.mul(&unit);
        }
        if track {
            for x in v[t].iter_mut() {
                *x = x.mul(&unit);
            }
        }
        // clear column t below the pivot (row operations)
        let pivot_col = a[t].clone();
        for row in t + 1..r {
            let f = pivot_col[row].div_pow_lift(k);
            if f.is_zero() {
                continue;
            }
            for col in a.iter_mut() {
                let tv = col[t];
                col[row] = col[row].sub(&f.mul(&tv));
            }
        }
        // clear row t to the right (column operations)
        for c in t + 1..m {
            let f = a[c][t].div_pow_lift(k);
            if f.is_zero() {
                continue;
            }
            let pc = a[t].clone();
            for (x, y) in a[c].iter_mut().zip(&pc) {
                *x = x.sub(&f.mul(y));
            }
            if track {
                let pv = v[t].clone();
                for (x, y) in v[c].iter_mut().zip(&pv) {
                    *x = x.sub(&f.mul(y));
                }
            }
        }
        exps.push(k);
    }
    (exps, v)
}

/// A full-rank `R_E`-lattice `ϖ^{-shift}·M` in `E^r`.
#[derive(Clone, Debug)]
pub struct Lattice {
    ctx: PadicCtx,
    shift: i32,
    /// HNF columns of `M`; column `i` has pivot `p^{exps[i]}` in row `i`.
    hnf: Vec<Vec<UnramElem>>,
    exps: Vec<u32>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.shift == other.shift
            && self.exps == other.exps
            && self.hnf.iter().flatten().map(|e| e.parts()).eq(other.hnf.iter().flatten().map(|e| e.parts()))
    }
}

impl Eq for Lattice {}

impl Lattice {
    /// Lattice spanned by `ϖ^{-shift}·cols`. Arithmetic runs at the lowest
    /// precision present in the generators.
    pub fn from_columns(ctx: PadicCtx, shift: i32, cols: &[Vec<UnramElem>]) -> Result<Self> {
        let r = cols.first().map_or(0, |c| c.len());
        if r == 0 {
            return Err(Error::PreconditionFailed("lattice of rank zero".into()));
        }
        let prec = cols.iter().flatten().map(|e| e.ctx.prec).min().unwrap_or(ctx.prec).min(ctx.prec);
        let work = ctx.with_precision(prec)?;
        let cols: Vec<Vec<UnramElem>> = cols.iter().map(|c| c.iter().map(|e| e.truncate(work)).collect()).collect();
        let (exps, _) = smith(&cols, false);
        if exps.len() < r {
            return Err(Error::PrecisionExhausted(format!(
                "generators have rank {} < {r} at precision {prec}",
                exps.len()
            )));
        }
        let emax = exps.iter().copied().max().unwrap_or(0);
        if emax >= prec {
            return Err(Error::PrecisionExhausted(format!("lattice depth {emax} at precision {prec}")));
        }
        let mut remaining = cols;
        for j in 0..r {
            let mut c = vec![work.zero(); r];
            c[j] = work.pi_pow(emax);
            remaining.push(c);
        }
        let mut hnf: Vec<Vec<UnramElem>> = vec![Vec::new(); r];
        let mut pexps = vec![0u32; r];
        for i in (0..r).rev() {
            let (best, k) = remaining
                .iter()
                .enumerate()
                .map(|(idx, c)| (idx, c[i].valuation()))
                .min_by_key(|&(idx, v)| (v, idx))
                .expect("generators remain");
            let mut piv = remaining.swap_remove(best);
            let unit = piv[i].div_pow_lift(k).inv()?;
            for x in piv.iter_mut() {
                *x = x.mul(&unit);
            }
            for c in remaining.iter_mut() {
                let f = c[i].div_pow_lift(k);
                if !f.is_zero() {
                    for (x, y) in c.iter_mut().zip(&piv) {
                        *x = x.sub(&f.mul(y));
                    }
                }
            }
            hnf[i] = piv;
            pexps[i] = k;
        }
        for c in 0..r {
            for i in (0..c).rev() {
                let pk = ctx.p.pow(pexps[i]);
                let (a, b) = hnf[c][i].parts();
                let q = work.elem((a / pk) as i64, (b / pk) as i64);
                if q.is_zero() {
                    continue;
                }
                let pi = hnf[i].clone();
                for (x, y) in hnf[c].iter_mut().zip(&pi) {
                    *x = x.sub(&q.mul(y));
                }
            }
        }
        let mut lat = Lattice {
            ctx,
            shift,
            hnf: hnf.iter().map(|c| c.iter().map(|e| e.embed(ctx)).collect()).collect(),
            exps: pexps,
        };
        // smallest shift with integral M
        while lat.exps.iter().all(|&k| k >= 1) && lat.hnf.iter().flatten().all(|e| e.valuation() >= 1) {
            let p = ctx.p;
            lat.hnf = lat
                .hnf
                .iter()
                .map(|c| c.iter().map(|e| ctx.elem((e.a / p) as i64, (e.b / p) as i64)).collect())
                .collect();
            lat.exps.iter_mut().for_each(|k| *k -= 1);
            lat.shift -= 1;
        }
        Ok(lat)
    }

    /// `R_E^r`.
    pub fn standard(ctx: PadicCtx, r: usize) -> Self {
        let cols: Vec<Vec<UnramElem>> =
            (0..r).map(|j| (0..r).map(|i| if i == j { ctx.one() } else { ctx.zero() }).collect()).collect();
        Lattice::from_columns(ctx, 0, &cols).expect("standard lattice")
    }

    pub fn ctx(&self) -> PadicCtx {
        self.ctx
    }

    pub fn rank(&self) -> usize {
        self.hnf.len()
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn pivot_exponents(&self) -> &[u32] {
        &self.exps
    }

    /// Basis vectors `ϖ^{-shift}·(HNF column)`.
    pub fn basis(&self) -> Vec<VecE> {
        self.hnf.iter().map(|c| VecE { shift: self.shift, entries: c.clone() }).collect()
    }

    /// `log_{|R_E/ϖ|}` of `[R_E^r : L]` (negative when `L` is larger).
    pub fn volume(&self) -> i64 {
        self.exps.iter().map(|&k| k as i64).sum::<i64>() - self.rank() as i64 * self.shift as i64
    }

    /// `ϖ^k·L`.
    pub fn scale(&self, k: i32) -> Lattice {
        Lattice { shift: self.shift - k, ..self.clone() }
    }

    /// `g·L`.
    pub fn apply(&self, g: &MatE) -> Result<Lattice> {
        let cols: Vec<Vec<UnramElem>> =
            self.basis().iter().map(|v| g.apply(&VecE { shift: 0, entries: v.entries.clone() }).entries).collect();
        Lattice::from_columns(self.ctx, self.shift + g.shift, &cols)
    }

    /// HNF-basis coordinates of an integral vector of `M`, or `None` when
    /// it lies outside `M`. Coordinates are determined modulo `p^{N−k_i}`.
    fn coordinates_in_m(&self, w: &[UnramElem]) -> Result<Option<Vec<UnramElem>>> {
        let prec = w.iter().map(|e| e.ctx.prec).min().unwrap_or(self.ctx.prec);
        let emax = self.exps.iter().copied().max().unwrap_or(0);
        if emax >= prec {
            return Err(Error::PrecisionExhausted(format!("membership at depth {emax}, precision {prec}")));
        }
        let work = self.ctx.with_precision(prec)?;
        let mut w: Vec<UnramElem> = w.iter().map(|e| e.truncate(work)).collect();
        let mut coords = vec![work.zero(); w.len()];
        for i in (0..w.len()).rev() {
            let k = self.exps[i];
            if w[i].valuation() < k {
                return Ok(None);
            }
            let f = w[i].div_pow_lift(k);
            coords[i] = f;
            for (x, y) in w.iter_mut().zip(&self.hnf[i]) {
                *x = x.sub(&f.mul(&y.truncate(work)));
            }
        }
        Ok(Some(coords))
    }

    /// Brings `v` to an integral vector relative to this lattice's shift:
    /// `v ∈ L` iff the result lies in `M`.
    fn relative(&self, v: &VecE) -> Result<Vec<UnramElem>> {
        let t = self.shift - v.shift;
        if t >= 0 {
            Ok(v.entries.iter().map(|e| e.mul_pow(t as u32)).collect())
        } else {
            v.entries.iter().map(|e| e.div_pow((-t) as u32)).collect::<Result<Vec<_>>>().or_else(|err| {
                // not divisible means not in L; too little precision is an error
                if v.entries.iter().all(|e| e.valuation() >= (-t) as u32) {
                    Err(err)
                } else {
                    Ok(Vec::new())
                }
            })
        }
    }

    pub fn contains_vector(&self, v: &VecE) -> Result<bool> {
        let w = self.relative(v)?;
        if w.is_empty() {
            return Ok(false);
        }
        Ok(self.coordinates_in_m(&w)?.is_some())
    }

    /// Coordinates of `v ∈ L` in the HNF basis, reduced into the residue field.
    pub fn residue_coordinates(&self, v: &VecE, field: &FiniteField) -> Result<Option<Vec<u8>>> {
        let w = self.relative(v)?;
        if w.is_empty() {
            return Ok(None);
        }
        Ok(self.coordinates_in_m(&w)?.map(|c| c.iter().map(|e| self.ctx.residue(field, e)).collect()))
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Lattice) -> Result<bool> {
        for v in other.basis() {
            if !self.contains_vector(&v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `{v : ⟨v, ℓ⟩ ∈ R_E for all ℓ ∈ L}`.
    pub fn dual(&self, space: &HermSpace) -> Result<Lattice> {
        let r = self.rank();
        // A = B* H with B the HNF basis; L^∨ = ϖ^{shift}·A^{-1}R_E^r
        let mut b = MatE::diagonal(self.ctx, &vec![self.ctx.zero(); r]);
        for (j, col) in self.hnf.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                b.set(i, j, x);
            }
        }
        let a = b.star().mul(&space.gram);
        let a_cols: Vec<Vec<UnramElem>> = (0..r).map(|j| (0..r).map(|i| a.get(i, j)).collect()).collect();
        let (exps, v) = smith(&a_cols, true);
        if exps.len() < r {
            return Err(Error::PrecisionExhausted("form is degenerate at working precision".into()));
        }
        let e = exps.iter().copied().max().unwrap_or(0);
        let cols: Vec<Vec<UnramElem>> =
            v.iter().zip(&exps).map(|(c, &d)| c.iter().map(|x| x.mul_pow(e - d)).collect()).collect();
        Lattice::from_columns(self.ctx, e as i32 - self.shift, &cols)
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ϖ^{} ·", -self.shift)?;
        let r = self.rank();
        for i in 0..r {
            let row: Vec<String> = (0..r).map(|j| self.hnf[j][i].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `Span{e_1, f_1, …, e_d, f_d, ϖe_{d+1}, f_{d+1}, …, ϖe_{2d}, f_{2d}}`.
pub fn vertex_lattice(ctx: PadicCtx, d: usize) -> Result<Lattice> {
    if d == 0 {
        return Err(Error::PreconditionFailed("d must be positive".into()));
    }
    let r = 4 * d;
    let cols: Vec<Vec<UnramElem>> = (0..r)
        .map(|j| {
            let scaled = j >= 2 * d && j % 2 == 0;
            (0..r)
                .map(|i| {
                    if i != j {
                        ctx.zero()
                    } else if scaled {
                        ctx.pi_pow(1)
                    } else {
                        ctx.one()
                    }
                })
                .collect()
        })
        .collect();
    Lattice::from_columns(ctx, 0, &cols)
}

/// `g₀`: `e_i ↦ e_{d+i}`, `f_i ↦ ϖ^{-1}f_{d+i}`, `e_{d+i} ↦ ϖ^{-1}e_i`,
/// `f_{d+i} ↦ f_i` for `i ≤ d`.
pub fn g0_matrix(ctx: PadicCtx, d: usize) -> MatE {
    let n = 4 * d;
    let mut g = MatE::diagonal(ctx, &vec![ctx.zero(); n]);
    g.shift = 1;
    let (e, f) = (HermSpace::e, HermSpace::f);
    for i in 1..=d {
        g.set(e(d + i), e(i), ctx.pi_pow(1));
        g.set(f(d + i), f(i), ctx.one());
        g.set(e(i), e(d + i), ctx.one());
        g.set(f(i), f(d + i), ctx.pi_pow(1));
    }
    g
}

/// `g₀^{-1} = ϖ·g₀`.
pub fn g0_inverse(ctx: PadicCtx, d: usize) -> MatE {
    MatE { shift: 0, ..g0_matrix(ctx, d) }
}

/// The hermitian space `A/B` over `F_{q²}` with form `ϖ^c⟨·,·⟩ mod ϖ`.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    pub field: Arc<FiniteField>,
    pub c: i32,
    pub basis: Vec<VecE>,
    pub gram: FqMatrix,
    gram_inv: FqMatrix,
    upper: Lattice,
    lower: Lattice,
    space: HermSpace,
}

impl QuotientSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn scaled_residue(&self, u: &VecE, v: &VecE) -> Result<u8> {
        let (s, x) = self.space.pair(u, v);
        let t = s - self.c;
        let x = if t >= 0 { x.div_pow(t as u32)? } else { x.mul_pow((-t) as u32) };
        Ok(self.space.ctx.residue(&self.field, &x))
    }

    /// Coordinates of the image of `v ∈ A` in the chosen basis.
    pub fn reduce(&self, v: &VecE) -> Result<Vec<u8>> {
        if !self.upper.contains_vector(v)? {
            return Err(Error::NotInStabilizer("vector is outside the upper lattice".into()));
        }
        let f = &self.field;
        let r: Vec<u8> = self.basis.iter().map(|u| self.scaled_residue(u, v)).collect::<Result<_>>()?;
        let n = self.dim();
        Ok((0..n).map(|i| (0..n).fold(0u8, |acc, j| f.add(acc, f.mul(self.gram_inv.get(i, j), r[j])))).collect())
    }

    /// Whether the form is conjugate-symmetric and nondegenerate.
    pub fn is_nondegenerate_hermitian(&self) -> bool {
        let q = self.space.ctx.p;
        self.gram.map_pow(q).transpose() == self.gram && self.gram.det() != 0
    }

    pub fn upper(&self) -> &Lattice {
        &self.upper
    }

    pub fn lower(&self) -> &Lattice {
        &self.lower
    }
}

/// `A/B` for `ϖA ⊆ B ⊊ A`, with a basis chosen from the HNF basis of `A`.
pub fn quotient_hermitian(upper: &Lattice, lower: &Lattice, space: &HermSpace) -> Result<QuotientSpace> {
    check_chain(upper, lower)?;
    let field = space.ctx.residue_field();
    let f = &*field;
    let r = upper.rank();
    let rows: Vec<Vec<u8>> = lower
        .basis()
        .iter()
        .map(|v| upper.residue_coordinates(v, f)?.ok_or_else(|| Error::ChainViolation("lower ⊄ upper".into())))
        .collect::<Result<_>>()?;
    let pivots = rref_f(f, rows, r);
    let ub = upper.basis();
    let basis: Vec<VecE> = (0..r).filter(|j| !pivots.contains(j)).map(|j| ub[j].clone()).collect();
    quotient_with_basis(upper, lower, space, basis)
}

/// `A/B` with a prescribed basis (vectors of `A` independent modulo `B`).
pub fn quotient_with_basis(
    upper: &Lattice,
    lower: &Lattice,
    space: &HermSpace,
    basis: Vec<VecE>,
) -> Result<QuotientSpace> {
    check_chain(upper, lower)?;
    let field = space.ctx.residue_field();
    let expected = (lower.volume() - upper.volume()) as usize;
    if basis.len() != expected {
        return Err(Error::StructureFailed(format!("basis has {} vectors, quotient has dim {expected}", basis.len())));
    }
    for v in &basis {
        if !upper.contains_vector(v)? {
            return Err(Error::StructureFailed("basis vector outside upper lattice".into()));
        }
    }
    let c = -upper
        .basis()
        .iter()
        .flat_map(|u| upper.basis().into_iter().filter_map(move |v| space.pair_valuation(u, &v)))
        .min()
        .unwrap_or(0);
    // the form must vanish on A × B modulo ϖ
    for u in upper.basis() {
        for v in lower.basis() {
            if let Some(val) = space.pair_valuation(&u, &v) {
                if val + c < 1 {
                    return Err(Error::ChainViolation("lower lattice is not in the radical".into()));
                }
            }
        }
    }
    let n = basis.len();
    let mut q = QuotientSpace {
        field: field.clone(),
        c,
        basis,
        gram: FqMatrix::identity(field.clone(), n),
        gram_inv: FqMatrix::identity(field.clone(), n),
        upper: upper.clone(),
        lower: lower.clone(),
        space: space.clone(),
    };
    let mut entries = vec![0u8; n * n];
    for i in 0..n {
        for j in 0..n {
            entries[i * n + j] = q.scaled_residue(&q.basis[i], &q.basis[j])?;
        }
    }
    q.gram = FqMatrix::new(field, n, entries);
    q.gram_inv = q.gram.inverse().map_err(|_| Error::StructureFailed("quotient form is degenerate".into()))?;
    Ok(q)
}

fn check_chain(upper: &Lattice, lower: &Lattice) -> Result<()> {
    if !upper.contains(lower)? || !lower.contains(&upper.scale(1))? {
        return Err(Error::ChainViolation("need ϖA ⊆ B ⊆ A".into()));
    }
    if upper == lower {
        return Err(Error::ChainViolation("quotient is zero-dimensional".into()));
    }
    Ok(())
}

fn rref_f(f: &FiniteField, mut rows: Vec<Vec<u8>>, width: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(r, p);
        let inv = f.inv(rows[r][col]).expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        let pr = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[col] != 0 {
                let c = row[col];
                for (x, &y) in row.iter_mut().zip(&pr) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Extra digits carried by group elements so that clearing powers of `ϖ`
/// from products does not exhaust the nominal precision.
pub const GUARD_DIGITS: u32 = 6;

/// The lattice `L`, its dual, and the two residue hermitian spaces with
/// bases matched by `g₀`.
#[derive(Clone, Debug)]
pub struct LatticeSetup {
    /// Nominal precision.
    pub ctx: PadicCtx,
    /// Working precision for matrices: nominal plus [`GUARD_DIGITS`].
    pub work: PadicCtx,
    pub d: usize,
    pub space: HermSpace,
    pub l: Lattice,
    pub l_dual: Lattice,
    /// `L^∨ / L` with basis `g₀(e_i), g₀(f_i)`.
    pub x: QuotientSpace,
    /// `L / ϖL^∨` with basis `e_i, f_i` (`i ≤ d`).
    pub y: QuotientSpace,
    pub g0: MatE,
    pub g0_inv: MatE,
}

impl LatticeSetup {
    pub fn new(ctx: PadicCtx, d: usize) -> Result<Self> {
        let nominal = ctx;
        let ctx = PadicCtx::new(ctx.p, ctx.prec + GUARD_DIGITS)?;
        let space = HermSpace::hyperbolic(ctx, 2 * d);
        let l = vertex_lattice(ctx, d)?;
        let l_dual = l.dual(&space)?;
        let g0 = g0_matrix(ctx, d);
        let g0_inv = g0_inverse(ctx, d);
        let n = 4 * d;
        let unit = |j: usize| VecE {
            shift: 0,
            entries: (0..n).map(|i| if i == j { ctx.one() } else { ctx.zero() }).collect(),
        };
        let y_basis: Vec<VecE> = (1..=d).flat_map(|i| [unit(HermSpace::e(i)), unit(HermSpace::f(i))]).collect();
        let x_basis: Vec<VecE> = y_basis.iter().map(|v| g0.apply(v)).collect();
        let y = quotient_with_basis(&l, &l_dual.scale(1), &space, y_basis)?;
        let x = quotient_with_basis(&l_dual, &l, &space, x_basis)?;
        Ok(LatticeSetup { ctx: nominal, work: ctx, d, space, l, l_dual, x, y, g0, g0_inv })
    }

    /// Whether `g` preserves the form and `g·L = L`.
    pub fn in_stabilizer(&self, g: &MatE) -> Result<bool> {
        Ok(self.space.preserves_form(g)? && self.l.apply(g)? == self.l)
    }

    /// The actions of `g ∈ U(L)` on `L^∨/L` and on `L/ϖL^∨`.
    pub fn reduction_pair(&self, g: &MatE) -> Result<(FqMatrix, FqMatrix)> {
        if !self.space.preserves_form(g)? {
            return Err(Error::NotInStabilizer("matrix does not preserve the form".into()));
        }
        if self.l.apply(g)? != self.l {
            return Err(Error::NotInStabilizer("g·L ≠ L".into()));
        }
        Ok((action_on(&self.x, g)?, action_on(&self.y, g)?))
    }

    /// `g₀ g g₀^{-1}`.
    pub fn conjugate_by_g0(&self, g: &MatE) -> Result<MatE> {
        self.g0.mul(g).mul(&self.g0_inv).normalize()
    }
}

fn action_on(q: &QuotientSpace, g: &MatE) -> Result<FqMatrix> {
    let n = q.dim();
    let mut entries = vec![0u8; n * n];
    for (j, b) in q.basis.iter().enumerate() {
        let coords = q.reduce(&g.apply(b))?;
        for (i, &c) in coords.iter().enumerate() {
            entries[i * n + j] = c;
        }
    }
    Ok(FqMatrix::new(q.field.clone(), n, entries))
}

/// Some unit `u` with `u·ū^{-1} = t`, found by scanning residues and then
/// lifting one digit at a time.
pub fn hilbert90_lift(t: &UnramElem) -> Result<UnramElem> {
    let ctx = t.ctx;
    if t.norm() != 1 % ctx.modulus {
        return Err(Error::NotNormOne);
    }
    let base = ctx.with_precision(1)?;
    let t1 = t.truncate(base);
    let mut u = base.elements().find(|u| u.is_unit() && *u == t1.mul(&u.conj())).ok_or(Error::NotNormOne)?.embed(ctx);
    for k in 1..ctx.prec {
        let e = t.mul(&u.conj()).sub(&u);
        if e.is_zero() {
            break;
        }
        // c = (t ū − u)/p^k mod p; solve w − t w̄ ≡ c
        let c = e.div_pow_lift(k).truncate(base);
        let w = base.elements().find(|w| w.sub(&t1.mul(&w.conj())) == c).ok_or(Error::NotNormOne)?;
        u = u.add(&w.embed(ctx).mul_pow(k));
    }
    debug_assert_eq!(u.sub(&t.mul(&u.conj())), ctx.zero());
    Ok(u)
}

/// `E_1 = ker(N: (R_E/p^N)^× → (Z/p^N)^×)` as an abelian group.
#[derive(Clone, Debug)]
pub struct E1Group {
    pub ctx: PadicCtx,
    pub elements: Vec<UnramElem>,
    pub group: FiniteGroup,
}

pub fn e1_group(ctx: PadicCtx) -> Result<E1Group> {
    let one = 1 % ctx.modulus;
    let mut elements: Vec<UnramElem> = ctx.elements().filter(|e| e.is_unit() && e.norm() == one).collect();
    let pos = elements.iter().position(|e| *e == ctx.one()).expect("1 has norm 1");
    elements.swap(0, pos);
    let index: HashMap<UnramElem, usize> = elements.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let table: Vec<Vec<usize>> = elements.iter().map(|a| elements.iter().map(|b| index[&a.mul(b)]).collect()).collect();
    let group = FiniteGroup::from_table(&format!("E1(p={},N={})", ctx.p, ctx.prec), table)?;
    Ok(E1Group { ctx, elements, group })
}

/// `E_1 / (E_1)^r`.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct E1Quotient {
    pub r: u64,
    pub order: usize,
    pub cyclic: bool,
    pub invariants: Vec<u64>,
}

pub fn e1_mod_rth_powers(e1: &E1Group, r: u64) -> Result<E1Quotient> {
    let g = &e1.group;
    let powers: Vec<usize> = g.elements().map(|x| g.pow(x, r)).collect();
    let sub = g.subgroup_from_members(&powers)?;
    let (q, _) = g.quotient(&sub)?;
    let invariants = q.abelian_invariants().expect("quotient of an abelian group");
    Ok(E1Quotient { r, order: q.order(), cyclic: invariants.len() <= 1, invariants })
}

/// Whether the norm maps units of `R_E/p^N` onto units of `Z/p^N`.
pub fn norm_surjective_on_units(ctx: PadicCtx) -> bool {
    let mut hit = vec![false; ctx.modulus as usize];
    for e in ctx.elements().filter(|e| e.is_unit()) {
        hit[e.norm() as usize] = true;
    }
    (0..ctx.modulus).filter(|&a| a % ctx.p != 0).all(|a| hit[a as usize])
}

/// Whether `a = unit·ϖ^{valuation}` is the similitude factor of some
/// `g ∈ GU(r)`, i.e. whether `a^r` is a norm from `E^×`.
pub fn is_similitude_scalar(_unit: u64, valuation: i64, r: u64) -> bool {
    (r as i64 * valuation).rem_euclid(2) == 0
}

/// Order of `Im(similitude) / N(E^×)`, from the valuation classes of `k^×`
/// modulo norms (units are norms, which is checked exhaustively).
pub fn similitude_quotient_order(ctx: PadicCtx, r: u64) -> Result<u32> {
    if !norm_surjective_on_units(ctx) {
        return Err(Error::HypothesisFailed("norm is not onto units".into()));
    }
    // k^×/N(E^×) is represented by ϖ^0 and ϖ^1
    Ok((0..2).filter(|&v| is_similitude_scalar(1, v, r)).count() as u32)
}

/// Elements of `U(L)` used to test the swap diagram.
pub fn structured_test_set(setup: &LatticeSetup, random_products: usize, seed: u64) -> Result<Vec<MatE>> {
    use rand::SeedableRng;
    let ctx = setup.work;
    let d = setup.d;
    let n = 4 * d;
    let (e, f) = (HermSpace::e, HermSpace::f);
    let id = MatE::identity(ctx, n);
    let mut set = vec![id.clone()];
    let units = [ctx.elem(1, 1), ctx.elem(0, 1), ctx.elem(-1, 0)];
    // torus elements diag(u, ū^{-1}) on each hyperbolic pair
    for i in 1..=2 * d {
        for u in units.iter().filter(|u| u.is_unit()) {
            let u = *u;
            let mut g = id.clone();
            g.set(e(i), e(i), u);
            g.set(f(i), f(i), u.conj().inv()?);
            set.push(g);
        }
    }
    let trace_zero: Vec<UnramElem> =
        ctx.elements().filter(|z| !z.is_zero() && z.add(&z.conj()).is_zero()).take(2).collect();
    for i in 1..=2 * d {
        let outer = i > d;
        // swaps
        let mut g = MatE::diagonal(ctx, &vec![ctx.zero(); n]);
        for j in 0..n {
            if j != e(i) && j != f(i) {
                g.set(j, j, ctx.one());
            }
        }
        if outer {
            // e ↦ ϖ^{-1} f, f ↦ ϖ e, scaled by ϖ overall
            g.shift = 1;
            for j in 0..n {
                if j != e(i) && j != f(i) {
                    g.set(j, j, ctx.pi_pow(1));
                }
            }
            g.set(f(i), e(i), ctx.one());
            g.set(e(i), f(i), ctx.pi_pow(2));
        } else {
            g.set(f(i), e(i), ctx.one());
            g.set(e(i), f(i), ctx.one());
        }
        set.push(g);
        // unipotents with trace-zero entries
        for z in &trace_zero {
            let mut up = id.clone();
            let zz = if outer { z.mul_pow(1) } else { *z };
            up.set(e(i), f(i), zz);
            set.push(up);
            let mut low = id.clone();
            low.set(f(i), e(i), *z);
            set.push(low);
            if outer {
                // e ↦ e + ϖ^{-1} z f
                let mut g = MatE::identity(ctx, n);
                g.entries.iter_mut().for_each(|x| *x = x.mul_pow(1));
                g.shift = 1;
                g.set(f(i), e(i), *z);
                set.push(g);
            }
        }
    }
    // cross unipotents: e_j ↦ e_j + a e_i, f_i ↦ f_i − ā f_j
    let a = ctx.elem(1, 1);
    for i in 1..=2 * d {
        for j in 1..=2 * d {
            if i == j {
                continue;
            }
            let a = if j <= d && i > d { a.mul_pow(1) } else { a };
            let mut g = id.clone();
            g.set(e(i), e(j), a);
            g.set(f(j), f(i), a.conj().neg());
            set.push(g);
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let gens = set.clone();
    for _ in 0..random_products {
        let mut g = id.clone();
        for _ in 0..3 {
            g = g.mul(&gens[rng.gen_range(0..gens.len())]).normalize()?;
        }
        set.push(g);
    }
    Ok(set)
}

/// Outcome of the swap-diagram check.
#[derive(Clone, Debug, Serialize)]
pub struct SwapReport {
    pub checked: usize,
    pub failures: Vec<usize>,
    pub reductions_unitary: bool,
}

impl SwapReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty() && self.reductions_unitary && self.checked > 0
    }
}

/// Checks `red(g₀ g g₀^{-1}) = j(red(g))` with `j(x, y) = (y, x)`.
pub fn verify_swap_diagram(setup: &LatticeSetup, tests: &[MatE]) -> Result<SwapReport> {
    let mut failures = Vec::new();
    let mut unitary = true;
    let qx = setup.ctx.p;
    let is_unitary = |m: &FqMatrix, gram: &FqMatrix| m.map_pow(qx).transpose().mul(gram).mul(m) == *gram;
    for (idx, g) in tests.iter().enumerate() {
        let (x, y) = setup.reduction_pair(g)?;
        unitary &= is_unitary(&x, &setup.x.gram) && is_unitary(&y, &setup.y.gram);
        let h = setup.conjugate_by_g0(g)?;
        let (x2, y2) = setup.reduction_pair(&h)?;
        if x2 != y || y2 != x {
            failures.push(idx);
        }
    }
    Ok(SwapReport { checked: tests.len(), failures, reductions_unitary: unitary })
}

/// Checks on `g₀`: similitude `ϖ^{-1}`, `g₀L = L^∨`, `g₀²L = ϖ^{-1}L`.
pub fn verify_g0(setup: &LatticeSetup) -> Result<CheckReport> {
    let g0 = &setup.g0;
    let simil = setup.space.similitude_exponent(g0);
    let maps = setup.l.apply(g0)? == setup.l_dual;
    let square = setup.l.apply(&g0.mul(g0))? == setup.l.scale(-1);
    let inverse = g0.mul(&setup.g0_inv).equals(&MatE::identity(setup.work, 4 * setup.d))?;
    Ok(CheckReport::new(
        "g0",
        json!({"d": setup.d, "p": setup.ctx.p, "prec": setup.ctx.prec}),
        simil == Some(1) && maps && square && inverse,
        json!({
            "similitude_exponent": simil.map(|s| -s),
            "g0_L_equals_dual": maps,
            "g0_squared_L_equals_scaled": square,
            "inverse_ok": inverse,
        }),
    ))
}

/// Every `t ∈ E_1` at the context's precision is `det` of a torus element of
/// `U(L)` built from a Hilbert-90 lift.
pub fn det_surjectivity(setup: &LatticeSetup) -> Result<CheckReport> {
    let ctx = setup.ctx;
    let e1 = e1_group(ctx)?;
    let n = 4 * setup.d;
    let mut missing = Vec::new();
    for t in &e1.elements {
        let u = hilbert90_lift(t)?;
        let w = u.embed(setup.work);
        let mut g = MatE::identity(setup.work, n);
        g.set(0, 0, w);
        g.set(1, 1, w.conj().inv()?);
        let det = w.mul(&w.conj().inv()?).truncate(ctx);
        if det != *t || !setup.in_stabilizer(&g)? {
            missing.push(t.to_string());
        }
    }
    Ok(CheckReport::new(
        "det_surjective",
        json!({"p": ctx.p, "prec": ctx.prec, "d": setup.d}),
        missing.is_empty(),
        json!({"e1_order": e1.elements.len(), "missing": missing}),
    ))
}

/// All lattice identities for one `(p, N, d)`.
pub fn lattice_report(p: u64, prec: u32, d: usize) -> Result<Vec<CheckReport>> {
    let ctx = PadicCtx::new(p, prec)?;
    let setup = LatticeSetup::new(ctx, d)?;
    let params = json!({"p": p, "prec": prec, "d": d});
    let chain = setup.l.contains(&setup.l_dual.scale(1))? && setup.l_dual.contains(&setup.l)?;
    let involution = setup.l_dual.dual(&setup.space)? == setup.l;
    let q = (p * p) as u128;
    let index = q.pow((setup.l.volume() - setup.l_dual.volume()) as u32);
    let quotients = setup.x.dim() == 2 * d
        && setup.y.dim() == 2 * d
        && setup.x.is_nondegenerate_hermitian()
        && setup.y.is_nondegenerate_hermitian();
    let tests = structured_test_set(&setup, 12, 7)?;
    let swap = verify_swap_diagram(&setup, &tests)?;
    let det = det_surjectivity(&LatticeSetup::new(ctx.with_precision(2)?, d)?)?;
    Ok(vec![
        CheckReport::new("chain", params.clone(), chain, json!({"index_dual_over_L": index.to_string()})),
        CheckReport::new("dual_involution", params.clone(), involution, json!(null)),
        CheckReport::new(
            "quotients",
            params.clone(),
            quotients,
            json!({"dim_dual_mod_L": setup.x.dim(), "dim_L_mod_pi_dual": setup.y.dim()}),
        ),
        verify_g0(&setup)?,
        CheckReport::new("swap_diagram", params.clone(), swap.pass(), serde_json::to_value(&swap)?),
        det,
    ])
}

/// Order, cyclicity and parity checks on `E_1` for one `(p, N)`.
pub fn e1_report(p: u64, prec: u32) -> Result<Vec<CheckReport>> {
    let ctx = PadicCtx::new(p, prec)?;
    let e1 = e1_group(ctx)?;
    let expected = (p + 1) * p.pow(prec - 1);
    let mut out = vec![CheckReport::new(
        "e1_order",
        json!({"p": p, "prec": prec}),
        e1.elements.len() as u64 == expected,
        json!({"order": e1.elements.len(), "expected": expected}),
    )];
    // E_1/(E_1)^r depends only on gcd(r, |E_1|)
    let n = e1.elements.len() as u64;
    let mut quotients = Vec::new();
    let mut ok = true;
    for r in (1..=n).filter(|r| n.is_multiple_of(*r) && (r % p != 0 || *r == p)) {
        let q = e1_mod_rth_powers(&e1, r)?;
        ok &= q.cyclic;
        quotients.push(q);
    }
    out.push(CheckReport::new("e1_mod_r_cyclic", json!({"p": p, "prec": prec}), ok, serde_json::to_value(&quotients)?));
    let parity: Vec<(u64, u32)> =
        (1..=6).map(|r| Ok((r, similitude_quotient_order(ctx, r)?))).collect::<Result<_>>()?;
    let parity_ok = parity.iter().all(|&(r, o)| o == if r % 2 == 0 { 2 } else { 1 });
    out.push(CheckReport::new("similitude_parity", json!({"p": p, "prec": prec}), parity_ok, json!(parity)));
    Ok(out)
}
