//! Exact arithmetic in cyclotomic fields `Q(ζ_n)`.
//!
//! A [`CycNum`] is stored in the power basis `1, ζ_n, …, ζ_n^{φ(n)-1}` of the
//! smallest cyclotomic field containing it, with arbitrary-precision rational
//! coefficients. Since the representation is canonical, equality and hashing
//! are structural.
//!
//! Bulk character computations work with integral coefficient vectors at a
//! fixed conductor through [`CycloRing`], which avoids the rational overhead
//! in inner loops.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Per-conductor tables: the cyclotomic polynomial and the power-basis
/// expansion of every `ζ_n^e`.
#[derive(Debug)]
pub struct CycloData {
    n: u32,
    phi: usize,
    reps: Vec<Vec<i64>>,
}

impl CycloData {
    fn build(n: u32) -> Self {
        let poly = cyclotomic_poly(n);
        let phi = poly.len() - 1;
        let mut reps = Vec::with_capacity(n as usize);
        let mut cur = vec![0i64; phi];
        if phi > 0 {
            cur[0] = 1;
        }
        for _ in 0..n {
            reps.push(cur.clone());
            // multiply by x and reduce by the monic Φ_n
            let top = cur[phi - 1];
            for i in (1..phi).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for i in 0..phi {
                    cur[i] -= top * poly[i];
                }
            }
        }
        CycloData { n, phi, reps }
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn phi(&self) -> usize {
        self.phi
    }

    /// Power-basis coordinates of `ζ_n^e`.
    pub fn rep(&self, e: i64) -> &[i64] {
        &self.reps[e.rem_euclid(self.n as i64) as usize]
    }
}

fn data_cache() -> &'static RwLock<HashMap<u32, Arc<CycloData>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<CycloData>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Shared tables for conductor `n`.
pub fn cyclo_data(n: u32) -> Arc<CycloData> {
    assert!(n >= 1, "conductor must be positive");
    if let Some(d) = data_cache().read().unwrap().get(&n) {
        return d.clone();
    }
    let d = Arc::new(CycloData::build(n));
    data_cache().write().unwrap().entry(n).or_insert_with(|| d.clone()).clone()
}

/// Integer coefficients of the n-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_poly(n: u32) -> Vec<i64> {
    // x^n - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = poly_div_exact(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let qlen = num.len() - dn;
    let mut quo = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        quo[i] = c;
        for j in 0..=dn {
            rem[i + j] -= c * den[j];
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quo
}

pub fn euler_phi(n: u32) -> u32 {
    let mut m = n;
    let mut res = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            res -= res / p;
        }
        p += 1;
    }
    if m > 1 {
        res -= res / m;
    }
    res
}

fn prime_divisors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Left inverse of the embedding `Q(ζ_m) → Q(ζ_n)` in power bases.
struct Projection {
    /// φ(m) × φ(n)
    left_inverse: Vec<Vec<BigRational>>,
    /// φ(n) × φ(m) integer embedding matrix
    embed: Vec<Vec<i64>>,
}

fn projection(n: u32, m: u32) -> Arc<Projection> {
    static CACHE: OnceLock<RwLock<HashMap<(u32, u32), Arc<Projection>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(p) = cache.read().unwrap().get(&(n, m)) {
        return p.clone();
    }
    let dn = cyclo_data(n);
    let pm = euler_phi(m) as usize;
    let step = (n / m) as i64;
    let mut embed = vec![vec![0i64; pm]; dn.phi];
    for j in 0..pm {
        let col = dn.rep(j as i64 * step);
        for i in 0..dn.phi {
            embed[i][j] = col[i];
        }
    }
    // pick φ(m) independent rows by elimination on the transpose, then invert
    let mut rows = Vec::new();
    {
        let mut basis: Vec<Vec<BigRational>> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        for (i, row) in embed.iter().enumerate() {
            let mut v: Vec<BigRational> = row.iter().map(|&x| BigRational::from_integer(x.into())).collect();
            for (b, &pc) in basis.iter().zip(&pivots) {
                if !v[pc].is_zero() {
                    let f = v[pc].clone() / b[pc].clone();
                    for k in 0..pm {
                        let t = f.clone() * b[k].clone();
                        v[k] -= t;
                    }
                }
            }
            if let Some(pc) = v.iter().position(|x| !x.is_zero()) {
                basis.push(v);
                pivots.push(pc);
                rows.push(i);
                if rows.len() == pm {
                    break;
                }
            }
        }
    }
    let sub: Vec<Vec<BigRational>> =
        rows.iter().map(|&i| embed[i].iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
    let inv = invert_rational(&sub).expect("embedding has full column rank");
    let mut left_inverse = vec![vec![BigRational::zero(); dn.phi]; pm];
    for j in 0..pm {
        for (k, &r) in rows.iter().enumerate() {
            left_inverse[j][r] = inv[j][k].clone();
        }
    }
    let p = Arc::new(Projection { left_inverse, embed });
    cache.write().unwrap().insert((n, m), p.clone());
    p
}

fn invert_rational(a: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x *= inv.clone();
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for k in 0..2 * n {
                    let t = f.clone() * m[col][k].clone();
                    m[r][k] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn lcm(a: u32, b: u32) -> u32 {
    a / a.gcd(&b) * b
}

/// An exact element of a cyclotomic field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNum {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl CycNum {
    pub fn zero() -> Self {
        CycNum { order: 1, coeffs: vec![BigRational::zero()] }
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(k: i64) -> Self {
        CycNum { order: 1, coeffs: vec![BigRational::from_integer(k.into())] }
    }

    pub fn from_rational(r: BigRational) -> Self {
        CycNum { order: 1, coeffs: vec![r] }
    }

    pub fn from_fraction(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    /// `ζ_n^k`.
    pub fn root_of_unity(n: u32, k: i64) -> Self {
        let d = cyclo_data(n);
        let coeffs = d.rep(k).iter().map(|&x| BigRational::from_integer(x.into())).collect();
        CycNum::canonical(n, coeffs)
    }

    /// A primitive n-th root of unity.
    pub fn zeta(n: u32) -> Self {
        Self::root_of_unity(n, 1)
    }

    /// Builds `Σ c_e ζ_n^e` from arbitrary exponents in `[0, n)`.
    pub fn from_exponents<I>(n: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        let d = cyclo_data(n);
        let mut coeffs = vec![BigRational::zero(); d.phi];
        for (e, c) in terms {
            for (slot, &r) in coeffs.iter_mut().zip(d.rep(e)) {
                if r != 0 {
                    *slot += c.clone() * BigRational::from_integer(r.into());
                }
            }
        }
        CycNum::canonical(n, coeffs)
    }

    /// Element of `Q(ζ_n)` from an integral power-basis vector divided by `denom`.
    pub fn from_integral(n: u32, coeffs: &[i128], denom: i128) -> Self {
        let den = BigInt::from(denom);
        let v = coeffs.iter().map(|&c| BigRational::new(BigInt::from(c), den.clone())).collect();
        CycNum::canonical(n, v)
    }

    /// The conductor of the smallest cyclotomic field holding this value.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Power-basis coefficients at the canonical conductor.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.order == 1 && self.coeffs[0].is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.order == 1
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    /// The value as an `i64` when it is a rational integer.
    pub fn to_integer(&self) -> Option<i64> {
        let r = self.to_rational()?;
        if r.is_integer() {
            r.to_integer().to_i64()
        } else {
            None
        }
    }

    fn canonical(n: u32, mut coeffs: Vec<BigRational>) -> Self {
        let mut n = n;
        loop {
            if coeffs.iter().skip(1).all(|c| c.is_zero()) {
                let c0 = coeffs.into_iter().next().unwrap_or_else(BigRational::zero);
                return CycNum { order: 1, coeffs: vec![c0] };
            }
            let mut descended = false;
            for p in prime_divisors(n) {
                let m = n / p;
                if let Some(sub) = try_descend(n, m, &coeffs) {
                    coeffs = sub;
                    n = m;
                    descended = true;
                    break;
                }
            }
            if !descended {
                return CycNum { order: n, coeffs };
            }
        }
    }

    /// Power-basis coordinates after embedding into `Q(ζ_l)`; `l` must be a
    /// multiple of the conductor.
    pub fn coeffs_at(&self, l: u32) -> Vec<BigRational> {
        assert!(l.is_multiple_of(self.order), "conductor {} does not divide {}", self.order, l);
        let d = cyclo_data(l);
        let step = (l / self.order) as i64;
        let mut out = vec![BigRational::zero(); d.phi];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (slot, &r) in out.iter_mut().zip(d.rep(j as i64 * step)) {
                if r != 0 {
                    *slot += c.clone() * BigRational::from_integer(r.into());
                }
            }
        }
        out
    }

    /// Integral coordinates in `Q(ζ_l)`, or `None` if some coefficient is not
    /// an integer.
    pub fn integral_coeffs_at(&self, l: u32) -> Option<Vec<i64>> {
        self.coeffs_at(l).into_iter().map(|c| if c.is_integer() { c.to_integer().to_i64() } else { None }).collect()
    }

    fn binary<F>(&self, other: &Self, f: F) -> Self
    where
        F: FnOnce(u32, Vec<BigRational>, Vec<BigRational>) -> Vec<BigRational>,
    {
        let l = lcm(self.order, other.order);
        let a = self.coeffs_at(l);
        let b = other.coeffs_at(l);
        CycNum::canonical(l, f(l, a, b))
    }

    pub fn conj(&self) -> Self {
        if self.order == 1 {
            return self.clone();
        }
        let n = self.order;
        CycNum::from_exponents(n, self.coeffs.iter().enumerate().map(|(j, c)| (-(j as i64), c.clone())))
    }

    /// The Galois automorphism `ζ ↦ ζ^k` for `k` coprime to the conductor.
    pub fn galois(&self, k: i64) -> Self {
        let n = self.order;
        CycNum::from_exponents(n, self.coeffs.iter().enumerate().map(|(j, c)| (j as i64 * k, c.clone())))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.order == 1 {
            return Ok(CycNum::from_rational(self.coeffs[0].recip()));
        }
        // columns of the multiplication-by-self matrix are self·ζ^j
        let n = self.order;
        let d = cyclo_data(n);
        let cols: Vec<Vec<BigRational>> =
            (0..d.phi).map(|j| (self * &CycNum::root_of_unity(n, j as i64)).coeffs_at(n)).collect();
        let mat: Vec<Vec<BigRational>> = (0..d.phi).map(|i| (0..d.phi).map(|j| cols[j][i].clone()).collect()).collect();
        let inv = invert_rational(&mat).ok_or(Error::DivisionByZero)?;
        let coeffs = (0..d.phi).map(|i| inv[i][0].clone()).collect();
        Ok(CycNum::canonical(n, coeffs))
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = CycNum::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        CycNum::canonical(self.order, self.coeffs.iter().map(|c| c * r).collect())
    }

    /// Complex approximation, for display only.
    pub fn to_complex(&self) -> (f64, f64) {
        let n = self.order as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, c) in self.coeffs.iter().enumerate() {
            let v = c.to_f64().unwrap_or(f64::NAN);
            let ang = 2.0 * std::f64::consts::PI * j as f64 / n;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        (re, im)
    }
}

/// Tests whether a `Q(ζ_n)` element lies in `Q(ζ_m)`; returns its coordinates
/// there if so.
fn try_descend(n: u32, m: u32, coeffs: &[BigRational]) -> Option<Vec<BigRational>> {
    let proj = projection(n, m);
    let sub: Vec<BigRational> = proj
        .left_inverse
        .iter()
        .map(|row| {
            row.iter()
                .zip(coeffs)
                .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
        })
        .collect();
    for (i, row) in proj.embed.iter().enumerate() {
        let mut v = BigRational::zero();
        for (j, &e) in row.iter().enumerate() {
            if e != 0 && !sub[j].is_zero() {
                v += sub[j].clone() * BigRational::from_integer(e.into());
            }
        }
        if v != coeffs[i] {
            return None;
        }
    }
    Some(sub)
}

impl Default for CycNum {
    fn default() -> Self {
        CycNum::zero()
    }
}

impl Ord for CycNum {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order.cmp(&other.order).then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for CycNum {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn add(self, other: &CycNum) -> CycNum {
        self.binary(other, |_, a, b| a.into_iter().zip(b).map(|(x, y)| x + y).collect())
    }
}

impl<'a> Sub<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn sub(self, other: &CycNum) -> CycNum {
        self.binary(other, |_, a, b| a.into_iter().zip(b).map(|(x, y)| x - y).collect())
    }
}

impl<'a> Mul<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn mul(self, other: &CycNum) -> CycNum {
        self.binary(other, |l, a, b| {
            let d = cyclo_data(l);
            let mut full = vec![BigRational::zero(); l as usize];
            for (i, x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in b.iter().enumerate() {
                    if !y.is_zero() {
                        full[(i + j) % l as usize] += x * y;
                    }
                }
            }
            let mut out = vec![BigRational::zero(); d.phi];
            for (e, c) in full.into_iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (slot, &r) in out.iter_mut().zip(d.rep(e as i64)) {
                    if r != 0 {
                        *slot += c.clone() * BigRational::from_integer(r.into());
                    }
                }
            }
            out
        })
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycNum> for CycNum {
            type Output = CycNum;
            fn $m(self, other: CycNum) -> CycNum {
                (&self).$m(&other)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            let sign = match (first, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let body = match j {
                0 => fmt_rational(&abs),
                _ => {
                    let z = if j == 1 { format!("z{}", self.order) } else { format!("z{}^{}", self.order, j) };
                    if abs.is_one() {
                        z
                    } else {
                        format!("{}*{}", fmt_rational(&abs), z)
                    }
                }
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct CycNumJson {
    order: u32,
    coeffs: Vec<(i64, String)>,
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycNumJson {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| (e as i64, fmt_rational(c)))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = CycNumJson::deserialize(d)?;
        if j.order == 0 {
            return Err(D::Error::custom("order must be positive"));
        }
        let mut terms = Vec::with_capacity(j.coeffs.len());
        for (e, c) in j.coeffs {
            if e < 0 || e >= j.order as i64 {
                return Err(D::Error::custom(format!("exponent {e} outside [0, {})", j.order)));
            }
            terms.push((e, parse_rational(&c).map_err(D::Error::custom)?));
        }
        Ok(CycNum::from_exponents(j.order, terms))
    }
}

/// Integral arithmetic in `Z[ζ_l]` on power-basis vectors.
#[derive(Clone, Debug)]
pub struct CycloRing {
    data: Arc<CycloData>,
}

impl CycloRing {
    pub fn new(l: u32) -> Self {
        CycloRing { data: cyclo_data(l) }
    }

    pub fn conductor(&self) -> u32 {
        self.data.n
    }

    pub fn dim(&self) -> usize {
        self.data.phi
    }

    pub fn root(&self, k: i64) -> Vec<i64> {
        self.data.rep(k).to_vec()
    }

    pub fn mul(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let l = self.data.n as usize;
        let mut full = vec![0i64; l];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y != 0 {
                    full[(i + j) % l] += x * y;
                }
            }
        }
        self.reduce(&full)
    }

    pub fn conj(&self, a: &[i64]) -> Vec<i64> {
        let l = self.data.n as usize;
        let mut full = vec![0i64; l];
        for (i, &x) in a.iter().enumerate() {
            full[(l - i) % l] += x;
        }
        self.reduce(&full)
    }

    /// Collapses a vector indexed by all exponents `0..l` onto the power basis.
    pub fn reduce(&self, full: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.data.phi];
        for (e, &c) in full.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (slot, &r) in out.iter_mut().zip(self.data.rep(e as i64)) {
                *slot += c * r;
            }
        }
        out
    }

    /// `Σ_k w_k · a_k · conj(b_k)` accumulated in wide integers.
    pub fn weighted_hermitian_sum<'a, I>(&self, terms: I) -> Vec<i128>
    where
        I: IntoIterator<Item = (i64, &'a [i64], &'a [i64])>,
    {
        let l = self.data.n as usize;
        let mut full = vec![0i128; l];
        for (w, a, b) in terms {
            for (i, &x) in a.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in b.iter().enumerate() {
                    if y != 0 {
                        full[(i + l - j) % l] += (w as i128) * (x as i128) * (y as i128);
                    }
                }
            }
        }
        let mut out = vec![0i128; self.data.phi];
        for (e, &c) in full.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (slot, &r) in out.iter_mut().zip(self.data.rep(e as i64)) {
                *slot += c * r as i128;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_basics() {
        assert_eq!(CycNum::zeta(1), CycNum::one());
        assert_eq!(CycNum::zeta(4).pow(2), CycNum::from_integer(-1));
        assert_eq!(&CycNum::zeta(3) + &CycNum::zeta(3).pow(2), CycNum::from_integer(-1));
        assert_eq!(CycNum::zeta(2), CycNum::from_integer(-1));
    }

    #[test]
    fn zeta_is_primitive() {
        for n in 1..=24u32 {
            let z = CycNum::zeta(n);
            assert_eq!(z.pow(n as u64), CycNum::one());
            for m in 1..n {
                assert_ne!(z.pow(m as u64), CycNum::one(), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn products_and_inverses() {
        let z8 = CycNum::zeta(8);
        assert_eq!(&z8 * &z8.pow(3), CycNum::from_integer(-1));
        let z5 = CycNum::zeta(5);
        assert_eq!(z5.inv().unwrap(), z5.pow(4));
        assert!(matches!(CycNum::zero().inv(), Err(Error::DivisionByZero)));
        let a = &CycNum::from_integer(2) + &CycNum::zeta(7);
        assert_eq!(&a * &a.inv().unwrap(), CycNum::one());
    }

    #[test]
    fn conjugation() {
        assert_eq!(CycNum::zeta(4).conj(), -CycNum::zeta(4));
        let half = CycNum::from_fraction(3, 2);
        assert_eq!(half.conj(), half);
        let z7 = CycNum::zeta(7);
        let a = &z7 + &z7.pow(2);
        assert_eq!(a.conj(), &z7.pow(6) + &z7.pow(5));
    }

    #[test]
    fn conductor_is_minimal() {
        // ζ_12^4 = ζ_3
        assert_eq!(CycNum::root_of_unity(12, 4), CycNum::zeta(3));
        assert_eq!(CycNum::root_of_unity(12, 4).order(), 3);
        // ζ_8 + ζ_8^7 = √2 lives in Q(ζ_8) and nowhere smaller
        let s = &CycNum::zeta(8) + &CycNum::root_of_unity(8, 7);
        assert_eq!(s.order(), 8);
        assert_eq!(&s * &s, CycNum::from_integer(2));
        // ζ_6 lives in Q(ζ_3)
        assert_eq!(CycNum::zeta(6).order(), 3);
        // √-3 = ζ_3 - ζ_3^2
        let r = &CycNum::zeta(3) - &CycNum::zeta(3).pow(2);
        assert_eq!(&r * &r, CycNum::from_integer(-3));
    }

    #[test]
    fn json_roundtrip_and_noncanonical_input() {
        let a = &CycNum::from_fraction(1, 3) + &CycNum::zeta(5).pow(2);
        let s = serde_json::to_string(&a).unwrap();
        let b: CycNum = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
        // ζ_4^2 given at a non-basis exponent reduces to -1
        let c: CycNum = serde_json::from_str(r#"{"order":4,"coeffs":[[2,"1"]]}"#).unwrap();
        assert_eq!(c, CycNum::from_integer(-1));
        assert!(serde_json::from_str::<CycNum>(r#"{"order":4,"coeffs":[[4,"1"]]}"#).is_err());
    }

    #[test]
    fn ring_helpers_agree_with_cycnum() {
        let ring = CycloRing::new(12);
        let a = ring.root(5);
        let b = ring.root(7);
        let prod = ring.mul(&a, &b);
        assert_eq!(CycNum::from_integral(12, &prod.iter().map(|&x| x as i128).collect::<Vec<_>>(), 1), CycNum::one());
        let c = ring.conj(&a);
        assert_eq!(
            CycNum::from_integral(12, &c.iter().map(|&x| x as i128).collect::<Vec<_>>(), 1),
            CycNum::root_of_unity(12, 7)
        );
    }

    #[test]
    fn display() {
        assert_eq!(CycNum::from_integer(-1).to_string(), "-1");
        assert_eq!(CycNum::zeta(4).to_string(), "z4");
        let (re, im) = CycNum::zeta(4).to_complex();
        assert!(re.abs() < 1e-12 && (im - 1.0).abs() < 1e-12);
    }
}
