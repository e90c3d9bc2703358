//! Small finite fields `F_{p^k}` with table arithmetic, and square matrices
//! over them.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// A finite field with at most 256 elements, realised as `F_p[x]/(f)`.
///
/// Elements are encoded as `Σ c_i p^i` where `c_i` is the coefficient of `x^i`.
#[derive(Clone)]
pub struct FiniteField {
    p: u32,
    degree: u32,
    modulus: Vec<u32>,
    size: u32,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    primitive: u8,
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn decode(mut e: u32, p: u32, k: u32) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let c = e % p;
            e /= p;
            c
        })
        .collect()
}

fn encode(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Remainder of `a` modulo monic `m` over F_p; both constant-term first.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let top = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if top != 0 {
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - (top * mi) % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    // trial division by every monic polynomial of degree 1..=deg/2
    for d in 1..=deg / 2 {
        for low in 0..p.pow(d as u32) {
            let mut g = decode(low, p, d as u32);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FiniteField {
    /// `F_{p^k}` with the smallest irreducible monic modulus, ordering
    /// candidates by their coefficient vectors read from the top.
    pub fn new(p: u32, degree: u32) -> Result<Self> {
        if !is_prime(p) || degree == 0 {
            return Err(Error::Unsupported(format!("F_{{{p}^{degree}}}")));
        }
        for low in 0..p.pow(degree) {
            let mut f = decode(low, p, degree);
            f.push(1);
            if is_irreducible(&f, p) {
                return Self::with_modulus(p, f);
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// `F_p[x]/(f)` for a given monic irreducible `f`, constant term first.
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self> {
        let degree = modulus.len() as u32 - 1;
        if !is_prime(p) || degree == 0 || *modulus.last().unwrap() != 1 {
            return Err(Error::Unsupported("modulus must be monic over a prime field".into()));
        }
        let size = p.pow(degree);
        if size > 256 {
            return Err(Error::Unsupported(format!("field of size {size} exceeds 256")));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::Unsupported("modulus is reducible".into()));
        }
        let s = size as usize;
        let mut add = vec![0u8; s * s];
        let mut mul = vec![0u8; s * s];
        for a in 0..size {
            let ca = decode(a, p, degree);
            for b in 0..size {
                let cb = decode(b, p, degree);
                let sum: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % p).collect();
                add[(a * size + b) as usize] = encode(&sum, p) as u8;
                let mut prod = vec![0u32; 2 * degree as usize - 1];
                for (i, x) in ca.iter().enumerate() {
                    for (j, y) in cb.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut r = poly_rem(&prod, &modulus, p);
                r.resize(degree as usize, 0);
                mul[(a * size + b) as usize] = encode(&r, p) as u8;
            }
        }
        let mut neg = vec![0u8; s];
        let mut inv = vec![0u8; s];
        for a in 0..size {
            for b in 0..size {
                if add[(a * size + b) as usize] == 0 {
                    neg[a as usize] = b as u8;
                }
                if mul[(a * size + b) as usize] == 1 {
                    inv[a as usize] = b as u8;
                }
            }
        }
        let mut field = FiniteField { p, degree, modulus, size, add, mul, neg, inv, primitive: 0 };
        field.primitive = (1..size)
            .map(|g| g as u8)
            .find(|&g| field.mult_order(g) == size - 1)
            .expect("multiplicative group is cyclic");
        Ok(field)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The generator of the multiplicative group used for discrete logs.
    pub fn primitive_element(&self) -> u8 {
        self.primitive
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        (0..self.size).map(|e| e as u8)
    }

    /// Embeds an element of the prime field.
    pub fn from_int(&self, k: i64) -> u8 {
        k.rem_euclid(self.p as i64) as u8
    }

    /// The element `Σ c_i x^i`.
    pub fn from_coeffs(&self, coeffs: &[u32]) -> u8 {
        let mut c: Vec<u32> = coeffs.iter().map(|&x| x % self.p).collect();
        c.resize(self.degree as usize, 0);
        encode(&c, self.p) as u8
    }

    pub fn coeffs(&self, a: u8) -> Vec<u32> {
        decode(a as u32, self.p, self.degree)
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.size as usize + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.size as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    pub fn inv(&self, a: u8) -> Result<u8> {
        if a == 0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.inv[a as usize])
        }
    }

    pub fn pow(&self, a: u8, mut k: u64) -> u8 {
        let mut base = a;
        let mut acc = 1u8;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn mult_order(&self, a: u8) -> u32 {
        assert!(a != 0);
        let mut x = a;
        let mut k = 1;
        while x != 1 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Discrete logarithm to the base of [`Self::primitive_element`].
    pub fn log(&self, a: u8) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let mut x = 1u8;
        for k in 0..self.size - 1 {
            if x == a {
                return Ok(k);
            }
            x = self.mul(x, self.primitive);
        }
        unreachable!("primitive element generates")
    }
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}[x]/({:?})", self.p, self.modulus)
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FiniteField {}

/// A square matrix over a [`FiniteField`], row-major.
#[derive(Clone)]
pub struct FqMatrix {
    field: Arc<FiniteField>,
    dim: usize,
    entries: Vec<u8>,
}

impl FqMatrix {
    pub fn new(field: Arc<FiniteField>, dim: usize, entries: Vec<u8>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        FqMatrix { field, dim, entries }
    }

    pub fn identity(field: Arc<FiniteField>, dim: usize) -> Self {
        let mut entries = vec![0u8; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        FqMatrix { field, dim, entries }
    }

    pub fn scalar(field: Arc<FiniteField>, dim: usize, s: u8) -> Self {
        let mut m = Self::identity(field, dim);
        for i in 0..dim {
            m.entries[i * dim + i] = s;
        }
        m
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn mul(&self, other: &FqMatrix) -> FqMatrix {
        let n = self.dim;
        let f = &self.field;
        let mut out = vec![0u8; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = other.entries[k * n + j];
                    if b != 0 {
                        out[i * n + j] = f.add(out[i * n + j], f.mul(a, b));
                    }
                }
            }
        }
        FqMatrix { field: self.field.clone(), dim: n, entries: out }
    }

    /// Applies `x ↦ x^e` entrywise (a Frobenius power when `e` is a power of p).
    pub fn map_pow(&self, e: u64) -> FqMatrix {
        FqMatrix {
            field: self.field.clone(),
            dim: self.dim,
            entries: self.entries.iter().map(|&x| self.field.pow(x, e)).collect(),
        }
    }

    pub fn transpose(&self) -> FqMatrix {
        let n = self.dim;
        let mut out = vec![0u8; n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.entries[i * n + j];
            }
        }
        FqMatrix { field: self.field.clone(), dim: n, entries: out }
    }

    pub fn det(&self) -> u8 {
        let f = &self.field;
        let n = self.dim;
        let mut m = self.entries.clone();
        let mut det = 1u8;
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| m[r * n + c] != 0) else {
                return 0;
            };
            if p != c {
                for j in 0..n {
                    m.swap(c * n + j, p * n + j);
                }
                det = f.neg(det);
            }
            let pv = m[c * n + c];
            det = f.mul(det, pv);
            let pinv = f.inv(pv).unwrap();
            for r in c + 1..n {
                let factor = f.mul(m[r * n + c], pinv);
                if factor == 0 {
                    continue;
                }
                for j in c..n {
                    m[r * n + j] = f.sub(m[r * n + j], f.mul(factor, m[c * n + j]));
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<FqMatrix> {
        let f = &self.field;
        let n = self.dim;
        let w = 2 * n;
        let mut m = vec![0u8; n * w];
        for i in 0..n {
            for j in 0..n {
                m[i * w + j] = self.entries[i * n + j];
            }
            m[i * w + n + i] = 1;
        }
        for c in 0..n {
            let p = (c..n).find(|&r| m[r * w + c] != 0).ok_or(Error::DivisionByZero)?;
            if p != c {
                for j in 0..w {
                    m.swap(c * w + j, p * w + j);
                }
            }
            let pinv = f.inv(m[c * w + c])?;
            for j in 0..w {
                m[c * w + j] = f.mul(m[c * w + j], pinv);
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let factor = m[r * w + c];
                if factor == 0 {
                    continue;
                }
                for j in 0..w {
                    m[r * w + j] = f.sub(m[r * w + j], f.mul(factor, m[c * w + j]));
                }
            }
        }
        let entries = (0..n).flat_map(|i| m[i * w + n..i * w + w].to_vec()).collect();
        Ok(FqMatrix { field: self.field.clone(), dim: n, entries })
    }

    pub fn is_identity(&self) -> bool {
        let n = self.dim;
        (0..n).all(|i| (0..n).all(|j| self.entries[i * n + j] == (i == j) as u8))
    }
}

impl PartialEq for FqMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.entries == other.entries
    }
}

impl Eq for FqMatrix {}

impl Hash for FqMatrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.dim.hash(state);
        self.entries.hash(state);
    }
}

impl fmt::Debug for FqMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[u8]> = self.entries.chunks(self.dim).collect();
        write!(f, "{rows:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f9_uses_x2_plus_1() {
        let f = FiniteField::new(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
        let i = f.from_coeffs(&[0, 1]);
        assert_eq!(f.mul(i, i), f.from_int(-1));
        assert_eq!(f.size(), 9);
    }

    #[test]
    fn frobenius_fixes_exactly_the_subfield() {
        for (p, k) in [(2, 2), (3, 2), (5, 2), (2, 4)] {
            let f = FiniteField::new(p, k).unwrap();
            let q = (p as u64).pow(k / 2);
            let fixed = f.elements().filter(|&x| f.pow(x, q) == x).count() as u64;
            assert_eq!(fixed, q);
            for x in f.elements() {
                assert_eq!(f.pow(f.pow(x, q), q), x);
            }
        }
    }

    #[test]
    fn field_axioms_f16() {
        let f = FiniteField::new(2, 4).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in f.elements() {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn matrix_inverse_and_det() {
        let f = Arc::new(FiniteField::new(5, 1).unwrap());
        let m = FqMatrix::new(f.clone(), 2, vec![1, 2, 3, 4]);
        assert_eq!(m.det(), f.from_int(-2));
        assert!(m.mul(&m.inverse().unwrap()).is_identity());
        let sing = FqMatrix::new(f, 2, vec![1, 2, 2, 4]);
        assert_eq!(sing.det(), 0);
        assert!(sing.inverse().is_err());
    }
}
