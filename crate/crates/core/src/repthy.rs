//! Exact character theory of enumerated finite groups.
//!
//! Character tables are computed with the Dixon–Schneider method: the class
//! sums act on the center of the group algebra, their simultaneous
//! eigenvectors over a prime field `F_ℓ` give the central characters, and
//! the resulting values are lifted to cyclotomic integers from the
//! eigenvalue multiplicities of each element.

use std::cmp::Ordering as CmpOrdering;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::cycnum::{CycNum, CycloRing};
use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupHom};

/// A complex-valued function on conjugacy classes.
#[derive(Clone)]
pub struct ClassFunction {
    group: FiniteGroup,
    values: Vec<CycNum>,
    /// Power-basis integer vectors at the group exponent, when every value is
    /// an algebraic integer of that field.
    integral: OnceLock<Option<Arc<Vec<Vec<i64>>>>>,
}

impl std::fmt::Debug for ClassFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.values.iter().map(|v| v.to_string())).finish()
    }
}

impl PartialEq for ClassFunction {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.values == other.values
    }
}

impl Eq for ClassFunction {}

impl ClassFunction {
    pub fn new(group: &FiniteGroup, values: Vec<CycNum>) -> Result<Self> {
        if values.len() != group.conjugacy_classes().len() {
            return Err(Error::GroupMismatch);
        }
        Ok(Self::raw(group, values))
    }

    fn raw(group: &FiniteGroup, values: Vec<CycNum>) -> Self {
        ClassFunction { group: group.clone(), values, integral: OnceLock::new() }
    }

    /// Builds the function from its value on each class index.
    pub fn from_fn<F: FnMut(usize) -> CycNum>(group: &FiniteGroup, f: F) -> Self {
        let r = group.conjugacy_classes().len();
        Self::raw(group, (0..r).map(f).collect())
    }

    pub fn trivial(group: &FiniteGroup) -> Self {
        Self::from_fn(group, |_| CycNum::one())
    }

    /// The character of the regular representation.
    pub fn regular(group: &FiniteGroup) -> Self {
        let n = group.order() as i64;
        Self::from_fn(group, |c| if c == 0 { CycNum::from_integer(n) } else { CycNum::zero() })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn values(&self) -> &[CycNum] {
        &self.values
    }

    pub fn value(&self, class: usize) -> &CycNum {
        &self.values[class]
    }

    /// Value at an element index.
    pub fn at(&self, x: usize) -> &CycNum {
        &self.values[self.group.conjugacy_classes().class_of(x)]
    }

    /// Value at the identity, when it is a positive integer.
    pub fn degree(&self) -> Option<u64> {
        self.values[0].to_integer().filter(|&d| d > 0).map(|d| d as u64)
    }

    pub fn conj(&self) -> Self {
        Self::raw(&self.group, self.values.iter().map(CycNum::conj).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_group(self, other)?;
        Ok(Self::raw(&self.group, self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect()))
    }

    pub fn scale(&self, k: i64) -> Self {
        let k = CycNum::from_integer(k);
        Self::raw(&self.group, self.values.iter().map(|a| a * &k).collect())
    }

    /// Whether every value is zero outside the given classes.
    pub fn vanishes_off(&self, allowed: &[bool]) -> bool {
        self.values.iter().zip(allowed).all(|(v, &ok)| ok || v.is_zero())
    }

    /// Classes on which `self` takes the value `self(1)`; for a character
    /// these make up its kernel.
    pub fn kernel_classes(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&c| self.values[c] == self.values[0]).collect()
    }

    fn integral(&self) -> Option<Arc<Vec<Vec<i64>>>> {
        self.integral
            .get_or_init(|| {
                let l = self.group.exponent() as u32;
                self.values
                    .iter()
                    .map(|v| if l.is_multiple_of(v.order()) { v.integral_coeffs_at(l) } else { None })
                    .collect::<Option<Vec<_>>>()
                    .map(Arc::new)
            })
            .clone()
    }
}

fn same_group(a: &ClassFunction, b: &ClassFunction) -> Result<()> {
    if a.group != b.group {
        return Err(Error::GroupMismatch);
    }
    Ok(())
}

/// `(1/|G|) Σ_g a(g)·conj(b(g))`.
pub fn inner_product(a: &ClassFunction, b: &ClassFunction) -> Result<CycNum> {
    same_group(a, b)?;
    let g = &a.group;
    let cc = g.conjugacy_classes();
    if let (Some(va), Some(vb)) = (a.integral(), b.integral()) {
        let ring = CycloRing::new(g.exponent() as u32);
        let sum =
            ring.weighted_hermitian_sum((0..cc.len()).map(|c| (cc.size(c) as i64, va[c].as_slice(), vb[c].as_slice())));
        return Ok(CycNum::from_integral(ring.conductor(), &sum, g.order() as i128));
    }
    let mut acc = CycNum::zero();
    for c in 0..cc.len() {
        let term = &a.values[c] * &b.values[c].conj();
        acc = &acc + &term.scale(&num_rational::BigRational::from_integer((cc.size(c) as i64).into()));
    }
    Ok(acc.scale(&num_rational::BigRational::new(1.into(), (g.order() as i64).into())))
}

/// Inner product that must be a rational integer.
pub fn inner_product_integer(a: &ClassFunction, b: &ClassFunction) -> Result<i64> {
    let v = inner_product(a, b)?;
    v.to_integer().ok_or_else(|| Error::NotACharacter(format!("inner product {v} is not an integer")))
}

/// Restriction along an injective homomorphism `H → G`.
pub fn restrict(chi: &ClassFunction, emb: &GroupHom) -> Result<ClassFunction> {
    if *emb.target() != chi.group {
        return Err(Error::GroupMismatch);
    }
    if !emb.is_injective() {
        return Err(Error::NotASubgroup);
    }
    pullback(emb, chi)
}

/// `χ ∘ f` for `χ` on the target of `f`.
pub fn pullback(f: &GroupHom, chi: &ClassFunction) -> Result<ClassFunction> {
    if *f.target() != chi.group {
        return Err(Error::GroupMismatch);
    }
    let h = f.source();
    let ch = h.conjugacy_classes();
    let cg = f.target().conjugacy_classes();
    Ok(ClassFunction::from_fn(h, |c| chi.values[cg.class_of(f.apply(ch.representative(c)))].clone()))
}

/// Induction along an injective homomorphism `H → G`.
pub fn induce(chi: &ClassFunction, emb: &GroupHom) -> Result<ClassFunction> {
    if *emb.source() != chi.group {
        return Err(Error::GroupMismatch);
    }
    if !emb.is_injective() {
        return Err(Error::NotASubgroup);
    }
    let (h, g) = (emb.source(), emb.target());
    let (ch, cg) = (h.conjugacy_classes(), g.conjugacy_classes());
    let mut contributors: Vec<Vec<usize>> = vec![Vec::new(); cg.len()];
    for c in 0..ch.len() {
        contributors[cg.class_of(emb.apply(ch.representative(c)))].push(c);
    }
    let (n_g, n_h) = (g.order() as i128, h.order() as i128);
    if let Some(v) = chi.integral() {
        let ring = CycloRing::new(h.exponent() as u32);
        let values = (0..cg.len())
            .map(|k| {
                let mut acc = vec![0i128; ring.dim()];
                for &c in &contributors[k] {
                    for (slot, &x) in acc.iter_mut().zip(&v[c]) {
                        *slot += ch.size(c) as i128 * x as i128;
                    }
                }
                for slot in acc.iter_mut() {
                    *slot *= n_g;
                }
                CycNum::from_integral(ring.conductor(), &acc, cg.size(k) as i128 * n_h)
            })
            .collect();
        return Ok(ClassFunction::raw(g, values));
    }
    let values = (0..cg.len())
        .map(|k| {
            let mut acc = CycNum::zero();
            for &c in &contributors[k] {
                acc = &acc + &chi.values[c].scale(&num_rational::BigRational::from_integer((ch.size(c) as i64).into()));
            }
            acc.scale(&num_rational::BigRational::new(n_g.into(), (cg.size(k) as i128 * n_h).into()))
        })
        .collect();
    Ok(ClassFunction::raw(g, values))
}

/// Pointwise product.
pub fn tensor(a: &ClassFunction, b: &ClassFunction) -> Result<ClassFunction> {
    same_group(a, b)?;
    Ok(ClassFunction::raw(&a.group, a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect()))
}

/// `x ↦ a(x₁)·b(x₂)` on a direct product (or a subgroup of one) whose
/// factors carry `a` and `b`.
pub fn outer_tensor(a: &ClassFunction, b: &ClassFunction, product: &FiniteGroup) -> Result<ClassFunction> {
    let (left, right) = product.product_factors().ok_or(Error::GroupMismatch)?;
    if left != a.group || right != b.group {
        return Err(Error::GroupMismatch);
    }
    let cp = product.conjugacy_classes();
    Ok(ClassFunction::from_fn(product, |c| {
        let (x, y) = product.product_components(cp.representative(c)).expect("product element");
        a.at(x) * b.at(y)
    }))
}

/// `χ^g(x) = χ(g x g⁻¹)` for `χ` on a normal subgroup `H` embedded in `G`.
pub fn conjugate_by(chi: &ClassFunction, emb: &GroupHom, g: usize) -> Result<ClassFunction> {
    if *emb.source() != chi.group {
        return Err(Error::GroupMismatch);
    }
    let (h, big) = (emb.source(), emb.target());
    let mut preimage = vec![u32::MAX; big.order()];
    for x in h.elements() {
        preimage[emb.apply(x)] = x as u32;
    }
    let ch = h.conjugacy_classes();
    let mut values = Vec::with_capacity(ch.len());
    for c in 0..ch.len() {
        let y = big.conjugate(emb.apply(ch.representative(c)), g);
        let x = preimage[y];
        if x == u32::MAX {
            return Err(Error::NotNormal);
        }
        values.push(chi.at(x as usize).clone());
    }
    Ok(ClassFunction::raw(h, values))
}

/// Multiplicities `⟨χ, χ_i⟩` of the table rows in `χ`, listing only the
/// nonzero ones.
pub fn decompose(chi: &ClassFunction, table: &CharacterTable) -> Result<Vec<(usize, u64)>> {
    same_group(chi, &table.rows[0])?;
    let mut out = Vec::new();
    let mut rebuilt: Option<ClassFunction> = None;
    for (i, row) in table.rows.iter().enumerate() {
        let m = inner_product(chi, row)?;
        let m = match m.to_integer() {
            Some(k) if k >= 0 => k,
            _ => return Err(Error::NotACharacter(format!("multiplicity {m} of row {i}"))),
        };
        if m > 0 {
            out.push((i, m as u64));
            let part = row.scale(m);
            rebuilt = Some(match rebuilt {
                Some(acc) => acc.add(&part)?,
                None => part,
            });
        }
    }
    let rebuilt = rebuilt.unwrap_or_else(|| chi.scale(0));
    if rebuilt.values != chi.values {
        return Err(Error::NotACharacter("not a combination of irreducibles".into()));
    }
    Ok(out)
}

/// The full list of irreducible characters of a group.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    group: FiniteGroup,
    ell: u64,
    rows: Vec<ClassFunction>,
}

/// Outcome of the exact orthogonality checks on a table.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct OrthogonalityReport {
    pub rows: bool,
    pub columns: bool,
    pub degree_sum: bool,
    pub square: bool,
}

impl OrthogonalityReport {
    pub fn pass(&self) -> bool {
        self.rows && self.columns && self.degree_sum && self.square
    }
}

impl CharacterTable {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    /// The prime used for the modular eigenvector computation.
    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn rows(&self) -> &[ClassFunction] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &ClassFunction {
        &self.rows[i]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn degrees(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.degree().expect("irreducible degree")).collect()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.group.conjugacy_classes().sizes()
    }

    /// Index of a row equal to `chi`.
    pub fn find(&self, chi: &ClassFunction) -> Option<usize> {
        self.rows.iter().position(|r| r == chi)
    }

    /// Indices of the linear characters.
    pub fn linear(&self) -> Vec<usize> {
        (0..self.rows.len()).filter(|&i| self.rows[i].degree() == Some(1)).collect()
    }

    /// Checks row and column orthogonality and `Σ χ(1)² = |G|`, all exactly.
    pub fn verify_orthogonality(&self) -> Result<OrthogonalityReport> {
        let g = &self.group;
        let cc = g.conjugacy_classes();
        let r = cc.len();
        let square = self.rows.len() == r;
        let degree_sum = self.degrees().iter().map(|d| d * d).sum::<u64>() == g.order() as u64;
        let mut rows_ok = true;
        for i in 0..self.rows.len() {
            for j in i..self.rows.len() {
                let ip = inner_product(&self.rows[i], &self.rows[j])?;
                if ip != CycNum::from_integer((i == j) as i64) {
                    rows_ok = false;
                }
            }
        }
        let vecs: Option<Vec<Arc<Vec<Vec<i64>>>>> = self.rows.iter().map(|r| r.integral()).collect();
        let mut cols_ok = square;
        if let (Some(vecs), true) = (vecs, square) {
            let ring = CycloRing::new(g.exponent() as u32);
            for a in 0..r {
                for b in a..r {
                    let sum =
                        ring.weighted_hermitian_sum(vecs.iter().map(|v| (1i64, v[a].as_slice(), v[b].as_slice())));
                    let expect = if a == b { (g.order() / cc.size(a)) as i128 } else { 0 };
                    let ok = sum.first().copied() == Some(expect) && sum.iter().skip(1).all(|&x| x == 0);
                    if !ok {
                        cols_ok = false;
                    }
                }
            }
        } else {
            cols_ok = false;
        }
        Ok(OrthogonalityReport { rows: rows_ok, columns: cols_ok, degree_sum, square })
    }

    pub fn to_json(&self) -> TableJson {
        let cc = self.group.conjugacy_classes();
        TableJson {
            group_hash: self.group.content_hash(),
            order: self.group.order(),
            ell: self.ell,
            classes: (0..cc.len())
                .map(|c| ClassJson {
                    representative: cc.representative(c),
                    size: cc.size(c),
                    element_order: cc.element_order(c),
                })
                .collect(),
            rows: self.rows.iter().map(|r| r.values.clone()).collect(),
        }
    }

    /// Rebuilds a table for `group` from its JSON form, checking that it
    /// belongs to this group and is a valid table.
    pub fn from_json(group: &FiniteGroup, json: &TableJson) -> Result<Self> {
        if json.group_hash != group.content_hash() || json.order != group.order() {
            return Err(Error::GroupMismatch);
        }
        let cc = group.conjugacy_classes();
        let classes_match = json.classes.len() == cc.len()
            && json
                .classes
                .iter()
                .enumerate()
                .all(|(c, j)| j.representative == cc.representative(c) && j.size == cc.size(c));
        if !classes_match {
            return Err(Error::GroupMismatch);
        }
        let rows = json.rows.iter().map(|v| ClassFunction::new(group, v.clone())).collect::<Result<Vec<_>>>()?;
        if rows.is_empty() {
            return Err(Error::StructureFailed("empty table".into()));
        }
        let table = CharacterTable { group: group.clone(), ell: json.ell, rows };
        if !table.verify_orthogonality()?.pass() {
            return Err(Error::StructureFailed("cached table fails orthogonality".into()));
        }
        Ok(table)
    }
}

/// JSON form of a character table.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TableJson {
    pub group_hash: String,
    pub order: usize,
    pub ell: u64,
    pub classes: Vec<ClassJson>,
    pub rows: Vec<Vec<CycNum>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ClassJson {
    pub representative: usize,
    pub size: usize,
    pub element_order: u32,
}

/// Canonical order of values: smaller conductor first, then larger
/// coefficients first.
fn value_cmp(a: &CycNum, b: &CycNum) -> CmpOrdering {
    a.order().cmp(&b.order()).then_with(|| b.coeffs().cmp(a.coeffs()))
}

fn row_cmp(a: &ClassFunction, b: &ClassFunction) -> CmpOrdering {
    a.degree().cmp(&b.degree()).then_with(|| {
        a.values.iter().zip(&b.values).map(|(x, y)| value_cmp(x, y)).find(|o| o.is_ne()).unwrap_or(CmpOrdering::Equal)
    })
}

/// Smallest prime `ℓ ≡ 1 (mod e)` with `ℓ > 2√n`.
pub fn dixon_prime(order: u64, exponent: u64) -> u64 {
    let mut l = exponent + 1;
    loop {
        if l * l > 4 * order && modp::is_prime(l) {
            return l;
        }
        l += exponent;
    }
}

/// Computes the character table with rows sorted by degree, then by values.
pub fn character_table(group: &FiniteGroup) -> Result<CharacterTable> {
    let cc = group.conjugacy_classes();
    let r = cc.len();
    let n = group.order() as u64;
    let e = group.exponent();
    let ell = dixon_prime(n, e);
    let f = modp::Fp::new(ell);

    // class_mult[j] = M_j, computed lazily, M_j[k][i] = #{x ∈ C_j : x⁻¹g_i ∈ C_k}
    let class_matrix = |j: usize| -> Vec<Vec<u64>> {
        let mut m = vec![vec![0u64; r]; r];
        for i in 0..r {
            let gi = cc.representative(i);
            for &x in cc.members(j) {
                let y = group.mul(group.inv(x as usize), gi);
                m[cc.class_of(y)][i] += 1;
            }
        }
        for row in m.iter_mut() {
            for v in row.iter_mut() {
                *v %= ell;
            }
        }
        m
    };

    let mut pending: Vec<Vec<Vec<u64>>> = vec![modp::identity_basis(r)];
    let mut done: Vec<Vec<u64>> = Vec::new();
    // split by class matrices in order of class size (cheapest first)
    let mut order: Vec<usize> = (1..r).collect();
    order.sort_by_key(|&j| (cc.size(j), j));
    let mut js = order.into_iter();
    while !pending.is_empty() {
        let mut still = Vec::new();
        for space in pending.drain(..) {
            if space.len() == 1 {
                done.push(space.into_iter().next().unwrap());
            } else {
                still.push(space);
            }
        }
        if still.is_empty() {
            break;
        }
        let j = js.next().ok_or_else(|| Error::StructureFailed("class matrices did not separate".into()))?;
        let m = class_matrix(j);
        for space in still {
            pending.extend(f.split(&m, space)?);
        }
    }
    if done.len() != r {
        return Err(Error::StructureFailed("wrong number of irreducibles".into()));
    }

    let z = f.pow(f.primitive_root(), (ell - 1) / e);
    let powers: Vec<Vec<usize>> = (0..r)
        .map(|c| {
            let x = cc.representative(c);
            let o = cc.element_order(c) as usize;
            let mut y = 0;
            let mut out = Vec::with_capacity(o);
            for _ in 0..o {
                out.push(cc.class_of(y));
                y = group.mul(y, x);
            }
            out
        })
        .collect();
    let ring = CycloRing::new(e as u32);

    let mut rows = Vec::with_capacity(r);
    for v in done {
        let v0 = f.inv(v[0]);
        let v: Vec<u64> = v.iter().map(|&x| f.mul(x, v0)).collect();
        // Σ_j ω_j ω_{j*} / |C_j| = |G| / χ(1)²
        let mut s = 0;
        for j in 0..r {
            let t = f.mul(f.mul(v[j], v[cc.inverse_class(j)]), f.inv(cc.size(j) as u64 % ell));
            s = f.add(s, t);
        }
        let d2 = f.mul(n % ell, f.inv(s));
        let d = (1..=ell / 2)
            .find(|&d| d * d % ell == d2)
            .ok_or_else(|| Error::StructureFailed("degree is not a square".into()))?;
        let chi_mod: Vec<u64> = (0..r).map(|j| f.mul(f.mul(v[j], d), f.inv(cc.size(j) as u64 % ell))).collect();
        let mut values = Vec::with_capacity(r);
        let mut ints = Vec::with_capacity(r);
        for j in 0..r {
            let o = cc.element_order(j) as u64;
            let zo = f.pow(z, e / o);
            let inv_o = f.inv(o % ell);
            let mut full = vec![0i64; e as usize];
            let mut total = 0u64;
            for k in 0..o {
                // m_k = (1/o) Σ_t χ(g^t) ζ_o^{-kt}
                let mut acc = 0;
                for t in 0..o {
                    let w = f.pow(zo, (o - (k * t) % o) % o);
                    acc = f.add(acc, f.mul(chi_mod[powers[j][t as usize]], w));
                }
                let m = f.mul(acc, inv_o);
                if m > d {
                    return Err(Error::StructureFailed("eigenvalue multiplicity out of range".into()));
                }
                total += m;
                full[(k * (e / o)) as usize] += m as i64;
            }
            if total != d {
                return Err(Error::StructureFailed("eigenvalue multiplicities do not sum to the degree".into()));
            }
            let vec = ring.reduce(&full);
            let wide: Vec<i128> = vec.iter().map(|&x| x as i128).collect();
            values.push(CycNum::from_integral(e as u32, &wide, 1));
            ints.push(vec);
        }
        let cf = ClassFunction::raw(group, values);
        let _ = cf.integral.set(Some(Arc::new(ints)));
        rows.push(cf);
    }
    rows.sort_by(row_cmp);
    let table = CharacterTable { group: group.clone(), ell, rows };
    if table.degrees().iter().map(|d| d * d).sum::<u64>() != n {
        return Err(Error::StructureFailed("degrees do not square-sum to the order".into()));
    }
    Ok(table)
}

mod modp {
    use crate::error::{Error, Result};

    pub fn is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    pub fn identity_basis(r: usize) -> Vec<Vec<u64>> {
        (0..r).map(|i| (0..r).map(|j| (i == j) as u64).collect()).collect()
    }

    pub struct Fp {
        pub p: u64,
    }

    impl Fp {
        pub fn new(p: u64) -> Self {
            Fp { p }
        }

        #[inline]
        pub fn add(&self, a: u64, b: u64) -> u64 {
            (a + b) % self.p
        }

        #[inline]
        pub fn sub(&self, a: u64, b: u64) -> u64 {
            (a + self.p - b) % self.p
        }

        #[inline]
        pub fn mul(&self, a: u64, b: u64) -> u64 {
            a * b % self.p
        }

        pub fn pow(&self, mut a: u64, mut k: u64) -> u64 {
            let mut r = 1 % self.p;
            a %= self.p;
            while k > 0 {
                if k & 1 == 1 {
                    r = self.mul(r, a);
                }
                a = self.mul(a, a);
                k >>= 1;
            }
            r
        }

        pub fn inv(&self, a: u64) -> u64 {
            debug_assert!(!a.is_multiple_of(self.p));
            self.pow(a, self.p - 2)
        }

        pub fn primitive_root(&self) -> u64 {
            let m = self.p - 1;
            let mut primes = Vec::new();
            let mut x = m;
            let mut d = 2;
            while d * d <= x {
                if x.is_multiple_of(d) {
                    primes.push(d);
                    while x.is_multiple_of(d) {
                        x /= d;
                    }
                }
                d += 1;
            }
            if x > 1 {
                primes.push(x);
            }
            (2..self.p).find(|&g| primes.iter().all(|&q| self.pow(g, m / q) != 1)).unwrap_or(1)
        }

        /// Row-reduces in place; returns pivot columns.
        pub fn rref(&self, m: &mut [Vec<u64>]) -> Vec<usize> {
            let rows = m.len();
            let cols = m.first().map_or(0, |r| r.len());
            let mut pivots = Vec::new();
            let mut row = 0;
            for col in 0..cols {
                if row == rows {
                    break;
                }
                let Some(p) = (row..rows).find(|&i| m[i][col] != 0) else { continue };
                m.swap(row, p);
                let inv = self.inv(m[row][col]);
                for v in m[row].iter_mut() {
                    *v = self.mul(*v, inv);
                }
                let pivot_row = m[row].clone();
                for (i, r) in m.iter_mut().enumerate() {
                    if i != row && r[col] != 0 {
                        let c = r[col];
                        for (x, &y) in r.iter_mut().zip(&pivot_row) {
                            *x = self.sub(*x, self.mul(c, y));
                        }
                    }
                }
                pivots.push(col);
                row += 1;
            }
            pivots
        }

        /// Basis of `{x : A x = 0}` for a square matrix.
        pub fn nullspace(&self, a: &[Vec<u64>]) -> Vec<Vec<u64>> {
            let n = a.len();
            let mut m = a.to_vec();
            let pivots = self.rref(&mut m);
            let mut basis = Vec::new();
            for free in (0..n).filter(|c| !pivots.contains(c)) {
                let mut x = vec![0u64; n];
                x[free] = 1;
                for (i, &pc) in pivots.iter().enumerate() {
                    x[pc] = self.sub(0, m[i][free]);
                }
                basis.push(x);
            }
            basis
        }

        /// Characteristic polynomial (low degree first) via Hessenberg form.
        pub fn charpoly(&self, a: &[Vec<u64>]) -> Vec<u64> {
            let n = a.len();
            let mut h = a.to_vec();
            for j in 0..n.saturating_sub(2) {
                let Some(i) = (j + 1..n).find(|&i| h[i][j] != 0) else { continue };
                if i != j + 1 {
                    h.swap(i, j + 1);
                    for row in h.iter_mut() {
                        row.swap(i, j + 1);
                    }
                }
                let inv = self.inv(h[j + 1][j]);
                for k in j + 2..n {
                    let u = self.mul(h[k][j], inv);
                    if u == 0 {
                        continue;
                    }
                    for c in 0..n {
                        let t = self.mul(u, h[j + 1][c]);
                        h[k][c] = self.sub(h[k][c], t);
                    }
                    for row in h.iter_mut() {
                        let t = self.mul(u, row[k]);
                        row[j + 1] = self.add(row[j + 1], t);
                    }
                }
            }
            let mut polys: Vec<Vec<u64>> = vec![vec![1]];
            for m in 1..=n {
                // (x − h_mm) p_{m−1}
                let prev = &polys[m - 1];
                let mut p = vec![0u64; m + 1];
                for (k, &c) in prev.iter().enumerate() {
                    p[k + 1] = self.add(p[k + 1], c);
                    p[k] = self.sub(p[k], self.mul(h[m - 1][m - 1], c));
                }
                let mut t = 1u64;
                for i in (1..m).rev() {
                    t = self.mul(t, h[i][i - 1]);
                    let coef = self.mul(h[i - 1][m - 1], t);
                    if coef == 0 {
                        continue;
                    }
                    for (k, &c) in polys[i - 1].iter().enumerate() {
                        p[k] = self.sub(p[k], self.mul(coef, c));
                    }
                }
                polys.push(p);
            }
            polys.pop().unwrap()
        }

        fn eval(&self, poly: &[u64], x: u64) -> u64 {
            poly.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
        }

        /// Splits an invariant subspace (rows in echelon form) into the
        /// eigenspaces of `m` acting on column vectors.
        pub fn split(&self, m: &[Vec<u64>], mut space: Vec<Vec<u64>>) -> Result<Vec<Vec<Vec<u64>>>> {
            let k = space.len();
            let pivots = self.rref(&mut space);
            let r = m.len();
            // a[s][t] = coordinate s of m·b_t
            let mut a = vec![vec![0u64; k]; k];
            for (t, b) in space.iter().enumerate() {
                let mut w = vec![0u64; r];
                for (row, wr) in m.iter().zip(w.iter_mut()) {
                    let mut acc = 0u64;
                    for (&x, &y) in row.iter().zip(b) {
                        acc = (acc + x * y) % self.p;
                    }
                    *wr = acc;
                }
                for (s, &pc) in pivots.iter().enumerate() {
                    a[s][t] = w[pc];
                }
            }
            let scalar = (0..k).all(|i| (0..k).all(|j| a[i][j] == if i == j { a[0][0] } else { 0 }));
            if scalar {
                return Ok(vec![space]);
            }
            let poly = self.charpoly(&a);
            let mut parts = Vec::new();
            let mut total = 0;
            for lambda in 0..self.p {
                if self.eval(&poly, lambda) != 0 {
                    continue;
                }
                let shifted: Vec<Vec<u64>> = (0..k)
                    .map(|i| (0..k).map(|j| if i == j { self.sub(a[i][j], lambda) } else { a[i][j] }).collect())
                    .collect();
                let null = self.nullspace(&shifted);
                total += null.len();
                let mut vecs: Vec<Vec<u64>> = null
                    .iter()
                    .map(|x| {
                        let mut v = vec![0u64; r];
                        for (&c, b) in x.iter().zip(&space) {
                            if c != 0 {
                                for (vi, &bi) in v.iter_mut().zip(b) {
                                    *vi = (*vi + c * bi) % self.p;
                                }
                            }
                        }
                        v
                    })
                    .collect();
                self.rref(&mut vecs);
                parts.push(vecs);
            }
            if total != k {
                return Err(Error::StructureFailed("class matrix is not diagonalizable".into()));
            }
            Ok(parts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{cyclic, GroupElement, Perm, DEFAULT_CAP};

    fn perm_group(label: &str, n: usize, gens: &[&[&[u32]]]) -> FiniteGroup {
        let g: Vec<GroupElement> = gens.iter().map(|cs| GroupElement::Perm(Perm::from_cycles(n, cs))).collect();
        FiniteGroup::from_generators(label, &g, DEFAULT_CAP).unwrap()
    }

    fn q8() -> FiniteGroup {
        let ri: &[&[u32]] = &[&[0, 1, 4, 5], &[2, 7, 6, 3]];
        let rj: &[&[u32]] = &[&[0, 2, 4, 6], &[1, 3, 5, 7]];
        perm_group("Q8", 8, &[ri, rj])
    }

    fn s4() -> FiniteGroup {
        perm_group("S4", 4, &[&[&[0, 1, 2, 3]], &[&[0, 1]]])
    }

    #[test]
    fn dixon_prime_choice() {
        assert_eq!(dixon_prime(8, 4), 13);
        assert_eq!(dixon_prime(2, 2), 3);
        assert_eq!(dixon_prime(96, 24), 73);
    }

    #[test]
    fn z2_table() {
        let t = character_table(&cyclic(2)).unwrap();
        assert_eq!(t.row(0).values(), &[CycNum::one(), CycNum::one()]);
        assert_eq!(t.row(1).values(), &[CycNum::one(), CycNum::from_integer(-1)]);
    }

    #[test]
    fn q8_table() {
        let t = character_table(&q8()).unwrap();
        assert_eq!(t.degrees(), vec![1, 1, 1, 1, 2]);
        assert!(t.verify_orthogonality().unwrap().pass());
        assert_eq!(t.row(0), &ClassFunction::trivial(t.group()));
    }

    #[test]
    fn s4_table_and_regular() {
        let g = s4();
        let t = character_table(&g).unwrap();
        assert_eq!(t.degrees(), vec![1, 1, 2, 3, 3]);
        assert!(t.verify_orthogonality().unwrap().pass());
        let reg = ClassFunction::regular(&g);
        let dec = decompose(&reg, &t).unwrap();
        for (i, m) in dec {
            assert_eq!(m, t.row(i).degree().unwrap());
        }
    }

    #[test]
    fn cyclic_tables_have_roots_of_unity() {
        for n in 1..=12 {
            let t = character_table(&cyclic(n)).unwrap();
            assert_eq!(t.len(), n);
            assert!(t.verify_orthogonality().unwrap().pass(), "n = {n}");
        }
    }

    #[test]
    fn q8_restriction_to_center_is_twice_sign() {
        let g = q8();
        let t = character_table(&g).unwrap();
        let z = g.center();
        let res = restrict(t.row(4), &z).unwrap();
        let tz = character_table(z.source()).unwrap();
        assert_eq!(decompose(&res, &tz).unwrap(), vec![(1, 2)]);
    }

    #[test]
    fn frobenius_reciprocity_s4() {
        let g = s4();
        let t = character_table(&g).unwrap();
        let h = g.subgroup_generated(&[g.generators()[0] as usize]);
        let th = character_table(h.source()).unwrap();
        for a in th.rows() {
            let ind = induce(a, &h).unwrap();
            assert_eq!(ind.degree().unwrap(), 6);
            for b in t.rows() {
                assert_eq!(inner_product(&ind, b).unwrap(), inner_product(a, &restrict(b, &h).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn non_character_rejected() {
        let g = cyclic(3);
        let t = character_table(&g).unwrap();
        let half = ClassFunction::from_fn(&g, |c| if c == 0 { CycNum::one() } else { CycNum::zero() });
        assert!(matches!(decompose(&half, &t), Err(Error::NotACharacter(_))));
    }

    #[test]
    fn json_roundtrip() {
        let g = q8();
        let t = character_table(&g).unwrap();
        let s = serde_json::to_string(&t.to_json()).unwrap();
        let back: TableJson = serde_json::from_str(&s).unwrap();
        let t2 = CharacterTable::from_json(&g, &back).unwrap();
        assert_eq!(t2.rows(), t.rows());
        assert!(CharacterTable::from_json(&s4(), &back).is_err());
    }
}
