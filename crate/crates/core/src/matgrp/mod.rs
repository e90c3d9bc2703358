//! Finite unitary groups over `F_{q²}` and their determinant characters.
//!
//! A unitary group is the stabilizer of a hermitian form `H` on `F_{q²}^n`,
//! where the bar involution is `x ↦ x^q`. The default form is hyperbolic
//! (antidiagonal ones), which makes the upper unitriangular matrices a
//! unipotent radical of a Borel subgroup.

pub mod field;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::cycnum::CycNum;
use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupElement, GroupHom};
use crate::repthy::{self, CharacterTable, ClassFunction};
use field::{FiniteField, FqMatrix};

/// Which member of the unitary family to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    U,
    SU,
    GU,
    /// Pairs `(a, b)` in `U(n) × U(n)` with `det a · det b = 1`.
    SUxU,
}

impl Flavor {
    fn name(self) -> &'static str {
        match self {
            Flavor::U => "U",
            Flavor::SU => "SU",
            Flavor::GU => "GU",
            Flavor::SUxU => "SUxU",
        }
    }
}

/// Parameters of a finite unitary group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HermitianSpec {
    pub flavor: Flavor,
    pub n: usize,
    pub q: u32,
}

impl HermitianSpec {
    pub fn new(flavor: Flavor, n: usize, q: u32) -> Self {
        HermitianSpec { flavor, n, q }
    }

    pub fn unitary(n: usize, q: u32) -> Self {
        Self::new(Flavor::U, n, q)
    }
}

impl fmt::Display for HermitianSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:n={},q={},form=hyperbolic", self.flavor.name(), self.n, self.q)
    }
}

impl FromStr for HermitianSpec {
    type Err = Error;

    /// Parses `U:n=2,q=3` (optionally with `,form=hyperbolic`).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::SpecParse(s.to_string());
        let (head, params) = s.split_once(':').ok_or_else(bad)?;
        let flavor = match head {
            "U" => Flavor::U,
            "SU" => Flavor::SU,
            "GU" => Flavor::GU,
            "SUxU" => Flavor::SUxU,
            _ => return Err(bad()),
        };
        let (mut n, mut q) = (None, None);
        for kv in params.split(',') {
            let (k, v) = kv.split_once('=').ok_or_else(bad)?;
            match k.trim() {
                "n" => n = Some(v.trim().parse().map_err(|_| bad())?),
                "q" => q = Some(v.trim().parse().map_err(|_| bad())?),
                "form" if v.trim() == "hyperbolic" => {}
                _ => return Err(bad()),
            }
        }
        let spec = HermitianSpec { flavor, n: n.ok_or_else(bad)?, q: q.ok_or_else(bad)? };
        if spec.n == 0 || prime_power(spec.q).is_none() {
            return Err(bad());
        }
        Ok(spec)
    }
}

/// `(p, k)` with `q = p^k`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut k = 0;
    let mut m = q;
    while m.is_multiple_of(p) {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

/// `|U(n, q)| = q^{n(n−1)/2} Π_{i=1}^{n} (q^i − (−1)^i)`.
pub fn unitary_order(n: usize, q: u64) -> u64 {
    let mut o = q.pow((n * (n - 1) / 2) as u32);
    for i in 1..=n as u32 {
        let t = q.pow(i) as i64 - if i % 2 == 0 { 1 } else { -1 };
        o *= t as u64;
    }
    o
}

/// `F_{q²}` with its bar involution.
#[derive(Clone, Debug)]
pub struct QuadraticExtension {
    pub field: Arc<FiniteField>,
    pub q: u32,
}

impl QuadraticExtension {
    pub fn new(q: u32) -> Result<Self> {
        let (p, k) = prime_power(q).ok_or_else(|| Error::Unsupported(format!("q = {q}")))?;
        Ok(QuadraticExtension { field: Arc::new(FiniteField::new(p, 2 * k)?), q })
    }

    pub fn bar(&self, a: u8) -> u8 {
        self.field.pow(a, self.q as u64)
    }

    /// Conjugate transpose.
    pub fn star(&self, m: &FqMatrix) -> FqMatrix {
        m.map_pow(self.q as u64).transpose()
    }

    /// The antidiagonal hermitian form of size `n`.
    pub fn hyperbolic(&self, n: usize) -> FqMatrix {
        let mut h = FqMatrix::new(self.field.clone(), n, vec![0; n * n]);
        for i in 0..n {
            h.set(i, n - 1 - i, 1);
        }
        h
    }

    /// Elements of `F_q^×`.
    pub fn base_units(&self) -> Vec<u8> {
        self.field.elements().filter(|&a| a != 0 && self.bar(a) == a).collect()
    }

    /// Generator of the norm-one group `μ_{q+1}`.
    pub fn norm_one_generator(&self) -> u8 {
        self.field.pow(self.field.primitive_element(), self.q as u64 - 1)
    }

    /// `k` with `a = w^k` for the norm-one generator `w`.
    pub fn norm_one_log(&self, a: u8) -> Result<u32> {
        let l = self.field.log(a)?;
        let q = self.q;
        if l % (q - 1) != 0 {
            return Err(Error::NotNormOne);
        }
        Ok(l / (q - 1))
    }
}

/// A finite unitary-type group together with its field and form.
#[derive(Clone, Debug)]
pub struct UnitaryGroup {
    pub spec: HermitianSpec,
    pub ext: QuadraticExtension,
    pub form: FqMatrix,
    pub group: FiniteGroup,
    /// For `SUxU`, the factor `U(n, q)` and the embedding into `U × U`.
    pub factor: Option<(Box<UnitaryGroup>, GroupHom)>,
}

/// Candidate count below which groups are built by filtering all matrices.
const FILTER_LIMIT: u64 = 400_000;

impl UnitaryGroup {
    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn matrix(&self, x: usize) -> FqMatrix {
        self.group.matrix(x).expect("unitary groups carry matrices")
    }

    pub fn det(&self, x: usize) -> u8 {
        self.matrix(x).det()
    }

    /// `λ` with `g*Hg = λH`.
    pub fn similitude(&self, x: usize) -> u8 {
        similitude_of(&self.ext, &self.form, &self.matrix(x)).expect("element is a similitude")
    }

    /// The unipotent radical `{[[1, z], [0, 1]] : z + z̄ = 0}` of the upper
    /// Borel subgroup of `U(2, q)`.
    pub fn unipotent_radical(&self) -> Result<GroupHom> {
        if self.spec.n != 2 || self.form != self.ext.hyperbolic(2) {
            return Err(Error::RequiresHyperbolicForm);
        }
        let f = &self.ext.field;
        let mut members = Vec::new();
        for z in f.elements() {
            if f.add(z, self.ext.bar(z)) == 0 {
                let m = FqMatrix::new(f.clone(), 2, vec![1, z, 0, 1]);
                let idx = self.group.index_of(&GroupElement::Matrix(m)).ok_or(Error::RequiresHyperbolicForm)?;
                members.push(idx);
            }
        }
        self.group.subgroup_from_members(&members)
    }

    /// `ψ_j ∘ det` for `ψ_j(w^k) = ζ_{q+1}^{jk}`.
    pub fn det_power_character(&self, j: u32) -> Result<ClassFunction> {
        let m = self.ext.q + 1;
        let cc = self.group.conjugacy_classes();
        let mut vals = Vec::with_capacity(cc.len());
        for c in 0..cc.len() {
            let k = self.ext.norm_one_log(self.det(cc.representative(c)))?;
            vals.push(CycNum::root_of_unity(m, (j * k % m) as i64));
        }
        ClassFunction::new(&self.group, vals)
    }

    /// `ψ_1 ∘ det`, the generator of the characters trivial on `SU`.
    pub fn det_character(&self) -> Result<ClassFunction> {
        self.det_power_character(1)
    }

    /// All characters `ψ_j ∘ det`, flagging the nontrivial quadratic ones.
    pub fn linear_characters_via_det(&self) -> Result<Vec<DetCharacter>> {
        let m = self.ext.q + 1;
        (0..m)
            .map(|j| {
                Ok(DetCharacter { j, quadratic: j != 0 && (2 * j) % m == 0, character: self.det_power_character(j)? })
            })
            .collect()
    }

    /// The unique nontrivial quadratic character trivial on `SU`.
    pub fn quadratic_character(&self) -> Result<ClassFunction> {
        self.linear_characters_via_det()?
            .into_iter()
            .find(|c| c.quadratic)
            .map(|c| c.character)
            .ok_or(Error::NoQuadraticCharacter { q: self.ext.q as u64 })
    }

    /// Whether an irreducible character has no vectors fixed by the unipotent
    /// radical.
    pub fn is_cuspidal(&self, chi: &ClassFunction) -> Result<bool> {
        let n = self.unipotent_radical()?;
        let res = repthy::restrict(chi, &n)?;
        let triv = ClassFunction::trivial(n.source());
        Ok(repthy::inner_product_integer(&res, &triv)? == 0)
    }
}

/// A linear character of `U(n, q)` factoring through the determinant.
#[derive(Clone, Debug)]
pub struct DetCharacter {
    pub j: u32,
    pub quadratic: bool,
    pub character: ClassFunction,
}

fn similitude_of(ext: &QuadraticExtension, h: &FqMatrix, g: &FqMatrix) -> Option<u8> {
    let lhs = ext.star(g).mul(h).mul(g);
    let n = h.dim();
    let (i, j) = (0..n * n).map(|t| (t / n, t % n)).find(|&(i, j)| h.get(i, j) != 0)?;
    let f = &ext.field;
    let lambda = f.mul(lhs.get(i, j), f.inv(h.get(i, j)).ok()?);
    (lambda != 0 && lhs == h.scale(lambda)).then_some(lambda)
}

impl FqMatrix {
    fn scale(&self, s: u8) -> FqMatrix {
        let f = self.field().clone();
        let e = self.entries().iter().map(|&x| f.mul(x, s)).collect();
        FqMatrix::new(f, self.dim(), e)
    }
}

/// All `g` with `g*Hg = λH` for some `λ` in `lambdas`, listed in
/// lexicographic order of their entries.
fn similitudes_filter(ext: &QuadraticExtension, h: &FqMatrix, lambdas: &[u8]) -> Vec<FqMatrix> {
    let n = h.dim();
    let size = ext.field.size() as u64;
    let total = size.pow((n * n) as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut e = vec![0u8; n * n];
        for slot in e.iter_mut().rev() {
            *slot = (c % size) as u8;
            c /= size;
        }
        let g = FqMatrix::new(ext.field.clone(), n, e);
        if let Some(l) = similitude_of(ext, h, &g) {
            if lambdas.contains(&l) {
                out.push(g);
            }
        }
    }
    out
}

/// Same set as [`similitudes_filter`] by column-by-column backtracking:
/// column `j` must pair with earlier columns as `λH` prescribes.
fn similitudes_backtrack(ext: &QuadraticExtension, h: &FqMatrix, lambdas: &[u8]) -> Vec<FqMatrix> {
    let n = h.dim();
    let f = &ext.field;
    let size = f.size() as u64;
    let vectors: Vec<Vec<u8>> = (0..size.pow(n as u32))
        .map(|code| {
            let mut c = code;
            let mut v = vec![0u8; n];
            for slot in v.iter_mut().rev() {
                *slot = (c % size) as u8;
                c /= size;
            }
            v
        })
        .collect();
    // ⟨u, v⟩ = u* H v
    let pair = |u: &[u8], v: &[u8]| -> u8 {
        let mut acc = 0;
        for a in 0..n {
            if u[a] == 0 {
                continue;
            }
            let ua = ext.bar(u[a]);
            for b in 0..n {
                if h.get(a, b) != 0 && v[b] != 0 {
                    acc = f.add(acc, f.mul(f.mul(ua, h.get(a, b)), v[b]));
                }
            }
        }
        acc
    };
    let mut out = Vec::new();
    for &lambda in lambdas {
        let target = h.scale(lambda);
        let mut cols: Vec<usize> = Vec::with_capacity(n);
        fn rec(
            cols: &mut Vec<usize>,
            n: usize,
            vectors: &[Vec<u8>],
            target: &FqMatrix,
            pair: &dyn Fn(&[u8], &[u8]) -> u8,
            out: &mut Vec<Vec<usize>>,
        ) {
            let j = cols.len();
            if j == n {
                out.push(cols.clone());
                return;
            }
            for (vi, v) in vectors.iter().enumerate() {
                if pair(v, v) != target.get(j, j) {
                    continue;
                }
                if cols.iter().enumerate().all(|(i, &ci)| pair(&vectors[ci], v) == target.get(i, j)) {
                    cols.push(vi);
                    rec(cols, n, vectors, target, pair, out);
                    cols.pop();
                }
            }
        }
        let mut found = Vec::new();
        rec(&mut cols, n, &vectors, &target, &pair, &mut found);
        for cs in found {
            let mut e = vec![0u8; n * n];
            for (j, &ci) in cs.iter().enumerate() {
                for i in 0..n {
                    e[i * n + j] = vectors[ci][i];
                }
            }
            out.push(FqMatrix::new(f.clone(), n, e));
        }
    }
    out.sort_by(|a, b| a.entries().cmp(b.entries()));
    out
}

fn similitudes(ext: &QuadraticExtension, h: &FqMatrix, lambdas: &[u8]) -> Vec<FqMatrix> {
    let candidates = (ext.field.size() as u64).pow((h.dim() * h.dim()) as u32);
    if candidates <= FILTER_LIMIT {
        similitudes_filter(ext, h, lambdas)
    } else {
        similitudes_backtrack(ext, h, lambdas)
    }
}

/// Builds the group described by `spec` with the hyperbolic form.
pub fn unitary_group(spec: &HermitianSpec) -> Result<UnitaryGroup> {
    let ext = QuadraticExtension::new(spec.q)?;
    let h = ext.hyperbolic(spec.n);
    let label = spec.to_string();
    match spec.flavor {
        Flavor::U | Flavor::SU | Flavor::GU => {
            let lambdas = if spec.flavor == Flavor::GU { ext.base_units() } else { vec![1] };
            let mut mats = similitudes(&ext, &h, &lambdas);
            if spec.flavor == Flavor::SU {
                mats.retain(|m| m.det() == 1);
            }
            let group = FiniteGroup::from_elements(&label, mats.into_iter().map(GroupElement::Matrix).collect())?;
            Ok(UnitaryGroup { spec: spec.clone(), ext, form: h, group, factor: None })
        }
        Flavor::SUxU => {
            let u = unitary_group(&HermitianSpec::unitary(spec.n, spec.q))?;
            let product = FiniteGroup::direct_product(&u.group, &u.group);
            let dets: Vec<u8> = u.group.elements().map(|x| u.det(x)).collect();
            let m = u.order();
            let f = ext.field.clone();
            let sub = product.subgroup_where(|x| f.mul(dets[x / m], dets[x % m]) == 1)?;
            let group = sub.source().clone();
            Ok(UnitaryGroup { spec: spec.clone(), ext, form: h, group, factor: Some((Box::new(u), sub)) })
        }
    }
}

/// The choice of cuspidal `ρ` and quadratic `χ` with `ρ ⊗ χ ≠ ρ`.
#[derive(Clone, Debug)]
pub struct RhoChoice {
    pub unitary: UnitaryGroup,
    pub table: CharacterTable,
    pub rho: usize,
    /// Row index of `ρ ⊗ χ`.
    pub rho_chi: usize,
    pub chi: ClassFunction,
    /// Table rows that are cuspidal.
    pub cuspidal: Vec<usize>,
    /// Cuspidal rows not fixed by the twist.
    pub twist_moved: Vec<usize>,
}

/// Selects the first cuspidal row of the `U(2, q)` table not fixed by the
/// quadratic determinant character.
pub fn pick_rho(q: u32) -> Result<RhoChoice> {
    if (q + 1) % 2 == 1 {
        return Err(Error::NoQuadraticCharacter { q: q as u64 });
    }
    let unitary = unitary_group(&HermitianSpec::unitary(2, q))?;
    let table = repthy::character_table(&unitary.group)?;
    pick_rho_from(unitary, table)
}

/// [`pick_rho`] with a prebuilt group and table.
pub fn pick_rho_from(unitary: UnitaryGroup, table: CharacterTable) -> Result<RhoChoice> {
    let chi = unitary.quadratic_character()?;
    let mut cuspidal = Vec::new();
    let mut twist_moved = Vec::new();
    for (i, row) in table.rows().iter().enumerate() {
        if unitary.is_cuspidal(row)? {
            cuspidal.push(i);
            if repthy::tensor(row, &chi)? != *row {
                twist_moved.push(i);
            }
        }
    }
    let rho = *twist_moved.first().ok_or(Error::NoSuitableRho)?;
    let twisted = repthy::tensor(table.row(rho), &chi)?;
    let rho_chi = table
        .find(&twisted)
        .ok_or_else(|| Error::StructureFailed("twist of an irreducible is not in the table".into()))?;
    Ok(RhoChoice { unitary, table, rho, rho_chi, chi, cuspidal, twist_moved })
}
