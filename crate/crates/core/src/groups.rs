//! Fully enumerated finite groups.
//!
//! Every group is a set of indices `0..order` with index 0 the identity.
//! The multiplication law is either an explicit table, multiplication of
//! concrete payloads (permutations, matrices), or a structured law built
//! from other groups (direct products, the coordinate-swap extension,
//! subgroups and quotients). Groups of order at most [`MEMO_LIMIT`] also
//! memoize their full multiplication table.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matgrp::field::FqMatrix;

/// Default bound on closure sizes.
pub const DEFAULT_CAP: usize = 200_000;

/// Groups up to this order carry a memoized index-pair multiplication table.
pub const MEMO_LIMIT: usize = 4096;

/// A permutation of `0..n`; products compose left to right, so
/// `(a * b)(x) = b(a(x))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    /// Builds a permutation of `0..n` from disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Self {
        let mut img: Vec<u32> = (0..n as u32).collect();
        for c in cycles {
            for (i, &x) in c.iter().enumerate() {
                img[x as usize] = c[(i + 1) % c.len()];
            }
        }
        Perm(img)
    }

    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }
}

/// A concrete group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupElement {
    Perm(Perm),
    Matrix(FqMatrix),
    /// Index into the multiplication table of a table-defined group.
    Abstract(usize),
}

impl GroupElement {
    fn mul(&self, other: &GroupElement) -> Result<GroupElement> {
        match (self, other) {
            (GroupElement::Perm(a), GroupElement::Perm(b)) if a.degree() == b.degree() => {
                Ok(GroupElement::Perm(a.compose(b)))
            }
            (GroupElement::Matrix(a), GroupElement::Matrix(b)) if a.dim() == b.dim() => {
                Ok(GroupElement::Matrix(a.mul(b)))
            }
            _ => Err(Error::Unsupported("generators must share a payload kind".into())),
        }
    }

    fn identity_like(&self) -> Result<GroupElement> {
        match self {
            GroupElement::Perm(p) => Ok(GroupElement::Perm(Perm::identity(p.degree()))),
            GroupElement::Matrix(m) => Ok(GroupElement::Matrix(FqMatrix::identity(m.field().clone(), m.dim()))),
            GroupElement::Abstract(_) => Err(Error::Unsupported("abstract elements need their table".into())),
        }
    }

    pub fn as_matrix(&self) -> Option<&FqMatrix> {
        match self {
            GroupElement::Matrix(m) => Some(m),
            _ => None,
        }
    }
}

enum Law {
    Table(Vec<u32>),
    Payload { elems: Vec<GroupElement>, lookup: HashMap<GroupElement, u32> },
    Product { left: FiniteGroup, right: FiniteGroup },
    Swap { base: FiniteGroup },
    Sub { parent: FiniteGroup, members: Vec<u32>, position: Vec<u32> },
    Quotient { parent: FiniteGroup, reps: Vec<u32>, coset_of: Vec<u32> },
}

struct Inner {
    id: u64,
    label: String,
    order: usize,
    law: Law,
    memo: Option<Vec<u32>>,
    inverse: Vec<u32>,
    elem_order: Vec<u32>,
    exponent: u64,
    gens: Vec<u32>,
    classes: OnceLock<Arc<ConjugacyClasses>>,
}

/// A finite group; cheap to clone, immutable, shareable across threads.
#[derive(Clone)]
pub struct FiniteGroup(Arc<Inner>);

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({:?}, order {})", self.0.label, self.0.order)
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for FiniteGroup {}

fn law_mul(law: &Law, n: usize, a: usize, b: usize) -> usize {
    match law {
        Law::Table(t) => t[a * n + b] as usize,
        Law::Payload { elems, lookup } => {
            let p = elems[a].mul(&elems[b]).expect("payloads share a kind");
            lookup[&p] as usize
        }
        Law::Product { left, right } => {
            let m = right.order();
            let (a1, a2) = (a / m, a % m);
            let (b1, b2) = (b / m, b % m);
            left.mul(a1, b1) * m + right.mul(a2, b2)
        }
        Law::Swap { base } => {
            let m = base.order();
            let sq = m * m;
            let (s, a1, a2) = (a / sq, (a % sq) / m, a % m);
            let (t, b1, b2) = (b / sq, (b % sq) / m, b % m);
            // (x, y)τ^s · (u, v)τ^t
            let (u, v) = if s == 0 { (b1, b2) } else { (b2, b1) };
            ((s + t) % 2) * sq + base.mul(a1, u) * m + base.mul(a2, v)
        }
        Law::Sub { parent, members, position } => {
            position[parent.mul(members[a] as usize, members[b] as usize)] as usize
        }
        Law::Quotient { parent, reps, coset_of } => coset_of[parent.mul(reps[a] as usize, reps[b] as usize)] as usize,
    }
}

fn law_generators(law: &Law) -> Option<Vec<u32>> {
    match law {
        Law::Product { left, right } => {
            let m = right.order() as u32;
            let mut g: Vec<u32> = left.generators().iter().map(|&x| x * m).collect();
            g.extend(right.generators().iter().copied());
            Some(g)
        }
        Law::Swap { base } => {
            let m = base.order() as u32;
            let mut g: Vec<u32> = base.generators().iter().map(|&x| x * m).collect();
            g.push(m * m);
            Some(g)
        }
        _ => None,
    }
}

struct Builder {
    label: String,
    order: usize,
    law: Law,
    gens: Option<Vec<u32>>,
}

impl Builder {
    fn build(self) -> FiniteGroup {
        let Builder { label, order: n, law, gens } = self;
        let memo = if n <= MEMO_LIMIT && !matches!(law, Law::Table(_)) {
            let mut t = vec![0u32; n * n];
            for a in 0..n {
                for b in 0..n {
                    t[a * n + b] = law_mul(&law, n, a, b) as u32;
                }
            }
            Some(t)
        } else {
            None
        };
        let mul = |a: usize, b: usize| -> usize {
            match &memo {
                Some(t) => t[a * n + b] as usize,
                None => law_mul(&law, n, a, b),
            }
        };
        let mut inverse = vec![0u32; n];
        let mut elem_order = vec![0u32; n];
        for x in 0..n {
            // walk x, x^2, ... keeping x^{k-1} as the inverse candidate
            let mut prev = 0usize;
            let mut y = x;
            let mut k = 1u32;
            while y != 0 {
                prev = y;
                y = mul(y, x);
                k += 1;
            }
            elem_order[x] = k;
            inverse[x] = prev as u32;
        }
        let gens = match gens.or_else(|| law_generators(&law)) {
            Some(g) => g,
            None => greedy_generators(n, &mul),
        };
        let exponent = elem_order.iter().fold(1u64, |acc, &o| num_integer::lcm(acc, o as u64));
        FiniteGroup(Arc::new(Inner {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            label,
            order: n,
            law,
            memo,
            inverse,
            elem_order,
            exponent,
            gens,
            classes: OnceLock::new(),
        }))
    }
}

fn closure_of(n: usize, mul: &dyn Fn(usize, usize) -> usize, gens: &[u32]) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for &g in gens {
            let y = mul(x, g as usize);
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

fn greedy_generators(n: usize, mul: &dyn Fn(usize, usize) -> usize) -> Vec<u32> {
    let mut gens = Vec::new();
    let mut inside = vec![false; n];
    inside[0] = true;
    for x in 0..n {
        if !inside[x] {
            gens.push(x as u32);
            inside = closure_of(n, mul, &gens);
        }
    }
    gens
}

impl FiniteGroup {
    /// Breadth-first closure of concrete generators. Elements are numbered in
    /// discovery order starting from the identity.
    pub fn from_generators(label: &str, gens: &[GroupElement], cap: usize) -> Result<Self> {
        let Some(first) = gens.first() else {
            return Ok(Self::trivial());
        };
        let id = first.identity_like()?;
        for g in gens {
            id.mul(g)?;
        }
        let mut elems = vec![id.clone()];
        let mut lookup = HashMap::from([(id, 0u32)]);
        let mut head = 0;
        while head < elems.len() {
            for g in gens {
                let y = elems[head].mul(g)?;
                if !lookup.contains_key(&y) {
                    if elems.len() >= cap {
                        return Err(Error::ClosureExceedsCap { cap });
                    }
                    lookup.insert(y.clone(), elems.len() as u32);
                    elems.push(y);
                }
            }
            head += 1;
        }
        let gen_idx: Vec<u32> = gens.iter().map(|g| lookup[g]).collect();
        let order = elems.len();
        Ok(Builder { label: label.to_string(), order, law: Law::Payload { elems, lookup }, gens: Some(gen_idx) }
            .build())
    }

    /// A group given by an explicit element list; the identity is moved to
    /// index 0 and the rest keep their order. Closure is verified by growing
    /// a generating set inside the list.
    pub fn from_elements(label: &str, elements: Vec<GroupElement>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Ok(Self::trivial());
        };
        let id = first.identity_like()?;
        let mut elems = vec![id.clone()];
        elems.extend(elements.into_iter().filter(|e| *e != id));
        let lookup: HashMap<GroupElement, u32> = elems.iter().enumerate().map(|(i, e)| (e.clone(), i as u32)).collect();
        if lookup.len() != elems.len() {
            return Err(Error::StructureFailed("duplicate elements".into()));
        }
        let n = elems.len();
        let not_closed = || Error::StructureFailed("element list is not closed".into());
        let mut gens: Vec<u32> = Vec::new();
        let mut inside = vec![false; n];
        inside[0] = true;
        let mut reached = vec![0usize];
        for x in 0..n {
            if inside[x] {
                continue;
            }
            gens.push(x as u32);
            // re-expand everything reached so far by all generators; when the
            // loop ends, every element is reached and products stay in the list
            let mut head = 0;
            while head < reached.len() {
                let y = reached[head];
                for &g in &gens {
                    let z = elems[y].mul(&elems[g as usize])?;
                    let &zi = lookup.get(&z).ok_or_else(not_closed)?;
                    if !inside[zi as usize] {
                        inside[zi as usize] = true;
                        reached.push(zi as usize);
                    }
                }
                head += 1;
            }
        }
        Ok(Builder { label: label.to_string(), order: n, law: Law::Payload { elems, lookup }, gens: Some(gens) }
            .build())
    }

    pub fn trivial() -> Self {
        Self::from_table("1", vec![vec![0]]).expect("trivial table is valid")
    }

    /// A group from its Cayley table. Row `a`, column `b` holds `a·b`. The
    /// identity need not be at index 0; elements are renumbered so that it is.
    pub fn from_table(label: &str, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n) {
            return Err(Error::StructureFailed("table must be square and nonempty".into()));
        }
        if table.iter().flatten().any(|&x| x >= n) {
            return Err(Error::StructureFailed("table entry out of range".into()));
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::StructureFailed("no identity".into()))?;
        for r in 0..n {
            let row: HashSet<usize> = table[r].iter().copied().collect();
            let col: HashSet<usize> = (0..n).map(|c| table[c][r]).collect();
            if row.len() != n || col.len() != n {
                return Err(Error::StructureFailed("table is not a Latin square".into()));
            }
        }
        // renumber: swap e and 0
        let relabel = |x: usize| {
            if x == e {
                0
            } else if x == 0 {
                e
            } else {
                x
            }
        };
        let mut flat = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                flat[relabel(a) * n + relabel(b)] = relabel(table[a][b]) as u32;
            }
        }
        let mul = |a: usize, b: usize| flat[a * n + b] as usize;
        if n <= 256 {
            for a in 0..n {
                for b in 0..n {
                    let ab = mul(a, b);
                    for c in 0..n {
                        if mul(ab, c) != mul(a, mul(b, c)) {
                            return Err(Error::StructureFailed("table is not associative".into()));
                        }
                    }
                }
            }
        } else {
            // Light's test on a generating set
            let gens = greedy_generators(n, &mul);
            for &g in &gens {
                for a in 0..n {
                    let ag = mul(a, g as usize);
                    for c in 0..n {
                        if mul(ag, c) != mul(a, mul(g as usize, c)) {
                            return Err(Error::StructureFailed("table is not associative".into()));
                        }
                    }
                }
            }
        }
        Ok(Builder { label: label.to_string(), order: n, law: Law::Table(flat), gens: None }.build())
    }

    pub fn label(&self) -> &str {
        &self.0.label
    }

    /// Process-unique identifier of this group object.
    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn order(&self) -> usize {
        self.0.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.0.memo {
            Some(t) => t[a * self.0.order + b] as usize,
            None => law_mul(&self.0.law, self.0.order, a, b),
        }
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.0.inverse[a] as usize
    }

    /// `g a g⁻¹`.
    pub fn conjugate(&self, a: usize, g: usize) -> usize {
        self.mul(self.mul(g, a), self.inv(g))
    }

    pub fn pow(&self, a: usize, k: u64) -> usize {
        let k = k % self.element_order(a) as u64;
        let mut acc = 0;
        for _ in 0..k {
            acc = self.mul(acc, a);
        }
        acc
    }

    pub fn element_order(&self, a: usize) -> u32 {
        self.0.elem_order[a]
    }

    pub fn exponent(&self) -> u64 {
        self.0.exponent
    }

    pub fn generators(&self) -> &[u32] {
        &self.0.gens
    }

    /// The concrete payload of element `i`, when the group has one.
    pub fn element(&self, i: usize) -> GroupElement {
        match &self.0.law {
            Law::Payload { elems, .. } => elems[i].clone(),
            Law::Sub { parent, members, .. } => parent.element(members[i] as usize),
            _ => GroupElement::Abstract(i),
        }
    }

    pub fn matrix(&self, i: usize) -> Option<FqMatrix> {
        match self.element(i) {
            GroupElement::Matrix(m) => Some(m),
            _ => None,
        }
    }

    /// Index of a concrete payload.
    pub fn index_of(&self, e: &GroupElement) -> Option<usize> {
        match &self.0.law {
            Law::Payload { lookup, .. } => lookup.get(e).map(|&i| i as usize),
            Law::Sub { parent, position, .. } => {
                parent.index_of(e).and_then(|j| (position[j] != u32::MAX).then_some(position[j] as usize))
            }
            _ => match e {
                GroupElement::Abstract(i) if *i < self.order() => Some(*i),
                _ => None,
            },
        }
    }

    /// Components `(a, b)` of an element of a direct product.
    pub fn product_components(&self, i: usize) -> Option<(usize, usize)> {
        match &self.0.law {
            Law::Product { right, .. } => Some((i / right.order(), i % right.order())),
            Law::Sub { parent, members, .. } => parent.product_components(members[i] as usize),
            _ => None,
        }
    }

    /// Factors of a direct product (looking through subgroups).
    pub fn product_factors(&self) -> Option<(FiniteGroup, FiniteGroup)> {
        match &self.0.law {
            Law::Product { left, right } => Some((left.clone(), right.clone())),
            Law::Sub { parent, .. } => parent.product_factors(),
            _ => None,
        }
    }

    /// Components `(a, b, s)` of an element `(a, b)·τ^s` of a swap extension.
    pub fn swap_components(&self, i: usize) -> Option<(usize, usize, usize)> {
        match &self.0.law {
            Law::Swap { base } => {
                let m = base.order();
                Some((i / (m * m), (i % (m * m)) / m, i % m)).map(|(s, a, b)| (a, b, s))
            }
            _ => None,
        }
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn is_abelian(&self) -> bool {
        let g = self.generators();
        g.iter().all(|&a| g.iter().all(|&b| self.mul(a as usize, b as usize) == self.mul(b as usize, a as usize)))
    }

    pub fn conjugacy_classes(&self) -> Arc<ConjugacyClasses> {
        self.0.classes.get_or_init(|| Arc::new(ConjugacyClasses::compute(self))).clone()
    }

    /// Full multiplication table, row `a` column `b` = `a·b`.
    pub fn table(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        (0..n).map(|a| (0..n).map(|b| self.mul(a, b)).collect()).collect()
    }

    /// Content hash of the group law: the full table for memoized groups,
    /// otherwise the Cayley graph on the stored generators.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        let n = self.order();
        h.update((n as u64).to_le_bytes());
        if n <= MEMO_LIMIT {
            h.update(b"table");
            for a in 0..n {
                for b in 0..n {
                    h.update((self.mul(a, b) as u32).to_le_bytes());
                }
            }
        } else {
            h.update(b"cayley");
            for &g in self.generators() {
                h.update(g.to_le_bytes());
            }
            for a in 0..n {
                for &g in self.generators() {
                    h.update((self.mul(a, g as usize) as u32).to_le_bytes());
                }
            }
        }
        hex::encode(h.finalize())
    }

    /// Subgroup generated by the given elements, numbered in BFS order.
    pub fn subgroup_generated(&self, gens: &[usize]) -> GroupHom {
        let gens: Vec<usize> = gens.iter().copied().filter(|&g| g != 0).collect();
        let mut members = vec![0u32];
        let mut seen = HashSet::from([0usize]);
        let mut head = 0;
        while head < members.len() {
            for &g in &gens {
                let y = self.mul(members[head] as usize, g);
                if seen.insert(y) {
                    members.push(y as u32);
                }
            }
            head += 1;
        }
        let pos: HashMap<usize, u32> = members.iter().enumerate().map(|(i, &m)| (m as usize, i as u32)).collect();
        let local: Vec<u32> = gens.iter().map(|g| pos[g]).collect();
        self.make_sub(members, Some(local))
    }

    /// Subgroup on an explicit member set (which must be closed).
    pub fn subgroup_from_members(&self, members: &[usize]) -> Result<GroupHom> {
        let mut m: Vec<u32> = members.iter().map(|&x| x as u32).collect();
        m.sort_unstable();
        m.dedup();
        if m.first() != Some(&0) {
            return Err(Error::NotASubgroup);
        }
        let set: HashSet<u32> = m.iter().copied().collect();
        for &a in &m {
            for &b in &m {
                if !set.contains(&(self.mul(a as usize, b as usize) as u32)) {
                    return Err(Error::NotASubgroup);
                }
            }
        }
        Ok(self.make_sub(m, None))
    }

    /// Subgroup of elements satisfying a predicate (checked for closure).
    pub fn subgroup_where<F: Fn(usize) -> bool>(&self, pred: F) -> Result<GroupHom> {
        let members: Vec<usize> = self.elements().filter(|&x| pred(x)).collect();
        self.subgroup_from_members(&members)
    }

    fn make_sub(&self, members: Vec<u32>, gens: Option<Vec<u32>>) -> GroupHom {
        let mut position = vec![u32::MAX; self.order()];
        for (i, &m) in members.iter().enumerate() {
            position[m as usize] = i as u32;
        }
        let k = members.len();
        let images = members.clone();
        let sub = Builder {
            label: format!("sub({})", self.label()),
            order: k,
            law: Law::Sub { parent: self.clone(), members, position },
            gens,
        }
        .build();
        GroupHom { source: sub, target: self.clone(), images }
    }

    pub fn center(&self) -> GroupHom {
        let g = self.generators();
        let members: Vec<u32> = self
            .elements()
            .filter(|&x| g.iter().all(|&s| self.mul(x, s as usize) == self.mul(s as usize, x)))
            .map(|x| x as u32)
            .collect();
        self.make_sub(members, None)
    }

    /// Smallest normal subgroup containing the given elements.
    pub fn normal_closure(&self, elems: &[usize]) -> GroupHom {
        let mut gens: Vec<usize> = elems.to_vec();
        loop {
            let h = self.subgroup_generated(&gens);
            let inside: HashSet<u32> = h.images.iter().copied().collect();
            let mut grew = false;
            for &x in h.source.generators() {
                let x = h.images[x as usize] as usize;
                for &s in self.generators() {
                    let c = self.conjugate(x, s as usize);
                    if !inside.contains(&(c as u32)) {
                        gens.push(c);
                        grew = true;
                        break;
                    }
                }
                if grew {
                    break;
                }
            }
            if !grew {
                return h;
            }
        }
    }

    pub fn derived_subgroup(&self) -> GroupHom {
        let g = self.generators();
        let mut comms = Vec::new();
        for &a in g {
            for &b in g {
                let (a, b) = (a as usize, b as usize);
                let c = self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)));
                if c != 0 {
                    comms.push(c);
                }
            }
        }
        self.normal_closure(&comms)
    }

    pub fn is_normal(&self, sub: &GroupHom) -> bool {
        if sub.target != *self {
            return false;
        }
        let inside: HashSet<u32> = sub.images.iter().copied().collect();
        sub.source.generators().iter().all(|&x| {
            let x = sub.images[x as usize] as usize;
            self.generators().iter().all(|&s| inside.contains(&(self.conjugate(x, s as usize) as u32)))
        })
    }

    /// `G/N` with the projection; cosets are numbered by least representative.
    pub fn quotient(&self, normal: &GroupHom) -> Result<(FiniteGroup, GroupHom)> {
        if !self.is_normal(normal) {
            return Err(Error::NotNormal);
        }
        let n = self.order();
        let mut coset_of = vec![u32::MAX; n];
        let mut reps = Vec::new();
        for x in 0..n {
            if coset_of[x] != u32::MAX {
                continue;
            }
            let c = reps.len() as u32;
            reps.push(x as u32);
            for &m in &normal.images {
                coset_of[self.mul(x, m as usize)] = c;
            }
        }
        let order = reps.len();
        let q = Builder {
            label: format!("{}/N", self.label()),
            order,
            law: Law::Quotient { parent: self.clone(), reps, coset_of: coset_of.clone() },
            gens: None,
        }
        .build();
        let proj = GroupHom::new(self.clone(), q.clone(), coset_of)?;
        Ok((q, proj))
    }

    pub fn direct_product(left: &FiniteGroup, right: &FiniteGroup) -> FiniteGroup {
        Builder {
            label: format!("{}x{}", left.label(), right.label()),
            order: left.order() * right.order(),
            law: Law::Product { left: left.clone(), right: right.clone() },
            gens: None,
        }
        .build()
    }

    /// `(G × G) ⋊ Z/2` where the generator of `Z/2` swaps coordinates.
    pub fn semidirect_with_swap(base: &FiniteGroup, cap: usize) -> Result<SwapExtension> {
        let m = base.order();
        if 2 * m * m > cap {
            return Err(Error::ClosureExceedsCap { cap });
        }
        let group = Builder {
            label: format!("({0}x{0}):swap", base.label()),
            order: 2 * m * m,
            law: Law::Swap { base: base.clone() },
            gens: None,
        }
        .build();
        let product = FiniteGroup::direct_product(base, base);
        let images = (0..(m * m) as u32).collect();
        let embedding = GroupHom::new(product.clone(), group.clone(), images)?;
        Ok(SwapExtension { group, base: base.clone(), product, embedding, swap: m * m })
    }

    /// Invariant factors `d_1 | d_2 | …` (all > 1) of an abelian group.
    pub fn abelian_invariants(&self) -> Option<Vec<u64>> {
        if !self.is_abelian() {
            return None;
        }
        let n = self.order() as u64;
        let mut primes = Vec::new();
        let mut m = n;
        let mut p = 2;
        while p * p <= m {
            if m.is_multiple_of(p) {
                primes.push(p);
                while m.is_multiple_of(p) {
                    m /= p;
                }
            }
            p += 1;
        }
        if m > 1 {
            primes.push(m);
        }
        // per prime: exponents of the cyclic factors, from |A[p^k]|
        let mut parts: Vec<Vec<u64>> = Vec::new();
        for &p in &primes {
            let sylow = p_part(n, p);
            let mut counts = vec![1u64];
            let mut pk = 1u64;
            while *counts.last().unwrap() < sylow {
                pk *= p;
                let c = self.elements().filter(|&x| pk.is_multiple_of(self.element_order(x) as u64)).count() as u64;
                counts.push(c);
            }
            // number of factors of order ≥ p^k is log_p(counts[k]/counts[k-1])
            let logs: Vec<u32> = counts.windows(2).map(|w| ilog(w[1] / w[0], p)).collect();
            let mut exps = Vec::new();
            for (k, &cnt) in logs.iter().enumerate() {
                let next = logs.get(k + 1).copied().unwrap_or(0);
                for _ in 0..(cnt - next) {
                    exps.push(p.pow(k as u32 + 1));
                }
            }
            exps.sort_unstable();
            parts.push(exps);
        }
        let len = parts.iter().map(|v| v.len()).max().unwrap_or(0);
        let mut inv = vec![1u64; len];
        for exps in &parts {
            for (i, &e) in exps.iter().rev().enumerate() {
                inv[len - 1 - i] *= e;
            }
        }
        Some(inv)
    }

    pub fn to_json(&self) -> GroupJson {
        GroupJson { name: Some(self.label().to_string()), order: self.order(), table: self.table(), labels: None }
    }

    pub fn from_json(j: &GroupJson) -> Result<FiniteGroup> {
        if j.table.len() != j.order {
            return Err(Error::StructureFailed("order does not match table size".into()));
        }
        if let Some(l) = &j.labels {
            if l.len() != j.order {
                return Err(Error::StructureFailed("labels do not match order".into()));
            }
        }
        FiniteGroup::from_table(j.name.as_deref().unwrap_or("table"), j.table.clone())
    }
}

fn p_part(mut n: u64, p: u64) -> u64 {
    let mut r = 1;
    while n.is_multiple_of(p) {
        n /= p;
        r *= p;
    }
    r
}

fn ilog(mut x: u64, p: u64) -> u32 {
    let mut k = 0;
    while x > 1 {
        x /= p;
        k += 1;
    }
    k
}

/// JSON form of a table-defined group.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GroupJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// `(G × G) ⋊ Z/2` together with its index-two subgroup `G × G`.
#[derive(Clone, Debug)]
pub struct SwapExtension {
    pub group: FiniteGroup,
    pub base: FiniteGroup,
    pub product: FiniteGroup,
    /// `G × G ↪ (G × G) ⋊ Z/2`.
    pub embedding: GroupHom,
    /// Index of the coordinate swap `τ`.
    pub swap: usize,
}

/// Conjugacy classes in deterministic order (by least element index).
#[derive(Debug)]
pub struct ConjugacyClasses {
    class_of: Vec<u32>,
    classes: Vec<Vec<u32>>,
    orders: Vec<u32>,
    inverse_class: Vec<usize>,
}

impl ConjugacyClasses {
    fn compute(g: &FiniteGroup) -> Self {
        let n = g.order();
        let gens = g.generators();
        let mut class_of = vec![u32::MAX; n];
        let mut classes: Vec<Vec<u32>> = Vec::new();
        for x in 0..n {
            if class_of[x] != u32::MAX {
                continue;
            }
            let c = classes.len() as u32;
            class_of[x] = c;
            let mut members = vec![x as u32];
            let mut head = 0;
            while head < members.len() {
                let y = members[head] as usize;
                for &s in gens {
                    let z = g.conjugate(y, s as usize);
                    if class_of[z] == u32::MAX {
                        class_of[z] = c;
                        members.push(z as u32);
                    }
                }
                head += 1;
            }
            members.sort_unstable();
            classes.push(members);
        }
        let orders = classes.iter().map(|c| g.element_order(c[0] as usize)).collect();
        let inverse_class = classes.iter().map(|c| class_of[g.inv(c[0] as usize)] as usize).collect();
        ConjugacyClasses { class_of, classes, orders, inverse_class }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x] as usize
    }

    pub fn members(&self, c: usize) -> &[u32] {
        &self.classes[c]
    }

    pub fn representative(&self, c: usize) -> usize {
        self.classes[c][0] as usize
    }

    pub fn size(&self, c: usize) -> usize {
        self.classes[c].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.len()).collect()
    }

    /// Order of the elements in class `c`.
    pub fn element_order(&self, c: usize) -> u32 {
        self.orders[c]
    }

    pub fn inverse_class(&self, c: usize) -> usize {
        self.inverse_class[c]
    }

    /// Class of `x^k` for `x` in class `c`.
    pub fn power_class(&self, g: &FiniteGroup, c: usize, k: u64) -> usize {
        self.class_of(g.pow(self.representative(c), k))
    }
}

/// A verified homomorphism between two enumerated groups.
#[derive(Clone, Debug)]
pub struct GroupHom {
    source: FiniteGroup,
    target: FiniteGroup,
    images: Vec<u32>,
}

impl GroupHom {
    /// Checks `f(x·s) = f(x)·f(s)` for every `x` and every generator `s`,
    /// which forces multiplicativity on all pairs.
    pub fn new(source: FiniteGroup, target: FiniteGroup, images: Vec<u32>) -> Result<Self> {
        if images.len() != source.order() {
            return Err(Error::NotAHomomorphism("image list has wrong length".into()));
        }
        if images.iter().any(|&y| y as usize >= target.order()) {
            return Err(Error::NotAHomomorphism("image out of range".into()));
        }
        if images[0] != 0 {
            return Err(Error::NotAHomomorphism("identity not preserved".into()));
        }
        for x in source.elements() {
            for &s in source.generators() {
                let s = s as usize;
                let lhs = images[source.mul(x, s)] as usize;
                let rhs = target.mul(images[x] as usize, images[s] as usize);
                if lhs != rhs {
                    return Err(Error::NotAHomomorphism(format!("fails at ({x}, {s})")));
                }
            }
        }
        Ok(GroupHom { source, target, images })
    }

    /// The homomorphism determined by images of the source generators.
    pub fn from_generator_images(source: FiniteGroup, target: FiniteGroup, gen_images: &[usize]) -> Result<Self> {
        let gens = source.generators().to_vec();
        if gens.len() != gen_images.len() {
            return Err(Error::NotAHomomorphism("one image per generator required".into()));
        }
        let mut images = vec![u32::MAX; source.order()];
        images[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (&s, &t) in gens.iter().zip(gen_images) {
                let y = source.mul(x, s as usize);
                if images[y] == u32::MAX {
                    images[y] = target.mul(images[x] as usize, t) as u32;
                    queue.push_back(y);
                }
            }
        }
        GroupHom::new(source, target, images)
    }

    pub fn identity(g: &FiniteGroup) -> Self {
        GroupHom { source: g.clone(), target: g.clone(), images: (0..g.order() as u32).collect() }
    }

    /// The map sending everything to the identity.
    pub fn trivial(source: &FiniteGroup, target: &FiniteGroup) -> Self {
        GroupHom { source: source.clone(), target: target.clone(), images: vec![0; source.order()] }
    }

    pub fn source(&self) -> &FiniteGroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteGroup {
        &self.target
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GroupHom) -> Result<GroupHom> {
        if self.target != other.source {
            return Err(Error::GroupMismatch);
        }
        Ok(GroupHom {
            source: self.source.clone(),
            target: other.target.clone(),
            images: self.images.iter().map(|&x| other.images[x as usize]).collect(),
        })
    }

    pub fn is_injective(&self) -> bool {
        let set: HashSet<u32> = self.images.iter().copied().collect();
        set.len() == self.images.len()
    }

    pub fn is_surjective(&self) -> bool {
        let set: HashSet<u32> = self.images.iter().copied().collect();
        set.len() == self.target.order()
    }

    pub fn kernel(&self) -> GroupHom {
        let members: Vec<u32> = self.source.elements().filter(|&x| self.images[x] == 0).map(|x| x as u32).collect();
        self.source.make_sub(members, None)
    }

    /// The image as a subgroup of the target.
    pub fn image(&self) -> GroupHom {
        let mut members: Vec<u32> = self.images.clone();
        members.sort_unstable();
        members.dedup();
        self.target.make_sub(members, None)
    }

    /// Whether the image is normal with abelian cokernel; when it is, also
    /// the cokernel and the projection onto it.
    pub fn image_normal_abelian_cokernel(&self) -> ImageCokernel {
        let image = self.image();
        if !self.target.is_normal(&image) {
            return ImageCokernel { image_normal: false, cokernel_abelian: None, cokernel: None };
        }
        let (q, proj) = self.target.quotient(&image).expect("normality checked");
        let abelian = q.is_abelian();
        ImageCokernel { image_normal: true, cokernel_abelian: Some(abelian), cokernel: abelian.then_some((q, proj)) }
    }
}

/// Result of [`GroupHom::image_normal_abelian_cokernel`].
#[derive(Clone, Debug)]
pub struct ImageCokernel {
    pub image_normal: bool,
    /// `None` when the image is not normal and the cokernel is undefined.
    pub cokernel_abelian: Option<bool>,
    pub cokernel: Option<(FiniteGroup, GroupHom)>,
}

impl ImageCokernel {
    pub fn holds(&self) -> bool {
        self.image_normal && self.cokernel_abelian == Some(true)
    }
}

/// Searches for an isomorphism by assigning images to a generating set.
pub fn find_isomorphism(a: &FiniteGroup, b: &FiniteGroup) -> Option<GroupHom> {
    if a.order() != b.order() {
        return None;
    }
    let mut oa: Vec<u32> = a.elements().map(|x| a.element_order(x)).collect();
    let mut ob: Vec<u32> = b.elements().map(|x| b.element_order(x)).collect();
    oa.sort_unstable();
    ob.sort_unstable();
    if oa != ob {
        return None;
    }
    let gens = a.generators().to_vec();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| b.elements().filter(|&y| b.element_order(y) == a.element_order(g as usize)).collect())
        .collect();
    let mut choice = vec![0usize; gens.len()];
    fn search(
        depth: usize,
        a: &FiniteGroup,
        b: &FiniteGroup,
        cands: &[Vec<usize>],
        choice: &mut Vec<usize>,
    ) -> Option<GroupHom> {
        if depth == cands.len() {
            let hom = GroupHom::from_generator_images(a.clone(), b.clone(), choice).ok()?;
            return hom.is_injective().then_some(hom);
        }
        for &y in &cands[depth] {
            choice[depth] = y;
            if let Some(h) = search(depth + 1, a, b, cands, choice) {
                return Some(h);
            }
        }
        None
    }
    search(0, a, b, &candidates, &mut choice)
}

/// Cyclic group `Z/n` as a table group.
pub fn cyclic(n: usize) -> FiniteGroup {
    let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    FiniteGroup::from_table(&format!("C{n}"), table).expect("cyclic table is a group")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm_group(label: &str, n: usize, gens: &[&[&[u32]]]) -> FiniteGroup {
        let g: Vec<GroupElement> = gens.iter().map(|cs| GroupElement::Perm(Perm::from_cycles(n, cs))).collect();
        FiniteGroup::from_generators(label, &g, DEFAULT_CAP).unwrap()
    }

    fn s3() -> FiniteGroup {
        perm_group("S3", 3, &[&[&[0, 1]], &[&[0, 1, 2]]])
    }

    fn q8() -> FiniteGroup {
        // regular representation of i and j on {±1, ±i, ±j, ±k}
        // points: 0=1 1=i 2=j 3=k 4=-1 5=-i 6=-j 7=-k; right multiplication
        let ri: &[&[u32]] = &[&[0, 1, 4, 5], &[2, 7, 6, 3]];
        let rj: &[&[u32]] = &[&[0, 2, 4, 6], &[1, 3, 5, 7]];
        perm_group("Q8", 8, &[ri, rj])
    }

    fn brute_classes(g: &FiniteGroup) -> Vec<usize> {
        let mut seen = vec![false; g.order()];
        let mut sizes = Vec::new();
        for x in g.elements() {
            if seen[x] {
                continue;
            }
            let orbit: HashSet<usize> = g.elements().map(|h| g.conjugate(x, h)).collect();
            for &y in &orbit {
                seen[y] = true;
            }
            sizes.push(orbit.len());
        }
        sizes
    }

    #[test]
    fn empty_generators_give_trivial_group() {
        let g = FiniteGroup::from_generators("1", &[], DEFAULT_CAP).unwrap();
        assert_eq!(g.order(), 1);
    }

    #[test]
    fn quaternion_classes() {
        let g = q8();
        assert_eq!(g.order(), 8);
        let mut sizes = g.conjugacy_classes().sizes();
        assert_eq!(sizes, brute_classes(&g));
        sizes.sort();
        assert_eq!(sizes, vec![1, 1, 2, 2, 2]);
    }

    #[test]
    fn s3_classes() {
        let g = s3();
        let cc = g.conjugacy_classes();
        assert_eq!(cc.sizes(), brute_classes(&g));
        let mut s = cc.sizes();
        s.sort();
        assert_eq!(s, vec![1, 2, 3]);
        assert_eq!(cc.members(0), &[0]);
    }

    #[test]
    fn abelian_classes_are_singletons() {
        let g = cyclic(12);
        assert_eq!(g.conjugacy_classes().len(), 12);
        assert_eq!(g.derived_subgroup().source().order(), 1);
    }

    #[test]
    fn cap_is_enforced() {
        let gens = [
            GroupElement::Perm(Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]])),
            GroupElement::Perm(Perm::from_cycles(5, &[&[0, 1]])),
        ];
        assert!(matches!(FiniteGroup::from_generators("S5", &gens, 100), Err(Error::ClosureExceedsCap { cap: 100 })));
    }

    #[test]
    fn quotient_of_q8_by_center_is_klein() {
        let g = q8();
        let z = g.center();
        assert_eq!(z.source().order(), 2);
        let (q, proj) = g.quotient(&z).unwrap();
        assert_eq!(q.order(), 4);
        assert_eq!(q.exponent(), 2);
        assert!(proj.is_surjective());
        assert_eq!(q.abelian_invariants().unwrap(), vec![2, 2]);
    }

    #[test]
    fn non_normal_quotient_fails() {
        let g = s3();
        let h = g.subgroup_generated(&[g.generators()[0] as usize]);
        assert_eq!(h.source().order(), 2);
        assert!(!g.is_normal(&h));
        assert!(matches!(g.quotient(&h), Err(Error::NotNormal)));
    }

    #[test]
    fn image_normal_cokernel() {
        let g = q8();
        let z = g.center();
        let r = z.image_normal_abelian_cokernel();
        assert!(r.holds());
        assert_eq!(r.cokernel.unwrap().0.order(), 4);

        let s = s3();
        let h = s.subgroup_generated(&[s.generators()[0] as usize]);
        let r = h.image_normal_abelian_cokernel();
        assert!(!r.image_normal);
        assert_eq!(r.cokernel_abelian, None);

        let (q, proj) = s.quotient(&s.derived_subgroup()).unwrap();
        assert_eq!(q.order(), 2);
        let r = proj.image_normal_abelian_cokernel();
        assert!(r.holds());
        assert_eq!(r.cokernel.unwrap().0.order(), 1);
    }

    #[test]
    fn swap_extension_of_z2_is_dihedral() {
        let ext = FiniteGroup::semidirect_with_swap(&cyclic(2), DEFAULT_CAP).unwrap();
        assert_eq!(ext.group.order(), 8);
        let d4 = perm_group("D4", 4, &[&[&[0, 1, 2, 3]], &[&[1, 3]]]);
        assert!(find_isomorphism(&ext.group, &d4).is_some());
        assert!(find_isomorphism(&ext.group, &q8()).is_none());
        let triv = FiniteGroup::semidirect_with_swap(&FiniteGroup::trivial(), DEFAULT_CAP).unwrap();
        assert_eq!(triv.group.order(), 2);
    }

    #[test]
    fn table_roundtrip_and_validation() {
        let g = s3();
        let j = g.to_json();
        let h = FiniteGroup::from_json(&j).unwrap();
        assert!(find_isomorphism(&g, &h).is_some());
        let bad = GroupJson { name: None, order: 2, table: vec![vec![0, 1], vec![1, 1]], labels: None };
        assert!(FiniteGroup::from_json(&bad).is_err());
    }

    #[test]
    fn hom_verification_rejects_non_homs() {
        let c4 = cyclic(4);
        let c2 = cyclic(2);
        assert!(GroupHom::new(c4.clone(), c2.clone(), vec![0, 1, 0, 1]).is_ok());
        assert!(GroupHom::new(c4, c2, vec![0, 1, 1, 0]).is_err());
    }

    #[test]
    fn abelian_invariants_of_products() {
        let g = FiniteGroup::direct_product(&cyclic(4), &cyclic(6));
        assert_eq!(g.abelian_invariants().unwrap(), vec![2, 12]);
        assert_eq!(cyclic(9).abelian_invariants().unwrap(), vec![9]);
        assert!(s3().abelian_invariants().is_none());
        assert_eq!(FiniteGroup::trivial().abelian_invariants().unwrap(), Vec::<u64>::new());
    }

    #[test]
    fn group_axioms_on_structured_laws() {
        let ext = FiniteGroup::semidirect_with_swap(&s3(), DEFAULT_CAP).unwrap();
        let g = &ext.group;
        assert_eq!(g.order(), 72);
        for a in g.elements() {
            assert_eq!(g.mul(a, g.inv(a)), 0);
            for b in g.elements().step_by(5) {
                for c in g.elements().step_by(7) {
                    assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                }
            }
        }
        let sizes = g.conjugacy_classes().sizes();
        assert_eq!(sizes.iter().sum::<usize>(), 72);
        assert_eq!(sizes, brute_classes(g));
    }
}
