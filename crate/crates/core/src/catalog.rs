//! Named small groups, the test battery, and random homomorphisms.

use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::groups::{cyclic, FiniteGroup, GroupElement, GroupHom, GroupJson, Perm, DEFAULT_CAP};
use crate::matgrp::field::{FiniteField, FqMatrix};

fn perm_group(label: &str, n: usize, gens: &[&[&[u32]]]) -> FiniteGroup {
    let g: Vec<GroupElement> = gens.iter().map(|cs| GroupElement::Perm(Perm::from_cycles(n, cs))).collect();
    FiniteGroup::from_generators(label, &g, DEFAULT_CAP).expect("small permutation group")
}

fn relabel(g: &FiniteGroup, label: &str) -> FiniteGroup {
    FiniteGroup::from_table(label, g.table()).expect("table of a group")
}

fn table_group(label: &str, n: usize, mul: impl Fn(usize, usize) -> usize) -> FiniteGroup {
    let table = (0..n).map(|a| (0..n).map(|b| mul(a, b)).collect()).collect();
    FiniteGroup::from_table(label, table).expect("valid group law")
}

pub fn q8() -> FiniteGroup {
    // right multiplication by i and j on 1, i, j, k, -1, -i, -j, -k
    perm_group("Q8", 8, &[&[&[0, 1, 4, 5], &[2, 7, 6, 3]], &[&[0, 2, 4, 6], &[1, 3, 5, 7]]])
}

pub fn klein() -> FiniteGroup {
    table_group("Klein", 4, |a, b| a ^ b)
}

/// Dihedral group of order `2n`.
pub fn dihedral(n: usize) -> Result<FiniteGroup> {
    if n < 1 {
        return Err(Error::Unsupported("dihedral group needs n ≥ 1".into()));
    }
    Ok(metacyclic(&format!("D{n}"), n, 2, n as u64 - 1, 0))
}

pub fn s3() -> FiniteGroup {
    perm_group("S3", 3, &[&[&[0, 1]], &[&[0, 1, 2]]])
}

pub fn s4() -> FiniteGroup {
    perm_group("S4", 4, &[&[&[0, 1]], &[&[0, 1, 2, 3]]])
}

pub fn a4() -> FiniteGroup {
    perm_group("A4", 4, &[&[&[0, 1, 2]], &[&[0, 1], &[2, 3]]])
}

fn f3_matrices(entries: &[[i64; 4]]) -> Vec<GroupElement> {
    let f = Arc::new(FiniteField::new(3, 1).expect("F3"));
    entries
        .iter()
        .map(|e| GroupElement::Matrix(FqMatrix::new(f.clone(), 2, e.iter().map(|&x| f.from_int(x)).collect())))
        .collect()
}

pub fn sl23() -> FiniteGroup {
    FiniteGroup::from_generators("SL(2,3)", &f3_matrices(&[[1, 1, 0, 1], [0, -1, 1, 0]]), DEFAULT_CAP).expect("SL(2,3)")
}

pub fn gl23() -> FiniteGroup {
    FiniteGroup::from_generators("GL(2,3)", &f3_matrices(&[[1, 1, 0, 1], [0, -1, 1, 0], [-1, 0, 0, 1]]), DEFAULT_CAP)
        .expect("GL(2,3)")
}

/// `⟨a, b | a^m, b^n = a^r, b a b⁻¹ = a^t⟩` on elements `a^i b^j`.
pub fn metacyclic(label: &str, m: usize, n: usize, t: u64, r: usize) -> FiniteGroup {
    let tp: Vec<usize> = (0..n).map(|j| (t.pow(j as u32) % m as u64) as usize).collect();
    table_group(label, m * n, |x, y| {
        let (i, j) = (x % m, x / m);
        let (k, l) = (y % m, y / m);
        let carry = if j + l >= n { r } else { 0 };
        (i + k * tp[j] + carry) % m + m * ((j + l) % n)
    })
}

/// `Z_{m_1} × … × Z_{m_k}`.
pub fn abelian(label: &str, moduli: &[usize]) -> FiniteGroup {
    let size: usize = moduli.iter().product();
    let split = |mut x: usize| -> Vec<usize> {
        moduli
            .iter()
            .map(|&m| {
                let d = x % m;
                x /= m;
                d
            })
            .collect()
    };
    table_group(label, size, |x, y| {
        let (a, b) = (split(x), split(y));
        let mut out = 0;
        for i in (0..moduli.len()).rev() {
            out = out * moduli[i] + (a[i] + b[i]) % moduli[i];
        }
        out
    })
}

/// `(Z_{m_1} × … × Z_{m_k}) ⋊ Z_n` with the generator acting by the
/// integer matrix `action` (columns are images of the basis vectors).
pub fn abelian_semidirect(label: &str, moduli: &[usize], n: usize, action: &[Vec<i64>]) -> FiniteGroup {
    let k = moduli.len();
    let base: usize = moduli.iter().product();
    let split = |mut x: usize| -> Vec<i64> {
        moduli
            .iter()
            .map(|&m| {
                let d = x % m;
                x /= m;
                d as i64
            })
            .collect()
    };
    let join = |v: &[i64]| -> usize {
        let mut out = 0;
        for i in (0..k).rev() {
            out = out * moduli[i] + v[i].rem_euclid(moduli[i] as i64) as usize;
        }
        out
    };
    let apply = |v: &[i64]| -> Vec<i64> { (0..k).map(|i| (0..k).map(|j| action[i][j] * v[j]).sum::<i64>()).collect() };
    table_group(label, base * n, |x, y| {
        let (v, j) = (split(x % base), x / base);
        let (mut w, l) = (split(y % base), y / base);
        for _ in 0..j {
            w = apply(&w);
        }
        let sum: Vec<i64> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
        join(&sum) + base * ((j + l) % n)
    })
}

/// The fourteen groups of order 16.
pub fn order16() -> Vec<FiniteGroup> {
    let c2 = cyclic(2);
    let d4 = dihedral(4).expect("D4");
    vec![
        relabel(&cyclic(16), "C16"),
        abelian("C4xC4", &[4, 4]),
        abelian_semidirect("(C2xC2):C4", &[2, 2], 4, &[vec![0, 1], vec![1, 0]]),
        metacyclic("C4:C4", 4, 4, 3, 0),
        abelian("C8xC2", &[8, 2]),
        metacyclic("M16", 8, 2, 5, 0),
        metacyclic("D8", 8, 2, 7, 0),
        metacyclic("SD16", 8, 2, 3, 0),
        metacyclic("Q16", 8, 2, 7, 4),
        abelian("C4xC2xC2", &[4, 2, 2]),
        relabel(&FiniteGroup::direct_product(&d4, &c2), "D4xC2"),
        relabel(&FiniteGroup::direct_product(&q8(), &c2), "Q8xC2"),
        abelian_semidirect("Pauli", &[4, 2], 2, &[vec![1, 2], vec![0, 1]]),
        abelian("C2^4", &[2, 2, 2, 2]),
    ]
}

/// Groups of order at most 64 used by the Klein search and the random
/// homomorphism battery.
pub fn small_catalog() -> Vec<FiniteGroup> {
    let mut out = vec![
        relabel(&cyclic(2), "C2"),
        relabel(&cyclic(4), "C4"),
        klein(),
        s3(),
        relabel(&q8(), "Q8"),
        dihedral(4).expect("D4"),
        abelian("C2^3", &[2, 2, 2]),
        relabel(&cyclic(8), "C8"),
        a4(),
        dihedral(6).expect("D6"),
        metacyclic("Dic3", 3, 4, 2, 0),
        relabel(&sl23(), "SL(2,3)"),
        relabel(&s4(), "S4"),
    ];
    out.extend(order16());
    let q8 = q8();
    let d4 = dihedral(4).expect("D4");
    out.push(relabel(&FiniteGroup::direct_product(&q8, &cyclic(4)), "Q8xC4"));
    out.push(relabel(&FiniteGroup::direct_product(&q8, &klein()), "Q8xC2xC2"));
    out.push(relabel(&FiniteGroup::direct_product(&d4, &cyclic(4)), "D4xC4"));
    out.push(relabel(&gl23(), "GL(2,3)"));
    out.push(relabel(&FiniteGroup::direct_product(&q8, &q8), "Q8xQ8"));
    out.push(relabel(&FiniteGroup::direct_product(&d4, &q8), "D4xQ8"));
    out
}

/// Groups used by the table validity battery, smallest first.
pub fn table_battery() -> Vec<FiniteGroup> {
    let mut out: Vec<FiniteGroup> = (1..=12).map(|n| relabel(&cyclic(n), &format!("C{n}"))).collect();
    out.extend([klein(), s3(), s4(), dihedral(4).expect("D4"), q8(), sl23()]);
    out
}

/// Writes `groups` as a JSON array of multiplication tables.
pub fn write_fixtures(path: &Path, groups: &[FiniteGroup]) -> Result<()> {
    let json: Vec<GroupJson> = groups.iter().map(|g| g.to_json()).collect();
    std::fs::write(path, serde_json::to_string(&json)?)?;
    Ok(())
}

/// Reads a JSON array (or a single object) of multiplication tables.
pub fn read_fixtures(path: &Path) -> Result<Vec<FiniteGroup>> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let list: Vec<GroupJson> =
        if value.is_array() { serde_json::from_value(value)? } else { vec![serde_json::from_value(value)?] };
    list.iter().map(FiniteGroup::from_json).collect()
}

/// Homomorphisms drawn from inclusions of random subgroups, quotient maps by
/// random normal closures, their composites, and maps out of cyclic groups.
pub fn random_homomorphisms(pool: &[FiniteGroup], count: usize, seed: u64) -> Result<Vec<GroupHom>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = pool.choose(&mut rng).ok_or_else(|| Error::PreconditionFailed("empty pool".into()))?;
        let pick = |rng: &mut ChaCha8Rng| rng.gen_range(0..g.order());
        let hom = match rng.gen_range(0..5) {
            0 => {
                let gens: Vec<usize> = (0..rng.gen_range(1..=2)).map(|_| pick(&mut rng)).collect();
                g.subgroup_generated(&gens)
            }
            1 => {
                let x = pick(&mut rng);
                let n = g.normal_closure(&[x]);
                g.quotient(&n)?.1
            }
            2 => {
                let gens: Vec<usize> = (0..rng.gen_range(1..=2)).map(|_| pick(&mut rng)).collect();
                let h = g.subgroup_generated(&gens);
                let n = g.normal_closure(&[pick(&mut rng)]);
                h.then(&g.quotient(&n)?.1)?
            }
            3 => {
                let x = pick(&mut rng);
                let k = g.element_order(x) as usize * rng.gen_range(1..=2);
                let images = (0..k).map(|i| g.pow(x, i as u64) as u32).collect();
                GroupHom::new(cyclic(k), g.clone(), images)?
            }
            _ => {
                let d = g.derived_subgroup();
                if rng.gen_bool(0.5) {
                    d
                } else {
                    g.quotient(&d)?.1
                }
            }
        };
        out.push(hom);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signature(g: &FiniteGroup) -> (Vec<usize>, usize, Option<Vec<u64>>, usize) {
        let mut orders = vec![0; g.order() + 1];
        for x in g.elements() {
            orders[g.element_order(x) as usize] += 1;
        }
        let d = g.derived_subgroup();
        let ab = g.quotient(&d).unwrap().0.abelian_invariants();
        (orders, g.center().source().order(), ab, d.source().order())
    }

    #[test]
    fn fourteen_groups_of_order_16() {
        let gs = order16();
        assert_eq!(gs.len(), 14);
        let sigs: Vec<_> = gs.iter().map(signature).collect();
        for (i, g) in gs.iter().enumerate() {
            assert_eq!(g.order(), 16);
            for j in 0..i {
                if sigs[i] == sigs[j] {
                    assert!(crate::groups::find_isomorphism(g, &gs[j]).is_none(), "{} ≅ {}", g.label(), gs[j].label());
                }
            }
        }
    }

    #[test]
    fn named_orders() {
        assert_eq!(dihedral(4).unwrap().order(), 8);
        assert!(!dihedral(4).unwrap().is_abelian());
        assert_eq!(sl23().order(), 24);
        assert_eq!(gl23().order(), 48);
        assert_eq!(a4().order(), 12);
        assert_eq!(metacyclic("Q16", 8, 2, 7, 4).center().source().order(), 2);
        assert!(small_catalog().iter().all(|g| g.order() <= 64));
    }

    #[test]
    fn random_homs_are_deterministic() {
        let pool = vec![q8(), s3(), dihedral(4).unwrap()];
        let a = random_homomorphisms(&pool, 20, 3).unwrap();
        let b = random_homomorphisms(&pool, 20, 3).unwrap();
        assert_eq!(a.len(), 20);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.images(), y.images());
            assert_eq!(x.source().order(), y.source().order());
        }
    }
}
