//! Randomized invariants of the arithmetic, group and character layers.

use charmult::catalog;
use charmult::cycnum::CycNum;
use charmult::groups::FiniteGroup;
use charmult::localfield::{HermSpace, Lattice, PadicCtx, UnramElem};
use charmult::multiplicity;
use charmult::repthy::{character_table, induce, inner_product_integer, pullback, restrict, ClassFunction};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use std::sync::OnceLock;

fn pool() -> &'static [FiniteGroup] {
    static POOL: OnceLock<Vec<FiniteGroup>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut gs = catalog::small_catalog();
        gs.retain(|g| g.order() <= 32);
        gs
    })
}

fn cyc(n: u32, coeffs: &[(i64, i64, i64)]) -> CycNum {
    CycNum::from_exponents(n, coeffs.iter().map(|&(e, a, b)| (e, BigRational::new(BigInt::from(a), BigInt::from(b)))))
}

fn cyc_strategy(n: u32) -> impl Strategy<Value = CycNum> {
    prop::collection::vec((0..n as i64, -6i64..=6, 1i64..=4), 0..5).prop_map(move |c| cyc(n, &c))
}

fn cyc_triple() -> impl Strategy<Value = (CycNum, CycNum, CycNum, i64)> {
    (1u32..=24).prop_flat_map(|n| {
        let k = (1..=n as i64).prop_filter("unit mod n", move |k| num_integer::gcd(*k, n as i64) == 1);
        (cyc_strategy(n), cyc_strategy(n), cyc_strategy(n), k)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cyclotomic_field_axioms((a, b, c, k) in cyc_triple()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a - &a), &CycNum::zero());
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        prop_assert_eq!((&a * &b).galois(k), &a.galois(k) * &b.galois(k));
        prop_assert_eq!((&a + &b).galois(k), &a.galois(k) + &b.galois(k));
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), CycNum::one());
        }
        prop_assert!((&a * &a.conj()).conj() == &a * &a.conj());
    }

    #[test]
    fn frobenius_reciprocity(gi in 0usize..64, gens in prop::collection::vec(0usize..1000, 1..3), i in 0usize..64, j in 0usize..64) {
        let g = &pool()[gi % pool().len()];
        let gens: Vec<usize> = gens.iter().map(|x| x % g.order()).collect();
        let h = g.subgroup_generated(&gens);
        let gt = character_table(g).unwrap();
        let ht = character_table(h.source()).unwrap();
        let chi = gt.row(i % gt.len());
        let psi = ht.row(j % ht.len());
        let left = inner_product_integer(&induce(psi, &h).unwrap(), chi).unwrap();
        let right = inner_product_integer(psi, &restrict(chi, &h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(induce(psi, &h).unwrap().degree().unwrap(), psi.degree().unwrap() * (g.order() / h.source().order()) as u64);
    }

    #[test]
    fn regular_identity_random(seed in any::<u64>()) {
        let f = &catalog::random_homomorphisms(pool(), 1, seed).unwrap()[0];
        let t = character_table(f.target()).unwrap();
        let regular = ClassFunction::regular(f.source());
        for chi1 in t.rows() {
            let m = inner_product_integer(&regular, &pullback(f, chi1).unwrap()).unwrap();
            prop_assert_eq!(m as u64, chi1.degree().unwrap());
        }
        let st = character_table(f.source()).unwrap();
        for chi1 in t.rows() {
            let pulled = pullback(f, chi1).unwrap();
            let total: i64 = st.rows().iter()
                .map(|chi2| chi2.degree().unwrap() as i64 * inner_product_integer(chi2, &pulled).unwrap())
                .sum();
            prop_assert_eq!(total as u64, chi1.degree().unwrap());
        }
    }

    #[test]
    fn constancy_random(seed in any::<u64>()) {
        let f = &catalog::random_homomorphisms(pool(), 1, seed).unwrap()[0];
        prop_assume!(f.image_normal_abelian_cokernel().holds());
        let t1 = character_table(f.target()).unwrap();
        let t2 = character_table(f.source()).unwrap();
        for chi2 in t2.rows() {
            prop_assert!(multiplicity::constancy_check(f, &t1, chi2).unwrap().pass());
        }
    }

    #[test]
    fn lattice_dual_is_an_involution(
        exps in prop::collection::vec(0u32..3, 4),
        ops in prop::collection::vec((0usize..4, 0usize..4, 0i64..9, 0i64..9), 0..8),
        shift in -1i32..=1,
    ) {
        let ctx = PadicCtx::new(3, 10).unwrap();
        let space = HermSpace::hyperbolic(ctx, 2);
        let mut cols: Vec<Vec<UnramElem>> = (0..4)
            .map(|j| (0..4).map(|i| if i == j { ctx.pi_pow(exps[j]) } else { ctx.zero() }).collect())
            .collect();
        for (a, b, x, y) in ops {
            if a != b {
                let c = ctx.elem(x, y);
                let add: Vec<UnramElem> = cols[b].iter().map(|e| e.mul(&c)).collect();
                for (slot, e) in cols[a].iter_mut().zip(add) {
                    *slot = slot.add(&e);
                }
            }
        }
        let l = Lattice::from_columns(ctx, shift, &cols).unwrap();
        let dual = l.dual(&space).unwrap();
        prop_assert_eq!(dual.dual(&space).unwrap(), l.clone());
        prop_assert_eq!(l.scale(1).dual(&space).unwrap(), dual.scale(-1));
        prop_assert_eq!(dual.volume(), -l.volume());
        let bigger = Lattice::from_columns(ctx, shift + 1, &cols).unwrap();
        prop_assert!(bigger.contains(&l).unwrap());
        prop_assert!(dual.contains(&bigger.dual(&space).unwrap()).unwrap());
    }
}

#[test]
fn klein_criterion_matches_direct_decomposition() {
    let hits = multiplicity::klein_search(&catalog::order16()).unwrap();
    assert!(!hits.is_empty());
    for h in &hits {
        assert!(h.verdict.direct_agrees, "{} pi={}", h.group, h.pi);
        if let Some(c) = &h.construction {
            assert!(c.verified(), "{} pi={}", h.group, h.pi);
        }
    }
}
