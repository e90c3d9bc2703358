//! Concrete instances with independently computed expected values.

use std::collections::BTreeSet;

use charmult::catalog;
use charmult::cycnum::CycNum;
use charmult::groups::{cyclic, find_isomorphism, FiniteGroup};
use charmult::localfield::{self, PadicCtx};
use charmult::matgrp::field::FqMatrix;
use charmult::matgrp::{self, Flavor, HermitianSpec, QuadraticExtension};
use charmult::multiplicity::{self, KleinKind};
use charmult::repthy::{
    character_table, decompose, induce, inner_product_integer, pullback, restrict, tensor, ClassFunction,
};
use charmult::Error;

fn u23(flavor: Flavor) -> matgrp::UnitaryGroup {
    matgrp::unitary_group(&HermitianSpec::new(flavor, 2, 3)).unwrap()
}

/// Every 2×2 matrix over `F_9` with `g* H g = H`, by brute force.
fn brute_force_unitary_count() -> usize {
    let ext = QuadraticExtension::new(3).unwrap();
    let f = ext.field.clone();
    let h = ext.hyperbolic(2);
    let mut count = 0;
    for code in 0..9u32.pow(4) {
        let e: Vec<u8> = (0..4).map(|i| (code / 9u32.pow(i) % 9) as u8).collect();
        let g = FqMatrix::new(f.clone(), 2, e);
        if ext.star(&g).mul(&h).mul(&g) == h {
            count += 1;
        }
    }
    count
}

#[test]
fn cyclotomic_identities() {
    assert_eq!(CycNum::zeta(1), CycNum::one());
    assert_eq!(CycNum::zeta(4).pow(2), CycNum::from_integer(-1));
    assert_eq!(&CycNum::zeta(3) + &CycNum::zeta(3).pow(2), CycNum::from_integer(-1));
    assert_eq!(&CycNum::zeta(8) * &CycNum::zeta(8).pow(3), CycNum::from_integer(-1));
    assert_eq!(CycNum::zeta(5).inv().unwrap(), CycNum::zeta(5).pow(4));
    assert_eq!(CycNum::zeta(4).conj(), -CycNum::zeta(4));
    assert_eq!(CycNum::from_fraction(3, 2).conj(), CycNum::from_fraction(3, 2));
    let a = &CycNum::zeta(7) + &CycNum::zeta(7).pow(2);
    assert_eq!(a.conj(), &CycNum::zeta(7).pow(6) + &CycNum::zeta(7).pow(5));
}

#[test]
fn class_structure() {
    let mut sizes = catalog::q8().conjugacy_classes().sizes();
    sizes.sort();
    assert_eq!(sizes, vec![1, 1, 2, 2, 2]);
    let mut sizes = catalog::s3().conjugacy_classes().sizes();
    sizes.sort();
    assert_eq!(sizes, vec![1, 2, 3]);
    assert_eq!(cyclic(6).conjugacy_classes().len(), 6);
    assert_eq!(FiniteGroup::from_generators("empty", &[], 10).unwrap().order(), 1);
}

#[test]
fn quotients_and_centers() {
    let q8 = catalog::q8();
    let (k, _) = q8.quotient(&q8.center()).unwrap();
    assert_eq!((k.order(), k.exponent()), (4, 2));
    assert_eq!(cyclic(5).derived_subgroup().source().order(), 1);

    let u = u23(Flavor::U);
    let z = u.group.center();
    assert_eq!(z.source().order(), 4);
    assert_eq!(z.source().abelian_invariants(), Some(vec![4]));

    let cok = q8.center().image_normal_abelian_cokernel();
    assert!(cok.holds());
    let s3 = catalog::s3();
    let t = s3.elements().find(|&x| s3.element_order(x) == 2).unwrap();
    assert!(!s3.subgroup_generated(&[t]).image_normal_abelian_cokernel().holds());
}

#[test]
fn swap_extensions() {
    assert_eq!(FiniteGroup::semidirect_with_swap(&FiniteGroup::trivial(), 100).unwrap().group.order(), 2);
    let c2 = FiniteGroup::semidirect_with_swap(&cyclic(2), 100).unwrap().group;
    assert!(find_isomorphism(&c2, &catalog::dihedral(4).unwrap()).is_some());
    let u = u23(Flavor::U);
    assert_eq!(FiniteGroup::semidirect_with_swap(&u.group, 100_000).unwrap().group.order(), 18432);
}

#[test]
fn small_tables() {
    assert_eq!(character_table(&catalog::q8()).unwrap().degrees(), vec![1, 1, 1, 1, 2]);
    let t = character_table(&cyclic(2)).unwrap();
    let values: Vec<Vec<i64>> =
        t.rows().iter().map(|r| r.values().iter().map(|v| v.to_integer().unwrap()).collect()).collect();
    assert_eq!(values, vec![vec![1, 1], vec![1, -1]]);
    let u = u23(Flavor::U);
    let t = character_table(&u.group).unwrap();
    assert_eq!(t.degrees().iter().map(|d| d * d).sum::<u64>(), 96);
    assert_eq!(t.len(), u.group.conjugacy_classes().len());
    for row in t.rows() {
        assert_eq!(inner_product_integer(row, row).unwrap(), 1);
    }
}

#[test]
fn restriction_induction_basics() {
    let q8 = catalog::q8();
    let t = character_table(&q8).unwrap();
    let z = q8.center();
    let pi = t.rows().iter().find(|r| r.degree() == Some(2)).unwrap();
    let zt = character_table(z.source()).unwrap();
    let sign = zt.rows().iter().position(|r| *r != ClassFunction::trivial(z.source())).unwrap();
    assert_eq!(decompose(&restrict(pi, &z).unwrap(), &zt).unwrap(), vec![(sign, 2)]);
    assert_eq!(restrict(&ClassFunction::trivial(&q8), &z).unwrap(), ClassFunction::trivial(z.source()));
    assert_eq!(induce(&ClassFunction::trivial(z.source()), &z).unwrap().degree(), Some(4));
    let regular = decompose(&ClassFunction::regular(&q8), &t).unwrap();
    assert!(regular.iter().all(|&(i, m)| t.row(i).degree() == Some(m)));
    assert_eq!(tensor(pi, &ClassFunction::trivial(&q8)).unwrap(), *pi);
}

#[test]
fn unitary_orders() {
    let oracle = brute_force_unitary_count();
    assert_eq!(oracle, 96);
    assert_eq!(matgrp::unitary_order(2, 3), 96);
    let u = u23(Flavor::U);
    let su = u23(Flavor::SU);
    assert_eq!(u.order(), oracle);
    assert_eq!(su.order(), 24);
    assert_eq!(su.order() * 4, u.order());
    assert_eq!(u23(Flavor::SUxU).order(), 2304);
    for x in u.group.elements() {
        let g = u.matrix(x);
        assert_eq!(u.ext.star(&g).mul(&u.form).mul(&g), u.form);
    }
}

#[test]
fn det_and_similitude_images() {
    let u = u23(Flavor::U);
    let dets: BTreeSet<u8> = u.group.elements().map(|x| u.det(x)).collect();
    let f = &u.ext.field;
    let norm_one: BTreeSet<u8> = f.elements().filter(|&a| a != 0 && f.mul(a, u.ext.bar(a)) == 1).collect();
    assert_eq!(dets, norm_one);
    assert_eq!(dets.len(), 4);

    let gu = u23(Flavor::GU);
    let sims: BTreeSet<u8> = gu.group.elements().map(|x| gu.similitude(x)).collect();
    let base: BTreeSet<u8> = gu.ext.base_units().into_iter().collect();
    assert_eq!(sims, base);
    assert_eq!(sims.len(), 2);
}

#[test]
fn quadratic_characters() {
    let u = u23(Flavor::U);
    let quadratic = u.linear_characters_via_det().unwrap().iter().filter(|c| c.quadratic).count();
    assert_eq!(quadratic, 1);
    assert!(matches!(matgrp::pick_rho(2), Err(Error::NoQuadraticCharacter { q: 2 })));
}

#[test]
fn cuspidal_rows() {
    let u = u23(Flavor::U);
    let t = character_table(&u.group).unwrap();
    assert!(!u.is_cuspidal(&ClassFunction::trivial(&u.group)).unwrap());
    let cusp: Vec<usize> = (0..t.len()).filter(|&i| u.is_cuspidal(t.row(i)).unwrap()).collect();
    assert_eq!(cusp.len(), 6);
    assert!(cusp.iter().all(|&i| t.row(i).degree() == Some(2)));

    let borel = u.group.subgroup_where(|x| u.matrix(x).get(1, 0) == 0).unwrap();
    let perm = induce(&ClassFunction::trivial(borel.source()), &borel).unwrap();
    for (i, _) in decompose(&perm, &t).unwrap() {
        assert!(!cusp.contains(&i));
    }

    let choice = matgrp::pick_rho(3).unwrap();
    let rho = choice.table.row(choice.rho);
    assert_eq!(rho.degree(), Some(2));
    assert_ne!(tensor(rho, &choice.chi).unwrap(), *rho);
    let su = choice.unitary.group.subgroup_where(|x| choice.unitary.det(x) == 1).unwrap();
    let res = restrict(rho, &su).unwrap();
    assert_eq!(inner_product_integer(&res, &res).unwrap(), 1);
}

#[test]
fn pullback_is_trivial_on_kernel() {
    let q8 = catalog::q8();
    let (_, proj) = q8.quotient(&q8.center()).unwrap();
    let t = character_table(proj.target()).unwrap();
    let ker = proj.kernel();
    for chi in t.rows() {
        let pulled = pullback(&proj, chi).unwrap();
        for k in ker.source().elements() {
            assert_eq!(*pulled.at(ker.apply(k)), CycNum::from_integer(chi.degree().unwrap() as i64));
        }
    }
    let id = charmult::groups::GroupHom::identity(&q8);
    let tq = character_table(&q8).unwrap();
    assert!(tq.rows().iter().all(|r| pullback(&id, r).unwrap() == *r));
}

#[test]
fn multiplicity_values() {
    let q8 = catalog::q8();
    let t = character_table(&q8).unwrap();
    let id = charmult::groups::GroupHom::identity(&q8);
    let regular = ClassFunction::regular(&q8);
    let values: Vec<i64> =
        t.rows().iter().map(|r| inner_product_integer(&regular, &pullback(&id, r).unwrap()).unwrap()).collect();
    assert_eq!(values, vec![1, 1, 1, 1, 2]);

    let z = q8.center();
    let zt = character_table(z.source()).unwrap();
    let sign = zt.rows().iter().find(|r| **r != ClassFunction::trivial(z.source())).unwrap();
    let r = multiplicity::constancy_check(&z, &t, sign).unwrap();
    assert!(r.pass());
    assert_eq!(r.decomposition.len(), 1);
    assert_eq!(r.decomposition[0].1, 2);
    assert_eq!(t.row(r.decomposition[0].0.trim_start_matches("chi").parse::<usize>().unwrap()).degree(), Some(2));

    let m = multiplicity::conjectural_multiplicity(&id, t.row(4), t.row(4)).unwrap();
    assert_eq!(m.value, 1);
    assert!(m.warning.is_none());
}

#[test]
fn induced_invariance_examples() {
    let q8 = catalog::q8();
    let t = character_table(&q8).unwrap();
    let z = q8.center();
    let zt = character_table(z.source()).unwrap();
    let sign = zt.rows().iter().find(|r| **r != ClassFunction::trivial(z.source())).unwrap();
    let r = multiplicity::induced_invariance_check(&z, sign, &t).unwrap();
    assert!(r.pass());
    assert_eq!(r.decomposition.len(), 1);
    assert_eq!(r.decomposition[0].1, 2);

    let c4 = cyclic(4);
    let c4t = character_table(&c4).unwrap();
    let two = c4.subgroup_generated(&[2]);
    let twot = character_table(two.source()).unwrap();
    let nontrivial = twot.rows().iter().find(|r| **r != ClassFunction::trivial(two.source())).unwrap();
    let r = multiplicity::induced_invariance_check(&two, nontrivial, &c4t).unwrap();
    assert!(r.pass());
    assert_eq!(r.decomposition.iter().map(|d| d.1).collect::<Vec<_>>(), vec![1, 1]);

    let r = multiplicity::induced_invariance_check(&two, &ClassFunction::trivial(two.source()), &c4t).unwrap();
    assert!(r.pass());
    assert_eq!(r.decomposition.len(), 2);
}

#[test]
fn klein_examples() {
    for g in [catalog::q8(), catalog::dihedral(4).unwrap()] {
        let t = character_table(&g).unwrap();
        let pi = t.rows().iter().find(|r| r.degree() == Some(2)).unwrap();
        let v = multiplicity::klein_classifier(&g.center(), pi).unwrap();
        assert_eq!(v.kind, KleinKind::TwoCopies);
        assert!(v.direct_agrees);
    }

    let hits = multiplicity::klein_search(&[catalog::q8()]).unwrap();
    assert_eq!(hits.len(), 1);
    let c = hits[0].construction.as_ref().unwrap();
    assert!(c.verified());
    assert_eq!(c.n1_invariants, Some(vec![4]));
    assert!(multiplicity::klein_search(&[catalog::klein()]).unwrap().is_empty());

    let hits = multiplicity::klein_search(&catalog::order16()).unwrap();
    assert!(hits.iter().any(|h| h.verdict.kind == KleinKind::TwoCopies && h.order == 16));

    let hits = multiplicity::klein_search(&catalog::small_catalog()).unwrap();
    let four = hits.iter().find(|h| h.verdict.kind == KleinKind::FourDistinct).expect("a four-distinct witness");
    assert_eq!(four.verdict.restriction_to_n.len(), 4);
    assert!(four.verdict.restriction_to_n.iter().all(|&(_, m)| m == 1));
}

#[test]
fn local_field_examples() {
    let c = PadicCtx::new(3, 4).unwrap();
    assert_eq!(c.one().norm(), 1);
    assert_eq!(c.pi_pow(1).norm(), 9);
    assert_eq!(c.elem(9, 0).valuation(), 2);
    assert!(localfield::norm_surjective_on_units(PadicCtx::new(3, 2).unwrap()));

    let e1 = localfield::e1_group(PadicCtx::new(3, 2).unwrap()).unwrap();
    assert_eq!(e1.elements.len(), 12);
    assert!(localfield::e1_mod_rth_powers(&e1, 2).unwrap().cyclic);
    let e1 = localfield::e1_group(PadicCtx::new(3, 3).unwrap()).unwrap();
    assert!(localfield::e1_mod_rth_powers(&e1, 3).unwrap().cyclic);

    assert!(!localfield::is_similitude_scalar(1, 1, 3));
    assert!(localfield::is_similitude_scalar(1, 1, 2));
    assert!(localfield::is_similitude_scalar(7, 0, 3));
}

#[test]
fn survey_parity() {
    let r = multiplicity::gu_u_restriction_survey(3, 2).unwrap();
    assert!(r.pass());
    assert_eq!(r.witness["padic_quotient_order"], 2);
    let c = PadicCtx::new(3, 2).unwrap();
    assert_eq!(localfield::similitude_quotient_order(c, 3).unwrap(), 1);
}

#[test]
fn cuspidal_counts_by_q() {
    for (q, total, cusp, degree) in [(3u32, 16usize, 6usize, 2u64), (4, 25, 10, 3), (5, 36, 15, 4)] {
        let u = matgrp::unitary_group(&HermitianSpec::unitary(2, q)).unwrap();
        let t = character_table(&u.group).unwrap();
        let rows: Vec<usize> = (0..t.len()).filter(|&i| u.is_cuspidal(t.row(i)).unwrap()).collect();
        assert_eq!((t.len(), rows.len()), (total, cusp), "q = {q}");
        assert!(rows.iter().all(|&i| t.row(i).degree() == Some(degree)), "q = {q}");
    }
    assert_eq!(matgrp::pick_rho(5).unwrap().twist_moved.len(), 12);
    assert!(matches!(matgrp::pick_rho(4), Err(Error::NoQuadraticCharacter { q: 4 })));
}
