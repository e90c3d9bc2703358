//! Branching multiplicities on concrete finite groups.
//!
//! Every check returns exact integers together with named boolean verdicts.
//! Characters are compared as class functions, so "isomorphic" below always
//! means "equal characters".

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cycnum::CycNum;
use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupHom, DEFAULT_CAP};
use crate::localfield;
use crate::matgrp::{self, Flavor, HermitianSpec};
use crate::repthy::{
    self, character_table, decompose, induce, inner_product_integer, outer_tensor, pullback, restrict, tensor,
    CharacterTable, ClassFunction,
};

/// Outcome of one multiplicity scenario.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MultiplicityReport {
    pub scenario: String,
    pub inputs: Value,
    /// `(character id, multiplicity)`.
    pub decomposition: Vec<(String, u64)>,
    pub verdicts: BTreeMap<String, bool>,
    #[serde(default)]
    pub witness: Value,
    /// Wall-clock seconds; kept out of the serialized record.
    #[serde(skip)]
    pub seconds: f64,
}

impl MultiplicityReport {
    pub fn new(scenario: &str, inputs: Value) -> Self {
        MultiplicityReport {
            scenario: scenario.to_string(),
            inputs,
            decomposition: Vec::new(),
            verdicts: BTreeMap::new(),
            witness: Value::Null,
            seconds: 0.0,
        }
    }

    /// Records a named check; repeated names are combined with `and`.
    pub fn set_verdict(&mut self, name: &str, ok: bool) {
        let slot = self.verdicts.entry(name.to_string()).or_insert(true);
        *slot &= ok;
    }

    pub fn pass(&self) -> bool {
        self.verdicts.values().all(|&v| v)
    }

    fn timed(mut self, start: Instant) -> Self {
        self.seconds = start.elapsed().as_secs_f64();
        self
    }
}

fn row_id(i: usize) -> String {
    format!("chi{i}")
}

fn check_irreducible(chi: &ClassFunction) -> Result<()> {
    match inner_product_integer(chi, chi)? {
        1 => Ok(()),
        k => Err(Error::NotACharacter(format!("norm {k} ≠ 1, not irreducible"))),
    }
}

/// `⟨χ₂, f*χ₁⟩` together with a warning when the image of `f` is not normal
/// with abelian cokernel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Multiplicity {
    pub value: u64,
    pub warning: Option<String>,
}

/// `dim Hom[χ₂, f*χ₁]` for irreducible `χ₁` on the target and `χ₂` on the
/// source of `f`.
pub fn conjectural_multiplicity(f: &GroupHom, chi1: &ClassFunction, chi2: &ClassFunction) -> Result<Multiplicity> {
    if chi1.group() != f.target() || chi2.group() != f.source() {
        return Err(Error::GroupMismatch);
    }
    check_irreducible(chi1)?;
    check_irreducible(chi2)?;
    let value = inner_product_integer(chi2, &pullback(f, chi1)?)?;
    let value = u64::try_from(value).map_err(|_| Error::NotACharacter(format!("multiplicity {value}")))?;
    let cok = f.image_normal_abelian_cokernel();
    let warning = (!cok.holds()).then(|| {
        if cok.image_normal {
            "cokernel of f is not abelian".to_string()
        } else {
            "image of f is not normal".to_string()
        }
    });
    Ok(Multiplicity { value, warning })
}

/// `⟨R, f*χ₁⟩ = χ₁(1)` for every irreducible `χ₁` of the target, with `R`
/// the regular character of the source.
pub fn regular_identity_check(f: &GroupHom, target_table: &CharacterTable) -> Result<MultiplicityReport> {
    let start = Instant::now();
    if target_table.group() != f.target() {
        return Err(Error::GroupMismatch);
    }
    let mut report = MultiplicityReport::new(
        "regular_identity",
        json!({"source": f.source().label(), "target": f.target().label(),
               "source_order": f.source().order(), "target_order": f.target().order()}),
    );
    let reg = ClassFunction::regular(f.source());
    let mut violations = Vec::new();
    for (i, chi1) in target_table.rows().iter().enumerate() {
        let v = inner_product_integer(&reg, &pullback(f, chi1)?)?;
        let deg = chi1.degree().expect("irreducible degree") as i64;
        if v != deg {
            violations.push(json!({"row": i, "value": v, "degree": deg}));
        }
        report.decomposition.push((row_id(i), v.max(0) as u64));
    }
    report.set_verdict("equals_degree", violations.is_empty());
    report.witness = json!({ "violations": violations });
    Ok(report.timed(start))
}

/// For fixed `χ₂`, the multiplicity `⟨χ₂, f*χ₁⟩` over the `χ₁` where it is
/// positive takes at most one value.
pub fn constancy_check(
    f: &GroupHom,
    target_table: &CharacterTable,
    chi2: &ClassFunction,
) -> Result<MultiplicityReport> {
    let start = Instant::now();
    if target_table.group() != f.target() || chi2.group() != f.source() {
        return Err(Error::GroupMismatch);
    }
    if !f.image_normal_abelian_cokernel().holds() {
        return Err(Error::PreconditionFailed("image of f is not normal with abelian cokernel".into()));
    }
    let mut report =
        MultiplicityReport::new("constancy", json!({"source": f.source().label(), "target": f.target().label()}));
    let mut values = std::collections::BTreeSet::new();
    for (i, chi1) in target_table.rows().iter().enumerate() {
        let v = inner_product_integer(chi2, &pullback(f, chi1)?)?;
        if v > 0 {
            values.insert(v);
            report.decomposition.push((row_id(i), v as u64));
        }
    }
    // an empty support (χ₂ nontrivial on ker f) is constant vacuously
    report.set_verdict("constant_on_support", values.len() <= 1);
    report.witness = json!({ "values": values, "support_empty": values.is_empty() });
    Ok(report.timed(start))
}

/// Linear characters of `G/N` pulled back to `G`.
fn quotient_linear_characters(g: &FiniteGroup, n: &GroupHom) -> Result<Vec<ClassFunction>> {
    let (q, proj) = g.quotient(n)?;
    let table = character_table(&q)?;
    table.linear().into_iter().map(|i| pullback(&proj, table.row(i))).collect()
}

/// Decomposes `Ind_N^G π` for `G/N` abelian: all nonzero multiplicities
/// agree and the constituents are twists of one another by characters of
/// `G/N`.
pub fn induced_invariance_check(
    n: &GroupHom,
    pi: &ClassFunction,
    g_table: &CharacterTable,
) -> Result<MultiplicityReport> {
    let start = Instant::now();
    let g = n.target();
    if g_table.group() != g || pi.group() != n.source() {
        return Err(Error::GroupMismatch);
    }
    if !g.is_normal(n) {
        return Err(Error::PreconditionFailed("N is not normal".into()));
    }
    let (q, _) = g.quotient(n)?;
    if !q.is_abelian() {
        return Err(Error::PreconditionFailed("G/N is not abelian".into()));
    }
    check_irreducible(pi)?;
    let mut report = MultiplicityReport::new(
        "induced_invariance",
        json!({"group": g.label(), "order": g.order(), "normal_order": n.source().order()}),
    );
    let ind = induce(pi, n)?;
    let parts = decompose(&ind, g_table)?;
    report.decomposition = parts.iter().map(|&(i, m)| (row_id(i), m)).collect();
    report.set_verdict("equal_multiplicities", parts.windows(2).all(|w| w[0].1 == w[1].1));
    let lambdas = quotient_linear_characters(g, n)?;
    let first = g_table.row(parts[0].0);
    let mut twists = Vec::new();
    for &(i, _) in &parts {
        let hit = lambdas.iter().position(|l| tensor(first, l).map(|t| t == *g_table.row(i)).unwrap_or(false));
        report.set_verdict("constituents_are_twists", hit.is_some());
        twists.push(json!({"row": i, "twist": hit}));
    }
    report.witness = json!({"quotient_order": q.order(), "twists": twists});
    Ok(report.timed(start))
}

/// Every normal `N` with `G/N` abelian, as preimages of the subgroups of
/// the abelianization.
pub fn normals_with_abelian_quotient(g: &FiniteGroup) -> Result<Vec<GroupHom>> {
    let (ab, proj) = g.quotient(&g.derived_subgroup())?;
    let mut subgroups: Vec<Vec<bool>> =
        vec![ab.subgroup_generated(&[]).images().iter().fold(vec![false; ab.order()], |mut m, &x| {
            m[x as usize] = true;
            m
        })];
    let mut frontier = subgroups.clone();
    while let Some(h) = frontier.pop() {
        for x in ab.elements().filter(|&x| !h[x]) {
            let mut gens: Vec<usize> = (0..ab.order()).filter(|&y| h[y]).collect();
            gens.push(x);
            let mut joined = vec![false; ab.order()];
            for &y in ab.subgroup_generated(&gens).images() {
                joined[y as usize] = true;
            }
            if !subgroups.contains(&joined) {
                subgroups.push(joined.clone());
                frontier.push(joined);
            }
        }
    }
    subgroups.iter().map(|h| g.subgroup_where(|x| h[proj.apply(x)])).collect()
}

/// [`induced_invariance_check`] over every `N ⊴ G` with `G/N` abelian and
/// every irreducible `π` of `N`.
pub fn invariance_battery(g: &FiniteGroup, g_table: &CharacterTable) -> Result<MultiplicityReport> {
    let start = Instant::now();
    let mut report = MultiplicityReport::new("invariance_battery", json!({"group": g.label(), "order": g.order()}));
    let mut cases = 0;
    let mut failures = Vec::new();
    for n in normals_with_abelian_quotient(g)? {
        let n_table = character_table(n.source())?;
        for (i, pi) in n_table.rows().iter().enumerate() {
            let r = induced_invariance_check(&n, pi, g_table)?;
            cases += 1;
            if !r.pass() {
                failures.push(json!({"normal_order": n.source().order(), "pi": i, "verdicts": r.verdicts}));
            }
        }
    }
    report.set_verdict("all_cases", failures.is_empty() && cases > 0);
    report.witness = json!({"cases": cases, "failures": failures});
    Ok(report.timed(start))
}

/// Which of the two possibilities occurs for `π|_N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KleinKind {
    FourDistinct,
    TwoCopies,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct KleinVerdict {
    pub kind: KleinKind,
    /// `"i"` when `π₁ ≅ π₁ ⊗ ω₂₁`, `"ii"` when `π₂ ≅ π₁ ⊗ ω₂₁`.
    pub case: String,
    /// Decomposition of `π|_N` into rows of the table of `N`.
    pub restriction_to_n: Vec<(usize, u64)>,
    /// Whether the direct decomposition matches the criterion.
    pub direct_agrees: bool,
}

/// The three nontrivial characters of `G/N ≅ V₄` as `[ω₁, ω₂, ω₂₁]`.
fn klein_characters(g: &FiniteGroup, n: &GroupHom) -> Result<[ClassFunction; 3]> {
    if !g.is_normal(n) {
        return Err(Error::StructureFailed("N is not normal".into()));
    }
    let (q, _) = g.quotient(n)?;
    if q.order() != 4 || q.exponent() != 2 {
        return Err(Error::StructureFailed(format!("G/N has order {} and is not Klein four", q.order())));
    }
    let mut lin = quotient_linear_characters(g, n)?;
    let trivial = ClassFunction::trivial(g);
    lin.retain(|l| *l != trivial);
    let w21 = tensor(&lin[0], &lin[1])?;
    Ok([lin[0].clone(), lin[1].clone(), w21])
}

/// Classifies `π|_N` through `N₁ = ker ω₁`.
pub fn klein_classifier(n: &GroupHom, pi: &ClassFunction) -> Result<KleinVerdict> {
    let g = n.target();
    if pi.group() != g {
        return Err(Error::GroupMismatch);
    }
    let [w1, w2, w21] = klein_characters(g, n)?;
    check_irreducible(pi)?;
    if tensor(pi, &w1)? != *pi || tensor(pi, &w2)? != *pi {
        return Err(Error::HypothesisFailed("π is not fixed by twisting with characters of G/N".into()));
    }
    let one = CycNum::one();
    let n1 = g.subgroup_where(|x| *w1.at(x) == one)?;
    let n1_table = character_table(n1.source())?;
    let parts = decompose(&restrict(pi, &n1)?, &n1_table)?;
    if parts.len() != 2 || parts.iter().any(|&(_, m)| m != 1) {
        return Err(Error::StructureFailed(format!("π|_N₁ = {parts:?} is not two inequivalent pieces")));
    }
    let pi1 = n1_table.row(parts[0].0);
    let w21_on_n1 = restrict(&w21, &n1)?;
    let fixed = tensor(pi1, &w21_on_n1)? == *pi1;
    let (kind, case) = if fixed { (KleinKind::FourDistinct, "i") } else { (KleinKind::TwoCopies, "ii") };

    let n_table = character_table(n.source())?;
    let direct = decompose(&restrict(pi, n)?, &n_table)?;
    let direct_agrees = match kind {
        KleinKind::FourDistinct => direct.len() == 4 && direct.iter().all(|&(_, m)| m == 1),
        KleinKind::TwoCopies => direct.len() == 1 && direct[0].1 == 2,
    };
    Ok(KleinVerdict { kind, case: case.to_string(), restriction_to_n: direct, direct_agrees })
}

/// One configuration found by [`klein_search`].
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct KleinHit {
    pub group: String,
    pub order: usize,
    /// Elements of `N`.
    pub normal: Vec<u32>,
    /// Row of `π` in the table of `G`.
    pub pi: usize,
    pub degree: u64,
    pub verdict: KleinVerdict,
    /// For `TwoCopies`: the construction `π = Ind_{N₁}^G π₁` with
    /// `π₁^g ≅ π₁ ⊗ ω₂₁ ≇ π₁`.
    pub construction: Option<Construction>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Construction {
    /// Invariant factors of `N₁` when abelian.
    pub n1_invariants: Option<Vec<u64>>,
    pub n1_order: usize,
    pub induces_pi: bool,
    pub conjugate_is_twist: bool,
    pub twist_moves: bool,
}

impl Construction {
    pub fn verified(&self) -> bool {
        self.induces_pi && self.conjugate_is_twist && self.twist_moves
    }
}

fn construction_route(n: &GroupHom, pi: &ClassFunction, g_table: &CharacterTable) -> Result<Construction> {
    let g = n.target();
    let [w1, _, w21] = klein_characters(g, n)?;
    let one = CycNum::one();
    let n1 = g.subgroup_where(|x| *w1.at(x) == one)?;
    let n1_table = character_table(n1.source())?;
    let parts = decompose(&restrict(pi, &n1)?, &n1_table)?;
    let pi1 = n1_table.row(parts[0].0);
    let induces_pi = g_table.find(&induce(pi1, &n1)?).map(|i| g_table.row(i) == pi).unwrap_or(false);
    let outside = g.elements().find(|&x| *w1.at(x) != one).expect("N₁ has index two");
    let conj = repthy::conjugate_by(pi1, &n1, outside)?;
    let twisted = tensor(pi1, &restrict(&w21, &n1)?)?;
    Ok(Construction {
        n1_invariants: n1.source().abelian_invariants(),
        n1_order: n1.source().order(),
        induces_pi,
        conjugate_is_twist: conj == twisted,
        twist_moves: twisted != *pi1,
    })
}

/// Every `(G, N, π)` with `G/N ≅ V₄` and `π` fixed by all twists from
/// `G/N`, classified.
pub fn klein_search(catalog: &[FiniteGroup]) -> Result<Vec<KleinHit>> {
    let mut hits = Vec::new();
    let minus_one = CycNum::from_integer(-1);
    let one = CycNum::one();
    for g in catalog {
        let table = character_table(g)?;
        let quadratic: Vec<&ClassFunction> = table
            .linear()
            .into_iter()
            .map(|i| table.row(i))
            .filter(|r| r.values().contains(&minus_one) && r.values().iter().all(|v| *v == one || *v == minus_one))
            .collect();
        let mut seen = std::collections::BTreeSet::new();
        for a in 0..quadratic.len() {
            for b in a + 1..quadratic.len() {
                let members: Vec<u32> = g
                    .elements()
                    .filter(|&x| *quadratic[a].at(x) == one && *quadratic[b].at(x) == one)
                    .map(|x| x as u32)
                    .collect();
                if !seen.insert(members.clone()) {
                    continue;
                }
                let n = g.subgroup_where(|x| members.binary_search(&(x as u32)).is_ok())?;
                let chars = klein_characters(g, &n)?;
                for (i, pi) in table.rows().iter().enumerate() {
                    let fixed = chars.iter().all(|w| tensor(pi, w).map(|t| t == *pi).unwrap_or(false));
                    if !fixed {
                        continue;
                    }
                    let verdict = klein_classifier(&n, pi)?;
                    let construction = match verdict.kind {
                        KleinKind::TwoCopies => Some(construction_route(&n, pi, &table)?),
                        KleinKind::FourDistinct => None,
                    };
                    hits.push(KleinHit {
                        group: g.label().to_string(),
                        order: g.order(),
                        normal: members.clone(),
                        pi: i,
                        degree: pi.degree().unwrap_or(0),
                        verdict,
                        construction,
                    });
                }
            }
        }
    }
    Ok(hits)
}

/// The finite model of multiplicity two: `σ = ρ ⊠ ρχ` on `U × U`, induced
/// to `Γ = (U × U) ⋊ ⟨swap⟩` and restricted to `S(U × U)`.
pub fn finite_shadow_mult_two(q: u32) -> Result<MultiplicityReport> {
    let start = Instant::now();
    let choice = matgrp::pick_rho(q)?;
    let u = &choice.unitary;
    let rho = choice.table.row(choice.rho);
    let rho_chi = choice.table.row(choice.rho_chi);
    let swap = FiniteGroup::semidirect_with_swap(&u.group, DEFAULT_CAP)?;
    let sigma = outer_tensor(rho, rho_chi, &swap.product)?;
    let sigma_swapped = repthy::conjugate_by(&sigma, &swap.embedding, swap.swap)?;
    let expected_swap = outer_tensor(rho_chi, rho, &swap.product)?;

    let dets: Vec<u8> = u.group.elements().map(|x| u.det(x)).collect();
    let f = u.ext.field.clone();
    let s_in_product = swap.product.subgroup_where(|x| {
        let (a, b) = swap.product.product_components(x).expect("product element");
        f.mul(dets[a], dets[b]) == 1
    })?;
    let s_in_gamma = s_in_product.then(&swap.embedding)?;
    let s = s_in_gamma.source().clone();
    let s_table = character_table(&s)?;

    let pi_tilde = induce(&sigma, &swap.embedding)?;
    let norm = inner_product_integer(&pi_tilde, &pi_tilde)?;
    let res = restrict(&pi_tilde, &s_in_gamma)?;
    let parts = decompose(&res, &s_table)?;

    let mut report = MultiplicityReport::new(
        "finite_shadow_mult_two",
        json!({"q": q, "d": 1, "rho": choice.rho, "rho_chi": choice.rho_chi,
               "unitary_order": u.order(), "gamma_order": swap.group.order(), "s_order": s.order()}),
    );
    report.decomposition = parts.iter().map(|&(i, k)| (row_id(i), k)).collect();
    report.set_verdict("rho_cuspidal", choice.cuspidal.contains(&choice.rho));
    report.set_verdict("rho_twist_moved", choice.rho != choice.rho_chi);
    report.set_verdict("swap_is_reversed_tensor", sigma_swapped == expected_swap);
    report.set_verdict("sigma_not_swap_invariant", sigma_swapped != sigma);
    report.set_verdict("extension_irreducible", norm == 1);
    report.set_verdict("all_multiplicities_two", !parts.is_empty() && parts.iter().all(|&(_, k)| k == 2));
    report.set_verdict(
        "sigma_swap_agree_on_s",
        restrict(&sigma, &s_in_product)? == restrict(&sigma_swapped, &s_in_product)?,
    );
    let mut frobenius = true;
    for &(i, k) in &parts {
        let up = induce(s_table.row(i), &s_in_gamma)?;
        frobenius &= inner_product_integer(&pi_tilde, &up)? == k as i64;
    }
    report.set_verdict("frobenius_reciprocity", frobenius);
    report.witness = json!({
        "extension_norm": norm,
        "constituent_degrees": parts.iter().map(|&(i, _)| s_table.row(i).degree()).collect::<Vec<_>>(),
        "restriction_degree": res.degree(),
    });
    Ok(report.timed(start))
}

/// Restricts every irreducible of `GU(n, q)` to `U(n, q)`.
pub fn gu_u_restriction_survey(q: u32, n: usize) -> Result<MultiplicityReport> {
    let start = Instant::now();
    let gu = matgrp::unitary_group(&HermitianSpec::new(Flavor::GU, n, q))?;
    let u = gu.group.subgroup_where(|x| gu.similitude(x) == 1)?;
    let gu_table = character_table(&gu.group)?;
    let u_table = character_table(u.source())?;
    let mut max_mult = 0;
    let mut max_components = 0;
    let mut report = MultiplicityReport::new("gu_u_restriction", json!({"q": q, "n": n}));
    for (i, row) in gu_table.rows().iter().enumerate() {
        let parts = decompose(&restrict(row, &u)?, &u_table)?;
        max_mult = max_mult.max(parts.iter().map(|&(_, k)| k).max().unwrap_or(0));
        max_components = max_components.max(parts.len());
        report.decomposition.push((row_id(i), parts.len() as u64));
    }
    let (p, _) = matgrp::prime_power(q).ok_or_else(|| Error::Unsupported(format!("q = {q}")))?;
    let ctx = localfield::PadicCtx::new(p as u64, 2)?;
    let quotient = localfield::similitude_quotient_order(ctx, n as u64)?;
    report.set_verdict("multiplicity_free", max_mult == 1);
    report.set_verdict("padic_parity", quotient == if n.is_multiple_of(2) { 2 } else { 1 });
    report.witness = json!({
        "gu_order": gu.order(),
        "u_order": u.source().order(),
        "max_multiplicity": max_mult,
        "max_components": max_components,
        "padic_quotient_order": quotient,
    });
    Ok(report.timed(start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{GroupElement, Perm};

    fn q8() -> FiniteGroup {
        let i = Perm::from_cycles(8, &[&[0, 1, 4, 5], &[2, 7, 6, 3]]);
        let j = Perm::from_cycles(8, &[&[0, 2, 4, 6], &[1, 3, 5, 7]]);
        FiniteGroup::from_generators("Q8", &[GroupElement::Perm(i), GroupElement::Perm(j)], 100).unwrap()
    }

    fn d4() -> FiniteGroup {
        let r = Perm::from_cycles(4, &[&[0, 1, 2, 3]]);
        let s = Perm::from_cycles(4, &[&[1, 3]]);
        FiniteGroup::from_generators("D4", &[GroupElement::Perm(r), GroupElement::Perm(s)], 100).unwrap()
    }

    fn two_dim(t: &CharacterTable) -> ClassFunction {
        t.rows().iter().find(|r| r.degree() == Some(2)).unwrap().clone()
    }

    #[test]
    fn identity_multiplicities() {
        let g = q8();
        let t = character_table(&g).unwrap();
        let id = GroupHom::identity(&g);
        for (a, x) in t.rows().iter().enumerate() {
            for (b, y) in t.rows().iter().enumerate() {
                let m = conjectural_multiplicity(&id, x, y).unwrap();
                assert_eq!(m.value, (a == b) as u64);
                assert!(m.warning.is_none());
            }
        }
    }

    #[test]
    fn center_of_q8() {
        let g = q8();
        let t = character_table(&g).unwrap();
        let z = g.center();
        let zt = character_table(z.source()).unwrap();
        let sign = zt.rows().iter().find(|r| r.values().contains(&CycNum::from_integer(-1))).unwrap();
        let m = conjectural_multiplicity(&z, &two_dim(&t), sign).unwrap();
        assert_eq!(m.value, 2);
        let c = constancy_check(&z, &t, sign).unwrap();
        assert!(c.pass());
        assert_eq!(c.decomposition.len(), 1);
        assert_eq!(c.decomposition[0].1, 2);
    }

    #[test]
    fn trivial_source() {
        let g = q8();
        let t = character_table(&g).unwrap();
        let one = FiniteGroup::trivial();
        let f = GroupHom::trivial(&one, &g);
        let triv = ClassFunction::trivial(&one);
        for row in t.rows() {
            let m = conjectural_multiplicity(&f, row, &triv).unwrap();
            assert_eq!(m.value, row.degree().unwrap());
        }
        let r = regular_identity_check(&f, &t).unwrap();
        assert!(r.pass());
        let degs: Vec<u64> = r.decomposition.iter().map(|x| x.1).collect();
        assert_eq!(degs, t.degrees());
    }

    #[test]
    fn regular_identity_on_q8() {
        let g = q8();
        let t = character_table(&g).unwrap();
        let r = regular_identity_check(&GroupHom::identity(&g), &t).unwrap();
        assert!(r.pass());
        let degs: Vec<u64> = r.decomposition.iter().map(|x| x.1).collect();
        assert_eq!(degs, vec![1, 1, 1, 1, 2]);
    }

    #[test]
    fn constancy_precondition() {
        let g = d4();
        let t = character_table(&g).unwrap();
        // a non-normal subgroup of order two
        let refl =
            g.elements().find(|&x| g.element_order(x) == 2 && !g.center().images().contains(&(x as u32))).unwrap();
        let h = g.subgroup_generated(&[refl]);
        let triv = ClassFunction::trivial(h.source());
        assert!(matches!(constancy_check(&h, &t, &triv), Err(Error::PreconditionFailed(_))));
        let m = conjectural_multiplicity(&h, t.row(0), &triv).unwrap();
        assert!(m.warning.is_some());
    }

    #[test]
    fn invariance_q8_center() {
        let g = q8();
        let t = character_table(&g).unwrap();
        let z = g.center();
        let zt = character_table(z.source()).unwrap();
        let sign = zt.rows().iter().find(|r| r.values().contains(&CycNum::from_integer(-1))).unwrap();
        let r = induced_invariance_check(&z, sign, &t).unwrap();
        assert!(r.pass());
        assert_eq!(r.decomposition.len(), 1);
        assert_eq!(r.decomposition[0].1, 2);
        let triv = ClassFunction::trivial(z.source());
        let r = induced_invariance_check(&z, &triv, &t).unwrap();
        assert!(r.pass());
        assert_eq!(r.decomposition.len(), 4);
        assert!(r.decomposition.iter().all(|x| x.1 == 1));
    }

    #[test]
    fn invariance_z4_over_z2() {
        let g = crate::groups::cyclic(4);
        let t = character_table(&g).unwrap();
        let n = g.subgroup_generated(&[g.pow(1, 2)]);
        let nt = character_table(n.source()).unwrap();
        let pi = nt.rows().iter().find(|r| r.values().contains(&CycNum::from_integer(-1))).unwrap();
        let r = induced_invariance_check(&n, pi, &t).unwrap();
        assert!(r.pass());
        assert_eq!(r.decomposition.len(), 2);
        assert!(r.decomposition.iter().all(|x| x.1 == 1));
    }

    #[test]
    fn invariance_rejects_nonabelian_quotient() {
        let g = d4();
        let t = character_table(&g).unwrap();
        let triv_group = g.subgroup_generated(&[]);
        let triv = ClassFunction::trivial(triv_group.source());
        assert!(matches!(induced_invariance_check(&triv_group, &triv, &t), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn klein_q8_and_d4() {
        for g in [q8(), d4()] {
            let t = character_table(&g).unwrap();
            let v = klein_classifier(&g.center(), &two_dim(&t)).unwrap();
            assert_eq!(v.kind, KleinKind::TwoCopies);
            assert!(v.direct_agrees);
            assert_eq!(v.restriction_to_n.len(), 1);
            assert_eq!(v.restriction_to_n[0].1, 2);
        }
    }

    #[test]
    fn klein_errors() {
        let g = q8();
        let t = character_table(&g).unwrap();
        assert!(matches!(klein_classifier(&g.center(), t.row(0)), Err(Error::HypothesisFailed(_))));
        let whole = g.subgroup_generated(&[1, 2]);
        assert!(matches!(klein_classifier(&whole, &two_dim(&t)), Err(Error::StructureFailed(_))));
    }

    #[test]
    fn klein_search_q8() {
        let hits = klein_search(&[q8()]).unwrap();
        assert_eq!(hits.len(), 1);
        let h = &hits[0];
        assert_eq!(h.verdict.kind, KleinKind::TwoCopies);
        let c = h.construction.as_ref().unwrap();
        assert!(c.verified());
        assert_eq!(c.n1_invariants, Some(vec![4]));
    }

    #[test]
    fn klein_search_klein_four() {
        let v = FiniteGroup::direct_product(&crate::groups::cyclic(2), &crate::groups::cyclic(2));
        assert!(klein_search(&[v]).unwrap().is_empty());
    }

    #[test]
    fn abelian_quotients_of_q8() {
        let g = q8();
        // G' = {±1}, G/G' = V4 with five subgroups
        let ns = normals_with_abelian_quotient(&g).unwrap();
        let mut orders: Vec<usize> = ns.iter().map(|n| n.source().order()).collect();
        orders.sort();
        assert_eq!(orders, vec![2, 4, 4, 4, 8]);
        let r = invariance_battery(&g, &character_table(&g).unwrap()).unwrap();
        assert!(r.pass());
    }

    #[test]
    fn shadow_rejects_even_q() {
        assert!(matches!(finite_shadow_mult_two(2), Err(Error::NoQuadraticCharacter { q: 2 })));
    }

    #[test]
    fn survey_n1() {
        let r = gu_u_restriction_survey(3, 1).unwrap();
        assert!(r.pass(), "{r:?}");
        assert_eq!(r.witness["padic_quotient_order"], 1);
    }
}
