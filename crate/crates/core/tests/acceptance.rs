//! End-to-end acceptance run: one line per criterion, nonzero exit on failure.

use std::path::Path;
use std::time::{Duration, Instant};

use charmult::catalog;
use charmult::groups::FiniteGroup;
use charmult::localfield;
use charmult::matgrp::{self, Flavor, HermitianSpec};
use charmult::multiplicity::{self, KleinKind};
use charmult::repthy::{self, character_table};

type Outcome = Result<(bool, String), charmult::Error>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let (ok, detail) = f()?;
    let took = start.elapsed();
    Ok((ok && took < limit, format!("{detail}; {:.2}s (limit {}s)", took.as_secs_f64(), limit.as_secs())))
}

fn unitary(flavor: Flavor, q: u32) -> Result<FiniteGroup, charmult::Error> {
    Ok(matgrp::unitary_group(&HermitianSpec::new(flavor, 2, q))?.group)
}

fn tables() -> Outcome {
    let mut groups = catalog::table_battery();
    for flavor in [Flavor::U, Flavor::SU, Flavor::SUxU] {
        groups.push(unitary(flavor, 3)?);
    }
    let mut bad = Vec::new();
    for g in &groups {
        let t = character_table(g)?;
        let squares: u64 = t.degrees().iter().map(|d| d * d).sum();
        if !t.verify_orthogonality()?.pass() || squares != g.order() as u64 {
            bad.push(g.label().to_string());
        }
    }
    Ok((bad.is_empty(), format!("{} groups, failures {bad:?}", groups.len())))
}

fn regular_identity() -> Outcome {
    let homs = catalog::random_homomorphisms(&catalog::small_catalog(), 200, 1)?;
    let mut failures = 0;
    for f in &homs {
        let t = character_table(f.target())?;
        if !multiplicity::regular_identity_check(f, &t)?.pass() {
            failures += 1;
        }
    }
    Ok((homs.len() >= 200 && failures == 0, format!("{} homomorphisms, {failures} failures", homs.len())))
}

fn invariance() -> Outcome {
    let mut groups = catalog::small_catalog();
    groups.push(unitary(Flavor::U, 3)?);
    groups.push(unitary(Flavor::SU, 3)?);
    let mut bad = Vec::new();
    for g in &groups {
        let t = character_table(g)?;
        if !multiplicity::invariance_battery(g, &t)?.pass() {
            bad.push(g.label().to_string());
        }
    }
    Ok((bad.is_empty(), format!("{} groups, failures {bad:?}", groups.len())))
}

fn klein() -> Outcome {
    let q8 = catalog::q8();
    let t = character_table(&q8)?;
    let pi = t.rows().iter().find(|r| r.degree() == Some(2)).expect("Q8 has a 2-dimensional irreducible");
    let z = q8.center();
    let verdict = multiplicity::klein_classifier(&z, pi)?;
    let zt = character_table(z.source())?;
    let sign = zt.rows().iter().position(|r| *r != repthy::ClassFunction::trivial(z.source())).expect("sign row");
    let q8_ok = verdict.kind == KleinKind::TwoCopies && verdict.restriction_to_n == vec![(sign, 2)];

    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/small.json");
    let groups = catalog::read_fixtures(&path)?;
    let hits = multiplicity::klein_search(&groups)?;
    let agree = hits.iter().all(|h| h.verdict.direct_agrees);
    let built = hits.iter().filter_map(|h| h.construction.as_ref()).all(|c| c.verified());
    Ok((
        q8_ok && agree && built && !hits.is_empty(),
        format!("Q8 two copies {q8_ok}; {} configurations over {} groups, all agree {agree}", hits.len(), groups.len()),
    ))
}

fn shadow() -> Outcome {
    let r = multiplicity::finite_shadow_mult_two(3)?;
    Ok((r.pass(), format!("restriction to S(UxU) = {:?}", r.decomposition)))
}

fn lattice() -> Outcome {
    let mut failed = Vec::new();
    let mut count = 0;
    for d in [1, 2] {
        for r in localfield::lattice_report(3, 4, d)? {
            count += 1;
            if !r.pass {
                failed.push(format!("{}[d={d}]", r.check));
            }
        }
    }
    Ok((failed.is_empty() && count > 0, format!("{count} checks, failures {failed:?}")))
}

fn e1() -> Outcome {
    let mut failed = Vec::new();
    let mut count = 0;
    for p in [3u64, 5] {
        for prec in 1..=4 {
            let reports = localfield::e1_report(p, prec)?;
            let order = reports.iter().find(|r| r.check == "e1_order").and_then(|r| r.witness["order"].as_u64());
            if order != Some((p + 1) * p.pow(prec - 1)) {
                failed.push(format!("order[p={p},N={prec}]"));
            }
            for r in reports {
                count += 1;
                if !r.pass {
                    failed.push(format!("{}[p={p},N={prec}]", r.check));
                }
            }
        }
    }
    Ok((failed.is_empty(), format!("{count} checks, failures {failed:?}")))
}

fn survey() -> Outcome {
    let r = multiplicity::gu_u_restriction_survey(3, 2)?;
    Ok((r.pass(), format!("max multiplicity {}", r.witness["max_multiplicity"])))
}

fn constancy() -> Outcome {
    let u = matgrp::unitary_group(&HermitianSpec::unitary(2, 3))?;
    let su = u.group.subgroup_where(|x| u.det(x) == 1)?;
    let ut = character_table(&u.group)?;
    let sut = character_table(su.source())?;
    let mut su_ok = true;
    for chi2 in sut.rows() {
        let r = multiplicity::constancy_check(&su, &ut, chi2)?;
        su_ok &= r.pass() && r.witness["values"].as_array().map(|v| v.len()) == Some(1);
    }

    let homs = catalog::random_homomorphisms(&catalog::small_catalog(), 200, 1)?;
    let (mut checked, mut failures) = (0, 0);
    for f in homs.iter().filter(|f| f.image_normal_abelian_cokernel().holds()) {
        let t1 = character_table(f.target())?;
        let t2 = character_table(f.source())?;
        for chi2 in t2.rows() {
            checked += 1;
            if !multiplicity::constancy_check(f, &t1, chi2)?.pass() {
                failures += 1;
            }
        }
    }
    Ok((
        su_ok && failures == 0 && checked > 0,
        format!("SU in U singletons {su_ok}; {checked} battery checks, {failures} failures"),
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("character tables", Duration::from_secs(60), tables),
        ("regular identity", Duration::from_secs(600), regular_identity),
        ("induced invariance", Duration::from_secs(600), invariance),
        ("Klein four quotients", Duration::from_secs(120), klein),
        ("multiplicity two shadow", Duration::from_secs(600), shadow),
        ("lattice identities", Duration::from_secs(120), lattice),
        ("E1 structure", Duration::from_secs(60), e1),
        ("GU to U survey", Duration::from_secs(120), survey),
        ("constancy on support", Duration::from_secs(600), constancy),
    ];
    let mut all = true;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let (ok, detail) = match timed(limit, run) {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        all &= ok;
        println!("{} criterion {}: {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    if !all {
        std::process::exit(1);
    }
}
