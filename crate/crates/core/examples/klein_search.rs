//! Normal subgroups with Klein-four quotient and the twist-fixed
//! irreducibles over them, classified and cross-checked.

use charmult::catalog;
use charmult::multiplicity::{klein_search, KleinKind};

fn main() -> charmult::Result<()> {
    let hits = klein_search(&catalog::small_catalog())?;
    for h in &hits {
        let route = match &h.construction {
            Some(c) => format!("N1 order {}, verified {}", c.n1_order, c.verified()),
            None => "-".to_string(),
        };
        println!(
            "{:<10} |N| = {:<3} deg {} {:?} restriction {:?}  [{route}]",
            h.group,
            h.normal.len(),
            h.degree,
            h.verdict.kind,
            h.verdict.restriction_to_n
        );
    }
    let two = hits.iter().filter(|h| h.verdict.kind == KleinKind::TwoCopies).count();
    println!(
        "{} configurations, {two} two-copies, all agree: {}",
        hits.len(),
        hits.iter().all(|h| h.verdict.direct_agrees)
    );
    Ok(())
}
