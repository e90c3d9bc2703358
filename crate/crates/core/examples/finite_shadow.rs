//! Multiplicity two for the restriction of an induced representation of
//! (U x U) x| swap to S(U x U), and the cuspidal census of U(2, q).

use charmult::matgrp::{pick_rho_from, unitary_group, HermitianSpec};
use charmult::multiplicity::finite_shadow_mult_two;
use charmult::repthy::character_table;

fn main() -> charmult::Result<()> {
    let r = finite_shadow_mult_two(3)?;
    println!("inputs {}", r.inputs);
    println!("restriction {:?}", r.decomposition);
    for (name, ok) in &r.verdicts {
        println!("  {name}: {ok}");
    }

    for q in [3, 4, 5] {
        let u = unitary_group(&HermitianSpec::unitary(2, q))?;
        let t = character_table(&u.group)?;
        let total = t.len();
        match pick_rho_from(u, t) {
            Ok(c) => println!(
                "q = {q}: {}/{total} cuspidal, {} moved by the quadratic twist",
                c.cuspidal.len(),
                c.twist_moved.len()
            ),
            Err(e) => println!("q = {q}: {e}"),
        }
    }
    Ok(())
}
