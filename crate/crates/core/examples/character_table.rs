//! Character tables of a few small groups and of U(2, F_9).

use charmult::catalog;
use charmult::cli::table_tsv;
use charmult::matgrp::{unitary_group, HermitianSpec};
use charmult::repthy::character_table;

fn main() -> charmult::Result<()> {
    let q8 = catalog::q8();
    let t = character_table(&q8)?;
    println!("Q8 (ell = {})", t.ell());
    print!("{}", table_tsv(&t));

    let u = unitary_group(&HermitianSpec::unitary(2, 3))?;
    let t = character_table(&u.group)?;
    let report = t.verify_orthogonality()?;
    println!("\nU(2,3): order {}, {} classes", u.order(), t.len());
    println!("degrees {:?}", t.degrees());
    println!("orthogonality holds: {}", report.pass());
    Ok(())
}
