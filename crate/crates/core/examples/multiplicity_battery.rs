//! Regular-representation identity, constancy and induced invariance over
//! random homomorphisms between small groups.

use charmult::catalog;
use charmult::multiplicity;
use charmult::repthy::character_table;

fn main() -> charmult::Result<()> {
    let pool = catalog::small_catalog();
    let homs = catalog::random_homomorphisms(&pool, 50, 7)?;
    let (mut regular, mut constant, mut vacuous, mut checked) = (0, 0, 0, 0);
    for f in &homs {
        let target = character_table(f.target())?;
        if multiplicity::regular_identity_check(f, &target)?.pass() {
            regular += 1;
        }
        if !f.image_normal_abelian_cokernel().holds() {
            continue;
        }
        let source = character_table(f.source())?;
        for chi2 in source.rows() {
            let r = multiplicity::constancy_check(f, &target, chi2)?;
            checked += 1;
            constant += r.pass() as usize;
            vacuous += (r.witness["support_empty"] == true) as usize;
        }
    }
    println!("regular identity: {regular}/{} homomorphisms", homs.len());
    println!("constancy: {constant}/{checked} pairs ({vacuous} with empty support)");

    let s4 = catalog::s4();
    let r = multiplicity::invariance_battery(&s4, &character_table(&s4)?)?;
    println!("induced invariance on S4: {:?}", r.verdicts);
    Ok(())
}
