//! The vertex lattice, its dual, the two residual hermitian spaces and the
//! swap diagram for g0.

use charmult::localfield::{lattice_report, LatticeSetup, PadicCtx};

fn main() -> charmult::Result<()> {
    let ctx = PadicCtx::new(3, 4)?;
    for d in [1, 2] {
        let s = LatticeSetup::new(ctx, d)?;
        println!("d = {d}");
        println!("L =\n{}", s.l);
        println!("L dual =\n{}", s.l_dual);
        println!("dim L^/L = {}, dim L/pi L^ = {}", s.x.dim(), s.y.dim());
        for r in lattice_report(3, 4, d)? {
            println!("  {:<16} {}", r.check, r.pass);
        }
    }
    Ok(())
}
