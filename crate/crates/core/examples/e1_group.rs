//! Norm-one units of the unramified quadratic extension modulo p^N and
//! their quotients by r-th powers.

use charmult::localfield::{e1_group, e1_mod_rth_powers, similitude_quotient_order, PadicCtx};

fn main() -> charmult::Result<()> {
    for p in [3u64, 5] {
        for n in 1..=3 {
            let ctx = PadicCtx::new(p, n)?;
            let e1 = e1_group(ctx)?;
            println!("p = {p}, N = {n}: |E1| = {} {:?}", e1.elements.len(), e1.group.abelian_invariants());
            for r in [2, 3, 4, p] {
                let q = e1_mod_rth_powers(&e1, r)?;
                println!("  r = {r}: order {}, invariants {:?}", q.order, q.invariants);
            }
        }
    }
    let ctx = PadicCtx::new(3, 2)?;
    for r in 1..=4 {
        println!("similitude scalars mod norms, r = {r}: order {}", similitude_quotient_order(ctx, r)?);
    }
    Ok(())
}
