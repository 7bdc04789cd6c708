//! Truncated Taylor jets of a parsed expression and its partial derivatives.

use subriemann::{Expr, MultiIndex};

fn main() -> subriemann::Result<()> {
    let e = Expr::parse("exp(x*y) / (1 + z^2)")?;
    let p = [0.5, -1.0, 0.25];
    let jet = e.eval_jet(p, 4)?;
    println!("f = {e} at {p:?}");
    println!("value      {:.12}", jet.value());
    println!("gradient   {:?}", jet.gradient());
    for (a, b, c) in [(1, 1, 0), (0, 0, 2), (2, 1, 1)] {
        let m = MultiIndex::new(a, b, c);
        println!("∂^({a},{b},{c}) f = {:.12}", jet.derivative(m));
    }
    println!("valid to order {}", jet.valid_order());
    Ok(())
}
