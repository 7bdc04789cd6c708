//! `M` and `K` of the Heisenberg and Cartan structures along a line.

use subriemann::invariants::compute_invariants;
use subriemann::{MetricField, OneForm, Settings};

fn main() -> subriemann::Result<()> {
    let s = Settings::default();
    let g = MetricField::euclidean();
    for text in ["dz + y*dx - x*dy", "dz + y*dx"] {
        let omega = OneForm::parse(text)?;
        println!("{text}");
        for i in 0..5 {
            let p = [0.25 * i as f64, 0.5 * i as f64, 0.0];
            let v = compute_invariants(&omega, &g, p, &s)?.invariants;
            println!("  {p:?}  M = {:.10}  K = {:.10}", v.m.value(), v.k.value());
        }
    }
    Ok(())
}
