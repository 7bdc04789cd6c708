//! Checking candidate generators `f` against `VK = VM = 0` and the bracket
//! relations of `V`.

use subriemann::symmetry::verify_candidate;
use subriemann::{parse_scalar, MetricField, OneForm, Settings};

fn main() -> subriemann::Result<()> {
    let s = Settings::default();
    let g = MetricField::euclidean();
    let cases = [
        ("dz + y*dx - x*dy", "sqrt(1 + x^2 + y^2)"),
        ("dz + y*dx - x*dy", "1"),
        ("dz + y*dx", "sqrt(1 + y^2)"),
        ("dz + y*dx", "y*sqrt(1 + y^2)"),
        ("dz + y*dx", "y"),
    ];
    let p = [0.3, 0.5, -0.2];
    for (omega, f) in cases {
        let w = OneForm::parse(omega)?;
        let (field, check) = verify_candidate(&w, &g, parse_scalar(f)?.as_ref(), p, &s)?;
        println!(
            "{omega:<18} f = {f:<20} max defect {:.3e}  V = {:.6?}",
            check.max(),
            field.v.values()
        );
    }
    Ok(())
}
