//! Parsing 1-forms and metrics and evaluating `dω` and `ω∧dω`.

use subriemann::{MetricField, OneForm};

fn main() -> subriemann::Result<()> {
    let omega = OneForm::parse("dz + y*dx - x*dy")?;
    let metric = MetricField::parse("1 + x^2; 0; 0; 1; 0; 1")?;
    let p = [0.3, -0.4, 1.0];
    println!("ω = {}", omega.label());
    println!("ω at p       {:?}", omega.eval(p, 1)?.values());
    println!(
        "dω at p      {:?}",
        omega.exterior_derivative(p, 1)?.values()
    );
    println!("ω∧dω at p    {}", omega.contact_defect(p, 1)?);
    let g = metric.eval(p, 1)?;
    println!(
        "metric at p  {:?}",
        g.g.each_ref().map(|row| row.each_ref().map(|j| j.value()))
    );

    let fold = OneForm::parse("dy + x^2*dz")?;
    for x in [-0.5, 0.0, 0.5] {
        println!(
            "fold: ω∧dω at x = {x:+}  {}",
            fold.contact_defect([x, 0.0, 0.0], 1)?
        );
    }
    Ok(())
}
