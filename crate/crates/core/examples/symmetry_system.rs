//! Deciding and reconstructing an infinitesimal symmetry.
//!
//! The Heisenberg form with metric `(1 + x²)dx² + dy² + dz²` keeps only the
//! translations in `z`, so the symmetry system is regular and integrable.

use subriemann::symmetry::{build_system, integrability_residuals, reconstruct_symmetry};
use subriemann::{MetricField, OneForm, Settings};

fn main() -> subriemann::Result<()> {
    let s = Settings::default();
    let omega = OneForm::parse("dz + y*dx - x*dy")?;
    let metric = MetricField::parse("1 + x^2; 0; 0; 1; 0; 1")?;
    let base = [0.4, -0.7, 1.2];
    for p in [[1.1, 0.3, -0.5], [-0.2, 0.9, 0.0]] {
        let a = build_system(&omega, &metric, p, &s)?;
        println!(
            "at {p:?}: D = {:.6e}, (EQ1, EQ2) = {:?}",
            a.system.d.value(),
            a.system.eq_values()
        );
        println!("  residuals {:?}", integrability_residuals(&a)?);
        let r = reconstruct_symmetry(&omega, &metric, base, p, &[], &s)?;
        println!(
            "  ln f − ln f(base) = {:.12} ({} evaluations), V = {:?}",
            r.reconstruction.lnf,
            r.reconstruction.evaluations,
            r.field.v.values()
        );
    }

    let cartan = OneForm::parse("dz + y*dx")?;
    let a = build_system(&cartan, &MetricField::euclidean(), [0.3, 0.5, -0.2], &s)?;
    println!(
        "Cartan: degenerate = {}, D = {:e}",
        a.system.degenerate,
        a.system.d.value()
    );
    Ok(())
}
