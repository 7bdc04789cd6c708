//! Locating the singular surface of `dy + x²dz` and its invariants.

use subriemann::singular::{
    analyze_singular, characteristic_field, check_special_rescale, lambda_identities,
    lambda_squared_rescale, locate_sigma, sigma_invariants,
};
use subriemann::{parse_scalar, MetricField, OneForm, Settings};

fn main() -> subriemann::Result<()> {
    let s = Settings::default();
    let omega = OneForm::parse("dy + x^2*dz")?;
    let g = MetricField::parse("1 + y^2; 0; 0; 1; 0; 1 + x*z")?;
    for sp in locate_sigma(&omega, &g, [-1.0, 0.4, 0.3], [1.0, 0.4, 0.3], &s)? {
        println!(
            "Σ at {:?} (|λ| {:e}, |dλ|_Δ| {:.6})",
            sp.point, sp.lambda_residual, sp.lambda_gradient_on_delta
        );
        let v = characteristic_field(&omega, sp.point, &s)?;
        println!(
            "  characteristic field {:?} (extrapolated: {})",
            v.v.values(),
            v.extrapolated
        );
        let q = sigma_invariants(&omega, &g, sp.point, &s)?;
        let rescaled = sigma_invariants(&lambda_squared_rescale(&omega, &g, &s), &g, sp.point, &s)?;
        println!(
            "  Q = ({:.10}, {:.10}); after e^(λ²) rescale ({:.10}, {:.10})",
            q.q112, q.q212, rescaled.q112, rescaled.q212
        );
        let x = parse_scalar("x")?;
        let verdict = check_special_rescale(&omega, &g, x.as_ref(), &[sp.point], 1e-9, &s)?;
        println!("  e^x ω stays special: {}", verdict.preserves_specialness);
    }
    let off = analyze_singular(&omega, &g, [0.3, 0.4, -0.2], None, &s)?;
    println!("off Σ: {:?}", lambda_identities(&off)?);
    Ok(())
}
