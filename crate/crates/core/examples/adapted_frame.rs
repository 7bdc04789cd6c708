//! The adapted frame of a contact structure and its nine structure functions.

use subriemann::frame::{build_contact_frame, Pair};
use subriemann::{MetricField, OneForm, Settings};

fn main() -> subriemann::Result<()> {
    let omega = OneForm::parse("dz + y*dx")?;
    let metric = MetricField::euclidean();
    let p = [0.2, 0.7, -0.1];
    let (frame, c) = build_contact_frame(&omega, &metric, p, &Settings::default())?;
    for (i, row) in frame.frame_matrix().iter().enumerate() {
        println!("E{} = {:?}", i + 1, row);
    }
    println!("λ = ω([E1,E2]) = {}", frame.lambda.value());
    let v = c.values();
    for (a, row) in v.iter().enumerate() {
        let cells: Vec<String> = Pair::ALL
            .iter()
            .map(|pair| format!("{:?} {:+.6}", pair, row[pair.index()]))
            .collect();
        println!("C^{}: {}", a + 1, cells.join("  "));
    }
    Ok(())
}
