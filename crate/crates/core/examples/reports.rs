//! Running the report pipeline on a grid and writing JSONL and CSV.

use subriemann::report::{
    cmd_invariants, parse_grid, write_csv, write_jsonl, PointSource, RunConfig,
};
use subriemann::Settings;

fn main() -> subriemann::Result<()> {
    let grid = parse_grid("x=-1:1:3, y=0:1:2, z=0")?;
    let cfg = RunConfig::new(
        "dz + y*dx",
        None,
        Settings::default(),
        PointSource::Grid(grid),
    )?;
    let reports = cmd_invariants(&cfg)?;
    let stdout = std::io::stdout();
    write_jsonl(&reports, stdout.lock()).expect("stdout");
    write_csv(&reports, stdout.lock()).expect("stdout");
    Ok(())
}
