//! Run configurations, per-point reports and their JSONL/CSV encodings.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{parse_scalar, MetricField, OneForm};
use crate::invariants::compute_invariants;
use crate::jet::Point;
use crate::settings::Settings;
use crate::singular::{self, CharacteristicField, LambdaIdentities, SigmaInvariants, SigmaPoint};
use crate::symmetry::{build_system, integrability_residuals, reconstruct_symmetry};

pub const SCHEMA: &str = "srs/1";

/// Angle of the constant SO(2) rotation used for the gauge check.
pub const GAUGE_CHECK_ANGLE: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Regular,
    Degenerate,
    Noncontact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub jet_order: u8,
    /// Valid order left in the jet of `K`.
    pub k_valid_order: u8,
    /// `|ΔM|, |ΔK|` under a constant rotation of `(E₁, E₂)`.
    pub gauge_delta_m: f64,
    pub gauge_delta_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub base: Point,
    /// `ln f(point) − ln f(base)`.
    pub lnf: f64,
    /// `V` at the point for `f(base) = 1`.
    pub v: [f64; 3],
    pub max_residual: f64,
    pub evaluations: usize,
    pub verification_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub schema: String,
    pub point: Point,
    pub contact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "M")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "K")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "D")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "EQ1")]
    pub eq1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "EQ2")]
    pub eq2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reconstruction: Option<ReconstructionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl PointReport {
    fn empty(point: Point) -> Self {
        PointReport {
            schema: SCHEMA.into(),
            point,
            contact: false,
            lambda: None,
            m: None,
            k: None,
            d: None,
            eq1: None,
            eq2: None,
            residuals: None,
            branch: None,
            reconstruction: None,
            diagnostics: None,
            error: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularReport {
    pub schema: String,
    pub probe: [Point; 2],
    pub found: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<SigmaPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub characteristic: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extrapolated: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<SigmaInvariants>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identities: Option<LambdaIdentities>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Jsonl,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" | "jsonl" => Ok(Format::Jsonl),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointSource {
    List(Vec<Point>),
    Grid(GridSpec),
    Probes(Vec<[Point; 2]>),
}

/// Per-axis `start:stop:count` ranges or fixed values.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axes: [Vec<f64>; 3],
}

impl GridSpec {
    /// Points with `x` varying slowest.
    pub fn points(&self) -> Vec<Point> {
        let [xs, ys, zs] = &self.axes;
        let mut out = Vec::with_capacity(xs.len() * ys.len() * zs.len());
        for &x in xs {
            for &y in ys {
                for &z in zs {
                    out.push([x, y, z]);
                }
            }
        }
        out
    }
}

fn number(text: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Config(format!("not a finite number: {text:?}")))
}

/// `"x,y,z"`.
pub fn parse_point(text: &str) -> Result<Point> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "a point needs three coordinates: {text:?}"
        )));
    }
    Ok([number(parts[0])?, number(parts[1])?, number(parts[2])?])
}

/// Points separated by `;` or whitespace.
pub fn parse_points(text: &str) -> Result<Vec<Point>> {
    text.split(|c: char| c == ';' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(parse_point)
        .collect()
}

/// `"x=-1:1:5, y=-1:1:5, z=0"`. Omitted axes are fixed at zero.
pub fn parse_grid(text: &str) -> Result<GridSpec> {
    let mut axes: [Option<Vec<f64>>; 3] = [None, None, None];
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, range) = item
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("grid item needs `axis=`: {item:?}")))?;
        let slot = match name.trim() {
            "x" => 0,
            "y" => 1,
            "z" => 2,
            other => return Err(Error::Config(format!("unknown grid axis {other:?}"))),
        };
        if axes[slot].is_some() {
            return Err(Error::Config(format!("grid axis {name} given twice")));
        }
        let parts: Vec<&str> = range.split(':').collect();
        axes[slot] = Some(match parts.as_slice() {
            [v] => vec![number(v)?],
            [a, b, n] => {
                let (a, b) = (number(a)?, number(b)?);
                let n: usize = n
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("grid count must be an integer: {n:?}")))?;
                match n {
                    0 => return Err(Error::Config("grid count must be positive".into())),
                    1 => vec![a],
                    _ => (0..n)
                        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                        .collect(),
                }
            }
            _ => {
                return Err(Error::Config(format!(
                    "grid range must be `start:stop:count` or a value: {range:?}"
                )))
            }
        });
    }
    Ok(GridSpec {
        axes: axes.map(|a| a.unwrap_or_else(|| vec![0.0])),
    })
}

/// `"x0,y0,z0 : x1,y1,z1"`.
pub fn parse_probe(text: &str) -> Result<[Point; 2]> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("probe needs `p0 : p1`: {text:?}")))?;
    Ok([parse_point(a)?, parse_point(b)?])
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub omega: OneForm,
    pub metric: MetricField,
    pub settings: Settings,
    pub source: PointSource,
    pub format: Format,
}

impl RunConfig {
    pub fn new(
        omega: &str,
        metric: Option<&str>,
        settings: Settings,
        source: PointSource,
    ) -> Result<Self> {
        settings.validate()?;
        let metric = match metric {
            Some(text) => MetricField::parse(text)?,
            None => MetricField::euclidean(),
        };
        Ok(RunConfig {
            omega: OneForm::parse(omega)?,
            metric,
            settings,
            source,
            format: Format::Jsonl,
        })
    }

    fn points(&self) -> Result<Vec<Point>> {
        match &self.source {
            PointSource::List(p) => Ok(p.clone()),
            PointSource::Grid(g) => Ok(g.points()),
            PointSource::Probes(_) => Err(Error::Config(
                "this command takes points, not probes".into(),
            )),
        }
    }
}

fn gauge_deltas(cfg: &RunConfig, p: Point, m: f64, k: f64) -> Result<(f64, f64)> {
    let mut s = cfg.settings.clone();
    s.gauge.rotation = Some(parse_scalar(&GAUGE_CHECK_ANGLE.to_string())?);
    let inv = compute_invariants(&cfg.omega, &cfg.metric, p, &s)?.invariants;
    Ok(((inv.m.value() - m).abs(), (inv.k.value() - k).abs()))
}

fn point_report(cfg: &RunConfig, p: Point, residuals: bool) -> PointReport {
    let mut r = PointReport::empty(p);
    let a = match build_system(&cfg.omega, &cfg.metric, p, &cfg.settings) {
        Ok(a) => a,
        Err(Error::NonContact { lambda, .. }) => {
            r.lambda = Some(lambda);
            r.branch = Some(Branch::Noncontact);
            return r;
        }
        Err(e) => {
            r.error = Some(e.to_string());
            return r;
        }
    };
    let inv = &a.contact.invariants;
    let (m, k) = (inv.m.value(), inv.k.value());
    r.contact = true;
    r.lambda = Some(a.frame().lambda.value());
    r.m = Some(m);
    r.k = Some(k);
    r.d = Some(a.system.d.value());
    if let Some([eq1, eq2]) = a.system.eq_values() {
        r.eq1 = Some(eq1);
        r.eq2 = Some(eq2);
        r.branch = Some(Branch::Regular);
        if residuals {
            match integrability_residuals(&a) {
                Ok(res) => r.residuals = Some(res),
                Err(e) => r.error = Some(e.to_string()),
            }
        }
    } else {
        r.branch = Some(Branch::Degenerate);
    }
    match gauge_deltas(cfg, p, m, k) {
        Ok((dm, dk)) => {
            r.diagnostics = Some(Diagnostics {
                jet_order: cfg.settings.jet_order,
                k_valid_order: inv.k.valid_order(),
                gauge_delta_m: dm,
                gauge_delta_k: dk,
            })
        }
        Err(e) => r.error = Some(e.to_string()),
    }
    r
}

/// One report per point, in input order.
pub fn cmd_invariants(cfg: &RunConfig) -> Result<Vec<PointReport>> {
    let pts = cfg.points()?;
    Ok(pts
        .par_iter()
        .map(|&p| point_report(cfg, p, false))
        .collect())
}

/// Options of [`cmd_symmetry`].
#[derive(Debug, Clone, Default)]
pub struct SymmetryOptions {
    /// Base point of the reconstruction; `None` skips it.
    pub reconstruct_from: Option<Point>,
    pub via: Vec<Point>,
}

pub fn cmd_symmetry(cfg: &RunConfig, opts: &SymmetryOptions) -> Result<Vec<PointReport>> {
    let pts = cfg.points()?;
    Ok(pts
        .par_iter()
        .map(|&p| {
            let mut r = point_report(cfg, p, true);
            if let (Some(base), Some(Branch::Regular)) = (opts.reconstruct_from, r.branch) {
                match reconstruct_symmetry(
                    &cfg.omega,
                    &cfg.metric,
                    base,
                    p,
                    &opts.via,
                    &cfg.settings,
                ) {
                    Ok(s) => {
                        r.reconstruction = Some(ReconstructionReport {
                            base,
                            lnf: s.reconstruction.lnf,
                            v: s.field.v.values(),
                            max_residual: s.reconstruction.max_residual,
                            evaluations: s.reconstruction.evaluations,
                            verification_max: s.verification.max(),
                        })
                    }
                    Err(e) => r.error = Some(e.to_string()),
                }
            }
            r
        })
        .collect())
}

fn sigma_report(cfg: &RunConfig, probe: [Point; 2], sp: SigmaPoint) -> SingularReport {
    let mut r = SingularReport {
        schema: SCHEMA.into(),
        probe,
        found: true,
        sigma: Some(sp),
        characteristic: None,
        extrapolated: None,
        q: None,
        identities: None,
        error: None,
    };
    match singular::characteristic_field(&cfg.omega, sp.point, &cfg.settings) {
        Ok(CharacteristicField { v, extrapolated }) => {
            r.characteristic = Some(v.values());
            r.extrapolated = Some(extrapolated);
        }
        Err(e) => {
            r.error = Some(e.to_string());
            return r;
        }
    }
    match singular::analyze_singular(&cfg.omega, &cfg.metric, sp.point, None, &cfg.settings) {
        Ok(a) => {
            r.q = Some(SigmaInvariants {
                q112: a.c.get(1, crate::frame::Pair::P12).value(),
                q212: a.c.get(2, crate::frame::Pair::P12).value(),
            });
            match singular::lambda_identities(&a) {
                Ok(id) => r.identities = Some(id),
                Err(e) => r.error = Some(e.to_string()),
            }
        }
        Err(e) => r.error = Some(e.to_string()),
    }
    r
}

/// One record per Σ-point found, ordered by probe then parameter; a
/// `found: false` record for probes without a crossing.
pub fn cmd_singular(cfg: &RunConfig) -> Result<Vec<SingularReport>> {
    let probes = match &cfg.source {
        PointSource::Probes(p) => p.clone(),
        _ => {
            return Err(Error::Config(
                "the singular command takes --probe segments".into(),
            ))
        }
    };
    let nested: Vec<Vec<SingularReport>> = probes
        .par_iter()
        .map(|&probe| {
            let none = |error: Option<String>| SingularReport {
                schema: SCHEMA.into(),
                probe,
                found: false,
                sigma: None,
                characteristic: None,
                extrapolated: None,
                q: None,
                identities: None,
                error,
            };
            match singular::locate_sigma(&cfg.omega, &cfg.metric, probe[0], probe[1], &cfg.settings)
            {
                Ok(pts) if pts.is_empty() => vec![none(None)],
                Ok(pts) => pts
                    .into_iter()
                    .map(|sp| sigma_report(cfg, probe, sp))
                    .collect(),
                Err(e) => vec![none(Some(e.to_string()))],
            }
        })
        .collect();
    Ok(nested.into_iter().flatten().collect())
}

/// One JSON object per line.
pub fn write_jsonl<T: Serialize, W: Write>(items: &[T], mut out: W) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn flatten(prefix: &str, v: &serde_json::Value, row: &mut Vec<(String, String)>) {
    use serde_json::Value;
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, row);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, row);
            }
        }
        Value::Null => {}
        Value::String(s) => row.push((prefix.into(), s.clone())),
        other => row.push((prefix.into(), other.to_string())),
    }
}

/// Scalar leaves as columns named by their JSON path, in first-seen order.
pub fn write_csv<T: Serialize, W: Write>(items: &[T], mut out: W) -> std::io::Result<()> {
    let mut columns: Vec<String> = Vec::new();
    let mut rows = Vec::with_capacity(items.len());
    for item in items {
        let value = serde_json::to_value(item).map_err(std::io::Error::other)?;
        let mut row = Vec::new();
        flatten("", &value, &mut row);
        for (k, _) in &row {
            if !columns.contains(k) {
                columns.push(k.clone());
            }
        }
        rows.push(row);
    }
    writeln!(out, "{}", columns.join(","))?;
    for row in rows {
        let cells: Vec<String> = columns
            .iter()
            .map(|c| {
                row.iter()
                    .find(|(k, _)| k == c)
                    .map(|(_, v)| csv_cell(v))
                    .unwrap_or_default()
            })
            .collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

fn csv_cell(v: &str) -> String {
    if v.contains([',', '"', '\n']) {
        format!("\"{}\"", v.replace('"', "\"\""))
    } else {
        v.to_string()
    }
}

pub fn write_reports<T: Serialize, W: Write>(
    items: &[T],
    format: Format,
    out: W,
) -> std::io::Result<()> {
    match format {
        Format::Jsonl => write_jsonl(items, out),
        Format::Csv => write_csv(items, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(omega: &str, source: PointSource) -> RunConfig {
        RunConfig::new(omega, None, Settings::default(), source).unwrap()
    }

    #[test]
    fn parses_inputs() {
        assert_eq!(parse_point(" 1, -2.5,3e-1").unwrap(), [1.0, -2.5, 0.3]);
        assert!(parse_point("1,2").is_err());
        assert!(parse_point("1,2,nan").is_err());
        assert_eq!(parse_points("0,0,0; 1,0,0 2,0,0").unwrap().len(), 3);
        assert!(parse_points("").unwrap().is_empty());
        let g = parse_grid("x=-1:1:5, y=-1:1:3, z=0").unwrap();
        assert_eq!(g.axes[0], vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(g.points().len(), 15);
        assert_eq!(g.points()[1], [-1.0, 0.0, 0.0]);
        assert!(parse_grid("w=0").is_err());
        assert!(parse_grid("x=0:1:0").is_err());
        assert_eq!(
            parse_probe(" -1,0,0 : 1,0,0").unwrap(),
            [[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]
        );
    }

    #[test]
    fn invariants_report_heisenberg_origin() {
        let r =
            cmd_invariants(&cfg("dz + y*dx - x*dy", PointSource::List(vec![[0.0; 3]]))).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].m.unwrap().abs() < 1e-14);
        assert!((r[0].k.unwrap() - 6.0).abs() < 1e-12);
        assert_eq!(r[0].branch, Some(Branch::Degenerate));
        assert!(r[0].eq1.is_none() && r[0].residuals.is_none());
        let d = r[0].diagnostics.as_ref().unwrap();
        assert!(d.gauge_delta_k < 1e-12 && d.gauge_delta_m < 1e-12);
    }

    #[test]
    fn noncontact_points_are_reported() {
        let r = cmd_invariants(&cfg("dy + x^2*dz", PointSource::List(vec![[0.0; 3]]))).unwrap();
        assert_eq!(r[0].branch, Some(Branch::Noncontact));
        assert!(!r[0].contact);
    }

    #[test]
    fn json_round_trip() {
        let r = cmd_symmetry(
            &cfg(
                "dz + y*dx - x*dy",
                PointSource::List(vec![[0.3, -0.2, 0.1]]),
            ),
            &SymmetryOptions::default(),
        )
        .unwrap();
        let text = serde_json::to_string(&r[0]).unwrap();
        let back: PointReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r[0]);
        assert!(text.starts_with("{\"schema\":\"srs/1\""));
    }

    #[test]
    fn singular_records() {
        let c = cfg(
            "dy + x^2*dz",
            PointSource::Probes(vec![
                parse_probe("-1,0,0 : 1,0,0").unwrap(),
                parse_probe("0.1,0,0 : 1,0,0").unwrap(),
            ]),
        );
        let r = cmd_singular(&c).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r[0].found && !r[1].found);
        let q = r[0].q.unwrap();
        assert!(q.q112.abs() < 1e-8 && q.q212.abs() < 1e-8);
    }

    #[test]
    fn csv_flattens_scalars() {
        let r = cmd_invariants(&cfg(
            "dz + y*dx",
            PointSource::List(vec![[0.0; 3], [0.0, 1.0, 0.0]]),
        ))
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert!(header.contains(&"point.0") && header.contains(&"K"));
        assert_eq!(lines.count(), 2);
    }
}
