use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use rigidline::certify::{certify_by_lift, certify_super_stable, AffineMap, SearchOptions, SuperStabilityCertificate};
use rigidline::flex::{find_alternate_realization, trace_flex, FlexOptions};
use rigidline::framework::{framework_to_json, parse_framework, Framework};
use rigidline::gallery::{
    alternating_cycle, orchard_ladder, prism_desargues_2d, prism_line_flexible, prism_line_ur, search_desargues_2d,
    stretched_cycle, triangular_positions, ConcurrentLines, GalleryItem,
};
use rigidline::linalg::{psd_rank, MatrixR};
use rigidline::scalar::{parse_scalar, Scalar};
use rigidline::stress::{
    conic_at_infinity, equilibrium_stress_basis, is_equilibrium, is_infinitesimally_rigid, parse_stress, stress_matrix,
    stress_to_json, Stress,
};
use rigidline::transform::{affine_invariance_demo, apply_affine, project_orthogonal, ProjectionTarget};
use rigidline::{Error, Result};

use crate::report;
use crate::svg::{render_svg, Drawing};

#[derive(Debug, Parser)]
#[command(name = "rigidline", version, about = "Universal rigidity certificates for bar-joint frameworks")]
pub struct Cli {
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Write an SVG drawing here.
    #[arg(long, global = true, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimensions, span, connectivity, infinitesimal rigidity and stresses.
    Analyze { file: PathBuf },
    /// Search for (or check) a super-stability certificate.
    Certify {
        file: PathBuf,
        /// Check this stress instead of searching.
        #[arg(long)]
        stress: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Save the certifying stress.
        #[arg(long, value_name = "PATH")]
        save_stress: Option<PathBuf>,
    },
    /// Certify LOW through a super-stable HIGH sharing a stress.
    Lift {
        low: PathBuf,
        high: PathBuf,
        #[arg(long)]
        stress: PathBuf,
    },
    /// Orthogonal projection with exact distance splitting.
    Project {
        file: PathBuf,
        /// Keep the first K coordinates.
        #[arg(long, value_name = "K", conflicts_with = "direction", required_unless_present = "direction")]
        onto: Option<usize>,
        /// A direction spanning the target, e.g. "3/5,4/5". Repeat for more.
        #[arg(long)]
        direction: Vec<String>,
        /// Save the projected framework.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Look for a planar realization of a line framework that is not congruent.
    Flex {
        file: PathBuf,
        /// Removed rung of a prism, or the grounded bar of a 4-cycle.
        #[arg(long, value_name = "I,J")]
        remove: String,
        /// Frames sampled along the flex.
        #[arg(long, default_value_t = 9)]
        steps: usize,
    },
    /// Build a named example.
    Gallery {
        /// stretched-cycle, alternating-cycle, prism-2d, prism-line-ur, prism-line-flex or orchard-ladder.
        name: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Left-to-right vertex order for prism-line-flex, e.g. "2,5,1,4,3,6".
        #[arg(long)]
        order: Option<String>,
        /// Vertex count for the cycles.
        #[arg(long)]
        size: Option<usize>,
        /// Save the framework here instead of printing it.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        save_stress: Option<PathBuf>,
    },
    /// Apply q = A p + b and re-certify the image.
    Affine {
        file: PathBuf,
        /// Rows separated by ';', entries by ','.
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        translate: Option<String>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

/// What a command produced.
pub struct Outcome {
    pub code: u8,
    pub report: Map<String, Value>,
    pub drawing: Option<Drawing>,
    /// Printed to standard output in place of the report.
    pub stdout: Option<String>,
    pub message: String,
}

impl Outcome {
    fn new(code: u8, report: Map<String, Value>, message: impl Into<String>) -> Self {
        Outcome { code, report, drawing: None, stdout: None, message: message.into() }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Inconsistency(_) => 3,
        Error::SearchFailed(_) => 1,
        _ => 2,
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn text(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn parse_list(s: &str) -> Result<Vec<Scalar>> {
    s.split(',').map(|t| parse_scalar(t.trim())).collect()
}

fn parse_matrix(s: &str) -> Result<MatrixR> {
    let rows = s.split(';').map(parse_list).collect::<Result<Vec<_>>>()?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(Error::ShapeMismatch("matrix rows differ in length".into()));
    }
    Ok(MatrixR::from_rows(rows))
}

fn parse_edge(s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Error::InvalidArgument(format!("expected I,J, got {s:?}"));
    match parts.as_slice() {
        [a, b] => Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

fn parse_order(s: &str) -> Result<Vec<usize>> {
    let tokens: Vec<&str> = if s.contains(',') || s.contains(' ') {
        s.split([',', ' ']).filter(|t| !t.is_empty()).collect()
    } else {
        s.split("").filter(|t| !t.is_empty()).collect()
    };
    tokens
        .iter()
        .map(|t| t.parse().map_err(|_| Error::InvalidArgument(format!("bad vertex label {t:?} in order"))))
        .collect()
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

/// Independent re-check of a Certified verdict before it is reported.
fn reverify(f: &Framework, cert: &SuperStabilityCertificate) -> Result<()> {
    let g = f.reduce_to_span();
    let w = cert.stress.as_ref().ok_or_else(|| Error::Inconsistency("certified without a stress".into()))?;
    if !is_equilibrium(&g, w)? {
        return Err(Error::Inconsistency("certified stress is not an equilibrium".into()));
    }
    let psd = psd_rank(&stress_matrix(g.graph(), w)?)?;
    if !psd.is_psd() || psd.rank != cert.required_rank {
        return Err(Error::Inconsistency(format!(
            "certified stress matrix has rank {} (psd {}), expected {}",
            psd.rank,
            psd.is_psd(),
            cert.required_rank
        )));
    }
    if conic_at_infinity(&g).is_some() {
        return Err(Error::Inconsistency("certified framework has edge directions on a conic".into()));
    }
    Ok(())
}

fn drawing(f: &Framework, w: Option<&Stress>) -> Option<Drawing> {
    Drawing::from_framework(f, w).ok()
}

fn analyze(file: &Path) -> Result<Outcome> {
    let bytes = read(file)?;
    let f = parse_framework(text(&bytes)?)?;
    let mut r = report::envelope("analyze", &[bytes]);
    r.insert("framework".into(), report::framework_summary(&f));
    let basis = equilibrium_stress_basis(&f.reduce_to_span());
    r.insert("stress_basis".into(), report::stress_basis(&basis));
    let unique = (basis.len() == 1).then(|| &basis[0]);
    let mut out = Outcome::new(0, r, format!("{} stress(es) in equilibrium", basis.len()));
    out.drawing = drawing(&f, unique);
    Ok(out)
}

fn certify(file: &Path, stress: Option<&Path>, seed: u64, save: Option<&Path>) -> Result<Outcome> {
    let bytes = read(file)?;
    let f = parse_framework(text(&bytes)?)?;
    let mut inputs = vec![bytes];
    let candidate = match stress {
        Some(p) => {
            let b = read(p)?;
            let w = parse_stress(text(&b)?, f.graph())?;
            inputs.push(b);
            Some(w)
        }
        None => None,
    };
    let cert = certify_super_stable(&f, candidate.as_ref(), &SearchOptions::seeded(seed))?;
    if cert.is_certified() {
        reverify(&f, &cert)?;
    }
    let mut r = report::envelope("certify", &inputs);
    r.insert("framework".into(), report::framework_summary(&f));
    r.insert("certificate".into(), report::certificate(&cert));
    r.insert("seed".into(), json!(seed));
    if let (Some(path), Some(w)) = (save, cert.stress.as_ref().filter(|_| cert.is_certified())) {
        write(path, &stress_to_json(f.graph(), w)?)?;
    }
    let (code, message) = if cert.proves_universal_rigidity() {
        let rank = cert.psd.as_ref().map(|p| p.rank).unwrap_or(0);
        (0, format!("{} (stress matrix rank {rank})", cert.verdict.label()))
    } else {
        (1, format!("{}; {}", cert.verdict.label(), report::ONE_SIDED))
    };
    let mut out = Outcome::new(code, r, message);
    out.drawing = drawing(&f, cert.stress.as_ref());
    Ok(out)
}

fn lift(low: &Path, high: &Path, stress: &Path) -> Result<Outcome> {
    let (lb, hb, sb) = (read(low)?, read(high)?, read(stress)?);
    let lf = parse_framework(text(&lb)?)?;
    let hf = parse_framework(text(&hb)?)?;
    let w = parse_stress(text(&sb)?, lf.graph())?;
    let v = certify_by_lift(&lf, &hf, &w)?;
    let mut r = report::envelope("lift", &[lb, hb, sb]);
    r.insert("low".into(), report::framework_summary(&lf));
    r.insert("high".into(), report::framework_summary(&hf));
    r.insert("lift".into(), report::lift(&v));
    let (code, message) = if v.certified {
        (0, "lift certifies the low framework".to_string())
    } else {
        (1, format!("not certified: {}", v.failures().join("; ")))
    };
    let mut out = Outcome::new(code, r, message);
    out.drawing = drawing(&lf, Some(&w));
    Ok(out)
}

fn project(file: &Path, onto: Option<usize>, directions: &[String], out_path: Option<&Path>) -> Result<Outcome> {
    let bytes = read(file)?;
    let f = parse_framework(text(&bytes)?)?;
    let target = match onto {
        Some(k) => ProjectionTarget::FirstCoordinates(k),
        None => ProjectionTarget::Directions(directions.iter().map(|d| parse_list(d)).collect::<Result<_>>()?),
    };
    let split = project_orthogonal(&f, &target)?;
    if !split.splitting_holds() {
        return Err(Error::Inconsistency("squared distances do not split over the projection".into()));
    }
    let isometric = split.low_isometric();
    let low = isometric.clone().unwrap_or_else(|| split.low.clone());
    let mut r = report::envelope("project", &[bytes]);
    r.insert("high".into(), report::framework_summary(&f));
    r.insert("low".into(), report::framework_summary(&low));
    r.insert("low_isometric".into(), json!(isometric.is_some()));
    r.insert("low_metric".into(), report::scalars(&split.low_metric));
    r.insert("heights".into(), json!(split.heights.iter().map(|h| report::scalars(h)).collect::<Vec<_>>()));
    r.insert("splitting_holds".into(), json!(true));
    r.insert(
        "infinitesimally_rigid".into(),
        json!({
            "before": is_infinitesimally_rigid(&f.reduce_to_span()).ok(),
            "after": is_infinitesimally_rigid(&low.reduce_to_span()).ok(),
        }),
    );
    if let Some(p) = out_path {
        write(p, &framework_to_json(&low))?;
    }
    let mut out = Outcome::new(0, r, format!("projected to dimension {}", low.dim()));
    out.drawing = drawing(&low, None);
    Ok(out)
}

fn flex(file: &Path, remove: &str, steps: usize) -> Result<Outcome> {
    let bytes = read(file)?;
    let f = parse_framework(text(&bytes)?)?;
    let edge = parse_edge(remove)?;
    let opts = FlexOptions::default();
    let cert = certify_super_stable(&f, None, &SearchOptions::default())?;
    let found = find_alternate_realization(&f, edge, &opts)?;
    let mut r = report::envelope("flex", &[bytes]);
    r.insert("framework".into(), report::framework_summary(&f));
    r.insert("removed".into(), json!([edge.0, edge.1]));
    r.insert("certificate".into(), report::certificate(&cert));
    let Some(w) = found else {
        r.insert("witness".into(), Value::Null);
        let mut out = Outcome::new(1, r, "no witness found (not a proof)");
        out.drawing = drawing(&f, None);
        return Ok(out);
    };
    if cert.proves_universal_rigidity() {
        return Err(Error::Inconsistency("flex witness found for a certified framework".into()));
    }
    let path = trace_flex(&f, edge, w.branch, steps, &opts)?;
    r.insert("witness".into(), report::witness(&w));
    r.insert("path".into(), report::path(&path));
    let mut out = Outcome::new(0, r, format!("witness at theta = {:.6}", w.theta));
    out.drawing = Some(Drawing::planar(&w.points, f.graph(), None));
    Ok(out)
}

struct GalleryArgs<'a> {
    name: &'a str,
    seed: Option<u64>,
    order: Option<&'a str>,
    size: Option<usize>,
    out: Option<&'a Path>,
    save_stress: Option<&'a Path>,
}

fn gallery(a: GalleryArgs) -> Result<Outcome> {
    let seed = a.seed.unwrap_or(0);
    let mut extra = Map::new();
    let item: GalleryItem = match a.name {
        "stretched-cycle" => stretched_cycle(&triangular_positions(a.size.unwrap_or(4)))?,
        "alternating-cycle" => alternating_cycle(a.size.unwrap_or(6), seed)?,
        "prism-2d" => match a.seed {
            Some(s) => search_desargues_2d(s)?,
            None => prism_desargues_2d(&ConcurrentLines::default())?,
        },
        "prism-line-ur" => {
            let ur = prism_line_ur(seed)?;
            extra.insert("order".into(), json!(ur.order));
            extra.insert("planar".into(), report::framework_summary(&ur.planar.framework));
            extra.insert("direction".into(), report::scalars(&ur.direction));
            extra.insert("flat_stress".into(), report::stress(&ur.flat_stress));
            extra.insert("planar_stress".into(), report::stress(&ur.planar_stress));
            ur.item
        }
        "prism-line-flex" => {
            let order = match a.order {
                Some(s) => parse_order(s)?,
                None => prism_line_ur(seed)?.order,
            };
            let flex = prism_line_flexible(&order, seed)?;
            extra.insert("order".into(), json!(flex.order));
            extra.insert("witness".into(), report::witness(&flex.witness));
            flex.item
        }
        "orchard-ladder" => {
            let ladder = orchard_ladder(seed)?;
            extra.insert("planar".into(), report::framework_summary(&ladder.planar.framework));
            extra.insert("lift".into(), report::lift(&ladder.lift));
            ladder.projection
        }
        other => return Err(Error::InvalidArgument(format!("unknown gallery item {other:?}"))),
    };
    let f = &item.framework;
    let mut r = report::envelope("gallery", &[]);
    r.insert("name".into(), json!(item.name));
    r.insert("seed".into(), json!(seed));
    r.insert("framework".into(), report::framework_summary(f));
    r.insert("stress".into(), item.stress.as_ref().map(report::stress).unwrap_or(Value::Null));
    r.insert("notes".into(), json!(item.notes));
    r.extend(extra);
    if let Some(w) = &item.stress {
        if !is_equilibrium(f, w)? {
            return Err(Error::Inconsistency(format!("{} stress is not an equilibrium", item.name)));
        }
        if let Some(p) = a.save_stress {
            write(p, &stress_to_json(f.graph(), w)?)?;
        }
    } else if a.save_stress.is_some() {
        return Err(Error::InvalidArgument(format!("{} has no stress to save", item.name)));
    }
    let json_text = framework_to_json(f);
    let mut out = Outcome::new(0, r, format!("{}: n = {}, m = {}, d = {}", item.name, f.n(), f.m(), f.dim()));
    match a.out {
        Some(p) => write(p, &json_text)?,
        None => out.stdout = Some(json_text),
    }
    out.drawing = drawing(f, item.stress.as_ref());
    Ok(out)
}

fn affine(file: &Path, matrix: &str, translate: Option<&str>, out_path: Option<&Path>) -> Result<Outcome> {
    let bytes = read(file)?;
    let f = parse_framework(text(&bytes)?)?;
    let a = parse_matrix(matrix)?;
    let map = match translate {
        Some(t) => AffineMap::new(a, parse_list(t)?)?,
        None => AffineMap::linear(a),
    };
    let image = apply_affine(&f, &map)?;
    let mut r = report::envelope("affine", &[bytes]);
    r.insert("framework".into(), report::framework_summary(&f));
    r.insert("image".into(), report::framework_summary(&image));
    r.insert("matrix".into(), report::matrix(&map.a));
    r.insert("translate".into(), report::scalars(&map.b));
    let cert = certify_super_stable(&f, None, &SearchOptions::default())?;
    r.insert("certificate".into(), report::certificate(&cert));
    let (code, message) = if cert.is_certified() {
        let demo = affine_invariance_demo(&f, &cert, &map, 0)?;
        r.insert("image_span".into(), json!(demo.image_span));
        r.insert("image_certified".into(), json!(demo.certified));
        r.insert("image_lift".into(), demo.lift.as_ref().map(report::lift).unwrap_or(Value::Null));
        r.insert("image_direct".into(), demo.direct.as_ref().map(report::certificate).unwrap_or(Value::Null));
        if demo.certified {
            (0, "image certified through the lift test".to_string())
        } else {
            let why = demo.reason.map(|x| x.to_string()).unwrap_or_else(|| "lift test failed".into());
            (1, format!("image not certified: {why}"))
        }
    } else {
        (0, format!("source {}; image written without certificate", cert.verdict.label()))
    };
    if let Some(p) = out_path {
        write(p, &framework_to_json(&image))?;
    }
    let mut out = Outcome::new(code, r, message);
    out.drawing = drawing(&image, None);
    Ok(out)
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Analyze { file } => analyze(file),
        Command::Certify { file, stress, seed, save_stress } => {
            certify(file, stress.as_deref(), *seed, save_stress.as_deref())
        }
        Command::Lift { low, high, stress } => lift(low, high, stress),
        Command::Project { file, onto, direction, out } => project(file, *onto, direction, out.as_deref()),
        Command::Flex { file, remove, steps } => flex(file, remove, *steps),
        Command::Gallery { name, seed, order, size, out, save_stress } => gallery(GalleryArgs {
            name,
            seed: *seed,
            order: order.as_deref(),
            size: *size,
            out: out.as_deref(),
            save_stress: save_stress.as_deref(),
        }),
        Command::Affine { file, matrix, translate, out } => affine(file, matrix, translate.as_deref(), out.as_deref()),
    }
}

/// Runs a parsed command and writes its outputs; returns the exit code.
pub fn run(cli: &Cli) -> u8 {
    let outcome = match execute(cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("rigidline: {e}");
            return exit_code(&e);
        }
    };
    let report_text = report::to_text(&outcome.report);
    let written = (|| -> Result<()> {
        match (&cli.json, &outcome.stdout) {
            (Some(p), _) => write(p, &report_text)?,
            (None, Some(_)) => {}
            (None, None) => print!("{report_text}"),
        }
        if let Some(s) = &outcome.stdout {
            print!("{s}");
        }
        if let Some(p) = &cli.svg {
            let d = outcome.drawing.as_ref().ok_or(Error::UnsupportedDimension(3))?;
            write(p, &render_svg(d))?;
        }
        Ok(())
    })();
    if let Err(e) = written {
        eprintln!("rigidline: {e}");
        return exit_code(&e);
    }
    eprintln!("{}", outcome.message);
    outcome.code
}

#[cfg(test)]
mod tests {
    use super::*;
    use rigidline::scalar::{format_scalar, int, ratio};

    #[test]
    fn parses_matrices_and_lists() {
        let m = parse_matrix("1,2;3/4,-1").unwrap();
        assert_eq!(m.row(1), &[ratio(3, 4), int(-1)]);
        assert!(parse_matrix("1,2;3").is_err());
        assert_eq!(parse_list(" 1/2 , 3").unwrap(), vec![ratio(1, 2), int(3)]);
    }

    #[test]
    fn parses_edges_and_orders() {
        assert_eq!(parse_edge("2,5").unwrap(), (2, 5));
        assert!(parse_edge("2").is_err());
        assert_eq!(parse_order("251436").unwrap(), vec![2, 5, 1, 4, 3, 6]);
        assert_eq!(parse_order("2, 5,1,4,3,6").unwrap(), vec![2, 5, 1, 4, 3, 6]);
        assert_eq!(parse_order("2 5 1 4 3 6").unwrap(), vec![2, 5, 1, 4, 3, 6]);
    }

    #[test]
    fn error_codes() {
        assert_eq!(exit_code(&Error::Inconsistency(String::new())), 3);
        assert_eq!(exit_code(&Error::SearchFailed(String::new())), 1);
        assert_eq!(exit_code(&Error::NotSymmetric), 2);
    }

    #[test]
    fn scalar_lists_render_canonically() {
        assert_eq!(format_scalar(&ratio(6, 4)), "3/2");
    }
}
