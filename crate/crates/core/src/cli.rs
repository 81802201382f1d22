//! Body spec files and run reports. The `midepth` binary parses flags and
//! calls the `cmd_*` functions here; each returns a JSON report with sorted
//! keys plus optional CSV sweep data.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::ops::RangeInclusive;

use crate::centerpoint::theorem3_pipeline_with;
use crate::depth::{estimate_depth_with, DepthOptions};
use crate::harness::run_suite;
use crate::hull::{HPolytope, MixedBody};
use crate::measure::{layer_cake_check, mixed_integer_volume};
use crate::necessity::{necessity_grid, necessity_report, BallFiberBody};
use crate::{Error, Result, TAU_NUM};

/// Input body document, tagged by `"type"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum BodySpecFile {
    Hpolytope {
        n: usize,
        d: usize,
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
    Ballfiber { n: usize, d: usize, k: usize },
    Box { n: usize, d: usize, lo: Vec<f64>, hi: Vec<f64> },
}

impl BodySpecFile {
    /// Parses JSON; syntax errors carry their line and column.
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("body spec: {e}")))
    }

    pub fn to_body(&self) -> Result<MixedBody> {
        match self {
            BodySpecFile::Hpolytope { n, d, a, b } => {
                if a.len() != b.len() {
                    return Err(Error::InvalidInput(format!("\"A\" has {} rows but \"b\" has {}", a.len(), b.len())));
                }
                if let Some((i, row)) = a.iter().enumerate().find(|(_, r)| r.len() != n + d) {
                    return Err(Error::InvalidInput(format!(
                        "row {i} of \"A\" has {} entries, expected n + d = {}",
                        row.len(),
                        n + d
                    )));
                }
                MixedBody::polytope(*n, *d, HPolytope::new(a.clone(), b.clone())?)
            }
            BodySpecFile::Ballfiber { n, d, k } => Ok(MixedBody::ball_fiber(BallFiberBody::new(*n, *d, *k)?)),
            BodySpecFile::Box { n, d, lo, hi } => MixedBody::cube(*n, *d, lo, hi),
        }
    }
}

pub fn load_body(text: &str) -> Result<(BodySpecFile, MixedBody)> {
    let spec = BodySpecFile::parse(text)?;
    let body = spec.to_body()?;
    Ok((spec, body))
}

/// `"3, 0.5"` → `[3.0, 0.5]`.
pub fn parse_point(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad coordinate {t:?} in point {s:?}")))
        })
        .collect()
}

/// `"6..60"` or `"6..=60"`, both inclusive.
pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>> {
    let bad = || Error::InvalidInput(format!("bad range {s:?}, expected a..b"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let lo = a.trim().parse().map_err(|_| bad())?;
    let hi = b.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

/// Report, optional CSV, and an optional failed verification that should
/// turn into a nonzero exit after the report is written.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub report: Value,
    pub csv: Option<String>,
    pub failure: Option<String>,
}

fn report(command: &str, inputs: Value, seed: Option<u64>, result: Value) -> Value {
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "inputs": inputs,
        "seed": seed,
        "result": result,
    })
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::InvalidInput(e.to_string()))
}

/// Pretty JSON; keys come out sorted because `Value` maps are ordered.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileOptions {
    pub grid: usize,
    pub samples: usize,
    pub seed: u64,
}

pub fn cmd_mivol(spec: &BodySpecFile, list_fibers: bool, profile: Option<&ProfileOptions>) -> Result<Run> {
    let body = spec.to_body()?;
    let mi = mixed_integer_volume(&body)?;
    let mut result = json!({ "total": mi.total, "lattice_count": mi.lattice_count });
    if list_fibers {
        result["fibers"] = to_value(&mi.fibers)?;
    }
    let mut csv = None;
    if let Some(p) = profile {
        let lc = layer_cake_check(&body, p.grid, p.samples, p.seed)?;
        let mut out = String::from("level,volume,count\n");
        for ((s, v), c) in lc.profile.levels.iter().zip(&lc.profile.volumes).zip(&lc.profile.counts) {
            out.push_str(&format!("{s},{v},{c}\n"));
        }
        csv = Some(out);
        let mut summary = to_value(&lc)?;
        if let Some(m) = summary.as_object_mut() {
            m.remove("profile");
        }
        result["layer_cake"] = summary;
    }
    let inputs = json!({
        "body": to_value(spec)?,
        "list_fibers": list_fibers,
        "profile": profile.map(|p| json!({ "grid": p.grid, "samples": p.samples })),
    });
    Ok(Run { report: report("mivol", inputs, profile.map(|p| p.seed), result), csv, failure: None })
}

pub fn cmd_depth(spec: &BodySpecFile, point: &[f64], dirs: usize, seed: u64, with_csv: bool) -> Result<Run> {
    let body = spec.to_body()?;
    let mut opts = DepthOptions::new(dirs, seed);
    opts.keep_sweep = with_csv;
    let rep = estimate_depth_with(&body, point, &opts)?;
    let csv = with_csv.then(|| {
        let m = body.dim();
        let mut out = String::from("direction_index");
        for i in 1..=m {
            out.push_str(&format!(",a{i}"));
        }
        out.push_str(",ratio\n");
        for e in &rep.sweep {
            out.push_str(&e.index.to_string());
            for a in &e.direction {
                out.push_str(&format!(",{a}"));
            }
            out.push_str(&format!(",{}\n", e.ratio));
        }
        out
    });
    let inputs = json!({ "body": to_value(spec)?, "point": point, "dirs": dirs });
    Ok(Run { report: report("depth", inputs, Some(seed), to_value(&rep)?), csv, failure: None })
}

/// Runs the centroid-rounding pipeline; with `verify_dirs > 0` the depth of
/// `y*` is estimated and must not fall below the certified coefficient.
pub fn cmd_centerpoint(spec: &BodySpecFile, k: Option<f64>, verify_dirs: usize, seed: u64) -> Result<Run> {
    let body = spec.to_body()?;
    let cert = theorem3_pipeline_with(&body, k)?;
    let mut result = json!({ "certificate": to_value(&cert)? });
    let mut warnings = Vec::new();
    if cert.sub_threshold {
        warnings.push(format!(
            "k = {} is below 3e(n+d)/2; the construction runs but certifies no depth",
            cert.k
        ));
    }
    let mut failure = None;
    if verify_dirs > 0 {
        let mut opts = DepthOptions::new(verify_dirs, seed);
        opts.lower_bound = Some(cert.coefficient);
        let rep = estimate_depth_with(&body, &cert.y_star, &opts)?;
        if rep.min_ratio < cert.coefficient - TAU_NUM {
            failure = Some(format!(
                "depth estimate {} is below the certified coefficient {}",
                rep.min_ratio, cert.coefficient
            ));
        }
        result["verification"] = to_value(&rep)?;
    }
    result["warnings"] = json!(warnings);
    let inputs = json!({ "body": to_value(spec)?, "k": k, "verify_dirs": verify_dirs });
    Ok(Run { report: report("centerpoint", inputs, Some(seed), result), csv: None, failure })
}

/// One report for `m`, or a CSV sweep over `grid`.
pub fn cmd_necessity(alpha: f64, k: usize, m: Option<usize>, grid: Option<RangeInclusive<usize>>) -> Result<Run> {
    let inputs = json!({
        "alpha": alpha,
        "k": k,
        "m": m,
        "grid": grid.as_ref().map(|g| json!([g.start(), g.end()])),
    });
    if let Some(g) = grid {
        let rows = necessity_grid(alpha, k, g)?;
        let mut csv = String::from("m,n,d,ratio,ratio_relaxed,bound_ratio_n,bound_exp_upper\n");
        for r in &rows {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.m, r.n, r.d, r.ratio, r.ratio_relaxed, r.bound_ratio_n, r.bound_exp_upper
            ));
        }
        return Ok(Run { report: report("necessity", inputs, None, to_value(&rows)?), csv: Some(csv), failure: None });
    }
    let m = m.ok_or_else(|| Error::InvalidInput("necessity needs --m or --grid".into()))?;
    let rep = necessity_report(alpha, k, m)?;
    Ok(Run { report: report("necessity", inputs, None, to_value(&rep)?), csv: None, failure: None })
}

pub fn cmd_verify(suite: &str, trials: usize, seed: u64) -> Result<Run> {
    let results = run_suite(suite, trials, seed)?;
    let failures: usize = results.iter().map(|r| r.failures).sum();
    let failure = (failures > 0).then(|| {
        let names: Vec<&str> = results.iter().filter(|r| !r.passed()).map(|r| r.name.as_str()).collect();
        format!("{failures} failures in {}", names.join(", "))
    });
    let result = json!({ "failures": failures, "suites": to_value(&results)? });
    let inputs = json!({ "suite": suite, "trials": trials });
    Ok(Run { report: report("verify", inputs, Some(seed), result), csv: None, failure })
}

/// 2 for bad input or parameters, 3 for a point outside `S`, 4 when an
/// internal verification fails.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::PointNotInS(_) => 3,
        Error::VerificationFailed(_)
        | Error::RoundingOutOfRange(_)
        | Error::LiftInfeasible(_)
        | Error::SingularMatrix
        | Error::Lp(_) => 4,
        Error::Unbounded(_)
        | Error::DegenerateDimension
        | Error::TooLarge { .. }
        | Error::ParameterDomain(_)
        | Error::InvalidInput(_)
        | Error::NotUnimodular(_) => 2,
    }
}
