//! Batch command surface. Every command produces a list of rows; the rows are emitted
//! as one JSON document, CSV with a header row, or aligned `key=value` text.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::complexes::{bar_complex, ce_complex, homology_ranks};
use crate::dk::{dk_basis, DkElement};
use crate::freelie::{lyndon_basis, witt_dimension};
use crate::grt::{cohomology_class_test, deformation_space, grt_basis, grt_report, invariant_dim_by_averaging};

pub const CACHE_ENV: &str = "GRTKIT_CACHE_DIR";

#[derive(Parser, Debug, Clone)]
#[command(name = "grtkit", version, about = "Exact computations for Drinfeld-Kohno algebras, operads and grt")]
pub struct JobConfig {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Worker threads for independent cells.
    #[arg(long, default_value_t = 1, value_parser = positive, global = true)]
    pub parallelism: usize,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Dimensions and bases of the solution spaces of the grt equations.
    GrtDims {
        #[arg(long, default_value_t = 4, value_parser = positive)]
        max_weight: usize,
    },
    /// Cocycle and coboundary test for the first grt generator of a weight.
    GrtClassTest {
        #[arg(long, value_parser = positive, required_unless_present = "control")]
        weight: Option<usize>,
        /// Arity window for the cocycle condition.
        #[arg(long, default_value_t = 6, value_parser = positive)]
        arity_cap: usize,
        /// Test t12 - t23 instead, which solves the shuffle equations only.
        #[arg(long)]
        control: bool,
    },
    /// Quotient basis of g(n) in one weight.
    DkBasis {
        #[arg(long, value_parser = positive)]
        points: usize,
        #[arg(long, value_parser = positive)]
        weight: usize,
    },
    /// Lyndon counts against the Witt formula.
    FreelieDims {
        /// Alphabet size.
        #[arg(long, default_value_t = 3, value_parser = positive)]
        points: usize,
        #[arg(long, default_value_t = 6, value_parser = positive)]
        max_weight: usize,
    },
    /// Homology ranks of the Chevalley-Eilenberg or bar complex of g(n).
    Homology {
        #[arg(long, value_enum)]
        complex: ComplexKind,
        #[arg(long, value_parser = positive)]
        points: usize,
        #[arg(long, default_value_t = 3, value_parser = positive)]
        max_weight: usize,
        /// Lowest bar degree kept (bar complex only).
        #[arg(long, allow_negative_numbers = true)]
        min_degree: Option<i32>,
    },
    /// Dimensions of the deformation complex cells, with the averaging cross-check.
    Defcomplex {
        #[arg(long, default_value_t = 4, value_parser = positive)]
        arity_cap: usize,
        #[arg(long, default_value_t = 2, value_parser = positive)]
        max_weight: usize,
    },
    /// Run a property suite.
    Check {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 4, value_parser = positive)]
        arity_cap: usize,
        #[arg(long, default_value_t = 2, value_parser = positive)]
        max_weight: usize,
        #[arg(long, default_value_t = 3, value_parser = positive)]
        points: usize,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComplexKind {
    Ce,
    Bar,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Relations,
    Operad,
    Jacobi,
    Dsquared,
    Commutation,
    Shuffles,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

/// Rows plus a success flag; `ok == false` maps to exit code 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub rows: Vec<Value>,
    pub ok: bool,
}

impl Report {
    pub fn to_json(&self) -> Value {
        json!({"command": self.command, "status": if self.ok { "ok" } else { "failed" }, "rows": self.rows})
    }
}

/// Parses `argv` (program name first), runs the job and writes the report.
/// Returns the process exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cfg = match JobConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let mut text = e.render().to_string();
            if e.exit_code() == 0 {
                let _ = write!(out, "{text}");
                return 0;
            }
            if !text.contains("Usage:") {
                text.push_str(&format!("\n{}\n", JobConfig::command().render_usage()));
            }
            let _ = write!(err, "{text}");
            return 2;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.parallelism).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    };
    match pool.install(|| execute(&cfg)) {
        Ok(report) => {
            let text = render(&report, cfg.format);
            if out.write_all(text.as_bytes()).is_err() {
                return 1;
            }
            if report.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&report.to_json()).unwrap() + "\n",
        Format::Csv => render_csv(&report.rows),
        Format::Text => {
            let mut s = format!("# {} ({})\n", report.command, if report.ok { "ok" } else { "failed" });
            for row in &report.rows {
                let cells: Vec<String> = row.as_object().unwrap().iter().map(|(k, v)| format!("{k}={}", cell(v))).collect();
                s.push_str(&cells.join(" "));
                s.push('\n');
            }
            s
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(cell).collect::<Vec<_>>().join(";"),
        Value::Object(_) => v.to_string(),
        Value::Null => String::new(),
        _ => v.to_string(),
    }
}

fn render_csv(rows: &[Value]) -> String {
    let mut header: Vec<String> = Vec::new();
    let mut seen = BTreeSet::new();
    for row in rows {
        for k in row.as_object().unwrap().keys() {
            if seen.insert(k.clone()) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).unwrap();
    for row in rows {
        let obj = row.as_object().unwrap();
        w.write_record(header.iter().map(|k| obj.get(k).map_or(String::new(), cell))).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

pub fn execute(cfg: &JobConfig) -> Result<Report, String> {
    match &cfg.command {
        Command::GrtDims { max_weight } => grt_dims(*max_weight),
        Command::GrtClassTest { weight, arity_cap, control } => class_test(*weight, *arity_cap, *control),
        Command::DkBasis { points, weight } => dk_basis_cached(*points, *weight),
        Command::FreelieDims { points, max_weight } => Ok(freelie_dims(*points, *max_weight)),
        Command::Homology { complex, points, max_weight, min_degree } => homology(*complex, *points, *max_weight, *min_degree),
        Command::Defcomplex { arity_cap, max_weight } => Ok(defcomplex(*arity_cap, *max_weight)),
        Command::Check { suite, arity_cap, max_weight, points } => Ok(crate::suites::run_suite(*suite, *arity_cap, *max_weight, *points)),
    }
}

fn grt_dims(max_weight: usize) -> Result<Report, String> {
    let rows: Result<Vec<Value>, _> = (1..=max_weight).into_par_iter().map(|w| grt_report(w, None)).collect();
    Ok(Report { command: "grt-dims", rows: rows.map_err(|e| e.to_string())?, ok: true })
}

fn class_test(weight: Option<usize>, arity_cap: usize, control: bool) -> Result<Report, String> {
    let phi = if control {
        DkElement::t(3, 1, 2).sub(&DkElement::t(3, 2, 3))
    } else {
        let w = weight.ok_or("missing --weight")?;
        grt_basis(w).into_iter().next().ok_or_else(|| format!("no grt element in weight {w}"))?
    };
    let r = cohomology_class_test(&phi, arity_cap).map_err(|e| e.to_string())?;
    let mut row = json!({"weight": phi.weight, "element": phi.to_string(), "arity_cap": arity_cap, "nonzero_class": r.nonzero_class()});
    for (k, v) in r.to_json().as_object().unwrap() {
        row[k] = v.clone();
    }
    Ok(Report { command: "grt-class-test", rows: vec![row], ok: true })
}

fn cache_path(points: usize, weight: usize) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_ENV)?;
    Some(PathBuf::from(dir).join(format!("dk_basis_{points}_{weight}.json")))
}

/// Reads the dump from the cache directory when present, otherwise computes it and writes it there.
fn dk_basis_cached(points: usize, weight: usize) -> Result<Report, String> {
    let path = cache_path(points, weight);
    if let Some(p) = &path {
        if let Ok(text) = std::fs::read_to_string(p) {
            if let Ok(v) = serde_json::from_str::<Value>(&text) {
                return Ok(Report { command: "dk-basis", rows: vec![v], ok: true });
            }
        }
    }
    let v = dk_basis(points, weight).to_json();
    if let Some(p) = &path {
        if let Some(dir) = p.parent() {
            std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
        }
        std::fs::write(p, serde_json::to_string_pretty(&v).unwrap()).map_err(|e| e.to_string())?;
    }
    Ok(Report { command: "dk-basis", rows: vec![v], ok: true })
}

fn freelie_dims(points: usize, max_weight: usize) -> Report {
    let rows: Vec<Value> = (1..=max_weight)
        .into_par_iter()
        .map(|d| {
            let count = lyndon_basis(points, d).len();
            let witt = witt_dimension(points, d);
            json!({"alphabet": points, "weight": d, "lyndon_count": count, "witt_dimension": witt, "agree": count == witt})
        })
        .collect();
    let ok = rows.iter().all(|r| r["agree"] == true);
    Report { command: "freelie-dims", rows, ok }
}

fn homology(kind: ComplexKind, points: usize, max_weight: usize, min_degree: Option<i32>) -> Result<Report, String> {
    let cells: Result<Vec<Vec<Value>>, String> = (0..=max_weight)
        .into_par_iter()
        .map(|w| {
            let c = match kind {
                ComplexKind::Ce => ce_complex(points, w),
                ComplexKind::Bar => bar_complex(points, w, min_degree.unwrap_or(i32::MIN)),
            };
            let ranks = homology_ranks(&c).map_err(|e| e.to_string())?;
            Ok(ranks
                .iter()
                .map(|(&(deg, wt), &r)| json!({"degree": deg, "weight": wt, "dimension": c.dim(deg, wt), "rank": r}))
                .collect())
        })
        .collect();
    let mut rows: Vec<Value> = cells?.into_iter().flatten().collect();
    rows.sort_by_key(|r| (r["weight"].as_i64(), r["degree"].as_i64()));
    Ok(Report { command: "homology", rows, ok: true })
}

fn defcomplex(arity_cap: usize, max_weight: usize) -> Report {
    let keys: Vec<(usize, usize, usize)> = (2..=arity_cap.max(2))
        .flat_map(|n| (1..=max_weight).flat_map(move |w| (0..=w.min(n)).map(move |j| (n, w, j))))
        .collect();
    let rows: Vec<Value> = keys
        .par_iter()
        .map(|&(n, w, j)| {
            let ce = -(j as i64);
            let dim = deformation_space(n, w, ce).len();
            let avg = invariant_dim_by_averaging(n, w, ce);
            json!({"arity": n, "weight": w, "ce_degree": ce, "degree": n as i64 - 2 - j as i64,
                   "dim": dim, "dim_by_averaging": avg, "agree": dim == avg})
        })
        .collect();
    let ok = rows.iter().all(|r| r["agree"] == true);
    Report { command: "defcomplex", rows, ok }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_and_fills_missing_cells() {
        let rows = vec![json!({"a": 1, "b": "x,y"}), json!({"a": 2, "c": ["p", "q"]})];
        assert_eq!(render_csv(&rows), "a,b,c\n1,\"x,y\",\n2,,p;q\n");
    }

    #[test]
    fn positive_caps() {
        assert!(positive("0").is_err());
        assert!(positive("-1").is_err());
        assert_eq!(positive("7"), Ok(7));
    }
}
