//! `kdiam`: diameters, criteria, memberships and theorem campaigns from the
//! command line.
//!
//! Exit codes: 0 success, 1 violated campaign rows, 2 parse or usage
//! errors, 3 mathematical errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kdiam_core::criteria::{evaluate, CriterionId, REPORT_SCHEMA_VERSION};
use kdiam_core::diameters::diameters_between_grades;
use kdiam_core::invariants::{membership, InvariantSet};
use kdiam_core::real::parse_rational;
use kdiam_core::seq::parse;
use kdiam_core::space::{parse_space_file, space_to_toml, SpaceFile};
use kdiam_core::verify::{catalog_from_dir, default_catalog, run_campaign, Campaign, TheoremId};
use kdiam_core::{Config, KdiamError, Resolution};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "kdiam",
    version,
    about = "Kolmogorov diameters and diametral dimensions of Köthe spaces"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Resolution N (number of rows for `diam`).
    #[arg(long, global = true)]
    n: Option<u64>,
    /// Largest grade probed by universal quantifiers.
    #[arg(long, global = true)]
    kmax: Option<u32>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// JSON instead of CSV for `diam`; other reports are always JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// CSV of d_n(U_q, U_p) and eps_n(p, q).
    Diam {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u32,
    },
    /// Coincidence criteria and structural conditions.
    Criteria {
        #[arg(long)]
        space: PathBuf,
        /// Criterion id, comma separated ids, or `all`.
        #[arg(long, default_value = "all")]
        criterion: String,
        /// Multiplier applied to eps(1, 2).
        #[arg(long)]
        eps_scale: Option<String>,
    },
    /// Membership of a sequence in Delta, delta or Tdot.
    Member {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        set: String,
        #[arg(long)]
        t: String,
    },
    /// Theorem campaigns over a catalog.
    Verify {
        /// Theorem id, comma separated ids, or `all`.
        #[arg(long, default_value = "all")]
        theorem: String,
        /// `default` or a directory of space files.
        #[arg(long, default_value = "default")]
        catalog: String,
    },
    /// Canonical space files, for one space or the default catalog.
    Export {
        #[arg(long, conflicts_with = "catalog")]
        space: Option<PathBuf>,
        /// Only `default` is known.
        #[arg(long)]
        catalog: Option<String>,
        /// Target directory for catalog export.
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Math(String),
}

impl From<KdiamError> for Failure {
    fn from(e: KdiamError) -> Failure {
        match e {
            KdiamError::Parse { .. }
            | KdiamError::Argument(_)
            | KdiamError::Config(_)
            | KdiamError::Io(_) => Failure::Usage(e.to_string()),
            _ => Failure::Math(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Usage(e.to_string())
    }
}

fn config(g: &Global) -> Config {
    let mut cfg = Config::default();
    let n = g.n.unwrap_or(cfg.resolution.n);
    let kmax = g.kmax.unwrap_or(cfg.resolution.kmax);
    cfg.resolution = Resolution::new(n, kmax);
    cfg.seed = g.seed;
    cfg
}

fn load_space(path: &Path, cfg: &Config) -> Result<SpaceFile, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let check_to = 2 * (cfg.resolution.n + 1);
    let file = parse_space_file(&text, check_to).map_err(|e| match e {
        KdiamError::Parse { location, message } => Failure::Usage(format!(
            "{}: parse error at offset {location}: {message}",
            path.display()
        )),
        e => Failure::from(e),
    })?;
    file.matrix.validate(cfg.resolution.n)?;
    Ok(file)
}

fn emit(g: &Global, text: &str) -> Result<(), Failure> {
    match &g.out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json(g: &Global, v: &Value) -> Result<(), Failure> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    emit(g, &s)
}

fn cmd_diam(g: &Global, space: &Path, p: u32, q: u32) -> Result<ExitCode, Failure> {
    if p >= q {
        return Err(Failure::Usage(format!("need p < q, got p = {p}, q = {q}")));
    }
    if p == 0 {
        return Err(Failure::Usage("grades start at 1".into()));
    }
    let rows = g.n.unwrap_or(16);
    if rows == 0 {
        return Err(Failure::Usage("--n must be positive".into()));
    }
    let cfg = config(g);
    let file = load_space(space, &cfg)?;
    let d = diameters_between_grades(&file.matrix, p, q, rows - 1)?;
    if g.json {
        let values = (0..d.len())
            .map(|n| {
                Ok(json!({
                    "n": n,
                    "d_n": d.value(n)?.to_string(),
                    "eps_n": d.epsilon(n).to_string(),
                }))
            })
            .collect::<Result<Vec<_>, KdiamError>>()?;
        emit_json(
            g,
            &json!({
                "schema_version": REPORT_SCHEMA_VERSION,
                "kind": "diameters",
                "space": file.label,
                "p": p,
                "q": q,
                "provenance": d.provenance.as_str(),
                "rows": values,
            }),
        )?;
    } else {
        emit(g, &d.to_csv()?)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_criteria(
    g: &Global,
    space: &Path,
    which: &str,
    eps_scale: Option<&str>,
) -> Result<ExitCode, Failure> {
    let ids = if which == "all" {
        CriterionId::ALL.to_vec()
    } else {
        which
            .split(',')
            .map(|s| {
                CriterionId::parse(s.trim())
                    .ok_or_else(|| Failure::Usage(format!("unknown criterion id '{s}'")))
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    let mut cfg = config(g);
    if let Some(s) = eps_scale {
        cfg.eps_scale = parse_rational(s)?;
    }
    cfg.validate()?;
    let file = load_space(space, &cfg)?;
    let reports = ids
        .iter()
        .map(|id| Ok(evaluate(*id, &file.matrix, &file.label, &cfg)?.to_json()))
        .collect::<Result<Vec<_>, KdiamError>>()?;
    emit_json(
        g,
        &json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "kind": "criteria",
            "space": file.label,
            "matrix": file.matrix.describe(),
            "config": cfg.to_json(),
            "reports": reports,
        }),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_member(g: &Global, space: &Path, set: &str, t: &str) -> Result<ExitCode, Failure> {
    let set = InvariantSet::parse(set)
        .ok_or_else(|| Failure::Usage(format!("unknown set '{set}' (Delta, delta, Tdot)")))?;
    let cfg = config(g);
    cfg.validate()?;
    let seq = parse(t)?;
    let file = load_space(space, &cfg)?;
    let v = membership(set, &file.matrix, &seq, cfg.resolution, &cfg.eps_grid)?;
    emit_json(
        g,
        &json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "kind": "member",
            "space": file.label,
            "set": set.as_str(),
            "t": seq.to_string(),
            "verdict": v.to_json(),
            "config": cfg.to_json(),
        }),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(g: &Global, theorem: &str, catalog: &str) -> Result<ExitCode, Failure> {
    let theorems = TheoremId::parse_list(theorem)?;
    let cfg = config(g);
    cfg.validate()?;
    let (entries, excluded) = if catalog == "default" {
        default_catalog(&cfg)?
    } else {
        let dir = Path::new(catalog);
        if !dir.is_dir() {
            return Err(Failure::Usage(format!(
                "catalog '{catalog}' is not a directory"
            )));
        }
        (catalog_from_dir(dir, &cfg)?, Vec::new())
    };
    let mut report = run_campaign(&Campaign::new(theorems, entries, cfg))?;
    report.excluded = excluded;
    emit_json(g, &report.to_json())?;
    let s = report.summary();
    eprintln!(
        "agree {} vacuous {} undecided {} violated {} (observations {})",
        s.agree, s.vacuous, s.undecided, s.violated, s.observations
    );
    Ok(if report.violations() == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn slug(label: &str) -> String {
    let s: String = label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '_'
            }
        })
        .collect();
    s.split('_')
        .filter(|p| !p.is_empty())
        .collect::<Vec<_>>()
        .join("_")
}

fn cmd_export(
    g: &Global,
    space: Option<&Path>,
    catalog: Option<&str>,
    dir: Option<&Path>,
) -> Result<ExitCode, Failure> {
    let cfg = config(g);
    match (space, catalog) {
        (Some(path), None) => {
            let file = load_space(path, &cfg)?;
            emit(g, &space_to_toml(&file.label, &file.matrix)?)?;
        }
        (None, Some("default")) => {
            let dir = dir.ok_or_else(|| Failure::Usage("catalog export needs --dir".into()))?;
            fs::create_dir_all(dir)?;
            let (entries, _) = default_catalog(&cfg)?;
            for (i, d) in entries.iter().enumerate() {
                let path = dir.join(format!("{:02}_{}.toml", i, slug(&d.label)));
                fs::write(&path, space_to_toml(&d.label, &d.matrix)?)?;
                eprintln!("{}", path.display());
            }
        }
        (None, Some(other)) => return Err(Failure::Usage(format!("unknown catalog '{other}'"))),
        _ => return Err(Failure::Usage("export needs --space or --catalog".into())),
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Diam { space, p, q } => cmd_diam(g, space, *p, *q),
        Command::Criteria {
            space,
            criterion,
            eps_scale,
        } => cmd_criteria(g, space, criterion, eps_scale.as_deref()),
        Command::Member { space, set, t } => cmd_member(g, space, set, t),
        Command::Verify { theorem, catalog } => cmd_verify(g, theorem, catalog),
        Command::Export {
            space,
            catalog,
            dir,
        } => cmd_export(g, space.as_deref(), catalog.as_deref(), dir.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Math(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
