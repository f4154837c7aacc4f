//! The `s2c` command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 translation or validation
//! failure, 3 verification mismatch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::catalog::{derive_catalog_with, load_catalog, MixedPolicy, SchemaCatalog};
use crate::cypher::{render_with, Clause, RenderStyle};
use crate::error::{Error, Result};
use crate::oracle::{check_translation, EquivalenceReport, ExecOptions};
use crate::rdf::{parse_ntriples_with, PrefixMap, RdfGraph};
use crate::sparql::{parse_sparql_with, SparqlQuery};
use crate::translate::{translate_with, TranslateOptions, Translation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_TRANSLATION: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "s2c",
    version,
    about = "Translate SPARQL SELECT queries to Cypher"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Translate queries to Cypher.
    Translate(TranslateArgs),
    /// Derive a schema catalog from an N-Triples dataset.
    Catalog(CatalogArgs),
    /// Check that translations return the same answers as the originals.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum MixedArg {
    #[default]
    Error,
    Edge,
    Property,
}

impl From<MixedArg> for MixedPolicy {
    fn from(m: MixedArg) -> Self {
        match m {
            MixedArg::Error => MixedPolicy::Error,
            MixedArg::Edge => MixedPolicy::Edge,
            MixedArg::Property => MixedPolicy::Property,
        }
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// Prefix file: one `prefix namespace` pair per line.
    #[arg(long)]
    pub prefixes: Option<PathBuf>,
    /// How to classify predicates seen with both literal and resource objects.
    /// With `edge`, converting the dataset still fails on the literal triples.
    #[arg(long, value_enum, default_value_t)]
    pub mixed_predicate: MixedArg,
    /// Require properties bound in the required part to be present.
    #[arg(long)]
    pub guard_properties: bool,
}

#[derive(Debug, Args)]
pub struct TranslateArgs {
    /// `.rq` files, or directories of them.
    #[arg(required = true)]
    pub queries: Vec<PathBuf>,
    /// Schema catalog (JSON).
    #[arg(long, conflicts_with = "dataset", required_unless_present = "dataset")]
    pub catalog: Option<PathBuf>,
    /// Derive the catalog from this N-Triples dataset.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
    /// One clause per line.
    #[arg(long)]
    pub pretty: bool,
    /// Print per-query translation time to stderr.
    #[arg(long)]
    pub timing: bool,
    /// Compare against `<stem>.cypher` files in this directory.
    #[arg(long)]
    pub golden: Option<PathBuf>,
    /// Write `<stem>.cypher` files here instead of printing.
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    /// N-Triples dataset.
    pub dataset: PathBuf,
    #[command(flatten)]
    pub common: Common,
    /// Output file; stdout when absent.
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// `.rq` files, or directories of them.
    #[arg(required = true)]
    pub queries: Vec<PathBuf>,
    /// N-Triples dataset to evaluate on.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Schema catalog; derived from the dataset when absent.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
    /// Bound for unbounded variable-length relationships.
    #[arg(long, default_value_t = crate::oracle::exec::DEFAULT_MAX_DEPTH)]
    pub max_depth: u32,
    /// Refuse datasets with more nodes than this.
    #[arg(long, default_value_t = 10_000)]
    pub max_nodes: usize,
    /// Write a JSON summary here.
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
    /// Damage each translation before checking it.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        _ => EXIT_TRANSLATION,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_prefixes(path: Option<&Path>) -> Result<PrefixMap> {
    let mut p = PrefixMap::with_defaults();
    if let Some(path) = path {
        p.extend(&PrefixMap::parse(&read(path)?)?);
    }
    Ok(p)
}

fn load_dataset(path: &Path, prefixes: &PrefixMap) -> Result<RdfGraph> {
    parse_ntriples_with(&read(path)?, prefixes).map_err(|e| prefixed(path, e))
}

/// Add the file name to an error message, keeping its kind.
fn prefixed(path: &Path, e: Error) -> Error {
    let name = path.display();
    match e {
        Error::Io(m) if m.starts_with(&name.to_string()) => Error::Io(m),
        Error::Io(m) => Error::Io(format!("{name}: {m}")),
        Error::Unsupported(m) => Error::Unsupported(format!("{name}: {m}")),
        other => Error::InvalidQuery(format!("{name}: {other}")),
    }
}

/// Expand directories to their `.rq` files (sorted); keep files as given.
fn query_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let entries =
                fs::read_dir(input).map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
            let mut files: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "rq"))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(input.clone());
        }
    }
    Ok(out)
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(
        || path.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn parse_query(path: &Path, prefixes: &PrefixMap) -> Result<SparqlQuery> {
    parse_sparql_with(&read(path)?, prefixes).map_err(|e| prefixed(path, e))
}

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Translate(a) => cmd_translate(&a),
        Command::Catalog(a) => cmd_catalog(&a),
        Command::Verify(a) => cmd_verify(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn catalog_for(
    catalog: Option<&Path>,
    dataset: Option<&RdfGraph>,
    common: &Common,
) -> Result<SchemaCatalog> {
    match (catalog, dataset) {
        (Some(path), _) => load_catalog(path),
        (None, Some(g)) => derive_catalog_with(g, common.mixed_predicate.into()),
        (None, None) => Err(Error::InvalidCatalog(
            "give either --catalog or --dataset".to_string(),
        )),
    }
}

struct Translated {
    path: PathBuf,
    result: Result<(String, f64)>,
}

fn cmd_translate(a: &TranslateArgs) -> Result<i32> {
    let prefixes = load_prefixes(a.common.prefixes.as_deref())?;
    let dataset = match &a.dataset {
        Some(p) => Some(load_dataset(p, &prefixes)?),
        None => None,
    };
    let cat = catalog_for(a.catalog.as_deref(), dataset.as_ref(), &a.common)?;
    let files = query_files(&a.queries)?;
    if files.is_empty() {
        return Err(Error::Io("no query files given".to_string()));
    }
    let style = if a.pretty {
        RenderStyle::Pretty
    } else {
        RenderStyle::SingleLine
    };
    let options = TranslateOptions {
        guard_properties: a.common.guard_properties,
    };
    let results: Vec<Translated> = files
        .par_iter()
        .map(|path| {
            let result = parse_query(path, &prefixes).and_then(|q| {
                let start = Instant::now();
                let t = translate_with(&q, &cat, options).map_err(|e| prefixed(path, e))?;
                let ms = start.elapsed().as_secs_f64() * 1e3;
                let text =
                    render_with(&t.query, &prefixes, style).map_err(|e| prefixed(path, e))?;
                Ok((text, ms))
            });
            Translated {
                path: path.clone(),
                result,
            }
        })
        .collect();

    if let Some(dir) = &a.output {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    let mut code = EXIT_OK;
    let mut stdout = std::io::stdout().lock();
    let many = results.len() > 1;
    for t in &results {
        match &t.result {
            Err(e) => {
                eprintln!("error: {e}");
                code = worse(code, exit_code(e));
            }
            Ok((text, ms)) => {
                if a.timing {
                    eprintln!("{}: {ms:.3} ms", t.path.display());
                }
                match &a.output {
                    Some(dir) => {
                        let out = dir.join(format!("{}.cypher", stem(&t.path)));
                        if let Err(e) = write(&out, &format!("{text}\n")) {
                            eprintln!("error: {e}");
                            code = worse(code, EXIT_IO);
                        }
                    }
                    None => {
                        let r = if many {
                            writeln!(stdout, "// {}\n{text}", t.path.display())
                        } else {
                            writeln!(stdout, "{text}")
                        };
                        r.map_err(Error::from)?;
                    }
                }
                if let Some(dir) = &a.golden {
                    let expected_path = dir.join(format!("{}.cypher", stem(&t.path)));
                    match read(&expected_path) {
                        Ok(expected) if normalize(&expected) == normalize(text) => {}
                        Ok(expected) => {
                            eprintln!(
                                "golden mismatch for {}:\n  expected: {}\n  actual:   {}",
                                t.path.display(),
                                normalize(&expected),
                                normalize(text)
                            );
                            code = worse(code, EXIT_MISMATCH);
                        }
                        Err(e) => {
                            eprintln!("error: {e}");
                            code = worse(code, EXIT_IO);
                        }
                    }
                }
            }
        }
    }
    Ok(code)
}

/// Keep the more severe exit code: I/O, then translation, then mismatch.
fn worse(current: i32, new: i32) -> i32 {
    let rank = |c: i32| match c {
        EXIT_IO => 3,
        EXIT_TRANSLATION => 2,
        EXIT_MISMATCH => 1,
        _ => 0,
    };
    if rank(new) > rank(current) {
        new
    } else {
        current
    }
}

fn cmd_catalog(a: &CatalogArgs) -> Result<i32> {
    let prefixes = load_prefixes(a.common.prefixes.as_deref())?;
    let g = load_dataset(&a.dataset, &prefixes)?;
    let cat = derive_catalog_with(&g, a.common.mixed_predicate.into())?;
    let json = cat.to_json();
    match &a.output {
        Some(path) => write(path, &format!("{json}\n"))?,
        None => println!("{json}"),
    }
    eprintln!(
        "|T| = {}, |P| = {}",
        cat.relationship_types().count(),
        cat.property_keys().count()
    );
    Ok(EXIT_OK)
}

/// Deliberately wrong variant of a translation, for checking that the
/// verifier notices: drops every WHERE condition and node label.
fn corrupt(t: &mut Translation) {
    fn strip(q: &mut crate::cypher::CypherQuery) {
        if let Some(inner) = q.call.as_deref_mut() {
            strip(inner);
        }
        q.clauses.retain(|c| !matches!(c, Clause::With { .. }));
        for c in &mut q.clauses {
            if let Clause::Match(m) = c {
                m.where_ = None;
                for p in &mut m.patterns {
                    for n in p.nodes_mut() {
                        n.labels.clear();
                    }
                }
            }
        }
        if let Some(u) = q.union.as_deref_mut() {
            strip(&mut u.query);
        }
    }
    strip(&mut t.query);
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    let prefixes = load_prefixes(a.common.prefixes.as_deref())?;
    let g = load_dataset(&a.dataset, &prefixes)?;
    let nodes = g.nodes().len();
    if nodes > a.max_nodes {
        return Err(Error::InvalidQuery(format!(
            "dataset has {nodes} distinct terms, more than --max-nodes {}; \
             verify on a smaller sample or raise the bound",
            a.max_nodes
        )));
    }
    let cat = catalog_for(a.catalog.as_deref(), Some(&g), &a.common)?;
    let files = query_files(&a.queries)?;
    if files.is_empty() {
        return Err(Error::Io("no query files given".to_string()));
    }
    let options = TranslateOptions {
        guard_properties: a.common.guard_properties,
    };
    let exec = ExecOptions {
        max_depth: a.max_depth,
    };
    let outcomes: Vec<(PathBuf, Result<EquivalenceReport>)> = files
        .par_iter()
        .map(|path| {
            let outcome = parse_query(path, &prefixes).and_then(|q| {
                let start = Instant::now();
                let mut t = translate_with(&q, &cat, options).map_err(|e| prefixed(path, e))?;
                let elapsed = start.elapsed();
                if a.inject_fault {
                    corrupt(&mut t);
                }
                let mut report = check_translation(&q, &t, &g, &cat, exec)?;
                report.translate_time = elapsed;
                Ok(report)
            });
            (path.clone(), outcome)
        })
        .collect();

    let mut passed = 0;
    let mut summary = Vec::new();
    for (path, outcome) in &outcomes {
        let name = path.display();
        match outcome {
            Ok(report) if report.is_equivalent() => {
                passed += 1;
                print!("PASS {name}: {report}");
            }
            Ok(report) => print!("FAIL {name}: {report}"),
            Err(e) => println!("FAIL {name}: {e}"),
        }
        let mut entry = match outcome {
            Ok(report) => report.summary_json(),
            Err(e) => serde_json::json!({ "equivalent": false, "error": e.to_string() }),
        };
        entry["query"] = serde_json::Value::String(path.display().to_string());
        summary.push(entry);
    }
    println!("{passed}/{} queries equivalent", outcomes.len());
    if let Some(out) = &a.output {
        let doc = serde_json::json!({
            "passed": passed,
            "total": outcomes.len(),
            "queries": summary,
        });
        let text = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
        write(out, &format!("{text}\n"))?;
    }
    Ok(if passed == outcomes.len() {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    })
}
