use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use compose_core::apsp::floyd_warshall;
use compose_core::bench::{run_bench, BenchOptions};
use compose_core::config::RunConfig;
use compose_core::matrix::DistMatrix;
use compose_core::model_file;
use compose_core::ontology::ConceptHierarchy;
use compose_core::planner::{CompositionQuery, EntryMode, PathSelection, PlannerModel, ResolveOptions};
use compose_core::registry::{self, Registry};
use compose_core::scg::build_scg_with_overrides;

use crate::error::CliError;
use crate::{Format, GraphFormat};

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_hierarchy(path: &Path) -> Result<ConceptHierarchy, CliError> {
    ConceptHierarchy::from_json(&read(path)?).map_err(|e| CliError::invalid(path, e))
}

fn load_registry(path: &Path, hierarchy: &ConceptHierarchy) -> Result<Registry, CliError> {
    Registry::from_json(&read(path)?, hierarchy).map_err(|e| CliError::invalid(path, e))
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        Some(p) => RunConfig::from_json(&read(p)?).map_err(|e| CliError::invalid(p, e)),
        None => Ok(RunConfig::default()),
    }
}

fn load_model(path: &Path, verify: bool) -> Result<PlannerModel, CliError> {
    model_file::from_json(&read(path)?, verify).map_err(|e| match e {
        model_file::ModelFileError::Planner(p) => CliError::Planner(p),
        other => CliError::invalid(path, other),
    })
}

pub fn build(
    registry: &Path,
    hierarchy: &Path,
    config: Option<&Path>,
    output: &Path,
) -> Result<String, CliError> {
    let h = load_hierarchy(hierarchy)?;
    let r = load_registry(registry, &h)?;
    let cfg = load_config(config)?;
    let model = PlannerModel::build(r, h, cfg)?;
    fs::write(output, model_file::to_json(&model)).map_err(|source| CliError::Io {
        path: output.to_path_buf(),
        source,
    })?;
    Ok(format!(
        "wrote {}: revision {}, {} services, {} edges\n",
        output.display(),
        model.revision(),
        model.graph().len(),
        model.graph().edges().len()
    ))
}

pub struct QueryArgs<'a> {
    pub model: &'a Path,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub format: Format,
    pub selection: PathSelection,
    pub entry_mode: Option<EntryMode>,
    pub registry: Option<&'a Path>,
    pub verify: bool,
}

pub fn query(args: QueryArgs<'_>) -> Result<String, CliError> {
    let model = load_model(args.model, args.verify)?;
    if let Some(path) = args.registry {
        let current = load_registry(path, model.hierarchy())?;
        model_file::check_fresh(&model, &current)?;
    }
    let query = CompositionQuery::new(args.inputs, args.outputs);
    let options = ResolveOptions {
        entry_mode: args.entry_mode.unwrap_or(model.config().entry_mode),
        selection: args.selection,
    };
    let plan = model.resolve(&query, &options)?;
    Ok(match args.format {
        Format::Plain => plan.to_text(),
        Format::Json => plan.to_json() + "\n",
        Format::Dot => plan.to_dot(),
    })
}

pub fn apsp(matrix: &Path, format: Format) -> Result<String, CliError> {
    let adjacency = DistMatrix::parse(&read(matrix)?).map_err(|e| CliError::invalid(matrix, e))?;
    let tables = floyd_warshall(&adjacency)?;
    Ok(match format {
        Format::Plain | Format::Dot => {
            format!("# dist\n{}# pred\n{}", tables.dist().to_text(), tables.pred().to_text())
        }
        Format::Json => {
            let pred: Vec<&[Option<usize>]> = tables.pred().rows().collect();
            let doc = serde_json::json!({
                "n": tables.n(),
                "dist": tables.dist().to_json_rows(),
                "pred": pred,
            });
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
    })
}

pub fn validate(registry: &Path, hierarchy: &Path, config: Option<&Path>) -> Result<String, CliError> {
    let h = load_hierarchy(hierarchy)?;
    let mut report = format!("hierarchy {}: {} concepts\n", hierarchy.display(), h.len());
    let mut findings: Vec<String> = registry::diagnose_document(&read(registry)?, &h)
        .into_iter()
        .map(|e| format!("{}: {e}", registry.display()))
        .collect();

    let cfg = match config.map(|p| (p, load_config(Some(p)))) {
        Some((_, Ok(cfg))) => Some(cfg),
        Some((p, Err(e))) => {
            findings.push(format!("{}: {e}", p.display()));
            None
        }
        None => None,
    };
    if findings.is_empty() {
        let r = load_registry(registry, &h)?;
        writeln!(report, "registry {}: {} services, revision {}", registry.display(), r.len(), r.revision()).unwrap();
        let cfg = cfg.unwrap_or_default();
        match build_scg_with_overrides(&r, &h, &cfg.weights, &cfg.edge_weights) {
            Ok(g) => writeln!(report, "graph: {} vertices, {} edges", g.len(), g.edges().len()).unwrap(),
            Err(e) => findings.push(format!("graph: {e}")),
        }
    }
    for f in &findings {
        writeln!(report, "finding: {f}").unwrap();
    }
    writeln!(report, "{} finding(s)", findings.len()).unwrap();
    if findings.is_empty() {
        Ok(report)
    } else {
        print!("{report}");
        Err(CliError::Findings(findings.len()))
    }
}

pub fn bench(sizes: &[usize], seed: u64, density: f64, repeats: usize, format: Format) -> Result<String, CliError> {
    if repeats == 0 {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    let rows = run_bench(
        sizes,
        BenchOptions {
            seed,
            density,
            max_weight: 10,
            repeats,
        },
    )?;
    let ms = |d: std::time::Duration| d.as_secs_f64() * 1e3;
    Ok(match format {
        Format::Json => {
            let doc: Vec<_> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "n": r.n,
                        "edges": r.edges,
                        "floyd_ms": ms(r.floyd),
                        "dijkstra_ms": ms(r.dijkstra),
                        "floyd_growth": r.floyd_growth,
                        "agree": r.agree,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
        Format::Plain | Format::Dot => {
            let mut out = format!(
                "{:>6} {:>8} {:>12} {:>14} {:>8} {:>6}\n",
                "n", "edges", "floyd_ms", "dijkstra_ms", "growth", "agree"
            );
            for r in &rows {
                let growth = r.floyd_growth.map_or_else(|| "-".to_string(), |g| format!("{g:.2}"));
                writeln!(
                    out,
                    "{:>6} {:>8} {:>12.3} {:>14.3} {:>8} {:>6}",
                    r.n,
                    r.edges,
                    ms(r.floyd),
                    ms(r.dijkstra),
                    growth,
                    r.agree
                )
                .unwrap();
            }
            out
        }
    })
}

pub fn graph(model: &Path, format: GraphFormat) -> Result<String, CliError> {
    let model = load_model(model, false)?;
    let g = model.graph();
    Ok(match format {
        GraphFormat::Adjacency => {
            format!("# {}\n{}", g.vertices().join(" "), g.to_adjacency().to_text())
        }
        GraphFormat::Dot => g.export_dot(),
        GraphFormat::Json => serde_json::to_string_pretty(&serde_json::json!({
            "revision": g.built_from(),
            "vertices": g.vertices(),
            "edges": g.edges(),
        }))
        .expect("json")
            + "\n",
    })
}
