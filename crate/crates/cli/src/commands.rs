use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use fakb_core::dllite::{check_kb_consistency, parse_tbox, validate_fakb_tbox, KbReport, Tbox};
use fakb_core::extractor::{extract_source_fabox, ExtractError, MockBackend};
use fakb_core::fabox::io::{parse_any, write_json, write_text};
use fakb_core::fabox::{
    apply_strength_update, check_fabox_consistency, underlying_qbaf, with_argument_degrees, FABox, FaboxReport,
    UpdateError,
};
use fakb_core::format_degree;
use fakb_core::qbaf::{self, ArgumentId};
use fakb_core::query::{fcert, parse_query, perfect_ref, QueryError, ThresholdedQuery};
use serde_json::json;

use crate::config::{EngineConfig, Format};
use crate::graph;

pub const OK: u8 = 0;
pub const FAILED: u8 = 1;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_fabox(path: &Path) -> Result<FABox> {
    parse_any(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn load_tbox(path: &Path) -> Result<Tbox> {
    parse_tbox(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn load_query(text: &str) -> Result<ThresholdedQuery> {
    parse_query(text).context("query")
}

fn export_graph(cfg: &EngineConfig, fabox: &FABox, initial: &BTreeMap<ArgumentId, f64>) -> Result<()> {
    if let Some(path) = &cfg.export_graph {
        let mut s = serde_json::to_string_pretty(&graph::build(fabox, initial))?;
        s.push('\n');
        fs::write(path, s).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn fabox_lines(report: &FaboxReport) -> (Vec<String>, Vec<String>) {
    (
        report.violations.iter().map(ToString::to_string).collect(),
        report.warnings.iter().map(ToString::to_string).collect(),
    )
}

fn refuse(report: &FaboxReport) -> u8 {
    eprintln!("the FABox is inconsistent:");
    eprint!("{report}");
    FAILED
}

fn count(fabox: &FABox, predicate: &str) -> usize {
    fabox.iter().filter(|a| a.predicate() == predicate).count()
}

pub fn extract(cfg: &EngineConfig, out: &mut dyn Write, fixture: &Path, out_dir: &Path) -> Result<u8> {
    let backend = MockBackend::from_json(&read(fixture)?).with_context(|| format!("{}", fixture.display()))?;
    let source = match extract_source_fabox(&backend.raw_document(), &backend, cfg.theta) {
        Ok(f) => f,
        Err(e @ ExtractError::Assembly(_)) => {
            eprintln!("{e}");
            return Ok(FAILED);
        }
        Err(e) => return Err(e.into()),
    };
    let update = apply_strength_update(&source, cfg.semantics().as_ref(), cfg.iteration());

    fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    let (ext, render): (&str, fn(&FABox) -> String) = match cfg.format {
        Format::Json => ("json", write_json),
        _ => ("fabox", write_text),
    };
    let write = |name: &str, fabox: &FABox| -> Result<PathBuf> {
        let path = out_dir.join(format!("{name}.{ext}"));
        fs::write(&path, render(fabox)).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    };
    let source_path = write("source", &source)?;
    let (updated_path, code) = match &update {
        Ok(updated) => (Some(write("updated", updated)?), OK),
        Err(UpdateError::NotConverged { partial }) => {
            eprintln!("strengths did not converge after {} iterations", partial.iterations);
            (None, FAILED)
        }
        Err(UpdateError::Inconsistent(report)) => return Ok(refuse(report)),
    };
    if let Ok(updated) = &update {
        let initial = underlying_qbaf(&source)?.arguments().clone();
        export_graph(cfg, updated, &initial)?;
    }

    let arguments = count(&source, "Arg");
    let (attacks, supports) = (count(&source, "att"), count(&source, "sup"));
    let updated_display = updated_path.as_ref().map(|p| p.display().to_string());
    match cfg.format {
        Format::Json => {
            let summary = json!({
                "arguments": arguments,
                "attacks": attacks,
                "supports": supports,
                "source": source_path.display().to_string(),
                "updated": updated_display,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&summary)?)?;
        }
        Format::Text | Format::Tsv => {
            let sep = if cfg.format == Format::Tsv { "\t" } else { ": " };
            writeln!(out, "arguments{sep}{arguments}")?;
            writeln!(out, "attacks{sep}{attacks}")?;
            writeln!(out, "supports{sep}{supports}")?;
            writeln!(out, "source{sep}{}", source_path.display())?;
            writeln!(out, "updated{sep}{}", updated_display.as_deref().unwrap_or("-"))?;
        }
    }
    Ok(code)
}

fn kb_json(report: &KbReport) -> serde_json::Value {
    let violations: Vec<_> = report
        .violations
        .iter()
        .map(|v| {
            let witnesses: Vec<_> = v
                .witnesses
                .iter()
                .map(|w| {
                    json!({
                        "individuals": w.individuals.iter().map(ToString::to_string).collect::<Vec<_>>(),
                        "lhs_degree": w.lhs_degree,
                        "rhs_degree": w.rhs_degree,
                    })
                })
                .collect();
            json!({"constraint": v.constraint.to_string(), "witnesses": witnesses})
        })
        .collect();
    json!({"consistent": report.is_ok(), "violations": violations})
}

pub fn check(cfg: &EngineConfig, out: &mut dyn Write, fabox_path: &Path, tbox_path: Option<&Path>) -> Result<u8> {
    let fabox = load_fabox(fabox_path)?;
    let tbox = tbox_path.map(load_tbox).transpose()?;
    let structural = check_fabox_consistency(&fabox);
    let inadmissible: Vec<String> = tbox
        .as_ref()
        .map(|t| validate_fakb_tbox(t).iter().map(ToString::to_string).collect())
        .unwrap_or_default();
    let kb = tbox.as_ref().map(|t| check_kb_consistency(t, &fabox));
    let ok = structural.is_ok() && inadmissible.is_empty() && kb.as_ref().is_none_or(KbReport::is_ok);
    let (violations, warnings) = fabox_lines(&structural);

    match cfg.format {
        Format::Json => {
            let doc = json!({
                "consistent": ok,
                "fabox": {"consistent": structural.is_ok(), "violations": violations, "warnings": warnings},
                "tbox": tbox.as_ref().map(|_| json!({"inadmissible": inadmissible})),
                "kb": kb.as_ref().map(kb_json),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
        Format::Tsv => {
            for v in &violations {
                writeln!(out, "fabox\tviolation\t{v}")?;
            }
            for w in &warnings {
                writeln!(out, "fabox\twarning\t{w}")?;
            }
            for i in &inadmissible {
                writeln!(out, "tbox\tinadmissible\t{i}")?;
            }
            for v in kb.iter().flat_map(|k| &k.violations) {
                for w in &v.witnesses {
                    let names: Vec<String> = w.individuals.iter().map(ToString::to_string).collect();
                    writeln!(
                        out,
                        "kb\t{}\t{}\t{}\t{}",
                        v.constraint,
                        names.join(","),
                        format_degree(w.lhs_degree),
                        format_degree(w.rhs_degree)
                    )?;
                }
            }
        }
        Format::Text => {
            let verdict = |b: bool| if b { "consistent" } else { "inconsistent" };
            writeln!(out, "fabox: {}", verdict(structural.is_ok()))?;
            for v in &violations {
                writeln!(out, "  violation: {v}")?;
            }
            for w in &warnings {
                writeln!(out, "  warning: {w}")?;
            }
            if tbox.is_some() {
                writeln!(
                    out,
                    "tbox: {}",
                    if inadmissible.is_empty() {
                        "admissible"
                    } else {
                        "inadmissible"
                    }
                )?;
                for i in &inadmissible {
                    writeln!(out, "  built-in on the right-hand side: {i}")?;
                }
            }
            if let Some(k) = &kb {
                writeln!(out, "kb: {}", verdict(k.is_ok()))?;
                if !k.is_ok() {
                    for line in k.to_string().lines() {
                        writeln!(out, "  {line}")?;
                    }
                }
            }
        }
    }
    Ok(if ok { OK } else { FAILED })
}

pub fn strengths(cfg: &EngineConfig, out: &mut dyn Write, fabox_path: &Path) -> Result<u8> {
    let fabox = load_fabox(fabox_path)?;
    let report = check_fabox_consistency(&fabox);
    if !report.is_ok() {
        return Ok(refuse(&report));
    }
    let qbaf = underlying_qbaf(&fabox)?;
    let result = qbaf::evaluate(&qbaf, cfg.semantics().as_ref(), cfg.iteration());
    export_graph(cfg, &with_argument_degrees(&fabox, &result.values), qbaf.arguments())?;

    let rows: Vec<(ArgumentId, f64, f64)> = qbaf
        .arguments()
        .iter()
        .map(|(&id, &tau)| (id, tau, result.values[&id]))
        .collect();
    match cfg.format {
        Format::Json => {
            let args: Vec<_> = rows
                .iter()
                .map(|(id, tau, rho)| json!({"argument": id.to_string(), "initial": tau, "final": rho}))
                .collect();
            let doc = json!({"converged": result.converged, "iterations": result.iterations, "arguments": args});
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
        Format::Tsv => {
            writeln!(out, "argument\tinitial\tfinal")?;
            for (id, tau, rho) in &rows {
                writeln!(out, "{id}\t{}\t{}", format_degree(*tau), format_degree(*rho))?;
            }
        }
        Format::Text => {
            let width = rows
                .iter()
                .map(|r| r.0.to_string().len())
                .max()
                .unwrap_or(0)
                .max("argument".len());
            writeln!(out, "{:width$}  {:8}  final", "argument", "initial")?;
            for (id, tau, rho) in &rows {
                writeln!(
                    out,
                    "{:width$}  {}  {}",
                    id.to_string(),
                    format_degree(*tau),
                    format_degree(*rho)
                )?;
            }
            writeln!(
                out,
                "converged: {} ({} iterations)",
                result.converged, result.iterations
            )?;
        }
    }
    if result.converged {
        Ok(OK)
    } else {
        eprintln!("strengths did not converge after {} iterations", result.iterations);
        Ok(FAILED)
    }
}

pub fn query(cfg: &EngineConfig, out: &mut dyn Write, fabox_path: &Path, tbox_path: &Path, text: &str) -> Result<u8> {
    let q = load_query(text)?;
    let fabox = load_fabox(fabox_path)?;
    let tbox = load_tbox(tbox_path)?;
    if let Some(bad) = validate_fakb_tbox(&tbox).first() {
        bail!(
            "{}: `{bad}` has a built-in predicate on its right-hand side",
            tbox_path.display()
        );
    }
    let report = check_fabox_consistency(&fabox);
    if !report.is_ok() {
        return Ok(refuse(&report));
    }
    export_graph(cfg, &fabox, &BTreeMap::new())?;
    let answers = match fcert(&q, &tbox, &fabox) {
        Ok(a) => a,
        Err(QueryError::Inconsistent(report)) => {
            eprintln!("refusing to answer: the knowledge base is inconsistent");
            eprint!("{report}");
            return Ok(FAILED);
        }
        Err(e) => return Err(e.into()),
    };
    match cfg.format {
        Format::Json => write!(out, "{}", answers.to_json())?,
        Format::Text | Format::Tsv => write!(out, "{}", answers.to_tsv())?,
    }
    Ok(OK)
}

pub fn rewrite(cfg: &EngineConfig, out: &mut dyn Write, tbox_path: &Path, text: &str) -> Result<u8> {
    if cfg.export_graph.is_some() {
        bail!("--export-graph needs a FABox; `rewrite` has none");
    }
    let q = load_query(text)?;
    let tbox = load_tbox(tbox_path)?;
    let union = perfect_ref(&q.query, &tbox);
    match cfg.format {
        Format::Json => {
            let lines: Vec<String> = union.disjuncts().iter().map(ToString::to_string).collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&lines)?)?;
        }
        Format::Text | Format::Tsv => write!(out, "{union}")?,
    }
    Ok(OK)
}
