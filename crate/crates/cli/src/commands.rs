use distlaw_core::experiments::{
    classify_pair, closure_size_scan, convergence_diagnostics, empty_closure_scan, estimate_prob_at_level,
    local_relation_check, simply_good_check, weakly_nice_scan, EstimateSeries, GrowthFunction, Placement,
    ScanConfig, Thresholds,
};
use distlaw_core::closure::ClosureParams;
use distlaw_core::logic::{amalgam_type_table, equiv_d, holds_sentence, parse, parse_lines, Formula};
use distlaw_core::sampler::{sample, Seed};
use distlaw_core::structures::io::GraphJson;
use serde_json::json;

use crate::args::{AmalgamArgs, ClassifyArgs, EfArgs, EvalArgs, SampleArgs, ScanArgs, ScanKind, SeriesArgs};
use crate::error::{CliError, CliResult};
use crate::inputs;
use crate::output::{num, Output};
use crate::plot::{line_plot, Line, Point};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Emit the CSV on stdout when there is no output directory, otherwise
/// write CSV and JSON and print `summary`.
fn finish(out: &Output, csv: String, json: String, svg: Option<String>, summary: &str) -> CliResult<()> {
    if out.has_dir() {
        out.write(".csv", &csv)?;
        out.write(".json", &json)?;
        if let Some(svg) = svg {
            out.write(".svg", &svg)?;
        }
        println!("{summary}");
    } else {
        print!("{csv}");
    }
    Ok(())
}

pub fn cmd_sample(args: &SampleArgs) -> CliResult<()> {
    let profile = inputs::profile(&args.profile)?;
    let m = sample(&profile, args.n, Seed::new(args.seed))?;
    let out = Output::new("sample", args.out.clone(), args);
    let mut g = GraphJson::from_structure(&m)?;
    g.meta = Some(out.meta());
    let mut text = serde_json::to_string(&g).expect("graph serialises");
    text.push('\n');
    if out.has_dir() {
        out.write(".json", &text)?;
        println!("n={} edges={}", m.n(), m.edge_count());
    } else {
        print!("{text}");
    }
    Ok(())
}

pub fn cmd_eval(args: &EvalArgs) -> CliResult<()> {
    let m = inputs::graph(&args.graph)?;
    let text = inputs::read(&args.formula_file)?;
    let sentences = parse_lines(&text, m.vocab())?;
    let out = Output::new("eval", args.out.clone(), args);
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for (line, phi) in &sentences {
        if !phi.is_sentence() {
            return Err(CliError::Core(distlaw_core::Error::InvalidArgument(format!(
                "line {line}: free variables {:?}",
                phi.free_vars()
            ))));
        }
        let value = holds_sentence(&m, phi)?;
        println!("line {line}: {value}");
        rows.push(vec![line.to_string(), value.to_string(), quote(&phi.to_string())]);
        results.push(json!({ "line": line, "formula": phi.to_string(), "value": value }));
    }
    out.write(".csv", &out.csv(&["line", "value", "formula"], &rows))?;
    out.write(".json", &out.envelope(&results))?;
    Ok(())
}

fn single_sentence(args: &SeriesArgs, vocab: &distlaw_core::Vocabulary) -> CliResult<Formula> {
    if let Some(text) = &args.formula {
        return Ok(parse(text, vocab)?);
    }
    let path = args.formula_file.as_ref().expect("clap requires one of the two");
    let mut all = parse_lines(&inputs::read(path)?, vocab)?;
    if all.len() != 1 {
        return Err(CliError::Usage(format!(
            "{} must hold exactly one sentence, found {}",
            path.display(),
            all.len()
        )));
    }
    Ok(all.pop().unwrap().1)
}

pub fn cmd_series(args: &SeriesArgs) -> CliResult<()> {
    let profile = inputs::profile(&args.profile)?;
    let phi = single_sentence(args, &profile.vocabulary())?;
    let growth: GrowthFunction = args.growth.parse()?;
    let thresholds = Thresholds {
        delta: args.delta,
        tau: args.tau,
        window_eps: args.window_eps,
    };
    let g = &args.grid;
    let entries = g
        .ngrid
        .iter()
        .map(|&n| estimate_prob_at_level(&phi, &profile, n, g.trials, g.seed, args.level))
        .collect::<distlaw_core::Result<Vec<_>>>()?;
    let series = EstimateSeries {
        entries,
        profile,
        formula: phi.to_string(),
        seed: g.seed,
        level: args.level,
    };
    let diagnostics = if series.entries.len() >= 4 {
        Some(convergence_diagnostics(&series, growth, thresholds)?)
    } else {
        None
    };
    let out = Output::new("series", args.out.clone(), args);
    let rows: Vec<Vec<String>> = series
        .entries
        .iter()
        .map(|e| {
            vec![
                e.n.to_string(),
                e.trials.to_string(),
                e.successes.to_string(),
                num(e.p_hat),
                num(e.ci_low),
                num(e.ci_high),
            ]
        })
        .collect();
    let csv = out.csv(&["n", "trials", "successes", "phat", "lo", "hi"], &rows);
    let json = out.envelope(&json!({ "series": series, "diagnostics": diagnostics }));
    let line = Line {
        label: series.formula.clone(),
        points: series
            .entries
            .iter()
            .map(|e| Point { x: e.n as f64, y: e.p_hat, whisker: Some((e.ci_low, e.ci_high)) })
            .collect(),
    };
    let svg = line_plot("Prob(M_n satisfies the sentence)", "estimated probability", &[line], Some((0.0, 1.0)));
    let summary = match &diagnostics {
        Some(d) => format!("verdict: {} (tail mean {})", d.verdict, num(d.tail_mean)),
        None => "verdict: none (fewer than 4 grid points)".to_string(),
    };
    finish(&out, csv, json, Some(svg), &summary)
}

pub fn cmd_classify(args: &ClassifyArgs) -> CliResult<()> {
    let profile = inputs::profile(&args.profile)?;
    let pair = inputs::pair(&args.pair)?;
    let placement: Placement = args.placement.parse()?;
    let growth: GrowthFunction = args.growth.parse()?;
    let g = &args.grid;
    let cfg = ScanConfig::new(g.ngrid.clone(), g.trials, g.seed).with_placement(placement);
    let report = classify_pair(&pair, &profile, &cfg, growth, args.eps_lo, args.eps_hi)?;
    let out = Output::new("classify", args.out.clone(), args);
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                num(r.median_max),
                num(r.mean_max),
                r.max_max.to_string(),
                r.trials.to_string(),
                r.empty_trials.to_string(),
                r.capped_trials.to_string(),
            ]
        })
        .collect();
    let csv = out.csv(
        &["n", "max_count", "mean_max", "max_max", "trials", "empty_trials", "capped_trials"],
        &rows,
    );
    let json = out.envelope(&report);
    let line = Line {
        label: format!("pair {}", report.pair),
        points: report
            .rows
            .iter()
            .map(|r| Point { x: r.n as f64, y: r.median_max, whisker: None })
            .collect(),
    };
    let svg = line_plot("Median of per-sample maximum extension count", "extensions", &[line], None);
    let summary = format!("verdict: {} (slope {})", report.verdict, num(report.fit.slope));
    finish(&out, csv, json, Some(svg), &summary)
}

pub fn cmd_scan(args: &ScanArgs) -> CliResult<()> {
    let out = Output::new(scan_stem(args.kind), args.out.clone(), args);
    let seed = || args.seed.ok_or_else(|| CliError::Usage("--seed is required for this scan".into()));
    let grid = || {
        if args.ngrid.is_empty() {
            Err(CliError::Usage("--ngrid is required for this scan".into()))
        } else {
            Ok(args.ngrid.clone())
        }
    };
    match args.kind {
        ScanKind::Closure => {
            let profile = inputs::profile(&args.profile)?;
            let cat = inputs::catalog(args.catalog.as_deref(), args.k.pow(args.m as u32).max(args.k), args.normalize)?;
            let params = ClosureParams::new(args.k, args.m)?;
            let rows = closure_size_scan(&profile, &cat, params, args.l, args.eps, &grid()?, args.trials, seed()?)?;
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.trials.to_string(),
                        r.max_size.to_string(),
                        num(r.mean_size),
                        r.violations.to_string(),
                        num(r.violation_fraction),
                    ]
                })
                .collect();
            let csv = out.csv(&["n", "trials", "max_size", "mean_size", "violations", "violation_fraction"], &table);
            let line = Line {
                label: "max |cl|".into(),
                points: rows.iter().map(|r| Point { x: r.n as f64, y: r.max_size as f64, whisker: None }).collect(),
            };
            let svg = line_plot("Closure sizes", "size", &[line], None);
            let worst = rows.iter().map(|r| r.max_size).max().unwrap_or(0);
            finish(&out, csv, out.envelope(&rows), Some(svg), &format!("largest closure: {worst}"))
        }
        ScanKind::Empty => {
            let profile = inputs::profile(&args.profile)?;
            let cat = inputs::catalog(args.catalog.as_deref(), args.k, args.normalize)?;
            let params = ClosureParams::new(args.k, args.m)?;
            let rows = empty_closure_scan(&profile, &cat, params, &grid()?, args.trials, seed()?)?;
            let mut table = Vec::new();
            for r in &rows {
                for (code, mass) in &r.masses {
                    table.push(vec![r.n.to_string(), quote(code), num(*mass)]);
                }
            }
            let csv = out.csv(&["n", "type", "mass"], &table);
            let types: usize = rows.iter().map(|r| r.masses.len()).max().unwrap_or(0);
            finish(&out, csv, out.envelope(&rows), None, &format!("types per n: at most {types}"))
        }
        ScanKind::Nice => {
            let profile = inputs::profile(&args.profile)?;
            let pair = inputs::pair(&args.pair)?;
            let placement: Placement = args.placement.parse()?;
            let cfg = ScanConfig::new(grid()?, args.trials, seed()?).with_placement(placement);
            let report = weakly_nice_scan(&pair, &profile, &cfg)?;
            let table: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| vec![r.n.to_string(), num(r.median_max), num(r.mean_max), r.max_max.to_string(), r.trials.to_string()])
                .collect();
            let csv = out.csv(&["n", "median_family", "mean_family", "max_family", "trials"], &table);
            let line = Line {
                label: format!("pair {}", report.pair),
                points: report.rows.iter().map(|r| Point { x: r.n as f64, y: r.median_max, whisker: None }).collect(),
            };
            let svg = line_plot("Greedy disjoint family sizes", "family size", &[line], None);
            let summary = format!("slope: {}", num(report.fit.slope));
            finish(&out, csv, out.envelope(&report), Some(svg), &summary)
        }
        ScanKind::Local => {
            let pair = inputs::pair(&args.pair)?;
            let cat = inputs::catalog(args.catalog.as_deref(), args.k, args.normalize)?;
            let r = local_relation_check(&pair.b, &pair.a, args.m, args.k, &cat)?;
            let csv = out.csv(&["s_m", "i_km"], &[vec![r.s_m.to_string(), r.i_km.to_string()]]);
            let summary = format!("s_m: {}, i_km: {}", r.s_m, r.i_km);
            finish(&out, csv, out.envelope(&r), None, &summary)
        }
        ScanKind::Good => {
            let profile = inputs::profile(&args.profile)?;
            let path = args
                .good_file
                .as_ref()
                .ok_or_else(|| CliError::Usage("--good-file is required for the good scan".into()))?;
            let cfg = inputs::good_config(path)?;
            let cat = inputs::catalog(args.catalog.as_deref(), args.k, args.normalize)?;
            let n = args.n.ok_or_else(|| CliError::Usage("--n is required for the good scan".into()))?;
            let r = simply_good_check(&cfg, args.k, &cat, &profile, n, args.trials, seed()?)?;
            let csv = out.csv(
                &["n", "trials", "placed", "passed", "pass_fraction", "extensions_checked", "truncated"],
                &[vec![
                    r.n.to_string(),
                    r.trials.to_string(),
                    r.placed.to_string(),
                    r.passed.to_string(),
                    num(r.pass_fraction),
                    r.extensions_checked.to_string(),
                    r.truncated.to_string(),
                ]],
            );
            let summary = format!("good fraction: {} of {} placed trials", num(r.pass_fraction), r.placed);
            finish(&out, csv, out.envelope(&r), None, &summary)
        }
    }
}

fn scan_stem(kind: ScanKind) -> &'static str {
    match kind {
        ScanKind::Closure => "scan-closure",
        ScanKind::Empty => "scan-empty",
        ScanKind::Nice => "scan-nice",
        ScanKind::Local => "scan-local",
        ScanKind::Good => "scan-good",
    }
}

pub fn cmd_ef(args: &EfArgs) -> CliResult<()> {
    let a = inputs::graph(&args.left)?;
    let b = inputs::graph(&args.right)?;
    let same = equiv_d(&a, &[], &b, &[], args.depth)?;
    let verdict = if same { "equivalent" } else { "not equivalent" };
    println!("{verdict}");
    let out = Output::new("ef", args.out.clone(), args);
    out.write(".csv", &out.csv(&["depth", "equivalent"], &[vec![args.depth.to_string(), same.to_string()]]))?;
    out.write(".json", &out.envelope(&json!({ "depth": args.depth, "equivalent": same })))?;
    Ok(())
}

pub fn cmd_amalgam(args: &AmalgamArgs) -> CliResult<()> {
    let base = inputs::graph(&args.base)?;
    let table = amalgam_type_table(&base, args.depth, args.max_side)?;
    println!(
        "single-valued: {} cells from {} side pairs ({} sides)",
        table.cells.len(),
        table.pairs_checked,
        table.sides
    );
    let out = Output::new("amalgam", args.out.clone(), args);
    let row = vec![
        args.depth.to_string(),
        args.max_side.to_string(),
        table.sides.to_string(),
        table.pairs_checked.to_string(),
        table.cells.len().to_string(),
        "true".to_string(),
    ];
    out.write(
        ".csv",
        &out.csv(&["depth", "max_side", "sides", "pairs_checked", "cells", "single_valued"], &[row]),
    )?;
    out.write(
        ".json",
        &out.envelope(&json!({
            "depth": args.depth,
            "max_side": args.max_side,
            "sides": table.sides,
            "pairs_checked": table.pairs_checked,
            "cells": table.cells.len(),
            "single_valued": true,
        })),
    )?;
    Ok(())
}
