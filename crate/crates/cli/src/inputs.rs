use std::fs;
use std::path::Path;

use distlaw_core::closure::ClosureCatalog;
use distlaw_core::experiments::{GoodConfig, Pair};
use distlaw_core::sampler::EdgeProfile;
use distlaw_core::structures::io::{from_json_str, parse_edge_list, GraphJson};
use distlaw_core::{Structure, Vertex, VertexSet};
use serde::Deserialize;

use crate::args::{BuiltinPair, PairArgs, ProfileArgs, ProfileKind};
use crate::error::{CliError, CliResult};

pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn profile(args: &ProfileArgs) -> CliResult<EdgeProfile> {
    let alpha = || {
        args.alpha
            .ok_or_else(|| CliError::Usage(format!("--alpha is required for --profile {:?}", args.profile)))
    };
    let p = match args.profile {
        ProfileKind::CaseA => EdgeProfile::CaseA { alpha: alpha()? },
        ProfileKind::CaseB => EdgeProfile::CaseB { alpha: alpha()? },
        ProfileKind::Second => EdgeProfile::SecondContext { alpha: alpha()? },
        ProfileKind::Custom => EdgeProfile::Custom { probs: args.probs.clone() },
        ProfileKind::Sparsified => EdgeProfile::Sparsified {
            probs: args.probs.clone(),
            indices: args.indices.clone(),
        },
    };
    p.validate()?;
    if let Some(a) = p.alpha() {
        if let Some((num, den)) = near_rational(a) {
            eprintln!(
                "warning: alpha = {a} is within 1e-6 of {num}/{den}; floating point cannot represent irrational exponents"
            );
        }
    }
    Ok(p)
}

/// `(p, q)` with `q ≤ 12` and `|x - p/q| < 1e-6`, smallest `q` first.
pub fn near_rational(x: f64) -> Option<(i64, i64)> {
    (1..=12).find_map(|q| {
        let p = (x * q as f64).round();
        ((x - p / q as f64).abs() < 1e-6).then_some((p as i64, q))
    })
}

/// A graph from a builtin name (`complete:N`, `path:N`, `empty:N`) or a
/// file holding JSON or an edge list.
pub fn graph(spec: &str) -> CliResult<Structure> {
    if let Some((kind, n)) = spec.split_once(':') {
        if let Ok(n) = n.parse::<usize>() {
            match kind {
                "complete" => return Ok(Structure::complete_graph(n)),
                "path" => return Ok(Structure::path_graph(n)),
                "empty" => return Ok(Structure::graph(n, &[])?),
                _ => {}
            }
        }
    }
    let text = read(Path::new(spec))?;
    if text.trim_start().starts_with('{') {
        Ok(from_json_str(&text)?)
    } else {
        Ok(parse_edge_list(&text)?)
    }
}

#[derive(Deserialize)]
struct PairFile {
    graph: GraphJson,
    a: Vec<Vertex>,
}

pub fn pair(args: &PairArgs) -> CliResult<Pair> {
    if let Some(path) = &args.pair_file {
        let f: PairFile = json(&read(path)?)?;
        return Ok(Pair::new(f.graph.to_structure()?, f.a.into_iter().collect())?);
    }
    let (b, a): (Structure, VertexSet) = match args.pair {
        Some(BuiltinPair::CommonNeighbor) => (Structure::complete_graph(3), [1, 2].into()),
        Some(BuiltinPair::Vertex) => (Structure::complete_graph(1), VertexSet::new()),
        Some(BuiltinPair::Edge) => (Structure::complete_graph(2), VertexSet::new()),
        Some(BuiltinPair::Pendant) => (Structure::complete_graph(2), [1].into()),
        None => return Err(CliError::Usage("one of --pair or --pair-file is required".into())),
    };
    Ok(Pair::new(b, a)?)
}

#[derive(Deserialize)]
struct GoodFile {
    graph: GraphJson,
    b: Vec<Vertex>,
    b0: Vec<Vertex>,
    b1: Vec<Vertex>,
}

pub fn good_config(path: &Path) -> CliResult<GoodConfig> {
    let f: GoodFile = json(&read(path)?)?;
    let set = |v: Vec<Vertex>| v.into_iter().collect::<VertexSet>();
    Ok(GoodConfig::new(f.graph.to_structure()?, set(f.b), set(f.b0), set(f.b1))?)
}

/// A catalog file, or the builtin `common-neighbor` with `k_max` large
/// enough for `k`.
pub fn catalog(spec: Option<&str>, k: usize, normalize: bool) -> CliResult<ClosureCatalog> {
    let spec = spec.ok_or_else(|| CliError::Usage("--catalog is required".into()))?;
    let cat = if spec == "common-neighbor" {
        ClosureCatalog::common_neighbor(k.max(3))?
    } else {
        ClosureCatalog::from_json(&read(Path::new(spec))?)?
    };
    Ok(if normalize { cat.normalized() } else { cat })
}

fn json<T: for<'de> Deserialize<'de>>(text: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| {
        CliError::Core(distlaw_core::Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    })
}
