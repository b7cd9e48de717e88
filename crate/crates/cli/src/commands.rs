//! One handler per subcommand. Each returns the text for stdout; with
//! `--json` that text is a single JSON object.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use mapdist::drift::{DriftBaseline, DriftOptions};
use mapdist::graphs::{kernel_matrix, load_tu_dataset, nn_classify, Similarity};
use mapdist::mapper::{build_mapper, ClusterMethod, LensSpec, MapperConfig};
use mapdist::mmspace::{write_matrix_csv, EdgeWeight, PointMetric};
use mapdist::synth::{apply_perturbation, make_circles, make_moons, PerturbationSpec, CIRCLES_NOISE, MOONS_NOISE};
use mapdist::transport::{distance, pairwise_distances, DistanceOptions, Method, SinkhornOptions, Solver};
use mapdist::{Cloud, Network};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::{Command, MapperArgs, MethodArgs};

pub fn dispatch(command: Command, json: bool) -> CliResult<String> {
    match command {
        Command::BuildMapper { input, mapper, out } => build_mapper_cmd(&input, &mapper, out.as_deref(), json),
        Command::Compare { method, a, b } => compare(&method, &a, &b, json),
        Command::CompareMatrix { dir, method, out } => compare_matrix(&dir, &method, out.as_deref(), json),
        Command::Kernel { dataset, method, gamma, out } => kernel(&dataset, &method, gamma, out.as_deref(), json),
        Command::DriftBaseline {
            input,
            exclude_rows,
            resamples,
            sample_size,
            seed,
            quantile,
            mapper,
            method,
            sinkhorn,
            epsilon,
            out,
        } => {
            let cloud = read_cloud(&input)?;
            let cloud = match exclude_rows {
                Some(path) => without_rows(&cloud, &path)?,
                None => cloud,
            };
            let config = mapper_config(&mapper)?;
            if !matches!(config.lens, LensSpec::Coordinate { .. }) {
                return Err(CliError::user("drift baselines need a coordinate lens (coord:K)"));
            }
            let opts = DriftOptions {
                resamples,
                sample_size: sample_size.unwrap_or(cloud.len()),
                seed,
                quantile,
                method: parse_method(&method)?,
                distance: DistanceOptions { solver: solver(sinkhorn, epsilon), ..DistanceOptions::default() },
            };
            let baseline = DriftBaseline::build(&cloud, &config, &opts)?;
            baseline.write_json(&out)?;
            let summary = json!({
                "out": out,
                "medioid": baseline.medioid_index,
                "threshold": baseline.threshold,
                "quantile": baseline.quantile,
                "resamples": baseline.resamples,
                "sample_size": baseline.sample_size,
            });
            let text = format!(
                "medioid {} of {}, threshold {:?} at quantile {}\n",
                baseline.medioid_index, baseline.resamples, baseline.threshold, baseline.quantile
            );
            Ok(emit(json, summary, text))
        }
        Command::DriftScore { baseline, candidate, emit_hist, bins, sinkhorn, epsilon } => {
            let base = DriftBaseline::<f64>::read_json(&baseline)?;
            let cloud = read_cloud(&candidate)?;
            let opts = DistanceOptions { solver: solver(sinkhorn, epsilon), ..DistanceOptions::default() };
            let score = base.score(Arc::new(cloud), &opts)?;
            if let Some(path) = &emit_hist {
                if bins == 0 {
                    return Err(CliError::user("--bins must be at least 1"));
                }
                let mut csv = String::from("lo,hi,count\n");
                for bin in base.histogram(bins) {
                    csv.push_str(&format!("{:?},{:?},{}\n", bin.lo, bin.hi, bin.count));
                }
                write_file(path, csv.as_bytes())?;
            }
            let summary = json!({
                "distance": score.distance,
                "percentile": score.percentile,
                "outlier": score.is_outlier,
                "threshold": base.threshold,
                "hist": emit_hist,
            });
            Ok(emit(json, summary, format!("{:?},{:?},{}\n", score.distance, score.percentile, score.is_outlier)))
        }
        Command::Synth { dataset, n, seed, noise, ratio, out } => {
            let cloud: Cloud = match dataset.as_str() {
                "moons" => make_moons(n, noise.unwrap_or(MOONS_NOISE), seed)?,
                "circles" => make_circles(n, ratio, noise.unwrap_or(CIRCLES_NOISE), seed)?,
                other => return Err(CliError::user(format!("unknown dataset `{other}` (expected moons or circles)"))),
            };
            let mut csv = Vec::new();
            cloud.write_csv(&mut csv).expect("writing to memory");
            payload(json, out.as_deref(), csv, json!({ "dataset": dataset, "n": cloud.len(), "seed": seed }), "cloud")
        }
        Command::Perturb { graph, spec, out } => {
            let x = Network::read_json(&graph)?;
            let text = std::fs::read_to_string(&spec).map_err(|e| CliError::io(&spec, e))?;
            let value: Value = serde_json::from_str(&text).map_err(|e| bad_file(&spec, e))?;
            let specs: Vec<PerturbationSpec> = match value {
                Value::Array(items) => items.into_iter().map(serde_json::from_value).collect::<Result<_, _>>(),
                single => serde_json::from_value(single).map(|s| vec![s]),
            }
            .map_err(|e| bad_file(&spec, e))?;
            let mut y = x;
            for s in &specs {
                y = apply_perturbation(&y, s)?;
            }
            graph_output(&y, out.as_deref(), json)
        }
    }
}

fn build_mapper_cmd(input: &Path, args: &MapperArgs, out: Option<&Path>, json: bool) -> CliResult<String> {
    let cloud = read_cloud(input)?;
    let config = mapper_config(args)?;
    let net = build_mapper(Arc::new(cloud), &config)?;
    graph_output(&net, out, json)
}

fn compare(args: &MethodArgs, a: &Path, b: &Path, json: bool) -> CliResult<String> {
    let (method, opts) = method_options(args)?;
    let x = Network::read_json(a)?;
    let y = Network::read_json(b)?;
    let d = distance(method, &x, &y, &opts)?;
    Ok(emit(json, json!({ "method": method.name(), "distance": d }), format!("{d:?}\n")))
}

fn compare_matrix(dir: &Path, args: &MethodArgs, out: Option<&Path>, json: bool) -> CliResult<String> {
    let (method, opts) = method_options(args)?;
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort_by(|p, q| p.file_name().cmp(&q.file_name()));
    if files.is_empty() {
        return Err(CliError::user(format!("{}: no .json graphs found", dir.display())));
    }
    let graphs = files.iter().map(Network::read_json).collect::<Result<Vec<_>, _>>()?;
    let d = pairwise_distances(&graphs, method, &opts)?;
    let mut csv = Vec::new();
    d.write_csv(&mut csv).expect("writing to memory");
    let names: Vec<String> = files.iter().map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned()).collect();
    payload(json, out, csv, json!({ "method": method.name(), "files": names }), "matrix")
}

fn kernel(dataset: &Path, args: &MethodArgs, gamma: Option<f64>, out: Option<&Path>, json: bool) -> CliResult<String> {
    let (method, opts) = method_options(args)?;
    let ds = load_tu_dataset::<f64>(dataset)?;
    let d = pairwise_distances(&ds.graphs, method, &opts)?;
    let k = kernel_matrix(&d, gamma)?;
    let accuracy = if ds.len() >= 2 { Some(nn_classify(&k.values, &ds.labels, Similarity::Kernel)?) } else { None };
    let mut csv = Vec::new();
    write_matrix_csv(&k.values, &mut csv).expect("writing to memory");
    let summary = json!({
        "dataset": ds.name,
        "graphs": ds.len(),
        "method": method.name(),
        "gamma": k.gamma,
        "nn_accuracy": accuracy,
    });
    payload(json, out, csv, summary, "matrix")
}

fn emit(json: bool, value: Value, text: String) -> String {
    if json {
        format!("{value}\n")
    } else {
        text
    }
}

/// Writes `bytes` to `out`, or returns them as stdout text when no file is
/// given. In JSON mode the bytes (CSV) are embedded under `key` as rows.
fn payload(json: bool, out: Option<&Path>, bytes: Vec<u8>, mut summary: Value, key: &str) -> CliResult<String> {
    match out {
        Some(path) => {
            write_file(path, &bytes)?;
            summary["out"] = json!(path);
            let text = summary_text(&summary);
            Ok(emit(json, summary, text))
        }
        None if json => {
            let text = String::from_utf8(bytes).expect("CSV is UTF-8");
            let rows: Vec<Vec<f64>> = text
                .lines()
                .map(|l| l.split(',').map(|v| v.parse().expect("numbers written by this program")).collect())
                .collect();
            summary[key] = json!(rows);
            Ok(format!("{summary}\n"))
        }
        None => Ok(String::from_utf8(bytes).expect("CSV is UTF-8")),
    }
}

/// `key value` lines for the scalar fields of a summary.
fn summary_text(summary: &Value) -> String {
    let mut text = String::new();
    if let Value::Object(map) = summary {
        for (k, v) in map {
            match v {
                Value::String(s) => text.push_str(&format!("{k} {s}\n")),
                Value::Array(items) => {
                    for item in items {
                        text.push_str(&format!("{k} {}\n", item.as_str().map(str::to_owned).unwrap_or_else(|| item.to_string())));
                    }
                }
                other => text.push_str(&format!("{k} {other}\n")),
            }
        }
    }
    text
}

fn graph_output(net: &Network, out: Option<&Path>, json: bool) -> CliResult<String> {
    let doc = net.to_json_string();
    let mut summary = json!({ "nodes": net.len(), "edges": net.edges().len(), "components": net.component_count() });
    match out {
        Some(path) => {
            write_file(path, format!("{doc}\n").as_bytes())?;
            summary["out"] = json!(path);
            let text = format!("{} nodes, {} edges, {} components\n", net.len(), net.edges().len(), net.component_count());
            Ok(emit(json, summary, text))
        }
        None if json => {
            summary["graph"] = serde_json::from_str(&doc).map_err(|e| CliError::Internal(e.to_string()))?;
            Ok(format!("{summary}\n"))
        }
        None => Ok(format!("{doc}\n")),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn bad_file(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::user(format!("{}: {e}", path.display()))
}

fn read_cloud(path: &Path) -> CliResult<Cloud> {
    Ok(Cloud::read_csv(path)?)
}

fn without_rows(cloud: &Cloud, path: &Path) -> CliResult<Cloud> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut drop = vec![false; cloud.len()];
    for token in text.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        let row: usize = token.parse().map_err(|_| bad_file(path, format!("`{token}` is not a row index")))?;
        *drop.get_mut(row).ok_or_else(|| bad_file(path, format!("row {row} out of range for {} rows", cloud.len())))? = true;
    }
    let keep: Vec<usize> = (0..cloud.len()).filter(|&i| !drop[i]).collect();
    if keep.is_empty() {
        return Err(bad_file(path, "every row is excluded"));
    }
    Ok(cloud.select(&keep))
}

fn parse_lens(s: &str) -> CliResult<LensSpec> {
    if let Some(axis) = s.strip_prefix("coord:") {
        let axis = axis.parse().map_err(|_| CliError::user(format!("bad lens axis in `{s}`")))?;
        return Ok(LensSpec::Coordinate { axis });
    }
    if let Some(path) = s.strip_prefix("file:") {
        let values = read_cloud(Path::new(path))?;
        if values.dim() != 1 {
            return Err(bad_file(Path::new(path), format!("lens file needs one column, found {}", values.dim())));
        }
        return Ok(LensSpec::Values { values: values.iter().map(|p| p[0]).collect() });
    }
    Err(CliError::user(format!("unknown lens `{s}` (expected coord:K or file:PATH)")))
}

fn parse_cluster(s: &str) -> CliResult<ClusterMethod> {
    let number = |v: &str| v.parse::<f64>().map_err(|_| CliError::user(format!("bad number `{v}` in --cluster {s}")));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["single-linkage-gap"] => Ok(ClusterMethod::default()),
        ["single-linkage-gap", ratio, relative] => {
            Ok(ClusterMethod::SingleLinkageGap { min_ratio: number(ratio)?, min_relative: number(relative)? })
        }
        ["epsilon", e] => Ok(ClusterMethod::EpsilonThreshold { epsilon: number(e)? }),
        _ => Err(CliError::user(format!(
            "unknown clustering `{s}` (expected single-linkage-gap, single-linkage-gap:RATIO:RELATIVE or epsilon:E)"
        ))),
    }
}

fn mapper_config(args: &MapperArgs) -> CliResult<MapperConfig> {
    let mut config = MapperConfig::new(args.resolution, args.gain)?;
    config.lens = parse_lens(&args.lens)?;
    config.clustering = parse_cluster(&args.cluster)?;
    config.metric = args.metric.parse::<PointMetric>()?;
    config.edge_weight = match args.edge_weight.as_str() {
        "extrinsic" => EdgeWeight::Extrinsic,
        "unit" => EdgeWeight::Unit,
        other => return Err(CliError::user(format!("unknown edge weight `{other}` (expected extrinsic or unit)"))),
    };
    config.validate()?;
    Ok(config)
}

fn parse_method(s: &str) -> CliResult<Method> {
    Ok(s.parse::<Method>()?)
}

fn solver(sinkhorn: bool, epsilon: Option<f64>) -> Solver {
    if sinkhorn {
        Solver::Sinkhorn(SinkhornOptions { epsilon, ..SinkhornOptions::default() })
    } else {
        Solver::Exact
    }
}

fn method_options(args: &MethodArgs) -> CliResult<(Method, DistanceOptions)> {
    if let Some(e) = args.epsilon {
        if !(e.is_finite() && e > 0.0) {
            return Err(CliError::user(format!("--epsilon must be positive, got {e}")));
        }
    }
    let opts = DistanceOptions {
        solver: solver(args.sinkhorn, args.epsilon),
        naw_scale: args.naw_scale,
        ..DistanceOptions::default()
    };
    Ok((parse_method(&args.method)?, opts))
}
