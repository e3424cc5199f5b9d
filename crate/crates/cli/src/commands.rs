use std::fs;
use std::io::BufReader;
use std::path::Path;

use chrono::Utc;

use clique_qml::training::{run_experiment_with, AccuracyCurve, TrainConfig};
use clique_qml::{build_dataset, Dataset};

use crate::output::{sha256_hex, write_atomic, Artifact, RunManifest};
use crate::{Failure, GenDataArgs, ReportArgs, TrainArgs};

pub fn gen_data(args: &GenDataArgs) -> Result<(), Failure> {
    let ds = build_dataset(args.qubits, args.clique, args.size, args.edge_prob_range, args.seed)?;
    let mut buf = Vec::new();
    ds.write_jsonl(&mut buf)?;
    write_atomic(&args.out, &buf)?;
    let (with_clique, blank) = ds.class_counts();
    println!(
        "wrote {} graphs ({} nodes, {}-clique) to {}: {with_clique} with clique, {blank} without",
        ds.len(),
        ds.n_nodes,
        ds.k,
        args.out.display()
    );
    Ok(())
}

fn read_dataset(path: &Path) -> Result<(Dataset, Vec<u8>), Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    let ds = Dataset::read_jsonl(BufReader::new(bytes.as_slice()))
        .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    Ok((ds, bytes))
}

fn config_from_args(args: &TrainArgs, dataset: Option<&Dataset>) -> Result<TrainConfig, Failure> {
    let ansatz = args
        .ansatz
        .ok_or_else(|| Failure::usage("--ansatz is required unless --from-manifest is given"))?;
    let (n_qubits, k) = match dataset {
        Some(ds) => (ds.n_nodes, ds.k),
        None => (args.qubits, args.clique),
    };
    let mut config = TrainConfig::new(ansatz, n_qubits, k);
    config.repetitions = args.repetitions.unwrap_or(ansatz.default_repetitions());
    config.epochs = args.epochs;
    config.train_size = args.train_size;
    config.dataset_size = dataset.map_or(args.dataset_size, |ds| ds.len());
    config.batch_size = args.batch_size;
    config.learning_rate = args.lr;
    config.metric_regularizer = args.reg;
    config.init_scale = args.init_scale;
    config.edge_prob_range = dataset.map_or(args.edge_prob_range, |ds| ds.edge_prob_range);
    config.loss = args.loss;
    config.training_set = args.training_set();
    config.seeds = (0..args.seeds).map(|i| args.first_seed + i).collect();
    Ok(config)
}

/// `Accuracy_<tag>_Average_<n>_qubits`
pub fn curve_stem(config: &TrainConfig) -> String {
    format!("Accuracy_{}_Average_{}_qubits", config.ansatz.file_tag(), config.n_qubits)
}

pub fn train(args: &TrainArgs) -> Result<(), Failure> {
    let started_at = Utc::now().to_rfc3339();
    let (config, dataset_path) = match &args.from_manifest {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
            let manifest: RunManifest = serde_json::from_str(&text)
                .map_err(|e| Failure::data(format!("{}: bad manifest: {e}", path.display())))?;
            let ds_path = manifest.dataset.map(|a| a.path);
            (Some(manifest.config), args.dataset.clone().or(ds_path))
        }
        None => (None, args.dataset.clone()),
    };
    let loaded = dataset_path.as_deref().map(read_dataset).transpose()?;
    let dataset = loaded.as_ref().map(|(ds, _)| ds);
    let config = match config {
        Some(c) => c,
        None => config_from_args(args, dataset)?,
    };
    config.validate()?;

    let verbose = args.verbose;
    let result = run_experiment_with(&config, dataset, &mut |p| {
        if verbose || p.epoch == config.epochs {
            eprintln!(
                "seed {:>3} epoch {:>4}: train loss {:.5}, validation node accuracy {:.5}",
                p.seed, p.epoch, p.train_loss, p.accuracy
            );
        }
    })?;

    let stem = curve_stem(&config);
    let curve_path = args.out_dir.join(format!("{stem}.csv"));
    let seeds_path = args.out_dir.join(format!("{stem}_seeds.csv"));
    let manifest_path = args.out_dir.join(format!("{stem}.manifest.json"));

    let curve_bytes = result.curve.to_csv_string().into_bytes();
    let mut seed_bytes = Vec::new();
    result.write_seed_csv(&mut seed_bytes)?;
    write_atomic(&curve_path, &curve_bytes)?;
    write_atomic(&seeds_path, &seed_bytes)?;

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config,
        dataset: loaded.as_ref().zip(dataset_path).map(|((_, bytes), path)| Artifact {
            path,
            sha256: sha256_hex(bytes),
        }),
        output_dir: args.out_dir.clone(),
        started_at,
        finished_at: Utc::now().to_rfc3339(),
        artifacts: vec![
            Artifact { path: curve_path.clone(), sha256: sha256_hex(&curve_bytes) },
            Artifact { path: seeds_path, sha256: sha256_hex(&seed_bytes) },
        ],
    };
    let json = serde_json::to_vec_pretty(&manifest).map_err(|e| Failure::data(e.to_string()))?;
    write_atomic(&manifest_path, &json)?;

    let last = result.curve.last().expect("at least one epoch");
    println!(
        "{} on {} qubits: epoch {} node accuracy {:.4} ± {:.4} -> {}",
        manifest.config.ansatz,
        manifest.config.n_qubits,
        last.epoch,
        last.node_avg,
        last.node_avg_error,
        curve_path.display()
    );
    Ok(())
}

fn curve_name(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or("curve").to_string()
}

pub fn report(args: &ReportArgs) -> Result<(), Failure> {
    let mut curves: Vec<(String, AccuracyCurve)> = Vec::new();
    for path in &args.csv {
        let file = fs::File::open(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
        let curve = AccuracyCurve::read_csv(BufReader::new(file))
            .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
        if curve.records.is_empty() {
            return Err(Failure::data(format!("{}: no data rows", path.display())));
        }
        curves.push((curve_name(path), curve));
    }
    let rows = curves.iter().map(|(_, c)| c.records.len()).min().unwrap_or(0);
    if curves.iter().any(|(_, c)| c.records.len() != rows) {
        eprintln!("warning: curves have different lengths; truncating to the shortest ({rows} epochs)");
    }

    // one column per curve
    let width = curves.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(16);
    let finals: Vec<_> = curves.iter().map(|(_, c)| c.records[rows - 1]).collect();
    let mut header = format!("{:<8}", "");
    let mut epoch = format!("{:<8}", "epoch");
    let mut acc = format!("{:<8}", "accuracy");
    for ((name, _), r) in curves.iter().zip(&finals) {
        header.push_str(&format!("  {name:>width$}"));
        epoch.push_str(&format!("  {:>width$}", r.epoch));
        acc.push_str(&format!("  {:>width$}", format!("{:.4} ± {:.4}", r.node_avg, r.node_avg_error)));
    }
    println!("{header}\n{epoch}\n{acc}");

    if let Some(out) = &args.out {
        write_atomic(out, merged_csv(&curves, rows).as_bytes())?;
        println!("merged table written to {}", out.display());
    }
    Ok(())
}

/// `Epoch,<name>_Node_Avg,<name>_Node_Avg_Error,...` over the first `rows`
/// records; epochs come from the first curve.
pub fn merged_csv(curves: &[(String, AccuracyCurve)], rows: usize) -> String {
    let mut out = String::from("Epoch");
    for (name, _) in curves {
        out.push_str(&format!(",{name}_Node_Avg,{name}_Node_Avg_Error"));
    }
    out.push('\n');
    for i in 0..rows {
        out.push_str(&curves[0].1.records[i].epoch.to_string());
        for (_, c) in curves {
            let r = c.records[i];
            out.push_str(&format!(",{},{}", r.node_avg, r.node_avg_error));
        }
        out.push('\n');
    }
    out
}
