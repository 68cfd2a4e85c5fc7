//! Implementations of the `depthfall` subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use depthfall::background::build_model;
use depthfall::classify::{KnnModel, Model, SvmModel};
use depthfall::config::Config;
use depthfall::dataio::{encode_depth_png16, load_sequence, DepthFrame, Sequence};
use depthfall::detector::{
    feature_names, orient_floor, run_sequence, Backend, Mode, PipelineConfig, TraceRow,
};
use depthfall::error::Error;
use depthfall::eval::{metrics, percent2, roc_curve, ConfusionMatrix};
use depthfall::fuzzy::fcm::fit_three_terms;
use depthfall::geometry::estimate_floor;
use depthfall::synth::{make_episode, make_overhead_episode, Scenario};

use crate::{CliError, Command};

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Detect { seq_dir, mode, backend, model, trace, label, image_only, cfg } => {
            detect(&seq_dir, mode.into(), backend.into(), model.as_deref(), trace.as_deref(), label, image_only, &cfg.build()?)
        }
        Command::Eval { dataset_root, labels, mode, backend, model, report, cfg } => {
            eval(&dataset_root, &labels, mode.into(), backend.into(), model.as_deref(), report.as_deref(), &cfg.build()?)
        }
        Command::TrainKnn { features_csv, out, cfg } => train(&features_csv, &out, true, &cfg.build()?),
        Command::TrainSvm { features_csv, out, cfg } => train(&features_csv, &out, false, &cfg.build()?),
        Command::FitMf { features_csv, terms, out, cfg } => fit_mf(&features_csv, terms, &out, &cfg.build()?),
        Command::Floor { seq_dir, cfg } => floor(&seq_dir, &cfg.build()?),
        Command::Bg { seq_dir, out, cfg } => bg(&seq_dir, &out, &cfg.build()?),
        Command::Features { seq_dir, out, mode, label, cfg } => {
            features(&seq_dir, &out, mode.into(), label, &cfg.build()?)
        }
        Command::Roc { traces, out } => roc(&traces, &out),
        Command::Synth { out_dir, scenario, seed, overhead, no_accel } => {
            synth(&out_dir, &scenario, seed, overhead, no_accel)
        }
    }
}

/// Load a trained model file when the backend needs one.
fn load_model(path: Option<&Path>, backend: Backend) -> Result<Option<Model>, CliError> {
    match backend {
        Backend::Knn | Backend::Svm => {
            let path = path.ok_or_else(|| {
                CliError::Usage(format!("backend {} requires --model", backend.name()))
            })?;
            let text = fs::read_to_string(path)?;
            Ok(Some(Model::from_text(&text)?))
        }
        Backend::Threshold | Backend::Fuzzy => Ok(None),
    }
}

fn pipeline(
    mode: Mode,
    backend: Backend,
    model: Option<&Path>,
    gated: bool,
    cfg: &Config,
) -> Result<PipelineConfig, CliError> {
    let mut pcfg = PipelineConfig::new(mode, backend, cfg.clone());
    pcfg.model = load_model(model, backend)?;
    pcfg.gated = gated;
    Ok(pcfg)
}

/// Trace CSV layout: frame_index, t_ms, per-mode features, score, decision,
/// and optionally a ground-truth label column for `roc`.
fn write_trace(
    path: &Path,
    mode: Mode,
    trace: &[TraceRow],
    label: Option<u8>,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    let names = feature_names(mode);
    let mut header: Vec<String> = vec!["frame_index".into(), "t_ms".into()];
    header.extend(names.iter().map(|n| n.to_string()));
    header.push("score".into());
    header.push("decision".into());
    if label.is_some() {
        header.push("label".into());
    }
    w.write_record(&header)?;
    for row in trace {
        let mut rec: Vec<String> = vec![row.frame_index.to_string(), row.t_ms.to_string()];
        match &row.features {
            Some(f) => rec.extend(f.iter().map(|v| v.to_string())),
            None => rec.extend(std::iter::repeat(String::new()).take(names.len())),
        }
        rec.push(if row.score.is_finite() { row.score.to_string() } else { String::new() });
        rec.push((row.decision as u8).to_string());
        if let Some(l) = label {
            rec.push(l.to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(Error::from)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn detect(
    seq_dir: &Path,
    mode: Mode,
    backend: Backend,
    model: Option<&Path>,
    trace_out: Option<&Path>,
    label: Option<u8>,
    image_only: bool,
    cfg: &Config,
) -> Result<(), CliError> {
    // Usage validation (model presence) before any data is touched.
    let pcfg = pipeline(mode, backend, model, !image_only, cfg)?;
    let seq = load_sequence(seq_dir, cfg)?;
    let (events, trace) = run_sequence(&seq, &pcfg)?;
    if events.is_empty() {
        println!("no falls detected ({} frames processed)", trace.len());
    }
    for ev in &events {
        println!(
            "fall detected at t={} ms (frame {}, backend {}, score {:.3})",
            ev.t_ms,
            ev.frame_index,
            ev.backend.name(),
            ev.score
        );
    }
    if let Some(path) = trace_out {
        write_trace(path, mode, &trace, label)?;
        log::info!("trace written to {}", path.display());
    }
    Ok(())
}

fn fmt_pct(v: Option<f64>) -> String {
    match v {
        Some(f) => format!("{:.2}%", percent2(f)),
        None => "n/a".into(),
    }
}

fn eval(
    root: &Path,
    labels: &Path,
    mode: Mode,
    backend: Backend,
    model: Option<&Path>,
    report: Option<&Path>,
    cfg: &Config,
) -> Result<(), CliError> {
    let pcfg = pipeline(mode, backend, model, true, cfg)?;

    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(labels)?;
    let mut rows: Vec<(String, bool)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(Error::from)?;
        if record.len() < 2 {
            return Err(Error::Format("labels CSV needs name,label columns".into()).into());
        }
        let name = record[0].trim().to_string();
        let label: u8 = record[1].trim().parse().map_err(|_| {
            Error::Format(format!("labels CSV: bad label {:?} for {name}", &record[1]))
        })?;
        rows.push((name, label == 1));
    }
    if rows.is_empty() {
        return Err(Error::InsufficientData("labels CSV lists no sequences".into()).into());
    }

    let mut cm = ConfusionMatrix::new(0, 0, 0, 0);
    let mut per_seq: Vec<(String, bool, usize)> = Vec::new();
    for (name, is_fall) in &rows {
        let seq = load_sequence(&root.join(name), cfg)?;
        let (events, _) = run_sequence(&seq, &pcfg)?;
        match (*is_fall, events.is_empty()) {
            (true, false) => cm.tp += 1,
            (true, true) => cm.false_neg += 1,
            (false, false) => cm.fp += 1,
            (false, true) => cm.tn += 1,
        }
        per_seq.push((name.clone(), *is_fall, events.len()));
    }

    let m = metrics(&cm, 1.0);
    println!("sequences: {}", cm.total());
    println!("confusion: tp={} fp={} fn={} tn={}", cm.tp, cm.fp, cm.false_neg, cm.tn);
    println!("accuracy:    {}", fmt_pct(m.accuracy));
    println!("precision:   {}", fmt_pct(m.precision));
    println!("sensitivity: {}", fmt_pct(m.sensitivity));
    println!("specificity: {}", fmt_pct(m.specificity));
    println!("f1:          {}", fmt_pct(m.f_beta));

    if let Some(path) = report {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["name", "label", "events", "predicted"])
            .map_err(Error::from)?;
        for (name, is_fall, n_events) in &per_seq {
            w.write_record([
                name.as_str(),
                &(*is_fall as u8).to_string(),
                &n_events.to_string(),
                &((*n_events > 0) as u8).to_string(),
            ])
            .map_err(Error::from)?;
        }
        w.flush().map_err(Error::from)?;
    }
    Ok(())
}

/// Read a labeled feature CSV into samples and labels. Bookkeeping columns
/// (frame_index, t_ms, score, decision) are ignored, so the output of
/// `features --label` works directly; rows with empty feature fields (frames
/// without a segmented person) are skipped.
fn read_labeled_features(path: &Path) -> Result<(Vec<Vec<f64>>, Vec<u8>), CliError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers = reader.headers().map_err(Error::from)?.clone();
    let label_col = headers
        .iter()
        .position(|h| h.trim() == "label")
        .ok_or_else(|| Error::Format("feature CSV has no `label` column".into()))?;
    let feature_cols: Vec<usize> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| !NON_FEATURE_COLUMNS.contains(&h.trim()))
        .map(|(j, _)| j)
        .collect();
    if feature_cols.is_empty() {
        return Err(Error::Format("feature CSV has no feature columns".into()).into());
    }
    let mut samples = Vec::new();
    let mut labels = Vec::new();
    'rows: for (i, record) in reader.records().enumerate() {
        let record = record.map_err(Error::from)?;
        let mut row = Vec::with_capacity(feature_cols.len());
        for &j in &feature_cols {
            let field = record.get(j).unwrap_or("").trim();
            if field.is_empty() {
                continue 'rows;
            }
            row.push(field.parse::<f64>().map_err(|_| Error::Parse {
                row: i + 2,
                msg: format!("bad feature value {field:?}"),
            })?);
        }
        let label = record.get(label_col).unwrap_or("").trim();
        labels.push(label.parse::<u8>().map_err(|_| Error::Parse {
            row: i + 2,
            msg: format!("bad label {label:?}"),
        })?);
        samples.push(row);
    }
    Ok((samples, labels))
}

fn train(features_csv: &Path, out: &Path, knn: bool, cfg: &Config) -> Result<(), CliError> {
    let (samples, labels) = read_labeled_features(features_csv)?;
    let model = if knn {
        let k = cfg.get_usize("classify.k")?;
        Model::Knn(KnnModel::fit(&samples, &labels, k)?)
    } else {
        Model::Svm(SvmModel::fit(
            &samples,
            &labels,
            cfg.get_f64("classify.svm_c")?,
            cfg.get_usize("classify.svm_epochs")?,
            cfg.get_u64("classify.seed")?,
        )?)
    };
    fs::write(out, model.to_text())?;
    println!(
        "trained {} model on {} samples -> {}",
        if knn { "knn" } else { "svm" },
        samples.len(),
        out.display()
    );
    Ok(())
}

/// Columns that are bookkeeping rather than feature data in trace/feature CSVs.
const NON_FEATURE_COLUMNS: [&str; 5] = ["label", "frame_index", "t_ms", "score", "decision"];

fn fit_mf(features_csv: &Path, terms: usize, out: &Path, cfg: &Config) -> Result<(), CliError> {
    if terms != 3 {
        return Err(CliError::Usage(format!(
            "only the Lo/Me/Hi triple (--terms 3) is supported, got {terms}"
        )));
    }
    let seed = cfg.get_u64("classify.seed")?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(features_csv)?;
    let headers = reader.headers().map_err(Error::from)?.clone();
    let mut columns: Vec<(String, Vec<f64>)> = headers
        .iter()
        .map(|h| (h.trim().to_string(), Vec::new()))
        .collect();
    for record in reader.records() {
        let record = record.map_err(Error::from)?;
        for (j, field) in record.iter().enumerate() {
            if let Ok(v) = field.trim().parse::<f64>() {
                if v.is_finite() {
                    columns[j].1.push(v);
                }
            }
        }
    }

    let mut text = String::from("# Membership functions fitted with fuzzy c-means.\n");
    let mut fitted = 0;
    for (name, data) in &columns {
        if NON_FEATURE_COLUMNS.contains(&name.as_str()) || data.is_empty() {
            continue;
        }
        let fit = fit_three_terms(data, seed)?;
        let (lo, hi) = data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        text.push_str(&format!("mf.fit.{name}.universe = {lo} {hi}\n"));
        for (term, mf) in &fit {
            text.push_str(&format!("mf.fit.{name}.{term} = {}\n", mf.to_text()));
        }
        fitted += 1;
    }
    if fitted == 0 {
        return Err(Error::InsufficientData("no numeric feature columns to fit".into()).into());
    }
    fs::write(out, text)?;
    println!("fitted {fitted} variables -> {}", out.display());
    Ok(())
}

fn floor(seq_dir: &Path, cfg: &Config) -> Result<(), CliError> {
    let seq = load_sequence(seq_dir, cfg)?;
    let frame = seq
        .frames
        .first()
        .ok_or_else(|| Error::InsufficientData("sequence has no frames".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.get_u64("floor.seed")?);
    let plane = orient_floor(estimate_floor(frame, &seq.camera, cfg, &mut rng)?);
    println!(
        "plane: {:.6}*x + {:.6}*y + {:.6}*z + {:.6} = 0",
        plane.a, plane.b, plane.c, plane.d
    );
    println!("inlier ratio: {:.4}", plane.inlier_ratio);
    println!("camera height above floor: {:.3} m", plane.d);
    Ok(())
}

fn bg(seq_dir: &Path, out: &Path, cfg: &Config) -> Result<(), CliError> {
    let seq = load_sequence(seq_dir, cfg)?;
    let n = cfg.get_usize("bg.n_frames")?;
    let b_thold = cfg.get_f64("bg.b_thold_mm")? as u16;
    let take = n.min(seq.frames.len());
    let model = build_model(&seq.frames[..take], take, b_thold)?;
    let frame = DepthFrame::new(model.width, model.height, model.reference.clone());
    fs::write(out, encode_depth_png16(&frame, seq.ci_mm)?)?;
    println!(
        "background model from {take} frames ({} nmd pixels) -> {}",
        model.nmd_count(),
        out.display()
    );
    Ok(())
}

fn features(
    seq_dir: &Path,
    out: &Path,
    mode: Mode,
    label: Option<u8>,
    cfg: &Config,
) -> Result<(), CliError> {
    let seq = load_sequence(seq_dir, cfg)?;
    // Ungated fuzzy run: needs no model or accelerometer and scores every
    // frame with a segmented person, so the trace carries a full feature set.
    let mut pcfg = PipelineConfig::new(mode, Backend::Fuzzy, cfg.clone());
    pcfg.gated = false;
    let (_, trace) = run_sequence(&seq, &pcfg)?;
    write_trace(out, mode, &trace, label)?;
    let rows = trace.iter().filter(|r| r.features.is_some()).count();
    println!("{rows} feature rows -> {}", out.display());
    Ok(())
}

fn roc(traces: &[PathBuf], out: &Path) -> Result<(), CliError> {
    let mut pairs: Vec<(f64, bool)> = Vec::new();
    for path in traces {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
        let headers = reader.headers().map_err(Error::from)?.clone();
        let find = |name: &str| headers.iter().position(|h| h.trim() == name);
        let score_col = find("score").ok_or_else(|| {
            Error::Format(format!("{}: no `score` column", path.display()))
        })?;
        let label_col = find("label").ok_or_else(|| {
            Error::Format(format!(
                "{}: no `label` column (write traces with `detect --label`)",
                path.display()
            ))
        })?;
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(Error::from)?;
            let score = record[score_col].trim();
            if score.is_empty() {
                continue;
            }
            let score: f64 = score.parse().map_err(|_| Error::Parse {
                row: i + 2,
                msg: format!("bad score {score:?}"),
            })?;
            let label: u8 = record[label_col].trim().parse().map_err(|_| Error::Parse {
                row: i + 2,
                msg: format!("bad label {:?}", &record[label_col]),
            })?;
            pairs.push((score, label == 1));
        }
    }
    let (points, auc) = roc_curve(&pairs)?;
    let mut w = csv::Writer::from_path(out)?;
    w.write_record(["fpr", "tpr"]).map_err(Error::from)?;
    for (fpr, tpr) in &points {
        w.write_record([fpr.to_string(), tpr.to_string()]).map_err(Error::from)?;
    }
    w.flush().map_err(Error::from)?;
    println!("{} samples, {} roc points, auc = {auc:.4} -> {}", pairs.len(), points.len(), out.display());
    Ok(())
}

fn scenario_from_name(name: &str) -> Result<Scenario, CliError> {
    Ok(match name {
        "fall" => Scenario::Fall,
        "lie-down" => Scenario::LieDown,
        "sit" => Scenario::Sit { spike: false },
        "sit-energetic" => Scenario::Sit { spike: true },
        "squat" => Scenario::Squat,
        "bend" => Scenario::Bend,
        "walk" => Scenario::Walk,
        other => {
            return Err(CliError::Usage(format!(
                "unknown scenario {other:?} (expected fall, lie-down, sit, sit-energetic, squat, bend or walk)"
            )))
        }
    })
}

/// Write a sequence in the on-disk layout `load_sequence` reads back.
fn write_sequence(dir: &Path, seq: &Sequence) -> Result<(), CliError> {
    let depth_dir = dir.join("depth");
    fs::create_dir_all(&depth_dir)?;
    for frame in &seq.frames {
        let path = depth_dir.join(format!("{:05}.png", frame.frame_index));
        fs::write(path, encode_depth_png16(frame, seq.ci_mm)?)?;
    }
    fs::write(
        dir.join("camera.toml"),
        format!(
            "f = {}\nb = {}\ncx = {}\ncy = {}\nci = {}\n",
            seq.camera.focal_px,
            seq.camera.baseline_m,
            seq.camera.principal_x,
            seq.camera.principal_y,
            seq.ci_mm
        ),
    )?;
    if !seq.accel.is_empty() {
        let mut w = csv::Writer::from_path(dir.join("accel.csv"))?;
        w.write_record(["t_ms", "sv_total", "ax", "ay", "az"]).map_err(Error::from)?;
        for s in &seq.accel {
            w.write_record([
                s.t_ms.to_string(),
                s.sv_total.to_string(),
                s.ax.to_string(),
                s.ay.to_string(),
                s.az.to_string(),
            ])
            .map_err(Error::from)?;
        }
        w.flush().map_err(Error::from)?;
    }
    Ok(())
}

fn synth(
    out_dir: &Path,
    scenario: &str,
    seed: u64,
    overhead: bool,
    no_accel: bool,
) -> Result<(), CliError> {
    let kind = scenario_from_name(scenario)?;
    let episode = if overhead {
        make_overhead_episode(kind, seed, !no_accel)?
    } else {
        make_episode(kind, seed, !no_accel)?
    };
    write_sequence(out_dir, &episode.seq)?;
    println!(
        "{} frames of `{}` ({}) -> {}",
        episode.seq.frames.len(),
        episode.name,
        if episode.fall { "fall" } else { "no fall" },
        out_dir.display()
    );
    Ok(())
}
