//! Command execution, output bookkeeping and manifests.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use spdiq::harness::measure::{measure_source, prepare_csfs, system_config};
use spdiq::harness::{
    benchmark, calibrate_rows, run_variant_sweep, score_curves, sha256_file, synthetic_ratings, FileDigest,
    HarnessError, Manifest, MeasuredCurves, RatingRow, RatingsTable, RunConfig, ScoreRow,
};
use spdiq::imgcore::io::{read_raster, read_sqmraw, write_sqmraw};
use spdiq::imgcore::{ColorEncoding, PlanarImage};
use spdiq::metrics::MetricKind;
use spdiq::simulator::{
    derive_seed, generate_dead_leaves, generate_replicates, generate_scene, generate_uniform_patch, PipelineKind, Stage,
};
use spdiq::spectral::{
    curve_from_json, curve_to_json, measure_nps, read_curve_csv, write_curve_csv, NpsVariant, Provenance, ReplicateSet,
    Spectrum1D, TargetKind,
};
use spdiq::sysperf::{
    measure_mtf, neq, output_power_spectrum, signal_power_spectrum, MtfCurve, MtfVariant, SpectraPair,
};
use spdiq::vision::CsfKind;

use crate::{
    BenchArgs, CalibrateArgs, Cli, Command, EncodingArg, Format, MakeTargetArgs, MeasureArgs, ScoreArgs, SimulateArgs,
    SweepArgs, TargetArg,
};

const DEFAULT_OUT_DIR: &str = "out";
const REPLAY_DIR: &str = "replay";

/// Tracks every file a command reads and writes.
struct Ctx {
    out_dir: PathBuf,
    format: Format,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
}

impl Ctx {
    fn input(&mut self, path: &Path) -> Result<(), HarnessError> {
        let label = path.display().to_string();
        if !self.inputs.iter().any(|d| d.path == label) {
            self.inputs.push(FileDigest::of(path, label)?);
        }
        Ok(())
    }

    fn output_path(&self, rel: &str) -> Result<PathBuf, HarnessError> {
        let p = self.out_dir.join(rel);
        if let Some(parent) = p.parent() {
            std::fs::create_dir_all(parent)?;
        }
        Ok(p)
    }

    fn record(&mut self, rel: String) -> Result<(), HarnessError> {
        let d = FileDigest::of(&self.out_dir.join(&rel), rel)?;
        self.outputs.retain(|o| o.path != d.path);
        self.outputs.push(d);
        Ok(())
    }

    fn write_rows<T: Serialize>(&mut self, stem: &str, rows: &[T]) -> Result<(), HarnessError> {
        let rel = format!("{stem}.{}", self.format.ext());
        let path = self.output_path(&rel)?;
        match self.format {
            Format::Csv => {
                let mut w = csv::Writer::from_path(&path)?;
                for r in rows {
                    w.serialize(r)?;
                }
                w.flush()?;
            }
            Format::Json => std::fs::write(&path, serde_json::to_string_pretty(rows)? + "\n")?,
        }
        self.record(rel)
    }

    fn write_curve(&mut self, stem: &str, s: &Spectrum1D, mu_a: Option<f64>) -> Result<(), HarnessError> {
        let rel = format!("{stem}.{}", self.format.ext());
        let path = self.output_path(&rel)?;
        match self.format {
            Format::Csv => write_curve_csv(std::fs::File::create(&path)?, s, mu_a)?,
            Format::Json => std::fs::write(&path, curve_to_json(s, mu_a)? + "\n")?,
        }
        self.record(rel)
    }

    fn write_image(&mut self, rel: &str, img: &PlanarImage) -> Result<(), HarnessError> {
        write_sqmraw(img, &self.output_path(rel)?)?;
        self.record(rel.to_string())
    }

    fn read_image(&mut self, path: &Path) -> Result<PlanarImage, HarnessError> {
        self.input(path)?;
        Ok(read_sqmraw(path)?)
    }

    fn read_rows<T: DeserializeOwned>(&mut self, path: &Path) -> Result<Vec<T>, HarnessError> {
        self.input(path)?;
        if is_json(path) {
            let text = std::fs::read_to_string(path)?;
            Ok(serde_json::from_str(&text)?)
        } else {
            let mut rdr = csv::Reader::from_path(path)?;
            Ok(rdr.deserialize().collect::<Result<Vec<T>, _>>()?)
        }
    }

    fn read_curve(&mut self, dir: &Path, stem: &str) -> Result<(Spectrum1D, Option<f64>), HarnessError> {
        let path = find_stem(dir, stem)?;
        self.input(&path)?;
        if is_json(&path) {
            Ok(curve_from_json(&std::fs::read_to_string(&path)?)?)
        } else {
            Ok(read_curve_csv(std::fs::File::open(&path)?)?)
        }
    }

    fn read_ratings(&mut self, path: &Path) -> Result<RatingsTable, HarnessError> {
        let rows: Vec<RatingRow> = self.read_rows(path)?;
        RatingsTable::new(rows)
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// `dir/stem.csv` or `dir/stem.json`, whichever exists.
fn find_stem(dir: &Path, stem: &str) -> Result<PathBuf, HarnessError> {
    for ext in ["csv", "json"] {
        let p = dir.join(format!("{stem}.{ext}"));
        if p.is_file() {
            return Ok(p);
        }
    }
    Err(HarnessError::Data(format!(
        "no {stem}.csv or {stem}.json in {}",
        dir.display()
    )))
}

fn absolute(p: &mut PathBuf) -> Result<(), HarnessError> {
    *p = std::fs::canonicalize(&*p).map_err(|e| HarnessError::Data(format!("{}: {e}", p.display())))?;
    Ok(())
}

/// Makes every path argument absolute so a manifest can be replayed from anywhere.
fn absolutize(cmd: &mut Command) -> Result<(), HarnessError> {
    match cmd {
        Command::MakeTarget(_) | Command::Replay(_) => {}
        Command::Simulate(a) => {
            if let Some(p) = a.input.as_mut() {
                absolute(p)?;
            }
        }
        Command::Measure(a) => {
            absolute(&mut a.replicates)?;
            if let Some(p) = a.noise.as_mut() {
                absolute(p)?;
            }
        }
        Command::Score(a) => absolute(&mut a.curves)?,
        Command::Calibrate(a) => {
            absolute(&mut a.scores)?;
            if let Some(p) = a.ratings.as_mut() {
                absolute(p)?;
            }
        }
        Command::Sweep(a) => {
            if let Some(p) = a.ratings.as_mut() {
                absolute(p)?;
            }
        }
        Command::Bench(a) => {
            absolute(&mut a.scores)?;
            absolute(&mut a.ratings)?;
        }
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), HarnessError> {
    if let Command::Replay(a) = &cli.command {
        return replay(&a.manifest, cli.out_dir.as_deref());
    }
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(mode) = cli.calibration {
        cfg.calibration.mode = mode;
    }
    cfg.validate()?;
    let mut command = cli.command;
    absolutize(&mut command)?;
    let out_dir = cli.out_dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let m = execute(&command, &cfg, cli.format, &out_dir)?;
    println!(
        "{}: wrote {} files to {}",
        m.command,
        m.outputs.len() + 1,
        out_dir.display()
    );
    Ok(())
}

fn execute(command: &Command, cfg: &RunConfig, format: Format, out_dir: &Path) -> Result<Manifest, HarnessError> {
    std::fs::create_dir_all(out_dir)?;
    let mut ctx = Ctx {
        out_dir: out_dir.to_path_buf(),
        format,
        inputs: Vec::new(),
        outputs: Vec::new(),
    };
    match command {
        Command::MakeTarget(a) => make_target(a, cfg, &mut ctx)?,
        Command::Simulate(a) => simulate(a, cfg, &mut ctx)?,
        Command::Measure(a) => measure(a, cfg, &mut ctx)?,
        Command::Score(a) => score(a, cfg, &mut ctx)?,
        Command::Calibrate(a) => calibrate(a, cfg, &mut ctx)?,
        Command::Sweep(a) => sweep(a, cfg, &mut ctx)?,
        Command::Bench(a) => bench(a, &mut ctx)?,
        Command::Replay(_) => return Err(HarnessError::Config("replay cannot be nested".into())),
    }
    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.name().to_string(),
        args: serde_json::to_value(command)?,
        seed: cfg.seed,
        format: format.ext().to_string(),
        config: cfg.to_toml_string()?,
        config_hash: cfg.hash()?,
        inputs: ctx.inputs,
        outputs: ctx.outputs,
    };
    manifest.write(out_dir)?;
    Ok(manifest)
}

fn replay(manifest_path: &Path, out_dir: Option<&Path>) -> Result<(), HarnessError> {
    let recorded = Manifest::read(manifest_path)?;
    let cfg = RunConfig::from_toml_str(&recorded.config)?;
    if cfg.hash()? != recorded.config_hash {
        return Err(HarnessError::Data(
            "manifest configuration does not match its hash".into(),
        ));
    }
    let command: Command = serde_json::from_value(recorded.args.clone())
        .map_err(|e| HarnessError::Data(format!("manifest arguments: {e}")))?;
    let format = match recorded.format.as_str() {
        "csv" => Format::Csv,
        "json" => Format::Json,
        f => return Err(HarnessError::Data(format!("unknown format {f:?} in manifest"))),
    };
    for input in &recorded.inputs {
        if sha256_file(Path::new(&input.path))? != input.sha256 {
            return Err(HarnessError::Data(format!(
                "input {} changed since the recorded run",
                input.path
            )));
        }
    }
    let dir = match out_dir {
        Some(d) => d.to_path_buf(),
        None => manifest_path.parent().unwrap_or(Path::new(".")).join(REPLAY_DIR),
    };
    let fresh = execute(&command, &cfg, format, &dir)?;
    let mut bad = recorded.mismatched_outputs(&dir)?;
    for o in &fresh.outputs {
        if !recorded.outputs.iter().any(|r| r.path == o.path) {
            bad.push(o.path.clone());
        }
    }
    if !bad.is_empty() {
        return Err(HarnessError::Data(format!(
            "replayed outputs differ: {}",
            bad.join(", ")
        )));
    }
    println!(
        "replay {}: {} outputs identical in {}",
        recorded.command,
        recorded.outputs.len(),
        dir.display()
    );
    Ok(())
}

fn make_target(a: &MakeTargetArgs, cfg: &RunConfig, ctx: &mut Ctx) -> Result<(), HarnessError> {
    let size = a.size.unwrap_or(cfg.sweep.size);
    let img = match a.kind {
        TargetArg::DeadLeaves => {
            let mut p = cfg.dead_leaves.clone();
            p.seed = derive_seed(cfg.seed, "dead-leaves");
            generate_dead_leaves(&p, size, size)?
        }
        TargetArg::Uniform => generate_uniform_patch(a.level.unwrap_or(cfg.sweep.uniform_level), size, size)?,
    };
    ctx.write_image("target.sqmraw", &img)?;
    ctx.write_curve("target_ps", &signal_power_spectrum(&img, &cfg.measurement)?, None)
}

/// One row of the replicate index written by `simulate`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ReplicateEntry {
    stage: Stage,
    replicate: usize,
    file: String,
    target: TargetKind,
    scene_id: String,
    pipeline: PipelineKind,
    snr: f64,
    seed: u64,
    mean: f64,
    std: f64,
}

fn load_scene(
    a: &SimulateArgs,
    cfg: &RunConfig,
    ctx: &mut Ctx,
) -> Result<(PlanarImage, String, TargetKind), HarnessError> {
    if let Some(kind) = a.scene_kind {
        let size = a.size.unwrap_or(cfg.sweep.size);
        let img = generate_scene(kind, size, size, derive_seed(cfg.seed, &format!("scene/{kind}")))?;
        let id = a.scene_id.clone().unwrap_or_else(|| kind.to_string());
        return Ok((img, id, TargetKind::Pictorial));
    }
    let path = a
        .input
        .as_deref()
        .ok_or_else(|| HarnessError::Config("simulate needs --input or --scene-kind".into()))?;
    ctx.input(path)?;
    let encoding = match a.encoding {
        EncodingArg::Srgb => ColorEncoding::Srgb,
        EncodingArg::Linear => ColorEncoding::Linear,
    };
    let mut img = read_raster(path, encoding)?.linearized();
    if img.channels() == 1 {
        let p = img.plane(0).to_vec();
        img = PlanarImage::from_planes(img.width(), img.height(), vec![p.clone(), p.clone(), p])?;
    }
    let id = match &a.scene_id {
        Some(s) => s.clone(),
        None => path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scene".into()),
    };
    Ok((img, id, a.input_kind.into()))
}

fn simulate(a: &SimulateArgs, cfg: &RunConfig, ctx: &mut Ctx) -> Result<(), HarnessError> {
    let (scene, id, target) = load_scene(a, cfg, ctx)?;
    let snr = a.snr.unwrap_or(cfg.pipeline.snr);
    let sys = system_config(cfg, a.pipeline, snr, &id);
    let n = a.replicates.unwrap_or(cfg.sweep.replicates);
    let reps = generate_replicates(&scene, &sys, n, target, &id)?;
    ctx.write_image("scene.sqmraw", &scene)?;
    let mut index = Vec::new();
    for (stage, set) in &reps.sets {
        for (i, r) in set.replicates().iter().enumerate() {
            let file = format!("{stage}/rep_{i:02}.sqmraw");
            ctx.write_image(&file, r)?;
            index.push(ReplicateEntry {
                stage: *stage,
                replicate: i,
                file,
                target,
                scene_id: id.clone(),
                pipeline: a.pipeline,
                snr,
                seed: sys.seed,
                mean: r.mean(),
                std: r.variance().sqrt(),
            });
        }
    }
    ctx.write_rows("replicates", &index)
}

fn load_replicates(ctx: &mut Ctx, dir: &Path, stage: Stage) -> Result<(ReplicateSet, ReplicateEntry), HarnessError> {
    let index: Vec<ReplicateEntry> = ctx.read_rows(&find_stem(dir, "replicates")?)?;
    let entries: Vec<ReplicateEntry> = index.into_iter().filter(|e| e.stage == stage).collect();
    let first = entries
        .first()
        .cloned()
        .ok_or_else(|| HarnessError::Data(format!("no {stage} replicates in {}", dir.display())))?;
    let images = entries
        .iter()
        .map(|e| ctx.read_image(&dir.join(&e.file)))
        .collect::<Result<Vec<_>, _>>()?;
    let provenance = Provenance {
        target: first.target,
        scene_id: first.scene_id.clone(),
        pipeline_id: format!("{}/snr{}", first.pipeline, first.snr),
        snr: first.snr,
    };
    Ok((ReplicateSet::new(images, provenance)?, first))
}

fn nps_variant_of(target: TargetKind) -> NpsVariant {
    match target {
        TargetKind::Uniform => NpsVariant::UniformPatch,
        TargetKind::DeadLeaves => NpsVariant::DeadLeavesSpd,
        TargetKind::Pictorial => NpsVariant::PictorialSpd,
    }
}

/// Summary row written by `measure` and read back by `score`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct MeasureSummary {
    target: TargetKind,
    scene_id: String,
    pipeline: PipelineKind,
    snr: f64,
    stage: Stage,
    nps_variant: NpsVariant,
    /// Empty for uniform targets, which have no signal to transfer.
    mtf_variant: Option<MtfVariant>,
    mu_a: f64,
    mtf_clamped_bins: usize,
    neq_excluded_bins: usize,
    replicates: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct OmegaRow {
    csf: CsfKind,
    omega: f64,
}

fn measure(a: &MeasureArgs, cfg: &RunConfig, ctx: &mut Ctx) -> Result<(), HarnessError> {
    let (set, info) = load_replicates(ctx, &a.replicates, a.stage)?;
    let noise_set = match &a.noise {
        Some(dir) => {
            let (ns, ni) = load_replicates(ctx, dir, a.stage)?;
            if ni.target != TargetKind::Uniform {
                return Err(HarnessError::Config(format!(
                    "--noise must hold uniform replicates, got {}",
                    ni.target.as_str()
                )));
            }
            Some(ns)
        }
        None => None,
    };
    let noise_source = noise_set.as_ref().unwrap_or(&set);
    let nps_variant = nps_variant_of(noise_source.provenance.target);
    let csfs = prepare_csfs(&cfg.variants.csf, &cfg.viewing)?;
    let src = measure_source(noise_source, nps_variant, cfg, &csfs, true)?;
    let mu_a = set.mean_signal()?;
    ctx.write_curve("nps", &src.nps, None)?;
    let omega: Vec<OmegaRow> = src.omega.iter().map(|&(csf, omega)| OmegaRow { csf, omega }).collect();
    ctx.write_rows("omega", &omega)?;

    let mut summary = MeasureSummary {
        target: info.target,
        scene_id: info.scene_id.clone(),
        pipeline: info.pipeline,
        snr: info.snr,
        stage: a.stage,
        nps_variant,
        mtf_variant: None,
        mu_a,
        mtf_clamped_bins: 0,
        neq_excluded_bins: 0,
        replicates: set.len(),
    };
    if info.target != TargetKind::Uniform {
        let scene = ctx.read_image(&a.replicates.join("scene.sqmraw"))?;
        let input_ps = signal_power_spectrum(&scene, &cfg.measurement)?;
        let output_ps = output_power_spectrum(&set, &cfg.measurement)?;
        let nps = match &noise_set {
            Some(_) => src.nps.clone(),
            None => measure_nps(&set, nps_variant, &cfg.measurement)?,
        };
        let pair = SpectraPair::new(
            input_ps.clone(),
            output_ps.clone(),
            nps.clone(),
            info.target,
            nps_variant,
        )?;
        let mtf = measure_mtf(&pair)?;
        let neq_curve = neq(&mtf, &nps, mu_a)?;
        ctx.write_curve("input_ps", &input_ps, None)?;
        ctx.write_curve("output_ps", &output_ps, None)?;
        ctx.write_curve("mtf", &mtf.spectrum, None)?;
        ctx.write_curve("neq", &neq_curve.spectrum, Some(mu_a))?;
        summary.mtf_variant = Some(mtf.variant);
        summary.mtf_clamped_bins = mtf.clamp_count;
        summary.neq_excluded_bins = neq_curve.excluded.len();
    }
    ctx.write_rows("measurement", &[summary])
}

/// One metric evaluation written by `score`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct CurveScore {
    scene_id: String,
    pipeline: PipelineKind,
    snr: f64,
    stage: Stage,
    metric: MetricKind,
    nps_variant: NpsVariant,
    mtf_variant: MtfVariant,
    csf: String,
    raw: f64,
    config_hash: String,
}

fn score(a: &ScoreArgs, cfg: &RunConfig, ctx: &mut Ctx) -> Result<(), HarnessError> {
    let dir = &a.curves;
    let summary: MeasureSummary = ctx
        .read_rows::<MeasureSummary>(&find_stem(dir, "measurement")?)?
        .into_iter()
        .next()
        .ok_or_else(|| HarnessError::Data(format!("empty measurement summary in {}", dir.display())))?;
    let mtf_variant = summary.mtf_variant.ok_or_else(|| {
        HarnessError::Data(format!(
            "{} has no MTF; measure a dead-leaves or pictorial target",
            dir.display()
        ))
    })?;
    let (nps, _) = ctx.read_curve(dir, "nps")?;
    let (mtf_spectrum, _) = ctx.read_curve(dir, "mtf")?;
    let (input_ps, _) = ctx.read_curve(dir, "input_ps")?;
    let omega: Vec<OmegaRow> = ctx.read_rows(&find_stem(dir, "omega")?)?;
    let mtf = MtfCurve::new(mtf_spectrum, mtf_variant, summary.mtf_clamped_bins)?;
    let csfs = prepare_csfs(&cfg.variants.csf, &cfg.viewing)?;
    let hash = cfg.hash()?;
    let mut rows = Vec::new();
    for &metric in &cfg.variants.metrics {
        let choices: Vec<Option<usize>> = if metric.uses_csf() {
            (0..csfs.len()).map(Some).collect()
        } else {
            vec![None]
        };
        for choice in choices {
            let csf = choice.map(|i| &csfs[i]);
            let curves = MeasuredCurves {
                input_ps: &input_ps,
                mtf: &mtf,
                nps: &nps,
                mu_a: summary.mu_a,
                omega: csf.and_then(|c| omega.iter().find(|o| o.csf == c.kind).map(|o| o.omega)),
            };
            let s = score_curves(metric, csf, &curves, cfg)?;
            rows.push(CurveScore {
                scene_id: summary.scene_id.clone(),
                pipeline: summary.pipeline,
                snr: summary.snr,
                stage: summary.stage,
                metric,
                nps_variant: summary.nps_variant,
                mtf_variant,
                csf: csf.map_or("none", |c| c.kind.as_str()).to_string(),
                raw: s.raw,
                config_hash: hash.clone(),
            });
        }
    }
    ctx.write_rows("scores", &rows)
}

fn calibrate(a: &CalibrateArgs, cfg: &RunConfig, ctx: &mut Ctx) -> Result<(), HarnessError> {
    let mut rows: Vec<ScoreRow> = ctx.read_rows(&a.scores)?;
    let ratings = a.ratings.as_deref().map(|p| ctx.read_ratings(p)).transpose()?;
    let hash = cfg.hash()?;
    rows.iter_mut().for_each(|r| r.config_hash = hash.clone());
    let (rows, cal, skipped) = calibrate_rows(rows, cfg, ratings.as_ref())?;
    ctx.write_rows("scores", &rows)?;
    ctx.write_rows("calibration", &cal)?;
    ctx.write_rows("skipped", &skipped)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ImageRow {
    image_id: String,
    scene_id: String,
    pipeline: PipelineKind,
    snr: f64,
}

fn sweep(a: &SweepArgs, cfg: &RunConfig, ctx: &mut Ctx) -> Result<(), HarnessError> {
    let given = a.ratings.as_deref().map(|p| ctx.read_ratings(p)).transpose()?;
    let mut result = run_variant_sweep(cfg, given.as_ref())?;
    let images: Vec<ImageRow> = result
        .images
        .iter()
        .map(|k| ImageRow {
            image_id: k.image_id(),
            scene_id: k.scene_id.clone(),
            pipeline: k.pipeline,
            snr: k.snr(),
        })
        .collect();
    let mut ratings = given;
    if a.synthetic_ratings {
        let t = synthetic_ratings(
            &result.images,
            &cfg.sweep.stages,
            &cfg.ratings,
            derive_seed(cfg.seed, "ratings"),
        )?;
        let (rows, cal, skipped) = calibrate_rows(std::mem::take(&mut result.rows), cfg, Some(&t))?;
        result.rows = rows;
        result.calibrations = cal;
        result.skipped.retain(|s| !s.reason.starts_with("calibration"));
        result.skipped.extend(skipped);
        result.report = Some(benchmark(&result.rows, &t)?);
        ctx.write_rows("ratings", t.rows())?;
        ratings = Some(t);
    }
    ctx.write_rows("scores", &result.rows)?;
    ctx.write_rows("calibration", &result.calibrations)?;
    ctx.write_rows("skipped", &result.skipped)?;
    ctx.write_rows("images", &images)?;
    if let (Some(report), Some(_)) = (&result.report, &ratings) {
        ctx.write_rows("report", &report.entries)?;
    }
    println!(
        "sweep: {} rows, {} calibrations, {} skipped",
        result.rows.len(),
        result.calibrations.len(),
        result.skipped.len()
    );
    Ok(())
}

fn bench(a: &BenchArgs, ctx: &mut Ctx) -> Result<(), HarnessError> {
    let rows: Vec<ScoreRow> = ctx.read_rows(&a.scores)?;
    let ratings = ctx.read_ratings(&a.ratings)?;
    let report = benchmark(&rows, &ratings)?;
    ctx.write_rows("report", &report.entries)
}
