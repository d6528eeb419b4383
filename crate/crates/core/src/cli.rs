//! The `circle-ergodic` command line.
//!
//! Every subcommand reads JSON inputs, writes its artifacts and a
//! `manifest.json` into `--out-dir`, and prints a short summary. Exit codes:
//! 0 success, 1 a verification failed, 2 invalid input, 3 a resource cap.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classify::{self, birkhoff_gap, rotation_number, Label, RotationNumber, Target, WDiagnostics, WProtocol};
use crate::error::{Error, Result};
use crate::exact::{CirclePoint, Rational};
use crate::io::{load_json, save_json, write_csv, RunManifest};
use crate::measure::{CircleMeasure, CylinderSpec, Extension};
use crate::partition::ConsistentFamily;
use crate::pl::{Observable, PLCircleMap, DEFAULT_MAX_BREAKPOINTS};
use crate::sample;
use crate::shred::{self, ShredConfig, TrappingReport, Verification};
use crate::wicked::{self, word_labels, WickedPerturbation};

#[derive(Debug, Parser, Serialize)]
#[command(name = "circle-ergodic", version, about = "Exact constructions and diagnostics for circle maps")]
#[serde(rename_all = "camelCase")]
pub struct Cli {
    /// Seed for every random choice of the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value = "circle-ergodic-out")]
    #[serde(skip)]
    pub out_dir: PathBuf,
    /// Cap on breakpoints / pieces of composed maps and iterated measures.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_BREAKPOINTS)]
    pub max_breakpoints: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Command {
    /// Shred a map at scale eps and verify the trapping regions.
    Shred(ShredArgs),
    /// Re-verify a shredded map against its report.
    Verify(VerifyArgs),
    /// Perturb a conjugator so Cesàro push-forwards sit on a target measure.
    Wicked(WickedArgs),
    /// Push a measure forward.
    Pushforward(PushArgs),
    /// Cesàro average of push-forwards.
    Cesaro(CesaroArgs),
    /// Exact Birkhoff averages of one orbit.
    Birkhoff(BirkhoffArgs),
    /// Rotation number and basins of a homeomorphism.
    Rotation(RotationArgs),
    /// Finite-scale evidence for the five labels.
    Classify(ClassifyArgs),
    /// Built-in examples.
    Demo(DemoArgs),
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ShredArgs {
    pub map: PathBuf,
    #[arg(long)]
    pub eps: Rational,
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long)]
    pub subdivisions: Option<usize>,
    #[arg(long)]
    pub delta: Option<Rational>,
    /// Random perturbations within half the minimal slack checked for item i.
    #[arg(long, default_value_t = 3)]
    pub perturbations: usize,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyArgs {
    pub map: PathBuf,
    pub report: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtensionArg {
    Markov,
    Product,
}

impl From<ExtensionArg> for Extension {
    fn from(e: ExtensionArg) -> Self {
        match e {
            ExtensionArg::Markov => Extension::Markov,
            ExtensionArg::Product => Extension::Product,
        }
    }
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WickedArgs {
    pub homeo: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub ell: u32,
    /// Cylinder spec file.
    #[arg(long, conflicts_with = "preset")]
    pub target: Option<PathBuf>,
    /// `dirac`, `lebesgue` or `bernoulli:p0,p1,...`.
    #[arg(long)]
    pub preset: Option<String>,
    /// Level of a preset target.
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    #[arg(long)]
    pub eps: Rational,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = ExtensionArg::Markov)]
    pub extension: ExtensionArg,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PushArgs {
    pub map: PathBuf,
    pub measure: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub iters: usize,
    /// CDF samples in the plot CSV.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CesaroArgs {
    pub map: PathBuf,
    pub measure: PathBuf,
    #[arg(long)]
    pub n: usize,
    /// Alphabet and level of the cylinder trajectory.
    #[arg(long, default_value_t = 2)]
    pub ell: u32,
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BirkhoffArgs {
    pub map: PathBuf,
    #[arg(long)]
    pub x: Rational,
    /// Observable file; a tent at `--peak` otherwise.
    #[arg(long)]
    pub observable: Option<PathBuf>,
    #[arg(long, default_value = "0")]
    pub peak: Rational,
    #[arg(long, default_value = "1/8")]
    pub half_width: Rational,
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
    pub horizons: Vec<usize>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RotationArgs {
    pub map: PathBuf,
    #[arg(long, default_value_t = 16)]
    pub max_period: usize,
    /// Also write the basin decomposition.
    #[arg(long)]
    pub basins: bool,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassifyArgs {
    #[arg(required_unless_present = "conjugate")]
    pub map: Option<PathBuf>,
    /// Trapping report of a shredded map.
    #[arg(long, requires = "map")]
    pub report: Option<PathBuf>,
    /// Family file: classify `h'^{-1} E h'` through its conjugator.
    #[arg(long, conflicts_with = "map")]
    pub conjugate: Option<PathBuf>,
    #[command(flatten)]
    pub protocol: ProtocolArgs,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProtocolArgs {
    /// Protocol file; flags override its fields.
    #[arg(long)]
    pub protocol: Option<PathBuf>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub grid_offset: Option<Rational>,
    #[arg(long, value_delimiter = ',')]
    pub horizons: Option<Vec<usize>>,
    #[arg(long)]
    pub tents: Option<usize>,
    #[arg(long)]
    pub tent_half_width: Option<Rational>,
    #[arg(long)]
    pub tol: Option<Rational>,
    #[arg(long)]
    pub gap_threshold: Option<Rational>,
    #[arg(long)]
    pub max_period: Option<usize>,
    #[arg(long)]
    pub cylinder_ell: Option<u32>,
    #[arg(long)]
    pub cylinder_level: Option<usize>,
    /// Declared invariant target specs (repeatable).
    #[arg(long = "target")]
    pub targets: Vec<PathBuf>,
}

impl ProtocolArgs {
    fn resolve(&self) -> Result<WProtocol> {
        let mut p = match &self.protocol {
            Some(path) => load_json(path)?,
            None => WProtocol::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => {$(if let Some(v) = &self.$f { p.$f = v.clone(); })*};
        }
        set!(grid, grid_offset, horizons, tents, tent_half_width, tol, gap_threshold, max_period, cylinder_ell, cylinder_level);
        if !self.targets.is_empty() {
            p.targets = self.targets.iter().map(|t| load_json(t)).collect::<Result<_>>()?;
        }
        Ok(p)
    }
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
#[group(required = true, multiple = false)]
pub struct DemoArgs {
    /// Five cells, four subcells, two fixed cells: eight trapping regions.
    #[arg(long)]
    pub figure3: bool,
    /// Identity, ℓ = 2, Dirac target at level 3, ε = 1/4, n = 8.
    #[arg(long)]
    pub wicked: bool,
    /// A seeded random six-breakpoint map shredded at ε = 1/10.
    #[arg(long)]
    pub random: bool,
}

/// Output directory plus the list of files written so far.
struct Run {
    dir: PathBuf,
    outputs: Vec<String>,
}

impl Run {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Run { dir: dir.to_path_buf(), outputs: Vec::new() })
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        save_json(&self.dir.join(name), value)?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
        write_csv(&self.dir.join(name), header, rows)?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn finish(mut self, cli: &Cli, inputs: Vec<&Path>) -> Result<()> {
        let command = match &cli.command {
            Command::Shred(_) => "shred",
            Command::Verify(_) => "verify",
            Command::Wicked(_) => "wicked",
            Command::Pushforward(_) => "pushforward",
            Command::Cesaro(_) => "cesaro",
            Command::Birkhoff(_) => "birkhoff",
            Command::Rotation(_) => "rotation",
            Command::Classify(_) => "classify",
            Command::Demo(_) => "demo",
        };
        self.outputs.push("manifest.json".into());
        let manifest = RunManifest {
            command: command.into(),
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            parameters: serde_json::to_value(cli)?,
            seed: cli.seed,
            version: env!("CARGO_PKG_VERSION").into(),
            outputs: self.outputs.clone(),
        };
        save_json(&self.dir.join("manifest.json"), &manifest)
    }
}

/// Parses arguments, runs, and maps the outcome to an exit code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Runs one command; `Ok(false)` means a verification failed.
pub fn run(cli: &Cli) -> Result<bool> {
    let mut out = Run::new(&cli.out_dir)?;
    let cap = cli.max_breakpoints;
    let (ok, inputs): (bool, Vec<&Path>) = match &cli.command {
        Command::Shred(a) => {
            let f: PLCircleMap = load_json(&a.map)?;
            let cfg = ShredConfig { cells: a.cells, subdivisions: a.subdivisions, delta: a.delta.clone(), tau: None };
            (shred_and_report(&mut out, &f, &a.eps, &cfg, a.perturbations, cli.seed)?, vec![&a.map])
        }
        Command::Verify(a) => {
            let g: PLCircleMap = load_json(&a.map)?;
            let report: TrappingReport = load_json(&a.report)?;
            let v = shred::verify_shredding(&g, &report);
            print_items(&v);
            out.csv("verdicts.csv", &["item", "passed", "slack", "detail"], item_rows(&v))?;
            (v.all_passed(), vec![&a.map, &a.report])
        }
        Command::Wicked(a) => {
            let h: PLCircleMap = load_json(&a.homeo)?;
            let target = match (&a.target, &a.preset) {
                (Some(path), _) => load_json(path)?,
                (None, Some(p)) => preset_spec(p, a.ell, a.p)?,
                (None, None) => return Err(Error::InvalidInput("give --target or --preset".into())),
            };
            let wp = wicked::wicked_perturb(&h, a.ell, &target, a.extension.into(), &a.eps, a.n)?;
            let mut inputs = vec![a.homeo.as_path()];
            inputs.extend(a.target.as_deref());
            (wicked_and_report(&mut out, &h, &wp, &a.eps)?, inputs)
        }
        Command::Pushforward(a) => {
            let f: PLCircleMap = load_json(&a.map)?;
            let mu: CircleMeasure = load_json(&a.measure)?;
            let mut cur = mu.clone();
            for _ in 0..a.iters {
                cur = cur.pushforward(&f);
                check_pieces(&cur, cap)?;
            }
            println!("total mass {}", cur.total_mass());
            println!("atoms {} pieces {}", cur.atoms().len(), cur.raw_pieces().len());
            println!("equals input {}", cur == mu);
            out.json("measure.json", &cur)?;
            out.csv("cdf.csv", CDF_HEADER, cdf_rows(&cur, a.samples))?;
            (true, vec![&a.map, &a.measure])
        }
        Command::Cesaro(a) => {
            let f: PLCircleMap = load_json(&a.map)?;
            let mu: CircleMeasure = load_json(&a.measure)?;
            if a.n == 0 {
                return Err(Error::InvalidInput("n must be at least 1".into()));
            }
            let words = word_labels(a.ell, a.level);
            let mut acc = vec![Rational::zero(); words.len()];
            let mut sum = CircleMeasure::default();
            let mut cur = mu.clone();
            let mut rows = Vec::with_capacity(a.n);
            for k in 1..=a.n {
                if k > 1 {
                    cur = cur.pushforward(&f);
                    check_pieces(&cur, cap)?;
                }
                sum = sum.add(&cur);
                for (s, v) in acc.iter_mut().zip(cur.cylinder_vector(a.ell, a.level)?.values()) {
                    *s += v;
                }
                let w = Rational::from_integer(k as i64).recip();
                let mut row = vec![k.to_string()];
                row.extend(acc.iter().map(|s| (s * &w).to_string()));
                rows.push(row);
            }
            let avg = sum.scale(&Rational::from_integer(a.n as i64).recip());
            println!("cesaro n = {}: atoms {} pieces {}", a.n, avg.atoms().len(), avg.raw_pieces().len());
            out.json("cesaro.json", &avg)?;
            out.csv("cdf.csv", CDF_HEADER, cdf_rows(&avg, a.samples))?;
            let mut header = vec!["n".to_string()];
            header.extend(words.iter().map(|w| format!("w{w}")));
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            out.csv("trajectory.csv", &header, rows)?;
            (true, vec![&a.map, &a.measure])
        }
        Command::Birkhoff(a) => {
            let f: PLCircleMap = load_json(&a.map)?;
            let phi = match &a.observable {
                Some(p) => load_json(p)?,
                None => Observable::tent(&CirclePoint::from_lift(&a.peak), &a.half_width)?,
            };
            let x = CirclePoint::from_lift(&a.x);
            let rec = birkhoff_gap(&f, &x, &phi, &a.horizons)?;
            let rows: Vec<Vec<String>> = rec
                .horizons
                .iter()
                .zip(&rec.averages)
                .map(|(n, avg)| {
                    println!("n = {n}: average {avg}");
                    vec![n.to_string(), avg.to_string(), avg.to_f64().to_string()]
                })
                .collect();
            println!("gap {}", rec.gap);
            out.csv("birkhoff.csv", &["n", "average", "averageFloat"], rows)?;
            out.json("birkhoff.json", &rec)?;
            let mut inputs = vec![a.map.as_path()];
            inputs.extend(a.observable.as_deref());
            (true, inputs)
        }
        Command::Rotation(a) => {
            let h: PLCircleMap = load_json(&a.map)?;
            let rho = rotation_number(&h, a.max_period)?;
            match &rho {
                RotationNumber::Exact { value, period } => println!("rotation {value} period {period}"),
                RotationNumber::Bracket { lower, upper, iterations } => {
                    println!("rotation in ({lower}, {upper}) after {iterations} iterations")
                }
            }
            out.json("rotation.json", &rho)?;
            if a.basins {
                let d = classify::basin_decomposition(&h, a.max_period)?;
                for p in &d.physical {
                    let orbit: Vec<String> = p.orbit.iter().map(|x| x.value().to_string()).collect();
                    println!("physical measure on [{}], basin measure {}", orbit.join(", "), p.basin_measure);
                }
                println!("m(Per) {}", d.periodic_measure);
                out.json("basins.json", &d)?;
            }
            (true, vec![&a.map])
        }
        Command::Classify(a) => {
            let protocol = a.protocol.resolve()?;
            let mut inputs: Vec<&Path> = Vec::new();
            inputs.extend(a.map.as_deref());
            inputs.extend(a.report.as_deref());
            inputs.extend(a.conjugate.as_deref());
            inputs.extend(a.protocol.protocol.as_deref());
            inputs.extend(a.protocol.targets.iter().map(PathBuf::as_path));
            let diag = match (&a.conjugate, &a.map, &a.report) {
                (Some(fam), _, _) => {
                    let fam: ConsistentFamily = load_json(fam)?;
                    classify::classify(Target::Conjugate(&fam), &protocol)?
                }
                (None, Some(m), Some(r)) => {
                    let g: PLCircleMap = load_json(m)?;
                    let report: TrappingReport = load_json(r)?;
                    classify::classify(Target::Shredded { g: &g, report: &report }, &protocol)?
                }
                (None, Some(m), None) => {
                    let f: PLCircleMap = load_json(m)?;
                    classify::classify(Target::Map(&f), &protocol)?
                }
                (None, None, _) => return Err(Error::InvalidInput("give a map or --conjugate".into())),
            };
            write_diagnostics(&mut out, &diag)?;
            (true, inputs)
        }
        Command::Demo(a) => {
            let ok = if a.figure3 {
                let (f, eps, cfg) = shred::eight_region_example();
                out.json("map.json", &f)?;
                shred_and_report(&mut out, &f, &eps, &cfg, 0, cli.seed)?
            } else if a.wicked {
                let h = PLCircleMap::identity();
                let eps = Rational::new(1, 4);
                let target = CylinderSpec::dirac_zero(2, 3)?;
                let wp = wicked::wicked_perturb(&h, 2, &target, Extension::Markov, &eps, 8)?;
                wicked_and_report(&mut out, &h, &wp, &eps)?
            } else {
                let f = sample::pl_map(&mut sample::rng(cli.seed), 6, 1)?;
                out.json("map.json", &f)?;
                shred_and_report(&mut out, &f, &Rational::new(1, 10), &ShredConfig::default(), 3, cli.seed)?
            };
            (ok, Vec::new())
        }
    };
    out.finish(cli, inputs)?;
    Ok(ok)
}

const CDF_HEADER: &[&str] = &["x", "cdf", "xFloat", "cdfFloat"];

fn cdf_rows(mu: &CircleMeasure, samples: usize) -> Vec<Vec<String>> {
    mu.cdf_samples(samples)
        .into_iter()
        .map(|(x, c)| vec![x.to_string(), c.to_string(), x.to_f64().to_string(), c.to_f64().to_string()])
        .collect()
}

fn check_pieces(mu: &CircleMeasure, cap: usize) -> Result<()> {
    let size = mu.atoms().len() + mu.raw_pieces().len();
    if size > cap {
        return Err(Error::ResourceExhausted { what: "measure pieces", needed: size, cap });
    }
    Ok(())
}

/// `dirac`, `lebesgue` or `bernoulli:p0,p1,...` at level `p`.
pub fn preset_spec(name: &str, ell: u32, p: usize) -> Result<CylinderSpec> {
    match name.split_once(':') {
        None if name == "dirac" => CylinderSpec::dirac_zero(ell, p),
        None if name == "lebesgue" => CylinderSpec::lebesgue(ell, p),
        Some(("bernoulli", probs)) => {
            let probs: Vec<Rational> = probs.split(',').map(str::parse).collect::<Result<_>>()?;
            if probs.len() != ell as usize {
                return Err(Error::AlphabetMismatch(probs.len() as u32, ell));
            }
            CylinderSpec::bernoulli(&probs, p)
        }
        _ => Err(Error::InvalidInput(format!("unknown preset {name:?}"))),
    }
}

fn item_rows(v: &Verification) -> Vec<Vec<String>> {
    v.items
        .iter()
        .map(|i| {
            let slack = i.slack.as_ref().map(ToString::to_string).unwrap_or_default();
            vec![i.item.clone(), i.passed.to_string(), slack, i.detail.clone()]
        })
        .collect()
}

fn print_items(v: &Verification) {
    println!("{:<5} {:<7} {:<24} detail", "item", "passed", "slack");
    for i in &v.items {
        let slack = i.slack.as_ref().map(ToString::to_string).unwrap_or_else(|| "-".into());
        println!("{:<5} {:<7} {:<24} {}", i.item, if i.passed { "yes" } else { "NO" }, slack, i.detail);
    }
    if let Some(s) = v.min_slack() {
        println!("minimal slack {s}");
    }
}

fn shred_and_report(
    out: &mut Run,
    f: &PLCircleMap,
    eps: &Rational,
    cfg: &ShredConfig,
    perturbations: usize,
    seed: u64,
) -> Result<bool> {
    let (g, mut report) = shred::shred(f, eps, cfg)?;
    let v = shred::verify_shredding(&g, &report);
    println!("cells {} subcells per cell {} delta {}", report.cells.len(), report.subcells[0].len(), report.delta);
    println!("tau {:?} orbits {:?}", report.tau, report.orbits);
    println!("trapping regions {}", report.regions.len());
    println!("distance {} < eps {}: {}", report.distance, eps, &report.distance < eps);
    print_items(&v);
    let mut ok = v.all_passed();
    if let (true, Some(slack)) = (perturbations > 0, v.min_slack()) {
        let radius = slack / Rational::from_integer(2);
        let mut rng = sample::rng(seed);
        let mut rows = Vec::with_capacity(perturbations);
        for trial in 0..perturbations {
            let gp = sample::perturbation(&mut rng, &g, &radius, 4)?;
            let d = g.c0_distance(&gp);
            let item_i = shred::verify_shredding(&gp, &report).items.into_iter().next().expect("five items");
            ok &= item_i.passed;
            rows.push(vec![trial.to_string(), d.to_string(), radius.to_string(), item_i.passed.to_string()]);
        }
        let held = rows.iter().filter(|r| r[3] == "true").count();
        println!("item i under {perturbations} perturbations of size < {radius}: {held} held");
        out.csv("stability.csv", &["trial", "distance", "radius", "itemI"], rows)?;
    }
    out.csv("verdicts.csv", &["item", "passed", "slack", "detail"], item_rows(&v))?;
    report.verification = Some(v);
    out.json("shredded.json", &g)?;
    out.json("report.json", &report)?;
    Ok(ok)
}

fn wicked_and_report(out: &mut Run, h: &PLCircleMap, wp: &WickedPerturbation, eps: &Rational) -> Result<bool> {
    let rows = wp.window_rows()?;
    let exact = wp.window_exact()?;
    let d = wp.c0_distance(h);
    println!("n0 {} p {} n {} family depth {}", wp.n0, wp.p, wp.n, wp.family.depth());
    println!("distance {} < eps {}: {}", d, eps, &d < eps);
    println!("window k = {}..{} exact: {}", wp.n0, wp.n - 1, exact);
    out.csv(
        "window.csv",
        &["k", "distance", "cesaroDistance", "cesaroDistanceFloat"],
        rows.iter()
            .map(|r| {
                vec![r.k.to_string(), r.distance.to_string(), r.cesaro_distance.to_string(), r.cesaro_distance.to_f64().to_string()]
            })
            .collect(),
    )?;
    out.json("family.json", &wp.family)?;
    out.json("target.json", &wp.target)?;
    if let Some(hp) = wp.conjugator() {
        out.json("conjugator.json", &hp)?;
    }
    Ok(exact && &d < eps)
}

fn write_diagnostics(out: &mut Run, diag: &WDiagnostics) -> Result<()> {
    println!("{:<10} {:<13} evidence", "label", "status");
    for label in Label::ALL {
        let v = diag.verdict(label);
        let ev: Vec<String> = v.evidence.iter().map(|(k, val)| format!("{k}={val}")).collect();
        println!("{:<10} {:<13} {}", label.to_string(), v.status.to_string(), ev.join(" "));
    }
    let rows = diag
        .verdicts
        .iter()
        .map(|v| {
            let ev: Vec<String> = v.evidence.iter().map(|(k, val)| format!("{k}={val}")).collect();
            vec![v.label.to_string(), v.status.to_string(), ev.join(";")]
        })
        .collect();
    out.csv("verdicts.csv", &["label", "status", "evidence"], rows)?;
    let gaps = diag
        .grid
        .iter()
        .map(|p| {
            let cycle = p.cycle.map(|c| c.to_string()).unwrap_or_default();
            vec![p.x.to_string(), p.gap.to_string(), p.gap.to_f64().to_string(), p.snapped.to_string(), cycle]
        })
        .collect();
    out.csv("gaps.csv", &["x", "gap", "gapFloat", "snapped", "cycle"], gaps)?;
    let mut header = vec!["horizon".to_string()];
    header.extend(diag.target_names.iter().cloned());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let cesaro = diag
        .cesaro
        .iter()
        .map(|r| {
            let mut row = vec![r.horizon.to_string()];
            row.extend(r.distances.iter().map(ToString::to_string));
            row
        })
        .collect();
    out.csv("cesaro.csv", &header, cesaro)?;
    out.json("diagnostics.json", diag)
}
