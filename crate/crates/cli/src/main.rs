use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use sidewise::experiments::{
    admissible_sweep, full_study, glancing_sweep, invisibility_sweep, observability_quotient, DecayTable,
    ExperimentError, Lab, OutputFormat, Scenario, SourcePlan,
};
use sidewise::geometry::BoundaryChart;
use sidewise::harness::{self, decay_plot, energy_plot, ray_plot, to_csv, to_json, write_output, HarnessError};
use sidewise::rayflow::{trace, write_path, RayContext};
use sidewise::sgcc::{sample_initials, SamplingSpec};
use sidewise::symbols::{classify, fiber_count, BoundaryCovector};

#[derive(Parser)]
#[command(
    name = "sidewise",
    version,
    about = "Rays, sidewise control checks and boundary-source experiments for the wave equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Embedded scenario: annulus, disc or pocket. Default: annulus.
    #[arg(long, global = true, conflicts_with = "scenario")]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps and ray batches.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Table format; overrides the scenario.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Trace rays from the source neighborhood and draw them.
    Rays {
        #[arg(long, default_value_t = 8)]
        points: usize,
        #[arg(long, default_value_t = 5)]
        angles: usize,
    },
    /// Classify boundary covectors on the source and measurement arcs.
    Classify {
        #[arg(long, default_value_t = 8)]
        points: usize,
        #[arg(long, default_value_t = 9)]
        directions: usize,
    },
    /// Check the sidewise geometric control condition.
    Sgcc {
        /// Exit with status 3 unless the condition is verified.
        #[arg(long)]
        gate: bool,
    },
    /// Run the solver with one admissible source and write its trace.
    Wave {
        #[arg(long, default_value_t = 0)]
        source: usize,
    },
    /// Observability quotient of one admissible source.
    Observe {
        #[arg(long, default_value_t = 0)]
        source: usize,
    },
    SweepAdmissible,
    SweepInvisible {
        /// Also run the glancing sequence.
        #[arg(long)]
        glancing: bool,
    },
    /// Concavity, SGCC and both sweeps in one report.
    Study,
}

enum Failure {
    Config(String),
    Compute(String),
    Negative(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Write { .. } | HarnessError::Serialize(_) => Failure::Compute(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Compute(e.to_string())
        }
    }
}

fn compute<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Compute(e.to_string())
}

struct Ctx {
    scenario: Scenario,
    out: PathBuf,
    format: OutputFormat,
}

impl Ctx {
    fn write(&self, name: &str, contents: &[u8]) -> Result<(), Failure> {
        let path = write_output(&self.out, name, contents)?;
        println!("wrote {}", path.display());
        Ok(())
    }

    fn figures(&self) -> bool {
        self.scenario.output.figures
    }
}

fn load(cli: &Cli) -> Result<Ctx, Failure> {
    let mut scenario = match (&cli.scenario, &cli.preset) {
        (Some(path), _) => harness::load_scenario(path)?,
        (None, Some(name)) => harness::preset(name)?,
        (None, None) => harness::preset("annulus")?,
    };
    if let Some(seed) = cli.seed {
        scenario.seed = seed;
    }
    let format = match cli.format {
        Some(Format::Json) => OutputFormat::Json,
        Some(Format::Csv) => OutputFormat::Csv,
        None => scenario.output.format,
    };
    Ok(Ctx {
        scenario,
        out: cli.out.clone(),
        format,
    })
}

fn admissible_plan(lab: &Lab, index: usize) -> Result<SourcePlan, Failure> {
    let profiles = &lab.scenario.source.admissible.profiles;
    profiles
        .get(index)
        .map(|p| SourcePlan::Admissible(p.clone()))
        .ok_or_else(|| Failure::Config(format!("source {index} out of range ({} profiles)", profiles.len())))
}

fn decay_csv(table: &DecayTable) -> Vec<u8> {
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                r.j.map_or(String::new(), |j| j.to_string()),
                r.norm.to_string(),
                r.trace.to_string(),
                r.quotient.to_string(),
                format!("{}x{}", r.cells[0], r.cells[1]),
                r.in_cone_fraction.to_string(),
            ]
        })
        .collect();
    to_csv(
        &["k", "j", "norm", "trace", "quotient", "cells", "in_cone_fraction"],
        &rows,
    )
}

fn rays(ctx: &Ctx, points: usize, angles: usize) -> Result<(), Failure> {
    let lab = Lab::new(&ctx.scenario)?;
    let sampling = SamplingSpec {
        n_s: points,
        n_angle: angles,
        both_lifts: false,
        ..Default::default()
    };
    let origins = sample_initials(&lab.neighborhood, &sampling).map_err(compute)?;
    let rctx = RayContext::new(&lab.domain, &lab.scenario.metric, lab.scenario.tolerances.rays.clone());
    let watch = [lab.source.clone(), lab.measurement.clone()];
    let paths: Vec<_> = origins
        .iter()
        .flat_map(|o| o.initials(&lab.domain, &lab.scenario.metric, false))
        .map(|init| trace(&rctx, &init, lab.scenario.times.observation, &watch))
        .collect();
    let mut text = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        text.extend_from_slice(format!("# ray {i}\n").as_bytes());
        write_path(p, &mut text).map_err(compute)?;
    }
    ctx.write("rays.txt", &text)?;
    let refs: Vec<_> = paths.iter().collect();
    ctx.write(
        "rays.svg",
        ray_plot(&lab.domain, &[&lab.source, &lab.measurement], &refs).as_bytes(),
    )
}

fn classify_table(ctx: &Ctx, points: usize, directions: usize) -> Result<(), Failure> {
    let lab = Lab::new(&ctx.scenario)?;
    let metric = &lab.scenario.metric;
    let tol = lab.scenario.tolerances.rays.glancing;
    let mut rows = Vec::new();
    for region in [&lab.source, &lab.measurement] {
        let l = region.curve_length();
        for &(a, len) in region.intervals() {
            for i in 0..points {
                let s = (a + len.min(l) * (i as f64 + 0.5) / points as f64).rem_euclid(l);
                let h0 = BoundaryChart::new(&lab.domain, metric, region.curve, s).h0;
                for d in 0..directions {
                    // Tangential components from -1.5 to 1.5 times the glancing value.
                    let u = -1.5 + 3.0 * d as f64 / (directions.max(2) - 1) as f64;
                    let b = BoundaryCovector::new(region.curve, s, 0.0, 1.0, u / h0.sqrt());
                    let c = classify(&b, &lab.domain, metric, tol).map_err(compute)?;
                    let n = fiber_count(&b, &lab.domain, metric, tol).map_err(compute)?;
                    rows.push(json!({
                        "region": region.label.to_string(),
                        "curve": region.curve,
                        "s": s,
                        "tau": 1.0,
                        "xi_s": b.xi_s,
                        "r0": c.r0,
                        "dn_r": c.dn_r,
                        "class": format!("{:?}", c.class),
                        "fiber_count": n,
                    }));
                }
            }
        }
    }
    match ctx.format {
        OutputFormat::Json => ctx.write("classify.json", &to_json(&rows)?),
        OutputFormat::Csv => {
            let keys = [
                "region",
                "curve",
                "s",
                "tau",
                "xi_s",
                "r0",
                "dn_r",
                "class",
                "fiber_count",
            ];
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    keys.iter()
                        .map(|k| match &r[*k] {
                            serde_json::Value::String(s) => s.clone(),
                            serde_json::Value::Null => String::new(),
                            v => v.to_string(),
                        })
                        .collect()
                })
                .collect();
            ctx.write("classify.csv", &to_csv(&keys, &table))
        }
    }
}

fn sgcc(ctx: &Ctx, gate: bool) -> Result<(), Failure> {
    let lab = Lab::new(&ctx.scenario)?;
    let verdict = lab.sgcc()?;
    ctx.write("sgcc.json", &to_json(&verdict)?)?;
    if let Some(path) = verdict.violations.iter().find_map(|v| v.path.as_ref()) {
        let mut text = Vec::new();
        write_path(path, &mut text).map_err(compute)?;
        ctx.write("certificate.txt", &text)?;
        if ctx.figures() {
            ctx.write(
                "certificate.svg",
                ray_plot(&lab.domain, &[&lab.source, &lab.measurement], &[path]).as_bytes(),
            )?;
        }
    }
    let status = serde_json::to_value(verdict.status).map_err(compute)?;
    let status = status.as_str().unwrap_or_default();
    println!("{status}");
    if gate && !verdict.is_verified() {
        return Err(Failure::Negative(format!("SGCC {status}")));
    }
    Ok(())
}

fn wave(ctx: &Ctx, index: usize) -> Result<(), Failure> {
    let lab = Lab::new(&ctx.scenario)?;
    let plan = admissible_plan(&lab, index)?;
    let solver = plan.solver(&lab, false)?;
    let g = plan.build(&lab, &solver)?;
    let rec = lab.run(&solver, &g, lab.scenario.output.snapshots.clone())?;
    let meta = [
        ("scenario_hash", lab.hash.clone()),
        ("cells", format!("{}x{}", solver.grid.n1, solver.grid.n2)),
    ];
    let mut csv = Vec::new();
    rec.write_csv(&meta, &mut csv).map_err(compute)?;
    ctx.write("trace.csv", &csv)?;
    for (i, snap) in rec.snapshots.iter().enumerate() {
        let mut buf = Vec::new();
        sidewise::wavesim::TraceRecord::write_snapshot(snap, [solver.grid.n1, solver.grid.n2], &mut buf)
            .map_err(compute)?;
        ctx.write(&format!("snapshot_{i}.txt"), &buf)?;
    }
    if ctx.figures() {
        ctx.write("energy.svg", energy_plot(&rec.energy_times, &rec.energy).as_bytes())?;
    }
    println!("max energy {:.6e}, trace L2 {:.6e}", rec.max_energy(), rec.trace_l2());
    Ok(())
}

fn observe(ctx: &Ctx, index: usize) -> Result<(), Failure> {
    let lab = Lab::new(&ctx.scenario)?;
    let plan = admissible_plan(&lab, index)?;
    let solver = plan.solver(&lab, false)?;
    let g = plan.build(&lab, &solver)?;
    let q = observability_quotient(&lab, &solver, &g)?;
    println!("Q = {:?}, Q_rel = {:?}", q.quotient, q.relaxed);
    ctx.write("quotient.json", &to_json(&q)?)
}

fn sweep_admissible(ctx: &Ctx) -> Result<(), Failure> {
    let lab = Lab::new(&ctx.scenario)?;
    let verdict = lab.sgcc()?;
    let table = admissible_sweep(&lab, &verdict, &lab.scenario.source.admissible.profiles)?;
    println!(
        "min Q {:?}, min/median {:?}",
        table.summary.min_quotient, table.summary.min_over_median
    );
    match ctx.format {
        OutputFormat::Json => ctx.write("admissible.json", &to_json(&table)?),
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = table
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.profile.dominant_tau().to_string(),
                        r.record.h1.to_string(),
                        r.record.l2.to_string(),
                        r.record.trace.to_string(),
                        r.record.quotient.map_or(String::new(), |q| q.to_string()),
                        r.record.relaxed.map_or(String::new(), |q| q.to_string()),
                        r.refined_quotient.map_or(String::new(), |q| q.to_string()),
                    ]
                })
                .collect();
            ctx.write(
                "admissible.csv",
                &to_csv(
                    &["tau", "h1", "l2", "trace", "quotient", "relaxed", "refined_quotient"],
                    &rows,
                ),
            )
        }
    }
}

fn sweep_invisible(ctx: &Ctx, glancing: bool) -> Result<(), Failure> {
    let lab = Lab::new(&ctx.scenario)?;
    let mut tables = vec![("invisible", invisibility_sweep(&lab, &lab.scenario.source.invisible.ks))];
    if glancing {
        let g = lab
            .scenario
            .source
            .glancing
            .as_ref()
            .ok_or_else(|| Failure::Config("scenario has no [source.glancing] section".into()))?;
        tables.push(("glancing", glancing_sweep(&lab, &g.members)));
    }
    for (name, t) in &tables {
        println!(
            "{name}: strictly decreasing {:?}, last/first {:?}",
            t.strictly_decreasing, t.last_over_first
        );
        match ctx.format {
            OutputFormat::Json => ctx.write(&format!("{name}.json"), &to_json(t)?)?,
            OutputFormat::Csv => ctx.write(&format!("{name}.csv"), &decay_csv(t))?,
        }
    }
    if ctx.figures() {
        let refs: Vec<_> = tables.iter().map(|(n, t)| (*n, t)).collect();
        ctx.write("decay.svg", decay_plot(&refs).as_bytes())?;
    }
    let failures: Vec<_> = tables.iter().flat_map(|(_, t)| t.failures.iter()).collect();
    if !failures.is_empty() {
        return Err(Failure::Compute(format!("{failures:?}")));
    }
    Ok(())
}

fn study(ctx: &Ctx) -> Result<(), Failure> {
    let report = full_study(&ctx.scenario)?;
    ctx.write("report.json", &to_json(&report)?)?;
    ctx.write("summary.txt", report.summary().as_bytes())?;
    if ctx.figures() {
        let tables: Vec<_> = [("invisible", &report.invisible), ("glancing", &report.glancing)]
            .into_iter()
            .filter_map(|(n, t)| t.as_ref().map(|t| (n, t)))
            .collect();
        if !tables.is_empty() {
            ctx.write("decay.svg", decay_plot(&tables).as_bytes())?;
        }
    }
    print!("{}", report.summary());
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    let ctx = load(cli)?;
    match &cli.command {
        Command::Rays { points, angles } => rays(&ctx, *points, *angles),
        Command::Classify { points, directions } => classify_table(&ctx, *points, *directions),
        Command::Sgcc { gate } => sgcc(&ctx, *gate),
        Command::Wave { source } => wave(&ctx, *source),
        Command::Observe { source } => observe(&ctx, *source),
        Command::SweepAdmissible => sweep_admissible(&ctx),
        Command::SweepInvisible { glancing } => sweep_invisible(&ctx, *glancing),
        Command::Study => study(&ctx),
    }
}

fn report_failure(kind: &str, message: &str, code: u8) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "message": message }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => report_failure("configuration", &m, 1),
        Err(Failure::Compute(m)) => report_failure("computation", &m, 2),
        Err(Failure::Negative(m)) => report_failure("verdict-negative", &m, 3),
    }
}
