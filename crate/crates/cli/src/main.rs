//! `mdcvrp`: compile routing instances to QUBO, solve, decode and reroute.

mod exit;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mdcvrp_core::instance::has_errors;
use mdcvrp_core::layout::estimate_size_with;
use mdcvrp_core::solver::SampleSet;
use mdcvrp_core::{
    apply_progress, assemble, compile_rerouting, decode, export_layout, export_qubo, import_qubo,
    parse_instance, parse_layout, plan_cost, qubo_to_ising, render_svg, solve_exhaustive,
    solve_simulated_annealing, validate_instance, validate_routes, AnnealSchedule, CompileConfig,
    ExhaustiveConfig, FlowForm, Instance, LayoutOptions, PenaltyConfig, Qubo, ReroutingConfig,
    RoutePlan, RoutingProblem, SlackEncoding, ValidationReport, VariableLayout,
};
use num_rational::Ratio;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use exit::{read, write, Exit, Failure, OrExit, Outcome};

const DEFAULT_RETRIES: &str = "5";

#[derive(Parser)]
#[command(name = "mdcvrp", version, about = "QUBO compiler for multi-depot capacitated vehicle routing")]
struct Cli {
    /// Worker threads for the solvers; results do not depend on it.
    #[arg(long, global = true, env = "MDCVRP_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance, and optionally a plan against it.
    Validate {
        instance: PathBuf,
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Count decision variables without building the model.
    Estimate {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, default_value = "binary")]
        slack: SlackEncoding,
    },
    /// Write the QUBO and its layout sidecar.
    Compile {
        instance: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Sidecar path; defaults to the output with a `.layout` extension.
        #[arg(long)]
        layout: Option<PathBuf>,
        #[command(flatten)]
        compile: CompileArgs,
    },
    /// Compile, sample, decode and validate.
    Solve {
        instance: PathBuf,
        /// Plan file written when the best sample is feasible.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        compile: CompileArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Turn a bitstring back into routes.
    Decode {
        #[arg(long)]
        layout: PathBuf,
        #[arg(long, conflicts_with = "bits_file", required_unless_present = "bits_file")]
        bits: Option<String>,
        #[arg(long)]
        bits_file: Option<PathBuf>,
        /// Validate the decoded plan against this instance.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build the rerouting model after partial execution.
    Reroute {
        instance: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        /// JSON map from vehicle id to the number of stops already served.
        #[arg(long)]
        progress: PathBuf,
        #[arg(long)]
        requests: Option<PathBuf>,
        /// Write the rerouting QUBO here, with a `.layout` sidecar.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        solve: bool,
        /// Full plan (served prefix plus new routes) written after `--solve`.
        #[arg(short, long, requires = "solve")]
        output: Option<PathBuf>,
        #[command(flatten)]
        compile: CompileArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Draw an instance and an optional plan as SVG.
    Render {
        instance: PathBuf,
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Convert a `.qubo` file to another representation.
    Export {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = Target::Qubo)]
        to: Target,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Qubo,
    Ising,
    Json,
}

#[derive(Args)]
struct CompileArgs {
    /// Penalty weight B; defaults to one more than the sum of all distances.
    #[arg(long)]
    penalty: Option<i64>,
    #[arg(long, default_value = "corrected")]
    flow: FlowForm,
    #[arg(long, default_value = "binary")]
    slack: SlackEncoding,
    #[arg(long, default_value_t = mdcvrp_core::layout::DEFAULT_SUBTOUR_CAP)]
    subtour_cap: usize,
}

impl CompileArgs {
    fn config(&self) -> Outcome<CompileConfig> {
        let penalty = self.penalty.map(PenaltyConfig::new).transpose()?;
        Ok(CompileConfig {
            penalty,
            flow: self.flow,
            layout: LayoutOptions {
                encoding: self.slack,
                subtour_cap: self.subtour_cap,
            },
            include_objective: true,
        })
    }

    fn params(&self) -> Value {
        json!({
            "penalty": self.penalty,
            "flow": self.flow.as_str(),
            "slack": self.slack.as_str(),
            "subtour_cap": self.subtour_cap,
        })
    }
}

#[derive(Args)]
struct SolverArgs {
    /// Enumerate every state instead of annealing.
    #[arg(long)]
    exhaustive: bool,
    /// `T0,Tf,sweeps,restarts`; empty fields keep their defaults.
    #[arg(long, conflicts_with = "exhaustive")]
    schedule: Option<String>,
    #[arg(long, env = "MDCVRP_SEED", default_value_t = 0)]
    seed: u64,
    /// Samples listed in the report.
    #[arg(long, default_value_t = 1)]
    top: usize,
    #[arg(long, default_value_t = mdcvrp_core::solver::DEFAULT_EXHAUSTIVE_CAP)]
    max_bits: usize,
    /// Double B and try again while the best sample is infeasible, at most
    /// this many times.
    #[arg(long, num_args = 0..=1, default_missing_value = DEFAULT_RETRIES)]
    retry_penalty: Option<usize>,
    /// Write every sample as JSON.
    #[arg(long)]
    samples: Option<PathBuf>,
}

impl SolverArgs {
    fn params(&self) -> Value {
        json!({
            "exhaustive": self.exhaustive,
            "schedule": self.schedule,
            "seed": self.seed,
            "top": self.top,
            "max_bits": self.max_bits,
            "retry_penalty": self.retry_penalty,
        })
    }

    fn schedule(&self, model: &Qubo) -> Outcome<AnnealSchedule> {
        let mut schedule = AnnealSchedule::for_model(model, self.seed);
        let Some(text) = &self.schedule else {
            return Ok(schedule);
        };
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        let [t0, tf, sweeps, restarts] = fields.as_slice() else {
            return Err(Failure::msg(Exit::Usage, "--schedule takes T0,Tf,sweeps,restarts"));
        };
        let bad = |what: &str, v: &str| Failure::msg(Exit::Usage, format!("bad {what} `{v}`"));
        if !t0.is_empty() {
            schedule.initial_temperature = t0.parse().map_err(|_| bad("T0", t0))?;
        }
        if !tf.is_empty() {
            schedule.final_temperature = tf.parse().map_err(|_| bad("Tf", tf))?;
        }
        if !sweeps.is_empty() {
            schedule.sweeps = sweeps.parse().map_err(|_| bad("sweeps", sweeps))?;
        }
        if !restarts.is_empty() {
            schedule.restarts = restarts.parse().map_err(|_| bad("restarts", restarts))?;
        }
        schedule.validate()?;
        Ok(schedule)
    }

    fn run(&self, model: &Qubo) -> Outcome<(SampleSet<i64>, String)> {
        if self.exhaustive {
            let config = ExhaustiveConfig {
                max_dimension: self.max_bits,
                keep: self.top.max(1),
            };
            let samples = solve_exhaustive(model, &config)?;
            let label = format!("exhaustive, 2^{} states", model.dimension);
            Ok((samples, label))
        } else {
            let s = self.schedule(model)?;
            let samples = solve_simulated_annealing(model, &s)?;
            let label = format!(
                "annealing, T0 {} Tf {} sweeps {} restarts {} seed {}",
                s.initial_temperature, s.final_temperature, s.sweeps, s.restarts, s.seed
            );
            Ok((samples, label))
        }
    }
}

/// Reproducibility header shared by every artifact.
struct Meta {
    command: &'static str,
    config: String,
    seed: Option<u64>,
    excluded: Vec<(String, String)>,
}

impl Meta {
    fn new(command: &'static str, inputs: &[&str], params: Value, seed: Option<u64>) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(command.as_bytes());
        for input in inputs {
            hasher.update([0u8]);
            hasher.update(Sha256::digest(input.as_bytes()));
        }
        hasher.update([0u8]);
        hasher.update(params.to_string().as_bytes());
        let digest = hasher.finalize();
        Self {
            command,
            config: hex::encode(&digest[..8]),
            seed,
            excluded: Vec::new(),
        }
    }

    fn line(&self) -> String {
        let seed = self.seed.map_or("-".to_string(), |s| s.to_string());
        let mut out = format!(
            "mdcvrp {} {} config {} seed {seed}",
            env!("CARGO_PKG_VERSION"),
            self.command,
            self.config
        );
        for (vehicle, reason) in &self.excluded {
            let _ = write!(out, "\n# excluded {vehicle}: {reason}");
        }
        out
    }

    fn json(&self) -> Value {
        json!({
            "tool": format!("mdcvrp {}", env!("CARGO_PKG_VERSION")),
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "excluded": self.excluded.iter()
                .map(|(v, r)| json!({"vehicle": v, "reason": r}))
                .collect::<Vec<_>>(),
        })
    }
}

fn plan_document(meta: &Meta, plan: &RoutePlan) -> String {
    let doc = json!({"metadata": meta.json(), "routes": plan.routes});
    serde_json::to_string_pretty(&doc).expect("plan serializes") + "\n"
}

fn load_instance(path: &Path) -> Outcome<(Instance, String)> {
    let text = read(path)?;
    let inst = parse_instance(&text)?;
    Ok((inst, text))
}

fn load_plan(path: &Path) -> Outcome<(RoutePlan, String)> {
    let text = read(path)?;
    let plan = RoutePlan::from_json(&text).or_exit(Exit::Schema)?;
    Ok((plan, text))
}

fn require_feasible(inst: &Instance) -> Outcome {
    let diagnostics = validate_instance(inst);
    for d in &diagnostics {
        eprintln!("{d}");
    }
    if has_errors(&diagnostics) {
        return Err(Failure::msg(Exit::Instance, "instance admits no feasible plan"));
    }
    Ok(())
}

fn sidecar_path(model: &Path) -> PathBuf {
    model.with_extension("layout")
}

fn write_model(meta: &Meta, model: &Qubo, layout: &VariableLayout, path: &Path, sidecar: &Path) -> Outcome {
    let header = format!("# {}\n", meta.line());
    write(path, &(header.clone() + &export_qubo(model, Some(layout))))?;
    write(sidecar, &(header + &export_layout(layout)))
}

fn bitstring(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn distance(scaled: i64, scale: i64) -> Ratio<i64> {
    Ratio::new(scaled, scale)
}

/// Decodes and validates one sample.
fn judge(
    bits: &[bool],
    layout: &VariableLayout,
    validate: &dyn Fn(&RoutePlan) -> ValidationReport,
) -> Result<(RoutePlan, ValidationReport), String> {
    let plan = decode(bits, layout).map_err(|e| e.to_string())?;
    let report = validate(&plan);
    Ok((plan, report))
}

struct Attempt {
    model: Qubo,
    layout: VariableLayout,
    problem: RoutingProblem,
}

/// The compile, sample, decode, validate loop. Doubles the penalty while the
/// best sample is infeasible and retries are left. Returns the feasible
/// plan, or `Exit::Infeasible` after printing why.
fn solve_loop(
    out: &mut String,
    meta: &Meta,
    first: PenaltyConfig,
    solver: &SolverArgs,
    compile: &dyn Fn(PenaltyConfig) -> Outcome<Attempt>,
    validate: &dyn Fn(&RoutePlan) -> ValidationReport,
) -> Outcome<RoutePlan> {
    let attempts = 1 + solver.retry_penalty.unwrap_or(0);
    let mut penalty = first;
    for attempt in 1..=attempts {
        let Attempt { model, layout, problem } = compile(penalty)?;
        let (samples, label) = solver.run(&model)?;
        if let Some(path) = &solver.samples {
            write(path, &samples_document(meta, &samples))?;
        }
        let _ = writeln!(out, "attempt {attempt}: penalty {} bits {}", penalty.weight, model.dimension);
        let _ = writeln!(out, "solver {label}");
        for (rank, s) in samples.records.iter().take(solver.top.max(1)).enumerate() {
            let status = match judge(&s.bits, &layout, validate) {
                Ok((_, r)) if r.passed() => "feasible".to_string(),
                Ok((_, r)) => {
                    let failed: Vec<String> = r
                        .checks
                        .iter()
                        .filter(|c| !c.passed)
                        .map(|c| c.constraint.to_string())
                        .collect();
                    format!("violates {}", failed.join(","))
                }
                Err(e) => format!("undecodable: {e}"),
            };
            let _ = writeln!(
                out,
                "  #{} energy {} x{} {}  {}",
                rank + 1,
                s.energy,
                s.occurrences,
                bitstring(&s.bits),
                status
            );
        }
        let best = samples
            .best()
            .ok_or_else(|| Failure::msg(Exit::Infeasible, "solver returned no samples"))?;
        let _ = writeln!(
            out,
            "best energy {} ({} in distance units)",
            best.energy,
            distance(best.energy, model.scale)
        );
        match judge(&best.bits, &layout, validate) {
            Ok((plan, report)) => {
                let _ = write!(out, "plan\n{plan}validation\n{report}");
                if report.passed() {
                    let cost = plan_cost(&plan, &problem).or_exit(Exit::Infeasible)?;
                    let _ = writeln!(out, "route distance {}", distance(cost, problem.scale));
                    return Ok(plan);
                }
            }
            Err(e) => {
                let _ = writeln!(out, "decode failed: {e}");
            }
        }
        if attempt < attempts {
            penalty = PenaltyConfig::new(penalty.weight.saturating_mul(2).max(1))?;
        }
    }
    Err(Failure::msg(
        Exit::Infeasible,
        format!("best sample is not a feasible plan after {attempts} attempt(s)"),
    ))
}

fn samples_document(meta: &Meta, samples: &SampleSet<i64>) -> String {
    let records: Vec<Value> = samples
        .records
        .iter()
        .map(|s| json!({"bits": bitstring(&s.bits), "energy": s.energy, "occurrences": s.occurrences}))
        .collect();
    let doc = json!({"metadata": meta.json(), "info": samples.info, "records": records});
    serde_json::to_string_pretty(&doc).expect("samples serialize") + "\n"
}

fn cmd_validate(instance: &Path, plan: Option<&Path>) -> Outcome {
    let (inst, _) = load_instance(instance)?;
    let diagnostics = validate_instance(&inst);
    for d in &diagnostics {
        println!("{d}");
    }
    if has_errors(&diagnostics) {
        return Err(Failure::msg(Exit::Instance, "instance admits no feasible plan"));
    }
    println!(
        "instance ok: {} customers, {} vehicles, {} depots",
        inst.customers().len(),
        inst.vehicles().len(),
        inst.depots().len()
    );
    if let Some(path) = plan {
        let (plan, _) = load_plan(path)?;
        let report = validate_routes(&plan, &inst);
        print!("{report}");
        if !report.passed() {
            return Err(Failure::msg(Exit::Infeasible, "plan violates constraints"));
        }
        let cost = mdcvrp_core::route_distance(&plan, &inst).or_exit(Exit::Schema)?;
        println!("route distance {cost}");
    }
    Ok(())
}

fn cmd_estimate(instance: &Path, format: Format, slack: SlackEncoding) -> Outcome {
    let (inst, _) = load_instance(instance)?;
    let r = estimate_size_with(&inst, slack);
    match format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
        }
        Format::Text => {
            println!("customers {}, vehicles {}, depots {}", r.customers, r.vehicles, r.depots);
            println!(
                "route bits    {:>8}  (arcs {}, first stops {}, last stops {})",
                r.route_bits, r.arc_bits, r.start_bits, r.end_bits
            );
            println!(
                "subtour slack {:>8}  ({} constraints)",
                r.subtour_slack, r.subtour_constraints
            );
            println!("vehicle slack {:>8}", r.vehicle_slack);
            println!("depot slack   {:>8}", r.depot_slack);
            println!("total         {:>8}", r.total);
        }
    }
    Ok(())
}

fn cmd_compile(instance: &Path, output: &Path, layout: Option<&Path>, args: &CompileArgs) -> Outcome {
    let (inst, text) = load_instance(instance)?;
    let config = args.config()?;
    let (model, vars) = assemble(&inst, &config)?;
    let meta = Meta::new("compile", &[&text], args.params(), None);
    let sidecar = layout.map_or_else(|| sidecar_path(output), Path::to_path_buf);
    write_model(&meta, &model, &vars, output, &sidecar)?;
    println!(
        "{} bits, {} terms, penalty {}, scale {}",
        model.dimension,
        model.terms.linear.len() + model.terms.quadratic.len(),
        model.penalty.map_or(0, |p| p.weight),
        model.scale
    );
    Ok(())
}

fn cmd_solve(instance: &Path, output: Option<&Path>, args: &CompileArgs, solver: &SolverArgs) -> Outcome {
    let (inst, text) = load_instance(instance)?;
    require_feasible(&inst)?;
    let config = args.config()?;
    let first = config.penalty.unwrap_or_else(|| PenaltyConfig::default_for(&inst));
    let params = json!({"compile": args.params(), "solver": solver.params()});
    let meta = Meta::new("solve", &[&text], params, (!solver.exhaustive).then_some(solver.seed));
    let compile = |penalty: PenaltyConfig| -> Outcome<Attempt> {
        let config = CompileConfig {
            penalty: Some(penalty),
            ..config
        };
        let (model, layout) = assemble(&inst, &config)?;
        Ok(Attempt {
            model,
            layout,
            problem: RoutingProblem::from_instance(&inst),
        })
    };
    let validate = |plan: &RoutePlan| validate_routes(plan, &inst);
    let mut out = format!("# {}\n", meta.line());
    let result = solve_loop(&mut out, &meta, first, solver, &compile, &validate);
    print!("{out}");
    let plan = result?;
    // re-check against the instance itself before reporting success
    if !validate_routes(&plan, &inst).passed() {
        return Err(Failure::msg(Exit::Infeasible, "plan failed re-validation"));
    }
    if let Some(path) = output {
        write(path, &plan_document(&meta, &plan))?;
    }
    Ok(())
}

fn parse_bits(text: &str) -> Outcome<Vec<bool>> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Failure::msg(Exit::Schema, format!("bitstring has `{other}`"))),
        })
        .collect()
}

fn cmd_decode(
    layout: &Path,
    bits: Option<&str>,
    bits_file: Option<&Path>,
    instance: Option<&Path>,
    output: Option<&Path>,
) -> Outcome {
    let layout_text = read(layout)?;
    let vars = parse_layout(&layout_text)?;
    let bits = match (bits, bits_file) {
        (Some(b), _) => parse_bits(b)?,
        (None, Some(path)) => parse_bits(&read(path)?)?,
        (None, None) => return Err(Failure::msg(Exit::Usage, "need --bits or --bits-file")),
    };
    let plan = decode(&bits, &vars).or_exit(Exit::Infeasible)?;
    print!("{plan}");
    let bit_text = bitstring(&bits);
    let mut inputs = vec![layout_text.clone(), bit_text];
    if let Some(path) = instance {
        // only meaningful for static layouts; rerouting layouts need the
        // extended instance
        let (inst, text) = load_instance(path)?;
        let report = validate_routes(&plan, &inst);
        print!("{report}");
        if !report.passed() {
            return Err(Failure::msg(Exit::Infeasible, "decoded plan violates constraints"));
        }
        inputs.push(text);
    }
    if let Some(path) = output {
        let inputs: Vec<&str> = inputs.iter().map(String::as_str).collect();
        let meta = Meta::new("decode", &inputs, Value::Null, None);
        write(path, &plan_document(&meta, &plan))?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_reroute(
    instance: &Path,
    plan: &Path,
    progress: &Path,
    requests: Option<&Path>,
    model_path: Option<&Path>,
    solve: bool,
    output: Option<&Path>,
    args: &CompileArgs,
    solver: &SolverArgs,
) -> Outcome {
    let (base, base_text) = load_instance(instance)?;
    let (plan, plan_text) = load_plan(plan)?;
    let progress_text = read(progress)?;
    let steps = mdcvrp_core::dynamic::parse_progress(&progress_text).or_exit(Exit::Schema)?;
    let (reqs, req_text) = match requests {
        Some(path) => {
            let text = read(path)?;
            (mdcvrp_core::dynamic::parse_requests(&text)?, text)
        }
        None => (mdcvrp_core::Requests::none(), String::new()),
    };
    let state = apply_progress(&base, &plan, &steps, &reqs)?;
    let config = ReroutingConfig {
        compile: args.config()?,
        exclude_idle: true,
    };
    let compiled = compile_rerouting(&state, &config)?;
    let params = json!({"compile": args.params(), "solve": solve, "solver": solver.params()});
    let seed = (solve && !solver.exhaustive).then_some(solver.seed);
    let inputs = [base_text.as_str(), &plan_text, &progress_text, &req_text];
    let mut meta = Meta::new("reroute", &inputs, params, seed);
    meta.excluded = compiled.excluded.clone();

    let mut out = format!("# {}\n", meta.line());
    let _ = writeln!(out, "pending {}", state.pending_ids().join(" "));
    for (k, v) in state.instance().vehicles().iter().enumerate() {
        let _ = writeln!(
            out,
            "{} at {}, remaining capacity {}",
            v.id,
            state.location_id(k),
            mdcvrp_core::remaining_vehicle_capacity(&state, k)
        );
    }
    let _ = writeln!(
        out,
        "rerouting model: {} bits, penalty {}",
        compiled.model.dimension, compiled.penalty.weight
    );
    if let Some(path) = model_path {
        write_model(&meta, &compiled.model, &compiled.layout, path, &sidecar_path(path))?;
    }
    if !solve {
        print!("{out}");
        return Ok(());
    }

    let compile = |penalty: PenaltyConfig| -> Outcome<Attempt> {
        let mut config = config;
        config.compile.penalty = Some(penalty);
        let r = compile_rerouting(&state, &config)?;
        Ok(Attempt {
            model: r.model,
            layout: r.layout,
            problem: r.problem,
        })
    };
    let problem = compiled.problem.clone();
    let validate = |p: &RoutePlan| mdcvrp_core::validate_against(p, &problem);
    let result = solve_loop(&mut out, &meta, compiled.penalty, solver, &compile, &validate);
    let rerouted = match result {
        Ok(p) => p,
        Err(e) => {
            print!("{out}");
            return Err(e);
        }
    };
    if !validate(&rerouted).passed() {
        print!("{out}");
        return Err(Failure::msg(Exit::Infeasible, "rerouted plan failed re-validation"));
    }
    let full = state.merge(&rerouted);
    let _ = write!(out, "full plan\n{full}");
    print!("{out}");
    if let Some(path) = output {
        write(path, &plan_document(&meta, &full))?;
    }
    Ok(())
}

fn cmd_render(instance: &Path, plan: Option<&Path>, output: Option<&Path>) -> Outcome {
    let (inst, text) = load_instance(instance)?;
    let loaded = plan.map(load_plan).transpose()?;
    let mut inputs = vec![text.as_str()];
    if let Some((_, t)) = &loaded {
        inputs.push(t);
    }
    let svg = render_svg(&inst, loaded.as_ref().map(|(p, _)| p))?;
    let meta = Meta::new("render", &inputs, Value::Null, None);
    let doc = format!("<!-- {} -->\n{svg}", meta.line());
    match output {
        Some(path) => write(path, &doc),
        None => {
            print!("{doc}");
            Ok(())
        }
    }
}

fn ising_text(model: &Qubo) -> String {
    let ising = qubo_to_ising(&model.map(Ratio::from_integer));
    let mut out = format!("ising {} {} {}\n", ising.spins, ising.offset, model.scale);
    for (i, h) in &ising.h {
        let _ = writeln!(out, "h {i} {h}");
    }
    for ((i, j), c) in &ising.j {
        let _ = writeln!(out, "j {i} {j} {c}");
    }
    out
}

fn json_text(meta: &Meta, model: &Qubo) -> String {
    let doc = json!({
        "metadata": meta.json(),
        "dimension": model.dimension,
        "scale": model.scale,
        "penalty": model.penalty.map(|p| p.weight),
        "offset": model.offset(),
        "linear": model.terms.linear.iter().map(|(p, c)| json!([p, c])).collect::<Vec<_>>(),
        "quadratic": model.terms.quadratic.iter()
            .map(|((p, q), c)| json!([p, q, c]))
            .collect::<Vec<_>>(),
    });
    serde_json::to_string_pretty(&doc).expect("model serializes") + "\n"
}

fn cmd_export(path: &Path, target: Target, output: Option<&Path>) -> Outcome {
    let text = read(path)?;
    let model = import_qubo(&text)?;
    let params = json!({"to": match target { Target::Qubo => "qubo", Target::Ising => "ising", Target::Json => "json" }});
    let meta = Meta::new("export", &[&text], params, None);
    let doc = match target {
        Target::Qubo => format!("# {}\n{}", meta.line(), export_qubo(&model, None)),
        Target::Ising => format!("# {}\n{}", meta.line(), ising_text(&model)),
        Target::Json => json_text(&meta, &model),
    };
    match output {
        Some(path) => write(path, &doc),
        None => {
            print!("{doc}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Outcome {
    if let Some(n) = cli.threads.filter(|&n| n > 0) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .or_exit(Exit::Usage)?;
    }
    match &cli.command {
        Command::Validate { instance, plan } => cmd_validate(instance, plan.as_deref()),
        Command::Estimate { instance, format, slack } => cmd_estimate(instance, *format, *slack),
        Command::Compile { instance, output, layout, compile } => {
            cmd_compile(instance, output, layout.as_deref(), compile)
        }
        Command::Solve { instance, output, compile, solver } => {
            cmd_solve(instance, output.as_deref(), compile, solver)
        }
        Command::Decode { layout, bits, bits_file, instance, output } => cmd_decode(
            layout,
            bits.as_deref(),
            bits_file.as_deref(),
            instance.as_deref(),
            output.as_deref(),
        ),
        Command::Reroute {
            instance,
            plan,
            progress,
            requests,
            model,
            solve,
            output,
            compile,
            solver,
        } => cmd_reroute(
            instance,
            plan,
            progress,
            requests.as_deref(),
            model.as_deref(),
            *solve,
            output.as_deref(),
            compile,
            solver,
        ),
        Command::Render { instance, plan, output } => {
            cmd_render(instance, plan.as_deref(), output.as_deref())
        }
        Command::Export { model, to, output } => cmd_export(model, *to, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(Exit::Usage as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.error);
            ExitCode::from(failure.exit as u8)
        }
    }
}
