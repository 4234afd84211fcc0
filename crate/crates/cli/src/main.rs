//! `walshlab` — reproducible file-based workflows over the exact
//! nilpotent-average toolkit. Exit codes: 0 success, 1 computational
//! failure or inconclusive-in-strict-mode, 2 schema/usage error.

mod schema;

use std::fmt::Write as _;
use std::process::ExitCode;

use astro_float::Consts;
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use walshlab::folner::{self, FolnerSet};
use walshlab::growth::{self, GrowthExpr};
use walshlab::nilgroup::{lcs, refine_scalar, Length};
use walshlab::rates;
use walshlab::systems;
use walshlab::vncircle::{self, AtomicMeasure, CircleObservable, Cx};
use walshlab::{GroupModel, Int, Rat};

const GROWTH_GRAMMAR: &str = "\
GROWTH EXPRESSION GRAMMAR
  expr   := term (('+') term)*
  term   := power (('*') power)*
  power  := postfix ('^' power)?          (right-associative)
  postfix:= atom ('(' expr ')')*          (application = composition)
  atom   := INTEGER | 'M' | 'max' '(' expr ',' expr ')' | '(' expr ')'
Examples: '2*M', 'M^2 + 1', 'max(M, 10)', '(M^2)(M+1)' (composition).";

#[derive(Parser)]
#[command(
    name = "walshlab",
    about = "Exact Følner averages, polynomial certificates and convergence rates",
    after_long_help = GROWTH_GRAMMAR,
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Certify or refute that a map described in JSON is polynomial
    VerifyPoly(VerifyPolyArgs),
    /// Complexity bounds c(d, j) and system certification
    Complexity(ComplexityArgs),
    /// CSV table of (N, sup-ratio) Følner defect values
    Folner(FolnerArgs),
    /// Exact multiple ergodic averages of a JSON-described action
    Simulate(SimulateArgs),
    /// Metastability scan over qualifying Følner pairs
    Scan(ScanArgs),
    /// Quantitative von Neumann sweep on random atomic measures
    Vn(VnArgs),
    /// Theorem 9.1 / Prop. 9.2 rate tuples
    Rates(RatesArgs),
}

#[derive(Args)]
struct VerifyPolyArgs {
    /// JSON map descriptor (see docs/formats.md)
    #[arg(long)]
    input: std::path::PathBuf,
    /// Scalar-degree refinement of the lower central series
    #[arg(long, default_value_t = 2)]
    degree: usize,
    /// Override the recursion depth cap
    #[arg(long)]
    depth_cap: Option<usize>,
}

#[derive(Args)]
struct ComplexityArgs {
    /// Prefiltration length d (a natural number, or "-inf")
    #[arg(long, conflicts_with = "input", allow_hyphen_values = true)]
    length: Option<String>,
    /// Number of non-identity maps j
    #[arg(long, conflicts_with = "input")]
    j: Option<u64>,
    /// Certify a JSON-described system instead of printing c(d, j)
    #[arg(long)]
    input: Option<std::path::PathBuf>,
    /// Reduction-round budget for certification
    #[arg(long, default_value_t = 8)]
    budget: usize,
}

#[derive(Args)]
struct FolnerArgs {
    /// Group model: z1, z2, z3 or heis
    #[arg(long, default_value = "z1")]
    model: String,
    /// Compact window index: sup ranges over l in F_k
    #[arg(long, default_value_t = 2)]
    k: u64,
    /// First N of the table
    #[arg(long, default_value_t = 1)]
    n_from: u64,
    /// Last N of the table
    #[arg(long, default_value_t = 20)]
    n_to: u64,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON action descriptor (see docs/formats.md)
    #[arg(long)]
    input: std::path::PathBuf,
    /// Comma-separated Følner floors to average over
    #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
    floors: Vec<u64>,
    /// Also emit the exact period-lattice limit
    #[arg(long)]
    limit: bool,
}

#[derive(Args)]
struct ScanArgs {
    /// JSON action descriptor (see docs/formats.md)
    #[arg(long)]
    input: std::path::PathBuf,
    /// Oscillation threshold, "p/q"
    #[arg(long)]
    epsilon: String,
    /// Growth expression F(M) (see --help for the grammar)
    #[arg(long, default_value = "2*M")]
    growth: String,
    /// M window "lo:hi"
    #[arg(long, default_value = "4:8")]
    m_window: String,
    /// Qualification parameter for the ceil test, "p/q"
    #[arg(long, default_value = "1/10")]
    gamma: String,
    /// Extra shift (repeatable): comma-separated Γ-coordinates
    #[arg(long = "shift")]
    shifts: Vec<String>,
    /// Exit 1 when no M in the window passes
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct VnArgs {
    /// Oscillation threshold, "p/q"
    #[arg(long, default_value = "1/2")]
    epsilon: String,
    /// Growth expression F(M) (see --help for the grammar)
    #[arg(long, default_value = "2*M")]
    growth: String,
    /// Starting value M_bullet
    #[arg(long, default_value_t = 10)]
    m0: u64,
    /// Number of random measures
    #[arg(long, default_value_t = 100)]
    cases: u64,
    /// RNG seed: fully determines the corpus
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args)]
struct RatesArgs {
    /// ε as "p/q"
    #[arg(long)]
    epsilon: String,
    /// Complexity level c of Theorem 9.1
    #[arg(long)]
    complexity: u32,
    /// Growth expression F(M) (see --help for the grammar)
    #[arg(long, default_value = "2*M")]
    growth: String,
    /// Base point M
    #[arg(long, default_value = "1")]
    m: String,
    /// exact: fail unless the tuple materializes; deferred: degrade gracefully
    #[arg(long, default_value = "deferred")]
    mode: String,
    /// NON-CONFORMING toy override for δ (testing only), "p/q"
    #[arg(long)]
    delta_override: Option<String>,
}

fn main() -> ExitCode {
    if let Ok(t) = std::env::var("WALSHLAB_THREADS") {
        match t.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: WALSHLAB_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    let out = match run(&cli.command) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            return ExitCode::from(e.code);
        }
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, out) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        }
        None => print!("{out}"),
    }
    ExitCode::SUCCESS
}

struct CmdError {
    code: u8,
    msg: String,
}

fn schema_err(msg: impl Into<String>) -> CmdError {
    CmdError { code: 2, msg: msg.into() }
}

fn comp_err(msg: impl Into<String>) -> CmdError {
    CmdError { code: 1, msg: msg.into() }
}

fn parse_rat(s: &str, what: &str) -> Result<Rat, CmdError> {
    s.parse::<Rat>()
        .map_err(|e| schema_err(format!("{what}: cannot parse {s:?} as p/q: {e}")))
}

fn parse_growth(s: &str) -> Result<GrowthExpr, CmdError> {
    growth::parse(s).map_err(|e| schema_err(format!("growth expression {s:?}: {e}")))
}

fn run(cmd: &Cmd) -> Result<String, CmdError> {
    match cmd {
        Cmd::VerifyPoly(a) => verify_poly(a),
        Cmd::Complexity(a) => complexity(a),
        Cmd::Folner(a) => folner_table(a),
        Cmd::Simulate(a) => simulate(a),
        Cmd::Scan(a) => scan(a),
        Cmd::Vn(a) => vn(a),
        Cmd::Rates(a) => rates_cmd(a),
    }
}

fn verify_poly(a: &VerifyPolyArgs) -> Result<String, CmdError> {
    let (desc, map) = schema::load_map(&a.input)?;
    let verdict = if schema::is_ut(&map) {
        let pf = refine_scalar(&lcs(desc.dim), a.degree)
            .map_err(|e| comp_err(e.to_string()))?;
        let cap = a.depth_cap.unwrap_or_else(|| map.default_depth_cap(&pf));
        map.is_polynomial(&pf, cap)
            .map_err(|e| comp_err(e.to_string()))?
    } else {
        // permutation words: scalar-degree refinement on the exponents
        let pf = lcs(desc.dim);
        let cap = a.depth_cap.unwrap_or(16);
        map.is_polynomial(&pf, cap)
            .map_err(|e| comp_err(e.to_string()))?
    };
    let label = if verdict.is_certified() {
        "certified"
    } else if verdict.is_refuted() {
        "refuted"
    } else {
        "unknown"
    };
    let report = format!("{{\"verdict\":\"{label}\"}}\n");
    if label == "unknown" {
        return Err(comp_err(format!(
            "verification inconclusive within the depth cap; report: {report}"
        )));
    }
    Ok(report)
}

fn complexity(a: &ComplexityArgs) -> Result<String, CmdError> {
    if let Some(path) = &a.input {
        let system = schema::load_system(path)?;
        let out = systems::certify_complexity(&system, a.budget)
            .map_err(|e| comp_err(e.to_string()))?;
        return match out.bound() {
            Some(b) => Ok(format!("{{\"certified\":true,\"bound\":{b}}}\n")),
            None => Err(comp_err(format!(
                "certification inconclusive within budget {}",
                a.budget
            ))),
        };
    }
    let (length, j) = match (&a.length, a.j) {
        (Some(l), Some(j)) => (l, j),
        _ => return Err(schema_err("complexity needs --length and --j, or --input")),
    };
    let d = if length == "-inf" {
        Length::MinusInf
    } else {
        Length::Fin(
            length
                .parse::<usize>()
                .map_err(|_| schema_err(format!("--length {length:?}: expected a natural number or \"-inf\"")))?,
        )
    };
    let bound = systems::complexity_bound(d, j).map_err(|e| comp_err(e.to_string()))?;
    Ok(format!("{{\"bound\":\"{bound}\"}}\n"))
}

fn parse_model(s: &str) -> Result<GroupModel, CmdError> {
    match s {
        "z1" => Ok(GroupModel::Zr(1)),
        "z2" => Ok(GroupModel::Zr(2)),
        "z3" => Ok(GroupModel::Zr(3)),
        "heis" => Ok(GroupModel::Heis),
        other => Err(schema_err(format!(
            "unknown model {other:?}: expected z1, z2, z3 or heis"
        ))),
    }
}

fn folner_table(a: &FolnerArgs) -> Result<String, CmdError> {
    let model = parse_model(&a.model)?;
    if a.n_from == 0 || a.n_to < a.n_from {
        return Err(schema_err("need 1 <= n-from <= n-to"));
    }
    let mut out = String::from("N,sup_ratio\n");
    for n in a.n_from..=a.n_to {
        let r = folner::sup_ratio(&model, a.k, n);
        writeln!(out, "{n},{r}").unwrap();
    }
    Ok(out)
}

fn simulate(a: &SimulateArgs) -> Result<String, CmdError> {
    let (action, fs) = schema::load_action(&a.input)?;
    let model = action.model();
    let mut out = String::from("floor,point,value\n");
    for &n in &a.floors {
        if n == 0 {
            return Err(schema_err("floors must be positive"));
        }
        let i = FolnerSet::canonical(model, n).map_err(|e| comp_err(e.to_string()))?;
        let avg = action.av(&i, &fs).map_err(|e| comp_err(e.to_string()))?;
        for (x, v) in avg.values.iter().enumerate() {
            writeln!(out, "{n},{x},{v}").unwrap();
        }
    }
    if a.limit {
        let lim = action
            .limit_oracle(&fs, 1 << 24)
            .map_err(|e| comp_err(e.to_string()))?;
        for (x, v) in lim.values.iter().enumerate() {
            writeln!(out, "limit,{x},{v}").unwrap();
        }
    }
    Ok(out)
}

fn scan(a: &ScanArgs) -> Result<String, CmdError> {
    let (action, fs) = schema::load_action(&a.input)?;
    let eps = parse_rat(&a.epsilon, "--epsilon")?;
    let gamma = parse_rat(&a.gamma, "--gamma")?;
    let g = parse_growth(&a.growth)?;
    let (lo, hi) = a
        .m_window
        .split_once(':')
        .and_then(|(l, h)| Some((l.parse::<u64>().ok()?, h.parse::<u64>().ok()?)))
        .ok_or_else(|| schema_err(format!("--m-window {:?}: expected lo:hi", a.m_window)))?;
    if lo == 0 || hi < lo {
        return Err(schema_err("need 1 <= lo <= hi in --m-window"));
    }
    let arity = action.model().arity();
    let mut shifts = Vec::new();
    for s in &a.shifts {
        let coords: Result<Vec<i64>, _> = s.split(',').map(str::parse::<i64>).collect();
        let coords = coords
            .map_err(|_| schema_err(format!("--shift {s:?}: expected comma-separated integers")))?;
        if coords.len() != arity {
            return Err(schema_err(format!(
                "--shift {s:?}: expected {arity} coordinates for this model"
            )));
        }
        shifts.push(coords);
    }
    let growth_fn = |m: u64| g.eval_u64(m).unwrap_or(u64::MAX);
    let window: Vec<u64> = (lo..=hi).collect();
    let report =
        walshlab::dynamics::metastability_scan(&action, &fs, &eps, &growth_fn, &window, &gamma, &shifts)
            .map_err(|e| comp_err(e.to_string()))?;
    let mut out = String::from("M,N,Nprime,shifts_scanned,pairs_checked,max_l2_oscillation_sq,pass\n");
    for e in &report.entries {
        let (n, np) = e.worst_pair.unwrap_or((0, 0));
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            e.m,
            n,
            np,
            shifts.len() + 1,
            e.pairs_checked,
            e.max_osc_sq,
            e.pass
        )
        .unwrap();
    }
    match report.least_passing {
        Some(m) => writeln!(out, "# least passing M = {m}").unwrap(),
        None => {
            writeln!(out, "# no M in the window passes").unwrap();
            if a.strict {
                return Err(comp_err(format!("no M in [{lo}, {hi}] passes; table:\n{out}")));
            }
        }
    }
    Ok(out)
}

fn vn(a: &VnArgs) -> Result<String, CmdError> {
    let eps = parse_rat(&a.epsilon, "--epsilon")?;
    let g = parse_growth(&a.growth)?;
    let seq = vncircle::vn_sequence(&eps, &g, &Int::from(a.m0))
        .map_err(|e| comp_err(e.to_string()))?;
    let mut cc = Consts::new().unwrap();
    let prec = vncircle::PREC;
    let rm = astro_float::RoundingMode::ToEven;
    let radii: Vec<(astro_float::BigFloat, astro_float::BigFloat)> = seq
        .ms
        .iter()
        .map(|m| {
            let fm = g.eval(m).unwrap().max(m.clone());
            let (ra, rb) = vncircle::region_radii(&eps, &fm, m).unwrap();
            (
                vncircle::rat_to_bf(&(&ra * &ra)),
                vncircle::rat_to_bf(&(&rb * &rb)),
            )
        })
        .collect();
    let mut out = String::from("case,i,max_oscillation,pass\n");
    let mut all_pass = true;
    for case in 0..a.cases {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed.wrapping_add(case));
        let n_atoms = rng.gen_range(1..=50usize);
        let angles: Vec<Rat> = (0..n_atoms)
            .map(|_| {
                let q = rng.gen_range(1..=60i64);
                let p = rng.gen_range(0..q.max(1));
                Rat::new(Int::from(p), Int::from(q))
            })
            .collect();
        let raw: Vec<i64> = (0..n_atoms).map(|_| rng.gen_range(1..=100i64)).collect();
        let total: i64 = raw.iter().sum();
        let weights: Vec<Rat> = raw
            .iter()
            .map(|&w| Rat::new(Int::from(w), Int::from(total)))
            .collect();
        let mu = AtomicMeasure::new(angles, weights).map_err(|e| comp_err(e.to_string()))?;
        let mut vals: Vec<Rat> = (0..n_atoms)
            .map(|_| Rat::new(Int::from(rng.gen_range(-64..=64i64)), Int::from(64)))
            .collect();
        let s: Rat = mu
            .weights
            .iter()
            .zip(&vals)
            .map(|(w, v)| w * &(v * v))
            .sum();
        if s > Rat::from_integer(Int::from(1)) {
            for v in &mut vals {
                *v /= &s;
            }
        }
        let f = CircleObservable {
            values: vals.iter().map(Cx::real).collect(),
        };
        let chords: Vec<astro_float::BigFloat> =
            mu.angles.iter().map(|t| vncircle::chord_sq(t, &mut cc)).collect();
        let best = (0..seq.k)
            .min_by(|&x, &y| {
                let mass = |idx: usize| {
                    let (ra, rb) = &radii[idx];
                    let mut acc = astro_float::BigFloat::from_i8(0, prec);
                    for (k, d) in chords.iter().enumerate() {
                        if vncircle::classify_sq(d, ra, rb) == vncircle::Region::E {
                            acc = acc.add(
                                &vncircle::rat_to_bf(&mu.weights[k])
                                    .mul(&f.values[k].abs_sq(), prec, rm),
                                prec,
                                rm,
                            );
                        }
                    }
                    acc
                };
                mass(x).partial_cmp(&mass(y)).unwrap()
            })
            .unwrap();
        let rep = vncircle::check_metastability(&f, &mu, &eps, &seq.ms[best], &g, &mut cc)
            .map_err(|e| comp_err(e.to_string()))?;
        all_pass &= rep.pass;
        let osc: f64 = format!("{}", rep.max_oscillation).parse().unwrap_or(f64::NAN);
        writeln!(out, "{case},{},{osc:.6e},{}", best + 1, rep.pass).unwrap();
    }
    if !all_pass {
        return Err(comp_err(format!("some case failed; table:\n{out}")));
    }
    Ok(out)
}

fn rates_cmd(a: &RatesArgs) -> Result<String, CmdError> {
    let eps = parse_rat(&a.epsilon, "--epsilon")?;
    let g = parse_growth(&a.growth)?;
    let m = a
        .m
        .parse::<Int>()
        .map_err(|_| schema_err(format!("--m {:?}: expected an integer", a.m)))?;
    let mut ctx = rates::RateCtx::standard();
    if let Some(d) = &a.delta_override {
        ctx.delta_rule = rates::DeltaRule::Override(parse_rat(d, "--delta-override")?);
    }
    let f = rates::nat_from_growth(g);
    let phi = rates::phi_z_closed();
    let outcome = rates::main_tuple_deferred(a.complexity, &eps, &f, &m, &phi, &ctx);
    let json = match &outcome {
        rates::TupleOutcome::Exact(t) => {
            let entries: Vec<String> = t.entries.iter().map(|e| format!("\"{e}\"")).collect();
            let n = match &t.n {
                Some(n) => format!(",\"n\":\"{n}\""),
                None => String::new(),
            };
            format!(
                "{{\"count\":\"{}\",\"entries\":[{}]{}}}\n",
                t.count,
                entries.join(","),
                n
            )
        }
        rates::TupleOutcome::CountOnly {
            count,
            digits,
            description,
        } => format!(
            "{{\"count\":\"{count}\",\"digits\":{digits},\"description\":{}}}\n",
            serde_json::to_string(description).unwrap()
        ),
        rates::TupleOutcome::Symbolic { description } => format!(
            "{{\"description\":{}}}\n",
            serde_json::to_string(description).unwrap()
        ),
    };
    match a.mode.as_str() {
        "exact" => match outcome {
            rates::TupleOutcome::Exact(_) => Ok(json),
            _ => Err(comp_err(format!(
                "tuple does not materialize under the caps; deferred report: {json}"
            ))),
        },
        "deferred" => Ok(json),
        other => Err(schema_err(format!(
            "--mode {other:?}: expected exact or deferred"
        ))),
    }
}
