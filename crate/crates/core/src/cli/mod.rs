//! The `circ` command line: subcommand dispatch, JSON reports with run
//! manifests, and the reproduction suites.

mod suites;

pub use suites::{pole_example, random_rational, run_suite, square_example, SuiteReport, SuiteRow, SUITES};

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::algebra::{Scalar, SparsePoly};
use crate::approx::{approx_eval, convergence_witness, ApproxInstance, GermEntry, DEFAULT_PRECISION};
use crate::circuit::{classify, is_essentially_division_free, is_totally_division_free, serialize, validate, Circuit, CircuitFile, ParameterDomain};
use crate::cost::{cost, parameter_audit};
use crate::family::{
    build_beta_n, build_formula, build_h, h_param_names, identification_points, verify_elimination_identity,
    verify_identification,
};
use crate::lowerbound::{audit_candidate, naive_evaluator, rank_certificate, AuditVerdict, PointStrategy, DEFAULT_CEILING};
use crate::semantics::{consistency_check, eval_point, expand_symbolic, trial_rng, var_names, ConsistencyMode, Verdict};
use crate::transforms::{garbage_collect, join, reduce, restrict, JoinSpec, Oracle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "circ", version, about = "Parameterized arithmetic circuits and elimination-family certificates")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Emit a JSON report with a run manifest.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the structural invariants of a circuit file.
    Validate { file: PathBuf },
    /// Node classes and division-freeness.
    Classify { file: PathBuf },
    /// Evaluate at a point.
    Eval {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Vec<Scalar>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        inputs: Vec<Scalar>,
    },
    /// Symbolic expansion as rational functions.
    Expand {
        file: PathBuf,
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
    },
    /// Consistency over a parameter domain.
    Consistent {
        file: PathBuf,
        #[arg(long)]
        domain: Option<PathBuf>,
        #[arg(long, default_value_t = 32)]
        trials: usize,
        /// Skip the exact pull-back and only sample.
        #[arg(long)]
        probabilistic: bool,
    },
    /// Compose two circuits, outputs of the first into inputs of the second.
    Join {
        first: PathBuf,
        second: PathBuf,
        /// Pairs `output:input`, for example `0:0,1:1`.
        #[arg(long)]
        map: Option<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Merge nodes with equal results.
    Reduce {
        file: PathBuf,
        /// Decide candidate merges by symbolic expansion.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Drop nodes without a path to an output.
    Gc {
        file: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Re-check a circuit over a smaller domain.
    Restrict {
        file: PathBuf,
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, default_value_t = 32)]
        trials: usize,
    },
    /// Non-scalar cost measures.
    Cost { file: PathBuf },
    /// The hard elimination family.
    Family {
        #[command(subcommand)]
        command: FamilyCommand,
    },
    /// Lower-bound certificates.
    Lb {
        #[command(subcommand)]
        command: LbCommand,
    },
    /// Evaluation along parameter germs.
    Approx {
        #[command(subcommand)]
        command: ApproxCommand,
    },
    /// Run reproduction suites and print a pass/fail table.
    Repro {
        /// One of identity, cost, rank, lambda, size, transforms, audit,
        /// approx, identification, or all.
        #[arg(default_value = "all")]
        suite: String,
        #[command(flatten)]
        ceiling: CeilingArg,
    },
}

#[derive(Args, Debug)]
pub struct OutArg {
    /// Write the resulting circuit here instead of stdout.
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CeilingArg {
    /// Largest n for jet computations; CIRC_CEILING_N overrides.
    #[arg(long)]
    pub ceiling: Option<usize>,
}

impl CeilingArg {
    fn resolve(&self) -> usize {
        std::env::var("CIRC_CEILING_N").ok().and_then(|v| v.parse().ok()).or(self.ceiling).unwrap_or(DEFAULT_CEILING)
    }
}

#[derive(Subcommand, Debug)]
pub enum FamilyCommand {
    /// The circuit for H.
    #[command(name = "H", alias = "h")]
    H {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// The circuit beta_n computing G_1..G_n and H.
    Beta {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Check the elimination identity at random rational points.
    VerifyIdentity {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Sizes of the circuits of the defining formula.
    FormulaSize {
        #[arg(long)]
        n: usize,
    },
    /// Probabilistic injectivity of the point encoding.
    Identification {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum LbCommand {
    /// Exact rank of the jet matrix.
    RankCert {
        #[arg(long)]
        n: usize,
        /// `primes` or `random`.
        #[arg(long, default_value = "primes")]
        strategy: String,
        #[command(flatten)]
        ceiling: CeilingArg,
    },
    /// Check a candidate evaluator of the eliminant and report its cost.
    Audit {
        file: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Seed of the identification points the candidate reads.
        #[arg(long, default_value_t = 0)]
        points_seed: u64,
    },
    /// The interpolating evaluator, as a circuit file.
    Naive {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        points_seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand, Debug)]
pub enum ApproxCommand {
    /// Series of the outputs along the germ.
    Eval {
        file: PathBuf,
        #[arg(long)]
        germ: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        prec: usize,
    },
    /// Exact deviations from the limit at eps = 2^-k.
    Witness {
        file: PathBuf,
        #[arg(long)]
        germ: PathBuf,
        #[arg(long, default_value_t = 10)]
        kmax: u32,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        prec: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub seed: u64,
    pub version: String,
    pub input_hashes: BTreeMap<String, String>,
    pub wall_ms: u128,
    pub result_digest: String,
}

/// Outcome of one subcommand: a JSON result, a human view and a verdict.
struct Outcome {
    result: Value,
    text: String,
    pass: bool,
}

impl Outcome {
    fn ok(result: Value, text: impl Into<String>) -> Self {
        Outcome { result, text: text.into(), pass: true }
    }
    fn verdict(result: Value, text: impl Into<String>, pass: bool) -> Self {
        Outcome { result, text: text.into(), pass }
    }
}

#[derive(Debug)]
struct UsageError(String);

type Res<T> = Result<T, UsageError>;

fn err(e: impl std::fmt::Display) -> UsageError {
    UsageError(e.to_string())
}

struct Inputs {
    hashes: BTreeMap<String, String>,
}

impl Inputs {
    fn read(&mut self, p: &Path) -> Res<String> {
        let text = std::fs::read_to_string(p).map_err(|e| err(format!("{}: {e}", p.display())))?;
        self.hashes.insert(p.display().to_string(), hex::encode(Sha256::digest(text.as_bytes())));
        Ok(text)
    }

    fn circuit(&mut self, p: &Path) -> Res<Circuit> {
        let text = self.read(p)?;
        crate::circuit::parse(&text).map_err(|e| err(format!("{}: {e}", p.display())))
    }

    fn domain(&mut self, p: &Path) -> Res<ParameterDomain> {
        let text = self.read(p)?;
        serde_json::from_str(&text).map_err(|e| err(format!("{}: {e}", p.display())))
    }

    /// Germ file; `domain` may be inline or a path relative to the germ file.
    fn germ(&mut self, p: &Path, precision: usize) -> Res<ApproxInstance> {
        let v: Value = serde_json::from_str(&self.read(p)?).map_err(|e| err(format!("{}: {e}", p.display())))?;
        let entries: Vec<GermEntry> =
            serde_json::from_value(v.get("entries").cloned().unwrap_or(Value::Null)).map_err(|e| err(format!("entries: {e}")))?;
        let domain = match v.get("domain") {
            Some(Value::String(rel)) => self.domain(&p.parent().unwrap_or(Path::new(".")).join(rel))?,
            Some(d) => serde_json::from_value(d.clone()).map_err(|e| err(format!("domain: {e}")))?,
            None => ParameterDomain::affine(entries.len()),
        };
        ApproxInstance::new(entries, domain, precision).map_err(err)
    }
}

fn emit_circuit(c: &Circuit, out: &OutArg) -> Res<(Value, String)> {
    let text = serialize(c);
    match &out.out {
        Some(p) => {
            std::fs::write(p, &text).map_err(|e| err(format!("{}: {e}", p.display())))?;
            Ok((json!({ "written": p.display().to_string(), "nodes": c.len() }), format!("wrote {} ({} nodes)", p.display(), c.len())))
        }
        None => Ok((serde_json::to_value(c.to_file()).expect("serializes"), text)),
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report serializes")
}

fn parse_map(s: &str) -> Res<JoinSpec> {
    let pairs: Res<Vec<(usize, usize)>> = s
        .split(',')
        .map(|p| {
            let (a, b) = p.split_once(':').ok_or_else(|| err(format!("bad pair {p:?}")))?;
            Ok((a.trim().parse().map_err(err)?, b.trim().parse().map_err(err)?))
        })
        .collect();
    JoinSpec::from_pairs(&pairs?).map_err(err)
}

fn show_polys(ps: &[SparsePoly], names: &[String]) -> Vec<String> {
    ps.iter().map(|p| p.display_with(Some(names))).collect()
}

fn run(cli: &Cli, inp: &mut Inputs) -> Res<Outcome> {
    let seed = cli.seed;
    Ok(match &cli.command {
        Command::Validate { file } => {
            let text = inp.read(file)?;
            let f: CircuitFile = serde_json::from_str(&text).map_err(|e| err(format!("{}: {e}", file.display())))?;
            let r = validate(&f);
            let text = if r.violations.is_empty() { "valid".to_string() } else { r.to_string() };
            Outcome::verdict(json!({ "valid": r.is_valid(), "violations": r.violations }), text, r.is_valid())
        }
        Command::Classify { file } => {
            let c = inp.circuit(file)?;
            let t = classify(&c);
            let ed = is_essentially_division_free(&c);
            let td = is_totally_division_free(&c);
            let text = format!(
                "{} nodes, {} essential; essentially division-free: {ed}; totally division-free: {td}",
                c.len(),
                t.essential_nodes().len()
            );
            Outcome::ok(
                json!({ "nodes": t.nodes, "essential": t.essential_nodes(), "essentially_division_free": ed, "totally_division_free": td }),
                text,
            )
        }
        Command::Eval { file, params, inputs } => {
            let c = inp.circuit(file)?;
            match eval_point(&c, params, inputs) {
                Ok(tr) => {
                    let outs = tr.outputs();
                    let text = outs.iter().map(Scalar::to_string).collect::<Vec<_>>().join(" ");
                    Outcome::ok(json!({ "outputs": outs }), text)
                }
                Err(crate::semantics::SemanticsError::Arity { .. }) | Err(crate::semantics::SemanticsError::Shape) => {
                    return Err(err(format!("expected {} params and {} inputs", c.params(), c.inputs())))
                }
                Err(e) => Outcome::verdict(json!({ "error": e.to_string() }), e.to_string(), false),
            }
        }
        Command::Expand { file, budget } => {
            let c = inp.circuit(file)?;
            match expand_symbolic(&c, *budget) {
                Ok(x) => {
                    let names = x.var_names();
                    let outs: Vec<String> = x
                        .outputs
                        .iter()
                        .map(|r| format!("({}) / ({})", r.numer().display_with(Some(&names)), r.denom().display_with(Some(&names))))
                        .collect();
                    Outcome::ok(
                        json!({
                            "outputs": outs,
                            "polynomial_in_inputs": x.polynomial_in_inputs,
                            "essentially_division_free": x.essentially_division_free,
                            "totally_division_free": x.totally_division_free,
                        }),
                        outs.join("\n"),
                    )
                }
                Err(e) => Outcome::verdict(json!({ "error": e.to_string() }), e.to_string(), false),
            }
        }
        Command::Consistent { file, domain, trials, probabilistic } => {
            let c = inp.circuit(file)?;
            let d = match domain {
                Some(p) => inp.domain(p)?,
                None => ParameterDomain::affine(c.params()),
            };
            let mode = if *probabilistic {
                ConsistencyMode::Probabilistic { trials: *trials, seed }
            } else {
                ConsistencyMode::Exact { budget: 20_000, fallback_trials: *trials, seed }
            };
            let r = consistency_check(&c, &d, mode).map_err(err)?;
            let pass = !matches!(r.verdict, Verdict::Inconsistent { .. });
            Outcome::verdict(to_value(&r), format!("{:?} ({})", r.verdict, r.method), pass)
        }
        Command::Join { first, second, map, out } => {
            let g1 = inp.circuit(first)?;
            let g2 = inp.circuit(second)?;
            let spec = match map {
                Some(m) => parse_map(m)?,
                None => JoinSpec::identity(g1.outputs().len()),
            };
            match join(&g1, &g2, &spec) {
                Ok(j) => {
                    let (v, t) = emit_circuit(&j, out)?;
                    Outcome::ok(v, t)
                }
                Err(e @ crate::transforms::TransformError::InconsistentJoin { .. }) => {
                    Outcome::verdict(json!({ "error": e.to_string() }), e.to_string(), false)
                }
                Err(e) => return Err(err(e)),
            }
        }
        Command::Reduce { file, exact, samples, out } => {
            let c = inp.circuit(file)?;
            let oracle = if *exact {
                Oracle::Exact { seed, samples: *samples, budget: 20_000 }
            } else {
                Oracle::Fingerprint { seed, samples: *samples }
            };
            let r = reduce(&c, oracle).map_err(err)?;
            let (v, t) = emit_circuit(&r.circuit, out)?;
            let mut rep = to_value(&r);
            rep["circuit"] = v;
            Outcome::ok(rep, format!("{} -> {} nodes\n{t}", r.nodes_before, r.nodes_after))
        }
        Command::Gc { file, out } => {
            let c = inp.circuit(file)?;
            let g = garbage_collect(&c);
            let (v, t) = emit_circuit(&g, out)?;
            Outcome::ok(json!({ "nodes_before": c.len(), "nodes_after": g.len(), "circuit": v }), t)
        }
        Command::Restrict { file, domain, trials } => {
            let c = inp.circuit(file)?;
            let d = inp.domain(domain)?;
            let r = restrict(&c, &d, ConsistencyMode::Exact { budget: 20_000, fallback_trials: *trials, seed }).map_err(err)?;
            let text = format!("{:?}; approximative candidates {:?}", r.report.verdict, r.candidates);
            Outcome::ok(to_value(&r), text)
        }
        Command::Cost { file } => {
            let c = inp.circuit(file)?;
            let r = cost(&c);
            let a = parameter_audit(&c);
            let mut v = to_value(&r);
            v["essential_parameters"] = to_value(&a.essential_parameters);
            let text = format!(
                "non-scalar size {} ({} mults, {} divs), essential parameters {}, nodes {}, depth {}",
                r.nonscalar_size, r.essential_mults, r.essential_divs, r.essential_param_count, r.node_count, r.depth
            );
            Outcome::ok(v, text)
        }
        Command::Family { command } => family(command, seed)?,
        Command::Lb { command } => lb(command, seed)?,
        Command::Approx { command } => approx(command, inp)?,
        Command::Repro { suite, ceiling } => {
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            if let Some(bad) = names.iter().find(|n| !SUITES.contains(n)) {
                return Err(err(format!("unknown suite {bad:?}; expected one of {SUITES:?} or all")));
            }
            let ceiling = ceiling.resolve();
            let reports: Vec<SuiteReport> = names.iter().map(|n| run_suite(n, ceiling).expect("known suite")).collect();
            let pass = reports.iter().all(SuiteReport::pass);
            let mut text = String::new();
            for r in &reports {
                for row in &r.rows {
                    text += &format!("{:<16} {}: {}\n", r.name, row.label, if row.pass { "PASS" } else { "FAIL" });
                }
            }
            text += if pass { "all suites PASS" } else { "some suites FAIL" };
            Outcome::verdict(to_value(&reports), text, pass)
        }
    })
}

fn family(cmd: &FamilyCommand, seed: u64) -> Res<Outcome> {
    let need = |n: usize| if n == 0 { Err(err("--n must be positive")) } else { Ok(()) };
    Ok(match cmd {
        FamilyCommand::H { n, out } => {
            need(*n)?;
            let (v, t) = emit_circuit(&build_h(*n), out)?;
            Outcome::ok(json!({ "circuit": v, "params": h_param_names(*n) }), t)
        }
        FamilyCommand::Beta { n, out } => {
            need(*n)?;
            let (v, t) = emit_circuit(&build_beta_n(*n), out)?;
            Outcome::ok(json!({ "circuit": v }), t)
        }
        FamilyCommand::VerifyIdentity { n, trials } => {
            need(*n)?;
            let mut failures = Vec::new();
            for k in 0..*trials as u64 {
                let mut rng = trial_rng(seed, k);
                let t = random_rational(&mut rng);
                let u: Vec<Scalar> = (0..*n).map(|_| random_rational(&mut rng)).collect();
                if !verify_elimination_identity(*n, &t, &u).map_err(err)? {
                    failures.push(json!({ "t": t, "u": u }));
                }
            }
            let pass = failures.is_empty();
            let text = format!("n={n}: {} of {trials} trials hold", *trials - failures.len());
            Outcome::verdict(json!({ "n": n, "trials": trials, "failures": failures, "pass": pass }), text, pass)
        }
        FamilyCommand::FormulaSize { n } => {
            need(*n)?;
            let r = build_formula(*n, seed);
            let text = format!(
                "n={n}: {} constituents, total size {} (boolean {}, points {}, H {})",
                r.constituents, r.total_size, r.boolean_size, r.point_size, r.h_size
            );
            Outcome::ok(to_value(&r), text)
        }
        FamilyCommand::Identification { n, trials } => {
            need(*n)?;
            let pts = identification_points(*n, seed);
            let r = verify_identification(*n, &pts, *trials, seed);
            let text = format!("n={n}: K={}, {} distinct pairs, {} collisions", r.k, r.distinct_pairs, r.collisions);
            Outcome::verdict(to_value(&r), text, r.pass)
        }
    })
}

fn lb(cmd: &LbCommand, seed: u64) -> Res<Outcome> {
    Ok(match cmd {
        LbCommand::RankCert { n, strategy, ceiling } => {
            let s = match strategy.as_str() {
                "primes" => PointStrategy::Primes,
                "random" => PointStrategy::Random { seed },
                other => return Err(err(format!("unknown strategy {other:?}; expected primes or random"))),
            };
            match rank_certificate(*n, &s, ceiling.resolve()) {
                Ok(c) => {
                    let text = format!("n={n}: rank {} of {}: {}", c.rank, 1 << n, if c.pass { "PASS" } else { "FAIL" });
                    Outcome::verdict(to_value(&c), text, c.pass)
                }
                Err(e @ crate::lowerbound::LowerBoundError::Ceiling { .. }) => return Err(err(e)),
                Err(e) => Outcome::verdict(json!({ "error": e.to_string() }), e.to_string(), false),
            }
        }
        LbCommand::Audit { file, n, trials, points_seed } => {
            let text = std::fs::read_to_string(file).map_err(|e| err(format!("{}: {e}", file.display())))?;
            let c = crate::circuit::parse(&text).map_err(err)?;
            let pts = identification_points(*n, *points_seed);
            let r = audit_candidate(&c, *n, &pts, *trials, seed);
            let pass = r.verdict == AuditVerdict::Consistent;
            let text = format!(
                "{:?}; m = {}, essential mults = {}, bound 2^n = {}",
                r.verdict, r.m, r.essential_mults, r.bound
            );
            Outcome::verdict(to_value(&r), text, pass)
        }
        LbCommand::Naive { n, points_seed, out } => {
            let pts = identification_points(*n, *points_seed);
            let ev = naive_evaluator(*n, &pts).map_err(err)?;
            let (v, t) = emit_circuit(&ev.circuit, out)?;
            Outcome::ok(json!({ "circuit": v, "rows": ev.rows }), t)
        }
    })
}

fn approx(cmd: &ApproxCommand, inp: &mut Inputs) -> Res<Outcome> {
    Ok(match cmd {
        ApproxCommand::Eval { file, germ, prec } => {
            let c = inp.circuit(file)?;
            let inst = inp.germ(germ, *prec)?;
            let names = var_names(0, c.inputs());
            match approx_eval(&c, &inst) {
                Ok(r) => {
                    let series: Vec<Value> = r
                        .outputs
                        .iter()
                        .map(|s| {
                            json!({
                                "order": s.order(),
                                "abs_precision": s.abs_precision(),
                                "coeffs": show_polys(s.coeffs(), &names),
                            })
                        })
                        .collect();
                    let h = r.h.as_ref().map(|h| show_polys(h, &names));
                    let text = match &h {
                        Some(h) => format!("H = {}; tail zero: {}", h.join(", "), r.tail_is_zero()),
                        None => {
                            let (o, node) = r.min_order();
                            format!("not holomorphic: order {o} at node {node}")
                        }
                    };
                    Outcome::verdict(
                        json!({ "outputs": series, "holomorphic": r.holomorphic, "h": h, "tail_zero": r.tail_is_zero() }),
                        text,
                        r.holomorphic,
                    )
                }
                Err(e) => Outcome::verdict(json!({ "error": e.to_string() }), e.to_string(), false),
            }
        }
        ApproxCommand::Witness { file, germ, kmax, prec } => {
            let c = inp.circuit(file)?;
            let inst = inp.germ(germ, *prec)?;
            match convergence_witness(&c, &inst, *kmax) {
                Ok(w) => {
                    let mut text = String::new();
                    for r in &w.rows {
                        let d = r.deviation.as_ref().map_or_else(|| format!("skipped: {}", r.failure.clone().unwrap_or_default()), Scalar::to_string);
                        text += &format!("k={:<3} eps={:<10} deviation={d}\n", r.k, r.eps.to_string());
                    }
                    text += &format!("C = {}", w.constant);
                    let mut v = to_value(&w);
                    v["ratios"] = json!(w.ratios().iter().map(|(k, r)| json!({ "k": k, "ratio": r })).collect::<Vec<_>>());
                    Outcome::ok(v, text)
                }
                Err(e) => Outcome::verdict(json!({ "error": e.to_string() }), e.to_string(), false),
            }
        }
    })
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

/// Runs `circ` with the given arguments, writing to stdout and stderr, and
/// returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let start = Instant::now();
    let mut inp = Inputs { hashes: BTreeMap::new() };
    let out = match run(&cli, &mut inp) {
        Ok(o) => o,
        Err(UsageError(m)) => {
            eprintln!("error: {m}");
            return EXIT_USAGE;
        }
    };
    if cli.json {
        let digest = hex::encode(Sha256::digest(out.result.to_string().as_bytes()));
        let manifest = RunManifest {
            command: argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect::<Vec<_>>().join(" "),
            seed: cli.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            input_hashes: inp.hashes,
            wall_ms: start.elapsed().as_millis(),
            result_digest: digest,
        };
        let mut doc = json!({ "manifest": manifest, "pass": out.pass });
        match out.result {
            Value::Object(m) => doc.as_object_mut().expect("object").extend(m),
            other => doc["result"] = other,
        }
        emit(&serde_json::to_string_pretty(&doc).expect("serializes"));
    } else {
        emit(&out.text);
    }
    if out.pass {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

pub fn main() -> i32 {
    main_with_args(std::env::args_os())
}
