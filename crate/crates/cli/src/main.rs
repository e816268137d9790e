use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use asg_core::asg::{classical_asg_keystream, keystream, random_key, reduce, validate, AsgKey, AsgParams};
use asg_core::attack::{brute_force_oracle, oracle_work, run_attack, AttackConfig, ORACLE_WORK_CAP};
use asg_core::complexity::{estimate_table1, estimate_table2, ComplexityInputs, EstimateRow, JumpCount};
use asg_core::gf2::BitSequence;
use asg_core::io::{
    decode_bits, encode_bits, key_from_json, key_to_json, params_from_json, poly_to_hex, report_to_json,
    state_to_hex, BitFormat, KeyRecord,
};
use asg_core::sequence::{berlekamp_massey, measure_period};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "asg", version, about = "Alternating Step(r,s) generator workbench")]
struct Cli {
    /// Write a JSON record of this invocation to PATH.
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random valid key.
    Keygen {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Generate keystream bits.
    Keystream {
        #[command(flatten)]
        params: ParamsArg,
        #[command(flatten)]
        key: KeyArg,
        #[arg(long)]
        count: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        out: OutArg,
    },
    /// Recover a key from a keystream.
    Attack {
        #[command(flatten)]
        params: ParamsArg,
        #[command(flatten)]
        input: InArg,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = 16)]
        max_candidates: usize,
        /// Defaults to l + 20.
        #[arg(long)]
        verify_margin: Option<usize>,
        /// Skip jump guesses whose minimal polynomial does not match the fit.
        #[arg(long)]
        prefilter_minpoly: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Linear complexity, connection polynomial and period of a bitstream.
    Analyze {
        #[command(flatten)]
        input: InArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Complexity tables for given register lengths.
    Estimate {
        #[arg(short = 'l', requires_all = ["m", "n"], conflicts_with = "params")]
        l: Option<u32>,
        #[arg(short = 'm')]
        m: Option<u32>,
        #[arg(short = 'n')]
        n: Option<u32>,
        #[arg(long, value_name = "PATH", required_unless_present = "l")]
        params: Option<PathBuf>,
        /// Count admissible jumps exactly instead of 2^(m-1).
        #[arg(long)]
        exact_phi: bool,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Every key matching a keystream, by exhaustive search.
    Oracle {
        #[command(flatten)]
        params: ParamsArg,
        #[command(flatten)]
        input: InArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Print the equivalent classical ASG and check it against the original.
    Reduce {
        #[command(flatten)]
        params: ParamsArg,
        #[command(flatten)]
        key: KeyArg,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args)]
struct ParamsArg {
    #[arg(id = "params", long = "params", value_name = "PATH")]
    path: PathBuf,
    /// Enforce gcd(m, n) = 1 and coprime jumps.
    #[arg(long, overrides_with = "no_strict")]
    strict: bool,
    #[arg(long, overrides_with = "strict")]
    no_strict: bool,
}

#[derive(Args)]
struct KeyArg {
    #[arg(id = "key", long = "key", value_name = "PATH")]
    path: PathBuf,
}

#[derive(Args)]
struct InArg {
    #[arg(id = "in", long = "in", value_name = "PATH")]
    path: PathBuf,
}

#[derive(Args)]
struct OutArg {
    /// Defaults to standard output.
    #[arg(id = "out", long = "out", value_name = "PATH")]
    path: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Binary,
}

/// What a run read, wrote and was seeded with.
#[derive(Serialize)]
struct RunManifest {
    subcommand: &'static str,
    params: Option<PathBuf>,
    input: Option<PathBuf>,
    output: Option<PathBuf>,
    seed: Option<u64>,
    workers: Option<usize>,
}

/// A domain failure (exit status 1). Usage errors never get this far: clap
/// exits with status 2 on its own.
struct Failure(String);

impl From<asg_core::Error> for Failure {
    fn from(e: asg_core::Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure(e.to_string())
    }
}

fn fail(message: impl Into<String>) -> Failure {
    Failure(message.into())
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    String::from_utf8(read(path)?).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn write_out(out: &OutArg, data: &[u8]) -> CmdResult {
    match &out.path {
        Some(p) => fs::write(p, data).map_err(|e| fail(format!("{}: {e}", p.display()))),
        None => Ok(io::stdout().lock().write_all(data)?),
    }
}

fn load_params(arg: &ParamsArg) -> Result<AsgParams, Failure> {
    let mut p = params_from_json(&read_text(&arg.path)?)?;
    if arg.strict {
        p.strict = true;
    }
    if arg.no_strict {
        p.strict = false;
    }
    let v = p.violations();
    if !v.is_empty() {
        return Err(violations_failure(&v));
    }
    Ok(p)
}

fn violations_failure<T: std::fmt::Display>(v: &[T]) -> Failure {
    let lines: Vec<String> = v.iter().map(|x| format!("  {x}")).collect();
    fail(format!("invalid input:\n{}", lines.join("\n")))
}

fn load_key(arg: &KeyArg, params: &AsgParams) -> Result<AsgKey, Failure> {
    let key = key_from_json(&read_text(&arg.path)?, params)?;
    let v = validate(params, &key);
    if !v.is_empty() {
        return Err(violations_failure(&v));
    }
    Ok(key)
}

fn load_bits(arg: &InArg) -> Result<BitSequence, Failure> {
    Ok(decode_bits(&read(&arg.path)?)?)
}

fn json_line(value: &impl Serialize) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn cmd_keygen(params: &ParamsArg, seed: u64, out: &OutArg) -> CmdResult {
    let p = load_params(params)?;
    let key = random_key(&p, &mut ChaCha8Rng::seed_from_u64(seed))?;
    write_out(out, format!("{}\n", key_to_json(&key)).as_bytes())
}

fn cmd_keystream(params: &ParamsArg, key: &KeyArg, count: usize, format: Format, out: &OutArg) -> CmdResult {
    let p = load_params(params)?;
    let k = load_key(key, &p)?;
    let z = keystream(&p, &k, count)?;
    let format = match format {
        Format::Text => BitFormat::Text,
        Format::Binary => BitFormat::Binary,
    };
    write_out(out, &encode_bits(&z, format))
}

fn cmd_attack(
    params: &ParamsArg,
    input: &InArg,
    workers: usize,
    max_candidates: usize,
    verify_margin: Option<usize>,
    prefilter_minpoly: bool,
    out: &OutArg,
) -> CmdResult {
    let p = load_params(params)?;
    let z = load_bits(input)?;
    let mut config = AttackConfig::new(p, z);
    config.worker_count = workers;
    config.max_candidates = max_candidates;
    config.prefilter_minpoly = prefilter_minpoly;
    if let Some(v) = verify_margin {
        config.verify_margin = v;
    }
    let report = run_attack(&config)?;
    write_out(out, format!("{}\n", report_to_json(&report)).as_bytes())?;
    if report.recovered_keys.is_empty() {
        return Err(fail("no key recovered"));
    }
    Ok(())
}

fn cmd_analyze(input: &InArg, out: &OutArg) -> CmdResult {
    let z = load_bits(input)?;
    let fit = berlekamp_massey(&z);
    let period = measure_period(&z).ok();
    write_out(
        out,
        &json_line(&json!({
            "length": z.len(),
            "linear_complexity": fit.linear_complexity,
            "connection": fit.connection.to_string(),
            "connection_hex": poly_to_hex(&fit.connection),
            "feedback": fit.feedback().to_string(),
            "feedback_hex": poly_to_hex(&fit.feedback()),
            "period": period,
        })),
    )
}

fn format_table(title: &str, rows: &[EstimateRow]) -> String {
    let mut s = format!("{title}\n");
    s += &format!(
        "{:<42} {:>10} {:>12} {:>10}\n",
        "attack", "mklr log2", "complexity", "at 64"
    );
    for r in rows {
        let mklr = r.mklr_log2.map_or("-".to_string(), |v| format!("{v:.2}"));
        let flag = if r.formula_mismatch { "  (table value disagrees with formula)" } else { "" };
        s += &format!(
            "{:<42} {:>10} {:>12.2} {:>10.1}{flag}\n",
            r.attack_name, mklr, r.complexity_log2, r.tabulated_log2_at_64
        );
    }
    s
}

fn row_json(r: &EstimateRow) -> serde_json::Value {
    json!({
        "attack_name": r.attack_name,
        "mklr_log2": r.mklr_log2,
        "complexity_log2": r.complexity_log2,
        "tabulated_log2_at_64": r.tabulated_log2_at_64,
        "formula_mismatch": r.formula_mismatch,
    })
}

fn cmd_estimate(
    lmn: Option<(u32, u32, u32)>,
    params: Option<&Path>,
    exact_phi: bool,
    as_json: bool,
    out: &OutArg,
) -> CmdResult {
    let (l, m, n) = match (lmn, params) {
        (Some(t), _) => t,
        (None, Some(path)) => {
            let p = params_from_json(&read_text(path)?)?;
            let c = |x: usize| u32::try_from(x).map_err(|_| fail("register length too large"));
            (c(p.l)?, c(p.m)?, c(p.n)?)
        }
        (None, None) => unreachable!("clap requires -l/-m/-n or --params"),
    };
    let mut inputs = ComplexityInputs::new(l, m, n);
    if exact_phi {
        inputs = inputs.with_jump_count(JumpCount::Exact);
    }
    let t1 = estimate_table1(&inputs)?;
    let t2 = estimate_table2(&inputs)?;
    let data = if as_json {
        json_line(&json!({
            "l": l, "m": m, "n": n,
            "classical_asg": t1.iter().map(row_json).collect::<Vec<_>>(),
            "asg_r_s": t2.iter().map(row_json).collect::<Vec<_>>(),
        }))
    } else {
        format!(
            "l = {l}, m = {m}, n = {n}\n\n{}\n{}",
            format_table("Attacks on the classical ASG", &t1),
            format_table("Attacks on ASG(r,s)", &t2)
        )
        .into_bytes()
    };
    write_out(out, &data)
}

fn cmd_oracle(params: &ParamsArg, input: &InArg, out: &OutArg) -> CmdResult {
    let p = load_params(params)?;
    let z = load_bits(input)?;
    let work = oracle_work(&p);
    if work > ORACLE_WORK_CAP {
        return Err(fail(format!(
            "refusing brute force: {work} key trials exceed the cap of {ORACLE_WORK_CAP} (2^26)"
        )));
    }
    let keys = brute_force_oracle(&p, &z)?;
    let records: Vec<KeyRecord> = keys.iter().map(KeyRecord::from).collect();
    write_out(out, &json_line(&json!({ "work": work, "matching_keys": records })))?;
    if keys.is_empty() {
        return Err(fail("no matching key"));
    }
    Ok(())
}

fn cmd_reduce(params: &ParamsArg, key: &KeyArg, count: usize, out: &OutArg) -> CmdResult {
    let p = load_params(params)?;
    let k = load_key(key, &p)?;
    let model = reduce(&p, &k)?;
    let equivalent = classical_asg_keystream(&model, count)? == keystream(&p, &k, count)?;
    write_out(
        out,
        &json_line(&json!({
            "beta_feedback": poly_to_hex(model.beta_spec.feedback()),
            "beta_state": state_to_hex(model.beta_state.cells()),
            "lambda_feedback": poly_to_hex(model.lambda_spec.feedback()),
            "lambda_state": state_to_hex(model.lambda_state.cells()),
            "control_state": state_to_hex(model.control.state().cells()),
            "checked_bits": count,
            "equivalent": equivalent,
        })),
    )?;
    if !equivalent {
        return Err(fail("reduced model diverges from the generator"));
    }
    Ok(())
}

fn manifest(cmd: &Command) -> RunManifest {
    let mut m = RunManifest {
        subcommand: "",
        params: None,
        input: None,
        output: None,
        seed: None,
        workers: None,
    };
    match cmd {
        Command::Keygen { params, seed, out } => {
            m.subcommand = "keygen";
            m.params = Some(params.path.clone());
            m.seed = Some(*seed);
            m.output = out.path.clone();
        }
        Command::Keystream { params, key, out, .. } => {
            m.subcommand = "keystream";
            m.params = Some(params.path.clone());
            m.input = Some(key.path.clone());
            m.output = out.path.clone();
        }
        Command::Attack {
            params,
            input,
            workers,
            out,
            ..
        } => {
            m.subcommand = "attack";
            m.params = Some(params.path.clone());
            m.input = Some(input.path.clone());
            m.output = out.path.clone();
            m.workers = Some(*workers);
        }
        Command::Analyze { input, out } => {
            m.subcommand = "analyze";
            m.input = Some(input.path.clone());
            m.output = out.path.clone();
        }
        Command::Estimate { params, out, .. } => {
            m.subcommand = "estimate";
            m.params = params.clone();
            m.output = out.path.clone();
        }
        Command::Oracle { params, input, out } => {
            m.subcommand = "oracle";
            m.params = Some(params.path.clone());
            m.input = Some(input.path.clone());
            m.output = out.path.clone();
        }
        Command::Reduce { params, key, out, .. } => {
            m.subcommand = "reduce";
            m.params = Some(params.path.clone());
            m.input = Some(key.path.clone());
            m.output = out.path.clone();
        }
    }
    m
}

fn run(cli: &Cli) -> CmdResult {
    if let Some(path) = &cli.manifest {
        fs::write(path, json_line(&manifest(&cli.command))).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    }
    match &cli.command {
        Command::Keygen { params, seed, out } => cmd_keygen(params, *seed, out),
        Command::Keystream {
            params,
            key,
            count,
            format,
            out,
        } => cmd_keystream(params, key, *count, *format, out),
        Command::Attack {
            params,
            input,
            workers,
            max_candidates,
            verify_margin,
            prefilter_minpoly,
            out,
        } => cmd_attack(
            params,
            input,
            *workers,
            *max_candidates,
            *verify_margin,
            *prefilter_minpoly,
            out,
        ),
        Command::Analyze { input, out } => cmd_analyze(input, out),
        Command::Estimate {
            l,
            m,
            n,
            params,
            exact_phi,
            json,
            out,
        } => {
            let lmn = l.map(|l| (l, m.expect("clap requires -m"), n.expect("clap requires -n")));
            cmd_estimate(lmn, params.as_deref(), *exact_phi, *json, out)
        }
        Command::Oracle { params, input, out } => cmd_oracle(params, input, out),
        Command::Reduce {
            params,
            key,
            count,
            out,
        } => cmd_reduce(params, key, *count, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.0);
            ExitCode::FAILURE
        }
    }
}
