//! `precurse`: batch front end for the exact computations in `precurse-core`.
//!
//! Tables go to standard output (or `--output`) as CSV, structured results
//! as JSON. Exit codes: 0 success, 1 domain error, 2 usage error, 3 budget
//! exceeded.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use precurse_core::automaton::{self, b_closed_form, FlatSearch, LabeledAutomaton};
use precurse_core::holo::{
    contains_subword, eval_recurrence, forbidden_word, guess_recurrence, parity_prefix, subword_complexity,
    BitWord, EvalMode, Recurrence, SequencePrefix,
};
use precurse_core::walk::{self, asymptotic_report, ln_rational, return_counts, return_probability, GeneratingSet};
use precurse_core::witness::{self, WitnessSet};
use precurse_core::words::PairAlphabet;
use precurse_core::DEFAULT_BUDGET;

#[derive(Parser)]
#[command(name = "precurse", version, about = "Exact return counts, flat paths and P-recursiveness tools")]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Memo/support budget for the exact searches.
    #[arg(long, global = true, env = "PRECURSE_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the accepting-length sequence b_n of Gamma.
    ///
    /// Terms come from the closed form L(k, j) = j + 6k + 2 sum floor(log2 i)
    /// and can be cross-checked against the flat-path DFS.
    ///
    /// Columns: n, b (closed form); with --check dfs also dfs, agree.
    B {
        #[arg(long, default_value_t = 60)]
        max: u64,
        /// Cross-check each term; only `dfs` is supported.
        #[arg(long, value_parser = ["dfs"])]
        check: Option<String>,
    },
    /// List flat accepting paths of one length.
    ///
    /// Output is JSON: edge sequences with running label products, for Gamma
    /// or for the automaton given with --automaton.
    Paths {
        #[arg(long)]
        length: usize,
        /// Automaton in the text format; defaults to the bundled Gamma.
        #[arg(long)]
        automaton: Option<PathBuf>,
    },
    /// Inspect the witness element u in Z[F11 x F3].
    Witness {
        #[command(subcommand)]
        action: WitnessAction,
    },
    /// Guess a recurrence with polynomial coefficients.
    ///
    /// Uses an exact nullspace computation with held-out terms. Prints the
    /// recurrence as JSON, or null if none of the allowed shapes fits.
    Guess {
        /// CSV with columns index,value.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_order: usize,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
    },
    /// Evaluate a recurrence from seed terms.
    ///
    /// Columns: index, value. With --parity prints the parity word instead.
    Eval {
        #[command(flatten)]
        rec: RecurrenceArgs,
        #[arg(long)]
        count: usize,
        /// Allow non-integral terms.
        #[arg(long)]
        rational: bool,
        /// Print a_n mod 2 as a bit string, computed without full terms.
        #[arg(long, conflicts_with = "rational")]
        parity: bool,
    },
    /// Build the forbidden parity factor of a recurrence.
    ///
    /// No integer solution has v as a factor of its parity word. With --scan,
    /// searches the parity word of the seeded solution for v.
    Forbidden {
        #[command(flatten)]
        rec: RecurrenceArgs,
        /// Length of parity prefix to scan (requires --seeds).
        #[arg(long, requires = "seeds")]
        scan: Option<usize>,
    },
    /// Count distinct factors of a binary word.
    ///
    /// Lengths 0..=max-n. The counts are lower bounds for any infinite
    /// extension of the prefix.
    Complexity {
        #[command(flatten)]
        source: WordSource,
        #[arg(long, default_value_t = 10)]
        max_n: usize,
    },
    /// Exact return counts of the random walk on H = Z x| Z^2.
    ///
    /// Uses the generating set E or a fixture. Columns: n, a_n, p_n with
    /// p_n = a_n/|S|^n as an exact fraction.
    Walk {
        #[command(flatten)]
        set: WalkSet,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// Element cap for intermediate distributions.
        #[arg(long, default_value_t = walk::DEFAULT_BALL_CAP)]
        cap: usize,
        /// Emit n, log p(2n) for even steps instead.
        #[arg(long)]
        log: bool,
    },
    /// Fit log p(2n) against three growth shapes.
    ///
    /// Least squares against c*n, c*n^(1/3) and c*log n. Floating point and
    /// diagnostic only; not a certificate of any asymptotics.
    Fit {
        /// CSV from `precurse walk` (n, a_n, p_n); otherwise the walk is run.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        set: WalkSet,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
}

#[derive(Subcommand)]
enum WitnessAction {
    /// List z_1..z_19 and the weighted terms of u.
    Terms,
    /// Compare S-products onto s1^-1 s8 with flat path counts.
    ///
    /// Rows n = 0..=max. Columns: n, products, paths, agree.
    Correspondence {
        #[arg(long, default_value_t = 24)]
        max: usize,
    },
    /// Compare [1]u^n mod 4 with 2n*b_(n-1) mod 4 for odd n.
    ///
    /// The left side comes from the pruned ring search. Columns: n, search,
    /// law, agree.
    Mod4 {
        /// Odd exponents.
        #[arg(long, value_delimiter = ',', default_value = "1,3,5,7,9,11,13,17")]
        exponents: Vec<usize>,
    },
    /// SL(4,Z) image of a pair word, e.g. "s1^-1 x y s1", as JSON.
    Sl4 {
        #[arg(long, allow_hyphen_values = true)]
        element: String,
    },
}

#[derive(Args)]
struct RecurrenceArgs {
    /// Recurrence JSON: {"order": k, "polys": [[c0, c1, ...], ...]}.
    #[arg(long)]
    recurrence: PathBuf,
    /// Comma-separated seed terms a_start, a_start+1, ...
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    seeds: Option<Vec<String>>,
    /// Index of the first seed.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    start: i64,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct WordSource {
    /// File holding a 0/1 string (whitespace ignored).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Use b_1..b_N from the closed form.
    #[arg(long)]
    b_prefix: Option<u64>,
}

#[derive(Args)]
struct WalkSet {
    /// `H` for the bundled set E, or a path to a fixture JSON.
    #[arg(long, default_value = "H")]
    fixture: String,
}

#[derive(Debug)]
enum Failure {
    Domain(String),
    Budget(String),
}

impl From<precurse_core::Error> for Failure {
    fn from(e: precurse_core::Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

macro_rules! via_core {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                precurse_core::Error::from(e).into()
            }
        }
    )*};
}

via_core!(
    precurse_core::words::WordError,
    precurse_core::ring::RingError,
    precurse_core::automaton::AutomatonError,
    precurse_core::holo::HoloError,
    precurse_core::walk::WalkError
);

macro_rules! domain {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::Domain(e.to_string())
            }
        }
    )*};
}

domain!(io::Error, serde_json::Error, csv::Error, std::string::FromUtf8Error);

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("precurse: {e}");
            return ExitCode::from(1);
        }
    }
    let result = run(&cli).and_then(|text| emit(cli.output.as_ref(), &text));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(m)) => {
            eprintln!("precurse: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Budget(m)) => {
            eprintln!("precurse: {m}");
            ExitCode::from(3)
        }
    }
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    let budget = cli.budget;
    match &cli.command {
        Command::B { max, check } => cmd_b(*max, check.is_some(), budget),
        Command::Paths { length, automaton } => cmd_paths(*length, automaton.as_ref(), budget),
        Command::Witness { action } => cmd_witness(action, budget),
        Command::Guess {
            input,
            max_order,
            max_degree,
        } => cmd_guess(input, *max_order, *max_degree),
        Command::Eval {
            rec,
            count,
            rational,
            parity,
        } => cmd_eval(rec, *count, *rational, *parity),
        Command::Forbidden { rec, scan } => cmd_forbidden(rec, *scan),
        Command::Complexity { source, max_n } => cmd_complexity(source, *max_n),
        Command::Walk { set, steps, cap, log } => cmd_walk(set, *steps, *cap, *log),
        Command::Fit { input, set, steps } => cmd_fit(input.as_ref(), set, *steps),
    }
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Outcome {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Domain(e.to_string()))?;
    Ok(String::from_utf8(bytes)?)
}

fn json_text(v: &Value) -> Outcome {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn cmd_b(max: u64, check: bool, budget: usize) -> Outcome {
    if !check {
        return csv_table(&["n", "b"], (0..=max).map(|n| vec![n.to_string(), b_closed_form(n).to_string()]));
    }
    let gamma = automaton::gamma();
    let mut dfs = FlatSearch::new(&gamma, budget);
    let mut rows = Vec::new();
    for n in 0..=max {
        let closed = b_closed_form(n);
        let paths = dfs.count(n as usize)?;
        rows.push(vec![
            n.to_string(),
            closed.to_string(),
            paths.to_string(),
            (paths == BigInt::from(closed)).to_string(),
        ]);
    }
    csv_table(&["n", "b", "dfs", "agree"], rows)
}

fn cmd_paths(length: usize, path: Option<&PathBuf>, budget: usize) -> Outcome {
    let aut = match path {
        Some(p) => LabeledAutomaton::parse(&fs::read_to_string(p)?, PairAlphabet::standard())?,
        None => automaton::gamma(),
    };
    let ab = aut.alphabet();
    let certs = aut.enumerate_flat_paths(length, budget)?;
    let list: Vec<Value> = certs
        .iter()
        .map(|c| {
            let steps: Vec<Value> = c
                .edges
                .iter()
                .zip(&c.products)
                .map(|(&e, p)| {
                    let edge = &aut.edges()[e];
                    json!({
                        "edge": e,
                        "from": aut.vertices()[edge.source],
                        "to": aut.vertices()[edge.target],
                        "label": ab.format_pair(&edge.label),
                        "product": ab.format_pair(p),
                    })
                })
                .collect();
            json!({ "length": c.len(), "steps": steps })
        })
        .collect();
    json_text(&json!({ "automaton": aut.digest(), "length": length, "paths": list }))
}

fn cmd_witness(action: &WitnessAction, budget: usize) -> Outcome {
    let ab = PairAlphabet::standard();
    match action {
        WitnessAction::Terms => {
            let set = WitnessSet::standard();
            let rows = set
                .u_terms()
                .iter()
                .enumerate()
                .map(|(i, (z, w))| {
                    let name = if i < set.z.len() { format!("z{}", i + 1) } else { "closing".to_string() };
                    vec![name, ab.format_pair(z), w.to_string()]
                })
                .collect::<Vec<_>>();
            csv_table(&["name", "element", "weight"], rows)
        }
        WitnessAction::Correspondence { max } => {
            let rows = witness::correspondence_table(*max, budget)?;
            csv_table(
                &["n", "products", "paths", "agree"],
                rows.iter().map(|r| {
                    vec![r.n.to_string(), r.products.to_string(), r.paths.to_string(), r.agrees().to_string()]
                }),
            )
        }
        WitnessAction::Mod4 { exponents } => {
            let mut rows = Vec::new();
            for &n in exponents {
                if n % 2 == 0 {
                    return Err(Failure::Domain(format!("exponent {n} is even")));
                }
                let search = witness::brute_force_u_mod4(n, budget)?;
                let law = witness::a_odd_mod4((n as u64 - 1) / 2);
                rows.push(vec![n.to_string(), search.to_string(), law.to_string(), (search == law).to_string()]);
            }
            csv_table(&["n", "search", "law", "agree"], rows)
        }
        WitnessAction::Sl4 { element } => {
            let e = ab.parse_pair(element)?;
            let m = witness::sl4_realize(&e);
            json_text(&json!({
                "element": ab.format_pair(&e),
                "matrix": m.to_json(),
                "determinant": m.determinant().to_string(),
            }))
        }
    }
}

fn read_recurrence(args: &RecurrenceArgs) -> Result<Recurrence, Failure> {
    let v: Value = serde_json::from_str(&fs::read_to_string(&args.recurrence)?)?;
    Ok(Recurrence::from_json(&v)?)
}

fn read_seeds(args: &RecurrenceArgs) -> Result<SequencePrefix, Failure> {
    let seeds = args
        .seeds
        .as_ref()
        .ok_or_else(|| Failure::Domain("--seeds is required".into()))?;
    let terms = seeds
        .iter()
        .map(|s| s.trim().parse::<BigRational>().map_err(|_| Failure::Domain(format!("bad seed {s:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SequencePrefix::new(args.start, terms))
}

fn cmd_guess(input: &PathBuf, max_order: usize, max_degree: usize) -> Outcome {
    let seq = SequencePrefix::read_csv(fs::File::open(input)?)?;
    match guess_recurrence(&seq, max_order, max_degree)? {
        Some(r) => json_text(&r.to_json()),
        None => Ok("null\n".to_string()),
    }
}

fn cmd_eval(args: &RecurrenceArgs, count: usize, rational: bool, parity: bool) -> Outcome {
    let r = read_recurrence(args)?;
    let seeds = read_seeds(args)?;
    if parity {
        return Ok(format!("{}\n", parity_prefix(&r, &seeds, count)?));
    }
    let mode = if rational { EvalMode::Rational } else { EvalMode::Integer };
    let seq = eval_recurrence(&r, &seeds, count, mode)?;
    let mut out = Vec::new();
    seq.write_csv(&mut out)?;
    Ok(String::from_utf8(out)?)
}

fn cmd_forbidden(args: &RecurrenceArgs, scan: Option<usize>) -> Outcome {
    let r = read_recurrence(args)?;
    let f = forbidden_word(&r);
    let mut out = json!({
        "l": f.l,
        "m": f.m,
        "d": f.d,
        "v": f.v.to_string(),
        "length": f.v.len(),
    });
    if let Some(len) = scan {
        let w = parity_prefix(&r, &read_seeds(args)?, len)?;
        out["scanned"] = json!(len);
        out["found_at"] = json!(contains_subword(&w, &f.v));
    }
    json_text(&out)
}

fn cmd_complexity(source: &WordSource, max_n: usize) -> Outcome {
    let w = match (&source.input, source.b_prefix) {
        (Some(p), _) => {
            let text: String = fs::read_to_string(p)?.chars().filter(|c| !c.is_whitespace()).collect();
            BitWord::parse(&text)?
        }
        (None, Some(len)) => BitWord::new(1, automaton::b_prefix(len)),
        (None, None) => unreachable!("clap requires one source"),
    };
    let mut rows = Vec::new();
    for n in 0..=max_n {
        let c = subword_complexity(&w, n)?;
        rows.push(vec![n.to_string(), c.to_string(), (c == 1usize << n).to_string()]);
    }
    let table = csv_table(&["n", "factors", "complete"], rows)?;
    Ok(format!(
        "# prefix length {}; factor counts are lower bounds for the infinite word\n{table}",
        w.len()
    ))
}

fn load_set(set: &WalkSet) -> Result<GeneratingSet, Failure> {
    if set.fixture == "H" {
        return Ok(GeneratingSet::h_standard());
    }
    let v: Value = serde_json::from_str(&fs::read_to_string(&set.fixture)?)?;
    Ok(GeneratingSet::from_fixture_json(&v)?)
}

fn cmd_walk(set: &WalkSet, steps: usize, cap: usize, log: bool) -> Outcome {
    let s = load_set(set)?;
    let a = return_counts(&s, steps, cap)?;
    let p = return_probability(&a, s.total_weight());
    if log {
        let rows = (1..)
            .map(|n| 2 * n)
            .take_while(|&i| i <= steps)
            .map(|i| {
                let l = ln_rational(&p[i]).map_or("-inf".to_string(), |x| format!("{x:.12e}"));
                vec![(i / 2).to_string(), l]
            })
            .collect::<Vec<_>>();
        return csv_table(&["n", "log_p_2n"], rows);
    }
    csv_table(
        &["n", "a_n", "p_n"],
        a.iter().zip(&p).enumerate().map(|(n, (an, pn))| {
            vec![n.to_string(), an.to_string(), format!("{}/{}", pn.numer(), pn.denom())]
        }),
    )
}

fn read_walk_csv(path: &PathBuf) -> Result<Vec<BigRational>, Failure> {
    let mut rdr = csv::Reader::from_reader(fs::File::open(path)?);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let n: usize = rec.get(0).unwrap_or("").parse().map_err(|_| Failure::Domain(format!("row {}: bad n", i + 1)))?;
        if n != i {
            return Err(Failure::Domain(format!("row {}: expected n = {i}", i + 1)));
        }
        let p = rec
            .get(2)
            .and_then(|s| s.parse::<BigRational>().ok())
            .ok_or_else(|| Failure::Domain(format!("row {}: bad p_n", i + 1)))?;
        out.push(p);
    }
    Ok(out)
}

fn cmd_fit(input: Option<&PathBuf>, set: &WalkSet, steps: usize) -> Outcome {
    let p = match input {
        Some(path) => read_walk_csv(path)?,
        None => {
            let s = load_set(set)?;
            return_probability(&return_counts(&s, steps, walk::DEFAULT_BALL_CAP)?, s.total_weight())
        }
    };
    let pf: Vec<f64> = p.iter().map(|q| ln_rational(q).map_or(0.0, f64::exp)).collect();
    let rep = asymptotic_report(&pf)?;
    let fits: Vec<Value> = rep
        .fits
        .iter()
        .map(|f| {
            json!({
                "shape": f.shape.name(),
                "intercept": f.intercept,
                "slope": f.slope,
                "rms_residual": f.residual,
            })
        })
        .collect();
    json_text(&json!({
        "diagnostic": "floating-point least squares on a finite prefix; not a certificate",
        "points": rep.points,
        "fits": fits,
        "best": rep.best().shape.name(),
    }))
}
