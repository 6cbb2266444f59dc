use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sepbound::error::ErrorClass;
use sepbound::field_oracle::cross_validate;
use sepbound::separating::{
    check_separating_monomials, equality_case, extremal_sequence, group_report, min_separating_bound_for_subset,
    CharacterSequence, Mode,
};
use sepbound::suites::random_monomial_suite;
use sepbound::verify::{dstar_inequality_sweep, subgroup_lemmas, verify_main, verify_strict, MainRow, CSV_HEADER};
use sepbound::zerosum::{davenport, decompose, enumerate_b};
use sepbound::{beta_sep, AbelianGroup, BetaSepOptions, Error, GSequence};

#[derive(Parser)]
#[command(
    name = "sepbound",
    version,
    about = "Separating Noether numbers of finite abelian groups"
)]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Config {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    /// Largest group order for beta_sep; also the range of sweeps.
    #[arg(long, global = true, env = "SEPBOUND_MAX_ORDER", default_value_t = 32,
          value_parser = clap::value_parser!(u64).range(1..))]
    max_order: u64,
    #[arg(long, global = true, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    max_rank: u64,
    /// Largest number of points q^k for the field oracle.
    #[arg(long, global = true, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    point_cap: u64,
    #[arg(long, global = true, default_value_t = 32, value_parser = clap::value_parser!(u64).range(1..))]
    davenport_cap: u64,
    /// Restrict zero-sum enumeration to m_i < ord(a_i) plus pure powers.
    #[arg(long, global = true, default_value_t = true, action = ArgAction::Set)]
    span_only: bool,
    /// Evaluate one subset per automorphism orbit in beta_sep.
    #[arg(long, global = true)]
    aut_reduction: bool,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Full)]
    mode: ModeArg,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Helly,
}

#[derive(Subcommand)]
enum Command {
    /// Rank, exponent, order, d* and Helly dimension.
    Stats(GroupArg),
    /// Davenport constant with a witness atom.
    Davenport(GroupArg),
    /// The separating Noether number.
    Betasep {
        #[command(flatten)]
        group: GroupArg,
        /// Include the minimal bound of every evaluated subset.
        #[arg(long)]
        per_subset: bool,
    },
    /// Check whether a monomial set (JSON array of exponent vectors) separates.
    CheckSep {
        #[command(flatten)]
        group: GroupArg,
        #[command(flatten)]
        chars: CharsArg,
        #[arg(long)]
        monomials: PathBuf,
    },
    /// The extremal sequence and its non-generation at length d*.
    Extremal(GroupArg),
    /// Write a kernel-lattice vector as a combination of bounded zero-sum vectors.
    Decompose {
        #[command(flatten)]
        group: GroupArg,
        #[command(flatten)]
        chars: CharsArg,
        /// Comma-separated integer vector.
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
        /// d* or d*+1 (default d*+1).
        #[arg(long)]
        bound: Option<u64>,
    },
    /// beta_sep, D and the equality classification for every group up to --max-order.
    VerifyMain,
    /// beta_sep < D for every group outside the equality case up to --max-order.
    VerifyStrict,
    /// Compare the lattice criterion with the finite-field oracle.
    CrossValidate {
        #[arg(long, value_parser = parse_factors)]
        group: Option<Factors>,
        #[arg(long)]
        chars: Option<String>,
        #[arg(long)]
        monomials: Option<PathBuf>,
        /// Run this many seeded random instances with |G| <= --max-order.
        #[arg(long, conflicts_with_all = ["group", "chars", "monomials"])]
        random: Option<usize>,
        #[arg(long, default_value_t = 3)]
        max_k: usize,
    },
    /// Subgroup and chain-order inequalities on d*, plus the exhaustive d* inequality scan.
    SubgroupLemmas {
        /// Largest order for which generating sequences are enumerated.
        #[arg(long, default_value_t = 16)]
        sequence_order: u64,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        #[arg(long, default_value_t = 24)]
        max_n1: u64,
        #[arg(long, default_value_t = 3)]
        max_r: usize,
    },
}

#[derive(Args)]
struct GroupArg {
    /// Factors such as 4,2 (any decomposition; normalized to invariant factors).
    #[arg(long, value_parser = parse_factors)]
    group: Factors,
}

#[derive(Args)]
struct CharsArg {
    /// Elements separated by ';', coordinates by ',', e.g. "1,0;1,1;0,1".
    #[arg(long)]
    chars: String,
}

#[derive(Clone)]
struct Factors(Vec<u64>);

fn parse_list(s: &str) -> Result<Vec<u64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.trim().parse::<u64>().map_err(|e| format!("`{x}`: {e}")))
        .collect()
}

fn parse_factors(s: &str) -> Result<Factors, String> {
    parse_list(s).map(Factors)
}

fn parse_elements(s: &str) -> Result<Vec<Vec<u64>>, Failure> {
    s.split(';').map(|e| parse_list(e).map_err(Failure::Usage)).collect()
}

enum Failure {
    Usage(String),
    Core(Error),
    /// A verification found a violated statement.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(e) => match e.class() {
                ErrorClass::Input => 2,
                ErrorClass::Cap => 3,
                ErrorClass::Internal => 4,
            },
            Failure::Check(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Check(m) => f.write_str(m),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

/// Text to print, and whether a verification failed after printing.
struct Outcome {
    output: String,
    failed: Option<String>,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome { output, failed: None }
    }
}

fn json_out(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn coords(seq: &GSequence) -> Vec<Vec<u64>> {
    seq.elems().iter().map(|e| e.coords().to_vec()).collect()
}

impl Config {
    fn beta_opts(&self) -> BetaSepOptions {
        BetaSepOptions {
            max_order: self.max_order,
            max_rank: self.max_rank as usize,
            workers: self.workers.map(|w| w as usize),
            aut_reduction: self.aut_reduction,
            span_only: self.span_only,
        }
    }

    fn mode(&self) -> Mode {
        match self.mode {
            ModeArg::Full => Mode::Full,
            ModeArg::Helly => Mode::Helly,
        }
    }

    fn reject_csv(&self) -> Result<(), Failure> {
        if self.format == Format::Csv {
            return Err(Failure::Usage(
                "csv output is only available for verify-main and verify-strict".into(),
            ));
        }
        Ok(())
    }
}

fn group_of(factors: &Factors) -> Result<AbelianGroup, Failure> {
    Ok(AbelianGroup::make(&factors.0, true)?)
}

fn chars_of(group: &AbelianGroup, s: &str) -> Result<CharacterSequence, Failure> {
    Ok(CharacterSequence::from_coords(group, &parse_elements(s)?)?)
}

fn read_monomials(path: &PathBuf) -> Result<Vec<Vec<u64>>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn table(cfg: &Config, rows: &[MainRow]) -> Outcome {
    let output = match cfg.format {
        Format::Json => json_out(&serde_json::to_value(rows).expect("rows serialize")),
        Format::Csv => {
            let mut s = String::from(CSV_HEADER);
            for r in rows {
                s.push('\n');
                s.push_str(&r.to_csv());
            }
            s
        }
        Format::Text => rows.iter().map(MainRow::to_text).collect::<Vec<_>>().join("\n"),
    };
    let bad: Vec<String> = rows.iter().filter(|r| !r.ok).map(|r| r.group.to_string()).collect();
    Outcome {
        output,
        failed: (!bad.is_empty()).then(|| format!("failing groups: {}", bad.join(", "))),
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Stats(g) => {
            cfg.reject_csv()?;
            let group = group_of(&g.group)?;
            let s = group.stats();
            Ok(Outcome::ok(match cfg.format {
                Format::Text => format!(
                    "{group}: order {} rank {} exponent {} d* {} kappa {}",
                    s.order, s.rank, s.exponent, s.dstar, s.kappa
                ),
                _ => json_out(&json!({
                    "group": group,
                    "order": s.order,
                    "rank": s.rank,
                    "exponent": s.exponent,
                    "dstar": s.dstar,
                    "kappa": s.kappa,
                    "cyclic": group.is_cyclic(),
                    "pGroup": group.is_p_group(),
                })),
            }))
        }
        Command::Davenport(g) => {
            cfg.reject_csv()?;
            let group = group_of(&g.group)?;
            let d = davenport(&group, cfg.davenport_cap)?;
            Ok(Outcome::ok(match cfg.format {
                Format::Text => format!("{group}: D = {} (d*+1 = {})", d.value, group.dstar() + 1),
                _ => json_out(&json!({
                    "group": group,
                    "davenport": d.value,
                    "dstar": group.dstar(),
                    "witnessAtom": d.witness_json(),
                })),
            }))
        }
        Command::Betasep { group: g, per_subset } => {
            cfg.reject_csv()?;
            let group = group_of(&g.group)?;
            let opts = cfg.beta_opts();
            if cfg.format == Format::Text {
                let r = beta_sep(&group, &opts)?;
                return Ok(Outcome::ok(format!(
                    "{group}: beta_sep = {} (d*+1 = {}, equality case {})",
                    r.value,
                    group.dstar() + 1,
                    equality_case(&group)
                )));
            }
            let report = group_report(&group, &opts, Some(cfg.davenport_cap))?;
            let mut v = serde_json::to_value(&report).expect("report serializes");
            if *per_subset {
                let r = beta_sep(&group, &opts)?;
                let list: Vec<Value> = r
                    .per_subset_min_bound
                    .iter()
                    .map(|(s, d)| json!({ "subset": s, "minBound": d }))
                    .collect();
                v["perSubsetMinBound"] = Value::Array(list);
            }
            Ok(Outcome::ok(json_out(&v)))
        }
        Command::CheckSep {
            group: g,
            chars,
            monomials,
        } => {
            cfg.reject_csv()?;
            let group = group_of(&g.group)?;
            let chars = chars_of(&group, &chars.chars)?;
            let m = read_monomials(monomials)?;
            let verdict = check_separating_monomials(&chars, &m, cfg.mode())?;
            Ok(Outcome::ok(match cfg.format {
                Format::Text => match &verdict.witness {
                    None => format!("separating ({} subsets checked)", verdict.subsets_checked),
                    Some(w) => format!("not separating: J = {:?}, vector {:?}", w.subset, w.vector),
                },
                _ => json_out(&serde_json::to_value(&verdict).expect("verdict serializes")),
            }))
        }
        Command::Extremal(g) => {
            cfg.reject_csv()?;
            let group = group_of(&g.group)?;
            let seq = extremal_sequence(&group)?;
            let bound = min_separating_bound_for_subset(&group, seq.elems())?;
            let short: Vec<Vec<u64>> = enumerate_b(&seq, group.dstar(), false)
                .into_iter()
                .map(|m| m.into_inner())
                .collect();
            let verdict = check_separating_monomials(&CharacterSequence::new(seq.clone()), &short, Mode::Full)?;
            Ok(Outcome::ok(match cfg.format {
                Format::Text => format!(
                    "{group}: sequence {:?}, minimal bound {bound}, rejected at d* = {}: {}",
                    coords(&seq),
                    group.dstar(),
                    !verdict.separating
                ),
                _ => json_out(&json!({
                    "group": group,
                    "sequence": coords(&seq),
                    "dstar": group.dstar(),
                    "minBound": bound,
                    "rejectedAtDstar": !verdict.separating,
                    "witness": verdict.witness,
                })),
            }))
        }
        Command::Decompose {
            group: g,
            chars,
            vector,
            bound,
        } => {
            cfg.reject_csv()?;
            let group = group_of(&g.group)?;
            let seq = GSequence::from_coords(&group, &parse_elements(&chars.chars)?)?;
            let u: Vec<i64> = vector
                .split(',')
                .map(|x| x.trim().parse().map_err(|e| Failure::Usage(format!("`{x}`: {e}"))))
                .collect::<Result<_, _>>()?;
            let bound = bound.unwrap_or(group.dstar() + 1);
            let terms = match decompose(&seq, &u, bound) {
                Ok(t) => t,
                Err(e @ Error::DecompositionFailed { .. }) if !equality_case(&group) && bound == group.dstar() => {
                    return Err(Failure::Check(format!(
                        "{e} (expected to succeed outside the equality case)"
                    )));
                }
                Err(e) => return Err(e.into()),
            };
            Ok(Outcome::ok(match cfg.format {
                Format::Text => {
                    let mut s = String::new();
                    for (l, m) in &terms {
                        let _ = writeln!(s, "{l:>4} x {:?}", m.as_slice());
                    }
                    s.trim_end().to_string()
                }
                _ => json_out(&json!({
                    "group": group,
                    "sequence": coords(&seq),
                    "vector": u,
                    "bound": bound,
                    "terms": terms.iter().map(|(l, m)| json!({ "coefficient": l, "vector": m })).collect::<Vec<_>>(),
                })),
            }))
        }
        Command::VerifyMain => {
            let rows = verify_main(
                cfg.max_order,
                cfg.max_rank as usize,
                &cfg.beta_opts(),
                cfg.davenport_cap,
            )?;
            Ok(table(cfg, &rows))
        }
        Command::VerifyStrict => {
            let rows = verify_strict(
                cfg.max_order,
                cfg.max_rank as usize,
                &cfg.beta_opts(),
                cfg.davenport_cap,
            )?;
            Ok(table(cfg, &rows))
        }
        Command::CrossValidate {
            group,
            chars,
            monomials,
            random,
            max_k,
        } => {
            cfg.reject_csv()?;
            let workers = cfg.workers.map(|w| w as usize);
            if let Some(count) = random {
                let suite = random_monomial_suite(cfg.seed, *count, cfg.max_order, *max_k);
                let mut disagreements = Vec::new();
                for inst in &suite {
                    let cv = cross_validate(&inst.characters(), &inst.monomials, cfg.point_cap, workers)?;
                    if !cv.agree {
                        disagreements.push(json!({ "instance": inst, "result": cv }));
                    }
                }
                let agreements = suite.len() - disagreements.len();
                let output = match cfg.format {
                    Format::Text => format!("{agreements}/{} instances agree (seed {})", suite.len(), cfg.seed),
                    _ => json_out(&json!({
                        "seed": cfg.seed,
                        "instances": suite.len(),
                        "agreements": agreements,
                        "disagreements": disagreements,
                    })),
                };
                let failed = (agreements < suite.len()).then(|| format!("{} disagreements", suite.len() - agreements));
                return Ok(Outcome { output, failed });
            }
            let (Some(g), Some(c), Some(m)) = (group, chars, monomials) else {
                return Err(Failure::Usage(
                    "cross-validate needs --group, --chars and --monomials, or --random".into(),
                ));
            };
            let group = group_of(g)?;
            let chars = chars_of(&group, c)?;
            let cv = cross_validate(&chars, &read_monomials(m)?, cfg.point_cap, workers)?;
            let output = match cfg.format {
                Format::Text => format!(
                    "criterion {} oracle {} (primes {:?}): {}",
                    cv.criterion_verdict.separating,
                    cv.oracle_verdict.separating,
                    cv.primes_tried,
                    if cv.agree { "agree" } else { "DISAGREE" }
                ),
                _ => json_out(&serde_json::to_value(&cv).expect("result serializes")),
            };
            let failed = (!cv.agree).then(|| "criterion and oracle disagree".to_string());
            Ok(Outcome { output, failed })
        }
        Command::SubgroupLemmas {
            sequence_order,
            max_len,
            max_n1,
            max_r,
        } => {
            cfg.reject_csv()?;
            let lemmas = subgroup_lemmas(cfg.max_order, *sequence_order, *max_len)?;
            let ineq = dstar_inequality_sweep(*max_n1, *max_r)?;
            let violations = lemmas.violations.len() + ineq.violations.len();
            let output = match cfg.format {
                Format::Text => {
                    let mut s = format!(
                        "{} groups: {} cyclic quotients, {} cyclic subgroups, {} generating sequences\n",
                        lemmas.groups,
                        lemmas.cyclic_quotient_checks,
                        lemmas.cyclic_subgroup_checks,
                        lemmas.sequence_checks
                    );
                    let _ = write!(s, "d* inequality: {} pairs, {} equalities", ineq.pairs, ineq.equalities);
                    for v in lemmas.violations.iter().chain(&ineq.violations) {
                        let _ = write!(s, "\nviolation: {v}");
                    }
                    s
                }
                _ => json_out(&json!({ "subgroups": lemmas, "inequality": ineq })),
            };
            Ok(Outcome {
                output,
                failed: (violations > 0).then(|| format!("{violations} violations")),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            println!("{}", outcome.output);
            match outcome.failed {
                None => ExitCode::SUCCESS,
                Some(msg) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(4)
                }
            }
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
