//! `nakajima`: generate monomial crystals, virtualize them along foldings,
//! convert to Kostant partitions and mutate c-arrays.
//!
//! Exit status is 0 on success, 1 when the library reports an error and 2 on
//! malformed invocations.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nakajima_core::{
    self as core, cartan_type, folding, generate, invariant_violations, stembridge_violations, CArray, Crystal,
    CrystalGraph, GenerateOptions, KostantPartition, Mode, Monomial, MonomialContext, MonomialCrystal, Mutation,
    Orientation, VirtualContext, VirtualCrystal, Weight, DEFAULT_NODE_CAP,
};

const CAP_ENV: &str = "NAKAJIMA_NODE_CAP";

#[derive(Debug, Parser)]
#[command(name = "nakajima", version, about = "Crystals of Nakajima monomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a crystal graph from a seed monomial.
    Gen(GenArgs),
    /// Apply the virtualization map of a folding and verify it.
    Virtualize(VirtualizeArgs),
    /// Convert a monomial of M(infinity) in type A_n to a Kostant partition.
    ToKostant(ToKostantArgs),
    /// Convert a Kostant partition to a monomial of M(infinity).
    FromKostant(FromKostantArgs),
    /// Bracket strings and crystal operators on a Kostant partition.
    Kostant(KostantArgs),
    /// Read off or virtualize Lusztig data.
    Lusztig(LusztigArgs),
    /// Mutate a c-array, or a monomial along with it.
    Mutate(MutateArgs),
    /// Run an axiom suite on a generated crystal.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Dot,
    Json,
    Table,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Ops {
    /// Ordinary f operators from the seed.
    F,
    /// Ordinary operators, following both f and e.
    Ef,
    /// Modified operators of M(infinity).
    Fbar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Stembridge,
    Invariants,
    All,
}

/// `N` or `full`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Depth {
    Levels(usize),
    Full,
}

fn parse_depth(s: &str) -> Result<Depth, String> {
    match s {
        "full" => Ok(Depth::Full),
        _ => s.parse().map(Depth::Levels).map_err(|_| format!("expected a number or `full`, got {s:?}")),
    }
}

#[derive(Debug, Args)]
struct SeedArgs {
    /// Seed monomial such as `Y(1,0)^2 * Y(2,1)^-1`.
    #[arg(long, conflicts_with = "highest_weight")]
    seed: Option<String>,
    /// Dominant weight such as `L1+2*L2`; the seed becomes `Y_lambda`.
    #[arg(long)]
    highest_weight: Option<String>,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Cartan type, e.g. `A3`, `F4`, `C3~`.
    #[arg(long = "type")]
    cartan: String,
    #[command(flatten)]
    seed: SeedArgs,
    /// c-array file (JSON rows or whitespace-separated rows); defaults to c_ij = 1 for i < j.
    #[arg(long, conflicts_with = "nakajima")]
    c: Option<PathBuf>,
    /// Use the Nakajima convention (all c_ij = 1, shifts by parity).
    #[arg(long)]
    nakajima: bool,
    /// Number of operator applications from the seed, or `full`.
    #[arg(long, value_parser = parse_depth)]
    depth: Depth,
    /// Node cap; also read from NAKAJIMA_NODE_CAP.
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long, value_enum, default_value = "f")]
    ops: Ops,
    #[arg(long, value_enum, default_value = "dot")]
    emit: Emit,
}

#[derive(Debug, Args)]
struct VirtualizeArgs {
    /// One of C2-A3, B2-A3, F4-E6, G2-D4, C3~-D5~.
    #[arg(long)]
    folding: String,
    #[command(flatten)]
    seed: SeedArgs,
    /// Work in M(infinity) with the modified operators; the default seed is 1.
    #[arg(long)]
    infinity: bool,
    /// Use the Nakajima convention on both sides.
    #[arg(long)]
    nakajima: bool,
    #[arg(long, value_parser = parse_depth, default_value = "full")]
    depth: Depth,
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long, value_enum, default_value = "table")]
    emit: Emit,
}

#[derive(Debug, Args)]
struct ToKostantArgs {
    /// Rank of type A_n.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    monomial: String,
    #[arg(long, value_enum, default_value = "text")]
    emit: Emit,
}

#[derive(Debug, Args)]
struct FromKostantArgs {
    #[arg(long)]
    n: usize,
    /// Partition such as `2*(a[3]) + (a[1,2])`, or its JSON form.
    #[arg(long)]
    partition: String,
    #[arg(long, value_enum, default_value = "text")]
    emit: Emit,
}

#[derive(Debug, Args)]
struct KostantArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    partition: String,
    /// Print the bracket strings S_1, ..., S_n instead of a partition.
    #[arg(long, conflicts_with = "apply")]
    brackets: bool,
    /// Operators applied left to right, e.g. `f1,f2,e3`.
    #[arg(long)]
    apply: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    emit: Emit,
}

#[derive(Debug, Args)]
struct LusztigArgs {
    /// Rank of type A_n, for reading data off a partition.
    #[arg(long, requires = "partition", conflicts_with = "folding")]
    n: Option<usize>,
    #[arg(long)]
    partition: Option<String>,
    /// Folding along which to stretch Lusztig data given by `--data`.
    #[arg(long, requires = "data")]
    folding: Option<String>,
    /// Comma-separated Lusztig data.
    #[arg(long)]
    data: Option<String>,
    /// `dualBZL` or comma-separated node labels of a reduced word for w0.
    #[arg(long, default_value = "dualBZL")]
    word: String,
}

#[derive(Debug, Args)]
struct MutateArgs {
    /// c-array file (JSON rows or whitespace-separated rows, `*` allowed on the diagonal).
    #[arg(long)]
    c: PathBuf,
    /// Comma-separated mutation vector.
    #[arg(long, required_unless_present = "reorient")]
    m: Option<String>,
    /// Choose m so that both endpoints of the path diagram become sinks.
    #[arg(long, requires = "cartan", conflicts_with = "m")]
    reorient: bool,
    /// Cartan type, needed with --monomial or --reorient.
    #[arg(long = "type")]
    cartan: Option<String>,
    /// Mutate this monomial instead of printing the array.
    #[arg(long, requires = "cartan")]
    monomial: Option<String>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    #[arg(long = "type")]
    cartan: String,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long)]
    nakajima: bool,
    #[arg(long, value_parser = parse_depth, default_value = "full")]
    depth: Depth,
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
}

impl From<core::Error> for Failure {
    fn from(e: core::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => run_gen(a),
        Command::Virtualize(a) => run_virtualize(a),
        Command::ToKostant(a) => run_to_kostant(a),
        Command::FromKostant(a) => run_from_kostant(a),
        Command::Kostant(a) => run_kostant(a),
        Command::Lusztig(a) => run_lusztig(a),
        Command::Mutate(a) => run_mutate(a),
        Command::Check(a) => run_check(a),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn node_cap(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var(CAP_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Usage(format!("{CAP_ENV} must be a number, got {v:?}"))),
        Err(_) => Ok(DEFAULT_NODE_CAP),
    }
}

fn options(depth: Depth, cap: Option<usize>) -> Result<GenerateOptions, Failure> {
    let base = match depth {
        Depth::Levels(d) => GenerateOptions::depth(d),
        Depth::Full => GenerateOptions::unbounded(),
    };
    Ok(base.with_cap(node_cap(cap)?))
}

fn read_carray(path: &PathBuf) -> Result<Vec<Vec<i64>>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    if let Ok(rows) = serde_json::from_str::<Vec<Vec<i64>>>(&text) {
        return Ok(rows);
    }
    let mut rows = Vec::new();
    for line in text.lines() {
        let cleaned: String = line.chars().map(|c| if matches!(c, '[' | ']' | ',') { ' ' } else { c }).collect();
        let row = cleaned
            .split_whitespace()
            .map(|tok| match tok {
                "*" | "." | "•" => Ok(0),
                _ => tok.parse::<i64>(),
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| Failure::Usage(format!("cannot parse c-array row {line:?}")))?;
        if !row.is_empty() {
            rows.push(row);
        }
    }
    Ok(rows)
}

fn context(cartan: &str, c: Option<&PathBuf>, nakajima: bool) -> Result<MonomialContext, Failure> {
    let cartan = cartan_type(cartan)?;
    Ok(match (c, nakajima) {
        (_, true) => MonomialContext::nakajima(cartan)?,
        (Some(path), false) => MonomialContext::new(cartan, CArray::kashiwara(read_carray(path)?)?)?,
        (None, false) => MonomialContext::with_default_c(cartan),
    })
}

fn seed_monomial(ctx: &MonomialContext, seed: &SeedArgs, default_one: bool) -> Result<Monomial, Failure> {
    match (&seed.seed, &seed.highest_weight) {
        (Some(text), _) => Ok(ctx.parse(text)?),
        (None, Some(w)) => Ok(ctx.y_lambda(&Weight::parse(w, ctx.cartan())?)?),
        (None, None) if default_one => Ok(Monomial::one()),
        (None, None) => Err(Failure::Usage("give --seed or --highest-weight".into())),
    }
}

fn require_complete<T: Clone + Eq + std::hash::Hash>(graph: &CrystalGraph<T>) -> Result<(), Failure> {
    match graph.truncation() {
        Some(core::Truncation::Cap(cap)) => Err(core::Error::NodeCapExceeded { cap }.into()),
        _ => Ok(()),
    }
}

fn emit_graph<C: Crystal<Scalar = i64>>(crystal: &C, graph: &CrystalGraph<C::Element>, emit: Emit) -> Outcome {
    let label = |x: &C::Element| crystal.render(x);
    Ok(match emit {
        Emit::Dot => graph.to_dot(label),
        Emit::Json => json(&graph.to_json(label)),
        Emit::Text | Emit::Table => {
            let mut out = String::new();
            for (id, x) in graph.nodes().iter().enumerate() {
                let _ = writeln!(out, "n{id}\t{}\t{}\t{}", graph.depth(id), graph.weight(id), crystal.render(x));
            }
            for &(u, i, v) in graph.edges() {
                let _ = writeln!(out, "n{u} -{}-> n{v}", i as i64 + graph.label_offset());
            }
            out
        }
    })
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("serializable");
    s.push('\n');
    s
}

fn run_gen(a: GenArgs) -> Outcome {
    let ctx = context(&a.cartan, a.c.as_ref(), a.nakajima)?;
    let infinity = a.ops == Ops::Fbar;
    let seed = seed_monomial(&ctx, &a.seed, infinity)?;
    let opts = options(a.depth, a.cap)?.with_e(a.ops == Ops::Ef);
    let crystal = if infinity { MonomialCrystal::infinity(ctx) } else { MonomialCrystal::highest_weight(ctx) };
    let graph = generate(&crystal, &[seed], opts)?;
    require_complete(&graph)?;
    emit_graph(&crystal, &graph, a.emit)
}

fn virtual_context(name: &str, nakajima: bool) -> Result<VirtualContext, Failure> {
    let ctx = folding(name)?;
    if nakajima {
        Ok(VirtualContext::nakajima(ctx.spec().clone())?)
    } else {
        Ok(ctx)
    }
}

fn run_virtualize(a: VirtualizeArgs) -> Outcome {
    let ctx = virtual_context(&a.folding, a.nakajima)?;
    let mode = if a.infinity { Mode::Infinity } else { Mode::HighestWeight };
    let seed = seed_monomial(ctx.source(), &a.seed, a.infinity)?;
    let opts = options(a.depth, a.cap)?;
    let report = ctx.verify(&seed, opts, mode)?;
    if report.truncated && matches!(a.depth, Depth::Full) {
        return Err(core::Error::NodeCapExceeded { cap: opts.cap }.into());
    }
    if let Some(bad) = report.first_failure() {
        return Err(Failure::Domain(format!(
            "virtualization fails at node {} ({}): {} ({} failures)",
            bad.node,
            bad.monomial,
            bad.reason,
            report.failures.len()
        )));
    }
    match a.emit {
        Emit::Table => Ok(report.table.iter().map(|(m, v)| format!("{m}\t{v}\n")).collect()),
        Emit::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "folding: {}", a.folding);
            let _ = writeln!(out, "gamma: {:?}", ctx.spec().gammas());
            let _ = writeln!(out, "nodes: {}", report.nodes);
            let _ = writeln!(out, "edges: {}", report.edges);
            let _ = writeln!(out, "intertwining: pass");
            Ok(out)
        }
        Emit::Dot | Emit::Json => {
            let image = ctx.v_map(&seed)?;
            let crystal = VirtualCrystal::<i64>::new(&ctx, mode);
            let graph = generate(&crystal, &[image], opts)?;
            let target = ctx.target();
            let label = |m: &Monomial| target.render(m);
            Ok(if a.emit == Emit::Dot {
                graph.to_dot(label)
            } else {
                json(&graph.to_json(label))
            })
        }
    }
}

fn kostant_context(n: usize) -> Result<MonomialContext, Failure> {
    if n == 0 {
        return Err(Failure::Usage("--n must be positive".into()));
    }
    Ok(core::kostant_context(n)?)
}

fn parse_partition(text: &str, n: usize) -> Result<KostantPartition, Failure> {
    if text.trim_start().starts_with('{') {
        let parsed: core::KostantJson =
            serde_json::from_str(text).map_err(|e| Failure::Usage(format!("bad partition JSON: {e}")))?;
        if parsed.n != n {
            return Err(Failure::Usage(format!("partition has n = {}, but --n is {n}", parsed.n)));
        }
        return Ok(KostantPartition::from_json(&parsed)?);
    }
    Ok(KostantPartition::parse(text, n)?)
}

fn run_to_kostant(a: ToKostantArgs) -> Outcome {
    let ctx = kostant_context(a.n)?;
    let m: Monomial = ctx.parse(&a.monomial)?;
    let kp = core::monomial_to_kostant(&m, &ctx)?;
    Ok(match a.emit {
        Emit::Json => json(&kp.to_json()),
        _ => format!("{kp}\n"),
    })
}

fn run_from_kostant(a: FromKostantArgs) -> Outcome {
    let ctx = kostant_context(a.n)?;
    let kp = parse_partition(&a.partition, a.n)?;
    let m = core::kostant_to_monomial(&kp, &ctx)?;
    Ok(match a.emit {
        Emit::Json => json(&m.to_json(ctx.label_offset())),
        _ => format!("{}\n", ctx.render(&m)),
    })
}

fn run_kostant(a: KostantArgs) -> Outcome {
    kostant_context(a.n)?;
    let mut kp = parse_partition(&a.partition, a.n)?;
    if a.brackets {
        let mut out = String::new();
        for i in 0..a.n {
            let _ = writeln!(out, "S_{} = {}", i + 1, core::bracket_seq(&kp, i)?.render());
        }
        return Ok(out);
    }
    for op in a.apply.iter().flat_map(|s| s.split(',')) {
        let op = op.trim();
        let bad = || Failure::Usage(format!("bad operator {op:?}; expected f<i> or e<i>"));
        let (kind, label) = op.split_at(op.len().min(1));
        let label: usize = label.parse().map_err(|_| bad())?;
        if label == 0 || label > a.n {
            return Err(core::Error::UnknownLabel { label: label as i64 }.into());
        }
        kp = match kind {
            "f" => core::kp_f(&kp, label - 1)?,
            "e" => core::kp_e(&kp, label - 1)?
                .ok_or_else(|| Failure::Domain(format!("e_{label} is undefined on {kp}")))?,
            _ => return Err(bad()),
        };
    }
    Ok(match a.emit {
        Emit::Json => json(&kp.to_json()),
        _ => format!("{kp}\n"),
    })
}

fn parse_csv(text: &str, what: &str) -> Result<Vec<i64>, Failure> {
    text.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| Failure::Usage(format!("bad {what} entry {x:?}"))))
        .collect()
}

fn parse_word(text: &str, cartan: &core::CartanMatrix) -> Result<Vec<usize>, Failure> {
    if text == "dualBZL" {
        let n = cartan.rank();
        if cartan != &cartan_type(&format!("A{n}"))? {
            return Err(Failure::Usage("the dual BZL word is defined for type A only".into()));
        }
        return Ok(core::dual_bzl_word(n));
    }
    parse_csv(text, "word")?.into_iter().map(|label| Ok(cartan.node(label)?)).collect()
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn run_lusztig(a: LusztigArgs) -> Outcome {
    match (a.n, a.partition, a.folding, a.data) {
        (Some(n), Some(partition), None, _) => {
            let kp = parse_partition(&partition, n)?;
            let cartan = cartan_type(&format!("A{n}"))?;
            let word = parse_word(&a.word, &cartan)?;
            let data = core::lusztig_data(&kp, &word)?;
            Ok(format!("{}\n", join(data)))
        }
        (None, None, Some(name), Some(data)) => {
            let spec = folding(&name)?.spec().clone();
            let word = parse_word(&a.word, spec.source())?;
            let data = parse_csv(&data, "data")?;
            let (word_hat, data_hat) = core::virtualize_lusztig_data(&data, &word, &spec)?;
            let offset = spec.target().label_offset();
            Ok(format!(
                "word: {}\ndata: {}\n",
                join(word_hat.iter().map(|&i| i as i64 + offset)),
                join(data_hat)
            ))
        }
        _ => Err(Failure::Usage("give either --n with --partition, or --folding with --data".into())),
    }
}

fn run_mutate(a: MutateArgs) -> Outcome {
    let c = CArray::kashiwara(read_carray(&a.c)?)?;
    let cartan = a.cartan.as_deref().map(cartan_type).transpose()?;
    let (m, c_prime) = if a.reorient {
        let cartan = cartan.as_ref().expect("clap enforces --type");
        let target = Orientation::both_ends_sinks(cartan)?;
        core::reorient_path(&c, cartan, &target)?
    } else {
        let m: Mutation = a.m.as_deref().expect("clap enforces --m").parse()?;
        let c_prime = core::mutate_carray(&c, &m)?;
        (m, c_prime)
    };
    if let Some(text) = a.monomial {
        let cartan = cartan.expect("clap enforces --type");
        let x: Monomial = Monomial::parse(&text, &cartan)?;
        let y = core::mutate_monomial(&x, &m)?;
        return Ok(format!("{}\n", y.to_text(cartan.label_offset())));
    }
    let mut out = String::new();
    if a.reorient {
        let _ = writeln!(out, "m = {m}");
    }
    out.push_str(&core::format_bracket_matrix(&c_prime.rows()));
    Ok(out)
}

fn run_check(a: CheckArgs) -> Outcome {
    let ctx = context(&a.cartan, None, a.nakajima)?;
    let seed = seed_monomial(&ctx, &a.seed, false)?;
    let cartan = ctx.cartan().clone();
    let crystal = MonomialCrystal::<i64>::highest_weight(ctx);
    let graph = generate(&crystal, &[seed], options(a.depth, a.cap)?)?;
    require_complete(&graph)?;
    let mut out = String::new();
    let mut failures = Vec::new();
    if matches!(a.suite, Suite::Invariants | Suite::All) {
        let v = invariant_violations(&crystal, &graph)?;
        let _ = writeln!(out, "invariants: {} ({} nodes)", verdict(&v), graph.len());
        failures.extend(v);
    }
    if matches!(a.suite, Suite::Stembridge | Suite::All) {
        if !cartan.is_simply_laced() {
            if a.suite == Suite::Stembridge {
                return Err(Failure::Domain(format!("Stembridge axioms need a simply-laced type, got {}", a.cartan)));
            }
            let _ = writeln!(out, "stembridge: skipped (not simply laced)");
        } else {
            let v = stembridge_violations(&graph, &cartan);
            let _ = writeln!(out, "stembridge: {} ({} nodes)", verdict(&v), graph.len());
            failures.extend(v);
        }
    }
    if failures.is_empty() {
        Ok(out)
    } else {
        eprint!("{out}");
        Err(Failure::Domain(failures.join("\n")))
    }
}

fn verdict(violations: &[String]) -> &'static str {
    if violations.is_empty() {
        "pass"
    } else {
        "FAIL"
    }
}
