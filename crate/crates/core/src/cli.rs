//! The `goursat` command line.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, a search
//! finds nothing or is inconclusive, 2 on usage, input or parse errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::algebras::{parse_algebra, write_algebra, FiniteAlgebra};
use crate::closure::{check_axioms, AxiomBounds, AxiomStatus, ClosureOperator, SubvarietySpec};
use crate::corpus::{self, corpus, corpus_specs};
use crate::distributivity::dist_report;
use crate::permutability::{
    find_hm_terms, find_maltsev_term, goursat_join_check, permutability_level, CloneOptions, PermutabilityLevel,
    SearchOutcome, TermWitness, DEFAULT_CLONE_CAP,
};
use crate::relations::{con_lattice, is_congruence, ConLattice, Partition, DEFAULT_MAX_SIZE};
use crate::report::{yes_no, Report};
use crate::{Error, Verdict};

#[derive(Debug, Parser)]
#[command(name = "goursat", version, about = "Closure operators on congruences of finite algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Emit `key=value` lines instead of text.
    #[arg(long)]
    pub kv: bool,
    /// Largest carrier whose congruence lattice is enumerated.
    #[arg(long, default_value_t = DEFAULT_MAX_SIZE, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    pub max_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchKind {
    Maltsev,
    Hm,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the congruence lattice.
    Con {
        /// `.alg` file or corpus entry name.
        algebra: String,
        /// Write the Hasse diagram in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Permutability of congruence pairs.
    Perm {
        algebra: String,
        /// A congruence literal; give twice to check a single pair.
        #[arg(long = "rel")]
        rels: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Closures of congruences under a subvariety.
    Closure {
        algebra: String,
        /// `.ids` file or corpus spec name.
        #[arg(long)]
        variety: String,
        /// A congruence literal; all congruences when omitted.
        #[arg(long)]
        rel: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive closure-operator axiom checks.
    Axioms {
        #[arg(required = true)]
        algebras: Vec<String>,
        #[arg(long)]
        variety: String,
        /// Largest binary product used for projection arrows.
        #[arg(long, default_value_t = 64)]
        max_product: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Congruence distributivity, image-meet preservation and axiom (7).
    Dist {
        algebra: String,
        /// Extra subvarieties for axiom (7); `all` is always checked.
        #[arg(long)]
        variety: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Search for Mal'tsev or Hagemann-Mitschke terms.
    Terms {
        algebra: String,
        #[arg(long, value_enum, default_value_t = SearchKind::Both)]
        search: SearchKind,
        /// Bound on the number of ternary term operations generated.
        #[arg(long, default_value_t = DEFAULT_CLONE_CAP, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(3..))]
        clone_cap: usize,
        #[arg(long)]
        kv: bool,
    },
    /// Built-in algebras and subvarieties.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum CorpusCommand {
    /// List built-in algebras and specs.
    List {
        #[arg(long)]
        kv: bool,
    },
    /// Write an algebra as `.alg` or a spec as `.ids`.
    Dump { name: String, file: PathBuf },
}

struct Outcome {
    report: Report,
    pass: bool,
    kv: bool,
}

type CliResult<T> = std::result::Result<T, String>;

fn ctx<T>(r: crate::Result<T>, what: &str) -> CliResult<T> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn load_algebra(arg: &str) -> CliResult<FiniteAlgebra> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| format!("{arg}: {e}"))?;
        return ctx(parse_algebra(&text), arg);
    }
    match corpus::lookup(arg) {
        Ok(e) => Ok(e.algebra),
        Err(Error::UnknownCorpusEntry(_)) => Err(format!("{arg}: no such file or corpus entry")),
        Err(e) => Err(format!("{arg}: {e}")),
    }
}

fn load_spec(arg: &str, alg: &FiniteAlgebra) -> CliResult<SubvarietySpec> {
    let path = Path::new(arg);
    let spec = if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| format!("{arg}: {e}"))?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        ctx(SubvarietySpec::parse(name, &text, alg.signature()), arg)?
    } else {
        corpus::spec(arg).map_err(|_| format!("{arg}: no such file or corpus spec"))?
    };
    ctx(spec.check_applicable(alg), arg)?;
    Ok(spec)
}

fn load_rel(text: &str, alg: &FiniteAlgebra) -> CliResult<Partition> {
    let p = ctx(Partition::parse_with_size(text, alg.size()), "--rel")?;
    if let Verdict::Fails(w) = ctx(is_congruence(alg, &p), "--rel")? {
        return Err(format!("--rel {p}: not a congruence: {w}"));
    }
    Ok(p)
}

fn pass_fail(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Hasse diagram of a congruence lattice, bottom to top.
pub fn hasse_dot(lat: &ConLattice) -> String {
    let mut out = String::from("digraph con {\n  rankdir=BT;\n  node [shape=box];\n");
    for (i, p) in lat.congruences().iter().enumerate() {
        out.push_str(&format!("  n{i} [label=\"{p}\"];\n"));
    }
    for (lo, hi) in lat.covers() {
        out.push_str(&format!("  n{lo} -> n{hi};\n"));
    }
    out.push_str("}\n");
    out
}

fn cmd_con(algebra: &str, dot: Option<&Path>, common: &Common) -> CliResult<Outcome> {
    let alg = load_algebra(algebra)?;
    let mut dot_file = match dot {
        Some(path) => Some(fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?),
        None => None,
    };
    let lat = ctx(con_lattice(&alg, Some(common.max_size)), algebra)?;
    let mut r = Report::new();
    r.field("algebra", alg.name()).field("size", alg.size()).field("congruences", lat.len());
    for (i, p) in lat.congruences().iter().enumerate() {
        r.field(format!("congruence.{i}"), p);
    }
    let covers: Vec<String> = lat.covers().iter().map(|(lo, hi)| format!("{lo}<{hi}")).collect();
    r.field("covers", if covers.is_empty() { "none".to_string() } else { covers.join(" ") });
    r.field("chain", yes_no(lat.is_chain()));
    r.field("modular", yes_no(lat.modular_law().holds()));
    r.field(
        "distributive",
        yes_no(crate::distributivity::is_distributive(&lat).holds()),
    );
    if let (Some(file), Some(path)) = (dot_file.as_mut(), dot) {
        file.write_all(hasse_dot(&lat).as_bytes())
            .map_err(|e| format!("{}: {e}", path.display()))?;
        r.field("dot", path.display());
    }
    Ok(Outcome {
        report: r,
        pass: true,
        kv: common.kv,
    })
}

fn cmd_perm(algebra: &str, rels: &[String], common: &Common) -> CliResult<Outcome> {
    let alg = load_algebra(algebra)?;
    let mut r = Report::new();
    r.field("algebra", alg.name()).field("size", alg.size());
    let pass = match rels {
        [] => {
            let lat = ctx(con_lattice(&alg, Some(common.max_size)), algebra)?;
            let cs = lat.congruences();
            r.field("congruences", cs.len());
            let mut overall = PermutabilityLevel::Two;
            for i in 0..cs.len() {
                for j in i + 1..cs.len() {
                    let level = ctx(permutability_level(&alg, &cs[i], &cs[j]), algebra)?;
                    overall = overall.max(level);
                    r.field(format!("pair.{i}.{j}"), format!("{level} ({} vs {})", cs[i], cs[j]));
                }
            }
            r.field("level", overall);
            overall != PermutabilityLevel::Neither
        }
        [a, b] => {
            let (p, q) = (load_rel(a, &alg)?, load_rel(b, &alg)?);
            let level = ctx(permutability_level(&alg, &p, &q), algebra)?;
            r.field("r", &p).field("s", &q).field("level", level);
            if level != PermutabilityLevel::Neither {
                let check = ctx(goursat_join_check(&alg, &p, &q), algebra)?;
                r.field("join", match check.witness() {
                    None => "r∘s∘r = r∨s".to_string(),
                    Some(m) => format!("r∘s∘r = {} ≠ r∨s = {}", m.composite, m.join),
                });
            }
            level != PermutabilityLevel::Neither
        }
        _ => return Err("--rel must be given zero or two times".to_string()),
    };
    r.field("result", pass_fail(pass));
    Ok(Outcome { report: r, pass, kv: common.kv })
}

fn cmd_closure(algebra: &str, variety: &str, rel: Option<&str>, common: &Common) -> CliResult<Outcome> {
    let alg = load_algebra(algebra)?;
    let spec = load_spec(variety, &alg)?;
    let op = ClosureOperator::new(spec.clone());
    let targets = match rel {
        Some(text) => vec![load_rel(text, &alg)?],
        None => ctx(con_lattice(&alg, Some(common.max_size)), algebra)?.congruences().to_vec(),
    };
    let mut r = Report::new();
    r.field("algebra", alg.name()).field("size", alg.size()).field("variety", &spec.name);
    r.field("delta_bar", ctx(op.delta_bar(&alg), algebra)?);
    let mut pass = true;
    for (i, s) in targets.iter().enumerate() {
        let eff = ctx(op.effective(&alg, s), algebra)?;
        let key = |k: &str| format!("congruence.{i}.{k}");
        r.field(key("input"), s);
        r.field(key("effective"), &eff.closure);
        let agree = match op.goursat(&alg, s) {
            Ok(g) => {
                r.field(key("goursat"), &g.closure);
                g.closure == eff.closure
            }
            Err(e @ Error::GoursatViolation { .. }) => {
                r.field(key("goursat"), format!("violation: {e}"));
                false
            }
            Err(e) => return Err(format!("{algebra}: {e}")),
        };
        pass &= agree;
        r.field(key("agree"), yes_no(agree));
        r.field(key("closed"), yes_no(eff.closed));
        r.field(key("dense"), yes_no(eff.dense));
    }
    r.field("result", pass_fail(pass));
    Ok(Outcome { report: r, pass, kv: common.kv })
}

fn cmd_axioms(algebras: &[String], variety: &str, max_product: usize, common: &Common) -> CliResult<Outcome> {
    let algs: Vec<FiniteAlgebra> = algebras.iter().map(|a| load_algebra(a)).collect::<CliResult<_>>()?;
    let spec = load_spec(variety, &algs[0])?;
    for (alg, arg) in algs.iter().zip(algebras) {
        ctx(spec.check_applicable(alg), arg)?;
    }
    let bounds = AxiomBounds {
        max_size: common.max_size,
        max_product,
        ..AxiomBounds::default()
    };
    let report = ctx(check_axioms(&algs, &spec, bounds), "axioms")?;
    let mut r = Report::new();
    r.field("variety", &report.spec);
    r.field("algebras", report.algebras.join(" "));
    r.field("bounds.max_size", bounds.max_size);
    r.field("bounds.max_product", bounds.max_product);
    r.field("bounds.max_subalgebra_search", bounds.max_subalgebra_search);
    for res in &report.results {
        let status = match &res.status {
            AxiomStatus::Pass => format!("pass ({} instances)", res.instances),
            AxiomStatus::Fail(w) => format!("fail: {w}"),
            AxiomStatus::NotApplicable(why) => format!("not-applicable: {why}"),
        };
        r.field(format!("axiom.{}", res.axiom.label()), format!("{status}; {}", res.axiom.statement()));
    }
    for (i, note) in report.notes.iter().enumerate() {
        r.field(format!("note.{i}"), note);
    }
    let pass = report.all_pass();
    r.field("result", pass_fail(pass));
    Ok(Outcome { report: r, pass, kv: common.kv })
}

fn cmd_dist(algebra: &str, varieties: &[String], common: &Common) -> CliResult<Outcome> {
    let alg = load_algebra(algebra)?;
    let mut specs = vec![corpus::spec("all").map_err(|e| e.to_string())?];
    for v in varieties {
        let spec = load_spec(v, &alg)?;
        if !specs.iter().any(|s| s.name == spec.name) {
            specs.push(spec);
        }
    }
    let d = ctx(dist_report(&alg, &specs, Some(common.max_size)), algebra)?;
    let mut r = Report::new();
    r.field("algebra", &d.algebra).field("size", alg.size()).field("congruences", d.congruences);
    r.field("lattice_distributive", match d.lattice.witness() {
        None => "yes".to_string(),
        Some(w) => format!("no ({w})"),
    });
    r.field("image_meet", match d.image_meet.witness() {
        None => "holds".to_string(),
        Some(w) => format!("fails ({w})"),
    });
    for (name, v) in &d.axiom7 {
        r.field(format!("axiom7.{name}"), match v.witness() {
            None => "holds".to_string(),
            Some(w) => format!("fails ({w})"),
        });
    }
    let all_ok = d.lattice.holds() && d.image_meet.holds() && d.axiom7.iter().all(|(_, v)| v.holds());
    r.field("agree", yes_no(d.consistent()));
    let pass = all_ok && d.consistent();
    r.field("result", pass_fail(pass));
    Ok(Outcome { report: r, pass, kv: common.kv })
}

fn describe_witness(n: usize, w: &TermWitness) -> (String, String) {
    let term = w.term.as_ref().map(|t| t.to_string()).unwrap_or_else(|| "?".to_string());
    let table: Vec<String> = w.table.iter().map(|v| v.to_string()).collect();
    debug_assert_eq!(table.len(), n * n * n);
    (term, table.join(" "))
}

fn describe_absent<T>(o: &SearchOutcome<T>) -> Option<String> {
    match o {
        SearchOutcome::Found(_) => None,
        SearchOutcome::Absent => Some("None (fixpoint reached)".to_string()),
        SearchOutcome::Inconclusive { tables } => {
            Some(format!("Inconclusive (cap reached after {tables} term operations)"))
        }
    }
}

fn cmd_terms(algebra: &str, search: SearchKind, clone_cap: usize, kv: bool) -> CliResult<Outcome> {
    let alg = load_algebra(algebra)?;
    let n = alg.size();
    let opts = CloneOptions::with_cap(clone_cap);
    let mut r = Report::new();
    r.field("algebra", alg.name()).field("size", n).field("clone_cap", clone_cap);
    let mut pass = true;
    if matches!(search, SearchKind::Maltsev | SearchKind::Both) {
        let o = ctx(find_maltsev_term(&alg, opts), algebra)?;
        match (&o, describe_absent(&o)) {
            (SearchOutcome::Found(w), _) => {
                let (term, table) = describe_witness(n, w);
                r.field("maltsev", format!("Some({term})")).field("maltsev.table", table);
            }
            (_, Some(msg)) => {
                pass = false;
                r.field("maltsev", msg);
            }
            _ => unreachable!(),
        }
    }
    if matches!(search, SearchKind::Hm | SearchKind::Both) {
        let o = ctx(find_hm_terms(&alg, opts), algebra)?;
        match (&o, describe_absent(&o)) {
            (SearchOutcome::Found((p, q)), _) => {
                let (pt, ptab) = describe_witness(n, p);
                let (qt, qtab) = describe_witness(n, q);
                r.field("hm", format!("Some(p = {pt}, q = {qt})"));
                r.field("hm.p.table", ptab).field("hm.q.table", qtab);
            }
            (_, Some(msg)) => {
                pass = false;
                r.field("hm", msg);
            }
            _ => unreachable!(),
        }
    }
    r.field("result", pass_fail(pass));
    Ok(Outcome { report: r, pass, kv })
}

fn cmd_corpus_list(kv: bool) -> CliResult<Outcome> {
    let mut r = Report::new();
    for e in corpus() {
        let specs: Vec<String> = e.applicable_specs().into_iter().map(|v| v.name).collect();
        r.field(
            format!("algebra.{}", e.name),
            format!(
                "size={} family={} permutability={} distributive={} specs={}",
                e.algebra.size(),
                e.family,
                e.tags.permutability,
                yes_no(e.tags.distributive),
                specs.join(",")
            ),
        );
    }
    for v in corpus_specs() {
        let ids: Vec<String> = v.identities.iter().map(|i| i.to_string()).collect();
        r.field(format!("spec.{}", v.name), if ids.is_empty() { "(none)".to_string() } else { ids.join("; ") });
    }
    Ok(Outcome { report: r, pass: true, kv })
}

fn cmd_corpus_dump(name: &str, file: &Path) -> CliResult<Outcome> {
    let text = match corpus::lookup(name) {
        Ok(e) => write_algebra(&e.algebra),
        Err(Error::UnknownCorpusEntry(_)) => match corpus::spec_source(name) {
            Some(src) => src.to_string(),
            None => return Err(format!("{name}: unknown corpus entry or spec")),
        },
        Err(e) => return Err(format!("{name}: {e}")),
    };
    fs::write(file, text).map_err(|e| format!("{}: {e}", file.display()))?;
    let mut r = Report::new();
    r.field("wrote", format!("{name} -> {}", file.display()));
    Ok(Outcome { report: r, pass: true, kv: false })
}

fn dispatch(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Con { algebra, dot, common } => cmd_con(algebra, dot.as_deref(), common),
        Command::Perm { algebra, rels, common } => cmd_perm(algebra, rels, common),
        Command::Closure { algebra, variety, rel, common } => cmd_closure(algebra, variety, rel.as_deref(), common),
        Command::Axioms { algebras, variety, max_product, common } => cmd_axioms(algebras, variety, *max_product, common),
        Command::Dist { algebra, variety, common } => cmd_dist(algebra, variety, common),
        Command::Terms { algebra, search, clone_cap, kv } => cmd_terms(algebra, *search, *clone_cap, *kv),
        Command::Corpus { command } => match command {
            CorpusCommand::List { kv } => cmd_corpus_list(*kv),
            CorpusCommand::Dump { name, file } => cmd_corpus_dump(name, file),
        },
    }
}

/// Runs the command line `args` (program name first), writing the report to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(o) => {
            let text = if o.kv { o.report.render_kv() } else { o.report.render_text() };
            if out.write_all(text.as_bytes()).is_err() {
                return 2;
            }
            if o.pass {
                0
            } else {
                1
            }
        }
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}
