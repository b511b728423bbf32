//! `rpl`: parse, rectify, compare and model-check reflective predicate logic
//! expressions.
//!
//! Exit codes: 0 success or Satisfied, 1 negative result, 2 parse or input
//! error, 3 I/O error, 4 Unknown.

mod render;

use std::ffi::OsString;
use std::fmt::Write;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rpl::fragment::{classify_formula, conservative_check, FormulaClass, FragmentSpec};
use rpl::herbrand::{
    check_program, enumerate_atoms, enumerate_expressions, HerbrandError, Interpretation, Mode, RangePolicy,
    Signature,
};
use rpl::parser::Line;
use rpl::{is_variant, parse, parse_lines, rect, rect_set, Expression, ParseError, Symbol, Verdict};

#[derive(Parser)]
#[command(name = "rpl", version, about = "Reflective predicate logic toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every expression of FILE in canonical form.
    Parse { file: PathBuf },
    /// Rectify every expression of FILE.
    Rect {
        file: PathBuf,
        /// Initial variable index.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        start: u32,
        /// Rectify the whole file as one set (variables standardised apart).
        #[arg(long)]
        as_set: bool,
    },
    /// Decide whether two expressions are variants.
    Variant { first: String, second: String },
    /// Check a program against an interpretation.
    Check {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        interp: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Universe height; required iff the mode is bounded.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value_t = RangeArg::Atoms)]
        range: RangeArg,
        /// Extra signature symbols, comma separated.
        #[arg(long, value_delimiter = ',')]
        symbols: Vec<String>,
        /// Largest application arity in the bounded universe.
        #[arg(long)]
        max_arity: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// List the universe slice of a signature, one class per line.
    Universe {
        #[arg(long, value_delimiter = ',', required = true)]
        symbols: Vec<String>,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        max_arity: usize,
        #[arg(long, value_enum, default_value_t = RangeArg::Atoms)]
        range: RangeArg,
    },
    /// Classify every expression of FILE against a first-order fragment.
    Fragment {
        #[arg(long)]
        spec: PathBuf,
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Compare first-order and full satisfaction of a sentence over every
    /// extension of a base interpretation by a subset of a pool.
    Conservative {
        #[arg(long)]
        spec: PathBuf,
        /// The sentence, as expression text.
        #[arg(long)]
        formula: String,
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        pool: PathBuf,
        #[arg(long, default_value_t = 0)]
        depth: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Bounded,
}

#[derive(Clone, Copy, ValueEnum)]
enum RangeArg {
    Atoms,
    Expressions,
}

impl From<RangeArg> for RangePolicy {
    fn from(r: RangeArg) -> Self {
        match r {
            RangeArg::Atoms => RangePolicy::AtomsOnly,
            RangeArg::Expressions => RangePolicy::AllExpressions,
        }
    }
}

enum Failure {
    Io(PathBuf, std::io::Error),
    Parse(String, ParseError),
    Input(String),
}

impl Failure {
    fn report(&self, err: &mut String) -> u8 {
        let (msg, code) = match self {
            Failure::Io(path, e) => (format!("{}: {e}", path.display()), 3),
            Failure::Parse(source, e) => (format!("{source}:{e}"), 2),
            Failure::Input(msg) => (msg.clone(), 2),
        };
        let _ = writeln!(err, "{msg}");
        code
    }
}

type Outcome = Result<u8, Failure>;

/// Output of one invocation: exit code, standard output, standard error.
pub struct Run {
    pub code: u8,
    pub out: String,
    pub err: String,
}

fn run<I, T>(args: I) -> Run
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut out = String::new();
    let mut err = String::new();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code() as u8;
            if code == 0 {
                out = text;
            } else {
                err = text;
            }
            return Run { code, out, err };
        }
    };
    let out_ref = &mut out;
    let result = match cli.command {
        Command::Parse { file } => run_parse(out_ref, &file),
        Command::Rect { file, start, as_set } => run_rect(out_ref, &file, start, as_set),
        Command::Variant { first, second } => run_variant(out_ref, &first, &second),
        Command::Check { program, interp, mode, depth, range, symbols, max_arity, json } => {
            run_check(out_ref, &program, &interp, mode, depth, range.into(), &symbols, max_arity, json)
        }
        Command::Universe { symbols, depth, max_arity, range } => {
            run_universe(out_ref, &symbols, depth, max_arity, range.into())
        }
        Command::Fragment { spec, file, json } => run_fragment(out_ref, &spec, &file, json),
        Command::Conservative { spec, formula, base, pool, depth, json } => {
            run_conservative(out_ref, &spec, &formula, &base, &pool, depth, json)
        }
    };
    let code = result.unwrap_or_else(|f| f.report(&mut err));
    Run { code, out, err }
}

fn main() -> ExitCode {
    let r = run(std::env::args_os());
    let _ = std::io::stdout().write_all(r.out.as_bytes());
    let _ = std::io::stderr().write_all(r.err.as_bytes());
    ExitCode::from(r.code)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn load(path: &Path) -> Result<Vec<Line>, Failure> {
    parse_lines(&read(path)?).map_err(|e| Failure::Parse(path.display().to_string(), e))
}

fn load_interp(path: &Path) -> Result<(Interpretation, Vec<Line>), Failure> {
    let lines = load(path)?;
    match Interpretation::from_lines(&lines) {
        Ok(i) => Ok((i, lines)),
        Err(HerbrandError::NotAnAtom { line, expr }) => {
            let offset = lines.iter().find(|l| l.line == line).map_or(0, |l| l.offset);
            Err(Failure::Input(format!("{}:{offset}: not-an-atom: `{expr}` is not an atom", path.display())))
        }
        Err(e) => Err(Failure::Input(format!("{}: {e}", path.display()))),
    }
}

fn parse_arg(text: &str) -> Result<Expression, Failure> {
    parse(text).map_err(|e| Failure::Parse("<argument>".into(), e))
}

fn exit_for(v: Verdict) -> u8 {
    match v {
        Verdict::Satisfied => 0,
        Verdict::Falsified => 1,
        Verdict::Unknown => 4,
    }
}

fn run_parse(out: &mut String, file: &Path) -> Outcome {
    for l in load(file)? {
        let _ = writeln!(out, "{}", l.expr);
    }
    Ok(0)
}

fn run_rect(out: &mut String, file: &Path, start: u32, as_set: bool) -> Outcome {
    let lines = load(file)?;
    if as_set {
        let exprs: Vec<Expression> = lines.into_iter().map(|l| l.expr).collect();
        for e in rect_set(&exprs) {
            let _ = writeln!(out, "{e}");
        }
    } else {
        for l in lines {
            let r = rect(&l.expr, start);
            let _ = writeln!(out, "{}  # final {}", r.rectified, r.final_index);
        }
    }
    Ok(0)
}

fn run_variant(out: &mut String, first: &str, second: &str) -> Outcome {
    let (a, b) = (parse_arg(first)?, parse_arg(second)?);
    if is_variant(&a, &b) {
        let _ = writeln!(out, "variant");
        Ok(0)
    } else {
        let _ = writeln!(out, "not-variant");
        Ok(1)
    }
}

#[allow(clippy::too_many_arguments)]
fn run_check(
    out: &mut String,
    program: &Path,
    interp: &Path,
    mode: ModeArg,
    depth: Option<usize>,
    range: RangePolicy,
    extras: &[String],
    max_arity: Option<usize>,
    json: bool,
) -> Outcome {
    let mode = match (mode, depth) {
        (ModeArg::Exact, None) => Mode::Exact,
        (ModeArg::Bounded, Some(depth)) => Mode::Bounded { depth },
        (ModeArg::Exact, Some(_)) => return Err(Failure::Input("--depth is only valid with --mode bounded".into())),
        (ModeArg::Bounded, None) => return Err(Failure::Input("--mode bounded requires --depth".into())),
    };
    let prog: Vec<Expression> = load(program)?.into_iter().map(|l| l.expr).collect();
    let (interp, _) = load_interp(interp)?;
    let extras = symbols(extras)?;
    let mut sig = Signature::for_inputs(prog.iter().chain(interp.originals()), extras, range)
        .map_err(|e| Failure::Input(e.to_string()))?;
    if let Some(m) = max_arity {
        sig = sig.with_max_arity(m).map_err(|e| Failure::Input(e.to_string()))?;
    }
    let report = check_program(&interp, &prog, mode, &sig);
    if json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serialises"));
    } else {
        let _ = write!(out, "{}", render::check(&report));
    }
    Ok(exit_for(report.aggregate))
}

fn symbols(names: &[String]) -> Result<Vec<Symbol>, Failure> {
    names
        .iter()
        .filter(|n| !n.trim().is_empty())
        .map(|n| Symbol::new(n.trim()).map_err(|e| Failure::Input(format!("symbol `{n}`: {e}"))))
        .collect()
}

fn run_universe(out: &mut String, names: &[String], depth: usize, max_arity: usize, range: RangePolicy) -> Outcome {
    let sig = Signature::new(symbols(names)?, max_arity, range).map_err(|e| Failure::Input(e.to_string()))?;
    let slice = match range {
        RangePolicy::AtomsOnly => enumerate_atoms(&sig, depth),
        RangePolicy::AllExpressions => enumerate_expressions(&sig, depth),
    };
    for e in slice {
        let _ = writeln!(out, "{e}");
    }
    Ok(0)
}

fn load_spec(path: &Path) -> Result<FragmentSpec, Failure> {
    FragmentSpec::from_json(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn run_fragment(out: &mut String, spec: &Path, file: &Path, json: bool) -> Outcome {
    let spec = load_spec(spec)?;
    let rows: Vec<(String, FormulaClass)> =
        load(file)?.into_iter().map(|l| (l.expr.to_string(), classify_formula(&spec, &l.expr))).collect();
    if json {
        let table: Vec<_> = rows.iter().map(|(e, c)| render::ClassRow::new(e, c)).collect();
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&table).expect("rows serialise"));
    } else {
        for (e, c) in &rows {
            let _ = writeln!(out, "{}", render::class_line(e, c));
        }
    }
    let all_in = rows.iter().all(|(_, c)| !matches!(c, FormulaClass::NotInFragment(_)));
    Ok(if all_in { 0 } else { 1 })
}

fn run_conservative(out: &mut String, spec: &Path, formula: &str, base: &Path, pool: &Path, depth: usize, json: bool) -> Outcome {
    let spec = load_spec(spec)?;
    let f = parse_arg(formula)?;
    let (base, _) = load_interp(base)?;
    let (_, pool_lines) = load_interp(pool)?;
    let pool: Vec<Expression> = pool_lines.into_iter().map(|l| l.expr).collect();
    let report = conservative_check(&spec, &f, &base, &pool, depth).map_err(|e| Failure::Input(e.to_string()))?;
    if json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serialises"));
    } else {
        let _ = write!(out, "{}", render::conservative(&report));
    }
    Ok(if !report.conclusive {
        4
    } else if report.mismatches.is_empty() {
        0
    } else {
        1
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rpl::fragment::ConservativeReport;
    use rpl::herbrand::CheckReport;

    fn corpus(name: &str) -> String {
        format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    fn rpl(args: &[&str]) -> Run {
        run(std::iter::once("rpl").chain(args.iter().copied()))
    }

    fn scratch(name: &str, text: &str) -> String {
        let dir = std::env::temp_dir().join(format!("rpl-cli-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        fs::write(&path, text).unwrap();
        path.display().to_string()
    }

    #[test]
    fn parse_prints_one_line_per_expression() {
        let r = rpl(&["parse", &corpus("p1.rpl")]);
        assert_eq!(r.code, 0, "{}", r.err);
        assert_eq!(r.out.lines().count(), 4);
        assert!(r.out.starts_with("believes(ann, itRains)\n"));
    }

    #[test]
    fn parse_errors_carry_a_location_and_code() {
        let r = rpl(&["parse", &scratch("empty-args.rpl", "p()\n")]);
        assert_eq!(r.code, 2);
        assert!(r.err.contains(":1: empty-argument-list:"), "{}", r.err);
        let r = rpl(&["parse", &scratch("reserved.rpl", "p(v1)\n")]);
        assert_eq!(r.code, 2);
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let r = rpl(&["parse", "/nonexistent/input.rpl"]);
        assert_eq!(r.code, 3);
        assert!(r.err.starts_with("/nonexistent/input.rpl:"));
    }

    #[test]
    fn usage_errors_and_help() {
        assert_eq!(rpl(&["frobnicate"]).code, 2);
        assert_eq!(rpl(&["rect", "--start", "0", "x.rpl"]).code, 2);
        let help = rpl(&["--help"]);
        assert_eq!(help.code, 0);
        assert!(help.out.contains("conservative"));
    }

    #[test]
    fn rect_trust_example() {
        let r = rpl(&["rect", &corpus("trust.rpl")]);
        assert_eq!(r.out, "(forall v1 (trust(v1) => v1))(ann, bill)  # final 2\n");
    }

    #[test]
    fn rect_start_index() {
        let f = scratch("atom.rpl", "a\n(exists x p(x))\n");
        let r = rpl(&["rect", &f, "--start", "7"]);
        assert_eq!(r.out, "a  # final 7\n(exists v7 p(v7))  # final 8\n");
    }

    #[test]
    fn rect_as_set_standardises_apart() {
        let r = rpl(&["rect", &corpus("variants.rpl"), "--as-set"]);
        let lines: Vec<&str> = r.out.lines().collect();
        assert_eq!(lines, ["(forall v2 (p(v2) & (exists v1 q(v1))))", "(forall v4 (p(v4) & (exists v3 q(v3))))"]);
    }

    #[test]
    fn variant_exit_codes() {
        let r = rpl(&["variant", "(forall x p(x))", "(forall y p(y))"]);
        assert_eq!((r.code, r.out.as_str()), (0, "variant\n"));
        let r = rpl(&["variant", "p(x)", "p(y)"]);
        assert_eq!((r.code, r.out.as_str()), (1, "not-variant\n"));
        assert_eq!(rpl(&["variant", "p(", "p"]).code, 2);
    }

    #[test]
    fn check_shipped_pairs() {
        for (p, i) in [("p1.rpl", "s1.rpli"), ("p2.rpl", "s2.rpli"), ("says-donald.rpl", "says-donald.rpli")] {
            let r = rpl(&["check", "--program", &corpus(p), "--interp", &corpus(i), "--mode", "exact"]);
            assert_eq!(r.code, 0, "{p}: {}{}", r.out, r.err);
            assert!(r.out.contains("aggregate: Satisfied (exact)"));
        }
    }

    #[test]
    fn check_russell_is_falsified_with_a_generic_witness() {
        let r = rpl(&["check", "--program", &corpus("russell.rpl"), "--interp", &corpus("intro.rpli"), "--mode", "exact"]);
        assert_eq!(r.code, 1);
        assert!(r.out.contains("witnesses: g1"), "{}", r.out);
    }

    #[test]
    fn check_json_round_trips() {
        let r = rpl(&["check", "--program", &corpus("p1.rpl"), "--interp", &corpus("s1.rpli"), "--mode", "bounded", "--depth", "0", "--json"]);
        let report: CheckReport = serde_json::from_str(&r.out).unwrap();
        assert_eq!(report.mode, Mode::Bounded { depth: 0 });
        assert_eq!(report.expressions.len(), 4);
        assert_eq!(exit_for(report.aggregate), r.code);
    }

    #[test]
    fn check_depth_must_match_mode() {
        let args = |extra: &[&'static str]| {
            let (p, i) = (corpus("p1.rpl"), corpus("s1.rpli"));
            let mut v = vec!["check".to_string(), "--program".into(), p, "--interp".into(), i];
            v.extend(extra.iter().map(|s| s.to_string()));
            v
        };
        let go = |v: Vec<String>| run(std::iter::once("rpl".to_string()).chain(v));
        assert_eq!(go(args(&["--mode", "bounded"])).code, 2);
        assert_eq!(go(args(&["--mode", "exact", "--depth", "1"])).code, 2);
    }

    #[test]
    fn check_rejects_non_atoms_in_the_interpretation() {
        let i = scratch("bad.rpli", "p(a)\n(p(a) & q)\n");
        let r = rpl(&["check", "--program", &corpus("p1.rpl"), "--interp", &i, "--mode", "exact"]);
        assert_eq!(r.code, 2);
        assert!(r.err.contains(": not-an-atom: "), "{}", r.err);
    }

    #[test]
    fn universe_slice_is_duplicate_free() {
        let r = rpl(&["universe", "--symbols", "a", "--depth", "1"]);
        assert_eq!(r.out.lines().collect::<Vec<_>>(), ["a", "a(a)"]);
        let r = rpl(&["universe", "--symbols", "a,b", "--depth", "1"]);
        let lines: Vec<&str> = r.out.lines().collect();
        let unique: std::collections::BTreeSet<_> = lines.iter().collect();
        assert_eq!((lines.len(), unique.len()), (6, 6));
    }

    #[test]
    fn fragment_classification() {
        let r = rpl(&["fragment", "--spec", &corpus("barber-frag.json"), &corpus("barber.rpl")]);
        assert_eq!(r.code, 0);
        assert!(r.out.lines().all(|l| l.starts_with("Sentence")));
        let r = rpl(&["fragment", "--spec", &corpus("barber-frag.json"), &corpus("russell.rpl"), "--json"]);
        assert_eq!(r.code, 1);
        let rows: serde_json::Value = serde_json::from_str(&r.out).unwrap();
        assert_eq!(rows[0]["class"], "NotInFragment");
    }

    #[test]
    fn conservative_demo() {
        let base = [
            "conservative",
            "--spec",
            &corpus("conservative-frag.json"),
            "--formula",
            "(exists x p(x))",
            "--base",
            &corpus("conservative-base.rpli"),
            "--pool",
            &corpus("conservative-pool.rpli"),
        ]
        .map(String::from);
        let r = run(std::iter::once("rpl".to_string()).chain(base.clone()));
        assert_eq!(r.code, 0);
        assert!(r.out.ends_with("no mismatch over 4 extensions\n"));
        let r = run(std::iter::once("rpl".to_string()).chain(base).chain(["--json".to_string()]));
        let report: ConservativeReport = serde_json::from_str(&r.out).unwrap();
        assert!(report.holds());
        assert_eq!(report.extensions_checked, 4);
    }
}
