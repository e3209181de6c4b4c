//! Command-line front end for lcakit.
//!
//! [`run`] parses an argument vector and returns the exit code together with the
//! full report text, so the binary and the tests share one code path.

pub mod demo;

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use lcakit::arith::{parse_rat, Int};
use lcakit::haar::Ladder;
use lcakit::homological::{cyclic_cohomology, dihedral_h2, ext1_count, group_cohomology};
use lcakit::nenashev::{replay, swindle_file, DiagramFile};
use lcakit::order::dihedral_table;
use lcakit::{
    build_m_alpha, builtin_order, check_exact, compact_part, decompose_cg_discrete, det_square_factors,
    modulus, seq_factor, splits_algebraically, validate_order, ExactSequenceSpec, LcaError, LcaMorphism,
    LcaObject, Order,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "lcakit", version, about = "Exact calculus for locally compact abelian groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pontryagin dual of an object or a morphism.
    Dual { value: String },
    /// Topological predicates of an object.
    Predicates { object: String },
    /// The canonical compactly generated / discrete sequence, or the compact part with --compact.
    Decompose {
        object: String,
        #[arg(long)]
        compact: bool,
    },
    /// Haar modulus of a morphism, or of multiplication by a rational on an object.
    Modulus {
        target: String,
        #[arg(allow_hyphen_values = true)]
        scalar: Option<String>,
    },
    /// Measure factor of the exact sequence given by a monic and an epic.
    SeqFactor { monic: String, epic: String },
    /// Multiplicativity on a ladder (with --ladder f g h) or the square of a filtration G1 -> G2 -> G3.
    DetCheck {
        first: String,
        second: String,
        #[arg(long, num_args = 3, value_names = ["F", "G", "H"])]
        ladder: Option<Vec<String>>,
    },
    /// Local absolute values of a nonzero rational and their product.
    ProductFormula {
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// H^k(C_n, Z), or H^k(D_2n, Z) with --dihedral.
    Cohomology {
        n: usize,
        k: usize,
        #[arg(long)]
        dihedral: bool,
    },
    /// The extension M_alpha of Z by R[C_n]/N_G.
    MAlpha {
        n: usize,
        #[arg(allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        check_split: bool,
    },
    /// Axioms and semisimplicity of a built-in order or an order file.
    OrderValidate { order: String },
    /// Double exact sequence diagrams.
    Nenashev {
        #[command(subcommand)]
        action: NenashevCommand,
    },
    /// Replays worked examples.
    Demo {
        id: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long)]
        list: bool,
    },
}

#[derive(Subcommand, Debug)]
enum NenashevCommand {
    /// Checks every diagram in a file and prints its relation.
    Verify { file: PathBuf },
    /// Checks the diagrams and reduces every `reduce` target.
    Reduce { file: PathBuf },
    /// Prints the swindle diagram file for an automorphism [[a, b], [c, d]] of Z^2.
    Swindle {
        #[arg(allow_hyphen_values = true)]
        entries: Vec<i64>,
    },
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<LcaError> for Failure {
    fn from(e: LcaError) -> Self {
        match e {
            LcaError::Parse { .. } | LcaError::UnknownName(_) => Failure::Usage(e.to_string()),
            other => Failure::Check(other.to_string()),
        }
    }
}

type Outcome = std::result::Result<(i32, String), Failure>;

/// Runs one command line; `args[0]` is the program name.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return (code, e.render().to_string());
        }
    };
    match dispatch(cli.command) {
        Ok(r) => r,
        Err(Failure::Usage(m)) => (EXIT_USAGE, format!("error: {m}\n")),
        Err(Failure::Check(m)) => (EXIT_FAILED, format!("error: {m}\n")),
    }
}

fn ok(text: impl Into<String>) -> Outcome {
    let mut s = text.into();
    if !s.ends_with('\n') {
        s.push('\n');
    }
    Ok((EXIT_OK, s))
}

fn verdict(pass: bool, text: String) -> Outcome {
    Ok((if pass { EXIT_OK } else { EXIT_FAILED }, text))
}

fn object(s: &str) -> std::result::Result<LcaObject, Failure> {
    Ok(s.parse()?)
}

fn morphism(s: &str) -> std::result::Result<LcaMorphism, Failure> {
    Ok(s.parse()?)
}

fn rational(s: &str) -> std::result::Result<lcakit::arith::Rat, Failure> {
    parse_rat(s.trim()).ok_or_else(|| Failure::Usage(format!("'{s}' is not a rational number")))
}

fn read(path: &PathBuf) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Dual { value } => {
            if value.trim_start().starts_with('[') {
                ok(morphism(&value)?.dual().to_string())
            } else {
                ok(object(&value)?.dual().to_string())
            }
        }
        Command::Predicates { object: o } => ok(object(&o)?.predicates().to_string()),
        Command::Decompose { object: o, compact } => {
            let g = object(&o)?;
            let seq = if compact { compact_part(&g)? } else { decompose_cg_discrete(&g) };
            ok(seq.to_string())
        }
        Command::Modulus { target, scalar } => {
            let f = match scalar {
                Some(q) => LcaMorphism::scalar(&object(&target)?, &rational(&q)?)?,
                None => morphism(&target)?,
            };
            ok(modulus(&f)?.to_string())
        }
        Command::SeqFactor { monic, epic } => {
            let seq = ExactSequenceSpec::new(morphism(&monic)?, morphism(&epic)?);
            ok(seq_factor(&seq)?.to_string())
        }
        Command::DetCheck { first, second, ladder } => det_check(&first, &second, ladder),
        Command::ProductFormula { x } => {
            let x = rational(&x)?;
            let report = lcakit::adele::product_formula_report(&x)?;
            verdict(lcakit::product_formula_check(&x), report)
        }
        Command::Cohomology { n, k, dihedral } => {
            let h = if dihedral {
                if n < 2 {
                    return Err(Failure::Usage("the dihedral group needs n >= 2".into()));
                }
                if k == 2 {
                    dihedral_h2(n)?
                } else {
                    group_cohomology(&dihedral_table(n), k)?
                }
            } else {
                if n < 2 {
                    return Err(Failure::Usage("the cyclic group needs n >= 2".into()));
                }
                cyclic_cohomology(n, k)?
            };
            ok(h.to_string())
        }
        Command::MAlpha { n, alpha, check_split } => {
            let alpha: Int = alpha.trim().parse().map_err(|_| Failure::Usage(format!("'{alpha}' is not an integer")))?;
            let e = build_m_alpha(n, &alpha)?;
            let mut out = format!(
                "sub: {}\nmiddle: {}\nquotient: {}\nclass: {} mod {}\n",
                e.sub_shape(),
                e.mid_shape(),
                e.quot_shape(),
                e.extension_class(),
                n
            );
            if check_split {
                let splits = splits_algebraically(&e);
                out.push_str(&format!("ext1 classes: {}\n", ext1_count(n)?));
                out.push_str(&format!("splits: {}\n", if splits { "yes" } else { "no" }));
            }
            ok(out)
        }
        Command::OrderValidate { order } => {
            let o = resolve_order(&order)?;
            let report = validate_order(&o);
            verdict(report.is_valid(), format!("{report}\n"))
        }
        Command::Nenashev { action } => nenashev(action),
        Command::Demo { id, all, list } => demo_command(id, all, list),
    }
}

fn det_check(first: &str, second: &str, ladder: Option<Vec<String>>) -> Outcome {
    let (i, j) = (morphism(first)?, morphism(second)?);
    if let Some(maps) = ladder {
        let seq = ExactSequenceSpec::new(i, j);
        if check_exact(&seq)? != lcakit::ExactVerdict::Exact {
            return Err(Failure::Check("the sequence is not exact".into()));
        }
        let (f, g, h) = (morphism(&maps[0])?, morphism(&maps[1])?, morphism(&maps[2])?);
        let (mf, mg, mh) = (modulus(&f)?, modulus(&g)?, modulus(&h)?);
        let ladder = Ladder { seq, f, g, h };
        let holds = lcakit::check_modulus_multiplicativity(&ladder)?;
        let text = format!("|g| = {mg}\n|f| * |h| = {}\nholds: {}\n", &mf * &mh, yes_no(holds));
        return verdict(holds, text);
    }
    let [s1, s2, s3, s4] = det_square_factors(&i, &j)?;
    let holds = &s1 * &s2 == &s3 * &s4;
    let text = format!(
        "G1 >-> G3 ->> G3/G1: {s1}\nG2/G1 >-> G3/G1 ->> G3/G2: {s2}\nG2 >-> G3 ->> G3/G2: {s3}\nG1 >-> G2 ->> G2/G1: {s4}\n\
         holds: {}\n",
        yes_no(holds)
    );
    verdict(holds, text)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn resolve_order(name: &str) -> std::result::Result<Order, Failure> {
    if let Some(o) = builtin_order(name) {
        return Ok(o);
    }
    let path = PathBuf::from(name);
    if path.exists() {
        return Ok(read(&path)?.parse()?);
    }
    Err(Failure::Usage(format!("'{name}' is neither a built-in order nor a file")))
}

fn nenashev(action: NenashevCommand) -> Outcome {
    let file: DiagramFile = match &action {
        NenashevCommand::Swindle { entries } => {
            let [a, b, c, d] = entries.as_slice() else {
                return Err(Failure::Usage("swindle takes four matrix entries".into()));
            };
            if a * d - b * c != 1 && a * d - b * c != -1 {
                return Err(Failure::Usage("the matrix is not invertible over Z".into()));
            }
            return ok(swindle_file(&[[*a, *b], [*c, *d]]));
        }
        NenashevCommand::Verify { file } | NenashevCommand::Reduce { file } => read(file)?.parse()?,
    };
    let reducing = matches!(action, NenashevCommand::Reduce { .. });
    let (rels, targets) = replay(&file)?;
    let mut out = String::new();
    for r in &rels {
        out.push_str(&format!("{}: {}\n", r.name, r.display));
    }
    if !reducing {
        return ok(out);
    }
    let lattice: Vec<_> = rels.iter().map(|r| r.relation.clone()).collect();
    let mut all_verified = true;
    for (name, expr, red) in &targets {
        let cert: Vec<String> = rels.iter().zip(&red.certificate).map(|(r, c)| format!("{} * {}", c, r.name)).collect();
        let verified = red.verify(expr, &lattice);
        all_verified &= verified;
        out.push_str(&format!(
            "reduce {name}: {}\ncertificate: {}\ncertificate verified: {}\n",
            file.abbreviate(&red.normal_form),
            cert.join(", "),
            yes_no(verified)
        ));
    }
    verdict(all_verified, out)
}

fn demo_command(id: Option<String>, all: bool, list: bool) -> Outcome {
    if list {
        let lines: Vec<String> = demo::registry().iter().map(|s| format!("{}\t{}", s.id, s.description)).collect();
        return ok(lines.join("\n"));
    }
    let scenarios: Vec<&demo::DemoScenario> = match (id, all) {
        (_, true) => demo::registry().iter().collect(),
        (Some(id), false) => vec![demo::find(&id).ok_or_else(|| Failure::Usage(format!("unknown scenario '{id}'")))?],
        (None, false) => return Err(Failure::Usage("give a scenario id, --all or --list".into())),
    };
    let report = demo::run_scenarios(&scenarios);
    verdict(report.all_passed(), report.to_string())
}
