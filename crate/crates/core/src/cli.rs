//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 search space exhausted,
//! 3 search bounds hit, 4 verification failure.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::codec::{parse_certificate, parse_tangle, serialize_certificate, serialize_tangle};
use crate::diagram::TangleDiagram;
use crate::moves::{build_triangle, Letter, MoveName, MoveSet, TriangleCode};
use crate::search::{derive_with_stats, verify_certificate, SearchBounds, SearchError};
use crate::theorem::{self, Outcome, TheoremError};
use crate::theta::{enumerate_theta_configs, move_ends, thetas_text};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_EXHAUSTED: i32 = 2;
pub const EXIT_BOUNDS: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "reidemeister",
    version,
    about = "Derive oriented type-3 Reidemeister moves from one another using type-2 moves"
)]
pub struct Cli {
    /// Print progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Largest crossing count the search may visit [default: start + 4].
    #[arg(long)]
    pub max_crossings: Option<usize>,
    /// Longest derivation considered.
    #[arg(long, default_value_t = 24)]
    pub max_depth: usize,
    /// Largest number of distinct diagrams stored.
    #[arg(long, default_value_t = 5_000_000)]
    pub max_states: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the 16 triangle codes with their model tangles.
    Triangles,
    /// Enumerate the Θ-configurations and write thetas.txt.
    Thetas {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Certificates for Θ-related pairs (all pairs unless --pair is given).
    Lemma {
        /// The pair X Y: derive move X from move Y.
        #[arg(long, num_args = 2, value_names = ["X", "Y"])]
        pair: Option<Vec<String>>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Search for a derivation between two tangles.
    ///
    /// A tangle is a file in the tangle format or a triangle code such as
    /// `c↑` (also `c^`, `cv`). A trailing `*` takes the type-3 image, so
    /// `c↑*` is the target of the move c↑ → c↓.
    Derive {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Comma-separated moves: move names, `R2` for all type-2 moves, or
        /// a letter for both directions of its type-3 move.
        #[arg(long)]
        basis: String,
        #[command(flatten)]
        bounds: BoundArgs,
        /// Write the certificate here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Replay a certificate.
    Verify { cert: PathBuf },
    /// Print the mirror image of a certificate.
    Mirror {
        cert: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Derive the other seven type-3 moves from one (all letters by default).
    Theorem {
        #[arg(long)]
        basis: Option<String>,
        /// Also search directly for every implication edge and report lengths.
        #[arg(long)]
        direct_search: bool,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the whole pipeline and print the report.
    Report {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn verify(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_VERIFY,
            message: message.into(),
        }
    }
}

impl From<TheoremError> for Failure {
    fn from(e: TheoremError) -> Self {
        let code = match &e {
            TheoremError::Io { .. } => EXIT_USAGE,
            TheoremError::LemmaSearch { source, .. } | TheoremError::Bridge(source) => search_code(source),
            _ => EXIT_VERIFY,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn search_code(e: &SearchError) -> i32 {
    match e {
        SearchError::Exhausted { .. } => EXIT_EXHAUSTED,
        SearchError::BoundsHit { .. } => EXIT_BOUNDS,
        _ => EXIT_USAGE,
    }
}

/// Parses `argv` and runs; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(&cli, &mut out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::usage(format!("writing output: {e}")))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("reading {}: {e}", path.display())))
}

fn write_or_emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::usage(format!("writing {}: {e}", p.display()))),
        None => emit(out, text),
    }
}

fn parse_letter(s: &str) -> Result<Letter, Failure> {
    let mut chars = s.chars();
    match (chars.next().and_then(Letter::from_char), chars.next()) {
        (Some(l), None) => Ok(l),
        _ => Err(Failure::usage(format!("not a move letter: {s:?} (expected one of a b c d A B C D)"))),
    }
}

/// A triangle code (`a↑`, `a^`, `av`, optionally followed by `*`) or a
/// tangle file.
pub fn resolve_tangle(spec: &str) -> Result<TangleDiagram, Failure> {
    let (body, image) = match spec.strip_suffix('*') {
        Some(b) => (b, true),
        None => (spec, false),
    };
    let normalized: String = body.replace('^', "↑").replace('v', "↓");
    if let Ok(code) = normalized.parse::<TriangleCode>() {
        let (s, t) = if code.flag == crate::moves::Flag::Up {
            move_ends(code.letter)
        } else {
            let s = build_triangle(code);
            let site = crate::moves::sole_triangle(&s).expect("one triangle");
            let t = crate::moves::r3_flip(&s, &site);
            (s, t)
        };
        return Ok(if image { t } else { s });
    }
    let text = read(Path::new(spec))?;
    parse_tangle(&text).map_err(|e| Failure::usage(format!("{spec}: {e}")))
}

/// Comma- or space-separated basis: move names, `R2`, or letters.
pub fn parse_basis(spec: &str) -> Result<MoveSet, Failure> {
    let mut set = MoveSet::new();
    for tok in spec.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        if tok.eq_ignore_ascii_case("r2") {
            set.extend(MoveName::all_r2());
        } else if tok.chars().count() == 1 {
            set.extend(MoveName::r3_both(parse_letter(tok)?));
        } else {
            let m: MoveName = tok.parse().map_err(|e: crate::moves::UnknownMove| Failure::usage(e.to_string()))?;
            set.insert(m);
        }
    }
    if set.is_empty() {
        return Err(Failure::usage("empty basis"));
    }
    Ok(set)
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let log = |msg: &str| {
        if cli.verbose {
            eprintln!("{msg}");
        }
    };
    match &cli.command {
        Command::Triangles => {
            let mut text = String::new();
            for code in TriangleCode::all() {
                text.push_str(&format!("# {code}  {}\n", code.arrow_string()));
                text.push_str(&serialize_tangle(&build_triangle(code)));
                text.push('\n');
            }
            emit(out, &text)
        }
        Command::Thetas { out: dir } => {
            let configs = enumerate_theta_configs().map_err(|e| Failure::verify(e.to_string()))?;
            let text = thetas_text(&configs);
            std::fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
            write_or_emit(out, Some(&dir.join("thetas.txt")), &text)?;
            emit(out, &text)
        }
        Command::Lemma { pair, out: dir } => {
            let configs = enumerate_theta_configs().map_err(|e| Failure::verify(e.to_string()))?;
            let mut lemmas = theorem::lemma_suite(&configs)?;
            if let Some(p) = pair {
                let (x, y) = (parse_letter(&p[0])?, parse_letter(&p[1])?);
                lemmas.retain(|e| e.x == x && e.y == y);
                if lemmas.is_empty() {
                    return Err(Failure::usage(format!("({x},{y}) is not Θ-related")));
                }
            }
            let mut text = String::new();
            for e in &lemmas {
                let rel = theorem::lemma_path(e.x, e.y);
                let path = dir.join(&rel);
                if let Some(parent) = path.parent() {
                    std::fs::create_dir_all(parent).map_err(|err| Failure::usage(err.to_string()))?;
                }
                write_or_emit(out, Some(&path), &serialize_certificate(&e.constructive))?;
                let moves: Vec<String> = e.constructive.steps.iter().map(|s| s.name.to_string()).collect();
                text.push_str(&format!(
                    "{} ⇒ {}  length {} (search {})  {}  {}\n",
                    e.y,
                    e.x,
                    e.constructive.len(),
                    e.searched.len(),
                    moves.join(" "),
                    path.display()
                ));
            }
            emit(out, &text)
        }
        Command::Derive {
            from,
            to,
            basis,
            bounds,
            output,
        } => {
            let start = resolve_tangle(from)?;
            let goal = resolve_tangle(to)?;
            let basis = parse_basis(basis)?;
            let mut b = SearchBounds::for_start(&start);
            if let Some(n) = bounds.max_crossings {
                b.max_crossings = n;
            }
            b.max_depth = bounds.max_depth;
            b.max_states = bounds.max_states;
            if b.max_crossings == 0 || b.max_depth == 0 || b.max_states == 0 {
                return Err(Failure::usage("bounds must be positive"));
            }
            match derive_with_stats(&start, &goal, &basis, b) {
                Ok((cert, stats)) => {
                    log(&format!("found length {} after {} states", cert.len(), stats.states));
                    write_or_emit(out, output.as_deref(), &serialize_certificate(&cert))
                }
                Err(e) => Err(Failure {
                    code: search_code(&e),
                    message: e.to_string(),
                }),
            }
        }
        Command::Verify { cert } => {
            let text = read(cert)?;
            let c = parse_certificate(&text).map_err(|e| Failure::verify(format!("{}: {e}", cert.display())))?;
            verify_certificate(&c).map_err(|e| Failure::verify(format!("{}: {e}", cert.display())))?;
            emit(out, &format!("ok: {} steps verified\n", c.len()))
        }
        Command::Mirror { cert, output } => {
            let text = read(cert)?;
            let c = parse_certificate(&text).map_err(|e| Failure::verify(format!("{}: {e}", cert.display())))?;
            let m = c.mirrored();
            verify_certificate(&m).map_err(|e| Failure::verify(format!("mirror of {}: {e}", cert.display())))?;
            write_or_emit(out, output.as_deref(), &serialize_certificate(&m))
        }
        Command::Theorem {
            basis,
            direct_search,
            out: dir,
        } => {
            let bases = match basis {
                Some(l) => vec![parse_letter(l)?],
                None => Letter::ALL.to_vec(),
            };
            log("running pipeline");
            let o = theorem::run(&bases)?;
            theorem::write_outputs(&o, dir)?;
            let mut text = String::new();
            for d in &o.derivations {
                text.push_str(&format!(
                    "{} ⇒ {}  length {}  {}\n",
                    d.basis,
                    d.target,
                    d.certificate.len(),
                    dir.join(theorem::theorem_path(d.basis, d.target)).display()
                ));
            }
            if *direct_search {
                text.push_str(&direct_search_table(&o)?);
            }
            emit(out, &text)
        }
        Command::Report { out: dir } => {
            let o = theorem::run(&Letter::ALL)?;
            theorem::write_outputs(&o, dir)?;
            emit(out, &theorem::report(&o))
        }
    }
}

/// Direct searches for every implication edge, next to the lengths of the
/// certificates the graph uses.
fn direct_search_table(o: &Outcome) -> Result<String, Failure> {
    let mut text = String::from("\ndirect search (edge y ⇒ x: graph length, searched length)\n");
    let edges: BTreeSet<(Letter, Letter)> = o.graph.edge_set();
    for (y, x) in edges {
        let (s, g) = move_ends(x);
        let bounds = SearchBounds::for_start(&s).with_max_crossings(theorem::BRIDGE_MAX_CROSSINGS);
        let found = derive_with_stats(&s, &g, &crate::moves::basis_with(&[y]), bounds).map_err(|e| Failure {
            code: search_code(&e),
            message: format!("{y} ⇒ {x}: {e}"),
        })?;
        let used = o.graph.edges[&(y, x)].1.len();
        text.push_str(&format!("{y} ⇒ {x}: {used}, {}\n", found.0.len()));
    }
    Ok(text)
}
