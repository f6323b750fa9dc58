//! `treealg`: law checks, automaton membership, the recognising map and the
//! skeleton checker from the command line. The last line of every report is
//! `RESULT: <verdict>`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use treealg_core::algebra::{check_monad_laws, TreeAlgebra};
use treealg_core::automaton::{automaton_sg, membership_algebraic, membership_game, Recognizer, Verdict};
use treealg_core::branch::{show_branch, BranchAlgebra};
use treealg_core::formats::{
    parse_automaton, parse_cl_label, parse_config, parse_graph, parse_graph_with, parse_table_algebra,
    parse_tree_arg, parse_wilke, WorkspaceConfig,
};
use treealg_core::omega::{wilke_check, MeetBounds};
use treealg_core::report::{Report, SamplerConfig};
use treealg_core::skeleton::{skeleton_check, skeleton_verdict, SkeletonBounds};
use treealg_core::tree::{HoleMode, LabelPool, RankedTree};
use treealg_core::treesg::{cl_subalgebra_closure_check, traces_regular, Generators, TaAlgebra};
use treealg_core::Error;

const EXIT_USAGE: u8 = 64;
const EXIT_BUDGET: u8 = 65;

#[derive(Parser, Debug)]
#[command(name = "treealg", version, about = "Algebras for infinite ranked trees")]
struct Cli {
    /// File of `key = value` lines overriding the defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Sampled law checks.
    Laws {
        #[command(subcommand)]
        cmd: LawsCmd,
    },
    /// Does the automaton accept the unravelling of a closed graph?
    Membership {
        #[arg(long)]
        automaton: PathBuf,
        /// Graph file over the automaton's alphabet.
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// The recognising map applied to a finite term.
    Alpha {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        term: String,
        /// Also evaluate the term as a product of its letters' images.
        #[arg(long)]
        via_product: bool,
    },
    /// Trace set of a graph labelled by meets of semigroup elements.
    Traces {
        #[arg(long)]
        wilke: PathBuf,
        #[arg(long)]
        graph: PathBuf,
    },
    /// Wilke algebra tools.
    Wilke {
        #[command(subcommand)]
        cmd: WilkeCmd,
    },
    /// Bounded check of the skeleton axioms of Branch(S).
    Skeleton(SkeletonArgs),
}

#[derive(Subcommand, Debug)]
enum LawsCmd {
    /// Monad laws of a finite table algebra, or of TA(S) for a Wilke algebra.
    Check {
        #[arg(long, conflicts_with = "wilke", required_unless_present = "wilke")]
        algebra: Option<PathBuf>,
        #[arg(long)]
        wilke: Option<PathBuf>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Use every hole exactly once in generated trees.
        #[arg(long)]
        linear: bool,
    },
}

#[derive(Subcommand, Debug)]
enum WilkeCmd {
    /// Value of an ultimately periodic word `u1 u2 ; v1 v2` or `u1 a`.
    Expand {
        #[arg(long)]
        wilke: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// The Wilke identities and order compatibility.
    Check {
        #[arg(long)]
        wilke: PathBuf,
    },
}

#[derive(Args, Debug)]
struct SkeletonArgs {
    /// Build S from a Wilke algebra file.
    #[arg(long, conflicts_with = "automaton", required_unless_present = "automaton")]
    wilke: Option<PathBuf>,
    /// Build S = S_A from an automaton (also compares with the parity game).
    #[arg(long)]
    automaton: Option<PathBuf>,
    /// Remove an element from the candidate skeleton (repeatable).
    #[arg(long)]
    drop: Vec<String>,
    #[arg(long)]
    tree_size: Option<usize>,
    #[arg(long)]
    graph_vertices: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Game,
    Algebraic,
    Both,
}

/// What a command decided, and how the process should exit.
enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl Outcome {
    fn code(&self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Inconclusive => 2,
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

/// Prefixes parse errors with the file they come from.
fn in_file<T>(path: &Path, r: Result<T, Error>) -> Result<T, Error> {
    r.map_err(|e| match e {
        Error::Parse { line, msg } => Error::Parse { line, msg: format!("{}: {msg}", path.display()) },
        e => e,
    })
}

fn report(rep: &Report) -> Outcome {
    print!("{rep}");
    if rep.passed() {
        println!("RESULT: PASS");
        Outcome::Pass
    } else {
        println!("RESULT: FAIL");
        Outcome::Fail
    }
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    let cfg = match &cli.config {
        Some(p) => in_file(p, parse_config(&read(p)?, WorkspaceConfig::default()))?,
        None => WorkspaceConfig::default(),
    };
    match cli.cmd {
        Cmd::Laws { cmd: LawsCmd::Check { algebra, wilke, samples, seed, linear } } => {
            let sampler = SamplerConfig::default()
                .with_samples(samples.unwrap_or(cfg.samples))
                .with_seed(seed.unwrap_or(cfg.seed))
                .with_size(cfg.tree_size)
                .with_holes(if linear { HoleMode::Linear } else { HoleMode::Affine });
            if let Some(p) = algebra {
                let alg = in_file(&p, parse_table_algebra(&read(&p)?))?;
                let pool = LabelPool::new(alg.elements().symbols().iter().cloned());
                Ok(report(&check_monad_laws(&alg, &pool, &sampler)))
            } else {
                let p = wilke.expect("clap requires one of the two");
                let ta = TaAlgebra::new(in_file(&p, parse_wilke(&read(&p)?))?, cfg.max_arity);
                let pool = LabelPool::new((0..=ta.max_arity()).flat_map(|n| ta.elements(n)));
                let mut rep = check_monad_laws(&ta, &pool, &sampler);
                rep.laws.extend(cl_subalgebra_closure_check(&ta, &Generators::all(ta.wilke()), &sampler).laws);
                Ok(report(&rep))
            }
        }
        Cmd::Membership { automaton, tree, method } => {
            let a = in_file(&automaton, parse_automaton(&read(&automaton)?))?;
            let g = in_file(&tree, parse_graph(&read(&tree)?, a.alphabet()))?;
            let game = || -> Result<Verdict, Error> {
                Ok(if membership_game(&a, &g)? { Verdict::Accept } else { Verdict::Reject })
            };
            let algebraic = || membership_algebraic(&a, &automaton_sg(&a), &g, cfg.annotation_budget);
            let verdict = match method {
                Method::Game => {
                    let v = game()?;
                    println!("game: {v}");
                    v
                }
                Method::Algebraic => {
                    let v = algebraic()?;
                    println!("algebraic: {v}");
                    v
                }
                Method::Both => {
                    let (x, y) = (game()?, algebraic()?);
                    println!("game: {x}");
                    println!("algebraic: {y}");
                    if y == Verdict::Inconclusive {
                        println!("AGREE (algebraic route inconclusive)");
                    } else if x == y {
                        println!("AGREE");
                    } else {
                        println!("DISAGREE");
                        println!("RESULT: DISAGREE");
                        return Ok(Outcome::Fail);
                    }
                    x
                }
            };
            println!("RESULT: {verdict}");
            Ok(match verdict {
                Verdict::Accept => Outcome::Pass,
                Verdict::Reject => Outcome::Fail,
                Verdict::Inconclusive => Outcome::Inconclusive,
            })
        }
        Cmd::Alpha { automaton, term, via_product } => {
            let a = in_file(&automaton, parse_automaton(&read(&automaton)?))?;
            let t = parse_tree_arg(&term, a.alphabet())?;
            let arity = cfg.max_arity.max(t.declared_arity()).max(a.alphabet().max_arity());
            let rec = Recognizer::new(a, arity).with_budget(cfg.outer_section_budget);
            let e = rec.alpha(&t)?;
            println!("alpha: {}", show_branch(&e));
            if via_product {
                let letters = t
                    .map(|s| rec.alpha(&RankedTree::singleton(s.clone())).ok())
                    .ok_or_else(|| Error::Invalid("letter outside the algebra's arity bound".into()))?;
                let p = rec.branch().try_product(&letters)?;
                println!("product: {}", show_branch(&p));
                if p != e {
                    println!("RESULT: DISAGREE");
                    return Ok(Outcome::Fail);
                }
            }
            if t.declared_arity() > 0 {
                println!("RESULT: open term");
                return Ok(Outcome::Pass);
            }
            let acc = rec.recognizes(&e)?;
            println!("RESULT: {}", if acc { "accept" } else { "reject" });
            Ok(if acc { Outcome::Pass } else { Outcome::Fail })
        }
        Cmd::Traces { wilke, graph } => {
            let w = in_file(&wilke, parse_wilke(&read(&wilke)?))?;
            let ta = TaAlgebra::new(w, cfg.max_arity);
            let g = in_file(&graph, parse_graph_with(&read(&graph)?, |tok, k| parse_cl_label(&ta, tok, k)))?;
            let tr = traces_regular(&ta, &g);
            println!("traces: {}", tr.values);
            println!("undefined: {}", if tr.undefined { "yes" } else { "no" });
            match tr.product() {
                Some(u) => println!("RESULT: {u}"),
                None => println!("RESULT: undefined"),
            }
            Ok(Outcome::Pass)
        }
        Cmd::Wilke { cmd: WilkeCmd::Expand { wilke, word } } => {
            let w = in_file(&wilke, parse_wilke(&read(&wilke)?))?;
            let u = w.parse_word(&word)?;
            match w.up_product(&u) {
                Some(a) => {
                    println!("{} = {}", w.show_word(&u), w.name0(a));
                    println!("RESULT: {}", w.name0(a));
                    Ok(Outcome::Pass)
                }
                None => {
                    println!("{} = undefined", w.show_word(&u));
                    println!("RESULT: undefined");
                    Ok(Outcome::Fail)
                }
            }
        }
        Cmd::Wilke { cmd: WilkeCmd::Check { wilke } } => {
            let w = in_file(&wilke, parse_wilke(&read(&wilke)?))?;
            Ok(report(&wilke_check(&w)))
        }
        Cmd::Skeleton(s) => skeleton(s, &cfg),
    }
}

fn skeleton(s: SkeletonArgs, cfg: &WorkspaceConfig) -> Result<Outcome, Error> {
    let (w, a) = match (&s.wilke, &s.automaton) {
        (Some(p), _) => (in_file(p, parse_wilke(&read(p)?))?, None),
        (None, Some(p)) => {
            let a = in_file(p, parse_automaton(&read(p)?))?;
            (automaton_sg(&a).into_wilke(), Some(a))
        }
        (None, None) => unreachable!("clap requires one of the two"),
    };
    let mut gens = Generators::all(&w);
    for name in &s.drop {
        match w.lookup(name) {
            Some(treealg_core::omega::Sort::Nullary(x)) => gens.s0.remove(&x),
            Some(treealg_core::omega::Sort::Unary(x)) => gens.s1.remove(&x),
            None => return Err(Error::UnknownSymbol(name.clone())),
        };
    }
    let arity = a.as_ref().map_or(cfg.max_arity, |a| cfg.max_arity.max(a.alphabet().max_arity()));
    let b = BranchAlgebra::new(TaAlgebra::new(w, arity)).with_budget(cfg.outer_section_budget);
    let bounds = SkeletonBounds {
        tree_size: s.tree_size.unwrap_or(4),
        graph_vertices: s.graph_vertices.unwrap_or(cfg.graph_vertices),
        set_size: cfg.set_size,
        samples: s.samples.unwrap_or(24),
        seed: s.seed.unwrap_or(cfg.seed),
        meet: MeetBounds::default(),
    };
    let rep = skeleton_check(&b, &gens, a.as_ref(), bounds);
    print!("{rep}");
    let verdict = skeleton_verdict(&rep);
    println!("RESULT: {verdict}");
    Ok(if rep.passed() { Outcome::Pass } else { Outcome::Fail })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(o) => ExitCode::from(o.code()),
        Err(e) => {
            eprintln!("error: {e}");
            println!("RESULT: error");
            ExitCode::from(match e {
                Error::Budget(_) => EXIT_BUDGET,
                _ => EXIT_USAGE,
            })
        }
    }
}
