use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use conjred::dlo::phi::classify_prefix;
use conjred::dlo::dlo_reduce;
use conjred::graph::reduce::{check_commuting, CERTIFICATE_PREFIX, DELTA_CHECK_CODES};
use conjred::graph::{
    decide_conjugate_reduced, delta_adj, delta_witness, graph_conjugator, graph_reduce_with, Verdict, VertexCode,
};
use conjred::invariants::{cycle_type, SupportedPermutation};
use conjred::rado::{rado_adj, rado_witness};
use conjred::staged::FiniteMap;
use conjred::structure::{format_map, parse_map, parse_structure, ListedGraph, OrderOracle, Structure};
use conjred::{Error, Nat, PartialMap, StagedMap};

const GRAMMAR: &str = "\
Grammar:
  conjred rado adj <i> <j>
  conjred rado witness <u1,u2,...> <v1,v2,...>
  conjred delta adj <graphfile> <i,j> <k,l>
  conjred delta witness <graphfile> <U> <V>
  conjred reduce graph <graphfile> [--depth n]
  conjred reduce order <orderfile> [--depth n]
  conjred orbitals <orderfile> [--depth n]
  conjred conjugate <xfile> <yfile> [--iso <mapfile>] [--depth n] [--budget n]
  conjred cycletype <mapfile> [--prefix n]

Sets are comma lists with `-` for the empty set. A Δ vertex is `row,column`;
a list of Δ vertices is a flat comma list read in pairs, so `0,1,1,3` is
{(0,1), (1,3)}. A cycletype map file that permutes its listed points fixes
every other point; any other map must be defined on the whole prefix.
Defaults: --depth 50, --prefix 100, --budget 1000000.
Exit status: 0 on success, 1 on domain errors, 2 on usage errors.";

#[derive(Parser)]
#[command(name = "conjred", version, about = "Reductions of isomorphism to conjugacy", after_help = GRAMMAR)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Queries on the random graph Γ.
    #[command(subcommand)]
    Rado(RadoCmd),
    /// Queries on the extension Δ_x of a graph file.
    #[command(subcommand)]
    Delta(DeltaCmd),
    /// Prints `map a b` lines of the reduced automorphism.
    #[command(subcommand)]
    Reduce(ReduceCmd),
    /// Prints the orbital parity of each of the first `depth` rationals.
    Orbitals {
        file: PathBuf,
        #[arg(long, default_value_t = 50)]
        depth: usize,
    },
    /// Decides conjugacy of the reductions of two graph files.
    Conjugate {
        x: PathBuf,
        y: PathBuf,
        #[arg(long)]
        iso: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        depth: usize,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Cycle type of a finite map on a prefix of ℕ.
    Cycletype {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        prefix: u64,
    },
}

#[derive(Subcommand)]
enum RadoCmd {
    Adj {
        #[arg(value_parser = nat)]
        i: Nat,
        #[arg(value_parser = nat)]
        j: Nat,
    },
    Witness {
        #[arg(value_parser = nat_set)]
        u: BTreeSet<Nat>,
        #[arg(value_parser = nat_set)]
        v: BTreeSet<Nat>,
    },
}

#[derive(Subcommand)]
enum DeltaCmd {
    Adj {
        file: PathBuf,
        #[arg(value_parser = vertex)]
        u: VertexCode,
        #[arg(value_parser = vertex)]
        v: VertexCode,
    },
    Witness {
        file: PathBuf,
        #[arg(value_parser = vertex_set)]
        u: BTreeSet<VertexCode>,
        #[arg(value_parser = vertex_set)]
        v: BTreeSet<VertexCode>,
    },
}

#[derive(Subcommand)]
enum ReduceCmd {
    Graph {
        file: PathBuf,
        #[arg(long, default_value_t = 50)]
        depth: usize,
    },
    Order {
        file: PathBuf,
        #[arg(long, default_value_t = 50)]
        depth: usize,
    },
}

fn nat(s: &str) -> Result<Nat, String> {
    s.parse().map_err(|_| format!("`{s}` is not a natural"))
}

fn fields(s: &str) -> Vec<&str> {
    if s == "-" {
        Vec::new()
    } else {
        s.split(',').collect()
    }
}

fn nat_set(s: &str) -> Result<BTreeSet<Nat>, String> {
    fields(s).into_iter().map(nat).collect()
}

fn vertex(s: &str) -> Result<VertexCode, String> {
    match vertex_set(s)?.into_iter().collect::<Vec<_>>().as_slice() {
        [v] if !s.is_empty() && s != "-" => Ok(v.clone()),
        _ => Err(format!("`{s}` is not a vertex `row,column`")),
    }
}

fn vertex_set(s: &str) -> Result<BTreeSet<VertexCode>, String> {
    let f = fields(s);
    if f.len() % 2 == 1 {
        return Err(format!("`{s}` has an odd number of fields"));
    }
    f.chunks(2)
        .map(|p| {
            let row: usize = p[0].parse().map_err(|_| format!("`{}` is not a row", p[0]))?;
            let col = p[1].parse().map_err(|_| format!("`{}` is not a column", p[1]))?;
            Ok(VertexCode::new(row, col))
        })
        .collect()
}

enum Failure {
    Domain(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn graph_file(path: &Path) -> Result<ListedGraph, Failure> {
    match parse_structure(&read(path)?)? {
        Structure::Graph(g) => Ok(g),
        Structure::Order(_) => {
            Err(Error::MalformedLine { line: 1, detail: format!("{} is an order file, a graph was expected", path.display()) }
                .into())
        }
    }
}

fn order_file(path: &Path) -> Result<OrderOracle, Failure> {
    match parse_structure(&read(path)?)? {
        Structure::Order(o) => Ok(o),
        Structure::Graph(_) => {
            Err(Error::MalformedLine { line: 1, detail: format!("{} is a graph file, an order was expected", path.display()) }
                .into())
        }
    }
}

fn show_vertex(v: &VertexCode) -> String {
    format!("{},{}", v.row(), v.col())
}

fn run(cmd: Command) -> Result<String, Failure> {
    let mut out = String::new();
    match cmd {
        Command::Rado(RadoCmd::Adj { i, j }) => writeln!(out, "{}", rado_adj(&i, &j)).unwrap(),
        Command::Rado(RadoCmd::Witness { u, v }) => writeln!(out, "{}", rado_witness(&u, &v)?).unwrap(),
        Command::Delta(DeltaCmd::Adj { file, u, v }) => {
            let x = graph_file(&file)?;
            writeln!(out, "{}", delta_adj(&x, &u, &v)).unwrap();
        }
        Command::Delta(DeltaCmd::Witness { file, u, v }) => {
            graph_file(&file)?;
            writeln!(out, "{}", show_vertex(&delta_witness(&u, &v)?)).unwrap();
        }
        Command::Reduce(ReduceCmd::Graph { file, depth }) => {
            let r = graph_reduce_with(Arc::new(graph_file(&file)?), depth);
            out.push_str(&format_map(&r.stage(depth)));
        }
        Command::Reduce(ReduceCmd::Order { file, depth }) => {
            let phi = dlo_reduce(&order_file(&file)?)?;
            out.push_str(&format_map(&phi.stage(depth)));
        }
        Command::Orbitals { file, depth } => {
            let phi = dlo_reduce(&order_file(&file)?)?;
            for (index, parity) in classify_prefix(phi.inner(), depth as u64)? {
                writeln!(out, "orbital {index} {}", parity.as_str()).unwrap();
            }
        }
        Command::Conjugate { x, y, iso, depth, budget } => {
            let (gx, gy) = (graph_file(&x)?, graph_file(&y)?);
            let hx = Arc::new(graph_reduce_with(Arc::new(gx.clone()), depth));
            let hy = Arc::new(graph_reduce_with(Arc::new(gy.clone()), depth));
            let verdict = match iso {
                Some(path) => {
                    let a = vertex_map(&parse_map(&read(&path)?)?)?;
                    let gamma = graph_conjugator(hx.clone(), hy.clone(), &a)?;
                    gamma.verify_on_delta(DELTA_CHECK_CODES)?;
                    let report = check_commuting(&gamma, hx.as_ref(), hy.as_ref(), CERTIFICATE_PREFIX, depth)?;
                    Verdict::Conjugate { iso: a, certificate: gamma.stage(depth), report }
                }
                None => decide_conjugate_reduced(hx, hy, &gx, &gy, budget, depth)?,
            };
            if let Verdict::Conjugate { certificate, .. } = &verdict {
                out.push_str(&format_map(certificate));
            }
            writeln!(out, "verdict {}", verdict.word()).unwrap();
        }
        Command::Cycletype { file, prefix } => {
            let m = parse_map(&read(&file)?)?;
            // A map permuting its listed points fixes everything else.
            let ct = match SupportedPermutation::from_map(&m) {
                Ok(p) => cycle_type(&p, prefix)?,
                Err(_) => cycle_type(&FiniteMap(m), prefix)?,
            };
            writeln!(out, "{ct}").unwrap();
        }
    }
    Ok(out)
}

fn vertex_map(m: &PartialMap<Nat, Nat>) -> Result<PartialMap<u64, u64>, Failure> {
    let small = |n: &Nat| {
        n.as_u64().ok_or_else(|| Error::NotAnIsomorphism(format!("vertex {n} does not fit in 64 bits")))
    };
    let mut a = PartialMap::new();
    for (i, j) in m.iter() {
        a.insert(small(i)?, small(j)?)?;
    }
    Ok(a)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error {}: {e}", e.name());
            ExitCode::from(1)
        }
        Err(Failure::Io(detail)) => {
            eprintln!("error Io: {detail}");
            ExitCode::from(1)
        }
    }
}
