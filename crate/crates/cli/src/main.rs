//! `ckflow`: flow-equivalence invariants and Cuntz–Krieger checks from the
//! command line.
//!
//! Every subcommand prints one JSON document with the keys `command`,
//! `inputs`, `result` and `certificates` (or `error`). Exit codes: 0 success
//! or a true decision, 1 a false decision, 2 bad input, 3 resource limit.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ckflow::aut::DEFAULT_AUT_LIMIT;
use ckflow::cylinder::DEFAULT_CORNER_MAX_LEN;
use ckflow::shift::DEFAULT_WORD_CAP;

#[derive(Parser, Debug)]
#[command(
    name = "ckflow",
    version,
    about = "Flow equivalence of shifts of finite type"
)]
pub struct Cli {
    /// Print a human-readable summary instead of JSON.
    #[arg(long, global = true, conflicts_with = "json")]
    pretty: bool,

    /// Print the JSON document (the default).
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

/// A matrix argument is a file path (text or JSON format) or an inline
/// literal such as `[[1,1],[1,0]]`.
#[derive(Args, Debug)]
pub struct MatrixArg {
    /// Matrix file or inline literal.
    pub matrix: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bowen–Franks group coker(I - A).
    Bf(MatrixArg),
    /// det(I - A).
    Det(MatrixArg),
    /// Smith normal form of a matrix, with its transforms.
    Snf(MatrixArg),
    /// Decide flow equivalence of two shifts.
    Floweq { a: String, b: String },
    /// Edge shift A^G.
    Edge(MatrixArg),
    /// Admissible words of a given length over the edge alphabet.
    Words {
        matrix: String,
        #[arg(long, short = 'k')]
        length: usize,
        #[arg(long, default_value_t = DEFAULT_WORD_CAP)]
        cap: usize,
    },
    /// Expansion of a 0-1 matrix at a vertex.
    Expand {
        matrix: String,
        /// Vertex, numbered from 1.
        #[arg(long)]
        vertex: usize,
    },
    /// Elementary equivalence: check A = CD and return B = DC.
    Elem { a: String, c: String, d: String },
    /// Search for elementary factorizations A = CD.
    Ssesearch {
        matrix: String,
        #[arg(long, default_value_t = 3)]
        max_inner: usize,
        #[arg(long, default_value_t = 2)]
        max_entry: u64,
        #[arg(long, default_value_t = 50_000_000)]
        node_budget: u64,
    },
    /// K0 group coker(I - A^t) and the class of the unit.
    K0(MatrixArg),
    /// Order of the automorphism group of K0.
    Autord {
        matrix: String,
        /// Also count the automorphisms one by one.
        #[arg(long)]
        enumerate: bool,
        #[arg(long, default_value_t = DEFAULT_AUT_LIMIT)]
        limit: usize,
    },
    /// Aut(K0) modulo the stabilizer of the unit class.
    Picquot {
        matrix: String,
        #[arg(long, default_value_t = DEFAULT_AUT_LIMIT)]
        limit: usize,
    },
    /// Picard quotient for the Cuntz algebra O_N.
    Cuntz { n: u64 },
    /// Symbolic verification of Cuntz–Krieger identities.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Defining relations of the edge algebra.
    Ck(MatrixArg),
    /// Identities of the expansion at a vertex.
    Expansion {
        matrix: String,
        /// Vertex, numbered from 1.
        #[arg(long)]
        vertex: usize,
    },
    /// Relative bases of the elementary equivalence CD ~ DC.
    Sse { c: String, d: String },
    /// Corner transfer isometries for Q = sum of range projections of words.
    Corner {
        matrix: String,
        /// A word of edges, e.g. "e21" or "e12 e21" or "2.3" (indices from 1).
        /// Repeat for each word.
        #[arg(long = "word", required = true)]
        words: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_CORNER_MAX_LEN)]
        max_len: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (doc, summary, code) = commands::run(&cli.command);
    if cli.pretty {
        println!("{summary}");
    } else {
        println!(
            "{}",
            serde_json::to_string(&doc).expect("JSON values serialize")
        );
    }
    ExitCode::from(code)
}
