use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mcgcalc_core::symplectic::Genus;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "mcgcalc", version, about = "Exact symplectic-invariant calculus workbench")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json, env = "MCGCALC_FORMAT")]
    pub format: Format,
    /// Directory for cached bases.
    #[arg(long, global = true, env = "MCGCALC_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Multiplier on the default work and time budget.
    #[arg(long, global = true, default_value_t = 1.0, env = "MCGCALC_BUDGET")]
    pub budget: f64,
    /// Worker threads for the parallel core.
    #[arg(long, global = true, env = "MCGCALC_THREADS")]
    pub threads: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0, env = "MCGCALC_SEED")]
    pub seed: u64,
    /// Record wall-clock time in the report (makes output nondeterministic).
    #[arg(long, global = true, env = "MCGCALC_TIMING")]
    pub timing: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// A genus list: "3", "1..3" (inclusive) or "2,4".
#[derive(Clone, Debug)]
pub struct GenusRange(pub Vec<Genus>);

impl std::str::FromStr for GenusRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("bad genus {x:?}"));
        let values: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty genus range {s:?}"));
            }
            (a..=b).collect()
        } else {
            s.split(',').map(num).collect::<Result<_, _>>()?
        };
        values.into_iter().map(|g| Genus::new(g).map_err(|e| e.to_string())).collect::<Result<_, _>>().map(GenusRange)
    }
}

impl Serialize for GenusRange {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|g| g.get()))
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GK {
    /// Genus or genus range.
    #[arg(long, env = "MCGCALC_G")]
    pub g: GenusRange,
    /// Number of chords, or the degree index.
    #[arg(long, env = "MCGCALC_K")]
    pub k: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GOnly {
    #[arg(long, env = "MCGCALC_G")]
    pub g: GenusRange,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GDegree {
    #[arg(long, env = "MCGCALC_G")]
    pub g: GenusRange,
    #[arg(long, env = "MCGCALC_DEGREE")]
    pub degree: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dimensions of the basic spaces.
    Dims {
        #[command(subcommand)]
        what: DimsCmd,
    },
    /// Checks of published or derived values; exit code 2 on mismatch.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Trivalent graphs and their invariants.
    Graphs {
        #[command(subcommand)]
        what: GraphsCmd,
    },
    /// Sp-invariants of h(degree), optionally split into j, L_g and the rest.
    HInvariants {
        #[command(flatten)]
        gd: GDegree,
        #[arg(long)]
        split: bool,
    },
    /// Basis export through the cache.
    Basis {
        #[command(subcommand)]
        what: BasisCmd,
    },
    /// Cache maintenance.
    Cache {
        #[command(subcommand)]
        what: CacheCmd,
    },
}

#[derive(Subcommand, Debug)]
pub enum DimsCmd {
    /// Dimension of (H^{⊗2k})^Sp from the Gram matrix of chord diagrams.
    Chord(GK),
    /// Dimensions of L(k), the ideal I(k) and L_g(k).
    Lie(GK),
    /// Dimension of h(k), optionally certified by a bracket-map rank.
    H {
        #[command(flatten)]
        gk: GK,
        #[arg(long)]
        certify: bool,
    },
    /// Dimension of the ideal part j(k).
    J(GK),
    /// Weyl dimension of an Sp(2g) irreducible, e.g. "[21]".
    Weyl {
        #[arg(long)]
        partition: String,
        #[command(flatten)]
        g: GOnly,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// Σ a_C = 0 below the stable range and the row-sum formula.
    SumRelation(GK),
    /// p_k² = k·p_k on full bases and random tensors.
    PkIdempotent {
        #[command(flatten)]
        g: GOnly,
        /// Largest degree checked on a full basis.
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 500)]
        random: usize,
        #[arg(long, default_value_t = 8)]
        random_k: usize,
    },
    /// dim h(k) against the Weyl-dimension row sum of its decomposition.
    Table(GK),
    /// Listed decompositions of Λ²U, Λ²S³H and t(1)⊗t(2) against their totals.
    Decompositions(GOnly),
    /// Tr(3) kills brackets and j(3) and is onto S³H; Tr(5) kills sampled brackets.
    TraceProps {
        #[command(flatten)]
        g: GOnly,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// q(u∧ω₀) = 0 and q² = q.
    QMap(GOnly),
    /// The ℓ_C form a basis of invariants for k ≤ g.
    #[command(name = "prop4-7")]
    Prop47(GK),
    /// Λ²S³H → h(6) is injective.
    #[command(name = "prop6-5")]
    Prop65(GOnly),
    /// An invariant 2-cycle with nonzero trace cochain.
    #[command(name = "prop6-6")]
    Prop66(GOnly),
    /// Abelianization cokernel against the conjectured value.
    Abelianization(GDegree),
    /// Every sp(2g) generator annihilates a_C, ℓ_C and ξ_C.
    Invariance(GK),
}

#[derive(Subcommand, Debug)]
pub enum GraphsCmd {
    /// Trivalent graphs on a given number of vertices.
    Enumerate {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        connected: bool,
        #[arg(long)]
        loopless: bool,
    },
    /// Ranks of the degree-two graph invariants.
    Ranks(GOnly),
    /// The first relation among the a_C, pushed to graphs.
    Relation {
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// The e₁ functional on a_theta and a_dumbbell.
    E1(GOnly),
}

#[derive(Subcommand, Debug)]
pub enum BasisCmd {
    /// Writes a basis to the cache directory, reusing a current cached copy.
    Export {
        #[arg(long, value_enum)]
        kind: BasisKind,
        #[command(flatten)]
        gk: GK,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    /// Linear chord diagrams with k chords.
    Chord,
    /// Hall basis of L(k).
    Lie,
    /// Basis of h(k).
    H,
    /// Basis of j(k).
    J,
}

#[derive(Subcommand, Debug)]
pub enum CacheCmd {
    /// Removes stale-format files, then enforces an optional size quota.
    Gc {
        #[arg(long, default_value_t = 1)]
        keep_versions: u32,
        #[arg(long)]
        quota_bytes: Option<u64>,
    },
}
