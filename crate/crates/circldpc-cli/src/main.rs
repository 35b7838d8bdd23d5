use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use circldpc::circuit::{parse_circuit, Circuit};
use circldpc::codewords::{build_ec_structure, relevant_measurements, sigma_in, sigma_out, CodeSpaces, PauliOperator};
use circldpc::css::{assemble_physical, derive_logicals, labelled_graph, logical_cnot_layer, repeated_measurement_layer};
use circldpc::distance::circuit_distance;
use circldpc::gf2::{BitMatrix, BitVector};
use circldpc::pauli_sim::verify_codeword_equation;
use circldpc::splitting::{check_distance_bound, path_plan, random_plan, symmetric_split, SplitPlan};
use circldpc::synthesis::{greedy_partition, roundtrip_check, synthesize, trivial_partition, PathPartition};
use circldpc::tanner::{build_plain, symmetrize, verify_symmetry, SymmetryWitness, TannerGraph};

/// Stabiliser circuits as classical LDPC codes.
#[derive(Parser)]
#[command(name = "circldpc", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the Tanner graph of a circuit and write `A` plus the label sidecar.
    BuildTanner {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Split bits until the graph has bit-check symmetry; writes `A`, `D`, labels.
    Symmetrize {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Classify one codeword, or every kernel basis vector.
    Classify {
        #[arg(long)]
        circuit: PathBuf,
        /// Codeword as a 0/1 string.
        #[arg(long)]
        codeword: Option<String>,
    },
    /// Error-correction and logical matrices for given boundary codes.
    EcMatrices {
        #[arg(long)]
        circuit: PathBuf,
        /// Comma-separated input stabiliser generators, e.g. `ZZI,XXI`.
        #[arg(long, default_value = "")]
        s_in: String,
        #[arg(long, default_value = "")]
        s_out: String,
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Circuit code distance of `(B, L)`.
    Distance {
        #[arg(long = "B")]
        b: PathBuf,
        #[arg(long = "L")]
        l: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_weight: usize,
        /// Label sidecar for naming witness bits.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Check every codeword equation against the tableau simulator.
    Verify {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Random input states per codeword.
        #[arg(long, default_value_t = 8)]
        states: usize,
        /// Also inject random spacetime errors up to this weight.
        #[arg(long, default_value_t = 0)]
        error_weight: usize,
    },
    /// Symmetric bit splitting of a graph with bit-check symmetry.
    Split {
        #[command(flatten)]
        graph: GraphArgs,
        /// Split plan file; without it a random plan is drawn (needs `--seed`).
        #[arg(long, conflicts_with_all = ["seed", "paths"])]
        plan: Option<PathBuf>,
        /// Split every bit of degree above 3 into a path.
        #[arg(long)]
        paths: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 3)]
        max_parts: usize,
        /// Compare distances before and after up to this weight.
        #[arg(long)]
        max_weight: Option<usize>,
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Synthesise a circuit from a graph with bit-check symmetry.
    Synthesize {
        #[command(flatten)]
        graph: GraphArgs,
        /// Path partition file; default is the trivial partition.
        #[arg(long, conflicts_with = "greedy")]
        partition: Option<PathBuf>,
        /// Grow paths greedily up to this many vertices.
        #[arg(long)]
        greedy: Option<usize>,
        /// Run the round-trip check up to this weight.
        #[arg(long)]
        check: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Closed-form matrices of a transversal circuit on a CSS code.
    CssGen {
        #[arg(long)]
        gx: PathBuf,
        #[arg(long)]
        gz: PathBuf,
        /// `rep:<m>` or `cnot`.
        #[arg(long)]
        layer: String,
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Graphviz rendering of a circuit's graph or of a matrix.
    ExportDot {
        #[arg(long, conflicts_with = "a")]
        circuit: Option<PathBuf>,
        #[arg(long = "A")]
        a: Option<PathBuf>,
        #[arg(long)]
        labels: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long = "A")]
    a: PathBuf,
    #[arg(long = "D")]
    d: PathBuf,
    #[arg(long)]
    labels: Option<PathBuf>,
}

/// Print a line, ignoring a closed stdout.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn read_matrix(path: &Path) -> Result<BitMatrix> {
    let text = read(path)?;
    let m = if path.extension().is_some_and(|e| e == "alist") {
        BitMatrix::read_alist(text.as_bytes())
    } else {
        BitMatrix::from_text(&text)
    };
    m.with_context(|| format!("parsing {}", path.display()))
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    let c = parse_circuit(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let v = c.validate();
    if let Some(first) = v.first() {
        bail!("invalid circuit {}: {first:?}", path.display());
    }
    Ok(c)
}

fn graph_of(a: &BitMatrix, labels: Option<&PathBuf>) -> Result<TannerGraph> {
    Ok(match labels {
        Some(p) => TannerGraph::from_matrix_and_labels(a, &read(p)?)?,
        None => TannerGraph::from_matrix(a),
    })
}

fn load_symmetric(args: &GraphArgs) -> Result<(TannerGraph, SymmetryWitness)> {
    let a = read_matrix(&args.a)?;
    let g = graph_of(&a, args.labels.as_ref())?;
    let w = SymmetryWitness::from_deleting_matrix(&read_matrix(&args.d)?)?;
    verify_symmetry(&g, &w)?;
    Ok((g, w))
}

fn write_graph(prefix: &Path, g: &TannerGraph, w: Option<&SymmetryWitness>) -> Result<()> {
    write(&with_suffix(prefix, ".A.txt"), &g.check_matrix().to_text())?;
    write(&with_suffix(prefix, ".labels"), &g.labels_text())?;
    if let Some(w) = w {
        write(&with_suffix(prefix, ".D.txt"), &w.deleting_matrix(g.n_bits()).to_text())?;
    }
    Ok(())
}

fn parse_paulis(s: &str) -> Result<Vec<PauliOperator>> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(|t| t.parse().map_err(|e| anyhow!("bad Pauli `{t}`: {e:?}"))).collect()
}

fn bit_list(g: &TannerGraph, v: &BitVector) -> String {
    v.ones().map(|b| g.bit_name(b)).collect::<Vec<_>>().join(" ")
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::BuildTanner { circuit, out_prefix } => {
            let g = build_plain(&read_circuit(&circuit)?);
            write_graph(&out_prefix, &g, None)?;
            out!("bits {} checks {} edges {}", g.n_bits(), g.n_checks(), g.n_edges());
        }
        Cmd::Symmetrize { circuit, out_prefix } => {
            let c = read_circuit(&circuit)?;
            let s = symmetrize(&build_plain(&c), &c)?;
            write_graph(&out_prefix, &s.graph, Some(&s.witness))?;
            out!("bits {} checks {} splits {} long {}", s.graph.n_bits(), s.graph.n_checks(), s.splits, s.witness.long.len());
        }
        Cmd::Classify { circuit, codeword } => {
            let g = build_plain(&read_circuit(&circuit)?);
            let sp = CodeSpaces::new(&g);
            let words: Vec<BitVector> = match codeword {
                Some(s) => {
                    let bits: Vec<u8> = s.trim().bytes().map(|b| b.wrapping_sub(b'0')).collect();
                    if bits.iter().any(|&b| b > 1) {
                        bail!("codeword must be a 0/1 string");
                    }
                    vec![BitVector::from_bits(&bits)]
                }
                None => sp.kernel.rows().to_vec(),
            };
            for c in &words {
                let class = sp.classify(c)?;
                let mu: Vec<String> = relevant_measurements(&g, c).iter().map(|m| format!("m{}", m + 1)).collect();
                out!("{c} {class} in={} out={} meas=[{}]", sigma_in(&g, c), sigma_out(&g, c), mu.join(","));
            }
        }
        Cmd::EcMatrices { circuit, s_in, s_out, out_prefix } => {
            let g = build_plain(&read_circuit(&circuit)?);
            let ec = build_ec_structure(&g, &parse_paulis(&s_in)?, &parse_paulis(&s_out)?)?;
            write(&with_suffix(&out_prefix, ".B.txt"), &ec.b.to_text())?;
            write(&with_suffix(&out_prefix, ".L.txt"), &ec.l.to_text())?;
            let join = |v: &[PauliOperator]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
            out!("B rows {} L rows {}", ec.b.n_rows(), ec.l.n_rows());
            out!("logical in: {}", join(&ec.l_in));
            out!("logical out: {}", join(&ec.l_out));
        }
        Cmd::Distance { b, l, max_weight, labels, jobs } => {
            if let Some(j) = jobs {
                rayon::ThreadPoolBuilder::new().num_threads(j).build_global()?;
            }
            let (b, l) = (read_matrix(&b)?, read_matrix(&l)?);
            let r = circuit_distance(&b, &l, max_weight)?;
            out!("{}", r.value);
            if let Some(w) = &r.witness {
                let names = match &labels {
                    Some(p) => bit_list(&TannerGraph::from_matrix_and_labels(&BitMatrix::zeros(0, b.n_cols()), &read(p)?)?, w),
                    None => w.ones().map(|i| i.to_string()).collect::<Vec<_>>().join(" "),
                };
                out!("witness: {names}");
            }
            out!("max weight: {}", r.max_weight);
            out!("enumerated: {}", r.enumerated);
        }
        Cmd::Verify { circuit, seed, states, error_weight } => {
            let c = read_circuit(&circuit)?;
            let g = build_plain(&c);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let basis = g.check_matrix().kernel_basis();
            let mut checked = 0;
            for cw in basis.rows() {
                for _ in 0..states {
                    verify_codeword_equation(&c, &g, cw, None, &mut rng)?;
                    checked += 1;
                    if error_weight > 0 {
                        let e = random_error(g.n_bits(), error_weight, &mut rng);
                        verify_codeword_equation(&c, &g, cw, Some(&e), &mut rng)?;
                        checked += 1;
                    }
                }
            }
            out!("verified {} codewords in {checked} runs", basis.n_rows());
        }
        Cmd::Split { graph, plan, paths, seed, max_parts, max_weight, out_prefix } => {
            let (g, w) = load_symmetric(&graph)?;
            let plan = match (plan, paths, seed) {
                (Some(p), _, _) => SplitPlan::parse(&read(&p)?, &g)?,
                (None, true, _) => path_plan(&g, &w),
                (None, false, Some(s)) => random_plan(&g, &w, max_parts, &mut ChaCha8Rng::seed_from_u64(s)),
                (None, false, None) => {
                    clap::Error::raw(clap::error::ErrorKind::MissingRequiredArgument, "a random split plan needs --seed\n").exit()
                }
            };
            let out = symmetric_split(&g, &w, &plan)?;
            write_graph(&out_prefix, &out.graph, Some(&out.witness))?;
            write(&with_suffix(&out_prefix, ".plan"), &plan.to_text(&g))?;
            out!("bits {} -> {}, max degree {} -> {}", g.n_bits(), out.graph.n_bits(), g.max_degree(), out.graph.max_degree());
            if let Some(mw) = max_weight {
                let (b, l) = circldpc::synthesis::boundary_b_l(&g, &w);
                let r = check_distance_bound(&g, &out.maps, &b, &l, mw)?;
                out!("d {} d' {} factor {} bound {}", r.d, r.d_split, r.factor, if r.holds { "holds" } else { "violated" });
                if !r.holds {
                    bail!("distance bound violated");
                }
            }
        }
        Cmd::Synthesize { graph, partition, greedy, check, out } => {
            let (g, w) = load_symmetric(&graph)?;
            let p = match (partition, greedy) {
                (Some(f), _) => PathPartition::parse(&read(&f)?, &g)?,
                (None, Some(len)) => greedy_partition(&g, &w, len)?,
                (None, None) => trivial_partition(&g, &w)?,
            };
            let syn = synthesize(&g, &w, &p)?;
            write(&out, &syn.circuit.serialize())?;
            out!("qubits {} depth {} gates {}", syn.circuit.n_qubits, syn.circuit.depth(), syn.schedule.gate_count());
            if let Some(mw) = check {
                let r = roundtrip_check(&g, &w, &p, mw)?;
                out!("d {} d' {} structure {} bound {}", r.d, r.d_circuit, r.structure_matches, r.bound_holds);
                if !r.ok() {
                    bail!("round-trip check failed");
                }
            }
        }
        Cmd::CssGen { gx, gz, layer, out_prefix } => {
            let code = derive_logicals(&read_matrix(&gx)?, &read_matrix(&gz)?)?;
            let layer = match layer.as_str() {
                "cnot" => logical_cnot_layer(),
                s => match s.strip_prefix("rep:").and_then(|m| m.parse().ok()) {
                    Some(m) => repeated_measurement_layer(m)?,
                    None => clap::Error::raw(clap::error::ErrorKind::InvalidValue, format!("unknown layer `{s}`; use rep:<m> or cnot\n")).exit(),
                },
            };
            let p = assemble_physical(&code, &layer)?;
            for (suffix, m) in [(".A.txt", &p.a), (".D.txt", &p.d), (".B.txt", &p.b), (".L.txt", &p.l)] {
                write(&with_suffix(&out_prefix, suffix), &m.to_text())?;
            }
            write(&with_suffix(&out_prefix, ".labels"), &labelled_graph(&code, &layer, &p).labels_text())?;
            out!("n {} k {} bits {} checks {} B rows {} L rows {}", code.n, code.k, p.a.n_cols(), p.a.n_rows(), p.b.n_rows(), p.l.n_rows());
        }
        Cmd::ExportDot { circuit, a, labels } => {
            let g = match (circuit, a) {
                (Some(c), _) => build_plain(&read_circuit(&c)?),
                (None, Some(a)) => graph_of(&read_matrix(&a)?, labels.as_ref())?,
                (None, None) => clap::Error::raw(clap::error::ErrorKind::MissingRequiredArgument, "give --circuit or --A\n").exit(),
            };
            {
                use std::io::Write;
                let _ = std::io::stdout().write_all(g.export_dot().as_bytes());
            }
        }
    }
    Ok(())
}

fn random_error(n: usize, max_weight: usize, rng: &mut ChaCha8Rng) -> BitVector {
    use rand::seq::index::sample;
    use rand::Rng;
    let w = rng.gen_range(1..=max_weight.min(n).max(1));
    let idx: Vec<usize> = if n == 0 { Vec::new() } else { sample(rng, n, w).into_vec() };
    BitVector::from_support(n, &idx)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
