use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lacuna::arith::{format_rat, parse_rat, Rat};
use lacuna::blackbox::{make_blackbox, reduce_mod_with, BlackBoxRef, DenseBox};
use lacuna::interp::{full_interpolate, interpolate_with_shift};
use lacuna::options::{Options, MU_ENV};
use lacuna::oracle::{conjecture_bound, s_of_q, OracleConfig, PrimeStream, CAP_EXP};
use lacuna::poly::PolySource;
use lacuna::shift::{sparsest_shift, Bounds, ShiftPath};
use lacuna::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "lacuna", version, about = "Sparsest shifts and sparse interpolation over Q from modular black boxes")]
struct Cli {
    /// Initial estimate of the prime-gap constant used by the prime oracle.
    #[arg(long, global = true, env = MU_ENV)]
    mu: Option<f64>,
    /// Primes above this use transform-based grid interpolation.
    #[arg(long, global = true)]
    threshold: Option<usize>,
    /// Seed for randomized root splitting.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Args, Debug)]
struct PolyArg {
    /// Polynomial as inline JSON or a path to a JSON file.
    #[arg(long)]
    poly: String,
}

#[derive(Args, Debug)]
struct BoundsArg {
    /// Size bounds, e.g. `BA=4,BT=2,BH=4,BN=4`.
    #[arg(long, value_parser = parse_bounds)]
    bounds: Bounds,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// f(t) mod p.
    Eval {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        point: u64,
    },
    /// f mod (x^p - x, p), ascending coefficients.
    Reduce {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long)]
        prime: u64,
    },
    /// Sparsest shift and the residues that determined it.
    Shift {
        #[command(flatten)]
        poly: PolyArg,
        #[command(flatten)]
        bounds: BoundsArg,
    },
    /// Full shifted-lacunary representation.
    Interpolate {
        #[command(flatten)]
        poly: PolyArg,
        #[command(flatten)]
        bounds: BoundsArg,
        /// Use this shift instead of searching for one.
        #[arg(long)]
        assume_shift: Option<String>,
    },
    /// Dump the prime reservoir.
    Oracle {
        #[arg(long)]
        beta1: u64,
        #[arg(long)]
        beta2: u64,
        #[arg(long)]
        ell: u64,
    },
    /// Least prime k·q+1 below q^cap_exp, and the 2q·ln²q check.
    Sq {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = CAP_EXP)]
        cap_exp: f64,
    },
}

fn parse_bounds(s: &str) -> std::result::Result<Bounds, String> {
    let mut vals = [None; 4];
    for part in s.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("expected KEY=VALUE, got {part:?}"))?;
        let slot = match k.trim().to_ascii_uppercase().as_str() {
            "BA" => 0,
            "BT" => 1,
            "BH" => 2,
            "BN" => 3,
            other => return Err(format!("unknown bound {other:?}")),
        };
        let v: u64 = v.trim().parse().map_err(|e| format!("{k}: {e}"))?;
        if v == 0 {
            return Err(format!("{k} must be positive"));
        }
        vals[slot] = Some(v);
    }
    match vals {
        [Some(ba), Some(bt), Some(bh), Some(bn)] => Ok(Bounds::new(ba, bt, bh, bn)),
        _ => Err("all of BA, BT, BH, BN are required".into()),
    }
}

fn load_poly(arg: &str) -> Result<PolySource> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)
            .map_err(|e| Error::InvalidInput(format!("cannot read {arg}: {e}")))?
    };
    PolySource::from_json(&text)
}

fn blackbox(src: PolySource) -> BlackBoxRef {
    match src {
        PolySource::Lacunary(f) => make_blackbox(f),
        PolySource::Dense(c) => Arc::new(DenseBox::new(c)),
    }
}

fn run(cli: &Cli, opts: &Options) -> Result<Value> {
    Ok(match &cli.command {
        Command::Eval { poly, prime, point } => {
            let bb = blackbox(load_poly(&poly.poly)?);
            let v = bb.eval(*prime, *point)?;
            json!({ "p": prime, "point": point, "value": v })
        }
        Command::Reduce { poly, prime } => {
            if !lacuna::arith::is_prime_u64(*prime) {
                return Err(Error::InvalidInput(format!("{prime} is not prime")));
            }
            let bb = blackbox(load_poly(&poly.poly)?);
            let fp = reduce_mod_with(bb.as_ref(), *prime, opts.threshold)?;
            json!({ "p": prime, "coefficients": fp.coeffs() })
        }
        Command::Shift { poly, bounds } => {
            let bb = blackbox(load_poly(&poly.poly)?);
            let r = sparsest_shift(bb.as_ref(), bounds.bounds, opts)?;
            json!({
                "alpha": format_rat(&r.alpha),
                "path": match r.path {
                    ShiftPath::Modular => "modular",
                    ShiftPath::DenseFallback => "dense",
                },
                "residues": r.residues.iter()
                    .map(|&(a, p)| json!({ "alpha_p": a, "p": p }))
                    .collect::<Vec<_>>(),
            })
        }
        Command::Interpolate {
            poly,
            bounds,
            assume_shift,
        } => {
            let bb = blackbox(load_poly(&poly.poly)?);
            let f = match assume_shift {
                Some(a) => {
                    let alpha: Rat = parse_rat(a)?;
                    interpolate_with_shift(bb, &alpha, bounds.bounds, opts)?
                }
                None => full_interpolate(bb, bounds.bounds, opts)?.0,
            };
            serde_json::from_str(&f.to_json()).expect("canonical JSON")
        }
        Command::Oracle { beta1, beta2, ell } => {
            if *ell == 0 {
                return Err(Error::InvalidInput("ell must be positive".into()));
            }
            let cfg = OracleConfig::new(*beta1, *beta2, *ell).with_mu(opts.mu);
            let s = PrimeStream::generate(cfg)?;
            json!({ "n": s.n(), "mu": s.mu(), "primes": s.reservoir() })
        }
        Command::Sq { q, cap_exp } => {
            if !lacuna::arith::is_prime_u64(*q) {
                return Err(Error::InvalidInput(format!("{q} is not prime")));
            }
            match s_of_q(*q, *cap_exp) {
                Some((s, k)) => json!({
                    "q": q,
                    "S": s,
                    "k": k,
                    "conjecture_holds": (s as f64) < conjecture_bound(*q),
                }),
                None => json!({ "q": q, "S": null, "k": null, "conjecture_holds": false }),
            }
        }
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BlackBoxFailure(_) | Error::DenominatorVanished { .. } => 4,
        e if e.is_reconstruction_failure() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut opts = Options::default();
    if let Some(mu) = cli.mu {
        if !(mu.is_finite() && mu >= 1.0) {
            eprintln!("error: --mu must be a finite number ≥ 1");
            return ExitCode::from(2);
        }
        opts.mu = mu;
    }
    if let Some(t) = cli.threshold {
        opts.threshold = t;
    }
    opts.seed = cli.seed;
    if cli.threads > 0 {
        // a second initialization can only fail if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match run(&cli, &opts) {
        Ok(v) => {
            let text = match cli.format {
                Format::Json => serde_json::to_string(&v),
                Format::Pretty => serde_json::to_string_pretty(&v),
            }
            .expect("serializable");
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
