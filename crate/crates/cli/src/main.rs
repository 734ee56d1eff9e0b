use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use smdc::io::{decode_files, encode_files, read_share, region_json, report_json, InstanceConfig, IoError};
use smdc::regions::{
    corners3, format_rational, min_sum_rate, parse_rational, region_mss32, region_rss, region_smdc32, region_sup1,
    region_sup2, sup_sum_rate, Mode, Rational, RegionError, RegionSpec,
};
use smdc::schemes::SchemeError;
use smdc::verifier::{full_audit, OracleMode, VerifierError};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "smdc", version, about = "Secure multilevel diversity coding toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Encode source files into one share file per encoder.
    Encode {
        #[arg(long)]
        config: PathBuf,
        /// One file per source level with nonzero length, lowest level first.
        #[arg(long = "in", num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Key seed; defaults to the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Recover every source the given shares determine.
    Decode {
        #[arg(long, num_args = 1.., required = true)]
        shares: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Audit an instance; exits 0 iff every row passes.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "both")]
        mode: OracleMode,
        /// Also write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print a rate region or sum-rate bounds.
    Region {
        #[arg(long, value_enum)]
        problem: Problem,
        /// Comma-separated entropies, e.g. `1,3/2` (one value for rss).
        #[arg(long = "H", value_delimiter = ',', required = true)]
        h: Vec<String>,
        /// Number of encoders (rss, sup2; defaults to the number of entropies).
        #[arg(long = "L")]
        encoders: Option<usize>,
        /// Threshold for rss.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, value_enum, default_value = "mss")]
        mode: ModeArg,
        /// List the vertices of a three-dimensional region.
        #[arg(long)]
        corners: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    Rss,
    Sup1,
    Sup2,
    Mss32,
    Smdc32,
    Sumrate,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Mss,
    Sliding,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", json!({ "error": error_kind(&e), "message": format!("{e:#}") }));
            ExitCode::from(2)
        }
    }
}

fn variant_name<T: std::fmt::Debug>(v: &T) -> String {
    let s = format!("{v:?}");
    s.split(['(', ' ', '{']).next().unwrap_or("Error").to_string()
}

/// Most specific library error variant in the chain, for scripting.
fn error_kind(e: &anyhow::Error) -> String {
    for cause in e.chain() {
        if let Some(io) = cause.downcast_ref::<IoError>() {
            match io {
                IoError::Scheme(inner) => return variant_name(inner),
                other => return variant_name(other),
            }
        }
        if let Some(v) = cause.downcast_ref::<VerifierError>() {
            return variant_name(v);
        }
        if let Some(s) = cause.downcast_ref::<SchemeError>() {
            return variant_name(s);
        }
        if let Some(r) = cause.downcast_ref::<RegionError>() {
            return variant_name(r);
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return "Os".into();
        }
    }
    "Usage".into()
}

fn run(cmd: Cmd) -> Result<ExitCode> {
    match cmd {
        Cmd::Encode {
            config,
            inputs,
            out,
            seed,
        } => encode(&config, &inputs, &out, seed),
        Cmd::Decode { shares, out } => decode(&shares, &out),
        Cmd::Verify { config, mode, report } => verify(&config, mode, report.as_deref()),
        Cmd::Region {
            problem,
            h,
            encoders,
            k,
            s,
            mode,
            corners,
            json,
        } => region(problem, &h, encoders, k, s, mode, corners, json),
    }
}

fn encode(config: &Path, inputs: &[PathBuf], out: &Path, seed: Option<u64>) -> Result<ExitCode> {
    let cfg = InstanceConfig::load(config).with_context(|| format!("reading {}", config.display()))?;
    let Some(seed) = seed.or(cfg.seed) else {
        bail!("no key seed: pass --seed or set seed in the config");
    };
    let levels: Vec<usize> = (0..cfg.lengths.len()).filter(|&a| cfg.lengths[a] > 0).collect();
    if inputs.len() != levels.len() {
        bail!(
            "expected {} input files (one per nonempty source), got {}",
            levels.len(),
            inputs.len()
        );
    }
    let mut sources = vec![Vec::new(); cfg.lengths.len()];
    for (&a, path) in levels.iter().zip(inputs) {
        sources[a] = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    }
    let shares = encode_files(&cfg, &sources, seed)?;
    std::fs::create_dir_all(out)?;
    for share in &shares {
        let path = out.join(format!("share{}.smdc", share.index));
        std::fs::write(&path, share.to_bytes()?)?;
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn decode(paths: &[PathBuf], out: &Path) -> Result<ExitCode> {
    let shares = paths
        .iter()
        .map(|p| read_share(p).with_context(|| format!("reading {}", p.display())))
        .collect::<Result<Vec<_>>>()?;
    let sources = decode_files(&shares)?;
    std::fs::create_dir_all(out)?;
    for src in &sources {
        let path = out.join(format!("x{}.bin", src.level));
        std::fs::write(&path, &src.octets)?;
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(config: &Path, mode: OracleMode, report: Option<&Path>) -> Result<ExitCode> {
    let cfg = InstanceConfig::load(config).with_context(|| format!("reading {}", config.display()))?;
    let inst = cfg.instance()?;
    let rep = full_audit(&inst, mode);
    let text = report_json(&rep);
    if let Some(path) = report {
        std::fs::write(path, &text)?;
    }
    println!("{text}");
    Ok(if rep.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn parse_entropies(h: &[String]) -> Result<Vec<Rational>> {
    h.iter()
        .map(|v| match parse_rational(v) {
            Some(r) if r >= Rational::from_integer(0) => Ok(r),
            _ => bail!("bad entropy {v:?}"),
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn region(
    problem: Problem,
    h: &[String],
    encoders: Option<usize>,
    k: Option<usize>,
    s: Option<usize>,
    mode: ModeArg,
    corners: bool,
    json_out: bool,
) -> Result<ExitCode> {
    let h = parse_entropies(h)?;
    let want = |n: usize| -> Result<()> {
        if h.len() != n {
            bail!("expected {n} entropies, got {}", h.len());
        }
        Ok(())
    };
    let reg: RegionSpec = match problem {
        Problem::Rss => {
            want(1)?;
            let l = encoders.context("rss needs --L")?;
            let k = k.context("rss needs --k")?;
            if k == 0 || k > l {
                bail!("need 1 <= k <= L");
            }
            region_rss(l, k, h[0])
        }
        Problem::Sup1 => region_sup1(encoders.unwrap_or(h.len()), &h),
        Problem::Sup2 => {
            let s = s.context("sup2 needs --s")?;
            if s == 0 || s > h.len() {
                bail!("need 1 <= s <= L");
            }
            region_sup2(encoders.unwrap_or(h.len()), s, &h)
        }
        Problem::Mss32 => {
            want(2)?;
            region_mss32(h[0], h[1])
        }
        Problem::Smdc32 => {
            want(3)?;
            region_smdc32(h[0], h[1], h[2])
        }
        Problem::Sumrate => return sum_rate(&h, s.unwrap_or(1), mode, json_out),
    };
    let vertices = if corners { Some(corners3(&reg)?) } else { None };
    if json_out {
        println!("{}", region_json(&reg, vertices.as_deref()));
    } else {
        println!("{} in {} dimensions", reg.label, reg.dim);
        for row in &reg.rows {
            let lhs: Vec<String> = row.coeffs.iter().map(format_rational).collect();
            println!(
                "  [{}] . R >= {}  ({})",
                lhs.join(", "),
                format_rational(&row.rhs),
                row.tag
            );
        }
        for c in vertices.iter().flatten() {
            let pt: Vec<String> = c.iter().map(format_rational).collect();
            println!("corner ({})", pt.join(", "));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn sum_rate(h: &[Rational], s: usize, mode: ModeArg, json_out: bool) -> Result<ExitCode> {
    let mode = match mode {
        ModeArg::Mss => Mode::Mss,
        ModeArg::Sliding => Mode::Sliding,
    };
    let min = min_sum_rate(s, h, mode)?;
    let sup = sup_sum_rate(s, h, mode)?;
    if json_out {
        println!("{}", json!({ "min": min, "sup": sup, "gap": sup - min }));
    } else {
        println!(
            "min {}  sup {}  gap {}",
            format_rational(&min),
            format_rational(&sup),
            format_rational(&(sup - min))
        );
    }
    Ok(ExitCode::SUCCESS)
}
