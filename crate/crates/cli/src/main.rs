//! Command-line front end: wires partition configs to the computational
//! surfaces (expand, theta, cdf, gvalues, mset, classify, dim) with
//! reproducible seeds and machine-readable output.
//!
//! Exit codes: 0 success, 2 configuration/usage error, 3 when `--strict` was
//! passed and the certified verdict is undetermined.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use luroth::exact::parse_rational;
use luroth::{
    cdf, classify, dimensions, empirical_cdf, expand, g_term, gap, mset_approx,
    theta_identity_check, unit_grid, Classification, Digit, Error, Evidence, MsetApprox, Partition,
    SignSpec, TailCertificate,
};

mod emit;

use emit::{fmt_f64, JsonObj};

#[derive(Parser)]
#[command(
    name = "luroth",
    version,
    about = "Generalised alpha-Lüroth expansions: approximation coefficients, limit distributions and the structure of the attainable-average set"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Partition: luroth | dyadic | geometric:R | two-periodic:T2,R |
    /// inline JSON config | path to a JSON config file
    #[arg(long)]
    partition: String,
    /// Certified truncation tolerance
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Write to this file instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Inspect a partition: t_n, a_n, rho_n and tail statistics
    Partition {
        #[command(flatten)]
        common: Common,
        /// How many leading indices to tabulate
        #[arg(long, default_value_t = 10)]
        rows: u64,
        /// Report tail statistics for n > k
        #[arg(long, default_value_t = 0)]
        tail_k: u64,
        /// Sampling horizon for uncertified tails
        #[arg(long, default_value_t = 100)]
        horizon: u64,
    },
    /// Expansion trace of one point: digits, signs, orbit, convergents, theta
    Expand {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 20)]
        steps: u32,
    },
    /// Theta sequence of one point plus the identity cross-check residual
    Theta {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 50)]
        steps: u32,
    },
    /// Analytic limit CDF F_eps on a grid (optionally with the empirical CDF)
    Cdf {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        eps: String,
        /// Explicit z values; omit to use the grid
        #[arg(long = "z")]
        z_values: Vec<f64>,
        /// Interior grid size when no explicit z is given
        #[arg(long, default_value_t = 99)]
        grid: usize,
        /// Add an empirical column from one orbit of this many steps
        #[arg(long)]
        empirical: Option<u64>,
        /// Orbit start point (drawn from the seed when omitted)
        #[arg(long)]
        x0: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// g(n) and G(n) with certified enclosures and signs
    Gvalues {
        #[command(flatten)]
        common: Common,
        /// Number of levels: reports G(0..n-1)
        #[arg(short = 'n', long, default_value_t = 8)]
        levels: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Depth-k interval approximation of the attainable-average set
    Mset {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        depth: u32,
        /// Exit 3 if the structure verdict is undetermined
        #[arg(long)]
        strict: bool,
    },
    /// Structure verdict (finite union / Cantor / homogeneous Cantor) with evidence
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 8)]
        probe_depth: u64,
        #[arg(long)]
        strict: bool,
    },
    /// Dimension sequence k·log2/(log I(0) − log I(k)) for Cantor structures
    Dim {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 30)]
        kmax: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // keep clap's help/version on stdout with success, errors at 2
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(2);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn parse_partition(spec: &str) -> Result<Partition, Error> {
    let s = spec.trim();
    match s {
        "luroth" => return Ok(Partition::luroth()),
        "dyadic" => return Ok(Partition::dyadic()),
        _ => {}
    }
    if let Some(rest) = s.strip_prefix("geometric:") {
        return Partition::geometric(parse_rational(rest)?);
    }
    if let Some(rest) = s.strip_prefix("two-periodic:") {
        let (t2, ratio) = rest
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected two-periodic:T2,RATIO in `{s}`")))?;
        return Partition::two_periodic(parse_rational(t2)?, parse_rational(ratio)?);
    }
    if s.starts_with('{') {
        return Partition::from_config_str(s);
    }
    let text = std::fs::read_to_string(s)
        .map_err(|e| Error::Parse(format!("cannot read partition config `{s}`: {e}")))?;
    Partition::from_config_str(&text)
}

fn write_out(common: &Common, text: &str) -> Result<(), Error> {
    match &common.output {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Parse(format!("cannot write `{}`: {e}", path.display()))),
    }
}

fn run(cmd: Cmd) -> Result<ExitCode, Error> {
    match cmd {
        Cmd::Partition { common, rows, tail_k, horizon } => {
            let p = parse_partition(&common.partition)?;
            let st = p.tail_stats(tail_k, horizon.max(tail_k + 1));
            let mut obj = JsonObj::new();
            obj.str("generator", &p.describe());
            obj.num("precision", p.precision());
            let mut rows_json = String::new();
            for n in 1..=rows {
                if n > 1 {
                    rows_json.push(',');
                }
                let mut row = JsonObj::new();
                row.int("n", n as i64);
                row.num("t", p.t(n));
                row.num("a", p.a(n));
                row.num("rho", p.rho(n));
                rows_json.push_str(&row.finish());
            }
            obj.raw("rows", &format!("[{rows_json}]"));
            let mut tail = JsonObj::new();
            tail.int("k", st.k as i64);
            tail.num("s", st.s);
            tail.num("m", st.m);
            tail.bool("certified", st.certified);
            match &st.note {
                Some(n) => tail.str("note", n),
                None => tail.raw("note", "null"),
            };
            obj.raw("tail_stats", &tail.finish());
            write_out(&common, &(obj.finish() + "\n"))?;
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Expand { common, eps, x, steps } => {
            let p = parse_partition(&common.partition)?;
            let eps = SignSpec::parse(&eps)?;
            let trace = expand(&p, &eps, x, steps)?;
            let mut out = String::new();
            for s in &trace.steps {
                out.push_str(&step_record(s).finish());
                out.push('\n');
            }
            write_out(&common, &out)?;
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Theta { common, eps, x, steps } => {
            let p = parse_partition(&common.partition)?;
            let eps = SignSpec::parse(&eps)?;
            let trace = expand(&p, &eps, x, steps)?;
            let residual = theta_identity_check(&trace, &p);
            let mut out = String::new();
            for s in &trace.steps {
                let mut rec = JsonObj::new();
                rec.int("n", s.n as i64);
                rec.num("theta", s.theta);
                out.push_str(&rec.finish());
                out.push('\n');
            }
            let mut summary = JsonObj::new();
            summary.int("steps", trace.steps.len() as i64);
            summary.bool("terminated", trace.terminated);
            summary.num("max_identity_residual", residual);
            out.push_str(&summary.finish());
            out.push('\n');
            write_out(&common, &out)?;
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Cdf { common, eps, z_values, grid, empirical, x0, seed, format } => {
            let p = parse_partition(&common.partition)?;
            let eps = SignSpec::parse(&eps)?;
            let zs: Vec<f64> = if z_values.is_empty() { unit_grid(grid) } else { z_values };
            let analytic =
                luroth::exec::map_indexed(zs.len(), |i| cdf(&p, &eps, zs[i], common.tol));
            let emp = empirical.map(|iters| empirical_cdf(&p, &eps, x0, &zs, iters, seed));
            let mut out = String::new();
            match format {
                Format::Csv => {
                    out.push_str("z,F_analytic,radius");
                    if emp.is_some() {
                        out.push_str(",F_empirical");
                    }
                    out.push('\n');
                    for (i, z) in zs.iter().enumerate() {
                        let b = analytic[i].as_ref().map_err(clone_err)?;
                        write!(out, "{},{},{}", fmt_f64(*z), fmt_f64(b.value), fmt_f64(b.radius))
                            .unwrap();
                        if let Some(e) = &emp {
                            write!(out, ",{}", fmt_f64(e[i])).unwrap();
                        }
                        out.push('\n');
                    }
                }
                Format::Json => {
                    for (i, z) in zs.iter().enumerate() {
                        let b = analytic[i].as_ref().map_err(clone_err)?;
                        let mut rec = JsonObj::new();
                        rec.num("z", *z);
                        rec.num("F_analytic", b.value);
                        rec.num("radius", b.radius);
                        if let Some(e) = &emp {
                            rec.num("F_empirical", e[i]);
                        }
                        out.push_str(&rec.finish());
                        out.push('\n');
                    }
                }
            }
            write_out(&common, &out)?;
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Gvalues { common, levels, format } => {
            let p = parse_partition(&common.partition)?;
            let rows = luroth::exec::map_indexed(levels as usize, |i| {
                gap(&p, i as u64, common.tol).map(|g| (i as u64, g))
            });
            let mut out = String::new();
            if format == Format::Csv {
                out.push_str("n,g,G,radius,sign\n");
            }
            for row in rows {
                let (n, g) = row?;
                let g_small = if n >= 1 { Some(g_term(&p, n)) } else { None };
                match format {
                    Format::Csv => {
                        let gs = g_small.map(fmt_f64).unwrap_or_default();
                        writeln!(
                            out,
                            "{n},{gs},{},{},{}",
                            fmt_f64(g.bounded.value),
                            fmt_f64(g.bounded.radius),
                            g.sign.symbol()
                        )
                        .unwrap();
                    }
                    Format::Json => {
                        let mut rec = JsonObj::new();
                        rec.int("n", n as i64);
                        match g_small {
                            Some(v) => rec.num("g", v),
                            None => rec.raw("g", "null"),
                        };
                        rec.num("G", g.bounded.value);
                        rec.num("radius", g.bounded.radius);
                        rec.str("sign", g.sign.symbol());
                        out.push_str(&rec.finish());
                        out.push('\n');
                    }
                }
            }
            write_out(&common, &out)?;
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Mset { common, depth, strict } => {
            let p = parse_partition(&common.partition)?;
            let ap = mset_approx(&p, depth, common.tol)?;
            let undetermined = ap.verdict == luroth::Verdict::Undetermined;
            write_out(&common, &(mset_json(&ap) + "\n"))?;
            Ok(strict_code(strict, undetermined))
        }

        Cmd::Classify { common, probe_depth, strict } => {
            let p = parse_partition(&common.partition)?;
            let cls = classify(&p, probe_depth, common.tol)?;
            let undetermined = cls.verdict == luroth::Verdict::Undetermined;
            write_out(&common, &(classification_json(&cls) + "\n"))?;
            Ok(strict_code(strict, undetermined))
        }

        Cmd::Dim { common, kmax, format } => {
            let p = parse_partition(&common.partition)?;
            let rows = dimensions(&p, kmax, common.tol)?;
            let mut out = String::new();
            match format {
                Format::Csv => {
                    out.push_str("k,interval_length,dimH_approx,dimP_approx\n");
                    for r in &rows {
                        writeln!(
                            out,
                            "{},{},{},{}",
                            r.k,
                            fmt_f64(r.interval_len),
                            fmt_f64(r.dim_h),
                            fmt_f64(r.dim_p)
                        )
                        .unwrap();
                    }
                }
                Format::Json => {
                    for r in &rows {
                        let mut rec = JsonObj::new();
                        rec.int("k", r.k as i64);
                        rec.num("interval_length", r.interval_len);
                        rec.num("ratio", r.ratio);
                        rec.num("dimH_approx", r.dim_h);
                        rec.num("dimP_approx", r.dim_p);
                        out.push_str(&rec.finish());
                        out.push('\n');
                    }
                }
            }
            write_out(&common, &out)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn clone_err(e: &Error) -> Error {
    Error::Parse(e.to_string())
}

fn strict_code(strict: bool, undetermined: bool) -> ExitCode {
    if strict && undetermined {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}

fn step_record(s: &luroth::Step) -> JsonObj {
    let mut rec = JsonObj::new();
    rec.int("n", s.n as i64);
    match s.digit {
        Digit::Finite(d) => rec.int("d", d as i64),
        Digit::Infinite => rec.raw("d", "null"),
    };
    rec.int("s", s.sign as i64);
    rec.num("orbit", s.orbit);
    rec.num("q", s.q);
    rec.num("approx", s.approx);
    rec.num("theta", s.theta);
    rec
}

fn mset_json(ap: &MsetApprox) -> String {
    let mut obj = JsonObj::new();
    obj.int("depth", ap.depth as i64);
    let mut items = String::new();
    for (i, iv) in ap.intervals.iter().enumerate() {
        if i > 0 {
            items.push(',');
        }
        let mut rec = JsonObj::new();
        rec.str("word", &iv.word.to_string());
        rec.num("lo", iv.lo.value.value);
        rec.num("hi", iv.hi.value.value);
        rec.num("radius", iv.lo.value.radius.max(iv.hi.value.radius));
        items.push_str(&rec.finish());
    }
    obj.raw("intervals", &format!("[{items}]"));
    let mut merged = String::new();
    for (i, m) in ap.merged.iter().enumerate() {
        if i > 0 {
            merged.push(',');
        }
        let mut rec = JsonObj::new();
        rec.num("lo", m.lo.value.value);
        rec.num("hi", m.hi.value.value);
        rec.int("members", m.members as i64);
        merged.push_str(&rec.finish());
    }
    obj.raw("merged", &format!("[{merged}]"));
    let mut amb = String::new();
    for (i, (a, b)) in ap.ambiguous.iter().enumerate() {
        if i > 0 {
            amb.push(',');
        }
        write!(amb, "[\"{a}\",\"{b}\"]").unwrap();
    }
    obj.raw("ambiguous", &format!("[{amb}]"));
    obj.str("verdict", &ap.verdict.to_string());
    obj.raw("evidence", &evidence_json(&ap.evidence));
    obj.finish()
}

fn classification_json(cls: &Classification) -> String {
    let mut obj = JsonObj::new();
    obj.str("verdict", &cls.verdict.to_string());
    obj.raw("evidence", &evidence_json(&cls.evidence));
    obj.finish()
}

fn evidence_json(ev: &Evidence) -> String {
    let mut obj = JsonObj::new();
    let mut gaps = String::new();
    for (i, g) in ev.gap_values.iter().enumerate() {
        if i > 0 {
            gaps.push(',');
        }
        let mut rec = JsonObj::new();
        rec.int("n", g.n as i64);
        rec.num("G", g.bounded.value);
        rec.num("radius", g.bounded.radius);
        rec.str("sign", g.sign.symbol());
        gaps.push_str(&rec.finish());
    }
    obj.raw("gap_signs", &format!("[{gaps}]"));
    let mut tail = JsonObj::new();
    match &ev.tail {
        TailCertificate::NonpositiveFrom { from, reason } => {
            tail.str("kind", "nonpositive-from");
            tail.int("from", *from as i64);
            tail.str("reason", reason);
        }
        TailCertificate::PositiveFrom { from, reason } => {
            tail.str("kind", "positive-from");
            tail.int("from", *from as i64);
            tail.str("reason", reason);
        }
        TailCertificate::MixedPeriodic { period, reason } => {
            tail.str("kind", "mixed-periodic");
            tail.int("period", *period as i64);
            tail.str("reason", reason);
        }
        TailCertificate::Unknown => {
            tail.str("kind", "unknown");
        }
    }
    obj.raw("tail", &tail.finish());
    let mut conds = String::new();
    for (i, c) in ev.conditions.iter().enumerate() {
        if i > 0 {
            conds.push(',');
        }
        let mut rec = JsonObj::new();
        rec.str("name", c.name);
        match c.holds {
            Some(h) => rec.bool("holds", h),
            None => rec.raw("holds", "null"),
        };
        rec.bool("certified", c.certified);
        rec.str("detail", &c.detail);
        conds.push_str(&rec.finish());
    }
    obj.raw("conditions", &format!("[{conds}]"));
    let mut gr = JsonObj::new();
    match ev.golden_ratio.holds_from {
        Some(n) => gr.int("holds_from", n as i64),
        None => gr.raw("holds_from", "null"),
    };
    gr.int("checked_to", ev.golden_ratio.checked_to as i64);
    obj.raw("golden_ratio", &gr.finish());
    obj.finish()
}
