//! Command-line front end for `frobcong`.
//!
//! Exit status: 0 on success, 1 when a claim or check fails, 2 on usage or
//! computation errors.

pub mod cache;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use frobcong::congruence::{
    progression_level, scan_ramanujan_on, sturm_bound, verify_claim_on, CongruenceClaim, FormCertificate,
    VerificationStatus,
};
use frobcong::etatheta::{eta_quotient_meta, eta_quotient_series, theta_meta, theta_series, EtaQuotient, Prefactor};
use frobcong::frobenius::SeriesSpec;
use frobcong::parity::{
    bound_cphibar, bound_general, check_mod2_factorization, cphibar_pipeline_input, min_j_cphibar, parity_search,
    ParityParams,
};
use frobcong::QSeries;
use serde_json::json;

use cache::Cache;

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "FROBCONG_CACHE";

#[derive(Parser, Debug)]
#[command(name = "frobcong", version, about = "Exact q-series, congruence and parity checks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Number of coefficients to expand.
    #[arg(long, default_value_t = 20, global = true)]
    terms: u64,
    /// Reduce coefficients modulo m.
    #[arg(long = "mod", global = true, value_parser = clap::value_parser!(u64).range(2..))]
    modulus: Option<u64>,
    /// Cache directory for expansions.
    #[arg(long, global = true, env = CACHE_ENV)]
    cache: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    /// The `#qseries` file format, readable by `verify --from`.
    Qseries,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expand a series: partition, cphi:K, cphi2prod, cphibar2q, sellers, treneerf:K.
    Expand { spec: SeriesSpec },
    /// Check a claim "<spec>;A=..;B=..;M=.." for n = 0..=limit.
    Verify {
        claim: CongruenceClaim,
        #[arg(long, default_value_t = 1000)]
        limit: u64,
        /// Weight of a modular form carrying the series, for Sturm certification.
        #[arg(long, requires = "level")]
        weight: Option<u32>,
        #[arg(long, requires = "weight")]
        level: Option<u64>,
        /// Read the series from a `#qseries` file instead of expanding it.
        #[arg(long)]
        from: Option<PathBuf>,
    },
    /// List simple congruences c(ℓn+β) ≡ 0 (mod ℓ) holding at every index up to the limit.
    Scan {
        spec: SeriesSpec,
        #[arg(long, default_value_t = 11)]
        ell_max: u64,
        #[arg(long, default_value_t = 1000)]
        limit: u64,
    },
    /// Sturm bound for weight k and level N, optionally for the r (mod t) part.
    Sturm {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        level: u64,
        #[arg(long, requires = "t")]
        r: Option<u64>,
        #[arg(long, requires = "r")]
        t: Option<u64>,
    },
    /// Theta series of Σ m_i² + Σ_{i<j} m_i m_j in k-1 variables.
    Theta {
        k: u32,
        /// Print weight, level and character instead of coefficients.
        #[arg(long)]
        meta: bool,
    },
    /// Weight, level, character and cusp orders of an eta-quotient such as "192^2,12^-2,96^-1".
    Eta {
        quotient: EtaQuotient,
        /// Print the expansion instead of the metadata.
        #[arg(long)]
        series: bool,
    },
    /// Parities of cφ̄₂(M)/4 along M ≡ r (mod t).
    Parity {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        t: u64,
        #[arg(long, default_value_t = 1000)]
        limit: u64,
    },
    /// Bound on the smallest odd index; pass --alpha for the general form.
    Bound {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        t: u64,
        #[command(flatten)]
        general: GeneralBound,
    },
    /// Mod 2 factorization check of Δ^{2^j}(12tz)·Σ (cφ̄₂(n)/4) q^{12n-1}.
    Factorcheck {
        #[arg(long)]
        t: u64,
        /// Exponent bound; defaults to --terms.
        #[arg(long)]
        trunc: Option<i64>,
    },
}

#[derive(Args, Debug)]
struct GeneralBound {
    #[arg(long)]
    alpha: Option<u64>,
    #[arg(long, requires = "alpha", allow_hyphen_values = true, default_value_t = 0)]
    beta: i64,
    #[arg(long, requires = "alpha", default_value_t = 1)]
    n0: u64,
    #[arg(long, requires = "alpha", allow_hyphen_values = true, default_value_t = 0)]
    k: i64,
    #[arg(long, requires = "alpha", default_value_t = 0)]
    j: u32,
    /// Level override in place of lcm(αt, N₀).
    #[arg(long, requires = "alpha")]
    level: Option<u64>,
}

struct Ctx<'a> {
    global: &'a Global,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn series(&mut self, spec: SeriesSpec, trunc: i64) -> Result<QSeries> {
        let modulus = self.global.modulus;
        match &self.global.cache {
            Some(dir) => {
                let cache = Cache::new(dir)?;
                let err = &mut *self.err;
                cache.get(spec, modulus, trunc, &mut |w| {
                    let _ = writeln!(err, "{w}");
                })
            }
            None => {
                let s = spec.expand(trunc)?;
                Ok(match modulus {
                    Some(m) => s.reduce_mod_u64(m)?,
                    None => s,
                })
            }
        }
    }

    fn reduce(&self, series: QSeries) -> Result<QSeries> {
        Ok(match self.global.modulus {
            Some(m) => series.reduce_mod_u64(m)?,
            None => series,
        })
    }

    fn window(&self, offset: i64) -> i64 {
        offset + self.global.terms as i64
    }

    fn print_series(&mut self, label: &str, series: &QSeries) -> Result<()> {
        match self.global.format {
            Format::Text => {
                let coeffs: Vec<String> = series.coeffs().iter().map(ToString::to_string).collect();
                if series.offset() == 0 {
                    writeln!(self.out, "{}", coeffs.join(" "))?;
                } else {
                    writeln!(self.out, "q^{}: {}", series.offset(), coeffs.join(" "))?;
                }
            }
            Format::Json => {
                let value = json!({
                    "spec": label,
                    "offset": series.offset(),
                    "trunc": series.trunc(),
                    "modulus": series.modulus().map(ToString::to_string),
                    "coeffs": series.coeffs().iter().map(ToString::to_string).collect::<Vec<_>>(),
                });
                writeln!(self.out, "{value}")?;
            }
            Format::Qseries => {
                write!(self.out, "{}\n#spec={label}\n{}", series.header_line(), series.body_text())?;
            }
        }
        Ok(())
    }

    fn print_json_or(&mut self, value: serde_json::Value, text: impl FnOnce() -> String) -> Result<()> {
        match self.global.format {
            Format::Json => writeln!(self.out, "{value}")?,
            _ => writeln!(self.out, "{}", text())?,
        }
        Ok(())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let mut ctx = Ctx {
        global: &cli.global,
        out,
        err,
    };
    match dispatch(&cli.command, &mut ctx) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(ctx.err, "error: {e:#}");
            2
        }
    }
}

/// `Ok(false)` signals a failed claim or check.
fn dispatch(command: &Command, ctx: &mut Ctx) -> Result<bool> {
    match command {
        Command::Expand { spec } => {
            let series = ctx.series(*spec, ctx.window(spec.offset()))?;
            ctx.print_series(&spec.to_string(), &series)?;
            Ok(true)
        }
        Command::Verify {
            claim,
            limit,
            weight,
            level,
            from,
        } => verify(ctx, claim, *limit, weight.zip(*level), from.as_ref()),
        Command::Scan { spec, ell_max, limit } => {
            if ctx.global.modulus.is_some() {
                bail!("scan works on exact coefficients; drop --mod");
            }
            let series = ctx.series(*spec, *limit as i64 + 1)?;
            let found = scan_ramanujan_on(&series, *ell_max, *limit)?;
            let value = json!({
                "spec": spec.to_string(),
                "ell_max": ell_max,
                "limit": limit,
                "congruences": found.iter().map(|(l, b)| json!({"ell": l, "beta": b})).collect::<Vec<_>>(),
            });
            ctx.print_json_or(value, || {
                found
                    .iter()
                    .map(|(l, b)| format!("c({l}n+{b}) = 0 mod {l}"))
                    .collect::<Vec<_>>()
                    .join("\n")
            })?;
            Ok(true)
        }
        Command::Sturm { weight, level, r, t } => {
            let sieved = match r.zip(*t) {
                Some((r, t)) => {
                    if t == 0 || r >= t {
                        bail!("progression needs 0 <= r < t");
                    }
                    progression_level(*level, r, t)
                }
                None => *level,
            };
            let bound = sturm_bound(*weight, sieved);
            ctx.print_json_or(
                json!({"weight": weight, "level": sieved, "sturm_bound": bound.to_string()}),
                || bound.to_string(),
            )?;
            Ok(true)
        }
        Command::Theta { k, meta } => {
            if *meta {
                let m = theta_meta(*k)?;
                ctx.print_json_or(serde_json::to_value(m)?, || {
                    format!(
                        "weight {} level {} character ({}/.) {}",
                        m.weight_string(),
                        m.level,
                        m.character_disc,
                        holomorphy_word(&m.holomorphy)
                    )
                })?;
            } else {
                let series = ctx.reduce(theta_series(*k, ctx.window(0))?)?;
                ctx.print_series(&format!("theta:{k}"), &series)?;
            }
            Ok(true)
        }
        Command::Eta { quotient, series } => {
            if *series {
                let offset = quotient.offset_numerator();
                if offset % 24 != 0 {
                    bail!("{quotient} has fractional leading exponent {offset}/24");
                }
                let s = eta_quotient_series(quotient, ctx.window(offset / 24), Prefactor::Include)?;
                let s = ctx.reduce(s)?;
                ctx.print_series(&quotient.to_string(), &s)?;
            } else {
                let meta = eta_quotient_meta(quotient)?;
                ctx.print_json_or(serde_json::to_value(&meta)?, || {
                    let mut lines = vec![format!(
                        "weight {} level {} character ({}/.) {}",
                        meta.form.weight_string(),
                        meta.form.level,
                        meta.form.character_disc,
                        holomorphy_word(&meta.form.holomorphy)
                    )];
                    for c in &meta.cusp_orders {
                        lines.push(format!(
                            "cusps 1/{} ({}): order {}",
                            c.denominator, c.cusp_count, c.order
                        ));
                    }
                    lines.join("\n")
                })?;
            }
            Ok(true)
        }
        Command::Parity { r, t, limit } => {
            let report = parity_search(*r, *t, *limit)?;
            match ctx.global.format {
                Format::Json => writeln!(ctx.out, "{}", report.to_json())?,
                _ => {
                    writeln!(ctx.out, "r={} t={} limit={}", report.r, report.t, report.limit)?;
                    writeln!(ctx.out, "even {} odd {}", report.even_count, report.odd.len())?;
                    match report.smallest_odd {
                        Some(m) => writeln!(ctx.out, "smallest odd M = {m}")?,
                        None => writeln!(ctx.out, "no odd value found")?,
                    }
                    writeln!(ctx.out, "bound C = {}", report.bound)?;
                    let verdict = if report.smallest_odd.is_some() {
                        "conclusive: an odd value exists"
                    } else if report.conclusive {
                        "conclusive: the scan reached the bound, all values are even"
                    } else {
                        "inconclusive: the limit is below the bound"
                    };
                    writeln!(ctx.out, "{verdict}")?;
                }
            }
            Ok(true)
        }
        Command::Bound { r, t, general } => {
            let bound = match general.alpha {
                None => bound_cphibar(*r, *t)?,
                Some(alpha) => bound_general(&ParityParams {
                    alpha,
                    beta: general.beta,
                    t: *t,
                    r: *r,
                    n0: general.n0,
                    weight_k: general.k,
                    j: general.j,
                    level: general.level,
                })?,
            };
            ctx.print_json_or(serde_json::to_value(&bound)?, || {
                if bound.rounded_up {
                    format!("{} (rounded up)", bound.value)
                } else {
                    bound.value.to_string()
                }
            })?;
            Ok(true)
        }
        Command::Factorcheck { t, trunc } => {
            let trunc = trunc.unwrap_or(ctx.global.terms as i64);
            let params = ParityParams::cphibar(0, *t)?;
            let input = cphibar_pipeline_input(trunc)?;
            let check = check_mod2_factorization(&input, &params, trunc)?;
            let value = json!({
                "t": t,
                "j": min_j_cphibar(*t),
                "passed": check.passed,
                "first_mismatch": check.first_mismatch,
                "checked_below": check.checked_below,
            });
            ctx.print_json_or(value, || match check.first_mismatch {
                None => format!("pass: factorization holds below q^{}", check.checked_below),
                Some(n) => format!("fail: first mismatch at q^{n}"),
            })?;
            Ok(check.passed)
        }
    }
}

fn holomorphy_word(h: &frobcong::etatheta::Holomorphy) -> &'static str {
    use frobcong::etatheta::Holomorphy;
    match h {
        Holomorphy::Cusp => "cusp form",
        Holomorphy::Holomorphic => "holomorphic",
        Holomorphy::Weakly => "weakly holomorphic",
    }
}

fn verify(
    ctx: &mut Ctx,
    claim: &CongruenceClaim,
    limit: u64,
    certificate: Option<(u32, u64)>,
    from: Option<&PathBuf>,
) -> Result<bool> {
    let required = claim.required_trunc(limit);
    let series = match from {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            QSeries::from_text(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => {
            if ctx.global.modulus.is_some() {
                bail!("verify reduces by the claim's modulus; drop --mod");
            }
            ctx.series(claim.spec, required)?
        }
    };
    let certificate = certificate.map(|(weight, level)| FormCertificate { weight, level });
    let report = verify_claim_on(&series, claim, limit, certificate)?;
    let holds = report.holds();
    ctx.print_json_or(serde_json::to_value(&report)?, || match &report.status {
        VerificationStatus::HoldsUpToBound => format!("{} holds for n = 0..={limit}", report.claim),
        VerificationStatus::Counterexample { n, index, value } => {
            format!("{} fails at n = {n}: c({index}) = {value}", report.claim)
        }
        VerificationStatus::Certified {
            sturm_bound,
            sieved_level,
        } => format!(
            "{} holds for n = 0..={limit}, past the Sturm bound {sturm_bound} at level {sieved_level}",
            report.claim
        ),
    })?;
    Ok(holds)
}
