//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use frobcong::congruence::{scan_ramanujan, sturm_bound, verify_claim_on, CongruenceClaim};
use frobcong::etatheta::{
    automorphy_spot_check, eta_quotient_series, theta_series, theta_series_naive, EtaQuotient,
    Gamma0Element, Prefactor,
};
use frobcong::frobenius::{
    cphi2_product_series, cphi_series, cphibar2_quarter_series, partition_series, sellers_series,
    treneer_f_series, SeriesSpec,
};
use frobcong::parity::{
    bound_cphibar, check_mod2_factorization, cphibar_pipeline_input, parity_search, spread,
    ParityParams,
};
use frobcong::QSeries;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const AUTOMORPHY_TOLERANCE: f64 = 1e-8;
const ROUTE_BUDGET: Duration = Duration::from_secs(10);
const EXPANSION_BUDGET: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: frobcong::Error) -> String {
    e.to_string()
}

fn route_agreement() -> Outcome {
    let start = Instant::now();
    let theta_route = cphi_series(2, 2000).map_err(err)?;
    let product_route = cphi2_product_series(2000);
    if let Some(n) = theta_route.first_mismatch(&product_route) {
        return Err(format!("cphi routes differ at q^{n}"));
    }
    ensure(theta_route.trunc() == 2000 && product_route.trunc() == 2000, "short window")?;
    let quarter = cphibar2_quarter_series(2000).map_err(err)?;
    let sellers = sellers_series(2000);
    ensure(sellers == quarter.scale(&BigInt::from(4)), "sellers != 4 * quarter")?;
    let elapsed = start.elapsed();
    ensure(elapsed < ROUTE_BUDGET, format!("took {elapsed:?}"))?;
    Ok(format!("2000 terms, {elapsed:.2?}"))
}

fn mod4_identity() -> Outcome {
    let cphi2 = cphi_series(2, 5000).map_err(err)?;
    let p = partition_series(2500);
    let four = BigInt::from(4);
    for n in 0..5000i64 {
        let half = if n % 2 == 0 { p.coeff(n / 2).unwrap().clone() } else { BigInt::zero() };
        let diff = cphi2.coeff(n).unwrap() - half;
        ensure(diff.mod_floor(&four).is_zero(), format!("fails at n = {n}"))?;
    }
    Ok("n < 5000".into())
}

fn holds(series: &QSeries, spec: SeriesSpec, a: u64, b: u64, m: u64, n_max: u64) -> Result<(), String> {
    let claim = CongruenceClaim::new(spec, a, b, m).map_err(err)?;
    let report = verify_claim_on(series, &claim, n_max, None).map_err(err)?;
    ensure(report.holds(), format!("{claim}: {:?}", report.status))
}

fn congruence_regression() -> Outcome {
    let p = partition_series(11 * 2000 + 7);
    for (ell, beta) in [(5, 4), (7, 5), (11, 6)] {
        holds(&p, SeriesSpec::Partition, ell, beta, ell, 1999)?;
    }
    let c2 = cphi_series(2, 5 * 2000 + 4).map_err(err)?;
    holds(&c2, SeriesSpec::Cphi(2), 2, 1, 2, 1999)?;
    holds(&c2, SeriesSpec::Cphi(2), 5, 3, 5, 1999)?;
    for k in [2u32, 3, 5, 7] {
        let series = cphi_series(k, 1000).map_err(err)?;
        let k2 = BigInt::from(k * k);
        for n in (0..1000i64).filter(|n| n % k as i64 != 0) {
            let c = series.coeff(n).unwrap();
            ensure(c.mod_floor(&k2).is_zero(), format!("cphi_{k}({n}) = {c} not 0 mod {k2}"))?;
        }
    }
    let quarter = cphibar2_quarter_series(5000).map_err(err)?;
    for n in 0..2500i64 {
        ensure(quarter.coeff(2 * n).unwrap().is_even(), format!("cphibar_2({}) not 0 mod 8", 2 * n))?;
    }
    Ok("12 families".into())
}

fn eta_identity() -> Outcome {
    let eq: EtaQuotient = "192^2,12^-2,96^-1".parse().map_err(err)?;
    let eta_side = eta_quotient_series(&eq, 6001, Prefactor::Include).map_err(err)?;
    let quarter = cphibar2_quarter_series(502).map_err(err)?;
    let spread_side = spread(&quarter, 12, -1).truncate(6001);
    ensure(eta_side.trunc() == 6001 && spread_side.trunc() == 6001, "short window")?;
    if let Some(n) = eta_side.first_mismatch(&spread_side) {
        return Err(format!("eta-quotient differs at q^{n}"));
    }
    let companion: EtaQuotient = "1^2,2^-1".parse().map_err(err)?;
    let c = eta_quotient_series(&companion, 5001, Prefactor::Include)
        .map_err(err)?
        .reduce_mod_u64(2)
        .map_err(err)?;
    let one = QSeries::one(5001).reduce_mod_u64(2).map_err(err)?;
    if let Some(n) = c.first_mismatch(&one) {
        return Err(format!("eta(z)^2/eta(2z) not 1 mod 2 at q^{n}"));
    }
    Ok("through q^6000 and q^5000".into())
}

fn theta_oracle() -> Outcome {
    for k in 2..=5 {
        let dp = theta_series(k, 200).map_err(err)?;
        let naive = theta_series_naive(k, 200).map_err(err)?;
        if let Some(n) = dp.first_mismatch(&naive) {
            return Err(format!("k = {k} differs at q^{n}"));
        }
    }
    let head: Vec<BigInt> = theta_series(3, 5).map_err(err)?.into_coeffs();
    let expected: Vec<BigInt> = [1, 6, 0, 6, 6].into_iter().map(BigInt::from).collect();
    ensure(head == expected, format!("k = 3 head {head:?}"))?;
    Ok("k <= 5, T = 200".into())
}

fn factorization() -> Outcome {
    let input = cphibar_pipeline_input(3000).map_err(err)?;
    for t in 1..=4 {
        let params = ParityParams::cphibar(0, t).map_err(err)?;
        let check = check_mod2_factorization(&input, &params, 3000).map_err(err)?;
        ensure(check.passed, format!("t = {t}: {check:?}"))?;
    }
    Ok("t in 1..=4, T = 3000".into())
}

fn treneer_index() -> Outcome {
    let f = treneer_f_series(2, 24 * 100).map_err(err)?;
    let c2 = cphi_series(2, 101).map_err(err)?;
    for e in f.offset()..f.trunc() {
        let value = f.coeff(e).unwrap();
        if (e + 2) % 24 == 0 {
            let m = (e + 2) / 24;
            ensure(value == c2.coeff(m).unwrap(), format!("index {e} vs cphi_2({m})"))?;
        } else {
            ensure(value.is_zero(), format!("nonzero at unsupported index {e}"))?;
        }
    }
    Ok("m <= 100".into())
}

fn bounds() -> Outcome {
    ensure(sturm_bound(12, 576) == BigInt::from(221184), "sturm_bound(12, 576)")?;
    let expected = (BigInt::one() << 19) * BigInt::from(3).pow(12) - 1;
    ensure(bound_cphibar(1, 3).map_err(err)?.value == expected, "bound_cphibar(1, 3)")?;
    let even = parity_search(0, 2, 5000).map_err(err)?;
    ensure(even.smallest_odd.is_none(), format!("odd value at {:?}", even.smallest_odd))?;
    let odd = parity_search(1, 2, 100).map_err(err)?;
    ensure(odd.smallest_odd == Some(1), format!("smallest odd {:?}", odd.smallest_odd))?;
    for t in 2..=6 {
        for r in 0..t {
            let report = parity_search(r, t, 600).map_err(err)?;
            if let Some(m) = report.smallest_odd {
                ensure(BigInt::from(m) < report.bound, format!("r = {r}, t = {t}"))?;
            }
        }
    }
    Ok("exact".into())
}

fn scanner() -> Outcome {
    let found = scan_ramanujan(SeriesSpec::Partition, 11, 500).map_err(err)?;
    ensure(found == [(5, 4), (7, 5), (11, 6)], format!("{found:?}"))?;
    Ok(format!("{found:?}"))
}

fn automorphy() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    let mut elements = Vec::new();
    while elements.len() < 3 {
        let c = 3 * rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let d: i64 = rng.gen_range(-7..=7);
        if d != 0 && c.gcd(&d) == 1 {
            elements.push(Gamma0Element::from_bottom_row(c, d).map_err(err)?);
        }
    }
    let points: Vec<Complex64> = (0..3)
        .map(|_| Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.4..1.2)))
        .collect();
    let mut worst = 0.0f64;
    for g in &elements {
        for &z in &points {
            let check = automorphy_spot_check(3, *g, z, AUTOMORPHY_TOLERANCE).map_err(err)?;
            ensure(check.passed, format!("{g:?} at {z}: residual {:e}", check.residual))?;
            worst = worst.max(check.residual);
        }
    }
    Ok(format!("worst residual {worst:.1e}"))
}

fn performance() -> Outcome {
    let start = Instant::now();
    let reference = cphi_series(2, 10_000).map_err(err)?;
    let elapsed = start.elapsed();
    ensure(elapsed < EXPANSION_BUDGET, format!("took {elapsed:?}"))?;
    for threads in [1, 4] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?;
        let again = pool.install(|| cphi_series(2, 10_000)).map_err(err)?;
        ensure(again == reference, format!("differs with {threads} threads"))?;
    }
    Ok(format!("10^4 terms in {elapsed:.2?}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("route agreement", route_agreement),
        ("mod 4 identity", mod4_identity),
        ("congruence regression", congruence_regression),
        ("eta-quotient identity", eta_identity),
        ("theta oracle", theta_oracle),
        ("mod 2 factorization", factorization),
        ("Treneer index identity", treneer_index),
        ("bounds", bounds),
        ("scanner", scanner),
        ("numeric automorphy", automorphy),
        ("performance", performance),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({elapsed:.2?})", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({elapsed:.2?})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
