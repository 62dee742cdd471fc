//! Sturm bounds, congruence claims on arithmetic progressions, and a scanner
//! for simple congruences `c(ℓn + β) ≡ 0 (mod ℓ)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::frobenius::{cphi_series, SeriesSpec};
use crate::qseries::QSeries;

/// Exclusive Sturm threshold for `M_k(Γ_1(N))`: the ceiling of
/// `(k/12) N² Π_{p | N} (1 - 1/p²)`. If every coefficient up to and including
/// this index vanishes mod `m`, the form vanishes mod `m`.
pub fn sturm_bound(weight: u32, level: u64) -> BigInt {
    let mut value = BigRational::new(BigInt::from(weight) * BigInt::from(level).pow(2), BigInt::from(12));
    for p in arith::prime_divisors(level) {
        let p2 = BigInt::from(p * p);
        value *= BigRational::new(&p2 - 1, p2);
    }
    value.ceil().to_integer()
}

/// Sturm bound from a weight given in half-units; half-integral weights are rejected.
pub fn sturm_bound_halves(weight_halves: i64, level: u64) -> Result<BigInt> {
    if weight_halves <= 0 || weight_halves % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "Sturm bound needs a positive integral weight, got {weight_halves}/2"
        )));
    }
    Ok(sturm_bound((weight_halves / 2) as u32, level))
}

/// Level `N t² / gcd(r, t)` of the `r (mod t)` part of a form of level `N`.
pub fn progression_level(level: u64, r: u64, t: u64) -> u64 {
    assert!(t >= 1 && r < t, "progression needs 0 <= r < t");
    level * t * t / r.gcd(&t)
}

/// `c(A·n + B) ≡ 0 (mod M)` for all `n >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CongruenceClaim {
    pub spec: SeriesSpec,
    pub a: u64,
    pub b: u64,
    pub m: u64,
}

impl CongruenceClaim {
    pub fn new(spec: SeriesSpec, a: u64, b: u64, m: u64) -> Result<Self> {
        if a == 0 {
            return Err(Error::InvalidArgument("claim needs A >= 1".into()));
        }
        if m < 2 {
            return Err(Error::InvalidArgument("claim needs M >= 2".into()));
        }
        Ok(Self { spec, a, b, m })
    }

    pub fn index(&self, n: u64) -> i64 {
        (self.a * n + self.b) as i64
    }

    /// Truncation needed to check `n = 0..=n_max`.
    pub fn required_trunc(&self, n_max: u64) -> i64 {
        self.index(n_max) + 1
    }
}

impl fmt::Display for CongruenceClaim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};A={};B={};M={}", self.spec, self.a, self.b, self.m)
    }
}

impl FromStr for CongruenceClaim {
    type Err = Error;

    /// `<spec>;A=<int>;B=<int>;M=<int>`
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(';');
        let spec: SeriesSpec = parts
            .next()
            .ok_or_else(|| Error::Parse("empty claim".into()))?
            .parse()?;
        let (mut a, mut b, mut m) = (None, None, None);
        for part in parts {
            let (key, value) = part
                .trim()
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("claim field {part:?} is not KEY=value")))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("claim field {part:?} needs a nonnegative integer")))?;
            match key.trim() {
                "A" => a = Some(value),
                "B" => b = Some(value),
                "M" => m = Some(value),
                other => return Err(Error::Parse(format!("unknown claim field {other:?}"))),
            }
        }
        match (a, b, m) {
            (Some(a), Some(b), Some(m)) => Self::new(spec, a, b, m),
            _ => Err(Error::Parse(format!("claim {s:?} needs A, B and M"))),
        }
    }
}

/// Caller-asserted membership of the series in `M_weight(Γ_1(level))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FormCertificate {
    pub weight: u32,
    pub level: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerificationStatus {
    HoldsUpToBound,
    Counterexample { n: u64, index: i64, value: String },
    /// Checked past the Sturm bound of the sieved form.
    Certified { sturm_bound: String, sieved_level: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub claim: String,
    pub n_checked: u64,
    pub status: VerificationStatus,
}

impl VerificationReport {
    pub fn holds(&self) -> bool {
        !matches!(self.status, VerificationStatus::Counterexample { .. })
    }
}

/// Checks a claim against an already expanded series.
pub fn verify_claim_on(
    series: &QSeries,
    claim: &CongruenceClaim,
    n_max: u64,
    certificate: Option<FormCertificate>,
) -> Result<VerificationReport> {
    let required = claim.required_trunc(n_max);
    if series.trunc() < required {
        return Err(Error::WindowUnderflow {
            required,
            available: series.trunc(),
        });
    }
    let modulus = BigInt::from(claim.m);
    let failure = (0..=n_max).into_par_iter().find_first(|&n| {
        let c = series.coeff(claim.index(n)).expect("window checked");
        !c.mod_floor(&modulus).is_zero()
    });
    let status = match failure {
        Some(n) => VerificationStatus::Counterexample {
            n,
            index: claim.index(n),
            value: series.coeff(claim.index(n)).expect("window checked").to_string(),
        },
        None => match certificate {
            Some(cert) if claim.b < claim.a => {
                let sieved_level = progression_level(cert.level, claim.b, claim.a);
                let bound = sturm_bound(cert.weight, sieved_level);
                if BigInt::from(claim.index(n_max)) >= bound {
                    VerificationStatus::Certified {
                        sturm_bound: bound.to_string(),
                        sieved_level,
                    }
                } else {
                    VerificationStatus::HoldsUpToBound
                }
            }
            _ => VerificationStatus::HoldsUpToBound,
        },
    };
    Ok(VerificationReport {
        claim: claim.to_string(),
        n_checked: n_max + 1,
        status,
    })
}

/// Expands the claim's series and checks `n = 0..=n_max`.
pub fn verify_claim(
    claim: &CongruenceClaim,
    n_max: u64,
    certificate: Option<FormCertificate>,
) -> Result<VerificationReport> {
    let series = claim.spec.expand(claim.required_trunc(n_max))?;
    verify_claim_on(&series, claim, n_max, certificate)
}

/// Every `(ℓ, β)` with `ℓ <= ell_max` prime and `0 <= β < ℓ` such that
/// `c(ℓn + β) ≡ 0 (mod ℓ)` at every index `ℓn + β <= n_max`. Empirical only.
pub fn scan_ramanujan_on(series: &QSeries, ell_max: u64, n_max: u64) -> Result<Vec<(u64, u64)>> {
    let last = n_max as i64;
    if series.trunc() <= last {
        return Err(Error::WindowUnderflow {
            required: last + 1,
            available: series.trunc(),
        });
    }
    let mut out = Vec::new();
    for ell in arith::primes_up_to(ell_max) {
        let modulus = BigInt::from(ell);
        for beta in 0..ell {
            let survives = (beta..=n_max)
                .step_by(ell as usize)
                .all(|i| series.coeff(i as i64).expect("window checked").mod_floor(&modulus).is_zero());
            if survives {
                out.push((ell, beta));
            }
        }
    }
    Ok(out)
}

pub fn scan_ramanujan(spec: SeriesSpec, ell_max: u64, n_max: u64) -> Result<Vec<(u64, u64)>> {
    scan_ramanujan_on(&spec.expand(n_max as i64 + 1)?, ell_max, n_max)
}

/// Instance of `cφ_k((P³ ℓ^m n + k)/24) ≡ 0 (mod ℓ^j)` for `n` coprime to `Pℓ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TreneerClaim {
    pub k: u32,
    pub prime: u64,
    pub ell: u64,
    pub m: u32,
    pub j: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreneerReport {
    pub claim: TreneerClaim,
    /// `P` is prime and `P ≡ -1 (mod 576 k ℓ^j)`.
    pub prime_condition: bool,
    /// `ℓ` is prime and coprime to `6k`.
    pub ell_condition: bool,
    /// Values of `n` that were actually tested.
    pub tested: Vec<u64>,
    pub counterexample: Option<(u64, String)>,
}

/// Largest `cφ_k` index the Treneer verifier will expand to.
pub const TRENEER_INDEX_LIMIT: u64 = 200_000;

/// Tests every admissible `n <= n_max`, skipping those where the argument is
/// not an integer or `n` shares a factor with `Pℓ`.
pub fn verify_treneer(claim: TreneerClaim, n_max: u64) -> Result<TreneerReport> {
    let TreneerClaim { k, prime, ell, m, j } = claim;
    let ell_j = BigInt::from(ell).pow(j);
    let step = BigInt::from(prime).pow(3) * BigInt::from(ell).pow(m);
    let modulus_576 = BigInt::from(576u64 * k as u64) * &ell_j;
    let prime_condition =
        arith::is_prime(prime) && (BigInt::from(prime) + 1u32).mod_floor(&modulus_576).is_zero();
    let ell_condition = arith::is_prime(ell) && (6 * k as u64).gcd(&ell) == 1;

    let mut indices = Vec::new();
    for n in 1..=n_max {
        if n.gcd(&(prime * ell)) != 1 {
            continue;
        }
        let numerator = &step * n + k;
        let (index, rem) = numerator.div_rem(&BigInt::from(24));
        if !rem.is_zero() {
            continue;
        }
        let index = index
            .to_u64()
            .filter(|&i| i <= TRENEER_INDEX_LIMIT)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "index {index} exceeds the expansion limit {TRENEER_INDEX_LIMIT}"
                ))
            })?;
        indices.push((n, index));
    }
    let top = indices.iter().map(|&(_, i)| i).max().unwrap_or(0);
    let series = cphi_series(k, top as i64 + 1)?;
    let counterexample = indices.iter().find_map(|&(n, i)| {
        let c = series.coeff(i as i64).expect("expanded far enough");
        (!c.mod_floor(&ell_j).is_zero()).then(|| (n, c.to_string()))
    });
    Ok(TreneerReport {
        claim,
        prime_condition,
        ell_condition,
        tested: indices.into_iter().map(|(n, _)| n).collect(),
        counterexample,
    })
}
