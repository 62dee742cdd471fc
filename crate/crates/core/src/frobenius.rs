//! Counting functions: `p(n)`, `cφ_k(n)`, `cφ̄₂(n)` and their generating functions.
//!
//! Each quantity is available by at least two independent routes so the
//! routes can be checked against one another:
//!
//! * `cφ_2`: theta series over `Π(1-qⁿ)²` versus the explicit product
//!   `Π (1-q^{4n-2}) / ((1-q^{2n-1})⁴ (1-q^{4n}))`.
//! * `cφ̄₂`: `(cφ_2(n) - p(n/2))` versus Sellers' product
//!   `4q Π (1-q^{16n})² / ((1-qⁿ)² (1-q^{8n}))`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::etatheta::{euler_product, eta_quotient_series, theta_series, EtaQuotient, Prefactor};
use crate::qseries::QSeries;

/// Names one of the generating functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeriesSpec {
    Partition,
    Cphi(u32),
    Cphi2Product,
    Cphibar2Quarter,
    Sellers,
    TreneerF(u32),
}

impl SeriesSpec {
    /// Lowest exponent of the expansion.
    pub fn offset(&self) -> i64 {
        match self {
            SeriesSpec::TreneerF(k) => -(*k as i64),
            _ => 0,
        }
    }

    /// Expands the series through `q^(trunc-1)`.
    pub fn expand(&self, trunc: i64) -> Result<QSeries> {
        match *self {
            SeriesSpec::Partition => Ok(partition_series(trunc)),
            SeriesSpec::Cphi(k) => cphi_series(k, trunc),
            SeriesSpec::Cphi2Product => Ok(cphi2_product_series(trunc)),
            SeriesSpec::Cphibar2Quarter => cphibar2_quarter_series(trunc),
            SeriesSpec::Sellers => Ok(sellers_series(trunc)),
            SeriesSpec::TreneerF(k) => treneer_f_series(k, trunc),
        }
    }
}

impl fmt::Display for SeriesSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesSpec::Partition => f.write_str("partition"),
            SeriesSpec::Cphi(k) => write!(f, "cphi:{k}"),
            SeriesSpec::Cphi2Product => f.write_str("cphi2prod"),
            SeriesSpec::Cphibar2Quarter => f.write_str("cphibar2q"),
            SeriesSpec::Sellers => f.write_str("sellers"),
            SeriesSpec::TreneerF(k) => write!(f, "treneerf:{k}"),
        }
    }
}

impl FromStr for SeriesSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_k = |k: &str| -> Result<u32> {
            match k.parse::<u32>() {
                Ok(k) if k >= 1 => Ok(k),
                _ => Err(Error::Parse(format!("series parameter must be a positive integer in {s:?}"))),
            }
        };
        match s.split_once(':') {
            Some(("cphi", k)) => Ok(SeriesSpec::Cphi(parse_k(k)?)),
            Some(("treneerf", k)) => Ok(SeriesSpec::TreneerF(parse_k(k)?)),
            Some(_) => Err(Error::Parse(format!("unknown series {s:?}"))),
            None => match s {
                "partition" => Ok(SeriesSpec::Partition),
                "cphi2prod" => Ok(SeriesSpec::Cphi2Product),
                "cphibar2q" => Ok(SeriesSpec::Cphibar2Quarter),
                "sellers" => Ok(SeriesSpec::Sellers),
                _ => Err(Error::Parse(format!("unknown series {s:?}"))),
            },
        }
    }
}

/// `Σ p(n) qⁿ` by Euler's pentagonal recurrence.
pub fn partition_series(trunc: i64) -> QSeries {
    let len = trunc.max(0) as usize;
    let mut p: Vec<BigInt> = Vec::with_capacity(len);
    for n in 0..len {
        if n == 0 {
            p.push(BigInt::one());
            continue;
        }
        let mut acc = BigInt::zero();
        let mut k = 1usize;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > n {
                break;
            }
            let g2 = k * (3 * k + 1) / 2;
            let mut term = p[n - g1].clone();
            if g2 <= n {
                term += &p[n - g2];
            }
            if k % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
            k += 1;
        }
        p.push(acc);
    }
    QSeries::from_coeffs(0, p)
}

/// Andrews' generating function: theta series of `Q` over `Π (1-qⁿ)^k`.
pub fn cphi_series(k: u32, trunc: i64) -> Result<QSeries> {
    if k == 0 {
        return Err(Error::InvalidArgument("cphi needs k >= 1".into()));
    }
    let trunc = trunc.max(0);
    let denominator = euler_product(trunc as usize).pow(k as u64);
    let inverse = denominator.invert(trunc)?;
    theta_series(k, trunc)?.mul(&inverse)
}

/// `Π_m (1 - q^m)^{e_m}` through `q^(len-1)`, by in-place factor updates.
///
/// Multiplying by `1 - q^m` is `c[i] -= c[i-m]` from the top down; dividing
/// is `c[i] += c[i-m]` from the bottom up.
fn product_expansion(factors: impl IntoIterator<Item = (usize, i32)>, len: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); len];
    if len == 0 {
        return c;
    }
    c[0] = BigInt::one();
    for (m, e) in factors {
        if m == 0 || m >= len {
            continue;
        }
        for _ in 0..e.unsigned_abs() {
            if e > 0 {
                for i in (m..len).rev() {
                    let (lo, hi) = c.split_at_mut(i);
                    hi[0] -= &lo[i - m];
                }
            } else {
                for i in m..len {
                    let (lo, hi) = c.split_at_mut(i);
                    hi[0] += &lo[i - m];
                }
            }
        }
    }
    c
}

/// `Π (1-q^{4n-2}) / ((1-q^{2n-1})⁴ (1-q^{4n}))`.
pub fn cphi2_product_series(trunc: i64) -> QSeries {
    let len = trunc.max(0) as usize;
    let factors = (1..=len).flat_map(|n| [(4 * n - 2, 1), (2 * n - 1, -4), (4 * n, -1)]);
    QSeries::from_coeffs(0, product_expansion(factors, len))
}

/// `(cφ_2(n) - p(n/2)) / 4`, with `p(n/2) = 0` for odd `n`.
///
/// Fails if the numerator is not divisible by 4 at some index.
pub fn cphibar2_quarter_series(trunc: i64) -> Result<QSeries> {
    let trunc = trunc.max(0);
    let cphi2 = cphi_series(2, trunc)?;
    let half_partitions = partition_series((trunc + 1) / 2).substitute_power(2).truncate(trunc);
    let bar = cphi2.sub(&half_partitions)?;
    bar.exact_div(&BigInt::from(4)).map_err(|n| Error::Mod4IdentityViolated {
        n,
        value: bar.coeff(n).map(ToString::to_string).unwrap_or_default(),
    })
}

/// Sellers' product `4q Π (1-q^{16n})² / ((1-qⁿ)² (1-q^{8n}))`, giving `cφ̄₂(n)`.
pub fn sellers_series(trunc: i64) -> QSeries {
    let len = trunc.max(0) as usize;
    if len == 0 {
        return QSeries::zero(0, 0);
    }
    let factors = (1..len).flat_map(|n| [(16 * n, 2), (n, -2), (8 * n, -1)]);
    let mut coeffs = vec![BigInt::zero()];
    coeffs.extend(product_expansion(factors, len - 1).into_iter().map(|c| c * 4));
    QSeries::from_coeffs(0, coeffs)
}

/// `Σ_m q^{24 Q(m)} / η(24z)^k = Σ_{n >= -k} cφ_k((n+k)/24) qⁿ`.
pub fn treneer_f_series(k: u32, trunc: i64) -> Result<QSeries> {
    if k == 0 {
        return Err(Error::InvalidArgument("treneer_f needs k >= 1".into()));
    }
    let k_i = k as i64;
    let trunc = trunc.max(-k_i);
    let len = trunc + k_i;
    let theta = theta_series(k, (len + 23) / 24)?.substitute_power(24).truncate(len);
    let eta24 = EtaQuotient::new([(24, 1)])?;
    let denominator = eta_quotient_series(&eta24, 1 + len, Prefactor::Include)?.pow(k as u64);
    theta.mul(&denominator.invert(len)?)
}
