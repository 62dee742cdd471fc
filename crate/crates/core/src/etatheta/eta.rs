use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{FormMeta, Holomorphy};
use crate::arith::{self, gcd_i64};
use crate::error::{Error, Result};
use crate::qseries::QSeries;

/// Formal product `Π η(δz)^{r_δ}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EtaQuotient {
    factors: Vec<(u64, i64)>,
}

/// Whether the `q^{Σδr/24}` prefactor of the eta-quotient is included.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prefactor {
    Include,
    /// Expand only `Π (1 - q^{δn})^{r_δ}`.
    Omit,
}

/// Order of vanishing at the cusps `c/d` of `Γ_0(N)` for one divisor `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CuspOrder {
    pub denominator: u64,
    /// Number of inequivalent cusps with this denominator, `φ(gcd(d, N/d))`.
    pub cusp_count: u64,
    #[serde(serialize_with = "serialize_ratio")]
    pub order: Ratio<i64>,
}

fn serialize_ratio<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EtaMeta {
    pub form: FormMeta,
    pub cusp_orders: Vec<CuspOrder>,
}

impl EtaQuotient {
    /// Factors with a zero exponent are dropped; deltas must be distinct and positive.
    pub fn new(factors: impl IntoIterator<Item = (u64, i64)>) -> Result<Self> {
        let mut factors: Vec<(u64, i64)> = factors.into_iter().filter(|&(_, r)| r != 0).collect();
        factors.sort_unstable();
        if factors.iter().any(|&(d, _)| d == 0) {
            return Err(Error::InvalidArgument("eta deltas must be positive".into()));
        }
        if factors.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("eta deltas must be distinct".into()));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[(u64, i64)] {
        &self.factors
    }

    /// `Σ δ·r_δ`; the series offset is this divided by 24.
    pub fn offset_numerator(&self) -> i64 {
        self.factors.iter().map(|&(d, r)| d as i64 * r).sum()
    }

    pub fn weight_halves(&self) -> i64 {
        self.factors.iter().map(|&(_, r)| r).sum()
    }

    /// Product with another eta-quotient, merging equal deltas.
    pub fn times(&self, other: &Self) -> Self {
        let mut merged = self.factors.clone();
        for &(d, r) in &other.factors {
            match merged.iter_mut().find(|(e, _)| *e == d) {
                Some((_, s)) => *s += r,
                None => merged.push((d, r)),
            }
        }
        Self::new(merged).expect("merged factors stay valid")
    }

    /// Rescales `z -> m·z`.
    pub fn rescale(&self, m: u64) -> Self {
        Self::new(self.factors.iter().map(|&(d, r)| (d * m, r))).expect("rescaled factors stay valid")
    }

    fn delta_lcm(&self) -> u64 {
        self.factors.iter().fold(1, |acc, &(d, _)| arith::lcm_u64(acc, d))
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|(d, r)| format!("{d}^{r}")).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for EtaQuotient {
    type Err = Error;

    /// Parses `delta^exponent` terms separated by commas, e.g. `192^2,12^-2,96^-1`.
    fn from_str(s: &str) -> Result<Self> {
        let mut factors = Vec::new();
        for term in s.split(',') {
            let term = term.trim();
            let (d, r) = term
                .split_once('^')
                .ok_or_else(|| Error::Parse(format!("eta term {term:?} is not delta^exponent")))?;
            let d: u64 = d
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad delta in {term:?}")))?;
            let r: i64 = r
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {term:?}")))?;
            factors.push((d, r));
        }
        if factors.iter().map(|f| f.0).collect::<std::collections::BTreeSet<_>>().len() != factors.len() {
            return Err(Error::Parse(format!("repeated delta in {s:?}")));
        }
        Self::new(factors)
    }
}

/// `Π_{n>=1} (1 - q^n)` through `q^(len-1)`, from the pentagonal number theorem.
pub fn euler_product(len: usize) -> QSeries {
    let mut coeffs = vec![BigInt::zero(); len];
    let len = len as i64;
    if len > 0 {
        coeffs[0] = BigInt::one();
    }
    let mut k = 1i64;
    loop {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let a = k * (3 * k - 1) / 2;
        let b = k * (3 * k + 1) / 2;
        if a >= len {
            break;
        }
        coeffs[a as usize] = BigInt::from(sign);
        if b < len {
            coeffs[b as usize] = BigInt::from(sign);
        }
        k += 1;
    }
    QSeries::from_coeffs(0, coeffs)
}

/// Expands the eta-quotient through `q^(trunc-1)`.
pub fn eta_quotient_series(eq: &EtaQuotient, trunc: i64, prefactor: Prefactor) -> Result<QSeries> {
    let offset = match prefactor {
        Prefactor::Omit => 0,
        Prefactor::Include => {
            let num = eq.offset_numerator();
            if num % 24 != 0 {
                return Err(Error::FractionalExponent { numerator: num });
            }
            num / 24
        }
    };
    if trunc <= offset {
        return Ok(QSeries::zero(trunc, trunc));
    }
    let len = (trunc - offset) as usize;
    let mut product = QSeries::one(len as i64);
    for &(delta, r) in eq.factors() {
        let delta_us = delta as usize;
        let base = euler_product(len.div_ceil(delta_us))
            .substitute_power(delta)
            .truncate(len as i64);
        let factor = base.pow(r.unsigned_abs());
        let factor = if r < 0 { factor.invert(len as i64)? } else { factor };
        product = product.mul(&factor)?;
    }
    Ok(product.shift(offset))
}

/// `Δ(z) = η(z)^24 = q Π (1 - q^n)^24` through `q^(trunc-1)`.
pub fn delta_series(trunc: i64) -> QSeries {
    let eq = EtaQuotient::new([(1, 24)]).expect("valid");
    eta_quotient_series(&eq, trunc, Prefactor::Include).expect("integral offset")
}

/// `Δ mod 2`, i.e. `Σ q^{(2n+1)^2}`, through `q^(trunc-1)`.
pub fn delta_mod2(trunc: i64) -> QSeries {
    let trunc = trunc.max(0);
    let mut coeffs = vec![BigInt::zero(); trunc as usize];
    let mut odd = 1i64;
    while odd * odd < trunc {
        coeffs[(odd * odd) as usize] = BigInt::one();
        odd += 2;
    }
    QSeries::new(0, coeffs, Some(BigInt::from(2))).expect("modulus 2 is valid")
}

/// Orders of vanishing at the cusps of `Γ_0(level)`, by Ligozat's formula
///
/// ```text
/// v_d = (N/24) Σ_δ gcd(d,δ)² r_δ / (gcd(d, N/d) · d · δ)
/// ```
///
/// for each divisor `d | N`, measured in the local uniformizer at `c/d`.
pub fn cusp_orders(eq: &EtaQuotient, level: u64) -> Result<Vec<CuspOrder>> {
    if level == 0 || eq.factors().iter().any(|&(d, _)| !level.is_multiple_of(d)) {
        return Err(Error::InvalidArgument(format!(
            "level {level} is not a multiple of every delta in {eq}"
        )));
    }
    let n = level as i64;
    Ok(arith::divisors(level)
        .into_iter()
        .map(|d| {
            let di = d as i64;
            let g = gcd_i64(di, n / di) as i64;
            let sum: Ratio<i64> = eq
                .factors()
                .iter()
                .map(|&(delta, r)| {
                    let gd = gcd_i64(di, delta as i64) as i64;
                    Ratio::new(gd * gd * r, g * di * delta as i64)
                })
                .sum();
            CuspOrder {
                denominator: d,
                cusp_count: arith::euler_phi(g as u64),
                order: sum * Ratio::new(n, 24),
            }
        })
        .collect())
}

/// Classifies a cusp-order table.
pub(crate) fn holomorphy_of(orders: &[CuspOrder]) -> Holomorphy {
    if orders.iter().all(|c| c.order.is_positive()) {
        Holomorphy::Cusp
    } else if orders.iter().all(|c| !c.order.is_negative()) {
        Holomorphy::Holomorphic
    } else {
        Holomorphy::Weakly
    }
}

/// Weight, smallest level, character and cusp orders of an eta-quotient.
///
/// The level is the least `N` divisible by every `δ` (and by 4 in
/// half-integral weight) with `Σ (N/δ) r_δ ≡ 0 (mod 24)`. With
/// `s = Π δ^{r_δ}`, the character is `((-1)^k s | ·)` in integral weight `k`
/// and `(2s | ·)` in half-integral weight, where the latter is relative to the
/// theta multiplier `(c/d) ε_d^{-1}` per half weight. Discriminants are
/// reported as the fundamental discriminant of the square class.
pub fn eta_quotient_meta(eq: &EtaQuotient) -> Result<EtaMeta> {
    if eq.factors().is_empty() {
        return Err(Error::InvalidArgument("empty eta-quotient".into()));
    }
    let sum_delta_r = eq.offset_numerator();
    if sum_delta_r % 24 != 0 {
        return Err(Error::NewmanCondition(format!(
            "sum of delta*r = {sum_delta_r} is not divisible by 24"
        )));
    }
    let weight_halves = eq.weight_halves();
    let half_integral = weight_halves % 2 != 0;
    let mut base = eq.delta_lcm();
    if half_integral {
        base = arith::lcm_u64(base, 4);
    }
    let level = (1..=24u64)
        .map(|m| base * m)
        .find(|&n| {
            eq.factors()
                .iter()
                .map(|&(d, r)| (n / d) as i64 * r)
                .sum::<i64>()
                % 24
                == 0
        })
        .expect("24·lcm always satisfies the level condition");

    let odd_part: i64 = eq
        .factors()
        .iter()
        .filter(|&&(_, r)| r % 2 != 0)
        .map(|&(d, _)| d as i64)
        .product();
    let class = if half_integral {
        2 * odd_part
    } else if (weight_halves / 2) % 2 != 0 {
        -odd_part
    } else {
        odd_part
    };
    let orders = cusp_orders(eq, level)?;
    Ok(EtaMeta {
        form: FormMeta {
            weight_halves,
            level,
            character_disc: arith::fundamental_discriminant(class),
            holomorphy: holomorphy_of(&orders),
        },
        cusp_orders: orders,
    })
}
