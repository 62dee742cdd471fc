//! Parity of coefficients of weakly holomorphic forms.
//!
//! For `Σ c(n) q^{αn+β}` and a progression `r (mod t)`, multiplying by
//! `Δ^{2^j}(αtz)` gives a cusp form once `j` is large enough, and modulo 2
//!
//! ```text
//! Δ^{2^j}(αtz) · Σ c(n) q^{αn+β} ≡ (Σ q^{α 2^j t (2n+1)²}) · Σ c(n) q^{αn+β}.
//! ```
//!
//! Sturm's bound on the sieved form turns this into an explicit index
//! `C_{r,t}` below which the first odd `c(M)`, `M ≡ r (mod t)`, must occur.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};
use crate::etatheta::{cusp_orders, delta_mod2, delta_series, eta_quotient_meta, CuspOrder, EtaQuotient};
use crate::frobenius::cphibar2_quarter_series;
use crate::qseries::QSeries;

/// Parameters of the parity machinery for `Σ c(n) q^{αn+β} ∈ M^!_k(Γ_0(N₀), χ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ParityParams {
    pub alpha: u64,
    pub beta: i64,
    pub t: u64,
    pub r: u64,
    pub n0: u64,
    pub weight_k: i64,
    pub j: u32,
    /// Level used in the bound; `lcm(αt, N₀)` when unset.
    pub level: Option<u64>,
}

impl ParityParams {
    /// The `cφ̄₂(n)/4` pipeline: `α = 12`, `β = -1`, `N₀ = 576`, weight 0,
    /// `j` from `2^j > t/12`, and the form `f_t` placed on `Γ_0(576t)`.
    pub fn cphibar(r: u64, t: u64) -> Result<Self> {
        check_progression(r, t)?;
        Ok(Self {
            alpha: 12,
            beta: -1,
            t,
            r,
            n0: 576,
            weight_k: 0,
            j: min_j_cphibar(t),
            level: Some(576 * t),
        })
    }

    pub fn level(&self) -> u64 {
        self.level
            .unwrap_or_else(|| arith::lcm_u64(self.alpha * self.t, self.n0))
    }

    /// `gcd(αr + β, t)`.
    pub fn d(&self) -> u64 {
        arith::gcd_i64(self.alpha as i64 * self.r as i64 + self.beta, self.t as i64)
    }

    /// Exponent of the leading term of `Δ^{2^j}(αtz)`.
    pub fn delta_offset(&self) -> i64 {
        (1i64 << self.j) * (self.alpha * self.t) as i64
    }
}

fn check_progression(r: u64, t: u64) -> Result<()> {
    if t == 0 || r >= t {
        return Err(Error::InvalidArgument(format!(
            "progression needs 0 <= r < t, got r = {r}, t = {t}"
        )));
    }
    Ok(())
}

/// Smallest `j` with `2^j > t/12`.
pub fn min_j_cphibar(t: u64) -> u32 {
    let mut j = 0;
    while 12u64 << j <= t {
        j += 1;
    }
    j
}

/// Smallest `j` for which `input · Δ^{2^j}(αtz)` vanishes at every cusp,
/// computed from the cusp-order table of the product eta-quotient.
pub fn min_j_eta(input: &EtaQuotient, alpha: u64, t: u64) -> Result<u32> {
    let base_level = eta_quotient_meta(input)?.form.level;
    let level = arith::lcm_u64(base_level, alpha * t);
    for j in 0..48u32 {
        let product = ft_eta_quotient(input, alpha, t, j);
        if cusp_orders(&product, level)?.iter().all(|c| c.order > num_rational::Ratio::zero()) {
            return Ok(j);
        }
    }
    Err(Error::InvalidArgument(format!("no j < 48 clears the poles of {input}")))
}

/// `input · η(αtz)^{24·2^j}` as an eta-quotient.
pub fn ft_eta_quotient(input: &EtaQuotient, alpha: u64, t: u64, j: u32) -> EtaQuotient {
    input.times(&EtaQuotient::new([(alpha * t, 24i64 << j)]).expect("valid factor"))
}

/// Cusp-order table of `f_t` when the input is itself an eta-quotient.
pub fn ft_cusp_orders(input: &EtaQuotient, params: &ParityParams) -> Result<Vec<CuspOrder>> {
    let product = ft_eta_quotient(input, params.alpha, params.t, params.j);
    let level = arith::lcm_u64(eta_quotient_meta(input)?.form.level, params.level());
    cusp_orders(&product, level)
}

/// The weight-0 eta-quotient congruent mod 2 to `Σ (cφ̄₂(n)/4) q^{12n-1}`:
/// `η(192z)² η(z)² / (η(12z)² η(96z) η(2z))`.
pub fn cphibar_companion() -> EtaQuotient {
    EtaQuotient::new([(192, 2), (1, 2), (12, -2), (96, -1), (2, -1)]).expect("valid")
}

/// `Σ c(n) q^{αn+β}` from the coefficient series `Σ c(n) qⁿ`.
pub fn spread(c: &QSeries, alpha: u64, beta: i64) -> QSeries {
    c.substitute_power(alpha).shift(beta)
}

/// `Σ (cφ̄₂(n)/4) q^{12n-1}` through `q^(trunc-1)`, starting at its first
/// nonzero term `q^11`.
pub fn cphibar_pipeline_input(trunc: i64) -> Result<QSeries> {
    let terms = (trunc + 1 + 11) / 12;
    let quarter = cphibar2_quarter_series(terms.max(1))?;
    Ok(spread(&quarter, 12, -1).truncate(trunc).strip_leading_zeros())
}

/// `Δ^{2^j}(αtz) · input`, known through `q^(trunc-1)`.
pub fn build_ft(input: &QSeries, params: &ParityParams, trunc: i64) -> Result<QSeries> {
    let scale = (params.alpha * params.t) as i64;
    let power = 1i64 << params.j;
    let needed = (trunc - input.offset()).max(1);
    let delta_trunc = (needed + scale - 1) / scale - power + 1;
    let delta = delta_series(delta_trunc.max(2));
    build_ft_with_delta(&delta, input, params, trunc)
}

/// As [`build_ft`], with the `Δ` expansion supplied by the caller.
pub fn build_ft_with_delta(
    delta: &QSeries,
    input: &QSeries,
    params: &ParityParams,
    trunc: i64,
) -> Result<QSeries> {
    let scale = params.alpha * params.t;
    let lifted = delta.pow(1u64 << params.j).substitute_power(scale);
    let required_input = trunc - lifted.offset();
    if input.trunc() < required_input {
        return Err(Error::WindowUnderflow {
            required: required_input,
            available: input.trunc(),
        });
    }
    let required_delta = trunc - input.offset();
    if lifted.trunc() < required_delta {
        return Err(Error::WindowUnderflow {
            required: required_delta,
            available: lifted.trunc(),
        });
    }
    Ok(lifted.mul(input)?.truncate(trunc))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorizationCheck {
    pub passed: bool,
    pub first_mismatch: Option<i64>,
    pub checked_below: i64,
}

/// Compares `f_t mod 2` with `(Σ q^{α 2^j t (2n+1)²}) · input mod 2` below `trunc`.
pub fn check_mod2_factorization(input: &QSeries, params: &ParityParams, trunc: i64) -> Result<FactorizationCheck> {
    let ft = build_ft(input, params, trunc)?;
    compare_with_factorization(&ft, input, params, trunc)
}

/// As [`check_mod2_factorization`], with the `Δ` expansion supplied by the caller.
pub fn check_mod2_factorization_with_delta(
    delta: &QSeries,
    input: &QSeries,
    params: &ParityParams,
    trunc: i64,
) -> Result<FactorizationCheck> {
    let ft = build_ft_with_delta(delta, input, params, trunc)?;
    compare_with_factorization(&ft, input, params, trunc)
}

fn compare_with_factorization(
    ft: &QSeries,
    input: &QSeries,
    params: &ParityParams,
    trunc: i64,
) -> Result<FactorizationCheck> {
    let lhs = ft.reduce_mod_u64(2)?;
    let scale = params.delta_offset();
    let needed = (trunc - input.offset()).max(1);
    let odd_squares = delta_mod2((needed + scale - 1) / scale + 1).substitute_power(scale as u64);
    let rhs = odd_squares.mul(&input.reduce_mod_u64(2)?)?.truncate(trunc);
    let first_mismatch = lhs.first_mismatch(&rhs);
    Ok(FactorizationCheck {
        passed: first_mismatch.is_none() && lhs.trunc() >= trunc && rhs.trunc() >= trunc,
        first_mismatch,
        checked_below: lhs.trunc().min(rhs.trunc()),
    })
}

/// An upper bound, rounded up to an integer when the exact value is not one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bound {
    #[serde(serialize_with = "serialize_decimal")]
    pub value: BigInt,
    pub rounded_up: bool,
}

fn serialize_decimal<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ceil_bound(exact: BigRational) -> Bound {
    Bound {
        rounded_up: !exact.is_integer(),
        value: exact.ceil().to_integer(),
    }
}

fn prime_product(n: u64) -> BigRational {
    arith::prime_divisors(n)
        .into_iter()
        .fold(BigRational::one(), |acc, p| {
            let p2 = BigInt::from(p * p);
            acc * BigRational::new(&p2 - 1, p2)
        })
}

/// `C = ((2^j·12 + k)/(12α)) [Nα²t²/d]² Π_{p | Nαt} (1 - 1/p²) - 2^j`.
pub fn bound_general(params: &ParityParams) -> Result<Bound> {
    if params.t <= 1 {
        return Err(Error::TheoremRequiresT(params.t));
    }
    check_progression(params.r, params.t)?;
    let two_j = BigInt::one() << params.j;
    let n = params.level();
    let alpha = BigInt::from(params.alpha);
    let t = BigInt::from(params.t);
    let d = BigInt::from(params.d());
    let prefactor = BigRational::new(&two_j * 12 + params.weight_k, &alpha * 12);
    let sieved = BigInt::from(n) * &alpha * &alpha * &t * &t / d;
    let radical_of = n * params.alpha * params.t;
    let exact = prefactor * BigRational::from_integer(&sieved * &sieved) * prime_product(radical_of)
        - BigRational::from_integer(two_j);
    Ok(ceil_bound(exact))
}

/// `C_{r,t} = 2^{18+j} 3^7 t⁶ / d² · Π_{p | 6t} (1 - 1/p²) - 2^j` with
/// `d = gcd(12r - 1, t)` and the least `j` with `2^j > t/12`.
pub fn bound_cphibar(r: u64, t: u64) -> Result<Bound> {
    check_progression(r, t)?;
    let j = min_j_cphibar(t);
    let d = arith::gcd_i64(12 * r as i64 - 1, t as i64);
    let numerator = (BigInt::one() << (18 + j)) * BigInt::from(3u32).pow(7) * BigInt::from(t).pow(6);
    let exact = BigRational::new(numerator, BigInt::from(d * d)) * prime_product(6 * t)
        - BigRational::from_integer(BigInt::one() << j);
    Ok(ceil_bound(exact))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParityReport {
    pub r: u64,
    pub t: u64,
    pub limit: u64,
    pub odd: Vec<u64>,
    pub even_count: u64,
    pub smallest_odd: Option<u64>,
    #[serde(serialize_with = "serialize_decimal")]
    pub bound: BigInt,
    /// An odd value was found, or the scan reached the bound so all values
    /// in the progression are even.
    pub conclusive: bool,
}

impl ParityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Parities of `cφ̄₂(M)/4` for `M ≡ r (mod t)`, `M <= limit`.
pub fn parity_search(r: u64, t: u64, limit: u64) -> Result<ParityReport> {
    check_progression(r, t)?;
    let quarter = cphibar2_quarter_series(limit as i64 + 1)?;
    parity_search_on(&quarter, r, t, limit)
}

/// As [`parity_search`] on a precomputed `Σ (cφ̄₂(n)/4) qⁿ`.
pub fn parity_search_on(quarter: &QSeries, r: u64, t: u64, limit: u64) -> Result<ParityReport> {
    check_progression(r, t)?;
    if quarter.trunc() <= limit as i64 {
        return Err(Error::WindowUnderflow {
            required: limit as i64 + 1,
            available: quarter.trunc(),
        });
    }
    let mut odd = Vec::new();
    let mut even_count = 0;
    for m in (r..=limit).step_by(t as usize) {
        if quarter.coeff(m as i64).expect("window checked").is_odd() {
            odd.push(m);
        } else {
            even_count += 1;
        }
    }
    let bound = bound_cphibar(r, t)?.value;
    let smallest_odd = odd.first().copied();
    if let Some(m) = smallest_odd {
        assert!(
            BigInt::from(m) < bound,
            "smallest odd index {m} is not below C_{{{r},{t}}} = {bound}"
        );
    }
    let conclusive = smallest_odd.is_some() || BigInt::from(limit) >= bound;
    Ok(ParityReport {
        r,
        t,
        limit,
        odd,
        even_count,
        smallest_odd,
        bound,
        conclusive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_rule() {
        assert_eq!(min_j_cphibar(3), 0);
        assert_eq!(min_j_cphibar(11), 0);
        assert_eq!(min_j_cphibar(12), 1);
        assert_eq!(min_j_cphibar(100), 4);
        assert_eq!(min_j_cphibar(1), 0);
    }

    #[test]
    fn cusp_rule_matches_power_of_two_rule() {
        let companion = cphibar_companion();
        for t in 1..=40 {
            assert_eq!(min_j_eta(&companion, 12, t).unwrap(), min_j_cphibar(t), "t = {t}");
        }
    }

    #[test]
    fn ft_orders_are_positive_for_the_pipeline() {
        let companion = cphibar_companion();
        for t in 1..=8 {
            let params = ParityParams::cphibar(0, t).unwrap();
            let orders = ft_cusp_orders(&companion, &params).unwrap();
            assert!(orders.iter().all(|c| c.order > num_rational::Ratio::zero()), "t = {t}");
            let meta = eta_quotient_meta(&ft_eta_quotient(&companion, 12, t, params.j)).unwrap();
            assert_eq!(meta.form.weight_halves, 24 << params.j);
            assert_eq!(576 * t % meta.form.level, 0);
        }
    }

    #[test]
    fn ft_offset_and_identity_input() {
        let input = cphibar_pipeline_input(400).unwrap();
        assert_eq!(input.offset(), 11);
        let params = ParityParams::cphibar(0, 1).unwrap();
        let ft = build_ft(&input, &params, 400).unwrap();
        assert_eq!(ft.strip_leading_zeros().offset(), 23);
        assert_eq!(ft.trunc(), 400);

        let params = ParityParams { alpha: 5, beta: 0, t: 1, r: 0, n0: 1, weight_k: 12, j: 0, level: None };
        let ft = build_ft(&QSeries::one(200), &params, 200).unwrap();
        let expected = delta_series(41).substitute_power(5).truncate(200);
        assert_eq!(ft, expected);
    }

    #[test]
    fn ft_window_underflow() {
        let input = cphibar_pipeline_input(100).unwrap();
        let params = ParityParams::cphibar(0, 1).unwrap();
        let err = build_ft(&input, &params, 500).unwrap_err();
        assert_eq!(err, Error::WindowUnderflow { required: 488, available: 100 });
    }

    #[test]
    fn factorization_holds_for_the_pipeline() {
        let input = cphibar_pipeline_input(1500).unwrap();
        for t in 1..=3 {
            let params = ParityParams::cphibar(0, t).unwrap();
            let check = check_mod2_factorization(&input, &params, 1500).unwrap();
            assert!(check.passed, "t = {t}: {check:?}");
        }
        let zero = QSeries::zero(11, 1500);
        let check = check_mod2_factorization(&zero, &ParityParams::cphibar(0, 1).unwrap(), 1500).unwrap();
        assert!(check.passed);
    }

    #[test]
    fn corrupted_delta_is_located() {
        let input = cphibar_pipeline_input(800).unwrap();
        let params = ParityParams::cphibar(0, 1).unwrap();
        let good = delta_series(80);
        let mut coeffs = good.coeffs().to_vec();
        // Flip the parity of the q^9 coefficient of Δ (τ(9) = -113643, odd).
        coeffs[8] += 1;
        let bad = QSeries::from_coeffs(good.offset(), coeffs);
        let check = check_mod2_factorization_with_delta(&bad, &input, &params, 800).unwrap();
        assert!(!check.passed);
        // The flipped Δ term lands at 12·9 and first meets the input's leading q^11.
        assert_eq!(check.first_mismatch, Some(12 * 9 + 11));
    }

    #[test]
    fn cphibar_bound_values() {
        let b = bound_cphibar(1, 3).unwrap();
        assert_eq!(b.value, (BigInt::one() << 19) * BigInt::from(3u32).pow(12) - 1);
        assert!(!b.rounded_up);
        let b = bound_cphibar(0, 2).unwrap();
        assert_eq!(b.value, (BigInt::one() << 25) * BigInt::from(3u32).pow(6) - 1);
    }

    #[test]
    fn general_bound_specializes() {
        let params = ParityParams::cphibar(1, 3).unwrap();
        assert_eq!(bound_general(&params).unwrap(), bound_cphibar(1, 3).unwrap());
        // With the smaller level lcm(αt, N₀) = 576 the bound is t² = 9 times smaller.
        let lcm = ParityParams { level: None, ..params };
        assert_eq!(lcm.level(), 576);
        assert_eq!(
            bound_general(&lcm).unwrap().value,
            (BigInt::one() << 19) * BigInt::from(3u32).pow(10) - 1
        );
        for t in 2..30 {
            for r in 0..t {
                assert_eq!(
                    bound_general(&ParityParams::cphibar(r, t).unwrap()).unwrap(),
                    bound_cphibar(r, t).unwrap(),
                    "r = {r}, t = {t}"
                );
            }
        }
    }

    #[test]
    fn general_bound_rejects_t_one() {
        let params = ParityParams::cphibar(0, 1).unwrap();
        assert_eq!(bound_general(&params).unwrap_err(), Error::TheoremRequiresT(1));
        assert!(bound_cphibar(0, 1).is_ok());
    }

    #[test]
    fn general_bound_doubles_with_j() {
        let base = ParityParams { alpha: 1, beta: 0, t: 5, r: 2, n0: 7, weight_k: 3, j: 10, level: None };
        let a = bound_general(&base).unwrap().value;
        let b = bound_general(&ParityParams { j: 11, ..base }).unwrap().value;
        let ratio = num_rational::BigRational::new(b, a);
        let two = num_rational::BigRational::from_integer(BigInt::from(2));
        let err = (ratio - &two) / two;
        assert!(err < num_rational::BigRational::new(BigInt::one(), BigInt::from(1000)));
        let odd = ParityParams { alpha: 7, beta: 0, t: 2, r: 1, n0: 1, weight_k: 1, j: 0, level: None };
        assert!(!bound_general(&odd).unwrap().rounded_up);
    }

    #[test]
    fn shared_primes_count_once() {
        // N = lcm(αt, N₀) = 12, α = 6, t = 2: radical of Nαt is 6.
        let p = ParityParams { alpha: 6, beta: 0, t: 2, r: 0, n0: 12, weight_k: 0, j: 0, level: None };
        let expected = BigRational::new(BigInt::from(12), BigInt::from(72))
            * BigRational::from_integer(BigInt::from((12 * 36 * 4 / 2) * (12 * 36 * 4 / 2)))
            * BigRational::new(BigInt::from(3), BigInt::from(4))
            * BigRational::new(BigInt::from(8), BigInt::from(9))
            - BigRational::one();
        assert_eq!(bound_general(&p).unwrap().value, expected.ceil().to_integer());
    }

    #[test]
    fn searches() {
        let r = parity_search(1, 2, 100).unwrap();
        assert_eq!(r.smallest_odd, Some(1));
        assert!(r.conclusive);
        let r = parity_search(0, 2, 5000).unwrap();
        assert_eq!(r.smallest_odd, None);
        assert!(r.odd.is_empty());
        assert_eq!(r.even_count, 2501);
        assert!(!r.conclusive);
        let r = parity_search(0, 1, 0).unwrap();
        assert_eq!((r.even_count, r.smallest_odd), (1, None));
    }

    #[test]
    fn report_json_shape() {
        let r = parity_search(1, 3, 30).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(
            keys,
            ["bound", "conclusive", "even_count", "limit", "odd", "r", "smallest_odd", "t"]
        );
        assert!(v["bound"].is_string());
    }
}
