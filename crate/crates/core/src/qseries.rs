//! Truncated Laurent series in `q` with arbitrary-precision integer coefficients.
//!
//! A [`QSeries`] knows the coefficients of `q^n` for `offset <= n < trunc`.
//! Everything below `offset` is zero and everything at or above `trunc` is
//! unknown. Every operation tracks the known window pessimistically, so a
//! result never contains a coefficient that depended on an unknown one.

mod text;

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Products below this many multiply-adds stay on the calling thread.
const PARALLEL_WORK_THRESHOLD: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    offset: i64,
    coeffs: Vec<BigInt>,
    modulus: Option<BigInt>,
}

/// Residue class `r (mod t)` with `0 <= r < t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProgressionTarget {
    r: u64,
    t: u64,
}

impl ProgressionTarget {
    pub fn new(r: u64, t: u64) -> Result<Self> {
        if t == 0 || r >= t {
            return Err(Error::InvalidArgument(format!(
                "progression needs 0 <= r < t, got r = {r}, t = {t}"
            )));
        }
        Ok(Self { r, t })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn contains(&self, n: i64) -> bool {
        n.rem_euclid(self.t as i64) as u64 == self.r
    }
}

/// Value of a series at a point of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    /// Estimate of the omitted tail `Σ_{n >= trunc} |c(n)| |q|^n`.
    pub tail_bound: f64,
}

impl QSeries {
    /// Builds a series from coefficients of `q^offset, q^(offset+1), ...`.
    pub fn new(offset: i64, coeffs: Vec<BigInt>, modulus: Option<BigInt>) -> Result<Self> {
        let series = Self {
            offset,
            coeffs,
            modulus: None,
        };
        match modulus {
            None => Ok(series),
            Some(m) => series.reduce_mod(&m),
        }
    }

    pub fn from_coeffs(offset: i64, coeffs: Vec<BigInt>) -> Self {
        Self {
            offset,
            coeffs,
            modulus: None,
        }
    }

    pub fn from_i64s(offset: i64, coeffs: &[i64]) -> Self {
        Self::from_coeffs(offset, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// The zero series known on `[offset, trunc)`.
    pub fn zero(offset: i64, trunc: i64) -> Self {
        assert!(offset <= trunc, "window [{offset}, {trunc}) is reversed");
        Self::from_coeffs(offset, vec![BigInt::zero(); (trunc - offset) as usize])
    }

    /// `1 + O(q^trunc)`.
    pub fn one(trunc: i64) -> Self {
        Self::monomial(0, BigInt::one(), trunc)
    }

    /// `c·q^exponent + O(q^trunc)`, known from `min(exponent, trunc)`.
    pub fn monomial(exponent: i64, c: BigInt, trunc: i64) -> Self {
        if exponent >= trunc {
            return Self::zero(trunc, trunc);
        }
        let mut s = Self::zero(exponent, trunc);
        s.coeffs[0] = c;
        s
    }

    /// Builds `Σ f(n) q^n` on `[offset, trunc)`.
    pub fn from_fn(offset: i64, trunc: i64, f: impl Fn(i64) -> BigInt) -> Self {
        Self::from_coeffs(offset, (offset..trunc.max(offset)).map(f).collect())
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Exclusive truncation order.
    pub fn trunc(&self) -> i64 {
        self.offset + self.coeffs.len() as i64
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn modulus(&self) -> Option<&BigInt> {
        self.modulus.as_ref()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Coefficient of `q^n`: zero below the window, `None` when unknown.
    pub fn coeff(&self, n: i64) -> Option<&BigInt> {
        if n < self.offset {
            Some(&BigInt::ZERO)
        } else if n < self.trunc() {
            Some(&self.coeffs[(n - self.offset) as usize])
        } else {
            None
        }
    }

    /// `(exponent, coefficient)` for every nonzero coefficient in the window.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.offset + i as i64, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Keeps only the coefficients below `trunc`.
    pub fn truncate(&self, trunc: i64) -> Self {
        if trunc <= self.offset {
            return Self {
                offset: trunc,
                coeffs: Vec::new(),
                modulus: self.modulus.clone(),
            };
        }
        let keep = ((trunc - self.offset) as usize).min(self.coeffs.len());
        Self {
            offset: self.offset,
            coeffs: self.coeffs[..keep].to_vec(),
            modulus: self.modulus.clone(),
        }
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            offset: self.offset + k,
            coeffs: self.coeffs.clone(),
            modulus: self.modulus.clone(),
        }
    }

    /// Moves the offset up past leading zero coefficients.
    pub fn strip_leading_zeros(&self) -> Self {
        let skip = self
            .coeffs
            .iter()
            .take_while(|c| c.is_zero())
            .count();
        Self {
            offset: self.offset + skip as i64,
            coeffs: self.coeffs[skip..].to_vec(),
            modulus: self.modulus.clone(),
        }
    }

    /// First exponent in the common window where the two series differ.
    pub fn first_mismatch(&self, other: &Self) -> Option<i64> {
        let lo = self.offset.min(other.offset);
        let hi = self.trunc().min(other.trunc());
        (lo..hi).find(|&n| self.coeff(n) != other.coeff(n))
    }

    /// True when the series agree on their common window.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_mismatch(other).is_none()
    }

    fn common_modulus(&self, other: &Self) -> Result<Option<BigInt>> {
        match (&self.modulus, &other.modulus) {
            (None, None) => Ok(None),
            (Some(a), Some(b)) if a == b => Ok(Some(a.clone())),
            (a, b) => Err(Error::ModulusConflict(format!(
                "{} vs {}",
                describe_modulus(a.as_ref()),
                describe_modulus(b.as_ref())
            ))),
        }
    }

    fn with_modulus(mut self, modulus: Option<BigInt>) -> Self {
        if let Some(m) = &modulus {
            for c in &mut self.coeffs {
                *c = c.mod_floor(m);
            }
        }
        self.modulus = modulus;
        self
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> Result<Self> {
        let modulus = self.common_modulus(other)?;
        let lo = self.offset.min(other.offset);
        let hi = self.trunc().min(other.trunc());
        let coeffs = (lo..hi)
            .map(|n| f(self.coeff(n).unwrap(), other.coeff(n).unwrap()))
            .collect();
        Ok(Self::from_coeffs(lo, coeffs).with_modulus(modulus))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        let modulus = self.modulus.clone();
        Self::from_coeffs(self.offset, self.coeffs.iter().map(|c| -c).collect()).with_modulus(modulus)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        let modulus = self.modulus.clone();
        Self::from_coeffs(self.offset, self.coeffs.iter().map(|c| c * k).collect())
            .with_modulus(modulus)
    }

    /// Divides every coefficient by `k`, failing at the first exponent where
    /// the division is inexact.
    pub fn exact_div(&self, k: &BigInt) -> std::result::Result<Self, i64> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            let (q, r) = c.div_rem(k);
            if !r.is_zero() {
                return Err(self.offset + i as i64);
            }
            coeffs.push(q);
        }
        Ok(Self::from_coeffs(self.offset, coeffs))
    }

    /// Cauchy product. The known window is the smaller of the two windows
    /// shifted by the other operand's offset.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let modulus = self.common_modulus(other)?;
        let len = self.coeffs.len().min(other.coeffs.len());
        let coeffs = convolve(&self.coeffs, &other.coeffs, len);
        Ok(Self::from_coeffs(self.offset + other.offset, coeffs).with_modulus(modulus))
    }

    /// `1/self` through `q^(trunc - 1)` of the product: the result is known on
    /// `[-offset, trunc - offset)` so that `self · inverse = 1 + O(q^trunc)`.
    pub fn invert(&self, trunc: i64) -> Result<Self> {
        let terms = trunc.max(0) as usize;
        if self.coeffs.len() < terms {
            return Err(Error::WindowUnderflow {
                required: self.offset + terms as i64,
                available: self.trunc(),
            });
        }
        let lead = match self.coeffs.first() {
            Some(c) => c,
            None => {
                return Ok(Self::zero(-self.offset, trunc - self.offset)
                    .with_modulus(self.modulus.clone()))
            }
        };
        let lead_inv = match &self.modulus {
            None if lead.abs().is_one() => lead.clone(),
            None => return Err(Error::NotInvertible(lead.to_string())),
            Some(m) => mod_inverse(lead, m).ok_or_else(|| Error::NotInvertible(lead.to_string()))?,
        };

        let tail: Vec<(usize, &BigInt)> = self.coeffs[..terms]
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let mut out: Vec<BigInt> = Vec::with_capacity(terms);
        for n in 0..terms {
            let value = if n == 0 {
                lead_inv.clone()
            } else {
                let mut acc = BigInt::zero();
                for &(i, a) in &tail {
                    if i > n {
                        break;
                    }
                    let b = &out[n - i];
                    if !b.is_zero() {
                        acc += a * b;
                    }
                }
                let v = -(acc * &lead_inv);
                match &self.modulus {
                    Some(m) => v.mod_floor(m),
                    None => v,
                }
            };
            out.push(value);
        }
        Ok(Self::from_coeffs(-self.offset, out).with_modulus(self.modulus.clone()))
    }

    /// `self^e` by repeated squaring; `self^0` is `1` on a window of the same length.
    pub fn pow(&self, e: u64) -> Self {
        let mut result = Self::one(self.coeffs.len() as i64).with_modulus(self.modulus.clone());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same modulus");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same modulus");
            }
        }
        result
    }

    /// Substitutes `q -> q^d`.
    pub fn substitute_power(&self, d: u64) -> Self {
        assert!(d >= 1, "substitute_power needs d >= 1");
        if d == 1 {
            return self.clone();
        }
        let d_us = d as usize;
        let len = self.coeffs.len() * d_us;
        let mut coeffs = vec![BigInt::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * d_us] = c.clone();
        }
        Self {
            offset: self.offset * d as i64,
            coeffs,
            modulus: self.modulus.clone(),
        }
    }

    /// Zeroes every coefficient whose exponent is not `r (mod t)`.
    pub fn extract_progression(&self, target: ProgressionTarget) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if target.contains(self.offset + i as i64) {
                    c.clone()
                } else {
                    BigInt::zero()
                }
            })
            .collect();
        Self {
            offset: self.offset,
            coeffs,
            modulus: self.modulus.clone(),
        }
    }

    /// Reduces coefficients into `[0, m)` and records the modulus. A series
    /// that already carries a modulus can only be reduced to a divisor of it.
    pub fn reduce_mod(&self, m: &BigInt) -> Result<Self> {
        if *m < BigInt::from(2) {
            return Err(Error::InvalidModulus(m.to_string()));
        }
        if let Some(existing) = &self.modulus {
            if !existing.is_multiple_of(m) {
                return Err(Error::ModulusConflict(format!(
                    "cannot reduce a series mod {existing} to mod {m}"
                )));
            }
        }
        Ok(Self::from_coeffs(self.offset, self.coeffs.clone()).with_modulus(Some(m.clone())))
    }

    pub fn reduce_mod_u64(&self, m: u64) -> Result<Self> {
        self.reduce_mod(&BigInt::from(m))
    }

    /// Drops the recorded modulus, keeping the reduced representatives.
    pub fn lift(&self) -> Self {
        Self::from_coeffs(self.offset, self.coeffs.clone())
    }

    /// Evaluates `Σ c(n) e^{2πinz}` over the window.
    ///
    /// The tail estimate assumes coefficients beyond the window are no larger
    /// than the largest one inside it.
    pub fn eval_complex(&self, z: Complex64, tol: f64) -> Result<Evaluation> {
        if z.im <= 0.0 {
            return Err(Error::NotInUpperHalfPlane(z.im));
        }
        let q_abs = (-2.0 * PI * z.im).exp();
        let max_coeff = self
            .coeffs
            .iter()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(1.0f64, f64::max);
        let tail_bound = max_coeff * q_abs.powf(self.trunc() as f64) / (1.0 - q_abs);
        if !(tail_bound < tol) {
            return Err(Error::InsufficientTruncation {
                tail_bound,
                tolerance: tol,
            });
        }
        let step = Complex64::new(0.0, 2.0 * PI) * z;
        let value = self
            .terms()
            .map(|(n, c)| (step * n as f64).exp() * c.to_f64().unwrap_or(f64::NAN))
            .sum();
        Ok(Evaluation { value, tail_bound })
    }
}

fn describe_modulus(m: Option<&BigInt>) -> String {
    m.map_or_else(|| "none".to_string(), |m| format!("mod {m}"))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// First `len` coefficients of the product of two coefficient vectors.
///
/// The outer loop runs over output indices, each accumulated in a fixed order,
/// so the result does not depend on how rayon splits the range.
fn convolve(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let nnz = |v: &[BigInt]| v[..len].iter().filter(|c| !c.is_zero()).count();
    let (sparse, dense) = if nnz(a) <= nnz(b) { (a, b) } else { (b, a) };
    let sparse: Vec<(usize, &BigInt)> = sparse[..len]
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .collect();

    let coefficient = |i: usize| {
        let mut acc = BigInt::zero();
        for &(j, s) in &sparse {
            if j > i {
                break;
            }
            let d = &dense[i - j];
            if !d.is_zero() {
                acc += s * d;
            }
        }
        acc
    };

    if sparse.len().saturating_mul(len) < PARALLEL_WORK_THRESHOLD {
        (0..len).map(coefficient).collect()
    } else {
        (0..len).into_par_iter().with_min_len(64).map(coefficient).collect()
    }
}
