use std::collections::HashMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;

use super::{FormMeta, Holomorphy};
use crate::arith::{gcd_i64, kronecker};
use crate::error::{Error, Result};
use crate::qseries::QSeries;

/// `Q(m) = Σ m_i² + Σ_{i<j} m_i m_j` in `k - 1` variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadForm {
    k: u32,
}

impl QuadForm {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("quadratic form needs k >= 1".into()));
        }
        Ok(Self { k })
    }

    pub fn rank(&self) -> usize {
        self.k as usize - 1
    }

    pub fn value(&self, m: &[i64]) -> i64 {
        assert_eq!(m.len(), self.rank(), "vector length must be k - 1");
        let squares: i64 = m.iter().map(|x| x * x).sum();
        let mut cross = 0;
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                cross += m[i] * m[j];
            }
        }
        squares + cross
    }

    /// `2Q(m) = Σ m_i² + (Σ m_i)²`.
    pub fn twice_value(&self, m: &[i64]) -> i64 {
        let squares: i64 = m.iter().map(|x| x * x).sum();
        let sum: i64 = m.iter().sum();
        squares + sum * sum
    }
}

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// `Σ_{m ∈ Z^{k-1}} q^{Q(m)}` through `q^(trunc-1)`.
///
/// Counts by dynamic programming over the coordinates, carrying the partial
/// sum `s` and partial sum of squares. With `r` coordinates still to come,
/// `2Q >= Σ_{done} m_i² + s²/(r+1)`, which bounds the live states.
pub fn theta_series(k: u32, trunc: i64) -> Result<QSeries> {
    let form = QuadForm::new(k)?;
    let trunc = trunc.max(0);
    if trunc == 0 {
        return Ok(QSeries::zero(0, 0));
    }
    let dims = form.rank();
    if dims == 0 {
        return Ok(QSeries::one(trunc));
    }
    let max_twice = 2 * (trunc - 1);
    let bound = isqrt(max_twice);

    let mut states: HashMap<(i64, i64), u128> = HashMap::from([((0, 0), 1)]);
    for coord in 0..dims - 1 {
        let later = (dims - coord - 1) as i64;
        let mut next: HashMap<(i64, i64), u128> = HashMap::with_capacity(states.len() * 4);
        for (&(s, sq), &count) in &states {
            for m in -bound..=bound {
                let sq2 = sq + m * m;
                let s2 = s + m;
                if sq2 * (later + 1) + s2 * s2 > max_twice * (later + 1) {
                    continue;
                }
                let slot = next.entry((s2, sq2)).or_insert(0);
                *slot = slot.checked_add(count).ok_or(Error::Overflow)?;
            }
        }
        states = next;
    }

    let mut counts = vec![0u128; trunc as usize];
    for (&(s, sq), &count) in &states {
        for m in -bound..=bound {
            let twice = sq + m * m + (s + m) * (s + m);
            if twice <= max_twice {
                let slot = &mut counts[(twice / 2) as usize];
                *slot = slot.checked_add(count).ok_or(Error::Overflow)?;
            }
        }
    }
    Ok(QSeries::from_coeffs(0, counts.into_iter().map(BigInt::from).collect()))
}

/// Direct `(k-1)`-fold scan over the box `|m_i| <= √(2(trunc-1))`.
pub fn theta_series_naive(k: u32, trunc: i64) -> Result<QSeries> {
    let form = QuadForm::new(k)?;
    let trunc = trunc.max(0);
    let dims = form.rank();
    let bound = isqrt(2 * (trunc - 1).max(0));
    let mut counts = vec![0u64; trunc as usize];
    let mut m = vec![-bound; dims];
    loop {
        let q = form.value(&m);
        if q < trunc {
            counts[q as usize] += 1;
        }
        // odometer step
        let mut i = 0;
        loop {
            if i == dims {
                return Ok(QSeries::from_coeffs(
                    0,
                    counts.into_iter().map(BigInt::from).collect(),
                ));
            }
            if m[i] < bound {
                m[i] += 1;
                break;
            }
            m[i] = -bound;
            i += 1;
        }
    }
}

/// Modular data of the theta series of `Q` as recorded for odd and even `k`.
pub fn theta_meta(k: u32) -> Result<FormMeta> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("theta_meta needs k >= 2, got {k}")));
    }
    let k_i = k as i64;
    Ok(if k % 2 == 1 {
        let sign = if ((k - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
        FormMeta {
            weight_halves: k_i - 1,
            level: k as u64,
            character_disc: sign * k_i,
            holomorphy: Holomorphy::Holomorphic,
        }
    } else {
        FormMeta {
            weight_halves: k_i - 1,
            level: 2 * k as u64,
            character_disc: 2 * k_i,
            holomorphy: Holomorphy::Weakly,
        }
    })
}

/// `[[a, b], [c, d]]` with determinant 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Gamma0Element {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Gamma0Element {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    pub fn check(&self, level: u64) -> Result<()> {
        if self.a * self.d - self.b * self.c != 1 {
            return Err(Error::InvalidArgument(format!("{self:?} does not have determinant 1")));
        }
        if self.c.rem_euclid(level as i64) != 0 {
            return Err(Error::InvalidArgument(format!("{self:?} is not in Γ_0({level})")));
        }
        Ok(())
    }

    pub fn act(&self, z: Complex64) -> Complex64 {
        (z * self.a as f64 + self.b as f64) / (z * self.c as f64 + self.d as f64)
    }

    /// Bottom-row element with the given `c` and `d`, completed by extended gcd.
    pub fn from_bottom_row(c: i64, d: i64) -> Result<Self> {
        if gcd_i64(c, d) != 1 {
            return Err(Error::InvalidArgument(format!("gcd({c}, {d}) != 1")));
        }
        let (g, x, y) = ext_gcd(d, c);
        // x·d + y·c = g = ±1, so a = x/g, b = -y/g gives ad - bc = 1.
        Ok(Self::new(x * g, -y * g, c, d))
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AutomorphyCheck {
    pub passed: bool,
    pub residual: f64,
    pub terms: i64,
}

/// Largest window tried when sizing the theta expansion.
const MAX_THETA_TERMS: i64 = 1 << 16;

/// Compares `θ(γz)` with `χ_k(d) (cz+d)^{(k-1)/2} θ(z)` numerically, for odd `k`.
pub fn automorphy_spot_check(
    k: u32,
    gamma: Gamma0Element,
    z: Complex64,
    tol: f64,
) -> Result<AutomorphyCheck> {
    if k.is_multiple_of(2) || k < 3 {
        return Err(Error::InvalidArgument(format!("automorphy check needs odd k >= 3, got {k}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if z.im <= 0.0 {
        return Err(Error::NotInUpperHalfPlane(z.im));
    }
    let meta = theta_meta(k)?;
    gamma.check(meta.level)?;
    let gz = gamma.act(z);

    // The tail must be negligible against the tolerance at both points.
    let tail_tol = tol * 1e-3;
    let mut terms = 64;
    let (theta_z, theta_gz) = loop {
        let theta = theta_series(k, terms)?;
        match (theta.eval_complex(z, tail_tol), theta.eval_complex(gz, tail_tol)) {
            (Ok(a), Ok(b)) => break (a.value, b.value),
            (Err(Error::InsufficientTruncation { tail_bound, .. }), _)
            | (_, Err(Error::InsufficientTruncation { tail_bound, .. })) => {
                if terms >= MAX_THETA_TERMS {
                    return Err(Error::InsufficientTruncation {
                        tail_bound,
                        tolerance: tail_tol,
                    });
                }
                terms *= 2;
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    };

    let chi = kronecker(meta.character_disc, gamma.d) as f64;
    let j = z * gamma.c as f64 + gamma.d as f64;
    let rhs = j.powi((k as i32 - 1) / 2) * chi * theta_z;
    let scale = theta_gz.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
    let residual = (theta_gz - rhs).norm() / scale;
    Ok(AutomorphyCheck {
        passed: residual < tol,
        residual,
        terms,
    })
}
