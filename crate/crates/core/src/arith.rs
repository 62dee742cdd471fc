//! Small integer helpers: factoring, primes, the Kronecker symbol.

use num_integer::Integer;

/// Distinct prime divisors of `n`, ascending. `n = 0` and `n = 1` give none.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Prime factorization as `(p, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && prime_divisors(n) == [n]
}

pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut sieve = vec![true; limit + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= limit {
        if sieve[i] {
            for j in (i * i..=limit).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &p)| p.then_some(i as u64))
        .collect()
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn euler_phi(n: u64) -> u64 {
    prime_divisors(n)
        .into_iter()
        .fold(n, |acc, p| acc / p * (p - 1))
}

/// Squarefree kernel of a nonzero integer, keeping the sign.
pub fn squarefree_part(n: i64) -> i64 {
    assert!(n != 0, "squarefree part of zero");
    let sign = n.signum();
    let core: u64 = factorize(n.unsigned_abs())
        .into_iter()
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(p, _)| p)
        .product();
    sign * core as i64
}

/// Discriminant of `Q(√D)` for the square class of `D`; squares map to 1.
pub fn fundamental_discriminant(d: i64) -> i64 {
    let s = squarefree_part(d);
    if s == 1 {
        1
    } else if s.rem_euclid(4) == 1 {
        s
    } else {
        4 * s
    }
}

/// Kronecker symbol `(a | n)`, defined for all integers.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut a = a as i128;
    let mut n = n as i128;
    let mut result = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
        n >>= twos;
    }
    // n is now odd and positive: Jacobi symbol.
    a = a.rem_euclid(n);
    while a != 0 {
        let z = a.trailing_zeros();
        a >>= z;
        if z % 2 == 1 && matches!(n % 8, 3 | 5) {
            result = -result;
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

pub fn gcd_i64(a: i64, b: i64) -> u64 {
    a.unsigned_abs().gcd(&b.unsigned_abs())
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre_by_euler(a: i64, p: i64) -> i32 {
        let mut r = 1i64;
        let mut base = a.rem_euclid(p);
        let mut e = (p - 1) / 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        match r {
            0 => 0,
            1 => 1,
            _ => -1,
        }
    }

    #[test]
    fn kronecker_matches_euler_criterion_at_odd_primes() {
        for p in primes_up_to(60).into_iter().skip(1) {
            for a in -30..30 {
                assert_eq!(kronecker(a, p as i64), legendre_by_euler(a, p as i64), "({a}|{p})");
            }
        }
    }

    #[test]
    fn kronecker_at_two_and_negatives() {
        // (a|2) is 0 for even a, 1 for a = ±1 mod 8, -1 for a = ±3 mod 8.
        assert_eq!(kronecker(1, 2), 1);
        assert_eq!(kronecker(7, 2), 1);
        assert_eq!(kronecker(3, 2), -1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(4, 2), 0);
        assert_eq!(kronecker(-1, -1), -1);
        assert_eq!(kronecker(12, 5), -1);
        assert_eq!(kronecker(12, 11), 1);
        assert_eq!(kronecker(12, 7), -1);
        assert_eq!(kronecker(-3, 7), 1);
        assert_eq!(kronecker(5, 0), 0);
    }

    #[test]
    fn kronecker_is_multiplicative_in_n() {
        for a in [-7i64, -4, -3, 5, 8, 12, 24] {
            for m in 1..25i64 {
                for n in 1..25i64 {
                    assert_eq!(kronecker(a, m * n), kronecker(a, m) * kronecker(a, n));
                }
            }
        }
    }

    #[test]
    fn discriminants() {
        assert_eq!(fundamental_discriminant(12), 12);
        assert_eq!(fundamental_discriminant(3), 12);
        assert_eq!(fundamental_discriminant(48), 12);
        assert_eq!(fundamental_discriminant(-3), -3);
        assert_eq!(fundamental_discriminant(4), 1);
        assert_eq!(fundamental_discriminant(5), 5);
        assert_eq!(fundamental_discriminant(24), 24);
    }

    #[test]
    fn small_number_theory() {
        assert_eq!(prime_divisors(576), vec![2, 3]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(euler_phi(36), 12);
        assert_eq!(primes_up_to(11), vec![2, 3, 5, 7, 11]);
        assert!(is_prime(97) && !is_prime(91));
    }
}
