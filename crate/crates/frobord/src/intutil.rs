//! Integer helpers shared across the crate: primality, factorization,
//! modular arithmetic, cyclotomic splitting of l^k - 1, order stripping,
//! and a small CRT.

use num_integer::Integer;

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    // This base set is a proven deterministic witness set for n < 2^64.
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// First `n` primes, starting from 2.
pub fn first_primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if is_prime(c) {
            out.push(c);
        }
        c += 1;
    }
    out
}

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Inverse of `a` mod `m`, if gcd(a, m) = 1.
pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Trial-division factorization, (prime, exponent) pairs in ascending order.
/// Intended for inputs whose prime factors are reachable by division to ~1e8;
/// every factored quantity in this crate is a cyclotomic value of a prime
/// l <= 3571, which keeps the smallest factor within that range.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5] {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    // 2,3,5-wheel
    let inc = [4u64, 2, 4, 2, 4, 6, 2, 6];
    let mut p = 7u64;
    let mut i = 0;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += inc[i];
        i = (i + 1) & 7;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Merge factorizations of several u64 parts into one sorted list; returns
/// the full product as u128 alongside.
pub fn factored_product(parts: &[u64]) -> (u128, Vec<(u64, u32)>) {
    let mut map = std::collections::BTreeMap::new();
    let mut prod: u128 = 1;
    for &part in parts {
        prod *= part as u128;
        for (p, e) in factorize(part) {
            *map.entry(p).or_insert(0u32) += e;
        }
    }
    (prod, map.into_iter().collect())
}

/// All divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let prev = out.clone();
        let mut pe = 1u64;
        for _ in 0..e {
            pe *= p;
            out.extend(prev.iter().map(|d| d * pe));
        }
    }
    out.sort_unstable();
    out
}

pub fn euler_phi(n: u64) -> u64 {
    let mut out = n;
    for (p, _) in factorize(n) {
        out = out / p * (p - 1);
    }
    out
}

/// Values Phi_d(l) for divisors d of k, so that l^k - 1 factors as their
/// product. Supports k <= 6, enough for all extension degrees in this crate.
pub fn cyclotomic_parts(l: u64, k: u32) -> Vec<u64> {
    assert!((1..=6).contains(&k), "cyclotomic split supports k <= 6");
    let phi = |d: u32| -> u64 {
        match d {
            1 => l - 1,
            2 => l + 1,
            3 => l * l + l + 1,
            4 => l * l + 1,
            5 => l * l * l * l + l * l * l + l * l + l + 1,
            6 => l * l - l + 1,
            _ => unreachable!(),
        }
    };
    (1..=k).filter(|d| k % d == 0).map(phi).collect()
}

/// Least n >= 1 dividing `mult` with pred(n) true, assuming pred is
/// divisor-closed upward (pred(n) implies pred(any multiple dividing mult)).
/// Standard exponent stripping: start at mult and remove primes while the
/// predicate still holds.
pub fn exact_order<F: Fn(u128) -> bool>(mult: u128, facs: &[(u64, u32)], pred: F) -> u128 {
    debug_assert!(pred(mult), "mult must be a multiple of the order");
    let mut ord = mult;
    for &(p, _) in facs {
        let p = p as u128;
        while ord % p == 0 && pred(ord / p) {
            ord /= p;
        }
    }
    ord
}

/// gcd convenience re-export (num-integer's binary gcd).
pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / a.gcd(&b) * b
}

/// Combine congruences x = r_i (mod m_i) with pairwise coprime moduli.
/// Returns (x mod M, M). Residues may be given in any representatives.
pub fn crt_combine(pairs: &[(i128, i128)]) -> Option<(i128, i128)> {
    let mut r0: i128 = 0;
    let mut m0: i128 = 1;
    for &(r, m) in pairs {
        let g = gcd_i128(m0, m);
        if g != 1 {
            return None;
        }
        let inv = inv_i128(m0.rem_euclid(m), m)?;
        let diff = (r - r0).rem_euclid(m);
        let t = (diff * inv).rem_euclid(m);
        r0 += m0 * t;
        m0 *= m;
        r0 = r0.rem_euclid(m0);
    }
    Some((r0, m0))
}

/// Representative of r mod m in (-m/2, m/2].
pub fn symmetric_lift(r: i128, m: i128) -> i128 {
    let r = r.rem_euclid(m);
    if 2 * r > m {
        r - m
    } else {
        r
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn inv_i128(a: i128, m: i128) -> Option<i128> {
    let (mut r0, mut r1) = (m, a.rem_euclid(m));
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m))
}
