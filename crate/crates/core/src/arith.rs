//! Small integer helpers shared by the modules.

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn is_odd_prime(n: u64) -> bool {
    n % 2 == 1 && is_prime(n)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Odd primes in the closed interval `[lo, hi]`, ascending.
pub fn odd_primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi).filter(|&n| is_odd_prime(n)).collect()
}

/// Multiplicative inverse of `a` modulo the prime `p`.
pub fn inverse_mod(a: u64, p: u64) -> u64 {
    let mut result = 1u64;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}
