//! Dense univariate polynomials over a prime field F_p, coefficients low-to-high.
//!
//! Only what field construction needs: reduction, modular powering of `x`,
//! gcd and Rabin's irreducibility test.

pub(crate) fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

#[inline]
pub(crate) fn mulp(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub(crate) fn pow_mod(base: u64, mut e: u64, p: u64) -> u64 {
    let p128 = p as u128;
    let mut acc = 1u128;
    let mut b = base as u128 % p128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p128;
        }
        b = b * b % p128;
        e >>= 1;
    }
    acc as u64
}

fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulp(ai, bj, p)) % p;
        }
    }
    out
}

/// Remainder of `a` modulo `m`; `m` must have a nonzero leading coefficient.
pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let top = r.len() - 1;
        let c = mulp(r[top], lead_inv, p);
        if c != 0 {
            let shift = top - dm;
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - mulp(c, mi, p)) % p;
            }
        }
        r.pop();
        trim(&mut r);
    }
    r
}

pub(crate) fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    rem(&mul(a, b, p), m, p)
}

pub(crate) fn powmod(a: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = rem(a, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(&acc, &b, m, p);
        }
        b = mulmod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(&mut out);
    out
}

fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f.saturating_mul(f) <= n {
        if n % f == 0 {
            out.push(f);
            while n % f == 0 {
                n /= f;
            }
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn is_prime(n: u64) -> bool {
    n >= 2 && prime_factors(n) == [n]
}

/// Rabin's test: monic `f` of degree k is irreducible over F_p iff
/// x^(p^k) = x mod f and gcd(x^(p^(k/r)) - x, f) = 1 for every prime r | k.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let k = f.len() - 1;
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    // frob[j] = x^(p^j) mod f
    let mut frob = vec![rem(&x, f, p)];
    for _ in 0..k {
        let last = frob.last().unwrap();
        frob.push(powmod(last, p as u128, f, p));
    }
    if sub(&frob[k], &x, p) != Vec::<u64>::new() {
        return false;
    }
    for r in prime_factors(k as u64) {
        let h = sub(&frob[k / r as usize], &x, p);
        if gcd(f, &h, p).len() != 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducible_quadratics_over_f2() {
        // x^2 + x + 1 is the only irreducible quadratic over F_2
        let irreducible: Vec<[u64; 3]> = [[0, 0, 1], [1, 0, 1], [0, 1, 1], [1, 1, 1]]
            .into_iter()
            .filter(|f| is_irreducible(f, 2))
            .collect();
        assert_eq!(irreducible, vec![[1, 1, 1]]);
    }

    #[test]
    fn rabin_matches_root_count_for_cubics() {
        // a cubic over F_5 is irreducible iff it has no root
        for c0 in 0..5 {
            for c1 in 0..5 {
                for c2 in 0..5 {
                    let f = [c0, c1, c2, 1];
                    let has_root = (0..5u64).any(|x| {
                        (c0 + c1 * x + c2 * x * x + x * x * x) % 5 == 0
                    });
                    assert_eq!(is_irreducible(&f, 5), !has_root, "{f:?}");
                }
            }
        }
    }

    #[test]
    fn factors() {
        assert_eq!(prime_factors(255), vec![3, 5, 17]);
        assert_eq!(prime_factors(1), Vec::<u64>::new());
        assert!(is_prime(65537));
        assert!(!is_prime(1));
    }
}
