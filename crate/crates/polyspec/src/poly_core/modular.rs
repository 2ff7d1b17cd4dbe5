//! Multi-modular computation of exact multiplier polynomials.
//!
//! `χ^p = ∏(λ − (f^{∘p})′(r))` over the roots `r` of the dynatomic polynomial
//! is the characteristic polynomial of multiplication by `(f^{∘p})′` on
//! `Q[z]/(Φ)`. Over `Q` the entries of that matrix grow quickly, so the
//! computation runs modulo many word-size primes: each prime yields `χ mod q`
//! through a Hessenberg characteristic polynomial and a power-series `p`-th
//! root. The residues are combined by the Chinese remainder theorem and lifted
//! back to `Q` by rational reconstruction. A lift is accepted once two further
//! primes, not used in the lift, reproduce it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly_core::field::Rational;
use crate::poly_core::poly::Poly;

/// Deterministic Miller–Rabin test for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0u32);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes below `2^62` in decreasing order.
pub fn primes_below_2_62() -> impl Iterator<Item = u64> {
    let start = (1u64 << 62) - 1;
    (0..).map(move |k| start - 2 * k).filter(|&n| is_prime_u64(n))
}

#[inline]
fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

#[inline]
fn add_mod(a: u64, b: u64, q: u64) -> u64 {
    let s = a + b;
    if s >= q {
        s - q
    } else {
        s
    }
}

#[inline]
fn sub_mod(a: u64, b: u64, q: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + q - b
    }
}

fn pow_mod(mut a: u64, mut e: u64, q: u64) -> u64 {
    let mut acc = 1u64 % q;
    a %= q;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, q);
        }
        a = mul_mod(a, a, q);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, q: u64) -> Option<u64> {
    if a.is_multiple_of(q) {
        None
    } else {
        Some(pow_mod(a, q - 2, q))
    }
}

fn bigint_mod(n: &BigInt, q: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(q));
    r.to_u64().expect("residue fits in u64")
}

/// Image of a rational in `F_q`, or `None` if `q` divides the denominator.
pub fn reduce_rational(x: &Rational, q: u64) -> Option<u64> {
    let den = bigint_mod(x.denom(), q);
    let inv = inv_mod(den, q)?;
    Some(mul_mod(bigint_mod(x.numer(), q), inv, q))
}

/// Polynomials over `F_q` as coefficient vectors (low-to-high, trimmed).
mod fq {
    use super::*;

    pub fn trim(mut v: Vec<u64>) -> Vec<u64> {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    pub fn mul(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u128; a.len() + b.len() - 1];
        let qq = q as u128;
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                let acc = &mut out[i + j];
                *acc += x as u128 * y as u128;
                if *acc >= qq * qq {
                    *acc -= qq * qq;
                }
            }
        }
        trim(out.into_iter().map(|x| (x % qq) as u64).collect())
    }

    pub fn sub(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        trim(
            (0..n)
                .map(|i| sub_mod(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0), q))
                .collect(),
        )
    }

    /// `f ∘ g` by Horner's rule in the outer polynomial.
    pub fn compose(f: &[u64], g: &[u64], q: u64) -> Vec<u64> {
        let mut acc: Vec<u64> = Vec::new();
        for &c in f.iter().rev() {
            acc = mul(&acc, g, q);
            if acc.is_empty() {
                acc.push(0);
            }
            acc[0] = add_mod(acc[0], c, q);
            acc = trim(acc);
        }
        acc
    }

    /// Exact quotient `a / b`; `None` if the remainder is nonzero.
    pub fn exact_div(a: &[u64], b: &[u64], q: u64) -> Option<Vec<u64>> {
        let db = b.len().checked_sub(1)?;
        if a.len() < b.len() {
            return if a.is_empty() { Some(Vec::new()) } else { None };
        }
        let inv = inv_mod(b[db], q)?;
        let mut r = a.to_vec();
        let mut quo = vec![0u64; a.len() - db];
        for k in (0..quo.len()).rev() {
            let c = mul_mod(r[k + db], inv, q);
            quo[k] = c;
            if c != 0 {
                for (j, &bj) in b.iter().enumerate() {
                    r[k + j] = sub_mod(r[k + j], mul_mod(c, bj, q), q);
                }
            }
        }
        if r.iter().any(|&x| x != 0) {
            None
        } else {
            Some(trim(quo))
        }
    }

    pub fn rem_monic(a: &[u64], m: &[u64], q: u64) -> Vec<u64> {
        let dm = m.len() - 1;
        let mut r = a.to_vec();
        while r.len() > dm {
            let c = *r.last().expect("nonempty");
            let k = r.len() - 1 - dm;
            if c != 0 {
                for (j, &mj) in m.iter().enumerate() {
                    r[k + j] = sub_mod(r[k + j], mul_mod(c, mj, q), q);
                }
            }
            r.pop();
        }
        trim(r)
    }

    pub fn derivative(a: &[u64], q: u64) -> Vec<u64> {
        trim(a.iter().enumerate().skip(1).map(|(k, &c)| mul_mod(c, k as u64 % q, q)).collect())
    }
}

/// `det(λI − M)` over `F_q` by Hessenberg reduction.
fn charpoly_mod(mut h: Vec<Vec<u64>>, q: u64) -> Vec<u64> {
    let n = h.len();
    for j in 0..n.saturating_sub(2) {
        let Some(p) = (j + 1..n).find(|&i| h[i][j] != 0) else { continue };
        if p != j + 1 {
            h.swap(p, j + 1);
            for row in h.iter_mut() {
                row.swap(p, j + 1);
            }
        }
        let inv = inv_mod(h[j + 1][j], q).expect("nonzero pivot");
        for i in j + 2..n {
            if h[i][j] == 0 {
                continue;
            }
            let t = mul_mod(h[i][j], inv, q);
            for k in j..n {
                let v = sub_mod(h[i][k], mul_mod(t, h[j + 1][k], q), q);
                h[i][k] = v;
            }
            for row in h.iter_mut() {
                row[j + 1] = add_mod(row[j + 1], mul_mod(t, row[i], q), q);
            }
        }
    }
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for k in 0..n {
        let mut pk = fq::mul(&[sub_mod(0, h[k][k], q), 1], &polys[k], q);
        let mut prod = 1u64;
        for i in (0..k).rev() {
            prod = mul_mod(prod, h[i + 1][i], q);
            if prod == 0 {
                break;
            }
            let coef = mul_mod(h[i][k], prod, q);
            if coef != 0 {
                let scaled: Vec<u64> = polys[i].iter().map(|&c| mul_mod(c, coef, q)).collect();
                pk = fq::sub(&pk, &scaled, q);
            }
        }
        polys.push(pk);
    }
    polys.pop().expect("nonempty")
}

/// Monic `p`-th root over `F_q` of a monic polynomial, by the reversed
/// power-series recurrence; `None` if the candidate's `p`-th power differs.
fn pth_root_mod(c: &[u64], p: usize, q: u64) -> Option<Vec<u64>> {
    let n = c.len() - 1;
    if !n.is_multiple_of(p) || c[n] != 1 {
        return None;
    }
    let m = n / p;
    let rev: Vec<u64> = c.iter().rev().copied().collect();
    let inv_p = inv_mod(p as u64, q)?;
    let mut r = vec![0u64; m + 1];
    r[0] = 1;
    for k in 1..=m {
        let mut acc = 0u64;
        for j in 1..=k {
            // weight j/p − k + j
            let w = sub_mod(add_mod(mul_mod(j as u64, inv_p, q), j as u64, q), k as u64 % q, q);
            acc = add_mod(acc, mul_mod(w, mul_mod(rev[j], r[k - j], q), q), q);
        }
        r[k] = mul_mod(acc, inv_mod(k as u64, q)?, q);
    }
    let root: Vec<u64> = r.into_iter().rev().collect();
    let mut pow = vec![1u64];
    for _ in 0..p {
        pow = fq::mul(&pow, &root, q);
    }
    if pow == fq::trim(c.to_vec()) {
        Some(root)
    } else {
        None
    }
}

/// Outcome of one prime.
enum PrimeResult {
    /// The prime divides a denominator or the leading coefficient.
    Bad,
    /// `χ mod q`, low-to-high.
    Good(Vec<u64>),
    /// `χ^p` is not a `p`-th power modulo `q`.
    NotPower,
}

fn chi_mod(f: &[Rational], p: usize, divisors: &[usize], q: u64) -> PrimeResult {
    let Some(fq_coeffs) = f.iter().map(|c| reduce_rational(c, q)).collect::<Option<Vec<u64>>>() else {
        return PrimeResult::Bad;
    };
    if *fq_coeffs.last().expect("nonempty") == 0 {
        return PrimeResult::Bad;
    }
    // Iterates f^{∘k} for k ≤ p and dynatomic factors for divisors of p.
    let mut iterates: Vec<Vec<u64>> = vec![vec![0, 1]];
    for k in 1..=p {
        let next = fq::compose(&fq_coeffs, &iterates[k - 1], q);
        iterates.push(next);
    }
    let mut phis: Vec<(usize, Vec<u64>)> = Vec::new();
    for &k in divisors {
        let mut num = fq::sub(&iterates[k], &[0, 1], q);
        for (j, phi) in &phis {
            if k % j == 0 {
                match fq::exact_div(&num, phi, q) {
                    Some(v) => num = v,
                    None => return PrimeResult::Bad,
                }
            }
        }
        phis.push((k, num));
    }
    let phi = &phis.last().expect("p divides p").1;
    let Some(inv_lc) = inv_mod(*phi.last().expect("nonzero"), q) else {
        return PrimeResult::Bad;
    };
    let monic: Vec<u64> = phi.iter().map(|&c| mul_mod(c, inv_lc, q)).collect();
    let nu = monic.len() - 1;
    let h = fq::derivative(&iterates[p], q);
    let mut col = fq::rem_monic(&h, &monic, q);
    let mut mat = vec![vec![0u64; nu]; nu];
    for j in 0..nu {
        for (i, row) in mat.iter_mut().enumerate() {
            row[j] = col.get(i).copied().unwrap_or(0);
        }
        let mut shifted = vec![0u64];
        shifted.extend_from_slice(&col);
        col = fq::rem_monic(&fq::trim(shifted), &monic, q);
    }
    let cp = charpoly_mod(mat, q);
    match pth_root_mod(&cp, p, q) {
        Some(r) => PrimeResult::Good(r),
        None => PrimeResult::NotPower,
    }
}

/// Rational `a/b` with `a ≡ b·r (mod m)` and `|a|, b ≤ sqrt(m/2)`.
pub fn rational_reconstruct(r: &BigInt, m: &BigInt) -> Option<Rational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), r.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let (qt, rem) = r0.div_rem(&r1);
        r0 = std::mem::replace(&mut r1, rem);
        let t2 = &t0 - &qt * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(Rational::new(r1, t1))
}

/// Divisors of `p` in increasing order.
pub fn divisors(p: usize) -> Vec<usize> {
    (1..=p).filter(|k| p.is_multiple_of(*k)).collect()
}

/// Exact multiplier polynomial `χ_f^(p)` of a rational polynomial.
///
/// Errors with [`Error::NotPthPower`] if the characteristic polynomial fails
/// to be a `p`-th power modulo a good prime.
pub fn multiplier_poly_modular(f: &Poly<Rational>, p: usize) -> Result<Poly<Rational>> {
    let d = f.degree().unwrap_or(0);
    if d < 2 || p == 0 {
        return Err(Error::InvalidInput("multiplier polynomial needs deg f ≥ 2 and p ≥ 1".into()));
    }
    let divs = divisors(p);
    let coeffs = f.coeffs();
    let mut primes = primes_below_2_62();
    let mut residues: Vec<BigInt> = Vec::new();
    let mut modulus = BigInt::one();
    let mut used = 0usize;
    let mut batch = 2usize;
    let next_batch = |n: usize, primes: &mut dyn Iterator<Item = u64>| -> Result<Vec<(u64, Vec<u64>)>> {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let cand: Vec<u64> = (0..n - out.len()).map_while(|_| primes.next()).collect();
            let results: Vec<(u64, PrimeResult)> =
                cand.par_iter().map(|&q| (q, chi_mod(coeffs, p, &divs, q))).collect();
            for (q, r) in results {
                match r {
                    PrimeResult::Bad => {}
                    PrimeResult::NotPower => {
                        return Err(Error::NotPthPower {
                            p,
                            detail: format!("characteristic polynomial is not a {p}-th power modulo {q}"),
                        })
                    }
                    PrimeResult::Good(v) => out.push((q, v)),
                }
            }
        }
        Ok(out)
    };
    loop {
        for (q, v) in next_batch(batch, &mut primes)? {
            let qb = BigInt::from(q);
            if residues.is_empty() {
                residues = v.iter().map(|&x| BigInt::from(x)).collect();
            } else {
                let inv = inv_mod(bigint_mod(&modulus, q), q).expect("distinct primes");
                for (acc, &x) in residues.iter_mut().zip(&v) {
                    let diff = sub_mod(x, bigint_mod(acc, q), q);
                    let t = mul_mod(diff, inv, q);
                    *acc += &modulus * BigInt::from(t);
                }
            }
            modulus *= qb;
            used += 1;
        }
        let lifted: Option<Vec<Rational>> =
            residues.par_iter().map(|r| rational_reconstruct(r, &modulus)).collect();
        if let Some(lifted) = lifted {
            let checks = next_batch(2, &mut primes)?;
            let agrees = checks.iter().all(|(q, v)| {
                lifted.iter().zip(v).all(|(c, &x)| reduce_rational(c, *q) == Some(x))
            });
            if agrees {
                return Ok(Poly::new(lifted));
            }
            // Fold the check primes into the lift as well.
            for (q, v) in checks {
                let inv = inv_mod(bigint_mod(&modulus, q), q).expect("distinct primes");
                for (acc, &x) in residues.iter_mut().zip(&v) {
                    let diff = sub_mod(x, bigint_mod(acc, q), q);
                    *acc += &modulus * BigInt::from(mul_mod(diff, inv, q));
                }
                modulus *= BigInt::from(q);
                used += 1;
            }
        }
        batch = used.max(2);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly_core::field::rat;

    #[test]
    fn miller_rabin_agrees_with_trial_division() {
        let trial = |n: u64| n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k));
        for n in 0..2000u64 {
            assert_eq!(is_prime_u64(n), trial(n), "{n}");
        }
        assert!(is_prime_u64((1u64 << 61) - 1));
        assert!(!is_prime_u64(3_215_031_751));
    }

    #[test]
    fn reconstruction_recovers_small_rationals() {
        let m: BigInt = primes_below_2_62().take(2).map(BigInt::from).product();
        for x in [rat(-7, 13), rat(123_456, 789), rat(0, 1)] {
            let q0 = BigInt::from(primes_below_2_62().next().unwrap());
            let q1 = &m / &q0;
            let r0 = BigInt::from(reduce_rational(&x, q0.to_u64().unwrap()).unwrap());
            let r1 = BigInt::from(reduce_rational(&x, q1.to_u64().unwrap()).unwrap());
            // CRT by hand for two moduli.
            let inv = BigInt::from(inv_mod(bigint_mod(&q0, q1.to_u64().unwrap()), q1.to_u64().unwrap()).unwrap());
            let r = (&r0 + &q0 * (((&r1 - &r0) * inv).mod_floor(&q1))).mod_floor(&m);
            assert_eq!(rational_reconstruct(&r, &m), Some(x));
        }
    }

    #[test]
    fn modular_chi_of_simple_maps() {
        // z^2: χ^(1) = λ^2 − 2λ, χ^(2) = λ − 4.
        let z2 = Poly::new(vec![rat(0, 1), rat(0, 1), rat(1, 1)]);
        assert_eq!(multiplier_poly_modular(&z2, 1).unwrap(), Poly::new(vec![rat(0, 1), rat(-2, 1), rat(1, 1)]));
        assert_eq!(multiplier_poly_modular(&z2, 2).unwrap(), Poly::new(vec![rat(-4, 1), rat(1, 1)]));
        // z^2 + c: χ^(2) = λ − 4(c + 1).
        let c = rat(-7, 3);
        let f = Poly::new(vec![c.clone(), rat(0, 1), rat(1, 1)]);
        let expected = Poly::new(vec![-(c + rat(1, 1)) * rat(4, 1), rat(1, 1)]);
        assert_eq!(multiplier_poly_modular(&f, 2).unwrap(), expected);
    }
}
