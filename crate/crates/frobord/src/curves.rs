//! Genus-2 hyperelliptic curves y^2 = f(x) over small prime fields: random
//! generation, naive point counting over F_p and F_{p^2}, and exact recovery
//! of the Frobenius characteristic polynomial from the two counts.
//!
//! The imaginary model y^2 = x^5 + f_4 x^4 + ... + f_0 has exactly one point
//! at infinity, which every count includes. Sign convention: chi(T) = T^4 +
//! a_1 T^3 + a_2 T^2 + p a_1 T + p^2 with #C(F_p) = p + 1 + a_1, i.e. the
//! signed power sums S_k = -(sum of k-th eigenvalue powers) satisfy S_1 = a_1
//! and 2 a_2 = S_2 + S_1 a_1, with S_2 read off #C(F_{p^2}). The Jacobian
//! order chi(1) must be positive, which pins the convention in tests.
//!
//! Counting is the desk-scale oracle for the probabilistic experiments: O(p)
//! quadratic-character evaluations over F_p and O(p^2) over F_{p^2}, the
//! latter through the degree-2 extension with the norm identity
//! chi_2 = chi_p . Norm (from (p^2 - 1)/2 = (p + 1)(p - 1)/2), so each
//! evaluation costs one Frobenius twist and one multiplication instead of a
//! full exponentiation.

use rand::Rng;

use crate::error::{Error, Result};
use crate::ff::{self, ext_field_build, FieldElem};
use crate::intutil;

/// Genus-2 curve y^2 = x^5 + f[4] x^4 + f[3] x^3 + f[2] x^2 + f[1] x + f[0]
/// over F_p, f square-free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperellipticCurveG2 {
    pub p: u64,
    /// f_0..f_4, little-endian; the leading coefficient is an implicit 1.
    pub f: [u64; 5],
}

/// Point counts over the base field and its quadratic extension, both
/// including the point at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PointCounts {
    pub n1: u64,
    pub n2: u64,
}

/// Primes above this make the F_{p^2} count (p^2 character evaluations)
/// unreasonable for an oracle.
pub const MAX_CURVE_PRIME: u64 = 50_000;

/// Rejection draws before generation gives up; the square-free density is
/// 1 - 1/p, so hitting this cap signals a broken RNG rather than bad luck.
const MAX_RETRIES: usize = 1000;

impl HyperellipticCurveG2 {
    /// gcd(f, f') = 1 over F_p.
    pub fn square_free(&self) -> bool {
        let p = self.p;
        let mut f = self.f.to_vec();
        f.push(1);
        let df: Vec<u64> = (1..f.len())
            .map(|i| intutil::mulmod(i as u64 % p, f[i], p))
            .collect();
        ff::poly_gcd(&f, &df, p).len() == 1
    }
}

fn check_prime(p: u64) -> Result<()> {
    ff::PrimeField::new(p)?;
    if p <= 5 || p > MAX_CURVE_PRIME {
        return Err(Error::BadConfig(format!(
            "curve prime must lie in (5, {MAX_CURVE_PRIME}], got {p}"
        )));
    }
    Ok(())
}

/// Uniform monic square-free quintic over F_p by rejection sampling;
/// deterministic for a fixed RNG state.
pub fn random_curve<R: Rng>(p: u64, rng: &mut R) -> Result<HyperellipticCurveG2> {
    check_prime(p)?;
    for _ in 0..MAX_RETRIES {
        let mut f = [0u64; 5];
        for c in f.iter_mut() {
            *c = rng.gen_range(0..p);
        }
        let curve = HyperellipticCurveG2 { p, f };
        if curve.square_free() {
            return Ok(curve);
        }
    }
    Err(Error::CurveRetries(MAX_RETRIES as u32))
}

/// chi_p(a) in {-1, 0, 1} for all residues at once: quadratic residues are
/// marked by sieving squares.
fn legendre_table(p: u64) -> Vec<i8> {
    let mut t = vec![-1i8; p as usize];
    t[0] = 0;
    for y in 1..p {
        t[intutil::mulmod(y, y, p) as usize] = 1;
    }
    t
}

/// #C(F_p) (degree 1) or #C(F_{p^2}) (degree 2), infinity included. Exact:
/// 1 + sum over x of (1 + chi(f(x))) with chi the quadratic character of the
/// respective field.
pub fn count_points(c: &HyperellipticCurveG2, ext_degree: u32) -> Result<u64> {
    let p = c.p;
    ff::PrimeField::new(p)?;
    let leg = legendre_table(p);
    match ext_degree {
        1 => {
            let mut s: i64 = 0;
            for x in 0..p {
                let mut fx = 1u64;
                for i in (0..5).rev() {
                    fx = (intutil::mulmod(fx, x, p) + c.f[i]) % p;
                }
                s += leg[fx as usize] as i64;
            }
            Ok((p as i64 + 1 + s) as u64)
        }
        2 => {
            let field = ext_field_build(p, 2)?;
            let coeffs: Vec<FieldElem> = c.f.iter().map(|&v| field.embed(v)).collect();
            // x -> x^p is F_p-linear once theta^p is known, and the norm
            // x^{p+1} lands in F_p, where the precomputed table finishes
            // the character evaluation.
            let theta = field.elem(&[0, 1]);
            let thp = field.pow(&theta, p as u128);
            let mut s: i64 = 0;
            for a in 0..p {
                for b in 0..p {
                    let x = field.elem(&[a, b]);
                    let mut fx = x.clone();
                    fx = field.add(&fx, &coeffs[4]);
                    for i in (0..4).rev() {
                        fx = field.add(&field.mul(&fx, &x), &coeffs[i]);
                    }
                    if field.is_zero(&fx) {
                        continue;
                    }
                    let fxp = field.add(&field.embed(fx.c[0]), &field.scale(&thp, fx.c[1]));
                    let norm = field.mul(&fx, &fxp);
                    debug_assert_eq!(norm.c[1], 0, "norms are rational");
                    s += leg[norm.c[0] as usize] as i64;
                }
            }
            Ok(((p * p) as i64 + 1 + s) as u64)
        }
        d => Err(Error::BadConfig(format!(
            "extension degree must be 1 or 2, got {d}"
        ))),
    }
}

/// Both counts of one curve.
pub fn point_counts(c: &HyperellipticCurveG2) -> Result<PointCounts> {
    Ok(PointCounts {
        n1: count_points(c, 1)?,
        n2: count_points(c, 2)?,
    })
}

/// Exact (a_1, a_2) from the two point counts: a_1 = n_1 - p - 1 and
/// 2 a_2 = (n_2 - p^2 - 1) + a_1^2 (the k = 2 Newton-Girard step). Counts
/// violating the Weil bounds or parity signal a counting bug.
pub fn frobenius_charpoly(counts: &PointCounts, p: u64) -> Result<(i64, i64)> {
    let pw = p as i128;
    let a1 = counts.n1 as i128 - pw - 1;
    let s2 = counts.n2 as i128 - pw * pw - 1;
    if a1 * a1 > 16 * pw || s2 * s2 > 256 * pw * pw {
        return Err(Error::WeilViolation(format!(
            "counts ({}, {}) out of range for p = {p}",
            counts.n1, counts.n2
        )));
    }
    let rhs = s2 + a1 * a1;
    if rhs.rem_euclid(2) != 0 {
        return Err(Error::NonIntegral(format!(
            "2 a_2 = {rhs} is odd for counts ({}, {})",
            counts.n1, counts.n2
        )));
    }
    Ok((a1 as i64, (rhs / 2) as i64))
}
