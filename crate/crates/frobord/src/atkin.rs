//! Candidate characteristic-polynomial coefficients from the projective
//! order of Frobenius.
//!
//! The characteristic polynomial of a symplectic similitude of genus g with
//! multiplier q is reciprocal: it is determined by its leading coefficients
//! (a_1, ..., a_g) together with q, and factors as chi(T) = T^g h(T + q/T)
//! where h(T) = T^g + b_1 T^{g-1} + ... + b_g is the real Weil polynomial.
//! This module implements the coefficient plumbing between the two forms
//! ([`real_to_char`], [`char_to_real`], with exact-integer variants), the
//! Newton-Girard recurrence from signed power sums ([`newton_coeffs`]), and
//! the construction this crate exists for: bounding the possible (a_1, ...,
//! a_g) mod l once the projective order r of the similitude is known.
//!
//! The mechanism: if F^r is the first scalar power of F, each eigenvalue
//! lambda satisfies lambda^2 = zeta q for some r-th root of unity zeta, so
//! the eigenvalue sums x = lambda + q/lambda obey x^2 = eta q with
//! eta = zeta + 1/zeta + 2. Enumerating tuples of r-th roots of unity
//! ([`zeta_tuples`]) and pushing every sign choice of the square roots
//! through the elementary symmetric functions yields a finite set of
//! coefficient tuples that provably contains every tuple realized at
//! projective order r: a [`CandidateSet`]. Soundness (containment) is the
//! contract; the set may strictly over-approximate, both because the lcm
//! condition on root orders is relaxed for even r and because unrealizable
//! sign combinations are kept. Downstream consumers tolerate this by trying
//! candidates in decreasing probability order.
//!
//! Two constructions are provided. [`candidates`] works at the b-level: one
//! square root per eta is fixed and the sign choices propagate consistently
//! through all b_k, giving the tighter set. [`candidates_squared`] re-derives
//! tuples from the fully decoupled squared relations (a_1^2, (a_2 - 2q)^2,
//! and their genus-3 analogues); it is a superset of the b-level set and
//! guards against sign-case omissions. [`weighted_candidates`] merges
//! candidate sets across a projective-order distribution, weighting each
//! tuple by the mass of the orders generating it.
//!
//! All candidate arithmetic happens in an extension F_{l^k} chosen to contain
//! both the r-th roots of unity and every realizable eigenvalue sum;
//! coefficients are kept only once they land in the base field F_l. Residues
//! that fail to land there, and right-hand sides without square roots, are
//! discarded: they correspond to no F_l-rational coefficient tuple.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num::BigInt;
use rayon::prelude::*;

use crate::classdist::{OrderDist, Rational};
use crate::error::{Error, Result};
use crate::ff::{
    self, ext_field_build, fp_sqrt, minimal_ext_degree, roots_of_unity, ExtField, FieldElem,
};
use crate::intutil;
use crate::symplectic::CharPoly;

/// Coefficients of a real Weil polynomial h(T) = T^g + b_1 T^{g-1} + ... +
/// b_g, as residues mod l, with the similitude multiplier q they belong to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealWeilCoeffs {
    pub g: u32,
    pub l: u64,
    /// Multiplier residue; stored as given, reduced mod l on use.
    pub q: u64,
    /// b_1..b_g.
    pub b: Vec<u64>,
}

/// Signed power sums S_k = -(lambda_1^k + ... + lambda_n^k) of the roots of
/// a monic polynomial, reduced mod l and indexed from 1: s[k-1] = S_k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSums {
    pub l: u64,
    pub s: Vec<u64>,
}

/// A tuple (zeta_1, ..., zeta_g) of r-th roots of unity satisfying the lcm
/// condition: lcm of the exact orders equals r (odd r) or r or r/2 (even r).
#[derive(Clone, Debug)]
pub struct ZetaTuple {
    pub zetas: Vec<FieldElem>,
    /// Exact multiplicative orders, aligned with `zetas`.
    pub orders: Vec<u64>,
    pub r: u64,
}

/// Streaming enumeration of the [`ZetaTuple`]s for one (r, g, l); see
/// [`zeta_tuples`]. The tuples live in `field`.
pub struct ZetaTuples {
    pub field: ExtField,
    roots: Vec<(FieldElem, u64)>,
    g: u32,
    r: u64,
    next: u128,
    total: u128,
}

/// One generating witness of a candidate tuple: the exact orders of the
/// zeta-tuple it came from and the sign pattern applied to the square roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub zeta_orders: Vec<u64>,
    /// +1 / -1 per eigenvalue sum; empty for the squared-form construction,
    /// which does not track a per-root sign.
    pub signs: Vec<i8>,
}

/// A coefficient tuple (a_1, ..., a_g) mod l with its provenance and an
/// optional probability weight (filled by [`weighted_candidates`]).
#[derive(Clone, Debug)]
pub struct Candidate {
    pub a: Vec<u64>,
    pub witnesses: Vec<Witness>,
    pub weight: Option<Rational>,
}

/// Sound superset of the coefficient tuples realizable at projective order
/// r: every similitude of genus g, multiplier q, and projective order r has
/// its (a_1, ..., a_g) mod l in `entries`. Sorted lexicographically.
#[derive(Clone, Debug)]
pub struct CandidateSet {
    pub g: u32,
    pub l: u64,
    /// Multiplier reduced mod l.
    pub q: u64,
    pub r: u64,
    pub entries: Vec<Candidate>,
}

impl CandidateSet {
    pub fn contains(&self, a: &[u64]) -> bool {
        self.entries
            .binary_search_by(|c| c.a.as_slice().cmp(a))
            .is_ok()
    }

    pub fn coeff_tuples(&self) -> Vec<Vec<u64>> {
        self.entries.iter().map(|c| c.a.clone()).collect()
    }
}

/// Tuple enumerations larger than this are refused up front.
const TUPLE_CAP: u128 = 50_000_000;

fn check_genus(g: u32) -> Result<()> {
    if (1..=3).contains(&g) {
        Ok(())
    } else {
        Err(Error::BadGenus(g))
    }
}

fn lcm64(a: u64, b: u64) -> u64 {
    a / intutil::gcd(a, b) * b
}

fn binom(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u64 = 1;
    for i in 0..k {
        c = c * (n - i) as u64 / (i + 1) as u64;
    }
    c
}

/// chi(T) = T^g h(T + q/T) expands to a_m = sum_i C(g - m + 2i, i) q^i
/// b_{m-2i} with b_0 = 1; this is that sum mod l, for m = 1..=g.
fn real_to_char_res(g: u32, b: &[u64], q: u64, l: u64) -> Vec<u64> {
    let qi = |i: u32| intutil::mod_pow(q % l, i as u64, l);
    (1..=g)
        .map(|m| {
            let mut acc = 0u64;
            for i in 0..=(m / 2) {
                let j = (m - 2 * i) as usize;
                let bj = if j == 0 { 1 } else { b[j - 1] % l };
                let term = intutil::mulmod(
                    intutil::mulmod(binom(g - m + 2 * i, i) % l, qi(i), l),
                    bj,
                    l,
                );
                acc = (acc + term) % l;
            }
            acc
        })
        .collect()
}

/// Converts real Weil coefficients to characteristic-polynomial coefficients
/// (a_1, ..., a_g) mod l. For g = 2: a_1 = b_1, a_2 = b_2 + 2q; g = 3 adds
/// a_2 = b_2 + 3q and a_3 = b_3 + 2q b_1.
pub fn real_to_char(b: &RealWeilCoeffs) -> Result<CharPoly> {
    check_genus(b.g)?;
    ff::PrimeField::new(b.l)?;
    if b.b.len() != b.g as usize {
        return Err(Error::BadConfig(format!(
            "expected {} real Weil coefficients, got {}",
            b.g,
            b.b.len()
        )));
    }
    Ok(CharPoly {
        g: b.g,
        l: b.l,
        nu: b.q % b.l,
        a: real_to_char_res(b.g, &b.b, b.q, b.l),
    })
}

/// Inverts [`real_to_char`]: the unique b with real_to_char(b) = a, obtained
/// by back-substitution through the triangular system.
pub fn char_to_real(cp: &CharPoly) -> Result<RealWeilCoeffs> {
    check_genus(cp.g)?;
    ff::PrimeField::new(cp.l)?;
    if cp.a.len() != cp.g as usize {
        return Err(Error::BadConfig(format!(
            "expected {} coefficients, got {}",
            cp.g,
            cp.a.len()
        )));
    }
    let (g, l, q) = (cp.g, cp.l, cp.nu % cp.l);
    let mut b: Vec<u64> = Vec::with_capacity(g as usize);
    for m in 1..=g {
        let mut acc = cp.a[m as usize - 1] % l;
        for i in 1..=(m / 2) {
            let j = (m - 2 * i) as usize;
            let bj = if j == 0 { 1 } else { b[j - 1] };
            let term = intutil::mulmod(
                intutil::mulmod(binom(g - m + 2 * i, i) % l, intutil::mod_pow(q, i as u64, l), l),
                bj,
                l,
            );
            acc = (acc + l - term) % l;
        }
        b.push(acc);
    }
    Ok(RealWeilCoeffs { g, l, q, b })
}

/// Exact-integer form of [`real_to_char`] for work over Z.
pub fn real_to_char_int(g: u32, b: &[i128], q: i128) -> Vec<i128> {
    assert!((1..=3).contains(&g) && b.len() == g as usize);
    (1..=g)
        .map(|m| {
            (0..=(m / 2))
                .map(|i| {
                    let j = (m - 2 * i) as usize;
                    let bj = if j == 0 { 1 } else { b[j - 1] };
                    binom(g - m + 2 * i, i) as i128 * q.pow(i) * bj
                })
                .sum()
        })
        .collect()
}

/// Exact-integer form of [`char_to_real`].
pub fn char_to_real_int(g: u32, a: &[i128], q: i128) -> Vec<i128> {
    assert!((1..=3).contains(&g) && a.len() == g as usize);
    let mut b: Vec<i128> = Vec::with_capacity(g as usize);
    for m in 1..=g {
        let mut acc = a[m as usize - 1];
        for i in 1..=(m / 2) {
            let j = (m - 2 * i) as usize;
            let bj = if j == 0 { 1 } else { b[j - 1] };
            acc -= binom(g - m + 2 * i, i) as i128 * q.pow(i) * bj;
        }
        b.push(acc);
    }
    b
}

/// Solves k a_k = S_k + S_{k-1} a_1 + ... + S_1 a_{k-1} mod l for
/// a_1..a_count. Fails with a non-invertible k when l <= count makes some
/// division impossible; use [`newton_coeffs_int`] over Z in that regime.
pub fn newton_coeffs(s: &PowerSums, count: usize) -> Result<Vec<u64>> {
    ff::PrimeField::new(s.l)?;
    if count > s.s.len() {
        return Err(Error::BadConfig(format!(
            "need {count} power sums, got {}",
            s.s.len()
        )));
    }
    let l = s.l;
    let mut a: Vec<u64> = Vec::with_capacity(count);
    for k in 1..=count {
        if k as u64 % l == 0 {
            return Err(Error::NonInvertibleK {
                k: k as u32,
                ell: l,
            });
        }
        let mut rhs = s.s[k - 1] % l;
        for j in 1..k {
            rhs = (rhs + intutil::mulmod(s.s[k - j - 1] % l, a[j - 1], l)) % l;
        }
        let kinv = intutil::mod_inv(k as u64 % l, l).expect("k is coprime to l");
        a.push(intutil::mulmod(rhs, kinv, l));
    }
    Ok(a)
}

/// Exact-integer Newton-Girard: s[k-1] = -(sum of k-th root powers).
/// Panics if the supplied sequence is not the power sums of an integer
/// polynomial (the recurrence then fails to divide).
pub fn newton_coeffs_int(s: &[i128], count: usize) -> Vec<i128> {
    assert!(count <= s.len());
    let mut a: Vec<i128> = Vec::with_capacity(count);
    for k in 1..=count {
        let mut rhs = s[k - 1];
        for j in 1..k {
            rhs += s[k - j - 1] * a[j - 1];
        }
        assert_eq!(rhs % k as i128, 0, "power sums of an integer polynomial divide exactly");
        a.push(rhs / k as i128);
    }
    a
}

/// Largest divisor of r coprime to l.
pub fn strip_ell_part(r: u64, l: u64) -> u64 {
    let mut r = r;
    if r == 0 {
        return 0;
    }
    while r % l == 0 {
        r /= l;
    }
    r
}

/// Extension degree whose field holds the r-th roots of unity and every
/// realizable eigenvalue sum. Realized sums are roots of the degree-g real
/// Weil polynomial over F_l, so their degrees over F_l are at most g and, for
/// g = 3, a degree-3 sum forces its eta to degree 3 as well; lcm(k_r, 2)
/// therefore suffices for every g <= 3.
fn working_degree(l: u64, r: u64) -> Result<u32> {
    let k = minimal_ext_degree(l, r)?;
    let kw = lcm64(k as u64, 2) as u32;
    if kw > ff::MAX_EXT_DEGREE {
        return Err(Error::InsufficientFieldDegree {
            n: r,
            max: ff::MAX_EXT_DEGREE,
        });
    }
    Ok(kw)
}

/// Streams every tuple (zeta_1, ..., zeta_g) of r-th roots of unity whose
/// exact orders have lcm r (odd r) or lcm in {r, r/2} (even r), in a fixed
/// deterministic order. The relaxation for even r absorbs the sign ambiguity
/// of the eigenvalue-to-root correspondence.
pub fn zeta_tuples(r: u64, g: u32, l: u64) -> Result<ZetaTuples> {
    check_genus(g)?;
    let kw = working_degree(l, r)?;
    let total = (r as u128).pow(g);
    if total > TUPLE_CAP {
        return Err(Error::EnumerationTooLarge(total));
    }
    let field = ext_field_build(l, kw)?;
    // kw is a multiple of the minimal degree, so no escalation happens here.
    let ru = roots_of_unity(r, &field)?;
    Ok(ZetaTuples {
        field: ru.field,
        roots: ru.roots,
        g,
        r,
        next: 0,
        total,
    })
}

impl Iterator for ZetaTuples {
    type Item = ZetaTuple;

    fn next(&mut self) -> Option<ZetaTuple> {
        while self.next < self.total {
            let mut idx = self.next;
            self.next += 1;
            let mut js = [0usize; 3];
            let mut lo = 1u64;
            for j in js.iter_mut().take(self.g as usize) {
                *j = (idx % self.r as u128) as usize;
                idx /= self.r as u128;
                lo = lcm64(lo, self.roots[*j].1);
            }
            if lo == self.r || (self.r % 2 == 0 && lo * 2 == self.r) {
                let mut zetas = Vec::with_capacity(self.g as usize);
                let mut orders = Vec::with_capacity(self.g as usize);
                for &j in js.iter().take(self.g as usize) {
                    zetas.push(self.roots[j].0.clone());
                    orders.push(self.roots[j].1);
                }
                return Some(ZetaTuple {
                    zetas,
                    orders,
                    r: self.r,
                });
            }
        }
        None
    }
}

/// The b-level candidate set: for each zeta-tuple, fix one square root
/// x_i of eta_i q in the working field, then push every sign pattern
/// (y_1, ..., y_g) = (+-x_1, ..., +-x_g) through the elementary symmetric
/// functions b_k. A tuple is kept only when every b_k lands in F_l. One sign
/// choice per root propagates to all coefficients simultaneously, which is
/// what makes this set tighter than the squared closure.
pub fn candidates(g: u32, l: u64, q: u64, r: u64) -> Result<CandidateSet> {
    build_candidates(g, l, q, r, false)
}

/// The squared-form closure: candidate tuples re-derived from the decoupled
/// relations a_1^2 = (sum of +-x_i)^2, (a_2 - 2q)^2 = eta_1 eta_2 q^2 (g=2),
/// and the genus-3 system {a_1^2, 2a_2 = a_1^2 + 6q - q sum eta_i,
/// (a_3 - 2a_1 q)^2 = eta_1 eta_2 eta_3 q^3}. A superset of [`candidates`];
/// kept as a guard against sign-case omissions.
pub fn candidates_squared(g: u32, l: u64, q: u64, r: u64) -> Result<CandidateSet> {
    build_candidates(g, l, q, r, true)
}

fn build_candidates(g: u32, l: u64, q: u64, r: u64, squared: bool) -> Result<CandidateSet> {
    let qm = q % l;
    if qm == 0 {
        return Err(Error::ZeroMultiplier);
    }
    let mut stream = zeta_tuples(r, g, l)?;
    let field = stream.field.clone();
    let qf = field.embed(qm);
    let two = field.embed(2);
    let mut eta_of: HashMap<FieldElem, FieldElem> = HashMap::new();
    let mut seen: HashSet<Vec<FieldElem>> = HashSet::new();
    let mut acc: BTreeMap<Vec<u64>, Vec<Witness>> = BTreeMap::new();
    while let Some(t) = stream.next() {
        // eta = zeta + 1/zeta + 2; unchanged under zeta -> 1/zeta, so
        // deduplicating on the sorted eta multiset is exact.
        let etas: Vec<FieldElem> = t
            .zetas
            .iter()
            .map(|z| {
                eta_of
                    .entry(z.clone())
                    .or_insert_with(|| {
                        let inv = field.inv(z).expect("roots of unity are invertible");
                        field.add(&field.add(z, &inv), &two)
                    })
                    .clone()
            })
            .collect();
        let mut key = etas.clone();
        key.sort();
        if !seen.insert(key) {
            continue;
        }
        if squared {
            squared_tuple(&field, g, l, qm, &qf, &etas, &mut acc);
        } else {
            blevel_tuple(&field, g, l, qm, &qf, &etas, &t, &mut acc);
        }
    }
    let entries = acc
        .into_iter()
        .map(|(a, witnesses)| Candidate {
            a,
            witnesses,
            weight: None,
        })
        .collect();
    Ok(CandidateSet {
        g,
        l,
        q: qm,
        r,
        entries,
    })
}

fn blevel_tuple(
    field: &ExtField,
    g: u32,
    l: u64,
    qm: u64,
    qf: &FieldElem,
    etas: &[FieldElem],
    t: &ZetaTuple,
    acc: &mut BTreeMap<Vec<u64>, Vec<Witness>>,
) {
    let gs = g as usize;
    let mut x: Vec<FieldElem> = Vec::with_capacity(gs);
    for eta in etas {
        // Realized sums live in the working field, so a missing root means
        // the tuple realizes nothing.
        let roots = field.sqrt(&field.mul(eta, qf));
        match roots.first() {
            Some(r0) => x.push(r0.clone()),
            None => return,
        }
    }
    let zero = field.zero();
    for mask in 0u32..(1 << g) {
        let y: Vec<FieldElem> = (0..gs)
            .map(|i| {
                if mask >> i & 1 == 1 {
                    field.sub(&zero, &x[i])
                } else {
                    x[i].clone()
                }
            })
            .collect();
        let mut b: Vec<FieldElem> = Vec::with_capacity(gs);
        let sum = y.iter().fold(zero.clone(), |s, v| field.add(&s, v));
        b.push(field.sub(&zero, &sum));
        if g >= 2 {
            let mut e2 = field.mul(&y[0], &y[1]);
            if g == 3 {
                e2 = field.add(&e2, &field.mul(&y[0], &y[2]));
                e2 = field.add(&e2, &field.mul(&y[1], &y[2]));
            }
            b.push(e2);
        }
        if g == 3 {
            let e3 = field.mul(&field.mul(&y[0], &y[1]), &y[2]);
            b.push(field.sub(&zero, &e3));
        }
        let bres: Option<Vec<u64>> = b.iter().map(|e| field.as_base(e)).collect();
        let Some(bres) = bres else { continue };
        let a = real_to_char_res(g, &bres, qm, l);
        let signs = (0..gs)
            .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
            .collect();
        acc.entry(a).or_default().push(Witness {
            zeta_orders: t.orders.clone(),
            signs,
        });
    }
}

fn squared_tuple(
    field: &ExtField,
    g: u32,
    l: u64,
    qm: u64,
    qf: &FieldElem,
    etas: &[FieldElem],
    acc: &mut BTreeMap<Vec<u64>, Vec<Witness>>,
) {
    let u: Vec<FieldElem> = etas.iter().map(|e| field.mul(e, qf)).collect();
    match g {
        1 => {
            // a_1 = -t with t^2 = eta q; fp_sqrt returns both signs.
            if let Some(ub) = field.as_base(&u[0]) {
                for t in fp_sqrt(ub, l) {
                    acc.entry(vec![t]).or_default();
                }
            }
        }
        2 => {
            let p = field.mul(&u[0], &u[1]);
            let Some(pb) = field.as_base(&p) else { return };
            let a2s: Vec<u64> = fp_sqrt(pb, l).iter().map(|t| (2 * qm + t) % l).collect();
            if a2s.is_empty() {
                return;
            }
            let su = field.add(&u[0], &u[1]);
            let mut a1s: BTreeSet<u64> = BTreeSet::new();
            for v in field.sqrt(&p) {
                let aa = field.add(&su, &field.add(&v, &v));
                if let Some(ab) = field.as_base(&aa) {
                    a1s.extend(fp_sqrt(ab, l));
                }
            }
            for &a1 in &a1s {
                for &a2 in &a2s {
                    acc.entry(vec![a1, a2]).or_default();
                }
            }
        }
        _ => {
            let su = field.add(&field.add(&u[0], &u[1]), &u[2]);
            let Some(sub) = field.as_base(&su) else { return };
            let c = field.mul(&field.mul(&u[0], &u[1]), &u[2]);
            let Some(cb) = field.as_base(&c) else { return };
            let t3s = fp_sqrt(cb, l);
            if t3s.is_empty() {
                return;
            }
            let inv2 = intutil::mod_inv(2, l).expect("l is odd");
            let mut a1s: BTreeSet<u64> = BTreeSet::new();
            // All cross-sign combinations: iterating full root lists covers
            // both parities of the pairwise sign products.
            for v01 in field.sqrt(&field.mul(&u[0], &u[1])) {
                for v02 in field.sqrt(&field.mul(&u[0], &u[2])) {
                    for v12 in field.sqrt(&field.mul(&u[1], &u[2])) {
                        let cross = field.add(&field.add(&v01, &v02), &v12);
                        let aa = field.add(&su, &field.add(&cross, &cross));
                        if let Some(ab) = field.as_base(&aa) {
                            a1s.extend(fp_sqrt(ab, l));
                        }
                    }
                }
            }
            for &a1 in &a1s {
                let a1sq = intutil::mulmod(a1, a1, l);
                let a2 = intutil::mulmod((a1sq + 6 * qm % l + l - sub % l) % l, inv2, l);
                for &t3 in &t3s {
                    let a3 = (2 * intutil::mulmod(a1, qm, l) + t3) % l;
                    acc.entry(vec![a1, a2, a3]).or_default();
                }
            }
        }
    }
}

/// Merges genus-2 candidate sets across a projective-order distribution:
/// each order r in scope contributes weight P(r) / |candidates(r0)| to every
/// tuple of its candidate set, where r0 strips the l-part of r. Duplicates
/// merge by summing weights; the result is sorted by descending weight with
/// a lexicographic tie-break. Weights are exact rationals, so the order is
/// deterministic. With the symplectic order distribution the multiplier must
/// be 1 mod l for soundness of the per-order candidate sets; orders whose
/// candidate set is empty contribute nothing.
pub fn weighted_candidates(
    l: u64,
    q: u64,
    dist: &OrderDist,
    orders: Option<&[u64]>,
) -> Result<Vec<Candidate>> {
    let scope: BTreeSet<u64> = match orders {
        Some(os) => os.iter().copied().collect(),
        None => dist.probs.keys().copied().collect(),
    };
    let r0s: Vec<u64> = scope
        .iter()
        .map(|&r| strip_ell_part(r, l))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let sets: HashMap<u64, CandidateSet> = r0s
        .into_par_iter()
        .map(|r0| candidates(2, l, q, r0).map(|c| (r0, c)))
        .collect::<Result<_>>()?;
    let mut acc: BTreeMap<Vec<u64>, Rational> = BTreeMap::new();
    for &r in &scope {
        let Some(p) = dist.probs.get(&r) else { continue };
        let cs = &sets[&strip_ell_part(r, l)];
        if cs.entries.is_empty() {
            continue;
        }
        let share = p / Rational::from_integer(BigInt::from(cs.entries.len() as u64));
        for e in &cs.entries {
            let w = acc.entry(e.a.clone()).or_insert_with(Rational::default);
            *w += share.clone();
        }
    }
    let mut out: Vec<Candidate> = acc
        .into_iter()
        .map(|(a, w)| Candidate {
            a,
            witnesses: Vec::new(),
            weight: Some(w),
        })
        .collect();
    out.sort_by(|x, y| y.weight.cmp(&x.weight).then_with(|| x.a.cmp(&y.a)));
    Ok(out)
}
