//! Prime fields F_l and their extensions F_{l^k} for k <= 6, in polynomial
//! basis with a deterministically chosen irreducible modulus. Provides
//! square roots, multiplicative orders via factored exponent stripping,
//! and roots-of-unity subgroups with exact order tags.

use crate::error::{Error, Result};
use crate::intutil;

/// Largest supported extension degree. Eigenvalues of 2g x 2g matrices
/// (g <= 3) lie in degree <= 6 extensions, so this covers every use here.
pub const MAX_EXT_DEGREE: u32 = 6;

/// The prime field F_l, l an odd prime >= 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    pub l: u64,
}

impl PrimeField {
    pub fn new(l: u64) -> Result<Self> {
        if l < 3 || l % 2 == 0 || !intutil::is_prime(l) {
            return Err(Error::NotOddPrime(l));
        }
        Ok(Self { l })
    }
}

/// Legendre symbol (a/l): 0, 1 or -1.
pub fn legendre(a: u64, l: u64) -> i32 {
    let a = a % l;
    if a == 0 {
        return 0;
    }
    if intutil::mod_pow(a, (l - 1) / 2, l) == 1 {
        1
    } else {
        -1
    }
}

/// Square roots of `a` mod `l`: [] if a is a non-residue, [0] for a = 0,
/// [x, l - x] with x < l - x otherwise. Tonelli-Shanks with a deterministic
/// non-residue scan, so results are identical across runs.
pub fn fp_sqrt(a: u64, l: u64) -> Vec<u64> {
    let a = a % l;
    if a == 0 {
        return vec![0];
    }
    if legendre(a, l) != 1 {
        return vec![];
    }
    let x = if l % 4 == 3 {
        intutil::mod_pow(a, (l + 1) / 4, l)
    } else {
        tonelli_shanks(a, l)
    };
    let y = l - x;
    if x < y {
        vec![x, y]
    } else {
        vec![y, x]
    }
}

fn tonelli_shanks(a: u64, l: u64) -> u64 {
    let s = (l - 1).trailing_zeros();
    let q = (l - 1) >> s;
    let z = (2..l).find(|&z| legendre(z, l) == -1).unwrap();
    let mut m = s;
    let mut c = intutil::mod_pow(z, q, l);
    let mut t = intutil::mod_pow(a, q, l);
    let mut r = intutil::mod_pow(a, (q + 1) / 2, l);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = intutil::mulmod(t2, t2, l);
            i += 1;
        }
        let mut b = c;
        for _ in 0..(m - i - 1) {
            b = intutil::mulmod(b, b, l);
        }
        m = i;
        c = intutil::mulmod(b, b, l);
        t = intutil::mulmod(t, c, l);
        r = intutil::mulmod(r, b, l);
    }
    r
}

/// Element of an extension field, coefficients of 1, x, ..., x^{k-1}.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElem {
    pub c: Vec<u64>,
}

/// F_{l^k} with a fixed irreducible modulus (first monic irreducible in the
/// lexicographic scan over coefficient tuples (c_{k-1}, ..., c_0)). The
/// factorization of l^k - 1 is precomputed for order queries.
#[derive(Clone, Debug)]
pub struct ExtField {
    pub l: u64,
    pub k: u32,
    /// Monic modulus, length k + 1, little-endian coefficients.
    pub modulus: Vec<u64>,
    q_minus_1: u128,
    order_facs: Vec<(u64, u32)>,
}

pub fn ext_field_build(l: u64, k: u32) -> Result<ExtField> {
    PrimeField::new(l)?;
    if !(1..=MAX_EXT_DEGREE).contains(&k) {
        return Err(Error::DegreeOutOfRange(k));
    }
    let modulus = first_irreducible(l, k);
    let parts = intutil::cyclotomic_parts(l, k);
    let (q_minus_1, order_facs) = intutil::factored_product(&parts);
    Ok(ExtField {
        l,
        k,
        modulus,
        q_minus_1,
        order_facs,
    })
}

fn first_irreducible(l: u64, k: u32) -> Vec<u64> {
    // Counter over (c_{k-1}, ..., c_0) ascending; density of irreducibles
    // is ~1/k so the scan ends quickly.
    let mut idx: u128 = 0;
    loop {
        let mut f = vec![0u64; k as usize + 1];
        f[k as usize] = 1;
        let mut rem = idx;
        for d in 0..k as usize {
            f[d] = (rem % l as u128) as u64;
            rem /= l as u128;
        }
        if rem == 0 && is_irreducible(&f, l) {
            return f;
        }
        idx += 1;
    }
}

fn is_irreducible(f: &[u64], l: u64) -> bool {
    let k = f.len() as u32 - 1;
    if k == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    // x^(l^k) = x mod f, and gcd(x^(l^(k/p)) - x, f) = 1 for primes p | k.
    let xq = poly_powmod(&x, (l as u128).pow(k), f, l);
    if poly_trim(&poly_sub(&xq, &x, l)) != Vec::<u64>::new() {
        return false;
    }
    for (p, _) in intutil::factorize(k as u64) {
        let e = (l as u128).pow(k / p as u32);
        let xe = poly_powmod(&x, e, f, l);
        let g = poly_gcd(&poly_sub(&xe, &x, l), f, l);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

// --- dense little-endian polynomial helpers over F_l ---
// Shared with the matrix code for characteristic-polynomial work.

pub(crate) fn poly_trim(a: &[u64]) -> Vec<u64> {
    let mut v = a.to_vec();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

pub(crate) fn poly_sub(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + l - y) % l
        })
        .collect()
}

pub(crate) fn poly_mul(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            let t = (x as u128 * y as u128) % l as u128;
            out[i + j] = ((out[i + j] as u128 + t) % l as u128) as u64;
        }
    }
    out
}

pub(crate) fn poly_rem(a: &[u64], m: &[u64], l: u64) -> Vec<u64> {
    let m = poly_trim(m);
    let dm = m.len() - 1;
    let lead_inv = intutil::mod_inv(m[dm], l).expect("monic or invertible lead");
    let mut r = poly_trim(a);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let coef = intutil::mulmod(*r.last().unwrap(), lead_inv, l);
        for i in 0..=dm {
            let t = intutil::mulmod(coef, m[i], l);
            r[shift + i] = (r[shift + i] + l - t) % l;
        }
        r = poly_trim(&r);
        if r.is_empty() {
            break;
        }
    }
    r
}

pub(crate) fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], l: u64) -> Vec<u64> {
    poly_rem(&poly_mul(a, b, l), m, l)
}

pub(crate) fn poly_powmod(base: &[u64], mut e: u128, m: &[u64], l: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(base, m, l);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, m, l);
        }
        b = poly_mulmod(&b, &b, m, l);
        e >>= 1;
    }
    acc
}

pub(crate) fn poly_gcd(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
    let mut a = poly_trim(a);
    let mut b = poly_trim(b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, l);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        let inv = intutil::mod_inv(lead, l).unwrap();
        for c in &mut a {
            *c = intutil::mulmod(*c, inv, l);
        }
    }
    a
}

pub(crate) fn poly_deriv(a: &[u64], l: u64) -> Vec<u64> {
    if a.len() <= 1 {
        return vec![];
    }
    poly_trim(
        &a[1..]
            .iter()
            .enumerate()
            .map(|(i, &c)| intutil::mulmod((i as u64 + 1) % l, c, l))
            .collect::<Vec<u64>>(),
    )
}

/// Exact quotient a / b; panics if b does not divide a (internal misuse).
pub(crate) fn poly_div_exact(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
    let b = poly_trim(b);
    let mut r = poly_trim(a);
    let db = b.len() - 1;
    let lead_inv = intutil::mod_inv(b[db], l).expect("invertible lead");
    let mut q = vec![0u64; r.len().saturating_sub(db)];
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let coef = intutil::mulmod(*r.last().unwrap(), lead_inv, l);
        q[shift] = coef;
        for i in 0..=db {
            let t = intutil::mulmod(coef, b[i], l);
            r[shift + i] = (r[shift + i] + l - t) % l;
        }
        r = poly_trim(&r);
        if r.is_empty() {
            break;
        }
    }
    assert!(r.is_empty(), "inexact polynomial division");
    q
}

/// Product of the distinct irreducible factors of f, monic. Handles the
/// characteristic-p wrinkles: f' = 0 means f = g(T)^l and we recurse on the
/// l-th root (coefficient extraction; Frobenius is the identity on F_l).
pub(crate) fn poly_radical(f: &[u64], l: u64) -> Vec<u64> {
    let f = monic(&poly_trim(f), l);
    if f.len() <= 1 {
        return f;
    }
    let d = poly_deriv(&f, l);
    if d.is_empty() {
        let root: Vec<u64> = f.iter().step_by(l as usize).copied().collect();
        return poly_radical(&root, l);
    }
    let c = poly_gcd(&f, &d, l);
    if c.len() == 1 {
        return f;
    }
    // f/c has every factor whose multiplicity is nonzero mod l, once each;
    // factors hiding in c are merged back via an lcm.
    let w = poly_div_exact(&f, &c, l);
    let rc = poly_radical(&c, l);
    let g = poly_gcd(&w, &rc, l);
    poly_div_exact(&poly_mul(&w, &rc, l), &g, l)
}

fn monic(a: &[u64], l: u64) -> Vec<u64> {
    let mut a = poly_trim(a);
    if let Some(&lead) = a.last() {
        if lead != 1 {
            let inv = intutil::mod_inv(lead, l).unwrap();
            for c in &mut a {
                *c = intutil::mulmod(*c, inv, l);
            }
        }
    }
    a
}

impl ExtField {
    pub fn q_minus_1(&self) -> u128 {
        self.q_minus_1
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem {
            c: vec![0; self.k as usize],
        }
    }

    pub fn one(&self) -> FieldElem {
        self.embed(1)
    }

    pub fn embed(&self, c: u64) -> FieldElem {
        let mut v = vec![0; self.k as usize];
        v[0] = c % self.l;
        FieldElem { c: v }
    }

    /// Element from raw coefficients (reduced mod l, padded/truncated to k).
    pub fn elem(&self, coeffs: &[u64]) -> FieldElem {
        let mut v: Vec<u64> = coeffs.iter().map(|&c| c % self.l).collect();
        v.resize(self.k as usize, 0);
        FieldElem { c: v }
    }

    pub fn is_zero(&self, a: &FieldElem) -> bool {
        a.c.iter().all(|&c| c == 0)
    }

    /// Constant-coefficient view if the element lies in the base field.
    pub fn as_base(&self, a: &FieldElem) -> Option<u64> {
        a.c[1..].iter().all(|&c| c == 0).then(|| a.c[0])
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem {
            c: a.c
                .iter()
                .zip(&b.c)
                .map(|(&x, &y)| (x + y) % self.l)
                .collect(),
        }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem {
            c: a.c
                .iter()
                .zip(&b.c)
                .map(|(&x, &y)| (x + self.l - y) % self.l)
                .collect(),
        }
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let prod = poly_mulmod(&a.c, &b.c, &self.modulus, self.l);
        self.elem(&prod)
    }

    pub fn scale(&self, a: &FieldElem, c: u64) -> FieldElem {
        FieldElem {
            c: a.c.iter().map(|&x| intutil::mulmod(x, c, self.l)).collect(),
        }
    }

    pub fn pow(&self, a: &FieldElem, mut e: u128) -> FieldElem {
        let mut acc = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FieldElem) -> Option<FieldElem> {
        if self.is_zero(a) {
            return None;
        }
        // a^(q-2); q - 1 is precomputed
        Some(self.pow(a, self.q_minus_1 - 1))
    }

    /// Least n >= 1 with a^n = 1. Factored stripping over l^k - 1, no scan.
    pub fn mult_order(&self, a: &FieldElem) -> Result<u128> {
        if self.is_zero(a) {
            return Err(Error::ZeroOrder);
        }
        let ord = intutil::exact_order(self.q_minus_1, &self.order_facs, |e| {
            self.pow(a, e) == self.one()
        });
        Ok(ord)
    }

    /// Square roots within this field: [] for non-residues, one or two roots
    /// otherwise, sorted. Tonelli-Shanks over the extension, deterministic.
    pub fn sqrt(&self, a: &FieldElem) -> Vec<FieldElem> {
        if self.is_zero(a) {
            return vec![self.zero()];
        }
        let q1 = self.q_minus_1;
        if self.pow(a, q1 / 2) != self.one() {
            return vec![];
        }
        let r = if (q1 + 1) % 4 == 0 {
            self.pow(a, (q1 + 1) / 4)
        } else {
            self.ts_sqrt(a)
        };
        let r2 = self.sub(&self.zero(), &r);
        let mut out = vec![r, r2];
        out.sort();
        out.dedup();
        out
    }

    fn ts_sqrt(&self, a: &FieldElem) -> FieldElem {
        let q1 = self.q_minus_1;
        let s = q1.trailing_zeros();
        let q = q1 >> s;
        let z = self
            .iter_elems()
            .find(|z| !self.is_zero(z) && self.pow(z, q1 / 2) != self.one())
            .unwrap();
        let mut m = s;
        let mut c = self.pow(&z, q);
        let mut t = self.pow(a, q);
        let mut r = self.pow(a, (q + 1) / 2);
        while t != self.one() {
            let mut i = 0;
            let mut t2 = t.clone();
            while t2 != self.one() {
                t2 = self.mul(&t2, &t2);
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = self.mul(&b, &b);
            }
            m = i;
            c = self.mul(&b, &b);
            t = self.mul(&t, &c);
            r = self.mul(&r, &b);
        }
        r
    }

    /// Deterministic enumeration of all field elements (base-l counter on
    /// coefficients, constant digit fastest).
    pub fn iter_elems(&self) -> impl Iterator<Item = FieldElem> + '_ {
        let total = (self.l as u128).pow(self.k);
        (0..total).map(move |mut idx| {
            let mut c = vec![0u64; self.k as usize];
            for d in c.iter_mut() {
                *d = (idx % self.l as u128) as u64;
                idx /= self.l as u128;
            }
            FieldElem { c }
        })
    }
}

/// The r-th roots of unity with exact order tags, living in the smallest
/// supported extension of F_l that contains them (the given field if it
/// already does).
#[derive(Clone, Debug)]
pub struct RootsOfUnity {
    pub field: ExtField,
    /// (element, multiplicative order), sorted by coefficient tuple.
    pub roots: Vec<(FieldElem, u64)>,
}

/// Smallest k <= MAX_EXT_DEGREE with r | l^k - 1, i.e. the order of l mod r.
pub fn minimal_ext_degree(l: u64, r: u64) -> Result<u32> {
    if r == 0 || intutil::gcd(r, l) != 1 {
        return Err(Error::RNotCoprime { r, ell: l });
    }
    let mut pw: u64 = 1;
    for k in 1..=MAX_EXT_DEGREE {
        pw = intutil::mulmod(pw, l % r, r.max(1));
        if r == 1 || pw == 1 {
            return Ok(k.max(1));
        }
    }
    Err(Error::InsufficientFieldDegree {
        n: r,
        max: MAX_EXT_DEGREE,
    })
}

/// All x with x^r = 1. Escalates to the smallest supported extension when
/// the given field has no full set; errors if even degree 6 is not enough.
pub fn roots_of_unity(r: u64, field: &ExtField) -> Result<RootsOfUnity> {
    if r == 0 || intutil::gcd(r, field.l) != 1 {
        return Err(Error::RNotCoprime { r, ell: field.l });
    }
    let field = if field.q_minus_1 % r as u128 == 0 {
        field.clone()
    } else {
        let k = minimal_ext_degree(field.l, r)?;
        ext_field_build(field.l, k)?
    };
    let e = field.q_minus_1 / r as u128;
    // Find a generator of the order-r subgroup by a deterministic scan.
    let gen = field
        .iter_elems()
        .skip(1)
        .map(|z| field.pow(&z, e))
        .find(|y| field.mult_order(y).map(|o| o == r as u128).unwrap_or(false))
        .expect("cyclic group contains elements of every dividing order");
    let mut roots: Vec<(FieldElem, u64)> = (0..r)
        .map(|j| {
            let x = field.pow(&gen, j as u128);
            (x, r / intutil::gcd(j, r))
        })
        .collect();
    roots.sort();
    Ok(RootsOfUnity { field, roots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sqrt_pinned_values() {
        assert_eq!(fp_sqrt(4, 13), vec![2, 11]);
        assert_eq!(fp_sqrt(0, 7), vec![0]);
        assert_eq!(fp_sqrt(2, 5), Vec::<u64>::new());
    }

    #[test]
    fn residue_counts_small_primes() {
        // exactly (l-1)/2 nonzero squares mod l
        for l in first_odd_primes_to(101) {
            let squares: std::collections::BTreeSet<u64> =
                (1..l).map(|x| intutil::mulmod(x, x, l)).collect();
            assert_eq!(squares.len() as u64, (l - 1) / 2, "l={l}");
            for &a in &squares {
                let roots = fp_sqrt(a, l);
                assert_eq!(roots.len(), 2);
                for r in roots {
                    assert_eq!(intutil::mulmod(r, r, l), a);
                }
            }
        }
    }

    fn first_odd_primes_to(n: u64) -> Vec<u64> {
        (3..=n).filter(|&x| intutil::is_prime(x)).collect()
    }

    #[test]
    fn build_rejects_bad_inputs() {
        assert!(ext_field_build(9, 2).is_err());
        assert!(ext_field_build(2, 2).is_err());
        assert!(ext_field_build(5, 0).is_err());
        assert!(ext_field_build(5, 7).is_err());
    }

    #[test]
    fn build_known_moduli() {
        // k=1 collapses to the prime field with modulus x
        let f = ext_field_build(3, 1).unwrap();
        assert_eq!(f.modulus, vec![0, 1]);
        // first irreducible quadratics in the lex scan
        assert_eq!(ext_field_build(3, 2).unwrap().modulus, vec![1, 0, 1]); // x^2+1
        assert_eq!(ext_field_build(5, 2).unwrap().modulus, vec![2, 0, 1]); // x^2+2
        assert_eq!(ext_field_build(7, 2).unwrap().modulus, vec![1, 0, 1]); // x^2+1
    }

    #[test]
    fn build_is_irreducible_by_brute_force() {
        // no roots and no quadratic factors -> irreducible for deg <= 5;
        // checked against the exhaustive element scan for l=3, k=4
        let f = ext_field_build(3, 4).unwrap();
        let eval = |x: u64| -> u64 {
            f.modulus
                .iter()
                .rev()
                .fold(0u64, |acc, &c| (acc * x + c) % 3)
        };
        for x in 0..3 {
            assert_ne!(eval(x), 0);
        }
        // count elements: every nonzero elem satisfies Lagrange
        let total = f.iter_elems().count();
        assert_eq!(total, 81);
    }

    #[test]
    fn mult_order_pinned() {
        let f7 = ext_field_build(7, 1).unwrap();
        assert_eq!(f7.mult_order(&f7.embed(1)).unwrap(), 1);
        assert_eq!(f7.mult_order(&f7.embed(2)).unwrap(), 3);
        assert_eq!(f7.mult_order(&f7.embed(3)).unwrap(), 6);
        assert!(f7.mult_order(&f7.zero()).is_err());
    }

    #[test]
    fn mult_order_divides_and_is_minimal() {
        let f = ext_field_build(5, 2).unwrap();
        for a in f.iter_elems().skip(1) {
            let ord = f.mult_order(&a).unwrap();
            assert_eq!(f.q_minus_1() % ord, 0);
            assert_eq!(f.pow(&a, ord), f.one());
            for (p, _) in intutil::factorize(ord as u64) {
                assert_ne!(f.pow(&a, ord / p as u128), f.one());
            }
        }
    }

    #[test]
    fn roots_of_unity_pinned() {
        let f7 = ext_field_build(7, 1).unwrap();
        let r1 = roots_of_unity(1, &f7).unwrap();
        assert_eq!(r1.roots.len(), 1);
        assert_eq!(r1.roots[0].0, r1.field.one());

        let r3 = roots_of_unity(3, &f7).unwrap();
        let vals: Vec<u64> = r3.roots.iter().map(|(x, _)| x.c[0]).collect();
        assert_eq!(vals, vec![1, 2, 4]);
        assert_eq!(r3.field.k, 1);

        // 5 | 3^4 - 1, needs the full degree-4 extension over F_3
        let f3 = ext_field_build(3, 1).unwrap();
        let r5 = roots_of_unity(5, &f3).unwrap();
        assert_eq!(r5.field.k, 4);
        assert_eq!(r5.roots.len(), 5);
        for (x, ord) in &r5.roots {
            assert_eq!(r5.field.pow(x, 5), r5.field.one());
            assert_eq!(r5.field.mult_order(x).unwrap(), *ord as u128);
        }

        // no degree <= 6 contains 9th roots over F_3 (9 shares the factor 3)
        assert!(roots_of_unity(9, &f3).is_err());
        // 11th roots over F_3: ord_11(3) = 5
        let r11 = roots_of_unity(11, &f3).unwrap();
        assert_eq!(r11.field.k, 5);
        assert_eq!(r11.roots.len(), 11);
    }

    #[test]
    fn roots_closed_under_group_ops() {
        let f = ext_field_build(7, 1).unwrap();
        let rs = roots_of_unity(6, &f).unwrap();
        let set: std::collections::BTreeSet<FieldElem> =
            rs.roots.iter().map(|(x, _)| x.clone()).collect();
        for (x, _) in &rs.roots {
            let inv = rs.field.inv(x).unwrap();
            assert!(set.contains(&inv));
            for (y, _) in &rs.roots {
                assert!(set.contains(&rs.field.mul(x, y)));
            }
        }
    }

    #[test]
    fn radical_handles_char_p_powers() {
        // (T-1)^4 over F_3
        assert_eq!(poly_radical(&[1, 2, 0, 2, 1], 3), vec![2, 1]);
        // (T^2+T+2)^3 = T^6+T^3+2 over F_3: derivative vanishes
        assert_eq!(poly_radical(&[2, 0, 0, 1, 0, 0, 1], 3), vec![2, 1, 1]);
        // squarefree input is returned monic and unchanged
        assert_eq!(poly_radical(&[2, 0, 2], 5), vec![1, 0, 1]);
        // (T-2)^2 (T-4)^2 over F_7 -> (T-2)(T-4) = T^2 + T + 1
        let sq = poly_mul(&[5, 1], &[3, 1], 7); // (T+5)(T+3)
        let f = poly_mul(&sq, &sq, 7);
        assert_eq!(poly_radical(&f, 7), sq);
    }

    #[test]
    fn ext_sqrt_roundtrip() {
        let f = ext_field_build(5, 2).unwrap();
        let mut squares = 0;
        for a in f.iter_elems() {
            let roots = f.sqrt(&a);
            for r in &roots {
                assert_eq!(f.mul(r, r), a);
            }
            if !roots.is_empty() && !f.is_zero(&a) {
                squares += 1;
            }
        }
        assert_eq!(squares, 12); // (25 - 1) / 2
    }

    proptest! {
        #[test]
        fn lagrange_and_sqrt_roundtrip(seed in 0u64..10_000) {
            // x^(l^k - 1) = 1 for nonzero x, and fp_sqrt roots square back
            let l = 13u64;
            let f = ext_field_build(l, 2).unwrap();
            let idx = 1 + (seed as u128 % (f.q_minus_1()));
            let x = f.iter_elems().nth(idx as usize).unwrap();
            prop_assert_eq!(f.pow(&x, f.q_minus_1()), f.one());

            let a = seed % l;
            for r in fp_sqrt(a, l) {
                prop_assert_eq!(intutil::mulmod(r, r, l), a % l);
            }
        }
    }
}
