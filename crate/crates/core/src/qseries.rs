//! Truncated one-variable series with exponents in (1/24)Z and exact
//! rational coefficients.
//!
//! Exponents are stored as integers scaled by 24 (so `3` means q^{1/8}).
//! Truncation is explicit metadata: coefficients at exponents >= the cutoff
//! are undefined, and querying them is an error.

use crate::error::{Error, Result};
use crate::{qi, Q};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Sparse truncated series in one formal variable with exponents in (1/24)Z.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    /// Exponent (scaled by 24) -> nonzero coefficient.
    terms: BTreeMap<i64, Q>,
    /// Exclusive cutoff, scaled by 24.
    trunc24: i64,
}

impl QSeries {
    /// The zero series, defined up to (not including) `trunc24`/24.
    pub fn zero(trunc24: i64) -> Self {
        QSeries { terms: BTreeMap::new(), trunc24 }
    }

    /// The constant 1 with the given truncation.
    pub fn one(trunc24: i64) -> Self {
        Self::monomial(0, qi(1), trunc24)
    }

    /// c * q^{e24/24}.
    pub fn monomial(e24: i64, c: Q, trunc24: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() && e24 < trunc24 {
            terms.insert(e24, c);
        }
        QSeries { terms, trunc24 }
    }

    pub fn trunc24(&self) -> i64 {
        self.trunc24
    }

    pub fn terms(&self) -> &BTreeMap<i64, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest stored exponent, or the truncation bound for the zero series
    /// (the best lower bound we can certify).
    pub fn lead24(&self) -> i64 {
        self.terms.keys().next().copied().unwrap_or(self.trunc24)
    }

    /// Exact coefficient at exponent `e24`/24; errors at/above truncation.
    pub fn coeff24(&self, e24: i64) -> Result<Q> {
        if e24 >= self.trunc24 {
            return Err(Error::OutOfTruncation { at: e24, trunc: self.trunc24 });
        }
        Ok(self.terms.get(&e24).cloned().unwrap_or_else(Q::zero))
    }

    /// Coefficient at the integer exponent `n`.
    pub fn coeff_int(&self, n: i64) -> Result<Q> {
        self.coeff24(24 * n)
    }

    /// Drop all terms at or above `trunc24` and lower the cutoff.
    pub fn truncate(&self, trunc24: i64) -> QSeries {
        let cut = self.trunc24.min(trunc24);
        QSeries {
            terms: self.terms.range(..cut).map(|(k, v)| (*k, v.clone())).collect(),
            trunc24: cut,
        }
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let trunc24 = self.trunc24.min(other.trunc24);
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(*e).or_insert_with(Q::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        terms.retain(|e, _| *e < trunc24);
        QSeries { terms, trunc24 }
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
            trunc24: self.trunc24,
        }
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, c: &Q) -> QSeries {
        if c.is_zero() {
            return QSeries::zero(self.trunc24);
        }
        QSeries {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
            trunc24: self.trunc24,
        }
    }

    /// Product, with truncation min(T_a + lead_b, T_b + lead_a).
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let trunc24 = (self.trunc24 + other.lead24()).min(other.trunc24 + self.lead24());
        let mut terms: BTreeMap<i64, Q> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if e >= trunc24 {
                    continue;
                }
                let entry = terms.entry(e).or_insert_with(Q::zero);
                *entry += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        QSeries { terms, trunc24 }
    }

    /// Integer power by repeated squaring (k >= 0).
    pub fn pow(&self, k: u32) -> QSeries {
        let mut acc = QSeries::one(i64::MAX);
        let mut base = self.clone();
        let mut k = k;
        if k == 0 {
            return QSeries::one(self.trunc24);
        }
        while k > 0 {
            if k & 1 == 1 {
                acc = if acc.trunc24 == i64::MAX { base.clone() } else { acc.mul(&base) };
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplicative inverse. The leading exponent negates; the guaranteed
    /// truncation of the result is T - 2*lead.
    pub fn inverse(&self) -> Result<QSeries> {
        let (&e0, c0) = self.terms.iter().next().ok_or(Error::ZeroSeries)?;
        // Normalize to u = (self / (c0 q^{e0})) - 1, supported on (0, T - e0).
        let span = self.trunc24 - e0;
        let mut u: BTreeMap<i64, Q> = BTreeMap::new();
        for (e, c) in &self.terms {
            if *e > e0 {
                u.insert(e - e0, c / c0);
            }
        }
        // Invert 1 + u by the convolution recurrence, exponent by exponent.
        let mut inv: BTreeMap<i64, Q> = BTreeMap::new();
        inv.insert(0, qi(1));
        for e in 1..span {
            let mut val = Q::zero();
            for (j, cj) in u.range(1..=e) {
                if let Some(b) = inv.get(&(e - j)) {
                    val += cj * b;
                }
            }
            if !val.is_zero() {
                inv.insert(e, -val);
            }
        }
        let c0_inv = qi(1) / c0;
        Ok(QSeries {
            terms: inv.into_iter().map(|(e, c)| (e - e0, c * &c0_inv)).collect(),
            trunc24: self.trunc24 - 2 * e0,
        })
    }

    /// True iff every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Serialize as sorted (exp_num, exp_den, coeff_num, coeff_den) records.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("qseries trunc24={}\n", self.trunc24));
        for (e, c) in &self.terms {
            let g = num_integer::gcd(*e, 24);
            out.push_str(&format!("{} {} {} {}\n", e / g, 24 / g, c.numer(), c.denom()));
        }
        out
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 + O(q^({}/24))", self.trunc24);
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if e % 24 == 0 {
                write!(f, "({})q^{}", c, e / 24)?;
            } else {
                write!(f, "({})q^({}/24)", c, e)?;
            }
        }
        write!(f, " + O(q^({}/24))", self.trunc24)
    }
}

/// Sum of divisors of k.
pub fn sigma1(k: u64) -> u64 {
    sigma_pow(k, 1)
}

/// Sum of d^p over divisors d of k.
pub fn sigma_pow(k: u64, p: u32) -> u64 {
    assert!(k >= 1);
    let mut s = 0u64;
    let mut d = 1;
    while d * d <= k {
        if k % d == 0 {
            s += d.pow(p);
            let e = k / d;
            if e != d {
                s += e.pow(p);
            }
        }
        d += 1;
    }
    s
}

/// Dedekind eta q^{1/24} prod (1-q^n), with integer q-powers guaranteed up
/// to (not including) q^order beyond the leading q^{1/24}.
pub fn eta(order: u32) -> QSeries {
    let order = order as i64;
    let trunc = 24 * order + 1;
    let mut acc = QSeries::monomial(1, qi(1), trunc);
    for n in 1..=order {
        let f = QSeries::one(trunc)
            .add(&QSeries::monomial(24 * n, qi(-1), trunc));
        acc = acc.mul(&f).truncate(trunc);
    }
    acc
}

/// Eisenstein series E4 = 1 + 240 sum sigma_3(n) q^n, up to q^order exclusive.
pub fn e4(order: u32) -> QSeries {
    eisenstein(order, 3, 240)
}

/// Eisenstein series E6 = 1 - 504 sum sigma_5(n) q^n, up to q^order exclusive.
pub fn e6(order: u32) -> QSeries {
    eisenstein(order, 5, -504)
}

fn eisenstein(order: u32, p: u32, scale: i64) -> QSeries {
    let trunc = 24 * order as i64;
    let mut s = QSeries::one(trunc);
    for n in 1..order as i64 {
        let c = qi(scale) * Q::from_integer(BigInt::from(sigma_pow(n as u64, p)));
        s = s.add(&QSeries::monomial(24 * n, c, trunc));
    }
    s
}

/// Discriminant cusp form Delta = eta^24, up to q^order exclusive.
pub fn delta(order: u32) -> QSeries {
    eta(order).pow(24).truncate(24 * order as i64)
}

/// True iff all coefficients are integers with absolute value below the bound.
pub fn coeffs_bounded(s: &QSeries, bound: u64) -> bool {
    s.terms.values().all(|c| c.is_integer() && c.numer().abs() <= BigInt::from(bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qr;

    #[test]
    fn difference_of_squares() {
        let t = 240;
        let a = QSeries::one(t).add(&QSeries::monomial(24, qi(1), t));
        let b = QSeries::one(t).add(&QSeries::monomial(24, qi(-1), t));
        let p = a.mul(&b);
        assert_eq!(p.coeff_int(0).unwrap(), qi(1));
        assert_eq!(p.coeff_int(1).unwrap(), qi(0));
        assert_eq!(p.coeff_int(2).unwrap(), qi(-1));
    }

    #[test]
    fn mul_by_zero() {
        let t = 240;
        let a = QSeries::one(t).add(&QSeries::monomial(24, qi(7), t));
        let z = QSeries::zero(t);
        assert!(a.mul(&z).is_zero());
    }

    /// Euler pentagonal-number oracle: eta/q^{1/24} = sum (-1)^k q^{k(3k-1)/2}.
    #[test]
    fn eta_pentagonal_oracle() {
        let order = 40u32;
        let e = eta(order);
        let mut expected: BTreeMap<i64, i64> = BTreeMap::new();
        for k in -20i64..=20 {
            let ex = k * (3 * k - 1) / 2;
            if ex < order as i64 {
                expected.insert(24 * ex + 1, if k % 2 == 0 { 1 } else { -1 });
            }
        }
        for n24 in 0..e.trunc24() {
            let c = e.coeff24(n24).unwrap();
            let want = qi(expected.get(&n24).copied().unwrap_or(0));
            assert_eq!(c, want, "eta mismatch at exponent {n24}/24");
        }
    }

    #[test]
    fn eisenstein_low_coeffs() {
        let f4 = e4(10);
        assert_eq!(f4.coeff_int(0).unwrap(), qi(1));
        assert_eq!(f4.coeff_int(1).unwrap(), qi(240));
        assert_eq!(f4.coeff_int(2).unwrap(), qi(2160));
        let f6 = e6(10);
        assert_eq!(f6.coeff_int(1).unwrap(), qi(-504));
        assert_eq!(f6.coeff_int(2).unwrap(), qi(-16632));
    }

    #[test]
    fn delta_low_coeffs() {
        let d = delta(6);
        assert_eq!(d.coeff_int(0).unwrap(), qi(0));
        assert_eq!(d.coeff_int(1).unwrap(), qi(1));
        assert_eq!(d.coeff_int(2).unwrap(), qi(-24));
        assert_eq!(d.coeff_int(3).unwrap(), qi(252));
        assert_eq!(d.coeff_int(4).unwrap(), qi(-1472));
    }

    #[test]
    fn identities_to_q50() {
        let order = 51u32;
        let lhs = e4(order).pow(3).sub(&e6(order).pow(2));
        let d = delta(order);
        let rhs = d.scalar_mul(&qi(1728));
        for n in 0..=50 {
            assert_eq!(lhs.coeff_int(n).unwrap(), rhs.coeff_int(n).unwrap(), "q^{n}");
        }
    }

    #[test]
    fn inverse_examples() {
        let t = 240;
        // geometric series
        let a = QSeries::one(t).add(&QSeries::monomial(24, qi(-1), t));
        let inv = a.inverse().unwrap();
        for n in 0..9 {
            assert_eq!(inv.coeff_int(n).unwrap(), qi(1));
        }
        // monomial
        let m = QSeries::monomial(1, qi(1), t);
        let minv = m.inverse().unwrap();
        assert_eq!(minv.lead24(), -1);
        // delta
        let dinv = delta(8).inverse().unwrap();
        assert_eq!(dinv.lead24(), -24);
        assert_eq!(dinv.coeff_int(-1).unwrap(), qi(1));
        assert_eq!(dinv.coeff_int(0).unwrap(), qi(24));
        // roundtrip
        let prod = delta(8).mul(&dinv);
        for n in 0..5 {
            assert_eq!(prod.coeff_int(n).unwrap(), qi(if n == 0 { 1 } else { 0 }));
        }
    }

    #[test]
    fn zero_series_inverse_errors() {
        assert!(matches!(QSeries::zero(24).inverse(), Err(Error::ZeroSeries)));
    }

    #[test]
    fn truncation_query_errors() {
        let a = QSeries::one(24);
        assert!(matches!(a.coeff_int(1), Err(Error::OutOfTruncation { .. })));
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma1(1), 1);
        assert_eq!(sigma1(6), 12);
        assert_eq!(sigma1(7), 8);
        assert_eq!(sigma_pow(4, 3), 1 + 8 + 64);
    }

    #[test]
    fn scalar_and_rational_coeffs() {
        let a = QSeries::monomial(0, qr(1, 3), 240);
        let b = a.scalar_mul(&qi(3));
        assert_eq!(b.coeff_int(0).unwrap(), qi(1));
    }
}
