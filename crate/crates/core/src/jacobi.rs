//! Two-variable Fourier expansions of weak / nearly holomorphic Jacobi forms
//! and the generator forms used by the tabulated basis recipes.
//!
//! Exponents are stored scaled: `n24` is 24 times the q-exponent, `l2` is
//! twice the r-exponent, and `weight2`/`index2` are doubled so half-integer
//! objects (the odd theta function and eta quotients) fit the same type.
//! Forms are exact in l at every computed q-exponent; only the q-direction
//! is truncated.

use crate::error::{Error, Result};
use crate::lattice::NormClass;
use crate::linalg::solve_unique;
use crate::qseries::{self, QSeries};
use crate::{qi, Q};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

/// Sparse two-variable Fourier expansion sum f(n,l) q^n r^l.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiFourier {
    /// Doubled weight.
    pub weight2: i64,
    /// Doubled index.
    pub index2: i64,
    /// (n24, l2) -> nonzero coefficient.
    terms: BTreeMap<(i64, i64), Q>,
    /// Exclusive q-cutoff, scaled by 24.
    q_trunc24: i64,
}

impl JacobiFourier {
    pub fn zero(weight2: i64, index2: i64, q_trunc24: i64) -> Self {
        JacobiFourier { weight2, index2, terms: BTreeMap::new(), q_trunc24 }
    }

    pub fn from_terms(
        weight2: i64,
        index2: i64,
        q_trunc24: i64,
        terms: BTreeMap<(i64, i64), Q>,
    ) -> Self {
        let mut terms = terms;
        terms.retain(|(n24, _), c| *n24 < q_trunc24 && !c.is_zero());
        JacobiFourier { weight2, index2, terms, q_trunc24 }
    }

    pub fn terms(&self) -> &BTreeMap<(i64, i64), Q> {
        &self.terms
    }

    pub fn q_trunc24(&self) -> i64 {
        self.q_trunc24
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest q-exponent with a stored term, or the cutoff if none.
    pub fn q_lead24(&self) -> i64 {
        self.terms.keys().map(|(n24, _)| *n24).min().unwrap_or(self.q_trunc24)
    }

    /// Exact coefficient at (n24/24, l2/2); errors at/above the q-cutoff.
    pub fn coeff24(&self, n24: i64, l2: i64) -> Result<Q> {
        if n24 >= self.q_trunc24 {
            return Err(Error::OutOfTruncation { at: n24, trunc: self.q_trunc24 });
        }
        Ok(self.terms.get(&(n24, l2)).cloned().unwrap_or_else(Q::zero))
    }

    /// Coefficient at integer exponents (n, l).
    pub fn coeff_int(&self, n: i64, l: i64) -> Result<Q> {
        self.coeff24(24 * n, 2 * l)
    }

    /// The q^0 part as a map l2 -> coefficient.
    pub fn q0_part(&self) -> Result<BTreeMap<i64, Q>> {
        if self.q_trunc24 <= 0 {
            return Err(Error::OutOfTruncation { at: 0, trunc: self.q_trunc24 });
        }
        Ok(self
            .terms
            .range((0, i64::MIN)..=(0, i64::MAX))
            .map(|((_, l2), c)| (*l2, c.clone()))
            .collect())
    }

    /// Signed norm 4tn - l^2 of an integer position, for integer index t.
    pub fn norm_of(&self, n: i64, l: i64) -> i64 {
        debug_assert_eq!(self.index2 % 2, 0);
        let t = self.index2 / 2;
        4 * t * n - l * l
    }

    pub fn truncate(&self, q_trunc24: i64) -> JacobiFourier {
        let cut = self.q_trunc24.min(q_trunc24);
        JacobiFourier {
            weight2: self.weight2,
            index2: self.index2,
            terms: self
                .terms
                .iter()
                .filter(|((n24, _), _)| *n24 < cut)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
            q_trunc24: cut,
        }
    }

    pub fn add(&self, other: &JacobiFourier) -> Result<JacobiFourier> {
        if self.index2 != other.index2 {
            return Err(Error::IndexMismatch { a: self.index2, b: other.index2 });
        }
        if self.weight2 != other.weight2 {
            return Err(Error::WeightMismatch { a: self.weight2, b: other.weight2 });
        }
        let q_trunc24 = self.q_trunc24.min(other.q_trunc24);
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            let e = terms.entry(*k).or_insert_with(Q::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(k);
            }
        }
        terms.retain(|(n24, _), _| *n24 < q_trunc24);
        Ok(JacobiFourier { weight2: self.weight2, index2: self.index2, terms, q_trunc24 })
    }

    pub fn neg(&self) -> JacobiFourier {
        JacobiFourier {
            weight2: self.weight2,
            index2: self.index2,
            terms: self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect(),
            q_trunc24: self.q_trunc24,
        }
    }

    pub fn sub(&self, other: &JacobiFourier) -> Result<JacobiFourier> {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, c: &Q) -> JacobiFourier {
        if c.is_zero() {
            return JacobiFourier::zero(self.weight2, self.index2, self.q_trunc24);
        }
        JacobiFourier {
            weight2: self.weight2,
            index2: self.index2,
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
            q_trunc24: self.q_trunc24,
        }
    }

    /// Product: weights and indices add; q-truncation follows the leading
    /// q-exponents as for one-variable series.
    pub fn mul(&self, other: &JacobiFourier) -> JacobiFourier {
        let q_trunc24 = (self.q_trunc24 + other.q_lead24())
            .min(other.q_trunc24 + self.q_lead24());
        let mut terms: BTreeMap<(i64, i64), Q> = BTreeMap::new();
        for ((na, la), ca) in &self.terms {
            for ((nb, lb), cb) in &other.terms {
                let n = na + nb;
                if n >= q_trunc24 {
                    continue;
                }
                let e = terms.entry((n, la + lb)).or_insert_with(Q::zero);
                *e += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        JacobiFourier {
            weight2: self.weight2 + other.weight2,
            index2: self.index2 + other.index2,
            terms,
            q_trunc24,
        }
    }

    pub fn pow(&self, k: u32) -> JacobiFourier {
        if k == 0 {
            let mut one = JacobiFourier::zero(0, 0, self.q_trunc24);
            one.terms.insert((0, 0), qi(1));
            return one;
        }
        let mut acc: Option<JacobiFourier> = None;
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc.unwrap()
    }

    /// Multiply by a one-variable series (index 0); `weight2_shift` is the
    /// doubled weight carried by the series.
    pub fn mul_qseries(&self, s: &QSeries, weight2_shift: i64) -> JacobiFourier {
        let q_trunc24 = (self.q_trunc24 + s.lead24())
            .min(s.trunc24() + self.q_lead24());
        let mut terms: BTreeMap<(i64, i64), Q> = BTreeMap::new();
        for ((na, la), ca) in &self.terms {
            for (eb, cb) in s.terms() {
                let n = na + eb;
                if n >= q_trunc24 {
                    continue;
                }
                let e = terms.entry((n, *la)).or_insert_with(Q::zero);
                *e += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        JacobiFourier {
            weight2: self.weight2 + weight2_shift,
            index2: self.index2,
            terms,
            q_trunc24,
        }
    }

    /// Divide by Delta^N (weight drops by 12N; q-support may become negative).
    pub fn div_by_power_of_delta(&self, n: u32) -> Result<JacobiFourier> {
        // Build Delta a little beyond our own cutoff so no precision is lost
        // beyond the inherent shift by N leading q-powers.
        let order = (self.q_trunc24 / 24 + 2 * n as i64 + 2).max(2) as u32;
        let dinv = qseries::delta(order).inverse()?.pow(n);
        Ok(self.mul_qseries(&dinv, -24 * n as i64))
    }

    /// Substitute z -> s z, i.e. l -> s l; index multiplies by s^2.
    pub fn rescale_elliptic(&self, s: i64) -> JacobiFourier {
        JacobiFourier {
            weight2: self.weight2,
            index2: self.index2 * s * s,
            terms: self.terms.iter().map(|((n, l), c)| ((*n, l * s), c.clone())).collect(),
            q_trunc24: self.q_trunc24,
        }
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Integer index and integer exponent lattice.
    pub fn is_integer_lattice(&self) -> bool {
        self.index2 % 2 == 0
            && self.weight2 % 2 == 0
            && self.terms.keys().all(|(n24, l2)| n24 % 24 == 0 && l2 % 2 == 0)
    }

    /// Most negative norm 4tn - l^2 over nonzero terms, if any.
    pub fn min_norm(&self) -> Option<i64> {
        debug_assert!(self.is_integer_lattice());
        self.terms
            .keys()
            .map(|(n24, l2)| self.norm_of(n24 / 24, l2 / 2))
            .min()
    }

    /// Check f(n,l) = f(n,-l) over the whole box; returns first violation.
    pub fn check_evenness(&self) -> Option<(i64, i64)> {
        for ((n24, l2), c) in &self.terms {
            let mirror = self.terms.get(&(*n24, -l2)).cloned().unwrap_or_else(Q::zero);
            if &mirror != c {
                return Some((*n24, *l2));
            }
        }
        None
    }

    /// Check norm invariance: f(n,l) depends only on (4tn - l^2, +-l mod 2t).
    /// Integer-lattice forms only; returns the first violating pair.
    pub fn check_norm_invariance(&self) -> Option<((i64, i64), (i64, i64))> {
        debug_assert!(self.is_integer_lattice());
        let t = self.index2 / 2;
        let mut by_class: BTreeMap<(i64, i64), ((i64, i64), Q)> = BTreeMap::new();
        // Include implicit zeros: walk the full box of positions with
        // |l| up to the largest stored |l| at each n.
        let mut max_abs_l2 = 0;
        for (_, l2) in self.terms.keys() {
            max_abs_l2 = max_abs_l2.max(l2.abs());
        }
        let mut n24 = self.q_lead24();
        while n24 < self.q_trunc24 {
            let n = n24 / 24;
            let mut l2 = -max_abs_l2;
            while l2 <= max_abs_l2 {
                let l = l2 / 2;
                let norm = 4 * t * n - l * l;
                let cls = NormClass::new(t, -norm, l);
                let c = self.terms.get(&(n24, l2)).cloned().unwrap_or_else(Q::zero);
                match by_class.entry((cls.d, cls.l_residue)) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(((n24, l2), c));
                    }
                    std::collections::btree_map::Entry::Occupied(e) => {
                        if e.get().1 != c {
                            return Some((e.get().0, (n24, l2)));
                        }
                    }
                }
                l2 += 2;
            }
            n24 += 24;
        }
        None
    }

    /// Coefficient lookup by equivalence class, for positions beyond the
    /// q-cutoff with negative norm: every negative-norm class of an index-t
    /// form has a representative with n <= t/4, so a cutoff beyond t/4
    /// certifies the lookup. Positions inside the box are read directly.
    pub fn coeff_by_class(&self, n: i64, l: i64) -> Result<Q> {
        debug_assert!(self.is_integer_lattice());
        if 24 * n < self.q_trunc24 {
            return self.coeff24(24 * n, 2 * l);
        }
        let t = self.index2 / 2;
        let norm = 4 * t * n - l * l;
        if norm >= 0 {
            return Err(Error::InsufficientTruncation(format!(
                "coefficient at (n,l)=({n},{l}) has norm {norm} >= 0 beyond the q-cutoff"
            )));
        }
        if self.q_trunc24 <= 24 * (t / 4) {
            return Err(Error::InsufficientTruncation(format!(
                "q-cutoff {} does not certify negative-norm classes for index {t}",
                self.q_trunc24
            )));
        }
        let cls = NormClass::new(t, -norm, l);
        // Scan the box for a representative of the same class.
        for ((n24, l2), c) in &self.terms {
            if n24 % 24 != 0 || l2 % 2 != 0 {
                continue;
            }
            let (bn, bl) = (n24 / 24, l2 / 2);
            let bnorm = 4 * t * bn - bl * bl;
            if bnorm == norm && NormClass::new(t, -bnorm, bl) == cls {
                return Ok(c.clone());
            }
        }
        // No nonzero representative in a certifying box: the class is empty.
        Ok(Q::zero())
    }

    /// Serialize: header (weight, index, cutoff) plus sorted records.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "jacobi weight2={} index2={} q_trunc24={}\n",
            self.weight2, self.index2, self.q_trunc24
        ));
        for ((n24, l2), c) in &self.terms {
            let gn = num_integer::gcd(*n24, 24);
            let gl = num_integer::gcd(*l2, 2);
            out.push_str(&format!(
                "{} {} {} {} {} {}\n",
                n24 / gn,
                24 / gn,
                l2 / gl,
                2 / gl,
                c.numer(),
                c.denom()
            ));
        }
        out
    }

    /// Parse the `to_records` format.
    pub fn from_records(text: &str) -> Result<JacobiFourier> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::SchemaError {
            location: "line 1".into(),
            message: "empty serialization".into(),
        })?;
        let mut weight2 = None;
        let mut index2 = None;
        let mut q_trunc24 = None;
        for tok in header.split_whitespace() {
            if let Some(v) = tok.strip_prefix("weight2=") {
                weight2 = v.parse::<i64>().ok();
            } else if let Some(v) = tok.strip_prefix("index2=") {
                index2 = v.parse::<i64>().ok();
            } else if let Some(v) = tok.strip_prefix("q_trunc24=") {
                q_trunc24 = v.parse::<i64>().ok();
            }
        }
        let (weight2, index2, q_trunc24) = match (weight2, index2, q_trunc24) {
            (Some(w), Some(i), Some(q)) => (w, i, q),
            _ => {
                return Err(Error::SchemaError {
                    location: "header".into(),
                    message: format!("bad header: {header}"),
                })
            }
        };
        let mut terms = BTreeMap::new();
        for (i, line) in lines.enumerate() {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 6 {
                return Err(Error::SchemaError {
                    location: format!("record {}", i + 1),
                    message: format!("expected 6 fields, got {}", f.len()),
                });
            }
            let p = |s: &str| -> Result<i64> {
                s.parse::<i64>().map_err(|_| Error::SchemaError {
                    location: format!("record {}", i + 1),
                    message: format!("bad integer {s}"),
                })
            };
            let (nn, nd, ln, ld) = (p(f[0])?, p(f[1])?, p(f[2])?, p(f[3])?);
            if 24 % nd != 0 || 2 % ld != 0 {
                return Err(Error::SchemaError {
                    location: format!("record {}", i + 1),
                    message: "exponent denominators must divide 24 and 2".into(),
                });
            }
            let c = Q::new(
                p(f[4])?.into(),
                p(f[5])?.into(),
            );
            terms.insert((nn * (24 / nd), ln * (2 / ld)), c);
        }
        Ok(JacobiFourier::from_terms(weight2, index2, q_trunc24, terms))
    }
}

impl fmt::Display for JacobiFourier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "JacobiFourier(weight2 {}, index2 {}, {} terms, q_trunc24 {})",
            self.weight2,
            self.index2,
            self.terms.len(),
            self.q_trunc24
        )
    }
}

/// The odd Jacobi theta function via the triple product
/// q^{1/8}(r^{1/2}-r^{-1/2}) prod (1-q^n r)(1-q^n r^{-1})(1-q^n);
/// weight 1/2, index 1/2.
pub fn theta_odd(q_order: u32) -> JacobiFourier {
    let trunc = 24 * q_order as i64;
    let mut acc = JacobiFourier::zero(1, 1, trunc + 3);
    // q^{1/8} r^{1/2} - q^{1/8} r^{-1/2}
    acc.terms.insert((3, 1), qi(1));
    acc.terms.insert((3, -1), qi(-1));
    for n in 1..=q_order as i64 {
        for l2 in [2i64, -2, 0] {
            let mut f = JacobiFourier::zero(0, 0, trunc + 3);
            f.terms.insert((0, 0), qi(1));
            f.terms.insert((24 * n, l2), qi(-1));
            acc = acc.mul(&f).truncate(trunc + 3);
        }
    }
    acc
}

/// Even theta constituents: theta_2, theta_3, theta_4 as two-variable
/// expansions (weight 1/2, index 1/2), by their product formulas.
fn theta_even(which: u8, q_order: u32) -> JacobiFourier {
    let trunc = 24 * q_order as i64 + 4;
    let mut acc = JacobiFourier::zero(1, 1, trunc);
    match which {
        2 => {
            // q^{1/8}(r^{1/2}+r^{-1/2}) prod (1-q^n)(1+q^n r)(1+q^n r^{-1})
            acc.terms.insert((3, 1), qi(1));
            acc.terms.insert((3, -1), qi(1));
            for n in 1..=q_order as i64 {
                for (l2, sign) in [(0i64, -1i64), (2, 1), (-2, 1)] {
                    let mut f = JacobiFourier::zero(0, 0, trunc);
                    f.terms.insert((0, 0), qi(1));
                    f.terms.insert((24 * n, l2), qi(sign));
                    acc = acc.mul(&f).truncate(trunc);
                }
            }
        }
        3 | 4 => {
            // prod (1-q^n)(1 +- q^{n-1/2} r)(1 +- q^{n-1/2} r^{-1})
            let sign = if which == 3 { 1i64 } else { -1 };
            acc.terms.insert((0, 0), qi(1));
            for n in 1..=(q_order as i64 + 1) {
                let mut f0 = JacobiFourier::zero(0, 0, trunc);
                f0.terms.insert((0, 0), qi(1));
                f0.terms.insert((24 * n, 0), qi(-1));
                acc = acc.mul(&f0).truncate(trunc);
                for l2 in [2i64, -2] {
                    let mut f = JacobiFourier::zero(0, 0, trunc);
                    f.terms.insert((0, 0), qi(1));
                    f.terms.insert((24 * n - 12, l2), qi(sign));
                    acc = acc.mul(&f).truncate(trunc);
                }
            }
        }
        _ => unreachable!(),
    }
    acc
}

/// Specialize z -> 0: collapse the l-direction by summing coefficients.
fn specialize_z0(a: &JacobiFourier) -> QSeries {
    let mut s = QSeries::zero(a.q_trunc24);
    for ((n24, _), c) in &a.terms {
        s = s.add(&QSeries::monomial(*n24, c.clone(), a.q_trunc24));
    }
    s
}

/// The generator forms of the weak Jacobi ring plus the one-variable series
/// they are built from, all at a common working q-order.
pub struct JacobiRing {
    pub q_order: u32,
    pub e4: QSeries,
    pub e6: QSeries,
    pub delta: QSeries,
    /// Weight -2, index 1: (theta/eta^3)^2.
    pub phi_m2_1: JacobiFourier,
    /// Weight 0, indices 1..4.
    pub phi_0: [JacobiFourier; 4],
    /// Weight 4, indices 1..3.
    pub e4_jac: [JacobiFourier; 3],
}

impl JacobiRing {
    /// Build all generators with integer q-powers guaranteed up to (not
    /// including) q^q_order.
    pub fn new(q_order: u32) -> Result<JacobiRing> {
        // Work a couple of orders higher internally so that recipe-level
        // divisions by Delta still cover the requested window.
        let w = q_order + 2;
        let trunc = 24 * w as i64;
        let e4 = qseries::e4(w);
        let e6 = qseries::e6(w);
        let delta = qseries::delta(w);

        // phi_{-2,1} = theta^2 / eta^6.
        let theta = theta_odd(w + 1);
        let eta6_inv = qseries::eta(w + 1).pow(6).inverse()?;
        let phi_m2_1 = theta
            .pow(2)
            .mul_qseries(&eta6_inv, -6)
            .truncate(trunc);
        if phi_m2_1.weight2 != -4 || phi_m2_1.index2 != 2 {
            return Err(Error::ConstructionFailed("phi_{-2,1} bookkeeping".into()));
        }

        // phi_{0,1} = 4(xi_2^2 + xi_3^2 + xi_4^2) with xi_i = theta_i(z)/theta_i(0).
        let mut phi_0_1: Option<JacobiFourier> = None;
        for which in [2u8, 3, 4] {
            let th = theta_even(which, w + 1);
            let inv0 = specialize_z0(&th).inverse()?;
            let xi2 = th.pow(2).mul_qseries(&inv0.pow(2), -2).truncate(trunc);
            phi_0_1 = Some(match phi_0_1 {
                None => xi2,
                Some(a) => a.add(&xi2)?,
            });
        }
        let phi_0_1 = phi_0_1.unwrap().scalar_mul(&qi(4));
        check_q0_contract(&phi_0_1, 10)?;

        let mut ring = JacobiRing {
            q_order,
            e4,
            e6,
            delta,
            phi_m2_1,
            phi_0: [
                phi_0_1,
                JacobiFourier::zero(0, 0, 0),
                JacobiFourier::zero(0, 0, 0),
                JacobiFourier::zero(0, 0, 0),
            ],
            e4_jac: [
                JacobiFourier::zero(0, 0, 0),
                JacobiFourier::zero(0, 0, 0),
                JacobiFourier::zero(0, 0, 0),
            ],
        };

        // Remaining weight-0 generators by solving the q^0 contract in the
        // free weak-Jacobi span of the two index-1 generators.
        for (idx, center) in [(2i64, 4i64), (3, 2), (4, 1)] {
            let form = ring.solve_weight0_generator(idx, center)?;
            ring.phi_0[idx as usize - 1] = form;
        }
        // Weight-4 holomorphic generators.
        for m in 1..=3i64 {
            ring.e4_jac[m as usize - 1] = ring.solve_eisenstein(m)?;
        }
        Ok(ring)
    }

    /// Monomials E4^a E6^b phi_{-2,1}^i phi_{0,1}^j spanning weak forms of
    /// the given doubled weight and integer index, with their exponents.
    /// Powers are built incrementally so large indices stay affordable.
    pub fn weak_basis(&self, weight2: i64, index: i64) -> Vec<(String, JacobiFourier)> {
        let mut out = Vec::new();
        if weight2 % 4 != 0 || index < 0 {
            return out; // only even weights occur in this crate
        }
        let weight = weight2 / 2;
        let trunc = self.phi_m2_1.q_trunc24();
        let one = {
            let mut terms = BTreeMap::new();
            terms.insert((0, 0), qi(1));
            JacobiFourier::from_terms(0, 0, trunc, terms)
        };
        // pa[i] = phi_{-2,1}^i, pb[j] = phi_{0,1}^j.
        let mut pa = Vec::with_capacity(index as usize + 1);
        let mut pb = Vec::with_capacity(index as usize + 1);
        pa.push(one.clone());
        pb.push(one);
        for k in 1..=index as usize {
            pa.push(pa[k - 1].mul(&self.phi_m2_1));
            pb.push(pb[k - 1].mul(&self.phi_0[0]));
        }
        // Cache one-variable powers of E4 and E6.
        let max_target = (weight + 2 * index).max(0);
        let e4_pows: Vec<QSeries> =
            (0..=(max_target / 4).max(0) as u32).map(|a| self.e4.pow(a)).collect();
        let e6_pows: Vec<QSeries> =
            (0..=(max_target / 6).max(0) as u32).map(|b| self.e6.pow(b)).collect();
        for i in 0..=index {
            let j = index - i;
            // 4a + 6b = weight + 2i
            let target = weight + 2 * i;
            if target < 0 {
                continue;
            }
            let base = pa[i as usize].mul(&pb[j as usize]);
            for b in 0..=(target / 6) {
                let rem = target - 6 * b;
                if rem % 4 != 0 {
                    continue;
                }
                let a = rem / 4;
                let mut f = base.clone();
                if a > 0 {
                    f = f.mul_qseries(&e4_pows[a as usize], 8 * a);
                }
                if b > 0 {
                    f = f.mul_qseries(&e6_pows[b as usize], 12 * b);
                }
                out.push((format!("E4^{a} E6^{b} phiA^{i} phiB^{j}"), f));
            }
        }
        out
    }

    /// Weight-0 index-idx generator pinned by its q^0 part r + center + 1/r.
    fn solve_weight0_generator(&self, idx: i64, center: i64) -> Result<JacobiFourier> {
        let basis = self.weak_basis(0, idx);
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for l in 0..=idx {
            rows.push(
                basis
                    .iter()
                    .map(|(_, f)| f.coeff24(0, 2 * l))
                    .collect::<Result<Vec<Q>>>()?,
            );
            rhs.push(qi(match l {
                0 => center,
                1 => 1,
                _ => 0,
            }));
        }
        let x = solve_unique(&rows, &rhs)
            .map_err(|e| Error::ConstructionFailed(format!("phi_0_{idx}: {e}")))?;
        let mut form = JacobiFourier::zero(0, 2 * idx, basis[0].1.q_trunc24());
        for ((_, f), c) in basis.iter().zip(&x) {
            form = form.add(&f.scalar_mul(c))?;
        }
        check_q0_contract(&form, center)?;
        if !form.is_integral() {
            return Err(Error::ConstructionFailed(format!(
                "phi_0_{idx} is not integral"
            )));
        }
        Ok(form)
    }

    /// Weight-4 index-m holomorphic Jacobi form with c(0,0)=1, c(0,l)=0 for
    /// l != 0 and no negative-norm coefficients, by linear solve.
    fn solve_eisenstein(&self, m: i64) -> Result<JacobiFourier> {
        let basis = self.weak_basis(8, m);
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        let mut push_constraint = |n24: i64, l2: i64, want: Q| -> Result<()> {
            rows.push(
                basis
                    .iter()
                    .map(|(_, f)| f.coeff24(n24, l2))
                    .collect::<Result<Vec<Q>>>()?,
            );
            rhs.push(want);
            Ok(())
        };
        // Normalization.
        push_constraint(0, 0, qi(1))?;
        for l in 1..=m {
            push_constraint(0, 2 * l, qi(0))?;
        }
        // Holomorphy: negative-norm coefficients vanish on the whole box.
        let max_n = self.q_order as i64 + 1;
        for n in 0..=max_n {
            let mut l = 1;
            // support bound: weak forms built from index-m monomials can have
            // |l| up to where some monomial is nonzero; scan generously.
            let l_hi = ((4 * m * max_n) as f64).sqrt() as i64 + 2 * m + 2;
            while l <= l_hi {
                if 4 * m * n - l * l < 0 {
                    push_constraint(24 * n, 2 * l, qi(0))?;
                }
                l += 1;
            }
        }
        let x = solve_unique(&rows, &rhs)
            .map_err(|e| Error::SolveFailed(format!("E4 index {m}: {e}")))?;
        let mut form = JacobiFourier::zero(8, 2 * m, basis[0].1.q_trunc24());
        for ((_, f), c) in basis.iter().zip(&x) {
            form = form.add(&f.scalar_mul(c))?;
        }
        // Re-check holomorphy independently on the output.
        for ((n24, l2), c) in form.terms() {
            if 4 * m * (n24 / 24) - (l2 / 2) * (l2 / 2) < 0 && !c.is_zero() {
                return Err(Error::SolveFailed(format!(
                    "E4 index {m}: negative-norm coefficient survived at ({}, {})",
                    n24 / 24,
                    l2 / 2
                )));
            }
        }
        if !form.is_integral() {
            return Err(Error::SolveFailed(format!("E4 index {m} not integral")));
        }
        Ok(form)
    }
}

fn check_q0_contract(form: &JacobiFourier, center: i64) -> Result<()> {
    let q0 = form.q0_part()?;
    let want: BTreeMap<i64, Q> =
        [(2, qi(1)), (0, qi(center)), (-2, qi(1))].into_iter().collect();
    if q0 != want {
        return Err(Error::ConstructionFailed(format!(
            "q^0 contract violated: got {:?}",
            q0.iter().map(|(l, c)| (l / 2, c.to_string())).collect::<Vec<_>>()
        )));
    }
    Ok(())
}
