//! The rank-3 hyperbolic lattice U + <2t> and its dual: pairing, roots,
//! reflections, norm classes, and Weyl-group orbit generation.
//!
//! Vectors are written (n, l, m) in the dual basis, so that the printed
//! integer triples of the tables are the coordinates used here. The bilinear
//! form is (a,b) = -(n_a m_b + m_a n_b) + l_a l_b / 2t; `pair2t` clears the
//! denominator.

use crate::error::{Error, Result};
use crate::{qi, qr, Q};
use num_integer::Integer;
use num_traits::Zero;
use std::collections::BTreeSet;
use std::fmt;

/// Vector in S_t* (or S_t tensor Q for Weyl vectors), coordinates (n, l, m).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeVector {
    pub n: Q,
    pub l: Q,
    pub m: Q,
}

impl LatticeVector {
    pub fn new(n: Q, l: Q, m: Q) -> Self {
        LatticeVector { n, l, m }
    }

    /// Integer-coordinate vector.
    pub fn from_ints(n: i64, l: i64, m: i64) -> Self {
        LatticeVector { n: qi(n), l: qi(l), m: qi(m) }
    }

    pub fn is_integral(&self) -> bool {
        self.n.is_integer() && self.l.is_integer() && self.m.is_integer()
    }

    /// Integer coordinates, when integral.
    pub fn as_ints(&self) -> Option<(i64, i64, i64)> {
        if !self.is_integral() {
            return None;
        }
        let f = |q: &Q| -> Option<i64> { i64::try_from(q.to_integer()).ok() };
        Some((f(&self.n)?, f(&self.l)?, f(&self.m)?))
    }

    pub fn is_zero(&self) -> bool {
        self.n.is_zero() && self.l.is_zero() && self.m.is_zero()
    }

    pub fn neg(&self) -> Self {
        LatticeVector { n: -self.n.clone(), l: -self.l.clone(), m: -self.m.clone() }
    }

    pub fn scale(&self, k: &Q) -> Self {
        LatticeVector { n: &self.n * k, l: &self.l * k, m: &self.m * k }
    }

    pub fn sub(&self, other: &Self) -> Self {
        LatticeVector {
            n: &self.n - &other.n,
            l: &self.l - &other.l,
            m: &self.m - &other.m,
        }
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n, self.l, self.m)
    }
}

/// Equivalence class of a vector: positive discriminant D = -4tnm + l^2
/// together with +-l mod 2t, canonical residue in 0..=t.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormClass {
    pub d: i64,
    pub l_residue: i64,
}

impl NormClass {
    pub fn new(t: i64, d: i64, l: i64) -> Self {
        let two_t = 2 * t;
        let mut r = l.rem_euclid(two_t);
        if r > t {
            r = two_t - r;
        }
        NormClass { d, l_residue: r }
    }
}

impl fmt::Display for NormClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{}bar)", self.d, self.l_residue)
    }
}

/// Exact pairing (a,b) = -(n_a m_b + m_a n_b) + l_a l_b / 2t.
pub fn pair(t: i64, a: &LatticeVector, b: &LatticeVector) -> Q {
    -(&a.n * &b.m + &a.m * &b.n) + &a.l * &b.l * qr(1, 2 * t)
}

/// 2t * pair; an integer for integral vectors.
pub fn pair2t(t: i64, a: &LatticeVector, b: &LatticeVector) -> Q {
    pair(t, a, b) * qi(2 * t)
}

/// Integer pair2t for integral inputs.
pub fn pair2t_int(t: i64, a: &LatticeVector, b: &LatticeVector) -> i64 {
    let v = pair2t(t, a, b);
    debug_assert!(v.is_integer());
    i64::try_from(v.to_integer()).expect("pair2t overflow")
}

/// Discriminant D = 2t a^2 = -4tnm + l^2 for an integral vector.
pub fn discriminant(t: i64, a: &LatticeVector) -> i64 {
    let (n, l, m) = a.as_ints().expect("discriminant needs integral vector");
    -4 * t * n * m + l * l
}

/// Root predicate: D > 0 and the reflection in `a` preserves the lattice,
/// i.e. D divides 4tn, 4tm and 2l.
pub fn is_root(t: i64, a: &LatticeVector) -> bool {
    let (n, l, m) = match a.as_ints() {
        Some(v) => v,
        None => return false,
    };
    let d = -4 * t * n * m + l * l;
    d > 0 && (4 * t * n) % d == 0 && (4 * t * m) % d == 0 && (2 * l) % d == 0
}

/// Reflection s_root(x) = x - (2(x,root)/root^2) root.
pub fn reflect(t: i64, root: &LatticeVector, x: &LatticeVector) -> Result<LatticeVector> {
    if !is_root(t, root) {
        let (n, l, m) = root.as_ints().unwrap_or((0, 0, 0));
        return Err(Error::NotARoot { t, n, l, m });
    }
    let d = qi(discriminant(t, root));
    // 2(x,a)/a^2 = 2*pair2t(x,a)/D
    let coeff = qi(2) * pair2t(t, x, root) / d;
    Ok(x.sub(&root.scale(&coeff)))
}

/// Norm class of a primitive integral vector.
pub fn class_of(t: i64, a: &LatticeVector) -> Result<NormClass> {
    let (n, l, m) = a
        .as_ints()
        .ok_or(Error::NonPrimitive { content: 0 })?;
    let g = n.gcd(&l).gcd(&m);
    if g != 1 {
        return Err(Error::NonPrimitive { content: g });
    }
    Ok(NormClass::new(t, -4 * t * n * m + l * l, l))
}

/// All images of the seeds under words of length <= max_word_len in the
/// generating reflections, deduplicated, in lexicographic coordinate order.
pub fn orbit(
    t: i64,
    generators: &[LatticeVector],
    seeds: &[LatticeVector],
    max_word_len: usize,
) -> Result<Vec<LatticeVector>> {
    let mut seen: BTreeSet<LatticeVector> = seeds.iter().cloned().collect();
    let mut frontier: Vec<LatticeVector> = seeds.to_vec();
    for _ in 0..max_word_len {
        let mut next = Vec::new();
        for x in &frontier {
            for g in generators {
                let y = reflect(t, g, x)?;
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(seen.into_iter().collect())
}

/// Generalized Cartan matrix A_ij = 2(a_i, a_j)/a_i^2 for an ordered root list.
pub fn cartan_matrix(t: i64, roots: &[LatticeVector]) -> Result<Vec<Vec<Q>>> {
    for r in roots {
        if !is_root(t, r) {
            let (n, l, m) = r.as_ints().unwrap_or((0, 0, 0));
            return Err(Error::NotARoot { t, n, l, m });
        }
    }
    Ok(roots
        .iter()
        .map(|ai| {
            let di = qi(discriminant(t, ai));
            roots
                .iter()
                .map(|aj| qi(2) * pair2t(t, ai, aj) / &di)
                .collect()
        })
        .collect())
}

/// Verify (rho, a) = -a^2/2 for each root; returns the failing roots.
pub fn check_weyl_vector(
    t: i64,
    rho: &LatticeVector,
    roots: &[LatticeVector],
) -> Vec<LatticeVector> {
    roots
        .iter()
        .filter(|a| {
            let lhs = pair(t, rho, a);
            let rhs = -qi(discriminant(t, a)) * qr(1, 4 * t);
            lhs != rhs
        })
        .cloned()
        .collect()
}

/// Deterministic interior point of the chamber cut out by the given walls:
/// the first small rational vector (fixed scan order) with strictly negative
/// pairing against every wall and negative self-pairing (inside the cone).
pub fn interior_point(t: i64, walls: &[LatticeVector]) -> Result<LatticeVector> {
    let denoms = [1i64, 2, 3, 4, 6, 8, 12, 24];
    for &den in &denoms {
        let range = 4 * den;
        for n in 0..=range {
            for l in -range..=range {
                for m in 0..=range {
                    let p = LatticeVector::new(qr(n, den), qr(l, den), qr(m, den));
                    if p.is_zero() {
                        continue;
                    }
                    if pair(t, &p, &p) >= Q::zero() {
                        continue;
                    }
                    if walls.iter().all(|w| pair(t, &p, w) < Q::zero()) {
                        return Ok(p);
                    }
                }
            }
        }
    }
    Err(Error::NoMatch("no interior point found in scan range".into()))
}

/// Positive-real-root predicate: `a` lies in N * (orbit of the chamber roots)
/// and pairs negatively with the chamber interior.
pub fn positive_real_root(
    t: i64,
    chamber_roots: &[LatticeVector],
    a: &LatticeVector,
    max_word_len: usize,
) -> Result<bool> {
    if !is_root(t, a) {
        return Ok(false);
    }
    let (n, l, m) = a.as_ints().expect("root is integral");
    let g = n.gcd(&l).gcd(&m).abs().max(1);
    let prim = LatticeVector::from_ints(n / g, l / g, m / g);
    let orb = orbit(t, chamber_roots, chamber_roots, max_word_len)?;
    let in_orbit = orb.contains(&prim) || orb.contains(&prim.neg());
    if !in_orbit {
        return Err(Error::DepthExceeded { max_len: max_word_len });
    }
    let p = interior_point(t, chamber_roots)?;
    Ok(pair(t, a, &p) < Q::zero())
}
