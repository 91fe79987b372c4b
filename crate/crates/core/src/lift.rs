//! Borcherds-type lift of a weight-0 integral Jacobi form: prefactor
//! exponents, lifted weight, divisor multiplicities, swap parity, and a
//! truncated expansion of the triple product with its symmetry checks.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::jacobi::JacobiFourier;
use crate::lattice::{self, LatticeVector, NormClass};
use crate::qseries;
use crate::{qi, qr, Q};

/// Truncated expansion of the lifted product in three variables q, r, s.
///
/// Exponents are stored scaled: the q- and s-exponents times 24 and the
/// r-exponent times 2, so every key is an integer triple. The box bounds
/// the total q- and s-exponents (prefactor included); the r-range is
/// finite as a consequence and can be read off the stored keys.
#[derive(Debug, Clone)]
pub struct TripleSeries {
    pub t: i64,
    /// (24*q-exponent, 2*r-exponent, 24*s-exponent) -> coefficient.
    terms: BTreeMap<(i64, i64, i64), Q>,
    /// Inclusive bound on the total q-exponent (integer part of the box).
    pub box_n: i64,
    /// Inclusive bound on the total s-exponent.
    pub box_m: i64,
    /// No term of the untruncated product has q-exponent below this
    /// (scaled by 24); lookups below it are certified zeros.
    pub n_floor24: i64,
    /// Same bound for the s-exponent.
    pub m_floor24: i64,
}

impl TripleSeries {
    pub fn terms(&self) -> &BTreeMap<(i64, i64, i64), Q> {
        &self.terms
    }

    /// Coefficient at scaled exponents, zero when absent. Errors outside
    /// the certified box.
    pub fn coeff(&self, n24: i64, l2: i64, m24: i64) -> Result<Q> {
        if n24 > 24 * self.box_n {
            return Err(Error::OutOfTruncation { at: n24, trunc: 24 * self.box_n });
        }
        if m24 > 24 * self.box_m {
            return Err(Error::OutOfTruncation { at: m24, trunc: 24 * self.box_m });
        }
        Ok(self.terms.get(&(n24, l2, m24)).cloned().unwrap_or_else(Q::zero))
    }

    /// True when the scaled exponent triple lies in the certified region.
    pub fn in_box(&self, n24: i64, l2: i64, m24: i64) -> bool {
        let _ = l2;
        n24 <= 24 * self.box_n && m24 <= 24 * self.box_m
    }

    /// Sorted records `n_num n_den l_num l_den m_num m_den coeff`.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        for ((n24, l2, m24), c) in &self.terms {
            let gn = num_integer::gcd(*n24, 24).max(1);
            let gl = num_integer::gcd(*l2, 2).max(1);
            let gm = num_integer::gcd(*m24, 24).max(1);
            out.push_str(&format!(
                "{} {} {} {} {} {} {}\n",
                n24 / gn,
                24 / gn,
                l2 / gl,
                2 / gl,
                m24 / gm,
                24 / gm,
                c
            ));
        }
        out
    }
}

/// Header data of the lift of one weight-0 form.
#[derive(Debug, Clone)]
pub struct LiftResult {
    pub t: i64,
    /// Prefactor exponents (A, B, C); equals the Weyl vector of the
    /// attached chamber when one exists.
    pub weyl_vector: (Q, Q, Q),
    /// Weight of the lifted form, f(0,0)/2 (may be a half-integer).
    pub weight: Q,
    /// Swap-parity exponent D: the product picks up (-1)^D under the
    /// interchange of the two degenerate variables.
    pub parity_d: i64,
    /// Divisor multiplicity per tabulated norm class.
    pub divisor_table: Vec<(NormClass, i64)>,
    pub expansion: Option<TripleSeries>,
}

impl LiftResult {
    /// Stable key=value header used by the CLI.
    pub fn header_text(&self) -> String {
        let (a, b, c) = &self.weyl_vector;
        let mut out = String::new();
        out.push_str(&format!("t={}\n", self.t));
        out.push_str(&format!("A={a}\nB={b}\nC={c}\n"));
        out.push_str(&format!("weight={}\n", self.weight));
        out.push_str(&format!("parity={}\n", self.parity_d.rem_euclid(2)));
        for (i, (cls, m)) in self.divisor_table.iter().enumerate() {
            out.push_str(&format!("mult[{i}:{},{}]={}\n", cls.d, cls.l_residue, m));
        }
        out
    }
}

/// Prefactor exponents of the lift:
/// A = (1/24) sum_l f(0,l), B = (1/2) sum_{l>0} l f(0,l),
/// C = (1/4t) sum_l l^2 f(0,l).
pub fn prefactor_exponents(phi: &JacobiFourier) -> Result<(Q, Q, Q)> {
    if phi.index2 % 2 != 0 {
        return Err(Error::IndexMismatch { a: phi.index2, b: phi.index2 / 2 * 2 });
    }
    let t = phi.index2 / 2;
    let q0 = phi.q0_part()?;
    let mut a = Q::zero();
    let mut b = Q::zero();
    let mut c = Q::zero();
    for (l2, v) in &q0 {
        if l2 % 2 != 0 {
            return Err(Error::ConstructionFailed("lift needs an integer-lattice form".into()));
        }
        let l = l2 / 2;
        a += v;
        if l > 0 {
            b += qi(l) * v;
        }
        c += qi(l * l) * v;
    }
    Ok((a / qi(24), b / qi(2), c / qi(4 * t)))
}

/// Multiplicity of the rational quadratic divisor attached to a dual
/// vector (a, b, c): sum over n > 0 of f(n^2 ac, nb). The sum is finite
/// because the summand's norm is -n^2 D(a,b,c), bounded below by the
/// form's most negative norm.
pub fn divisor_multiplicity(phi: &JacobiFourier, rep: &LatticeVector) -> Result<i64> {
    if phi.index2 % 2 != 0 {
        return Err(Error::IndexMismatch { a: phi.index2, b: phi.index2 / 2 * 2 });
    }
    let t = phi.index2 / 2;
    let (a, b, c) = rep
        .as_ints()
        .ok_or_else(|| Error::ConstructionFailed("divisor representative must be integral".into()))?;
    let d = lattice::discriminant(t, rep);
    if d <= 0 {
        return Err(Error::NotARoot { t, n: a, l: b, m: c });
    }
    let d_max = match phi.min_norm() {
        Some(mn) if mn < 0 => -mn,
        _ => return Ok(0),
    };
    let mut total = Q::zero();
    let mut n = 1i64;
    while n * n * d <= d_max {
        total += phi.coeff_by_class(n * n * a * c, n * b)?;
        n += 1;
    }
    if !total.is_integer() {
        return Err(Error::ConstructionFailed(format!(
            "non-integer divisor multiplicity {total} at ({a},{b},{c})"
        )));
    }
    i64::try_from(total.to_integer())
        .map_err(|_| Error::ConstructionFailed("divisor multiplicity overflows i64".into()))
}

/// Swap-parity exponent: sum over k < 0 of sigma_1(-k) f(k,l).
pub fn parity(phi: &JacobiFourier) -> Result<i64> {
    let mut total = Q::zero();
    for ((n24, _), v) in phi.terms() {
        if *n24 >= 0 {
            continue;
        }
        if n24 % 24 != 0 {
            return Err(Error::ConstructionFailed("parity needs an integer-lattice form".into()));
        }
        total += qi(qseries::sigma1((-n24 / 24) as u64) as i64) * v;
    }
    if !total.is_integer() {
        return Err(Error::ConstructionFailed(format!("non-integer parity sum {total}")));
    }
    i64::try_from(total.to_integer())
        .map_err(|_| Error::ConstructionFailed("parity sum overflows i64".into()))
}

/// Assemble the lift header of a weight-0 form, with divisor
/// multiplicities evaluated at the supplied class representatives.
pub fn lift(
    phi: &JacobiFourier,
    class_reps: &[(NormClass, LatticeVector)],
    expansion: Option<TripleSeries>,
) -> Result<LiftResult> {
    if phi.weight2 != 0 {
        return Err(Error::WeightMismatch { a: phi.weight2, b: 0 });
    }
    let t = phi.index2 / 2;
    let weyl_vector = prefactor_exponents(phi)?;
    let weight = phi.coeff_int(0, 0)? / qi(2);
    let parity_d = parity(phi)?;
    let mut divisor_table = Vec::with_capacity(class_reps.len());
    for (cls, rep) in class_reps {
        divisor_table.push((cls.clone(), divisor_multiplicity(phi, rep)?));
    }
    Ok(LiftResult { t, weyl_vector, weight, parity_d, divisor_table, expansion })
}

/// One factor (1 - q^n r^l s^m)^e of the product, exponents scaled.
struct Factor {
    n24: i64,
    l2: i64,
    m24: i64,
    e: i64,
}

/// Expand the triple product q^A r^B s^C prod_{(n,l,m)>0} (1-q^n r^l s^m)^{f(nm,l)}
/// over the box of total q-exponents <= box_n and s-exponents <= box_m.
///
/// The ordering (n,l,m) > 0 means m > 0, or m = 0 and n > 0, or
/// m = n = 0 and l < 0. Negative exponents f(nm,l) give inverse factors
/// expanded as geometric series; rows with k < 0 (nearly holomorphic
/// input) give finitely many factors with negative q-exponent, handled
/// with a widened working bound so truncation stays exact.
pub fn expand_product(phi: &JacobiFourier, box_n: i64, box_m: i64) -> Result<TripleSeries> {
    if !phi.is_integer_lattice() {
        return Err(Error::ConstructionFailed("expansion needs an integer-lattice form".into()));
    }
    if box_n < 0 || box_m < 0 {
        return Err(Error::ConstructionFailed("expansion box bounds must be nonnegative".into()));
    }
    let t = phi.index2 / 2;
    let (a, b, c) = prefactor_exponents(phi)?;
    let a24 = scaled(&a, 24, "A")?;
    let b2 = scaled(&b, 2, "B")?;
    let c24 = scaled(&c, 24, "C")?;

    // Rows of phi indexed by integer k with their l-support.
    let mut rows: BTreeMap<i64, Vec<(i64, Q)>> = BTreeMap::new();
    for ((n24, l2), v) in phi.terms() {
        if !v.is_zero() {
            rows.entry(n24 / 24).or_default().push((l2 / 2, v.clone()));
        }
    }
    let int_exp = |v: &Q, ctx: &str| -> Result<i64> {
        if !v.is_integer() {
            return Err(Error::ConstructionFailed(format!(
                "non-integer product exponent {v} from {ctx}"
            )));
        }
        i64::try_from(v.to_integer())
            .map_err(|_| Error::ConstructionFailed("product exponent overflows i64".into()))
    };

    let mut factors: Vec<Factor> = Vec::new();
    // Slack: how far below the box the working q-bound must reach so that
    // factors with negative q-exponent cannot push dropped terms back in.
    let mut slack = 0i64;
    for (&k, row) in rows.range(..0) {
        for m in 1..=box_m {
            if k % m != 0 {
                continue;
            }
            let n = k / m;
            for (l, v) in row {
                let e = int_exp(v, "negative-q row")?;
                if e < 0 {
                    return Err(Error::ConstructionFailed(
                        "inverse factor with negative q-exponent has unbounded expansion".into(),
                    ));
                }
                slack += e * (-n);
                factors.push(Factor { n24: 24 * n, l2: 2 * l, m24: 24 * m, e });
            }
        }
    }
    let work_n24 = 24 * (box_n + slack);
    let work_m24 = 24 * box_m;

    // Branch m = n = 0, l < 0: finitely many polynomial factors in 1/r.
    if let Some(row0) = rows.get(&0) {
        for (l, v) in row0 {
            if *l >= 0 {
                continue;
            }
            let e = int_exp(v, "q^0 row")?;
            if e < 0 {
                return Err(Error::ConstructionFailed(
                    "inverse factor in 1/r alone has unbounded expansion".into(),
                ));
            }
            factors.push(Factor { n24: 0, l2: 2 * l, m24: 0, e });
        }
        // Branch m = 0, n > 0 and branch m > 0, n = 0: both read the q^0 row.
        for n in 1..=(box_n + slack) {
            for (l, v) in row0 {
                factors.push(Factor { n24: 24 * n, l2: 2 * l, m24: 0, e: int_exp(v, "q^0 row")? });
            }
        }
        for m in 1..=box_m {
            for (l, v) in row0 {
                factors.push(Factor { n24: 0, l2: 2 * l, m24: 24 * m, e: int_exp(v, "q^0 row")? });
            }
        }
    }
    // Branch m > 0, n > 0: reads row k = n*m.
    let k_need = (box_n + slack) * box_m;
    if 24 * k_need >= phi.q_trunc24() {
        return Err(Error::InsufficientTruncation(format!(
            "expansion box ({box_n},{box_m}) needs Fourier rows up to q^{k_need}, cutoff is {}",
            phi.q_trunc24()
        )));
    }
    for n in 1..=(box_n + slack) {
        for m in 1..=box_m {
            if let Some(row) = rows.get(&(n * m)) {
                for (l, v) in row {
                    factors.push(Factor {
                        n24: 24 * n,
                        l2: 2 * l,
                        m24: 24 * m,
                        e: int_exp(v, "positive row")?,
                    });
                }
            }
        }
    }

    // Multiply the factors into the accumulator, truncating on the
    // working box.
    let mut acc: BTreeMap<(i64, i64, i64), Q> = BTreeMap::new();
    acc.insert((a24, b2, c24), qi(1));
    let n_floor24 = a24 - 24 * slack;
    for f in &factors {
        let powers = factor_powers(f, n_floor24, c24, work_n24, work_m24)?;
        let mut next: BTreeMap<(i64, i64, i64), Q> = BTreeMap::new();
        for ((n24, l2, m24), cv) in &acc {
            for (dn, dl, dm, w) in &powers {
                // A negative q-step can never trip the n-bound, and the
                // s-step is always nonnegative, so exceeding a bound is
                // monotone in the power and we can stop here.
                if n24 + dn > work_n24 || m24 + dm > work_m24 {
                    break;
                }
                let entry = next.entry((n24 + dn, l2 + dl, m24 + dm)).or_insert_with(Q::zero);
                *entry += cv.clone() * w;
            }
        }
        next.retain(|_, v| !v.is_zero());
        acc = next;
    }
    acc.retain(|(n24, _, _), v| *n24 <= 24 * box_n && !v.is_zero());
    Ok(TripleSeries { t, terms: acc, box_n, box_m, n_floor24, m_floor24: c24 })
}

fn scaled(v: &Q, den: i64, name: &str) -> Result<i64> {
    let s = v * qi(den);
    if !s.is_integer() {
        return Err(Error::ExponentDenominator {
            num: i64::try_from(v.numer().clone()).unwrap_or(0),
            den: i64::try_from(v.denom().clone()).unwrap_or(0),
        });
    }
    i64::try_from(s.to_integer())
        .map_err(|_| Error::ConstructionFailed(format!("{name} exponent overflows i64")))
}

/// Expansion of (1 - x)^e as (delta_n24, delta_l2, delta_m24, coeff)
/// tuples, truncated so no kept power can exceed the working box when
/// added to an in-box term at or above the prefactor exponents.
fn factor_powers(
    f: &Factor,
    n_floor24: i64,
    m_floor24: i64,
    work_n24: i64,
    work_m24: i64,
) -> Result<Vec<(i64, i64, i64, Q)>> {
    // Maximum useful power count: any term the power multiplies has
    // exponents at least (n_floor24, m_floor24).
    let mut j_max = i64::MAX;
    if f.n24 > 0 {
        j_max = j_max.min((work_n24 - n_floor24).max(0) / f.n24 + 1);
    }
    if f.m24 > 0 {
        j_max = j_max.min((work_m24 - m_floor24).max(0) / f.m24 + 1);
    }
    if f.e >= 0 {
        j_max = j_max.min(f.e);
    } else if f.n24 <= 0 && f.m24 <= 0 {
        return Err(Error::ConstructionFailed(
            "inverse factor with no growth in q or s has unbounded expansion".into(),
        ));
    }
    if j_max == i64::MAX {
        return Err(Error::ConstructionFailed("unbounded factor expansion".into()));
    }
    let mut out = Vec::with_capacity(j_max as usize + 1);
    // Binomial coefficients built incrementally in exact arithmetic:
    // (1-x)^e   -> sum_j (-1)^j C(e,j) x^j            (e >= 0)
    // (1-x)^-E  -> sum_j C(j+E-1, j) x^j              (E = -e > 0)
    let mut w = qi(1);
    for j in 0..=j_max {
        if j > 0 {
            if f.e >= 0 {
                w = w * qi(-(f.e - j + 1)) / qi(j);
            } else {
                w = w * qi(j - 1 - f.e) / qi(j);
            }
        }
        out.push((j * f.n24, j * f.l2, j * f.m24, w.clone()));
    }
    Ok(out)
}

/// Violation record for the symmetry checks on an expansion.
#[derive(Debug, Clone)]
pub struct SymmetryViolation {
    pub at: (i64, i64, i64),
    pub image: (i64, i64, i64),
    pub value: Q,
    pub image_value: Q,
}

/// Result of the anti-invariance check under the chamber reflections.
#[derive(Debug, Clone)]
pub struct AntiInvarianceReport {
    pub tested: usize,
    pub untested: usize,
    pub violations: Vec<SymmetryViolation>,
}

/// Check that the expansion changes sign under every chamber reflection:
/// for each stored exponent u with s(u) inside the box, the coefficient
/// at s(u) is minus the one at u. Images outside the box are counted as
/// untested. Intended for algebras whose chamber has no super roots.
pub fn check_antiinvariance(
    exp: &TripleSeries,
    chamber_roots: &[LatticeVector],
) -> Result<AntiInvarianceReport> {
    let mut report = AntiInvarianceReport { tested: 0, untested: 0, violations: Vec::new() };
    for ((n24, l2, m24), v) in &exp.terms {
        let u = LatticeVector::new(qr(*n24, 24), qr(*l2, 2), qr(*m24, 24));
        for root in chamber_roots {
            let img = lattice::reflect(exp.t, root, &u)?;
            let in24 = scaled(&img.n, 24, "image n")?;
            let il2 = scaled(&img.l, 2, "image l")?;
            let im24 = scaled(&img.m, 24, "image m")?;
            if !exp.in_box(in24, il2, im24) || in24 < exp.n_floor24 || im24 < exp.m_floor24 {
                report.untested += 1;
                continue;
            }
            report.tested += 1;
            let w = exp.terms.get(&(in24, il2, im24)).cloned().unwrap_or_else(Q::zero);
            if w != -v.clone() {
                report.violations.push(SymmetryViolation {
                    at: (*n24, *l2, *m24),
                    image: (in24, il2, im24),
                    value: v.clone(),
                    image_value: w,
                });
            }
        }
    }
    Ok(report)
}

/// Check the q <-> s swap symmetry c(n,l,m) = (-1)^parity c(m,l,n) over
/// the part of the box closed under the swap.
pub fn check_swap_symmetry(exp: &TripleSeries, parity_d: i64) -> Vec<SymmetryViolation> {
    let sign = if parity_d.rem_euclid(2) == 0 { qi(1) } else { qi(-1) };
    let mut violations = Vec::new();
    for ((n24, l2, m24), v) in &exp.terms {
        let image = (*m24, *l2, *n24);
        if !exp.in_box(image.0, image.1, image.2) {
            continue;
        }
        let w = exp.terms.get(&image).cloned().unwrap_or_else(Q::zero);
        if w != v.clone() * &sign {
            violations.push(SymmetryViolation {
                at: (*n24, *l2, *m24),
                image,
                value: v.clone(),
                image_value: w,
            });
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset;
    use crate::jacobi::JacobiRing;
    use crate::reflective;

    fn basis(t: i64, q_order: u32) -> (dataset::IndexData, Vec<JacobiFourier>) {
        let ds = dataset::load_default().unwrap();
        let idx = ds.index(t).unwrap().clone();
        let ring = JacobiRing::new(q_order).unwrap();
        let forms = reflective::build_basis(&idx, &ring).unwrap();
        (idx, forms)
    }

    #[test]
    fn prefactor_matches_tabulated_weyl_vectors() {
        let (_, forms) = basis(1, 4);
        assert_eq!(prefactor_exponents(&forms[0]).unwrap(), (qr(1, 2), qr(1, 2), qr(1, 2)));
        assert_eq!(prefactor_exponents(&forms[1]).unwrap(), (qr(5, 2), qr(1, 2), qr(3, 2)));
        let (_, forms2) = basis(2, 4);
        assert_eq!(prefactor_exponents(&forms2[0]).unwrap(), (qr(1, 4), qr(1, 2), qr(1, 4)));
    }

    #[test]
    fn divisor_multiplicities_match_tabulated_rows() {
        let (idx, forms) = basis(1, 4);
        // Rows of the stored multiplicity matrix, class by class.
        for (ci, cls) in idx.classes.iter().enumerate() {
            let rep = LatticeVector::from_ints(cls.rep.0, cls.rep.1, cls.rep.2);
            for (fi, f) in forms.iter().enumerate() {
                assert_eq!(
                    divisor_multiplicity(f, &rep).unwrap(),
                    idx.mul[ci][fi],
                    "class {ci} form {fi}"
                );
            }
        }
    }

    #[test]
    fn parity_distinguishes_weak_and_nearly_holomorphic_inputs() {
        let (_, forms) = basis(1, 4);
        assert_eq!(parity(&forms[0]).unwrap(), 0);
        assert_eq!(parity(&forms[1]).unwrap(), 1);
        let (_, forms2) = basis(2, 4);
        assert_eq!(parity(&forms2[2]).unwrap(), 1);
    }

    #[test]
    fn expansion_has_unit_leading_term_and_symmetries() {
        let (idx, forms) = basis(1, 6);
        let phi = &forms[0];
        let exp = expand_product(phi, 2, 2).unwrap();
        // Leading term +1 at the prefactor exponent (1/2, 1/2, 1/2).
        assert_eq!(exp.coeff(12, 1, 12).unwrap(), qi(1));
        // Single r-inverse factor contributes -1 at (1/2, -1/2, 1/2).
        assert_eq!(exp.coeff(12, -1, 12).unwrap(), qi(-1));
        assert!(check_swap_symmetry(&exp, 0).is_empty());
        let ds = dataset::load_default().unwrap();
        let spec = &ds.algebras_for(1)[0];
        // Reflect in the walls of the algebra's own chamber (the orbit of
        // the seeds), not in the ambient orbit generators.
        let gens: Vec<LatticeVector> = spec
            .gens
            .iter()
            .map(|&g| {
                let p = idx.pm0[g - 1];
                LatticeVector::from_ints(p.0, p.1, p.2)
            })
            .collect();
        let seeds: Vec<LatticeVector> =
            spec.seeds.iter().map(|&(n, l, m)| LatticeVector::from_ints(n, l, m)).collect();
        let walls = lattice::orbit(1, &gens, &seeds, 6).unwrap();
        assert_eq!(walls.len(), 3);
        let rep = check_antiinvariance(&exp, &walls).unwrap();
        assert!(rep.violations.is_empty(), "violations: {:?}", rep.violations);
        assert!(rep.tested > 0);
    }

    #[test]
    fn expansion_rejects_underfed_truncation() {
        let (_, forms) = basis(1, 4);
        match expand_product(&forms[0], 4, 4) {
            Err(Error::InsufficientTruncation(_)) => {}
            other => panic!("expected InsufficientTruncation, got {other:?}"),
        }
    }
}
