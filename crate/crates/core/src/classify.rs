//! Enumeration of the basis combinations whose lifted divisor
//! multiplicities are all 0 or 1, and assembly of the resulting algebra
//! records: chamber roots, Cartan matrix, Weyl vector, weight.


use crate::dataset::{AlgebraSpec, CartanSpec, Dataset, IndexData};
use crate::error::{Error, Result};
use crate::jacobi::JacobiFourier;
use crate::lattice::{self, LatticeVector, NormClass};
use crate::lift::{self, LiftResult};
use crate::reflective;

/// Word length used for orbit generation and for the window shown on
/// infinite chambers.
pub const ORBIT_WORD_LEN: usize = 6;

/// Assembled data of one algebra: the lift header of the combined form
/// plus the root-system data of its Weyl chamber.
#[derive(Debug, Clone)]
pub struct AlgebraRecord {
    pub t: i64,
    pub combination: Vec<i64>,
    pub name: String,
    pub lift: LiftResult,
    /// Chamber roots; the full set for finite chambers, a word-length
    /// window for infinite ones.
    pub pm: Vec<LatticeVector>,
    /// Roots declared odd; empty for purely even algebras.
    pub pm_super: Vec<LatticeVector>,
    /// Cartan matrix of `pm` (finite chambers) or of the window.
    pub cartan: Vec<Vec<i64>>,
    /// For finite chambers: position of each tabulated row inside `pm`.
    pub permutation: Option<Vec<usize>>,
    /// True when the chamber is infinite and only a window is stored.
    pub infinite: bool,
}

/// Class representatives of an index table as lattice vectors.
pub fn class_reps(idx: &IndexData) -> Vec<(NormClass, LatticeVector)> {
    idx.classes
        .iter()
        .map(|c| {
            (
                NormClass { d: c.d, l_residue: c.l_residue },
                LatticeVector::from_ints(c.rep.0, c.rep.1, c.rep.2),
            )
        })
        .collect()
}

/// All nonzero combination vectors c with lo <= c_i <= hi whose divisor
/// multiplicity is 0 or 1 on every tabulated class. Each candidate is
/// screened through the linearity of the multiplicity matrix and then
/// re-verified by direct evaluation on the combined form. Lexicographic
/// output order.
pub fn enumerate_denominator_forms(
    idx: &IndexData,
    forms: &[JacobiFourier],
    lo: i64,
    hi: i64,
) -> Result<Vec<Vec<i64>>> {
    if forms.len() != idx.basis.len() {
        return Err(Error::SchemaError {
            location: format!("t={}", idx.t),
            message: format!("{} forms for {} basis entries", forms.len(), idx.basis.len()),
        });
    }
    if lo > hi {
        return Err(Error::ConstructionFailed("empty search box".into()));
    }
    let reps = class_reps(idx);
    let k = forms.len();
    let mut out = Vec::new();
    let mut c = vec![lo; k];
    loop {
        if c.iter().any(|&x| x != 0) {
            let by_linearity = idx.mul.iter().all(|row| {
                let s: i64 = row.iter().zip(&c).map(|(m, x)| m * x).sum();
                s == 0 || s == 1
            });
            if by_linearity {
                let combined = reflective::combine(forms, &c)?;
                for (ci, (_, rep)) in reps.iter().enumerate() {
                    let direct = lift::divisor_multiplicity(&combined, rep)?;
                    let linear: i64 = idx.mul[ci].iter().zip(&c).map(|(m, x)| m * x).sum();
                    if direct != linear {
                        return Err(Error::MismatchAgainstTable(format!(
                            "t={} c={c:?} class {ci}: direct multiplicity {direct}, linear {linear}",
                            idx.t
                        )));
                    }
                }
                out.push(c.clone());
            }
        }
        // Odometer step, leftmost digit most significant.
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if c[i] < hi {
                c[i] += 1;
                for d in &mut c[i + 1..] {
                    *d = lo;
                }
                break;
            }
        }
    }
}

/// Orbit of the spec's seeds under its generating reflections; the seeds
/// themselves when no generators are listed.
pub fn chamber_roots(idx: &IndexData, spec: &AlgebraSpec) -> Result<Vec<LatticeVector>> {
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
    lattice::orbit(idx.t, &gens, &seeds, ORBIT_WORD_LEN)
}

/// Cartan matrix with entries demoted to integers; errors when an entry
/// is fractional.
fn integer_cartan(t: i64, roots: &[LatticeVector]) -> Result<Vec<Vec<i64>>> {
    let a = lattice::cartan_matrix(t, roots)?;
    a.iter()
        .map(|row| {
            row.iter()
                .map(|v| {
                    if !v.is_integer() {
                        return Err(Error::ConstructionFailed(format!(
                            "fractional Cartan entry {v}"
                        )));
                    }
                    i64::try_from(v.to_integer())
                        .map_err(|_| Error::ConstructionFailed("Cartan entry overflows".into()))
                })
                .collect()
        })
        .collect()
}

/// Search for a simultaneous row/column permutation carrying `got` onto
/// `want`; returns the positions of the tabulated rows inside `got`.
fn cartan_permutation(want: &[Vec<i64>], got: &[Vec<i64>]) -> Option<Vec<usize>> {
    let n = want.len();
    if got.len() != n {
        return None;
    }
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(
        want: &[Vec<i64>],
        got: &[Vec<i64>],
        perm: &mut Vec<usize>,
        used: &mut [bool],
    ) -> bool {
        let i = perm.len();
        if i == want.len() {
            return true;
        }
        for cand in 0..want.len() {
            if used[cand] {
                continue;
            }
            let ok = (0..=i).all(|j| {
                let pj = if j == i { cand } else { perm[j] };
                want[i][j] == got[cand][pj] && want[j][i] == got[pj][cand]
            });
            if ok {
                used[cand] = true;
                perm.push(cand);
                if rec(want, got, perm, used) {
                    return true;
                }
                perm.pop();
                used[cand] = false;
            }
        }
        false
    }
    if rec(want, got, &mut perm, &mut used) {
        Some(perm)
    } else {
        None
    }
}

fn fmt_matrix(m: &[Vec<i64>]) -> String {
    let rows: Vec<String> = m.iter().map(|r| format!("{r:?}")).collect();
    format!("[{}]", rows.join(", "))
}

/// Build the algebra record for one enumerated combination: lift header,
/// chamber roots, Cartan matrix matched against the tabulated one, Weyl
/// vector cross-checks.
pub fn assemble_record(
    ds: &Dataset,
    idx: &IndexData,
    forms: &[JacobiFourier],
    c: &[i64],
) -> Result<AlgebraRecord> {
    let spec = ds
        .algebras
        .iter()
        .find(|a| a.t == idx.t && a.combination == c)
        .ok_or_else(|| Error::NoMatch(format!("t={} combination {c:?} not tabulated", idx.t)))?;
    let combined = reflective::combine(forms, c)?;
    let lifted = lift::lift(&combined, &class_reps(idx), None)?;

    // Weyl vector and weight against the tabulated values.
    let rho = spec.rho_vector();
    let (a, b, cc) = &lifted.weyl_vector;
    if (a, b, cc) != (&rho.n, &rho.l, &rho.m) {
        return Err(Error::MismatchAgainstTable(format!(
            "t={} c={c:?}: lifted prefactor ({a},{b},{cc}) vs tabulated rho ({},{},{})",
            idx.t, rho.n, rho.l, rho.m
        )));
    }
    if lifted.weight != crate::qr(spec.weight2, 2) {
        return Err(Error::MismatchAgainstTable(format!(
            "t={} c={c:?}: lifted weight {} vs tabulated {}/2",
            idx.t, lifted.weight, spec.weight2
        )));
    }

    let pm = chamber_roots(idx, spec)?;
    let cartan = integer_cartan(idx.t, &pm)?;
    for (i, row) in cartan.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if (i == j && v != 2) || (i != j && v > 0) {
                return Err(Error::ConstructionFailed(format!(
                    "t={} c={c:?}: Cartan entry ({i},{j}) = {v} is not a GCM entry",
                    idx.t
                )));
            }
        }
    }
    let (permutation, infinite) = match &spec.cartan {
        CartanSpec::Finite(want) => {
            let perm = cartan_permutation(want, &cartan).ok_or_else(|| {
                Error::NoMatch(format!(
                    "t={} c={c:?}: Cartan {} does not match tabulated {} up to permutation",
                    idx.t,
                    fmt_matrix(&cartan),
                    fmt_matrix(want)
                ))
            })?;
            (Some(perm), false)
        }
        CartanSpec::Infinite => {
            // Structural check on the window: the orbit must still be
            // growing at the horizon (infinite chamber).
            let shorter = {
                let gens: Vec<LatticeVector> = spec
                    .gens
                    .iter()
                    .map(|&g| {
                        let p = idx.pm0[g - 1];
                        LatticeVector::from_ints(p.0, p.1, p.2)
                    })
                    .collect();
                let seeds: Vec<LatticeVector> = spec
                    .seeds
                    .iter()
                    .map(|&(n, l, m)| LatticeVector::from_ints(n, l, m))
                    .collect();
                lattice::orbit(idx.t, &gens, &seeds, ORBIT_WORD_LEN - 1)?
            };
            if pm.len() <= shorter.len() {
                return Err(Error::NoMatch(format!(
                    "t={} c={c:?}: orbit saturates at {} elements but an infinite chamber \
                     is tabulated",
                    idx.t,
                    pm.len()
                )));
            }
            (None, true)
        }
    };
    if let Some(expected) = &spec.expected_pm {
        let mut want: Vec<LatticeVector> =
            expected.iter().map(|&(n, l, m)| LatticeVector::from_ints(n, l, m)).collect();
        want.sort();
        if !infinite && want != pm {
            return Err(Error::MismatchAgainstTable(format!(
                "t={} c={c:?}: chamber roots differ from the tabulated set",
                idx.t
            )));
        }
        if infinite && !want.iter().all(|w| pm.contains(w)) {
            return Err(Error::MismatchAgainstTable(format!(
                "t={} c={c:?}: tabulated roots missing from the chamber window",
                idx.t
            )));
        }
    }
    // Weyl-vector identity on every window element when rho is nonzero.
    if !rho.is_zero() {
        let failing = lattice::check_weyl_vector(idx.t, &rho, &pm);
        if !failing.is_empty() {
            return Err(Error::MismatchAgainstTable(format!(
                "t={} c={c:?}: Weyl identity fails on {} roots, first {:?}",
                idx.t,
                failing.len(),
                failing[0]
            )));
        }
    }
    let pm_super: Vec<LatticeVector> = if spec.super_orbit {
        let gens: Vec<LatticeVector> = spec
            .gens
            .iter()
            .map(|&g| {
                let p = idx.pm0[g - 1];
                LatticeVector::from_ints(p.0, p.1, p.2)
            })
            .collect();
        let seeds: Vec<LatticeVector> = spec
            .super_seeds
            .iter()
            .map(|&(n, l, m)| LatticeVector::from_ints(n, l, m))
            .collect();
        lattice::orbit(idx.t, &gens, &seeds, ORBIT_WORD_LEN)?
    } else {
        spec.super_seeds.iter().map(|&(n, l, m)| LatticeVector::from_ints(n, l, m)).collect()
    };
    Ok(AlgebraRecord {
        t: idx.t,
        combination: c.to_vec(),
        name: spec.name.clone(),
        lift: lifted,
        pm,
        pm_super,
        cartan,
        permutation,
        infinite,
    })
}

/// One line per record: index, combination, lifted weight, name.
pub fn weight_report(records: &[AlgebraRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&format!(
            "t={} c={:?} weight={} name={}\n",
            r.t, r.combination, r.lift.weight, r.name
        ));
    }
    out
}

/// Expected number of denominator forms per supported index, in dataset
/// order; the classifier reproduces these counts.
pub fn expected_counts(ds: &Dataset) -> Vec<(i64, usize)> {
    ds.supported_t().into_iter().map(|t| (t, ds.algebras_for(t).len())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset;
    use crate::jacobi::JacobiRing;
    use crate::{qi, qr};

    fn built(t: i64, q_order: u32) -> (Dataset, IndexData, Vec<JacobiFourier>) {
        let ds = dataset::load_default().unwrap();
        let idx = ds.index(t).unwrap().clone();
        let ring = JacobiRing::new(q_order).unwrap();
        let forms = reflective::build_basis(&idx, &ring).unwrap();
        (ds, idx, forms)
    }

    #[test]
    fn enumeration_counts_for_small_indices() {
        let (_, idx1, forms1) = built(1, 4);
        let got = enumerate_denominator_forms(&idx1, &forms1, 0, 1).unwrap();
        assert_eq!(got, vec![vec![0, 1], vec![1, 0], vec![1, 1]]);
        // The wider box adds no solutions.
        let wide = enumerate_denominator_forms(&idx1, &forms1, -2, 2).unwrap();
        assert_eq!(wide, got);

        let (_, idx2, forms2) = built(2, 4);
        let got2 = enumerate_denominator_forms(&idx2, &forms2, 0, 1).unwrap();
        assert_eq!(got2.len(), 7); // every nonzero 0/1 vector
    }

    #[test]
    fn assembled_records_match_tabulated_data() {
        let (ds, idx, forms) = built(1, 4);
        let r = assemble_record(&ds, &idx, &forms, &[1, 0]).unwrap();
        assert_eq!(r.name, "Delta_5");
        assert_eq!(r.lift.weight, qi(5));
        assert_eq!(r.cartan, vec![vec![2, -2, -2], vec![-2, 2, -2], vec![-2, -2, 2]]);
        assert!(!r.infinite);

        let (ds2, idx2, forms2) = built(2, 4);
        let r2 = assemble_record(&ds2, &idx2, &forms2, &[1, 0, 1]).unwrap();
        assert_eq!(r2.lift.weyl_vector, (qr(5, 4), qr(1, 2), qr(1, 4)));
        assert!(r2.pm.contains(&LatticeVector::from_ints(1, 4, 1)));
        assert!(r2.pm.contains(&LatticeVector::from_ints(1, 1, 0)));
    }

    #[test]
    fn weight_report_lines_are_stable() {
        let (ds, idx, forms) = built(1, 4);
        let r = assemble_record(&ds, &idx, &forms, &[1, 1]).unwrap();
        assert_eq!(weight_report(&[r]), "t=1 c=[1, 1] weight=35 name=Delta_35\n");
    }
}
