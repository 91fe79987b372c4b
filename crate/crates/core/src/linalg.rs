//! Dense exact linear algebra over the rationals: Gaussian elimination with
//! full pivoting, used by the generator and basis solves.

use crate::error::{Error, Result};
use crate::Q;
use num_traits::Zero;

/// Solve A x = b exactly, where A is given by rows.
///
/// Accepts overdetermined systems; returns the unique solution, or an error
/// if the system is inconsistent or the solution is not unique. Never picks
/// a particular solution out of an affine family.
pub fn solve_unique(a: &[Vec<Q>], b: &[Q]) -> Result<Vec<Q>> {
    let nrows = a.len();
    if nrows != b.len() {
        return Err(Error::SolveFailed(format!(
            "matrix has {nrows} rows but rhs has {}",
            b.len()
        )));
    }
    let ncols = if nrows == 0 { 0 } else { a[0].len() };
    if a.iter().any(|r| r.len() != ncols) {
        return Err(Error::SolveFailed("ragged matrix".into()));
    }

    // Augmented working copy.
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut pivot_col_of_row: Vec<usize> = Vec::new();
    let mut col_perm: Vec<usize> = (0..ncols).collect();
    let mut rank = 0usize;

    for step in 0..ncols.min(nrows) {
        // Full pivot: first nonzero entry in the remaining block, scanning
        // rows then columns (deterministic; exact arithmetic needs no
        // magnitude heuristics).
        let mut pivot = None;
        'scan: for i in rank..nrows {
            for jj in step..ncols {
                if !m[i][col_perm[jj]].is_zero() {
                    pivot = Some((i, jj));
                    break 'scan;
                }
            }
        }
        let (pi, pj) = match pivot {
            Some(p) => p,
            None => break,
        };
        m.swap(rank, pi);
        col_perm.swap(step, pj);
        let pc = col_perm[step];
        let pval = m[rank][pc].clone();
        for i in 0..nrows {
            if i == rank || m[i][pc].is_zero() {
                continue;
            }
            let factor = &m[i][pc] / &pval;
            let prow = m[rank].clone();
            let row = &mut m[i];
            for j in 0..=ncols {
                let delta = &prow[j] * &factor;
                row[j] -= delta;
            }
        }
        pivot_col_of_row.push(pc);
        rank += 1;
        let _ = step;
    }

    // Consistency: rows beyond the rank must have zero rhs.
    for row in m.iter().skip(rank) {
        if !row[ncols].is_zero() {
            return Err(Error::SolveFailed("inconsistent system".into()));
        }
    }
    if rank < ncols {
        return Err(Error::SolveFailed(format!(
            "underdetermined system: rank {rank} < {ncols} unknowns"
        )));
    }

    let mut x = vec![Q::zero(); ncols];
    for (i, &pc) in pivot_col_of_row.iter().enumerate() {
        x[pc] = &m[i][ncols] / &m[i][pc];
    }
    Ok(x)
}

/// Rank of the matrix given by rows (exact).
pub fn rank(a: &[Vec<Q>]) -> usize {
    let nrows = a.len();
    let ncols = if nrows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<Q>> = a.to_vec();
    let mut rank = 0usize;
    for col in 0..ncols {
        let mut piv = None;
        for (i, row) in m.iter().enumerate().skip(rank) {
            if !row[col].is_zero() {
                piv = Some(i);
                break;
            }
        }
        let pi = match piv {
            Some(p) => p,
            None => continue,
        };
        m.swap(rank, pi);
        let pval = m[rank][col].clone();
        for i in (rank + 1)..nrows {
            if m[i][col].is_zero() {
                continue;
            }
            let factor = &m[i][col] / &pval;
            let prow = m[rank].clone();
            for j in col..ncols {
                let delta = &prow[j] * &factor;
                m[i][j] -= delta;
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qi;

    #[test]
    fn solves_square_system() {
        let a = vec![vec![qi(2), qi(1)], vec![qi(1), qi(-1)]];
        let b = vec![qi(5), qi(1)];
        let x = solve_unique(&a, &b).unwrap();
        assert_eq!(x, vec![qi(2), qi(1)]);
    }

    #[test]
    fn rejects_underdetermined() {
        let a = vec![vec![qi(1), qi(1)]];
        let b = vec![qi(2)];
        assert!(solve_unique(&a, &b).is_err());
    }

    #[test]
    fn rejects_inconsistent() {
        let a = vec![vec![qi(1), qi(0)], vec![qi(1), qi(0)], vec![qi(0), qi(1)]];
        let b = vec![qi(1), qi(2), qi(0)];
        assert!(solve_unique(&a, &b).is_err());
    }

    #[test]
    fn accepts_consistent_overdetermined() {
        let a = vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)], vec![qi(1), qi(1)]];
        let b = vec![qi(3), qi(4), qi(7)];
        let x = solve_unique(&a, &b).unwrap();
        assert_eq!(x, vec![qi(3), qi(4)]);
    }

    #[test]
    fn rank_examples() {
        let a = vec![vec![qi(1), qi(2)], vec![qi(2), qi(4)]];
        assert_eq!(rank(&a), 1);
        let b = vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]];
        assert_eq!(rank(&b), 2);
    }
}
