//! Bundled machine-readable transcription of the tabulated data: basis
//! recipes, printed Fourier coefficients, chamber data (wall vectors, Gram
//! matrices, root classes, multiplicity matrices) and the 29 algebra
//! records. Single source of truth for all acceptance comparisons.
//!
//! The file format is RON; `load_default` reads the copy bundled into the
//! binary, and the CLI accepts an alternative path.

use crate::error::{Error, Result};
use crate::lattice::{self, LatticeVector, NormClass};
use serde::Deserialize;

/// Generator symbols usable in recipes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Sym {
    Phi01,
    Phi02,
    Phi03,
    Phi04,
    E4,
    E6,
    E41,
    E42,
    E43,
}

/// One monomial term of a recipe: c * prod sym^exp / Delta^delta_pow.
#[derive(Debug, Clone, Deserialize)]
pub struct RTerm {
    pub c: i64,
    #[serde(default)]
    pub delta_pow: u32,
    pub factors: Vec<(Sym, u32)>,
}

/// How a basis form is produced.
#[derive(Debug, Clone, Deserialize)]
pub enum Recipe {
    /// Sum of monomial terms.
    Terms(Vec<RTerm>),
    /// A single generator with the elliptic variable rescaled: sym(tau, s z).
    Rescale(Sym, i64),
    /// No closed form printed; reconstructed by linear solve against the
    /// printed coefficients.
    PrintedOnly,
}

/// One printed coefficient: r-exponent, value, optional bracketed norm.
#[derive(Debug, Clone, Deserialize)]
pub struct PrintedCoeff {
    pub l: i64,
    pub v: i64,
    #[serde(default)]
    pub norm: Option<i64>,
}

/// One printed line (fixed q-exponent) of a Fourier expansion.
#[derive(Debug, Clone, Deserialize)]
pub struct PrintedLine {
    pub q: i64,
    /// True when the line lists the whole l-support; false for lines ending
    /// in an ellipsis, where only the listed entries are asserted.
    pub complete: bool,
    pub coeffs: Vec<PrintedCoeff>,
}

/// One basis form of an RJ_t space.
#[derive(Debug, Clone, Deserialize)]
pub struct BasisForm {
    pub label: usize,
    pub recipe: Recipe,
    pub printed: Vec<PrintedLine>,
}

/// A root class together with a representative vector.
#[derive(Debug, Clone, Deserialize)]
pub struct ClassRep {
    pub d: i64,
    pub l_residue: i64,
    pub rep: (i64, i64, i64),
}

/// All tabulated data for one index t.
#[derive(Debug, Clone, Deserialize)]
pub struct IndexData {
    pub t: i64,
    /// Default working q-order (exclusive): covers every printed line and
    /// certifies the negative-norm box (n up to t/4).
    pub q_order: u32,
    pub basis: Vec<BasisForm>,
    /// Wall vectors of the lattice Weyl chamber, in table order.
    pub pm0: Vec<(i64, i64, i64)>,
    /// 2t-scaled Gram matrix of pm0, as printed.
    pub gram: Vec<Vec<i64>>,
    /// Root classes (rows of the multiplicity matrix), with representatives.
    pub classes: Vec<ClassRep>,
    /// Divisor-multiplicity matrix: one row per class, one column per form.
    pub mul: Vec<Vec<i64>>,
    #[serde(default)]
    pub errata: Vec<String>,
}

/// Cartan-matrix expectation for an algebra record.
#[derive(Debug, Clone, Deserialize)]
pub enum CartanSpec {
    /// Finite chamber: full matrix, to be matched up to simultaneous
    /// permutation.
    Finite(Vec<Vec<i64>>),
    /// Infinite dihedral chamber: checked structurally on a word-length
    /// window instead of against a full matrix.
    Infinite,
}

/// One of the 29 algebra records.
#[derive(Debug, Clone, Deserialize)]
pub struct AlgebraSpec {
    pub t: i64,
    /// Coefficients over the RJ_t basis.
    pub combination: Vec<i64>,
    /// 1-based indices into pm0: reflections generating the chamber symmetry.
    pub gens: Vec<usize>,
    /// Orbit seeds (explicit vectors; scaled walls appear as e.g. 2*alpha_2).
    pub seeds: Vec<(i64, i64, i64)>,
    /// Explicit P(M) when the table prints one (cross-checked with the orbit).
    #[serde(default)]
    pub expected_pm: Option<Vec<(i64, i64, i64)>>,
    /// Super-root subset seeds.
    #[serde(default)]
    pub super_seeds: Vec<(i64, i64, i64)>,
    /// When true the super set is the orbit of the super seeds under gens.
    #[serde(default)]
    pub super_orbit: bool,
    pub cartan: CartanSpec,
    /// Weyl vector (A, B, C) as rational components.
    pub rho: ((i64, i64), (i64, i64), (i64, i64)),
    pub name: String,
    /// Doubled weight of the lifted form.
    pub weight2: i64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Dataset {
    pub version: u32,
    pub indices: Vec<IndexData>,
    pub algebras: Vec<AlgebraSpec>,
}

/// The dataset file bundled with the crate.
pub const BUNDLED: &str = include_str!("../data/tables.ron");

pub fn load_default() -> Result<Dataset> {
    parse(BUNDLED)
}

pub fn load_path(path: &std::path::Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Dataset> {
    if text.trim().is_empty() {
        return Err(Error::SchemaError {
            location: "file".into(),
            message: "empty dataset".into(),
        });
    }
    let ds: Dataset = ron::from_str(text).map_err(|e| Error::SchemaError {
        location: format!("{:?}", e.position),
        message: e.code.to_string(),
    })?;
    validate_schema(&ds)?;
    Ok(ds)
}

impl Dataset {
    pub fn index(&self, t: i64) -> Result<&IndexData> {
        self.indices
            .iter()
            .find(|d| d.t == t)
            .ok_or_else(|| Error::NoMatch(format!("no data for index t={t}")))
    }

    pub fn supported_t(&self) -> Vec<i64> {
        self.indices.iter().map(|d| d.t).collect()
    }

    pub fn algebras_for(&self, t: i64) -> Vec<&AlgebraSpec> {
        self.algebras.iter().filter(|a| a.t == t).collect()
    }
}

fn validate_schema(ds: &Dataset) -> Result<()> {
    let err = |loc: String, msg: String| Error::SchemaError { location: loc, message: msg };
    for idx in &ds.indices {
        let loc = format!("t={}", idx.t);
        if idx.t <= 0 {
            return Err(err(loc, "index must be positive".into()));
        }
        if idx.basis.is_empty() {
            return Err(err(loc, "no basis forms".into()));
        }
        for (i, b) in idx.basis.iter().enumerate() {
            if b.label != i + 1 {
                return Err(err(loc.clone(), format!("basis labels out of order at {}", b.label)));
            }
            for line in &b.printed {
                for pc in &line.coeffs {
                    if let Some(norm) = pc.norm {
                        let recomputed = 4 * idx.t * line.q - pc.l * pc.l;
                        if recomputed != norm {
                            return Err(err(
                                loc.clone(),
                                format!(
                                    "form {} line q={} l={}: bracket {} but 4tq-l^2={}",
                                    b.label, line.q, pc.l, norm, recomputed
                                ),
                            ));
                        }
                    }
                }
            }
        }
        // Gram: symmetric and recomputed from pm0 rows.
        let n = idx.pm0.len();
        if idx.gram.len() != n || idx.gram.iter().any(|r| r.len() != n) {
            return Err(err(loc.clone(), "gram matrix shape mismatch".into()));
        }
        let vecs: Vec<LatticeVector> = idx
            .pm0
            .iter()
            .map(|&(a, b, c)| LatticeVector::from_ints(a, b, c))
            .collect();
        for i in 0..n {
            for j in 0..n {
                if idx.gram[i][j] != idx.gram[j][i] {
                    return Err(err(loc.clone(), format!("gram not symmetric at ({i},{j})")));
                }
                let p = lattice::pair2t_int(idx.t, &vecs[i], &vecs[j]);
                if p != idx.gram[i][j] {
                    return Err(err(
                        loc.clone(),
                        format!("gram ({i},{j}) printed {} but pairing gives {p}", idx.gram[i][j]),
                    ));
                }
            }
        }
        // Classes: representative consistency, and mul shape.
        if idx.mul.len() != idx.classes.len() {
            return Err(err(loc.clone(), "mul rows != class count".into()));
        }
        for row in &idx.mul {
            if row.len() != idx.basis.len() {
                return Err(err(loc.clone(), "mul columns != basis size".into()));
            }
        }
        for c in &idx.classes {
            let v = LatticeVector::from_ints(c.rep.0, c.rep.1, c.rep.2);
            let cls = NormClass::new(idx.t, lattice::discriminant(idx.t, &v), c.rep.1);
            if cls != (NormClass { d: c.d, l_residue: c.l_residue }) {
                return Err(err(
                    loc.clone(),
                    format!(
                        "class ({},{}) has representative {:?} of class {}",
                        c.d, c.l_residue, c.rep, cls
                    ),
                ));
            }
        }
    }
    // Algebra records.
    for a in &ds.algebras {
        let loc = format!("algebra t={} c={:?}", a.t, a.combination);
        let idx = ds.index(a.t)?;
        if a.combination.len() != idx.basis.len() {
            return Err(err(loc.clone(), "combination length != basis size".into()));
        }
        if !a.combination.iter().all(|&c| c == 0 || c == 1) {
            return Err(err(loc.clone(), "combination entries must be 0 or 1".into()));
        }
        for &g in &a.gens {
            if g == 0 || g > idx.pm0.len() {
                return Err(err(loc.clone(), format!("generator index {g} out of range")));
            }
        }
        if let CartanSpec::Finite(m) = &a.cartan {
            let k = m.len();
            if m.iter().any(|r| r.len() != k) {
                return Err(err(loc.clone(), "cartan matrix not square".into()));
            }
            for (i, row) in m.iter().enumerate() {
                if row[i] != 2 {
                    return Err(err(loc.clone(), format!("cartan diagonal {} != 2", row[i])));
                }
            }
        }
        if a.rho.0 .1 == 0 || a.rho.1 .1 == 0 || a.rho.2 .1 == 0 {
            return Err(err(loc, "rho denominator zero".into()));
        }
    }
    Ok(())
}

/// Re-derivation report: every check that `validate_schema` performs plus
/// class/bracket cross-links, as a printable list of findings.
pub fn validate_internal(ds: &Dataset) -> Vec<String> {
    let mut findings = Vec::new();
    for idx in &ds.indices {
        findings.push(format!(
            "t={}: {} basis forms, {} wall vectors, {} classes: gram and brackets re-derived",
            idx.t,
            idx.basis.len(),
            idx.pm0.len(),
            idx.classes.len()
        ));
        for e in &idx.errata {
            findings.push(format!("t={}: erratum: {e}", idx.t));
        }
    }
    findings.push(format!(
        "{} algebra records over indices {:?}",
        ds.algebras.len(),
        ds.supported_t()
    ));
    findings
}

impl AlgebraSpec {
    pub fn rho_vector(&self) -> LatticeVector {
        LatticeVector::new(
            crate::qr(self.rho.0 .0, self.rho.0 .1),
            crate::qr(self.rho.1 .0, self.rho.1 .1),
            crate::qr(self.rho.2 .0, self.rho.2 .1),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_schema_error() {
        assert!(matches!(parse(""), Err(Error::SchemaError { .. })));
    }

    #[test]
    fn bundled_dataset_loads() {
        let ds = load_default().unwrap();
        assert_eq!(ds.indices.len(), 9);
        let ranks: Vec<usize> = ds.indices.iter().map(|d| d.basis.len()).collect();
        assert_eq!(ranks, vec![2, 3, 3, 3, 3, 3, 4, 2, 3]);
        assert_eq!(ds.algebras.len(), 29);
        assert_eq!(
            ds.supported_t(),
            vec![1, 2, 3, 4, 8, 9, 12, 16, 36]
        );
        let total_forms: usize = ranks.iter().sum();
        assert_eq!(total_forms, 26);
    }

    #[test]
    fn gram_example() {
        let ds = load_default().unwrap();
        let d1 = ds.index(1).unwrap();
        assert_eq!(d1.gram, vec![vec![4, -2, -2], vec![-2, 1, 0], vec![-2, 0, 4]]);
    }
}
