//! Command-line interface: basis construction, dataset verification,
//! lifting, classification, and reflectivity testing with reproducible,
//! byte-stable output.

use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use lorkm3::classify;
use lorkm3::dataset::{self, Dataset, IndexData};
use lorkm3::error::Error;
use lorkm3::jacobi::{JacobiFourier, JacobiRing};
use lorkm3::lattice::{self, LatticeVector};
use lorkm3::lift;
use lorkm3::qseries;
use lorkm3::reflective;

#[derive(Parser)]
#[command(name = "lorkm3", version, about = "Exact reconstruction of the rank-three reflective Jacobi form tables, their Borcherds-type lifts, and the 29 denominator forms")]
struct Cli {
    /// Dataset file (RON); the bundled tables when omitted.
    #[arg(long, global = true)]
    dataset: Option<String>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Args)]
struct TArg {
    /// Lattice index t; all supported indices when omitted.
    #[arg(long)]
    t: Option<i64>,
    /// Working q-order override (exclusive bound on integer q-exponents).
    #[arg(long)]
    q_order: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the reflective basis for an index and print it.
    Basis {
        #[command(flatten)]
        sel: TArg,
    },
    /// Re-derive the dataset and compare every stored value.
    Verify {
        /// `tables` checks the stored tables; `all` additionally runs the
        /// enumeration counts and series identities.
        #[arg(value_parser = ["tables", "all"], default_value = "tables")]
        scope: String,
        #[command(flatten)]
        sel: TArg,
    },
    /// Lift one combination of basis forms and expand the product.
    Lift {
        #[command(flatten)]
        sel: TArg,
        /// Comma-separated combination coefficients, one per basis form.
        #[arg(long)]
        combination: String,
        /// Bound on the total q-exponent of the expansion.
        #[arg(long, default_value_t = 4)]
        box_n: i64,
        /// Bound on the total s-exponent of the expansion.
        #[arg(long, default_value_t = 4)]
        box_m: i64,
    },
    /// Enumerate denominator forms and assemble the algebra records.
    Classify {
        #[command(flatten)]
        sel: TArg,
        /// Coefficient search box `lo..hi` (inclusive).
        #[arg(long, default_value = "0..1")]
        search_box: String,
    },
    /// Run the reflectivity test on a serialized Fourier expansion.
    Reflective {
        /// File in the `basis` record format.
        input: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let code = match run(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            out.push_str(&format!("error: {e}\n"));
            match e {
                Error::InsufficientTruncation(_) | Error::OutOfTruncation { .. } => {
                    ExitCode::from(3)
                }
                Error::SchemaError { .. } | Error::Io(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    };
    let sink_res = match &cli.out {
        Some(path) => std::fs::write(path, out.as_bytes()),
        None => std::io::stdout().write_all(out.as_bytes()),
    };
    if sink_res.is_err() {
        return ExitCode::from(2);
    }
    code
}

fn load(cli: &Cli) -> Result<Dataset, Error> {
    match &cli.dataset {
        Some(path) => dataset::load_path(std::path::Path::new(path)),
        None => dataset::load_default(),
    }
}

fn selected_t(ds: &Dataset, sel: &TArg) -> Result<Vec<i64>, Error> {
    match sel.t {
        Some(t) => {
            ds.index(t)?;
            Ok(vec![t])
        }
        None => Ok(ds.supported_t()),
    }
}

fn build(idx: &IndexData, q_order: Option<u32>) -> Result<Vec<JacobiFourier>, Error> {
    let ring = JacobiRing::new(q_order.unwrap_or(idx.q_order))?;
    reflective::build_basis(idx, &ring)
}

fn run(cli: &Cli, out: &mut String) -> Result<(), Error> {
    match &cli.command {
        Command::Basis { sel } => cmd_basis(cli, sel, out),
        Command::Verify { scope, sel } => cmd_verify(cli, scope, sel, out),
        Command::Lift { sel, combination, box_n, box_m } => {
            cmd_lift(cli, sel, combination, *box_n, *box_m, out)
        }
        Command::Classify { sel, search_box } => cmd_classify(cli, sel, search_box, out),
        Command::Reflective { input } => cmd_reflective(input, out),
    }
}

fn cmd_basis(cli: &Cli, sel: &TArg, out: &mut String) -> Result<(), Error> {
    let ds = load(cli)?;
    for t in selected_t(&ds, sel)? {
        let idx = ds.index(t)?;
        let forms = build(idx, sel.q_order)?;
        for (spec, form) in idx.basis.iter().zip(&forms) {
            match cli.format {
                Format::Machine => {
                    out.push_str(&format!("form t={t} label={}\n", spec.label));
                    out.push_str(&form.to_records());
                }
                Format::Text => {
                    out.push_str(&format!(
                        "t={t} form {}: weight2={} index2={} terms={} cutoff24={}\n",
                        spec.label,
                        form.weight2,
                        form.index2,
                        form.terms().len(),
                        form.q_trunc24()
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Every stored-table comparison for one index; returns report lines.
fn verify_index(ds: &Dataset, t: i64, q_order: Option<u32>) -> Result<String, Error> {
    let idx = ds.index(t)?;
    let forms = build(idx, q_order)?;
    let mut out = String::new();
    out.push_str(&format!("t={t} printed-coefficients=ok\n"));
    for (spec, form) in idx.basis.iter().zip(&forms) {
        let rep = reflective::is_reflective(form)?;
        if !rep.reflective {
            let v = &rep.violations[0];
            return Err(Error::MismatchAgainstTable(format!(
                "t={t} form {} not reflective: f({},{}) with norm -{}",
                spec.label, v.n, v.l, v.d
            )));
        }
        if let Some(pos) = form.check_evenness() {
            return Err(Error::MismatchAgainstTable(format!(
                "t={t} form {} breaks evenness at {pos:?}",
                spec.label
            )));
        }
        if let Some(pair) = form.check_norm_invariance() {
            return Err(Error::MismatchAgainstTable(format!(
                "t={t} form {} breaks norm invariance at {pair:?}",
                spec.label
            )));
        }
    }
    out.push_str(&format!("t={t} reflective=ok evenness=ok norm-invariance=ok\n"));
    // Gram matrix of the chamber walls.
    let walls: Vec<LatticeVector> =
        idx.pm0.iter().map(|&(n, l, m)| LatticeVector::from_ints(n, l, m)).collect();
    for (i, a) in walls.iter().enumerate() {
        for (j, b) in walls.iter().enumerate() {
            let got = lattice::pair2t_int(t, a, b);
            if got != idx.gram[i][j] {
                return Err(Error::MismatchAgainstTable(format!(
                    "t={t} Gram entry ({i},{j}): computed {got}, stored {}",
                    idx.gram[i][j]
                )));
            }
        }
    }
    out.push_str(&format!("t={t} gram=ok\n"));
    // Divisor-multiplicity matrix, entry by entry.
    let reps = classify::class_reps(idx);
    for (ci, (_, rep)) in reps.iter().enumerate() {
        for (fi, form) in forms.iter().enumerate() {
            let got = lift::divisor_multiplicity(form, rep)?;
            if got != idx.mul[ci][fi] {
                return Err(Error::MismatchAgainstTable(format!(
                    "t={t} multiplicity (class {ci}, form {fi}): computed {got}, stored {}",
                    idx.mul[ci][fi]
                )));
            }
        }
    }
    out.push_str(&format!("t={t} multiplicities=ok\n"));
    // Algebra records: Weyl vector, weight, Cartan matrix.
    let mut n_alg = 0;
    for spec in ds.algebras_for(t) {
        classify::assemble_record(ds, idx, &forms, &spec.combination)?;
        n_alg += 1;
    }
    out.push_str(&format!("t={t} algebras=ok count={n_alg}\n"));
    Ok(out)
}

fn cmd_verify(cli: &Cli, scope: &str, sel: &TArg, out: &mut String) -> Result<(), Error> {
    let ds = load(cli)?;
    let ts = selected_t(&ds, sel)?;
    // Parallel across indices; results are merged in index order so the
    // output is identical for any thread count.
    let reports: Vec<Result<String, Error>> =
        ts.par_iter().map(|&t| verify_index(&ds, t, sel.q_order)).collect();
    for r in reports {
        out.push_str(&r?);
    }
    if scope == "all" {
        // Series identities.
        let e4 = qseries::e4(51);
        let e6 = qseries::e6(51);
        let delta = qseries::delta(51);
        let lhs = e4.pow(3).sub(&e6.pow(2));
        if lhs != delta.scalar_mul(&lorkm3::qi(1728)) {
            return Err(Error::MismatchAgainstTable(
                "E4^3 - E6^2 differs from 1728 Delta".into(),
            ));
        }
        // Truncate to delta's cutoff: the power carries a larger guaranteed
        // truncation, and equality compares truncation metadata too.
        if qseries::eta(51).pow(24).truncate(delta.trunc24()) != delta {
            return Err(Error::MismatchAgainstTable("eta^24 differs from Delta".into()));
        }
        out.push_str("series-identities=ok\n");
        // Enumeration counts.
        for &t in &ts {
            let idx = ds.index(t)?;
            let forms = build(idx, sel.q_order)?;
            let found = classify::enumerate_denominator_forms(idx, &forms, 0, 1)?;
            let want = ds.algebras_for(t).len();
            if found.len() != want {
                return Err(Error::MismatchAgainstTable(format!(
                    "t={t}: enumeration found {} forms, tables list {want}",
                    found.len()
                )));
            }
            out.push_str(&format!("t={t} enumeration=ok count={}\n", found.len()));
        }
    }
    out.push_str("verify=pass\n");
    Ok(())
}

fn parse_combination(s: &str) -> Result<Vec<i64>, Error> {
    s.split(',')
        .map(|x| {
            x.trim().parse::<i64>().map_err(|_| Error::SchemaError {
                location: "--combination".into(),
                message: format!("bad coefficient {x:?}"),
            })
        })
        .collect()
}

fn cmd_lift(
    cli: &Cli,
    sel: &TArg,
    combination: &str,
    box_n: i64,
    box_m: i64,
    out: &mut String,
) -> Result<(), Error> {
    let ds = load(cli)?;
    let t = sel.t.ok_or_else(|| Error::SchemaError {
        location: "--t".into(),
        message: "lift needs an index".into(),
    })?;
    let idx = ds.index(t)?;
    let c = parse_combination(combination)?;
    // The expansion reads Fourier rows up to box_n * box_m.
    let needed = (box_n * box_m + 1).max(idx.q_order as i64) as u32;
    let forms = build(idx, sel.q_order.or(Some(needed)))?;
    let combined = reflective::combine(&forms, &c)?;
    let expansion = lift::expand_product(&combined, box_n, box_m)?;
    let lifted = lift::lift(&combined, &classify::class_reps(idx), Some(expansion))?;
    out.push_str(&lifted.header_text());
    let exp = lifted.expansion.as_ref().unwrap();
    match cli.format {
        Format::Machine => out.push_str(&exp.to_records()),
        Format::Text => {
            out.push_str(&format!(
                "expansion terms={} box=({},{})\n",
                exp.terms().len(),
                exp.box_n,
                exp.box_m
            ));
        }
    }
    Ok(())
}

fn parse_box(s: &str) -> Result<(i64, i64), Error> {
    let bad = || Error::SchemaError {
        location: "--search-box".into(),
        message: format!("expected lo..hi, got {s:?}"),
    };
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let lo = lo.trim().parse::<i64>().map_err(|_| bad())?;
    let hi = hi.trim().parse::<i64>().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn cmd_classify(cli: &Cli, sel: &TArg, search_box: &str, out: &mut String) -> Result<(), Error> {
    let ds = load(cli)?;
    let (lo, hi) = parse_box(search_box)?;
    let mut total = 0;
    for t in selected_t(&ds, sel)? {
        let idx = ds.index(t)?;
        let forms = build(idx, sel.q_order)?;
        let combos = classify::enumerate_denominator_forms(idx, &forms, lo, hi)?;
        for c in &combos {
            let r = classify::assemble_record(&ds, idx, &forms, c)?;
            total += 1;
            out.push_str(&format!(
                "t={t} c={:?} weight={} name={} parity={} chamber={}{}\n",
                r.combination,
                r.lift.weight,
                r.name,
                r.lift.parity_d.rem_euclid(2),
                r.pm.len(),
                if r.infinite { " (window)" } else { "" }
            ));
            if cli.format == Format::Machine {
                let (a, b, cc) = &r.lift.weyl_vector;
                out.push_str(&format!("rho={a} {b} {cc}\n"));
                for row in &r.cartan {
                    out.push_str(&format!("cartan={row:?}\n"));
                }
                for v in &r.pm {
                    out.push_str(&format!("root={} {} {}\n", v.n, v.l, v.m));
                }
            }
        }
    }
    out.push_str(&format!("records={total}\n"));
    Ok(())
}

fn cmd_reflective(input: &str, out: &mut String) -> Result<(), Error> {
    let text = std::fs::read_to_string(input)?;
    let form = JacobiFourier::from_records(&text)?;
    let rep = reflective::is_reflective(&form)?;
    out.push_str(&format!("t={} reflective={}\n", rep.t, rep.reflective));
    for (cls, v) in &rep.singular_classes {
        out.push_str(&format!("singular {cls} value={v}\n"));
    }
    for v in &rep.violations {
        out.push_str(&format!("violation f({},{}) norm=-{} value={}\n", v.n, v.l, v.d, v.value));
    }
    if !rep.reflective {
        return Err(Error::MismatchAgainstTable("form is not reflective".into()));
    }
    Ok(())
}
