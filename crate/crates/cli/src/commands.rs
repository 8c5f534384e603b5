use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use georoots::arith::is_squarefree;
use georoots::density::{self, kappa_and_vol, ClassMask};
use georoots::geodesics::{apply_gamma, base_geodesic_set, enumerate_tops, expected_splitting};
use georoots::negdisc::{class_number_imaginary, enumerate_orbit_points};
use georoots::orders::{ideal_conjugate, ideal_from_root, ideal_mul, narrow_class_group, unit_relation, unit_trace_coords};
use georoots::roots::{sieve_roots, take_roots, RootFilter};
use georoots::statistics::{pair_correlation_exact, Fraction, Normalization};
use georoots::{Error, OrderTag};
use num_rational::Ratio;

use crate::output::{Cell, Format, Table};
use crate::{ClassArg, Cli, Command, FilterArgs};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError(msg.into()).into())
}

pub fn is_config_error(e: &anyhow::Error) -> bool {
    if e.downcast_ref::<ConfigError>().is_some() {
        return true;
    }
    matches!(
        e.downcast_ref::<Error>(),
        Some(Error::InvalidInput(_) | Error::Unsupported(_) | Error::SequenceExhausted)
    )
}

pub fn validate_d(d: i64) -> Result<()> {
    if d.rem_euclid(4) != 1 {
        return config("D must be ≡ 1 mod 4");
    }
    if d == 1 {
        return config("D must not be 1");
    }
    if !is_squarefree(d) {
        return config("D must be squarefree");
    }
    Ok(())
}

fn validate_filter(f: &FilterArgs) -> Result<RootFilter> {
    validate_d(f.d)?;
    if f.n == 0 {
        return config("n must be positive");
    }
    RootFilter::new(f.d, f.n, f.nu).map_err(|_| ConfigError(format!("ν = {} does not satisfy ν² ≡ D mod {}", f.nu, f.n)).into())
}

fn order_of(c: ClassArg) -> Option<OrderTag> {
    match c {
        ClassArg::Total => None,
        ClassArg::O1 => Some(OrderTag::O1),
        ClassArg::O2 => Some(OrderTag::O2),
    }
}

fn mask_of(c: ClassArg) -> ClassMask {
    order_of(c).map_or(ClassMask::Total, ClassMask::Order)
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| ConfigError(format!("bad range bound {t:?}")));
    let (lo, hi) = match s.split_once(':') {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let a = parse(s)?;
            (-a.abs(), a.abs())
        }
    };
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return config(format!("range {s:?} is empty"));
    }
    Ok((lo, hi))
}

fn filter_meta(t: &mut Table, f: &FilterArgs) {
    t.meta("D", f.d).meta("n", f.n).meta("nu", f.nu);
}

pub fn run(cli: &Cli) -> Result<u8> {
    let fmt = |default: Format| cli.format.unwrap_or(default);
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Roots { filter, m, class } => {
            let f = validate_filter(filter)?;
            let seq = sieve_roots(filter.d, *m, f)?;
            let mut t = Table::new(&["m", "mu", "class"]);
            filter_meta(&mut t, filter);
            t.meta("M", *m).meta("class", format!("{class:?}"));
            for r in seq.roots.iter().filter(|r| order_of(*class).is_none_or(|o| r.order_class == o)) {
                t.push(vec![r.m.into(), r.mu.into(), r.order_class.to_string().into()]);
            }
            t.emit(fmt(Format::Csv), out)?;
            Ok(0)
        }
        Command::Paircorr { filter, n_points, bins, range, class, density } => {
            let f = validate_filter(filter)?;
            if *n_points < 2 {
                return config("need N ≥ 2");
            }
            if *bins == 0 {
                return config("need at least one bin");
            }
            let (lo, hi) = parse_range(range)?;
            let roots = take_roots(filter.d, f, *n_points, order_of(*class))?;
            let pts: Vec<Fraction> = roots.iter().map(|r| Fraction::new(r.mu, r.m)).collect();
            let norm = if *density { Normalization::PairCorrelation } else { Normalization::RawPairs };
            let h = pair_correlation_exact(&pts, lo, hi, *bins)?.with_normalization(norm);
            let mut t = Table::new(&["lo", "hi", "center", "count", "value"]);
            filter_meta(&mut t, filter);
            t.meta("N", *n_points)
                .meta("class", format!("{class:?}"))
                .meta("normalization", if *density { "pairs/(N*width)" } else { "pairs/N" })
                .meta("max_m", roots.last().map_or(0, |r| r.m));
            for (i, v) in h.values().into_iter().enumerate() {
                let (a, b) = h.bin_edges(i);
                t.push(vec![a.into(), b.into(), h.bin_center(i).into(), (h.counts[i]).into(), v.into()]);
            }
            t.emit(fmt(Format::Csv), out)?;
            Ok(0)
        }
        Command::Density { filter, qmax, class, vmin, vmax, step } => {
            validate_filter(filter)?;
            if filter.d < 0 {
                return config("densities are only available for D > 0");
            }
            if !(step > &0.0) || !(vmax > vmin) {
                return config("need step > 0 and vmax > vmin");
            }
            if !(*qmax > 1.0) {
                return config("qmax must exceed 1");
            }
            let base = base_geodesic_set(filter.d, filter.n, filter.nu)?;
            let count = ((vmax - vmin) / step).round() as i64;
            let grid: Vec<f64> = (0..=count)
                .map(|i| vmin + i as f64 * step)
                .map(|v| (v / step).round() * step)
                .filter(|v| v.abs() >= 0.01 - 1e-12)
                .collect();
            let table = density::omega(&base, &grid, *qmax, mask_of(*class))?;
            let mut t = Table::new(&["v", "omega"]);
            filter_meta(&mut t, filter);
            t.meta("class", table.class_mask.to_string())
                .meta("q_max", table.q_max)
                .meta("kappa", table.kappa)
                .meta("vol", table.vol)
                .meta("terms_used", table.terms_used)
                .meta("skipped_shared", table.skipped_shared)
                .meta("tail_estimate", table.tail_estimate);
            for (v, w) in table.grid.iter().zip(&table.omega) {
                t.push(vec![(*v).into(), (*w).into()]);
            }
            t.emit(fmt(Format::Csv), out)?;
            Ok(0)
        }
        Command::Figure { which, n_points, qmax, bins, vmax } => {
            let dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("figures"));
            let summary = figure(*which, *n_points, *qmax, *bins, *vmax, &dir, fmt(Format::Csv))?;
            summary.emit(fmt(Format::Csv), None)?;
            Ok(0)
        }
        Command::Verify { filter, m } => {
            validate_filter(filter)?;
            let report = verify(filter, *m)?;
            let pass = report.rows.iter().all(|r| matches!(r[1], Cell::Bool(true)));
            let mut report = report;
            report.meta("all_pass", pass);
            report.emit(fmt(Format::Json), out)?;
            Ok(if pass { 0 } else { 1 })
        }
        Command::Units { d } => {
            validate_d(*d)?;
            let mut t = Table::new(&["order", "epsilon", "t", "u", "log_epsilon"]);
            t.meta("D", *d);
            if *d < 0 {
                t.meta("note", "imaginary orders have finitely many units");
                let w2 = if *d == -3 { 6 } else { 2 };
                t.meta("units_O1", 2usize).meta("units_O2", w2 as usize);
            } else {
                let u = unit_relation(*d)?;
                t.meta("relation", format!("{:?}", u.relation));
                for order in [OrderTag::O1, OrderTag::O2] {
                    let e = u.eps(order);
                    let (tt, uu) = unit_trace_coords(e, order);
                    t.push(vec![order.to_string().into(), e.to_string().into(), tt.to_string().into(), uu.to_string().into(), e.to_f64().ln().into()]);
                }
            }
            t.emit(fmt(Format::Csv), out)?;
            Ok(0)
        }
        Command::Classgroup { d } => {
            validate_d(*d)?;
            let mut t = Table::new(&["order", "class", "m", "mu", "form"]);
            t.meta("D", *d);
            for order in [OrderTag::O1, OrderTag::O2] {
                let g = narrow_class_group(*d, order)?;
                t.meta(&format!("h_{order}"), g.h_plus);
                for (k, rep) in g.reps.iter().enumerate() {
                    t.push(vec![order.to_string().into(), k.into(), rep.m.into(), rep.mu.into(), rep.form().to_string().into()]);
                }
            }
            t.emit(fmt(Format::Csv), out)?;
            Ok(0)
        }
    }
}

/// The parts of each figure: `(D, mask, label)`.
pub fn figure_parts(which: u8) -> Vec<(i64, ClassMask, &'static str)> {
    match which {
        1 => vec![(5, ClassMask::Total, "total")],
        2 => vec![(5, ClassMask::Order(OrderTag::O1), "O1"), (5, ClassMask::Order(OrderTag::O2), "O2")],
        _ => vec![(17, ClassMask::Order(OrderTag::O1), "O1"), (17, ClassMask::Order(OrderTag::O2), "O2")],
    }
}

/// Bin-by-bin empirical and theoretical pair correlation on `[0, vmax)`.
#[derive(Clone, Debug)]
pub struct FigurePart {
    pub edges: Vec<(f64, f64)>,
    pub empirical: Vec<f64>,
    pub theory: Vec<f64>,
    pub kappa: f64,
    pub terms: usize,
    pub max_m: u64,
}

impl FigurePart {
    pub fn max_abs_dev(&self) -> f64 {
        self.empirical.iter().zip(&self.theory).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn mean_abs_dev(&self) -> f64 {
        let n = self.empirical.len() as f64;
        self.empirical.iter().zip(&self.theory).map(|(a, b)| (a - b).abs()).sum::<f64>() / n
    }
}

pub fn figure_part(d: i64, mask: ClassMask, n_points: usize, qmax: f64, bins: usize, vmax: f64) -> Result<FigurePart> {
    let class = match mask {
        ClassMask::Total => None,
        ClassMask::Order(o) => Some(o),
    };
    let roots = take_roots(d, RootFilter::trivial(), n_points, class)?;
    let pts: Vec<Fraction> = roots.iter().map(|r| Fraction::new(r.mu, r.m)).collect();
    let h = pair_correlation_exact(&pts, 0.0, vmax, bins)?;
    let base = base_geodesic_set(d, 1, 0)?;
    let (kappa, vol) = kappa_and_vol(&base, mask);
    let ts = density::enumerate_coset_terms(&base, qmax, mask)?;
    let theory = density::omega_bin_averages(&ts.terms, kappa, vol, 0.0, vmax, bins);
    Ok(FigurePart {
        edges: (0..bins).map(|i| h.bin_edges(i)).collect(),
        empirical: h.values(),
        theory,
        kappa,
        terms: ts.terms.len(),
        max_m: roots.last().map_or(0, |r| r.m),
    })
}

fn figure(which: u8, n_points: usize, qmax: f64, bins: usize, vmax: f64, dir: &Path, format: Format) -> Result<Table> {
    if n_points < 2 || bins == 0 || !(vmax > 0.0) {
        return config("need N ≥ 2, bins ≥ 1 and vmax > 0");
    }
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let mut summary = Table::new(&["part", "D", "max_abs_dev", "mean_abs_dev", "pass", "empirical_file", "theory_file"]);
    summary.meta("figure", which as u64).meta("N", n_points).meta("q_max", qmax);
    for (d, mask, label) in figure_parts(which) {
        let part = figure_part(d, mask, n_points, qmax, bins, vmax)?;
        let emp_path = dir.join(format!("figure{which}_{label}_empirical.{ext}"));
        let th_path = dir.join(format!("figure{which}_{label}_theory.{ext}"));
        let mut e = Table::new(&["lo", "hi", "pair_correlation"]);
        e.meta("D", d).meta("class", label).meta("N", n_points).meta("max_m", part.max_m);
        let mut t = Table::new(&["lo", "hi", "omega"]);
        t.meta("D", d).meta("class", label).meta("q_max", qmax).meta("kappa", part.kappa).meta("terms_used", part.terms);
        for (i, &(a, b)) in part.edges.iter().enumerate() {
            e.push(vec![a.into(), b.into(), part.empirical[i].into()]);
            t.push(vec![a.into(), b.into(), part.theory[i].into()]);
        }
        e.emit(format, Some(&emp_path))?;
        t.emit(format, Some(&th_path))?;
        let (mx, mad) = (part.max_abs_dev(), part.mean_abs_dev());
        summary.push(vec![
            label.into(),
            d.into(),
            mx.into(),
            mad.into(),
            (mx <= 0.05 && mad <= 0.02).into(),
            emp_path.display().to_string().into(),
            th_path.display().to_string().into(),
        ]);
    }
    Ok(summary)
}

fn check(t: &mut Table, name: &str, pass: bool, detail: String) {
    t.push(vec![name.into(), pass.into(), detail.into()]);
}

fn verify(f: &FilterArgs, big_m: u64) -> Result<Table> {
    let mut t = Table::new(&["check", "pass", "detail"]);
    filter_meta(&mut t, f);
    t.meta("M", big_m);
    let filter = RootFilter::new(f.d, f.n, f.nu)?;
    let sieve: BTreeSet<(u64, u64)> = sieve_roots(f.d, big_m, filter)?.roots.iter().map(|r| (r.m, r.mu)).collect();
    if f.d < 0 {
        let r = enumerate_orbit_points(f.d, f.n, f.nu, big_m)?;
        let pass = r.roots() == sieve && r.produced == r.points.len();
        check(&mut t, "orbit_points_equal_sieve", pass, format!("{} orbit points, {} sieve roots", r.points.len(), sieve.len()));
        for order in [OrderTag::O1, OrderTag::O2] {
            let g = narrow_class_group(f.d, order)?;
            let h = class_number_imaginary(order.discriminant(f.d));
            check(&mut t, &format!("class_number_{order}"), g.h_plus == h, format!("h = {h}"));
        }
        return Ok(t);
    }
    let base = base_geodesic_set(f.d, f.n, f.nu)?;
    let report = enumerate_tops(&base, big_m)?;
    let pass = report.roots == sieve && report.duplicates() == 0 && report.stray == 0;
    check(
        &mut t,
        "tops_equal_sieve",
        pass,
        format!("{} tops, {} sieve roots, {} duplicates, {} stray", report.roots.len(), sieve.len(), report.duplicates(), report.stray),
    );
    let small_m = big_m.min(500);
    let mut exceptions = 0usize;
    for r in sieve_roots(f.d, small_m, RootFilter::trivial())?.roots {
        let i = ideal_from_root(f.d, r.m, r.mu, OrderTag::O1)?;
        let p = ideal_mul(&i, &ideal_conjugate(&i))?;
        let principal = p.scalar == Ratio::from_integer(r.m) && p.m == 1;
        let cof = (f.d as i128 - (r.mu as i128).pow(2)) / r.m as i128;
        if principal != (r.m % 2 == 1 || cof % 2 != 0) {
            exceptions += 1;
        }
    }
    check(&mut t, "invertibility", exceptions == 0, format!("{exceptions} exceptions for m ≤ {small_m}"));
    let u = &base.units;
    let rel_ok = u.eps1 == u.eps2 || u.eps1 == u.eps2.pow(3);
    check(&mut t, "unit_relation", rel_ok, format!("ε₁ = {}, ε₂ = {}, {:?}", u.eps1, u.eps2, u.relation));
    if base.h2 > 0 {
        let want = expected_splitting(f.n, u.relation);
        check(&mut t, "splitting", base.s == want, format!("s = {}, expected {want}", base.s));
    }
    let fixed = base.geodesics.iter().all(|g| g.stabilizer.is_in_gamma0(f.n) && apply_gamma(&g.stabilizer, &g.geodesic) == g.geodesic);
    check(&mut t, "stabilizers", fixed, format!("{} base geodesics", base.geodesics.len()));
    let (worst, _) = density::simplification_defect(5.0, 10.0, 0.01, 1e-6);
    check(&mut t, "h_identity", worst < 1e-12, format!("max deviation {worst:e}"));
    Ok(t)
}
