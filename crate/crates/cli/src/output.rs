//! CSV tables: a header and rows of preformatted fields. Floats use Rust's
//! shortest round-trip formatting and lines end in LF.

use ffpe_verify::ResidualReport;
use levy_core::FddBatch;
use semimarkov::KernelEval;
use std::io::{self, Write};
use std::path::Path;
use transforms::TransformProbe;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub fn num(v: f64) -> String {
    format!("{v}")
}

/// Writes `table` to `out`; every row must match the header width.
pub fn write_csv<W: Write>(table: &Table, out: W) -> io::Result<()> {
    let width = table.header.len();
    if let Some(i) = table.rows.iter().position(|r| r.len() != width) {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!("row {i} has {} fields, header has {width}", table.rows[i].len()),
        ));
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(&table.header).map_err(io_error)?;
    for r in &table.rows {
        w.write_record(r).map_err(io_error)?;
    }
    w.flush()
}

/// Keeps the underlying IO error kind (a broken pipe in particular).
fn io_error(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

pub fn write_csv_path(table: &Table, path: &Path) -> io::Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(table, io::BufWriter::new(file))
}

/// One row per sample and time: `seed, sample_id, t, E, R, X`.
pub fn fdd_table(batch: &FddBatch) -> Table {
    let mut t = Table::new(&["seed", "sample_id", "t", "E", "R", "X"]);
    let m = batch.times.len();
    for i in 0..batch.n_samples() {
        for (j, &time) in batch.times.iter().enumerate() {
            let at = i * m + j;
            t.push(vec![
                batch.seed.to_string(),
                i.to_string(),
                num(time),
                num(batch.e[at]),
                num(batch.r[at]),
                num(batch.x[at]),
            ]);
        }
    }
    t
}

/// `k1..kn, s1..sn, re, im, std_error, n_samples, seed`; the seed is empty
/// for closed-form values.
pub fn probe_table(n: usize, probes: &[TransformProbe]) -> Table {
    let mut header: Vec<String> = (1..=n).map(|i| format!("k{i}")).collect();
    header.extend((1..=n).map(|i| format!("s{i}")));
    header.extend(["re", "im", "std_error", "n_samples", "seed"].map(String::from));
    let mut t = Table { header, rows: Vec::new() };
    for p in probes {
        let mut row: Vec<String> = p.k.iter().chain(&p.s).map(|v| num(*v)).collect();
        row.push(num(p.value.re));
        row.push(num(p.value.im));
        row.push(num(p.std_error));
        row.push(p.n_samples.to_string());
        row.push(p.seed.map(|s| s.to_string()).unwrap_or_default());
        t.push(row);
    }
    t
}

/// The atom as one row, then the a.c. cell masses.
pub fn kernel_table(k: &KernelEval) -> Table {
    let mut t = Table::new(&["part", "x_lo", "x_hi", "r_lo", "r_hi", "mass"]);
    let (ax, ar) = k.atom_location;
    t.push(vec!["atom".into(), num(ax), num(ax), num(ar), num(ar), num(k.atom_weight)]);
    let p = &k.partition;
    for i in 0..p.nx() {
        for j in 0..p.nr() {
            t.push(vec![
                "cell".into(),
                num(p.x_edges[i]),
                num(p.x_edges[i + 1]),
                num(p.r_edges[j]),
                num(p.r_edges[j + 1]),
                num(k.mass(i, j)),
            ]);
        }
    }
    t
}

/// One row per probe, plus an `extrapolation` row when present.
pub fn report_table(r: &ResidualReport) -> Table {
    let mut t = Table::new(&[
        "identity", "label", "lhs_re", "lhs_im", "lhs_se", "rhs_re", "rhs_im", "rhs_se", "residual", "sigma",
        "tolerance", "status",
    ]);
    let id = r.identity.as_str();
    for p in &r.probes {
        t.push(vec![
            id.into(),
            p.label.clone(),
            num(p.lhs.value.re),
            num(p.lhs.value.im),
            num(p.lhs.std_error),
            num(p.rhs.value.re),
            num(p.rhs.value.im),
            num(p.rhs.std_error),
            num(p.residual),
            num(p.sigma),
            num(p.tolerance),
            p.status.as_str().into(),
        ]);
    }
    if let Some(e) = &r.extrapolation {
        let residual = (e.value - e.target).abs() / (e.value.abs() + e.target.abs()).max(f64::MIN_POSITIVE);
        t.push(vec![
            id.into(),
            "extrapolation".into(),
            num(e.value),
            "0".into(),
            num(e.std_error),
            num(e.target),
            "0".into(),
            "0".into(),
            num(residual),
            num(e.std_error / (e.value.abs() + e.target.abs()).max(f64::MIN_POSITIVE)),
            "".into(),
            e.status.as_str().into(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&Table::new(&["a", "b"]), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n");
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into()]);
        assert!(write_csv(&t, Vec::new()).is_err());
    }

    #[test]
    fn one_sample_two_times() {
        let batch = FddBatch {
            times: vec![1.0, 2.0],
            seed: 3,
            e: vec![0.25, 0.5],
            r: vec![0.1, 0.2],
            x: vec![-1.0, 1.5],
        };
        let mut buf = Vec::new();
        write_csv(&fdd_table(&batch), &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "seed,sample_id,t,E,R,X\n3,0,1,0.25,0.1,-1\n3,0,2,0.5,0.2,1.5\n"
        );
    }
}
