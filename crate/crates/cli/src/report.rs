//! Result rows shared by `encode --csv` and `report`.

use std::fmt::Write as _;
use std::fs::OpenOptions;
use std::path::Path;

use csvc::Error;

pub const COLUMNS: [&str; 11] = [
    "sequence",
    "level",
    "threshold",
    "mode",
    "psnr",
    "cr",
    "cr_no_header",
    "pct_measurements",
    "pct_sent",
    "bytes",
    "saturations",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub sequence: String,
    pub level: usize,
    pub threshold: f64,
    pub mode: String,
    /// Absent when the run did not decode.
    pub psnr: Option<f64>,
    pub cr: f64,
    pub cr_no_header: f64,
    pub pct_measurements: f64,
    pub pct_sent: f64,
    pub bytes: usize,
    pub saturations: usize,
}

fn num(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v:.4}")
    }
}

impl Row {
    fn record(&self) -> Vec<String> {
        vec![
            self.sequence.clone(),
            self.level.to_string(),
            num(self.threshold),
            self.mode.clone(),
            self.psnr.map(num).unwrap_or_default(),
            num(self.cr),
            num(self.cr_no_header),
            num(self.pct_measurements),
            num(self.pct_sent),
            self.bytes.to_string(),
            self.saturations.to_string(),
        ]
    }

    fn parse(rec: &csv::StringRecord, at: &str) -> Result<Row, Error> {
        let bad = |col: &str| Error::validation("report", format!("{at}: bad value in column {col}"));
        let field = |i: usize| rec.get(i).ok_or_else(|| bad(COLUMNS[i]));
        let float = |i: usize| field(i)?.parse::<f64>().map_err(|_| bad(COLUMNS[i]));
        let int = |i: usize| field(i)?.parse::<usize>().map_err(|_| bad(COLUMNS[i]));
        Ok(Row {
            sequence: field(0)?.to_string(),
            level: int(1)?,
            threshold: float(2)?,
            mode: field(3)?.to_string(),
            psnr: if field(4)?.is_empty() { None } else { Some(float(4)?) },
            cr: float(5)?,
            cr_no_header: float(6)?,
            pct_measurements: float(7)?,
            pct_sent: float(8)?,
            bytes: int(9)?,
            saturations: int(10)?,
        })
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io("report", format!("cannot access {}", path.display()), io),
        other => Error::validation("report", format!("{}: malformed CSV: {other:?}", path.display())),
    }
}

/// Append a row, writing the header first when the file is new or empty.
pub fn append_row(path: &Path, row: &Row) -> Result<(), Error> {
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io("report", format!("cannot open {}", path.display()), e))?;
    let fresh = file.metadata().map(|m| m.len() == 0).unwrap_or(true);
    let mut w = csv::Writer::from_writer(file);
    if fresh {
        w.write_record(COLUMNS).map_err(|e| csv_err(path, e))?;
    }
    w.write_record(row.record()).map_err(|e| csv_err(path, e))?;
    w.flush()
        .map_err(|e| Error::io("report", format!("cannot write {}", path.display()), e))
}

pub fn read_rows(path: &Path) -> Result<Vec<Row>, Error> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let headers = r.headers().map_err(|e| csv_err(path, e))?.clone();
    if headers.iter().ne(COLUMNS) {
        return Err(Error::validation(
            "report",
            format!("{}: unexpected columns {:?}", path.display(), headers),
        ));
    }
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(|e| csv_err(path, e))?;
            Row::parse(&rec, &format!("{} row {}", path.display(), i + 1))
        })
        .collect()
}

/// Rows of all files, sorted by sequence then level; ties keep input order.
pub fn merge(paths: &[&Path]) -> Result<Vec<Row>, Error> {
    let mut rows = Vec::new();
    for p in paths {
        rows.extend(read_rows(p)?);
    }
    rows.sort_by(|a, b| a.sequence.cmp(&b.sequence).then(a.level.cmp(&b.level)));
    Ok(rows)
}

/// Plain-text table laid out like the usual level / PSNR / CR summary.
pub fn render(rows: &[Row]) -> String {
    let header = ["sequence", "level", "mode", "threshold", "PSNR (dB)", "CR", "CR w/o hdr", "% meas", "% sent"];
    let body: Vec<[String; 9]> = rows
        .iter()
        .map(|r| {
            [
                r.sequence.clone(),
                r.level.to_string(),
                r.mode.clone(),
                format!("{:.2}", r.threshold),
                r.psnr.map(|p| if p.is_infinite() { "inf".into() } else { format!("{p:.2}") }).unwrap_or("-".into()),
                format!("{:.2}", r.cr),
                format!("{:.2}", r.cr_no_header),
                format!("{:.2}", r.pct_measurements),
                format!("{:.2}", r.pct_sent),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|i| body.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap())
        .collect();
    let mut out = String::new();
    let line = |out: &mut String, cells: &[&str]| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, &header);
    for r in &body {
        line(&mut out, &r.iter().map(String::as_str).collect::<Vec<_>>());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(seq: &str, level: usize) -> Row {
        Row {
            sequence: seq.into(),
            level,
            threshold: 16.0,
            mode: "fixed-adopted".into(),
            psnr: Some(f64::INFINITY),
            cr: 10.0,
            cr_no_header: 11.0,
            pct_measurements: 34.375,
            pct_sent: 20.0,
            bytes: 1000,
            saturations: 0,
        }
    }

    #[test]
    fn write_read_merge() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
        append_row(&a, &row("texture", 2)).unwrap();
        append_row(&a, &row("blob", 3)).unwrap();
        append_row(&b, &row("blob", 1)).unwrap();
        let rows = merge(&[&a, &b]).unwrap();
        let keys: Vec<(&str, usize)> = rows.iter().map(|r| (r.sequence.as_str(), r.level)).collect();
        assert_eq!(keys, [("blob", 1), ("blob", 3), ("texture", 2)]);
        assert!(rows[0].psnr.unwrap().is_infinite());
    }

    #[test]
    fn empty_table_has_header() {
        let t = render(&[]);
        assert_eq!(t.lines().count(), 1);
        assert!(t.contains("PSNR"));
        assert_eq!(render(&[row("x", 1)]).lines().count(), 2);
    }

    #[test]
    fn wrong_columns_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        std::fs::write(&p, "a,b\n1,2\n").unwrap();
        assert!(read_rows(&p).is_err());
    }
}
