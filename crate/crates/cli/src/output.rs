//! CSV tables and plain-text matrix dumps.

use std::io::{self, Write};
use std::path::Path;

use sqzopto::gaussian::CovarianceMatrix;
use sqzopto::sweep::{AxisName, MeasureSet, SweepRow};

/// Bumped whenever columns change meaning or order.
pub const CSV_SCHEMA: &str = "sqzopto-csv 1";

const PAIR_TAGS: [&str; 3] = ["a_q1", "a_q2", "q1_q2"];
const PAIR_ENDS: [(&str, &str); 3] = [("a", "q1"), ("a", "q2"), ("q1", "q2")];
const FOCUS: [&str; 3] = ["a", "q1", "q2"];

pub struct CsvMeta<'a> {
    /// Free-form description of what produced the table (preset or config).
    pub source: &'a str,
    pub timestamp: bool,
}

fn header(axes: &[AxisName], measures: &MeasureSet) -> Vec<String> {
    let mut h: Vec<String> = axes.iter().map(|a| a.as_str().to_string()).collect();
    h.extend(["direction", "status", "stable", "spectral_abscissa"].map(String::from));
    for t in PAIR_TAGS {
        h.push(format!("E_N_{t}"));
    }
    for (mu, nu) in PAIR_ENDS {
        h.push(format!("S_{mu}_to_{nu}"));
        h.push(format!("S_{nu}_to_{mu}"));
    }
    for f in FOCUS {
        h.push(format!("E_tau_{f}_vs_rest"));
    }
    h.extend(["R_tau_min", "I_1", "I_2"].map(String::from));
    for t in PAIR_TAGS {
        h.push(format!("regime_{t}"));
    }
    h.extend(["Delta_s", "omega_s", "N_s", "M_s_re", "M_s_im", "Pi_1", "Pi_2"].map(String::from));
    if measures.covariance {
        for r in 1..=6 {
            for c in 1..=6 {
                h.push(format!("V{r}{c}"));
            }
        }
    }
    h.push("detail".into());
    h
}

/// Shortest round-trip text; scientific outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn record(row: &SweepRow, measures: &MeasureSet) -> Vec<String> {
    let res = &row.result;
    let mut out: Vec<String> = row.axis_values.iter().map(|&v| num(v)).collect();
    out.push(row.direction.as_str().into());
    out.push(res.status.label().into());
    out.push(match res.spectral_abscissa {
        Some(_) => (res.status.label() != "unstable").to_string(),
        None => String::new(),
    });
    out.push(opt(res.spectral_abscissa));

    let rep = res.report.as_ref();
    let ent = rep.filter(|_| measures.entanglement);
    let ste = rep.filter(|_| measures.steering);
    let tri = rep.filter(|_| measures.residual);
    for k in 0..3 {
        out.push(opt(ent.map(|r| r.e_n[k])));
    }
    for k in 0..3 {
        out.push(opt(ste.map(|r| r.steering[k].forward)));
        out.push(opt(ste.map(|r| r.steering[k].backward)));
    }
    for k in 0..3 {
        out.push(opt(tri.map(|r| r.e_tau_one_vs_two[k])));
    }
    out.push(opt(tri.map(|r| r.residual.min)));
    out.push(opt(row.asymmetry[0]));
    out.push(opt(row.asymmetry[1]));
    for k in 0..3 {
        out.push(
            ste.map(|r| r.steering[k].regime.as_str().to_string())
                .unwrap_or_default(),
        );
    }
    let d = res.derived.as_ref();
    out.push(opt(d.map(|d| d.delta_s)));
    out.push(opt(d.map(|d| d.omega_s)));
    out.push(opt(d.map(|d| d.n_s)));
    out.push(opt(d.map(|d| d.m_s.re)));
    out.push(opt(d.map(|d| d.m_s.im)));
    out.push(opt(d.and_then(|d| d.pi_factor[0])));
    out.push(opt(d.and_then(|d| d.pi_factor[1])));
    if measures.covariance {
        for r in 0..6 {
            for c in 0..6 {
                out.push(opt(res.cm.as_ref().map(|cm| cm.v[(r, c)])));
            }
        }
    }
    out.push(res.status.detail().unwrap_or_default().to_string());
    out
}

/// Renders rows as CSV preceded by `#` comment lines.
pub fn render_csv(rows: &[SweepRow], axes: &[AxisName], measures: &MeasureSet, meta: &CsvMeta) -> csv::Result<Vec<u8>> {
    let mut buf = Vec::new();
    writeln!(buf, "# {CSV_SCHEMA}")?;
    writeln!(buf, "# source: {}", meta.source)?;
    if meta.timestamp {
        let now = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
        writeln!(buf, "# generated: {now}")?;
    }
    let mut w = csv::Writer::from_writer(buf);
    w.write_record(header(axes, measures))?;
    for row in rows {
        w.write_record(record(row, measures))?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// Six lines of six space-separated decimals.
pub fn format_cm(cm: &CovarianceMatrix<f64>) -> String {
    let mut s = String::new();
    for r in 0..6 {
        let line: Vec<String> = (0..6).map(|c| num(cm.v[(r, c)])).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => write_atomic(p, bytes),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sqzopto::model::Direction;
    use sqzopto::sweep::{PointResult, RowStatus};

    fn bare(status: RowStatus) -> SweepRow {
        SweepRow {
            point: 0,
            axis_values: vec![0.5],
            direction: Direction::Cw,
            result: PointResult {
                status,
                spectral_abscissa: None,
                derived: None,
                report: None,
                cm: None,
            },
            asymmetry: [None, None],
        }
    }

    #[test]
    fn header_and_record_widths_agree() {
        for m in [MeasureSet::all(), MeasureSet::none()] {
            let h = header(&[AxisName::DeltaC], &m);
            assert_eq!(record(&bare(RowStatus::Ok), &m).len(), h.len());
        }
        assert_eq!(
            header(&[], &MeasureSet::all()).len(),
            header(&[], &MeasureSet::none()).len() + 36
        );
    }

    #[test]
    fn failed_rows_keep_their_message_quoted() {
        let rows = [bare(RowStatus::Invalid("gamma_m[1] must be > 0, got -1".into()))];
        let meta = CsvMeta {
            source: "test",
            timestamp: false,
        };
        let text =
            String::from_utf8(render_csv(&rows, &[AxisName::DeltaC], &MeasureSet::all(), &meta).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# sqzopto-csv 1"));
        assert_eq!(lines.next(), Some("# source: test"));
        assert!(lines.next().unwrap().starts_with("delta_c,direction,status,stable,"));
        let rec = lines.next().unwrap();
        assert!(rec.starts_with("0.5,cw,invalid,,,"));
        assert!(rec.ends_with("\"gamma_m[1] must be > 0, got -1\""));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/out.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, 0.5, -1.5e-33, 1e20, 0.30625, 1.0 / 3.0, -2.5e-5] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(1.5e-33), "1.5e-33");
        assert_eq!(num(0.25), "0.25");
    }
}
