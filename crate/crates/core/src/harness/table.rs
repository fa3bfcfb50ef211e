//! Result tables and CSV output.

use std::io::Write;
use std::path::Path;

use super::HarnessError;

/// Column-labelled rows of already formatted cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Parsed numeric column.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column(name)?;
        self.rows.iter().map(|r| r[i].parse().ok()).collect()
    }
}

/// Writes `table` as CSV with LF line endings.
pub fn write_csv<W: Write>(writer: W, table: &Table) -> Result<(), HarnessError> {
    let io = |e: csv::Error| HarnessError::Io(e.to_string());
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(&table.columns).map_err(io)?;
    for r in &table.rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush().map_err(|e| HarnessError::Io(e.to_string()))
}

/// Writes `table` to `path`. An empty table is an error and leaves no file.
pub fn emit_csv(table: &Table, path: &Path) -> Result<(), HarnessError> {
    if table.rows.is_empty() {
        return Err(HarnessError::EmptyResult);
    }
    let mut buf = Vec::new();
    write_csv(&mut buf, table)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| HarnessError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, buf).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
}

/// Least-squares fit `y ≈ alpha + beta log10(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFit {
    pub alpha: f64,
    pub beta: f64,
}

impl LogFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.alpha + self.beta * x.log10()
    }
}

pub fn log_regression(xs: &[f64], ys: &[f64]) -> Option<LogFit> {
    if xs.len() != ys.len() || xs.len() < 2 || xs.iter().any(|x| !(*x > 0.0)) {
        return None;
    }
    let n = xs.len() as f64;
    let u: Vec<f64> = xs.iter().map(|x| x.log10()).collect();
    let mu = u.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = u.iter().map(|v| (v - mu).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = u.iter().zip(ys).map(|(v, y)| (v - mu) * (y - my)).sum();
    let beta = sxy / sxx;
    Some(LogFit {
        alpha: my - beta * mu,
        beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regression_recovers_exact_fit() {
        let xs: Vec<f64> = (1..=20).map(|k| 250.0 * k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 31.5 + 20.0 * x.log10()).collect();
        let f = log_regression(&xs, &ys).unwrap();
        assert!(
            (f.alpha - 31.5).abs() < 1e-9 && (f.beta - 20.0).abs() < 1e-9,
            "{f:?}"
        );
        assert!(log_regression(&[1.0], &[2.0]).is_none());
        assert!(log_regression(&[2.0, 2.0], &[1.0, 3.0]).is_none());
    }

    #[test]
    fn empty_table_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let t = Table::new(vec!["a", "b"]);
        assert!(matches!(
            emit_csv(&t, &path),
            Err(HarnessError::EmptyResult)
        ));
        assert!(!path.exists());
    }

    #[test]
    fn csv_uses_lf() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        let mut buf = Vec::new();
        write_csv(&mut buf, &t).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,\"x,y\"\n");
        assert_eq!(t.numbers("a"), Some(vec![1.0]));
        assert_eq!(t.numbers("b"), None);
    }
}
