use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use super::emit;
use crate::error::{Error, Result};

struct Table {
    path: PathBuf,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_table(path: &Path) -> Result<Table> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::input(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    let rows = reader
        .records()
        .map(|r| {
            r.map(|rec| rec.iter().map(str::to_string).collect())
                .map_err(|e| Error::input(format!("{}: {e}", path.display())))
        })
        .collect::<Result<Vec<Vec<String>>>>()?;
    Ok(Table {
        path: path.to_path_buf(),
        header,
        rows,
    })
}

/// Numbers stay numbers; everything else is kept as text.
fn cell_value(s: &str) -> Value {
    if let Ok(i) = s.parse::<i64>() {
        return json!(i);
    }
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && !s.contains('/') => json!(x),
        _ => json!(s),
    }
}

pub(super) fn report(
    inputs: &[PathBuf],
    plot_data: bool,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<i32> {
    let tables = inputs
        .iter()
        .map(|p| read_table(p))
        .collect::<Result<Vec<_>>>()?;
    let text = if plot_data {
        let mut s = String::new();
        for (i, t) in tables.iter().enumerate() {
            if i > 0 {
                // Two blank lines separate gnuplot index blocks.
                s.push_str("\n\n");
            }
            s.push_str(&format!(
                "# {}\n# {}\n",
                t.path.display(),
                t.header.join(" ")
            ));
            for r in &t.rows {
                s.push_str(&r.join(" "));
                s.push('\n');
            }
        }
        s
    } else {
        let series: Vec<Value> = tables
            .iter()
            .map(|t| {
                let rows: Vec<Value> = t
                    .rows
                    .iter()
                    .map(|r| {
                        let obj: Map<String, Value> = t
                            .header
                            .iter()
                            .zip(r)
                            .map(|(h, v)| (h.clone(), cell_value(v)))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                json!({"file": t.path.display().to_string(), "columns": t.header, "rows": rows})
            })
            .collect();
        let total: usize = tables.iter().map(|t| t.rows.len()).sum();
        let mut s = serde_json::to_string_pretty(&json!({"inputs": series, "total_rows": total}))
            .expect("serializable");
        s.push('\n');
        s
    };
    emit(out, stdout, &text)?;
    Ok(0)
}
