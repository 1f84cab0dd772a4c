use std::fmt::Write as _;

pub struct TableRow {
    pub label: String,
    pub cells: Vec<f64>,
}

/// Plain-text table with one decimal per cell.
pub fn render_table(title: &str, header: &[String], rows: &[TableRow]) -> String {
    let label_width = rows.iter().map(|r| r.label.chars().count()).max().unwrap_or(0).max(1);
    let cell_width = rows
        .iter()
        .flat_map(|r| r.cells.iter().map(|c| format!("{c:.1}").len()))
        .chain(header.iter().map(String::len))
        .max()
        .unwrap_or(1)
        + 2;
    let mut out = format!("{title}\n");
    let _ = write!(out, "{:label_width$}", "");
    for h in header {
        let _ = write!(out, "{h:>cell_width$}");
    }
    out.push('\n');
    for row in rows {
        let pad = label_width - row.label.chars().count();
        let _ = write!(out, "{}{}", row.label, " ".repeat(pad));
        for c in &row.cells {
            let _ = write!(out, "{:>cell_width$}", format!("{c:.1}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_decimal_aligned() {
        let rows = vec![
            TableRow { label: "α=0.1 G".into(), cells: vec![59.94, 8.36] },
            TableRow { label: "J".into(), cells: vec![505.9, 0.04] },
        ];
        let t = render_table("t", &["q=4".into(), "q=8".into()], &rows);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "t");
        assert!(lines[2].ends_with("59.9    8.4"));
        assert!(lines[3].starts_with("J      "));
        assert!(lines[3].ends_with("505.9    0.0"));
        assert_eq!(lines[2].chars().count(), lines[3].chars().count());
    }
}
