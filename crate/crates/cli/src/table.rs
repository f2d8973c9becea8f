//! Plain tables rendered as aligned text or CSV.

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, csv: bool) -> String {
        let mut out = String::new();
        if csv {
            for row in std::iter::once(&self.header).chain(&self.rows) {
                out.push_str(&row.join(","));
                out.push('\n');
            }
            return out;
        }
        let widths: Vec<usize> = (0..self.header.len())
            .map(|c| {
                std::iter::once(&self.header)
                    .chain(&self.rows)
                    .map(|r| r[c].len())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        for row in std::iter::once(&self.header).chain(&self.rows) {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:>w$}"))
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_and_csv() {
        let mut t = Table::new(&["a", "bb"]);
        t.push(vec!["10".into(), "2".into()]);
        assert_eq!(t.render(false), " a  bb\n10   2\n");
        assert_eq!(t.render(true), "a,bb\n10,2\n");
    }
}
