//! Tab-separated output: `#`-prefixed metadata, one header line, then rows.
//! Reals are written with 17 significant digits so they read back exactly.

use std::fmt::Write as _;

pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Default)]
pub struct Tsv {
    text: String,
    columns: usize,
}

impl Tsv {
    pub fn new() -> Self {
        Self::default()
    }

    /// A `# key: value` line. Must come before the header.
    pub fn meta(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        debug_assert_eq!(self.columns, 0, "metadata after header");
        let _ = writeln!(self.text, "# {key}: {value}");
        self
    }

    pub fn header(&mut self, names: &[&str]) -> &mut Self {
        self.columns = names.len();
        self.text.push_str(&names.join("\t"));
        self.text.push('\n');
        self
    }

    pub fn row(&mut self, fields: &[String]) -> &mut Self {
        debug_assert_eq!(fields.len(), self.columns, "row width");
        self.text.push_str(&fields.join("\t"));
        self.text.push('\n');
        self
    }

    pub fn finish(&self) -> String {
        self.text.clone()
    }
}

/// Metadata pairs, header and rows.
pub type Parsed = (Vec<(String, String)>, Vec<String>, Vec<Vec<String>>);

/// Splits TSV text into metadata pairs, header and rows.
pub fn parse(text: &str) -> Parsed {
    let mut meta = Vec::new();
    let mut header = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            if let Some((k, v)) = rest.split_once(": ") {
                meta.push((k.to_string(), v.to_string()));
            }
        } else if header.is_empty() {
            header = line.split('\t').map(str::to_string).collect();
        } else {
            rows.push(line.split('\t').map(str::to_string).collect());
        }
    }
    (meta, header, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300, -7.25e12] {
            assert_eq!(real(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn layout() {
        let mut t = Tsv::new();
        t.meta("k", 3).header(&["a", "b"]).row(&["1".into(), real(0.5)]);
        let text = t.finish();
        assert_eq!(text, "# k: 3\na\tb\n1\t5.0000000000000000e-1\n");
        let (meta, header, rows) = parse(&text);
        assert_eq!(meta, vec![("k".to_string(), "3".to_string())]);
        assert_eq!(header, vec!["a", "b"]);
        assert_eq!(rows[0][1].parse::<f64>().unwrap(), 0.5);
    }
}
