//! CSV ingestion. Column kinds are inferred from the data: a column whose
//! every value parses as a finite number is numeric, anything else is
//! categorical. Labels and categories are coded by first appearance.

use std::collections::HashMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::domain::{ColumnKind, Dataset, Feature};

/// A CSV file as strings, with the 1-based line number of every record.
#[derive(Debug, Clone)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<(u64, Vec<String>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    /// Category names in code order (empty for numeric columns).
    pub categories: Vec<String>,
}

/// How raw CSV text maps onto a [`Dataset`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub label_column: String,
    pub features: Vec<ColumnSchema>,
    /// Label names; label `l` is `labels[l]`.
    pub labels: Vec<String>,
}

impl Schema {
    pub fn k(&self) -> usize {
        self.labels.len()
    }
}

pub fn read_raw(path: &Path) -> Result<RawTable, HarnessError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| HarnessError::Csv { path: path.display().to_string(), line: 0, message: e.to_string() })?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| HarnessError::Csv { path: path.display().to_string(), line: 1, message: e.to_string() })?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            HarnessError::Csv { path: path.display().to_string(), line, message: e.to_string() }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(HarnessError::Csv {
                path: path.display().to_string(),
                line,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        rows.push((line, record.iter().map(str::to_string).collect()));
    }
    Ok(RawTable { header, rows })
}

fn label_index(table: &RawTable, label_column: &str) -> Result<usize, HarnessError> {
    table
        .header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| HarnessError::MissingLabelColumn { name: label_column.to_string(), available: table.header.clone() })
}

fn is_number(s: &str) -> bool {
    s.parse::<f64>().is_ok_and(f64::is_finite)
}

/// Infers a schema from one or more tables sharing a header.
pub fn infer_schema(tables: &[&RawTable], label_column: &str) -> Result<Schema, HarnessError> {
    let first = tables.first().ok_or(HarnessError::EmptyData)?;
    for t in &tables[1..] {
        if t.header != first.header {
            return Err(HarnessError::Config("train and test files have different headers".into()));
        }
    }
    let target = label_index(first, label_column)?;
    let mut labels: Vec<String> = Vec::new();
    let mut seen: HashMap<&str, ()> = HashMap::new();
    for t in tables {
        for (_, row) in &t.rows {
            if seen.insert(&row[target], ()).is_none() {
                labels.push(row[target].clone());
            }
        }
    }
    if labels.is_empty() {
        return Err(HarnessError::EmptyData);
    }
    if labels.len() < 2 {
        return Err(HarnessError::SingleClass(labels[0].clone()));
    }
    let mut features = Vec::new();
    for (c, name) in first.header.iter().enumerate() {
        if c == target {
            continue;
        }
        let numeric = tables.iter().all(|t| t.rows.iter().all(|(_, r)| is_number(&r[c])));
        let mut categories = Vec::new();
        if !numeric {
            let mut seen: HashMap<&str, ()> = HashMap::new();
            for t in tables {
                for (_, r) in &t.rows {
                    if seen.insert(&r[c], ()).is_none() {
                        categories.push(r[c].clone());
                    }
                }
            }
        }
        let kind = if numeric { ColumnKind::Numeric } else { ColumnKind::Categorical };
        features.push(ColumnSchema { name: name.clone(), kind, categories });
    }
    Ok(Schema { label_column: label_column.to_string(), features, labels })
}

/// Code a table under `schema`. Unseen categories get a code no split
/// matches; unseen labels are an error.
pub fn encode(table: &RawTable, schema: &Schema, path: &Path) -> Result<Dataset, HarnessError> {
    if table.rows.is_empty() {
        return Err(HarnessError::EmptyData);
    }
    let target = label_index(table, &schema.label_column)?;
    let label_code: HashMap<&str, usize> = schema.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let columns: Vec<usize> = (0..table.header.len()).filter(|&c| c != target).collect();
    let cat_codes: Vec<HashMap<&str, u32>> = schema
        .features
        .iter()
        .map(|f| f.categories.iter().enumerate().map(|(i, c)| (c.as_str(), i as u32)).collect())
        .collect();
    let mut rows = Vec::with_capacity(table.rows.len());
    let mut labels = Vec::with_capacity(table.rows.len());
    for (line, row) in &table.rows {
        let label = label_code.get(row[target].as_str()).ok_or_else(|| HarnessError::Csv {
            path: path.display().to_string(),
            line: *line,
            message: format!("unknown label {:?}", row[target]),
        })?;
        labels.push(*label);
        let mut features = Vec::with_capacity(columns.len());
        for (j, &c) in columns.iter().enumerate() {
            let value = &row[c];
            features.push(match schema.features[j].kind {
                ColumnKind::Numeric => Feature::Num(value.parse::<f64>().map_err(|_| HarnessError::Csv {
                    path: path.display().to_string(),
                    line: *line,
                    message: format!("column {:?}: {:?} is not a number", schema.features[j].name, value),
                })?),
                ColumnKind::Categorical => Feature::Cat(cat_codes[j].get(value.as_str()).copied().unwrap_or(u32::MAX)),
            });
        }
        rows.push(features);
    }
    Ok(Dataset::new(rows, labels, schema.k())?)
}

/// A loaded CSV together with the schema used to code it.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub dataset: Dataset,
    pub schema: Schema,
}

/// Loads a single CSV file, inferring its schema.
pub fn load_csv(path: &Path, label_column: &str) -> Result<Loaded, HarnessError> {
    let raw = read_raw(path)?;
    let schema = infer_schema(&[&raw], label_column)?;
    let dataset = encode(&raw, &schema, path)?;
    Ok(Loaded { dataset, schema })
}

/// Loads explicit train and test files under one shared schema.
pub fn load_split_files(train: &Path, test: &Path, label_column: &str) -> Result<(Loaded, Dataset), HarnessError> {
    let (raw_train, raw_test) = (read_raw(train)?, read_raw(test)?);
    let schema = infer_schema(&[&raw_train, &raw_test], label_column)?;
    let dataset = encode(&raw_train, &schema, train)?;
    let test_set = encode(&raw_test, &schema, test)?;
    Ok((Loaded { dataset, schema }, test_set))
}

/// Seeded shuffle, then the first `ratio` share of the examples for training.
/// Both parts are non-empty whenever `m >= 2`.
pub fn random_split(d: &Dataset, ratio: f64, seed: u64) -> Result<(Dataset, Dataset), HarnessError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(HarnessError::Config(format!("split ratio must lie in (0, 1), got {ratio}")));
    }
    if d.m() < 2 {
        return Err(HarnessError::Config("need at least two examples to split".into()));
    }
    let mut order: Vec<usize> = (0..d.m()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let cut = ((d.m() as f64 * ratio).round() as usize).clamp(1, d.m() - 1);
    Ok((d.subset(&order[..cut])?, d.subset(&order[cut..])?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn small_two_class_file() {
        let f = write("x,colour,class\n1.5,red,a\n2,blue,b\n0.5,red,a\n3,green,b\n");
        let loaded = load_csv(f.path(), "class").unwrap();
        assert_eq!(loaded.dataset.m(), 4);
        assert_eq!(loaded.dataset.k(), 2);
        assert_eq!(loaded.dataset.kinds(), &[ColumnKind::Numeric, ColumnKind::Categorical]);
        assert_eq!(loaded.schema.labels, vec!["a", "b"]);
        assert_eq!(loaded.schema.features[1].categories, vec!["red", "blue", "green"]);
        assert_eq!(loaded.dataset.labels(), &[0, 1, 0, 1]);
        assert_eq!(loaded.dataset.row(3)[1], Feature::Cat(2));
    }

    #[test]
    fn missing_label_column_is_named() {
        let f = write("x,y\n1,2\n");
        match load_csv(f.path(), "class") {
            Err(HarnessError::MissingLabelColumn { name, .. }) => assert_eq!(name, "class"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_row_reports_line() {
        let f = write("x,class\n1,a\n2\n3,b\n");
        match load_csv(f.path(), "class") {
            Err(HarnessError::Csv { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let f = write("x,class\n1,a\n2,a\n");
        assert!(matches!(load_csv(f.path(), "class"), Err(HarnessError::SingleClass(_))));
    }

    #[test]
    fn split_is_seeded_and_disjoint() {
        let d = Dataset::indexed((0..10).map(|i| i % 2).collect(), 2).unwrap();
        let (a, b) = random_split(&d, 0.8, 7).unwrap();
        let (a2, _) = random_split(&d, 0.8, 7).unwrap();
        assert_eq!(a, a2);
        assert_eq!((a.m(), b.m()), (8, 2));
        let mut ids: Vec<i64> = a.rows().iter().chain(b.rows()).map(|r| match r[0] {
            Feature::Num(v) => v as i64,
            Feature::Cat(_) => unreachable!(),
        }).collect();
        ids.sort();
        assert_eq!(ids, (0..10).collect::<Vec<_>>());
    }
}
