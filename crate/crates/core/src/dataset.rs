//! Compound/descriptor tables: CSV ingestion, duplicate removal, z-score
//! normalization and endpoint labeling.

use std::collections::HashMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::Serialize;

use crate::error::DatasetError;
use crate::matrix::Matrix;

/// The 23 descriptor names of the reference hepatocarcinogenicity schema, in
/// column order.
pub const CARCINOGENICITY_DESCRIPTORS: [&str; 23] = [
    "Weight",
    "HDon",
    "HAcc",
    "XlogP",
    "TPSA",
    "Polariz",
    "Dipole",
    "LogS",
    "NRotBond",
    "NVRO5",
    "NVERO5",
    "NAtoms",
    "NStereo",
    "Complexity",
    "RComplexity",
    "Diameter",
    "InertiaX",
    "InertiaY",
    "InertiaZ",
    "Span",
    "RGyr",
    "Eccentric",
    "Aspheric",
];

/// Activity threshold above which a HEPT derivative counts as active (pIC50).
pub const HEPT_ACTIVE_PIC50: f64 = 6.0;

/// N compounds x d descriptors plus one numeric endpoint per compound.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorTable {
    compound_ids: Vec<String>,
    descriptor_names: Vec<String>,
    values: Matrix,
    endpoint_name: String,
    endpoint: Vec<f64>,
}

impl DescriptorTable {
    /// Builds a table, enforcing the shape, finiteness and unique-id
    /// invariants.
    pub fn new(
        compound_ids: Vec<String>,
        descriptor_names: Vec<String>,
        values: Matrix,
        endpoint_name: impl Into<String>,
        endpoint: Vec<f64>,
    ) -> Result<Self, DatasetError> {
        let n = compound_ids.len();
        if values.rows() != n || endpoint.len() != n {
            return Err(DatasetError::Shape(format!(
                "{} ids, {} value rows, {} endpoint values",
                n,
                values.rows(),
                endpoint.len()
            )));
        }
        if descriptor_names.is_empty() || values.cols() != descriptor_names.len() {
            return Err(DatasetError::Shape(format!(
                "{} descriptor names for {} value columns",
                descriptor_names.len(),
                values.cols()
            )));
        }
        if n < 2 {
            return Err(DatasetError::TooFewRows(n));
        }
        if let Err(e) = values.check_finite() {
            return Err(DatasetError::Shape(e.to_string()));
        }
        if let Some(i) = endpoint.iter().position(|v| !v.is_finite()) {
            return Err(DatasetError::Shape(format!(
                "non-finite endpoint in row {i}"
            )));
        }
        let mut seen: HashMap<&str, usize> = HashMap::new();
        for (i, id) in compound_ids.iter().enumerate() {
            if let Some(&first) = seen.get(id.as_str()) {
                return Err(DatasetError::DuplicateId {
                    line: i as u64 + 1,
                    id: id.clone(),
                    first_line: first as u64 + 1,
                });
            }
            seen.insert(id, i);
        }
        Ok(DescriptorTable {
            compound_ids,
            descriptor_names,
            values,
            endpoint_name: endpoint_name.into(),
            endpoint,
        })
    }

    /// Reads a table from a CSV file. See [`DescriptorTable::from_reader`].
    pub fn load_csv(path: impl AsRef<Path>, endpoint_column: &str) -> Result<Self, DatasetError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| DatasetError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_reader(file, endpoint_column)
    }

    /// Parses CSV text: a header row, then one compound per row. The first
    /// column holds compound ids, `endpoint_column` names the endpoint and
    /// every other column is a numeric descriptor. Column order is kept.
    ///
    /// Errors carry the 1-based file line and column of the offending cell.
    pub fn from_reader<R: Read>(reader: R, endpoint_column: &str) -> Result<Self, DatasetError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut records = rdr.records();

        let header = match records.next() {
            None => return Err(DatasetError::EmptyHeader),
            Some(r) => r.map_err(csv_error)?,
        };
        let names: Vec<String> = header
            .iter()
            .map(|s| s.trim_start_matches('\u{feff}').to_string())
            .collect();
        if names.is_empty() {
            return Err(DatasetError::EmptyHeader);
        }
        let mut by_name: HashMap<&str, usize> = HashMap::new();
        for (j, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(DatasetError::EmptyHeaderName { column: j + 1 });
            }
            if let Some(&first) = by_name.get(name.as_str()) {
                return Err(DatasetError::DuplicateHeader {
                    name: name.clone(),
                    first: first + 1,
                    second: j + 1,
                });
            }
            by_name.insert(name, j);
        }
        let endpoint_col = *by_name
            .get(endpoint_column)
            .ok_or_else(|| DatasetError::MissingEndpoint(endpoint_column.to_string()))?;
        if endpoint_col == 0 {
            return Err(DatasetError::EndpointIsId(endpoint_column.to_string()));
        }
        let descriptor_cols: Vec<usize> = (1..names.len()).filter(|&j| j != endpoint_col).collect();
        if descriptor_cols.is_empty() {
            return Err(DatasetError::NoDescriptors);
        }

        let mut ids = Vec::new();
        let mut id_lines: HashMap<String, u64> = HashMap::new();
        let mut values = Vec::new();
        let mut endpoint = Vec::new();
        for record in records {
            let record = record.map_err(csv_error)?;
            let line = record.position().map_or(0, |p| p.line());
            if record.len() != names.len() {
                return Err(DatasetError::RowLength {
                    line,
                    expected: names.len(),
                    found: record.len(),
                });
            }
            let id = record[0].to_string();
            if id.is_empty() {
                return Err(DatasetError::EmptyId { line });
            }
            if let Some(&first_line) = id_lines.get(&id) {
                return Err(DatasetError::DuplicateId {
                    line,
                    id,
                    first_line,
                });
            }
            id_lines.insert(id.clone(), line);
            for &j in &descriptor_cols {
                values.push(parse_cell(&record[j], line, j, &names[j])?);
            }
            endpoint.push(parse_cell(
                &record[endpoint_col],
                line,
                endpoint_col,
                &names[endpoint_col],
            )?);
            ids.push(id);
        }
        if ids.len() < 2 {
            return Err(DatasetError::TooFewRows(ids.len()));
        }
        let d = descriptor_cols.len();
        let descriptor_names = descriptor_cols.iter().map(|&j| names[j].clone()).collect();
        let values = Matrix::from_vec(ids.len(), d, values);
        Self::new(ids, descriptor_names, values, endpoint_column, endpoint)
    }

    pub fn n_compounds(&self) -> usize {
        self.compound_ids.len()
    }

    pub fn n_descriptors(&self) -> usize {
        self.descriptor_names.len()
    }

    pub fn compound_ids(&self) -> &[String] {
        &self.compound_ids
    }

    pub fn descriptor_names(&self) -> &[String] {
        &self.descriptor_names
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn endpoint_name(&self) -> &str {
        &self.endpoint_name
    }

    pub fn endpoint(&self) -> &[f64] {
        &self.endpoint
    }

    /// Collapses compounds whose descriptor vectors are bitwise equal,
    /// keeping the first occurrence and the original order of the rest.
    pub fn deduplicate(&self) -> Result<(DescriptorTable, DedupSummary), DatasetError> {
        let mut first_by_key: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut keep = Vec::new();
        let mut removed = Vec::new();
        for (i, row) in self.values.row_iter().enumerate() {
            let key: Vec<u64> = row.iter().map(|x| x.to_bits()).collect();
            match first_by_key.get(&key) {
                Some(&k) => removed.push(RemovedDuplicate {
                    id: self.compound_ids[i].clone(),
                    kept_id: self.compound_ids[k].clone(),
                    endpoint_conflict: self.endpoint[i].to_bits() != self.endpoint[k].to_bits(),
                }),
                None => {
                    first_by_key.insert(key, i);
                    keep.push(i);
                }
            }
        }
        if keep.len() < 2 {
            return Err(DatasetError::TooFewRows(keep.len()));
        }
        let d = self.n_descriptors();
        let mut values = Vec::with_capacity(keep.len() * d);
        for &i in &keep {
            values.extend_from_slice(self.values.row(i));
        }
        let table = DescriptorTable {
            compound_ids: keep.iter().map(|&i| self.compound_ids[i].clone()).collect(),
            descriptor_names: self.descriptor_names.clone(),
            values: Matrix::from_vec(keep.len(), d, values),
            endpoint_name: self.endpoint_name.clone(),
            endpoint: keep.iter().map(|&i| self.endpoint[i]).collect(),
        };
        Ok((table, DedupSummary { removed }))
    }

    /// Z-scores every descriptor column with the sample (N-1) standard
    /// deviation. Constant columns become zeros; the endpoint is untouched.
    pub fn normalize(&self) -> DescriptorTable {
        DescriptorTable {
            values: zscore_columns(&self.values),
            ..self.clone()
        }
    }

    /// Labels each compound positive iff its endpoint is strictly greater
    /// than `threshold`.
    pub fn label(&self, threshold: f64) -> EndpointLabeling {
        EndpointLabeling::from_endpoint(&self.endpoint, threshold, ClassNames::default())
    }

    pub fn label_with(&self, threshold: f64, names: ClassNames) -> EndpointLabeling {
        EndpointLabeling::from_endpoint(&self.endpoint, threshold, names)
    }

    /// Arithmetic mean of the endpoint column.
    pub fn mean_threshold(&self) -> f64 {
        self.endpoint.iter().sum::<f64>() / self.endpoint.len() as f64
    }
}

fn csv_error(e: csv::Error) -> DatasetError {
    let line = e.position().map_or(0, |p| p.line());
    DatasetError::Csv {
        line,
        message: e.to_string(),
    }
}

fn parse_cell(raw: &str, line: u64, col: usize, name: &str) -> Result<f64, DatasetError> {
    if raw.is_empty() {
        return Err(DatasetError::MissingValue {
            line,
            column: col + 1,
            name: name.to_string(),
        });
    }
    // f64::from_str is locale independent and only accepts '.' as separator
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(DatasetError::NotNumeric {
            line,
            column: col + 1,
            name: name.to_string(),
            value: raw.to_string(),
        }),
    }
}

/// Column-wise z-score with divisor N-1. Columns whose entries are all
/// identical map to zeros.
pub fn zscore_columns(data: &Matrix) -> Matrix {
    let (n, d) = data.shape();
    let mut out = data.clone();
    for j in 0..d {
        let first = data[(0, j)];
        if (0..n).all(|i| data[(i, j)] == first) {
            for i in 0..n {
                out[(i, j)] = 0.0;
            }
            continue;
        }
        let mean = (0..n).map(|i| data[(i, j)]).sum::<f64>() / n as f64;
        let var = (0..n).map(|i| (data[(i, j)] - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let sd = var.sqrt();
        for i in 0..n {
            out[(i, j)] = (data[(i, j)] - mean) / sd;
        }
    }
    out
}

/// Record of rows removed by [`DescriptorTable::deduplicate`].
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DedupSummary {
    pub removed: Vec<RemovedDuplicate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemovedDuplicate {
    pub id: String,
    pub kept_id: String,
    /// The removed row had a different endpoint than the one kept.
    pub endpoint_conflict: bool,
}

impl DedupSummary {
    pub fn removed_count(&self) -> usize {
        self.removed.len()
    }

    pub fn warnings(&self) -> Vec<String> {
        self.removed
            .iter()
            .map(|r| {
                if r.endpoint_conflict {
                    format!(
                        "duplicate descriptors: `{}` removed in favour of `{}` despite a different endpoint value",
                        r.id, r.kept_id
                    )
                } else {
                    format!("duplicate descriptors: `{}` removed in favour of `{}`", r.id, r.kept_id)
                }
            })
            .collect()
    }
}

/// Display names for the two classes of a labeling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassNames {
    pub positive: String,
    pub negative: String,
}

impl ClassNames {
    pub fn new(positive: impl Into<String>, negative: impl Into<String>) -> Self {
        ClassNames {
            positive: positive.into(),
            negative: negative.into(),
        }
    }

    pub fn active_inactive() -> Self {
        Self::new("active", "inactive")
    }

    pub fn toxic_nontoxic() -> Self {
        Self::new("toxic", "non-toxic")
    }

    pub fn name(&self, positive: bool) -> &str {
        if positive {
            &self.positive
        } else {
            &self.negative
        }
    }
}

impl Default for ClassNames {
    fn default() -> Self {
        Self::new("positive", "negative")
    }
}

/// Binary classes from a strict `endpoint > threshold` rule.
#[derive(Debug, Clone, PartialEq)]
pub struct EndpointLabeling {
    threshold: f64,
    labels: Vec<bool>,
    class_names: ClassNames,
}

impl EndpointLabeling {
    pub fn from_endpoint(endpoint: &[f64], threshold: f64, class_names: ClassNames) -> Self {
        EndpointLabeling {
            threshold,
            labels: endpoint.iter().map(|&v| v > threshold).collect(),
            class_names,
        }
    }

    /// Labeling of a 0/1 endpoint at threshold 0.5; handy when the classes
    /// are already known.
    pub fn from_flags(flags: &[bool]) -> Self {
        EndpointLabeling {
            threshold: 0.5,
            labels: flags.to_vec(),
            class_names: ClassNames::default(),
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn class_names(&self) -> &ClassNames {
        &self.class_names
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_positive(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn n_negative(&self) -> usize {
        self.len() - self.n_positive()
    }

    pub fn has_both_classes(&self) -> bool {
        self.n_positive() > 0 && self.n_negative() > 0
    }

    pub fn class_name(&self, i: usize) -> &str {
        self.class_names.name(self.labels[i])
    }
}
