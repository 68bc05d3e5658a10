//! Embedding CSV files: header `id,c1[,c2],label`, one row per compound.

use std::io::{Read, Write};

use crate::dataset::EndpointLabeling;
use crate::matrix::Matrix;

/// Writes coordinates with compound ids and class names.
///
/// Numbers use the shortest decimal form that parses back to the same
/// `f64`, so the files are reproducible and lossless.
pub fn write_embedding_csv<W: Write>(
    out: W,
    ids: &[String],
    coords: &Matrix,
    labels: &EndpointLabeling,
) -> csv::Result<()> {
    assert_eq!(ids.len(), coords.rows());
    assert_eq!(labels.len(), coords.rows());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["id".to_string()];
    header.extend((1..=coords.cols()).map(|j| format!("c{j}")));
    header.push("label".to_string());
    w.write_record(&header)?;
    for (i, id) in ids.iter().enumerate() {
        let mut rec = Vec::with_capacity(coords.cols() + 2);
        rec.push(id.clone());
        rec.extend(coords.row(i).iter().map(|v| v.to_string()));
        rec.push(labels.class_name(i).to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Contents of an embedding CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingRecord {
    pub ids: Vec<String>,
    pub coords: Matrix,
    pub labels: Vec<String>,
}

pub fn read_embedding_csv<R: Read>(input: R) -> Result<EmbeddingRecord, String> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(|e| e.to_string())?.clone();
    let k = header.len().saturating_sub(2);
    let expected: Vec<String> = std::iter::once("id".to_string())
        .chain((1..=k).map(|j| format!("c{j}")))
        .chain(std::iter::once("label".to_string()))
        .collect();
    if k == 0 || header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(format!(
            "unexpected header {:?}",
            header.iter().collect::<Vec<_>>()
        ));
    }
    let mut ids = Vec::new();
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        ids.push(rec[0].to_string());
        for j in 1..=k {
            values.push(
                rec[j]
                    .parse::<f64>()
                    .map_err(|e| format!("{e} in `{}`", &rec[j]))?,
            );
        }
        labels.push(rec[k + 1].to_string());
    }
    Ok(EmbeddingRecord {
        coords: Matrix::from_vec(ids.len(), k, values),
        ids,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_round_trip() {
        let ids = vec!["a".to_string(), "b".to_string()];
        let coords = Matrix::from_rows(&[[0.1, -2.5e-17], [1.0 / 3.0, 7.0]]);
        let labels = EndpointLabeling::from_flags(&[true, false]);
        let mut buf = Vec::new();
        write_embedding_csv(&mut buf, &ids, &coords, &labels).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("id,c1,c2,label\n"));
        let back = read_embedding_csv(buf.as_slice()).unwrap();
        assert_eq!(back.coords, coords);
        assert_eq!(back.labels, ["positive", "negative"]);
    }

    #[test]
    fn one_dimensional_header() {
        let ids = vec!["a".to_string(), "b".to_string()];
        let mut buf = Vec::new();
        write_embedding_csv(
            &mut buf,
            &ids,
            &Matrix::zeros(2, 1),
            &EndpointLabeling::from_flags(&[true, false]),
        )
        .unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("id,c1,label\n"));
        assert!(read_embedding_csv("id,x,label\na,1,p\n".as_bytes()).is_err());
    }
}
