//! Per-tweet feature vectors: pooling of token vectors, concatenation of two
//! embedding variants, the `CEV1` interchange file and a deterministic
//! stand-in embedder.
//!
//! # `CEV1` layout
//!
//! Little-endian, no padding:
//!
//! | offset | size | field                                            |
//! |--------|------|--------------------------------------------------|
//! | 0      | 4    | magic `CEV1`                                     |
//! | 4      | 2    | version (`u16`, = 1)                             |
//! | 6      | 1    | variant (0 bert, 1 elmo, 2 combined, 3 synthetic)|
//! | 7      | 1    | reserved (= 0)                                   |
//! | 8      | 4    | dim (`u32`)                                      |
//! | 12     | 8    | count (`u64`)                                    |
//! | 20     | ...  | `count` records                                  |
//!
//! Each record is a `u32` id length, the UTF-8 id bytes, then `dim` IEEE-754
//! `f32` values.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use rand::{Rng as _, SeedableRng};
use std::hash::Hasher;

pub const MAGIC: &[u8; 4] = b"CEV1";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 20;

pub const BERT_DIM: usize = 768;
pub const ELMO_DIM: usize = 1024;
pub const COMBINED_DIM: usize = BERT_DIM + ELMO_DIM;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[repr(u8)]
pub enum Variant {
    Bert = 0,
    Elmo = 1,
    Combined = 2,
    Synthetic = 3,
}

impl Variant {
    /// Report column order.
    pub const ALL: [Variant; 4] = [
        Variant::Bert,
        Variant::Elmo,
        Variant::Combined,
        Variant::Synthetic,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Bert => "bert",
            Variant::Elmo => "elmo",
            Variant::Combined => "combined",
            Variant::Synthetic => "synthetic",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Variant::Bert => "BERT",
            Variant::Elmo => "ELMo",
            Variant::Combined => "Combined BERT-ELMo",
            Variant::Synthetic => "Synthetic",
        }
    }

    /// Dimension a file of this variant must declare, if fixed.
    pub fn required_dim(self) -> Option<usize> {
        match self {
            Variant::Bert => Some(BERT_DIM),
            Variant::Elmo => Some(ELMO_DIM),
            Variant::Combined => Some(COMBINED_DIM),
            Variant::Synthetic => None,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown embedding variant `{s}`")))
    }
}

fn first_non_finite(values: &[f32]) -> Option<usize> {
    values.iter().position(|v| !v.is_finite())
}

/// A nonempty vector of finite `f32` values.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingVector(Vec<f32>);

impl EmbeddingVector {
    pub fn new(values: Vec<f32>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("embedding vector with zero components"));
        }
        if let Some(component) = first_non_finite(&values) {
            return Err(Error::NonFinite { row: 0, component });
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f32] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f32> {
        self.0
    }
}

/// Token vectors of one tweet: at least one row, all of the same dim.
#[derive(Clone, Debug, PartialEq)]
pub struct TokenMatrix {
    rows: Vec<EmbeddingVector>,
}

impl TokenMatrix {
    pub fn new(rows: Vec<EmbeddingVector>) -> Result<Self> {
        let dim = rows
            .first()
            .ok_or(Error::EmptyInput("token matrix with zero rows"))?
            .dim();
        if let Some(bad) = rows.iter().find(|r| r.dim() != dim) {
            return Err(Error::DimMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[EmbeddingVector] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.rows[0].dim()
    }
}

/// Start-of-sentence pooling: the first token's vector, unchanged.
pub fn cls_pool(tokens: &TokenMatrix) -> EmbeddingVector {
    tokens.rows[0].clone()
}

/// Componentwise mean of all token vectors, accumulated in `f64`.
pub fn mean_pool(tokens: &TokenMatrix) -> EmbeddingVector {
    let mut acc = vec![0f64; tokens.dim()];
    for row in &tokens.rows {
        for (a, &v) in acc.iter_mut().zip(row.values()) {
            *a += f64::from(v);
        }
    }
    let n = tokens.rows.len() as f64;
    EmbeddingVector(acc.into_iter().map(|a| (a / n) as f32).collect())
}

pub fn concat(a: &EmbeddingVector, b: &EmbeddingVector) -> EmbeddingVector {
    let mut values = Vec::with_capacity(a.dim() + b.dim());
    values.extend_from_slice(a.values());
    values.extend_from_slice(b.values());
    EmbeddingVector(values)
}

/// Deterministic pseudo-embedding: `dim` uniform draws in `[-1, 1]` from a
/// SplitMix64 stream seeded with `seed` xored with the FNV-1a hash of `text`.
pub fn synthetic_embed(text: &str, dim: usize, seed: u64) -> EmbeddingVector {
    assert!(dim > 0, "synthetic_embed needs dim > 0");
    let mut h = fnv::FnvHasher::default();
    h.write(text.as_bytes());
    let mut rng = SplitMix64::seed_from_u64(seed ^ h.finish());
    EmbeddingVector(
        (0..dim)
            .map(|_| (rng.random_range(-1.0..1.0f64) as f32).clamp(-1.0, 1.0))
            .collect(),
    )
}

/// Row-major table of per-tweet vectors keyed by tweet id.
#[derive(Clone, Debug)]
pub struct EmbeddingMatrix {
    variant: Variant,
    dim: usize,
    ids: Vec<String>,
    values: Vec<f32>,
    index: HashMap<String, usize>,
}

impl PartialEq for EmbeddingMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.variant == other.variant
            && self.dim == other.dim
            && self.ids == other.ids
            && self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl EmbeddingMatrix {
    /// `values` holds `ids.len() * dim` components, row after row.
    pub fn new(variant: Variant, dim: usize, ids: Vec<String>, values: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig(
                "embedding dim must be positive".into(),
            ));
        }
        if values.len() != ids.len() * dim {
            return Err(Error::DimMismatch {
                expected: ids.len() * dim,
                found: values.len(),
            });
        }
        if let Some(pos) = first_non_finite(&values) {
            return Err(Error::NonFinite {
                row: pos / dim,
                component: pos % dim,
            });
        }
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateEmbeddingId(id.clone()));
            }
        }
        Ok(Self {
            variant,
            dim,
            ids,
            values,
            index,
        })
    }

    pub fn from_vectors(
        variant: Variant,
        ids: Vec<String>,
        vectors: Vec<EmbeddingVector>,
    ) -> Result<Self> {
        let dim = match vectors.first() {
            Some(v) => v.dim(),
            None => return Err(Error::EmptyInput("cannot infer dim from zero vectors")),
        };
        if ids.len() != vectors.len() {
            return Err(Error::DimMismatch {
                expected: ids.len(),
                found: vectors.len(),
            });
        }
        let mut values = Vec::with_capacity(dim * vectors.len());
        for v in vectors {
            if v.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: v.dim(),
                });
            }
            values.extend(v.into_values());
        }
        Self::new(variant, dim, ids, values)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn get(&self, id: &str) -> Option<&[f32]> {
        self.position(id).map(|i| self.row(i))
    }

    /// Ids from `wanted` that have no row here, in `wanted` order.
    pub fn missing_ids<'a>(&self, wanted: impl IntoIterator<Item = &'a str>) -> Vec<String> {
        wanted
            .into_iter()
            .filter(|id| !self.index.contains_key(*id))
            .map(str::to_owned)
            .collect()
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }
}

/// Concatenates rows of `a` and `b` by tweet id, in the row order of `a`.
pub fn combine_matrices(a: &EmbeddingMatrix, b: &EmbeddingMatrix) -> Result<EmbeddingMatrix> {
    let mut missing = b.missing_ids(a.ids.iter().map(String::as_str));
    let in_a: HashSet<&str> = a.ids.iter().map(String::as_str).collect();
    missing.extend(
        b.ids
            .iter()
            .filter(|id| !in_a.contains(id.as_str()))
            .cloned(),
    );
    if !missing.is_empty() {
        return Err(Error::Alignment(missing));
    }
    let dim = a.dim + b.dim;
    let mut values = Vec::with_capacity(a.len() * dim);
    for (i, id) in a.ids.iter().enumerate() {
        values.extend_from_slice(a.row(i));
        values.extend_from_slice(b.get(id).expect("id sets checked above"));
    }
    EmbeddingMatrix::new(Variant::Combined, dim, a.ids.clone(), values)
}

pub fn write_embeddings(m: &EmbeddingMatrix) -> Result<Vec<u8>> {
    if let Some(pos) = first_non_finite(&m.values) {
        return Err(Error::NonFinite {
            row: pos / m.dim,
            component: pos % m.dim,
        });
    }
    let dim = u32::try_from(m.dim)
        .map_err(|_| Error::InvalidConfig(format!("dim {} does not fit in u32", m.dim)))?;
    let id_bytes: usize = m.ids.iter().map(String::len).sum();
    let mut out = Vec::with_capacity(HEADER_LEN + id_bytes + m.len() * (4 + 4 * m.dim));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(m.variant.code());
    out.push(0);
    out.extend_from_slice(&dim.to_le_bytes());
    out.extend_from_slice(&(m.len() as u64).to_le_bytes());
    for (i, id) in m.ids.iter().enumerate() {
        let len = u32::try_from(id.len())
            .map_err(|_| Error::InvalidConfig(format!("id `{id}` is too long")))?;
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(id.as_bytes());
        for v in m.row(i) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::embedding_format(
                self.pos as u64,
                format!("truncated stream while reading {what}"),
            ));
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
}

pub fn read_embeddings(bytes: &[u8]) -> Result<EmbeddingMatrix> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(4, "magic")? != MAGIC {
        return Err(Error::embedding_format(0, "bad magic (expected `CEV1`)"));
    }
    let version = u16::from_le_bytes(cur.take(2, "version")?.try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::embedding_format(
            4,
            format!("unsupported version {version}"),
        ));
    }
    let code = cur.take(1, "variant")?[0];
    let variant = Variant::from_code(code)
        .ok_or_else(|| Error::embedding_format(6, format!("unknown variant code {code}")))?;
    if cur.take(1, "reserved byte")?[0] != 0 {
        return Err(Error::embedding_format(7, "reserved byte must be zero"));
    }
    let dim = cur.u32("dim")? as usize;
    if dim == 0 {
        return Err(Error::embedding_format(8, "dim must be positive"));
    }
    if let Some(required) = variant.required_dim() {
        if dim != required {
            return Err(Error::embedding_format(
                8,
                format!("variant {variant} requires dim {required}, header says {dim}"),
            ));
        }
    }
    let count = u64::from_le_bytes(cur.take(8, "count")?.try_into().unwrap());

    // Never trust `count` for preallocation beyond what the stream can hold.
    let min_record = 4 + 4 * dim;
    let plausible = (bytes.len() - HEADER_LEN) / min_record;
    let cap = usize::try_from(count).unwrap_or(usize::MAX).min(plausible);
    let mut ids = Vec::with_capacity(cap);
    let mut values = Vec::with_capacity(cap * dim);
    let mut seen = HashSet::with_capacity(cap);
    for _ in 0..count {
        let record_start = cur.pos as u64;
        let len = cur.u32("id length")? as usize;
        let id_start = cur.pos as u64;
        let id = std::str::from_utf8(cur.take(len, "id")?)
            .map_err(|_| Error::embedding_format(id_start, "id is not valid UTF-8"))?
            .to_owned();
        if !seen.insert(id.clone()) {
            return Err(Error::embedding_format(
                record_start,
                format!("duplicate id `{id}`"),
            ));
        }
        let raw = cur.take(4 * dim, "vector")?;
        let values_start = cur.pos - 4 * dim;
        for (j, chunk) in raw.chunks_exact(4).enumerate() {
            let v = f32::from_le_bytes(chunk.try_into().unwrap());
            if !v.is_finite() {
                return Err(Error::embedding_format(
                    (values_start + 4 * j) as u64,
                    format!("non-finite value in `{id}`, component {j}"),
                ));
            }
            values.push(v);
        }
        ids.push(id);
    }
    if cur.pos != bytes.len() {
        return Err(Error::embedding_format(
            cur.pos as u64,
            "trailing bytes after last record",
        ));
    }
    EmbeddingMatrix::new(variant, dim, ids, values)
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingMatrix> {
    let bytes = std::fs::read(path).map_err(|e| Error::from(e).at_path(path))?;
    read_embeddings(&bytes).map_err(|e| e.at_path(path))
}

pub fn save_embeddings(m: &EmbeddingMatrix, path: &Path) -> Result<()> {
    std::fs::write(path, write_embeddings(m)?).map_err(|e| Error::from(e).at_path(path))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(values: &[f32]) -> EmbeddingVector {
        EmbeddingVector::new(values.to_vec()).unwrap()
    }

    fn tokens(rows: &[&[f32]]) -> TokenMatrix {
        TokenMatrix::new(rows.iter().map(|r| v(r)).collect()).unwrap()
    }

    fn matrix(
        variant: Variant,
        dim: usize,
        ids: &[&str],
        fill: impl Fn(usize, usize) -> f32,
    ) -> EmbeddingMatrix {
        let values = (0..ids.len())
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| fill(i, j))
            .collect();
        EmbeddingMatrix::new(
            variant,
            dim,
            ids.iter().map(|s| s.to_string()).collect(),
            values,
        )
        .unwrap()
    }

    #[test]
    fn cls_takes_first_row() {
        assert_eq!(
            cls_pool(&tokens(&[&[1.0, 2.0], &[9.0, 9.0]])),
            v(&[1.0, 2.0])
        );
        assert_eq!(cls_pool(&tokens(&[&[0.5, -0.5]])), v(&[0.5, -0.5]));
        let wide = vec![0.25f32; BERT_DIM];
        assert_eq!(cls_pool(&tokens(&[&wide, &wide])).dim(), 768);
    }

    #[test]
    fn cls_is_order_sensitive_but_mean_is_not() {
        let ab = tokens(&[&[1.0, 0.0], &[3.0, 2.0]]);
        let ba = tokens(&[&[3.0, 2.0], &[1.0, 0.0]]);
        assert_ne!(cls_pool(&ab), cls_pool(&ba));
        assert_eq!(mean_pool(&ab), mean_pool(&ba));
    }

    #[test]
    fn mean_examples() {
        assert_eq!(
            mean_pool(&tokens(&[&[1.0, 3.0], &[3.0, 5.0]])),
            v(&[2.0, 4.0])
        );
        assert_eq!(mean_pool(&tokens(&[&[7.0, -1.5]])), v(&[7.0, -1.5]));
        assert_eq!(
            mean_pool(&tokens(&[&[0.0, 0.0], &[3.0, 0.0], &[0.0, 3.0]])),
            v(&[1.0, 1.0])
        );
    }

    #[test]
    fn token_matrix_rejects_empty_and_ragged() {
        assert!(TokenMatrix::new(vec![]).is_err());
        assert!(matches!(
            TokenMatrix::new(vec![v(&[1.0]), v(&[1.0, 2.0])]),
            Err(Error::DimMismatch {
                expected: 1,
                found: 2
            })
        ));
        assert!(EmbeddingVector::new(vec![]).is_err());
        assert!(EmbeddingVector::new(vec![f32::NAN]).is_err());
    }

    #[test]
    fn concat_examples() {
        assert_eq!(concat(&v(&[1.0, 2.0]), &v(&[3.0])), v(&[1.0, 2.0, 3.0]));
        assert_eq!(concat(&v(&[1.0]), &v(&[1.0])).dim(), 2);
        let bert = v(&vec![0.0; BERT_DIM]);
        let elmo = v(&vec![0.0; ELMO_DIM]);
        assert_eq!(concat(&bert, &elmo).dim(), 1792);
    }

    #[test]
    fn combine_aligns_by_id() {
        let a = matrix(Variant::Bert, BERT_DIM, &["x", "y", "z"], |i, j| {
            (i * 1000 + j) as f32
        });
        let b = matrix(Variant::Elmo, ELMO_DIM, &["z", "x", "y"], |i, j| {
            -((i * 1000 + j) as f32)
        });
        let c = combine_matrices(&a, &b).unwrap();
        assert_eq!(c.variant(), Variant::Combined);
        assert_eq!((c.len(), c.dim()), (3, COMBINED_DIM));
        assert_eq!(c.ids(), a.ids());
        for id in ["x", "y", "z"] {
            let expected = concat(&v(a.get(id).unwrap()), &v(b.get(id).unwrap()));
            assert_eq!(c.get(id).unwrap(), expected.values());
        }
    }

    #[test]
    fn combine_small_and_misaligned() {
        let a = matrix(Variant::Synthetic, 2, &["t"], |_, j| j as f32);
        let b = matrix(Variant::Synthetic, 3, &["t"], |_, j| 10.0 + j as f32);
        let c = combine_matrices(&a, &b).unwrap();
        assert_eq!(c.row(0), &[0.0, 1.0, 10.0, 11.0, 12.0]);

        let a = matrix(Variant::Synthetic, 1, &["p", "q"], |_, _| 0.0);
        let b = matrix(Variant::Synthetic, 1, &["p"], |_, _| 0.0);
        match combine_matrices(&a, &b) {
            Err(Error::Alignment(missing)) => assert_eq!(missing, vec!["q".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_header_only() {
        let m = EmbeddingMatrix::new(Variant::Synthetic, 4, vec![], vec![]).unwrap();
        let bytes = write_embeddings(&m).unwrap();
        // Hand-encoded header: magic, version 1, variant 3, reserved 0, dim 4, count 0.
        let mut expected = b"CEV1".to_vec();
        expected.extend_from_slice(&[1, 0, 3, 0, 4, 0, 0, 0]);
        expected.extend_from_slice(&[0; 8]);
        assert_eq!(bytes, expected);
        assert_eq!(bytes.len(), HEADER_LEN);
        assert_eq!(read_embeddings(&bytes).unwrap(), m);
    }

    #[test]
    fn bad_magic_at_offset_zero() {
        let mut bytes =
            write_embeddings(&matrix(Variant::Synthetic, 2, &["a"], |_, _| 1.0)).unwrap();
        bytes[..4].copy_from_slice(b"XXXX");
        match read_embeddings(&bytes) {
            Err(Error::EmbeddingFormat { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncated_and_trailing_streams() {
        let bytes = write_embeddings(&matrix(Variant::Synthetic, 2, &["ab"], |_, _| 1.0)).unwrap();
        // header 20 + len 4 + id 2 = 26; the vector starts at offset 26
        match read_embeddings(&bytes[..bytes.len() - 1]) {
            Err(Error::EmbeddingFormat { offset, .. }) => assert_eq!(offset, 26),
            other => panic!("unexpected {other:?}"),
        }
        let mut longer = bytes.clone();
        longer.push(0);
        match read_embeddings(&longer) {
            Err(Error::EmbeddingFormat { offset, .. }) => assert_eq!(offset, bytes.len() as u64),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn variant_dim_enforced_on_read() {
        let m = matrix(Variant::Synthetic, 5, &["a"], |_, _| 0.0).with_variant(Variant::Bert);
        let bytes = write_embeddings(&m).unwrap();
        match read_embeddings(&bytes) {
            Err(Error::EmbeddingFormat { offset, message }) => {
                assert_eq!(offset, 8);
                assert!(message.contains("768"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nan_in_file_is_rejected_with_offset() {
        let mut bytes =
            write_embeddings(&matrix(Variant::Synthetic, 2, &["a"], |_, _| 1.0)).unwrap();
        let off = HEADER_LEN + 4 + 1 + 4;
        bytes[off..off + 4].copy_from_slice(&f32::NAN.to_le_bytes());
        match read_embeddings(&bytes) {
            Err(Error::EmbeddingFormat { offset, .. }) => assert_eq!(offset, off as u64),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_finite_matrices_are_refused() {
        let r = EmbeddingMatrix::new(
            Variant::Synthetic,
            2,
            vec!["a".into()],
            vec![0.0, f32::INFINITY],
        );
        assert!(matches!(
            r,
            Err(Error::NonFinite {
                row: 0,
                component: 1
            })
        ));
    }

    #[test]
    fn synthetic_embed_properties() {
        let a = synthetic_embed("a", 4, 1);
        assert_eq!(a, synthetic_embed("a", 4, 1));
        assert_ne!(a, synthetic_embed("b", 4, 1));
        assert_ne!(a, synthetic_embed("a", 4, 2));
        let wide = synthetic_embed("some tweet", 1024, 77);
        assert!(wide.values().iter().all(|x| x.abs() <= 1.0));
    }
}
