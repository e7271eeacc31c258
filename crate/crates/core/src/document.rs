//! JSON exchange format for sparse tensors and bilinear forms.
//!
//! ```json
//! {"m": 4, "kind": "tensor4", "entries": [[[0, 1, 0, 3], "-1/1"]], "metadata": {}}
//! ```
//!
//! Indices are zero based in the order e1, f1, e2, f2, ...; omitted entries
//! are zero.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{KdecError, Result};
use crate::rational::{format_q, parse_q, Q};
use crate::tensor::{Bilinear, Tensor4};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocumentKind {
    Tensor4,
    Bilinear,
}

impl DocumentKind {
    pub fn arity(self) -> usize {
        match self {
            DocumentKind::Tensor4 => 4,
            DocumentKind::Bilinear => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DocumentEntry {
    pub indices: Vec<usize>,
    pub value: Q,
}

/// A validated document. Construction always goes through [`TensorDocument::new`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorDocument {
    m: usize,
    kind: DocumentKind,
    entries: Vec<DocumentEntry>,
    metadata: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    m: usize,
    kind: DocumentKind,
    entries: Vec<(Vec<usize>, String)>,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

fn bad(msg: impl Into<String>) -> KdecError {
    KdecError::Document(msg.into())
}

impl TensorDocument {
    pub fn new(
        m: usize,
        kind: DocumentKind,
        entries: Vec<DocumentEntry>,
        metadata: BTreeMap<String, String>,
    ) -> Result<Self> {
        if m == 0 || m % 2 != 0 {
            return Err(bad(format!("m = {m} must be a positive even number")));
        }
        let mut seen = HashSet::new();
        for e in &entries {
            if e.indices.len() != kind.arity() {
                return Err(bad(format!("entry {:?} needs {} indices", e.indices, kind.arity())));
            }
            if let Some(i) = e.indices.iter().find(|&&i| i >= m) {
                return Err(bad(format!("index {i} in {:?} is out of range for m = {m}", e.indices)));
            }
            if !seen.insert(e.indices.clone()) {
                return Err(bad(format!("duplicate entry {:?}", e.indices)));
            }
        }
        Ok(TensorDocument { m, kind, entries, metadata })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawDocument = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let entries = raw
            .entries
            .into_iter()
            .map(|(indices, v)| {
                let value = parse_q(&v).ok_or_else(|| bad(format!("`{v}` at {indices:?} is not a rational p/q")))?;
                Ok(DocumentEntry { indices, value })
            })
            .collect::<Result<Vec<_>>>()?;
        TensorDocument::new(raw.m, raw.kind, entries, raw.metadata)
    }

    pub fn to_json(&self) -> String {
        let raw = RawDocument {
            m: self.m,
            kind: self.kind,
            entries: self.entries.iter().map(|e| (e.indices.clone(), format_q(&e.value))).collect(),
            metadata: self.metadata.clone(),
        };
        serde_json::to_string_pretty(&raw).expect("documents always serialize")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn kind(&self) -> DocumentKind {
        self.kind
    }

    pub fn entries(&self) -> &[DocumentEntry] {
        &self.entries
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    /// Nonzero components in index order.
    pub fn from_tensor(a: &Tensor4, metadata: BTreeMap<String, String>) -> Self {
        let entries = a
            .nonzero_entries()
            .map(|(ix, v)| DocumentEntry { indices: ix.to_vec(), value: v.clone() })
            .collect();
        TensorDocument { m: a.m(), kind: DocumentKind::Tensor4, entries, metadata }
    }

    pub fn from_bilinear(phi: &Bilinear, metadata: BTreeMap<String, String>) -> Self {
        let m = phi.m();
        let mut entries = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let v = phi.get(i, j);
                if !num_traits::Zero::is_zero(v) {
                    entries.push(DocumentEntry { indices: vec![i, j], value: v.clone() });
                }
            }
        }
        TensorDocument { m, kind: DocumentKind::Bilinear, entries, metadata }
    }

    pub fn to_tensor(&self) -> Result<Tensor4> {
        if self.kind != DocumentKind::Tensor4 {
            return Err(KdecError::KindMismatch);
        }
        let mut a = Tensor4::zeros(self.m);
        for e in &self.entries {
            let ix = &e.indices;
            a.set(ix[0], ix[1], ix[2], ix[3], e.value.clone());
        }
        Ok(a)
    }

    pub fn to_bilinear(&self) -> Result<Bilinear> {
        if self.kind != DocumentKind::Bilinear {
            return Err(KdecError::KindMismatch);
        }
        let mut phi = Bilinear::zeros(self.m);
        for e in &self.entries {
            phi.set(e.indices[0], e.indices[1], e.value.clone());
        }
        Ok(phi)
    }
}
