//! Multi-indices and the graded layout of a truncated Hermite basis.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

/// A multi-index `n = (n_1, ..., n_d)` of non-negative integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: impl Into<Vec<u32>>) -> Self {
        MultiIndex(entries.into())
    }

    /// The one-dimensional index `n`.
    pub fn scalar(n: u32) -> Self {
        MultiIndex(vec![n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|n| = n_1 + ... + n_d`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

/// The set `{n : |n| <= cutoff}` in `d` dimensions, enumerated by total
/// order first and lexicographically (descending) within an order.
///
/// Because the enumeration is graded, the layout for a smaller cutoff is a
/// prefix of the layout for a larger one; zero-padding between cutoffs is
/// therefore a plain resize of the coefficient vector.
#[derive(Debug, PartialEq, Eq)]
pub struct BasisLayout {
    dim: usize,
    cutoff: usize,
    entries: Vec<u32>,
    orders: Vec<u32>,
    positions: HashMap<Vec<u32>, usize>,
}

impl BasisLayout {
    /// Shared layout for `(dim, cutoff)`. Layouts are interned, so two
    /// vectors with the same shape point at the same allocation.
    pub fn shared(dim: usize, cutoff: usize) -> Arc<BasisLayout> {
        static INTERNED: OnceLock<Mutex<HashMap<(usize, usize), Arc<BasisLayout>>>> =
            OnceLock::new();
        let table = INTERNED.get_or_init(Default::default);
        let mut table = table.lock().expect("layout table poisoned");
        table
            .entry((dim, cutoff))
            .or_insert_with(|| Arc::new(BasisLayout::build(dim, cutoff)))
            .clone()
    }

    fn build(dim: usize, cutoff: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        let mut entries = Vec::new();
        let mut orders = Vec::new();
        let mut scratch = vec![0u32; dim];
        for order in 0..=cutoff as u32 {
            push_compositions(order, 0, &mut scratch, &mut entries);
            let count = entries.len() / dim - orders.len();
            orders.extend(std::iter::repeat_n(order, count));
        }
        let positions = entries
            .chunks(dim)
            .enumerate()
            .map(|(i, c)| (c.to_vec(), i))
            .collect();
        BasisLayout {
            dim,
            cutoff,
            entries,
            orders,
            positions,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Number of retained basis functions.
    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    /// Entries of the `i`-th multi-index.
    pub fn entries(&self, i: usize) -> &[u32] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn index(&self, i: usize) -> MultiIndex {
        MultiIndex::new(self.entries(i))
    }

    /// `|n|` of the `i`-th multi-index.
    pub fn order(&self, i: usize) -> u32 {
        self.orders[i]
    }

    pub fn position(&self, n: &MultiIndex) -> Option<usize> {
        self.positions.get(n.entries()).copied()
    }

    /// `(2|n| + d)^exponent` for every retained index.
    pub fn weights(&self, exponent: f64) -> Vec<f64> {
        let d = self.dim as f64;
        self.orders
            .iter()
            .map(|&k| (2.0 * k as f64 + d).powf(exponent))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.entries.chunks(self.dim)
    }
}

fn push_compositions(remaining: u32, axis: usize, scratch: &mut [u32], out: &mut Vec<u32>) {
    let last = scratch.len() - 1;
    if axis == last {
        scratch[axis] = remaining;
        out.extend_from_slice(scratch);
        return;
    }
    for k in (0..=remaining).rev() {
        scratch[axis] = k;
        push_compositions(remaining - k, axis + 1, scratch, out);
    }
}
