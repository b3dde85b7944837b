//! Virtual binary trees over an ID range and the communication sets derived from them.
//!
//! The full binary tree over `[1, i]` has depth `d = ⌈log2 i⌉` and is labeled by in-order
//! traversal with `1..=2^(d+1) - 1`; leaves carry the odd labels. Relabeling every node by
//! `x ↦ ⌊x/2⌋ + 1` puts leaf `k` at label `k`. The communication set of `k` holds the
//! relabeled labels of all proper ancestors of leaf `k`.
//!
//! Any two leaves `k < k'` share the relabeled lowest common ancestor `r`, and `k < r ≤ k'`.
//! Schedulers wake the node holding ID `k` in the rounds of its set; `r` is then a round in
//! which both endpoints of an edge are awake after `k` has decided and before `k'` decides.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::engine::ceil_log2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VtreeError {
    #[error("range size must be positive")]
    EmptyRange,
    #[error("leaf {k} outside [1, {i}]")]
    LeafOutOfRange { k: u64, i: u64 },
    #[error("need k < k', got {k} and {k_prime}")]
    NotIncreasing { k: u64, k_prime: u64 },
}

#[inline]
fn star(label: u64) -> u64 {
    label / 2 + 1
}

/// In-order label of the ancestor at height `h` of the node with in-order label `x`.
#[inline]
fn ancestor_at(x: u64, h: u32) -> u64 {
    ((x >> (h + 1)) << (h + 1)) | (1 << h)
}

fn check_leaf(k: u64, i: u64) -> Result<(), VtreeError> {
    if i == 0 {
        return Err(VtreeError::EmptyRange);
    }
    if k == 0 || k > i {
        return Err(VtreeError::LeafOutOfRange { k, i });
    }
    Ok(())
}

/// Depth of the virtual tree over `[1, i]`.
pub fn tree_depth(i: u64) -> u32 {
    ceil_log2(i)
}

/// The communication set `S_k([1, i])`, in ascending order.
///
/// Labels above `i` can occur when `i` is not a power of two; they are kept and callers
/// skip rounds past the end of their schedule.
pub fn communication_set(k: u64, i: u64) -> Result<BTreeSet<u64>, VtreeError> {
    check_leaf(k, i)?;
    let leaf = 2 * k - 1;
    Ok((1..=tree_depth(i)).map(|h| star(ancestor_at(leaf, h))).collect())
}

/// Rounds in `[1, i]` in which the holder of ID `k` is awake: its own round plus its
/// communication set, ascending.
pub fn awake_schedule(k: u64, i: u64) -> Result<Vec<u64>, VtreeError> {
    let mut set = communication_set(k, i)?;
    set.insert(k);
    Ok(set.into_iter().filter(|&r| r <= i).collect())
}

/// The shared round of leaves `k < k'`: the relabeled lowest common ancestor.
pub fn common_round(k: u64, k_prime: u64, i: u64) -> Result<u64, VtreeError> {
    check_leaf(k, i)?;
    check_leaf(k_prime, i)?;
    if k >= k_prime {
        return Err(VtreeError::NotIncreasing { k, k_prime });
    }
    let (a, b) = (2 * k - 1, 2 * k_prime - 1);
    let h = 63 - (a ^ b).leading_zeros();
    Ok(star(ancestor_at(a, h)))
}

/// The materialized tree, in heap layout (index 1 is the root, children of `j` are `2j` and
/// `2j + 1`). Used for inspection and as an independent check of the arithmetic above.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommTree {
    pub i: u64,
    pub depth: u32,
    /// In-order label of heap node `j` at index `j - 1`.
    pub in_order_labels: Vec<u64>,
    /// Relabeled (`⌊x/2⌋ + 1`) label of heap node `j` at index `j - 1`.
    pub star_labels: Vec<u64>,
}

impl CommTree {
    pub fn new(i: u64) -> Result<Self, VtreeError> {
        if i == 0 {
            return Err(VtreeError::EmptyRange);
        }
        let depth = tree_depth(i);
        let size = (1usize << (depth + 1)) - 1;
        let mut in_order_labels = vec![0; size];
        // Iterative in-order walk over heap indices.
        let mut stack = Vec::new();
        let mut cur = 1usize;
        let mut next_label = 1u64;
        loop {
            while cur <= size {
                stack.push(cur);
                cur *= 2;
            }
            let Some(j) = stack.pop() else { break };
            in_order_labels[j - 1] = next_label;
            next_label += 1;
            cur = 2 * j + 1;
        }
        let star_labels = in_order_labels.iter().map(|&x| star(x)).collect();
        Ok(CommTree { i, depth, in_order_labels, star_labels })
    }

    pub fn node_count(&self) -> usize {
        self.in_order_labels.len()
    }

    /// Relabeled leaf labels from left to right.
    pub fn leaf_star_labels(&self) -> Vec<u64> {
        let first = 1usize << self.depth;
        (first..=self.node_count()).map(|j| self.star_labels[j - 1]).collect()
    }

    /// `S_k` by walking parent pointers from the leaf.
    pub fn ancestors_of_leaf(&self, k: u64) -> Result<BTreeSet<u64>, VtreeError> {
        check_leaf(k, self.i)?;
        let mut j = (1usize << self.depth) + (k as usize - 1);
        let mut out = BTreeSet::new();
        while j > 1 {
            j /= 2;
            out.insert(self.star_labels[j - 1]);
        }
        Ok(out)
    }

    /// One row per leaf: `(k, S_k)`.
    pub fn table(&self) -> Vec<(u64, Vec<u64>)> {
        (1..=self.i)
            .map(|k| (k, self.ancestors_of_leaf(k).expect("k in range").into_iter().collect()))
            .collect()
    }
}
