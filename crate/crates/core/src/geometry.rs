//! Point sets and exact Euclidean minimum spanning trees.
//!
//! Trees are built with Prim's algorithm over the dense complete graph,
//! O(n^2) time and O(n) extra space, which is the right trade at the few
//! thousand points this crate targets. Candidate edges are ordered by
//! squared distance and then by their (min id, max id) pair, so the tree
//! is unique even with duplicate points or tied distances, and does not
//! depend on storage order.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// An immutable set of points in `dim` dimensions with stable integer ids.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    ids: Vec<usize>,
    id_pos: BTreeMap<usize, usize>,
    coords: Vec<f64>,
    dim: usize,
}

impl PointSet {
    /// Builds a point set from row-major coordinates, assigning ids `0..n`.
    pub fn new(coords: Vec<f64>, dim: usize) -> Result<Self> {
        let n = check_coords(&coords, dim)?;
        let ids: Vec<usize> = (0..n).collect();
        let id_pos = ids.iter().map(|&id| (id, id)).collect();
        Ok(Self { ids, id_pos, coords, dim })
    }

    /// Builds a point set with caller-supplied ids, one per row.
    pub fn with_ids(ids: Vec<usize>, coords: Vec<f64>, dim: usize) -> Result<Self> {
        let n = check_coords(&coords, dim)?;
        if ids.len() != n {
            return Err(Error::InvalidInput(format!(
                "{} ids for {} points",
                ids.len(),
                n
            )));
        }
        let id_pos: BTreeMap<usize, usize> =
            ids.iter().enumerate().map(|(pos, &id)| (id, pos)).collect();
        if id_pos.len() != n {
            return Err(Error::InvalidInput("duplicate point ids".into()));
        }
        Ok(Self { ids, id_pos, coords, dim })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Ids in storage order.
    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    /// Coordinates of the point stored at `pos`.
    pub fn point(&self, pos: usize) -> &[f64] {
        &self.coords[pos * self.dim..(pos + 1) * self.dim]
    }

    pub fn id_at(&self, pos: usize) -> usize {
        self.ids[pos]
    }

    pub fn point_by_id(&self, id: usize) -> Option<&[f64]> {
        self.id_pos.get(&id).map(|&pos| self.point(pos))
    }

    /// New point set holding the listed ids (kept as-is) and their rows.
    pub fn subset(&self, ids: &[usize]) -> Result<PointSet> {
        let mut coords = Vec::with_capacity(ids.len() * self.dim);
        for &id in ids {
            let row = self
                .point_by_id(id)
                .ok_or_else(|| Error::InvalidInput(format!("unknown point id {id}")))?;
            coords.extend_from_slice(row);
        }
        PointSet::with_ids(ids.to_vec(), coords, self.dim)
    }
}

fn check_coords(coords: &[f64], dim: usize) -> Result<usize> {
    if dim == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    if coords.is_empty() {
        return Err(Error::InvalidInput("point set must be nonempty".into()));
    }
    if !coords.len().is_multiple_of(dim) {
        return Err(Error::InvalidInput(format!(
            "{} coordinates are not a multiple of dimension {dim}",
            coords.len()
        )));
    }
    if !coords.iter().all(|c| c.is_finite()) {
        return Err(Error::InvalidInput("non-finite coordinate".into()));
    }
    Ok(coords.len() / dim)
}

/// One tree edge, keyed by point ids with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MstEdge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// A minimum spanning tree plus its degree histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct Mst {
    node_count: usize,
    edges: Vec<MstEdge>,
    degree_histogram: BTreeMap<usize, usize>,
}

impl Mst {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Edges sorted by (i, j).
    pub fn edges(&self) -> &[MstEdge] {
        &self.edges
    }

    /// Map from degree `k >= 1` to the number of nodes with that degree.
    pub fn degree_histogram(&self) -> &BTreeMap<usize, usize> {
        &self.degree_histogram
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Number of edges whose endpoints carry different labels.
    pub fn cut_edge_count(&self, labels: &BTreeMap<usize, bool>) -> Result<usize> {
        let mut cuts = 0;
        for e in &self.edges {
            let zi = label_of(labels, e.i)?;
            let zj = label_of(labels, e.j)?;
            if zi != zj {
                cuts += 1;
            }
        }
        Ok(cuts)
    }

    /// Number of edge pairs sharing a node: sum over nodes of C(deg, 2).
    pub fn shared_node_pairs(&self) -> usize {
        self.degree_histogram
            .iter()
            .map(|(&k, &count)| count * (k * (k - 1) / 2))
            .sum()
    }
}

fn label_of(labels: &BTreeMap<usize, bool>, id: usize) -> Result<bool> {
    labels
        .get(&id)
        .copied()
        .ok_or_else(|| Error::InvalidInput(format!("no label for point {id}")))
}

/// Exact Euclidean MST of the complete graph over `ps`.
///
/// Deterministic: ties between candidate edges of equal squared distance
/// go to the lexicographically smaller (min id, max id) pair, and the
/// walk starts from the smallest id, so the edge set is a function of the
/// id-to-coordinate mapping alone.
pub fn euclidean_mst(ps: &PointSet) -> Mst {
    let n = ps.len();
    let mut edges: Vec<MstEdge> = Vec::with_capacity(n.saturating_sub(1));

    if n > 1 {
        let start = *ps
            .id_pos
            .first_key_value()
            .expect("point sets are nonempty")
            .1;
        let mut in_tree = vec![false; n];
        let mut best_d2 = vec![f64::INFINITY; n];
        let mut best_key = vec![(usize::MAX, usize::MAX); n];
        in_tree[start] = true;
        let mut last = start;

        for _ in 1..n {
            for v in 0..n {
                if in_tree[v] {
                    continue;
                }
                let d2 = dist2(ps.point(last), ps.point(v));
                let key = edge_key(ps, last, v);
                if candidate_less(d2, key, best_d2[v], best_key[v]) {
                    best_d2[v] = d2;
                    best_key[v] = key;
                }
            }
            let mut pick = usize::MAX;
            for v in 0..n {
                if in_tree[v] || best_key[v].0 == usize::MAX {
                    continue;
                }
                if pick == usize::MAX
                    || candidate_less(best_d2[v], best_key[v], best_d2[pick], best_key[pick])
                {
                    pick = v;
                }
            }
            in_tree[pick] = true;
            edges.push(MstEdge {
                i: best_key[pick].0,
                j: best_key[pick].1,
                weight: math::sqrt(best_d2[pick]),
            });
            last = pick;
        }
    }

    edges.sort_by_key(|e| (e.i, e.j));

    let mut degrees: BTreeMap<usize, usize> = BTreeMap::new();
    for e in &edges {
        *degrees.entry(e.i).or_insert(0) += 1;
        *degrees.entry(e.j).or_insert(0) += 1;
    }
    let mut degree_histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for deg in degrees.into_values() {
        *degree_histogram.entry(deg).or_insert(0) += 1;
    }

    Mst {
        node_count: n,
        edges,
        degree_histogram,
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let t = x - y;
            t * t
        })
        .sum()
}

fn edge_key(ps: &PointSet, a_pos: usize, b_pos: usize) -> (usize, usize) {
    let (x, y) = (ps.id_at(a_pos), ps.id_at(b_pos));
    if x < y {
        (x, y)
    } else {
        (y, x)
    }
}

fn candidate_less(d2_a: f64, key_a: (usize, usize), d2_b: f64, key_b: (usize, usize)) -> bool {
    if d2_a != d2_b {
        return d2_a < d2_b;
    }
    key_a < key_b
}
