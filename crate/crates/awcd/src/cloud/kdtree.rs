//! Exact kd-tree over a point cloud.
//!
//! Median split on the widest-spread axis, leaf size 16. Queries are exact:
//! correctness is defined against a linear scan, with neighbor ordering by
//! `(distance, index)` so duplicate points resolve deterministically.
//!
//! The index copies the coordinates at build time and is immutable
//! afterwards; concurrent read queries are safe.

use std::collections::BinaryHeap;

use super::model::{CloudError, PointCloud};

const LEAF_SIZE: usize = 16;

#[derive(Debug)]
enum Node {
    Leaf {
        start: u32,
        end: u32,
    },
    Split {
        axis: u32,
        value: f64,
        left: u32,
        right: u32,
    },
}

/// Immutable kd-tree supporting exact kNN and radius queries.
#[derive(Debug)]
pub struct SpatialIndex {
    dim: usize,
    coords: Vec<f64>,
    order: Vec<u32>,
    nodes: Vec<Node>,
    root: u32,
}

/// One kNN result: point index and Euclidean distance to the query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

/// Max-heap entry ordered by (distance², index); the heap top is the worst
/// current candidate.
#[derive(PartialEq)]
struct Candidate {
    d2: f64,
    index: u32,
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.d2
            .total_cmp(&other.d2)
            .then(self.index.cmp(&other.index))
    }
}

impl SpatialIndex {
    /// Builds the index; fails on an empty cloud.
    pub fn build(cloud: &PointCloud) -> Result<Self, CloudError> {
        if cloud.is_empty() {
            return Err(CloudError::EmptyCloud);
        }
        let dim = cloud.dim();
        let coords = cloud.coords().to_vec();
        let mut order: Vec<u32> = (0..cloud.len() as u32).collect();
        let mut nodes = Vec::new();
        let root = build_node(&coords, dim, &mut order, 0, cloud.len(), &mut nodes);
        Ok(Self {
            dim,
            coords,
            order,
            nodes,
            root,
        })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn point(&self, i: u32) -> &[f64] {
        let i = i as usize;
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    fn check_query(&self, query: &[f64]) -> Result<(), CloudError> {
        if query.len() != self.dim {
            return Err(CloudError::Parameter(format!(
                "query dimension {} does not match index dimension {}",
                query.len(),
                self.dim
            )));
        }
        if query.iter().any(|c| !c.is_finite()) {
            return Err(CloudError::NonFinite);
        }
        Ok(())
    }

    /// The k nearest points to an arbitrary query position, ascending by
    /// distance with ties broken by lower index. A cloud point at the query
    /// position is a normal result.
    pub fn knn(&self, query: &[f64], k: usize) -> Result<Vec<Neighbor>, CloudError> {
        self.check_query(query)?;
        if k < 1 || k > self.len() {
            return Err(CloudError::Parameter(format!(
                "k = {k} out of range 1..={}",
                self.len()
            )));
        }
        Ok(self.knn_impl(query, k, u32::MAX))
    }

    /// The k nearest neighbors of cloud point `index`, excluding the point
    /// itself (exact duplicates of it are still reported).
    pub fn knn_of_point(&self, index: usize, k: usize) -> Result<Vec<Neighbor>, CloudError> {
        if index >= self.len() {
            return Err(CloudError::Parameter(format!(
                "point index {index} out of bounds for {}",
                self.len()
            )));
        }
        if k < 1 || k > self.len() - 1 {
            return Err(CloudError::Parameter(format!(
                "k = {k} out of range 1..={} after self-exclusion",
                self.len() - 1
            )));
        }
        let query = self.point(index as u32).to_vec();
        Ok(self.knn_impl(&query, k, index as u32))
    }

    fn knn_impl(&self, query: &[f64], k: usize, exclude: u32) -> Vec<Neighbor> {
        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
        self.knn_visit(self.root, query, k, exclude, &mut heap);
        let mut results: Vec<Candidate> = heap.into_vec();
        results.sort_unstable_by(|a, b| a.cmp(b));
        results
            .into_iter()
            .map(|c| Neighbor {
                index: c.index as usize,
                distance: c.d2.sqrt(),
            })
            .collect()
    }

    fn knn_visit(
        &self,
        node: u32,
        query: &[f64],
        k: usize,
        exclude: u32,
        heap: &mut BinaryHeap<Candidate>,
    ) {
        match &self.nodes[node as usize] {
            Node::Leaf { start, end } => {
                for slot in *start..*end {
                    let index = self.order[slot as usize];
                    if index == exclude {
                        continue;
                    }
                    let d2 = dist2(self.point(index), query);
                    let candidate = Candidate { d2, index };
                    if heap.len() < k {
                        heap.push(candidate);
                    } else if candidate < *heap.peek().expect("heap is non-empty") {
                        heap.pop();
                        heap.push(candidate);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let delta = query[*axis as usize] - value;
                let (near, far) = if delta <= 0.0 {
                    (*left, *right)
                } else {
                    (*right, *left)
                };
                self.knn_visit(near, query, k, exclude, heap);
                // The far side may still hold an equal-distance, lower-index
                // candidate, so the plane test is inclusive.
                let visit_far = heap.len() < k
                    || delta * delta <= heap.peek().expect("heap is non-empty").d2;
                if visit_far {
                    self.knn_visit(far, query, k, exclude, heap);
                }
            }
        }
    }

    /// All point indices within the closed ball of radius `d` around the
    /// query, ascending by index. A cloud point at the query position is
    /// included (distance zero belongs to every closed ball).
    pub fn radius_neighbors(&self, query: &[f64], d: f64) -> Result<Vec<usize>, CloudError> {
        self.check_query(query)?;
        if !(d >= 0.0) {
            return Err(CloudError::Parameter(format!("radius {d} must be >= 0")));
        }
        let mut hits = Vec::new();
        self.radius_visit(self.root, query, d * d, &mut hits);
        hits.sort_unstable();
        Ok(hits)
    }

    /// Number of points within the closed ball (no allocation of indices).
    pub fn radius_count(&self, query: &[f64], d: f64) -> Result<usize, CloudError> {
        self.check_query(query)?;
        if !(d >= 0.0) {
            return Err(CloudError::Parameter(format!("radius {d} must be >= 0")));
        }
        Ok(self.count_visit(self.root, query, d * d))
    }

    fn radius_visit(&self, node: u32, query: &[f64], d2cap: f64, hits: &mut Vec<usize>) {
        match &self.nodes[node as usize] {
            Node::Leaf { start, end } => {
                for slot in *start..*end {
                    let index = self.order[slot as usize];
                    if dist2(self.point(index), query) <= d2cap {
                        hits.push(index as usize);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let delta = query[*axis as usize] - value;
                if delta <= 0.0 {
                    self.radius_visit(*left, query, d2cap, hits);
                    if delta * delta <= d2cap {
                        self.radius_visit(*right, query, d2cap, hits);
                    }
                } else {
                    self.radius_visit(*right, query, d2cap, hits);
                    if delta * delta <= d2cap {
                        self.radius_visit(*left, query, d2cap, hits);
                    }
                }
            }
        }
    }

    fn count_visit(&self, node: u32, query: &[f64], d2cap: f64) -> usize {
        match &self.nodes[node as usize] {
            Node::Leaf { start, end } => (*start..*end)
                .filter(|slot| {
                    dist2(self.point(self.order[*slot as usize]), query) <= d2cap
                })
                .count(),
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let delta = query[*axis as usize] - value;
                let (near, far) = if delta <= 0.0 {
                    (*left, *right)
                } else {
                    (*right, *left)
                };
                let mut total = self.count_visit(near, query, d2cap);
                if delta * delta <= d2cap {
                    total += self.count_visit(far, query, d2cap);
                }
                total
            }
        }
    }
}

fn dist2(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum()
}

fn build_node(
    coords: &[f64],
    dim: usize,
    order: &mut [u32],
    offset: usize,
    len: usize,
    nodes: &mut Vec<Node>,
) -> u32 {
    let slice = &mut order[offset..offset + len];
    if len <= LEAF_SIZE {
        nodes.push(Node::Leaf {
            start: offset as u32,
            end: (offset + len) as u32,
        });
        return (nodes.len() - 1) as u32;
    }

    // Widest-spread axis over this node's points.
    let mut axis = 0;
    let mut best_spread = f64::NEG_INFINITY;
    for a in 0..dim {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &i in slice.iter() {
            let c = coords[i as usize * dim + a];
            lo = lo.min(c);
            hi = hi.max(c);
        }
        let spread = hi - lo;
        if spread > best_spread {
            best_spread = spread;
            axis = a;
        }
    }

    let mid = len / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| {
        coords[a as usize * dim + axis]
            .total_cmp(&coords[b as usize * dim + axis])
            .then(a.cmp(&b))
    });
    let value = coords[slice[mid] as usize * dim + axis];

    let left = build_node(coords, dim, order, offset, mid, nodes);
    let right = build_node(coords, dim, order, offset + mid, len - mid, nodes);
    nodes.push(Node::Split {
        axis: axis as u32,
        value,
        left,
        right,
    });
    (nodes.len() - 1) as u32
}

/// Linear-scan reference used by the exactness tests and property suites.
#[doc(hidden)]
pub mod linear_scan {
    use super::{dist2, Neighbor};
    use crate::cloud::PointCloud;

    pub fn knn(cloud: &PointCloud, query: &[f64], k: usize, exclude: Option<usize>) -> Vec<Neighbor> {
        let mut all: Vec<(f64, usize)> = cloud
            .points()
            .enumerate()
            .filter(|(i, _)| Some(*i) != exclude)
            .map(|(i, p)| (dist2(p, query), i))
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        all.truncate(k);
        all.into_iter()
            .map(|(d2, index)| Neighbor {
                index,
                distance: d2.sqrt(),
            })
            .collect()
    }

    pub fn radius(cloud: &PointCloud, query: &[f64], d: f64) -> Vec<usize> {
        cloud
            .points()
            .enumerate()
            .filter(|(_, p)| dist2(p, query) <= d * d)
            .map(|(i, _)| i)
            .collect()
    }
}
