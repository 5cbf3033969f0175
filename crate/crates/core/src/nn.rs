//! Exact nearest-neighbor queries over a fixed point set.
//!
//! Points are indexed by a k-d tree split at the median of the widest axis.
//! Queries descend the near side first and prune subtrees whose splitting
//! plane is farther than the best match, so results are exact at any distance.
//! Small sets fall back to a linear scan.

use alloc::vec::Vec;

use crate::geom::Vec3;

/// Below this many points queries use a linear scan.
pub const BRUTE_FORCE_LIMIT: usize = 512;

const LEAF_SIZE: usize = 8;

/// Nearest-neighbor index over a borrowed point set.
#[derive(Debug, Clone)]
pub struct NearestNeighbors<'a> {
    points: &'a [Vec3],
    tree: Option<Tree>,
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

#[derive(Debug, Clone)]
struct Tree {
    nodes: Vec<Node>,
    order: Vec<u32>,
}

impl<'a> NearestNeighbors<'a> {
    /// Builds an index over `points`.
    pub fn new(points: &'a [Vec3]) -> Self {
        if points.len() < BRUTE_FORCE_LIMIT {
            return NearestNeighbors { points, tree: None };
        }
        let mut tree = Tree { nodes: Vec::new(), order: (0..points.len() as u32).collect() };
        tree.build(points, 0, points.len());
        NearestNeighbors { points, tree: Some(tree) }
    }

    /// The indexed points.
    pub fn points(&self) -> &'a [Vec3] {
        self.points
    }

    /// Index and distance of the nearest point; `None` for an empty set.
    /// Ties resolve to the lowest index.
    pub fn nearest(&self, q: Vec3) -> Option<(usize, f64)> {
        let best = match &self.tree {
            None => brute_nearest(self.points, q),
            Some(t) => {
                let mut best = None;
                t.search(self.points, 0, q, &mut best);
                best
            }
        };
        best.map(|(i, d2)| (i, libm::sqrt(d2)))
    }
}

/// Linear-scan nearest neighbor returning `(index, squared distance)`.
pub fn brute_nearest(points: &[Vec3], q: Vec3) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &p) in points.iter().enumerate() {
        let d2 = p.distance_squared(q);
        if best.is_none_or(|(_, b)| d2 < b) {
            best = Some((i, d2));
        }
    }
    best
}

impl Tree {
    // Builds the subtree over order[start..end] and returns its node index.
    fn build(&mut self, points: &[Vec3], start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let slice = &mut self.order[start..end];
        let mut lo = points[slice[0] as usize];
        let mut hi = lo;
        for &i in slice.iter() {
            lo = lo.min(points[i as usize]);
            hi = hi.max(points[i as usize]);
        }
        let ext = hi - lo;
        let axis = if ext.x >= ext.y && ext.x >= ext.z {
            0
        } else if ext.y >= ext.z {
            1
        } else {
            2
        };
        let mid = slice.len() / 2;
        slice.select_nth_unstable_by(mid, |&a, &b| {
            points[a as usize][axis].total_cmp(&points[b as usize][axis]).then(a.cmp(&b))
        });
        let value = points[slice[mid] as usize][axis];
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build(points, start, start + mid);
        let right = self.build(points, start + mid, end);
        self.nodes[id] = Node::Split { axis, value, left, right };
        id
    }

    fn search(&self, points: &[Vec3], node: usize, q: Vec3, best: &mut Option<(usize, f64)>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let i = i as usize;
                    let d2 = points[i].distance_squared(q);
                    let better = match *best {
                        None => true,
                        Some((bi, bd)) => d2 < bd || (d2 == bd && i < bi),
                    };
                    if better {
                        *best = Some((i, d2));
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                // left holds coordinates <= value, right holds >= value
                let diff = q[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(points, near, q, best);
                if best.is_none_or(|(_, bd)| diff * diff <= bd) {
                    self.search(points, far, q, best);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tree_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<Vec3> = (0..3000)
            .map(|_| Vec3::new(rng.random::<f64>() * 2.0, rng.random::<f64>() * 3.0, rng.random::<f64>() * 0.2))
            .collect();
        let nn = NearestNeighbors::new(&pts);
        for _ in 0..2000 {
            let q = Vec3::new(
                rng.random::<f64>() * 6.0 - 2.0,
                rng.random::<f64>() * 7.0 - 2.0,
                rng.random::<f64>() * 4.0 - 2.0,
            );
            let (gi, gd) = nn.nearest(q).unwrap();
            let (bi, bd2) = brute_nearest(&pts, q).unwrap();
            assert_eq!(gi, bi);
            assert_eq!(gd, libm::sqrt(bd2));
        }
    }

    #[test]
    fn empty_and_small_sets() {
        let nn = NearestNeighbors::new(&[]);
        assert!(nn.nearest(Vec3::ZERO).is_none());
        let pts = [Vec3::X, Vec3::Y];
        let nn = NearestNeighbors::new(&pts);
        assert_eq!(nn.nearest(Vec3::new(0.1, 0.9, 0.0)).unwrap().0, 1);
    }
}
