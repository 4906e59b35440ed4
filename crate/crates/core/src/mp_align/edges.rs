use crate::models::{unrolls_as_tree, SparseGraph};

/// Oriented edges of a graph. Edge `offset[j] + p` is `(j -> adj[j][p])`,
/// standing for the neighbourhood of `j` seen away from `adj[j][p]`.
#[derive(Clone, Debug)]
pub struct OrientedEdges {
    offset: Vec<usize>,
    head: Vec<u32>,
    tail: Vec<u32>,
    reverse: Vec<u32>,
}

impl OrientedEdges {
    pub fn new(g: &SparseGraph) -> Self {
        let n = g.n();
        let mut offset = Vec::with_capacity(n + 1);
        let mut total = 0;
        for j in 0..n {
            offset.push(total);
            total += g.degree(j);
        }
        offset.push(total);
        let mut head = Vec::with_capacity(total);
        let mut tail = Vec::with_capacity(total);
        for j in 0..n {
            for &i in g.neighbors(j) {
                head.push(j as u32);
                tail.push(i);
            }
        }
        let mut reverse = vec![0u32; total];
        for j in 0..n {
            for (p, &i) in g.neighbors(j).iter().enumerate() {
                let q = g.neighbors(i as usize).binary_search(&(j as u32)).expect("symmetric adjacency");
                reverse[offset[j] + p] = (offset[i as usize] + q) as u32;
            }
        }
        Self {
            offset,
            head,
            tail,
            reverse,
        }
    }

    pub fn len(&self) -> usize {
        self.head.len()
    }

    pub fn is_empty(&self) -> bool {
        self.head.is_empty()
    }

    /// `(j, i)` for edge `(j -> i)`.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        (self.head[e] as usize, self.tail[e] as usize)
    }

    /// Id of `(j -> i)`, if `{i, j}` is an edge.
    pub fn id(&self, g: &SparseGraph, j: usize, i: usize) -> Option<usize> {
        g.neighbors(j)
            .binary_search(&(i as u32))
            .ok()
            .map(|p| self.offset[j] + p)
    }

    /// Edges `(k -> j)` for the neighbours `k != i` of `j`, where `e = (j -> i)`.
    pub fn children(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        let j = self.head[e] as usize;
        (self.offset[j]..self.offset[j + 1])
            .filter(move |&f| f != e)
            .map(move |f| self.reverse[f] as usize)
    }

    /// Edges `(j -> i)` pointing into `i`, one per neighbour `j`.
    pub fn incoming(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (self.offset[i]..self.offset[i + 1]).map(move |f| self.reverse[f] as usize)
    }

    /// Largest `delta <= d` for which the oriented neighbourhood of each
    /// edge is a tree.
    pub fn tree_depths(&self, g: &SparseGraph, d: usize) -> Vec<usize> {
        (0..self.len())
            .map(|e| {
                let (j, i) = self.endpoints(e);
                (0..=d)
                    .rev()
                    .find(|&delta| unrolls_as_tree(g, j, i, delta))
                    .unwrap_or(0)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reverse_and_children() {
        // path 0-1-2 plus pendant 3 on 1
        let g = SparseGraph::from_edges(4, &[(0, 1), (1, 2), (1, 3)]).unwrap();
        let oe = OrientedEdges::new(&g);
        assert_eq!(oe.len(), 6);
        let e = oe.id(&g, 1, 0).unwrap();
        let kids: Vec<_> = oe.children(e).map(|f| oe.endpoints(f)).collect();
        assert_eq!(kids, vec![(2, 1), (3, 1)]);
        let into: Vec<_> = oe.incoming(1).map(|f| oe.endpoints(f)).collect();
        assert_eq!(into, vec![(0, 1), (2, 1), (3, 1)]);
    }

    #[test]
    fn cycle_limits_tree_depth() {
        let g = SparseGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let oe = OrientedEdges::new(&g);
        let depths = oe.tree_depths(&g, 5);
        // the walk j -> .. -> i returns to j through the removed edge
        assert!(depths.iter().all(|&d| d == 2));
        let tri = SparseGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let oe = OrientedEdges::new(&tri);
        assert!(oe.tree_depths(&tri, 3).iter().all(|&d| d == 1));
        let k4 = SparseGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let oe = OrientedEdges::new(&k4);
        assert!(oe.tree_depths(&k4, 3).iter().all(|&d| d == 0));
    }
}
