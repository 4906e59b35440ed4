use std::collections::HashMap;

use crate::error::{invalid, Result};

use super::{RootedTree, SparseGraph};

/// Breadth-first ball of radius `d` around `root`, ignoring the edge
/// `{root, excluded}` when given. Returns `None` as soon as the induced
/// subgraph on the ball is found to contain a cycle.
pub(crate) fn ball_tree(
    g: &SparseGraph,
    root: usize,
    excluded: Option<usize>,
    d: usize,
) -> Option<RootedTree> {
    ball_tree_impl(g, root, excluded, d, false)
}

/// True when the non-backtracking walks of length at most `d` that start at
/// `j` and do not step to `i` first visit distinct vertices, i.e. when the
/// message recursion on `j -> i` sees the same tree as the graph ball.
/// Unlike [`ball_tree`], reaching `i` again or closing a cycle through the
/// edge `{i, j}` disqualifies the edge.
pub(crate) fn unrolls_as_tree(g: &SparseGraph, j: usize, i: usize, d: usize) -> bool {
    ball_tree_impl(g, j, Some(i), d, true).is_some()
}

fn ball_tree_impl(
    g: &SparseGraph,
    root: usize,
    excluded: Option<usize>,
    d: usize,
    root_only: bool,
) -> Option<RootedTree> {
    let skip = |x: usize, y: usize| match excluded {
        Some(e) => (x == root && y == e) || (!root_only && x == e && y == root),
        None => false,
    };
    let mut tree = RootedTree::root(d);
    // vertex -> tree node
    let mut index: HashMap<u32, usize> = HashMap::new();
    let mut vertex_of = vec![root as u32];
    let mut parent_vertex: Vec<Option<u32>> = vec![None];
    let mut dist = vec![0usize];
    index.insert(root as u32, 0);
    let mut head = 0;
    while head < vertex_of.len() {
        let node = head;
        head += 1;
        let x = vertex_of[node] as usize;
        let px = parent_vertex[node];
        for &y in g.neighbors(x) {
            if skip(x, y as usize) || Some(y) == px {
                continue;
            }
            if index.contains_key(&y) {
                return None;
            }
            if dist[node] == d {
                continue;
            }
            let child = tree.push_child(node);
            index.insert(y, child);
            vertex_of.push(y);
            parent_vertex.push(Some(x as u32));
            dist.push(dist[node] + 1);
        }
    }
    Some(tree)
}

/// Radius-`d` neighbourhood of `i` as a rooted tree with children in
/// ascending vertex order, or `None` when the induced ball has a cycle.
pub fn neighborhood(g: &SparseGraph, i: usize, d: usize) -> Result<Option<RootedTree>> {
    if i >= g.n() {
        return invalid(format!("vertex {i} out of range for n={}", g.n()));
    }
    Ok(ball_tree(g, i, None, d))
}

/// Radius-`d` neighbourhood of `j` after deleting the edge `{i, j}`.
pub fn oriented_neighborhood(
    g: &SparseGraph,
    j: usize,
    i: usize,
    d: usize,
) -> Result<Option<RootedTree>> {
    if !g.has_edge(i, j) {
        return invalid(format!("({i},{j}) is not an edge"));
    }
    Ok(ball_tree(g, j, Some(i), d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> SparseGraph {
        SparseGraph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn path_center() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let t = neighborhood(&g, 1, 1).unwrap().unwrap();
        assert_eq!(t.children(0).len(), 2);
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn triangle_is_not_a_tree() {
        let g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert!(neighborhood(&g, 0, 1).unwrap().is_none());
    }

    #[test]
    fn star_center_radius_two() {
        let g = graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let t = neighborhood(&g, 0, 2).unwrap().unwrap();
        assert_eq!(t.len(), 5);
        assert_eq!(t.children(0).len(), 4);
    }

    #[test]
    fn boundary_edges_count_as_cycles() {
        // 4-cycle: the radius-2 ball around 0 contains all four edges
        let g = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert!(neighborhood(&g, 0, 1).unwrap().is_some());
        assert!(neighborhood(&g, 0, 2).unwrap().is_none());
    }

    #[test]
    fn oriented_examples() {
        let path = graph(3, &[(0, 1), (1, 2)]);
        let t = oriented_neighborhood(&path, 1, 0, 2).unwrap().unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.children(0).len(), 1);

        let edge = graph(2, &[(0, 1)]);
        for d in 0..4 {
            assert_eq!(oriented_neighborhood(&edge, 1, 0, d).unwrap().unwrap().len(), 1);
        }

        let square = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let t = oriented_neighborhood(&square, 1, 0, 3).unwrap().unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.height(), 3);

        assert!(oriented_neighborhood(&path, 0, 2, 1).is_err());
    }

    #[test]
    fn children_in_vertex_order() {
        let g = graph(5, &[(2, 4), (2, 0), (2, 3)]);
        let t = neighborhood(&g, 2, 1).unwrap().unwrap();
        assert_eq!(t.children(0), &[1, 2, 3]);
    }
}
