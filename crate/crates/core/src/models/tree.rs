use rand::RngCore;

use crate::error::{invalid, Result};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// Finite rooted ordered tree.
///
/// The root sits at index 0 and every node's index exceeds its parent's, so a
/// reverse scan over the nodes visits children before parents. The order of
/// `children` is the label order `(i;1), ..., (i;k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    nodes: Vec<TreeNode>,
    depth_bound: usize,
}

impl RootedTree {
    /// A bare root.
    pub fn root(depth_bound: usize) -> Self {
        Self {
            nodes: vec![TreeNode {
                parent: None,
                children: Vec::new(),
            }],
            depth_bound,
        }
    }

    /// Builds from a parent array (`parents[0]` must be `None`, every other
    /// entry `Some(p)` with `p < index`). Child order follows node index.
    pub fn from_parents(parents: &[Option<usize>], depth_bound: usize) -> Result<Self> {
        if parents.first() != Some(&None) {
            return invalid("parent array must start with the root");
        }
        let mut tree = Self::root(depth_bound);
        for (i, p) in parents.iter().enumerate().skip(1) {
            match *p {
                Some(p) if p < i => {
                    tree.push_child(p);
                }
                _ => return invalid(format!("node {i} must have a parent with smaller index")),
            }
        }
        if tree.height() > depth_bound {
            return invalid(format!(
                "tree height {} exceeds depth bound {depth_bound}",
                tree.height()
            ));
        }
        Ok(tree)
    }

    /// Appends a new child of `parent` and returns its index.
    pub fn push_child(&mut self, parent: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(TreeNode {
            parent: Some(parent),
            children: Vec::new(),
        });
        self.nodes[parent].children.push(id);
        id
    }

    /// Copies `sub` below `parent` (as its last child).
    pub fn graft(&mut self, parent: usize, sub: &RootedTree) {
        let mut map = vec![0usize; sub.len()];
        map[0] = self.push_child(parent);
        for v in 0..sub.len() {
            for &c in &sub.nodes[v].children {
                map[c] = self.push_child(map[v]);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn depth_bound(&self) -> usize {
        self.depth_bound
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    #[inline]
    pub fn children(&self, v: usize) -> &[usize] {
        &self.nodes[v].children
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.nodes[v].parent
    }

    /// Depth of every node (root = 0).
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0usize; self.nodes.len()];
        for v in 1..self.nodes.len() {
            depth[v] = depth[self.nodes[v].parent.unwrap()] + 1;
        }
        depth
    }

    pub fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// Copy restricted to nodes of depth at most `d`.
    pub fn truncated(&self, d: usize) -> RootedTree {
        let mut out = RootedTree::root(d);
        let mut map = vec![usize::MAX; self.len()];
        map[0] = 0;
        let depth = self.depths();
        for v in 0..self.len() {
            if depth[v] >= d {
                continue;
            }
            for &c in &self.nodes[v].children {
                map[c] = out.push_child(map[v]);
            }
        }
        out
    }

    /// The subtree hanging at `v`, as a tree rooted at `v`.
    pub fn subtree(&self, v: usize) -> RootedTree {
        let depth_v = self.depths()[v];
        let mut out = RootedTree::root(self.depth_bound.saturating_sub(depth_v));
        let mut stack = vec![(v, 0usize)];
        while let Some((x, y)) = stack.pop() {
            for &c in &self.nodes[x].children {
                let yc = out.push_child(y);
                stack.push((c, yc));
            }
        }
        out.renumbered()
    }

    /// Same tree with nodes renumbered in breadth-first order.
    pub fn renumbered(&self) -> RootedTree {
        let mut out = RootedTree::root(self.depth_bound);
        let mut queue = std::collections::VecDeque::from([(0usize, 0usize)]);
        while let Some((x, y)) = queue.pop_front() {
            for &c in &self.nodes[x].children {
                let yc = out.push_child(y);
                queue.push_back((c, yc));
            }
        }
        out
    }

    /// Uniformly permutes the children of every node.
    pub fn shuffle(&mut self, rng: &mut impl RngCore) {
        for node in &mut self.nodes {
            rng::shuffle(rng, &mut node.children);
        }
    }

    pub fn shuffled(&self, rng: &mut impl RngCore) -> RootedTree {
        let mut t = self.clone();
        t.shuffle(rng);
        t
    }
}

/// Two trees drawn jointly from the correlated tree model.
#[derive(Clone, Debug)]
pub struct TreePair {
    pub t: RootedTree,
    pub tprime: RootedTree,
    pub lambda: f64,
    pub s: f64,
    pub d: usize,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return invalid(format!("lambda must be finite and >= 0, got {lambda}"));
    }
    Ok(())
}

fn check_s(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return invalid(format!("s must lie in [0,1], got {s}"));
    }
    Ok(())
}

/// Depth-`d` Galton-Watson tree with Poisson(`lambda`) offspring.
pub fn sample_gw_tree(lambda: f64, d: usize, rng: &mut impl RngCore) -> Result<RootedTree> {
    check_lambda(lambda)?;
    Ok(gw_tree(lambda, d, rng))
}

pub(crate) fn gw_tree(lambda: f64, d: usize, rng: &mut impl RngCore) -> RootedTree {
    let mut t = RootedTree::root(d);
    let mut frontier = vec![0usize];
    for _ in 0..d {
        let mut next = Vec::new();
        for &v in &frontier {
            for _ in 0..rng::poisson(rng, lambda) {
                next.push(t.push_child(v));
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    t
}

/// Seeded convenience wrapper around [`sample_gw_tree`].
pub fn sample_gw_tree_seeded(lambda: f64, d: usize, seed: u64) -> Result<RootedTree> {
    sample_gw_tree(lambda, d, &mut rng::rng_from_seed(seed))
}

/// Shuffled `(lambda, s, d)` augmentation of an intersection tree.
fn augment(inter: &RootedTree, lambda: f64, s: f64, d: usize, rng: &mut impl RngCore) -> RootedTree {
    let extra_mean = lambda * (1.0 - s);
    let depth = inter.depths();
    let mut out = RootedTree::root(d);
    let mut map = vec![0usize; inter.len()];
    for v in 0..inter.len() {
        let y = map[v];
        let h = depth[v];
        if h >= d {
            continue;
        }
        for &c in inter.children(v) {
            map[c] = out.push_child(y);
        }
        for _ in 0..rng::poisson(rng, extra_mean) {
            let sub = gw_tree(lambda, d - h - 1, rng);
            out.graft(y, &sub);
        }
        let mut kids = std::mem::take(&mut out.nodes[y].children);
        rng::shuffle(rng, &mut kids);
        out.nodes[y].children = kids;
    }
    out
}

/// Draws a pair from the correlated tree model: a Poisson(`lambda*s`)
/// intersection tree, augmented and shuffled independently on each side.
pub fn sample_correlated_tree_pair(
    lambda: f64,
    s: f64,
    d: usize,
    rng: &mut impl RngCore,
) -> Result<TreePair> {
    check_lambda(lambda)?;
    check_s(s)?;
    let inter = gw_tree(lambda * s, d, rng);
    let t = augment(&inter, lambda, s, d, rng);
    let tprime = augment(&inter, lambda, s, d, rng);
    Ok(TreePair {
        t,
        tprime,
        lambda,
        s,
        d,
    })
}

/// Independent pair, each tree Galton-Watson with Poisson(`lambda`) offspring.
pub fn sample_independent_tree_pair(
    lambda: f64,
    d: usize,
    rng: &mut impl RngCore,
) -> Result<TreePair> {
    check_lambda(lambda)?;
    Ok(TreePair {
        t: gw_tree(lambda, d, rng),
        tprime: gw_tree(lambda, d, rng),
        lambda,
        s: 0.0,
        d,
    })
}
