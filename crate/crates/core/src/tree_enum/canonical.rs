use crate::error::{Error, Result};
use crate::models::RootedTree;

/// Isomorphism class of a rooted tree, encoded AHU-style as a balanced
/// parenthesis string with children codes sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalTree {
    pub code: String,
    pub size: usize,
    pub depth: usize,
}

pub fn canonical_form(t: &RootedTree) -> CanonicalTree {
    let n = t.len();
    let mut codes: Vec<String> = vec![String::new(); n];
    let mut heights = vec![0usize; n];
    for v in (0..n).rev() {
        let mut kids: Vec<String> = t.children(v).iter().map(|&c| std::mem::take(&mut codes[c])).collect();
        kids.sort_unstable();
        let mut code = String::with_capacity(2 + kids.iter().map(String::len).sum::<usize>());
        code.push('(');
        for k in &kids {
            code.push_str(k);
        }
        code.push(')');
        codes[v] = code;
        heights[v] = t.children(v).iter().map(|&c| heights[c] + 1).max().unwrap_or(0);
    }
    CanonicalTree {
        code: std::mem::take(&mut codes[0]),
        size: n,
        depth: heights[0],
    }
}

impl CanonicalTree {
    /// Rebuilds a representative tree (children in code order).
    pub fn to_tree(&self) -> RootedTree {
        tree_from_code(&self.code).expect("canonical codes are well formed")
    }
}

/// Parses a parenthesis code into a tree whose depth bound is its height.
pub fn tree_from_code(code: &str) -> Result<RootedTree> {
    let bytes = code.as_bytes();
    if bytes.first() != Some(&b'(') {
        return Err(Error::Parse(format!("tree code must start with '(': {code}")));
    }
    let mut parents: Vec<Option<usize>> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    for (pos, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => {
                if pos > 0 && stack.is_empty() {
                    return Err(Error::Parse(format!("multiple roots in {code}")));
                }
                parents.push(stack.last().copied());
                stack.push(parents.len() - 1);
            }
            b')' => {
                stack
                    .pop()
                    .ok_or_else(|| Error::Parse(format!("unbalanced code {code}")))?;
            }
            _ => return Err(Error::Parse(format!("unexpected byte in tree code {code}"))),
        }
    }
    if !stack.is_empty() {
        return Err(Error::Parse(format!("unbalanced code {code}")));
    }
    let height = {
        let mut depth = vec![0usize; parents.len()];
        for v in 1..parents.len() {
            depth[v] = depth[parents[v].unwrap()] + 1;
        }
        depth.into_iter().max().unwrap_or(0)
    };
    RootedTree::from_parents(&parents, height)
}
