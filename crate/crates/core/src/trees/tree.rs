use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use crate::error::{Error, Result};

/// A non-planar rooted tree in canonical form.
///
/// The encoding is a nested bracket string: a node is `[` followed by its
/// children's encodings in lexicographic order and `]`. The single vertex is
/// `[]`, the cherry `[[][]]`. Trees are ordered by `(degree, encoding)`.
#[derive(Clone)]
pub struct RootedTree {
    children: Vec<RootedTree>,
    code: String,
    size: usize,
}

impl RootedTree {
    pub fn leaf() -> Self {
        Self::graft(Vec::new())
    }

    /// `B₊`: attach the given trees to a new root.
    pub fn graft(mut children: Vec<RootedTree>) -> Self {
        children.sort_by(|a, b| a.code.cmp(&b.code));
        let mut code = String::from("[");
        for c in &children {
            code.push_str(&c.code);
        }
        code.push(']');
        let size = 1 + children.iter().map(|c| c.size).sum::<usize>();
        RootedTree { children, code, size }
    }

    /// Path with `n` vertices.
    pub fn ladder(n: usize) -> Self {
        assert!(n >= 1);
        (1..n).fold(Self::leaf(), |t, _| Self::graft(vec![t]))
    }

    /// Root with `n − 1` leaf children.
    pub fn corolla(n: usize) -> Self {
        assert!(n >= 1);
        Self::graft(vec![Self::leaf(); n - 1])
    }

    pub fn children(&self) -> &[RootedTree] {
        &self.children
    }

    pub fn degree(&self) -> usize {
        self.size
    }

    pub fn code(&self) -> &str {
        &self.code
    }
}

impl PartialEq for RootedTree {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}

impl Eq for RootedTree {}

impl Hash for RootedTree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.code.hash(state);
    }
}

impl Ord for RootedTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size.cmp(&other.size).then_with(|| self.code.cmp(&other.code))
    }
}

impl PartialOrd for RootedTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code)
    }
}

impl fmt::Debug for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code)
    }
}

impl FromStr for RootedTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bytes = s.trim().as_bytes();
        let (tree, used) = parse_node(bytes, 0).ok_or_else(|| Error::Parse(format!("bad tree `{s}`")))?;
        if used != bytes.len() {
            return Err(Error::Parse(format!("trailing input after tree in `{s}`")));
        }
        Ok(tree)
    }
}

fn parse_node(b: &[u8], at: usize) -> Option<(RootedTree, usize)> {
    if b.get(at) != Some(&b'[') {
        return None;
    }
    let mut pos = at + 1;
    let mut children = Vec::new();
    while b.get(pos) == Some(&b'[') {
        let (child, next) = parse_node(b, pos)?;
        children.push(child);
        pos = next;
    }
    if b.get(pos) != Some(&b']') {
        return None;
    }
    Some((RootedTree::graft(children), pos + 1))
}

/// A commutative monomial of trees; the empty forest is the unit.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Forest(Vec<RootedTree>);

impl Forest {
    pub fn unit() -> Self {
        Forest(Vec::new())
    }

    pub fn new(mut trees: Vec<RootedTree>) -> Self {
        trees.sort();
        Forest(trees)
    }

    pub fn single(t: RootedTree) -> Self {
        Forest(vec![t])
    }

    pub fn trees(&self) -> &[RootedTree] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(RootedTree::degree).sum()
    }

    pub fn mul(&self, other: &Forest) -> Forest {
        let mut trees = self.0.clone();
        trees.extend(other.0.iter().cloned());
        Forest::new(trees)
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let codes: Vec<&str> = self.0.iter().map(RootedTree::code).collect();
        f.write_str(&codes.join(","))
    }
}

impl fmt::Debug for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Forest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(Forest::unit());
        }
        s.split(',').map(str::parse).collect::<Result<Vec<_>>>().map(Forest::new)
    }
}

/// All trees of degree `1..=max_degree`, sorted by `(degree, encoding)`.
pub fn enumerate_trees(max_degree: usize) -> Vec<RootedTree> {
    let mut by_degree: Vec<Vec<RootedTree>> = vec![Vec::new(); max_degree + 1];
    for n in 1..=max_degree {
        let mut found: Vec<RootedTree> =
            forests_of_degree(&by_degree, n - 1).into_iter().map(|f| RootedTree::graft(f.0)).collect();
        found.sort();
        found.dedup();
        by_degree[n] = found;
    }
    by_degree.into_iter().flatten().collect()
}

/// Forests of exactly degree `n`, built from the per-degree tree lists.
/// Trees are drawn in non-decreasing global order, so each multiset appears once.
fn forests_of_degree(by_degree: &[Vec<RootedTree>], n: usize) -> Vec<Forest> {
    let pool: Vec<&RootedTree> = by_degree.iter().take(n + 1).flatten().collect();
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec<'a>(
        pool: &[&'a RootedTree],
        start: usize,
        remaining: usize,
        current: &mut Vec<&'a RootedTree>,
        out: &mut Vec<Forest>,
    ) {
        if remaining == 0 {
            out.push(Forest::new(current.iter().map(|t| (*t).clone()).collect()));
            return;
        }
        for i in start..pool.len() {
            let t = pool[i];
            if t.degree() <= remaining {
                current.push(t);
                rec(pool, i, remaining - t.degree(), current, out);
                current.pop();
            }
        }
    }
    rec(&pool, 0, n, &mut current, &mut out);
    out
}

/// All forests of degree `0..=max_degree`, the unit first.
pub fn enumerate_forests(max_degree: usize) -> Vec<Forest> {
    let trees = enumerate_trees(max_degree);
    let mut by_degree: Vec<Vec<RootedTree>> = vec![Vec::new(); max_degree + 1];
    for t in trees {
        by_degree[t.degree()].push(t);
    }
    (0..=max_degree).flat_map(|n| forests_of_degree(&by_degree, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_encoding() {
        let a = RootedTree::graft(vec![RootedTree::ladder(2), RootedTree::leaf()]);
        let b = RootedTree::graft(vec![RootedTree::leaf(), RootedTree::ladder(2)]);
        assert_eq!(a, b);
        assert_eq!(a.code(), "[[[]][]]");
        assert_eq!(RootedTree::corolla(3).code(), "[[][]]");
        assert_eq!("[[][[]]]".parse::<RootedTree>().unwrap(), a);
        assert!("[[]".parse::<RootedTree>().is_err());
    }

    #[test]
    fn degree_three_order() {
        let codes: Vec<String> = enumerate_trees(3).iter().map(|t| t.to_string()).collect();
        assert_eq!(codes, ["[]", "[[]]", "[[[]]]", "[[][]]"]);
        assert_eq!(enumerate_trees(1).len(), 1);
    }

    #[test]
    fn forest_roundtrip() {
        let f: Forest = "[[]],[]".parse().unwrap();
        assert_eq!(f.to_string(), "[],[[]]");
        assert_eq!(f.degree(), 3);
        assert_eq!(Forest::unit().to_string(), "1");
        assert_eq!(enumerate_forests(3).len(), 1 + 1 + 2 + 4);
    }
}
