//! Left-ordered trees indexing the terms of the Magnus expansion.
//!
//! A full binary tree with `n` leaves is stored through its left-ordered
//! decomposition: a left spine ending in the leftmost leaf, with subtrees
//! `(τ_1, ..., τ_r)` grafted on. A tree without grafts is a single leaf. The
//! integration decoration (one integral per graft plus the outer one) is
//! implicit in this representation.
//!
//! Canonical text form: a leaf is `L`, a node is `(c_1 c_2 ... c_r)`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("leaf count must be at least 1, got {0}")]
    InvalidLeafCount(usize),
    #[error("a leaf has no left-ordered decomposition")]
    NoDecomposition,
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

/// A tree in left-ordered form; cloning is cheap (shared subtrees).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    grafts: Arc<[Tree]>,
}

impl Tree {
    pub fn leaf() -> Tree {
        Tree {
            grafts: Arc::from(Vec::new()),
        }
    }

    /// The node `(τ_1, ..., τ_r)`. An empty list gives a leaf.
    pub fn node(grafts: Vec<Tree>) -> Tree {
        Tree {
            grafts: Arc::from(grafts),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.grafts.is_empty()
    }

    /// Number of grafted subtrees `r` (0 for a leaf).
    pub fn arity(&self) -> usize {
        self.grafts.len()
    }

    /// Grafted subtrees in order; empty for a leaf.
    pub fn grafts(&self) -> &[Tree] {
        &self.grafts
    }

    /// `(τ_1, ..., τ_r)` such that `Tree::node(..) == self`.
    pub fn decompose(&self) -> Result<&[Tree], TreeError> {
        if self.is_leaf() {
            Err(TreeError::NoDecomposition)
        } else {
            Ok(&self.grafts)
        }
    }

    pub fn leaves(&self) -> usize {
        1 + self.grafts.iter().map(Tree::leaves).sum::<usize>()
    }

    /// Canonical text form.
    pub fn serialize(&self) -> String {
        self.to_string()
    }

    pub fn parse(s: &str) -> Result<Tree, TreeError> {
        let mut p = Parser {
            bytes: s.as_bytes(),
            pos: 0,
        };
        p.skip_ws();
        let t = p.tree()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(p.error("trailing input"));
        }
        Ok(t)
    }

    /// Visits every node (including leaves), parents before children.
    pub fn for_each_node<F: FnMut(&Tree)>(&self, f: &mut F) {
        f(self);
        for g in self.grafts.iter() {
            g.for_each_node(f);
        }
    }

    /// Human-readable nested commutator `H_τ(t1)`, integration variables
    /// numbered depth first. Argument order follows
    /// `[[H(κ), ∫H_τ1], ..., ∫H_τr]`.
    pub fn to_commutator_expression(&self) -> String {
        let mut next = 1;
        render(self, &mut next)
    }

    /// The full binary tree this left-ordered form encodes.
    pub fn to_full_binary(&self) -> FullBinaryTree {
        self.grafts.iter().fold(FullBinaryTree::Leaf, |acc, g| {
            FullBinaryTree::Branch(Box::new(acc), Box::new(g.to_full_binary()))
        })
    }

    /// Inverse of [`Tree::to_full_binary`].
    pub fn from_full_binary(b: &FullBinaryTree) -> Tree {
        let mut grafts = Vec::new();
        let mut cur = b;
        while let FullBinaryTree::Branch(l, r) = cur {
            grafts.push(Tree::from_full_binary(r));
            cur = l;
        }
        grafts.reverse();
        Tree::node(grafts)
    }
}

fn render(t: &Tree, next: &mut usize) -> String {
    let var = *next;
    *next += 1;
    let mut expr = format!("H(t{var})");
    for g in t.grafts.iter() {
        let inner_var = *next;
        let inner = render(g, next);
        expr = format!("[{expr}, ∫_0^{{t{var}}} dt{inner_var} {inner}]");
    }
    expr
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_leaf() {
            return f.write_str("L");
        }
        f.write_str("(")?;
        for (i, g) in self.grafts.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            fmt::Display::fmt(g, f)?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree({self})")
    }
}

impl FromStr for Tree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tree::parse(s)
    }
}

impl Serialize for Tree {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Tree {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Tree::parse(&s).map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> TreeError {
        TreeError::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn tree(&mut self) -> Result<Tree, TreeError> {
        match self.bytes.get(self.pos) {
            Some(b'L') => {
                self.pos += 1;
                Ok(Tree::leaf())
            }
            Some(b'(') => {
                self.pos += 1;
                let mut grafts = Vec::new();
                loop {
                    self.skip_ws();
                    match self.bytes.get(self.pos) {
                        Some(b')') => {
                            if grafts.is_empty() {
                                return Err(self.error("empty node"));
                            }
                            self.pos += 1;
                            return Ok(Tree::node(grafts));
                        }
                        None => return Err(self.error("unexpected end of input")),
                        _ => grafts.push(self.tree()?),
                    }
                }
            }
            Some(_) => Err(self.error("expected `L` or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Plain full binary tree, used to check the left-ordered encoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FullBinaryTree {
    Leaf,
    Branch(Box<FullBinaryTree>, Box<FullBinaryTree>),
}

impl FullBinaryTree {
    pub fn leaves(&self) -> usize {
        match self {
            FullBinaryTree::Leaf => 1,
            FullBinaryTree::Branch(l, r) => l.leaves() + r.leaves(),
        }
    }
}

/// All trees with `n` leaves, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeSet {
    #[serde(rename = "leaves")]
    pub n: usize,
    #[serde(rename = "trees")]
    pub members: Vec<Tree>,
}

impl TreeSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Tree> {
        self.members.iter()
    }

    /// `{"leaves": n, "trees": ["...", ...]}`
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree set serializes")
    }
}

impl<'a> IntoIterator for &'a TreeSet {
    type Item = &'a Tree;
    type IntoIter = std::slice::Iter<'a, Tree>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// Every tree with `n` leaves exactly once.
///
/// Order: by graft count `r`, then by the composition of `n − 1` into the
/// subtree leaf counts (lexicographic), then lexicographically by the
/// recursively ordered subtrees.
pub fn enumerate(n: usize) -> Result<TreeSet, TreeError> {
    if n == 0 {
        return Err(TreeError::InvalidLeafCount(0));
    }
    let levels = enumerate_levels(n);
    Ok(TreeSet {
        n,
        members: levels.into_iter().nth(n).expect("level n built"),
    })
}

/// `levels[k]` = canonical list of trees with `k` leaves, `1 <= k <= n`.
pub(crate) fn enumerate_levels(n: usize) -> Vec<Vec<Tree>> {
    let mut levels: Vec<Vec<Tree>> = vec![Vec::new(), vec![Tree::leaf()]];
    for k in 2..=n {
        let mut out = Vec::new();
        for r in 1..k {
            for comp in crate::coefficients::compositions(k - 1, r) {
                push_products(&levels, &comp, &mut Vec::with_capacity(r), &mut out);
            }
        }
        levels.push(out);
    }
    levels
}

fn push_products(
    levels: &[Vec<Tree>],
    comp: &[usize],
    prefix: &mut Vec<Tree>,
    out: &mut Vec<Tree>,
) {
    let depth = prefix.len();
    if depth == comp.len() {
        out.push(Tree::node(prefix.clone()));
        return;
    }
    for t in &levels[comp[depth]] {
        prefix.push(t.clone());
        push_products(levels, comp, prefix, out);
        prefix.pop();
    }
}

/// `Catalan(n − 1)`, the number of full binary trees with `n` leaves.
pub fn count(n: usize) -> Result<BigUint, TreeError> {
    if n == 0 {
        return Err(TreeError::InvalidLeafCount(0));
    }
    // C_0 = 1, C_{k+1} = sum_i C_i C_{k-i}
    let mut c: Vec<BigUint> = vec![BigUint::one()];
    for k in 0..n - 1 {
        let mut next = BigUint::zero();
        for i in 0..=k {
            next += &c[i] * &c[k - i];
        }
        c.push(next);
    }
    Ok(c[n - 1].clone())
}

/// Full binary trees with `n` leaves by the standard left/right split.
pub fn enumerate_full_binary(n: usize) -> Vec<FullBinaryTree> {
    let mut memo: HashMap<usize, Vec<FullBinaryTree>> = HashMap::new();
    full_binary_rec(n, &mut memo)
}

fn full_binary_rec(
    n: usize,
    memo: &mut HashMap<usize, Vec<FullBinaryTree>>,
) -> Vec<FullBinaryTree> {
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![FullBinaryTree::Leaf];
    }
    if let Some(v) = memo.get(&n) {
        return v.clone();
    }
    let mut out = Vec::new();
    for left in 1..n {
        let ls = full_binary_rec(left, memo);
        let rs = full_binary_rec(n - left, memo);
        for l in &ls {
            for r in &rs {
                out.push(FullBinaryTree::Branch(
                    Box::new(l.clone()),
                    Box::new(r.clone()),
                ));
            }
        }
    }
    memo.insert(n, out.clone());
    out
}

/// The seven-leaf example tree `((L) ((L) L))`: a two-leaf graft followed by
/// a four-leaf graft.
pub fn seven_leaf_example() -> Tree {
    Tree::parse("((L) ((L) L))").expect("literal parses")
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    fn t(s: &str) -> Tree {
        Tree::parse(s).unwrap()
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate(1).unwrap().members, vec![Tree::leaf()]);
        let three = enumerate(3).unwrap();
        assert_eq!(three.members, vec![t("((L))"), t("(L L)")]);
        assert_eq!(enumerate(4).unwrap().len(), 5);
        assert_eq!(
            enumerate(4)
                .unwrap()
                .members
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>(),
            vec!["(((L)))", "((L L))", "(L (L))", "((L) L)", "(L L L)"]
        );
    }

    #[test]
    fn zero_leaves_rejected() {
        assert_eq!(enumerate(0), Err(TreeError::InvalidLeafCount(0)));
        assert_eq!(count(0), Err(TreeError::InvalidLeafCount(0)));
    }

    #[test]
    fn counts() {
        assert_eq!(count(1).unwrap(), BigUint::one());
        assert_eq!(count(4).unwrap(), BigUint::from(5u32));
        assert_eq!(count(10).unwrap(), BigUint::from(4862u32));
        assert_eq!(enumerate(10).unwrap().len(), 4862);
    }

    #[test]
    fn decompose() {
        assert_eq!(Tree::leaf().decompose(), Err(TreeError::NoDecomposition));
        assert_eq!(
            t("(L L)").decompose().unwrap(),
            &[Tree::leaf(), Tree::leaf()]
        );
        assert_eq!(t("((L))").decompose().unwrap(), &[t("(L)")]);
        let seven = seven_leaf_example();
        assert_eq!(seven.leaves(), 7);
        let parts = seven.decompose().unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].leaves(), 2);
        assert_eq!(parts[1].leaves(), 4);
    }

    #[test]
    fn serialization() {
        assert_eq!(Tree::leaf().serialize(), "L");
        assert_eq!(
            Tree::node(vec![Tree::leaf(), Tree::leaf()]).serialize(),
            "(L L)"
        );
        assert_eq!(t("  ( (L)\n L )").serialize(), "((L) L)");
        assert_eq!(t("(LL)").serialize(), "(L L)");
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let cases = [
            ("", 0),
            ("(", 1),
            ("()", 1),
            ("(L", 2),
            ("L L", 2),
            ("(L x)", 3),
            ("X", 0),
        ];
        for (input, offset) in cases {
            match Tree::parse(input) {
                Err(TreeError::Parse { offset: o, .. }) => assert_eq!(o, offset, "{input:?}"),
                other => panic!("{input:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn commutator_rendering() {
        assert_eq!(Tree::leaf().to_commutator_expression(), "H(t1)");
        assert_eq!(
            t("(L)").to_commutator_expression(),
            "[H(t1), ∫_0^{t1} dt2 H(t2)]"
        );
        assert_eq!(
            t("((L))").to_commutator_expression(),
            "[H(t1), ∫_0^{t1} dt2 [H(t2), ∫_0^{t2} dt3 H(t3)]]"
        );
        assert_eq!(
            t("(L L)").to_commutator_expression(),
            "[[H(t1), ∫_0^{t1} dt2 H(t2)], ∫_0^{t1} dt3 H(t3)]"
        );
    }

    #[test]
    fn left_ordered_form_is_a_bijection_with_full_binary_trees() {
        for n in 1..=9 {
            let ours: HashSet<FullBinaryTree> = enumerate(n)
                .unwrap()
                .iter()
                .map(Tree::to_full_binary)
                .collect();
            let reference: HashSet<FullBinaryTree> = enumerate_full_binary(n).into_iter().collect();
            assert_eq!(ours, reference, "n={n}");
            for b in &reference {
                assert_eq!(b.leaves(), n);
                assert_eq!(Tree::from_full_binary(b).to_full_binary(), *b);
            }
        }
    }

    #[test]
    fn enumeration_has_no_duplicates_and_right_sizes() {
        for n in 1..=12 {
            let set = enumerate(n).unwrap();
            let distinct: HashSet<String> = set.iter().map(Tree::serialize).collect();
            assert_eq!(distinct.len(), set.len());
            assert!(set.iter().all(|t| t.leaves() == n));
            assert_eq!(BigUint::from(set.len()), count(n).unwrap());
        }
    }

    #[test]
    fn json_export() {
        let json = enumerate(3).unwrap().to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["leaves"], 3);
        assert_eq!(v["trees"], serde_json::json!(["((L))", "(L L)"]));
    }
}
