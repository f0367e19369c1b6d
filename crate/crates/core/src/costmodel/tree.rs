use serde_json::Value;

use crate::error::{Error, Result};
use crate::lattice::RelationSet;

/// A bushy join tree over relation indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JoinTree {
    Leaf(usize),
    Join(Box<JoinTree>, Box<JoinTree>),
}

impl JoinTree {
    pub fn leaf(i: usize) -> Self {
        JoinTree::Leaf(i)
    }

    pub fn join(left: JoinTree, right: JoinTree) -> Self {
        JoinTree::Join(Box::new(left), Box::new(right))
    }

    /// The set of relations at the leaves.
    pub fn relations(&self) -> RelationSet {
        match self {
            JoinTree::Leaf(i) => RelationSet::singleton(*i),
            JoinTree::Join(l, r) => l.relations().union(r.relations()),
        }
    }

    /// Spanned sets of the inner nodes, in post-order.
    pub fn inner_sets(&self) -> Vec<RelationSet> {
        fn walk(t: &JoinTree, out: &mut Vec<RelationSet>) -> RelationSet {
            match t {
                JoinTree::Leaf(i) => RelationSet::singleton(*i),
                JoinTree::Join(l, r) => {
                    let s = walk(l, out).union(walk(r, out));
                    out.push(s);
                    s
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            JoinTree::Leaf(_) => 1,
            JoinTree::Join(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    /// Checks that sibling subtrees are disjoint and indices fit in a mask;
    /// returns the spanned set.
    pub fn validate(&self) -> Result<RelationSet> {
        match self {
            JoinTree::Leaf(i) if *i < 32 => Ok(RelationSet::singleton(*i)),
            JoinTree::Leaf(i) => Err(Error::InvalidArgument(format!(
                "relation index {i} out of range"
            ))),
            JoinTree::Join(l, r) => {
                let (a, b) = (l.validate()?, r.validate()?);
                if !a.intersection(b).is_empty() {
                    return Err(Error::InvalidArgument(format!(
                        "join children overlap on {:?}",
                        a.intersection(b)
                    )));
                }
                Ok(a.union(b))
            }
        }
    }

    /// The same tree with the children of every inner node swapped.
    pub fn mirrored(&self) -> JoinTree {
        match self {
            JoinTree::Leaf(i) => JoinTree::Leaf(*i),
            JoinTree::Join(l, r) => JoinTree::join(r.mirrored(), l.mirrored()),
        }
    }

    /// Nested JSON arrays of relation names.
    pub fn to_json(&self, names: &[String]) -> Value {
        match self {
            JoinTree::Leaf(i) => Value::String(names[*i].clone()),
            JoinTree::Join(l, r) => Value::Array(vec![l.to_json(names), r.to_json(names)]),
        }
    }
}
