//! The generalized Karp-Miller tree, kept as a baseline for the Clover
//! procedure.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::engine::Wsts;
use crate::order::{max_of, OrderedDomain};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KmNode<S> {
    pub label: S,
    pub parent: Option<usize>,
    /// Transition on the edge from the parent.
    pub via: Option<usize>,
    pub extensible: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KmStatus {
    Complete,
    NodeBudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KmTree<S> {
    /// Nodes in creation order; the root is node 0.
    pub nodes: Vec<KmNode<S>>,
    pub status: KmStatus,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("the Karp-Miller tree is incomplete (node budget exhausted)")]
pub struct IncompleteTree;

/// Builds the tree breadth-first, children ordered by transition name.
///
/// For a leaf labeled `s` and each enabled `f` with `s' = f(s)`:
/// - `s'` equals an ancestor label: closed leaf;
/// - no ancestor label lies below `s'`: extensible leaf labeled `s'`;
/// - otherwise, one child per ancestor `N0` with label `s'' < s'`, labeled
///   `accel(g)(s'')` where `g` is the path from `N0` followed by `f`;
///   ancestors where `g` is undefined are skipped, and if all are, the leaf
///   is extensible and labeled `s'`.
///
/// Accelerated children whose label equals an ancestor label are closed.
pub fn build_km_tree<W: Wsts>(
    instance: &W,
    s0: W::State,
    max_nodes: usize,
    accel_budget: usize,
) -> KmTree<W::State> {
    let order = instance.transitions_by_name();
    let mut nodes = vec![KmNode {
        label: s0,
        parent: None,
        via: None,
        extensible: true,
    }];
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        nodes[n].extensible = false;
        // path from the root to n, as node indices
        let mut path = vec![n];
        while let Some(p) = nodes[*path.last().unwrap()].parent {
            path.push(p);
        }
        path.reverse();
        for &t in &order {
            let Some(succ) = instance.apply(t, &nodes[n].label) else {
                continue;
            };
            let mut children: Vec<(W::State, bool)> = Vec::new();
            if path.iter().any(|&a| nodes[a].label == succ) {
                children.push((succ, false));
            } else if !path.iter().any(|&a| nodes[a].label.leq(&succ)) {
                children.push((succ, true));
            } else {
                for (depth, &anc) in path.iter().enumerate() {
                    if !nodes[anc].label.less(&succ) {
                        continue;
                    }
                    let mut word: Vec<usize> = path[depth + 1..]
                        .iter()
                        .map(|&x| nodes[x].via.expect("non-root nodes have an edge"))
                        .collect();
                    word.push(t);
                    // the path word need not be defined at an accelerated label
                    let Some(acc) = instance.accelerate(&word, &nodes[anc].label, accel_budget)
                    else {
                        continue;
                    };
                    let open = !path.iter().any(|&a| nodes[a].label == acc.value);
                    children.push((acc.value, open));
                }
                if children.is_empty() {
                    children.push((succ, true));
                }
            }
            for (label, open) in children {
                if nodes.len() >= max_nodes {
                    return KmTree {
                        nodes,
                        status: KmStatus::NodeBudgetExhausted,
                    };
                }
                nodes.push(KmNode {
                    label,
                    parent: Some(n),
                    via: Some(t),
                    extensible: open,
                });
                if open {
                    queue.push_back(nodes.len() - 1);
                }
            }
        }
    }
    KmTree {
        nodes,
        status: KmStatus::Complete,
    }
}

/// Maximal node labels of a complete tree.
pub fn km_max_labels<S: OrderedDomain + Ord + Clone>(
    tree: &KmTree<S>,
) -> Result<Vec<S>, IncompleteTree> {
    if tree.status != KmStatus::Complete {
        return Err(IncompleteTree);
    }
    let labels: Vec<S> = tree.nodes.iter().map(|n| n.label.clone()).collect();
    Ok(max_of(&labels))
}

/// Indented dump, one node per line: `label [extensible|closed] via name`.
pub fn dump_tree<W: Wsts>(instance: &W, tree: &KmTree<W::State>) -> String {
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); tree.nodes.len()];
    for (i, n) in tree.nodes.iter().enumerate() {
        if let Some(p) = n.parent {
            children[p].push(i);
        }
    }
    let mut out = String::new();
    let mut stack = vec![(0usize, 0usize)];
    while let Some((i, depth)) = stack.pop() {
        let n = &tree.nodes[i];
        let mark = if n.extensible { "extensible" } else { "closed" };
        let _ = write!(out, "{}{} [{}]", "  ".repeat(depth), n.label, mark);
        if let Some(t) = n.via {
            let _ = write!(out, " via {}", instance.transition_name(t));
        }
        out.push('\n');
        for &c in children[i].iter().rev() {
            stack.push((c, depth + 1));
        }
    }
    out
}
