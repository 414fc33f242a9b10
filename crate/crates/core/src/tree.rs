//! Ternary trace of the inversions found during a run.
//!
//! Each node stands for a pair of pivots that were neighbors on the backbone
//! at some point. Finding an inversion between them splits the node into
//! three children; the middle child flips polarity, the outer two keep it.

use crate::instance::{Color, KeyId, BLUE_SENTINEL, RED_SENTINEL};

/// Whether the node's red pivot lies below its blue pivot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    RedBelowBlue,
    BlueBelowRed,
}

impl Polarity {
    pub fn flipped(self) -> Polarity {
        match self {
            Polarity::RedBelowBlue => Polarity::BlueBelowRed,
            Polarity::BlueBelowRed => Polarity::RedBelowBlue,
        }
    }
}

/// One subproblem the run worked on, identified by its bounding pivots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementNode {
    pub blue: KeyId,
    pub red: KeyId,
    pub polarity: Polarity,
    pub children: Option<[u32; 3]>,
    pub depth: u32,
    pub created_round: u64,
}

impl RefinementNode {
    /// Pivots in backbone order (lower first).
    pub fn pivots_ordered(&self) -> (KeyId, KeyId) {
        match self.polarity {
            Polarity::RedBelowBlue => (self.red, self.blue),
            Polarity::BlueBelowRed => (self.blue, self.red),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementTree {
    nodes: Vec<RefinementNode>,
}

impl RefinementTree {
    /// Root spans the two sentinels.
    pub fn new() -> RefinementTree {
        RefinementTree {
            nodes: vec![RefinementNode {
                blue: BLUE_SENTINEL,
                red: RED_SENTINEL,
                polarity: Polarity::RedBelowBlue,
                children: None,
                depth: 0,
                created_round: 0,
            }],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: u32) -> &RefinementNode {
        &self.nodes[id as usize]
    }

    pub fn nodes(&self) -> &[RefinementNode] {
        &self.nodes
    }

    pub fn root(&self) -> &RefinementNode {
        &self.nodes[0]
    }

    /// Splits `parent` with the inversion `lower < upper` found between its
    /// pivots, where `lower_color` is the color of the lower new pivot.
    /// Returns the three child ids in backbone order.
    pub fn split(
        &mut self,
        parent: u32,
        lower: KeyId,
        upper: KeyId,
        lower_color: Color,
        round: u64,
    ) -> [u32; 3] {
        let (p_low, p_high) = self.node(parent).pivots_ordered();
        let polarity = self.node(parent).polarity;
        let depth = self.node(parent).depth + 1;
        let first = self.nodes.len() as u32;
        let middle_polarity = polarity.flipped();
        let mk = |polarity: Polarity, low: KeyId, high: KeyId| {
            let (red, blue) = match polarity {
                Polarity::RedBelowBlue => (low, high),
                Polarity::BlueBelowRed => (high, low),
            };
            RefinementNode { blue, red, polarity, children: None, depth, created_round: round }
        };
        debug_assert_eq!(
            lower_color,
            match middle_polarity {
                Polarity::RedBelowBlue => Color::Red,
                Polarity::BlueBelowRed => Color::Blue,
            }
        );
        self.nodes.push(mk(polarity, p_low, lower));
        self.nodes.push(mk(middle_polarity, lower, upper));
        self.nodes.push(mk(polarity, upper, p_high));
        let ids = [first, first + 1, first + 2];
        self.nodes[parent as usize].children = Some(ids);
        ids
    }

    /// Maximum node depth; the root alone has height 0.
    pub fn height(&self) -> u32 {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Node ids of the current frontier (nodes without children), in the
    /// left-to-right order induced by the tree.
    pub fn frontier_in_order(&self) -> Vec<u32> {
        let mut out = Vec::new();
        let mut stack = vec![0u32];
        while let Some(id) = stack.pop() {
            match self.node(id).children {
                None => out.push(id),
                Some(children) => {
                    for c in children.iter().rev() {
                        stack.push(*c);
                    }
                }
            }
        }
        out
    }
}

impl Default for RefinementTree {
    fn default() -> Self {
        RefinementTree::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_tree() {
        let t = RefinementTree::new();
        assert_eq!(t.height(), 0);
        assert_eq!(t.frontier_in_order(), vec![0]);
        assert_eq!(t.root().polarity, Polarity::RedBelowBlue);
    }

    #[test]
    fn one_split_heights_and_polarity() {
        let mut t = RefinementTree::new();
        // root is red-below-blue, so the inversion has a blue lower pivot
        let ids = t.split(0, KeyId(4), KeyId(7), Color::Blue, 3);
        assert_eq!(t.height(), 1);
        assert_eq!(t.node(ids[0]).polarity, Polarity::RedBelowBlue);
        assert_eq!(t.node(ids[1]).polarity, Polarity::BlueBelowRed);
        assert_eq!(t.node(ids[2]).polarity, Polarity::RedBelowBlue);
        assert_eq!(t.node(ids[1]).pivots_ordered(), (KeyId(4), KeyId(7)));
        assert_eq!(t.node(ids[1]).created_round, 3);
        assert_eq!(t.frontier_in_order(), ids.to_vec());
        assert_eq!(t.root().children, Some(ids));
    }
}
