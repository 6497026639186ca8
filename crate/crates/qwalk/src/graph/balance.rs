use std::collections::VecDeque;

use super::{Graph, Sign};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Balance {
    pub balanced: bool,
    /// Vertex signing with sign(u,v) = θ(u)·θ(v) on every edge, when balanced.
    pub theta: Option<Vec<Sign>>,
}

/// Spanning-forest sign propagation followed by an audit of every edge.
pub fn balance(g: &Graph) -> Balance {
    let n = g.vertex_count();
    let mut theta: Vec<Option<Sign>> = vec![None; n];
    for root in 0..n {
        if theta[root].is_some() {
            continue;
        }
        theta[root] = Some(Sign::Plus);
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            let tx = theta[x].unwrap_or(Sign::Plus);
            for e in g.incident(x) {
                let y = e.other(x);
                if theta[y].is_none() {
                    theta[y] = Some(tx * e.sign);
                    queue.push_back(y);
                }
            }
        }
    }
    let theta: Vec<Sign> = theta.into_iter().map(|t| t.unwrap_or(Sign::Plus)).collect();
    let balanced = g.edges().iter().all(|e| theta[e.u] * theta[e.v] == e.sign);
    Balance {
        balanced,
        theta: balanced.then_some(theta),
    }
}
