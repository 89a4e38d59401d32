//! Vertex connectivity by unit-capacity max flow on the vertex-split graph.
//!
//! With `delta` the minimum degree, some vertex among any `delta + 1` lies
//! outside a minimum separator, so it suffices to take the minimum local
//! connectivity `kappa(s, t)` over the first `delta + 1` sources `s` and every
//! `t` not adjacent to `s`.

use std::collections::VecDeque;

use crate::error::{Error, Refusal, Result};
use crate::topology::CrossedCube;
use crate::vertex_set::VertexSet;

/// Default cap on the number of max-flow computations.
pub const DEFAULT_FLOW_BUDGET: u64 = 50_000;

#[derive(Debug, Clone)]
pub struct Connectivity {
    pub value: usize,
    /// A minimum separator (for `CQ_1`, the vertex whose removal leaves one).
    pub witness: VertexSet,
    pub flows_computed: u64,
}

struct FlowNetwork {
    head: Vec<usize>,
    next: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<u32>,
}

const NONE: usize = usize::MAX;
const INF: u32 = u32::MAX / 2;

impl FlowNetwork {
    fn with_nodes(nodes: usize) -> Self {
        FlowNetwork { head: vec![NONE; nodes], next: Vec::new(), to: Vec::new(), cap: Vec::new() }
    }

    fn add_arc(&mut self, a: usize, b: usize, cap: u32) {
        for (x, y, c) in [(a, b, cap), (b, a, 0)] {
            self.to.push(y);
            self.cap.push(c);
            self.next.push(self.head[x]);
            self.head[x] = self.to.len() - 1;
        }
    }

    /// Edmonds-Karp, stopping once `limit` units have been pushed.
    fn max_flow(&mut self, s: usize, t: usize, limit: u32) -> u32 {
        let mut flow = 0;
        let mut parent = vec![NONE; self.head.len()];
        while flow < limit {
            parent.fill(NONE);
            parent[s] = NONE - 1;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                let mut e = self.head[x];
                while e != NONE {
                    let y = self.to[e];
                    if self.cap[e] > 0 && parent[y] == NONE {
                        parent[y] = e;
                        queue.push_back(y);
                    }
                    e = self.next[e];
                }
                if parent[t] != NONE {
                    break;
                }
            }
            if parent[t] == NONE {
                break;
            }
            let mut y = t;
            while y != s {
                let e = parent[y];
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                y = self.to[e ^ 1];
            }
            flow += 1;
        }
        flow
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            let mut e = self.head[x];
            while e != NONE {
                let y = self.to[e];
                if self.cap[e] > 0 && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
                e = self.next[e];
            }
        }
        seen
    }
}

/// Local vertex connectivity between non-adjacent `s` and `t`, and a minimum
/// separator. Vertex `v` splits into `2v` (in) and `2v + 1` (out).
pub fn local_connectivity(cube: &CrossedCube, s: u32, t: u32) -> (usize, VertexSet) {
    let count = cube.vertex_count();
    let mut net = FlowNetwork::with_nodes(2 * count);
    for v in 0..count as u32 {
        let cap = if v == s || v == t { INF } else { 1 };
        net.add_arc(2 * v as usize, 2 * v as usize + 1, cap);
        for w in cube.neighbor_labels(v) {
            net.add_arc(2 * v as usize + 1, 2 * w as usize, INF);
        }
    }
    let flow = net.max_flow(2 * s as usize + 1, 2 * t as usize, cube.n() + 1);
    let seen = net.reachable(2 * s as usize + 1);
    let mut cut = VertexSet::empty(cube.dim());
    for v in 0..count as u32 {
        if seen[2 * v as usize] && !seen[2 * v as usize + 1] {
            cut.insert_label(v);
        }
    }
    debug_assert_eq!(cut.len(), flow as usize);
    (flow as usize, cut)
}

/// `kappa(CQ_n)`: the minimum number of vertices whose removal disconnects the
/// cube (or, for the complete `CQ_1`, leaves a single vertex).
pub fn connectivity(cube: &CrossedCube, flow_budget: u64) -> Result<Connectivity> {
    let count = cube.vertex_count() as u64;
    if cube.n() == 1 {
        let witness = VertexSet::from_labels(cube.dim(), [1])?;
        return Ok(Connectivity { value: 1, witness, flows_computed: 0 });
    }
    let degree = cube.n() as u64;
    let needed = (degree + 1) * count;
    if needed > flow_budget {
        return Err(Error::BudgetExceeded(Refusal {
            needed: needed as u128,
            budget: flow_budget,
            lower: 1,
            upper: Some(degree),
        }));
    }
    let mut best: Option<(usize, VertexSet)> = None;
    let mut flows = 0;
    for s in 0..=degree as u32 {
        let nbrs: Vec<u32> = cube.neighbor_labels(s).collect();
        for t in 0..count as u32 {
            if t == s || nbrs.contains(&t) {
                continue;
            }
            let (k, cut) = local_connectivity(cube, s, t);
            flows += 1;
            if best.as_ref().is_none_or(|(b, _)| k < *b) {
                best = Some((k, cut));
            }
        }
    }
    let (value, witness) = best.expect("CQ_n is not complete for n >= 2");
    Ok(Connectivity { value, witness, flows_computed: flows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::components;

    #[test]
    fn small_cubes() {
        for n in 1..=6 {
            let cube = CrossedCube::new(n).unwrap();
            let k = connectivity(&cube, DEFAULT_FLOW_BUDGET).unwrap();
            assert_eq!(k.value, n as usize, "n={n}");
            assert_eq!(k.witness.len(), n as usize);
            if n >= 2 {
                assert!(components(&cube, &k.witness).unwrap().len() >= 2);
            }
        }
    }

    #[test]
    fn refuses_over_budget() {
        let cube = CrossedCube::new(6).unwrap();
        match connectivity(&cube, 10) {
            Err(Error::BudgetExceeded(r)) => assert_eq!(r.upper, Some(6)),
            other => panic!("expected refusal, got {other:?}"),
        }
    }
}
