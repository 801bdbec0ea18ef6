use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use super::{ArchGraph, EdgeId, NodeId};
use crate::error::{Error, Result};

/// Path length measured first in junction crossings, then in edge hops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Distance {
    pub crossings: u32,
    pub hops: u32,
}

impl Distance {
    pub const ZERO: Distance = Distance { crossings: 0, hops: 0 };
    pub const INFINITE: Distance = Distance {
        crossings: u32::MAX,
        hops: u32::MAX,
    };

    pub fn is_finite(&self) -> bool {
        *self != Distance::INFINITE
    }

    fn step(self, major: bool) -> Distance {
        Distance {
            crossings: self.crossings + major as u32,
            hops: self.hops + 1,
        }
    }
}

impl ArchGraph {
    fn check_routable(&self, e: EdgeId) -> Result<()> {
        if e >= self.edges.len() {
            Err(Error::UnknownEdge(e))
        } else if e == self.processing {
            Err(Error::NotRoutable(e))
        } else {
            Ok(())
        }
    }

    /// Routing neighbours of an edge with the node crossed to reach them, sorted by edge id.
    /// The processing edge is not part of the routing graph, so the pass cannot be
    /// used as a shortcut.
    pub fn routing_neighbors(&self, e: EdgeId) -> &[(EdgeId, NodeId)] {
        &self.routing_adj[e]
    }

    /// Single-source distances over the routing graph.
    pub fn distances_from(&self, source: EdgeId) -> Vec<Distance> {
        self.distances_avoiding(source, None)
    }

    /// Single-source distances over paths that never pass through `avoid`.
    pub fn distances_avoiding(&self, source: EdgeId, avoid: Option<NodeId>) -> Vec<Distance> {
        let mut dist = vec![Distance::INFINITE; self.edges.len()];
        if source == self.processing || source >= self.edges.len() {
            return dist;
        }
        let mut heap = BinaryHeap::new();
        dist[source] = Distance::ZERO;
        heap.push(Reverse((Distance::ZERO, source)));
        while let Some(Reverse((d, e))) = heap.pop() {
            if d > dist[e] {
                continue;
            }
            for &(f, x) in &self.routing_adj[e] {
                if Some(x) == avoid {
                    continue;
                }
                let nd = d.step(self.is_major(x));
                if nd < dist[f] {
                    dist[f] = nd;
                    heap.push(Reverse((nd, f)));
                }
            }
        }
        dist
    }

    /// Minimum number of junctions crossed on a path of adjacent edges from `from` to `to`.
    pub fn junction_distance(&self, from: EdgeId, to: EdgeId) -> Result<u32> {
        self.check_routable(from)?;
        self.check_routable(to)?;
        Ok(self.distances_from(from)[to].crossings)
    }

    /// Greedy descent over a distance field towards its source, lowest edge id first.
    fn descend(&self, from: EdgeId, dist: &[Distance]) -> Vec<EdgeId> {
        self.descend_avoiding(from, dist, None)
    }

    /// Path from `from` back to the source of `dist` (from [`ArchGraph::distances_avoiding`]).
    pub fn descend_avoiding(&self, from: EdgeId, dist: &[Distance], avoid: Option<NodeId>) -> Vec<EdgeId> {
        let mut path = vec![from];
        let mut cur = from;
        while dist[cur] != Distance::ZERO {
            let next = self.routing_adj[cur]
                .iter()
                .find(|&&(f, x)| Some(x) != avoid && dist[f].is_finite() && dist[f].step(self.is_major(x)) == dist[cur])
                .map(|&(f, _)| f)
                .expect("distance field is consistent");
            path.push(next);
            cur = next;
        }
        path
    }

    /// Edge path from `from` to `to` minimizing crossings (then hops); ties go to the
    /// lowest next-edge id.
    pub fn shortest_path_edges(&self, from: EdgeId, to: EdgeId) -> Result<Vec<EdgeId>> {
        self.check_routable(from)?;
        self.check_routable(to)?;
        let dist = self.distances_from(to);
        if !dist[from].is_finite() {
            return Err(Error::NotRoutable(from));
        }
        Ok(self.descend(from, &dist))
    }

    /// Like [`ArchGraph::shortest_path_edges`] but never passing through `avoid`;
    /// `None` if every path does.
    pub fn shortest_path_avoiding(&self, from: EdgeId, to: EdgeId, avoid: NodeId) -> Result<Option<Vec<EdgeId>>> {
        self.check_routable(from)?;
        self.check_routable(to)?;
        let dist = self.distances_avoiding(to, Some(avoid));
        Ok(dist[from]
            .is_finite()
            .then(|| self.descend_avoiding(from, &dist, Some(avoid))))
    }

    /// Next edge on the shortest path from `e` towards the entry edge.
    pub fn next_toward_entry(&self, e: EdgeId) -> Option<EdgeId> {
        if e == self.entry || e == self.processing {
            return None;
        }
        let d = self.to_entry[e];
        self.routing_adj[e]
            .iter()
            .find(|&&(f, x)| self.to_entry[f].is_finite() && self.to_entry[f].step(self.is_major(x)) == d)
            .map(|&(f, _)| f)
    }

    /// Shortest path from `e` to the entry edge (inclusive of both ends).
    pub fn path_to_entry(&self, e: EdgeId) -> Vec<EdgeId> {
        if e == self.processing {
            return vec![e];
        }
        self.descend(e, &self.to_entry)
    }

    /// Nearest unoccupied memory edge in breadth-first order from `start`.
    ///
    /// Layer 0 holds the memory edges incident to `start`; each further layer holds
    /// the unvisited memory edges sharing a node with the previous one. Within a layer
    /// the lowest edge id wins.
    pub fn free_edge_search(&self, occupied: impl Fn(EdgeId) -> bool, start: NodeId) -> Result<EdgeId> {
        self.memory_edges_by_layer(start)?
            .into_iter()
            .find(|&e| !occupied(e))
            .ok_or_else(|| Error::Saturation("no unoccupied memory edge".into()))
    }

    /// All memory edges in the visiting order of [`ArchGraph::free_edge_search`].
    pub fn memory_edges_by_layer(&self, start: NodeId) -> Result<Vec<EdgeId>> {
        if start >= self.nodes.len() {
            return Err(Error::UnknownNode(start));
        }
        let mut order = Vec::new();
        let mut seen = vec![false; self.edges.len()];
        let mut layer: Vec<EdgeId> = self.node_edges[start]
            .iter()
            .copied()
            .filter(|&e| self.is_memory(e))
            .collect();
        for &e in &layer {
            seen[e] = true;
        }
        while !layer.is_empty() {
            layer.sort_unstable();
            order.extend_from_slice(&layer);
            let mut next = Vec::new();
            for &e in &layer {
                let edge = &self.edges[e];
                for x in [edge.a, edge.b] {
                    for &f in &self.node_edges[x] {
                        if self.is_memory(f) && !seen[f] {
                            seen[f] = true;
                            next.push(f);
                        }
                    }
                }
            }
            layer = next;
        }
        Ok(order)
    }

    fn node_hops_from(&self, from: NodeId) -> Vec<usize> {
        let mut depth = vec![usize::MAX; self.nodes.len()];
        let mut queue = VecDeque::from([from]);
        depth[from] = 0;
        while let Some(x) = queue.pop_front() {
            for &e in &self.node_edges[x] {
                if !self.is_memory(e) {
                    continue;
                }
                let y = self.edges[e].other(x);
                if depth[y] == usize::MAX {
                    depth[y] = depth[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        depth
    }

    /// Junction maximizing the summed node-hop distance (through the memory zone)
    /// to all of `from`; lowest id on ties.
    pub fn farthest_major(&self, from: &[NodeId]) -> NodeId {
        let fields: Vec<Vec<usize>> = from.iter().map(|&x| self.node_hops_from(x)).collect();
        (0..self.spec.m * self.spec.n)
            .max_by_key(|&x| {
                (
                    fields.iter().map(|f| f[x].min(self.nodes.len())).sum::<usize>(),
                    Reverse(x),
                )
            })
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::GridSpec;

    fn grid(m: usize, n: usize, v: usize, h: usize) -> ArchGraph {
        ArchGraph::build(GridSpec::new(m, n, v, h)).unwrap()
    }

    #[test]
    fn identity_and_single_crossing() {
        let g = grid(3, 3, 1, 1);
        assert_eq!(g.junction_distance(4, 4).unwrap(), 0);
        // edges 0 (0-1) and 2 (1-2) meet at junction 1
        assert_eq!(g.shared_node(0, 2), Some(1));
        assert_eq!(g.junction_distance(0, 2).unwrap(), 1);
    }

    #[test]
    fn same_segment_is_free() {
        let g = grid(2, 2, 1, 5);
        let seg = g.segment(0).edges.clone();
        assert_eq!(seg.len(), 5);
        assert_eq!(g.junction_distance(seg[0], seg[4]).unwrap(), 0);
        assert_eq!(g.shortest_path_edges(seg[0], seg[4]).unwrap(), seg);
    }

    #[test]
    fn unknown_and_unroutable_edges() {
        let g = grid(2, 2, 1, 1);
        assert!(matches!(g.junction_distance(0, 99), Err(Error::UnknownEdge(99))));
        assert!(matches!(
            g.junction_distance(0, g.processing_edge()),
            Err(Error::NotRoutable(_))
        ));
    }

    #[test]
    fn trivial_paths() {
        let g = grid(3, 3, 1, 1);
        assert_eq!(g.shortest_path_edges(5, 5).unwrap(), vec![5]);
        assert_eq!(g.shortest_path_edges(0, 2).unwrap(), vec![0, 2]);
    }

    #[test]
    fn entry_is_one_crossing_from_corner_edges() {
        let g = grid(3, 3, 1, 1);
        for &e in g.incident(g.entry_node()) {
            if g.is_memory(e) {
                assert_eq!(g.crossings_to_entry(e), 1);
                assert_eq!(g.next_toward_entry(e), Some(g.entry_edge()));
            }
        }
        assert_eq!(g.crossings_to_entry(g.entry_edge()), 0);
        assert_eq!(g.crossings_to_entry(g.processing_edge()), 0);
        // the exit edge routes back through its own junction, never through the pass
        assert!(g.crossings_to_entry(g.exit_edge()) >= 2);
    }

    #[test]
    fn free_edge_search_basics() {
        let g = grid(3, 3, 1, 1);
        let start = g.entry_node();
        let e = g.free_edge_search(|_| false, start).unwrap();
        assert!(g.edge(e).unwrap().touches(start));
        assert!(matches!(
            g.free_edge_search(|e| e < g.memory_edge_count(), start),
            Err(Error::Saturation(_))
        ));
    }

    #[test]
    fn farthest_corner() {
        let g = grid(3, 3, 1, 1);
        // top-right entry: exit returns at (1,2); farthest junction is bottom-left
        assert_eq!(g.exit_node(), g.major_at(1, 2).unwrap());
        assert_eq!(
            g.farthest_major(&[g.exit_node(), g.entry_node()]),
            g.major_at(2, 0).unwrap()
        );
        assert_eq!(g.farthest_major(&[g.entry_node()]), g.major_at(2, 0).unwrap());
    }
}
