use super::{ArchGraph, Direction, EdgeId, NodeId, Orientation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rotation {
    Clockwise,
    CounterClockwise,
}

/// Closed loop of memory edges. Rotating moves the chain on `edges[i]` to `edges[i + 1]`
/// (wrapping around).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub edges: Vec<EdgeId>,
    pub rotation: Rotation,
    /// Edge of the chain this cycle was built for.
    pub mover: EdgeId,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.contains(&e)
    }

    /// Edge that follows `e` under one rotation.
    pub fn successor(&self, e: EdgeId) -> Option<EdgeId> {
        let i = self.edges.iter().position(|&x| x == e)?;
        Some(self.edges[(i + 1) % self.edges.len()])
    }

    /// `(from, to, crossed node)` for every position of the loop.
    pub fn hops<'a>(&'a self, graph: &'a ArchGraph) -> impl Iterator<Item = (EdgeId, EdgeId, NodeId)> + 'a {
        let n = self.edges.len();
        (0..n).map(move |i| {
            let (a, b) = (self.edges[i], self.edges[(i + 1) % n]);
            (a, b, graph.shared_node(a, b).expect("cycle edges are adjacent"))
        })
    }

    /// Junctions on the loop.
    pub fn junctions<'a>(&'a self, graph: &'a ArchGraph) -> impl Iterator<Item = NodeId> + 'a {
        self.hops(graph).map(|(_, _, x)| x).filter(|&x| graph.is_major(x))
    }
}

fn step(graph: &ArchGraph, node: NodeId, dir: Direction) -> Option<NodeId> {
    let (r, c) = graph.coords(node)?;
    let (dr, dc) = dir.delta();
    let r = r.checked_add_signed(dr)?;
    let c = c.checked_add_signed(dc)?;
    graph.major_at(r, c)
}

impl ArchGraph {
    /// Expands a closed walk over grid-adjacent junctions into its edge loop.
    fn loop_edges(&self, corners: &[NodeId]) -> Option<Vec<EdgeId>> {
        let mut edges = Vec::new();
        for i in 0..corners.len() {
            let (a, b) = (corners[i], corners[(i + 1) % corners.len()]);
            edges.extend(self.segment_edges_directed(a, b)?);
        }
        Some(edges)
    }

    /// Perpendicular side to enlarge a loop towards: towards the entry junction when it
    /// lies off-axis, otherwise towards the grid interior. Falls back to whichever side exists.
    fn pick_side(&self, at: NodeId, candidates: [Direction; 2]) -> Option<Direction> {
        let (r, c) = self.coords(at)?;
        let (tr, tc) = self.coords(self.entry_node)?;
        let (m, n) = (self.spec.m, self.spec.n);
        let exists = |d: Direction| step(self, at, d).is_some();
        let toward_target = candidates.iter().copied().find(|&d| match d {
            Direction::Up => tr < r,
            Direction::Down => tr > r,
            Direction::Left => tc < c,
            Direction::Right => tc > c,
        });
        let interior = if candidates[0].is_vertical() {
            if m - 1 - r > r {
                Direction::Down
            } else {
                Direction::Up
            }
        } else if n - 1 - c > c {
            Direction::Right
        } else {
            Direction::Left
        };
        [toward_target, Some(interior), Some(candidates[0]), Some(candidates[1])]
            .into_iter()
            .flatten()
            .find(|&d| exists(d))
    }

    /// Smallest loop that carries the chain on `mover` onto the adjacent edge `next`.
    ///
    /// Turning through a junction uses the one rectangle between both edges; going
    /// straight through a junction needs the two rectangles on one side of it; a move
    /// inside a segment uses a rectangle bordering that segment.
    pub fn find_cycle(&self, mover: EdgeId, next: EdgeId) -> Result<Cycle> {
        let no_cycle = || Error::NoCycle { mover, next };
        self.edge(mover)?;
        self.edge(next)?;
        if !self.is_memory(mover) || !self.is_memory(next) {
            return Err(no_cycle());
        }
        let x = self.shared_node(mover, next).ok_or_else(no_cycle)?;

        let corners: Vec<NodeId> = if self.is_major(x) {
            let d1 = self.direction_from(x, mover).ok_or_else(no_cycle)?;
            let d2 = self.direction_from(x, next).ok_or_else(no_cycle)?;
            let a = step(self, x, d1).ok_or_else(no_cycle)?;
            let b = step(self, x, d2).ok_or_else(no_cycle)?;
            if d1.is_vertical() != d2.is_vertical() {
                let far = step(self, a, d2).ok_or_else(no_cycle)?;
                vec![x, b, far, a]
            } else {
                let sides = if d1.is_vertical() {
                    [Direction::Left, Direction::Right]
                } else {
                    [Direction::Up, Direction::Down]
                };
                let s = self.pick_side(x, sides).ok_or_else(no_cycle)?;
                let xs = step(self, x, s).ok_or_else(no_cycle)?;
                let as_ = step(self, a, s).ok_or_else(no_cycle)?;
                let bs = step(self, b, s).ok_or_else(no_cycle)?;
                vec![a, x, b, bs, xs, as_]
            }
        } else {
            let seg = self.segment(self.edges[mover].segment);
            if seg.orientation == Orientation::Interface {
                return Err(no_cycle());
            }
            let sides = if seg.orientation == Orientation::Horizontal {
                [Direction::Up, Direction::Down]
            } else {
                [Direction::Left, Direction::Right]
            };
            let s = self.pick_side(seg.from, sides).ok_or_else(no_cycle)?;
            let fs = step(self, seg.from, s).ok_or_else(no_cycle)?;
            let ts = step(self, seg.to, s).ok_or_else(no_cycle)?;
            vec![seg.from, seg.to, ts, fs]
        };

        let mut edges = self.loop_edges(&corners).ok_or_else(no_cycle)?;
        let len = edges.len();
        let i = edges.iter().position(|&e| e == mover).ok_or_else(no_cycle)?;
        if edges[(i + 1) % len] != next {
            edges.reverse();
            let i = edges.iter().position(|&e| e == mover).ok_or_else(no_cycle)?;
            if edges[(i + 1) % len] != next {
                return Err(no_cycle());
            }
        }
        let rotation = self.rotation_of(&edges);
        Ok(Cycle { edges, rotation, mover })
    }

    /// Orientation from the signed area of the loop's junction polygon (rows grow downwards).
    fn rotation_of(&self, edges: &[EdgeId]) -> Rotation {
        let n = edges.len();
        let pts: Vec<(f64, f64)> = (0..n)
            .filter_map(|i| self.shared_node(edges[i], edges[(i + 1) % n]))
            .filter_map(|x| self.coords(x))
            .map(|(r, c)| (c as f64, r as f64))
            .collect();
        let mut area = 0.0;
        for i in 0..pts.len() {
            let (x0, y0) = pts[i];
            let (x1, y1) = pts[(i + 1) % pts.len()];
            area += x0 * y1 - x1 * y0;
        }
        // screen coordinates: positive area is clockwise
        if area > 0.0 {
            Rotation::Clockwise
        } else {
            Rotation::CounterClockwise
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::GridSpec;

    fn grid(m: usize, n: usize, v: usize, h: usize) -> ArchGraph {
        ArchGraph::build(GridSpec::new(m, n, v, h)).unwrap()
    }

    fn edge_between(g: &ArchGraph, a: (usize, usize), b: (usize, usize)) -> Vec<EdgeId> {
        g.segment_edges_directed(g.major_at(a.0, a.1).unwrap(), g.major_at(b.0, b.1).unwrap())
            .unwrap()
    }

    fn assert_closed(g: &ArchGraph, c: &Cycle) {
        let n = c.len();
        for i in 0..n {
            assert!(g.shared_node(c.edges[i], c.edges[(i + 1) % n]).is_some());
        }
        let mut sorted = c.edges.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), n, "cycle repeats an edge");
        assert!(c.contains(c.mover));
    }

    #[test]
    fn turning_uses_one_rectangle() {
        let g = grid(3, 3, 1, 1);
        // vertical edge (2,1)-(1,1) turning right at (1,1)
        let mover = edge_between(&g, (2, 1), (1, 1))[0];
        let next = edge_between(&g, (1, 1), (1, 2))[0];
        let c = g.find_cycle(mover, next).unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c.successor(mover), Some(next));
        assert_closed(&g, &c);

        let g = grid(3, 3, 3, 3);
        let mover = *edge_between(&g, (2, 1), (1, 1)).last().unwrap();
        let next = edge_between(&g, (1, 1), (1, 2))[0];
        let c = g.find_cycle(mover, next).unwrap();
        assert_eq!(c.len(), 12);
        assert_eq!(c.successor(mover), Some(next));
    }

    #[test]
    fn straight_uses_two_rectangles() {
        let g = grid(3, 3, 1, 1);
        let mover = edge_between(&g, (1, 0), (1, 1))[0];
        let next = edge_between(&g, (1, 1), (1, 2))[0];
        let c = g.find_cycle(mover, next).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(c.successor(mover), Some(next));
        assert_closed(&g, &c);
        // entry junction sits in row 0, so the loop grows upwards
        assert!(c.contains(edge_between(&g, (0, 0), (0, 1))[0]));
    }

    #[test]
    fn boundary_falls_back_to_interior() {
        let g = grid(2, 4, 1, 1);
        // bottom row, entry is up anyway; top row must grow downwards
        let mover = edge_between(&g, (0, 0), (0, 1))[0];
        let next = edge_between(&g, (0, 1), (0, 2))[0];
        let c = g.find_cycle(mover, next).unwrap();
        assert_eq!(c.len(), 6);
        assert!(c.contains(edge_between(&g, (1, 0), (1, 1))[0]));
    }

    #[test]
    fn inside_segment_uses_bordering_rectangle() {
        let g = grid(2, 2, 1, 5);
        let seg = edge_between(&g, (1, 0), (1, 1));
        let c = g.find_cycle(seg[1], seg[2]).unwrap();
        assert_eq!(c.len(), 12);
        assert_eq!(c.successor(seg[1]), Some(seg[2]));
        assert_closed(&g, &c);
    }

    #[test]
    fn interface_edges_have_no_cycle() {
        let g = grid(3, 3, 1, 1);
        let corner = *g.incident(g.entry_node()).iter().find(|&&e| g.is_memory(e)).unwrap();
        assert!(matches!(
            g.find_cycle(corner, g.entry_edge()),
            Err(Error::NoCycle { .. })
        ));
        assert!(g.find_cycle(0, 11).is_err());
    }

    #[test]
    fn rotation_direction_follows_mover() {
        let g = grid(3, 3, 1, 1);
        let top = edge_between(&g, (0, 0), (0, 1))[0];
        let right = edge_between(&g, (0, 1), (1, 1))[0];
        let c = g.find_cycle(top, right).unwrap();
        assert_eq!(c.rotation, Rotation::Clockwise);
        let c = g.find_cycle(right, top).unwrap();
        assert_eq!(c.rotation, Rotation::CounterClockwise);
    }
}
