//! Graph abstraction of a grid-type memory zone and its processing-zone interface.
//!
//! Edges are trap sites (one chain each). Major nodes are X-junctions laid out on an
//! `m x n` grid; minor nodes separate neighbouring sites inside one linear segment.
//! The processing zone hangs off the grid as a one-way pass of three edges:
//! `entry -> processing -> exit`. The entry edge attaches at the configured corner
//! junction, the exit edge at the junction directly below (or above) it.

mod cycle;
mod dot;
mod routing;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cycle::{Cycle, Rotation};
pub use routing::Distance;

pub type NodeId = usize;
pub type EdgeId = usize;
pub type SegmentId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Corner {
    #[default]
    TopRight,
    TopLeft,
    BottomRight,
    BottomLeft,
}

fn default_pz_capacity() -> usize {
    2
}

/// Dimensions of a grid-type memory zone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    /// Rows of junctions.
    pub m: usize,
    /// Columns of junctions.
    pub n: usize,
    /// Sites per vertical segment.
    pub v: usize,
    /// Sites per horizontal segment.
    pub h: usize,
    #[serde(default)]
    pub entry_corner: Corner,
    #[serde(default = "default_pz_capacity")]
    pub pz_capacity: usize,
}

impl GridSpec {
    pub fn new(m: usize, n: usize, v: usize, h: usize) -> Self {
        GridSpec {
            m,
            n,
            v,
            h,
            entry_corner: Corner::default(),
            pz_capacity: default_pz_capacity(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::validation("m", format!("need at least 2 rows, got {}", self.m)));
        }
        if self.n < 2 {
            return Err(Error::validation(
                "n",
                format!("need at least 2 columns, got {}", self.n),
            ));
        }
        if self.v < 1 {
            return Err(Error::validation("v", "need at least 1 site per vertical segment"));
        }
        if self.h < 1 {
            return Err(Error::validation("h", "need at least 1 site per horizontal segment"));
        }
        if !(1..=2).contains(&self.pz_capacity) {
            return Err(Error::validation(
                "pz_capacity",
                format!("supported values are 1 and 2, got {}", self.pz_capacity),
            ));
        }
        Ok(())
    }

    /// `m(n-1)h + (m-1)nv`
    pub fn memory_edge_count(&self) -> usize {
        self.m * (self.n - 1) * self.h + (self.m - 1) * self.n * self.v
    }

    /// Table-style family name of the layout.
    pub fn family(&self) -> &'static str {
        match (self.m, self.n) {
            (2, 2) => "racetrack",
            (2, _) => "vertical-grate",
            (_, 2) => "horizontal-grate",
            _ => "lattice",
        }
    }

    pub fn label(&self) -> String {
        format!("{} {} {} {}", self.m, self.n, self.v, self.h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Major {
        row: usize,
        col: usize,
    },
    Minor,
    /// Internal node of the processing pass.
    Pass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeTag {
    Memory,
    Entry,
    Processing,
    Exit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Horizontal,
    Vertical,
    Interface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    pub fn delta(self) -> (isize, isize) {
        match self {
            Direction::Up => (-1, 0),
            Direction::Down => (1, 0),
            Direction::Left => (0, -1),
            Direction::Right => (0, 1),
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
        }
    }

    pub fn is_vertical(self) -> bool {
        matches!(self, Direction::Up | Direction::Down)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub a: NodeId,
    pub b: NodeId,
    pub tag: EdgeTag,
    pub orientation: Orientation,
    pub segment: SegmentId,
}

impl Edge {
    pub fn other(&self, node: NodeId) -> NodeId {
        if node == self.a {
            self.b
        } else {
            self.a
        }
    }

    pub fn touches(&self, node: NodeId) -> bool {
        self.a == node || self.b == node
    }
}

/// Maximal run of sites between two junctions. Edges are stored in `from -> to` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub id: SegmentId,
    pub from: NodeId,
    pub to: NodeId,
    pub orientation: Orientation,
    pub edges: Vec<EdgeId>,
}

/// Immutable graph of one architecture.
#[derive(Debug, Clone)]
pub struct ArchGraph {
    spec: GridSpec,
    nodes: Vec<NodeKind>,
    edges: Vec<Edge>,
    segments: Vec<Segment>,
    node_edges: Vec<Vec<EdgeId>>,
    routing_adj: Vec<Vec<(EdgeId, NodeId)>>,
    memory_edge_count: usize,
    entry: EdgeId,
    processing: EdgeId,
    exit: EdgeId,
    entry_node: NodeId,
    exit_node: NodeId,
    to_entry: Vec<Distance>,
    pz_region: Vec<EdgeId>,
}

impl ArchGraph {
    /// Builds the graph of a validated spec with deterministic numbering: junctions
    /// row-major, then minor nodes and edges segment by segment, then the pass.
    pub fn build(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let (m, n) = (spec.m, spec.n);
        let mut nodes: Vec<NodeKind> = (0..m * n).map(|i| NodeKind::Major { row: i / n, col: i % n }).collect();
        let mut edges = Vec::with_capacity(spec.memory_edge_count() + 3);
        let mut segments = Vec::new();

        let mut add_segment = |from: NodeId,
                               to: NodeId,
                               sites: usize,
                               orientation: Orientation,
                               nodes: &mut Vec<NodeKind>,
                               edges: &mut Vec<Edge>,
                               tags: &[EdgeTag]| {
            let id = segments.len();
            let mut chain = vec![from];
            for _ in 1..sites {
                nodes.push(if orientation == Orientation::Interface {
                    NodeKind::Pass
                } else {
                    NodeKind::Minor
                });
                chain.push(nodes.len() - 1);
            }
            chain.push(to);
            let mut seg_edges = Vec::with_capacity(sites);
            for (k, w) in chain.windows(2).enumerate() {
                let eid = edges.len();
                edges.push(Edge {
                    id: eid,
                    a: w[0],
                    b: w[1],
                    tag: tags.get(k).copied().unwrap_or(EdgeTag::Memory),
                    orientation,
                    segment: id,
                });
                seg_edges.push(eid);
            }
            segments.push(Segment {
                id,
                from,
                to,
                orientation,
                edges: seg_edges,
            });
        };

        for r in 0..m {
            for c in 0..n {
                let here = r * n + c;
                if c + 1 < n {
                    add_segment(
                        here,
                        here + 1,
                        spec.h,
                        Orientation::Horizontal,
                        &mut nodes,
                        &mut edges,
                        &[],
                    );
                }
                if r + 1 < m {
                    add_segment(
                        here,
                        here + n,
                        spec.v,
                        Orientation::Vertical,
                        &mut nodes,
                        &mut edges,
                        &[],
                    );
                }
            }
        }
        let memory_edge_count = edges.len();

        let (corner_row, exit_row) = match spec.entry_corner {
            Corner::TopRight | Corner::TopLeft => (0, 1),
            Corner::BottomRight | Corner::BottomLeft => (m - 1, m - 2),
        };
        let col = match spec.entry_corner {
            Corner::TopRight | Corner::BottomRight => n - 1,
            Corner::TopLeft | Corner::BottomLeft => 0,
        };
        let entry_node = corner_row * n + col;
        let exit_node = exit_row * n + col;
        add_segment(
            entry_node,
            exit_node,
            3,
            Orientation::Interface,
            &mut nodes,
            &mut edges,
            &[EdgeTag::Entry, EdgeTag::Processing, EdgeTag::Exit],
        );
        let (entry, processing, exit) = (memory_edge_count, memory_edge_count + 1, memory_edge_count + 2);

        let mut node_edges = vec![Vec::new(); nodes.len()];
        for e in &edges {
            node_edges[e.a].push(e.id);
            node_edges[e.b].push(e.id);
        }

        let mut routing_adj = vec![Vec::new(); edges.len()];
        for e in &edges {
            if e.id == processing {
                continue;
            }
            for x in [e.a, e.b] {
                if nodes[x] == NodeKind::Pass {
                    continue;
                }
                for &f in &node_edges[x] {
                    if f != e.id && f != processing {
                        routing_adj[e.id].push((f, x));
                    }
                }
            }
            routing_adj[e.id].sort_unstable();
        }

        let mut graph = ArchGraph {
            spec,
            nodes,
            edges,
            segments,
            node_edges,
            routing_adj,
            memory_edge_count,
            entry,
            processing,
            exit,
            entry_node,
            exit_node,
            to_entry: Vec::new(),
            pz_region: if spec.pz_capacity >= 2 {
                vec![processing, entry]
            } else {
                vec![processing]
            },
        };
        graph.to_entry = graph.distances_from(entry);
        Ok(graph)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn memory_edge_count(&self) -> usize {
        self.memory_edge_count
    }

    pub fn memory_edges(&self) -> std::ops::Range<EdgeId> {
        0..self.memory_edge_count
    }

    pub fn node(&self, id: NodeId) -> NodeKind {
        self.nodes[id]
    }

    pub fn nodes(&self) -> &[NodeKind] {
        &self.nodes
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Edge> {
        self.edges.get(id).ok_or(Error::UnknownEdge(id))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment(&self, id: SegmentId) -> &Segment {
        &self.segments[id]
    }

    pub fn incident(&self, node: NodeId) -> &[EdgeId] {
        &self.node_edges[node]
    }

    pub fn is_major(&self, node: NodeId) -> bool {
        matches!(self.nodes[node], NodeKind::Major { .. })
    }

    pub fn major_at(&self, row: usize, col: usize) -> Option<NodeId> {
        (row < self.spec.m && col < self.spec.n).then(|| row * self.spec.n + col)
    }

    pub fn coords(&self, node: NodeId) -> Option<(usize, usize)> {
        match self.nodes[node] {
            NodeKind::Major { row, col } => Some((row, col)),
            _ => None,
        }
    }

    pub fn is_memory(&self, edge: EdgeId) -> bool {
        edge < self.memory_edge_count
    }

    pub fn tag(&self, edge: EdgeId) -> EdgeTag {
        self.edges[edge].tag
    }

    pub fn entry_edge(&self) -> EdgeId {
        self.entry
    }

    pub fn processing_edge(&self) -> EdgeId {
        self.processing
    }

    pub fn exit_edge(&self) -> EdgeId {
        self.exit
    }

    /// Junction the entry edge hangs off.
    pub fn entry_node(&self) -> NodeId {
        self.entry_node
    }

    /// Junction the exit edge returns to.
    pub fn exit_node(&self) -> NodeId {
        self.exit_node
    }

    /// Edges that count as "inside the processing zone" for gate execution,
    /// processing edge first.
    pub fn pz_region(&self) -> &[EdgeId] {
        &self.pz_region
    }

    pub fn in_pz_region(&self, edge: EdgeId) -> bool {
        edge == self.processing || (self.spec.pz_capacity >= 2 && edge == self.entry)
    }

    /// Node shared by two distinct edges, if any.
    pub fn shared_node(&self, a: EdgeId, b: EdgeId) -> Option<NodeId> {
        if a == b {
            return None;
        }
        let (ea, eb) = (self.edges.get(a)?, self.edges.get(b)?);
        if eb.touches(ea.a) {
            Some(ea.a)
        } else if eb.touches(ea.b) {
            Some(ea.b)
        } else {
            None
        }
    }

    /// Direction one travels when leaving `node` along `edge`'s segment.
    pub fn direction_from(&self, node: NodeId, edge: EdgeId) -> Option<Direction> {
        let e = &self.edges[edge];
        if !e.touches(node) || e.orientation == Orientation::Interface {
            return None;
        }
        // edges are stored with `a` on the segment's `from` side
        let forward = e.a == node;
        Some(match (e.orientation, forward) {
            (Orientation::Horizontal, true) => Direction::Right,
            (Orientation::Horizontal, false) => Direction::Left,
            (Orientation::Vertical, true) => Direction::Down,
            (Orientation::Vertical, false) => Direction::Up,
            (Orientation::Interface, _) => unreachable!(),
        })
    }

    /// Segment between two grid-adjacent junctions with a flag telling whether it
    /// is stored in `from -> to` order.
    pub fn segment_between(&self, from: NodeId, to: NodeId) -> Option<(&Segment, bool)> {
        let (r0, c0) = self.coords(from)?;
        let (r1, c1) = self.coords(to)?;
        let (lo, hi, forward) = if (r1, c1) > (r0, c0) {
            (from, to, true)
        } else {
            (to, from, false)
        };
        if r0.abs_diff(r1) + c0.abs_diff(c1) != 1 {
            return None;
        }
        self.node_edges[lo]
            .iter()
            .map(|&e| &self.segments[self.edges[e].segment])
            .find(|s| s.from == lo && s.to == hi)
            .map(|s| (s, forward))
    }

    /// Memory edges along the path `from -> to` between adjacent junctions.
    pub fn segment_edges_directed(&self, from: NodeId, to: NodeId) -> Option<Vec<EdgeId>> {
        let (seg, forward) = self.segment_between(from, to)?;
        let mut edges = seg.edges.clone();
        if !forward {
            edges.reverse();
        }
        Some(edges)
    }

    /// Junction-crossing distance (and hop count) from every routable edge to the entry edge.
    pub fn distance_to_entry(&self, edge: EdgeId) -> Distance {
        if edge == self.processing {
            return Distance::ZERO;
        }
        self.to_entry[edge]
    }

    /// Crossings a chain on `edge` still needs before reaching the processing zone.
    pub fn crossings_to_entry(&self, edge: EdgeId) -> u32 {
        self.distance_to_entry(edge).crossings
    }

    /// Largest junction-crossing distance between two routable edges.
    pub fn diameter(&self) -> u32 {
        (0..self.edges.len())
            .filter(|&e| e != self.processing)
            .map(|e| {
                self.distances_from(e)
                    .iter()
                    .filter(|d| d.is_finite())
                    .map(|d| d.crossings)
                    .max()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }
}
