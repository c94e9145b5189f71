use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::kgstore::{EntityId, RelationId, Triple};

use super::{EntitySubgraph, InstanceSource, TripleInstance};

/// Entity-sharing pattern of an ordered pair of relation-view nodes.
///
/// For an edge `n1 → n2` with `n1 = (h1, t1)` and `n2 = (h2, t2)`, the first
/// letter names the role of the shared entity in `n1`, the second its role
/// in `n2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeType {
    HeadHead,
    HeadTail,
    TailHead,
    TailTail,
    Parallel,
    Loop,
}

impl EdgeType {
    pub const ALL: [EdgeType; 6] = [
        EdgeType::HeadHead,
        EdgeType::HeadTail,
        EdgeType::TailHead,
        EdgeType::TailTail,
        EdgeType::Parallel,
        EdgeType::Loop,
    ];

    pub const COUNT: usize = 6;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            EdgeType::HeadHead => "H-H",
            EdgeType::HeadTail => "H-T",
            EdgeType::TailHead => "T-H",
            EdgeType::TailTail => "T-T",
            EdgeType::Parallel => "PARA",
            EdgeType::Loop => "LOOP",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.label() == label)
    }
}

impl fmt::Display for EdgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Directed typed edge; `src`'s feature flows into `dst`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypedEdge {
    pub src: usize,
    pub kind: EdgeType,
    pub dst: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RelationViewOptions {
    /// PARA hides H-H/T-T and LOOP hides T-H/H-T on the same ordered pair.
    pub suppress_basic: bool,
}

impl Default for RelationViewOptions {
    fn default() -> Self {
        Self { suppress_basic: true }
    }
}

/// Line graph of an entity subgraph: one node per triple instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationViewGraph {
    pub nodes: Vec<TripleInstance>,
    pub edges: Vec<TypedEdge>,
    pub target: usize,
}

impl RelationViewGraph {
    pub fn label(&self, node: usize) -> RelationId {
        self.nodes[node].triple.relation
    }

    pub fn target_relation(&self) -> RelationId {
        self.label(self.target)
    }

    /// Incoming `(src, kind)` lists indexed by destination node.
    pub fn incoming(&self) -> Vec<Vec<(usize, EdgeType)>> {
        let mut inc = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            inc[e.dst].push((e.src, e.kind));
        }
        inc
    }

    /// Text dump: a `#`-prefixed node table followed by
    /// `src<TAB>edge_type<TAB>dst` lines.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# nodes {} target {}", self.nodes.len(), self.target)?;
        for (i, n) in self.nodes.iter().enumerate() {
            let source = match n.source {
                InstanceSource::Target => "target".to_owned(),
                InstanceSource::Graph(idx) => format!("graph:{idx}"),
            };
            writeln!(
                w,
                "# {i}\t{}\t{}\t{}\t{source}",
                n.triple.head.0, n.triple.relation.0, n.triple.tail.0
            )?;
        }
        for e in &self.edges {
            writeln!(w, "{}\t{}\t{}", e.src, e.kind, e.dst)?;
        }
        Ok(())
    }
}

/// Typed edges for the ordered pair `a → b`, in [`EdgeType`] order.
pub fn classify_pair(a: &Triple, b: &Triple, opts: RelationViewOptions) -> Vec<EdgeType> {
    let (h1, t1, h2, t2) = (a.head, a.tail, b.head, b.tail);
    let para = h1 == h2 && t1 == t2;
    let cross = h1 == t2 && t1 == h2;
    let hide_para = opts.suppress_basic && para;
    let hide_loop = opts.suppress_basic && cross;
    let mut kinds = Vec::new();
    if h1 == h2 && !hide_para {
        kinds.push(EdgeType::HeadHead);
    }
    if h1 == t2 && !hide_loop {
        kinds.push(EdgeType::HeadTail);
    }
    if t1 == h2 && !hide_loop {
        kinds.push(EdgeType::TailHead);
    }
    if t1 == t2 && !hide_para {
        kinds.push(EdgeType::TailTail);
    }
    if para {
        kinds.push(EdgeType::Parallel);
    }
    if cross {
        kinds.push(EdgeType::Loop);
    }
    kinds
}

/// Builds the relation-view graph. Node `i` is `sub.instances[i]`; the
/// target instance keeps its position.
pub fn to_relation_view(sub: &EntitySubgraph, opts: RelationViewOptions) -> RelationViewGraph {
    let nodes = sub.instances.clone();
    let target = nodes
        .iter()
        .position(|n| n.source == InstanceSource::Target)
        .unwrap_or(0);

    let mut incident: HashMap<EntityId, Vec<usize>> = HashMap::new();
    for (i, n) in nodes.iter().enumerate() {
        incident.entry(n.triple.head).or_default().push(i);
        if n.triple.tail != n.triple.head {
            incident.entry(n.triple.tail).or_default().push(i);
        }
    }

    let mut edges = Vec::new();
    let mut partners = Vec::new();
    for (i, n) in nodes.iter().enumerate() {
        partners.clear();
        partners.extend(incident[&n.triple.head].iter().copied());
        partners.extend(incident[&n.triple.tail].iter().copied());
        partners.sort_unstable();
        partners.dedup();
        for &j in &partners {
            if j == i {
                continue;
            }
            for kind in classify_pair(&n.triple, &nodes[j].triple, opts) {
                edges.push(TypedEdge { src: i, kind, dst: j });
            }
        }
    }
    edges.sort_unstable();
    RelationViewGraph { nodes, edges, target }
}
