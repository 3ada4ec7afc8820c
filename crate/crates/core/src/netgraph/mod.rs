//! The delayed-network model: a DAG with three sources, three destinations
//! and per-edge integer delays, local encoding kernels, and the per-pair
//! transfer polynomials M_ij(D) with a path-enumeration oracle.

use thiserror::Error;

use crate::galois::{Fe, FieldCtx};

pub mod gen;
mod io;

pub use io::{network_from_json, network_to_json, NetworkFile};

/// Cap on the absolute delay span delta_min + d_max; keeps coefficient
/// vectors at desk scale.
const DELAY_SPAN_CAP: u64 = 1 << 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetError {
    #[error("network file parse error: {0}")]
    Parse(String),
    #[error("duplicate node name {0:?}")]
    DuplicateNode(String),
    #[error("duplicate edge id {0:?}")]
    DuplicateEdgeId(String),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("edge {0:?} has zero delay; delays must be >= 1")]
    ZeroDelay(String),
    #[error("expected exactly 3 sources and 3 destinations, got {sources} and {destinations}")]
    EndpointCount { sources: usize, destinations: usize },
    #[error("node {0:?} used as more than one source/destination role")]
    EndpointOverlap(String),
    #[error("graph contains a cycle")]
    Cycle,
    #[error("no path from source {0} to its own destination")]
    MissingDiagonalPath(usize),
    #[error("delay span {0} exceeds supported cap {DELAY_SPAN_CAP}")]
    DelaySpanTooLarge(u64),
    #[error("path enumeration exceeded budget of {0} paths")]
    PathBudgetExceeded(u64),
    #[error("network generation failed after {0} attempts")]
    GenerationFailed(usize),
}

/// A directed edge with a positive integer delay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub delay: u32,
}

/// Three-source three-destination unicast network on a DAG with delays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelayNetwork {
    names: Vec<String>,
    edges: Vec<Edge>,
    sources: [usize; 3],
    destinations: [usize; 3],
}

impl DelayNetwork {
    /// Builds a network from node names, `(id, tail, head, delay)` edge
    /// tuples, and the named sources/destinations. Structural checks only;
    /// acyclicity and connectivity are checked by [`validate`].
    pub fn from_parts(
        nodes: Vec<String>,
        edges: Vec<(String, String, String, u32)>,
        sources: [String; 3],
        destinations: [String; 3],
    ) -> Result<Self, NetError> {
        let mut index = std::collections::HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(NetError::DuplicateNode(n.clone()));
            }
        }
        let resolve = |name: &str| {
            index.get(name).copied().ok_or_else(|| NetError::UnknownNode(name.to_string()))
        };
        let mut seen_ids = std::collections::HashSet::new();
        let mut built = Vec::with_capacity(edges.len());
        for (id, tail, head, delay) in edges {
            if !seen_ids.insert(id.clone()) {
                return Err(NetError::DuplicateEdgeId(id));
            }
            if delay == 0 {
                return Err(NetError::ZeroDelay(id));
            }
            built.push(Edge { tail: resolve(&tail)?, head: resolve(&head)?, id, delay });
        }
        let mut special = std::collections::HashSet::new();
        let mut src = [0usize; 3];
        let mut dst = [0usize; 3];
        for (slot, name) in src.iter_mut().zip(sources.iter()) {
            *slot = resolve(name)?;
            if !special.insert(*slot) {
                return Err(NetError::EndpointOverlap(name.clone()));
            }
        }
        for (slot, name) in dst.iter_mut().zip(destinations.iter()) {
            *slot = resolve(name)?;
            if !special.insert(*slot) {
                return Err(NetError::EndpointOverlap(name.clone()));
            }
        }
        Ok(DelayNetwork { names: nodes, edges: built, sources: src, destinations: dst })
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn node_name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn sources(&self) -> [usize; 3] {
        self.sources
    }

    pub fn destinations(&self) -> [usize; 3] {
        self.destinations
    }

    /// Which source index (0..3) a node is, if any.
    pub fn source_of(&self, node: usize) -> Option<usize> {
        self.sources.iter().position(|&s| s == node)
    }

    /// Which destination index (0..3) a node is, if any.
    pub fn dest_of(&self, node: usize) -> Option<usize> {
        self.destinations.iter().position(|&d| d == node)
    }
}

/// 3x3 boolean source-to-destination reachability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConnectivityMatrix(pub [[bool; 3]; 3]);

impl ConnectivityMatrix {
    pub fn connected(&self, i: usize, j: usize) -> bool {
        self.0[i][j]
    }

    pub fn all_connected(&self) -> bool {
        self.0.iter().all(|row| row.iter().all(|&b| b))
    }

    /// Pairs (i, j) with no path; nonempty means the zero min-cut regime.
    pub fn missing_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                if !self.0[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Precomputed structure shared by the transfer-polynomial DP, the
/// simulator, and feasibility sampling: topological order, per-edge
/// upstream adjacency, reachability, and the delay extrema.
#[derive(Debug, Clone)]
pub struct NetAnalysis {
    /// Node indices in topological order.
    pub topo_nodes: Vec<usize>,
    /// Edge indices ordered by topological position of their tail.
    pub edge_order: Vec<usize>,
    /// `upstream[e]`: edges e' with head(e') == tail(e), ascending index.
    pub upstream: Vec<Vec<usize>>,
    /// `out_edges[v]`: edges with tail v, ascending index.
    pub out_edges: Vec<Vec<usize>>,
    /// `in_edges[v]`: edges with head v, ascending index.
    pub in_edges: Vec<Vec<usize>>,
    /// Whether some destination is reachable from each node; edges into
    /// dead ends never contribute to a transfer value.
    pub coreachable: Vec<bool>,
    pub conn: ConnectivityMatrix,
    /// Global minimum path delay over all connected pairs.
    pub delta_min: u64,
    /// Maximum path delay minus delta_min, shared network-wide.
    pub d_max: u64,
}

/// Topological sort, reachability, and delay extrema. Rejects cyclic
/// graphs and networks missing a diagonal S_i -> T_i path.
pub fn analyze(net: &DelayNetwork) -> Result<NetAnalysis, NetError> {
    let n = net.node_count();
    let mut out_edges = vec![Vec::new(); n];
    let mut in_edges = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for (idx, e) in net.edges().iter().enumerate() {
        out_edges[e.tail].push(idx);
        in_edges[e.head].push(idx);
        indegree[e.head] += 1;
    }
    // Kahn's algorithm
    let mut queue: std::collections::VecDeque<usize> =
        (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut topo_nodes = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        topo_nodes.push(v);
        for &e in &out_edges[v] {
            let h = net.edges()[e].head;
            indegree[h] -= 1;
            if indegree[h] == 0 {
                queue.push_back(h);
            }
        }
    }
    if topo_nodes.len() != n {
        return Err(NetError::Cycle);
    }
    let mut pos = vec![0usize; n];
    for (p, &v) in topo_nodes.iter().enumerate() {
        pos[v] = p;
    }
    let mut edge_order: Vec<usize> = (0..net.edges().len()).collect();
    edge_order.sort_by_key(|&e| pos[net.edges()[e].tail]);
    let upstream: Vec<Vec<usize>> =
        net.edges().iter().map(|e| in_edges[e.tail].clone()).collect();

    // per-source shortest/longest path delay to every node, DP over topo order
    let mut conn = [[false; 3]; 3];
    let mut delta_min = u64::MAX;
    let mut delay_max = 0u64;
    for (i, &s) in net.sources().iter().enumerate() {
        let mut shortest = vec![u64::MAX; n];
        let mut longest = vec![0u64; n];
        let mut reach = vec![false; n];
        reach[s] = true;
        shortest[s] = 0;
        for &v in &topo_nodes {
            if !reach[v] {
                continue;
            }
            for &e in &out_edges[v] {
                let edge = &net.edges()[e];
                let h = edge.head;
                let d = edge.delay as u64;
                reach[h] = true;
                shortest[h] = shortest[h].min(shortest[v] + d);
                longest[h] = longest[h].max(longest[v] + d);
            }
        }
        for (j, &t) in net.destinations().iter().enumerate() {
            // the trivial empty path does not count when s == t cannot
            // happen (endpoints are distinct nodes)
            if reach[t] && t != s {
                conn[i][j] = true;
                delta_min = delta_min.min(shortest[t]);
                delay_max = delay_max.max(longest[t]);
            }
        }
    }
    let conn = ConnectivityMatrix(conn);
    for i in 0..3 {
        if !conn.connected(i, i) {
            return Err(NetError::MissingDiagonalPath(i + 1));
        }
    }
    let d_max = delay_max - delta_min;
    if delta_min + d_max + 1 > DELAY_SPAN_CAP {
        return Err(NetError::DelaySpanTooLarge(delta_min + d_max + 1));
    }
    // reverse reachability from the destinations
    let mut coreachable = vec![false; n];
    let mut stack: Vec<usize> = net.destinations().to_vec();
    for &d in &stack {
        coreachable[d] = true;
    }
    while let Some(v) = stack.pop() {
        for &e in &in_edges[v] {
            let t = net.edges()[e].tail;
            if !coreachable[t] {
                coreachable[t] = true;
                stack.push(t);
            }
        }
    }
    Ok(NetAnalysis {
        topo_nodes,
        edge_order,
        upstream,
        out_edges,
        in_edges,
        coreachable,
        conn,
        delta_min,
        d_max,
    })
}

/// Connectivity check per the unit min-cut assumption: entry (i, j) true
/// iff a directed path S_i -> T_j exists.
pub fn validate(net: &DelayNetwork) -> Result<ConnectivityMatrix, NetError> {
    analyze(net).map(|a| a.conn)
}

/// (delta_min, d_max): global minimum path delay and the span above it.
pub fn delay_extrema(net: &DelayNetwork) -> Result<(u64, u64), NetError> {
    analyze(net).map(|a| (a.delta_min, a.d_max))
}

/// One position in a LEK assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LekSlot {
    /// alpha_{i,e}: source i onto its outgoing edge e.
    Source { source: usize, edge: usize },
    /// beta_{e',e}: upstream edge e' onto adjacent edge e.
    Relay { from_edge: usize, to_edge: usize },
    /// eps_{e',j}: edge e' into destination j.
    Sink { edge: usize, dest: usize },
}

/// Local encoding kernels for one time block. Slots exist exactly where
/// the topology admits them; alpha_{i,e} for S_i != tail(e) is
/// structurally zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LekAssignment {
    /// Per edge: alpha_{i,e} when tail(e) is source i, else unused.
    alpha: Vec<Fe>,
    /// `beta[e][idx]` pairs with `analysis.upstream[e][idx]`.
    beta: Vec<Vec<Fe>>,
    /// Per edge: eps_{e,j} when head(e) is destination j, else unused.
    eps: Vec<Fe>,
}

impl LekAssignment {
    /// Builds an assignment by asking `f` for every admissible slot.
    pub fn from_fn(
        net: &DelayNetwork,
        analysis: &NetAnalysis,
        mut f: impl FnMut(LekSlot) -> Fe,
    ) -> Self {
        let ne = net.edges().len();
        let mut alpha = vec![0; ne];
        let mut beta = vec![Vec::new(); ne];
        let mut eps = vec![0; ne];
        for (e, edge) in net.edges().iter().enumerate() {
            if let Some(i) = net.source_of(edge.tail) {
                alpha[e] = f(LekSlot::Source { source: i, edge: e });
            }
            beta[e] = analysis.upstream[e]
                .iter()
                .map(|&fe| f(LekSlot::Relay { from_edge: fe, to_edge: e }))
                .collect();
            if let Some(j) = net.dest_of(edge.head) {
                eps[e] = f(LekSlot::Sink { edge: e, dest: j });
            }
        }
        LekAssignment { alpha, beta, eps }
    }

    /// Uniform draw over the whole field, zero included.
    pub fn random(
        net: &DelayNetwork,
        analysis: &NetAnalysis,
        ctx: &FieldCtx,
        rng: &mut impl rand::Rng,
    ) -> Self {
        Self::from_fn(net, analysis, |_| rng.random_range(0..ctx.size()))
    }

    /// Every admissible slot set to the same value.
    pub fn constant(net: &DelayNetwork, analysis: &NetAnalysis, value: Fe) -> Self {
        Self::from_fn(net, analysis, |_| value)
    }

    pub fn alpha(&self, edge: usize) -> Fe {
        self.alpha[edge]
    }

    pub fn beta(&self, edge: usize, upstream_idx: usize) -> Fe {
        self.beta[edge][upstream_idx]
    }

    pub fn eps(&self, edge: usize) -> Fe {
        self.eps[edge]
    }
}

/// Per-block LEK assignments for block time-varying coding: exactly
/// 2n + 1 blocks, constant within a block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LekSchedule {
    blocks: Vec<LekAssignment>,
    n: usize,
    k: usize,
}

impl LekSchedule {
    pub fn new(blocks: Vec<LekAssignment>, n: usize, k: usize) -> Self {
        assert_eq!(blocks.len(), 2 * n + 1, "schedule needs 2n+1 blocks");
        LekSchedule { blocks, n, k }
    }

    pub fn random(
        net: &DelayNetwork,
        analysis: &NetAnalysis,
        ctx: &FieldCtx,
        n: usize,
        k: usize,
        rng: &mut impl rand::Rng,
    ) -> Self {
        let blocks =
            (0..2 * n + 1).map(|_| LekAssignment::random(net, analysis, ctx, rng)).collect();
        Self::new(blocks, n, k)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// 1-based block access matching the l = 1..2n+1 numbering.
    pub fn block(&self, l: usize) -> &LekAssignment {
        &self.blocks[l - 1]
    }

    pub fn blocks(&self) -> &[LekAssignment] {
        &self.blocks
    }
}

/// Transfer polynomial M_ij(D) for one (i, j) pair under one LEK
/// assignment: coefficient `coeffs[d]` multiplies inputs delayed by
/// `delta_min + d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferPoly {
    pub i: usize,
    pub j: usize,
    pub coeffs: Vec<Fe>,
    pub delta_min: u64,
}

impl TransferPoly {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn d_max(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Horner evaluation of a transfer polynomial at a field point; at
/// x = alpha^p this yields the tone-p channel gain.
pub fn eval_transfer(tp: &TransferPoly, ctx: &FieldCtx, x: Fe) -> Fe {
    let mut acc = 0;
    for &c in tp.coeffs.iter().rev() {
        acc = ctx.add(ctx.mul(acc, x), c);
    }
    acc
}

/// M_ij(D) by delay-indexed dynamic programming over the topological
/// order; never enumerates paths.
pub fn transfer_poly(
    net: &DelayNetwork,
    analysis: &NetAnalysis,
    ctx: &FieldCtx,
    leks: &LekAssignment,
    i: usize,
    j: usize,
) -> TransferPoly {
    let span = (analysis.delta_min + analysis.d_max + 1) as usize;
    let ne = net.edges().len();
    // per-edge accumulated gain polynomial, indexed by absolute delay,
    // observed at the edge head
    let mut acc: Vec<Vec<Fe>> = vec![Vec::new(); ne];
    let source_node = net.sources()[i];
    for &e in &analysis.edge_order {
        let edge = &net.edges()[e];
        if !analysis.coreachable[edge.head] {
            continue;
        }
        let mut local = vec![0 as Fe; span];
        if edge.tail == source_node {
            local[0] = leks.alpha(e);
        }
        for (idx, &up) in analysis.upstream[e].iter().enumerate() {
            let b = leks.beta(e, idx);
            if b == 0 {
                continue;
            }
            for (d, &c) in acc[up].iter().enumerate() {
                if c != 0 {
                    local[d] = ctx.add(local[d], ctx.mul(b, c));
                }
            }
        }
        // shift by this edge's delay
        let d = edge.delay as usize;
        let mut shifted = vec![0 as Fe; span];
        for (t, &c) in local.iter().enumerate() {
            if c != 0 {
                debug_assert!(t + d < span, "path delay exceeds analyzed span");
                shifted[t + d] = c;
            }
        }
        acc[e] = shifted;
    }
    let dest_node = net.destinations()[j];
    let mut total = vec![0 as Fe; span];
    for &e in &analysis.in_edges[dest_node] {
        let s = leks.eps(e);
        if s == 0 {
            continue;
        }
        for (d, &c) in acc[e].iter().enumerate() {
            if c != 0 {
                total[d] = ctx.add(total[d], ctx.mul(s, c));
            }
        }
    }
    let dmin = analysis.delta_min as usize;
    for (d, &c) in total.iter().enumerate() {
        assert!(c == 0 || d >= dmin, "support below global minimum delay");
    }
    TransferPoly {
        i,
        j,
        coeffs: total[dmin..].to_vec(),
        delta_min: analysis.delta_min,
    }
}

/// One enumerated path with its gain (product of LEKs along it,
/// including the sink coefficient) and total delay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathRecord {
    pub edges: Vec<usize>,
    pub gain: Fe,
    pub delay: u64,
}

/// Exhaustive depth-first enumeration of all S_i -> T_j paths, guarded
/// by a path-count budget.
pub fn enumerate_paths(
    net: &DelayNetwork,
    analysis: &NetAnalysis,
    ctx: &FieldCtx,
    leks: &LekAssignment,
    i: usize,
    j: usize,
    budget: u64,
) -> Result<Vec<PathRecord>, NetError> {
    struct Walk<'a> {
        net: &'a DelayNetwork,
        analysis: &'a NetAnalysis,
        ctx: &'a FieldCtx,
        leks: &'a LekAssignment,
        dest: usize,
        budget: u64,
        trail: Vec<usize>,
        paths: Vec<PathRecord>,
    }
    impl Walk<'_> {
        fn step(&mut self, edge: usize, gain: Fe, delay: u64) -> Result<(), NetError> {
            // zero-gain paths are still recorded: the path exists, its gain is 0
            let head = self.net.edges()[edge].head;
            self.trail.push(edge);
            if head == self.dest {
                if self.paths.len() as u64 >= self.budget {
                    self.trail.pop();
                    return Err(NetError::PathBudgetExceeded(self.budget));
                }
                let total = self.ctx.mul(gain, self.leks.eps(edge));
                self.paths.push(PathRecord { edges: self.trail.clone(), gain: total, delay });
            }
            for &nxt in &self.analysis.out_edges[head] {
                if !self.analysis.coreachable[self.net.edges()[nxt].head] {
                    continue;
                }
                let idx = self.analysis.upstream[nxt].iter().position(|&u| u == edge).unwrap();
                let g = self.ctx.mul(gain, self.leks.beta(nxt, idx));
                let d = delay + self.net.edges()[nxt].delay as u64;
                self.step(nxt, g, d)?;
            }
            self.trail.pop();
            Ok(())
        }
    }
    let mut walk = Walk {
        net,
        analysis,
        ctx,
        leks,
        dest: net.destinations()[j],
        budget,
        trail: Vec::new(),
        paths: Vec::new(),
    };
    for &e in &analysis.out_edges[net.sources()[i]] {
        if !analysis.coreachable[net.edges()[e].head] {
            continue;
        }
        let gain = leks.alpha(e);
        let delay = net.edges()[e].delay as u64;
        walk.step(e, gain, delay)?;
    }
    Ok(walk.paths)
}

/// Path-sum form of the transfer polynomial; test oracle for
/// [`transfer_poly`].
pub fn transfer_oracle(
    net: &DelayNetwork,
    analysis: &NetAnalysis,
    ctx: &FieldCtx,
    leks: &LekAssignment,
    i: usize,
    j: usize,
    budget: u64,
) -> Result<TransferPoly, NetError> {
    let paths = enumerate_paths(net, analysis, ctx, leks, i, j, budget)?;
    let mut coeffs = vec![0 as Fe; (analysis.d_max + 1) as usize];
    for p in &paths {
        assert!(
            p.delay >= analysis.delta_min && p.delay <= analysis.delta_min + analysis.d_max,
            "path delay outside analyzed range"
        );
        let d = (p.delay - analysis.delta_min) as usize;
        coeffs[d] = ctx.add(coeffs[d], p.gain);
    }
    Ok(TransferPoly { i, j, coeffs, delta_min: analysis.delta_min })
}
