//! Small constructed networks exercising each feasibility regime. Used
//! by tests and handy as CLI demo inputs.

use crate::netgraph::DelayNetwork;

fn build(
    nodes: &[&str],
    edges: &[(&str, &str, &str, u32)],
) -> DelayNetwork {
    DelayNetwork::from_parts(
        nodes.iter().map(|s| s.to_string()).collect(),
        edges
            .iter()
            .map(|&(id, t, h, d)| (id.to_string(), t.to_string(), h.to_string(), d))
            .collect(),
        ["S1".to_string(), "S2".to_string(), "S3".to_string()],
        ["T1".to_string(), "T2".to_string(), "T3".to_string()],
    )
    .expect("fixture is structurally valid")
}

/// Every session squeezed through the single edge u -> v. The transfer
/// products cancel exactly: eta and every b_i are identically 1, so the
/// scheme is infeasible here.
pub fn shared_bottleneck() -> DelayNetwork {
    build(
        &["S1", "S2", "S3", "u", "v", "T1", "T2", "T3"],
        &[
            ("a1", "S1", "u", 2),
            ("a2", "S2", "u", 1),
            ("a3", "S3", "u", 1),
            ("m", "u", "v", 1),
            ("c1", "v", "T1", 1),
            ("c2", "v", "T2", 1),
            ("c3", "v", "T3", 2),
        ],
    )
}

/// Shared bottleneck plus a private S_i -> T_i edge per session: eta is
/// still identically 1, but every b_i becomes non-constant, which makes
/// the scheme feasible in the constant-eta regime.
pub fn bottleneck_with_private_links() -> DelayNetwork {
    build(
        &["S1", "S2", "S3", "u", "v", "T1", "T2", "T3"],
        &[
            ("a1", "S1", "u", 1),
            ("a2", "S2", "u", 1),
            ("a3", "S3", "u", 1),
            ("m", "u", "v", 1),
            ("c1", "v", "T1", 1),
            ("c2", "v", "T2", 1),
            ("c3", "v", "T3", 1),
            ("d1", "S1", "T1", 2),
            ("d2", "S2", "T2", 2),
            ("d3", "S3", "T3", 2),
        ],
    )
}

/// Sessions 1 and 2 share one two-stage gadget into T1/T3, S3 gets its
/// own, and T2 is fed by a third: the products around pair 1 match edge
/// for edge, so b_1 is identically 1 while eta stays non-constant.
/// Infeasible by the membership test.
pub fn matched_sink_pair() -> DelayNetwork {
    build(
        &["S1", "S2", "S3", "uZ", "vZ", "uW", "vW", "uV", "vV", "T1", "T2", "T3"],
        &[
            // gadget Z: {S1, S2} -> {T1, T3}
            ("z1", "S1", "uZ", 2),
            ("z2", "S2", "uZ", 1),
            ("mZ", "uZ", "vZ", 1),
            ("zo1", "vZ", "T1", 1),
            ("zo3", "vZ", "T3", 1),
            // gadget W: S3 -> {T1, T3}
            ("w3", "S3", "uW", 2),
            ("mW", "uW", "vW", 1),
            ("wo1", "vW", "T1", 1),
            ("wo3", "vW", "T3", 1),
            // gadget V: {S1, S2, S3} -> T2
            ("v1", "S1", "uV", 1),
            ("v2", "S2", "uV", 1),
            ("v3", "S3", "uV", 2),
            ("mV", "uV", "vV", 1),
            ("vo2", "vV", "T2", 1),
        ],
    )
}

/// Two bottleneck gadgets whose coverage overlaps on pair (1,1): S1
/// reaches T1 through both, and every monomial of M11*M23*M32 cancels
/// against one of the two cross products. This pins b_1 to
/// eta/(eta + 1) at every tone; infeasible, and the witness identity
/// needs a degree-2 rational form.
pub fn paired_bottleneck() -> DelayNetwork {
    build(
        &["S1", "S2", "S3", "uX", "vX", "uY", "vY", "T1", "T2", "T3"],
        &[
            // gadget X: {S1, S3} -> {T1, T2}
            ("x1", "S1", "uX", 2),
            ("x3", "S3", "uX", 1),
            ("mX", "uX", "vX", 1),
            ("xo1", "vX", "T1", 1),
            ("xo2", "vX", "T2", 1),
            // gadget Y: {S1, S2} -> {T1, T3}
            ("y1", "S1", "uY", 1),
            ("y2", "S2", "uY", 1),
            ("mY", "uY", "vY", 2),
            ("yo1", "vY", "T1", 1),
            ("yo3", "vY", "T3", 2),
            // private sessions for the remaining pairs
            ("p2", "S2", "T2", 4),
            ("p3", "S3", "T3", 3),
        ],
    )
}

/// Three disjoint sessions: diagonal connectivity only. Outside the
/// supported regime (zero min-cut off the diagonal); kept for negative
/// tests of the unsupported-path reporting.
pub fn diagonal_only() -> DelayNetwork {
    build(
        &["S1", "S2", "S3", "T1", "T2", "T3"],
        &[
            ("e1", "S1", "T1", 1),
            ("e2", "S2", "T2", 1),
            ("e3", "S3", "T3", 1),
        ],
    )
}
