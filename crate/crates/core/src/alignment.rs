//! Per-tone interference alignment: the diagonal tone channels induced by
//! a block time-varying LEK schedule, the Vandermonde-style precoders
//! built from the channel cross-ratio, alignment verification, and
//! zero-forcing decoding.

use thiserror::Error;

use crate::galois::{Fe, FieldCtx, FieldMatrix, GaloisError, RootOfUnity};
use crate::netgraph::{eval_transfer, transfer_poly, DelayNetwork, LekSchedule, NetAnalysis, TransferPoly};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlignError {
    #[error(
        "degenerate LEK draw: M_{i}{j} evaluates to zero in block {block} at tone {tone}, \
         but its inverse is required"
    )]
    DegenerateLek { i: usize, j: usize, block: usize, tone: usize },
}

/// The nine per-pair transfer polynomials for every block of a schedule;
/// computed once, evaluated per tone.
#[derive(Debug, Clone)]
pub struct BlockTransfers {
    /// `polys[l-1][i][j]` = M_ij under the block-l LEKs.
    polys: Vec<[[TransferPoly; 3]; 3]>,
    n: usize,
}

impl BlockTransfers {
    pub fn compute(
        net: &DelayNetwork,
        analysis: &NetAnalysis,
        ctx: &FieldCtx,
        sched: &LekSchedule,
    ) -> Self {
        let polys = sched
            .blocks()
            .iter()
            .map(|leks| {
                std::array::from_fn(|i| {
                    std::array::from_fn(|j| transfer_poly(net, analysis, ctx, leks, i, j))
                })
            })
            .collect();
        BlockTransfers { polys, n: sched.n() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn poly(&self, block: usize, i: usize, j: usize) -> &TransferPoly {
        &self.polys[block - 1][i][j]
    }

    /// Evaluates all nine diagonals at alpha^p. Errors if an entry whose
    /// inverse the precoder construction needs is zero.
    pub fn tone_channel(
        &self,
        ctx: &FieldCtx,
        root: &RootOfUnity,
        p: usize,
    ) -> Result<ToneChannel, AlignError> {
        let x = root.power(ctx, p as u64);
        let blocks = self.polys.len();
        let mut diag: [[Vec<Fe>; 3]; 3] = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                diag[i][j] = self.polys.iter().map(|b| eval_transfer(&b[i][j], ctx, x)).collect();
            }
        }
        // inverses required by U, R, S
        for (i, j) in [(0, 1), (2, 0), (1, 2), (2, 1)] {
            if let Some(l) = (0..blocks).find(|&l| diag[i][j][l] == 0) {
                return Err(AlignError::DegenerateLek { i: i + 1, j: j + 1, block: l + 1, tone: p });
            }
        }
        Ok(ToneChannel { p, n: self.n, diag })
    }
}

/// Convenience wrapper when only a single tone is needed.
pub fn tone_channel(
    net: &DelayNetwork,
    analysis: &NetAnalysis,
    ctx: &FieldCtx,
    sched: &LekSchedule,
    root: &RootOfUnity,
    p: usize,
) -> Result<ToneChannel, AlignError> {
    BlockTransfers::compute(net, analysis, ctx, sched).tone_channel(ctx, root, p)
}

/// The nine diagonal channel matrices for one tone: entry l of
/// `m(i, j)` is the (i, j) transfer value under the block-(l+1) LEKs.
#[derive(Debug, Clone)]
pub struct ToneChannel {
    p: usize,
    n: usize,
    diag: [[Vec<Fe>; 3]; 3],
}

impl ToneChannel {
    pub fn tone(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_blocks(&self) -> usize {
        2 * self.n + 1
    }

    /// Diagonal of M_{i+1, j+1} as a slice over blocks.
    pub fn m(&self, i: usize, j: usize) -> &[Fe] {
        &self.diag[i][j]
    }
}

/// Entrywise product of diagonals.
fn dprod(ctx: &FieldCtx, factors: &[&[Fe]]) -> Vec<Fe> {
    let len = factors[0].len();
    (0..len).map(|l| factors.iter().fold(1, |acc, f| ctx.mul(acc, f[l]))).collect()
}

fn dinv(ctx: &FieldCtx, d: &[Fe]) -> Vec<Fe> {
    d.iter().map(|&x| ctx.inv(x).expect("checked nonzero")).collect()
}

/// diag(d) * m, i.e. row l of m scaled by d[l].
fn dmul(ctx: &FieldCtx, d: &[Fe], m: &FieldMatrix) -> FieldMatrix {
    let mut out = FieldMatrix::zeros(m.rows(), m.cols());
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            out[(r, c)] = ctx.mul(d[r], m[(r, c)]);
        }
    }
    out
}

/// Precoding matrices for one tone, with their diagonal ingredients:
/// the cross-ratio diagonal U and the balancing diagonals R, S.
#[derive(Debug, Clone)]
pub struct PrecodeSet {
    u: Vec<Fe>,
    r: Vec<Fe>,
    s: Vec<Fe>,
    v1: FieldMatrix,
    v2: FieldMatrix,
    v3: FieldMatrix,
}

impl PrecodeSet {
    /// Diagonal of U = M_12^{-1} M_32 M_31^{-1} M_21 M_23^{-1} M_13.
    pub fn u(&self) -> &[Fe] {
        &self.u
    }

    pub fn r(&self) -> &[Fe] {
        &self.r
    }

    pub fn s(&self) -> &[Fe] {
        &self.s
    }

    /// (2n+1) x (n+1) precoder at S_1: columns W, UW, ..., U^n W.
    pub fn v1(&self) -> &FieldMatrix {
        &self.v1
    }

    /// (2n+1) x n precoder at S_2: columns R U^j W for j = 0..n-1.
    pub fn v2(&self) -> &FieldMatrix {
        &self.v2
    }

    /// (2n+1) x n precoder at S_3: columns S U^j W for j = 1..n.
    pub fn v3(&self) -> &FieldMatrix {
        &self.v3
    }

    pub fn precoder(&self, i: usize) -> &FieldMatrix {
        match i {
            0 => &self.v1,
            1 => &self.v2,
            2 => &self.v3,
            _ => panic!("source index out of range"),
        }
    }
}

/// Builds the Vandermonde-style precoders from the tone channel.
pub fn build_precoders(tc: &ToneChannel, ctx: &FieldCtx) -> PrecodeSet {
    let n = tc.n();
    let blocks = tc.num_blocks();
    let u = dprod(
        ctx,
        &[
            &dinv(ctx, tc.m(0, 1)),
            tc.m(2, 1),
            &dinv(ctx, tc.m(2, 0)),
            tc.m(1, 0),
            &dinv(ctx, tc.m(1, 2)),
            tc.m(0, 2),
        ],
    );
    let r = dprod(ctx, &[tc.m(0, 2), &dinv(ctx, tc.m(1, 2))]);
    let s = dprod(ctx, &[tc.m(0, 1), &dinv(ctx, tc.m(2, 1))]);
    // powers[l][j] = u_l^j
    let mut v1 = FieldMatrix::zeros(blocks, n + 1);
    let mut v2 = FieldMatrix::zeros(blocks, n);
    let mut v3 = FieldMatrix::zeros(blocks, n);
    for l in 0..blocks {
        let mut pw: Fe = 1;
        for j in 0..=n {
            v1[(l, j)] = pw;
            if j < n {
                v2[(l, j)] = ctx.mul(r[l], pw);
            }
            if j >= 1 {
                v3[(l, j - 1)] = ctx.mul(s[l], pw);
            }
            pw = ctx.mul(pw, u[l]);
        }
    }
    PrecodeSet { u, r, s, v1, v2, v3 }
}

/// Outcome of the alignment conditions at one tone: the three
/// interference-containment identities and the three full-rank decoding
/// conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentVerdict {
    /// Exact columnwise containment of interference at T_1, T_2, T_3.
    pub containment: [bool; 3],
    /// Achieved rank of each decoding matrix (target 2n+1).
    pub rank: [usize; 3],
    pub rank_target: usize,
}

impl AlignmentVerdict {
    pub fn all_pass(&self) -> bool {
        self.containment.iter().all(|&c| c) && self.rank.iter().all(|&r| r == self.rank_target)
    }
}

/// The decoding matrix at destination j: desired signal columns first,
/// then the aligned interference basis.
pub fn decode_matrix(tc: &ToneChannel, pc: &PrecodeSet, ctx: &FieldCtx, j: usize) -> FieldMatrix {
    match j {
        0 => dmul(ctx, tc.m(0, 0), pc.v1()).hstack(&dmul(ctx, tc.m(1, 0), pc.v2())),
        1 => dmul(ctx, tc.m(1, 1), pc.v2()).hstack(&dmul(ctx, tc.m(0, 1), pc.v1())),
        2 => dmul(ctx, tc.m(2, 2), pc.v3()).hstack(&dmul(ctx, tc.m(0, 2), pc.v1())),
        _ => panic!("destination index out of range"),
    }
}

/// Verifies the span containments (as exact column equalities, which is
/// how this construction satisfies them) and the rank conditions.
pub fn check_alignment(tc: &ToneChannel, pc: &PrecodeSet, ctx: &FieldCtx) -> AlignmentVerdict {
    let n = tc.n();
    let target = 2 * n + 1;
    // interference seen at T_1 from S_3 vs from S_2
    let at1_v3 = dmul(ctx, tc.m(2, 0), pc.v3());
    let at1_v2 = dmul(ctx, tc.m(1, 0), pc.v2());
    let c1 = at1_v3 == at1_v2;
    // at T_2: columns of M_32 V_3 must equal columns 1..=n of M_12 V_1
    let at2_v3 = dmul(ctx, tc.m(2, 1), pc.v3());
    let at2_v1 = dmul(ctx, tc.m(0, 1), pc.v1());
    let c2 = (0..n).all(|j| at2_v3.column(j) == at2_v1.column(j + 1));
    // at T_3: columns of M_23 V_2 must equal columns 0..n of M_13 V_1
    let at3_v2 = dmul(ctx, tc.m(1, 2), pc.v2());
    let at3_v1 = dmul(ctx, tc.m(0, 2), pc.v1());
    let c3 = (0..n).all(|j| at3_v2.column(j) == at3_v1.column(j));
    let rank = std::array::from_fn(|j| decode_matrix(tc, pc, ctx, j).rank(ctx));
    AlignmentVerdict { containment: [c1, c2, c3], rank, rank_target: target }
}

/// Zero-forcing decode of one tone at every destination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    /// Recovered symbols per destination; None when the decoding matrix
    /// is singular.
    pub recovered: [Option<Vec<Fe>>; 3],
    /// Achieved rank of each decoding matrix.
    pub rank: [usize; 3],
}

impl DecodeResult {
    pub fn success(&self, j: usize) -> bool {
        self.recovered[j].is_some()
    }
}

/// Solves the square system [signal | interference] z = y at each
/// destination and keeps the signal coordinates. Exact arithmetic, no
/// noise: a nonsingular system recovers the transmitted symbols.
pub fn decode(
    tc: &ToneChannel,
    pc: &PrecodeSet,
    ctx: &FieldCtx,
    received: &[Vec<Fe>; 3],
) -> DecodeResult {
    let n = tc.n();
    let want = [n + 1, n, n];
    let mut recovered: [Option<Vec<Fe>>; 3] = Default::default();
    let mut rank = [0usize; 3];
    for j in 0..3 {
        let a = decode_matrix(tc, pc, ctx, j);
        match a.solve(&received[j], ctx) {
            Ok(z) => {
                rank[j] = 2 * n + 1;
                recovered[j] = Some(z[..want[j]].to_vec());
            }
            Err(GaloisError::Singular { achieved, .. }) => rank[j] = achieved,
            Err(e) => unreachable!("square solve: {e}"),
        }
    }
    DecodeResult { recovered, rank }
}
