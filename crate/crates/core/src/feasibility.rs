//! Randomized feasibility testing: the transfer-product ratios eta and
//! b_i, their constancy, membership of b_i in the four-element reduced
//! set {1, eta, eta+1, eta/(eta+1)}, and a brute-force oracle for the
//! low-degree rational-function sets the reduced test compresses.
//!
//! Identity tests never divide: every check is a cross-multiplied
//! polynomial equality of transfer-value products, sampled at uniform
//! LEK draws. A violation is a deterministic certificate; agreement is
//! probabilistic with a reported Schwartz-Zippel-style bound.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::galois::{Fe, FieldCtx, RootOfUnity};
use crate::netgraph::{
    analyze, transfer_poly, DelayNetwork, LekAssignment, NetAnalysis, NetError, eval_transfer,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Minimum trials for any sampled verdict.
pub const MIN_TRIALS: usize = 8;
/// Resample cap for degenerate draws, per trial.
pub const RESAMPLE_CAP: usize = 32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeasError {
    #[error("zero min-cut regime: no path for source-destination pairs {missing:?}")]
    ZeroMinCut { missing: Vec<(usize, usize)> },
    #[error("{trials} trials requested, minimum is {MIN_TRIALS}")]
    TooFewTrials { trials: usize },
    #[error("resample cap {RESAMPLE_CAP} exceeded at tone {tone}; draws stayed degenerate")]
    ResampleCapExceeded { tone: usize },
    #[error("subfield degree {degree} does not divide field degree {m}")]
    BadSubfield { degree: u32, m: u32 },
    #[error("enumeration needs {needed} tuples, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("only {got} usable samples, need at least {need}")]
    InsufficientSamples { got: usize, need: usize },
    #[error(transparent)]
    Net(#[from] NetError),
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn subseed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x51AF_3C1D_2B4E_9F01, |acc, &p| splitmix64(acc ^ p))
}

const TAG_ETA: u64 = 0x01;
const TAG_B: u64 = 0x10;
const TAG_MEMBER: u64 = 0x20;
const TAG_SN: u64 = 0x30;

/// The nine transfer values M_ij(eps, alpha^p) for one LEK draw.
type Values = [[Fe; 3]; 3];

fn draw_values(
    net: &DelayNetwork,
    analysis: &NetAnalysis,
    ctx: &FieldCtx,
    root: &RootOfUnity,
    p: usize,
    seed: u64,
) -> Values {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leks = LekAssignment::random(net, analysis, ctx, &mut rng);
    let x = root.power(ctx, p as u64);
    std::array::from_fn(|i| {
        std::array::from_fn(|j| eval_transfer(&transfer_poly(net, analysis, ctx, &leks, i, j), ctx, x))
    })
}

/// Positions whose values appear in some ratio denominator.
const DENOMINATOR_POSITIONS: [(usize, usize); 6] =
    [(0, 0), (0, 1), (0, 2), (1, 2), (2, 0), (2, 1)];

fn is_degenerate(v: &Values) -> bool {
    DENOMINATOR_POSITIONS.iter().any(|&(i, j)| v[i][j] == 0)
}

/// Resamples until non-degenerate; returns (draw id, values, discards).
fn nondegenerate_draw(
    net: &DelayNetwork,
    analysis: &NetAnalysis,
    ctx: &FieldCtx,
    root: &RootOfUnity,
    p: usize,
    base: u64,
) -> Result<(u64, Values, usize), FeasError> {
    for attempt in 0..RESAMPLE_CAP as u64 {
        let id = subseed(&[base, attempt]);
        let v = draw_values(net, analysis, ctx, root, p, id);
        if !is_degenerate(&v) {
            return Ok((id, v, attempt as usize));
        }
    }
    Err(FeasError::ResampleCapExceeded { tone: p })
}

fn require_full_connectivity(analysis: &NetAnalysis) -> Result<(), FeasError> {
    if !analysis.conn.all_connected() {
        return Err(FeasError::ZeroMinCut { missing: analysis.conn.missing_pairs() });
    }
    Ok(())
}

/// Numerator and denominator products of eta:
/// (M21 M32 M13, M31 M23 M12).
fn eta_parts(ctx: &FieldCtx, v: &Values) -> (Fe, Fe) {
    let n = ctx.mul(ctx.mul(v[1][0], v[2][1]), v[0][2]);
    let d = ctx.mul(ctx.mul(v[2][0], v[1][2]), v[0][1]);
    (n, d)
}

/// Numerator and denominator products of b_i (0-based i).
fn b_parts(ctx: &FieldCtx, v: &Values, i: usize) -> (Fe, Fe) {
    match i {
        0 => (ctx.mul(v[1][0], v[0][2]), ctx.mul(v[0][0], v[1][2])),
        1 => (ctx.mul(v[1][1], v[0][2]), ctx.mul(v[0][1], v[1][2])),
        2 => (ctx.mul(v[2][2], v[0][1]), ctx.mul(v[0][2], v[2][1])),
        _ => panic!("ratio index out of range"),
    }
}

/// One non-degenerate LEK draw with the four ratio values at a tone.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RatioSample {
    pub draw_id: u64,
    pub tone: usize,
    pub eta: Fe,
    pub b: [Fe; 3],
    pub degenerate: bool,
}

/// Draws one uniform LEK assignment (resampling degenerate draws up to
/// the cap) and forms the four ratios at tone p.
pub fn sample_ratios(
    net: &DelayNetwork,
    analysis: &NetAnalysis,
    ctx: &FieldCtx,
    root: &RootOfUnity,
    p: usize,
    seed: u64,
) -> Result<RatioSample, FeasError> {
    require_full_connectivity(analysis)?;
    let (draw_id, v, _) = nondegenerate_draw(net, analysis, ctx, root, p, seed)?;
    let (en, ed) = eta_parts(ctx, &v);
    let eta = ctx.div(en, ed).expect("non-degenerate draw");
    let b = std::array::from_fn(|i| {
        let (n, d) = b_parts(ctx, &v, i);
        ctx.div(n, d).expect("non-degenerate draw")
    });
    Ok(RatioSample { draw_id, tone: p, eta, b, degenerate: false })
}

/// Which sampled ratio a constancy query concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioKind {
    Eta,
    /// 0-based session index.
    B(usize),
}

/// Conservative total degree of a cross-multiplied identity polynomial:
/// each transfer value has LEK-degree at most |E| + 1 and each side is a
/// product of at most three of them.
fn identity_degree(net: &DelayNetwork) -> f64 {
    3.0 * (net.edges().len() as f64 + 1.0)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConstancyVerdict {
    pub constant: bool,
    pub trials: usize,
    pub discarded: usize,
    /// Two draw ids with differing values; the disagreement is a proof
    /// of non-constancy.
    pub witness: Option<(u64, u64)>,
    /// When constant: upper bound on the probability that a
    /// non-constant ratio agreed on every draw.
    pub false_constant_bound: Option<f64>,
}

/// Declares a ratio constant iff all non-degenerate draws agree.
#[allow(clippy::too_many_arguments)]
pub fn is_constant(
    net: &DelayNetwork,
    analysis: &NetAnalysis,
    ctx: &FieldCtx,
    root: &RootOfUnity,
    which: RatioKind,
    p: usize,
    trials: usize,
    seed: u64,
) -> Result<ConstancyVerdict, FeasError> {
    require_full_connectivity(analysis)?;
    if trials < MIN_TRIALS {
        return Err(FeasError::TooFewTrials { trials });
    }
    let tag = match which {
        RatioKind::Eta => TAG_ETA,
        RatioKind::B(i) => TAG_B + i as u64,
    };
    let mut discarded = 0;
    let mut first: Option<(u64, Fe)> = None;
    for t in 0..trials {
        let (id, v, waste) =
            nondegenerate_draw(net, analysis, ctx, root, p, subseed(&[seed, tag, p as u64, t as u64]))?;
        discarded += waste;
        let (n, d) = match which {
            RatioKind::Eta => eta_parts(ctx, &v),
            RatioKind::B(i) => b_parts(ctx, &v, i),
        };
        let value = ctx.div(n, d).expect("non-degenerate draw");
        match first {
            None => first = Some((id, value)),
            Some((first_id, first_value)) => {
                if value != first_value {
                    return Ok(ConstancyVerdict {
                        constant: false,
                        trials: t + 1,
                        discarded,
                        witness: Some((first_id, id)),
                        false_constant_bound: None,
                    });
                }
            }
        }
    }
    let per_draw = identity_degree(net) / ctx.size() as f64;
    Ok(ConstancyVerdict {
        constant: true,
        trials,
        discarded,
        witness: None,
        false_constant_bound: Some(per_draw.powi(trials as i32 - 1)),
    })
}

/// Result of testing one candidate identity b_i = s for an element s of
/// the reduced set, in cross-multiplied polynomial form.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct IdentityVerdict {
    pub holds: bool,
    /// Draw id of the violating draw; a deterministic certificate of
    /// non-membership.
    pub violating_draw: Option<u64>,
    pub draws_checked: usize,
}

/// The four candidate identities of the reduced set.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MembershipVerdicts {
    pub one: IdentityVerdict,
    pub eta: IdentityVerdict,
    pub eta_plus_one: IdentityVerdict,
    pub eta_over_eta_plus_one: IdentityVerdict,
    /// When every draw satisfied some identity: bound on the
    /// probability that a non-member surviving identity is a fluke.
    pub false_member_bound: f64,
}

impl MembershipVerdicts {
    pub fn any_member(&self) -> bool {
        self.one.holds || self.eta.holds || self.eta_plus_one.holds || self.eta_over_eta_plus_one.holds
    }

    pub fn held_identities(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.one.holds {
            out.push("b=1");
        }
        if self.eta.holds {
            out.push("b=eta");
        }
        if self.eta_plus_one.holds {
            out.push("b=eta+1");
        }
        if self.eta_over_eta_plus_one.holds {
            out.push("b=eta/(eta+1)");
        }
        out
    }
}

/// Tests b_i against each element of {1, eta, eta+1, eta/(eta+1)} at T
/// uniform draws. Every identity is checked as a polynomial equality of
/// transfer-value products; no division.
#[allow(clippy::too_many_arguments)]
pub fn membership_check(
    net: &DelayNetwork,
    analysis: &NetAnalysis,
    ctx: &FieldCtx,
    root: &RootOfUnity,
    i: usize,
    p: usize,
    trials: usize,
    seed: u64,
) -> Result<MembershipVerdicts, FeasError> {
    require_full_connectivity(analysis)?;
    if trials < MIN_TRIALS {
        return Err(FeasError::TooFewTrials { trials });
    }
    // verdict slots: [1, eta, eta+1, eta/(eta+1)]
    let mut holds = [true; 4];
    let mut violating: [Option<u64>; 4] = [None; 4];
    let mut checked = [0usize; 4];
    for t in 0..trials {
        if holds.iter().all(|&h| !h) {
            break;
        }
        let (id, v, _) = nondegenerate_draw(
            net,
            analysis,
            ctx,
            root,
            p,
            subseed(&[seed, TAG_MEMBER + i as u64, p as u64, t as u64]),
        )?;
        let (en, ed) = eta_parts(ctx, &v);
        let (bn, bd) = b_parts(ctx, &v, i);
        let tests = [
            bn == bd,                                                   // b = 1
            ctx.mul(bn, ed) == ctx.mul(bd, en),                         // b = eta
            ctx.mul(bn, ed) == ctx.mul(bd, ctx.add(en, ed)),            // b = eta + 1
            ctx.mul(bn, ctx.add(en, ed)) == ctx.mul(bd, en),            // b = eta/(eta+1)
        ];
        for (slot, ok) in tests.iter().enumerate() {
            if holds[slot] {
                checked[slot] = t + 1;
                if !ok {
                    holds[slot] = false;
                    violating[slot] = Some(id);
                }
            }
        }
    }
    let mk = |slot: usize| IdentityVerdict {
        holds: holds[slot],
        violating_draw: violating[slot],
        draws_checked: checked[slot],
    };
    let per_draw = identity_degree(net) / ctx.size() as f64;
    Ok(MembershipVerdicts {
        one: mk(0),
        eta: mk(1),
        eta_plus_one: mk(2),
        eta_over_eta_plus_one: mk(3),
        false_member_bound: per_draw.powi(trials as i32),
    })
}

/// Verdict at a single tone, with the evidence the case split used.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ToneVerdict {
    pub tone: usize,
    pub eta_constant: bool,
    pub eta_constancy: ConstancyVerdict,
    /// Present on the non-constant-eta branch: per-session membership
    /// verdicts against the reduced set.
    pub memberships: Option<[MembershipVerdicts; 3]>,
    /// Present on the constant-eta branch: per-session constancy of b_i.
    pub b_constancy: Option<[ConstancyVerdict; 3]>,
    pub feasible: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FeasibilityReport {
    pub field_degree: u32,
    pub block_length: usize,
    pub trials: usize,
    pub probe_tones: Vec<usize>,
    pub tones: Vec<ToneVerdict>,
    /// The tone-0 verdict; the scheme's feasibility.
    pub feasible: bool,
    /// Whether every probed tone agreed with tone 0; disagreement is
    /// surfaced, never suppressed.
    pub cross_tone_agreement: bool,
    pub anomalies: Vec<String>,
}

impl FeasibilityReport {
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let t0 = &self.tones[0];
        out.push_str(&format!(
            "feasible: {} (eta {} at tone 0)\n",
            self.feasible,
            if t0.eta_constant { "constant" } else { "non-constant" }
        ));
        if let Some(ms) = &t0.memberships {
            for (i, m) in ms.iter().enumerate() {
                let held = m.held_identities();
                if held.is_empty() {
                    out.push_str(&format!(
                        "  b_{}: outside the reduced set (4 identities violated)\n",
                        i + 1
                    ));
                } else {
                    out.push_str(&format!("  b_{}: {}\n", i + 1, held.join(", ")));
                }
            }
        }
        if let Some(cs) = &t0.b_constancy {
            for (i, c) in cs.iter().enumerate() {
                out.push_str(&format!(
                    "  b_{}: {}\n",
                    i + 1,
                    if c.constant { "constant" } else { "non-constant" }
                ));
            }
        }
        for a in &self.anomalies {
            out.push_str(&format!("  anomaly: {a}\n"));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct FeasParams {
    pub trials: usize,
    pub seed: u64,
    /// Tones to probe in addition to 0; defaults to every tone.
    pub probe_tones: Option<Vec<usize>>,
}

impl Default for FeasParams {
    fn default() -> Self {
        FeasParams { trials: 20, seed: 0, probe_tones: None }
    }
}

fn tone_verdict(
    net: &DelayNetwork,
    analysis: &NetAnalysis,
    ctx: &FieldCtx,
    root: &RootOfUnity,
    p: usize,
    params: &FeasParams,
) -> Result<ToneVerdict, FeasError> {
    let eta_constancy =
        is_constant(net, analysis, ctx, root, RatioKind::Eta, p, params.trials, params.seed)?;
    if !eta_constancy.constant {
        let memberships: [MembershipVerdicts; 3] = [
            membership_check(net, analysis, ctx, root, 0, p, params.trials, params.seed)?,
            membership_check(net, analysis, ctx, root, 1, p, params.trials, params.seed)?,
            membership_check(net, analysis, ctx, root, 2, p, params.trials, params.seed)?,
        ];
        let feasible = memberships.iter().all(|m| !m.any_member());
        Ok(ToneVerdict {
            tone: p,
            eta_constant: false,
            eta_constancy,
            memberships: Some(memberships),
            b_constancy: None,
            feasible,
        })
    } else {
        let b_constancy: [ConstancyVerdict; 3] = [
            is_constant(net, analysis, ctx, root, RatioKind::B(0), p, params.trials, params.seed)?,
            is_constant(net, analysis, ctx, root, RatioKind::B(1), p, params.trials, params.seed)?,
            is_constant(net, analysis, ctx, root, RatioKind::B(2), p, params.trials, params.seed)?,
        ];
        let feasible = b_constancy.iter().all(|c| !c.constant);
        Ok(ToneVerdict {
            tone: p,
            eta_constant: true,
            eta_constancy,
            memberships: None,
            b_constancy: Some(b_constancy),
            feasible,
        })
    }
}

/// Runs the case split at tone 0 and every probed tone, asserting that
/// the verdicts agree across tones; disagreements are reported as
/// anomalies.
pub fn feasibility_verdict(
    net: &DelayNetwork,
    ctx: &FieldCtx,
    root: &RootOfUnity,
    params: &FeasParams,
) -> Result<FeasibilityReport, FeasError> {
    let analysis = analyze(net)?;
    require_full_connectivity(&analysis)?;
    let mut tones: Vec<usize> = vec![0];
    match &params.probe_tones {
        Some(set) => tones.extend(set.iter().copied().filter(|&p| p != 0)),
        None => tones.extend(1..root.k()),
    }
    let mut verdicts = Vec::with_capacity(tones.len());
    for &p in &tones {
        verdicts.push(tone_verdict(net, &analysis, ctx, root, p, params)?);
    }
    let mut anomalies = Vec::new();
    let base = &verdicts[0];
    for v in &verdicts[1..] {
        if v.feasible != base.feasible {
            anomalies.push(format!(
                "tone {} verdict ({}) disagrees with tone 0 ({})",
                v.tone, v.feasible, base.feasible
            ));
        }
        if v.eta_constant != base.eta_constant {
            anomalies.push(format!(
                "tone {} eta constancy ({}) disagrees with tone 0 ({})",
                v.tone, v.eta_constant, base.eta_constant
            ));
        }
    }
    Ok(FeasibilityReport {
        field_degree: ctx.degree(),
        block_length: root.k(),
        trials: params.trials,
        probe_tones: tones,
        feasible: base.feasible,
        cross_tone_agreement: anomalies.is_empty(),
        anomalies,
        tones: verdicts,
    })
}

/// Parameters for the low-degree rational-membership oracle.
#[derive(Debug, Clone)]
pub struct SnParams {
    /// Degree bound n of the candidate set; 1 or 2.
    pub n_small: usize,
    /// Coefficients are enumerated over the subfield GF(2^s) for n = 2.
    pub subfield_degree: u32,
    pub samples: usize,
    /// Maximum coefficient tuples to enumerate.
    pub budget: u64,
    pub seed: u64,
}

impl Default for SnParams {
    fn default() -> Self {
        SnParams { n_small: 2, subfield_degree: 4, samples: 16, budget: 2_000_000, seed: 0 }
    }
}

/// Witness coefficients (big-field values, constant term first) for a
/// membership verdict.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SnWitness {
    pub f: Vec<Fe>,
    pub g: Vec<Fe>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SnVerdict {
    pub member: bool,
    pub n_small: usize,
    pub witness: Option<SnWitness>,
    pub samples_used: usize,
}

/// Embedding of GF(2^s) into GF(2^m) (s | m): maps the subfield
/// generator to a root of its reduction polynomial found in the big
/// field.
fn subfield_embedding(ctx: &FieldCtx, s: u32) -> Result<Vec<Fe>, FeasError> {
    let m = ctx.degree();
    if s == 0 || !m.is_multiple_of(s) {
        return Err(FeasError::BadSubfield { degree: s, m });
    }
    let small = FieldCtx::new(s).expect("subfield degree within range");
    let poly = small.reduction_poly();
    let eval = |c: Fe| {
        let mut acc = 0;
        for bit in 0..=s {
            if (poly >> bit) & 1 == 1 {
                acc = ctx.add(acc, ctx.pow(c, bit as u64));
            }
        }
        acc
    };
    let root = (0..ctx.size())
        .find(|&c| eval(c) == 0)
        .expect("splitting subfield polynomial has a root");
    let table = (0..small.size())
        .map(|e| {
            let mut acc = 0;
            for bit in 0..s {
                if (e >> bit) & 1 == 1 {
                    acc = ctx.add(acc, ctx.pow(root, bit as u64));
                }
            }
            acc
        })
        .collect();
    Ok(table)
}

/// Brute-force membership of b_i in the set of rational functions
/// f(eta)/g(eta) with deg f <= n, deg g <= n-1 and nonzero f, g.
///
/// n = 1 fits the affine form from two samples with distinct eta and
/// verifies the rest; n = 2 enumerates coefficient tuples over a small
/// subfield and keeps any tuple satisfying the cross-multiplied
/// identity on every sample.
pub fn sn_oracle(
    net: &DelayNetwork,
    analysis: &NetAnalysis,
    ctx: &FieldCtx,
    root: &RootOfUnity,
    i: usize,
    p: usize,
    params: &SnParams,
) -> Result<SnVerdict, FeasError> {
    require_full_connectivity(analysis)?;
    assert!(params.n_small == 1 || params.n_small == 2, "oracle supports n = 1 and n = 2");
    if params.samples < MIN_TRIALS {
        return Err(FeasError::TooFewTrials { trials: params.samples });
    }
    let mut pairs = Vec::with_capacity(params.samples);
    for t in 0..params.samples {
        let s = sample_ratios(
            net,
            analysis,
            ctx,
            root,
            p,
            subseed(&[params.seed, TAG_SN + i as u64, p as u64, t as u64]),
        )?;
        pairs.push((s.eta, s.b[i]));
    }

    if params.n_small == 1 {
        return Ok(affine_fit(ctx, &pairs));
    }

    let s = params.subfield_degree;
    let emb = subfield_embedding(ctx, s)?;
    let card = emb.len() as u64;
    let needed = card.pow(5);
    if needed > params.budget {
        return Err(FeasError::BudgetExceeded { needed, budget: params.budget });
    }
    // precompute per-sample monomials: 1, eta, eta^2, b, eta b
    let rows: Vec<[Fe; 5]> = pairs
        .iter()
        .map(|&(eta, b)| [1, eta, ctx.mul(eta, eta), b, ctx.mul(eta, b)])
        .collect();
    let csize = card as u32;
    for f0 in 0..csize {
        for f1 in 0..csize {
            for f2 in 0..csize {
                if f0 == 0 && f1 == 0 && f2 == 0 {
                    continue;
                }
                for g0 in 0..csize {
                    'tuple: for g1 in 0..csize {
                        if g0 == 0 && g1 == 0 {
                            continue;
                        }
                        let co = [
                            emb[f0 as usize],
                            emb[f1 as usize],
                            emb[f2 as usize],
                            emb[g0 as usize],
                            emb[g1 as usize],
                        ];
                        for row in &rows {
                            // require g(eta) nonzero at the sample: the
                            // cross-multiplied equality is vacuous on the
                            // zero set of g
                            let gv = ctx.mul(co[3], row[0]) ^ ctx.mul(co[4], row[1]);
                            if gv == 0 {
                                continue 'tuple;
                            }
                            let mut acc = 0;
                            for (c, v) in co.iter().zip(row.iter()) {
                                acc ^= ctx.mul(*c, *v);
                            }
                            if acc != 0 {
                                continue 'tuple;
                            }
                        }
                        return Ok(SnVerdict {
                            member: true,
                            n_small: 2,
                            witness: Some(SnWitness {
                                f: vec![co[0], co[1], co[2]],
                                g: vec![co[3], co[4]],
                            }),
                            samples_used: pairs.len(),
                        });
                    }
                }
            }
        }
    }
    Ok(SnVerdict { member: false, n_small: 2, witness: None, samples_used: pairs.len() })
}

fn affine_fit(ctx: &FieldCtx, pairs: &[(Fe, Fe)]) -> SnVerdict {
    let samples_used = pairs.len();
    let (e0, b0) = pairs[0];
    let distinct = pairs.iter().find(|&&(e, _)| e != e0);
    let (c0, c1) = match distinct {
        None => {
            // eta never moved: b must be the constant f0/g0 itself
            if pairs.iter().all(|&(_, b)| b == b0) && b0 != 0 {
                (b0, 0)
            } else {
                return SnVerdict { member: false, n_small: 1, witness: None, samples_used };
            }
        }
        Some(&(e1, b1)) => {
            let c1 = ctx.div(ctx.add(b1, b0), ctx.add(e1, e0)).expect("distinct eta");
            let c0 = ctx.add(b0, ctx.mul(c1, e0));
            (c0, c1)
        }
    };
    if c0 == 0 && c1 == 0 {
        // f would be the zero polynomial
        return SnVerdict { member: false, n_small: 1, witness: None, samples_used };
    }
    let member =
        pairs.iter().all(|&(e, b)| b == ctx.add(c0, ctx.mul(c1, e)));
    SnVerdict {
        member,
        n_small: 1,
        witness: member.then(|| SnWitness { f: vec![c0, c1], g: vec![1] }),
        samples_used,
    }
}
