use super::*;
use crate::fixtures;
use crate::netgraph::gen::{generate, GenConfig};
use crate::netgraph::{transfer_poly, LekAssignment, LekSlot};

fn three_pair_line(delays: [u32; 2]) -> DelayNetwork {
    DelayNetwork::from_parts(
        vec!["S1".into(), "S2".into(), "S3".into(), "u".into(), "T1".into(), "T2".into(), "T3".into()],
        vec![
            ("e1".into(), "S1".into(), "u".into(), delays[0]),
            ("e2".into(), "u".into(), "T1".into(), delays[1]),
            ("e3".into(), "S2".into(), "T2".into(), 1),
            ("e4".into(), "S3".into(), "T3".into(), 1),
        ],
        ["S1".into(), "S2".into(), "S3".into()],
        ["T1".into(), "T2".into(), "T3".into()],
    )
    .unwrap()
}

#[test]
fn impulse_through_single_edge() {
    let ctx = FieldCtx::new(16).unwrap();
    let net = DelayNetwork::from_parts(
        vec!["S1".into(), "S2".into(), "S3".into(), "T1".into(), "T2".into(), "T3".into()],
        vec![
            ("e1".into(), "S1".into(), "T1".into(), 2),
            ("e2".into(), "S2".into(), "T2".into(), 1),
            ("e3".into(), "S3".into(), "T3".into(), 1),
        ],
        ["S1".into(), "S2".into(), "S3".into()],
        ["T1".into(), "T2".into(), "T3".into()],
    )
    .unwrap();
    let analysis = analyze(&net).unwrap();
    let g = 321;
    let leks = LekAssignment::from_fn(&net, &analysis, |slot| match slot {
        LekSlot::Source { edge: 0, .. } => g,
        _ => 1,
    });
    let sched = LekSchedule::new(vec![leks], 0, 8);
    let (w0, w1) = block_window(8, analysis.d_max, 1);
    let mut inj: [Timeline; 3] =
        std::array::from_fn(|_| Timeline::zeros(w0, (w1 - w0 + 1) as usize));
    inj[0].set(0, 1);
    let trace = run_time_domain(&net, &analysis, &ctx, &sched, &inj).unwrap();
    for t in trace.outputs[0].start()..trace.outputs[0].end_exclusive() {
        assert_eq!(trace.outputs[0].get(t), if t == 2 { g } else { 0 }, "t={t}");
    }
}

#[test]
fn impulse_through_cascade() {
    let ctx = FieldCtx::new(16).unwrap();
    let net = three_pair_line([1, 2]);
    let analysis = analyze(&net).unwrap();
    let (g1, g2, g3) = (3, 5, 7);
    let leks = LekAssignment::from_fn(&net, &analysis, |slot| match slot {
        LekSlot::Source { edge: 0, .. } => g1,
        LekSlot::Relay { from_edge: 0, to_edge: 1 } => g2,
        LekSlot::Sink { edge: 1, .. } => g3,
        _ => 1,
    });
    let sched = LekSchedule::new(vec![leks], 0, 8);
    let (w0, w1) = block_window(8, analysis.d_max, 1);
    let mut inj: [Timeline; 3] =
        std::array::from_fn(|_| Timeline::zeros(w0, (w1 - w0 + 1) as usize));
    inj[0].set(0, 1);
    let trace = run_time_domain(&net, &analysis, &ctx, &sched, &inj).unwrap();
    let expect = ctx.mul(ctx.mul(g1, g2), g3);
    for t in trace.outputs[0].start()..trace.outputs[0].end_exclusive() {
        assert_eq!(trace.outputs[0].get(t), if t == 3 { expect } else { 0 }, "t={t}");
    }
}

#[test]
fn constant_leks_reduce_to_convolution() {
    let ctx = FieldCtx::new(16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    for seed in [80u64, 81] {
        let net = generate(&GenConfig::default(), seed).unwrap();
        let analysis = analyze(&net).unwrap();
        let leks = LekAssignment::random(&net, &analysis, &ctx, &mut rng);
        let k = 24;
        let sched = LekSchedule::new(vec![leks.clone()], 0, k);
        let (w0, w1) = block_window(k, analysis.d_max, 1);
        let mut inj: [Timeline; 3] =
            std::array::from_fn(|_| Timeline::zeros(w0, (w1 - w0 + 1) as usize));
        for src in inj.iter_mut() {
            for t in w0..=w1 {
                src.set(t, rng.random_range(0..ctx.size()));
            }
        }
        let trace = run_time_domain(&net, &analysis, &ctx, &sched, &inj).unwrap();
        let shift = analysis.delta_min as i64;
        for j in 0..3 {
            let polys: Vec<_> =
                (0..3).map(|i| transfer_poly(&net, &analysis, &ctx, &leks, i, j)).collect();
            for t in trace.outputs[j].start()..trace.outputs[j].end_exclusive() {
                let mut expect = 0;
                for (i, tp) in polys.iter().enumerate() {
                    for (d, &c) in tp.coeffs.iter().enumerate() {
                        expect ^= ctx.mul(c, inj[i].get(t - shift - d as i64));
                    }
                }
                assert_eq!(trace.outputs[j].get(t), expect, "seed {seed} dest {j} t {t}");
            }
        }
    }
}

#[test]
fn injection_outside_schedule_rejected() {
    let ctx = FieldCtx::new(16).unwrap();
    let net = three_pair_line([1, 2]);
    let analysis = analyze(&net).unwrap();
    let leks = LekAssignment::constant(&net, &analysis, 1);
    let sched = LekSchedule::new(vec![leks], 0, 4);
    let (w0, w1) = block_window(4, analysis.d_max, 1);
    let mut inj: [Timeline; 3] =
        std::array::from_fn(|_| Timeline::zeros(w0, (w1 - w0 + 2) as usize));
    inj[1].set(w1 + 1, 9);
    let err = run_time_domain(&net, &analysis, &ctx, &sched, &inj).unwrap_err();
    assert_eq!(err, SimError::InjectionOutsideSchedule { source_index: 1, time: w1 + 1 });
}

/// Single-session loopback: with no cross paths the full framing chain
/// reduces to independent per-tone scalar channels.
#[test]
fn loopback_scalar_tones() {
    let ctx = FieldCtx::new(16).unwrap();
    let k = 3;
    let root = crate::galois::root_of_unity(&ctx, k).unwrap();
    let (fwd, inv) = crate::galois::dft_matrix(&ctx, &root);
    let net = three_pair_line([1, 1]);
    let analysis = analyze(&net).unwrap();
    let d_max = analysis.d_max as usize;
    assert_eq!((analysis.delta_min, analysis.d_max), (1, 1));
    let mut rng = ChaCha8Rng::seed_from_u64(72);
    let n = 1;
    let blocks = 2 * n + 1;
    let sched = LekSchedule::random(&net, &analysis, &ctx, n, k, &mut rng);
    // per block, a random descending-layout payload for S1
    let payloads: Vec<Vec<Fe>> =
        (0..blocks).map(|_| (0..k).map(|_| rng.random_range(0..ctx.size())).collect()).collect();
    let (span0, _) = block_window(k, analysis.d_max, 1);
    let (_, span1) = block_window(k, analysis.d_max, blocks);
    let mut inj: [Timeline; 3] =
        std::array::from_fn(|_| Timeline::zeros(span0, (span1 - span0 + 1) as usize));
    for l in 1..=blocks {
        let wire: Vec<Fe> = fwd.mul_vec(&payloads[l - 1], &ctx).into_iter().rev().collect();
        let framed = crate::transform::add_cp(&wire, d_max).unwrap();
        let (w0, _) = block_window(k, analysis.d_max, l);
        for (o, &v) in framed.iter().enumerate() {
            inj[0].set(w0 + o as i64, v);
        }
    }
    let trace = run_time_domain(&net, &analysis, &ctx, &sched, &inj).unwrap();
    let shift = analysis.delta_min as i64;
    for l in 1..=blocks {
        let (w0, w1) = block_window(k, analysis.d_max, l);
        let frame: Vec<Fe> = (w0..=w1).map(|t| trace.outputs[0].get(t + shift)).collect();
        let kept = crate::transform::strip_cp(&frame, d_max).unwrap();
        let desc: Vec<Fe> = kept.into_iter().rev().collect();
        let tones = inv.mul_vec(&desc, &ctx);
        let tp = transfer_poly(&net, &analysis, &ctx, sched.block(l), 0, 0);
        for p in 0..k {
            let gain = crate::netgraph::eval_transfer(&tp, &ctx, root.power(&ctx, p as u64));
            assert_eq!(tones[p], ctx.mul(gain, payloads[l - 1][p]), "block {l} tone {p}");
        }
    }
}

#[test]
fn prefix_isolates_blocks() {
    let ctx = FieldCtx::new(16).unwrap();
    let net = generate(&GenConfig::layered_shallow(), 90).unwrap();
    let analysis = analyze(&net).unwrap();
    let k = 5;
    let d_max = analysis.d_max as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    let sched = LekSchedule::random(&net, &analysis, &ctx, 1, k, &mut rng);
    let (span0, _) = block_window(k, analysis.d_max, 1);
    let (_, span1) = block_window(k, analysis.d_max, 3);
    let mk = |rng: &mut ChaCha8Rng, first_block: &[Fe]| {
        let mut inj: [Timeline; 3] =
            std::array::from_fn(|_| Timeline::zeros(span0, (span1 - span0 + 1) as usize));
        let mut cursor = 0;
        for src in inj.iter_mut() {
            for l in 1..=3 {
                let (w0, w1) = block_window(k, analysis.d_max, l);
                for t in w0..=w1 {
                    let v = if l == 1 {
                        cursor += 1;
                        first_block[cursor - 1]
                    } else {
                        rng.random_range(0..ctx.size())
                    };
                    src.set(t, v);
                }
            }
        }
        inj
    };
    // two runs differing only in the block-1 injections
    let later_seed = 74;
    let first_a: Vec<Fe> = (0..3 * (k + d_max)).map(|x| (x as u32 * 7 + 1) % 65536).collect();
    let first_b: Vec<Fe> = (0..3 * (k + d_max)).map(|x| (x as u32 * 131 + 5) % 65536).collect();
    let inj_a = mk(&mut ChaCha8Rng::seed_from_u64(later_seed), &first_a);
    let inj_b = mk(&mut ChaCha8Rng::seed_from_u64(later_seed), &first_b);
    let tr_a = run_time_domain(&net, &analysis, &ctx, &sched, &inj_a).unwrap();
    let tr_b = run_time_domain(&net, &analysis, &ctx, &sched, &inj_b).unwrap();
    let shift = analysis.delta_min as i64;
    for j in 0..3 {
        for l in 2..=3 {
            let (w0, w1) = block_window(k, analysis.d_max, l);
            let kept_a: Vec<Fe> =
                (w0 + d_max as i64..=w1).map(|t| tr_a.outputs[j].get(t + shift)).collect();
            let kept_b: Vec<Fe> =
                (w0 + d_max as i64..=w1).map(|t| tr_b.outputs[j].get(t + shift)).collect();
            assert_eq!(kept_a, kept_b, "dest {j} block {l}");
        }
    }
}

#[test]
fn pipeline_feasible_network_decodes_everything() {
    let ctx = FieldCtx::new(16).unwrap();
    let net = generate(&GenConfig::layered_shallow(), 91).unwrap();
    let cfg = PipelineConfig::new(2, 5, 7);
    let sr = pbna_pipeline(&net, &ctx, &cfg).unwrap();
    assert_eq!(sr.decoded_symbol_counts(), [12, 8, 8]);
    let tp = sr.throughput_paper_normalized();
    assert_eq!(tp.map(|r| (*r.numer(), *r.denom())), [(12, 25), (8, 25), (8, 25)]);
    let wall = sr.throughput_wall_clock();
    let uses = 5 * (5 + sr.d_max);
    assert_eq!(wall[0], Ratio::new(12, uses));
    for o in &sr.outcomes {
        assert!(o.alignment.all_pass());
        assert_eq!(o.decoded, [true, true, true]);
    }
}

#[test]
fn pipeline_all_tones_hits_full_rate() {
    let ctx = FieldCtx::new(16).unwrap();
    let net = generate(&GenConfig::layered_shallow(), 92).unwrap();
    let cfg = PipelineConfig::new(2, 5, 8).with_all_tones();
    let sr = pbna_pipeline(&net, &ctx, &cfg).unwrap();
    assert_eq!(sr.decoded_symbol_counts(), [15, 10, 10]);
    let tp = sr.throughput_paper_normalized();
    assert_eq!(tp.map(|r| (*r.numer(), *r.denom())), [(3, 5), (2, 5), (2, 5)]);
}

#[test]
fn pipeline_deterministic_for_seed() {
    let ctx = FieldCtx::new(16).unwrap();
    let net = generate(&GenConfig::layered_shallow(), 93).unwrap();
    let cfg = PipelineConfig::new(1, 5, 21);
    let a = pbna_pipeline(&net, &ctx, &cfg).unwrap();
    let b = pbna_pipeline(&net, &ctx, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn pipeline_rejects_bad_configs() {
    let ctx = FieldCtx::new(16).unwrap();
    let net = fixtures::shared_bottleneck();
    let err = pbna_pipeline(&net, &ctx, &PipelineConfig::new(0, 5, 0)).unwrap_err();
    assert!(matches!(err, SimError::InvalidConfig(_)));
    // 4 does not divide 65535
    let err = pbna_pipeline(&net, &ctx, &PipelineConfig::new(1, 4, 0)).unwrap_err();
    assert!(matches!(err, SimError::Galois(GaloisError::NonDivisibleBlockLength { .. })));
    let err = pbna_pipeline(&fixtures::diagonal_only(), &ctx, &PipelineConfig::new(1, 5, 0))
        .unwrap_err();
    assert!(matches!(err, SimError::ZeroMinCut { .. }));
}

#[test]
fn infeasible_instance_fails_at_affected_destination_only() {
    // b_1 pinned to 1: the decoding matrix at T_1 collapses, the
    // others stay generic
    let ctx = FieldCtx::new(16).unwrap();
    let net = fixtures::matched_sink_pair();
    let cfg = PipelineConfig::new(1, 3, 5);
    let sr = pbna_pipeline(&net, &ctx, &cfg).unwrap();
    for o in &sr.outcomes {
        assert!(!o.decoded[0], "tone {}", o.tone);
        assert!(o.decode_rank[0] < 3);
        assert!(o.decoded[1] && o.decoded[2], "tone {}", o.tone);
    }
    assert_eq!(sr.decoded_symbol_counts()[0], 0);
}

#[test]
fn fully_collapsed_instance_fails_everywhere() {
    let ctx = FieldCtx::new(16).unwrap();
    let net = fixtures::shared_bottleneck();
    let cfg = PipelineConfig::new(1, 3, 6);
    let sr = pbna_pipeline(&net, &ctx, &cfg).unwrap();
    assert_eq!(sr.resamples_alignment, cfg.resample_cap);
    for o in &sr.outcomes {
        assert_eq!(o.decoded, [false, false, false]);
        assert!(o.decode_rank.iter().all(|&r| r < 3));
    }
    assert_eq!(sr.decoded_symbol_counts(), [0, 0, 0]);
}

#[test]
fn degree_two_witness_defeats_decoding_at_n2() {
    // b_1 = eta/(eta+1) leaves n = 1 decodable but collapses T_1 for
    // n = 2
    let ctx = FieldCtx::new(16).unwrap();
    let net = fixtures::paired_bottleneck();
    let sr = pbna_pipeline(&net, &ctx, &PipelineConfig::new(2, 5, 9)).unwrap();
    for o in &sr.outcomes {
        assert!(!o.decoded[0], "tone {}", o.tone);
        assert!(o.decode_rank[0] < 5);
    }
}

#[test]
fn report_round_trips() {
    let ctx = FieldCtx::new(16).unwrap();
    let net = generate(&GenConfig::layered_shallow(), 94).unwrap();
    let sr = pbna_pipeline(&net, &ctx, &PipelineConfig::new(1, 5, 10)).unwrap();
    let report = sr.report();
    let text = serde_json::to_string_pretty(&report).unwrap();
    let back: SimReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report, back);
    assert!(report.all_decoded());
    assert_eq!(report.throughput_paper_normalized[0].to_string(), "8/15");
}
