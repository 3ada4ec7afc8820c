//! Circulant transfer matrices from cyclic-prefixed blocks, their DFT
//! diagonalization, and the prefix framing itself.
//!
//! Vectors follow the descending-time layout [X^(k-1) ... X^(0)]: component
//! c of a block vector is the symbol of generation k-1-c, and component p
//! carries tone p.

use thiserror::Error;

use crate::galois::{Fe, FieldCtx, FieldMatrix, RootOfUnity};
use crate::netgraph::{eval_transfer, TransferPoly};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("block length {k} must exceed the delay span d_max = {d_max}")]
    BlockTooShort { k: usize, d_max: usize },
    #[error("frame of length {len} cannot carry a prefix of {d_max} and a nonempty block")]
    FrameTooShort { len: usize, d_max: usize },
    #[error("root order {root_k} does not match block length {k}")]
    RootMismatch { root_k: usize, k: usize },
}

/// A block length paired with the transfer polynomial whose delay action
/// the cyclic prefix turns into a circulant.
#[derive(Debug, Clone)]
pub struct CirculantSpec {
    k: usize,
    poly: TransferPoly,
}

impl CirculantSpec {
    pub fn new(k: usize, poly: TransferPoly) -> Result<Self, TransformError> {
        if k < poly.d_max() + 1 {
            return Err(TransformError::BlockTooShort { k, d_max: poly.d_max() });
        }
        Ok(CirculantSpec { k, poly })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn poly(&self) -> &TransferPoly {
        &self.poly
    }
}

/// True when the cyclic-prefix overhead d_max/(k + d_max) exceeds a
/// quarter of the frame; callers may want to warn.
pub fn heavy_prefix_overhead(k: usize, d_max: usize) -> bool {
    d_max > 0 && k < 4 * d_max
}

/// The k x k circulant acting on one descending-layout block: row r,
/// column c holds coefficient (c - r) mod k of the polynomial, zero
/// where that index exceeds d_max.
pub fn circulant(spec: &CirculantSpec, _ctx: &FieldCtx) -> FieldMatrix {
    let k = spec.k;
    let coeffs = &spec.poly.coeffs;
    let mut m = FieldMatrix::zeros(k, k);
    for r in 0..k {
        for (d, &coeff) in coeffs.iter().enumerate() {
            m[(r, (r + d) % k)] = coeff;
        }
    }
    m
}

/// Diagonal spectrum of a circulant: entry at diagonal position t equals
/// the polynomial evaluated at alpha^t, i.e. the exponent-index value
/// for l = k-1-t.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagSpectrum {
    entries: Vec<Fe>,
}

impl DiagSpectrum {
    /// Entry at diagonal position t (top-left is t = 0); this is the
    /// tone-t channel value.
    pub fn tone(&self, t: usize) -> Fe {
        self.entries[t]
    }

    /// Entry by exponent index l in k-1..=0 order.
    pub fn by_exponent_index(&self, l: usize) -> Fe {
        self.entries[self.entries.len() - 1 - l]
    }

    pub fn entries(&self) -> &[Fe] {
        &self.entries
    }

    pub fn to_matrix(&self) -> FieldMatrix {
        FieldMatrix::diag(&self.entries)
    }
}

/// Diagonalizes the circulant: position t of the spectrum is
/// `sum_d alpha^(t d) * coeff[d]`, and F diag F^{-1} reconstructs the
/// circulant exactly.
pub fn diagonalize(
    spec: &CirculantSpec,
    ctx: &FieldCtx,
    root: &RootOfUnity,
) -> Result<DiagSpectrum, TransformError> {
    if root.k() != spec.k {
        return Err(TransformError::RootMismatch { root_k: root.k(), k: spec.k });
    }
    let entries = (0..spec.k)
        .map(|t| eval_transfer(&spec.poly, ctx, root.power(ctx, t as u64)))
        .collect();
    Ok(DiagSpectrum { entries })
}

/// Prepends the last `d_max` symbols of the block: the cyclic prefix is
/// transmitted first.
pub fn add_cp(block: &[Fe], d_max: usize) -> Result<Vec<Fe>, TransformError> {
    if d_max >= block.len() {
        return Err(TransformError::BlockTooShort { k: block.len(), d_max });
    }
    let mut out = Vec::with_capacity(block.len() + d_max);
    out.extend_from_slice(&block[block.len() - d_max..]);
    out.extend_from_slice(block);
    Ok(out)
}

/// Drops the first `d_max` received symbols of the frame.
pub fn strip_cp(frame: &[Fe], d_max: usize) -> Result<Vec<Fe>, TransformError> {
    if frame.len() <= d_max {
        return Err(TransformError::FrameTooShort { len: frame.len(), d_max });
    }
    Ok(frame[d_max..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::{dft_matrix, root_of_unity};
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn poly(coeffs: Vec<Fe>) -> TransferPoly {
        TransferPoly { i: 0, j: 0, coeffs, delta_min: 0 }
    }

    #[test]
    fn circulant_of_constant_is_scalar_identity() {
        let ctx = FieldCtx::new(16).unwrap();
        let spec = CirculantSpec::new(4, poly(vec![9])).unwrap();
        let m = circulant(&spec, &ctx);
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(m[(r, c)], if r == c { 9 } else { 0 });
            }
        }
    }

    #[test]
    fn circulant_row_pattern_k3() {
        let ctx = FieldCtx::new(16).unwrap();
        let (a, b) = (5, 6);
        let spec = CirculantSpec::new(3, poly(vec![a, b])).unwrap();
        let m = circulant(&spec, &ctx);
        let expect = FieldMatrix::from_rows(&[vec![a, b, 0], vec![0, a, b], vec![b, 0, a]]);
        assert_eq!(m, expect);
    }

    #[test]
    fn circulant_tight_block_rotates() {
        // k = d_max + 1: every row fully populated, row r is row 0
        // cyclically shifted right by r
        let ctx = FieldCtx::new(16).unwrap();
        let coeffs = vec![2, 3, 4, 5];
        let k = coeffs.len();
        let spec = CirculantSpec::new(k, poly(coeffs)).unwrap();
        let m = circulant(&spec, &ctx);
        for r in 1..k {
            for c in 0..k {
                assert_eq!(m[(r, c)], m[(r - 1, (c + k - 1) % k)], "row {r} col {c}");
            }
        }
    }

    #[test]
    fn circulant_rejects_short_block() {
        let err = CirculantSpec::new(2, poly(vec![1, 2, 3])).unwrap_err();
        assert_eq!(err, TransformError::BlockTooShort { k: 2, d_max: 2 });
    }

    #[test]
    fn spectrum_constant_poly() {
        let ctx = FieldCtx::new(16).unwrap();
        let root = root_of_unity(&ctx, 5).unwrap();
        let spec = CirculantSpec::new(5, poly(vec![42])).unwrap();
        let spectrum = diagonalize(&spec, &ctx, &root).unwrap();
        assert!(spectrum.entries().iter().all(|&e| e == 42));
    }

    #[test]
    fn spectrum_k3_gf4_positions() {
        let ctx = FieldCtx::new(2).unwrap();
        let root = root_of_unity(&ctx, 3).unwrap();
        let w = root.alpha();
        let (a, b) = (1, 2);
        let spec = CirculantSpec::new(3, poly(vec![a, b])).unwrap();
        let s = diagonalize(&spec, &ctx, &root).unwrap();
        assert_eq!(s.by_exponent_index(2), ctx.add(a, b));
        assert_eq!(s.by_exponent_index(1), ctx.add(a, ctx.mul(b, w)));
        assert_eq!(s.by_exponent_index(0), ctx.add(a, ctx.mul(b, ctx.mul(w, w))));
        // reconstruction against the explicit row pattern
        let (fwd, inv) = dft_matrix(&ctx, &root);
        let rebuilt = fwd.mul(&s.to_matrix(), &ctx).mul(&inv, &ctx);
        assert_eq!(rebuilt, circulant(&spec, &ctx));
    }

    #[test]
    fn spectrum_top_entry_is_coefficient_sum() {
        let ctx = FieldCtx::new(16).unwrap();
        let root = root_of_unity(&ctx, 5).unwrap();
        let coeffs = vec![3, 1, 4, 1];
        let sum = coeffs.iter().fold(0, |a, &b| a ^ b);
        let spec = CirculantSpec::new(5, poly(coeffs)).unwrap();
        let s = diagonalize(&spec, &ctx, &root).unwrap();
        assert_eq!(s.by_exponent_index(4), sum);
        assert_eq!(s.tone(0), sum);
    }

    #[test]
    fn reconstruction_random_instances() {
        let ctx = FieldCtx::new(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in [1usize, 3, 5, 15] {
            let root = root_of_unity(&ctx, k).unwrap();
            let (fwd, inv) = dft_matrix(&ctx, &root);
            for _ in 0..20 {
                let d_max = rng.random_range(0..k);
                let coeffs: Vec<Fe> =
                    (0..=d_max).map(|_| rng.random_range(0..ctx.size())).collect();
                let spec = CirculantSpec::new(k, poly(coeffs)).unwrap();
                let s = diagonalize(&spec, &ctx, &root).unwrap();
                let rebuilt = fwd.mul(&s.to_matrix(), &ctx).mul(&inv, &ctx);
                assert_eq!(rebuilt, circulant(&spec, &ctx));
            }
        }
    }

    #[test]
    fn circulants_over_same_root_commute() {
        let ctx = FieldCtx::new(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let k = 5;
        for _ in 0..10 {
            let mk = |rng: &mut ChaCha8Rng| {
                let d_max = rng.random_range(0..k);
                let coeffs: Vec<Fe> =
                    (0..=d_max).map(|_| rng.random_range(0..ctx.size())).collect();
                circulant(&CirculantSpec::new(k, poly(coeffs)).unwrap(), &ctx)
            };
            let a = mk(&mut rng);
            let b = mk(&mut rng);
            assert_eq!(a.mul(&b, &ctx), b.mul(&a, &ctx));
        }
    }

    #[test]
    fn per_tone_consistency_with_eval() {
        let ctx = FieldCtx::new(16).unwrap();
        let root = root_of_unity(&ctx, 15).unwrap();
        let p = poly(vec![8, 0, 3, 12]);
        let spec = CirculantSpec::new(15, p.clone()).unwrap();
        let s = diagonalize(&spec, &ctx, &root).unwrap();
        for l in 0..15 {
            let x = root.power(&ctx, (15 - 1 - l) as u64);
            assert_eq!(s.by_exponent_index(l), crate::netgraph::eval_transfer(&p, &ctx, x));
        }
    }

    #[test]
    fn cp_examples() {
        // descending-layout block [x2, x1, x0]: prepend the last symbol
        assert_eq!(add_cp(&[2, 1, 0], 1).unwrap(), vec![0, 2, 1, 0]);
        assert_eq!(add_cp(&[7, 8, 9], 0).unwrap(), vec![7, 8, 9]);
        assert_eq!(strip_cp(&[0, 0, 0, 0], 1).unwrap(), vec![0, 0, 0]);
        assert_eq!(add_cp(&[1, 2], 2).unwrap_err(), TransformError::BlockTooShort { k: 2, d_max: 2 });
        assert_eq!(
            strip_cp(&[1], 1).unwrap_err(),
            TransformError::FrameTooShort { len: 1, d_max: 1 }
        );
    }

    #[test]
    fn heavy_prefix_threshold() {
        assert!(heavy_prefix_overhead(3, 1));
        assert!(!heavy_prefix_overhead(4, 1));
        assert!(!heavy_prefix_overhead(8, 0));
    }

    proptest! {
        #[test]
        fn cp_round_trip(block in prop::collection::vec(0u32..1 << 16, 1..24), d_max in 0usize..8) {
            prop_assume!(d_max < block.len());
            let framed = add_cp(&block, d_max).unwrap();
            prop_assert_eq!(framed.len(), block.len() + d_max);
            prop_assert_eq!(strip_cp(&framed, d_max).unwrap(), block);
        }
    }
}
