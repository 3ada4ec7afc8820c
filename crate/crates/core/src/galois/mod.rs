//! Exact arithmetic over binary extension fields GF(2^m), roots of unity,
//! and the finite-field DFT matrix used to diagonalize circulants.

use thiserror::Error;

mod matrix;

pub use matrix::FieldMatrix;

/// A field element. Valid values are `0..2^m` for the owning [`FieldCtx`].
pub type Fe = u32;

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 20;

/// Extension degrees for which exp/log tables are built. Above this,
/// multiplication falls back to shift-and-reduce.
const TABLE_DEGREE_CAP: u32 = 16;

/// Default reduction polynomial per extension degree `m = 1..=20`:
/// the lexicographically smallest primitive polynomial of degree `m`
/// (bit i = coefficient of x^i). `x` is therefore a generator of the
/// multiplicative group for every supported `m`.
const DEFAULT_POLY: [u32; 20] = [
    0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x402B,
    0x8003, 0x1002D, 0x20009, 0x40027, 0x80027, 0x100009,
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GaloisError {
    #[error("extension degree {0} out of range 1..={MAX_DEGREE}")]
    DegreeOutOfRange(u32),
    #[error("block length {k} does not divide 2^{m} - 1 = {order}")]
    NonDivisibleBlockLength { k: usize, m: u32, order: u32 },
    #[error("matrix dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("singular matrix: rank {achieved} of {size}")]
    Singular { achieved: usize, size: usize },
    #[error("division by zero")]
    DivisionByZero,
}

/// Arithmetic context for GF(2^m) with a fixed reduction polynomial.
///
/// Immutable after construction; all operations are pure functions of
/// their inputs and safe to share across threads.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    m: u32,
    poly: u32,
    order: u32,
    exp: Vec<Fe>,
    log: Vec<u32>,
}

impl FieldCtx {
    /// Builds the field GF(2^m) with the documented default reduction
    /// polynomial for `m`.
    pub fn new(m: u32) -> Result<Self, GaloisError> {
        if m == 0 || m > MAX_DEGREE {
            return Err(GaloisError::DegreeOutOfRange(m));
        }
        let poly = DEFAULT_POLY[(m - 1) as usize];
        debug_assert!(is_irreducible(poly, m));
        let order = (1u32 << m) - 1;
        let (exp, log) = if m <= TABLE_DEGREE_CAP {
            build_tables(m, poly, order)
        } else {
            (Vec::new(), Vec::new())
        };
        Ok(FieldCtx { m, poly, order, exp, log })
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn reduction_poly(&self) -> u32 {
        self.poly
    }

    /// Number of elements, 2^m.
    pub fn size(&self) -> u32 {
        self.order + 1
    }

    /// Multiplicative group order, 2^m - 1.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// The fixed generator of the multiplicative group (`x`, i.e. 2,
    /// except in GF(2) where the group is trivial).
    pub fn generator(&self) -> Fe {
        if self.m == 1 {
            1
        } else {
            2
        }
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        a ^ b
    }

    /// Subtraction equals addition in characteristic 2.
    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 || b == 0 {
            return 0;
        }
        if !self.exp.is_empty() {
            let idx = self.log[a as usize] + self.log[b as usize];
            let idx = if idx >= self.order { idx - self.order } else { idx };
            self.exp[idx as usize]
        } else {
            self.mul_notable(a, b)
        }
    }

    fn mul_notable(&self, mut a: Fe, b: Fe) -> Fe {
        let mut acc = 0u32;
        for i in 0..self.m {
            if (b >> i) & 1 == 1 {
                acc ^= a;
            }
            a <<= 1;
            if (a >> self.m) & 1 == 1 {
                a ^= self.poly;
            }
        }
        acc
    }

    pub fn inv(&self, a: Fe) -> Result<Fe, GaloisError> {
        if a == 0 {
            return Err(GaloisError::DivisionByZero);
        }
        if !self.exp.is_empty() {
            let idx = (self.order - self.log[a as usize]) % self.order;
            Ok(self.exp[idx as usize])
        } else {
            Ok(self.pow(a, (self.order - 1) as u64))
        }
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe, GaloisError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a^e by square-and-multiply; 0^0 = 1.
    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let mut e = e % self.order as u64;
        if e == 0 {
            return 1;
        }
        let mut base = a;
        let mut acc: Fe = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

fn build_tables(m: u32, poly: u32, order: u32) -> (Vec<Fe>, Vec<u32>) {
    let size = order as usize + 1;
    let mut exp = vec![0u32; order as usize];
    let mut log = vec![0u32; size];
    let mut v: Fe = 1;
    for (i, slot) in exp.iter_mut().enumerate() {
        *slot = v;
        log[v as usize] = i as u32;
        // multiply by x and reduce
        v <<= 1;
        if (v >> m) & 1 == 1 {
            v ^= poly;
        }
    }
    // x is primitive for every polynomial in DEFAULT_POLY
    assert_eq!(v, 1, "generator does not have full multiplicative order");
    (exp, log)
}

/// Trial division over GF(2)[x]; adequate for m <= 20.
fn is_irreducible(poly: u32, m: u32) -> bool {
    fn poly_rem(mut a: u64, b: u64) -> u64 {
        let db = 63 - b.leading_zeros() as i32;
        loop {
            let da = 63 - (a | 1).leading_zeros() as i32;
            if a == 0 || da < db {
                return a;
            }
            a ^= b << (da - db);
        }
    }
    for d in 1..=(m / 2) {
        for f in (1u64 << d)..(1u64 << (d + 1)) {
            if poly_rem(poly as u64, f) == 0 {
                return false;
            }
        }
    }
    true
}

/// A primitive k-th root of unity in a specific field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RootOfUnity {
    alpha: Fe,
    k: usize,
}

impl RootOfUnity {
    pub fn alpha(&self) -> Fe {
        self.alpha
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// alpha^e with the exponent reduced mod k (e may be "negative" via
    /// explicit callers using `inv_power`).
    pub fn power(&self, ctx: &FieldCtx, e: u64) -> Fe {
        ctx.pow(self.alpha, e % self.k as u64)
    }

    /// alpha^{-e}.
    pub fn inv_power(&self, ctx: &FieldCtx, e: u64) -> Fe {
        let r = (e % self.k as u64) as usize;
        ctx.pow(self.alpha, ((self.k - r) % self.k) as u64)
    }
}

/// Returns alpha = g^{(2^m - 1)/k} for the fixed generator g, after
/// checking that k divides 2^m - 1.
pub fn root_of_unity(ctx: &FieldCtx, k: usize) -> Result<RootOfUnity, GaloisError> {
    let order = ctx.order();
    if k == 0 || !(order as u64).is_multiple_of(k as u64) {
        return Err(GaloisError::NonDivisibleBlockLength { k, m: ctx.degree(), order });
    }
    let alpha = ctx.pow(ctx.generator(), (order as u64) / (k as u64));
    // g primitive implies alpha has order exactly k
    debug_assert!(ctx.pow(alpha, k as u64) == 1);
    debug_assert!((1..k).all(|j| ctx.pow(alpha, j as u64) != 1));
    Ok(RootOfUnity { alpha, k })
}

/// The k x k DFT matrix F with `F[i][j] = alpha^(ij)`, and its inverse
/// with entries alpha^{-ij}. No scalar normalization is needed: k is odd
/// (it divides 2^m - 1), so the field element k*1 equals 1.
pub fn dft_matrix(ctx: &FieldCtx, root: &RootOfUnity) -> (FieldMatrix, FieldMatrix) {
    let k = root.k();
    let mut fwd = FieldMatrix::zeros(k, k);
    let mut inv = FieldMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let e = (i as u64) * (j as u64);
            fwd[(i, j)] = root.power(ctx, e);
            inv[(i, j)] = root.inv_power(ctx, e);
        }
    }
    (fwd, inv)
}
