//! Exact integer linear algebra.
//!
//! Every rank in this crate is a rank over the rationals, computed with
//! fraction-free (Bareiss) elimination. Elimination first runs on `i128` with
//! checked arithmetic and restarts on arbitrary-precision integers the moment
//! an intermediate minor overflows, so the answer is exact either way.
//!
//! Generic multi-antenna channels are realized by sampling integer channel
//! coefficients and taking the maximum rank over a few trials. A sampled rank
//! never exceeds the generic rank, and by the Schwartz–Zippel lemma a single
//! trial falls short with probability at most `deg / 2^31` per nonvanishing
//! minor, so the maximum over three trials is the generic rank except with
//! vanishing probability.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest coding dimension for which all `2^C − 1` binary vectors are
/// enumerated.
pub const BINARY_CAP: usize = 16;

/// Exhaustive MDS verification is used up to this many vectors.
const EXHAUSTIVE_MDS_LIMIT: usize = 12;

/// Channel coefficients are drawn from `[1, CHANNEL_MAX)`.
pub const CHANNEL_MAX: i64 = 1 << 31;

/// Dense integer matrix with arbitrary-precision entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Copy>(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row.iter().map(|&x| x.into()));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Matrix whose columns are the given vectors, all of length `dim`.
    pub fn from_columns<T: Into<BigInt> + Copy>(dim: usize, columns: &[Vec<T>]) -> Result<Self> {
        let mut m = IntMatrix::zeros(dim, columns.len());
        for (c, col) in columns.iter().enumerate() {
            if col.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: col.len(),
                });
            }
            for (r, &x) in col.iter().enumerate() {
                m.data[r * columns.len() + c] = x.into();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: BigInt) {
        self.data[r * self.cols + c] = value;
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    /// Appends `v` as a new rightmost column.
    pub fn with_column(&self, v: &[BigInt]) -> Result<IntMatrix> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: v.len(),
            });
        }
        let cols = self.cols + 1;
        let mut m = IntMatrix::zeros(self.rows, cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.data[r * cols + c] = self.get(r, c).clone();
            }
            m.data[r * cols + self.cols] = v[r].clone();
        }
        Ok(m)
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = BigInt::zero();
                for k in 0..self.cols {
                    acc += self.get(r, k) * other.get(k, c);
                }
                out.data[r * other.cols + c] = acc;
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn to_i128_rows(&self) -> Option<Vec<Vec<i128>>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c).to_i128()).collect())
            .collect()
    }

    fn to_big_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].to_vec())
            .collect()
    }

    /// Exact rank over the rationals.
    pub fn rank(&self) -> usize {
        if let Some(rows) = self.to_i128_rows() {
            if let Some(r) = bareiss_rank_i128(rows) {
                return r;
            }
        }
        bareiss_rank_big(self.to_big_rows())
    }
}

/// Exact rank of the matrix whose columns are `columns` (each of length `dim`).
pub fn rank_of_columns<V: AsRef<[i64]>>(dim: usize, columns: &[V]) -> usize {
    if dim == 0 || columns.is_empty() {
        return 0;
    }
    // Work on the transpose: one row per vector.
    let rows: Vec<Vec<i128>> = columns
        .iter()
        .map(|v| {
            let v = v.as_ref();
            debug_assert_eq!(v.len(), dim);
            v.iter().map(|&x| i128::from(x)).collect()
        })
        .collect();
    match bareiss_rank_i128(rows) {
        Some(r) => r,
        None => bareiss_rank_big(
            columns
                .iter()
                .map(|v| v.as_ref().iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        ),
    }
}

/// Fraction-free elimination on `i128`; `None` on overflow.
fn bareiss_rank_i128(mut a: Vec<Vec<i128>>) -> Option<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev: i128 = 1;
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][col];
        for r in rank + 1..rows {
            let lead = a[r][col];
            for c in col + 1..cols {
                let x = pivot.checked_mul(a[r][c])?;
                let y = lead.checked_mul(a[rank][c])?;
                a[r][c] = x.checked_sub(y)? / prev;
            }
            a[r][col] = 0;
        }
        prev = pivot;
        rank += 1;
    }
    Some(rank)
}

fn bareiss_rank_big(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][col].clone();
        for r in rank + 1..rows {
            let lead = a[r][col].clone();
            for c in col + 1..cols {
                let num = &pivot * &a[r][c] - &lead * &a[rank][c];
                a[r][c] = num / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Whether `v` lies in the column span of `basis`.
pub fn span_contains(basis: &IntMatrix, v: &[i64]) -> Result<bool> {
    let v: Vec<BigInt> = v.iter().map(|&x| x.into()).collect();
    let extended = basis.with_column(&v)?;
    Ok(extended.rank() == basis.rank())
}

/// Basis (as rows) of the left null space `{u : uᵀ A = 0}`, scaled to
/// integer entries. Materializes zero-forcing combiners.
pub fn left_null_space(a: &IntMatrix) -> IntMatrix {
    // Null space of Aᵀ via reduced row echelon form over the rationals.
    let at = a.transpose();
    let (rows, cols) = (at.rows(), at.cols());
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            (0..cols)
                .map(|c| BigRational::from_integer(at.get(r, c).clone()))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for c in col..cols {
            m[row][c] = &m[row][c] * &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..cols {
                    let delta = &f * &m[row][c];
                    m[r][c] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = IntMatrix::zeros(free.len(), cols);
    for (k, &f) in free.iter().enumerate() {
        let mut vec = vec![BigRational::zero(); cols];
        vec[f] = BigRational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            vec[pc] = -m[r][f].clone();
        }
        let lcm = vec
            .iter()
            .fold(BigInt::one(), |acc, x| num_integer_lcm(&acc, x.denom()));
        for (c, x) in vec.iter().enumerate() {
            basis.set(
                k,
                c,
                (x * BigRational::from_integer(lcm.clone())).to_integer(),
            );
        }
    }
    basis
}

fn num_integer_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    let g = gcd(a.abs(), b.abs());
    (a * b).abs() / g
}

fn gcd(mut a: BigInt, mut b: BigInt) -> BigInt {
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorKind {
    BinaryAll,
    GenericMds,
}

/// Ordered family of candidate beamforming vectors in `dim` dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorSet {
    pub dim: usize,
    pub vectors: Vec<Vec<i64>>,
    pub kind: VectorKind,
}

impl VectorSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Vector for palette index `idx` (1-based, 0 is reserved for "deferred").
    pub fn by_index(&self, idx: usize) -> &[i64] {
        &self.vectors[idx - 1]
    }
}

/// Integer value of a 0/1 vector, entry `r` being bit `r`.
pub fn binary_vector(dim: usize, pattern: u32) -> Vec<i64> {
    (0..dim).map(|r| i64::from((pattern >> r) & 1)).collect()
}

/// All nonzero 0/1 vectors of length `c`, ordered by the integer value of
/// the bit pattern (entry `r` is bit `r`).
pub fn gen_binary_vectors(c: usize) -> Result<VectorSet> {
    if c == 0 || c > BINARY_CAP {
        return Err(Error::InvalidParameter(format!(
            "binary vector dimension {c} outside 1..={BINARY_CAP}"
        )));
    }
    let vectors = (1u32..(1u32 << c)).map(|p| binary_vector(c, p)).collect();
    Ok(VectorSet {
        dim: c,
        vectors,
        kind: VectorKind::BinaryAll,
    })
}

/// `s` vectors in `c` dimensions, any `c` of which are independent: the
/// Vandermonde columns `[1, a, a², …, a^{c−1}]` for distinct positive nodes.
/// Without a seed the nodes are `1..=s`; with one they are `s` distinct
/// draws from `[1, 4s]`, sorted.
pub fn gen_generic_vectors(c: usize, s: usize, seed: Option<u64>) -> Result<VectorSet> {
    if c == 0 || s < c {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= c <= s, got c = {c}, s = {s}"
        )));
    }
    let nodes: Vec<i64> = match seed {
        None => (1..=s as i64).collect(),
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pool: Vec<i64> = (1..=4 * s as i64).collect();
            for i in 0..s {
                let j = rng.gen_range(i..pool.len());
                pool.swap(i, j);
            }
            let mut picked = pool[..s].to_vec();
            picked.sort_unstable();
            picked
        }
    };
    let mut vectors = Vec::with_capacity(s);
    for &a in &nodes {
        let mut col = Vec::with_capacity(c);
        let mut x: i64 = 1;
        for e in 0..c {
            col.push(x);
            if e + 1 < c {
                x = x
                    .checked_mul(a)
                    .ok_or(Error::Overflow("Vandermonde vectors"))?;
            }
        }
        vectors.push(col);
    }
    let set = VectorSet {
        dim: c,
        vectors,
        kind: VectorKind::GenericMds,
    };
    if !verify_mds(&set, seed.unwrap_or(0)) {
        return Err(Error::VerificationFailed);
    }
    Ok(set)
}

/// Every `dim`-subset independent: exhaustively up to 12 vectors, on 256
/// sampled subsets otherwise.
pub fn verify_mds(set: &VectorSet, seed: u64) -> bool {
    let c = set.dim;
    let s = set.len();
    if s <= EXHAUSTIVE_MDS_LIMIT {
        let mut ok = true;
        for_each_subset(s, c, &mut |idx| {
            let cols: Vec<&[i64]> = idx.iter().map(|&i| set.vectors[i].as_slice()).collect();
            if rank_of_columns(c, &cols) != c {
                ok = false;
            }
        });
        ok
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d64_735f_6368_6b00);
        (0..256).all(|_| {
            let mut idx: Vec<usize> = (0..s).collect();
            for i in 0..c {
                let j = rng.gen_range(i..s);
                idx.swap(i, j);
            }
            let cols: Vec<&[i64]> = idx[..c]
                .iter()
                .map(|&i| set.vectors[i].as_slice())
                .collect();
            rank_of_columns(c, &cols) == c
        })
    }
}

/// Calls `f` with every ascending `k`-subset of `0..n`.
pub fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// One interferer (or the desired link) seen through an `n`-antenna channel:
/// its beamforming vectors, all of the coding dimension.
#[derive(Clone, Copy, Debug)]
pub struct LiftedBlock<'a> {
    pub antennas: usize,
    pub vectors: &'a [Vec<i64>],
}

/// Generic rank of `⊕ (H_i ⊗ V_i)` with independent `n×1` integer channels
/// per block: the maximum exact rank over `trials` samples.
pub fn generic_rank_lifted(
    blocks: &[LiftedBlock<'_>],
    c: usize,
    trials: usize,
    seed: u64,
) -> usize {
    if blocks.is_empty() {
        return 0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..trials.max(1) {
        let channels: Vec<Vec<i64>> = blocks
            .iter()
            .map(|b| {
                (0..b.antennas)
                    .map(|_| rng.gen_range(1..CHANNEL_MAX))
                    .collect()
            })
            .collect();
        best = best.max(sampled_lifted_rank(blocks, &channels, c));
    }
    best
}

/// Exact rank of the lift for one fixed set of channel samples.
pub fn sampled_lifted_rank(blocks: &[LiftedBlock<'_>], channels: &[Vec<i64>], c: usize) -> usize {
    let rows_total = blocks.iter().map(|b| b.antennas).max().unwrap_or(0) * c;
    // Blocks with fewer antennas are zero-padded; the lift is defined per
    // receiver so in practice all blocks share one antenna count.
    let mut columns: Vec<Vec<i128>> = Vec::new();
    for (block, h) in blocks.iter().zip(channels) {
        for v in block.vectors {
            let mut col = vec![0i128; rows_total];
            for (a, &ha) in h.iter().enumerate() {
                for (l, &vl) in v.iter().enumerate() {
                    col[a * c + l] = i128::from(ha) * i128::from(vl);
                }
            }
            columns.push(col);
        }
    }
    if columns.is_empty() || rows_total == 0 {
        return 0;
    }
    match bareiss_rank_i128(columns.clone()) {
        Some(r) => r,
        None => bareiss_rank_big(
            columns
                .into_iter()
                .map(|col| col.into_iter().map(BigInt::from).collect())
                .collect(),
        ),
    }
}

/// Mersenne prime used by the modular fast path.
pub const MOD_P: u64 = (1 << 61) - 1;

fn reduce(x: u64) -> u64 {
    let r = (x & MOD_P) + (x >> 61);
    if r >= MOD_P {
        r - MOD_P
    } else {
        r
    }
}

fn mul_mod(a: u64, b: u64) -> u64 {
    let x = u128::from(a) * u128::from(b);
    reduce(((x as u64) & MOD_P) + (x >> 61) as u64)
}

fn pow_mod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        exp >>= 1;
    }
    acc
}

/// Rank over GF(p), p = 2^61 − 1, of the given rows (entries already reduced).
pub fn rank_mod_p(mut a: Vec<Vec<u64>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, p);
        let inv = pow_mod(a[rank][col], MOD_P - 2);
        for r in rank + 1..rows {
            if a[r][col] == 0 {
                continue;
            }
            let f = mul_mod(a[r][col], inv);
            for c in col..cols {
                let sub = mul_mod(f, a[rank][c]);
                a[r][c] = reduce(a[r][c] + MOD_P - sub);
            }
        }
        rank += 1;
    }
    rank
}

/// Row-echelon basis over GF(2^61 − 1) that grows one vector at a time
/// and can be truncated back, for backtracking searches.
#[derive(Clone, Debug, Default)]
pub struct ModBasis {
    rows: Vec<(usize, Vec<u64>)>,
}

impl ModBasis {
    pub fn new() -> Self {
        ModBasis::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Adds `x` (entries reduced mod p); returns whether the rank grew.
    pub fn insert(&mut self, mut x: Vec<u64>) -> bool {
        for (pivot, row) in &self.rows {
            let f = x[*pivot];
            if f != 0 {
                for (xc, &rc) in x.iter_mut().zip(row) {
                    *xc = reduce(*xc + MOD_P - mul_mod(f, rc));
                }
            }
        }
        let Some(pivot) = x.iter().position(|&e| e != 0) else {
            return false;
        };
        let inv = pow_mod(x[pivot], MOD_P - 2);
        for e in &mut x {
            *e = mul_mod(*e, inv);
        }
        self.rows.push((pivot, x));
        true
    }

    pub fn truncate(&mut self, len: usize) {
        self.rows.truncate(len);
    }
}

fn to_mod(x: i64) -> u64 {
    x.rem_euclid(MOD_P as i64) as u64
}

/// A fixed draw of generic `n×1` channels for every (receiver, transmitter)
/// pair, over GF(2^61 − 1).
///
/// Used by the search loops where the exact sampled-integer route is too slow.
/// For integer vectors whose minors stay below the modulus (all binary vectors
/// up to [`BINARY_CAP`]) the generic rank over GF(p) equals the generic rank
/// over the rationals, and one random draw hits it with probability at least
/// `1 − n·c / p`. Results it accepts are always re-verified exactly.
#[derive(Clone, Debug)]
pub struct GenericChannels {
    k: usize,
    antennas: usize,
    h: Vec<u64>,
}

impl GenericChannels {
    pub fn new(k: usize, antennas: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = (0..k * k * antennas)
            .map(|_| rng.gen_range(1..MOD_P))
            .collect();
        GenericChannels { k, antennas, h }
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    fn channel(&self, receiver: usize, transmitter: usize) -> &[u64] {
        let base = (receiver * self.k + transmitter) * self.antennas;
        &self.h[base..base + self.antennas]
    }

    /// `h_{receiver, transmitter} ⊗ v` reduced mod p.
    pub fn lift(&self, receiver: usize, transmitter: usize, v: &[i64]) -> Vec<u64> {
        let h = self.channel(receiver, transmitter);
        let mut row = Vec::with_capacity(self.antennas * v.len());
        for &ha in h {
            row.extend(v.iter().map(|&vl| mul_mod(ha, to_mod(vl))));
        }
        row
    }

    /// Rank of `⊕_i H_{ji} ⊗ v_i` at `receiver` over the given
    /// (transmitter, vector) pairs.
    pub fn lifted_rank<'a, I>(&self, receiver: usize, c: usize, blocks: I) -> usize
    where
        I: IntoIterator<Item = (usize, &'a [i64])>,
    {
        let rows: Vec<Vec<u64>> = blocks
            .into_iter()
            .map(|(tx, v)| {
                debug_assert_eq!(v.len(), c);
                self.lift(receiver, tx, v)
            })
            .collect();
        rank_mod_p(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Determinant by cofactor expansion; independent of the elimination path.
    fn det(m: &[Vec<i64>]) -> BigInt {
        let n = m.len();
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return m[0][0].into();
        }
        let mut acc = BigInt::zero();
        for c in 0..n {
            if m[0][c] == 0 {
                continue;
            }
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != c)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let term = BigInt::from(m[0][c]) * det(&minor);
            if c % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    /// Largest k with a nonzero k×k minor.
    pub(crate) fn minor_rank(rows: &[Vec<i64>]) -> usize {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        for k in (1..=r.min(c)).rev() {
            let mut found = false;
            for_each_subset(r, k, &mut |ri| {
                if found {
                    return;
                }
                for_each_subset(c, k, &mut |ci| {
                    if found {
                        return;
                    }
                    let sub: Vec<Vec<i64>> = ri
                        .iter()
                        .map(|&i| ci.iter().map(|&j| rows[i][j]).collect())
                        .collect();
                    if !det(&sub).is_zero() {
                        found = true;
                    }
                });
            });
            if found {
                return k;
            }
        }
        0
    }

    #[test]
    fn rank_of_ex5_interference() {
        let cols = vec![vec![1i64, 0, 0], vec![0, 1, 0], vec![1, 1, 0]];
        assert_eq!(rank_of_columns(3, &cols), 2);
        assert_eq!(IntMatrix::from_columns(3, &cols).unwrap().rank(), 2);
    }

    #[test]
    fn rank_trivial_cases() {
        assert_eq!(IntMatrix::zeros(3, 4).rank(), 0);
        assert_eq!(IntMatrix::identity(5).rank(), 5);
        assert_eq!(IntMatrix::zeros(0, 0).rank(), 0);
    }

    #[test]
    fn rank_matches_minor_oracle_on_ten_six_dim_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let spread = if trial % 2 == 0 { 3 } else { 1 };
            // Ten 6-dim vectors as rows of a 10×6 matrix, sometimes built low-rank.
            let basis: Vec<Vec<i64>> = (0..rng.gen_range(1..=6))
                .map(|_| (0..6).map(|_| rng.gen_range(-spread..=spread)).collect())
                .collect();
            let rows: Vec<Vec<i64>> = (0..10)
                .map(|_| {
                    let coef: Vec<i64> = basis.iter().map(|_| rng.gen_range(-2..=2)).collect();
                    (0..6)
                        .map(|j| basis.iter().zip(&coef).map(|(b, k)| b[j] * k).sum())
                        .collect()
                })
                .collect();
            let m = IntMatrix::from_rows(&rows).unwrap();
            assert_eq!(m.rank(), minor_rank(&rows));
            assert_eq!(m.transpose().rank(), m.rank());
        }
    }

    #[test]
    fn big_integer_fallback_agrees() {
        // Entries near 2^62 overflow the i128 path on the second pivot.
        let big = 1i64 << 62;
        let rows = vec![
            vec![big, big - 1, 3],
            vec![big - 5, big, 7],
            vec![2 * (big / 2), big - 1, 3],
        ];
        let m = IntMatrix::from_rows(&rows).unwrap();
        assert_eq!(m.rank(), 2);
        let rows = vec![vec![big, 1, 0], vec![1, big, 1], vec![0, 1, big]];
        assert_eq!(IntMatrix::from_rows(&rows).unwrap().rank(), 3);
    }

    #[test]
    fn span_membership() {
        let basis = IntMatrix::from_columns(3, &[vec![1i64, 0, 0], vec![0, 1, 0]]).unwrap();
        assert!(span_contains(&basis, &[1, 1, 0]).unwrap());
        assert!(!span_contains(&basis, &[0, 0, 1]).unwrap());
        assert!(span_contains(&basis, &[1, 1]).is_err());
        let e: Vec<Vec<i64>> = (0..7)
            .map(|i| (0..7).map(|j| i64::from(i == j)).collect())
            .collect();
        let six = IntMatrix::from_columns(7, &e[..6]).unwrap();
        assert!(!span_contains(&six, &e[6]).unwrap());
    }

    #[test]
    fn binary_vectors() {
        let set = gen_binary_vectors(3).unwrap();
        assert_eq!(set.len(), 7);
        let mut listed = vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![1, 1, 0],
            vec![1, 0, 1],
            vec![0, 1, 1],
            vec![1, 1, 1],
        ];
        let mut got = set.vectors.clone();
        listed.sort();
        got.sort();
        assert_eq!(got, listed);
        assert_eq!(set.vectors[0], vec![1, 0, 0]);
        assert_eq!(set.vectors[2], vec![1, 1, 0]);
        assert_eq!(gen_binary_vectors(1).unwrap().vectors, vec![vec![1]]);
        assert!(gen_binary_vectors(17).is_err());
        assert!(gen_binary_vectors(0).is_err());
    }

    #[test]
    fn binary_vectors_c4_by_enumeration() {
        let set = gen_binary_vectors(4).unwrap();
        let mut oracle = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        if a + b + c + d > 0 {
                            oracle.push(vec![a, b, c, d]);
                        }
                    }
                }
            }
        }
        let mut got = set.vectors.clone();
        got.sort();
        oracle.sort();
        assert_eq!(got, oracle);
        assert_eq!(rank_of_columns(4, &set.vectors), 4);
    }

    #[test]
    fn generic_vectors_small() {
        let set = gen_generic_vectors(2, 3, None).unwrap();
        assert_eq!(set.vectors, vec![vec![1, 1], vec![1, 2], vec![1, 3]]);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let d = set.vectors[i][0] * set.vectors[j][1] - set.vectors[i][1] * set.vectors[j][0];
            assert_ne!(d, 0);
        }
        let five = gen_generic_vectors(5, 5, Some(3)).unwrap();
        assert_eq!(rank_of_columns(5, &five.vectors), 5);
        assert!(gen_generic_vectors(3, 2, None).is_err());
    }

    #[test]
    fn generic_vectors_mds_exhaustive() {
        for c in 1..=5 {
            for s in c..=10 {
                let set = gen_generic_vectors(c, s, Some((c * 100 + s) as u64)).unwrap();
                for_each_subset(s, c, &mut |idx| {
                    let cols: Vec<&[i64]> =
                        idx.iter().map(|&i| set.vectors[i].as_slice()).collect();
                    assert_eq!(rank_of_columns(c, &cols), c);
                });
            }
        }
    }

    #[test]
    fn lifted_rank_single_antenna_is_plain_rank() {
        let vs = vec![vec![1i64, 0, 0], vec![0, 1, 0], vec![1, 1, 0]];
        let singles: Vec<Vec<Vec<i64>>> = vs.iter().map(|v| vec![v.clone()]).collect();
        let blocks: Vec<LiftedBlock> = singles
            .iter()
            .map(|v| LiftedBlock {
                antennas: 1,
                vectors: v,
            })
            .collect();
        for seed in 0..5 {
            assert_eq!(generic_rank_lifted(&blocks, 3, 1, seed), 2);
            assert_eq!(generic_rank_lifted(&blocks, 3, 4, seed), 2);
        }
    }

    #[test]
    fn lifted_rank_two_antennas() {
        let v = vec![vec![1i64, 1]];
        let two = [LiftedBlock {
            antennas: 2,
            vectors: &v,
        }; 2];
        assert_eq!(generic_rank_lifted(&two, 2, 3, 1), 2);
        let three = [LiftedBlock {
            antennas: 2,
            vectors: &v,
        }; 3];
        assert_eq!(generic_rank_lifted(&three, 2, 3, 1), 2);
    }

    #[test]
    fn modular_lift_agrees_with_exact() {
        let v1 = vec![1i64, 0];
        let v2 = vec![0i64, 1];
        let ch = GenericChannels::new(4, 2, 9);
        assert_eq!(
            ch.lifted_rank(0, 2, [(1, v1.as_slice()), (2, v1.as_slice())]),
            2
        );
        assert_eq!(
            ch.lifted_rank(
                0,
                2,
                [(1, v1.as_slice()), (2, v1.as_slice()), (3, v1.as_slice())]
            ),
            2
        );
        assert_eq!(
            ch.lifted_rank(
                0,
                2,
                [(1, v1.as_slice()), (2, v1.as_slice()), (3, v2.as_slice())]
            ),
            3
        );
    }

    #[test]
    fn mod_basis_tracks_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let rows: Vec<Vec<i64>> = (0..8)
                .map(|_| (0..5).map(|_| rng.gen_range(0..2)).collect())
                .collect();
            let mut basis = ModBasis::new();
            for (i, r) in rows.iter().enumerate() {
                basis.insert(r.iter().map(|&x| x as u64).collect());
                assert_eq!(basis.len(), rank_of_columns(5, &rows[..=i]));
            }
            basis.truncate(1);
            assert_eq!(basis.len(), 1);
        }
    }

    #[test]
    fn left_null_space_annihilates() {
        let a = IntMatrix::from_columns(3, &[vec![1i64, 0, 0], vec![1, 1, 0]]).unwrap();
        let u = left_null_space(&a);
        assert_eq!(u.rows(), 1);
        assert!(u.mul(&a).unwrap().is_zero());
        assert_eq!(u.rank(), 1);
    }
}
