//! Arithmetic over F_p and the small amount of linear algebra and
//! combinatorics the rest of the crate needs.
//!
//! Conventions, fixed once here and relied on everywhere else:
//!
//! * Coefficients are stored as reduced residues in `0..p`.
//! * `binom_mod_p(n, k)` is 0 whenever `k < 0`, `k > n >= 0`, or `n < 0`.
//!   (No extension to negative upper index: callers that need conjugates use
//!   the explicit formulas in [`crate::dual`] instead.)
//! * Kernel bases returned by [`FpMatrix::rank_and_kernel`] are in reduced
//!   echelon form with respect to ascending free columns, so they are
//!   canonical for a given matrix.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A validated prime, copied freely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Prime(u32);

impl Prime {
    /// Validates primality by trial division; `p` is small in every intended
    /// use (2, 3, 5, occasionally 7 or 11 in tests).
    pub fn new(p: u32) -> Result<Prime> {
        if p < 2 {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2u32;
        while d * d <= p {
            if p % d == 0 {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn is_odd(self) -> bool {
        self.0 != 2
    }

    /// Errs unless `self` is odd; used by the comodule and cobar layers,
    /// which are only defined here at odd primes.
    pub fn require_odd(self) -> Result<()> {
        if self.is_odd() {
            Ok(())
        } else {
            Err(Error::OddPrimeRequired(self.0))
        }
    }

    /// Reduces an arbitrary signed integer to `0..p`.
    pub fn reduce(self, x: i64) -> u32 {
        let p = self.0 as i64;
        (((x % p) + p) % p) as u32
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.0
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        (a + self.0 - b % self.0) % self.0
    }

    pub fn neg(self, a: u32) -> u32 {
        (self.0 - a % self.0) % self.0
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    /// Multiplicative inverse of a nonzero residue, by Fermat.
    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.0 != 0, "division by zero mod {}", self.0);
        self.pow(a, self.0 - 2)
    }

    pub fn pow(self, mut base: u32, mut exp: u32) -> u32 {
        base %= self.0;
        let mut acc = 1u32;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

impl std::fmt::Display for Prime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Binomial coefficient mod p by Lucas' theorem.
///
/// Out-of-range conventions (see module docs): 0 for `k < 0`, for
/// `k > n >= 0`, and for `n < 0`.
pub fn binom_mod_p(n: i64, k: i64, p: Prime) -> u32 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let pp = p.get() as i64;
    let mut n = n;
    let mut k = k;
    let mut acc = 1u32;
    while n > 0 || k > 0 {
        let (nd, kd) = (n % pp, k % pp);
        if kd > nd {
            return 0;
        }
        acc = p.mul(acc, binom_small(nd as u32, kd as u32, p));
        n /= pp;
        k /= pp;
    }
    acc
}

/// C(n, k) mod p for 0 <= k <= n < p, by the multiplicative formula.
fn binom_small(n: u32, k: u32, p: Prime) -> u32 {
    let k = k.min(n - k);
    let mut num = 1u32;
    let mut den = 1u32;
    for i in 0..k {
        num = p.mul(num, n - i);
        den = p.mul(den, i + 1);
    }
    if k == 0 {
        1
    } else {
        p.mul(num, p.inv(den))
    }
}

/// Multinomial coefficient `(sum parts)! / prod parts[i]!` mod p, as a
/// product of Lucas binomials of the running partial sums.
pub fn multinom_mod_p(parts: &[u64], p: Prime) -> u32 {
    let mut acc = 1u32;
    let mut total: u64 = 0;
    for &part in parts {
        total += part;
        acc = p.mul(acc, binom_mod_p(total as i64, part as i64, p));
        if acc == 0 {
            return 0;
        }
    }
    acc
}

/// A finite exponent sequence with trailing zeros trimmed; the canonical
/// carrier for xi-exponents `(r_1, r_2, ...)` indexed from 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExpSeq(Vec<u32>);

impl ExpSeq {
    pub fn new(mut v: Vec<u32>) -> ExpSeq {
        while v.last() == Some(&0) {
            v.pop();
        }
        ExpSeq(v)
    }

    pub fn empty() -> ExpSeq {
        ExpSeq(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Exponent of the `i`-th entry, 1-indexed; 0 beyond the stored length.
    pub fn get(&self, i: usize) -> u32 {
        assert!(i >= 1, "ExpSeq is 1-indexed");
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// Iterate `(index, exponent)` over nonzero entries, index starting at 1.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (i + 1, e))
    }

    /// Entrywise sum.
    pub fn plus(&self, other: &ExpSeq) -> ExpSeq {
        let n = self.0.len().max(other.0.len());
        ExpSeq::new(
            (1..=n)
                .map(|i| self.get(i) + other.get(i))
                .collect::<Vec<_>>(),
        )
    }

    /// Sum of exponents (`e(R)` in conjugation formulas).
    pub fn total(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }
}

/// Number of partitions of `n` with every part >= 2 (so 1 for `n = 0`,
/// 0 for `n = 1`), by the usual bounded-part DP.
pub fn partitions_min2(n: u64) -> u64 {
    let n = n as usize;
    let mut table = vec![0u64; n + 1];
    table[0] = 1;
    for part in 2..=n.max(2) {
        for m in part..=n {
            table[m] = table[m]
                .checked_add(table[m - part])
                .expect("partition count overflowed u64");
        }
    }
    table[n]
}

/// A sparse matrix over F_p, stored as triplets. Rows index relations,
/// columns index basis elements; duplicate positions accumulate.
#[derive(Debug, Clone)]
pub struct FpMatrix {
    p: Prime,
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, u32)>,
}

impl FpMatrix {
    pub fn new(p: Prime, rows: usize, cols: usize) -> FpMatrix {
        FpMatrix {
            p,
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Adds `value` at `(row, col)` (accumulating mod p).
    pub fn add_entry(&mut self, row: usize, col: usize, value: i64) {
        assert!(row < self.rows && col < self.cols, "entry out of range");
        let v = self.p.reduce(value);
        if v != 0 {
            self.entries.push((row, col, v));
        }
    }

    /// Rows as reduced sparse vectors (sorted by column, zero-free).
    fn sparse_rows(&self) -> Vec<Vec<(usize, u32)>> {
        let mut rows: Vec<std::collections::BTreeMap<usize, u32>> =
            vec![std::collections::BTreeMap::new(); self.rows];
        for &(r, c, v) in &self.entries {
            let slot = rows[r].entry(c).or_insert(0);
            *slot = self.p.add(*slot, v);
        }
        rows.into_iter()
            .map(|m| m.into_iter().filter(|&(_, v)| v != 0).collect())
            .collect()
    }

    /// Rank together with a canonical basis of the right kernel.
    ///
    /// Small matrices are eliminated densely; larger ones with sparse rows.
    /// Both paths produce the reduced echelon form, so the kernel basis
    /// (one vector per free column, ascending) is identical either way.
    pub fn rank_and_kernel(&self) -> (usize, Vec<Vec<u32>>) {
        let (pivots, rref) = if self.rows < 64 && self.cols < 64 {
            self.rref_dense()
        } else {
            self.rref_sparse()
        };
        let rank = pivots.len();
        let pivot_of_col: std::collections::BTreeMap<usize, usize> =
            pivots.iter().enumerate().map(|(r, &c)| (c, r)).collect();
        let mut kernel = Vec::new();
        for free in 0..self.cols {
            if pivot_of_col.contains_key(&free) {
                continue;
            }
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (&pc, &pr) in &pivot_of_col {
                // Row pr reads x_pc + sum_{c > pc, free} a_c x_c = 0.
                let coeff = rref[pr]
                    .iter()
                    .find(|&&(c, _)| c == free)
                    .map(|&(_, a)| a)
                    .unwrap_or(0);
                v[pc] = self.p.neg(coeff);
            }
            kernel.push(v);
        }
        (rank, kernel)
    }

    /// Rank only (kernel discarded).
    pub fn rank(&self) -> usize {
        self.rank_and_kernel().0
    }

    /// Solves `self * x = rhs`, returning a witness if one exists.
    /// Used for membership questions, where any witness will do; the witness
    /// chosen is the one with zeros in all free coordinates.
    pub fn solve(&self, rhs: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(rhs.len(), self.rows, "rhs length mismatch");
        // Eliminate the augmented matrix.
        let mut aug = FpMatrix::new(self.p, self.rows, self.cols + 1);
        aug.entries = self.entries.clone();
        for (r, &v) in rhs.iter().enumerate() {
            if v % self.p.get() != 0 {
                aug.entries.push((r, self.cols, v % self.p.get()));
            }
        }
        let (pivots, rref) = if aug.rows < 64 && aug.cols < 64 {
            aug.rref_dense()
        } else {
            aug.rref_sparse()
        };
        // Inconsistent iff some pivot lands in the rhs column.
        if pivots.iter().any(|&c| c == self.cols) {
            return None;
        }
        let mut x = vec![0u32; self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            let b = rref[r]
                .iter()
                .find(|&&(c, _)| c == self.cols)
                .map(|&(_, a)| a)
                .unwrap_or(0);
            x[pc] = b;
        }
        Some(x)
    }

    /// Dense reduced row echelon. Returns (pivot columns in row order,
    /// nonzero rows as sparse vectors).
    fn rref_dense(&self) -> (Vec<usize>, Vec<Vec<(usize, u32)>>) {
        let p = self.p;
        let mut m = vec![vec![0u32; self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            m[r][c] = p.add(m[r][c], v);
        }
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            let Some(pr) = (row..self.rows).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(row, pr);
            let inv = p.inv(m[row][col]);
            for c in col..self.cols {
                m[row][c] = p.mul(m[row][c], inv);
            }
            for r in 0..self.rows {
                if r != row && m[r][col] != 0 {
                    let f = m[r][col];
                    for c in col..self.cols {
                        let t = p.mul(f, m[row][c]);
                        m[r][c] = p.sub(m[r][c], t);
                    }
                }
            }
            pivots.push(col);
            row += 1;
            if row == self.rows {
                break;
            }
        }
        let rows = m[..row]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(c, &v)| (c, v))
                    .collect()
            })
            .collect();
        (pivots, rows)
    }

    /// Sparse reduced row echelon over rows kept as sorted `(col, val)`
    /// vectors. Same output contract as [`Self::rref_dense`].
    fn rref_sparse(&self) -> (Vec<usize>, Vec<Vec<(usize, u32)>>) {
        let p = self.p;
        let mut pending = self.sparse_rows();
        pending.retain(|r| !r.is_empty());
        // Echelon rows, keyed by pivot column.
        let mut echelon: std::collections::BTreeMap<usize, Vec<(usize, u32)>> =
            std::collections::BTreeMap::new();
        for mut row in pending {
            loop {
                let Some(&(lead, lv)) = row.first() else {
                    break;
                };
                match echelon.get(&lead) {
                    Some(er) => {
                        row = axpy(p, &row, p.neg(lv), er);
                    }
                    None => {
                        let inv = p.inv(lv);
                        for e in row.iter_mut() {
                            e.1 = p.mul(e.1, inv);
                        }
                        echelon.insert(lead, row);
                        break;
                    }
                }
            }
        }
        // Back-substitute to reduced form, right-to-left.
        let pivot_cols: Vec<usize> = echelon.keys().copied().collect();
        for i in (0..pivot_cols.len()).rev() {
            let pc = pivot_cols[i];
            let reducer = echelon[&pc].clone();
            for &qc in &pivot_cols[..i] {
                let row = echelon.get_mut(&qc).unwrap();
                let coeff = row
                    .iter()
                    .find(|&&(c, _)| c == pc)
                    .map(|&(_, v)| v)
                    .unwrap_or(0);
                if coeff != 0 {
                    *row = axpy(p, row, p.neg(coeff), &reducer);
                }
            }
        }
        let pivots: Vec<usize> = echelon.keys().copied().collect();
        let rows = echelon.into_values().collect();
        (pivots, rows)
    }
}

/// `row + scalar * other` on sorted sparse vectors, dropping zeros.
fn axpy(p: Prime, row: &[(usize, u32)], scalar: u32, other: &[(usize, u32)]) -> Vec<(usize, u32)> {
    let mut out = Vec::with_capacity(row.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < other.len() {
        match (row.get(i), other.get(j)) {
            (Some(&(ci, vi)), Some(&(cj, vj))) if ci == cj => {
                let v = p.add(vi, p.mul(scalar, vj));
                if v != 0 {
                    out.push((ci, v));
                }
                i += 1;
                j += 1;
            }
            (Some(&(ci, vi)), Some(&(cj, _))) if ci < cj => {
                out.push((ci, vi));
                i += 1;
            }
            (Some(_), Some(&(cj, vj))) => {
                let v = p.mul(scalar, vj);
                if v != 0 {
                    out.push((cj, v));
                }
                j += 1;
            }
            (Some(&(ci, vi)), None) => {
                out.push((ci, vi));
                i += 1;
            }
            (None, Some(&(cj, vj))) => {
                let v = p.mul(scalar, vj);
                if v != 0 {
                    out.push((cj, v));
                }
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    fn p(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    /// Independent binomial oracle: exact factorial quotient, then reduce.
    fn binom_oracle(n: u64, k: u64, pr: Prime) -> u32 {
        if k > n {
            return 0;
        }
        let fact = |m: u64| {
            (1..=m)
                .map(BigUint::from)
                .product::<BigUint>()
                .max(BigUint::from(1u32))
        };
        let num = fact(n);
        let den = fact(k) * fact(n - k);
        let q = num / den;
        (q % BigUint::from(pr.get())).try_into().unwrap()
    }

    #[test]
    fn prime_validation() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(3).is_ok());
        assert!(Prime::new(5).is_ok());
        assert!(Prime::new(97).is_ok());
        for bad in [0, 1, 4, 6, 9, 15, 91] {
            assert!(matches!(Prime::new(bad), Err(Error::NotPrime(_))), "{bad}");
        }
    }

    #[test]
    fn field_ops() {
        let p5 = p(5);
        assert_eq!(p5.reduce(-1), 4);
        assert_eq!(p5.reduce(-10), 0);
        assert_eq!(p5.sub(1, 3), 3);
        for a in 1..5 {
            assert_eq!(p5.mul(a, p5.inv(a)), 1);
        }
        assert_eq!(p5.pow(2, 10), 4); // 1024 = 204*5 + 4
    }

    #[test]
    fn binom_against_factorial_oracle() {
        for pr in [p(2), p(3), p(5), p(7)] {
            for n in 0..60u64 {
                for k in 0..=n {
                    assert_eq!(
                        binom_mod_p(n as i64, k as i64, pr),
                        binom_oracle(n, k, pr),
                        "C({n},{k}) mod {pr}"
                    );
                }
            }
        }
    }

    #[test]
    fn binom_out_of_range() {
        let p3 = p(3);
        assert_eq!(binom_mod_p(-1, 0, p3), 0);
        assert_eq!(binom_mod_p(-4, 2, p3), 0);
        assert_eq!(binom_mod_p(5, -1, p3), 0);
        assert_eq!(binom_mod_p(5, 6, p3), 0);
        assert_eq!(binom_mod_p(0, 0, p3), 1);
    }

    #[test]
    fn multinom_small_cases() {
        let p3 = p(3);
        // 4!/(2!1!1!) = 12 = 0 mod 3; 3!/(1!1!1!) = 6 = 0 mod 3; 2!/(1!1!) = 2.
        assert_eq!(multinom_mod_p(&[2, 1, 1], p3), 0);
        assert_eq!(multinom_mod_p(&[1, 1, 1], p3), 0);
        assert_eq!(multinom_mod_p(&[1, 1], p3), 2);
        assert_eq!(multinom_mod_p(&[], p3), 1);
        assert_eq!(multinom_mod_p(&[7], p3), 1);
        // 6!/(3!3!) = 20 = 2 mod 3, and via the oracle.
        assert_eq!(multinom_mod_p(&[3, 3], p3), binom_oracle(6, 3, p3));
    }

    #[test]
    fn expseq_trims_and_indexes() {
        let e = ExpSeq::new(vec![0, 2, 0, 0]);
        assert_eq!(e.as_slice(), &[0, 2]);
        assert_eq!(e.get(1), 0);
        assert_eq!(e.get(2), 2);
        assert_eq!(e.get(9), 0);
        assert_eq!(e.total(), 2);
        assert_eq!(e.iter().collect::<Vec<_>>(), vec![(2, 2)]);
        assert!(ExpSeq::new(vec![0, 0]).is_empty());
        let f = e.plus(&ExpSeq::new(vec![1]));
        assert_eq!(f.as_slice(), &[1, 2]);
    }

    /// Brute-force partition oracle: enumerate nonincreasing part lists.
    fn partitions_min2_oracle(n: u64) -> u64 {
        fn count(n: u64, max: u64) -> u64 {
            if n == 0 {
                return 1;
            }
            (2..=max.min(n)).map(|part| count(n - part, part)).sum()
        }
        count(n, n)
    }

    #[test]
    fn partitions_against_enumeration() {
        for n in 0..=30 {
            assert_eq!(partitions_min2(n), partitions_min2_oracle(n), "n = {n}");
        }
        // Spot values: 1, 0, 1, 1, 2, 2, 4, 4, 7 for n = 0..=8.
        let head: Vec<u64> = (0..=8).map(partitions_min2).collect();
        assert_eq!(head, vec![1, 0, 1, 1, 2, 2, 4, 4, 7]);
    }

    /// Naive reference elimination (fraction-free forward only) for rank.
    fn rank_reference(
        p: Prime,
        rows: usize,
        cols: usize,
        entries: &[(usize, usize, u32)],
    ) -> usize {
        let mut m = vec![vec![0u32; cols]; rows];
        for &(r, c, v) in entries {
            m[r][c] = p.add(m[r][c], v);
        }
        let mut rank = 0;
        for col in 0..cols {
            if let Some(pr) = (rank..rows).find(|&r| m[r][col] != 0) {
                m.swap(rank, pr);
                let inv = p.inv(m[rank][col]);
                for r in rank + 1..rows {
                    if m[r][col] != 0 {
                        let f = p.mul(m[r][col], inv);
                        for c in col..cols {
                            let t = p.mul(f, m[rank][c]);
                            m[r][c] = p.sub(m[r][c], t);
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    fn check_kernel(m: &FpMatrix, kernel: &[Vec<u32>]) {
        let p = m.p();
        let rows = m.sparse_rows();
        for v in kernel {
            for row in &rows {
                let mut acc = 0u32;
                for &(c, a) in row {
                    acc = p.add(acc, p.mul(a, v[c]));
                }
                assert_eq!(acc, 0, "kernel vector not in kernel");
            }
        }
    }

    #[test]
    fn rank_kernel_small_known() {
        let p3 = p(3);
        // [[1,2],[2,1]] over F_3: row2 = 2*row1, rank 1, kernel spanned by (1,1).
        let mut m = FpMatrix::new(p3, 2, 2);
        m.add_entry(0, 0, 1);
        m.add_entry(0, 1, 2);
        m.add_entry(1, 0, 2);
        m.add_entry(1, 1, 1);
        let (rank, kernel) = m.rank_and_kernel();
        assert_eq!(rank, 1);
        assert_eq!(kernel, vec![vec![1, 1]]);
        check_kernel(&m, &kernel);

        // Zero matrix.
        let z = FpMatrix::new(p3, 3, 2);
        let (rank, kernel) = z.rank_and_kernel();
        assert_eq!(rank, 0);
        assert_eq!(kernel.len(), 2);

        // Identity.
        let mut id = FpMatrix::new(p3, 4, 4);
        for i in 0..4 {
            id.add_entry(i, i, 1);
        }
        let (rank, kernel) = id.rank_and_kernel();
        assert_eq!((rank, kernel.len()), (4, 0));
    }

    #[test]
    fn sparse_and_dense_agree_with_reference() {
        // Deterministic pseudo-random instances via a simple LCG.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 33) as u32
        };
        for pr in [p(2), p(3), p(5)] {
            for trial in 0..20 {
                let rows = 1 + (next() % 40) as usize;
                let cols = 1 + (next() % 40) as usize;
                let fill = 1 + (next() % 60) as usize;
                let mut entries = Vec::new();
                for _ in 0..fill {
                    entries.push((
                        (next() as usize) % rows,
                        (next() as usize) % cols,
                        next() % pr.get(),
                    ));
                }
                let mut m = FpMatrix::new(pr, rows, cols);
                for &(r, c, v) in &entries {
                    m.add_entry(r, c, v as i64);
                }
                let expect = rank_reference(pr, rows, cols, &m.entries);
                let (dense_pivots, _) = m.rref_dense();
                let (sparse_pivots, _) = m.rref_sparse();
                assert_eq!(dense_pivots.len(), expect, "dense trial {trial} p {pr}");
                assert_eq!(
                    sparse_pivots, dense_pivots,
                    "pivot sets trial {trial} p {pr}"
                );
                let (rank, kernel) = m.rank_and_kernel();
                assert_eq!(rank + kernel.len(), cols, "rank-nullity trial {trial}");
                check_kernel(&m, &kernel);
            }
        }
    }

    #[test]
    fn solve_finds_witnesses() {
        let p5 = p(5);
        // x + 2y = 3, 2x + 4y = 2 is inconsistent over F_5 (second row is
        // twice the first but 2 != 2*3).
        let mut m = FpMatrix::new(p5, 2, 2);
        m.add_entry(0, 0, 1);
        m.add_entry(0, 1, 2);
        m.add_entry(1, 0, 2);
        m.add_entry(1, 1, 4);
        assert_eq!(m.solve(&[3, 2]), None);
        // Consistent variant: rhs (3, 6 mod 5).
        let x = m.solve(&[3, 1]).expect("consistent");
        assert_eq!(p5.add(x[0], p5.mul(2, x[1])), 3);
    }

    proptest! {
        #[test]
        fn lucas_matches_oracle(n in 0u64..400, k in 0u64..400, pi in 0usize..3) {
            let pr = [p(2), p(3), p(5)][pi];
            prop_assert_eq!(binom_mod_p(n as i64, k as i64, pr), binom_oracle(n, k, pr));
        }

        #[test]
        fn vandermonde_convolution(n in 0i64..60, m in 0i64..60, k in 0i64..60, pi in 0usize..3) {
            // C(n+m, k) = sum_j C(n, j) C(m, k-j) mod p.
            let pr = [p(2), p(3), p(5)][pi];
            let lhs = binom_mod_p(n + m, k, pr);
            let mut rhs = 0u32;
            for j in 0..=k {
                rhs = pr.add(rhs, pr.mul(binom_mod_p(n, j, pr), binom_mod_p(m, k - j, pr)));
            }
            prop_assert_eq!(lhs, rhs);
        }
    }
}
