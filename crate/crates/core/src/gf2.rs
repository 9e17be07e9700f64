//! Bit-packed vectors and matrices over GF(2).
//!
//! Vectors multiply matrices from the left (`v · M`), matching the row-vector
//! convention used for `c = u · S · G`. A matrix is stored either densely (one
//! packed [`BitVec`] per row) or sparsely (sorted set positions per row); both
//! forms give identical products.

use std::fmt;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Gf2Error;

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length vector of bits packed into 64-bit words.
///
/// Bit `i` lives in word `i / 64` at bit position `i % 64`. Bits past `len`
/// in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVec {
            len,
            words: vec![!0; words_for(len)],
        };
        v.clear_tail();
        v
    }

    /// Unit vector with a single one at `pos`.
    pub fn unit(len: usize, pos: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(pos, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from 0/1 bytes; any nonzero byte is a one.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn random<R: rand::Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = BitVec {
            len,
            words: (0..words_for(len)).map(|_| rng.random::<u64>()).collect(),
        };
        v.clear_tail();
        v
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// Number of set bits.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// In-place XOR with another vector of the same length.
    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    /// Parity of the bitwise AND with `other`.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors with different lengths");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    pub fn hamming_distance(&self, other: &BitVec) -> usize {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Iterates over the positions of set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let tz = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// Copies `len` bits starting at `start` into a new vector.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        assert!(start + len <= self.len);
        let mut out = BitVec::zeros(len);
        if start.is_multiple_of(WORD) {
            let w0 = start / WORD;
            let nw = out.words.len();
            out.words.copy_from_slice(&self.words[w0..w0 + nw]);
            out.clear_tail();
        } else {
            for i in 0..len {
                if self.get(start + i) {
                    out.set(i, true);
                }
            }
        }
        out
    }

    /// Concatenates vectors end to end.
    pub fn concat<'a, I: IntoIterator<Item = &'a BitVec>>(parts: I) -> BitVec {
        let parts: Vec<&BitVec> = parts.into_iter().collect();
        let total = parts.iter().map(|p| p.len).sum();
        let mut out = BitVec::zeros(total);
        let mut offset = 0;
        for p in parts {
            out.write_at(offset, p);
            offset += p.len;
        }
        out
    }

    /// Overwrites bits `offset..offset + src.len()` with `src`.
    pub fn write_at(&mut self, offset: usize, src: &BitVec) {
        assert!(offset + src.len <= self.len);
        for i in 0..src.len {
            self.set(offset + i, src.get(i));
        }
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[{}](", self.len)?;
        for i in 0..self.len.min(128) {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        if self.len > 128 {
            f.write_str("...")?;
        }
        f.write_str(")")
    }
}

/// What a matrix stands for in the transmission chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixRole {
    Generator,
    ParityCheck,
    Scrambler,
    InverseScrambler,
    Generic,
}

#[derive(Clone, PartialEq, Eq)]
enum Storage {
    Dense(Vec<BitVec>),
    Sparse(Vec<Vec<usize>>),
}

/// A binary matrix with `rows × cols` entries.
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    storage: Storage,
    role: MatrixRole,
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Gf2Matrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("sparse", &self.is_sparse())
            .field("role", &self.role)
            .finish()
    }
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Gf2Matrix {
            rows,
            cols,
            storage: Storage::Dense(vec![BitVec::zeros(cols); rows]),
            role: MatrixRole::Generic,
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.set(i, i, true);
        }
        m
    }

    /// Dense matrix from packed rows. All rows must share one length.
    pub fn from_rows(rows: Vec<BitVec>) -> Result<Self, Gf2Error> {
        let cols = rows.first().map_or(0, BitVec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Gf2Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Gf2Matrix {
            rows: rows.len(),
            cols,
            storage: Storage::Dense(rows),
            role: MatrixRole::Generic,
        })
    }

    /// Sparse matrix from per-row lists of set column positions.
    pub fn from_sparse_rows(cols: usize, mut rows: Vec<Vec<usize>>) -> Result<Self, Gf2Error> {
        for row in rows.iter_mut() {
            row.sort_unstable();
            row.dedup();
            if let Some(&last) = row.last() {
                if last >= cols {
                    return Err(Gf2Error::IndexOutOfRange { index: last, bound: cols });
                }
            }
        }
        Ok(Gf2Matrix {
            rows: rows.len(),
            cols,
            storage: Storage::Sparse(rows),
            role: MatrixRole::Generic,
        })
    }

    /// Builds a matrix from a 0/1 table given row by row.
    pub fn from_table(table: &[&[u8]]) -> Result<Self, Gf2Error> {
        Self::from_rows(table.iter().map(|r| BitVec::from_bits(r)).collect())
    }

    pub fn with_role(mut self, role: MatrixRole) -> Self {
        self.role = role;
        self
    }

    pub fn role(&self) -> MatrixRole {
        self.role
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        match &self.storage {
            Storage::Dense(rows) => rows[r].get(c),
            Storage::Sparse(rows) => rows[r].binary_search(&c).is_ok(),
        }
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        match &mut self.storage {
            Storage::Dense(rows) => rows[r].set(c, value),
            Storage::Sparse(rows) => match (rows[r].binary_search(&c), value) {
                (Ok(pos), false) => {
                    rows[r].remove(pos);
                }
                (Err(pos), true) => rows[r].insert(pos, c),
                _ => {}
            },
        }
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        let v = self.get(r, c);
        self.set(r, c, !v);
    }

    /// Row `r` as a packed vector.
    pub fn row(&self, r: usize) -> BitVec {
        match &self.storage {
            Storage::Dense(rows) => rows[r].clone(),
            Storage::Sparse(rows) => {
                let mut v = BitVec::zeros(self.cols);
                for &c in &rows[r] {
                    v.set(c, true);
                }
                v
            }
        }
    }

    /// Set column positions of row `r`.
    pub fn row_support(&self, r: usize) -> Vec<usize> {
        match &self.storage {
            Storage::Dense(rows) => rows[r].iter_ones().collect(),
            Storage::Sparse(rows) => rows[r].clone(),
        }
    }

    pub fn row_weights(&self) -> Vec<usize> {
        match &self.storage {
            Storage::Dense(rows) => rows.iter().map(BitVec::weight).collect(),
            Storage::Sparse(rows) => rows.iter().map(Vec::len).collect(),
        }
    }

    pub fn col_weights(&self) -> Vec<usize> {
        let mut w = vec![0usize; self.cols];
        for r in 0..self.rows {
            for c in self.row_support(r) {
                w[c] += 1;
            }
        }
        w
    }

    /// Total number of ones.
    pub fn ones(&self) -> usize {
        self.row_weights().iter().sum()
    }

    pub fn density(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        self.ones() as f64 / (self.rows as f64 * self.cols as f64)
    }

    pub fn to_dense(&self) -> Gf2Matrix {
        let rows = (0..self.rows).map(|r| self.row(r)).collect();
        Gf2Matrix {
            rows: self.rows,
            cols: self.cols,
            storage: Storage::Dense(rows),
            role: self.role,
        }
    }

    pub fn to_sparse(&self) -> Gf2Matrix {
        let rows = (0..self.rows).map(|r| self.row_support(r)).collect();
        Gf2Matrix {
            rows: self.rows,
            cols: self.cols,
            storage: Storage::Sparse(rows),
            role: self.role,
        }
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = vec![Vec::new(); self.cols];
        for r in 0..self.rows {
            for c in self.row_support(r) {
                t[c].push(r);
            }
        }
        let sparse = Gf2Matrix {
            rows: self.cols,
            cols: self.rows,
            storage: Storage::Sparse(t),
            role: MatrixRole::Generic,
        };
        if self.is_sparse() {
            sparse
        } else {
            sparse.to_dense()
        }
    }

    /// Row-vector product `v · M`.
    ///
    /// Bit `j` of the result is the parity of `v AND column j`.
    pub fn mat_vec(&self, v: &BitVec) -> Result<BitVec, Gf2Error> {
        if v.len() != self.rows {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.rows,
                found: v.len(),
            });
        }
        let mut out = BitVec::zeros(self.cols);
        match &self.storage {
            Storage::Dense(rows) => {
                for i in v.iter_ones() {
                    out.xor_assign(&rows[i]);
                }
            }
            Storage::Sparse(rows) => {
                for i in v.iter_ones() {
                    for &c in &rows[i] {
                        out.flip(c);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Gf2Matrix) -> Result<Gf2Matrix, Gf2Error> {
        if self.cols != other.rows {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let dense_other = if other.is_sparse() { other.to_dense() } else { other.clone() };
        let rows = (0..self.rows)
            .map(|r| dense_other.mat_vec(&self.row(r)))
            .collect::<Result<Vec<_>, _>>()?;
        Gf2Matrix::from_rows(rows).map(|m| Gf2Matrix { cols: other.cols, ..m })
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| {
                let s = self.row_support(r);
                s.len() == 1 && s[0] == r
            })
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<BitVec> = (0..self.rows).map(|r| self.row(r)).collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(c)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(c) {
                    row.xor_assign(&pivot);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Inverse by Gauss–Jordan elimination.
    ///
    /// Returns `Ok(None)` when the matrix is square but singular.
    pub fn invert(&self) -> Result<Option<Gf2Matrix>, Gf2Error> {
        if self.rows != self.cols {
            return Err(Gf2Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a: Vec<BitVec> = (0..n).map(|r| self.row(r)).collect();
        let mut inv: Vec<BitVec> = (0..n).map(|r| BitVec::unit(n, r)).collect();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| a[r].get(c)) else {
                return Ok(None);
            };
            a.swap(c, p);
            inv.swap(c, p);
            let (pa, pi) = (a[c].clone(), inv[c].clone());
            for r in 0..n {
                if r != c && a[r].get(c) {
                    a[r].xor_assign(&pa);
                    inv[r].xor_assign(&pi);
                }
            }
        }
        let role = match self.role {
            MatrixRole::Scrambler => MatrixRole::InverseScrambler,
            MatrixRole::InverseScrambler => MatrixRole::Scrambler,
            other => other,
        };
        Ok(Some(Gf2Matrix::from_rows(inv)?.with_role(role)))
    }

    /// Random `k × k` matrix whose every column holds exactly `w` ones.
    ///
    /// Each column draws `w` distinct row indices independently. The result
    /// may be singular.
    pub fn random_regular(k: usize, w: usize, seed: u64) -> Result<Gf2Matrix, Gf2Error> {
        if w == 0 || w > k {
            return Err(Gf2Error::WeightOutOfRange { weight: w, size: k });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Gf2Matrix::zeros(k, k);
        for c in 0..k {
            for r in sample(&mut rng, k, w) {
                m.set(r, c, true);
            }
        }
        Ok(m)
    }

    /// Hex dump: a `rows cols` line followed by one hex line per row.
    ///
    /// Row bits are grouped into nibbles from column 0, most significant bit
    /// first; a trailing partial nibble is padded with zeros.
    pub fn to_hex(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            let row = self.row(r);
            let mut line = String::with_capacity(self.cols.div_ceil(4));
            for nib in 0..self.cols.div_ceil(4) {
                let mut v = 0u8;
                for b in 0..4 {
                    let c = nib * 4 + b;
                    if c < self.cols && row.get(c) {
                        v |= 8 >> b;
                    }
                }
                line.push(char::from_digit(v as u32, 16).unwrap());
            }
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    /// Parses the format written by [`Gf2Matrix::to_hex`] from an iterator of
    /// lines, consuming exactly the header plus `rows` lines.
    pub fn from_hex_lines<'a, I: Iterator<Item = &'a str>>(lines: &mut I) -> Result<Self, Gf2Error> {
        let header = lines.next().ok_or_else(|| Gf2Error::Parse("missing header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Gf2Error::Parse(format!("bad dimension {t:?}"))))
            .collect::<Result<_, _>>()?;
        let [rows, cols] = dims[..] else {
            return Err(Gf2Error::Parse(format!("expected `rows cols`, got {header:?}")));
        };
        let mut out = Vec::with_capacity(rows);
        for r in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Gf2Error::Parse(format!("missing row {r}")))?
                .trim();
            if line.len() != cols.div_ceil(4) {
                return Err(Gf2Error::Parse(format!(
                    "row {r}: expected {} hex digits, got {}",
                    cols.div_ceil(4),
                    line.len()
                )));
            }
            let mut v = BitVec::zeros(cols);
            for (nib, ch) in line.chars().enumerate() {
                let d = ch
                    .to_digit(16)
                    .ok_or_else(|| Gf2Error::Parse(format!("row {r}: bad hex digit {ch:?}")))?;
                for b in 0..4 {
                    let c = nib * 4 + b;
                    if d & (8 >> b) != 0 {
                        if c >= cols {
                            return Err(Gf2Error::Parse(format!("row {r}: padding bit set")));
                        }
                        v.set(c, true);
                    }
                }
            }
            out.push(v);
        }
        if rows == 0 {
            return Ok(Gf2Matrix::zeros(0, cols));
        }
        Gf2Matrix::from_rows(out)
    }

    pub fn from_hex(text: &str) -> Result<Self, Gf2Error> {
        Self::from_hex_lines(&mut text.lines())
    }
}
