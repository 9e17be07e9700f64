//! Binary primitive narrow-sense BCH codes with Berlekamp–Massey decoding.
//!
//! Bit `i` of a codeword is the coefficient of `x^(n-1-i)`, so the systematic
//! codeword `[u | p]` is `u(x)·x^(n-k) + (u(x)·x^(n-k) mod g(x))`.

use crate::codes::DecodeOutcome;
use crate::error::CodeError;
use crate::gf2::BitVec;

/// Primitive polynomials (bit `i` = coefficient of `x^i`) for m = 3..=12.
const PRIMITIVE_POLYS: [(u32, u32); 10] = [
    (3, 0x0b),
    (4, 0x13),
    (5, 0x25),
    (6, 0x43),
    (7, 0x89),
    (8, 0x11d),
    (9, 0x211),
    (10, 0x409),
    (11, 0x805),
    (12, 0x1053),
];

pub fn default_primitive_poly(m: u32) -> Option<u32> {
    PRIMITIVE_POLYS.iter().find(|(d, _)| *d == m).map(|&(_, p)| p)
}

/// GF(2^m) with log/antilog tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisField {
    m: u32,
    order: usize,
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl GaloisField {
    pub fn new(m: u32, poly: u32) -> Result<Self, CodeError> {
        if !(3..=12).contains(&m) {
            return Err(CodeError::UnsupportedField(m));
        }
        let order = (1usize << m) - 1;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u16; order + 1];
        let mut x = 1u32;
        for i in 0..order {
            exp[i] = x as u16;
            if i > 0 && x == 1 {
                return Err(CodeError::UnsupportedField(m));
            }
            log[x as usize] = i as u16;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            // not primitive
            return Err(CodeError::UnsupportedField(m));
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(GaloisField { m, order, exp, log })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Multiplicative order of the field, `2^m - 1`.
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn alpha_pow(&self, e: usize) -> u16 {
        self.exp[e % self.order]
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    #[inline]
    pub fn div(&self, a: u16, b: u16) -> u16 {
        assert!(b != 0, "division by zero in GF(2^m)");
        if a == 0 {
            0
        } else {
            let la = self.log[a as usize] as usize;
            let lb = self.log[b as usize] as usize;
            self.exp[la + self.order - lb]
        }
    }

    #[inline]
    pub fn log(&self, a: u16) -> usize {
        debug_assert!(a != 0);
        self.log[a as usize] as usize
    }
}

/// Cyclotomic coset of `i` modulo `n` under multiplication by 2.
fn coset(i: usize, n: usize) -> Vec<usize> {
    let mut out = vec![i];
    let mut c = (2 * i) % n;
    while c != i {
        out.push(c);
        c = (2 * c) % n;
    }
    out
}

/// Binary polynomial multiply; index = degree.
fn poly_mul(a: &[bool], b: &[bool]) -> Vec<bool> {
    let mut out = vec![false; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] ^= y;
            }
        }
    }
    out
}

/// Minimal polynomial of `α^i`, product of `(x - α^j)` over the coset of `i`.
fn minimal_poly(field: &GaloisField, i: usize) -> Vec<bool> {
    let mut p: Vec<u16> = vec![1];
    for j in coset(i, field.order()) {
        let root = field.alpha_pow(j);
        let mut next = vec![0u16; p.len() + 1];
        for (d, &c) in p.iter().enumerate() {
            next[d + 1] ^= c;
            next[d] ^= field.mul(c, root);
        }
        p = next;
    }
    p.iter()
        .map(|&c| {
            debug_assert!(c <= 1, "minimal polynomial must be binary");
            c == 1
        })
        .collect()
}

/// Dimension of the narrow-sense BCH code of length `2^m - 1` for each `t`.
pub fn dimension_table(m: u32) -> Vec<(usize, usize)> {
    let n = (1usize << m) - 1;
    let mut covered = vec![false; n];
    let mut count = 0;
    let mut out = Vec::new();
    for t in 1..=n / 2 {
        for i in [2 * t - 1, 2 * t] {
            let i = i % n;
            if !covered[i] {
                for j in coset(i, n) {
                    covered[j] = true;
                    count += 1;
                }
            }
        }
        let k = n - count;
        if k == 0 {
            break;
        }
        out.push((t, k));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct BchCode {
    n: usize,
    k: usize,
    t: usize,
    field: GaloisField,
    /// Generator coefficients, index = degree, length `n - k + 1`.
    generator: Vec<bool>,
    /// Generator without its leading term, packed (bit `d` = coefficient of `x^d`).
    gen_low: BitVec,
}

impl BchCode {
    /// Narrow-sense BCH code of length `2^m - 1` and dimension `k`, using the
    /// default primitive polynomial. `t` is the largest designed radius that
    /// still yields dimension `k`.
    pub fn build(m: u32, k: usize) -> Result<Self, CodeError> {
        let poly = default_primitive_poly(m).ok_or(CodeError::UnsupportedField(m))?;
        Self::build_with_poly(m, k, poly)
    }

    pub fn build_with_poly(m: u32, k: usize, poly: u32) -> Result<Self, CodeError> {
        let field = GaloisField::new(m, poly)?;
        let n = field.order();
        let table = dimension_table(m);
        let Some(&(t, _)) = table.iter().rev().find(|&&(_, kk)| kk == k) else {
            let mut dims: Vec<usize> = table.iter().map(|&(_, kk)| kk).collect();
            dims.dedup();
            dims.sort_by_key(|&d| d.abs_diff(k));
            dims.truncate(6);
            dims.sort_unstable();
            return Err(CodeError::NoSuchBchCode { n, k, nearby: dims });
        };
        let mut covered = vec![false; n];
        let mut generator = vec![true];
        for i in 1..=2 * t {
            if !covered[i % n] {
                for j in coset(i % n, n) {
                    covered[j] = true;
                }
                generator = poly_mul(&generator, &minimal_poly(&field, i % n));
            }
        }
        let r = generator.len() - 1;
        debug_assert_eq!(r, n - k);
        let mut gen_low = BitVec::zeros(r);
        for (d, &c) in generator[..r].iter().enumerate() {
            gen_low.set(d, c);
        }
        Ok(BchCode {
            n,
            k,
            t,
            field,
            generator,
            gen_low,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn m(&self) -> u32 {
        self.field.m()
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    /// Generator polynomial coefficients, index = degree.
    pub fn generator(&self) -> &[bool] {
        &self.generator
    }

    /// Remainder of the polynomial whose coefficients are `bits`, highest
    /// degree first, modulo `g(x)`. Returned with bit `d` = coefficient of `x^d`.
    fn remainder_of(&self, bits: impl Iterator<Item = bool>) -> BitVec {
        let r = self.n - self.k;
        let mut reg = BitVec::zeros(r);
        for b in bits {
            let fb = reg.get(r - 1);
            shift_up(&mut reg);
            if b {
                reg.flip(0);
            }
            if fb {
                reg.xor_assign(&self.gen_low);
            }
        }
        reg
    }

    /// Systematic encoding `[u | parity]`.
    pub fn encode(&self, u: &BitVec) -> Result<BitVec, CodeError> {
        if u.len() != self.k {
            return Err(CodeError::LengthMismatch {
                expected: self.k,
                found: u.len(),
            });
        }
        let r = self.n - self.k;
        // LFSR form of u(x)·x^r mod g(x)
        let mut reg = BitVec::zeros(r);
        for i in 0..self.k {
            let fb = reg.get(r - 1) ^ u.get(i);
            shift_up(&mut reg);
            if fb {
                reg.xor_assign(&self.gen_low);
            }
        }
        let mut c = BitVec::zeros(self.n);
        c.write_at(0, u);
        for j in 0..r {
            if reg.get(r - 1 - j) {
                c.set(self.k + j, true);
            }
        }
        Ok(c)
    }

    /// True when `c(x)` is divisible by `g(x)`.
    pub fn is_codeword(&self, c: &BitVec) -> bool {
        c.len() == self.n && self.remainder_of((0..self.n).map(|i| c.get(i))).is_zero()
    }

    /// Syndromes `S_1 .. S_2t` of a received word.
    pub fn syndromes(&self, r: &BitVec) -> Vec<u16> {
        let n = self.n;
        let mut s = vec![0u16; 2 * self.t + 1];
        for j in (1..=2 * self.t).step_by(2) {
            let mut acc = 0u16;
            for i in r.iter_ones() {
                acc ^= self.field.alpha_pow(j * (n - 1 - i));
            }
            s[j] = acc;
        }
        for j in (2..=2 * self.t).step_by(2) {
            s[j] = self.field.mul(s[j / 2], s[j / 2]);
        }
        s.remove(0);
        s
    }

    /// Bounded-distance hard-decision decoding.
    ///
    /// On failure (no error locator of degree ≤ t whose roots all lie among
    /// the code positions) the first `k` received bits are returned
    /// unmodified with `success = false`.
    pub fn decode(&self, hard: &BitVec) -> Result<DecodeOutcome, CodeError> {
        if hard.len() != self.n {
            return Err(CodeError::LengthMismatch {
                expected: self.n,
                found: hard.len(),
            });
        }
        let failure = || DecodeOutcome {
            message: hard.slice(0, self.k),
            codeword: hard.clone(),
            success: false,
            iterations: 0,
            corrected: 0,
        };
        let synd = self.syndromes(hard);
        if synd.iter().all(|&s| s == 0) {
            return Ok(DecodeOutcome {
                message: hard.slice(0, self.k),
                codeword: hard.clone(),
                success: true,
                iterations: 0,
                corrected: 0,
            });
        }
        let locator = berlekamp_massey(&self.field, &synd);
        let degree = locator.len() - 1;
        if degree > self.t {
            return Ok(failure());
        }
        let positions = self.chien_search(&locator);
        if positions.len() != degree {
            return Ok(failure());
        }
        let mut codeword = hard.clone();
        for &p in &positions {
            codeword.flip(p);
        }
        Ok(DecodeOutcome {
            message: codeword.slice(0, self.k),
            codeword,
            success: true,
            iterations: 0,
            corrected: degree,
        })
    }

    /// Codeword positions `i` whose locator `α^(n-1-i)` is the inverse of a
    /// root of `locator`.
    fn chien_search(&self, locator: &[u16]) -> Vec<usize> {
        let n = self.n;
        let f = &self.field;
        // term_j = λ_j · α^(-j·e), stepped over e = 0, 1, ...
        let mut terms: Vec<u16> = locator.to_vec();
        let steps: Vec<usize> = (0..locator.len()).map(|j| (n - (j % n)) % n).collect();
        let mut found = Vec::new();
        for e in 0..n {
            let sum = terms.iter().fold(0u16, |a, &b| a ^ b);
            if sum == 0 {
                found.push(n - 1 - e);
                if found.len() == locator.len() - 1 {
                    break;
                }
            }
            for (j, term) in terms.iter_mut().enumerate().skip(1) {
                if *term != 0 {
                    *term = f.alpha_pow(f.log(*term) + steps[j]);
                }
            }
        }
        found
    }
}

/// Shifts a packed polynomial up by one degree, dropping the top bit.
fn shift_up(reg: &mut BitVec) {
    let len = reg.len();
    let mut out = BitVec::zeros(len);
    for i in reg.iter_ones() {
        if i + 1 < len {
            out.set(i + 1, true);
        }
    }
    *reg = out;
}

/// Berlekamp–Massey over GF(2^m); returns the connection polynomial
/// `Λ(x) = 1 + λ_1 x + …` trimmed to its degree `L`.
fn berlekamp_massey(f: &GaloisField, synd: &[u16]) -> Vec<u16> {
    let two_t = synd.len();
    let mut c = vec![0u16; two_t + 1];
    let mut b = vec![0u16; two_t + 1];
    c[0] = 1;
    b[0] = 1;
    let mut l = 0usize;
    let mut shift = 1usize;
    let mut last_d = 1u16;
    for step in 0..two_t {
        let mut d = synd[step];
        for i in 1..=l {
            d ^= f.mul(c[i], synd[step - i]);
        }
        if d == 0 {
            shift += 1;
            continue;
        }
        let coef = f.div(d, last_d);
        let prev = c.clone();
        for i in 0..=two_t - shift {
            if b[i] != 0 {
                c[i + shift] ^= f.mul(coef, b[i]);
            }
        }
        if 2 * l <= step {
            l = step + 1 - l;
            b = prev;
            last_d = d;
            shift = 1;
        } else {
            shift += 1;
        }
    }
    c.truncate(l + 1);
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::index::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Schoolbook remainder of `bits` (highest degree first) by `g`.
    fn long_division(bits: &[bool], g: &[bool]) -> Vec<bool> {
        // work with index = degree
        let deg = bits.len() - 1;
        let mut p: Vec<bool> = (0..=deg).map(|d| bits[deg - d]).collect();
        let dg = g.len() - 1;
        for d in (dg..=deg).rev() {
            if p[d] {
                for (j, &gj) in g.iter().enumerate() {
                    p[d - dg + j] ^= gj;
                }
            }
        }
        p.truncate(dg);
        p
    }

    #[test]
    fn bch_15_7() {
        let code = BchCode::build(4, 7).unwrap();
        assert_eq!((code.n(), code.k(), code.t()), (15, 7, 2));
        // g(x) = x^8 + x^7 + x^6 + x^4 + 1
        let g: Vec<bool> = [1, 0, 0, 0, 1, 0, 1, 1, 1].iter().map(|&b| b == 1).collect();
        assert_eq!(code.generator(), g.as_slice());
    }

    #[test]
    fn reference_code_radii() {
        let c = BchCode::build(9, 385).unwrap();
        assert_eq!((c.n(), c.t()), (511, 14));
        let c = BchCode::build(11, 1541).unwrap();
        assert_eq!((c.n(), c.t()), (2047, 47));
        let c = BchCode::build(9, 220).unwrap();
        assert_eq!(c.t(), 39);
        let c = BchCode::build(11, 881).unwrap();
        assert_eq!(c.t(), 122);
    }

    #[test]
    fn missing_dimension_lists_neighbours() {
        match BchCode::build(4, 8) {
            Err(CodeError::NoSuchBchCode { n: 15, k: 8, nearby }) => {
                assert!(nearby.contains(&7) && nearby.contains(&11));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(BchCode::build(2, 1), Err(CodeError::UnsupportedField(2))));
    }

    #[test]
    fn encode_matches_long_division() {
        let code = BchCode::build(4, 7).unwrap();
        for msg in 0u32..128 {
            let u = BitVec::from_bools(&(0..7).map(|i| msg >> (6 - i) & 1 == 1).collect::<Vec<_>>());
            let c = code.encode(&u).unwrap();
            let mut shifted: Vec<bool> = u.to_bools();
            shifted.extend(std::iter::repeat_n(false, 8));
            let rem = long_division(&shifted, code.generator());
            // parity position k + j holds degree r-1-j
            for j in 0..8 {
                assert_eq!(c.get(7 + j), rem[7 - j]);
            }
            assert!(code.is_codeword(&c));
            assert!(long_division(&c.to_bools(), code.generator()).iter().all(|&b| !b));
        }
        assert!(code.encode(&BitVec::zeros(7)).unwrap().is_zero());
        assert!(code.encode(&BitVec::zeros(6)).is_err());
    }

    /// Exhaustive syndrome decoder for (15,7): every pattern of weight ≤ 2
    /// has a distinct remainder; any other remainder is a decoding failure.
    #[test]
    fn exhaustive_15_7_against_syndrome_table() {
        let code = BchCode::build(4, 7).unwrap();
        let g = code.generator().to_vec();
        let rem = |e: &[bool]| long_division(e, &g);
        let mut table = std::collections::HashMap::new();
        table.insert(rem(&[false; 15]), vec![]);
        for a in 0..15 {
            let mut e = [false; 15];
            e[a] = true;
            table.insert(rem(&e), vec![a]);
            for b in a + 1..15 {
                let mut e2 = e;
                e2[b] = true;
                assert!(table.insert(rem(&e2), vec![a, b]).is_none());
            }
        }
        assert_eq!(table.len(), 1 + 15 + 105);

        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let mut checked = 0;
        for w in 0..=3usize {
            for pattern in 0u32..(1 << 15) {
                if pattern.count_ones() as usize != w {
                    continue;
                }
                let u = BitVec::random(7, &mut rng);
                let c = code.encode(&u).unwrap();
                let mut r = c.clone();
                let e: Vec<bool> = (0..15).map(|i| pattern >> i & 1 == 1).collect();
                for (i, &b) in e.iter().enumerate() {
                    if b {
                        r.flip(i);
                    }
                }
                let out = code.decode(&r).unwrap();
                match table.get(&rem(&e)) {
                    Some(leader) => {
                        assert!(out.success, "pattern {pattern:#x}");
                        let mut expected = r.clone();
                        for &p in leader {
                            expected.flip(p);
                        }
                        assert_eq!(out.codeword, expected);
                        assert_eq!(out.corrected, leader.len());
                        if w <= 2 {
                            assert_eq!(out.message, u);
                        }
                    }
                    None => {
                        assert!(!out.success, "pattern {pattern:#x}");
                        assert_eq!(out.message, r.slice(0, 7));
                    }
                }
                checked += 1;
            }
        }
        assert_eq!(checked, 1 + 15 + 105 + 455);
    }

    #[test]
    fn corrects_t_errors_511() {
        let code = BchCode::build(9, 385).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(511);
        for trial in 0..50 {
            let u = BitVec::random(385, &mut rng);
            let c = code.encode(&u).unwrap();
            assert!(code.is_codeword(&c));
            let w = trial % 15;
            let mut r = c.clone();
            for p in sample(&mut rng, 511, w) {
                r.flip(p);
            }
            let out = code.decode(&r).unwrap();
            assert!(out.success);
            assert_eq!(out.corrected, w);
            assert_eq!(out.message, u);
            // idempotent on the corrected word
            let again = code.decode(&out.codeword).unwrap();
            assert!(again.success && again.corrected == 0);
        }
    }

    #[test]
    fn failure_returns_received_prefix() {
        let code = BchCode::build(9, 385).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut failures = 0;
        for _ in 0..20 {
            let u = BitVec::random(385, &mut rng);
            let mut r = code.encode(&u).unwrap();
            for p in sample(&mut rng, 511, 40) {
                r.flip(p);
            }
            let out = code.decode(&r).unwrap();
            if !out.success {
                failures += 1;
                assert_eq!(out.message, r.slice(0, 385));
            }
        }
        assert!(failures >= 18);
    }

    #[test]
    fn long_code_2047() {
        let code = BchCode::build(11, 1541).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2047);
        let u = BitVec::random(1541, &mut rng);
        let c = code.encode(&u).unwrap();
        let mut r = c.clone();
        for p in sample(&mut rng, 2047, 47) {
            r.flip(p);
        }
        let out = code.decode(&r).unwrap();
        assert!(out.success && out.message == u && out.corrected == 47);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn within_radius_always_recovers(seed in any::<u64>(), w in 0usize..=14) {
            let code = BchCode::build(9, 385).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = BitVec::random(385, &mut rng);
            let mut r = code.encode(&u).unwrap();
            for p in sample(&mut rng, 511, w) {
                r.flip(p);
            }
            let out = code.decode(&r).unwrap();
            prop_assert!(out.success);
            prop_assert!(out.corrected <= code.t());
            prop_assert_eq!(out.message, u);
        }
    }
}
