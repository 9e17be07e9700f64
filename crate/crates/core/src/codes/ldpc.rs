//! LDPC codes: PEG construction with a lower-triangular parity part,
//! back-substitution encoding and flooding sum-product decoding.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::codes::DecodeOutcome;
use crate::error::CodeError;
use crate::gf2::{BitVec, Gf2Matrix, MatrixRole};

pub const DEFAULT_MAX_ITERATIONS: usize = 50;
/// Magnitude bound applied to every message.
pub const LLR_CLIP: f64 = 30.0;

/// Variable-node degrees, split into information columns `0..k` and parity
/// columns `k..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    pub info: Vec<usize>,
    pub parity: Vec<usize>,
}

impl DegreeProfile {
    /// Every column of degree `dv`, parity columns capped by the rows
    /// available below their diagonal.
    pub fn regular(n: usize, k: usize, dv: usize) -> Result<Self, CodeError> {
        Self::with_average(n, k, dv, dv as f64)
    }

    /// Parity columns of degree `parity_degree` (capped near the end of the
    /// triangle), information columns filling the remaining edges so that
    /// the overall average is as close as possible to `average`.
    pub fn with_average(
        n: usize,
        k: usize,
        parity_degree: usize,
        average: f64,
    ) -> Result<Self, CodeError> {
        if k >= n || k == 0 {
            return Err(CodeError::InfeasibleProfile(format!("need 0 < k < n, got n={n} k={k}")));
        }
        let m = n - k;
        let parity: Vec<usize> = (0..m).map(|j| parity_degree.min(m - j).max(1)).collect();
        let total = (average * n as f64).round() as usize;
        let parity_edges: usize = parity.iter().sum();
        if total <= parity_edges + k {
            return Err(CodeError::InfeasibleProfile(format!(
                "average {average} leaves fewer than one edge per information column"
            )));
        }
        let rest = total - parity_edges;
        let base = rest / k;
        let extra = rest % k;
        let info: Vec<usize> = (0..k)
            .map(|i| base + usize::from((i + 1) * extra / k > i * extra / k))
            .collect();
        let profile = DegreeProfile { info, parity };
        profile.validate(n, k)?;
        Ok(profile)
    }

    pub fn edges(&self) -> usize {
        self.info.iter().sum::<usize>() + self.parity.iter().sum::<usize>()
    }

    pub fn average(&self) -> f64 {
        self.edges() as f64 / (self.info.len() + self.parity.len()) as f64
    }

    fn validate(&self, n: usize, k: usize) -> Result<(), CodeError> {
        if self.info.len() != k || self.parity.len() + k != n {
            return Err(CodeError::InfeasibleProfile(format!(
                "profile has {}+{} columns, code needs {k}+{}",
                self.info.len(),
                self.parity.len(),
                n - k
            )));
        }
        let m = n - k;
        if let Some(i) = self.info.iter().position(|&d| d == 0 || d > m) {
            return Err(CodeError::InfeasibleProfile(format!(
                "information column {i} has degree {} (allowed 1..={m})",
                self.info[i]
            )));
        }
        if let Some(j) = (0..m).find(|&j| self.parity[j] == 0 || self.parity[j] > m - j) {
            return Err(CodeError::InfeasibleProfile(format!(
                "parity column {j} has degree {} (allowed 1..={})",
                self.parity[j],
                m - j
            )));
        }
        Ok(())
    }
}

/// Progressive edge growth on an `(n-k) × n` Tanner graph. Parity column `j`
/// always contains row `j` and only rows `≥ j`, so the parity part of `H` is
/// lower triangular with a unit diagonal.
pub fn peg_construct(
    n: usize,
    k: usize,
    profile: &DegreeProfile,
    seed: u64,
) -> Result<Gf2Matrix, CodeError> {
    peg_impl(n, k, profile, seed, false)
}

/// PEG variant for codes whose information bits are punctured: each
/// information column gets one check of its own (no other information
/// neighbour), so every punctured bit is recoverable after one iteration.
/// Remaining information edges avoid those checks. Needs `n - k >= k`.
pub fn peg_construct_recoverable(
    n: usize,
    k: usize,
    profile: &DegreeProfile,
    seed: u64,
) -> Result<Gf2Matrix, CodeError> {
    if n - k.min(n) < k {
        return Err(CodeError::InfeasibleProfile(format!(
            "{} checks cannot give {k} information columns a check each",
            n - k.min(n)
        )));
    }
    peg_impl(n, k, profile, seed, true)
}

fn peg_impl(
    n: usize,
    k: usize,
    profile: &DegreeProfile,
    seed: u64,
    recoverable: bool,
) -> Result<Gf2Matrix, CodeError> {
    profile.validate(n, k)?;
    let m = n - k;
    let degree = |v: usize| if v < k { profile.info[v] } else { profile.parity[v - k] };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rank: Vec<u32> = (0..m as u32).collect();
    rank.shuffle(&mut rng);

    let mut var_adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut check_adj: Vec<Vec<u32>> = vec![Vec::new(); m];
    let mut check_mark = vec![0u32; m];
    let mut var_mark = vec![0u32; n];
    let mut epoch = 0u32;

    let mut order: Vec<usize> = (0..n).collect();
    // constrained parity columns first, most constrained first
    order.sort_by_key(|&v| (degree(v), v < k, std::cmp::Reverse(v)));

    // recoverable mode: information column v owns check dedicated[v]
    let mut owned = vec![false; m];
    let mut dedicated = Vec::new();
    if recoverable {
        let mut by_rank: Vec<usize> = (0..m).collect();
        by_rank.sort_by_key(|&c| rank[c]);
        dedicated = by_rank[..k].to_vec();
        for &c in &dedicated {
            owned[c] = true;
        }
    }
    let pick = |cands: &mut dyn Iterator<Item = usize>, check_adj: &[Vec<u32>]| -> Option<usize> {
        cands.min_by_key(|&c| (check_adj[c].len(), rank[c]))
    };
    let infeasible = |v: usize| {
        CodeError::InfeasibleProfile(format!("no admissible check left for column {v}"))
    };

    for &v in &order {
        let lo = v.saturating_sub(k);
        let restricted = recoverable && v < k;
        let admissible = |c: usize, owned: &[bool]| c >= lo && !(restricted && owned[c]);
        let allowed_total = (lo..m).filter(|&c| admissible(c, &owned)).count();
        for edge in 0..degree(v) {
            let chosen = if v >= k && edge == 0 {
                lo
            } else if restricted && edge == 0 {
                dedicated[v]
            } else if var_adj[v].is_empty() {
                pick(&mut (lo..m).filter(|&c| admissible(c, &owned)), &check_adj)
                    .ok_or_else(|| infeasible(v))?
            } else {
                epoch += 1;
                var_mark[v] = epoch;
                let mut frontier: Vec<u32> = Vec::new();
                let mut reached_allowed = 0;
                for &c in &var_adj[v] {
                    check_mark[c as usize] = epoch;
                    frontier.push(c);
                    if admissible(c as usize, &owned) {
                        reached_allowed += 1;
                    }
                }
                loop {
                    let mut newly: Vec<u32> = Vec::new();
                    for &c in &frontier {
                        for &u in &check_adj[c as usize] {
                            if var_mark[u as usize] == epoch {
                                continue;
                            }
                            var_mark[u as usize] = epoch;
                            for &c2 in &var_adj[u as usize] {
                                if check_mark[c2 as usize] != epoch {
                                    check_mark[c2 as usize] = epoch;
                                    newly.push(c2);
                                }
                            }
                        }
                    }
                    if newly.is_empty() {
                        let marks = &check_mark;
                        break pick(
                            &mut (lo..m).filter(|&c| marks[c] != epoch && admissible(c, &owned)),
                            &check_adj,
                        )
                        .ok_or_else(|| infeasible(v))?;
                    }
                    let fresh = newly.iter().filter(|&&c| admissible(c as usize, &owned)).count();
                    if reached_allowed + fresh == allowed_total {
                        break pick(
                            &mut newly
                                .iter()
                                .map(|&c| c as usize)
                                .filter(|&c| admissible(c, &owned)),
                            &check_adj,
                        )
                        .ok_or_else(|| infeasible(v))?;
                    }
                    reached_allowed += fresh;
                    frontier = newly;
                }
            };
            debug_assert!(!var_adj[v].contains(&(chosen as u32)));
            var_adj[v].push(chosen as u32);
            check_adj[chosen].push(v as u32);
        }
    }

    let rows: Vec<Vec<usize>> = check_adj
        .into_iter()
        .map(|r| r.into_iter().map(|v| v as usize).collect())
        .collect();
    Ok(Gf2Matrix::from_sparse_rows(n, rows)?.with_role(MatrixRole::ParityCheck))
}

/// Tanner-graph code with flattened adjacency for message passing.
#[derive(Debug, Clone)]
pub struct LdpcCode {
    n: usize,
    k: usize,
    h: Gf2Matrix,
    max_iterations: usize,
    /// Edge ranges per check; edges are numbered in check order.
    check_ptr: Vec<usize>,
    edge_var: Vec<u32>,
    /// Edge lists per variable.
    var_ptr: Vec<usize>,
    var_edges: Vec<u32>,
    triangular: bool,
}

impl LdpcCode {
    /// Wraps a parity-check matrix, assumed full rank, so `k = n - rows`.
    pub fn from_parity_check(h: Gf2Matrix) -> Result<Self, CodeError> {
        let n = h.cols();
        let m = h.rows();
        if m == 0 || m >= n {
            return Err(CodeError::InfeasibleProfile(format!("parity-check matrix is {m} x {n}")));
        }
        let k = n - m;
        let h = h.to_sparse().with_role(MatrixRole::ParityCheck);
        let mut check_ptr = Vec::with_capacity(m + 1);
        let mut edge_var = Vec::with_capacity(h.ones());
        check_ptr.push(0);
        let mut triangular = true;
        for r in 0..m {
            let support = h.row_support(r);
            let diag = k + r;
            triangular &= support.contains(&diag) && support.iter().all(|&c| c <= diag);
            edge_var.extend(support.iter().map(|&c| c as u32));
            check_ptr.push(edge_var.len());
        }
        let mut counts = vec![0usize; n];
        for &v in &edge_var {
            counts[v as usize] += 1;
        }
        let mut var_ptr = Vec::with_capacity(n + 1);
        var_ptr.push(0);
        for &c in &counts {
            var_ptr.push(var_ptr.last().unwrap() + c);
        }
        let mut fill = var_ptr[..n].to_vec();
        let mut var_edges = vec![0u32; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[fill[v as usize]] = e as u32;
            fill[v as usize] += 1;
        }
        Ok(LdpcCode {
            n,
            k,
            h,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            check_ptr,
            edge_var,
            var_ptr,
            var_edges,
            triangular,
        })
    }

    pub fn peg(n: usize, k: usize, profile: &DegreeProfile, seed: u64) -> Result<Self, CodeError> {
        Self::from_parity_check(peg_construct(n, k, profile, seed)?)
    }

    /// PEG code intended for information puncturing.
    pub fn peg_recoverable(
        n: usize,
        k: usize,
        profile: &DegreeProfile,
        seed: u64,
    ) -> Result<Self, CodeError> {
        Self::from_parity_check(peg_construct_recoverable(n, k, profile, seed)?)
    }

    pub fn with_max_iterations(mut self, iterations: usize) -> Self {
        self.max_iterations = iterations.max(1);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    pub fn parity_check(&self) -> &Gf2Matrix {
        &self.h
    }

    pub fn edges(&self) -> usize {
        self.edge_var.len()
    }

    pub fn average_variable_degree(&self) -> f64 {
        self.edges() as f64 / self.n as f64
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.triangular
    }

    /// Variable indices attached to check `c`.
    pub fn check_vars(&self, c: usize) -> &[u32] {
        &self.edge_var[self.check_ptr[c]..self.check_ptr[c + 1]]
    }

    pub fn syndrome_is_zero(&self, word: &BitVec) -> bool {
        word.len() == self.n && self.zero_syndrome_bits(|v| word.get(v))
    }

    fn zero_syndrome_bits(&self, bit: impl Fn(usize) -> bool) -> bool {
        (0..self.n - self.k).all(|c| {
            !self
                .check_vars(c)
                .iter()
                .fold(false, |acc, &v| acc ^ bit(v as usize))
        })
    }

    /// Back-substitution encoding; returns the codeword and the number of
    /// bit accumulations performed.
    pub fn encode_counted(&self, u: &BitVec) -> Result<(BitVec, usize), CodeError> {
        if !self.triangular {
            return Err(CodeError::NotTriangular);
        }
        if u.len() != self.k {
            return Err(CodeError::LengthMismatch {
                expected: self.k,
                found: u.len(),
            });
        }
        let mut c = BitVec::zeros(self.n);
        c.write_at(0, u);
        let mut ops = 0;
        for r in 0..self.n - self.k {
            let diag = self.k + r;
            let mut acc = false;
            for &v in self.check_vars(r) {
                let v = v as usize;
                if v != diag {
                    acc ^= c.get(v);
                    ops += 1;
                }
            }
            c.set(diag, acc);
        }
        Ok((c, ops))
    }

    pub fn encode(&self, u: &BitVec) -> Result<BitVec, CodeError> {
        self.encode_counted(u).map(|(c, _)| c)
    }

    pub fn decode(&self, llr: &[f64]) -> Result<DecodeOutcome, CodeError> {
        self.decode_with(llr, self.max_iterations)
    }

    /// Flooding sum-product decoding on LLRs (positive favours 0).
    ///
    /// Messages are carried as likelihood ratios `e^(-L)`, which turns the
    /// tanh rule into `t = (1-ρ)/(1+ρ)` and the variable update into
    /// products, so no transcendental function is evaluated per iteration.
    /// Clipping `|L| ≤ 30` becomes `ρ ∈ [e^-30, e^30]`.
    pub fn decode_with(&self, llr: &[f64], max_iterations: usize) -> Result<DecodeOutcome, CodeError> {
        if llr.len() != self.n {
            return Err(CodeError::LengthMismatch {
                expected: self.n,
                found: llr.len(),
            });
        }
        let n = self.n;
        let m = self.n - self.k;
        let edges = self.edge_var.len();
        let hi = LLR_CLIP.exp();
        let lo = 1.0 / hi;
        let channel: Vec<f64> = llr
            .iter()
            .map(|&l| (-l.clamp(-LLR_CLIP, LLR_CLIP)).exp())
            .collect();
        let mut hard: Vec<bool> = llr.iter().map(|&l| l < 0.0).collect();
        // variable-to-check ratios, and check-to-variable ratios e^(+L)
        let mut v2c: Vec<f64> = self.edge_var.iter().map(|&v| channel[v as usize]).collect();
        let mut c2v = vec![1.0f64; edges];
        let mut th = vec![0.0f64; edges];

        let mut iterations = 0;
        let mut success = self.zero_syndrome_bits(|v| hard[v]);
        while !success && iterations < max_iterations {
            iterations += 1;
            for c in 0..m {
                let (s, e) = (self.check_ptr[c], self.check_ptr[c + 1]);
                let mut prod = 1.0f64;
                let mut zeros = 0usize;
                for i in s..e {
                    let r = v2c[i];
                    let t = (1.0 - r) / (1.0 + r);
                    th[i] = t;
                    if t == 0.0 {
                        zeros += 1;
                    } else {
                        prod *= t;
                    }
                }
                for i in s..e {
                    let p = match zeros {
                        0 => prod / th[i],
                        1 if th[i] == 0.0 => prod,
                        _ => 0.0,
                    };
                    let ratio = (1.0 + p) / (1.0 - p);
                    c2v[i] = if ratio.is_nan() { hi } else { ratio.clamp(lo, hi) };
                }
            }
            for v in 0..n {
                let es = &self.var_edges[self.var_ptr[v]..self.var_ptr[v + 1]];
                let mut acc = channel[v];
                for &e in es {
                    acc = (acc / c2v[e as usize]).clamp(1e-300, 1e300);
                }
                for &e in es {
                    v2c[e as usize] = (acc * c2v[e as usize]).clamp(lo, hi);
                }
                hard[v] = acc > 1.0;
            }
            success = self.zero_syndrome_bits(|v| hard[v]);
        }
        let codeword = BitVec::from_bools(&hard);
        Ok(DecodeOutcome {
            message: codeword.slice(0, self.k),
            codeword,
            success,
            iterations,
            corrected: 0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_distr::{Distribution, Normal};

    fn has_four_cycle(h: &Gf2Matrix) -> bool {
        let cols: Vec<Vec<usize>> = {
            let t = h.transpose().to_sparse();
            (0..t.rows()).map(|c| t.row_support(c)).collect()
        };
        for a in 0..cols.len() {
            for b in a + 1..cols.len() {
                let shared = cols[a].iter().filter(|r| cols[b].contains(r)).count();
                if shared >= 2 {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn profile_average_and_caps() {
        let p = DegreeProfile::with_average(511, 385, 3, 3.8).unwrap();
        assert_eq!(p.edges(), (3.8f64 * 511.0).round() as usize);
        assert_eq!(p.parity[125], 1);
        assert_eq!(p.parity[124], 2);
        assert!(p.info.iter().all(|&d| d == 4 || d == 5));
        assert!(DegreeProfile::with_average(10, 5, 3, 0.5).is_err());
        let bad = DegreeProfile { info: vec![1; 4], parity: vec![3, 3, 3, 3] };
        assert!(matches!(peg_construct(8, 4, &bad, 0), Err(CodeError::InfeasibleProfile(_))));
    }

    #[test]
    fn peg_matches_profile_and_is_triangular() {
        let p = DegreeProfile::with_average(511, 385, 3, 3.8).unwrap();
        let code = LdpcCode::peg(511, 385, &p, 7).unwrap();
        assert!(code.is_lower_triangular());
        assert!((code.average_variable_degree() - 3.8).abs() < 0.05);
        let cw = code.parity_check().col_weights();
        assert_eq!(&cw[..385], p.info.as_slice());
        assert_eq!(&cw[385..], p.parity.as_slice());
        let again = LdpcCode::peg(511, 385, &p, 7).unwrap();
        assert_eq!(code.parity_check(), again.parity_check());
    }

    #[test]
    fn tiny_peg_has_girth_six() {
        let p = DegreeProfile { info: vec![2; 8], parity: vec![2, 2, 2, 2, 2, 2, 2, 1] };
        for seed in 0..10 {
            let h = peg_construct(16, 8, &p, seed).unwrap();
            assert!(!has_four_cycle(&h), "seed {seed}");
            // no repeated edges: sparse rows have distinct entries
            for r in 0..h.rows() {
                let s = h.row_support(r);
                let mut d = s.clone();
                d.dedup();
                assert_eq!(s, d);
            }
        }
    }

    #[test]
    fn encoding_zero_syndrome_and_op_count() {
        let p = DegreeProfile::with_average(511, 385, 3, 3.8).unwrap();
        let code = LdpcCode::peg(511, 385, &p, 1).unwrap();
        let (z, _) = code.encode_counted(&BitVec::zeros(385)).unwrap();
        assert!(z.is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let u = BitVec::random(385, &mut rng);
            let (c, ops) = code.encode_counted(&u).unwrap();
            assert!(code.syndrome_is_zero(&c));
            assert_eq!(c.slice(0, 385), u);
            let ones = code.parity_check().ones();
            assert_eq!(ops, ones - 126);
            assert!((ops as f64 / ones as f64) > 0.9);
        }
    }

    #[test]
    fn non_triangular_matrix_refuses_to_encode() {
        let h = Gf2Matrix::from_table(&[&[1, 1, 0, 1], &[0, 1, 1, 1]]).unwrap();
        let code = LdpcCode::from_parity_check(h).unwrap();
        assert!(!code.is_lower_triangular());
        assert_eq!(code.encode(&BitVec::zeros(2)), Err(CodeError::NotTriangular));
    }

    #[test]
    fn noiseless_llrs_decode_immediately() {
        let p = DegreeProfile::with_average(511, 385, 3, 3.8).unwrap();
        let code = LdpcCode::peg(511, 385, &p, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = BitVec::random(385, &mut rng);
        let c = code.encode(&u).unwrap();
        let llr: Vec<f64> = (0..511).map(|i| if c.get(i) { -20.0 } else { 20.0 }).collect();
        let out = code.decode(&llr).unwrap();
        assert!(out.success && out.iterations <= 1);
        assert_eq!(out.message, u);
    }

    /// Exhaustive maximum-likelihood decoding of a tiny code as an oracle.
    #[test]
    fn spa_close_to_ml_on_tiny_code() {
        let p = DegreeProfile { info: vec![2; 6], parity: vec![2, 2, 2, 2, 2, 1] };
        let code = LdpcCode::peg(12, 6, &p, 4).unwrap();
        let words: Vec<BitVec> = (0u32..64)
            .map(|x| {
                let u = BitVec::from_bools(&(0..6).map(|i| x >> i & 1 == 1).collect::<Vec<_>>());
                code.encode(&u).unwrap()
            })
            .collect();
        let ebn0 = 10f64.powf(3.0 / 10.0);
        let sigma = (1.0 / (2.0 * 0.5 * ebn0)).sqrt();
        let noise = Normal::new(0.0, sigma).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (mut spa_err, mut ml_err) = (0, 0);
        for _ in 0..20_000 {
            let c = &words[rng.random_range(0..64)];
            let y: Vec<f64> = (0..12)
                .map(|i| if c.get(i) { -1.0 } else { 1.0 } + noise.sample(&mut rng))
                .collect();
            let llr: Vec<f64> = y.iter().map(|&s| 2.0 * s / (sigma * sigma)).collect();
            let out = code.decode(&llr).unwrap();
            if out.codeword != *c {
                spa_err += 1;
            }
            let best = words
                .iter()
                .max_by(|a, b| {
                    let corr = |w: &BitVec| {
                        (0..12).map(|i| if w.get(i) { -y[i] } else { y[i] }).sum::<f64>()
                    };
                    corr(a).total_cmp(&corr(b))
                })
                .unwrap();
            if best != c {
                ml_err += 1;
            }
        }
        assert!(ml_err > 50, "oracle should see errors ({ml_err})");
        assert!(spa_err as f64 <= 2.0 * ml_err as f64, "spa {spa_err} ml {ml_err}");
        assert!(spa_err >= ml_err / 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn success_implies_zero_syndrome(seed in any::<u64>(), snr_db in -1.0f64..5.0) {
            let p = DegreeProfile::regular(96, 48, 3).unwrap();
            let code = LdpcCode::peg(96, 48, &p, 5).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = BitVec::random(48, &mut rng);
            let c = code.encode(&u).unwrap();
            prop_assert!(code.syndrome_is_zero(&c));
            let sigma = (1.0 / (10f64.powf(snr_db / 10.0))).sqrt();
            let noise = Normal::new(0.0, sigma).unwrap();
            let llr: Vec<f64> = (0..96)
                .map(|i| 2.0 * (if c.get(i) { -1.0 } else { 1.0 } + noise.sample(&mut rng)) / (sigma * sigma))
                .collect();
            let out = code.decode(&llr).unwrap();
            prop_assert_eq!(out.success, code.syndrome_is_zero(&out.codeword));
        }
    }
}
