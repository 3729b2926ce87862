//! Joint and marginal `p^j`-rank laws.
//!
//! Every law here has the same shape. For a rank parameter
//! `r = (r_1 >= ... >= r_ℓ >= 0)` (with `r_{ℓ+1} = 0`):
//!
//! ```text
//! law(r) = (a0 q^{r_ℓ}; q)_∞ · ∏_j q^{r_j²} z0^{r_j} / ∏_j (q;q)_{r_j - r_{j+1}}
//! ```
//!
//! | family      | q      | z0            | a0               |
//! |-------------|--------|---------------|------------------|
//! | class, u    | 1/p    | p^{-u}        | p^{-(u+1)}       |
//! | Sha, u      | 1/p²   | p^{1-2u}      | p^{-(2u+1)}      |
//!
//! The Selmer law with parity `δ` is the Sha kernel at `u = δ`, weighted by
//! `α` (even) or `1 - α` (odd); the Sha and Selmer parameters `r` map to
//! actual ranks `2r_j` and `2r_j + δ`.
//!
//! Fixing `r_ℓ = k` and summing the rest gives the marginal law of the
//! `p^ℓ`-rank:
//!
//! ```text
//! (a0 q^k; q)_∞ q^{ℓk²} z0^{ℓk} / (q;q)_k · S_{ℓ}(q, z0 q^{2k})
//! ```
//!
//! where `S_ℓ` is [`rank_multisum_weighted`], equal to Andrews'
//! `Q_{q,ℓ,1}(z0 q^{2k-1})`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::moments::{check_prime, Family};
use crate::numerics::{
    fraction_string, int, ipow, pow_signed, rat, Enclosure, ExactRational, WORK_BITS,
};
use crate::qseries::{
    andrews_q, gaussian_tail_bound, qpoch_finite, qpoch_inf, qpoch_inf_lower, rank_multisum_weighted,
};

/// A rank parameter `μ_1 >= ... >= μ_ℓ >= 0` with explicit length `ℓ`;
/// trailing zeros are significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RankVector(Vec<u32>);

impl RankVector {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(invalid("a rank vector needs ℓ >= 1 entries"));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(invalid(format!("rank vector {parts:?} is not weakly decreasing")));
        }
        Ok(Self(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn ell(&self) -> usize {
        self.0.len()
    }

    pub fn last(&self) -> u32 {
        *self.0.last().expect("nonempty")
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&x| x as u64).sum()
    }

    pub fn sum_squares(&self) -> u64 {
        self.0.iter().map(|&x| x as u64 * x as u64).sum()
    }
}

impl FromStr for RankVector {
    type Err = Error;

    /// Comma-separated, e.g. `"2,1,0"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad rank entry {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        RankVector::new(parts)
    }
}

impl fmt::Display for RankVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&s.join(","))
    }
}

/// The common kernel shape described in the module docs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kernel {
    pub p: u64,
    pub q: ExactRational,
    pub z0: ExactRational,
    pub a0: ExactRational,
}

impl Kernel {
    pub fn class(p: u64, u: u32) -> Self {
        let u = u as i64;
        Kernel {
            p,
            q: ipow(p, -1),
            z0: ipow(p, -u),
            a0: ipow(p, -(u + 1)),
        }
    }

    pub fn sha(p: u64, u: u32) -> Self {
        let u = u as i64;
        Kernel {
            p,
            q: ipow(p, -2),
            z0: ipow(p, 1 - 2 * u),
            a0: ipow(p, -(2 * u + 1)),
        }
    }

    /// The rational factor `∏ q^{r_j²} z0^{r_j} / ∏ (q;q)_{r_j - r_{j+1}}`.
    pub fn rational_part(&self, r: &[u32]) -> ExactRational {
        let mut acc = ExactRational::one();
        for (j, &rj) in r.iter().enumerate() {
            let next = r.get(j + 1).copied().unwrap_or(0);
            let rj = rj as i64;
            acc *= pow_signed(&self.q, rj * rj) * pow_signed(&self.z0, rj);
            acc /= qpoch_finite(&self.q, &self.q, rj - next as i64).expect("positive index");
        }
        acc
    }

    /// `(a0 q^m; q)_∞`.
    pub fn product(&self, m: u32, tol: &ExactRational) -> Result<Enclosure> {
        qpoch_inf(&(&self.a0 * pow_signed(&self.q, m as i64)), &self.q, tol)
    }

    pub fn value(&self, r: &RankVector, tol: &ExactRational) -> Result<Enclosure> {
        let c = self.rational_part(r.parts());
        let prod = self.product(r.last(), &(tol / (c.abs() + int(1))))?;
        Ok(prod.scale(&c).round_outward(WORK_BITS))
    }

    /// Exact prefactor `q^{ℓk²} z0^{ℓk} / (q;q)_k` of the marginal, and the
    /// multi-sum weight `z0 q^{2k}`.
    fn marginal_parts(&self, ell: u32, k: u32) -> (ExactRational, ExactRational) {
        let (l, k) = (ell as i64, k as i64);
        let pre = pow_signed(&self.q, l * k * k) * pow_signed(&self.z0, l * k)
            / qpoch_finite(&self.q, &self.q, k).expect("k >= 0");
        let z = &self.z0 * pow_signed(&self.q, 2 * k);
        (pre, z)
    }

    /// Probability that the `p^ℓ`-rank parameter equals `k`, via the
    /// positive-term multi-sum.
    pub fn marginal(&self, ell: u32, k: u32, tol: &ExactRational) -> Result<Enclosure> {
        if ell == 0 {
            return Err(invalid("ℓ must be at least 1"));
        }
        let (pre, z) = self.marginal_parts(ell, k);
        let part_tol = tol / (int(4) * (pre.abs() + int(1)));
        let prod = self.product(k, &part_tol)?;
        let sum = rank_multisum_weighted(&self.q, ell, &z, &part_tol)?;
        Ok((&prod * &sum).scale(&pre).round_outward(WORK_BITS))
    }

    /// The same marginal through Andrews' series at `x = z0 q^{2k-1}`.
    /// Fails with a domain error where that series is not well defined.
    pub fn marginal_andrews(&self, ell: u32, k: u32, tol: &ExactRational) -> Result<Enclosure> {
        if ell == 0 {
            return Err(invalid("ℓ must be at least 1"));
        }
        let (pre, z) = self.marginal_parts(ell, k);
        let x = z / &self.q;
        let part_tol = tol / (int(4) * (pre.abs() + int(1)));
        let prod = self.product(k, &part_tol)?;
        let series = andrews_q(&self.q, ell, &x, &part_tol)?;
        Ok((&prod * &series).scale(&pre).round_outward(WORK_BITS))
    }
}

/// A computed probability together with what it is the probability of.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawValue {
    pub probability: Enclosure,
    pub family: &'static str,
    pub p: u64,
    pub params: BTreeMap<&'static str, String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl LawValue {
    fn new(probability: Enclosure, family: &'static str, p: u64) -> Self {
        LawValue {
            probability,
            family,
            p,
            params: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    fn with(mut self, key: &'static str, value: impl ToString) -> Self {
        self.params.insert(key, value.to_string());
        self
    }

    fn class_hint(mut self) -> Self {
        if self.p == 2 {
            self.notes.push(
                "p = 2 is excluded for class groups; at p = 2 read this as a law for cl(K)^2".into(),
            );
        }
        self
    }
}

fn check_tol(tol: &ExactRational) -> Result<()> {
    if tol.is_positive() {
        Ok(())
    } else {
        Err(invalid(format!("tolerance must be positive, got {tol}")))
    }
}

fn check_alpha(alpha: &ExactRational) -> Result<()> {
    Family::selmer(alpha.clone()).map(|_| ())
}

fn check_delta(delta: u32) -> Result<()> {
    if delta > 1 {
        return Err(invalid(format!("parity δ must be 0 or 1, got {delta}")));
    }
    Ok(())
}

/// Weight of the parity-`δ` Selmer slice: `α` for even, `1 - α` for odd.
pub fn parity_weight(delta: u32, alpha: &ExactRational) -> ExactRational {
    if delta == 0 {
        alpha.clone()
    } else {
        ExactRational::one() - alpha
    }
}

/// Probability that `rk_{p^j}(cl) = μ_j` for `j <= ℓ`.
pub fn joint_class(mu: &RankVector, p: u64, u: u32, tol: &ExactRational) -> Result<LawValue> {
    check_prime(p)?;
    check_tol(tol)?;
    let v = Kernel::class(p, u).value(mu, tol)?;
    Ok(LawValue::new(v, "class", p).with("u", u).with("mu", mu).class_hint())
}

/// Probability that `rk_{p^j}(Sha) = 2μ_j` for `j <= ℓ`.
pub fn joint_sha(mu: &RankVector, p: u64, u: u32, tol: &ExactRational) -> Result<LawValue> {
    check_prime(p)?;
    check_tol(tol)?;
    let v = Kernel::sha(p, u).value(mu, tol)?;
    Ok(LawValue::new(v, "sha", p).with("u", u).with("mu", mu))
}

/// Probability that `rk_{p^j}(S) = 2μ_j + δ` for `j <= ℓ`, when even-rank
/// curves make up the proportion `α` of the family.
pub fn joint_selmer(
    mu: &RankVector,
    p: u64,
    delta: u32,
    alpha: &ExactRational,
    tol: &ExactRational,
) -> Result<LawValue> {
    check_prime(p)?;
    check_tol(tol)?;
    check_delta(delta)?;
    check_alpha(alpha)?;
    let w = parity_weight(delta, alpha);
    let v = if w.is_zero() {
        Enclosure::zero()
    } else {
        Kernel::sha(p, delta).value(mu, &(tol / &w))?.scale(&w)
    };
    Ok(LawValue::new(v, "selmer", p)
        .with("delta", delta)
        .with("alpha", fraction_string(alpha))
        .with("mu", mu))
}

/// Probability that `rk_{p^ℓ}(cl) = k`.
pub fn marginal_class(p: u64, ell: u32, k: u32, u: u32, tol: &ExactRational) -> Result<LawValue> {
    check_prime(p)?;
    check_tol(tol)?;
    let v = Kernel::class(p, u).marginal(ell, k, tol)?;
    Ok(LawValue::new(v, "class", p)
        .with("u", u)
        .with("l", ell)
        .with("k", k)
        .class_hint())
}

/// Probability that `rk_{p^ℓ}(Sha) = 2k`.
pub fn marginal_sha(p: u64, ell: u32, k: u32, u: u32, tol: &ExactRational) -> Result<LawValue> {
    check_prime(p)?;
    check_tol(tol)?;
    let v = Kernel::sha(p, u).marginal(ell, k, tol)?;
    Ok(LawValue::new(v, "sha", p).with("u", u).with("l", ell).with("k", k))
}

/// Probability that `rk_{p^ℓ}(S) = 2k + δ`.
pub fn marginal_selmer(
    p: u64,
    ell: u32,
    k: u32,
    delta: u32,
    alpha: &ExactRational,
    tol: &ExactRational,
) -> Result<LawValue> {
    check_prime(p)?;
    check_tol(tol)?;
    check_delta(delta)?;
    check_alpha(alpha)?;
    let w = parity_weight(delta, alpha);
    let v = if w.is_zero() {
        Enclosure::zero()
    } else {
        Kernel::sha(p, delta).marginal(ell, k, &(tol / &w))?.scale(&w)
    };
    Ok(LawValue::new(v, "selmer", p)
        .with("delta", delta)
        .with("alpha", fraction_string(alpha))
        .with("l", ell)
        .with("k", k))
}

/// `f(p, ℓ, rank)`: the Selmer marginal at `α = 1/2` for the `p^ℓ`-rank
/// `rank = 2k + δ`.
pub fn selmer_f(p: u64, ell: u32, rank: u32, tol: &ExactRational) -> Result<LawValue> {
    marginal_selmer(p, ell, rank / 2, rank % 2, &rat(1, 2), tol)
}

/// One parity slice of a (possibly mixed) law: the kernel, its weight, and
/// the map `r_j -> stretch · r_j + offset` from parameters to actual ranks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawSlice {
    pub kernel: Kernel,
    pub weight: ExactRational,
    pub stretch: u32,
    pub offset: u32,
}

/// Truncated sum `Σ_{r_1 <= R} weight · law(r) · p^{(c|rank(r))}` with a
/// rigorous bound on the omitted part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSum {
    pub sum: Enclosure,
    pub tail: ExactRational,
    pub terms: usize,
}

impl TruncatedSum {
    /// Enclosure of the full (untruncated) sum.
    pub fn total(&self) -> Enclosure {
        self.sum.extend_up(&self.tail)
    }
}

impl LawSlice {
    pub fn actual_ranks(&self, r: &[u32]) -> Vec<u32> {
        r.iter().map(|&x| self.stretch * x + self.offset).collect()
    }

    /// Upper bound for the part of `Σ weight · law(r) · p^{Σ_j c_j · rank_j}`
    /// with `r_1 > R` (see [`LawSlice::weighted_sum`]).
    pub fn tail_bound(&self, c: &[u32], big_r: u32) -> Result<ExactRational> {
        if c.is_empty() {
            return Err(invalid("need at least one column"));
        }
        if self.weight.is_zero() {
            return Ok(ExactRational::zero());
        }
        let k = &self.kernel;
        let c_total: u64 = c.iter().map(|&x| x as u64).sum();
        let scale = &self.weight * ipow(k.p, self.offset as i64 * c_total as i64);
        let qlo = qpoch_inf_lower(&k.q)?;
        let zs: Vec<ExactRational> = c
            .iter()
            .map(|&cj| &k.z0 * ipow(k.p, (self.stretch * cj) as i64))
            .collect();
        let mut t = gaussian_tail_bound(&k.q, &zs[0], big_r as u64 + 1)?;
        for z in &zs[1..] {
            t *= gaussian_tail_bound(&k.q, z, 0)?;
        }
        Ok(&scale * t / pow_signed(&qlo, c.len() as i64))
    }

    /// Truncated `Σ_{r_1 <= R} weight · law(r) · p^{Σ_j c_j · rank_j}` over
    /// rank parameters of length `ℓ = c.len()`.
    ///
    /// Each omitted term is at most
    /// `weight · p^{offset·|c|} · ∏_j q^{r_j²} z_j^{r_j} / (q;q)_∞^ℓ` with
    /// `z_j = z0 p^{stretch·c_j}`; dropping the ordering of `r`, the omitted
    /// part is at most that prefactor times
    /// `T(z_1; R+1) ∏_{j>=2} G(z_j)` (Gaussian tail and full sums).
    pub fn weighted_sum(&self, c: &[u32], big_r: u32, tol: &ExactRational) -> Result<TruncatedSum> {
        let ell = c.len();
        let k = &self.kernel;
        let tail = self.tail_bound(c, big_r)?;
        let c_total: u64 = c.iter().map(|&x| x as u64).sum();
        let scale = &self.weight * ipow(k.p, self.offset as i64 * c_total as i64);

        let mut sum = Enclosure::zero();
        let mut terms = 0usize;
        if !self.weight.is_zero() {
            let prod_tol = tol * rat(1, 1 << 20) / int(big_r as i64 + 1);
            let products = (0..=big_r)
                .map(|m| k.product(m, &prod_tol))
                .collect::<Result<Vec<_>>>()?;
            for nu in crate::partitions::partitions_up_to(big_r, ell) {
                let r: Vec<u32> = (0..ell).map(|j| nu.part(j)).collect();
                let pair: i64 = r
                    .iter()
                    .zip(c)
                    .map(|(&rj, &cj)| (self.stretch * rj * cj) as i64)
                    .sum();
                let exact = k.rational_part(&r) * ipow(k.p, pair) * &scale;
                let term = products[r[ell - 1] as usize].scale(&exact);
                sum = (&sum + &term).round_outward(WORK_BITS);
                terms += 1;
            }
        }
        Ok(TruncatedSum { sum, tail, terms })
    }

    /// Pairs `(actual ranks, weighted probability)` for every parameter with
    /// `r_1 <= R`, in enumeration order.
    pub fn enumerate(&self, ell: usize, big_r: u32, tol: &ExactRational) -> Result<Vec<(Vec<u32>, Enclosure)>> {
        let mut out = Vec::new();
        if self.weight.is_zero() {
            return Ok(out);
        }
        for nu in crate::partitions::partitions_up_to(big_r, ell) {
            let r: Vec<u32> = (0..ell).map(|j| nu.part(j)).collect();
            let v = self.kernel.value(&RankVector::new(r.clone())?, tol)?.scale(&self.weight);
            out.push((self.actual_ranks(&r), v));
        }
        Ok(out)
    }
}

/// The parity slices making up the law of `family` at `p`.
pub fn family_slices(family: &Family, p: u64) -> Result<Vec<LawSlice>> {
    check_prime(p)?;
    family.validate()?;
    let one = ExactRational::one();
    Ok(match family {
        Family::ClassGroup { u } => vec![LawSlice {
            kernel: Kernel::class(p, *u),
            weight: one,
            stretch: 1,
            offset: 0,
        }],
        Family::Sha { u } => vec![LawSlice {
            kernel: Kernel::sha(p, *u),
            weight: one,
            stretch: 2,
            offset: 0,
        }],
        Family::Selmer { alpha } => (0..2)
            .map(|delta| LawSlice {
                kernel: Kernel::sha(p, delta),
                weight: parity_weight(delta, alpha),
                stretch: 2,
                offset: delta,
            })
            .collect(),
    })
}

/// The mixed candidate `y_r(mix)` for the system indexed by conjugates:
/// `mix` times the Sha-`u` law on even rank vectors and `1 - mix` times the
/// odd-parity kernel (the Sha kernel at `u + 1`) on odd ones.
pub fn mixed_slices(mix: &ExactRational, p: u64, u: u32) -> Result<Vec<LawSlice>> {
    check_prime(p)?;
    if mix.is_negative() || mix > &ExactRational::one() {
        return Err(invalid(format!("mix = {mix} is outside [0, 1]")));
    }
    Ok(vec![
        LawSlice {
            kernel: Kernel::sha(p, u),
            weight: mix.clone(),
            stretch: 2,
            offset: 0,
        },
        LawSlice {
            kernel: Kernel::sha(p, u + 1),
            weight: ExactRational::one() - mix,
            stretch: 2,
            offset: 1,
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::to_f64;

    fn tol() -> ExactRational {
        rat(1, 1_000_000_000_000)
    }

    fn rv(s: &str) -> RankVector {
        s.parse().unwrap()
    }

    fn near(e: &Enclosure, x: f64, eps: f64) -> bool {
        (e.to_f64() - x).abs() < eps
    }

    /// Plain truncated product, a separate code path from the enclosure.
    fn product_oracle(a: f64, q: f64) -> f64 {
        (0..200).map(|k| 1.0 - a * q.powi(k)).product()
    }

    #[test]
    fn rank_vector_parsing() {
        assert_eq!(rv("2,1,0").parts(), &[2, 1, 0]);
        assert_eq!(rv("0").ell(), 1);
        assert!("1,2".parse::<RankVector>().is_err());
        assert!("".parse::<RankVector>().is_err());
        assert!("a".parse::<RankVector>().is_err());
    }

    #[test]
    fn joint_class_examples() {
        let v = joint_class(&rv("0"), 3, 0, &tol()).unwrap();
        assert!(near(&v.probability, product_oracle(1.0 / 3.0, 1.0 / 3.0), 1e-12));
        let v = joint_class(&rv("1"), 3, 0, &tol()).unwrap();
        let want = product_oracle(1.0 / 9.0, 1.0 / 3.0) / (3.0 * (2.0 / 3.0));
        assert!(near(&v.probability, want, 1e-12));
        assert!(near(&v.probability, 0.420095, 1e-6));
        let v = joint_class(&rv("0"), 3, 1, &tol()).unwrap();
        assert!(near(&v.probability, 0.840189, 1e-6));
        assert!(joint_class(&rv("0"), 2, 0, &tol()).unwrap().notes.len() == 1);
    }

    #[test]
    fn joint_sha_examples() {
        let v = joint_sha(&rv("0"), 2, 0, &tol()).unwrap();
        assert!(near(&v.probability, 0.41942244, 1e-8));
        let v = joint_sha(&rv("0"), 2, 1, &tol()).unwrap();
        assert!(near(&v.probability, product_oracle(1.0 / 8.0, 0.25), 1e-12));
        let v = joint_sha(&rv("1"), 3, 0, &tol()).unwrap();
        let want = product_oracle(1.0 / 27.0, 1.0 / 9.0) / (3.0 * (8.0 / 9.0));
        assert!(near(&v.probability, want, 1e-12));
    }

    #[test]
    fn joint_selmer_examples() {
        let half = rat(1, 2);
        let v = joint_selmer(&rv("0"), 2, 0, &half, &tol()).unwrap();
        assert!(near(&v.probability, 0.20971122, 1e-8));
        let v = joint_selmer(&rv("0"), 2, 1, &half, &tol()).unwrap();
        assert!(near(&v.probability, 0.41942244, 1e-8));
        let v = joint_selmer(&rv("3,1"), 2, 1, &int(1), &tol()).unwrap();
        assert!(v.probability.is_exact() && v.probability.lo().is_zero());
        assert!(joint_selmer(&rv("0"), 2, 2, &half, &tol()).is_err());
    }

    #[test]
    fn marginal_examples() {
        let v = marginal_class(3, 1, 0, 0, &tol()).unwrap();
        assert!(near(&v.probability, 0.56012608, 1e-8));
        let v = marginal_class(3, 1, 1, 1, &tol()).unwrap();
        let want = product_oracle(1.0 / 27.0, 1.0 / 3.0) / ((2.0 / 3.0) * 9.0);
        assert!(near(&v.probability, want, 1e-12));
        let v = marginal_sha(2, 1, 0, 0, &tol()).unwrap();
        assert!(near(&v.probability, 0.41942244, 1e-8));
        let v = marginal_sha(2, 1, 1, 0, &tol()).unwrap();
        let want = product_oracle(1.0 / 8.0, 0.25) / (0.75 * 2.0);
        assert!(near(&v.probability, want, 1e-12));
    }

    #[test]
    fn class_marginal_ell2_matches_direct_sum() {
        // prefactor (1/3;1/3)_∞ times Σ_μ q^{μ²}/(q;q)_μ at q = 1/3
        let q: f64 = 1.0 / 3.0;
        let mut s = 0.0;
        let mut qq = 1.0;
        for m in 0..30 {
            if m > 0 {
                qq *= 1.0 - q.powi(m);
            }
            s += q.powi(m * m) / qq;
        }
        let want = product_oracle(q, q) * s;
        let v = marginal_class(3, 2, 0, 0, &tol()).unwrap();
        assert!(near(&v.probability, want, 1e-12));
    }

    #[test]
    fn selmer_f_table_spots() {
        for (p, ell, rank, want) in [(2, 1, 0, 0.2097), (3, 2, 0, 0.4398), (5, 3, 2, 0.0041)] {
            let v = selmer_f(p, ell, rank, &tol()).unwrap();
            assert!((v.probability.to_f64() - want).abs() < 1e-4);
        }
    }

    #[test]
    fn andrews_route_agrees_where_defined() {
        for (p, ell, k) in [(3u64, 2u32, 0u32), (3, 3, 1), (5, 2, 2)] {
            let k1 = Kernel::class(p, 0);
            let a = k1.marginal(ell, k, &tol()).unwrap();
            let b = k1.marginal_andrews(ell, k, &tol()).unwrap();
            assert!(a.overlaps(&b), "class {p} {ell} {k}");
        }
        for (p, ell, k, delta) in [(2u64, 2u32, 1u32, 0u32), (3, 3, 0, 1), (2, 3, 1, 1)] {
            let ks = Kernel::sha(p, delta);
            let a = ks.marginal(ell, k, &tol()).unwrap();
            let b = ks.marginal_andrews(ell, k, &tol()).unwrap();
            assert!(a.overlaps(&b), "sha {p} {ell} {k} {delta}");
        }
    }

    #[test]
    fn values_lie_in_unit_interval() {
        let zero = ExactRational::zero();
        let one = ExactRational::one();
        for p in [2u64, 3, 5] {
            for ell in 1..=3 {
                for k in 0..3 {
                    for u in 0..2 {
                        for v in [
                            marginal_class(p, ell, k, u, &tol()).unwrap(),
                            marginal_sha(p, ell, k, u, &tol()).unwrap(),
                        ] {
                            assert!(v.probability.lo() >= &zero && v.probability.hi() <= &one);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn slice_normalization_class() {
        let s = &family_slices(&Family::ClassGroup { u: 0 }, 3).unwrap()[0];
        let t = s.weighted_sum(&[0], 20, &tol()).unwrap();
        assert!(t.total().contains(&int(1)));
        assert!(to_f64(&t.tail) < 1e-50);
    }
}
