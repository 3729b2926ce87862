//! Monte-Carlo cross-check: draw rank vectors from the truncated joint law
//! and compare empirical moments with the exact ones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::moments::{moment, Family};
use crate::numerics::{rat, to_f64};
use crate::partitions::Partition;
use crate::rank_laws::family_slices;

/// Empirical frequency of one outcome against its law value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeStat {
    pub ranks: Vec<u32>,
    pub probability: f64,
    pub count: u64,
    pub frequency: f64,
    pub std_error: f64,
    pub within_4_sigma: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleReport {
    pub check: &'static str,
    pub seed: u64,
    pub draws: u64,
    #[serde(flatten)]
    pub family: Family,
    pub p: u64,
    pub l: u32,
    pub truncation: u32,
    pub lambda: String,
    /// Exact moment `E[p^{(λ'|rank)}]`.
    pub moment: String,
    pub moment_value: f64,
    pub empirical_moment: f64,
    pub moment_std_error: f64,
    pub moment_within_4_sigma: bool,
    /// Outcomes with probability at least `1e-6`, in enumeration order.
    pub outcomes: Vec<OutcomeStat>,
    pub pass: bool,
}

/// Draws `n` rank vectors of length `ℓ` by inverse CDF over the law
/// truncated at `r_1 <= R` and renormalized, using a ChaCha8 stream seeded
/// from `seed`. The moment compared is indexed by `λ`, whose conjugate must
/// fit in `ℓ` columns.
#[allow(clippy::too_many_arguments)]
pub fn sample_ranks(
    seed: u64,
    n: u64,
    family: &Family,
    p: u64,
    ell: u32,
    lambda: &Partition,
    big_r: u32,
) -> Result<SampleReport> {
    if n == 0 {
        return Err(invalid("need at least one draw"));
    }
    if ell == 0 || lambda.first_part() > ell {
        return Err(invalid(format!("λ = ({lambda}) needs at most ℓ = {ell} columns")));
    }
    let cols: Vec<u32> = (0..ell as usize).map(|j| lambda.conjugate().part(j)).collect();
    let tol = rat(1, 1 << 40);
    let mut outcomes: Vec<(Vec<u32>, f64)> = Vec::new();
    for s in family_slices(family, p)? {
        for (ranks, v) in s.enumerate(ell as usize, big_r, &tol)? {
            outcomes.push((ranks, v.to_f64()));
        }
    }
    let total: f64 = outcomes.iter().map(|o| o.1).sum();
    let mut cdf = Vec::with_capacity(outcomes.len());
    let mut acc = 0.0;
    for o in &outcomes {
        acc += o.1 / total;
        cdf.push(acc);
    }

    let pf = p as f64;
    let weight = |ranks: &[u32]| -> f64 {
        let e: u32 = ranks.iter().zip(&cols).map(|(r, c)| r * c).sum();
        pf.powi(e as i32)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; outcomes.len()];
    let (mut s1, mut s2) = (0.0f64, 0.0f64);
    for _ in 0..n {
        let x: f64 = rng.random::<f64>();
        let i = cdf.partition_point(|&c| c <= x).min(outcomes.len() - 1);
        counts[i] += 1;
        let w = weight(&outcomes[i].0);
        s1 += w;
        s2 += w * w;
    }
    let nf = n as f64;
    let mean = s1 / nf;
    let var = (s2 / nf - mean * mean).max(0.0) * nf / (nf - 1.0).max(1.0);
    let se = (var / nf).sqrt();
    let exact = moment(family, lambda, p)?;
    let mv = to_f64(&exact);
    let moment_ok = (mean - mv).abs() <= 4.0 * se.max(f64::MIN_POSITIVE);

    let stats: Vec<OutcomeStat> = outcomes
        .iter()
        .zip(&counts)
        .filter(|(o, _)| o.1 >= 1e-6)
        .map(|((ranks, prob), &count)| {
            let freq = count as f64 / nf;
            let se = (prob * (1.0 - prob) / nf).sqrt();
            OutcomeStat {
                ranks: ranks.clone(),
                probability: *prob,
                count,
                frequency: freq,
                std_error: se,
                within_4_sigma: (freq - prob).abs() <= 4.0 * se,
            }
        })
        .collect();
    Ok(SampleReport {
        check: "sample",
        seed,
        draws: n,
        family: family.clone(),
        p,
        l: ell,
        truncation: big_r,
        lambda: lambda.to_string(),
        moment: crate::numerics::fraction_string(&exact),
        moment_value: mv,
        empirical_moment: mean,
        moment_std_error: se,
        moment_within_4_sigma: moment_ok,
        outcomes: stats,
        pass: moment_ok,
    })
}
