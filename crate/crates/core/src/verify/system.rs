//! Truncated moment-system, marginalization, normalization and duality
//! checks.

use serde_json::json;

use crate::error::{invalid, Result};
use crate::moments::{duality_sides, moment, Family};
use crate::numerics::{fraction_string, Enclosure, ExactRational, WORK_BITS};
use crate::partitions::{partitions_of_size_at_most, partitions_up_to, Partition};
use crate::rank_laws::{family_slices, mixed_slices, parity_weight, Kernel, LawSlice};
use crate::verify::VerificationReport;

/// `λ` padded with zeros to length `ell`.
fn columns(lambda: &Partition, ell: usize) -> Vec<u32> {
    (0..ell).map(|j| lambda.part(j)).collect()
}

/// Sums the truncated weighted sums of several slices; returns the enclosure
/// of the full sum and the total tail bound.
fn sum_slices(slices: &[LawSlice], c: &[u32], big_r: u32, tol: &ExactRational) -> Result<(Enclosure, ExactRational)> {
    let mut total = Enclosure::zero();
    let mut tail = ExactRational::from_integer(0.into());
    for s in slices {
        let t = s.weighted_sum(c, big_r, tol)?;
        total = (&total + &t.total()).round_outward(WORK_BITS);
        tail += &t.tail;
    }
    Ok((total, tail))
}

fn family_params(family: &Family) -> serde_json::Value {
    match family {
        Family::ClassGroup { u } => json!({"family": "class", "u": u}),
        Family::Sha { u } => json!({"family": "sha", "u": u}),
        Family::Selmer { alpha } => json!({"family": "selmer", "alpha": fraction_string(alpha)}),
    }
}

fn with(mut v: serde_json::Value, extra: serde_json::Value) -> serde_json::Value {
    if let (Some(m), serde_json::Value::Object(e)) = (v.as_object_mut(), extra) {
        m.extend(e);
    }
    v
}

/// `Σ_r law(r) p^{(λ'|rank(r))}` over rank vectors of length `λ_1` with
/// `r_1 <= R`, against `moment(family, λ, p)`. For Selmer both parity slices
/// are summed.
pub fn check_system(
    family: &Family,
    lambda: &Partition,
    p: u64,
    tol: &ExactRational,
    big_r: u32,
) -> Result<VerificationReport> {
    let ell = lambda.first_part().max(1) as usize;
    let c = columns(&lambda.conjugate(), ell);
    let slices = family_slices(family, p)?;
    let (lhs, tail) = sum_slices(&slices, &c, big_r, tol)?;
    let rhs = Enclosure::exact(moment(family, lambda, p)?);
    let params = with(family_params(family), json!({"p": p, "lambda": lambda.to_string()}));
    Ok(VerificationReport::judge("system", params, lhs, rhs, tol.clone(), tail, Some(big_r)))
}

/// One Selmer parity slice: `Σ_r w_δ e_{2r+δ} p^{(λ'|2r+δ)}` against
/// `w_δ · moment(Selmer, λ, p)` with `w_0 = α`, `w_1 = 1 - α`.
pub fn check_selmer_slice(
    lambda: &Partition,
    p: u64,
    alpha: &ExactRational,
    delta: u32,
    tol: &ExactRational,
    big_r: u32,
) -> Result<VerificationReport> {
    if delta > 1 {
        return Err(invalid(format!("parity δ must be 0 or 1, got {delta}")));
    }
    let family = Family::selmer(alpha.clone())?;
    let ell = lambda.first_part().max(1) as usize;
    let c = columns(&lambda.conjugate(), ell);
    let slices = family_slices(&family, p)?;
    let (lhs, tail) = sum_slices(&slices[delta as usize..=delta as usize], &c, big_r, tol)?;
    let w = parity_weight(delta, alpha);
    let rhs = Enclosure::exact(moment(&family, lambda, p)? * w);
    let params = with(
        family_params(&family),
        json!({"p": p, "lambda": lambda.to_string(), "delta": delta}),
    );
    Ok(VerificationReport::judge("selmer_slice", params, lhs, rhs, tol.clone(), tail, Some(big_r)))
}

/// The mixed candidate `y_r(mix)` in the system
/// `Σ_r x_r p^{(λ|r)} = Σ_{μ⊆λ'} C_{λ',μ}(p²) p^{-|μ|(2u-1)}`, with rank
/// vectors of length `max(ℓ(λ), 1)`.
///
/// Even vectors carry `mix` times the Sha-`u` law; odd vectors carry
/// `1 - mix` times the Sha kernel at `u + 1`. By the duality identity the
/// odd part reproduces the right side when `u = 0`.
pub fn check_u_solution(
    mix: &ExactRational,
    p: u64,
    u: u32,
    lambda: &Partition,
    tol: &ExactRational,
    big_r: u32,
) -> Result<VerificationReport> {
    let ell = lambda.len().max(1);
    let c = columns(lambda, ell);
    let slices = mixed_slices(mix, p, u)?;
    let (lhs, tail) = sum_slices(&slices, &c, big_r, tol)?;
    let rhs = Enclosure::exact(moment(&Family::Sha { u }, &lambda.conjugate(), p)?);
    let params = json!({"mix": fraction_string(mix), "p": p, "u": u, "lambda": lambda.to_string()});
    let mut r = VerificationReport::judge("usystem", params, lhs, rhs, tol.clone(), tail, Some(big_r));
    if u > 0 && mix != &ExactRational::from_integer(1.into()) {
        r = r.note("the odd-parity part solves this system only for u = 0");
    }
    Ok(r)
}

pub fn check_u_grid(
    mix: &ExactRational,
    p: u64,
    u: u32,
    grid: &[Partition],
    tol: &ExactRational,
    big_r: u32,
) -> Result<Vec<VerificationReport>> {
    grid.iter().map(|l| check_u_solution(mix, p, u, l, tol, big_r)).collect()
}

/// The slice whose kernel governs the marginal: the whole law for class and
/// Sha, the parity-`δ` slice for Selmer.
fn marginal_slice(family: &Family, delta: u32, p: u64) -> Result<LawSlice> {
    let slices = family_slices(family, p)?;
    Ok(match family {
        Family::Selmer { .. } => {
            if delta > 1 {
                return Err(invalid(format!("parity δ must be 0 or 1, got {delta}")));
            }
            slices[delta as usize].clone()
        }
        _ => slices[0].clone(),
    })
}

/// Joint law summed over `μ_1 >= ... >= μ_{ℓ-1} >= k` (with `μ_ℓ = k`,
/// `μ_1 <= R`) against the closed-form marginal. `delta` selects the parity
/// for Selmer and is ignored otherwise.
pub fn check_marginalization(
    family: &Family,
    delta: u32,
    p: u64,
    ell: u32,
    k: u32,
    tol: &ExactRational,
    big_r: u32,
) -> Result<VerificationReport> {
    if ell == 0 {
        return Err(invalid("ℓ must be at least 1"));
    }
    if big_r < k {
        return Err(invalid(format!("R = {big_r} is below k = {k}")));
    }
    let slice = marginal_slice(family, delta, p)?;
    let kern: &Kernel = &slice.kernel;
    let depth = ell as usize - 1;
    let mut head = ExactRational::from_integer(0.into());
    let mut sum = Enclosure::zero();
    let mut count = 0usize;
    for nu in partitions_up_to(big_r - k, depth) {
        let mut r: Vec<u32> = (0..depth).map(|j| nu.part(j) + k).collect();
        r.push(k);
        head += kern.rational_part(&r);
        count += 1;
        if count.is_multiple_of(256) {
            sum = (&sum + &Enclosure::exact(std::mem::take(&mut head))).round_outward(WORK_BITS);
        }
    }
    sum = (&sum + &Enclosure::exact(head)).round_outward(WORK_BITS);
    let prod = kern.product(k, &(tol * crate::numerics::rat(1, 1 << 20)))?;
    let joint = (&sum * &prod).scale(&slice.weight).round_outward(WORK_BITS);
    // the omitted vectors all have μ_1 > R, so the whole-law tail bounds them
    let tail = slice.tail_bound(&vec![0; ell as usize], big_r)?;
    let lhs = joint.extend_up(&tail);
    let rhs = kern.marginal(ell, k, &(tol * crate::numerics::rat(1, 1 << 10)))?.scale(&slice.weight);
    let mut params = with(family_params(family), json!({"p": p, "l": ell, "k": k}));
    if matches!(family, Family::Selmer { .. }) {
        params = with(params, json!({"delta": delta}));
    }
    Ok(VerificationReport::judge("marginalization", params, lhs, rhs, tol.clone(), tail, Some(big_r)))
}

/// Total mass of the truncated joint law (all parity slices) over rank
/// vectors of length `ℓ` with `r_1 <= R`, against 1.
pub fn check_normalization(
    family: &Family,
    p: u64,
    ell: u32,
    tol: &ExactRational,
    big_r: u32,
) -> Result<VerificationReport> {
    if ell == 0 {
        return Err(invalid("ℓ must be at least 1"));
    }
    let slices = family_slices(family, p)?;
    let c = vec![0; ell as usize];
    let mut truncated = Enclosure::zero();
    let mut tail = ExactRational::from_integer(0.into());
    for s in &slices {
        let t = s.weighted_sum(&c, big_r, tol)?;
        truncated = (&truncated + &t.sum).round_outward(WORK_BITS);
        tail += &t.tail;
    }
    let params = with(family_params(family), json!({"p": p, "l": ell}));
    let one = Enclosure::one();
    let mut r = VerificationReport::judge(
        "normalization",
        params,
        truncated.extend_up(&tail),
        one.clone(),
        tol.clone(),
        tail,
        Some(big_r),
    );
    // the truncated mass itself must already be within tol of 1
    let deficit = truncated.max_distance(&one);
    if deficit > *tol {
        r.pass = false;
        r = r.note(format!("truncated mass is {} short of 1", super::report::sci(&deficit)));
    }
    Ok(r)
}

/// The duality identity `p^{|λ|} Σ C(p²) p^{-|μ|} = Σ C(p²) p^{|μ|}` for every
/// `λ` with `|λ| <= max_size`.
pub fn check_identity(p: u64, max_size: u32) -> Result<Vec<VerificationReport>> {
    partitions_of_size_at_most(max_size)
        .into_iter()
        .map(|lambda| {
            let d = duality_sides(&lambda, p)?;
            Ok(VerificationReport::judge(
                "identity",
                json!({"p": p, "lambda": lambda.to_string()}),
                Enclosure::exact(d.lhs),
                Enclosure::exact(d.rhs),
                ExactRational::from_integer(0.into()),
                ExactRational::from_integer(0.into()),
                None,
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{int, rat};

    fn tol() -> ExactRational {
        rat(1, 1_000_000)
    }

    fn part(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn class_system_anchor() {
        let r = check_system(&Family::ClassGroup { u: 0 }, &part("1"), 3, &tol(), 12).unwrap();
        assert!(r.pass, "{r}");
        assert!(r.lhs.overlaps(&Enclosure::exact(int(2))));
    }

    #[test]
    fn sha_system_anchor() {
        let r = check_system(&Family::Sha { u: 0 }, &part("1"), 2, &tol(), 10).unwrap();
        assert!(r.pass, "{r}");
        assert_eq!(r.rhs, Enclosure::exact(int(3)));
    }

    #[test]
    fn selmer_slices_split_the_moment() {
        let half = rat(1, 2);
        let even = check_selmer_slice(&part("1"), 2, &half, 0, &tol(), 12).unwrap();
        let odd = check_selmer_slice(&part("1"), 2, &half, 1, &tol(), 12).unwrap();
        assert!(even.pass && odd.pass);
        let both = &even.lhs + &odd.lhs;
        assert!(both.overlaps(&Enclosure::exact(int(3))));
    }

    #[test]
    fn tiny_truncation_fails_with_hint() {
        let r = check_system(&Family::Sha { u: 0 }, &part("2,2"), 3, &tol(), 1).unwrap();
        assert!(!r.pass);
        assert!(r.notes.iter().any(|n| n.contains("increase R")));
    }

    #[test]
    fn u_system() {
        for mix in [int(0), rat(3, 10), int(1)] {
            let r = check_u_solution(&mix, 2, 0, &part("1"), &tol(), 15).unwrap();
            assert!(r.pass, "{r}");
        }
        let r = check_u_solution(&rat(3, 10), 2, 1, &part("1"), &tol(), 15).unwrap();
        assert!(!r.pass);
        let r = check_u_solution(&int(1), 3, 1, &part("2,1"), &tol(), 15).unwrap();
        assert!(r.pass, "{r}");
    }

    #[test]
    fn marginalization_small() {
        let t = rat(1, 100_000_000);
        let r = check_marginalization(&Family::ClassGroup { u: 0 }, 0, 3, 2, 0, &t, 25).unwrap();
        assert!(r.pass, "{r}");
        let r = check_marginalization(&Family::ClassGroup { u: 0 }, 0, 3, 1, 1, &t, 5).unwrap();
        assert!(r.pass, "{r}");
    }

    #[test]
    fn normalization_small() {
        let r = check_normalization(&Family::ClassGroup { u: 0 }, 3, 1, &tol(), 20).unwrap();
        assert!(r.pass, "{r}");
        let r = check_normalization(&Family::selmer(rat(1, 2)).unwrap(), 2, 1, &tol(), 15).unwrap();
        assert!(r.pass, "{r}");
        let r = check_normalization(&Family::ClassGroup { u: 0 }, 3, 1, &tol(), 2).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn identity_suite() {
        let rs = check_identity(2, 4).unwrap();
        assert!(rs.len() > 5 && rs.iter().all(|r| r.pass));
    }
}
