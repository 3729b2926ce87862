//! Conjectural moments `Σ_{μ⊆λ} C_{λ,μ}(·) · weight(μ)` for the three
//! families, the duality identity linking the two Selmer parity slices, and
//! growth diagnostics.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::numerics::{ipow, serialize_rational, ExactRational};
use crate::partitions::Partition;
use crate::subgroup_count::{is_prime, subgroup_count};

/// Which moment and law formulas apply.
///
/// The Selmer parity `δ` is not part of the family: the moment is the full
/// (both parities) average, and the laws take `δ` as a separate argument.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    #[serde(rename = "class")]
    ClassGroup { u: u32 },
    Sha { u: u32 },
    Selmer {
        #[serde(serialize_with = "serialize_rational")]
        alpha: ExactRational,
    },
}

impl Family {
    pub fn selmer(alpha: ExactRational) -> Result<Self> {
        let f = Family::Selmer { alpha };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if let Family::Selmer { alpha } = self {
            if alpha.is_negative() || alpha > &ExactRational::one() {
                return Err(invalid(format!("alpha = {alpha} is outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::ClassGroup { .. } => "class",
            Family::Sha { .. } => "sha",
            Family::Selmer { .. } => "selmer",
        }
    }
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(invalid(format!("p = {p} is not prime")))
    }
}

/// `Σ_{μ⊆λ} C_{λ,μ}(base) · p^{e·|μ|}`.
fn weighted_sum(lambda: &Partition, base: &ExactRational, p: u64, e: i64) -> ExactRational {
    lambda
        .subpartitions()
        .map(|mu| subgroup_count(lambda, &mu, base) * ipow(p, e * mu.size() as i64))
        .fold(ExactRational::zero(), |a, b| a + b)
}

/// The conjectural moment of `family` indexed by `λ` at the prime `p`.
///
/// * class group: `Σ C_{λ,μ}(p) p^{-u|μ|}`
/// * Sha: `Σ C_{λ,μ}(p²) p^{-|μ|(2u-1)}`
/// * Selmer: `Σ C_{λ,μ}(p²) p^{|μ|}`
///
/// The empty partition gives 1 in every family.
pub fn moment(family: &Family, lambda: &Partition, p: u64) -> Result<ExactRational> {
    check_prime(p)?;
    family.validate()?;
    let pp = ExactRational::from_integer(p.into());
    let p2 = &pp * &pp;
    Ok(match family {
        Family::ClassGroup { u } => weighted_sum(lambda, &pp, p, -(*u as i64)),
        Family::Sha { u } => weighted_sum(lambda, &p2, p, 1 - 2 * *u as i64),
        Family::Selmer { .. } => weighted_sum(lambda, &p2, p, 1),
    })
}

/// Both sides of `p^{|λ|} Σ C_{λ,μ}(p²) p^{-|μ|} = Σ C_{λ,μ}(p²) p^{|μ|}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualityCheck {
    pub lambda: Partition,
    pub p: u64,
    #[serde(serialize_with = "serialize_rational")]
    pub lhs: ExactRational,
    #[serde(serialize_with = "serialize_rational")]
    pub rhs: ExactRational,
    pub holds: bool,
}

pub fn duality_sides(lambda: &Partition, p: u64) -> Result<DualityCheck> {
    check_prime(p)?;
    let p2 = ExactRational::from_integer((p * p).into());
    let lhs = ipow(p, lambda.size() as i64) * weighted_sum(lambda, &p2, p, -1);
    let rhs = weighted_sum(lambda, &p2, p, 1);
    Ok(DualityCheck {
        lambda: lambda.clone(),
        p,
        holds: lhs == rhs,
        lhs,
        rhs,
    })
}

pub fn duality_check(lambda: &Partition, p: u64) -> Result<bool> {
    Ok(duality_sides(lambda, p)?.holds)
}

/// A moment together with the pairing `(λ'|λ')` that sets its growth scale.
///
/// The ratio `moment / p^{(λ'|λ')/2}` (class groups) or
/// `moment / p^{(λ'|λ')}` (Sha) can involve a half-integer power of `p`, so
/// it is kept as this pair; compare via [`BoundRatio::squared_ratio`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundRatio {
    #[serde(serialize_with = "serialize_rational")]
    pub moment: ExactRational,
    pub pairing: u64,
    /// The scale is `p^{pairing · scale_halves / 2}`.
    pub scale_halves: u32,
    pub p: u64,
}

impl BoundRatio {
    /// `(moment / scale)²`, exact.
    pub fn squared_ratio(&self) -> ExactRational {
        let e = self.pairing as i64 * self.scale_halves as i64;
        &self.moment * &self.moment / ipow(self.p, e)
    }
}

pub fn bound_ratio(family: &Family, lambda: &Partition, p: u64) -> Result<BoundRatio> {
    let scale_halves = match family {
        Family::ClassGroup { .. } => 1,
        Family::Sha { .. } => 2,
        Family::Selmer { .. } => {
            return Err(Error::Unsupported(
                "no growth bound is available for the Selmer family".into(),
            ))
        }
    };
    let lc = lambda.conjugate();
    Ok(BoundRatio {
        moment: moment(family, lambda, p)?,
        pairing: lc.pairing(&lc),
        scale_halves,
        p,
    })
}
