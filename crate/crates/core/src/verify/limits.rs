//! Large-ℓ and large-p limits of the Selmer marginal, and the large-ℓ limit
//! `Q_{q,ℓ,1}(x) -> 1/(x q²; q)_∞`.

use serde_json::json;

use crate::error::Result;
use crate::numerics::{fraction_string, int, rat, Enclosure, ExactRational};
use crate::qseries::{andrews_q, qpoch_inf};
use crate::rank_laws::selmer_f;
use crate::verify::VerificationReport;

fn f_limit(p: u64, ell: u32, rank: u32, target: ExactRational, tol: ExactRational) -> Result<VerificationReport> {
    let v = selmer_f(p, ell, rank, &(&tol * rat(1, 1000)))?.probability;
    Ok(VerificationReport::judge_distance(
        "limit_f",
        json!({"p": p, "l": ell, "rank": rank}),
        v,
        Enclosure::exact(target),
        tol,
    ))
}

fn q_limit(q: ExactRational, ell: u32, x: ExactRational, tol: ExactRational) -> Result<VerificationReport> {
    let inner = &tol * rat(1, 1000);
    let lhs = andrews_q(&q, ell, &x, &inner)?;
    let rhs = qpoch_inf(&(&x * &q * &q), &q, &inner)?.recip()?;
    Ok(VerificationReport::judge_distance(
        "limit_q",
        json!({"q": fraction_string(&q), "l": ell, "x": fraction_string(&x)}),
        lhs,
        rhs,
        tol,
    ))
}

/// The standard limit checks:
///
/// * `|f(2,40,0) - 1/2| < 10^-4`, `|f(2,40,2)| < 10^-4`
/// * `|f(101,1,0) - 1/2| < 10^-2`
/// * `Q_{q,40,1}(x)` within `10^-6` of `1/(x q²;q)_∞` at `(q,x) = (1/9,1/3)`
///   and `(1/3,1/9)`
///
/// `scale` multiplies every threshold (1 for the standard values).
pub fn check_limits(scale: &ExactRational) -> Result<Vec<VerificationReport>> {
    let half = rat(1, 2);
    Ok(vec![
        f_limit(2, 40, 0, half.clone(), rat(1, 10_000) * scale)?,
        f_limit(2, 40, 2, int(0), rat(1, 10_000) * scale)?,
        f_limit(101, 1, 0, half, rat(1, 100) * scale)?,
        q_limit(rat(1, 9), 40, rat(1, 3), rat(1, 1_000_000) * scale)?,
        q_limit(rat(1, 3), 40, rat(1, 9), rat(1, 1_000_000) * scale)?,
    ])
}
