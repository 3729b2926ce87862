//! q-shifted factorials, Gaussian binomials, infinite q-products, the
//! nested rank multi-sum and Andrews' series `Q_{q,ℓ,1}(x)`.
//!
//! Finite objects are exact. Infinite products and series return
//! [`Enclosure`]s whose width is at most the requested tolerance; truncation
//! points are chosen adaptively from explicit tail bounds.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{domain, invalid, Result};
use crate::numerics::{int, pow_signed, rat, Enclosure, ExactRational, WORK_BITS};

/// Hard cap on truncation indices; reaching it means the parameters are
/// outside any sensible convergence regime.
const MAX_TERMS: u64 = 100_000;

/// `(a;q)_k` for any integer `k`, including the negative branch
/// `1 / ((1 - a q^{-1}) ... (1 - a q^{k}))`.
pub fn qpoch_finite(a: &ExactRational, q: &ExactRational, k: i64) -> Result<ExactRational> {
    let mut acc = ExactRational::one();
    if k >= 0 {
        let mut qj = ExactRational::one();
        for _ in 0..k {
            acc *= ExactRational::one() - a * &qj;
            qj *= q;
        }
        return Ok(acc);
    }
    if q.is_zero() {
        return Err(domain("(a;q)_k with k < 0 needs q != 0"));
    }
    for j in 1..=(-k) {
        let f = ExactRational::one() - a * pow_signed(q, -j);
        if f.is_zero() {
            return Err(domain(format!("(a;q)_{k}: factor 1 - a q^-{j} vanishes")));
        }
        acc /= f;
    }
    Ok(acc)
}

/// Polynomial with integer coefficients, stored ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0)
    }

    /// `x^d`.
    pub fn monomial(d: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); d + 1];
        coeffs[d] = BigInt::one();
        Self { coeffs }
    }

    pub fn from_coeffs<T: Into<BigInt>>(coeffs: Vec<T>) -> Self {
        let mut p = Self {
            coeffs: coeffs.into_iter().map(Into::into).collect(),
        };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_palindromic(&self) -> bool {
        self.coeffs.iter().eq(self.coeffs.iter().rev())
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                self.coeffs.get(i).cloned().unwrap_or_default()
                    + other.coeffs.get(i).cloned().unwrap_or_default()
            })
            .collect();
        let mut p = IntPoly { coeffs };
        p.trim();
        p
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        IntPoly { coeffs }
    }

    /// Multiplies by `x^d`.
    pub fn shift(&self, d: usize) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); d];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPoly { coeffs }
    }

    pub fn eval(&self, x: &ExactRational) -> ExactRational {
        self.coeffs.iter().rev().fold(ExactRational::zero(), |acc, c| {
            acc * x + ExactRational::from_integer(c.clone())
        })
    }

    /// Divides in place by `1 - x^i` (exact; the caller guarantees
    /// divisibility).
    fn div_one_minus_pow(&mut self, i: usize) {
        for j in i..self.coeffs.len() {
            let prev = self.coeffs[j - i].clone();
            self.coeffs[j] += prev;
        }
        // exact division leaves zeros above the quotient's degree
        self.trim();
    }
}

impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            match c.to_i64() {
                Some(v) => seq.serialize_element(&v)?,
                None => seq.serialize_element(&c.to_string())?,
            }
        }
        seq.end()
    }
}

/// The Gaussian binomial `[n k]_q` as a polynomial in `q`; zero when `k` is
/// out of range.
pub fn qbinom_poly(n: i64, k: i64) -> IntPoly {
    if k < 0 || k > n {
        return IntPoly::zero();
    }
    let k = k.min(n - k) as usize;
    let n = n as usize;
    // prod_{i=1}^{k} (1 - q^{n-k+i}) / (1 - q^i), dividing as we go.
    let mut p = IntPoly::one();
    for i in 1..=k {
        let mut factor = vec![BigInt::zero(); n - k + i + 1];
        factor[0] = BigInt::one();
        factor[n - k + i] = BigInt::from(-1);
        p = p.mul(&IntPoly { coeffs: factor });
        p.div_one_minus_pow(i);
    }
    p
}

/// `[n k]_q` evaluated at a rational `q`; zero when `k` is out of range.
pub fn qbinom(n: i64, k: i64, q: &ExactRational) -> ExactRational {
    if k < 0 || k > n {
        return ExactRational::zero();
    }
    let k = k.min(n - k);
    if q.abs().is_one() {
        return qbinom_poly(n, k).eval(q);
    }
    let mut num = ExactRational::one();
    let mut den = ExactRational::one();
    for i in 1..=k {
        num *= ExactRational::one() - pow_signed(q, n - k + i);
        den *= ExactRational::one() - pow_signed(q, i);
    }
    num / den
}

fn check_base(q: &ExactRational) -> Result<()> {
    if !q.is_positive() || q >= &ExactRational::one() {
        return Err(domain(format!("base q = {q} must satisfy 0 < q < 1")));
    }
    Ok(())
}

fn check_tol(tol: &ExactRational) -> Result<()> {
    if !tol.is_positive() {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// Enclosure of `(a;q)_∞` with width at most `tol`.
///
/// Leading factors are multiplied exactly (up to outward rounding) until the
/// remaining ones all lie on one side of 1; the rest is bracketed by
/// `∏_{k>=N}(1 - a q^k) ∈ [1 - t, 1]` (for `a > 0`) or `[1, 1/(1 - t)]`
/// (for `a < 0`), with `t = |a| q^N / (1 - q) < 1`.
pub fn qpoch_inf(a: &ExactRational, q: &ExactRational, tol: &ExactRational) -> Result<Enclosure> {
    check_base(q)?;
    check_tol(tol)?;
    if a.is_zero() {
        return Ok(Enclosure::one());
    }
    let one = ExactRational::one();
    let one_minus_q = &one - q;
    let half_tol = tol / int(2);
    let mut head = Enclosure::one();
    let mut aqk = a.clone();
    for _ in 0..MAX_TERMS {
        let t = aqk.abs() / &one_minus_q;
        if t < one {
            let tail = if a.is_positive() {
                Enclosure::new(&one - &t, one.clone())?
            } else {
                Enclosure::new(one.clone(), (&one - &t).recip())?
            };
            let cand = &head * &tail;
            if cand.width() <= half_tol {
                return Ok(cand.round_outward(WORK_BITS));
            }
        }
        let factor = &one - &aqk;
        if factor.is_zero() {
            return Ok(Enclosure::zero());
        }
        head = head.scale(&factor).round_outward(WORK_BITS);
        aqk *= q;
    }
    Err(domain(format!("(a;q)_∞ did not converge for a = {a}, q = {q}")))
}

/// A positive rational lower bound for `(q;q)_∞`.
pub fn qpoch_inf_lower(q: &ExactRational) -> Result<ExactRational> {
    let e = qpoch_inf(q, q, &rat(1, 1_000_000))?;
    Ok(e.lo().clone())
}

fn round_up(x: &ExactRational) -> ExactRational {
    Enclosure::exact(x.clone()).round_outward(WORK_BITS).hi().clone()
}

/// Upper bound for `Σ_{n >= from} q^{n²} z^n` (`0 < q < 1`, `z > 0`).
///
/// Terms are summed until the ratio `q^{2n+1} z` of consecutive terms drops
/// to 1/2; from there the remainder is at most twice the current term.
pub fn gaussian_tail_bound(q: &ExactRational, z: &ExactRational, from: u64) -> Result<ExactRational> {
    check_base(q)?;
    if !z.is_positive() {
        return Err(invalid(format!("weight z = {z} must be positive")));
    }
    let half = rat(1, 2);
    let mut acc = ExactRational::zero();
    let mut term = pow_signed(q, (from * from) as i64) * pow_signed(z, from as i64);
    for n in from..from + MAX_TERMS {
        let ratio = pow_signed(q, 2 * n as i64 + 1) * z;
        if ratio <= half {
            return Ok(round_up(&(acc + term * int(2))));
        }
        acc += &term;
        term *= ratio;
    }
    Err(domain("gaussian tail did not converge"))
}

/// `Σ_{ν_1 >= ... >= ν_{ℓ-1} >= 0} q^{Σν_j²} z^{Σν_j} / ∏_j (q;q)_{ν_j - ν_{j+1}}`
/// (with `ν_ℓ = 0`); equals 1 for `ℓ = 1`. All terms are positive.
///
/// The sum is evaluated by a transfer recursion over the chain
/// `ν_1 >= ν_2 >= ...`, truncated at `ν_1 <= M`. The discarded part is at
/// most `T(M+1) · G^{ℓ-2} / (q;q)_∞^{ℓ-1}` with `G = Σ_n q^{n²} z^n` and
/// `T(M+1)` its tail from `M+1`.
pub fn rank_multisum_weighted(
    q: &ExactRational,
    ell: u32,
    z: &ExactRational,
    tol: &ExactRational,
) -> Result<Enclosure> {
    check_tol(tol)?;
    if ell == 0 {
        return Err(invalid("ℓ must be at least 1"));
    }
    check_base(q)?;
    if !z.is_positive() {
        return Err(invalid(format!("weight z = {z} must be positive")));
    }
    if ell == 1 {
        return Ok(Enclosure::one());
    }
    let depth = (ell - 1) as usize;
    let qinf = qpoch_inf_lower(q)?;
    let g = gaussian_tail_bound(q, z, 0)?;
    let spread = pow_signed(&g, depth as i64 - 1) / pow_signed(&qinf, depth as i64);
    let half_tol = tol / int(2);
    let mut m = 0u64;
    let tail = loop {
        let t = gaussian_tail_bound(q, z, m + 1)? * &spread;
        if t <= half_tol {
            break round_up(&t);
        }
        m += 1;
        if m > MAX_TERMS {
            return Err(domain("rank multi-sum truncation did not converge"));
        }
    };
    let m = m as usize;

    let mut inv_qq = Vec::with_capacity(m + 1);
    let mut qq = ExactRational::one();
    let mut qi = q.clone();
    for i in 0..=m {
        if i > 0 {
            qq *= ExactRational::one() - &qi;
            qi *= q;
        }
        inv_qq.push(Enclosure::exact(qq.recip()).round_outward(WORK_BITS));
    }
    let weights: Vec<Enclosure> = (0..=m)
        .map(|n| {
            let w = pow_signed(q, (n * n) as i64) * pow_signed(z, n as i64);
            Enclosure::exact(w).round_outward(WORK_BITS)
        })
        .collect();

    let mut v: Vec<Enclosure> = (0..=m)
        .map(|n| if n == 0 { Enclosure::one() } else { Enclosure::zero() })
        .collect();
    for _ in 0..depth {
        let next: Vec<Enclosure> = (0..=m)
            .map(|n| {
                let mut acc = Enclosure::zero();
                for (k, vk) in v.iter().enumerate().take(n + 1) {
                    if vk.hi().is_zero() {
                        continue;
                    }
                    acc = &acc + &(vk * &inv_qq[n - k]);
                }
                (&acc * &weights[n]).round_outward(WORK_BITS)
            })
            .collect();
        v = next;
    }
    let sum = v.iter().fold(Enclosure::zero(), |acc, x| &acc + x);
    Ok(sum.extend_up(&tail).round_outward(WORK_BITS))
}

/// [`rank_multisum_weighted`] with `z = q^s`.
pub fn rank_multisum(q: &ExactRational, ell: u32, s: i64, tol: &ExactRational) -> Result<Enclosure> {
    check_base(q)?;
    rank_multisum_weighted(q, ell, &pow_signed(q, s), tol)
}

/// Andrews' `Q_{q,ℓ,1}(x)`. For `ℓ = 1` this is identically 1 and is
/// returned exactly; otherwise see [`andrews_q_series`].
pub fn andrews_q(q: &ExactRational, ell: u32, x: &ExactRational, tol: &ExactRational) -> Result<Enclosure> {
    if ell == 1 {
        check_base(q)?;
        check_tol(tol)?;
        return Ok(Enclosure::one());
    }
    andrews_q_series(q, ell, x, tol)
}

/// Direct evaluation of
/// `Σ_{n>=0} (-1)^n x^{ℓn} q^{n(n+1)(2ℓ+1)/2 - n} (1 - x q^{2n+1}) / ((q;q)_n (x q^{n+1};q)_∞)`.
///
/// The numerator factor `1 - x q^{2n+1}` is cancelled against the matching
/// factor of `(x q^{n+1};q)_∞`, so terms stay defined when `x q^{2n+1} = 1`
/// (e.g. `n = 0`, `x = 1/q`). Past the index where every remaining
/// denominator factor is within 1/2 of 1 and consecutive term bounds shrink
/// by at least 1/2, the tail is bounded geometrically.
pub fn andrews_q_series(
    q: &ExactRational,
    ell: u32,
    x: &ExactRational,
    tol: &ExactRational,
) -> Result<Enclosure> {
    if ell == 0 {
        return Err(invalid("ℓ must be at least 1"));
    }
    check_tol(tol)?;
    if check_base(q).is_err() {
        return Err(domain(format!(
            "Andrews series does not converge for q = {q} (need 0 < q < 1)"
        )));
    }
    let one = ExactRational::one();
    let half = rat(1, 2);
    let l = ell as i64;
    let xa = x.abs();
    let qinf = qpoch_inf_lower(q)?;
    let one_minus_q = &one - q;
    let exponent = |n: i64| n * (n + 1) * (2 * l + 1) / 2 - n;

    // n1: from here on |x| q^{n+1} / (1 - q) <= 1/2.
    let mut n1 = 0i64;
    while &xa * pow_signed(q, n1 + 1) / &one_minus_q > half {
        n1 += 1;
        if n1 as u64 > MAX_TERMS {
            return Err(domain("Andrews series: denominators never settle"));
        }
    }
    // B_n = |x|^{ℓn} q^{e(n)} * 2 / (q;q)_∞ bounds |term_n| for n >= n1.
    let bound = |n: i64| pow_signed(&xa, l * n) * pow_signed(q, exponent(n)) * int(2) / &qinf;
    let ratio = |n: i64| pow_signed(&xa, l) * pow_signed(q, (n + 1) * (2 * l + 1) - 1);
    let mut n0 = n1;
    while ratio(n0) > half {
        n0 += 1;
        if n0 as u64 > MAX_TERMS {
            return Err(domain(format!(
                "Andrews series: term ratio never drops below 1/2 for x = {x}, q = {q}"
            )));
        }
    }
    let quarter_tol = tol / int(4);
    let mut last = n0;
    let tail = loop {
        let t = if xa.is_zero() { ExactRational::zero() } else { bound(last + 1) * int(2) };
        if t <= quarter_tol {
            break round_up(&t);
        }
        last += 1;
        if last as u64 > MAX_TERMS {
            return Err(domain("Andrews series: tail bound did not converge"));
        }
    };

    let per_term = tol / int(4 * (last + 1));
    let mut sum = Enclosure::zero();
    for n in 0..=last {
        // Exact part: (-1)^n x^{ℓn} q^{e(n)} / ((q;q)_n (x q^{n+1};q)_n).
        let mut coeff = pow_signed(x, l * n) * pow_signed(q, exponent(n));
        if n % 2 == 1 {
            coeff = -coeff;
        }
        let den = qpoch_finite(q, q, n)? * qpoch_finite(&(x * pow_signed(q, n + 1)), q, n)?;
        if den.is_zero() {
            return Err(domain(format!(
                "Andrews series term {n} has a vanishing denominator at x = {x}"
            )));
        }
        coeff /= den;
        if coeff.is_zero() {
            continue;
        }
        let a = x * pow_signed(q, 2 * n + 2);
        let mut inner = &per_term / (coeff.abs() + &one);
        let mut term = None;
        for _ in 0..6 {
            let p = qpoch_inf(&a, q, &inner)?;
            if p.contains_zero() {
                if p.is_exact() {
                    return Err(domain(format!(
                        "Andrews series term {n}: (x q^{{2n+2}};q)_∞ vanishes"
                    )));
                }
                inner /= int(1 << 30);
                continue;
            }
            let t = p.recip()?.scale(&coeff);
            if t.width() <= per_term {
                term = Some(t);
                break;
            }
            inner /= int(1 << 30);
        }
        let term = term.ok_or_else(|| domain(format!("Andrews series term {n} could not be enclosed")))?;
        sum = (&sum + &term).round_outward(WORK_BITS);
    }
    Ok(sum.widen(&tail).round_outward(WORK_BITS))
}
