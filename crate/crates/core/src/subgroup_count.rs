//! Subgroup counts `C_{λ,μ}(p)`: the number of subgroups of type `μ` in a
//! finite abelian p-group of type `λ`.
//!
//! With `λ'`, `μ'` the conjugates (zero-padded),
//!
//! ```text
//! C_{λ,μ}(p) = p^{Σ_i μ'_{i+1}(λ'_i - μ'_i)} ∏_i [λ'_i - μ'_{i+1}, λ'_i - μ'_i]_p
//! ```
//!
//! with `i` running over `1..=λ_1`. The count is also available in polynomial
//! form and, for small groups, by explicit enumeration of subgroups.

use std::collections::{HashMap, HashSet, VecDeque};

use num_traits::Zero;

use crate::error::{invalid, Error, Result};
use crate::numerics::{pow_signed, ExactRational};
use crate::partitions::Partition;
use crate::qseries::{qbinom, qbinom_poly, IntPoly};

/// Default cap on `|G| = p^{|λ|}` for the brute-force oracle.
pub const DEFAULT_GROUP_CAP: u64 = 1 << 10;

/// The abelian p-group `⊕_i Z/p^{λ_i}Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupType {
    pub lambda: Partition,
    pub p: u64,
}

impl GroupType {
    pub fn new(lambda: Partition, p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(invalid(format!("{p} is not prime")));
        }
        Ok(Self { lambda, p })
    }

    /// `Some(p^{|λ|})`, or `None` on overflow.
    pub fn order(&self) -> Option<u64> {
        self.p.checked_pow(u32::try_from(self.lambda.size()).ok()?)
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Per-index pieces of the closed form: the exponent and the list of
/// `(n, k)` Gaussian binomial arguments.
fn closed_form_pieces(lambda: &Partition, mu: &Partition) -> (i64, Vec<(i64, i64)>) {
    let lc = lambda.conjugate();
    let mc = mu.conjugate();
    let width = lambda.first_part() as usize;
    let mut exp = 0i64;
    let mut binoms = Vec::with_capacity(width);
    for i in 0..width {
        let l = lc.part(i) as i64;
        let m = mc.part(i) as i64;
        let m_next = mc.part(i + 1) as i64;
        exp += m_next * (l - m);
        binoms.push((l - m_next, l - m));
    }
    (exp, binoms)
}

/// `C_{λ,μ}` evaluated at `base` (substituted directly, no expansion).
/// Zero when `μ ⊄ λ`.
pub fn subgroup_count(lambda: &Partition, mu: &Partition, base: &ExactRational) -> ExactRational {
    if !lambda.contains(mu) {
        return ExactRational::zero();
    }
    let (exp, binoms) = closed_form_pieces(lambda, mu);
    binoms
        .into_iter()
        .fold(pow_signed(base, exp), |acc, (n, k)| acc * qbinom(n, k, base))
}

/// `C_{λ,μ}` as an expanded polynomial in the base.
pub fn subgroup_count_poly(lambda: &Partition, mu: &Partition) -> IntPoly {
    if !lambda.contains(mu) {
        return IntPoly::zero();
    }
    let (exp, binoms) = closed_form_pieces(lambda, mu);
    binoms
        .into_iter()
        .fold(IntPoly::monomial(exp as usize), |acc, (n, k)| acc.mul(&qbinom_poly(n, k)))
}

/// Explicit group `⊕ Z/p^{λ_i}` with elements encoded in mixed radix.
struct ExplicitGroup {
    p: u64,
    exps: Vec<u32>,
    moduli: Vec<u64>,
    order: usize,
    /// `e` with `ord(g) = p^e`.
    order_exp: Vec<u32>,
}

impl ExplicitGroup {
    fn new(lambda: &Partition, p: u64) -> Self {
        let moduli: Vec<u64> = lambda.parts().iter().map(|&e| p.pow(e)).collect();
        let order = moduli.iter().product::<u64>() as usize;
        let mut g = ExplicitGroup {
            p,
            exps: lambda.parts().to_vec(),
            moduli,
            order,
            order_exp: Vec::new(),
        };
        g.order_exp = (0..order).map(|x| g.order_exponent(x)).collect();
        g
    }

    fn digits(&self, mut x: usize) -> Vec<u64> {
        self.moduli
            .iter()
            .map(|&m| {
                let d = x as u64 % m;
                x /= m as usize;
                d
            })
            .collect()
    }

    fn encode(&self, d: &[u64]) -> usize {
        let mut x = 0usize;
        for (&di, &m) in d.iter().zip(&self.moduli).rev() {
            x = x * m as usize + di as usize;
        }
        x
    }

    fn add(&self, a: usize, b: usize) -> usize {
        let da = self.digits(a);
        let db = self.digits(b);
        let s: Vec<u64> = da
            .iter()
            .zip(&db)
            .zip(&self.moduli)
            .map(|((x, y), m)| (x + y) % m)
            .collect();
        self.encode(&s)
    }

    /// `ord(x) = p^e`; coordinate `d` in `Z/p^{e_i}` has order `p^{e_i - v_p(d)}`.
    fn order_exponent(&self, x: usize) -> u32 {
        self.digits(x)
            .iter()
            .zip(&self.exps)
            .map(|(&d, &e)| {
                if d == 0 {
                    return 0;
                }
                let mut v = 0;
                let mut d = d;
                while d % self.p == 0 {
                    d /= self.p;
                    v += 1;
                }
                e - v
            })
            .max()
            .unwrap_or(0)
    }
}

type Bits = Vec<u64>;

fn bits_insert(b: &mut Bits, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn bits_has(b: &Bits, i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

/// Type of a subgroup from its counts of elements of order dividing `p^j`:
/// `|H[p^j]| = p^{μ'_1 + ... + μ'_j}`.
fn classify(g: &ExplicitGroup, members: &[usize]) -> Partition {
    let max_e = members.iter().map(|&x| g.order_exp[x]).max().unwrap_or(0);
    let mut prev = 1u64;
    let mut conj = Vec::new();
    for j in 1..=max_e {
        let c = members.iter().filter(|&&x| g.order_exp[x] <= j).count() as u64;
        let mut ratio = c / prev;
        let mut layer = 0u32;
        while ratio > 1 {
            ratio /= g.p;
            layer += 1;
        }
        conj.push(layer);
        prev = c;
    }
    Partition::new(conj).conjugate()
}

/// Every subgroup of the group of type `λ`, by breadth-first closure
/// `H -> <H, g>` from the trivial subgroup, deduplicated by element set.
/// Returns a histogram `type -> count`.
pub fn subgroup_type_histogram(lambda: &Partition, p: u64, cap: u64) -> Result<HashMap<Partition, u64>> {
    let gt = GroupType::new(lambda.clone(), p)?;
    let order = gt
        .order()
        .filter(|&o| o <= cap)
        .ok_or_else(|| Error::Resource(format!("group of type ({lambda}) at p = {p} exceeds {cap} elements")))?;
    let g = ExplicitGroup::new(lambda, p);
    debug_assert_eq!(g.order as u64, order);
    let words = g.order.div_ceil(64);
    let mut trivial = vec![0u64; words];
    bits_insert(&mut trivial, 0);

    let mut seen: HashSet<Bits> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(trivial.clone());
    queue.push_back((trivial, vec![0usize]));
    let mut hist: HashMap<Partition, u64> = HashMap::new();
    while let Some((bits, members)) = queue.pop_front() {
        *hist.entry(classify(&g, &members)).or_insert(0) += 1;
        for x in 0..g.order {
            if bits_has(&bits, x) {
                continue;
            }
            // <H, x> = union of cosets k x + H
            let mut nb = bits.clone();
            let mut nm = members.clone();
            let mut kx = x;
            while kx != 0 {
                for &h in &members {
                    let y = g.add(kx, h);
                    if !bits_has(&nb, y) {
                        bits_insert(&mut nb, y);
                        nm.push(y);
                    }
                }
                kx = g.add(kx, x);
            }
            if seen.insert(nb.clone()) {
                queue.push_back((nb, nm));
            }
        }
    }
    Ok(hist)
}

/// Number of subgroups of type `μ` in the group of type `λ`, by explicit
/// enumeration. Independent of the closed form.
pub fn count_subgroups_bruteforce(lambda: &Partition, mu: &Partition, p: u64) -> Result<u64> {
    count_subgroups_bruteforce_capped(lambda, mu, p, DEFAULT_GROUP_CAP)
}

pub fn count_subgroups_bruteforce_capped(lambda: &Partition, mu: &Partition, p: u64, cap: u64) -> Result<u64> {
    let hist = subgroup_type_histogram(lambda, p, cap)?;
    Ok(hist.get(mu).copied().unwrap_or(0))
}

/// `Σ_{μ ⊆ λ} C_{λ,μ}(p)`, the total number of subgroups.
pub fn total_subgroups(lambda: &Partition, p: u64) -> ExactRational {
    let base = ExactRational::from_integer(p.into());
    lambda
        .subpartitions()
        .map(|mu| subgroup_count(lambda, &mu, &base))
        .fold(ExactRational::zero(), |a, b| a + b)
}
