//! The coding map on eventually-positive addresses and the semiconjugacy
//! check `π ∘ σ_n = f_n ∘ π`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::geometry::Point;
use super::system::IfsSystem;
use crate::symbolic::{self, Address, Digit, SymbolicError};

const MAX_PERIOD_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodingError {
    #[error("address {0} has no all-positive tail")]
    NotEventuallyPositive(String),
    #[error("address {0} has an adjacent cancelling pair")]
    NotReduced(String),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error("tail iteration did not converge (last step {last_step})")]
    NoConvergence { last_step: f64 },
    #[error("base points disagree by {gap} (limit depends on the base point)")]
    BasePointDependence { gap: f64 },
}

/// Limit of `f_P^m(b)` for the positive word `P`.
fn periodic_limit(ifs: &IfsSystem, period: &[Digit], base: Point, tol: f64) -> Result<Point, CodingError> {
    let space = ifs.space();
    let target = tol * 1e-3;
    let mut y = base;
    let mut step = f64::INFINITY;
    for _ in 0..MAX_PERIOD_ITERATIONS {
        let next = ifs.apply_word(period, y);
        step = space.distance(next, y);
        y = next;
        let scale = if y.is_infinite() {
            1.0
        } else {
            1.0 + y.x.abs() + y.y.abs()
        };
        if step <= target.max(4.0 * f64::EPSILON * scale) {
            return Ok(y);
        }
    }
    Err(CodingError::NoConvergence { last_step: step })
}

/// `π(ι)` for `ι ∈ 𝕁₊`: split at the first all-positive tail
/// `u·overline(P)`, evaluate `f_u(lim f_P^m(b))` from two base points, then
/// apply the (possibly inverse-containing) head.
pub fn coding_map(ifs: &IfsSystem, addr: &Address, tol: f64) -> Result<Point, CodingError> {
    let class = symbolic::validate(addr, ifs.n_maps())?;
    if !class.reduced {
        return Err(CodingError::NotReduced(addr.to_string()));
    }
    let k = addr
        .positive_tail_start()
        .ok_or_else(|| CodingError::NotEventuallyPositive(addr.to_string()))?;
    let head = addr.prefix(k);
    let tail = addr.tail(k);
    let [b0, b1] = ifs.base_points();
    let p0 = periodic_limit(ifs, tail.period(), b0, tol)?;
    let p1 = periodic_limit(ifs, tail.period(), b1, tol)?;
    let gap = ifs.space().distance(p0, p1);
    if gap > 2.0 * tol {
        return Err(CodingError::BasePointDependence { gap });
    }
    let tail_point = ifs.apply_word(tail.preperiod(), p0);
    Ok(ifs.apply_word(&head, tail_point))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemiconjugacyFailure {
    pub address: Address,
    pub digit: Digit,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemiconjugacyReport {
    pub checked: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub failures: Vec<SemiconjugacyFailure>,
}

impl SemiconjugacyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Random reduced eventually-periodic address with an all-positive period:
/// a preperiod of up to `max_pre` signed digits and a period of up to
/// `max_period` positive digits.
pub fn random_eventually_positive(rng: &mut ChaCha8Rng, n_maps: usize, max_pre: usize, max_period: usize) -> Address {
    let n = n_maps as i32;
    loop {
        let pre_len = rng.gen_range(0..=max_pre);
        let per_len = rng.gen_range(1..=max_period.max(1));
        let mut pre: Vec<Digit> = Vec::with_capacity(pre_len);
        for _ in 0..pre_len {
            let mut v = rng.gen_range(1..=n) * if rng.gen_bool(0.5) { 1 } else { -1 };
            if let Some(last) = pre.last() {
                while v == -last.value() {
                    v = rng.gen_range(1..=n) * if rng.gen_bool(0.5) { 1 } else { -1 };
                }
            }
            pre.push(Digit::new(v).unwrap());
        }
        let period: Vec<Digit> = (0..per_len)
            .map(|_| Digit::new(rng.gen_range(1..=n)).unwrap())
            .collect();
        let a = Address::periodic(pre, period);
        if a.is_reduced() {
            return a;
        }
    }
}

/// Checks `d(π(σ_n ι), f_n(π ι)) ≤ tol` for `n_samples` random addresses and
/// every digit `n` with `σ_n(ι) ∈ 𝕁₊`.
pub fn verify_semiconjugacy(
    ifs: &IfsSystem,
    n_samples: usize,
    tol: f64,
    rng_seed: u64,
) -> Result<SemiconjugacyReport, CodingError> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let space = ifs.space();
    let eval_tol = (tol * 1e-3).max(1e-15);
    let mut report = SemiconjugacyReport {
        checked: 0,
        max_residual: 0.0,
        tolerance: tol,
        failures: Vec::new(),
    };
    for _ in 0..n_samples {
        let addr = random_eventually_positive(&mut rng, ifs.n_maps(), 6, 3);
        let base = coding_map(ifs, &addr, eval_tol)?;
        for n in ifs.all_digits() {
            let image = symbolic::sigma(n, &addr);
            let class = symbolic::validate(&image, ifs.n_maps())?;
            if !class.eventually_positive {
                continue;
            }
            let lhs = coding_map(ifs, &image, eval_tol)?;
            let rhs = ifs.apply_digit(n, base);
            let residual = space.distance(lhs, rhs);
            report.checked += 1;
            report.max_residual = report.max_residual.max(residual);
            if residual > tol {
                report.failures.push(SemiconjugacyFailure {
                    address: addr.clone(),
                    digit: n,
                    residual,
                });
            }
        }
    }
    Ok(report)
}
