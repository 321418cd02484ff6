//! Real-valued evaluators for the bound shapes, and fits of their free
//! constants against datasets.
//!
//! Every inner `log log P` is taken as `log_*(log_* P)`, so the shapes stay
//! positive for `P < e^e`; exponents `kappa` are clamped to `(0, 1/2]`
//! (`(0, 1 - 1/d]` for degree `d`). None of the free constants has a
//! default: callers pass them or fit them.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;

use crate::arith::PrimeSet;
use crate::error::{domain, Error, Result};
use crate::num::{ln, ln_big};
use crate::search::Dataset;

/// `max(1, log x)`.
pub fn log_star(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(domain(alloc::format!("log_star needs a positive finite input, got {x}")));
    }
    Ok(ln(x).max(1.0))
}

fn positive(name: &str, c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(domain(alloc::format!("{name} must be positive and finite, got {c}")))
    }
}

/// `s`, `P = max p_i` and `log p_1 * ... * log p_s` for a set S.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimeStats {
    pub s: usize,
    pub max_prime: u64,
    pub log_product: f64,
}

impl PrimeStats {
    pub fn new(set: &PrimeSet) -> Result<Self> {
        let max_prime = set.max().ok_or_else(|| domain("S must be non-empty"))?;
        let log_product = set.primes().iter().map(|&p| ln(p as f64)).product();
        Ok(PrimeStats { s: set.len(), max_prime, log_product })
    }

    /// `log_*(log_* P)`.
    pub fn guarded_loglog(&self) -> f64 {
        let inner = ln(self.max_prime as f64).max(1.0);
        ln(inner).max(1.0)
    }

    fn c_pow_s(&self, c: f64) -> f64 {
        libm::pow(c, self.s as f64)
    }
}

/// `(c^s * loglog P * (log p_1 ... log p_s)^2)^-1` before clamping.
pub fn kappa_p2_raw(stats: &PrimeStats, c: f64) -> Result<f64> {
    positive("c", c)?;
    Ok(1.0 / (stats.c_pow_s(c) * stats.guarded_loglog() * stats.log_product * stats.log_product))
}

/// The exponent `kappa` for squares, clamped to `(0, 1/2]`.
pub fn kappa_p2(stats: &PrimeStats, c: f64) -> Result<f64> {
    Ok(kappa_p2_raw(stats, c)?.min(0.5))
}

/// `(c^s * (P * log p_1 ... log p_s)^{d!})^-1` for `d >= 3`, clamped to
/// `1 - 1/d`. Evaluated in log space; underflows to zero for large `d`.
pub fn kappa_pd(stats: &PrimeStats, c: f64, d: u32) -> Result<f64> {
    positive("c", c)?;
    if d < 3 {
        return Err(domain(alloc::format!("kappa_pd needs d >= 3, got {d}")));
    }
    let fact: f64 = (2..=d).map(f64::from).product();
    let ln_kappa = -(stats.s as f64 * ln(c) + fact * ln(stats.max_prime as f64 * stats.log_product));
    Ok(libm::exp(ln_kappa).min(1.0 - 1.0 / d as f64))
}

/// `(c^s * loglog P * log p_1 ... log p_s)^-1`, the exponent for sums of
/// two T-units. Not clamped.
pub fn tau_shape(stats: &PrimeStats, c: f64) -> Result<f64> {
    positive("c", c)?;
    Ok(1.0 / (stats.c_pow_s(c) * stats.guarded_loglog() * stats.log_product))
}

/// `exp(c * (log M)^{1/7})`.
pub fn schinzel_rhs(m: f64, c: f64) -> Result<f64> {
    if m.is_nan() || m < 3.0 {
        return Err(domain(alloc::format!("schinzel_rhs needs M >= 3, got {m}")));
    }
    positive("c", c)?;
    Ok(libm::exp(c * libm::pow(ln(m), 1.0 / 7.0)))
}

/// `log_* log X * log_* log_* log X / log_* log_* log_* log X`.
pub fn gpf_shape(x: f64) -> Result<f64> {
    if x.is_nan() || x < 3.0 {
        return Err(domain(alloc::format!("gpf_shape needs X >= 3, got {x}")));
    }
    gpf_shape_from_ln(ln(x))
}

/// [`gpf_shape`] given `log X`, for `X` beyond the range of `f64`.
pub fn gpf_shape_from_ln(ln_x: f64) -> Result<f64> {
    if ln_x.is_nan() || ln_x < ln(3.0) - 1e-15 {
        return Err(domain("gpf_shape needs X >= 3"));
    }
    let l1 = log_star(ln_x)?;
    let l2 = log_star(l1)?;
    let l3 = log_star(l2)?;
    Ok(l1 * l2 / l3)
}

/// `prod h_i * log_*(B * max(h_1..h_{n-1}) / h_n)`.
fn linear_form_core(heights: &[f64], b: f64) -> Result<f64> {
    if heights.len() < 2 {
        return Err(domain("a linear form needs at least two heights"));
    }
    if let Some(h) = heights.iter().find(|h| !h.is_finite() || **h < 1.0) {
        return Err(domain(alloc::format!("heights must be finite and >= 1, got {h}")));
    }
    if !b.is_finite() || b < 3.0 {
        return Err(domain(alloc::format!("B must be >= 3, got {b}")));
    }
    let (last, rest) = heights.split_last().expect("len >= 2");
    let max_rest = rest.iter().copied().fold(1.0, f64::max);
    let prod: f64 = heights.iter().product();
    Ok(prod * log_star(b * max_rest / last)?)
}

/// Archimedean lower bound for `log |alpha_1^{b_1} ... alpha_n^{b_n} - 1|`
/// (a negative number), with the constant `c1` supplied.
pub fn matveev_shape(heights: &[f64], b: f64, c1: f64) -> Result<f64> {
    positive("c1", c1)?;
    let n = heights.len() as f64;
    Ok(-libm::pow(c1, n) * linear_form_core(heights, b)?)
}

/// Upper bound for `v_p(alpha_1^{b_1} ... alpha_n^{b_n} - 1)` in a field of
/// degree `degree`, with the constant `c2` supplied.
pub fn yu_shape(p: u64, degree: u32, heights: &[f64], b: f64, c2: f64) -> Result<f64> {
    positive("c2", c2)?;
    if degree == 0 {
        return Err(domain("degree must be at least 1"));
    }
    if !crate::arith::is_prime_u64(p) {
        return Err(domain(alloc::format!("{p} is not prime")));
    }
    let n = heights.len() as f64;
    Ok(libm::pow(c2, n) * libm::pow(p as f64, degree as f64) * linear_form_core(heights, b)?)
}

/// Smallest `c` for which every eligible record satisfies
/// `[delta]_S <= |delta|^{1 - kappa_p2(c)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalFit {
    pub fitted_c: f64,
    pub fitted_kappa: f64,
    /// Index of the record with the largest ratio; it fixes `c` unless
    /// `clamped`.
    pub binding: usize,
    /// `1 - ratio` of the binding record.
    pub kappa_needed: f64,
    /// True when no record asks for `kappa < 1/2`, so the clamp decides `c`.
    pub clamped: bool,
    pub eligible: usize,
    /// Records whose difference is exactly an S-unit: no positive `kappa`
    /// fits them and they are left out.
    pub excluded_s_units: usize,
}

impl EmpiricalFit {
    /// The fitted inequality at the record's ratio.
    pub fn holds(&self, ratio: f64, stats: &PrimeStats, c: f64) -> Result<bool> {
        Ok(ratio <= 1.0 - kappa_p2(stats, c)?)
    }
}

fn eligible(ds: &Dataset) -> impl Iterator<Item = (usize, f64)> + '_ {
    let three = BigUint::from(3u32);
    ds.records.iter().enumerate().filter_map(move |(i, r)| {
        let ratio = r.ratio?;
        (*r.delta.magnitude() >= three && !r.spart.cofactor.is_one()).then_some((i, ratio))
    })
}

pub fn fit_effective_constant(ds: &Dataset) -> Result<EmpiricalFit> {
    let stats = PrimeStats::new(&ds.s)?;
    let three = BigUint::from(3u32);
    let excluded_s_units = ds
        .records
        .iter()
        .filter(|r| *r.delta.magnitude() >= three && r.spart.cofactor.is_one())
        .count();
    let mut count = 0;
    let mut binding: Option<(usize, f64)> = None;
    for (i, ratio) in eligible(ds) {
        count += 1;
        if binding.is_none_or(|(_, best)| ratio > best) {
            binding = Some((i, ratio));
        }
    }
    let (binding, max_ratio) =
        binding.ok_or_else(|| Error::Empty("no record with |delta| >= 3 and a non-unit cofactor".into()))?;
    let kappa_needed = 1.0 - max_ratio;
    let clamped = kappa_needed >= 0.5;
    let target = kappa_needed.min(0.5);
    let denom = target * stats.guarded_loglog() * stats.log_product * stats.log_product;
    let mut c = libm::pow(1.0 / denom, 1.0 / stats.s as f64);
    // Closed form up to rounding; step up until the binding record passes.
    while max_ratio > 1.0 - kappa_p2(&stats, c)? {
        c = f64::from_bits(c.to_bits() + 1);
    }
    Ok(EmpiricalFit {
        fitted_c: c,
        fitted_kappa: kappa_p2(&stats, c)?,
        binding,
        kappa_needed,
        clamped,
        eligible: count,
        excluded_s_units,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpfRow {
    pub index: usize,
    pub gpf: BigUint,
    /// `c_T * gpf_shape(X)` with `X = max(x^2, N, 3)`.
    pub bound: f64,
    pub quotient: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GpfReport {
    pub rows: Vec<GpfRow>,
    /// Smallest quotient and its row position.
    pub min_quotient: Option<(f64, usize)>,
    /// Records skipped because their factorization was incomplete.
    pub unknown_gpf: usize,
}

pub fn gpf_empirical_check(ds: &Dataset, c_t: f64) -> Result<GpfReport> {
    positive("c_T", c_t)?;
    let mut report = GpfReport::default();
    for (index, r) in ds.records.iter().enumerate() {
        let Some(g) = &r.gpf else {
            report.unknown_gpf += 1;
            continue;
        };
        let ln_x = (2.0 * ln_big(&r.x)).max(ln_big(&r.n_value)).max(ln(3.0));
        let bound = c_t * gpf_shape_from_ln(ln_x)?;
        let quotient = gpf_to_f64(g) / bound;
        if report.min_quotient.is_none_or(|(q, _)| quotient < q) {
            report.min_quotient = Some((quotient, report.rows.len()));
        }
        report.rows.push(GpfRow { index, gpf: g.clone(), bound, quotient });
    }
    Ok(report)
}

fn gpf_to_f64(g: &BigUint) -> f64 {
    if g.is_one() {
        1.0
    } else {
        libm::exp(ln_big(g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(p: &[u64]) -> PrimeStats {
        PrimeStats::new(&PrimeSet::new(p.iter().copied()).unwrap()).unwrap()
    }

    #[test]
    fn log_star_cases() {
        assert_eq!(log_star(0.5).unwrap(), 1.0);
        assert_eq!(log_star(core::f64::consts::E).unwrap(), 1.0);
        assert!((log_star(libm::exp(3.0)).unwrap() - 3.0).abs() < 1e-15);
        assert!(log_star(0.0).is_err());
        assert!(log_star(-1.0).is_err());
        assert!(log_star(f64::NAN).is_err());
    }

    #[test]
    fn kappa_examples() {
        let k = kappa_p2(&stats(&[17]), 3.0).unwrap();
        let want = 1.0 / (3.0 * ln(ln(17.0)) * ln(17.0) * ln(17.0));
        assert!((k - want).abs() < 1e-15);
        assert!((k - 0.0399).abs() < 1e-4);
        // Guard and clamp both active at P = 2.
        assert!((kappa_p2_raw(&stats(&[2]), 1.0).unwrap() - 1.0 / (ln(2.0) * ln(2.0))).abs() < 1e-12);
        assert_eq!(kappa_p2(&stats(&[2]), 1.0).unwrap(), 0.5);
        assert!(kappa_p2(&stats(&[17]), 1e12).unwrap() < 1e-12);
        assert!(kappa_p2(&stats(&[17]), 0.0).is_err());
    }

    #[test]
    fn kappa_pd_examples() {
        let k = kappa_pd(&stats(&[2]), 1.0, 3).unwrap();
        assert!((k - libm::pow(2.0 * ln(2.0), -6.0)).abs() < 1e-12);
        assert!((k - 0.1409).abs() < 1e-4);
        assert!(kappa_pd(&stats(&[2]), 1.0, 4).unwrap() < k);
        assert!(kappa_pd(&stats(&[2, 5]), 1.0, 3).unwrap() < k);
        assert!(kappa_pd(&stats(&[2]), 1.0, 2).is_err());
    }

    #[test]
    fn tau_examples() {
        let t = tau_shape(&stats(&[17]), 3.0).unwrap();
        assert!((t - 0.1130).abs() < 1e-4);
        assert!(t >= kappa_p2(&stats(&[17]), 3.0).unwrap());
    }

    #[test]
    fn schinzel_examples() {
        let v = schinzel_rhs(libm::exp(7.0), 1.0).unwrap();
        assert!((v - libm::exp(libm::pow(7.0, 1.0 / 7.0))).abs() < 1e-12);
        assert!((v - 3.745).abs() < 1e-3);
        assert!((schinzel_rhs(1e6, 1e-12).unwrap() - 1.0).abs() < 1e-10);
        assert!(schinzel_rhs(2.0, 1.0).is_err());
    }

    #[test]
    fn gpf_shape_examples() {
        let e = core::f64::consts::E;
        assert!((gpf_shape(libm::exp(e)).unwrap() - 1.0).abs() < 1e-12);
        let v = gpf_shape(libm::exp(libm::exp(3.0))).unwrap();
        assert!((v - 3.0 * ln(3.0)).abs() < 1e-9);
        assert!((v - 3.296).abs() < 1e-3);
        assert!(gpf_shape(2.0).is_err());
    }

    #[test]
    fn linear_form_examples() {
        assert!((matveev_shape(&[1.0, 1.0], 3.0, 1.0).unwrap() + ln(3.0)).abs() < 1e-15);
        assert_eq!(matveev_shape(&[1.0, 100.0], 3.0, 1.0).unwrap(), -100.0);
        let scaled = matveev_shape(&[1.0, 2.0, 3.0], 5.0, 2.0).unwrap();
        let base = matveev_shape(&[1.0, 2.0, 3.0], 5.0, 1.0).unwrap();
        assert!((scaled - 8.0 * base).abs() < 1e-12);
        assert!((yu_shape(2, 1, &[1.0, 1.0], 3.0, 1.0).unwrap() - 2.0 * ln(3.0)).abs() < 1e-15);
        let h = libm::exp(100.0);
        assert!((yu_shape(2, 1, &[1.0, h], 3.0, 1.0).unwrap() - 2.0 * h).abs() / h < 1e-15);
        assert!(matveev_shape(&[], 3.0, 1.0).is_err());
        assert!(matveev_shape(&[1.0], 3.0, 1.0).is_err());
        assert!(matveev_shape(&[0.5, 1.0], 3.0, 1.0).is_err());
        assert!(yu_shape(4, 1, &[1.0, 1.0], 3.0, 1.0).is_err());
    }

    #[test]
    fn fit_on_hensel_family() {
        use crate::arith::{ExponentVector, FactorBudget};
        use crate::hensel::witness_family;
        let a = ExponentVector::new(PrimeSet::new([3]).unwrap(), alloc::vec![2]).unwrap();
        let fam = witness_family(&a, 7, 2..16);
        let ds = Dataset::from_witnesses(&fam.witnesses, &FactorBudget::default()).unwrap();
        let fit = fit_effective_constant(&ds).unwrap();
        let st = PrimeStats::new(&ds.s).unwrap();
        assert!(!fit.clamped);
        for r in &ds.records {
            assert!(fit.holds(r.ratio.unwrap(), &st, fit.fitted_c).unwrap());
        }
        let worst = ds.records[fit.binding].ratio.unwrap();
        assert!(!fit.holds(worst, &st, 0.99 * fit.fitted_c).unwrap());
        assert!(gpf_empirical_check(&ds, 1.0).unwrap().min_quotient.is_some());
    }

    #[test]
    fn fit_needs_records() {
        let s = PrimeSet::new([2]).unwrap();
        let ds = Dataset::new(s.clone(), PrimeSet::new([3]).unwrap(), crate::search::Origin::Imported, Vec::new(), Default::default());
        assert!(matches!(fit_effective_constant(&ds), Err(Error::Empty(_))));
        assert!(gpf_empirical_check(&ds, 1.0).unwrap().rows.is_empty());
    }
}
