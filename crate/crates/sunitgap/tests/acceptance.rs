//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use sunitgap::config::{ConfigLayer, RunConfig};
use sunitgap::dataset_io::{load_dataset, write_dataset, DatasetFile};
use sunitgap_core::arith::{gpf, s_part, valuation, ExponentVector, FactorBudget, PrimeSet};
use sunitgap_core::bounds::{
    fit_effective_constant, kappa_p2, kappa_p2_raw, kappa_pd, log_star, tau_shape, yu_shape, PrimeStats,
};
use sunitgap_core::hensel::witness_family;
use sunitgap_core::quadfield::{
    fundamental_unit, is_squarefree, quad_valuation, reduce_height_with, IdealTag, QuadInt,
};
use sunitgap_core::search::{enumerate, solve_fixed_rhs, Dataset, SearchBudget};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn trial_spart(n: i64, s: &[u64]) -> (u64, u64) {
    let mut rest = n.unsigned_abs();
    let mut part = 1;
    for &p in s {
        while rest.is_multiple_of(p) {
            rest /= p;
            part *= p;
        }
    }
    (part, rest)
}

fn trial_gpf(n: u64) -> u64 {
    let (mut m, mut best, mut q) = (n, 1, 2);
    while q * q <= m {
        while m % q == 0 {
            m /= q;
            best = q;
        }
        q += 1;
    }
    if m > 1 {
        m.max(best)
    } else {
        best
    }
}

fn criterion_1() -> Outcome {
    let base = [2u64, 3, 5, 7];
    let sets: Vec<(Vec<u64>, PrimeSet)> = (0u8..16)
        .map(|mask| {
            let s: Vec<u64> = base.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
            let set = PrimeSet::new(s.clone()).unwrap();
            (s, set)
        })
        .collect();
    let mut checked = 0u64;
    for m in 1..=100_000i64 {
        let g = BigUint::from(trial_gpf(m as u64));
        for n in [m, -m] {
            let nb = BigInt::from(n);
            check(gpf(&nb).map_err(|e| e.to_string())? == g, || format!("gpf({n})"))?;
            for (s, set) in &sets {
                let f = s_part(&nb, set).map_err(|e| e.to_string())?;
                let (part, rest) = trial_spart(n, s);
                check(
                    f.spart_value() == BigUint::from(part) && f.cofactor == BigUint::from(rest),
                    || format!("s_part({n}, {set})"),
                )?;
                checked += 1;
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(1);
    for _ in 0..10_000 {
        let m: i64 = rng.gen_range(1..=1_000_000_000) * if rng.gen() { 1 } else { -1 };
        let n: i64 = rng.gen_range(1..=1_000_000_000) * if rng.gen() { 1 } else { -1 };
        let set = &sets[rng.gen_range(0..16)].1;
        let sp = |v: BigInt| s_part(&v, set).unwrap().spart_value();
        check(
            sp(BigInt::from(m) * n) == sp(BigInt::from(m)) * sp(BigInt::from(n)),
            || format!("[{m}*{n}]_S"),
        )?;
    }
    Ok(format!("{checked} s_part checks, 10000 product pairs"))
}

fn pell_oracle(d: u64) -> QuadInt {
    let (targets, den): ([i128; 2], u8) = if d % 4 == 1 { ([-4, 4], 2) } else { ([-1, 1], 1) };
    for v in 1u64.. {
        let dv2 = d as i128 * v as i128 * v as i128;
        for t in targets {
            let u2 = dv2 + t;
            if u2 <= 0 {
                continue;
            }
            let r = (u2 as f64).sqrt().round() as i128;
            if let Some(u) = [r - 1, r, r + 1].into_iter().find(|&u| u > 0 && u * u == u2) {
                return QuadInt::new(d, BigInt::from(u), BigInt::from(v), den).unwrap();
            }
        }
    }
    unreachable!()
}

fn criterion_2() -> Outcome {
    let mut count = 0;
    for d in (2..=100u64).filter(|&d| is_squarefree(d)) {
        let unit = fundamental_unit(d).map_err(|e| e.to_string())?;
        let want = pell_oracle(d);
        check(unit.eta == want, || format!("D = {d}: got {}, oracle {want}", unit.eta))?;
        count += 1;
    }
    let spot = [(2, "1+√2"), (5, "(1+√5)/2"), (3, "2+√3")];
    for (d, s) in spot {
        let got = fundamental_unit(d).unwrap().eta.to_string();
        check(got == s, || format!("D = {d}: {got}"))?;
    }
    Ok(format!("{count} fields agree with the Pell oracle"))
}

fn criterion_3() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let ds = [2u64, 3, 5, 7, 10, 13];
    let units: Vec<_> = ds.iter().map(|&d| fundamental_unit(d).unwrap()).collect();
    let mut worst = f64::NEG_INFINITY;
    let mut done = 0;
    while done < 1000 {
        let i = rng.gen_range(0..ds.len());
        let d = ds[i];
        let u: i64 = rng.gen_range(-1_000_000..=1_000_000);
        let mut v: i64 = rng.gen_range(-1_000_000..=1_000_000);
        let den = if d % 4 == 1 && rng.gen() { 2 } else { 1 };
        if den == 2 && (u - v) % 2 != 0 {
            v += 1;
        }
        let alpha = QuadInt::new(d, u, v, den).unwrap();
        if alpha.is_zero() {
            continue;
        }
        let unit = &units[i];
        let (m, delta) = reduce_height_with(&alpha, unit).map_err(|e| e.to_string())?;
        let back = delta.try_mul(&unit.power(m)).unwrap();
        check(back == alpha, || format!("delta * eta^{m} != {alpha}"))?;
        let n = alpha.norm().abs().to_f64().unwrap();
        let bound = 0.5 * n.ln() + 0.5 * unit.log_eta;
        let h = delta.weil_height().unwrap();
        check(h <= bound + 1e-9, || format!("{alpha}: h = {h} > {bound}"))?;
        worst = worst.max(h - bound);
        done += 1;
    }
    Ok(format!("1000 elements, max h - bound = {worst:.3e}"))
}

fn criterion_4() -> Outcome {
    let a = ExponentVector::new(PrimeSet::new([3]).unwrap(), vec![2]).unwrap();
    let fam = witness_family(&a, 7, 2..41);
    check(fam.skipped.is_empty(), || format!("skipped: {:?}", fam.skipped))?;
    check(fam.witnesses.len() == 39, || "missing witnesses".into())?;
    for w in &fam.witnesses {
        let pk = BigInt::from(7u32).pow(w.k);
        check(!w.delta.is_zero() && (&w.delta % &pk).is_zero(), || format!("k = {}: 7^k does not divide", w.k))?;
        if w.k >= 20 {
            check(w.ratio >= 0.49, || format!("k = {}: ratio {}", w.k, w.ratio))?;
        }
    }
    let first = &fam.witnesses[0];
    let want = 49f64.ln() / 2107f64.ln();
    check(
        first.k == 2
            && first.x == BigUint::from(46u32)
            && first.delta == BigInt::from(2107)
            && (first.ratio - want).abs() < 1e-6,
        || format!("k = 2 witness: x = {}, delta = {}, ratio = {}", first.x, first.delta, first.ratio),
    )?;
    let min20 = fam.witnesses.iter().filter(|w| w.k >= 20).map(|w| w.ratio).fold(f64::INFINITY, f64::min);
    Ok(format!("k = 2..40 valid, min ratio for k >= 20 = {min20:.4}"))
}

fn criterion_5() -> Outcome {
    let t = PrimeSet::new([2, 3]).unwrap();
    let budget = SearchBudget::default();
    let sols = solve_fixed_rhs(&t, &BigInt::one(), 10_000, &[40, 40], &budget).map_err(|e| e.to_string())?;
    let mut got: Vec<(u64, Vec<u32>)> = sols.iter().map(|(x, a)| (x.to_u64().unwrap(), a.exps().to_vec())).collect();
    got.sort();
    let small: Vec<_> = got.iter().filter(|(x, _)| *x <= 20).cloned().collect();
    let listed = vec![(2, vec![0, 1]), (3, vec![3, 0]), (5, vec![3, 1]), (7, vec![4, 1]), (17, vec![5, 2])];
    check(small == listed, || format!("x <= 20: {small:?}"))?;

    let mut brute = Vec::new();
    for x in 1..=10_000u128 {
        for e2 in 0..=40u32 {
            for e3 in 0..=40u32 {
                if x * x == 2u128.pow(e2) * 3u128.pow(e3) + 1 {
                    brute.push((x as u64, vec![e2, e3]));
                }
            }
        }
    }
    brute.sort();
    check(got == brute, || format!("solver {got:?} vs oracle {brute:?}"))?;

    let t2 = PrimeSet::new([2]).unwrap();
    let rn = solve_fixed_rhs(&t2, &BigInt::from(-7), 121, &[40], &budget).map_err(|e| e.to_string())?;
    let mut rn: Vec<(u64, u32)> = rn.iter().map(|(x, a)| (x.to_u64().unwrap(), a.exps()[0])).collect();
    rn.sort();
    check(rn == vec![(1, 3), (3, 4), (5, 5), (11, 7)], || format!("m = -7: {rn:?}"))?;
    Ok(format!("{} solutions for m = 1 match the oracle; m = -7 gives x = 1, 3, 5, 11", got.len()))
}

fn criterion_6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let ds = [2u64, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 21, 29, 33, 37, 41, 57, 65, 73, 94];
    let ps = [3u64, 5, 7, 11, 13];
    let mut done = 0;
    let mut nonzero = 0;
    while done < 500 {
        let d = ds[rng.gen_range(0..ds.len())];
        let p = ps[rng.gen_range(0..ps.len())];
        let mut alpha = QuadInt::new(d, rng.gen_range(-1000i64..=1000), rng.gen_range(-1000i64..=1000), 1).unwrap();
        let gamma = QuadInt::new(d, rng.gen_range(-20i64..=20), rng.gen_range(-20i64..=20), 1).unwrap();
        if alpha.is_zero() || gamma.is_zero() {
            continue;
        }
        for _ in 0..rng.gen_range(0..4) {
            alpha = alpha.try_mul(&gamma).unwrap();
        }
        if rng.gen_bool(0.3) {
            alpha = alpha.try_mul(&QuadInt::integer(d, p).unwrap()).unwrap();
        }
        let vals = quad_valuation(&alpha, p).map_err(|e| e.to_string())?;
        let sum: u32 = vals.iter().map(|v| v.v * v.f).sum();
        let want = valuation(&alpha.norm(), p).unwrap();
        check(sum == want, || format!("{alpha} at {p}: sum {sum} vs v_p(N) {want}"))?;
        nonzero += (want > 0) as u32;
        done += 1;
    }
    let alpha = QuadInt::new(2, 3, 1, 1).unwrap();
    let vals = quad_valuation(&alpha, 7).unwrap();
    let at4 = vals.iter().find(|v| v.tag == IdealTag::Split { root: 4 }).map(|v| v.v);
    check(at4 == Some(1), || format!("3+√2 at 7: {vals:?}"))?;
    Ok(format!("500 elements ({nonzero} with p | N), 3+√2 has valuation 1 at the root-4 ideal"))
}

const PRIMES: [u64; 25] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];

fn criterion_7() -> Outcome {
    check(log_star(1.0) == Ok(1.0), || "log_star(1)".into())?;
    check(log_star(std::f64::consts::E) == Ok(1.0), || "log_star(e)".into())?;
    check(log_star(0.5) == Ok(1.0), || "log_star(1/2)".into())?;
    check(log_star(0.0).is_err() && log_star(-1.0).is_err() && log_star(f64::NAN).is_err(), || "log_star domain".into())?;
    let k = kappa_p2(&stats(&[17]), 3.0).unwrap();
    check((k - 0.0399).abs() <= 1e-4, || format!("kappa_p2 = {k}"))?;

    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..1000 {
        let s_len = rng.gen_range(1..5);
        let mut s: Vec<u64> = (0..s_len).map(|_| PRIMES[rng.gen_range(0..PRIMES.len())]).collect();
        s.sort();
        s.dedup();
        let st = stats(&s);
        let c = rng.gen_range(1.0..50.0);
        let c2 = c * rng.gen_range(1.001..4.0);
        let raw = kappa_p2_raw(&st, c).unwrap();
        check(kappa_p2_raw(&st, c2).unwrap() < raw, || format!("kappa not decreasing in c: {s:?}"))?;
        check(kappa_p2(&st, c2).unwrap() <= kappa_p2(&st, c).unwrap(), || "clamped kappa in c".into())?;
        check(tau_shape(&st, c2).unwrap() < tau_shape(&st, c).unwrap(), || "tau in c".into())?;
        check(
            kappa_pd(&st, c, 4).unwrap() <= kappa_pd(&st, c, 3).unwrap(),
            || format!("kappa_pd in d: {s:?}"),
        )?;

        let extra = PRIMES[rng.gen_range(1..PRIMES.len())];
        if !s.contains(&extra) {
            let mut bigger = s.clone();
            bigger.push(extra);
            bigger.sort();
            check(kappa_p2_raw(&stats(&bigger), c).unwrap() < raw, || format!("kappa in s: {s:?} + {extra}"))?;
        }
        let pmax = *s.last().unwrap();
        if let Some(&q) = PRIMES.iter().find(|&&q| q > pmax) {
            let mut swapped = s.clone();
            *swapped.last_mut().unwrap() = q;
            check(kappa_p2_raw(&stats(&swapped), c).unwrap() < raw, || format!("kappa in P: {s:?} -> {q}"))?;
        }

        let n = rng.gen_range(2..5);
        let heights: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..100.0)).collect();
        let b = rng.gen_range(3.0..1e6);
        let cc = rng.gen_range(0.5..10.0);
        let deg = rng.gen_range(1..6);
        let i = rng.gen_range(0..PRIMES.len() - 1);
        let (p, q) = (PRIMES[i], PRIMES[i + 1]);
        let y = yu_shape(p, deg, &heights, b, cc).unwrap();
        check(yu_shape(q, deg, &heights, b, cc).unwrap() > y, || "yu in p".into())?;
        check(yu_shape(p, deg + 1, &heights, b, cc).unwrap() > y, || "yu in D".into())?;
    }
    Ok(format!("kappa_p2(17, c = 3) = {k:.5}, 1000 monotonicity points"))
}

fn stats(s: &[u64]) -> PrimeStats {
    PrimeStats::new(&PrimeSet::new(s.to_vec()).unwrap()).unwrap()
}

fn criterion_8() -> Outcome {
    let a = ExponentVector::new(PrimeSet::new([3]).unwrap(), vec![2]).unwrap();
    let fam = witness_family(&a, 7, 2..41);
    let ds = Dataset::from_witnesses(&fam.witnesses, &FactorBudget::default()).map_err(|e| e.to_string())?;
    check(ds.s.primes() == [7], || "S != {7}".into())?;
    let fit = fit_effective_constant(&ds).map_err(|e| e.to_string())?;
    let st = stats(&[7]);
    let kappa = kappa_p2(&st, fit.fitted_c).unwrap();
    for r in &ds.records {
        let lhs = r.spart_value().to_f64().unwrap().ln();
        let rhs = (1.0 - kappa) * r.delta.abs().to_f64().unwrap().ln();
        let q = r.ratio.unwrap();
        check(q <= 1.0 - kappa && lhs <= rhs * (1.0 + 1e-12), || format!("x = {} fails at fitted c", r.x))?;
    }
    let argmax = ds
        .records
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.ratio.partial_cmp(&b.1.ratio).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    check(fit.binding == argmax, || format!("binding {} vs argmax {argmax}", fit.binding))?;
    let k99 = kappa_p2(&st, 0.99 * fit.fitted_c).unwrap();
    let binding_ratio = ds.records[fit.binding].ratio.unwrap();
    check(binding_ratio > 1.0 - k99, || "0.99 c still passes the binding record".into())?;
    Ok(format!(
        "c = {:.6}, kappa = {:.6e}, binding x = {}",
        fit.fitted_c, fit.fitted_kappa, ds.records[fit.binding].x
    ))
}

fn run_enumerate(dir: &Path, config: &str) -> Result<Vec<u8>, String> {
    std::fs::write(dir.join("run.cfg"), config).map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_sunitgap"))
        .current_dir(dir)
        .args(["enumerate", "--config", "run.cfg", "--workers", "4"])
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    std::fs::read(dir.join("run.jsonl")).map_err(|e| e.to_string())
}

fn criterion_9() -> Outcome {
    let config = "s_primes = 5,7\nt_primes = 2,3\nx_max = 600\nexp_max = 10\nout = run\n";
    let d1 = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d2 = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = run_enumerate(d1.path(), config)?;
    let second = run_enumerate(d2.path(), config)?;
    check(first == second, || "runs differ".into())?;
    let csv1 = std::fs::read(d1.path().join("run.csv")).unwrap();
    let csv2 = std::fs::read(d2.path().join("run.csv")).unwrap();
    check(csv1 == csv2, || "summaries differ".into())?;

    let parsed = load_dataset(&d1.path().join("run.jsonl")).map_err(|e| e.to_string())?.ok_or("empty file")?;
    let mut again = Vec::new();
    write_dataset(&mut again, &parsed).map_err(|e| e.to_string())?;
    check(again == first, || "re-encoding changed bytes".into())?;

    let layer = ConfigLayer::parse(config, "cfg").unwrap().overlay(ConfigLayer { workers: Some(4), ..Default::default() });
    let run = RunConfig::resolve(&layer).unwrap();
    let direct = enumerate(&run.s, &run.t, &run.window, &run.budget).map_err(|e| e.to_string())?;
    check(parsed == DatasetFile { config: run.echo(), dataset: direct }, || "parsed dataset differs".into())?;
    Ok(format!("{} records, {} bytes, identical", parsed.dataset.records.len(), first.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("S-part and gpf oracle", criterion_1, Duration::from_secs(10)),
        ("fundamental units", criterion_2, Duration::from_secs(5)),
        ("height reduction", criterion_3, Duration::from_secs(5)),
        ("Hensel sharpness family", criterion_4, Duration::from_secs(2)),
        ("fixed right-hand side", criterion_5, Duration::from_secs(60)),
        ("quadratic valuations", criterion_6, Duration::from_secs(5)),
        ("bound evaluators", criterion_7, Duration::from_secs(2)),
        ("empirical fit", criterion_8, Duration::from_secs(2)),
        ("determinism and round-trip", criterion_9, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > *limit => Err(format!("{detail}; took {took:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({took:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({took:.2?}): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
