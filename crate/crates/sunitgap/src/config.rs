//! `key = value` run configuration.
//!
//! Precedence, lowest first: config file, `SUNITGAP_WORKERS`, command-line
//! flags. Unknown keys and malformed values are parse errors carrying the
//! line number.

use std::collections::BTreeMap;
use std::path::PathBuf;

use sunitgap_core::arith::{FactorBudget, PrimeSet};
use sunitgap_core::search::{SearchBudget, SearchWindow};

use crate::{AppError, AppResult};

pub const WORKERS_ENV: &str = "SUNITGAP_WORKERS";

/// Values read from a config file or flags; `None` means unset.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigLayer {
    pub s_primes: Option<Vec<u64>>,
    pub t_primes: Option<Vec<u64>>,
    pub x_max: Option<u64>,
    pub exp_max: Option<Vec<u32>>,
    pub require_coprime: Option<bool>,
    pub workers: Option<usize>,
    pub factor_budget: Option<u64>,
    pub max_window: Option<u128>,
    pub out: Option<PathBuf>,
}

fn list<T: std::str::FromStr>(v: &str) -> Result<Vec<T>, String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| format!("bad list entry '{s}'")))
        .collect()
}

fn scalar<T: std::str::FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("bad value '{v}'"))
}

impl ConfigLayer {
    pub fn parse(text: &str, source_name: &str) -> AppResult<Self> {
        let mut cfg = ConfigLayer::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| AppError::parse(source_name, i + 1, msg);
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let set = |r: Result<(), String>| r.map_err(err);
            match key {
                "s_primes" => set(list(value).map(|v| cfg.s_primes = Some(v)))?,
                "t_primes" => set(list(value).map(|v| cfg.t_primes = Some(v)))?,
                "x_max" => set(scalar(value).map(|v| cfg.x_max = Some(v)))?,
                "exp_max" => set(list(value).map(|v| cfg.exp_max = Some(v)))?,
                "require_coprime" => set(scalar(value).map(|v| cfg.require_coprime = Some(v)))?,
                "workers" => set(scalar(value).map(|v| cfg.workers = Some(v)))?,
                "factor_budget" => set(scalar(value).map(|v| cfg.factor_budget = Some(v)))?,
                "max_window" => set(scalar(value).map(|v| cfg.max_window = Some(v)))?,
                "out" => cfg.out = Some(PathBuf::from(value)),
                other => return Err(err(format!("unknown key '{other}'"))),
            }
        }
        Ok(cfg)
    }

    /// `other` wins wherever it is set.
    pub fn overlay(self, other: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            s_primes: other.s_primes.or(self.s_primes),
            t_primes: other.t_primes.or(self.t_primes),
            x_max: other.x_max.or(self.x_max),
            exp_max: other.exp_max.or(self.exp_max),
            require_coprime: other.require_coprime.or(self.require_coprime),
            workers: other.workers.or(self.workers),
            factor_budget: other.factor_budget.or(self.factor_budget),
            max_window: other.max_window.or(self.max_window),
            out: other.out.or(self.out),
        }
    }

    pub fn from_env() -> AppResult<Self> {
        match std::env::var(WORKERS_ENV) {
            Ok(v) => {
                let workers = v
                    .trim()
                    .parse()
                    .map_err(|_| AppError::parse(WORKERS_ENV, 1, format!("bad worker count '{v}'")))?;
                Ok(ConfigLayer { workers: Some(workers), ..Default::default() })
            }
            Err(_) => Ok(ConfigLayer::default()),
        }
    }
}

/// Fully resolved configuration for a window search.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub s: PrimeSet,
    pub t: PrimeSet,
    pub window: SearchWindow,
    pub workers: usize,
    pub budget: SearchBudget,
    pub out: Option<PathBuf>,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

impl RunConfig {
    pub fn resolve(layer: &ConfigLayer) -> AppResult<Self> {
        let s = PrimeSet::new(layer.s_primes.clone().unwrap_or_default())?;
        let t_primes = layer.t_primes.clone().ok_or_else(|| AppError::Usage("t_primes is required".into()))?;
        let t = PrimeSet::new(t_primes)?;
        let x_max = layer.x_max.ok_or_else(|| AppError::Usage("x_max is required".into()))?;
        let exp_max = match layer.exp_max.as_deref() {
            None => return Err(AppError::Usage("exp_max is required".into())),
            Some([e]) => vec![*e; t.len()],
            Some(v) => v.to_vec(),
        };
        let mut window = SearchWindow::new(x_max, exp_max);
        window.require_coprime = layer.require_coprime.unwrap_or(true);
        let mut budget = SearchBudget::default();
        if let Some(limit) = layer.max_window {
            budget.max_window = limit;
        }
        if let Some(iters) = layer.factor_budget {
            budget.factor = FactorBudget { rho_iterations: iters, ..budget.factor };
        }
        let workers = layer.workers.unwrap_or_else(default_workers).max(1);
        Ok(RunConfig { s, t, window, workers, budget, out: layer.out.clone() })
    }

    /// Every effective setting, as echoed into output headers.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        let mut m = BTreeMap::new();
        m.insert("s_primes".into(), join(self.s.primes()));
        m.insert("t_primes".into(), join(self.t.primes()));
        m.insert("x_max".into(), self.window.x_max.to_string());
        m.insert(
            "exp_max".into(),
            self.window.exp_max.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
        );
        m.insert("require_coprime".into(), self.window.require_coprime.to_string());
        m.insert("workers".into(), self.workers.to_string());
        m.insert("factor_budget".into(), self.budget.factor.rho_iterations.to_string());
        m.insert("trial_bound".into(), self.budget.factor.trial_bound.to_string());
        m.insert("max_window".into(), self.budget.max_window.to_string());
        if let Some(out) = &self.out {
            m.insert("out".into(), out.display().to_string());
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file() {
        let text = "# demo\ns_primes = 7\nt_primes = 2, 3  # two\nx_max=10\nexp_max = 3\nrequire_coprime = false\nworkers = 2\nfactor_budget = 1000\nout = run/a\n";
        let layer = ConfigLayer::parse(text, "cfg").unwrap();
        assert_eq!(layer.t_primes, Some(vec![2, 3]));
        let run = RunConfig::resolve(&layer).unwrap();
        assert_eq!(run.window.exp_max, vec![3, 3]);
        assert!(!run.window.require_coprime);
        assert_eq!(run.workers, 2);
        assert_eq!(run.budget.factor.rho_iterations, 1000);
        assert_eq!(run.echo()["out"], "run/a");
    }

    #[test]
    fn reports_line_numbers() {
        let e = ConfigLayer::parse("x_max = 3\n\nbogus = 1\n", "cfg").unwrap_err();
        assert!(matches!(e, AppError::Parse { line: 3, .. }));
        assert_eq!(e.exit_code(), 5);
        let e = ConfigLayer::parse("x_max = ten\n", "cfg").unwrap_err();
        assert!(matches!(e, AppError::Parse { line: 1, .. }));
        assert!(ConfigLayer::parse("x_max 3\n", "cfg").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = ConfigLayer::parse("x_max = 3\nworkers = 4\n", "cfg").unwrap();
        let flags = ConfigLayer { x_max: Some(9), ..Default::default() };
        let merged = file.overlay(flags);
        assert_eq!(merged.x_max, Some(9));
        assert_eq!(merged.workers, Some(4));
    }
}
