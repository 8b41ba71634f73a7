//! Trial orchestration: sample points, run a checker, collect witnesses.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::duality::{
    a_sum, b_sum, classify_level, corollary_unity, level_window_message, verify_case, DualityCase,
    IndexSubset, Regime, Verdict,
};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::field::{sample_parameter_point, ExactField, FieldSpec, Fp, ParameterPoint, Rational};
use crate::grassmann::{verify_level_correspondence, GrassmannCase};
use crate::report::{CaseDescriptor, FailureWitness, NumericSummary, PointWitness, VerificationReport};
use crate::residue::{
    assemble_e, assemble_f, contour_integral_numeric_with, relative_error, ContourConfig, Cx,
    IntegrandSpec,
};

/// Relative tolerance for the quadrature comparison.
pub const NUMERIC_TOLERANCE: f64 = 1e-8;

/// Extra draws when a sampled point hits an accidental pole.
const RESAMPLE_LIMIT: u64 = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub r: usize,
    pub d: u32,
    pub l: i64,
    pub n_max: usize,
    pub d_max: u32,
    pub trials: usize,
    pub field: FieldSpec,
    pub seed: u64,
    /// `1` = sequential, `0` = all cores, `k` = `k` workers.
    pub jobs: usize,
    /// Run the contour quadrature with this grid size (residue only).
    pub numeric_grid: Option<usize>,
    /// Record `elapsed_ms`; off for byte-reproducible reports.
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 3,
            r: 2,
            d: 1,
            l: 0,
            n_max: 5,
            d_max: 3,
            trials: 10,
            field: FieldSpec::fp61(),
            seed: 0,
            jobs: 0,
            numeric_grid: None,
            timing: true,
        }
    }
}

impl RunConfig {
    pub fn mode(&self) -> ExecMode {
        ExecMode::from_jobs(self.jobs)
    }

    fn check_shape(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("n must be >= 2, got {}", self.n)));
        }
        if self.r == 0 || self.r >= self.n {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= r <= n - 1, got r = {}, n = {}",
                self.r, self.n
            )));
        }
        Ok(())
    }

    fn check_level(&self) -> Result<Regime> {
        let regime = classify_level(self.n, self.r, self.l);
        if regime == Regime::OutOfRange {
            return Err(Error::InvalidArgument(format!(
                "level l = {} is out of range; {}",
                self.l,
                level_window_message(self.n, self.r)
            )));
        }
        Ok(regime)
    }

    fn descriptor(&self) -> CaseDescriptor {
        CaseDescriptor {
            n: self.n,
            r: self.r,
            d: self.d,
            l: self.l,
            regime: classify_level(self.n, self.r, self.l),
        }
    }
}

// ---------------------------------------------------------------------------
// Seeds

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic per-trial seed from the run seed and a case key.
pub fn derive_seed(seed: u64, key: &[u64]) -> u64 {
    key.iter().fold(splitmix(seed), |acc, &k| splitmix(acc ^ splitmix(k)))
}

fn case_key(tag: u64, cfg: &RunConfig) -> [u64; 5] {
    [tag, cfg.n as u64, cfg.r as u64, cfg.d as u64, cfg.l as u64]
}

// ---------------------------------------------------------------------------
// Trials

/// One comparison within a trial.
pub struct Check {
    pub label: Option<String>,
    pub holds: bool,
    pub lhs: String,
    pub rhs: String,
}

impl Check {
    pub fn from_verdict<F: std::fmt::Display>(label: Option<String>, v: &Verdict<F>) -> Self {
        Check {
            label,
            holds: v.holds,
            lhs: v.lhs.to_string(),
            rhs: v.rhs.to_string(),
        }
    }
}

/// A checker that runs at a sampled point in any exact field.
pub trait TrialCheck: Sync {
    fn run<F: ExactField>(&self, point: &ParameterPoint<F>) -> Result<Vec<Check>>;
}

struct TrialOutcome {
    passed: bool,
    failures: Vec<FailureWitness>,
}

fn accidental(e: &Error) -> bool {
    matches!(
        e,
        Error::Pole { .. } | Error::DivisionByZero(_) | Error::IntegrandPole(_)
    )
}

fn one_trial<F: ExactField, T: TrialCheck>(
    check: &T,
    n: usize,
    depth: u32,
    field: FieldSpec,
    trial_seed: u64,
) -> Result<TrialOutcome> {
    let mut last = None;
    for attempt in 0..RESAMPLE_LIMIT {
        let point = sample_parameter_point::<F>(n, depth, derive_seed(trial_seed, &[attempt]), field)?;
        match check.run(&point) {
            Ok(checks) => {
                let failures: Vec<FailureWitness> = checks
                    .into_iter()
                    .filter(|c| !c.holds)
                    .map(|c| FailureWitness {
                        point: PointWitness::of(&point),
                        check: c.label,
                        lhs: c.lhs,
                        rhs: c.rhs,
                    })
                    .collect();
                return Ok(TrialOutcome {
                    passed: failures.is_empty(),
                    failures,
                });
            }
            Err(e) if accidental(&e) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn trials_in<F: ExactField, T: TrialCheck>(
    check: &T,
    n: usize,
    depth: u32,
    cfg: &RunConfig,
    key: &[u64],
    mode: ExecMode,
) -> Result<(usize, Vec<FailureWitness>)> {
    let trial_seeds: Vec<u64> = (0..cfg.trials as u64)
        .map(|t| {
            let mut k = key.to_vec();
            k.push(t);
            derive_seed(cfg.seed, &k)
        })
        .collect();
    let outcomes = exec::map(trial_seeds, mode, |s| one_trial::<F, T>(check, n, depth, cfg.field, s));
    let mut passed = 0;
    let mut failures = Vec::new();
    for o in outcomes {
        let o = o?;
        passed += usize::from(o.passed);
        failures.extend(o.failures);
    }
    Ok((passed, failures))
}

/// Run `cfg.trials` trials of `check` in the configured field.
pub fn run_trials<T: TrialCheck>(
    check: &T,
    n: usize,
    depth: u32,
    cfg: &RunConfig,
    key: &[u64],
    mode: ExecMode,
) -> Result<(usize, Vec<FailureWitness>)> {
    match cfg.field {
        FieldSpec::Rational => trials_in::<Rational, T>(check, n, depth, cfg, key, mode),
        FieldSpec::Prime(_) => trials_in::<Fp, T>(check, n, depth, cfg, key, mode),
    }
}

fn finish(
    cfg: &RunConfig,
    case: CaseDescriptor,
    started: Instant,
    (passed, failures): (usize, Vec<FailureWitness>),
    numeric: Option<NumericSummary>,
) -> VerificationReport {
    VerificationReport {
        case,
        field: cfg.field.to_string(),
        seed: cfg.seed,
        trials: cfg.trials,
        passed,
        failures,
        numeric,
        elapsed_ms: cfg.timing.then(|| started.elapsed().as_millis() as u64),
    }
}

// ---------------------------------------------------------------------------
// Checkers

struct DualityCheck {
    n: usize,
    r: usize,
    d: u32,
    l: i64,
}

impl TrialCheck for DualityCheck {
    fn run<F: ExactField>(&self, point: &ParameterPoint<F>) -> Result<Vec<Check>> {
        let subset = IndexSubset::leading(self.n, self.r)?;
        let case = DualityCase::new(point.clone(), subset, self.d, self.l)?;
        Ok(vec![Check::from_verdict(None, &verify_case(&case)?)])
    }
}

struct ResidueCheck {
    r: usize,
    d: u32,
    l: i64,
}

impl TrialCheck for ResidueCheck {
    fn run<F: ExactField>(&self, point: &ParameterPoint<F>) -> Result<Vec<Check>> {
        let n = point.n();
        let spec = IntegrandSpec::new(point.clone(), self.r, self.d, self.l)?;
        let subset = IndexSubset::leading(n, self.r)?;
        let e = assemble_e(&spec)?;
        let a = a_sum(point, &subset, self.d, self.l)?;
        let f = assemble_f(&spec)?;
        let b = b_sum(point, &subset.complement(), self.d, -self.l)?;
        let signed_b = if self.d % 2 == 1 { b.neg() } else { b };
        Ok(vec![
            Check::from_verdict(Some("assemble_e = a_sum".into()), &Verdict::compare(e, a)),
            Check::from_verdict(
                Some("assemble_f = (-1)^d b_sum".into()),
                &Verdict::compare(f, signed_b),
            ),
        ])
    }
}

struct UnityCheck {
    d: u32,
}

impl TrialCheck for UnityCheck {
    fn run<F: ExactField>(&self, point: &ParameterPoint<F>) -> Result<Vec<Check>> {
        Ok(vec![Check::from_verdict(None, &corollary_unity(point, self.d)?)])
    }
}

struct CorrespondenceCheck {
    r: usize,
    d: u32,
    l: i64,
}

impl TrialCheck for CorrespondenceCheck {
    fn run<F: ExactField>(&self, point: &ParameterPoint<F>) -> Result<Vec<Check>> {
        let case = GrassmannCase::new(point.clone(), self.r, self.d, self.l)?;
        Ok(verify_level_correspondence(&case)?
            .iter()
            .map(|v| Check::from_verdict(Some(v.fixed_point.to_string()), &v.verdict))
            .collect())
    }
}

// ---------------------------------------------------------------------------
// Commands

/// Sample `trials` points and run the checker for the case's regime.
pub fn run_verify(cfg: &RunConfig) -> Result<VerificationReport> {
    run_verify_with(cfg, cfg.mode())
}

fn run_verify_with(cfg: &RunConfig, mode: ExecMode) -> Result<VerificationReport> {
    let started = Instant::now();
    cfg.check_shape()?;
    cfg.check_level()?;
    let check = DualityCheck {
        n: cfg.n,
        r: cfg.r,
        d: cfg.d,
        l: cfg.l,
    };
    let res = run_trials(&check, cfg.n, cfg.d + 1, cfg, &case_key(1, cfg), mode)?;
    Ok(finish(cfg, cfg.descriptor(), started, res, None))
}

/// Every `(n <= n_max, 1 <= r < n, d <= d_max, -r <= l <= n - r)`.
pub fn sweep_cases(n_max: usize, d_max: u32) -> Vec<(usize, usize, u32, i64)> {
    let mut out = Vec::new();
    for n in 2..=n_max {
        for r in 1..n {
            for d in 0..=d_max {
                for l in -(r as i64)..=(n - r) as i64 {
                    out.push((n, r, d, l));
                }
            }
        }
    }
    out
}

/// One report per sweep case; cases run in parallel, trials within a case
/// sequentially.
pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<VerificationReport>> {
    if cfg.n_max < 2 {
        return Err(Error::InvalidArgument(format!(
            "n_max must be >= 2, got {}",
            cfg.n_max
        )));
    }
    let cases = sweep_cases(cfg.n_max, cfg.d_max);
    exec::map(cases, cfg.mode(), |(n, r, d, l)| {
        let case_cfg = RunConfig {
            n,
            r,
            d,
            l,
            ..cfg.clone()
        };
        run_verify_with(&case_cfg, ExecMode::Sequential)
    })
    .into_iter()
    .collect()
}

/// Deterministic float point with all `|x_i|` in `[0.8, 1.2]` and
/// `q` in `[0.2, 0.45]`, so the default contour separates the poles.
pub fn numeric_point(n: usize, depth: u32, seed: u64) -> Result<ParameterPoint<Cx>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = rng.gen_range(0.2..0.45);
    let x = (0..n)
        .map(|i| {
            let u: f64 = rng.gen_range(0.0..0.5);
            Cx::real(0.8 + 0.4 * (i as f64 + 0.25 + u) / n as f64)
        })
        .collect();
    ParameterPoint::new(Cx::real(q), x, depth)
}

/// Exact residue assembly against the closed sums, and optionally the
/// quadrature against the assembly.
pub fn run_residue(cfg: &RunConfig) -> Result<VerificationReport> {
    let started = Instant::now();
    cfg.check_shape()?;
    let numeric = match cfg.numeric_grid {
        Some(grid) => Some(numeric_summary(cfg, grid)?),
        None => None,
    };
    let check = ResidueCheck {
        r: cfg.r,
        d: cfg.d,
        l: cfg.l,
    };
    let res = run_trials(&check, cfg.n, cfg.d + 1, cfg, &case_key(2, cfg), cfg.mode())?;
    Ok(finish(cfg, cfg.descriptor(), started, res, numeric))
}

fn numeric_summary(cfg: &RunConfig, grid: usize) -> Result<NumericSummary> {
    let point = numeric_point(cfg.n, cfg.d + 1, derive_seed(cfg.seed, &case_key(3, cfg)))?;
    let contour = ContourConfig::default_for(&point).with_grid(grid);
    let spec = IntegrandSpec::new(point.clone(), cfg.r, cfg.d, cfg.l)?;
    let quad = contour_integral_numeric_with(&spec, &contour, cfg.mode())?;
    let exact = assemble_e(&spec)?.0;
    let err = relative_error(quad, exact);
    Ok(NumericSummary {
        q: point.q().0.re,
        x: point.x().iter().map(|v| v.0.re).collect(),
        rho: contour.rho,
        grid,
        relative_error: err,
        tolerance: NUMERIC_TOLERANCE,
        passed: err < NUMERIC_TOLERANCE,
    })
}

/// The `n = 3` unity sum at degree `cfg.d`.
pub fn run_unity(cfg: &RunConfig) -> Result<VerificationReport> {
    let started = Instant::now();
    let cfg = RunConfig {
        n: 3,
        r: 2,
        l: 0,
        ..cfg.clone()
    };
    cfg.check_shape()?;
    let res = run_trials(&UnityCheck { d: cfg.d }, 3, cfg.d + 1, &cfg, &case_key(4, &cfg), cfg.mode())?;
    Ok(finish(&cfg, cfg.descriptor(), started, res, None))
}

/// Level correspondence at every torus fixed point of `Gr(r, n)`.
pub fn run_ifunction(cfg: &RunConfig) -> Result<VerificationReport> {
    let started = Instant::now();
    cfg.check_shape()?;
    cfg.check_level()?;
    let check = CorrespondenceCheck {
        r: cfg.r,
        d: cfg.d,
        l: cfg.l,
    };
    let res = run_trials(&check, cfg.n, cfg.d + 1, cfg, &case_key(5, cfg), cfg.mode())?;
    Ok(finish(cfg, cfg.descriptor(), started, res, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, r: usize, d: u32, l: i64) -> RunConfig {
        RunConfig {
            n,
            r,
            d,
            l,
            trials: 3,
            seed: 7,
            timing: false,
            ..RunConfig::default()
        }
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(derive_seed(1, &[2, 3]), derive_seed(1, &[2, 3]));
        assert_ne!(derive_seed(1, &[2, 3]), derive_seed(1, &[3, 2]));
        assert_ne!(derive_seed(1, &[2, 3]), derive_seed(2, &[2, 3]));
    }

    #[test]
    fn verify_passes_in_each_regime() {
        for l in [-1, 0, 1] {
            let rep = run_verify(&cfg(2, 1, 1, l)).unwrap();
            assert!(rep.ok(), "l = {l}: {rep:?}");
        }
        let rep = run_verify(&RunConfig {
            field: FieldSpec::Rational,
            ..cfg(3, 2, 2, 0)
        })
        .unwrap();
        assert!(rep.ok());
    }

    #[test]
    fn out_of_range_level_quotes_window() {
        let err = run_verify(&cfg(3, 2, 1, 5)).unwrap_err().to_string();
        assert!(err.contains("-1 <= l <= 0"), "{err}");
        assert!(err.contains("l = -r = -2 and l = n-r = 1"), "{err}");
    }

    #[test]
    fn invalid_shapes() {
        assert!(run_verify(&cfg(3, 3, 1, 0)).is_err());
        assert!(run_verify(&RunConfig { trials: 0, ..cfg(3, 2, 1, 0) }).is_err());
        assert!(run_sweep(&RunConfig { n_max: 1, ..cfg(3, 2, 1, 0) }).is_err());
    }

    #[test]
    fn sweep_enumeration() {
        let cases = sweep_cases(2, 0);
        let levels: Vec<i64> = cases.iter().map(|c| c.3).collect();
        assert_eq!(levels, vec![-1, 0, 1]);
        let reps = run_sweep(&RunConfig {
            n_max: 3,
            d_max: 1,
            ..cfg(3, 2, 1, 0)
        })
        .unwrap();
        assert_eq!(reps.len(), sweep_cases(3, 1).len());
        assert!(reps.iter().all(|r| r.ok()));
    }

    #[test]
    fn reports_are_reproducible() {
        let c = RunConfig { jobs: 1, ..cfg(3, 1, 2, 1) };
        let a = serde_json::to_string(&run_verify(&c).unwrap()).unwrap();
        let b = serde_json::to_string(&run_verify(&c).unwrap()).unwrap();
        assert_eq!(a, b);
        let par = run_verify(&RunConfig { jobs: 4, ..c }).unwrap();
        assert_eq!(serde_json::to_string(&par).unwrap(), a);
    }

    #[test]
    fn residue_unity_ifunction() {
        assert!(run_residue(&cfg(3, 2, 2, 0)).unwrap().ok());
        let rep = run_residue(&RunConfig {
            numeric_grid: Some(128),
            ..cfg(3, 2, 1, 0)
        })
        .unwrap();
        assert!(rep.ok(), "{:?}", rep.numeric);
        assert!(run_unity(&cfg(3, 2, 3, 0)).unwrap().ok());
        assert!(run_ifunction(&cfg(3, 1, 1, 2)).unwrap().ok());
    }

    #[test]
    fn small_prime_field() {
        let rep = run_verify(&RunConfig {
            field: FieldSpec::Prime(10_007),
            ..cfg(3, 2, 1, 0)
        })
        .unwrap();
        assert!(rep.ok());
        assert!(rep.field == "fp:10007");
        let err = run_verify(&RunConfig {
            field: FieldSpec::Prime(5),
            ..cfg(3, 2, 2, 0)
        });
        assert!(matches!(err, Err(Error::FieldTooSmall { .. })));
    }
}
