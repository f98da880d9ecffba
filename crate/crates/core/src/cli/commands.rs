use super::args::*;
use super::report::*;
use crate::entropy::{EntropyKind, EntropyMeasure, MeasureRegistry};
use crate::error::{Error, Result};
use crate::hypothesis::{confidence_interval, entropy_test, goodness_of_fit, EntropyEstimate, QuantileConvention};
use crate::inference::{aic, aic_from_log_likelihood, estimate, MLFit};
use crate::io::{extract_region, fixtures, read_stack, write_stack, CovarianceStack, RegionSpec};
use crate::simulate::{
    mc_power_experiment, mc_resample_experiment, mc_size_experiment, preset, sample_with, stream_rng, write_report,
    ExperimentMode, MCConfig, SamplerRegistry, SimulationConfig,
};
use crate::wishart::{AsModel, ModelSummary, SampleSet, WishartParams};
use sha2::{Digest, Sha256};
use std::path::Path;

/// Seed used by randomized commands when `--seed` is absent.
pub const DEFAULT_SEED: u64 = 0;

pub(crate) fn digest(path: &Path) -> Result<InputDigest> {
    let bytes = std::fs::read(path)?;
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

fn measures(spec: &str) -> Result<Vec<Box<dyn EntropyMeasure>>> {
    let list = MeasureRegistry::builtin().resolve_list(spec)?;
    if list.is_empty() {
        return Err(Error::InvalidParameter("no entropy kinds given".into()));
    }
    Ok(list)
}

fn check_levels(levels: &[f64]) -> Result<()> {
    if levels.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
        return Err(Error::InvalidParameter("significance levels must lie in (0, 1)".into()));
    }
    Ok(())
}

enum Origin {
    Fit { fit: MLFit, trace: f64 },
    Fixture(ModelSummary),
}

struct Population {
    id: String,
    n: usize,
    origin: Origin,
}

impl Population {
    fn model(&self) -> ModelSummary {
        match &self.origin {
            Origin::Fit { fit, .. } => fit.params.model(),
            Origin::Fixture(s) => *s,
        }
    }

    fn report(&self) -> RegionReport {
        let s = self.model();
        let mut r = RegionReport {
            id: self.id.clone(),
            source: "fixture",
            n: self.n,
            m: s.m,
            log_det_sigma: s.log_det_sigma,
            trace_sigma: None,
            looks: s.looks,
            regime: s.regime(),
            branch: None,
            score_residual: None,
            log_likelihood: None,
            aic: None,
            entropies: Vec::new(),
        };
        if let Origin::Fit { fit, trace } = &self.origin {
            r.source = "ml";
            r.trace_sigma = Some(*trace);
            r.branch = Some(fit.branch);
            r.score_residual = Some(fit.residual);
            r.log_likelihood = Some(fit.log_likelihood);
        }
        r
    }

    fn estimate(&self, measure: &dyn EntropyMeasure) -> Result<EntropyEstimate> {
        let model = self.model();
        let value = measure.evaluate(&model)?.value;
        let variance = measure.asymptotic_variance(&model)?;
        EntropyEstimate::new(value, variance, self.n, measure.kind()).map_err(|e| e.in_region(&self.id))
    }
}

fn fit_region(stack: &CovarianceStack, spec: &str, report: &mut RunReport) -> Result<(String, SampleSet, MLFit)> {
    let region = RegionSpec::parse(spec).map_err(|e| e.in_region(spec))?;
    if let RegionSpec::Mask { label, .. } = &region {
        report.inputs.push(digest(Path::new(label))?);
    }
    let sample = extract_region(stack, &region).map_err(|e| e.in_region(spec))?;
    let fit = estimate(&sample).map_err(|e| e.in_region(spec))?;
    Ok((spec.to_string(), sample, fit))
}

fn load_stack(path: &Path, report: &mut RunReport) -> Result<CovarianceStack> {
    report.inputs.push(digest(path)?);
    read_stack(path)
}

fn parse_fixture(spec: &str) -> Result<Population> {
    let bad = |what: &str| Error::Parse(format!("fixture '{spec}': {what}"));
    let (mut name, mut m, mut looks, mut n, mut lndet) = (None, None, None, None, None);
    for part in spec.split(',') {
        let (key, value) = part.split_once('=').ok_or_else(|| bad("expected key=value pairs"))?;
        let value = value.trim();
        let num = || value.parse::<f64>().map_err(|_| bad(&format!("bad number '{value}'")));
        match key.trim() {
            "name" => name = Some(value.to_string()),
            "m" => m = Some(value.parse::<usize>().map_err(|_| bad("m must be a positive integer"))?),
            "looks" => looks = Some(num()?),
            "n" => n = Some(value.parse::<usize>().map_err(|_| bad("n must be a positive integer"))?),
            "det" => {
                let d = num()?;
                if !(d > 0.0) {
                    return Err(bad("det must be positive"));
                }
                lndet = Some(d.ln());
            }
            "lndet" => lndet = Some(num()?),
            other => return Err(bad(&format!("unknown key '{other}'"))),
        }
    }
    let m = m.ok_or_else(|| bad("missing m"))?;
    let looks = looks.ok_or_else(|| bad("missing looks"))?;
    let n = n.filter(|&n| n > 0).ok_or_else(|| bad("missing or zero n"))?;
    let lndet = lndet.ok_or_else(|| bad("missing det or lndet"))?;
    let id = name.unwrap_or_else(|| spec.to_string());
    let summary = ModelSummary::from_scalars(m, looks, lndet).map_err(|e| e.in_region(&id))?;
    Ok(Population {
        id,
        n,
        origin: Origin::Fixture(summary),
    })
}

fn preset_populations(name: &str) -> Result<Vec<Population>> {
    let rows: &[fixtures::RegionFit] = match name.to_ascii_lowercase().as_str() {
        "regions-a" => &fixtures::FITS_A,
        "regions-b" => &fixtures::FITS_B,
        other => return Err(Error::Parse(format!("unknown preset '{other}' (available: regions-a, regions-b)"))),
    };
    rows.iter()
        .map(|r| {
            Ok(Population {
                id: r.region.to_string(),
                n: r.n,
                origin: Origin::Fixture(ModelSummary::from_scalars(3, r.looks, r.det.ln())?),
            })
        })
        .collect()
}

fn populations(src: &SourceArgs, report: &mut RunReport) -> Result<Vec<Population>> {
    let mut out = Vec::new();
    match (&src.stack, src.regions.is_empty()) {
        (Some(path), false) => {
            let stack = load_stack(path, report)?;
            for spec in &src.regions {
                let (id, sample, fit) = fit_region(&stack, spec, report)?;
                let trace = sample.mean()?.trace();
                out.push(Population {
                    id,
                    n: sample.len(),
                    origin: Origin::Fit { fit, trace },
                });
            }
        }
        (Some(_), true) => return Err(Error::InvalidParameter("--stack needs at least one --region".into())),
        (None, false) => return Err(Error::InvalidParameter("--region needs --stack".into())),
        (None, true) => {}
    }
    for f in &src.fixtures {
        out.push(parse_fixture(f)?);
    }
    if let Some(p) = &src.preset {
        out.extend(preset_populations(p)?);
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter(
            "no populations: give --stack with --region, --fixture or --preset".into(),
        ));
    }
    Ok(out)
}

fn convention(c: Convention) -> QuantileConvention {
    match c {
        Convention::TwoSided => QuantileConvention::TwoSided,
        Convention::PaperCompat => QuantileConvention::PaperCompat,
    }
}

pub fn cmd_estimate(a: &EstimateArgs, report: &mut RunReport) -> Result<()> {
    let stack = load_stack(&a.stack, report)?;
    for spec in &a.regions {
        let (id, sample, fit) = fit_region(&stack, spec, report)?;
        let m = sample.dim();
        let fixed = WishartParams::new(fit.params.sigma().clone(), a.fixed_looks)
            .and_then(|p| aic(&sample, &p, true))
            .map_err(|e| e.in_region(&id))?;
        let pop = Population {
            id,
            n: sample.len(),
            origin: Origin::Fit {
                trace: fit.params.sigma().trace(),
                fit: fit.clone(),
            },
        };
        let mut r = pop.report();
        r.aic = Some(AicReport {
            looks_free: aic_from_log_likelihood(fit.log_likelihood, m, false),
            looks_fixed: fixed,
            fixed_looks: a.fixed_looks,
        });
        report.regions.push(r);
    }
    Ok(())
}

pub fn cmd_entropy(a: &EntropyArgs, report: &mut RunReport) -> Result<()> {
    let measures = measures(&a.kinds.kinds)?;
    let conv = convention(a.convention);
    if a.level.is_some() {
        report.convention = Some(conv);
        if let Some(t) = measures.iter().find(|m| matches!(m.kind(), EntropyKind::Tsallis(_))) {
            return Err(Error::Unsupported(format!(
                "{} has no asymptotic variance, so no confidence interval; drop --level or the Tsallis kind",
                t.kind()
            )));
        }
    }
    for pop in populations(&a.source, report)? {
        let mut r = pop.report();
        let model = pop.model();
        for measure in &measures {
            let kind = measure.kind();
            let value = measure.evaluate(&model).map_err(|e| e.in_region(&pop.id))?.value;
            let (variance, interval) = match kind {
                EntropyKind::Tsallis(_) => (None, None),
                _ => {
                    let est = pop.estimate(measure.as_ref())?;
                    let ci = a.level.map(|level| confidence_interval(&est, level, conv)).transpose()?;
                    (Some(est.variance), ci)
                }
            };
            r.entropies.push(EntropyReport {
                kind,
                value,
                variance,
                interval,
            });
        }
        report.regions.push(r);
    }
    Ok(())
}

fn testable(measures: &[Box<dyn EntropyMeasure>]) -> Result<()> {
    if let Some(t) = measures.iter().find(|m| matches!(m.kind(), EntropyKind::Tsallis(_))) {
        return Err(Error::Unsupported(format!("{} has no asymptotic variance and cannot be tested", t.kind())));
    }
    Ok(())
}

fn decisions(outcome: &crate::hypothesis::TestOutcome, levels: &[f64]) -> Vec<Decision> {
    outcome
        .decisions(levels)
        .into_iter()
        .map(|(alpha, reject)| Decision { alpha, reject })
        .collect()
}

pub fn cmd_test(a: &TestArgs, report: &mut RunReport) -> Result<()> {
    check_levels(&a.levels)?;
    let measures = measures(&a.kinds.kinds)?;
    testable(&measures)?;
    let pops = populations(&a.source, report)?;
    if pops.len() < 2 {
        return Err(Error::InvalidParameter("a contrast test needs at least two regions".into()));
    }
    let mut rows: Vec<RegionReport> = pops.iter().map(Population::report).collect();
    for measure in &measures {
        let estimates = pops
            .iter()
            .map(|p| p.estimate(measure.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        for (row, e) in rows.iter_mut().zip(&estimates) {
            row.entropies.push(EntropyReport {
                kind: e.kind,
                value: e.value,
                variance: Some(e.variance),
                interval: None,
            });
        }
        let t = entropy_test(&estimates)?;
        report.tests.push(TestReport {
            test: "contrast",
            kind: measure.kind(),
            regions: pops.iter().map(|p| p.id.clone()).collect(),
            statistic: t.statistic,
            df: t.df,
            p_value: t.p_value,
            reference: t.pooled_mean,
            decisions: decisions(&t, &a.levels),
        });
    }
    report.regions = rows;
    Ok(())
}

pub fn cmd_gof(a: &GofArgs, report: &mut RunReport) -> Result<()> {
    check_levels(&a.levels)?;
    let measures = measures(&a.kinds.kinds)?;
    testable(&measures)?;
    let pops = populations(&a.source, report)?;
    let [pop] = &pops[..] else {
        return Err(Error::InvalidParameter(format!(
            "goodness of fit takes exactly one region, got {}",
            pops.len()
        )));
    };
    let mut row = pop.report();
    for measure in &measures {
        let e = pop.estimate(measure.as_ref())?;
        row.entropies.push(EntropyReport {
            kind: e.kind,
            value: e.value,
            variance: Some(e.variance),
            interval: None,
        });
        let t = goodness_of_fit(&e, a.value).map_err(|err| err.in_region(&pop.id))?;
        report.tests.push(TestReport {
            test: "goodness-of-fit",
            kind: e.kind,
            regions: vec![pop.id.clone()],
            statistic: t.statistic,
            df: t.df,
            p_value: t.p_value,
            reference: a.value,
            decisions: decisions(&t, &a.levels),
        });
    }
    report.regions.push(row);
    Ok(())
}

pub fn cmd_simulate(a: &SimulateArgs, seed: Option<u64>, report: &mut RunReport) -> Result<()> {
    report.inputs.push(digest(&a.config)?);
    let cfg_file = SimulationConfig::load(&a.config)?;
    let mut cfg = cfg_file.mc_config();
    if let Some(t) = a.threads {
        cfg.threads = Some(t);
    }
    if let Some(r) = a.replicas {
        cfg.replicas = r;
    }
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    report.seed = Some(cfg.master_seed);
    let (p1, p2) = cfg_file.populations()?;
    let sim = match cfg_file.mode {
        ExperimentMode::Size => mc_size_experiment(&p1, &cfg)?,
        ExperimentMode::Power => mc_power_experiment(&p1, &p2, &cfg)?,
    };
    write_report(&sim, &a.out_dir)?;
    report.simulation = Some(sim);
    Ok(())
}

fn parse_looks_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad looks grid '{spec}'")))
        })
        .collect::<Result<_>>()?;
    let (start, end, step) = match parts[..] {
        [s, e] => (s, e, 1.0),
        [s, e, st] => (s, e, st),
        _ => return Err(Error::Parse(format!("looks grid '{spec}' must be START:END[:STEP]"))),
    };
    if !(step > 0.0) || end < start {
        return Err(Error::Parse(format!("looks grid '{spec}' must have END >= START and STEP > 0")));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

/// CSV rows `scale,looks,kind,value` over the grid.
pub fn casestudy_csv(a: &CasestudyArgs) -> Result<String> {
    let grid = parse_looks_grid(&a.looks)?;
    let mut kinds = vec![EntropyKind::Shannon];
    for &b in &a.betas {
        kinds.push(EntropyKind::renyi(b)?);
        kinds.push(EntropyKind::tsallis(b)?);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["scale", "looks", "kind", "value"])?;
    for &k in &a.scales {
        let sigma = fixtures::sigma_u().scaled(1.0 + k)?;
        for &l in &grid {
            let p = WishartParams::new(sigma.clone(), l)?;
            for kind in &kinds {
                let h = crate::entropy::entropy(*kind, &p)?;
                w.write_record([k.to_string(), l.to_string(), kind.to_string(), h.value.to_string()])?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn cmd_synth(a: &SynthArgs, seed: Option<u64>, report: &mut RunReport) -> Result<()> {
    let seed = seed.unwrap_or(DEFAULT_SEED);
    report.seed = Some(seed);
    let sampler = SamplerRegistry::builtin().resolve(&a.sampler)?;
    let p = WishartParams::new(preset(&a.preset)?.scaled(a.scale)?, a.looks)?;
    let n = a.rows.checked_mul(a.cols).filter(|&n| n > 0).ok_or(Error::EmptySelection)?;
    let sample = sample_with(sampler.as_ref(), &p, n, &mut stream_rng(seed, 0))?;
    let stack = CovarianceStack::new(a.rows, a.cols, sample.into_items())?;
    write_stack(&stack, &a.stack_out)?;
    report.outputs.push(digest(&a.stack_out)?);
    Ok(())
}

pub fn cmd_resample(a: &ResampleArgs, seed: Option<u64>, report: &mut RunReport) -> Result<()> {
    if a.regions.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "resampling takes exactly two regions, got {}",
            a.regions.len()
        )));
    }
    let stack = load_stack(&a.stack, report)?;
    let mut samples = Vec::new();
    for spec in &a.regions {
        let region = RegionSpec::parse(spec).map_err(|e| e.in_region(spec))?;
        if let RegionSpec::Mask { label, .. } = &region {
            report.inputs.push(digest(Path::new(label))?);
        }
        samples.push(extract_region(&stack, &region).map_err(|e| e.in_region(spec))?);
    }
    let kinds = measures(&a.kinds.kinds)?.iter().map(|m| m.kind()).collect();
    let cfg = MCConfig {
        replicas: a.replicas,
        sample_sizes: a.sizes.clone(),
        levels: a.levels.clone(),
        master_seed: seed.unwrap_or(DEFAULT_SEED),
        kinds,
        sampler: "resample".into(),
        threads: a.threads,
    };
    report.seed = Some(cfg.master_seed);
    let mode = if a.same_population {
        ExperimentMode::Size
    } else {
        ExperimentMode::Power
    };
    let sim = mc_resample_experiment(&samples[0], &samples[1], &cfg, mode)?;
    if let Some(dir) = &a.out_dir {
        write_report(&sim, dir)?;
    }
    report.simulation = Some(sim);
    Ok(())
}
