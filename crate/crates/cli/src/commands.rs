//! Command implementations. Each command resolves and validates its whole
//! configuration before any computation starts.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;
use serde::Serialize;

use gldpc::channels::{biawgn_capacity, sigma_from_db, SnrConvention};
use gldpc::de_awgn::{awgn_threshold_de, AwgnDensityEvolution, DeConfig};
use gldpc::de_bec::{bec_threshold, gc_erasure_poly, BecDeConfig};
use gldpc::ensemble_graph::{
    clean_graph, derive_comparison_ldpc, expurgate, girth_check, sample_graph, TannerGraph, DEFAULT_EXPURGATION_ATTEMPTS,
};
use gldpc::gauss_approx::{default_mean_grid, fit_gc_mean_map, ga_threshold, gma_threshold, ldpc_threshold, GaConfig, GcMeanMap};
use gldpc::mp_decoder::{bler_sim, snr_at_bler, BlerConfig, BlerRecord};
use gldpc::par::stream_seed;
use gldpc::subcodes::{verify_message_invariance, EdgeProfile, EnsembleSpec, Invariance, LinearSubcode};
use gldpc::threshold::{Method, ThresholdResult};

use crate::grid::{parse_degree_fractions, parse_range};
use crate::sidecar::Sidecar;
use crate::{Channel, Cli, Command, Failure, LdpcArgs, MethodArg, RerunArgs, SimulateArgs, ThresholdArgs, VerifyArgs};

pub fn dispatch(command: Command, args: &[String]) -> Result<(), Failure> {
    match command {
        Command::VerifySubcode(a) => verify_subcode(&a, args),
        Command::Threshold(a) => threshold(&a, args, false),
        Command::GapCurves(a) => threshold(&a, args, true),
        Command::LdpcThreshold(a) => ldpc(&a, args),
        Command::Simulate(a) => simulate(&a, args),
        Command::Rerun(a) => rerun(&a),
    }
}

fn create(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn resolve_code(name: &str) -> Result<LinearSubcode> {
    LinearSubcode::resolve(name).with_context(|| format!("cannot load subcode `{name}`"))
}

fn verify_subcode(a: &VerifyArgs, args: &[String]) -> Result<(), Failure> {
    let start = Instant::now();
    let code = resolve_code(&a.code)?;
    let verdict = verify_message_invariance(&code)?;
    println!("{code}");
    if let Some(d) = code.min_distance() {
        println!("minimum distance: {d}");
    }
    let table = match &verdict {
        Invariance::Transitive(searched) => {
            println!("message-invariant: yes");
            code.permutations().unwrap_or(searched)
        }
        Invariance::NotInvariant { position } => {
            println!("message-invariant: no (no automorphism maps position 1 to position {position})");
            return Err(Failure::Verification(format!(
                "`{}` is not message-invariant at position {position}",
                code.name()
            )));
        }
    };
    let mut rows = Vec::new();
    for (i, perm) in table.iter().enumerate() {
        let perm: Vec<String> = perm.iter().map(|p| (p + 1).to_string()).collect();
        let poly: Vec<String> = gc_erasure_poly(&code, i)?.coeffs.iter().map(u64::to_string).collect();
        println!("pi_{}: ({})  erasure polynomial: ({})", i + 1, perm.join(","), poly.join(","));
        rows.push([(i + 1).to_string(), perm.join(" "), poly.join(" ")]);
    }
    if let Some(out) = &a.out {
        let mut w = create(out)?;
        w.write_record(["position", "permutation", "erasure_coefficients"]).map_err(anyhow::Error::from)?;
        for r in &rows {
            w.write_record(r).map_err(anyhow::Error::from)?;
        }
        w.flush().map_err(anyhow::Error::from)?;
        #[derive(Serialize)]
        struct Config<'a> {
            code: &'a str,
            length: usize,
            parity_rows: Vec<String>,
        }
        let parity_rows = (0..code.check_rows())
            .map(|r| code.parity_check().row_bits(r).iter().map(u8::to_string).collect())
            .collect();
        let mut sc = Sidecar::new(
            "verify-subcode",
            args,
            Config {
                code: code.name(),
                length: code.len(),
                parity_rows,
            },
        )?;
        sc.outputs.push(out.clone());
        sc.runtime_s = start.elapsed().as_secs_f64();
        sc.write(out)?;
    }
    Ok(())
}

/// Resolved settings of `threshold` and `gap-curves`.
#[derive(Serialize)]
struct ThresholdPlan {
    channel: Channel,
    code: String,
    code_length: usize,
    parity_rows: usize,
    var_degree: usize,
    t_grid: Vec<f64>,
    method: Method,
    bec: Option<BecDeConfig>,
    ga: Option<GaConfig>,
    de: Option<DeConfig>,
    gc_map_source: Option<String>,
    record_runtime: bool,
}

fn plan_threshold(a: &ThresholdArgs) -> Result<(ThresholdPlan, LinearSubcode, Option<GcMeanMap>)> {
    let code = resolve_code(&a.code)?;
    let t_grid = match (&a.t, &a.t_grid) {
        (Some(t), None) => vec![*t],
        (None, Some(g)) => parse_range(g)?,
        _ => bail!("give exactly one of --t and --t-grid"),
    };
    if let Some(t) = t_grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        bail!("GC fraction {t} outside [0, 1]");
    }
    if a.j < 2 {
        bail!("variable degree J must be at least 2");
    }
    for v in [a.tol, a.target_pe, a.l_max].into_iter().flatten() {
        if !(v > 0.0 && v.is_finite()) {
            bail!("tolerances, targets and l_max must be positive, got {v}");
        }
    }
    for v in [a.max_iters, a.samples, a.confirm_samples, a.half_bins, a.fit_gc_map].into_iter().flatten() {
        if v == 0 {
            bail!("counts must be positive");
        }
    }
    let method = match (a.channel, a.method) {
        (Channel::Bec, None) => Method::BecDe,
        (Channel::Bec, Some(m)) => bail!("--method {m:?} applies to the AWGN channel only"),
        (Channel::Awgn, None | Some(MethodArg::Gma)) => Method::Gma,
        (Channel::Awgn, Some(MethodArg::Ga)) => Method::Ga,
        (Channel::Awgn, Some(MethodArg::DeMc)) => Method::DeMc,
    };
    let mut plan = ThresholdPlan {
        channel: a.channel,
        code: code.name().to_string(),
        code_length: code.len(),
        parity_rows: code.check_rows(),
        var_degree: a.j,
        t_grid,
        method,
        bec: None,
        ga: None,
        de: None,
        gc_map_source: None,
        record_runtime: a.record_runtime,
    };
    let mut gc_map = None;
    match method {
        Method::BecDe => {
            let mut cfg = BecDeConfig::default();
            cfg.tol = a.tol.unwrap_or(cfg.tol);
            cfg.target = a.target_pe.unwrap_or(cfg.target);
            cfg.max_iters = a.max_iters.unwrap_or(cfg.max_iters);
            plan.bec = Some(cfg);
        }
        Method::Ga | Method::Gma => {
            let mut cfg = GaConfig {
                phi: a.phi.into(),
                ..GaConfig::default()
            };
            cfg.tol = a.tol.unwrap_or(cfg.tol);
            cfg.target_pe = a.target_pe.unwrap_or(cfg.target_pe);
            cfg.max_iters = a.max_iters.unwrap_or(cfg.max_iters);
            plan.ga = Some(cfg);
            let needs_map = plan.t_grid.iter().any(|&t| t > 0.0);
            match (&a.gc_map, a.fit_gc_map) {
                (Some(_), Some(_)) => bail!("give at most one of --gc-map and --fit-gc-map"),
                (Some(path), None) => {
                    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
                    gc_map = Some(GcMeanMap::read_csv(file)?);
                    plan.gc_map_source = Some(path.display().to_string());
                }
                (None, Some(n)) => {
                    let seed = a.seed.ok_or_else(|| anyhow!("--fit-gc-map needs --seed"))?;
                    plan.gc_map_source = Some(format!("monte-carlo fit, {n} samples per mean, seed {seed}"));
                }
                (None, None) if needs_map && GcMeanMap::paper_fit_for(&code).is_none() => {
                    bail!("no built-in GC mean map for `{}`; pass --gc-map or --fit-gc-map", code.name())
                }
                (None, None) => plan.gc_map_source = needs_map.then(|| "built-in fit".to_string()),
            }
        }
        Method::DeMc => {
            if a.seed.is_none() {
                bail!("--method de-mc is stochastic and needs --seed");
            }
            let mut cfg = DeConfig {
                seed: a.seed.unwrap_or_default(),
                ..DeConfig::default()
            };
            cfg.tol = a.tol.unwrap_or(cfg.tol);
            cfg.target_pe = a.target_pe.unwrap_or(cfg.target_pe);
            cfg.max_iters = a.max_iters.unwrap_or(cfg.max_iters);
            cfg.samples = a.samples.unwrap_or(cfg.samples);
            cfg.confirm_samples = a.confirm_samples.unwrap_or(cfg.confirm_samples);
            cfg.half_bins = a.half_bins.unwrap_or(cfg.half_bins);
            cfg.l_max = a.l_max.unwrap_or(cfg.l_max);
            cfg.grid()?;
            plan.de = Some(cfg);
        }
    }
    if !matches!(method, Method::DeMc) && (a.samples.is_some() || a.confirm_samples.is_some() || a.half_bins.is_some() || a.l_max.is_some()) {
        bail!("--samples, --confirm-samples, --half-bins and --l-max apply to --method de-mc only");
    }
    for &t in &plan.t_grid {
        EnsembleSpec::new(code.clone(), a.j, t, code.len())?;
    }
    Ok((plan, code, gc_map))
}

fn threshold(a: &ThresholdArgs, args: &[String], gaps: bool) -> Result<(), Failure> {
    let (plan, code, mut gc_map) = plan_threshold(a)?;
    let start = Instant::now();
    let mut seeds = BTreeMap::new();
    if let (Some(n), Some(seed)) = (a.fit_gc_map, a.seed) {
        let fit_seed = stream_seed(seed, 0);
        seeds.insert("gc_map_fit".to_string(), fit_seed);
        gc_map = Some(fit_gc_mean_map(&code, &default_mean_grid(), n, fit_seed)?);
    }
    if let Some(cfg) = &plan.de {
        seeds.insert("density_evolution".to_string(), cfg.seed);
    }
    let mut results: Vec<(f64, ThresholdResult, f64)> = Vec::new();
    for &t in &plan.t_grid {
        let point = Instant::now();
        let spec = EnsembleSpec::new(code.clone(), plan.var_degree, t, code.len())?;
        let r = match plan.method {
            Method::BecDe => bec_threshold(&spec, plan.bec.as_ref().expect("planned"))?,
            Method::Ga => ga_threshold(&spec, gc_map.clone(), plan.ga.as_ref().expect("planned"))?,
            Method::Gma => gma_threshold(&spec, gc_map.clone(), plan.ga.as_ref().expect("planned"))?,
            Method::DeMc => awgn_threshold_de(&spec, plan.de.as_ref().expect("planned"))?,
        };
        log::info!("t = {t}: threshold {:.6}", r.threshold);
        results.push((t, r, point.elapsed().as_secs_f64()));
    }
    let mut w = create(&a.out)?;
    let runtime = |secs: f64| if plan.record_runtime { format!("{secs:.3}") } else { String::new() };
    let write = |w: &mut csv::Writer<_>| -> Result<()> {
        if gaps {
            w.write_record(["t", "threshold", "design_rate", "capacity_at_threshold", "gap", "method", "runtime"])?;
        } else {
            w.write_record(["t", "threshold", "method", "tol", "runtime", "lower", "upper", "uncertain"])?;
        }
        for (t, r, secs) in &results {
            if gaps {
                let rate = EnsembleSpec::new(code.clone(), plan.var_degree, *t, code.len())?.design_rate();
                let capacity = match plan.channel {
                    Channel::Bec => 1.0 - r.threshold,
                    Channel::Awgn => biawgn_capacity(r.threshold),
                };
                w.write_record([
                    t.to_string(),
                    r.threshold.to_string(),
                    rate.to_string(),
                    capacity.to_string(),
                    (capacity - rate).to_string(),
                    r.method.to_string(),
                    runtime(*secs),
                ])?;
            } else {
                w.write_record([
                    t.to_string(),
                    r.threshold.to_string(),
                    r.method.to_string(),
                    r.tol.to_string(),
                    runtime(*secs),
                    r.lower.to_string(),
                    r.upper.to_string(),
                    r.uncertain.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    };
    write(&mut w)?;
    let mut sc = Sidecar::new(if gaps { "gap-curves" } else { "threshold" }, args, &plan)?;
    sc.seeds = seeds;
    sc.outputs.push(a.out.clone());
    sc.runtime_s = start.elapsed().as_secs_f64();
    sc.write(&a.out)?;
    let unsettled: Vec<String> = results
        .iter()
        .filter(|(_, r, _)| r.uncertain || r.lower == 0.0)
        .map(|(t, _, _)| t.to_string())
        .collect();
    if !unsettled.is_empty() {
        return Err(Failure::NonConvergence(format!("no reliable threshold at t = {}", unsettled.join(", "))));
    }
    Ok(())
}

#[derive(Serialize)]
struct LdpcPlan {
    var_degree: usize,
    check_degrees: Vec<(usize, f64)>,
    method: Method,
    ga: Option<GaConfig>,
    de: Option<DeConfig>,
}

fn ldpc(a: &LdpcArgs, args: &[String]) -> Result<(), Failure> {
    let check_degrees = parse_degree_fractions(&a.rho)?;
    let profile = EdgeProfile::ldpc(a.lambda, &check_degrees)?;
    profile.validate()?;
    let mut plan = LdpcPlan {
        var_degree: a.lambda,
        check_degrees,
        method: Method::Gma,
        ga: None,
        de: None,
    };
    match a.method {
        MethodArg::Ga | MethodArg::Gma => {
            let mut cfg = GaConfig {
                phi: a.phi.into(),
                ..GaConfig::default()
            };
            cfg.tol = a.tol.unwrap_or(cfg.tol);
            cfg.target_pe = a.target_pe.unwrap_or(cfg.target_pe);
            cfg.max_iters = a.max_iters.unwrap_or(cfg.max_iters);
            plan.method = if a.method == MethodArg::Ga { Method::Ga } else { Method::Gma };
            plan.ga = Some(cfg);
        }
        MethodArg::DeMc => {
            let mut cfg = DeConfig::default();
            cfg.tol = a.tol.unwrap_or(cfg.tol);
            cfg.target_pe = a.target_pe.unwrap_or(cfg.target_pe);
            cfg.max_iters = a.max_iters.unwrap_or(cfg.max_iters);
            cfg.half_bins = a.half_bins.unwrap_or(cfg.half_bins);
            cfg.l_max = a.l_max.unwrap_or(cfg.l_max);
            cfg.grid()?;
            plan.method = Method::DeMc;
            plan.de = Some(cfg);
        }
    }
    let start = Instant::now();
    let r = match (&plan.ga, &plan.de) {
        (Some(cfg), _) => ldpc_threshold(plan.var_degree, &plan.check_degrees, plan.method, cfg)?,
        (None, Some(cfg)) => AwgnDensityEvolution::new(profile, cfg.grid()?)?.threshold(cfg)?,
        (None, None) => unreachable!("a method was planned"),
    };
    let mut w = create(&a.out)?;
    let rho: Vec<String> = plan.check_degrees.iter().map(|(d, f)| format!("{d}:{f}")).collect();
    (|| -> Result<()> {
        w.write_record(["lambda", "rho", "method", "threshold", "lower", "upper", "tol"])?;
        w.write_record([
            plan.var_degree.to_string(),
            rho.join(" "),
            r.method.to_string(),
            r.threshold.to_string(),
            r.lower.to_string(),
            r.upper.to_string(),
            r.tol.to_string(),
        ])?;
        w.flush()?;
        Ok(())
    })()?;
    let mut sc = Sidecar::new("ldpc-threshold", args, &plan)?;
    sc.outputs.push(a.out.clone());
    sc.runtime_s = start.elapsed().as_secs_f64();
    sc.write(&a.out)?;
    if r.lower == 0.0 {
        return Err(Failure::NonConvergence("no noise level converged".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct SimulatePlan {
    code: String,
    var_degree: usize,
    gc_fraction: f64,
    block_length: usize,
    design_rate: f64,
    sigmas: Vec<f64>,
    bler: BlerConfig,
    max_swaps: usize,
    compare_ldpc: bool,
    expurgate: bool,
}

fn simulate(a: &SimulateArgs, args: &[String]) -> Result<(), Failure> {
    let code = resolve_code(&a.code)?;
    let spec = EnsembleSpec::new(code.clone(), a.j, a.t, a.n)?;
    spec.num_checks()?;
    let seed = a.seed.ok_or_else(|| anyhow!("simulate is stochastic and needs --seed"))?;
    if a.trials == 0 || a.max_errors == 0 || a.max_iters == 0 {
        return Err(anyhow!("--trials, --max-errors and --max-iters must be positive").into());
    }
    let convention: SnrConvention = a.convention.into();
    let rate = spec.design_rate();
    if convention == SnrConvention::EbN0 && rate <= 0.0 {
        return Err(anyhow!("Eb/N0 needs a positive design rate, got {rate}").into());
    }
    let sigmas: Vec<f64> = if a.sigma.is_empty() {
        a.snr_db.iter().map(|&db| sigma_from_db(db, convention, rate)).collect()
    } else {
        a.sigma.clone()
    };
    if let Some(s) = sigmas.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        return Err(anyhow!("noise level {s} must be positive").into());
    }
    if let Some(dir) = &a.graph_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let plan = SimulatePlan {
        code: code.name().to_string(),
        var_degree: a.j,
        gc_fraction: a.t,
        block_length: a.n,
        design_rate: rate,
        sigmas: sigmas.clone(),
        bler: BlerConfig {
            trials: a.trials,
            max_iters: a.max_iters,
            max_block_errors: a.max_errors,
            seed,
            convention,
        },
        max_swaps: a.max_swaps,
        compare_ldpc: !a.no_ldpc,
        expurgate: a.expurgate,
    };

    let start = Instant::now();
    let mut seeds = BTreeMap::new();
    let mut seed_for = |name: &str, stream: u64| {
        let s = stream_seed(seed, stream);
        seeds.insert(name.to_string(), s);
        s
    };
    let (sample_seed, clean_seed, derive_seed, gldpc_seed, ldpc_seed) = (
        seed_for("graph_sampling", 0),
        seed_for("graph_cleaning", 1),
        seed_for("ldpc_derivation", 2),
        seed_for("gldpc_trials", 3),
        seed_for("ldpc_trials", 4),
    );
    let sample = |s: u64| clean_graph(&sample_graph(&spec, s)?, stream_seed(clean_seed, s), a.max_swaps);
    let gldpc = if plan.expurgate {
        expurgate(sample_seed, DEFAULT_EXPURGATION_ATTEMPTS, sample)?.0
    } else {
        clean_graph(&sample_graph(&spec, sample_seed)?, clean_seed, a.max_swaps)?
    };
    let mut curves: Vec<(&str, TannerGraph, u64)> = vec![("gldpc", gldpc, gldpc_seed)];
    if plan.compare_ldpc {
        let derive = |s: u64| derive_comparison_ldpc(&curves[0].1, s, a.max_swaps);
        let ldpc = if plan.expurgate {
            expurgate(derive_seed, DEFAULT_EXPURGATION_ATTEMPTS, derive)?.0
        } else {
            derive(derive_seed)?
        };
        curves.push(("ldpc", ldpc, ldpc_seed));
    }
    let mut all: Vec<(&str, f64, Vec<BlerRecord>)> = Vec::new();
    for (name, graph, curve_seed) in &curves {
        if !girth_check(graph).is_clean() {
            return Err(Failure::NonConvergence(format!("{name} graph still has short cycles")));
        }
        if let Some(dir) = &a.graph_dir {
            graph.save(&dir.join(format!("{name}.graph")))?;
        }
        let cfg = BlerConfig {
            seed: *curve_seed,
            ..plan.bler
        };
        let mut records = bler_sim(graph, &sigmas, &cfg)?;
        for r in &mut records {
            r.seed = seed;
        }
        all.push((name, graph.design_rate(), records));
    }
    let mut w = create(&a.out)?;
    (|| -> Result<()> {
        w.write_record(["curve", "design_rate", "sigma", "snr_db", "trials", "block_errors", "bler", "avg_iters", "seed"])?;
        for (name, rate, records) in &all {
            for r in records {
                w.write_record([
                    name.to_string(),
                    rate.to_string(),
                    r.sigma.to_string(),
                    r.snr_db.to_string(),
                    r.trials.to_string(),
                    r.block_errors.to_string(),
                    r.bler.to_string(),
                    r.avg_iters.to_string(),
                    r.seed.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    })()?;
    for (name, _, records) in &all {
        match snr_at_bler(records, 1e-2) {
            Some(snr) => println!("{name}: BLER 1e-2 at {snr:.3} dB"),
            None => println!("{name}: BLER 1e-2 not bracketed by the simulated points"),
        }
    }
    let mut sc = Sidecar::new("simulate", args, &plan)?;
    sc.seeds = seeds;
    sc.outputs.push(a.out.clone());
    if let Some(dir) = &a.graph_dir {
        for (name, _, _) in &all {
            sc.outputs.push(dir.join(format!("{name}.graph")));
        }
    }
    sc.runtime_s = start.elapsed().as_secs_f64();
    sc.write(&a.out)?;
    Ok(())
}

fn rerun(a: &RerunArgs) -> Result<(), Failure> {
    let sc = Sidecar::read(&a.sidecar)?;
    let mut args = sc.args.clone();
    let out = a.out.to_string_lossy().into_owned();
    let mut replaced = false;
    let mut i = 0;
    while i < args.len() {
        if args[i] == "--out" && i + 1 < args.len() {
            args[i + 1] = out.clone();
            replaced = true;
            i += 1;
        } else if args[i].starts_with("--out=") {
            args[i] = format!("--out={out}");
            replaced = true;
        }
        i += 1;
    }
    if !replaced {
        args.push("--out".into());
        args.push(out);
    }
    let cli = Cli::try_parse_from(std::iter::once("gldpc".to_string()).chain(args.iter().cloned()))
        .map_err(|e| anyhow!("sidecar arguments no longer parse: {e}"))?;
    if matches!(cli.command, Command::Rerun(_)) {
        return Err(anyhow!("a sidecar cannot record a rerun").into());
    }
    dispatch(cli.command, &args)
}
