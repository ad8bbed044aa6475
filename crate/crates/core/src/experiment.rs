//! Reproducible experiment runners. Each returns its primary output as text
//! (CSV or a file format) with `#` comment lines echoing the version, command
//! and fully resolved configuration, plus a status for the process exit code.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::bounds::{self, diverse_family_rate, packing_rate, sum_rate_upper_bound, BoundReport};
use crate::bpis::{
    build_conflict_graph, max_bpis, max_bpis_direct, random_bpis_trial, rate_bpis_consistent, rate_bpis_floor,
    DEFAULT_MAX_VERTICES,
};
use crate::channel::{all_words, binary_erasure_channel, sample_erasure_identity, Channel};
use crate::codegen::{build_zero_error_code, verify_zero_error_against, PackParams, PackedCode, ZeroErrorVerdict};
use crate::coding::{exact_zero_error_sum_rate, is_zero_error, CodebookPair};
use crate::error::{Error, Result};
use crate::math::{derive_seed, log2_big, seeded_rng};
use crate::uniform::{
    binary_uniform_log2_bound, construct_binary_uniform, construct_staircase_uniform, is_gamma_uniform_sets,
    staircase_uniform_log2_bound, UniformConstruction, Verdict,
};
use crate::VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Ok,
    /// Inputs outside a result's hypotheses.
    Regime,
    /// A zero-error verification or uniformity check failed.
    VerificationFailed,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Ok => 0,
            RunStatus::Regime => 2,
            RunStatus::VerificationFailed => 3,
        }
    }
}

/// Exit code for an error: 2 for domain errors, 4 for budgets, 1 otherwise.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) => 2,
        Error::Budget(_) => 4,
        Error::Construction(_) | Error::Parse { .. } => 1,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    pub text: String,
    pub status: RunStatus,
}

impl RunOutput {
    fn ok(text: String) -> Self {
        RunOutput {
            text,
            status: RunStatus::Ok,
        }
    }
}

/// `# zerogap <version>`, `# command: <name>` and one `# key = value` line
/// per configuration entry.
pub fn header(command: &str, config: &[(&str, String)]) -> String {
    let mut s = format!("# zerogap {VERSION}\n# command: {command}\n");
    for (k, v) in config {
        s.push_str(&format!("# {k} = {v}\n"));
    }
    s
}

fn csv_rows<I, R>(header_row: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header_row).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

fn alphabet(q_bits: u32) -> Result<usize> {
    1usize
        .checked_shl(q_bits)
        .filter(|&q| (2..=1 << 15).contains(&q))
        .ok_or_else(|| Error::domain(format!("q = {q_bits} bits gives an unsupported alphabet")))
}

fn fmt_f(x: f64) -> String {
    format!("{x}")
}

/// A random erasure/identity channel file for alphabet `2^q`.
pub fn sample(q_bits: u32, eps: f64, seed: u64) -> Result<RunOutput> {
    let q_size = alphabet(q_bits)?;
    let channel = sample_erasure_identity(q_size, eps, seed)?;
    let mut text = header(
        "sample",
        &[
            ("q", q_bits.to_string()),
            ("eps", fmt_f(eps)),
            ("seed", seed.to_string()),
        ],
    );
    text.push_str(&channel.to_text());
    Ok(RunOutput::ok(text))
}

/// Exact zero-error sum rate, largest BPIS and the rate-implied BPIS floor,
/// one row per channel (all 16 binary erasure/identity channels when
/// `channels` is `None`).
pub fn exact(channels: Option<Vec<(String, Channel)>>, n: usize, budget: usize) -> Result<RunOutput> {
    let channels = channels.unwrap_or_else(|| {
        (0u8..16)
            .map(|m| (format!("mask{m}"), binary_erasure_channel(m)))
            .collect()
    });
    let rows: Vec<Vec<String>> = channels
        .par_iter()
        .map(|(id, ch)| exact_row(id, ch, n, budget))
        .collect::<Result<_>>()?;
    let consistent = rows.iter().all(|r| r[6] == "true" && r[7] == "true");
    let mut text = header("exact", &[("n", n.to_string()), ("budget", budget.to_string())]);
    text.push_str(&csv_rows(
        &[
            "channel",
            "erased",
            "n",
            "exact_sum_rate",
            "max_bpis",
            "rate_bpis_floor",
            "rate_bpis_consistent",
            "bpis_zero_error",
        ],
        rows,
    ));
    Ok(RunOutput {
        text,
        status: if consistent {
            RunStatus::Ok
        } else {
            RunStatus::VerificationFailed
        },
    })
}

fn exact_row(id: &str, channel: &Channel, n: usize, budget: usize) -> Result<Vec<String>> {
    let exact = exact_zero_error_sum_rate(channel, n, budget)?;
    let best = max_bpis_direct(channel, n, budget)?;
    let floor = rate_bpis_floor(exact.rate.sum, n, channel.q_bits());
    let consistent = rate_bpis_consistent(best.size, floor);
    let zero_error = best.size == 0 || {
        let words = all_words(channel.q_size(), n);
        let pair = CodebookPair::new(
            best.a.iter().map(|&i| words[i].clone()).collect(),
            best.b.iter().map(|&j| words[j].clone()).collect(),
        )?;
        is_zero_error(channel, &pair)
    };
    Ok(vec![
        id.to_string(),
        channel.erased_count().to_string(),
        n.to_string(),
        fmt_f(exact.rate.sum),
        best.size.to_string(),
        fmt_f(floor),
        consistent.to_string(),
        zero_error.to_string(),
    ])
}

/// Largest BPIS of the conflict graph at blocklength 1 and, by the product
/// law, at blocklength `n`.
pub fn bpis(channel: &Channel, n: usize, max_vertices: Option<usize>) -> Result<RunOutput> {
    let graph = build_conflict_graph(channel)?;
    let best = max_bpis(&graph, max_vertices.unwrap_or(DEFAULT_MAX_VERTICES))?;
    let size_n = num_bigint::BigUint::from(best.size).pow(n as u32);
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let mut text = header(
        "bpis",
        &[
            ("channel", channel.name().unwrap_or("file").to_string()),
            ("q_size", channel.q_size().to_string()),
            ("n", n.to_string()),
        ],
    );
    text.push_str(&csv_rows(
        &["n", "bpis_size", "log2_size_per_use", "a", "b"],
        [vec![
            n.to_string(),
            size_n.to_string(),
            fmt_f(log2_big(&size_n) / n as f64),
            join(&best.a),
            join(&best.b),
        ]],
    ));
    Ok(RunOutput::ok(text))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomBpisSummary {
    pub satisfied: usize,
    pub trials: usize,
}

impl RandomBpisSummary {
    pub fn rate(&self) -> f64 {
        self.satisfied as f64 / self.trials as f64
    }
}

/// Trial `i` uses seed `seed + i`. The last row carries the empirical
/// satisfaction rate.
pub fn random_bpis_sweep(q_bits: u32, eps: f64, trials: usize, seed: u64) -> Result<(RunOutput, RandomBpisSummary)> {
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let records = (0..trials as u64)
        .into_par_iter()
        .map(|i| random_bpis_trial(q_bits, eps, seed.wrapping_add(i)))
        .collect::<Result<Vec<_>>>()?;
    let satisfied = records.iter().filter(|r| r.satisfied).count();
    let summary = RandomBpisSummary { satisfied, trials };
    let mut rows: Vec<Vec<String>> = records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                i.to_string(),
                r.seed.to_string(),
                r.q.to_string(),
                fmt_f(r.eps),
                r.erased_count.to_string(),
                r.bpis_size.to_string(),
                fmt_f(r.log_rate),
                fmt_f(r.bound),
                r.satisfied.to_string(),
            ]
        })
        .collect();
    rows.push(vec![
        "rate".into(),
        seed.to_string(),
        q_bits.to_string(),
        fmt_f(eps),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        fmt_f(summary.rate()),
    ]);
    let mut text = header(
        "prop5-sweep",
        &[
            ("q", q_bits.to_string()),
            ("eps", fmt_f(eps)),
            ("trials", trials.to_string()),
            ("seed", seed.to_string()),
        ],
    );
    text.push_str(&csv_rows(
        &[
            "trial",
            "seed",
            "q",
            "eps",
            "erased",
            "bpis_size",
            "log_rate",
            "bound",
            "satisfied",
        ],
        rows,
    ));
    Ok((RunOutput::ok(text), summary))
}

/// The upper bound `2q(1−1/n)(1+γ)` over `q ∈ 1..=q_max`, `n ∈ 2..=n_max`
/// and the given γ values.
pub fn upper_bound_sweep(q_max: u32, n_max: usize, gammas: &[f64], eps: Option<f64>) -> Result<RunOutput> {
    if q_max == 0 || n_max < 2 || gammas.is_empty() {
        return Err(Error::domain("need q >= 1, n >= 2 and at least one gamma"));
    }
    let mut rows = Vec::new();
    for q in 1..=q_max {
        for n in 2..=n_max {
            for &g in gammas {
                let r = sum_rate_upper_bound(q as f64, n, g, eps);
                rows.push(vec![
                    q.to_string(),
                    n.to_string(),
                    fmt_f(g),
                    fmt_f(r.value),
                    fmt_f(2.0 * q as f64),
                    r.hypotheses_ok().to_string(),
                    r.violations.join("|"),
                ]);
            }
        }
    }
    let mut text = header(
        "theorem3-sweep",
        &[
            ("q_max", q_max.to_string()),
            ("n_max", n_max.to_string()),
            ("gamma", gammas.iter().map(|g| fmt_f(*g)).collect::<Vec<_>>().join(",")),
            ("eps", eps.map_or("none".into(), fmt_f)),
        ],
    );
    text.push_str(&csv_rows(
        &["q", "n", "gamma", "rhs", "trivial_2q", "hypotheses_ok", "violations"],
        rows,
    ));
    Ok(RunOutput::ok(text))
}

/// The uniform family pair for alphabet `q_size` (binary construction for
/// Q = 2, the general one otherwise).
pub fn construct_for(q_size: usize, n: usize, gamma: f64) -> Result<(UniformConstruction, f64)> {
    if q_size == 2 {
        Ok((construct_binary_uniform(n, gamma)?, binary_uniform_log2_bound(n, gamma)))
    } else {
        Ok((
            construct_staircase_uniform(q_size, n, gamma)?,
            staircase_uniform_log2_bound(q_size, n, gamma),
        ))
    }
}

/// Builds the uniform families, checks uniformity (exhaustively or by an
/// audit of `audit_budget` pairs) and compares `|A||B|` with the size bound.
pub fn uniform_construct(q_size: usize, n: usize, gamma: f64, audit_budget: u64, seed: u64) -> Result<RunOutput> {
    let (c, bound) = construct_for(q_size, n, gamma)?;
    let verdict = is_gamma_uniform_sets(&c.a, &c.b, gamma, audit_budget, seed);
    let (verdict_s, samples, witness) = match &verdict {
        Verdict::Proved => ("proved", String::new(), String::new()),
        Verdict::Audited { samples } => ("audited", samples.to_string(), String::new()),
        Verdict::Refuted { x, y } => ("refuted", String::new(), format!("{x} {y}")),
    };
    let lp = c.log2_product();
    let mut text = header(
        "uniform-construct",
        &[
            ("q_size", q_size.to_string()),
            ("n", n.to_string()),
            ("gamma", fmt_f(gamma)),
            ("budget", audit_budget.to_string()),
            ("seed", seed.to_string()),
        ],
    );
    for w in &c.warnings {
        text.push_str(&format!("# warning: {w}\n"));
    }
    text.push_str(&format!("# A: {}\n# B: {}\n", c.a.summary(), c.b.summary()));
    text.push_str(&csv_rows(
        &[
            "q_size",
            "n",
            "gamma",
            "radius",
            "size_a",
            "size_b",
            "log2_product",
            "log2_bound",
            "log2_margin",
            "verdict",
            "samples",
            "witness",
        ],
        [vec![
            q_size.to_string(),
            n.to_string(),
            fmt_f(gamma),
            c.radius.to_string(),
            c.a.cardinality().to_string(),
            c.b.cardinality().to_string(),
            fmt_f(lp),
            fmt_f(bound),
            fmt_f(lp - bound),
            verdict_s.to_string(),
            samples,
            witness,
        ]],
    ));
    Ok(RunOutput {
        text,
        status: if verdict.is_refuted() {
            RunStatus::VerificationFailed
        } else {
            RunStatus::Ok
        },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub q_bits: u32,
    pub n: usize,
    pub eps: f64,
    pub gamma: f64,
    pub slack: f64,
    pub trials: usize,
    pub seed: u64,
    pub sample_cap: usize,
    pub raw_d: Option<f64>,
    /// Cap on channel draws per trial while conditioning on few erasures.
    pub max_rejections: usize,
}

/// Per-trial outcome of [`pipeline`].
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineTrial {
    pub seed: u64,
    pub channel_seed: u64,
    pub rejections: usize,
    pub channel: Channel,
    pub code: PackedCode,
    pub verdict: ZeroErrorVerdict,
}

/// A channel from the random ensemble conditioned on at most `2εQ²` erased
/// entries. Attempt seeds are drawn from stream 2 of `seed`.
pub fn conditioned_channel(q_size: usize, eps: f64, seed: u64, max_rejections: usize) -> Result<(Channel, u64, usize)> {
    let mut seeds = seeded_rng(seed, 2);
    let limit = 2.0 * eps * (q_size * q_size) as f64;
    for rejections in 0..=max_rejections {
        let s = derive_seed(&mut seeds);
        let ch = sample_erasure_identity(q_size, eps, s)?;
        if ch.erased_count() as f64 <= limit + 1e-9 {
            return Ok((ch, s, rejections));
        }
    }
    Err(Error::budget(format!(
        "no channel with at most 2*eps*Q^2 erasures within {max_rejections} rejections"
    )))
}

/// Samples a conditioned channel per trial (trial `i` uses seed `seed + i`),
/// builds the uniform families, packs them and verifies the code. Rows report
/// achieved rates next to the formula rates.
pub fn pipeline(cfg: &PipelineConfig) -> Result<(RunOutput, Vec<PipelineTrial>)> {
    let q_size = alphabet(cfg.q_bits)?;
    if cfg.trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let (c, _) = construct_for(q_size, cfg.n, cfg.gamma)?;
    let q = cfg.q_bits as f64;
    let nq = cfg.n as f64 * q;
    let delta1 = 1.0 - log2_big(&c.a.cardinality()) / nq;
    let delta2 = 1.0 - log2_big(&c.b.cardinality()) / nq;

    let trials = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| -> Result<PipelineTrial> {
            let seed = cfg.seed.wrapping_add(i);
            let (channel, channel_seed, rejections) = conditioned_channel(q_size, cfg.eps, seed, cfg.max_rejections)?;
            let params = PackParams {
                gamma: cfg.gamma,
                eps: cfg.eps,
                slack: cfg.slack,
                sample_cap: cfg.sample_cap,
                seed,
                raw_d: cfg.raw_d,
            };
            let code = build_zero_error_code(&c.a, &c.b, &params)?;
            let verdict = verify_zero_error_against(&code, &channel)?;
            Ok(PipelineTrial {
                seed,
                channel_seed,
                rejections,
                channel,
                code,
                verdict,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = trials.iter().enumerate().map(|(i, t)| {
        let rate = t.code.rate();
        let (da, db) = t.code.min_distances();
        let dist = |d: Option<usize>| d.map_or(String::new(), |d| d.to_string());
        let (verdict, witness) = match &t.verdict {
            ZeroErrorVerdict::Ok => ("ok".to_string(), String::new()),
            ZeroErrorVerdict::Collision(c) => ("collision".to_string(), c.to_string()),
        };
        vec![
            i.to_string(),
            t.seed.to_string(),
            t.channel_seed.to_string(),
            t.rejections.to_string(),
            t.channel.erased_count().to_string(),
            fmt_f(t.code.d),
            t.code.threshold.to_string(),
            t.code.a.len().to_string(),
            t.code.b.len().to_string(),
            fmt_f(rate.r1),
            fmt_f(rate.r2),
            fmt_f(rate.sum),
            fmt_f(packing_rate(q, delta1, delta2, t.code.d)),
            fmt_f(diverse_family_rate(q, delta1, delta2, cfg.gamma, cfg.eps, cfg.slack)),
            dist(da),
            dist(db),
            t.code.is_packing_sound().to_string(),
            verdict,
            witness,
        ]
    });
    let mut text = header(
        "pipeline",
        &[
            ("q", cfg.q_bits.to_string()),
            ("n", cfg.n.to_string()),
            ("eps", fmt_f(cfg.eps)),
            ("gamma", fmt_f(cfg.gamma)),
            ("slack", fmt_f(cfg.slack)),
            ("trials", cfg.trials.to_string()),
            ("seed", cfg.seed.to_string()),
            ("sample_cap", cfg.sample_cap.to_string()),
            ("raw_d", cfg.raw_d.map_or("none".into(), fmt_f)),
            ("max_rejections", cfg.max_rejections.to_string()),
        ],
    );
    for w in &c.warnings {
        text.push_str(&format!("# warning: {w}\n"));
    }
    text.push_str(&format!(
        "# A: {}\n# B: {}\n# delta1 = {}\n# delta2 = {}\n",
        c.a.summary(),
        c.b.summary(),
        fmt_f(delta1),
        fmt_f(delta2)
    ));
    text.push_str(&csv_rows(
        &[
            "trial",
            "seed",
            "channel_seed",
            "rejections",
            "erased",
            "d",
            "threshold",
            "size_a",
            "size_b",
            "achieved_r1",
            "achieved_r2",
            "achieved_sum",
            "packing_rate",
            "diverse_family_rate",
            "min_dist_a",
            "min_dist_b",
            "packing_sound",
            "verdict",
            "witness",
        ],
        rows,
    ));
    let failed = trials
        .iter()
        .any(|t| t.verdict != ZeroErrorVerdict::Ok || !t.code.is_packing_sound());
    Ok((
        RunOutput {
            text,
            status: if failed {
                RunStatus::VerificationFailed
            } else {
                RunStatus::Ok
            },
        },
        trials,
    ))
}

/// Zero-error verdict of a packed code on a channel.
pub fn verify(channel: &Channel, code: &PackedCode) -> Result<RunOutput> {
    let verdict = verify_zero_error_against(code, channel)?;
    let (v, witness) = match &verdict {
        ZeroErrorVerdict::Ok => ("ok", String::new()),
        ZeroErrorVerdict::Collision(c) => ("collision", c.to_string()),
    };
    let mut text = header(
        "verify",
        &[
            ("channel", channel.name().unwrap_or("file").to_string()),
            ("code_seed", code.seed.to_string()),
        ],
    );
    text.push_str(&csv_rows(
        &["size_a", "size_b", "n", "verdict", "witness"],
        [vec![
            code.a.len().to_string(),
            code.b.len().to_string(),
            code.n.to_string(),
            v.to_string(),
            witness,
        ]],
    ));
    Ok(RunOutput {
        text,
        status: if verdict == ZeroErrorVerdict::Ok {
            RunStatus::Ok
        } else {
            RunStatus::VerificationFailed
        },
    })
}

/// Evaluates a named bound; violated hypotheses give the regime status.
pub fn bounds_eval(name: &str, params: &BTreeMap<String, f64>) -> Result<RunOutput> {
    let report: BoundReport = bounds::eval(name, params)?;
    let mut text = header(
        "bounds eval",
        &[
            ("name", name.to_string()),
            (
                "params",
                params
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(";"),
            ),
        ],
    );
    text.push_str(BoundReport::CSV_HEADER);
    text.push('\n');
    text.push_str(&report.to_csv_row());
    text.push('\n');
    Ok(RunOutput {
        text,
        status: if report.hypotheses_ok() {
            RunStatus::Ok
        } else {
            RunStatus::Regime
        },
    })
}

/// Parses `k=v,k=v` (or `;`-separated) bound parameters.
pub fn parse_params(text: &str) -> Result<BTreeMap<String, f64>> {
    text.split([',', ';'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::domain(format!("expected key=value, got {kv:?}")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::domain(format!("parameter {k} is not a number: {v:?}")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}
