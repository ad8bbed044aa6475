//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::Rng;
use zerogap_core::bounds::sum_rate_upper_bound;
use zerogap_core::bpis::{build_conflict_graph, max_bpis, max_bpis_direct, rate_bpis_floor};
use zerogap_core::channel::{all_words, binary_erasure_channel, sample_erasure_identity};
use zerogap_core::coding::{exact_zero_error_sum_rate, is_zero_error, success_probability, time_share, Decoder};
use zerogap_core::experiment::{pipeline, random_bpis_sweep, PipelineConfig};
use zerogap_core::math::seeded_rng;
use zerogap_core::uniform::{
    binary_uniform_log2_bound, construct_binary_uniform, is_diverse_pair, is_gamma_uniform_sets,
    max_uniform_biclique_exact, type_of, uniform_biclique_upper_bound, Verdict,
};
use zerogap_core::{Channel, Code, CodebookPair, OutputWord, Word};

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> std::result::Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, format!("took {took:?}, limit {limit:?}"))
}

fn exhaustive_binary_campaign() -> Check {
    let start = Instant::now();
    let mut rows = 0;
    for mask in 0u8..16 {
        let ch = binary_erasure_channel(mask);
        for n in 1..=2 {
            let exact = exact_zero_error_sum_rate(&ch, n, 16).map_err(|e| e.to_string())?;
            let best = max_bpis_direct(&ch, n, 16).map_err(|e| e.to_string())?;
            let floor = rate_bpis_floor(exact.rate.sum, n, 1.0);
            if floor > 0.0 {
                ensure(
                    best.size as f64 >= floor,
                    format!("mask {mask} n={n}: BPIS {} below floor {floor}", best.size),
                )?;
            }
            if best.size > 0 {
                let words = all_words(2, n);
                let pair = CodebookPair::new(
                    best.a.iter().map(|&i| words[i].clone()).collect(),
                    best.b.iter().map(|&j| words[j].clone()).collect(),
                )
                .map_err(|e| e.to_string())?;
                ensure(
                    is_zero_error(&ch, &pair),
                    format!("mask {mask} n={n}: BPIS code collides"),
                )?;
                ensure(
                    exact.rate.sum + 1e-12 >= (best.size as f64).log2() / n as f64,
                    format!("mask {mask} n={n}: oracle below BPIS rate"),
                )?;
            }
            ensure(
                is_zero_error(&ch, &exact.witness),
                format!("mask {mask} n={n}: witness collides"),
            )?;
            rows += 1;
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!(
        "{rows} channel/blocklength cases consistent in {:?}",
        start.elapsed()
    ))
}

fn product_law() -> Check {
    let start = Instant::now();
    let mut channels: Vec<Channel> = (0u8..16).map(binary_erasure_channel).collect();
    for seed in 0..50 {
        channels.push(sample_erasure_identity(4, 0.3, seed).map_err(|e| e.to_string())?);
    }
    for (i, ch) in channels.iter().enumerate() {
        let g = build_conflict_graph(ch).map_err(|e| e.to_string())?;
        let s1 = max_bpis(&g, 64).map_err(|e| e.to_string())?.size;
        let s2 = max_bpis_direct(ch, 2, 16).map_err(|e| e.to_string())?.size;
        ensure(
            s2 == s1 * s1,
            format!("channel {i}: direct {s2} vs squared {}", s1 * s1),
        )?;
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("{} channels, exact equality at n=2", channels.len()))
}

fn random_bpis_monte_carlo() -> Check {
    let start = Instant::now();
    let (_, summary) = random_bpis_sweep(3, 0.25, 200, 1).map_err(|e| e.to_string())?;
    ensure(summary.rate() >= 0.75, format!("satisfaction rate {}", summary.rate()))?;
    within(start, Duration::from_secs(60))?;
    Ok(format!("{}/{} trials satisfied", summary.satisfied, summary.trials))
}

fn upper_bound_at_two() -> Check {
    let mut points = 0;
    for q in 1..=6 {
        for gamma in [0.05, 0.1, 0.25, 0.5, 1.0, 2.0] {
            let q = q as f64;
            let r = sum_rate_upper_bound(q, 2, gamma, None);
            ensure(
                r.value == q * (1.0 + gamma),
                format!("q={q} gamma={gamma}: {}", r.value),
            )?;
            points += 1;
        }
    }
    Ok(format!("{points} grid points exact"))
}

fn binary_uniform_construction() -> Check {
    let mut notes = Vec::new();
    for n in [8, 16, 32] {
        for gamma in [0.5, 1.0] {
            let c = construct_binary_uniform(n, gamma).map_err(|e| e.to_string())?;
            let verdict = is_gamma_uniform_sets(&c.a, &c.b, gamma, 100_000, n as u64);
            match (&verdict, n) {
                (Verdict::Proved, 8) => {}
                (Verdict::Audited { samples }, _) if n > 8 && *samples >= 100_000 => {}
                _ => return Err(format!("n={n} gamma={gamma}: {verdict:?}")),
            }
            let (lp, lb) = (c.log2_product(), binary_uniform_log2_bound(n, gamma));
            ensure(
                lp >= lb + 0.01 * lb.abs(),
                format!("n={n} gamma={gamma}: log2|A||B| = {lp}, bound {lb}"),
            )?;
            notes.push(format!("n={n},g={gamma}:{:.1}%", 100.0 * (lp - lb) / lb.abs()));
        }
    }
    Ok(format!("uniform and above bound ({})", notes.join(" ")))
}

fn biclique_bound_oracle() -> Check {
    let start = Instant::now();
    let mut sizes = Vec::new();
    for gamma in [0.0, 0.5, 1.0, 2.0] {
        let best = max_uniform_biclique_exact(2, 4, gamma, 16).map_err(|e| e.to_string())?;
        let bound = uniform_biclique_upper_bound(4, 1, gamma).log2_smooth;
        ensure(
            (best.size as f64).log2() <= bound + 1e-9,
            format!("gamma={gamma}: {} > 2^{bound}", best.size),
        )?;
        sizes.push(format!("g={gamma}:{}", best.size));
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("max |A||B| {}", sizes.join(" ")))
}

fn uniform_diverse_property() -> Check {
    let mut rng = seeded_rng(2024, 0);
    let mut failures = 0;
    for _ in 0..10_000 {
        let q = rng.gen_range(2..=4usize);
        let n = rng.gen_range(1..=24usize);
        let x = Word::new((0..n).map(|_| rng.gen_range(0..q as u16)).collect());
        let y = Word::new((0..n).map(|_| rng.gen_range(0..q as u16)).collect());
        let tight = type_of(&x, &y, q).map_err(|e| e.to_string())?.uniformity_gamma();
        let gamma = num_traits::ToPrimitive::to_f64(&tight).unwrap_or(f64::MAX) + rng.gen_range(0.0..0.5);
        // d·n integral, eps strictly below d/(1+γ).
        let d = rng.gen_range(1..=n) as f64 / n as f64;
        let eps = rng.gen_range(0.0..1.0) * d / (1.0 + gamma);
        if d <= (1.0 + gamma) * eps || !zerogap_core::uniform::is_gamma_uniform_pair(&x, &y, q, gamma) {
            return Err("instance generator produced an invalid instance".into());
        }
        if !is_diverse_pair(&x, &y, q, d, eps) {
            failures += 1;
        }
    }
    ensure(failures == 0, format!("{failures} diversity failures"))?;

    let mut rng = seeded_rng(2025, 0);
    for i in 0..100 {
        let q = rng.gen_range(2..=3usize);
        let n = rng.gen_range(1..=12usize);
        let x = Word::new((0..n).map(|_| rng.gen_range(0..q as u16)).collect());
        let y = Word::new((0..n).map(|_| rng.gen_range(0..q as u16)).collect());
        let d: f64 = rng.gen_range(0.05..=1.0);
        let eps: f64 = rng.gen_range(0.0..1.0);
        let k = zerogap_core::math::floor_scaled(d, n).min(n);
        let brute = k == 0
            || itertools::Itertools::combinations(0..n, k)
                .map(|idx| {
                    let mut pairs: Vec<(u16, u16)> = idx.iter().map(|&j| (x.symbols()[j], y.symbols()[j])).collect();
                    pairs.sort_unstable();
                    pairs.dedup();
                    pairs.len()
                })
                .min()
                .unwrap_or(0) as f64
                > eps * (q * q) as f64;
        ensure(
            brute == is_diverse_pair(&x, &y, q, d, eps),
            format!("instance {i} disagrees"),
        )?;
    }
    Ok("10000 implication instances, 0 failures; 100/100 greedy = brute force".into())
}

fn pipeline_cfg() -> PipelineConfig {
    PipelineConfig {
        q_bits: 2,
        n: 64,
        eps: 0.05,
        gamma: 1.0,
        slack: 0.01,
        trials: 20,
        seed: 0,
        sample_cap: 256,
        raw_d: None,
        max_rejections: 10_000,
    }
}

fn packing_pipeline() -> Check {
    let start = Instant::now();
    let (_, trials) = pipeline(&pipeline_cfg()).map_err(|e| e.to_string())?;
    ensure(trials.len() == 20, "expected 20 trials")?;
    let mut ok = 0;
    for t in &trials {
        ensure(
            t.channel.erased_count() as f64 <= 0.1 * 16.0,
            format!("seed {}: {} erasures", t.seed, t.channel.erased_count()),
        )?;
        ensure(t.code.threshold == 13, format!("threshold {}", t.code.threshold))?;
        ensure(t.code.is_packing_sound(), format!("seed {}: packing distance", t.seed))?;
        if t.verdict == zerogap_core::codegen::ZeroErrorVerdict::Ok {
            ok += 1;
        }
    }
    ensure(ok == 20, format!("{ok}/20 ok"))?;
    within(start, Duration::from_secs(300))?;
    let sizes: BigUint = trials
        .iter()
        .map(|t| BigUint::from(t.code.a.len() * t.code.b.len()))
        .sum();
    Ok(format!("20/20 ok, total |A'||B'| {sizes}"))
}

fn time_share_minmax() -> Check {
    let mm = Channel::builtin("minmax").map_err(|e| e.to_string())?;
    let enc = vec![Word::new(vec![0]), Word::new(vec![1])];
    let dec: Decoder = [(OutputWord(vec![Some(0)]), 0), (OutputWord(vec![Some(1)]), 1)]
        .into_iter()
        .collect();
    let code = Code::new(enc.clone(), enc, dec.clone(), dec).map_err(|e| e.to_string())?;
    let p = success_probability(&mm, &code).map_err(|e| e.to_string())?;
    let ts = time_share(&mm, &code).map_err(|e| e.to_string())?;
    ensure(is_zero_error(&mm, &ts.pair), "time-shared pair collides")?;
    ensure(ts.sum_rate() >= 1.0 + (0.5f64).log2(), "below 1 + log2(1/2)")?;
    ensure(ts.sum_rate() == 1.0, format!("time-shared sum rate {}", ts.sum_rate()))?;
    let exact = exact_zero_error_sum_rate(&mm, 1, 16).map_err(|e| e.to_string())?;
    ensure(exact.rate.sum == 1.0, format!("exact rate {}", exact.rate.sum))?;
    Ok(format!(
        "identity code error {}, time-shared sum rate {}, exact rate {}",
        1.0 - p,
        ts.sum_rate(),
        exact.rate.sum
    ))
}

fn determinism() -> Check {
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?;
    let sweep = || {
        random_bpis_sweep(3, 0.25, 200, 1)
            .map(|r| r.0.text)
            .map_err(|e| e.to_string())
    };
    let a = sweep()?;
    let b = single.install(sweep)?;
    ensure(a == b && a == sweep()?, "random_bpis sweep output differs between runs")?;
    let run = || pipeline(&pipeline_cfg()).map(|r| r.0.text).map_err(|e| e.to_string());
    let a = run()?;
    let b = single.install(run)?;
    ensure(a == b && a == run()?, "pipeline output differs between runs")?;
    Ok("random_bpis sweep and pipeline byte-identical across runs and thread counts".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("exhaustive binary campaign", exhaustive_binary_campaign),
        ("product law", product_law),
        ("random-channel BPIS bound", random_bpis_monte_carlo),
        ("upper bound at n=2", upper_bound_at_two),
        ("binary uniform construction", binary_uniform_construction),
        ("uniform biclique oracle", biclique_bound_oracle),
        ("uniform implies diverse", uniform_diverse_property),
        ("packing pipeline", packing_pipeline),
        ("time sharing on min/max", time_share_minmax),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
