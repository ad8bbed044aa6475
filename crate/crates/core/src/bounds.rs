//! Closed-form rate bounds. All logarithms are base 2.
//!
//! Each bound is a formula first: it is evaluated for any input, and the
//! resulting [`BoundReport`] lists the hypotheses of the underlying result
//! that the inputs violate.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub name: &'static str,
    pub params: Vec<(&'static str, f64)>,
    pub value: f64,
    pub violations: Vec<String>,
}

impl BoundReport {
    fn new(name: &'static str, params: Vec<(&'static str, f64)>, value: f64) -> Self {
        BoundReport {
            name,
            params,
            value,
            violations: Vec::new(),
        }
    }

    fn require(mut self, ok: bool, what: impl Into<String>) -> Self {
        if !ok {
            self.violations.push(what.into());
        }
        self
    }

    pub fn hypotheses_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub const CSV_HEADER: &'static str = "name,params,value,hypotheses_ok,violations";

    /// One CSV row: `name,k=v;k=v,value,hypotheses_ok,violation|violation`.
    pub fn to_csv_row(&self) -> String {
        let params = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        let mut row = String::new();
        let _ = write!(
            row,
            "{},{},{},{},{}",
            self.name,
            params,
            self.value,
            self.hypotheses_ok(),
            self.violations.join("|").replace(',', ";")
        );
        row
    }
}

/// `H(p) = −p log p − (1−p) log(1−p)` with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Time-sharing slack `−log(1−ε)/n`; `+∞` at ε = 1.
pub fn time_share_delta(eps: f64, n: usize) -> f64 {
    if eps >= 1.0 {
        return f64::INFINITY;
    }
    -(1.0 - eps).log2() / n as f64
}

/// Upper bound `2q(1 − 1/n)(1 + γ)` on the zero-error sum rate at
/// blocklength n of a random erasure/identity channel. Hypotheses:
/// `n ≥ 2`, `γ > 0`, `q ≥ max{log n, (4/γ) log(3/ε)}` (the last only when ε
/// is supplied).
pub fn sum_rate_upper_bound(q: f64, n: usize, gamma: f64, eps: Option<f64>) -> BoundReport {
    let value = 2.0 * q * (1.0 - 1.0 / n as f64) * (1.0 + gamma);
    let mut params = vec![("q", q), ("n", n as f64), ("gamma", gamma)];
    if let Some(e) = eps {
        params.push(("eps", e));
    }
    let mut report = BoundReport::new("upper_bound", params, value)
        .require(n >= 2, "n >= 2")
        .require(gamma > 0.0, "gamma > 0")
        .require(q >= (n as f64).log2(), "q >= log n");
    if let Some(e) = eps {
        report = report
            .require((0.0..=1.0).contains(&e), "eps in [0,1]")
            .require(q >= 4.0 / gamma * (3.0 / e).log2(), "q >= (4/gamma) log(3/eps)");
    }
    report
}

/// Lower bound `2q(1 − ((δ₁+δ₂)/2 + 2(1+γ)ε + δ)) − 2` from γ-uniform
/// families of sizes `Q^{n(1−δᵢ)}`.
pub fn diverse_family_rate(q: f64, delta1: f64, delta2: f64, gamma: f64, eps: f64, delta: f64) -> f64 {
    2.0 * q * (1.0 - ((delta1 + delta2) / 2.0 + 2.0 * (1.0 + gamma) * eps + delta)) - 2.0
}

/// Lower bound `2q(1 − ((δ₁+δ₂)/2 + d)) − 2` from (d, 2ε)-diverse families.
pub fn packing_rate(q: f64, delta1: f64, delta2: f64, d: f64) -> f64 {
    2.0 * q * (1.0 - ((delta1 + delta2) / 2.0 + d)) - 2.0
}

/// The packing distance `d = 2(1+γ)ε + δ` under which the two lower bounds
/// coincide.
pub fn diverse_family_distance(gamma: f64, eps: f64, delta: f64) -> f64 {
    2.0 * (1.0 + gamma) * eps + delta
}

/// The uniform-code lower bound evaluated at families matching the explicit
/// construction's size, in its simplified form
/// `2q(1/2 + γ/(2Q²) − 2(1+γ)ε − δ) − 1` with `Q = 2^q`.
pub fn staircase_rate_check(q: f64, gamma: f64, eps: f64, delta: f64) -> BoundReport {
    let q_sq = (2.0 * q).exp2();
    let value = 2.0 * q * (0.5 + gamma / (2.0 * q_sq) - 2.0 * (1.0 + gamma) * eps - delta) - 1.0;
    BoundReport::new(
        "staircase_rate",
        vec![("q", q), ("gamma", gamma), ("eps", eps), ("delta", delta)],
        value,
    )
    .require(eps > 1.0 / (2.0 * q_sq), "eps > 1/(2Q^2)")
}

/// The uniform-code lower bound at families matching the upper size bound:
/// `2q(1/2 + γ/4 + H(γ/2)/2 − 2ε(1+γ) − δ) − 2`. It exceeds `q` when
/// ε is below `(γ + 2H(γ/2))/(8(1+γ))` and q is large; the report flags
/// inputs outside that regime (`δ` below the margin and
/// `q > 1/(margin − δ)`).
pub fn biclique_rate_check(q: f64, gamma: f64, eps: f64, delta: f64) -> BoundReport {
    let h = binary_entropy(gamma / 2.0);
    let value = 2.0 * q * (0.5 + gamma / 4.0 + h / 2.0 - 2.0 * eps * (1.0 + gamma) - delta) - 2.0;
    let margin = gamma / 4.0 + h / 2.0 - 2.0 * eps * (1.0 + gamma);
    BoundReport::new(
        "biclique_rate",
        vec![("q", q), ("gamma", gamma), ("eps", eps), ("delta", delta)],
        value,
    )
    .require(
        eps < biclique_rate_eps_threshold(gamma),
        "eps < (gamma+2H(gamma/2))/(8(1+gamma))",
    )
    .require(delta < margin, "delta below the eps margin")
    .require(q * (margin - delta) > 1.0 + 1e-9, "q > 1/(margin - delta)")
}

pub fn biclique_rate_eps_threshold(gamma: f64) -> f64 {
    (gamma + 2.0 * binary_entropy(gamma / 2.0)) / (8.0 * (1.0 + gamma))
}

/// Named evaluation for the CLI. Unknown names and missing parameters are
/// domain errors.
pub fn eval(name: &str, params: &BTreeMap<String, f64>) -> Result<BoundReport> {
    let get = |k: &str| -> Result<f64> {
        params
            .get(k)
            .copied()
            .ok_or_else(|| Error::domain(format!("bound {name:?} needs parameter {k}")))
    };
    let get_or = |k: &str, default: f64| params.get(k).copied().unwrap_or(default);
    let whole = |k: &str| -> Result<usize> {
        let v = get(k)?;
        if v < 1.0 || v.fract() != 0.0 {
            return Err(Error::domain(format!("parameter {k} must be a positive integer")));
        }
        Ok(v as usize)
    };
    Ok(match name {
        "time_share_delta" => {
            let (eps, n) = (get("eps")?, whole("n")?);
            BoundReport::new(
                "time_share_delta",
                vec![("eps", eps), ("n", n as f64)],
                time_share_delta(eps, n),
            )
            .require((0.0..1.0).contains(&eps), "0 <= eps < 1")
        }
        "upper_bound" => sum_rate_upper_bound(get("q")?, whole("n")?, get("gamma")?, params.get("eps").copied()),
        "diverse_rate" => {
            let p = [
                get("q")?,
                get_or("delta1", 0.0),
                get_or("delta2", 0.0),
                get("gamma")?,
                get("eps")?,
                get_or("delta", 0.0),
            ];
            BoundReport::new(
                "diverse_rate",
                vec![
                    ("q", p[0]),
                    ("delta1", p[1]),
                    ("delta2", p[2]),
                    ("gamma", p[3]),
                    ("eps", p[4]),
                    ("delta", p[5]),
                ],
                diverse_family_rate(p[0], p[1], p[2], p[3], p[4], p[5]),
            )
        }
        "packing" => {
            let p = [get("q")?, get_or("delta1", 0.0), get_or("delta2", 0.0), get("d")?];
            BoundReport::new(
                "packing",
                vec![("q", p[0]), ("delta1", p[1]), ("delta2", p[2]), ("d", p[3])],
                packing_rate(p[0], p[1], p[2], p[3]),
            )
            .require((0.0..=1.0).contains(&p[3]), "d in [0,1]")
        }
        "staircase_rate" => staircase_rate_check(get("q")?, get("gamma")?, get("eps")?, get_or("delta", 0.0)),
        "biclique_rate" => biclique_rate_check(get("q")?, get("gamma")?, get("eps")?, get_or("delta", 0.0)),
        "binary_entropy" => {
            let p = get("p")?;
            BoundReport::new("binary_entropy", vec![("p", p)], binary_entropy(p))
                .require((0.0..=1.0).contains(&p), "0 <= p <= 1")
        }
        "rate_bpis" => {
            let (r, n, q) = (get("r")?, whole("n")?, get("q")?);
            BoundReport::new(
                "rate_bpis",
                vec![("r", r), ("n", n as f64), ("q", q)],
                crate::bpis::rate_bpis_floor(r, n, q),
            )
            .require(r >= 0.0 && q >= 1.0, "r >= 0, q >= 1")
        }
        "random_bpis" => {
            let (q, eps) = (get("q")?, get("eps")?);
            BoundReport::new("random_bpis", vec![("q", q), ("eps", eps)], q + (3.0 / eps).log2())
                .require(eps > 0.0 && eps <= 1.0, "0 < eps <= 1")
        }
        "biclique_bound" => {
            let (n, q, gamma) = (whole("n")?, whole("q")?, get("gamma")?);
            let b = crate::uniform::uniform_biclique_upper_bound(n, q as u32, gamma);
            BoundReport::new(
                "biclique_bound_log2",
                vec![("n", n as f64), ("q", q as f64), ("gamma", gamma)],
                b.log2_smooth,
            )
            .require(gamma <= 2.0, "gamma <= 2")
        }
        other => return Err(Error::domain(format!("unknown bound {other:?}"))),
    })
}

/// Names accepted by [`eval`].
pub const BOUND_NAMES: &[&str] = &[
    "time_share_delta",
    "upper_bound",
    "diverse_rate",
    "packing",
    "staircase_rate",
    "biclique_rate",
    "binary_entropy",
    "rate_bpis",
    "random_bpis",
    "biclique_bound",
];
