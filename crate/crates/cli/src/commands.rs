//! Command implementations. Every command yields an [`Envelope`]: the JSON
//! result tree, the CSV projection, and any discrepancy warnings the
//! computation carries.

use std::path::Path;

use hlc_core::asymptotics::{self, SequenceKind};
use hlc_core::census::{self, CountMode};
use hlc_core::hfun;
use hlc_core::patterns::Pattern;
use hlc_core::singular::{Method, SingularEngine};
use hlc_core::symmetric;
use hlc_core::{Error, Result};

use crate::output::{fmt_float, Envelope, Table, Value};
use crate::parallel::run_chunks;

const GROWTH_CONSTANT_WARNING: &str = "measured L(q)/ln q settles on e^gamma/(2*C2) = 1.348966; \
     the candidate 2*C2 = 1.320324 misses the measurement by about 2 percent";
const CLOSED_FORM_WARNING: &str = "pair constants use the closed form 2*C2 * prod_{p|d, p>2} (p-1)/(p-2); \
     the complementary product over primes not dividing d diverges";
const SMALL_FACTOR_WARNING: &str = "P_small < 1 is checked instance by instance; individual factors B_p \
     can exceed 1, so the uniform bound prod_{3<=p<p0}(1-1/p) is reported for comparison only";

fn parse_u64_list(text: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    let mut pos = 0usize;
    for piece in text.split(',') {
        let trimmed = piece.trim();
        let token_pos = pos + (piece.len() - piece.trim_start().len());
        let value: u64 = trimmed.parse().map_err(|_| Error::Parse {
            position: token_pos,
            message: format!("invalid integer '{trimmed}'"),
        })?;
        out.push(value);
        pos += piece.len() + 1;
    }
    Ok(out)
}

fn method_name(method: Method) -> &'static str {
    match method {
        Method::GenericProduct => "generic_product",
        Method::K2ClosedForm => "k2_closed_form",
    }
}

fn kv_table(pairs: &[(&str, String)]) -> Table {
    let mut table = Table::new(&["key", "value"]);
    for (k, v) in pairs {
        table.push(vec![k.to_string(), v.clone()]);
    }
    table
}

// ---------------------------------------------------------------------------
// constant
// ---------------------------------------------------------------------------

pub fn constant(pattern_text: &str, truncation: Option<u64>) -> Result<Envelope> {
    let pattern = Pattern::parse(pattern_text)?;
    let engine = match truncation {
        Some(t) => SingularEngine::new(t)?,
        None => SingularEngine::for_pattern(&pattern)?,
    };
    let value = engine.singular_series(&pattern)?;

    let mut parameters = Value::object();
    parameters.set("pattern", Value::Str(pattern.to_string()));
    parameters.set("truncation_prime", Value::UInt(value.truncation_prime));

    let mut results = Value::object();
    results.set("value", Value::Float(value.value));
    results.set("tail_bound", Value::Float(value.tail_bound));
    results.set("method", Value::Str(method_name(value.method).into()));
    results.set("admissible", Value::Bool(value.admissible));
    results.set("length", Value::UInt(pattern.len() as u64));
    results.set("diameter", Value::UInt(pattern.diameter()));

    let table = kv_table(&[
        ("pattern", pattern.to_string()),
        ("value", fmt_float(value.value)),
        ("tail_bound", fmt_float(value.tail_bound)),
        ("truncation_prime", value.truncation_prime.to_string()),
        ("method", method_name(value.method).into()),
        ("length", pattern.len().to_string()),
        ("diameter", pattern.diameter().to_string()),
    ]);
    Ok(Envelope {
        command: "constant",
        parameters,
        results,
        warnings: Vec::new(),
        table,
    })
}

// ---------------------------------------------------------------------------
// h-stats
// ---------------------------------------------------------------------------

pub fn h_stats(
    n_max: u64,
    moments_text: &str,
    distribution: Option<&Path>,
    threads: usize,
) -> Result<Envelope> {
    if n_max > hfun::SNAPSHOT_LIMIT {
        // flag-level validation: the scan ceiling is part of the interface
        return Err(Error::Parse {
            position: 0,
            message: format!("--n-max exceeds the ceiling {}", hfun::SNAPSHOT_LIMIT),
        });
    }
    let orders = parse_u64_list(moments_text)?;
    for &k in &orders {
        if k == 0 || k > hfun::MOMENT_MAX_ORDER as u64 {
            return Err(Error::Parse {
                position: 0,
                message: format!("moment orders must lie in 1..={}", hfun::MOMENT_MAX_ORDER),
            });
        }
    }
    let chunks = hfun::scan_chunks(n_max);

    let mut moment_rows = Vec::new();
    let mut kv = Vec::new();
    // moment averages are only meaningful with some mass behind them; tiny
    // scans still report extremes and the distribution
    if n_max >= 1_000 {
        for &k in &orders {
            let k = k as u32;
            let sums = run_chunks(&chunks, threads, |&(lo, hi)| {
                hfun::empirical_moment_chunk(k, lo, hi)
            });
            let report = hfun::assemble_moment(k, n_max, &sums)?;
            let mut row = Value::object();
            row.set("order", Value::UInt(k as u64));
            row.set("theoretical", Value::Float(report.theoretical));
            row.set("empirical", Value::Float(report.empirical));
            row.set("gap", Value::Float(report.gap));
            moment_rows.push(row);
            kv.push((format!("moment_{k}_theoretical"), fmt_float(report.theoretical)));
            kv.push((format!("moment_{k}_empirical"), fmt_float(report.empirical)));
            kv.push((format!("moment_{k}_gap"), fmt_float(report.gap)));
        }
    }

    let maps = run_chunks(&chunks, threads, |&(lo, hi)| hfun::distribution_chunk(lo, hi));
    let mut merged = std::collections::BTreeMap::new();
    for map in maps {
        hfun::merge_distribution(&mut merged, map);
    }
    let snapshot = hfun::assemble_distribution(n_max, merged);

    let chunk_maxes = run_chunks(&chunks, threads, |&(lo, hi)| hfun::max_scan_chunk(lo, hi));
    let max = hfun::assemble_max(n_max, &chunk_maxes);

    let median = snapshot.median();
    let mean = snapshot.mean();
    let wintner = hfun::wintner_mean();
    let var_h = hfun::variance_h();
    let mean_f = hfun::mean_f();
    let var_f = hfun::variance_f();

    let mut results = Value::object();
    results.set("n_max", Value::UInt(n_max));
    results.set("moments", Value::List(moment_rows));
    results.set("wintner_mean", Value::Float(wintner));
    results.set("variance_h", Value::Float(var_h));
    results.set("mean_f", Value::Float(mean_f));
    results.set("variance_f", Value::Float(var_f));
    let mut max_value = Value::object();
    max_value.set("argmax", Value::UInt(max.argmax));
    max_value.set("numerator", Value::UInt(max.value.numerator() as u64));
    max_value.set("denominator", Value::UInt(max.value.denominator() as u64));
    max_value.set("value", Value::Float(max.value_f64));
    max_value.set("ratio_to_loglog", Value::Float(max.ratio_to_loglog));
    results.set("max", max_value);
    results.set("median", Value::Float(median.to_f64()));
    results.set("median_numerator", Value::UInt(median.numerator() as u64));
    results.set("median_denominator", Value::UInt(median.denominator() as u64));
    results.set("mean_empirical", Value::Float(mean));
    results.set("skewed_right", Value::Bool(median.to_f64() < mean));
    results.set("distribution_support", Value::UInt(snapshot.entries.len() as u64));

    kv.push(("wintner_mean".into(), fmt_float(wintner)));
    kv.push(("variance_h".into(), fmt_float(var_h)));
    kv.push(("mean_f".into(), fmt_float(mean_f)));
    kv.push(("variance_f".into(), fmt_float(var_f)));
    kv.push(("max_argmax".into(), max.argmax.to_string()));
    kv.push(("max_value".into(), fmt_float(max.value_f64)));
    kv.push(("median".into(), fmt_float(median.to_f64())));
    kv.push(("mean_empirical".into(), fmt_float(mean)));
    kv.push(("skewed_right".into(), (median.to_f64() < mean).to_string()));

    if let Some(path) = distribution {
        let mut csv = String::from("numerator,denominator,frequency\n");
        for (value, freq) in &snapshot.entries {
            csv.push_str(&format!(
                "{},{},{}\n",
                value.numerator(),
                value.denominator(),
                freq
            ));
        }
        std::fs::write(path, csv).map_err(|e| Error::Parse {
            position: 0,
            message: format!("cannot write {}: {e}", path.display()),
        })?;
        results.set(
            "distribution_file",
            Value::Str(path.display().to_string()),
        );
    }

    let mut parameters = Value::object();
    parameters.set("n_max", Value::UInt(n_max));
    parameters.set("moments", Value::Str(moments_text.to_string()));

    let pairs: Vec<(&str, String)> = kv.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    Ok(Envelope {
        command: "h-stats",
        parameters,
        results,
        warnings: Vec::new(),
        table: kv_table(&pairs),
    })
}

// ---------------------------------------------------------------------------
// census
// ---------------------------------------------------------------------------

pub fn census_cmd(
    pattern_text: &str,
    x: u64,
    checkpoints_text: Option<&str>,
    mode_text: &str,
    threads: usize,
) -> Result<Envelope> {
    let pattern = Pattern::parse(pattern_text)?;
    let mode = CountMode::parse(mode_text)?;
    let checkpoints = match checkpoints_text {
        Some(text) => parse_u64_list(text)?,
        None => Vec::new(),
    };
    let engine = SingularEngine::for_pattern(&pattern)?;
    let plan = census::census_plan(&pattern, x, &checkpoints, mode)?;
    let counts = run_chunks(&plan.chunks, threads, |&(lo, hi)| {
        census::count_chunk(&plan.pattern, lo, hi, &plan.bounds)
    });
    let result = census::assemble_census(&engine, &plan, &counts)?;

    let mut table = Table::new(&["x", "observed", "cramer", "parity", "hl_ratio", "hl_integral"]);
    let mut rows = Vec::new();
    for c in &result.checkpoints {
        table.push(vec![
            c.x.to_string(),
            c.observed.to_string(),
            fmt_float(c.cramer),
            fmt_float(c.parity),
            fmt_float(c.hl_ratio),
            fmt_float(c.hl_integral),
        ]);
        let mut row = Value::object();
        row.set("x", Value::UInt(c.x));
        row.set("observed", Value::UInt(c.observed));
        row.set("cramer", Value::Float(c.cramer));
        row.set("parity", Value::Float(c.parity));
        row.set("hl_ratio", Value::Float(c.hl_ratio));
        row.set("hl_integral", Value::Float(c.hl_integral));
        row.set("ratio_hl_integral", Value::Float(c.observed as f64 / c.hl_integral));
        rows.push(row);
    }

    let mut results = Value::object();
    results.set("checkpoints", Value::List(rows));
    results.set("singular_series", Value::Float(result.singular.value));
    results.set("singular_tail_bound", Value::Float(result.singular.tail_bound));
    results.set("count_mode", Value::Str(result.mode.name().into()));

    let mut parameters = Value::object();
    parameters.set("pattern", Value::Str(pattern.to_string()));
    parameters.set("x", Value::UInt(x));
    parameters.set("count_mode", Value::Str(mode.name().into()));
    if let Some(text) = checkpoints_text {
        parameters.set("checkpoints", Value::Str(text.to_string()));
    }

    Ok(Envelope {
        command: "census",
        parameters,
        results,
        warnings: Vec::new(),
        table,
    })
}

// ---------------------------------------------------------------------------
// asymptotics
// ---------------------------------------------------------------------------

pub fn asymptotics_cmd(
    mode: &str,
    q_points_text: Option<&str>,
    sequence_text: Option<&str>,
    n_max: Option<u64>,
) -> Result<Envelope> {
    match mode {
        "assertion1" => {
            let text = q_points_text.ok_or_else(|| Error::Parse {
                position: 0,
                message: "--q-points is required for --mode assertion1".into(),
            })?;
            let qs = parse_u64_list(text)?;
            let report = asymptotics::growth_report(&qs)?;

            let mut table = Table::new(&["q", "product", "ratio_to_ln"]);
            let mut rows = Vec::new();
            for p in &report.points {
                table.push(vec![
                    p.q.to_string(),
                    fmt_float(p.product),
                    fmt_float(p.ratio_to_ln),
                ]);
                let mut row = Value::object();
                row.set("q", Value::UInt(p.q));
                row.set("product", Value::Float(p.product));
                row.set("ratio_to_ln", Value::Float(p.ratio_to_ln));
                rows.push(row);
            }
            let mut results = Value::object();
            results.set("points", Value::List(rows));
            results.set("stability", Value::Float(report.stability));
            results.set("mertens_candidate", Value::Float(report.mertens_candidate));
            results.set(
                "pair_constant_candidate",
                Value::Float(report.pair_constant_candidate),
            );
            results.set(
                "deviation_from_mertens",
                Value::Float(report.deviation_from_mertens),
            );
            results.set(
                "deviation_from_pair_constant",
                Value::Float(report.deviation_from_pair_constant),
            );
            let mut parameters = Value::object();
            parameters.set("mode", Value::Str("assertion1".into()));
            parameters.set("q_points", Value::Str(text.to_string()));
            Ok(Envelope {
                command: "asymptotics",
                parameters,
                results,
                warnings: vec![GROWTH_CONSTANT_WARNING.to_string()],
                table,
            })
        }
        "sequence" => {
            let kind = SequenceKind::parse(sequence_text.ok_or_else(|| Error::Parse {
                position: 0,
                message: "--sequence is required for --mode sequence".into(),
            })?)?;
            let n_max = n_max.ok_or_else(|| Error::Parse {
                position: 0,
                message: "--n-max is required for --mode sequence".into(),
            })?;
            let scan = asymptotics::sequence_scan(kind, n_max)?;

            let mut table = Table::new(&["n", "d_description", "c_value"]);
            let mut rows = Vec::new();
            for p in &scan.points {
                table.push(vec![
                    p.index.to_string(),
                    p.d_description.clone(),
                    fmt_float(p.constant),
                ]);
                let mut row = Value::object();
                row.set("n", Value::UInt(p.index));
                row.set("d_description", Value::Str(p.d_description.clone()));
                match p.d {
                    Some(d) => row.set("d", Value::UInt(d)),
                    None => row.set("d", Value::Null),
                };
                row.set("c_value", Value::Float(p.constant));
                rows.push(row);
            }
            let mut results = Value::object();
            results.set("points", Value::List(rows));
            results.set("truncated", Value::Bool(scan.truncated));
            match scan.slope_vs_log {
                Some(s) => {
                    results.set("slope_vs_log", Value::Float(s));
                    // the two candidate growth coefficients the slope is
                    // read against: (2*C2)^2 and e^gamma
                    results.set(
                        "slope_candidate_pair_constant_squared",
                        Value::Float(hlc_core::constants::TWO_C2 * hlc_core::constants::TWO_C2),
                    );
                    results.set(
                        "slope_candidate_exp_gamma",
                        Value::Float(hlc_core::math::exp(hlc_core::constants::EULER_GAMMA)),
                    );
                }
                None => {
                    results.set("slope_vs_log", Value::Null);
                }
            };
            if let Some((spread, mean, rel)) = scan.trailing_decile_spread() {
                let mut t = Value::object();
                t.set("spread", Value::Float(spread));
                t.set("mean", Value::Float(mean));
                t.set("relative", Value::Float(rel));
                results.set("trailing_decile", t);
            }
            let mut parameters = Value::object();
            parameters.set("mode", Value::Str("sequence".into()));
            parameters.set("sequence", Value::Str(kind.name().into()));
            parameters.set("n_max", Value::UInt(n_max));
            Ok(Envelope {
                command: "asymptotics",
                parameters,
                results,
                warnings: vec![CLOSED_FORM_WARNING.to_string()],
                table,
            })
        }
        other => Err(Error::Parse {
            position: 0,
            message: format!("unknown mode '{other}' (expected assertion1 or sequence)"),
        }),
    }
}

// ---------------------------------------------------------------------------
// symmetric-table
// ---------------------------------------------------------------------------

pub fn symmetric_table(pattern_text: &str, removal_text: Option<&str>) -> Result<Envelope> {
    let pattern = Pattern::parse(pattern_text)?;
    let removals = match removal_text {
        Some(text) => parse_u64_list(text)?,
        None => Vec::new(),
    };
    let engine = SingularEngine::for_pattern(&pattern)?;
    let chain = symmetric::reduction_chain(&engine, &pattern, &removals)?;

    let mut table = Table::new(&["k", "pattern", "c_h", "ratio_to_previous"]);
    let mut rows = Vec::new();
    for step in &chain.steps {
        table.push(vec![
            step.pattern.len().to_string(),
            step.pattern.to_string(),
            fmt_float(step.constant),
            match step.ratio_to_previous {
                Some(r) => fmt_float(r),
                None => "-".to_string(),
            },
        ]);
        let mut row = Value::object();
        row.set("k", Value::UInt(step.pattern.len() as u64));
        row.set("pattern", Value::Str(step.pattern.to_string()));
        row.set("c_h", Value::Float(step.constant));
        match step.ratio_to_previous {
            Some(r) => row.set("ratio_to_previous", Value::Float(r)),
            None => row.set("ratio_to_previous", Value::Null),
        };
        row.set("removed_center", Value::Bool(step.removed_center));
        rows.push(row);
    }

    let mut results = Value::object();
    results.set("steps", Value::List(rows));
    let mut parameters = Value::object();
    parameters.set("pattern", Value::Str(pattern.to_string()));
    if let Some(text) = removal_text {
        parameters.set("removal_order", Value::Str(text.to_string()));
    }
    Ok(Envelope {
        command: "symmetric-table",
        parameters,
        results,
        warnings: vec![SMALL_FACTOR_WARNING.to_string()],
        table,
    })
}
