//! CSV result table and the human-readable summary.

use std::fmt::Write as _;

use linklab_core::montecarlo::SweepPoint;
use linklab_core::TrialStatistics;

const BASE_COLUMNS: [&str; 14] = [
    "sweep_value",
    "scheme",
    "n_trials",
    "mean_rate_bps_hz",
    "std_rate",
    "p5",
    "p50",
    "p95",
    "outage_prob",
    "mean_ps_fraction",
    "gamma_relay",
    "gamma_d1",
    "gamma_d2",
    "gamma_e2e",
];

const ORACLE_COLUMNS: [&str; 3] = ["rate_closed", "rate_oracle", "rate_gap"];

/// Render like C's `%.9g`: nine significant digits, trailing zeros
/// trimmed, scientific notation outside `[1e-4, 1e9)`.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 9;
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

/// One CSV row per (sweep value, scheme). Without a sweep the single point
/// has an empty `sweep_value`.
pub struct ResultTable<'a> {
    pub points: &'a [(Option<f64>, Vec<TrialStatistics>)],
    pub with_oracle: bool,
}

impl ResultTable<'_> {
    pub fn header(&self) -> Vec<&'static str> {
        let mut cols = BASE_COLUMNS.to_vec();
        if self.with_oracle {
            cols.extend(ORACLE_COLUMNS);
        }
        cols
    }

    pub fn to_csv(&self) -> String {
        let mut rows: Vec<(Option<f64>, &TrialStatistics)> = self
            .points
            .iter()
            .flat_map(|(v, stats)| stats.iter().map(move |s| (*v, s)))
            .collect();
        rows.sort_by(|a, b| {
            let key = |v: Option<f64>| v.unwrap_or(f64::NEG_INFINITY);
            key(a.0)
                .total_cmp(&key(b.0))
                .then_with(|| a.1.scheme.as_str().cmp(b.1.scheme.as_str()))
        });

        let mut out = self.header().join(",");
        out.push('\n');
        for (value, s) in rows {
            let mut fields = vec![
                value.map(fmt_sig).unwrap_or_default(),
                s.scheme.as_str().to_owned(),
                s.n_trials.to_string(),
                fmt_sig(s.mean_rate),
                fmt_sig(s.std_rate),
                fmt_sig(s.p5),
                fmt_sig(s.p50),
                fmt_sig(s.p95),
                fmt_sig(s.outage_prob),
                fmt_sig(s.mean_ps_fraction),
                opt(s.gamma.relay),
                opt(s.gamma.d1),
                opt(s.gamma.d2),
                opt(s.gamma.e2e),
            ];
            if self.with_oracle {
                let o = s.oracle.as_ref();
                fields.push(opt(o.map(|o| o.mean_rate_closed)));
                fields.push(opt(o.map(|o| o.mean_rate_oracle)));
                fields.push(opt(o.map(|o| o.max_gap)));
            }
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn points_from_sweep(points: Vec<SweepPoint>) -> Vec<(Option<f64>, Vec<TrialStatistics>)> {
    points
        .into_iter()
        .map(|p| (Some(p.value), p.stats.into_values().collect()))
        .collect()
}

/// Summary text. Everything except the resolved configuration is a `#`
/// comment, so the summary itself is a valid scenario file.
pub fn summary(config_toml: &str, notes: &[String], table: &ResultTable<'_>) -> String {
    let mut out = String::new();
    out.push_str("# linklab run summary\n#\n");
    for note in notes {
        let _ = writeln!(out, "# {note}");
    }
    out.push_str("#\n# Resolved configuration (all defaults explicit; rerun with this file):\n\n");
    out.push_str(config_toml);
    out.push_str("\n# Results (mean rate in bits/s/Hz):\n");
    for (value, stats) in table.points {
        if let Some(v) = value {
            let _ = writeln!(out, "#   sweep value {}", fmt_sig(*v));
        }
        for s in stats {
            let _ = write!(
                out,
                "#     {:<14} mean {:>12}  std {:>12}  p5 {:>12}  p95 {:>12}  outage {:>9}",
                s.scheme.as_str(),
                fmt_sig(s.mean_rate),
                fmt_sig(s.std_rate),
                fmt_sig(s.p5),
                fmt_sig(s.p95),
                fmt_sig(s.outage_prob),
            );
            if let Some(o) = &s.oracle {
                let _ = write!(out, "  oracle gap {}", fmt_sig(o.max_gap));
            }
            if s.af_violations > 0 {
                let _ = write!(out, "  AF BOTTLENECK VIOLATIONS {}", s.af_violations);
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.5), "0.5");
        assert_eq!(fmt_sig(2.321928094887362), "2.32192809");
        assert_eq!(fmt_sig(-1.0 / 3.0), "-0.333333333");
        assert_eq!(fmt_sig(123456789.4), "123456789");
        assert_eq!(fmt_sig(1234567894.0), "1.23456789e+09");
        assert_eq!(fmt_sig(0.0001), "0.0001");
        assert_eq!(fmt_sig(0.00001234), "1.234e-05");
        assert_eq!(fmt_sig(1e-300), "1e-300");
        assert_eq!(fmt_sig(0.99999999999), "1");
        assert_eq!(fmt_sig(f64::NAN), "nan");
    }
}
