//! Closed-form source/relay power splits under a total power budget.
//!
//! All four schemes are expressed through six per-watt coefficients: with
//! `p_s` watts at the source and `p_r = p_tot - p_s` at the relay,
//!
//! * HD-DF: `min(p_s B, p_s A + p_r C)`
//! * HD-AF: `p_s A + af(p_s B, p_r C)`
//! * FD-DF: `min(p_s B' / (p_r D + 1), p_r C' / (p_s A + 1))`
//! * FD-AF: `af(p_s B' / (p_r D + 1), p_r C' / (p_s A + 1))`
//!
//! where `af(x, y) = x y / (x + y + 1)` and primes mark the half-array
//! coefficients. Each allocator returns the split together with the branch of
//! the case analysis that produced it.

use std::fmt;

use crate::error::{invalid, Result};
use crate::propagation::LinkBudget;
use crate::relay_links::{af_combine, PowerSplit, RelayChannelRealization, RelayScheme};

/// Relative size below which a leading coefficient or denominator is
/// treated as zero.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;

/// Bracket width of the golden-section fallback, relative to `p_tot`.
pub const NUMERIC_TOLERANCE: f64 = 1e-10;

/// Per-watt SNR coefficients of one channel draw. FD fields are zero when
/// the draw carries no full-duplex channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkCoefficients {
    pub a_direct: f64,
    pub b_hd: f64,
    pub c_hd: f64,
    pub b_fd: f64,
    pub c_fd: f64,
    pub d_li: f64,
}

impl LinkCoefficients {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("a_direct", self.a_direct),
            ("b_hd", self.b_hd),
            ("c_hd", self.c_hd),
            ("b_fd", self.b_fd),
            ("c_fd", self.c_fd),
            ("d_li", self.d_li),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(name, format!("coefficient must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Multiply every coefficient by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            a_direct: self.a_direct * k,
            b_hd: self.b_hd * k,
            c_hd: self.c_hd * k,
            b_fd: self.b_fd * k,
            c_fd: self.c_fd * k,
            d_li: self.d_li * k,
        }
    }
}

pub fn link_coefficients(real: &RelayChannelRealization, budget: &LinkBudget) -> Result<LinkCoefficients> {
    let n0 = budget.n0;
    let (b_fd, c_fd, d_li) = match &real.fd {
        Some(fd) => (
            budget.pl_sr * fd.h_sr.norm_sqr() / n0,
            budget.pl_rd * fd.h_rd.norm_sqr() / n0,
            real.li_power()? / n0,
        ),
        None => (0.0, 0.0, 0.0),
    };
    Ok(LinkCoefficients {
        a_direct: budget.pl_sd * real.h_sd.norm_sqr() / n0,
        b_hd: budget.pl_sr * real.h_sr.norm_sqr() / n0,
        c_hd: budget.pl_rd * real.h_rd.norm_sqr() / n0,
        b_fd,
        c_fd,
        d_li,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AllocationBranch {
    /// HD-DF with a direct link stronger than the first hop: all power to
    /// the source.
    SisoFallback,
    /// HD-DF with both DF constraints equalized.
    Equalized,
    QuadraticRoot,
    /// Leading coefficient vanished; root of the remaining linear equation.
    LinearRoot,
    /// Golden-section search on the objective.
    NumericFallback,
}

impl AllocationBranch {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::SisoFallback => "siso_fallback",
            Self::Equalized => "equalized",
            Self::QuadraticRoot => "quadratic_root",
            Self::LinearRoot => "linear_root",
            Self::NumericFallback => "numeric_fallback",
        }
    }
}

impl fmt::Display for AllocationBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationResult {
    pub split: PowerSplit,
    pub branch: AllocationBranch,
    /// End-to-end SNR reached by `split` (min-form for DF schemes).
    pub objective_snr: f64,
}

/// End-to-end SNR of `scheme` at source power `p_s` (min-form for DF).
#[inline]
pub fn objective(scheme: RelayScheme, c: &LinkCoefficients, p_s: f64, p_tot: f64) -> f64 {
    let p_r = (p_tot - p_s).max(0.0);
    match scheme {
        RelayScheme::HdDf => (p_s * c.b_hd).min(p_s * c.a_direct + p_r * c.c_hd),
        RelayScheme::HdAf => p_s * c.a_direct + af_combine(p_s * c.b_hd, p_r * c.c_hd),
        RelayScheme::FdDf => {
            let (relay, dest) = fd_sinrs(c, p_s, p_r);
            relay.min(dest)
        }
        RelayScheme::FdAf => {
            let (relay, dest) = fd_sinrs(c, p_s, p_r);
            af_combine(relay, dest)
        }
    }
}

/// Relay SINR and destination SINR under full duplex.
#[inline]
pub fn fd_sinrs(c: &LinkCoefficients, p_s: f64, p_r: f64) -> (f64, f64) {
    (
        p_s * c.b_fd / (p_r * c.d_li + 1.0),
        p_r * c.c_fd / (p_s * c.a_direct + 1.0),
    )
}

pub fn allocate(scheme: RelayScheme, c: &LinkCoefficients, p_tot: f64) -> Result<AllocationResult> {
    match scheme {
        RelayScheme::HdDf => allocate_hd_df(c, p_tot),
        RelayScheme::HdAf => allocate_hd_af(c, p_tot),
        RelayScheme::FdDf => allocate_fd_df(c, p_tot),
        RelayScheme::FdAf => allocate_fd_af(c, p_tot),
    }
}

fn check_inputs(c: &LinkCoefficients, p_tot: f64) -> Result<()> {
    if !(p_tot.is_finite() && p_tot > 0.0) {
        return Err(invalid("p_tot", format!("must be finite and > 0, got {p_tot}")));
    }
    c.validate()
}

fn finish(
    scheme: RelayScheme,
    c: &LinkCoefficients,
    p_s: f64,
    p_tot: f64,
    branch: AllocationBranch,
) -> Result<AllocationResult> {
    let p_s = p_s.min(p_tot);
    Ok(AllocationResult {
        split: PowerSplit::from_total(p_s, p_tot)?,
        branch,
        objective_snr: objective(scheme, c, p_s, p_tot),
    })
}

/// Roots within `(0, p_tot]`, nudging values that overshoot `p_tot` by a
/// rounding error back onto the boundary.
fn feasible(root: f64, p_tot: f64) -> Option<f64> {
    if !root.is_finite() || root <= 0.0 {
        None
    } else if root <= p_tot {
        Some(root)
    } else if root <= p_tot * (1.0 + 1e-12) {
        Some(p_tot)
    } else {
        None
    }
}

/// Keep the feasible candidate with the largest objective.
fn best_candidate(scheme: RelayScheme, c: &LinkCoefficients, p_tot: f64, roots: &[f64]) -> Option<f64> {
    roots
        .iter()
        .filter_map(|&r| feasible(r, p_tot))
        .map(|p| (p, objective(scheme, c, p, p_tot)))
        .fold(None, |best: Option<(f64, f64)>, cand| match best {
            Some(b) if b.1 >= cand.1 => Some(b),
            _ => Some(cand),
        })
        .map(|(p, _)| p)
}

pub fn allocate_hd_df(c: &LinkCoefficients, p_tot: f64) -> Result<AllocationResult> {
    check_inputs(c, p_tot)?;
    let scheme = RelayScheme::HdDf;
    if c.a_direct > c.b_hd {
        return finish(scheme, c, p_tot, p_tot, AllocationBranch::SisoFallback);
    }
    // A <= B keeps the denominator at or above C.
    let denom = c.b_hd - c.a_direct + c.c_hd;
    if c.c_hd > 0.0 && denom > 0.0 {
        let p_s = p_tot * c.c_hd / denom;
        if let Some(p_s) = feasible(p_s, p_tot) {
            return finish(scheme, c, p_s, p_tot, AllocationBranch::Equalized);
        }
    }
    numeric_fallback(scheme, c, p_tot)
}

pub fn allocate_hd_af(c: &LinkCoefficients, p_tot: f64) -> Result<AllocationResult> {
    check_inputs(c, p_tot)?;
    let scheme = RelayScheme::HdAf;
    let (a, b, cc) = (c.a_direct, c.b_hd, c.c_hd);
    let diff = b - cc;
    let cross = (a + b) * cc - a * b;
    let singular =
        diff.abs() <= SINGULAR_TOLERANCE * b.max(cc) || cross.abs() <= SINGULAR_TOLERANCE * ((a + b) * cc).max(a * b);
    if !singular {
        let radicand = b * cc * cross * (1.0 + b * p_tot) * (1.0 + cc * p_tot);
        if radicand >= 0.0 {
            let lead = (a * b - (a + b) * cc) * (1.0 + cc * p_tot);
            let root = radicand.sqrt();
            let denom = diff * cross;
            let candidates = [(lead + root) / denom, (lead - root) / denom];
            if let Some(p_s) = best_candidate(scheme, c, p_tot, &candidates) {
                return finish(scheme, c, p_s, p_tot, AllocationBranch::QuadraticRoot);
            }
        }
    }
    numeric_fallback(scheme, c, p_tot)
}

/// Solve `a p^2 + b p + c = 0` where `b > 0` and `c <= 0`.
///
/// Returns `(roots, linear)`; `linear` is set when `|a|` fell below the
/// tolerance and the single root `-c / b` was used.
fn solve_quadratic(a: f64, b: f64, c: f64, scale: f64) -> (Vec<f64>, bool) {
    if a.abs() <= SINGULAR_TOLERANCE * scale {
        return (vec![-c / b], true);
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return (Vec::new(), false);
    }
    // Cancellation-free form: q = -(b + sgn(b) sqrt(disc)) / 2.
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut roots = vec![c / q];
    if q != 0.0 {
        roots.push(q / a);
    }
    (roots, false)
}

pub fn allocate_fd_df(c: &LinkCoefficients, p_tot: f64) -> Result<AllocationResult> {
    check_inputs(c, p_tot)?;
    let scheme = RelayScheme::FdDf;
    let (a_d, b, cc, d) = (c.a_direct, c.b_fd, c.c_fd, c.d_li);
    let qa = a_d * b - d * cc;
    let scale = (a_d * b).max(d * cc);
    let (roots, linear) = if qa >= 0.0 {
        let qb = b + cc + 2.0 * p_tot * d * cc;
        let qc = -p_tot * p_tot * d * cc - p_tot * cc;
        solve_quadratic(qa, qb, qc, scale)
    } else {
        // Same equation in p_r = p_tot - p_s; its discriminant has no
        // cancellation when ab < cd.
        let qb = -(2.0 * a_d * b * p_tot + b + cc);
        let qc = b * p_tot * (a_d * p_tot + 1.0);
        let (r, linear) = solve_quadratic(qa, qb, qc, scale);
        (r.into_iter().map(|p_r| p_tot - p_r).collect(), linear)
    };
    if let Some(p_s) = best_candidate(scheme, c, p_tot, &roots) {
        let branch = if linear {
            AllocationBranch::LinearRoot
        } else {
            AllocationBranch::QuadraticRoot
        };
        return finish(scheme, c, p_s, p_tot, branch);
    }
    numeric_fallback(scheme, c, p_tot)
}

pub fn allocate_fd_af(c: &LinkCoefficients, p_tot: f64) -> Result<AllocationResult> {
    check_inputs(c, p_tot)?;
    let scheme = RelayScheme::FdAf;
    let (a_d, b, cc, d) = (c.a_direct, c.b_fd, c.c_fd, c.d_li);
    let qa = (a_d * b - cc * d) * p_tot + a_d + b - cc - d;
    let qb = 2.0 * cc * d * p_tot * p_tot + 2.0 * (cc + d) * p_tot + 2.0;
    let qc = -cc * d * p_tot.powi(3) - (cc + d) * p_tot * p_tot - p_tot;
    let scale = (a_d * b + cc * d) * p_tot + a_d + b + cc + d;
    let (roots, linear) = solve_quadratic(qa, qb, qc, scale);
    if let Some(p_s) = best_candidate(scheme, c, p_tot, &roots) {
        if is_local_max(scheme, c, p_s, p_tot) {
            let branch = if linear {
                AllocationBranch::LinearRoot
            } else {
                AllocationBranch::QuadraticRoot
            };
            return finish(scheme, c, p_s, p_tot, branch);
        }
    }
    numeric_fallback(scheme, c, p_tot)
}

fn is_local_max(scheme: RelayScheme, c: &LinkCoefficients, p_s: f64, p_tot: f64) -> bool {
    let eps = 1e-6 * p_tot;
    let here = objective(scheme, c, p_s, p_tot);
    let slack = here * 1e-14;
    [p_s - eps, p_s + eps]
        .into_iter()
        .filter(|&p| p > 0.0 && p <= p_tot)
        .all(|p| objective(scheme, c, p, p_tot) <= here + slack)
}

/// Golden-section search over `(0, p_tot]`, compared against the
/// `p_s = p_tot` endpoint.
pub fn numeric_fallback(scheme: RelayScheme, c: &LinkCoefficients, p_tot: f64) -> Result<AllocationResult> {
    check_inputs(c, p_tot)?;
    let f = |p: f64| objective(scheme, c, p, p_tot);
    let p_s = golden_section_max(f, 0.0, p_tot, NUMERIC_TOLERANCE * p_tot);
    let p_s = if p_s > 0.0 && f(p_s) > f(p_tot) { p_s } else { p_tot };
    finish(scheme, c, p_s, p_tot, AllocationBranch::NumericFallback)
}

/// Maximizer of a unimodal `f` on `[lo, hi]` to within `tol`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

/// Best split on the uniform grid `p_s = p_tot * i / grid_points`,
/// `i = 1..=grid_points`. Ties keep the smallest `p_s`.
pub fn brute_force_split(
    scheme: RelayScheme,
    c: &LinkCoefficients,
    p_tot: f64,
    grid_points: usize,
) -> Result<PowerSplit> {
    check_inputs(c, p_tot)?;
    if grid_points < 2 {
        return Err(invalid("grid_points", format!("need at least 2, got {grid_points}")));
    }
    let p_s = match scheme {
        RelayScheme::HdDf => grid_argmax(|p| objective(RelayScheme::HdDf, c, p, p_tot), p_tot, grid_points),
        RelayScheme::HdAf => grid_argmax(|p| objective(RelayScheme::HdAf, c, p, p_tot), p_tot, grid_points),
        RelayScheme::FdDf => grid_argmax(|p| objective(RelayScheme::FdDf, c, p, p_tot), p_tot, grid_points),
        RelayScheme::FdAf => grid_argmax(|p| objective(RelayScheme::FdAf, c, p, p_tot), p_tot, grid_points),
    };
    PowerSplit::from_total(p_s, p_tot)
}

fn grid_argmax(f: impl Fn(f64) -> f64, p_tot: f64, n: usize) -> f64 {
    let step = p_tot / n as f64;
    let mut best_p = step;
    let mut best = f64::NEG_INFINITY;
    for i in 1..=n {
        let p = if i == n { p_tot } else { step * i as f64 };
        let v = f(p);
        if v > best {
            best = v;
            best_p = p;
        }
    }
    best_p
}
