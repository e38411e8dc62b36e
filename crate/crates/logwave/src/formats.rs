//! Stable on-disk formats: trajectory dumps, diagnostics CSV and
//! certificate files. All floating-point values are printed with 17
//! significant digits, which round-trips `f64` exactly, so identical runs
//! produce byte-identical files.
//!
//! # Trajectory dump (CSV)
//!
//! ```text
//! # logwave-dump v1
//! # n=<cells> r_max=<f> dr=<f> dt=<f> record_stride=<k> p=<p> c=<c> sigma=<±1> enabled=<bool> status=<completed|overflowed>
//! # columns: t, v[0..n], w[0..n]
//! <t>,<v_0>,…,<v_n>,<w_0>,…,<w_n>
//! ⋮
//! ```
//!
//! Each snapshot row carries `1 + 2(n+1)` comma-separated values: the time,
//! the reduced field `v = r·u` at nodes `0..=n`, then `w = ∂ₜv` at the same
//! nodes. Column order is stable across versions.
//!
//! # Diagnostics CSV
//!
//! One row per snapshot (`t, energy, sup_u, l2_grad, h1_grad, a_density,
//! morawetz_density`) followed by a footer block of `# key=value` scalar
//! aggregates (`A, B, D, E, flux, sobolev_ratio_max, strichartz_lhs,
//! strichartz_rhs, energy_drift, dt, record_stride`).
//!
//! # Certificate
//!
//! A human-readable text file (key-value header; one line per interval
//! with `n, t_n, t_{n+1}, threshold, measured_A, D_n, measured_D, B_n` and
//! the three clause verdicts) plus a machine-readable CSV twin with the
//! same per-interval table.

use std::io::{BufRead, Write};

use crate::certifier::{
    double_exp_bound, plan_subdivision, CertifierMargins, SubdivisionCertificate,
};
use crate::diagnostics::DiagnosticsReport;
use crate::error::Error;
use crate::field::{FieldState, RadialGrid};
use crate::nonlinearity::NonlinearitySpec;
use crate::solver::{RunStatus, Trajectory};
use crate::Result;

/// 17 significant digits: enough to reproduce any `f64` bit for bit.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Format(format!("bad {what} value {s:?}")))
}

pub fn write_trajectory_dump(traj: &Trajectory, out: &mut dyn Write) -> Result<()> {
    let grid = traj.grid;
    let spec = traj.spec;
    writeln!(out, "# logwave-dump v1")?;
    writeln!(
        out,
        "# n={} r_max={} dr={} dt={} record_stride={} p={} c={} sigma={} enabled={} status={}",
        grid.n(),
        format_f64(grid.r_max()),
        format_f64(grid.dr()),
        format_f64(traj.dt),
        traj.record_stride,
        spec.p,
        spec.c,
        spec.sigma,
        spec.enabled,
        match traj.status {
            RunStatus::Completed => "completed",
            RunStatus::Overflowed => "overflowed",
        }
    )?;
    writeln!(out, "# columns: t, v[0..n], w[0..n]")?;
    let mut line = String::new();
    for state in &traj.states {
        line.clear();
        line.push_str(&format_f64(state.t));
        for x in state.v.iter().chain(state.w.iter()) {
            line.push(',');
            line.push_str(&format_f64(*x));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_trajectory_dump(reader: &mut dyn BufRead) -> Result<Trajectory> {
    let mut lines = reader.lines();
    let magic = lines
        .next()
        .ok_or_else(|| Error::Format("empty dump file".into()))??;
    if magic.trim() != "# logwave-dump v1" {
        return Err(Error::Format(format!(
            "not a logwave trajectory dump (got {magic:?})"
        )));
    }
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("missing dump header".into()))??;
    let header = header
        .strip_prefix('#')
        .ok_or_else(|| Error::Format("malformed dump header".into()))?;
    let mut n = None;
    let mut r_max = None;
    let mut dt = None;
    let mut record_stride = None;
    let mut p = None;
    let mut c = None;
    let mut sigma = None;
    let mut enabled = None;
    let mut status = None;
    for pair in header.split_whitespace() {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("bad header entry {pair:?}")))?;
        match key {
            "n" => n = Some(value.parse::<usize>().map_err(|_| bad(key, value))?),
            "r_max" => r_max = Some(parse_f64(value, key)?),
            "dr" => {} // derived from r_max and n
            "dt" => dt = Some(parse_f64(value, key)?),
            "record_stride" => {
                record_stride = Some(value.parse::<usize>().map_err(|_| bad(key, value))?)
            }
            "p" => p = Some(value.parse::<u32>().map_err(|_| bad(key, value))?),
            "c" => c = Some(value.parse::<u32>().map_err(|_| bad(key, value))?),
            "sigma" => sigma = Some(value.parse::<i32>().map_err(|_| bad(key, value))?),
            "enabled" => enabled = Some(value.parse::<bool>().map_err(|_| bad(key, value))?),
            "status" => {
                status = Some(match value {
                    "completed" => RunStatus::Completed,
                    "overflowed" => RunStatus::Overflowed,
                    other => return Err(Error::Format(format!("unknown status {other:?}"))),
                })
            }
            other => return Err(Error::Format(format!("unknown header key {other:?}"))),
        }
    }
    let missing = |what: &str| Error::Format(format!("dump header missing {what}"));
    let n = n.ok_or_else(|| missing("n"))?;
    let grid = RadialGrid::new(r_max.ok_or_else(|| missing("r_max"))?, n)?;
    let dt = dt.ok_or_else(|| missing("dt"))?;
    let record_stride = record_stride.ok_or_else(|| missing("record_stride"))?;
    let spec = NonlinearitySpec {
        p: p.ok_or_else(|| missing("p"))?,
        c: c.ok_or_else(|| missing("c"))?,
        sigma: sigma.ok_or_else(|| missing("sigma"))?,
        enabled: enabled.ok_or_else(|| missing("enabled"))?,
    };
    spec.validate()?;
    let status = status.ok_or_else(|| missing("status"))?;

    let columns = 1 + 2 * (n + 1);
    let mut states = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut values = Vec::with_capacity(columns);
        for piece in line.split(',') {
            values.push(parse_f64(piece, "field")?);
        }
        if values.len() != columns {
            return Err(Error::Format(format!(
                "row {}: expected {columns} columns, got {} (truncated dump?)",
                lineno + 4,
                values.len()
            )));
        }
        states.push(FieldState {
            t: values[0],
            v: values[1..=n + 1].to_vec(),
            w: values[n + 2..].to_vec(),
            grid,
            spec,
            overflowed: false,
        });
    }
    if states.is_empty() {
        return Err(Error::Format("dump contains no snapshots".into()));
    }
    if !states.windows(2).all(|w| w[0].t < w[1].t) {
        return Err(Error::Format(
            "snapshot times are not strictly increasing".into(),
        ));
    }
    Ok(Trajectory {
        states,
        dt,
        record_stride,
        status,
        grid,
        spec,
    })
}

fn bad(key: &str, value: &str) -> Error {
    Error::Format(format!("bad {key} value {value:?}"))
}

pub fn write_diagnostics_csv(report: &DiagnosticsReport, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "t,energy,sup_u,l2_grad,h1_grad,a_density,morawetz_density")?;
    for s in &report.snapshots {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            format_f64(s.t),
            format_f64(s.energy),
            format_f64(s.sup_u),
            format_f64(s.l2_grad),
            format_f64(s.h1_grad),
            format_f64(s.a_density),
            format_f64(s.morawetz_density),
        )?;
    }
    writeln!(out, "# aggregates")?;
    for (key, value) in scalar_aggregates(report) {
        writeln!(out, "# {key}={}", format_f64(value))?;
    }
    writeln!(out, "# record_stride={}", report.record_stride)?;
    Ok(())
}

fn scalar_aggregates(report: &DiagnosticsReport) -> Vec<(&'static str, f64)> {
    vec![
        ("A", report.a_total),
        ("B", report.b),
        ("D", report.d),
        ("E", report.energy),
        ("flux", report.morawetz_flux),
        ("sobolev_ratio_max", report.sobolev_ratio_max),
        ("strichartz_lhs", report.strichartz_lhs),
        ("strichartz_rhs", report.strichartz_rhs),
        ("energy_drift", report.energy_drift),
        ("dt", report.dt),
    ]
}

/// Parse the `# key=value` footer of a diagnostics CSV.
pub fn read_diagnostics_footer(text: &str) -> Result<Vec<(String, f64)>> {
    let mut pairs = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            if let Some((key, value)) = rest.split_once('=') {
                pairs.push((key.trim().to_string(), parse_f64(value, key)?));
            }
        }
    }
    Ok(pairs)
}

fn clause_marks(cert: &SubdivisionCertificate, n: usize) -> (bool, bool, bool) {
    use crate::certifier::{Clause, Verdict};
    match cert.verdict {
        Verdict::Pass => (true, true, true),
        Verdict::Fail { clause, interval } => {
            let ok = |c: Clause| !(interval == n && clause == c);
            (
                ok(Clause::SmallnessA),
                ok(Clause::GrowthD),
                ok(Clause::StrichartzB),
            )
        }
    }
}

/// Human-readable certificate: key-value header plus one line per interval.
pub fn write_certificate_text(
    cert: &SubdivisionCertificate,
    margins: &CertifierMargins,
    report: &DiagnosticsReport,
    out: &mut dyn Write,
) -> Result<()> {
    let plan = plan_subdivision(report.a_total, report.d, &cert.constants);
    let bound = double_exp_bound(report.d, margins.kappa_a * report.a_total, &cert.constants);
    writeln!(out, "logwave certificate v1")?;
    writeln!(out, "eps0 = {}", format_f64(cert.constants.eps0))?;
    writeln!(out, "c0 = {}", format_f64(cert.constants.c0))?;
    writeln!(out, "kappa = {}", format_f64(cert.constants.kappa))?;
    writeln!(out, "kappa_b = {}", format_f64(margins.kappa_b))?;
    writeln!(out, "kappa_a = {}", format_f64(margins.kappa_a))?;
    writeln!(out, "D = {}", format_f64(report.d))?;
    writeln!(out, "A_total = {}", format_f64(report.a_total))?;
    writeln!(out, "B = {}", format_f64(report.b))?;
    writeln!(out, "E = {}", format_f64(report.energy))?;
    writeln!(out, "intervals = {}", cert.intervals())?;
    writeln!(out, "planned_intervals = {}", plan.intervals)?;
    writeln!(out, "interval_cap = {}", format_f64(plan.cap))?;
    writeln!(out, "double_exp_bound = {}", format_f64(bound))?;
    writeln!(out, "verdict = {}", cert.verdict)?;
    writeln!(out)?;
    writeln!(
        out,
        "{:>4} {:>24} {:>24} {:>24} {:>24} {:>24} {:>24} {:>24}  clauses",
        "n", "t_n", "t_n+1", "threshold", "measured_A", "D_n", "measured_D", "B_n"
    )?;
    for n in 0..cert.intervals() {
        let (i, ii, iii) = clause_marks(cert, n);
        let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
        writeln!(
            out,
            "{:>4} {:>24} {:>24} {:>24} {:>24} {:>24} {:>24} {:>24}  i:{} ii:{} iii:{}",
            n,
            format_f64(cert.breakpoints[n]),
            format_f64(cert.breakpoints[n + 1]),
            format_f64(cert.thresholds[n]),
            format_f64(cert.measured_a[n]),
            format_f64(cert.d_bounds[n]),
            format_f64(cert.measured_d[n]),
            format_f64(cert.b_values[n]),
            mark(i),
            mark(ii),
            mark(iii),
        )?;
    }
    Ok(())
}

/// Machine-readable twin of the certificate table.
pub fn write_certificate_csv(cert: &SubdivisionCertificate, out: &mut dyn Write) -> Result<()> {
    writeln!(
        out,
        "n,t_start,t_end,threshold,measured_a,d_bound,measured_d,b,clause_i,clause_ii,clause_iii"
    )?;
    for n in 0..cert.intervals() {
        let (i, ii, iii) = clause_marks(cert, n);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            n,
            format_f64(cert.breakpoints[n]),
            format_f64(cert.breakpoints[n + 1]),
            format_f64(cert.thresholds[n]),
            format_f64(cert.measured_a[n]),
            format_f64(cert.d_bounds[n]),
            format_f64(cert.measured_d[n]),
            format_f64(cert.b_values[n]),
            i,
            ii,
            iii,
        )?;
    }
    Ok(())
}
