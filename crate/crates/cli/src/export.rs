//! CSV tables. Reals are written with 17 significant digits so that every
//! value reads back to the same `f64`; headers are always present.

use std::fs;
use std::io::Write;
use std::path::Path;

use ipm_core::diagnostics::blowup_cumulative;
use ipm_core::lp::BesovIndex;
use ipm_core::moc::{CaseReport, MarginReport};
use ipm_core::solver::PicardReport;
use ipm_core::Trajectory;

use crate::error::{CliError, CliResult};

/// `{:.16e}`: 17 significant digits.
pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn row(cells: &[String]) -> String {
    let mut s = cells.join(",");
    s.push('\n');
    s
}

/// `t, linf_grad, energy, besov_<s>_<p>_<q>..., blowup_integral_cum`.
pub fn timeseries_csv(traj: &Trajectory, besov: &[BesovIndex]) -> String {
    let mut header = vec!["t".to_string(), "linf_grad".into(), "energy".into()];
    header.extend(besov.iter().map(|b| b.label()));
    header.push("blowup_integral_cum".into());
    let mut out = row(&header);
    if traj.records.is_empty() {
        return out;
    }
    let cum = blowup_cumulative(traj).expect("records present");
    for (r, c) in traj.records.iter().zip(cum) {
        let mut cells = vec![real(r.t), real(r.linf_grad), real(r.energy)];
        for b in besov {
            let v = r
                .besov
                .iter()
                .find(|(i, _)| i == b)
                .map_or(f64::NAN, |(_, v)| *v);
            cells.push(real(v));
        }
        cells.push(real(c));
        out.push_str(&row(&cells));
    }
    out
}

/// `t, j, block_linf`.
pub fn blocks_csv(traj: &Trajectory) -> String {
    let mut out = row(&["t".into(), "j".into(), "block_linf".into()]);
    for r in &traj.records {
        for (j, v) in &r.lp_blocks {
            out.push_str(&row(&[real(r.t), j.to_string(), real(*v)]));
        }
    }
    out
}

/// `delta, gamma, nu, Cmult, xi, margin`, sorted by `(delta, gamma, xi)`.
pub fn margin_csv(reports: &[MarginReport]) -> String {
    let mut rows: Vec<[f64; 6]> = Vec::new();
    for r in reports {
        for (&x, &m) in r.xi.iter().zip(&r.margin) {
            rows.push([r.delta, r.gamma, r.nu, r.cmult, x, m]);
        }
    }
    rows.sort_by(|a, b| {
        a[0].total_cmp(&b[0])
            .then(a[1].total_cmp(&b[1]))
            .then(a[4].total_cmp(&b[4]))
    });
    let mut out = row(&["delta", "gamma", "nu", "Cmult", "xi", "margin"].map(String::from));
    for r in rows {
        out.push_str(&row(&r.map(real)));
    }
    out
}

/// `delta, gamma, max_margin, argmax, admissible` per scanned pair.
pub fn scan_csv(reports: &[MarginReport]) -> String {
    let mut out = row(&["delta", "gamma", "max_margin", "argmax", "admissible"].map(String::from));
    for r in reports {
        out.push_str(&row(&[
            real(r.delta),
            real(r.gamma),
            real(r.max_margin),
            real(r.argmax),
            r.admissible.to_string(),
        ]));
    }
    out
}

/// One row per inequality and sample.
pub fn bounds_csv(report: &CaseReport) -> String {
    let mut out = row(&[
        "name",
        "case",
        "xi",
        "lhs",
        "rhs",
        "slack",
        "holds",
        "degenerate",
    ]
    .map(String::from));
    for c in &report.checks {
        out.push_str(&row(&[
            c.name.to_string(),
            c.case.to_string(),
            real(c.xi),
            real(c.lhs),
            real(c.rhs),
            real(c.slack),
            c.holds.to_string(),
            c.degenerate.to_string(),
        ]));
    }
    out
}

/// `k, difference, ratio`; the ratio of row `k` is `d_k / d_{k-1}`.
pub fn picard_csv(report: &PicardReport) -> String {
    let mut out = row(&["k", "difference", "ratio"].map(String::from));
    for (k, d) in report.differences.iter().enumerate() {
        let ratio = if k == 0 {
            String::new()
        } else {
            real(report.ratios[k - 1])
        };
        out.push_str(&row(&[k.to_string(), real(*d), ratio]));
    }
    out
}

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Io(format!("{}: not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    let mut f = fs::File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
    f.write_all(contents).map_err(|e| CliError::io(&tmp, e))?;
    f.sync_all().map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_roundtrip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(real(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn empty_trajectory_is_header_only() {
        let g = ipm_core::Grid::periodic(2, 8).unwrap();
        let t = Trajectory::new(g);
        assert_eq!(
            timeseries_csv(&t, &[]),
            "t,linf_grad,energy,blowup_integral_cum\n"
        );
        assert_eq!(blocks_csv(&t), "t,j,block_linf\n");
        assert_eq!(margin_csv(&[]), "delta,gamma,nu,Cmult,xi,margin\n");
    }
}
