//! Plain-text renderings of study results.

use std::fmt::Write as _;

use crate::simulation::{ConditionResult, Summary};

/// Two-decimal value without the leading zero: `.97`, `-.11`, `1.00`.
pub fn two_decimals(x: f64) -> String {
    if x.is_nan() {
        return "NA".into();
    }
    let mut s = format!("{x:.2}");
    if s == "-0.00" {
        s = "0.00".into();
    }
    if let Some(rest) = s.strip_prefix("0.") {
        format!(".{rest}")
    } else if let Some(rest) = s.strip_prefix("-0.") {
        format!("-.{rest}")
    } else {
        s
    }
}

fn mean_sd(s: &Summary) -> String {
    format!("{} ({})", two_decimals(s.mean), two_decimals(s.sd))
}

fn fixed(x: f64) -> String {
    if x.is_nan() {
        "NA".into()
    } else {
        format!("{x:.6}")
    }
}

pub const RESULTS_CSV_HEADER: &str = "n,p,q,per_factor,level,rho,reps_requested,reps_valid,\
extraction_failures,rotation_failures,ot_cong_mean,ot_cong_sd,omt_cong_mean,omt_cong_sd,\
ot_phi_mean,ot_phi_sd,omt_phi_mean,omt_phi_sd,ot_bias,omt_bias";

/// One row per condition, six decimals.
pub fn results_csv(results: &[ConditionResult]) -> String {
    let mut out = String::from(RESULTS_CSV_HEADER);
    out.push('\n');
    for r in results {
        let c = &r.condition;
        let cells = [
            c.n.to_string(),
            c.p().to_string(),
            c.q.to_string(),
            c.per_factor.to_string(),
            c.level.to_string(),
            format!("{:.2}", c.rho),
            r.replications_requested.to_string(),
            r.replications_valid.to_string(),
            r.extraction_failures.to_string(),
            r.rotation_failures.to_string(),
            fixed(r.ot_congruence.mean),
            fixed(r.ot_congruence.sd),
            fixed(r.omt_congruence.mean),
            fixed(r.omt_congruence.sd),
            fixed(r.ot_mean_phi.mean),
            fixed(r.ot_mean_phi.sd),
            fixed(r.omt_mean_phi.mean),
            fixed(r.omt_mean_phi.sd),
            fixed(r.bias_ot),
            fixed(r.bias_omt),
        ];
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Markdown tables, one per factor inter-correlation level, with cells of the
/// form `mean congruence (SD) / mean φ (SD)`.
pub fn summary_markdown(results: &[ConditionResult], reps: usize, seed: u64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Congruence with target and mean factor inter-correlations\n");
    let _ = writeln!(out, "Replications per condition: {reps}; seed: {seed}.\n");

    let mut rhos: Vec<f64> = Vec::new();
    for r in results {
        if !rhos.iter().any(|x| (x - r.condition.rho).abs() < 1e-12) {
            rhos.push(r.condition.rho);
        }
    }
    for rho in rhos {
        let phi = two_decimals(rho);
        let _ = writeln!(out, "## φ = {phi}\n");
        let _ = writeln!(
            out,
            "| n | p | q | λ | OT cong. / φ | OMT cong. / φ | OT bias | OMT bias | valid |"
        );
        let _ = writeln!(out, "|---|---|---|---|---|---|---|---|---|");
        for r in results.iter().filter(|r| (r.condition.rho - rho).abs() < 1e-12) {
            let c = &r.condition;
            let _ = writeln!(
                out,
                "| {} | {} | {} | λ{} | {} / {} | {} / {} | {} | {} | {}/{} |",
                c.n,
                c.p(),
                c.q,
                two_decimals(c.level.mean_loading()),
                mean_sd(&r.ot_congruence),
                mean_sd(&r.ot_mean_phi),
                mean_sd(&r.omt_congruence),
                mean_sd(&r.omt_mean_phi),
                two_decimals(r.bias_ot),
                two_decimals(r.bias_omt),
                r.replications_valid,
                r.replications_requested,
            );
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_decimal_style() {
        assert_eq!(two_decimals(0.9712), ".97");
        assert_eq!(two_decimals(-0.1086), "-.11");
        assert_eq!(two_decimals(1.0), "1.00");
        assert_eq!(two_decimals(-0.001), ".00");
        assert_eq!(two_decimals(-1.5), "-1.50");
        assert_eq!(two_decimals(f64::NAN), "NA");
    }
}
