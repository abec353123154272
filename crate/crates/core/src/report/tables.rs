use std::fmt::Write as _;

use crate::features::ScopeSummary;
use crate::model::{FeatureCatalog, ImportanceReport};

use super::ReportError;

fn fixed(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| format!("{v:.3}"))
}

/// `Variable | Median | Mean | SD | Group`, catalog order, three decimals.
/// An empty scope yields the header alone.
pub fn emit_summary_table(summary: &ScopeSummary, manifest_digest: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# Summary statistics of neighborhood elements, {} {} (zones={}, manifest={manifest_digest})",
        summary.scope.label, summary.base_year, summary.n_zones
    );
    s.push_str("Variable\tMedian\tMean\tSD\tGroup\n");
    if summary.n_zones == 0 {
        return s;
    }
    for row in &summary.rows {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}",
            row.label,
            fixed(row.median),
            fixed(row.mean),
            fixed(row.sd),
            row.group.label()
        );
    }
    s
}

/// One importance column per report, rows sorted by the first report's
/// mean importance (ties in catalog order).
pub fn emit_importance_table(
    reports: &[ImportanceReport],
    catalog: &FeatureCatalog,
    manifest_digest: &str,
) -> Result<String, ReportError> {
    let first = reports.first().ok_or_else(|| ReportError::DegenerateReport("no reports".into()))?;
    if let Some(r) = reports.iter().find(|r| r.is_degenerate()) {
        return Err(ReportError::DegenerateReport(r.scope.label.clone()));
    }
    if let Some(r) = reports.iter().find(|r| r.features != first.features || r.outcome != first.outcome) {
        return Err(ReportError::Mismatch(r.scope.label.clone()));
    }
    let label = |name: &str| {
        catalog.index_of(name).map_or_else(|| name.to_string(), |i| catalog.entries()[i].label.to_string())
    };

    let mut s = String::new();
    let _ = writeln!(s, "# Feature importance, outcome {} (manifest={manifest_digest})", first.outcome.column());
    s.push_str("Feature");
    for r in reports {
        let _ = write!(s, "\tImportance {}", r.scope.label);
    }
    s.push('\n');
    for i in first.ranking() {
        s.push_str(&label(&first.features[i]));
        for r in reports {
            let _ = write!(s, "\t{:.3}", r.mean[i]);
        }
        s.push('\n');
    }
    Ok(s)
}

/// Full-precision detail for one report: mean, every seed's vector, rank.
pub fn emit_seed_table(report: &ImportanceReport, manifest_digest: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# outcome={} scope={} rows={} master_seed={} manifest={manifest_digest}",
        report.outcome.column(),
        report.scope.id,
        report.n_rows,
        report.master_seed
    );
    s.push_str("feature\tmean");
    for k in 0..report.per_seed.len() {
        let _ = write!(s, "\tseed_{k}");
    }
    s.push_str("\trank\n");
    let mut rank = vec![0; report.mean.len()];
    for (r, i) in report.ranking().into_iter().enumerate() {
        rank[i] = r + 1;
    }
    for (i, name) in report.features.iter().enumerate() {
        let _ = write!(s, "{name}\t{}", report.mean[i]);
        for v in &report.per_seed {
            let _ = write!(s, "\t{}", v[i]);
        }
        let _ = writeln!(s, "\t{}", rank[i]);
    }
    s
}
