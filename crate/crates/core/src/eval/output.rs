use std::io::{self, Write};

use serde_json::json;

use super::EvalResult;

/// `config_hash,N,recall,precision,f1,posts`, one row per N. Timings are
/// kept out so that reruns are byte-identical.
pub fn write_summary_csv<W: Write>(result: &EvalResult, mut out: W) -> io::Result<()> {
    writeln!(out, "config_hash,N,recall,precision,f1,posts")?;
    for row in &result.summary {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            result.config_hash, row.n, row.recall, row.precision, row.f1, row.posts
        )?;
    }
    out.flush()
}

/// One line per (post, N): user, document, N, recall, precision, f1, true
/// tags, recommended tags, error.
pub fn write_details_tsv<W: Write>(result: &EvalResult, mut out: W) -> io::Result<()> {
    writeln!(out, "user\tdocument\tN\trecall\tprecision\tf1\ttrue_tags\trecommended\terror")?;
    for d in &result.details {
        for (n, m) in result.n_values.iter().zip(&d.metrics) {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                d.user,
                d.document,
                n,
                m.recall,
                m.precision,
                m.f1,
                d.true_tags.join(","),
                d.recommended[..(*n).min(d.recommended.len())].join(","),
                d.error.as_deref().unwrap_or("")
            )?;
        }
    }
    out.flush()
}

/// Whitespace-separated columns for plotting recall@N curves.
pub fn write_plot_dat<W: Write>(result: &EvalResult, mut out: W) -> io::Result<()> {
    writeln!(out, "# config {}", result.config_hash)?;
    writeln!(out, "# N recall precision f1")?;
    for row in &result.summary {
        writeln!(out, "{} {} {} {}", row.n, row.recall, row.precision, row.f1)?;
    }
    out.flush()
}

/// Run metadata, including the averaging conventions.
pub fn metadata_json(result: &EvalResult) -> serde_json::Value {
    json!({
        "config_hash": result.config_hash,
        "seed": result.seed,
        "n_values": result.n_values,
        "posts": result.details.len(),
        "excluded_posts": result.excluded,
        "failed_posts": result.failures,
        "averaging": "macro (mean over test posts)",
        "precision_denominator": "number of tags actually recommended, at most N",
        "seconds": result.seconds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{Metrics, PostDetail, SummaryRow};

    fn result() -> EvalResult {
        EvalResult {
            config_hash: "abc".into(),
            seed: 1,
            n_values: vec![1, 2],
            summary: vec![
                SummaryRow { n: 1, recall: 0.5, precision: 1.0, f1: 2.0 / 3.0, posts: 1 },
                SummaryRow { n: 2, recall: 0.5, precision: 0.5, f1: 0.5, posts: 1 },
            ],
            details: vec![PostDetail {
                user: "u".into(),
                document: "d".into(),
                true_tags: vec!["a".into(), "b".into()],
                recommended: vec!["a".into(), "x".into()],
                metrics: vec![Metrics::from_pr(1.0, 0.5), Metrics::from_pr(0.5, 0.5)],
                error: None,
            }],
            excluded: 0,
            failures: 0,
            seconds: 0.25,
        }
    }

    #[test]
    fn summary_layout() {
        let mut buf = Vec::new();
        write_summary_csv(&result(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "config_hash,N,recall,precision,f1,posts");
        assert_eq!(lines[2], "abc,2,0.5,0.5,0.5,1");
    }

    #[test]
    fn details_truncate_per_n() {
        let mut buf = Vec::new();
        write_details_tsv(&result(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().contains("\ta,b\ta\t"));
        assert!(text.lines().nth(2).unwrap().contains("\ta,b\ta,x\t"));
    }

    #[test]
    fn metadata_records_conventions() {
        let m = metadata_json(&result());
        assert_eq!(m["seed"], 1);
        assert!(m["averaging"].as_str().unwrap().starts_with("macro"));
    }
}
