use std::fmt::Write;

use cg_obstruct::casson_gordon::Character;
use cg_obstruct::obstruction::ObstructionReport;
use cg_obstruct::search::SearchOutcome;
use cg_obstruct::{GAKnot, Rational};
use serde_json::json;

use crate::OutputFormat;

fn vector(x: &[u64]) -> String {
    let parts: Vec<String> = x.iter().map(u64::to_string).collect();
    format!("({})", parts.join(","))
}

fn optional(r: &Option<Rational>) -> String {
    r.as_ref().map_or("-".to_string(), Rational::to_string)
}

pub fn report(report: &ObstructionReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut s = String::from("genus_hypothesis,p,rank,points,verified,unwitnessed,margin\n");
            for v in &report.primes {
                let margin = v.margin.as_ref().map_or(String::new(), Rational::to_fraction_string);
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    v.genus_hypothesis, v.p, v.rank, v.points, v.verified, v.unwitnessed, margin
                );
            }
            s
        }
        OutputFormat::Human => human_report(report),
    }
}

fn human_report(report: &ObstructionReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "knot:       {}", report.knot);
    let _ = writeln!(s, "sigma(-1):  {}", report.sigma_minus_one);
    for h in &report.hypotheses {
        let _ = writeln!(s);
        let _ = writeln!(s, "genus hypothesis g = {} (threshold 4g+1 = {})", h.g, 4 * h.g + 1);
        let rows: Vec<_> = report.primes.iter().filter(|v| v.genus_hypothesis == h.g).collect();
        if !rows.is_empty() {
            let _ = writeln!(s, "  {:>6} {:>5} {:>8} {:>9} {:>10}", "p", "rank", "points", "verified", "margin");
            for v in rows {
                let _ = writeln!(
                    s,
                    "  {:>6} {:>5} {:>8} {:>9} {:>10}",
                    v.p,
                    v.rank,
                    v.points,
                    if v.verified { "yes" } else { "no" },
                    optional(&v.margin)
                );
                if let Some(x) = &v.first_unwitnessed {
                    let _ = writeln!(s, "         first point without a violating multiple: {}", vector(x.coords()));
                }
            }
        }
        let verdict = if h.refuted { "refuted" } else { "not refuted" };
        let _ = writeln!(s, "  {verdict}: {}", h.reason);
    }
    let _ = writeln!(s);
    let g = &report.genus;
    let _ = writeln!(s, "lower bound: {}", g.lower_bound);
    match (&g.upper_bound, &g.upper_bound_source) {
        (Some(u), Some(src)) => {
            let _ = writeln!(s, "upper bound: {u} ({src})");
        }
        _ => {
            let _ = writeln!(s, "upper bound: none recorded");
        }
    }
    let _ = writeln!(s, "conclusion:  {}", g.statement);

    let witnesses: Vec<_> = report.primes.iter().flat_map(|v| &v.witnesses).collect();
    if !witnesses.is_empty() {
        let _ = writeln!(s);
        let _ = writeln!(s, "sample witnesses (|sigma + sigma(-1)| > threshold + eta):");
        for w in witnesses {
            let _ = writeln!(
                s,
                "  p={} x={} k={} sigma={} eta={} threshold={}",
                w.prime,
                vector(w.x.coords()),
                w.k,
                w.sigma,
                w.eta,
                w.threshold
            );
        }
    }

    if let Some(d) = &report.diagnostics {
        let _ = writeln!(s);
        let _ = writeln!(s, "algebraic sliceness, necessary conditions only (no Seifert metabolizer is constructed):");
        let _ = writeln!(s, "  sigma(-1) = {}", d.sigma_minus_one);
        if d.signature_function_vanishes {
            let _ = writeln!(s, "  signature function: 0 at all {} samples", d.signature_samples);
        } else {
            let _ = writeln!(s, "  signature function: nonzero, e.g. {:?}", d.nonzero_samples);
        }
        if d.fox_milnor.holds {
            let _ = writeln!(s, "  Fox-Milnor: Alexander factors pair up completely ({} pairs)", d.fox_milnor.pairs.len());
        } else {
            let _ = writeln!(s, "  Fox-Milnor: {} unpaired factor(s)", d.fox_milnor.unpaired.len());
        }
    }
    s
}

pub fn search_lines(outcome: &SearchOutcome) -> String {
    let mut s = String::new();
    for hit in &outcome.hits {
        let line = json!({
            "tuple": hit.tuple,
            "ranking": outcome.ranking.to_string(),
            "lower_bound": hit.report.genus.lower_bound,
            "report": hit.report,
        });
        let _ = writeln!(s, "{line}");
    }
    for (tuple, err) in &outcome.failures {
        let _ = writeln!(s, "{}", json!({ "tuple": tuple, "error": err }));
    }
    s
}

pub fn signature_table(q: u64, m: u64, rows: &[(u64, i64, u64)], format: OutputFormat) -> String {
    let mut s = String::new();
    match format {
        OutputFormat::Csv => {
            s.push_str("a,sigma,eta\n");
            for (a, sigma, eta) in rows {
                let _ = writeln!(s, "{a},{sigma},{eta}");
            }
        }
        OutputFormat::Json => {
            let rows: Vec<_> = rows.iter().map(|(a, sg, e)| json!({ "a": a, "sigma": sg, "eta": e })).collect();
            let _ = writeln!(s, "{}", json!({ "q": q, "m": m, "rows": rows }));
        }
        OutputFormat::Human => {
            let _ = writeln!(s, "T(2,{q}) at exp(2 pi i a/{m})");
            let _ = writeln!(s, "{:>6} {:>6} {:>4}", "a", "sigma", "eta");
            for (a, sigma, eta) in rows {
                let _ = writeln!(s, "{a:>6} {sigma:>6} {eta:>4}");
            }
        }
    }
    s
}

pub fn cg_values(knot: &GAKnot, chi: &Character, sigma: &Rational, eta: u64, format: OutputFormat) -> String {
    match format {
        OutputFormat::Human => format!(
            "knot:      {knot}\ncharacter: {}\nsigma = {sigma} ({:.6})\neta = {eta}\n",
            vector(chi.residues()),
            sigma.to_f64()
        ),
        OutputFormat::Json => format!(
            "{}\n",
            json!({
                "knot": knot.to_string(),
                "character": chi.residues(),
                "sigma": sigma.to_fraction_string(),
                "sigma_decimal": sigma.to_f64(),
                "eta": eta,
            })
        ),
        OutputFormat::Csv => format!(
            "sigma,sigma_decimal,eta\n{},{},{eta}\n",
            sigma.to_fraction_string(),
            sigma.to_f64()
        ),
    }
}
