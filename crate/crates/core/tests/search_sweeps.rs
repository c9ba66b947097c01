use std::fs::OpenOptions;
use std::io::Write;

use cg_obstruct::linking_form::primary_parts;
use cg_obstruct::obstruction::verify_primary_part;
use cg_obstruct::search::{read_checkpoint, search, RankingKey, SearchConfig, Verdict};
use cg_obstruct::GAKnot;

fn explicit(p: &[u64], q: &[u64]) -> SearchConfig {
    SearchConfig { p_primes: Some(p.to_vec()), q_primes: Some(q.to_vec()), ..SearchConfig::default() }
}

fn tuples(out: &cg_obstruct::search::SearchOutcome) -> Vec<[u64; 5]> {
    out.hits.iter().map(|h| h.tuple).collect()
}

#[test]
fn reference_tuple_is_first_in_its_region() {
    let out = search(&explicit(&[83, 103], &[11, 13, 17]), None).unwrap();
    assert_eq!(out.ranking, RankingKey::Product);
    assert_eq!(out.candidates, 3);
    assert_eq!(tuples(&out).first(), Some(&[83, 103, 17, 11, 13]));
}

#[test]
fn first_example_tuple_is_found() {
    let out = search(&explicit(&[107, 131], &[17, 19, 23]), None).unwrap();
    assert!(tuples(&out).contains(&[107, 131, 23, 17, 19]));
}

#[test]
fn reported_hits_revalidate() {
    let out = search(&explicit(&[83, 89, 103], &[11, 13, 17]), None).unwrap();
    assert!(!out.hits.is_empty());
    for hit in &out.hits {
        let knot: GAKnot = hit.report.knot.parse().unwrap();
        assert!(hit.report.certifies_above(1));
        for part in primary_parts(&knot) {
            let v = verify_primary_part(&part, &knot, 1, 0).unwrap();
            assert!(v.verified, "{:?} at p={}", hit.tuple, part.prime());
            assert_eq!(v.points, (part.prime() + 1).pow(2));
        }
    }
}

#[test]
fn resume_yields_identical_list() {
    let cfg = SearchConfig { batch_size: 4, ..explicit(&[83, 89, 97, 103], &[11, 13, 17]) };
    let fresh = search(&cfg, None).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("progress.jsonl");
    // Interrupted run: stop after two hits, then append a torn line.
    let partial = search(&SearchConfig { limit: Some(2), ..cfg.clone() }, Some(&path)).unwrap();
    assert_eq!(partial.hits.len(), 2);
    let recorded = read_checkpoint(&path).unwrap();
    assert!(!recorded.is_empty() && recorded.len() < fresh.candidates);
    writeln!(OpenOptions::new().append(true).open(&path).unwrap()).unwrap();
    write!(OpenOptions::new().append(true).open(&path).unwrap(), "{{\"tuple\":[83,").unwrap();

    let resumed = search(&cfg, Some(&path)).unwrap();
    assert_eq!(tuples(&resumed), tuples(&fresh));
    assert_eq!(
        serde_json::to_string(&resumed.hits.iter().map(|h| &h.report).collect::<Vec<_>>()).unwrap(),
        serde_json::to_string(&fresh.hits.iter().map(|h| &h.report).collect::<Vec<_>>()).unwrap()
    );
}

#[test]
fn checkpoint_covers_every_candidate_once() {
    let cfg = explicit(&[83, 103], &[11, 13, 17]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cp.jsonl");
    search(&cfg, Some(&path)).unwrap();
    search(&cfg, Some(&path)).unwrap();
    let recs = read_checkpoint(&path).unwrap();
    assert_eq!(recs.len(), 3);
    assert_eq!(recs.iter().filter(|r| r.verdict == Verdict::Verified).count(), 1);
    assert!(recs.iter().all(|r| r.verdict == Verdict::Error || r.margin.is_some()));
}

#[test]
fn search_is_deterministic_across_thread_counts() {
    let cfg = explicit(&[83, 89, 103], &[11, 13, 17]);
    let run = |n| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
        let out = pool.install(|| search(&cfg, None)).unwrap();
        serde_json::to_string(&out.hits.iter().map(|h| &h.report).collect::<Vec<_>>()).unwrap()
    };
    assert_eq!(run(1), run(4));
}
