mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use semshift::baseline::{
    retrieve_glosses, run_baseline, BaselineConfig, GlossCandidatePool,
};
use semshift::corpus::{build_inventories, parse_corpus, ParseMode};
use semshift::embeddings::HashedEmbedder;
use semshift::scoring::score_subtask1;

use common::{fixture_path, planted_corpus};

fn mapped_clusters(run: &semshift::baseline::BaselineRun) -> BTreeSet<(String, Vec<String>)> {
    run.assignments
        .iter()
        .flat_map(|a| {
            a.clusters
                .iter()
                .filter(|c| !c.novel)
                .map(|c| (a.word.clone(), c.members.clone()))
        })
        .collect()
}

/// The mapping decision of every cluster follows the planted status of its
/// prototype. Clusters can still be impure when AP merges groups.
#[test]
fn cluster_decisions_follow_prototype_geometry() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let planted = planted_corpus(&mut rng, 12);
    let run = run_baseline(&planted.corpus, &planted.store, &BaselineConfig::default()).unwrap();
    assert!(run.skipped.is_empty());
    assert_eq!(run.prediction.labels.len(), planted.truth.len());
    let inventories = build_inventories(&planted.corpus.records);
    for a in &run.assignments {
        let inventory = inventories.get(&a.word).unwrap();
        for c in &a.clusters {
            match &planted.truth[&c.prototype] {
                Some(s) => assert_eq!(&c.sense_id, s),
                None => {
                    assert!(c.novel);
                    assert!(!inventory.contains(&c.sense_id));
                    assert!(c.sense_id.starts_with(&format!("{}_novel_", a.word)));
                }
            }
            // prototype is the first member in corpus order
            let first = planted
                .corpus
                .records
                .iter()
                .find(|r| c.members.contains(&r.usage_id))
                .unwrap();
            assert_eq!(c.prototype, first.usage_id);
            assert_eq!(c.members[0], c.prototype);
        }
    }
}

#[test]
fn mini_corpus_end_to_end() {
    let test = parse_corpus(fixture_path("mini_test.tsv"), ParseMode::Test).unwrap();
    let gold = parse_corpus(fixture_path("mini_gold.tsv"), ParseMode::Gold).unwrap();
    let h = HashedEmbedder::new(64);
    let run = run_baseline(&test, &h, &BaselineConfig::default()).unwrap();
    let new_ids: BTreeSet<&str> = test.records.iter().filter(|r| r.is_new()).map(|r| r.usage_id.as_str()).collect();
    let labelled: BTreeSet<&str> = run.prediction.labels.keys().map(String::as_str).collect();
    assert_eq!(new_ids, labelled);

    let report = score_subtask1(&gold, &run.prediction).unwrap();
    assert_eq!(report.rows.len(), 3);
    let ari = report.aggregates.ari.unwrap();
    assert!((-1.0..=1.0).contains(&ari));

    let pool = GlossCandidatePool::build(&test, None, &h).unwrap();
    let glosses = retrieve_glosses(&run.prediction, &test, &h, &pool).unwrap();
    let inventories = build_inventories(&test.records);
    for (word, senses) in &glosses.glosses {
        for (sense, gloss) in senses {
            let inv = inventories.get(word).unwrap();
            assert!(!inv.contains(sense));
            assert!(inv.senses.values().any(|s| &s.gloss == gloss));
        }
    }
}

#[test]
fn deterministic() {
    let test = parse_corpus(fixture_path("mini_test.tsv"), ParseMode::Test).unwrap();
    let h = HashedEmbedder::new(32);
    let a = run_baseline(&test, &h, &BaselineConfig::default()).unwrap();
    let b = run_baseline(&test, &h, &BaselineConfig::default()).unwrap();
    assert_eq!(a.prediction, b.prediction);
    assert_eq!(a.assignments, b.assignments);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn raising_threshold_never_maps_more(seed in any::<u64>(), t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let planted = planted_corpus(&mut rng, 3);
        let run = |t| run_baseline(&planted.corpus, &planted.store, &BaselineConfig { threshold: t, ..BaselineConfig::default() }).unwrap();
        let low = mapped_clusters(&run(lo));
        let high = mapped_clusters(&run(hi));
        prop_assert!(high.is_subset(&low));
    }

    #[test]
    fn every_new_usage_gets_one_label(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let planted = planted_corpus(&mut rng, 2);
        let run = run_baseline(&planted.corpus, &planted.store, &BaselineConfig::default()).unwrap();
        prop_assert_eq!(run.prediction.labels.len(), planted.truth.len());
        for a in &run.assignments {
            let members: usize = a.clusters.iter().map(|c| c.members.len()).sum();
            prop_assert_eq!(members, a.cluster_of.len());
        }
    }
}
