use std::collections::BTreeMap;

use indexmap::IndexMap;

use super::UsageRecord;
use crate::diag::{self, Warning};

/// One old-period sense of a target word.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Sense {
    pub gloss: String,
    /// Usage ids of the old-period examples, in file order.
    pub examples: Vec<String>,
    /// Example texts, parallel to `examples`.
    pub example_texts: Vec<String>,
}

/// The old-period senses of one word, in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SenseInventory {
    pub word: String,
    pub senses: IndexMap<String, Sense>,
}

impl SenseInventory {
    pub fn contains(&self, sense_id: &str) -> bool {
        self.senses.contains_key(sense_id)
    }

    pub fn is_empty(&self) -> bool {
        self.senses.is_empty()
    }

    pub fn len(&self) -> usize {
        self.senses.len()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Inventories {
    pub by_word: BTreeMap<String, SenseInventory>,
    /// Words that occur only in the new period. They still get an (empty)
    /// entry in `by_word`.
    pub without_old: Vec<String>,
    pub warnings: Vec<Warning>,
}

impl Inventories {
    pub fn get(&self, word: &str) -> Option<&SenseInventory> {
        self.by_word.get(word)
    }
}

pub fn build_inventories(records: &[UsageRecord]) -> Inventories {
    let mut inv = Inventories::default();
    for r in records {
        let entry = inv
            .by_word
            .entry(r.word.clone())
            .or_insert_with(|| SenseInventory {
                word: r.word.clone(),
                senses: IndexMap::new(),
            });
        if !r.is_old() {
            continue;
        }
        let Some(sense_id) = &r.sense_id else {
            diag::push(
                &mut inv.warnings,
                Warning::UnlabeledOldUsage {
                    usage_id: r.usage_id.clone(),
                },
            );
            continue;
        };
        let gloss = r.gloss.clone().unwrap_or_default();
        let sense = entry
            .senses
            .entry(sense_id.clone())
            .or_insert_with(|| Sense {
                gloss: gloss.clone(),
                ..Sense::default()
            });
        if sense.gloss != gloss {
            diag::push(
                &mut inv.warnings,
                Warning::ConflictingGloss {
                    word: r.word.clone(),
                    sense_id: sense_id.clone(),
                },
            );
        }
        sense.examples.push(r.usage_id.clone());
        sense.example_texts.push(r.example.clone());
    }
    inv.without_old = inv
        .by_word
        .values()
        .filter(|i| i.is_empty())
        .map(|i| i.word.clone())
        .collect();
    for w in inv.without_old.clone() {
        diag::push(&mut inv.warnings, Warning::WordWithoutOldSenses(w));
    }
    inv
}
