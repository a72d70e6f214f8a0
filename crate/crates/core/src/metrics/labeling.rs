use std::collections::{BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};

/// Item ids paired with opaque labels, in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Labeling {
    items: Vec<(String, String)>,
}

impl Labeling {
    pub fn new<I, S, L>(items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, L)>,
        S: Into<String>,
        L: Into<String>,
    {
        let items: Vec<(String, String)> = items
            .into_iter()
            .map(|(s, l)| (s.into(), l.into()))
            .collect();
        let mut seen = HashSet::new();
        for (id, label) in &items {
            if !seen.insert(id.as_str()) {
                return Err(Error::InvalidArgument(format!("item '{id}' labelled twice")));
            }
            if label.is_empty() {
                return Err(Error::InvalidArgument(format!("item '{id}' has an empty label")));
            }
        }
        Ok(Labeling { items })
    }

    /// Positional labeling: item ids are `0..labels.len()`.
    pub fn from_labels<L: AsRef<str>>(labels: &[L]) -> Result<Self> {
        Self::new(
            labels
                .iter()
                .enumerate()
                .map(|(i, l)| (i.to_string(), l.as_ref().to_string())),
        )
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.items.iter().map(|(i, l)| (i.as_str(), l.as_str()))
    }

    /// Pairs the labels of both sides by item id, following `self`'s order.
    pub(crate) fn zip<'a>(&'a self, other: &'a Labeling) -> Result<Vec<(&'a str, &'a str)>> {
        let theirs: HashMap<&str, &str> = other.iter().collect();
        let ours: HashSet<&str> = self.iter().map(|(i, _)| i).collect();
        let mut diff: BTreeSet<&str> = ours
            .iter()
            .filter(|i| !theirs.contains_key(*i))
            .copied()
            .collect();
        diff.extend(theirs.keys().filter(|i| !ours.contains(*i)));
        if !diff.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "labelings cover different items: {}",
                diff.into_iter().collect::<Vec<_>>().join(", ")
            )));
        }
        Ok(self.iter().map(|(i, l)| (l, theirs[i])).collect())
    }
}
