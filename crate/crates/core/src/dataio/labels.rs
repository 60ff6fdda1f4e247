use crate::error::{Error, Result};

pub const NUM_CLASSES: usize = 6;

pub const CLASS_NAMES: [&str; NUM_CLASSES] = [
    "Normal",
    "DDoS-TCP",
    "DDoS-UDP",
    "DoS-HTTP",
    "OS-Fingerprinting",
    "Data-Exfiltration",
];

/// Maps (category, subcategory) label text to class indices.
///
/// Matching ignores case and treats spaces, `-`, `_` and `/` as the same
/// separator, so `OS_Fingerprint` and `os fingerprint` are equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    entries: Vec<(String, String, usize)>,
}

fn canonical(s: &str) -> String {
    s.trim()
        .chars()
        .map(|c| match c {
            ' ' | '-' | '/' => '_',
            c => c.to_ascii_lowercase(),
        })
        .collect()
}

impl Default for LabelMap {
    fn default() -> Self {
        let mut m = LabelMap {
            entries: Vec::new(),
        };
        for (cat, sub, class) in [
            ("Normal", "Normal", 0),
            ("DDoS", "TCP", 1),
            ("DDoS", "UDP", 2),
            ("DoS", "HTTP", 3),
            ("Reconnaissance", "OS_Fingerprint", 4),
            ("Reconnaissance", "OS_Fingerprinting", 4),
            ("Theft", "Data_Exfiltration", 5),
        ] {
            m.insert(cat, sub, class);
        }
        m
    }
}

impl LabelMap {
    pub fn empty() -> Self {
        LabelMap {
            entries: Vec::new(),
        }
    }

    pub fn insert(&mut self, category: &str, subcategory: &str, class: usize) {
        let (c, s) = (canonical(category), canonical(subcategory));
        self.entries.retain(|(ec, es, _)| !(ec == &c && es == &s));
        self.entries.push((c, s, class));
    }

    pub fn get(&self, category: &str, subcategory: &str) -> Option<usize> {
        let (c, s) = (canonical(category), canonical(subcategory));
        self.entries
            .iter()
            .find(|(ec, es, _)| ec == &c && es == &s)
            .map(|&(_, _, class)| class)
    }
}

pub fn encode_label(category: &str, subcategory: &str, map: &LabelMap) -> Result<usize> {
    map.get(category, subcategory)
        .ok_or_else(|| Error::UnmappedLabel {
            category: category.to_string(),
            subcategory: subcategory.to_string(),
        })
}

pub fn class_name(class: usize) -> &'static str {
    CLASS_NAMES.get(class).copied().unwrap_or("unknown")
}
