use std::collections::BTreeMap;

/// Finds the label whose verbalizer occurs earliest in `generation`,
/// case-insensitively.
///
/// Ties at the same offset go to the longer verbalizer, then to the
/// lexicographically smaller label.
pub fn match_verbalizer<'a>(
    generation: &str,
    label_verbalizers: &'a BTreeMap<String, Vec<String>>,
) -> Option<&'a str> {
    let haystack = generation.to_lowercase();
    let mut best: Option<(usize, std::cmp::Reverse<usize>, &'a str)> = None;
    for (label, verbalizers) in label_verbalizers {
        for v in verbalizers {
            let needle = v.to_lowercase();
            if needle.is_empty() {
                continue;
            }
            if let Some(offset) = haystack.find(&needle) {
                let key = (offset, std::cmp::Reverse(needle.chars().count()), label.as_str());
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
        }
    }
    best.map(|(_, _, label)| label)
}
