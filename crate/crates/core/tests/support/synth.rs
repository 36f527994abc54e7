//! Seeded synthetic multilingual corpora.
//!
//! Each language has its own phonotactics, a Zipf-distributed root lexicon
//! and productive affixes. Lexicons are a pure function of the language, so
//! text drawn with different seeds shares vocabulary the way held-out text of
//! a real language would. Several languages borrow part of their roots from
//! the Indonesian-like lexicon.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use langadapt::corpus::CorpusDocument;

pub struct LanguageSpec {
    pub code: &'static str,
    onsets: &'static [&'static str],
    vowels: &'static [&'static str],
    codas: &'static [&'static str],
    prefixes: &'static [&'static str],
    suffixes: &'static [&'static str],
    /// Share of roots borrowed from the `ind` lexicon.
    borrowed: f64,
}

pub const LANGUAGES: [LanguageSpec; 10] = [
    LanguageSpec {
        code: "ind",
        onsets: &["b", "c", "d", "g", "h", "j", "k", "l", "m", "n", "p", "r", "s", "t", "w", "y", "ng", "ny", "sy", "kh"],
        vowels: &["a", "i", "u", "e", "o", "a", "a", "i"],
        codas: &["", "", "", "n", "ng", "k", "r", "s", "t", "l", "m", "h"],
        prefixes: &["me", "mem", "men", "meng", "ber", "di", "ter", "pe", "pen", "per", "ke", "se"],
        suffixes: &["kan", "an", "nya", "i", "lah", "kah", "pun"],
        borrowed: 0.0,
    },
    LanguageSpec {
        code: "sun",
        onsets: &["b", "c", "d", "g", "h", "j", "k", "l", "m", "n", "p", "r", "s", "t", "w", "y", "ng", "ny"],
        vowels: &["a", "i", "u", "e", "o", "eu", "é", "a"],
        codas: &["", "", "n", "ng", "k", "r", "h", "l"],
        prefixes: &["nga", "ka", "di", "pa", "ti", "sa", "barang"],
        suffixes: &["na", "keun", "an", "eun", "ing"],
        borrowed: 0.3,
    },
    LanguageSpec {
        code: "jav",
        onsets: &["b", "c", "d", "dh", "g", "j", "k", "l", "m", "n", "p", "r", "s", "t", "th", "w", "ng", "ny"],
        vowels: &["a", "i", "u", "e", "o", "o", "è", "é"],
        codas: &["", "", "n", "ng", "k", "r", "h", "t"],
        prefixes: &["ng", "dipun", "ka", "pa", "sa", "ny", "m"],
        suffixes: &["ake", "e", "ne", "an", "ipun", "na"],
        borrowed: 0.3,
    },
    LanguageSpec {
        code: "ace",
        onsets: &["b", "c", "d", "g", "h", "j", "k", "l", "m", "n", "p", "r", "s", "t", "w", "y", "ny", "ng"],
        vowels: &["a", "i", "u", "e", "o", "eu", "ö", "è", "ô"],
        codas: &["", "", "ng", "n", "h", "k", "t", "m"],
        prefixes: &["meu", "geu", "teu", "peu", "beu"],
        suffixes: &["lah", "geuh", "jih", "droe"],
        borrowed: 0.2,
    },
    LanguageSpec {
        code: "ban",
        onsets: &["b", "c", "d", "g", "j", "k", "l", "m", "n", "p", "r", "s", "t", "w", "y", "ng", "ny"],
        vowels: &["a", "i", "u", "e", "o", "é", "ê"],
        codas: &["", "", "n", "ng", "k", "r", "h", "s"],
        prefixes: &["ma", "ka", "pa", "nga", "ny"],
        suffixes: &["ang", "in", "ne", "é", "ipun"],
        borrowed: 0.25,
    },
    LanguageSpec {
        code: "bug",
        onsets: &["b", "c", "d", "g", "j", "k", "l", "m", "n", "p", "r", "s", "t", "w", "y", "ngk", "mp", "nr"],
        vowels: &["a", "i", "u", "e", "o", "aa"],
        codas: &["", "", "", "ng", "q"],
        prefixes: &["ma", "pa", "ri", "ta", "si", "mak"],
        suffixes: &["i", "e", "ngi", "ki", "mu"],
        borrowed: 0.15,
    },
    LanguageSpec {
        code: "min",
        onsets: &["b", "c", "d", "g", "h", "j", "k", "l", "m", "n", "p", "r", "s", "t", "w", "y", "ng", "ny"],
        vowels: &["a", "i", "u", "o", "ua", "ia", "a"],
        codas: &["", "", "n", "ng", "k", "h", "ik", "uik"],
        prefixes: &["ma", "ba", "di", "ta", "pa", "sa"],
        suffixes: &["an", "kan", "nyo", "lah", "i"],
        borrowed: 0.4,
    },
    LanguageSpec {
        code: "bjn",
        onsets: &["b", "c", "d", "g", "h", "j", "k", "l", "m", "n", "p", "r", "s", "t", "w", "y", "ng"],
        vowels: &["a", "i", "u", "a", "ai", "au"],
        codas: &["", "", "n", "ng", "k", "h", "r", "t"],
        prefixes: &["ba", "di", "ma", "ta", "pa", "sa"],
        suffixes: &["akan", "an", "nya", "i", "lah"],
        borrowed: 0.35,
    },
    LanguageSpec {
        code: "mad",
        onsets: &["bh", "c", "dh", "gh", "jh", "k", "l", "m", "n", "p", "r", "s", "t", "w", "y", "ng", "ny"],
        vowels: &["a", "e", "è", "o", "u", "â", "i"],
        codas: &["", "", "n", "ng", "k", "r", "h", "t"],
        prefixes: &["a", "e", "ka", "pa", "sa", "ta"],
        suffixes: &["aghi", "na", "an", "è", "ba"],
        borrowed: 0.2,
    },
    LanguageSpec {
        code: "gor",
        onsets: &["b", "d", "dh", "g", "h", "j", "k", "l", "m", "n", "p", "t", "w", "y", "mb", "nt", "ngg"],
        vowels: &["a", "i", "u", "e", "o", "o", "u"],
        codas: &["", "", "", "", "ng"],
        prefixes: &["mo", "po", "ti", "lo", "hi", "ma"],
        suffixes: &["lo", "mai", "yo", "wu", "limo"],
        borrowed: 0.15,
    },
];

pub fn language(code: &str) -> &'static LanguageSpec {
    LANGUAGES.iter().find(|l| l.code == code).expect("known language")
}

fn lang_seed(code: &str) -> u64 {
    code.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

fn pick<'a>(rng: &mut ChaCha8Rng, xs: &[&'a str]) -> &'a str {
    xs[rng.gen_range(0..xs.len())]
}

fn syllable(spec: &LanguageSpec, rng: &mut ChaCha8Rng, out: &mut String) {
    if rng.gen_bool(0.85) {
        out.push_str(pick(rng, spec.onsets));
    }
    out.push_str(pick(rng, spec.vowels));
    out.push_str(pick(rng, spec.codas));
}

/// A language's root lexicon plus a Zipf sampler over it.
pub struct Lexicon {
    pub spec: &'static LanguageSpec,
    roots: Vec<String>,
    cumulative: Vec<f64>,
}

pub const LEXICON_SIZE: usize = 12_000;

impl Lexicon {
    pub fn new(spec: &'static LanguageSpec) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(lang_seed(spec.code));
        let base = if spec.code == "ind" {
            None
        } else {
            Some(Lexicon::new(language("ind")))
        };
        let mut roots = Vec::with_capacity(LEXICON_SIZE);
        for rank in 0..LEXICON_SIZE {
            if let Some(ind) = &base {
                if rng.gen_bool(spec.borrowed) {
                    roots.push(ind.roots[rank].clone());
                    continue;
                }
            }
            let mut w = String::new();
            let syllables = if rank < 200 { rng.gen_range(1..=2) } else { rng.gen_range(2..=4) };
            for _ in 0..syllables {
                syllable(spec, &mut rng, &mut w);
            }
            roots.push(w);
        }
        let mut acc = 0.0;
        let cumulative = (0..LEXICON_SIZE)
            .map(|r| {
                acc += 1.0 / (r as f64 + 2.7).powf(1.05);
                acc
            })
            .collect();
        Lexicon {
            spec,
            roots,
            cumulative,
        }
    }

    fn root(&self, rng: &mut ChaCha8Rng) -> &str {
        let total = *self.cumulative.last().unwrap();
        let x = rng.gen::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c < x);
        &self.roots[i.min(self.roots.len() - 1)]
    }

    fn word(&self, rng: &mut ChaCha8Rng, out: &mut String) {
        if rng.gen_bool(0.3) {
            out.push_str(pick(rng, self.spec.prefixes));
        }
        out.push_str(self.root(rng));
        if rng.gen_bool(0.3) {
            out.push_str(pick(rng, self.spec.suffixes));
        }
    }

    /// One paragraph of 2–6 sentences.
    pub fn document(&self, rng: &mut ChaCha8Rng) -> String {
        let mut doc = String::new();
        for s in 0..rng.gen_range(2..=6) {
            if s > 0 {
                doc.push(' ');
            }
            let n = rng.gen_range(5..=16);
            for i in 0..n {
                if i > 0 {
                    doc.push(if rng.gen_bool(0.06) { ',' } else { ' ' });
                    if doc.ends_with(',') {
                        doc.push(' ');
                    }
                }
                let start = doc.len();
                self.word(rng, &mut doc);
                if i == 0 {
                    let first = doc[start..].chars().next().unwrap();
                    let upper: String = first.to_uppercase().collect();
                    doc.replace_range(start..start + first.len_utf8(), &upper);
                }
            }
            doc.push(if rng.gen_bool(0.1) { '?' } else { '.' });
        }
        doc
    }
}

/// Draws documents from `mix` (language code, weight) until about
/// `target_bytes` of text exist.
pub fn corpus(mix: &[(&str, f64)], target_bytes: usize, seed: u64) -> Vec<CorpusDocument> {
    let lexicons: Vec<Lexicon> = mix.iter().map(|(c, _)| Lexicon::new(language(c))).collect();
    let total: f64 = mix.iter().map(|(_, w)| w).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bytes = 0usize;
    let mut docs = Vec::new();
    while bytes < target_bytes {
        let mut x = rng.gen::<f64>() * total;
        let mut li = 0;
        while li + 1 < mix.len() && x >= mix[li].1 {
            x -= mix[li].1;
            li += 1;
        }
        let lex = &lexicons[li];
        let text = lex.document(&mut rng);
        bytes += text.len();
        let id = docs.len().to_string();
        docs.push(CorpusDocument::new(id, &text, lex.spec.code, "synthetic").unwrap());
    }
    docs
}

pub fn balanced_mix() -> Vec<(&'static str, f64)> {
    LANGUAGES.iter().map(|l| (l.code, 1.0)).collect()
}

/// 85% Indonesian, the rest spread over the other nine languages.
pub fn indonesian_dominant_mix() -> Vec<(&'static str, f64)> {
    LANGUAGES
        .iter()
        .map(|l| (l.code, if l.code == "ind" { 85.0 } else { 15.0 / 9.0 }))
        .collect()
}
