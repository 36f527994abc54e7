#![allow(dead_code)]

pub mod naive_bpe;
pub mod oracles;
pub mod synth;

use langadapt::corpus::CorpusDocument;

pub fn docs_from(texts: &[String], language: &str) -> Vec<CorpusDocument> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| CorpusDocument::new(i.to_string(), t, language, "test").unwrap())
        .collect()
}
