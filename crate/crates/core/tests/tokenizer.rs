mod support;

use std::sync::OnceLock;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use langadapt::tokenizer::{
    decode, encode, encode_bytes, fertility, train_bpe, TokenizerModel, DEFAULT_SPECIALS,
};
use langadapt::Error;
use support::{docs_from, naive_bpe, synth};

fn small_corpus(seed: u64, n_docs: usize) -> Vec<String> {
    let lex = synth::Lexicon::new(synth::language(["ind", "jav", "min"][seed as usize % 3]));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_docs).map(|_| lex.document(&mut rng)).collect()
}

fn train_fixture(seed: u64) -> TokenizerModel {
    let texts = small_corpus(seed, 300);
    train_bpe(&docs_from(&texts, "ind"), 900, &DEFAULT_SPECIALS, 0).unwrap()
}

fn trained(seed: u64) -> &'static TokenizerModel {
    static MODELS: OnceLock<Vec<TokenizerModel>> = OnceLock::new();
    &MODELS.get_or_init(|| (0..3).map(train_fixture).collect())[seed as usize]
}

#[test]
fn trainer_matches_naive_reference_on_several_corpora() {
    for seed in 0..4 {
        let texts = small_corpus(seed, 12);
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let specials: &[&str] = if seed % 2 == 0 { &DEFAULT_SPECIALS } else { &["<s>"] };
        let fast = train_bpe(&docs_from(&texts, "ind"), 420, specials, 0).unwrap();
        let naive = naive_bpe::train(&refs, 420, specials);
        assert_eq!(fast.pieces(), naive.pieces.as_slice(), "seed {seed}");
        assert_eq!(fast.merges(), naive.merges.as_slice(), "seed {seed}");
    }
}

#[test]
fn encoder_matches_merge_replay() {
    let model = trained(1);
    for text in small_corpus(7, 200) {
        assert_eq!(encode(model, &text), naive_bpe::replay_encode(model, text.as_bytes()));
    }
}

#[test]
fn training_is_reproducible() {
    let a = train_fixture(2);
    let b = train_fixture(2);
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.vocab_hash(), b.vocab_hash());
}

#[test]
fn thread_count_does_not_change_the_model() {
    let texts = small_corpus(3, 400);
    let docs = docs_from(&texts, "ind");
    let one = langadapt::par::with_threads(1, || train_bpe(&docs, 1000, &DEFAULT_SPECIALS, 0).unwrap());
    let four = langadapt::par::with_threads(4, || train_bpe(&docs, 1000, &DEFAULT_SPECIALS, 0).unwrap());
    assert_eq!(one, four);
    let f1 = langadapt::par::with_threads(1, || fertility(&one, &docs).unwrap());
    let f4 = langadapt::par::with_threads(4, || fertility(&one, &docs).unwrap());
    assert_eq!(f1, f4);
}

#[test]
fn vocabulary_layout() {
    let m = trained(0);
    assert_eq!(m.vocab_size(), 900);
    for (i, name) in DEFAULT_SPECIALS.iter().enumerate() {
        assert_eq!(m.special_tokens()[*name], i as u32);
    }
    for b in 0..=255u8 {
        assert_eq!(m.piece(m.byte_id(b)).unwrap(), &[b]);
    }
    let mut learned: Vec<&Vec<u8>> = m.pieces()[3..].iter().collect();
    learned.sort();
    learned.dedup();
    assert_eq!(learned.len(), m.vocab_size() - 3);
}

#[test]
fn specials_are_not_produced_by_encoding() {
    let m = trained(0);
    let ids = encode(m, "<pad> <eos>");
    assert!(ids.iter().all(|&id| !m.is_special(id)));
    assert_eq!(decode(m, &ids).unwrap(), "<pad> <eos>");
}

#[test]
fn decode_errors() {
    let m = trained(0);
    assert!(matches!(decode(m, &[0]), Err(Error::Parameter(_))));
    assert!(matches!(decode(m, &[900]), Err(Error::TokenRange { id: 900, .. })));
    let lone = m.byte_id(0xff);
    assert!(matches!(decode(m, &[lone]), Err(Error::Utf8(_))));
}

#[test]
fn model_file_roundtrip_and_rejection() {
    let m = trained(1);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tok.json");
    m.save(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, m.to_json());
    let back = TokenizerModel::load(&path).unwrap();
    assert_eq!(&back, m);
    assert_eq!(back.vocab_hash(), m.vocab_hash());

    let missing = dir.path().join("nope.json");
    let err = TokenizerModel::load(&missing).unwrap_err().to_string();
    assert!(err.contains("nope.json"), "{err}");

    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value["merges"][0] = serde_json::json!([0, 1]);
    assert!(TokenizerModel::from_json(&value.to_string()).is_err());
}

fn arbitrary_text() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            3 => "[a-z]{1,8}",
            1 => "[ \t\n]",
            1 => any::<char>().prop_map(|c| c.to_string()),
        ],
        0..40,
    )
    .prop_map(|parts| parts.concat())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn roundtrip(text in arbitrary_text()) {
        let m = trained(0);
        let ids = encode(m, &text);
        prop_assert_eq!(decode(m, &ids).unwrap(), text.clone());
        prop_assert!(ids.len() <= text.len());
        prop_assert_eq!(ids, naive_bpe::replay_encode(m, text.as_bytes()));
    }

    #[test]
    fn arbitrary_bytes_map_to_their_concatenation(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        let m = trained(2);
        let ids = encode_bytes(m, &bytes);
        let joined: Vec<u8> = ids.iter().flat_map(|&i| m.piece(i).unwrap().to_vec()).collect();
        prop_assert_eq!(joined, bytes);
    }
}

#[test]
fn random_unicode_roundtrip() {
    let m = trained(1);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..2000 {
        let len = rng.gen_range(0..64);
        let s: String = (0..len)
            .filter_map(|_| char::from_u32(rng.gen_range(0..0x11_0000)))
            .collect();
        assert_eq!(decode(m, &encode(m, &s)).unwrap(), s);
    }
}
