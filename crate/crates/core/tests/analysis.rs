mod common;

use common::*;
use hangulpiece::analysis::{compare_tokenizers, unk_ratio, unk_ratio_par, Variant};
use hangulpiece::corpus::{count_words, CorpusReader};
use hangulpiece::tokenizer::pre_tokenize;
use hangulpiece::vocab::{full_jamo_alphabet, GranularityLevel, Vocabulary};
use hangulpiece::{MatchMode, Tokenizer, TokenizerConfig};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sentences(rng: &mut impl Rng, n: usize) -> Vec<String> {
    (0..n)
        .map(|_| {
            let words: Vec<String> = (0..rng.gen_range(0..6))
                .map(|_| random_word(rng, &SYLLABLES, 5))
                .collect();
            let mut s = words.join(" ");
            if rng.gen_bool(0.3) {
                s.push('.');
            }
            s
        })
        .collect()
}

fn jamo_tokenizer() -> Tokenizer {
    let vocab = Vocabulary::with_specials(
        GranularityLevel::SubCharacter,
        full_jamo_alphabet().into_iter().map(|t| (t, 1)),
    )
    .unwrap();
    Tokenizer::new(vocab, TokenizerConfig::new(GranularityLevel::SubCharacter)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn counts_ignore_sentence_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let original = sentences(&mut rng, 40);
        let mut shuffled = original.clone();
        shuffled.shuffle(&mut rng);
        for level in [GranularityLevel::Character, GranularityLevel::SubCharacter] {
            prop_assert_eq!(count_words(&original, level), count_words(&shuffled, level));
        }
    }

    #[test]
    fn counts_conserve_words(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = sentences(&mut rng, 40);
        let emitted: usize = text.iter().map(|s| pre_tokenize(s).len()).sum();
        prop_assert_eq!(count_words(&text, GranularityLevel::Character).total(), emitted as u64);
    }

    #[test]
    fn unk_ratio_ignores_sentence_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tokens = random_pieces(&mut rng, &SYLLABLES, 20, 3);
        let tok = Tokenizer::new(vocab_with(GranularityLevel::Character, &tokens, &mut rng), TokenizerConfig::new(GranularityLevel::Character)).unwrap();
        let original = sentences(&mut rng, 60);
        let mut shuffled = original.clone();
        shuffled.shuffle(&mut rng);
        let a = unk_ratio(&original, &tok);
        prop_assert_eq!(&a, &unk_ratio(&shuffled, &tok));
        prop_assert_eq!(&a, &unk_ratio_par(&shuffled, &tok));
        prop_assert!(a.unk_tokens <= a.total_tokens);
        prop_assert!((0.0..=1.0).contains(&a.unk_ratio()));
    }

    #[test]
    fn full_jamo_alphabet_leaves_no_unknown_hangul(words in prop::collection::vec("[가-힣]{1,12}", 1..50)) {
        let stats = unk_ratio([words.join(" ")], &jamo_tokenizer());
        prop_assert_eq!(stats.unk_tokens, 0);
    }
}

#[test]
fn missing_syllable_shows_up_only_at_character_level() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let words: Vec<String> = (0..500).map(|_| random_hangul(&mut rng, 4)).collect();
    let missing = words[0].chars().next().unwrap();
    let mut tokens: Vec<String> = words
        .iter()
        .flat_map(|w| w.chars())
        .filter(|&c| c != missing)
        .flat_map(|c| [c.to_string(), format!("##{c}")])
        .collect();
    tokens.sort();
    tokens.dedup();
    let char_vocab = Vocabulary::with_specials(
        GranularityLevel::Character,
        tokens.into_iter().map(|t| (t, 1)),
    )
    .unwrap();
    let char_tok = Tokenizer::new(
        char_vocab,
        TokenizerConfig::new(GranularityLevel::Character),
    )
    .unwrap();
    let text = words.join(" ");
    assert!(unk_ratio([&text], &char_tok).unk_tokens >= 1);
    assert_eq!(unk_ratio([&text], &jamo_tokenizer()).unk_tokens, 0);
}

#[test]
fn stats_from_corpus_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.txt");
    std::fs::write(&path, "가다 가다. 힉!\n\n가다\n").unwrap();
    let vocab = Vocabulary::with_specials(
        GranularityLevel::Character,
        [("가다", 3), (".", 1), ("!", 1)],
    )
    .unwrap();
    let tok = Tokenizer::new(vocab, TokenizerConfig::new(GranularityLevel::Character)).unwrap();
    let text: Vec<String> = CorpusReader::from_paths(&[&path])
        .sentences()
        .map(Result::unwrap)
        .collect();
    let stats = unk_ratio(&text, &tok);
    assert_eq!(
        (stats.unk_tokens, stats.total_tokens, stats.total_words),
        (1, 6, 6)
    );
    assert_eq!(stats.record().ratio, 0.16667);
}

#[test]
fn comparison_of_levels() {
    let char_vocab = Vocabulary::with_specials(
        GranularityLevel::Character,
        [("냉장고", 1), ("춥", 1), ("##다", 1)],
    )
    .unwrap();
    let jamo_tokens: Vec<(String, u64)> = ["냉장고", "추", "##ㅂ다"]
        .iter()
        .map(|t| {
            let (cont, body) = hangulpiece::vocab::strip_marker(t);
            let body = hangulpiece::hangul::to_conjoining(body);
            (if cont { format!("##{body}") } else { body }, 1)
        })
        .collect();
    let jamo_vocab =
        Vocabulary::with_specials(GranularityLevel::SubCharacter, jamo_tokens).unwrap();
    let variants = [
        Variant::new(
            "char",
            Tokenizer::new(
                char_vocab,
                TokenizerConfig::new(GranularityLevel::Character),
            )
            .unwrap(),
        ),
        Variant::new(
            "subchar",
            Tokenizer::new(
                jamo_vocab,
                TokenizerConfig::new(GranularityLevel::SubCharacter)
                    .with_mode(MatchMode::Bidirectional),
            )
            .unwrap(),
        ),
    ];
    let rows = compare_tokenizers(&["냉장고", "춥다"], &variants);
    assert!(rows[0].agree);
    assert_eq!(rows[0].sequences[0].tokens, ["냉장고"]);
    assert!(!rows[1].agree);
    assert_eq!(rows[1].sequences[0].tokens, ["춥", "##다"]);
    assert_eq!(rows[1].sequences[1].tokens, ["추", "##\u{11B8}다"]);
    assert!(compare_tokenizers::<&str>(&[], &variants).is_empty());
}
