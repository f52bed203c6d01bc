mod common;

use std::cmp::Ordering;
use std::collections::HashSet;

use common::*;
use hangulpiece::hangul::{decompose_text, is_syllable};
use hangulpiece::tokenizer::{
    compare_candidates, compat_display, detokenize, detokenize_display, select_candidate,
    wordpiece_backward, wordpiece_forward, Choice, ScoreStrategy, Segmentation,
};
use hangulpiece::vocab::{full_jamo_alphabet, GranularityLevel, Vocabulary};
use hangulpiece::{MatchMode, Tokenizer, TokenizerConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn texts(seg: &Segmentation, units: &[char]) -> Option<Vec<String>> {
    seg.pieces().map(|pieces| {
        pieces
            .iter()
            .map(|p| piece(units, p.units.start, p.units.end))
            .collect()
    })
}

fn char_config() -> TokenizerConfig {
    TokenizerConfig::new(GranularityLevel::Character)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn forward_is_greedy_longest_match(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tokens = random_pieces(&mut rng, &SYLLABLES, 12, 4);
        let vocab = vocab_with(GranularityLevel::Character, &tokens, &mut rng);
        let set = token_set(&vocab);
        for _ in 0..20 {
            let units: Vec<char> = random_word(&mut rng, &SYLLABLES, 8).chars().collect();
            let ours = wordpiece_forward(&units, &vocab, &char_config());
            prop_assert_eq!(texts(&ours, &units), brute_forward(&units, &set));
        }
    }

    #[test]
    fn backward_is_greedy_longest_suffix(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tokens = random_pieces(&mut rng, &SYLLABLES, 12, 4);
        let vocab = vocab_with(GranularityLevel::Character, &tokens, &mut rng);
        let set = token_set(&vocab);
        for _ in 0..20 {
            let units: Vec<char> = random_word(&mut rng, &SYLLABLES, 8).chars().collect();
            let ours = wordpiece_backward(&units, &vocab, &char_config());
            prop_assert_eq!(texts(&ours, &units), brute_backward(&units, &set));
        }
    }

    #[test]
    fn backward_mirrors_forward_on_symmetric_vocab(seed in any::<u64>()) {
        // Closed under reversal and with every body present in both marker
        // forms, so reading right to left is forward matching on the reversed word.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bodies = HashSet::new();
        for _ in 0..10 {
            let body = random_word(&mut rng, &SYLLABLES[..4], 4);
            bodies.insert(body.chars().rev().collect::<String>());
            bodies.insert(body);
        }
        let tokens: Vec<String> = bodies.iter().flat_map(|b| [b.clone(), format!("##{b}")]).collect();
        let vocab = vocab_with(GranularityLevel::Character, &tokens, &mut rng);
        for _ in 0..20 {
            let units: Vec<char> = random_word(&mut rng, &SYLLABLES[..4], 8).chars().collect();
            let reversed: Vec<char> = units.iter().rev().copied().collect();
            let backward = wordpiece_backward(&units, &vocab, &char_config());
            let forward = wordpiece_forward(&reversed, &vocab, &char_config());
            let mirrored = forward.pieces().map(|pieces| {
                pieces.iter().rev().map(|p| units.len() - p.units.end..units.len() - p.units.start).collect::<Vec<_>>()
            });
            let ours = backward.pieces().map(|pieces| pieces.iter().map(|p| p.units.clone()).collect::<Vec<_>>());
            prop_assert_eq!(ours, mirrored);
        }
    }

    #[test]
    fn segmentation_is_lossless(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tokens = unit_closure(&SYLLABLES);
        tokens.extend(random_pieces(&mut rng, &SYLLABLES, 10, 3));
        tokens.sort();
        tokens.dedup();
        let char_vocab = vocab_with(GranularityLevel::Character, &tokens, &mut rng);
        let words: Vec<String> = (0..20).map(|_| random_hangul(&mut rng, 6)).collect();
        let jamo_vocab = subchar_vocab(&mut rng, &words, 30);
        for mode in MatchMode::ALL {
            let char_tok = Tokenizer::new(char_vocab.clone(), char_config().with_mode(mode)).unwrap();
            let jamo_tok = Tokenizer::new(
                jamo_vocab.clone(),
                TokenizerConfig::new(GranularityLevel::SubCharacter).with_mode(mode),
            ).unwrap();
            for _ in 0..10 {
                let word = random_word(&mut rng, &SYLLABLES, 8);
                let t = char_tok.tokenize(&word);
                prop_assert_eq!(t.unknown_count(), 0);
                prop_assert_eq!(detokenize(t.texts(), GranularityLevel::Character), word);
            }
            for word in &words {
                let t = jamo_tok.tokenize(word);
                prop_assert_eq!(t.unknown_count(), 0);
                prop_assert!(t.tokens.iter().all(|tok| !tok.text.chars().any(is_syllable)));
                prop_assert_eq!(&detokenize(t.texts(), GranularityLevel::SubCharacter), word);
                let shown: Vec<String> = t.tokens.iter().map(|tok| compat_display(&tok.text)).collect();
                prop_assert_eq!(&detokenize_display(&shown, GranularityLevel::SubCharacter), word);
            }
        }
    }

    #[test]
    fn bidirectional_choice_dominates_and_ignores_scale(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tokens = random_pieces(&mut rng, &SYLLABLES[..4], 16, 3);
        let vocab = vocab_with(GranularityLevel::Character, &tokens, &mut rng);
        let scaled: Vec<Vocabulary> = [2u64, 10, 1000]
            .iter()
            .map(|&k| {
                let mut v = vocab.clone();
                for e in vocab.entries() {
                    v.set_frequency(&e.token, e.frequency * k);
                }
                v
            })
            .collect();
        let scorer = ScoreStrategy::MeanLog;
        for _ in 0..20 {
            let units: Vec<char> = random_word(&mut rng, &SYLLABLES[..4], 8).chars().collect();
            let fw = wordpiece_forward(&units, &vocab, &char_config());
            let bw = wordpiece_backward(&units, &vocab, &char_config());
            let choice = select_candidate(&fw, &bw, &vocab, &scorer);
            if fw == bw {
                prop_assert_eq!(choice, Choice::Same);
            }
            if let (Some(f), Some(b)) = (fw.pieces(), bw.pieces()) {
                let order = compare_candidates(f, b, &vocab, &scorer);
                match choice {
                    Choice::Forward => prop_assert_ne!(order, Ordering::Less),
                    Choice::Backward => prop_assert_ne!(order, Ordering::Greater),
                    Choice::Same => prop_assert_eq!(f, b),
                }
            }
            for v in &scaled {
                prop_assert_eq!(select_candidate(&fw, &bw, v, &scorer), choice);
            }
        }
    }

    #[test]
    fn hangul_words_never_unknown_with_full_jamo_alphabet(word in "[가-힣]{1,30}") {
        let vocab = Vocabulary::with_specials(
            GranularityLevel::SubCharacter,
            full_jamo_alphabet().into_iter().map(|t| (t, 1)),
        ).unwrap();
        for mode in MatchMode::ALL {
            let tok = Tokenizer::new(vocab.clone(), TokenizerConfig::new(GranularityLevel::SubCharacter).with_mode(mode)).unwrap();
            let t = tok.tokenize(&word);
            prop_assert_eq!(t.unknown_count(), 0);
            prop_assert_eq!(t.len(), decompose_text(&word).chars().count());
        }
    }

    #[test]
    fn tokenization_is_deterministic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tokens = random_pieces(&mut rng, &SYLLABLES, 20, 3);
        let vocab = vocab_with(GranularityLevel::Character, &tokens, &mut rng);
        let lines: Vec<String> = (0..30)
            .map(|_| (0..rng.gen_range(0..5)).map(|_| random_word(&mut rng, &SYLLABLES, 5)).collect::<Vec<_>>().join(" "))
            .collect();
        let tok = Tokenizer::new(vocab, char_config().with_mode(MatchMode::Bidirectional)).unwrap();
        let batch = tok.tokenize_batch(&lines);
        for (line, out) in lines.iter().zip(&batch) {
            prop_assert_eq!(&tok.tokenize(line), out);
        }
        prop_assert_eq!(tok.tokenize_batch(&lines), batch);
    }
}

#[test]
fn spans_cover_the_source_words() {
    let vocab = Vocabulary::with_specials(
        GranularityLevel::Character,
        [("냉장고", 1), ("춥", 1), ("##다", 1), (".", 1)],
    )
    .unwrap();
    let tok = Tokenizer::new(vocab, char_config()).unwrap();
    let text = "냉장고  춥다.";
    let t = tok.tokenize(text);
    assert_eq!(t.texts(), ["냉장고", "춥", "##다", "."]);
    let spans: Vec<&str> = t.tokens.iter().map(|tok| &text[tok.span()]).collect();
    assert_eq!(spans, ["냉장고", "춥", "다", "."]);
    assert_eq!(
        t.tokens.iter().map(|tok| tok.word).collect::<Vec<_>>(),
        [0, 1, 1, 2]
    );
}

#[test]
fn greedy_matching_is_not_monotone_in_vocabulary() {
    // Adding a token can send greedy matching down a dead end.
    let before =
        Vocabulary::with_specials(GranularityLevel::Character, [("가", 1), ("##나다", 1)]).unwrap();
    let mut after = before.clone();
    after.augment(["가나"]);
    let unk = |v: &Vocabulary| {
        Tokenizer::new(v.clone(), char_config())
            .unwrap()
            .tokenize("가나다")
            .unknown_count()
    };
    assert_eq!(unk(&before), 0);
    assert_eq!(unk(&after), 1);
}
