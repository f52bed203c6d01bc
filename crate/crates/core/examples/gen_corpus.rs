//! Writes a synthetic Korean corpus.
//!
//! ```text
//! cargo run --example gen_corpus -- <seed> <bytes> <output>
//! ```
//!
//! Output depends only on the seed and the size. Sentences are built from a
//! small lexicon: nouns with particles chosen by final consonant, and verb
//! stems inflected with jamo arithmetic (갑니다, 갔다, 먹었다, 간, 먹은).

use std::fs;
use std::process::ExitCode;

use hangulpiece::hangul::{compose_syllable, decompose_syllable, JamoTriple};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NOUNS: &[&str] = &[
    "사람",
    "학교",
    "친구",
    "선생님",
    "영화",
    "음악",
    "책",
    "집",
    "물",
    "밥",
    "나라",
    "도시",
    "바다",
    "하늘",
    "시간",
    "오늘",
    "내일",
    "어제",
    "아침",
    "저녁",
    "회사",
    "가게",
    "시장",
    "길",
    "차",
    "버스",
    "지하철",
    "공원",
    "강",
    "산",
    "나무",
    "꽃",
    "비",
    "눈",
    "바람",
    "날씨",
    "냉장고",
    "컴퓨터",
    "전화",
    "문제",
    "생각",
    "이야기",
    "마음",
    "사랑",
    "가족",
    "어머니",
    "아버지",
    "동생",
    "언니",
    "형",
    "누나",
    "오빠",
    "아이",
    "학생",
    "의사",
    "경찰",
    "요리",
    "음식",
    "김치",
    "커피",
    "우유",
    "빵",
    "과일",
    "사과",
    "포도",
    "수박",
    "고양이",
    "강아지",
    "새",
    "물고기",
    "방",
    "문",
    "창문",
    "의자",
    "책상",
    "신문",
    "잡지",
    "편지",
    "소식",
    "뉴스",
    "노래",
    "춤",
    "그림",
    "사진",
    "여행",
    "기차",
    "비행기",
    "공항",
    "호텔",
    "병원",
    "은행",
    "우체국",
    "도서관",
    "박물관",
    "시험",
    "숙제",
    "수업",
    "대학교",
    "회의",
    "일",
    "돈",
    "값",
    "옷",
    "신발",
    "모자",
    "가방",
    "우산",
    "시계",
    "휴대폰",
    "인터넷",
    "게임",
    "축구",
    "야구",
    "농구",
    "운동",
    "건강",
    "병",
    "약",
    "주말",
    "휴가",
    "봄",
    "여름",
    "가을",
    "겨울",
    "아침밥",
    "점심",
    "저녁밥",
    "부엌",
    "화장실",
    "거실",
    "마당",
    "뱃사람",
    "배",
    "섬",
    "항구",
    "바닷가",
    "모래",
    "파도",
    "구름",
    "별",
    "달",
    "해",
    "세상",
    "역사",
    "문화",
    "경제",
    "정치",
    "사회",
    "과학",
    "기술",
    "교육",
    "예술",
    "언어",
    "한국어",
    "영어",
    "단어",
    "문장",
    "글",
    "말",
    "목소리",
    "얼굴",
    "눈물",
    "웃음",
    "손",
    "발",
    "머리",
    "다리",
    "마을",
    "골목",
    "거리",
    "다리미",
    "냄비",
    "접시",
    "숟가락",
    "젓가락",
    "칼",
    "재미",
    "기분",
    "느낌",
];

/// (stem, is_descriptive)
const STEMS: &[(&str, bool)] = &[
    ("가", false),
    ("오", false),
    ("보", false),
    ("하", false),
    ("먹", false),
    ("읽", false),
    ("만나", false),
    ("사", false),
    ("자", false),
    ("타", false),
    ("앉", false),
    ("입", false),
    ("잡", false),
    ("찾", false),
    ("받", false),
    ("주", false),
    ("배우", false),
    ("가르치", false),
    ("마시", false),
    ("듣", false),
    ("쓰", false),
    ("살", false),
    ("놀", false),
    ("열", false),
    ("닫", false),
    ("기다리", false),
    ("만들", false),
    ("웃", false),
    ("울", false),
    ("걷", false),
    ("서", false),
    ("팔", false),
    ("좋", true),
    ("크", true),
    ("작", true),
    ("많", true),
    ("적", true),
    ("높", true),
    ("낮", true),
    ("길", true),
    ("짧", true),
    ("넓", true),
    ("좁", true),
    ("밝", true),
    ("맑", true),
    ("깊", true),
    ("춥", true),
    ("덥", true),
    ("쉽", true),
    ("어렵", true),
    ("재미있", true),
    ("맛있", true),
    ("예쁘", true),
    ("바쁘", true),
    ("아프", true),
    ("기쁘", true),
    ("슬프", true),
    ("조용하", true),
    ("깨끗하", true),
    ("따뜻하", true),
];

const ADVERBS: &[&str] = &[
    "정말",
    "아주",
    "너무",
    "조금",
    "많이",
    "빨리",
    "천천히",
    "같이",
    "다시",
    "항상",
    "가끔",
    "벌써",
    "아직",
    "이미",
    "곧",
    "잘",
    "못",
    "안",
    "제일",
    "더",
];

const LATIN: &[&str] = &[
    "OK", "TV", "PC", "SNS", "email", "Seoul", "K-pop", "app", "CEO", "AI",
];

const EMOTICONS: &[&str] = &["ㅋㅋ", "ㅋㅋㅋ", "ㅎㅎ", "ㅠㅠ", "ㅜㅜ", "^^", "♥"];

fn last_triple(word: &str) -> Option<JamoTriple> {
    word.chars().last().and_then(|c| decompose_syllable(c).ok())
}

fn has_final(word: &str) -> bool {
    last_triple(word).is_some_and(|t| t.has_trailing())
}

/// Replaces the final consonant of the last syllable; `word` must end in an open syllable.
fn with_final(word: &str, trailing: u8) -> String {
    let mut chars: Vec<char> = word.chars().collect();
    let last = chars.pop().expect("non-empty stem");
    let t = decompose_syllable(last).expect("syllable stem");
    let closed = JamoTriple::new(t.leading(), t.vowel(), trailing).expect("valid jamo indices");
    chars.push(compose_syllable(closed));
    chars.into_iter().collect()
}

const T_NIEUN: u8 = 4;
const T_RIEUL: u8 = 8;
const T_BIEUP: u8 = 17;
const T_SSANGSIOS: u8 = 20;
const V_A: u8 = 0;
const V_EO: u8 = 4;
const V_O: u8 = 8;

fn particle(noun: &str, rng: &mut impl Rng) -> String {
    let closed = has_final(noun);
    let choice = *[
        ("이", "가"),
        ("을", "를"),
        ("은", "는"),
        ("과", "와"),
        ("으로", "로"),
        ("에", "에"),
        ("에서", "에서"),
        ("도", "도"),
        ("의", "의"),
        ("만", "만"),
    ]
    .choose(rng)
    .expect("non-empty");
    let suffix = if closed { choice.0 } else { choice.1 };
    format!("{noun}{suffix}")
}

fn bright(stem: &str) -> bool {
    last_triple(stem).is_some_and(|t| t.vowel() == V_A || t.vowel() == V_O)
}

fn past(stem: &str) -> String {
    let t = last_triple(stem).expect("syllable stem");
    if stem.ends_with('하') {
        return format!("{}했", &stem[..stem.len() - '하'.len_utf8()]);
    }
    if !t.has_trailing() && (t.vowel() == V_A || t.vowel() == V_EO) {
        return with_final(stem, T_SSANGSIOS);
    }
    if bright(stem) {
        format!("{stem}았")
    } else {
        format!("{stem}었")
    }
}

fn inflect(stem: &str, descriptive: bool, rng: &mut impl Rng) -> String {
    let open = !has_final(stem);
    match rng.gen_range(0..9) {
        0 => format!("{stem}다"),
        1 if open => format!("{}니다", with_final(stem, T_BIEUP)),
        1 => format!("{stem}습니다"),
        2 => format!("{}다", past(stem)),
        3 => format!("{}어요", past(stem)),
        4 => format!("{stem}고"),
        5 => format!("{stem}지만"),
        6 if open => format!("{}데", with_final(stem, T_NIEUN)),
        6 => format!("{stem}는데"),
        7 if descriptive && open => with_final(stem, T_NIEUN),
        7 if descriptive => format!("{stem}은"),
        7 if open => with_final(stem, T_RIEUL),
        7 => format!("{stem}을"),
        _ => format!("{stem}면"),
    }
}

/// A noun no lexicon entry uses: one or two random syllables.
fn rare_noun(rng: &mut impl Rng) -> String {
    let len = rng.gen_range(1..=2);
    (0..len)
        .map(|_| char::from_u32(0xAC00 + rng.gen_range(0..11_172)).expect("syllable range"))
        .collect()
}

fn sentence(rng: &mut impl Rng) -> String {
    let mut words = Vec::new();
    if rng.gen_bool(0.2) {
        words.push(ADVERBS.choose(rng).expect("non-empty").to_string());
    }
    for _ in 0..rng.gen_range(1..=3) {
        let noun = if rng.gen_bool(0.03) {
            rare_noun(rng)
        } else if rng.gen_bool(0.02) {
            LATIN.choose(rng).expect("non-empty").to_string()
        } else {
            NOUNS.choose(rng).expect("non-empty").to_string()
        };
        if rng.gen_bool(0.85) {
            words.push(particle(&noun, rng));
        } else {
            words.push(noun);
        }
    }
    if rng.gen_bool(0.3) {
        words.push(ADVERBS.choose(rng).expect("non-empty").to_string());
    }
    let (stem, descriptive) = *STEMS.choose(rng).expect("non-empty");
    words.push(inflect(stem, descriptive, rng));
    if rng.gen_bool(0.05) {
        words.insert(
            rng.gen_range(0..words.len()),
            format!("{}개", rng.gen_range(1..100)),
        );
    }
    let mut text = words.join(" ");
    text.push_str([".", ".", ".", "?", "!", "..."][rng.gen_range(0..6)]);
    if rng.gen_bool(0.05) {
        text.push(' ');
        text.push_str(EMOTICONS.choose(rng).expect("non-empty"));
    }
    text
}

fn generate(seed: u64, bytes: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::with_capacity(bytes + 256);
    while out.len() < bytes {
        let sentences = rng.gen_range(1..=6);
        let line: Vec<String> = (0..sentences).map(|_| sentence(&mut rng)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
        if rng.gen_bool(0.1) {
            out.push('\n');
        }
    }
    out
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [seed, bytes, path] = args.as_slice() else {
        eprintln!("usage: gen_corpus <seed> <bytes> <output>");
        return ExitCode::FAILURE;
    };
    let (Ok(seed), Ok(bytes)) = (seed.parse::<u64>(), bytes.parse::<usize>()) else {
        eprintln!("seed and bytes must be integers");
        return ExitCode::FAILURE;
    };
    if let Err(err) = fs::write(path, generate(seed, bytes)) {
        eprintln!("writing {path}: {err}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
