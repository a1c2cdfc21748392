//! Synthetic dumps with controllable size, for demos and scale tests.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, LogNormal, Pareto};
use rumorlens_core::aggregation::{OVERSEAS, PROVINCE_CODES};
use rumorlens_core::ingest::{Post, PostKind, UserProfile};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub cases: usize,
    /// Total retweets and comments across all cases.
    pub descendants: usize,
    pub users: usize,
    pub days: i64,
    pub start: DateTime<Utc>,
    pub seed: u64,
    pub overseas_share: f64,
    pub comment_share: f64,
    /// Depth at which new posts stop attaching deeper.
    pub depth_cap: usize,
}

impl SynthSpec {
    /// The size of the reference dataset: 936 cases, 80,000 reposts and
    /// comments, 53,843 users.
    pub fn reference_scale() -> Self {
        Self { cases: 936, descendants: 80_000, users: 53_843, ..Self::small(0, 0, 0) }
    }

    pub fn small(cases: usize, descendants: usize, users: usize) -> Self {
        Self {
            cases,
            descendants,
            users,
            days: 75,
            start: Utc.with_ymd_and_hms(2020, 1, 20, 0, 0, 0).unwrap(),
            seed: 2020,
            overseas_share: 0.15,
            comment_share: 0.15,
            depth_cap: 8,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SynthData {
    pub posts: Vec<Post>,
    pub users: Vec<UserProfile>,
}

const TOPIC_WORDS: [&[&str]; 4] = [
    &["election", "protest", "police", "president", "embassy", "america", "demonstration", "美国", "警察", "游行"],
    &["virus", "vaccine", "covid", "epidemic", "hospital", "mask", "infection", "疫情", "病毒", "口罩"],
    &["stock", "bank", "price", "market", "money", "economy", "股市", "银行", "价格"],
    &["school", "accident", "traffic", "community", "fire", "earthquake", "学校", "事故", "社区"],
];
const FILLER: [&str; 16] = [
    "city", "people", "report", "today", "news", "said", "video", "friend", "share", "official", "claim", "reply",
    "night", "消息", "朋友", "视频",
];
const TONE: [&str; 10] = ["good", "hope", "safe", "thanks", "fake", "panic", "danger", "fear", "lie", "谣言"];

fn sentence(rng: &mut ChaCha8Rng, topic: Option<usize>, len: usize) -> String {
    (0..len)
        .map(|_| {
            let roll: f64 = rng.random();
            let pool: &[&str] = match topic {
                Some(t) if roll < 0.4 => TOPIC_WORDS[t],
                _ if roll < 0.55 => &TONE,
                _ => &FILLER,
            };
            *pool.choose(rng).expect("non-empty pool")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Splits `total` into `parts` heavy-tailed non-negative sizes that sum to it exactly.
fn case_sizes(rng: &mut ChaCha8Rng, parts: usize, total: usize) -> Vec<usize> {
    if parts == 0 {
        return Vec::new();
    }
    let pareto = Pareto::new(1.0_f64, 1.3).expect("valid pareto");
    let weights: Vec<f64> = (0..parts).map(|_| pareto.sample(rng).min(400.0)).collect();
    let sum: f64 = weights.iter().sum();
    let mut sizes: Vec<usize> = weights.iter().map(|w| (w / sum * total as f64).floor() as usize).collect();
    let mut left = total - sizes.iter().sum::<usize>();
    let mut i = 0;
    while left > 0 {
        sizes[i % parts] += 1;
        left -= 1;
        i += 1;
    }
    sizes
}

pub fn generate(spec: &SynthSpec) -> SynthData {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let fans = LogNormal::new(5.0, 2.0).expect("valid lognormal");
    let followees = LogNormal::new(5.0, 1.0).expect("valid lognormal");
    let tweets = LogNormal::new(6.0, 1.5).expect("valid lognormal");
    let users: Vec<UserProfile> = (0..spec.users)
        .map(|i| UserProfile {
            id: format!("u{i}"),
            screen_name: format!("user_{i}"),
            verified: rng.random_bool(0.1),
            fans: fans.sample(&mut rng) as u64,
            followees: followees.sample(&mut rng) as u64,
            tweets: tweets.sample(&mut rng) as u64,
            has_bio: rng.random_bool(0.6),
            has_avatar: rng.random_bool(0.85),
            has_location: rng.random_bool(0.5),
            has_gender: rng.random_bool(0.7),
        })
        .collect();
    let user_id = |rng: &mut ChaCha8Rng| format!("u{}", rng.random_range(0..spec.users.max(1)));
    let region = |rng: &mut ChaCha8Rng| {
        if rng.random_bool(spec.overseas_share) {
            OVERSEAS.to_string()
        } else {
            PROVINCE_CODES.choose(rng).expect("provinces").to_string()
        }
    };

    let sizes = case_sizes(&mut rng, spec.cases, spec.descendants);
    let delay = Exp::new(1.0 / (8.0 * 3600.0)).expect("valid exp");
    let mut posts = Vec::with_capacity(spec.cases + spec.descendants);
    for (c, &size) in sizes.iter().enumerate() {
        let topic = if rng.random_bool(0.85) { Some(rng.random_range(0..TOPIC_WORDS.len())) } else { None };
        let root_id = format!("c{c:04}");
        let created = spec.start + Duration::seconds(rng.random_range(0..spec.days * 86_400));
        let len = rng.random_range(8..24);
        posts.push(Post {
            id: root_id.clone(),
            user_id: user_id(&mut rng),
            parent_id: None,
            root_id: None,
            created_at: created,
            text: sentence(&mut rng, topic, len),
            region: region(&mut rng),
            kind: PostKind::Original,
        });
        // (id, time, depth) of posts that may be reposted further
        let mut open: Vec<(String, DateTime<Utc>, usize)> = vec![(root_id.clone(), created, 0)];
        for j in 0..size {
            let parent = if rng.random_bool(0.45) { &open[0] } else { open.choose(&mut rng).expect("root is open") };
            let parent = if parent.2 >= spec.depth_cap { open[0].clone() } else { parent.clone() };
            let id = format!("{root_id}-{j}");
            let at = parent.1 + Duration::seconds(delay.sample(&mut rng) as i64);
            let kind = if rng.random_bool(spec.comment_share) { PostKind::Comment } else { PostKind::Retweet };
            let len = rng.random_range(0..12);
            posts.push(Post {
                id: id.clone(),
                user_id: user_id(&mut rng),
                parent_id: Some(parent.0.clone()),
                root_id: Some(root_id.clone()),
                created_at: at,
                text: sentence(&mut rng, topic, len),
                region: region(&mut rng),
                kind,
            });
            if kind == PostKind::Retweet {
                open.push((id, at, parent.2 + 1));
            }
        }
    }
    SynthData { posts, users }
}

fn write_lines<T: serde::Serialize>(path: &Path, items: &[T]) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Writes `posts.jsonl` and `users.jsonl` into `dir`.
pub fn write_dump(data: &SynthData, dir: &Path) -> std::io::Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let (p, u) = (dir.join("posts.jsonl"), dir.join("users.jsonl"));
    write_lines(&p, &data.posts)?;
    write_lines(&u, &data.users)?;
    Ok((p, u))
}
