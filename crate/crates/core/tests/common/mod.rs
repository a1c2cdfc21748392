#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, VecDeque};

use chrono::{Duration, TimeZone, Utc};
use rand::Rng;
use rumorlens_core::features::{PostAttrs, SentimentLabel};
use rumorlens_core::ingest::{Post, PostKind};

pub fn post(id: &str, parent: Option<&str>, minutes: i64) -> Post {
    Post {
        id: id.into(),
        user_id: format!("u-{id}"),
        parent_id: parent.map(Into::into),
        root_id: None,
        created_at: Utc.with_ymd_and_hms(2020, 3, 1, 0, 0, 0).unwrap() + Duration::minutes(minutes),
        text: String::new(),
        region: "HB".into(),
        kind: if parent.is_some() { PostKind::Retweet } else { PostKind::Original },
    }
}

/// One random cascade of `n` posts: each non-root picks a uniformly random
/// earlier post as parent and is stamped within `days` days of the root.
pub fn random_cascade<R: Rng>(rng: &mut R, prefix: &str, n: usize, days: i64) -> Vec<Post> {
    let mut posts = vec![post(&format!("{prefix}-0"), None, 0)];
    for i in 1..n {
        let parent = format!("{prefix}-{}", rng.random_range(0..i));
        let minutes = rng.random_range(0..(days * 24 * 60).max(1));
        let mut p = post(&format!("{prefix}-{i}"), Some(&parent), minutes);
        p.text = "w ".repeat(rng.random_range(0..30));
        posts.push(p);
    }
    posts
}

/// Breadth-first depths from `root` over raw parent links.
pub fn bfs_depths(posts: &[Post], root: &str) -> HashMap<String, usize> {
    let mut children: HashMap<&str, Vec<&str>> = HashMap::new();
    for p in posts {
        if let Some(par) = &p.parent_id {
            children.entry(par.as_str()).or_default().push(p.id.as_str());
        }
    }
    let mut out = HashMap::from([(root.to_string(), 0)]);
    let mut queue = VecDeque::from([root]);
    while let Some(cur) = queue.pop_front() {
        for &c in children.get(cur).into_iter().flatten() {
            out.insert(c.to_string(), out[cur] + 1);
            queue.push_back(c);
        }
    }
    out
}

pub fn uniform_attrs<'a, I: IntoIterator<Item = &'a Post>>(posts: I) -> BTreeMap<String, PostAttrs> {
    posts
        .into_iter()
        .map(|p| {
            let words = p.text.split_whitespace().count();
            let score = ((words % 7) as f64 - 3.0) / 3.0;
            (
                p.id.clone(),
                PostAttrs { word_count: words, sentiment: SentimentLabel::from_score(score, 0.1), keyword: Some(format!("k{words}")) },
            )
        })
        .collect()
}
