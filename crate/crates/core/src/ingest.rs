//! Post and user dump parsing plus cascade reconstruction.
//!
//! Both dumps are line-delimited JSON. Malformed lines never abort a parse;
//! they are collected as [`Diagnostic`]s with their 1-based line number so a
//! build report can surface them. Only an unreadable stream is fatal.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::BufRead;

use chrono::{DateTime, NaiveDate, SubsecRound, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("failed to read input stream: {0}")]
    Io(#[from] std::io::Error),
}

/// A non-fatal problem found while loading data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record: Option<String>,
    pub message: String,
}

impl Diagnostic {
    pub fn at_line(line: usize, message: impl Into<String>) -> Self {
        Self { line: Some(line), record: None, message: message.into() }
    }

    pub fn for_record(id: &str, message: impl Into<String>) -> Self {
        Self { line: None, record: Some(id.to_string()), message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PostKind {
    Original,
    Retweet,
    Comment,
}

/// Timestamps travel as `YYYY-MM-DDThh:mm:ssZ`. Offsets are accepted on input
/// and normalised to UTC; sub-second precision is truncated.
pub mod timestamp {
    use chrono::{DateTime, SubsecRound, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub const FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

    pub fn format(ts: &DateTime<Utc>) -> String {
        ts.format(FORMAT).to_string()
    }

    pub fn parse(s: &str) -> Result<DateTime<Utc>, chrono::ParseError> {
        DateTime::parse_from_rfc3339(s).map(|t| t.with_timezone(&Utc).trunc_subsecs(0))
    }

    pub fn serialize<S: Serializer>(ts: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(ts))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let raw = String::deserialize(d)?;
        parse(&raw).map_err(|e| serde::de::Error::custom(format!("bad timestamp {raw:?}: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    pub user_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_id: Option<String>,
    #[serde(with = "timestamp")]
    pub created_at: DateTime<Utc>,
    pub text: String,
    pub region: String,
    pub kind: PostKind,
}

impl Post {
    pub fn day(&self) -> NaiveDate {
        self.created_at.date_naive()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserProfile {
    pub id: String,
    pub screen_name: String,
    pub verified: bool,
    pub fans: u64,
    pub followees: u64,
    pub tweets: u64,
    pub has_bio: bool,
    pub has_avatar: bool,
    pub has_location: bool,
    pub has_gender: bool,
}

/// Wire form of a profile: counts are read signed so negative values can be
/// reported by field name instead of as a generic type error.
#[derive(Deserialize)]
struct RawUser {
    id: String,
    screen_name: String,
    verified: bool,
    fans: i64,
    followees: i64,
    tweets: i64,
    has_bio: bool,
    has_avatar: bool,
    has_location: bool,
    has_gender: bool,
}

impl TryFrom<RawUser> for UserProfile {
    type Error = String;

    fn try_from(raw: RawUser) -> Result<Self, String> {
        let count = |name: &str, v: i64| {
            u64::try_from(v).map_err(|_| format!("field `{name}` is negative ({v})"))
        };
        Ok(UserProfile {
            fans: count("fans", raw.fans)?,
            followees: count("followees", raw.followees)?,
            tweets: count("tweets", raw.tweets)?,
            id: raw.id,
            screen_name: raw.screen_name,
            verified: raw.verified,
            has_bio: raw.has_bio,
            has_avatar: raw.has_avatar,
            has_location: raw.has_location,
            has_gender: raw.has_gender,
        })
    }
}

/// Records that survived parsing, plus what was rejected along the way.
#[derive(Debug, Clone, Default)]
pub struct Parsed<T> {
    pub records: Vec<T>,
    pub diagnostics: Vec<Diagnostic>,
}

fn parse_lines<R, T, F>(reader: R, mut decode: F) -> Result<Parsed<T>, IngestError>
where
    R: BufRead,
    F: FnMut(&str) -> Result<(String, T), String>,
{
    let mut out = Parsed { records: Vec::new(), diagnostics: Vec::new() };
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        match decode(&line) {
            Ok((id, record)) => {
                if seen.insert(id.clone()) {
                    out.records.push(record);
                } else {
                    out.diagnostics
                        .push(Diagnostic::at_line(lineno, format!("duplicate id `{id}`; keeping first occurrence")));
                }
            }
            Err(msg) => out.diagnostics.push(Diagnostic::at_line(lineno, msg)),
        }
    }
    Ok(out)
}

/// Parses a posts dump, one JSON object per line.
pub fn parse_posts<R: BufRead>(reader: R) -> Result<Parsed<Post>, IngestError> {
    parse_lines(reader, |line| {
        let post: Post = serde_json::from_str(line).map_err(|e| e.to_string())?;
        match (post.kind, &post.parent_id) {
            (PostKind::Original, Some(_)) => {
                return Err(format!("post `{}` is original but has parent_id", post.id))
            }
            (PostKind::Retweet | PostKind::Comment, None) => {
                return Err(format!("post `{}` is not original but has no parent_id", post.id))
            }
            _ => {}
        }
        Ok((post.id.clone(), post))
    })
}

pub fn parse_users<R: BufRead>(reader: R) -> Result<Parsed<UserProfile>, IngestError> {
    parse_lines(reader, |line| {
        let raw: RawUser = serde_json::from_str(line).map_err(|e| e.to_string())?;
        let user = UserProfile::try_from(raw)?;
        Ok((user.id.clone(), user))
    })
}

/// A rooted retweet/comment tree for one suspected rumor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cascade {
    pub root_id: String,
    pub nodes: BTreeMap<String, Post>,
    /// Effective parent of every non-root node. Differs from `parent_id` only
    /// for orphans re-attached under the root.
    pub parent: BTreeMap<String, String>,
    pub depth: BTreeMap<String, usize>,
    pub max_depth: usize,
}

impl Cascade {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> &Post {
        &self.nodes[&self.root_id]
    }

    /// Children lists keyed by parent id, each sorted by id.
    pub fn children(&self) -> BTreeMap<&str, Vec<&str>> {
        let mut out: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (child, parent) in &self.parent {
            out.entry(parent.as_str()).or_default().push(child.as_str());
        }
        out
    }

    pub fn last_activity(&self) -> DateTime<Utc> {
        self.nodes.values().map(|p| p.created_at).max().unwrap_or(self.root().created_at)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CascadeSet {
    /// Ordered by root timestamp, then root id.
    pub cascades: Vec<Cascade>,
    pub diagnostics: Vec<Diagnostic>,
    pub dropped: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Resolution {
    Pending,
    Visiting,
    Attached { root: usize, depth: usize },
    Dropped,
}

/// Rebuilds one cascade per original post.
///
/// Orphans whose `root_id` names an original post are attached directly under
/// that root at depth 1; other orphans are dropped. Posts on a parent cycle,
/// and posts whose ancestry leads only into dropped posts, are dropped too.
/// Every decision is reported as a diagnostic. The result does not depend on
/// the order of `posts`.
pub fn build_cascades(posts: &[Post]) -> CascadeSet {
    let mut order: Vec<usize> = (0..posts.len()).collect();
    order.sort_by(|&a, &b| posts[a].id.cmp(&posts[b].id));

    let index: HashMap<&str, usize> = order.iter().map(|&i| (posts[i].id.as_str(), i)).collect();
    let mut diagnostics = Vec::new();

    // Effective parent per post: None for originals.
    let mut eff_parent: Vec<Option<usize>> = vec![None; posts.len()];
    let mut state = vec![Resolution::Pending; posts.len()];
    for &i in &order {
        let post = &posts[i];
        let Some(pid) = &post.parent_id else { continue };
        if let Some(&p) = index.get(pid.as_str()) {
            eff_parent[i] = Some(p);
            continue;
        }
        let root = post
            .root_id
            .as_deref()
            .and_then(|r| index.get(r).copied())
            .filter(|&r| posts[r].kind == PostKind::Original);
        match root {
            Some(r) => {
                eff_parent[i] = Some(r);
                diagnostics.push(Diagnostic::for_record(
                    &post.id,
                    format!("parent `{pid}` missing; attached under root `{}`", posts[r].id),
                ));
            }
            None => {
                state[i] = Resolution::Dropped;
                diagnostics.push(Diagnostic::for_record(
                    &post.id,
                    format!("parent `{pid}` missing and root unresolvable; dropped"),
                ));
            }
        }
    }

    for &start in &order {
        if state[start] != Resolution::Pending {
            continue;
        }
        let mut path: Vec<usize> = Vec::new();
        let mut cur = start;
        // Walk up until something already resolved, an original, or a cycle.
        let outcome = loop {
            match state[cur] {
                Resolution::Attached { root, depth } => break Resolution::Attached { root, depth },
                Resolution::Dropped => break Resolution::Dropped,
                Resolution::Visiting => {
                    let pos = path.iter().position(|&p| p == cur).expect("visiting node is on path");
                    let mut ids: Vec<&str> = path[pos..].iter().map(|&p| posts[p].id.as_str()).collect();
                    ids.sort_unstable();
                    for &p in &path[pos..] {
                        state[p] = Resolution::Dropped;
                        diagnostics.push(Diagnostic::for_record(
                            &posts[p].id,
                            format!("parent cycle through [{}]; dropped", ids.join(", ")),
                        ));
                    }
                    path.truncate(pos);
                    break Resolution::Dropped;
                }
                Resolution::Pending => {}
            }
            match eff_parent[cur] {
                None => {
                    state[cur] = Resolution::Attached { root: cur, depth: 0 };
                    break Resolution::Attached { root: cur, depth: 0 };
                }
                Some(p) => {
                    state[cur] = Resolution::Visiting;
                    path.push(cur);
                    cur = p;
                }
            }
        };
        // Unwind the path top-down.
        let mut parent_outcome = outcome;
        for &p in path.iter().rev() {
            parent_outcome = match parent_outcome {
                Resolution::Attached { root, depth } => Resolution::Attached { root, depth: depth + 1 },
                _ => {
                    diagnostics.push(Diagnostic::for_record(
                        &posts[p].id,
                        "ancestor chain does not reach an original post; dropped",
                    ));
                    Resolution::Dropped
                }
            };
            state[p] = parent_outcome;
        }
    }

    let mut grouped: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut dropped = 0;
    for &i in &order {
        match state[i] {
            Resolution::Attached { root, .. } => grouped.entry(root).or_default().push(i),
            _ => dropped += 1,
        }
    }

    let mut cascades: Vec<Cascade> = grouped
        .into_iter()
        .map(|(root, members)| {
            let mut nodes = BTreeMap::new();
            let mut parent = BTreeMap::new();
            let mut depth = BTreeMap::new();
            let mut max_depth = 0;
            for i in members {
                let post = &posts[i];
                let Resolution::Attached { depth: d, .. } = state[i] else { unreachable!() };
                max_depth = max_depth.max(d);
                depth.insert(post.id.clone(), d);
                if let Some(p) = eff_parent[i] {
                    let par = &posts[p];
                    parent.insert(post.id.clone(), par.id.clone());
                    if post.created_at < par.created_at {
                        diagnostics.push(Diagnostic::for_record(
                            &post.id,
                            format!("created before its parent `{}`", par.id),
                        ));
                    }
                    if let Some(r) = &post.root_id {
                        if r != &posts[root].id {
                            diagnostics.push(Diagnostic::for_record(
                                &post.id,
                                format!("declared root `{r}` differs from resolved root `{}`", posts[root].id),
                            ));
                        }
                    }
                }
                nodes.insert(post.id.clone(), post.clone());
            }
            Cascade { root_id: posts[root].id.clone(), nodes, parent, depth, max_depth }
        })
        .collect();
    cascades.sort_by(|a, b| {
        (a.root().created_at, &a.root_id).cmp(&(b.root().created_at, &b.root_id))
    });
    diagnostics.sort_by(|a, b| (&a.record, &a.message).cmp(&(&b.record, &b.message)));

    CascadeSet { cascades, diagnostics, dropped }
}

/// Current time truncated to whole seconds.
pub fn now_seconds() -> DateTime<Utc> {
    Utc::now().trunc_subsecs(0)
}
