//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Every check compares against an oracle written here, independently of the
//! code under test.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::f64::consts::TAU;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use rumorlens_core::aggregation::FilterSpec;
use rumorlens_core::features::{compute_influence, tf_idf, FeatureExtractor};
use rumorlens_core::ingest::{build_cascades, parse_posts, Parsed, Post, PostKind, UserProfile};
use rumorlens_core::layout::compute_layout;
use rumorlens_core::projection::{kl_divergence, kl_gradient, pairwise_affinities, tsne_embed, Embedding};
use rumorlens_core::svg::render_propagation;
use rumorlens_core::{EmbeddingConfig, Matrix, PropagationLayout};
use rumorlens_service::cache::{Lookup, Wait};
use rumorlens_service::synth::{generate, write_dump, SynthSpec};
use rumorlens_service::{build_dataset, load_dataset, Config, Dataset};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(elapsed < limit, || format!("{what} took {:.2}s, limit {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64()))
}

fn dataset_from(posts: Vec<Post>, users: Vec<UserProfile>, config: Config) -> Dataset {
    build_dataset(
        Parsed { records: posts, diagnostics: Vec::new() },
        Parsed { records: users, diagnostics: Vec::new() },
        config,
        Instant::now(),
    )
    .expect("dataset builds")
}

// ---------------------------------------------------------------- depth

fn depth_fidelity() -> Outcome {
    let start = Instant::now();
    let t0 = chrono::DateTime::from_timestamp(1_583_020_800, 0).unwrap();
    let mut posts = vec![Post {
        id: "root".into(),
        user_id: "u".into(),
        parent_id: None,
        root_id: None,
        created_at: t0,
        text: "police protest embassy".into(),
        region: "overseas".into(),
        kind: PostKind::Original,
    }];
    // a spine six retweets deep, with side branches on the way down
    let mut parent = "root".to_string();
    for depth in 1..=6 {
        for k in 0..(8 - depth) {
            let id = format!("d{depth}-{k}");
            posts.push(Post {
                id: id.clone(),
                user_id: "u".into(),
                parent_id: Some(parent.clone()),
                root_id: Some("root".into()),
                created_at: t0 + chrono::Duration::hours(depth as i64 * 5 + k as i64),
                text: "is this real".into(),
                region: "GD".into(),
                kind: PostKind::Retweet,
            });
        }
        parent = format!("d{depth}-0");
    }
    let ds = dataset_from(posts, Vec::new(), Config::default());
    let layout = ds.layout(0).map_err(|e| e.to_string())?;
    let svg = render_propagation(&*layout, &ds.config.colors);
    let doc = roxmltree::Document::parse(&svg).map_err(|e| e.to_string())?;
    let circles = doc.descendants().filter(|n| n.attribute("class") == Some("ring-boundary")).count();
    let elapsed = start.elapsed();
    ensure(ds.cascades[0].max_depth == 6, || format!("max depth {}", ds.cascades[0].max_depth))?;
    ensure(layout.rings.len() == 6, || format!("{} rings", layout.rings.len()))?;
    ensure(circles == 6, || format!("{circles} ring-boundary circles"))?;
    within(elapsed, Duration::from_secs(1), "depth fidelity")?;
    Ok(format!("6 rings, 6 ring-boundary circles, {:.0} ms", elapsed.as_secs_f64() * 1e3))
}

// ------------------------------------------------------------- geometry

fn random_cascade(seed: u64, nodes: usize) -> Dataset {
    let spec = SynthSpec { seed, days: 1 + (seed % 20) as i64, ..SynthSpec::small(1, nodes - 1, 30) };
    let data = generate(&spec);
    dataset_from(data.posts, data.users, Config::default())
}

fn check_layout(l: &PropagationLayout) -> Result<(), String> {
    const EPS: f64 = 1e-9;
    let mut prev = l.center.r;
    for ring in &l.rings {
        ensure(ring.r_inner >= prev - EPS && ring.r_outer > ring.r_inner, || format!("ring {} radii", ring.depth))?;
        ensure(ring.r_outer <= l.total_radius + EPS, || format!("ring {} leaves the disc", ring.depth))?;
        prev = ring.r_outer;
        if !ring.sectors.is_empty() {
            let closure: f64 = ring.sectors.iter().map(|s| s.theta_extent + l.gap_angle).sum();
            ensure((closure - TAU).abs() <= EPS, || format!("ring {} closure off by {:e}", ring.depth, closure - TAU))?;
        }
        for pair in ring.sectors.windows(2) {
            ensure(pair[0].theta_start + pair[0].theta_extent <= pair[1].theta_start + EPS, || {
                format!("ring {} sectors {} and {} overlap", ring.depth, pair[0].day, pair[1].day)
            })?;
        }
        for s in &ring.sectors {
            let (a0, a1) = (s.theta_start, s.theta_start + s.theta_extent);
            for c in &s.cells {
                ensure(
                    c.theta0 >= a0 - EPS && c.theta1 <= a1 + EPS && c.r0 >= ring.r_inner - EPS && c.r1 <= ring.r_outer + EPS,
                    || format!("cell {} escapes its sector", c.post_id),
                )?;
            }
            // sweep by start angle; only cells whose angular spans meet can overlap
            let mut cells: Vec<_> = s.cells.iter().collect();
            cells.sort_by(|a, b| a.theta0.total_cmp(&b.theta0));
            for (i, a) in cells.iter().enumerate() {
                for b in &cells[i + 1..] {
                    if b.theta0 >= a.theta1 - EPS {
                        break;
                    }
                    let dr = a.r1.min(b.r1) - a.r0.max(b.r0);
                    ensure(dr <= EPS, || format!("cells {} and {} overlap", a.post_id, b.post_id))?;
                }
            }
        }
    }
    Ok(())
}

fn geometry_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut cells = 0;
    for i in 0..200u64 {
        let nodes = if i == 0 { 10 } else if i == 1 { 2000 } else { rng.random_range(10..=2000) };
        let ds = random_cascade(1000 + i, nodes);
        ensure(ds.cascades[0].size() == nodes, || format!("cascade {i}: {} nodes", ds.cascades[0].size()))?;
        let first = ds.layout(0).map_err(|e| format!("cascade {i}: {e}"))?;
        check_layout(&first).map_err(|e| format!("cascade {i} ({nodes} nodes): {e}"))?;
        // a second, independent computation from the same inputs
        let extractor = FeatureExtractor {
            tokenizer: &ds.config.tokenizer(),
            scorer: &ds.config.scorer().unwrap(),
            taxonomy: &ds.config.taxonomy,
            max_keywords: 10,
        };
        let attrs = extractor.post_attributes(&ds.cascades[0]);
        let second = compute_layout(&ds.cascades[0], &attrs, 0.0, &ds.config.geometry.propagation).unwrap();
        let (a, b) = (serde_json::to_string(&*first).unwrap(), serde_json::to_string(&second).unwrap());
        ensure(a == b, || format!("cascade {i}: layouts differ between runs"))?;
        cells += first.cell_count();
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60), "geometry suite")?;
    Ok(format!("200 cascades, {cells} cells, closure <= 1e-9, no overlaps, {:.1}s", elapsed.as_secs_f64()))
}

// --------------------------------------------------------------- tf-idf

fn brute_tf_idf(corpus: &[Vec<String>], doc: usize, token: &str) -> f64 {
    let mut count = 0.0;
    for t in &corpus[doc] {
        if t == token {
            count += 1.0;
        }
    }
    let mut df = 0.0;
    for d in corpus {
        if d.iter().any(|t| t == token) {
            df += 1.0;
        }
    }
    let n = corpus.len() as f64;
    count / corpus[doc].len() as f64 * (((1.0 + n) / (1.0 + df)).ln() + 1.0)
}

fn tf_idf_oracle() -> Outcome {
    let text = std::fs::read_to_string(common::fixture("posts.jsonl")).unwrap();
    let posts = parse_posts(text.as_bytes()).unwrap().records;
    let tokenizer = Config::default().tokenizer();
    let corpus: Vec<Vec<String>> =
        posts.iter().filter(|p| p.kind == PostKind::Original).map(|p| tokenizer.tokenize(&p.text)).collect();
    ensure(corpus.len() == 5, || format!("{} documents", corpus.len()))?;
    let weights = tf_idf::<f64>(&corpus).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (d, kw) in weights.iter().enumerate() {
        let distinct: BTreeSet<&String> = corpus[d].iter().collect();
        ensure(kw.len() == distinct.len(), || format!("doc {d}: {} weights for {} tokens", kw.len(), distinct.len()))?;
        for (token, w) in kw {
            let diff = (w - brute_tf_idf(&corpus, d, token)).abs();
            worst = worst.max(diff);
            checked += 1;
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("{checked} weights, max deviation {worst:e}"))
}

// ------------------------------------------------------------ influence

fn influence_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..100u64 {
        let size = rng.random_range(1..1500);
        let spec = SynthSpec { seed: 500 + i, ..SynthSpec::small(1, size, 10) };
        let posts = generate(&spec).posts;
        // breadth-first search over raw parent links
        let mut children: HashMap<&str, Vec<&str>> = HashMap::new();
        for p in &posts {
            if let Some(parent) = &p.parent_id {
                children.entry(parent.as_str()).or_default().push(&p.id);
            }
        }
        let root = posts.iter().find(|p| p.parent_id.is_none()).unwrap().id.as_str();
        let mut queue = VecDeque::from([root]);
        let mut seen = 0u64;
        while let Some(node) = queue.pop_front() {
            for c in children.get(node).into_iter().flatten() {
                seen += 1;
                queue.push_back(c);
            }
        }
        let cascade = build_cascades(&posts).cascades.remove(0);
        let got = compute_influence(&cascade);
        ensure(got == seen, || format!("tree {i}: influence {got}, BFS {seen}"))?;
    }
    Ok("100 random trees match exactly".into())
}

// ----------------------------------------------------------------- t-sne

fn uniform_matrix(seed: u64, n: usize, d: usize) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = Uniform::new(-1.0, 1.0).unwrap();
    Matrix::from_rows(&(0..n).map(|_| (0..d).map(|_| u.sample(&mut rng)).collect()).collect::<Vec<Vec<f64>>>())
}

/// Perplexity `2^H` of row `i` under precision `beta`, computed with
/// log-sum-exp from raw coordinates.
fn realised_perplexity(x: &Matrix, i: usize, beta: f64) -> f64 {
    let logits: Vec<f64> = (0..x.rows())
        .filter(|&j| j != i)
        .map(|j| -beta * x.row(i).iter().zip(x.row(j)).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        .collect();
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = logits.iter().map(|l| (l - m).exp()).sum();
    let h: f64 = logits
        .iter()
        .map(|l| (l - m).exp() / z)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum();
    2f64.powf(h)
}

fn two_clusters(seed: u64) -> (Matrix, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let per = 40;
    let rows: Vec<Vec<f64>> = (0..2 * per)
        .map(|i| {
            let shift = if i < per { 0.0 } else { 10.0 / 8f64.sqrt() };
            (0..8).map(|_| shift + noise.sample(&mut rng)).collect()
        })
        .collect();
    (Matrix::from_rows(&rows), per)
}

fn separation(e: &Embedding<f64>, per: usize) -> (f64, f64) {
    let centroid = |pts: &[[f64; 2]]| {
        let n = pts.len() as f64;
        [pts.iter().map(|p| p[0]).sum::<f64>() / n, pts.iter().map(|p| p[1]).sum::<f64>() / n]
    };
    let dist = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let (a, b) = e.coords.split_at(per);
    let (ca, cb) = (centroid(a), centroid(b));
    let spread = (a.iter().map(|p| dist(*p, ca)).sum::<f64>() + b.iter().map(|p| dist(*p, cb)).sum::<f64>())
        / e.coords.len() as f64;
    (dist(ca, cb), spread)
}

fn tsne_suite() -> Outcome {
    let start = Instant::now();
    // (a) bandwidth search
    let mut worst_perp: f64 = 0.0;
    for (seed, perp) in [(1, 5.0), (2, 10.0), (3, 15.0), (4, 30.0), (5, 45.0)] {
        let x = uniform_matrix(seed, 50, 8);
        let aff = pairwise_affinities(&x, perp).map_err(|e| e.to_string())?;
        for i in 0..50 {
            worst_perp = worst_perp.max((realised_perplexity(&x, i, aff.betas[i]) - perp).abs());
        }
    }
    ensure(worst_perp <= 1e-4, || format!("(a) perplexity off by {worst_perp:e}"))?;

    // (b) gradient against central differences
    let mut worst_grad: f64 = 0.0;
    for seed in 0..5 {
        let x = uniform_matrix(10 + seed, 15, 8);
        let p = pairwise_affinities(&x, 5.0).unwrap().joint;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let y: Vec<[f64; 2]> = (0..15).map(|_| [normal.sample(&mut rng), normal.sample(&mut rng)]).collect();
        let g = kl_gradient(&p, &y, 1.0);
        let h = 1e-5;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..15 {
            for d in 0..2 {
                let (mut up, mut down) = (y.clone(), y.clone());
                up[i][d] += h;
                down[i][d] -= h;
                let fd = (kl_divergence(&p, &up) - kl_divergence(&p, &down)) / (2.0 * h);
                num += (fd - g[i][d]).powi(2);
                den += g[i][d].powi(2);
            }
        }
        worst_grad = worst_grad.max((num / den).sqrt());
    }
    ensure(worst_grad < 1e-4, || format!("(b) gradient relative error {worst_grad:e}"))?;

    // (c) two well separated clusters stay apart; (d) KL goes down
    let mut separated = 0;
    let mut decreased = 0;
    for seed in 0..10 {
        let (x, per) = two_clusters(seed);
        let e = tsne_embed(&x, &EmbeddingConfig { seed, ..Default::default() }).map_err(|e| e.to_string())?;
        let (inter, spread) = separation(&e, per);
        if inter > 3.0 * spread {
            separated += 1;
        }
        let r = tsne_embed(&uniform_matrix(100 + seed, 60, 8), &EmbeddingConfig { seed, ..Default::default() })
            .map_err(|e| e.to_string())?;
        if r.kl_trace.last() < r.kl_trace.first() {
            decreased += 1;
        }
    }
    ensure(separated >= 9, || format!("(c) separated in {separated}/10 seeds"))?;
    ensure(decreased >= 9, || format!("(d) KL decreased in {decreased}/10 seeds"))?;

    // (e) same seed, same bits
    for seed in [0, 7, 12345] {
        let x = uniform_matrix(200 + seed, 40, 8);
        let cfg = EmbeddingConfig { seed, ..Default::default() };
        let bits = |e: Embedding<f64>| e.coords.iter().flatten().map(|v| v.to_bits()).collect::<Vec<_>>();
        ensure(bits(tsne_embed(&x, &cfg).unwrap()) == bits(tsne_embed(&x, &cfg).unwrap()), || {
            format!("(e) seed {seed} not reproducible")
        })?;
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(180), "t-SNE suite")?;
    Ok(format!(
        "perplexity err {worst_perp:.1e}, grad rel err {worst_grad:.1e}, separated {separated}/10, KL down {decreased}/10, bitwise ok, {:.1}s",
        elapsed.as_secs_f64()
    ))
}

// ----------------------------------------------------------- aggregation

fn random_filter(rng: &mut ChaCha8Rng, ds: &Dataset) -> FilterSpec {
    let regions: Vec<&String> = ds.overview.known_regions().iter().collect();
    let topics: Vec<String> = ds.config.taxonomy.labels().map(String::from).collect();
    let ids: Vec<&String> = ds.cascades.iter().map(|c| &c.root_id).collect();
    let mut f = FilterSpec::default();
    if rng.random_bool(0.5) {
        f.regions = Some((0..rng.random_range(1..8)).map(|_| (*regions.choose(rng).unwrap()).clone()).collect());
    }
    if rng.random_bool(0.5) {
        f.topics = Some((0..rng.random_range(1..3)).map(|_| topics.choose(rng).unwrap().clone()).collect());
    }
    if rng.random_bool(0.2) {
        f.case_ids = Some((0..rng.random_range(1..10)).map(|_| (*ids.choose(rng).unwrap()).clone()).collect());
    }
    if rng.random_bool(0.5) {
        let base = chrono::DateTime::from_timestamp(1_579_478_400, 0).unwrap();
        let a = rng.random_range(0..60);
        f.time_from = Some(base + chrono::Duration::days(a));
        f.time_to = Some(base + chrono::Duration::days(a + rng.random_range(1..30)));
    }
    f
}

fn aggregation_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut filters = 0;
    for i in 0..50u64 {
        let cases = rng.random_range(1..120);
        let spec = SynthSpec {
            seed: 900 + i,
            overseas_share: rng.random_range(0.0..0.6),
            ..SynthSpec::small(cases, rng.random_range(0..cases * 20), 50)
        };
        let data = generate(&spec);
        let ds = dataset_from(data.posts, data.users, Config::default());
        for _ in 0..20 {
            let f = random_filter(&mut rng, &ds);
            let region_total: usize = ds.overview.region_counts(&f).unwrap().values().sum();
            let unregioned = ds.overview.filter_cases(&f.without_regions()).unwrap();
            ensure(region_total == unregioned.len(), || {
                format!("dataset {i}: region counts sum {region_total}, filter has {}", unregioned.len())
            })?;

            // independent daily histogram of the filtered roots
            let selected = ds.overview.filter_cases(&f).unwrap();
            let mut daily: BTreeMap<chrono::NaiveDate, usize> = BTreeMap::new();
            for id in &selected {
                let c = &ds.cascades[ds.case_index(id).unwrap()];
                *daily.entry(c.root().created_at.date_naive()).or_default() += 1;
            }
            let mut summed: BTreeMap<chrono::NaiveDate, usize> = BTreeMap::new();
            for s in ds.overview.topic_series(&f, 3).unwrap() {
                for p in s.points {
                    *summed.entry(p.day).or_default() += p.count;
                }
            }
            summed.retain(|_, c| *c > 0);
            ensure(summed == daily, || format!("dataset {i}: per-day topic sums differ from daily counts"))?;
            filters += 1;
        }
    }
    Ok(format!("50 datasets, {filters} filters, both identities hold"))
}

// ------------------------------------------------------------ reference scale

fn reference_scale() -> Outcome {
    let spec = SynthSpec::reference_scale();
    let data = generate(&spec);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (posts, users) = write_dump(&data, dir.path()).map_err(|e| e.to_string())?;

    let start = Instant::now();
    let ds = Arc::new(load_dataset(&posts, &users, Config::default()).map_err(|e| e.to_string())?);
    let build = start.elapsed();
    let r = &ds.report;
    ensure(r.posts_read == 936 + 80_000 && r.post_lines_rejected == 0, || format!("read {} posts", r.posts_read))?;
    ensure(r.cases == 936, || format!("{} cases", r.cases))?;
    ensure(r.descendants == 80_000, || format!("{} descendants", r.descendants))?;
    ensure(r.users_read == 53_843, || format!("{} users", r.users_read))?;
    ensure(r.posts_dropped == 0, || format!("{} posts dropped", r.posts_dropped))?;
    ensure(ds.overview.filter_cases(&FilterSpec::default()).unwrap().len() == 936, || "filter total".into())?;
    within(build, Duration::from_secs(60), "ingest + features + aggregates")?;

    let start = Instant::now();
    let lookup = ds.projection(&FilterSpec::default(), Wait::Always).unwrap().map_err(|e| e.to_string())?;
    let embed = start.elapsed();
    let Lookup::Ready(p) = lookup else { return Err("embedding did not finish".into()) };
    ensure(p.glyphs.len() == 936, || format!("{} points embedded", p.glyphs.len()))?;
    within(embed, Duration::from_secs(120), "936-point embedding")?;
    Ok(format!(
        "936 cases / 80000 descendants / 53843 users; build {:.1}s, embedding {:.1}s",
        build.as_secs_f64(),
        embed.as_secs_f64()
    ))
}

// ------------------------------------------------------------------- api

fn api_contract() -> Outcome {
    use common::schema;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let api = common::fixture_api(Config::default(), &dir.path().join("audit.jsonl"));
    let filter = common::enc(r#"{"regions":["overseas"]}"#);
    let ok: Vec<(String, fn(&serde_json::Value) -> Result<(), String>)> = vec![
        ("/api/regions".into(), schema::region_counts),
        (format!("/api/regions?filter={filter}"), schema::region_counts),
        ("/api/topics/series?k=3".into(), schema::topic_series),
        ("/api/cases".into(), schema::cases),
        (format!("/api/cases?filter={filter}"), schema::cases),
        ("/api/cases/A/propagation".into(), schema::propagation),
        ("/api/cases/A/histogram".into(), |v| schema::day_counts(v, "histogram")),
        ("/api/cases/A/cells?day=2020-03-02".into(), schema::cells),
        ("/api/posts?ids=B,D".into(), schema::posts),
        ("/api/config".into(), schema::config),
        ("/api/report".into(), schema::report),
    ];
    for (path, check) in &ok {
        let (status, v, body) = common::get(&api, path);
        ensure(status == 200, || format!("{path}: status {status}"))?;
        check(&v).map_err(|e| format!("{path}: {e}"))?;
        ensure(common::get(&api, path).2 == body, || format!("{path}: repeated body differs"))?;
    }
    let (_, posts, _) = common::get(&api, "/api/posts?ids=B,D");
    let depths: Vec<_> = posts.as_array().unwrap().iter().map(|p| p["depth"].as_u64()).collect();
    ensure(depths == [Some(1), Some(1)], || format!("posts B,D depths {depths:?}"))?;
    let (_, regions, _) = common::get(&api, "/api/regions");
    let total: u64 = regions.as_object().unwrap().values().filter_map(|v| v.as_u64()).sum();
    ensure(total == 5, || format!("region counts sum to {total}"))?;

    let errors = [
        ("/api/cases/missing/propagation", 404, None),
        ("/api/cases/missing/histogram", 404, None),
        ("/api/posts?ids=nope", 404, None),
        ("/api/regions?filter=%7B", 400, Some("filter")),
        ("/api/topics/series?k=-1", 400, Some("k")),
        ("/api/cases/A/cells?day=yesterday", 400, Some("day")),
        ("/api/posts", 400, Some("ids")),
    ];
    for (path, want, field) in errors {
        let (status, v, _) = common::get(&api, path);
        ensure(status == want, || format!("{path}: status {status}, want {want}"))?;
        schema::error(&v).map_err(|e| format!("{path}: {e}"))?;
        if let Some(f) = field {
            ensure(v["field"] == f, || format!("{path}: field {}", v["field"]))?;
        }
    }
    let verdict = api.handle(&rumorlens_service::Request {
        method: "POST",
        path: "/api/cases/A/verdict",
        query: None,
        body: br#"{"label":"approve","note":"confirmed"}"#,
    });
    ensure(verdict.status == 201, || format!("verdict status {}", verdict.status))?;
    schema::verdict(&verdict.json_value())?;
    Ok(format!("{} endpoints schema-valid and byte-stable, {} error paths", ok.len() + 1, errors.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("depth fidelity", depth_fidelity),
        ("geometry suite", geometry_suite),
        ("tf-idf oracle", tf_idf_oracle),
        ("influence oracle", influence_oracle),
        ("t-sne suite", tsne_suite),
        ("aggregation identities", aggregation_identities),
        ("reference-scale run", reference_scale),
        ("api contract", api_contract),
    ];
    // `cargo test -- <filter>` selects criteria by substring
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  {name:<24} {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<24} {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
