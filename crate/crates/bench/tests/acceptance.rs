//! Acceptance suite: reruns every headline experiment at full scale and the
//! property checks that stand in for the learned-student results. Prints one
//! PASS/FAIL line per criterion and exits nonzero if any fails.
//!
//! Positional arguments select criteria by id prefix (`1`, `5b`, ...).
//! Campaign progress goes to stderr.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::process::ExitCode;
use std::time::Instant;

use curriculum::stats::{em_fit, EmConfig, KdTree};
use curriculum::teachers::riac::{RegionRecord, RegionTree};
use curriculum::teachers::{AlpGmm, GmmTeacherConfig, Riac, RiacConfig};
use curriculum::toyenv::{ToySpace, ToySpaceConfig};
use curriculum::{
    build_teacher, ParameterSpace, ProposalSource, Teacher, TeacherKind, TeacherParams,
    TeacherSession,
};
use curriculum_bench::bridge::{Bridge, ClientMessage, ServerMessage};
use curriculum_bench::{presets, run_campaign, ExperimentConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use TeacherKind::{AlpGmm as Alp, CovarGmm as Covar, Random as Rnd, Riac as Ri};

/// Slack for comparing medians of cell fractions that are exact ratios.
const EPS: f64 = 1e-9;

type Outcome = (bool, String);
type Check<'a> = (&'static str, &'static str, Box<dyn Fn() -> Outcome + 'a>);

#[derive(Default)]
struct Campaigns {
    cache: RefCell<HashMap<(String, TeacherKind, u64), f64>>,
}

impl Campaigns {
    /// Final median unlocked fraction of a preset run with `teacher` at
    /// `budget`, all other settings as in the preset.
    fn median(&self, preset: &str, teacher: TeacherKind, budget: u64) -> f64 {
        let key = (preset.to_string(), teacher, budget);
        if let Some(m) = self.cache.borrow().get(&key) {
            return *m;
        }
        let mut cfg: ExperimentConfig = presets::find(preset).unwrap().config().unwrap();
        cfg.teacher = teacher;
        cfg.budget = budget;
        cfg.eval_every = budget;
        let start = Instant::now();
        let result = run_campaign(&cfg).unwrap();
        let m = result.final_median();
        eprintln!(
            "  {preset} {teacher} {budget} x{}: median {:.2}% ({:.0?})",
            cfg.repeats,
            100.0 * m,
            start.elapsed()
        );
        self.cache.borrow_mut().insert(key, m);
        m
    }
}

fn pct(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}

fn reference(c: &Campaigns) -> Outcome {
    let budget = 100_000;
    let random = c.median("reference", Rnd, budget);
    let mut ok = true;
    let mut parts = vec![format!("random {}", pct(random))];
    for t in [Alp, Covar, Ri] {
        let m = c.median("reference", t, budget);
        ok &= m - random >= 0.10 - EPS;
        parts.push(format!("{t} {}", pct(m)));
    }
    (
        ok,
        format!(
            "2D/100k: {}; each LP teacher >= random + 10pp",
            parts.join(", ")
        ),
    )
}

fn dimensionality(c: &Campaigns) -> Outcome {
    let budget = 1_000_000;
    let alp = c.median("dims-6d", Alp, budget);
    let covar = c.median("dims-6d", Covar, budget);
    let riac = c.median("dims-6d", Ri, budget);
    let full =
        alp >= 0.95 - EPS && covar >= 0.95 - EPS && (0.60 - EPS..=0.95 + EPS).contains(&riac);

    let budget = 300_000;
    let alp4 = c.median("dims-4d", Alp, budget);
    let covar4 = c.median("dims-4d", Covar, budget);
    let riac4 = c.median("dims-4d", Ri, budget);
    let reduced = (alp4 - covar4).abs() <= 0.10 + EPS && alp4 > riac4 && covar4 > riac4;
    (
        full && reduced,
        format!(
            "6D/1M: alpgmm {}, covargmm {} (need >= 95%), riac {} (need 60-95%) [{}]; \
             4D/300k: alpgmm {}, covargmm {}, riac {} (need covar ~ alp > riac) [{}]",
            pct(alp),
            pct(covar),
            pct(riac),
            if full { "ok" } else { "miss" },
            pct(alp4),
            pct(covar4),
            pct(riac4),
            if reduced { "ok" } else { "miss" },
        ),
    )
}

fn irrelevant(c: &Campaigns) -> Outcome {
    let budget = 50_000;
    let settings = ["reference", "irrelevant-10", "irrelevant-20"];
    let random: Vec<f64> = settings.iter().map(|s| c.median(s, Rnd, budget)).collect();
    let spread = random.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - random.iter().copied().fold(f64::INFINITY, f64::min);
    let mut ok = spread < 0.05;
    let mut parts = vec![format!(
        "random {} (spread {:.1}pp)",
        random.iter().map(|m| pct(*m)).collect::<Vec<_>>().join("/"),
        100.0 * spread
    )];
    for s in &settings[1..] {
        let riac = c.median(s, Ri, budget);
        let alp = c.median(s, Alp, budget);
        let covar = c.median(s, Covar, budget);
        ok &= alp > riac && covar > riac;
        parts.push(format!(
            "{s}: alpgmm {}, covargmm {}, riac {}",
            pct(alp),
            pct(covar),
            pct(riac)
        ));
    }
    (ok, format!("+0/+10/+20 at 50k: {}", parts.join("; ")))
}

fn resolution(c: &Campaigns) -> Outcome {
    let budget = 400_000;
    let random = c.median("cubes-50", Rnd, budget);
    let alp = c.median("cubes-50", Alp, budget);
    let covar = c.median("cubes-50", Covar, budget);
    let ok = alp - random >= 0.10 - EPS && covar - random >= 0.10 - EPS;
    (
        ok,
        format!(
            "50 cells/dim at 400k: random {}, alpgmm {}, covargmm {}; need +10pp",
            pct(random),
            pct(alp),
            pct(covar)
        ),
    )
}

fn em_monotone() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let cfg = EmConfig {
        rel_tol: 0.0,
        ..EmConfig::default()
    };
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let d = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=5);
        let n = rng.gen_range(20..=150);
        let centers: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect())
            .collect();
        let data: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                centers[i % 3]
                    .iter()
                    .map(|c| c + rng.gen_range(-0.5..0.5))
                    .collect()
            })
            .collect();
        let model = em_fit(&data, k, &cfg, &mut rng).unwrap();
        for w in model.log_likelihood_trace().windows(2) {
            worst = worst.max((w[0] - w[1]) / w[0].abs().max(1.0));
        }
    }
    (
        worst <= 1e-9,
        format!("100 fits, largest relative log-likelihood drop {worst:.2e}"),
    )
}

fn kd_exact() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut mismatches = 0;
    for instance in 0..100 {
        let d = rng.gen_range(1..=10);
        let n = rng.gen_range(1..=1000);
        let lattice = instance % 2 == 1;
        let coord = |rng: &mut ChaCha8Rng| {
            if lattice {
                rng.gen_range(0..5) as f64 / 4.0
            } else {
                rng.gen()
            }
        };
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| coord(&mut rng)).collect())
            .collect();
        let mut tree = KdTree::new(d);
        for p in &points {
            tree.insert(p.clone(), ()).unwrap();
        }
        for _ in 0..100 {
            let q: Vec<f64> = (0..d).map(|_| coord(&mut rng)).collect();
            let brute = points
                .iter()
                .map(|p| {
                    p.iter()
                        .zip(&q)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                })
                .enumerate()
                .fold((0, f64::INFINITY), |best, (i, dist)| {
                    if dist < best.1 {
                        (i, dist)
                    } else {
                        best
                    }
                })
                .0;
            mismatches += usize::from(tree.nearest(&q).unwrap().index != brute);
        }
    }
    (
        mismatches == 0,
        format!("100 instances x 100 queries, {mismatches} mismatches"),
    )
}

fn riac_invariants() -> Outcome {
    let cfg = RiacConfig::default();
    let mut tree = RegionTree::new(3);
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut violations = 0;
    for i in 0..100_000 {
        let point: Vec<f64> = (0..3).map(|_| rng.gen()).collect();
        let reward = if point[1] < 0.4 {
            (i % 300) as f64
        } else {
            0.0
        };
        if tree
            .observe(RegionRecord { point, reward }, &cfg, &mut rng)
            .is_some()
        {
            let leaves = tree.leaves();
            for &child in &leaves[leaves.len() - 2..] {
                violations += usize::from(tree.regions()[child].records.len() < cfg.min_s);
            }
        }
    }
    let regions = tree.regions();
    let volume: f64 = tree
        .leaves()
        .iter()
        .map(|&id| {
            regions[id]
                .lower
                .iter()
                .zip(&regions[id].upper)
                .map(|(l, u)| u - l)
                .product::<f64>()
        })
        .sum();
    for r in regions {
        violations += r
            .lower
            .iter()
            .zip(&r.upper)
            .filter(|(l, u)| *u - *l < cfg.min_d - 1e-12)
            .count();
        if r.is_leaf() {
            violations += r
                .records
                .iter()
                .filter(|rec| !r.contains(&rec.point))
                .count();
        }
    }
    for _ in 0..1000 {
        let q: Vec<f64> = (0..3).map(|_| rng.gen()).collect();
        let hits = tree
            .leaves()
            .iter()
            .filter(|&&id| {
                q.iter()
                    .zip(regions[id].lower.iter().zip(&regions[id].upper))
                    .all(|(v, (l, u))| l <= v && v < u)
            })
            .count();
        violations += usize::from(hits != 1);
    }
    let ok = violations == 0 && (volume - 1.0).abs() < 1e-9 && tree.leaves().len() > 1;
    (
        ok,
        format!(
            "{} leaves after 1e5 observations, leaf volume {volume:.12}, {violations} violations",
            tree.leaves().len()
        ),
    )
}

fn synthetic_reward(space: &ParameterSpace, p: &[f64], episode: usize) -> f64 {
    let unit = space.normalize(p).unwrap();
    let difficulty = unit.iter().sum::<f64>() / unit.len() as f64;
    100.0 * ((episode as f64 / 2000.0).min(1.0) - difficulty).max(0.0)
}

fn teacher_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut failures = Vec::new();
    for kind in TeacherKind::ALL {
        let dims = rng.gen_range(1..=5);
        let lower: Vec<f64> = (0..dims).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let upper: Vec<f64> = lower
            .iter()
            .map(|l| l + rng.gen_range(0.01..200.0))
            .collect();
        let space = ParameterSpace::new(lower, upper).unwrap();
        let seed: u64 = rng.gen();
        let mut params = TeacherParams::default();
        params.oracle.reward_threshold = 20.0;
        let run = || {
            let mut s =
                TeacherSession::new(build_teacher(kind, space.clone(), &params, seed).unwrap());
            let mut out = Vec::new();
            let mut inside = true;
            for episode in 0..10_000 {
                let p = s.propose().unwrap();
                inside &= space.contains(&p);
                let r = synthetic_reward(&space, &p, episode);
                s.observe(r).unwrap();
                out.push(p.into_inner());
            }
            (inside, out)
        };
        let (inside, a) = run();
        let (_, b) = run();
        if !inside {
            failures.push(format!("{kind} left the space"));
        }
        if a != b {
            failures.push(format!("{kind} not reproducible"));
        }
    }
    let ok = failures.is_empty();
    (
        ok,
        format!(
            "5 teachers x 1e4 episodes in random boxes: {}",
            if ok {
                "in bounds, reproducible".into()
            } else {
                failures.join(", ")
            }
        ),
    )
}

fn toy_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut violations = 0;
    for _ in 0..50 {
        let relevant = rng.gen_range(1..=3);
        let irrelevant = rng.gen_range(1..=4);
        let cfg = ToySpaceConfig {
            relevant_dims: relevant,
            irrelevant_dims: irrelevant,
            cubes_per_dim: rng.gen_range(2..=8),
            ..ToySpaceConfig::default()
        };
        let mut a = ToySpace::new(cfg.clone()).unwrap();
        let mut b = ToySpace::new(cfg.clone()).unwrap();
        let mut unlocked = a.unlocked_count();
        for _ in 0..5000 {
            let scale = rng.gen_range(0.05..1.0);
            let mut p: Vec<f64> = (0..cfg.total_dims())
                .map(|_| rng.gen::<f64>() * scale)
                .collect();
            let cell = a.cube_index(&p).unwrap();
            let before = a.count(&cell);
            let r = a.episode(&p).unwrap();
            violations += usize::from(!(0.0..=100.0).contains(&r) || a.count(&cell) < before);
            violations += usize::from(a.unlocked_count() < unlocked);
            unlocked = a.unlocked_count();
            for v in &mut p[relevant..] {
                *v = rng.gen();
            }
            violations += usize::from(b.episode(&p).unwrap() != r);
        }
    }
    (
        violations == 0,
        format!("50 random spaces x 5000 episodes, {violations} violations"),
    )
}

fn bridge_transparency() -> Outcome {
    let episodes = 500;
    let seed = 9;
    let env_cfg = ToySpaceConfig::default();
    let space = env_cfg.space();
    let mut mismatches = Vec::new();
    for kind in TeacherKind::ALL {
        let teacher =
            || build_teacher(kind, space.clone(), &TeacherParams::default(), seed).unwrap();
        let mut env = ToySpace::new(env_cfg.clone()).unwrap();
        let mut session = TeacherSession::new(teacher());
        let direct: Vec<(Vec<f64>, f64)> = (0..episodes)
            .map(|_| {
                let p = session.propose().unwrap();
                let r = env.episode(&p).unwrap();
                session.observe(r).unwrap();
                (p.into_inner(), r)
            })
            .collect();

        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let mut server = Bridge::new(teacher());
        std::thread::spawn(move || server.serve_tcp(listener));
        let stream = TcpStream::connect(addr).unwrap();
        stream.set_nodelay(true).unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut writer = stream;
        let mut exchange = |msg: &ClientMessage| -> ServerMessage {
            writeln!(writer, "{}", serde_json::to_string(msg).unwrap()).unwrap();
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            serde_json::from_str(&line).unwrap()
        };
        let mut env = ToySpace::new(env_cfg.clone()).unwrap();
        let remote: Vec<(Vec<f64>, f64)> = (0..episodes)
            .map(|_| {
                let ServerMessage::Param { id, values } = exchange(&ClientMessage::ParamRequest {})
                else {
                    panic!("expected a parameter");
                };
                let r = env.episode(&values).unwrap();
                let ack = exchange(&ClientMessage::Result { id, reward: r });
                assert_eq!(ack, ServerMessage::Ack { id });
                (values, r)
            })
            .collect();
        if remote != direct {
            mismatches.push(kind.to_string());
        }
    }
    let ok = mismatches.is_empty();
    (
        ok,
        format!(
            "5 teachers x {episodes} episodes over TCP vs in-process: {}",
            if ok {
                "identical".into()
            } else {
                format!("differ for {}", mismatches.join(", "))
            }
        ),
    )
}

fn mixture_frequencies() -> Outcome {
    let space = ParameterSpace::unit(2).unwrap();
    let n = 100_000;

    let mut alp = AlpGmm::new(space.clone(), GmmTeacherConfig::default(), 105).unwrap();
    let mut uniform = 0;
    for episode in 0..250 + n {
        let p = alp.propose();
        if episode >= 250 && alp.last_source() == Some(ProposalSource::Uniform) {
            uniform += 1;
        }
        alp.observe(&p, synthetic_reward(&space, &p, episode % 4000));
    }
    let alp_share = uniform as f64 / n as f64;

    let mut riac = Riac::new(space.clone(), RiacConfig::default(), 106).unwrap();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for episode in 0..n {
        let p = riac.propose();
        let label = match riac.last_source() {
            Some(ProposalSource::Uniform) => "random",
            Some(ProposalSource::Region) => "region",
            Some(ProposalSource::Mutation) => "mutation",
            other => panic!("unexpected source {other:?}"),
        };
        *counts.entry(label).or_default() += 1;
        riac.observe(&p, synthetic_reward(&space, &p, episode % 4000));
    }
    let share = |k: &str| counts.get(k).copied().unwrap_or(0) as f64 / n as f64;
    let (r, g, m) = (share("random"), share("region"), share("mutation"));
    let ok = (alp_share - 0.2).abs() <= 0.01
        && (r - 0.2).abs() <= 0.01
        && (g - 0.7).abs() <= 0.01
        && (m - 0.1).abs() <= 0.01;
    (
        ok,
        format!("alpgmm random {alp_share:.4} (0.20 +/- 0.01); riac {r:.4}/{g:.4}/{m:.4} (0.20/0.70/0.10 +/- 0.01)"),
    )
}

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let campaigns = Campaigns::default();
    let c = &campaigns;
    let criteria: Vec<Check> = vec![
        ("1", "reference space", Box::new(|| reference(c))),
        (
            "2",
            "dimensionality scaling",
            Box::new(|| dimensionality(c)),
        ),
        ("3", "irrelevant dimensions", Box::new(|| irrelevant(c))),
        ("4", "resolution scaling", Box::new(|| resolution(c))),
        ("5a", "EM monotonicity", Box::new(em_monotone)),
        ("5b", "KD-tree exactness", Box::new(kd_exact)),
        ("5c", "RIAC region invariants", Box::new(riac_invariants)),
        (
            "5d",
            "teacher bounds and determinism",
            Box::new(teacher_invariants),
        ),
        ("5e", "toy-space invariants", Box::new(toy_invariants)),
        ("5f", "bridge transparency", Box::new(bridge_transparency)),
        ("6", "mixture frequencies", Box::new(mixture_frequencies)),
    ];
    let mut failed = 0;
    for (id, name, check) in &criteria {
        if !filters.is_empty() && !filters.iter().any(|f| id.starts_with(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = check();
        failed += usize::from(!ok);
        println!(
            "{} [{id}] {name}: {detail} ({:.0?})",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
