//! End-to-end acceptance checks. Each test prints one line
//! `criterion N PASS|FAIL: ...` on stderr (bypassing output capture) and
//! fails if its check fails or exceeds its time budget.

mod common;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::Write;
use std::time::{Duration, Instant};

use common::*;
use locmon::async_automata::{Acceptance, AcceptanceCondition, AsyncAutomaton};
use locmon::closure::{classify_locally_safety, in_closure};
use locmon::gamma::{is_gamma_infinite_lasso, muller_to_buchi};
use locmon::monitorability::{
    brute_force_local_monitorable, decide_local_monitorable, decide_local_monitorable_with,
    decide_word_monitorable, gadget_from_nfa, traces_up_to, BruteVerdict, MonOptions,
};
use locmon::omega::{complement, validate_trace_closed, BuchiAutomaton, Dfa, Nfa, ValidationMode};
use locmon::synthesis::{synthesize_monitor, verdict_on_prefix, Verdict};
use locmon::{DistributedAlphabet, Letter, PrimalityTracker, ProcSet, Process, Trace};
use rand::Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn criterion(n: u32, name: &str, limit: Duration, check: impl FnOnce() -> Check) {
    let start = Instant::now();
    let result = check();
    let took = start.elapsed();
    let result = match result {
        Ok(d) if took > limit => Err(format!("{d}; took {took:.1?}, limit {limit:?}")),
        Ok(d) => Ok(format!("{d}; {took:.2?}")),
        Err(e) => Err(e),
    };
    let line = match &result {
        Ok(d) => format!("criterion {n:2} PASS: {name} ({d})\n"),
        Err(e) => format!("criterion {n:2} FAIL: {name} ({e})\n"),
    };
    let _ = std::io::stderr().write_all(line.as_bytes());
    if let Err(e) = result {
        panic!("criterion {n} failed: {e}");
    }
}

fn word(alph: &DistributedAlphabet, s: &str) -> Vec<Letter> {
    alph.parse_word(s).unwrap()
}

#[test]
fn c01_trace_algebra_oracles() {
    criterion(
        1,
        "trace algebra against swap-closure and pomset oracles",
        Duration::from_secs(60),
        || {
            let alph = fig1();
            let mut checked = 0;
            for len in 0..=8 {
                let minima = swap_class_minima(&alph, len);
                let mut by_nf: HashMap<Vec<Letter>, Vec<Letter>> = HashMap::new();
                for (w, min) in &minima {
                    let t = Trace::from_word(&alph, w).unwrap();
                    ensure!(
                        t.normal_form() == min.as_slice(),
                        "normal form of {}",
                        alph.format_word(w)
                    );
                    // Equal traces exactly on equal swap classes.
                    let prev = by_nf
                        .entry(t.normal_form().to_vec())
                        .or_insert_with(|| min.clone());
                    ensure!(prev == min, "trace equality of {}", alph.format_word(w));
                    let max = pomset_max(&alph, w);
                    ensure!(t.maximal_events() == max, "max of {}", alph.format_word(w));
                    let letters: Vec<Letter> = max.iter().map(|&i| w[i]).collect();
                    ensure!(
                        t.max_letters() == letters,
                        "max letters of {}",
                        alph.format_word(w)
                    );
                    ensure!(
                        t.is_prime() == (max.len() == 1),
                        "primality of {}",
                        alph.format_word(w)
                    );
                    let tracker = PrimalityTracker::run(&alph, w);
                    ensure!(
                        tracker.is_prime(&alph) == (max.len() == 1),
                        "tracker on {}",
                        alph.format_word(w)
                    );
                    let mut tl: Vec<Letter> = tracker.maximal_letters(&alph).collect();
                    let mut ml = letters.clone();
                    tl.sort();
                    ml.sort();
                    ensure!(tl == ml, "tracker max letters on {}", alph.format_word(w));
                    checked += 1;
                }
            }
            Ok(format!("{checked} words"))
        },
    );
}

#[test]
fn c02_fig1_fixture() {
    criterion(
        2,
        "[cbadcbadb] is prime and its prime prefixes match brute force",
        Duration::from_secs(1),
        || {
            let alph = fig1();
            let w = word(&alph, "cbadcbadb");
            let t = Trace::from_word(&alph, &w).unwrap();
            ensure!(t.is_prime(), "not prime");
            ensure!(
                t.maximal_events() == vec![8],
                "final b is not the unique maximum"
            );
            // Brute force: downward-closed subsets of positions with one maximum.
            let le = pomset_order(&alph, &w);
            let n = w.len();
            let mut expected: BTreeSet<Vec<Letter>> = BTreeSet::new();
            for mask in 1u32..(1 << n) {
                let inside = |i: usize| mask >> i & 1 == 1;
                let closed = (0..n).all(|j| !inside(j) || (0..n).all(|i| !le[i][j] || inside(i)));
                let tops = (0..n)
                    .filter(|&i| inside(i) && (0..n).all(|j| j == i || !inside(j) || !le[i][j]))
                    .count();
                if closed && tops == 1 {
                    let sub: Vec<Letter> = (0..n).filter(|&i| inside(i)).map(|i| w[i]).collect();
                    expected.insert(
                        Trace::from_word(&alph, &sub)
                            .unwrap()
                            .normal_form()
                            .to_vec(),
                    );
                }
            }
            let got: BTreeSet<Vec<Letter>> = t
                .prime_prefixes()
                .iter()
                .map(|p| p.normal_form().to_vec())
                .collect();
            ensure!(
                got == expected,
                "prime prefixes differ: {} vs {}",
                got.len(),
                expected.len()
            );
            Ok(format!("{} prime prefixes", got.len()))
        },
    );
}

/// All linearizations of a trace given by one of them.
fn linearizations(alph: &DistributedAlphabet, w: &[Letter]) -> Vec<Vec<Letter>> {
    let le = pomset_order(alph, w);
    let n = w.len();
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<usize>, u32)> = vec![(Vec::new(), 0)];
    while let Some((seq, used)) = stack.pop() {
        if seq.len() == n {
            out.push(seq.iter().map(|&i| w[i]).collect());
            continue;
        }
        for j in 0..n {
            if used >> j & 1 == 0 && (0..n).all(|i| i == j || !le[i][j] || used >> i & 1 == 1) {
                let mut s = seq.clone();
                s.push(j);
                stack.push((s, used | 1 << j));
            }
        }
    }
    out
}

/// `p ∈ P(L)`: some linearization of `p` extends to an accepted lasso.
fn in_prime_set_oracle(b: &BuchiAutomaton, alph: &DistributedAlphabet, p: &Trace) -> bool {
    let ext = words_up_to(b.num_letters(), 3);
    linearizations(alph, p.normal_form()).iter().any(|u| {
        ext.iter().any(|x| {
            ext.iter().filter(|y| !y.is_empty()).any(|y| {
                let mut ux = u.clone();
                ux.extend_from_slice(x);
                b.accepts_lasso(&ux, y).unwrap()
            })
        })
    })
}

#[test]
fn c03_closure_equals_joins_of_primes() {
    criterion(
        3,
        "in_closure equals joins of coherent subsets of P(L)",
        Duration::from_secs(300),
        || {
            let mut total = 0;
            for (ai, alph) in [sec3(), fig1()].into_iter().enumerate() {
                let traces = traces_up_to(&alph, 6);
                let mut r = rng(300 + ai as u64);
                let mut langs = 0;
                while langs < 10 {
                    let n = r.gen_range(1..=3);
                    let b = random_buchi(alph.letter_names(), n, 0.4, &mut r);
                    if b.is_empty()
                        || validate_trace_closed(&alph, &b, ValidationMode::Full).is_err()
                    {
                        continue;
                    }
                    langs += 1;
                    let mut memo: HashMap<Trace, bool> = HashMap::new();
                    for t in &traces {
                        let primes: Vec<Trace> = t
                            .prime_prefixes()
                            .into_iter()
                            .filter(|p| {
                                *memo
                                    .entry(p.clone())
                                    .or_insert_with(|| in_prime_set_oracle(&b, &alph, p))
                            })
                            .collect();
                        let k = primes.len();
                        let oracle = (0u32..1 << k).any(|mask| {
                            let c: Vec<&Trace> = (0..k)
                                .filter(|i| mask >> i & 1 == 1)
                                .map(|i| &primes[i])
                                .collect();
                            match Trace::join(c.iter().copied()) {
                                Some(j) => j == *t,
                                None => k == 0 && t.is_empty(),
                            }
                        }) || t.is_empty();
                        ensure!(
                            in_closure(&b, t) == oracle,
                            "language {langs} on alphabet {ai}: trace {}",
                            alph.format_word(t.normal_form())
                        );
                        total += 1;
                    }
                }
            }
            Ok(format!("20 languages, {total} trace checks"))
        },
    );
}

fn is_prefix_closed_oracle(d: &Dfa, k: usize, max: usize) -> bool {
    words_up_to(k, max)
        .iter()
        .all(|w| !d.accepts(w) || (0..w.len()).all(|i| d.accepts(&w[..i])))
}

fn forward_diamond_oracle(d: &Dfa, alph: &DistributedAlphabet, max: usize) -> bool {
    words_up_to(alph.num_letters(), max).iter().all(|u| {
        alph.letters().all(|a| {
            alph.letters().all(|b| {
                if a == b || !alph.independent(a, b) {
                    return true;
                }
                let (mut ua, mut ub) = (u.clone(), u.clone());
                ua.push(a);
                ub.push(b);
                if !(d.accepts(&ua) && d.accepts(&ub)) {
                    return true;
                }
                ua.push(b);
                d.accepts(&ua)
            })
        })
    })
}

#[test]
fn c04_async_languages_are_locally_safety() {
    criterion(
        4,
        "all-final async automata give prefix-closed forward-diamond languages",
        Duration::from_secs(60),
        || {
            let alphs = [fig1(), sec3(), disc()];
            let mut r = rng(400);
            for i in 0..50 {
                let alph = &alphs[i % alphs.len()];
                let aa = random_det_async(alph, 2, 0.7, &mut r);
                let d = aa.to_dfa().map_err(|e| e.to_string())?;
                ensure!(
                    d.is_prefix_closed() && is_prefix_closed_oracle(&d, alph.num_letters(), 5),
                    "sample {i} not prefix-closed"
                );
                ensure!(
                    d.forward_diamond_violation(alph).is_none()
                        && forward_diamond_oracle(&d, alph, 4),
                    "sample {i} violates forward diamond"
                );
            }
            let alph = sec3();
            let nocc = Dfa::parse_for(&alph, &fixture("nocc.dfa")).unwrap();
            let r1 = classify_locally_safety(&nocc, None, &alph).map_err(|e| e.to_string())?;
            ensure!(
                r1.locally_safety,
                "no two consecutive c's not locally safety"
            );
            let noapb = Dfa::parse_for(&alph, &fixture("noapb.dfa")).unwrap();
            let r2 = classify_locally_safety(&noapb, None, &alph).map_err(|e| e.to_string())?;
            ensure!(
                !r2.locally_safety,
                "no a parallel with b classified locally safety"
            );
            let (a, b) = (alph.letter("a").unwrap(), alph.letter("b").unwrap());
            ensure!(
                r2.diamond_violation == Some((vec![], a, b)),
                "diamond failure not at the empty word"
            );
            Ok(format!("50 samples; {}", r2.render(&alph)))
        },
    );
}

#[test]
fn c05_gadget_reduction() {
    criterion(
        5,
        "word monitorability of the gadget equals NFA universality",
        Duration::from_secs(300),
        || {
            let letters = vec!["x".to_string(), "y".to_string()];
            let mut count = 0;
            let mut universal = 0;
            let mut check = |a: &Nfa| -> Check {
                let g = gadget_from_nfa(a, "b").map_err(|e| e.to_string())?;
                let got = decide_word_monitorable(&g)
                    .map_err(|e| e.to_string())?
                    .verdict;
                let want = nfa_universal(a);
                ensure!(got == want, "mismatch on NFA:\n{}", a.to_text());
                count += 1;
                universal += want as usize;
                Ok(String::new())
            };
            for acc in 0u32..4 {
                for edges in 0u32..256 {
                    let mut text = "alphabet x y\nstates s0 s1\ninitial s0\n".to_string();
                    let fin: Vec<String> = (0..2)
                        .filter(|q| acc >> q & 1 == 1)
                        .map(|q| format!("s{q}"))
                        .collect();
                    if !fin.is_empty() {
                        text.push_str(&format!("accepting {}\n", fin.join(" ")));
                    }
                    for e in 0..8 {
                        if edges >> e & 1 == 1 {
                            let (p, l, q) = (e / 4, (e / 2) % 2, e % 2);
                            text.push_str(&format!("trans s{p} {} s{q}\n", letters[l]));
                        }
                    }
                    check(&Nfa::parse(&text, None).unwrap())?;
                }
            }
            let mut r = rng(500);
            for _ in 0..500 {
                check(&random_nfa(&letters, 3, &mut r))?;
            }
            Ok(format!("{count} NFAs, {universal} universal"))
        },
    );
}

fn all_final_language(
    alph: &DistributedAlphabet,
    r: &mut rand_chacha::ChaCha8Rng,
) -> BuchiAutomaton {
    random_det_async(alph, 2, 0.75, r).to_buchi()
}

#[test]
fn c06_decision_agrees_with_brute_force() {
    criterion(
        6,
        "decision procedure agrees with bounded definitional search",
        Duration::from_secs(600),
        || {
            let mut definite = 0;
            let mut cases: Vec<(String, DistributedAlphabet, BuchiAutomaton, Option<bool>)> =
                Vec::new();
            let s3 = sec3();
            let d = disc();
            cases.push((
                "no two consecutive c's".into(),
                s3.clone(),
                BuchiAutomaton::parse_for(&s3, &fixture("nocc.ba")).unwrap(),
                Some(true),
            ));
            cases.push((
                "no a or no b".into(),
                d.clone(),
                BuchiAutomaton::parse_for(&d, &fixture("noa_or_nob.ba")).unwrap(),
                Some(false),
            ));
            cases.push((
                "full language".into(),
                s3.clone(),
                BuchiAutomaton::universal(s3.letter_names().to_vec()),
                Some(true),
            ));
            let alphs = [sec3(), fig1(), disc()];
            let mut r = rng(600);
            for i in 0..100 {
                let alph = alphs[i % alphs.len()].clone();
                let b = if i % 2 == 0 {
                    all_final_language(&alph, &mut r)
                } else {
                    let x = all_final_language(&alph, &mut r);
                    let y = all_final_language(&alph, &mut r);
                    x.union(&y).unwrap()
                };
                cases.push((format!("random {i}"), alph, b, None));
            }
            // The random instances are trace-closed by construction.
            let opts = MonOptions {
                validation: ValidationMode::PrefixOnly,
                ..MonOptions::default()
            };
            for (name, alph, b, expected) in &cases {
                let got = decide_local_monitorable_with(b, alph, &opts)
                    .map_err(|e| format!("{name}: {e}"))?
                    .verdict;
                if let Some(e) = expected {
                    ensure!(got == *e, "{name}: decided {got}, expected {e}");
                }
                let brute = brute_force_local_monitorable(b, alph, 3, 5, 40)
                    .map_err(|e| format!("{name}: {e}"))?;
                let definite_answer = match brute {
                    BruteVerdict::Monitorable => Some(true),
                    BruteVerdict::NotMonitorable { .. } => Some(false),
                    BruteVerdict::Unknown => None,
                };
                if let Some(bv) = definite_answer {
                    ensure!(bv == got, "{name}: brute force {bv}, decision {got}");
                    definite += 1;
                }
            }
            Ok(format!("{} instances, {definite} definite", cases.len()))
        },
    );
}

fn sample_tail(k: usize, r: &mut rand_chacha::ChaCha8Rng) -> (Vec<Letter>, Vec<Letter>) {
    let lu = r.gen_range(0..=4);
    let lv = r.gen_range(1..=4);
    (random_word(k, lu, r), random_word(k, lv, r))
}

#[test]
fn c07_verdict_soundness() {
    criterion(
        7,
        "verdicts are sound, causally absorbing and trace-invariant",
        Duration::from_secs(300),
        || {
            let alph = sec3();
            let k = alph.num_letters();
            let words = words_up_to(k, 8);
            let mut r = rng(700);
            let mut sampled = 0;
            for name in ["nocc.ba", "somec.ba"] {
                let b = BuchiAutomaton::parse_for(&alph, &fixture(name)).unwrap();
                let m = synthesize_monitor(&b, None, &alph).map_err(|e| e.to_string())?;
                let mut by_trace: HashMap<Trace, HashMap<Vec<u32>, Verdict>> = HashMap::new();
                let mut decided_prefixes: Vec<(Vec<Letter>, Verdict)> = Vec::new();
                for w in &words {
                    let vs = verdict_on_prefix(&m, w);
                    let t = Trace::from_word(&alph, w).unwrap();
                    for (i, v) in vs.iter().enumerate() {
                        if v.is_decided() {
                            for j in i..w.len() {
                                ensure!(
                                    !t.le(i, j) || vs[j] == *v,
                                    "{name}: absorption fails on {}",
                                    alph.format_word(w)
                                );
                            }
                        }
                    }
                    let ev: HashMap<Vec<u32>, Verdict> = t
                        .events()
                        .iter()
                        .zip(&vs)
                        .map(|(e, v)| (e.vclock.clone(), *v))
                        .collect();
                    match by_trace.get(&t) {
                        Some(prev) => ensure!(
                            *prev == ev,
                            "{name}: verdicts differ within the class of {}",
                            alph.format_word(w)
                        ),
                        None => {
                            by_trace.insert(t, ev);
                        }
                    }
                    if let Some(v) = vs.last().filter(|v| v.is_decided()) {
                        if w.len() <= 4 {
                            decided_prefixes.push((w.clone(), *v));
                        }
                    }
                }
                ensure!(!decided_prefixes.is_empty(), "{name}: no verdict emitted");
                for (w, v) in decided_prefixes.iter().take(20) {
                    for _ in 0..100 {
                        let (x, y) = sample_tail(k, &mut r);
                        let mut u = w.clone();
                        u.extend_from_slice(&x);
                        let inside = b.accepts_lasso(&u, &y).unwrap();
                        ensure!(
                            inside == (*v == Verdict::Top),
                            "{name}: verdict {v} after {} but lasso {}({})^ω disagrees",
                            alph.format_word(w),
                            alph.format_word(&u),
                            alph.format_word(&y)
                        );
                        sampled += 1;
                    }
                }
            }
            Ok(format!(
                "{} words per monitor, {sampled} sampled lassos",
                words.len()
            ))
        },
    );
}

#[test]
fn c08_union_closure() {
    criterion(
        8,
        "union preserves local monitorability on a connected alphabet",
        Duration::from_secs(300),
        || {
            let alph = sec3();
            let opts = MonOptions {
                validation: ValidationMode::PrefixOnly,
                ..MonOptions::default()
            };
            let mut r = rng(800);
            let mut pool: Vec<BuchiAutomaton> = Vec::new();
            let mut tried = 0;
            while pool.len() < 12 && tried < 400 {
                tried += 1;
                let b = if tried % 2 == 0 {
                    random_local_language(&alph, &mut r)
                } else {
                    all_final_language(&alph, &mut r)
                };
                if decide_local_monitorable_with(&b, &alph, &opts)
                    .map_err(|e| e.to_string())?
                    .verdict
                {
                    pool.push(b);
                }
            }
            ensure!(pool.len() >= 2, "too few monitorable samples");
            for i in 0..20 {
                let x = &pool[r.gen_range(0..pool.len())];
                let y = &pool[(i * 7 + 3) % pool.len()];
                let u = x.union(y).unwrap();
                let v = decide_local_monitorable_with(&u, &alph, &opts)
                    .map_err(|e| e.to_string())?
                    .verdict;
                ensure!(v, "union of pair {i} is not locally monitorable");
            }
            let d = disc();
            let noa =
                BuchiAutomaton::parse_for(&d, "states s\ninitial s\naccepting s\ntrans s b s\n")
                    .unwrap();
            let nob =
                BuchiAutomaton::parse_for(&d, "states s\ninitial s\naccepting s\ntrans s a s\n")
                    .unwrap();
            ensure!(
                decide_local_monitorable(&noa, &d).unwrap().verdict,
                "no a should be monitorable"
            );
            ensure!(
                decide_local_monitorable(&nob, &d).unwrap().verdict,
                "no b should be monitorable"
            );
            let both = BuchiAutomaton::parse_for(&d, &fixture("noa_or_nob.ba")).unwrap();
            ensure!(
                !decide_local_monitorable(&both, &d).unwrap().verdict,
                "counterexample accepted"
            );
            let u = noa.union(&nob).unwrap();
            ensure!(
                !decide_local_monitorable(&u, &d).unwrap().verdict,
                "union automaton of the counterexample accepted"
            );
            Ok(format!(
                "20 pairs from {} samples; disconnected counterexample rejected",
                pool.len()
            ))
        },
    );
}

fn nonempty_subsets(n: usize) -> Vec<BTreeSet<usize>> {
    (1u32..1 << n)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

/// Upward-closed Muller family above a random minimal tuple.
fn upward_family(
    aa: &AsyncAutomaton,
    procs: &[Process],
    r: &mut rand_chacha::ChaCha8Rng,
) -> Vec<Vec<BTreeSet<usize>>> {
    let options: Vec<Vec<BTreeSet<usize>>> = procs
        .iter()
        .map(|p| nonempty_subsets(aa.num_local_states(*p)))
        .collect();
    let base: Vec<BTreeSet<usize>> = options
        .iter()
        .map(|o| o[r.gen_range(0..o.len())].clone())
        .collect();
    let mut fam: Vec<Vec<BTreeSet<usize>>> = vec![Vec::new()];
    for (i, o) in options.iter().enumerate() {
        fam = fam
            .into_iter()
            .flat_map(|t| {
                o.iter()
                    .filter(|s| base[i].is_subset(s))
                    .map(move |s| {
                        let mut t = t.clone();
                        t.push(s.clone());
                        t
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    fam
}

fn gamma_lassos(
    aa: &AsyncAutomaton,
    gamma: ProcSet,
    want: usize,
    r: &mut rand_chacha::ChaCha8Rng,
) -> Vec<(Vec<Letter>, Vec<Letter>)> {
    let alph = aa.alphabet();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for _ in 0..20_000 {
        if out.len() == want {
            break;
        }
        let lu = r.gen_range(0..=3);
        let lv = r.gen_range(1..=6);
        let Some(w) = random_run(aa, lu + lv, r) else {
            continue;
        };
        let (u, v) = (w[..lu].to_vec(), w[lu..].to_vec());
        if is_gamma_infinite_lasso(alph, gamma, &u, &v).unwrap()
            && aa.recurring_states(&u, &v).unwrap().is_some()
            && seen.insert((u.clone(), v.clone()))
        {
            out.push((u, v));
        }
    }
    out
}

#[test]
fn c09_muller_to_buchi() {
    criterion(
        9,
        "Muller and converted Büchi acceptance agree on Γ-infinite lassos",
        Duration::from_secs(300),
        || {
            let alph = fig1();
            let (ex, cond) = AsyncAutomaton::parse(&alph, &fixture("example1.aa")).unwrap();
            let mut instances = vec![(ex, cond.unwrap())];
            let mut r = rng(900);
            let mut attempts = 0;
            while instances.len() < 11 {
                attempts += 1;
                ensure!(attempts < 500, "could not generate random instances");
                let aa = random_det_async(&alph, 2, 0.9, &mut r);
                let mut procs: Vec<Process> = alph
                    .processes()
                    .filter(|_| r.gen_bool(0.5))
                    .take(2)
                    .collect();
                if procs.is_empty() {
                    procs.push(Process(r.gen_range(0..alph.num_processes())));
                }
                let gamma = procs.iter().fold(ProcSet::default(), |mut s, p| {
                    s.insert(*p);
                    s
                });
                if gamma_lassos(&aa, gamma, 50, &mut r.clone()).len() < 50 {
                    continue;
                }
                let fam = upward_family(&aa, &procs, &mut r);
                instances.push((
                    aa,
                    AcceptanceCondition {
                        gamma,
                        kind: Acceptance::Muller(fam),
                    },
                ));
            }
            let mut accepted = 0;
            for (i, (aa, cond)) in instances.iter().enumerate() {
                let conv =
                    muller_to_buchi(aa, cond, 64).map_err(|e| format!("instance {i}: {e}"))?;
                let lassos = gamma_lassos(aa, cond.gamma, 50, &mut r);
                ensure!(
                    lassos.len() == 50,
                    "instance {i}: only {} lassos",
                    lassos.len()
                );
                for (u, v) in &lassos {
                    let m = aa.accepts_lasso(cond, u, v).unwrap();
                    let b = aa.accepts_lasso(&conv, u, v).unwrap();
                    ensure!(
                        m == b,
                        "instance {i}: lasso {}|{} Muller {m}, Büchi {b}",
                        alph.format_word(u),
                        alph.format_word(v)
                    );
                    accepted += m as usize;
                }
            }
            Ok(format!("11 automata x 50 lassos, {accepted} accepted"))
        },
    );
}

#[test]
fn c10_complement_partitions_lassos() {
    criterion(
        10,
        "B and complement(B) partition all short lassos",
        Duration::from_secs(120),
        || {
            let letters = vec!["a".to_string(), "b".to_string()];
            let short = words_up_to(2, 3);
            let mut r = rng(1000);
            let mut checked = 0;
            for i in 0..200 {
                let b = random_buchi(&letters, 1 + i % 3, 0.45, &mut r);
                let c = complement(&b).map_err(|e| e.to_string())?;
                for u in &short {
                    for v in short.iter().filter(|v| !v.is_empty()) {
                        let x = b.accepts_lasso(u, v).unwrap();
                        let y = c.accepts_lasso(u, v).unwrap();
                        ensure!(
                            x != y,
                            "automaton {i}: lasso {}({})^ω in both or neither",
                            b.format_word(u),
                            b.format_word(v)
                        );
                        checked += 1;
                    }
                }
            }
            Ok(format!("200 automata, {checked} lassos"))
        },
    );
}

#[test]
fn c11_cli_golden_reports() {
    criterion(
        11,
        "CLI pipelines reproduce the golden reports",
        Duration::from_secs(60),
        || {
            let fx = format!("{}/fixtures", env!("CARGO_MANIFEST_DIR"));
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let tmp = |n: &str| dir.path().join(n).to_string_lossy().into_owned();
            let f = |n: &str| format!("{fx}/{n}");
            let golden = |n: &str| std::fs::read_to_string(format!("{fx}/golden/{n}")).unwrap();
            let run = |args: &[&str]| {
                let mut all = vec!["locmon"];
                all.extend_from_slice(args);
                locmon::cli::run(all)
            };
            let mut compared = 0;
            let mut same = |what: &str, got: &str, want: &str| -> Check {
                ensure!(got == want, "{what} differs from golden:\n{got}");
                compared += 1;
                Ok(String::new())
            };

            for (nfa, code) in [("universal", 0), ("xstar", 1)] {
                let out = tmp(&format!("{nfa}.ba"));
                let g = run(&["gadget", "--nfa", &f(&format!("{nfa}.nfa")), "-o", &out]);
                ensure!(g.code == 0, "gadget failed: {}", g.stderr);
                same(
                    "gadget",
                    &std::fs::read_to_string(&out).unwrap(),
                    &golden(&format!("gadget_{nfa}.ba")),
                )?;
                let w = run(&["word-mon", "--buchi", &out]);
                ensure!(w.code == code, "word-mon exit {} for {nfa}", w.code);
                same(
                    "word-mon",
                    &w.stdout,
                    &golden(&format!("word_mon_{nfa}.txt")),
                )?;
            }

            let c = run(&[
                "check-local-mon",
                "--lang",
                &f("nocc.ba"),
                "--alph",
                &f("sec3.alph"),
                "--brute",
                "3",
                "5",
                "20",
            ]);
            ensure!(c.code == 0, "check-local-mon exit {}", c.code);
            same("check nocc", &c.stdout, &golden("check_nocc.txt"))?;
            let c = run(&[
                "check-local-mon",
                "--lang",
                &f("noa_or_nob.ba"),
                "--alph",
                &f("disc.alph"),
                "--brute",
                "3",
                "3",
                "20",
            ]);
            ensure!(c.code == 1, "check-local-mon exit {}", c.code);
            same(
                "check noa_or_nob",
                &c.stdout,
                &golden("check_noa_or_nob.txt"),
            )?;

            let va = tmp("nocc.va");
            let s = run(&[
                "synthesize",
                "--lang",
                &f("nocc.ba"),
                "--complement",
                "--alph",
                &f("sec3.alph"),
                "-o",
                &va,
            ]);
            ensure!(s.code == 0, "synthesize failed: {}", s.stderr);
            same(
                "monitor",
                &std::fs::read_to_string(&va).unwrap(),
                &golden("nocc.va"),
            )?;
            let sys = f("sec3_system.aa");
            let alph = f("sec3.alph");
            let r1 = run(&[
                "simulate",
                "--system",
                &sys,
                "--alph",
                &alph,
                "--monitor",
                &va,
                "--random",
                "--seed",
                "42",
                "--steps",
                "12",
            ]);
            same(
                "simulate random",
                &r1.stdout,
                &golden("simulate_nocc_seed42.txt"),
            )?;
            let rep = tmp("report.txt");
            let r2 = run(&[
                "simulate",
                "--system",
                &sys,
                "--alph",
                &alph,
                "--monitor",
                &va,
                "--script",
                "a c c b",
                "--steps",
                "100",
                "--out",
                &rep,
            ]);
            ensure!(r2.code == 0, "simulate failed: {}", r2.stderr);
            same(
                "simulate script",
                &std::fs::read_to_string(&rep).unwrap(),
                &golden("simulate_nocc_script.txt"),
            )?;
            let r3 = run(&[
                "simulate",
                "--system",
                &f("example1.aa"),
                "--alph",
                &f("fig1.alph"),
                "--script",
                "b a d b a d",
                "--steps",
                "100",
            ]);
            same(
                "simulate example",
                &r3.stdout,
                &golden("simulate_example1.txt"),
            )?;
            let bad = run(&[
                "simulate",
                "--system",
                &f("example1.aa"),
                "--alph",
                &f("fig1.alph"),
                "--script",
                "a",
                "--steps",
                "5",
            ]);
            ensure!(
                bad.code == 2 && bad.stderr.contains("position 1"),
                "disabled letter not reported"
            );
            Ok(format!("{compared} reports identical"))
        },
    );
}
