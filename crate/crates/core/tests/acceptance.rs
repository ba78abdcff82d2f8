//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.
//!
//! Run with `cargo test -p burstrecon --test acceptance -- --nocapture` or
//! directly via `cargo test --workspace`.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use burstrecon::{
    b_cyclic, deletion_majority_phase, enumerate_deletion_ball, enumerate_insertion_ball, intersection, is_descendant,
    max_intersection_exhaustive, radius1_del_ball_size, reconstruct_from_deletions, reconstruct_from_insertions,
    sample_distinct_outputs, sphere_packing_bound, trial_seed, y_sequence, BallKind, ChannelParams, EnumerationCap,
    Error, ExactCount, OutputSet, Sequence, DEFAULT_CAP,
};
use burstrecon::{
    count_centers_by_radius1_ball_size, del_ball_max, del_intersection_max_binary, ins_ball_size, ins_intersection_max,
};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const CAP: EnumerationCap = EnumerationCap(DEFAULT_CAP);
const MASTER_SEED: u64 = 0x5eed_2024;
const TRIALS: usize = 100;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn params(q: u32, b: u32, t: u32, n: u32) -> ChannelParams {
    ChannelParams::new(q, b, t, n).unwrap()
}

fn count(v: ExactCount) -> usize {
    v.to_usize().expect("count fits in usize")
}

fn words(n: usize, q: u32) -> Vec<Sequence> {
    let total = (q as usize).pow(n as u32);
    (0..total)
        .map(|mut k| {
            let mut s = vec![0u8; n];
            for c in s.iter_mut().rev() {
                *c = (k % q as usize) as u8;
                k /= q as usize;
            }
            Sequence::new(s, q).unwrap()
        })
        .collect()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ac1() -> Outcome {
    let mut centers = 0usize;
    for q in [2u32, 3] {
        for b in 1..=3u32 {
            for t in 1..=2u32 {
                for n in 1..=7u32 {
                    let expected = count(ins_ball_size(&params(q, b, t, n)).unwrap());
                    let xs = words(n as usize, q);
                    centers += xs.len();
                    let bad = xs.par_iter().find_any(|x| {
                        enumerate_insertion_ball(x, t as usize, b as usize, CAP).map(|s| s.len()) != Ok(expected)
                    });
                    if let Some(x) = bad {
                        return Err(format!(
                            "q={q} b={b} t={t} n={n} x={x}: ball size differs from {expected}"
                        ));
                    }
                }
            }
        }
    }
    Ok(format!(
        "{centers} centers, every enumerated ball equals the closed form"
    ))
}

fn ac2() -> Outcome {
    let mut points = 0;
    for q in [2u32, 3] {
        for b in 2..=3u32 {
            for t in 1..=2u32 {
                for n in 1..=4u32 {
                    let expected = count(ins_intersection_max(&params(q, b, t, n)).unwrap());
                    let (bu, tu) = (b as usize, t as usize);
                    let found = max_intersection_exhaustive(n as usize, q, bu, tu, BallKind::Insertion, CAP)
                        .map_err(|e| e.to_string())?;
                    check(found.size == expected, || {
                        format!(
                            "q={q} b={b} t={t} n={n}: exhaustive {} vs formula {expected}",
                            found.size
                        )
                    })?;
                    for x in words(n as usize, q) {
                        let mut s = x.symbols().to_vec();
                        s[0] = (s[0] + 1) % q as u8;
                        let y = Sequence::new(s, q).unwrap();
                        let shared = intersection(
                            &enumerate_insertion_ball(&x, tu, bu, CAP).unwrap(),
                            &enumerate_insertion_ball(&y, tu, bu, CAP).unwrap(),
                        )
                        .unwrap();
                        check(shared.len() == expected, || {
                            format!("q={q} b={b} t={t} pair {x},{y} shares {} not {expected}", shared.len())
                        })?;
                    }
                    points += 1;
                }
            }
        }
    }
    Ok(format!(
        "{points} grid points; every first-symbol-flip pair attains the maximum"
    ))
}

fn ac3() -> Outcome {
    for b in 2..=4u32 {
        for q in [2u32, 3] {
            for n in 1..=8 {
                let v = count(ins_intersection_max(&params(q, b, 1, n)).unwrap());
                check(v == 2 * (q as usize).pow(b - 1), || {
                    format!("insertion q={q} b={b} n={n}: {v}")
                })?;
            }
        }
        let v = count(del_intersection_max_binary(&params(2, b, 1, 2 * b - 1)).unwrap());
        check(v == b.max(2) as usize, || format!("deletion b={b}: {v}"))?;
    }
    Ok("single-burst values match 2q^(b-1) and max(2,b)".into())
}

fn ac4() -> Outcome {
    let mut points = 0;
    for b in 2..=3usize {
        for t in 1..=2usize {
            for n in (b * t + 1)..=10 {
                let expected = count(del_ball_max(&params(2, b as u32, t as u32, n as u32)).unwrap());
                let best = words(n, 2)
                    .par_iter()
                    .map(|x| enumerate_deletion_ball(x, t, b, CAP).unwrap().len())
                    .max()
                    .unwrap();
                check(best == expected, || {
                    format!("b={b} t={t} n={n}: max {best} vs formula {expected}")
                })?;
                for sigma in 0..2 {
                    for j in 0..b {
                        let y = y_sequence(n, 2, b, sigma, j).unwrap();
                        let size = enumerate_deletion_ball(&y, t, b, CAP).unwrap().len();
                        check(size == expected, || format!("b={b} t={t} n={n} center {y}: {size}"))?;
                    }
                }
                points += 1;
            }
        }
    }
    Ok(format!(
        "{points} grid points; all shifted cyclic centers attain the maximum"
    ))
}

/// `0^b` followed by the b-cyclic word starting at 1, and the same with its
/// b-th symbol flipped.
fn deletion_extremal_pair(n: usize, b: usize) -> (Sequence, Sequence) {
    let x = Sequence::new(vec![0; b], 2)
        .unwrap()
        .concat(&b_cyclic(n - b, 2, b, 1).unwrap())
        .unwrap();
    let mut s = x.symbols().to_vec();
    s[b - 1] = 1;
    (x, Sequence::new(s, 2).unwrap())
}

fn ac5() -> Outcome {
    let b = 2usize;
    let mut points = 0;
    for t in 1..=2usize {
        for n in (b * (t + 1) - 1)..=9 {
            let expected = count(del_intersection_max_binary(&params(2, b as u32, t as u32, n as u32)).unwrap());
            let found = max_intersection_exhaustive(n, 2, b, t, BallKind::Deletion, CAP).map_err(|e| e.to_string())?;
            check(found.size == expected, || {
                format!("t={t} n={n}: exhaustive {} vs formula {expected}", found.size)
            })?;
            let (x, y) = deletion_extremal_pair(n, b);
            let shared = intersection(
                &enumerate_deletion_ball(&x, t, b, CAP).unwrap(),
                &enumerate_deletion_ball(&y, t, b, CAP).unwrap(),
            )
            .unwrap();
            check(shared.len() == expected, || {
                format!("t={t} n={n}: pair {x},{y} shares {}", shared.len())
            })?;
            points += 1;
        }
    }
    Ok(format!("{points} grid points; the flipped pair attains the maximum"))
}

fn ac6() -> Outcome {
    let mut points = 0;
    for q in [2u32, 3] {
        for t in 1..=2u32 {
            for n in 1..=8u32 {
                let base = sphere_packing_bound::<ExactCount>(&params(q, 1, t, n)).unwrap();
                for b in 2..=3 {
                    let other = sphere_packing_bound::<ExactCount>(&params(q, b, t, n)).unwrap();
                    check(other == base, || {
                        format!("q={q} t={t} n={n} b={b}: {} vs {}", other.value, base.value)
                    })?;
                }
                points += 1;
            }
        }
    }
    Ok(format!("{points} (q,t,n) points identical across b = 1, 2, 3"))
}

fn random_word(rng: &mut ChaCha8Rng, n: usize, q: u32) -> Sequence {
    Sequence::new((0..n).map(|_| rng.gen_range(0..q as u8)).collect(), q).unwrap()
}

fn ac7() -> Outcome {
    let mut grid = Vec::new();
    for q in [2u32, 3] {
        for b in 2..=3usize {
            for t in 1..=2usize {
                for n in 1..=6usize {
                    grid.push((BallKind::Insertion, q, b, t, n));
                }
            }
        }
    }
    for b in 2..=3usize {
        for t in 1..=2usize {
            for n in (b * (t + 1) - 1)..=10 {
                grid.push((BallKind::Deletion, 2, b, t, n));
            }
        }
    }
    let results: Vec<Result<(usize, Option<String>), String>> = grid
        .par_iter()
        .enumerate()
        .map(|(g, &(kind, q, b, t, n))| {
            let p = params(q, b as u32, t as u32, n as u32);
            let thr = match kind {
                BallKind::Insertion => count(ins_intersection_max(&p).unwrap()),
                BallKind::Deletion => count(del_intersection_max_binary(&p).unwrap()),
            };
            let tag = format!("{kind} q={q} b={b} t={t} n={n}");
            if kind == BallKind::Deletion {
                let largest = count(del_ball_max(&p).unwrap());
                if largest <= thr {
                    return Ok((
                        0,
                        Some(format!(
                            "{tag}: largest ball {largest} <= threshold {thr}, no valid input"
                        )),
                    ));
                }
            }
            let mut done = 0;
            let mut draw = 0u64;
            while done < TRIALS {
                let seed = trial_seed(MASTER_SEED ^ ((g as u64) << 32), draw);
                draw += 1;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let x = random_word(&mut rng, n, q);
                let sample = match sample_distinct_outputs(&x, t, b, kind, thr + 1, rng.gen(), CAP) {
                    Ok(s) => s,
                    // Centers whose ball cannot hold threshold + 1 words are redrawn.
                    Err(Error::BallTooSmall { .. }) => continue,
                    Err(e) => return Err(format!("{tag}: {e}")),
                };
                let u = sample.outputs().unwrap();
                let got = match kind {
                    BallKind::Insertion => reconstruct_from_insertions(&u, n, q, b, t),
                    BallKind::Deletion => reconstruct_from_deletions(&u, n, b, t),
                };
                match got {
                    Ok(r) if r.word == x => done += 1,
                    Ok(r) => return Err(format!("{tag} seed={seed}: recovered {} for {x}", r.word)),
                    Err(e) => return Err(format!("{tag} seed={seed} x={x}: {e}")),
                }
            }
            Ok((done, None))
        })
        .collect();
    let mut trials = 0;
    let mut notes = Vec::new();
    for r in results {
        let (done, note) = r?;
        trials += done;
        notes.extend(note);
    }
    let mut msg = format!(
        "{trials} trials over {} grid points, all recovered",
        grid.len() - notes.len()
    );
    if !notes.is_empty() {
        msg.push_str(&format!(
            "; {} points have no admissible input: {}",
            notes.len(),
            notes.join("; ")
        ));
    }
    Ok(msg)
}

fn tightness(
    x: &Sequence,
    y: &Sequence,
    t: usize,
    b: usize,
    kind: BallKind,
    expected: usize,
    run: impl Fn(&OutputSet) -> burstrecon::Result<burstrecon::ReconstructionResult>,
) -> Result<(), String> {
    let (bx, by) = match kind {
        BallKind::Insertion => (
            enumerate_insertion_ball(x, t, b, CAP),
            enumerate_insertion_ball(y, t, b, CAP),
        ),
        BallKind::Deletion => (
            enumerate_deletion_ball(x, t, b, CAP),
            enumerate_deletion_ball(y, t, b, CAP),
        ),
    };
    let u = intersection(&bx.unwrap(), &by.unwrap()).unwrap();
    check(u.len() == expected, || {
        format!("{kind}: intersection {} vs threshold {expected}", u.len())
    })?;
    for w in u.iter() {
        let both = is_descendant(x, w, t, b, kind).unwrap() && is_descendant(y, w, t, b, kind).unwrap();
        check(both, || format!("{kind}: {w} not accepted by both centers"))?;
    }
    match run(&u) {
        Err(Error::BelowThreshold { .. }) => Ok(()),
        Err(e) => Err(format!("{kind}: refused with unexpected error {e}")),
        Ok(r) => Err(format!("{kind}: returned {} for a two-center set", r.word)),
    }
}

fn ac8() -> Outcome {
    let zero = Sequence::parse("0", 2).unwrap();
    let one = Sequence::parse("1", 2).unwrap();
    tightness(&zero, &one, 1, 2, BallKind::Insertion, 4, |u| {
        reconstruct_from_insertions(u, 1, 2, 2, 1)
    })?;
    let (x, y) = deletion_extremal_pair(7, 2);
    tightness(&x, &y, 2, 2, BallKind::Deletion, 6, |u| {
        reconstruct_from_deletions(u, 7, 2, 2)
    })?;
    Ok(format!(
        "0/1 (ins, 4 words) and {x}/{y} (del, 6 words): both centers accept, reconstruction refuses"
    ))
}

fn ac9() -> Outcome {
    for (q, b, n) in [(2u32, 2usize, 6usize), (3, 2, 5)] {
        let mut hist: HashMap<usize, usize> = HashMap::new();
        for x in words(n, q) {
            *hist.entry(radius1_del_ball_size(&x, b).unwrap()).or_default() += 1;
        }
        for i in 1..=(n - b + 1) {
            let expected = count(count_centers_by_radius1_ball_size(q, b as u32, n as u32, i as u32).unwrap());
            let got = hist.get(&i).copied().unwrap_or(0);
            check(got == expected, || {
                format!("q={q} b={b} n={n} size {i}: {got} centers vs {expected}")
            })?;
        }
        check(hist.keys().all(|&i| i >= 1 && i <= n - b + 1), || {
            "ball size out of range".into()
        })?;
    }
    Ok("histograms for (2,2,6) and (3,2,5) match".into())
}

fn median_time(repeats: usize, mut f: impl FnMut()) -> Duration {
    let mut times: Vec<Duration> = (0..repeats)
        .map(|_| {
            let start = Instant::now();
            f();
            start.elapsed()
        })
        .collect();
    times.sort();
    times[repeats / 2]
}

fn ac10() -> Outcome {
    const REPEATS: usize = 21;
    let b = 2usize;
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED);
    // (kind, n, t, N): N above the threshold and 2N within the ball.
    let configs = [
        (BallKind::Insertion, 30usize, 2usize, 1000usize),
        (BallKind::Deletion, 60, 3, 4000),
    ];
    let mut report = Vec::new();
    for (kind, n, t, small) in configs {
        let x = match kind {
            BallKind::Insertion => random_word(&mut rng, n, 2),
            BallKind::Deletion => b_cyclic(n, 2, b, 0).unwrap(),
        };
        let big = sample_distinct_outputs(&x, t, b, kind, 2 * small, rng.gen(), CAP)
            .map_err(|e| e.to_string())?
            .outputs()
            .unwrap();
        let half = OutputSet::from_words(big.iter().take(small).cloned()).unwrap();
        let time = |u: &OutputSet| {
            median_time(REPEATS, || match kind {
                BallKind::Insertion => {
                    reconstruct_from_insertions(u, n, 2, b, t).unwrap();
                }
                BallKind::Deletion => {
                    deletion_majority_phase(u, n, b, t).unwrap();
                }
            })
        };
        time(&half);
        let (t1, t2) = (time(&half), time(&big));
        let ratio = t2.as_secs_f64() / t1.as_secs_f64().max(1e-9);
        check(ratio <= 4.0, || {
            format!("{kind}: N={small} {t1:?}, N={} {t2:?}, ratio {ratio:.2} > 4", 2 * small)
        })?;
        report.push(format!("{kind} n={n} t={t} N={small}: ratio {ratio:.2}"));
    }
    Ok(format!("median of {REPEATS}, time(2N)/time(N): {}", report.join(", ")))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC1", "insertion ball regularity", ac1),
        ("AC2", "insertion intersection maximum", ac2),
        ("AC3", "single-burst spot values", ac3),
        ("AC4", "deletion ball maximum and extremal centers", ac4),
        ("AC5", "binary deletion intersection maximum", ac5),
        ("AC6", "sphere-packing bound independent of b", ac6),
        ("AC7", "reconstruction round trips at threshold + 1", ac7),
        ("AC8", "threshold tightness", ac8),
        ("AC9", "radius-1 deletion ball histogram", ac9),
        ("AC10", "reconstruction time linear in N", ac10),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {id} {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id} {name}: {detail} ({secs:.1}s)");
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
