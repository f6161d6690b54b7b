//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Random draws use fixed seeds.

use std::time::{Duration, Instant};

use impatience::ce::{
    ce_hyperbolic_rate, decay_constant, two_scenario_rate, verify_ce_monotone,
    weighted_harmonic_mean, HyperbolicBundle,
};
use impatience::comparison::{
    classify, convex_transform_test, fit_equal_di_exponent, z_grid_for, ExponentFit, Relation,
    Verdict, DEFAULT_TOL,
};
use impatience::discount::{index_of_di, Tabulated};
use impatience::figures::{figure, Preset};
use impatience::household::{household_report, Choice};
use impatience::mixture::{
    decompose_index, mixture_rate, theorem_grid, verify_theorem_main, Interpretation, Mixture,
};
use impatience::{Discount, DiscountSpec, Family, TimeGrid};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Check,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn household() -> Check {
    let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let rep = household_report(50);
    let first = &rep.rows[0];
    ensure(first.earlier == q(20, 1), || format!("earlier total {}", first.earlier))?;
    ensure(first.later == q(39, 2), || format!("later total {}", first.later))?;
    ensure(first.choice == Choice::Earlier, || "period 0 should prefer earlier".into())?;
    // Oracle: 15·(0.8^{t+1} + 0.5^{t+1}) - 10·(0.8^t + 0.5^t), exactly.
    let (a, b) = (q(4, 5), q(1, 2));
    for t in 1..=50u32 {
        let pa: BigRational = Pow::pow(&a, t);
        let pb: BigRational = Pow::pow(&b, t);
        let gap = q(15, 1) * (&pa * &a + &pb * &b) - q(10, 1) * (&pa + &pb);
        ensure(gap > BigRational::zero(), || format!("later does not win at t={t}"))?;
        let row = &rep.rows[t as usize];
        ensure(&row.later - &row.earlier == gap, || format!("report differs from oracle at t={t}"))?;
        ensure(row.choice == Choice::Later, || format!("choice at t={t} is {:?}", row.choice))?;
    }
    ensure(rep.flips == vec![1], || format!("flips {:?}", rep.flips))?;
    Ok("totals 20 vs 39/2 at t=0; later wins exactly for t=1..50; single flip at t=1".into())
}

fn closed_form_indices() -> Check {
    let mut r = rng(2);
    let ts: Vec<f64> = TimeGrid::log(1e-3, 100.0, 60).unwrap().points().to_vec();
    let (mut worst_gh, mut worst_wb, mut worst_ex) = (0f64, 0f64, 0f64);
    for _ in 0..100 {
        let (alpha, h) = (r.gen_range(0.01..2.0), r.gen_range(0.01..2.0));
        let gh = DiscountSpec::generalized_hyperbolic(alpha, h).unwrap();
        let wb = DiscountSpec::slow_weibull(r.gen_range(0.01..2.0)).unwrap();
        let ex = DiscountSpec::exponential(r.gen_range(0.001..2.0)).unwrap();
        for &t in &ts {
            worst_gh = worst_gh.max(rel(index_of_di(&gh, t).unwrap(), h / (1.0 + h * t)));
            worst_wb = worst_wb.max(rel(index_of_di(&wb, t).unwrap(), 1.0 / (2.0 * t)));
            worst_ex = worst_ex.max(index_of_di(&ex, t).unwrap().abs());
        }
    }
    ensure(worst_gh <= 1e-8, || format!("generalized hyperbolic rel err {worst_gh:e}"))?;
    ensure(worst_wb <= 1e-8, || format!("slow Weibull rel err {worst_wb:e}"))?;
    ensure(worst_ex <= 1e-12, || format!("exponential |I| {worst_ex:e}"))?;
    Ok(format!(
        "max rel err GH {worst_gh:.1e}, Weibull {worst_wb:.1e}; max |I_exp| {worst_ex:.1e}"
    ))
}

fn figure_one() -> Check {
    let fig = figure(Preset::One).map_err(|e| e.to_string())?;
    let t = fig.table.column("t").unwrap();
    let i1 = fig.table.column("I_1").unwrap();
    let i2 = fig.table.column("I_2").unwrap();
    let im = fig.table.column("I_mix").unwrap();
    // Oracle: I1 - I2 = 0.1/(1+0.1t) - 1/(2t) = 0.05 (t-10) / (t (1+0.1t)).
    for k in 0..t.len() {
        let oracle = 0.05 * (t[k] - 10.0) / (t[k] * (1.0 + 0.1 * t[k]));
        ensure((i1[k] - i2[k] - oracle).abs() <= 1e-12, || format!("I1-I2 off at t={}", t[k]))?;
    }
    let flips: Vec<usize> = (1..t.len())
        .filter(|&k| (i1[k] - i2[k]).signum() != (i1[k - 1] - i2[k - 1]).signum())
        .collect();
    ensure(flips.len() == 1, || format!("{} sign changes", flips.len()))?;
    let k = flips[0];
    let (mut lo, mut hi) = (t[k - 1], t[k]);
    let gap = |s: f64| 0.1 / (1.0 + 0.1 * s) - 1.0 / (2.0 * s);
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) < 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    let root = 0.5 * (lo + hi);
    ensure((root - 10.0).abs() <= 0.01, || format!("root at {root}"))?;
    let reported: f64 = fig
        .table
        .meta_value("index_crossings")
        .and_then(|s| s.parse().ok())
        .ok_or("missing crossing metadata")?;
    ensure((reported - 10.0).abs() <= 0.01, || format!("reported crossing {reported}"))?;
    let margin = (0..t.len()).map(|k| im[k] - i1[k].min(i2[k])).fold(f64::INFINITY, f64::min);
    ensure(margin >= -1e-9, || format!("lower bound violated by {margin:e}"))?;
    ensure((0..t.len()).any(|k| im[k] < i1[k]), || "I_mix never below I_1".into())?;
    ensure((0..t.len()).any(|k| im[k] < i2[k]), || "I_mix never below I_2".into())?;
    Ok(format!(
        "bracket [{:.4}, {:.4}], root {root:.6}; min(I_mix - min I_i) = {margin:.2e}",
        t[k - 1],
        t[k]
    ))
}

fn di_chains() -> Check {
    let mut r = rng(4);
    let grid = theorem_grid();
    let mut min_gap = f64::INFINITY;
    for draw in 0..50 {
        let n = r.gen_range(2..=5);
        let mut hs: Vec<f64> = (0..n).map(|_| r.gen_range(0.01..1.0)).collect();
        hs.sort_by(|a, b| b.total_cmp(a));
        let components = hs
            .iter()
            .map(|&h| {
                let spec = DiscountSpec::generalized_hyperbolic(r.gen_range(0.01..1.0), h).unwrap();
                (spec, r.gen_range(0.05..1.0))
            })
            .collect();
        let m = Mixture::new(components, Interpretation::GroupAverage).map_err(|e| e.to_string())?;
        let v = verify_theorem_main(&m, &grid).map_err(|e| format!("draw {draw}: {e}"))?;
        ensure(v.verdict.relation == Relation::StrictlyMoreDi, || {
            format!("draw {draw} (h={hs:?}): {:?}", v.verdict.relation)
        })?;
        ensure(v.holds && v.index_gap > 0.0, || format!("draw {draw}: gap {:e}", v.index_gap))?;
        min_gap = min_gap.min(v.index_gap);
    }
    Ok(format!("50 chains StrictlyMoreDI; smallest index gap {min_gap:.2e}"))
}

fn random_spec(r: &mut ChaCha8Rng) -> DiscountSpec {
    match r.gen_range(0..7) {
        0 => DiscountSpec::exponential(r.gen_range(0.005..0.5)).unwrap(),
        1 => DiscountSpec::generalized_hyperbolic(r.gen_range(0.01..1.0), r.gen_range(0.01..1.0))
            .unwrap(),
        2 => DiscountSpec::proportional_hyperbolic(r.gen_range(0.01..1.0)).unwrap(),
        3 => DiscountSpec::zero_speed_hyperbolic(r.gen_range(0.01..1.0)).unwrap(),
        4 => DiscountSpec::slow_weibull(r.gen_range(0.01..1.0)).unwrap(),
        _ => {
            // Log-concave table: increasing impatience.
            let (a, b) = (r.gen_range(0.01..0.3), r.gen_range(0.001..0.05));
            let times: Vec<f64> = (0..=80).map(|k| k as f64 * 0.25).collect();
            let tab = Tabulated::from_fn(times, |t| (-a * t - b * t * t).exp()).unwrap();
            DiscountSpec::new(Family::Tabulated(tab), "ii").unwrap()
        }
    }
}

fn decomposition() -> Check {
    let mut r = rng(5);
    let (mut worst_id, mut worst_bound) = (0f64, f64::INFINITY);
    let mut tabulated_draws = 0;
    for draw in 0..100 {
        let n = r.gen_range(2..=6);
        let components: Vec<(DiscountSpec, f64)> =
            (0..n).map(|_| (random_spec(&mut r), r.gen_range(0.05..1.0))).collect();
        if components.iter().any(|(s, _)| matches!(s.family(), Family::Tabulated(_))) {
            tabulated_draws += 1;
        }
        let m = Mixture::new(components, Interpretation::GroupAverage).map_err(|e| e.to_string())?;
        let hi = m.domain().1.min(60.0);
        let grid = TimeGrid::log(1e-3, hi, 150).unwrap();
        let rep = decompose_index(&m, &grid).map_err(|e| format!("draw {draw}: {e}"))?;
        for k in 0..rep.times.len() {
            let err = (rep.i_direct[k] - rep.i_decomposed[k]).abs();
            worst_id = worst_id.max(err);
            ensure(rep.q[k] >= 0.0 && rep.n_values[k] >= 0.0, || {
                format!("draw {draw}: negative Q or N at t={}", rep.times[k])
            })?;
            let lower = rep.i_direct[k] - rep.min_component_index(k);
            worst_bound = worst_bound.min(lower);
        }
    }
    ensure(worst_id <= 1e-7, || format!("identity error {worst_id:e}"))?;
    ensure(worst_bound >= -1e-9, || format!("lower bound violated by {worst_bound:e}"))?;
    Ok(format!(
        "max |I_direct - I_decomposed| {worst_id:.1e}; min(I_mix - min I_i) {worst_bound:.1e}; {tabulated_draws} draws with II tables"
    ))
}

fn random_bundle(r: &mut ChaCha8Rng, n: usize) -> HyperbolicBundle {
    loop {
        let hs: Vec<f64> = (0..n).map(|_| r.gen_range(0.01..1.0)).collect();
        let ws: Vec<f64> = (0..n).map(|_| r.gen_range(0.05..1.0)).collect();
        let total: f64 = ws.iter().sum();
        let b = HyperbolicBundle::new(hs.into_iter().zip(ws.iter().map(|w| w / total)).collect())
            .unwrap();
        if b.entries().len() == n {
            return b;
        }
    }
}

fn harmonic_limit() -> Check {
    let fig3 = HyperbolicBundle::equal(&[0.01, 0.02, 0.03]).unwrap();
    let target = 9.0 / 550.0;
    let far = ce_hyperbolic_rate(&fig3, 1e6).unwrap().h;
    let err = rel(far, target);
    ensure(err <= 1e-3, || format!("h(1e6) rel err {err:e}"))?;
    let mut r = rng(6);
    for draw in 0..100 {
        let n = r.gen_range(2..=6);
        let b = random_bundle(&mut r, n);
        let (h_lim, mean) = (weighted_harmonic_mean(&b), b.arithmetic_mean());
        let fitted: Vec<f64> = (0..=30).map(|k| decay_constant(&b, 10f64.powf(3.0 + k as f64 / 10.0)).unwrap()).collect();
        let c = fitted.iter().cloned().fold(0.0, f64::max);
        ensure(fitted.iter().all(|f| (f / c - 1.0).abs() <= 0.5), || {
            format!("draw {draw}: fitted constants {fitted:?}")
        })?;
        for k in 0..=90 {
            let t = 10f64.powf(k as f64 / 10.0 - 3.0);
            let h = ce_hyperbolic_rate(&b, t).unwrap().h;
            ensure(h_lim < h && h < mean, || format!("draw {draw}: sandwich fails at t={t}"))?;
            if t >= 1.0 {
                let slack = 4.0 * f64::EPSILON * h;
                ensure(h - h_lim <= c / t + slack, || format!("draw {draw}: decay bound fails at t={t}"))?;
            }
        }
    }
    Ok(format!("h(1e6) within {err:.1e} of 9/550; 100 bundles sandwiched with C/t decay"))
}

fn monotone() -> Check {
    let mut r = rng(7);
    let grid = TimeGrid::log(1e-3, 1e6, 100).unwrap();
    for draw in 0..100 {
        let n = r.gen_range(2..=6);
        let b = random_bundle(&mut r, n);
        let rep = verify_ce_monotone(&b, &grid).map_err(|e| e.to_string())?;
        ensure(rep.monotone, || format!("draw {draw}: max increase {:e}", rep.max_violation))?;
    }
    let mut worst = 0f64;
    for _ in 0..100 {
        let b = random_bundle(&mut r, 2);
        for &t in grid.points() {
            let closed = two_scenario_rate(&b, t).unwrap();
            worst = worst.max(rel(ce_hyperbolic_rate(&b, t).unwrap().h, closed));
        }
    }
    ensure(worst <= 1e-12, || format!("closed form rel err {worst:e}"))?;
    Ok(format!("100 bundles strictly decreasing; two-scenario closed form rel err {worst:.1e}"))
}

fn weitzman() -> Check {
    let m = Mixture::equal(
        vec![
            DiscountSpec::exponential(0.01).unwrap(),
            DiscountSpec::exponential(0.02).unwrap(),
            DiscountSpec::exponential(0.03).unwrap(),
        ],
        Interpretation::ProbabilityWeights,
    )
    .unwrap();
    let r0 = mixture_rate(&m, 0.0).unwrap();
    ensure(r0 == 0.02, || format!("r(0) = {r0:e}"))?;
    let r1000 = mixture_rate(&m, 1000.0).unwrap();
    ensure((r1000 - 0.01).abs() <= 1e-4, || format!("r(1000) = {r1000}"))?;
    let grid = TimeGrid::hybrid(0.0, 1000.0, 100, 200).unwrap();
    let rates: Vec<f64> = grid.points().iter().map(|&t| mixture_rate(&m, t).unwrap()).collect();
    ensure(rates.windows(2).all(|w| w[1] < w[0]), || "r not strictly decreasing".into())?;
    Ok(format!("r(0) = {r0}, r(1000) - 0.01 = {:.2e}, decreasing on {} points", r1000 - 0.01, grid.len()))
}

fn coherence() -> Check {
    let mut r = rng(9);
    let mut samples: Vec<DiscountSpec> = Vec::new();
    for _ in 0..8 {
        samples.push(DiscountSpec::exponential(r.gen_range(0.005..0.5)).unwrap());
        samples.push(
            DiscountSpec::generalized_hyperbolic(r.gen_range(0.01..1.0), r.gen_range(0.01..1.0))
                .unwrap(),
        );
        samples.push(DiscountSpec::proportional_hyperbolic(r.gen_range(0.01..1.0)).unwrap());
        samples.push(DiscountSpec::zero_speed_hyperbolic(r.gen_range(0.01..1.0)).unwrap());
        samples.push(DiscountSpec::slow_weibull(r.gen_range(0.01..1.0)).unwrap());
    }
    let (mut strict, mut constant) = (0, 0);
    for d in &samples {
        let grid = if d.singular_at_origin() {
            TimeGrid::log(1e-3, 50.0, 300).unwrap()
        } else {
            TimeGrid::linear(0.0, 50.0, 300).unwrap()
        };
        let e = DiscountSpec::exponential(r.gen_range(0.01..0.5)).unwrap();
        let class = classify(d, &grid, DEFAULT_TOL).map_err(|e| e.to_string())?;
        let z = z_grid_for(&e, &grid).map_err(|e| e.to_string())?;
        let v = convex_transform_test(d, &e, &z, DEFAULT_TOL).map_err(|e| e.to_string())?;
        ensure(
            (class.verdict == Verdict::StrictlyDi) == (v.relation == Relation::StrictlyMoreDi),
            || format!("{}: {:?} vs {:?}", d.label(), class.verdict, v.relation),
        )?;
        if matches!(d.family(), Family::Exponential { .. }) {
            ensure(class.verdict == Verdict::ConstantImpatience, || {
                format!("{}: {:?}", d.label(), class.verdict)
            })?;
            constant += 1;
        }
        if class.verdict == Verdict::StrictlyDi {
            strict += 1;
        }
    }
    Ok(format!(
        "{} samples; {strict} strictly DI matched by transform test; {constant} exponentials constant",
        samples.len()
    ))
}

fn equal_di_recovery() -> Check {
    let grid = TimeGrid::log(1e-3, 100.0, 400).unwrap();
    let mut worst = 0f64;
    for c in [0.5, 2.0, 3.0] {
        // D^c built by hand from the closed forms.
        let pairs = [
            (DiscountSpec::exponential(0.03 * c), DiscountSpec::exponential(0.03)),
            (
                DiscountSpec::generalized_hyperbolic(0.2 * c, 0.1),
                DiscountSpec::generalized_hyperbolic(0.2, 0.1),
            ),
            (
                DiscountSpec::generalized_hyperbolic(0.1 * c, 0.1),
                DiscountSpec::proportional_hyperbolic(0.1),
            ),
            (
                DiscountSpec::generalized_hyperbolic(2.0 * 0.1 * c, 0.1),
                DiscountSpec::zero_speed_hyperbolic(0.1),
            ),
            (DiscountSpec::slow_weibull(0.12 * c), DiscountSpec::slow_weibull(0.12)),
        ];
        for (d1, d2) in pairs {
            let (d1, d2) = (d1.unwrap(), d2.unwrap());
            let fit = fit_equal_di_exponent(&d1, &d2, &grid).map_err(|e| e.to_string())?;
            let got = fit.exponent().ok_or_else(|| format!("{} rejected for c={c}", d2.label()))?;
            worst = worst.max((got - c).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("exponent error {worst:e}"))?;
    let cross = [
        (DiscountSpec::proportional_hyperbolic(0.1), DiscountSpec::exponential(0.1)),
        (DiscountSpec::zero_speed_hyperbolic(0.1), DiscountSpec::slow_weibull(0.12)),
        (DiscountSpec::generalized_hyperbolic(0.2, 0.1), DiscountSpec::slow_weibull(0.3)),
        (DiscountSpec::exponential(0.05), DiscountSpec::slow_weibull(0.2)),
        (DiscountSpec::generalized_hyperbolic(0.2, 0.2), DiscountSpec::proportional_hyperbolic(0.1)),
    ];
    for (d1, d2) in cross {
        let (d1, d2) = (d1.unwrap(), d2.unwrap());
        let fit = fit_equal_di_exponent(&d1, &d2, &grid).map_err(|e| e.to_string())?;
        ensure(matches!(fit, ExponentFit::NotEquallyDi { .. }), || {
            format!("{} vs {} accepted", d1.label(), d2.label())
        })?;
    }
    Ok(format!("exponents recovered within {worst:.1e}; 5 cross-family pairs rejected"))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "household reversal", budget: Duration::from_secs(1), run: household },
        Criterion { id: 2, name: "closed-form index formulas", budget: Duration::from_secs(1), run: closed_form_indices },
        Criterion { id: 3, name: "figure 1 crossing and lower bound", budget: Duration::from_secs(1), run: figure_one },
        Criterion { id: 4, name: "mixtures of DI chains", budget: Duration::from_secs(10), run: di_chains },
        Criterion { id: 5, name: "index decomposition", budget: Duration::from_secs(10), run: decomposition },
        Criterion { id: 6, name: "harmonic-mean limit", budget: Duration::from_secs(5), run: harmonic_limit },
        Criterion { id: 7, name: "certainty-equivalent monotonicity", budget: Duration::from_secs(5), run: monotone },
        Criterion { id: 8, name: "exponential certainty-equivalent rate", budget: Duration::from_secs(1), run: weitzman },
        Criterion { id: 9, name: "classification coherence", budget: Duration::from_secs(5), run: coherence },
        Criterion { id: 10, name: "equal-DI exponent recovery", budget: Duration::from_secs(1), run: equal_di_recovery },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.budget => Err(format!("{detail}; over budget {:?}", c.budget)),
            other => other,
        };
        let ms = elapsed.as_secs_f64() * 1e3;
        match outcome {
            Ok(detail) => println!("PASS [{:>2}] {}: {detail} ({ms:.1} ms)", c.id, c.name),
            Err(why) => {
                failures += 1;
                println!("FAIL [{:>2}] {}: {why} ({ms:.1} ms)", c.id, c.name);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
