//! Runtime property suites, shared by the `validate` command and the tests.
//!
//! Every check compares two independent routes (trace formula vs bit-flip
//! convolution, enumeration vs closed form, spectrum vs analytic value) or an
//! invariant against its tolerance, over grids and seeded random states.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::bitflip::{cirelson_floor, flip_convolve, pbflip_outcome, predicted_probability, CIRELSON_BOUND};
use crate::quantum::linalg::{Op2, Op4};
use crate::quantum::observable::{observables, Side};
use crate::quantum::povm::{build_joint_povm, povm_elements, LocalOutcome, MeasurementSetting, VisibilityPair};
use crate::quantum::state::{
    bell_expectation, bell_operator, random_state, singlet_state, werner_state, TwoQubitState,
};
use crate::sim::counts::{probabilities_from_counts, sample_counts};
use crate::sim::joint::{joint_distribution, quasi_distribution};
use crate::sim::outcome::{b_value, minimal_outcomes, Outcome};
use crate::sim::remote::joint_visibilities;

pub const POVM_TOL: f64 = 1e-12;
pub const DIST_TOL: f64 = 1e-10;
pub const ORACLE_THETAS: [f64; 7] = [0.0, 20.0, 40.0, 45.0, 50.0, 70.0, 90.0];

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst observed deviation or a short explanation.
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Suite {
    name: &'static str,
    checks: Vec<Check>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite { name, checks: Vec::new() }
    }

    /// Pass when `worst <= tol`.
    fn within(&mut self, name: &str, worst: f64, tol: f64) {
        self.checks.push(Check {
            name: name.to_string(),
            passed: worst <= tol,
            detail: format!("worst {worst:.3e} (tol {tol:.0e})"),
        });
    }

    fn holds(&mut self, name: &str, ok: bool, detail: String) {
        self.checks.push(Check { name: name.to_string(), passed: ok, detail });
    }

    fn finish(self) -> SuiteReport {
        SuiteReport { suite: self.name, checks: self.checks }
    }
}

fn half_degree_grid() -> impl Iterator<Item = f64> {
    (0..=180).map(|i| i as f64 * 0.5)
}

fn random_states(seed: u64, n: usize) -> Vec<TwoQubitState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_state(&mut rng)).collect()
}

pub fn povm_suite() -> SuiteReport {
    let mut s = Suite::new("povm");
    let (mut neg, mut comp) = (0.0f64, 0.0f64);
    for side in [Side::A, Side::B] {
        for t in half_degree_grid() {
            let p = build_joint_povm(MeasurementSetting::new(t, side));
            neg = neg.max(-p.min_eigenvalue());
            comp = comp.max(p.completeness_error());
        }
    }
    s.within("positivity over 0.5° grid", neg, POVM_TOL);
    s.within("completeness over 0.5° grid", comp, POVM_TOL);

    // the uncertainty relation is exactly the positivity boundary
    let mut all_fail = true;
    let mut all_ok = true;
    for k in 0..72 {
        let phi = (k as f64 * 5.0).to_radians();
        for (r2, outside) in [(1.01, true), (1.2, true), (0.99, false), (0.5, false)] {
            let r = f64::sqrt(r2);
            let vis = VisibilityPair::new_unchecked(r * phi.cos(), r * phi.sin());
            for side in [Side::A, Side::B] {
                let min = povm_elements(vis, side).iter().map(Op2::min_eigenvalue).fold(f64::INFINITY, f64::min);
                if outside {
                    all_fail &= min < 0.0;
                } else {
                    all_ok &= min >= -POVM_TOL;
                }
            }
        }
    }
    s.holds("vx²+vy² > 1 breaks positivity", all_fail, "radius² ∈ {1.01, 1.2}, 72 directions".into());
    s.holds("vx²+vy² < 1 keeps positivity", all_ok, "radius² ∈ {0.5, 0.99}, 72 directions".into());
    s.finish()
}

pub fn operator_suite() -> SuiteReport {
    let mut s = Suite::new("operators");
    let worst = [Side::A, Side::B]
        .iter()
        .map(|&side| {
            let p = observables(side);
            p.x.operator.anticommutator(&p.y.operator).norm()
        })
        .fold(0.0, f64::max);
    s.within("X̂ and Ŷ anticommute on each side", worst, 1e-12);

    let b = bell_operator();
    let ev = b.eigenvalues_hermitian();
    let spec = (ev[0] + CIRELSON_BOUND).abs().max((ev[3] - CIRELSON_BOUND).abs());
    s.within("B̂ extreme eigenvalues ±2√2", spec, 1e-10);

    let a = observables(Side::A);
    let bb = observables(Side::B);
    let comm = a.x.operator.commutator(&a.y.operator).kron(&bb.x.operator.commutator(&bb.y.operator));
    let sq = (b * b).max_abs_diff(&(Op4::identity().scale(4.0) + comm));
    s.within("B̂² = 4I + [X̂_A,Ŷ_A]⊗[X̂_B,Ŷ_B]", sq, 1e-12);

    let lin = (0..=20)
        .map(|i| {
            let v = i as f64 / 20.0;
            (bell_expectation(&werner_state(v).expect("v in range")) + v * CIRELSON_BOUND).abs()
        })
        .fold(0.0, f64::max);
    s.within("⟨B̂⟩ linear in Werner weight", lin, 1e-12);
    s.finish()
}

pub fn joint_suite(seed: u64) -> SuiteReport {
    let mut s = Suite::new("joint");
    let states = random_states(seed, 50);
    let settings = [(0.0, 0.0), (20.0, 70.0), (45.0, 45.0), (33.3, 12.0), (90.0, 90.0), (61.0, 5.0)];
    let (mut norm, mut neg, mut marg, mut corr) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for st in &states {
        for &(ta, tb) in &settings {
            let d = joint_distribution(st, ta, tb);
            norm = norm.max((d.total() - 1.0).abs());
            neg = neg.max(-d.probs.iter().copied().fold(f64::INFINITY, f64::min));

            let ra = st.reduced(Side::A);
            let ea = povm_elements(VisibilityPair::from_theta(ta), Side::A);
            let m = d.marginal(Side::A);
            for lo in LocalOutcome::ALL {
                marg = marg.max((m[lo.index()] - ra.expectation(&ea[lo.index()])).abs());
            }

            let (va, vb) = (VisibilityPair::from_theta(ta), VisibilityPair::from_theta(tb));
            let (oa, ob) = (observables(Side::A), observables(Side::B));
            let pairs = [
                (va.vx * vb.vx, oa.x.operator.kron(&ob.x.operator), 0usize, 2usize),
                (va.vx * vb.vy, oa.x.operator.kron(&ob.y.operator), 0, 3),
                (va.vy * vb.vx, oa.y.operator.kron(&ob.x.operator), 1, 2),
                (va.vy * vb.vy, oa.y.operator.kron(&ob.y.operator), 1, 3),
            ];
            for (scale, op, i, j) in pairs {
                let joint = d.correlation(|o| o.values()[i] * o.values()[j]);
                corr = corr.max((joint - scale * st.expectation(&op)).abs());
            }
        }
    }
    s.within("normalization (50 random states)", norm, DIST_TOL);
    s.within("positivity (50 random states)", neg, POVM_TOL);
    s.within("marginals match local POVM", marg, 1e-12);
    s.within("correlations scale by V_A·V_B", corr, 1e-12);

    let d = joint_distribution(&singlet_state(), 45.0, 45.0);
    let spread = |b: i32| {
        let v: Vec<f64> = d.iter().filter(|(o, _)| b_value(*o) == b).map(|(_, p)| p).collect();
        v.iter().copied().fold(f64::NEG_INFINITY, f64::max) - v.iter().copied().fold(f64::INFINITY, f64::min)
    };
    s.within("singlet at 45°: p depends only on b", spread(2).max(spread(-2)), 1e-12);
    s.finish()
}

pub fn oracle_suite(seed: u64) -> SuiteReport {
    let mut s = Suite::new("oracle");
    let mut worst = 0.0f64;
    for st in random_states(seed ^ 0x5eed, 100) {
        let q = quasi_distribution(&st);
        for t in ORACLE_THETAS {
            let v = VisibilityPair::from_theta(t);
            let conv = flip_convolve(&q, v, v).expect("visibilities in range");
            let direct = joint_distribution(&st, t, t);
            for o in Outcome::all() {
                worst = worst.max((conv.p(o) - direct.p(o)).abs());
            }
        }
    }
    s.within("flip convolution = trace formula (100 states × 7 θ)", worst, DIST_TOL);

    let singlet = singlet_state();
    let mut line = 0.0f64;
    for t in half_degree_grid() {
        let v = VisibilityPair::from_theta(t);
        let d = joint_distribution(&singlet, t, t);
        for o in minimal_outcomes() {
            let f = pbflip_outcome(o, v, v).expect("on circle");
            line = line.max((d.p(o) - predicted_probability(CIRELSON_BOUND, f)).abs());
        }
    }
    s.within("singlet low outcomes lie on the predicted line", line, DIST_TOL);
    s.finish()
}

pub fn bitflip_suite() -> SuiteReport {
    let mut s = Suite::new("bitflip");
    let [m1, m2, m3, m4] = minimal_outcomes();
    let mut closed = 0.0f64;
    let floor = cirelson_floor(CIRELSON_BOUND).expect("positive");
    let mut below_floor = 0.0f64;
    for t in half_degree_grid() {
        let v = VisibilityPair::from_theta(t);
        let (vx, vy) = (v.vx, v.vy);
        let eq16 = 0.25 * (2.0 - vx * vx - 2.0 * vx * vy + vy * vy);
        let eq17 = 0.25 * (2.0 + vx * vx - 2.0 * vx * vy - vy * vy);
        for (o, want) in [(m1, eq16), (m2, eq16), (m3, eq17), (m4, eq17)] {
            let f = pbflip_outcome(o, v, v).expect("on circle");
            closed = closed.max((f - want).abs());
            below_floor = below_floor.max(floor - f);
        }
    }
    s.within("enumeration matches closed forms", closed, 1e-12);
    s.within("no low outcome below the Cirel'son floor", below_floor, 1e-12);
    let sat = predicted_probability(CIRELSON_BOUND, floor).abs();
    s.within("predicted probability vanishes at the floor", sat, 1e-12);

    let singlet = singlet_state();
    let p = |o: Outcome, t: f64| joint_distribution(&singlet, t, t).p(o);
    let grid: Vec<f64> = (0..=900).map(|i| i as f64 * 0.1).collect();
    let argmin =
        |o: Outcome| grid.iter().copied().min_by(|&a, &b| p(o, a).total_cmp(&p(o, b))).expect("non-empty grid");
    let (t1, t3) = (argmin(m1), argmin(m3));
    s.holds(
        "minima at 22.5° and 67.5°",
        (t1 - 22.5).abs() < 1e-9 && (t3 - 67.5).abs() < 1e-9,
        format!("{m1} at {t1}°, {m3} at {t3}°"),
    );
    let dec = grid.windows(2).filter(|w| w[1] <= 22.5).all(|w| p(m1, w[1]) < p(m1, w[0]));
    let inc = grid.windows(2).filter(|w| w[0] >= 22.5).all(|w| p(m1, w[1]) > p(m1, w[0]));
    s.holds("p(+,+;+,-) falls to 22.5° then rises", dec && inc, "0.1° grid".into());
    s.finish()
}

pub fn visibility_suite() -> SuiteReport {
    let mut s = Suite::new("visibility");
    let mut worst = 0.0f64;
    let mut err = None;
    for st in [singlet_state(), werner_state(0.975).expect("in range")] {
        for side in [Side::A, Side::B] {
            for i in 0..=9 {
                match joint_visibilities(&st, 10.0 * i as f64, side) {
                    Ok(v) => worst = worst.max((v.radius - 1.0).abs()),
                    Err(e) => err = Some(e.to_string()),
                }
            }
        }
    }
    match err {
        Some(e) => s.holds("radius 1 on the θ grid", false, e),
        None => s.within("radius 1 on the θ grid", worst, 1e-10),
    }
    s.finish()
}

pub fn monte_carlo_suite(seed: u64) -> SuiteReport {
    let mut s = Suite::new("monte-carlo");
    let d = joint_distribution(&werner_state(0.975).expect("in range"), 20.0, 20.0);
    let mut worst = 0.0f64;
    for k in 0..4 {
        let table = sample_counts(&d, 1e7, seed.wrapping_add(k)).expect("positive total");
        let est = probabilities_from_counts(&table).expect("non-empty");
        for o in Outcome::all() {
            let i = o.index();
            worst = worst.max((est.dist.probs[i] - d.probs[i]).abs() / est.std_err[i]);
        }
    }
    s.within("10⁷-count tables recover p within 5σ", worst, 5.0);
    s.finish()
}

pub fn run_all(seed: u64) -> Vec<SuiteReport> {
    vec![
        povm_suite(),
        operator_suite(),
        joint_suite(seed),
        oracle_suite(seed),
        bitflip_suite(),
        visibility_suite(),
        monte_carlo_suite(seed),
    ]
}
