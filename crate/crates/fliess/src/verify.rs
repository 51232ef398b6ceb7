//! Seeded random verification of the algebraic identity suite.
//!
//! Every identity the library relies on is checked on reproducible sparse
//! random instances: series with support size at most 8, coefficients n/d
//! with n in {-3..3}\{0} and d in {1,2,3}. Each (identity, instance) pair
//! derives its own RNG from the configured seed, so reports are
//! byte-identical across runs and instance order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::pair::{affine_feedback, lie_bracket, AffinePair, TangentPair};
use crate::rational::Rational;
use crate::series::TruncatedSeries;
use crate::words::Word;

const MAX_SUPPORT: usize = 8;

/// Parameters of a verification run.
#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub degree: usize,
    pub instances: u64,
    pub seed: u64,
}

/// Outcome of one identity over all instances.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Human-readable description of the first failing instance.
    pub counterexample: Option<String>,
    /// Set by callers that persist counterexamples to disk.
    pub counterexample_file: Option<String>,
}

/// Pass/fail record for the whole suite.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub degree: usize,
    pub instances: u64,
    pub seed: u64,
    pub checks: Vec<IdentityCheck>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Line-oriented rendering: `IDENTITY <name> PASS|FAIL [file]`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for check in &self.checks {
            out.push_str("IDENTITY ");
            out.push_str(check.name);
            out.push_str(if check.passed { " PASS" } else { " FAIL" });
            if let Some(file) = &check.counterexample_file {
                out.push(' ');
                out.push_str(file);
            }
            out.push('\n');
        }
        out
    }
}

// ---------------------------------------------------------------------------
// samplers

pub fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let numer = *[-3i64, -2, -1, 1, 2, 3]
        .get(rng.gen_range(0..6))
        .expect("index in range");
    let denom = rng.gen_range(1..=3i64);
    Rational::new(numer, denom)
}

/// A word of length uniform in [min_len, max_len] with uniform letters.
pub fn random_word(rng: &mut ChaCha8Rng, min_len: usize, max_len: usize) -> Word {
    let len = rng.gen_range(min_len..=max_len);
    let bits = if len == 0 {
        0
    } else {
        rng.gen_range(0..(1u64 << len))
    };
    let letters: Vec<_> = (0..len)
        .map(|i| {
            if (bits >> (len - 1 - i)) & 1 == 0 {
                crate::words::Letter::X0
            } else {
                crate::words::Letter::X1
            }
        })
        .collect();
    Word::from_letters(&letters)
}

/// A word of length in [1, max_len] guaranteed to contain x1.
pub fn random_word_with_x1(rng: &mut ChaCha8Rng, max_len: usize) -> Word {
    assert!(max_len >= 1);
    loop {
        let w = random_word(rng, 1, max_len);
        if w.contains_x1() {
            return w;
        }
    }
}

/// A sparse random series with support size <= 8.
pub fn random_series(rng: &mut ChaCha8Rng, degree: usize) -> TruncatedSeries {
    let support = rng.gen_range(1..=MAX_SUPPORT);
    TruncatedSeries::from_terms(
        (0..support).map(|_| (random_rational(rng), random_word(rng, 0, degree))),
        degree,
    )
}

/// A sparse random proper series (no constant term).
pub fn random_proper_series(rng: &mut ChaCha8Rng, degree: usize) -> TruncatedSeries {
    if degree == 0 {
        return TruncatedSeries::zero(0);
    }
    let support = rng.gen_range(1..=MAX_SUPPORT);
    TruncatedSeries::from_terms(
        (0..support).map(|_| (random_rational(rng), random_word(rng, 1, degree))),
        degree,
    )
}

/// A random member of the shuffle group M: 1 + proper part.
pub fn random_in_m(rng: &mut ChaCha8Rng, degree: usize) -> TruncatedSeries {
    TruncatedSeries::one(degree).add(&random_proper_series(rng, degree))
}

/// A random group pair (c1, c2) with c1 in M.
pub fn random_pair(rng: &mut ChaCha8Rng, degree: usize) -> AffinePair {
    AffinePair::new(random_in_m(rng, degree), random_series(rng, degree))
        .expect("constant term is 1 by construction")
}

/// A random tangent pair (proper, arbitrary).
pub fn random_tangent(rng: &mut ChaCha8Rng, degree: usize) -> TangentPair {
    TangentPair::new(random_proper_series(rng, degree), random_series(rng, degree))
        .expect("first component proper by construction")
}

/// A random series supported on powers of x0 (a member of R[[x0]]).
pub fn random_drift_series(rng: &mut ChaCha8Rng, degree: usize) -> TruncatedSeries {
    let support = rng.gen_range(1..=MAX_SUPPORT);
    TruncatedSeries::from_terms(
        (0..support).map(|_| {
            (
                random_rational(rng),
                Word::x0_power(rng.gen_range(0..=degree)),
            )
        }),
        degree,
    )
}

/// Lowest degree at which the pair deviates from the identity, or None for
/// the identity itself.
fn deviation_degree(d: &AffinePair) -> Option<usize> {
    let one = TruncatedSeries::one(d.degree());
    let d1_dev = d.first().sub(&one).min_support_len();
    let d2_dev = d.second().min_support_len();
    match (d1_dev, d2_dev) {
        (None, None) => None,
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (Some(a), Some(b)) => Some(a.min(b)),
    }
}

/// A random pair distinct from the identity whose deviation is visible at
/// truncation `degree` under `budget` extra letters: deviation degree
/// <= degree - budget. Falls back to adding a constant to the additive
/// channel, which deviates at degree 0.
pub fn random_visible_pair(rng: &mut ChaCha8Rng, degree: usize, budget: usize) -> AffinePair {
    let limit = degree.saturating_sub(budget);
    for _ in 0..32 {
        let d = random_pair(rng, degree);
        if matches!(deviation_degree(&d), Some(m) if m <= limit) {
            return d;
        }
    }
    let d = random_pair(rng, degree);
    let bumped = d
        .second()
        .add(&TruncatedSeries::constant(Rational::one(), degree));
    AffinePair::new(d.first().clone(), bumped).expect("still in the group")
}

/// A random pair that moves the coset [x1]: either the multiplicative
/// channel deviates from 1 below the truncation horizon, or the additive
/// channel carries a non-drift word below it. Falls back to adding an x1
/// term to the additive channel. Requires degree >= 2.
pub fn random_quotient_effective_pair(rng: &mut ChaCha8Rng, degree: usize) -> AffinePair {
    assert!(degree >= 2);
    let visible = |d: &AffinePair| {
        let one = TruncatedSeries::one(degree);
        let d1_dev = d.first().sub(&one).min_support_len();
        let d2_effective = d
            .second()
            .terms()
            .any(|(w, _)| !w.is_x0_power() && w.len() < degree);
        matches!(d1_dev, Some(m) if m < degree) || d2_effective
    };
    for _ in 0..32 {
        let d = random_pair(rng, degree);
        if visible(&d) {
            return d;
        }
    }
    let d = random_pair(rng, degree);
    let bumped = d.second().add(&TruncatedSeries::monomial(
        Rational::one(),
        Word::x1_power(1),
        degree,
    ));
    AffinePair::new(d.first().clone(), bumped).expect("still in the group")
}

// ---------------------------------------------------------------------------
// identity checks

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

macro_rules! ensure_eq {
    ($lhs:expr, $rhs:expr, $($fmt:tt)+) => {{
        let lhs = $lhs;
        let rhs = $rhs;
        if lhs != rhs {
            return Err(format!(
                "{}\n  lhs = {}\n  rhs = {}",
                format!($($fmt)+),
                lhs,
                rhs
            ));
        }
    }};
}

type CheckResult = Result<(), String>;
type CheckFn = fn(&mut ChaCha8Rng, usize) -> CheckResult;

fn check_shuffle_commutative(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let a = random_series(rng, n);
    let b = random_series(rng, n);
    ensure_eq!(a.shuffle(&b), b.shuffle(&a), "a = {a}, b = {b}");
    Ok(())
}

fn check_shuffle_associative(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let a = random_series(rng, n);
    let b = random_series(rng, n);
    let c = random_series(rng, n);
    ensure_eq!(
        a.shuffle(&b).shuffle(&c),
        a.shuffle(&b.shuffle(&c)),
        "a = {a}, b = {b}, c = {c}"
    );
    Ok(())
}

fn check_shuffle_bilinear(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let a = random_series(rng, n);
    let b = random_series(rng, n);
    let c = random_series(rng, n);
    let r = random_rational(rng);
    ensure_eq!(
        a.add(&b.scale(&r)).shuffle(&c),
        a.shuffle(&c).add(&b.shuffle(&c).scale(&r)),
        "a = {a}, b = {b}, c = {c}, r = {r}"
    );
    Ok(())
}

fn check_shuffle_unit(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let a = random_series(rng, n);
    ensure_eq!(TruncatedSeries::one(n).shuffle(&a), a.clone(), "a = {a}");
    Ok(())
}

fn check_shuffle_inverse(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let c = random_in_m(rng, n);
    let inv = c.shuffle_inverse().map_err(|e| format!("c = {c}: {e}"))?;
    ensure_eq!(c.shuffle(&inv), TruncatedSeries::one(n), "c = {c}");
    Ok(())
}

fn check_shuffle_power_factorial(_rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let x1 = TruncatedSeries::monomial(Rational::one(), Word::x1_power(1), n);
    let mut factorial = Rational::one();
    for k in 1..=n {
        factorial = factorial.mul_u64(k as u64);
        ensure_eq!(
            x1.shuffle_power(k),
            TruncatedSeries::monomial(factorial.clone(), Word::x1_power(k), n),
            "k = {k}"
        );
    }
    Ok(())
}

fn check_truncation_shuffle(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let a = random_series(rng, n);
    let b = random_series(rng, n);
    ensure_eq!(
        a.shuffle(&b).truncate(n - 1),
        a.truncate(n - 1).shuffle(&b.truncate(n - 1)),
        "a = {a}, b = {b}"
    );
    Ok(())
}

fn check_truncation_compose(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let a = random_series(rng, n);
    let b = random_series(rng, n);
    ensure_eq!(
        a.compose(&b).truncate(n - 1),
        a.truncate(n - 1).compose(&b.truncate(n - 1)),
        "a = {a}, b = {b}"
    );
    Ok(())
}

fn check_truncation_mixed(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let a = random_series(rng, n);
    let d = random_pair(rng, n);
    ensure_eq!(
        a.mixed_compose(&d).truncate(n - 1),
        a.truncate(n - 1).mixed_compose(&d.truncate(n - 1)),
        "a = {a}, d = {d}"
    );
    Ok(())
}

fn check_compose_over_shuffle(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let a = random_series(rng, n);
    let b = random_series(rng, n);
    let e = random_series(rng, n);
    ensure_eq!(
        a.shuffle(&b).compose(&e),
        a.compose(&e).shuffle(&b.compose(&e)),
        "a = {a}, b = {b}, e = {e}"
    );
    Ok(())
}

fn check_mixed_over_shuffle(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let a = random_series(rng, n);
    let b = random_series(rng, n);
    let z = random_pair(rng, n);
    ensure_eq!(
        a.shuffle(&b).mixed_compose(&z),
        a.mixed_compose(&z).shuffle(&b.mixed_compose(&z)),
        "a = {a}, b = {b}, z = {z}"
    );
    Ok(())
}

fn check_mixed_associativity(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let h = random_series(rng, n);
    let c = random_series(rng, n);
    let d = random_pair(rng, n);
    ensure_eq!(
        h.compose(&c.mixed_compose(&d)),
        h.compose(&c).mixed_compose(&d),
        "h = {h}, c = {c}, d = {d}"
    );
    Ok(())
}

fn check_mixed_effectiveness_word(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    // a word containing x1 is moved by every pair whose deviation from the
    // identity is visible below the truncation horizon
    let eta = random_word_with_x1(rng, n - 1);
    let d = random_visible_pair(rng, n, eta.len());
    let series = TruncatedSeries::monomial(Rational::one(), eta, n);
    let moved = series.mixed_compose(&d);
    ensure!(moved != series, "eta = {eta}, d = {d}: word not moved");
    Ok(())
}

fn check_mixed_effectiveness_x1(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let d = random_visible_pair(rng, n, 1);
    let x1 = TruncatedSeries::monomial(Rational::one(), Word::x1_power(1), n);
    ensure!(
        x1.mixed_compose(&d) != x1,
        "d = {d}: x1 |> d collapsed to x1"
    );
    Ok(())
}

fn check_quotient_well_defined(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let c = random_series(rng, n);
    let h = c.add(&random_drift_series(rng, n));
    let d = random_pair(rng, n);
    ensure!(
        h.quotient_equal(&c),
        "sampler bug: h and c differ off the drift line"
    );
    ensure!(
        h.mixed_compose(&d).quotient_equal(&c.mixed_compose(&d)),
        "h = {h}, c = {c}, d = {d}: quotient action not well-defined"
    );
    Ok(())
}

fn check_quotient_effectiveness(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let d = random_quotient_effective_pair(rng, n);
    let x1 = TruncatedSeries::monomial(Rational::one(), Word::x1_power(1), n);
    ensure!(
        !x1.mixed_compose(&d).quotient_equal(&x1),
        "d = {d}: [x1] not moved on the quotient"
    );
    Ok(())
}

fn check_odot_associative(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let x = random_pair(rng, n);
    let y = random_pair(rng, n);
    let z = random_pair(rng, n);
    ensure_eq!(
        x.odot(&y).odot(&z),
        x.odot(&y.odot(&z)),
        "x = {x}, y = {y}, z = {z}"
    );
    Ok(())
}

fn check_odot_identity(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let x = random_pair(rng, n);
    let e = AffinePair::identity(n);
    ensure_eq!(x.odot(&e), x.clone(), "x = {x}");
    ensure_eq!(e.odot(&x), x.clone(), "x = {x}");
    Ok(())
}

fn check_odot_inverse(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let x = random_pair(rng, n);
    let e = AffinePair::identity(n);
    let inv = x.odot_inverse();
    ensure_eq!(x.odot(&inv), e.clone(), "x = {x}");
    ensure_eq!(inv.odot(&x), e, "x = {x}");
    Ok(())
}

fn check_odot_semidirect(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let x = random_pair(rng, n);
    let y = random_pair(rng, n);
    ensure_eq!(
        x.odot(&y).first().clone(),
        x.first().shuffle(y.first()),
        "projection onto M is a homomorphism: x = {x}, y = {y}"
    );
    // the additive subgroup is normal
    let d = AffinePair::additive(random_series(rng, n));
    let conjugated = x.odot(&d).odot(&x.odot_inverse());
    ensure_eq!(
        conjugated.first().clone(),
        TruncatedSeries::one(n),
        "conjugate of an additive pair left the additive subgroup: x = {x}, d = {d}"
    );
    Ok(())
}

fn check_triangle_respects_odot(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let x = random_pair(rng, n);
    let y = random_pair(rng, n);
    let d = random_pair(rng, n);
    ensure_eq!(
        x.odot(&y).triangle(&d),
        x.triangle(&d).odot(&y.triangle(&d)),
        "x = {x}, y = {y}, d = {d}"
    );
    ensure_eq!(
        AffinePair::identity(n).triangle(&d),
        AffinePair::identity(n),
        "e triangle d: d = {d}"
    );
    Ok(())
}

fn check_bar_compose_respects_odot(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let x = random_pair(rng, n);
    let y = random_pair(rng, n);
    let c = random_series(rng, n);
    ensure_eq!(
        x.odot(&y).bar_compose(&c),
        x.bar_compose(&c).odot(&y.bar_compose(&c)),
        "x = {x}, y = {y}, c = {c}"
    );
    ensure_eq!(
        AffinePair::identity(n).bar_compose(&c),
        AffinePair::identity(n),
        "e bar-compose c: c = {c}"
    );
    Ok(())
}

fn check_interplay(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let d = random_pair(rng, n);
    let y = random_pair(rng, n);
    let c = random_series(rng, n);
    ensure_eq!(
        d.bar_compose(&c.mixed_compose(&y)),
        d.bar_compose(&c).triangle(&y),
        "d = {d}, y = {y}, c = {c}"
    );
    Ok(())
}

fn check_star_associative(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let x = random_pair(rng, n);
    let y = random_pair(rng, n);
    let z = random_pair(rng, n);
    ensure_eq!(
        x.star(&y).star(&z),
        x.star(&y.star(&z)),
        "x = {x}, y = {y}, z = {z}"
    );
    Ok(())
}

fn check_star_identity(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let x = random_pair(rng, n);
    let e = AffinePair::identity(n);
    ensure_eq!(x.star(&e), x.clone(), "x = {x}");
    ensure_eq!(e.star(&x), x.clone(), "x = {x}");
    Ok(())
}

fn check_star_inverse(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let x = random_pair(rng, n);
    let inv = x
        .star_inverse()
        .map_err(|e| format!("x = {x}: {e}"))?;
    let e = AffinePair::identity(n);
    ensure_eq!(x.star(&inv), e.clone(), "x = {x}");
    ensure_eq!(inv.star(&x), e, "x = {x}");
    Ok(())
}

fn check_star_antihomomorphism(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let a = random_pair(rng, n);
    let b = random_pair(rng, n);
    let lhs = a
        .star_inverse()
        .map_err(|e| e.to_string())?
        .star(&b.star_inverse().map_err(|e| e.to_string())?);
    let rhs = b
        .star(&a)
        .star_inverse()
        .map_err(|e| e.to_string())?;
    ensure_eq!(lhs, rhs, "a = {a}, b = {b}");
    Ok(())
}

fn check_mixed_star_action(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let c = random_series(rng, n);
    let x = random_pair(rng, n);
    let y = random_pair(rng, n);
    ensure_eq!(
        c.mixed_compose(&x).mixed_compose(&y),
        c.mixed_compose(&x.star(&y)),
        "c = {c}, x = {x}, y = {y}"
    );
    ensure_eq!(
        c.mixed_compose(&AffinePair::identity(n)),
        c.clone(),
        "c = {c}"
    );
    Ok(())
}

fn check_triangle_star_action(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let x = random_pair(rng, n);
    let y = random_pair(rng, n);
    let z = random_pair(rng, n);
    ensure_eq!(
        x.triangle(&y).triangle(&z),
        x.triangle(&y.star(&z)),
        "x = {x}, y = {y}, z = {z}"
    );
    ensure_eq!(x.triangle(&AffinePair::identity(n)), x.clone(), "x = {x}");
    Ok(())
}

fn check_feedback_action(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let c = random_series(rng, n);
    let x = random_pair(rng, n);
    let y = random_pair(rng, n);
    let once = affine_feedback(&c, &x).map_err(|e| e.to_string())?;
    let lhs = affine_feedback(&once, &y).map_err(|e| e.to_string())?;
    let rhs = affine_feedback(&c, &x.odot(&y)).map_err(|e| e.to_string())?;
    ensure_eq!(lhs, rhs, "c = {c}, x = {x}, y = {y}");
    let fixed = affine_feedback(&c, &AffinePair::identity(n)).map_err(|e| e.to_string())?;
    ensure_eq!(fixed, c.clone(), "c = {c}");
    Ok(())
}

fn check_commutator_containment(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let m = AffinePair::multiplicative(random_in_m(rng, n)).expect("in M");
    let d = AffinePair::additive(random_series(rng, n));
    let one = TruncatedSeries::one(n);
    ensure_eq!(
        m.commutator_odot(&d).first().clone(),
        one.clone(),
        "m = {m}, d = {d}"
    );
    ensure_eq!(
        d.commutator_odot(&m).first().clone(),
        one,
        "m = {m}, d = {d}"
    );
    Ok(())
}

fn check_commutator_closed_form(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let b = random_in_m(rng, n);
    let d = random_series(rng, n);
    let bp = AffinePair::multiplicative(b.clone()).expect("in M");
    let dp = AffinePair::additive(d.clone());
    let one = TruncatedSeries::one(n);
    ensure_eq!(
        dp.commutator_odot(&bp),
        AffinePair::additive(d.shuffle(&one.sub(&b))),
        "closed form (1, d sh (1-b)): b = {b}, d = {d}"
    );
    ensure_eq!(
        bp.commutator_odot(&dp),
        AffinePair::additive(d.shuffle(&b.sub(&one))),
        "closed form (1, d sh (b-1)): b = {b}, d = {d}"
    );
    Ok(())
}

fn check_lie_bracket_structure(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    let a = random_tangent(rng, n);
    let b = random_tangent(rng, n);
    let c = random_tangent(rng, n);
    let r = random_rational(rng);

    ensure!(lie_bracket(&a, &a).is_zero(), "[a, a] != 0: a = {}", a.second());
    let antisym = lie_bracket(&a, &b).add(&lie_bracket(&b, &a));
    ensure!(antisym.is_zero(), "bracket not antisymmetric");

    let linear_lhs = lie_bracket(&a.add(&b.scale(&r)), &c);
    let linear_rhs = lie_bracket(&a, &c).add(&lie_bracket(&b, &c).scale(&r));
    ensure!(
        linear_lhs == linear_rhs,
        "bracket not linear in the first slot"
    );

    // same-component brackets vanish
    let m_only = TangentPair::new(a.first().clone(), TruncatedSeries::zero(n))
        .expect("proper");
    let m_only2 = TangentPair::new(b.first().clone(), TruncatedSeries::zero(n))
        .expect("proper");
    ensure!(lie_bracket(&m_only, &m_only2).is_zero(), "[g_sh, g_sh] != 0");
    let a_only = TangentPair::new(TruncatedSeries::zero(n), a.second().clone())
        .expect("proper");
    let a_only2 = TangentPair::new(TruncatedSeries::zero(n), b.second().clone())
        .expect("proper");
    ensure!(lie_bracket(&a_only, &a_only2).is_zero(), "[g_+, g_+] != 0");

    // Jacobi identity
    let jacobi = lie_bracket(&a, &lie_bracket(&b, &c))
        .add(&lie_bracket(&b, &lie_bracket(&c, &a)))
        .add(&lie_bracket(&c, &lie_bracket(&a, &b)));
    ensure!(jacobi.is_zero(), "Jacobi identity failed");
    Ok(())
}

fn check_lie_bracket_linearization(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    // the commutator of the one-parameter families (1 + s t1, 0) and
    // (1, t t2) equals e + (0, s t (t1 sh t2)) exactly, so its bilinear
    // coefficient is the bracket; checked at two parameter points
    let t = random_tangent(rng, n);
    let bracket = t.first().shuffle(t.second());
    for (s_num, t_num) in [(1i64, 1i64), (1, 2)] {
        let s = Rational::new(1, 2 * s_num);
        let tt = Rational::new(1, 3 * t_num);
        let family_m = AffinePair::multiplicative(
            TruncatedSeries::one(n).add(&t.first().scale(&s)),
        )
        .expect("in M");
        let family_a = AffinePair::additive(t.second().scale(&tt));
        let commutator = family_m.commutator_odot(&family_a);
        let expected = AffinePair::additive(bracket.scale(&(&s * &tt)));
        ensure_eq!(
            commutator,
            expected,
            "linearization at s = {s}, t = {tt}: t1 = {}, t2 = {}",
            t.first(),
            t.second()
        );
    }
    Ok(())
}

fn check_stabilizer_fixed(rng: &mut ChaCha8Rng, n: usize) -> CheckResult {
    // (1 + x0, x0) is fixed by the triangle action of every pair
    let x0 = TruncatedSeries::monomial(Rational::one(), Word::x0_power(1), n);
    let stabilized = AffinePair::new(TruncatedSeries::one(n).add(&x0), x0.clone())
        .expect("constant term 1");
    let d = random_pair(rng, n);
    ensure_eq!(stabilized.triangle(&d), stabilized.clone(), "d = {d}");
    Ok(())
}

struct Identity {
    name: &'static str,
    min_degree: usize,
    check: CheckFn,
}

const IDENTITIES: &[Identity] = &[
    Identity { name: "shuffle_commutative", min_degree: 0, check: check_shuffle_commutative },
    Identity { name: "shuffle_associative", min_degree: 0, check: check_shuffle_associative },
    Identity { name: "shuffle_bilinear", min_degree: 0, check: check_shuffle_bilinear },
    Identity { name: "shuffle_unit", min_degree: 0, check: check_shuffle_unit },
    Identity { name: "shuffle_inverse", min_degree: 0, check: check_shuffle_inverse },
    Identity { name: "shuffle_power_factorial", min_degree: 1, check: check_shuffle_power_factorial },
    Identity { name: "truncation_exactness_shuffle", min_degree: 1, check: check_truncation_shuffle },
    Identity { name: "truncation_exactness_compose", min_degree: 1, check: check_truncation_compose },
    Identity { name: "truncation_exactness_mixed_compose", min_degree: 1, check: check_truncation_mixed },
    Identity { name: "compose_distributes_over_shuffle", min_degree: 0, check: check_compose_over_shuffle },
    Identity { name: "mixed_compose_distributes_over_shuffle", min_degree: 0, check: check_mixed_over_shuffle },
    Identity { name: "mixed_associativity", min_degree: 0, check: check_mixed_associativity },
    Identity { name: "mixed_compose_moves_x1_words", min_degree: 2, check: check_mixed_effectiveness_word },
    Identity { name: "mixed_compose_moves_x1", min_degree: 1, check: check_mixed_effectiveness_x1 },
    Identity { name: "quotient_action_well_defined", min_degree: 0, check: check_quotient_well_defined },
    Identity { name: "quotient_action_effective", min_degree: 2, check: check_quotient_effectiveness },
    Identity { name: "odot_associative", min_degree: 0, check: check_odot_associative },
    Identity { name: "odot_identity", min_degree: 0, check: check_odot_identity },
    Identity { name: "odot_inverse", min_degree: 0, check: check_odot_inverse },
    Identity { name: "odot_semidirect_structure", min_degree: 0, check: check_odot_semidirect },
    Identity { name: "triangle_respects_odot", min_degree: 0, check: check_triangle_respects_odot },
    Identity { name: "bar_compose_respects_odot", min_degree: 0, check: check_bar_compose_respects_odot },
    Identity { name: "interplay_bar_compose_mixed", min_degree: 0, check: check_interplay },
    Identity { name: "star_associative", min_degree: 0, check: check_star_associative },
    Identity { name: "star_identity", min_degree: 0, check: check_star_identity },
    Identity { name: "star_inverse", min_degree: 0, check: check_star_inverse },
    Identity { name: "star_inverse_antihomomorphism", min_degree: 0, check: check_star_antihomomorphism },
    Identity { name: "mixed_compose_star_action", min_degree: 0, check: check_mixed_star_action },
    Identity { name: "triangle_star_action", min_degree: 0, check: check_triangle_star_action },
    Identity { name: "feedback_odot_action", min_degree: 0, check: check_feedback_action },
    Identity { name: "commutator_lands_in_additive_group", min_degree: 0, check: check_commutator_containment },
    Identity { name: "commutator_closed_form", min_degree: 0, check: check_commutator_closed_form },
    Identity { name: "lie_bracket_structure", min_degree: 0, check: check_lie_bracket_structure },
    Identity { name: "lie_bracket_linearization", min_degree: 0, check: check_lie_bracket_linearization },
    Identity { name: "stabilizer_pair_is_fixed", min_degree: 1, check: check_stabilizer_fixed },
];

/// Names of all identities in suite order.
pub fn identity_names() -> Vec<&'static str> {
    IDENTITIES.iter().map(|i| i.name).collect()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn instance_rng(seed: u64, identity: u64, instance: u64) -> ChaCha8Rng {
    let mixed = splitmix64(splitmix64(seed ^ (identity << 32)) ^ instance);
    ChaCha8Rng::seed_from_u64(mixed)
}

/// Run every identity on `instances` seeded random instances at the given
/// degree. Identities that need a minimum degree to be non-vacuous pass
/// vacuously below it. Failures carry a counterexample description.
pub fn verify_group_laws(config: &VerifyConfig) -> VerificationReport {
    let mut checks = Vec::with_capacity(IDENTITIES.len());
    for (index, identity) in IDENTITIES.iter().enumerate() {
        let mut counterexample = None;
        if config.degree >= identity.min_degree {
            for instance in 0..config.instances {
                let mut rng = instance_rng(config.seed, index as u64, instance);
                if let Err(description) = (identity.check)(&mut rng, config.degree) {
                    counterexample = Some(format!(
                        "identity {} instance {instance} (degree {}, seed {}):\n{description}",
                        identity.name, config.degree, config.seed
                    ));
                    break;
                }
            }
        }
        checks.push(IdentityCheck {
            name: identity.name,
            passed: counterexample.is_none(),
            counterexample,
            counterexample_file: None,
        });
    }
    VerificationReport {
        degree: config.degree,
        instances: config.instances,
        seed: config.seed,
        checks,
    }
}
