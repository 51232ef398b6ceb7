//! Affine series pairs and the double group structure used by feedback.
//!
//! An [`AffinePair`] (c1, c2) with c1 of unit constant term represents the
//! affine operator u -> u F_{c1}[u] + F_{c2}[u]. The set of such pairs
//! carries two group products: the semidirect product `odot` and the affine
//! feedback group product `star`, linked by the componentwise mixed
//! composition `triangle`, which is a right star-action. The closed-loop
//! generating series of a plant under affine feedback is
//! [`affine_feedback`].

use std::fmt;

use crate::rational::Rational;
use crate::series::{Composer, MixedComposer, TruncatedSeries};

/// Error constructing an [`AffinePair`] whose multiplicative component is
/// not in the shuffle group M.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("multiplicative component must have constant term 1")]
pub struct NotInGroup;

/// Error constructing a [`TangentPair`] whose first component is not proper.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("tangent first component must have constant term 0")]
pub struct NotTangent;

/// The star-inverse fixed point failed its mandatory two-sided verification.
/// This signals a degree-cap overflow or a broken invariant, not bad input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("star inverse failed two-sided verification")]
pub struct StarInverseError;

/// An element of the group set G: a pair (c1, c2) of series at a common
/// truncation degree with c1 of constant term 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffinePair {
    c1: TruncatedSeries,
    c2: TruncatedSeries,
}

impl AffinePair {
    /// Build a pair, truncating both components at the smaller degree.
    pub fn new(c1: TruncatedSeries, c2: TruncatedSeries) -> Result<Self, NotInGroup> {
        if !c1.in_shuffle_group() {
            return Err(NotInGroup);
        }
        let degree = c1.degree().min(c2.degree());
        Ok(AffinePair {
            c1: c1.truncate(degree),
            c2: c2.truncate(degree),
        })
    }

    pub(crate) fn from_components(c1: TruncatedSeries, c2: TruncatedSeries) -> Self {
        debug_assert!(c1.in_shuffle_group());
        debug_assert_eq!(c1.degree(), c2.degree());
        AffinePair { c1, c2 }
    }

    /// The identity pair e = (1, 0) of both groups.
    pub fn identity(degree: usize) -> Self {
        AffinePair {
            c1: TruncatedSeries::one(degree),
            c2: TruncatedSeries::zero(degree),
        }
    }

    /// Embed a series additively: (1, d), the additive subgroup G+.
    pub fn additive(d: TruncatedSeries) -> Self {
        AffinePair {
            c1: TruncatedSeries::one(d.degree()),
            c2: d,
        }
    }

    /// Embed a shuffle-group series multiplicatively: (m, 0).
    pub fn multiplicative(m: TruncatedSeries) -> Result<Self, NotInGroup> {
        let degree = m.degree();
        Self::new(m, TruncatedSeries::zero(degree))
    }

    pub fn degree(&self) -> usize {
        self.c1.degree()
    }

    /// The multiplicative channel c1.
    pub fn first(&self) -> &TruncatedSeries {
        &self.c1
    }

    /// The additive channel c2.
    pub fn second(&self) -> &TruncatedSeries {
        &self.c2
    }

    pub fn is_identity(&self) -> bool {
        self.c1 == TruncatedSeries::one(self.degree()) && self.c2.is_zero()
    }

    pub fn truncate(&self, degree: usize) -> Self {
        AffinePair {
            c1: self.c1.truncate(degree),
            c2: self.c2.truncate(degree),
        }
    }

    fn with_degree(&self, degree: usize) -> Self {
        AffinePair {
            c1: self.c1.with_degree(degree),
            c2: self.c2.with_degree(degree),
        }
    }

    /// The semidirect product: c odot d = (c1 sh d1, c2 + (d2 sh c1)).
    pub fn odot(&self, other: &Self) -> Self {
        let degree = self.degree().min(other.degree());
        let c1 = self.c1.shuffle(&other.c1);
        let c2 = self
            .c2
            .truncate(degree)
            .add(&other.c2.shuffle(&self.c1));
        AffinePair::from_components(c1, c2)
    }

    /// The odot-inverse: (c1^{sh -1}, -(c1^{sh -1} sh c2)).
    pub fn odot_inverse(&self) -> Self {
        let c1_inv = self
            .c1
            .shuffle_inverse()
            .expect("group invariant: constant term 1");
        let c2 = c1_inv.shuffle(&self.c2).neg();
        AffinePair::from_components(c1_inv, c2)
    }

    /// Componentwise composition with a series: d bar-compose c.
    pub fn bar_compose(&self, c: &TruncatedSeries) -> Self {
        let degree = self.degree().min(c.degree());
        let mut composer = Composer::new(c, degree);
        AffinePair::from_components(composer.apply(&self.c1), composer.apply(&self.c2))
    }

    /// Componentwise mixed composition: c triangle d = (c1 |> d, c2 |> d).
    pub fn triangle(&self, d: &Self) -> Self {
        let degree = self.degree().min(d.degree());
        let mut mixer = MixedComposer::new(&d.c1, &d.c2, degree);
        AffinePair::from_components(mixer.apply(&self.c1), mixer.apply(&self.c2))
    }

    /// The affine feedback group product: c star d = (c triangle d) odot d.
    pub fn star(&self, d: &Self) -> Self {
        let result = self.triangle(d).odot(d);
        #[cfg(debug_assertions)]
        {
            // coordinate form of the same product, as an independent route
            let degree = self.degree().min(d.degree());
            let mut mixer = MixedComposer::new(&d.c1, &d.c2, degree);
            let c1_mixed = mixer.apply(&self.c1);
            let c2_mixed = mixer.apply(&self.c2);
            let coord = AffinePair::from_components(
                c1_mixed.shuffle(&d.c1),
                c1_mixed.shuffle(&d.c2).add(&c2_mixed),
            );
            debug_assert_eq!(result, coord, "star product coordinate cross-check");
        }
        result
    }

    /// The star-inverse, by the fixed point X <- (C triangle X)^{odot -1}
    /// starting from the identity. The degree-n part of C triangle X depends
    /// on X only through degrees < n, so iteration k is computed at
    /// truncation degree k and freezes that degree; N+1 iterations are exact.
    /// Two-sided verification runs before returning.
    pub fn star_inverse(&self) -> Result<Self, StarInverseError> {
        let degree = self.degree();
        let mut x = AffinePair::identity(0);
        for k in 0..=degree {
            let c_k = self.truncate(k);
            let x_k = x.with_degree(k);
            x = c_k.triangle(&x_k).odot_inverse();
        }
        let e = AffinePair::identity(degree);
        if self.star(&x) == e && x.star(self) == e {
            Ok(x)
        } else {
            Err(StarInverseError)
        }
    }

    /// Group commutator of the odot group: x odot y odot x^{-1} odot y^{-1}.
    pub fn commutator_odot(&self, other: &Self) -> Self {
        self.odot(other)
            .odot(&self.odot_inverse())
            .odot(&other.odot_inverse())
    }
}

impl fmt::Display for AffinePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}; {}]", self.c1, self.c2)
    }
}

impl TruncatedSeries {
    /// The mixed composition product c |> d against an affine pair.
    pub fn mixed_compose(&self, d: &AffinePair) -> TruncatedSeries {
        let degree = self.degree().min(d.degree());
        self.mixed_compose_parts(d.first(), d.second(), degree)
    }
}

/// The affine feedback product c @ d: the closed-loop generating series of
/// the plant series c under affine feedback by the pair d,
/// c @ d = c |> ((d^{odot -1}) bar-compose c)^{star -1}.
pub fn affine_feedback(
    c: &TruncatedSeries,
    d: &AffinePair,
) -> Result<TruncatedSeries, StarInverseError> {
    // bar-compose is an odot-homomorphism, so the inverse may be taken after
    // composing; this keeps the composition on the sparse operands.
    let composed_inverse = d.bar_compose(c).odot_inverse();
    debug_assert_eq!(
        composed_inverse,
        d.odot_inverse().bar_compose(c),
        "inverse/compose interchange"
    );
    let x = composed_inverse.star_inverse()?;
    Ok(c.mixed_compose(&x))
}

/// The four-loop interconnection: wrap the plant in an additive loop (d2),
/// a multiplicative loop (d1), then undo both in the same order. Returns the
/// closed-loop series and the net additive controller (1, d2 sh (1 - d1)),
/// and checks that the two agree exactly, as the group action demands.
pub fn residual_loop(
    c: &TruncatedSeries,
    d1: &TruncatedSeries,
    d2: &TruncatedSeries,
) -> Result<(TruncatedSeries, AffinePair), ResidualLoopError> {
    let degree = c.degree().min(d1.degree()).min(d2.degree());
    let c = c.truncate(degree);
    let d1 = d1.truncate(degree);
    let d2 = d2.truncate(degree);

    let mult = AffinePair::multiplicative(d1.clone()).map_err(ResidualLoopError::Group)?;
    let mult_undo = AffinePair::multiplicative(
        d1.shuffle_inverse().expect("constant term 1 checked above"),
    )
    .expect("shuffle inverse stays in M");
    let add = AffinePair::additive(d2.clone());
    let add_undo = AffinePair::additive(d2.neg());

    let looped = affine_feedback(&c, &add).map_err(ResidualLoopError::Star)?;
    let looped = affine_feedback(&looped, &mult).map_err(ResidualLoopError::Star)?;
    let looped = affine_feedback(&looped, &add_undo).map_err(ResidualLoopError::Star)?;
    let omega = affine_feedback(&looped, &mult_undo).map_err(ResidualLoopError::Star)?;

    let one = TruncatedSeries::one(degree);
    let net = AffinePair::additive(d2.shuffle(&one.sub(&d1)));
    let closed_form = affine_feedback(&c, &net).map_err(ResidualLoopError::Star)?;
    assert_eq!(
        omega, closed_form,
        "four-loop and residual closed form must agree"
    );
    Ok((omega, net))
}

/// Error from [`residual_loop`]: a group-membership violation on d1 or a
/// star-inverse failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResidualLoopError {
    #[error("d1 is not in the shuffle group: {0}")]
    Group(NotInGroup),
    #[error(transparent)]
    Star(StarInverseError),
}

/// A tangent vector at the identity of the odot group: a proper series in
/// the shuffle-group direction and an arbitrary series in the additive
/// direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentPair {
    t1: TruncatedSeries,
    t2: TruncatedSeries,
}

impl TangentPair {
    pub fn new(t1: TruncatedSeries, t2: TruncatedSeries) -> Result<Self, NotTangent> {
        if !t1.is_proper() {
            return Err(NotTangent);
        }
        let degree = t1.degree().min(t2.degree());
        Ok(TangentPair {
            t1: t1.truncate(degree),
            t2: t2.truncate(degree),
        })
    }

    pub fn zero(degree: usize) -> Self {
        TangentPair {
            t1: TruncatedSeries::zero(degree),
            t2: TruncatedSeries::zero(degree),
        }
    }

    pub fn degree(&self) -> usize {
        self.t1.degree()
    }

    pub fn first(&self) -> &TruncatedSeries {
        &self.t1
    }

    pub fn second(&self) -> &TruncatedSeries {
        &self.t2
    }

    pub fn is_zero(&self) -> bool {
        self.t1.is_zero() && self.t2.is_zero()
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        TangentPair {
            t1: self.t1.scale(factor),
            t2: self.t2.scale(factor),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        TangentPair {
            t1: self.t1.add(&other.t1),
            t2: self.t2.add(&other.t2),
        }
    }
}

/// The Lie bracket of the formal Lie algebra of (G, odot): both summand
/// directions are abelian and the cross bracket lands in the additive
/// direction, [(t1, t2), (s1, s2)] = (0, t1 sh s2 - s1 sh t2).
pub fn lie_bracket(a: &TangentPair, b: &TangentPair) -> TangentPair {
    let degree = a.degree().min(b.degree());
    let cross = a.t1.shuffle(&b.t2).sub(&b.t1.shuffle(&a.t2));
    TangentPair {
        t1: TruncatedSeries::zero(degree),
        t2: cross,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Word;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn series(degree: usize, terms: &[(i64, &str)]) -> TruncatedSeries {
        TruncatedSeries::from_terms(
            terms
                .iter()
                .map(|(n, word)| (Rational::from_integer(*n), w(word))),
            degree,
        )
    }

    fn pair(degree: usize, c1: &[(i64, &str)], c2: &[(i64, &str)]) -> AffinePair {
        AffinePair::new(series(degree, c1), series(degree, c2)).unwrap()
    }

    #[test]
    fn pair_construction_enforces_group_membership() {
        assert!(AffinePair::new(series(3, &[(1, "1")]), series(3, &[])).is_ok());
        assert_eq!(
            AffinePair::new(series(3, &[(1, "x0")]), series(3, &[])),
            Err(NotInGroup)
        );
        assert_eq!(
            AffinePair::new(series(3, &[(2, "1")]), series(3, &[])),
            Err(NotInGroup)
        );
    }

    #[test]
    fn odot_identity_and_embeddings() {
        let e = AffinePair::identity(4);
        let c = pair(4, &[(1, "1"), (2, "x1")], &[(1, "x0x1")]);
        assert_eq!(c.odot(&e), c);
        assert_eq!(e.odot(&c), c);

        // additive subgroup: (1, c) odot (1, d) = (1, c + d)
        let a = AffinePair::additive(series(4, &[(1, "x0")]));
        let b = AffinePair::additive(series(4, &[(3, "x1x1")]));
        assert_eq!(
            a.odot(&b),
            AffinePair::additive(series(4, &[(1, "x0"), (3, "x1x1")]))
        );
    }

    #[test]
    fn odot_worked_example() {
        // (1+x1, 0) odot (1, x0) = (1+x1, x0 sh (1+x1))
        let lhs = pair(4, &[(1, "1"), (1, "x1")], &[]);
        let rhs = AffinePair::additive(series(4, &[(1, "x0")]));
        let expected = pair(
            4,
            &[(1, "1"), (1, "x1")],
            &[(1, "x0"), (1, "x0x1"), (1, "x1x0")],
        );
        assert_eq!(lhs.odot(&rhs), expected);
    }

    #[test]
    fn odot_inverse_examples() {
        let e = AffinePair::identity(4);
        assert_eq!(e.odot_inverse(), e);

        let a = AffinePair::additive(series(4, &[(1, "x0x1")]));
        assert_eq!(
            a.odot_inverse(),
            AffinePair::additive(series(4, &[(-1, "x0x1")]))
        );

        let c = pair(4, &[(1, "1"), (1, "x1")], &[(1, "x0")]);
        assert_eq!(c.odot(&c.odot_inverse()), e);
        assert_eq!(c.odot_inverse().odot(&c), e);
    }

    #[test]
    fn bar_compose_examples() {
        let x1 = series(4, &[(1, "x1")]);
        let e = AffinePair::identity(4);
        assert_eq!(e.bar_compose(&x1), e);

        let d = AffinePair::additive(x1.clone());
        assert_eq!(
            d.bar_compose(&x1),
            AffinePair::additive(series(4, &[(1, "x0x1")]))
        );

        // composing with the zero series sends every x1-word through 0
        let zero = TruncatedSeries::zero(4);
        let p = pair(4, &[(1, "1"), (1, "x1")], &[(1, "x1x1"), (2, "x0")]);
        let composed = p.bar_compose(&zero);
        assert_eq!(composed.first(), &series(4, &[(1, "1")]));
        assert_eq!(composed.second(), &series(4, &[(2, "x0")]));
    }

    #[test]
    fn triangle_examples() {
        let e = AffinePair::identity(4);
        let d = pair(4, &[(1, "1"), (1, "x1")], &[(1, "x0")]);
        assert_eq!(e.triangle(&d), e);

        let c = pair(4, &[(1, "1"), (-2, "x0x1")], &[(1, "x1")]);
        assert_eq!(c.triangle(&e), c);

        // the stabilizer counterexample: (1+x0, x0) is fixed by every pair
        let stab = pair(4, &[(1, "1"), (1, "x0")], &[(1, "x0")]);
        assert_eq!(stab.triangle(&d), stab);
    }

    #[test]
    fn star_identity_laws() {
        let e = AffinePair::identity(4);
        let c = pair(4, &[(1, "1"), (1, "x1")], &[(2, "x0x1")]);
        assert_eq!(c.star(&e), c);
        assert_eq!(e.star(&c), c);
    }

    #[test]
    fn star_additive_pairs() {
        // (1, c) star (1, d) = (1, d + c |> (1, d))
        let c = series(4, &[(1, "x1")]);
        let d = series(4, &[(1, "x0"), (1, "x1x0")]);
        let lhs = AffinePair::additive(c.clone()).star(&AffinePair::additive(d.clone()));
        let expected = AffinePair::additive(
            d.add(&c.mixed_compose(&AffinePair::additive(d.clone()))),
        );
        assert_eq!(lhs, expected);

        // drift controllers cancel exactly
        let x0 = series(4, &[(1, "x0")]);
        assert_eq!(
            AffinePair::additive(x0.clone()).star(&AffinePair::additive(x0.neg())),
            AffinePair::identity(4)
        );
    }

    #[test]
    fn star_inverse_examples() {
        let e = AffinePair::identity(4);
        assert_eq!(e.star_inverse().unwrap(), e);

        let x0 = AffinePair::additive(series(4, &[(1, "x0")]));
        assert_eq!(
            x0.star_inverse().unwrap(),
            AffinePair::additive(series(4, &[(-1, "x0")]))
        );

        // multiplicative pair: inverse stays multiplicative and satisfies
        // ((1+x1) |> (m, 0)) sh m = 1
        let c = pair(5, &[(1, "1"), (1, "x1")], &[]);
        let inv = c.star_inverse().unwrap();
        assert!(inv.second().is_zero());
        let m = inv.first();
        let mixed = c.first().mixed_compose(&inv);
        assert_eq!(mixed.shuffle(m), TruncatedSeries::one(5));
    }

    #[test]
    fn commutator_examples() {
        let c = pair(4, &[(1, "1"), (1, "x1")], &[(1, "x0")]);
        let e = AffinePair::identity(4);
        assert_eq!(c.commutator_odot(&c), e);

        let d = series(4, &[(1, "x1"), (2, "x0x0")]);
        let one_d = AffinePair::additive(d.clone());
        assert_eq!(e.commutator_odot(&one_d), e);

        // closed forms: [(1,d),(b,0)] = (1, d sh (1-b)) and the reverse
        // order gives (1, d sh (b-1)).
        let b = series(4, &[(1, "1"), (1, "x1")]);
        let bp = AffinePair::multiplicative(b.clone()).unwrap();
        let one = TruncatedSeries::one(4);
        assert_eq!(
            one_d.commutator_odot(&bp),
            AffinePair::additive(d.shuffle(&one.sub(&b)))
        );
        assert_eq!(
            bp.commutator_odot(&one_d),
            AffinePair::additive(d.shuffle(&b.sub(&one)))
        );
    }

    #[test]
    fn lie_bracket_examples() {
        let t = TangentPair::new(series(4, &[(1, "x1")]), series(4, &[])).unwrap();
        let s = TangentPair::new(series(4, &[]), series(4, &[(1, "1")])).unwrap();
        let bracket = lie_bracket(&t, &s);
        assert!(bracket.first().is_zero());
        assert_eq!(bracket.second(), &series(4, &[(1, "x1")]));

        // alternating
        assert!(lie_bracket(&t, &t).is_zero());
        assert_eq!(lie_bracket(&s, &t).second(), &series(4, &[(-1, "x1")]));

        // same-component brackets vanish
        let t2 = TangentPair::new(series(4, &[(2, "x0x1")]), series(4, &[])).unwrap();
        assert!(lie_bracket(&t, &t2).is_zero());
        let s2 = TangentPair::new(series(4, &[]), series(4, &[(1, "x0")])).unwrap();
        assert!(lie_bracket(&s, &s2).is_zero());
    }

    #[test]
    fn lie_bracket_jacobi() {
        let x = TangentPair::new(series(4, &[(1, "x1")]), series(4, &[(1, "x0")])).unwrap();
        let y = TangentPair::new(series(4, &[(2, "x0x1")]), series(4, &[(1, "1")])).unwrap();
        let z = TangentPair::new(series(4, &[(1, "x0")]), series(4, &[(3, "x1")])).unwrap();
        let total = lie_bracket(&x, &lie_bracket(&y, &z))
            .add(&lie_bracket(&y, &lie_bracket(&z, &x)))
            .add(&lie_bracket(&z, &lie_bracket(&x, &y)));
        assert!(total.is_zero());
    }

    #[test]
    fn feedback_identity_and_drift() {
        let c = series(4, &[(1, "x1"), (1, "x0x1")]);
        let e = AffinePair::identity(4);
        assert_eq!(affine_feedback(&c, &e).unwrap(), c);

        // series in R[[x0]] are fixed by every feedback
        let drift = series(4, &[(1, "x0"), (1, "x0x0")]);
        let d = pair(4, &[(1, "1"), (1, "x1")], &[(2, "x0")]);
        assert_eq!(affine_feedback(&drift, &d).unwrap(), drift);
    }

    #[test]
    fn feedback_group_action_smoke() {
        let c = series(3, &[(1, "x1")]);
        let x = pair(3, &[(1, "1"), (1, "x1")], &[(1, "x0")]);
        let y = pair(3, &[(1, "1"), (-1, "x0")], &[(1, "x1")]);
        let lhs = affine_feedback(&affine_feedback(&c, &x).unwrap(), &y).unwrap();
        let rhs = affine_feedback(&c, &x.odot(&y)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn residual_loop_trivial_cases() {
        let c = series(4, &[(1, "x1"), (2, "x0")]);
        let one = series(4, &[(1, "1")]);
        let d2 = series(4, &[(1, "x1")]);

        let (omega, net) = residual_loop(&c, &one, &d2).unwrap();
        assert_eq!(omega, c);
        assert!(net.second().is_zero());

        let d1 = series(4, &[(1, "1"), (1, "x1")]);
        let zero = TruncatedSeries::zero(4);
        let (omega, net) = residual_loop(&c, &d1, &zero).unwrap();
        assert_eq!(omega, c);
        assert!(net.second().is_zero());
    }

    #[test]
    fn residual_loop_witness() {
        // c = x1, d1 = 1 + x1, d2 = x1: net controller (1, -2 x1x1). The
        // residual loop first deviates from c at degree 5: the composed
        // controller lives at length 4 and the mixed composition prepends a
        // letter.
        let c = series(5, &[(1, "x1")]);
        let d1 = series(5, &[(1, "1"), (1, "x1")]);
        let d2 = series(5, &[(1, "x1")]);
        let (omega, net) = residual_loop(&c, &d1, &d2).unwrap();
        assert_eq!(net.second(), &series(5, &[(-2, "x1x1")]));
        assert_ne!(omega, c);
        assert_eq!(
            omega,
            series(
                5,
                &[(1, "x1"), (-2, "x0x0x1x0x1"), (-4, "x0x0x0x1x1")]
            )
        );

        // at degree 4 the deviation is invisible
        let (omega4, _) = residual_loop(
            &c.truncate(4),
            &d1.truncate(4),
            &d2.truncate(4),
        )
        .unwrap();
        assert_eq!(omega4, c.truncate(4));
    }
}
