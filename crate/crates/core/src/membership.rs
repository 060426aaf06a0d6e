//! Graded membership of quality values in prototype regions of a one-dimensional quality space.

use crate::model::{Body, Element, MembershipSpec, RegionExpr};
use crate::value::{format_rational, rat, Rational};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

/// Default ceiling on the number of completions enumerated for point prototypes.
pub const DEFAULT_COMPLETION_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prototypes {
    Points(Vec<Rational>),
    Interval(Rational, Rational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrototypeRegion {
    pub name: String,
    pub prototypes: Prototypes,
}

impl PrototypeRegion {
    pub fn points(name: &str, values: Vec<Rational>) -> Self {
        PrototypeRegion { name: name.to_string(), prototypes: Prototypes::Points(values) }
    }

    pub fn interval(name: &str, a: Rational, b: Rational) -> Self {
        PrototypeRegion { name: name.to_string(), prototypes: Prototypes::Interval(a, b) }
    }

    /// Checks the region's own invariant.
    pub fn check(&self) -> Result<(), String> {
        match &self.prototypes {
            Prototypes::Points(v) if v.is_empty() => Err(format!("region {} has no prototype points", self.name)),
            Prototypes::Interval(a, b) if a >= b => Err(format!("region {} needs a < b", self.name)),
            _ => Ok(()),
        }
    }

    fn bounds(&self) -> (Rational, Rational) {
        match &self.prototypes {
            Prototypes::Points(v) => (v.iter().min().unwrap().clone(), v.iter().max().unwrap().clone()),
            Prototypes::Interval(a, b) => (a.clone(), b.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MembershipError {
    #[error("{count} completions exceed the cap of {cap}")]
    CapExceeded { count: u128, cap: usize },
    #[error("prototype sets of {0} and {1} interleave")]
    Interleaving(String, String),
    #[error("regions must be strictly ordered and disjoint: {0}")]
    Ordering(String),
    #[error("point and interval prototypes cannot be mixed in one computation")]
    MixedStyles,
    #[error("region {0} is not part of the specification")]
    RegionAbsent(String),
    #[error("element {0} is not a quality goal with a named region")]
    NotAQualityGoal(String),
    #[error("no regions given")]
    Empty,
    #[error("{0}")]
    InvalidRegion(String),
    #[error("point prototypes have no closed-form membership function")]
    PointsHaveNoClosedForm,
}

fn check_all(regions: &[PrototypeRegion]) -> Result<(), MembershipError> {
    if regions.is_empty() {
        return Err(MembershipError::Empty);
    }
    for r in regions {
        r.check().map_err(MembershipError::InvalidRegion)?;
    }
    Ok(())
}

/// Degrees for point prototypes: the share of completions placing `p` strictly nearest to the region's selected prototype.
pub fn membership_points(
    p: &Rational,
    regions: &[PrototypeRegion],
    cap: usize,
) -> Result<BTreeMap<String, Rational>, MembershipError> {
    check_all(regions)?;
    let mut sets = Vec::new();
    for r in regions {
        match &r.prototypes {
            Prototypes::Points(v) => sets.push(v),
            Prototypes::Interval(..) => return Err(MembershipError::MixedStyles),
        }
    }
    for w in regions.windows(2) {
        if w[0].bounds().1 >= w[1].bounds().0 {
            return Err(MembershipError::Interleaving(w[0].name.clone(), w[1].name.clone()));
        }
    }
    let count: u128 = sets.iter().map(|s| s.len() as u128).product();
    if count > cap as u128 {
        return Err(MembershipError::CapExceeded { count, cap });
    }
    let mut wins = vec![0u64; regions.len()];
    let mut choice = vec![0usize; sets.len()];
    loop {
        let distances: Vec<Rational> = choice.iter().zip(&sets).map(|(i, s)| (p - &s[*i]).abs()).collect();
        let best = distances.iter().min().unwrap();
        let nearest: Vec<usize> = (0..distances.len()).filter(|i| distances[*i] == *best).collect();
        if nearest.len() == 1 {
            wins[nearest[0]] += 1;
        }
        // advance the mixed-radix counter
        let mut k = 0;
        loop {
            if k == choice.len() {
                let total = Rational::from_integer((count as u64).into());
                return Ok(regions
                    .iter()
                    .zip(&wins)
                    .map(|(r, w)| (r.name.clone(), Rational::from_integer((*w).into()) / &total))
                    .collect());
            }
            choice[k] += 1;
            if choice[k] < sets[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Closed-form shape of one piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceKind {
    Constant,
    Linear,
    QuadraticOverConstant,
}

/// Polynomial `c0 + c1·p + c2·p²` on `[lo, hi]`; `None` bounds are infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
    pub coeffs: [Rational; 3],
}

impl Piece {
    fn constant(lo: Option<Rational>, hi: Option<Rational>, c: Rational) -> Self {
        Piece { lo, hi, coeffs: [c, Rational::zero(), Rational::zero()] }
    }

    pub fn kind(&self) -> PieceKind {
        if !self.coeffs[2].is_zero() {
            PieceKind::QuadraticOverConstant
        } else if !self.coeffs[1].is_zero() {
            PieceKind::Linear
        } else {
            PieceKind::Constant
        }
    }

    pub fn eval(&self, p: &Rational) -> Rational {
        &self.coeffs[0] + &self.coeffs[1] * p + &self.coeffs[2] * p * p
    }

    pub fn contains(&self, p: &Rational) -> bool {
        self.lo.as_ref().is_none_or(|lo| lo <= p) && self.hi.as_ref().is_none_or(|hi| p <= hi)
    }

    fn complement(&self) -> Self {
        Piece {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            coeffs: [Rational::one() - &self.coeffs[0], -&self.coeffs[1], -&self.coeffs[2]],
        }
    }
}

/// Piecewise membership function of one region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipFunction {
    pub region: String,
    pub pieces: Vec<Piece>,
}

impl MembershipFunction {
    pub fn eval(&self, p: &Rational) -> Rational {
        self.pieces.iter().find(|piece| piece.contains(p)).map(|piece| piece.eval(p)).unwrap_or_else(Rational::zero)
    }

    /// Finite breakpoints between consecutive pieces.
    pub fn breakpoints(&self) -> Vec<Rational> {
        self.pieces.iter().filter_map(|piece| piece.hi.clone()).collect()
    }
}

/// Pieces of the left region's degree for the adjacent interval pair `[a,b]`, `[c,d]`.
pub fn pair_pieces(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> Result<Vec<Piece>, MembershipError> {
    if !(a < b && b < c && c < d) {
        return Err(MembershipError::Ordering(format!(
            "expected a < b < c < d, got [{}, {}] and [{}, {}]",
            format_rational(a),
            format_rational(b),
            format_rational(c),
            format_rational(d)
        )));
    }
    let two = rat(2);
    let four = rat(4);
    let w1 = b - a;
    let w2 = d - c;
    let denom = &two * &w1 * &w2;
    let start = (a + c) / &two;
    let end = (b + d) / &two;
    // 1 - (2p - a - c)^2 / denom
    let k = a + c;
    let head = [Rational::one() - &k * &k / &denom, &four * &k / &denom, -&four / &denom];
    // (b + d - 2p)^2 / denom
    let m = b + d;
    let tail = [&m * &m / &denom, -&four * &m / &denom, &four / &denom];
    let mut pieces = vec![Piece::constant(None, Some(start.clone()), Rational::one())];
    if w1 == w2 {
        let mid = (b + c) / &two;
        pieces.push(Piece { lo: Some(start), hi: Some(mid.clone()), coeffs: head });
        pieces.push(Piece { lo: Some(mid), hi: Some(end.clone()), coeffs: tail });
    } else {
        let (m1, m2, linear) = if w1 < w2 {
            let m1 = (b + c) / &two;
            let m2 = (a + d) / &two;
            let lin = [(&two * d + a + b) / (&two * &w2), -&two / &w2, Rational::zero()];
            (m1, m2, lin)
        } else {
            let m1 = (a + d) / &two;
            let m2 = (b + c) / &two;
            let lin = [(&two * b + c + d) / (&two * &w1), -&two / &w1, Rational::zero()];
            (m1, m2, lin)
        };
        pieces.push(Piece { lo: Some(start), hi: Some(m1.clone()), coeffs: head });
        pieces.push(Piece { lo: Some(m1), hi: Some(m2.clone()), coeffs: linear });
        pieces.push(Piece { lo: Some(m2), hi: Some(end.clone()), coeffs: tail });
    }
    pieces.push(Piece::constant(Some(end), None, Rational::zero()));
    Ok(pieces)
}

/// Degrees of the two regions of an adjacent interval pair at `p`.
pub fn membership_interval_pair(
    p: &Rational,
    r1: (&Rational, &Rational),
    r2: (&Rational, &Rational),
) -> Result<(Rational, Rational), MembershipError> {
    let pieces = pair_pieces(r1.0, r1.1, r2.0, r2.1)?;
    let f = MembershipFunction { region: String::new(), pieces };
    let m1 = f.eval(p);
    let m2 = Rational::one() - &m1;
    Ok((m1, m2))
}

fn interval_bounds(regions: &[PrototypeRegion]) -> Result<Vec<(Rational, Rational)>, MembershipError> {
    check_all(regions)?;
    let mut out = Vec::new();
    for r in regions {
        match &r.prototypes {
            Prototypes::Interval(a, b) => out.push((a.clone(), b.clone())),
            Prototypes::Points(_) => return Err(MembershipError::MixedStyles),
        }
    }
    for (w, names) in out.windows(2).zip(regions.windows(2)) {
        if w[0].1 >= w[1].0 {
            return Err(MembershipError::Ordering(format!("{} overlaps or precedes {}", names[1].name, names[0].name)));
        }
    }
    Ok(out)
}

fn clip(pieces: &[Piece], lo: Option<&Rational>, hi: Option<&Rational>) -> Vec<Piece> {
    let mut out = Vec::new();
    for piece in pieces {
        let new_lo = match (&piece.lo, lo) {
            (Some(a), Some(b)) => Some(a.max(b).clone()),
            (Some(a), None) => Some(a.clone()),
            (None, b) => b.cloned(),
        };
        let new_hi = match (&piece.hi, hi) {
            (Some(a), Some(b)) => Some(a.min(b).clone()),
            (Some(a), None) => Some(a.clone()),
            (None, b) => b.cloned(),
        };
        if let (Some(l), Some(h)) = (&new_lo, &new_hi) {
            if l >= h {
                continue;
            }
        }
        out.push(Piece { lo: new_lo, hi: new_hi, coeffs: piece.coeffs.clone() });
    }
    out
}

fn merge(pieces: Vec<Piece>) -> Vec<Piece> {
    let mut out: Vec<Piece> = Vec::new();
    for piece in pieces {
        match out.last_mut() {
            Some(last) if last.coeffs == piece.coeffs => last.hi = piece.hi,
            _ => out.push(piece),
        }
    }
    out
}

/// Collated piecewise membership functions for ordered, disjoint interval regions.
pub fn derive_membership_function(regions: &[PrototypeRegion]) -> Result<Vec<MembershipFunction>, MembershipError> {
    if regions.iter().any(|r| matches!(r.prototypes, Prototypes::Points(_))) {
        if regions.iter().all(|r| matches!(r.prototypes, Prototypes::Points(_))) {
            return Err(MembershipError::PointsHaveNoClosedForm);
        }
        return Err(MembershipError::MixedStyles);
    }
    let bounds = interval_bounds(regions)?;
    let n = bounds.len();
    let mut pair = Vec::new();
    for i in 0..n.saturating_sub(1) {
        pair.push(pair_pieces(&bounds[i].0, &bounds[i].1, &bounds[i + 1].0, &bounds[i + 1].1)?);
    }
    let two = rat(2);
    let mut out = Vec::new();
    for (i, region) in regions.iter().enumerate() {
        let left: Vec<Piece> = if i == 0 {
            vec![Piece::constant(None, None, Rational::one())]
        } else {
            pair[i - 1].iter().map(Piece::complement).collect()
        };
        let right: Vec<Piece> = if i + 1 == n {
            vec![Piece::constant(None, None, Rational::one())]
        } else {
            pair[i].clone()
        };
        let pieces = if i == 0 {
            right
        } else if i + 1 == n {
            left
        } else {
            let split = (&bounds[i - 1].1 + &bounds[i].1) / &two;
            let mut p = clip(&left, None, Some(&split));
            p.extend(clip(&right, Some(&split), None));
            p
        };
        out.push(MembershipFunction { region: region.name.clone(), pieces: merge(pieces) });
    }
    Ok(out)
}

/// Degrees of all interval regions at `p`.
pub fn membership_intervals(p: &Rational, regions: &[PrototypeRegion]) -> Result<BTreeMap<String, Rational>, MembershipError> {
    Ok(derive_membership_function(regions)?.into_iter().map(|f| (f.region.clone(), f.eval(p))).collect())
}

/// Degrees of every region of a spec, choosing the computation by prototype style.
pub fn membership_degrees(p: &Rational, regions: &[PrototypeRegion]) -> Result<BTreeMap<String, Rational>, MembershipError> {
    check_all(regions)?;
    let points = regions.iter().filter(|r| matches!(r.prototypes, Prototypes::Points(_))).count();
    if points == regions.len() {
        membership_points(p, regions, DEFAULT_COMPLETION_CAP)
    } else if points == 0 {
        membership_intervals(p, regions)
    } else {
        Err(MembershipError::MixedStyles)
    }
}

/// Degree to which an observed value satisfies a quality goal's (or the given target's) region.
pub fn satisfaction_degree(
    qgc: &Element,
    observed_value: &Rational,
    spec: &MembershipSpec,
    target_region: Option<&str>,
) -> Result<Rational, MembershipError> {
    let Body::Quality(q) = &qgc.body else {
        return Err(MembershipError::NotAQualityGoal(qgc.id.clone()));
    };
    let RegionExpr::NamedRegion { name, .. } = &q.region else {
        return Err(MembershipError::NotAQualityGoal(qgc.id.clone()));
    };
    if !spec.regions.iter().any(|r| &r.name == name) {
        return Err(MembershipError::RegionAbsent(name.clone()));
    }
    let target = target_region.unwrap_or(name);
    let degrees = membership_degrees(observed_value, &spec.regions)?;
    degrees.get(target).cloned().ok_or_else(|| MembershipError::RegionAbsent(target.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::parse_decimal;

    fn cost_intervals() -> Vec<PrototypeRegion> {
        vec![
            PrototypeRegion::interval("low", rat(500), rat(700)),
            PrototypeRegion::interval("medium", rat(800), rat(1000)),
            PrototypeRegion::interval("high", rat(1200), rat(1500)),
        ]
    }

    #[test]
    fn worked_interval_values() {
        let d = membership_intervals(&rat(740), &cost_intervals()).unwrap();
        assert_eq!(d["low"], parse_decimal("0.595").unwrap());
        assert_eq!(d["medium"], parse_decimal("0.405").unwrap());
        assert_eq!(d["high"], rat(0));
        assert_eq!(membership_intervals(&rat(1300), &cost_intervals()).unwrap()["high"], rat(1));
        assert_eq!(membership_intervals(&rat(900), &cost_intervals()).unwrap()["medium"], rat(1));
    }

    #[test]
    fn low_function_breakpoints() {
        let fs = derive_membership_function(&cost_intervals()).unwrap();
        assert_eq!(fs[0].breakpoints(), vec![rat(650), rat(750), rat(850)]);
    }

    #[test]
    fn medium_high_pair_matches_the_published_pieces() {
        let fs = derive_membership_function(&cost_intervals()).unwrap();
        let medium = &fs[1];
        for c in (1000..=1300).step_by(7) {
            let c = rat(c);
            let expected = if c <= rat(1100) {
                rat(1) - (&c - rat(1000)) * (&c - rat(1000)) / rat(30000)
            } else if c <= rat(1150) {
                rat(8) - &c / rat(150)
            } else if c <= rat(1250) {
                (rat(2500) - rat(2) * &c) * (rat(2500) - rat(2) * &c) / rat(120000)
            } else {
                rat(0)
            };
            assert_eq!(medium.eval(&c), expected, "c = {}", c);
        }
    }

    #[test]
    fn single_region_is_constant_one() {
        let fs = derive_membership_function(&[PrototypeRegion::interval("only", rat(0), rat(1))]).unwrap();
        assert_eq!(fs[0].pieces.len(), 1);
        assert_eq!(fs[0].eval(&rat(-1000)), rat(1));
    }

    #[test]
    fn point_prototypes() {
        let regions = vec![
            PrototypeRegion::points("low", vec![rat(500), rat(700)]),
            PrototypeRegion::points("medium", vec![rat(800), rat(1000)]),
            PrototypeRegion::points("high", vec![rat(1200), rat(1500)]),
        ];
        let d = membership_points(&rat(740), &regions, DEFAULT_COMPLETION_CAP).unwrap();
        assert_eq!(d["low"], crate::value::ratio(3, 4));
        assert_eq!(d["medium"], crate::value::ratio(1, 4));
        assert_eq!(membership_points(&rat(500), &regions, DEFAULT_COMPLETION_CAP).unwrap()["low"], rat(1));
        assert!(matches!(membership_points(&rat(1), &regions, 4), Err(MembershipError::CapExceeded { .. })));
    }

    #[test]
    fn interleaving_points_are_rejected() {
        let regions = vec![
            PrototypeRegion::points("a", vec![rat(1), rat(5)]),
            PrototypeRegion::points("b", vec![rat(3)]),
        ];
        assert!(matches!(membership_points(&rat(2), &regions, 100), Err(MembershipError::Interleaving(..))));
    }
}
