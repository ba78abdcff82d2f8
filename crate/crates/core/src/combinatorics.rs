//! Closed-form and recursive counts for burst-error balls.
//!
//! Every routine is exact and generic over an [`ExactScalar`]. Arguments that
//! fall outside a formula's natural domain follow the usual conventions:
//! binomials with `n < i` (including negative `n`) vanish, a radius-0
//! insertion ball has one element, two radius-0 balls never intersect, and the
//! maximal deletion ball is 0 when `t < 0` or `n < bt` and 1 when `n = bt`.

use std::collections::HashMap;

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{precondition, Error, Result};
use crate::scalar::{add, lift, mul, pow, sub, sum, ExactScalar};

/// Largest supported alphabet.
pub const MAX_ALPHABET: u32 = 255;

/// The tuple `(q, b, t, n)`: alphabet size, burst length, number of bursts and
/// word length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelParams {
    pub q: u32,
    pub b: u32,
    pub t: u32,
    pub n: u32,
}

impl ChannelParams {
    pub fn new(q: u32, b: u32, t: u32, n: u32) -> Result<Self> {
        let p = ChannelParams { q, b, t, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q < 2 || self.q > MAX_ALPHABET {
            return Err(Error::InvalidParams(format!(
                "alphabet size q={} must lie in [2, {MAX_ALPHABET}]",
                self.q
            )));
        }
        if self.b < 1 {
            return Err(Error::InvalidParams("burst length b must be at least 1".into()));
        }
        Ok(())
    }

    fn q64(&self) -> u64 {
        u64::from(self.q)
    }

    fn b64(&self) -> u64 {
        u64::from(self.b)
    }

    fn n64(&self) -> i64 {
        i64::from(self.n)
    }

    fn t64(&self) -> i64 {
        i64::from(self.t)
    }
}

/// Binomial coefficient with `C(n, i) = 0` whenever `n < i`.
pub fn binom<T: ExactScalar>(n: i64, i: i64) -> Result<T> {
    if i < 0 {
        return Err(Error::InvalidParams(format!("binomial lower index {i} is negative")));
    }
    if n < i {
        return Ok(T::zero());
    }
    let k = i.min(n - i) as usize;
    // One row of Pascal's triangle, additions only.
    let mut row = vec![T::zero(); k + 1];
    row[0] = T::one();
    for _ in 0..n {
        for col in (1..=k).rev() {
            row[col] = add(&row[col], &row[col - 1])?;
        }
    }
    Ok(row.pop().expect("row has k + 1 entries"))
}

/// `q^{t(b-1)} * sum_{i=0}^{t} C(n+t, i) (q-1)^i`.
pub(crate) fn ins_ball<T: ExactScalar>(q: u64, b: u64, n: i64, t: i64) -> Result<T> {
    if t < 0 {
        return Ok(T::zero());
    }
    let scale: T = pow(q, t as u64 * (b - 1))?;
    let inner = sum((0..=t).map(|i| {
        let c: T = binom(n + t, i)?;
        mul(&c, &pow(q - 1, i as u64)?)
    }))?;
    mul(&scale, &inner)
}

/// `q^{t(b-1)} * sum_{i=0}^{t-1} C(n+t, i) (q-1)^i [1 - (-1)^{t-i}]`.
pub(crate) fn ins_intersection<T: ExactScalar>(q: u64, b: u64, n: i64, t: i64) -> Result<T> {
    if t <= 0 {
        return Ok(T::zero());
    }
    let two: T = lift(2)?;
    let scale: T = pow(q, t as u64 * (b - 1))?;
    let inner = sum((0..t).filter(|i| (t - i) % 2 == 1).map(|i| {
        let c: T = binom(n + t, i)?;
        mul(&mul(&c, &pow(q - 1, i as u64)?)?, &two)
    }))?;
    mul(&scale, &inner)
}

/// Size of the radius-`t` burst-insertion ball of any center of length `n`.
pub fn ins_ball_size<T: ExactScalar>(p: &ChannelParams) -> Result<T> {
    p.validate()?;
    ins_ball(p.q64(), p.b64(), p.n64(), p.t64())
}

/// Maximum intersection of two radius-`t` burst-insertion balls with distinct
/// centers of length `n`. Returns 0 for `t = 0`.
pub fn ins_intersection_max<T: ExactScalar>(p: &ChannelParams) -> Result<T> {
    p.validate()?;
    if p.t == 0 {
        return Ok(T::zero());
    }
    if p.n == 0 {
        return Err(precondition("ins_intersection_max", "n must be at least 1 when t >= 1"));
    }
    ins_intersection(p.q64(), p.b64(), p.n64(), p.t64())
}

/// Evaluates both sides of the insertion-ball recurrences (first flag) and of
/// the intersection recurrences and identities (second flag).
pub fn ins_recurrence_check(p: &ChannelParams) -> Result<(bool, bool)> {
    use num_bigint::BigUint;
    p.validate()?;
    if p.n == 0 || p.t == 0 {
        return Err(precondition("ins_recurrence_check", "requires n >= 1 and t >= 1"));
    }
    let (q, b, n, t) = (p.q64(), p.b64(), p.n64(), p.t64());
    let ball = |n: i64, t: i64| ins_ball::<BigUint>(q, b, n, t);
    let inter = |n: i64, t: i64| ins_intersection::<BigUint>(q, b, n, t);
    let step: BigUint = pow(q, b - 1)?;
    let growth = |i: i64| -> Result<BigUint> { mul(&pow(q - 1, i as u64)?, &pow(q, i as u64 * (b - 1))?) };
    let two = BigUint::from(2u32);

    let lhs = ball(n, t)?;
    let first = add(
        &ball(n - 1, t)?,
        &mul(&mul(&BigUint::from(q - 1), &step)?, &ball(n, t - 1)?)?,
    )?;
    let second = sum((0..=t).map(|i| mul(&growth(i)?, &ball(n - 1, t - i)?)))?;
    let ball_ok = lhs == first && lhs == second;

    let lhs = inter(n, t)?;
    let linked = add(&inter(n - 1, t)?, &mul(&step, &inter(n, t - 1)?)?)?;
    let linked_rhs = mul(&mul(&two, &step)?, &ball(n, t - 1)?)?;
    let rec_first = add(
        &inter(n - 1, t)?,
        &mul(&mul(&BigUint::from(q - 1), &step)?, &inter(n, t - 1)?)?,
    )?;
    let rec_second = sum((0..t).map(|i| mul(&growth(i)?, &inter(n - 1, t - i)?)))?;
    let via_ball_first = add(
        &mul(&mul(&two, &step)?, &ball(n, t - 1)?)?,
        &mul(&mul(&BigUint::from(q - 2), &step)?, &inter(n, t - 1)?)?,
    )?;
    let via_ball_second = mul(
        &two,
        &sum((1..=t).map(|i| {
            let f: BigUint = mul(&pow(q - 2, i as u64 - 1)?, &pow(q, i as u64 * (b - 1))?)?;
            mul(&f, &ball(n, t - i)?)
        }))?,
    )?;
    let inter_ok = linked == linked_rhs
        && lhs == rec_first
        && lhs == rec_second
        && lhs == via_ball_first
        && lhs == via_ball_second;
    Ok((ball_ok, inter_ok))
}

/// `d_{q,1}(n, t)`: deletion-ball size of the cyclic word, by the recursion on
/// the alphabet size down to the unary alphabet.
fn cyclic_single_deletion<T: ExactScalar>(q: u64, n: i64, t: i64, memo: &mut HashMap<(u64, i64, i64), T>) -> Result<T> {
    if t < 0 || n < t {
        return Ok(T::zero());
    }
    if n == t || q == 1 {
        return Ok(T::one());
    }
    if let Some(v) = memo.get(&(q, n, t)) {
        return Ok(v.clone());
    }
    let mut acc = T::zero();
    for i in 0..=t {
        let c: T = binom(n - t, i)?;
        if c.is_zero() {
            continue;
        }
        let inner = cyclic_single_deletion(q - 1, t, t - i, memo)?;
        acc = add(&acc, &mul(&c, &inner)?)?;
    }
    memo.insert((q, n, t), acc.clone());
    Ok(acc)
}

/// Maximum radius-`t` burst-deletion ball size over words of length `n`, with
/// the domain extended to every integer `n` and `t`.
pub fn del_ball_max_extended<T: ExactScalar>(q: u32, b: u32, n: i64, t: i64) -> Result<T> {
    ChannelParams { q, b, t: 0, n: 0 }.validate()?;
    let b = i64::from(b);
    if t < 0 || n < b * t {
        return Ok(T::zero());
    }
    if n == b * t {
        return Ok(T::one());
    }
    let mut memo = HashMap::new();
    let mut acc = T::zero();
    for i in 0..=t {
        let c: T = binom(n - b * t, i)?;
        if c.is_zero() {
            continue;
        }
        let inner = cyclic_single_deletion(u64::from(q) - 1, t, t - i, &mut memo)?;
        acc = add(&acc, &mul(&c, &inner)?)?;
    }
    Ok(acc)
}

/// Maximum radius-`t` burst-deletion ball size over words of length `n`.
pub fn del_ball_max<T: ExactScalar>(p: &ChannelParams) -> Result<T> {
    p.validate()?;
    del_ball_max_extended(p.q, p.b, p.n64(), p.t64())
}

/// `D(n,t) - D(n-b,t) + D(n-(q+1)b, t-q)` for any integer arguments.
fn deletion_pair_intersection<T: ExactScalar>(q: u32, b: u32, n: i64, t: i64) -> Result<T> {
    let (qi, bi) = (i64::from(q), i64::from(b));
    let d = |n: i64, t: i64| del_ball_max_extended::<T>(q, b, n, t);
    add(&sub(&d(n, t)?, &d(n - bi, t)?)?, &d(n - (qi + 1) * bi, t - qi)?)
}

/// Binary deletion threshold used while peeling symbols: the maximum
/// intersection formula for `t >= 1` and 0 for `t = 0`, without range checks.
pub(crate) fn binary_deletion_threshold<T: ExactScalar>(b: u32, n: i64, t: i64) -> Result<T> {
    if t <= 0 {
        return Ok(T::zero());
    }
    deletion_pair_intersection(2, b, n, t)
}

fn check_intersection_range(op: &'static str, p: &ChannelParams) -> Result<()> {
    if p.b < 2 {
        return Err(precondition(op, "requires b >= 2"));
    }
    if p.t < 1 {
        return Err(precondition(op, "requires t >= 1"));
    }
    let min_n = u64::from(p.b) * (u64::from(p.t) + 1) - 1;
    if u64::from(p.n) < min_n {
        return Err(precondition(op, format!("requires n >= b(t+1)-1 = {min_n}")));
    }
    Ok(())
}

/// Maximum intersection of two binary radius-`t` burst-deletion balls with
/// distinct centers. Only defined for `q = 2`, `b >= 2`, `t >= 1` and
/// `n >= b(t+1)-1`.
pub fn del_intersection_max_binary<T: ExactScalar>(p: &ChannelParams) -> Result<T> {
    const OP: &str = "del_intersection_max_binary";
    p.validate()?;
    if p.q != 2 {
        return Err(precondition(
            OP,
            format!(
                "exact value known only for q = 2 (got q = {}); use the lower bound",
                p.q
            ),
        ));
    }
    check_intersection_range(OP, p)?;
    deletion_pair_intersection(2, p.b, p.n64(), p.t64())
}

/// Intersection achieved by the two centers `0^b X` and `0^{b-1}1 X` (with `X`
/// the b-cyclic word starting at 1). A lower bound on the maximum deletion
/// intersection; exact only for `q = 2`.
pub fn del_intersection_lower_bound<T: ExactScalar>(p: &ChannelParams) -> Result<T> {
    p.validate()?;
    check_intersection_range("del_intersection_lower_bound", p)?;
    deletion_pair_intersection(p.q, p.b, p.n64(), p.t64())
}

/// `q^{n+tb} / I_{q,b}(n,t)` in lowest terms, with its floor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpherePackingBound<T: Clone + Integer> {
    pub value: Ratio<T>,
    pub floor: T,
}

pub fn sphere_packing_bound<T: ExactScalar + Integer>(p: &ChannelParams) -> Result<SpherePackingBound<T>> {
    p.validate()?;
    if p.n == 0 {
        return Err(precondition("sphere_packing_bound", "requires n >= 1"));
    }
    let space: T = pow(p.q64(), u64::from(p.n) + u64::from(p.t) * p.b64())?;
    let ball: T = ins_ball_size(p)?;
    let value = Ratio::new(space, ball);
    let floor = value.floor().to_integer();
    Ok(SpherePackingBound { value, floor })
}

/// Number of words of length `n` whose radius-1 burst-deletion ball has
/// exactly `i` elements: `q^b (q-1)^{i-1} C(n-b, i-1)`.
pub fn count_centers_by_radius1_ball_size<T: ExactScalar>(q: u32, b: u32, n: u32, i: u32) -> Result<T> {
    const OP: &str = "count_centers_by_radius1_ball_size";
    ChannelParams { q, b, t: 1, n }.validate()?;
    if n < b + 1 {
        return Err(precondition(OP, "requires n >= b + 1"));
    }
    if i < 1 || i > n - b + 1 {
        return Err(precondition(
            OP,
            format!("ball size i = {i} outside [1, {}]", n - b + 1),
        ));
    }
    let (q, b) = (u64::from(q), u64::from(b));
    let c: T = binom(i64::from(n) - b as i64, i64::from(i) - 1)?;
    mul(&mul(&pow(q, b)?, &pow(q - 1, u64::from(i) - 1)?)?, &c)
}

#[cfg(test)]
mod tests {
    use num_bigint::BigUint;

    use super::*;

    fn p(q: u32, b: u32, t: u32, n: u32) -> ChannelParams {
        ChannelParams::new(q, b, t, n).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn binom_conventions() {
        assert_eq!(binom::<u64>(3, 5).unwrap(), 0);
        assert_eq!(binom::<u64>(5, 5).unwrap(), 1);
        assert_eq!(binom::<u64>(4, 2).unwrap(), 6);
        assert_eq!(binom::<u64>(-3, 2).unwrap(), 0);
        assert_eq!(binom::<u64>(0, 0).unwrap(), 1);
        assert_eq!(binom::<u64>(52, 5).unwrap(), 2_598_960);
        assert!(matches!(binom::<u64>(4, -1), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn binom_overflow_is_reported_not_wrapped() {
        assert_eq!(binom::<u8>(12, 6), Err(Error::Overflow));
        assert_eq!(binom::<BigUint>(10, 5).unwrap(), big(252));
    }

    #[test]
    fn ins_ball_examples() {
        assert_eq!(ins_ball_size::<u64>(&p(2, 2, 0, 1)).unwrap(), 1);
        assert_eq!(ins_ball_size::<u64>(&p(2, 2, 1, 3)).unwrap(), 10);
        for (q, b, t) in [(2, 1, 3), (3, 2, 2), (5, 3, 1)] {
            let expect = u64::from(q).pow(b * t);
            assert_eq!(ins_ball_size::<u64>(&p(q, b, t, 0)).unwrap(), expect);
        }
    }

    #[test]
    fn ins_intersection_examples() {
        for q in 2..=4u32 {
            for b in 1..=3u32 {
                for n in 1..=5u32 {
                    let v: u64 = ins_intersection_max(&p(q, b, 1, n)).unwrap();
                    assert_eq!(v, 2 * u64::from(q).pow(b - 1));
                }
            }
        }
        assert_eq!(ins_intersection_max::<u64>(&p(2, 2, 2, 2)).unwrap(), 32);
        assert_eq!(ins_intersection_max::<u64>(&p(3, 2, 0, 4)).unwrap(), 0);
        assert!(ins_intersection_max::<u64>(&p(3, 2, 1, 0)).is_err());
    }

    #[test]
    fn binary_intersection_is_scaled_ball() {
        for b in 1..=4u32 {
            for t in 1..=4u32 {
                for n in 1..=9u32 {
                    let lhs: BigUint = ins_intersection_max(&p(2, b, t, n)).unwrap();
                    let ball: BigUint = ins_ball_size(&p(2, b, t - 1, n)).unwrap();
                    assert_eq!(lhs, ball * big(1 << b));
                }
            }
        }
    }

    #[test]
    fn recurrence_examples() {
        assert_eq!(ins_recurrence_check(&p(2, 2, 1, 3)).unwrap(), (true, true));
        assert_eq!(ins_recurrence_check(&p(3, 2, 2, 2)).unwrap(), (true, true));
        assert_eq!(ins_recurrence_check(&p(2, 1, 2, 4)).unwrap(), (true, true));
        assert!(ins_recurrence_check(&p(2, 1, 0, 4)).is_err());
    }

    #[test]
    fn del_ball_examples() {
        for (q, b, t) in [(2, 2, 1), (3, 3, 2), (4, 1, 3)] {
            assert_eq!(del_ball_max::<u64>(&p(q, b, t, b * t)).unwrap(), 1);
        }
        assert_eq!(del_ball_max::<u64>(&p(2, 2, 1, 5)).unwrap(), 4);
        assert_eq!(del_ball_max::<u64>(&p(2, 2, 2, 7)).unwrap(), 7);
        assert_eq!(del_ball_max_extended::<u64>(2, 2, 3, 2).unwrap(), 0);
        assert_eq!(del_ball_max_extended::<u64>(2, 2, 5, -1).unwrap(), 0);
        // Single deletions from the ternary cyclic word 0120: {120, 020, 010, 012}.
        assert_eq!(del_ball_max::<u64>(&p(3, 1, 1, 4)).unwrap(), 4);
    }

    #[test]
    fn radius_one_deletion_ball_is_n_minus_b_plus_one() {
        for q in 2..=4u32 {
            for b in 1..=4u32 {
                for n in b + 1..=12 {
                    let v: u64 = del_ball_max(&p(q, b, 1, n)).unwrap();
                    assert_eq!(v, u64::from(n - b + 1));
                }
            }
        }
    }

    #[test]
    fn del_intersection_examples() {
        for b in 2..=5u32 {
            assert_eq!(
                del_intersection_max_binary::<u64>(&p(2, b, 1, 2 * b - 1)).unwrap(),
                u64::from(b)
            );
        }
        assert_eq!(del_intersection_max_binary::<u64>(&p(2, 2, 2, 7)).unwrap(), 6);
        assert!(matches!(
            del_intersection_max_binary::<u64>(&p(3, 2, 2, 7)),
            Err(Error::Precondition { .. })
        ));
        assert!(del_intersection_max_binary::<u64>(&p(2, 2, 2, 4)).is_err());
        assert!(del_intersection_max_binary::<u64>(&p(2, 1, 2, 9)).is_err());
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(del_intersection_lower_bound::<u64>(&p(3, 2, 1, 5)).unwrap(), 2);
        for b in 2..=3u32 {
            for t in 1..=3u32 {
                for n in b * (t + 1) - 1..=14 {
                    let params = p(2, b, t, n);
                    assert_eq!(
                        del_intersection_lower_bound::<u64>(&params).unwrap(),
                        del_intersection_max_binary::<u64>(&params).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn sphere_packing_examples() {
        let s: SpherePackingBound<BigUint> = sphere_packing_bound(&p(2, 1, 1, 3)).unwrap();
        assert_eq!(s.value, Ratio::new(big(16), big(5)));
        assert_eq!(s.floor, big(3));
        let s: SpherePackingBound<BigUint> = sphere_packing_bound(&p(3, 2, 0, 4)).unwrap();
        assert_eq!(s.value, Ratio::from_integer(big(81)));
        assert!(sphere_packing_bound::<BigUint>(&p(3, 2, 1, 0)).is_err());
    }

    #[test]
    fn center_histogram_examples() {
        assert_eq!(count_centers_by_radius1_ball_size::<u64>(2, 2, 4, 2).unwrap(), 8);
        assert_eq!(count_centers_by_radius1_ball_size::<u64>(3, 2, 6, 1).unwrap(), 9);
        assert!(count_centers_by_radius1_ball_size::<u64>(2, 2, 4, 0).is_err());
        assert!(count_centers_by_radius1_ball_size::<u64>(2, 2, 4, 4).is_err());
        assert!(count_centers_by_radius1_ball_size::<u64>(2, 4, 4, 1).is_err());
    }

    #[test]
    fn invalid_alphabet_rejected() {
        assert!(ChannelParams::new(1, 2, 1, 3).is_err());
        assert!(ChannelParams::new(256, 2, 1, 3).is_err());
        assert!(ChannelParams::new(2, 0, 1, 3).is_err());
    }
}
