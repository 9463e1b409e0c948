//! Exact rational arithmetic for the lens-space correction terms `d(n, i)`
//! and d-invariant extraction from surgery results.

use std::collections::BTreeMap;

use num_rational::Ratio;

use crate::error::Error;
use crate::knotcx::KnotComplex;

/// Exact rational number used for absolute gradings. No floating point anywhere.
pub type Rational = Ratio<i64>;

/// Correction term of the lens space `L(n,1)` in the Spin^c class `i`.
///
/// For `n > 0` this is `-max { (1 - (n+2s)^2/n) / 4 : s ≡ i (mod n) }`, and
/// `d(-n, i) = -d(n, i)`. The maximum is attained at a residue in the window
/// `[-|n|, |n|]`; the quadratic decreases away from its vertex, so enumerating
/// the window suffices (see `window_stable` in the tests).
pub fn d_lens(n: i64, i: i64) -> Result<Rational, Error> {
    if n == 0 {
        return Err(Error::ZeroSurgeryCoefficient);
    }
    let m = n.abs();
    if i < 0 || i >= m {
        return Err(Error::SpincOutOfRange { i, n });
    }
    let d = d_lens_window(m, i, m);
    Ok(if n > 0 { d } else { -d })
}

/// `d(n, i)` for `n > 0` maximized over `s ≡ i (mod n)` with `|s| <= window`.
pub(crate) fn d_lens_window(n: i64, i: i64, window: i64) -> Rational {
    debug_assert!(n > 0 && (0..n).contains(&i));
    let mut best: Option<Rational> = None;
    let mut s = -window + (i - (-window)).rem_euclid(n);
    while s <= window {
        let q = Rational::new(1, 4) * (Rational::from(1) - Rational::new((n + 2 * s).pow(2), n));
        best = Some(match best {
            Some(b) if b >= q => b,
            _ => q,
        });
        s += n;
    }
    -best.expect("window always contains a representative")
}

/// Tower bottom degrees of `n`-surgery on the knot, per Spin^c class: the
/// d-invariants when there is one tower per class.
pub fn d_invariants(c: &KnotComplex, n: i64) -> Result<BTreeMap<i64, Vec<Rational>>, Error> {
    if n == 0 {
        return Err(Error::ZeroSurgeryCoefficient);
    }
    let mut out = BTreeMap::new();
    for i in 0..n.abs() {
        let res = crate::cone::surgery_homology(c, n, i, None, None)?;
        out.insert(i, res.module.towers());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knotcx::{builtin_t34, builtin_unknot};

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn d_invariants_of_small_surgeries() {
        let d = d_invariants(&builtin_unknot(), 4).unwrap();
        for i in 0..4 {
            assert_eq!(d[&i], vec![d_lens(4, i).unwrap()]);
        }
        assert_eq!(d_invariants(&builtin_t34(), 1).unwrap()[&0], vec![r(-2, 1)]);
        assert_eq!(d_invariants(&builtin_t34(), -1).unwrap()[&0], vec![r(0, 1)]);
        assert!(d_invariants(&builtin_unknot(), 0).is_err());
    }

    #[test]
    fn sphere_is_zero() {
        assert_eq!(d_lens(1, 0).unwrap(), r(0, 1));
        assert_eq!(d_lens(-1, 0).unwrap(), r(0, 1));
    }

    #[test]
    fn small_lens_spaces() {
        assert_eq!(d_lens(2, 0).unwrap(), r(1, 4));
        assert_eq!(d_lens(2, 1).unwrap(), r(-1, 4));
        assert_eq!(d_lens(3, 0).unwrap(), r(1, 2));
        assert_eq!(d_lens(3, 1).unwrap(), r(-1, 6));
        assert_eq!(d_lens(3, 2).unwrap(), r(-1, 6));
    }

    #[test]
    fn negative_is_minus_positive() {
        for n in 1..=6 {
            for i in 0..n {
                assert_eq!(d_lens(-n, i).unwrap(), -d_lens(n, i).unwrap());
            }
        }
    }

    #[test]
    fn conjugation_symmetry() {
        for n in 1..=12 {
            for i in 0..n {
                let j = (n - i) % n;
                assert_eq!(d_lens(n, i).unwrap(), d_lens(n, j).unwrap());
            }
        }
    }

    #[test]
    fn spin_class_zero_closed_form() {
        // Maximizer s = 0 (or s = -n), both giving (1 - n)/4.
        for n in 1..=12 {
            let d = d_lens(n, 0).unwrap();
            assert_eq!(d, r(n - 1, 4));
            assert!((d * 4).is_integer());
        }
    }

    #[test]
    fn window_stable() {
        for n in 1..=12 {
            for i in 0..n {
                assert_eq!(d_lens_window(n, i, n), d_lens_window(n, i, 4 * n));
            }
        }
    }

    #[test]
    fn rejects_zero_and_bad_residue() {
        assert!(d_lens(0, 0).is_err());
        assert!(d_lens(3, 3).is_err());
        assert!(d_lens(3, -1).is_err());
    }
}
