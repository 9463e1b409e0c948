//! The truncated surgery mapping cone and its stabilized homology.
//!
//! For `n ≠ 0` and a Spin^c class `i mod |n|`, the cone `X(n; b, δ)` is
//! built from the sectors `A_s` (`s ≡ i`, `|s| ≤ b`) and `B_s`
//! (`−b + n ≤ s ≤ b`), with differential the internal boundaries plus
//! `D = Σ v_s + h_s`, where `v_s` lands in `B_s` and `h_s` in `B_{s+n}`.
//! Gradings are shifted per sector so that `D` is homogeneous of degree −1,
//! and the absolute grading is the cone grading plus the lens-space
//! correction term `d(n, i)`.
//!
//! Truncation in `δ` is removed by stabilization: the answer is computed at
//! `δ` and `δ + 1`, pieces are classified by how they move (towers grow by
//! one, the reduced part is fixed, truncation echoes drift upward), and the
//! classification must agree across a doubling of `δ`.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::gradings::{d_lens, Rational};
use crate::homalg::{
    homology_pieces, ungraded_u_lengths, ChainMap, FiniteComplex, GradedModule, Homology,
    RawPiece, SparseMap,
};
use crate::knotcx::{IndexedComplex, KnotComplex};
use crate::regions::{h_map, region_a, region_b, v_map, Sector};

/// HF⁺ of one surgery in one Spin^c class, plus the truncation parameters
/// that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgeryResult {
    pub n: i64,
    pub i: i64,
    pub module: GradedModule,
    pub delta_used: u32,
    pub width: i64,
}

/// Width beyond which the discarded `v_s`/`h_s` are isomorphisms, with slack
/// `|n|` so the B-window is nonempty.
pub fn truncation_width(c: &KnotComplex, n: i64) -> i64 {
    c.max_abs_alexander().max(1) + n.abs()
}

/// Grading shift of the `B_s` summand inside the cone. Writing `s = σ + ℓn`
/// (for `n > 0`) the shift is `2ℓσ + nℓ(ℓ−1) − 1`; for `n < 0`, writing
/// `s = −(σ + ℓ|n|)`, it is `−2ℓσ − |n|ℓ(ℓ−1)`. Both satisfy the recursion
/// `shift(s + n) = shift(s) + 2s` that makes `h_s` homogeneous.
pub fn b_shift(n: i64, s: i64) -> i64 {
    debug_assert!(n != 0);
    if n > 0 {
        let sigma = s.rem_euclid(n);
        let l = (s - sigma) / n;
        2 * l * sigma + n * l * (l - 1) - 1
    } else {
        let m = -n;
        let sigma = (-s).rem_euclid(m);
        let l = (-s - sigma) / m;
        -2 * l * sigma - m * l * (l - 1)
    }
}

/// Grading shift of the `A_s` summand: one above `B_s`, so that `v_s` is
/// homogeneous of degree −1.
pub fn a_shift(n: i64, s: i64) -> i64 {
    b_shift(n, s) + 1
}

/// The assembled cone plus enough layout to locate individual sectors.
pub struct Cone {
    pub complex: FiniteComplex,
    /// (s, basis offset, dimension) of each A sector, ascending in s
    pub a_layout: Vec<(i64, usize, usize)>,
    /// (s, basis offset, dimension) of each B sector, ascending in s
    pub b_layout: Vec<(i64, usize, usize)>,
}

fn window(lo: i64, hi: i64, residue: i64, modulus: i64) -> Vec<i64> {
    let mut s = lo + (residue - lo).rem_euclid(modulus);
    let mut out = Vec::new();
    while s <= hi {
        out.push(s);
        s += modulus;
    }
    out
}

/// Builds `X_i(n)` at truncation `δ` and width `b`.
pub fn build_cone(
    c: &KnotComplex,
    ix: &IndexedComplex,
    n: i64,
    i: i64,
    delta: u32,
    b: i64,
) -> Result<Cone, Error> {
    if n == 0 {
        return Err(Error::ZeroSurgeryCoefficient);
    }
    if !ix.has_flip {
        return Err(Error::FlipMissing);
    }
    let m = n.abs();
    let i = i.rem_euclid(m);
    let a_window = window(-b, b, i, m);
    let b_window = window((-b + n).min(b), b, i, m);
    if a_window.is_empty() || b_window.is_empty() {
        return Err(Error::Validation("empty truncation window".into()));
    }

    let a_secs: Vec<(i64, Sector)> = a_window
        .iter()
        .map(|&s| (s, region_a(c, ix, s, delta, a_shift(n, s))))
        .collect();
    let b_secs: Vec<(i64, Sector)> = b_window
        .iter()
        .map(|&s| (s, region_b(c, ix, delta, b_shift(n, s))))
        .collect();

    let mut a_layout = Vec::new();
    let mut b_layout = Vec::new();
    let mut grading = Vec::new();
    for (s, sec) in &a_secs {
        a_layout.push((*s, grading.len(), sec.dim()));
        grading.extend_from_slice(&sec.complex.grading);
    }
    for (s, sec) in &b_secs {
        b_layout.push((*s, grading.len(), sec.dim()));
        grading.extend_from_slice(&sec.complex.grading);
    }
    let b_offset: BTreeMap<i64, usize> = b_layout.iter().map(|&(s, off, _)| (s, off)).collect();

    let dim = grading.len();
    let mut boundary = SparseMap { cols: Vec::with_capacity(dim) };
    let mut u = SparseMap { cols: Vec::with_capacity(dim) };
    for ((s, sec), &(_, off, _)) in a_secs.iter().zip(&a_layout) {
        let v = b_offset
            .get(s)
            .map(|&boff| (v_map(sec, &b_secs[b_window.iter().position(|&t| t == *s).unwrap()].1), boff));
        let h = b_offset.get(&(s + n)).map(|&boff| {
            let tgt = &b_secs[b_window.iter().position(|&t| t == s + n).unwrap()].1;
            (h_map(c, ix, sec, tgt, *s), boff)
        });
        for k in 0..sec.dim() {
            let mut col: Vec<u32> = sec.complex.boundary.cols[k]
                .iter()
                .map(|&r| r + off as u32)
                .collect();
            for (map, boff) in v.iter().chain(h.iter()) {
                let mut extra: Vec<u32> = map.map.cols[k]
                    .iter()
                    .map(|&r| r + *boff as u32)
                    .collect();
                extra.sort_unstable();
                col = crate::homalg::xor(&col, &extra);
            }
            boundary.cols.push(col);
            u.cols.push(
                sec.complex.u.cols[k]
                    .iter()
                    .map(|&r| r + off as u32)
                    .collect(),
            );
        }
    }
    for ((_, sec), &(_, off, _)) in b_secs.iter().zip(&b_layout) {
        for k in 0..sec.dim() {
            boundary.cols.push(
                sec.complex.boundary.cols[k]
                    .iter()
                    .map(|&r| r + off as u32)
                    .collect(),
            );
            u.cols.push(
                sec.complex.u.cols[k]
                    .iter()
                    .map(|&r| r + off as u32)
                    .collect(),
            );
        }
    }

    Ok(Cone {
        complex: FiniteComplex { grading, boundary, u },
        a_layout,
        b_layout,
    })
}

/// Counts a piece multiset.
fn counted(pieces: &[RawPiece]) -> BTreeMap<(i64, u32), i64> {
    let mut out = BTreeMap::new();
    for p in pieces {
        *out.entry((p.bottom, p.length.expect("finite truncation"))).or_insert(0) += 1;
    }
    out
}

/// Classifies the pieces seen at truncations δ (lo) and δ+1 (hi).
///
/// Pieces whose bottom sits at or above δ are truncation echoes — copies of
/// the reduced part reflected near the ceiling, which drift up by two when δ
/// grows by one; they must pair up exactly and are discarded. Below that
/// cutoff, identical pieces are reduced homology and pieces whose length grew
/// by exactly one are truncated towers. Anything left over means δ is still
/// too small; the bottoms of the real answer do not move with δ, so doubling
/// eventually puts every echo above the cutoff.
fn classify(lo: &[RawPiece], hi: &[RawPiece], delta: u32) -> Option<Vec<RawPiece>> {
    let cutoff = delta as i64;
    let split = |pieces: &[RawPiece]| {
        let mut low = Vec::new();
        let mut echo = Vec::new();
        for p in pieces {
            if p.bottom >= cutoff {
                echo.push(p.clone());
            } else {
                low.push(p.clone());
            }
        }
        (counted(&low), counted(&echo))
    };
    let (mut lo_c, lo_echo) = split(lo);
    let (mut hi_c, hi_echo) = split(hi);

    // Echoes must be the same multiset shifted up by two.
    let shifted: BTreeMap<(i64, u32), i64> =
        lo_echo.into_iter().map(|((b, l), c)| ((b + 2, l), c)).collect();
    if shifted != hi_echo {
        return None;
    }

    let mut out = Vec::new();
    let keys: Vec<(i64, u32)> = lo_c.keys().copied().collect();
    for key in &keys {
        let take = (*lo_c.get(key).unwrap()).min(hi_c.get(key).copied().unwrap_or(0));
        if take > 0 {
            for _ in 0..take {
                out.push(RawPiece { bottom: key.0, length: Some(key.1) });
            }
            *lo_c.get_mut(key).unwrap() -= take;
            *hi_c.get_mut(key).unwrap() -= take;
        }
    }
    for key in &keys {
        let grown = (key.0, key.1 + 1);
        let take = (*lo_c.get(key).unwrap()).min(hi_c.get(&grown).copied().unwrap_or(0));
        if take > 0 {
            for _ in 0..take {
                out.push(RawPiece { bottom: key.0, length: None });
            }
            *lo_c.get_mut(key).unwrap() -= take;
            *hi_c.get_mut(&grown).unwrap() -= take;
        }
    }
    if lo_c.values().any(|&v| v != 0) || hi_c.values().any(|&v| v != 0) {
        return None;
    }
    out.sort();
    Some(out)
}

/// Runs the builder at δ and δ+1, classifies, and doubles δ until two
/// successive rounds agree. With an explicit δ a single round is accepted.
pub(crate) fn stabilize_pieces(
    mut build: impl FnMut(u32) -> Vec<RawPiece>,
    delta0: u32,
    explicit: bool,
) -> Result<(Vec<RawPiece>, u32), Error> {
    let cap = delta0.saturating_mul(1 << 10);
    let mut delta = delta0;
    let mut prev: Option<Vec<RawPiece>> = None;
    loop {
        let cur = classify(&build(delta), &build(delta + 1), delta);
        if explicit {
            return cur
                .map(|p| (p, delta))
                .ok_or(Error::Stabilization { cap: delta });
        }
        if let (Some(p), Some(c)) = (&prev, &cur) {
            if p == c {
                return Ok((c.clone(), delta));
            }
        }
        prev = cur;
        if delta >= cap {
            return Err(Error::Stabilization { cap });
        }
        delta = (delta * 2).min(cap);
    }
}

fn default_delta0(c: &KnotComplex, n: i64, b: i64) -> u32 {
    (4 * (b + n.abs() + c.max_abs_alexander()) + 8) as u32
}

/// HF⁺ of `n`-surgery (`n ≠ 0` computes the cone; `n = 0` delegates to
/// [`zero_surgery_homology`]) in the Spin^c class `i`, with absolute
/// gradings for `n ≠ 0`.
pub fn surgery_homology(
    c: &KnotComplex,
    n: i64,
    i: i64,
    delta: Option<u32>,
    width: Option<i64>,
) -> Result<SurgeryResult, Error> {
    if n == 0 {
        return zero_surgery_homology(c, i, delta);
    }
    let ix = c.indexed()?;
    if !ix.has_flip {
        return Err(Error::FlipMissing);
    }
    let m = n.abs();
    let i = i.rem_euclid(m);
    let b = width.unwrap_or_else(|| truncation_width(c, n));
    let delta0 = delta.unwrap_or_else(|| default_delta0(c, n, b));
    let build = |d: u32| {
        homology_pieces(&build_cone(c, &ix, n, i, d, b).expect("window checked").complex)
    };
    let (raw, delta_used) = stabilize_pieces(build, delta0, delta.is_some())?;
    let module = GradedModule::from_raw(&raw, d_lens(n, i)?);
    Ok(SurgeryResult { n, i, module, delta_used, width: b })
}

fn build_zero_cone(
    c: &KnotComplex,
    ix: &IndexedComplex,
    i: i64,
    delta: u32,
) -> FiniteComplex {
    // Cone of v_i + h_i: A_i → B, with A shifted by one so v has degree −1.
    let a = region_a(c, ix, i, delta, 1);
    let b = region_b(c, ix, delta, 0);
    let v = v_map(&a, &b);
    let h = h_map(c, ix, &a, &b, i);
    let off = a.dim() as u32;
    let mut grading = a.complex.grading.clone();
    grading.extend_from_slice(&b.complex.grading);
    let mut boundary = SparseMap { cols: Vec::new() };
    let mut u = SparseMap { cols: Vec::new() };
    for k in 0..a.dim() {
        let mut col = a.complex.boundary.cols[k].clone();
        let mut extra: Vec<u32> = crate::homalg::xor(&v.map.cols[k], &h.map.cols[k])
            .iter()
            .map(|&r| r + off)
            .collect();
        extra.sort_unstable();
        col = crate::homalg::xor(&col, &extra);
        boundary.cols.push(col);
        u.cols.push(a.complex.u.cols[k].clone());
    }
    for k in 0..b.dim() {
        boundary.cols.push(b.complex.boundary.cols[k].iter().map(|&r| r + off).collect());
        u.cols.push(b.complex.u.cols[k].iter().map(|&r| r + off).collect());
    }
    FiniteComplex { grading, boundary, u }
}

/// HF⁺ of 0-surgery in the Spin^c class `i ∈ Z` (the cone of
/// `v_i + h_i: A_i → B`). For `i = 0` the cone is Z-graded and gradings are
/// reported relative to the bottom-most class; for `i ≠ 0` the two maps have
/// different internal degrees, no consistent Z-grading exists, and only the
/// U-module piece lengths are reported (all bottoms 0).
pub fn zero_surgery_homology(
    c: &KnotComplex,
    i: i64,
    delta: Option<u32>,
) -> Result<SurgeryResult, Error> {
    let ix = c.indexed()?;
    if !ix.has_flip {
        return Err(Error::FlipMissing);
    }
    let delta0 = delta.unwrap_or_else(|| default_delta0(c, 1, truncation_width(c, 1)));
    if i == 0 {
        let build = |d: u32| homology_pieces(&build_zero_cone(c, &ix, 0, d));
        let (raw, delta_used) = stabilize_pieces(build, delta0, delta.is_some())?;
        // Relative grading: anchor the bottom-most class at 0.
        let anchor = raw.iter().map(|p| p.bottom).min().unwrap_or(0);
        let module = GradedModule::from_raw(&raw, Rational::from(-anchor));
        return Ok(SurgeryResult { n: 0, i, module, delta_used, width: 0 });
    }
    // Ungradable case: the δ-truncation carries the true (finite) homology
    // plus one echo copy with the same lengths, so the stabilized multiset
    // is halved.
    let build = |d: u32| -> Vec<RawPiece> {
        ungraded_u_lengths(&build_zero_cone(c, &ix, i, d))
            .into_iter()
            .map(|l| RawPiece { bottom: 0, length: Some(l) })
            .collect()
    };
    let (doubled, delta_used) = stabilize_pieces(build, delta0, delta.is_some())?;
    let mut counts = counted(&doubled);
    if counts.values().any(|&v| v % 2 != 0) {
        return Err(Error::Stabilization { cap: delta_used });
    }
    let mut raw = Vec::new();
    for ((bottom, length), cnt) in counts.iter_mut() {
        for _ in 0..*cnt / 2 {
            raw.push(RawPiece { bottom: *bottom, length: Some(*length) });
        }
    }
    let module = GradedModule::from_raw(&raw, Rational::from(0));
    Ok(SurgeryResult { n: 0, i, module, delta_used, width: 0 })
}

/// The two-handle cobordism map in the Spin^c structure labelled by `s`:
/// matrix of the map `H(B_s^δ) → H(X_i^δ(n))` induced by including the `B_s`
/// summand into the cone, in the homology bases.
pub struct CobordismMap {
    pub n: i64,
    pub s: i64,
    pub i: i64,
    pub delta: u32,
    pub width: i64,
    /// column k lists the target classes hit by source class k
    pub matrix: Vec<Vec<usize>>,
    pub source_gradings: Vec<i64>,
    pub target_gradings: Vec<i64>,
}

pub fn cobordism_map(
    c: &KnotComplex,
    n: i64,
    s: i64,
    delta: Option<u32>,
    width: Option<i64>,
) -> Result<CobordismMap, Error> {
    if n == 0 {
        return Err(Error::ZeroSurgeryCoefficient);
    }
    let ix = c.indexed()?;
    if !ix.has_flip {
        return Err(Error::FlipMissing);
    }
    let b = width.unwrap_or_else(|| truncation_width(c, n));
    let (lo, hi) = ((-b + n).min(b), b);
    if s < lo || s > hi {
        return Err(Error::OutsideWindow { s, lo, hi });
    }
    let i = s.rem_euclid(n.abs());
    let delta = delta.unwrap_or_else(|| default_delta0(c, n, b));
    let cone = build_cone(c, &ix, n, i, delta, b)?;
    let sector = region_b(c, &ix, delta, b_shift(n, s));
    let &(_, off, _) = cone
        .b_layout
        .iter()
        .find(|&&(t, _, _)| t == s)
        .expect("s is in the window");
    let inclusion = ChainMap {
        degree: 0,
        map: SparseMap {
            cols: (0..sector.dim()).map(|k| vec![(off + k) as u32]).collect(),
        },
    };
    let hb = Homology::compute(&sector.complex);
    let hx = Homology::compute(&cone.complex);
    let matrix = hb.induced_map(&hx, &inclusion);
    Ok(CobordismMap {
        n,
        s,
        i,
        delta,
        width: b,
        matrix,
        source_gradings: (0..hb.rank()).map(|k| hb.class_grading(k)).collect(),
        target_gradings: (0..hx.rank()).map(|k| hx.class_grading(k)).collect(),
    })
}

/// HF⁺ of the large-`n` surgery in the class of `s`: the stabilized homology
/// of the single sector `A_s` (relative gradings, shift 0).
pub fn large_surgery_homology(
    c: &KnotComplex,
    s: i64,
    delta: Option<u32>,
) -> Result<(Vec<RawPiece>, u32), Error> {
    let ix = c.indexed()?;
    if !ix.has_flip {
        return Err(Error::FlipMissing);
    }
    let delta0 = delta.unwrap_or_else(|| default_delta0(c, 1, truncation_width(c, 1)));
    let build = |d: u32| homology_pieces(&region_a(c, &ix, s, d, 0).complex);
    stabilize_pieces(build, delta0, delta.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knotcx::{builtin_borromean, builtin_t34, builtin_unknot};

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn width_formula() {
        assert_eq!(truncation_width(&builtin_unknot(), 5), 6);
        assert_eq!(truncation_width(&builtin_t34(), 1), 4);
        assert_eq!(truncation_width(&builtin_borromean(2), 1), 3);
    }

    #[test]
    fn shift_examples() {
        assert_eq!(b_shift(2, 0), -1);
        assert_eq!(a_shift(2, 0), 0);
        assert_eq!(b_shift(2, 3), 1);
        assert_eq!(b_shift(1, -1), 1);
    }

    #[test]
    fn shift_recursion_makes_h_homogeneous() {
        for n in [-4i64, -2, -1, 1, 2, 3, 5] {
            for s in -9..=9 {
                assert_eq!(b_shift(n, s + n), b_shift(n, s) + 2 * s, "n={n}, s={s}");
            }
        }
    }

    #[test]
    fn cone_is_a_complex_with_degree_minus_one_differential() {
        let c = builtin_t34();
        let ix = c.indexed().unwrap();
        for n in [1i64, -1, 2, -3] {
            let cone = build_cone(&c, &ix, n, 0, 4, truncation_width(&c, n)).unwrap();
            cone.complex.check().unwrap();
        }
    }

    #[test]
    fn unknot_small_cones_are_single_towers_at_zero() {
        let c = builtin_unknot();
        let ix = c.indexed().unwrap();
        for n in [1i64, -1] {
            let cone = build_cone(&c, &ix, n, 0, 2, 2).unwrap();
            cone.complex.check().unwrap();
            let pieces = homology_pieces(&cone.complex);
            assert_eq!(pieces.len(), 1, "n={n}: {pieces:?}");
            assert_eq!(pieces[0].bottom, 0, "n={n}");
        }
    }

    #[test]
    fn t34_plus_one_surgery() {
        let res = surgery_homology(&builtin_t34(), 1, 0, None, None).unwrap();
        assert_eq!(res.module.towers(), vec![r(-2, 1)]);
        assert_eq!(
            res.module.reduced(),
            vec![(r(-2, 1), 1), (r(-2, 1), 1), (r(0, 1), 1), (r(0, 1), 1)]
        );
    }

    #[test]
    fn t34_minus_one_surgery() {
        let res = surgery_homology(&builtin_t34(), -1, 0, None, None).unwrap();
        assert_eq!(res.module.towers(), vec![r(0, 1)]);
        assert_eq!(
            res.module.reduced(),
            vec![(r(-7, 1), 1), (r(-7, 1), 1), (r(-3, 1), 1), (r(-3, 1), 1), (r(-1, 1), 1)]
        );
    }

    #[test]
    fn unknot_zero_surgery() {
        let res = zero_surgery_homology(&builtin_unknot(), 0, None).unwrap();
        assert_eq!(res.module.towers(), vec![r(0, 1), r(1, 1)]);
        assert!(res.module.reduced().is_empty());
        for i in [1i64, -1, 2] {
            let res = zero_surgery_homology(&builtin_unknot(), i, None).unwrap();
            assert!(res.module.pieces.is_empty(), "i={i}");
        }
    }

    #[test]
    fn t34_zero_surgery_vanishes_past_the_genus() {
        let res = zero_surgery_homology(&builtin_t34(), 3, None).unwrap();
        assert!(res.module.pieces.is_empty());
    }

    #[test]
    fn cobordism_outside_window_rejected() {
        let c = builtin_unknot();
        let b = truncation_width(&c, 2);
        assert!(matches!(
            cobordism_map(&c, 2, b + 1, Some(2), None),
            Err(Error::OutsideWindow { .. })
        ));
    }

    #[test]
    fn unknot_cobordism_sign_of_surgery() {
        // Positive surgery on the unknot: every B_0 cycle bounds in the cone
        // (the whole tower is the image of HF∞, killed when b₂⁺ > 0), so the
        // two-handle map vanishes.  Negative surgery is negative definite and
        // the map onto the tower survives.
        let c = builtin_unknot();
        let pos = cobordism_map(&c, 4, 0, Some(3), None).unwrap();
        assert_eq!(pos.matrix.len(), 4);
        assert_eq!(crate::homalg::column_rank(&pos.matrix), 0);
        let neg = cobordism_map(&c, -4, 0, Some(3), None).unwrap();
        assert_eq!(neg.matrix.len(), 4);
        assert!(crate::homalg::column_rank(&neg.matrix) > 0);
    }
}
