//! Independent expected-value builders used to cross-check the surgery
//! pipeline: the unknot kernel/cokernel formulas, the symmetric-product
//! modules X(g,d), and the circle-bundle answers they assemble into.

use crate::cone::Cone;
use crate::error::Error;
use crate::gradings::{d_lens, Rational};
use crate::homalg::{GradedModule, Piece};

/// The exponent `ε(σ + kn, n)`: `kσ + k(k−1)n/2` for `k ≥ 0` and
/// `(k+1)σ + k(k+1)n/2` for `k < 0`.
pub fn epsilon(s: i64, n: i64) -> i64 {
    debug_assert!(n > 0);
    let sigma = s.rem_euclid(n);
    let k = (s - sigma) / n;
    if k >= 0 {
        k * sigma + n * k * (k - 1) / 2
    } else {
        (k + 1) * sigma + n * k * (k + 1) / 2
    }
}

/// The image of the δ-truncated tower under `ι(ξ) = {U^{ε(σ+kn,n)}·ξ}`,
/// expressed in the cone's global basis: for the unknot, the `A_s` sector is
/// spanned by `[x, i]`, `min(0,s) ≤ i ≤ min(δ, δ+s)`, so the tower element of
/// height `m` contributes coordinate `min(0,s) + m − ε(s,n)` whenever
/// `ε(s,n) ≤ m`. These vectors span `ker D` exactly (checked in acceptance).
pub fn unknot_kernel_basis(n: i64, delta: u32, cone: &Cone) -> Vec<Vec<u32>> {
    debug_assert!(n > 0);
    (0..=delta as i64)
        .map(|m| {
            cone.a_layout
                .iter()
                .filter_map(|&(s, off, _)| {
                    // Sector position of the tower element of height m − ε:
                    // the sector bottom [x, min(0,s)] sits at position 0.
                    let e = epsilon(s, n);
                    if e <= m {
                        Some(off as u32 + (m - e) as u32)
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect()
}

/// Verifies the cokernel description of `X(−n)` for the unknot: the map
/// `π(η_s) = U^{ε(−s, n) + max(s, 0)}·η` onto the truncated tower kills the
/// image of `D_{−n,i}` and is surjective. (The exponent is forced by the
/// cancellation recursion `e(s − n) = e(s) − s` against
/// `v_s = U^{max(0,−s)}`, `h_s = U^{max(0,s)}`; the `max(s, 0)` correction
/// affects only the sectors with `s > 0`.)
pub fn unknot_cokernel_check(n: i64, delta: u32, cone: &Cone) -> bool {
    debug_assert!(n > 0);
    let dim = cone.complex.dim();
    // π as a (δ+1) × dim matrix: B_s sector basis [x, p] at position p maps
    // to tower height p − e(s).
    let mut pi: Vec<Vec<u32>> = vec![Vec::new(); dim];
    for &(s, off, sec_dim) in &cone.b_layout {
        let e = epsilon(-s, n) + s.max(0);
        for p in 0..sec_dim as i64 {
            if p - e >= 0 {
                pi[off + p as usize].push((p - e) as u32);
            }
        }
    }
    let apply_pi = |v: &[u32]| -> Vec<u32> {
        let mut out = Vec::new();
        for &k in v {
            out = crate::homalg::xor(&out, &pi[k as usize]);
        }
        out
    };
    // π ∘ D = 0: every boundary column dies under π.
    for col in &cone.complex.boundary.cols {
        if !apply_pi(col).is_empty() {
            return false;
        }
    }
    // π surjective onto F₂[U]/U^{δ+1}.
    let cols: Vec<Vec<usize>> = (0..dim as u32)
        .map(|k| apply_pi(&[k]).into_iter().map(|x| x as usize).collect())
        .collect();
    crate::homalg::column_rank(&cols) == delta as usize + 1
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: u64 = 1;
    for j in 0..k {
        out = out * (n - j) / (j + 1);
    }
    out
}

/// The module `X(g,d) = ⊕_{i=0}^d Λ^{2g−i}H¹(Σ_g) ⊗ F₂[U]/U^{d−i+1}`, graded
/// so that `Λ^{2g−d}` sits in degree zero, each step up in exterior rank
/// raises the top degree by one, and U lowers degree by two: `binom(2g, i)`
/// pieces of length `d−i+1` with bottom `shift − (d−i)`. Negative `d` gives
/// the zero module.
pub fn x_module(g: u32, d: i64, shift: Rational) -> GradedModule {
    let mut pieces = Vec::new();
    for i in 0..=d.max(-1) {
        let mult = binomial(2 * g as u64, i as u64);
        for _ in 0..mult {
            pieces.push(Piece {
                bottom: shift - Rational::from(d - i),
                length: Some((d - i + 1) as u32),
            });
        }
    }
    pieces.sort();
    GradedModule { pieces }
}

/// The grading shift `c(i,s)` from the general circle-bundle theorem.
pub fn c_shift(n: i64, i: i64, s: i64) -> Result<Rational, Error> {
    let d = d_lens(n, i)?;
    let two_t_sum: i64 = if s >= 0 {
        (0..=s).filter(|t| (t - i).rem_euclid(n) == 0).map(|t| 2 * t).sum()
    } else {
        (s..=0).filter(|t| (t - i).rem_euclid(n) == 0).map(|t| 2 * t).sum()
    };
    Ok(if s >= 0 {
        d - Rational::from(1 + s - two_t_sum)
    } else {
        d - Rational::from(1 - s + two_t_sum)
    })
}

/// Expected `HF⁺_red` of the Euler-number-`n` circle bundle over a genus-`g`
/// surface in the Spin^c class `i`: the sum of `X_{c(i,s)}(g, g−1−|s|)` over
/// `s ≡ i (mod n)`, `s ≠ j`, where `j` is the representative of minimal
/// absolute value. Returns the module and whether the choice of `j` was a
/// tie (broken toward positive `j`).
pub fn expected_circle_bundle(g: u32, n: i64, i: i64) -> Result<(GradedModule, bool), Error> {
    if n <= 0 {
        return Err(Error::Validation("circle-bundle oracle needs n > 0".into()));
    }
    if !(0..n).contains(&i) {
        return Err(Error::SpincOutOfRange { i, n });
    }
    let down = -((-i).rem_euclid(n)); // representative in (−n, 0]
    let up = i.rem_euclid(n); // representative in [0, n)
    let tie = up != 0 && up == -down;
    let j = if up <= -down { up } else { down };

    let mut pieces = Vec::new();
    let gi = g as i64;
    let mut s = -(gi - 1) + (i - (-(gi - 1))).rem_euclid(n);
    while s <= gi - 1 {
        if s != j {
            pieces.extend(x_module(g, gi - 1 - s.abs(), c_shift(n, i, s)?).pieces);
        }
        s += n;
    }
    pieces.sort();
    Ok((GradedModule { pieces }, tie))
}

/// Total rank of `H_*(Sym^d(Σ_g); F₂)`: the coefficient of `x^d` in
/// `(1+x)^{2g}/(1−x)²`, i.e. `Σ_k binom(2g,k)(d−k+1)`.
pub fn sym_product_rank(g: u32, d: i64) -> u64 {
    if d < 0 {
        return 0;
    }
    (0..=d.min(2 * g as i64))
        .map(|k| binomial(2 * g as u64, k as u64) * (d - k + 1).max(0) as u64)
        .sum()
}
