//! Knot Floer complexes over F₂: data model, validation, serialization and
//! the built-in complexes used throughout (unknot, T(3,4), staircases,
//! Borromean knots).
//!
//! A complex is presented finitely: each generator `g` sits at filtration
//! `(0, A(g))` at U-power zero, and the full complex is the span over
//! F₂[U, U⁻¹] of the translates `[g, i]` at filtration `(i, i + A(g))`,
//! with internal grading `M(g) + 2i`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDecl {
    pub id: String,
    pub alexander: i64,
    pub maslov: i64,
}

/// One monomial of the differential: `∂(from)` contains `U^{u_power} · to`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DifferentialEntry {
    pub from: String,
    pub to: String,
    pub u_power: u64,
}

/// One monomial of the flip map: `φ(from)` contains `U^{-A(from)} · to`.
/// The U-power is implicit; it is forced by the gradings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlipEntry {
    pub from: String,
    pub to: String,
}

/// Finite presentation of a knot Floer complex CFK∞ over F₂[U].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnotComplex {
    pub name: String,
    pub generators: Vec<GeneratorDecl>,
    pub differential: Vec<DifferentialEntry>,
    #[serde(default)]
    pub flip: Option<Vec<FlipEntry>>,
}

/// Index-based view of a [`KnotComplex`], used by the region builders.
pub struct IndexedComplex {
    /// differential[g] = list of (target, u_power)
    pub diff: Vec<Vec<(usize, u64)>>,
    /// flip[g] = list of targets (U-power is `-A(g)` on each)
    pub flip: Vec<Vec<usize>>,
    pub has_flip: bool,
}

impl KnotComplex {
    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn max_abs_alexander(&self) -> i64 {
        self.generators
            .iter()
            .map(|g| g.alexander.abs())
            .max()
            .unwrap_or(0)
    }

    fn index_map(&self) -> HashMap<&str, usize> {
        self.generators
            .iter()
            .enumerate()
            .map(|(k, g)| (g.id.as_str(), k))
            .collect()
    }

    pub fn indexed(&self) -> Result<IndexedComplex, Error> {
        let index = self.index_map();
        let look = |id: &str| -> Result<usize, Error> {
            index
                .get(id)
                .copied()
                .ok_or_else(|| Error::Validation(format!("unknown generator id '{id}'")))
        };
        let mut diff = vec![Vec::new(); self.generators.len()];
        for e in &self.differential {
            diff[look(&e.from)?].push((look(&e.to)?, e.u_power));
        }
        let mut flip = vec![Vec::new(); self.generators.len()];
        let has_flip = self.flip.is_some();
        if let Some(entries) = &self.flip {
            for e in entries {
                flip[look(&e.from)?].push(look(&e.to)?);
            }
        }
        Ok(IndexedComplex { diff, flip, has_flip })
    }

    /// Runs every structural invariant check and reports all violations.
    ///
    /// The homological part (the flip inducing an isomorphism on truncated
    /// homology) is run last and only when everything structural holds,
    /// since it needs a well-formed complex to build regions from.
    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        self.check_structure(&mut v);
        if v.is_empty() {
            if let Err(msg) = crate::regions::check_flip_quasi_iso(self) {
                v.push(msg);
            }
        }
        ValidationReport { violations: v }
    }

    fn check_structure(&self, v: &mut Vec<String>) {
        let index = self.index_map();
        if index.len() != self.generators.len() {
            v.push("duplicate generator ids".to_string());
            return;
        }
        let gen = |id: &str| index.get(id).map(|&k| &self.generators[k]);

        for e in &self.differential {
            let (from, to) = match (gen(&e.from), gen(&e.to)) {
                (Some(f), Some(t)) => (f, t),
                _ => {
                    v.push(format!(
                        "differential entry {} → {} references an unknown generator",
                        e.from, e.to
                    ));
                    continue;
                }
            };
            let e_pow = e.u_power as i64;
            if to.alexander - e_pow > from.alexander {
                v.push(format!(
                    "filtration violated at {} → U^{}·{}",
                    e.from, e.u_power, e.to
                ));
            }
            if to.maslov - 2 * e_pow != from.maslov - 1 {
                v.push(format!("Maslov drop ≠ 1 at {} → U^{}·{}", e.from, e.u_power, e.to));
            }
        }

        // ∂² = 0 over F₂[U]: count the monomials of ∂²(g) and require even parity.
        if let Ok(ix) = self.indexed() {
            for (g, outs) in ix.diff.iter().enumerate() {
                let mut counts: BTreeMap<(usize, u64), usize> = BTreeMap::new();
                for &(t, e1) in outs {
                    for &(u, e2) in &ix.diff[t] {
                        *counts.entry((u, e1 + e2)).or_insert(0) += 1;
                    }
                }
                if counts.values().any(|&c| c % 2 != 0) {
                    v.push(format!("∂² ≠ 0 at generator {}", self.generators[g].id));
                }
            }

            match &self.flip {
                None => v.push("flip required".to_string()),
                Some(entries) => {
                    for e in entries {
                        let (from, to) = match (gen(&e.from), gen(&e.to)) {
                            (Some(f), Some(t)) => (f, t),
                            _ => {
                                v.push(format!(
                                    "flip entry {} → {} references an unknown generator",
                                    e.from, e.to
                                ));
                                continue;
                            }
                        };
                        if to.alexander != -from.alexander {
                            v.push(format!(
                                "flip must negate the Alexander grading at {} → {}",
                                e.from, e.to
                            ));
                        }
                        if to.maslov != from.maslov - 2 * from.alexander {
                            v.push(format!(
                                "flip grading condition M(to) = M(from) − 2A(from) fails at {} → {}",
                                e.from, e.to
                            ));
                        }
                    }
                    if v.is_empty() {
                        self.check_flip_chain_map(&ix, v);
                    }
                }
            }
        }
    }

    /// φ∘∂ = ∂∘φ over F₂[U, U⁻¹], as a parity check on monomials.
    fn check_flip_chain_map(&self, ix: &IndexedComplex, v: &mut Vec<String>) {
        for g in 0..self.generators.len() {
            let a_g = self.generators[g].alexander;
            let mut counts: BTreeMap<(usize, i64), usize> = BTreeMap::new();
            // φ(∂g): for ∂g ∋ U^e t, add U^e φ(t) = Σ U^{e - A(t)} u.
            for &(t, e) in &ix.diff[g] {
                let a_t = self.generators[t].alexander;
                for &u in &ix.flip[t] {
                    *counts.entry((u, e as i64 - a_t)).or_insert(0) += 1;
                }
            }
            // ∂(φg): for φg ∋ U^{-A(g)} t, add U^{-A(g)} ∂t.
            for &t in &ix.flip[g] {
                for &(u, e) in &ix.diff[t] {
                    *counts.entry((u, e as i64 - a_g)).or_insert(0) += 1;
                }
            }
            if counts.values().any(|&c| c % 2 != 0) {
                v.push(format!(
                    "flip is not a chain map at generator {}",
                    self.generators[g].id
                ));
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Parses the JSON complex format and checks every invariant.
pub fn parse_complex(document: &str) -> Result<KnotComplex, Error> {
    let c: KnotComplex =
        serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    let report = c.validate();
    if report.is_valid() {
        Ok(c)
    } else {
        Err(Error::Validation(report.violations.join("; ")))
    }
}

pub fn serialize_complex(c: &KnotComplex) -> String {
    serde_json::to_string_pretty(c).expect("complex serialization cannot fail")
}

/// The unknot: one generator, no differential, identity flip.
pub fn builtin_unknot() -> KnotComplex {
    KnotComplex {
        name: "unknot".to_string(),
        generators: vec![GeneratorDecl { id: "x".into(), alexander: 0, maslov: 0 }],
        differential: vec![],
        flip: Some(vec![FlipEntry { from: "x".into(), to: "x".into() }]),
    }
}

/// The torus knot T(3,4): five generators, ∂x₂ = U·x₁ + x₃, ∂x₄ = U²·x₃ + x₅.
pub fn builtin_t34() -> KnotComplex {
    builtin_staircase_named(&[1, 2, 2, 1], "t34").expect("T(3,4) staircase is valid")
}

/// Staircase complex of an L-space knot with the given (palindromic) step
/// vector, alternating horizontal/vertical. Steps `(1, 2, 2, 1)` give T(3,4);
/// the empty vector gives the unknot.
pub fn builtin_staircase(steps: &[u64]) -> Result<KnotComplex, Error> {
    builtin_staircase_named(steps, &format!("staircase{steps:?}"))
}

fn builtin_staircase_named(steps: &[u64], name: &str) -> Result<KnotComplex, Error> {
    if steps.is_empty() {
        let mut c = builtin_unknot();
        c.name = name.to_string();
        return Ok(c);
    }
    if steps.iter().rev().ne(steps.iter()) || steps.len() % 2 != 0 || steps.contains(&0) {
        return Err(Error::NonPalindromicSteps);
    }
    let k = steps.len() / 2;
    let count = 2 * k + 1;
    let id = |m: usize| format!("x{m}");

    // Alexander gradings walk down the staircase; Maslov is forced by the
    // differential dropping the grading by exactly one.
    let mut alexander = vec![0i64; count + 1];
    alexander[1] = (steps.iter().sum::<u64>() / 2) as i64;
    for m in 2..=count {
        alexander[m] = alexander[m - 1] - steps[m - 2] as i64;
    }
    let mut maslov = vec![0i64; count + 1];
    for j in 1..=k {
        let h = steps[2 * j - 2] as i64;
        maslov[2 * j] = maslov[2 * j - 1] - 2 * h + 1;
        maslov[2 * j + 1] = maslov[2 * j] - 1;
    }

    let generators = (1..=count)
        .map(|m| GeneratorDecl { id: id(m), alexander: alexander[m], maslov: maslov[m] })
        .collect();
    let mut differential = Vec::new();
    for j in 1..=k {
        differential.push(DifferentialEntry {
            from: id(2 * j),
            to: id(2 * j - 1),
            u_power: steps[2 * j - 2],
        });
        differential.push(DifferentialEntry { from: id(2 * j), to: id(2 * j + 1), u_power: 0 });
    }
    let flip = (1..=count)
        .map(|m| FlipEntry { from: id(m), to: id(count + 1 - m) })
        .collect();

    Ok(KnotComplex {
        name: name.to_string(),
        generators,
        differential,
        flip: Some(flip),
    })
}

/// The genus-g Borromean knot in #^{2g}(S²×S¹): generators are the monomials
/// of Λ*H¹ of a genus-g surface, with A = M = rank − g, zero differential,
/// and the flip sending a monomial to its complement.
pub fn builtin_borromean(g: u32) -> KnotComplex {
    assert!(g >= 1, "borromean genus must be at least 1");
    let n = 2 * g as usize;
    let mut masks: Vec<u32> = (0u32..1 << n).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));

    let id_of = |mask: u32| -> String {
        if mask == 0 {
            "1".to_string()
        } else {
            (0..n)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| format!("e{}", b + 1))
                .collect::<Vec<_>>()
                .join("")
        }
    };

    let full = (1u32 << n) - 1;
    let generators = masks
        .iter()
        .map(|&m| {
            let grade = m.count_ones() as i64 - g as i64;
            GeneratorDecl { id: id_of(m), alexander: grade, maslov: grade }
        })
        .collect();
    let flip = masks
        .iter()
        .map(|&m| FlipEntry { from: id_of(m), to: id_of(full ^ m) })
        .collect();

    KnotComplex {
        name: format!("borromean{g}"),
        generators,
        differential: vec![],
        flip: Some(flip),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknot_is_valid() {
        let c = builtin_unknot();
        assert_eq!(c.generator_count(), 1);
        assert_eq!(c.generators[0].alexander, 0);
        assert_eq!(c.generators[0].maslov, 0);
        assert!(c.validate().is_valid());
    }

    #[test]
    fn t34_matches_the_table() {
        let c = builtin_t34();
        assert!(c.validate().is_valid());
        let a: Vec<i64> = c.generators.iter().map(|g| g.alexander).collect();
        let m: Vec<i64> = c.generators.iter().map(|g| g.maslov).collect();
        assert_eq!(a, vec![3, 2, 0, -2, -3]);
        assert_eq!(m, vec![0, -1, -2, -5, -6]);
        let dx2: Vec<(&str, u64)> = c
            .differential
            .iter()
            .filter(|e| e.from == "x2")
            .map(|e| (e.to.as_str(), e.u_power))
            .collect();
        assert_eq!(dx2, vec![("x1", 1), ("x3", 0)]);
        let dx4: Vec<(&str, u64)> = c
            .differential
            .iter()
            .filter(|e| e.from == "x4")
            .map(|e| (e.to.as_str(), e.u_power))
            .collect();
        assert_eq!(dx4, vec![("x3", 2), ("x5", 0)]);
    }

    #[test]
    fn staircase_1221_is_t34() {
        let s = builtin_staircase(&[1, 2, 2, 1]).unwrap();
        let t = builtin_t34();
        // Same staircase ordering on both sides, so the renaming is positional.
        let shape = |c: &KnotComplex| {
            (
                c.generators.iter().map(|g| (g.alexander, g.maslov)).collect::<Vec<_>>(),
                c.differential
                    .iter()
                    .map(|e| (e.from.clone(), e.to.clone(), e.u_power))
                    .collect::<Vec<_>>(),
            )
        };
        assert_eq!(shape(&s), shape(&t));
        assert!(s.validate().is_valid());
    }

    #[test]
    fn trefoil_staircase() {
        let c = builtin_staircase(&[1, 1]).unwrap();
        assert_eq!(c.generator_count(), 3);
        let a: Vec<i64> = c.generators.iter().map(|g| g.alexander).collect();
        assert_eq!(a, vec![1, 0, -1]);
        assert!(c.validate().is_valid());
    }

    #[test]
    fn empty_staircase_is_unknot() {
        let c = builtin_staircase(&[]).unwrap();
        assert_eq!(c.generator_count(), 1);
        assert!(c.validate().is_valid());
    }

    #[test]
    fn non_palindromic_rejected() {
        assert!(matches!(builtin_staircase(&[1, 2]), Err(Error::NonPalindromicSteps)));
        assert!(matches!(builtin_staircase(&[1, 2, 1]), Err(Error::NonPalindromicSteps)));
    }

    #[test]
    fn borromean_g1() {
        let c = builtin_borromean(1);
        assert_eq!(c.generator_count(), 4);
        let mut am: Vec<(i64, i64)> =
            c.generators.iter().map(|g| (g.alexander, g.maslov)).collect();
        am.sort();
        assert_eq!(am, vec![(-1, -1), (0, 0), (0, 0), (1, 1)]);
        assert!(c.validate().is_valid());
    }

    #[test]
    fn borromean_g2_rank_counts() {
        let c = builtin_borromean(2);
        assert_eq!(c.generator_count(), 16);
        let mut counts = BTreeMap::new();
        for g in &c.generators {
            *counts.entry(g.alexander).or_insert(0) += 1;
        }
        assert_eq!(
            counts.into_iter().collect::<Vec<_>>(),
            vec![(-2, 1), (-1, 4), (0, 6), (1, 4), (2, 1)]
        );
        assert!(c.validate().is_valid());
    }

    #[test]
    fn round_trip() {
        for c in [builtin_unknot(), builtin_t34(), builtin_borromean(2)] {
            let doc = serialize_complex(&c);
            assert_eq!(parse_complex(&doc).unwrap(), c);
        }
    }

    #[test]
    fn bad_maslov_named_in_error() {
        let mut c = builtin_t34();
        c.generators[1].maslov = 0;
        let report = c.validate();
        assert!(report.violations.iter().any(|v| v.contains("Maslov drop")));
    }

    #[test]
    fn spurious_self_differential_fails_maslov_first() {
        let mut c = builtin_unknot();
        c.differential.push(DifferentialEntry { from: "x".into(), to: "x".into(), u_power: 1 });
        let report = c.validate();
        // M − 2 ≠ M − 1, so the Maslov check fires before ∂².
        assert!(report.violations.iter().any(|v| v.contains("Maslov drop")));
    }

    #[test]
    fn missing_flip_reported() {
        let mut c = builtin_unknot();
        c.flip = None;
        let report = c.validate();
        assert!(report.violations.iter().any(|v| v == "flip required"));
    }

    #[test]
    fn unknown_fields_rejected() {
        let doc = r#"{"name":"u","generators":[{"id":"x","alexander":0,"maslov":0}],
                      "differential":[],"flip":[{"from":"x","to":"x"}],"extra":1}"#;
        assert!(matches!(parse_complex(doc), Err(Error::Parse(_))));
    }
}
