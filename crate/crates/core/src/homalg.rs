//! Exact linear algebra over F₂ for graded chain complexes with a U-action:
//! homology with representatives, induced maps, mapping cones, and the
//! decomposition of homology into cyclic F₂[U]-pieces.
//!
//! Vectors are sorted index lists; matrices are column-major sparse. All
//! reduction is per-degree block column reduction with combination tracking,
//! so representatives and change-of-basis data come out of the same pass.

use std::collections::{BTreeMap, HashMap};

use crate::gradings::Rational;

/// Sorted-support F₂ vector addition.
pub(crate) fn xor(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Column-major F₂ matrix; `cols[k]` is the sorted support of the image of
/// basis vector `k`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMap {
    pub cols: Vec<Vec<u32>>,
}

impl SparseMap {
    pub fn zero(source_dim: usize) -> Self {
        SparseMap { cols: vec![Vec::new(); source_dim] }
    }

    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        let mut out = Vec::new();
        for &k in v {
            out = xor(&out, &self.cols[k as usize]);
        }
        out
    }

    /// Direct sum: `self` on the first block, `other` on the second.
    pub fn block_diag(&self, other: &SparseMap, target_offset: u32) -> SparseMap {
        let mut cols = self.cols.clone();
        cols.extend(
            other
                .cols
                .iter()
                .map(|c| c.iter().map(|&r| r + target_offset).collect::<Vec<_>>()),
        );
        SparseMap { cols }
    }
}

/// A finite-dimensional graded chain complex over F₂ carrying a degree −2
/// U-action that commutes with the boundary.
#[derive(Clone, Debug)]
pub struct FiniteComplex {
    pub grading: Vec<i64>,
    pub boundary: SparseMap,
    pub u: SparseMap,
}

impl FiniteComplex {
    pub fn dim(&self) -> usize {
        self.grading.len()
    }

    /// Debug check: ∂ is homogeneous of degree −1, U of degree −2, ∂² = 0,
    /// and ∂U = U∂.
    pub fn check(&self) -> Result<(), String> {
        for (k, col) in self.boundary.cols.iter().enumerate() {
            for &r in col {
                if self.grading[r as usize] != self.grading[k] - 1 {
                    return Err(format!("boundary not of degree -1 at column {k}"));
                }
            }
            if !self.boundary.apply(col).is_empty() {
                return Err(format!("boundary squared nonzero at column {k}"));
            }
        }
        for (k, col) in self.u.cols.iter().enumerate() {
            for &r in col {
                if self.grading[r as usize] != self.grading[k] - 2 {
                    return Err(format!("U not of degree -2 at column {k}"));
                }
            }
            let ud = self.u.apply(&self.boundary.cols[k]);
            let du = self.boundary.apply(col);
            if ud != du {
                return Err(format!("U does not commute with the boundary at column {k}"));
            }
        }
        Ok(())
    }
}

/// A chain map of homogeneous degree between two complexes.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub degree: i64,
    pub map: SparseMap,
}

/// Mapping cone of `f: A → B`. The cone grading places `b` in its own grading
/// and shifts `a` by `f.degree + 1`, making the cone differential
/// `∂(a, b) = (∂a, f(a) + ∂b)` homogeneous of degree −1.
pub fn mapping_cone(a: &FiniteComplex, b: &FiniteComplex, f: &ChainMap) -> FiniteComplex {
    assert_eq!(f.map.cols.len(), a.dim());
    let a_dim = a.dim() as u32;
    let mut grading: Vec<i64> = a.grading.iter().map(|&g| g + f.degree + 1).collect();
    grading.extend_from_slice(&b.grading);

    let mut cols = Vec::with_capacity(a.dim() + b.dim());
    for k in 0..a.dim() {
        let into_b: Vec<u32> = f.map.cols[k].iter().map(|&r| r + a_dim).collect();
        cols.push(xor(&a.boundary.cols[k], &into_b));
    }
    for k in 0..b.dim() {
        cols.push(b.boundary.cols[k].iter().map(|&r| r + a_dim).collect());
    }

    FiniteComplex {
        grading,
        boundary: SparseMap { cols },
        u: a.u.block_diag(&b.u, a_dim),
    }
}

/// A chain map is a quasi-isomorphism iff its cone is acyclic.
pub fn is_quasi_iso(a: &FiniteComplex, b: &FiniteComplex, f: &ChainMap) -> bool {
    Homology::compute(&mapping_cone(a, b, f)).rank() == 0
}

struct DegreeData {
    /// echelonized boundaries landing in this degree (local coords, distinct lows)
    image_echelon: Vec<Vec<u32>>,
    /// homology representatives in echelon form (local coords); entry `r`
    /// represents global class `classes[r]`
    h_echelon: Vec<Vec<u32>>,
    classes: Vec<usize>,
}

/// Homology of a [`FiniteComplex`] with enough bookkeeping to express any
/// cycle in the homology basis.
pub struct Homology {
    class_grading: Vec<i64>,
    /// representative chains, global indices
    reps: Vec<Vec<u32>>,
    degrees: BTreeMap<i64, DegreeData>,
    global_to_local: Vec<u32>,
}

impl Homology {
    pub fn compute(cx: &FiniteComplex) -> Homology {
        let mut blocks: BTreeMap<i64, Vec<u32>> = BTreeMap::new();
        for (k, &g) in cx.grading.iter().enumerate() {
            blocks.entry(g).or_default().push(k as u32);
        }
        let mut global_to_local = vec![0u32; cx.dim()];
        for block in blocks.values() {
            for (loc, &g) in block.iter().enumerate() {
                global_to_local[g as usize] = loc as u32;
            }
        }

        // Per source degree: reduce the boundary block, collecting kernel
        // combinations (cycles in degree d) and echelonized nonzero columns
        // (boundaries in degree d−1).
        let mut kernels: BTreeMap<i64, Vec<Vec<u32>>> = BTreeMap::new();
        let mut images: BTreeMap<i64, Vec<Vec<u32>>> = BTreeMap::new();
        for (&d, block) in &blocks {
            let mut pivots: HashMap<u32, usize> = HashMap::new();
            let mut reduced: Vec<Vec<u32>> = Vec::new();
            let mut combs: Vec<Vec<u32>> = Vec::new();
            let mut kernel = Vec::new();
            for (loc, &g) in block.iter().enumerate() {
                let mut col: Vec<u32> = cx.boundary.cols[g as usize]
                    .iter()
                    .map(|&r| global_to_local[r as usize])
                    .collect();
                col.sort_unstable();
                let mut comb = vec![loc as u32];
                while let Some(&low) = col.last() {
                    match pivots.get(&low) {
                        Some(&p) => {
                            col = xor(&col, &reduced[p]);
                            comb = xor(&comb, &combs[p]);
                        }
                        None => break,
                    }
                }
                match col.last() {
                    None => kernel.push(comb),
                    Some(&low) => {
                        pivots.insert(low, reduced.len());
                        reduced.push(col);
                        combs.push(comb);
                    }
                }
            }
            kernels.insert(d, kernel);
            images.insert(d - 1, reduced);
        }

        // Homology per degree: kernel reduced against the incoming boundaries,
        // then self-echelonized; the surviving vectors are the representatives.
        let mut class_grading = Vec::new();
        let mut reps = Vec::new();
        let mut degrees = BTreeMap::new();
        for (&d, block) in blocks.iter().rev() {
            let image_echelon = images.remove(&d).unwrap_or_default();
            let image_pivots: HashMap<u32, usize> = image_echelon
                .iter()
                .enumerate()
                .map(|(p, v)| (*v.last().unwrap(), p))
                .collect();
            let mut h_echelon: Vec<Vec<u32>> = Vec::new();
            let mut h_pivots: HashMap<u32, usize> = HashMap::new();
            let mut classes = Vec::new();
            for mut z in kernels.remove(&d).unwrap_or_default() {
                while let Some(&low) = z.last() {
                    if let Some(&p) = image_pivots.get(&low) {
                        z = xor(&z, &image_echelon[p]);
                    } else if let Some(&p) = h_pivots.get(&low) {
                        z = xor(&z, &h_echelon[p]);
                    } else {
                        break;
                    }
                }
                if !z.is_empty() {
                    h_pivots.insert(*z.last().unwrap(), h_echelon.len());
                    classes.push(class_grading.len());
                    class_grading.push(d);
                    reps.push(z.iter().map(|&loc| block[loc as usize]).collect());
                    h_echelon.push(z);
                }
            }
            degrees.insert(d, DegreeData { image_echelon, h_echelon, classes });
        }

        Homology { class_grading, reps, degrees, global_to_local }
    }

    pub fn rank(&self) -> usize {
        self.class_grading.len()
    }

    pub fn class_grading(&self, class: usize) -> i64 {
        self.class_grading[class]
    }

    pub fn representative(&self, class: usize) -> &[u32] {
        &self.reps[class]
    }

    /// Expresses a cycle (given as a global chain) in the homology basis.
    /// Panics if the chain is not a cycle of homogeneous degree.
    pub fn coords_of_cycle(&self, chain: &[u32], degree: i64) -> Vec<usize> {
        if chain.is_empty() {
            return Vec::new();
        }
        let data = self
            .degrees
            .get(&degree)
            .expect("cycle in a degree with no chains");
        let image_pivots: HashMap<u32, usize> = data
            .image_echelon
            .iter()
            .enumerate()
            .map(|(p, v)| (*v.last().unwrap(), p))
            .collect();
        let h_pivots: HashMap<u32, usize> = data
            .h_echelon
            .iter()
            .enumerate()
            .map(|(p, v)| (*v.last().unwrap(), p))
            .collect();
        let mut z: Vec<u32> = chain
            .iter()
            .map(|&g| self.global_to_local[g as usize])
            .collect();
        z.sort_unstable();
        let mut coords = Vec::new();
        while let Some(&low) = z.last() {
            if let Some(&p) = image_pivots.get(&low) {
                z = xor(&z, &data.image_echelon[p]);
            } else if let Some(&p) = h_pivots.get(&low) {
                coords.push(data.classes[p]);
                z = xor(&z, &data.h_echelon[p]);
            } else {
                panic!("chain is not a cycle");
            }
        }
        coords.sort_unstable();
        coords
    }

    /// Matrix of the map induced on homology by a chain map into `target`'s
    /// complex: column `k` lists the target classes hit by source class `k`.
    pub fn induced_map(&self, target: &Homology, f: &ChainMap) -> Vec<Vec<usize>> {
        (0..self.rank())
            .map(|k| {
                let image = f.map.apply(&self.reps[k]);
                target.coords_of_cycle(&image, self.class_grading[k] + f.degree)
            })
            .collect()
    }
}

/// Rank of a set of F₂ column vectors (entries are coordinate indices).
pub fn column_rank(cols: &[Vec<usize>]) -> usize {
    let mut echelon: Vec<Vec<u32>> = Vec::new();
    let mut pivots: HashMap<u32, usize> = HashMap::new();
    for col in cols {
        let mut v: Vec<u32> = col.iter().map(|&c| c as u32).collect();
        v.sort_unstable();
        while let Some(&low) = v.last() {
            match pivots.get(&low) {
                Some(&p) => v = xor(&v, &echelon[p]),
                None => break,
            }
        }
        if let Some(&low) = v.last() {
            pivots.insert(low, echelon.len());
            echelon.push(v);
        }
    }
    echelon.len()
}

/// Homology of `cx` decomposed into cyclic U-pieces.
pub fn homology_pieces(cx: &FiniteComplex) -> Vec<RawPiece> {
    let h = Homology::compute(cx);
    let u = ChainMap { degree: -2, map: cx.u.clone() };
    let u_h = h.induced_map(&h, &u);
    decompose(&h, &u_h)
}

/// U-piece lengths of the homology of a complex whose boundary need not be
/// grading-homogeneous (used for the ungradable zero-surgery cones): Jordan
/// block sizes of the nilpotent U action, recovered from the ranks of its
/// powers.
pub fn ungraded_u_lengths(cx: &FiniteComplex) -> Vec<u32> {
    // Global column reduction of the boundary, ignoring gradings.
    let mut pivots: HashMap<u32, usize> = HashMap::new();
    let mut image: Vec<Vec<u32>> = Vec::new();
    let mut combs: Vec<Vec<u32>> = Vec::new();
    let mut kernel: Vec<Vec<u32>> = Vec::new();
    for (k, col) in cx.boundary.cols.iter().enumerate() {
        let mut v = col.clone();
        let mut comb = vec![k as u32];
        while let Some(&low) = v.last() {
            match pivots.get(&low) {
                Some(&p) => {
                    v = xor(&v, &image[p]);
                    comb = xor(&comb, &combs[p]);
                }
                None => break,
            }
        }
        match v.last() {
            None => kernel.push(comb),
            Some(&low) => {
                pivots.insert(low, image.len());
                image.push(v);
                combs.push(comb);
            }
        }
    }
    let image_pivots: HashMap<u32, usize> = image
        .iter()
        .enumerate()
        .map(|(p, v)| (*v.last().unwrap(), p))
        .collect();
    // Representatives of homology classes, in echelon form.
    let mut reps: Vec<Vec<u32>> = Vec::new();
    let mut rep_pivots: HashMap<u32, usize> = HashMap::new();
    for mut z in kernel {
        while let Some(&low) = z.last() {
            if let Some(&p) = image_pivots.get(&low) {
                z = xor(&z, &image[p]);
            } else if let Some(&p) = rep_pivots.get(&low) {
                z = xor(&z, &reps[p]);
            } else {
                break;
            }
        }
        if let Some(&low) = z.last() {
            rep_pivots.insert(low, reps.len());
            reps.push(z);
        }
    }
    let coords = |chain: Vec<u32>| -> Vec<usize> {
        let mut z = chain;
        let mut out = Vec::new();
        while let Some(&low) = z.last() {
            if let Some(&p) = image_pivots.get(&low) {
                z = xor(&z, &image[p]);
            } else if let Some(&p) = rep_pivots.get(&low) {
                out.push(p);
                z = xor(&z, &reps[p]);
            } else {
                panic!("chain is not a cycle");
            }
        }
        out.sort_unstable();
        out
    };
    // U on homology, then ranks of its powers give the block sizes:
    // #blocks of length L = r_{L−1} − 2·r_L + r_{L+1}.
    let u_h = SparseMap {
        cols: reps
            .iter()
            .map(|r| coords(cx.u.apply(r)).into_iter().map(|x| x as u32).collect())
            .collect(),
    };
    let mut ranks = vec![reps.len()];
    let mut power: Vec<Vec<u32>> = (0..reps.len() as u32).map(|k| vec![k]).collect();
    loop {
        power = power.iter().map(|col| u_h.apply(col)).collect();
        let cols: Vec<Vec<usize>> = power
            .iter()
            .map(|c| c.iter().map(|&x| x as usize).collect())
            .collect();
        let r = column_rank(&cols);
        ranks.push(r);
        if r == 0 {
            break;
        }
    }
    ranks.push(0);
    let mut lengths = Vec::new();
    for l in 1..ranks.len() - 1 {
        let count = ranks[l - 1] as i64 - 2 * ranks[l] as i64 + ranks[l + 1] as i64;
        for _ in 0..count {
            lengths.push(l as u32);
        }
    }
    lengths.sort_unstable();
    lengths
}

/// A cyclic F₂[U]-summand before grading normalization: the grading of its
/// bottom (U-final) element and its length; `None` length marks a U-tower.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RawPiece {
    pub bottom: i64,
    pub length: Option<u32>,
}

/// Decomposes graded F₂-homology with a nilpotent degree −2 action into
/// cyclic pieces, by the elder rule: walk degrees top-down, push active
/// cyclic generators through U, and on linear dependency kill the youngest.
/// The resulting multiset of (bottom, length) pairs is canonical.
pub fn decompose(hom: &Homology, u_on_h: &[Vec<usize>]) -> Vec<RawPiece> {
    let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for k in 0..hom.rank() {
        by_degree.entry(hom.class_grading(k)).or_default().push(k);
    }
    let mut pieces = Vec::new();
    // The two parities never interact; split so the degree walk can step by 2.
    for parity in [0, 1] {
        let degrees: Vec<i64> = by_degree
            .keys()
            .copied()
            .filter(|d| d.rem_euclid(2) == parity)
            .rev()
            .collect();
        let Some(&top) = degrees.first() else { continue };
        let &bottom_deg = degrees.last().unwrap();

        // Bars in birth order: (top grading, vector in local class coords of
        // the current degree).
        let mut bars: Vec<(i64, Vec<u32>)> = Vec::new();
        let mut d = top;
        while d >= bottom_deg {
            let classes = by_degree.get(&d).map(Vec::as_slice).unwrap_or(&[]);
            let local: HashMap<usize, u32> = classes
                .iter()
                .enumerate()
                .map(|(loc, &c)| (c, loc as u32))
                .collect();
            let upstairs = by_degree.get(&(d + 2)).map(Vec::as_slice).unwrap_or(&[]);

            let mut echelon: Vec<Vec<u32>> = Vec::new();
            let mut pivots: HashMap<u32, usize> = HashMap::new();
            let mut survivors = Vec::new();
            for (born, vec) in bars {
                // Push the bar through U, in the class basis of degree d.
                let mut w = Vec::new();
                for &loc in &vec {
                    for &t in &u_on_h[upstairs[loc as usize]] {
                        w = xor(&w, &[local[&t]]);
                    }
                }
                while let Some(&low) = w.last() {
                    match pivots.get(&low) {
                        Some(&p) => w = xor(&w, &echelon[p]),
                        None => break,
                    }
                }
                match w.last() {
                    None => pieces.push(RawPiece {
                        bottom: d + 2,
                        length: Some(((born - d - 2) / 2 + 1) as u32),
                    }),
                    Some(&low) => {
                        pivots.insert(low, echelon.len());
                        echelon.push(w.clone());
                        survivors.push((born, w));
                    }
                }
            }
            bars = survivors;
            // Classes not reachable from above start new bars.
            for loc in 0..classes.len() as u32 {
                let mut w = vec![loc];
                while let Some(&low) = w.last() {
                    match pivots.get(&low) {
                        Some(&p) => w = xor(&w, &echelon[p]),
                        None => break,
                    }
                }
                if let Some(&low) = w.last() {
                    pivots.insert(low, echelon.len());
                    echelon.push(w.clone());
                    bars.push((d, w));
                }
            }
            d -= 2;
        }
        for (born, _) in bars {
            pieces.push(RawPiece {
                bottom: bottom_deg,
                length: Some(((born - bottom_deg) / 2 + 1) as u32),
            });
        }
    }
    pieces.sort();
    pieces
}

/// A cyclic summand of HF⁺ in absolute gradings: `F₂[U]/U^length` when
/// `length` is finite, a full tower `T⁺ = F₂[U, U⁻¹]/U·F₂[U]` otherwise.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Piece {
    pub bottom: Rational,
    pub length: Option<u32>,
}

/// HF⁺ in one Spin^c structure: a finite multiset of cyclic pieces.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GradedModule {
    pub pieces: Vec<Piece>,
}

impl GradedModule {
    pub fn from_raw(raw: &[RawPiece], offset: Rational) -> GradedModule {
        let mut pieces: Vec<Piece> = raw
            .iter()
            .map(|p| Piece { bottom: Rational::from(p.bottom) + offset, length: p.length })
            .collect();
        pieces.sort();
        GradedModule { pieces }
    }

    pub fn towers(&self) -> Vec<Rational> {
        self.pieces
            .iter()
            .filter(|p| p.length.is_none())
            .map(|p| p.bottom)
            .collect()
    }

    pub fn reduced(&self) -> Vec<(Rational, u32)> {
        self.pieces
            .iter()
            .filter_map(|p| p.length.map(|l| (p.bottom, l)))
            .collect()
    }

    /// Total F₂-dimension of the reduced (finite-length) part.
    pub fn reduced_dim(&self) -> u64 {
        self.pieces.iter().filter_map(|p| p.length).map(u64::from).sum()
    }

    /// The d-invariant: bottom grading of the unique tower, when there is
    /// exactly one.
    pub fn d_invariant(&self) -> Option<Rational> {
        let t = self.towers();
        if t.len() == 1 {
            Some(t[0])
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn complex(grading: Vec<i64>, boundary: Vec<Vec<u32>>, u: Vec<Vec<u32>>) -> FiniteComplex {
        let cx = FiniteComplex {
            grading,
            boundary: SparseMap { cols: boundary },
            u: SparseMap { cols: u },
        };
        cx.check().unwrap();
        cx
    }

    #[test]
    fn xor_merges() {
        assert_eq!(xor(&[1, 3, 5], &[3, 4]), vec![1, 4, 5]);
        assert_eq!(xor(&[], &[2]), vec![2]);
        assert_eq!(xor(&[2], &[2]), Vec::<u32>::new());
    }

    #[test]
    fn acyclic_pair() {
        let cx = complex(vec![1, 0], vec![vec![1], vec![]], vec![vec![], vec![]]);
        assert_eq!(Homology::compute(&cx).rank(), 0);
    }

    #[test]
    fn two_step_u_module() {
        // c0 → c1 under U, no differential: one piece of length 2.
        let cx = complex(vec![2, 0], vec![vec![], vec![]], vec![vec![1], vec![]]);
        let h = Homology::compute(&cx);
        assert_eq!(h.rank(), 2);
        let u = ChainMap { degree: -2, map: cx.u.clone() };
        let u_h = h.induced_map(&h, &u);
        let pieces = decompose(&h, &u_h);
        assert_eq!(pieces, vec![RawPiece { bottom: 0, length: Some(2) }]);
    }

    #[test]
    fn square_complex_homology() {
        // b → a, b → c, plus a disjoint cycle z: H = span(z), plus [a]=[c].
        let cx = complex(
            vec![0, 1, 0, 0],
            vec![vec![], vec![0, 2], vec![], vec![]],
            vec![vec![]; 4],
        );
        let h = Homology::compute(&cx);
        assert_eq!(h.rank(), 2);
        assert_eq!(
            h.coords_of_cycle(&[0], 0),
            h.coords_of_cycle(&[2], 0),
            "boundary-equivalent cycles get the same coordinates"
        );
        assert_ne!(h.coords_of_cycle(&[3], 0), h.coords_of_cycle(&[0], 0));
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let cx = complex(vec![0, 2], vec![vec![], vec![]], vec![vec![], vec![0]]);
        let id = ChainMap {
            degree: 0,
            map: SparseMap { cols: vec![vec![0], vec![1]] },
        };
        assert!(is_quasi_iso(&cx, &cx, &id));
        let zero = ChainMap { degree: 0, map: SparseMap::zero(2) };
        assert!(!is_quasi_iso(&cx, &cx, &zero));
    }

    #[test]
    fn cone_rank_accounts_for_kernel_and_cokernel() {
        // f = U on F₂[U]/U²: kernel and cokernel each of rank 1, so the cone
        // has total rank 2 (long exact sequence bookkeeping).
        let cx = complex(vec![2, 0], vec![vec![], vec![]], vec![vec![1], vec![]]);
        let f = ChainMap { degree: -2, map: cx.u.clone() };
        let h = Homology::compute(&mapping_cone(&cx, &cx, &f));
        assert_eq!(h.rank(), 2);
    }

    /// Builds a complex as cyclic U-pieces plus acyclic boundary pairs, then
    /// scrambles the basis with grading-preserving elementary moves.
    fn scrambled(
        pieces: &[(i64, u32)],
        pairs: &[i64],
        moves: &[(usize, usize)],
    ) -> (FiniteComplex, Vec<RawPiece>) {
        let mut grading = Vec::new();
        let mut u_tgt: Vec<Option<usize>> = Vec::new();
        let mut d_tgt: Vec<Option<usize>> = Vec::new();
        for &(top, len) in pieces {
            for j in 0..len {
                grading.push(top - 2 * j as i64);
                u_tgt.push(if j + 1 < len { Some(grading.len()) } else { None });
                d_tgt.push(None);
            }
        }
        for &g in pairs {
            grading.push(g);
            u_tgt.push(None);
            d_tgt.push(Some(grading.len()));
            grading.push(g - 1);
            u_tgt.push(None);
            d_tgt.push(None);
        }
        let n = grading.len();
        let mut dense_u = vec![vec![false; n]; n];
        let mut dense_d = vec![vec![false; n]; n];
        for k in 0..n {
            if let Some(t) = u_tgt[k] {
                dense_u[t][k] = true;
            }
            if let Some(t) = d_tgt[k] {
                dense_d[t][k] = true;
            }
        }
        // Conjugate by the elementary matrix E: e_j ↦ e_j + e_k (same grading).
        for &(j, k) in moves {
            let (j, k) = (j % n, k % n);
            if j == k || grading[j] != grading[k] {
                continue;
            }
            for m in [&mut dense_u, &mut dense_d] {
                for r in 0..n {
                    m[r][k] ^= m[r][j]; // M ↦ M·E⁻¹ (E is an involution over F₂)
                }
                for c in 0..n {
                    let v = m[k][c];
                    m[j][c] ^= v; // M ↦ E·M
                }
            }
        }
        let to_sparse = |m: &Vec<Vec<bool>>| SparseMap {
            cols: (0..n)
                .map(|c| (0..n as u32).filter(|&r| m[r as usize][c]).collect())
                .collect(),
        };
        let cx = FiniteComplex {
            grading,
            boundary: to_sparse(&dense_d),
            u: to_sparse(&dense_u),
        };
        cx.check().unwrap();
        let mut expected: Vec<RawPiece> = pieces
            .iter()
            .map(|&(top, len)| RawPiece {
                bottom: top - 2 * (len as i64 - 1),
                length: Some(len),
            })
            .collect();
        expected.sort();
        (cx, expected)
    }

    proptest! {
        #[test]
        fn decompose_recovers_cyclic_pieces(
            pieces in prop::collection::vec((-3i64..4, 1u32..4), 1..5),
            pairs in prop::collection::vec(-3i64..4, 0..4),
            moves in prop::collection::vec((0usize..24, 0usize..24), 0..12),
        ) {
            let (cx, expected) = scrambled(&pieces, &pairs, &moves);
            let h = Homology::compute(&cx);
            let total: u32 = pieces.iter().map(|&(_, l)| l).sum();
            prop_assert_eq!(h.rank() as u32, total);
            let u = ChainMap { degree: -2, map: cx.u.clone() };
            let u_h = h.induced_map(&h, &u);
            prop_assert_eq!(decompose(&h, &u_h), expected);
        }
    }
}
