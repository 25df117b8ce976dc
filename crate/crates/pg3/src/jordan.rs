//! Numerical Jordan analysis of real 4x4 matrices: eigenvalue clustering
//! with tolerance escalation, block structure from ranks of `(A - aI)^k`,
//! and validation via the minimal-polynomial residual.
//!
//! Jordan structure is discontinuous, so a defective eigenvalue of block
//! size `k` is only computable to about `eps^(1/k)`. The ladder below starts
//! at the caller's tolerance and escalates until the inferred structure
//! annihilates the matrix (minimal polynomial residual below `1e-8`), which
//! rejects both over-split and wrongly merged clusterings: cluster means of
//! complete clusters are trace-accurate, so a correct structure leaves a
//! residual near machine precision while a wrong one leaves `eps^(1/k)`.

use nalgebra::Matrix4;
use num_complex::Complex;

use crate::geometry::Mat4;

pub(crate) type CMat4 = Matrix4<Complex<f64>>;

/// One distinct eigenvalue of the analyzed matrix.
#[derive(Clone, Debug)]
pub(crate) struct SpectralItem {
    /// Eigenvalue; `Im >= 0`. Exactly real for real items.
    pub value: Complex<f64>,
    /// Whether this stands for a conjugate pair (consumes twice the blocks' dims).
    pub pair: bool,
    /// Jordan block sizes of `value` over the complex field, descending.
    pub blocks: Vec<usize>,
}

impl SpectralItem {
    pub fn real_dims(&self) -> usize {
        let d: usize = self.blocks.iter().sum();
        if self.pair {
            2 * d
        } else {
            d
        }
    }

    pub fn max_block(&self) -> usize {
        self.blocks[0]
    }

    pub fn semisimple(&self) -> bool {
        self.blocks.iter().all(|&b| b == 1)
    }
}

const RANK_REL_CUTOFF: f64 = 1e-7;
const MIN_POLY_RESIDUAL: f64 = 1e-8;
const EIGVEC_COND_LIMIT: f64 = 1e5;

fn to_complex(a: &Mat4) -> CMat4 {
    a.map(|x| Complex::new(x, 0.0))
}

fn singular_values(c: &CMat4) -> Vec<f64> {
    let mut sv: Vec<f64> = c
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Rank with a relative cutoff plus an absolute floor: directions within
/// the eigenvalue-cluster diameter of the kernel count as kernel, otherwise
/// two eigenvalues merged by fiat would read as a spurious Jordan block.
fn rank_of(c: &CMat4, floor: f64) -> usize {
    let sv = singular_values(c);
    if sv[0] < 1e-11 {
        return 0;
    }
    let cutoff = (RANK_REL_CUTOFF * sv[0]).max(floor);
    sv.iter().filter(|&&s| s > cutoff).count()
}

/// Jordan block sizes of eigenvalue `lambda` with algebraic multiplicity
/// `mult`, from the Weyr sequence `d_k = dim ker (A - lambda I)^k`.
/// `level_abs` is the absolute clustering threshold that produced the
/// cluster. Returns `None` when the numeric ranks are inconsistent with
/// `mult`.
pub(crate) fn block_sizes(
    a: &Mat4,
    lambda: Complex<f64>,
    mult: usize,
    level_abs: f64,
) -> Option<Vec<usize>> {
    // Within-cluster directions sit at most half the clustering threshold
    // from the mean, outside eigenvalues sit beyond it, so the threshold
    // itself separates kernel from non-kernel.
    let shifted = to_complex(a) - CMat4::identity() * lambda;
    let mut d = vec![0usize];
    let mut pow = CMat4::identity();
    for k in 1..=mult {
        pow *= shifted;
        d.push(4 - rank_of(&pow, level_abs.powi(k as i32)));
    }
    if d[mult] != mult {
        return None;
    }
    // counts of blocks of size >= k
    let mut at_least = Vec::new();
    for k in 1..=mult {
        let b = d[k] as isize - d[k - 1] as isize;
        if b < 0 {
            return None;
        }
        at_least.push(b as usize);
    }
    if at_least.windows(2).any(|w| w[1] > w[0]) {
        return None;
    }
    let mut sizes = Vec::new();
    for k in (1..=mult).rev() {
        let next = if k == mult { 0 } else { at_least[k] };
        for _ in 0..(at_least[k - 1] - next) {
            sizes.push(k);
        }
    }
    sizes.sort_unstable_by(|x, y| y.cmp(x));
    if sizes.iter().sum::<usize>() != mult {
        return None;
    }
    Some(sizes)
}

/// Partition the eigenvalue list by single-linkage at absolute threshold.
fn cluster(eigs: &[Complex<f64>; 4], threshold: f64) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..4).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            if (eigs[i] - eigs[j]).norm() <= threshold {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..4 {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Build spectral items from a partition; `None` when the partition is not
/// conjugation-consistent or its Jordan structure does not check out.
fn items_of_partition(
    a: &Mat4,
    eigs: &[Complex<f64>; 4],
    partition: &[Vec<usize>],
    realify: f64,
    level_abs: f64,
) -> Option<Vec<SpectralItem>> {
    #[derive(Clone)]
    struct RawCluster {
        mean: Complex<f64>,
        size: usize,
    }
    let mut raw: Vec<RawCluster> = partition
        .iter()
        .map(|idx| {
            let sum: Complex<f64> = idx.iter().map(|&i| eigs[i]).sum();
            RawCluster {
                mean: sum / idx.len() as f64,
                size: idx.len(),
            }
        })
        .collect();
    // realify near-real means
    for c in raw.iter_mut() {
        if c.mean.im.abs() < realify {
            c.mean = Complex::new(c.mean.re, 0.0);
        }
    }
    let mut items = Vec::new();
    let mut used = vec![false; raw.len()];
    for i in 0..raw.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        if raw[i].mean.im == 0.0 {
            let blocks = block_sizes(a, raw[i].mean, raw[i].size, level_abs)?;
            items.push(SpectralItem {
                value: raw[i].mean,
                pair: false,
                blocks,
            });
        } else {
            // locate the conjugate twin
            let conj = raw[i].mean.conj();
            let twin = (0..raw.len()).find(|&j| {
                !used[j]
                    && raw[j].size == raw[i].size
                    && (raw[j].mean - conj).norm() < realify.max(1e-9)
            })?;
            used[twin] = true;
            let rep = if raw[i].mean.im > 0.0 {
                raw[i].mean
            } else {
                raw[twin].mean
            };
            let value = Complex::new((raw[i].mean.re + raw[twin].mean.re) / 2.0, rep.im.abs());
            let blocks = block_sizes(a, value, raw[i].size, level_abs)?;
            items.push(SpectralItem {
                value,
                pair: true,
                blocks,
            });
        }
    }
    if items.iter().map(|it| it.real_dims()).sum::<usize>() != 4 {
        return None;
    }
    // The minimal-polynomial residual is blind whenever the claimed minimal
    // polynomial has degree 4 (it is then the characteristic polynomial,
    // which annihilates any matrix). The generalized eigenbasis check below
    // covers that blind spot: spuriously split defective eigenvalues yield
    // nearly dependent kernel vectors.
    if !generalized_eigenbasis_well_conditioned(a, &items) {
        return None;
    }
    min_poly_residual(a, &items).and_then(|res| {
        if res < MIN_POLY_RESIDUAL {
            Some(items)
        } else {
            None
        }
    })
}

/// Assemble a basis of the claimed generalized eigenspaces (the smallest
/// right singular vectors of `(A - lambda I)^maxblock`, `mult` of them per
/// eigenvalue) and require it to be well-conditioned. For a correct claim
/// these spaces are genuinely complementary; wrongly split clusters produce
/// overlapping kernels and fail.
fn generalized_eigenbasis_well_conditioned(a: &Mat4, items: &[SpectralItem]) -> bool {
    let ac = to_complex(a);
    let mut columns: Vec<nalgebra::Vector4<Complex<f64>>> = Vec::new();
    for item in items {
        let values: Vec<Complex<f64>> = if item.pair {
            vec![item.value, item.value.conj()]
        } else {
            vec![item.value]
        };
        let mult: usize = item.blocks.iter().sum();
        for lam in values {
            let shifted = ac - CMat4::identity() * lam;
            let mut pow = CMat4::identity();
            for _ in 0..item.max_block() {
                pow *= shifted;
            }
            let svd = pow.svd(false, true);
            let vt = svd.v_t.expect("svd requested v_t");
            let mut idx: Vec<usize> = (0..4).collect();
            idx.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
            for &k in idx.iter().take(mult) {
                columns.push(vt.row(k).transpose().map(|z| z.conj()));
            }
        }
    }
    if columns.len() != 4 {
        return false;
    }
    let v = CMat4::from_columns(&columns);
    let sv = singular_values(&v);
    sv[3] > 0.0 && sv[0] / sv[3] < EIGVEC_COND_LIMIT
}

/// Relative norm of the claimed minimal polynomial evaluated at `a`.
fn min_poly_residual(a: &Mat4, items: &[SpectralItem]) -> Option<f64> {
    let ac = to_complex(a);
    let mut prod = CMat4::identity();
    let mut scale = 1.0f64;
    for item in items {
        let factors: &[Complex<f64>] = if item.pair {
            &[item.value, item.value.conj()]
        } else {
            std::slice::from_ref(&item.value)
        };
        for &lam in factors {
            let shifted = ac - CMat4::identity() * lam;
            let n = shifted.norm().max(1e-3);
            for _ in 0..item.max_block() {
                prod *= shifted;
                scale *= n;
            }
        }
    }
    if !scale.is_finite() {
        return None;
    }
    Some(prod.norm() / scale)
}

/// Cluster-and-structure with tolerance escalation. Returns the accepted
/// items, the level used, and the minimum separation between distinct
/// cluster means (for the caller's ambiguity guard).
/// Eigenvalues with NaN imaginary parts scrubbed: the real Schur form can
/// produce them when a 2x2 block's discriminant rounds barely negative, in
/// which case the stored real part (the block mean) is the right value.
pub(crate) fn robust_eigenvalues(a: &Mat4) -> Option<[Complex<f64>; 4]> {
    let e = a.complex_eigenvalues();
    let mut out = [Complex::new(0.0, 0.0); 4];
    for (slot, z) in out.iter_mut().zip(e.iter()) {
        if !z.re.is_finite() {
            return None;
        }
        *slot = Complex::new(z.re, if z.im.is_finite() { z.im } else { 0.0 });
    }
    Some(out)
}

pub(crate) fn spectral_structure(a: &Mat4, user_tol: f64) -> Option<(Vec<SpectralItem>, f64, f64)> {
    let eigs = robust_eigenvalues(a)?;
    let scale = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-6);
    let mut levels = vec![user_tol, 1e-6, 1e-5, 1e-4, 5e-4, 2e-3, 5e-3, 2e-2];
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels.retain(|&l| l >= user_tol);

    let mut last_partition: Option<Vec<Vec<usize>>> = None;
    for &level in &levels {
        let partition = cluster(&eigs, level * scale);
        if last_partition.as_ref() == Some(&partition) {
            continue;
        }
        last_partition = Some(partition.clone());
        let realify = (level * scale * 0.5).max(1e-12);
        if let Some(items) = items_of_partition(a, &eigs, &partition, realify, level * scale) {
            let mut separation = f64::INFINITY;
            let means: Vec<Complex<f64>> = items
                .iter()
                .flat_map(|it| {
                    if it.pair {
                        vec![it.value, it.value.conj()]
                    } else {
                        vec![it.value]
                    }
                })
                .collect();
            for i in 0..means.len() {
                for j in (i + 1)..means.len() {
                    separation = separation.min((means[i] - means[j]).norm());
                }
            }
            return Some((items, level, separation / scale));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: [[f64; 4]; 4]) -> Mat4 {
        Mat4::from_fn(|i, j| rows[i][j])
    }

    #[test]
    fn diagonal_distinct() {
        let a = mat([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 2.0, 0.0, 0.0],
            [0.0, 0.0, 3.0, 0.0],
            [0.0, 0.0, 0.0, 4.0],
        ]);
        let (items, _, _) = spectral_structure(&a, 1e-7).unwrap();
        assert_eq!(items.len(), 4);
        assert!(items.iter().all(|i| i.blocks == vec![1] && !i.pair));
    }

    #[test]
    fn single_jordan_block_of_size_4() {
        let a = mat([
            [1.0, 1.0, 0.0, 0.0],
            [0.0, 1.0, 1.0, 0.0],
            [0.0, 0.0, 1.0, 1.0],
            [0.0, 0.0, 0.0, 1.0],
        ]);
        let (items, _, _) = spectral_structure(&a, 1e-7).unwrap();
        assert_eq!(items.len(), 1);
        assert_eq!(items[0].blocks, vec![4]);
        assert!((items[0].value - Complex::new(1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn complex_jordan_block() {
        // [[a, 1],[0, a]] over C with a = i
        let a = mat([
            [0.0, -1.0, 1.0, 0.0],
            [1.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]);
        let (items, _, _) = spectral_structure(&a, 1e-7).unwrap();
        assert_eq!(items.len(), 1);
        assert!(items[0].pair);
        assert_eq!(items[0].blocks, vec![2]);
        assert!((items[0].value - Complex::new(0.0, 1.0)).norm() < 1e-7);
    }

    #[test]
    fn semisimple_double_pair() {
        // rotation by 0.3 twice: eigenvalues e^{+-0.3i} each with multiplicity 2
        let c = 0.3f64.cos();
        let s = 0.3f64.sin();
        let a = mat([
            [c, -s, 0.0, 0.0],
            [s, c, 0.0, 0.0],
            [0.0, 0.0, c, -s],
            [0.0, 0.0, s, c],
        ]);
        let (items, _, _) = spectral_structure(&a, 1e-7).unwrap();
        assert_eq!(items.len(), 1);
        assert!(items[0].pair);
        assert_eq!(items[0].blocks, vec![1, 1]);
    }

    #[test]
    fn jordan_detection_survives_conjugation() {
        use crate::sampling::random_conjugator;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;
        let j4 = mat([
            [1.0, 1.0, 0.0, 0.0],
            [0.0, 1.0, 1.0, 0.0],
            [0.0, 0.0, 1.0, 1.0],
            [0.0, 0.0, 0.0, 1.0],
        ]);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let t = random_conjugator(&mut rng, 3.0);
            let a = t * j4 * t.try_inverse().unwrap();
            let (items, _, _) = spectral_structure(&a, 1e-7).unwrap();
            assert_eq!(items.len(), 1, "one eigenvalue expected");
            assert_eq!(items[0].blocks, vec![4]);
        }
    }
}
