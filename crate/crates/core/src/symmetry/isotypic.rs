//! Isotypic projectors and the block decomposition of an equivariant
//! coupling matrix.

use crate::linalg::{symmetric_eigen, Mat};
use crate::scalar::Scalar;

use super::character::CharacterTable;
use super::group::{ConjugacyClasses, PermGroup};
use super::SymmetryError;

const PROJECTOR_TOL: f64 = 1e-10;
const EIGENVALUE_SPREAD_TOL: f64 = 1e-8;
const INTEGER_TOL: f64 = 1e-6;

/// One isotypic block of the coordinate representation: its projector, the
/// restriction of the coupling matrix, and the resulting shifted gain.
#[derive(Debug, Clone)]
pub struct IsotypicComponent<T> {
    /// Row index of the irreducible character this block is modeled on.
    pub index: usize,
    /// Dimension of the underlying irreducible representation.
    pub irrep_dim: usize,
    pub projector: Mat<T>,
    /// Dimension of the block, `trace(P)` rounded.
    pub dim: usize,
    /// Orthonormal basis of the block, one column per dimension.
    pub basis: Mat<T>,
    /// Eigenvalues of the coupling matrix restricted to the block, ascending.
    pub eigenvalues: Vec<T>,
    /// The single coupling eigenvalue on this block, when the restriction is
    /// scalar to within tolerance.
    pub mu: Option<T>,
    /// Isotypic multiplicity `dim / irrep_dim`, defined alongside `mu`.
    pub multiplicity: Option<usize>,
    /// `a + mu`, the gain that enters the block's characteristic equation.
    pub shifted_gain: Option<T>,
}

impl<T: Scalar> IsotypicComponent<T> {
    pub fn is_scalar_block(&self) -> bool {
        self.mu.is_some()
    }
}

/// Character-theoretic projectors `P_i = (dim_i / |G|) * sum_g chi_i(g) rho(g)`
/// onto the isotypic components of the coordinate representation.
///
/// One projector per table row, zero-trace rows included with `dim` 0.
pub fn isotypic_projectors<T: Scalar>(
    group: &PermGroup,
    classes: &ConjugacyClasses,
    table: &CharacterTable<T>,
) -> Result<Vec<Mat<T>>, SymmetryError> {
    let n = group.degree();
    let order = T::from_usize_lossy(group.order());
    // class index (group order) of each table column
    let table_class: Vec<usize> = table
        .class_reps
        .iter()
        .map(|rep| {
            group
                .element_index(rep)
                .map(|k| classes.class_of[k])
                .ok_or_else(|| SymmetryError::InvalidPermutation {
                    token: rep.cycle_string(),
                    reason: "class representative is not in the group".into(),
                })
        })
        .collect::<Result<_, _>>()?;
    let mut col_of_class = vec![usize::MAX; classes.len()];
    for (col, &cls) in table_class.iter().enumerate() {
        col_of_class[cls] = col;
    }

    let mut projectors = Vec::with_capacity(table.num_irreps());
    for i in 0..table.num_irreps() {
        let mut p = Mat::zeros(n, n);
        for (k, g) in group.elements().iter().enumerate() {
            let chi = table.chars[i][col_of_class[classes.class_of[k]]];
            if chi == T::zero() {
                continue;
            }
            // rho(g)[r, g(r)] = 1
            for r in 0..n {
                p[(r, g.image(r))] = p[(r, g.image(r))] + chi;
            }
        }
        projectors.push(p.scale(T::from_usize_lossy(table.dims[i]) / order));
    }
    validate_projectors(&projectors)?;
    Ok(projectors)
}

fn validate_projectors<T: Scalar>(projectors: &[Mat<T>]) -> Result<(), SymmetryError> {
    let tol = T::from_f64_lossy(PROJECTOR_TOL);
    let n = projectors[0].nrows();
    let mut sum = Mat::zeros(n, n);
    for p in projectors {
        sum = sum.add(p);
        let idem = p.matmul(p).sub(p).max_abs();
        if idem > tol {
            return Err(SymmetryError::ProjectorDefect {
                what: "idempotence".into(),
                defect: format!("{idem}"),
            });
        }
    }
    let complete = sum.sub(&Mat::identity(n)).max_abs();
    if complete > tol {
        return Err(SymmetryError::ProjectorDefect {
            what: "completeness".into(),
            defect: format!("{complete}"),
        });
    }
    for (i, p) in projectors.iter().enumerate() {
        for q in projectors.iter().skip(i + 1) {
            let cross = p.matmul(q).max_abs();
            if cross > tol {
                return Err(SymmetryError::ProjectorDefect {
                    what: "mutual orthogonality".into(),
                    defect: format!("{cross}"),
                });
            }
        }
    }
    Ok(())
}

/// Largest entry of `rho(g) C - C rho(g)` over the group generators.
pub fn equivariance_defect<T: Scalar>(coupling: &Mat<T>, group: &PermGroup) -> T {
    let mut worst = T::zero();
    for g in group.generators() {
        let rho: Mat<T> = g.matrix();
        let defect = rho.matmul(coupling).sub(&coupling.matmul(&rho)).max_abs();
        worst = worst.max(defect);
    }
    worst
}

/// Restricts the coupling matrix to the image of each nonzero projector and
/// diagonalizes it there, producing the per-block gains `a + mu`.
///
/// Blocks whose restriction is not scalar (eigenvalue spread above 1e-8) are
/// returned with the full eigenvalue list and no `mu`; callers decide whether
/// that is an error.
pub fn decompose_coupling<T: Scalar>(
    coupling: &Mat<T>,
    projectors: &[Mat<T>],
    table: &CharacterTable<T>,
    group: &PermGroup,
    self_gain: T,
) -> Result<Vec<IsotypicComponent<T>>, SymmetryError> {
    let tol = T::from_f64_lossy(PROJECTOR_TOL);
    let defect = equivariance_defect(coupling, group);
    if defect > tol {
        return Err(SymmetryError::EquivarianceViolation { defect: format!("{defect}") });
    }

    let n = coupling.nrows();
    let int_tol = T::from_f64_lossy(INTEGER_TOL);
    let mut components = Vec::new();
    for (i, p) in projectors.iter().enumerate() {
        let trace = p.trace();
        let rounded = trace.round();
        if (trace - rounded).abs() > int_tol {
            return Err(SymmetryError::NonIntegerDimension {
                index: i,
                value: format!("{trace}"),
            });
        }
        let dim = rounded.to_usize().unwrap_or(0);
        if dim == 0 {
            components.push(IsotypicComponent {
                index: i,
                irrep_dim: table.dims[i],
                projector: p.clone(),
                dim: 0,
                basis: Mat::zeros(n, 0),
                eigenvalues: Vec::new(),
                mu: None,
                multiplicity: None,
                shifted_gain: None,
            });
            continue;
        }

        // orthonormal basis of the image: eigenvectors of P with eigenvalue 1
        let (pw, pv) = symmetric_eigen(p);
        let half = T::from_f64_lossy(0.5);
        let cols: Vec<usize> = (0..n).filter(|&k| pw[k] > half).collect();
        if cols.len() != dim {
            return Err(SymmetryError::NonIntegerDimension {
                index: i,
                value: format!("projector rank {} vs trace {}", cols.len(), trace),
            });
        }
        let mut basis = Mat::zeros(n, dim);
        for (bc, &k) in cols.iter().enumerate() {
            for r in 0..n {
                basis[(r, bc)] = pv[(r, k)];
            }
        }

        // restriction B = Q^T C Q and its spectrum
        let restricted = basis.transpose().matmul(&coupling.matmul(&basis));
        let (mut eigenvalues, block_vecs) = symmetric_eigen(&restricted);
        let spread = *eigenvalues.last().unwrap() - eigenvalues[0];
        let (mu, multiplicity, shifted_gain, final_basis) =
            if spread.abs() <= T::from_f64_lossy(EIGENVALUE_SPREAD_TOL) {
                let mean = eigenvalues.iter().fold(T::zero(), |s, &x| s + x)
                    / T::from_usize_lossy(dim);
                eigenvalues = vec![mean; dim];
                let m = dim / table.dims[i].max(1);
                if m * table.dims[i] != dim {
                    return Err(SymmetryError::NonIntegerDimension {
                        index: i,
                        value: format!("block dim {dim} not divisible by irrep dim {}", table.dims[i]),
                    });
                }
                (Some(mean), Some(m), Some(self_gain + mean), basis)
            } else {
                // rotate the basis into C-eigenvectors so callers still get
                // eigenpairs for the non-scalar block
                (None, None, None, basis.matmul(&block_vecs))
            };

        components.push(IsotypicComponent {
            index: i,
            irrep_dim: table.dims[i],
            projector: p.clone(),
            dim,
            basis: final_basis,
            eigenvalues,
            mu,
            multiplicity,
            shifted_gain,
        });
    }
    Ok(components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::character::{cube_character_table, CUBE_DEGREE, CUBE_GENERATORS};
    use crate::symmetry::perm::Perm;

    fn cube() -> (PermGroup, ConjugacyClasses, CharacterTable<f64>) {
        let gens = CUBE_GENERATORS
            .iter()
            .map(|t| Perm::parse_cycles(t, CUBE_DEGREE).unwrap())
            .collect();
        let group = PermGroup::generate(gens, CUBE_DEGREE).unwrap();
        let classes = group.conjugacy_classes();
        let table = cube_character_table(&group, &classes).unwrap();
        (group, classes, table)
    }

    pub(crate) fn cube_coupling(c1: f64, c2: f64, c3: f64) -> Mat<f64> {
        let edges = [(1, 2), (1, 3), (1, 5), (2, 4), (2, 6), (3, 4), (3, 7), (4, 8), (5, 6), (5, 7), (6, 8), (7, 8)];
        let faces = [(1, 4), (1, 6), (1, 7), (2, 3), (2, 5), (2, 8), (3, 5), (3, 8), (4, 6), (4, 7), (5, 8), (6, 7)];
        let spaces = [(1, 8), (2, 7), (3, 6), (4, 5)];
        let mut c = Mat::zeros(8, 8);
        for (w, list) in [(c1, &edges[..]), (c2, &faces[..]), (c3, &spaces[..])] {
            for &(i, j) in list {
                c[(i - 1, j - 1)] = w;
                c[(j - 1, i - 1)] = w;
            }
        }
        c
    }

    #[test]
    fn cube_projector_traces() {
        let (group, classes, table) = cube();
        let projectors = isotypic_projectors(&group, &classes, &table).unwrap();
        let traces: Vec<f64> = projectors.iter().map(|p| p.trace().round()).collect();
        assert_eq!(traces, vec![1.0, 1.0, 0.0, 3.0, 3.0]);
    }

    #[test]
    fn trivial_group_single_projector_is_identity() {
        let group = PermGroup::generate(vec![], 4).unwrap();
        let classes = group.conjugacy_classes();
        let table =
            CharacterTable::new(&group, &classes, vec![Perm::identity(4)], vec![vec![1.0]])
                .unwrap();
        let projectors = isotypic_projectors(&group, &classes, &table).unwrap();
        assert_eq!(projectors.len(), 1);
        assert!(projectors[0].sub(&Mat::identity(4)).max_abs() < 1e-15);
    }

    #[test]
    fn z2_swap_gives_symmetric_antisymmetric_projectors() {
        let group = PermGroup::generate(vec![Perm::parse_cycles("(12)", 2).unwrap()], 2).unwrap();
        let classes = group.conjugacy_classes();
        let reps = vec![Perm::identity(2), Perm::parse_cycles("(12)", 2).unwrap()];
        let table =
            CharacterTable::new(&group, &classes, reps, vec![vec![1.0, 1.0], vec![1.0, -1.0]])
                .unwrap();
        let projectors = isotypic_projectors(&group, &classes, &table).unwrap();
        let sym = Mat::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        let anti = Mat::from_rows(&[vec![0.5, -0.5], vec![-0.5, 0.5]]);
        assert!(projectors[0].sub(&sym).max_abs() < 1e-15);
        assert!(projectors[1].sub(&anti).max_abs() < 1e-15);
    }

    #[test]
    fn cube_decomposition_gains() {
        let (group, classes, table) = cube();
        let projectors = isotypic_projectors(&group, &classes, &table).unwrap();
        let coupling = cube_coupling(0.15, 0.05, 0.01);
        let comps = decompose_coupling(&coupling, &projectors, &table, &group, 0.5).unwrap();
        let nonzero: Vec<_> = comps.iter().filter(|c| c.dim > 0).collect();
        assert_eq!(nonzero.len(), 4);
        // gains as a set must be the four cube-example values
        let mut gains: Vec<f64> = nonzero.iter().map(|c| c.shifted_gain.unwrap()).collect();
        gains.sort_by(f64::total_cmp);
        for (g, expect) in gains.iter().zip([0.19, 0.31, 0.59, 1.11]) {
            assert!((g - expect).abs() < 1e-12, "gain {g} vs {expect}");
        }
        for c in &nonzero {
            assert_eq!(c.multiplicity, Some(1));
        }
        // per-block eigenvalues, keyed by character row
        let by_index: std::collections::HashMap<usize, f64> =
            nonzero.iter().map(|c| (c.index, c.mu.unwrap())).collect();
        assert!((by_index[&0] - 0.61).abs() < 1e-12);
        assert!((by_index[&1] + 0.31).abs() < 1e-12);
        // the two three-dimensional blocks carry 0.09 and -0.19; the
        // character-theoretic projectors put +0.09 on the row-3 irreducible
        assert!((by_index[&3] - 0.09).abs() < 1e-12);
        assert!((by_index[&4] + 0.19).abs() < 1e-12);
    }

    #[test]
    fn zero_coupling_gives_zero_mu() {
        let (group, classes, table) = cube();
        let projectors = isotypic_projectors(&group, &classes, &table).unwrap();
        let comps =
            decompose_coupling(&Mat::zeros(8, 8), &projectors, &table, &group, 0.5).unwrap();
        for c in comps.iter().filter(|c| c.dim > 0) {
            assert!((c.mu.unwrap()).abs() < 1e-14);
            assert!((c.shifted_gain.unwrap() - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn scalar_coupling_gives_constant_mu() {
        let (group, classes, table) = cube();
        let projectors = isotypic_projectors(&group, &classes, &table).unwrap();
        let scaled = Mat::identity(8).scale(0.25);
        let comps = decompose_coupling(&scaled, &projectors, &table, &group, 0.5).unwrap();
        for c in comps.iter().filter(|c| c.dim > 0) {
            assert!((c.mu.unwrap() - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn asymmetric_pattern_fails_equivariance() {
        let (group, classes, table) = cube();
        let projectors = isotypic_projectors(&group, &classes, &table).unwrap();
        let mut coupling = cube_coupling(0.15, 0.05, 0.01);
        coupling[(0, 1)] = 0.3;
        coupling[(1, 0)] = 0.3;
        let err =
            decompose_coupling(&coupling, &projectors, &table, &group, 0.5).unwrap_err();
        assert!(matches!(err, SymmetryError::EquivarianceViolation { .. }));
    }

    #[test]
    fn non_scalar_block_reports_eigenvalue_list() {
        // trivial group: a single block carrying all of C's spectrum
        let group = PermGroup::generate(vec![], 3).unwrap();
        let classes = group.conjugacy_classes();
        let table =
            CharacterTable::new(&group, &classes, vec![Perm::identity(3)], vec![vec![1.0]])
                .unwrap();
        let projectors = isotypic_projectors(&group, &classes, &table).unwrap();
        let mut c = Mat::zeros(3, 3);
        c[(0, 0)] = 1.0;
        c[(1, 1)] = 2.0;
        c[(2, 2)] = 3.0;
        let comps = decompose_coupling(&c, &projectors, &table, &group, 0.0).unwrap();
        assert_eq!(comps.len(), 1);
        assert!(comps[0].mu.is_none());
        assert_eq!(comps[0].eigenvalues.len(), 3);
        // eigenpairs still usable: C basis_k = lambda_k basis_k
        for k in 0..3 {
            let v = comps[0].basis.column(k);
            let cv = c.matvec(&v);
            for r in 0..3 {
                assert!((cv[r] - comps[0].eigenvalues[k] * v[r]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn equivariance_defect_zero_for_trivial_group() {
        let group = PermGroup::generate(vec![], 3).unwrap();
        let mut c = Mat::zeros(3, 3);
        c[(0, 2)] = 1.5;
        assert_eq!(equivariance_defect(&c, &group), 0.0);
    }

    #[test]
    fn cube_coupling_commutes_exactly() {
        let (group, _, _) = cube();
        let coupling = cube_coupling(0.15, 0.05, 0.01);
        assert_eq!(equivariance_defect(&coupling, &group), 0.0);
    }

    #[test]
    fn paper_eigenvectors_lie_in_matching_projector_images() {
        let (group, classes, table) = cube();
        let projectors = isotypic_projectors(&group, &classes, &table).unwrap();
        let coupling = cube_coupling(0.15, 0.05, 0.01);
        let comps = decompose_coupling(&coupling, &projectors, &table, &group, 0.5).unwrap();
        let listed: [(f64, Vec<Vec<f64>>); 4] = [
            (0.61, vec![vec![1., 1., 1., 1., 1., 1., 1., 1.]]),
            (-0.31, vec![vec![1., -1., -1., 1., -1., 1., 1., -1.]]),
            (
                -0.19,
                vec![
                    vec![1., -1., -1., 1., 1., -1., -1., 1.],
                    vec![1., 1., -1., -1., -1., -1., 1., 1.],
                    vec![1., -1., 1., -1., -1., 1., -1., 1.],
                ],
            ),
            (
                0.09,
                vec![
                    vec![1., 1., 1., 1., -1., -1., -1., -1.],
                    vec![1., 1., -1., -1., 1., 1., -1., -1.],
                    vec![1., -1., 1., -1., 1., -1., 1., -1.],
                ],
            ),
        ];
        for (mu, vecs) in &listed {
            let comp = comps
                .iter()
                .find(|c| c.mu.map(|m| (m - mu).abs() < 1e-9).unwrap_or(false))
                .expect("eigenvalue present among blocks");
            for v in vecs {
                let pv = comp.projector.matvec(v);
                let defect: f64 =
                    pv.iter().zip(v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(defect < 1e-10, "vector not fixed by projector: {defect}");
                let cv = coupling.matvec(v);
                let eig_defect: f64 =
                    cv.iter().zip(v).map(|(a, b)| (a - mu * b).abs()).fold(0.0, f64::max);
                assert!(eig_defect < 1e-8);
            }
        }
    }
}
