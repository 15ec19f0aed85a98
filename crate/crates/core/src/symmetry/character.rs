//! Character tables, with the octahedral (S4) table bundled for the
//! cube-coupled example.

use crate::scalar::Scalar;

use super::group::{ConjugacyClasses, PermGroup};
use super::perm::Perm;
use super::SymmetryError;

/// Irreducible character table of a finite group, with classes keyed by a
/// representative permutation in the degree-n action.
#[derive(Debug, Clone)]
pub struct CharacterTable<T> {
    pub class_reps: Vec<Perm>,
    pub class_sizes: Vec<usize>,
    /// `chars[i][c]` is the value of the i-th irreducible character on class c.
    pub chars: Vec<Vec<T>>,
    /// Dimensions of the irreducibles, `chars[i][identity class]`.
    pub dims: Vec<usize>,
}

impl<T: Scalar> CharacterTable<T> {
    /// Assembles a table from class representatives and character rows,
    /// taking class sizes from the group's computed classes.
    pub fn new(
        group: &PermGroup,
        classes: &ConjugacyClasses,
        class_reps: Vec<Perm>,
        chars: Vec<Vec<T>>,
    ) -> Result<Self, SymmetryError> {
        if class_reps.len() != classes.len() {
            return Err(SymmetryError::TableShape {
                reason: format!(
                    "table has {} classes but the group has {}",
                    class_reps.len(),
                    classes.len()
                ),
            });
        }
        let mut sizes = Vec::with_capacity(class_reps.len());
        let mut seen = vec![false; classes.len()];
        let mut id_col = None;
        for (c, rep) in class_reps.iter().enumerate() {
            let Some(k) = group.element_index(rep) else {
                return Err(SymmetryError::InvalidPermutation {
                    token: rep.cycle_string(),
                    reason: "class representative is not an element of the group".into(),
                });
            };
            let cls = classes.class_of[k];
            if seen[cls] {
                return Err(SymmetryError::TableShape {
                    reason: format!("two representatives name the class of {rep}"),
                });
            }
            seen[cls] = true;
            sizes.push(classes.sizes[cls]);
            if rep.is_identity() {
                id_col = Some(c);
            }
        }
        let Some(id_col) = id_col else {
            return Err(SymmetryError::TableShape { reason: "no identity class in table".into() });
        };
        for row in &chars {
            if row.len() != class_reps.len() {
                return Err(SymmetryError::TableShape {
                    reason: "character row length does not match class count".into(),
                });
            }
        }
        let dims = chars
            .iter()
            .map(|row| {
                let d = row[id_col];
                let r = d.round();
                if (d - r).abs() > T::from_f64_lossy(1e-6) || r < T::one() {
                    Err(SymmetryError::TableShape {
                        reason: format!("character dimension {d} is not a positive integer"),
                    })
                } else {
                    Ok(r.to_usize().unwrap())
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let table = Self { class_reps, class_sizes: sizes, chars, dims };
        table.check_orthogonality(group.order())?;
        Ok(table)
    }

    /// First-orthogonality check of the rows, to 1e-10.
    fn check_orthogonality(&self, group_order: usize) -> Result<(), SymmetryError> {
        let tol = T::from_f64_lossy(1e-10);
        let order = T::from_usize_lossy(group_order);
        for i in 0..self.chars.len() {
            for k in i..self.chars.len() {
                let mut s = T::zero();
                for c in 0..self.class_reps.len() {
                    s = s
                        + T::from_usize_lossy(self.class_sizes[c])
                            * self.chars[i][c]
                            * self.chars[k][c];
                }
                s = s / order;
                let expect = if i == k { T::one() } else { T::zero() };
                if (s - expect).abs() > tol {
                    return Err(SymmetryError::NonOrthogonalTable {
                        row_a: i,
                        row_b: k,
                        inner_product: format!("{s}"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn num_irreps(&self) -> usize {
        self.chars.len()
    }

    /// Character value of irreducible `i` on the class of a group element.
    pub fn value_on(
        &self,
        irrep: usize,
        element_class: usize,
        class_lookup: &[usize],
    ) -> T {
        self.chars[irrep][class_lookup[element_class]]
    }
}

/// Generators of the rigid-motion group of the cube acting on its 8 vertices,
/// in cycle notation: a face rotation of order 4, a vertex rotation of order 3
/// and an edge rotation of order 2.
pub const CUBE_GENERATORS: [&str; 3] = ["(1243)(5687)", "(283)(167)", "(18)(27)(34)(56)"];

pub const CUBE_DEGREE: usize = 8;

/// Bundled irreducible character table of the octahedral group (as S4),
/// classes keyed by representatives of the vertex action:
/// identity, edge rotation, half-turn face rotation, vertex rotation,
/// quarter-turn face rotation.
pub fn cube_character_table<T: Scalar>(
    group: &PermGroup,
    classes: &ConjugacyClasses,
) -> Result<CharacterTable<T>, SymmetryError> {
    let reps = ["()", "(18)(27)(34)(56)", "(14)(23)(58)(67)", "(283)(167)", "(1243)(5687)"]
        .iter()
        .map(|t| Perm::parse_cycles(t, CUBE_DEGREE))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: [[f64; 5]; 5] = [
        [1.0, 1.0, 1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0, 1.0, -1.0],
        [2.0, 0.0, 2.0, -1.0, 0.0],
        [3.0, -1.0, -1.0, 0.0, 1.0],
        [3.0, 1.0, -1.0, 0.0, -1.0],
    ];
    let chars = rows
        .iter()
        .map(|row| row.iter().map(|&v| T::from_f64_lossy(v)).collect())
        .collect();
    CharacterTable::new(group, classes, reps, chars)
}

/// Orbit-type bookkeeping for the cube example, carried verbatim as report
/// text (these sets are produced by external computer-algebra tooling and are
/// not computed here).
#[derive(Debug, Clone)]
pub struct BundledOrbitData {
    /// `(component index, maximal orbit types, twisted basic degree)`
    pub per_component: Vec<(usize, Vec<String>, String)>,
}

pub fn cube_orbit_data() -> BundledOrbitData {
    let deg0 = "-(Z_2m ^Z_m x ^S4 S4^p)";
    let deg1 = "-(Z_2m ^Z_m x ^S4- S4^p)";
    let deg3 = "(Z_2m ^Z_m x ^D4z D4^p) + (Z_2m ^Z_m x ^D3z D3^p) + (Z_2m ^Z_m x ^D2d D2^p) \
                + (Z_4m ^Z_m x ^Z2- Z4^p) + (Z_6m ^Z_m x Z3^p) - (Z_2m ^Z_m x ^Z2- D2^p) \
                - (Z_2m ^Z_m x ^D1z D1^p)";
    let deg4 = "(Z_2m ^Z_m x ^D4d D4^p) + (Z_2m ^Z_m x ^D3 D3^p) + (Z_2m ^Z_m x ^D2d D2^p) \
                + (Z_4m ^Z_m x ^Z2- Z4^p) + (Z_6m ^Z_m x Z3^p) - (Z_2m ^Z_m x ^Z2- D2^p) \
                - (Z_2m ^Z_m x ^D1 D1^p)";
    BundledOrbitData {
        per_component: vec![
            (0, vec!["(Z_2m ^Z_m x ^S4 S4^p)".into()], deg0.into()),
            (1, vec!["(Z_2m ^Z_m x ^S4- S4^p)".into()], deg1.into()),
            (
                3,
                vec![
                    "(Z_2m ^Z_m x ^D4z D4^p)".into(),
                    "(Z_2m ^Z_m x ^D3z D3^p)".into(),
                    "(Z_2m ^Z_m x ^D2d D2^p)".into(),
                    "(Z_4m ^Z_m x ^Z2- Z4^p)".into(),
                    "(Z_6m ^Z_m x Z3^p)".into(),
                ],
                deg3.into(),
            ),
            (
                4,
                vec![
                    "(Z_2m ^Z_m x ^D4d D4^p)".into(),
                    "(Z_2m ^Z_m x ^D3 D3^p)".into(),
                    "(Z_2m ^Z_m x ^D2d D2^p)".into(),
                    "(Z_4m ^Z_m x ^Z2- Z4^p)".into(),
                    "(Z_6m ^Z_m x Z3^p)".into(),
                ],
                deg4.into(),
            ),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_is_orthonormal_and_sized() {
        let gens = CUBE_GENERATORS
            .iter()
            .map(|t| Perm::parse_cycles(t, CUBE_DEGREE).unwrap())
            .collect();
        let group = PermGroup::generate(gens, CUBE_DEGREE).unwrap();
        let classes = group.conjugacy_classes();
        let table = cube_character_table::<f64>(&group, &classes).unwrap();
        assert_eq!(table.num_irreps(), 5);
        assert_eq!(table.class_sizes, vec![1, 6, 3, 8, 6]);
        assert_eq!(table.dims, vec![1, 1, 2, 3, 3]);
    }

    #[test]
    fn permutation_character_in_table_order() {
        let gens = CUBE_GENERATORS
            .iter()
            .map(|t| Perm::parse_cycles(t, CUBE_DEGREE).unwrap())
            .collect();
        let group = PermGroup::generate(gens, CUBE_DEGREE).unwrap();
        let classes = group.conjugacy_classes();
        let table = cube_character_table::<f64>(&group, &classes).unwrap();
        let chi_v: Vec<usize> =
            table.class_reps.iter().map(|r| r.fixed_points()).collect();
        assert_eq!(chi_v, vec![8, 0, 0, 2, 0]);
    }

    #[test]
    fn non_orthogonal_rows_are_rejected() {
        let group = PermGroup::generate(vec![Perm::parse_cycles("(12)", 2).unwrap()], 2).unwrap();
        let classes = group.conjugacy_classes();
        let reps = vec![Perm::identity(2), Perm::parse_cycles("(12)", 2).unwrap()];
        let rows = vec![vec![1.0, 1.0], vec![1.0, 0.9]];
        let err = CharacterTable::new(&group, &classes, reps, rows).unwrap_err();
        assert!(matches!(err, SymmetryError::NonOrthogonalTable { .. }));
    }
}
