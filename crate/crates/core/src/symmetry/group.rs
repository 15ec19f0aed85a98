//! Finite permutation groups: generator closure, conjugacy classes,
//! and the permutation character.

use std::collections::HashMap;

use super::perm::Perm;
use super::SymmetryError;

pub const DEFAULT_ORDER_CAP: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct PermGroup {
    degree: usize,
    elements: Vec<Perm>,
    generators: Vec<Perm>,
    index: HashMap<Perm, usize>,
}

/// Partition of a group into conjugacy classes.
#[derive(Debug, Clone)]
pub struct ConjugacyClasses {
    /// One representative per class (the minimal element of the class).
    pub representatives: Vec<Perm>,
    pub sizes: Vec<usize>,
    /// `class_of[k]` is the class index of the group's k-th element.
    pub class_of: Vec<usize>,
}

impl PermGroup {
    /// Generates the subgroup of `S_degree` spanned by `generators` via
    /// breadth-first closure under right multiplication.
    pub fn generate(generators: Vec<Perm>, degree: usize) -> Result<Self, SymmetryError> {
        Self::generate_capped(generators, degree, DEFAULT_ORDER_CAP)
    }

    pub fn generate_capped(
        generators: Vec<Perm>,
        degree: usize,
        order_cap: usize,
    ) -> Result<Self, SymmetryError> {
        for g in &generators {
            if g.degree() != degree {
                return Err(SymmetryError::InvalidPermutation {
                    token: g.cycle_string(),
                    reason: format!("degree {} does not match group degree {degree}", g.degree()),
                });
            }
        }
        let id = Perm::identity(degree);
        let mut index = HashMap::new();
        let mut elements = vec![id.clone()];
        index.insert(id, 0usize);
        let mut frontier = vec![0usize];
        while let Some(i) = frontier.pop() {
            for g in &generators {
                let p = elements[i].then(g);
                if !index.contains_key(&p) {
                    if elements.len() >= order_cap {
                        return Err(SymmetryError::GroupTooLarge { cap: order_cap });
                    }
                    index.insert(p.clone(), elements.len());
                    frontier.push(elements.len());
                    elements.push(p);
                }
            }
        }
        Ok(Self { degree, elements, generators, index })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.index.contains_key(p)
    }

    pub fn element_index(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Conjugacy classes by brute-force conjugation of every element.
    ///
    /// Classes are ordered by (size, minimal member) so the output is
    /// deterministic regardless of generation order.
    pub fn conjugacy_classes(&self) -> ConjugacyClasses {
        let n = self.elements.len();
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for start in 0..n {
            if class_of[start] != usize::MAX {
                continue;
            }
            let cid = classes.len();
            let mut members = Vec::new();
            for g in &self.elements {
                let conj = g.inverse().then(&self.elements[start]).then(g);
                let k = self.index[&conj];
                if class_of[k] == usize::MAX {
                    class_of[k] = cid;
                    members.push(k);
                }
            }
            classes.push(members);
        }
        // deterministic order: by size, then by minimal element
        let mut reps: Vec<(usize, Perm, Vec<usize>)> = classes
            .into_iter()
            .map(|members| {
                let rep = members.iter().map(|&k| self.elements[k].clone()).min().unwrap();
                (members.len(), rep, members)
            })
            .collect();
        reps.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        let mut class_of_sorted = vec![0usize; n];
        for (new_id, (_, _, members)) in reps.iter().enumerate() {
            for &k in members {
                class_of_sorted[k] = new_id;
            }
        }
        ConjugacyClasses {
            representatives: reps.iter().map(|(_, r, _)| r.clone()).collect(),
            sizes: reps.iter().map(|(s, _, _)| *s).collect(),
            class_of: class_of_sorted,
        }
    }

    /// Character of the coordinate-permutation representation: the number of
    /// fixed points of each class representative.
    pub fn permutation_character(&self, classes: &ConjugacyClasses) -> Vec<usize> {
        classes.representatives.iter().map(|r| r.fixed_points()).collect()
    }
}

impl ConjugacyClasses {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube_group() -> PermGroup {
        let gens = ["(1243)(5687)", "(283)(167)", "(18)(27)(34)(56)"]
            .iter()
            .map(|t| Perm::parse_cycles(t, 8).unwrap())
            .collect();
        PermGroup::generate(gens, 8).unwrap()
    }

    #[test]
    fn cube_group_has_order_24() {
        assert_eq!(cube_group().order(), 24);
    }

    #[test]
    fn empty_generators_give_trivial_group() {
        let g = PermGroup::generate(vec![], 5).unwrap();
        assert_eq!(g.order(), 1);
        assert!(g.elements()[0].is_identity());
    }

    #[test]
    fn single_transposition_gives_z2() {
        let g = PermGroup::generate(vec![Perm::parse_cycles("(12)", 2).unwrap()], 2).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.conjugacy_classes().len(), 2);
    }

    #[test]
    fn trivial_group_has_one_class() {
        let g = PermGroup::generate(vec![], 3).unwrap();
        assert_eq!(g.conjugacy_classes().len(), 1);
    }

    #[test]
    fn cube_group_classes() {
        let g = cube_group();
        let classes = g.conjugacy_classes();
        assert_eq!(classes.len(), 5);
        let mut sizes = classes.sizes.clone();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 3, 6, 6, 8]);
        assert_eq!(classes.sizes.iter().sum::<usize>(), 24);
    }

    #[test]
    fn permutation_character_counts_fixed_points() {
        let g = cube_group();
        let classes = g.conjugacy_classes();
        let chi = g.permutation_character(&classes);
        // identity class fixes everything
        let id_class = classes.representatives.iter().position(|r| r.is_identity()).unwrap();
        assert_eq!(chi[id_class], 8);
        // multiset over all classes per the bundled table
        let mut sorted = chi.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 0, 0, 2, 8]);
    }

    #[test]
    fn full_cycle_has_no_fixed_points() {
        let g = PermGroup::generate(vec![Perm::parse_cycles("(12345)", 5).unwrap()], 5).unwrap();
        let classes = g.conjugacy_classes();
        let chi = g.permutation_character(&classes);
        for (rep, value) in classes.representatives.iter().zip(&chi) {
            if !rep.is_identity() {
                assert_eq!(*value, 0);
            }
        }
    }

    #[test]
    fn order_cap_is_enforced() {
        let gens = vec![
            Perm::parse_cycles("(12)", 6).unwrap(),
            Perm::parse_cycles("(123456)", 6).unwrap(),
        ];
        let err = PermGroup::generate_capped(gens, 6, 100).unwrap_err();
        assert!(matches!(err, SymmetryError::GroupTooLarge { cap: 100 }));
    }
}
