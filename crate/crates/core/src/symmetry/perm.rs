//! Permutations of `{1..n}` with cycle-notation parsing and formatting.

use super::SymmetryError;

/// A permutation of `{1..n}`, stored 0-based as the image vector:
/// `map[i]` is the image of point `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    map: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Self { map: (0..n).collect() }
    }

    /// Builds from a 0-based image vector; must be a bijection.
    pub fn from_images(map: Vec<usize>) -> Result<Self, SymmetryError> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(SymmetryError::InvalidPermutation {
                    token: format!("{map:?}"),
                    reason: "image vector is not a bijection".into(),
                });
            }
            seen[v] = true;
        }
        Ok(Self { map })
    }

    /// Parses disjoint-cycle notation with 1-based points, e.g. `"(1243)(5687)"`.
    ///
    /// `"()"`, `"e"` and `"id"` denote the identity. Points inside a cycle may
    /// be separated by spaces or commas; without separators every digit is one
    /// point (only valid when the degree is at most 9).
    pub fn parse_cycles(token: &str, degree: usize) -> Result<Self, SymmetryError> {
        let bad = |reason: &str| SymmetryError::InvalidPermutation {
            token: token.to_string(),
            reason: reason.to_string(),
        };
        let trimmed = token.trim();
        if trimmed.is_empty() {
            return Err(bad("empty permutation token"));
        }
        if trimmed == "e" || trimmed == "id" || trimmed == "()" {
            return Ok(Self::identity(degree));
        }
        let mut map: Vec<usize> = (0..degree).collect();
        let mut moved = vec![false; degree];
        let mut rest = trimmed;
        while !rest.is_empty() {
            let Some(open) = rest.find('(') else {
                return Err(bad("expected '(' starting a cycle"));
            };
            if !rest[..open].trim().is_empty() {
                return Err(bad("unexpected text between cycles"));
            }
            let Some(close) = rest.find(')') else {
                return Err(bad("unbalanced parenthesis"));
            };
            let inner = &rest[open + 1..close];
            rest = &rest[close + 1..];
            let points: Vec<usize> = if inner.contains(|c: char| c == ',' || c.is_whitespace()) {
                inner
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<usize>().map_err(|_| bad("cycle point is not a number")))
                    .collect::<Result<_, _>>()?
            } else {
                inner
                    .chars()
                    .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| bad("cycle point is not a digit")))
                    .collect::<Result<_, _>>()?
            };
            if points.is_empty() {
                continue;
            }
            for &p in &points {
                if p == 0 || p > degree {
                    return Err(bad(&format!("point {p} outside 1..={degree}")));
                }
                if moved[p - 1] {
                    return Err(bad(&format!("point {p} appears twice")));
                }
                moved[p - 1] = true;
            }
            for (k, &p) in points.iter().enumerate() {
                map[p - 1] = points[(k + 1) % points.len()] - 1;
            }
        }
        Ok(Self { map })
    }

    pub fn degree(&self) -> usize {
        self.map.len()
    }

    /// Image of the 0-based point `i`.
    pub fn image(&self, i: usize) -> usize {
        self.map[i]
    }

    /// Composition "self first, then other".
    pub fn then(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Perm { map: self.map.iter().map(|&i| other.map[i]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Perm { map: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn fixed_points(&self) -> usize {
        self.map.iter().enumerate().filter(|&(i, &v)| i == v).count()
    }

    /// Applies the permutation action to a coordinate vector:
    /// `(sigma . x)[i] = x[sigma(i)]`.
    pub fn act<T: Copy>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.degree(), x.len(), "degree mismatch");
        self.map.iter().map(|&i| x[i]).collect()
    }

    /// The representing matrix of the action above, as row-major 0/1 entries.
    pub fn matrix<T: crate::scalar::Scalar>(&self) -> crate::linalg::Mat<T> {
        let n = self.degree();
        let mut m = crate::linalg::Mat::zeros(n, n);
        for i in 0..n {
            m[(i, self.map[i])] = T::one();
        }
        m
    }

    /// Disjoint-cycle notation, 1-based; identity prints as `"()"`.
    pub fn cycle_string(&self) -> String {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.map[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut cur = self.map[start];
            while cur != start {
                seen[cur] = true;
                cyc.push(cur);
                cur = self.map[cur];
            }
            out.push('(');
            let sep_needed = n > 9;
            for (k, p) in cyc.iter().enumerate() {
                if k > 0 && sep_needed {
                    out.push(' ');
                }
                out.push_str(&(p + 1).to_string());
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

impl std::fmt::Display for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.cycle_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_roundtrip() {
        let p = Perm::parse_cycles("(1243)(5687)", 8).unwrap();
        assert_eq!(p.cycle_string(), "(1243)(5687)");
        assert_eq!(p.image(0), 1); // 1 -> 2
        assert_eq!(p.image(3), 2); // 4 -> 3
        let q = Perm::parse_cycles("(1 2 4 3)(5, 6, 8, 7)", 8).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn identity_forms() {
        for t in ["()", "e", "id"] {
            assert!(Perm::parse_cycles(t, 5).unwrap().is_identity());
        }
    }

    #[test]
    fn rejects_bad_tokens() {
        assert!(Perm::parse_cycles("(19)", 8).is_err());
        assert!(Perm::parse_cycles("(11)", 8).is_err());
        assert!(Perm::parse_cycles("(1 2", 8).is_err());
        assert!(Perm::parse_cycles("(0 1)", 8).is_err());
    }

    #[test]
    fn compose_and_invert() {
        let p = Perm::parse_cycles("(123)", 3).unwrap();
        assert!(p.then(&p).then(&p).is_identity());
        assert!(p.then(&p.inverse()).is_identity());
    }

    #[test]
    fn action_matches_matrix() {
        let p = Perm::parse_cycles("(12)(34)", 4).unwrap();
        let x = vec![1.0, 2.0, 3.0, 4.0];
        let direct = p.act(&x);
        let via_matrix = p.matrix::<f64>().matvec(&x);
        assert_eq!(direct, via_matrix);
        assert_eq!(direct, vec![2.0, 1.0, 4.0, 3.0]);
    }

    #[test]
    fn matrix_is_homomorphism_under_then() {
        let a = Perm::parse_cycles("(1243)(5687)", 8).unwrap();
        let b = Perm::parse_cycles("(283)(167)", 8).unwrap();
        let lhs = a.matrix::<f64>().matmul(&b.matrix::<f64>());
        let rhs = a.then(&b).matrix::<f64>();
        assert_eq!(lhs, rhs);
    }
}
