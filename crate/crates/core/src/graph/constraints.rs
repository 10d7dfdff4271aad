//! Background knowledge: forbidden direct-cause statements `A -/-> B`.

use crate::error::{Error, Result};

/// A set of ordered pairs `(a, b)` stating that `a` is not a direct
/// cause of `b`, i.e. the arc `a -> b` may never appear. Indirect paths
/// from `a` to `b` and the reverse arc `b -> a` stay allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSet {
    n: usize,
    forbidden: Vec<bool>,
    pairs: Vec<(usize, usize)>,
}

impl ConstraintSet {
    /// An empty constraint set over `n` variables.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            forbidden: vec![false; n * n],
            pairs: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    /// Forbids the arc `a -> b`.
    pub fn forbid(&mut self, a: usize, b: usize) -> Result<()> {
        if a >= self.n || b >= self.n {
            return Err(Error::Structural(format!(
                "constraint ({a}, {b}) out of range for {} variables",
                self.n
            )));
        }
        if a == b {
            return Err(Error::Structural(format!(
                "constraint may not relate variable {a} to itself"
            )));
        }
        if !self.forbidden[a * self.n + b] {
            self.forbidden[a * self.n + b] = true;
            let at = self.pairs.binary_search(&(a, b)).unwrap_or_else(|at| at);
            self.pairs.insert(at, (a, b));
        }
        Ok(())
    }

    #[inline]
    pub fn is_forbidden(&self, a: usize, b: usize) -> bool {
        self.forbidden[a * self.n + b]
    }

    /// Forbidden pairs in ascending order.
    pub fn iter(&self) -> std::slice::Iter<'_, (usize, usize)> {
        self.pairs.iter()
    }

    /// Parses the constraints file format: one `<nameA> -/-> <nameB>` per
    /// line, `#` starts a comment, blank lines ignored. Names must match
    /// entries of `names`.
    pub fn parse(text: &str, names: &[String]) -> Result<Self> {
        let mut set = Self::new(names.len());
        let index_of = |name: &str, line: usize| -> Result<usize> {
            names.iter().position(|n| n == name).ok_or(Error::Parse {
                line,
                message: format!("unknown variable `{name}`"),
            })
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut parts = content.split("-/->");
            let (a, b) = match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => (a.trim(), b.trim()),
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: format!("expected `<nameA> -/-> <nameB>`, got `{content}`"),
                    })
                }
            };
            let ia = index_of(a, line)?;
            let ib = index_of(b, line)?;
            set.forbid(ia, ib).map_err(|_| Error::Parse {
                line,
                message: format!("constraint relates `{a}` to itself"),
            })?;
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parse_with_comments_and_blanks() {
        let text = "# header comment\n\nfatigue -/-> control  # trailing\ncontrol -/-> fatigue\n";
        let set = ConstraintSet::parse(text, &names(&["fatigue", "control"])).unwrap();
        assert_eq!(set.len(), 2);
        assert!(set.is_forbidden(0, 1));
        assert!(set.is_forbidden(1, 0));
    }

    #[test]
    fn parse_unknown_name_cites_line() {
        let text = "\nfatigue -/-> bogus\n";
        let err = ConstraintSet::parse(text, &names(&["fatigue", "control"])).unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("bogus"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_self_constraint() {
        let err = ConstraintSet::parse("a -/-> a", &names(&["a", "b"])).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn parse_rejects_malformed_line() {
        let err = ConstraintSet::parse("a -> b", &names(&["a", "b"])).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn forbid_deduplicates() {
        let mut set = ConstraintSet::new(3);
        set.forbid(0, 1).unwrap();
        set.forbid(0, 1).unwrap();
        assert_eq!(set.len(), 1);
    }
}
