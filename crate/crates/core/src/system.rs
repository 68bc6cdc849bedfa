//! Content–context systems of dichotomous (0/1) random variables.
//!
//! A system lists its contents (the measured properties), its contexts (the
//! conditions of measurement), and for each context the joint distribution of
//! the variables recorded in it (the bunch). Variables measuring the same
//! content in different contexts form a connection; they carry no joint
//! distribution of their own.
//!
//! Atom indexing convention: a bunch over contents `(a, b, c)` stores its pmf
//! over the 8 outcomes with `a` as the most significant bit, so atom index 5 =
//! `101` means `a = 1, b = 0, c = 1`.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// Tolerance for structural equality checks (pmf normalization, marginal
/// agreement, connection identity).
pub const STRUCTURAL_TOL: f64 = 1e-12;

/// One context: its id, the ordered contents it measures, and the bunch pmf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextSpec {
    pub id: String,
    pub contents: Vec<String>,
    pub pmf: Vec<f64>,
}

impl ContextSpec {
    pub fn new(
        id: impl Into<String>,
        contents: impl IntoIterator<Item = impl Into<String>>,
        pmf: Vec<f64>,
    ) -> Self {
        ContextSpec {
            id: id.into(),
            contents: contents.into_iter().map(Into::into).collect(),
            pmf,
        }
    }
}

/// An immutable system of dichotomous random variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct System {
    pub name: String,
    pub contents: Vec<String>,
    pub contexts: Vec<ContextSpec>,
}

/// A derived view of one connection: the content and, per context measuring
/// it, the probability of recording 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionView {
    pub content: String,
    pub members: Vec<(String, f64)>,
}

/// Machine-readable validation violation codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationCode {
    DuplicateContentId,
    DuplicateContextId,
    EmptyBunch,
    DuplicateInBunch,
    UnknownContent,
    UnusedContent,
    PmfLength,
    NegativeProbability,
    NonFiniteProbability,
    Normalization,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationCode::DuplicateContentId => "DUPLICATE_CONTENT_ID",
            ViolationCode::DuplicateContextId => "DUPLICATE_CONTEXT_ID",
            ViolationCode::EmptyBunch => "EMPTY_BUNCH",
            ViolationCode::DuplicateInBunch => "DUPLICATE_IN_BUNCH",
            ViolationCode::UnknownContent => "UNKNOWN_CONTENT",
            ViolationCode::UnusedContent => "UNUSED_CONTENT",
            ViolationCode::PmfLength => "PMF_LENGTH",
            ViolationCode::NegativeProbability => "NEGATIVE_PROBABILITY",
            ViolationCode::NonFiniteProbability => "NON_FINITE_PROBABILITY",
            ViolationCode::Normalization => "NORMALIZATION",
        };
        f.write_str(s)
    }
}

/// One validation violation: code plus a human-readable location message.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

/// The full list of violations found in a system; empty means valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl System {
    pub fn new(
        name: impl Into<String>,
        contents: impl IntoIterator<Item = impl Into<String>>,
        contexts: Vec<ContextSpec>,
    ) -> Self {
        System {
            name: name.into(),
            contents: contents.into_iter().map(Into::into).collect(),
            contexts,
        }
    }

    /// Number of contents |Q|.
    pub fn num_contents(&self) -> usize {
        self.contents.len()
    }

    /// Number of contexts |C|.
    pub fn num_contexts(&self) -> usize {
        self.contexts.len()
    }

    /// Index of a content in declaration order.
    pub fn content_index(&self, q: &str) -> Option<usize> {
        self.contents.iter().position(|x| x == q)
    }

    /// Index of a context in declaration order.
    pub fn context_index(&self, c: &str) -> Option<usize> {
        self.contexts.iter().position(|x| x.id == c)
    }

    /// Largest bunch size; 0 for a system with no contexts.
    pub fn max_bunch_size(&self) -> usize {
        self.contexts.iter().map(|c| c.contents.len()).max().unwrap_or(0)
    }

    /// True iff content `q` is measured in context `c` (`q ≺ c`).
    pub fn measures(&self, q: &str, c: &str) -> bool {
        self.context_index(c)
            .map(|ci| self.contexts[ci].contents.iter().any(|x| x == q))
            .unwrap_or(false)
    }

    /// Serialize to the system JSON interchange format.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("system serialization cannot fail")
    }

    /// Parse a system from its JSON interchange format. The result is not
    /// validated; call [`validate_system`] before computing with it.
    pub fn from_json(s: &str) -> Result<System> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("system JSON: {e}")))
    }
}

/// Check every structural invariant and report all violations found.
pub fn validate_system(sys: &System) -> ValidationReport {
    let mut v = Vec::new();

    let mut seen = HashSet::new();
    for q in &sys.contents {
        if !seen.insert(q.as_str()) {
            v.push(Violation {
                code: ViolationCode::DuplicateContentId,
                message: format!("content `{q}` declared more than once"),
            });
        }
    }

    let mut seen_ctx = HashSet::new();
    for c in &sys.contexts {
        if !seen_ctx.insert(c.id.as_str()) {
            v.push(Violation {
                code: ViolationCode::DuplicateContextId,
                message: format!("context `{}` declared more than once", c.id),
            });
        }
    }

    let content_set: HashSet<&str> = sys.contents.iter().map(|s| s.as_str()).collect();
    let mut used: HashSet<&str> = HashSet::new();

    for c in &sys.contexts {
        if c.contents.is_empty() {
            v.push(Violation {
                code: ViolationCode::EmptyBunch,
                message: format!("context `{}` measures no contents", c.id),
            });
        }
        let mut in_bunch = HashSet::new();
        for q in &c.contents {
            if !in_bunch.insert(q.as_str()) {
                v.push(Violation {
                    code: ViolationCode::DuplicateInBunch,
                    message: format!("context `{}` lists content `{q}` twice", c.id),
                });
            }
            if !content_set.contains(q.as_str()) {
                v.push(Violation {
                    code: ViolationCode::UnknownContent,
                    message: format!("context `{}` lists unknown content `{q}`", c.id),
                });
            } else {
                used.insert(q.as_str());
            }
        }

        let expected = 1usize.checked_shl(c.contents.len() as u32).unwrap_or(usize::MAX);
        if c.pmf.len() != expected {
            v.push(Violation {
                code: ViolationCode::PmfLength,
                message: format!(
                    "context `{}`: pmf has {} entries, expected {expected}",
                    c.id,
                    c.pmf.len()
                ),
            });
        }
        let mut sum = 0.0;
        let mut finite = true;
        for (i, &p) in c.pmf.iter().enumerate() {
            if !p.is_finite() {
                finite = false;
                v.push(Violation {
                    code: ViolationCode::NonFiniteProbability,
                    message: format!("context `{}`: pmf[{i}] is not finite", c.id),
                });
            } else if p < 0.0 {
                v.push(Violation {
                    code: ViolationCode::NegativeProbability,
                    message: format!("context `{}`: pmf[{i}] = {p} is negative", c.id),
                });
            }
            sum += p;
        }
        if finite && (sum - 1.0).abs() > STRUCTURAL_TOL {
            v.push(Violation {
                code: ViolationCode::Normalization,
                message: format!("context `{}`: pmf sums to {sum}, expected 1", c.id),
            });
        }
    }

    for q in &sys.contents {
        if content_set.contains(q.as_str()) && !used.contains(q.as_str()) {
            v.push(Violation {
                code: ViolationCode::UnusedContent,
                message: format!("content `{q}` appears in no context"),
            });
        }
    }

    ValidationReport { violations: v }
}

/// Validate and wrap the first violation into an error, for operations that
/// require a valid system.
pub fn require_valid(sys: &System) -> Result<()> {
    let report = validate_system(sys);
    match report.violations.first() {
        None => Ok(()),
        Some(first) => Err(Error::InvalidSystem(format!(
            "{first}{}",
            if report.violations.len() > 1 {
                format!(" (+{} more)", report.violations.len() - 1)
            } else {
                String::new()
            }
        ))),
    }
}

fn context<'a>(sys: &'a System, c: &str) -> Result<&'a ContextSpec> {
    sys.contexts
        .iter()
        .find(|x| x.id == c)
        .ok_or_else(|| Error::UnknownContext(c.to_string()))
}

/// Marginal pmf of a context's bunch over an ordered subset of its contents.
///
/// The result is indexed with the first subset content as the most
/// significant bit. Excluded slots are summed out.
pub fn bunch_marginal(sys: &System, c: &str, subset: &[&str]) -> Result<Vec<f64>> {
    let ctx = context(sys, c)?;
    let mut positions = Vec::with_capacity(subset.len());
    let mut seen = HashSet::new();
    for q in subset {
        if !seen.insert(*q) {
            return Err(Error::Domain(format!(
                "marginal subset lists content `{q}` twice"
            )));
        }
        let pos = ctx.contents.iter().position(|x| x == q).ok_or_else(|| {
            Error::ContentNotInContext {
                content: q.to_string(),
                context: c.to_string(),
            }
        })?;
        positions.push(pos);
    }

    let k = ctx.contents.len();
    let s = subset.len();
    let mut out = vec![0.0; 1 << s];
    for (atom, &p) in ctx.pmf.iter().enumerate() {
        let mut sub_atom = 0usize;
        for (j, &pos) in positions.iter().enumerate() {
            let bit = (atom >> (k - 1 - pos)) & 1;
            sub_atom |= bit << (s - 1 - j);
        }
        out[sub_atom] += p;
    }
    Ok(out)
}

/// Pr(R_q^c = 1): the one-variable marginal of content `q` in context `c`.
pub fn variable_prob(sys: &System, q: &str, c: &str) -> Result<f64> {
    let m = bunch_marginal(sys, c, &[q])?;
    Ok(m[1])
}

/// Maximal probability that two dichotomous variables with 1-marginals `p`
/// and `p_other` coincide under any joint distribution: `1 - |p - p'|`.
pub fn max_equality_prob(p: f64, p_other: f64) -> Result<f64> {
    for x in [p, p_other] {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("probability {x} outside [0, 1]")));
        }
    }
    Ok(1.0 - (p - p_other).abs())
}

/// The derived connection view for content `q`: per measuring context, the
/// probability of recording 1, in context declaration order.
pub fn connection_view(sys: &System, q: &str) -> Result<ConnectionView> {
    if sys.content_index(q).is_none() {
        return Err(Error::Domain(format!("unknown content `{q}`")));
    }
    let mut members = Vec::new();
    for c in &sys.contexts {
        if c.contents.iter().any(|x| x == q) {
            members.push((c.id.clone(), variable_prob(sys, q, &c.id)?));
        }
    }
    Ok(ConnectionView {
        content: q.to_string(),
        members,
    })
}

/// True iff within every connection all variables have the same distribution.
pub fn is_consistently_connected(sys: &System) -> bool {
    for q in &sys.contents {
        let mut first: Option<f64> = None;
        for c in &sys.contexts {
            if !c.contents.iter().any(|x| x == q) {
                continue;
            }
            let p = variable_prob(sys, q, &c.id).expect("q is in c");
            match first {
                None => first = Some(p),
                Some(p0) => {
                    if (p - p0).abs() > STRUCTURAL_TOL {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// True iff for every context pair the joint marginals over their shared
/// contents coincide atomwise (shared contents taken in content declaration
/// order on both sides). Vacuously true when no contents are shared.
pub fn is_strongly_consistently_connected(sys: &System) -> bool {
    for i in 0..sys.contexts.len() {
        for j in (i + 1)..sys.contexts.len() {
            let a = &sys.contexts[i];
            let b = &sys.contexts[j];
            let shared: Vec<&str> = sys
                .contents
                .iter()
                .map(|s| s.as_str())
                .filter(|q| {
                    a.contents.iter().any(|x| x == q) && b.contents.iter().any(|x| x == q)
                })
                .collect();
            if shared.is_empty() {
                continue;
            }
            let ma = bunch_marginal(sys, &a.id, &shared).expect("shared contents are in a");
            let mb = bunch_marginal(sys, &b.id, &shared).expect("shared contents are in b");
            if ma
                .iter()
                .zip(&mb)
                .any(|(x, y)| (x - y).abs() > STRUCTURAL_TOL)
            {
                return false;
            }
        }
    }
    true
}

/// All (content, context, context) triples over unordered context pairs that
/// share the content. Ordered by content declaration order, then by the
/// lexicographic order of the context index pair.
pub fn connection_pairs(sys: &System) -> Vec<(String, String, String)> {
    let mut out = Vec::new();
    for q in &sys.contents {
        let holders: Vec<&ContextSpec> = sys
            .contexts
            .iter()
            .filter(|c| c.contents.iter().any(|x| x == q))
            .collect();
        for i in 0..holders.len() {
            for j in (i + 1)..holders.len() {
                out.push((q.clone(), holders[i].id.clone(), holders[j].id.clone()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{make_cyclic, make_hypercyclic, SystemShape};

    fn uniform(k: usize) -> Vec<f64> {
        vec![1.0 / (1 << k) as f64; 1 << k]
    }

    fn r33_uniform() -> System {
        make_hypercyclic(
            SystemShape { order: 3, rank: 3 },
            &[uniform(3), uniform(3), uniform(3)],
        )
        .unwrap()
    }

    #[test]
    fn validate_well_formed_system() {
        let report = validate_system(&r33_uniform());
        assert!(report.is_valid(), "{:?}", report.violations);
    }

    #[test]
    fn validate_reports_normalization() {
        let sys = System::new(
            "bad",
            ["q1"],
            vec![ContextSpec::new("c1", ["q1"], vec![0.5, 0.6])],
        );
        let report = validate_system(&sys);
        assert!(report
            .violations
            .iter()
            .any(|v| v.code == ViolationCode::Normalization));
    }

    #[test]
    fn validate_reports_unknown_content() {
        let sys = System::new(
            "bad",
            ["q1"],
            vec![ContextSpec::new("c1", ["q1", "q9"], vec![0.25; 4])],
        );
        let report = validate_system(&sys);
        assert!(report
            .violations
            .iter()
            .any(|v| v.code == ViolationCode::UnknownContent));
    }

    #[test]
    fn validate_collects_multiple_violations() {
        let sys = System::new(
            "bad",
            ["q1", "q1", "q2"],
            vec![ContextSpec::new("c1", ["q1"], vec![0.7, 0.7])],
        );
        let report = validate_system(&sys);
        let codes: Vec<_> = report.violations.iter().map(|v| v.code).collect();
        assert!(codes.contains(&ViolationCode::DuplicateContentId));
        assert!(codes.contains(&ViolationCode::Normalization));
        assert!(codes.contains(&ViolationCode::UnusedContent));
    }

    #[test]
    fn marginal_of_uniform_bunch() {
        let sys = r33_uniform();
        let m = bunch_marginal(&sys, "c1", &["q1", "q2"]).unwrap();
        assert_eq!(m, vec![0.25, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn marginal_of_parity_bunch_is_uniform() {
        // even-parity atoms 0.25, odd atoms 0: the parity term cancels in
        // any proper-subset marginal
        let pmf: Vec<f64> = (0..8usize)
            .map(|a| if a.count_ones() % 2 == 0 { 0.25 } else { 0.0 })
            .collect();
        let sys = System::new(
            "parity",
            ["q1", "q2", "q3"],
            vec![ContextSpec::new("c1", ["q1", "q2", "q3"], pmf)],
        );
        let m = bunch_marginal(&sys, "c1", &["q1", "q2"]).unwrap();
        for x in m {
            assert!((x - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn marginal_drops_leading_slot() {
        let sys = System::new(
            "corr",
            ["q1", "q2"],
            vec![ContextSpec::new("c1", ["q1", "q2"], vec![0.5, 0.0, 0.0, 0.5])],
        );
        let m = bunch_marginal(&sys, "c1", &["q2"]).unwrap();
        assert_eq!(m, vec![0.5, 0.5]);
    }

    #[test]
    fn marginal_of_full_bunch_is_stored_pmf() {
        let pmf = vec![0.1, 0.2, 0.3, 0.4];
        let sys = System::new(
            "s",
            ["q1", "q2"],
            vec![ContextSpec::new("c1", ["q1", "q2"], pmf.clone())],
        );
        let m = bunch_marginal(&sys, "c1", &["q1", "q2"]).unwrap();
        assert_eq!(m, pmf);
    }

    #[test]
    fn marginal_rejects_foreign_content() {
        let sys = r33_uniform();
        let err = bunch_marginal(&sys, "c1", &["q9"]).unwrap_err();
        assert!(matches!(err, Error::ContentNotInContext { .. }));
    }

    #[test]
    fn variable_prob_cases() {
        let sys = System::new(
            "s",
            ["q1", "q2"],
            vec![
                ContextSpec::new("c1", ["q1", "q2"], vec![0.0, 0.0, 0.0, 1.0]),
                ContextSpec::new("c2", ["q1", "q2"], vec![0.1, 0.2, 0.3, 0.4]),
            ],
        );
        assert_eq!(variable_prob(&sys, "q1", "c1").unwrap(), 1.0);
        assert!((variable_prob(&sys, "q2", "c2").unwrap() - 0.6).abs() < 1e-15);
        let uni = r33_uniform();
        assert!((variable_prob(&uni, "q2", "c1").unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn max_equality_prob_cases() {
        assert_eq!(max_equality_prob(0.5, 0.5).unwrap(), 1.0);
        assert_eq!(max_equality_prob(0.3, 0.8).unwrap(), 0.5);
        assert_eq!(max_equality_prob(0.0, 1.0).unwrap(), 0.0);
        assert!(matches!(
            max_equality_prob(-0.1, 0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn consistent_connectedness() {
        let uni = make_hypercyclic(
            SystemShape { order: 3, rank: 4 },
            &[uniform(3), uniform(3), uniform(3), uniform(3)],
        )
        .unwrap();
        assert!(is_consistently_connected(&uni));

        // rank-2 cyclic with p(q1) = .5 in c1 but .6 in c2
        let sys = make_cyclic(
            2,
            &[
                vec![0.25, 0.25, 0.25, 0.25],
                vec![0.2, 0.2, 0.4, 0.2], // contents (q2, q1): p(q1=1) = .2 + .2 = .4? see below
            ],
        )
        .unwrap();
        // c2 measures (q2, q1); q1 is the low bit: p(q1=1) = pmf[1] + pmf[3] = .4
        assert!(!is_consistently_connected(&sys));
    }

    #[test]
    fn strong_consistency() {
        let sys = r33_uniform();
        assert!(is_strongly_consistently_connected(&sys));

        let two = System::new(
            "s",
            ["q1", "q2"],
            vec![
                ContextSpec::new("c1", ["q1", "q2"], vec![0.5, 0.0, 0.0, 0.5]),
                ContextSpec::new("c2", ["q1", "q2"], vec![0.25, 0.25, 0.25, 0.25]),
            ],
        );
        assert!(!is_strongly_consistently_connected(&two));

        let disjoint = System::new(
            "d",
            ["q1", "q2"],
            vec![
                ContextSpec::new("c1", ["q1"], vec![0.3, 0.7]),
                ContextSpec::new("c2", ["q2"], vec![0.9, 0.1]),
            ],
        );
        assert!(is_strongly_consistently_connected(&disjoint));
    }

    #[test]
    fn connection_pairs_counts() {
        let cyc3 = make_cyclic(3, &[uniform(2), uniform(2), uniform(2)]).unwrap();
        assert_eq!(connection_pairs(&cyc3).len(), 3);

        let h34 = make_hypercyclic(
            SystemShape { order: 3, rank: 4 },
            &[uniform(3), uniform(3), uniform(3), uniform(3)],
        )
        .unwrap();
        assert_eq!(connection_pairs(&h34).len(), 12);

        let single = System::new(
            "one",
            ["q1"],
            vec![ContextSpec::new("c1", ["q1"], vec![0.5, 0.5])],
        );
        assert!(connection_pairs(&single).is_empty());
    }

    #[test]
    fn connection_pairs_order_is_content_then_context() {
        let sys = r33_uniform();
        let pairs = connection_pairs(&sys);
        assert_eq!(pairs.len(), 9);
        assert_eq!(pairs[0], ("q1".into(), "c1".into(), "c2".into()));
        assert_eq!(pairs[1], ("q1".into(), "c1".into(), "c3".into()));
        assert_eq!(pairs[2], ("q1".into(), "c2".into(), "c3".into()));
        assert_eq!(pairs[3].0, "q2");
    }

    #[test]
    fn json_round_trip() {
        let sys = r33_uniform();
        let json = sys.to_json();
        let back = System::from_json(&json).unwrap();
        assert_eq!(sys, back);
    }
}
