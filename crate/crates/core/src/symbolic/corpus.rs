use super::{Condition, QuasiGraphSpec};

/// A spec with the answers worked out by hand.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub spec: QuasiGraphSpec,
    /// Conditions `validate` must report, as a set.
    pub violations: Vec<Condition>,
    /// `(depth, b_1 of the quotient, tranches)` for valid specs.
    pub counts: Option<(usize, usize, usize)>,
}

const RAW: [(&str, &str); 10] = [
    ("warsaw", include_str!("../../specs/warsaw.json")),
    ("two_chain", include_str!("../../specs/two_chain.json")),
    ("star4", include_str!("../../specs/star4.json")),
    ("spiral", include_str!("../../specs/spiral.json")),
    ("comb", include_str!("../../specs/comb.json")),
    ("partial_overlap", include_str!("../../specs/partial_overlap.json")),
    ("attached_to_later", include_str!("../../specs/attached_to_later.json")),
    ("later_limit", include_str!("../../specs/later_limit.json")),
    ("not_oscillatory", include_str!("../../specs/not_oscillatory.json")),
    ("cyclic", include_str!("../../specs/cyclic.json")),
];

pub fn corpus() -> Vec<CorpusEntry> {
    use Condition::*;
    RAW.iter()
        .map(|&(name, raw)| {
            let (violations, counts) = match name {
                "warsaw" | "star4" | "spiral" => (vec![], Some((1, 1, 1))),
                "two_chain" => (vec![], Some((2, 2, 1))),
                "comb" => (vec![], Some((2, 3, 1))),
                "partial_overlap" => (vec![Containment], None),
                "attached_to_later" => (vec![Endpoints, Attachment, Order], None),
                "later_limit" | "cyclic" => (vec![Order], None),
                "not_oscillatory" => (vec![Oscillation], None),
                _ => unreachable!(),
            };
            let spec = QuasiGraphSpec::from_json(raw).expect("corpus specs parse");
            CorpusEntry { name, spec, violations, counts }
        })
        .collect()
}
