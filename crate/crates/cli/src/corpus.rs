//! Example configs shipped inside the binary.

/// `(name, JSON text)` for every bundled config.
pub const CORPUS: &[(&str, &str)] = &[
    ("cantor", include_str!("../corpus/cantor.json")),
    ("interval", include_str!("../corpus/interval.json")),
    (
        "carpet_affine",
        include_str!("../corpus/carpet_affine.json"),
    ),
    (
        "hausdorff_example",
        include_str!("../corpus/hausdorff_example.json"),
    ),
    (
        "packing_example",
        include_str!("../corpus/packing_example.json"),
    ),
    ("cookie", include_str!("../corpus/cookie.json")),
    ("pictorial_a", include_str!("../corpus/pictorial_a.json")),
    ("pictorial_b", include_str!("../corpus/pictorial_b.json")),
    ("full_square", include_str!("../corpus/full_square.json")),
    ("sample", include_str!("../corpus/sample.json")),
];

pub fn lookup(name: &str) -> Option<&'static str> {
    CORPUS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    CORPUS.iter().map(|(n, _)| *n)
}
