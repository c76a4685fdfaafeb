//! Problem files shipped with the binary.

pub const BUNDLED: [(&str, &str); 6] = [
    ("example1_k1", include_str!("../problems/example1_k1.toml")),
    ("example1_sym", include_str!("../problems/example1_sym.toml")),
    ("example2_alpha1", include_str!("../problems/example2_alpha1.toml")),
    ("example2_alpha2", include_str!("../problems/example2_alpha2.toml")),
    ("example2_alpha3", include_str!("../problems/example2_alpha3.toml")),
    ("example3", include_str!("../problems/example3.toml")),
];

pub fn get(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}
