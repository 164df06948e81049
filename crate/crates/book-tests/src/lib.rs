//! mdbook cannot resolve crate dependencies in snippets, so the chapters are
//! included here and run by `cargo test --doc`.
use doc_comment::doc_comment;

doc_comment!(include_str!("../../../book/src/index.md"));
doc_comment!(include_str!("../../../book/src/algebra.md"));
doc_comment!(include_str!("../../../book/src/lattice.md"));
doc_comment!(include_str!("../../../book/src/field.md"));
doc_comment!(include_str!("../../../book/src/projectors.md"));
doc_comment!(include_str!("../../../book/src/evolution.md"));
doc_comment!(include_str!("../../../book/src/spectral.md"));
doc_comment!(include_str!("../../../book/src/volkov.md"));
doc_comment!(include_str!("../../../book/src/cli.md"));
