//! Size and health of the corpus produced by the default configuration.

use genfair::generator::{generate_genfair, GenConfig};
use genfair::{Catalog, TemplateSet};

#[test]
fn default_configuration_count() {
    let (corpus, log) =
        generate_genfair(&TemplateSet::builtin(), &Catalog::builtin(), &GenConfig::default()).unwrap();
    assert_eq!(corpus.len(), 47_945);
    assert!(log.warnings.is_empty(), "{:?}", &log.warnings[..log.warnings.len().min(5)]);
}
