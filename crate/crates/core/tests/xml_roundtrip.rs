use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vmc_core::testing::{random_geometry, random_point_in_world};
use vmc_core::{export_xml, import_xml, XmlError};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn export_import_is_lossless(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_geometry(&mut rng, 20);
        let text = export_xml(&g);
        let back = import_xml(&text).unwrap();
        prop_assert_eq!(g.store(), back.store());
        prop_assert_eq!(g.world(), back.world());
        prop_assert_eq!(&export_xml(&back), &text);
        for _ in 0..300 {
            let p = random_point_in_world(&mut rng, &g);
            prop_assert_eq!(g.locate(&p), back.locate(&p));
        }
    }

    #[test]
    fn truncated_documents_are_rejected(seed in any::<u64>(), frac in 0.05f64..0.95) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = export_xml(&random_geometry(&mut rng, 8));
        let cut = (text.len() as f64 * frac) as usize;
        prop_assert!(import_xml(&text[..cut]).is_err());
    }
}

#[test]
fn unknown_elements_are_schema_errors() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let text = export_xml(&random_geometry(&mut rng, 5)).replace("<materials>", "<materials><bogus/>");
    assert!(matches!(import_xml(&text), Err(XmlError::Schema(_))));
}

#[test]
fn schema_declares_every_emitted_name() {
    use quick_xml::events::Event;
    let xsd = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../schema/geometry.xsd")).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut text = String::new();
    // keep generating until rotations and carves both occur
    while !(text.contains("<rotation ") && text.contains("<carve ")) {
        text = export_xml(&random_geometry(&mut rng, 20));
    }
    let mut reader = quick_xml::Reader::from_str(&text);
    loop {
        match reader.read_event().unwrap() {
            Event::Start(e) | Event::Empty(e) => {
                let name = String::from_utf8(e.name().as_ref().to_vec()).unwrap();
                assert!(xsd.contains(&format!(r#"xs:element name="{name}""#)), "element {name}");
                for a in e.attributes() {
                    let key = String::from_utf8(a.unwrap().key.as_ref().to_vec()).unwrap();
                    assert!(
                        xsd.contains(&format!(r#"xs:attribute name="{key}""#)),
                        "attribute {key}"
                    );
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
}
