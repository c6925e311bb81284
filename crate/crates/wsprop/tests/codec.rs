mod common;

use common::fixture;
use proptest::prelude::*;
use wsprop::mocks::{self, MockService};
use wsprop::soap::{decode_response, decode_value, encode_envelope, validate_response_type, SoapResponseKind};
use wsprop_core::{generate, lower_operation_input, lower_operation_output, GenContext, NamedIr};

fn message_roots(mock: &MockService) -> Vec<NamedIr> {
    let model = mock.model();
    let mut roots = Vec::new();
    for op in &model.operations {
        roots.extend(lower_operation_input(&model.schema, op).ok());
        roots.extend(lower_operation_output(&model.schema, op).ok());
    }
    roots
}

fn all_roots() -> Vec<NamedIr> {
    let mut mocks = vec![mocks::convert_cooking(), mocks::place_order(), mocks::buggy_delete()];
    mocks.push(MockService::accepting("umlaut", fixture("umlaut.wsdl")).unwrap());
    mocks.push(MockService::accepting("rpc", fixture("rpc.wsdl")).unwrap());
    mocks.iter().flat_map(message_roots).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn encode_then_decode_is_identity(seed in any::<u64>(), size in 1u32..60) {
        for root in all_roots() {
            let value = generate(&root.ir, GenContext::new(seed, size)).unwrap();
            let envelope = encode_envelope(&root, &value).unwrap();
            let SoapResponseKind::Ok { body_element } = decode_response(&envelope) else {
                panic!("{envelope}")
            };
            prop_assert_eq!(decode_value(&root, &body_element).unwrap(), value);
            prop_assert_eq!(validate_response_type(&root, &body_element), Ok(()));
        }
    }

    #[test]
    fn decode_response_is_total(bytes in prop::collection::vec(any::<u8>(), 0..300)) {
        let _ = decode_response(&String::from_utf8_lossy(&bytes));
    }

    #[test]
    fn decode_value_is_total_on_arbitrary_envelopes(body in "[<>/a-z:= \"]{0,60}") {
        let envelope = format!(
            "<s:Envelope xmlns:s=\"http://schemas.xmlsoap.org/soap/envelope/\"><s:Body>{body}</s:Body></s:Envelope>"
        );
        if let SoapResponseKind::Ok { body_element } = decode_response(&envelope) {
            for root in all_roots() {
                let _ = decode_value(&root, &body_element);
            }
        }
    }
}

#[test]
fn deep_nesting_is_malformed_not_a_crash() {
    let depth = 5000;
    let body = format!("{}{}", "<a>".repeat(depth), "</a>".repeat(depth));
    let envelope = format!(
        "<s:Envelope xmlns:s=\"http://schemas.xmlsoap.org/soap/envelope/\"><s:Body>{body}</s:Body></s:Envelope>"
    );
    assert!(matches!(decode_response(&envelope), SoapResponseKind::Malformed { .. }));
}

#[test]
fn deep_nesting_in_a_wsdl_is_malformed() {
    let depth = 100_000;
    let doc = format!("{}{}", "<a>".repeat(depth), "</a>".repeat(depth));
    let mut ep = common::FixtureEndpoint::default();
    assert!(matches!(
        wsprop::wsdl::parse_wsdl(&doc, "x", &mut ep),
        Err(wsprop::WsdlError::MalformedXml(_))
    ));
    assert!(matches!(
        wsprop::wsdl::parse_wsdl(&"<a>".repeat(depth), "x", &mut ep),
        Err(wsprop::WsdlError::MalformedXml(_))
    ));
}
