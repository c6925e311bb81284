//! Core of a WSDL-driven property-based tester for SOAP services.
//!
//! Everything in this crate is pure and allocation-only: the XSD schema
//! model, its lowering into a generator-shaped intermediate representation,
//! random value generation under a size budget, shrinking, and the
//! human-editable generator-spec file format. Parsing of WSDL documents,
//! SOAP encoding and HTTP live in the `wsprop` crate.

#![no_std]
extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod conform;
pub mod generate;
pub mod genspec;
pub mod hooks;
pub mod ir;
pub mod lower;
pub mod qname;
pub mod schema;
pub mod shrink;
pub mod value;

pub use conform::conforms;
pub use generate::{generate, mix_seed, size_for_test, GenContext, GenError};
pub use genspec::{Field, GenExpr, GenSpec, GenSpecError, LoweredOperation, OperationStanza};
pub use hooks::TransformHooks;
pub use ir::{path_id, Bound, NamedIr, Scalar, TypeIr, Wire};
pub use lower::{
    builtin_ir, lower_element, lower_operation_input, lower_operation_output, lower_part, lower_simple_type,
    lower_type, LowerError,
};
pub use qname::{QName, XSD_NS};
pub use schema::{
    Combinator, ComplexTypeDef, ElementDecl, FacetSet, MaxOccurs, OperationDef, SimpleDerivation, SimpleTypeDef,
    SoapStyle, TypeRef, WsdlModel, XsdSchema,
};
pub use shrink::{shrink_candidates, shrink_to_minimum, ShrinkOutcome};
pub use value::Value;
