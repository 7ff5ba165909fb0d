//! Abstract syntax for the STRIPS subset of PDDL.

/// A name with its declared type; untyped declarations default to `object`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<TypedName>,
}

/// A possibly lifted atom. In domain bodies an argument is either a
/// variable (kept with its `?` prefix) or a ground object constant; in
/// problem files arguments are always object names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomAst {
    pub pred: String,
    pub args: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaAst {
    pub name: String,
    pub params: Vec<TypedName>,
    pub pre: Vec<AtomAst>,
    pub add: Vec<AtomAst>,
    pub del: Vec<AtomAst>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainAst {
    pub name: String,
    pub requirements: Vec<String>,
    /// Type hierarchy as `(type, parent)` pairs; `object` is the root.
    pub types: Vec<TypedName>,
    pub predicates: Vec<PredicateDecl>,
    pub schemas: Vec<SchemaAst>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemAst {
    pub name: String,
    pub domain: String,
    pub objects: Vec<TypedName>,
    pub init: Vec<AtomAst>,
    pub goal: Vec<AtomAst>,
}
