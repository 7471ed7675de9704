//! JSON encoding. Every top-level document is an object carrying
//! `"schema": "shychase/1"` and a `"kind"` tag.

use serde_json::{json, Map, Value};

use crate::logic::{Atom, Instance, Label, Mapping, Ontology, Program, Query, Rule, Term};

pub const SCHEMA: &str = "shychase/1";

/// Wraps `fields` into a top-level document of the given kind.
pub fn document(kind: &str, fields: Value) -> Value {
    let mut obj = Map::new();
    obj.insert("schema".into(), json!(SCHEMA));
    obj.insert("kind".into(), json!(kind));
    if let Value::Object(extra) = fields {
        obj.extend(extra);
    }
    Value::Object(obj)
}

pub fn term(t: &Term) -> Value {
    match t {
        Term::Constant(c) => json!({ "const": &**c }),
        Term::Null(n) => json!({ "null": n }),
        Term::Variable(_) => json!({ "var": t.to_string() }),
    }
}

pub fn atom(a: &Atom) -> Value {
    let mut obj = Map::new();
    obj.insert("pred".into(), json!(&*a.predicate.name));
    if let Some(shape) = &a.predicate.shape {
        let labels: Vec<Value> = shape
            .labels()
            .iter()
            .map(|l| match l {
                Label::Const(c) => json!(&**c),
                Label::Index(i) => json!(i),
            })
            .collect();
        obj.insert("shape".into(), Value::Array(labels));
    }
    obj.insert("args".into(), Value::Array(a.args.iter().map(term).collect()));
    Value::Object(obj)
}

pub fn atoms<'a>(it: impl IntoIterator<Item = &'a Atom>) -> Value {
    Value::Array(it.into_iter().map(atom).collect())
}

pub fn instance(i: &Instance) -> Value {
    atoms(i.iter())
}

pub fn rule(r: &Rule) -> Value {
    json!({
        "id": &*r.id,
        "body": atoms(&r.body),
        "head": atom(&r.head),
        "existentials": r.existential_in_order().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
    })
}

pub fn ontology(o: &Ontology) -> Value {
    Value::Array(o.rules.iter().map(rule).collect())
}

pub fn query(q: &Query) -> Value {
    Value::Array(q.disjuncts.iter().map(atoms).collect())
}

pub fn mapping(m: &Mapping) -> Value {
    Value::Array(m.iter().map(|(k, v)| json!([term(k), term(v)])).collect())
}

pub fn program(p: &Program) -> Value {
    document(
        "program",
        json!({
            "facts": instance(p.database.instance()),
            "rules": ontology(&p.ontology),
            "queries": p.queries.iter().map(query).collect::<Vec<_>>(),
        }),
    )
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::parse::parse_program;

    #[test]
    fn nulls_are_tagged() {
        assert_eq!(term(&Term::null(1)), json!({"null": 1}));
        assert_eq!(term(&Term::constant("c")), json!({"const": "c"}));
    }

    #[test]
    fn program_document() {
        let p = parse_program("f_[1,c](X) -> p(X).").unwrap();
        let v = program(&p);
        assert_eq!(v["schema"], json!("shychase/1"));
        assert_eq!(v["rules"][0]["body"][0]["shape"], json!([1, "c"]));
        assert_eq!(v["rules"][0]["head"]["args"][0], json!({"var": "X"}));
    }
}
