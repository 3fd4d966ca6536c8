mod common;

use proptest::prelude::*;
use schemaforge::corpus::bundled_corpus;
use schemaforge::ddl::{emit_ddl, verify_executable, verify_sql};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn emitted_ddl_executes_and_is_stable(s in common::schema()) {
        let d = emit_ddl(&s).unwrap();
        let v = verify_executable(&d).unwrap();
        prop_assert!(v.ok, "{:?}\n{}", v.diagnostics, d.to_sql());
        prop_assert_eq!(d.statements.len(), s.relations().len());
        prop_assert_eq!(emit_ddl(&s).unwrap().to_sql(), d.to_sql());
        prop_assert!(verify_sql(&d.to_sql()).unwrap().ok);
        if !d.cyclic {
            let pos = |t: &schemaforge::TableId| {
                let name = &s.relation(t).unwrap().name;
                d.statements.iter().position(|st| &st.table == name).unwrap()
            };
            for fk in s.foreign_keys() {
                let from = &s.attribute(&fk.from).unwrap().table;
                let to = &s.attribute(&fk.to).unwrap().table;
                prop_assert!(from == to || pos(to) < pos(from));
            }
        }
    }
}

#[test]
fn bundled_gold_schemas_execute() {
    for s in bundled_corpus() {
        let d = emit_ddl(&s.schema).unwrap();
        let v = verify_executable(&d).unwrap();
        assert!(v.ok, "{}: {:?}", s.id, v.diagnostics);
        for st in &d.statements {
            assert!(st.sql.trim_end().ends_with(");"), "{}", st.sql);
        }
    }
}
