use super::*;
use crate::schema::DataType::*;

pub fn school() -> ConceptualModel {
    ConceptualModel {
        entity_sets: vec![
            EntitySet::new("Student", vec![ErAttribute::new("student_id", Numeric), ErAttribute::new("name", Text)]),
            EntitySet::new("Course", vec![ErAttribute::new("course_id", Numeric), ErAttribute::new("title", Text)]),
        ],
        relationship_sets: vec![RelationshipSet::new(
            "Enrolls",
            vec![Participant::new("Student", Cardinality::Many), Participant::new("Course", Cardinality::Many)],
        )
        .with_attribute(ErAttribute::new("grade", Numeric))],
    }
}

pub fn company() -> ConceptualModel {
    ConceptualModel {
        entity_sets: vec![
            EntitySet::new("Department", vec![ErAttribute::new("dept_name", Text)]),
            EntitySet::new("Employee", vec![ErAttribute::new("employee_id", Numeric), ErAttribute::new("name", Text)]),
        ],
        relationship_sets: vec![RelationshipSet::new(
            "WorksIn",
            vec![Participant::new("Department", Cardinality::One), Participant::new("Employee", Cardinality::Many)],
        )],
    }
}

pub fn warehouse() -> ConceptualModel {
    ConceptualModel {
        entity_sets: vec![
            EntitySet::new(
                "Warehouse",
                vec![ErAttribute::new("warehouse_no", Numeric), ErAttribute::new("address", Text)],
            )
            .with_key(["warehouse_no"]),
            EntitySet::new(
                "Task",
                vec![
                    ErAttribute::new("warehouse_no", Numeric),
                    ErAttribute::new("cargo_no", Numeric),
                    ErAttribute::new("quantity", Numeric),
                    ErAttribute::new("cargo_name", Text),
                ],
            )
            .with_fd(ErFd::new(["warehouse_no", "cargo_no"], ["quantity"]))
            .with_fd(ErFd::new(["cargo_no"], ["cargo_name"])),
        ],
        relationship_sets: vec![RelationshipSet::new(
            "Stores",
            vec![Participant::new("Warehouse", Cardinality::One), Participant::new("Task", Cardinality::Many)],
        )],
    }
}
