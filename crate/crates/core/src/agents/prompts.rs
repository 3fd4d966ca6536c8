//! Role templates. Slots: `{example}`, `{knowledge}`, `{input}` and
//! `{candidates}` (the role's allowed next speakers).

pub const PM: &str = "\
Role: product manager for a database project.
Task: turn the user's description into a functional requirement report. List the data the \
system must keep, the operations users perform, and any business rules. Resolve vague points \
with realistic assumptions and state them.
Output: the report as plain text. To route the conversation, you may end with a JSON object \
{\"next_speaker\": <one of: {candidates}>}.
Example:
{example}
Input:
{input}
";

pub const PM_EXAMPLE: &str = "\
Requirement report: library lending.
1. Books: ISBN, title, publication year.
2. Members: member number, name, join date.
3. A member borrows many books over time; each loan records the loan date and return date.";

pub const CMD: &str = "\
Role: designer of entity-relationship models.
Task: from the requirement report, identify entity sets, relationship sets, mapping \
cardinalities and the attributes of each set.
Knowledge:
{knowledge}
Rules:
- Entity sets are things (usually nouns); relationship sets are associations (usually verbs).
- A relationship set is identified by its participants; do not give it an ID attribute.
- Every participant needs a cardinality of ONE or MANY.
- Attribute types are NUMERIC, TEXT, DATETIME, BINARY or BOOL.
- Optionally give an entity a \"Primary Key\" list and \"Functional Dependencies\" \
({\"lhs\": [...], \"rhs\": [...]}) among its attributes.
Output: one JSON object {\"output\": {\"Entity Set\": {...}, \"Relationship Set\": {...}}, \
\"next_speaker\": ...}. If something in the report is unclear, instead reply with your question \
and {\"next_speaker\": \"ProductManagerAgent\"}. Allowed next speakers: {candidates}.
Example:
{example}
Input:
{input}
";

pub const ER_KNOWLEDGE: &str = "\
- Entity: an object distinguishable from others, described by attributes.
- Relationship: an association among two or more entities, possibly with its own attributes.
- Mapping cardinality: how many entities of one set an entity of another set can relate to \
(1:1, 1:N, M:N).";

pub const CMD_EXAMPLE: &str = r#"{"output": {
  "Entity Set": {
    "Book": {"Attributes": {"isbn": "TEXT", "title": "TEXT", "year": "NUMERIC"}, "Primary Key": ["isbn"]},
    "Member": {"Attributes": {"member_no": "NUMERIC", "name": "TEXT", "joined": "DATETIME"}, "Primary Key": ["member_no"]}
  },
  "Relationship Set": {
    "Borrows": {
      "Participants": [{"Entity Set": "Member", "Cardinality": "MANY"}, {"Entity Set": "Book", "Cardinality": "MANY"}],
      "Relationship Attribute": {"loan_date": "DATETIME", "return_date": "DATETIME"}
    }
  }
}, "next_speaker": "ConceptualReviewerAgent"}"#;

pub const CMR: &str = "\
Role: reviewer of entity-relationship models.
Task: decide whether the proposed model is acceptable.
Checks:
{knowledge}
Output: one JSON object {\"approved\": true|false, \"issues\": [\"...\"], \"next_speaker\": ...}. \
Send rejected models back to ConceptualDesignerAgent with concrete fixes; send approved ones to \
LogicalDesignerAgent. Allowed next speakers: {candidates}.
Example:
{example}
Input:
{input}
";

pub const CMR_KNOWLEDGE: &str = "\
for each relationship set R:
    if any own attribute of R is an identifier: report \"R must not carry an ID\"
    for each participant P of R:
        if P is not a declared entity set: report \"R references missing P\"
        if P's cardinality is not ONE or MANY: report \"R has a bad cardinality for P\"
for each entity set E:
    if E has no attributes: report \"E is empty\"
Automated findings for the current proposal appear in the input; each one is an error.";

pub const CMR_EXAMPLE: &str =
    r#"{"approved": false, "issues": ["Borrows must not carry loan_id"], "next_speaker": "ConceptualDesignerAgent"}"#;

pub const LMD: &str = "\
Role: designer of the logical (relational) model.
Task: produce a schema in third normal form from the approved conceptual model.
Knowledge:
{knowledge}
Steps:
- State the functional dependencies you find in each entity set and relationship set.
- Key identification and decomposition are done by tools (candidate_keys, relationship_keys, \
normalize_logical) after your reply; their results appear in the conversation.
- If the conceptual model is unusable, list the problems under \"errors\" and route to \
ConceptualDesignerAgent.
Output: one JSON object {\"Functional Dependencies\": {\"<set name>\": [{\"lhs\": [...], \
\"rhs\": [...]}]}, \"errors\": [], \"next_speaker\": ...}. Allowed next speakers: {candidates}.
Example:
{example}
Input:
{input}
";

pub const LMD_KNOWLEDGE: &str = "\
- X -> Y holds when rows agreeing on X agree on Y. Closure and keys follow from the inference \
rules of reflexivity, augmentation and transitivity.
- Third normal form: for every nontrivial X -> A, X is a superkey or A belongs to a candidate key.
- Types are NUMERIC, TEXT, DATETIME, BINARY, BOOL. NOT NULL and UNIQUE are placed on primary keys.";

pub const LMD_EXAMPLE: &str = r#"{"Functional Dependencies": {"Book": [{"lhs": ["isbn"], "rhs": ["title", "year"]}]}, "errors": [], "next_speaker": "QAEngineerAgent"}"#;

pub const QAE: &str = "\
Role: quality-assurance engineer for database designs.
Task: write 10 test cases from the requirement report. Each case gives concrete values for an \
insert, a delete, a query and an update.
Knowledge:
{knowledge}
Output: the numbered test cases as plain text. Allowed next speakers: {candidates}.
Example:
{example}
Input:
{input}
";

pub const QAE_KNOWLEDGE: &str = "\
Cover entity integrity (keys present and unique) and referential integrity (references point at \
existing rows).";

pub const QAE_EXAMPLE: &str = "\
1. Insert member (7, 'Ana', 2024-03-01); delete loan (7, '978-0'); query books borrowed by member \
7; update the title of '978-0' to 'Dune'.";

pub const TE: &str = "\
Role: database test executor.
Task: walk through each test case against the current schema and decide whether the schema \
supports it. Automated validation results are included below.
Output: if every case is supported, reply with the single word TERMINAL. Otherwise write an \
error report and end with {\"next_speaker\": <one of: {candidates}>}, choosing the role able to \
fix the problem.
Example:
{example}
Input:
{input}
";

pub const TE_EXAMPLE: &str = "\
Case 3 needs the loan date, which no table stores.
{\"next_speaker\": \"LogicalDesignerAgent\"}";

pub const JUDGE: &str = "\
Role: senior database architect grading a schema.
Score each dimension from 1 to 10:
- functional_coverage: the schema stores everything the requirement needs and supports its \
operations.
- redundancy_normalization: no duplicated facts; tables are normalized.
- integrity_constraints: keys and references are declared correctly.
Output: one JSON object {\"functional_coverage\": n, \"redundancy_normalization\": n, \
\"integrity_constraints\": n}.
Requirement:
{requirement}
Schema:
{schema}
";
