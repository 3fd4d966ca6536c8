use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::prompts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    #[serde(rename = "PM")]
    ProductManager,
    #[serde(rename = "CMD")]
    ConceptualDesigner,
    #[serde(rename = "CMR")]
    ConceptualReviewer,
    #[serde(rename = "LMD")]
    LogicalDesigner,
    #[serde(rename = "QAE")]
    QaEngineer,
    #[serde(rename = "TE")]
    TestExecutor,
}

impl Role {
    pub const ALL: [Role; 6] = [
        Role::ProductManager,
        Role::ConceptualDesigner,
        Role::ConceptualReviewer,
        Role::LogicalDesigner,
        Role::QaEngineer,
        Role::TestExecutor,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Role::ProductManager => "PM",
            Role::ConceptualDesigner => "CMD",
            Role::ConceptualReviewer => "CMR",
            Role::LogicalDesigner => "LMD",
            Role::QaEngineer => "QAE",
            Role::TestExecutor => "TE",
        }
    }

    /// Identifier agents use to name a next speaker.
    pub fn wire_name(self) -> &'static str {
        match self {
            Role::ProductManager => "ProductManagerAgent",
            Role::ConceptualDesigner => "ConceptualDesignerAgent",
            Role::ConceptualReviewer => "ConceptualReviewerAgent",
            Role::LogicalDesigner => "LogicalDesignerAgent",
            Role::QaEngineer => "QAEngineerAgent",
            Role::TestExecutor => "TestExecutorAgent",
        }
    }

    /// Successor in the default speaking order; `None` ends the chat.
    pub fn forward(self) -> Option<Role> {
        match self {
            Role::ProductManager => Some(Role::ConceptualDesigner),
            Role::ConceptualDesigner => Some(Role::ConceptualReviewer),
            Role::ConceptualReviewer => Some(Role::LogicalDesigner),
            Role::LogicalDesigner => Some(Role::QaEngineer),
            Role::QaEngineer => Some(Role::TestExecutor),
            Role::TestExecutor => None,
        }
    }

    pub fn is_nested(self) -> bool {
        matches!(self, Role::ConceptualDesigner | Role::ConceptualReviewer)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown role `{0}`")]
pub struct UnknownRole(pub String);

impl FromStr for Role {
    type Err = UnknownRole;

    /// Accepts wire names, short codes and `ManagerAgent`, ignoring case.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("ManagerAgent") {
            return Ok(Role::ProductManager);
        }
        Role::ALL
            .into_iter()
            .find(|r| t.eq_ignore_ascii_case(r.wire_name()) || t.eq_ignore_ascii_case(r.code()))
            .ok_or_else(|| UnknownRole(t.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct RoleProfile {
    pub role: Role,
    /// Text with `{example}`, `{knowledge}` and `{input}` slots.
    pub template: &'static str,
    pub example: &'static str,
    pub knowledge: &'static str,
    pub candidates: &'static [Role],
    pub tools: &'static [&'static str],
}

impl RoleProfile {
    pub fn render(&self, input: &str) -> String {
        let candidates: Vec<&str> = self.candidates.iter().map(|r| r.wire_name()).collect();
        self.template
            .replace("{candidates}", &candidates.join(", "))
            .replace("{example}", self.example)
            .replace("{knowledge}", self.knowledge)
            .replace("{input}", input)
    }
}

/// The six registered profiles, in forward order.
#[derive(Debug, Clone)]
pub struct Profiles {
    profiles: Vec<RoleProfile>,
}

impl Default for Profiles {
    fn default() -> Self {
        use Role::*;
        let p = |role, template, example, knowledge, candidates, tools| RoleProfile {
            role,
            template,
            example,
            knowledge,
            candidates,
            tools,
        };
        Self {
            profiles: vec![
                p(ProductManager, prompts::PM, prompts::PM_EXAMPLE, "", &[ConceptualDesigner, LogicalDesigner], &[]),
                p(
                    ConceptualDesigner,
                    prompts::CMD,
                    prompts::CMD_EXAMPLE,
                    prompts::ER_KNOWLEDGE,
                    &[ConceptualReviewer, ProductManager],
                    &[],
                ),
                p(
                    ConceptualReviewer,
                    prompts::CMR,
                    prompts::CMR_EXAMPLE,
                    prompts::CMR_KNOWLEDGE,
                    &[ConceptualDesigner, LogicalDesigner],
                    &[],
                ),
                p(
                    LogicalDesigner,
                    prompts::LMD,
                    prompts::LMD_EXAMPLE,
                    prompts::LMD_KNOWLEDGE,
                    &[QaEngineer, TestExecutor, ConceptualDesigner],
                    &["candidate_keys", "relationship_keys", "normalize_logical"],
                ),
                p(QaEngineer, prompts::QAE, prompts::QAE_EXAMPLE, prompts::QAE_KNOWLEDGE, &[TestExecutor], &[]),
                p(
                    TestExecutor,
                    prompts::TE,
                    prompts::TE_EXAMPLE,
                    "",
                    &[LogicalDesigner, ConceptualDesigner, ProductManager],
                    &[],
                ),
            ],
        }
    }
}

impl Profiles {
    pub fn get(&self, role: Role) -> &RoleProfile {
        self.profiles.iter().find(|p| p.role == role).expect("all six roles are registered")
    }

    pub fn iter(&self) -> impl Iterator<Item = &RoleProfile> {
        self.profiles.iter()
    }
}

/// Outcome of speaker selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NextSpeaker {
    Role(Role),
    End,
}

impl NextSpeaker {
    fn from_option(r: Option<Role>) -> Self {
        r.map_or(NextSpeaker::End, NextSpeaker::Role)
    }
}

/// Resolves a raw hint against the current speaker's candidates. Returns the
/// hinted role when it is a known role and a candidate.
pub fn validate_hint(current: Role, hint: Option<&str>, profiles: &Profiles) -> Option<Role> {
    let raw = hint?;
    match raw.parse::<Role>() {
        Ok(r) if profiles.get(current).candidates.contains(&r) => Some(r),
        Ok(r) => {
            tracing::warn!(speaker = %current, hint = %r, "hint is not a candidate next speaker; ignored");
            None
        }
        Err(_) => {
            tracing::warn!(speaker = %current, hint = raw, "hint names no known role; ignored");
            None
        }
    }
}

/// Valid hint if any, forward order otherwise.
pub fn select_next_speaker(current: Role, hint: Option<&str>, profiles: &Profiles) -> NextSpeaker {
    match validate_hint(current, hint, profiles) {
        Some(r) => NextSpeaker::Role(r),
        None => NextSpeaker::from_option(current.forward()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_profiles_with_candidates_inside_the_role_set() {
        let p = Profiles::default();
        assert_eq!(p.iter().count(), 6);
        for prof in p.iter() {
            assert!(!prof.candidates.contains(&prof.role));
            for slot in ["{example}", "{input}"] {
                assert!(prof.template.contains(slot), "{} lacks {slot}", prof.role);
            }
        }
        assert_eq!(p.get(Role::LogicalDesigner).tools.len(), 3);
    }

    #[test]
    fn role_names_parse() {
        assert_eq!("ConceptualDesignerAgent".parse(), Ok(Role::ConceptualDesigner));
        assert_eq!("managerAgent".parse(), Ok(Role::ProductManager));
        assert_eq!("te".parse(), Ok(Role::TestExecutor));
        assert!("Janitor".parse::<Role>().is_err());
    }

    #[test]
    fn selection_examples() {
        let p = Profiles::default();
        assert_eq!(
            select_next_speaker(Role::LogicalDesigner, Some("ConceptualDesignerAgent"), &p),
            NextSpeaker::Role(Role::ConceptualDesigner)
        );
        assert_eq!(
            select_next_speaker(Role::ConceptualDesigner, None, &p),
            NextSpeaker::Role(Role::ConceptualReviewer)
        );
        assert_eq!(select_next_speaker(Role::TestExecutor, Some("DbaAgent"), &p), NextSpeaker::End);
        // known role but not a candidate
        assert_eq!(
            select_next_speaker(Role::QaEngineer, Some("ProductManagerAgent"), &p),
            NextSpeaker::Role(Role::TestExecutor)
        );
    }

    #[test]
    fn selection_is_total() {
        let p = Profiles::default();
        let hints: Vec<Option<String>> = std::iter::once(None)
            .chain(Role::ALL.iter().map(|r| Some(r.wire_name().to_string())))
            .chain([Some(String::new()), Some("nobody".into())])
            .collect();
        for role in Role::ALL {
            for h in &hints {
                let next = select_next_speaker(role, h.as_deref(), &p);
                if let NextSpeaker::Role(r) = next {
                    assert!(p.get(role).candidates.contains(&r) || role.forward() == Some(r));
                }
            }
        }
    }
}
