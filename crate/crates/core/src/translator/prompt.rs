use super::{Principle, PrincipleSet, PromptAssets, TranslatorError};

pub const DESCRIPTION_BLOCK: &str = "DESCRIPTION";
pub const FORMAT_BLOCK: &str = "FORMAT";

/// Task description, then the principle blocks in list order, then the
/// format restriction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    description: String,
    principles: Vec<Principle>,
    format_restriction: String,
}

impl PromptTemplate {
    pub fn new(
        description: impl Into<String>,
        principles: Vec<Principle>,
        format_restriction: impl Into<String>,
    ) -> Result<Self, TranslatorError> {
        let ids = PrincipleSet::new(principles.iter().map(Principle::id))?;
        debug_assert!(ids.len() <= 5);
        Ok(PromptTemplate {
            description: description.into(),
            principles,
            format_restriction: format_restriction.into(),
        })
    }

    /// Template holding the principles of `set` in the set's order.
    pub fn from_assets(assets: &PromptAssets, set: &PrincipleSet) -> Self {
        PromptTemplate {
            description: assets.description.clone(),
            principles: set
                .ids()
                .iter()
                .map(|id| assets.principle(*id).clone())
                .collect(),
            format_restriction: assets.format_restriction.clone(),
        }
    }

    pub fn principles(&self) -> &[Principle] {
        &self.principles
    }

    pub fn principle_set(&self) -> PrincipleSet {
        PrincipleSet::new(self.principles.iter().map(Principle::id))
            .expect("template ids are unique")
    }

    /// Renders the prompt. Each block opens with a `### <NAME>` line and
    /// blocks are separated by one blank line.
    pub fn render(&self) -> String {
        let mut blocks = Vec::with_capacity(self.principles.len() + 2);
        blocks.push(block(DESCRIPTION_BLOCK, self.description.trim_end()));
        for p in &self.principles {
            let body = format!(
                "{}\nEXAMPLE INPUT: {}\nEXAMPLE OUTPUT: {}",
                p.rule_text().trim_end(),
                p.example().input.trim_end(),
                p.example().output.trim_end()
            );
            blocks.push(block(p.id().as_str(), &body));
        }
        blocks.push(block(FORMAT_BLOCK, self.format_restriction.trim_end()));
        let mut out = blocks.join("\n");
        out.truncate(out.trim_end().len());
        out.push('\n');
        out
    }
}

fn block(name: &str, body: &str) -> String {
    format!("### {name}\n{body}\n")
}

/// Free-function form of [`PromptTemplate::render`].
pub fn render_prompt(template: &PromptTemplate) -> String {
    template.render()
}

/// Names of the `### ` blocks in a rendered prompt, in order.
pub fn block_names(prompt: &str) -> Vec<&str> {
    prompt
        .lines()
        .filter_map(|l| l.strip_prefix("### "))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::PrincipleId;
    use super::*;

    #[test]
    fn empty_template_has_no_principle_blocks() {
        let t = PromptTemplate::from_assets(&PromptAssets::defaults(), &PrincipleSet::empty());
        assert_eq!(block_names(&t.render()), [DESCRIPTION_BLOCK, FORMAT_BLOCK]);
        assert!(!t.render().contains("EXAMPLE INPUT:"));
    }

    #[test]
    fn full_template_in_canonical_order() {
        let t = PromptTemplate::from_assets(&PromptAssets::defaults(), &PrincipleSet::all());
        let rendered = t.render();
        let names = block_names(&rendered);
        assert_eq!(names.len(), 7);
        assert_eq!(names[0], DESCRIPTION_BLOCK);
        assert_eq!(names[6], FORMAT_BLOCK);
        let ids: Vec<&str> = PrincipleId::ALL.iter().map(|p| p.as_str()).collect();
        assert_eq!(&names[1..6], ids.as_slice());
        assert_eq!(rendered.matches("EXAMPLE OUTPUT:").count(), 5);
        assert!(rendered.ends_with('\n') && !rendered.ends_with("\n\n"));
    }

    #[test]
    fn duplicate_principles_rejected() {
        let a = PromptAssets::defaults();
        let p = a.principle(PrincipleId::ErrorsRevision).clone();
        assert!(PromptTemplate::new("d", vec![p.clone(), p], "f").is_err());
    }
}
