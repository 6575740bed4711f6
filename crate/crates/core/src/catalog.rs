//! Sensitive-attribute catalog: categories, their equivalence partitions,
//! ordered scales for boundary analysis, and surface realization.
//!
//! The catalog is a TOML document with a `categories` array and a `scales`
//! table; see `catalog/default.toml` for the shipped instance.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{line_of, Error, Result};
use crate::text;

const DEFAULT_CATALOG: &str = include_str!("../catalog/default.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CategoryKind {
    Nominal,
    Ordered,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pronouns {
    pub subject: String,
    pub object: String,
    pub possessive: String,
    pub reflexive: String,
}

impl Pronouns {
    pub fn neutral() -> Self {
        Pronouns {
            subject: "they".into(),
            object: "them".into(),
            possessive: "their".into(),
            reflexive: "themselves".into(),
        }
    }

    pub fn get(&self, role: PronounRole) -> &str {
        match role {
            PronounRole::Subject => &self.subject,
            PronounRole::Object => &self.object,
            PronounRole::Possessive => &self.possessive,
            PronounRole::Reflexive => &self.reflexive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PronounRole {
    Subject,
    Object,
    Possessive,
    Reflexive,
}

impl PronounRole {
    pub fn from_slot(name: &str) -> Option<Self> {
        match name {
            "subj" => Some(PronounRole::Subject),
            "obj" => Some(PronounRole::Object),
            "poss" => Some(PronounRole::Possessive),
            "refl" => Some(PronounRole::Reflexive),
            _ => None,
        }
    }
}

/// How a bound value is currently rendered in a sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceForm {
    #[default]
    Plain,
    Intensified,
    Negated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeValue {
    pub id: String,
    pub surface_forms: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gender_pronouns: Option<Pronouns>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intensified_form: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negated_form: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aliases: Vec<String>,
}

impl AttributeValue {
    /// Surface text for a register, falling back to register 0.
    pub fn surface(&self, register: usize) -> &str {
        self.surface_forms
            .get(register)
            .unwrap_or(&self.surface_forms[0])
    }

    /// Renders the value in the given register and form. Returns `None` when
    /// the value has no such form (only possible for `Intensified`).
    pub fn render(&self, register: usize, form: SurfaceForm) -> Option<String> {
        let plain = self.surface(register);
        match form {
            SurfaceForm::Plain => Some(plain.to_string()),
            SurfaceForm::Intensified => self
                .intensified_form
                .as_ref()
                .filter(|f| text::contains_phrase(f, plain))
                .cloned(),
            // Registers above 0 are noun phrases and take "no".
            SurfaceForm::Negated => Some(match (&self.negated_form, register) {
                (Some(explicit), 0) => explicit.clone(),
                (_, r) if r > 0 && r < self.surface_forms.len() => format!("no {plain}"),
                (Some(explicit), _) => explicit.clone(),
                _ => text::negate_phrase(plain),
            }),
        }
    }

    /// Whether `s` is one of the strings this value can render as.
    pub fn renders_as(&self, s: &str) -> bool {
        (0..self.surface_forms.len()).any(|r| {
            [
                SurfaceForm::Plain,
                SurfaceForm::Intensified,
                SurfaceForm::Negated,
            ]
            .into_iter()
            .filter_map(|form| self.render(r, form))
            .any(|f| text::eq_ignoring_initial_case(&f, s))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeCategory {
    pub id: String,
    pub kind: CategoryKind,
    /// Neutral stand-in used when a head-noun attribute is removed from a
    /// sentence (e.g. "person" for occupations).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub removal_form: Option<String>,
    pub values: Vec<AttributeValue>,
}

impl AttributeCategory {
    pub fn value(&self, id: &str) -> Result<&AttributeValue> {
        self.values
            .iter()
            .find(|v| v.id == id)
            .ok_or_else(|| Error::Lookup {
                kind: "value",
                id: format!("{}/{}", self.id, id),
            })
    }

    pub fn position(&self, id: &str) -> Result<usize> {
        self.values
            .iter()
            .position(|v| v.id == id)
            .ok_or_else(|| Error::Lookup {
                kind: "value",
                id: format!("{}/{}", self.id, id),
            })
    }

    pub fn is_ordered(&self) -> bool {
        self.kind == CategoryKind::Ordered
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedScale {
    pub category_id: String,
    pub min_value: String,
    pub max_value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct ScaleEntry {
    min: String,
    max: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CatalogFile {
    categories: Vec<AttributeCategory>,
    #[serde(default)]
    scales: BTreeMap<String, ScaleEntry>,
}

/// Immutable attribute catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    categories: Vec<AttributeCategory>,
    scales: BTreeMap<String, OrderedScale>,
}

impl Catalog {
    /// The catalog shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_toml_str(DEFAULT_CATALOG, Path::new("catalog/default.toml"))
            .expect("shipped catalog is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let source = std::fs::read_to_string(path)?;
        Self::from_toml_str(&source, path)
    }

    pub fn from_toml_str(source: &str, path: &Path) -> Result<Self> {
        let file: CatalogFile = toml::from_str(source).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            line: e.span().map(|s| line_of(source, s.start)).unwrap_or(0),
            message: e.message().to_string(),
        })?;
        let scales = file
            .scales
            .into_iter()
            .map(|(category_id, s)| {
                (
                    category_id.clone(),
                    OrderedScale {
                        category_id,
                        min_value: s.min,
                        max_value: s.max,
                    },
                )
            })
            .collect();
        Self::new(file.categories, scales)
    }

    /// Builds a catalog, checking every structural invariant.
    pub fn new(
        categories: Vec<AttributeCategory>,
        scales: BTreeMap<String, OrderedScale>,
    ) -> Result<Self> {
        let catalog = Catalog { categories, scales };
        catalog.validate()?;
        Ok(catalog)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for cat in &self.categories {
            let err = |msg: String| Error::validation(format!("category `{}`", cat.id), msg);
            if !seen.insert(cat.id.as_str()) {
                return Err(err("duplicate category id".into()));
            }
            if cat.values.len() < 2 {
                return Err(err(format!(
                    "needs at least 2 values, found {}",
                    cat.values.len()
                )));
            }
            let mut ids = HashSet::new();
            for v in &cat.values {
                if !ids.insert(v.id.as_str()) {
                    return Err(err(format!("duplicate value id `{}`", v.id)));
                }
                if v.surface_forms.is_empty() || v.surface_forms.iter().any(|s| s.trim().is_empty())
                {
                    return Err(err(format!("value `{}` needs non-empty surface forms", v.id)));
                }
            }
            if cat.is_ordered() && !self.scales.contains_key(&cat.id) {
                return Err(err("ordered category declares no scale".into()));
            }
        }
        for (id, scale) in &self.scales {
            let err = |msg: String| Error::validation(format!("category `{id}`"), msg);
            let cat = self
                .categories
                .iter()
                .find(|c| &c.id == id)
                .ok_or_else(|| err("scale references unknown category".into()))?;
            if !cat.is_ordered() {
                return Err(err("scale declared on a nominal category".into()));
            }
            if scale.min_value == scale.max_value {
                return Err(err("scale min equals max".into()));
            }
            let lo = cat.position(&scale.min_value).map_err(|e| err(e.to_string()))?;
            let hi = cat.position(&scale.max_value).map_err(|e| err(e.to_string()))?;
            let last = cat.values.len() - 1;
            if !((lo == 0 && hi == last) || (lo == last && hi == 0)) {
                return Err(err("scale extremes must be the first and last declared values".into()));
            }
        }
        Ok(())
    }

    pub fn to_toml_string(&self) -> String {
        let file = CatalogFile {
            categories: self.categories.clone(),
            scales: self
                .scales
                .iter()
                .map(|(k, s)| {
                    (
                        k.clone(),
                        ScaleEntry {
                            min: s.min_value.clone(),
                            max: s.max_value.clone(),
                        },
                    )
                })
                .collect(),
        };
        toml::to_string(&file).expect("catalog serializes")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_toml_string())?;
        Ok(())
    }

    /// Content hash of the canonical serialization.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml_string().as_bytes()))[..16].to_string()
    }

    pub fn categories(&self) -> &[AttributeCategory] {
        &self.categories
    }

    pub fn category(&self, id: &str) -> Result<&AttributeCategory> {
        self.categories
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| Error::Lookup {
                kind: "category",
                id: id.to_string(),
            })
    }

    pub fn value(&self, category_id: &str, value_id: &str) -> Result<&AttributeValue> {
        self.category(category_id)?.value(value_id)
    }

    pub fn scale(&self, category_id: &str) -> Option<&OrderedScale> {
        self.scales.get(category_id)
    }

    /// Every value of a category, one representative per partition, in
    /// declaration order.
    pub fn partitions_of(&self, category_id: &str) -> Result<&[AttributeValue]> {
        Ok(&self.category(category_id)?.values)
    }

    /// The `(min, max)` extremes of an ordered category.
    pub fn boundary_values(&self, category_id: &str) -> Result<(&AttributeValue, &AttributeValue)> {
        let cat = self.category(category_id)?;
        let scale = self
            .scales
            .get(category_id)
            .ok_or_else(|| Error::NotOrdered(category_id.to_string()))?;
        Ok((cat.value(&scale.min_value)?, cat.value(&scale.max_value)?))
    }

    /// Index step (+1 or -1) that moves a value of an ordered category toward
    /// its scale maximum.
    pub(crate) fn toward_max(&self, category_id: &str) -> Result<isize> {
        let cat = self.category(category_id)?;
        let scale = self
            .scales
            .get(category_id)
            .ok_or_else(|| Error::NotOrdered(category_id.to_string()))?;
        Ok(if cat.position(&scale.max_value)? > cat.position(&scale.min_value)? {
            1
        } else {
            -1
        })
    }
}

/// Grammatical context of a slot being filled.
#[derive(Debug, Clone, Default)]
pub struct SlotContext {
    /// Indefinite article directly preceding the slot, if any.
    pub article: Option<String>,
    pub register: usize,
    pub form: SurfaceForm,
    /// Pronoun slots elsewhere in the sentence that agree with this value.
    pub pronoun_slots: Vec<(PronounRole, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    pub article: Option<String>,
    pub text: String,
    pub pronouns: Vec<String>,
}

impl Realization {
    /// Article and value text joined as they appear in a sentence.
    pub fn phrase(&self) -> String {
        match &self.article {
            Some(a) => format!("{a} {}", self.text),
            None => self.text.clone(),
        }
    }
}

/// Realizes a value into a slot, keeping the surrounding article and any
/// agreeing pronouns consistent.
pub fn realize(value: &AttributeValue, ctx: &SlotContext) -> Realization {
    let text = value
        .render(ctx.register, ctx.form)
        .unwrap_or_else(|| value.surface(ctx.register).to_string());
    let article = ctx
        .article
        .as_deref()
        .map(|a| text::match_case(a, text::indefinite_article(&text)));
    let pronouns = ctx
        .pronoun_slots
        .iter()
        .map(|(role, current)| match (&value.gender_pronouns, ctx.form) {
            (Some(p), SurfaceForm::Plain | SurfaceForm::Intensified) => {
                text::match_case(current, p.get(*role))
            }
            (Some(_), SurfaceForm::Negated) => {
                text::match_case(current, Pronouns::neutral().get(*role))
            }
            (None, _) => current.clone(),
        })
        .collect();
    Realization {
        article,
        text,
        pronouns,
    }
}
