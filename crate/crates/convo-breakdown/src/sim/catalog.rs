//! Synthetic movie catalog backing the toy recommender.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slots an item attribute may use.
pub const SLOT_REGISTRY: &[&str] = &["genre", "year", "rating"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogItem {
    pub title: String,
    pub attributes: BTreeMap<String, String>,
}

impl CatalogItem {
    pub fn attr(&self, slot: &str) -> Option<&str> {
        self.attributes.get(slot).map(|s| s.as_str())
    }

    /// Decade bucket for the item's year, e.g. "1990s".
    pub fn decade(&self) -> Option<String> {
        let year: u32 = self.attr("year")?.parse().ok()?;
        Some(format!("{}s", year / 10 * 10))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub items: Vec<CatalogItem>,
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("catalog must be non-empty")]
    Empty,
    #[error("duplicate title `{0}`")]
    DuplicateTitle(String),
    #[error("item `{item}` uses unregistered slot `{slot}`")]
    UnknownSlot { item: String, slot: String },
}

impl Catalog {
    pub fn validate(&self) -> Result<(), CatalogError> {
        if self.items.is_empty() {
            return Err(CatalogError::Empty);
        }
        let mut seen = std::collections::HashSet::new();
        for item in &self.items {
            if !seen.insert(&item.title) {
                return Err(CatalogError::DuplicateTitle(item.title.clone()));
            }
            for slot in item.attributes.keys() {
                if !SLOT_REGISTRY.contains(&slot.as_str()) {
                    return Err(CatalogError::UnknownSlot {
                        item: item.title.clone(),
                        slot: slot.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Distinct genre values in catalog order of first appearance.
    pub fn genres(&self) -> Vec<String> {
        let mut out = Vec::new();
        for item in &self.items {
            if let Some(g) = item.attr("genre") {
                if !out.iter().any(|x| x == g) {
                    out.push(g.to_string());
                }
            }
        }
        out
    }

    /// Distinct rating values in catalog order of first appearance.
    pub fn ratings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for item in &self.items {
            if let Some(r) = item.attr("rating") {
                if !out.iter().any(|x| x == r) {
                    out.push(r.to_string());
                }
            }
        }
        out
    }

    /// Items matching every constraint conjunctively. A `year` constraint
    /// holding a decade value ("1990s") matches any year in that decade.
    pub fn matching<'a>(
        &'a self,
        constraints: &[(String, String)],
    ) -> Vec<&'a CatalogItem> {
        self.items
            .iter()
            .filter(|item| {
                constraints.iter().all(|(slot, value)| match slot.as_str() {
                    "year" if value.ends_with('s') => {
                        item.decade().as_deref() == Some(value.as_str())
                    }
                    _ => item.attr(slot) == Some(value.as_str()),
                })
            })
            .collect()
    }
}

/// Source of the bundled catalog document.
pub const DEFAULT_CATALOG_JSON: &str = include_str!("../../assets/catalog.json");

/// The bundled 50-item synthetic movie catalog.
pub fn default_catalog() -> Catalog {
    let catalog: Catalog =
        serde_json::from_str(DEFAULT_CATALOG_JSON).expect("bundled catalog must parse");
    catalog.validate().expect("bundled catalog must be valid");
    catalog
}

pub fn load_catalog(text: &str) -> Result<Catalog, CatalogError> {
    let catalog: Catalog = serde_json::from_str(text)?;
    catalog.validate()?;
    Ok(catalog)
}
