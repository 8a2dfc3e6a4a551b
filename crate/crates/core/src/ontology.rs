//! Disease and geographical ontology: loading, validation and lookups.
//!
//! Both ontologies are read from a tab-separated record format, one record
//! per line:
//!
//! ```text
//! D <id> <root name> <synonym|synonym|...> <syndrome,syndrome> <scheme:ref;scheme:ref>
//! G <id> <name> <country|subcountry> <parent country id> <lat> <lon>
//! ```
//!
//! Lines starting with `#` are comments and trailing fields may be empty.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalize::normalize;

#[derive(Debug, Error, PartialEq)]
pub enum OntologyError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("duplicate disease id `{0}`")]
    DuplicateDisease(String),
    #[error("duplicate location id `{0}`")]
    DuplicateLocation(String),
    #[error("disease `{0}` has an empty root name")]
    EmptyRootName(String),
    #[error("synonym `{synonym}` claimed by both `{first}` and `{second}`")]
    SynonymCollision {
        synonym: String,
        first: String,
        second: String,
    },
    #[error("location `{id}` has unresolvable parent country `{parent}`")]
    UnresolvedParent { id: String, parent: String },
    #[error("location `{id}` has out-of-range coordinates ({lat}, {lon})")]
    CoordinatesOutOfRange { id: String, lat: f64, lon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Syndrome {
    Dermatological,
    Gastrointestinal,
    HemorrhagicFever,
    Musculoskeletal,
    Neurological,
    Respiratory,
}

impl Syndrome {
    pub const ALL: [Syndrome; 6] = [
        Syndrome::Dermatological,
        Syndrome::Gastrointestinal,
        Syndrome::HemorrhagicFever,
        Syndrome::Musculoskeletal,
        Syndrome::Neurological,
        Syndrome::Respiratory,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Syndrome::Dermatological => "dermatological",
            Syndrome::Gastrointestinal => "gastrointestinal",
            Syndrome::HemorrhagicFever => "hemorrhagic_fever",
            Syndrome::Musculoskeletal => "musculoskeletal",
            Syndrome::Neurological => "neurological",
            Syndrome::Respiratory => "respiratory",
        }
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Syndrome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        Syndrome::ALL
            .into_iter()
            .find(|syn| syn.as_str() == key)
            .ok_or_else(|| format!("unknown syndrome `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiseaseConcept {
    pub id: String,
    pub root_name: String,
    /// Normalized surface forms; always contains the normalized root name.
    pub synonyms: BTreeSet<String>,
    pub syndromes: BTreeSet<Syndrome>,
    pub external_refs: Vec<(String, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocationKind {
    Country,
    SubCountry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoLocation {
    pub id: String,
    pub name: String,
    pub kind: LocationKind,
    /// Enclosing country; a country's parent is itself.
    pub parent_country_id: String,
    pub latitude: f64,
    pub longitude: f64,
}

/// Immutable, fully indexed ontology.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ontology {
    diseases: BTreeMap<String, DiseaseConcept>,
    disease_synonym_index: BTreeMap<String, String>,
    locations: BTreeMap<String, GeoLocation>,
    location_name_index: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OntologyCounts {
    pub diseases: usize,
    pub countries: usize,
    pub sub_countries: usize,
}

impl Ontology {
    pub fn diseases(&self) -> impl Iterator<Item = &DiseaseConcept> {
        self.diseases.values()
    }

    pub fn disease(&self, id: &str) -> Option<&DiseaseConcept> {
        self.diseases.get(id)
    }

    pub fn locations(&self) -> impl Iterator<Item = &GeoLocation> {
        self.locations.values()
    }

    pub fn location(&self, id: &str) -> Option<&GeoLocation> {
        self.locations.get(id)
    }

    /// Normalized synonym to disease id.
    pub fn disease_synonym_index(&self) -> &BTreeMap<String, String> {
        &self.disease_synonym_index
    }

    /// Normalized location name to location ids (sorted).
    pub fn location_name_index(&self) -> &BTreeMap<String, Vec<String>> {
        &self.location_name_index
    }

    pub fn counts(&self) -> OntologyCounts {
        let countries = self
            .locations
            .values()
            .filter(|l| l.kind == LocationKind::Country)
            .count();
        OntologyCounts {
            diseases: self.diseases.len(),
            countries,
            sub_countries: self.locations.len() - countries,
        }
    }

    pub fn lookup_disease(&self, term: &str) -> Option<&DiseaseConcept> {
        let key = normalize(term);
        self.disease_synonym_index
            .get(&key)
            .and_then(|id| self.diseases.get(id))
    }

    /// All locations sharing the normalized name, ordered by id.
    pub fn lookup_location_candidates(&self, term: &str) -> Vec<&GeoLocation> {
        let key = normalize(term);
        if key.is_empty() {
            return Vec::new();
        }
        self.location_name_index
            .get(&key)
            .map(|ids| ids.iter().filter_map(|id| self.locations.get(id)).collect())
            .unwrap_or_default()
    }

    pub fn diseases_for_syndrome(&self, syndrome: Syndrome) -> BTreeSet<String> {
        self.diseases
            .values()
            .filter(|d| d.syndromes.contains(&syndrome))
            .map(|d| d.id.clone())
            .collect()
    }

    /// Name of the country enclosing `location_id` (the location itself for countries).
    pub fn country_of(&self, location_id: &str) -> Option<&GeoLocation> {
        let loc = self.locations.get(location_id)?;
        self.locations.get(&loc.parent_country_id)
    }
}

/// Parses both sources and builds the indexes, rejecting any record that
/// breaks an ontology invariant.
pub fn load_ontology(disease_source: &str, geo_source: &str) -> Result<Ontology, OntologyError> {
    let mut ontology = Ontology::default();

    for (line_no, fields) in records(disease_source) {
        let malformed = |message: String| OntologyError::Malformed {
            line: line_no,
            message,
        };
        if fields[0] != "D" {
            return Err(malformed(format!("expected a `D` record, found `{}`", fields[0])));
        }
        let concept = parse_disease(&fields).map_err(malformed)?;
        if concept.root_name.trim().is_empty() {
            return Err(OntologyError::EmptyRootName(concept.id));
        }
        if ontology.diseases.contains_key(&concept.id) {
            return Err(OntologyError::DuplicateDisease(concept.id));
        }
        for syn in &concept.synonyms {
            if let Some(owner) = ontology.disease_synonym_index.get(syn) {
                let (first, second) = if owner <= &concept.id {
                    (owner.clone(), concept.id.clone())
                } else {
                    (concept.id.clone(), owner.clone())
                };
                return Err(OntologyError::SynonymCollision {
                    synonym: syn.clone(),
                    first,
                    second,
                });
            }
            ontology
                .disease_synonym_index
                .insert(syn.clone(), concept.id.clone());
        }
        ontology.diseases.insert(concept.id.clone(), concept);
    }

    for (line_no, fields) in records(geo_source) {
        let malformed = |message: String| OntologyError::Malformed {
            line: line_no,
            message,
        };
        if fields[0] != "G" {
            return Err(malformed(format!("expected a `G` record, found `{}`", fields[0])));
        }
        let loc = parse_location(&fields).map_err(malformed)?;
        if !(-90.0..=90.0).contains(&loc.latitude) || !(-180.0..=180.0).contains(&loc.longitude) {
            return Err(OntologyError::CoordinatesOutOfRange {
                id: loc.id,
                lat: loc.latitude,
                lon: loc.longitude,
            });
        }
        if ontology.locations.contains_key(&loc.id) {
            return Err(OntologyError::DuplicateLocation(loc.id));
        }
        ontology.locations.insert(loc.id.clone(), loc);
    }

    for loc in ontology.locations.values() {
        let parent_ok = match loc.kind {
            LocationKind::Country => loc.parent_country_id == loc.id,
            LocationKind::SubCountry => ontology
                .locations
                .get(&loc.parent_country_id)
                .is_some_and(|p| p.kind == LocationKind::Country),
        };
        if !parent_ok {
            return Err(OntologyError::UnresolvedParent {
                id: loc.id.clone(),
                parent: loc.parent_country_id.clone(),
            });
        }
        let key = normalize(&loc.name);
        if !key.is_empty() {
            ontology
                .location_name_index
                .entry(key)
                .or_default()
                .push(loc.id.clone());
        }
    }
    // Locations are visited in id order, so every id list is already sorted.

    Ok(ontology)
}

fn records(source: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    source.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line.split('\t').collect()))
        }
    })
}

fn field<'a>(fields: &[&'a str], i: usize) -> &'a str {
    fields.get(i).copied().unwrap_or("").trim()
}

fn parse_disease(fields: &[&str]) -> Result<DiseaseConcept, String> {
    let id = field(fields, 1);
    if id.is_empty() {
        return Err("disease record without id".into());
    }
    let root_name = field(fields, 2).to_string();
    let mut synonyms: BTreeSet<String> = field(fields, 3)
        .split('|')
        .map(normalize)
        .filter(|s| !s.is_empty())
        .collect();
    let root_key = normalize(&root_name);
    if !root_key.is_empty() {
        synonyms.insert(root_key);
    }
    let syndromes = field(fields, 4)
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<Syndrome>().map_err(|e| format!("disease `{id}`: {e}")))
        .collect::<Result<BTreeSet<_>, _>>()?;
    let external_refs = field(fields, 5)
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.split_once(':')
                .map(|(scheme, r)| (scheme.trim().to_string(), r.trim().to_string()))
                .ok_or_else(|| format!("disease `{id}`: external ref `{s}` is not scheme:identifier"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DiseaseConcept {
        id: id.to_string(),
        root_name,
        synonyms,
        syndromes,
        external_refs,
    })
}

fn parse_location(fields: &[&str]) -> Result<GeoLocation, String> {
    let id = field(fields, 1);
    if id.is_empty() {
        return Err("location record without id".into());
    }
    let kind = match field(fields, 3).to_ascii_lowercase().as_str() {
        "country" => LocationKind::Country,
        "subcountry" | "sub-country" | "sub_country" => LocationKind::SubCountry,
        other => return Err(format!("location `{id}`: unknown kind `{other}`")),
    };
    let coord = |i: usize, what: &str| {
        field(fields, i)
            .parse::<f64>()
            .map_err(|_| format!("location `{id}`: bad {what} `{}`", field(fields, i)))
            .and_then(|v| {
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(format!("location `{id}`: non-finite {what}"))
                }
            })
    };
    let mut parent = field(fields, 4).to_string();
    if parent.is_empty() && kind == LocationKind::Country {
        parent = id.to_string();
    }
    Ok(GeoLocation {
        id: id.to_string(),
        name: field(fields, 2).to_string(),
        kind,
        parent_country_id: parent,
        latitude: coord(5, "latitude")?,
        longitude: coord(6, "longitude")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DISEASES: &str = "\
# test fixture
D\tequine_influenza\tequine influenza\tequine influenza|horse flu\trespiratory\tmesh:D007251
D\trabies\trabies\trabies|hydrophobia\tneurological\t
D\tmumps\tmumps\t\t\t
";
    const GEO: &str = "\
G\tGB\tUnited Kingdom\tcountry\tGB\t51.5\t-0.12
G\tUS\tUnited States\tcountry\tUS\t38.9\t-77.0
G\tGB-iow\tIsle of Wight\tsubcountry\tGB\t50.69\t-1.30
G\tUS-iow\tIsle of Wight\tsubcountry\tUS\t36.90\t-76.70
";

    fn fixture() -> Ontology {
        load_ontology(DISEASES, GEO).unwrap()
    }

    #[test]
    fn empty_sources_give_empty_ontology() {
        let o = load_ontology("", "").unwrap();
        assert_eq!(
            o.counts(),
            OntologyCounts {
                diseases: 0,
                countries: 0,
                sub_countries: 0
            }
        );
        assert!(o.lookup_disease("rabies").is_none());
        assert!(o.lookup_location_candidates("Isle of Wight").is_empty());
        assert!(o.diseases_for_syndrome(Syndrome::Respiratory).is_empty());
    }

    #[test]
    fn root_name_is_a_synonym() {
        let o = fixture();
        assert_eq!(o.lookup_disease("MUMPS").unwrap().id, "mumps");
        assert!(o.disease("mumps").unwrap().synonyms.contains("mumps"));
    }

    #[test]
    fn lookups_normalize() {
        let o = fixture();
        assert_eq!(o.lookup_disease("EQUINE   Influenza").unwrap().id, "equine_influenza");
        assert_eq!(o.lookup_disease("Horse flu.").unwrap().id, "equine_influenza");
        assert!(o.lookup_disease("quantum fever").is_none());
        let ids: Vec<_> = o
            .lookup_location_candidates("isle of  WIGHT")
            .iter()
            .map(|l| l.id.as_str())
            .collect();
        assert_eq!(ids, ["GB-iow", "US-iow"]);
        assert!(o.lookup_location_candidates("").is_empty());
    }

    #[test]
    fn synonym_collision_names_both_ids() {
        let src = "D\tavian_influenza\tavian influenza\tbird flu\t\t\nD\th5n1\tH5N1\tBird Flu\t\t\n";
        let err = load_ontology(src, "").unwrap_err();
        assert_eq!(
            err,
            OntologyError::SynonymCollision {
                synonym: "bird flu".into(),
                first: "avian_influenza".into(),
                second: "h5n1".into()
            }
        );
        assert!(err.to_string().contains("avian_influenza") && err.to_string().contains("h5n1"));
    }

    #[test]
    fn duplicate_disease_id_rejected() {
        let src = "D\trabies\trabies\t\t\t\nD\trabies\tlyssa\t\t\t\n";
        assert_eq!(
            load_ontology(src, "").unwrap_err(),
            OntologyError::DuplicateDisease("rabies".into())
        );
    }

    #[test]
    fn unresolvable_parent_rejected() {
        let geo = "G\tGB\tUnited Kingdom\tcountry\tGB\t51\t0\nG\tX-1\tNowhere\tsubcountry\tZZ\t1\t1\n";
        assert_eq!(
            load_ontology("", geo).unwrap_err(),
            OntologyError::UnresolvedParent {
                id: "X-1".into(),
                parent: "ZZ".into()
            }
        );
    }

    #[test]
    fn parent_must_be_a_country() {
        let geo = "G\tGB\tUnited Kingdom\tcountry\tGB\t51\t0\nG\tA\tA\tsubcountry\tGB\t1\t1\nG\tB\tB\tsubcountry\tA\t1\t1\n";
        assert!(matches!(
            load_ontology("", geo),
            Err(OntologyError::UnresolvedParent { .. })
        ));
    }

    #[test]
    fn out_of_range_coordinates_rejected() {
        let geo = "G\tGB\tUnited Kingdom\tcountry\tGB\t91\t0\n";
        assert!(matches!(
            load_ontology("", geo),
            Err(OntologyError::CoordinatesOutOfRange { ref id, .. }) if id == "GB"
        ));
        let geo = "G\tGB\tUnited Kingdom\tcountry\tGB\t50\t-180.5\n";
        assert!(load_ontology("", geo).is_err());
    }

    #[test]
    fn unknown_syndrome_rejected() {
        let src = "D\tx\tx fever\t\tcardiac\t\n";
        assert!(matches!(
            load_ontology(src, ""),
            Err(OntologyError::Malformed { line: 1, .. })
        ));
    }

    #[test]
    fn syndrome_lookup() {
        let o = fixture();
        assert_eq!(
            o.diseases_for_syndrome(Syndrome::Respiratory),
            BTreeSet::from(["equine_influenza".to_string()])
        );
        assert!(o.diseases_for_syndrome(Syndrome::Dermatological).is_empty());
    }

    #[test]
    fn syndrome_parsing_accepts_display_forms() {
        assert_eq!("Hemorrhagic fever".parse::<Syndrome>(), Ok(Syndrome::HemorrhagicFever));
        assert!("cardiac".parse::<Syndrome>().is_err());
    }

    #[test]
    fn loading_is_deterministic() {
        assert_eq!(fixture(), fixture());
    }
}
