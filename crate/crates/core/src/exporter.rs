//! XML interchange for closed geometries.
//!
//! The document layout is described by `schema/geometry.xsd` at the repository root:
//!
//! ```xml
//! <geometry units="geant3" world="EXPH">
//!   <materials><material id="1" name="AL" density="2.7" x0="8.9" dedx="0.004"/></materials>
//!   <media><medium id="1" name="AL_MED" material="1" cut="0.001" maxstep="1"/></media>
//!   <volumes><volume name="TRTU" shape="TUBE" params="0 60 50" medium="1"/></volumes>
//!   <placements><place volume="TRTU" copy="1" mother="EXPH" x="-100" y="0" z="0" rot="0" flag="ONLY"/></placements>
//!   <rotations><rotation id="1" theta1="90" phi1="0" theta2="90" phi2="90" theta3="0" phi3="0"/></rotations>
//!   <booleans><carve volume="BOXA" many="TUBB"/></booleans>
//! </geometry>
//! ```
//!
//! Lengths are cm, angles degrees, energies GeV. Numbers are written in the shortest form
//! that parses back to the identical `f64`, so export → import → export is byte-stable.

use std::collections::HashSet;

use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, Event};
use quick_xml::{Reader, Writer};
use thiserror::Error;

use crate::geometry::{
    volume_name, Carve, Geometry, GeometryBuilder, GeometryError, GeometryStore, Material, Placement, PlacementFlag,
    RotationMatrix, Shape, ShapeKind, TrackingMedium, Volume,
};

pub const UNITS: &str = "geant3";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum XmlError {
    #[error("malformed XML: {0}")]
    Parse(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(" ")
}

fn empty(w: &mut Writer<Vec<u8>>, name: &str, attrs: &[(&str, String)]) {
    let el = BytesStart::new(name).with_attributes(attrs.iter().map(|(k, v)| (*k, v.as_str())));
    w.write_event(Event::Empty(el)).expect("writing to memory");
}

fn section<T>(w: &mut Writer<Vec<u8>>, name: &str, items: &[T], mut write: impl FnMut(&mut Writer<Vec<u8>>, &T)) {
    if items.is_empty() {
        w.write_event(Event::Empty(BytesStart::new(name)))
            .expect("writing to memory");
        return;
    }
    w.write_event(Event::Start(BytesStart::new(name)))
        .expect("writing to memory");
    for item in items {
        write(w, item);
    }
    w.write_event(Event::End(BytesEnd::new(name)))
        .expect("writing to memory");
}

/// Serializes a closed geometry. Elements appear in declaration order.
pub fn export_xml(geometry: &Geometry) -> String {
    let store = geometry.store();
    let world = &geometry.volume(geometry.world()).name;
    let mut w = Writer::new_with_indent(Vec::new(), b' ', 2);
    w.write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))
        .expect("writing to memory");
    let root = BytesStart::new("geometry").with_attributes([("units", UNITS), ("world", world.as_str())]);
    w.write_event(Event::Start(root)).expect("writing to memory");

    section(&mut w, "materials", &store.materials, |w, m| {
        empty(
            w,
            "material",
            &[
                ("id", m.id.to_string()),
                ("name", m.name.clone()),
                ("density", num(m.density)),
                ("x0", num(m.radiation_length)),
                ("dedx", num(m.dedx_ref)),
            ],
        )
    });
    section(&mut w, "media", &store.media, |w, m| {
        empty(
            w,
            "medium",
            &[
                ("id", m.id.to_string()),
                ("name", m.name.clone()),
                ("material", m.material_id.to_string()),
                ("cut", num(m.energy_cut)),
                ("maxstep", num(m.max_step)),
            ],
        )
    });
    section(&mut w, "volumes", &store.volumes, |w, v| {
        empty(
            w,
            "volume",
            &[
                ("name", v.name.clone()),
                ("shape", v.shape.kind().as_str().to_string()),
                ("params", join(&v.shape.params())),
                ("medium", v.medium_id.to_string()),
            ],
        )
    });
    section(&mut w, "placements", &store.placements, |w, p| {
        empty(
            w,
            "place",
            &[
                ("volume", p.volume.clone()),
                ("copy", p.copy.to_string()),
                ("mother", p.mother.clone()),
                ("x", num(p.translation[0])),
                ("y", num(p.translation[1])),
                ("z", num(p.translation[2])),
                ("rot", p.rotation_id.to_string()),
                ("flag", p.flag.as_str().to_string()),
            ],
        )
    });
    section(&mut w, "rotations", &store.rotations, |w, r| {
        let a = r.angles;
        empty(
            w,
            "rotation",
            &[
                ("id", r.id.to_string()),
                ("theta1", num(a[0])),
                ("phi1", num(a[1])),
                ("theta2", num(a[2])),
                ("phi2", num(a[3])),
                ("theta3", num(a[4])),
                ("phi3", num(a[5])),
            ],
        )
    });
    section(&mut w, "booleans", &store.carves, |w, c| {
        empty(w, "carve", &[("volume", c.volume.clone()), ("many", c.many.clone())])
    });

    w.write_event(Event::End(BytesEnd::new("geometry")))
        .expect("writing to memory");
    let mut text = String::from_utf8(w.into_inner()).expect("XML output is UTF-8");
    text.push('\n');
    text
}

#[derive(Debug)]
struct Element {
    name: String,
    attrs: Vec<(String, String)>,
    children: Vec<Element>,
}

fn element(start: &BytesStart<'_>) -> Result<Element, XmlError> {
    let name = String::from_utf8(start.name().as_ref().to_vec()).map_err(|e| XmlError::Parse(e.to_string()))?;
    let mut attrs = Vec::new();
    for attr in start.attributes() {
        let attr = attr.map_err(|e| XmlError::Parse(e.to_string()))?;
        let key = String::from_utf8(attr.key.as_ref().to_vec()).map_err(|e| XmlError::Parse(e.to_string()))?;
        let value = attr
            .unescape_value()
            .map_err(|e| XmlError::Parse(e.to_string()))?
            .into_owned();
        attrs.push((key, value));
    }
    Ok(Element {
        name,
        attrs,
        children: Vec::new(),
    })
}

fn parse_tree(text: &str) -> Result<Element, XmlError> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);
    let mut open: Vec<Element> = Vec::new();
    let mut root = None;
    loop {
        let event = reader
            .read_event()
            .map_err(|e| XmlError::Parse(format!("at byte {}: {e}", reader.buffer_position())))?;
        match event {
            Event::Start(start) => {
                if root.is_some() {
                    return Err(XmlError::Parse("content after the root element".into()));
                }
                open.push(element(&start)?);
            }
            Event::Empty(start) => {
                let el = element(&start)?;
                match open.last_mut() {
                    Some(parent) => parent.children.push(el),
                    None if root.is_none() => root = Some(el),
                    None => return Err(XmlError::Parse("content after the root element".into())),
                }
            }
            Event::End(_) => {
                let el = open.pop().ok_or_else(|| XmlError::Parse("unbalanced end tag".into()))?;
                match open.last_mut() {
                    Some(parent) => parent.children.push(el),
                    None => root = Some(el),
                }
            }
            Event::Text(t) => {
                let raw = t.unescape().map_err(|e| XmlError::Parse(e.to_string()))?;
                if !raw.trim().is_empty() {
                    return Err(XmlError::Schema(format!("unexpected text {:?}", raw.trim())));
                }
            }
            Event::CData(_) => return Err(XmlError::Schema("unexpected CDATA".into())),
            Event::Decl(_) | Event::Comment(_) | Event::PI(_) | Event::DocType(_) => {}
            Event::Eof => break,
        }
    }
    if !open.is_empty() {
        return Err(XmlError::Parse(format!(
            "document ends inside <{}>",
            open[open.len() - 1].name
        )));
    }
    root.ok_or_else(|| XmlError::Parse("empty document".into()))
}

/// Attribute access that insists on exactly the expected set.
struct Attrs<'a> {
    el: &'a Element,
}

impl<'a> Attrs<'a> {
    fn new(el: &'a Element, allowed: &[&str]) -> Result<Self, XmlError> {
        let mut seen = HashSet::new();
        for (k, _) in &el.attrs {
            if !allowed.contains(&k.as_str()) {
                return Err(XmlError::Schema(format!("unknown attribute {k:?} on <{}>", el.name)));
            }
            if !seen.insert(k.as_str()) {
                return Err(XmlError::Schema(format!("repeated attribute {k:?} on <{}>", el.name)));
            }
        }
        if let Some(missing) = allowed.iter().find(|a| !seen.contains(*a)) {
            return Err(XmlError::Schema(format!("<{}> lacks attribute {missing:?}", el.name)));
        }
        if let Some(child) = el.children.first() {
            return Err(XmlError::Schema(format!(
                "unexpected <{}> inside <{}>",
                child.name, el.name
            )));
        }
        Ok(Self { el })
    }

    fn str(&self, key: &str) -> &'a str {
        self.el
            .attrs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .expect("attribute presence checked")
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T, XmlError> {
        let v = self.str(key);
        v.trim()
            .parse()
            .map_err(|_| XmlError::Schema(format!("bad value {v:?} for {key:?} on <{}>", self.el.name)))
    }

    fn name(&self, key: &str) -> Result<String, XmlError> {
        Ok(volume_name(self.str(key))?)
    }
}

fn items<'a>(section: &'a Element, child: &str) -> Result<&'a [Element], XmlError> {
    if !section.attrs.is_empty() {
        return Err(XmlError::Schema(format!("<{}> takes no attributes", section.name)));
    }
    if let Some(bad) = section.children.iter().find(|c| c.name != child) {
        return Err(XmlError::Schema(format!(
            "unexpected <{}> inside <{}>",
            bad.name, section.name
        )));
    }
    Ok(&section.children)
}

/// Parses a document written by [`export_xml`] and closes the resulting geometry.
pub fn import_xml(text: &str) -> Result<Geometry, XmlError> {
    let root = parse_tree(text)?;
    if root.name != "geometry" {
        return Err(XmlError::Schema(format!(
            "root element is <{}>, expected <geometry>",
            root.name
        )));
    }
    let mut store = GeometryStore::default();
    let world;
    {
        let header = Element {
            name: root.name.clone(),
            attrs: root.attrs.clone(),
            children: Vec::new(),
        };
        let attrs = Attrs::new(&header, &["units", "world"])?;
        if attrs.str("units") != UNITS {
            return Err(XmlError::Schema(format!("units must be {UNITS:?}")));
        }
        world = attrs.name("world")?;
    }

    let mut seen = HashSet::new();
    for section in &root.children {
        if !seen.insert(section.name.as_str()) {
            return Err(XmlError::Schema(format!("repeated section <{}>", section.name)));
        }
        match section.name.as_str() {
            "materials" => {
                for el in items(section, "material")? {
                    let a = Attrs::new(el, &["id", "name", "density", "x0", "dedx"])?;
                    store.materials.push(Material {
                        id: a.parse("id")?,
                        name: a.str("name").to_string(),
                        density: a.parse("density")?,
                        radiation_length: a.parse("x0")?,
                        dedx_ref: a.parse("dedx")?,
                    });
                }
            }
            "media" => {
                for el in items(section, "medium")? {
                    let a = Attrs::new(el, &["id", "name", "material", "cut", "maxstep"])?;
                    store.media.push(TrackingMedium {
                        id: a.parse("id")?,
                        name: a.str("name").to_string(),
                        material_id: a.parse("material")?,
                        energy_cut: a.parse("cut")?,
                        max_step: a.parse("maxstep")?,
                    });
                }
            }
            "volumes" => {
                for el in items(section, "volume")? {
                    let a = Attrs::new(el, &["name", "shape", "params", "medium"])?;
                    let kind = ShapeKind::parse(a.str("shape"))
                        .ok_or_else(|| GeometryError::UnknownShape(a.str("shape").to_string()))?;
                    let params = a
                        .str("params")
                        .split_whitespace()
                        .map(|s| s.parse::<f64>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|_| XmlError::Schema(format!("bad params {:?}", a.str("params"))))?;
                    if params.len() != kind.n_params() {
                        return Err(XmlError::Schema(format!(
                            "{} takes {} params, got {}",
                            kind.as_str(),
                            kind.n_params(),
                            params.len()
                        )));
                    }
                    store.volumes.push(Volume {
                        name: a.name("name")?,
                        shape: Shape::new(kind, &params)?,
                        medium_id: a.parse("medium")?,
                    });
                }
            }
            "placements" => {
                for el in items(section, "place")? {
                    let a = Attrs::new(el, &["volume", "copy", "mother", "x", "y", "z", "rot", "flag"])?;
                    let flag = PlacementFlag::parse(a.str("flag"))
                        .ok_or_else(|| GeometryError::BadFlag(a.str("flag").to_string()))?;
                    store.placements.push(Placement {
                        volume: a.name("volume")?,
                        copy: a.parse("copy")?,
                        mother: a.name("mother")?,
                        translation: [a.parse("x")?, a.parse("y")?, a.parse("z")?],
                        rotation_id: a.parse("rot")?,
                        flag,
                    });
                }
            }
            "rotations" => {
                for el in items(section, "rotation")? {
                    let keys = ["theta1", "phi1", "theta2", "phi2", "theta3", "phi3"];
                    let a = Attrs::new(el, &["id", "theta1", "phi1", "theta2", "phi2", "theta3", "phi3"])?;
                    let mut angles = [0.0; 6];
                    for (slot, key) in angles.iter_mut().zip(keys) {
                        *slot = a.parse(key)?;
                    }
                    store
                        .rotations
                        .push(RotationMatrix::from_angles(a.parse("id")?, angles)?);
                }
            }
            "booleans" => {
                for el in items(section, "carve")? {
                    let a = Attrs::new(el, &["volume", "many"])?;
                    store.carves.push(Carve {
                        volume: a.name("volume")?,
                        many: a.name("many")?,
                    });
                }
            }
            other => return Err(XmlError::Schema(format!("unknown section <{other}>"))),
        }
    }

    let geometry = GeometryBuilder::from_store(store).close()?;
    let actual = &geometry.volume(geometry.world()).name;
    if *actual != world {
        return Err(XmlError::Schema(format!(
            "document names world {world:?} but the hierarchy root is {actual:?}"
        )));
    }
    Ok(geometry)
}
