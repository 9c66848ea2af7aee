//! The bundled six-scene fixture suite: dataset entries, scene manifests with box
//! meshes, and the mock judge table that answers every request the metrics issue.
//!
//! Layout written by [`write_suite`]:
//!
//! ```text
//! dataset/<difficulty>/<id>/{description.txt, counts.csv, attributes.csv, oo_relations.csv, oa_relations.csv}
//! scenes/<id>/scene.json
//! scenes/<id>/meshes/box_<w>x<d>x<h>.obj
//! judge.tsv
//! ```

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};

use nalgebra::{Point3, Vector3};

use super::{box_on, MockBuilder};
use crate::annotation::{parse_spec_line, DatasetEntry, Difficulty, FieldKind, SpecLine, SPEC_FILES};
use crate::geometry::TriMesh;
use crate::judge::{MockJudge, SupportType};
use crate::metrics::entry_categories;
use crate::relations::{OARelation, OORelation, Side};
use crate::scene::{
    ArchElement, ArchEntry, ArchKind, ObjectEntry, ObjectInstance, RoomDecl, RoomEntry, SceneInstance, SceneManifest,
};

struct Item {
    id: &'static str,
    desc: &'static str,
    size: [f64; 3],
    at: [f64; 3],
    yaw: f64,
    category: Option<&'static str>,
    support: SupportType,
    sides: &'static [Side],
    /// `(category, attribute, satisfied)`
    attrs: &'static [(&'static str, &'static str, bool)],
}

enum OoAnswer {
    Types(&'static [(OORelation, Option<Side>)]),
    Unmapped(&'static str),
}

struct Room {
    w: f64,
    d: f64,
    h: f64,
    ceiling: bool,
}

enum Layout {
    Rect(Room),
    /// Two floors side by side along x, split at `split`, with declared rooms.
    Studio { room: Room, split: f64 },
}

struct Case {
    id: &'static str,
    difficulty: Difficulty,
    description: &'static str,
    layout: Layout,
    counts: &'static [&'static str],
    attributes: &'static [&'static str],
    oo: &'static [(&'static str, OoAnswer)],
    oa: &'static [(&'static str, OARelation, &'static str)],
    items: Vec<Item>,
}

#[allow(clippy::too_many_arguments)]
fn item(
    id: &'static str,
    desc: &'static str,
    size: [f64; 3],
    at: [f64; 3],
    yaw: f64,
    category: Option<&'static str>,
    support: SupportType,
    sides: &'static [Side],
) -> Item {
    Item {
        id,
        desc,
        size,
        at,
        yaw,
        category,
        support,
        sides,
        attrs: &[],
    }
}

impl Item {
    fn attrs(mut self, attrs: &'static [(&'static str, &'static str, bool)]) -> Self {
        self.attrs = attrs;
        self
    }
}

use Side::{Front, Left, Right};
use SupportType::{Ceiling, Ground, Object, Wall};

fn cases() -> Vec<Case> {
    let rect = |w, d, h| {
        Layout::Rect(Room {
            w,
            d,
            h,
            ceiling: true,
        })
    };
    vec![
        Case {
            id: "bedroom_01",
            difficulty: Difficulty::Easy,
            description: "A small bedroom with a red double bed against the wall, a nightstand with a lamp to its left and a wardrobe.",
            layout: rect(4.0, 5.0, 2.7),
            counts: &["eq,1,bed", "eq,1,nightstand", "eq,1,wardrobe", "eq,1,lamp"],
            attributes: &["eq,1,bed,red"],
            oo: &[
                ("eq,1,left of,0,bed,nightstand", OoAnswer::Types(&[(OORelation::SideOf, Some(Left))])),
                ("eq,1,on,0,nightstand,lamp", OoAnswer::Types(&[(OORelation::OnTop, None)])),
            ],
            oa: &[
                ("eq,1,against,bed,wall", OARelation::AgainstWall, "wall"),
                ("eq,1,against,wardrobe,wall", OARelation::AgainstWall, "wall"),
            ],
            items: vec![
                item("bed_0", "double bed, red frame", [1.6, 2.0, 0.55], [2.0, 3.97, 0.0], PI, Some("bed"), Ground, &[Left, Right])
                    .attrs(&[("bed", "red", true)]),
                item("nightstand_0", "nightstand, two drawers", [0.45, 0.4, 0.55], [3.1, 4.78, 0.0], PI, Some("nightstand"), Ground, &[Front]),
                item("lamp_0", "bedside lamp", [0.25, 0.25, 0.4], [3.1, 4.78, 0.55], PI, Some("lamp"), Object, &[]),
                item("wardrobe_0", "wardrobe, two doors", [1.2, 0.6, 2.0], [0.7, 0.32, 0.0], 0.0, Some("wardrobe"), Ground, &[Front]),
            ],
        },
        Case {
            id: "living_01",
            difficulty: Difficulty::Easy,
            description: "A living room with a grey sofa facing a TV on a stand and a coffee table in front of the sofa.",
            layout: rect(5.0, 4.0, 2.7),
            counts: &["eq,1,sofa", "eq,1,coffee table", "eq,1,tv stand", "eq,1,tv"],
            attributes: &["eq,1,sofa,grey"],
            oo: &[
                ("eq,1,in front of,0,sofa,coffee table", OoAnswer::Types(&[(OORelation::SideOf, Some(Front))])),
                ("eq,1,facing,0,sofa,tv stand", OoAnswer::Types(&[(OORelation::Face, None)])),
                ("eq,1,on,0,tv stand,tv", OoAnswer::Types(&[(OORelation::OnTop, None)])),
            ],
            oa: &[
                ("eq,1,against,sofa,wall", OARelation::AgainstWall, "wall"),
                ("eq,1,against,tv stand,wall", OARelation::AgainstWall, "wall"),
            ],
            items: vec![
                item("sofa_0", "three-seat sofa, grey fabric", [2.2, 0.9, 0.8], [2.5, 0.47, 0.0], 0.0, Some("sofa"), Ground, &[Front])
                    .attrs(&[("sofa", "grey", true)]),
                item("coffee_table_0", "low coffee table", [1.2, 0.6, 0.45], [2.5, 1.8, 0.0], 0.0, Some("coffee table"), Ground, &[]),
                item("tv_stand_0", "media console", [1.6, 0.45, 0.5], [2.5, 3.755, 0.0], PI, Some("tv stand"), Ground, &[Front]),
                item("tv_0", "flat screen television", [1.2, 0.08, 0.7], [2.5, 3.755, 0.5], PI, Some("tv"), Object, &[Front]),
            ],
        },
        Case {
            id: "dining_01",
            difficulty: Difficulty::Medium,
            description: "A dining room with four wooden chairs around a round table, a sideboard against the wall, a pendant lamp above the table and a plant in the corner.",
            layout: rect(6.0, 5.0, 2.8),
            counts: &["eq,1,dining table", "eq,4,chair", "eq,1,sideboard", "eq,1,pendant lamp", "ge,1,plant"],
            attributes: &["eq,4,chair,wooden", "eq,1,dining table,round"],
            oo: &[
                ("eq,1,around,0,dining table,chair*4", OoAnswer::Types(&[(OORelation::Surround, None)])),
                ("eq,4,facing,0,dining table,chair", OoAnswer::Types(&[(OORelation::Face, None)])),
            ],
            oa: &[
                ("eq,1,hanging from,pendant lamp,ceiling", OARelation::HangCeiling, "ceiling"),
                ("eq,1,against,sideboard,wall", OARelation::AgainstWall, "wall"),
                ("eq,1,in the corner,plant,room", OARelation::CornerRoom, "room"),
            ],
            items: vec![
                item("dining_table_0", "rectangular dining table", [1.6, 0.9, 0.75], [3.0, 2.5, 0.0], 0.0, Some("dining table"), Ground, &[])
                    .attrs(&[("dining table", "round", false)]),
                item("chair_0", "dining chair, oak", [0.45, 0.45, 0.9], [3.0, 1.7, 0.0], 0.0, Some("chair"), Ground, &[Front])
                    .attrs(&[("chair", "wooden", true)]),
                item("chair_1", "dining chair, walnut", [0.45, 0.45, 0.9], [3.0, 3.3, 0.0], PI, Some("chair"), Ground, &[Front])
                    .attrs(&[("chair", "wooden", true)]),
                item("chair_2", "dining chair, beech", [0.45, 0.45, 0.9], [1.8, 2.5, 0.0], -FRAC_PI_2, Some("chair"), Ground, &[Front])
                    .attrs(&[("chair", "wooden", true)]),
                item("chair_3", "dining chair, ash", [0.45, 0.45, 0.9], [4.2, 2.5, 0.0], FRAC_PI_2, Some("chair"), Ground, &[Front])
                    .attrs(&[("chair", "wooden", true)]),
                item("sideboard_0", "long sideboard", [1.8, 0.45, 0.85], [3.0, 4.755, 0.0], PI, Some("sideboard"), Ground, &[Front]),
                item("pendant_lamp_0", "pendant lamp", [0.4, 0.4, 0.5], [3.0, 2.5, 2.3], 0.0, Some("pendant lamp"), Ceiling, &[]),
                item("plant_0", "potted fig tree", [0.4, 0.4, 1.0], [0.25, 0.25, 0.0], 0.0, Some("plant"), Ground, &[]),
            ],
        },
        Case {
            id: "office_01",
            difficulty: Difficulty::Medium,
            description: "A home office with a desk against the wall, a black chair facing the desk, a monitor on the desk, a bookshelf and a trash can next to the desk.",
            layout: rect(4.0, 4.0, 2.7),
            counts: &["eq,1,desk", "eq,1,chair", "eq,1,bookshelf", "eq,1,monitor", "eq,1,trash can"],
            attributes: &["eq,1,chair,black"],
            oo: &[
                ("eq,1,facing,0,desk,chair", OoAnswer::Types(&[(OORelation::Face, None)])),
                ("eq,1,on,0,desk,monitor", OoAnswer::Types(&[(OORelation::OnTop, None)])),
                ("eq,1,next to,0,desk,trash can", OoAnswer::Types(&[(OORelation::NextTo, None)])),
            ],
            oa: &[
                ("eq,1,against,desk,wall", OARelation::AgainstWall, "wall"),
                ("eq,1,against,bookshelf,wall", OARelation::AgainstWall, "wall"),
            ],
            items: vec![
                item("desk_0", "writing desk", [1.4, 0.7, 0.75], [2.0, 3.63, 0.0], PI, Some("desk"), Ground, &[Front]),
                item("office_chair_0", "swivel office chair, black", [0.6, 0.6, 1.0], [2.0, 2.85, 0.0], 0.0, Some("chair"), Ground, &[Front])
                    .attrs(&[("chair", "black", true)]),
                item("bookshelf_0", "tall bookshelf", [0.9, 0.35, 1.9], [3.805, 1.5, 0.0], FRAC_PI_2, Some("bookshelf"), Ground, &[Front]),
                item("monitor_0", "computer monitor", [0.6, 0.2, 0.45], [2.0, 3.75, 0.75], PI, Some("monitor"), Object, &[Front]),
                item("waste_bin_0", "small waste bin", [0.3, 0.3, 0.4], [1.35, 3.5, 0.0], 0.0, Some("trash can"), Ground, &[]),
                item("floor_lamp_0", "arc floor lamp", [0.35, 0.35, 1.6], [0.5, 3.4, 0.0], 0.0, None, Ground, &[]),
            ],
        },
        Case {
            id: "studio_01",
            difficulty: Difficulty::Hard,
            description: "A studio apartment split into a living room and a bedroom: a sofa with a coffee table in the middle of the living room, an abstract painting on the wall, a blue bed with a nightstand beside it in the bedroom, a desk against the wall, a ceiling light, two stools and a leather armchair near the sofa.",
            layout: Layout::Studio {
                room: Room {
                    w: 8.0,
                    d: 4.0,
                    h: 2.7,
                    ceiling: true,
                },
                split: 5.0,
            },
            counts: &[
                "eq,1,sofa",
                "eq,1,coffee table",
                "eq,1,bed",
                "ge,1,nightstand",
                "eq,1,desk",
                "eq,1,painting",
                "eq,1,ceiling light",
                "eq,2,stool",
                "eq,1,armchair",
            ],
            attributes: &["eq,1,bed,blue", "eq,1,painting,abstract", "eq,1,armchair,leather"],
            oo: &[
                ("eq,1,in front of,0,sofa,coffee table", OoAnswer::Types(&[(OORelation::SideOf, Some(Front))])),
                ("eq,1,beside,0,bed,nightstand", OoAnswer::Types(&[(OORelation::NextTo, None)])),
                ("eq,1,near,0,sofa,armchair", OoAnswer::Types(&[(OORelation::Near, None)])),
            ],
            oa: &[
                ("eq,1,in,bed,bedroom", OARelation::InsideRoom, "room"),
                ("eq,1,against,desk,wall", OARelation::AgainstWall, "wall"),
                ("eq,1,on,painting,wall", OARelation::OnWall, "wall"),
                ("eq,1,in the middle of,coffee table,living room", OARelation::MiddleRoom, "room"),
            ],
            items: vec![
                item("sofa_0", "loveseat, linen", [2.0, 0.9, 0.8], [2.5, 0.47, 0.0], 0.0, Some("sofa"), Ground, &[Front]),
                item("coffee_table_0", "oval coffee table", [1.0, 0.6, 0.45], [2.5, 1.7, 0.0], 0.0, Some("coffee table"), Ground, &[]),
                item("bed_0", "queen bed, navy cover", [1.4, 2.0, 0.5], [6.5, 2.97, 0.0], PI, Some("bed"), Ground, &[Left, Right])
                    .attrs(&[("bed", "blue", true)]),
                item("nightstand_0", "round side table", [0.4, 0.4, 0.5], [7.45, 3.78, 0.0], PI, Some("nightstand"), Ground, &[Front]),
                item("desk_0", "compact desk", [1.2, 0.6, 0.75], [7.68, 1.0, 0.0], FRAC_PI_2, Some("desk"), Ground, &[Front]),
                item("painting_0", "framed landscape painting", [0.8, 0.04, 0.6], [2.5, 3.98, 1.4], PI, Some("painting"), Wall, &[])
                    .attrs(&[("painting", "abstract", false)]),
                item("ceiling_light_0", "flush ceiling light", [0.5, 0.5, 0.15], [6.5, 2.0, 2.55], 0.0, Some("ceiling light"), Ceiling, &[]),
                item("stool_0", "bar stool", [0.4, 0.4, 0.45], [8.6, 1.5, 0.0], 0.0, Some("stool"), Ground, &[]),
                item("armchair_0", "leather armchair", [0.8, 0.8, 0.8], [4.3, 1.0, 0.08], -FRAC_PI_2, Some("armchair"), Ground, &[Front])
                    .attrs(&[("armchair", "leather", true)]),
            ],
        },
        Case {
            id: "kids_01",
            difficulty: Difficulty::Hard,
            description: "A colorful kids room with a bunk bed against the wall, a toy box with a teddy bear on it, a round rug in the middle of the room in harmony with the bunk bed, a desk with a chair facing it and a shelf on the wall.",
            layout: rect(5.0, 4.0, 2.7),
            counts: &[
                "eq,1,bunk bed",
                "eq,1,toy box",
                "eq,1,desk",
                "eq,1,chair",
                "eq,1,shelf",
                "eq,1,rug",
                "ge,1,teddy bear",
            ],
            attributes: &["eq,1,rug,round", "eq,1,toy box,colorful"],
            oo: &[
                ("eq,1,on,0,toy box,teddy bear", OoAnswer::Types(&[(OORelation::OnTop, None)])),
                ("eq,1,in harmony with,0,rug,bunk bed", OoAnswer::Unmapped("aesthetic judgment, not a spatial relation")),
                ("eq,1,facing,0,desk,chair", OoAnswer::Types(&[(OORelation::Face, None)])),
            ],
            oa: &[
                ("eq,1,against,bunk bed,wall", OARelation::AgainstWall, "wall"),
                ("eq,1,on,shelf,wall", OARelation::OnWall, "wall"),
                ("eq,1,in the middle of,rug,room", OARelation::MiddleRoom, "room"),
            ],
            items: vec![
                item("bunk_bed_0", "wooden bunk bed", [1.0, 2.0, 1.6], [0.52, 1.2, 0.0], 0.0, Some("bunk bed"), Ground, &[Right]),
                item("toy_box_0", "painted toy chest", [0.8, 0.4, 0.4], [2.5, 0.22, 0.0], 0.0, Some("toy box"), Ground, &[Front])
                    .attrs(&[("toy box", "colorful", true)]),
                item("desk_0", "child desk", [1.0, 0.5, 0.7], [4.0, 3.73, 0.0], PI, Some("desk"), Ground, &[Front]),
                item("chair_0", "child chair", [0.4, 0.4, 0.8], [4.0, 3.2, 0.0], 0.0, Some("chair"), Ground, &[Front]),
                item("shelf_0", "floating wall shelf", [0.8, 0.3, 0.12], [2.5, 3.85, 1.5], PI, Some("shelf"), Wall, &[]),
                item("rug_0", "rectangular play mat", [1.6, 1.2, 0.01], [2.5, 2.0, 0.0], 0.0, Some("rug"), Ground, &[])
                    .attrs(&[("rug", "round", false)]),
                item("teddy_bear_0", "teddy bear", [0.3, 0.2, 0.3], [2.5, 0.22, 0.4], 0.0, Some("teddy bear"), Object, &[]),
                item("balloon_0", "helium balloon", [0.3, 0.3, 0.3], [3.0, 2.0, 1.8], 0.0, None, Ground, &[]),
            ],
        },
    ]
}

fn arch_entries(layout: &Layout) -> (Vec<ArchEntry>, Vec<RoomEntry>) {
    let (room, split) = match layout {
        Layout::Rect(r) => (r, None),
        Layout::Studio { room, split } => (room, Some(*split)),
    };
    let (w, d, h) = (room.w, room.d, room.h);
    let rect = |x0: f64, x1: f64| vec![[x0, 0.0, 0.0], [x1, 0.0, 0.0], [x1, d, 0.0], [x0, d, 0.0]];
    let plane = |id: &str, kind: &str, polygon: Vec<[f64; 3]>, normal: Option<[f64; 3]>| ArchEntry {
        id: id.into(),
        kind: kind.into(),
        polygon: Some(polygon),
        mesh: None,
        front_normal: normal,
    };
    let wall = |id: &str, a: [f64; 2], b: [f64; 2], n: [f64; 3]| {
        plane(
            id,
            "wall",
            vec![[a[0], a[1], 0.0], [b[0], b[1], 0.0], [b[0], b[1], h], [a[0], a[1], h]],
            Some(n),
        )
    };
    let mut arch = Vec::new();
    let mut rooms = Vec::new();
    match split {
        None => arch.push(plane("floor", "floor", rect(0.0, w), None)),
        Some(s) => {
            arch.push(plane("floor_living", "floor", rect(0.0, s), None));
            arch.push(plane("floor_bedroom", "floor", rect(s, w), None));
            let ids = |v: &[&str]| Some(v.iter().map(|s| s.to_string()).collect());
            rooms.push(RoomEntry {
                id: "living".into(),
                room_type: "living room".into(),
                floor_ids: vec!["floor_living".into()],
                wall_ids: ids(&["wall_south", "wall_north", "wall_west"]),
            });
            rooms.push(RoomEntry {
                id: "sleeping".into(),
                room_type: "bedroom".into(),
                floor_ids: vec!["floor_bedroom".into()],
                wall_ids: ids(&["wall_south", "wall_east", "wall_north"]),
            });
        }
    }
    arch.push(wall("wall_south", [0.0, 0.0], [w, 0.0], [0.0, 1.0, 0.0]));
    arch.push(wall("wall_east", [w, 0.0], [w, d], [-1.0, 0.0, 0.0]));
    arch.push(wall("wall_north", [w, d], [0.0, d], [0.0, -1.0, 0.0]));
    arch.push(wall("wall_west", [0.0, d], [0.0, 0.0], [1.0, 0.0, 0.0]));
    if room.ceiling {
        arch.push(plane(
            "ceiling",
            "ceiling",
            vec![[0.0, 0.0, h], [0.0, d, h], [w, d, h], [w, 0.0, h]],
            None,
        ));
    }
    (arch, rooms)
}

fn mesh_name(size: [f64; 3]) -> String {
    format!("box_{}x{}x{}.obj", size[0], size[1], size[2])
}

fn obj_text(mesh: &TriMesh) -> String {
    let mut out = String::new();
    for v in mesh.vertices() {
        out.push_str(&format!("v {} {} {}\n", v.x, v.y, v.z));
    }
    for t in mesh.indices() {
        out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    out
}

/// One bundled scene with everything needed to evaluate it in memory.
pub struct SuiteCase {
    pub entry: DatasetEntry,
    pub scene: SceneInstance,
    pub manifest: SceneManifest,
    /// Mesh file name to OBJ text.
    pub meshes: BTreeMap<String, String>,
    pub judge: MockBuilder,
}

impl Case {
    fn entry(&self) -> DatasetEntry {
        let mut e = DatasetEntry {
            id: self.id.into(),
            difficulty: self.difficulty,
            description: self.description.into(),
            counts: Vec::new(),
            attributes: Vec::new(),
            oo_relations: Vec::new(),
            oa_relations: Vec::new(),
        };
        let oo: Vec<&str> = self.oo.iter().map(|o| o.0).collect();
        let oa: Vec<&str> = self.oa.iter().map(|o| o.0).collect();
        for (kind, lines) in [
            (FieldKind::Count, self.counts),
            (FieldKind::Attribute, self.attributes),
            (FieldKind::Oo, &oo[..]),
            (FieldKind::Oa, &oa[..]),
        ] {
            for l in lines {
                match parse_spec_line(kind, l).expect("fixture spec parses") {
                    SpecLine::Count(s) => e.counts.push(s),
                    SpecLine::Attribute(s) => e.attributes.push(s),
                    SpecLine::Oo(s) => e.oo_relations.push(s),
                    SpecLine::Oa(s) => e.oa_relations.push(s),
                }
            }
        }
        e
    }

    fn build(&self) -> SuiteCase {
        let entry = self.entry();
        let (arch, rooms) = arch_entries(&self.layout);
        let objects: Vec<ObjectInstance> = self
            .items
            .iter()
            .map(|it| {
                let mut o = box_on(it.id, it.size, it.at[0], it.at[1], it.at[2], it.yaw);
                o.description = it.desc.into();
                o
            })
            .collect();
        let elements = arch
            .iter()
            .map(|a| {
                let pts = a.polygon.as_ref().unwrap().iter().map(|p| Point3::from(*p)).collect();
                let kind: ArchKind = a.kind.parse().unwrap();
                ArchElement::from_polygon(a.id.clone(), kind, pts, a.front_normal.map(Vector3::from)).unwrap()
            })
            .collect();
        let decls = rooms
            .iter()
            .map(|r| RoomDecl {
                id: r.id.clone(),
                room_type: r.room_type.clone(),
                floor_ids: r.floor_ids.clone(),
                wall_ids: r.wall_ids.clone(),
            })
            .collect();
        let scene = SceneInstance::new(self.id, objects, elements, decls).expect("valid fixture scene");

        let mut meshes = BTreeMap::new();
        let manifest = SceneManifest {
            id: Some(self.id.into()),
            objects: self
                .items
                .iter()
                .zip(&scene.objects)
                .map(|(it, o)| {
                    let name = mesh_name(it.size);
                    meshes.entry(name.clone()).or_insert_with(|| obj_text(&o.mesh));
                    ObjectEntry {
                        id: it.id.into(),
                        mesh: PathBuf::from("meshes").join(name),
                        transform: o.transform.to_row_major(),
                        front_axis: None,
                        frontless: false,
                        description: it.desc.into(),
                        images: None,
                    }
                })
                .collect(),
            architecture: arch,
            rooms,
        };

        let cats = entry_categories(&entry);
        let floor_ids: Vec<String> = scene.floors().map(|f| f.id.clone()).collect();
        let mut judge = MockBuilder::new();
        for (it, o) in self.items.iter().zip(&scene.objects) {
            judge = judge.category(o, &cats, it.category).support(o, it.support).sides(o, it.sides);
            for (cat, attr, ok) in it.attrs {
                judge = judge.attribute(o, cat, attr, *ok);
            }
        }
        for ((_, answer), spec) in self.oo.iter().zip(&entry.oo_relations) {
            judge = match answer {
                OoAnswer::Types(t) => judge.oo(spec, t),
                OoAnswer::Unmapped(reason) => judge.oo_none(spec, reason),
            };
        }
        for ((_, rel, element), spec) in self.oa.iter().zip(&entry.oa_relations) {
            judge = judge.oa(spec, &floor_ids, *rel, element, &[]);
        }
        SuiteCase {
            entry,
            scene,
            manifest,
            meshes,
            judge,
        }
    }
}

/// All six bundled scenes, two per difficulty.
pub fn suite() -> Vec<SuiteCase> {
    cases().iter().map(Case::build).collect()
}

/// Judge table covering every case.
pub fn suite_judge() -> MockJudge {
    let mut all = MockBuilder::new();
    for c in suite() {
        all = all.extend(c.judge);
    }
    all.build()
}

/// Every file of the suite as relative path and contents.
pub fn suite_files() -> BTreeMap<PathBuf, String> {
    let mut files = BTreeMap::new();
    let mut tsv = String::from("# task\tpayload\tresponse\n");
    for c in suite() {
        let e = &c.entry;
        let dir = Path::new("dataset").join(e.difficulty.as_str()).join(&e.id);
        files.insert(dir.join("description.txt"), format!("{}\n", e.description));
        let lines = e.spec_lines();
        for (kind, file) in SPEC_FILES {
            let body: String = lines.iter().filter(|l| l.0 == kind).map(|l| format!("{}\n", l.1)).collect();
            if !body.is_empty() {
                files.insert(dir.join(file), body);
            }
        }
        let sdir = Path::new("scenes").join(&e.id);
        let mut manifest = serde_json::to_string_pretty(&c.manifest).expect("manifest serializes");
        manifest.push('\n');
        files.insert(sdir.join("scene.json"), manifest);
        for (name, text) in &c.meshes {
            files.insert(sdir.join("meshes").join(name), text.clone());
        }
        tsv.push_str(&c.judge.to_tsv());
    }
    files.insert(PathBuf::from("judge.tsv"), tsv);
    files
}

/// Writes the suite under `root`, creating directories as needed.
pub fn write_suite(root: &Path) -> std::io::Result<()> {
    for (rel, text) in suite_files() {
        let path = root.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, text)?;
    }
    Ok(())
}
