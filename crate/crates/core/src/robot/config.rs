use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{JointKind, JointSpec, LinkCollider, Origin, RobotModel};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RobotDoc {
    name: String,
    #[serde(default)]
    base: OriginDoc,
    #[serde(default)]
    ee_offset: OriginDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    self_collision_gap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    home: Option<Vec<f64>>,
    #[serde(rename = "joint")]
    joints: Vec<JointDoc>,
    #[serde(rename = "collider", default)]
    colliders: Vec<ColliderDoc>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OriginDoc {
    #[serde(default)]
    xyz: [f64; 3],
    #[serde(default)]
    rpy: [f64; 3],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JointDoc {
    name: String,
    kind: String,
    axis: [f64; 3],
    #[serde(default)]
    origin: OriginDoc,
    limits: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ColliderDoc {
    link: usize,
    p0: [f64; 3],
    p1: [f64; 3],
    radius: f64,
}

impl From<OriginDoc> for Origin {
    fn from(o: OriginDoc) -> Self {
        Origin {
            xyz: o.xyz,
            rpy: o.rpy,
        }
    }
}

impl From<&Origin> for OriginDoc {
    fn from(o: &Origin) -> Self {
        OriginDoc {
            xyz: o.xyz,
            rpy: o.rpy,
        }
    }
}

/// Parses and validates a robot description document (TOML).
pub fn load_robot(document: &str) -> Result<RobotModel> {
    let doc: RobotDoc = toml::from_str(document).map_err(|e| Error::toml(document, e))?;

    let mut joints = Vec::with_capacity(doc.joints.len());
    for (i, j) in doc.joints.into_iter().enumerate() {
        let kind = match j.kind.as_str() {
            "revolute" => JointKind::Revolute,
            "prismatic" => JointKind::Prismatic,
            other => {
                return Err(Error::invalid(
                    format!("joint[{i}].kind"),
                    format!("expected revolute or prismatic, got `{other}`"),
                ))
            }
        };
        joints.push(JointSpec {
            name: j.name,
            kind,
            axis: Vector3::from(j.axis),
            parent_offset: j.origin.into(),
            limit_lower: j.limits[0],
            limit_upper: j.limits[1],
        });
    }
    let colliders = doc
        .colliders
        .into_iter()
        .map(|c| LinkCollider {
            link_index: c.link,
            local_segment: [Vector3::from(c.p0), Vector3::from(c.p1)],
            radius: c.radius,
        })
        .collect();

    let mut model = RobotModel::new(
        doc.name,
        joints,
        doc.base.into(),
        doc.ee_offset.into(),
        colliders,
    )?;
    if let Some(gap) = doc.self_collision_gap {
        model = model.with_self_collision_gap(gap);
    }
    if let Some(home) = doc.home {
        model = model.with_home(home)?;
    }
    Ok(model)
}

pub fn load_robot_file(path: impl AsRef<Path>) -> Result<RobotModel> {
    load_robot(&std::fs::read_to_string(path)?)
}

/// Writes a model back out in the document format accepted by [`load_robot`].
pub fn serialize_robot(model: &RobotModel) -> String {
    let doc = RobotDoc {
        name: model.name.clone(),
        base: (&model.base_pose).into(),
        ee_offset: (&model.ee_offset).into(),
        self_collision_gap: Some(model.self_collision_gap),
        home: model.home.clone(),
        joints: model
            .joints
            .iter()
            .map(|j| JointDoc {
                name: j.name.clone(),
                kind: j.kind.as_str().to_string(),
                axis: j.axis.into(),
                origin: (&j.parent_offset).into(),
                limits: [j.limit_lower, j.limit_upper],
            })
            .collect(),
        colliders: model
            .colliders
            .iter()
            .map(|c| ColliderDoc {
                link: c.link_index,
                p0: c.local_segment[0].into(),
                p1: c.local_segment[1].into(),
                radius: c.radius,
            })
            .collect(),
    };
    toml::to_string(&doc).expect("robot document serializes")
}
