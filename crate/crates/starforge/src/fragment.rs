//! The decidable fragment of fractional ideals of a built model.
//!
//! For a tower model, every ideal in the fragment is (up to the reductions
//! below) a *layered module*: pick a story `k`; the ideal consists of all
//! elements whose story-`k` monomial part has values in a staircase `S`,
//! with the full coefficient field of story `k` and everything in deeper
//! stories. Such a set is a module over the overring `T_k` (the tower from
//! story `k` down), hence in particular an ideal (or fractional ideal) of
//! the model when `S` is suitably bounded.
//!
//! Key facts the operations below encode, each checkable by hand against
//! the pullback description `D = R + M(T)`:
//!
//! * nonzero elements of stories above `k` are units of `T_k`, so they act
//!   invertibly on layered modules at layer `k`;
//! * the largest `T_k`-submodule of the model is the layer-`k` module of
//!   the *cap staircase* `C_k` (the maximal-ideal staircase of story `k`
//!   when `k > 0`, the whole ring staircase when `k = 0`), so a colon with
//!   the model as numerator reduces to a staircase colon against `C_k`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::DomainModel;
use crate::staircase::{Staircase, StaircaseError};
use crate::values::ValueVector;

/// A fractional ideal in the decidable fragment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FragmentIdeal {
    /// The model itself.
    WholeRing,
    /// The layered module at `layer` with staircase `stair` (may be
    /// fractional). Deeper stories are full; the coefficient field of the
    /// layer is full.
    Layered { layer: usize, stair: Staircase },
    /// The directed intersection of the principal ideals `x^n D` for a
    /// fixed `x` of story `layer` with monomial value `value`.
    PowersIntersection { layer: usize, value: ValueVector },
}

/// Errors from fragment arithmetic.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FragmentError {
    #[error(transparent)]
    Staircase(#[from] StaircaseError),
    #[error("operation leaves the decidable fragment: {0}")]
    Unsupported(String),
    #[error("layer {0} has no monomial fragment in this model")]
    NoSuchLayer(usize),
}

/// Serialized form of a fragment ideal; resolved against a model, which
/// supplies the staircase group of each layer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FragmentSpec {
    WholeRing,
    Layered {
        layer: usize,
        generators: Vec<ValueVector>,
    },
    PowersIntersection {
        layer: usize,
        value: ValueVector,
    },
}

impl FragmentSpec {
    /// Resolve against a model.
    pub fn resolve(&self, model: &DomainModel) -> Result<FragmentIdeal, FragmentError> {
        match self {
            FragmentSpec::WholeRing => Ok(FragmentIdeal::WholeRing),
            FragmentSpec::Layered { layer, generators } => {
                let g = model
                    .story_group(*layer)
                    .ok_or(FragmentError::NoSuchLayer(*layer))?;
                let stair = Staircase::new(g, generators.clone())?;
                Ok(FragmentIdeal::Layered {
                    layer: *layer,
                    stair,
                })
            }
            FragmentSpec::PowersIntersection { layer, value } => {
                model
                    .story_group(*layer)
                    .ok_or(FragmentError::NoSuchLayer(*layer))?;
                Ok(FragmentIdeal::PowersIntersection {
                    layer: *layer,
                    value: value.clone(),
                })
            }
        }
    }
}

impl FragmentIdeal {
    /// Human-readable form for computation traces.
    #[must_use]
    pub fn describe(&self) -> String {
        match self {
            FragmentIdeal::WholeRing => "the whole ring".to_string(),
            FragmentIdeal::Layered { layer, stair } => {
                let gens: Vec<String> = stair
                    .minimal_generators()
                    .iter()
                    .map(|v| format!("{v:?}"))
                    .collect();
                format!("layer-{layer} module <{}>", gens.join(", "))
            }
            FragmentIdeal::PowersIntersection { layer, value } => {
                format!(
                    "intersection of powers of the layer-{layer} principal at {value:?}"
                )
            }
        }
    }

    /// Canonicalize: the layer-0 ring staircase is the whole ring.
    #[must_use]
    pub fn normalized(self) -> FragmentIdeal {
        match &self {
            FragmentIdeal::Layered { layer: 0, stair } if stair.is_ring() => {
                FragmentIdeal::WholeRing
            }
            _ => self,
        }
    }

    /// Equality as sets (after normalization).
    #[must_use]
    pub fn same_as(&self, other: &FragmentIdeal) -> bool {
        self.clone().normalized() == other.clone().normalized()
    }

    /// Whether the fragment is contained in the model (an integral ideal).
    pub fn is_integral(&self, model: &DomainModel) -> Result<bool, FragmentError> {
        match self {
            FragmentIdeal::WholeRing => Ok(true),
            FragmentIdeal::PowersIntersection { value, .. } => {
                Ok(value.iter().all(|&c| c >= 0))
            }
            FragmentIdeal::Layered { layer, stair } => {
                let cap = cap_staircase(model, *layer)?;
                // At layer 0 nothing sits above, so the cap is already the
                // ring staircase; deeper layers must stay inside the story's
                // maximal module to avoid leaking coefficient-field constants.
                Ok(stair.subset_of(&cap)?)
            }
        }
    }

    /// Whether the fragment equals the model.
    pub fn is_whole_ring(&self, model: &DomainModel) -> Result<bool, FragmentError> {
        match self {
            FragmentIdeal::WholeRing => Ok(true),
            FragmentIdeal::Layered { layer, stair } => {
                Ok(*layer == effective_top_layer(model)? && stair.is_ring())
            }
            FragmentIdeal::PowersIntersection { .. } => Ok(false),
        }
    }

    /// Sum of two fragments.
    pub fn sum(&self, other: &FragmentIdeal, model: &DomainModel) -> Result<FragmentIdeal, FragmentError> {
        use FragmentIdeal::{Layered, PowersIntersection, WholeRing};
        match (self, other) {
            (WholeRing, _) | (_, WholeRing) => Ok(WholeRing),
            (PowersIntersection { .. }, _) | (_, PowersIntersection { .. }) => Err(
                FragmentError::Unsupported("sum involving a directed intersection".into()),
            ),
            (
                Layered { layer: j, stair: s },
                Layered { layer: k, stair: t },
            ) => {
                if j == k {
                    return Ok(Layered {
                        layer: *j,
                        stair: s.sum(t)?,
                    }
                    .normalized());
                }
                // The shallower layered module already contains the deeper
                // stories in full, so it absorbs any deeper module that
                // stays inside the deeper story's maximal part.
                let (sh_layer, sh, dp_layer, dp) =
                    if j < k { (j, s, k, t) } else { (k, t, j, s) };
                let cap = cap_staircase(model, *dp_layer)?;
                if dp.subset_of(&cap)? {
                    Ok(Layered {
                        layer: *sh_layer,
                        stair: sh.clone(),
                    })
                } else {
                    Err(FragmentError::Unsupported(format!(
                        "sum of layered modules at layers {sh_layer} and {dp_layer} with a deeper part outside the maximal module"
                    )))
                }
            }
        }
    }

    /// Product of two fragments.
    pub fn product(
        &self,
        other: &FragmentIdeal,
        model: &DomainModel,
    ) -> Result<FragmentIdeal, FragmentError> {
        use FragmentIdeal::{Layered, PowersIntersection, WholeRing};
        match (self, other) {
            (WholeRing, x) | (x, WholeRing) => Ok(x.clone()),
            (PowersIntersection { .. }, _) | (_, PowersIntersection { .. }) => Err(
                FragmentError::Unsupported("product involving a directed intersection".into()),
            ),
            (
                Layered { layer: j, stair: s },
                Layered { layer: k, stair: t },
            ) => {
                if j == k {
                    return Ok(Layered {
                        layer: *j,
                        stair: s.product(t)?,
                    }
                    .normalized());
                }
                // Nonzero elements of shallower stories are units of the
                // deeper overring, so an integral shallower factor acts as a
                // unit on a deeper layered module.
                let (sh_layer, sh, dp_layer, dp) =
                    if j < k { (j, s, k, t) } else { (k, t, j, s) };
                let shallow = Layered {
                    layer: *sh_layer,
                    stair: sh.clone(),
                };
                if shallow.is_integral(model)? {
                    Ok(Layered {
                        layer: *dp_layer,
                        stair: dp.clone(),
                    })
                } else {
                    Err(FragmentError::Unsupported(format!(
                        "product of a fractional layer-{sh_layer} module with a layer-{dp_layer} module"
                    )))
                }
            }
        }
    }

    /// Intersection of two fragments.
    pub fn intersect(
        &self,
        other: &FragmentIdeal,
        model: &DomainModel,
    ) -> Result<FragmentIdeal, FragmentError> {
        use FragmentIdeal::{Layered, PowersIntersection, WholeRing};
        match (self, other) {
            (WholeRing, x) | (x, WholeRing) => {
                if x.is_integral(model)? {
                    Ok(x.clone())
                } else {
                    Err(FragmentError::Unsupported(
                        "intersection of the ring with a fractional module".into(),
                    ))
                }
            }
            (PowersIntersection { .. }, _) | (_, PowersIntersection { .. }) => Err(
                FragmentError::Unsupported(
                    "intersection involving a directed intersection".into(),
                ),
            ),
            (
                Layered { layer: j, stair: s },
                Layered { layer: k, stair: t },
            ) => {
                if j == k {
                    return Ok(Layered {
                        layer: *j,
                        stair: s.intersect(t)?,
                    }
                    .normalized());
                }
                // The deeper part of the shallower module is the full cap
                // module of every deeper story, so the intersection is the
                // deeper module clipped to its cap.
                let (_, _, dp_layer, dp) = if j < k { (j, s, k, t) } else { (k, t, j, s) };
                let cap = cap_staircase(model, *dp_layer)?;
                Ok(Layered {
                    layer: *dp_layer,
                    stair: dp.intersect(&cap)?,
                })
            }
        }
    }

    /// Containment test (as subsets of the fraction field).
    ///
    /// Cross-layer cases use the structural facts from the module docs:
    /// a layered module contains the whole ring exactly when its staircase
    /// contains the zero vector, and a deeper module sits inside a shallower
    /// one exactly when it stays inside its story's maximal module.
    pub fn subset_of(
        &self,
        other: &FragmentIdeal,
        model: &DomainModel,
    ) -> Result<bool, FragmentError> {
        use FragmentIdeal::{Layered, PowersIntersection, WholeRing};
        match (self, other) {
            (WholeRing, WholeRing) => Ok(true),
            (WholeRing, Layered { stair, .. }) => {
                Ok(Staircase::ring(stair.group().clone()).subset_of(stair)?)
            }
            (Layered { .. }, WholeRing) => self.is_integral(model),
            (PowersIntersection { .. }, _) | (_, PowersIntersection { .. }) => Err(
                FragmentError::Unsupported(
                    "containment involving a directed intersection".into(),
                ),
            ),
            (
                Layered { layer: j, stair: s },
                Layered { layer: k, stair: t },
            ) => {
                if j == k {
                    Ok(s.subset_of(t)?)
                } else if j < k {
                    // Shallower inside deeper: the deeper module must
                    // contain the ring (its coefficient field covers every
                    // shallower element, its deep part covers the rest).
                    Ok(Staircase::ring(t.group().clone()).subset_of(t)?)
                } else {
                    // Deeper inside shallower: must stay inside the deeper
                    // story's maximal module, which the shallower module
                    // contains in full.
                    let cap = cap_staircase(model, *j)?;
                    Ok(s.subset_of(&cap)?)
                }
            }
        }
    }

    /// Same-layer colon `(A : B)`; `WholeRing` numerators are the inverse.
    pub fn colon(
        &self,
        other: &FragmentIdeal,
        model: &DomainModel,
    ) -> Result<FragmentIdeal, FragmentError> {
        use FragmentIdeal::{Layered, WholeRing};
        match (self, other) {
            (WholeRing, _) => other.inverse(model),
            (_, WholeRing) => {
                // (A : D) = A for a D-module.
                Ok(self.clone())
            }
            (
                Layered { layer: j, stair: s },
                Layered { layer: k, stair: t },
            ) if j == k => Ok(Layered {
                layer: *j,
                stair: s.colon(t, true)?,
            }
            .normalized()),
            _ => Err(FragmentError::Unsupported(
                "colon of modules at different layers".into(),
            )),
        }
    }

    /// Whether an *integral* fragment ideal contains a unit of the model
    /// (equivalently, equals the model).
    pub fn contains_unit(&self, model: &DomainModel) -> Result<bool, FragmentError> {
        self.is_whole_ring(model)
    }

    /// Fractional inverse `(D : I)`.
    ///
    /// For a layered module at layer `k` this is the layered module of the
    /// staircase colon `(C_k : S)`, where `C_k` is the cap staircase: the
    /// inverse is the largest set multiplying `I` into the model, the image
    /// of the multiplication is a `T_k`-module, and the largest
    /// `T_k`-module inside the model is the cap module.
    pub fn inverse(&self, model: &DomainModel) -> Result<FragmentIdeal, FragmentError> {
        match self {
            FragmentIdeal::WholeRing => Ok(FragmentIdeal::WholeRing),
            FragmentIdeal::PowersIntersection { .. } => Err(FragmentError::Unsupported(
                "inverse of a directed intersection (handled by closure rules)".into(),
            )),
            FragmentIdeal::Layered { layer, stair } => {
                let cap = cap_staircase(model, *layer)?;
                Ok(FragmentIdeal::Layered {
                    layer: *layer,
                    stair: cap.colon(stair, true)?,
                }
                .normalized())
            }
        }
    }

    /// Divisorial closure `I^v = (D : (D : I))`.
    pub fn v_closure(&self, model: &DomainModel) -> Result<FragmentIdeal, FragmentError> {
        self.inverse(model)?.inverse(model)
    }
}

/// The cap staircase `C_k` of a model layer (see module docs).
pub fn cap_staircase(model: &DomainModel, layer: usize) -> Result<Staircase, FragmentError> {
    model
        .cap_staircase(layer)
        .ok_or(FragmentError::NoSuchLayer(layer))
}

/// The layer whose ring staircase represents the whole model: the top
/// positive-dimensional story, but only when no field story sits above it
/// (a field-topped tower is strictly smaller than its positive part).
fn effective_top_layer(model: &DomainModel) -> Result<usize, FragmentError> {
    if let Some(stories) = model.stories() {
        let top = stories
            .first()
            .ok_or_else(|| FragmentError::Unsupported("empty tower".into()))?;
        if top.atom.dim() > 0 {
            Ok(0)
        } else {
            // A field story on top: the ring is strictly smaller than every
            // layered module, so no layered representation equals it.
            Ok(usize::MAX)
        }
    } else if model.story_group(0).is_some() {
        Ok(0)
    } else {
        Err(FragmentError::Unsupported(
            "fragment arithmetic requires a tower or localized polynomial-extension model".into(),
        ))
    }
}
