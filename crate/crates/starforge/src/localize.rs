//! Localization of a built model at a named prime, as description rewrites.
//!
//! Localization never computes with elements: each supported shape/prime
//! pair has an exact rewrite to a new description, which is then rebuilt.
//! Primes that exist only as symbolic families must be refined to a named
//! representative before localizing.

use crate::domain::{
    Atom, BuildError, DomainDesc, DomainModel, ModelShape, MonomialKind, PrimeOrigin,
};
use crate::values::{self, ValueGroupDesc};

/// Recover a description for a single atom.
fn atom_desc(a: &Atom) -> DomainDesc {
    match a {
        Atom::Field {
            label,
            algebraically_closed,
            real_closed,
        } => DomainDesc::Field {
            label: label.clone(),
            subfield_of: vec![],
            algebraically_closed: *algebraically_closed,
            real_closed: *real_closed,
        },
        Atom::Valuation {
            group,
            residue,
            fraction,
        } => DomainDesc::Valuation {
            group: group.clone(),
            residue_field: residue.clone(),
            fraction_field: fraction.clone(),
        },
        Atom::Monomial { kind, coeff } => DomainDesc::Monomial {
            atom: kind.clone(),
            coefficient_field: coeff.clone(),
        },
    }
}

/// Localize the atom of one story at a prime of the given height within
/// that atom (strictly below the atom's maximal ideal).
fn localize_atom(
    atom: &Atom,
    height_within: usize,
    coord: Option<usize>,
    prime: &str,
) -> Result<Atom, BuildError> {
    match atom {
        Atom::Valuation {
            group,
            residue: _,
            fraction,
        } => {
            let h = group.rank() - height_within;
            let q = values::quotient_by_convex(group, h)
                .map_err(|_| BuildError::UnsupportedLocalization(prime.to_string()))?;
            Ok(Atom::Valuation {
                group: q,
                residue: format!("{fraction}/{prime}"),
                fraction: fraction.clone(),
            })
        }
        Atom::Monomial { kind, coeff } => match (kind, coord) {
            (
                MonomialKind::PowerSeries { vars } | MonomialKind::LocalizedPolynomial { vars },
                Some(i),
            ) if height_within == 1 => {
                // Localizing at a coordinate prime gives a discrete rank-1
                // valuation; its residue field is the coefficient field with
                // the remaining variables adjoined.
                let names = kind.var_names();
                let rest: Vec<&str> = names
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, v)| *v)
                    .collect();
                let residue = if rest.is_empty() {
                    coeff.clone()
                } else {
                    format!("{coeff}(({}))", rest.join(","))
                };
                let _ = vars;
                Ok(Atom::Valuation {
                    group: ValueGroupDesc::lex_z(1),
                    residue,
                    fraction: atom.fraction_label(),
                })
            }
            _ => Err(BuildError::UnsupportedLocalization(prime.to_string())),
        },
        Atom::Field { .. } => Err(BuildError::UnsupportedLocalization(prime.to_string())),
    }
}

/// Merge a head valuation atom with deeper all-valuation stories into a
/// single composite valuation atom, when the gluing fields make the
/// composite a valuation ring (fraction field equals residue field at every
/// junction).
fn try_merge_valuations(head: &Atom, deeper: &[Atom]) -> Option<Atom> {
    let mut total_rank = match head {
        Atom::Valuation { group, .. } => group.rank(),
        _ => return None,
    };
    let mut fraction_below = match head {
        Atom::Valuation { fraction, .. } => fraction.clone(),
        _ => return None,
    };
    for a in deeper {
        match a {
            Atom::Valuation {
                group,
                residue,
                fraction,
            } => {
                if *residue != fraction_below {
                    return None;
                }
                total_rank += group.rank();
                fraction_below = fraction.clone();
            }
            _ => return None,
        }
    }
    let residue = head.residue_label();
    Some(Atom::Valuation {
        group: ValueGroupDesc::lex_z(total_rank),
        residue,
        fraction: fraction_below,
    })
}

/// Rewrite a model into the description of its localization at `prime`.
pub fn localize(model: &DomainModel, prime: &str) -> Result<DomainDesc, BuildError> {
    let (_, node) = model
        .spectrum
        .by_name(prime)
        .ok_or_else(|| BuildError::UnknownPrime(prime.to_string()))?;
    if node.family.is_some() {
        return Err(BuildError::SymbolicFamily(prime.to_string()));
    }
    match (&model.shape, &node.origin) {
        (_, PrimeOrigin::Zero) => {
            // The fraction field of the whole model.
            let label = match &model.shape {
                ModelShape::Tower(stories) => stories
                    .last()
                    .map(|s| s.atom.fraction_label())
                    .unwrap_or_else(|| "K".into()),
                ModelShape::PolyExt { fraction, .. } => format!("{fraction}(X)"),
                ModelShape::PolyExtLocal { .. } => "K(X)".into(),
                ModelShape::Nagata { .. } => {
                    return Err(BuildError::UnsupportedLocalization(prime.to_string()))
                }
            };
            Ok(DomainDesc::Field {
                label,
                subfield_of: vec![],
                algebraically_closed: false,
                real_closed: false,
            })
        }
        (ModelShape::Tower(stories), PrimeOrigin::Story { story, height_within, coord }) => {
            let k = *story;
            let atoms: Vec<Atom> = stories.iter().map(|s| s.atom.clone()).collect();
            let d_k = atoms[k].dim();
            if *height_within == d_k {
                // Localizing at the maximal ideal of story k. Everything
                // above collapses to its fraction field.
                if k == 0 || atoms[..k].iter().all(|a| a.is_field()) {
                    // Already the maximal ideal of the model.
                    return Ok(model.desc.clone());
                }
                let cap = atoms[k - 1].fraction_label();
                let below: Vec<DomainDesc> = atoms[k..].iter().map(atom_desc).collect();
                if cap == atoms[k].residue_label() {
                    if below.len() == 1 {
                        Ok(below.into_iter().next().unwrap())
                    } else {
                        Ok(DomainDesc::Tower { stories: below })
                    }
                } else {
                    let mut v = vec![DomainDesc::Field {
                        label: cap,
                        subfield_of: vec![],
                        algebraically_closed: false,
                        real_closed: false,
                    }];
                    v.extend(below);
                    Ok(DomainDesc::Tower { stories: v })
                }
            } else {
                // A prime strictly inside story k's atom: the upper stories
                // collapse, the atom localizes, the deeper stories remain.
                let head = localize_atom(&atoms[k], *height_within, *coord, prime)?;
                let deeper = &atoms[k + 1..];
                if deeper.is_empty() {
                    return Ok(atom_desc(&head));
                }
                if let Some(merged) = try_merge_valuations(&head, deeper) {
                    return Ok(atom_desc(&merged));
                }
                let mut v = vec![atom_desc(&head)];
                v.extend(deeper.iter().map(atom_desc));
                Ok(DomainDesc::Tower { stories: v })
            }
        }
        (
            ModelShape::PolyExt {
                group,
                prime_height,
                ..
            },
            PrimeOrigin::Special("extended-prime"),
        ) => Ok(DomainDesc::PolyExtLocal {
            group: group.clone(),
            prime_height: *prime_height,
        }),
        (ModelShape::PolyExtLocal { .. }, PrimeOrigin::Special("extended-maximal")) => {
            Ok(model.desc.clone())
        }
        _ => Err(BuildError::UnsupportedLocalization(prime.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::build;

    fn tower4_desc() -> DomainDesc {
        DomainDesc::Tower {
            stories: vec![
                DomainDesc::Valuation {
                    group: ValueGroupDesc::lex_z(1),
                    residue_field: "F_p".into(),
                    fraction_field: "Q".into(),
                },
                DomainDesc::Monomial {
                    atom: MonomialKind::PowerSeries { vars: 2 },
                    coefficient_field: "Q".into(),
                },
                DomainDesc::Valuation {
                    group: ValueGroupDesc::lex_z(1),
                    residue_field: "Q((X,Y))".into(),
                    fraction_field: "L".into(),
                },
            ],
        }
    }

    #[test]
    fn localize_at_conductor_gives_overring() {
        let model = build(&tower4_desc()).unwrap();
        // Q is the maximal ideal of the part below the top valuation story;
        // the top story's fraction field Q equals the residue field there,
        // so the localization is the overring itself.
        let got = localize(&model, "Q").unwrap();
        match got {
            DomainDesc::Tower { stories } => {
                assert_eq!(stories.len(), 2);
                assert!(matches!(stories[0], DomainDesc::Monomial { .. }));
            }
            other => panic!("unexpected rewrite: {other:?}"),
        }
    }

    #[test]
    fn localize_at_coordinate_prime_gives_composite_valuation() {
        let model = build(&tower4_desc()).unwrap();
        let got = localize(&model, "X").unwrap();
        match got {
            DomainDesc::Valuation { group, .. } => {
                assert_eq!(group, ValueGroupDesc::lex_z(2));
            }
            other => panic!("unexpected rewrite: {other:?}"),
        }
    }

    #[test]
    fn localize_with_proper_residue_extension_keeps_a_field_story() {
        // Z_(p) + X R[[X]]: localizing at the conductor gives Q + X R[[X]].
        let desc = DomainDesc::Tower {
            stories: vec![
                DomainDesc::Valuation {
                    group: ValueGroupDesc::lex_z(1),
                    residue_field: "F_p".into(),
                    fraction_field: "Q".into(),
                },
                DomainDesc::Monomial {
                    atom: MonomialKind::PowerSeries { vars: 1 },
                    coefficient_field: "R".into(),
                },
            ],
        };
        let model = build(&desc).unwrap();
        let got = localize(&model, "Q").unwrap();
        match got {
            DomainDesc::Tower { stories } => {
                assert!(
                    matches!(&stories[0], DomainDesc::Field { label, .. } if label == "Q")
                );
                assert!(matches!(stories[1], DomainDesc::Monomial { .. }));
            }
            other => panic!("unexpected rewrite: {other:?}"),
        }
    }

    #[test]
    fn localize_at_family_and_unknown_fail_cleanly() {
        let model = build(&tower4_desc()).unwrap();
        assert!(matches!(
            localize(&model, "H1"),
            Err(BuildError::SymbolicFamily(_))
        ));
        assert!(matches!(
            localize(&model, "nope"),
            Err(BuildError::UnknownPrime(_))
        ));
    }
}
