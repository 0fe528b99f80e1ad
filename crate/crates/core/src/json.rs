//! JSON data-transfer types. Every rational is a "p/q" (or "p") string;
//! floats appear only in σ-value fields. All conversions validate on the
//! way in, so a file that parses also satisfies the library invariants.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::approx::{CosetRole, CosetUnion, CubeApproximation, DensityReport, SynthesisResult};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSignature, Lattice};
use crate::lift::KernelSpec;
use crate::rat::{format_rat, parse_rat, IntMat, Rat, RatMat};
use crate::region::{Cell, Region};
use crate::riesz::{RieszCertificate, UniversalTuple};
use crate::tiling::{FiberConfiguration, MultiplicityProfile};

fn rat_pair(p: &(Rat, Rat)) -> [String; 2] {
    [format_rat(&p.0), format_rat(&p.1)]
}

fn parse_pair(p: &[String; 2]) -> Result<(Rat, Rat)> {
    Ok((parse_rat(&p[0])?, parse_rat(&p[1])?))
}

fn int_to_i64(v: &BigInt) -> Result<i64> {
    v.to_i64()
        .ok_or_else(|| Error::InvalidElement("integer coordinate out of i64 range".into()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignatureDto {
    pub d: usize,
    pub m: usize,
    pub l: usize,
    #[serde(default)]
    pub finite: Vec<u64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub normalized_finite: bool,
}

impl SignatureDto {
    pub fn from_sig(sig: &GroupSignature) -> Self {
        SignatureDto {
            d: sig.real,
            m: sig.int,
            l: sig.torus,
            finite: sig.finite.clone(),
            normalized_finite: sig.normalized_finite,
        }
    }

    pub fn to_sig(&self) -> Result<GroupSignature> {
        Ok(GroupSignature::new(self.d, self.m, self.l, self.finite.clone())?
            .with_normalized_finite(self.normalized_finite))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElementDto {
    #[serde(default)]
    pub real: Vec<String>,
    #[serde(default)]
    pub int: Vec<i64>,
    #[serde(default)]
    pub torus: Vec<String>,
    #[serde(default)]
    pub finite: Vec<u64>,
}

impl ElementDto {
    pub fn from_element(g: &GroupElement) -> Result<Self> {
        Ok(ElementDto {
            real: g.real.iter().map(format_rat).collect(),
            int: g.int.iter().map(int_to_i64).collect::<Result<_>>()?,
            torus: g.torus.iter().map(format_rat).collect(),
            finite: g.finite.clone(),
        })
    }

    pub fn to_element(&self, sig: &GroupSignature) -> Result<GroupElement> {
        GroupElement::new(
            sig.clone(),
            self.real.iter().map(|s| parse_rat(s)).collect::<Result<_>>()?,
            self.int.iter().map(|&v| BigInt::from(v)).collect(),
            self.torus.iter().map(|s| parse_rat(s)).collect::<Result<_>>()?,
            self.finite.clone(),
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeDto {
    pub signature: SignatureDto,
    #[serde(default)]
    pub real_gens: Vec<Vec<String>>,
    #[serde(default)]
    pub int_index: Vec<Vec<i64>>,
    #[serde(default)]
    pub torus_gens: Vec<Vec<String>>,
    #[serde(default)]
    pub finite_gens: Vec<Vec<u64>>,
}

impl LatticeDto {
    pub fn from_lattice(l: &Lattice) -> Result<Self> {
        Ok(LatticeDto {
            signature: SignatureDto::from_sig(&l.sig),
            real_gens: l
                .real_gens
                .rows
                .iter()
                .map(|r| r.iter().map(format_rat).collect())
                .collect(),
            int_index: l
                .int_index
                .rows
                .iter()
                .map(|r| r.iter().map(int_to_i64).collect::<Result<_>>())
                .collect::<Result<_>>()?,
            torus_gens: l
                .torus_gens
                .iter()
                .map(|g| g.iter().map(format_rat).collect())
                .collect(),
            finite_gens: l.finite_gens.clone(),
        })
    }

    pub fn to_lattice(&self) -> Result<Lattice> {
        let sig = self.signature.to_sig()?;
        let real_rows = self
            .real_gens
            .iter()
            .map(|r| r.iter().map(|s| parse_rat(s)).collect::<Result<_>>())
            .collect::<Result<Vec<Vec<Rat>>>>()?;
        let real_gens = if real_rows.is_empty() && sig.real > 0 {
            RatMat::identity(sig.real)
        } else {
            RatMat::new(real_rows)?
        };
        let int_rows: Vec<Vec<i64>> = self.int_index.clone();
        let int_index = if int_rows.is_empty() && sig.int > 0 {
            IntMat::identity(sig.int)
        } else {
            IntMat::from_i64(int_rows)?
        };
        let torus_gens = self
            .torus_gens
            .iter()
            .map(|g| g.iter().map(|s| parse_rat(s)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        Lattice::new(sig, real_gens, int_index, torus_gens, self.finite_gens.clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellDto {
    #[serde(default)]
    pub real: Vec<[String; 2]>,
    #[serde(default)]
    pub int: Vec<i64>,
    #[serde(default)]
    pub torus: Vec<[String; 2]>,
    #[serde(default)]
    pub finite: Vec<u64>,
}

impl CellDto {
    pub fn from_cell(c: &Cell) -> Result<Self> {
        Ok(CellDto {
            real: c.real.iter().map(rat_pair).collect(),
            int: c.int.iter().map(int_to_i64).collect::<Result<_>>()?,
            torus: c.torus.iter().map(rat_pair).collect(),
            finite: c.finite.clone(),
        })
    }

    pub fn to_cell(&self, sig: &GroupSignature) -> Result<Cell> {
        Cell::new(
            sig,
            self.real.iter().map(parse_pair).collect::<Result<_>>()?,
            self.int.iter().map(|&v| BigInt::from(v)).collect(),
            self.torus.iter().map(parse_pair).collect::<Result<_>>()?,
            self.finite.clone(),
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionDto {
    pub signature: SignatureDto,
    pub cells: Vec<CellDto>,
}

impl RegionDto {
    pub fn from_region(r: &Region) -> Result<Self> {
        Ok(RegionDto {
            signature: SignatureDto::from_sig(r.sig()),
            cells: r.cells().iter().map(CellDto::from_cell).collect::<Result<_>>()?,
        })
    }

    pub fn to_region(&self) -> Result<Region> {
        let sig = self.signature.to_sig()?;
        let cells = self
            .cells
            .iter()
            .map(|c| c.to_cell(&sig))
            .collect::<Result<_>>()?;
        Region::from_cells(sig, cells)
    }
}

/// A tuple of group points with its signature spelled out.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TupleDto {
    pub signature: SignatureDto,
    pub points: Vec<ElementDto>,
}

impl TupleDto {
    pub fn from_points(points: &[GroupElement]) -> Result<Self> {
        let sig = points
            .first()
            .map(|p| p.sig.clone())
            .ok_or_else(|| Error::ArityMismatch { expected: 1, got: 0 })?;
        Ok(TupleDto {
            signature: SignatureDto::from_sig(&sig),
            points: points
                .iter()
                .map(ElementDto::from_element)
                .collect::<Result<_>>()?,
        })
    }

    pub fn to_points(&self) -> Result<Vec<GroupElement>> {
        let sig = self.signature.to_sig()?;
        self.points.iter().map(|p| p.to_element(&sig)).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelDto {
    pub ambient: SignatureDto,
    #[serde(default)]
    pub torus_orders: Vec<u64>,
    #[serde(default)]
    pub finite_orders: Vec<u64>,
}

impl KernelDto {
    pub fn to_kernel(&self) -> Result<(GroupSignature, KernelSpec)> {
        let ambient = self.ambient.to_sig()?;
        let kernel = KernelSpec {
            torus_orders: if self.torus_orders.is_empty() {
                vec![1; ambient.torus]
            } else {
                self.torus_orders.clone()
            },
            finite_orders: if self.finite_orders.is_empty() {
                vec![1; ambient.finite.len()]
            } else {
                self.finite_orders.clone()
            },
        };
        kernel.validate(&ambient)?;
        Ok((ambient, kernel))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileEntryDto {
    pub multiplicity: u64,
    pub measure: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileDto {
    pub entries: Vec<ProfileEntryDto>,
    pub total: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
}

impl ProfileDto {
    pub fn from_profile(p: &MultiplicityProfile) -> Self {
        ProfileDto {
            entries: p
                .entries
                .iter()
                .map(|(&m, v)| ProfileEntryDto { multiplicity: m, measure: format_rat(v) })
                .collect(),
            total: format_rat(&p.total()),
            k: p.as_uniform(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigDto {
    pub cell: CellDto,
    pub offsets: Vec<ElementDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_min_sq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_max_sq: Option<f64>,
}

impl ConfigDto {
    pub fn from_config(c: &FiberConfiguration) -> Result<Self> {
        Ok(ConfigDto {
            cell: CellDto::from_cell(&c.cell)?,
            offsets: c
                .offsets
                .iter()
                .map(ElementDto::from_element)
                .collect::<Result<_>>()?,
            sigma_min_sq: None,
            sigma_max_sq: None,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateDto {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub configs: Vec<ConfigDto>,
}

impl CertificateDto {
    pub fn from_certificate(c: &RieszCertificate) -> Result<Self> {
        Ok(CertificateDto {
            a: c.lower,
            b: c.upper,
            configs: c
                .config_bounds
                .iter()
                .map(|cb| {
                    let mut dto = ConfigDto::from_config(&cb.config)?;
                    dto.sigma_min_sq = Some(cb.sigma_min_sq);
                    dto.sigma_max_sq = Some(cb.sigma_max_sq);
                    Ok(dto)
                })
                .collect::<Result<_>>()?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TupleResultDto {
    pub points: TupleDto,
    pub tries: u32,
    pub min_lower: f64,
    pub certificates: Vec<CertificateDto>,
}

impl TupleResultDto {
    pub fn from_tuple(t: &UniversalTuple) -> Result<Self> {
        Ok(TupleResultDto {
            points: TupleDto::from_points(&t.points)?,
            tries: t.tries,
            min_lower: t.min_lower,
            certificates: t
                .certificates
                .iter()
                .map(CertificateDto::from_certificate)
                .collect::<Result<_>>()?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CosetUnionDto {
    #[serde(rename = "H")]
    pub lattice: LatticeDto,
    pub shifts: Vec<ElementDto>,
    pub role: String,
}

impl CosetUnionDto {
    pub fn from_coset_union(j: &CosetUnion) -> Result<Self> {
        Ok(CosetUnionDto {
            lattice: LatticeDto::from_lattice(&j.lattice)?,
            shifts: j
                .shifts
                .iter()
                .map(ElementDto::from_element)
                .collect::<Result<_>>()?,
            role: match j.role {
                CosetRole::Sampling => "sampling".into(),
                CosetRole::Interpolation => "interpolation".into(),
            },
        })
    }

    pub fn to_coset_union(&self) -> Result<CosetUnion> {
        let lattice = self.lattice.to_lattice()?;
        let dual = lattice.sig.clone();
        let shifts = self
            .shifts
            .iter()
            .map(|s| s.to_element(&dual))
            .collect::<Result<_>>()?;
        let role = match self.role.as_str() {
            "interpolation" => CosetRole::Interpolation,
            _ => CosetRole::Sampling,
        };
        Ok(CosetUnion { lattice, shifts, role })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproximationDto {
    pub generation: u32,
    pub k: usize,
    pub centers: Vec<ElementDto>,
    pub region: RegionDto,
    pub defect: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl ApproximationDto {
    pub fn from_approximation(a: &CubeApproximation) -> Result<Self> {
        Ok(ApproximationDto {
            generation: a.generation,
            k: a.centers.len(),
            centers: a
                .centers
                .iter()
                .map(ElementDto::from_element)
                .collect::<Result<_>>()?,
            region: RegionDto::from_region(&a.region)?,
            defect: format_rat(&a.defect),
            warning: a.warning.clone(),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesisDto {
    #[serde(rename = "H")]
    pub lattice: LatticeDto,
    pub shifts: Vec<ElementDto>,
    pub density: String,
    pub certificate: CertificateDto,
    pub approximation: ApproximationDto,
    pub tries: u32,
}

impl SynthesisDto {
    pub fn from_result(r: &SynthesisResult) -> Result<Self> {
        Ok(SynthesisDto {
            lattice: LatticeDto::from_lattice(&r.coset_union.lattice)?,
            shifts: r
                .coset_union
                .shifts
                .iter()
                .map(ElementDto::from_element)
                .collect::<Result<_>>()?,
            density: format_rat(&r.density.value),
            certificate: CertificateDto::from_certificate(&r.certificate)?,
            approximation: ApproximationDto::from_approximation(&r.approximation)?,
            tries: r.tuple.tries,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityDto {
    pub density: String,
    pub k: usize,
    pub covolume: String,
}

impl DensityDto {
    pub fn from_report(j: &CosetUnion, d: &DensityReport) -> Self {
        DensityDto {
            density: format_rat(&d.value),
            k: j.shifts.len(),
            covolume: format_rat(&j.lattice.covolume()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    #[test]
    fn region_roundtrip() {
        let omega = Region::interval(rat_int(0), rat_int(1))
            .unwrap()
            .union(&Region::interval(rat(5, 4), rat(9, 4)).unwrap())
            .unwrap();
        let dto = RegionDto::from_region(&omega).unwrap();
        let text = serde_json::to_string(&dto).unwrap();
        let parsed: RegionDto = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.to_region().unwrap(), omega);
        assert!(text.contains("5/4"));
    }

    #[test]
    fn lattice_roundtrip() {
        let lattice = Lattice::new(
            GroupSignature::new(1, 1, 0, vec![4]).unwrap(),
            RatMat::diagonal(&[rat(1, 2)]),
            IntMat::from_i64(vec![vec![3]]).unwrap(),
            vec![],
            vec![vec![2]],
        )
        .unwrap();
        let dto = LatticeDto::from_lattice(&lattice).unwrap();
        let text = serde_json::to_string(&dto).unwrap();
        let parsed: LatticeDto = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.to_lattice().unwrap(), lattice);
    }

    #[test]
    fn signature_defaults() {
        let parsed: SignatureDto = serde_json::from_str(r#"{"d":1,"m":0,"l":0}"#).unwrap();
        let sig = parsed.to_sig().unwrap();
        assert_eq!(sig.real, 1);
        assert!(!sig.normalized_finite);
    }

    #[test]
    fn malformed_rational_is_an_error() {
        let dto: RegionDto = serde_json::from_str(
            r#"{"signature":{"d":1,"m":0,"l":0},"cells":[{"real":[["0","x"]]}]}"#,
        )
        .unwrap();
        assert!(matches!(dto.to_region(), Err(Error::InvalidRational(_))));
    }
}
