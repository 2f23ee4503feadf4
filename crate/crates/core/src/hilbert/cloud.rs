use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::point::{metric_slices, HPoint};
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// A recorded nondegenerate fiber: where it sits in the quotient and the
/// recursion level at which it appears.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrancheInfo {
    pub base: f64,
    pub level: usize,
    #[serde(default)]
    pub label: String,
}

/// Builder-supplied metadata carried alongside the samples.
///
/// `base` holds one quotient coordinate per point when the builder knows the
/// monotone map; `tags` index into `tag_names` and drive figure colouring.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CloudMeta {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tranches: Vec<TrancheInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tags: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tag_names: Vec<String>,
}

impl CloudMeta {
    fn is_empty(&self) -> bool {
        *self == CloudMeta::default()
    }
}

/// A nonempty finite sample of a continuum.
///
/// Points are stored row-major, zero padded to a common dimension. `mesh`
/// bounds the distance from any point of the sampled continuum to the
/// nearest sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Cloud<S> {
    label: String,
    mesh: f64,
    dim: usize,
    data: Vec<S>,
    meta: CloudMeta,
}

#[derive(Serialize, Deserialize)]
struct CloudJson {
    label: String,
    mesh: f64,
    dim: usize,
    points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "CloudMeta::is_empty")]
    meta: CloudMeta,
}

impl<S: Real> Cloud<S> {
    pub fn new(label: impl Into<String>, mesh: f64, points: &[HPoint<S>]) -> Result<Self> {
        let dim = points.iter().map(|p| p.dim()).max().unwrap_or(0).max(1);
        let mut data = Vec::with_capacity(points.len() * dim);
        for p in points {
            data.extend_from_slice(p.coords());
            data.extend(std::iter::repeat_n(S::zero(), dim - p.dim()));
        }
        Self::from_flat(label, mesh, dim, data)
    }

    /// Wraps row-major data whose values are already validated.
    pub fn from_flat(label: impl Into<String>, mesh: f64, dim: usize, data: Vec<S>) -> Result<Self> {
        if dim == 0 || data.is_empty() || !data.len().is_multiple_of(dim) {
            return domain("cloud must be nonempty with a positive dimension");
        }
        if !(mesh > 0.0 && mesh.is_finite()) {
            return domain(format!("mesh must be positive, got {mesh}"));
        }
        let tol = S::lit(super::point::COORD_TOL);
        if data.iter().any(|c| !(c.is_finite() && *c >= -tol && *c <= S::one() + tol)) {
            return domain("cloud coordinate outside [0,1]");
        }
        let data = data.into_iter().map(|c| c.max(S::zero()).min(S::one())).collect();
        Ok(Self { label: label.into(), mesh, dim, data, meta: CloudMeta::default() })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn meta(&self) -> &CloudMeta {
        &self.meta
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn point(&self, i: usize) -> &[S] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn hpoint(&self, i: usize) -> HPoint<S> {
        HPoint::raw(self.point(i).to_vec())
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[S]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_mesh(mut self, mesh: f64) -> Self {
        assert!(mesh > 0.0);
        self.mesh = mesh;
        self
    }

    pub fn with_meta(mut self, meta: CloudMeta) -> Result<Self> {
        let n = self.len();
        if meta.base.as_ref().is_some_and(|b| b.len() != n) || meta.tags.as_ref().is_some_and(|t| t.len() != n) {
            return domain("per-point metadata length does not match the cloud");
        }
        self.meta = meta;
        Ok(self)
    }

    pub fn with_tranches(mut self, tranches: Vec<TrancheInfo>) -> Self {
        self.meta.tranches = tranches;
        self
    }

    /// Applies `f` to every point, keeping per-point metadata aligned.
    pub fn map_points(&self, label: impl Into<String>, f: impl Fn(&[S]) -> Vec<S> + Sync) -> Cloud<S> {
        let rows: Vec<Vec<S>> = self.points().collect::<Vec<_>>().par_iter().map(|p| f(p)).collect();
        let dim = rows.iter().map(Vec::len).max().unwrap_or(1).max(1);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for r in &rows {
            data.extend_from_slice(r);
            data.extend(std::iter::repeat_n(S::zero(), dim - r.len()));
        }
        Cloud { label: label.into(), mesh: self.mesh, dim, data, meta: self.meta.clone() }
    }

    pub fn right_shift(&self) -> Cloud<S> {
        self.map_points(format!("theta({})", self.label), |p| {
            std::iter::once(S::zero()).chain(p.iter().copied()).collect()
        })
    }

    /// One half of theta; distances and the mesh shrink by a factor of four.
    pub fn half_shift(&self) -> Cloud<S> {
        let half = S::lit(0.5);
        let mut c = self.map_points(format!("half_theta({})", self.label), |p| {
            std::iter::once(S::zero()).chain(p.iter().map(|&v| v * half)).collect()
        });
        c.mesh = self.mesh / 4.0;
        c
    }

    /// sigma applied pointwise; duplicate images are merged.
    pub fn left_shift(&self) -> Cloud<S> {
        if self.dim == 1 {
            let mut c = self.map_points(format!("sigma({})", self.label), |_| vec![S::zero()]);
            c.mesh = self.mesh * 2.0;
            return c.dedup();
        }
        let mut c = self.map_points(format!("sigma({})", self.label), |p| p[1..].to_vec());
        c.mesh = self.mesh * 2.0;
        c.dedup()
    }

    pub fn truncate(&self, d: usize) -> Cloud<S> {
        let d = d.max(1);
        self.map_points(self.label.clone(), |p| p.iter().take(d).copied().collect()).dedup()
    }

    /// Keeps the first occurrence of each bit-identical point.
    pub fn dedup(self) -> Cloud<S> {
        let mut seen = HashSet::new();
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| seen.insert(self.point(i).iter().map(|c| c.as_f64().to_bits()).collect::<Vec<_>>()))
            .collect();
        if keep.len() == self.len() {
            return self;
        }
        self.select(&keep).expect("dedup keeps at least one point")
    }

    /// The sub-cloud at the given indices, with metadata carried along.
    pub fn select(&self, idx: &[usize]) -> Result<Cloud<S>> {
        if idx.is_empty() {
            return domain(format!("empty selection from {}", self.label));
        }
        let mut data = Vec::with_capacity(idx.len() * self.dim);
        for &i in idx {
            data.extend_from_slice(self.point(i));
        }
        let meta = CloudMeta {
            tranches: self.meta.tranches.clone(),
            base: self.meta.base.as_ref().map(|b| idx.iter().map(|&i| b[i]).collect()),
            tags: self.meta.tags.as_ref().map(|t| idx.iter().map(|&i| t[i]).collect()),
            tag_names: self.meta.tag_names.clone(),
        };
        Ok(Cloud { label: self.label.clone(), mesh: self.mesh, dim: self.dim, data, meta })
    }

    pub fn filter(&self, pred: impl Fn(usize, &[S]) -> bool) -> Result<Cloud<S>> {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| pred(i, self.point(i))).collect();
        self.select(&idx)
    }

    /// Union of clouds; the mesh of the union is the largest part mesh.
    pub fn union(label: impl Into<String>, parts: &[&Cloud<S>]) -> Result<Cloud<S>> {
        if parts.is_empty() {
            return domain("union of no clouds");
        }
        let dim = parts.iter().map(|c| c.dim).max().unwrap();
        let mesh = parts.iter().map(|c| c.mesh).fold(0.0, f64::max);
        let total: usize = parts.iter().map(|c| c.len()).sum();
        let mut data = Vec::with_capacity(total * dim);
        for c in parts {
            for p in c.points() {
                data.extend_from_slice(p);
                data.extend(std::iter::repeat_n(S::zero(), dim - c.dim));
            }
        }
        let base = if parts.iter().all(|c| c.meta.base.is_some()) {
            Some(parts.iter().flat_map(|c| c.meta.base.clone().unwrap()).collect())
        } else {
            None
        };
        let tags = if parts.iter().all(|c| c.meta.tags.is_some()) {
            Some(parts.iter().flat_map(|c| c.meta.tags.clone().unwrap()).collect())
        } else {
            None
        };
        let meta = CloudMeta {
            tranches: parts.iter().flat_map(|c| c.meta.tranches.clone()).collect(),
            base,
            tags,
            tag_names: parts.iter().find(|c| !c.meta.tag_names.is_empty()).map(|c| c.meta.tag_names.clone()).unwrap_or_default(),
        };
        Ok(Cloud { label: label.into(), mesh, dim, data, meta })
    }

    /// Exact diameter by the pairwise loop.
    pub fn diameter(&self) -> S {
        let n = self.len();
        (0..n)
            .into_par_iter()
            .map(|i| {
                let p = self.point(i);
                (i + 1..n).map(|j| metric_slices(p, self.point(j))).fold(S::zero(), S::max)
            })
            .reduce(S::zero, S::max)
    }

    pub fn contains_point(&self, x: &[S], tol: S) -> bool {
        self.points().any(|p| metric_slices(p, x) <= tol)
    }

    pub fn to_f64(&self) -> Cloud<f64> {
        Cloud {
            label: self.label.clone(),
            mesh: self.mesh,
            dim: self.dim,
            data: self.data.iter().map(|c| c.as_f64()).collect(),
            meta: self.meta.clone(),
        }
    }

    /// Rows of the selected coordinates, for CSV export.
    pub fn project(&self, coords: &[usize]) -> Vec<Vec<f64>> {
        self.points()
            .map(|p| coords.iter().map(|&k| p.get(k).map(|c| c.as_f64()).unwrap_or(0.0)).collect())
            .collect()
    }
}

impl Cloud<f64> {
    pub fn to_json(&self) -> String {
        let js = CloudJson {
            label: self.label.clone(),
            mesh: self.mesh,
            dim: self.dim,
            points: self.points().map(<[f64]>::to_vec).collect(),
            meta: self.meta.clone(),
        };
        serde_json::to_string(&js).expect("cloud serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let js: CloudJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let mut data = Vec::with_capacity(js.points.len() * js.dim);
        for p in &js.points {
            if p.len() > js.dim {
                return Err(Error::Parse(format!("point longer than dim {}", js.dim)));
            }
            data.extend_from_slice(p);
            data.extend(std::iter::repeat_n(0.0, js.dim - p.len()));
        }
        Cloud::from_flat(js.label, js.mesh, js.dim, data)?.with_meta(js.meta)
    }

    /// CSV with a header `x0,x1,...` and, when tagged, a trailing `tag` column.
    pub fn to_csv(&self, coords: &[usize]) -> String {
        let mut out = coords.iter().map(|k| format!("x{k}")).collect::<Vec<_>>().join(",");
        let tags = self.meta.tags.as_ref();
        if tags.is_some() {
            out.push_str(",tag");
        }
        out.push('\n');
        for (i, row) in self.project(coords).into_iter().enumerate() {
            out.push_str(&row.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(","));
            if let Some(t) = tags {
                let name = self.meta.tag_names.get(t[i] as usize).map(String::as_str).unwrap_or("");
                out.push(',');
                out.push_str(name);
            }
            out.push('\n');
        }
        out
    }
}
