//! Python bindings. Arrays cross the boundary as nested lists of floats
//! (`n x 3` vertex lists, `m x 3` face lists); numpy arrays are accepted
//! anywhere a list is.

use std::path::PathBuf;

use meshae::eval::{self, ErrorStats, PcaModel, SynthConfig};
use meshae::model::{self, AutoencoderModel, EpochRecord, MeshHierarchy};
use meshae::nn::{Parameterized, TrainConfig};
use meshae::Error;
use ndarray::{Array1, Array2};
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Argument(_) | Error::Topology(_) | Error::Parse { .. } | Error::Format(_) => {
            PyValueError::new_err(e.to_string())
        }
        Error::Io(_) => PyIOError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn matrix(rows: Vec<[f64; 3]>) -> Array2<f64> {
    let n = rows.len();
    Array2::from_shape_vec((n, 3), rows.into_iter().flatten().collect()).expect("n x 3")
}

fn rows(a: &Array2<f64>) -> Vec<Vec<f64>> {
    a.rows().into_iter().map(|r| r.to_vec()).collect()
}

/// Triangle mesh.
#[pyclass(name = "Mesh", module = "meshae", from_py_object)]
#[derive(Clone)]
struct PyMesh {
    inner: meshae::Mesh,
}

#[pymethods]
impl PyMesh {
    #[new]
    fn new(vertices: Vec<[f64; 3]>, faces: Vec<[usize; 3]>) -> PyResult<Self> {
        let inner = meshae::Mesh::new(matrix(vertices), faces).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load_obj(path: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: meshae::Mesh::load_obj(&path).map_err(to_py)?,
        })
    }

    /// 642-vertex unit sphere at `level = 3`.
    #[staticmethod]
    fn icosphere(level: usize) -> Self {
        Self {
            inner: eval::icosphere(level),
        }
    }

    fn save_obj(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save_obj(&path).map_err(to_py)
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn vertices(&self) -> Vec<Vec<f64>> {
        rows(self.inner.vertices())
    }

    #[getter]
    fn faces(&self) -> Vec<[usize; 3]> {
        self.inner.faces().to_vec()
    }

    fn __repr__(&self) -> String {
        format!(
            "Mesh({} vertices, {} faces)",
            self.inner.num_vertices(),
            self.inner.num_faces()
        )
    }
}

/// Returns the coarse mesh and, for each coarse vertex, the source vertex it keeps.
#[pyfunction]
fn decimate(mesh: &PyMesh, target: usize) -> PyResult<(PyMesh, Vec<usize>)> {
    let (coarse, qd) = meshae::sampling::decimate(&mesh.inner, target).map_err(to_py)?;
    Ok((PyMesh { inner: coarse }, qd.kept_indices))
}

/// Mesh pyramid with its sampling matrices and scaled Laplacians.
#[pyclass(name = "Hierarchy", module = "meshae", from_py_object)]
#[derive(Clone)]
struct PyHierarchy {
    inner: MeshHierarchy,
}

#[pymethods]
impl PyHierarchy {
    #[new]
    #[pyo3(signature = (template, levels = 4))]
    fn new(template: &PyMesh, levels: usize) -> PyResult<Self> {
        Ok(Self {
            inner: model::build_hierarchy(&template.inner, levels).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn load(dir: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: MeshHierarchy::load(&dir).map_err(to_py)?,
        })
    }

    fn save(&self, dir: PathBuf) -> PyResult<()> {
        self.inner.save(&dir).map_err(to_py)
    }

    #[getter]
    fn vertex_counts(&self) -> Vec<usize> {
        self.inner.vertex_counts()
    }

    #[getter]
    fn lambda_max(&self) -> Vec<f64> {
        self.inner.lambda_max()
    }

    fn mesh(&self, level: usize) -> PyResult<PyMesh> {
        if level > self.inner.num_levels() {
            return Err(PyValueError::new_err(format!("no level {level}")));
        }
        Ok(PyMesh {
            inner: self.inner.mesh(level).clone(),
        })
    }
}

fn config_from(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<TrainConfig> {
    let mut cfg = TrainConfig::default();
    let Some(kwargs) = kwargs else {
        return Ok(cfg);
    };
    for (key, value) in kwargs.iter() {
        let key: String = key.extract()?;
        match key.as_str() {
            "epochs" => cfg.epochs = value.extract()?,
            "learning_rate" => cfg.learning_rate = value.extract()?,
            "lr_decay" => cfg.lr_decay = value.extract()?,
            "momentum" => cfg.momentum = value.extract()?,
            "l1_weight_penalty" => cfg.l1_weight_penalty = value.extract()?,
            "k_order" => cfg.k_order = value.extract()?,
            "batch_size" => cfg.batch_size = value.extract()?,
            "seed" => cfg.seed = value.extract()?,
            "w_kld" => cfg.w_kld = value.extract()?,
            "z_dim" => cfg.z_dim = value.extract()?,
            "kl_warmup_epochs" => cfg.kl_warmup_epochs = value.extract()?,
            other => return Err(PyValueError::new_err(format!("unknown option `{other}`"))),
        }
    }
    cfg.validate().map_err(to_py)?;
    Ok(cfg)
}

fn frames_of(frames: Vec<Vec<[f64; 3]>>) -> Vec<Array2<f64>> {
    frames.into_iter().map(matrix).collect()
}

fn history_dict<'py>(py: Python<'py>, r: &EpochRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("epoch", r.epoch)?;
    d.set_item("lr", r.lr)?;
    d.set_item("train_l1", r.train_l1)?;
    d.set_item("train_kl", r.train_kl)?;
    d.set_item("train_total", r.train_total)?;
    d.set_item("val_l1", r.val_l1)?;
    Ok(d)
}

/// Convolutional mesh autoencoder bound to one hierarchy.
#[pyclass(name = "Autoencoder", module = "meshae")]
struct PyAutoencoder {
    model: AutoencoderModel,
    hierarchy: MeshHierarchy,
    config: TrainConfig,
}

#[pymethods]
impl PyAutoencoder {
    /// Keyword options are the training config keys (`epochs`,
    /// `learning_rate`, `w_kld`, `z_dim`, ...).
    #[new]
    #[pyo3(signature = (hierarchy, **options))]
    fn new(hierarchy: &PyHierarchy, options: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let config = config_from(options)?;
        let model = model::build_model(&config, &hierarchy.inner).map_err(to_py)?;
        Ok(Self {
            model,
            hierarchy: hierarchy.inner.clone(),
            config,
        })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let ck = model::load_checkpoint(&path).map_err(to_py)?;
        Ok(Self {
            model: ck.model,
            hierarchy: ck.hierarchy,
            config: ck.config.unwrap_or_default(),
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        model::save_checkpoint(&path, &self.model, &self.hierarchy, Some(&self.config)).map_err(to_py)
    }

    /// Trains in place and returns one dict per epoch.
    #[pyo3(signature = (frames, validation = None))]
    fn train<'py>(
        &mut self,
        py: Python<'py>,
        frames: Vec<Vec<[f64; 3]>>,
        validation: Option<Vec<Vec<[f64; 3]>>>,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let train = frames_of(frames);
        let val = frames_of(validation.unwrap_or_default());
        let tv: Vec<_> = train.iter().map(|f| f.view()).collect();
        let vv: Vec<_> = val.iter().map(|f| f.view()).collect();
        let history = py
            .detach(|| model::train_autoencoder(&mut self.model, &self.hierarchy, &tv, &vv, &self.config))
            .map_err(to_py)?;
        history.iter().map(|r| history_dict(py, r)).collect()
    }

    fn encode(&self, vertices: Vec<[f64; 3]>) -> PyResult<Vec<f64>> {
        let enc = self.model.encode(&self.hierarchy, matrix(vertices).view()).map_err(to_py)?;
        Ok(enc.mu.to_vec())
    }

    fn decode(&self, z: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        let z = Array1::from(z);
        Ok(rows(&self.model.decode(&self.hierarchy, z.view()).map_err(to_py)?))
    }

    fn reconstruct(&self, vertices: Vec<[f64; 3]>) -> PyResult<Vec<Vec<f64>>> {
        let out = self
            .model
            .reconstruct(&self.hierarchy, matrix(vertices).view())
            .map_err(to_py)?;
        Ok(rows(&out))
    }

    /// `(j, vertices)` for `j` in -4..=4.
    #[pyo3(signature = (vertices, dim, factor = model::SWEEP_FACTOR))]
    fn sweep(&self, vertices: Vec<[f64; 3]>, dim: usize, factor: f64) -> PyResult<Vec<(i32, Vec<Vec<f64>>)>> {
        let out = model::latent_sweep(&self.model, &self.hierarchy, matrix(vertices).view(), dim, factor)
            .map_err(to_py)?;
        Ok(out.into_iter().map(|(j, v)| (j, rows(&v))).collect())
    }

    #[pyo3(signature = (count, sigma = 3.0, seed = 0))]
    fn sample(&self, count: usize, sigma: f64, seed: u64) -> PyResult<Vec<Vec<Vec<f64>>>> {
        let out = model::sample_gaussian(&self.model, &self.hierarchy, count, sigma, seed).map_err(to_py)?;
        Ok(out.iter().map(rows).collect())
    }

    #[getter]
    fn num_parameters(&self) -> usize {
        self.model.num_parameters()
    }

    #[getter]
    fn z_dim(&self) -> usize {
        self.model.z_dim()
    }

    #[getter]
    fn variational(&self) -> bool {
        self.model.is_variational()
    }

    /// `(stage, rows, cols)` for every encoder and decoder stage.
    fn shape_trace(&self, vertices: Vec<[f64; 3]>) -> PyResult<Vec<(String, usize, usize)>> {
        let trace = self
            .model
            .shape_trace(&self.hierarchy, matrix(vertices).view())
            .map_err(to_py)?;
        Ok(trace
            .into_iter()
            .map(|r| (r.layer.to_string(), r.shape.0, r.shape.1))
            .collect())
    }
}

/// Linear baseline over flattened vertex coordinates.
#[pyclass(name = "Pca", module = "meshae")]
struct PyPca {
    inner: PcaModel,
}

#[pymethods]
impl PyPca {
    #[new]
    #[pyo3(signature = (frames, k = 8))]
    fn new(frames: Vec<Vec<[f64; 3]>>, k: usize) -> PyResult<Self> {
        let frames = frames_of(frames);
        let views: Vec<_> = frames.iter().map(|f| f.view()).collect();
        Ok(Self {
            inner: eval::pca_fit(&views, k).map_err(to_py)?,
        })
    }

    fn reconstruct(&self, vertices: Vec<[f64; 3]>) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows(&self.inner.reconstruct(matrix(vertices).view()).map_err(to_py)?))
    }

    #[getter]
    fn num_parameters(&self) -> usize {
        self.inner.num_parameters()
    }

    #[getter]
    fn singular_values(&self) -> Vec<f64> {
        self.inner.singular_values.clone()
    }
}

/// Per-vertex Euclidean distances between two vertex lists.
#[pyfunction]
fn euclidean_error(pred: Vec<[f64; 3]>, target: Vec<[f64; 3]>) -> PyResult<Vec<f64>> {
    eval::euclidean_error(matrix(pred).view(), matrix(target).view()).map_err(to_py)
}

/// `{"mean", "std", "median", "max", "count"}` of a list of errors.
#[pyfunction]
fn error_stats<'py>(py: Python<'py>, errors: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let s = ErrorStats::from_errors(&errors).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("mean", s.mean)?;
    d.set_item("std", s.std)?;
    d.set_item("median", s.median)?;
    d.set_item("max", s.max)?;
    d.set_item("count", s.count)?;
    Ok(d)
}

/// Seeded synthetic sequences over `template`: a list of `(name, frames)`.
#[pyfunction]
#[pyo3(signature = (template, sequences = 12, frames = 60, seed = 0, amplitude = 1.0))]
fn synthetic_dataset(
    template: &PyMesh,
    sequences: usize,
    frames: usize,
    seed: u64,
    amplitude: f64,
) -> PyResult<Vec<(String, Vec<Vec<Vec<f64>>>)>> {
    let cfg = SynthConfig {
        num_sequences: sequences,
        frames_per_sequence: frames,
        seed,
        amplitude,
    };
    let data = eval::generate_synthetic_dataset(&template.inner, &cfg).map_err(to_py)?;
    Ok(data
        .sequences()
        .iter()
        .map(|s| (s.name.clone(), s.frames.iter().map(rows).collect()))
        .collect())
}

#[pymodule]
#[pyo3(name = "meshae")]
fn meshae_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMesh>()?;
    m.add_class::<PyHierarchy>()?;
    m.add_class::<PyAutoencoder>()?;
    m.add_class::<PyPca>()?;
    m.add_function(wrap_pyfunction!(decimate, m)?)?;
    m.add_function(wrap_pyfunction!(euclidean_error, m)?)?;
    m.add_function(wrap_pyfunction!(error_stats, m)?)?;
    m.add_function(wrap_pyfunction!(synthetic_dataset, m)?)?;
    Ok(())
}
