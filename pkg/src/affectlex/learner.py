"""Linear soft-margin SVM and majority-class baseline, one model per trait."""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path

import numpy as np

from .audit import Phase, record_reads
from .corpus import Label
from .errors import ModelFormatError, SchemaMismatchError, TrainingError
from .features import FeatureMatrix, FeatureSchema, FeatureVector
from .tabular import Provenance, format_float, parse_float, read_lines, split_preamble, write_lines

logger = logging.getLogger(__name__)


DEFAULT_C = 1.0
DEFAULT_EPOCHS = 200
DEFAULT_TOLERANCE = 1e-5

# Curvature floor for non-positive-definite pairs in working-set selection
TAU = 1e-12

BIAS_ROW = "bias"


class Solver(StrEnum):
    """Optimizer used for the weight vector.

    SMO solves the dual exactly to a KKT tolerance; the subgradient solver
    runs a fixed number of shuffled primal passes.
    """

    SMO = "smo"
    SUBGRADIENT = "subgradient"


@dataclass(frozen=True)
class SvmParams:
    C: float = DEFAULT_C
    epochs: int = DEFAULT_EPOCHS
    seed: int = 0
    solver: Solver = Solver.SMO
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        if not (self.C > 0 and math.isfinite(self.C)):
            raise TrainingError(f"C must be a positive real, got {self.C!r}")
        if self.epochs < 1:
            raise TrainingError(f"epochs must be at least 1, got {self.epochs}")
        object.__setattr__(self, "solver", Solver(self.solver))


@dataclass(frozen=True, eq=False)
class Standardizer:
    """Per-feature mean and population standard deviation."""

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, values: np.ndarray) -> Standardizer:
        return cls(values.mean(axis=0), values.std(axis=0))

    @property
    def constant(self) -> np.ndarray:
        """Mask of features that did not vary in the training data."""
        return self.std == 0

    def transform(self, values: np.ndarray) -> np.ndarray:
        scale = np.where(self.constant, 1.0, self.std)
        z = (values - self.mean) / scale
        z[..., self.constant] = 0.0
        return z


@dataclass(frozen=True, eq=False)
class TrainedModel:
    """A linear decision function over standardized features."""

    trait: str
    feature_names: tuple[str, ...]
    schema_hash: str
    weights: np.ndarray
    bias: float
    scaling: Standardizer
    params: SvmParams

    def __post_init__(self):
        n = len(self.feature_names)
        if self.weights.shape != (n,) or self.scaling.mean.shape != (n,):
            raise ValueError("weights and scaling must align with the feature names")
        if np.any(self.scaling.std < 0):
            raise ValueError("standard deviations must be non-negative")

    @property
    def constant_features(self) -> tuple[str, ...]:
        return tuple(
            name for name, flag in zip(self.feature_names, self.scaling.constant) if flag
        )

    def decision(self, values: np.ndarray) -> np.ndarray:
        """Margins w . standardize(x) + b for raw feature rows."""
        return self.scaling.transform(values) @ self.weights + self.bias

    def predict_many(self, X: FeatureMatrix | Sequence[FeatureVector]) -> list[Prediction]:
        schema, values = _as_array(X)
        self._check_schema(schema)
        return [Prediction.from_margin(float(m)) for m in self.decision(values)]

    def _check_schema(self, schema: FeatureSchema) -> None:
        if schema.hash != self.schema_hash:
            raise SchemaMismatchError(
                f"{self.trait} model was trained on schema {self.schema_hash}, "
                f"got features with schema {schema.hash}"
            )


@dataclass(frozen=True)
class MajorityModel:
    """Always predicts the label that was most frequent in training."""

    trait: str
    label: Label

    def predict_many(self, X: FeatureMatrix | Sequence[FeatureVector]) -> list[Prediction]:
        return [Prediction(self.label, float(self.label.sign))] * len(X)


@dataclass(frozen=True)
class Prediction:
    label: Label
    margin: float

    @classmethod
    def from_margin(cls, margin: float) -> Prediction:
        # A margin of exactly zero predicts yes
        return cls(Label.YES if margin >= 0 else Label.NO, margin)


def _as_array(X: FeatureMatrix | Sequence[FeatureVector]) -> tuple[FeatureSchema, np.ndarray]:
    if isinstance(X, FeatureMatrix):
        return X.schema, X.values
    if not X:
        raise TrainingError("no feature vectors")
    schema = X[0].schema
    for vector in X:
        if vector.schema.hash != schema.hash:
            raise SchemaMismatchError("feature vectors use different schemas")
    return schema, np.array([v.values for v in X], dtype=float).reshape(len(X), len(schema))


def _signs(y: Sequence[Label]) -> np.ndarray:
    return np.array([Label(label).sign for label in y], dtype=float)


def primal_objective(
    weights: np.ndarray, bias: float, Z: np.ndarray, signs: np.ndarray, C: float
) -> float:
    """(1/2)|w|^2 + C * sum of hinge losses on standardized rows."""
    hinge = np.maximum(0.0, 1.0 - signs * (Z @ weights + bias))
    return 0.5 * float(weights @ weights) + C * math.fsum(hinge)


def hinge_loss(model: TrainedModel, X: FeatureMatrix | Sequence[FeatureVector], y: Sequence[Label]) -> float:
    """Sum of hinge losses of a model on raw feature rows."""
    schema, values = _as_array(X)
    model._check_schema(schema)
    return math.fsum(np.maximum(0.0, 1.0 - _signs(y) * model.decision(values)))


def training_objective(
    model: TrainedModel, X: FeatureMatrix | Sequence[FeatureVector], y: Sequence[Label]
) -> float:
    schema, values = _as_array(X)
    model._check_schema(schema)
    Z = model.scaling.transform(values)
    return primal_objective(model.weights, model.bias, Z, _signs(y), model.params.C)


# Solvers


def optimal_bias(margins: np.ndarray, signs: np.ndarray) -> float:
    """Bias minimizing sum max(0, 1 - y(m + b)) for fixed margins m.

    The loss is piecewise linear with kinks at b = y - m, so a minimizer is
    among the kinks. When the minimum is flat the midpoint of the flat
    interval is returned.
    """
    kinks = np.unique(signs - margins)
    losses = np.maximum(
        0.0, 1.0 - signs[None, :] * (margins[None, :] + kinks[:, None])
    ).sum(axis=1)
    best = losses.min()
    flat = kinks[losses <= best + 1e-12 * max(1.0, abs(best))]
    return float((flat.min() + flat.max()) / 2)


def _smo(
    K: np.ndarray, signs: np.ndarray, C: float, tolerance: float
) -> tuple[np.ndarray, int]:
    """Dual coordinate pairs with second-order working-set selection.

    Solves min (1/2) a'Qa - sum(a), 0 <= a <= C, y'a = 0 with Q = yy' * K.
    Returns the dual variables and the number of iterations taken.
    """
    n = len(signs)
    alpha = np.zeros(n)
    gradient = -np.ones(n)
    diag = np.diag(K).copy()
    positive = signs > 0
    max_iter = max(100 * n, 100_000)

    for iteration in range(max_iter):
        violation = -signs * gradient
        up = np.where(positive, alpha < C, alpha > 0)
        low = np.where(positive, alpha > 0, alpha < C)
        if not up.any() or not low.any():
            return alpha, iteration
        up_scores = np.where(up, violation, -np.inf)
        i = int(np.argmax(up_scores))
        m = up_scores[i]
        if m - np.where(low, violation, np.inf).min() < tolerance:
            return alpha, iteration

        b = m - violation
        candidates = low & (b > 0)
        a = diag[i] + diag - 2.0 * K[i]
        a = np.where(a > 0, a, TAU)
        gain = np.where(candidates, -(b * b) / a, np.inf)
        j = int(np.argmin(gain))

        cap_i = C - alpha[i] if positive[i] else alpha[i]
        cap_j = alpha[j] if positive[j] else C - alpha[j]
        step = min(b[j] / a[j], cap_i, cap_j)

        alpha[i] += signs[i] * step
        alpha[j] -= signs[j] * step
        if step == cap_i:
            alpha[i] = C if positive[i] else 0.0
        if step == cap_j:
            alpha[j] = 0.0 if positive[j] else C
        gradient += signs * step * (K[i] - K[j])

    logger.warning("SMO stopped at the iteration cap (%d) before converging", max_iter)
    return alpha, max_iter


def _subgradient(
    Z: np.ndarray, signs: np.ndarray, params: SvmParams
) -> tuple[np.ndarray, float]:
    """Pegasos-style projected subgradient passes over shuffled rows.

    The bias sits inside the margin and takes the unregularized hinge step.
    Returns the average of the iterates over the second half of the run.
    """
    n, d = Z.shape
    lam = 1.0 / (params.C * n)
    radius = 1.0 / math.sqrt(lam)
    rng = np.random.default_rng(params.seed)
    w = np.zeros(d)
    b = 0.0
    w_sum = np.zeros(d)
    b_sum = 0.0
    averaged = 0
    start = params.epochs * n // 2
    t = 0
    for _ in range(params.epochs):
        for index in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            violated = signs[index] * (Z[index] @ w + b) < 1.0
            w *= 1.0 - eta * lam
            if violated:
                w += eta * signs[index] * Z[index]
                b += eta * signs[index]
            norm = math.sqrt(float(w @ w))
            if norm > radius:
                w *= radius / norm
            if t > start:
                w_sum += w
                b_sum += b
                averaged += 1
    return w_sum / averaged, b_sum / averaged


def train_svm(
    X: FeatureMatrix | Sequence[FeatureVector],
    y: Sequence[Label],
    C: float = DEFAULT_C,
    seed: int = 0,
    *,
    trait: str = "",
    epochs: int = DEFAULT_EPOCHS,
    solver: Solver | str = Solver.SMO,
    tolerance: float = DEFAULT_TOLERANCE,
) -> TrainedModel:
    """Fit a linear soft-margin SVM on standardized features.

    Minimizes (1/2)|w|^2 + C * sum max(0, 1 - y(w.x + b)). Features that are
    constant in training carry weight 0. Deterministic given the inputs and
    the seed.
    """
    params = SvmParams(C=C, epochs=epochs, seed=seed, solver=Solver(solver), tolerance=tolerance)
    schema, values = _as_array(X)
    if len(y) != len(values):
        raise TrainingError(f"{len(values)} feature vectors but {len(y)} labels")
    if len(values) < 2:
        raise TrainingError("need at least two training instances")
    signs = _signs(y)
    if np.all(signs == signs[0]):
        raise TrainingError("degenerate training set: only one label present")

    rows = X.ids if isinstance(X, FeatureMatrix) else ()
    record_reads(Phase.SCALING, rows)
    scaling = Standardizer.fit(values)
    Z = scaling.transform(values)
    if scaling.constant.any():
        logger.debug("%d constant feature(s) get weight 0", int(scaling.constant.sum()))

    record_reads(Phase.TRAINING, rows)
    if params.solver == Solver.SMO:
        alpha, iterations = _smo(Z @ Z.T, signs, params.C, params.tolerance)
        weights = (alpha * signs) @ Z
        logger.debug("SMO converged in %d iterations", iterations)
    else:
        weights, bias = _subgradient(Z, signs, params)
        logger.debug("Subgradient bias %s before the exact bias step", format_float(bias))
    weights[scaling.constant] = 0.0
    bias = optimal_bias(Z @ weights, signs)

    return TrainedModel(
        trait=trait,
        feature_names=schema.names,
        schema_hash=schema.hash,
        weights=weights,
        bias=bias,
        scaling=scaling,
        params=params,
    )


def predict(model: TrainedModel, x: FeatureVector) -> Prediction:
    """Label and margin of one feature vector; margin >= 0 means yes."""
    model._check_schema(x.schema)
    margin = model.decision(np.array([x.values], dtype=float))[0]
    return Prediction.from_margin(float(margin))


def train_majority(y: Sequence[Label], *, trait: str = "") -> MajorityModel:
    """The more frequent label; a tie predicts yes."""
    if not y:
        raise TrainingError("no training labels")
    yes = sum(1 for label in y if Label(label) is Label.YES)
    return MajorityModel(trait, Label.YES if yes >= len(y) - yes else Label.NO)


def train_trait_models(
    matrix: FeatureMatrix,
    labels: Mapping[str, Sequence[Label]],
    *,
    params: SvmParams = SvmParams(),
    jobs: int = 1,
) -> dict[str, TrainedModel]:
    """Train one independent model per trait."""

    def fit(trait: str) -> TrainedModel:
        model = train_svm(
            matrix,
            labels[trait],
            params.C,
            params.seed,
            trait=trait,
            epochs=params.epochs,
            solver=params.solver,
            tolerance=params.tolerance,
        )
        logger.info("Trained %s model on %d documents", trait, len(matrix))
        return model

    traits = list(labels)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            models = list(pool.map(fit, traits))
    else:
        models = [fit(t) for t in traits]
    return dict(zip(traits, models))


# Model files


def format_model(model: TrainedModel, provenance: Provenance | None = None) -> list[str]:
    p = model.params
    lines = [
        f"#trait={model.trait}",
        f"#schema_hash={model.schema_hash}",
        f"#C={format_float(p.C)}",
        f"#seed={p.seed}",
        f"#epochs={p.epochs}",
        f"#solver={p.solver}",
        f"#tolerance={format_float(p.tolerance)}",
    ]
    if provenance is not None:
        lines.append(provenance.comment_line())
    for name, mean, std, weight in zip(
        model.feature_names, model.scaling.mean, model.scaling.std, model.weights
    ):
        lines.append(
            f"{name}\t{format_float(mean)}\t{format_float(std)}\t{format_float(weight)}"
        )
    lines.append(f"{BIAS_ROW}\t{format_float(model.bias)}")
    return lines


def save_model(
    model: TrainedModel, path: str | Path, provenance: Provenance | None = None
) -> None:
    write_lines(path, format_model(model, provenance))


def load_model(path: str | Path) -> TrainedModel:
    """Read a model file written by `save_model`."""
    lines = read_lines(path)
    preamble = split_preamble(lines)
    meta = preamble.metadata
    for key in ("trait", "schema_hash", "C", "seed"):
        if key not in meta:
            raise ModelFormatError(f"missing '#{key}=' header", path=path, line=1)

    names: list[str] = []
    rows: list[tuple[float, float, float]] = []
    bias: float | None = None
    for number in range(preamble.body_start, len(lines) + 1):
        line = lines[number - 1]
        if not line.strip():
            continue
        if bias is not None:
            raise ModelFormatError("rows after the bias row", path=path, line=number)
        parts = line.split("\t")
        if parts[0] == BIAS_ROW and len(parts) == 2:
            bias = parse_float(parts[1], error=ModelFormatError, path=path, line=number)
            continue
        if len(parts) != 4:
            raise ModelFormatError(
                f"expected 4 tab-separated fields, got {len(parts)}", path=path, line=number
            )
        names.append(parts[0])
        mean, std, weight = (
            parse_float(p, error=ModelFormatError, path=path, line=number, column=c)
            for p, c in zip(parts[1:], ("mean", "stdev", "weight"))
        )
        if std < 0:
            raise ModelFormatError("negative stdev", path=path, line=number)
        rows.append((mean, std, weight))
    if bias is None:
        raise ModelFormatError("missing bias row", path=path)

    schema = FeatureSchema.from_names(names)
    if schema.hash != meta["schema_hash"]:
        raise ModelFormatError(
            "feature rows do not match the schema hash",
            path=path,
            detail=f"{schema.hash} != {meta['schema_hash']}",
        )
    try:
        params = SvmParams(
            C=float(meta["C"]),
            epochs=int(meta.get("epochs", DEFAULT_EPOCHS)),
            seed=int(meta["seed"]),
            solver=Solver(meta.get("solver", Solver.SMO)),
            tolerance=float(meta.get("tolerance", DEFAULT_TOLERANCE)),
        )
    except (ValueError, TrainingError) as e:
        raise ModelFormatError("invalid hyperparameter header", path=path, detail=str(e)) from None

    table = np.array(rows, dtype=float).reshape(len(rows), 3)
    return TrainedModel(
        trait=meta["trait"],
        feature_names=tuple(names),
        schema_hash=meta["schema_hash"],
        weights=table[:, 2].copy(),
        bias=bias,
        scaling=Standardizer(table[:, 0].copy(), table[:, 1].copy()),
        params=params,
    )
