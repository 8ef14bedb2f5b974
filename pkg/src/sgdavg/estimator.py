"""scikit-learn estimator wrapping SGD on the regularised hinge objective."""

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils import check_random_state
from sklearn.utils.multiclass import unique_labels
from sklearn.utils.validation import check_is_fitted, validate_data

from .averaging import LastIterate, PolyDecayAverage, SuffixAverage, UniformAverage
from .engine import RunConfig, StronglyConvex, run_sgd
from .oracles import RegularizedHinge
from .svmlight import Dataset

AVERAGING = ("polydecay", "suffix", "uniform", "last")


class AveragedSGDClassifier(ClassifierMixin, BaseEstimator):
    """Linear SVM trained by stochastic subgradient descent with iterate averaging.

    Minimises ``(lam/2)||w||^2 + mean_i max(0, 1 - y_i <x_i, w>)`` over R^d
    with steps ``1/(lam t)`` and one uniformly drawn example per step,
    starting at ``w = 0``. The returned weights are chosen by ``averaging``:

    - ``"polydecay"``: polynomial-decay average with parameter ``eta``
    - ``"suffix"``: mean of the last ``alpha * n_iter`` iterates
    - ``"uniform"``: mean of all iterates
    - ``"last"``: the final iterate

    There is no intercept term; append a constant feature if one is needed.

    Parameters
    ----------
    lam : float, default=1e-4
        Regularisation strength, also the strong-convexity constant used in
        the step size.
    n_iter : int, default=10000
        Number of stochastic subgradient steps.
    averaging : {"polydecay", "suffix", "uniform", "last"}, default="polydecay"
    eta : float, default=3.0
        Polynomial-decay parameter (``averaging="polydecay"``).
    alpha : float, default=0.5
        Suffix fraction (``averaging="suffix"``).
    random_state : int, RandomState instance or None, default=None

    Attributes
    ----------
    coef_ : ndarray of shape (1, n_features)
    intercept_ : ndarray of shape (1,), always zero
    classes_ : ndarray of shape (2,)
    objective_ : float
        Training objective at ``coef_``.
    """

    def __init__(self, lam=1e-4, n_iter=10_000, averaging="polydecay", eta=3.0, alpha=0.5,
                 random_state=None):
        self.lam = lam
        self.n_iter = n_iter
        self.averaging = averaging
        self.eta = eta
        self.alpha = alpha
        self.random_state = random_state

    def _observer(self):
        if self.averaging == "polydecay":
            return PolyDecayAverage(self.eta)
        if self.averaging == "suffix":
            return SuffixAverage(self.alpha, self.n_iter)
        if self.averaging == "uniform":
            return UniformAverage()
        if self.averaging == "last":
            return LastIterate()
        raise ValueError(f"averaging must be one of {AVERAGING}, got {self.averaging!r}")

    def fit(self, X, y):
        X, y = validate_data(self, X, y, accept_sparse="csr", dtype=np.float64)
        self.classes_ = unique_labels(y)
        if len(self.classes_) != 2:
            raise ValueError(f"binary classification only; got {len(self.classes_)} classes")
        if not self.lam > 0:
            raise ValueError(f"lam must be > 0, got {self.lam!r}")
        if int(self.n_iter) < 2:
            raise ValueError(f"n_iter must be >= 2, got {self.n_iter!r}")
        signs = np.where(y == self.classes_[1], 1.0, -1.0)
        data = Dataset(sp.csr_matrix(X), signs)
        obj = RegularizedHinge(self.lam, data)

        seed = int(check_random_state(self.random_state).randint(0, 2**31 - 1))
        observer = self._observer()
        config = RunConfig(int(self.n_iter), StronglyConvex(self.lam), seed=seed,
                           record_points=(int(self.n_iter),))
        record = run_sgd(obj, config, {"w": observer}, reference=0.0)
        w = record.final["w"]
        self.coef_ = np.asarray(w, dtype=float).reshape(1, -1)
        self.intercept_ = np.zeros(1)
        self.objective_ = float(obj.value(w))
        self.n_iter_ = int(self.n_iter)
        return self

    def decision_function(self, X):
        check_is_fitted(self)
        X = validate_data(self, X, accept_sparse="csr", dtype=np.float64, reset=False)
        return np.asarray(X @ self.coef_[0]).ravel() + self.intercept_[0]

    def predict(self, X):
        scores = self.decision_function(X)
        return self.classes_[(scores > 0).astype(int)]
