"""scikit-learn style front end.

``fit`` draws the codebook, ``transform`` embeds a user's fingerprint and
``predict`` traces the users present in a (possibly attacked) copy::

    fp = DelayFingerprinter(scheme="improved").fit()
    marked = fp.transform(audio, user=11)
    fp.predict(marked)          # -> [11]
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_signal, check_user
from .assignment import SchemeParams
from .codebook import DEFAULT_EPSILON, Codebook, generate_codebook
from .detector import ThresholdPolicy, _profile_matrix, detect, fold_frames
from .embedder import SCHEMES, EmbedSpec, embed_stream


class DelayFingerprinter(TransformerMixin, BaseEstimator):
    """Delay-based audio fingerprinting with optional sync-code repair.

    Parameters
    ----------
    n_groups : int
        Number of distinct group codes.
    users_per_group : int
        Users sharing a group code, separated only by embedding delay.
    frame_length : int
        Code length and frame size in samples.
    delay_step : int
        Spacing between consecutive group delays in samples.
    alpha : float
        Embedding strength relative to the local sample magnitude.
    scheme : {"original", "improved"}
        ``"improved"`` also embeds a shared sync code and corrects detected
        delays by its displacement.
    epsilon_orth : float
        Maximum normalized cyclic cross-correlation allowed between codes.
    random_state : int
        Codebook seed.
    kappa, floor_abs, tol :
        Detector threshold policy, see :class:`~delayfp.detector.ThresholdPolicy`.
    codebook : Codebook, optional
        Use an existing codebook instead of generating one in ``fit``.
    """

    def __init__(self, n_groups=16, users_per_group=4, frame_length=1024, delay_step=20,
                 alpha=0.05, scheme="improved", epsilon_orth=DEFAULT_EPSILON, random_state=42,
                 kappa=5.0, floor_abs=0.15, tol=2, codebook=None):
        self.n_groups = n_groups
        self.users_per_group = users_per_group
        self.frame_length = frame_length
        self.delay_step = delay_step
        self.alpha = alpha
        self.scheme = scheme
        self.epsilon_orth = epsilon_orth
        self.random_state = random_state
        self.kappa = kappa
        self.floor_abs = floor_abs
        self.tol = tol
        self.codebook = codebook

    def fit(self, X=None, y=None):
        """Draw the codebook. ``X`` and ``y`` are ignored."""
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        self.params_ = SchemeParams(self.n_groups, self.users_per_group, self.frame_length,
                                    self.delay_step, self.alpha)
        self.policy_ = ThresholdPolicy(self.kappa, self.floor_abs, self.tol)
        if self.codebook is not None:
            if not isinstance(self.codebook, Codebook):
                raise TypeError("codebook must be a Codebook")
            if self.codebook.n != self.frame_length or self.codebook.M != self.n_groups:
                raise ValueError("codebook shape does not match n_groups / frame_length")
            self.codebook_ = self.codebook
        else:
            self.codebook_ = generate_codebook(self.n_groups, self.frame_length,
                                               self.random_state, self.epsilon_orth)
        self.n_users_ = self.params_.N
        return self

    def transform(self, X, user):
        """Return ``X`` carrying ``user``'s fingerprint."""
        check_is_fitted(self, "codebook_")
        X = check_signal(X, min_length=self.frame_length)
        user = check_user(user, self.n_users_)
        return embed_stream(X, EmbedSpec(user, self.scheme, self.params_, self.codebook_))

    def fit_transform(self, X, y=None, user=0):
        return self.fit(X, y).transform(X, user)

    def trace(self, X):
        check_is_fitted(self, "codebook_")
        X = check_signal(X)
        return detect(X, self.codebook_, self.params_, self.scheme, self.policy_)

    def predict(self, X):
        """Sorted list of user ids traced in ``X``."""
        return self.trace(X).traced_users

    def correlation_profiles(self, X):
        """Normalized correlation at every lag, one row per group code.

        With the improved scheme a final row holds the sync code's profile.
        """
        check_is_fitted(self, "codebook_")
        X = check_signal(X, min_length=self.frame_length)
        codes = self.codebook_.code_matrix()
        if self.scheme == "improved":
            codes = np.vstack([codes, self.codebook_.sync.samples])
        return _profile_matrix(fold_frames(X, self.frame_length), codes)
