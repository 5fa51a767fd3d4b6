import numpy as np


def check_signal(X, min_length=None, name="X"):
    """Coerce audio input to a finite 1-D float array.

    Accepts arrays, sequences, ``Signal`` objects and single-column 2-D
    arrays of shape ``(n_samples, 1)``.
    """
    X = getattr(X, "samples", X)
    X = np.asarray(X, dtype=float)
    if X.ndim == 2 and X.shape[1] == 1:
        X = X[:, 0]
    if X.ndim != 1:
        raise ValueError(f"{name} must be 1-D audio, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains NaN or infinite samples")
    if min_length is not None and len(X) < min_length:
        raise ValueError(f"{name} has {len(X)} samples, need at least {min_length}")
    return X


def check_user(user, n_users):
    if isinstance(user, (bool, np.bool_)) or not isinstance(user, (int, np.integer)):
        raise TypeError(f"user id must be an integer, got {type(user).__name__}")
    if not 0 <= user < n_users:
        raise ValueError(f"user id {user} outside [0, {n_users})")
    return int(user)
