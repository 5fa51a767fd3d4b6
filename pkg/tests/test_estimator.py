import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from delayfp import DelayFingerprinter, crop, generate_codebook


def test_get_params_and_clone():
    fp = DelayFingerprinter(alpha=0.1, scheme="original")
    params = fp.get_params()
    assert params["alpha"] == 0.1 and params["scheme"] == "original"
    assert clone(fp).get_params()["alpha"] == 0.1
    fp.set_params(alpha=0.02)
    assert fp.alpha == 0.02


def test_not_fitted():
    with pytest.raises(NotFittedError):
        DelayFingerprinter().predict(np.zeros(4096))


def test_round_trip(host):
    fp = DelayFingerprinter().fit()
    marked = fp.transform(host, user=11)
    assert fp.predict(marked) == [11]
    assert fp.predict(crop(marked, 300)) == [11]
    assert fp.predict(host) == []


def test_original_scheme_loses_user_after_crop(host):
    fp = DelayFingerprinter(scheme="original").fit()
    marked = fp.transform(host, user=11)
    assert fp.predict(marked) == [11]
    assert fp.predict(crop(marked, 300)) != [11]


def test_fit_transform_and_column_input(host):
    fp = DelayFingerprinter()
    y = fp.fit_transform(host.reshape(-1, 1), user=5)
    assert y.shape == host.shape
    assert fp.predict(y) == [5]


def test_profiles_shape(host):
    fp = DelayFingerprinter().fit()
    prof = fp.correlation_profiles(fp.transform(host, user=0))
    assert prof.shape == (17, 1024)
    assert int(np.argmax(prof[-1])) == fp.codebook_.sync.base_delay
    assert DelayFingerprinter(scheme="original").fit().correlation_profiles(host).shape == (16, 1024)


def test_preloaded_codebook(host):
    cb = generate_codebook(16, 1024, seed=99)
    fp = DelayFingerprinter(codebook=cb).fit()
    assert fp.codebook_ is cb
    with pytest.raises(ValueError):
        DelayFingerprinter(n_groups=8, codebook=cb).fit()


@pytest.mark.parametrize("bad", [np.zeros((10, 2)), np.array([0.0, np.inf] * 1024)])
def test_input_validation(bad):
    fp = DelayFingerprinter().fit()
    with pytest.raises(ValueError):
        fp.transform(bad, user=0)


def test_user_validation(host):
    fp = DelayFingerprinter().fit()
    with pytest.raises(ValueError):
        fp.transform(host, user=64)
    with pytest.raises(TypeError):
        fp.transform(host, user=1.5)


def test_bad_scheme():
    with pytest.raises(ValueError):
        DelayFingerprinter(scheme="fancy").fit()
