import itertools

import numpy as np
import pytest

from lqsim import _core
from lqsim.hypergraph import DecodingHypergraph, DetectorSpec, Hyperedge
from lqsim.mle import MleDecoder, decode_mle

RNG = np.random.default_rng(606)


def random_hypergraph(n_det, m, rng, max_degree=3, p_obs=0.3):
    detectors = [DetectorSpec(i, frozenset(), "a") for i in range(n_det)]
    edges = []
    for j in range(m):
        deg = int(rng.integers(1, max_degree + 1))
        dets = rng.choice(n_det, size=min(deg, n_det), replace=False)
        det_mask = 0
        for d in dets:
            det_mask |= 1 << int(d)
        obs_mask = 1 if rng.random() < p_obs else 0
        p = float(rng.uniform(0.01, 0.4))
        edges.append(Hyperedge(j, p, det_mask, obs_mask, False))
    return DecodingHypergraph(detectors, [], edges)


def exhaustive_optimum(h, syndrome):
    """2^M scan; returns (best weight, lex-lowest optimal id set) or None."""
    m = len(h.edges)
    best = None
    for subset in range(1 << m):
        s = 0
        w = 0.0
        ids = []
        for j in range(m):
            if (subset >> j) & 1:
                s ^= h.edges[j].det_mask
                w += h.edges[j].weight
                ids.append(j)
        if s != syndrome:
            continue
        key = (w, tuple(ids))
        if best is None or w < best[0] - 1e-9 or (
                abs(w - best[0]) <= 1e-9 and tuple(ids) < best[1]):
            best = (w, tuple(ids))
    return best


def test_all_zero_syndrome():
    h = random_hypergraph(6, 10, np.random.default_rng(1))
    out = decode_mle(h, 0)
    assert out.edge_ids == () and out.weight == 0.0


def test_single_unit_edge():
    detectors = [DetectorSpec(0, frozenset(), "a")]
    h = DecodingHypergraph(detectors, [],
                           [Hyperedge(0, 0.1, 0b1, 1, False)])
    out = decode_mle(h, 0b1)
    assert out.edge_ids == (0,)
    assert out.obs_mask == 1


def test_infeasible_syndrome_raises():
    detectors = [DetectorSpec(0, frozenset(), "a"),
                 DetectorSpec(1, frozenset(), "a")]
    h = DecodingHypergraph(detectors, [],
                           [Hyperedge(0, 0.1, 0b11, 0, False)])
    with pytest.raises(ValueError):
        decode_mle(h, 0b01)


@pytest.mark.parametrize("impl", ["python", "compiled"])
def test_random_instances_match_exhaustive(impl):
    if impl == "compiled" and not _core.HAVE_COMPILED:
        pytest.skip("extension not built")
    rng = np.random.default_rng(77)
    for trial in range(150):
        n_det = int(rng.integers(2, 9))
        m = int(rng.integers(2, 12))
        h = random_hypergraph(n_det, m, rng)
        syndrome = int(rng.integers(1 << n_det))
        want = exhaustive_optimum(h, syndrome)
        if want is None:
            with pytest.raises(ValueError):
                decode_mle(h, syndrome, force_impl=impl)
            continue
        got = decode_mle(h, syndrome, force_impl=impl)
        assert np.isclose(got.weight, want[0], atol=1e-7), trial


def test_all_syndromes_of_fixed_instances():
    rng = np.random.default_rng(99)
    for _ in range(5):
        n_det = 6
        h = random_hypergraph(n_det, 10, rng)
        dec = MleDecoder(h)
        for syndrome in range(1 << n_det):
            want = exhaustive_optimum(h, syndrome)
            if want is None:
                with pytest.raises(ValueError):
                    dec.decode(syndrome)
                continue
            got = dec.decode(syndrome)
            assert np.isclose(got.weight, want[0], atol=1e-7)


def test_compiled_and_python_agree():
    if not _core.HAVE_COMPILED:
        pytest.skip("extension not built")
    rng = np.random.default_rng(31)
    for _ in range(60):
        n_det = int(rng.integers(3, 14))
        m = int(rng.integers(4, 40))
        h = random_hypergraph(n_det, m, rng)
        syndrome = int(rng.integers(1 << n_det))
        try:
            a = decode_mle(h, syndrome, force_impl="python")
        except ValueError:
            with pytest.raises(ValueError):
                decode_mle(h, syndrome, force_impl="compiled")
            continue
        b = decode_mle(h, syndrome, force_impl="compiled")
        assert np.isclose(a.weight, b.weight, atol=1e-9)
        assert a.edge_ids == b.edge_ids


def test_component_split_is_exact():
    # two disjoint components decoded jointly
    detectors = [DetectorSpec(i, frozenset(), "a") for i in range(4)]
    edges = [Hyperedge(0, 0.1, 0b0011, 0, False),
             Hyperedge(1, 0.2, 0b0001, 0, False),
             Hyperedge(2, 0.2, 0b0010, 0, False),
             Hyperedge(3, 0.05, 0b1100, 1, False),
             Hyperedge(4, 0.3, 0b0100, 0, False),
             Hyperedge(5, 0.3, 0b1000, 0, False)]
    h = DecodingHypergraph(detectors, [], edges)
    out = decode_mle(h, 0b1111)
    want = exhaustive_optimum(h, 0b1111)
    assert np.isclose(out.weight, want[0], atol=1e-9)


def test_decoder_cache_consistency():
    h = random_hypergraph(6, 12, np.random.default_rng(8))
    dec = MleDecoder(h)
    a = dec.decode(0b10101)
    b = dec.decode(0b10101)
    assert a is b
