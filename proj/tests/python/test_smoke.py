import math
import os

import numpy as np
import pytest

import lnakit

F0 = 60e9


def test_noise_measure_matches_hand_formula():
    g = 10 ** 0.84
    assert lnakit.noise_measure(703.0, g) == pytest.approx(703.0 / (1 - 1 / g), rel=1e-12)
    assert lnakit.nf_db(290.0) == pytest.approx(10 * math.log10(2), abs=1e-12)
    assert lnakit.t_from_nf(lnakit.nf_db(548.0)) == pytest.approx(548.0, rel=1e-12)


def test_matched_pad_noise_figure_equals_loss():
    a = 10 ** (-6.0 / 20)
    r1 = 50 * (1 - a) / (1 + a)
    r2 = 50 * 2 * a / (1 - a * a)
    # tee pad in ABCD form: series r1, shunt 1/r2, series r1
    abcd = np.array([[1, r1], [0, 1]]) @ np.array([[1, 0], [1 / r2, 1]]) @ np.array([[1, r1], [0, 1]])
    pad = lnakit.NoisyTwoPort.passive(lnakit.TwoPort(F0, abcd.astype(complex), lnakit.Repr.ABCD))
    assert lnakit.nf_db(pad.noise_temperature(50)) == pytest.approx(6.0, abs=1e-9)


def test_noiseless_through_is_transparent():
    through = lnakit.NoisyTwoPort.noiseless(lnakit.TwoPort.identity(F0))
    amp = lnakit.NoisyTwoPort.passive(lnakit.TwoPort(F0, np.array([[60, 20], [20, 70]], dtype=complex), lnakit.Repr.Z))
    both = lnakit.cascade_noisy(through, amp)
    assert both.tnmin().t_nmin == pytest.approx(amp.tnmin().t_nmin, rel=1e-12)
    np.testing.assert_allclose(both.net.to(lnakit.Repr.Z).matrix, amp.net.to(lnakit.Repr.Z).matrix, rtol=1e-12)


def test_analyze_default_sizings():
    a = lnakit.analyze(lnakit.Sizing.default_a(), freqs=[50e9, 60e9, 70e9])
    assert len(a) == 3
    for row in a:
        assert row["eps_gn_db"] == pytest.approx(20 * math.log10(abs(row["s"][1, 0])) - row["nf_db"], abs=1e-12)
        assert row["tn_k"] >= row["tnmin_k"] * (1 - 1e-12)
        assert row["mu"] > 1
    b = lnakit.analyze(lnakit.Sizing.default_b())
    assert b[0]["eps_gn_db"] > a[1]["eps_gn_db"]


def test_sizing_components_use_topology_names():
    assert list(lnakit.Sizing.default_a().components()) == ["c1", "le", "c2", "lb", "lc", "cc", "co"]
    assert list(lnakit.Sizing.default_b().components()) == ["c1", "l1", "c2", "l2", "lc", "cc", "co"]


def test_errors_carry_kind():
    s = lnakit.Sizing.default_b()
    s.le_or_l1 = 0.0
    with pytest.raises(lnakit.LnaError) as e:
        s.validate()
    assert e.value.kind == "InvalidArgument"


def test_mpmn_outcome_round_trips():
    o = lnakit.design_mpmn()
    assert o.method == "mpmn"
    assert o.achieved["s11_db"] < -15
    again = lnakit.DesignOutcome.parse(str(o))
    assert str(again) == str(o)


def test_cli_compare(tmp_path):
    def outcome(name, s21, nf, mt0):
        p = tmp_path / name
        p.write_text(f"method = mpmn\nf0_hz = 60e9\ns21_db = {s21}\nnf_db = {nf}\nmt0_k = {mt0}\n")
        return os.fspath(p)

    code, out, _ = lnakit.run("compare", files=[outcome("a", 4.4, 4.7, 897), outcome("b", 8.4, 5.3, 821)])
    assert code == 0
    assert "-76.0" in out
    code, _, err = lnakit.run("analyze", config=os.fspath(tmp_path / "missing.cfg"))
    assert code == 2
