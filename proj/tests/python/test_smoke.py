"""End-to-end smoke tests for the python bindings and the CLI.

Reference values come from independent high-accuracy integrations of the
profile ODE (adaptive 8th-order runs at rtol 1e-13 from two regularization
offsets, agreeing to ~1e-12).
"""

import json
import math
import os
import subprocess

import pytest

import kscrit

M3 = 1.1652290696  # max of the unit-slope stationary profile, N = 3
A3 = 63.1350020482  # its first maximizer
Q = 2.0 / 3.0
P3 = kscrit.Parameters(3)


def test_version():
    assert kscrit.__version__ == "0.1.0"


def test_critical_constants_golden():
    cc = kscrit.critical_constants(P3, 1e-6)
    assert abs(cc.M - M3) < 1e-6
    assert abs(cc.A - A3) < 1e-6
    assert cc.M_bar == pytest.approx(27.0 * (4.0 * math.pi / 3.0) * cc.M)
    assert 0.0 < cc.M <= 2.0
    assert cc.tol <= 1e-4


def test_stationary_profile_and_scaling():
    u1 = kscrit.solve_Pa(1.0, P3, 1.0, 1e-8)
    assert u1.profile.values[-1] == pytest.approx(0.476802295453, abs=1e-7)
    u2 = kscrit.solve_Pa(2.0, P3, 1.0, 1e-8)
    # U_a(1) = U_1(a)
    assert u2.profile.values[-1] == pytest.approx(0.684324625542, abs=1e-7)
    assert u2.profile.derivative_at_zero == pytest.approx(2.0, abs=1e-8)
    assert math.isinf(u2.flat_point)  # no plateau inside [0, 1] for a = 2


def test_mass_trichotomy():
    kind, a, band = kscrit.find_a_for_mass(0.5 * M3, P3, 1e-8)
    assert kind == "unique" and not band
    u = kscrit.solve_Pa(a, P3, 1.0, 1e-8)
    assert u.profile.values[-1] == pytest.approx(0.5 * M3, abs=1e-7)

    kind, a, band = kscrit.find_a_for_mass(M3, P3, 1e-8)
    assert kind == "continuum" and band and a >= A3 - 1e-4

    kind, _, _ = kscrit.find_a_for_mass(1.1 * M3, P3, 1e-8)
    assert kind == "none"


def test_amplitude_law():
    law = kscrit.AmplitudeLaw.make(2.0, 0.1, Q)
    assert law.T_star == pytest.approx(1.0 / (0.1 * 2.0**Q * Q))
    assert kscrit.amplitude(law, 0.0) == pytest.approx(2.0)
    assert kscrit.amplitude(law, 0.5 * law.T_star) == pytest.approx(2.0 * 2.0**1.5)
    with pytest.raises(kscrit.InvalidInput):
        kscrit.amplitude(law, -1.0)
    with pytest.raises(kscrit.NumericalFailure):
        kscrit.amplitude(law, law.T_star)


def test_selfsim_profile_exceeds_stationary():
    v = kscrit.solve_Qeps(0.1, P3, 140.0, 1e-6)
    assert v.concave
    assert v.M_eps > M3
    assert v.A_eps > A3


def test_energy_closed_form():
    # for u = m x the energy reduces to 2.25 m^{4/3} - 0.3 m^2
    g = kscrit.Grid.graded(1.0, 3.0, 512)
    m = 0.9
    u = kscrit.Profile(g, [m * x for x in g.nodes], m)
    expected = 2.25 * m ** (4.0 / 3.0) - 0.3 * m * m
    assert kscrit.energy_F(u, kscrit.Parameters(3, m), 1e-10) == pytest.approx(
        expected, abs=1e-9
    )


def test_H_eps_golden():
    assert kscrit.H_eps(2.0, 0.1, Q, 1e-12) == pytest.approx(
        5.49556419590251629, abs=1e-9
    )
    assert kscrit.H_of(2.0, Q) == pytest.approx(5.66964472452692924, abs=1e-12)
    assert kscrit.f_eps(1.5, 0.1, Q) == pytest.approx(1.15253728833816922, abs=1e-14)


def test_profile_csv_roundtrip(tmp_path):
    u = kscrit.solve_Pa(1.5, P3, 1.0, 1e-6)
    path = str(tmp_path / "profile.csv")
    kscrit.write_profile_csv(u.profile, path)
    back = kscrit.read_profile_csv(path)
    assert list(back.values) == pytest.approx(list(u.profile.values), abs=1e-15)
    assert back.derivative_at_zero == pytest.approx(1.5, abs=1e-12)


def test_reconstruct_physical_mass():
    u = kscrit.solve_Pa(1.5 * A3, P3, 1.0, 1e-8)
    field = kscrit.reconstruct_physical(u.profile, P3, 0.0)
    expected = 27.0 * (4.0 * math.pi / 3.0) * M3
    assert field.total_mass == pytest.approx(expected, rel=1e-5)
    assert field.rho[-1] == pytest.approx(0.0, abs=1e-8)


def test_fit_blowup_rate_synthetic():
    T, eps, a0 = 2.0, 0.05, 1.0
    series = [
        (t, a0 * (1.0 - t / T) ** (-1.5))
        for t in [T * (1.0 - 10 ** (-3.0 * k / 399)) for k in range(400)]
    ]
    fit = kscrit.fit_blowup_rate(series, Q, 2.0)
    assert fit.exponent == pytest.approx(1.5, abs=1e-3)
    assert fit.T_estimate == pytest.approx(T, abs=1e-4)
    assert fit.r2 > 0.9999


def test_classify_roundtrip(tmp_path):
    report_path = tmp_path / "report.json"
    cfg = tmp_path / "subcritical.cfg"
    cfg.write_text(
        "[params]\n"
        "N = 3\n"
        f"m = {0.3 * M3!r}\n"
        "[init]\n"
        "descriptor = linear\n"
        "[scheme]\n"
        "kind = direct\n"
        "n_cells = 128\n"
        "horizon = 30\n"
        "record_interval = 0.25\n"
        "[thresholds]\n"
        "nmax = 1e4\n"
        "conv_tol = 1e-3\n"
        "[output]\n"
        f"report_json = {report_path}\n"
    )
    report = kscrit.classify(str(cfg))
    assert report["verdict"] == "converged"
    kind, a_root, _ = kscrit.find_a_for_mass(0.3 * M3, P3, 1e-8)
    assert kind == "unique"
    assert report["a_limit"] == pytest.approx(a_root, rel=0.01)
    assert report_path.exists()
    on_disk = json.loads(report_path.read_text())
    assert on_disk["verdict"] == report["verdict"]


CLI = os.environ.get("KSCRIT_CLI")


@pytest.mark.skipif(CLI is None, reason="KSCRIT_CLI not set")
def test_cli_critical_constants():
    out = subprocess.run(
        [CLI, "critical-constants", "--N", "3", "--tol", "1e-6"],
        capture_output=True,
        text=True,
        check=True,
    )
    doc = json.loads(out.stdout)
    assert abs(doc["M"] - M3) < 1e-6
    assert abs(doc["A"] - A3) < 1e-6


@pytest.mark.skipif(CLI is None, reason="KSCRIT_CLI not set")
def test_cli_stationary_writes_profile(tmp_path):
    path = str(tmp_path / "u.csv")
    out = subprocess.run(
        [CLI, "stationary", "--N", "3", "--a", "2.0", "--x-max", "1.0", "--out", path],
        capture_output=True,
        text=True,
        check=True,
    )
    doc = json.loads(out.stdout)
    assert doc["max_value"] == pytest.approx(0.684324625542, abs=1e-6)
    back = kscrit.read_profile_csv(path)
    assert back.values[-1] == pytest.approx(doc["max_value"], abs=1e-12)


@pytest.mark.skipif(CLI is None, reason="KSCRIT_CLI not set")
def test_cli_rejects_bad_input():
    out = subprocess.run(
        [CLI, "stationary", "--N", "2", "--a", "1.0"],
        capture_output=True,
        text=True,
    )
    assert out.returncode != 0
