import csv

import numpy as np
import pytest

import cli
from analytic_core import BoundaryGrid
from errors import ConfigParseError, ConfigValidationError

EVOLVE_RUN = "subcommand=evolve\ngenerator=dilation\nweight=constant:1.0\ndata=monomial:3\nt=0.5\nN=256\n"


def write_run(tmp_path, text, name='run.cfg'):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return str(path)


def read_rows(path):
    with open(path, newline='', encoding='utf-8') as handle:
        return list(csv.DictReader(handle))


def test_parse_config_evolve_run():
    config = cli.parse_config(EVOLVE_RUN)
    assert config.subcommand == 'evolve'
    assert config.weight == 'constant:1.0'
    assert config.t == (0.5,)
    assert config.N == 256


def test_parse_config_sections_and_comments():
    text = "[run]\nsubcommand = flow  # first\n\n[problem]\ngenerator=bp:shifted:0.2+0.1j\nt=0.1, 0.5\n"
    config = cli.parse_config(text)
    assert config.generator == 'bp:shifted:0.2+0.1j'
    assert config.t == (0.1, 0.5)
    assert cli.parse_config("t=1", subcommand='map').subcommand == 'map'


def test_missing_subcommand():
    with pytest.raises(ConfigValidationError) as info:
        cli.parse_config("generator=dilation\n")
    assert info.value.field == 'subcommand'


@pytest.mark.parametrize('line, field', [
    ('N=100', 'N'),
    ('t=-1', 't'),
    ('tol=0', 'tol'),
    ('domain=ellipse', 'domain'),
    ('generator=bp:two:0', 'generator'),
    ('data=monomial:x', 'data'),
    ('weight=constant:1,2', 'weight'),
    ('tol=1e-8,1e-6', 'tol'),
    ('z0=0.1,0.2', 'z0'),
])
def test_validation_errors_name_the_field(line, field):
    with pytest.raises(ConfigValidationError) as info:
        cli.parse_config(f"subcommand=flow\n{line}\n")
    assert info.value.field == field


@pytest.mark.parametrize('text, line_number', [
    ("subcommand=flow\ncolour=red\n", 2),
    ("subcommand=flow\n[extras]\n", 2),
    ("subcommand\n", 1),
    ("subcommand=flow\nt=1\nt=2\n", 3),
    ("subcommand=flow\nN=\n", 2),
])
def test_parse_errors_carry_line_numbers(text, line_number):
    with pytest.raises(ConfigParseError) as info:
        cli.parse_config(text)
    assert info.value.line_number == line_number


def test_subcommand_conflict():
    with pytest.raises(ConfigValidationError):
        cli.parse_config("subcommand=flow\n", subcommand='map')


def test_descriptor_parsers():
    assert cli.parse_domain('polynomial:0.3') == ('polynomial', [0.3 + 0j])
    assert cli.parse_domain('starlike:limacon:0.2') == ('starlike', 'limacon', 0.2)
    assert cli.parse_generator('series:0,-1') == ('series', [0j, -1 + 0j])
    assert cli.parse_weight('zero') == ('zero',)
    assert cli.parse_data('coeffs:1,0.5') == ('coeffs', [1 + 0j, 0.5 + 0j])


def test_build_data_rejects_modes_beyond_the_grid():
    with pytest.raises(ConfigValidationError):
        cli.build_data('monomial:40', BoundaryGrid(64))


def test_evolve_run(tmp_path):
    out = tmp_path / 'out'
    assert cli.main(['evolve', '--config', write_run(tmp_path, EVOLVE_RUN), '--out', str(out)]) == 0
    rows = read_rows(out / 'evolve.csv')
    assert len(rows) == 256
    first = rows[0]
    assert float(first['t']) == 0.5 and float(first['theta']) == 0.0
    assert float(first['re_u']) == pytest.approx(np.exp(-1.0), abs=1e-8)
    assert float(first['im_u']) == pytest.approx(0.0, abs=1e-8)
    assert len(read_rows(out / 'initial.csv')) == 256
    cocycle = read_rows(out / 'cocycle.csv')
    assert float(cocycle[0]['re_m']) == pytest.approx(np.exp(0.5), abs=1e-8)


def test_flow_run(tmp_path):
    run_file = write_run(tmp_path, f"subcommand=flow\ngenerator=dilation\nz0=0.5\nt={float(np.log(2))!r}\n")
    assert cli.main(['flow', '--config', run_file, '--out', str(tmp_path)]) == 0
    rows = read_rows(tmp_path / 'flow.csv')
    assert [float(row['t']) for row in rows] == [0.0, np.log(2)]
    assert float(rows[0]['re_z']) == 0.5
    assert float(rows[-1]['re_z']) == pytest.approx(0.25, abs=1e-10)
    assert float(rows[-1]['re_dz']) == pytest.approx(0.5, abs=1e-10)


def test_map_run(tmp_path):
    run_file = write_run(tmp_path, "subcommand=map\ndomain=polynomial:0.3\nN=64\noutput=poly.csv\n")
    assert cli.main(['map', '--config', run_file, '--out', str(tmp_path)]) == 0
    with open(tmp_path / 'poly.csv', encoding='utf-8') as handle:
        header = handle.readline().strip()
    assert header == 'theta,sigma,re_x,im_x,re_nu,im_nu'
    rows = read_rows(tmp_path / 'poly.csv')
    assert len(rows) == 64
    assert float(rows[0]['re_x']) == pytest.approx(1.3)


def test_output_is_deterministic(tmp_path):
    run_file = write_run(tmp_path, "subcommand=evolve\ngenerator=parabolic\nweight=series:0,1\n"
                                   "data=coeffs:1,0.5,0.25\nt=0.2,1\nN=64\n")
    first, second = tmp_path / 'a', tmp_path / 'b'
    assert cli.main(['evolve', '--config', run_file, '--out', str(first)]) == 0
    assert cli.main(['evolve', '--config', run_file, '--out', str(second)]) == 0
    for name in ('evolve.csv', 'initial.csv', 'cocycle.csv'):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_exit_codes(tmp_path):
    assert cli.main(['flow', '--config', str(tmp_path / 'missing.cfg')]) == 1
    bad = write_run(tmp_path, "subcommand=flow\nN=100\n", 'bad.cfg')
    assert cli.main(['flow', '--config', bad, '--out', str(tmp_path)]) == 1
    harmonic = write_run(tmp_path, "subcommand=evolve\ndata=cos\nN=64\n", 'cos.cfg')
    assert cli.main(['evolve', '--config', harmonic, '--out', str(tmp_path)]) == 2


def test_run_reports_failures_as_a_dict(tmp_path):
    config = cli.RunConfig('evolve', data='cos', N=64)
    result = cli.run(config, str(tmp_path))
    assert not result['success']
    assert result['exit_code'] == 2
    assert 'negative modes' in result['error']


def test_verify_run(tmp_path):
    config = cli.RunConfig('verify', N=64)
    result = cli.run(config, str(tmp_path))
    rows = read_rows(tmp_path / 'verification.csv')
    names = {row['check_name'] for row in rows}
    assert {'lax_vs_multiplier', 'robin_shift_law', 'robin_semigroup_law', 'dtn_positivity',
            'cocycle_law', 'littlewood_bound', 'distributional_pairing', 'pairing_forms'} <= names
    assert len(names) == len(rows)
    semigroup = next(row for row in rows if row['check_name'] == 'robin_semigroup_law')
    assert np.isfinite(float(semigroup['residual']))
    all_passed = all(row['pass_flag'] == 'true' for row in rows)
    assert result['exit_code'] == (0 if all_passed else 3)
    pairings = read_rows(tmp_path / 'pairing.csv')
    assert [int(row['test_mode_index']) for row in pairings] == list(range(9))


def test_run_check_rows():
    assert cli.run_check('passes', lambda: 1e-9, 1e-8) == ('passes', 1e-9, 1e-8, True)
    assert cli.run_check('fails', lambda: 1e-6, 1e-8)[3] is False

    def raises():
        raise ValueError("no convergence")

    name, residual, tolerance, passed = cli.run_check('broken', raises, 1e-8)
    assert name == 'broken' and not passed
    assert np.isnan(residual) and np.isnan(tolerance)


def test_robin_laws_report_separately_on_a_coarse_grid():
    grid = BoundaryGrid(64)
    checks = cli._check_robin_laws(grid, np.random.default_rng(0))
    report = [cli.run_check(name, check, tol) for name, check, tol in checks]
    assert [row[0] for row in report] == ['robin_shift_law', 'robin_semigroup_law', 'dtn_positivity']
    assert all(np.isfinite(row[1]) for row in report)


def test_cocycle_check_covers_the_time_grid(monkeypatch, grid, polynomial_map, limacon_map):
    seen = set()

    def record(spec, s, t, points):
        seen.add((s, t))
        return 0.0

    monkeypatch.setattr(cli, 'cocycle_identity_residual', record)
    checks = {name: check for name, check, _ in cli._check_flows(grid, polynomial_map, limacon_map)}
    assert checks['cocycle_law']() == 0.0
    assert seen == {(s, t) for s in (0.1, 0.5, 1.0) for t in (0.1, 0.5, 1.0)}
