"""Command-line front end.

Exit codes are uniform across commands: 0 success, 1 verification failure
(a candidate factor did not check out), 2 validation failure (the input
model is outside the supported class), 3 parse failure (a file could not be
read).
"""

from __future__ import annotations

import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from . import __version__
from .demo import run_demo
from .divisors import divisor_from_projector, projector_from_spec
from .errors import (
    DegreeViolation,
    NotAFactor,
    NotMinimalFactor,
    SpectralFactorsError,
    SpectrumMismatch,
)
from .factors import extract_left_divisor, minimal_factor, verify_factor
from .matnum import DEFAULT_TOL, eigen_blocks
from .modelio import (
    ModelFileError,
    SpecFileError,
    expand_spec_entries,
    read_model,
    read_spec_entries,
    write_model,
)
from .spectral import (
    check_gramian_identities,
    conjugate_phase,
    spectrum_samples,
    validate_outer,
)
from .statespace import (
    Realization,
    choose_moebius_parameter,
    moebius,
    poles_zeros,
)

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_VALIDATION = 2
EXIT_PARSE = 3


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_model(path):
    try:
        return read_model(path)
    except ModelFileError as exc:
        _fail(EXIT_PARSE, str(exc))


def _config_for(doc, tol, samples):
    config = doc.tolerances or DEFAULT_TOL
    if tol is not None:
        config = replace(config, residual_tol=tol)
    if samples is not None:
        config = replace(config, circle_samples=samples)
    return config


def _parse_moebius(value):
    """--moebius without a value means automatic parameter choice."""
    if value is None:
        return None
    if value == "auto":
        return True
    try:
        return float(value)
    except ValueError:
        _fail(EXIT_PARSE, f"--moebius expects a number, got {value!r}")


def _maybe_transform(w, moebius_param, config):
    """Apply the gated Moebius preprocessing; returns (working model, a)."""
    if moebius_param is None:
        return w, None
    if moebius_param is True:
        pz = poles_zeros(w, config)
        zeros = pz.zeros if pz.zeros is not None else []
        a = choose_moebius_parameter(pz.poles, zeros, config)
    else:
        a = float(moebius_param)
    return moebius(w, a, config), a


def _mat(m):
    return np.asarray(m).tolist()


def _realization_dict(r: Realization):
    return {"A": _mat(r.a), "B": _mat(r.b), "C": _mat(r.c), "D": _mat(r.d)}


def _block_table(m, config):
    rows = []
    for blk in eigen_blocks(m, config):
        rows.append({
            "kind": blk.kind,
            "indices": list(blk.indices),
            "eigenvalues": [[v.real, v.imag] for v in blk.eigenvalues],
        })
    return rows


_tol_option = click.option("--tol", type=float, default=None,
                           help="Override the residual tolerance.")
_samples_option = click.option("--samples", type=int, default=None,
                               help="Override the number of circle samples.")
_moebius_option = click.option("--moebius", "moebius_value", is_flag=False,
                               flag_value="auto", default=None,
                               help="Preprocess through a Moebius change of "
                                    "variable (optionally give the parameter).")


@click.group()
@click.version_option(version=__version__, prog_name="spectralfactors")
def main():
    """Spectral factor families of discrete-time rational densities."""


@main.command()
@click.argument("model_path", type=click.Path(exists=False))
@click.option("-o", "--output", "out_path", type=click.Path(), default=None,
              help="Write the JSON report here instead of stdout.")
@_tol_option
@_samples_option
@_moebius_option
def analyze(model_path, out_path, tol, samples, moebius_value):
    """Construct the extremal factors and the conjugate phase function."""
    doc = _load_model(model_path)
    config = _config_for(doc, tol, samples)
    moebius_param = _parse_moebius(moebius_value)
    try:
        w_work, a = _maybe_transform(doc.realization, moebius_param, config)
        validate_outer(w_work, config)
        cp = conjugate_phase(w_work, config)
    except SpectralFactorsError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    ext = cp.extremals
    gramian = check_gramian_identities(cp, config)
    report = {
        "model": doc.name,
        "moebius_a": a,
        "w_plus": _realization_dict(ext.w_plus),
        "w_bar_plus": _realization_dict(ext.w_bar_plus),
        "conjugate_phase": _realization_dict(cp.t),
        "x": _mat(ext.x),
        "y": _mat(ext.y),
        "z": _mat(ext.z),
        "p0_inv": _mat(cp.p0_inv),
        "gramian_residuals": gramian.residuals(),
        "gramian_pass": gramian.passed,
        "eigenvalues": {
            "gamma_blocks": _block_table(cp.gamma, config),
            "a_blocks": _block_table(cp.a_inv_t, config),
        },
    }
    if a is not None:
        # Factors with a pole at -1/a in the working variable map back to a
        # pole at infinity: they exist only as improper functions of the
        # original variable and cannot be realized there.
        for key, system in (("w_plus_original_variable", ext.w_plus),
                            ("w_bar_plus_original_variable", ext.w_bar_plus)):
            try:
                report[key] = _realization_dict(moebius(system, -a, config))
            except SpectralFactorsError:
                report[key] = None
                report[key + "_note"] = (
                    "improper in the original variable (pole at infinity); "
                    "reported only in the transformed variable"
                )
    text = json.dumps(report, indent=2)
    if out_path:
        Path(out_path).write_text(text + "\n", encoding="utf-8")
        click.echo(f"analysis written to {out_path}")
    else:
        click.echo(text)
    sys.exit(EXIT_OK)


@main.command()
@click.argument("model_path", type=click.Path(exists=False))
@click.argument("specs_path", type=click.Path(exists=False))
@click.option("-d", "--outdir", type=click.Path(), default="factors",
              help="Directory for the emitted factor model files.")
@_tol_option
@_samples_option
@_moebius_option
def factors(model_path, specs_path, outdir, tol, samples, moebius_value):
    """Generate the spectral factors for a divisor specification file."""
    doc = _load_model(model_path)
    config = _config_for(doc, tol, samples)
    moebius_param = _parse_moebius(moebius_value)
    try:
        entries = read_spec_entries(specs_path)
    except SpecFileError as exc:
        _fail(EXIT_PARSE, str(exc))
    try:
        w_work, a = _maybe_transform(doc.realization, moebius_param, config)
        validate_outer(w_work, config)
        cp = conjugate_phase(w_work, config)
        specs = expand_spec_entries(entries, cp, config)
    except SpecFileError as exc:
        _fail(EXIT_PARSE, str(exc))
    except SpectralFactorsError as exc:
        _fail(EXIT_VALIDATION, str(exc))

    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    all_pass = True
    try:
        for i, spec in enumerate(specs):
            pi = projector_from_spec(cp, spec, config)
            div = divisor_from_projector(cp, pi, config)
            w, report = minimal_factor(w_work, div, config)
            if a is not None:
                w = moebius(w, -a, config)
                report = verify_factor(w, doc.realization, config)
            name = f"{doc.name}_factor_{i:03d}"
            write_model(out / f"factor_{i:03d}.json", w, name=name)
            all_pass &= report.passed
            pz = report.pole_zero
            rows.append({
                "factor": name,
                "file": f"factor_{i:03d}.json",
                "divisor_degree": div.degree,
                "subspace_dims": list(div.subspace_dims),
                "degree": report.degree,
                "poles": pz.to_dict()["poles"] if pz else None,
                "zeros": pz.to_dict()["zeros"] if pz else None,
                "spectrum_residual": report.spectrum_residual,
                "passed": report.passed,
            })
    except (DegreeViolation, SpectrumMismatch) as exc:
        _fail(EXIT_VALIDATION, str(exc))
    except SpectralFactorsError as exc:
        _fail(EXIT_VALIDATION, str(exc))

    summary = {"model": doc.name, "moebius_a": a, "factors": rows}
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n",
                                      encoding="utf-8")
    click.echo(f"{'factor':<28}{'deg':>4}  {'residual':>10}  verdict")
    for row in rows:
        verdict = "pass" if row["passed"] else "FAIL"
        click.echo(f"{row['factor']:<28}{row['degree']:>4}  "
                   f"{row['spectrum_residual']:>10.2e}  {verdict}")
    click.echo(f"{len(rows)} factors written to {out}")
    sys.exit(EXIT_OK if all_pass else EXIT_VALIDATION)


@main.command()
@click.argument("model_path", type=click.Path(exists=False))
@click.argument("candidate_path", type=click.Path(exists=False))
@_tol_option
@_samples_option
def verify(model_path, candidate_path, tol, samples):
    """Verify a candidate factor against a model's spectral density."""
    doc = _load_model(model_path)
    cand = _load_model(candidate_path)
    config = _config_for(doc, tol, samples)
    try:
        validate_outer(doc.realization, config)
    except SpectralFactorsError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    report = verify_factor(cand.realization, doc.realization, config)
    if report.passed:
        try:
            _, report = extract_left_divisor(doc.realization, cand.realization,
                                             config)
        except (NotAFactor, NotMinimalFactor) as exc:
            click.echo(str(report))
            click.echo(f"divisor extraction: {exc}")
            sys.exit(EXIT_VERIFY_FAIL)
        except SpectralFactorsError as exc:
            _fail(EXIT_VALIDATION, str(exc))
    click.echo(str(report))
    sys.exit(EXIT_OK if report.passed else EXIT_VERIFY_FAIL)


@main.command()
@click.argument("model_path", type=click.Path(exists=False))
@click.option("-n", "--samples", "n_samples", type=int, default=None,
              help="Number of circle samples (rows).")
@click.option("-o", "--output", "csv_path", type=click.Path(), default=None,
              help="Write CSV here instead of stdout.")
@_tol_option
def spectrum(model_path, n_samples, csv_path, tol):
    """Emit plot-ready spectral density samples on the unit circle."""
    doc = _load_model(model_path)
    config = _config_for(doc, tol, None)
    n = n_samples or config.circle_samples
    if n < 1:
        _fail(EXIT_PARSE, "sample count must be positive")
    w = doc.realization
    thetas = 2.0 * np.pi * np.arange(n) / n
    try:
        phi = spectrum_samples(w, np.exp(1j * thetas), config)
    except SpectralFactorsError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    m = w.n_out
    header = ["theta"]
    header += [f"phi_{i + 1}_{i + 1}" for i in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            header += [f"phi_{i + 1}_{j + 1}_re", f"phi_{i + 1}_{j + 1}_im"]

    def rows():
        for k in range(n):
            row = [f"{thetas[k]:.17g}"]
            row += [f"{phi[k, i, i].real:.17g}" for i in range(m)]
            for i in range(m):
                for j in range(i + 1, m):
                    row += [f"{phi[k, i, j].real:.17g}",
                            f"{phi[k, i, j].imag:.17g}"]
            yield row

    if csv_path:
        with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows())
        click.echo(f"{n} samples written to {csv_path}")
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows())
    sys.exit(EXIT_OK)


@main.command()
def example():
    """Run the bundled worked example and print each golden comparison."""
    checks = run_demo()
    failed = 0
    for chk in checks:
        status = "PASS" if chk.passed else "FAIL"
        click.echo(f"[{status}] {chk.label}: residual {chk.residual:.3e} "
                   f"(tol {chk.tol:.1e})")
        if chk.note:
            click.echo(f"       note: {chk.note}")
        failed += not chk.passed
    click.echo(f"{len(checks) - failed}/{len(checks)} checks passed")
    sys.exit(EXIT_OK if failed == 0 else EXIT_VERIFY_FAIL)


if __name__ == "__main__":
    main()
