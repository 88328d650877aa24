from typing import Callable, List, Optional

import functools
import logging
from enum import Enum
from pathlib import Path

import msgspec
import numpy as np
import typer

from hermpert.alignment import align, m_matrix
from hermpert.config import Config
from hermpert.core import format_matrix, format_real, hadamard, parse_matrix
from hermpert.exceptions import HermPertException, RegressionFailure, StudyError
from hermpert.first_order import first_order_eigenvalues
from hermpert.harness import convergence_study, paper_example_regression
from hermpert.jacobi_oracle import eigh as oracle_eigh
from hermpert.rayleigh_schrodinger import line_expansion, predict_eigensystem
from hermpert.schur import SchurVariant, refined_eigenvalues
from hermpert.structs.matrix import DenseMatrix, HermitianMatrix
from hermpert.structs.study import EnsembleConfig, EnsembleKind, PredictorName

app = typer.Typer(
    add_completion=False,
    help="Perturbation expansions of Hermitian eigensystems.",
)

EXIT_USAGE = 2


class Order(str, Enum):
    FIRST = "1"
    SECOND = "2"
    SCHUR = "schur"
    SCHUR_SIMPLE = "schur-simple"


def handle_errors(command: Callable) -> Callable:
    """Maps library errors to their exit codes with the message on stderr."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except HermPertException as exc:
            typer.echo(f"error [{exc.code}]: {exc}", err=True)
            raise typer.Exit(exc.exit_code) from exc
        except (msgspec.DecodeError, ValueError) as exc:
            typer.echo(f"error [usage]: {exc}", err=True)
            raise typer.Exit(EXIT_USAGE) from exc

    return wrapper


def _read_hermitian(path: Path) -> HermitianMatrix:
    return parse_matrix(path.read_text(), hermitian=True)


def _echo_values(values: np.ndarray) -> None:
    for value in values:
        typer.echo(format_real(value))


def _echo_dense(values: np.ndarray) -> None:
    typer.echo(format_matrix(DenseMatrix.from_array(values)), nl=False)


def _csv_list(text: str, kind: type) -> List:
    try:
        return [kind(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise typer.BadParameter(f"cannot read {text!r} as a list") from None


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log to stderr."),
):
    if verbose:
        logging.basicConfig(
            level=logging.DEBUG,
            format="%(asctime)s %(name)s %(levelname)s %(message)s",
        )


@app.command()
@handle_errors
def eigh(matrix_file: Path = typer.Argument(..., exists=True, dir_okay=False)):
    """Prints the oracle eigenvalues, one per line, then the eigenvector matrix."""
    decomposition = oracle_eigh(_read_hermitian(matrix_file))
    _echo_values(decomposition.lam)
    typer.echo(
        format_matrix(DenseMatrix.from_array(decomposition.u), square_header=True),
        nl=False,
    )


@app.command()
@handle_errors
def predict(
    order: Order = typer.Option(..., "--order", help="1, 2, schur or schur-simple."),
    a: Path = typer.Option(..., "--a", exists=True, dir_okay=False),
    e: Path = typer.Option(..., "--e", exists=True, dir_okay=False),
    t: float = typer.Option(1.0, "--t", help="Scale of the perturbation."),
):
    """Predicts the eigenvalues of A + tE (and for order 2 the eigenvectors)."""
    a_matrix = _read_hermitian(a)
    e_matrix = _read_hermitian(e)
    if order is Order.SECOND:
        prediction = predict_eigensystem(align(a_matrix, e_matrix), None, t)
        _echo_values(prediction.xi_hat)
        typer.echo(format_matrix(prediction.u_hat, square_header=True), nl=False)
        return
    ap = align(a_matrix, e_matrix.scaled(t))
    if order is Order.FIRST:
        xi_hat = first_order_eigenvalues(ap)
    else:
        variant = SchurVariant.FULL if order is Order.SCHUR else SchurVariant.SIMPLIFIED
        xi_hat = refined_eigenvalues(ap, variant)
    _echo_values(xi_hat)


@app.command()
@handle_errors
def derivative(
    a: Path = typer.Option(..., "--a", exists=True, dir_okay=False),
    f: Path = typer.Option(..., "--f", exists=True, dir_okay=False),
):
    """Prints N, M o F_hat and U'(0) for the line A + tF."""
    ap = align(_read_hermitian(a), _read_hermitian(f))
    m = m_matrix(ap.base, ap.blocks)
    expansion = line_expansion(ap, m)
    _echo_dense(expansion.n_mat.entries)
    _echo_dense(hadamard(m.entries, ap.e_hat.entries))
    _echo_dense(expansion.u_prime.entries)


@app.command()
@handle_errors
def converge(
    predictor: Optional[PredictorName] = typer.Option(None, "--predictor"),
    seed: Optional[int] = typer.Option(None, "--seed", min=0),
    n: Optional[int] = typer.Option(None, "--n", min=1),
    blocks: Optional[str] = typer.Option(None, "--blocks", help="e.g. 2,2,1,1"),
    trials: int = typer.Option(1, "--trials", min=1),
    tgrid: Optional[str] = typer.Option(None, "--tgrid", help="e.g. 0.1,0.01"),
    workers: int = typer.Option(1, "--workers", min=1),
    ensemble: EnsembleKind = typer.Option(EnsembleKind.RANDOM, "--ensemble"),
    config: Optional[Path] = typer.Option(
        None, "--config", exists=True, dir_okay=False, help="EnsembleConfig JSON."
    ),
    as_json: bool = typer.Option(False, "--json", help="Print the report as JSON."),
):
    """Runs a convergence study and prints the errors as CSV."""
    if config is not None:
        cfg = msgspec.json.decode(config.read_bytes(), type=EnsembleConfig)
    else:
        if predictor is None or seed is None or n is None or blocks is None:
            raise typer.BadParameter(
                "--predictor, --seed, --n and --blocks are required without --config"
            )
        cfg = EnsembleConfig(
            seed=seed,
            n=n,
            block_spec=_csv_list(blocks, int),
            t_grid=_csv_list(tgrid, float) if tgrid else list(Config.DEFAULT_T_GRID),
            trials=trials,
            predictor=predictor,
            workers=workers,
            ensemble=ensemble,
        )
    report = convergence_study(cfg)
    if as_json:
        typer.echo(msgspec.json.encode(report).decode())
    else:
        typer.echo(report.to_csv(), nl=False)
    if not report.passed:
        raise StudyError(
            f"slope {report.slope:.4f} of {report.predictor} is below "
            f"{report.min_slope}"
        )


@app.command("paper-example")
@handle_errors
def paper_example(
    as_json: bool = typer.Option(False, "--json", help="Print the report as JSON."),
):
    """Checks the closed-form values of the three-by-three example."""
    report = paper_example_regression()
    if as_json:
        typer.echo(msgspec.json.encode(report).decode())
    else:
        for clause in report.clauses:
            status = "PASS" if clause.passed else "FAIL"
            typer.echo(
                f"{status} {clause.name}: {clause.value:.3e} "
                f"(tolerance {clause.tolerance:.1e}) {clause.message}"
            )
    if not report.passed:
        raise RegressionFailure(f"failing clauses: {', '.join(report.failed)}")


if __name__ == "__main__":
    app()
