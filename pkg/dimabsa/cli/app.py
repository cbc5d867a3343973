"""Main CLI application entry point."""

import logging

import typer
from rich.logging import RichHandler

from dimabsa import __version__
from dimabsa.cli import data_cmd, eda_cmd, gen_cmd, model_cmd

app = typer.Typer(
    name="dabsa",
    help="DimABSA - dimensional aspect-based sentiment analysis toolkit",
    no_args_is_help=True,
)

# Register subcommands
app.add_typer(data_cmd.app, name="data", help="Validate, flatten and score data files")
app.add_typer(model_cmd.app, name="model", help="Train and run the VA regressor")
app.add_typer(gen_cmd.app, name="gen", help="Prompts, generation parsing and adapter configs")
app.add_typer(eda_cmd.app, name="eda", help="Split statistics and drift")


@app.callback()
def setup(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Show debug logging"),
) -> None:
    """Configure logging for every command."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(show_path=False, rich_tracebacks=False)],
        force=True,
    )


@app.command()
def version() -> None:
    """Show DimABSA version."""
    typer.echo(f"DimABSA v{__version__}")


def main() -> None:
    """Main entry point."""
    app()


if __name__ == "__main__":
    main()
