"""Entry point: ``python app.py <verb> ...`` runs the ``epstein`` command line."""

from cli.epstein_cli import main

if __name__ == "__main__":
    raise SystemExit(main())
