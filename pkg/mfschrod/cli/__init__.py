"""Command-line front end; `mfschrod.cli.main:main` is the console entry point."""
