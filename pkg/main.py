#!/usr/bin/env python3
"""
Main entry point for ptomit.
Run `python main.py --help` for the subcommands.
"""
import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
